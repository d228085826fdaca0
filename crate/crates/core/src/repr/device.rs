use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};
use crate::repr::basis;
use crate::repr::state::{BlochVector, DensityMatrix, Effect};
use crate::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceKind {
    /// Rows are states, `S u_ℓ = u_n`.
    StateFamily,
    /// Rows are effects, `M^T u_n = u_ℓ`.
    Povm,
}

/// An `n × ℓ` real matrix whose rows are the Bloch coordinates of a
/// device's states or effects.
///
/// As a linear map, a state family sends an effect to the vector of its
/// click probabilities on every state, and a measurement sends a state to
/// its outcome distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceMatrix {
    kind: DeviceKind,
    dim: usize,
    data: RMat,
}

impl DeviceMatrix {
    pub fn state_family(states: &[DensityMatrix]) -> Result<Self> {
        let dim = common_dim(states.iter().map(|s| s.dim()))?;
        let rows: Vec<_> = states.iter().map(|s| s.to_bloch()).collect();
        Ok(Self {
            kind: DeviceKind::StateFamily,
            dim,
            data: stack(&rows, dim),
        })
    }

    pub fn povm(effects: &[Effect]) -> Result<Self> {
        let dim = common_dim(effects.iter().map(|e| e.dim()))?;
        let rows: Vec<_> = effects.iter().map(|e| e.to_bloch()).collect();
        let out = Self {
            kind: DeviceKind::Povm,
            dim,
            data: stack(&rows, dim),
        };
        out.check_completeness(&Tolerances::default())?;
        Ok(out)
    }

    /// Validating constructor from raw coordinates.
    pub fn from_rows(kind: DeviceKind, data: RMat) -> Result<Self> {
        Self::from_rows_with(kind, data, &Tolerances::default())
    }

    pub fn from_rows_with(kind: DeviceKind, data: RMat, tol: &Tolerances) -> Result<Self> {
        let dim = basis::dim_from_ell(data.ncols())?;
        if data.nrows() == 0 {
            return Err(Error::InvalidParameter("device has no rows".into()));
        }
        let out = Self { kind, dim, data };
        out.validate(tol)?;
        Ok(out)
    }

    /// Device from operators (density matrices or effects) given as complex matrices.
    pub fn from_matrices(kind: DeviceKind, mats: &[CMat]) -> Result<Self> {
        match kind {
            DeviceKind::StateFamily => {
                let states = mats
                    .iter()
                    .map(|m| DensityMatrix::new(m.clone()))
                    .collect::<Result<Vec<_>>>()?;
                Self::state_family(&states)
            }
            DeviceKind::Povm => {
                let effects = mats
                    .iter()
                    .map(|m| Effect::new(m.clone()))
                    .collect::<Result<Vec<_>>>()?;
                Self::povm(&effects)
            }
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        match self.kind {
            DeviceKind::StateFamily => {
                for k in 0..self.rows() {
                    let first = self.data[(k, 0)];
                    if (first - 1.0).abs() > tol.completeness {
                        return Err(Error::Trace { trace: first });
                    }
                    DensityMatrix::with_tolerances(self.row(k).state_matrix()?, tol)?;
                }
            }
            DeviceKind::Povm => {
                for k in 0..self.rows() {
                    Effect::with_tolerances(self.row(k).effect_matrix()?, tol)?;
                }
                self.check_completeness(tol)?;
            }
        }
        Ok(())
    }

    fn check_completeness(&self, tol: &Tolerances) -> Result<()> {
        let residual = self.completeness_residual();
        if residual > tol.completeness {
            return Err(Error::Incomplete { residual });
        }
        Ok(())
    }

    /// `max |S u_ℓ - u_n|` for state families, `max |M^T u_n - u_ℓ|` for measurements.
    pub fn completeness_residual(&self) -> f64 {
        match self.kind {
            DeviceKind::StateFamily => (0..self.rows())
                .map(|k| (self.data[(k, 0)] - 1.0).abs())
                .fold(0.0, f64::max),
            DeviceKind::Povm => {
                let sums = self.data.row_sum();
                sums.iter()
                    .enumerate()
                    .map(|(j, &s)| (s - if j == 0 { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ell(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &RMat {
        &self.data
    }

    pub fn row(&self, k: usize) -> BlochVector {
        BlochVector::new(self.data.row(k).iter().copied().collect())
    }

    /// The operator of row `k` (density matrix or effect).
    pub fn matrix(&self, k: usize) -> CMat {
        let row = self.row(k);
        match self.kind {
            DeviceKind::StateFamily => row.state_matrix(),
            DeviceKind::Povm => row.effect_matrix(),
        }
        .expect("validated dimension")
    }

    pub fn matrices(&self) -> Vec<CMat> {
        (0..self.rows()).map(|k| self.matrix(k)).collect()
    }

    /// The `n × (ℓ-1)` block of traceless coordinates.
    pub fn traceless_block(&self) -> RMat {
        self.data.columns(1, self.ell() - 1).into_owned()
    }

    pub fn identity_components(&self) -> Vec<f64> {
        self.data.column(0).iter().copied().collect()
    }

    /// Same kind and dimension with new coordinates, validated.
    pub fn with_data(&self, data: RMat) -> Result<Self> {
        Self::from_rows(self.kind, data)
    }

    /// Rows `idx` only.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<_> = idx.iter().map(|&k| self.data.row(k).into_owned()).collect();
        Self {
            kind: self.kind,
            dim: self.dim,
            data: RMat::from_rows(&rows),
        }
    }
}

fn common_dim(mut dims: impl Iterator<Item = usize>) -> Result<usize> {
    let first = dims
        .next()
        .ok_or_else(|| Error::InvalidParameter("device has no elements".into()))?;
    for d in dims {
        if d != first {
            return Err(Error::DimensionMismatch(format!(
                "device mixes dimensions {first} and {d}"
            )));
        }
    }
    basis::check_dim(first)?;
    Ok(first)
}

fn stack(rows: &[BlochVector], dim: usize) -> RMat {
    let ell = dim * dim;
    RMat::from_fn(rows.len(), ell, |i, j| rows[i].coords[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn families_satisfy_completeness_identities() {
        let s = DeviceMatrix::state_family(&[
            DensityMatrix::maximally_mixed(2).unwrap(),
            DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap(),
        ])
        .unwrap();
        assert!(s.completeness_residual() < 1e-12);
        let half = CMat::identity(2, 2) * c(0.5, 0.0);
        let m = DeviceMatrix::from_matrices(DeviceKind::Povm, &[half.clone(), half]).unwrap();
        assert!(m.completeness_residual() < 1e-12);
        assert_eq!(m.identity_components(), vec![0.5, 0.5]);
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let a = CMat::identity(2, 2) * c(0.5, 0.0);
        let b = CMat::identity(2, 2) * c(0.4, 0.0);
        assert!(matches!(
            DeviceMatrix::from_matrices(DeviceKind::Povm, &[a, b]),
            Err(Error::Incomplete { .. })
        ));
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            DeviceMatrix::state_family(&[a, b]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
