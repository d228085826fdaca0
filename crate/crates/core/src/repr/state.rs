use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::repr::basis;
use crate::Tolerances;
use num_complex::Complex64;

/// A qubit or qutrit density matrix, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMat,
}

/// A measurement element `0 ≤ π ≤ I`, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    entries: CMat,
}

/// Coordinates in the generalized Pauli basis of [`basis`](super::basis).
///
/// The same type carries state coordinates and effect coordinates; which
/// scaling applies is decided by the conversion that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    pub coords: Vec<f64>,
}

fn check_hermitian(m: &CMat, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    basis::check_dim(m.nrows())?;
    let deviation = linalg::hermiticity_defect(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        Self::with_tolerances(entries, &Tolerances::default())
    }

    pub fn with_tolerances(entries: CMat, tol: &Tolerances) -> Result<Self> {
        check_hermitian(&entries, tol.hermitian)?;
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = linalg::min_eigenvalue(&entries);
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive {
                what: "state",
                min_eigenvalue,
            });
        }
        Ok(Self {
            entries: linalg::hermitian_part(&entries),
        })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = v / c(n, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        basis::check_dim(dim)?;
        Ok(Self {
            entries: CMat::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.entries).0.iter().copied().collect()
    }

    pub fn to_bloch(&self) -> BlochVector {
        BlochVector {
            coords: basis::raw_coords(&self.entries)
                .into_iter()
                .map(|z| z.re)
                .collect(),
        }
    }
}

impl Effect {
    pub fn new(entries: CMat) -> Result<Self> {
        Self::with_tolerances(entries, &Tolerances::default())
    }

    pub fn with_tolerances(entries: CMat, tol: &Tolerances) -> Result<Self> {
        check_hermitian(&entries, tol.hermitian)?;
        let (vals, _) = linalg::eigh(&entries);
        if vals[0] < -tol.psd {
            return Err(Error::NotPositive {
                what: "effect",
                min_eigenvalue: vals[0],
            });
        }
        let max_eigenvalue = vals[vals.len() - 1];
        if max_eigenvalue > 1.0 + tol.psd {
            return Err(Error::ExceedsIdentity { max_eigenvalue });
        }
        Ok(Self {
            entries: linalg::hermitian_part(&entries),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        basis::check_dim(dim)?;
        Ok(Self {
            entries: CMat::identity(dim, dim),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        basis::check_dim(dim)?;
        Ok(Self {
            entries: CMat::zeros(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn to_bloch(&self) -> BlochVector {
        let d = self.dim() as f64;
        BlochVector {
            coords: basis::raw_coords(&self.entries)
                .into_iter()
                .map(|z| z.re / d)
                .collect(),
        }
    }
}

impl BlochVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn ell(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        linalg::dot(&self.coords, &other.coords)
    }

    /// Traceless part (coordinates `1..`).
    pub fn traceless(&self) -> &[f64] {
        &self.coords[1..]
    }

    fn combine(&self, scale: f64) -> Result<CMat> {
        let dim = basis::dim_from_ell(self.ell())?;
        let coef: Vec<Complex64> = self.coords.iter().map(|&x| c(x * scale, 0.0)).collect();
        Ok(basis::combine(dim, &coef))
    }

    /// Matrix with these state coordinates, without validity checks.
    pub fn state_matrix(&self) -> Result<CMat> {
        let dim = basis::dim_from_ell(self.ell())?;
        self.combine(1.0 / dim as f64)
    }

    /// Matrix with these effect coordinates, without validity checks.
    pub fn effect_matrix(&self) -> Result<CMat> {
        self.combine(1.0)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.state_matrix()?)
    }

    pub fn to_effect(&self) -> Result<Effect> {
        Effect::new(self.effect_matrix()?)
    }
}

/// Coordinates of an arbitrary Hermitian matrix, read as a state or effect.
pub fn hermitian_to_bloch(m: &CMat, as_effect: bool) -> Result<BlochVector> {
    check_hermitian(m, Tolerances::default().hermitian)?;
    let d = if as_effect { m.nrows() as f64 } else { 1.0 };
    Ok(BlochVector {
        coords: basis::raw_coords(m).into_iter().map(|z| z.re / d).collect(),
    })
}
