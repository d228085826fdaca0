//! Semi-device-independent certification from observed statistics.
//!
//! State side: a black-box dichotomy probed by two-outcome tests gives
//! points `q_y ∈ [0,1]²`; any ellipse centered at `u/2` whose hull with the
//! apexes fits in `conv(0, u, q_y, u - q_y)` is certified. Measurement side:
//! a three-outcome black box probed by states gives distributions `p_x`;
//! any ellipse inside their hull is certified.

mod meas;
pub mod planar;
mod reconstruct;
mod states;

pub use meas::{max_volume_ellipse, simplex_frame};
pub use reconstruct::{depolarization_factor, reconstruct_device};
pub use states::{certify_states, max_area_centered_ellipse};

use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::repr::{DensityMatrix, DeviceMatrix};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    /// Vectors `q_y` with `[q_y]_x = Tr[ρ_x π_y]`, in the unit hypercube.
    StateProbe,
    /// Distributions `p_x` with `[p_x]_a = Tr[ρ_x π_a]`, on the simplex.
    MeasProbe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSet {
    pub kind: ProbeKind,
    pub points: Vec<Vec<f64>>,
    /// Raw tallies the points were estimated from, kept for reporting.
    pub counts: Option<Vec<Vec<u64>>>,
}

impl ObservationSet {
    pub fn state_probe(points: Vec<Vec<f64>>) -> Result<Self> {
        let out = Self {
            kind: ProbeKind::StateProbe,
            points,
            counts: None,
        };
        out.validate()?;
        Ok(out)
    }

    /// Distributions are normalized by their sum before validation.
    pub fn meas_probe(points: Vec<Vec<f64>>) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|p| {
                let s: f64 = p.iter().sum();
                if !(s > 0.0) {
                    return Err(Error::InvalidParameter("distribution with zero total".into()));
                }
                Ok(p.iter().map(|x| x / s).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let out = Self {
            kind: ProbeKind::MeasProbe,
            points,
            counts: None,
        };
        out.validate()?;
        Ok(out)
    }

    /// Point estimates from counts. State probes count the clicks of the
    /// `0` outcome out of `trials[y]`; measurement probes count every
    /// outcome and are normalized per row.
    pub fn from_counts(kind: ProbeKind, counts: Vec<Vec<u64>>, trials: Option<Vec<u64>>) -> Result<Self> {
        let points: Vec<Vec<f64>> = match kind {
            ProbeKind::StateProbe => {
                let trials = trials.ok_or_else(|| {
                    Error::InvalidParameter("state probe counts need the number of trials".into())
                })?;
                if trials.len() != counts.len() {
                    return Err(Error::DimensionMismatch("one trial count per observation".into()));
                }
                counts
                    .iter()
                    .zip(&trials)
                    .map(|(row, &t)| {
                        if t == 0 {
                            return Err(Error::InvalidParameter("zero trials".into()));
                        }
                        Ok(row.iter().map(|&c| c as f64 / t as f64).collect())
                    })
                    .collect::<Result<_>>()?
            }
            ProbeKind::MeasProbe => counts
                .iter()
                .map(|row| row.iter().map(|&c| c as f64).collect())
                .collect(),
        };
        let mut out = match kind {
            ProbeKind::StateProbe => Self::state_probe(points)?,
            ProbeKind::MeasProbe => Self::meas_probe(points)?,
        };
        out.counts = Some(counts);
        Ok(out)
    }

    pub fn ambient(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidParameter("no observations".into()));
        }
        let m = self.ambient();
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "observation {i} has {} entries, expected {m}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite() || *x < -1e-9 || *x > 1.0 + 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "observation {i} leaves the unit hypercube"
                )));
            }
            if self.kind == ProbeKind::MeasProbe && (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "observation {i} is not on the probability simplex"
                )));
            }
        }
        Ok(())
    }

    fn require(&self, kind: ProbeKind, m: usize) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch(format!("expected {kind:?} observations")));
        }
        if self.ambient() != m {
            return Err(Error::UnsupportedDimension(self.ambient()));
        }
        Ok(())
    }
}

/// An ellipse `{center + v : vᵀ shape⁺ v ≤ 1, v ∈ range(shape)}` in the
/// ambient coordinates of the observations.
#[derive(Clone, Debug, PartialEq)]
pub struct InscribedEllipse {
    pub center: Vec<f64>,
    pub shape: RMat,
    /// Natural log of the ellipse area; `-∞` when degenerate.
    pub log_volume: f64,
    /// The optimized quantity: hull area with the apexes (states) or
    /// ellipse area (measurements).
    pub objective: f64,
    /// Rank-deficient shape.
    pub degenerate: bool,
}

/// Scales every traceless coordinate by `eps`.
pub fn depolarize(device: &DeviceMatrix, eps: f64) -> Result<DeviceMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "depolarization parameter {eps} outside [0, 1]"
        )));
    }
    let mut data = device.data().clone();
    for j in 1..data.ncols() {
        data.column_mut(j).scale_mut(eps);
    }
    device.with_data(data)
}

/// Relative entropy `S(ρ‖I/2) = ln 2 - S(ρ)` of a qubit state, in nats or bits.
pub fn free_energy(rho: &DensityMatrix, bits: bool) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    let entropy: f64 = rho
        .eigenvalues()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    let nats = (std::f64::consts::LN_2 - entropy).max(0.0);
    Ok(if bits {
        nats / std::f64::consts::LN_2
    } else {
        nats
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn free_energy_endpoints() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(free_energy(&mixed, false).unwrap().abs() < 1e-15);
        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!((free_energy(&pure, false).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((free_energy(&pure, true).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn meas_probe_is_normalized() {
        let o = ObservationSet::meas_probe(vec![vec![2.0, 2.0, 2.0], vec![0.0, 3.0, 3.0]]).unwrap();
        assert!((o.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((o.points[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn state_probe_outside_cube_is_rejected() {
        assert!(ObservationSet::state_probe(vec![vec![0.5, 1.2]]).is_err());
    }

    #[test]
    fn counts_give_frequencies() {
        let o = ObservationSet::from_counts(ProbeKind::StateProbe, vec![vec![25, 50]], Some(vec![100])).unwrap();
        assert_eq!(o.points, vec![vec![0.25, 0.5]]);
        assert!(o.counts.is_some());
    }

    #[test]
    fn depolarize_bounds() {
        let d = DeviceMatrix::state_family(&[DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap()]).unwrap();
        assert_eq!(depolarize(&d, 1.0).unwrap(), d);
        assert!(depolarize(&d, 1.5).is_err());
        let z = depolarize(&d, 0.0).unwrap();
        assert!(z.traceless_block().amax() == 0.0);
    }
}
