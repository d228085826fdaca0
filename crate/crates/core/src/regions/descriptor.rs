use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::repr::{DeviceKind, DeviceMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// `conv({0, u} ∪ E)` for an ellipsoid `E` centered at `u/2`.
    StateTesting,
    /// A free ellipsoid.
    MeasurementRange,
}

/// A testing region or range as an explicit convex body.
///
/// The ellipsoid is `{center + v : vᵀ shape⁺ v ≤ 1, v ∈ range(shape)}`, so its
/// support function is `w·center + sqrt(wᵀ shape w)`. State testing regions
/// are the convex hull of that ellipsoid with the apexes `0` and `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionDescriptor {
    pub kind: RegionKind,
    pub center: Vec<f64>,
    pub shape: RMat,
    pub apexes: Vec<Vec<f64>>,
}

fn require_qubit(device: &DeviceMatrix, kind: DeviceKind) -> Result<()> {
    if device.kind() != kind {
        return Err(Error::KindMismatch(format!(
            "expected {kind:?}, got {:?}",
            device.kind()
        )));
    }
    if device.dim() != 2 {
        return Err(Error::UnsupportedDimension(device.dim()));
    }
    Ok(())
}

/// Testing region of a qubit state family.
///
/// With `q_x = Tr[ρ_x π]` and `π = e_0 I + e·σ`, `q = e_0 u + R e` where `R`
/// holds the Bloch vectors as rows and `|e| ≤ min(e_0, 1 - e_0)`. The extreme
/// values `e_0 ∈ {0, 1/2, 1}` give the apexes and the ellipsoid
/// `u/2 + R·(ball of radius 1/2)`, i.e. shape `R Rᵀ / 4`.
pub fn testing_region(states: &DeviceMatrix) -> Result<RegionDescriptor> {
    require_qubit(states, DeviceKind::StateFamily)?;
    let n = states.rows();
    let r = states.traceless_block();
    Ok(RegionDescriptor {
        kind: RegionKind::StateTesting,
        center: vec![0.5; n],
        shape: &r * r.transpose() * 0.25,
        apexes: vec![vec![0.0; n], vec![1.0; n]],
    })
}

/// Range of a qubit measurement: `p_a = c_a + b_a·r` over the Bloch ball,
/// an ellipsoid with center `c` (identity components) and shape `B Bᵀ`.
pub fn measurement_range(povm: &DeviceMatrix) -> Result<RegionDescriptor> {
    require_qubit(povm, DeviceKind::Povm)?;
    let b = povm.traceless_block();
    Ok(RegionDescriptor {
        kind: RegionKind::MeasurementRange,
        center: povm.identity_components(),
        shape: &b * b.transpose(),
        apexes: vec![],
    })
}

/// Region of a qubit device of either kind.
pub fn region_of(device: &DeviceMatrix) -> Result<RegionDescriptor> {
    match device.kind() {
        DeviceKind::StateFamily => testing_region(device),
        DeviceKind::Povm => measurement_range(device),
    }
}

impl RegionDescriptor {
    pub fn ambient(&self) -> usize {
        self.center.len()
    }

    /// Ellipsoid term `w·center + sqrt(wᵀ shape w)`.
    pub fn ellipsoid_support(&self, w: &[f64]) -> f64 {
        let n = self.ambient();
        let mut quad = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.shape[(i, j)] * w[j];
            }
            quad += w[i] * row;
        }
        linalg::dot(w, &self.center) + quad.max(0.0).sqrt()
    }

    pub fn support(&self, w: &[f64]) -> f64 {
        let e = self.ellipsoid_support(w);
        match self.kind {
            RegionKind::MeasurementRange => e,
            RegionKind::StateTesting => self
                .apexes
                .iter()
                .map(|a| linalg::dot(w, a))
                .fold(e, f64::max),
        }
    }

    /// Point of the body attaining `support(w)`.
    pub fn support_point(&self, w: &[f64]) -> Vec<f64> {
        let qw = &self.shape * nalgebra::DVector::from_column_slice(w);
        let s = linalg::dot(w, qw.as_slice()).max(0.0).sqrt();
        let ell: Vec<f64> = if s > 1e-300 {
            self.center
                .iter()
                .zip(qw.iter())
                .map(|(c, q)| c + q / s)
                .collect()
        } else {
            self.center.clone()
        };
        let mut best = (self.ellipsoid_support(w), ell);
        for a in &self.apexes {
            let v = linalg::dot(w, a);
            if v > best.0 {
                best = (v, a.clone());
            }
        }
        best.1
    }

    /// Upper bound on the distance from `p` to the body; non-positive inside.
    ///
    /// Uses the ellipsoid gauge, scaled by the largest semi-axis so the
    /// value has units of length.
    pub fn membership_excess(&self, p: &[f64]) -> f64 {
        Gauge::new(self).excess(self, p)
    }

    /// Largest [`membership_excess`](Self::membership_excess) over `points`.
    pub fn max_membership_excess(&self, points: &[Vec<f64>]) -> f64 {
        let gauge = Gauge::new(self);
        points
            .iter()
            .map(|p| gauge.excess(self, p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks the body lies in `[0,1]^n` through the support function in
    /// the coordinate directions, which is exact for a box.
    pub fn check_in_unit_cube(&self, tol: f64) -> Result<()> {
        let n = self.ambient();
        for i in 0..n {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            let hi = self.support(&w);
            w[i] = -1.0;
            let lo = -self.support(&w);
            if hi > 1.0 + tol || lo < -tol {
                return Err(Error::Unrealizable(format!(
                    "coordinate {i} ranges over [{lo:.6}, {hi:.6}], outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Validates the descriptor's structural invariants.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.ambient();
        if self.shape.nrows() != n || self.shape.ncols() != n {
            return Err(Error::DimensionMismatch("shape does not match center".into()));
        }
        let (vals, _) = linalg::eigh_real(&self.shape);
        if vals[0] < -tol {
            return Err(Error::NotPositive {
                what: "region shape",
                min_eigenvalue: vals[0],
            });
        }
        if self.kind == RegionKind::StateTesting
            && self.center.iter().any(|&x| (x - 0.5).abs() > 1e-15)
        {
            return Err(Error::InvalidParameter(
                "state testing region must be centered at u/2".into(),
            ));
        }
        self.check_in_unit_cube(tol)
    }

    /// Area of a planar body: a two-dimensional state testing region, or a
    /// range measured inside its own affine hull (rank ≤ 2).
    ///
    /// For state testing regions the hull with the apexes is computed in
    /// closed form: mapping the ellipse to the unit disc, the apexes land at
    /// distance `ρ` from the center and each adds `sqrt(ρ²-1) - acos(1/ρ)`.
    pub fn planar_area(&self) -> Result<f64> {
        match self.kind {
            RegionKind::StateTesting => {
                if self.ambient() != 2 {
                    return Err(Error::DimensionMismatch(
                        "planar area needs a dichotomy region".into(),
                    ));
                }
                let q = &self.shape;
                let det = (q[(0, 0)] * q[(1, 1)] - q[(0, 1)] * q[(1, 0)]).max(0.0);
                // cᵀ adj(Q) c with c = u/2
                let k = 0.25 * (q[(1, 1)] + q[(0, 0)] - q[(0, 1)] - q[(1, 0)]);
                Ok(hull_area(det, k))
            }
            RegionKind::MeasurementRange => {
                let (vals, _) = linalg::eigh_real(&self.shape);
                let n = vals.len();
                let tol = 1e-12 * vals[n - 1].abs().max(1e-300);
                let positive: Vec<f64> = vals.iter().copied().filter(|&v| v > tol).collect();
                match positive.len() {
                    0 | 1 => Ok(0.0),
                    2 => Ok(PI * (positive[0] * positive[1]).sqrt()),
                    _ => Err(Error::DimensionMismatch("range is not planar".into())),
                }
            }
        }
    }

    /// Boundary samples along `count` directions (2-D: equally spaced
    /// angles; otherwise a deterministic spherical spiral).
    pub fn boundary_points(&self, count: usize) -> Vec<Vec<f64>> {
        super::sweep::sphere_directions(self.ambient(), count, 0)
            .iter()
            .map(|w| self.support_point(w))
            .collect()
    }
}

/// Factorization of the shape shared by membership queries.
struct Gauge {
    qplus: RMat,
    range: RMat,
    axis: f64,
}

impl Gauge {
    fn new(r: &RegionDescriptor) -> Self {
        let n = r.ambient();
        let (vals, _) = linalg::eigh_real(&r.shape);
        Self {
            qplus: linalg::pinv(&r.shape, 1e-12),
            range: linalg::column_space(&r.shape, 1e-12),
            axis: vals[n - 1].max(0.0).sqrt(),
        }
    }

    /// Excess of `v` over the ellipsoid of gauge radius `radius`.
    fn ellipsoid(&self, v: &nalgebra::DVector<f64>, radius: f64, scale: f64) -> f64 {
        let proj = &self.range * (self.range.transpose() * v);
        let off = (v - &proj).norm();
        let g = v.dot(&(&self.qplus * v)).max(0.0).sqrt() * scale;
        off.max((g - radius) * self.axis / scale.max(1e-300))
    }

    fn excess(&self, r: &RegionDescriptor, p: &[f64]) -> f64 {
        match r.kind {
            RegionKind::MeasurementRange => {
                let v = nalgebra::DVector::from_iterator(p.len(), p.iter().zip(&r.center).map(|(a, b)| a - b));
                self.ellipsoid(&v, 1.0, 1.0)
            }
            RegionKind::StateTesting => {
                // q = e0 u + R e, |e| ≤ min(e0, 1-e0); R Rᵀ = 4 shape
                let f = |e0: f64| {
                    let v = nalgebra::DVector::from_iterator(p.len(), p.iter().map(|x| x - e0));
                    self.ellipsoid(&v, e0.min(1.0 - e0), 0.5)
                };
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..100 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if f(m1) <= f(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                f(0.5 * (lo + hi))
            }
        }
    }
}

/// Area of `conv(0, u, E)` from `det Q` and `cᵀ adj(Q) c`.
pub(crate) fn hull_area(det: f64, k: f64) -> f64 {
    if det <= 0.0 {
        return 2.0 * k.max(0.0).sqrt();
    }
    if k <= det {
        return PI * det.sqrt();
    }
    let excess = k - det;
    PI * det.sqrt() + 2.0 * excess.sqrt() - 2.0 * det.sqrt() * (excess / det).sqrt().atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::repr::{DensityMatrix, DeviceMatrix};

    fn zero_and_mixed() -> DeviceMatrix {
        DeviceMatrix::state_family(&[
            DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn region_of_zero_and_mixed() {
        let r = testing_region(&zero_and_mixed()).unwrap();
        assert_eq!(r.center, vec![0.5, 0.5]);
        // semi-axes 1/2 along the first coordinate, 0 along the second
        assert!((r.shape[(0, 0)] - 0.25).abs() < 1e-15);
        assert!(r.shape[(1, 1)].abs() < 1e-15 && r.shape[(0, 1)].abs() < 1e-15);
        assert!(r.membership_excess(&[1.0, 0.5]).abs() < 1e-9);
        assert!(r.membership_excess(&[1.0, 0.6]) <= 1e-9);
        assert!(r.membership_excess(&[0.5, 0.9]) > 1e-3);
        r.validate(1e-9).unwrap();
    }

    #[test]
    fn repeated_state_gives_a_diagonal_segment() {
        let rho = DensityMatrix::pure(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let r = testing_region(&DeviceMatrix::state_family(&[rho.clone(), rho]).unwrap()).unwrap();
        let (vals, vecs) = linalg::eigh_real(&r.shape);
        assert!(vals[0].abs() < 1e-15);
        assert!((vecs[(0, 1)].abs() - vecs[(1, 1)].abs()).abs() < 1e-12);
        assert!(r.planar_area().unwrap().abs() < 1e-15);
    }

    #[test]
    fn support_function_at_u_and_minus_u() {
        let r = testing_region(&zero_and_mixed()).unwrap();
        assert!((r.support(&[1.0, 1.0]) - 2.0).abs() < 1e-15);
        assert!(r.support(&[-1.0, -1.0]).abs() < 1e-15);
    }

    #[test]
    fn trivial_povm_range_is_a_point() {
        let half = crate::linalg::CMat::identity(2, 2) * c(0.5, 0.0);
        let m = DeviceMatrix::from_matrices(DeviceKind::Povm, &[half.clone(), half]).unwrap();
        let r = measurement_range(&m).unwrap();
        assert_eq!(r.center, vec![0.5, 0.5]);
        assert!(r.shape.norm() < 1e-15);
    }

    #[test]
    fn kind_and_dimension_are_checked() {
        let q = DeviceMatrix::state_family(&[DensityMatrix::maximally_mixed(3).unwrap()]).unwrap();
        assert!(matches!(testing_region(&q), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(
            measurement_range(&zero_and_mixed()),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn hull_area_limits() {
        // degenerate segment of half-length a along the first axis: area a
        assert!((hull_area(0.0, 0.25 * 0.09) - 0.3).abs() < 1e-15);
        // tiny non-degenerate ellipse approaches the segment value
        let a = 0.3f64;
        let b = 1e-9f64;
        let det = a * a * b * b;
        let k = 0.25 * (b * b + a * a);
        assert!((hull_area(det, k) - a).abs() < 1e-8);
    }
}
