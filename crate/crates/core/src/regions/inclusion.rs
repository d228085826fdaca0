use super::body::{ConvexBody, SPAN_CUT};
use super::descriptor::{RegionDescriptor, RegionKind};
use super::sweep::sphere_directions;
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::{Certificate, Verdict};
use nalgebra::DVector;

/// Parameters of the support-function sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InclusionOptions {
    pub tol: f64,
    pub seed: u64,
    /// Directions swept before refinement (at least `10⁴` are used).
    pub directions: usize,
    /// Number of worst directions refined by local ascent.
    pub refine: usize,
    pub refine_iterations: usize,
}

impl Default for InclusionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            seed: 0,
            directions: 10_000,
            refine: 100,
            refine_iterations: 60,
        }
    }
}

impl InclusionOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Decides `R0 ⊆ R1` for two closed-form regions of the same kind.
pub fn region_included(r0: &RegionDescriptor, r1: &RegionDescriptor, tol: f64) -> Result<Certificate> {
    if r0.kind != r1.kind {
        return Err(Error::KindMismatch(format!(
            "cannot compare {:?} with {:?}",
            r0.kind, r1.kind
        )));
    }
    body_included(r0, r1, &InclusionOptions::with_tol(tol))
}

/// Decides `inner ⊆ outer` by support-function domination.
///
/// Steps: affine-hull containment; the same-center ellipsoid shortcut when
/// both bodies are closed-form; otherwise a sweep over unit directions of
/// the joint affine span followed by local ascent from the worst ones.
pub fn body_included<A, B>(inner: &A, outer: &B, opts: &InclusionOptions) -> Result<Certificate>
where
    A: ConvexBody + ?Sized,
    B: ConvexBody + ?Sized,
{
    let n = inner.ambient();
    if outer.ambient() != n {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {n} and {} differ",
            outer.ambient()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("inclusion tolerance must be positive".into()));
    }
    let margin = |w: &[f64]| inner.support(w) - outer.support(w);
    let certificate = |verdict, margin: f64, witness, directions, method: &str| Certificate {
        verdict,
        margin,
        witness,
        tol: opts.tol,
        seed: opts.seed,
        directions,
        method: method.to_string(),
    };

    let h0 = inner.affine_hull();
    let h1 = outer.affine_hull();
    let offset: Vec<f64> = h0.point.iter().zip(&h1.point).map(|(a, b)| a - b).collect();

    // affine-hull containment
    let mut probes: Vec<DVector<f64>> = h0
        .directions
        .column_iter()
        .map(|c| c.into_owned())
        .collect();
    probes.push(DVector::from_vec(offset.clone()));
    let mut hull_worst = (f64::NEG_INFINITY, None);
    let mut tested = 0;
    for x in &probes {
        let r = x - &h1.directions * (h1.directions.transpose() * x);
        let len = r.norm();
        if len <= 1e-12 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let w: Vec<f64> = r.iter().map(|v| sign * v / len).collect();
            let m = margin(&w);
            tested += 1;
            if m > hull_worst.0 {
                hull_worst = (m, Some(w));
            }
        }
    }
    if hull_worst.0 > opts.tol {
        return Ok(certificate(
            Verdict::Infeasible,
            hull_worst.0,
            hull_worst.1,
            tested,
            "affine-hull",
        ));
    }

    if let (Some(d0), Some(d1)) = (inner.descriptor(), outer.descriptor()) {
        if let Some(c) = same_center(d0, d1, opts.tol) {
            return Ok(certificate(c.0, c.1, c.2, 0, "same-center"));
        }
    }

    // sweep over the joint span
    let mut joint = RMat::zeros(n, h0.directions.ncols() + h1.directions.ncols() + 1);
    joint
        .columns_mut(0, h0.directions.ncols())
        .copy_from(&h0.directions);
    joint
        .columns_mut(h0.directions.ncols(), h1.directions.ncols())
        .copy_from(&h1.directions);
    joint
        .column_mut(joint.ncols() - 1)
        .copy_from_slice(&offset);
    let basis = linalg::range_basis(&joint, SPAN_CUT);
    let k = basis.ncols();
    if k == 0 {
        let w = vec![0.0; n];
        return Ok(certificate(
            Verdict::Feasible,
            margin(&w),
            None,
            0,
            "point",
        ));
    }
    let lift = |v: &[f64]| -> Vec<f64> {
        let w = &basis * DVector::from_column_slice(v);
        w.iter().copied().collect()
    };
    let f = |v: &[f64]| margin(&lift(v));

    let dirs = sphere_directions(k, opts.directions.max(10_000), opts.seed);
    let mut scored: Vec<(f64, usize)> = dirs.iter().enumerate().map(|(i, v)| (f(v), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = (scored[0].0, dirs[scored[0].1].clone());
    if k >= 2 {
        for &(value, i) in scored.iter().take(opts.refine) {
            let (v, x) = refine(&f, &dirs[i], value, opts.refine_iterations);
            if v > best.0 {
                best = (v, x);
            }
        }
    }
    let verdict = if best.0 <= opts.tol {
        Verdict::Feasible
    } else {
        Verdict::Infeasible
    };
    Ok(certificate(
        verdict,
        best.0,
        Some(lift(&best.1)),
        dirs.len(),
        "sweep",
    ))
}

/// Same-center ellipsoids: `Q0 ⪯ Q1` is sufficient (and for ranges also
/// necessary, with the top eigenvector of `Q0 - Q1` as a witness).
fn same_center(
    d0: &RegionDescriptor,
    d1: &RegionDescriptor,
    tol: f64,
) -> Option<(Verdict, f64, Option<Vec<f64>>)> {
    if d0.kind != d1.kind
        || d0.center.iter().zip(&d1.center).any(|(a, b)| (a - b).abs() > 1e-15)
    {
        return None;
    }
    let diff = &d0.shape - &d1.shape;
    let (vals, vecs) = linalg::eigh_real(&diff);
    let top = vals[vals.len() - 1];
    if top <= tol * tol {
        // √(wᵀQ0w) - √(wᵀQ1w) ≤ √(wᵀ(Q0-Q1)w) ≤ tol
        return Some((Verdict::Feasible, top.max(0.0).sqrt(), None));
    }
    if d0.kind == RegionKind::MeasurementRange {
        let w: Vec<f64> = vecs.column(vals.len() - 1).iter().copied().collect();
        let m = d0.support(&w) - d1.support(&w);
        if m > tol {
            return Some((Verdict::Infeasible, m, Some(w)));
        }
    }
    None
}

/// Projected gradient ascent of `f` on the unit sphere from `start`.
fn refine<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], value: f64, iterations: usize) -> (f64, Vec<f64>) {
    let k = start.len();
    let mut x = start.to_vec();
    let mut fx = value;
    let mut step = 0.1;
    let h = 1e-7;
    for _ in 0..iterations {
        let mut grad = vec![0.0; k];
        let mut probe = x.clone();
        for i in 0..k {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        let radial = linalg::dot(&grad, &x);
        for i in 0..k {
            grad[i] -= radial * x[i];
        }
        let g = linalg::norm(&grad);
        if g < 1e-14 {
            break;
        }
        loop {
            let mut y: Vec<f64> = (0..k).map(|i| x[i] + step * grad[i] / g).collect();
            let ny = linalg::norm(&y);
            y.iter_mut().for_each(|v| *v /= ny);
            let fy = f(&y);
            if fy > fx {
                x = y;
                fx = fy;
                step = (step * 1.5).min(0.5);
                break;
            }
            step *= 0.5;
            if step < 1e-10 {
                return (fx, x);
            }
        }
    }
    (fx, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::regions::{measurement_range, testing_region};
    use crate::repr::{DensityMatrix, DeviceKind, DeviceMatrix};

    fn trine(eps: f64) -> DeviceMatrix {
        let rows: Vec<f64> = (0..3)
            .flat_map(|a| {
                let t = 2.0 * std::f64::consts::PI * a as f64 / 3.0;
                [1.0 / 3.0, eps * t.cos() / 3.0, 0.0, eps * t.sin() / 3.0]
            })
            .collect();
        DeviceMatrix::from_rows(DeviceKind::Povm, RMat::from_row_slice(3, 4, &rows)).unwrap()
    }

    #[test]
    fn reflexive() {
        let r = measurement_range(&trine(1.0)).unwrap();
        assert!(region_included(&r, &r, 1e-7).unwrap().is_feasible());
        let s = DeviceMatrix::state_family(&[
            DensityMatrix::pure(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ])
        .unwrap();
        let t = testing_region(&s).unwrap();
        assert!(region_included(&t, &t, 1e-7).unwrap().is_feasible());
    }

    #[test]
    fn depolarized_trine_is_inside() {
        let big = measurement_range(&trine(1.0)).unwrap();
        let small = measurement_range(&trine(0.9)).unwrap();
        assert!(region_included(&small, &big, 1e-7).unwrap().is_feasible());
        let back = region_included(&big, &small, 1e-7).unwrap();
        assert_eq!(back.verdict, Verdict::Infeasible);
        // radius of the trine range is 1/√6
        let expected = 0.1 / 6f64.sqrt();
        assert!((back.margin - expected).abs() < 1e-9, "{}", back.margin);
    }

    #[test]
    fn hull_violation_is_detected() {
        let a = DeviceMatrix::state_family(&[
            DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
        ])
        .unwrap();
        let b = DeviceMatrix::state_family(&[
            DensityMatrix::maximally_mixed(2).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ])
        .unwrap();
        let cert = region_included(&testing_region(&a).unwrap(), &testing_region(&b).unwrap(), 1e-7).unwrap();
        assert_eq!(cert.verdict, Verdict::Infeasible);
        assert_eq!(cert.method, "affine-hull");
        assert!((cert.margin - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let s = DeviceMatrix::state_family(&[
            DensityMatrix::maximally_mixed(2).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ])
        .unwrap();
        let half = crate::linalg::CMat::identity(2, 2) * c(0.5, 0.0);
        let m = DeviceMatrix::from_matrices(DeviceKind::Povm, &[half.clone(), half]).unwrap();
        assert!(matches!(
            region_included(&testing_region(&s).unwrap(), &measurement_range(&m).unwrap(), 1e-7),
            Err(Error::KindMismatch(_))
        ));
    }
}
