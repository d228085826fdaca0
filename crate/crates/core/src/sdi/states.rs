use super::planar::{convex_hull, halfplanes, polygon_area, Halfplane};
use super::{InscribedEllipse, ObservationSet, ProbeKind};
use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::regions::{RegionDescriptor, RegionKind};
use crate::{Certificate, Verdict};
use std::f64::consts::PI;

/// `conv(0, u, q_y, u - q_y)` for dichotomy observations.
fn probe_points(obs: &ObservationSet) -> Vec<[f64; 2]> {
    let mut pts = vec![[0.0, 0.0], [1.0, 1.0]];
    for q in &obs.points {
        pts.push([q[0], q[1]]);
        pts.push([1.0 - q[0], 1.0 - q[1]]);
    }
    pts
}

/// Certifies a candidate dichotomy testing region against observations:
/// feasible iff the candidate lies in `conv(0, u, q_y, u - q_y)`, decided
/// exactly by comparing support functions on every facet normal.
pub fn certify_states(obs: &ObservationSet, candidate: &RegionDescriptor, tol: f64) -> Result<Certificate> {
    obs.require(ProbeKind::StateProbe, 2)?;
    if candidate.kind != RegionKind::StateTesting || candidate.ambient() != 2 {
        return Err(Error::KindMismatch("candidate must be a dichotomy testing region".into()));
    }
    if candidate.center.iter().any(|&x| (x - 0.5).abs() > 1e-12) {
        return Err(Error::InvalidParameter("candidate ellipse must be centered at u/2".into()));
    }
    let facets = halfplanes(&probe_points(obs));
    let mut worst: (f64, Option<Vec<f64>>) = (f64::NEG_INFINITY, None);
    for h in &facets {
        let m = candidate.support(&h.a) - h.b;
        if m > worst.0 {
            worst = (m, Some(h.a.to_vec()));
        }
    }
    Ok(Certificate {
        verdict: if worst.0 <= tol {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
        margin: worst.0,
        witness: worst.1,
        tol,
        seed: 0,
        directions: facets.len(),
        method: "facets".into(),
    })
}

struct Problem {
    facets: Vec<Halfplane>,
    /// `b_i - a_i·(u/2)`
    slack: Vec<f64>,
}

impl Problem {
    /// Largest semi-axis along `p = (-sin θ, cos θ)` with zero width along `e`.
    fn beta_max(&self, theta: f64) -> f64 {
        let p = [-theta.sin(), theta.cos()];
        self.facets
            .iter()
            .zip(&self.slack)
            .filter_map(|(h, &s)| {
                let ap = (h.a[0] * p[0] + h.a[1] * p[1]).abs();
                (ap > 1e-15).then(|| s / ap)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Semi-axes `(α, β)` along `e` and `p` at fraction `t` of `β_max`,
    /// with `α` as large as the facets allow.
    fn axes(&self, theta: f64, t: f64) -> (f64, f64) {
        let e = [theta.cos(), theta.sin()];
        let p = [-theta.sin(), theta.cos()];
        let beta = t * self.beta_max(theta);
        let alpha = self
            .facets
            .iter()
            .zip(&self.slack)
            .filter_map(|(h, &s)| {
                let ae = (h.a[0] * e[0] + h.a[1] * e[1]).abs();
                let ap = h.a[0] * p[0] + h.a[1] * p[1];
                let room = (s * s - beta * beta * ap * ap).max(0.0).sqrt();
                (ae > 1e-15).then(|| room / ae)
            })
            .fold(f64::INFINITY, f64::min);
        (alpha, beta)
    }

    fn shape(theta: f64, alpha: f64, beta: f64) -> RMat {
        let (c, s) = (theta.cos(), theta.sin());
        RMat::from_row_slice(
            2,
            2,
            &[
                alpha * alpha * c * c + beta * beta * s * s,
                (alpha * alpha - beta * beta) * c * s,
                (alpha * alpha - beta * beta) * c * s,
                alpha * alpha * s * s + beta * beta * c * c,
            ],
        )
    }

    fn area(&self, theta: f64, t: f64) -> f64 {
        let (alpha, beta) = self.axes(theta, t);
        Self::hull_area(theta, alpha, beta)
    }

    fn hull_area(theta: f64, alpha: f64, beta: f64) -> f64 {
        let q = Self::shape(theta, alpha, beta);
        let det = alpha * alpha * beta * beta;
        let k = 0.25 * (q[(1, 1)] + q[(0, 0)] - 2.0 * q[(0, 1)]);
        crate::regions::hull_area(det, k)
    }

    fn best_t(&self, theta: f64, lo: f64, hi: f64) -> (f64, f64) {
        golden_max(|t| self.area(theta, t), lo, hi)
    }
}

/// Maximizes `f` on `[lo, hi]` by golden-section search; endpoints are
/// also compared so boundary optima are returned exactly.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-13 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let (value, arg) = [(f(lo), lo), (f(hi), hi), (f(mid), mid)]
        .into_iter()
        .fold((f64::NEG_INFINITY, mid), |best, (v, x)| if v > best.0 { (v, x) } else { best });
    (arg, value)
}

/// Largest testing region `conv(0, u, E)`, `E` centered at `u/2`, inside
/// the observations' hull.
///
/// The objective is the area of the hull with the apexes (closed form).
/// `E` is parametrized by its orientation `θ`, its minor width `β` as a
/// fraction of the largest admissible one, and the largest admissible
/// `α` given those; a `720 × 41` grid is refined by nested golden-section
/// searches until the area changes by at most `1e-10` relatively.
pub fn max_area_centered_ellipse(obs: &ObservationSet) -> Result<InscribedEllipse> {
    obs.require(ProbeKind::StateProbe, 2)?;
    let pts = probe_points(obs);
    let center = vec![0.5, 0.5];
    if polygon_area(&convex_hull(&pts)) <= 1e-15 {
        return Ok(InscribedEllipse {
            center,
            shape: RMat::zeros(2, 2),
            log_volume: f64::NEG_INFINITY,
            objective: 0.0,
            degenerate: true,
        });
    }
    let facets = halfplanes(&pts);
    let slack = facets.iter().map(|h| h.b - 0.5 * (h.a[0] + h.a[1])).collect();
    let prob = Problem { facets, slack };

    let (nt, nf) = (720usize, 40usize);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..nt {
        let theta = PI * i as f64 / nt as f64;
        for j in 0..=nf {
            let t = j as f64 / nf as f64;
            let v = prob.area(theta, t);
            if v > best.0 {
                best = (v, theta, t);
            }
        }
    }
    let (dth, dt) = (PI / nt as f64, 1.0 / nf as f64);
    for _ in 0..20 {
        let previous = best.0;
        let (_, theta0, t0) = best;
        let (t, v) = prob.best_t(theta0, (t0 - dt).max(0.0), (t0 + dt).min(1.0));
        if v > best.0 {
            best = (v, theta0, t);
        }
        let (_, theta1, t1) = best;
        let inner = |theta: f64| prob.best_t(theta, (t1 - dt).max(0.0), (t1 + dt).min(1.0)).1;
        let (theta, _) = golden_max(inner, theta1 - dth, theta1 + dth);
        let (t, v) = prob.best_t(theta, (t1 - dt).max(0.0), (t1 + dt).min(1.0));
        if v > best.0 {
            best = (v, theta, t);
        }
        if best.0 - previous <= 1e-10 * best.0.abs() {
            break;
        }
    }
    let (mut area, theta, t) = best;
    let (alpha, mut beta) = prob.axes(theta, t);
    // numerically flat optima are returned as exact segments
    let degenerate = alpha.min(beta) <= 1e-6 * alpha.max(beta);
    if degenerate && beta < alpha {
        beta = 0.0;
        area = Problem::hull_area(theta, alpha, 0.0);
    }
    let shape = Problem::shape(theta, alpha, beta);
    Ok(InscribedEllipse {
        center,
        shape,
        log_volume: if degenerate {
            f64::NEG_INFINITY
        } else {
            (PI * alpha * beta).ln()
        },
        objective: area,
        degenerate,
    })
}
