use super::planar::{convex_hull, halfplanes, polygon_area, Halfplane};
use super::{InscribedEllipse, ObservationSet, ProbeKind};
use crate::error::{Error, Result};
use crate::linalg::RMat;
use nalgebra::{Matrix2, SMatrix, SVector, Vector2};
use std::f64::consts::PI;

type V5 = SVector<f64, 5>;
type M5 = SMatrix<f64, 5, 5>;

/// Origin `(1/3, 1/3, 1/3)` and an orthonormal `3 × 2` frame of the
/// probability simplex plane.
pub fn simplex_frame() -> (Vec<f64>, RMat) {
    let (a, b) = (0.5f64.sqrt(), (1.0f64 / 6.0).sqrt());
    (
        vec![1.0 / 3.0; 3],
        RMat::from_row_slice(3, 2, &[a, b, -a, b, 0.0, -2.0 * b]),
    )
}

fn project(p: &[f64], origin: &[f64], frame: &RMat) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|a| (p[a] - origin[a]) * frame[(a, k)]).sum();
    }
    out
}

/// `{B v + d : |v| ≤ 1}` with `B = [[x0, x1], [x1, x2]]`, `d = (x3, x4)`.
struct Barrier<'a> {
    facets: &'a [Halfplane],
}

impl Barrier<'_> {
    fn b_of(x: &V5) -> Matrix2<f64> {
        Matrix2::new(x[0], x[1], x[1], x[2])
    }

    fn det(x: &V5) -> f64 {
        x[0] * x[2] - x[1] * x[1]
    }

    /// Slacks `b_i - a_i·d - |B a_i|`, or `None` outside the domain.
    fn slacks(&self, x: &V5) -> Option<Vec<f64>> {
        if x[0] <= 0.0 || Self::det(x) <= 0.0 {
            return None;
        }
        let b = Self::b_of(x);
        let s: Vec<f64> = self
            .facets
            .iter()
            .map(|h| {
                let a = Vector2::new(h.a[0], h.a[1]);
                h.b - a.dot(&Vector2::new(x[3], x[4])) - (b * a).norm()
            })
            .collect();
        s.iter().all(|&v| v > 0.0).then_some(s)
    }

    /// `-t log det B - Σ log s_i`.
    fn value(&self, x: &V5, t: f64) -> Option<f64> {
        let s = self.slacks(x)?;
        Some(-t * Self::det(x).ln() - s.iter().map(|v| v.ln()).sum::<f64>())
    }

    fn derivatives(&self, x: &V5, t: f64) -> (V5, M5) {
        let det = Self::det(x);
        let gd = V5::from([x[2], -2.0 * x[1], x[0], 0.0, 0.0]);
        let mut hd = M5::zeros();
        hd[(0, 2)] = 1.0;
        hd[(2, 0)] = 1.0;
        hd[(1, 1)] = -2.0;
        let mut grad = -gd * (t / det);
        let mut hess = (gd * gd.transpose() / (det * det) - hd / det) * t;
        for h in self.facets {
            let (a0, a1) = (h.a[0], h.a[1]);
            let mut m = SMatrix::<f64, 2, 5>::zeros();
            m[(0, 0)] = a0;
            m[(0, 1)] = a1;
            m[(1, 1)] = a0;
            m[(1, 2)] = a1;
            let y = m * x;
            let n = y.norm();
            let mut gs = -(m.transpose() * y) / n;
            gs[3] -= a0;
            gs[4] -= a1;
            let s = h.b - a0 * x[3] - a1 * x[4] - n;
            let hn = m.transpose() * (Matrix2::identity() / n - y * y.transpose() / (n * n * n)) * m;
            grad -= gs / s;
            hess += gs * gs.transpose() / (s * s) + hn / s;
        }
        (grad, hess)
    }

    fn center(&self, mut x: V5, t: f64) -> V5 {
        for _ in 0..200 {
            let (g, h) = self.derivatives(&x, t);
            let step = match h.cholesky() {
                Some(ch) => -ch.solve(&g),
                None => match h.lu().solve(&(-g)) {
                    Some(s) => s,
                    None => -g,
                },
            };
            let decrement = -g.dot(&step);
            if decrement / 2.0 <= 1e-14 {
                break;
            }
            let f0 = self.value(&x, t).expect("interior point");
            let mut alpha = 1.0;
            loop {
                let cand = x + step * alpha;
                if let Some(f) = self.value(&cand, t) {
                    if f <= f0 - 0.25 * alpha * decrement {
                        x = cand;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-16 {
                    return x;
                }
            }
        }
        x
    }
}

/// Maximum-area ellipse inside the hull of measurement-probe observations.
///
/// The distributions are projected onto the simplex plane and the ellipse
/// `{B v + d : |v| ≤ 1}` maximizing `log det B` is found by a log-barrier
/// Newton method with analytic derivatives. A collinear hull gives its
/// segment and a single distribution a point.
pub fn max_volume_ellipse(obs: &ObservationSet) -> Result<InscribedEllipse> {
    obs.require(ProbeKind::MeasProbe, 3)?;
    let (origin, frame) = simplex_frame();
    let pts: Vec<[f64; 2]> = obs.points.iter().map(|p| project(p, &origin, &frame)).collect();
    let hull = convex_hull(&pts);
    let embed = |d: [f64; 2], b: Matrix2<f64>| -> (Vec<f64>, RMat) {
        let center = (0..3)
            .map(|a| origin[a] + frame[(a, 0)] * d[0] + frame[(a, 1)] * d[1])
            .collect();
        let b = RMat::from_row_slice(2, 2, b.as_slice());
        let q = &frame * &b * &b.transpose() * frame.transpose();
        (center, q)
    };

    if polygon_area(&hull) <= 1e-14 {
        let (p, q) = match hull.len() {
            0 => return Err(Error::InvalidParameter("no observations".into())),
            1 => (hull[0], hull[0]),
            _ => {
                let mut far = (0.0, hull[0], hull[0]);
                for i in 0..hull.len() {
                    for j in i + 1..hull.len() {
                        let l = (hull[i][0] - hull[j][0]).hypot(hull[i][1] - hull[j][1]);
                        if l > far.0 {
                            far = (l, hull[i], hull[j]);
                        }
                    }
                }
                (far.1, far.2)
            }
        };
        let half = Vector2::new(q[0] - p[0], q[1] - p[1]) * 0.5;
        let d = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let l = half.norm();
        let b = if l > 0.0 {
            half * half.transpose() / l
        } else {
            Matrix2::zeros()
        };
        let (center, shape) = embed(d, b);
        return Ok(InscribedEllipse {
            center,
            shape,
            log_volume: f64::NEG_INFINITY,
            objective: 0.0,
            degenerate: true,
        });
    }

    let facets = halfplanes(&pts);
    let k = hull.len() as f64;
    let d0 = [
        hull.iter().map(|p| p[0]).sum::<f64>() / k,
        hull.iter().map(|p| p[1]).sum::<f64>() / k,
    ];
    let r0 = facets
        .iter()
        .map(|h| h.b - h.a[0] * d0[0] - h.a[1] * d0[1])
        .fold(f64::INFINITY, f64::min)
        * 0.5;
    let barrier = Barrier { facets: &facets };
    let mut x = V5::from([r0, 0.0, r0, d0[0], d0[1]]);
    let m = facets.len() as f64;
    let mut t = 1.0;
    loop {
        x = barrier.center(x, t);
        if m / t < 1e-13 {
            break;
        }
        t *= 10.0;
    }
    let b = Barrier::b_of(&x);
    let det = Barrier::det(&x);
    let (center, shape) = embed([x[3], x[4]], b);
    Ok(InscribedEllipse {
        center,
        shape,
        log_volume: (PI * det).ln(),
        objective: PI * det,
        degenerate: false,
    })
}
