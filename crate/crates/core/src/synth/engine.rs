//! Alternating projections with Dykstra's correction between an affine set
//! and a product of PSD cones.
//!
//! Points are real vectors: the concatenation of `herm_to_vec` coordinates
//! of each Hermitian block. Because that map is an isometry, Euclidean
//! projections here are Frobenius projections of the matrices.

use crate::linalg::{self, CMat, RMat};
use crate::Verdict;
use nalgebra::DVector;

/// `{x : L x = b}`, stored through its projector.
pub(crate) struct AffineSet {
    /// `I - L⁺L`
    kernel: RMat,
    /// `L⁺ b`, the least-norm point.
    point: DVector<f64>,
}

impl AffineSet {
    /// `None` when `L x = b` has no solution (relative residual above `tol`).
    pub(crate) fn new(l: &RMat, b: &DVector<f64>, tol: f64) -> Option<Self> {
        let pinv = linalg::pinv(l, 1e-11);
        let point = &pinv * b;
        let residual = (l * &point - b).norm();
        if residual > tol * b.norm().max(1.0) {
            return None;
        }
        let n = l.ncols();
        Some(Self {
            kernel: RMat::identity(n, n) - &pinv * l,
            point,
        })
    }

    pub(crate) fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.point + &self.kernel * (x - &self.point)
    }

    /// Whether the set is a single point.
    pub(crate) fn is_point(&self) -> bool {
        self.kernel.amax() < 1e-9
    }

    pub(crate) fn point(&self) -> &DVector<f64> {
        &self.point
    }

    fn normal_part(&self, y: &DVector<f64>) -> DVector<f64> {
        y - &self.kernel * y
    }
}

/// Separation margin certified by the direction `y`, if positive.
///
/// When the total trace `T` is constant on the affine set, every PSD
/// point `k` of trace `T` has `⟨y', k⟩ ≤ T max_i λ_max(y'_i)` while every
/// affine point has `⟨y', a⟩ = ⟨y', a_0⟩`, with `y'` the part of `y` normal
/// to the set. A positive difference proves the sets disjoint.
fn dual_margin(affine: &AffineSet, blocks: &Blocks, y: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
    let identity: Vec<CMat> = blocks.0.iter().map(|&n| CMat::identity(n, n)).collect();
    let e = blocks.join(&identity);
    if (&affine.kernel * &e).norm() > 1e-9 * e.norm() {
        return None;
    }
    let total = e.dot(affine.point());
    let yn = affine.normal_part(y);
    let norm = yn.norm();
    if norm == 0.0 {
        return None;
    }
    let yn = yn / norm;
    let lam = blocks
        .split(&yn)
        .iter()
        .map(linalg::max_eigenvalue)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = yn.dot(affine.point()) - total * lam;
    (margin > 0.0).then_some((margin, yn))
}

/// Improves a candidate direction by projected subgradient ascent on the
/// certified margin `⟨y, a_0⟩ - T λ_max(y)` over unit, traceless normals.
fn refine_dual(affine: &AffineSet, blocks: &Blocks, y: &DVector<f64>, iters: usize) -> Option<(f64, DVector<f64>)> {
    let identity: Vec<CMat> = blocks.0.iter().map(|&n| CMat::identity(n, n)).collect();
    let e = blocks.join(&identity);
    if (&affine.kernel * &e).norm() > 1e-9 * e.norm() {
        return None;
    }
    let total = e.dot(affine.point());
    let e_hat = &e / e.norm();
    let restrict = |v: &DVector<f64>| {
        let n = affine.normal_part(v);
        let n = &n - &e_hat * e_hat.dot(&n);
        let norm = n.norm();
        (norm > 0.0).then(|| n / norm)
    };
    let mut y = restrict(y)?;
    for k in 0..iters {
        if let Some(found) = dual_margin(affine, blocks, &y) {
            return Some(found);
        }
        // top eigenvector over all blocks
        let mut top = (f64::NEG_INFINITY, 0, None);
        for (b, m) in blocks.split(&y).iter().enumerate() {
            let (vals, vecs) = linalg::eigh(m);
            let last = vals.len() - 1;
            if vals[last] > top.0 {
                top = (vals[last], b, Some(vecs.column(last).into_owned()));
            }
        }
        let u = top.2?;
        let mut parts: Vec<CMat> = blocks.0.iter().map(|&n| CMat::zeros(n, n)).collect();
        parts[top.1] = &u * u.adjoint();
        let grad = affine.point() - blocks.join(&parts) * total;
        let step = 0.05 / ((k + 1) as f64).sqrt();
        y = restrict(&(&y + grad * step))?;
    }
    None
}

/// Sizes of the Hermitian blocks making up a point.
#[derive(Clone, Debug)]
pub(crate) struct Blocks(pub Vec<usize>);

impl Blocks {
    pub(crate) fn len(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub(crate) fn split(&self, x: &DVector<f64>) -> Vec<CMat> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut at = 0;
        for &n in &self.0 {
            out.push(linalg::vec_to_herm(&x.as_slice()[at..at + n * n], n));
            at += n * n;
        }
        out
    }

    pub(crate) fn join(&self, mats: &[CMat]) -> DVector<f64> {
        let mut v = Vec::with_capacity(self.len());
        for m in mats {
            v.extend(linalg::herm_to_vec(m).iter());
        }
        DVector::from_vec(v)
    }

    /// Projection onto the cone and the norm of the removed negative part.
    fn project(&self, x: &DVector<f64>) -> (DVector<f64>, f64, f64) {
        let mut parts = Vec::with_capacity(self.0.len());
        let mut neg = 0.0;
        let mut lam_min = f64::INFINITY;
        for m in self.split(x) {
            let (vals, vecs) = linalg::eigh(&m);
            let n = vals.len();
            let mut p = CMat::zeros(n, n);
            for k in 0..n {
                lam_min = lam_min.min(vals[k]);
                if vals[k] > 0.0 {
                    let v = vecs.column(k);
                    p += v * v.adjoint() * linalg::c(vals[k], 0.0);
                } else {
                    neg += vals[k] * vals[k];
                }
            }
            parts.push(p);
        }
        (self.join(&parts), neg.sqrt(), lam_min)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct EngineOptions {
    pub max_iter: usize,
    /// Distance to the cone accepted as feasible.
    pub feasible: f64,
    /// Stalled gap above which the sets are declared disjoint.
    pub infeasible: f64,
    /// Iterations over which the gap must stall.
    pub window: usize,
    /// Relative gap decrease over `window` treated as a stall.
    pub stall: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            feasible: 1e-9,
            infeasible: 1e-6,
            window: 500,
            stall: 1e-7,
        }
    }
}

pub(crate) struct EngineOutcome {
    pub verdict: Verdict,
    /// Last affine iterate.
    pub point: DVector<f64>,
    /// Distance between the last pair of iterates.
    pub gap: f64,
    pub iterations: usize,
    /// Unit gap direction when declared infeasible.
    pub witness: Option<Vec<f64>>,
}

/// Searches `affine ∩ cone` starting from the projection of `start`.
pub(crate) fn find_point(
    affine: &AffineSet,
    blocks: &Blocks,
    start: &DVector<f64>,
    opts: &EngineOptions,
) -> EngineOutcome {
    let mut x = affine.project(start);
    let mut correction = DVector::zeros(x.len());
    let mut history: Vec<f64> = Vec::new();
    let single = affine.is_point();
    for k in 0..=opts.max_iter {
        let (px, dist, _) = blocks.project(&x);
        if dist <= opts.feasible {
            return EngineOutcome {
                verdict: Verdict::Feasible,
                point: x,
                gap: dist,
                iterations: k,
                witness: None,
            };
        }
        if k % 50 == 0 {
            let gap = &x - &px;
            let found = if k % 1000 == 0 && k > 0 {
                refine_dual(affine, blocks, &gap, 5000)
            } else {
                dual_margin(affine, blocks, &gap)
            };
            if let Some((margin, normal)) = found {
                if margin > opts.feasible {
                    return EngineOutcome {
                        verdict: Verdict::Infeasible,
                        point: x,
                        gap: dist,
                        iterations: k,
                        witness: Some(normal.iter().copied().collect()),
                    };
                }
            }
        }
        if single || k == opts.max_iter {
            let verdict = if single && dist > opts.infeasible {
                Verdict::Infeasible
            } else {
                Verdict::Undecided
            };
            let witness = (verdict == Verdict::Infeasible)
                .then(|| ((&x - &px) / dist).iter().copied().collect());
            return EngineOutcome {
                verdict,
                point: x,
                gap: dist,
                iterations: k,
                witness,
            };
        }
        let (y, _, _) = blocks.project(&(&x + &correction));
        correction = &x + &correction - &y;
        let next = affine.project(&y);
        let gap = (&next - &y).norm();
        history.push(gap);
        x = next;
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window];
            if gap > opts.infeasible && old - gap <= opts.stall * gap {
                let witness = ((&x - &y) / gap).iter().copied().collect();
                return EngineOutcome {
                    verdict: Verdict::Infeasible,
                    point: x,
                    gap,
                    iterations: k + 1,
                    witness: Some(witness),
                };
            }
        }
    }
    unreachable!("loop returns at max_iter")
}
