use super::engine::{find_point, AffineSet, Blocks, EngineOptions};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::repr::{ChoiMatrix, Picture, TransferMap};
use crate::Tolerances;
use nalgebra::DVector;

/// `C' = p C0 + (1 - p) T C1` with `C0`, `C1` completely positive and
/// normalized like `C'`.
#[derive(Clone, Debug, PartialEq)]
pub struct WoronowiczSplit {
    pub p: f64,
    pub c0: TransferMap,
    pub c1: TransferMap,
    /// `‖J(C') - A - Γ(B)‖_F` with `A = J(p C0)`, `B = J((1-p) C1)`.
    pub residual: f64,
    pub iterations: usize,
}

/// Marginal of `a` that must be proportional to the identity.
fn marginal(a: &CMat, d_in: usize, d_out: usize, picture: Picture) -> CMat {
    match picture {
        Picture::Heisenberg => linalg::partial_trace(a, d_in, d_out, false),
        Picture::Schrodinger => linalg::partial_trace(a, d_in, d_out, true),
    }
}

fn traceless(m: &CMat) -> CMat {
    let d = m.nrows();
    let t = m.trace() / d as f64;
    m - CMat::identity(d, d) * t
}

/// Decomposes a positive map with qubit output.
///
/// Solved as Choi-space feasibility: `J(C') = A + Γ(B)` with `A, B ⪰ 0`
/// (`Γ` the partial transposition on the output) and the normalizing
/// marginal of `A` proportional to the identity, so both parts are
/// multiples of normalized maps. `p` is read off the trace of `A`.
pub fn woronowicz_split(cp: &TransferMap, tol: &Tolerances) -> Result<WoronowiczSplit> {
    let (d_in, d_out) = (cp.d_in(), cp.d_out());
    if d_out != 2 {
        return Err(Error::UnsupportedDimension(d_out));
    }
    let picture = cp.picture();
    let defect = match picture {
        Picture::Heisenberg => cp.unit_preservation_defect(),
        Picture::Schrodinger => cp.trace_preservation_defect(),
    };
    if defect > tol.feasibility {
        return Err(Error::InvalidParameter(format!(
            "map is not normalized (defect {defect:.3e})"
        )));
    }
    let choi = cp.to_choi();
    let positivity = choi.block_positivity();
    if positivity.value < -tol.psd {
        return Err(Error::NotPositiveMap {
            value: positivity.value,
            input: positivity.input.iter().map(|z| [z.re, z.im]).collect(),
            output: positivity.output.iter().map(|z| [z.re, z.im]).collect(),
        });
    }
    if choi.min_eigenvalue() >= -tol.psd {
        return Ok(WoronowiczSplit {
            p: 1.0,
            c0: cp.clone(),
            c1: cp.clone(),
            residual: 0.0,
            iterations: 0,
        });
    }

    let n = d_in * d_out;
    let nn = n * n;
    let m = marginal(&CMat::identity(n, n), d_in, d_out, picture).nrows();
    let rows = nn + m * m;
    let mut l = RMat::zeros(rows, 2 * nn);
    for i in 0..nn {
        let mut v = vec![0.0; nn];
        v[i] = 1.0;
        let e = linalg::vec_to_herm(&v, n);
        let sum_a = linalg::herm_to_vec(&e);
        let marg = linalg::herm_to_vec(&traceless(&marginal(&e, d_in, d_out, picture)));
        let sum_b = linalg::herm_to_vec(&linalg::partial_transpose_second(&e, d_in, d_out));
        for r in 0..nn {
            l[(r, i)] = sum_a[r];
            l[(r, nn + i)] = sum_b[r];
        }
        for r in 0..m * m {
            l[(nn + r, i)] = marg[r];
        }
    }
    let target = choi.matrix();
    let mut b = DVector::zeros(rows);
    b.rows_mut(0, nn).copy_from(&linalg::herm_to_vec(target));
    let affine = AffineSet::new(&l, &b, 1e-9)
        .ok_or_else(|| Error::Unrealizable("decomposition constraints are inconsistent".into()))?;
    let blocks = Blocks(vec![n, n]);
    let start = blocks.join(&[linalg::project_psd(target), CMat::zeros(n, n)]);
    let opts = EngineOptions {
        feasible: tol.feasibility / 10.0,
        infeasible: tol.infeasibility,
        ..EngineOptions::default()
    };
    let out = find_point(&affine, &blocks, &start, &opts);
    if out.verdict != crate::Verdict::Feasible {
        return Err(Error::Unrealizable(format!(
            "no decomposition found (distance {:.3e} after {} iterations)",
            out.gap, out.iterations
        )));
    }
    let parts = blocks.split(&out.point);
    let a = linalg::project_psd(&parts[0]);
    let bm = linalg::project_psd(&parts[1]);
    let residual = (target - &a - linalg::partial_transpose_second(&bm, d_in, d_out)).norm();
    let norm_dim = match picture {
        Picture::Heisenberg => d_out,
        Picture::Schrodinger => d_in,
    } as f64;
    let p = (linalg::trace_re(&a) / norm_dim).clamp(0.0, 1.0);
    let to_map = |m: &CMat, w: f64| -> Result<TransferMap> {
        Ok(ChoiMatrix::new(d_in, d_out, m * linalg::c(1.0 / w, 0.0))?.to_transfer(picture))
    };
    let (c0, c1) = if p < 1e-12 {
        let c1 = to_map(&bm, 1.0)?;
        (c1.clone(), c1)
    } else if p > 1.0 - 1e-12 {
        let c0 = to_map(&a, 1.0)?;
        (c0.clone(), c0)
    } else {
        (to_map(&a, p)?, to_map(&bm, 1.0 - p)?)
    };
    Ok(WoronowiczSplit {
        p,
        c0,
        c1,
        residual,
        iterations: out.iterations,
    })
}

/// `p C0 + (1 - p) C1`: drops the transposition from the second branch,
/// which leaves `D1 C` unchanged whenever `D1 T = D1`.
pub fn realify(p: f64, c0: &TransferMap, c1: &TransferMap) -> Result<TransferMap> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("weight {p} outside [0, 1]")));
    }
    if c0.picture() != c1.picture() || c0.matrix().shape() != c1.matrix().shape() {
        return Err(Error::DimensionMismatch("branches have different shapes".into()));
    }
    TransferMap::new(c0.picture(), c0.matrix() * p + c1.matrix() * (1.0 - p))
}
