//! Small dense linear-algebra helpers shared by the modules.
//!
//! Everything here works on `nalgebra` dynamic matrices. Hermitian matrices
//! are mapped to real vectors by [`herm_to_vec`], an isometry between the
//! Hilbert-Schmidt inner product and the Euclidean one.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest absolute entry of `m - m^dagger`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    sort_eigen(eig.eigenvalues, eig.eigenvectors)
}

/// Eigenvalues (ascending) and eigenvectors of a real symmetric matrix.
pub fn eigh_real(m: &RMat) -> (DVector<f64>, RMat) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    sort_eigen(eig.eigenvalues, eig.eigenvectors)
}

fn sort_eigen<T: nalgebra::Scalar + Copy>(
    values: DVector<f64>,
    vectors: DMatrix<T>,
) -> (DVector<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = DVector::from_iterator(values.len(), order.iter().map(|&i| values[i]));
    let cols: Vec<_> = order.iter().map(|&i| vectors.column(i).into_owned()).collect();
    (sorted, DMatrix::from_columns(&cols))
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigh(m).0[0]
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    let (v, _) = eigh(m);
    v[v.len() - 1]
}

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
pub fn project_psd(m: &CMat) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        if vals[k] > 0.0 {
            let v = vecs.column(k);
            out += v * v.adjoint() * c(vals[k], 0.0);
        }
    }
    out
}

/// Square root of a real symmetric PSD matrix; negative eigenvalues are clipped.
pub fn sqrt_psd(m: &RMat) -> RMat {
    let (vals, vecs) = eigh_real(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| x.max(0.0).sqrt()));
    &vecs * DMatrix::from_diagonal(&d) * vecs.transpose()
}

/// Moore-Penrose pseudoinverse with singular values below `rtol * s_max` dropped.
pub fn pinv(m: &RMat, rtol: f64) -> RMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RMat::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cut = (rtol * smax).max(f64::MIN_POSITIVE);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut out = RMat::zeros(m.ncols(), m.nrows());
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s > cut {
            out += vt.row(k).transpose() * u.column(k).transpose() / s;
        }
    }
    out
}

pub fn rank(m: &RMat, rtol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// Orthonormal basis (as columns) of the left null space of `m`, i.e. of
/// the vectors `x` with `m^T x = 0`.
pub fn left_null_space(m: &RMat, rtol: f64) -> RMat {
    let n = m.nrows();
    let full = m * m.transpose();
    let (vals, vecs) = eigh_real(&full);
    let scale = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let cols: Vec<_> = (0..n)
        .filter(|&k| vals[k].abs() <= rtol * scale)
        .map(|k| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &RMat, rtol: f64) -> RMat {
    let n = m.nrows();
    if m.ncols() == 0 {
        return RMat::zeros(n, 0);
    }
    let full = m * m.transpose();
    let (vals, vecs) = eigh_real(&full);
    let scale = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if scale == 0.0 {
        return RMat::zeros(n, 0);
    }
    let cols: Vec<_> = (0..n)
        .rev()
        .filter(|&k| vals[k] > rtol * scale)
        .map(|k| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the column space of `m` from its SVD,
/// keeping singular values above `cut` (absolute). Columns are ordered by
/// decreasing singular value.
pub fn range_basis(m: &RMat, cut: f64) -> RMat {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return RMat::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > cut)
        .collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let cols: Vec<_> = idx.iter().map(|&k| u.column(k).into_owned()).collect();
    if cols.is_empty() {
        RMat::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the orthogonal complement of `range_basis(m, cut)`,
/// i.e. of the left null space of `m` resolved at singular-value level `cut`.
pub fn null_complement(m: &RMat, cut: f64) -> RMat {
    let n = m.nrows();
    let r = range_basis(m, cut);
    let proj = RMat::identity(n, n) - &r * r.transpose();
    let (vals, vecs) = eigh_real(&proj);
    let cols: Vec<_> = (0..n)
        .rev()
        .filter(|&k| vals[k] > 0.5)
        .map(|k| vecs.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// Partial trace of a bipartite operator on `d_a ⊗ d_b`, tracing out the
/// second factor (`keep_first = true`) or the first.
pub fn partial_trace(m: &CMat, d_a: usize, d_b: usize, keep_first: bool) -> CMat {
    if keep_first {
        CMat::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
        })
    } else {
        CMat::from_fn(d_b, d_b, |i, j| {
            (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum()
        })
    }
}

/// Transposition of the second tensor factor of an operator on `d_a ⊗ d_b`.
pub fn partial_transpose_second(m: &CMat, d_a: usize, d_b: usize) -> CMat {
    let n = d_a * d_b;
    CMat::from_fn(n, n, |r, s| {
        let (i, k) = (r / d_b, r % d_b);
        let (j, l) = (s / d_b, s % d_b);
        m[(i * d_b + l, j * d_b + k)]
    })
}

/// Real coordinates of a Hermitian matrix: diagonal entries followed by
/// `sqrt(2) Re` and `sqrt(2) Im` of the strict upper triangle.
pub fn herm_to_vec(m: &CMat) -> DVector<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(m[(i, i)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    DVector::from_vec(out)
}

pub fn vec_to_herm(v: &[f64], n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(v[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(v[k] * s, v[k + 1] * s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

pub fn frobenius(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
