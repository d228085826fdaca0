//! Generalized Pauli bases.
//!
//! For dimension `d` the basis is `G_0 = I` followed by traceless Hermitian
//! matrices, all normalized so that `Tr[G_i G_j] = d δ_ij`:
//!
//! * `d = 2`: `I, σx, σy, σz`.
//! * `d = 3`: `I` followed by the Gell-Mann matrices `λ_1 .. λ_8`, each
//!   scaled by `sqrt(3/2)`.
//!
//! States and effects use different coordinate scalings so that the plain
//! dot product is the Born rule:
//!
//! * state coordinates `s_k = Tr[ρ G_k]`, so `s_0 = 1` and `ρ = Σ s_k G_k / d`;
//! * effect coordinates `e_k = Tr[π G_k] / d`, so `π = Σ e_k G_k`.
//!
//! Then `Tr[ρ π] = Σ_k s_k e_k` and the identity effect is `(1, 0, .., 0)`.
//! For a qubit the traceless part of a state is its usual Bloch vector.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, ONE, ZERO};
use std::sync::OnceLock;

pub fn ell(dim: usize) -> usize {
    dim * dim
}

pub fn dim_from_ell(ell: usize) -> Result<usize> {
    match ell {
        4 => Ok(2),
        9 => Ok(3),
        _ => Err(Error::UnsupportedDimension(ell)),
    }
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn qubit_basis() -> Vec<CMat> {
    let i = c(0.0, 1.0);
    vec![
        CMat::identity(2, 2),
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

fn qutrit_basis() -> Vec<CMat> {
    let s = (1.5f64).sqrt();
    let mut out = vec![CMat::identity(3, 3)];
    let mut push = |entries: &[(usize, usize, f64, f64)]| {
        let mut m = CMat::zeros(3, 3);
        for &(r, col, re, im) in entries {
            m[(r, col)] = c(re * s, im * s);
        }
        out.push(m);
    };
    // λ1 .. λ8 in the usual order
    push(&[(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)]);
    push(&[(0, 1, 0.0, -1.0), (1, 0, 0.0, 1.0)]);
    push(&[(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)]);
    push(&[(0, 2, 1.0, 0.0), (2, 0, 1.0, 0.0)]);
    push(&[(0, 2, 0.0, -1.0), (2, 0, 0.0, 1.0)]);
    push(&[(1, 2, 1.0, 0.0), (2, 1, 1.0, 0.0)]);
    push(&[(1, 2, 0.0, -1.0), (2, 1, 0.0, 1.0)]);
    let t = 1.0 / 3f64.sqrt();
    push(&[(0, 0, t, 0.0), (1, 1, t, 0.0), (2, 2, -2.0 * t, 0.0)]);
    out
}

/// The basis matrices for `dim` (2 or 3).
pub fn basis(dim: usize) -> &'static [CMat] {
    static QUBIT: OnceLock<Vec<CMat>> = OnceLock::new();
    static QUTRIT: OnceLock<Vec<CMat>> = OnceLock::new();
    match dim {
        2 => QUBIT.get_or_init(qubit_basis),
        3 => QUTRIT.get_or_init(qutrit_basis),
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Sign of each basis element under transposition in the computational
/// basis (`G_k^T = sign_k G_k`). Imaginary generators flip.
pub fn transpose_signs(dim: usize) -> Vec<f64> {
    basis(dim)
        .iter()
        .map(|g| {
            let t = g.transpose();
            if (&t - g).norm() < 1e-12 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// `Tr[m G_k]` for every k (complex-linear, so valid for non-Hermitian `m`).
pub fn raw_coords(m: &CMat) -> Vec<num_complex::Complex64> {
    let dim = m.nrows();
    basis(dim)
        .iter()
        .map(|g| (m * g).trace())
        .collect()
}

/// Matrix `Σ coef_k G_k` for complex coefficients.
pub fn combine(dim: usize, coef: &[num_complex::Complex64]) -> CMat {
    let mut out = CMat::zeros(dim, dim);
    for (g, &a) in basis(dim).iter().zip(coef) {
        out += g * a;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_are_orthogonal_with_trace_norm_d() {
        for dim in [2usize, 3] {
            let b = basis(dim);
            assert_eq!(b.len(), dim * dim);
            for (i, gi) in b.iter().enumerate() {
                assert!(crate::linalg::hermiticity_defect(gi) < 1e-15);
                for (j, gj) in b.iter().enumerate() {
                    let t = (gi * gj).trace();
                    let expected = if i == j { dim as f64 } else { 0.0 };
                    assert!((t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transposition_flips_the_imaginary_generators() {
        assert_eq!(transpose_signs(2), vec![1.0, 1.0, -1.0, 1.0]);
        let q = transpose_signs(3);
        let flipped: Vec<usize> = (0..9).filter(|&k| q[k] < 0.0).collect();
        assert_eq!(flipped, vec![2, 5, 7]);
    }
}
