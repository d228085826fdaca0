//! Linear maps in Bloch coordinates and their Choi matrices.
//!
//! A [`TransferMap`] is a real `ℓ_out × ℓ_in` matrix together with the
//! coordinate convention it acts on: state coordinates (Schrödinger picture)
//! or effect coordinates (Heisenberg picture). The Choi matrix uses the
//! unnormalized maximally entangled vector, `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`
//! with the input factor first, so a map is completely positive iff `J ⪰ 0`,
//! trace preserving iff `Tr_out J = I`, and unit preserving iff `Tr_in J = I`.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat, ZERO};
use crate::repr::basis;
use crate::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    /// Acts on state coordinates.
    Schrodinger,
    /// Acts on effect coordinates.
    Heisenberg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMap {
    picture: Picture,
    matrix: RMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    entries: CMat,
}

/// Properties of a map, each computed from the matrix rather than assumed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFlags {
    pub positive: bool,
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub unit_preserving: bool,
    pub choi_min_eigenvalue: f64,
    pub positivity_min: f64,
}

/// Outcome of the product-state search on a Choi matrix.
#[derive(Clone, Debug)]
pub struct BlockPositivity {
    pub value: f64,
    pub input: Vec<Complex64>,
    pub output: Vec<Complex64>,
}

impl TransferMap {
    pub fn new(picture: Picture, matrix: RMat) -> Result<Self> {
        basis::dim_from_ell(matrix.nrows())?;
        basis::dim_from_ell(matrix.ncols())?;
        Ok(Self { picture, matrix })
    }

    pub fn identity(dim: usize, picture: Picture) -> Result<Self> {
        basis::check_dim(dim)?;
        Self::new(picture, RMat::identity(dim * dim, dim * dim))
    }

    /// Transposition in the computational basis.
    pub fn transposition(dim: usize, picture: Picture) -> Result<Self> {
        basis::check_dim(dim)?;
        let signs = nalgebra::DVector::from_vec(basis::transpose_signs(dim));
        Self::new(picture, RMat::from_diagonal(&signs))
    }

    /// Depolarizing map `ρ ↦ ε ρ + (1-ε) Tr[ρ] I/d`, which scales every
    /// traceless coordinate by `ε` in either picture.
    pub fn depolarizing(dim: usize, eps: f64, picture: Picture) -> Result<Self> {
        basis::check_dim(dim)?;
        let ell = dim * dim;
        let mut m = RMat::identity(ell, ell) * eps;
        m[(0, 0)] = 1.0;
        Self::new(picture, m)
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn ell_in(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn ell_out(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d_in(&self) -> usize {
        basis::dim_from_ell(self.ell_in()).unwrap()
    }

    pub fn d_out(&self) -> usize {
        basis::dim_from_ell(self.ell_out()).unwrap()
    }

    /// `T ∘ self`: transposition applied on the output.
    pub fn transpose_output(&self) -> Self {
        let signs = basis::transpose_signs(self.d_out());
        let mut m = self.matrix.clone();
        for (i, s) in signs.iter().enumerate() {
            m.row_mut(i).scale_mut(*s);
        }
        Self {
            picture: self.picture,
            matrix: m,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TransferMap) -> Result<Self> {
        if self.picture != other.picture || self.ell_in() != other.ell_out() {
            return Err(Error::DimensionMismatch("maps cannot be composed".into()));
        }
        Ok(Self {
            picture: self.picture,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// The same map written in the other picture's coordinates.
    pub fn with_picture(&self, picture: Picture) -> Self {
        if picture == self.picture {
            return self.clone();
        }
        let (din, dout) = (self.d_in() as f64, self.d_out() as f64);
        let factor = match picture {
            Picture::Heisenberg => din / dout,
            Picture::Schrodinger => dout / din,
        };
        Self {
            picture,
            matrix: &self.matrix * factor,
        }
    }

    /// Heisenberg dual: the map on the other coordinate type with input and
    /// output exchanged, satisfying `⟨Φ(ρ), π⟩ = ⟨ρ, Φ†(π)⟩`.
    pub fn dual(&self) -> Self {
        let picture = match self.picture {
            Picture::Schrodinger => Picture::Heisenberg,
            Picture::Heisenberg => Picture::Schrodinger,
        };
        Self {
            picture,
            matrix: self.matrix.transpose(),
        }
    }

    fn coords_in(&self, x: &CMat) -> Vec<Complex64> {
        let raw = basis::raw_coords(x);
        match self.picture {
            Picture::Schrodinger => raw,
            Picture::Heisenberg => {
                let d = x.nrows() as f64;
                raw.into_iter().map(|z| z / d).collect()
            }
        }
    }

    /// Apply the map to an arbitrary (possibly non-Hermitian) operator.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.d_in() || x.ncols() != self.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "operator of size {} for a map on dimension {}",
                x.nrows(),
                self.d_in()
            )));
        }
        let xin = self.coords_in(x);
        let dout = self.d_out();
        let scale = match self.picture {
            Picture::Schrodinger => 1.0 / dout as f64,
            Picture::Heisenberg => 1.0,
        };
        let y: Vec<Complex64> = (0..self.ell_out())
            .map(|j| {
                (0..self.ell_in())
                    .map(|k| xin[k] * self.matrix[(j, k)])
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        Ok(basis::combine(dout, &y))
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.d_in(), self.d_out());
        let n = din * dout;
        let mut j = CMat::zeros(n, n);
        for a in 0..din {
            for b in 0..din {
                let mut e = CMat::zeros(din, din);
                e[(a, b)] = c(1.0, 0.0);
                let img = self.apply(&e).expect("dimensions match");
                for p in 0..dout {
                    for q in 0..dout {
                        j[(a * dout + p, b * dout + q)] = img[(p, q)];
                    }
                }
            }
        }
        ChoiMatrix {
            d_in: din,
            d_out: dout,
            entries: j,
        }
    }

    /// Max deviation of the first row from the trace-preservation condition.
    pub fn trace_preservation_defect(&self) -> f64 {
        let first = match self.picture {
            Picture::Schrodinger => 1.0,
            Picture::Heisenberg => self.d_in() as f64 / self.d_out() as f64,
        };
        (0..self.ell_in())
            .map(|k| (self.matrix[(0, k)] - if k == 0 { first } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// Max deviation of the first column from the unit-preservation condition.
    pub fn unit_preservation_defect(&self) -> f64 {
        let first = match self.picture {
            Picture::Heisenberg => 1.0,
            Picture::Schrodinger => self.d_out() as f64 / self.d_in() as f64,
        };
        (0..self.ell_out())
            .map(|j| (self.matrix[(j, 0)] - if j == 0 { first } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    pub fn flags(&self, tol: &Tolerances) -> MapFlags {
        let choi = self.to_choi();
        let choi_min_eigenvalue = choi.min_eigenvalue();
        let positivity = choi.block_positivity();
        MapFlags {
            positive: positivity.value >= -tol.psd,
            completely_positive: choi_min_eigenvalue >= -tol.psd,
            trace_preserving: self.trace_preservation_defect() <= tol.map_identity,
            unit_preserving: self.unit_preservation_defect() <= tol.map_identity,
            choi_min_eigenvalue,
            positivity_min: positivity.value,
        }
    }
}

impl ChoiMatrix {
    pub fn new(d_in: usize, d_out: usize, entries: CMat) -> Result<Self> {
        basis::check_dim(d_in)?;
        basis::check_dim(d_out)?;
        let n = d_in * d_out;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let deviation = linalg::hermiticity_defect(&entries);
        if deviation > Tolerances::default().hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            d_in,
            d_out,
            entries,
        })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.entries).0.iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.entries)
    }

    /// `Tr_out J`, which is `Φ^T(I)`-like and equals `I` for trace-preserving maps.
    pub fn trace_out(&self) -> CMat {
        linalg::partial_trace(&self.entries, self.d_in, self.d_out, true)
    }

    /// `Tr_in J = Φ(I)`.
    pub fn trace_in(&self) -> CMat {
        linalg::partial_trace(&self.entries, self.d_in, self.d_out, false)
    }

    /// Choi matrix of `T ∘ Φ` (partial transposition of the output factor).
    pub fn partial_transpose(&self) -> Self {
        Self {
            d_in: self.d_in,
            d_out: self.d_out,
            entries: linalg::partial_transpose_second(&self.entries, self.d_in, self.d_out),
        }
    }

    /// Image of an operator, `Φ(X) = Σ_ij X_ij J_ij`.
    pub fn apply(&self, x: &CMat) -> CMat {
        let (din, dout) = (self.d_in, self.d_out);
        let mut out = CMat::zeros(dout, dout);
        for a in 0..din {
            for b in 0..din {
                let w = x[(a, b)];
                if w == ZERO {
                    continue;
                }
                out += self.entries.view((a * dout, b * dout), (dout, dout)) * w;
            }
        }
        out
    }

    pub fn to_transfer(&self, picture: Picture) -> TransferMap {
        let (din, dout) = (self.d_in, self.d_out);
        let gin = basis::basis(din);
        let (lin, lout) = (din * din, dout * dout);
        let mut m = RMat::zeros(lout, lin);
        for k in 0..lin {
            let x = match picture {
                Picture::Schrodinger => &gin[k] * c(1.0 / din as f64, 0.0),
                Picture::Heisenberg => gin[k].clone(),
            };
            let y = self.apply(&x);
            let raw = basis::raw_coords(&y);
            for j in 0..lout {
                m[(j, k)] = match picture {
                    Picture::Schrodinger => raw[j].re,
                    Picture::Heisenberg => raw[j].re / dout as f64,
                };
            }
        }
        TransferMap { picture, matrix: m }
    }

    /// Minimum of `⟨ψ⊗φ| J |ψ⊗φ⟩` over product unit vectors, found by
    /// alternating eigenvector minimization from a fixed set of starts.
    /// The map is positive iff this is non-negative.
    pub fn block_positivity(&self) -> BlockPositivity {
        let (din, dout) = (self.d_in, self.d_out);
        let mut best = BlockPositivity {
            value: f64::INFINITY,
            input: vec![],
            output: vec![],
        };
        for start in positivity_starts(dout) {
            let mut phi = start;
            let mut psi = vec![ZERO; din];
            let mut value = f64::INFINITY;
            for _ in 0..200 {
                let a = self.contract_output(&phi);
                let (va, vecs) = linalg::eigh(&a);
                psi = vecs.column(0).iter().copied().collect();
                let b = self.contract_input(&psi);
                let (vb, vecs) = linalg::eigh(&b);
                phi = vecs.column(0).iter().copied().collect();
                let next = vb[0].min(va[0]);
                if (value - next).abs() <= 1e-15 {
                    value = next;
                    break;
                }
                value = next;
            }
            if value < best.value {
                best = BlockPositivity {
                    value,
                    input: psi,
                    output: phi,
                };
            }
        }
        best
    }

    /// `(I ⊗ ⟨φ|) J (I ⊗ |φ⟩)`.
    fn contract_output(&self, phi: &[Complex64]) -> CMat {
        let (din, dout) = (self.d_in, self.d_out);
        CMat::from_fn(din, din, |a, b| {
            let mut s = ZERO;
            for p in 0..dout {
                for q in 0..dout {
                    s += phi[p].conj() * self.entries[(a * dout + p, b * dout + q)] * phi[q];
                }
            }
            s
        })
    }

    /// `(⟨ψ| ⊗ I) J (|ψ⟩ ⊗ I)`.
    fn contract_input(&self, psi: &[Complex64]) -> CMat {
        let (din, dout) = (self.d_in, self.d_out);
        CMat::from_fn(dout, dout, |p, q| {
            let mut s = ZERO;
            for a in 0..din {
                for b in 0..din {
                    s += psi[a].conj() * self.entries[(a * dout + p, b * dout + q)] * psi[b];
                }
            }
            s
        })
    }
}

fn positivity_starts(d: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    // computational vectors and a spread of superpositions
    for k in 0..d {
        let mut v = vec![ZERO; d];
        v[k] = c(1.0, 0.0);
        out.push(v);
    }
    for t in 0..12 {
        let theta = 0.37 + t as f64 * 0.83;
        let v: Vec<Complex64> = (0..d)
            .map(|k| {
                let ang = theta * (k as f64 + 1.0) * 1.7;
                c(ang.cos(), ang.sin()) * (1.0 + 0.3 * k as f64 * theta.sin()).abs()
            })
            .collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|z| z / n).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_choi_is_rank_one_maximally_entangled_projector() {
        for picture in [Picture::Schrodinger, Picture::Heisenberg] {
            let id = TransferMap::identity(2, picture).unwrap();
            let j = id.to_choi();
            let ev = j.eigenvalues();
            assert!((ev[3] - 2.0).abs() < 1e-12);
            assert!(ev[..3].iter().all(|x| x.abs() < 1e-12));
            assert!((j.trace_out() - CMat::identity(2, 2)).norm() < 1e-12);
        }
    }

    #[test]
    fn transposition_is_positive_but_not_cp() {
        let t = TransferMap::transposition(2, Picture::Schrodinger).unwrap();
        let flags = t.flags(&Tolerances::default());
        assert!(flags.positive && flags.trace_preserving && flags.unit_preserving);
        assert!(!flags.completely_positive);
        assert!((flags.choi_min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn choi_transfer_roundtrip() {
        let m = RMat::from_fn(4, 9, |i, j| ((i * 9 + j) as f64 * 0.31).sin());
        for picture in [Picture::Schrodinger, Picture::Heisenberg] {
            let t = TransferMap::new(picture, m.clone()).unwrap();
            let back = t.to_choi().to_transfer(picture);
            assert!((back.matrix() - &m).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_matches_choi_apply() {
        let m = RMat::from_fn(9, 4, |i, j| ((i * 4 + j) as f64 * 0.77).cos());
        let t = TransferMap::new(Picture::Schrodinger, m).unwrap();
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let direct = t.apply(&x).unwrap();
        let via = t.to_choi().apply(&x);
        assert!((direct - via).norm() < 1e-12);
    }

    #[test]
    fn dual_preserves_born_rule() {
        let m = RMat::from_fn(4, 9, |i, j| ((i + 2 * j) as f64 * 0.13).sin());
        let t = TransferMap::new(Picture::Schrodinger, m).unwrap();
        let s: Vec<f64> = (0..9).map(|k| (k as f64 * 0.4).cos()).collect();
        let e: Vec<f64> = (0..4).map(|k| (k as f64 * 1.1).sin()).collect();
        let ts = t.matrix() * nalgebra::DVector::from_vec(s.clone());
        let de = t.dual().matrix() * nalgebra::DVector::from_vec(e.clone());
        let lhs = linalg::dot(ts.as_slice(), &e);
        let rhs = linalg::dot(&s, de.as_slice());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            ChoiMatrix::new(2, 2, CMat::zeros(3, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
