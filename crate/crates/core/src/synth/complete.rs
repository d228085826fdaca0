use super::engine::{find_point, AffineSet, Blocks, EngineOptions};
use super::SynthesisResult;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::repr::{ChoiMatrix, DeviceKind, DeviceMatrix, Picture, TransferMap};
use crate::{Tolerances, Verdict};
use nalgebra::DVector;

/// Picture of the transfer map `C` in `D0 = D1 C` for a device kind.
pub fn picture_for(kind: DeviceKind) -> Picture {
    match kind {
        DeviceKind::StateFamily => Picture::Heisenberg,
        DeviceKind::Povm => Picture::Schrodinger,
    }
}

fn check_pair(d0: &DeviceMatrix, d1: &DeviceMatrix) -> Result<()> {
    if d0.kind() != d1.kind() {
        return Err(Error::KindMismatch(format!(
            "target is {:?} but source is {:?}",
            d0.kind(),
            d1.kind()
        )));
    }
    if d0.rows() != d1.rows() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} elements, source has {}",
            d0.rows(),
            d1.rows()
        )));
    }
    Ok(())
}

/// `C = D1⁺ D0`, the least-norm solution of `D1 C = D0`.
///
/// Whether it is positive, completely positive or normalized is left to
/// [`TransferMap::flags`].
pub fn pseudo_map(d0: &DeviceMatrix, d1: &DeviceMatrix) -> Result<TransferMap> {
    check_pair(d0, d1)?;
    let c = linalg::pinv(d1.data(), 1e-10) * d0.data();
    TransferMap::new(picture_for(d1.kind()), c)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dependency {
    Ok,
    /// `Σ λ_k d1_k = 0` but `‖Σ λ_k d0_k‖ = residual`.
    Violation { lambda: Vec<f64>, residual: f64 },
}

/// Checks that every linear dependency among the rows of `D1` also holds
/// among the rows of `D0`.
pub fn dependency_transfer_check(d0: &DeviceMatrix, d1: &DeviceMatrix, tol: f64) -> Result<Dependency> {
    check_pair(d0, d1)?;
    let null = linalg::null_complement(d1.data(), 1e-9 * d1.data().amax().max(1.0));
    if null.ncols() == 0 {
        return Ok(Dependency::Ok);
    }
    // worst dependency: top right singular vector of D0ᵀ N
    let m = d0.data().transpose() * &null;
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    if sigma <= tol {
        return Ok(Dependency::Ok);
    }
    let lambda = &null * vt.row(k).transpose();
    let scale = lambda.amax();
    let sign = lambda
        .iter()
        .find(|x| x.abs() > 1e-12 * scale)
        .map_or(1.0, |x| x.signum());
    let lambda: Vec<f64> = lambda.iter().map(|x| sign * x / scale).collect();
    let residual = (d0.data().transpose() * DVector::from_column_slice(&lambda)).norm();
    Ok(Dependency::Violation { lambda, residual })
}

/// Whether the identity lies in the span of the rows: `D⁺ D e_0 = e_0`.
pub fn identity_in_span(d: &DeviceMatrix, tol: f64) -> bool {
    let ell = d.ell();
    let p = linalg::pinv(d.data(), 1e-10) * d.data();
    let mut e0 = DVector::zeros(ell);
    e0[0] = 1.0;
    (&p * &e0 - &e0).norm() <= tol
}

/// Transfer matrices of the Hermitian Choi basis elements, one per
/// `herm_to_vec` coordinate.
fn choi_basis_transfers(d_in: usize, d_out: usize, picture: Picture) -> Vec<RMat> {
    let n = d_in * d_out;
    (0..n * n)
        .map(|i| {
            let mut v = vec![0.0; n * n];
            v[i] = 1.0;
            let j = ChoiMatrix::new(d_in, d_out, linalg::vec_to_herm(&v, n)).expect("Hermitian");
            j.to_transfer(picture).matrix().clone()
        })
        .collect()
}

/// Choi matrix of a reference channel used as the starting point.
fn reference_choi(d_in: usize, d_out: usize, picture: Picture) -> CMat {
    let n = d_in * d_out;
    if d_in == d_out {
        return TransferMap::identity(d_in, picture)
            .expect("supported")
            .to_choi()
            .into_matrix();
    }
    let scale = match picture {
        Picture::Heisenberg => 1.0 / d_in as f64,
        Picture::Schrodinger => 1.0 / d_out as f64,
    };
    CMat::identity(n, n) * linalg::c(scale, 0.0)
}

/// CP completion with default tolerances and iteration budget.
pub fn cp_complete(d0: &DeviceMatrix, d1: &DeviceMatrix, picture: Picture) -> Result<SynthesisResult> {
    cp_complete_with(d0, d1, picture, &Tolerances::default(), 100_000)
}

/// Searches the fiber `{C : D1 C = D0, C normalized}` for a completely
/// positive point by alternating projections on Choi matrices.
///
/// The normalization is unit preservation in the Heisenberg picture and
/// trace preservation in the Schrödinger picture.
pub fn cp_complete_with(
    d0: &DeviceMatrix,
    d1: &DeviceMatrix,
    picture: Picture,
    tol: &Tolerances,
    max_iter: usize,
) -> Result<SynthesisResult> {
    check_pair(d0, d1)?;
    if let Dependency::Violation { lambda, residual } = dependency_transfer_check(d0, d1, tol.span)? {
        return Ok(SynthesisResult {
            status: Verdict::Infeasible,
            channel: None,
            residual,
            witness: Some(lambda),
            iterations: 0,
            route: "dependency".into(),
        });
    }
    let (d_in, d_out) = (d0.dim(), d1.dim());
    let (ell_in, ell_out) = (d0.ell(), d1.ell());
    let n = d1.rows();
    let basis = choi_basis_transfers(d_in, d_out, picture);
    let extra = match picture {
        Picture::Heisenberg => ell_out,
        Picture::Schrodinger => ell_in,
    };
    let rows = n * ell_in + extra;
    let mut l = RMat::zeros(rows, basis.len());
    for (col, c) in basis.iter().enumerate() {
        let image = d1.data() * c;
        for i in 0..n {
            for k in 0..ell_in {
                l[(i * ell_in + k, col)] = image[(i, k)];
            }
        }
        for e in 0..extra {
            l[(n * ell_in + e, col)] = match picture {
                Picture::Heisenberg => c[(e, 0)],
                Picture::Schrodinger => c[(0, e)],
            };
        }
    }
    let mut b = DVector::zeros(rows);
    for i in 0..n {
        for k in 0..ell_in {
            b[i * ell_in + k] = d0.data()[(i, k)];
        }
    }
    b[n * ell_in] = 1.0;

    let Some(affine) = AffineSet::new(&l, &b, 1e-9) else {
        return Ok(SynthesisResult {
            status: Verdict::Infeasible,
            channel: None,
            residual: f64::INFINITY,
            witness: None,
            iterations: 0,
            route: "affine".into(),
        });
    };
    let blocks = Blocks(vec![d_in * d_out]);
    let start = linalg::herm_to_vec(&reference_choi(d_in, d_out, picture));
    let opts = EngineOptions {
        max_iter,
        feasible: tol.feasibility / 10.0,
        infeasible: tol.infeasibility,
        ..EngineOptions::default()
    };
    let out = find_point(&affine, &blocks, &start, &opts);
    let choi = linalg::vec_to_herm(out.point.as_slice(), d_in * d_out);
    let channel = ChoiMatrix::new(d_in, d_out, choi)?.to_transfer(picture);
    match out.verdict {
        Verdict::Feasible => {
            let residual = linalg::frobenius(&(d1.data() * channel.matrix() - d0.data()));
            Ok(SynthesisResult {
                status: Verdict::Feasible,
                channel: Some(channel),
                residual,
                witness: None,
                iterations: out.iterations,
                route: "cp-completion".into(),
            })
        }
        verdict => Ok(SynthesisResult {
            status: verdict,
            channel: None,
            residual: out.gap,
            witness: out.witness,
            iterations: out.iterations,
            route: "cp-completion".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::repr::DensityMatrix;

    fn family(vectors: &[[f64; 3]]) -> DeviceMatrix {
        let data = RMat::from_fn(vectors.len(), 4, |i, j| if j == 0 { 1.0 } else { vectors[i][j - 1] });
        DeviceMatrix::from_rows(DeviceKind::StateFamily, data).unwrap()
    }

    #[test]
    fn repeated_row_dependency_is_violated() {
        let rho = [0.3, 0.0, 0.4];
        let d1 = family(&[rho, rho]);
        let d0 = family(&[[0.0, 0.0, 0.5], [0.5, 0.0, 0.0]]);
        match dependency_transfer_check(&d0, &d1, 1e-10).unwrap() {
            Dependency::Violation { lambda, residual } => {
                assert!((lambda[0] - 1.0).abs() < 1e-12 && (lambda[1] + 1.0).abs() < 1e-12);
                assert!(residual > 0.5);
            }
            Dependency::Ok => panic!("expected a violation"),
        }
    }

    #[test]
    fn full_rank_source_has_no_dependencies() {
        let d1 = family(&[[0.5, 0.0, 0.0], [0.0, 0.0, 0.5]]);
        let d0 = family(&[[0.1, 0.2, 0.0], [0.0, 0.0, -0.3]]);
        assert_eq!(dependency_transfer_check(&d0, &d1, 1e-10).unwrap(), Dependency::Ok);
    }

    #[test]
    fn convex_extension_keeps_dependencies() {
        let a = [0.6, 0.0, 0.2];
        let b = [-0.1, 0.0, -0.7];
        let mix = |x: [f64; 3], y: [f64; 3], t: f64| [t * x[0] + (1.0 - t) * y[0], 0.0, t * x[2] + (1.0 - t) * y[2]];
        let d1 = family(&[a, b, mix(a, b, 0.3), mix(a, b, 0.8)]);
        let p = [0.2, 0.1, 0.0];
        let q = [0.0, -0.3, 0.3];
        let mixc = |t: f64| [t * p[0] + (1.0 - t) * q[0], t * p[1] + (1.0 - t) * q[1], t * p[2] + (1.0 - t) * q[2]];
        let d0 = family(&[p, q, mixc(0.3), mixc(0.8)]);
        assert_eq!(dependency_transfer_check(&d0, &d1, 1e-10).unwrap(), Dependency::Ok);
    }

    #[test]
    fn same_devices_complete_with_identity_immediately() {
        let d = family(&[[0.6, 0.0, 0.2], [-0.1, 0.0, -0.7]]);
        let r = cp_complete(&d, &d, Picture::Heisenberg).unwrap();
        assert_eq!(r.status, Verdict::Feasible);
        assert_eq!(r.iterations, 0);
        let ch = r.channel.unwrap();
        assert!((ch.matrix() - RMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn pseudo_map_of_identical_devices_reproduces_them() {
        let d = DeviceMatrix::state_family(&[
            DensityMatrix::pure(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ])
        .unwrap();
        let m = pseudo_map(&d, &d).unwrap();
        assert!((d.data() * m.matrix() - d.data()).norm() < 1e-12);
    }

    #[test]
    fn purity_cannot_be_increased() {
        // two mixed states cannot be mapped to two orthogonal pure states
        let d1 = family(&[[0.0, 0.0, 0.3], [0.0, 0.0, -0.3]]);
        let d0 = family(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]);
        let r = cp_complete(&d0, &d1, Picture::Heisenberg).unwrap();
        assert_eq!(r.status, Verdict::Infeasible);
        assert!(r.residual > 1e-3);
    }
}
