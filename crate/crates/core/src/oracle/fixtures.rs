use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::repr::{DeviceKind, DeviceMatrix};
use crate::sdi::ObservationSet;
use std::f64::consts::PI;

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps = {eps} outside [0, 1]")))
    }
}

/// Trine measurement `π_k = (I + ε n_k·σ)/3` with `n_k` at angles `2πk/3`
/// in the `x-z` plane; `ε = 1` is the plain trine.
pub fn trine(eps: f64) -> Result<DeviceMatrix> {
    check_eps(eps)?;
    let data = RMat::from_fn(3, 4, |k, j| {
        let th = 2.0 * PI * k as f64 / 3.0;
        match j {
            0 => 1.0 / 3.0,
            1 => eps * th.sin() / 3.0,
            3 => eps * th.cos() / 3.0,
            _ => 0.0,
        }
    });
    DeviceMatrix::from_rows(DeviceKind::Povm, data)
}

const TETRA: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

fn tetra_family(sign: f64) -> Result<DeviceMatrix> {
    let s = sign / 3f64.sqrt();
    let data = RMat::from_fn(4, 4, |k, j| if j == 0 { 1.0 } else { s * TETRA[k][j - 1] });
    DeviceMatrix::from_rows(DeviceKind::StateFamily, data)
}

/// Pure states on the vertices of a regular tetrahedron in the Bloch ball.
pub fn tetrahedral() -> Result<DeviceMatrix> {
    tetra_family(1.0)
}

/// The transpose of [`tetrahedral`], the inverted tetrahedron.
///
/// Both families have the same testing region, but the only linear map
/// between them is the transposition, so neither simulates the other.
pub fn tetrahedral_swap() -> Result<DeviceMatrix> {
    tetra_family(-1.0)
}

/// One observation `q = ((1-ε)/2, 1/2)`: the dichotomy `{D_ε(|+⟩⟨+|), I/2}`
/// probed by the effect `|-⟩⟨-|`.
pub fn eq_probability(eps: f64) -> Result<ObservationSet> {
    check_eps(eps)?;
    ObservationSet::state_probe(vec![vec![0.5 * (1.0 - eps), 0.5]])
}

/// `m` distributions `(2 - 2cos θ, 2 + cos θ - √3 sin θ, 2 + cos θ + √3 sin θ)/6`
/// at `θ = 2πx/m`: the trine measurement probed by `m` pure real states
/// evenly spaced on the great circle.
pub fn eq_distributions(m: usize) -> Result<ObservationSet> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("need m ≥ 3 probes, got {m}")));
    }
    let r3 = 3f64.sqrt();
    let points = (0..m)
        .map(|x| {
            let th = 2.0 * PI * x as f64 / m as f64;
            let (c, s) = (th.cos(), th.sin());
            vec![2.0 - 2.0 * c, 2.0 + c - r3 * s, 2.0 + c + r3 * s]
        })
        .collect();
    ObservationSet::meas_probe(points)
}

/// Fixture names accepted by [`fixture_device`].
pub const DEVICE_FIXTURES: [&str; 4] = ["trine", "depolarized-trine", "tetrahedral", "tetrahedral-swap"];

/// Device fixture by name; `eps` applies to the depolarized trine.
pub fn fixture_device(name: &str, eps: f64) -> Result<DeviceMatrix> {
    match name {
        "trine" => trine(1.0),
        "depolarized-trine" => trine(eps),
        "tetrahedral" => tetrahedral(),
        "tetrahedral-swap" => tetrahedral_swap(),
        _ => Err(Error::InvalidParameter(format!("unknown device fixture {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::repr::{DensityMatrix, Picture, TransferMap};
    use crate::synth::pseudo_map;

    #[test]
    fn trine_is_a_valid_povm() {
        let t = trine(1.0).unwrap();
        assert!(t.completeness_residual() < 1e-15);
        assert_eq!(t.identity_components(), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn distributions_match_the_trine_on_real_states() {
        let m = 5;
        let obs = eq_distributions(m).unwrap();
        let t = trine(1.0).unwrap();
        for (x, p) in obs.points.iter().enumerate() {
            // Bloch vector whose Born probabilities are p
            let th = 2.0 * PI * x as f64 / m as f64;
            let psi = [c((th / 2.0 + PI / 2.0).cos(), 0.0), c((th / 2.0 + PI / 2.0).sin(), 0.0)];
            let rho = DensityMatrix::pure(&psi).unwrap();
            let s = rho.to_bloch();
            for a in 0..3 {
                let born = t.row(a).dot(&s);
                assert!((born - p[a]).abs() < 1e-12, "x={x} a={a} {born} {}", p[a]);
            }
        }
    }

    #[test]
    fn swap_is_the_transpose() {
        let (a, b) = (tetrahedral().unwrap(), tetrahedral_swap().unwrap());
        let c = pseudo_map(&b, &a).unwrap();
        let t = TransferMap::transposition(2, Picture::Heisenberg).unwrap();
        // transposition and inversion agree on the tetrahedron up to a rotation,
        // so the pseudo-map is not completely positive
        assert!(c.to_choi().min_eigenvalue() < -0.1);
        assert!((b.data() - a.data() * t.matrix() * c_rot()).amax() < 1e-12);
    }

    /// Rotation by π about y, which together with transposition inverts
    /// the tetrahedron.
    fn c_rot() -> RMat {
        RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0]))
    }
}
