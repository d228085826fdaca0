use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::regions::{ConvexBody, RegionDescriptor};
use crate::repr::{basis, ChoiMatrix, DensityMatrix, DeviceKind, DeviceMatrix, Effect, Picture, TransferMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn conjugate(u: &CMat, spectrum: &[f64]) -> CMat {
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        spectrum.len(),
        spectrum.iter().map(|&x| c(x, 0.0)),
    ));
    linalg::hermitian_part(&(u * d * u.adjoint()))
}

/// Effect `U diag(λ) U†` with Haar `U`; the spectrum is uniform on
/// `[0,1]^d` or, with probability 1/2, a uniformly chosen projector
/// spectrum in `{0,1}^d`, so the extreme effects are sampled directly.
pub fn sample_effect<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let u = haar_unitary(d, rng);
    let projective = rng.random::<bool>();
    let spectrum: Vec<f64> = (0..d)
        .map(|_| {
            if projective {
                f64::from(u8::from(rng.random::<bool>()))
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    conjugate(&u, &spectrum)
}

/// Pure Haar state with probability 1/2, otherwise Hilbert-Schmidt mixed.
pub fn sample_state<R: Rng>(d: usize, rng: &mut R) -> CMat {
    if rng.random::<bool>() {
        let v = ginibre(d, 1, rng);
        let v = &v / c(v.norm(), 0.0);
        linalg::hermitian_part(&(&v * v.adjoint()))
    } else {
        let g = ginibre(d, d, rng);
        let w = &g * g.adjoint();
        let t = linalg::trace_re(&w);
        linalg::hermitian_part(&(w / c(t, 0.0)))
    }
}

/// Points sampled from a region or range.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub count: usize,
    /// Name of the sampling scheme, recorded for replay.
    pub sampler: String,
}

/// Brute-force samples of a device's region: click-probability vectors of
/// random effects on a state family, or outcome distributions of random
/// states on a measurement.
pub fn brute_region(device: &DeviceMatrix, count: usize, seed: u64) -> Result<SampleCloud> {
    let mut rng = rng_from_seed(seed);
    let d = device.dim();
    let mats = device.matrices();
    let (sampler, points) = match device.kind() {
        DeviceKind::StateFamily => (
            "effects: haar unitary, spectrum uniform or projective (1:1)",
            (0..count)
                .map(|_| {
                    let e = sample_effect(d, &mut rng);
                    mats.iter().map(|rho| linalg::trace_re(&(rho * &e))).collect()
                })
                .collect(),
        ),
        DeviceKind::Povm => (
            "states: haar pure or hilbert-schmidt mixed (1:1)",
            (0..count)
                .map(|_| {
                    let rho = sample_state(d, &mut rng);
                    mats.iter().map(|pi| linalg::trace_re(&(&rho * pi))).collect()
                })
                .collect(),
        ),
    };
    Ok(SampleCloud {
        points,
        seed,
        count,
        sampler: sampler.into(),
    })
}

/// Largest membership excess of any sample (non-positive when the body
/// contains the whole cloud).
pub fn max_outside(cloud: &SampleCloud, body: &RegionDescriptor) -> f64 {
    body.max_membership_excess(&cloud.points)
}

/// `max_w |h_body(w) - h_cloud(w)|` over `directions` unit directions,
/// the Hausdorff distance between the body and the cloud's hull estimated
/// on a direction sample.
pub fn hausdorff_gap<B: ConvexBody + ?Sized>(body: &B, cloud: &SampleCloud, directions: usize, seed: u64) -> f64 {
    let n = body.ambient();
    let flat: Vec<f64> = cloud.points.iter().flat_map(|p| p.iter().copied()).collect();
    crate::regions::sweep::sphere_directions(n, directions, seed)
        .iter()
        .map(|w| (body.support(w) - cloud_support(&flat, n, w)).abs())
        .fold(0.0, f64::max)
}

/// `max_p w·p` over row-major points, with independent running maxima so
/// the loop pipelines.
fn cloud_support(flat: &[f64], n: usize, w: &[f64]) -> f64 {
    let mut best = [f64::NEG_INFINITY; 4];
    let mut chunks = flat.chunks_exact(4 * n);
    for block in &mut chunks {
        for (k, p) in block.chunks_exact(n).enumerate() {
            let d: f64 = p.iter().zip(w).map(|(a, b)| a * b).sum();
            if d > best[k] {
                best[k] = d;
            }
        }
    }
    for p in chunks.remainder().chunks_exact(n) {
        let d: f64 = p.iter().zip(w).map(|(a, b)| a * b).sum();
        if d > best[0] {
            best[0] = d;
        }
    }
    best.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// `n` states with Bloch vectors uniform in the `x-z` unit disc.
pub fn random_real_qubit_family<R: Rng>(n: usize, rng: &mut R) -> Result<DeviceMatrix> {
    let mut data = RMat::zeros(n, 4);
    for i in 0..n {
        let r = rng.random::<f64>().sqrt();
        let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        data[(i, 0)] = 1.0;
        data[(i, 1)] = r * th.cos();
        data[(i, 3)] = r * th.sin();
    }
    DeviceMatrix::from_rows(DeviceKind::StateFamily, data)
}

/// `n` random states of dimension `d`.
pub fn random_state_family<R: Rng>(d: usize, n: usize, rng: &mut R) -> Result<DeviceMatrix> {
    let states = (0..n)
        .map(|_| DensityMatrix::new(sample_state(d, rng)))
        .collect::<Result<Vec<_>>>()?;
    DeviceMatrix::state_family(&states)
}

/// Random `n`-outcome POVM: `π_a = S^{-1/2} G_a S^{-1/2}` with Wishart
/// `G_a` and `S = Σ G_a`; real symmetric `G_a` give a real measurement.
pub fn random_povm<R: Rng>(d: usize, n: usize, real: bool, rng: &mut R) -> Result<DeviceMatrix> {
    let g: Vec<CMat> = (0..n)
        .map(|_| {
            let mut x = ginibre(d, d, rng);
            if real {
                x.iter_mut().for_each(|z| z.im = 0.0);
            }
            &x * x.adjoint()
        })
        .collect();
    let s = g.iter().fold(CMat::zeros(d, d), |acc, m| acc + m);
    let inv_sqrt = inverse_sqrt(&s)?;
    let effects = g
        .iter()
        .map(|m| Effect::new(linalg::hermitian_part(&(&inv_sqrt * m * &inv_sqrt))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = DeviceMatrix::povm(&effects)?;
    // remove rounding so completeness holds to machine precision
    let mut data = out.data().clone();
    let n_rows = data.nrows() as f64;
    let col_sum = data.row_sum();
    for j in 0..data.ncols() {
        let target = if j == 0 { 1.0 } else { 0.0 };
        let shift = (col_sum[j] - target) / n_rows;
        data.column_mut(j).add_scalar_mut(-shift);
    }
    out = out.with_data(data)?;
    Ok(out)
}

fn inverse_sqrt(m: &CMat) -> Result<CMat> {
    let (w, v) = linalg::eigh(m);
    if w[0] <= 1e-12 {
        return Err(Error::NotPositive {
            what: "wishart sum",
            min_eigenvalue: w[0],
        });
    }
    let s: Vec<f64> = w.iter().map(|x| 1.0 / x.sqrt()).collect();
    Ok(conjugate(&v, &s))
}

/// Random normalized completely positive map with `d_in`-dimensional input
/// and `d_out`-dimensional output: a Wishart Choi matrix rescaled to be
/// unit preserving (Heisenberg) or trace preserving (Schrödinger).
pub fn random_channel<R: Rng>(d_in: usize, d_out: usize, picture: Picture, rng: &mut R) -> Result<TransferMap> {
    basis::check_dim(d_in)?;
    basis::check_dim(d_out)?;
    let n = d_in * d_out;
    let x = ginibre(n, n, rng);
    let j = &x * x.adjoint();
    let (marg, left) = match picture {
        Picture::Heisenberg => (linalg::partial_trace(&j, d_in, d_out, false), false),
        Picture::Schrodinger => (linalg::partial_trace(&j, d_in, d_out, true), true),
    };
    let k = inverse_sqrt(&marg)?;
    let scale = if left {
        k.kronecker(&CMat::identity(d_out, d_out))
    } else {
        CMat::identity(d_in, d_in).kronecker(&k)
    };
    let j = linalg::hermitian_part(&(&scale * j * &scale));
    Ok(ChoiMatrix::new(d_in, d_out, j)?.to_transfer(picture))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::region_of;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        let u = haar_unitary(3, &mut rng);
        assert!((&u * u.adjoint() - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn sampled_operators_are_valid() {
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            Effect::new(sample_effect(3, &mut rng)).unwrap();
            DensityMatrix::new(sample_state(2, &mut rng)).unwrap();
        }
    }

    #[test]
    fn random_channels_are_normalized_and_cp() {
        let mut rng = rng_from_seed(3);
        for (d_in, d_out, pic) in [(2, 2, Picture::Heisenberg), (3, 2, Picture::Heisenberg), (2, 2, Picture::Schrodinger)] {
            let ch = random_channel(d_in, d_out, pic, &mut rng).unwrap();
            assert!(ch.to_choi().min_eigenvalue() > -1e-12);
            let defect = match pic {
                Picture::Heisenberg => ch.unit_preservation_defect(),
                Picture::Schrodinger => ch.trace_preservation_defect(),
            };
            assert!(defect < 1e-10, "{defect}");
        }
    }

    #[test]
    fn real_povm_is_real() {
        let mut rng = rng_from_seed(4);
        let m = random_povm(2, 3, true, &mut rng).unwrap();
        assert!(m.data().column(2).amax() < 1e-14);
        assert!(m.completeness_residual() < 1e-14);
    }

    #[test]
    fn cloud_stays_inside_the_closed_form() {
        let mut rng = rng_from_seed(5);
        let d = random_real_qubit_family(3, &mut rng).unwrap();
        let cloud = brute_region(&d, 2000, 9).unwrap();
        let r = region_of(&d).unwrap();
        assert!(max_outside(&cloud, &r) <= 1e-9);
        assert!(hausdorff_gap(&r, &cloud, 500, 0) < 0.05);
    }
}
