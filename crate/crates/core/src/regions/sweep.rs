//! Deterministic direction sets on the unit sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// `count` unit vectors in `R^k`.
///
/// `k = 1` gives `±1`; `k = 2` equally spaced angles with a seeded offset;
/// higher `k` a Halton sequence with a seeded Cranley-Patterson shift,
/// mapped to Gaussians by Box-Muller and normalized.
pub fn sphere_directions(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match k {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let offset: f64 = if seed == 0 { 0.0 } else { rng.random::<f64>() };
            (0..count)
                .map(|i| {
                    let t = std::f64::consts::TAU * (i as f64 + offset) / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        _ => {
            let pairs = k.div_ceil(2);
            assert!(2 * pairs <= PRIMES.len(), "dimension {k} too large for the sweep");
            let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.random::<f64>()).collect();
            (0..count)
                .map(|i| {
                    let mut g = Vec::with_capacity(2 * pairs);
                    for p in 0..pairs {
                        let u1 = (radical_inverse(i as u64 + 1, PRIMES[2 * p]) + shift[2 * p]).fract();
                        let u2 = (radical_inverse(i as u64 + 1, PRIMES[2 * p + 1]) + shift[2 * p + 1])
                            .fract();
                        let r = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt();
                        let t = std::f64::consts::TAU * u2;
                        g.push(r * t.cos());
                        g.push(r * t.sin());
                    }
                    g.truncate(k);
                    let n = crate::linalg::norm(&g).max(1e-300);
                    g.iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        for k in 1..=6 {
            let a = sphere_directions(k, 500, 7);
            let b = sphere_directions(k, 500, 7);
            assert_eq!(a, b);
            for w in &a {
                assert!((crate::linalg::norm(w) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn directions_cover_the_sphere() {
        // every coordinate axis has a direction within 0.3 rad
        let dirs = sphere_directions(3, 10_000, 1);
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let best = dirs.iter().map(|w| sign * w[axis]).fold(-1.0, f64::max);
                assert!(best > (0.3f64).cos());
            }
        }
    }
}
