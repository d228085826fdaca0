use super::fixtures::{tetrahedral, tetrahedral_swap};
use super::sample::{random_channel, random_povm, random_real_qubit_family, random_state_family, rng_from_seed};
use crate::error::Result;
use crate::regions::{body_included, region_of, InclusionOptions, SpectralBody};
use crate::repr::{DeviceKind, DeviceMatrix, Picture};
use crate::synth::{pseudo_map, simulate, SimulateOptions};
use crate::{Tolerances, Verdict};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Instance families of the equivalence harness. Every source is a real
/// qubit device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Two-state families.
    Dichotomy,
    /// Three or four states spanning the identity.
    IdentitySpan,
    /// Three-outcome measurements.
    ThreeOutcome,
    /// Qutrit targets against three or four qubit states.
    Qutrit,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Dichotomy, Regime::IdentitySpan, Regime::ThreeOutcome, Regime::Qutrit];

    fn index(self) -> u64 {
        self as u64
    }
}

/// Margins in `(tol, BORDERLINE]` are too close to call and are redrawn.
pub const BORDERLINE: f64 = 1e-3;
const MAX_REDRAWS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    /// Seed of the instance's generator; replays the instance on its own.
    pub seed: u64,
    pub redraws: usize,
    /// Generated as `D1 C` for a random channel `C`.
    pub constructed_feasible: bool,
    pub region: Verdict,
    pub margin: f64,
    pub simulate: Verdict,
    pub route: String,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub regime: Regime,
    pub base_seed: u64,
    pub inclusion_tol: f64,
    pub borderline: f64,
    pub instances: Vec<InstanceRecord>,
    pub agreements: usize,
}

impl HarnessReport {
    pub fn agreement_rate(&self) -> f64 {
        self.agreements as f64 / self.instances.len().max(1) as f64
    }
}

/// Seed of instance `index` of `regime`: SplitMix64 of the base seed with
/// the regime in the top byte and the index below it.
pub fn instance_seed(base: u64, regime: Regime, index: usize) -> u64 {
    let mut z = base ^ (regime.index() << 56) ^ index as u64;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `(target, source, constructed_feasible)`.
fn draw<R: Rng>(regime: Regime, rng: &mut R) -> Result<(DeviceMatrix, DeviceMatrix, bool)> {
    let construct = rng.random::<bool>();
    let (source, d0) = match regime {
        Regime::Dichotomy => (random_real_qubit_family(2, rng)?, 2),
        Regime::IdentitySpan => (random_real_qubit_family(rng.random_range(3..=4), rng)?, 2),
        Regime::ThreeOutcome => (random_povm(2, 3, true, rng)?, 2),
        Regime::Qutrit => (random_real_qubit_family(rng.random_range(3..=4), rng)?, 3),
    };
    let n = source.rows();
    let target = if construct {
        let picture = match source.kind() {
            DeviceKind::StateFamily => Picture::Heisenberg,
            DeviceKind::Povm => Picture::Schrodinger,
        };
        let c = random_channel(d0, 2, picture, rng)?;
        let data = source.data() * c.matrix();
        DeviceMatrix::from_rows(source.kind(), data)?
    } else {
        match source.kind() {
            DeviceKind::StateFamily => random_state_family(d0, n, rng)?,
            DeviceKind::Povm => random_povm(d0, n, false, rng)?,
        }
    };
    Ok((target, source, construct))
}

fn inclusion(target: &DeviceMatrix, source: &DeviceMatrix, opts: &InclusionOptions) -> Result<crate::Certificate> {
    let outer = region_of(source)?;
    if target.dim() == 2 {
        body_included(&region_of(target)?, &outer, opts)
    } else {
        body_included(&SpectralBody::new(target), &outer, opts)
    }
}

/// Runs one instance from its seed.
pub fn run_instance(regime: Regime, index: usize, seed: u64, tol: &Tolerances) -> Result<InstanceRecord> {
    let mut rng = rng_from_seed(seed);
    let opts = InclusionOptions {
        seed,
        ..InclusionOptions::with_tol(tol.inclusion)
    };
    let mut redraws = 0;
    loop {
        let (target, source, constructed) = draw(regime, &mut rng)?;
        let cert = inclusion(&target, &source, &opts)?;
        let borderline = cert.margin > tol.inclusion && cert.margin <= BORDERLINE;
        if borderline && redraws < MAX_REDRAWS {
            redraws += 1;
            continue;
        }
        let sim = simulate(
            &target,
            &source,
            &SimulateOptions {
                tolerances: *tol,
                ..SimulateOptions::default()
            },
        )?;
        let agree = (cert.verdict == Verdict::Feasible) == (sim.status == Verdict::Feasible)
            && sim.status != Verdict::Undecided;
        return Ok(InstanceRecord {
            index,
            seed,
            redraws,
            constructed_feasible: constructed,
            region: cert.verdict,
            margin: cert.margin,
            simulate: sim.status,
            route: sim.route,
            agree,
        });
    }
}

/// Compares region inclusion with channel synthesis on `count` seeded
/// instances of a regime.
pub fn equivalence_harness(regime: Regime, count: usize, base_seed: u64, tol: &Tolerances) -> Result<HarnessReport> {
    let instances = (0..count)
        .map(|i| run_instance(regime, i, instance_seed(base_seed, regime, i), tol))
        .collect::<Result<Vec<_>>>()?;
    let agreements = instances.iter().filter(|r| r.agree).count();
    Ok(HarnessReport {
        regime,
        base_seed,
        inclusion_tol: tol.inclusion,
        borderline: BORDERLINE,
        instances,
        agreements,
    })
}

/// The tetrahedral pair: equal testing regions, no channel either way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Inclusion margins swap-in-tetrahedral and tetrahedral-in-swap.
    pub margins: [f64; 2],
    pub synthesis: Verdict,
    pub route: String,
    /// Minimum Choi eigenvalue of the pseudoinverse candidate.
    pub pseudo_choi_min: f64,
}

pub fn tetrahedral_counterexample(tol: &Tolerances) -> Result<Counterexample> {
    let (a, b) = (tetrahedral()?, tetrahedral_swap()?);
    let opts = InclusionOptions::with_tol(tol.inclusion);
    let m0 = body_included(&region_of(&b)?, &region_of(&a)?, &opts)?.margin;
    let m1 = body_included(&region_of(&a)?, &region_of(&b)?, &opts)?.margin;
    let sim = simulate(
        &b,
        &a,
        &SimulateOptions {
            tolerances: *tol,
            allow_non_real: true,
            ..SimulateOptions::default()
        },
    )?;
    Ok(Counterexample {
        margins: [m0, m1],
        synthesis: sim.status,
        route: sim.route,
        pseudo_choi_min: pseudo_map(&b, &a)?.to_choi().min_eigenvalue(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_across_regimes_and_indices() {
        let s: Vec<u64> = Regime::ALL
            .iter()
            .flat_map(|&r| (0..3).map(move |i| instance_seed(7, r, i)))
            .collect();
        let mut u = s.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), s.len());
    }

    #[test]
    fn instances_replay_from_their_seed() {
        let tol = Tolerances::default();
        let seed = instance_seed(1, Regime::Dichotomy, 4);
        let a = run_instance(Regime::Dichotomy, 4, seed, &tol).unwrap();
        let b = run_instance(Regime::Dichotomy, 4, seed, &tol).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_harness_agrees() {
        let tol = Tolerances::default();
        for regime in Regime::ALL {
            let r = equivalence_harness(regime, 4, 11, &tol).unwrap();
            assert_eq!(r.agreements, 4, "{r:#?}");
        }
    }

    #[test]
    fn thin_infeasible_dichotomy_is_decided() {
        // region margin 1.8e-3, plain alternating projections need ~3e5 steps
        let seed = instance_seed(0, Regime::Dichotomy, 71);
        let r = run_instance(Regime::Dichotomy, 71, seed, &Tolerances::default()).unwrap();
        assert_eq!(r.region, Verdict::Infeasible);
        assert!(r.agree, "{r:?}");
    }

    #[test]
    fn counterexample_holds() {
        let c = tetrahedral_counterexample(&Tolerances::default()).unwrap();
        assert!(c.margins.iter().all(|&m| m <= 1e-9), "{c:?}");
        assert_eq!(c.synthesis, Verdict::Infeasible);
        assert!(c.pseudo_choi_min <= -0.1);
    }
}

