//! Independent ground truth: brute-force sampling of regions, fixture
//! devices and observations, and the seeded equivalence harness comparing
//! region inclusion with channel synthesis.

mod fixtures;
mod harness;
mod sample;

pub use fixtures::{
    eq_distributions, eq_probability, fixture_device, tetrahedral, tetrahedral_swap, trine, DEVICE_FIXTURES,
};
pub use harness::{
    equivalence_harness, instance_seed, run_instance, tetrahedral_counterexample, Counterexample, HarnessReport,
    InstanceRecord, Regime, BORDERLINE,
};
pub use sample::{
    brute_region, haar_unitary, hausdorff_gap, max_outside, random_channel, random_povm, random_real_qubit_family,
    random_state_family, rng_from_seed, sample_effect, sample_state, SampleCloud,
};
