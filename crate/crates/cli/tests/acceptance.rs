//! Acceptance suite: one pass/fail line per criterion, exit status 1 when
//! any criterion fails.

use simula_core::io::{self, Document};
use simula_core::oracle::{
    brute_region, eq_probability, equivalence_harness, hausdorff_gap, max_outside, random_channel,
    random_real_qubit_family, rng_from_seed, tetrahedral, tetrahedral_counterexample, tetrahedral_swap, trine,
    Regime,
};
use simula_core::regions::region_of;
use simula_core::repr::{DensityMatrix, DeviceMatrix, Picture, TransferMap};
use simula_core::sdi;
use simula_core::synth::{realify, woronowicz_split};
use simula_core::{Tolerances, Verdict};
use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

const FACTOR_TOL: f64 = 1e-6;
const FACTOR_SECONDS: f64 = 5.0;
const SUPPORT_TOL: f64 = 1e-8;
const INCLUSION_MARGIN: f64 = 1e-9;
const CHOI_MIN: f64 = -0.1;
const HARNESS_COUNT: usize = 100;
const HARNESS_SECONDS: f64 = 120.0;
const ROUND_TRIPS: usize = 100;
const RESIDUAL_TOL: f64 = 1e-8;
const CLOUD_SIZE: usize = 100_000;
const OUTSIDE_TOL: f64 = 1e-9;
const HAUSDORFF_TOL: f64 = 2e-3;
const HAUSDORFF_DIRECTIONS: usize = 2000;
const GRID: usize = 50;
const R2_MIN: f64 = 1.0 - 1e-10;

struct Check {
    pass: bool,
    detail: String,
}

fn simula(args: &[&str], stdin: &str) -> Result<String, String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_simula"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn field(text: &str, key: &str) -> Result<serde_json::Value, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    Ok(v[key].clone())
}

fn trine_factor() -> Result<Check, String> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [3usize, 4, 5, 6, 12] {
        let obs = simula(&["fixtures", "eq-distributions", "--m", &m.to_string()], "")?;
        let out = simula(&["sdi-meas"], &obs)?;
        let eps = field(&out, "depolarization_factor")?
            .as_f64()
            .ok_or(format!("m = {m}: no depolarization factor"))?;
        worst = worst.max((eps - (PI / m as f64).cos()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Check {
        pass: worst <= FACTOR_TOL && secs < FACTOR_SECONDS,
        detail: format!("max |eps - cos(pi/m)| = {worst:.2e} (tol {FACTOR_TOL:.0e}), {secs:.2} s (limit {FACTOR_SECONDS} s)"),
    })
}

fn dichotomy_sdi() -> Result<Check, String> {
    let tol = Tolerances::default();
    let mut worst_support: f64 = 0.0;
    let mut worst_state: f64 = 0.0;
    for eps in [0.1, 0.5, 0.9] {
        let obs = io::render(&io::observations_json(&eq_probability(eps).map_err(|e| e.to_string())?));
        let out = simula(&["sdi-states"], &obs)?;
        let device = match io::parse_document(&field(&out, "device")?.to_string(), &tol).map_err(|e| e.to_string())? {
            Document::Device(d) => d,
            _ => return Err("sdi-states did not return a device".into()),
        };
        // {D_eps(phi), I/2}: first Bloch radius eps, second the centre
        let first = device.data().row(0).columns(1, 3).norm();
        let second = device.data().row(1).columns(1, 3).norm();
        worst_state = worst_state.max((first - eps).abs()).max(second);
        let region = region_of(&device).map_err(|e| e.to_string())?;
        let q0 = [0.5 * (1.0 - eps), 0.5];
        let verts = [[0.0, 0.0], [1.0, 1.0], q0, [1.0 - q0[0], 1.0 - q0[1]]];
        for k in 0..3600 {
            let th = 2.0 * PI * k as f64 / 3600.0;
            let w = [th.cos(), th.sin()];
            let hull = verts.iter().map(|v| v[0] * w[0] + v[1] * w[1]).fold(f64::NEG_INFINITY, f64::max);
            worst_support = worst_support.max((region.support(&w) - hull).abs());
        }
    }
    Ok(Check {
        pass: worst_support <= SUPPORT_TOL && worst_state <= SUPPORT_TOL,
        detail: format!(
            "support gap {worst_support:.2e}, state error {worst_state:.2e} over 3600 directions (tol {SUPPORT_TOL:.0e})"
        ),
    })
}

fn swap_fixture() -> Result<Check, String> {
    let ce = tetrahedral_counterexample(&Tolerances::default()).map_err(|e| e.to_string())?;
    let inclusion = ce.margins.iter().all(|&m| m <= INCLUSION_MARGIN);
    Ok(Check {
        pass: inclusion && ce.synthesis == Verdict::Infeasible && ce.pseudo_choi_min <= CHOI_MIN,
        detail: format!(
            "margins [{:.1e}, {:.1e}] (tol {INCLUSION_MARGIN:.0e}), synthesis {:?} via {}, pseudo-inverse Choi min {:.4} (need <= {CHOI_MIN})",
            ce.margins[0], ce.margins[1], ce.synthesis, ce.route, ce.pseudo_choi_min
        ),
    })
}

fn harness() -> Result<Check, String> {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    let mut all = true;
    for regime in Regime::ALL {
        let rep = equivalence_harness(regime, HARNESS_COUNT, 0, &tol).map_err(|e| e.to_string())?;
        all &= rep.agreements == HARNESS_COUNT;
        parts.push(format!("{regime:?} {}/{}", rep.agreements, HARNESS_COUNT));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Check {
        pass: all && secs < HARNESS_SECONDS,
        detail: format!("{}, {secs:.1} s (limit {HARNESS_SECONDS} s)", parts.join(", ")),
    })
}

fn woronowicz() -> Result<Check, String> {
    let tol = Tolerances::default();
    let mut rng = rng_from_seed(2024);
    let mut worst_split: f64 = 0.0;
    let mut worst_real: f64 = 0.0;
    for i in 0..ROUND_TRIPS {
        let p = (i as f64 + 0.5) / ROUND_TRIPS as f64;
        let a = random_channel(2, 2, Picture::Heisenberg, &mut rng).map_err(|e| e.to_string())?;
        let b = random_channel(2, 2, Picture::Heisenberg, &mut rng).map_err(|e| e.to_string())?;
        let mixed = TransferMap::new(
            Picture::Heisenberg,
            a.matrix() * p + b.transpose_output().matrix() * (1.0 - p),
        )
        .map_err(|e| e.to_string())?;
        let split = woronowicz_split(&mixed, &tol).map_err(|e| e.to_string())?;
        let rebuilt = split.c0.matrix() * split.p + split.c1.transpose_output().matrix() * (1.0 - split.p);
        let psd = split.c0.to_choi().min_eigenvalue().min(split.c1.to_choi().min_eigenvalue());
        worst_split = worst_split.max((rebuilt - mixed.matrix()).norm()).max(-psd);
        let real = realify(split.p, &split.c0, &split.c1).map_err(|e| e.to_string())?;
        let family = random_real_qubit_family(4, &mut rng).map_err(|e| e.to_string())?;
        worst_real = worst_real.max((family.data() * real.matrix() - family.data() * mixed.matrix()).norm());
    }
    Ok(Check {
        pass: worst_split <= RESIDUAL_TOL && worst_real <= RESIDUAL_TOL,
        detail: format!(
            "{ROUND_TRIPS} round trips: split residual {worst_split:.2e}, realify residual {worst_real:.2e} (tol {RESIDUAL_TOL:.0e})"
        ),
    })
}

fn oracle_convergence() -> Result<Check, String> {
    let start = Instant::now();
    let mut rng = rng_from_seed(7);
    let devices: Vec<(&str, DeviceMatrix)> = vec![
        ("trine", trine(1.0).map_err(|e| e.to_string())?),
        ("depolarized trine", trine(0.5).map_err(|e| e.to_string())?),
        ("tetrahedral", tetrahedral().map_err(|e| e.to_string())?),
        ("tetrahedral-swap", tetrahedral_swap().map_err(|e| e.to_string())?),
        ("real pair", random_real_qubit_family(2, &mut rng).map_err(|e| e.to_string())?),
    ];
    let mut worst_out = f64::NEG_INFINITY;
    let mut worst_gap: f64 = 0.0;
    for (i, (_, d)) in devices.iter().enumerate() {
        let r = region_of(d).map_err(|e| e.to_string())?;
        let cloud = brute_region(d, CLOUD_SIZE, i as u64).map_err(|e| e.to_string())?;
        worst_out = worst_out.max(max_outside(&cloud, &r));
        worst_gap = worst_gap.max(hausdorff_gap(&r, &cloud, HAUSDORFF_DIRECTIONS, i as u64));
    }
    let names: Vec<&str> = devices.iter().map(|(n, _)| *n).collect();
    Ok(Check {
        pass: worst_out <= OUTSIDE_TOL && worst_gap <= HAUSDORFF_TOL,
        detail: format!(
            "{} at {CLOUD_SIZE} samples: max outside {worst_out:.1e} (tol {OUTSIDE_TOL:.0e}), hausdorff {worst_gap:.2e} over {HAUSDORFF_DIRECTIONS} directions (tol {HAUSDORFF_TOL:.0e}), {:.1} s",
            names.join(", "),
            start.elapsed().as_secs_f64()
        ),
    })
}

fn free_energy() -> Result<Check, String> {
    let mut energies = Vec::with_capacity(GRID);
    let mut areas = Vec::with_capacity(GRID);
    let grid: Vec<f64> = (0..GRID).map(|k| 0.5 * k as f64 / (GRID - 1) as f64).collect();
    for &a in &grid {
        // Bloch radius 2a in the real plane
        let rho = simula_core::repr::BlochVector::new(vec![1.0, 2.0 * a, 0.0, 0.0])
            .to_state()
            .map_err(|e| e.to_string())?;
        let mixed = DensityMatrix::maximally_mixed(2).map_err(|e| e.to_string())?;
        let pair = DeviceMatrix::state_family(&[rho.clone(), mixed]).map_err(|e| e.to_string())?;
        energies.push(sdi::free_energy(&rho, false).map_err(|e| e.to_string())?);
        areas.push(region_of(&pair).and_then(|r| r.planar_area()).map_err(|e| e.to_string())?);
    }
    let increasing = energies.windows(2).all(|w| w[1] > w[0]);
    let n = GRID as f64;
    let (mx, my) = (grid.iter().sum::<f64>() / n, areas.iter().sum::<f64>() / n);
    let sxy: f64 = grid.iter().zip(&areas).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = grid.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = grid
        .iter()
        .zip(&areas)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let ss_tot: f64 = areas.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    Ok(Check {
        pass: increasing && r2 >= R2_MIN,
        detail: format!(
            "{GRID} grid points: free energy strictly increasing = {increasing}, area slope {slope:.6}, 1 - R^2 = {:.1e} (need <= 1e-10)",
            1.0 - r2
        ),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Check, String>); 7] = [
        ("trine depolarization factor", trine_factor),
        ("dichotomy reconstruction", dichotomy_sdi),
        ("tetrahedral-swap fixture", swap_fixture),
        ("equivalence harness", harness),
        ("woronowicz round trip", woronowicz),
        ("oracle convergence", oracle_convergence),
        ("free energy", free_energy),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(c) => (c.pass, c.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("[{}] {}: {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
