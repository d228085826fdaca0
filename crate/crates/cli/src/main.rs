//! Command-line front end for qubit simulability decisions.
//!
//! Exit codes: 0 feasible, 1 infeasible, 2 undecided, 3 non-real source,
//! 4 invalid input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use simula_core::io::{self, Document};
use simula_core::oracle::{self, Regime};
use simula_core::regions::{body_included, region_of, ConvexBody, InclusionOptions, RegionKind, SpectralBody};
use simula_core::repr::DeviceMatrix;
use simula_core::sdi::{self, ObservationSet};
use simula_core::synth::{simulate, SimulateOptions};
use simula_core::{Error, Tolerances};
use std::io::{Read, Write};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "simula", version, about = "Channel simulability of qubit devices")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Decision tolerance of the command (inclusion margin, synthesis
    /// residual or certification margin)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for direction sweeps and sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report entropies in bits instead of nats
    #[arg(long, global = true)]
    bits: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Testing region or range of a qubit device
    Region {
        /// Device file (stdin when omitted)
        file: Option<String>,
        /// Emit this many boundary points as CSV instead of JSON
        #[arg(long)]
        csv: Option<usize>,
    },
    /// Decide whether the first region is included in the second
    Include {
        /// Device or region file of the inner body
        inner: String,
        /// Device or region file of the outer body
        outer: String,
        /// Number of sweep directions
        #[arg(long, default_value_t = 10_000)]
        directions: usize,
    },
    /// Decide whether SOURCE simulates TARGET and synthesize the channel
    Simulate {
        target: String,
        source: String,
        /// Run on a source that is not real (no longer an exact decision)
        #[arg(long)]
        allow_non_real: bool,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Largest dichotomy testing region certified by state-probe observations
    SdiStates {
        file: Option<String>,
    },
    /// Largest measurement range certified by measurement-probe observations
    SdiMeas {
        file: Option<String>,
    },
    /// Sampled ground truth and the equivalence harness
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Print a built-in device or observation set
    Fixtures {
        name: Fixture,
        /// Depolarization parameter
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Number of probe states
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    /// Brute-force sample a device's region as CSV
    Sample {
        file: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        /// Print containment and tightness against the closed form instead
        #[arg(long)]
        summary: bool,
    },
    /// Compare region inclusion with channel synthesis on seeded instances
    Harness {
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// The tetrahedral pair on which the criterion fails for non-real sources
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Dichotomy,
    IdentitySpan,
    ThreeOutcome,
    Qutrit,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Dichotomy => Regime::Dichotomy,
            RegimeArg::IdentitySpan => Regime::IdentitySpan,
            RegimeArg::ThreeOutcome => Regime::ThreeOutcome,
            RegimeArg::Qutrit => Regime::Qutrit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Trine,
    DepolarizedTrine,
    Tetrahedral,
    TetrahedralSwap,
    EqProbability,
    EqDistributions,
}

/// What a command prints and how it exits.
struct Outcome {
    text: String,
    code: u8,
}

fn ok(text: String) -> Outcome {
    Outcome { text, code: 0 }
}

fn read_input(file: Option<&str>) -> Result<String, Error> {
    match file {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        Some(path) => Ok(std::fs::read_to_string(path)?),
    }
}

fn read_doc(file: Option<&str>, tol: &Tolerances) -> Result<Document, Error> {
    io::parse_document(&read_input(file)?, tol)
}

fn read_device(file: Option<&str>, tol: &Tolerances) -> Result<DeviceMatrix, Error> {
    match read_doc(file, tol)? {
        Document::Device(d) => Ok(d),
        _ => Err(Error::Schema {
            path: "$.kind".into(),
            message: "expected a device (state-family or povm)".into(),
        }),
    }
}

fn read_observations(file: Option<&str>, tol: &Tolerances) -> Result<ObservationSet, Error> {
    match read_doc(file, tol)? {
        Document::Observations(o) => Ok(o),
        _ => Err(Error::Schema {
            path: "$.kind".into(),
            message: "expected observations".into(),
        }),
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let c = cli.common;
    let mut tol = Tolerances::default();
    match &cli.command {
        Command::Region { file, csv } => {
            let d = read_device(file.as_deref(), &tol)?;
            let r = region_of(&d)?;
            if let Some(count) = csv {
                let cloud = oracle::SampleCloud {
                    points: r.boundary_points(*count),
                    seed: 0,
                    count: *count,
                    sampler: "support points".into(),
                };
                return Ok(ok(io::cloud_csv(&cloud)));
            }
            Ok(ok(io::render(&io::region_json(&r, &tol))))
        }
        Command::Include {
            inner,
            outer,
            directions,
        } => {
            if let Some(t) = c.tol {
                tol.inclusion = t;
            }
            tol.validate()?;
            let opts = InclusionOptions {
                seed: c.seed,
                directions: *directions,
                ..InclusionOptions::with_tol(tol.inclusion)
            };
            let a = body_of(read_doc(Some(inner), &tol)?)?;
            let b = body_of(read_doc(Some(outer), &tol)?)?;
            let cert = body_included(a.as_ref(), b.as_ref(), &opts)?;
            Ok(Outcome {
                text: io::render(&io::certificate_json(&cert, &tol)),
                code: cert.verdict.exit_code() as u8,
            })
        }
        Command::Simulate {
            target,
            source,
            allow_non_real,
            max_iter,
        } => {
            if let Some(t) = c.tol {
                tol.feasibility = t;
            }
            let d0 = read_device(Some(target), &tol)?;
            let d1 = read_device(Some(source), &tol)?;
            let opts = SimulateOptions {
                tolerances: tol,
                allow_non_real: *allow_non_real,
                max_iter: *max_iter,
            };
            let r = simulate(&d0, &d1, &opts)?;
            Ok(Outcome {
                text: io::render(&io::synthesis_json(&r, &tol)),
                code: r.status.exit_code() as u8,
            })
        }
        Command::SdiStates { file } => {
            let obs = read_observations(file.as_deref(), &tol)?;
            let certify_tol = c.tol.unwrap_or(1e-9);
            let e = sdi::max_area_centered_ellipse(&obs)?;
            let device = sdi::reconstruct_device(&e, RegionKind::StateTesting)?;
            let region = region_of(&device)?;
            let cert = sdi::certify_states(&obs, &region, certify_tol)?;
            let mut extra = Map::new();
            extra.insert("certificate".into(), io::certificate_json(&cert, &tol));
            extra.insert("region".into(), io::region_json(&region, &tol));
            extra.insert("device".into(), io::device_json(&device));
            if let Some(energy) = free_energy_of_pair(&device, c.bits)? {
                extra.insert("free_energy".into(), io::num(energy));
                extra.insert("free_energy_unit".into(), json!(if c.bits { "bits" } else { "nats" }));
            }
            Ok(Outcome {
                text: io::render(&io::ellipse_json(&e, extra, &tol)),
                code: cert.verdict.exit_code() as u8,
            })
        }
        Command::SdiMeas { file } => {
            let obs = read_observations(file.as_deref(), &tol)?;
            let e = sdi::max_volume_ellipse(&obs)?;
            let mut extra = Map::new();
            extra.insert(
                "depolarization_factor".into(),
                sdi::depolarization_factor(&e).map_or(Value::Null, io::num),
            );
            let device = sdi::reconstruct_device(&e, RegionKind::MeasurementRange)?;
            extra.insert("device".into(), io::device_json(&device));
            Ok(ok(io::render(&io::ellipse_json(&e, extra, &tol))))
        }
        Command::Oracle { action } => oracle_command(action, c, &tol),
        Command::Fixtures { name, eps, m } => {
            let v = match name {
                Fixture::Trine => io::device_json(&oracle::trine(1.0)?),
                Fixture::DepolarizedTrine => io::device_json(&oracle::trine(*eps)?),
                Fixture::Tetrahedral => io::device_json(&oracle::tetrahedral()?),
                Fixture::TetrahedralSwap => io::device_json(&oracle::tetrahedral_swap()?),
                Fixture::EqProbability => io::observations_json(&oracle::eq_probability(*eps)?),
                Fixture::EqDistributions => io::observations_json(&oracle::eq_distributions(*m)?),
            };
            Ok(ok(io::render(&v)))
        }
    }
}

/// `ln 2 - S(ρ)` for a reconstructed pair `{ρ, I/2}`.
fn free_energy_of_pair(device: &DeviceMatrix, bits: bool) -> Result<Option<f64>, Error> {
    if device.rows() != 2 || device.data().row(1).columns(1, 3).amax() > 1e-12 {
        return Ok(None);
    }
    let rho = device.row(0).to_state()?;
    sdi::free_energy(&rho, bits).map(Some)
}

fn body_of(doc: Document) -> Result<Box<dyn ConvexBody>, Error> {
    match doc {
        Document::Region(r) => Ok(Box::new(r)),
        Document::Device(d) if d.dim() == 2 => Ok(Box::new(region_of(&d)?)),
        Document::Device(d) => Ok(Box::new(SpectralBody::new(&d))),
        Document::Observations(_) => Err(Error::Schema {
            path: "$.kind".into(),
            message: "expected a device or a region".into(),
        }),
    }
}

fn oracle_command(action: &OracleAction, c: Common, tol: &Tolerances) -> Result<Outcome, Error> {
    match action {
        OracleAction::Sample {
            file,
            count,
            summary,
        } => {
            let d = read_device(file.as_deref(), tol)?;
            let cloud = oracle::brute_region(&d, *count, c.seed)?;
            if !summary {
                return Ok(ok(io::cloud_csv(&cloud)));
            }
            let mut body = json!({
                "seed": cloud.seed,
                "count": cloud.count,
                "sampler": cloud.sampler,
            });
            let gap = if d.dim() == 2 {
                let r = region_of(&d)?;
                body["max_outside"] = io::num(oracle::max_outside(&cloud, &r));
                oracle::hausdorff_gap(&r, &cloud, 10_000, c.seed)
            } else {
                oracle::hausdorff_gap(&SpectralBody::new(&d), &cloud, 10_000, c.seed)
            };
            body["hausdorff_gap"] = io::num(gap);
            body["format"] = json!(io::FORMAT);
            body["kind"] = json!("oracle-summary");
            body["tolerances"] = io::tolerances_json(tol);
            Ok(ok(io::render(&body)))
        }
        OracleAction::Harness { regime, count } => {
            let regimes: Vec<Regime> = match regime {
                Some(r) => vec![(*r).into()],
                None => Regime::ALL.to_vec(),
            };
            let mut reports = Vec::new();
            let mut all_agree = true;
            for r in regimes {
                let rep = oracle::equivalence_harness(r, *count, c.seed, tol)?;
                all_agree &= rep.agreements == rep.instances.len();
                reports.push(serde_json::to_value(&rep)?);
            }
            let body = json!({
                "format": io::FORMAT,
                "kind": "harness",
                "reports": reports,
                "tolerances": io::tolerances_json(tol),
            });
            Ok(Outcome {
                text: io::render(&body),
                code: if all_agree { 0 } else { 1 },
            })
        }
        OracleAction::Counterexample => {
            let ce = oracle::tetrahedral_counterexample(tol)?;
            let mut body = serde_json::to_value(&ce)?;
            body["format"] = json!(io::FORMAT);
            body["kind"] = json!("counterexample");
            body["tolerances"] = io::tolerances_json(tol);
            Ok(ok(io::render(&body)))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NotReal { .. } => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
