use super::complete::{
    cp_complete_with, dependency_transfer_check, identity_in_span, picture_for, pseudo_map, Dependency,
};
use super::woronowicz::{realify, woronowicz_split};
use super::{rotate_output, verify, SynthesisResult};
use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::repr::{embed_rotation, is_real_family, DeviceKind, DeviceMatrix, Reality, TransferMap};
use crate::{Tolerances, Verdict};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulateOptions {
    pub tolerances: Tolerances,
    /// Run on a non-real source instead of refusing (the decision is then
    /// no longer backed by region inclusion).
    pub allow_non_real: bool,
    pub max_iter: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            allow_non_real: false,
            max_iter: 100_000,
        }
    }
}

/// Decides whether `d1` simulates `d0` and returns a verified channel when
/// it does.
///
/// Pipeline: dependency transfer; then, if the identity is in the span of
/// the source, the pseudoinverse candidate, repaired by a Woronowicz split
/// when it is not completely positive; otherwise the dichotomy reduction.
/// CP completion is the fallback of every branch, and every returned
/// channel is re-verified.
pub fn simulate(d0: &DeviceMatrix, d1: &DeviceMatrix, opts: &SimulateOptions) -> Result<SynthesisResult> {
    let tol = &opts.tolerances;
    tol.validate()?;
    if d1.dim() != 2 {
        return Err(Error::Hypothesis(format!(
            "the source must be a qubit device, got dimension {}",
            d1.dim()
        )));
    }
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
    let r4 = match is_real_family(d1, tol.reality)? {
        Reality::Real { rotation } => embed_rotation(&rotation),
        reality @ Reality::NotReal { .. } => {
            if !opts.allow_non_real {
                return Err(reality.into_error().expect("not real"));
            }
            RMat::identity(4, 4)
        }
    };
    if d0.dim() == d1.dim() && (d0.data() - d1.data()).norm() <= tol.feasibility {
        let identity = TransferMap::identity(d1.dim(), picture_for(d1.kind()))?;
        return Ok(finish(d0, d1, identity, 0, "identity"));
    }
    let spans_identity = d1.kind() == DeviceKind::Povm || identity_in_span(d1, tol.span);
    if d0.dim() == 3 && !spans_identity {
        return Err(Error::Hypothesis(
            "qutrit targets need the identity in the span of the source states".into(),
        ));
    }

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

    let picture = picture_for(d1.kind());
    let mut iterations = 0;
    if spans_identity {
        let candidate = pseudo_map(d0, d1)?;
        let check = verify(d0, d1, &candidate);
        if check.passes(tol.feasibility) {
            return Ok(finish(d0, d1, candidate, 0, "pseudo-inverse"));
        }
        // split in the basis where the source is real
        let rotated = rotate_output(&candidate, &r4);
        if let Ok(split) = woronowicz_split(&rotated, tol) {
            iterations += split.iterations;
            let real = realify(split.p, &split.c0, &split.c1)?;
            let channel = rotate_output(&real, &r4.transpose());
            if verify(d0, d1, &channel).passes(tol.feasibility) {
                return Ok(finish(d0, d1, channel, iterations, "woronowicz"));
            }
        }
    } else {
        let keep = dichotomy_representatives(d1);
        let (s0, s1) = (d0.select_rows(&keep), d1.select_rows(&keep));
        let reduced = cp_complete_with(&s0, &s1, picture, tol, opts.max_iter)?;
        iterations += reduced.iterations;
        match (reduced.status, reduced.channel) {
            (Verdict::Feasible, Some(channel)) => {
                if verify(d0, d1, &channel).passes(tol.feasibility) {
                    return Ok(finish(d0, d1, channel, iterations, "dichotomy"));
                }
            }
            (Verdict::Infeasible, _) => {
                return Ok(SynthesisResult {
                    iterations,
                    route: "dichotomy".into(),
                    ..reduced_result(reduced.residual, reduced.witness, Verdict::Infeasible)
                })
            }
            _ => {}
        }
    }

    let full = cp_complete_with(d0, d1, picture, tol, opts.max_iter)?;
    iterations += full.iterations;
    match (full.status, full.channel) {
        (Verdict::Feasible, Some(channel)) => {
            if verify(d0, d1, &channel).passes(tol.feasibility) {
                Ok(finish(d0, d1, channel, iterations, "cp-completion"))
            } else {
                Ok(SynthesisResult {
                    iterations,
                    route: "cp-completion (verification failed)".into(),
                    ..reduced_result(full.residual, None, Verdict::Undecided)
                })
            }
        }
        (status, _) => Ok(SynthesisResult {
            iterations,
            route: full.route,
            ..reduced_result(full.residual, full.witness, status)
        }),
    }
}

fn reduced_result(residual: f64, witness: Option<Vec<f64>>, status: Verdict) -> SynthesisResult {
    SynthesisResult {
        status,
        channel: None,
        residual,
        witness,
        iterations: 0,
        route: String::new(),
    }
}

fn finish(
    d0: &DeviceMatrix,
    d1: &DeviceMatrix,
    channel: crate::repr::TransferMap,
    iterations: usize,
    route: &str,
) -> SynthesisResult {
    let residual = verify(d0, d1, &channel).residual;
    SynthesisResult {
        status: Verdict::Feasible,
        channel: Some(channel),
        residual,
        witness: None,
        iterations,
        route: route.into(),
    }
}

/// The two rows with the largest distance between traceless parts, or a
/// single row when all rows coincide.
fn dichotomy_representatives(d: &DeviceMatrix) -> Vec<usize> {
    let t = d.traceless_block();
    let mut best = (0.0, 0, 0);
    for i in 0..d.rows() {
        for j in (i + 1)..d.rows() {
            let dist = (t.row(i) - t.row(j)).norm();
            if dist > best.0 {
                best = (dist, i, j);
            }
        }
    }
    if best.0 <= 1e-12 {
        vec![0]
    } else {
        vec![best.1, best.2]
    }
}
