//! Channel synthesis and refutation.
//!
//! Conventions: for state families `D0 = D1 C` where `C` acts on effect
//! coordinates of the target (Heisenberg picture, unit preserving); for
//! measurements `C` acts on state coordinates of the target (Schrödinger
//! picture, trace preserving). In both cases the map's input is the target
//! system and its output is the qubit source system.

mod complete;
mod engine;
mod pipeline;
mod woronowicz;

pub use complete::{
    cp_complete, cp_complete_with, dependency_transfer_check, identity_in_span, picture_for,
    pseudo_map, Dependency,
};
pub use pipeline::{simulate, SimulateOptions};
pub use woronowicz::{realify, woronowicz_split, WoronowiczSplit};

use crate::linalg::{self, RMat};
use crate::repr::{DeviceMatrix, Picture, TransferMap};
use crate::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub status: Verdict,
    /// Present iff `status` is feasible; verified CPTP and `D1 C = D0`.
    pub channel: Option<TransferMap>,
    /// `‖D1 C - D0‖_F` for a channel, otherwise the final set distance or
    /// dependency violation.
    pub residual: f64,
    /// Separating direction (Choi coordinates) or violated dependency.
    pub witness: Option<Vec<f64>>,
    pub iterations: usize,
    /// Which branch of the pipeline produced the result.
    pub route: String,
}

impl SynthesisResult {
    pub fn choi_eigenvalues(&self) -> Option<Vec<f64>> {
        self.channel.as_ref().map(|c| c.to_choi().eigenvalues())
    }
}

/// Independent check of a candidate channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verification {
    pub residual: f64,
    pub choi_min_eigenvalue: f64,
    /// Unit (Heisenberg) or trace (Schrödinger) preservation defect.
    pub normalization_defect: f64,
}

impl Verification {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.choi_min_eigenvalue >= -tol && self.normalization_defect <= tol
    }
}

pub fn verify(d0: &DeviceMatrix, d1: &DeviceMatrix, channel: &TransferMap) -> Verification {
    let residual = if channel.ell_out() == d1.ell() && channel.ell_in() == d0.ell() {
        linalg::frobenius(&(d1.data() * channel.matrix() - d0.data()))
    } else {
        f64::INFINITY
    };
    let normalization_defect = match channel.picture() {
        Picture::Heisenberg => channel.unit_preservation_defect(),
        Picture::Schrodinger => channel.trace_preservation_defect(),
    };
    Verification {
        residual,
        choi_min_eigenvalue: channel.to_choi().min_eigenvalue(),
        normalization_defect,
    }
}

fn rotate_output(c: &TransferMap, r4: &RMat) -> TransferMap {
    TransferMap::new(c.picture(), r4 * c.matrix()).expect("same shape")
}
