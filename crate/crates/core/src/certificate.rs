use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undecided,
}

impl Verdict {
    /// Process exit code: 0, 1, 2.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Feasible => 0,
            Verdict::Infeasible => 1,
            Verdict::Undecided => 2,
        }
    }
}

/// Outcome of a geometric decision, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    /// Largest violation found (e.g. `h0(w) - h1(w)`); non-positive means none.
    pub margin: f64,
    /// Direction attaining `margin`, when one was found.
    pub witness: Option<Vec<f64>>,
    pub tol: f64,
    pub seed: u64,
    pub directions: usize,
    pub method: String,
}

impl Certificate {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}
