use serde::{Deserialize, Serialize};

/// Numerical tolerances used across the crate. All are absolute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entry of `m - m†` accepted as Hermitian.
    pub hermitian: f64,
    /// `|Tr ρ - 1|` accepted for states.
    pub trace: f64,
    /// Eigenvalue floor for positivity checks.
    pub psd: f64,
    /// `S u = u` and `M^T u = u` residuals.
    pub completeness: f64,
    /// Coordinate defect accepted for trace/unit preservation flags.
    pub map_identity: f64,
    /// Support-function margin accepted by region inclusion.
    pub inclusion: f64,
    /// Residual at which synthesis declares a channel found.
    pub feasibility: f64,
    /// Stalled set distance above which synthesis declares infeasibility.
    pub infeasibility: f64,
    /// Test of `S⁺ S u = u`.
    pub span: f64,
    /// Off-plane distance accepted for a real qubit device.
    pub reality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            completeness: 1e-12,
            map_identity: 1e-10,
            inclusion: 1e-7,
            feasibility: 1e-8,
            infeasibility: 1e-6,
            span: 1e-10,
            reality: 1e-9,
        }
    }
}

impl Tolerances {
    /// Every override must be at least `1e-14`.
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.hermitian,
            self.trace,
            self.psd,
            self.completeness,
            self.map_identity,
            self.inclusion,
            self.feasibility,
            self.infeasibility,
            self.span,
            self.reality,
        ];
        if all.iter().any(|&t| !(t >= 1e-14) || !t.is_finite()) {
            return Err(crate::Error::InvalidParameter(
                "tolerances must be finite and at least 1e-14".into(),
            ));
        }
        Ok(())
    }
}
