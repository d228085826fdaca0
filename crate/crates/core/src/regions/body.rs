use super::descriptor::{RegionDescriptor, RegionKind};
use crate::linalg::{self, CMat, RMat};
use crate::repr::{DeviceKind, DeviceMatrix};

/// `point + span(directions)`, with orthonormal direction columns.
#[derive(Clone, Debug)]
pub struct AffineHull {
    pub point: Vec<f64>,
    pub directions: RMat,
}

/// A compact convex body given by its support function.
pub trait ConvexBody {
    fn ambient(&self) -> usize;

    /// `h(w) = max_{x ∈ K} w·x`.
    fn support(&self, w: &[f64]) -> f64;

    fn affine_hull(&self) -> AffineHull;

    /// The closed-form descriptor, when the body has one.
    fn descriptor(&self) -> Option<&RegionDescriptor> {
        None
    }
}

pub(crate) const SPAN_CUT: f64 = 1e-10;

impl ConvexBody for RegionDescriptor {
    fn ambient(&self) -> usize {
        RegionDescriptor::ambient(self)
    }

    fn support(&self, w: &[f64]) -> f64 {
        RegionDescriptor::support(self, w)
    }

    fn affine_hull(&self) -> AffineHull {
        let n = RegionDescriptor::ambient(self);
        let axes = linalg::sqrt_psd(&self.shape);
        match self.kind {
            RegionKind::MeasurementRange => AffineHull {
                point: self.center.clone(),
                directions: linalg::range_basis(&axes, SPAN_CUT),
            },
            RegionKind::StateTesting => {
                let mut m = RMat::zeros(n, n + 1);
                m.view_mut((0, 0), (n, n)).copy_from(&axes);
                m.column_mut(n).fill(1.0);
                AffineHull {
                    point: vec![0.0; n],
                    directions: linalg::range_basis(&m, SPAN_CUT),
                }
            }
        }
    }

    fn descriptor(&self) -> Option<&RegionDescriptor> {
        Some(self)
    }
}

/// Testing region or range of a device of any supported dimension, through
/// its spectral support function.
///
/// For states `h(w)` is the sum of the positive eigenvalues of `Σ w_x ρ_x`
/// (attained by the projector onto the positive part); for measurements it
/// is `λ_max(Σ w_a π_a)` (attained by a top eigenvector).
#[derive(Clone, Debug)]
pub struct SpectralBody {
    kind: DeviceKind,
    data: RMat,
    operators: Vec<CMat>,
}

impl SpectralBody {
    pub fn new(device: &DeviceMatrix) -> Self {
        Self {
            kind: device.kind(),
            data: device.data().clone(),
            operators: device.matrices(),
        }
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }

    fn weighted(&self, w: &[f64]) -> CMat {
        let d = self.operators[0].nrows();
        let mut m = CMat::zeros(d, d);
        for (op, &x) in self.operators.iter().zip(w) {
            m += op * linalg::c(x, 0.0);
        }
        m
    }
}

impl ConvexBody for SpectralBody {
    fn ambient(&self) -> usize {
        self.operators.len()
    }

    fn support(&self, w: &[f64]) -> f64 {
        let (vals, _) = linalg::eigh(&self.weighted(w));
        match self.kind {
            DeviceKind::StateFamily => vals.iter().filter(|&&v| v > 0.0).sum(),
            DeviceKind::Povm => vals[vals.len() - 1],
        }
    }

    fn affine_hull(&self) -> AffineHull {
        let n = self.data.nrows();
        match self.kind {
            DeviceKind::StateFamily => AffineHull {
                point: vec![0.0; n],
                directions: linalg::range_basis(&self.data, SPAN_CUT),
            },
            DeviceKind::Povm => {
                let rest = self.data.columns(1, self.data.ncols() - 1).into_owned();
                AffineHull {
                    point: self.data.column(0).iter().copied().collect(),
                    directions: linalg::range_basis(&rest, SPAN_CUT),
                }
            }
        }
    }
}
