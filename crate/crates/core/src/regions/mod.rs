//! Testing regions of state families and ranges of measurements.
//!
//! Qubit regions have closed forms ([`RegionDescriptor`]); devices of any
//! supported dimension are also available as [`SpectralBody`]. Inclusion
//! between any two bodies is decided by [`body_included`].

mod body;
mod descriptor;
mod inclusion;
pub mod sweep;

pub use body::{AffineHull, ConvexBody, SpectralBody};
pub use descriptor::{measurement_range, region_of, testing_region, RegionDescriptor, RegionKind};
pub(crate) use descriptor::hull_area;
pub use inclusion::{body_included, region_included, InclusionOptions};
