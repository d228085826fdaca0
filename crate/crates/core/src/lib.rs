//! Channel simulability between qubit devices.
//!
//! A family of states (or a measurement) `A` simulates another family `B`
//! when some quantum channel maps `A` onto `B`. For real qubit sources this
//! is decided by comparing testing regions (or ranges), which this crate
//! computes as explicit convex bodies, and is witnessed by an explicitly
//! synthesized channel.
//!
//! Modules:
//! * [`repr`]: Bloch coordinates, devices, transfer maps and Choi matrices.
//! * [`regions`]: testing regions and ranges, support functions, inclusion.
//! * [`synth`]: channel synthesis and refutation.
//! * [`sdi`]: semi-device-independent certification from observed statistics.
//! * [`oracle`]: sampled ground truth and the equivalence harness.
//! * [`io`]: JSON file formats.

pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod regions;
pub mod repr;
pub mod sdi;
pub mod synth;

mod certificate;
mod tolerances;

pub use certificate::{Certificate, Verdict};
pub use error::{Error, Result};
pub use tolerances::Tolerances;
