//! States, effects, devices and linear maps in generalized Bloch coordinates.

pub mod basis;
mod device;
mod real;
mod state;
mod transfer;

pub use device::{DeviceKind, DeviceMatrix};
pub use real::{embed_rotation, is_real_family, Reality};
pub use state::{hermitian_to_bloch, BlochVector, DensityMatrix, Effect};
pub use transfer::{BlockPositivity, ChoiMatrix, MapFlags, Picture, TransferMap};
