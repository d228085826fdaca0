use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::repr::device::DeviceMatrix;

/// Whether a qubit device is real in some basis.
#[derive(Clone, Debug, PartialEq)]
pub enum Reality {
    /// `rotation` is a proper 3×3 Bloch rotation taking every traceless
    /// part into the `x-z` plane, where transposition acts trivially.
    Real { rotation: RMat },
    /// `witness_row` has the largest distance to the best-fit plane.
    NotReal { witness_row: usize, distance: f64 },
}

impl Reality {
    pub fn is_real(&self) -> bool {
        matches!(self, Reality::Real { .. })
    }

    pub fn into_error(self) -> Option<Error> {
        match self {
            Reality::Real { .. } => None,
            Reality::NotReal {
                witness_row,
                distance,
            } => Some(Error::NotReal {
                witness_row,
                distance,
            }),
        }
    }
}

/// Coplanarity test on the traceless Bloch parts: the device is real iff
/// they span at most a plane through the origin.
pub fn is_real_family(device: &DeviceMatrix, tol: f64) -> Result<Reality> {
    if device.ell() != 4 {
        return Err(Error::UnsupportedDimension(device.dim()));
    }
    let r = device.traceless_block();
    let scatter = r.transpose() * &r;
    let (_, vecs) = linalg::eigh_real(&scatter);
    let normal = vecs.column(0).into_owned();
    let (witness_row, distance) = (0..r.nrows())
        .map(|k| (k, r.row(k).dot(&normal.transpose()).abs()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if distance > tol {
        return Ok(Reality::NotReal {
            witness_row,
            distance,
        });
    }
    let a = vecs.column(2).into_owned();
    let b = a.cross(&normal);
    let rotation = RMat::from_rows(&[a.transpose(), normal.transpose(), b.transpose()]);
    Ok(Reality::Real { rotation })
}

/// `diag(1, R)`, acting on 4-component Bloch coordinates.
pub fn embed_rotation(rotation: &RMat) -> RMat {
    let mut out = RMat::identity(4, 4);
    out.view_mut((1, 1), (3, 3)).copy_from(rotation);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::device::DeviceKind;

    fn family(vectors: &[[f64; 3]]) -> DeviceMatrix {
        let data = RMat::from_fn(vectors.len(), 4, |i, j| {
            if j == 0 {
                1.0
            } else {
                vectors[i][j - 1]
            }
        });
        DeviceMatrix::from_rows(DeviceKind::StateFamily, data).unwrap()
    }

    #[test]
    fn any_dichotomy_is_real() {
        let d = family(&[[0.3, -0.2, 0.5], [-0.1, 0.7, 0.2]]);
        match is_real_family(&d, 1e-9).unwrap() {
            Reality::Real { rotation } => {
                assert!((rotation.determinant() - 1.0).abs() < 1e-12);
                let r = d.traceless_block() * rotation.transpose();
                assert!(r.column(1).amax() < 1e-12);
            }
            other => panic!("expected real, got {other:?}"),
        }
    }

    #[test]
    fn tetrahedron_is_not_real() {
        let s = (2.0f64).sqrt();
        let d = family(&[
            [-s / 3.0, (2.0f64 / 3.0).sqrt(), -1.0 / 3.0],
            [-s / 3.0, -(2.0f64 / 3.0).sqrt(), -1.0 / 3.0],
            [0.0, 0.0, 1.0],
            [2.0 * s / 3.0, 0.0, -1.0 / 3.0],
        ]);
        let r = is_real_family(&d, 1e-9).unwrap();
        match r {
            Reality::NotReal { distance, .. } => assert!(distance > 0.1),
            other => panic!("expected not real, got {other:?}"),
        }
    }
}
