use super::InscribedEllipse;
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::regions::RegionKind;
use crate::repr::{DeviceKind, DeviceMatrix};

/// Columns `√λ_k v_k` of the top three eigenpairs of `q`, each with its
/// first nonzero entry positive; columns beyond the rank are zero.
fn factor(q: &RMat) -> Result<RMat> {
    let n = q.nrows();
    let (w, v) = linalg::eigh_real(q);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[j].total_cmp(&w[i]));
    let scale = w.amax().max(1.0);
    if let Some(&k) = order.iter().skip(3).next() {
        if w[k] > 1e-9 * scale {
            return Err(Error::Unrealizable(format!(
                "shape has rank above 3 (eigenvalue {:.3e})",
                w[k]
            )));
        }
    }
    let mut out = RMat::zeros(n, 3);
    for (col, &k) in order.iter().take(3).enumerate() {
        if w[k] <= 1e-14 * scale {
            continue;
        }
        let mut c = v.column(k) * w[k].sqrt();
        if let Some(first) = c.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                c.neg_mut();
            }
        }
        out.set_column(col, &c);
    }
    Ok(out)
}

/// Bloch columns in the order x, z, y, so rank-two shapes give real devices.
fn to_bloch_order(f: &RMat) -> RMat {
    let n = f.nrows();
    let mut out = RMat::zeros(n, 4);
    out.set_column(1, &f.column(0));
    out.set_column(3, &f.column(1));
    out.set_column(2, &f.column(2));
    out
}

/// A qubit device whose region (or range) is the given ellipse.
///
/// For a testing region the ellipse must be centered at `u/2`, and
/// `R = 2 shape^{1/2}` gives the Bloch vectors; for a range the center
/// gives the identity components and `shape^{1/2}` the Bloch parts. The
/// leading principal axes go to `x` then `z`, so planar shapes give real
/// devices.
pub fn reconstruct_device(e: &InscribedEllipse, kind: RegionKind) -> Result<DeviceMatrix> {
    let n = e.center.len();
    if e.shape.nrows() != n || e.shape.ncols() != n {
        return Err(Error::DimensionMismatch("shape does not match the center".into()));
    }
    let unrealizable = |err: Error| Error::Unrealizable(err.to_string());
    match kind {
        RegionKind::StateTesting => {
            if e.center.iter().any(|&c| (c - 0.5).abs() > 1e-9) {
                return Err(Error::Unrealizable("testing regions are centered at u/2".into()));
            }
            let mut data = to_bloch_order(&(factor(&e.shape)? * 2.0));
            data.column_mut(0).fill(1.0);
            DeviceMatrix::from_rows(DeviceKind::StateFamily, data).map_err(unrealizable)
        }
        RegionKind::MeasurementRange => {
            let mut data = to_bloch_order(&factor(&e.shape)?);
            for (a, &c) in e.center.iter().enumerate() {
                data[(a, 0)] = c;
            }
            DeviceMatrix::from_rows(DeviceKind::Povm, data).map_err(unrealizable)
        }
    }
}

/// `ε` such that the ellipse is the range of the `ε`-depolarized trine
/// family: a circle around the barycenter of the simplex with radius
/// `ε/√6`. `None` for any other ellipse.
pub fn depolarization_factor(e: &InscribedEllipse) -> Option<f64> {
    if e.center.len() != 3 || e.center.iter().any(|&c| (c - 1.0 / 3.0).abs() > 1e-6) {
        return None;
    }
    let (w, _) = linalg::eigh_real(&e.shape);
    let mut w: Vec<f64> = w.iter().copied().collect();
    w.sort_by(f64::total_cmp);
    if w[2] <= 0.0 || (w[2] - w[1]) > 1e-4 * w[2] || w[0].abs() > 1e-9 {
        return None;
    }
    // geometric mean of the semi-axes, the most accurate radius estimate
    Some((w[1] * w[2]).sqrt().sqrt() * 6f64.sqrt())
}
