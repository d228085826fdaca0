//! JSON file formats (`"format": 1`) and CSV point clouds.
//!
//! Every document is an object with `format` and `kind`. Devices list the
//! `d × d` matrix of each state or effect as `[re, im]` pairs in row-major
//! order. Objects are written with sorted keys and non-finite numbers as
//! `null`, so output is byte-for-byte reproducible.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, RMat};
use crate::oracle::SampleCloud;
use crate::regions::{RegionDescriptor, RegionKind};
use crate::repr::{DeviceKind, DeviceMatrix, Picture, TransferMap};
use crate::sdi::{InscribedEllipse, ObservationSet, ProbeKind};
use crate::synth::SynthesisResult;
use crate::{Certificate, Tolerances};
use serde_json::{json, Map, Value};

pub const FORMAT: u64 = 1;

/// A parsed input document.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Device(DeviceMatrix),
    Observations(ObservationSet),
    Region(RegionDescriptor),
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

fn as_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn f64_vec(v: &Value, path: &str) -> Result<Vec<f64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn f64_rows(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| f64_vec(x, &format!("{path}[{i}]")))
        .collect()
}

fn u64_rows(v: &Value, path: &str) -> Result<Vec<Vec<u64>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let p = format!("{path}[{i}]");
            as_array(row, &p)?
                .iter()
                .enumerate()
                .map(|(j, x)| as_u64(x, &format!("{p}[{j}]")))
                .collect()
        })
        .collect()
}

fn matrix(rows: &[Vec<f64>], path: &str) -> Result<RMat> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(schema(&format!("{path}[{i}]"), format!("expected {n} entries")));
        }
    }
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Finite numbers as JSON numbers, anything else as `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn rmat(m: &RMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| nums(&m.row(i).iter().copied().collect::<Vec<_>>()))
            .collect(),
    )
}

fn envelope(kind: &str, body: Value, tol: Option<&Tolerances>) -> Value {
    let mut obj = match body {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    obj.insert("format".into(), json!(FORMAT));
    obj.insert("kind".into(), json!(kind));
    if let Some(t) = tol {
        obj.insert("tolerances".into(), tolerances_json(t));
    }
    Value::Object(obj)
}

pub fn tolerances_json(t: &Tolerances) -> Value {
    serde_json::to_value(t).expect("tolerances serialize")
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn kind_name(kind: DeviceKind) -> &'static str {
    match kind {
        DeviceKind::StateFamily => "state-family",
        DeviceKind::Povm => "povm",
    }
}

pub fn device_json(d: &DeviceMatrix) -> Value {
    let rows: Vec<Value> = d
        .matrices()
        .iter()
        .map(|m| {
            let mut flat = Vec::new();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    flat.push(json!([clean(z.re), clean(z.im)]));
                }
            }
            Value::Array(flat)
        })
        .collect();
    envelope(
        kind_name(d.kind()),
        json!({ "dim": d.dim(), "rows": rows }),
        None,
    )
}

/// Rounds away signed zeros and last-bit noise from reconstructed entries.
fn clean(x: f64) -> f64 {
    let r = (x * 1e15).round() / 1e15;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn parse_device(obj: &Map<String, Value>, kind: DeviceKind, tol: &Tolerances) -> Result<DeviceMatrix> {
    let dim = as_u64(field(obj, "dim", "$")?, "$.dim")? as usize;
    if dim != 2 && dim != 3 {
        return Err(schema("$.dim", format!("unsupported dimension {dim}")));
    }
    let rows = as_array(field(obj, "rows", "$")?, "$.rows")?;
    if rows.is_empty() {
        return Err(schema("$.rows", "a device needs at least one element"));
    }
    let mut mats = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let p = format!("$.rows[{k}]");
        let entries = as_array(row, &p)?;
        if entries.len() != dim * dim {
            return Err(schema(&p, format!("expected {} [re, im] pairs", dim * dim)));
        }
        let mut m = CMat::zeros(dim, dim);
        for (e, pair) in entries.iter().enumerate() {
            let pp = format!("{p}[{e}]");
            let z = f64_vec(pair, &pp)?;
            if z.len() != 2 {
                return Err(schema(&pp, "expected a [re, im] pair"));
            }
            m[(e / dim, e % dim)] = c(z[0], z[1]);
        }
        mats.push(m);
    }
    let ell = dim * dim;
    let mut data = RMat::zeros(mats.len(), ell);
    for (k, m) in mats.iter().enumerate() {
        let v = crate::repr::hermitian_to_bloch(m, kind == DeviceKind::Povm)
            .map_err(|e| schema(&format!("$.rows[{k}]"), e.to_string()))?;
        for j in 0..ell {
            data[(k, j)] = v.coords[j];
        }
    }
    DeviceMatrix::from_rows_with(kind, data, tol).map_err(|e| schema("$.rows", e.to_string()))
}

pub fn observations_json(o: &ObservationSet) -> Value {
    let probe = match o.kind {
        ProbeKind::StateProbe => "state-probe",
        ProbeKind::MeasProbe => "meas-probe",
    };
    let mut body = json!({
        "probe": probe,
        "points": o.points.iter().map(|p| nums(p)).collect::<Vec<_>>(),
    });
    if let Some(counts) = &o.counts {
        body["counts"] = json!(counts);
    }
    envelope("observations", body, None)
}

fn parse_observations(obj: &Map<String, Value>) -> Result<ObservationSet> {
    let probe = match as_str(field(obj, "probe", "$")?, "$.probe")? {
        "state-probe" => ProbeKind::StateProbe,
        "meas-probe" => ProbeKind::MeasProbe,
        other => return Err(schema("$.probe", format!("unknown probe {other:?}"))),
    };
    let invalid = |e: Error| schema("$.points", e.to_string());
    if let Some(counts) = obj.get("counts") {
        if !obj.contains_key("points") {
            let counts = u64_rows(counts, "$.counts")?;
            let trials = match obj.get("trials") {
                Some(t) => Some(
                    as_array(t, "$.trials")?
                        .iter()
                        .enumerate()
                        .map(|(i, x)| as_u64(x, &format!("$.trials[{i}]")))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            return ObservationSet::from_counts(probe, counts, trials).map_err(|e| schema("$.counts", e.to_string()));
        }
    }
    let points = f64_rows(field(obj, "points", "$")?, "$.points")?;
    let mut out = match probe {
        ProbeKind::StateProbe => ObservationSet::state_probe(points),
        ProbeKind::MeasProbe => ObservationSet::meas_probe(points),
    }
    .map_err(invalid)?;
    if let Some(counts) = obj.get("counts") {
        out.counts = Some(u64_rows(counts, "$.counts")?);
    }
    Ok(out)
}

pub fn region_json(r: &RegionDescriptor, tol: &Tolerances) -> Value {
    let kind = match r.kind {
        RegionKind::StateTesting => "state-testing",
        RegionKind::MeasurementRange => "measurement-range",
    };
    let mut body = json!({
        "region": kind,
        "center": nums(&r.center),
        "shape": rmat(&r.shape),
        "apexes": r.apexes.iter().map(|a| nums(a)).collect::<Vec<_>>(),
    });
    if let Ok(area) = r.planar_area() {
        body["area"] = num(area);
    }
    envelope("region", body, Some(tol))
}

fn parse_region(obj: &Map<String, Value>) -> Result<RegionDescriptor> {
    let kind = match as_str(field(obj, "region", "$")?, "$.region")? {
        "state-testing" => RegionKind::StateTesting,
        "measurement-range" => RegionKind::MeasurementRange,
        other => return Err(schema("$.region", format!("unknown region kind {other:?}"))),
    };
    let center = f64_vec(field(obj, "center", "$")?, "$.center")?;
    let shape = matrix(&f64_rows(field(obj, "shape", "$")?, "$.shape")?, "$.shape")?;
    if shape.nrows() != center.len() {
        return Err(schema("$.shape", "shape does not match the center"));
    }
    let apexes = match obj.get("apexes") {
        Some(a) => f64_rows(a, "$.apexes")?,
        None => vec![],
    };
    let r = RegionDescriptor {
        kind,
        center,
        shape,
        apexes,
    };
    r.validate(1e-9).map_err(|e| schema("$", e.to_string()))?;
    Ok(r)
}

/// Parses any input document.
pub fn parse_document(text: &str, tol: &Tolerances) -> Result<Document> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
    let obj = as_object(&v, "$")?;
    let format = as_u64(field(obj, "format", "$")?, "$.format")?;
    if format != FORMAT {
        return Err(schema("$.format", format!("unsupported format {format}, expected {FORMAT}")));
    }
    match as_str(field(obj, "kind", "$")?, "$.kind")? {
        "state-family" => Ok(Document::Device(parse_device(obj, DeviceKind::StateFamily, tol)?)),
        "povm" => Ok(Document::Device(parse_device(obj, DeviceKind::Povm, tol)?)),
        "observations" => Ok(Document::Observations(parse_observations(obj)?)),
        "region" => Ok(Document::Region(parse_region(obj)?)),
        other => Err(schema("$.kind", format!("unknown kind {other:?}"))),
    }
}

pub fn certificate_json(c: &Certificate, tol: &Tolerances) -> Value {
    envelope(
        "certificate",
        json!({
            "verdict": c.verdict,
            "margin": num(c.margin),
            "witness": c.witness.as_ref().map(|w| nums(w)),
            "tol": num(c.tol),
            "seed": c.seed,
            "directions": c.directions,
            "method": c.method,
        }),
        Some(tol),
    )
}

pub fn transfer_json(t: &TransferMap) -> Value {
    json!({
        "picture": match t.picture() {
            Picture::Heisenberg => "heisenberg",
            Picture::Schrodinger => "schrodinger",
        },
        "matrix": rmat(&t.matrix().map(clean)),
    })
}

pub fn synthesis_json(r: &SynthesisResult, tol: &Tolerances) -> Value {
    envelope(
        "synthesis",
        json!({
            "status": r.status,
            "route": r.route,
            "residual": num(r.residual),
            "iterations": r.iterations,
            "channel": r.channel.as_ref().map(transfer_json),
            "choi_eigenvalues": r.choi_eigenvalues().map(|v| nums(&v.iter().map(|&x| clean(x)).collect::<Vec<_>>())),
            "witness": r.witness.as_ref().map(|w| nums(w)),
        }),
        Some(tol),
    )
}

pub fn ellipse_json(e: &InscribedEllipse, extra: Map<String, Value>, tol: &Tolerances) -> Value {
    let mut body = json!({
        "center": nums(&e.center),
        "shape": rmat(&e.shape),
        "log_volume": num(e.log_volume),
        "objective": num(e.objective),
        "degenerate": e.degenerate,
    });
    if let Value::Object(m) = &mut body {
        m.extend(extra);
    }
    envelope("ellipse", body, Some(tol))
}

/// Point cloud as CSV with a header `x0,x1,...`.
pub fn cloud_csv(cloud: &SampleCloud) -> String {
    let n = cloud.points.first().map_or(0, |p| p.len());
    let mut out = (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in &cloud.points {
        out.push_str(&p.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
