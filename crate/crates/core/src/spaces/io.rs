use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::SphereFunction;

use super::chart::{AsymptoticChart, AsymptoticFunction};
use super::cutoff::CutoffSpec;
use super::field::{Grid, RemainderField};

pub const FIELD_FORMAT: &str = "asympheat-field/1";

/// JSON header accompanying a raw `.f64` payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub d: usize,
    pub shape: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub dtype: String,
    pub order: String,
}

fn header_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn payload_path(path: &Path) -> PathBuf {
    path.with_extension("f64")
}

/// Write `<stem>.json` and `<stem>.f64`. Any extension on `path` is replaced.
pub fn serialize_field(f: &RemainderField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let g = f.grid();
    let header = FieldHeader {
        format: FIELD_FORMAT.into(),
        d: g.dimension(),
        shape: g.shape().to_vec(),
        spacing: g.spacing(),
        origin: g.origin(),
        dtype: "f64".into(),
        order: "row-major".into(),
    };
    fs::write(header_path(path), serde_json::to_string_pretty(&header)?)?;
    let mut bytes = Vec::with_capacity(8 * f.data().len());
    for v in f.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(payload_path(path), bytes)?;
    Ok(())
}

/// Read a field written by [`serialize_field`].
pub fn deserialize_field(path: impl AsRef<Path>) -> Result<RemainderField> {
    let path = path.as_ref();
    let hp = header_path(path);
    let malformed = |reason: String| Error::MalformedHeader {
        path: hp.clone(),
        reason,
    };
    let text = fs::read_to_string(&hp)?;
    let header: FieldHeader = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    if header.format != FIELD_FORMAT {
        return Err(malformed(format!("unknown format `{}`", header.format)));
    }
    if header.dtype != "f64" || header.order != "row-major" {
        return Err(malformed(format!(
            "unsupported dtype/order `{}`/`{}`",
            header.dtype, header.order
        )));
    }
    let grid = Grid::new(header.d, header.shape.clone(), header.spacing)
        .map_err(|e| malformed(e.to_string()))?;
    let origin = grid.origin();
    if header.origin.len() != origin.len()
        || header
            .origin
            .iter()
            .zip(&origin)
            .any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()))
    {
        return Err(malformed("origin does not describe a centered box".into()));
    }
    let bytes = fs::read(payload_path(path))?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "payload has {} bytes, shape {:?} needs {}",
            bytes.len(),
            grid.shape(),
            8 * grid.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    RemainderField::new(grid, data)
}

#[derive(Serialize, Deserialize)]
struct ChartFile {
    d: usize,
    n: usize,
    #[serde(rename = "N")]
    order: usize,
    #[serde(rename = "N_star")]
    n_star: usize,
    #[serde(rename = "L_max")]
    l_max: usize,
    p: f64,
    #[serde(default)]
    m: usize,
    coeffs: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<CutoffSpec>,
}

fn chart_to_file(chart: &AsymptoticChart, cutoff: Option<CutoffSpec>) -> ChartFile {
    let l_max = chart.l_max();
    let coeffs = chart
        .ks()
        .zip(chart.coeffs())
        .map(|(k, a)| (k.to_string(), a.with_l_max(l_max).into_coeffs()))
        .collect();
    ChartFile {
        d: chart.dimension(),
        n: chart.start(),
        order: chart.order(),
        n_star: chart.n_star(),
        l_max,
        p: chart.p(),
        m: chart.m(),
        coeffs,
        cutoff,
    }
}

fn chart_from_file(file: ChartFile, path: &Path) -> Result<AsymptoticChart> {
    let malformed = |reason: String| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason,
    };
    let mut coeffs = Vec::new();
    for k in file.n..=file.n_star {
        let modes = file
            .coeffs
            .get(&k.to_string())
            .ok_or_else(|| malformed(format!("missing coefficient for k = {k}")))?;
        coeffs.push(SphereFunction::new(file.d, file.l_max, modes.clone())?);
    }
    if file.coeffs.len() != coeffs.len() {
        return Err(malformed("coefficients outside n..=N_star".into()));
    }
    let chart = AsymptoticChart::new(file.d, file.n, file.order, file.p, file.m, coeffs)?;
    if chart.n_star() != file.n_star {
        return Err(malformed(format!(
            "N_star = {} inconsistent with N = {}, d = {}, p = {}",
            file.n_star, file.order, file.d, file.p
        )));
    }
    Ok(chart)
}

pub fn write_chart(chart: &AsymptoticChart, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&chart_to_file(chart, None))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_chart(path: impl AsRef<Path>) -> Result<AsymptoticChart> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let file: ChartFile = serde_json::from_str(&text).map_err(|e| Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    chart_from_file(file, path)
}

/// Chart serialized as a JSON value (for reports).
pub fn chart_json(chart: &AsymptoticChart) -> serde_json::Value {
    serde_json::to_value(chart_to_file(chart, None)).expect("chart serializes")
}

/// Write `<dir>/<name>_chart.json` and `<dir>/<name>_remainder.{json,f64}`.
pub fn save_asymptotic(v: &AsymptoticFunction, dir: impl AsRef<Path>, name: &str) -> Result<()> {
    let dir = dir.as_ref();
    let text = serde_json::to_string_pretty(&chart_to_file(&v.chart, Some(v.cutoff)))?;
    fs::write(dir.join(format!("{name}_chart.json")), text)?;
    serialize_field(&v.remainder, dir.join(format!("{name}_remainder.json")))
}

pub fn load_asymptotic(dir: impl AsRef<Path>, name: &str) -> Result<AsymptoticFunction> {
    let dir = dir.as_ref();
    let cpath = dir.join(format!("{name}_chart.json"));
    let text = fs::read_to_string(&cpath)?;
    let file: ChartFile = serde_json::from_str(&text).map_err(|e| Error::MalformedHeader {
        path: cpath.clone(),
        reason: e.to_string(),
    })?;
    let cutoff = file.cutoff.unwrap_or_default();
    let chart = chart_from_file(file, &cpath)?;
    let remainder = deserialize_field(dir.join(format!("{name}_remainder.json")))?;
    AsymptoticFunction::new(chart, remainder, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_roundtrip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::cube(3, 6, 0.3).unwrap();
        let f = RemainderField::from_fn(g, |x| (x[0] * 1.7).sin() + x[1] * x[2] / 3.0);
        serialize_field(&f, dir.path().join("f.json")).unwrap();
        let back = deserialize_field(dir.path().join("f.json")).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_is_a_shape_error() {
        let dir = tempfile::tempdir().unwrap();
        let f = RemainderField::zeros(Grid::cube(2, 5, 1.0).unwrap());
        let p = dir.path().join("f.json");
        serialize_field(&f, &p).unwrap();
        let bytes = fs::read(dir.path().join("f.f64")).unwrap();
        fs::write(dir.path().join("f.f64"), &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(deserialize_field(&p), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn malformed_header_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.json");
        fs::write(&p, r#"{"format":"other","d":2}"#).unwrap();
        assert!(matches!(deserialize_field(&p), Err(Error::MalformedHeader { .. })));
    }
}
