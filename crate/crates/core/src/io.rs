//! File formats: point CSVs, measure JSON and the two bifiltration JSONs.
//!
//! Every JSON document carries `"schema": "bistable/1"`. Readers accept
//! documents without it.

use std::io::Read;
use std::path::Path;

use crate::complexes::degree::FLAG_KIND;
use crate::complexes::{BifilteredComplex, DegreeRips};
use crate::error::{Error, Result};
use crate::homology::Bifiltration;
use crate::measures::EmpiricalMeasure;
use crate::metric::{Metric, PointCloud};

pub const SCHEMA: &str = "bistable/1";

/// How the last CSV column is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultColumn {
    /// A multiplicity column only when the header names it `mult`.
    #[default]
    Auto,
    Always,
    Never,
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.get(0).is_some_and(|t| t.trim().parse::<f64>().is_err())
}

/// Reads `x1,…,xd[,mult]` rows. A first line whose first field is not a
/// number is a header. Blank lines are skipped.
pub fn read_points_csv<R: Read>(reader: R, metric: Metric, mult: MultColumn) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut has_mult = mult == MultColumn::Always;
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if line == 0 && is_header(&record) {
            let last = record.iter().last().unwrap_or("").to_ascii_lowercase();
            if mult == MultColumn::Auto {
                has_mult = last == "mult" || last == "multiplicity";
            }
            continue;
        }
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: `{f}` is not a number", line + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !has_mult {
        return PointCloud::new(rows, metric);
    }
    let mut mults = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter_mut().enumerate() {
        let m = row.pop().ok_or_else(|| Error::Parse(format!("row {} is empty", i + 1)))?;
        if m < 1.0 || m.fract() != 0.0 {
            return Err(Error::Parse(format!("row {}: multiplicity {m} is not a positive integer", i + 1)));
        }
        mults.push(m as usize);
    }
    PointCloud::with_multiplicities(rows, mults, metric)
}

pub fn read_points_file(path: &Path, metric: Metric, mult: MultColumn) -> Result<PointCloud> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_points_csv(file, metric, mult)
}

/// Writes the cloud with a header; the `mult` column appears only when some
/// multiplicity exceeds one.
pub fn points_to_csv(cloud: &PointCloud) -> String {
    let with_mult = cloud.multiplicities().iter().any(|&m| m > 1);
    let mut header: Vec<String> = (1..=cloud.dim()).map(|i| format!("x{i}")).collect();
    if with_mult {
        header.push("mult".into());
    }
    let mut out = header.join(",") + "\n";
    for i in 0..cloud.len() {
        let mut fields: Vec<String> = cloud.point(i).iter().map(|x| x.to_string()).collect();
        if with_mult {
            fields.push(cloud.multiplicities()[i].to_string());
        }
        out += &(fields.join(",") + "\n");
    }
    out
}

pub fn measure_to_json(mu: &EmpiricalMeasure) -> serde_json::Value {
    serde_json::json!({ "schema": SCHEMA, "atoms": mu.atoms, "weights": mu.weights })
}

pub fn measure_from_json(value: &serde_json::Value) -> Result<EmpiricalMeasure> {
    #[derive(serde::Deserialize)]
    struct Doc {
        atoms: Vec<usize>,
        weights: Vec<f64>,
    }
    let doc: Doc = serde_json::from_value(value.clone())?;
    if doc.atoms.is_empty() {
        return Err(Error::EmptyInput);
    }
    EmpiricalMeasure::new(doc.atoms, doc.weights)
}

pub fn read_json_file(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(serde_json::from_str(&text)?)
}

/// Either bifiltration representation, as read from JSON.
#[derive(Debug, Clone)]
pub enum AnyBifiltration {
    Explicit(BifilteredComplex),
    Flag(DegreeRips),
}

impl AnyBifiltration {
    /// Documents with `"kind": "degree-rips-flag"` are flag JSON, all
    /// others the explicit simplex list.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value.get("kind").and_then(|k| k.as_str()) {
            Some(FLAG_KIND) => Ok(AnyBifiltration::Flag(DegreeRips::from_json(value)?)),
            _ => Ok(AnyBifiltration::Explicit(BifilteredComplex::from_json(value)?)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            AnyBifiltration::Explicit(b) => b.to_json(),
            AnyBifiltration::Flag(d) => d.to_json(),
        }
    }

    /// Largest finite radius among grades and edges; grids built from it
    /// cover every appearance.
    pub fn max_radius(&self) -> f64 {
        let finite = |r: f64| if r.is_finite() { r } else { 0.0 };
        match self {
            AnyBifiltration::Explicit(b) => {
                (0..b.len()).flat_map(|i| b.grades(i)).map(|g| finite(g.r)).fold(0.0, f64::max)
            }
            AnyBifiltration::Flag(d) => {
                let n = d.len();
                let edges = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| finite(d.edge_radius(u, v)));
                let vertices = (0..n).flat_map(|v| d.vertex_grades(v)).map(|g| finite(g.r));
                edges.chain(vertices).fold(0.0, f64::max)
            }
        }
    }

    pub fn as_dyn(&self) -> &(dyn Bifiltration + Send + Sync) {
        match self {
            AnyBifiltration::Explicit(b) => b,
            AnyBifiltration::Flag(d) => d,
        }
    }
}
