//! CSV and JSON formats shared with downstream tooling.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Every JSON document carries
//! [`SCHEMA_VERSION`].
//!
//! | file | layout |
//! |------|--------|
//! | sweep CSV | header `control,level_0,…,level_{k-1},converged`; one row per grid value |
//! | spectrum CSV | header `level,energy`; one row per level |
//! | Wigner CSV | first row `p\x,x_0,…`; then `p_i,W(x_0,p_i),…` |
//! | sidecar / manifest JSON | see [`SweepSidecar`], [`SpectrumSidecar`], [`WignerJson`], [`Manifest`] |

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{SqueezingReport, WignerGrid};
use crate::scalar::Real;
use crate::spectra::{Control, ModelParams, Spectrum, SweepTable};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "nlrabi";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits.
pub fn format_number<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("not a number: `{s}`")))
}

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::InvalidParameter(format!(
            "schema version {found} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

pub fn write_sweep_csv<T: Real, W: Write>(table: &SweepTable<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["control".to_string()];
    header.extend((0..table.k).map(|i| format!("level_{i}")));
    header.push("converged".into());
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![format_number(row.control)];
        rec.extend(row.levels.iter().map(|&e| format_number(e)));
        rec.push(row.converged.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCsv {
    pub control: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
    pub converged: Vec<bool>,
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<SweepCsv> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let n = header.len();
    if n < 3 || &header[0] != "control" || &header[n - 1] != "converged" {
        return Err(Error::InvalidParameter("sweep CSV header must be control,level_0,...,converged".into()));
    }
    for (i, h) in header.iter().skip(1).take(n - 2).enumerate() {
        if h != format!("level_{i}") {
            return Err(Error::InvalidParameter(format!("unexpected sweep CSV column `{h}`")));
        }
    }
    let mut out = SweepCsv {
        control: vec![],
        levels: vec![],
        converged: vec![],
    };
    for rec in r.records() {
        let rec = rec?;
        out.control.push(parse_number(&rec[0])?);
        out.levels
            .push(rec.iter().skip(1).take(n - 2).map(parse_number).collect::<Result<_>>()?);
        out.converged.push(match &rec[n - 1] {
            "true" => true,
            "false" => false,
            other => return Err(Error::InvalidParameter(format!("bad converged flag `{other}`"))),
        });
    }
    Ok(out)
}

/// JSON companion of a sweep CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SweepSidecar<T: Real> {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub model_label: String,
    pub control: Control,
    pub params: ModelParams<T>,
    pub k: usize,
    pub tolerance: T,
    pub cutoffs: Vec<usize>,
    pub drifts: Vec<T>,
    pub converged: Vec<bool>,
    /// Canonical form of the run configuration that produced the table.
    pub config: serde_json::Value,
    /// Full table, present when the sidecar stands in for the CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<SweepTable<T>>,
}

impl<T: Real> SweepSidecar<T> {
    pub fn new(table: &SweepTable<T>, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            model_label: table.model_label.clone(),
            control: table.control,
            params: table.params.clone(),
            k: table.k,
            tolerance: table.tolerance,
            cutoffs: table.rows.iter().map(|r| r.cutoff).collect(),
            drifts: table.rows.iter().map(|r| r.drift).collect(),
            converged: table.rows.iter().map(|r| r.converged).collect(),
            config,
            table: None,
        }
    }
}

pub fn write_spectrum_csv<T: Real, W: Write>(spectrum: &Spectrum<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "energy"])?;
    for (i, &e) in spectrum.eigenvalues.iter().enumerate() {
        w.write_record([i.to_string(), format_number(e)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().collect::<Vec<_>>() != ["level", "energy"] {
        return Err(Error::InvalidParameter("spectrum CSV header must be level,energy".into()));
    }
    r.records().map(|rec| parse_number(&rec?[1])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpectrumSidecar<T: Real> {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub model_label: String,
    pub params: ModelParams<T>,
    pub spectrum: Spectrum<T>,
    pub config: serde_json::Value,
}

impl<T: Real> SpectrumSidecar<T> {
    pub fn new(params: &ModelParams<T>, spectrum: &Spectrum<T>, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            model_label: params.label(),
            params: params.clone(),
            spectrum: spectrum.clone(),
            config,
        }
    }
}

pub fn write_wigner_csv<T: Real, W: Write>(grid: &WignerGrid<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["p\\x".to_string()];
    header.extend(grid.xs.iter().map(|&x| format_number(x)));
    w.write_record(&header)?;
    for (i, &p) in grid.ps.iter().enumerate() {
        let mut rec = vec![format_number(p)];
        rec.extend(grid.values.row(i).iter().map(|&v| format_number(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed Wigner CSV; `values[(i, j)]` is `W(xs[j], ps[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerCsv {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl WignerCsv {
    /// Riemann sum of the grid.
    pub fn normalization(&self) -> f64 {
        let dx = self.xs[1] - self.xs[0];
        let dp = self.ps[1] - self.ps[0];
        self.values.sum() * dx * dp
    }
}

pub fn read_wigner_csv<R: Read>(input: R) -> Result<WignerCsv> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty Wigner CSV".into()))??;
    let xs: Vec<f64> = header.iter().skip(1).map(parse_number).collect::<Result<_>>()?;
    let mut ps = vec![];
    let mut rows = vec![];
    for rec in records {
        let rec = rec?;
        ps.push(parse_number(&rec[0])?);
        let row: Vec<f64> = rec.iter().skip(1).map(parse_number).collect::<Result<_>>()?;
        if row.len() != xs.len() {
            return Err(Error::InvalidParameter("ragged Wigner CSV".into()));
        }
        rows.extend(row);
    }
    let values = DMatrix::from_row_slice(ps.len(), xs.len(), &rows);
    Ok(WignerCsv { xs, ps, values })
}

/// JSON form of a Wigner grid. `values[i][j]` is `W(xs[j], ps[i])`; it is
/// left empty when the JSON accompanies a CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerJson {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub label: String,
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Vec<f64>>,
    pub normalization: f64,
    pub min: f64,
    pub max: f64,
    pub squeezing: Option<SqueezingReport<f64>>,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl WignerJson {
    pub fn new<T: Real>(label: &str, grid: &WignerGrid<T>, squeezing: Option<SqueezingReport<f64>>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            label: label.into(),
            xs: grid.xs.iter().map(|x| x.as_f64()).collect(),
            ps: grid.ps.iter().map(|p| p.as_f64()).collect(),
            values: (0..grid.values.nrows())
                .map(|i| grid.values.row(i).iter().map(|v| v.as_f64()).collect())
                .collect(),
            normalization: grid.normalization().as_f64(),
            min: grid.min_value().as_f64(),
            max: grid.max_value().as_f64(),
            squeezing,
            config: serde_json::Value::Null,
        }
    }

    /// Metadata only, for use next to a CSV.
    pub fn without_values(mut self) -> Self {
        self.values.clear();
        self
    }
}

/// One output file listed in a [`Manifest`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the manifest.
    pub path: String,
    /// `sweep`, `spectrum`, `wigner`, `levels`, ...
    pub kind: String,
    pub label: String,
    #[serde(default)]
    pub meta: serde_json::Value,
}

/// Index of a multi-file run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub figure: String,
    pub params: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(figure: &str, params: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            figure: figure.into(),
            params,
            files: vec![],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        if self.files.is_empty() {
            return Err(Error::InvalidParameter("manifest lists no files".into()));
        }
        Ok(())
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(v) = value.get("schema_version") {
        let found = v
            .as_u64()
            .ok_or_else(|| Error::InvalidParameter("schema_version must be an integer".into()))?;
        check_schema(found as u32)?;
    }
    Ok(serde_json::from_value(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;
    use crate::hamiltonians::{Flavor, Gauge, Nonlinearity};
    use crate::phase_space::{squeezing_report, wigner, WignerGridSpec};
    use crate::spectra::sweep;
    use proptest::prelude::*;

    fn table() -> SweepTable<f64> {
        let m = ModelParams::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.05, 0.0);
        sweep(&m, Control::Eta, &[0.0, 0.3, 0.7], 4, Some(24), 1e-6).unwrap()
    }

    #[test]
    fn sweep_csv_layout_and_round_trip() {
        let t = table();
        let mut buf = vec![];
        write_sweep_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("control,level_0,level_1,level_2,level_3,converged\n"));
        assert!(text.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,0.0000000000000000e0,"));
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back.control, t.control_values());
        for (row, parsed) in t.rows.iter().zip(&back.levels) {
            assert_eq!(&row.levels, parsed);
        }
        assert_eq!(back.converged, vec![true; 3]);
    }

    #[test]
    fn malformed_sweep_csv_is_rejected() {
        assert!(read_sweep_csv("x,level_0,converged\n1,2,true\n".as_bytes()).is_err());
        assert!(read_sweep_csv("control,level_0,converged\n1,2,maybe\n".as_bytes()).is_err());
        assert!(read_sweep_csv("control,level_1,converged\n1,2,true\n".as_bytes()).is_err());
    }

    #[test]
    fn sidecar_round_trips_bitwise() {
        let t = table();
        let side = SweepSidecar::new(&t, serde_json::json!({"k": 4}));
        let text = to_json_string(&side).unwrap();
        let back: SweepSidecar<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, side);
        assert_eq!(to_json_string(&back).unwrap(), text);
        assert_eq!(side.cutoffs, vec![24; 3]);
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let m = ModelParams::<f64>::cavity(Nonlinearity::Kerr, 0.1);
        let s = m.spectrum(4, Some(20), 1e-6).unwrap();
        let mut buf = vec![];
        write_spectrum_csv(&s, &mut buf).unwrap();
        let back = read_spectrum_csv(buf.as_slice()).unwrap();
        for (a, b) in back.iter().zip([0.0, 1.0, 2.2, 3.6]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(back, s.eigenvalues);
    }

    #[test]
    fn wigner_csv_and_json() {
        let spec = WignerGridSpec {
            x_min: -3.0,
            x_max: 3.0,
            p_min: -2.0,
            p_max: 2.0,
            resolution: 31,
        };
        let psi = StateVector::<f64>::fock(&crate::fock::SpaceDescriptor::photon(20).unwrap(), 1).unwrap();
        let g = wigner(&psi, &spec).unwrap();
        let mut buf = vec![];
        write_wigner_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p\\x,-3.0000000000000000e0,"));
        let back = read_wigner_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, g.values);
        assert_eq!(back.xs, g.xs);
        assert_eq!(back.ps, g.ps);
        assert!((back.normalization() - g.normalization()).abs() < 1e-15);

        let j = WignerJson::new("fock-1", &g, Some(squeezing_report(&psi, 1).unwrap()));
        let back: WignerJson = serde_json::from_str(&to_json_string(&j).unwrap()).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.values[5][7], g.values[(5, 7)]);
    }

    #[test]
    fn schema_version_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let mut m = Manifest::new("fig1", serde_json::json!({}));
        write_json(&path, &m).unwrap();
        let back: Manifest = read_json(&path).unwrap();
        assert!(back.validate().is_err());
        m.schema_version = 99;
        write_json(&path, &m).unwrap();
        assert!(read_json::<Manifest>(&path).is_err());
    }

    proptest! {
        #[test]
        fn number_format_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_number(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
