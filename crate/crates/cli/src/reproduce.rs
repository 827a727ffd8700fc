//! Figure data: sweep CSVs or Wigner grids plus a `manifest.json` per figure.

use std::path::Path;

use nlrabi::io::{write_sweep_csv, write_wigner_csv, Manifest, ManifestEntry, SweepSidecar};
use nlrabi::phase_space::{eigenstate_panel, wigner, WignerGridSpec};
use nlrabi::spectra::{
    linspace, renormalized_threshold, sweep, Control, ModelParams, CAVITY_CUTOFF, CONVERGENCE_TOLERANCE,
};
use nlrabi::{Flavor, Gauge, Nonlinearity};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{prepare_dir, write_bytes, write_json_file};
use crate::config::Settings;
use crate::failure::Failure;
use crate::ReproduceArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Fig1,
    WignerPanel,
    SpectraNaiveVsCorrected,
    SpectraGaugeConsistent,
}

impl Figure {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fig1" => Some(Figure::Fig1),
            "fig2" | "wigner-panel" => Some(Figure::WignerPanel),
            "fig3" | "spectra-naive-vs-corrected" => Some(Figure::SpectraNaiveVsCorrected),
            "fig4" | "spectra-gauge-consistent" => Some(Figure::SpectraGaugeConsistent),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::WignerPanel => "wigner-panel",
            Figure::SpectraNaiveVsCorrected => "spectra-naive-vs-corrected",
            Figure::SpectraGaugeConsistent => "spectra-gauge-consistent",
        }
    }
}

/// Resolved settings of one `reproduce` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceConfig {
    pub command: String,
    pub figure: Figure,
    #[serde(rename = "J")]
    pub js: Vec<f64>,
    pub points: usize,
    pub eta_max: f64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub renormalize: bool,
    pub resolution: usize,
    pub omega_q: f64,
}

const KEYS: [&str; 9] = ["figure", "J", "points", "eta_max", "k", "cutoff", "renormalize", "resolution", "omega_q"];

fn resolve(a: &ReproduceArgs, s: &Settings) -> Result<ReproduceConfig, Failure> {
    let figure = Figure::parse(&a.figure).ok_or_else(|| {
        Failure::usage(format!(
            "unknown figure `{}` (expected fig1, fig2, fig3, fig4, wigner-panel, spectra-naive-vs-corrected or spectra-gauge-consistent)",
            a.figure
        ))
    })?;
    s.expect_keys("reproduce", &KEYS)?;
    let js = match s.raw("J").filter(|_| a.j.is_none()) {
        // a sidecar stores the list as JSON
        Some(raw) if raw.starts_with('[') => serde_json::from_str(raw)
            .map_err(|e| Failure::usage(format!("bad J list `{raw}`: {e}")))?,
        _ => match s.pick_opt(a.j, "J")? {
            Some(j) => vec![j],
            None => vec![0.05, 0.1],
        },
    };
    let (points, k) = match figure {
        Figure::Fig1 => (101, 4),
        _ => (121, 6),
    };
    let cfg = ReproduceConfig {
        command: "reproduce".into(),
        figure,
        js,
        points: s.pick(a.points, "points", points)?,
        eta_max: s.pick(a.eta_max, "eta_max", 3.0)?,
        k: s.pick(a.k, "k", k)?,
        cutoff: s.pick_opt(a.cutoff, "cutoff")?,
        renormalize: s.pick(a.renormalize, "renormalize", false)?,
        resolution: s.pick(a.resolution, "resolution", WignerGridSpec::<f64>::default().resolution)?,
        omega_q: 1.0,
    };
    if cfg.points == 0 || cfg.k == 0 {
        return Err(Failure::usage("points and k must be at least 1"));
    }
    Ok(cfg)
}

pub fn run(s: &Settings, out: &Path, a: &ReproduceArgs) -> Result<(), Failure> {
    let cfg = resolve(a, s)?;
    let dir = out.join(cfg.figure.name());
    prepare_dir(&dir)?;
    let mut manifest = Manifest::new(cfg.figure.name(), serde_json::to_value(&cfg).expect("config serializes"));
    let unconverged = match cfg.figure {
        Figure::Fig1 => fig1(&cfg, &dir, &mut manifest)?,
        Figure::WignerPanel => wigner_panel(&cfg, &dir, &mut manifest)?,
        Figure::SpectraNaiveVsCorrected => spectra(
            &cfg,
            &dir,
            &mut manifest,
            &[
                (Flavor::Naive, Nonlinearity::Minus),
                (Flavor::Naive, Nonlinearity::Kerr),
                (Flavor::Corrected, Nonlinearity::Minus),
            ],
        )?,
        Figure::SpectraGaugeConsistent => spectra(
            &cfg,
            &dir,
            &mut manifest,
            &[
                (Flavor::Corrected, Nonlinearity::Plus),
                (Flavor::Corrected, Nonlinearity::Minus),
                (Flavor::Corrected, Nonlinearity::Kerr),
            ],
        )?,
    };
    write_json_file(&dir.join("manifest.json"), &manifest)?;
    println!("{}: {} files in {}", cfg.figure.name(), manifest.files.len(), dir.display());
    if unconverged > 0 {
        return Err(Failure::numerical(format!("{unconverged} sweep rows not converged; raise --cutoff")));
    }
    Ok(())
}

/// Writes one sweep CSV and its sidecar; returns the number of unconverged rows.
fn emit_sweep(
    cfg: &ReproduceConfig,
    dir: &Path,
    manifest: &mut Manifest,
    file: &str,
    model: &ModelParams<f64>,
    control: Control,
    grid: &[f64],
    meta: serde_json::Value,
) -> Result<usize, Failure> {
    let table = sweep(model, control, grid, cfg.k, cfg.cutoff, CONVERGENCE_TOLERANCE)?;
    let mut buf = vec![];
    write_sweep_csv(&table, &mut buf)?;
    write_bytes(&dir.join(format!("{file}.csv")), buf)?;
    let side = SweepSidecar::new(&table, manifest.params.clone());
    write_json_file(&dir.join(format!("{file}.json")), &side)?;
    let bad = table.rows.iter().filter(|r| !r.converged).count();
    let mut meta = meta;
    meta["model"] = json!(table.model_label);
    meta["sidecar"] = json!(format!("{file}.json"));
    meta["all_converged"] = json!(bad == 0);
    manifest.files.push(ManifestEntry {
        path: format!("{file}.csv"),
        kind: "sweep".into(),
        label: table.model_label.clone(),
        meta,
    });
    Ok(bad)
}

fn fig1(cfg: &ReproduceConfig, dir: &Path, manifest: &mut Manifest) -> Result<usize, Failure> {
    let grid = linspace(0.0, 0.1, cfg.points);
    let mut bad = 0;
    for (variant, renormalize) in [
        (Nonlinearity::Kerr, false),
        (Nonlinearity::Plus, true),
        (Nonlinearity::Minus, true),
    ] {
        let model = ModelParams {
            renormalize,
            ..ModelParams::cavity(variant, 0.0)
        };
        let file = format!("fig1_{variant}");
        bad += emit_sweep(
            cfg,
            dir,
            manifest,
            &file,
            &model,
            Control::J,
            &grid,
            json!({ "variant": variant, "renormalized": renormalize }),
        )?;
    }
    let crossing = renormalized_threshold(2, 0.01, 0.03, 0.06, cfg.cutoff.unwrap_or(CAVITY_CUTOFF))?;
    manifest.params["second_transition_1pct_crossing_J"] = json!(crossing);
    Ok(bad)
}

fn spectra(
    cfg: &ReproduceConfig,
    dir: &Path,
    manifest: &mut Manifest,
    models: &[(Flavor, Nonlinearity)],
) -> Result<usize, Failure> {
    let grid = linspace(0.0, cfg.eta_max, cfg.points);
    let mut bad = 0;
    for &j in &cfg.js {
        for &(flavor, variant) in models {
            let model = ModelParams {
                renormalize: cfg.renormalize,
                omega_q: cfg.omega_q,
                ..ModelParams::rabi(Gauge::Dipole, flavor, variant, j, 0.0)
            };
            let file = format!("J{j}_{}", model.label());
            bad += emit_sweep(cfg, dir, manifest, &file, &model, Control::Eta, &grid, json!({ "J": j }))?;
        }
    }
    Ok(bad)
}

fn wigner_panel(cfg: &ReproduceConfig, dir: &Path, manifest: &mut Manifest) -> Result<usize, Failure> {
    let spec = WignerGridSpec {
        resolution: cfg.resolution,
        ..WignerGridSpec::default()
    };
    let cutoff = cfg.cutoff.unwrap_or(CAVITY_CUTOFF);
    for &j in &cfg.js {
        for cell in eigenstate_panel::<f64>(j, 4, cutoff)? {
            let grid = wigner(&cell.state, &spec)?;
            let file = format!("J{j}_{}_{}.csv", cell.variant, cell.level);
            let mut buf = vec![];
            write_wigner_csv(&grid, &mut buf)?;
            write_bytes(&dir.join(&file), buf)?;
            let q = cell.squeezing;
            manifest.files.push(ManifestEntry {
                path: file,
                kind: "wigner".into(),
                label: format!("{}-{}", cell.variant, cell.level),
                meta: json!({
                    "J": j,
                    "variant": cell.variant,
                    "level": cell.level,
                    "s_sq": q.s_sq,
                    "zeta_sq": q.zeta_sq,
                    "var_x": q.var_x,
                    "var_p": q.var_p,
                    "cov_xp": q.cov_xp,
                    "normalization": grid.normalization(),
                    "min": grid.min_value(),
                    "max": grid.max_value(),
                }),
            });
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_aliases() {
        assert_eq!(Figure::parse("fig2"), Some(Figure::WignerPanel));
        assert_eq!(Figure::parse("wigner-panel"), Some(Figure::WignerPanel));
        assert_eq!(Figure::parse("fig3"), Figure::parse("spectra-naive-vs-corrected"));
        assert_eq!(Figure::parse("fig4"), Figure::parse("spectra-gauge-consistent"));
        assert_eq!(Figure::parse("fig5"), None);
        for f in ["fig1", "wigner-panel", "spectra-naive-vs-corrected", "spectra-gauge-consistent"] {
            assert_eq!(Figure::parse(f).unwrap().name(), f);
        }
    }
}
