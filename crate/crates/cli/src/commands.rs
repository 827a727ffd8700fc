use std::fs;
use std::path::Path;

use nlrabi::fock::SpaceDescriptor;
use nlrabi::hamiltonians::nonlinear_cavity;
use nlrabi::io::{
    to_json_string, write_spectrum_csv, write_sweep_csv, write_wigner_csv, SpectrumSidecar, SweepSidecar,
    WignerJson, SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION,
};
use nlrabi::phase_space::{eigenstate, squeezing_report, wigner, SqueezingReport, WignerGridSpec};
use nlrabi::polariton::{
    effective_model_errors, effective_polariton_hamiltonian, hopfield_coefficients, photon_like_ladder,
    HopfieldParams, HopfieldSolution,
};
use nlrabi::spectra::{linspace, sweep, Control, CONVERGENCE_TOLERANCE};
use nlrabi::validate::run_validation;
use nlrabi::{Nonlinearity, ResonatorParams};
use serde::{Deserialize, Serialize};

use crate::config::{Format, ModelConfig, ModelKind, NumericConfig, Settings};
use crate::failure::Failure;
use crate::{Cli, Command, ModelArgs, NumericArgs, OutputArgs, ResonatorArgs};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let settings = Settings::load(cli.config.as_deref())?;
    let out = settings.out_dir(cli.out);
    match cli.command {
        Command::Spectrum(a) => spectrum(&settings, &out, &a.model, &a.numeric, &a.output),
        Command::Sweep(a) => sweep_cmd(&settings, &out, &a),
        Command::Wigner(a) => wigner_cmd(&settings, &out, &a),
        Command::Squeezing(a) => squeezing_cmd(&settings, &out, &a),
        Command::Polariton(a) => polariton_cmd(&settings, &out, &a),
        Command::Validate(a) => validate_cmd(&settings, &out, a.name),
        Command::Reproduce(a) => crate::reproduce::run(&settings, &out, &a),
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_bytes(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json_file<S: Serialize>(path: &Path, value: &S) -> Result<(), Failure> {
    write_bytes(path, to_json_string(value)?)
}

pub fn keys<'a>(groups: &[&[&'a str]]) -> Vec<&'a str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

pub fn resolve_model(a: &ModelArgs, s: &Settings) -> Result<ModelConfig, Failure> {
    let model = s.pick(a.model, "model", ModelKind::CorrectedDipole)?;
    let variant = match model {
        ModelKind::Kerr => Nonlinearity::Kerr,
        _ => s.pick(a.variant, "variant", Nonlinearity::Minus)?,
    };
    Ok(ModelConfig {
        model,
        variant,
        j: s.pick(a.j, "J", 0.1)?,
        eta: s.pick(a.eta, "eta", 0.0)?,
        omega_c: s.pick(a.omega_c, "omega_c", 1.0)?,
        omega_q: s.pick(a.omega_q, "omega_q", 1.0)?,
        renormalize: s.pick(a.renormalize, "renormalize", false)?,
    })
}

pub fn resolve_numeric(a: &NumericArgs, s: &Settings, k: usize) -> Result<NumericConfig, Failure> {
    let n = NumericConfig {
        k: s.pick(a.k, "k", k)?,
        cutoff: s.pick_opt(a.cutoff, "cutoff")?,
        tolerance: s.pick(a.tolerance, "tolerance", CONVERGENCE_TOLERANCE)?,
    };
    if n.k == 0 {
        return Err(Failure::usage("k must be at least 1"));
    }
    if n.tolerance.is_nan() || n.tolerance <= 0.0 {
        return Err(Failure::usage("tolerance must be positive"));
    }
    Ok(n)
}

fn resolve_output(a: &OutputArgs, s: &Settings, name: &str) -> Result<(Format, String), Failure> {
    let format = s.pick(a.format, "format", Format::Csv)?;
    let name = s.pick(a.name.clone(), "name", name.to_string())?;
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Failure::usage(format!("bad output name `{name}`")));
    }
    Ok((format, name))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub command: String,
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(flatten)]
    pub numeric: NumericConfig,
    pub format: Format,
    pub name: String,
}

fn spectrum(s: &Settings, out: &Path, m: &ModelArgs, n: &NumericArgs, o: &OutputArgs) -> Result<(), Failure> {
    s.expect_keys("spectrum", &keys(&[&ModelConfig::KEYS, &NumericConfig::KEYS, &["format", "name"]]))?;
    let (format, name) = resolve_output(o, s, "spectrum")?;
    let cfg = SpectrumConfig {
        command: "spectrum".into(),
        model: resolve_model(m, s)?,
        numeric: resolve_numeric(n, s, 6)?,
        format,
        name,
    };
    let params = cfg.model.params();
    let spec = params.spectrum(cfg.numeric.k, cfg.numeric.cutoff, cfg.numeric.tolerance)?;
    prepare_dir(out)?;
    if cfg.format == Format::Csv {
        let mut buf = vec![];
        write_spectrum_csv(&spec, &mut buf)?;
        write_bytes(&out.join(format!("{}.csv", cfg.name)), buf)?;
    }
    let side = SpectrumSidecar::new(&params, &spec, serde_json::to_value(&cfg).expect("config serializes"));
    write_json_file(&out.join(format!("{}.json", cfg.name)), &side)?;
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        println!("{i} {e:.12}");
    }
    if spec.converged != Some(true) {
        return Err(Failure::numerical(format!(
            "not converged: level drift {:.3e} between cutoffs {} and {} exceeds {:.1e}; raise --cutoff",
            spec.drift.unwrap_or(f64::NAN),
            spec.cutoff_used,
            2 * spec.cutoff_used,
            cfg.numeric.tolerance
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub command: String,
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(flatten)]
    pub numeric: NumericConfig,
    pub control: Control,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub format: Format,
    pub name: String,
}

fn sweep_cmd(s: &Settings, out: &Path, a: &crate::SweepArgs) -> Result<(), Failure> {
    s.expect_keys(
        "sweep",
        &keys(&[
            &ModelConfig::KEYS,
            &NumericConfig::KEYS,
            &["format", "name", "control", "from", "to", "points"],
        ]),
    )?;
    let control = s.pick(a.control, "control", Control::Eta)?;
    let default_to = match control {
        Control::Eta => 3.0,
        Control::J => 0.1,
    };
    let (format, name) = resolve_output(&a.output, s, "sweep")?;
    let cfg = SweepConfig {
        command: "sweep".into(),
        model: resolve_model(&a.model, s)?,
        numeric: resolve_numeric(&a.numeric, s, 6)?,
        control,
        from: s.pick(a.from, "from", 0.0)?,
        to: s.pick(a.to, "to", default_to)?,
        points: s.pick(a.points, "points", 121)?,
        format,
        name,
    };
    if cfg.points == 0 {
        return Err(Failure::usage("points must be at least 1"));
    }
    let grid = linspace(cfg.from, cfg.to, cfg.points);
    let table = sweep(&cfg.model.params(), cfg.control, &grid, cfg.numeric.k, cfg.numeric.cutoff, cfg.numeric.tolerance)?;
    prepare_dir(out)?;
    let mut side = SweepSidecar::new(&table, serde_json::to_value(&cfg).expect("config serializes"));
    if cfg.format == Format::Csv {
        let mut buf = vec![];
        write_sweep_csv(&table, &mut buf)?;
        write_bytes(&out.join(format!("{}.csv", cfg.name)), buf)?;
    } else {
        side.table = Some(table.clone());
    }
    write_json_file(&out.join(format!("{}.json", cfg.name)), &side)?;
    let bad = table.rows.iter().filter(|r| !r.converged).count();
    println!("{} rows of {} versus {}, {} unconverged", table.rows.len(), table.model_label, control, bad);
    if bad > 0 {
        let worst = table.rows.iter().fold(0.0f64, |m, r| m.max(r.drift));
        return Err(Failure::numerical(format!(
            "{bad} of {} rows not converged (worst drift {worst:.3e}); raise --cutoff",
            table.rows.len()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonatorConfig {
    pub variant: Nonlinearity,
    #[serde(rename = "J")]
    pub j: f64,
    pub omega_c: f64,
    pub cutoff: usize,
}

impl ResonatorConfig {
    const KEYS: [&'static str; 4] = ["variant", "J", "omega_c", "cutoff"];

    fn resolve(a: &ResonatorArgs, s: &Settings) -> Result<Self, Failure> {
        Ok(Self {
            variant: s.pick(a.variant, "variant", Nonlinearity::Minus)?,
            j: s.pick(a.j, "J", 0.1)?,
            omega_c: s.pick(a.omega_c, "omega_c", 1.0)?,
            cutoff: s.pick(a.cutoff, "cutoff", 60)?,
        })
    }

    fn hamiltonian(&self) -> Result<nlrabi::Operator, Failure> {
        let p = ResonatorParams::new(self.omega_c, self.j, self.variant)?;
        Ok(nonlinear_cavity(&p, &SpaceDescriptor::photon(self.cutoff)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerConfig {
    pub command: String,
    #[serde(flatten)]
    pub resonator: ResonatorConfig,
    pub level: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub resolution: usize,
    pub format: Format,
    pub name: String,
}

fn wigner_cmd(s: &Settings, out: &Path, a: &crate::WignerArgs) -> Result<(), Failure> {
    s.expect_keys(
        "wigner",
        &keys(&[
            &ResonatorConfig::KEYS,
            &["level", "x_min", "x_max", "p_min", "p_max", "resolution", "format", "name"],
        ]),
    )?;
    let d = WignerGridSpec::<f64>::default();
    let (format, name) = resolve_output(&a.output, s, "wigner")?;
    let cfg = WignerConfig {
        command: "wigner".into(),
        resonator: ResonatorConfig::resolve(&a.resonator, s)?,
        level: s.pick(a.level, "level", 0)?,
        x_min: s.pick(a.x_min, "x_min", d.x_min)?,
        x_max: s.pick(a.x_max, "x_max", d.x_max)?,
        p_min: s.pick(a.p_min, "p_min", d.p_min)?,
        p_max: s.pick(a.p_max, "p_max", d.p_max)?,
        resolution: s.pick(a.resolution, "resolution", d.resolution)?,
        format,
        name,
    };
    let spec = WignerGridSpec {
        x_min: cfg.x_min,
        x_max: cfg.x_max,
        p_min: cfg.p_min,
        p_max: cfg.p_max,
        resolution: cfg.resolution,
    };
    let psi = eigenstate(&cfg.resonator.hamiltonian()?, cfg.level)?;
    let grid = wigner(&psi, &spec)?;
    let report = squeezing_report(&psi, cfg.level)?;
    prepare_dir(out)?;
    let label = format!("{}-{}", cfg.resonator.variant, cfg.level);
    let mut doc = WignerJson::new(&label, &grid, Some(report));
    doc.config = serde_json::to_value(&cfg).expect("config serializes");
    if cfg.format == Format::Csv {
        let mut buf = vec![];
        write_wigner_csv(&grid, &mut buf)?;
        write_bytes(&out.join(format!("{}.csv", cfg.name)), buf)?;
        doc = doc.without_values();
    }
    write_json_file(&out.join(format!("{}.json", cfg.name)), &doc)?;
    println!(
        "{label}: normalization {:.6}, min {:.6}, S2 {:.8}",
        doc.normalization, doc.min, report.s_sq
    );
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingConfig {
    pub command: String,
    #[serde(flatten)]
    pub resonator: ResonatorConfig,
    pub levels: usize,
    pub format: Format,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingDoc {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config: SqueezingConfig,
    pub reports: Vec<SqueezingReport<f64>>,
}

fn squeezing_cmd(s: &Settings, out: &Path, a: &crate::SqueezingArgs) -> Result<(), Failure> {
    s.expect_keys("squeezing", &keys(&[&ResonatorConfig::KEYS, &["levels", "format", "name"]]))?;
    let (format, name) = resolve_output(&a.output, s, "squeezing")?;
    let cfg = SqueezingConfig {
        command: "squeezing".into(),
        resonator: ResonatorConfig::resolve(&a.resonator, s)?,
        levels: s.pick(a.levels, "levels", 4)?,
        format,
        name,
    };
    let h = cfg.resonator.hamiltonian()?;
    let reports = (0..cfg.levels)
        .map(|n| Ok(squeezing_report(&eigenstate(&h, n)?, n)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    prepare_dir(out)?;
    if cfg.format == Format::Csv {
        let mut text = String::from("level,var_x,var_p,cov_xp,zeta_sq,s_sq\n");
        for r in &reports {
            let f = nlrabi::io::format_number::<f64>;
            text += &format!(
                "{},{},{},{},{},{}\n",
                r.reference_level,
                f(r.var_x),
                f(r.var_p),
                f(r.cov_xp),
                f(r.zeta_sq),
                f(r.s_sq)
            );
        }
        write_bytes(&out.join(format!("{}.csv", cfg.name)), text)?;
    }
    for r in &reports {
        println!("{} S2 {:.10} zeta2 {:.10}", r.reference_level, r.s_sq, r.zeta_sq);
    }
    let path = out.join(format!("{}.json", cfg.name));
    let doc = SqueezingDoc {
        schema_version: SCHEMA_VERSION,
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        config: cfg,
        reports,
    };
    write_json_file(&path, &doc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonConfig {
    pub command: String,
    pub omega_photon: f64,
    pub omega_matter: f64,
    pub lambda: f64,
    pub j_b: f64,
    pub oracle_cutoff: usize,
    pub effective_cutoff: usize,
    pub rungs: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub photon_like_transitions: Vec<f64>,
    pub relative_errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonDoc {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config: PolaritonConfig,
    pub solution: HopfieldSolution<f64>,
    pub bosonicity: [f64; 2],
    /// Transitions of the effective single-mode model.
    pub effective_transitions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
}

fn polariton_cmd(s: &Settings, out: &Path, a: &crate::PolaritonArgs) -> Result<(), Failure> {
    s.expect_keys(
        "polariton",
        &[
            "omega_photon",
            "omega_matter",
            "lambda",
            "j_b",
            "oracle_cutoff",
            "effective_cutoff",
            "rungs",
            "name",
        ],
    )?;
    let cfg = PolaritonConfig {
        command: "polariton".into(),
        omega_photon: s.pick(a.omega_photon, "omega_photon", 1.0)?,
        omega_matter: s.pick(a.omega_matter, "omega_matter", 2.0)?,
        lambda: s.pick(a.lambda, "lambda", 0.1)?,
        j_b: s.pick(a.j_b, "j_b", 0.3)?,
        oracle_cutoff: s.pick(a.oracle_cutoff, "oracle_cutoff", 0)?,
        effective_cutoff: s.pick(a.effective_cutoff, "effective_cutoff", 60)?,
        rungs: s.pick(a.rungs, "rungs", 3)?,
        name: s.pick(a.name.clone(), "name", "polariton".to_string())?,
    };
    let p = HopfieldParams::new(cfg.omega_photon, cfg.omega_matter, cfg.lambda, cfg.j_b)?;
    let sol = hopfield_coefficients(&p)?;
    let h = effective_polariton_hamiltonian(&p, &SpaceDescriptor::photon(cfg.effective_cutoff)?)?;
    let e = nlrabi::spectra::eigen_spectrum(&h, cfg.rungs + 1)?.ground_referenced().eigenvalues;
    let oracle = if cfg.oracle_cutoff > 0 {
        let space = SpaceDescriptor::photon_matter(cfg.oracle_cutoff, cfg.oracle_cutoff)?;
        Some(OracleComparison {
            photon_like_transitions: photon_like_ladder(&p, cfg.rungs, &space)?,
            relative_errors: effective_model_errors(&p, cfg.rungs, cfg.oracle_cutoff, cfg.effective_cutoff)?,
        })
    } else {
        None
    };
    println!(
        "omega = [{:.10}, {:.10}], photon-like {}, J_eff {:.6e}",
        sol.omega[0], sol.omega[1], sol.photon_like, sol.j_eff
    );
    if let Some(o) = &oracle {
        let worst = o.relative_errors.iter().cloned().fold(0.0, f64::max);
        println!("effective model vs two-mode oracle: worst relative error {worst:.3e}");
    }
    prepare_dir(out)?;
    let path = out.join(format!("{}.json", cfg.name));
    let doc = PolaritonDoc {
        schema_version: SCHEMA_VERSION,
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        bosonicity: [sol.bosonicity(0), sol.bosonicity(1)],
        solution: sol,
        effective_transitions: e[1..].to_vec(),
        oracle,
        config: cfg,
    };
    write_json_file(&path, &doc)
}

fn validate_cmd(s: &Settings, out: &Path, name: Option<String>) -> Result<(), Failure> {
    s.expect_keys("validate", &["name"])?;
    let name = s.pick(name, "name", "validation".to_string())?;
    let report = run_validation()?;
    prepare_dir(out)?;
    write_json_file(&out.join(format!("{name}.json")), &report)?;
    for c in &report.checks {
        let op = match c.comparison {
            nlrabi::validate::Comparison::Below => "<",
            nlrabi::validate::Comparison::Above => ">",
        };
        println!(
            "{} {}/{}: {:.3e} {op} {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.measured,
            c.tolerance
        );
    }
    let failed = report.failures().count();
    if failed > 0 {
        return Err(Failure::numerical(format!("{failed} validation checks failed")));
    }
    Ok(())
}
