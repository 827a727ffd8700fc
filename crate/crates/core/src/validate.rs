//! Self-checks run by `nlrabi validate`, reported as machine-readable JSON.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::SpaceDescriptor;
use crate::hamiltonians::{nonlinear_cavity, Flavor, Nonlinearity, ResonatorParams};
use crate::io::{SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION};
use crate::phase_space::{eigenstate_panel, quadrature_stats, wigner, WignerGridSpec};
use crate::polariton::{
    effective_model_errors, frequencies_from_spectrum, hopfield_coefficients, polariton_frequencies,
    two_mode_oracle, HopfieldParams,
};
use crate::spectra::{
    decoupling_check, eigen_spectrum, gauge_invariance_check_with, linspace, renormalized_deviation,
    renormalized_threshold, GaugePair, CAVITY_CUTOFF,
};

/// How `measured` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// measured < tolerance
    Below,
    /// measured > tolerance
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn below(suite: &str, name: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(suite, name, measured, tolerance, Comparison::Below)
    }

    pub fn above(suite: &str, name: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(suite, name, measured, tolerance, Comparison::Above)
    }

    fn new(suite: &str, name: &str, measured: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Below => measured < tolerance,
            Comparison::Above => measured > tolerance,
        };
        Self {
            suite: suite.into(),
            name: name.into(),
            tolerance,
            measured,
            comparison,
            pass,
            detail: String::new(),
        }
    }

    /// Boolean condition encoded as a count of violations.
    pub fn holds(suite: &str, name: &str, ok: bool) -> Self {
        Self::below(suite, name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            passed: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn suite(&self, suite: &str) -> impl Iterator<Item = &Check> {
        let suite = suite.to_string();
        self.checks.iter().filter(move |c| c.suite == suite)
    }
}

/// Replaceable parts of the suite, so a broken model can be shown to fail it.
#[derive(Clone, Copy)]
pub struct Fixtures {
    pub gauge: GaugePair<f64>,
}

impl Default for Fixtures {
    fn default() -> Self {
        Self {
            gauge: GaugePair::corrected(),
        }
    }
}

pub fn run_validation() -> Result<ValidationReport> {
    run_validation_with(Fixtures::default())
}

pub fn run_validation_with(fixtures: Fixtures) -> Result<ValidationReport> {
    let mut checks = resonator_checks()?;
    checks.extend(gauge_checks(fixtures.gauge)?);
    checks.extend(decoupling_checks()?);
    checks.extend(hopfield_checks()?);
    checks.extend(phase_space_checks()?);
    Ok(ValidationReport::new(checks))
}

fn cavity_levels(variant: Nonlinearity, j: f64, k: usize, cutoff: usize) -> Result<Vec<f64>> {
    let h = nonlinear_cavity(&ResonatorParams::new(1.0, j, variant)?, &SpaceDescriptor::photon(cutoff)?)?;
    Ok(eigen_spectrum(&h, k)?.eigenvalues)
}

/// Kerr closed form, `V_+`/`V_-` equivalence and the renormalized threshold.
pub fn resonator_checks() -> Result<Vec<Check>> {
    let suite = "resonator";
    let mut kerr_err = 0.0f64;
    for j in [0.05, 0.1] {
        let e = cavity_levels(Nonlinearity::Kerr, j, 11, CAVITY_CUTOFF)?;
        for (n, &en) in e.iter().enumerate() {
            let n = n as f64;
            kerr_err = kerr_err.max((en - (n + j * n * (n - 1.0))).abs());
        }
    }
    let plus = cavity_levels(Nonlinearity::Plus, 0.1, 8, 100)?;
    let minus = cavity_levels(Nonlinearity::Minus, 0.1, 8, 100)?;
    let pm = plus.iter().zip(&minus).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let lo = renormalized_deviation(0.03, 2, CAVITY_CUTOFF)?;
    let hi = renormalized_deviation(0.06, 2, CAVITY_CUTOFF)?;
    let crossing = renormalized_threshold(2, 0.01, 0.03, 0.06, CAVITY_CUTOFF)?;
    Ok(vec![
        Check::below(suite, "kerr_closed_form_n_le_10", kerr_err, 1e-12),
        Check::below(suite, "plus_minus_lowest_8_at_J_0.1", pm, 1e-8),
        Check::below(suite, "renormalized_deviation_at_J_0.03", lo, 0.01),
        Check::above(suite, "renormalized_deviation_at_J_0.06", hi, 0.01)
            .with_detail(format!("1% crossing at J = {crossing:.10}")),
    ])
}

/// Exact conjugation, physical gauge agreement, and the naive model's violation.
pub fn gauge_checks(pair: GaugePair<f64>) -> Result<Vec<Check>> {
    let suite = "gauge";
    let mut checks = vec![];
    let exact_points: Vec<(f64, f64)> = [0.5, 1.0, 2.0].iter().map(|&e| (e, 0.1)).collect();
    let mut exact = 0.0f64;
    for v in [Nonlinearity::Kerr, Nonlinearity::Minus] {
        exact = exact.max(gauge_invariance_check_with(v, &exact_points, 6, pair)?.max_exact());
    }
    checks.push(Check::below(suite, "exact_conjugation_identity", exact, 1e-10));

    let points: Vec<(f64, f64)> = linspace(0.0, 3.0, 11)
        .into_iter()
        .flat_map(|e| [(e, 0.05), (e, 0.1)])
        .collect();
    for v in [Nonlinearity::Kerr, Nonlinearity::Plus, Nonlinearity::Minus] {
        let r = gauge_invariance_check_with(v, &points, 6, pair)?;
        checks.push(
            Check::below(suite, &format!("dipole_vs_coulomb_{}", v.label()), r.max_physical(), 1e-6)
                .with_detail(format!("all converged: {}", r.all_converged())),
        );
        checks.push(Check::holds(suite, &format!("dipole_vs_coulomb_{}_converged", v.label()), r.all_converged()));
    }

    let naive = gauge_invariance_check_with(Nonlinearity::Kerr, &[(2.0, 0.1)], 6, GaugePair::naive())?;
    checks.push(Check::above(suite, "naive_kerr_violation_at_eta_2", naive.max_physical(), 1e-2));
    Ok(checks)
}

/// Large-coupling limit for the corrected model and its naive negative control.
pub fn decoupling_checks() -> Result<Vec<Check>> {
    let suite = "decoupling";
    let etas = [4.0, 6.0, 8.0, 10.0];
    let r = decoupling_check(Flavor::Corrected, 0.05, &etas, 6, 1e-3)?;
    let last = r.final_point();
    let naive = decoupling_check(Flavor::Naive, 0.05, &etas, 6, 1e-3)?;
    Ok(vec![
        Check::below(suite, "level_deviation_at_eta_10", last.deviation, 1e-3),
        Check::below(suite, "pair_gap_at_eta_10", last.pair_gap, 1e-3),
        Check::holds(suite, "monotone_along_eta", r.monotone()),
        Check::above(suite, "naive_level_deviation_at_eta_10", naive.final_point().deviation, 1e-3),
    ])
}

/// Grid used for the bosonicity check.
pub fn hopfield_grid() -> Vec<HopfieldParams<f64>> {
    let mut out = vec![];
    for wp in [0.5, 1.0, 2.0] {
        for wm in [0.5, 1.0, 1.5, 2.0] {
            for l in [0.0, 0.05, 0.1, 0.3, 0.5] {
                out.push(HopfieldParams {
                    omega_photon: wp,
                    omega_matter: wm,
                    lambda: l,
                    j_b: 0.3,
                });
            }
        }
    }
    out
}

pub fn hopfield_checks() -> Result<Vec<Check>> {
    let suite = "hopfield";
    let mut boson = 0.0f64;
    for p in hopfield_grid() {
        let s = hopfield_coefficients(&p)?;
        boson = boson.max((s.bosonicity(0) - 1.0).abs()).max((s.bosonicity(1) - 1.0).abs());
    }
    let linear: HopfieldParams<f64> = HopfieldParams {
        omega_photon: 1.0,
        omega_matter: 2.0,
        lambda: 0.1,
        j_b: 0.0,
    };
    let (w1, w2) = polariton_frequencies(&linear)?;
    let e = eigen_spectrum(&two_mode_oracle(&linear, &SpaceDescriptor::photon_matter(30, 30)?)?, 40)?
        .ground_referenced()
        .eigenvalues;
    let freq = match frequencies_from_spectrum(&e, 1e-6) {
        Some((o1, o2)) => (o1 - w1).abs().max((o2 - w2).abs()),
        None => f64::INFINITY,
    };
    let dispersive = effective_model_errors(&HopfieldParams { j_b: 0.3, ..linear }, 3, 30, 60)?;
    let resonant = effective_model_errors(
        &HopfieldParams {
            omega_matter: 1.0,
            j_b: 0.3,
            ..linear
        },
        3,
        30,
        60,
    )?;
    let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    Ok(vec![
        Check::below(suite, "bosonicity", boson, 1e-10),
        Check::below(suite, "frequencies_vs_two_mode_oracle", freq, 1e-6),
        Check::below(suite, "effective_model_dispersive", max(&dispersive), 0.02),
        Check::above(suite, "effective_model_resonant", max(&resonant), 0.05),
    ])
}

pub fn phase_space_checks() -> Result<Vec<Check>> {
    let suite = "phase_space";
    let grid = WignerGridSpec::default();
    let panel = eigenstate_panel::<f64>(0.1, 4, CAVITY_CUTOFF)?;
    let mut norm = 0.0f64;
    for cell in &panel {
        norm = norm.max((wigner(&cell.state, &grid)?.normalization() - 1.0).abs());
    }
    let kerr = panel
        .iter()
        .filter(|c| c.variant == Nonlinearity::Kerr)
        .fold(0.0f64, |m, c| m.max((c.squeezing.s_sq - 1.0).abs()));
    let minus_05 = eigenstate_panel::<f64>(0.05, 4, CAVITY_CUTOFF)?;
    let minus_s = |cells: &[crate::phase_space::PanelCell<f64>]| -> Vec<f64> {
        cells
            .iter()
            .filter(|c| c.variant == Nonlinearity::Minus)
            .map(|c| c.squeezing.s_sq)
            .collect()
    };
    let (s05, s10) = (minus_s(&minus_05), minus_s(&panel));
    let worst_s = s05.iter().chain(&s10).cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut zeta = 0.0f64;
    let mut swap = 0.0f64;
    for level in 0..4 {
        let pick = |v: Nonlinearity| panel.iter().find(|c| c.variant == v && c.level == level).unwrap();
        let (p, m) = (pick(Nonlinearity::Plus), pick(Nonlinearity::Minus));
        zeta = zeta.max((p.squeezing.zeta_sq - m.squeezing.zeta_sq).abs());
        let (qp, qm) = (quadrature_stats(&p.state)?, quadrature_stats(&m.state)?);
        swap = swap.max((qp.var_x - qm.var_p).abs()).max((qp.var_p - qm.var_x).abs());
    }
    Ok(vec![
        Check::below(suite, "wigner_normalization_12_panel_states", norm, 1e-3),
        Check::below(suite, "kerr_s2_equals_one", kerr, 1e-12),
        Check::below(suite, "minus_s2_below_one", worst_s, 1.0),
        Check::below(suite, "minus_ground_s2_decreasing_in_J", s10[0] - s05[0], 0.0)
            .with_detail(format!("S2(J=0.05) = {:.8}, S2(J=0.1) = {:.8}", s05[0], s10[0])),
        Check::below(suite, "plus_minus_zeta2_equal", zeta, 1e-8),
        Check::below(suite, "plus_minus_variance_swap", swap, 1e-8),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_comparisons() {
        assert!(Check::below("s", "n", 0.5, 1.0).pass);
        assert!(!Check::below("s", "n", 1.0, 1.0).pass);
        assert!(Check::above("s", "n", 2.0, 1.0).pass);
        assert!(!Check::holds("s", "n", false).pass);
        let r = ValidationReport::new(vec![Check::holds("a", "x", true), Check::holds("b", "y", false)]);
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.suite("a").count(), 1);
    }

    #[test]
    fn report_json_lists_name_tolerance_measured() {
        let r = ValidationReport::new(resonator_checks().unwrap());
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for c in v["checks"].as_array().unwrap() {
            assert!(c["name"].is_string() && c["tolerance"].is_number() && c["measured"].is_number());
        }
        assert!(r.passed, "{r:#?}");
    }

    #[test]
    fn hopfield_and_phase_space_suites_pass() {
        for c in hopfield_checks().unwrap().into_iter().chain(phase_space_checks().unwrap()) {
            assert!(c.pass, "{c:?}");
        }
    }
}
