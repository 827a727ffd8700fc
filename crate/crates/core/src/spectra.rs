//! Spectra, cutoff convergence, parameter sweeps and the gauge / decoupling checks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{OperatorMatrix, SpaceDescriptor};
use crate::hamiltonians::{
    build_rabi, conjugated_nonlinear_dipole, corrected_nonlinear_dipole, default_cutoff,
    naive_nonlinear_coulomb, naive_nonlinear_dipole, nonlinear_cavity, nonlinear_coulomb,
    renormalize_cavity_frequency, Flavor, Gauge, Nonlinearity, RabiParams, ResonatorParams,
};
use crate::scalar::Real;

type Op<T> = OperatorMatrix<T>;

/// Default drift tolerance under cutoff doubling.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Lowest eigenvalues of a Hermitian operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
    pub ground_referenced: bool,
    pub cutoff_used: usize,
    /// Set once a doubling test has run.
    pub converged: Option<bool>,
    pub drift: Option<T>,
}

impl<T: Real> Spectrum<T> {
    /// Same levels shifted so the ground level is zero.
    pub fn ground_referenced(&self) -> Self {
        let e0 = self.eigenvalues[0];
        Self {
            eigenvalues: self.eigenvalues.iter().map(|&e| e - e0).collect(),
            ground_referenced: true,
            ..self.clone()
        }
    }
}

/// Largest `k` trusted for a truncated operator of dimension `dim`.
pub fn max_levels(dim: usize) -> usize {
    dim.div_ceil(2)
}

/// The `k` lowest eigenvalues, ascending. `k` may not exceed half the dimension (rounded up).
pub fn eigen_spectrum<T: Real>(h: &Op<T>, k: usize) -> Result<Spectrum<T>> {
    let dim = h.dim();
    let max = max_levels(dim);
    if k == 0 || k > max {
        return Err(Error::TooManyLevels { k, max, dim });
    }
    let mut e = T::eigvalsh(h.entries())?;
    e.truncate(k);
    Ok(Spectrum {
        eigenvalues: e,
        ground_referenced: false,
        cutoff_used: h.space().photon_cutoff().unwrap_or(dim),
        converged: None,
        drift: None,
    })
}

fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Diagonalizes at cutoffs `n` and `2n`; drift is the largest change of a
/// ground-referenced level. Returns the ground-referenced spectrum at `n`.
pub fn convergence_check<T: Real>(
    builder: impl Fn(usize) -> Result<Op<T>>,
    k: usize,
    n: usize,
    tolerance: T,
) -> Result<(Spectrum<T>, T)> {
    let lo = eigen_spectrum(&builder(n)?, k)?.ground_referenced();
    let hi = eigen_spectrum(&builder(2 * n)?, k)?.ground_referenced();
    let drift = max_abs_diff(&lo.eigenvalues, &hi.eigenvalues);
    let spec = Spectrum {
        converged: Some(drift < tolerance),
        drift: Some(drift),
        ..lo
    };
    Ok((spec, drift))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Bare nonlinear resonator.
    Cavity,
    /// Resonator coupled to a qubit.
    Rabi,
}

/// Everything needed to build one model Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModelParams<T: Real> {
    pub system: System,
    pub variant: Nonlinearity,
    pub gauge: Gauge,
    pub flavor: Flavor,
    pub omega_c: T,
    pub omega_q: T,
    pub j: T,
    pub eta: T,
    /// Rescale the resonator frequency so the bare resonator's first gap equals `omega_c`.
    pub renormalize: bool,
}

impl<T: Real> ModelParams<T> {
    pub fn cavity(variant: Nonlinearity, j: T) -> Self {
        Self {
            system: System::Cavity,
            variant,
            gauge: Gauge::Dipole,
            flavor: Flavor::Corrected,
            omega_c: T::one(),
            omega_q: T::one(),
            j,
            eta: T::zero(),
            renormalize: false,
        }
    }

    pub fn rabi(gauge: Gauge, flavor: Flavor, variant: Nonlinearity, j: T, eta: T) -> Self {
        Self {
            system: System::Rabi,
            gauge,
            flavor,
            ..Self::cavity(variant, j)
        }
        .with_eta(eta)
    }

    pub fn with_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_j(mut self, j: T) -> Self {
        self.j = j;
        self
    }

    pub fn with_control(self, control: Control, value: T) -> Self {
        match control {
            Control::Eta => self.with_eta(value),
            Control::J => self.with_j(value),
        }
    }

    /// Short identifier such as `corrected-dipole-minus`.
    pub fn label(&self) -> String {
        match (self.system, self.flavor) {
            (System::Cavity, _) => format!("cavity-{}", self.variant),
            (System::Rabi, Flavor::Linear) => format!("rabi-{}", self.gauge),
            (System::Rabi, flavor) => format!("{flavor}-{}-{}", self.gauge, self.variant),
        }
    }

    pub fn default_cutoff(&self) -> usize {
        match self.system {
            System::Cavity => default_cutoff(0.0, self.j.as_f64()),
            System::Rabi => default_cutoff(self.eta.as_f64(), self.j.as_f64()),
        }
    }

    pub fn space(&self, cutoff: usize) -> Result<SpaceDescriptor> {
        match self.system {
            System::Cavity => SpaceDescriptor::photon(cutoff),
            System::Rabi => SpaceDescriptor::photon_qubit(cutoff),
        }
    }

    /// Resonator frequency after optional renormalization at this cutoff.
    pub fn effective_omega_c(&self, cutoff: usize) -> Result<T> {
        if self.renormalize {
            renormalize_cavity_frequency(self.variant, self.j, self.omega_c, &SpaceDescriptor::photon(cutoff)?)
        } else {
            Ok(self.omega_c)
        }
    }

    pub fn resonator(&self, cutoff: usize) -> Result<ResonatorParams<T>> {
        ResonatorParams::new(self.effective_omega_c(cutoff)?, self.j, self.variant)
    }

    pub fn rabi_params(&self, cutoff: usize) -> Result<RabiParams<T>> {
        let p = RabiParams {
            resonator: self.resonator(cutoff)?,
            omega_q: self.omega_q,
            eta: self.eta,
            gauge: self.gauge,
            flavor: self.flavor,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn build(&self, cutoff: usize) -> Result<Op<T>> {
        let space = self.space(cutoff)?;
        match self.system {
            System::Cavity => nonlinear_cavity(&self.resonator(cutoff)?, &space),
            System::Rabi => build_rabi(&self.rabi_params(cutoff)?, &space),
        }
    }

    /// Ground-referenced spectrum at `cutoff` (default policy if `None`), checked by doubling.
    pub fn spectrum(&self, k: usize, cutoff: Option<usize>, tolerance: T) -> Result<Spectrum<T>> {
        let n = cutoff.unwrap_or_else(|| self.default_cutoff());
        Ok(convergence_check(|c| self.build(c), k, n, tolerance)?.0)
    }
}

/// Swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Control {
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "J")]
    J,
}

impl Control {
    pub fn label(&self) -> &'static str {
        match self {
            Control::Eta => "eta",
            Control::J => "J",
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Control {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eta" | "Eta" | "ETA" => Ok(Control::Eta),
            "J" | "j" => Ok(Control::J),
            _ => Err(Error::InvalidParameter(format!("unknown control `{s}` (expected eta or J)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SweepRow<T: Real> {
    pub control: T,
    /// Ground-referenced levels.
    pub levels: Vec<T>,
    pub converged: bool,
    pub drift: T,
    pub cutoff: usize,
}

/// Levels versus one control parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SweepTable<T: Real> {
    pub control: Control,
    pub model_label: String,
    pub params: ModelParams<T>,
    pub k: usize,
    pub tolerance: T,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepTable<T> {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn control_values(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.control).collect()
    }

    pub fn level(&self, index: usize) -> Vec<T> {
        self.rows.iter().map(|r| r.levels[index]).collect()
    }
}

/// Evenly spaced grid with `points` values from `lo` to `hi`.
pub fn linspace<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize(points - 1).unwrap();
            (0..points).map(|i| lo + step * T::from_usize(i).unwrap()).collect()
        }
    }
}

/// Ground-referenced, doubling-checked levels at each grid value.
///
/// Rows are computed in parallel and assembled in grid order. A row that
/// fails the drift test is flagged (`converged = false`) and the sweep
/// continues.
pub fn sweep<T: Real>(
    model: &ModelParams<T>,
    control: Control,
    grid: &[T],
    k: usize,
    cutoff: Option<usize>,
    tolerance: T,
) -> Result<SweepTable<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("sweep grid must be ascending".into()));
    }
    let rows = grid
        .par_iter()
        .map(|&value| {
            let m = model.clone().with_control(control, value);
            let n = cutoff.unwrap_or_else(|| m.default_cutoff());
            let (spec, drift) = convergence_check(|c| m.build(c), k, n, tolerance)?;
            Ok(SweepRow {
                control: value,
                levels: spec.eigenvalues,
                converged: drift < tolerance,
                drift,
                cutoff: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        control,
        model_label: model.label(),
        params: model.clone(),
        k,
        tolerance,
        rows,
    })
}

/// Builder signature used by the gauge checks.
pub type RabiBuilder<T> = fn(&RabiParams<T>, &SpaceDescriptor) -> Result<Op<T>>;

/// Two gauge pairings: the physical one compares converged spectra, the
/// exact one compares spectra at one fixed truncation.
#[derive(Clone, Copy)]
pub struct GaugePair<T: Real> {
    pub dipole: RabiBuilder<T>,
    pub coulomb: RabiBuilder<T>,
    pub exact_dipole: RabiBuilder<T>,
    pub exact_coulomb: RabiBuilder<T>,
}

impl<T: Real> GaugePair<T> {
    /// `a'`-substituted dipole model against the nonlinear Coulomb model.
    pub fn corrected() -> Self {
        Self {
            dipole: corrected_nonlinear_dipole,
            coulomb: nonlinear_coulomb,
            exact_dipole: conjugated_nonlinear_dipole,
            exact_coulomb: nonlinear_coulomb,
        }
    }

    /// Naive dipole model against the nonlinear Coulomb model; its exact
    /// partner is its own unitary conjugate.
    pub fn naive() -> Self {
        Self {
            dipole: naive_nonlinear_dipole,
            coulomb: nonlinear_coulomb,
            exact_dipole: naive_nonlinear_dipole,
            exact_coulomb: naive_nonlinear_coulomb,
        }
    }
}

/// Tolerances of the gauge checks.
pub const PHYSICAL_GAUGE_TOLERANCE: f64 = 1e-6;
pub const EXACT_GAUGE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GaugePoint<T: Real> {
    pub eta: T,
    pub j: T,
    /// Largest level discrepancy between converged dipole and Coulomb spectra.
    pub physical: T,
    /// Largest eigenvalue discrepancy over the lower half of the spectrum at fixed truncation.
    pub exact: T,
    pub converged: bool,
    pub drift: T,
    pub cutoff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GaugeReport<T: Real> {
    pub variant: Nonlinearity,
    pub k: usize,
    pub points: Vec<GaugePoint<T>>,
}

impl<T: Real> GaugeReport<T> {
    pub fn max_physical(&self) -> T {
        self.points.iter().fold(T::zero(), |m, p| m.max(p.physical))
    }

    pub fn max_exact(&self) -> T {
        self.points.iter().fold(T::zero(), |m, p| m.max(p.exact))
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }

    pub fn physical_passed(&self) -> bool {
        self.all_converged() && self.max_physical() < T::lit(PHYSICAL_GAUGE_TOLERANCE)
    }

    pub fn exact_passed(&self) -> bool {
        self.max_exact() < T::lit(EXACT_GAUGE_TOLERANCE)
    }
}

fn rabi_point<T: Real>(variant: Nonlinearity, eta: T, j: T) -> RabiParams<T> {
    RabiParams {
        resonator: ResonatorParams {
            omega_c: T::one(),
            j,
            variant,
        },
        omega_q: T::one(),
        eta,
        gauge: Gauge::Dipole,
        flavor: Flavor::Corrected,
    }
}

/// [`gauge_invariance_check_with`] for the corrected models.
pub fn gauge_invariance_check<T: Real>(variant: Nonlinearity, points: &[(T, T)], k: usize) -> Result<GaugeReport<T>> {
    gauge_invariance_check_with(variant, points, k, GaugePair::corrected())
}

/// Compares the dipole and Coulomb members of `pair` over `(eta, J)` points
/// at `omega_q = omega_c = 1`. Failures are reported in-band.
pub fn gauge_invariance_check_with<T: Real>(
    variant: Nonlinearity,
    points: &[(T, T)],
    k: usize,
    pair: GaugePair<T>,
) -> Result<GaugeReport<T>> {
    let tol = T::lit(CONVERGENCE_TOLERANCE);
    let points = points
        .par_iter()
        .map(|&(eta, j)| {
            let p = rabi_point(variant, eta, j);
            let n = default_cutoff(eta.as_f64(), j.as_f64());
            let build = |f: RabiBuilder<T>| move |c: usize| f(&p, &SpaceDescriptor::photon_qubit(c)?);
            let (d, drift_d) = convergence_check(build(pair.dipole), k, n, tol)?;
            let (c, drift_c) = convergence_check(build(pair.coulomb), k, n, tol)?;
            let physical = max_abs_diff(&d.eigenvalues, &c.eigenvalues);
            let space = SpaceDescriptor::photon_qubit(n)?;
            let ed = T::eigvalsh((pair.exact_dipole)(&p, &space)?.entries())?;
            let ec = T::eigvalsh((pair.exact_coulomb)(&p, &space)?.entries())?;
            let half = space.dim() / 2;
            let exact = max_abs_diff(&ed[..half], &ec[..half]);
            let drift = drift_d.max(drift_c);
            Ok(GaugePoint {
                eta,
                j,
                physical,
                exact,
                converged: drift < tol,
                drift,
                cutoff: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugeReport { variant, k, points })
}

/// Values below this are treated as numerically zero by the monotonicity test.
pub const MONOTONE_NOISE_FLOOR: f64 = 1e-9;

/// Non-increasing, ignoring steps where both values sit below `floor`.
pub fn non_increasing<T: Real>(values: &[T], floor: T) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] || (w[0] < floor && w[1] < floor))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecouplingPoint<T: Real> {
    pub eta: T,
    pub levels: Vec<T>,
    /// Largest deviation from the doubled bare-resonator levels.
    pub deviation: T,
    /// Largest splitting inside a would-be degenerate pair.
    pub pair_gap: T,
    pub converged: bool,
    pub drift: T,
    pub cutoff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecouplingReport<T: Real> {
    pub flavor: Flavor,
    pub j: T,
    pub k: usize,
    pub tolerance: T,
    /// Bare `V_-` resonator levels, each repeated twice.
    pub reference: Vec<T>,
    pub points: Vec<DecouplingPoint<T>>,
}

impl<T: Real> DecouplingReport<T> {
    pub fn deviations(&self) -> Vec<T> {
        self.points.iter().map(|p| p.deviation).collect()
    }

    pub fn pair_gaps(&self) -> Vec<T> {
        self.points.iter().map(|p| p.pair_gap).collect()
    }

    pub fn monotone(&self) -> bool {
        let floor = T::lit(MONOTONE_NOISE_FLOOR);
        non_increasing(&self.deviations(), floor) && non_increasing(&self.pair_gaps(), floor)
    }

    pub fn final_point(&self) -> &DecouplingPoint<T> {
        self.points.last().expect("decoupling report has points")
    }

    /// Converged everywhere, monotone, and within tolerance at the largest `eta`.
    pub fn passed(&self) -> bool {
        let last = self.final_point();
        self.points.iter().all(|p| p.converged)
            && self.monotone()
            && last.deviation < self.tolerance
            && last.pair_gap < self.tolerance
    }
}

/// Large-coupling limit of the `V_-` dipole model (`flavor` naive or corrected).
///
/// At each `eta` the lowest `k` ground-referenced levels are compared with
/// the bare resonator levels doubled, `[e0, e0, e1, e1, ...]`.
pub fn decoupling_check<T: Real>(flavor: Flavor, j: T, etas: &[T], k: usize, tolerance: T) -> Result<DecouplingReport<T>> {
    if flavor == Flavor::Linear {
        return Err(Error::InvalidParameter("decoupling check needs a nonlinear flavor".into()));
    }
    if etas.is_empty() {
        return Err(Error::InvalidParameter("decoupling check needs at least one eta".into()));
    }
    let conv_tol = T::lit(CONVERGENCE_TOLERANCE);
    let bare = ModelParams::cavity(Nonlinearity::Minus, j);
    let half = k.div_ceil(2);
    let (bare_spec, bare_drift) = convergence_check(|c| bare.build(c), half, bare.default_cutoff(), conv_tol)?;
    if bare_drift >= conv_tol {
        return Err(Error::NotConverged {
            cutoff: bare.default_cutoff(),
            drift: bare_drift.as_f64(),
            tolerance: CONVERGENCE_TOLERANCE,
        });
    }
    let reference: Vec<T> = bare_spec.eigenvalues.iter().flat_map(|&e| [e, e]).take(k).collect();
    let points = etas
        .par_iter()
        .map(|&eta| {
            let m = ModelParams::rabi(Gauge::Dipole, flavor, Nonlinearity::Minus, j, eta);
            let n = m.default_cutoff();
            let (spec, drift) = convergence_check(|c| m.build(c), k, n, conv_tol)?;
            let levels = spec.eigenvalues;
            let deviation = max_abs_diff(&levels, &reference);
            let pair_gap = levels
                .chunks(2)
                .filter(|c| c.len() == 2)
                .fold(T::zero(), |g, c| g.max(c[1] - c[0]));
            Ok(DecouplingPoint {
                eta,
                levels,
                deviation,
                pair_gap,
                converged: drift < conv_tol,
                drift,
                cutoff: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecouplingReport {
        flavor,
        j,
        k,
        tolerance,
        reference,
        points,
    })
}

/// Cutoff used for bare-resonator level comparisons.
pub const CAVITY_CUTOFF: usize = 60;

/// Ground-referenced levels of the Kerr resonator and of the `V_+`, `V_-`
/// resonators renormalized to the same first gap `omega_c = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RenormalizedLevels<T: Real> {
    pub j: T,
    pub omega_plus: T,
    pub omega_minus: T,
    pub kerr: Vec<T>,
    pub plus: Vec<T>,
    pub minus: Vec<T>,
}

pub fn renormalized_levels<T: Real>(j: T, k: usize, cutoff: usize) -> Result<RenormalizedLevels<T>> {
    let space = SpaceDescriptor::photon(cutoff)?;
    let levels = |variant: Nonlinearity, w: T| -> Result<Vec<T>> {
        let h = nonlinear_cavity(&ResonatorParams::new(w, j, variant)?, &space)?;
        Ok(eigen_spectrum(&h, k)?.ground_referenced().eigenvalues)
    };
    let omega_plus = renormalize_cavity_frequency(Nonlinearity::Plus, j, T::one(), &space)?;
    let omega_minus = renormalize_cavity_frequency(Nonlinearity::Minus, j, T::one(), &space)?;
    Ok(RenormalizedLevels {
        j,
        omega_plus,
        omega_minus,
        kerr: levels(Nonlinearity::Kerr, T::one())?,
        plus: levels(Nonlinearity::Plus, omega_plus)?,
        minus: levels(Nonlinearity::Minus, omega_minus)?,
    })
}

/// Relative deviation `|E_level^- - E_level^K| / E_level^K` between the
/// renormalized `V_-` resonator and the Kerr resonator (ground referenced).
pub fn renormalized_deviation<T: Real>(j: T, level: usize, cutoff: usize) -> Result<T> {
    let r = renormalized_levels(j, level + 1, cutoff)?;
    let kerr = r.kerr[level];
    Ok((r.minus[level] - kerr).abs() / kerr)
}

/// Smallest `J` in `[lo, hi]` where [`renormalized_deviation`] reaches `threshold`, by bisection.
pub fn renormalized_threshold<T: Real>(level: usize, threshold: T, lo: T, hi: T, cutoff: usize) -> Result<T> {
    let f = |j: T| -> Result<T> { Ok(renormalized_deviation(j, level, cutoff)? - threshold) };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa * fb > T::zero() {
        return Err(Error::RootNotBracketed {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }
    let tol = T::lit(1e-10).max(T::default_epsilon() * T::lit(64.0));
    let mut fa = fa;
    while (b - a) > tol {
        let mid = (a + b) * T::lit(0.5);
        let fm = f(mid)?;
        if fm * fa > T::zero() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eigen_spectrum_examples() {
        let s = SpaceDescriptor::photon(3).unwrap();
        let h = Op::from_diagonal(&s, [3.0, 1.0, 2.0]).unwrap();
        assert_eq!(eigen_spectrum(&h, 2).unwrap().eigenvalues, vec![1.0, 2.0]);
        assert!(matches!(eigen_spectrum(&h, 3), Err(Error::TooManyLevels { .. })));

        let kerr = ModelParams::<f64>::cavity(Nonlinearity::Kerr, 0.1).build(20).unwrap();
        let sp = eigen_spectrum(&kerr, 4).unwrap();
        let expect = [0.0, 1.0, 2.2, 3.6];
        for (a, b) in sp.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(eigen_spectrum(&kerr, 4).unwrap(), sp);
    }

    #[test]
    fn ground_reference_ignores_identity_shift() {
        let m = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.1, 1.0);
        let h = m.build(40).unwrap();
        let shifted = &h + &Op::identity(h.space()).scale_real(7.3);
        let a = eigen_spectrum(&h, 6).unwrap().ground_referenced();
        let b = eigen_spectrum(&shifted, 6).unwrap().ground_referenced();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-10);
        }
        assert_eq!(a.eigenvalues[0], 0.0);
    }

    #[test]
    fn convergence_examples() {
        let kerr = ModelParams::<f64>::cavity(Nonlinearity::Kerr, 0.1);
        let (_, drift) = convergence_check(|c| kerr.build(c), 4, 8, 1e-8).unwrap();
        assert!(drift < 1e-14);

        let minus = ModelParams::<f64>::cavity(Nonlinearity::Minus, 0.1);
        let (sp, drift) = convergence_check(|c| minus.build(c), 6, 40, 1e-8).unwrap();
        assert!(drift < 1e-8 && sp.converged == Some(true));

        let m = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.1, 3.0);
        let (sp, _) = convergence_check(|c| m.build(c), 6, 20, 1e-6).unwrap();
        assert_eq!(sp.converged, Some(false));
    }

    #[test]
    fn minus_ground_energy_is_variational_in_cutoff() {
        let m = ModelParams::<f64>::cavity(Nonlinearity::Minus, 0.1);
        let grounds: Vec<f64> = [10, 20, 40, 80]
            .iter()
            .map(|&n| eigen_spectrum(&m.build(n).unwrap(), 1).unwrap().eigenvalues[0])
            .collect();
        for w in grounds.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn minus_first_gap_strictly_increases_with_j() {
        let gaps: Vec<f64> = (0..=5)
            .map(|i| {
                let m = ModelParams::<f64>::cavity(Nonlinearity::Minus, 0.02 * i as f64);
                m.spectrum(2, None, 1e-8).unwrap().eigenvalues[1]
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
    }

    #[test]
    fn sweep_at_zero_coupling() {
        let m = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.0, 0.0);
        let t = sweep(&m, Control::Eta, &[0.0], 6, None, 1e-6).unwrap();
        let expect = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0];
        for (a, b) in t.rows[0].levels.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(t.all_converged());
        assert!(sweep(&m, Control::Eta, &[], 6, None, 1e-6).is_err());
        assert!(sweep(&m, Control::Eta, &[1.0, 0.5], 6, None, 1e-6).is_err());
    }

    #[test]
    fn sweep_is_deterministic_and_matches_fresh_spectra() {
        let m = ModelParams::<f64>::rabi(Gauge::Coulomb, Flavor::Corrected, Nonlinearity::Kerr, 0.05, 0.0);
        let grid = linspace(0.0, 1.0, 5);
        let a = sweep(&m, Control::Eta, &grid, 4, Some(30), 1e-6).unwrap();
        let b = sweep(&m, Control::Eta, &grid, 4, Some(30), 1e-6).unwrap();
        assert_eq!(a, b);
        let fresh = m.clone().with_eta(grid[3]).spectrum(4, Some(30), 1e-6).unwrap();
        assert_eq!(a.rows[3].levels, fresh.eigenvalues);
    }

    #[test]
    fn unconverged_rows_are_flagged_not_fatal() {
        let m = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.1, 0.0);
        let t = sweep(&m, Control::Eta, &[0.0, 3.0], 6, Some(16), 1e-6).unwrap();
        assert!(t.rows[0].converged && !t.rows[1].converged);
        assert!(!t.all_converged());
    }

    #[test]
    fn naive_and_corrected_agree_only_at_weak_coupling() {
        let corr = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, 0.05, 0.0);
        let naive = ModelParams { flavor: Flavor::Naive, ..corr.clone() };
        let grid = [0.0, 0.05, 3.0];
        let c = sweep(&corr, Control::Eta, &grid, 6, None, 1e-6).unwrap();
        let n = sweep(&naive, Control::Eta, &grid, 6, None, 1e-6).unwrap();
        for i in 0..2 {
            let (a, b) = (c.rows[i].levels[1], n.rows[i].levels[1]);
            assert!((a - b).abs() / a < 0.01);
        }
        let (a, b) = (c.rows[2].levels[1], n.rows[2].levels[1]);
        assert!((a - b).abs() / a > 0.1, "{a} {b}");
    }

    #[test]
    fn gauge_check_examples() {
        let r = gauge_invariance_check::<f64>(Nonlinearity::Minus, &[(0.0, 0.1), (1.0, 0.1)], 6).unwrap();
        assert_eq!(r.points[0].physical, 0.0);
        assert!(r.physical_passed() && r.exact_passed(), "{r:?}");

        let r = gauge_invariance_check_with(Nonlinearity::Kerr, &[(2.0, 0.1)], 6, GaugePair::naive()).unwrap();
        assert!(r.exact_passed());
        assert!(!r.physical_passed());
        assert!(r.max_physical() > 1e-2);
    }

    fn flipped_minus_dipole(p: &RabiParams<f64>, s: &SpaceDescriptor) -> Result<Op<f64>> {
        // a' with the wrong sign of the sigma_x shift
        let b = crate::hamiltonians::dipole_photon_operator(-p.eta, s)?;
        let v = (&b.adjoint() - &b).powi(4).scale_real(p.resonator.j * p.resonator.omega_c / 6.0);
        Ok((crate::hamiltonians::rabi_dipole(p, s)? + v).hermitize())
    }

    #[test]
    fn injected_sign_flip_breaks_gauge_check() {
        let pair = GaugePair {
            dipole: flipped_minus_dipole,
            ..GaugePair::corrected()
        };
        let r = gauge_invariance_check_with(Nonlinearity::Minus, &[(1.0, 0.1)], 6, pair).unwrap();
        assert!(!r.physical_passed());
    }

    #[test]
    fn decoupling_harmonic_limit() {
        let r = decoupling_check::<f64>(Flavor::Corrected, 0.0, &[10.0], 6, 1e-3).unwrap();
        let expect = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        for (a, b) in r.final_point().levels.iter().zip(expect) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!(r.passed());
    }

    #[test]
    fn noise_floor_monotonicity() {
        assert!(non_increasing(&[3.0, 2.0, 2.0, 1.0], 1e-9));
        assert!(!non_increasing(&[3.0, 4.0], 1e-9));
        assert!(non_increasing(&[1e-3, 1e-12, 3e-12], 1e-9));
        assert!(!non_increasing(&[1e-3, 1e-12, 3e-9], 1e-9));
    }

    #[test]
    fn renormalized_levels_share_first_gap() {
        let r = renormalized_levels::<f64>(0.05, 4, CAVITY_CUTOFF).unwrap();
        assert!((r.plus[1] - 1.0).abs() < 1e-10 && (r.minus[1] - 1.0).abs() < 1e-10);
        assert!(r.omega_minus < 1.0);
        for (a, b) in r.kerr.iter().zip([0.0, 1.0, 2.1, 3.3]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn control_parsing_and_labels() {
        assert_eq!("eta".parse::<Control>().unwrap(), Control::Eta);
        assert_eq!("J".parse::<Control>().unwrap(), Control::J);
        assert!("x".parse::<Control>().is_err());
        let m = ModelParams::<f64>::rabi(Gauge::Coulomb, Flavor::Naive, Nonlinearity::Kerr, 0.1, 1.0);
        assert_eq!(m.label(), "naive-coulomb-kerr");
        assert_eq!(ModelParams::<f64>::cavity(Nonlinearity::Plus, 0.1).label(), "cavity-plus");
    }

    #[test]
    fn spectrum_json_round_trip() {
        let s = ModelParams::<f64>::cavity(Nonlinearity::Minus, 0.1).spectrum(4, Some(30), 1e-6).unwrap();
        let back: Spectrum<f64> = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn ground_referenced_spectra_start_at_zero_and_ascend(eta in 0.0f64..2.0, j in 0.0f64..0.1) {
            let m = ModelParams::<f64>::rabi(Gauge::Dipole, Flavor::Corrected, Nonlinearity::Minus, j, eta);
            let s = eigen_spectrum(&m.build(30).unwrap(), 8).unwrap().ground_referenced();
            prop_assert_eq!(s.eigenvalues[0], 0.0);
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
