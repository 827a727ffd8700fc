//! Model Hamiltonians.
//!
//! Nonlinear resonators `H_c = w a^dag a + V` with
//!
//! * Kerr: `V_K = J w a^dag^2 a^2`
//! * quartic: `V_± = (J w / 6) (a^dag ± a)^4`
//!
//! and their Rabi extensions with a qubit `H_q = (w_q / 2) sigma_z`, in the
//! dipole gauge (`H_D = w a'^dag a' + H_q`, `a' = a + i eta sigma_x`) and the
//! Coulomb gauge (`H_C = w a^dag a + U H_q U^dag`, `U = exp[i eta sigma_x (a + a^dag)]`).
//!
//! The "naive" nonlinear dipole model adds `V(a)` to `H_D`; the corrected one
//! substitutes `a -> a'` inside `V` as well.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    destroy, exp_i, hermitian_function_real, lift_photon, number, pauli_on, Axis, OperatorMatrix,
    SpaceDescriptor,
};
use crate::scalar::Real;

type Op<T> = OperatorMatrix<T>;

/// Photon self-interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Kerr,
    Plus,
    Minus,
}

impl Nonlinearity {
    pub fn label(&self) -> &'static str {
        match self {
            Nonlinearity::Kerr => "kerr",
            Nonlinearity::Plus => "plus",
            Nonlinearity::Minus => "minus",
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k" | "kerr" => Ok(Nonlinearity::Kerr),
            "+" | "plus" | "p" => Ok(Nonlinearity::Plus),
            "-" | "minus" | "m" => Ok(Nonlinearity::Minus),
            _ => Err(Error::InvalidParameter(format!(
                "unknown nonlinearity `{s}` (expected kerr, plus or minus)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Dipole,
    Coulomb,
}

impl FromStr for Gauge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dipole" | "d" => Ok(Gauge::Dipole),
            "coulomb" | "c" => Ok(Gauge::Coulomb),
            _ => Err(Error::InvalidParameter(format!(
                "unknown gauge `{s}` (expected dipole or coulomb)"
            ))),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::Dipole => "dipole",
            Gauge::Coulomb => "coulomb",
        })
    }
}

/// How the nonlinearity enters a Rabi model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Plain quantum Rabi model, `J` ignored.
    Linear,
    /// `V(a)` added after the gauge transformation (gauge-violating).
    Naive,
    /// `V` transformed together with the rest of the resonator Hamiltonian.
    Corrected,
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Flavor::Linear),
            "naive" | "standard" => Ok(Flavor::Naive),
            "corrected" => Ok(Flavor::Corrected),
            _ => Err(Error::InvalidParameter(format!(
                "unknown flavor `{s}` (expected linear, naive or corrected)"
            ))),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Linear => "linear",
            Flavor::Naive => "naive",
            Flavor::Corrected => "corrected",
        })
    }
}

/// Single nonlinear resonator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ResonatorParams<T: Real> {
    pub omega_c: T,
    /// Dimensionless nonlinear coefficient.
    pub j: T,
    pub variant: Nonlinearity,
}

impl<T: Real> ResonatorParams<T> {
    pub fn new(omega_c: T, j: T, variant: Nonlinearity) -> Result<Self> {
        let p = Self { omega_c, j, variant };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > T::zero()) {
            return Err(Error::InvalidParameter(format!("omega_c must be positive, got {}", self.omega_c)));
        }
        if !(self.j >= T::zero()) {
            return Err(Error::InvalidParameter(format!("J must be non-negative, got {}", self.j)));
        }
        Ok(())
    }
}

/// Resonator coupled to a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RabiParams<T: Real> {
    pub resonator: ResonatorParams<T>,
    pub omega_q: T,
    /// Normalized coupling strength.
    pub eta: T,
    pub gauge: Gauge,
    pub flavor: Flavor,
}

impl<T: Real> RabiParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.resonator.validate()?;
        if !(self.omega_q > T::zero()) {
            return Err(Error::InvalidParameter(format!("omega_q must be positive, got {}", self.omega_q)));
        }
        if !(self.eta >= T::zero()) {
            return Err(Error::InvalidParameter(format!("eta must be non-negative, got {}", self.eta)));
        }
        Ok(())
    }

    fn omega_c(&self) -> T {
        self.resonator.omega_c
    }
}

fn imag<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

/// Photon cutoff used when none is given: `max(60, 40 + eta^2 + 12 eta + 20 J (1 + eta))`.
///
/// Large enough that the doubled-cutoff drift of the lowest levels stays far
/// below `1e-6` over `eta <= 10`, `J <= 0.1`; every reported spectrum is still
/// checked by doubling.
pub fn default_cutoff(eta: f64, j: f64) -> usize {
    let raw = 40.0 + eta * eta + 12.0 * eta + 20.0 * j * (1.0 + eta);
    (raw.ceil() as usize).max(60)
}

/// `w a^dag a`.
pub fn bare_cavity<T: Real>(p: &ResonatorParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    Ok(number::<T>(space)?.scale_real(p.omega_c))
}

/// `V(b)` for an arbitrary bosonic-like operator `b` (bare `a` or transformed `a'`).
fn potential_of<T: Real>(b: &Op<T>, variant: Nonlinearity, strength: T) -> Op<T> {
    let bd = b.adjoint();
    let v = match variant {
        Nonlinearity::Kerr => {
            let bd2 = &bd * &bd;
            let b2 = b * b;
            (&bd2 * &b2).scale_real(strength)
        }
        Nonlinearity::Plus => (&bd + b).powi(4).scale_real(strength / T::lit(6.0)),
        Nonlinearity::Minus => (&bd - b).powi(4).scale_real(strength / T::lit(6.0)),
    };
    v.hermitize()
}

/// `V(b)` built with two spare photon levels and projected back, so the
/// result is the exact compression of the untruncated quartic.
fn projected_potential<T: Real>(
    space: &SpaceDescriptor,
    variant: Nonlinearity,
    strength: T,
    b: impl Fn(&SpaceDescriptor) -> Result<Op<T>>,
) -> Result<Op<T>> {
    let n = space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
    let padded = space.with_photon_cutoff(n + 2)?;
    potential_of(&b(&padded)?, variant, strength).truncate_photon(n)
}

/// The self-interaction `V` on the photon factor of `space`.
///
/// The Kerr term is filled in as its exact diagonal `J w n (n - 1)`; the
/// quartic terms use dense powers of `a^dag ± a`.
pub fn nonlinear_potential<T: Real>(p: &ResonatorParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let n = space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
    let photon = SpaceDescriptor::photon(n)?;
    let strength = p.j * p.omega_c;
    let local = match p.variant {
        Nonlinearity::Kerr => Op::from_diagonal(
            &photon,
            (0..n).map(|k| {
                let k = T::from_usize(k).unwrap();
                strength * k * (k - T::one())
            }),
        )?,
        variant => projected_potential(&photon, variant, strength, |s| destroy::<T>(s))?,
    };
    if space.is_photon_only() {
        Ok(local)
    } else {
        lift_photon(&local, space)
    }
}

/// `w a^dag a + V`.
pub fn nonlinear_cavity<T: Real>(p: &ResonatorParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    Ok(&bare_cavity(p, space)? + &nonlinear_potential(p, space)?)
}

/// First transition `E_1 - E_0` of a resonator.
pub fn cavity_gap<T: Real>(p: &ResonatorParams<T>, space: &SpaceDescriptor) -> Result<T> {
    let h = nonlinear_cavity(p, &SpaceDescriptor::photon(space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?)?)?;
    let e = T::eigvalsh(h.entries())?;
    Ok(e[1] - e[0])
}

/// Bare frequency `w'` at which the resonator's first transition equals `target_gap`.
///
/// Solved by bracketed regula falsi (Illinois variant) on `[target/4, 4 target]`.
pub fn renormalize_cavity_frequency<T: Real>(
    variant: Nonlinearity,
    j: T,
    target_gap: T,
    space: &SpaceDescriptor,
) -> Result<T> {
    if !(target_gap > T::zero()) {
        return Err(Error::InvalidParameter(format!("target gap must be positive, got {target_gap}")));
    }
    if !(j >= T::zero()) {
        return Err(Error::InvalidParameter(format!("J must be non-negative, got {j}")));
    }
    if j == T::zero() || variant == Nonlinearity::Kerr {
        // Neither term changes the first gap, which is then w itself.
        return Ok(target_gap);
    }
    let f = |w: T| -> Result<T> {
        let p = ResonatorParams { omega_c: w, j, variant };
        Ok(cavity_gap(&p, space)? - target_gap)
    };
    let quarter = T::lit(0.25);
    let (mut lo, mut hi) = (target_gap * quarter, target_gap * T::lit(4.0));
    let (mut f_lo, mut f_hi) = (f(lo)?, f(hi)?);
    if f_lo * f_hi > T::zero() {
        return Err(Error::RootNotBracketed {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }
    let tol = target_gap * T::lit(1e-12).max(T::default_epsilon() * T::lit(16.0));
    let mut side = 0i8;
    for _ in 0..200 {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let fx = f(x)?;
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx * f_hi > T::zero() {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= T::lit(0.5);
            }
            side = -1;
        } else {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= T::lit(0.5);
            }
            side = 1;
        }
        if (hi - lo).abs() <= tol {
            return Ok((lo + hi) * T::lit(0.5));
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// `U = exp[i eta sigma_x (a + a^dag)]`.
pub fn gauge_unitary<T: Real>(eta: T, space: &SpaceDescriptor) -> Result<Op<T>> {
    let a = destroy::<T>(space)?;
    let sx = pauli_on::<T>(Axis::X, space)?;
    let gen = (&sx * &(&a + &a.adjoint())).scale_real(eta).hermitize();
    exp_i(&gen)
}

/// `(w_q / 2) sigma_z`.
pub fn qubit_hamiltonian<T: Real>(omega_q: T, space: &SpaceDescriptor) -> Result<Op<T>> {
    Ok(pauli_on::<T>(Axis::Z, space)?.scale_real(omega_q * T::lit(0.5)))
}

/// Dipole-gauge photon operator `a' = a + i eta sigma_x`.
pub fn dipole_photon_operator<T: Real>(eta: T, space: &SpaceDescriptor) -> Result<Op<T>> {
    let a = destroy::<T>(space)?;
    let sx = pauli_on::<T>(Axis::X, space)?;
    Ok(&a + &sx.scale(imag(eta)))
}

/// `H_D = w a^dag a + (w_q/2) sigma_z + i eta w (a^dag - a) sigma_x + eta^2 w`.
pub fn rabi_dipole<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let w = p.omega_c();
    let a = destroy::<T>(space)?;
    let sx = pauli_on::<T>(Axis::X, space)?;
    let coupling = (&(&a.adjoint() - &a) * &sx).scale(imag(p.eta * w));
    let constant = Op::identity(space).scale_real(p.eta * p.eta * w);
    let h = number::<T>(space)?.scale_real(w) + qubit_hamiltonian(p.omega_q, space)? + coupling + constant;
    Ok(h.hermitize())
}

/// `(w_q/2)[sigma_z cos(2 eta X) + sigma_y sin(2 eta X)]`, `X = a + a^dag`.
fn coulomb_qubit_term<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    let n = space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
    let photon = SpaceDescriptor::photon(n)?;
    let a = destroy::<T>(&photon)?;
    let arg = (&a + &a.adjoint()).scale_real(T::lit(2.0) * p.eta).hermitize();
    let cos = lift_photon(&hermitian_function_real(&arg, |x| x.cos())?, space)?;
    let sin = lift_photon(&hermitian_function_real(&arg, |x| x.sin())?, space)?;
    let sz = pauli_on::<T>(Axis::Z, space)?;
    let sy = pauli_on::<T>(Axis::Y, space)?;
    Ok((&(&sz * &cos) + &(&sy * &sin)).scale_real(p.omega_q * T::lit(0.5)))
}

/// `H_C = w a^dag a + (w_q/2)[sigma_z cos(2 eta X) + sigma_y sin(2 eta X)]`.
pub fn rabi_coulomb<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let h = number::<T>(space)?.scale_real(p.omega_c()) + coulomb_qubit_term(p, space)?;
    Ok(h.hermitize())
}

/// `H_D + V(a)`, the gauge-violating nonlinear dipole model.
pub fn naive_nonlinear_dipole<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    let h = rabi_dipole(p, space)? + nonlinear_potential(&p.resonator, space)?;
    Ok(h.hermitize())
}

/// `H_D + V(a')`: the resonator Hamiltonian with every `a` replaced by `a'`.
pub fn corrected_nonlinear_dipole<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    let v = projected_potential(space, p.resonator.variant, p.resonator.j * p.omega_c(), |s| {
        dipole_photon_operator(p.eta, s)
    })?;
    let h = rabi_dipole(p, space)? + v;
    Ok(h.hermitize())
}

/// `U^dag H_c U + H_q` by explicit numerical conjugation.
///
/// Unitarily equivalent to [`nonlinear_coulomb`] at any truncation; differs
/// from [`corrected_nonlinear_dipole`] only by truncation artifacts of `U`.
pub fn conjugated_nonlinear_dipole<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let u = gauge_unitary(p.eta, space)?;
    let hc = nonlinear_cavity(&p.resonator, space)?;
    let h = &(&u.adjoint() * &hc) * &u;
    Ok((h + qubit_hamiltonian(p.omega_q, space)?).hermitize())
}

/// `H_c + U H_q U^dag`, the nonlinear Coulomb-gauge model.
pub fn nonlinear_coulomb<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let u = gauge_unitary(p.eta, space)?;
    let hq = qubit_hamiltonian(p.omega_q, space)?;
    let sz_prime = &(&u * &hq) * &u.adjoint();
    Ok((nonlinear_cavity(&p.resonator, space)? + sz_prime).hermitize())
}

/// `U (H_D + V(a)) U^dag = H_C + U V U^dag`, the naive model carried to the Coulomb gauge.
pub fn naive_nonlinear_coulomb<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    let u = gauge_unitary(p.eta, space)?;
    let h = &(&u * &naive_nonlinear_dipole(p, space)?) * &u.adjoint();
    Ok(h.hermitize())
}

/// Dispatches on gauge and flavor.
pub fn build_rabi<T: Real>(p: &RabiParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    match (p.gauge, p.flavor) {
        (Gauge::Dipole, Flavor::Linear) => rabi_dipole(p, space),
        (Gauge::Coulomb, Flavor::Linear) => rabi_coulomb(p, space),
        (Gauge::Dipole, Flavor::Naive) => naive_nonlinear_dipole(p, space),
        (Gauge::Coulomb, Flavor::Naive) => naive_nonlinear_coulomb(p, space),
        (Gauge::Dipole, Flavor::Corrected) => corrected_nonlinear_dipole(p, space),
        (Gauge::Coulomb, Flavor::Corrected) => nonlinear_coulomb(p, space),
    }
}
