//! Two-mode Hopfield model and its nonlinear photon-like polariton.
//!
//! The linear model is
//!
//! ```text
//! H = w_ph a^dag a + w_m b^dag b + w_ph [ i lambda (a^dag - a)(b + b^dag) + lambda^2 (b + b^dag)^2 ]
//! ```
//!
//! and the matter mode carries the quartic `(J_b w_m / 6)(b + b^dag)^4`.
//! Polariton operators are `P_n = A_n^* a + B_n^* b - A'_n a^dag - B'_n b^dag`.
//!
//! Coefficient formulas are written in terms of `w0 = w_m` (matter) and
//! `wc = w_ph` (photon); this assignment is the one for which they solve
//! `[P_n, H] = w_n P_n`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{destroy, destroy_matter, OperatorMatrix, SpaceDescriptor};
use crate::hamiltonians::{nonlinear_cavity, Nonlinearity, ResonatorParams};
use crate::scalar::{cabs, Real};

type Op<T> = OperatorMatrix<T>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HopfieldParams<T: Real> {
    pub omega_photon: T,
    pub omega_matter: T,
    pub lambda: T,
    /// Matter-mode quartic nonlinearity.
    pub j_b: T,
}

impl<T: Real> HopfieldParams<T> {
    pub fn new(omega_photon: T, omega_matter: T, lambda: T, j_b: T) -> Result<Self> {
        let p = Self {
            omega_photon,
            omega_matter,
            lambda,
            j_b,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_photon > T::zero()) || !(self.omega_matter > T::zero()) {
            return Err(Error::InvalidParameter("polariton frequencies must be positive".into()));
        }
        if !(self.lambda >= T::zero()) {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.j_b >= T::zero()) {
            return Err(Error::InvalidParameter(format!("J_b must be non-negative, got {}", self.j_b)));
        }
        Ok(())
    }
}

/// Polariton frequencies and Hopfield coefficients, indexed lower (0) and upper (1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HopfieldSolution<T: Real> {
    pub omega: [T; 2],
    pub a: [Complex<T>; 2],
    pub a_prime: [Complex<T>; 2],
    pub b: [Complex<T>; 2],
    pub b_prime: [Complex<T>; 2],
    pub phi: [T; 2],
    /// `C_n = |B_n| 2 w_m / (w_n + w_m)`, the weight of `P_n` in `b + b^dag`.
    pub c: [T; 2],
    /// Index of the polariton that reduces to the bare photon as `lambda -> 0`.
    pub photon_like: usize,
    /// `J_b C^4` of the photon-like polariton.
    pub j_eff: T,
}

impl<T: Real> HopfieldSolution<T> {
    /// `|A|^2 + |B|^2 - |A'|^2 - |B'|^2`, which is 1 for a bosonic `P_n`.
    pub fn bosonicity(&self, n: usize) -> T {
        self.a[n].norm_sqr() + self.b[n].norm_sqr() - self.a_prime[n].norm_sqr() - self.b_prime[n].norm_sqr()
    }

    pub fn photon_like_frequency(&self) -> T {
        self.omega[self.photon_like]
    }
}

/// The two positive roots of `w^4 - (w_ph^2 + w_m^2 + 4 lambda^2 w_ph w_m) w^2 + w_ph^2 w_m^2 = 0`, ascending.
pub fn polariton_frequencies<T: Real>(p: &HopfieldParams<T>) -> Result<(T, T)> {
    p.validate()?;
    let (wp, wm, l) = (p.omega_photon, p.omega_matter, p.lambda);
    let four = T::lit(4.0);
    let s = wp * wp + wm * wm + four * l * l * wp * wm;
    let prod = wp * wp * wm * wm;
    let disc = s * s - four * prod;
    assert!(disc >= -T::default_epsilon() * s * s, "negative discriminant for real lambda");
    let hi_sq = (s + disc.max(T::zero()).sqrt()) * T::lit(0.5);
    // the small root from the product avoids cancellation
    let lo_sq = prod / hi_sq;
    Ok((lo_sq.sqrt(), hi_sq.sqrt()))
}

fn sign<T: Real>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn cis<T: Real>(x: T) -> Complex<T> {
    Complex::new(x.cos(), x.sin())
}

/// Closed-form coefficients for one polariton; `w0` is the matter frequency,
/// `wc` the photon frequency.
///
/// The ratios `|x^2 - y^2| / (x - y)` are reduced to `sgn(x - y)(x + y)` so the
/// expressions stay accurate as `lambda -> 0`.
fn coefficients<T: Real>(w0: T, wc: T, lambda: T, wn: T, phi: T) -> [Complex<T>; 4] {
    let two = T::lit(2.0);
    let diff0 = w0 * w0 - wn * wn;
    let d = (diff0 * diff0 * wn * wc + T::lit(4.0) * lambda * lambda * w0 * wn.powi(5)).sqrt();
    let half_pi = T::frac_pi_2();
    let pi = T::pi();
    let a = cis(-(phi + half_pi)).scale(sign(wn - wc) * (wn + wc) * diff0.abs() / (two * d));
    let a_prime = a.conj().scale((wn - wc) / (wn + wc));
    let b = cis(-(phi + pi)).scale(lambda * wn * wn * sign(wn - wc) * sign(wn - w0) * (w0 + wn) / d);
    let b_prime = (b * cis(two * phi + pi)).scale((wn - w0) / (wn + w0));
    [a, a_prime, b, b_prime]
}

fn photon_like_index<T: Real>(p: &HopfieldParams<T>) -> usize {
    if p.omega_photon <= p.omega_matter {
        0
    } else {
        1
    }
}

/// Frequencies, coefficients and effective nonlinearity of both polaritons.
///
/// Phases: the matter-like polariton uses `phi = pi`; the photon-like one
/// uses `phi = pi/2` (or `-pi/2` when the photon is the upper mode) so that
/// `A -> 1` as `lambda -> 0`. At `lambda = 0` the bare modes are returned.
pub fn hopfield_coefficients<T: Real>(p: &HopfieldParams<T>) -> Result<HopfieldSolution<T>> {
    let (w1, w2) = polariton_frequencies(p)?;
    let omega = [w1, w2];
    let photon_like = photon_like_index(p);
    let matter_like = 1 - photon_like;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut phi = [T::zero(); 2];
    phi[matter_like] = T::pi();
    phi[photon_like] = if photon_like == 0 { T::frac_pi_2() } else { -T::frac_pi_2() };

    let (mut a, mut a_prime, mut b, mut b_prime) = ([zero; 2], [zero; 2], [zero; 2], [zero; 2]);
    if p.lambda == T::zero() {
        a[photon_like] = one;
        b[matter_like] = one;
    } else {
        for n in 0..2 {
            let [an, apn, bn, bpn] = coefficients(p.omega_matter, p.omega_photon, p.lambda, omega[n], phi[n]);
            a[n] = an;
            a_prime[n] = apn;
            b[n] = bn;
            b_prime[n] = bpn;
        }
    }
    let wm = p.omega_matter;
    let c = [0, 1].map(|n| cabs(b[n]) * T::lit(2.0) * wm / (omega[n] + wm));
    let j_eff = p.j_b * c[photon_like].powi(4);
    Ok(HopfieldSolution {
        omega,
        a,
        a_prime,
        b,
        b_prime,
        phi,
        c,
        photon_like,
        j_eff,
    })
}

/// `P_n = A_n^* a + B_n^* b - A'_n a^dag - B'_n b^dag` on a photon ⊗ matter space.
pub fn polariton_operator<T: Real>(sol: &HopfieldSolution<T>, n: usize, space: &SpaceDescriptor) -> Result<Op<T>> {
    if n > 1 {
        return Err(Error::InvalidParameter(format!("polariton index {n} (expected 0 or 1)")));
    }
    let a = destroy::<T>(space)?;
    let b = destroy_matter::<T>(space)?;
    Ok(a.scale(sol.a[n].conj()) + b.scale(sol.b[n].conj())
        - a.adjoint().scale(sol.a_prime[n])
        - b.adjoint().scale(sol.b_prime[n]))
}

/// Single-mode model `w_1 P^dag P + (J_eff w_m / 6)(P - P^dag)^4` of the photon-like polariton.
pub fn effective_polariton_hamiltonian<T: Real>(p: &HopfieldParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    if !space.is_photon_only() {
        return Err(Error::InvalidSpace(format!("expected a single-mode space, got {space}")));
    }
    let sol = hopfield_coefficients(p)?;
    let w = sol.photon_like_frequency();
    let res = ResonatorParams::new(w, sol.j_eff * p.omega_matter / w, Nonlinearity::Minus)?;
    nonlinear_cavity(&res, space)
}

/// Full two-mode Hamiltonian including the matter quartic.
pub fn two_mode_oracle<T: Real>(p: &HopfieldParams<T>, space: &SpaceDescriptor) -> Result<Op<T>> {
    p.validate()?;
    let a = destroy::<T>(space)?;
    let b = destroy_matter::<T>(space)?;
    let x = &b + &b.adjoint();
    let x2 = &x * &x;
    let (wp, wm, l) = (p.omega_photon, p.omega_matter, p.lambda);
    let mut h = (&a.adjoint() * &a).scale_real(wp) + (&b.adjoint() * &b).scale_real(wm);
    h += &(&(&a.adjoint() - &a) * &x).scale(Complex::new(T::zero(), wp * l));
    h += &x2.scale_real(wp * l * l);
    if p.j_b > T::zero() {
        h += &(&x2 * &x2).scale_real(p.j_b * wm / T::lit(6.0));
    }
    Ok(h.hermitize())
}

/// Lower and upper polariton frequencies read off a linear spectrum.
///
/// The first transition is the lower polariton; the upper one is the lowest
/// remaining transition after discarding the lower-polariton ladder `n w_1`.
pub fn frequencies_from_spectrum<T: Real>(relative_levels: &[T], tol: T) -> Option<(T, T)> {
    let w1 = *relative_levels.get(1)?;
    let w2 = relative_levels[2..].iter().copied().find(|&e| {
        let n = (e / w1).round();
        (e - n * w1).abs() > tol
    })?;
    Some((w1, w2))
}

/// Lowest `levels` transitions of the photon-like ladder of the quartic two-mode model.
///
/// Each rung `n` is taken from the linear (`J_b = 0`) spectrum as the level
/// closest to `n w_pl`; the nonlinear eigenstate with the largest overlap
/// with it is that rung's partner.
pub fn photon_like_ladder<T: Real>(p: &HopfieldParams<T>, levels: usize, space: &SpaceDescriptor) -> Result<Vec<T>> {
    let linear = HopfieldParams { j_b: T::zero(), ..*p };
    let sol = hopfield_coefficients(p)?;
    let w_pl = sol.photon_like_frequency();
    let (e_lin, v_lin) = T::eigh(two_mode_oracle(&linear, space)?.entries())?;
    let (e_nl, v_nl) = T::eigh(two_mode_oracle(p, space)?.entries())?;
    let search = (4 * levels + 16).min(e_nl.len());
    let mut out = Vec::with_capacity(levels);
    for n in 1..=levels {
        let target = T::from_usize(n).unwrap() * w_pl;
        let lin_idx = (0..search)
            .min_by(|&i, &j| {
                let di = (e_lin[i] - e_lin[0] - target).abs();
                let dj = (e_lin[j] - e_lin[0] - target).abs();
                di.partial_cmp(&dj).unwrap()
            })
            .unwrap();
        let lin_vec = v_lin.column(lin_idx);
        let nl_idx = (1..search)
            .max_by(|&i, &j| {
                let oi = v_nl.column(i).dotc(&lin_vec).norm_sqr();
                let oj = v_nl.column(j).dotc(&lin_vec).norm_sqr();
                oi.partial_cmp(&oj).unwrap()
            })
            .unwrap();
        out.push(e_nl[nl_idx] - e_nl[0]);
    }
    Ok(out)
}

/// `|E_eff,n - E_full,n| / E_full,n` for the first `rungs` photon-like
/// transitions: effective single-mode model against the two-mode oracle.
pub fn effective_model_errors<T: Real>(
    p: &HopfieldParams<T>,
    rungs: usize,
    oracle_cutoff: usize,
    effective_cutoff: usize,
) -> Result<Vec<T>> {
    let full = photon_like_ladder(p, rungs, &SpaceDescriptor::photon_matter(oracle_cutoff, oracle_cutoff)?)?;
    let eff = T::eigvalsh(effective_polariton_hamiltonian(p, &SpaceDescriptor::photon(effective_cutoff)?)?.entries())?;
    Ok(full
        .iter()
        .enumerate()
        .map(|(n, &f)| ((eff[n + 1] - eff[0]) - f).abs() / f)
        .collect())
}

/// Max over `|[P, H] - w P|` restricted to basis states with fewer than half
/// of each cutoff's quanta, away from truncation artifacts.
pub fn commutator_residual<T: Real>(p: &HopfieldParams<T>, n: usize, space: &SpaceDescriptor) -> Result<T> {
    let sol = hopfield_coefficients(p)?;
    let h = two_mode_oracle(&HopfieldParams { j_b: T::zero(), ..*p }, space)?;
    let pn = polariton_operator(&sol, n, space)?;
    let r = &pn.commutator(&h) - &pn.scale_real(sol.omega[n]);
    let nc = space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
    let mc = space.matter_cutoff().ok_or(Error::MissingFactor("matter"))?;
    let low: Vec<usize> = (0..nc * mc).filter(|&i| i / mc < nc / 2 && i % mc < mc / 2).collect();
    let entries: &DMatrix<Complex<T>> = r.entries();
    let mut worst = T::zero();
    for &i in &low {
        for &j in &low {
            worst = worst.max(cabs(entries[(i, j)]));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hp(wp: f64, wm: f64, l: f64, jb: f64) -> HopfieldParams<f64> {
        HopfieldParams::new(wp, wm, l, jb).unwrap()
    }

    fn relative(h: &OperatorMatrix<f64>) -> Vec<f64> {
        let e = f64::eigvalsh(h.entries()).unwrap();
        e.iter().map(|x| x - e[0]).collect()
    }

    #[test]
    fn bare_limit_frequencies() {
        assert_eq!(polariton_frequencies(&hp(1.0, 2.0, 0.0, 0.0)).unwrap(), (1.0, 2.0));
        assert_eq!(polariton_frequencies(&hp(2.0, 1.0, 0.0, 0.0)).unwrap(), (1.0, 2.0));
        let (a, b) = polariton_frequencies(&hp(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dispersive_frequencies() {
        let (w1, w2) = polariton_frequencies(&hp(1.0, 2.0, 0.1, 0.0)).unwrap();
        assert!((w1 - 0.987036).abs() < 1e-5, "{w1}");
        assert!((w2 - 2.026268).abs() < 1e-5, "{w2}");
        // dispersion relation in the matter/photon roles of the coefficient formulas
        let (w0, wc, l) = (2.0, 1.0, 0.1);
        for wn in [w1, w2] {
            let lhs = 1.0 + 4.0 * l * l * w0 * wc / (w0 * w0 - wn * wn);
            assert!((lhs - wc * wc / (wn * wn)).abs() < 1e-10);
        }
    }

    #[test]
    fn decoupled_limit_coefficients() {
        let s = hopfield_coefficients(&hp(1.0, 1.5, 1e-6, 0.0)).unwrap();
        assert_eq!(s.photon_like, 0);
        assert!((s.a[0].norm() - 1.0).abs() < 1e-4 && s.b[0].norm() < 1e-4);
        assert!(s.a[1].norm() < 1e-4 && (s.b[1].norm() - 1.0).abs() < 1e-4);
        assert!((s.a[0] - Complex::new(1.0, 0.0)).norm() < 1e-4);

        let s = hopfield_coefficients(&hp(1.5, 1.0, 1e-6, 0.0)).unwrap();
        assert_eq!(s.photon_like, 1);
        assert!((s.a[1] - Complex::new(1.0, 0.0)).norm() < 1e-4);
        assert!((s.b[0].norm() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn zero_coupling_branch() {
        let s = hopfield_coefficients(&hp(1.0, 2.0, 0.0, 0.3)).unwrap();
        assert_eq!(s.a[0], Complex::new(1.0, 0.0));
        assert_eq!(s.b[1], Complex::new(1.0, 0.0));
        assert_eq!(s.j_eff, 0.0);
        assert_eq!(s.bosonicity(0), 1.0);
        assert_eq!(s.bosonicity(1), 1.0);
    }

    #[test]
    fn bosonicity_example() {
        let s = hopfield_coefficients(&hp(1.0, 1.5, 0.2, 0.0)).unwrap();
        for n in 0..2 {
            assert!((s.bosonicity(n) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn c_equals_weight_in_matter_quadrature() {
        let s = hopfield_coefficients(&hp(1.0, 1.5, 0.2, 0.0)).unwrap();
        for n in 0..2 {
            assert!((s.c[n] - (s.b[n] + s.b_prime[n].conj()).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_with_linear_hamiltonian() {
        let space = SpaceDescriptor::photon_matter(30, 30).unwrap();
        let p = hp(1.0, 1.5, 0.2, 0.0);
        for n in 0..2 {
            let r = commutator_residual(&p, n, &space).unwrap();
            assert!(r < 1e-6, "polariton {n}: {r:e}");
        }
    }

    #[test]
    fn effective_model_limits() {
        let s = SpaceDescriptor::photon(40).unwrap();
        let p = hp(1.0, 2.0, 0.1, 0.0);
        let (w1, _) = polariton_frequencies(&p).unwrap();
        let e = relative(&effective_polariton_hamiltonian(&p, &s).unwrap());
        for n in 0..5 {
            assert!((e[n] - n as f64 * w1).abs() < 1e-12);
        }
        let sol = hopfield_coefficients(&hp(1.0, 2.0, 1e-6, 0.3)).unwrap();
        assert!(sol.j_eff < 1e-20);
    }

    #[test]
    fn two_mode_oracle_bare_spectrum() {
        let s = SpaceDescriptor::photon_matter(8, 8).unwrap();
        let e = relative(&two_mode_oracle(&hp(1.0, 2.0, 0.0, 0.0), &s).unwrap());
        let mut expect: Vec<f64> = (0..8).flat_map(|n| (0..8).map(move |m| n as f64 + 2.0 * m as f64)).collect();
        expect.sort_by(f64::total_cmp);
        for k in 0..20 {
            assert!((e[k] - expect[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn two_mode_oracle_reproduces_polariton_frequencies() {
        let s = SpaceDescriptor::photon_matter(30, 30).unwrap();
        let p = hp(1.0, 2.0, 0.1, 0.0);
        let e = relative(&two_mode_oracle(&p, &s).unwrap());
        let (o1, o2) = frequencies_from_spectrum(&e, 1e-6).unwrap();
        assert!((o1 - 0.987036).abs() < 1e-5 && (o2 - 2.026268).abs() < 1e-5);
        let (w1, w2) = polariton_frequencies(&p).unwrap();
        assert!((o1 - w1).abs() < 1e-6 && (o2 - w2).abs() < 1e-6);
    }

    #[test]
    fn ground_energy_shift_is_quadratic_in_coupling() {
        // Second-order shift of the ground level: +lambda^2 w_ph w_m / (w_ph + w_m).
        let s = SpaceDescriptor::photon_matter(12, 12).unwrap();
        let ground = |l: f64| f64::eigvalsh(two_mode_oracle(&hp(1.0, 2.0, l, 0.0), &s).unwrap().entries()).unwrap()[0];
        let lambdas: Vec<f64> = (0..5).map(|i| 0.01 + 0.01 * i as f64).collect();
        let shifts: Vec<f64> = lambdas.iter().map(|&l| ground(l)).collect();
        assert!(shifts.iter().all(|&d| d > 0.0));
        let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
        let ys: Vec<f64> = shifts.iter().map(|d| d.ln()).collect();
        let mx = xs.iter().sum::<f64>() / 5.0;
        let my = ys.iter().sum::<f64>() / 5.0;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.0).abs() < 0.1, "{slope}");
        assert!((shifts[0] / 1e-4 - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn effective_model_degrades_at_resonance() {
        let near = effective_model_errors(&hp(1.0, 1.0, 0.1, 0.3), 3, 30, 60).unwrap();
        assert!(near.iter().cloned().fold(0.0, f64::max) > 0.05, "{near:?}");
        let far = effective_model_errors(&hp(1.0, 2.0, 0.1, 0.3), 3, 30, 60).unwrap();
        assert!(far.iter().all(|&e| e < 0.02), "{far:?}");
    }

    #[test]
    fn dispersive_effective_model_matches_oracle() {
        let p = hp(1.0, 2.0, 0.1, 0.3);
        let full = photon_like_ladder(&p, 3, &SpaceDescriptor::photon_matter(30, 30).unwrap()).unwrap();
        let eff = relative(&effective_polariton_hamiltonian(&p, &SpaceDescriptor::photon(60).unwrap()).unwrap());
        for n in 0..3 {
            let err = (eff[n + 1] - full[n]).abs() / full[n];
            assert!(err < 0.02, "rung {}: {} vs {}", n + 1, eff[n + 1], full[n]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn vieta_identities(wp in 0.2f64..3.0, wm in 0.2f64..3.0, l in 0.0f64..0.6) {
            let p = hp(wp, wm, l, 0.0);
            let (w1, w2) = polariton_frequencies(&p).unwrap();
            prop_assert!(w1 <= w2 && w1 > 0.0);
            let s = wp * wp + wm * wm + 4.0 * l * l * wp * wm;
            prop_assert!((w1 * w1 + w2 * w2 - s).abs() < 1e-10 * s);
            prop_assert!((w1 * w1 * w2 * w2 - wp * wp * wm * wm).abs() < 1e-10 * (wp * wm).powi(2));
        }

        #[test]
        fn bosonicity_across_grid(l in 0.01f64..0.5, ratio in 1.1f64..3.0, photon_below in proptest::bool::ANY) {
            let p = if photon_below { hp(1.0, ratio, l, 0.0) } else { hp(ratio, 1.0, l, 0.0) };
            let s = hopfield_coefficients(&p).unwrap();
            for n in 0..2 {
                prop_assert!((s.bosonicity(n) - 1.0).abs() < 1e-10, "n={} b={}", n, s.bosonicity(n));
            }
        }
    }
}
