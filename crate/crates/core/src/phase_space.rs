//! Wigner functions and quadrature squeezing of single-mode states.
//!
//! Phase-space coordinates follow `x = (a + a^dag)/sqrt 2`, `p = -i(a - a^dag)/sqrt 2`,
//! so the vacuum is `W = exp(-x^2 - p^2)/pi`. The Wigner function is the
//! displaced parity
//!
//! ```text
//! W(x, p) = (1/pi) sum_k (-1)^k |<k| D(alpha)^dag |psi>|^2,   alpha = (x + i p)/sqrt 2
//! ```
//!
//! Squeezing uses the amplitude quadratures `X = (a + a^dag)/2`, `P = i(a^dag - a)/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{destroy, expectation, OperatorMatrix, SpaceDescriptor, StateVector};
use crate::hamiltonians::{nonlinear_cavity, Nonlinearity, ResonatorParams};
use crate::scalar::Real;

/// Tail population allowed in the last five Fock levels.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WignerGridSpec<T: Real> {
    pub x_min: T,
    pub x_max: T,
    pub p_min: T,
    pub p_max: T,
    /// Points per axis, endpoints included.
    pub resolution: usize,
}

impl<T: Real> Default for WignerGridSpec<T> {
    fn default() -> Self {
        Self {
            x_min: T::lit(-5.0),
            x_max: T::lit(5.0),
            p_min: T::lit(-5.0),
            p_max: T::lit(5.0),
            resolution: 201,
        }
    }
}

impl<T: Real> WignerGridSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidParameter("Wigner grid needs at least 2 points per axis".into()));
        }
        if !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidParameter("Wigner grid bounds must be increasing".into()));
        }
        Ok(())
    }

    fn axis(lo: T, hi: T, n: usize) -> Vec<T> {
        let step = (hi - lo) / T::from_usize(n - 1).unwrap();
        (0..n).map(|i| lo + step * T::from_usize(i).unwrap()).collect()
    }

    pub fn xs(&self) -> Vec<T> {
        Self::axis(self.x_min, self.x_max, self.resolution)
    }

    pub fn ps(&self) -> Vec<T> {
        Self::axis(self.p_min, self.p_max, self.resolution)
    }
}

/// Wigner function sampled on a rectangular grid; `values[(i, j)] = W(xs[j], ps[i])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WignerGrid<T: Real> {
    pub spec: WignerGridSpec<T>,
    pub xs: Vec<T>,
    pub ps: Vec<T>,
    pub values: DMatrix<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn dx(&self) -> T {
        self.xs[1] - self.xs[0]
    }

    pub fn dp(&self) -> T {
        self.ps[1] - self.ps[0]
    }

    /// Riemann sum of `W dx dp`.
    pub fn normalization(&self) -> T {
        self.values.iter().fold(T::zero(), |s, &w| s + w) * self.dx() * self.dp()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::max_value().unwrap(), |m, &w| m.min(w))
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::min_value().unwrap(), |m, &w| m.max(w))
    }

    /// `sum_p W(x, p) dp`, the position distribution.
    pub fn x_marginal(&self) -> Vec<T> {
        let dp = self.dp();
        (0..self.xs.len())
            .map(|j| self.values.column(j).iter().fold(T::zero(), |s, &w| s + w) * dp)
            .collect()
    }

    /// `sum_x W(x, p) dx`, the momentum distribution.
    pub fn p_marginal(&self) -> Vec<T> {
        let dx = self.dx();
        (0..self.ps.len())
            .map(|i| self.values.row(i).iter().fold(T::zero(), |s, &w| s + w) * dx)
            .collect()
    }
}

fn require_photon_only<T: Real>(psi: &StateVector<T>) -> Result<()> {
    if !psi.space().is_photon_only() {
        return Err(Error::InvalidSpace(format!(
            "phase-space functions need a photon-only state, got {}",
            psi.space()
        )));
    }
    Ok(())
}

/// Smallest `n` with negligible population in levels `>= n`.
fn support<T: Real>(psi: &StateVector<T>) -> usize {
    let amps = psi.amplitudes();
    let eps = T::lit(1e-14);
    let mut tail = T::zero();
    for n in (0..amps.len()).rev() {
        tail += amps[n].norm_sqr();
        if tail > eps {
            return n + 1;
        }
    }
    1
}

fn mat_cmul<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    T::matmul(a, b)
}

/// Wigner function of a photon-only state on `spec`.
///
/// Fails with [`Error::TailPopulation`] if more than `1e-8` of the state sits
/// in the last five Fock levels of its cutoff. Displacements are applied in
/// an enlarged working space sized from the state's support and the grid
/// extent, so the input cutoff does not limit the grid.
pub fn wigner<T: Real>(psi: &StateVector<T>, spec: &WignerGridSpec<T>) -> Result<WignerGrid<T>> {
    require_photon_only(psi)?;
    spec.validate()?;
    let n = psi.amplitudes().len();
    let from = n.saturating_sub(5);
    let tail = psi.tail_population(from);
    let limit = T::lit(TAIL_LIMIT);
    if tail > limit {
        return Err(Error::TailPopulation {
            tail: tail.as_f64(),
            from,
            limit: TAIL_LIMIT,
            cutoff: n,
        });
    }

    let xs = spec.xs();
    let ps = spec.ps();
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let u_max = spec.x_min.abs().max(spec.x_max.abs()) * inv_sqrt2;
    let v_max = spec.p_min.abs().max(spec.p_max.abs()) * inv_sqrt2;
    let reach = T::from_usize(support(psi)).unwrap().sqrt() + u_max + v_max;
    let nw = (reach * reach + T::lit(10.0) * reach + T::lit(20.0))
        .ceil()
        .to_usize()
        .unwrap()
        .max(n);

    let space = SpaceDescriptor::photon(nw)?;
    let psi_w = psi.with_photon_cutoff(nw)?;
    let a = destroy::<T>(&space)?;
    let ad = a.adjoint();
    let kx = (&a + &ad).hermitize();
    let kp = (&ad - &a).scale(Complex::new(T::zero(), -T::one())).hermitize();
    let (lx, vx) = T::eigh(kx.entries())?;
    let (lp, vp) = T::eigh(kp.entries())?;

    // D(-u) psi for every x column, u = x / sqrt 2, via exp(-i u K_p).
    let c = vp.adjoint() * psi_w.amplitudes();
    let nx = xs.len();
    let phases = DMatrix::from_fn(nw, nx, |k, j| {
        let arg = -(xs[j] * inv_sqrt2) * lp[k];
        c[k] * Complex::new(arg.cos(), arg.sin())
    });
    let shifted = mat_cmul(&vp, &phases);
    let g = mat_cmul(&vx.adjoint(), &shifted);

    let parity: Vec<T> = (0..nw).map(|k| if k % 2 == 0 { T::one() } else { -T::one() }).collect();
    let inv_pi = T::FRAC_1_PI();
    let rows: Vec<Vec<T>> = ps
        .par_iter()
        .map(|&p| {
            let v = p * inv_sqrt2;
            let m = DMatrix::from_fn(nw, nx, |k, j| {
                let arg = -v * lx[k];
                g[(k, j)] * Complex::new(arg.cos(), arg.sin())
            });
            let r = mat_cmul(&vx, &m);
            (0..nx)
                .map(|j| {
                    let s = r
                        .column(j)
                        .iter()
                        .zip(&parity)
                        .fold(T::zero(), |acc, (z, &sgn)| acc + sgn * z.norm_sqr());
                    s * inv_pi
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(ps.len(), nx, |i, j| rows[i][j]);
    Ok(WignerGrid {
        spec: spec.clone(),
        xs,
        ps,
        values,
    })
}

/// Variances and symmetrized covariance of `X = (a + a^dag)/2`, `P = i(a^dag - a)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuadratureStats<T: Real> {
    pub var_x: T,
    pub var_p: T,
    pub cov_xp: T,
}

pub fn quadrature_stats<T: Real>(psi: &StateVector<T>) -> Result<QuadratureStats<T>> {
    require_photon_only(psi)?;
    let space = psi.space();
    let a = destroy::<T>(space)?;
    let ad = a.adjoint();
    let half = T::lit(0.5);
    let x: OperatorMatrix<T> = (&a + &ad).scale_real(half);
    let p: OperatorMatrix<T> = (&ad - &a).scale(Complex::new(T::zero(), half));
    let ev = |op: &OperatorMatrix<T>| -> Result<T> { Ok(expectation(op, psi)?.re) };
    let mx = ev(&x)?;
    let mp = ev(&p)?;
    let var_x = ev(&(&x * &x))? - mx * mx;
    let var_p = ev(&(&p * &p))? - mp * mp;
    let sym = &(&x * &p) + &(&p * &x);
    let cov_xp = half * ev(&sym)? - mx * mp;
    Ok(QuadratureStats { var_x, var_p, cov_xp })
}

/// `zeta^2 = [Var X + Var P - sqrt((Var X - Var P)^2 + 4 Cov^2)] / 2`.
pub fn principal_squeezing_from<T: Real>(s: &QuadratureStats<T>) -> T {
    let d = s.var_x - s.var_p;
    let four = T::lit(4.0);
    (s.var_x + s.var_p - (d * d + four * s.cov_xp * s.cov_xp).sqrt()) * T::lit(0.5)
}

/// Smallest quadrature variance over all rotation angles.
pub fn principal_squeezing<T: Real>(psi: &StateVector<T>) -> Result<T> {
    Ok(principal_squeezing_from(&quadrature_stats(psi)?))
}

/// `S^2 = zeta^2(psi) / zeta^2(|n>)`, with the Fock reference evaluated the same way.
pub fn normalized_squeezing<T: Real>(psi: &StateVector<T>, n: usize) -> Result<T> {
    Ok(squeezing_report(psi, n)?.s_sq)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SqueezingReport<T: Real> {
    pub var_x: T,
    pub var_p: T,
    pub cov_xp: T,
    pub zeta_sq: T,
    pub s_sq: T,
    pub reference_level: usize,
}

pub fn squeezing_report<T: Real>(psi: &StateVector<T>, n: usize) -> Result<SqueezingReport<T>> {
    let stats = quadrature_stats(psi)?;
    let zeta_sq = principal_squeezing_from(&stats);
    let fock = StateVector::fock(psi.space(), n)?;
    let reference = principal_squeezing(&fock)?;
    Ok(SqueezingReport {
        var_x: stats.var_x,
        var_p: stats.var_p,
        cov_xp: stats.cov_xp,
        zeta_sq,
        s_sq: zeta_sq / reference,
        reference_level: n,
    })
}

/// Eigenvector `k` (ascending energy) of a photon-only Hamiltonian.
pub fn eigenstate<T: Real>(h: &OperatorMatrix<T>, k: usize) -> Result<StateVector<T>> {
    if k >= h.dim() {
        return Err(Error::InvalidParameter(format!("eigenstate {k} of a {}-dimensional operator", h.dim())));
    }
    let (_, vecs) = T::eigh(h.entries())?;
    let mut v: DVector<Complex<T>> = vecs.column(k).into_owned();
    // fix the global phase: largest component real and positive
    let pivot = v.iter().copied().fold(Complex::new(T::zero(), T::zero()), |best, z| {
        if z.norm_sqr() > best.norm_sqr() {
            z
        } else {
            best
        }
    });
    let phase = pivot.conj().unscale(pivot.norm_sqr().sqrt());
    v.iter_mut().for_each(|z| *z *= phase);
    StateVector::normalized(h.space().clone(), v)
}

/// One cell of the eigenstate panel.
#[derive(Clone, Debug)]
pub struct PanelCell<T: Real> {
    pub variant: Nonlinearity,
    pub level: usize,
    pub state: StateVector<T>,
    /// Normalized against the Fock state of the same index.
    pub squeezing: SqueezingReport<T>,
}

/// Resonators shown in the panel, in column order.
pub const PANEL_VARIANTS: [Nonlinearity; 3] = [Nonlinearity::Kerr, Nonlinearity::Minus, Nonlinearity::Plus];

/// Eigenstates `0..levels` of the Kerr, `V_+` and `V_-` resonators at
/// `omega_c = 1`, row-major by level.
pub fn eigenstate_panel<T: Real>(j: T, levels: usize, cutoff: usize) -> Result<Vec<PanelCell<T>>> {
    let space = SpaceDescriptor::photon(cutoff)?;
    let mut hs = Vec::with_capacity(PANEL_VARIANTS.len());
    for v in PANEL_VARIANTS {
        hs.push(nonlinear_cavity(&ResonatorParams::new(T::one(), j, v)?, &space)?);
    }
    let mut cells = Vec::with_capacity(levels * hs.len());
    for level in 0..levels {
        for (variant, h) in PANEL_VARIANTS.iter().zip(&hs) {
            let state = eigenstate(h, level)?;
            let squeezing = squeezing_report(&state, level)?;
            cells.push(PanelCell {
                variant: *variant,
                level,
                state,
                squeezing,
            });
        }
    }
    Ok(cells)
}
