//! Dense operators on truncated Fock ⊗ qubit ⊗ matter-boson spaces.
//!
//! Composite spaces are ordered lists of factors. Builders in this crate
//! always use the order photon ⊗ qubit (⊗ matter), and basis index
//! `i = (n * 2 + s) * M + m` follows the Kronecker convention: the first
//! factor is the most significant.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cabs, Real};

/// One tensor factor of a Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    /// Resonator mode truncated to Fock states `|0>..|N-1>`.
    Photon(usize),
    /// Two-level system, basis `{|e>, |g>}` so that `sigma_z = diag(1, -1)`.
    Qubit,
    /// Second bosonic mode (matter excitation) truncated to `M` states.
    Matter(usize),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match *self {
            Factor::Photon(n) | Factor::Matter(n) => n,
            Factor::Qubit => 2,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Photon(n) => write!(f, "photon({n})"),
            Factor::Qubit => write!(f, "qubit"),
            Factor::Matter(m) => write!(f, "matter({m})"),
        }
    }
}

/// Tensor-product structure of a truncated Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    factors: Vec<Factor>,
}

impl SpaceDescriptor {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one factor".into()));
        }
        for f in &factors {
            if let Factor::Photon(n) | Factor::Matter(n) = *f {
                if n < 2 {
                    return Err(Error::InvalidSpace(format!("{f}: bosonic cutoff must be >= 2")));
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn photon(cutoff: usize) -> Result<Self> {
        Self::new(vec![Factor::Photon(cutoff)])
    }

    pub fn qubit() -> Self {
        Self {
            factors: vec![Factor::Qubit],
        }
    }

    /// photon(N) ⊗ qubit, the space of every Rabi-type model.
    pub fn photon_qubit(cutoff: usize) -> Result<Self> {
        Self::new(vec![Factor::Photon(cutoff), Factor::Qubit])
    }

    /// photon(N) ⊗ matter(M), the two-mode polariton space.
    pub fn photon_matter(photon_cutoff: usize, matter_cutoff: usize) -> Result<Self> {
        Self::new(vec![Factor::Photon(photon_cutoff), Factor::Matter(matter_cutoff)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).product()
    }

    pub fn photon_cutoff(&self) -> Option<usize> {
        self.factors.iter().find_map(|f| match *f {
            Factor::Photon(n) => Some(n),
            _ => None,
        })
    }

    pub fn matter_cutoff(&self) -> Option<usize> {
        self.factors.iter().find_map(|f| match *f {
            Factor::Matter(m) => Some(m),
            _ => None,
        })
    }

    pub fn has_qubit(&self) -> bool {
        self.factors.contains(&Factor::Qubit)
    }

    pub fn is_photon_only(&self) -> bool {
        matches!(self.factors.as_slice(), [Factor::Photon(_)])
    }

    /// Product space `self ⊗ other`.
    pub fn product(&self, other: &SpaceDescriptor) -> SpaceDescriptor {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceDescriptor { factors }
    }

    /// Same structure with the photon factor resized.
    pub fn with_photon_cutoff(&self, cutoff: usize) -> Result<Self> {
        if self.photon_cutoff().is_none() {
            return Err(Error::MissingFactor("photon"));
        }
        let factors = self
            .factors
            .iter()
            .map(|f| match f {
                Factor::Photon(_) => Factor::Photon(cutoff),
                other => *other,
            })
            .collect();
        Self::new(factors)
    }

    fn index_of(&self, pred: impl Fn(&Factor) -> bool) -> Option<usize> {
        self.factors.iter().position(pred)
    }

    fn photon_index(&self) -> Result<usize> {
        self.index_of(|f| matches!(f, Factor::Photon(_)))
            .ok_or(Error::MissingFactor("photon"))
    }

    fn matter_index(&self) -> Result<usize> {
        self.index_of(|f| matches!(f, Factor::Matter(_)))
            .ok_or(Error::MissingFactor("matter"))
    }

    fn qubit_index(&self) -> Result<usize> {
        self.index_of(|f| matches!(f, Factor::Qubit))
            .ok_or(Error::MissingFactor("qubit"))
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊗ ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// `I_left ⊗ local ⊗ I_right` where `local` acts on factor `idx`.
fn embed<T: Real>(
    local: &DMatrix<Complex<T>>,
    space: &SpaceDescriptor,
    idx: usize,
) -> DMatrix<Complex<T>> {
    let dims: Vec<usize> = space.factors.iter().map(Factor::dim).collect();
    let d = dims[idx];
    debug_assert_eq!(local.nrows(), d);
    let left: usize = dims[..idx].iter().product();
    let right: usize = dims[idx + 1..].iter().product();
    let dim = left * d * right;
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = DMatrix::from_element(dim, dim, zero);
    for j in 0..d {
        for i in 0..d {
            let v = local[(i, j)];
            if v == zero {
                continue;
            }
            for l in 0..left {
                for r in 0..right {
                    out[((l * d + i) * right + r, (l * d + j) * right + r)] = v;
                }
            }
        }
    }
    out
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Relative Hermiticity tolerance, `1e-12` in double precision.
pub fn hermitian_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::default_epsilon() * T::lit(256.0))
}

/// Dense complex operator tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    space: SpaceDescriptor,
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(space: SpaceDescriptor, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = space.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::InvalidSpace(format!(
                "{}x{} matrix does not match {space} (dimension {dim})",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { space, entries })
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            entries: DMatrix::from_element(dim, dim, czero()),
        }
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// Real diagonal operator.
    pub fn from_diagonal(space: &SpaceDescriptor, diag: impl IntoIterator<Item = T>) -> Result<Self> {
        let d: Vec<Complex<T>> = diag.into_iter().map(creal).collect();
        if d.len() != space.dim() {
            return Err(Error::InvalidSpace(format!(
                "diagonal of length {} does not match {space}",
                d.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            entries: DMatrix::from_diagonal(&DVector::from_vec(d)),
        })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            space: self.space.clone(),
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(creal(factor))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut exp: u32) -> Self {
        let mut result = Self::identity(&self.space);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = &result * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
    }

    /// `max |H - H^dag|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for j in 0..n {
            for i in j..n {
                let d = cabs(self.entries[(i, j)] - self.entries[(j, i)].conj());
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `max |H - H^dag| <= 1e-12 max |H|`.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= hermitian_tolerance::<T>() * self.max_abs()
    }

    /// Projection onto the first `cutoff` photon levels. The photon factor
    /// leads the ordering, so this is the leading principal block.
    pub fn truncate_photon(&self, cutoff: usize) -> Result<Self> {
        let n = self.space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
        if cutoff > n {
            return Err(Error::InvalidSpace(format!("cannot truncate photon cutoff {n} up to {cutoff}")));
        }
        let space = self.space.with_photon_cutoff(cutoff)?;
        let d = space.dim();
        Ok(Self {
            entries: self.entries.view((0, 0), (d, d)).into_owned(),
            space,
        })
    }

    /// `(H + H^dag) / 2`, exactly Hermitian.
    pub fn hermitize(&self) -> Self {
        let half = T::lit(0.5);
        let n = self.dim();
        let mut entries = self.entries.clone();
        for j in 0..n {
            for i in j..n {
                let v = (self.entries[(i, j)] + self.entries[(j, i)].conj()).scale(half);
                entries[(i, j)] = v;
                entries[(j, i)] = v.conj();
            }
        }
        Self {
            space: self.space.clone(),
            entries,
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// `self |psi>` as a raw (unnormalized) amplitude vector.
    pub fn apply(&self, psi: &StateVector<T>) -> Result<DVector<Complex<T>>> {
        check_same(&self.space, &psi.space)?;
        Ok(&self.entries * &psi.amplitudes)
    }

    fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let tol = hermitian_tolerance::<T>() * self.max_abs().max(T::one());
        if defect > tol {
            return Err(Error::NotHermitian {
                deviation: defect.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        Ok(())
    }
}

fn check_same(a: &SpaceDescriptor, b: &SpaceDescriptor) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

fn assert_same(a: &SpaceDescriptor, b: &SpaceDescriptor) {
    assert!(a == b, "operator space mismatch: {a} vs {b}");
}

impl<'a, T: Real> Add<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn add(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        assert_same(&self.space, &rhs.space);
        OperatorMatrix {
            space: self.space.clone(),
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl<T: Real> Add for OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn add(mut self, rhs: OperatorMatrix<T>) -> OperatorMatrix<T> {
        self += &rhs;
        self
    }
}

impl<'a, T: Real> AddAssign<&'a OperatorMatrix<T>> for OperatorMatrix<T> {
    fn add_assign(&mut self, rhs: &'a OperatorMatrix<T>) {
        assert_same(&self.space, &rhs.space);
        self.entries += &rhs.entries;
    }
}

impl<'a, T: Real> Sub<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn sub(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        assert_same(&self.space, &rhs.space);
        OperatorMatrix {
            space: self.space.clone(),
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl<T: Real> Sub for OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn sub(self, rhs: OperatorMatrix<T>) -> OperatorMatrix<T> {
        &self - &rhs
    }
}

impl<'a, T: Real> Mul<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn mul(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        assert_same(&self.space, &rhs.space);
        OperatorMatrix {
            space: self.space.clone(),
            entries: T::matmul(&self.entries, &rhs.entries),
        }
    }
}

impl<T: Real> Mul for OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn mul(self, rhs: OperatorMatrix<T>) -> OperatorMatrix<T> {
        &self * &rhs
    }
}

impl<T: Real> Neg for OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn neg(self) -> OperatorMatrix<T> {
        OperatorMatrix {
            space: self.space,
            entries: -self.entries,
        }
    }
}

fn ladder<T: Real>(dim: usize) -> DMatrix<Complex<T>> {
    let mut a = DMatrix::from_element(dim, dim, czero());
    for n in 1..dim {
        a[(n - 1, n)] = creal(T::from_usize(n).unwrap().sqrt());
    }
    a
}

/// Photon annihilation operator, identity-padded over the other factors.
pub fn destroy<T: Real>(space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    let idx = space.photon_index()?;
    let local = ladder::<T>(space.factors[idx].dim());
    OperatorMatrix::new(space.clone(), embed(&local, space, idx))
}

/// Photon creation operator, the adjoint of [`destroy`].
pub fn create<T: Real>(space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    Ok(destroy::<T>(space)?.adjoint())
}

/// Photon number operator `a^dag a`, built directly as a diagonal.
pub fn number<T: Real>(space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    let idx = space.photon_index()?;
    let n = space.factors[idx].dim();
    let local = DMatrix::from_diagonal(&DVector::from_fn(n, |k, _| creal(T::from_usize(k).unwrap())));
    OperatorMatrix::new(space.clone(), embed(&local, space, idx))
}

/// Matter-boson annihilation operator `b`.
pub fn destroy_matter<T: Real>(space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    let idx = space.matter_index()?;
    let local = ladder::<T>(space.factors[idx].dim());
    OperatorMatrix::new(space.clone(), embed(&local, space, idx))
}

/// Lifts an operator on the bare photon space onto the photon factor of `space`.
pub fn lift_photon<T: Real>(op: &OperatorMatrix<T>, space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    if !op.space.is_photon_only() {
        return Err(Error::InvalidSpace(format!("expected a photon-only operator, got {}", op.space)));
    }
    let idx = space.photon_index()?;
    if space.factors[idx] != op.space.factors[0] {
        return Err(Error::SpaceMismatch {
            left: op.space.to_string(),
            right: space.to_string(),
        });
    }
    OperatorMatrix::new(space.clone(), embed(&op.entries, space, idx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::InvalidAxis(s.to_string())),
        }
    }
}

fn pauli_matrix<T: Real>(axis: Axis) -> DMatrix<Complex<T>> {
    let o = T::one();
    let z = T::zero();
    let c = |re: T, im: T| Complex::new(re, im);
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c(z, z), c(o, z), c(o, z), c(z, z)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c(z, z), c(z, -o), c(z, o), c(z, z)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(o, z), c(z, z), c(z, z), c(-o, z)]),
    }
}

/// 2x2 Pauli matrix on a bare qubit space.
pub fn pauli<T: Real>(axis: Axis) -> OperatorMatrix<T> {
    OperatorMatrix {
        space: SpaceDescriptor::qubit(),
        entries: pauli_matrix(axis),
    }
}

/// Pauli matrix acting on the qubit factor of a composite space.
pub fn pauli_on<T: Real>(axis: Axis, space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    let idx = space.qubit_index()?;
    OperatorMatrix::new(space.clone(), embed(&pauli_matrix(axis), space, idx))
}

/// Kronecker product `a ⊗ b` on the product space.
pub fn tensor<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    OperatorMatrix {
        space: a.space.product(&b.space),
        entries: a.entries.kronecker(&b.entries),
    }
}

/// `f(H) = V f(Λ) V^dag` from the spectral decomposition of a Hermitian `H`.
pub fn hermitian_function<T: Real>(
    h: &OperatorMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<OperatorMatrix<T>> {
    h.ensure_hermitian()?;
    let (vals, vecs) = T::eigh(&h.entries)?;
    let mut scaled = vecs.clone();
    for (j, &lambda) in vals.iter().enumerate() {
        let fj = f(lambda);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
    }
    let entries = T::matmul(&scaled, &vecs.adjoint());
    OperatorMatrix::new(h.space.clone(), entries)
}

/// Real-valued matrix function; the result is symmetrized to be exactly Hermitian.
pub fn hermitian_function_real<T: Real>(
    h: &OperatorMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<OperatorMatrix<T>> {
    Ok(hermitian_function(h, |x| creal(f(x)))?.hermitize())
}

/// `exp(i H)` for Hermitian `H`; unitary to working precision.
pub fn exp_i<T: Real>(h: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    hermitian_function(h, |x| Complex::new(x.cos(), x.sin()))
}

/// Displacement operator `D(alpha) = exp(alpha a^dag - alpha* a)` on the photon factor.
///
/// The exponent is `i K` with `K = -i (alpha a^dag - alpha* a)` Hermitian, so the
/// truncated result is exactly unitary.
pub fn displacement<T: Real>(alpha: Complex<T>, space: &SpaceDescriptor) -> Result<OperatorMatrix<T>> {
    let n = space.photon_cutoff().ok_or(Error::MissingFactor("photon"))?;
    let photon = SpaceDescriptor::photon(n)?;
    let a = destroy::<T>(&photon)?;
    let gen = &a.adjoint().scale(alpha) - &a.scale(alpha.conj());
    let k = gen.scale(Complex::new(T::zero(), -T::one())).hermitize();
    let d = exp_i(&k)?;
    if space.is_photon_only() {
        Ok(d)
    } else {
        lift_photon(&d, space)
    }
}

/// `<psi| op |psi>`.
pub fn expectation<T: Real>(op: &OperatorMatrix<T>, psi: &StateVector<T>) -> Result<Complex<T>> {
    let v = op.apply(psi)?;
    Ok(psi.amplitudes.dotc(&v))
}

/// Normalization tolerance for state vectors, `1e-10` in double precision.
pub fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::default_epsilon().sqrt())
}

/// Unit-norm state on a truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    space: SpaceDescriptor,
    amplitudes: DVector<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that are already normalized.
    pub fn new(space: SpaceDescriptor, amplitudes: DVector<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::InvalidSpace(format!(
                "{} amplitudes do not match {space}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(space: SpaceDescriptor, amplitudes: DVector<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == T::zero() {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Self::new(space, amplitudes.unscale(norm))
    }

    /// Basis state with index `index`.
    pub fn basis(space: &SpaceDescriptor, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {space}"
            )));
        }
        let mut amps = DVector::from_element(dim, czero());
        amps[index] = creal(T::one());
        Ok(Self {
            space: space.clone(),
            amplitudes: amps,
        })
    }

    /// Fock state `|n>` on a photon-only space.
    pub fn fock(space: &SpaceDescriptor, n: usize) -> Result<Self> {
        if !space.is_photon_only() {
            return Err(Error::InvalidSpace(format!("Fock states need a photon-only space, got {space}")));
        }
        Self::basis(space, n)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_same(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Population in photon-only basis states `from..N`.
    pub fn tail_population(&self, from: usize) -> T {
        self.amplitudes
            .iter()
            .skip(from)
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Zero-pads (or truncates a negligible tail of) a photon-only state to `cutoff`.
    pub fn with_photon_cutoff(&self, cutoff: usize) -> Result<Self> {
        if !self.space.is_photon_only() {
            return Err(Error::InvalidSpace(format!("expected a photon-only state, got {}", self.space)));
        }
        let space = SpaceDescriptor::photon(cutoff)?;
        let amps = DVector::from_fn(cutoff, |i, _| {
            if i < self.amplitudes.len() {
                self.amplitudes[i]
            } else {
                czero()
            }
        });
        Self::normalized(space, amps)
    }

    /// `exp(-i theta a^dag a) |psi>`, which maps `<a>` to `e^{-i theta} <a>`.
    pub fn phase_rotated(&self, theta: T) -> Result<Self> {
        if !self.space.is_photon_only() {
            return Err(Error::InvalidSpace(format!("expected a photon-only state, got {}", self.space)));
        }
        let amps = DVector::from_fn(self.amplitudes.len(), |n, _| {
            let phi = -theta * T::from_usize(n).unwrap();
            self.amplitudes[n] * Complex::new(phi.cos(), phi.sin())
        });
        Ok(Self {
            space: self.space.clone(),
            amplitudes: amps,
        })
    }
}
