//! Scalar abstraction.
//!
//! All operators are complex matrices over a real field `T`. The dense
//! kernels that dominate the cost (matrix products and the Hermitian
//! eigendecomposition) dispatch to `faer` for `f32` and `f64`.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};

/// Real scalar type the library is generic over.
pub trait Real:
    RealField
    + Copy
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Product `a * b` of two dense complex matrices.
    fn matmul(a: &DMatrix<Complex<Self>>, b: &DMatrix<Complex<Self>>) -> DMatrix<Complex<Self>>;

    /// Eigenvalues (ascending) of a Hermitian matrix; only the lower triangle is read.
    fn eigvalsh(m: &DMatrix<Complex<Self>>) -> Result<Vec<Self>>;

    /// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
    fn eigh(m: &DMatrix<Complex<Self>>) -> Result<(Vec<Self>, DMatrix<Complex<Self>>)>;
}

/// `|z|` for a complex number over any [`Real`].
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

macro_rules! faer_backend {
    ($t:ty) => {
        impl Real for $t {
            fn matmul(
                a: &DMatrix<Complex<$t>>,
                b: &DMatrix<Complex<$t>>,
            ) -> DMatrix<Complex<$t>> {
                assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
                let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
                let lhs = faer::MatRef::from_column_major_slice(a.as_slice(), m, k);
                let rhs = faer::MatRef::from_column_major_slice(b.as_slice(), k, n);
                let mut out = DMatrix::<Complex<$t>>::zeros(m, n);
                {
                    let dst = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), m, n);
                    faer::linalg::matmul::matmul(
                        dst,
                        faer::Accum::Replace,
                        lhs,
                        rhs,
                        Complex::new(1.0, 0.0),
                        faer::Par::Seq,
                    );
                }
                out
            }

            fn eigvalsh(m: &DMatrix<Complex<$t>>) -> Result<Vec<$t>> {
                let n = m.nrows();
                let view = faer::MatRef::from_column_major_slice(m.as_slice(), n, n);
                let vals = view
                    .self_adjoint_eigenvalues(faer::Side::Lower)
                    .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
                Ok(vals)
            }

            fn eigh(m: &DMatrix<Complex<$t>>) -> Result<(Vec<$t>, DMatrix<Complex<$t>>)> {
                let n = m.nrows();
                let view = faer::MatRef::from_column_major_slice(m.as_slice(), n, n);
                let evd = view
                    .self_adjoint_eigen(faer::Side::Lower)
                    .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
                let s = evd.S().column_vector();
                let vals = (0..n).map(|i| s[i].re).collect();
                let u = evd.U();
                let vecs = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
                Ok((vals, vecs))
            }
        }
    };
}

faer_backend!(f32);
faer_backend!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn matmul_matches_nalgebra() {
        let a = DMatrix::from_fn(3, 4, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.5));
        let b = DMatrix::from_fn(4, 2, |i, j| c((i + 2 * j) as f64, -(i as f64)));
        let fast = f64::matmul(&a, &b);
        let slow = &a * &b;
        assert!((fast - slow).norm() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(-1.0, 0.0)]);
        let (vals, vecs) = f64::eigh(&h).unwrap();
        let five = 5f64.sqrt();
        assert!((vals[0] + five).abs() < 1e-14 && (vals[1] - five).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2, vals.iter().map(|&v| c(v, 0.0))));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - h).norm() < 1e-13);
    }

    #[test]
    fn f32_backend_runs() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex::new(3.0f32, 0.0),
            Complex::new(1.0, 0.0),
        ]));
        assert_eq!(f32::eigvalsh(&h).unwrap(), vec![1.0, 3.0]);
    }
}
