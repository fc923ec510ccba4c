//! Row-major dense matrices over an arbitrary scalar.
//!
//! The same container holds the exact materialization of a transition
//! matrix (`u8` or `BigInt`) and its floating-point copy used for power
//! iteration.

use std::fmt::{self, Display};
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T> DenseMatrix<T> {
    /// Builds an `n x n` matrix from `f(row, col)` (zero-based).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Zero + One> DenseMatrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { T::one() } else { T::zero() })
    }
}

impl<T> DenseMatrix<T>
where
    T: Clone + Zero + for<'a> Add<&'a T, Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![T::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let slot = &mut data[r * n + c];
                        *slot = std::mem::replace(slot, T::zero()) + &(a * b);
                    }
                }
            }
        }
        DenseMatrix { n, data }
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }
}

impl<T> DenseMatrix<T>
where
    T: Clone + Zero + One + for<'a> Add<&'a T, Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| acc.mul(self))
    }
}

impl DenseMatrix<BigInt> {
    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    let v = &a[r][c] * &a[k][k] - &a[r][k] * &a[k][c];
                    a[r][c] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

/// Power-iteration estimate of the spectral radius of a nonnegative
/// matrix.
///
/// Iterates on `B = A + I` so that the dominant eigenvalue `rho + 1` is
/// strictly dominant even when `A` is periodic, then subtracts one.
/// Returns an error if the estimate has not settled to `tol` (relative)
/// within `max_iter` steps.
pub fn power_iteration<F: Float>(a: &DenseMatrix<F>, tol: F, max_iter: usize) -> Result<F> {
    let n = a.dim();
    if n == 0 {
        return Ok(F::zero());
    }
    if a.data.iter().any(|x| x.is_sign_negative() && !x.is_zero()) {
        return Err(Error::Precondition(
            "power iteration needs a nonnegative matrix".into(),
        ));
    }
    let inv_n = F::one() / F::from(n).unwrap();
    let mut x = vec![inv_n; n];
    let mut y = vec![F::zero(); n];
    let mut estimate = F::zero();
    let mut settled = 0;
    for _ in 0..max_iter {
        for r in 0..n {
            let row = a.row(r);
            y[r] = row.iter().zip(&x).fold(x[r], |acc, (&w, &v)| acc + w * v);
        }
        // x has unit 1-norm, so the 1-norm of y is the Rayleigh-style ratio.
        let norm = y.iter().fold(F::zero(), |acc, &v| acc + v);
        let next = norm - F::one();
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (next - estimate).abs() <= tol * next.abs().max(F::one()) {
            settled += 1;
            if settled >= 3 {
                return Ok(next);
            }
        } else {
            settled = 0;
        }
        estimate = next;
    }
    Err(Error::Consistency(format!(
        "power iteration did not settle within {max_iter} steps (last estimate {:?})",
        estimate.to_f64()
    )))
}

impl<T: Display> DenseMatrix<T> {
    /// Plain-text grid, one row per line, entries concatenated.
    pub fn to_grid(&self) -> String {
        self.to_string()
    }
}

impl<T: Display> Display for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            for v in self.row(r) {
                write!(f, "{v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
