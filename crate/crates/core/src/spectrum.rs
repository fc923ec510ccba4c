//! Perron roots, the dimension function `phi(c) = log(rho) / log(q)`, its
//! plateaus, and the comparison function `psi(c) = 1 + log(1 - c) / log(q)`.
//!
//! Everything here is generic over the floating-point type; polynomial
//! coefficients stay exact and are converted only when evaluated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::base_arith::Context;
use crate::charpoly::{self, CharPoly};
use crate::dense;
use crate::error::{Error, Result};
use crate::prefix;
use crate::subshift::{DenseBudget, TransitionMatrix};

#[inline]
fn lit<F: Float>(x: f64) -> F {
    F::from(x).expect("float literal")
}

#[inline]
fn from_u64<F: Float>(x: u64) -> F {
    F::from(x).expect("u64 converts to float")
}

/// Relative width at which bisection stops: `1e-12`, or a few ulps for
/// types that cannot resolve that.
pub fn root_tolerance<F: Float>() -> F {
    lit::<F>(1e-12).max(F::epsilon() * lit(8.0))
}

/// The positive root of a polynomial with one sign change, and `|g(root)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerronRoot<F> {
    pub root: F,
    pub residual: F,
}

/// `x^d - a_1 x^(d-1) - ... - a_d` by Horner.
fn eval<F: Float>(coeffs: &[F], x: F) -> F {
    coeffs.iter().fold(F::one(), |acc, &a| acc * x - a)
}

fn eval_derivative<F: Float>(coeffs: &[F], x: F) -> F {
    let d = coeffs.len();
    let mut acc = from_u64::<F>(d as u64);
    for (j, &a) in coeffs[..d.saturating_sub(1)].iter().enumerate() {
        acc = acc * x - a * from_u64(d as u64 - 1 - j as u64);
    }
    acc
}

/// Perron root of `g`: the unique positive root after removing factors of
/// `x`.
///
/// With the trailing zero coefficients stripped, `g(0) = -a_d < 0` and
/// `g(q) = ī / q^s >= 0`, so `[0, q]` brackets the root. Bisection runs
/// to [`root_tolerance`], then a few Newton steps polish the result while
/// they stay inside the bracket and reduce the residual.
pub fn perron_root<F: Float>(p: &CharPoly) -> PerronRoot<F> {
    let coeffs: Vec<F> = p.stripped().iter().map(|&a| from_u64(a)).collect();
    if coeffs.is_empty() {
        return PerronRoot {
            root: F::zero(),
            residual: F::zero(),
        };
    }
    let mut lo = F::zero();
    let mut hi = from_u64::<F>(p.q);
    if eval(&coeffs, hi) == F::zero() {
        return PerronRoot {
            root: hi,
            residual: F::zero(),
        };
    }
    let tol = root_tolerance::<F>();
    while hi - lo > tol * hi {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(&coeffs, mid) < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = (lo + hi) * lit(0.5);
    let mut residual = eval(&coeffs, root).abs();
    for _ in 0..4 {
        let slope = eval_derivative(&coeffs, root);
        if slope == F::zero() || residual == F::zero() {
            break;
        }
        let next = root - eval(&coeffs, root) / slope;
        let next_residual = eval(&coeffs, next).abs();
        if next < lo || next > hi || next_residual >= residual {
            break;
        }
        root = next;
        residual = next_residual;
    }
    PerronRoot { root, residual }
}

/// Spectral radius of the dense `A_m(i)` by power iteration, independent
/// of the characteristic polynomial.
pub fn power_iteration_radius<F: Float>(ctx: &Context, i: u64, budget: DenseBudget) -> Result<F> {
    let tm = TransitionMatrix::new(*ctx, i)?.with_budget(budget);
    let a = tm.dense_as::<F>()?;
    let tol = lit::<F>(1e-13).max(F::epsilon() * lit(64.0));
    dense::power_iteration(&a, tol, 2_000_000)
}

/// `phi` at the q-adic rational `i / q^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimPoint<F> {
    pub q: u64,
    pub m: u32,
    /// Numerator of `c = i / q^m`.
    pub i: u64,
    pub rho: F,
    pub phi: F,
    pub residual: F,
}

/// Column names of [`DimPoint::csv_row`].
pub const CSV_HEADER: &str = "q,m,i,c_num,c_den,rho,phi,psi,residual";

/// 17 significant digits; enough to round-trip an `f64`.
pub fn fmt_sig17<F: Float>(x: F) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

impl<F: Float> DimPoint<F> {
    pub fn c_den(&self) -> u64 {
        self.q.pow(self.m)
    }

    pub fn c(&self) -> BigRational {
        BigRational::new(BigInt::from(self.i), BigInt::from(self.c_den()))
    }

    pub fn c_float(&self) -> F {
        from_u64::<F>(self.i) / from_u64(self.c_den())
    }

    /// One CSV record; `psi` is left empty when not given.
    pub fn csv_row(&self, psi: Option<F>) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.q,
            self.m,
            self.i,
            self.i,
            self.c_den(),
            fmt_sig17(self.rho),
            fmt_sig17(self.phi),
            psi.map(fmt_sig17).unwrap_or_default(),
            fmt_sig17(self.residual),
        )
    }
}

/// `phi(i / q^m)` from the closed-form characteristic polynomial.
pub fn phi_exact<F: Float>(ctx: &Context, i: u64) -> Result<DimPoint<F>> {
    let p = charpoly::fast(ctx, i)?;
    let PerronRoot { root, residual } = perron_root::<F>(&p);
    let phi = root.ln() / from_u64::<F>(ctx.q()).ln();
    Ok(DimPoint {
        q: ctx.q(),
        m: ctx.m(),
        i,
        rho: root,
        phi,
        residual,
    })
}

/// Closed interval `[i/q, i/(q-1)]` on which `phi` is constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plateau<F> {
    pub q: u64,
    pub i: u64,
    pub lo: (u64, u64),
    pub hi: (u64, u64),
    pub value: F,
}

/// Largest word length used to confirm a plateau.
const PLATEAU_CHECK_LEN: u32 = 12;

/// The plateau starting at `i / q`, `0 <= i < q`.
///
/// Confirms along the way that `i q^(m-1)` and `j(m) = i (1 + q + ... +
/// q^(m-1))` share a minimal prefix for every word length that fits.
pub fn plateau<F: Float>(q: u64, i: u64) -> Result<Plateau<F>> {
    let base = Context::new(q, 1)?;
    if i >= q {
        return Err(Error::out_of_range("i", i, format!("0..{q}")));
    }
    for m in 1..=PLATEAU_CHECK_LEN {
        let Ok(ctx) = Context::new(q, m) else { break };
        let left = i * q.pow(m - 1);
        let j: u64 = (0..m).map(|n| i * q.pow(n)).sum();
        let (a, b) = (
            prefix::minimal_prefix(&ctx, left)?,
            prefix::minimal_prefix(&ctx, j)?,
        );
        if a != left || b != left {
            return Err(Error::Consistency(format!(
                "plateau {i}/{q}: minimal prefixes {a} and {b} differ from {left} at m = {m}"
            )));
        }
    }
    let value = phi_exact::<F>(&base, i)?.phi;
    Ok(Plateau {
        q,
        i,
        lo: (i, q),
        hi: (i, q - 1),
        value,
    })
}

/// `psi(c) = 1 + log(1 - c) / log q` for `c < (q-1)/q`, and `0` beyond.
pub fn psi<F: Float>(c: F, q: u64) -> F {
    let qf = from_u64::<F>(q);
    if c < (qf - F::one()) / qf {
        F::one() + (F::one() - c).ln() / qf.ln()
    } else {
        F::zero()
    }
}

/// [`psi`] with the branch decided exactly.
pub fn psi_exact<F: Float>(c: &BigRational, q: u64) -> F {
    let q_big = BigInt::from(q);
    if c * &q_big < BigRational::from_integer(q_big.clone() - 1) {
        let one_minus = BigRational::one() - c;
        F::one() + rational_to_float::<F>(&one_minus).ln() / from_u64::<F>(q).ln()
    } else {
        F::zero()
    }
}

pub fn rational_to_float<F: Float>(c: &BigRational) -> F {
    let v = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
    if v.is_finite() {
        return lit(v);
    }
    // huge numerator and denominator: scale both down first
    let shift = c.denom().bits().saturating_sub(60);
    let n = (c.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (c.denom() >> shift).to_f64().unwrap_or(1.0);
    lit(n / d)
}

/// Parses a parameter in `[0, 1)`: a fraction `a/b`, `a/q^k`, or a plain
/// decimal such as `0.4`. The value is kept exact.
pub fn parse_param(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot read {s:?} as a parameter in [0, 1)"));
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    let c = if let Some((num, den)) = s.split_once('/') {
        let den = match den.split_once('^') {
            Some((base, exp)) => {
                let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
                num_traits::pow(int(base)?, exp as usize)
            }
            None => int(den)?,
        };
        if den.is_zero() {
            return Err(bad());
        }
        BigRational::new(int(num)?, den)
    } else {
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        let digits = |t: &str| t.chars().all(|ch| ch.is_ascii_digit());
        if !digits(whole) || !digits(frac) || (whole.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let whole = if whole.is_empty() {
            BigInt::zero()
        } else {
            int(whole)?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac = if frac.is_empty() {
            BigInt::zero()
        } else {
            int(frac)?
        };
        BigRational::new(whole * &scale + frac, scale)
    };
    if c.is_negative() || c >= BigRational::one() {
        return Err(Error::out_of_range("c", s, "[0, 1)"));
    }
    Ok(c)
}

/// `phi(c)` at an arbitrary `c`, known only up to the resolution `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimBracket<F> {
    /// `c` as `numerator/denominator`, reduced.
    pub c: String,
    pub m: u32,
    /// Whether `c` is itself of the form `i / q^m`.
    pub exact: bool,
    /// At `(floor(c q^m) + 1) / q^m`, or at `c` itself when exact.
    pub lower: DimPoint<F>,
    /// At `floor(c q^m) / q^m`.
    pub upper: DimPoint<F>,
}

impl<F: Float> DimBracket<F> {
    pub fn width(&self) -> F {
        self.upper.phi - self.lower.phi
    }
}

/// Sandwich of `phi(c)` between the two neighbouring points of the grid
/// `{i / q^m}`. Collapses to a single point when `c` is on the grid.
pub fn phi_bracket<F: Float>(c: &BigRational, ctx: &Context) -> Result<DimBracket<F>> {
    if c.is_negative() || c >= &BigRational::one() {
        return Err(Error::out_of_range("c", c, "[0, 1)"));
    }
    let scaled = c * BigInt::from(ctx.size());
    let (floor, rem) = scaled.numer().div_rem(scaled.denom());
    let i = floor.to_u64().expect("floor(c q^m) < q^m");
    let exact = rem.is_zero();
    let lower_i = if exact {
        i
    } else {
        (i + 1).min(ctx.size() - 1)
    };
    let upper = phi_exact::<F>(ctx, i)?;
    let lower = if lower_i == i {
        upper
    } else {
        phi_exact::<F>(ctx, lower_i)?
    };
    Ok(DimBracket {
        c: format!("{}/{}", c.numer(), c.denom()),
        m: ctx.m(),
        exact,
        lower,
        upper,
    })
}

/// One row of the large-`q` comparison between `phi` and `psi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymRow<F> {
    pub q: u64,
    /// `floor(q c)`.
    pub i: u64,
    pub bracket: DimBracket<F>,
    pub psi: F,
    /// `phi / psi` over the bracket; `NaN` when `psi = 0`.
    pub ratio_lo: F,
    pub ratio_hi: F,
    /// `log(q-i-1) / log(q-i)` (zero when `q - i = 1`).
    pub bound_lo: F,
    /// `log(q-i) / log(q-i-1)` (infinite when `q - i <= 2`).
    pub bound_hi: F,
    pub holds: bool,
}

/// Compares the bracketed `phi(c)` with `psi(c)` for each radix.
///
/// Since both functions decrease, `phi(c)` and `psi(c)` lie between their
/// common values `log(q-i)/log q` at `i/q` and `log(q-i-1)/log q` at
/// `(i+1)/q`, which bounds the ratio. The bracket for each `q` uses the
/// largest resolution with `q^m <= max_states`.
pub fn asymptotic_check<F: Float>(
    c: &BigRational,
    radices: &[u64],
    max_states: u64,
) -> Result<Vec<AsymRow<F>>> {
    radices
        .iter()
        .map(|&q| {
            let base = Context::new(q, 1)?;
            let mut m = 1;
            while base.pow(m + 1).is_some_and(|s| s <= max_states) {
                m += 1;
            }
            let ctx = Context::new(q, m)?;
            let bracket = phi_bracket::<F>(c, &ctx)?;
            let scaled = c * BigInt::from(q);
            let i = scaled.floor().to_integer().to_u64().expect("i < q");
            let psi = psi_exact::<F>(c, q);
            let k = from_u64::<F>(q - i);
            let (bound_lo, bound_hi) = if q - i >= 2 {
                let below = (k - F::one()).ln();
                (below / k.ln(), k.ln() / below)
            } else {
                (F::zero(), F::infinity())
            };
            let tol = lit::<F>(1e-12);
            let (ratio_lo, ratio_hi, holds) = if psi > F::zero() {
                let lo = bracket.lower.phi / psi;
                let hi = bracket.upper.phi / psi;
                let holds = lo >= bound_lo * (F::one() - tol) && hi <= bound_hi * (F::one() + tol);
                (lo, hi, holds)
            } else {
                (F::nan(), F::nan(), bracket.upper.phi == F::zero())
            };
            Ok(AsymRow {
                q,
                i,
                bracket,
                psi,
                ratio_lo,
                ratio_hi,
                bound_lo,
                bound_hi,
                holds,
            })
        })
        .collect()
}
