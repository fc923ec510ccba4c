//! Characteristic polynomials of the truncated transition matrices.
//!
//! Write `f(x) = det(xI - A_m(i)) = x^n - a_1 x^(n-1) - ... - a_n` with
//! `n = q^m - i`. Only the first `m` coefficients can be nonzero, and they
//! are the base-q digits of `q^m - ī` where `ī` is the minimal prefix of
//! `i`. [`fast`] uses that closed form; [`newton`] and [`minors`] are
//! brute-force oracles that work from the matrix itself.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base_arith::Context;
use crate::error::{Error, Result};
use crate::prefix;
use crate::subshift::{DenseBudget, TransitionMatrix};

/// The factor `g(x) = x^m - a_1 x^(m-1) - ... - a_m` of the characteristic
/// polynomial of `A_m(i)`, together with the power of `x` that completes
/// it.
///
/// When `i <= q^m - m`, `f = g * x^trailing`. Past that point the matrix
/// is smaller than `m` and `f = g / x^(m - (q^m - i))`; `trailing` is then
/// zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPoly {
    pub q: u64,
    pub m: u32,
    pub i: u64,
    #[serde(rename = "a")]
    pub coeffs: Vec<u64>,
    pub trailing: u64,
}

impl CharPoly {
    /// Degree of the full characteristic polynomial, `q^m - i`.
    pub fn degree(&self) -> u64 {
        self.q.pow(self.m) - self.i
    }

    /// `g(x)` evaluated exactly.
    pub fn eval_g(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::one();
        for &a in &self.coeffs {
            acc = acc * x - BigInt::from(a);
        }
        acc
    }

    /// `a_1, ..., a_n` of the full characteristic polynomial.
    pub fn full_coeffs(&self) -> Result<Vec<BigInt>> {
        let n = self.degree() as usize;
        let mut out: Vec<BigInt> = self.coeffs.iter().map(|&a| BigInt::from(a)).collect();
        if n >= out.len() {
            out.resize(n, BigInt::zero());
        } else {
            if out[n..].iter().any(|a| !a.is_zero()) {
                return Err(Error::Consistency(format!(
                    "g = {self:?} is not divisible by x^{}",
                    out.len() - n
                )));
            }
            out.truncate(n);
        }
        Ok(out)
    }

    /// `g` with factors of `x` removed: the leading `d` coefficients, where
    /// `a_d` is the last nonzero one.
    pub fn stripped(&self) -> &[u64] {
        let d = self
            .coeffs
            .iter()
            .rposition(|&a| a != 0)
            .map_or(0, |p| p + 1);
        &self.coeffs[..d]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Closed form: the coefficients are the digits of `q^m - ī`.
///
/// At `i = 0` the word is `(q, 0, ..., 0)`, so `g = x^m - q x^(m-1)`.
pub fn fast(ctx: &Context, i: u64) -> Result<CharPoly> {
    let nbar = prefix::minimal_prefix(ctx, i)?;
    let coeffs = ctx.to_digits(ctx.size() - nbar)?.into_digits();
    debug_assert!(i == 0 || coeffs.iter().all(|&a| a < ctx.q()));
    let trailing = (ctx.size() - i).saturating_sub(u64::from(ctx.m()));
    Ok(CharPoly {
        q: ctx.q(),
        m: ctx.m(),
        i,
        coeffs,
        trailing,
    })
}

/// Sign pattern of the trace recurrence
/// `a_j = (p_j ± a_1 p_(j-1) ± ... ± a_(j-1) p_1) / j`, where `p_k` is
/// `trace(A^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRecurrence {
    Plus,
    Minus,
}

/// Runs the trace recurrence on `p_1, ..., p_n`. Every division must be
/// exact.
pub fn coeffs_from_traces(traces: &[BigInt], sign: TraceRecurrence) -> Result<Vec<BigInt>> {
    let mut a: Vec<BigInt> = Vec::with_capacity(traces.len());
    for j in 1..=traces.len() {
        let mut sum = traces[j - 1].clone();
        for (t, aj) in a.iter().enumerate() {
            let term = aj * &traces[j - 2 - t];
            match sign {
                TraceRecurrence::Plus => sum += term,
                TraceRecurrence::Minus => sum -= term,
            }
        }
        let (quot, rem) = sum.div_rem(&BigInt::from(j));
        if !rem.is_zero() {
            return Err(Error::Consistency(format!(
                "trace recurrence: {sum} is not divisible by {j}"
            )));
        }
        a.push(quot);
    }
    Ok(a)
}

/// The sign convention under which the recurrence reproduces
/// `det(xI - J) = x^2 - 2x` for the 2x2 all-ones matrix `J`. Resolved once.
pub fn trace_recurrence() -> Result<TraceRecurrence> {
    static RESOLVED: OnceLock<Option<TraceRecurrence>> = OnceLock::new();
    let resolved = RESOLVED.get_or_init(|| {
        let ones = crate::dense::DenseMatrix::from_fn(2, |_, _| BigInt::one());
        let traces = [ones.trace(), ones.pow(2).trace()];
        let expected = [BigInt::from(2), BigInt::zero()];
        let works = |s| coeffs_from_traces(&traces, s).is_ok_and(|a| a == expected);
        match (works(TraceRecurrence::Plus), works(TraceRecurrence::Minus)) {
            (true, false) => Some(TraceRecurrence::Plus),
            (false, true) => Some(TraceRecurrence::Minus),
            _ => None,
        }
    });
    resolved.ok_or_else(|| {
        Error::Consistency("trace recurrence self-test is ambiguous on the all-ones fixture".into())
    })
}

/// Oracle: `a_1, ..., a_n` of `det(xI - A_m(i))` from exact traces of
/// powers via Newton's identities.
pub fn newton(ctx: &Context, i: u64, budget: DenseBudget) -> Result<Vec<BigInt>> {
    let tm = TransitionMatrix::new(*ctx, i)?.with_budget(budget);
    let n = tm.dim() as u32;
    if n == 0 {
        return Ok(Vec::new());
    }
    let traces = tm.trace_powers(n)?;
    coeffs_from_traces(&traces, trace_recurrence()?)
}

/// Largest matrix [`minors`] accepts.
pub const MINORS_MAX_DIM: u64 = 20;

/// Oracle: `a_1, ..., a_n` from sums of principal minors.
///
/// `det(xI - A) = sum_j (-1)^j E_j x^(n-j)` with `E_j` the sum of the
/// `j x j` principal minors. Each minor is expanded over the permutations
/// it supports, i.e. over sets of vertex-disjoint cycles of the submatrix;
/// a cycle of length `L` has sign `(-1)^(L-1)`.
pub fn minors(ctx: &Context, i: u64) -> Result<Vec<BigInt>> {
    let tm = TransitionMatrix::new(*ctx, i)?;
    let n = tm.dim();
    if n > MINORS_MAX_DIM {
        return Err(Error::Capacity(format!(
            "principal-minor expansion limited to dimension {MINORS_MAX_DIM}, got {n}"
        )));
    }
    let n = n as usize;
    let off = tm.cutoff();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|r| {
            tm.successors(r as u64 + off + 1)
                .map(|c| (c - off - 1) as usize)
                .collect()
        })
        .collect();
    let mut memo = HashMap::new();
    let e = cycle_covers(0, 0, &succ, &mut memo);
    Ok((1..=n)
        .map(|j| {
            let ej = BigInt::from(e[j]);
            if j % 2 == 0 {
                -ej
            } else {
                ej
            }
        })
        .collect())
}

/// Signed count of cycle collections over vertices `>= v` avoiding `used`,
/// indexed by total size.
fn cycle_covers(
    v: usize,
    used: u32,
    succ: &[Vec<usize>],
    memo: &mut HashMap<(usize, u32), Vec<i64>>,
) -> Vec<i64> {
    let n = succ.len();
    if v == n {
        let mut base = vec![0; n + 1];
        base[0] = 1;
        return base;
    }
    let used = used & !((1u32 << v) - 1);
    if let Some(hit) = memo.get(&(v, used)) {
        return hit.clone();
    }
    let mut total = cycle_covers(v + 1, used, succ, memo);
    if used & (1 << v) == 0 {
        let mut cycles = Vec::new();
        rooted_cycles(v, v, used | (1 << v), 1, succ, &mut cycles);
        for (mask, len) in cycles {
            let sign = if len % 2 == 1 { 1 } else { -1 };
            let rest = cycle_covers(v + 1, used | mask, succ, memo);
            for (j, &c) in rest.iter().enumerate() {
                if c != 0 {
                    total[j + len] += sign * c;
                }
            }
        }
    }
    memo.insert((v, used), total.clone());
    total
}

/// Simple cycles through `root` using only vertices above it.
fn rooted_cycles(
    root: usize,
    at: usize,
    path: u32,
    len: usize,
    succ: &[Vec<usize>],
    out: &mut Vec<(u32, usize)>,
) {
    for &w in &succ[at] {
        if w == root {
            out.push((path, len));
        } else if w > root && path & (1 << w) == 0 {
            rooted_cycles(root, w, path | (1 << w), len + 1, succ, out);
        }
    }
}
