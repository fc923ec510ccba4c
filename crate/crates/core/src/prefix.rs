//! Prefix length and minimal prefix of an `m`-digit word.
//!
//! For `0 <= n < q^m` the prefix length is the smallest `j` in `1..=m`
//! with `part(n, j) >= res(n, m - j)`, and the minimal prefix is `n` with
//! its lowest `m - j` digits cleared.

use serde::{Deserialize, Serialize};

use crate::base_arith::Context;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrefixInfo {
    pub n: u64,
    /// Prefix length, `1 <= len <= m`.
    pub len: u32,
    /// Minimal prefix, `n - res(n, m - len)`.
    pub nbar: u64,
}

fn check_word(ctx: &Context, n: u64) -> Result<()> {
    if n >= ctx.size() {
        return Err(Error::out_of_range("n", n, format!("0..{}", ctx.size())));
    }
    Ok(())
}

pub fn prefix_info(ctx: &Context, n: u64) -> Result<PrefixInfo> {
    check_word(ctx, n)?;
    let m = ctx.m();
    // j = m always qualifies: part(n, m) = 0 = res(n, 0).
    let len = (1..=m)
        .find(|&j| ctx.part(n, j) >= ctx.res(n, m - j))
        .unwrap_or(m);
    let nbar = n - ctx.res(n, m - len);
    Ok(PrefixInfo { n, len, nbar })
}

/// Prefix length `l_m(n)`.
pub fn prefix_len(ctx: &Context, n: u64) -> Result<u32> {
    prefix_info(ctx, n).map(|p| p.len)
}

/// Minimal prefix of `n`.
pub fn minimal_prefix(ctx: &Context, n: u64) -> Result<u64> {
    prefix_info(ctx, n).map(|p| p.nbar)
}

/// Whether `n` is `m`-minimal: `res(n, m - l) == part(n, l)` with `l` the
/// prefix length. Minimal values are exactly the zero-based minima of the
/// short cycles of the transition matrix.
pub fn is_minimal(ctx: &Context, n: u64) -> Result<bool> {
    let info = prefix_info(ctx, n)?;
    Ok(ctx.res(n, ctx.m() - info.len) == ctx.part(n, info.len))
}

/// Truncates a word of length `ctx.m()` to its leading `target` digits,
/// i.e. `part(i, M - target)`.
///
/// When `target` equals the prefix length of `i` the result has full
/// prefix length at word length `target`, and the minimal prefix of `i`
/// is `q^(M - target)` times the minimal prefix of the result.
pub fn down_prefix(ctx: &Context, i: u64, target: u32) -> Result<u64> {
    check_word(ctx, i)?;
    if target == 0 || target > ctx.m() {
        return Err(Error::out_of_range(
            "target length",
            target,
            format!("1..={}", ctx.m()),
        ));
    }
    Ok(ctx.part(i, ctx.m() - target))
}
