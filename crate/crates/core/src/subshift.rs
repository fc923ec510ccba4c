//! The transition matrix `A_m` of the length-`m` word shift and its
//! trailing principal submatrices `A_m(i)`.
//!
//! Matrix indices are one-based, as in the usual presentation: index `r`
//! stands for the word whose value is `r - 1`. All arithmetic is done on
//! the zero-based values. `A_m(i)` keeps indices `i + 1 ..= q^m`.
//!
//! Entry `(r, c)` is one iff `res(r - 1, m - 1) == part(c - 1, 1)`, i.e.
//! the last `m - 1` digits of the row word equal the first `m - 1` digits
//! of the column word. Every row and every column of `A_m` has exactly
//! `q` ones.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::base_arith::Context;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::prefix;

/// Environment variable overriding [`DenseBudget::DEFAULT_MAX_DIM`].
pub const DENSE_BUDGET_ENV: &str = "DIMSHIFT_DENSE_BUDGET";

/// Upper bound on the dimension of any materialized dense matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseBudget {
    pub max_dim: u64,
}

impl DenseBudget {
    pub const DEFAULT_MAX_DIM: u64 = 4096;

    pub fn new(max_dim: u64) -> Self {
        DenseBudget { max_dim }
    }

    /// Reads `DIMSHIFT_DENSE_BUDGET`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DENSE_BUDGET_ENV) {
            Ok(v) => {
                v.trim().parse().map(DenseBudget::new).map_err(|_| {
                    Error::Parse(format!("{DENSE_BUDGET_ENV}={v:?} is not a dimension"))
                })
            }
            Err(_) => Ok(DenseBudget::default()),
        }
    }

    pub fn check(&self, dim: u64) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::Capacity(format!(
                "dense matrix of dimension {dim} exceeds the budget of {} (set {DENSE_BUDGET_ENV} to raise it)",
                self.max_dim
            )));
        }
        Ok(())
    }
}

impl Default for DenseBudget {
    fn default() -> Self {
        DenseBudget::new(Self::DEFAULT_MAX_DIM)
    }
}

/// `A_m(cutoff)`, stored implicitly; the dense 0/1 form is materialized on
/// first request.
#[derive(Debug)]
pub struct TransitionMatrix {
    ctx: Context,
    cutoff: u64,
    budget: DenseBudget,
    dense: OnceLock<DenseMatrix<u8>>,
}

impl Clone for TransitionMatrix {
    fn clone(&self) -> Self {
        TransitionMatrix {
            ctx: self.ctx,
            cutoff: self.cutoff,
            budget: self.budget,
            dense: self.dense.clone(),
        }
    }
}

/// Raw adjacency on zero-based word values.
#[inline]
fn edge(ctx: &Context, from: u64, to: u64) -> bool {
    ctx.res(from, ctx.m() - 1) == ctx.part(to, 1)
}

impl TransitionMatrix {
    pub fn new(ctx: Context, cutoff: u64) -> Result<Self> {
        if cutoff > ctx.size() {
            return Err(Error::out_of_range(
                "cutoff",
                cutoff,
                format!("0..={}", ctx.size()),
            ));
        }
        Ok(TransitionMatrix {
            ctx,
            cutoff,
            budget: DenseBudget::default(),
            dense: OnceLock::new(),
        })
    }

    pub fn full(ctx: Context) -> Self {
        Self::new(ctx, 0).expect("zero cutoff is always valid")
    }

    pub fn with_budget(mut self, budget: DenseBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// `q^m - cutoff`.
    pub fn dim(&self) -> u64 {
        self.ctx.size() - self.cutoff
    }

    /// Whether the one-based index `r` belongs to this submatrix.
    pub fn contains(&self, r: u64) -> bool {
        r > self.cutoff && r <= self.ctx.size()
    }

    /// One-based indices kept by the submatrix.
    pub fn indices(&self) -> std::ops::RangeInclusive<u64> {
        self.cutoff + 1..=self.ctx.size()
    }

    fn check_index(&self, r: u64) -> Result<()> {
        if !self.contains(r) {
            return Err(Error::out_of_range(
                "index",
                r,
                format!("{}..={}", self.cutoff + 1, self.ctx.size()),
            ));
        }
        Ok(())
    }

    pub fn entry(&self, r: u64, c: u64) -> Result<u8> {
        self.check_index(r)?;
        self.check_index(c)?;
        Ok(u8::from(edge(&self.ctx, r - 1, c - 1)))
    }

    /// One-based successors of `r` inside the submatrix, ascending.
    pub fn successors(&self, r: u64) -> impl Iterator<Item = u64> + '_ {
        let base = self.ctx.res(r - 1, self.ctx.m() - 1) * self.ctx.q();
        (base..base + self.ctx.q())
            .map(|v| v + 1)
            .filter(move |&c| self.contains(c))
    }

    /// One-based predecessors of `c` inside the submatrix, ascending.
    pub fn predecessors(&self, c: u64) -> impl Iterator<Item = u64> + '_ {
        let low = self.ctx.part(c - 1, 1);
        let stride = self.ctx.pow(self.ctx.m() - 1).expect("q^(m-1) fits");
        (0..self.ctx.q())
            .map(move |t| t * stride + low + 1)
            .filter(move |&r| self.contains(r))
    }

    /// Entry `(r, c)` of `A_m^k` on the full matrix, `1 <= k <= m`: one iff
    /// `res(r - 1, m - k) == part(c - 1, k)`, and zero otherwise.
    pub fn power_entry(&self, r: u64, c: u64, k: u32) -> Result<u8> {
        if self.cutoff != 0 {
            return Err(Error::Precondition(
                "closed-form powers are only available on the full matrix".into(),
            ));
        }
        if k == 0 || k > self.ctx.m() {
            return Err(Error::out_of_range("k", k, format!("1..={}", self.ctx.m())));
        }
        self.check_index(r)?;
        self.check_index(c)?;
        let m = self.ctx.m();
        Ok(u8::from(
            self.ctx.res(r - 1, m - k) == self.ctx.part(c - 1, k),
        ))
    }

    /// The dense 0/1 matrix, zero-based (dense row `0` is index `cutoff + 1`).
    pub fn dense(&self) -> Result<&DenseMatrix<u8>> {
        if let Some(d) = self.dense.get() {
            return Ok(d);
        }
        self.budget.check(self.dim())?;
        Ok(self.dense.get_or_init(|| {
            let ctx = self.ctx;
            let off = self.cutoff;
            DenseMatrix::from_fn(self.dim() as usize, |r, c| {
                u8::from(edge(&ctx, r as u64 + off, c as u64 + off))
            })
        }))
    }

    /// The dense matrix converted to another scalar type.
    pub fn dense_as<T: Zero + One>(&self) -> Result<DenseMatrix<T>> {
        Ok(self
            .dense()?
            .map(|&v| if v == 1 { T::one() } else { T::zero() }))
    }

    /// `trace(A^k)` for one `k >= 1`.
    ///
    /// On the full matrix with `k <= m` this counts diagonal hits of the
    /// closed-form power; otherwise it multiplies exactly.
    pub fn trace_power(&self, k: u32) -> Result<BigInt> {
        if k == 0 {
            return Err(Error::out_of_range("k", k, "k >= 1"));
        }
        if self.cutoff == 0 && k <= self.ctx.m() {
            let m = self.ctx.m();
            let hits = (0..self.ctx.size())
                .filter(|&v| self.ctx.res(v, m - k) == self.ctx.part(v, k))
                .count();
            return Ok(BigInt::from(hits));
        }
        Ok(self.trace_powers(k)?.pop().expect("k >= 1"))
    }

    /// `[trace(A), trace(A^2), ..., trace(A^k_max)]`, exact.
    ///
    /// Each step right-multiplies by `A` using its column structure (at most
    /// `q` ones per column), so a step costs `O(dim^2 q)` big-integer adds.
    pub fn trace_powers(&self, k_max: u32) -> Result<Vec<BigInt>> {
        self.budget.check(self.dim())?;
        let n = self.dim() as usize;
        let off = self.cutoff;
        let preds: Vec<Vec<usize>> = (0..n)
            .map(|c| {
                self.predecessors(c as u64 + off + 1)
                    .map(|r| (r - off - 1) as usize)
                    .collect()
            })
            .collect();
        let mut power: Vec<BigInt> = self.dense_as::<BigInt>()?.row_major();
        let mut traces = Vec::with_capacity(k_max as usize);
        let mut next = vec![BigInt::zero(); n * n];
        for step in 1..=k_max {
            traces.push((0..n).map(|i| &power[i * n + i]).sum());
            if step == k_max {
                break;
            }
            for r in 0..n {
                let row = &power[r * n..(r + 1) * n];
                for (c, ps) in preds.iter().enumerate() {
                    let mut acc = BigInt::zero();
                    for &s in ps {
                        acc += &row[s];
                    }
                    next[r * n + c] = acc;
                }
            }
            std::mem::swap(&mut power, &mut next);
        }
        Ok(traces)
    }

    /// Whether the principal submatrix on `set` has exactly one 1 in every
    /// row and every column. Duplicates are ignored; indices outside the
    /// submatrix make the answer `false`.
    pub fn is_permutation_submatrix(&self, set: &[u64]) -> bool {
        let set: BTreeSet<u64> = set.iter().copied().collect();
        if set.iter().any(|&r| !self.contains(r)) {
            return false;
        }
        set.iter().all(|&r| {
            let row = set
                .iter()
                .filter(|&&c| edge(&self.ctx, r - 1, c - 1))
                .count();
            let col = set
                .iter()
                .filter(|&&c| edge(&self.ctx, c - 1, r - 1))
                .count();
            row == 1 && col == 1
        })
    }

    /// The unique cycle of length `l_m(i - 1)` whose least element is the
    /// one-based index `i`. Requires `i - 1` to be minimal.
    ///
    /// With `v = i - 1`, the `n`-th element is `v` shifted left by `n - 1`
    /// digits with the period continued:
    /// `q^(n-1) res(v, m-n+1) + part(res(v, k), k-n+1)`, plus one, for
    /// `n = 2..=k`. For `k = m` the appended digits are the leading digits
    /// of `v` and this is a plain rotation.
    pub fn unique_cycle(&self, i: u64) -> Result<Cycle> {
        self.check_index(i)?;
        let ctx = &self.ctx;
        let m = ctx.m();
        let v = i - 1;
        if !prefix::is_minimal(ctx, v)? {
            return Err(Error::Precondition(format!("{v} is not {m}-minimal")));
        }
        let k = prefix::prefix_len(ctx, v)?;
        let mut elements = vec![i];
        for n in 2..=k {
            let shift = ctx.pow(n - 1).expect("n <= m");
            let carried = ctx.part(ctx.res(v, k), k - n + 1);
            elements.push(shift * ctx.res(v, m - n + 1) + carried + 1);
        }
        let cycle = Cycle::new(elements)?;
        if !cycle.is_cycle_in(self) || cycle.min() != i {
            return Err(Error::Consistency(format!(
                "constructed {cycle} is not a cycle with least element {i}"
            )));
        }
        Ok(cycle)
    }

    /// Number of `k`-cycles (up to rotation) inside the submatrix.
    ///
    /// For `k <= m` every such cycle is determined by its least element,
    /// which is one more than a minimal value of prefix length `k`, so the
    /// count walks the candidate minima. Longer cycles fall back to a
    /// rooted depth-first enumeration.
    pub fn count_cycles(&self, k: u32) -> Result<u64> {
        if k == 0 {
            return Err(Error::out_of_range("k", k, "k >= 1"));
        }
        let ctx = &self.ctx;
        if k <= ctx.m() {
            let mut count = 0;
            for i in self.indices() {
                let v = i - 1;
                if prefix::prefix_len(ctx, v)? == k && prefix::is_minimal(ctx, v)? {
                    self.unique_cycle(i)?;
                    count += 1;
                }
            }
            return Ok(count);
        }
        let paths = (self.dim() as f64) * (ctx.q() as f64).powi(k as i32 - 1);
        if paths > 1e8 {
            return Err(Error::Capacity(format!(
                "enumerating {k}-cycles in a dimension-{} matrix",
                self.dim()
            )));
        }
        Ok(self.indices().map(|root| self.count_rooted(root, k)).sum())
    }

    /// Simple cycles of length `k` whose least element is `root`.
    fn count_rooted(&self, root: u64, k: u32) -> u64 {
        fn walk(tm: &TransitionMatrix, root: u64, at: u64, left: u32, path: &mut Vec<u64>) -> u64 {
            if left == 1 {
                return u64::from(edge(&tm.ctx, at - 1, root - 1));
            }
            let mut total = 0;
            for next in tm.successors(at) {
                if next > root && !path.contains(&next) {
                    path.push(next);
                    total += walk(tm, root, next, left - 1, path);
                    path.pop();
                }
            }
            total
        }
        walk(self, root, root, k, &mut vec![root])
    }
}

impl DenseMatrix<BigInt> {
    fn row_major(self) -> Vec<BigInt> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            out.extend_from_slice(self.row(r));
        }
        out
    }
}

/// Distinct one-based indices `(i_1, ..., i_k)` visited in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    elements: Vec<u64>,
}

impl Cycle {
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Precondition(
                "a cycle needs at least one element".into(),
            ));
        }
        let distinct: BTreeSet<_> = elements.iter().collect();
        if distinct.len() != elements.len() || elements.contains(&0) {
            return Err(Error::Precondition(format!(
                "cycle elements must be distinct one-based indices, got {elements:?}"
            )));
        }
        Ok(Cycle { elements })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> u64 {
        *self.elements.iter().min().expect("nonempty")
    }

    /// Every element in range and every consecutive transition (including
    /// the closing one) present.
    pub fn is_cycle_in(&self, tm: &TransitionMatrix) -> bool {
        let e = &self.elements;
        e.iter().all(|&x| tm.contains(x))
            && (0..e.len()).all(|j| edge(tm.ctx(), e[j] - 1, e[(j + 1) % e.len()] - 1))
    }

    /// Same cycle, rotated to start at its least element.
    pub fn canonical(&self) -> Cycle {
        let at = self
            .elements
            .iter()
            .position(|&x| x == self.min())
            .expect("nonempty");
        let mut elements = self.elements.clone();
        elements.rotate_left(at);
        Cycle { elements }
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Maps a cycle of `A_M` (`from.m() == M`) to length `m` by keeping the
/// leading `m` digits of every element.
pub fn cycle_down(cycle: &Cycle, from: &Context, m: u32) -> Result<Cycle> {
    if m == 0 || m > from.m() {
        return Err(Error::out_of_range(
            "target length",
            m,
            format!("1..={}", from.m()),
        ));
    }
    if !cycle.is_cycle_in(&TransitionMatrix::full(*from)) {
        return Err(Error::Precondition(format!(
            "{cycle} is not a cycle at length {}",
            from.m()
        )));
    }
    let to = from.with_len(m)?;
    let shift = from.m() - m;
    let image = Cycle::new(
        cycle
            .elements
            .iter()
            .map(|&e| from.part(e - 1, shift) + 1)
            .collect(),
    )
    .map_err(|_| Error::Precondition(format!("{cycle} collapses when truncated to length {m}")))?;
    if !image.is_cycle_in(&TransitionMatrix::full(to)) {
        return Err(Error::Consistency(format!(
            "image {image} of {cycle} is not a cycle"
        )));
    }
    Ok(image)
}

/// Lifts a cycle at length `from.m()` to length `big_m`, one digit at a
/// time: the zero-based element `v_j` becomes `q v_j + res(v_{j+1}, 1)`.
pub fn cycle_up(cycle: &Cycle, from: &Context, big_m: u32) -> Result<Cycle> {
    if big_m < from.m() {
        return Err(Error::out_of_range(
            "target length",
            big_m,
            format!(">= {}", from.m()),
        ));
    }
    if !cycle.is_cycle_in(&TransitionMatrix::full(*from)) {
        return Err(Error::Precondition(format!(
            "{cycle} is not a cycle at length {}",
            from.m()
        )));
    }
    let to = from.with_len(big_m)?;
    let q = from.q();
    let mut values: Vec<u64> = cycle.elements.iter().map(|&e| e - 1).collect();
    for _ in from.m()..big_m {
        let k = values.len();
        values = (0..k)
            .map(|j| q * values[j] + values[(j + 1) % k] % q)
            .collect();
    }
    let lifted = Cycle::new(values.into_iter().map(|v| v + 1).collect())?;
    if !lifted.is_cycle_in(&TransitionMatrix::full(to)) {
        return Err(Error::Consistency(format!(
            "lift {lifted} of {cycle} is not a cycle"
        )));
    }
    Ok(lifted)
}
