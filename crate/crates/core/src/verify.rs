//! Self-check suite behind `dimshift verify`.
//!
//! Runs every structural identity and both oracles over all radices
//! `2..=q_max` and word lengths `1..=m_max`, skipping the expensive checks
//! on instances above their size caps.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::base_arith::Context;
use crate::charpoly;
use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::prefix::{self, prefix_info};
use crate::spectrum;
use crate::subshift::{DenseBudget, TransitionMatrix};

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub q_max: u64,
    pub m_max: u32,
    pub budget: DenseBudget,
    /// Largest `q^m` for matrix products, traces and the Newton oracle.
    pub dense_max: u64,
    /// Largest matrix handed to the principal-minor oracle.
    pub minors_max: u64,
}

impl VerifyConfig {
    pub fn new(q_max: u64, m_max: u32) -> Self {
        VerifyConfig {
            q_max,
            m_max,
            budget: DenseBudget::default(),
            dense_max: 81,
            minors_max: 12,
        }
    }
}

/// Outcome of one named check, aggregated over all instances.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            ..Default::default()
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn absorb(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.expect(false, || e.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS {} ({} cases)", self.name, self.cases)
        } else {
            write!(
                f,
                "FAIL {} ({} of {} cases failed; first: {})",
                self.name,
                self.failed,
                self.cases,
                self.first_failure.as_deref().unwrap_or("?")
            )
        }
    }
}

fn contexts(cfg: &VerifyConfig) -> Vec<Context> {
    let mut out = Vec::new();
    for q in 2..=cfg.q_max {
        for m in 1..=cfg.m_max {
            if let Ok(c) = Context::new(q, m) {
                if c.size() <= 1 << 20 {
                    out.push(c);
                }
            }
        }
    }
    out
}

pub fn run(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let ctxs = contexts(cfg);
    let small: Vec<Context> = ctxs
        .iter()
        .copied()
        .filter(|c| c.size() <= cfg.dense_max && cfg.budget.check(c.size()).is_ok())
        .collect();
    vec![
        arithmetic(&ctxs),
        prefix_structure(&ctxs),
        row_column_sums(&ctxs),
        power_lemma(&small),
        permutation_minors(&small),
        cycle_minima(&small),
        trace_invariance(&small, cfg.budget),
        closed_form_vs_newton(&small, cfg.budget),
        minors_vs_newton(&small, cfg),
        evaluation_identity(&ctxs),
        recursion_consistency(&ctxs),
        perron_dual_method(&small, cfg.budget),
        monotonicity(&ctxs),
        plateaus(cfg),
    ]
}

fn arithmetic(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("part/residue identities");
    for c in ctxs {
        let m = c.m();
        for n in 0..c.size().min(1 << 12) {
            for k in 0..=m {
                let s = c.split(n, k);
                let qk = c.pow(k).unwrap();
                r.expect(n == qk * s.part + s.res && s.res < qk, || {
                    format!("q={} n={n} k={k}: reconstruction", c.q())
                });
                for j in 0..=m {
                    r.expect(
                        c.res(c.res(n, j), k) == c.res(n, j.min(k))
                            && c.part(c.part(n, k), j) == c.part(n, k + j)
                            && (j <= k || c.part(c.res(n, j), k) == c.res(c.part(n, k), j - k)),
                        || format!("q={} n={n} j={j} k={k}: nested split", c.q()),
                    );
                }
            }
        }
    }
    r
}

fn prefix_structure(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("minimal prefix structure");
    for c in ctxs {
        let (q, m) = (c.q(), c.m());
        let up = c.with_len(m + 1).ok();
        let mut prev_nbar = 0;
        for n in 0..c.size().min(1 << 14) {
            let res = (|| {
                let p = prefix_info(c, n)?;
                r.expect(p.nbar <= n && p.nbar >= prev_nbar, || {
                    format!("q={q} m={m} n={n}: nbar not monotone or above n")
                });
                prev_nbar = p.nbar;
                if n > 0 && prefix::prefix_len(c, n - 1)? == m {
                    let before = prefix::minimal_prefix(c, n - 1)?;
                    r.expect(p.nbar == before + 1, || {
                        format!("q={q} m={m} i={n}: decrement lemma")
                    });
                }
                if let Some(up) = &up {
                    let lifted = prefix_info(up, q * n)?;
                    r.expect(lifted.nbar == q * p.nbar && lifted.len == p.len, || {
                        format!("q={q} m={m} n={n}: scaling lemma")
                    });
                }
                if p.len < m {
                    let small = c.with_len(p.len)?;
                    let d = prefix::down_prefix(c, n, p.len)?;
                    let dp = prefix_info(&small, d)?;
                    r.expect(
                        dp.len == p.len && p.nbar == q.pow(m - p.len) * dp.nbar,
                        || format!("q={q} m={m} i={n}: recursion through the down map"),
                    );
                }
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn row_column_sums(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("row and column sums equal q");
    for c in ctxs.iter().filter(|c| c.size() <= 1 << 12) {
        let a = TransitionMatrix::full(*c);
        for x in a.indices() {
            let row = a.indices().filter(|&y| a.entry(x, y) == Ok(1)).count() as u64;
            let col = a.indices().filter(|&y| a.entry(y, x) == Ok(1)).count() as u64;
            r.expect(row == c.q() && col == c.q(), || {
                format!("q={} m={} index {x}", c.q(), c.m())
            });
        }
    }
    r
}

fn power_lemma(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("powers of A match the res/part rule");
    for c in ctxs {
        let a = TransitionMatrix::full(*c);
        let Ok(d) = a.dense_as::<u64>() else { continue };
        let mut power = d.clone();
        for k in 1..=c.m() {
            for x in a.indices() {
                for y in a.indices() {
                    let got = *power.get((x - 1) as usize, (y - 1) as usize);
                    let want = u64::from(a.power_entry(x, y, k).unwrap_or(2));
                    r.expect(got == want, || {
                        format!("q={} m={} k={k} ({x},{y}): {got} != {want}", c.q(), c.m())
                    });
                }
            }
            power = power.mul(&d);
        }
    }
    r
}

/// All subsets of `items` with `1..=max` elements.
fn subsets(items: &[u64], max: usize, f: &mut impl FnMut(&[u64])) {
    fn go(items: &[u64], start: usize, max: usize, cur: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == max {
            return;
        }
        for j in start..items.len() {
            cur.push(items[j]);
            go(items, j + 1, max, cur, f);
            cur.pop();
        }
    }
    go(items, 0, max, &mut Vec::new(), f);
}

fn permutation_minors(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("nonzero principal minors are permutations");
    for c in ctxs {
        let max = match c.size() {
            0..=9 => 6,
            10..=27 => 3,
            _ => continue,
        };
        let a = TransitionMatrix::full(*c);
        let all: Vec<u64> = a.indices().collect();
        subsets(&all, max, &mut |set| {
            let sub = DenseMatrix::from_fn(set.len(), |x, y| {
                BigInt::from(a.entry(set[x], set[y]).unwrap_or(0))
            });
            if !sub.det().is_zero() {
                r.expect(a.is_permutation_submatrix(set), || {
                    format!("q={} m={} P={set:?}", c.q(), c.m())
                });
            }
        });
    }
    r
}

fn cycle_minima(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("short cycles start at minimal values");
    for c in ctxs.iter().filter(|c| c.size() <= 81) {
        let a = TransitionMatrix::full(*c);
        let mut per_len = vec![0u64; c.m() as usize + 1];
        for i in a.indices() {
            let res = (|| {
                if prefix::is_minimal(c, i - 1)? {
                    let p = a.unique_cycle(i)?;
                    let len = prefix::prefix_len(c, i - 1)?;
                    r.expect(p.len() == len as usize && p.is_cycle_in(&a), || {
                        format!("q={} m={} i={i}: cycle {p}", c.q(), c.m())
                    });
                    per_len[p.len()] += 1;
                }
                Ok(())
            })();
            r.absorb(res);
        }
        // closed walks of length k <= m are repeated short cycles
        for k in 1..=c.m() {
            let res = (|| {
                r.expect(a.count_cycles(k)? == per_len[k as usize], || {
                    format!("q={} m={} k={k}: cycle count", c.q(), c.m())
                });
                let walks: u64 = (1..=k)
                    .filter(|d| k % d == 0)
                    .map(|d| u64::from(d) * per_len[d as usize])
                    .sum();
                r.expect(a.trace_power(k)? == BigInt::from(walks), || {
                    format!("q={} m={} k={k}: trace vs cycles", c.q(), c.m())
                });
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn trace_invariance(ctxs: &[Context], budget: DenseBudget) -> CheckReport {
    let mut r = CheckReport::new("traces are invariant under the up/down maps");
    for big in ctxs.iter().filter(|c| c.size() <= 81) {
        let q = big.q();
        let big_m = big.m();
        let traces: Vec<Vec<BigInt>> = (0..big.size())
            .map(|c| {
                TransitionMatrix::new(*big, c)
                    .and_then(|t| t.with_budget(budget).trace_powers(big_m))
                    .unwrap_or_default()
            })
            .collect();
        for m in 1..=big_m {
            let Ok(small) = big.with_len(m) else { continue };
            for c in 0..small.size() {
                let res = (|| {
                    let t = TransitionMatrix::new(small, c)?
                        .with_budget(budget)
                        .trace_powers(m)?;
                    let scaled = &traces[(q.pow(big_m - m) * c) as usize];
                    r.expect(t[..] == scaled[..m as usize], || {
                        format!("q={q} m={m} M={big_m} c={c}: scaled cutoff")
                    });
                    Ok(())
                })();
                r.absorb(res);
            }
            for c in 0..big.size() {
                let res = (|| {
                    if prefix::prefix_len(big, c)? <= m {
                        let down = TransitionMatrix::new(small, big.part(c, big_m - m))?
                            .with_budget(budget)
                            .trace_powers(big_m)?;
                        r.expect(down == traces[c as usize], || {
                            format!("q={q} m={m} M={big_m} c={c}: truncated cutoff")
                        });
                    }
                    Ok(())
                })();
                r.absorb(res);
            }
        }
    }
    r
}

fn closed_form_vs_newton(ctxs: &[Context], budget: DenseBudget) -> CheckReport {
    let mut r = CheckReport::new("closed-form characteristic polynomial = Newton oracle");
    for c in ctxs {
        for i in 0..c.size() {
            let res = (|| {
                let fast = charpoly::fast(c, i)?.full_coeffs()?;
                let oracle = charpoly::newton(c, i, budget)?;
                r.expect(fast == oracle, || format!("q={} m={} i={i}", c.q(), c.m()));
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn minors_vs_newton(ctxs: &[Context], cfg: &VerifyConfig) -> CheckReport {
    let mut r = CheckReport::new("principal-minor oracle = Newton oracle");
    for c in ctxs {
        let start = c.size().saturating_sub(cfg.minors_max);
        for i in start..c.size() {
            let res = (|| {
                let a = charpoly::minors(c, i)?;
                let b = charpoly::newton(c, i, cfg.budget)?;
                r.expect(a == b, || format!("q={} m={} i={i}", c.q(), c.m()));
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn evaluation_identity(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("g(q) equals the minimal prefix");
    for c in ctxs {
        let q = BigInt::from(c.q());
        for i in 0..c.size().min(1 << 14) {
            let res = (|| {
                let g = charpoly::fast(c, i)?;
                let nbar = prefix::minimal_prefix(c, i)?;
                r.expect(g.eval_g(&q) == BigInt::from(nbar), || {
                    format!("q={} m={} i={i}", c.q(), c.m())
                });
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn recursion_consistency(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("coefficients survive lifting the cutoff");
    for c in ctxs {
        let Ok(big) = c.with_len(c.m() + 2) else {
            continue;
        };
        let scale = c.q() * c.q();
        for i in 0..c.size().min(1 << 12) {
            let res = (|| {
                let small = charpoly::fast(c, i)?.coeffs;
                let lifted = charpoly::fast(&big, scale * i)?.coeffs;
                r.expect(
                    lifted[..small.len()] == small[..]
                        && lifted[small.len()..].iter().all(|&a| a == 0),
                    || format!("q={} m={} i={i}", c.q(), c.m()),
                );
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn perron_dual_method(ctxs: &[Context], budget: DenseBudget) -> CheckReport {
    let mut r = CheckReport::new("Perron root agrees with power iteration");
    for c in ctxs {
        for i in 0..c.size() {
            let res = (|| {
                let p = spectrum::phi_exact::<f64>(c, i)?;
                let power = spectrum::power_iteration_radius::<f64>(c, i, budget)?;
                r.expect((p.rho - power).abs() <= 1e-9 && p.residual <= 1e-9, || {
                    format!("q={} m={} i={i}: {} vs {power}", c.q(), c.m(), p.rho)
                });
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn monotonicity(ctxs: &[Context]) -> CheckReport {
    let mut r = CheckReport::new("phi is nonincreasing");
    for c in ctxs.iter().filter(|c| c.size() <= 1 << 12) {
        let mut prev = f64::INFINITY;
        for i in 0..c.size() {
            let res = (|| {
                let p = spectrum::phi_exact::<f64>(c, i)?;
                r.expect(p.phi <= prev && (0.0..=1.0).contains(&p.phi), || {
                    format!("q={} m={} i={i}", c.q(), c.m())
                });
                prev = p.phi;
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}

fn plateaus(cfg: &VerifyConfig) -> CheckReport {
    let mut r = CheckReport::new("phi is constant on [i/q, i/(q-1)]");
    for q in 2..=cfg.q_max {
        for i in 0..q {
            let res = (|| {
                let p = spectrum::plateau::<f64>(q, i)?;
                let closed = ((q - i) as f64).ln() / (q as f64).ln();
                let psi = spectrum::psi(i as f64 / q as f64, q);
                r.expect(
                    (p.value - closed).abs() <= 1e-12 && (p.value - psi).abs() <= 1e-12,
                    || format!("q={q} i={i}: {} vs {closed}", p.value),
                );
                for m in 1..=cfg.m_max.max(2) {
                    let Ok(c) = Context::new(q, m) else { break };
                    let j: u64 = (0..m).map(|n| i * q.pow(n)).sum();
                    let a = spectrum::phi_exact::<f64>(&c, i * q.pow(m - 1))?.phi;
                    let b = spectrum::phi_exact::<f64>(&c, j)?.phi;
                    r.expect((a - b).abs() <= 1e-12, || {
                        format!("q={q} i={i} m={m}: {a} vs {b}")
                    });
                }
                Ok(())
            })();
            r.absorb(res);
        }
    }
    r
}
