//! Brute-force reference implementations built from digit strings and
//! walk counting. Nothing here calls into the library.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Base-q digits of `n`, most significant first, padded to `m`.
pub fn digits(n: u64, q: u64, m: u32) -> Vec<u64> {
    let mut d = vec![0; m as usize];
    let mut n = n;
    for slot in d.iter_mut().rev() {
        *slot = n % q;
        n /= q;
    }
    assert_eq!(n, 0, "{n} does not fit in {m} digits");
    d
}

pub fn undigits(d: &[u64], q: u64) -> u64 {
    d.iter().fold(0, |acc, &x| acc * q + x)
}

/// `(l, nbar)`: the shortest `j` whose leading `m - j` digits are at least
/// the trailing `m - j` digits, and `n` with everything after the first `j`
/// digits zeroed.
pub fn prefix_by_digits(q: u64, m: u32, n: u64) -> (u32, u64) {
    let d = digits(n, q, m);
    let m = m as usize;
    let j = (1..=m)
        .find(|&j| d[..m - j] >= d[j..])
        .expect("j = m always qualifies");
    let mut bar = d.clone();
    for x in &mut bar[j..] {
        *x = 0;
    }
    (j as u32, undigits(&bar, q))
}

/// Whether the digits of `n` repeat their first `l` digits with period `l`.
pub fn periodic_by_digits(q: u64, m: u32, n: u64) -> bool {
    let (l, _) = prefix_by_digits(q, m, n);
    let d = digits(n, q, m);
    (0..d.len()).all(|t| d[t] == d[t % l as usize])
}

/// Successor lists of A_m(cut) on 0-based positions `0..q^m - cut`.
/// Word `u` may be followed by word `v` when `u` shifted left by one digit
/// agrees with `v` on the overlap.
pub fn adjacency(q: u64, m: u32, cut: u64) -> Vec<Vec<usize>> {
    let size = q.pow(m);
    let words: Vec<Vec<u64>> = (cut..size).map(|w| digits(w, q, m)).collect();
    let m = m as usize;
    words
        .iter()
        .map(|u| {
            words
                .iter()
                .enumerate()
                .filter(|(_, v)| u[1..] == v[..m - 1])
                .map(|(c, _)| c)
                .collect()
        })
        .collect()
}

/// `trace(A^k)` for `k = 1..=k_max`, by counting closed walks.
pub fn walk_traces(adj: &[Vec<usize>], k_max: usize) -> Vec<BigInt> {
    let n = adj.len();
    let mut counts: Vec<Vec<BigInt>> = (0..n)
        .map(|s| {
            (0..n)
                .map(|c| {
                    if c == s {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        for row in counts.iter_mut() {
            let mut next = vec![BigInt::zero(); n];
            for (r, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    for &c in &adj[r] {
                        next[c] += w;
                    }
                }
            }
            *row = next;
        }
        out.push((0..n).map(|s| counts[s][s].clone()).sum());
    }
    out
}

/// Coefficients `a_1..a_n` of `x^n - a_1 x^{n-1} - ... - a_n` from power
/// sums, via the elementary symmetric polynomials.
pub fn coeffs_from_power_sums(p: &[BigInt]) -> Vec<BigInt> {
    let n = p.len();
    let mut e = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            let term = &e[k - j] * &p[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let kb = BigInt::from(k);
        assert!(
            (&acc % &kb).is_zero(),
            "power sums are not integral at k={k}"
        );
        e.push(acc / kb);
    }
    e.into_iter()
        .enumerate()
        .skip(1)
        .map(|(j, ej)| if j % 2 == 1 { ej } else { -ej })
        .collect()
}

pub fn charpoly_by_walks(q: u64, m: u32, cut: u64) -> Vec<BigInt> {
    let adj = adjacency(q, m, cut);
    coeffs_from_power_sums(&walk_traces(&adj, adj.len()))
}

/// Number of simple cycles of length `k`, each counted once.
pub fn simple_cycles(adj: &[Vec<usize>], k: usize) -> u64 {
    fn dfs(
        adj: &[Vec<usize>],
        root: usize,
        v: usize,
        depth: usize,
        k: usize,
        seen: &mut [bool],
    ) -> u64 {
        let mut count = 0;
        for &w in &adj[v] {
            if w == root && depth == k {
                count += 1;
            } else if w > root && !seen[w] && depth < k {
                seen[w] = true;
                count += dfs(adj, root, w, depth + 1, k, seen);
                seen[w] = false;
            }
        }
        count
    }
    let mut seen = vec![false; adj.len()];
    (0..adj.len())
        .map(|root| {
            seen[root] = true;
            let c = dfs(adj, root, root, 1, k, &mut seen);
            seen[root] = false;
            c
        })
        .sum()
}

/// The all-ones digit word `i i ... i` of length `m`, read in base q.
pub fn repdigit(i: u64, q: u64, m: u32) -> u64 {
    undigits(&vec![i; m as usize], q)
}

#[test]
fn self_check() {
    assert_eq!(digits(11, 3, 3), vec![1, 0, 2]);
    assert_eq!(prefix_by_digits(3, 3, 11), (1, 9));
    assert_eq!(prefix_by_digits(3, 3, 7), (3, 7));
    // x^2 - 2x: eigenvalues 2, 0
    let p = vec![BigInt::from(2), BigInt::from(4)];
    assert_eq!(
        coeffs_from_power_sums(&p),
        vec![BigInt::from(2), BigInt::zero()]
    );
    let ring = vec![vec![1], vec![2], vec![0]];
    assert_eq!(simple_cycles(&ring, 3), 1);
    assert_eq!(simple_cycles(&ring, 2), 0);
}
