//! Exact base-q integer division.
//!
//! Every quantity in this crate is derived from two primitive splits of a
//! nonnegative integer `n` at digit position `k`:
//!
//! * the *part*, `n / q^k` (the digits above position `k`), and
//! * the *residue*, `n mod q^k` (the lowest `k` digits),
//!
//! so that `n = q^k * part(n, k) + res(n, k)`. Both are total for every
//! `k`, including `k > m` and the case where `q^k` exceeds `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radix `q >= 2` and word length `m >= 1`.
///
/// Construction guarantees that `q^m` fits in a `u64`; every matrix index
/// and cutoff handled by the crate is below `q^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    q: u64,
    m: u32,
    size: u64,
}

impl Context {
    pub fn new(q: u64, m: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidContext(format!(
                "radix q = {q} must be at least 2"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidContext(
                "word length m must be at least 1".into(),
            ));
        }
        let size = q.checked_pow(m).ok_or_else(|| {
            Error::InvalidContext(format!("q^m = {q}^{m} does not fit in 64 bits"))
        })?;
        Ok(Context { q, m, size })
    }

    /// Same radix, different word length.
    pub fn with_len(&self, m: u32) -> Result<Self> {
        Context::new(self.q, m)
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    /// `q^m`, the number of words of length `m`.
    #[inline]
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `q^k`, or `None` if it overflows.
    #[inline]
    pub fn pow(&self, k: u32) -> Option<u64> {
        self.q.checked_pow(k)
    }

    /// `floor(n / q^k)`.
    pub fn part(&self, n: u64, k: u32) -> u64 {
        match self.pow(k) {
            Some(p) => n / p,
            None => 0,
        }
    }

    /// `n mod q^k`.
    pub fn res(&self, n: u64, k: u32) -> u64 {
        match self.pow(k) {
            Some(p) => n % p,
            None => n,
        }
    }

    /// Both halves of the split at position `k`.
    pub fn split(&self, n: u64, k: u32) -> PartRes {
        PartRes {
            part: self.part(n, k),
            res: self.res(n, k),
        }
    }

    /// The `m`-digit expansion of `n`, most significant digit first.
    ///
    /// `n = q^m` is accepted and encoded as `(q, 0, ..., 0)`; this is the
    /// word that describes the zero cutoff.
    pub fn to_digits(&self, n: u64) -> Result<DigitWord> {
        if n > self.size {
            return Err(Error::out_of_range("n", n, format!("0..={}", self.size)));
        }
        let m = self.m as usize;
        let mut digits = vec![0u64; m];
        if n == self.size {
            digits[0] = self.q;
        } else {
            let mut rest = n;
            for d in digits.iter_mut().rev() {
                *d = rest % self.q;
                rest /= self.q;
            }
        }
        Ok(DigitWord { q: self.q, digits })
    }

    pub fn from_digits(&self, word: &DigitWord) -> Result<u64> {
        if word.q != self.q || word.digits.len() != self.m as usize {
            return Err(Error::InvalidDigits(format!(
                "word {word} (radix {}, length {}) does not match q = {}, m = {}",
                word.q,
                word.digits.len(),
                self.q,
                self.m
            )));
        }
        word.validate()?;
        // q^m is representable, so no partial sum can overflow.
        Ok(word.digits.iter().fold(0u64, |acc, &d| acc * self.q + d))
    }
}

/// The pair `(part(n, k), res(n, k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartRes {
    pub part: u64,
    pub res: u64,
}

/// A base-q word `d_1 ... d_m`, most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitWord {
    q: u64,
    digits: Vec<u64>,
}

impl DigitWord {
    pub fn new(q: u64, digits: Vec<u64>) -> Result<Self> {
        let word = DigitWord { q, digits };
        word.validate()?;
        Ok(word)
    }

    fn validate(&self) -> Result<()> {
        if self.digits.is_empty() {
            return Err(Error::InvalidDigits("empty word".into()));
        }
        // (q, 0, ..., 0) is the one word allowed a digit equal to q.
        let zero_cutoff_word = self.digits[0] == self.q && self.digits[1..].iter().all(|&d| d == 0);
        if !zero_cutoff_word {
            if let Some(d) = self.digits.iter().find(|&&d| d >= self.q) {
                return Err(Error::InvalidDigits(format!(
                    "digit {d} outside 0..{} in {self}",
                    self.q
                )));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u64> {
        self.digits
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, d) in self.digits.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(q: u64, m: u32) -> Context {
        Context::new(q, m).unwrap()
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(matches!(Context::new(1, 3), Err(Error::InvalidContext(_))));
        assert!(matches!(Context::new(3, 0), Err(Error::InvalidContext(_))));
        assert!(matches!(
            Context::new(10, 20),
            Err(Error::InvalidContext(_))
        ));
        assert_eq!(Context::new(2, 63).unwrap().size(), 1 << 63);
    }

    #[test]
    fn part_and_residue_base_three() {
        let c = ctx(3, 3);
        assert_eq!(c.part(11, 1), 3);
        assert_eq!(c.part(7, 2), 0);
        assert_eq!(c.res(11, 2), 2);
        assert_eq!(c.res(7, 1), 1);
        for n in 0..40 {
            assert_eq!(c.part(n, 0), n);
            assert_eq!(c.res(n, 0), 0);
        }
    }

    #[test]
    fn split_beyond_word_length() {
        let c = ctx(3, 2);
        assert_eq!(c.split(8, 5), PartRes { part: 0, res: 8 });
        // q^k overflows u64 here
        assert_eq!(
            c.split(u64::MAX, 100),
            PartRes {
                part: 0,
                res: u64::MAX
            }
        );
    }

    #[test]
    fn digit_words() {
        let c = ctx(3, 3);
        assert_eq!(c.to_digits(23).unwrap().digits(), &[2, 1, 2]);
        assert_eq!(c.to_digits(0).unwrap().digits(), &[0, 0, 0]);
        assert_eq!(c.to_digits(27).unwrap().digits(), &[3, 0, 0]);
        assert!(matches!(c.to_digits(28), Err(Error::OutOfRange { .. })));
        assert_eq!(ctx(2, 4).to_digits(13).unwrap().digits(), &[1, 1, 0, 1]);

        let w = DigitWord::new(3, vec![2, 1, 2]).unwrap();
        assert_eq!(c.from_digits(&w).unwrap(), 23);
        let w = DigitWord::new(3, vec![3]).unwrap();
        assert_eq!(ctx(3, 1).from_digits(&w).unwrap(), 3);
        assert!(DigitWord::new(3, vec![1, 3, 0]).is_err());
        assert!(DigitWord::new(3, vec![3, 0, 1]).is_err());
        // length mismatch
        assert!(c
            .from_digits(&DigitWord::new(3, vec![1, 2]).unwrap())
            .is_err());
    }

    #[test]
    fn reconstruction_exhaustive() {
        for q in 2..=5u64 {
            for m in 1..=6u32 {
                let c = ctx(q, m);
                if c.size() > 20_000 {
                    continue;
                }
                for n in 0..c.size() {
                    for k in 0..=m + 1 {
                        let pr = c.split(n, k);
                        let qk = q.pow(k);
                        assert_eq!(n, qk * pr.part + pr.res);
                        assert!(pr.res < qk);
                    }
                    assert_eq!(c.part(n, m), 0);
                    assert_eq!(c.from_digits(&c.to_digits(n).unwrap()).unwrap(), n);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn nested_and_commuting_splits(q in 2u64..8, n in 0u64..5_000_000, j in 0u32..9, k in 0u32..9) {
            let c = Context::new(q, 8).unwrap();
            prop_assert_eq!(c.res(c.res(n, j), k), c.res(n, j.min(k)));
            prop_assert_eq!(c.part(c.part(n, k), j), c.part(n, k + j));
            if j > k {
                prop_assert_eq!(c.part(c.res(n, j), k), c.res(c.part(n, k), j - k));
            }
        }

        #[test]
        fn order_transport(q in 2u64..6, a in 0u64..4096, b in 0u64..4096, k in 0u32..6) {
            let c = Context::new(q, 6).unwrap();
            let (a, b) = (a % c.size(), b % c.size());
            if c.res(a, k) < c.res(b, k) && c.part(a, k) == c.part(b, k) {
                for j in 0..=(6 - k) {
                    prop_assert!(c.res(a, k + j) < c.res(b, k + j));
                }
            }
        }

        #[test]
        fn digits_roundtrip(q in 2u64..11, m in 1u32..10, n in any::<u64>()) {
            let c = Context::new(q, m).unwrap();
            let n = n % (c.size() + 1);
            prop_assert_eq!(c.from_digits(&c.to_digits(n).unwrap()).unwrap(), n);
        }
    }
}
