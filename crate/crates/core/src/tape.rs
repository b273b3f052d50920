//! Eventually periodic binary words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapeError {
    #[error("bad tape literal `{0}`: expected bits followed by a parenthesised period, e.g. 110(01)")]
    Syntax(String),
    #[error("empty period")]
    EmptyPeriod,
}

/// The infinite word `prefix · period^ω`, always kept canonical: the period is
/// primitive and no shorter prefix (with a rotated period) denotes the same word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TapeWord {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl TapeWord {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, TapeError> {
        if period.is_empty() {
            return Err(TapeError::EmptyPeriod);
        }
        Ok(Self::canonical(prefix, period))
    }

    /// The all-zero word `(0)`.
    pub fn zeros() -> Self {
        TapeWord { prefix: Vec::new(), period: vec![false] }
    }

    /// A finite word padded with zeros.
    pub fn finite(bits: &[bool]) -> Self {
        Self::canonical(bits.to_vec(), vec![false])
    }

    /// Samples `f` on `0..n + p`, treating `n..n + p` as the repeating block.
    pub fn from_fn(n: usize, p: usize, f: impl Fn(usize) -> bool) -> Self {
        assert!(p > 0, "period length must be positive");
        let prefix = (0..n).map(&f).collect();
        let period = (n..n + p).map(&f).collect();
        Self::canonical(prefix, period)
    }

    fn canonical(mut prefix: Vec<bool>, mut period: Vec<bool>) -> Self {
        let p = period.len();
        if let Some(d) = (1..p).find(|&d| p.is_multiple_of(d) && (d..p).all(|i| period[i] == period[i - d])) {
            period.truncate(d);
        }
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        TapeWord { prefix, period }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn get(&self, i: usize) -> bool {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// First `n` bits.
    pub fn bits(&self, n: usize) -> Vec<bool> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// Index from which the word is periodic.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    /// The word with cell `i` set to `v`.
    pub fn with(&self, i: usize, v: bool) -> Self {
        if self.get(i) == v {
            return self.clone();
        }
        let n = self.prefix.len().max(i + 1);
        let p = self.period.len();
        Self::from_fn(n, p, |x| if x == i { v } else { self.get(x) })
    }

    /// `w[k..]` as a word.
    pub fn suffix(&self, k: usize) -> Self {
        let n = self.prefix.len().saturating_sub(k);
        Self::from_fn(n, self.period.len(), |x| self.get(x + k))
    }

    /// Replaces the first `head.len()` bits.
    pub fn overwrite(&self, head: &[bool]) -> Self {
        let n = self.prefix.len().max(head.len());
        Self::from_fn(n, self.period.len(), |x| if x < head.len() { head[x] } else { self.get(x) })
    }

    /// Pointwise combination of two words.
    pub fn zip_with(&self, other: &TapeWord, f: impl Fn(bool, bool) -> bool) -> Self {
        let n = self.prefix.len().max(other.prefix.len());
        let p = lcm(self.period.len(), other.period.len());
        Self::from_fn(n, p, |x| f(self.get(x), other.get(x)))
    }

    pub fn or(&self, other: &TapeWord) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    /// True when the word has only finitely many ones.
    pub fn is_finite_support(&self) -> bool {
        self.period == [false]
    }

    /// Whether `w[x] == 1` implies `other[x] == 1` for every `x`.
    pub fn le(&self, other: &TapeWord) -> bool {
        let n = self.prefix.len().max(other.prefix.len());
        let p = lcm(self.period.len(), other.period.len());
        (0..n + p).all(|x| !self.get(x) || other.get(x))
    }

    /// Number of bits needed to decide equality against another word.
    pub fn horizon(&self, other: &TapeWord) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.period.len(), other.period.len())
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

impl fmt::Display for TapeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", bits_to_string(&self.prefix), bits_to_string(&self.period))
    }
}

impl FromStr for TapeWord {
    type Err = TapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || TapeError::Syntax(s.to_string());
        let (pre, rest) = match s.split_once('(') {
            Some(parts) => parts,
            None => {
                // A bare bit string is read as a finite word.
                return parse_bits(s).map(|b| TapeWord::finite(&b)).ok_or_else(bad);
            }
        };
        let per = rest.strip_suffix(')').ok_or_else(bad)?;
        let prefix = parse_bits(pre).ok_or_else(bad)?;
        let period = parse_bits(per).ok_or_else(bad)?;
        TapeWord::new(prefix, period)
    }
}

impl TryFrom<String> for TapeWord {
    type Error = TapeError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TapeWord> for String {
    fn from(w: TapeWord) -> String {
        w.to_string()
    }
}
