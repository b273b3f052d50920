//! Ordinals below `ω^K` in Cantor normal form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default height: ordinals strictly below `ω^4`.
pub const DEFAULT_HEIGHT: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("syntax error in ordinal `{text}`: {reason}")]
    Syntax { text: String, reason: String },
    #[error("exponent {exponent} is not below the configured height {height}")]
    TooHigh { exponent: u32, height: u32 },
    #[error("coefficient overflow")]
    Overflow,
}

/// A countable ordinal `ω^e1·c1 + … + ω^en·cn` with `e1 > … > en` and every `ci ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Class {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    pub fn omega_pow(e: u32) -> Self {
        Ordinal { terms: vec![(e, 1)] }
    }

    /// `ω^e · c`.
    pub fn term(e: u32, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Builds an ordinal from CNF terms, rejecting non-canonical lists.
    pub fn from_terms(terms: Vec<(u32, u64)>, height: u32) -> Result<Self, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::Syntax {
                    text: format!("{terms:?}"),
                    reason: "exponents must strictly decrease".into(),
                });
            }
        }
        for &(e, c) in &terms {
            if c == 0 {
                return Err(OrdinalError::Syntax {
                    text: format!("{terms:?}"),
                    reason: "zero coefficient".into(),
                });
            }
            if e >= height {
                return Err(OrdinalError::TooHigh { exponent: e, height });
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.classify(), Class::Limit)
    }

    /// Some(n) when the ordinal is the natural number n.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// Exponent of the leading term (the CNF degree); `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0)
    }

    /// Exponent of the trailing term; `None` for zero.
    pub fn last_exponent(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    /// Coefficient of `ω^e` in the normal form (0 if absent).
    pub fn coefficient(&self, e: u32) -> u64 {
        self.terms.iter().find(|t| t.0 == e).map_or(0, |t| t.1)
    }

    /// The finite part: coefficient of `ω^0`.
    pub fn finite_part(&self) -> u64 {
        self.coefficient(0)
    }

    pub fn classify(&self) -> Class {
        match self.terms.last() {
            None => Class::Zero,
            Some(&(0, c)) => {
                let mut terms = self.terms.clone();
                if c == 1 {
                    terms.pop();
                } else {
                    terms.last_mut().unwrap().1 = c - 1;
                }
                Class::Successor(Ordinal { terms })
            }
            Some(_) => Class::Limit,
        }
    }

    /// Ordinal sum with the default height.
    pub fn add(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        self.add_in(other, DEFAULT_HEIGHT)
    }

    /// Ordinal sum `self + other`: terms of `self` below the leading exponent
    /// of `other` are absorbed.
    pub fn add_in(&self, other: &Ordinal, height: u32) -> Result<Ordinal, OrdinalError> {
        for &(e, _) in self.terms.iter().chain(other.terms.iter()) {
            if e >= height {
                return Err(OrdinalError::TooHigh { exponent: e, height });
            }
        }
        let Some(&(lead, lead_c)) = other.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms: Vec<(u32, u64)> =
            self.terms.iter().copied().take_while(|t| t.0 >= lead).collect();
        match terms.last_mut() {
            Some(last) if last.0 == lead => {
                last.1 = last.1.checked_add(lead_c).ok_or(OrdinalError::Overflow)?;
            }
            _ => terms.push((lead, lead_c)),
        }
        terms.extend_from_slice(&other.terms[1..]);
        Ok(Ordinal { terms })
    }

    pub fn add_finite(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        self.add(&Ordinal::finite(n))
    }

    pub fn succ(&self) -> Result<Ordinal, OrdinalError> {
        self.add_finite(1)
    }

    /// Parses with an explicit height.
    pub fn parse_in(text: &str, height: u32) -> Result<Ordinal, OrdinalError> {
        let syntax = |reason: &str| OrdinalError::Syntax {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(syntax("empty"));
        }
        let mut acc = Ordinal::zero();
        for raw in trimmed.split('+') {
            let t: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            if t.is_empty() {
                return Err(syntax("empty term"));
            }
            let t = t.replace('ω', "w").replace('·', "*");
            let (exp, coef) = if let Some(rest) = t.strip_prefix('w') {
                let (exp_part, coef_part) = match rest.split_once('*') {
                    Some((a, b)) => (a, Some(b)),
                    None => (rest, None),
                };
                let exp = if exp_part.is_empty() {
                    1
                } else if let Some(e) = exp_part.strip_prefix('^') {
                    parse_nat(e).ok_or_else(|| syntax("bad exponent"))?
                } else {
                    return Err(syntax("unexpected text after `w`"));
                };
                let exp = u32::try_from(exp).map_err(|_| syntax("exponent too large"))?;
                let coef = match coef_part {
                    Some(c) => parse_nat(c).ok_or_else(|| syntax("bad coefficient"))?,
                    None => 1,
                };
                (exp, coef)
            } else {
                (0, parse_nat(&t).ok_or_else(|| syntax("bad natural number"))?)
            };
            if exp >= height {
                return Err(OrdinalError::TooHigh { exponent: exp, height });
            }
            acc = acc.add_in(&Ordinal::term(exp, coef), height)?;
        }
        Ok(acc)
    }
}

fn parse_nat(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let o = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::parse_in(s, DEFAULT_HEIGHT)
    }
}

impl TryFrom<String> for Ordinal {
    type Error = OrdinalError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Ordinal> for String {
    fn from(o: Ordinal) -> String {
        o.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_cnf() {
        assert_eq!(o("w^2+w*2+5").terms(), &[(2, 1), (1, 2), (0, 5)]);
        assert!(o("0").is_zero());
        assert_eq!(o("w+w").to_string(), "w*2");
        assert_eq!(o("1+w").to_string(), "w");
        assert_eq!(o("ω·2+3").to_string(), "w*2+3");
    }

    #[test]
    fn rejects_bad_text() {
        assert!(matches!("w^4".parse::<Ordinal>(), Err(OrdinalError::TooHigh { .. })));
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
        assert!("w+".parse::<Ordinal>().is_err());
        assert!(Ordinal::parse_in("w^5", 6).is_ok());
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(o("1").add(&o("w")).unwrap(), o("w"));
        assert_eq!(o("w+1").add(&o("w")).unwrap(), o("w*2"));
        assert_eq!(o("w^2").add(&o("w*2+5")).unwrap().to_string(), "w^2+w*2+5");
        assert!(o("w^3").add(&Ordinal::omega_pow(4)).is_err());
    }

    #[test]
    fn classifies() {
        assert_eq!(o("w^2+1").classify(), Class::Successor(o("w^2")));
        assert_eq!(o("w*2").classify(), Class::Limit);
        assert_eq!(o("0").classify(), Class::Zero);
    }

    #[test]
    fn compares() {
        assert!(o("w") < o("w+1"));
        assert!(o("w*2") > o("w+5"));
        assert_eq!(o("w^2").cmp(&o("w^2")), Ordering::Equal);
    }
}
