//! Exact logarithms `Σ e_p·log_m p` with rational exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::factorize;

/// An exact value `Σ_p e_p · log_m p`, stored by prime. Since the logarithms
/// of distinct primes are linearly independent over ℚ, equality of the maps
/// is equality of the values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LogIndex {
    base: u64,
    coeffs: BTreeMap<u64, Rational64>,
}

fn prime_factors(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigUint::from(n))
}

impl LogIndex {
    pub fn zero(base: u64) -> Self {
        assert!(base >= 2, "logarithm base must be at least 2");
        LogIndex {
            base,
            coeffs: BTreeMap::new(),
        }
    }

    /// `k = k·log_m m`.
    pub fn integer(base: u64, k: i64) -> Self {
        Self::from_rational(base, Rational64::from_integer(k))
    }

    pub fn from_rational(base: u64, r: Rational64) -> Self {
        let mut out = Self::zero(base);
        for (p, e) in prime_factors(base) {
            out.add_term(p, r * Rational64::from_integer(e as i64));
        }
        out
    }

    /// `c · log_m p` for a prime `p`.
    pub fn prime_term(base: u64, p: u64, c: Rational64) -> Self {
        let mut out = Self::zero(base);
        for (q, e) in prime_factors(p) {
            out.add_term(q, c * Rational64::from_integer(e as i64));
        }
        out
    }

    /// `log_m n` for a positive integer `n`.
    pub fn from_order(base: u64, n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::BadLogIndex("logarithm of zero".into()));
        }
        let mut out = Self::zero(base);
        for (p, e) in factorize(n) {
            out.add_term(p, Rational64::from_integer(e as i64));
        }
        Ok(out)
    }

    /// `log_m(num/den)`; the ratio must be an integer.
    pub fn from_exact_ratio(base: u64, num: &BigUint, den: &BigUint) -> Result<Self> {
        if den.is_zero() || !(num % den).is_zero() {
            return Err(Error::NonDividingOrder {
                numerator: num.to_string(),
                denominator: den.to_string(),
            });
        }
        Self::from_order(base, &(num / den))
    }

    fn add_term(&mut self, p: u64, c: Rational64) {
        let entry = self.coeffs.entry(p).or_insert_with(Rational64::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&p);
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, Rational64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: Rational64) -> Self {
        let mut out = Self::zero(self.base);
        for (&p, &e) in &self.coeffs {
            out.add_term(p, e * c);
        }
        out
    }

    /// Writes the value as `r + c·log_m 2` when that is possible.
    pub fn as_rational_plus_log2(&self) -> Option<(Rational64, Rational64)> {
        let base_factors = prime_factors(self.base);
        let odd: Vec<(u64, u32)> = base_factors.iter().copied().filter(|&(p, _)| p != 2).collect();
        let r = if let Some(&(p0, e0)) = odd.first() {
            self.coeffs.get(&p0).copied().unwrap_or_default() / e0 as i64
        } else if self.coeffs.keys().any(|&p| p != 2) {
            return None;
        } else {
            // m = 2^k: log_m 2 = 1/k is rational, keep the value in r
            let k = base_factors[0].1 as i64;
            return Some((self.coeffs.get(&2).copied().unwrap_or_default() / k, Rational64::zero()));
        };
        let rest = self.clone() - LogIndex::from_rational(self.base, r);
        match rest.coeffs.len() {
            0 => Some((r, Rational64::zero())),
            1 if rest.coeffs.contains_key(&2) => Some((r, rest.coeffs[&2])),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let ln_m = (self.base as f64).ln();
        self.coeffs
            .iter()
            .map(|(&p, e)| (*e.numer() as f64 / *e.denom() as f64) * (p as f64).ln() / ln_m)
            .sum()
    }

    fn check_base(&self, other: &Self) {
        assert_eq!(self.base, other.base, "log indices with different bases");
    }
}

impl Add for LogIndex {
    type Output = LogIndex;
    fn add(mut self, rhs: LogIndex) -> LogIndex {
        self.check_base(&rhs);
        for (p, e) in rhs.coeffs {
            self.add_term(p, e);
        }
        self
    }
}

impl Sub for LogIndex {
    type Output = LogIndex;
    fn sub(self, rhs: LogIndex) -> LogIndex {
        self + (-rhs)
    }
}

impl Neg for LogIndex {
    type Output = LogIndex;
    fn neg(self) -> LogIndex {
        self.scale(-Rational64::one())
    }
}

impl fmt::Display for LogIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "log{}(1)", self.base);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(p, e)| {
                if e.is_integer() {
                    format!("{p}^{}", e.numer())
                } else {
                    format!("{p}^({e})")
                }
            })
            .collect();
        write!(f, "log{}({})", self.base, terms.join("*"))
    }
}

impl From<LogIndex> for String {
    fn from(l: LogIndex) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for LogIndex {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for LogIndex {
    type Err = Error;

    /// Parses `log<m>(p^e*q^(a/b)*…)` or `log<m>(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadLogIndex(s.to_string());
        let rest = s.trim().strip_prefix("log").ok_or_else(bad)?;
        let open = rest.find('(').ok_or_else(bad)?;
        let base: u64 = rest[..open].parse().map_err(|_| bad())?;
        if base < 2 {
            return Err(bad());
        }
        let body = rest[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let mut out = LogIndex::zero(base);
        if body == "1" {
            return Ok(out);
        }
        for term in body.split('*') {
            let (p, e) = term.split_once('^').ok_or_else(bad)?;
            let p: u64 = p.parse().map_err(|_| bad())?;
            let e = e.trim_start_matches('(').trim_end_matches(')');
            let e: Rational64 = e.parse().map_err(|_| bad())?;
            if prime_factors(p) != vec![(p, 1)] || e.is_zero() {
                return Err(bad());
            }
            out.add_term(p, e);
        }
        Ok(out)
    }
}

impl LogIndex {
    /// Like `FromStr`, additionally accepting `0`.
    pub fn parse_with_base(base: u64, s: &str) -> Result<Self> {
        if s.trim() == "0" {
            return Ok(LogIndex::zero(base));
        }
        let l: LogIndex = s.parse()?;
        if l.base != base {
            return Err(Error::BadLogIndex(format!("{s}: expected base {base}")));
        }
        Ok(l)
    }
}
