use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{0, …, d-1}` stored as its image array.
///
/// Products follow the right-action convention used for tree automorphisms:
/// `p.then(q)` (also `&p * &q`) applies `p` first and `q` second.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            let i = i as usize;
            if i >= d || seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "image {i} repeated or out of range for degree {d}"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 0-based cycles on `degree` points.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                let q = cycle[(k + 1) % cycle.len()];
                if p as usize >= degree || q as usize >= degree {
                    return Err(Error::PointOutOfRange {
                        point: p.max(q) as usize,
                        degree,
                    });
                }
                images[p as usize] = q;
            }
        }
        Self::from_images(images)
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in product");
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub(crate) fn then_in_place(&mut self, other: &Permutation) {
        for i in self.images.iter_mut() {
            *i = other.images[*i as usize];
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    /// `other⁻¹ · self · other`.
    pub fn conjugate_by(&self, other: &Permutation) -> Permutation {
        // x ↦ other(self(other⁻¹(x)))
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[other.images[i] as usize] = other.images[j as usize];
        }
        Permutation { images }
    }

    /// `self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse()
            .then(&other.inverse())
            .then(self)
            .then(other)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u32);
                p = self.images[p] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Raises to an arbitrary integer power, computed cycle by cycle.
    pub fn pow(&self, exponent: &BigUint) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for cycle in self.cycles() {
            let len = cycle.len();
            let shift = (exponent % BigUint::from(len)).to_usize().unwrap_or(0);
            for (k, &p) in cycle.iter().enumerate() {
                images[p as usize] = cycle[(k + shift) % len];
            }
        }
        Permutation { images }
    }

    pub fn pow_i64(&self, exponent: i64) -> Permutation {
        let p = self.pow(&BigUint::from(exponent.unsigned_abs()));
        if exponent < 0 {
            p.inverse()
        } else {
            p
        }
    }

    /// Multiplicative order: the lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycles()
            .iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&BigUint::from(c.len())))
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &j)| *i as u32 != j)
            .map(|(i, _)| i)
    }

    pub(crate) fn check_degree(&self, expected: usize) -> Result<()> {
        if self.degree() != expected {
            return Err(Error::DegreeMismatch {
                expected,
                found: self.degree(),
            });
        }
        Ok(())
    }
}

impl std::ops::Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::from_images(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation on 0-based points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Multiplicative order of `p` (lcm of its cycle lengths).
pub fn element_order(p: &Permutation) -> BigUint {
    p.order()
}

/// Prime factorization by trial division. Intended for group and element
/// orders, whose prime factors never exceed the permutation degree.
pub(crate) fn factorize(n: &BigUint) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut rest = n.clone();
    let mut p: u64 = 2;
    while !rest.is_one() {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            // what is left is prime
            let q = rest.to_u64().expect("prime cofactor larger than 64 bits");
            out.push((q, 1));
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out
}

/// All positive divisors of `n`, ascending.
pub(crate) fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut x = d.clone();
            for _ in 0..=e {
                next.push(x.clone());
                x *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_is_right_action() {
        let p = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let q = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        // 0 -p-> 1 -q-> 2
        assert_eq!((&p * &q).apply(0), 2);
        assert_eq!(p.then(&q).then(&q.inverse()), p);
    }

    #[test]
    fn conjugate_matches_definition() {
        let p = Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap();
        let q = Permutation::from_cycles(4, &[&[2, 3]]).unwrap();
        assert_eq!(p.conjugate_by(&q), q.inverse().then(&p).then(&q));
    }

    #[test]
    fn orders_and_powers() {
        let p = Permutation::from_cycles(5, &[&[0, 1], &[2, 3, 4]]).unwrap();
        assert_eq!(p.order(), BigUint::from(6u32));
        assert!(p.pow(&BigUint::from(6u32)).is_identity());
        assert_eq!(p.pow_i64(-1), p.inverse());
        assert_eq!(element_order(&Permutation::identity(4)), BigUint::one());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_images(vec![0, 0, 2]).is_err());
        assert!(Permutation::from_images(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn divisor_enumeration() {
        let d: Vec<u64> = divisors(&BigUint::from(12u32))
            .iter()
            .map(|x| x.to_u64().unwrap())
            .collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(&BigUint::from(3u32).pow(40)), vec![(3, 40)]);
    }
}
