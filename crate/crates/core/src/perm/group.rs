use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::permutation::divisors;
use super::schreier::StabChain;
use super::tree_chain::{in_gamma, TreeChain};
use super::Permutation;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Chain {
    Points(StabChain),
    Tree(TreeChain),
}

/// A permutation group with a verified stabilizer chain.
///
/// Two chain kinds exist: the classical base-and-strong-generating-set chain
/// over point stabilizers, usable for any group, and the level-stabilizer
/// chain for subgroups of `Γ_{m,n}` (see [`TreeChain`]). Both answer the same
/// queries; derived groups keep the kind of the group they come from.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: Chain,
}

fn check_degrees(degree: usize, gens: &[Permutation]) -> Result<()> {
    if degree == 0 {
        return Err(Error::EmptyDegree);
    }
    gens.iter().try_for_each(|g| g.check_degree(degree))
}

fn nontrivial(gens: &[Permutation]) -> Vec<Permutation> {
    let mut out: Vec<Permutation> = Vec::new();
    for g in gens {
        if !g.is_identity() && !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

/// Deterministic Schreier–Sims on `gens`, all of one degree.
pub fn bsgs_from_generators(degree: usize, gens: &[Permutation]) -> Result<PermGroup> {
    PermGroup::from_generators(degree, gens)
}

impl PermGroup {
    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Result<Self> {
        check_degrees(degree, gens)?;
        let generators = nontrivial(gens);
        let chain = StabChain::from_generators(degree, &generators);
        Ok(PermGroup {
            degree,
            generators,
            chain: Chain::Points(chain),
        })
    }

    /// Group generated by level-`n` images of elements of `Γ_m`, using the
    /// level-stabilizer chain.
    pub fn from_tree_generators(m: usize, n: usize, gens: &[Permutation]) -> Result<Self> {
        let degree = m.pow(n as u32);
        check_degrees(degree, gens)?;
        let generators = nontrivial(gens);
        let chain = TreeChain::build(m, n, &generators, &generators)?;
        Ok(PermGroup {
            degree,
            generators,
            chain: Chain::Tree(chain),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: Chain::Points(StabChain::new(degree)),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_tree_chain(&self) -> bool {
        matches!(self.chain, Chain::Tree(_))
    }

    /// Tree parameters `(m, n)` when the group carries a level-stabilizer chain.
    pub fn tree_shape(&self) -> Option<(usize, usize)> {
        match &self.chain {
            Chain::Tree(c) => Some((c.arity(), c.levels())),
            Chain::Points(_) => None,
        }
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        match &self.chain {
            Chain::Points(c) => c.strong_generators().to_vec(),
            Chain::Tree(c) => c.strong_generators(),
        }
    }

    /// Base points of the point-stabilizer chain (empty for tree chains,
    /// whose series is indexed by tree positions instead).
    pub fn base(&self) -> Vec<usize> {
        match &self.chain {
            Chain::Points(c) => c.base(),
            Chain::Tree(_) => Vec::new(),
        }
    }

    pub fn order(&self) -> BigUint {
        match &self.chain {
            Chain::Points(c) => c.order(),
            Chain::Tree(c) => c.order(),
        }
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        p.check_degree(self.degree)?;
        Ok(match &self.chain {
            Chain::Points(c) => c.contains(p),
            Chain::Tree(c) => c.contains(p),
        })
    }

    fn contains_unchecked(&self, p: &Permutation) -> bool {
        match &self.chain {
            Chain::Points(c) => c.contains(p),
            Chain::Tree(c) => c.contains(p),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order().is_one()
    }

    /// Subgroup generated by `gens` (assumed to lie in `self`), with a chain of
    /// the same kind.
    pub fn subgroup(&self, gens: &[Permutation]) -> Result<PermGroup> {
        check_degrees(self.degree, gens)?;
        match &self.chain {
            Chain::Points(_) => PermGroup::from_generators(self.degree, gens),
            Chain::Tree(c) => PermGroup::from_tree_generators(c.arity(), c.levels(), gens),
        }
    }

    /// `G ∩ St(level)` for tree chains.
    pub fn level_stabilizer(&self, level: usize) -> Option<PermGroup> {
        match &self.chain {
            Chain::Tree(c) => {
                let gens = c.level_stabilizer_generators(level);
                Some(self.subgroup(&gens).expect("pivots lie in Γ"))
            }
            Chain::Points(_) => None,
        }
    }

    /// Smallest subgroup containing `s` and normalized by the generators of `self`.
    pub fn normal_closure(&self, s: &[Permutation]) -> Result<PermGroup> {
        check_degrees(self.degree, s)?;
        for x in s {
            if !self.contains_unchecked(x) {
                return Err(Error::ElementNotInGroup);
            }
        }
        let seeds = nontrivial(s);
        match &self.chain {
            Chain::Tree(c) => {
                let chain = TreeChain::build(c.arity(), c.levels(), &seeds, &self.generators)?;
                let generators = chain.strong_generators();
                Ok(PermGroup {
                    degree: self.degree,
                    generators,
                    chain: Chain::Tree(chain),
                })
            }
            Chain::Points(_) => {
                let mut chain = StabChain::from_generators(self.degree, &seeds);
                let mut gens = seeds;
                let mut i = 0;
                while i < gens.len() {
                    for g in &self.generators {
                        let c = gens[i].conjugate_by(g);
                        if !chain.contains(&c) {
                            chain.extend(&c);
                            gens.push(c);
                        }
                    }
                    i += 1;
                }
                Ok(PermGroup {
                    degree: self.degree,
                    generators: gens,
                    chain: Chain::Points(chain),
                })
            }
        }
    }

    /// Normal closure of the commutators of all generator pairs.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, x) in self.generators.iter().enumerate() {
            for y in &self.generators[i + 1..] {
                comms.push(x.commutator(y));
            }
        }
        self.normal_closure(&comms)
            .expect("commutators of generators lie in the group")
    }

    pub fn orbit(&self, point: usize) -> Result<Vec<usize>> {
        if point >= self.degree {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut queue = VecDeque::from([point]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                    queue.push_back(q);
                }
            }
        }
        orbit.sort_unstable();
        Ok(orbit)
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).map(|o| o.len() == self.degree).unwrap_or(false)
    }

    /// `|self : sub|`, after checking that `sub`'s generators lie in `self`.
    pub fn index(&self, sub: &PermGroup) -> Result<BigUint> {
        if sub.degree != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: sub.degree,
            });
        }
        if !sub.generators.iter().all(|g| self.contains_unchecked(g)) {
            return Err(Error::NotASubgroup);
        }
        let (q, r) = self.order().div_rem(&sub.order());
        if !r.is_zero() {
            return Err(Error::NonDividingOrder {
                numerator: self.order().to_string(),
                denominator: sub.order().to_string(),
            });
        }
        Ok(q)
    }

    /// Whether the generators of `self` normalize `sub`, checked on generators.
    pub fn normalizes(&self, sub: &PermGroup) -> bool {
        sub.generators.iter().all(|n| {
            self.generators
                .iter()
                .all(|g| sub.contains_unchecked(&n.conjugate_by(g)))
        })
    }

    /// Whether `self ≤ other` (checked on generators).
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains_unchecked(g))
    }
}

/// Whether a permutation lies in the finite quotient `Γ_{m,n}`.
pub fn is_gamma_element(p: &Permutation, m: usize, n: usize) -> bool {
    in_gamma(p, m, n)
}

/// Least `t ≥ 1` with `g^t ∈ normal`, where `normal ⊴ group` and `g ∈ group`.
pub fn order_mod_subgroup(
    g: &Permutation,
    normal: &PermGroup,
    group: &PermGroup,
) -> Result<BigUint> {
    if !group.contains(g)? {
        return Err(Error::ElementNotInGroup);
    }
    if !normal.is_subgroup_of(group) || !group.normalizes(normal) {
        return Err(Error::NotNormal);
    }
    for t in divisors(&g.order()) {
        if normal.contains_unchecked(&g.pow(&t)) {
            return Ok(t);
        }
    }
    unreachable!("g^order is the identity, which lies in every subgroup")
}
