//! Stabilizer chain along the level-stabilizer series of the finite quotient
//! `Γ_{m,n}` of the m-adic automorphism group.
//!
//! For `G ≤ Γ_{m,n}` the series `G ∩ St(j)` has abelian factors that embed in
//! `(Z/m)^{m^j}`: the label of an element of `St(j)` at a level-`j` vertex is a
//! rotation `σ^c`. A *position* is a pair (layer `j`, vertex `c`). Every pivot is
//! an element of `St(j)` whose labels vanish at all earlier positions; its
//! leading label divides `m`. The chain is closed when
//!
//! * every seed sifts to the identity,
//! * every pivot raised to its relative order sifts to the identity,
//! * every commutator of two pivots of one layer sifts to the identity,
//! * every conjugate of a pivot by a conjugator sifts to the identity.
//!
//! Then the ordered products of pivot powers form exactly the normal closure of
//! the seeds under the conjugators (the group itself when the conjugators are
//! the seeds), and `G ∩ St(j)` is the product of the pivots of layers `≥ j`.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;

use super::Permutation;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Pivot {
    elem: Permutation,
    inv: Permutation,
    layer: usize,
    lead: u32,
}

/// Pending closure work. Conditions of a pivot are expanded only when the
/// task is reached, so the queue never holds all pairwise commutators.
enum Task {
    Sift(Permutation),
    Conditions(usize),
}

#[derive(Clone, Debug)]
pub struct TreeChain {
    m: usize,
    n: usize,
    degree: usize,
    /// `offsets[j]` is the global index of position (j, 0).
    offsets: Vec<usize>,
    slots: Vec<Option<usize>>,
    pivots: Vec<Pivot>,
}

/// Whether `p` is the level-`n` image of an element of `Γ_m`: it permutes the
/// vertices of every level and rotates the children of every vertex.
pub fn in_gamma(p: &Permutation, m: usize, n: usize) -> bool {
    let degree = m.pow(n as u32);
    if p.degree() != degree || m < 2 {
        return false;
    }
    let mut prev: Vec<usize> = vec![0];
    for j in 0..n {
        // vertex images at level j + 1
        let block = m.pow((n - j - 1) as u32);
        let count = m.pow(j as u32 + 1);
        let mut img = vec![0usize; count];
        for (v, slot) in img.iter_mut().enumerate() {
            *slot = p.apply(v * block) / block;
        }
        for leaf in 0..degree {
            if p.apply(leaf) / block != img[leaf / block] {
                return false;
            }
        }
        for (v, &w) in prev.iter().enumerate() {
            let shift = (img[v * m] + m - (w * m) % m) % m;
            for c in 0..m {
                if img[v * m + c] != w * m + (c + shift) % m {
                    return false;
                }
            }
        }
        prev = img;
    }
    true
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, s, t) with s·a + t·b = g ≥ 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

impl TreeChain {
    fn empty(m: usize, n: usize) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for j in 0..=n {
            offsets.push(total);
            total += m.pow(j as u32);
        }
        let positions = offsets[n];
        TreeChain {
            m,
            n,
            degree: m.pow(n as u32),
            offsets,
            slots: vec![None; positions],
            pivots: Vec::new(),
        }
    }

    /// Normal closure of `seeds` under `conjugators`, all in `Γ_{m,n}`.
    ///
    /// Passing the seeds as conjugators builds the chain of `⟨seeds⟩`.
    pub fn build(
        m: usize,
        n: usize,
        seeds: &[Permutation],
        conjugators: &[Permutation],
    ) -> Result<Self> {
        for p in seeds.iter().chain(conjugators) {
            if !in_gamma(p, m, n) {
                return Err(Error::NotInGammaGroup { m });
            }
        }
        let mut chain = TreeChain::empty(m, n);
        let conjugators: Vec<Permutation> = conjugators
            .iter()
            .filter(|c| !c.is_identity())
            .cloned()
            .collect();
        let mut queue: VecDeque<Task> = seeds.iter().cloned().map(Task::Sift).collect();
        loop {
            chain.drain(&mut queue, &conjugators);
            let failures = chain.collect_failures(seeds, &conjugators);
            if failures.is_empty() {
                break;
            }
            queue.extend(failures.into_iter().map(Task::Sift));
        }
        Ok(chain)
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> BigUint {
        self.pivots.iter().fold(BigUint::one(), |acc, p| {
            acc * BigUint::from(self.m as u32 / p.lead)
        })
    }

    /// Pivots in chain order; they generate the group.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.ordered_pivots()
            .into_iter()
            .map(|i| self.pivots[i].elem.clone())
            .collect()
    }

    /// Generators of `G ∩ St(level)`.
    pub fn level_stabilizer_generators(&self, level: usize) -> Vec<Permutation> {
        self.ordered_pivots()
            .into_iter()
            .filter(|&i| self.pivots[i].layer >= level)
            .map(|i| self.pivots[i].elem.clone())
            .collect()
    }

    /// `log_m`-free description of the layer factors: `(layer, |G_j : G_{j+1}|)`.
    pub fn layer_orders(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one(); self.n];
        for p in &self.pivots {
            out[p.layer] *= BigUint::from(self.m as u32 / p.lead);
        }
        out
    }

    fn ordered_pivots(&self) -> Vec<usize> {
        self.slots.iter().filter_map(|s| *s).collect()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        if !in_gamma(p, self.m, self.n) {
            return false;
        }
        self.sift(p.clone()).0.is_identity()
    }

    #[inline]
    fn label(&self, x: &Permutation, layer: usize, col: usize) -> u32 {
        let block = self.m.pow((self.n - layer) as u32);
        let child = block / self.m;
        let leaf = col * block;
        ((x.apply(leaf) - leaf) / child) as u32
    }

    /// First nonzero label at or after global position `from`.
    fn leading(&self, x: &Permutation, from: usize) -> Option<(usize, usize, u32)> {
        let mut layer = match self.offsets.iter().rposition(|&o| o <= from) {
            Some(l) if l < self.n => l,
            _ => return None,
        };
        let mut col = from - self.offsets[layer];
        while layer < self.n {
            let width = self.offsets[layer + 1] - self.offsets[layer];
            while col < width {
                let v = self.label(x, layer, col);
                if v != 0 {
                    return Some((self.offsets[layer] + col, layer, v));
                }
                col += 1;
            }
            layer += 1;
            col = 0;
        }
        None
    }

    /// Reduces `x` by the pivots; returns the residue and, if it is not the
    /// identity, its leading position and label.
    fn sift(&self, mut x: Permutation) -> (Permutation, Option<(usize, usize, u32)>) {
        let mut from = 0;
        while let Some((pos, layer, v)) = self.leading(&x, from) {
            let Some(pi) = self.slots[pos] else {
                return (x, Some((pos, layer, v)));
            };
            let piv = &self.pivots[pi];
            if v % piv.lead != 0 {
                return (x, Some((pos, layer, v)));
            }
            for _ in 0..v / piv.lead {
                x.then_in_place(&piv.inv);
            }
            from = pos + 1;
        }
        (x, None)
    }

    fn drain(&mut self, queue: &mut VecDeque<Task>, conjugators: &[Permutation]) {
        while let Some(task) = queue.pop_front() {
            match task {
                Task::Sift(x) => self.absorb(x, queue),
                Task::Conditions(pi) => {
                    let y = self.pivots[pi].elem.clone();
                    let layer = self.pivots[pi].layer;
                    let lead = self.pivots[pi].lead;
                    self.absorb(y.pow_i64((self.m as u32 / lead) as i64), queue);
                    for c in conjugators {
                        self.absorb(y.conjugate_by(c), queue);
                    }
                    // pivots added while this runs queue their own conditions
                    let others: Vec<usize> = (0..self.pivots.len())
                        .filter(|&k| k != pi && self.pivots[k].layer == layer)
                        .collect();
                    for k in others {
                        let comm = y.commutator(&self.pivots[k].elem);
                        self.absorb(comm, queue);
                    }
                }
            }
        }
    }

    /// Sifts `x` and inserts the residue if it is not the identity.
    fn absorb(&mut self, x: Permutation, queue: &mut VecDeque<Task>) {
        if x.is_identity() {
            return;
        }
        let (res, lead) = self.sift(x);
        if let Some((pos, layer, v)) = lead {
            self.insert(res, pos, layer, v, queue);
        }
    }

    fn insert(
        &mut self,
        x: Permutation,
        pos: usize,
        layer: usize,
        v: u32,
        queue: &mut VecDeque<Task>,
    ) {
        let m = self.m as i64;
        let (pi, y, g0) = match self.slots[pos] {
            None => {
                let (g0, s, _) = ext_gcd(v as i64, m);
                let y = x.pow_i64(s.rem_euclid(m));
                let pi = self.pivots.len();
                self.pivots.push(Pivot {
                    inv: y.inverse(),
                    elem: y.clone(),
                    layer,
                    lead: g0 as u32,
                });
                self.slots[pos] = Some(pi);
                (pi, y, g0)
            }
            Some(pi) => {
                let old = self.pivots[pi].elem.clone();
                let d = self.pivots[pi].lead as i64;
                let (g0, s, t) = ext_gcd(v as i64, d);
                let y = x.pow_i64(s).then(&old.pow_i64(t));
                self.pivots[pi] = Pivot {
                    inv: y.inverse(),
                    elem: y.clone(),
                    layer,
                    lead: g0 as u32,
                };
                queue.push_back(Task::Sift(old.then(&y.pow_i64(-(d / g0)))));
                (pi, y, g0)
            }
        };
        debug_assert_eq!(self.label(&y, layer, pos - self.offsets[layer]) as i64, g0);
        queue.push_back(Task::Sift(x.then(&y.pow_i64(-(v as i64 / g0)))));
        queue.push_back(Task::Conditions(pi));
    }

    /// Runs every closure condition against the current chain and queues the
    /// residues that fail to sift.
    fn collect_failures(&self, seeds: &[Permutation], conjugators: &[Permutation]) -> Vec<Permutation> {
        let mut failures = Vec::new();
        let mut check = |x: Permutation| {
            if x.is_identity() {
                return;
            }
            let (res, lead) = self.sift(x);
            if lead.is_some() {
                failures.push(res);
            }
        };
        for s in seeds {
            check(s.clone());
        }
        let order = self.ordered_pivots();
        for (a, &i) in order.iter().enumerate() {
            let p = &self.pivots[i];
            check(p.elem.pow_i64((self.m as u32 / p.lead) as i64));
            for c in conjugators {
                check(p.elem.conjugate_by(c));
            }
            for &k in &order[a + 1..] {
                let q = &self.pivots[k];
                if q.layer != p.layer {
                    break;
                }
                check(p.elem.commutator(&q.elem));
            }
        }
        failures
    }
}
