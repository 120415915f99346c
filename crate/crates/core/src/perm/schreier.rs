//! Deterministic Schreier–Sims over point stabilizers.

use num_bigint::BigUint;
use num_traits::One;

use super::Permutation;

const UNREACHED: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

/// Orbit of a base point stored as a Schreier vector: `parent[p]` is the index
/// (into the level's generator list) of the generator that carries the parent
/// of `p` onto `p`.
#[derive(Clone, Debug)]
pub(crate) struct SchreierVector {
    root: usize,
    parent: Vec<u32>,
    orbit: Vec<usize>,
}

impl SchreierVector {
    fn build(degree: usize, root: usize, gens: &[usize], all: &[Permutation]) -> Self {
        let mut parent = vec![UNREACHED; degree];
        parent[root] = ROOT;
        let mut orbit = vec![root];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for (k, &g) in gens.iter().enumerate() {
                let q = all[g].apply(p);
                if parent[q] == UNREACHED {
                    parent[q] = k as u32;
                    orbit.push(q);
                }
            }
        }
        SchreierVector {
            root,
            parent,
            orbit,
        }
    }

    pub(crate) fn contains(&self, p: usize) -> bool {
        self.parent[p] != UNREACHED
    }

    pub(crate) fn orbit(&self) -> &[usize] {
        &self.orbit
    }
}

/// One level of the chain: base point, the strong generators fixing all
/// earlier base points, and the basic orbit.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) base_point: usize,
    pub(crate) gens: Vec<usize>,
    pub(crate) orbit: SchreierVector,
}

#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    strong: Vec<Permutation>,
    strong_inv: Vec<Permutation>,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize) -> Self {
        StabChain {
            degree,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Builds a verified chain for `⟨gens⟩`.
    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Self {
        let mut chain = StabChain::new(degree);
        for g in gens {
            chain.extend(g);
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.orbit.len()).collect()
    }

    #[cfg(test)]
    pub(crate) fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.orbit.len()))
    }

    /// Coset representative carrying the base point of `level` to `p`.
    pub fn transversal_element(&self, level: usize, p: usize) -> Option<Permutation> {
        let lv = &self.levels[level];
        if !lv.orbit.contains(p) {
            return None;
        }
        let mut word = Vec::new();
        let mut q = p;
        while q != lv.orbit.root {
            let k = lv.orbit.parent[q] as usize;
            let g = lv.gens[k];
            word.push(g);
            q = self.strong_inv[g].apply(q);
        }
        let mut u = Permutation::identity(self.degree);
        for &g in word.iter().rev() {
            u.then_in_place(&self.strong[g]);
        }
        Some(u)
    }

    /// Sifts `h` starting at `from`; returns the residue and the level at which
    /// sifting stopped (`levels.len()` when it went all the way through).
    pub fn strip_from(&self, mut h: Permutation, from: usize) -> (Permutation, usize) {
        for (i, lv) in self.levels.iter().enumerate().skip(from) {
            let mut p = h.apply(lv.base_point);
            if !lv.orbit.contains(p) {
                return (h, i);
            }
            while p != lv.orbit.root {
                let k = lv.orbit.parent[p] as usize;
                let g = lv.gens[k];
                h.then_in_place(&self.strong_inv[g]);
                p = self.strong_inv[g].apply(p);
            }
        }
        let depth = self.levels.len();
        (h, depth)
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        let (res, _) = self.strip_from(p.clone(), 0);
        res.is_identity()
    }

    fn push_strong(&mut self, g: Permutation) -> usize {
        self.strong_inv.push(g.inverse());
        self.strong.push(g);
        self.strong.len() - 1
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let lv = &self.levels[i];
        let orbit = SchreierVector::build(self.degree, lv.base_point, &lv.gens, &self.strong);
        self.levels[i].orbit = orbit;
    }

    /// Adds `h` (which fixes the first `upto` base points) as a strong
    /// generator at levels `from..=upto`, extending the base if needed.
    fn install(&mut self, h: Permutation, from: usize, upto: usize) {
        if upto == self.levels.len() {
            let bp = h.first_moved().expect("installing the identity");
            let gens = Vec::new();
            let orbit = SchreierVector::build(self.degree, bp, &gens, &self.strong);
            self.levels.push(Level {
                base_point: bp,
                gens,
                orbit,
            });
        }
        let idx = self.push_strong(h);
        for lv in from..=upto {
            self.levels[lv].gens.push(idx);
            self.rebuild_orbit(lv);
        }
    }

    /// Adds a generator and restores the chain invariants.
    pub fn extend(&mut self, g: &Permutation) {
        assert_eq!(g.degree(), self.degree);
        let (res, j) = self.strip_from(g.clone(), 0);
        if res.is_identity() {
            return;
        }
        self.install(res, 0, j);
        self.complete(j);
    }

    /// Schreier-generator closure from level `start` down to the top.
    fn complete(&mut self, start: usize) {
        let mut i = start as isize;
        while i >= 0 {
            let l = i as usize;
            match self.first_failing_schreier_generator(l) {
                Some((res, j)) => {
                    self.install(res, l + 1, j);
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    fn first_failing_schreier_generator(&self, l: usize) -> Option<(Permutation, usize)> {
        let lv = &self.levels[l];
        let base_point = lv.base_point;
        for &p in lv.orbit.orbit() {
            let up = self.transversal_element(l, p).expect("orbit point");
            for &g in &lv.gens {
                let s = &self.strong[g];
                let q = s.apply(p);
                let uq = self.transversal_element(l, q).expect("orbit is closed");
                // u_p · s · u_q⁻¹ fixes the base point
                let mut h = up.then(s);
                h.then_in_place(&uq.inverse());
                debug_assert_eq!(h.apply(base_point), base_point);
                if h.is_identity() {
                    continue;
                }
                let (res, j) = self.strip_from(h, l + 1);
                if j < self.levels.len() || !res.is_identity() {
                    return Some((res, j));
                }
            }
        }
        None
    }
}
