//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use treedim::intlin::IntMatrix;
use treedim::perm::Permutation;
use treedim::tree::{
    embed_at_child, lift_root_label, AutomatonSpec, Element, Gen, PointBudget, Vertex,
    DEFAULT_POINT_BUDGET,
};

pub const BUDGET: PointBudget = PointBudget(DEFAULT_POINT_BUDGET);

pub fn automaton(name: &str) -> Arc<AutomatonSpec> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("automata").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    Arc::new(AutomatonSpec::from_json(&text).unwrap())
}

pub fn bsv(m: usize) -> Arc<AutomatonSpec> {
    Arc::new(AutomatonSpec::bsv(m).unwrap())
}

/// Size of the group generated by `gens`, by breadth-first closure over
/// image vectors. `None` once more than `limit` elements are found.
pub fn closure_size(degree: usize, gens: &[Permutation], limit: usize) -> Option<usize> {
    let id: Vec<u32> = (0..degree as u32).collect();
    let gens: Vec<Vec<u32>> = gens.iter().map(|g| g.images().to_vec()).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            // right action: x then g
            let y: Vec<u32> = x.iter().map(|&p| g[p as usize]).collect();
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen.len())
}

/// Whether `x·M ≡ v (mod q)` for some `x`, by trying every `x ∈ [0, q)^rows`.
pub fn row_space_brute(m: &IntMatrix, v: &[i64], q: i64) -> bool {
    let rows = m.rows();
    let entry = |i: usize, j: usize| -> i64 { i64::try_from(&m[(i, j)]).unwrap() };
    let mut x = vec![0i64; rows];
    loop {
        let hit = (0..m.cols()).all(|j| {
            let s: i64 = (0..rows).map(|i| x[i] * entry(i, j)).sum();
            (s - v[j]).rem_euclid(q) == 0
        });
        if hit {
            return true;
        }
        let mut i = 0;
        loop {
            if i == rows {
                return false;
            }
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// The three vector shapes used to show non-membership in the lattice
/// spanned by the relation matrix, all read modulo `q`: `(family, v)`.
pub fn rejection_families(m: usize, q: i64) -> Vec<(&'static str, Vec<i64>)> {
    let mi = m as i64;
    let mut out = Vec::new();
    let last = |x: i64| {
        let mut v = vec![0; m];
        v[m - 1] = x;
        v
    };
    // −j·m^k in the last coordinate
    let mut pk = 1i64;
    while pk < q {
        for j in 1..mi {
            out.push(("P2", last(-j * pk)));
        }
        pk *= mi;
    }
    // −m^(k+1)/2 in the last coordinate
    if m.is_multiple_of(2) {
        let mut mk = mi;
        while mk <= 2 * q {
            out.push(("Q2", last(-mk / 2)));
            mk *= mi;
        }
    }
    // (ε, −ε, …, ε, δ−ε)
    for eps in 0..q {
        for delta in 0..q {
            let mut v: Vec<i64> = (0..m).map(|i| if i % 2 == 0 { eps } else { -eps }).collect();
            v[m - 1] += delta;
            out.push(("R1", v));
        }
    }
    out
}

/// A random reduced-or-not word over the non-identity states.
pub fn random_word<R: Rng>(spec: &Arc<AutomatonSpec>, rng: &mut R, max_len: usize) -> Element {
    let states: Vec<u32> = (0..spec.state_count() as u32)
        .filter(|&s| spec.state_names()[s as usize] != "e")
        .collect();
    let len = rng.gen_range(0..=max_len);
    let gens = (0..len).map(|_| Gen {
        state: states[rng.gen_range(0..states.len())],
        inverted: rng.gen_bool(0.5),
    });
    Element::from_gens(spec, gens.collect::<Vec<_>>())
}

pub fn random_vertex<R: Rng>(m: usize, level: usize, rng: &mut R) -> Vertex {
    Vertex::new((0..level).map(|_| rng.gen_range(1..=m)).collect())
}

/// `(v)(gh) = ((v)g)h` on a vertex and on the whole level.
pub fn action_homomorphism(g: &Element, h: &Element, v: &Vertex, n: usize) -> bool {
    let gh = g.mul(h);
    let pointwise = gh.apply(v).unwrap() == h.apply(&g.apply(v).unwrap()).unwrap();
    let pg = g.level_permutation(n, BUDGET).unwrap();
    let ph = h.level_permutation(n, BUDGET).unwrap();
    let level = gh.level_permutation(n, BUDGET).unwrap() == pg.then(&ph);
    pointwise && level
}

/// `(gh)|_v = g|_v · h|_{(v)g}`, compared as actions on `n` further levels.
pub fn section_cocycle(g: &Element, h: &Element, v: &Vertex, n: usize) -> bool {
    let lhs = g.mul(h).section(v).unwrap();
    let rhs = g.section(v).unwrap().mul(&h.section(&g.apply(v).unwrap()).unwrap());
    lhs.level_permutation(n, BUDGET).unwrap() == rhs.level_permutation(n, BUDGET).unwrap()
}

/// `g·g⁻¹` acts trivially, the level image of `g⁻¹` inverts that of `g`,
/// and `g⁻¹|_{(v)g} = (g|_v)⁻¹`.
pub fn inverse_consistency(g: &Element, v: &Vertex, n: usize) -> bool {
    let inv = g.invert();
    let p = g.level_permutation(n, BUDGET).unwrap();
    let q = inv.level_permutation(n, BUDGET).unwrap();
    let sec = inv.section(&g.apply(v).unwrap()).unwrap();
    let expect = g.section(v).unwrap().invert();
    g.mul(&inv).level_permutation(n, BUDGET).unwrap().is_identity()
        && q == p.inverse()
        && inv.apply(&g.apply(v).unwrap()).unwrap() == *v
        && sec.level_permutation(n, BUDGET).unwrap() == expect.level_permutation(n, BUDGET).unwrap()
}

/// The level-`n` image is the product of the sections' level-`(n−1)` images
/// placed below each child, followed by the root label moving whole blocks.
pub fn psi_factorization(g: &Element, n: usize) -> bool {
    let m = g.spec().degree();
    let mut acc = Permutation::identity(m.get().pow(n as u32));
    for i in 1..=m.get() {
        let sec = g.section(&Vertex::new(vec![i])).unwrap();
        let q = sec.level_permutation(n - 1, BUDGET).unwrap();
        acc = acc.then(&embed_at_child(&q, i, m).unwrap());
    }
    acc = acc.then(&lift_root_label(&g.root_label(), n));
    acc == g.level_permutation(n, BUDGET).unwrap()
}

/// Specs used by the property suites for each arity.
pub fn property_specs(m: usize) -> Vec<Arc<AutomatonSpec>> {
    match m {
        2 => vec![bsv(2), automaton("adder.json"), automaton("grigorchuk.json")],
        3 => vec![bsv(3), automaton("hanoi3.json")],
        _ => vec![bsv(m)],
    }
}
