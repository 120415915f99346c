//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treedim::bsv::BsvContext;
use treedim::dimension::{gamma_level_group, theorem_b_value};
use treedim::intlin::{build_matrix_a, row_space_contains_mod_i64};
use treedim::logindex::LogIndex;
use treedim::perm::{PermGroup, Permutation};
use treedim::tree::{Degree, LevelImages};

use common::*;

/// Tolerances and ranges, fixed here so every run checks the same thing.
const M6_FLOAT: f64 = 0.580819;
const M6_TOL: f64 = 1e-6;
const RANGE_56: [(usize, usize, usize); 3] = [(2, 2, 6), (3, 2, 4), (4, 2, 3)];
const KMAX: [(usize, usize); 5] = [(2, 3), (3, 1), (4, 1), (5, 0), (6, 0)];
const CLOSURE_LIMIT: usize = 5000;
const WORDS_PER_INVARIANT: usize = 120;
const SEED: u64 = 0x7265_6564;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ctx(m: usize) -> BsvContext {
    BsvContext::new(Degree::new(m).unwrap(), BUDGET)
}

fn tau(m: usize) -> usize {
    usize::from(m.is_multiple_of(2))
}

/// `(m − τ(m−1)·log_m 2)/(m+1)` exactly when `m = 2^j`, where `log_m 2 = 1/j`.
fn exact_dimension_power_of_two(m: usize) -> Rational64 {
    let j = m.trailing_zeros() as i64;
    assert_eq!(1usize << j, m);
    let m = m as i64;
    (Rational64::from_integer(m) - Rational64::new(m - 1, j)) / Rational64::from_integer(m + 1)
}

/// Closed form and series estimate from `s_1..s_N` against each other.
fn closed_form_case(m: usize, n_terms: usize, exact: Option<Rational64>) -> Outcome {
    let c = ctx(m);
    let (r, k, f) = c.hausdorff_closed_form();
    if let Some(want) = exact {
        let j = if m.is_power_of_two() { m.trailing_zeros() as i64 } else { 0 };
        let got = if j > 0 { r + k / j } else { r };
        if !k.is_zero() && j == 0 {
            return Err(format!("closed form {r} + {k}·log_{m} 2 is not rational"));
        }
        if got != want {
            return Err(format!("closed form {got}, expected {want}"));
        }
    }
    let s = c.s_sequence(n_terms + 1).map_err(|e| e.to_string())?;
    if s.len() != n_terms {
        return Err(format!("{} terms, wanted {n_terms}", s.len()));
    }
    let tb = theorem_b_value(&LogIndex::zero(m as u64), &s, c.m(), Some(c.s_bound()));
    let gap = (tb.estimate - f).abs();
    if gap > tb.tail {
        return Err(format!("estimate {:.9} is {gap:.3e} from {f:.9}, tail {:.3e}", tb.estimate, tb.tail));
    }
    Ok(format!("value {f:.9}, N={n_terms} estimate {:.9}, |gap| {gap:.2e} <= tail {:.2e}", tb.estimate, tb.tail))
}

fn criterion_1() -> Outcome {
    let out = closed_form_case(2, 8, Some(Rational64::new(1, 3)))?;
    let tail = 2.0 * 2f64.powi(-8);
    let c = ctx(2);
    let s = c.s_sequence(9).map_err(|e| e.to_string())?;
    let tb = theorem_b_value(&LogIndex::zero(2), &s, c.m(), Some(c.s_bound()));
    if tb.tail > tail + 1e-15 {
        return Err(format!("tail {} exceeds 2·2^-8", tb.tail));
    }
    Ok(format!("exact 1/3; {out}"))
}

fn criterion_2() -> Outcome {
    let out = closed_form_case(3, 5, Some(Rational64::new(3, 4)))?;
    Ok(format!("exact 3/4; {out}"))
}

fn criterion_3() -> Outcome {
    let want = exact_dimension_power_of_two(4);
    if want != Rational64::new(1, 2) {
        return Err(format!("oracle gives {want}"));
    }
    let out = closed_form_case(4, 4, Some(want))?;
    Ok(format!("exact 1/2; {out}"))
}

fn criterion_4() -> Outcome {
    let m = 6f64;
    // independent evaluation of (m − (m−1)log_m 2)/(m+1)
    let oracle = (m - (m - 1.0) * 2f64.ln() / m.ln()) / (m + 1.0);
    let (_, _, f) = ctx(6).hausdorff_closed_form();
    if (f - M6_FLOAT).abs() > M6_TOL || (f - oracle).abs() > 1e-12 {
        return Err(format!("closed form {f:.10}, oracle {oracle:.10}"));
    }
    closed_form_case(6, 3, None)
}

/// `m^{(m−1)k_n} / 2^{(m−1)e_{n−1}τ}`.
fn expected_quotient_order(m: usize, n: usize) -> BigUint {
    let k = n / 2;
    let e_prev = (n - 1) % 2;
    BigUint::from(m).pow(((m - 1) * k) as u32) >> ((m - 1) * e_prev * tau(m))
}

/// `m^{k+e} / 2^{eτ}` for `n = 2k + e`.
fn expected_ab_order(m: usize, n: usize) -> BigUint {
    let (k, e) = (n / 2, n % 2);
    BigUint::from(m).pow((k + e) as u32) >> (e * tau(m))
}

/// Smallest `t ≥ 1` with `p^t ∈ sub`, by stepping through powers.
fn order_by_search(p: &Permutation, sub: &PermGroup, cap: BigUint) -> Result<u64, String> {
    let mut q = p.clone();
    let mut t = 1u64;
    while !sub.contains(&q).map_err(|e| e.to_string())? {
        q = q.then(p);
        t += 1;
        if BigUint::from(t) > cap {
            return Err("power search exceeded the group order".into());
        }
    }
    Ok(t)
}

fn range_56() -> impl Iterator<Item = (usize, usize)> {
    RANGE_56.iter().flat_map(|&(m, lo, hi)| (lo..=hi).map(move |n| (m, n)))
}

fn criterion_5() -> Outcome {
    let mut seen = Vec::new();
    for (m, n) in range_56() {
        let c = ctx(m);
        let der = c.derived_quotient(n).map_err(|e| e.to_string())?;
        let l2 = c.l2_quotient(n).map_err(|e| e.to_string())?;
        if !l2.is_subgroup_of(&der) {
            return Err(format!("m={m} n={n}: L2 image not inside the derived image"));
        }
        let got = der.index(&l2).map_err(|e| e.to_string())?;
        let want = expected_quotient_order(m, n);
        if got != want {
            return Err(format!("m={m} n={n}: index {got}, expected {want}"));
        }
        seen.push(format!("({m},{n})={got}"));
    }
    Ok(seen.join(" "))
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    for (m, n) in range_56() {
        let c = ctx(m);
        let report = c.verify_lemma_32(n).map_err(|e| e.to_string())?;
        if let Some(r) = report.failures().next() {
            return Err(format!("m={m} n={n}: {} expected {} got {}", r.check, r.expected, r.actual));
        }
        if report.skipped() > 0 {
            return Err(format!("m={m} n={n}: {} checks skipped", report.skipped()));
        }
        checks += report.passed();
        // ℓ by direct search: smallest t with (ab)^t in the derived image one level up
        let h = c.level_quotient(n - 1).map_err(|e| e.to_string())?;
        let der = c.derived_quotient(n - 1).map_err(|e| e.to_string())?;
        let ab = c.image(&c.ab(), n - 1).map_err(|e| e.to_string())?;
        let ell = order_by_search(&ab, &der, h.order())?;
        let want = expected_ab_order(m, n - 1);
        if BigUint::from(ell) != want || c.predicted_ab_order(n - 1) != want {
            return Err(format!("m={m} n={n}: ell {ell}, expected {want}"));
        }
        // index = ℓ^(m−1)
        let idx = c.quotient_order(n).map_err(|e| e.to_string())?;
        if idx != want.pow((m - 1) as u32) {
            return Err(format!("m={m} n={n}: index {idx} is not ell^(m-1)"));
        }
        // each c_i has order ℓ modulo L2 and they commute modulo L2
        let l2 = c.l2_quotient(n).map_err(|e| e.to_string())?;
        let full = c.derived_quotient(n).map_err(|e| e.to_string())?;
        let cs: Vec<Permutation> = (0..m - 1)
            .map(|i| c.image(&c.c(i), n))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (i, ci) in cs.iter().enumerate() {
            let o = order_by_search(ci, &l2, full.order())?;
            if BigUint::from(o) != want {
                return Err(format!("m={m} n={n}: c_{i} has order {o} modulo L2"));
            }
            for cj in &cs[i + 1..] {
                if !l2.contains(&ci.commutator(cj)).map_err(|e| e.to_string())? {
                    return Err(format!("m={m} n={n}: c_{i} does not commute modulo L2"));
                }
            }
        }
    }
    Ok(format!("{checks} structure checks plus direct ell/index/c_i checks over the range"))
}

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    for (m, k) in KMAX {
        let report = ctx(m).verify_prop_34(k).map_err(|e| e.to_string())?;
        if let Some(r) = report.failures().next() {
            return Err(format!("m={m}: {} k={:?} j={:?} expected {} got {}", r.check, r.k, r.j, r.expected, r.actual));
        }
        let budget_skips = report
            .records
            .iter()
            .filter(|r| r.pass.is_none() && r.note.as_deref().is_some_and(|n| n.contains("budget")))
            .count();
        if budget_skips > 0 || report.passed() == 0 {
            return Err(format!("m={m}: {budget_skips} checks skipped for budget, {} passed", report.passed()));
        }
        summary.push(format!("m={m}:{}", report.passed()));
    }
    Ok(format!("claims passed {}", summary.join(" ")))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for &(m, lo, hi) in &RANGE_56 {
        let c = ctx(m);
        let s = c.s_sequence(hi + 1).map_err(|e| e.to_string())?;
        for n in lo..=hi {
            let e = (n % 2) as i64;
            let mi = m as i64;
            let want = LogIndex::integer(m as u64, -(mi - 1) * e)
                + LogIndex::prime_term(m as u64, 2, Rational64::from_integer((mi - 1) * (2 * e - 1) * tau(m) as i64));
            if s[n - 1] != want {
                return Err(format!("m={m} n={n}: s_n {} expected {want}", s[n - 1]));
            }
            count += 1;
        }
    }
    Ok(format!("{count} exact s_n values"))
}

fn criterion_9() -> Outcome {
    let p = |d: usize, cycles: &[&[u32]]| Permutation::from_cycles(d, cycles).unwrap();
    let level_gens = |m: usize, n: usize| -> Vec<Permutation> {
        let spec = bsv(m);
        let images = LevelImages::new(&spec, n, BUDGET).unwrap();
        ["a", "b"]
            .iter()
            .map(|s| images.gen(treedim::tree::Gen { state: spec.state(s).unwrap(), inverted: false }).clone())
            .collect()
    };
    let mut cases: Vec<(String, PermGroup)> = vec![
        ("S5".into(), PermGroup::from_generators(5, &[p(5, &[&[0, 1, 2, 3, 4]]), p(5, &[&[0, 1]])]).unwrap()),
        ("A5".into(), PermGroup::from_generators(5, &[p(5, &[&[0, 1, 2]]), p(5, &[&[0, 1, 2, 3, 4]])]).unwrap()),
        ("D8".into(), PermGroup::from_generators(4, &[p(4, &[&[0, 1, 2, 3]]), p(4, &[&[0, 2]])]).unwrap()),
        (
            "C2^3".into(),
            PermGroup::from_generators(6, &[p(6, &[&[0, 1]]), p(6, &[&[2, 3]]), p(6, &[&[4, 5]])]).unwrap(),
        ),
    ];
    for (m, n) in [(2usize, 3usize), (2, 4), (3, 2)] {
        let g = level_gens(m, n);
        cases.push((format!("BSV({m}) level {n}"), PermGroup::from_tree_generators(m, n, &g).unwrap()));
    }
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 2)] {
        cases.push((
            format!("Gamma({m}) level {n}"),
            gamma_level_group(Degree::new(m).unwrap(), n, BUDGET).map_err(|e| e.to_string())?,
        ));
    }
    let mut sizes = Vec::new();
    for (name, g) in &cases {
        let size = closure_size(g.degree(), g.generators(), CLOSURE_LIMIT)
            .ok_or_else(|| format!("{name}: more than {CLOSURE_LIMIT} elements"))?;
        if g.order() != BigUint::from(size) {
            return Err(format!("{name}: chain order {}, closure {size}", g.order()));
        }
        sizes.push(format!("{name}={size}"));
    }
    Ok(format!("{} groups: {}", cases.len(), sizes.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut count = 0;
    for m in 2..=4 {
        let a = build_matrix_a(m);
        for q in [2i64, 3, 4, 8] {
            for (family, v) in rejection_families(m, q) {
                let fast = row_space_contains_mod_i64(&a, &v, q).map_err(|e| e.to_string())?;
                if fast != row_space_brute(&a, &v, q) {
                    return Err(format!("{family} m={m} q={q} v={v:?}: got {fast}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} vectors agree with enumeration"))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut total = 0;
    for m in [2usize, 3, 4] {
        let depth = if m == 2 { 5 } else { 3 };
        for spec in property_specs(m) {
            for _ in 0..WORDS_PER_INVARIANT {
                let g = random_word(&spec, &mut rng, 12);
                let h = random_word(&spec, &mut rng, 12);
                let v = random_vertex(m, depth, &mut rng);
                let u = random_vertex(m, 2, &mut rng);
                let label = format!("m={m} g={} h={}", g.display_word(), h.display_word());
                if !action_homomorphism(&g, &h, &v, depth) {
                    return Err(format!("action homomorphism: {label} v={v}"));
                }
                if !section_cocycle(&g, &h, &u, depth - 2) {
                    return Err(format!("section cocycle: {label} v={u}"));
                }
                if !inverse_consistency(&g, &u, depth - 2) {
                    return Err(format!("inverse consistency: {label} v={u}"));
                }
                if !psi_factorization(&g, depth) {
                    return Err(format!("psi factorization: {label}"));
                }
                total += 4;
            }
        }
    }
    Ok(format!("{total} invariant checks, {WORDS_PER_INVARIANT} random words per invariant per group"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed form m=2, series N=8", criterion_1),
        ("closed form m=3, series N=5", criterion_2),
        ("closed form m=4, series N=4", criterion_3),
        ("closed form m=6, series N=3", criterion_4),
        ("branching quotient indices", criterion_5),
        ("elementary abelian quotient structure", criterion_6),
        ("membership claims", criterion_7),
        ("s_n closed form", criterion_8),
        ("chain order vs closure", criterion_9),
        ("lattice membership vs enumeration", criterion_10),
        ("tree invariants", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = run();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
