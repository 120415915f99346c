//! Level indices, the `s_n` sequence and Hausdorff dimension estimates for
//! automaton groups inside `Γ_m`.

use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logindex::LogIndex;
use crate::perm::{PermGroup, Permutation};
use crate::tree::{first_non_madic_state, AutomatonSpec, Degree, LevelImages, PointBudget};

/// `log_m |Γ_m : St(n)| = 1 + m + ⋯ + m^{n−1}`.
pub fn gamma_index_log(m: Degree, n: usize) -> LogIndex {
    let m = m.get() as i64;
    let k: i64 = (0..n as u32).map(|i| m.pow(i)).sum();
    LogIndex::integer(m as u64, k)
}

/// Rotation of the children of the first vertex of `layer`, on `m^n` points.
fn first_vertex_rotation(m: usize, n: usize, layer: usize) -> Permutation {
    let block = m.pow((n - layer) as u32);
    let child = block / m;
    let images = (0..m.pow(n as u32))
        .map(|p| {
            if p < block {
                (((p / child + 1) % m) * child + p % child) as u32
            } else {
                p as u32
            }
        })
        .collect();
    Permutation::from_images(images).expect("block rotation is a bijection")
}

/// `Γ_{m,n}`: generated by a rotation at the first vertex of each level
/// `0..n`; level transitivity spreads them to every vertex.
pub fn gamma_level_group(m: Degree, n: usize, budget: PointBudget) -> Result<PermGroup> {
    budget.check(m, n)?;
    let gens: Vec<Permutation> = (0..n)
        .map(|j| first_vertex_rotation(m.get(), n, j))
        .collect();
    let g = PermGroup::from_tree_generators(m.get(), n, &gens)?;
    let expected = LogIndex::from_order(m.get() as u64, &g.order())?;
    assert_eq!(expected, gamma_index_log(m, n), "order of the level quotient of Γ_m");
    Ok(g)
}

/// Level quotient `G_n` of the group defined by `spec`.
pub fn level_group(spec: &AutomatonSpec, n: usize, budget: PointBudget) -> Result<PermGroup> {
    let m = spec.degree().get();
    let images = LevelImages::new(spec, n, budget)?;
    let gens: Vec<Permutation> = (0..spec.state_count() as u32)
        .map(|s| {
            images
                .gen(crate::tree::Gen {
                    state: s,
                    inverted: false,
                })
                .clone()
        })
        .collect();
    if first_non_madic_state(spec).is_none() {
        PermGroup::from_tree_generators(m, n, &gens)
    } else {
        PermGroup::from_generators(images.degree(), &gens)
    }
}

/// `|G : St_G(n)|` for `n = 1..=max_level`.
pub fn index_sequence(
    spec: &AutomatonSpec,
    max_level: usize,
    budget: PointBudget,
) -> Result<Vec<BigUint>> {
    if let Some(state) = first_non_madic_state(spec) {
        return Err(Error::NotMAdic(state.to_string()));
    }
    budget.check(spec.degree(), max_level)?;
    (1..=max_level)
        .map(|n| level_group(spec, n, budget).map(|g| g.order()))
        .collect()
}

/// `s_n = m·log_m|St(n−1):St(n)| − log_m|St(n):St(n+1)|` for `n = 1..N−1`,
/// from `orders[i] = |G : St_G(i+1)|`, `i = 0..N−1`.
pub fn s_sequence(orders: &[BigUint], m: Degree) -> Result<Vec<LogIndex>> {
    let base = m.get() as u64;
    let mut with_root = vec![BigUint::one()];
    with_root.extend_from_slice(orders);
    let steps: Vec<LogIndex> = with_root
        .windows(2)
        .map(|w| LogIndex::from_exact_ratio(base, &w[1], &w[0]))
        .collect::<Result<_>>()?;
    let mm = Rational64::from_integer(m.get() as i64);
    Ok(steps
        .windows(2)
        .map(|w| w[0].scale(mm) - w[1].clone())
        .collect())
}

/// Branching form `s_n = −log_m |L St_G(n) : L St_G(n+1)|` from
/// `quotients[i] = |G : L St_G(i+1)|`, `i = 0..N−1`, where `L` is the
/// geometric branching kernel.
pub fn s_sequence_branching(quotients: &[BigUint], m: Degree) -> Result<Vec<LogIndex>> {
    let base = m.get() as u64;
    quotients
        .windows(2)
        .map(|w| LogIndex::from_exact_ratio(base, &w[1], &w[0]).map(|l| -l))
        .collect()
}

/// A truncated evaluation of `log_m|G:St_G(1)| − Σ s_n m^{−n}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremB {
    pub estimate: f64,
    pub tail: f64,
}

/// Evaluates the series through `s.len()` terms. The tail bound is
/// `B·Σ_{n>N} m^{−n} = B·m^{−N}/(m−1)`, with `B = bound` when given and the
/// largest observed `|s_n|` otherwise.
pub fn theorem_b_value(first: &LogIndex, s: &[LogIndex], m: Degree, bound: Option<f64>) -> TheoremB {
    let mf = m.get() as f64;
    let mut est = first.to_f64();
    for (i, sn) in s.iter().enumerate() {
        est -= sn.to_f64() * mf.powi(-(i as i32 + 1));
    }
    let b = bound.unwrap_or_else(|| s.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max));
    TheoremB {
        estimate: est,
        tail: b * mf.powi(-(s.len() as i32)) / (mf - 1.0),
    }
}

/// `log_m|G:St_G(n)| / log_m|Γ_m:St(n)|` for `n = 1..`.
pub fn ratio_sequence(orders: &[BigUint], m: Degree) -> Result<Vec<f64>> {
    orders
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let l = LogIndex::from_order(m.get() as u64, o)?;
            Ok(l.to_f64() / gamma_index_log(m, i + 1).to_f64())
        })
        .collect()
}

/// Smallest `p < len` with `s[i] = s[i+p]` throughout.
pub fn detect_period(s: &[LogIndex]) -> Option<usize> {
    (1..s.len()).find(|&p| (0..s.len() - p).all(|i| s[i] == s[i + p]))
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn big_as_string<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn big_from_string<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    let s = String::deserialize(d)?;
    BigUint::from_str(&s).map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    #[serde(serialize_with = "big_as_string", deserialize_with = "big_from_string")]
    pub index: BigUint,
    pub log_index: LogIndex,
    pub s_n: Option<LogIndex>,
    pub ratio: f64,
    pub partial_dim: Option<f64>,
    pub tail: Option<f64>,
}

/// `rational + log2_coeff · log_m 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub rational: String,
    pub log2_coeff: String,
    pub float: f64,
}

impl ClosedForm {
    pub fn new(m: Degree, rational: Rational64, log2_coeff: Rational64) -> Self {
        let log2 = 2f64.ln() / (m.get() as f64).ln();
        let f = |r: Rational64| r.to_f64().expect("small rational");
        ClosedForm {
            rational: rational.to_string(),
            log2_coeff: log2_coeff.to_string(),
            float: round_sig(f(rational) + f(log2_coeff) * log2),
        }
    }
}

/// Levels that were not computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub from_level: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub m: usize,
    pub group: String,
    pub levels: Vec<LevelRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub closed_form: Option<ClosedForm>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<Skipped>,
}

impl DimensionReport {
    /// Assembles level records. `orders` are `|G:St_G(n)|`; `s` may be
    /// shorter than `orders`; `first` is the leading term of the series.
    pub fn assemble(
        m: Degree,
        group: &str,
        orders: &[BigUint],
        first: &LogIndex,
        s: &[LogIndex],
        bound: Option<f64>,
    ) -> Result<Self> {
        let ratios = ratio_sequence(orders, m)?;
        let mut levels = Vec::with_capacity(orders.len());
        for (i, order) in orders.iter().enumerate() {
            let partial = (i < s.len()).then(|| theorem_b_value(first, &s[..=i], m, bound));
            levels.push(LevelRecord {
                n: i + 1,
                index: order.clone(),
                log_index: LogIndex::from_order(m.get() as u64, order)?,
                s_n: s.get(i).cloned(),
                ratio: round_sig(ratios[i]),
                partial_dim: partial.map(|t| round_sig(t.estimate)),
                tail: partial.map(|t| round_sig(t.tail)),
            });
        }
        Ok(DimensionReport {
            m: m.get(),
            group: group.to_string(),
            levels,
            closed_form: None,
            skipped: None,
        })
    }

    /// Last level carrying a series estimate.
    pub fn final_estimate(&self) -> Option<TheoremB> {
        self.levels.iter().rev().find_map(|l| {
            Some(TheoremB {
                estimate: l.partial_dim?,
                tail: l.tail?,
            })
        })
    }
}

/// Report for an arbitrary `m`-adic automaton, using `s_n` from the level
/// indices of the group itself. Levels beyond the budget are marked skipped;
/// an error is returned only when not even level 1 fits.
pub fn dimension_report(
    spec: &AutomatonSpec,
    group: &str,
    max_level: usize,
    budget: PointBudget,
) -> Result<DimensionReport> {
    let m = spec.degree();
    if let Some(state) = first_non_madic_state(spec) {
        return Err(Error::NotMAdic(state.to_string()));
    }
    budget.check(m, 1)?;
    let reachable = max_level.min(budget.max_level(m));
    let orders = index_sequence(spec, reachable, budget)?;
    let s = s_sequence(&orders, m)?;
    let first = LogIndex::from_order(m.get() as u64, &orders[0])?;
    let mut report = DimensionReport::assemble(m, group, &orders, &first, &s, None)?;
    if reachable < max_level {
        report.skipped = Some(Skipped {
            from_level: reachable + 1,
            reason: format!("{} points exceed the point budget of {}", m.level_size(reachable + 1).unwrap_or(u128::MAX), budget.0),
        });
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

pub const CSV_COLUMNS: [&str; 7] = ["n", "index", "log_index", "s_n", "ratio", "partial_dim", "tail"];

fn opt_f64(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn export_report(report: &DimensionReport, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for l in &report.levels {
                w.write_record([
                    l.n.to_string(),
                    l.index.to_string(),
                    l.log_index.to_string(),
                    l.s_n.as_ref().map(ToString::to_string).unwrap_or_default(),
                    l.ratio.to_string(),
                    opt_f64(l.partial_dim),
                    opt_f64(l.tail),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

pub fn parse_report_json(text: &str) -> Result<DimensionReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
}

/// Reads the level rows of a CSV report over base `m`.
pub fn parse_levels_csv(text: &str, m: Degree) -> Result<Vec<LevelRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |what: &str| Error::Parse(format!("csv report: {what}"));
    let headers = r.headers().map_err(|e| bad(&e.to_string()))?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(bad("unexpected header"));
    }
    let base = m.get() as u64;
    let float = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| bad(s))
        }
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e.to_string()))?;
        out.push(LevelRecord {
            n: rec[0].parse().map_err(|_| bad(&rec[0]))?,
            index: rec[1].parse().map_err(|_| bad(&rec[1]))?,
            log_index: LogIndex::parse_with_base(base, &rec[2])?,
            s_n: if rec[3].is_empty() {
                None
            } else {
                Some(LogIndex::parse_with_base(base, &rec[3])?)
            },
            ratio: float(&rec[4])?.ok_or_else(|| bad("missing ratio"))?,
            partial_dim: float(&rec[5])?,
            tail: float(&rec[6])?,
        });
    }
    Ok(out)
}
