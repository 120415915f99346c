//! The m-adic rooted tree and automorphisms given by finite invertible
//! automata (wreath recursions).
//!
//! Conventions: automorphisms act on the right, `(v)g`, and the product `g·h`
//! applies `g` first. Letters are `1..=m`. Level-`n` vertices are indexed
//! with the leftmost letter most significant, 0-based, so the subtree below a
//! vertex occupies a contiguous block of indices.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Name of the reserved identity state.
pub const IDENTITY_STATE: &str = "e";

/// Default bound on the number of tree leaves handled at once.
pub const DEFAULT_POINT_BUDGET: usize = 5000;

/// Arity `m ≥ 2` of the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Degree(usize);

impl Degree {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidDegree(m));
        }
        Ok(Degree(m))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of vertices at `level`, if it fits in `u128`.
    pub fn level_size(self, level: usize) -> Option<u128> {
        (self.0 as u128).checked_pow(level as u32)
    }
}

impl TryFrom<usize> for Degree {
    type Error = Error;
    fn try_from(m: usize) -> Result<Self> {
        Degree::new(m)
    }
}

impl From<Degree> for usize {
    fn from(d: Degree) -> usize {
        d.0
    }
}

/// Upper bound on the number of level points a computation may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointBudget(pub usize);

impl Default for PointBudget {
    fn default() -> Self {
        PointBudget(DEFAULT_POINT_BUDGET)
    }
}

impl PointBudget {
    pub fn check(self, m: Degree, level: usize) -> Result<usize> {
        match m.level_size(level) {
            Some(p) if p <= self.0 as u128 => Ok(p as usize),
            p => Err(Error::PointBudgetExceeded {
                level,
                points: p.unwrap_or(u128::MAX),
                budget: self.0,
            }),
        }
    }

    /// Deepest level that fits in the budget.
    pub fn max_level(self, m: Degree) -> usize {
        let mut n = 0;
        while self.check(m, n + 1).is_ok() {
            n += 1;
        }
        n
    }
}

/// A vertex: a word over `1..=m`; the empty word is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(Vec<usize>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Vertex(letters)
    }

    /// Parses a string of decimal digits, e.g. `"31"` (degrees up to 9), or
    /// `ø` for the root.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "ø" {
            return Ok(Vertex::root());
        }
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("bad vertex letter `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Vertex)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn validate(&self, m: Degree) -> Result<()> {
        for &x in &self.0 {
            if x == 0 || x > m.get() {
                return Err(Error::LetterOutOfRange {
                    letter: x,
                    degree: m.get(),
                });
            }
        }
        Ok(())
    }

    /// Canonical 0-based index among the vertices of its level.
    pub fn index(&self, m: Degree) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * m.get() + (x - 1))
    }

    pub fn from_index(m: Degree, level: usize, mut index: usize) -> Self {
        let mut letters = vec![0; level];
        for slot in letters.iter_mut().rev() {
            *slot = index % m.get() + 1;
            index /= m.get();
        }
        Vertex(letters)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ø");
        }
        let sep = if self.0.iter().any(|&x| x > 9) { "." } else { "" };
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// A state reference with an inversion flag. The identity state is never
/// stored; it is represented by the absence of a letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub state: u32,
    pub inverted: bool,
}

impl Gen {
    pub fn inverse(self) -> Self {
        Gen {
            state: self.state,
            inverted: !self.inverted,
        }
    }
}

/// Automaton file layout: `alphabet_size` and `states`, each state with a
/// `name`, 1-based `output` images and `transitions` (state names, optionally
/// suffixed `^-1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAutomaton {
    pub alphabet_size: usize,
    pub states: Vec<RawState>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawState {
    pub name: String,
    pub output: Vec<usize>,
    pub transitions: Vec<String>,
}

impl RawAutomaton {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("automaton file: {e}")))
    }
}

/// A validated finite-state invertible automaton over `m` letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutomatonSpec {
    degree: Degree,
    names: Vec<String>,
    /// 0-based output permutation of each state and its inverse.
    outputs: Vec<Vec<usize>>,
    inv_outputs: Vec<Vec<usize>>,
    /// Section of each state at each (0-based) letter; `None` is the identity.
    transitions: Vec<Vec<Option<Gen>>>,
}

fn split_ref(s: &str) -> (&str, bool) {
    match s.trim().strip_suffix("^-1") {
        Some(base) => (base.trim(), true),
        None => (s.trim(), false),
    }
}

/// Checks a raw automaton description.
pub fn validate_automaton(raw: &RawAutomaton) -> Result<AutomatonSpec> {
    let degree = Degree::new(raw.alphabet_size)?;
    let m = degree.get();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut declared = Vec::new();
    for st in &raw.states {
        if st.name.is_empty() || st.name.chars().any(char::is_whitespace) || st.name.contains('^')
        {
            return Err(Error::Parse(format!("invalid state name `{}`", st.name)));
        }
        if declared.contains(&st.name.as_str()) {
            return Err(Error::DuplicateStateName(st.name.clone()));
        }
        declared.push(st.name.as_str());
        if st.name != IDENTITY_STATE {
            index.insert(st.name.as_str(), index.len() as u32);
        }
    }
    let mut names = Vec::new();
    let mut outputs = Vec::new();
    let mut inv_outputs = Vec::new();
    let mut transitions = Vec::new();
    for st in &raw.states {
        if st.output.len() != m {
            return Err(Error::WrongArity {
                state: st.name.clone(),
                field: "output",
                found: st.output.len(),
                expected: m,
            });
        }
        if st.transitions.len() != m {
            return Err(Error::WrongArity {
                state: st.name.clone(),
                field: "transitions",
                found: st.transitions.len(),
                expected: m,
            });
        }
        let mut seen = vec![false; m];
        for &y in &st.output {
            if y == 0 || y > m || seen[y - 1] {
                return Err(Error::NonBijectiveOutput {
                    state: st.name.clone(),
                    degree: m,
                });
            }
            seen[y - 1] = true;
        }
        let out: Vec<usize> = st.output.iter().map(|y| y - 1).collect();
        let mut trans = Vec::with_capacity(m);
        for t in &st.transitions {
            let (base, inverted) = split_ref(t);
            if base == IDENTITY_STATE {
                trans.push(None);
            } else if let Some(&k) = index.get(base) {
                trans.push(Some(Gen { state: k, inverted }));
            } else {
                return Err(Error::UnknownTransitionTarget {
                    state: st.name.clone(),
                    target: t.clone(),
                });
            }
        }
        if st.name == IDENTITY_STATE {
            let identity_out = out.iter().enumerate().all(|(i, &y)| i == y);
            if !identity_out || trans.iter().any(Option::is_some) {
                return Err(Error::ReservedNameMisuse(
                    "state `e` must have identity output and only `e` transitions".into(),
                ));
            }
            continue;
        }
        let mut inv = vec![0; m];
        for (x, &y) in out.iter().enumerate() {
            inv[y] = x;
        }
        names.push(st.name.clone());
        outputs.push(out);
        inv_outputs.push(inv);
        transitions.push(trans);
    }
    Ok(AutomatonSpec {
        degree,
        names,
        outputs,
        inv_outputs,
        transitions,
    })
}

impl AutomatonSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        validate_automaton(&RawAutomaton::from_json(text)?)
    }

    /// The generalized Brunner–Sidki–Vieira automaton:
    /// `a = (1,…,1,a)σ`, `b = (1,…,1,b⁻¹)σ` with `σ = (1 2 ⋯ m)`.
    pub fn bsv(m: usize) -> Result<Self> {
        let raw = bsv_raw(m);
        validate_automaton(&raw)
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn to_raw(&self) -> RawAutomaton {
        let m = self.degree.get();
        let states = (0..self.names.len())
            .map(|s| RawState {
                name: self.names[s].clone(),
                output: self.outputs[s].iter().map(|y| y + 1).collect(),
                transitions: (0..m)
                    .map(|x| match self.transitions[s][x] {
                        None => IDENTITY_STATE.to_string(),
                        Some(g) => self.gen_name(g),
                    })
                    .collect(),
            })
            .collect();
        RawAutomaton {
            alphabet_size: m,
            states,
        }
    }

    pub fn gen_name(&self, g: Gen) -> String {
        let base = &self.names[g.state as usize];
        if g.inverted {
            format!("{base}^-1")
        } else {
            base.clone()
        }
    }

    /// 0-based image of 0-based letter `x` under the label of `g`.
    #[inline]
    fn gen_output(&self, g: Gen, x: usize) -> usize {
        if g.inverted {
            self.inv_outputs[g.state as usize][x]
        } else {
            self.outputs[g.state as usize][x]
        }
    }

    /// Section of `g` at 0-based letter `x`.
    #[inline]
    fn gen_section(&self, g: Gen, x: usize) -> Option<Gen> {
        if g.inverted {
            // g⁻¹|_x = (g|_{(x)g⁻¹})⁻¹
            let y = self.inv_outputs[g.state as usize][x];
            self.transitions[g.state as usize][y].map(Gen::inverse)
        } else {
            self.transitions[g.state as usize][x]
        }
    }
}

/// Raw description of the generalized Brunner–Sidki–Vieira automaton.
pub fn bsv_raw(m: usize) -> RawAutomaton {
    let sigma: Vec<usize> = (1..=m).map(|x| x % m + 1).collect();
    let tail = |last: &str| -> Vec<String> {
        let mut t = vec![IDENTITY_STATE.to_string(); m.saturating_sub(1)];
        t.push(last.to_string());
        t
    };
    RawAutomaton {
        alphabet_size: m,
        states: vec![
            RawState {
                name: "a".into(),
                output: sigma.clone(),
                transitions: tail("a"),
            },
            RawState {
                name: "b".into(),
                output: sigma,
                transitions: tail("b^-1"),
            },
        ],
    }
}

/// Whether every state output is a power of `σ = (1 2 ⋯ m)`.
pub fn is_madic(spec: &AutomatonSpec) -> bool {
    first_non_madic_state(spec).is_none()
}

pub(crate) fn first_non_madic_state(spec: &AutomatonSpec) -> Option<&str> {
    let m = spec.degree.get();
    spec.outputs
        .iter()
        .position(|out| {
            let shift = out[0];
            out.iter().enumerate().any(|(x, &y)| y != (x + shift) % m)
        })
        .map(|s| spec.names[s].as_str())
}

/// A freely reduced word over signed states; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    spec: Arc<AutomatonSpec>,
    word: Vec<Gen>,
}

fn push_reduced(word: &mut Vec<Gen>, g: Gen) {
    if word.last() == Some(&g.inverse()) {
        word.pop();
    } else {
        word.push(g);
    }
}

impl Element {
    pub fn identity(spec: &Arc<AutomatonSpec>) -> Self {
        Element {
            spec: Arc::clone(spec),
            word: Vec::new(),
        }
    }

    pub fn from_gens(spec: &Arc<AutomatonSpec>, gens: impl IntoIterator<Item = Gen>) -> Self {
        let mut word = Vec::new();
        for g in gens {
            push_reduced(&mut word, g);
        }
        Element {
            spec: Arc::clone(spec),
            word,
        }
    }

    /// Parses whitespace-separated state names with optional `^-1` suffixes;
    /// `e` denotes the identity.
    pub fn parse(spec: &Arc<AutomatonSpec>, text: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for tok in text.split_whitespace() {
            let (base, inverted) = split_ref(tok);
            if base == IDENTITY_STATE {
                continue;
            }
            let state = spec
                .state(base)
                .ok_or_else(|| Error::BadWord(format!("unknown state `{base}` in `{text}`")))?;
            gens.push(Gen { state, inverted });
        }
        Ok(Element::from_gens(spec, gens))
    }

    pub fn state(spec: &Arc<AutomatonSpec>, name: &str) -> Result<Self> {
        Element::parse(spec, name)
    }

    pub fn spec(&self) -> &Arc<AutomatonSpec> {
        &self.spec
    }

    pub fn word(&self) -> &[Gen] {
        &self.word
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// `self` first, then `other`.
    pub fn mul(&self, other: &Element) -> Element {
        let mut word = self.word.clone();
        for &g in &other.word {
            push_reduced(&mut word, g);
        }
        Element {
            spec: Arc::clone(&self.spec),
            word,
        }
    }

    pub fn pow(&self, e: i64) -> Element {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut acc = Element::identity(&self.spec);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Reversed word with flipped inversion flags.
    pub fn invert(&self) -> Element {
        Element::from_gens(&self.spec, self.word.iter().rev().map(|g| g.inverse()))
    }

    /// `self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &Element) -> Element {
        self.invert()
            .mul(&other.invert())
            .mul(self)
            .mul(other)
    }

    /// `other⁻¹ · self · other`.
    pub fn conjugate_by(&self, other: &Element) -> Element {
        other.invert().mul(self).mul(other)
    }

    /// Label at the root as a 0-based image list.
    pub fn root_label(&self) -> Vec<usize> {
        let m = self.spec.degree.get();
        (0..m)
            .map(|x| self.word.iter().fold(x, |y, &g| self.spec.gen_output(g, y)))
            .collect()
    }

    fn section_at_letter(&self, x: usize) -> Element {
        // (g h)|_x = g|_x · h|_{(x)g}
        let mut y = x;
        let mut word = Vec::with_capacity(self.word.len());
        for &g in &self.word {
            if let Some(s) = self.spec.gen_section(g, y) {
                push_reduced(&mut word, s);
            }
            y = self.spec.gen_output(g, y);
        }
        Element {
            spec: Arc::clone(&self.spec),
            word,
        }
    }

    /// Section `g|_v`.
    pub fn section(&self, v: &Vertex) -> Result<Element> {
        v.validate(self.spec.degree)?;
        let mut g = self.clone();
        for &x in v.letters() {
            g = g.section_at_letter(x - 1);
        }
        Ok(g)
    }

    /// Image `(v)g` under the right action.
    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        v.validate(self.spec.degree)?;
        let mut g = self.clone();
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            let y = g
                .word
                .iter()
                .fold(x - 1, |y, &s| self.spec.gen_output(s, y));
            out.push(y + 1);
            g = g.section_at_letter(x - 1);
        }
        Ok(Vertex(out))
    }

    /// Permutation induced on level `n`.
    pub fn level_permutation(&self, n: usize, budget: PointBudget) -> Result<Permutation> {
        LevelImages::new(&self.spec, n, budget)?.element(self)
    }

    pub fn display_word(&self) -> String {
        if self.word.is_empty() {
            return IDENTITY_STATE.to_string();
        }
        self.word
            .iter()
            .map(|&g| self.spec.gen_name(g))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.display_word())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_word())
    }
}

/// Level-`n` permutations of every state, built bottom-up through the
/// wreath recursion; words are then evaluated as products.
#[derive(Clone, Debug)]
pub struct LevelImages {
    level: usize,
    degree: usize,
    states: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl LevelImages {
    pub fn new(spec: &AutomatonSpec, n: usize, budget: PointBudget) -> Result<Self> {
        let points = budget.check(spec.degree, n)?;
        let m = spec.degree.get();
        let k = spec.state_count();
        // level 0: a single point
        let mut perms: Vec<Vec<u32>> = vec![vec![0]; k];
        let mut size = 1usize;
        for _ in 0..n {
            let next_size = size * m;
            let inverses: Vec<Vec<u32>> = perms
                .iter()
                .map(|p| {
                    let mut inv = vec![0u32; p.len()];
                    for (i, &y) in p.iter().enumerate() {
                        inv[y as usize] = i as u32;
                    }
                    inv
                })
                .collect();
            let mut next = vec![vec![0u32; next_size]; k];
            for (s, row) in next.iter_mut().enumerate() {
                for x in 0..m {
                    let y = spec.outputs[s][x];
                    let sub = spec.transitions[s][x];
                    for r in 0..size {
                        let rr = match sub {
                            None => r,
                            Some(g) if g.inverted => inverses[g.state as usize][r] as usize,
                            Some(g) => perms[g.state as usize][r] as usize,
                        };
                        row[x * size + r] = (y * size + rr) as u32;
                    }
                }
            }
            perms = next;
            size = next_size;
        }
        debug_assert_eq!(size, points);
        let states: Vec<Permutation> = perms
            .into_iter()
            .map(Permutation::from_images_unchecked)
            .collect();
        let inverses = states.iter().map(Permutation::inverse).collect();
        Ok(LevelImages {
            level: n,
            degree: size,
            states,
            inverses,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gen(&self, g: Gen) -> &Permutation {
        if g.inverted {
            &self.inverses[g.state as usize]
        } else {
            &self.states[g.state as usize]
        }
    }

    pub fn element(&self, g: &Element) -> Result<Permutation> {
        let mut p = Permutation::identity(self.degree);
        for &s in g.word() {
            if s.state as usize >= self.states.len() {
                return Err(Error::BadWord("element from a different automaton".into()));
            }
            p.then_in_place(self.gen(s));
        }
        Ok(p)
    }
}

/// Acts as `q` on the block of level-`n` vertices below child `i` (1-based)
/// and trivially elsewhere.
pub fn embed_at_child(q: &Permutation, i: usize, m: Degree) -> Result<Permutation> {
    if i == 0 || i > m.get() {
        return Err(Error::LetterOutOfRange {
            letter: i,
            degree: m.get(),
        });
    }
    let d = q.degree();
    let mut power = 1;
    while power < d {
        power *= m.get();
    }
    if power != d {
        return Err(Error::DegreeMismatch {
            expected: power,
            found: d,
        });
    }
    let mut images: Vec<u32> = (0..(d * m.get()) as u32).collect();
    let off = (i - 1) * d;
    for r in 0..d {
        images[off + r] = (off + q.apply(r)) as u32;
    }
    Ok(Permutation::from_images_unchecked(images))
}

/// Lifts a permutation of the `m` children (0-based image list) to level `n`,
/// moving whole blocks rigidly.
pub fn lift_root_label(label: &[usize], n: usize) -> Permutation {
    let m = label.len();
    let block = m.pow(n.saturating_sub(1) as u32);
    let images = (0..m * block)
        .map(|p| (label[p / block] * block + p % block) as u32)
        .collect();
    Permutation::from_images_unchecked(images)
}

/// Restriction of `p ∈ St(1)` to the block below child `i` (1-based).
pub fn child_section(p: &Permutation, i: usize, m: Degree) -> Result<Permutation> {
    if i == 0 || i > m.get() {
        return Err(Error::LetterOutOfRange {
            letter: i,
            degree: m.get(),
        });
    }
    let d = p.degree() / m.get();
    let off = (i - 1) * d;
    let images: Vec<u32> = (0..d)
        .map(|r| {
            let y = p.apply(off + r);
            if y < off || y >= off + d {
                Err(Error::InvalidPermutation(format!(
                    "not in the first level stabilizer: {} ↦ {}",
                    off + r,
                    y
                )))
            } else {
                Ok((y - off) as u32)
            }
        })
        .collect::<Result<_>>()?;
    Permutation::from_images(images)
}
