//! Γ^M transition graphs and the Ferenczi–Zamboni window validator.
//!
//! The graph Γ^M has the squares as vertices and two out-edges per vertex:
//! an `L`-edge `λ → v∘h^M(λ)` and an `R`-edge `λ → v∘h^{M+1}(λ)`. Cutting
//! sequences of slope-`m` geodesics project to walks on Γ^M where
//! `M = ⌊1/m⌋ mod D`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::Permutation;
use crate::surface::Surface;

/// The two walk letters: `L` for a non-wrapping rotation step (gap `M+1`),
/// `R` for a wrapping one (gap `M+2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LR {
    L,
    R,
}

impl LR {
    pub fn other(self) -> LR {
        match self {
            LR::L => LR::R,
            LR::R => LR::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            LR::L => 'L',
            LR::R => 'R',
        }
    }

    pub fn from_char(c: char) -> Option<LR> {
        match c {
            'L' => Some(LR::L),
            'R' => Some(LR::R),
            _ => None,
        }
    }
}

impl fmt::Display for LR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LR::L => "L",
            LR::R => "R",
        })
    }
}

/// A walk symbol: square label with the letter of the step taken from it.
pub type PairSym = (usize, LR);

pub fn format_pair(sym: PairSym) -> String {
    alloc::format!("({},{})", sym.0, sym.1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaError {
    MOutOfRange { m: usize, modulus: usize },
    VertexOutOfRange { vertex: usize, degree: usize },
    AbsentSubword,
}

impl fmt::Display for GammaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaError::MOutOfRange { m, modulus } => {
                write!(f, "M = {m} out of range (modulus {modulus})")
            }
            GammaError::VertexOutOfRange { vertex, degree } => {
                write!(f, "vertex {vertex} out of range (degree {degree})")
            }
            GammaError::AbsentSubword => write!(f, "subword does not occur in the window"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GammaError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaEdge {
    pub from: usize,
    pub letter: LR,
    pub to: usize,
    pub bad: bool,
}

/// The transition graph Γ^M of a surface.
#[derive(Debug, Clone)]
pub struct GammaGraph {
    d: usize,
    m: usize,
    l_map: Permutation,
    r_map: Permutation,
    bad_edges: BTreeSet<PairSym>,
}

impl GammaGraph {
    pub fn build(surface: &Surface, m: usize) -> Result<GammaGraph, GammaError> {
        let modulus = surface.cycle_modulus();
        if m >= modulus {
            return Err(GammaError::MOutOfRange { m, modulus });
        }
        let l_map = surface.v().compose(&surface.h().pow(m));
        let r_map = surface.v().compose(&surface.h().pow(m + 1));
        // Both edges out of λ sweep past the upper-right corner of h^M(λ):
        // the L-bundle grazes it as x → (1−θ)⁻ and the R-bundle crosses
        // just beyond it, so both are bad exactly when h^M(λ) is.
        let h_m = surface.h().pow(m);
        let mut bad_edges = BTreeSet::new();
        for sq in 1..=surface.degree() {
            if surface.is_bad(h_m.apply(sq)) {
                bad_edges.insert((sq, LR::L));
                bad_edges.insert((sq, LR::R));
            }
        }
        for sq in 1..=surface.degree() {
            debug_assert_eq!(
                r_map.apply(sq),
                surface.v().apply(
                    surface
                        .h()
                        .apply(surface.v().inverse().apply(l_map.apply(sq)))
                ),
                "R-map must equal v∘h∘v⁻¹∘L-map"
            );
        }
        Ok(GammaGraph { d: surface.degree(), m, l_map, r_map, bad_edges })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l_map(&self) -> &Permutation {
        &self.l_map
    }

    pub fn r_map(&self) -> &Permutation {
        &self.r_map
    }

    /// Target of the edge with the given letter.
    pub fn step(&self, vertex: usize, letter: LR) -> usize {
        match letter {
            LR::L => self.l_map.apply(vertex),
            LR::R => self.r_map.apply(vertex),
        }
    }

    pub fn is_bad_edge(&self, vertex: usize, letter: LR) -> bool {
        self.bad_edges.contains(&(vertex, letter))
    }

    pub fn bad_edges(&self) -> &BTreeSet<PairSym> {
        &self.bad_edges
    }

    /// All `2d` edges, ordered by source vertex with `L` before `R`.
    pub fn edges(&self) -> Vec<GammaEdge> {
        let mut out = Vec::with_capacity(2 * self.d);
        for from in 1..=self.d {
            for letter in [LR::L, LR::R] {
                out.push(GammaEdge {
                    from,
                    letter,
                    to: self.step(from, letter),
                    bad: self.is_bad_edge(from, letter),
                });
            }
        }
        out
    }

    /// Domain rank of a walk symbol in the conjugate IET: `π₀(λ,L) = 2λ−1`,
    /// `π₀(λ,R) = 2λ`.
    pub fn pi0(&self, sym: PairSym) -> usize {
        match sym.1 {
            LR::L => 2 * sym.0 - 1,
            LR::R => 2 * sym.0,
        }
    }

    /// Range rank: `π₁(λ,L) = 2·L(λ)`, `π₁(λ,R) = 2·R(λ)−1`.
    pub fn pi1(&self, sym: PairSym) -> usize {
        match sym.1 {
            LR::L => 2 * self.l_map.apply(sym.0),
            LR::R => 2 * self.r_map.apply(sym.0) - 1,
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(false) && self.reaches_all(true)
    }

    fn reaches_all(&self, reversed: bool) -> bool {
        let mut seen = alloc::vec![false; self.d + 1];
        let mut stack = alloc::vec![1usize];
        seen[1] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            let nexts = if reversed {
                [self.l_map.inverse().apply(v), self.r_map.inverse().apply(v)]
            } else {
                [self.l_map.apply(v), self.r_map.apply(v)]
            };
            for n in nexts {
                if !seen[n] {
                    seen[n] = true;
                    count += 1;
                    stack.push(n);
                }
            }
        }
        count == self.d
    }

    /// Edge-list rendering: one `λ L→ λ'` line per edge, `!` marking bad
    /// edges.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in self.edges() {
            out.push_str(&alloc::format!(
                "{} {}\u{2192} {}{}\n",
                e.from,
                e.letter,
                e.to,
                if e.bad { " !" } else { "" }
            ));
        }
        out
    }
}

/// Which letter of the derived word forms blocks, fixing the block
/// permutations of the derivation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockType {
    /// The avoided letter σ is isolated: blocks are `τ^M σ` and `τ^{M+1} σ`.
    SigmaIsolated { m: usize },
    /// The other letter τ is isolated: blocks are `σ` and `τσ`.
    TauIsolated,
}

/// The derived graph of Lemma-style word derivation: walks avoiding the
/// given edge correspond to walks on the derived graph whose letters stand
/// for whole blocks. Bad-edge data does not transfer and is left empty.
pub fn derive_graph(
    g: &GammaGraph,
    avoided: PairSym,
    block_type: BlockType,
) -> Result<GammaGraph, GammaError> {
    if avoided.0 < 1 || avoided.0 > g.d {
        return Err(GammaError::VertexOutOfRange { vertex: avoided.0, degree: g.d });
    }
    let (sigma, tau) = match avoided.1 {
        LR::L => (&g.l_map, &g.r_map),
        LR::R => (&g.r_map, &g.l_map),
    };
    let (l_map, r_map) = match block_type {
        BlockType::SigmaIsolated { m } => {
            (tau.pow(m).compose(sigma), tau.pow(m + 1).compose(sigma))
        }
        BlockType::TauIsolated => (sigma.clone(), tau.compose(sigma)),
    };
    Ok(GammaGraph { d: g.d, m: g.m, l_map, r_map, bad_edges: BTreeSet::new() })
}

/// Observed arrival and departure sets of `w` in a window: the letters seen
/// immediately before and after occurrences of `w`, scanning every
/// (possibly overlapping) occurrence.
pub fn prefix_suffix_sets(
    window: &[PairSym],
    w: &[PairSym],
) -> Result<(BTreeSet<PairSym>, BTreeSet<PairSym>), GammaError> {
    if w.is_empty() || w.len() > window.len() {
        return Err(GammaError::AbsentSubword);
    }
    let mut arrivals = BTreeSet::new();
    let mut departures = BTreeSet::new();
    let mut found = false;
    for pos in 0..=(window.len() - w.len()) {
        if &window[pos..pos + w.len()] == w {
            found = true;
            if pos > 0 {
                arrivals.insert(window[pos - 1]);
            }
            if pos + w.len() < window.len() {
                departures.insert(window[pos + w.len()]);
            }
        }
    }
    if !found {
        return Err(GammaError::AbsentSubword);
    }
    Ok((arrivals, departures))
}

/// Outcome of the Ferenczi–Zamboni window checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FZReport {
    /// `None` when all checks pass; otherwise the first failed condition
    /// (1–6).
    pub failed_condition: Option<u8>,
    pub witness: Option<FZWitness>,
    /// Whether the window-proxy conditions (1: bounded-gap recurrence,
    /// 2: full alphabet) were long enough to enforce. Short windows skip
    /// them rather than fail spuriously.
    pub recurrence_enforced: bool,
    pub coverage_enforced: bool,
    pub cap: usize,
}

impl FZReport {
    pub fn passed(&self) -> bool {
        self.failed_condition.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FZWitness {
    pub word: Vec<PairSym>,
    pub letters: Vec<PairSym>,
    /// Index into the window anchoring the failure.
    pub position: usize,
    pub detail: String,
}

/// Minimum window length (as a multiple of the factor cap, resp. the
/// alphabet size) before the proxy conditions are enforced.
const RECURRENCE_GATE_FACTOR: usize = 64;
const COVERAGE_GATE_FACTOR: usize = 32;

/// Checks the six Ferenczi–Zamboni conditions on a window of a Γ^M walk,
/// against the conjugate-IET ranks `π₀`, `π₁` encoded by the graph.
///
/// Conditions (3)–(6) are refutation-complete for windows: observed arrival
/// and departure sets are subsets of the true ones, so a failure here
/// refutes the full sequence, while genuine walks can never fail. The
/// minimality and coverage conditions (1)–(2) are window proxies: factors
/// must recur with gap at most half the window and every pair letter must
/// occur, enforced only on windows long enough for that to be guaranteed.
pub fn fz_check(window: &[PairSym], g: &GammaGraph, cap: usize) -> FZReport {
    let n = window.len();
    let recurrence_enforced = n >= RECURRENCE_GATE_FACTOR * cap;
    let coverage_enforced = n >= COVERAGE_GATE_FACTOR * 2 * g.d;
    let mut report = FZReport {
        failed_condition: None,
        witness: None,
        recurrence_enforced,
        coverage_enforced,
        cap,
    };
    if n == 0 {
        return report;
    }

    // Condition (2) proxy: every letter of Λ×{L,R} occurs.
    if coverage_enforced {
        let seen: BTreeSet<PairSym> = window.iter().copied().collect();
        for sq in 1..=g.d {
            for letter in [LR::L, LR::R] {
                if !seen.contains(&(sq, letter)) {
                    report.failed_condition = Some(2);
                    report.witness = Some(FZWitness {
                        word: Vec::new(),
                        letters: alloc::vec![(sq, letter)],
                        position: 0,
                        detail: alloc::format!(
                            "letter {} never occurs",
                            format_pair((sq, letter))
                        ),
                    });
                    return report;
                }
            }
        }
    }

    // Occurrence lists per factor, grouped by factor length.
    for len in 1..=cap.min(n) {
        let mut occs: BTreeMap<&[PairSym], Vec<usize>> = BTreeMap::new();
        for pos in 0..=(n - len) {
            occs.entry(&window[pos..pos + len]).or_default().push(pos);
        }
        // Deterministic order: by first occurrence.
        let mut factors: Vec<(&[PairSym], &Vec<usize>)> = occs.iter().map(|(w, o)| (*w, o)).collect();
        factors.sort_by_key(|(_, o)| o[0]);
        for (word, positions) in factors {
            if let Some(fail) = check_factor(window, g, word, positions, recurrence_enforced) {
                report.failed_condition = Some(fail.0);
                report.witness = Some(fail.1);
                return report;
            }
        }
    }
    report
}

fn check_factor(
    window: &[PairSym],
    g: &GammaGraph,
    word: &[PairSym],
    positions: &[usize],
    recurrence_enforced: bool,
) -> Option<(u8, FZWitness)> {
    let n = window.len();
    let bound = n / 2;

    // Condition (1) proxy: the factor recurs with bounded gaps and is not
    // confined to one end of the window.
    if recurrence_enforced {
        let first = positions[0];
        let last = *positions.last().unwrap();
        let mut worst = first.max(n - (last + word.len()));
        for pair in positions.windows(2) {
            worst = worst.max(pair[1] - pair[0]);
        }
        if worst > bound {
            return Some((
                1,
                FZWitness {
                    word: word.to_vec(),
                    letters: Vec::new(),
                    position: first,
                    detail: alloc::format!(
                        "factor gap {worst} exceeds the recurrence bound {bound}"
                    ),
                },
            ));
        }
    }

    // Observed arrival/departure letters with the positions they came from.
    let mut arrivals: BTreeMap<PairSym, usize> = BTreeMap::new();
    let mut departures: BTreeMap<PairSym, usize> = BTreeMap::new();
    for &pos in positions {
        if pos > 0 {
            arrivals.entry(window[pos - 1]).or_insert(pos);
        }
        if pos + word.len() < n {
            departures.entry(window[pos + word.len()]).or_insert(pos);
        }
    }

    // Condition (3): the true A(w) is a π₁-interval of at most two letters
    // (each square has exactly two in-edges, with adjacent ranks), so more
    // than two observed arrivals, or two with non-adjacent ranks, refute.
    if let Some(w) = interval_violation(&arrivals, |sym| g.pi1(sym), word, "π₁") {
        return Some((3, w));
    }
    // Condition (4): likewise for D(w) in the π₀ order.
    if let Some(w) = interval_violation(&departures, |sym| g.pi0(sym), word, "π₀") {
        return Some((4, w));
    }

    // Conditions (5) and (6) inspect departures of one-letter extensions aw.
    let mut ext_departures: BTreeMap<PairSym, BTreeSet<PairSym>> = BTreeMap::new();
    for &pos in positions {
        if pos > 0 && pos + word.len() < n {
            ext_departures
                .entry(window[pos - 1])
                .or_default()
                .insert(window[pos + word.len()]);
        }
    }
    let prefixes: Vec<PairSym> = {
        let mut p: Vec<PairSym> = ext_departures.keys().copied().collect();
        p.sort_by_key(|&a| g.pi1(a));
        p
    };
    for (i, &a) in prefixes.iter().enumerate() {
        for &b in &prefixes[i + 1..] {
            // (5): suffixes of aw must not π₀-exceed suffixes of bw when
            // a <_π₁ b.
            for &y in &ext_departures[&a] {
                for &z in &ext_departures[&b] {
                    if g.pi0(y) > g.pi0(z) {
                        return Some((
                            5,
                            FZWitness {
                                word: word.to_vec(),
                                letters: alloc::vec![a, b, y, z],
                                position: positions[0],
                                detail: alloc::format!(
                                    "suffix {} of {}w exceeds suffix {} of {}w in the π₀ order",
                                    format_pair(y),
                                    format_pair(a),
                                    format_pair(z),
                                    format_pair(b)
                                ),
                            },
                        ));
                    }
                }
            }
            // (6): aw and bw can share at most one admissible suffix.
            let common: Vec<PairSym> = ext_departures[&a]
                .intersection(&ext_departures[&b])
                .copied()
                .collect();
            if common.len() >= 2 {
                return Some((
                    6,
                    FZWitness {
                        word: word.to_vec(),
                        letters: common,
                        position: positions[0],
                        detail: alloc::format!(
                            "{}w and {}w share two suffixes",
                            format_pair(a),
                            format_pair(b)
                        ),
                    },
                ));
            }
        }
    }
    None
}

fn interval_violation(
    observed: &BTreeMap<PairSym, usize>,
    rank: impl Fn(PairSym) -> usize,
    word: &[PairSym],
    order_name: &str,
) -> Option<FZWitness> {
    if observed.len() <= 1 {
        return None;
    }
    let letters: Vec<PairSym> = observed.keys().copied().collect();
    let mut ranks: Vec<usize> = letters.iter().map(|&s| rank(s)).collect();
    ranks.sort_unstable();
    let adjacent_pair = ranks.len() == 2 && ranks[1] - ranks[0] == 1;
    if adjacent_pair {
        return None;
    }
    let position = *observed.values().min().unwrap();
    Some(FZWitness {
        word: word.to_vec(),
        letters,
        position,
        detail: alloc::format!("observed neighbor set is not a two-letter {order_name}-interval"),
    })
}
