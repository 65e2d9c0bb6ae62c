//! The decision pipeline for labeled cutting sequences.
//!
//! A window of symbols `(λ, ε)` is interrogated in stages: consistency of
//! the labels with the gluing permutations, balance of the edge word,
//! visible periodicity, almost symmetry about a conical point, and finally
//! the window conditions on the contracted `(μ, σ)` walk. A window can be
//! refuted (`REJECT`), certified periodic (`ACCEPT_PERIODIC`), flagged as a
//! singular trajectory (`SINGULAR`), or left standing
//! (`CONSISTENT_WINDOW`).
//!
//! The parametric decision procedure goes the other way: given a surface, a
//! slope and a start point, it decides exactly — by solving for lattice
//! points on the trajectory line — whether the geodesic meets a vertex, and
//! whether the vertex it meets is conical.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{QuadError, QuadNum, Rational};
use crate::gamma::{format_pair, fz_check, GammaGraph, PairSym, LR};
use crate::iet::{IetError, SkewProduct, SkewState};
use crate::oracle::{trace_to_corner, GeoState, OracleError};
use crate::surface::{CutSym, EdgeLetter, Quadrant, Surface};
use crate::torusword::{EWord, SlopeParams, SymmetryKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharError {
    Empty,
    BadToken(String),
    LabelOutOfRange { label: usize, degree: usize },
    Inconsistent { position: usize },
    TooFewVs { found: usize },
    GapsNotBalanced { min: usize, max: usize },
    ModulusMismatch { m_raw: usize, m_observed: usize, modulus: usize },
    NotAWalk { index: usize },
    ReconstructAmbiguous { position: usize },
    ReconstructImpossible { position: usize },
    SlopeNotPositive,
    StartOutsideSquare,
    CornerSearchOverrun,
    Quad(QuadError),
    Iet(IetError),
    Oracle(OracleError),
}

impl fmt::Display for CharError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharError::Empty => write!(f, "sequence is empty"),
            CharError::BadToken(t) => write!(f, "cannot parse token `{t}`"),
            CharError::LabelOutOfRange { label, degree } => {
                write!(f, "square label {label} out of range 1..={degree}")
            }
            CharError::Inconsistent { position } => {
                write!(f, "sequence is inconsistent at position {position}")
            }
            CharError::TooFewVs { found } => {
                write!(f, "contraction needs at least two V crossings, found {found}")
            }
            CharError::GapsNotBalanced { min, max } => {
                write!(f, "V-gap sizes {min} and {max} differ by more than one")
            }
            CharError::ModulusMismatch { m_raw, m_observed, modulus } => write!(
                f,
                "M = {m_raw} is not congruent to the observed M = {m_observed} modulo {modulus}"
            ),
            CharError::NotAWalk { index } => {
                write!(f, "symbols at index {index} do not follow a graph edge")
            }
            CharError::ReconstructAmbiguous { position } => {
                write!(f, "edge letter at position {position} is ambiguous (h and v agree)")
            }
            CharError::ReconstructImpossible { position } => {
                write!(f, "no edge letter explains the label transition at position {position}")
            }
            CharError::SlopeNotPositive => write!(f, "slope must be positive"),
            CharError::StartOutsideSquare => {
                write!(f, "start point lies outside the closed unit square")
            }
            CharError::CornerSearchOverrun => {
                write!(f, "certified corner not found within the crossing budget")
            }
            CharError::Quad(e) => write!(f, "{e}"),
            CharError::Iet(e) => write!(f, "{e}"),
            CharError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CharError {}

impl From<QuadError> for CharError {
    fn from(e: QuadError) -> CharError {
        CharError::Quad(e)
    }
}

impl From<IetError> for CharError {
    fn from(e: IetError) -> CharError {
        CharError::Iet(e)
    }
}

impl From<OracleError> for CharError {
    fn from(e: OracleError) -> CharError {
        CharError::Oracle(e)
    }
}

/// A finite window of a labeled sequence, positioned on the ambient index
/// line: symbol `i` sits at ambient position `origin_index + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSeq {
    symbols: Vec<CutSym>,
    origin_index: i64,
}

impl LabeledSeq {
    pub fn new(symbols: Vec<CutSym>, origin_index: i64) -> Result<LabeledSeq, CharError> {
        if symbols.is_empty() {
            return Err(CharError::Empty);
        }
        Ok(LabeledSeq { symbols, origin_index })
    }

    /// Parses whitespace-separated `<label><letter>` tokens, e.g.
    /// `2V 3H 2H`. A `|` token marks the ambient origin: the symbol after
    /// it sits at position 0.
    pub fn parse(text: &str) -> Result<LabeledSeq, CharError> {
        let mut symbols = Vec::new();
        let mut origin_index = 0i64;
        let mut marker_seen = false;
        for token in text.split_whitespace() {
            if token == "|" {
                if marker_seen {
                    return Err(CharError::BadToken(String::from("|")));
                }
                marker_seen = true;
                origin_index = -(symbols.len() as i64);
                continue;
            }
            let split = token.len() - token.chars().last().map_or(0, char::len_utf8);
            let (digits, letter) = token.split_at(split);
            let edge = match letter {
                "H" => EdgeLetter::H,
                "V" => EdgeLetter::V,
                _ => return Err(CharError::BadToken(String::from(token))),
            };
            let square: usize = digits
                .parse()
                .map_err(|_| CharError::BadToken(String::from(token)))?;
            if square == 0 {
                return Err(CharError::BadToken(String::from(token)));
            }
            symbols.push(CutSym::new(square, edge));
        }
        LabeledSeq::new(symbols, origin_index)
    }

    pub fn render(&self) -> String {
        let marker_at = -self.origin_index;
        let mut out = String::new();
        for (i, sym) in self.symbols.iter().enumerate() {
            if !out.is_empty() {
                out.push(' ');
            }
            if marker_at > 0 && marker_at == i as i64 {
                out.push_str("| ");
            }
            out.push_str(&format!("{sym}"));
        }
        if marker_at > 0 && marker_at == self.symbols.len() as i64 {
            out.push_str(" |");
        }
        out
    }

    pub fn symbols(&self) -> &[CutSym] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    /// Ambient position of symbol `i`.
    pub fn ambient(&self, i: usize) -> i64 {
        self.origin_index + i as i64
    }

    /// The edge word, keeping the ambient origin.
    pub fn eps(&self) -> EWord {
        EWord::new(self.symbols.iter().map(|s| s.edge).collect(), self.origin_index)
    }

    pub fn squares(&self) -> Vec<usize> {
        self.symbols.iter().map(|s| s.square).collect()
    }
}

impl fmt::Display for LabeledSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    AcceptPeriodic,
    Reject,
    ConsistentWindow,
    Singular,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            VerdictKind::AcceptPeriodic => "ACCEPT_PERIODIC",
            VerdictKind::Reject => "REJECT",
            VerdictKind::ConsistentWindow => "CONSISTENT_WINDOW",
            VerdictKind::Singular => "SINGULAR",
        };
        write!(f, "{token}")
    }
}

/// Outcome of a decision, with a human-readable reason and, for refuting
/// verdicts, the ambient position anchoring the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub reason: String,
    pub position: Option<i64>,
}

impl Verdict {
    pub fn consistent(reason: impl Into<String>) -> Verdict {
        Verdict { kind: VerdictKind::ConsistentWindow, reason: reason.into(), position: None }
    }

    pub fn periodic(reason: impl Into<String>) -> Verdict {
        Verdict { kind: VerdictKind::AcceptPeriodic, reason: reason.into(), position: None }
    }

    pub fn reject(reason: impl Into<String>, position: Option<i64>) -> Verdict {
        Verdict { kind: VerdictKind::Reject, reason: reason.into(), position }
    }

    pub fn singular(reason: impl Into<String>, position: Option<i64>) -> Verdict {
        Verdict { kind: VerdictKind::Singular, reason: reason.into(), position }
    }

    /// True for the verdicts that rule the window out as a factor of a
    /// bi-infinite cutting sequence.
    pub fn is_refuted(&self) -> bool {
        matches!(self.kind, VerdictKind::Reject | VerdictKind::Singular)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.reason)?;
        if let Some(p) = self.position {
            write!(f, " (position {p})")?;
        }
        Ok(())
    }
}

/// A contracted `(μ, σ)` walk. `v_positions[i]` is the index, in the source
/// window, of the V crossing that produced symbol `i` — it maps walk
/// witnesses back to ambient positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub symbols: Vec<PairSym>,
    pub m_observed: usize,
    /// Set when only one gap size was observed, so `m_observed` could
    /// overshoot the true value by one with every σ read as R instead of L.
    pub ambiguous: bool,
    pub v_positions: Vec<usize>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for sym in &self.symbols {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&format_pair(*sym));
        }
        out
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Index of the first symbol that cannot follow from its predecessor (or
/// whose label does not exist), if any.
fn first_inconsistency(seq: &LabeledSeq, s: &Surface) -> Option<usize> {
    let d = s.degree();
    for (i, sym) in seq.symbols().iter().enumerate() {
        if sym.square < 1 || sym.square > d {
            return Some(i);
        }
        if i > 0 {
            let prev = seq.symbols()[i - 1].square;
            if s.act(sym.edge, prev) != sym.square {
                return Some(i);
            }
        }
    }
    None
}

/// Checks that every symbol follows from its predecessor: crossing `ε` out
/// of square `λ` must enter `ε · λ`.
pub fn check_consistent(seq: &LabeledSeq, s: &Surface) -> Verdict {
    match first_inconsistency(seq, s) {
        None => Verdict::consistent("labels follow the gluings"),
        Some(i) => {
            let sym = seq.symbols()[i];
            let d = s.degree();
            let reason = if sym.square < 1 || sym.square > d {
                format!("square {} does not exist on a {d}-square surface", sym.square)
            } else {
                let prev = seq.symbols()[i - 1];
                format!(
                    "{sym} cannot follow {prev}: crossing {} out of square {} enters square {}",
                    sym.edge,
                    prev.square,
                    s.act(sym.edge, prev.square),
                )
            };
            Verdict::reject(reason, Some(seq.ambient(i)))
        }
    }
}

/// Lifts an edge word to a labeled sequence by fixing the first square and
/// following the gluings: `λ_{n+1} = ε_{n+1} · λ_n`.
pub fn combinatorial_lift(
    eps: &EWord,
    lambda0: usize,
    s: &Surface,
) -> Result<LabeledSeq, CharError> {
    let d = s.degree();
    if lambda0 < 1 || lambda0 > d {
        return Err(CharError::LabelOutOfRange { label: lambda0, degree: d });
    }
    let letters = eps.letters();
    if letters.is_empty() {
        return Err(CharError::Empty);
    }
    let mut symbols = Vec::with_capacity(letters.len());
    let mut square = lambda0;
    for (i, &letter) in letters.iter().enumerate() {
        if i > 0 {
            square = s.act(letter, square);
        }
        symbols.push(CutSym::new(square, letter));
    }
    LabeledSeq::new(symbols, eps.origin_index())
}

/// Contracts a window to its `(μ, σ)` walk: keep the squares at V
/// crossings, and read each gap of `M+1` positions as `L` and `M+2` as `R`,
/// where `M + 1` is the smallest observed gap. Partial gaps at the window
/// boundary are dropped, except that a trailing H-run of exactly `M + 1`
/// symbols can only be completed by an `R` gap, which is therefore
/// certified (and, if only one interior gap size had been seen, settles the
/// `M` ambiguity as well).
pub fn contract(seq: &LabeledSeq, s: &Surface) -> Result<Walk, CharError> {
    if let Some(i) = first_inconsistency(seq, s) {
        return Err(CharError::Inconsistent { position: i });
    }
    let vs: Vec<(usize, usize)> = seq
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, sym)| sym.edge == EdgeLetter::V)
        .map(|(i, sym)| (i, sym.square))
        .collect();
    if vs.len() < 2 {
        return Err(CharError::TooFewVs { found: vs.len() });
    }
    let gaps: Vec<usize> = vs.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let g_min = *gaps.iter().min().expect("at least one gap");
    let g_max = *gaps.iter().max().expect("at least one gap");
    if g_max - g_min > 1 {
        return Err(CharError::GapsNotBalanced { min: g_min, max: g_max });
    }
    let m_observed = g_min - 1;
    let mut ambiguous = g_max == g_min;
    let mut symbols: Vec<PairSym> = Vec::with_capacity(vs.len());
    let mut v_positions: Vec<usize> = Vec::with_capacity(vs.len());
    for (i, gap) in gaps.iter().enumerate() {
        let letter = if *gap == g_min { LR::L } else { LR::R };
        symbols.push((vs[i].1, letter));
        v_positions.push(vs[i].0);
    }
    let (last_pos, last_square) = *vs.last().expect("nonempty");
    let trailing = seq.len() - 1 - last_pos;
    if trailing == m_observed + 1 {
        symbols.push((last_square, LR::R));
        v_positions.push(last_pos);
        ambiguous = false;
    } else if trailing > m_observed + 1 {
        return Err(CharError::GapsNotBalanced { min: g_min, max: trailing + 1 });
    }
    Ok(Walk { symbols, m_observed, ambiguous, v_positions })
}

/// Expands a walk back to a labeled window: `(μ, L)` becomes `(μ, V)`
/// followed by `kD + M` H-crossings along the h-chain, and `(μ, R)` gets
/// one more. `m_raw` must be congruent to the walk's observed `M` modulo
/// the surface's cycle modulus.
pub fn expand(walk: &Walk, m_raw: usize, k: usize, s: &Surface) -> Result<LabeledSeq, CharError> {
    let modulus = s.cycle_modulus();
    if m_raw % modulus != walk.m_observed % modulus {
        return Err(CharError::ModulusMismatch {
            m_raw,
            m_observed: walk.m_observed,
            modulus,
        });
    }
    let low = s.v().compose(&s.h().pow(m_raw % modulus));
    let high = s.v().compose(&s.h().pow(m_raw % modulus + 1));
    for (i, pair) in walk.symbols.windows(2).enumerate() {
        let expected = match pair[0].1 {
            LR::L => low.apply(pair[0].0),
            LR::R => high.apply(pair[0].0),
        };
        if expected != pair[1].0 {
            return Err(CharError::NotAWalk { index: i });
        }
    }
    let mut symbols = Vec::new();
    for &(mu, letter) in &walk.symbols {
        if mu < 1 || mu > s.degree() {
            return Err(CharError::LabelOutOfRange { label: mu, degree: s.degree() });
        }
        symbols.push(CutSym::new(mu, EdgeLetter::V));
        let count = k * modulus + m_raw + usize::from(letter == LR::R);
        let mut square = mu;
        for _ in 0..count {
            square = s.h().apply(square);
            symbols.push(CutSym::new(square, EdgeLetter::H));
        }
    }
    LabeledSeq::new(symbols, 0)
}

/// Reads the walk of a geodesic straight off the skew product: symbol `i`
/// is the current square paired with `L` when `x < 1 − θ` and `R`
/// otherwise.
pub fn walk_from_skew(
    s: &Surface,
    params: &SlopeParams,
    x0: &QuadNum,
    lambda0: usize,
    n: usize,
) -> Result<Walk, CharError> {
    let d = s.degree();
    if lambda0 < 1 || lambda0 > d {
        return Err(CharError::LabelOutOfRange { label: lambda0, degree: d });
    }
    let skew = SkewProduct::new(s, params)?;
    let boundary = QuadNum::one().try_sub(params.theta())?;
    let mut state = SkewState::new(x0.clone(), lambda0);
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        let letter = match state.x.try_cmp(&boundary)? {
            core::cmp::Ordering::Less => LR::L,
            _ => LR::R,
        };
        symbols.push((state.square, letter));
        state = skew.step(&state)?;
    }
    Ok(Walk {
        symbols,
        m_observed: params.m_raw(),
        ambiguous: false,
        v_positions: (0..n).collect(),
    })
}

/// Flags windows that are certified almost symmetric about a conical
/// point. The seam of an almost symmetric window sits at positions
/// `N−1, N`; the square the trajectory occupied when it met the corner is
/// the one entered at `N−2`, and the verdict is `SINGULAR` exactly when
/// that square is bad.
pub fn detect_bad_symmetry(seq: &LabeledSeq, s: &Surface) -> Verdict {
    let verdict = seq.eps().classify_symmetry();
    if verdict.kind != SymmetryKind::Almost {
        return Verdict::consistent("no certified almost symmetry in the window");
    }
    let center = match verdict.center {
        Some(c) => c,
        None => return Verdict::consistent("no certified almost symmetry in the window"),
    };
    let idx = center - 2 - seq.origin_index();
    if idx < 0 || idx as usize >= seq.len() {
        return Verdict::consistent("almost symmetric, but the seam touches the window edge");
    }
    let struck = seq.symbols()[idx as usize].square;
    if s.is_bad(struck) {
        Verdict::singular(
            format!(
                "window is almost symmetric about the seam at positions {}, {center}; \
                 the struck square {struck} carries a conical point",
                center - 1
            ),
            Some(center - 2),
        )
    } else {
        Verdict::consistent(format!(
            "almost symmetric about the regular corner of square {struck}"
        ))
    }
}

/// Window proxy for recurrence: `holds` is true when every factor of
/// length ≤ `cap` whose next occurrence could fit in the window recurs
/// within `gap_bound` positions. Windows shorter than `gap_bound` are
/// vacuously true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub holds: bool,
    pub vacuous: bool,
    /// `(position, length)` of the first factor that fails to recur.
    pub witness: Option<(usize, usize)>,
}

pub fn recurrence_check(seq: &LabeledSeq, gap_bound: usize, cap: usize) -> RecurrenceReport {
    let syms = seq.symbols();
    let n = syms.len();
    if n <= gap_bound {
        return RecurrenceReport { holds: true, vacuous: true, witness: None };
    }
    for len in 1..=cap.min(n) {
        let mut occurrences: alloc::collections::BTreeMap<&[CutSym], Vec<usize>> =
            alloc::collections::BTreeMap::new();
        for i in 0..=n - len {
            occurrences.entry(&syms[i..i + len]).or_default().push(i);
        }
        for positions in occurrences.values() {
            for (j, &p) in positions.iter().enumerate() {
                // Only positions with room for a full recurrence can fail.
                if p + len + gap_bound > n {
                    continue;
                }
                let recurs = positions.get(j + 1).is_some_and(|&q| q - p <= gap_bound);
                if !recurs {
                    return RecurrenceReport {
                        holds: false,
                        vacuous: false,
                        witness: Some((p, len)),
                    };
                }
            }
        }
    }
    RecurrenceReport { holds: true, vacuous: false, witness: None }
}

/// Smallest period of the symbol window (the full symbols, labels
/// included), via the border table.
fn smallest_period(syms: &[CutSym]) -> usize {
    let n = syms.len();
    if n == 0 {
        return 0;
    }
    let mut border = alloc::vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && syms[i] != syms[k] {
            k = border[k - 1];
        }
        if syms[i] == syms[k] {
            k += 1;
        }
        border[i] = k;
    }
    n - border[n - 1]
}

const FZ_CAP: usize = 8;

/// The window decision procedure. Stages, in order: label consistency,
/// balance of the edge word, visible periodicity (two full periods
/// certify a closed geodesic), almost symmetry about a conical point, and
/// the graph-walk window conditions on the contraction.
pub fn decide_window(seq: &LabeledSeq, s: &Surface) -> Verdict {
    let consistency = check_consistent(seq, s);
    if consistency.is_refuted() {
        return consistency;
    }
    let eps = seq.eps();
    if let Some(w) = eps.balance_witness() {
        return Verdict::reject(
            format!(
                "edge word is not balanced: length-{} factors carry {} and {} H-crossings",
                w.length, w.low_count, w.high_count
            ),
            Some(seq.ambient(w.high_pos)),
        );
    }
    let q = smallest_period(seq.symbols());
    if q > 0 && 2 * q <= seq.len() {
        return Verdict::periodic(format!(
            "window repeats with period {q}; a closed geodesic realizes it"
        ));
    }
    let symmetry = detect_bad_symmetry(seq, s);
    if symmetry.is_refuted() {
        return symmetry;
    }
    let walk = match contract(seq, s) {
        Ok(walk) => walk,
        Err(CharError::TooFewVs { .. }) => {
            return Verdict::consistent("too few V crossings to contract; no refutation found");
        }
        Err(CharError::GapsNotBalanced { min, max }) => {
            return Verdict::reject(
                format!("V-gap sizes {min} and {max} violate the two-gap structure"),
                None,
            );
        }
        Err(e) => {
            return Verdict::reject(format!("contraction failed: {e}"), None);
        }
    };
    let modulus = s.cycle_modulus();
    // An ambiguous walk (one gap size only) admits a second reading with
    // every σ flipped to R at M one lower; reject only if both fail.
    let mut readings: Vec<(usize, Vec<PairSym>)> =
        alloc::vec![(walk.m_observed % modulus, walk.symbols.clone())];
    if walk.ambiguous && walk.m_observed >= 1 {
        let flipped = walk.symbols.iter().map(|&(mu, _)| (mu, LR::R)).collect();
        readings.push(((walk.m_observed - 1) % modulus, flipped));
    }
    let mut first_failure: Option<Verdict> = None;
    for (m, symbols) in &readings {
        let graph = GammaGraph::build(s, *m).expect("M reduced modulo the cycle modulus");
        let report = fz_check(symbols, &graph, FZ_CAP);
        if report.passed() {
            return Verdict::consistent(format!(
                "walk of {} symbols satisfies the window conditions at M = {m}",
                symbols.len()
            ));
        }
        if first_failure.is_none() {
            let condition = report.failed_condition.unwrap_or(0);
            let (position, detail) = match report.witness {
                Some(w) => {
                    let pos = walk.v_positions.get(w.position).map(|&i| seq.ambient(i));
                    (pos, w.detail)
                }
                None => (None, String::from("no witness recorded")),
            };
            first_failure = Some(Verdict::reject(
                format!("walk violates window condition {condition}: {detail}"),
                position,
            ));
        }
    }
    first_failure.expect("at least one reading was checked")
}

/// Which side of the start point a vertex hit lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerSide {
    AtStart,
    Forward,
    Backward,
}

impl fmt::Display for CornerSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            CornerSide::AtStart => "start",
            CornerSide::Forward => "forward",
            CornerSide::Backward => "backward",
        };
        write!(f, "{token}")
    }
}

/// A vertex met by the trajectory: the square whose upper-right corner is
/// struck, on which side of the start, and after how many edge crossings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerData {
    pub square: usize,
    pub side: CornerSide,
    pub crossings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricOutcome {
    pub verdict: Verdict,
    pub corner: Option<CornerData>,
}

fn big_to_budget(b: &BigInt) -> usize {
    b.to_usize().unwrap_or(1 << 24)
}

/// The square whose upper-right corner coincides with the given corner of
/// the start square.
fn start_corner_square(s: &Surface, x_is_one: bool, y_is_one: bool, lambda0: usize) -> usize {
    match (x_is_one, y_is_one) {
        (true, true) => lambda0,
        (true, false) => s.diag_inverse(s.h().apply(lambda0)),
        (false, true) => s.diag_inverse(s.v().apply(lambda0)),
        (false, false) => s.diag_inverse(lambda0),
    }
}

/// Decides exactly whether the slope-`m` geodesic through `(x, y)` in
/// square `λ0` meets a vertex of the tiling, and whether the vertex is
/// conical. The line meets a vertex iff integers `k, z` solve
/// `z = y + m(k − x)`; for irrational `m` the vanishing of the surd
/// coefficient pins down a single candidate `k`, and for rational `m` the
/// condition is a linear congruence. A conical hit is `SINGULAR`; a
/// regular hit leaves the geodesic genuine (its sequence is almost
/// symmetric); no hit certifies the sequence outright.
pub fn decide_parametric(
    s: &Surface,
    m: &QuadNum,
    x: &QuadNum,
    y: &QuadNum,
    lambda0: usize,
) -> Result<ParametricOutcome, CharError> {
    let d = s.degree();
    if lambda0 < 1 || lambda0 > d {
        return Err(CharError::LabelOutOfRange { label: lambda0, degree: d });
    }
    if m.sign() <= 0 {
        return Err(CharError::SlopeNotPositive);
    }
    let zero = QuadNum::zero();
    let one = QuadNum::one();
    for c in [x, y] {
        if c.try_cmp(&zero)? == core::cmp::Ordering::Less
            || c.try_cmp(&one)? == core::cmp::Ordering::Greater
        {
            return Err(CharError::StartOutsideSquare);
        }
    }
    if m.is_rational() {
        decide_parametric_rational(s, m, x, y, lambda0)
    } else {
        decide_parametric_quadratic(s, m, x, y, lambda0)
    }
}

fn no_corner_certificate() -> ParametricOutcome {
    ParametricOutcome {
        verdict: Verdict::consistent(
            "the trajectory meets no vertex; every window of its sequence is genuine",
        ),
        corner: None,
    }
}

fn decide_parametric_quadratic(
    s: &Surface,
    m: &QuadNum,
    x: &QuadNum,
    y: &QuadNum,
    lambda0: usize,
) -> Result<ParametricOutcome, CharError> {
    let a = m.rat_part().clone();
    let b = m.surd_part().clone();
    let n = m.radicand();
    // Coordinates from a different quadratic field can never cancel the
    // slope's surd: the hit equation then has no solution at all.
    for c in [x, y] {
        if !c.is_rational() && c.radicand() != n {
            return Ok(no_corner_certificate());
        }
    }
    let (xr, xs) = (x.rat_part().clone(), x.surd_part().clone());
    let (yr, ys) = (y.rat_part().clone(), y.surd_part().clone());
    // z = y + m(k − x) lies in ℚ only for the single k killing the surd
    // coefficient: b(k − xr) − a·xs + ys = 0.
    let k = xr.clone() + (a.clone() * xs.clone() - ys) / b.clone();
    if !k.is_integer() {
        return Ok(no_corner_certificate());
    }
    let z = yr + a * (k.clone() - xr) - b * xs * Rational::from(BigInt::from(n));
    if !z.is_integer() {
        return Ok(no_corner_certificate());
    }
    let k_big = k.to_integer();
    let z_big = z.to_integer();
    let t = QuadNum::from_rational(k).try_sub(x)?;
    match t.sign() {
        0 => {
            // The start point itself is the vertex.
            let x_is_one = *x == QuadNum::one();
            let y_is_one = *y == QuadNum::one();
            let square = start_corner_square(s, x_is_one, y_is_one, lambda0);
            let corner = CornerData { square, side: CornerSide::AtStart, crossings: 0 };
            Ok(singular_or_regular(s, corner))
        }
        sign if sign > 0 => {
            let budget = big_to_budget(
                &(k_big.max(BigInt::from(0)) + z_big.max(BigInt::from(0))),
            ) + 8;
            let hit = trace_to_corner(s, m, GeoState::new(lambda0, x.clone(), y.clone()), budget)?
                .ok_or(CharError::CornerSearchOverrun)?;
            let corner = CornerData {
                square: hit.square,
                side: CornerSide::Forward,
                crossings: hit.crossings,
            };
            Ok(singular_or_regular(s, corner))
        }
        _ => {
            let sw = s.quadrant_transform(Quadrant::SW);
            let start = GeoState::new(
                lambda0,
                QuadNum::one().try_sub(x)?,
                QuadNum::one().try_sub(y)?,
            );
            let budget = big_to_budget(
                &((BigInt::from(1) - k_big) + (BigInt::from(1) - z_big)),
            ) + 8;
            let hit = trace_to_corner(&sw, m, start, budget)?
                .ok_or(CharError::CornerSearchOverrun)?;
            let corner = CornerData {
                square: s.diag_inverse(hit.square),
                side: CornerSide::Backward,
                crossings: hit.crossings,
            };
            Ok(singular_or_regular(s, corner))
        }
    }
}

fn singular_or_regular(s: &Surface, corner: CornerData) -> ParametricOutcome {
    let verdict = if s.is_bad(corner.square) {
        Verdict::singular(
            format!(
                "the trajectory strikes the conical point at the upper-right corner of \
                 square {} ({}, {} crossings away)",
                corner.square, corner.side, corner.crossings
            ),
            None,
        )
    } else {
        Verdict::consistent(format!(
            "the trajectory passes through the regular corner of square {} ({}); \
             its sequence is almost symmetric but genuine",
            corner.square, corner.side
        ))
    };
    ParametricOutcome { verdict, corner: Some(corner) }
}

fn decide_parametric_rational(
    s: &Surface,
    m: &QuadNum,
    x: &QuadNum,
    y: &QuadNum,
    lambda0: usize,
) -> Result<ParametricOutcome, CharError> {
    let m_rat = m.as_rational().expect("rational branch").clone();
    let p = m_rat.numer().clone();
    let q = m_rat.denom().clone();
    let periodic_no_corner = || ParametricOutcome {
        verdict: Verdict::periodic(format!(
            "rational slope {p}/{q}: the closed geodesic meets no vertex"
        )),
        corner: None,
    };
    // Any surviving surd in z = y + m(k − x) rules out integer solutions.
    let surd_clears = if x.is_rational() && y.is_rational() {
        true
    } else if !x.is_rational() && !y.is_rational() && x.radicand() == y.radicand() {
        (y.surd_part().clone() - m_rat.clone() * x.surd_part().clone()).is_zero()
    } else {
        false
    };
    if !surd_clears {
        return Ok(periodic_no_corner());
    }
    let xr = x.rat_part().clone();
    let yr = y.rat_part().clone();
    // qz = q·yr − p·xr + p·k must be an integer multiple of q; with p, q
    // coprime a solution k exists iff r = q·yr − p·xr is an integer.
    let r = Rational::from(q.clone()) * yr - Rational::from(p.clone()) * xr;
    if !r.is_integer() {
        return Ok(periodic_no_corner());
    }
    // Vertices lie on the line; follow the flow through regular corners
    // until one is conical or a corner square repeats (then the geodesic
    // is closed).
    let leg_budget = big_to_budget(&(p.abs() + q.abs())) + 8;
    let mut seen: Vec<usize> = Vec::new();
    let mut first: Option<CornerData> = None;
    let x_is_zero = x.is_zero();
    let y_is_zero = y.is_zero();
    let x_is_one = *x == QuadNum::one();
    let y_is_one = *y == QuadNum::one();
    let mut state = GeoState::new(lambda0, x.clone(), y.clone());
    if (x_is_zero || x_is_one) && (y_is_zero || y_is_one) {
        let square = start_corner_square(s, x_is_one, y_is_one, lambda0);
        if s.is_bad(square) {
            let corner = CornerData { square, side: CornerSide::AtStart, crossings: 0 };
            return Ok(singular_or_regular(s, corner));
        }
        first = Some(CornerData { square, side: CornerSide::AtStart, crossings: 0 });
        seen.push(square);
        state = GeoState::new(s.diag(square), QuadNum::zero(), QuadNum::zero());
    }
    for _ in 0..=s.degree() {
        let hit = trace_to_corner(s, m, state, leg_budget)?
            .ok_or(CharError::CornerSearchOverrun)?;
        let corner = CornerData {
            square: hit.square,
            side: CornerSide::Forward,
            crossings: hit.crossings,
        };
        if s.is_bad(hit.square) {
            return Ok(singular_or_regular(s, corner));
        }
        let first_corner = first.get_or_insert(corner);
        if seen.contains(&hit.square) {
            return Ok(ParametricOutcome {
                verdict: Verdict::periodic(format!(
                    "closed geodesic of slope {p}/{q} through {} regular vertices",
                    seen.len()
                )),
                corner: Some(first_corner.clone()),
            });
        }
        seen.push(hit.square);
        state = GeoState::new(s.diag(hit.square), QuadNum::zero(), QuadNum::zero());
    }
    Err(CharError::CornerSearchOverrun)
}

/// True when the labels alone carry the edge letters: `h(λ) ≠ v(λ)` for
/// every square, so the successor square determines which edge was
/// crossed.
pub fn labels_determine_edges(s: &Surface) -> bool {
    (1..=s.degree()).all(|l| s.h().apply(l) != s.v().apply(l))
}

/// Recovers the edge letters of a label sequence. The first letter is not
/// determined (nothing precedes it), so the result has one symbol fewer
/// than the input.
pub fn reconstruct_edges(labels: &[usize], s: &Surface) -> Result<Vec<CutSym>, CharError> {
    let d = s.degree();
    for &l in labels {
        if l < 1 || l > d {
            return Err(CharError::LabelOutOfRange { label: l, degree: d });
        }
    }
    let mut out = Vec::with_capacity(labels.len().saturating_sub(1));
    for i in 1..labels.len() {
        let prev = labels[i - 1];
        let cur = labels[i];
        let via_h = s.h().apply(prev) == cur;
        let via_v = s.v().apply(prev) == cur;
        match (via_h, via_v) {
            (true, true) => return Err(CharError::ReconstructAmbiguous { position: i }),
            (true, false) => out.push(CutSym::new(cur, EdgeLetter::H)),
            (false, true) => out.push(CutSym::new(cur, EdgeLetter::V)),
            (false, false) => return Err(CharError::ReconstructImpossible { position: i }),
        }
    }
    Ok(out)
}
