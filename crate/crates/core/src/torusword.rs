//! Edge words on the torus: balance, complexity, derivation, continued
//! fractions, slope parameters, and symmetry classification.
//!
//! A bi-infinite geodesic of irrational slope cuts the torus grid in a
//! Sturmian sequence over `{H, V}`; rational slopes give balanced periodic
//! words. All operations here work on finite windows and certify only what
//! the window can show.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::algebra::{QuadError, QuadNum};
use crate::surface::EdgeLetter;

/// Errors from edge-word operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    Empty,
    /// Both `HH` and `VV` occur, so neither letter is isolated and the window
    /// is not Sturmian-like.
    NeitherLetterIsolated,
    /// The strictly alternating word: both letters are isolated and the
    /// derivation target is ambiguous.
    BothLettersIsolated,
    /// Maximal blocks of the counted letter differ in size by more than one.
    NotBalanced { stage: usize },
    BadLiteral(String),
    NonPositiveSlope,
    /// `⌊1/m⌋` does not fit a machine word.
    SlopeTooSmall,
    Quad(QuadError),
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::Empty => write!(f, "empty edge word"),
            WordError::NeitherLetterIsolated => {
                write!(f, "neither letter is isolated (both HH and VV occur)")
            }
            WordError::BothLettersIsolated => {
                write!(f, "both letters are isolated (alternating word)")
            }
            WordError::NotBalanced { stage } => {
                write!(f, "block sizes differ by more than one at derivation stage {stage}")
            }
            WordError::BadLiteral(s) => write!(f, "bad edge word literal: {s}"),
            WordError::NonPositiveSlope => write!(f, "slope must be positive"),
            WordError::SlopeTooSmall => write!(f, "reciprocal slope exceeds machine bounds"),
            WordError::Quad(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WordError {}

impl From<QuadError> for WordError {
    fn from(e: QuadError) -> WordError {
        WordError::Quad(e)
    }
}

/// A finite window of a bi-infinite edge word, together with the ambient
/// index of its first letter.
///
/// Text form: a contiguous `HV` string with an optional `|` marker placed
/// just before the letter of ambient index 0, e.g. `HV|HHV` for a window
/// whose first letter sits at index −2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EWord {
    letters: Vec<EdgeLetter>,
    origin_index: i64,
}

impl EWord {
    pub fn new(letters: Vec<EdgeLetter>, origin_index: i64) -> EWord {
        EWord { letters, origin_index }
    }

    pub fn parse(text: &str) -> Result<EWord, WordError> {
        let text = text.trim();
        let mut letters = Vec::new();
        let mut origin_index = 0i64;
        let mut marker_seen = false;
        for c in text.chars() {
            match c {
                '|' => {
                    if marker_seen {
                        return Err(WordError::BadLiteral(text.to_string()));
                    }
                    marker_seen = true;
                    origin_index = -(letters.len() as i64);
                }
                c => match EdgeLetter::from_char(c) {
                    Some(l) => letters.push(l),
                    None => return Err(WordError::BadLiteral(text.to_string())),
                },
            }
        }
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        Ok(EWord { letters, origin_index })
    }

    pub fn letters(&self) -> &[EdgeLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    /// Ambient index of window position `pos`.
    pub fn ambient(&self, pos: usize) -> i64 {
        self.origin_index + pos as i64
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let marker_pos = -self.origin_index;
        for (i, l) in self.letters.iter().enumerate() {
            if marker_pos > 0 && i as i64 == marker_pos {
                out.push('|');
            }
            out.push(l.as_char());
        }
        out
    }

    /// Number of distinct factors of length `n` visible in the window.
    pub fn complexity(&self, n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        if n > self.len() {
            return 0;
        }
        let mut seen: alloc::collections::BTreeSet<&[EdgeLetter]> =
            alloc::collections::BTreeSet::new();
        for win in self.letters.windows(n) {
            seen.insert(win);
        }
        seen.len()
    }

    /// Returns a violation of the balance property (two equal-length factors
    /// whose `H`-counts differ by at least two), or `None` if the window is
    /// balanced at every length.
    pub fn balance_witness(&self) -> Option<BalanceWitness> {
        let n = self.len();
        let h: Vec<u32> = self
            .letters
            .iter()
            .map(|&l| (l == EdgeLetter::H) as u32)
            .collect();
        // prefix[i] = number of H's among the first i letters
        let mut prefix = alloc::vec![0u32; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + h[i];
        }
        for len in 1..=n {
            let mut min_pos = 0usize;
            let mut max_pos = 0usize;
            let mut min = u32::MAX;
            let mut max = 0u32;
            for start in 0..=(n - len) {
                let count = prefix[start + len] - prefix[start];
                if count < min {
                    min = count;
                    min_pos = start;
                }
                if count > max {
                    max = count;
                    max_pos = start;
                }
            }
            if max - min > 1 {
                return Some(BalanceWitness {
                    length: len,
                    low_pos: min_pos,
                    low_count: min as usize,
                    high_pos: max_pos,
                    high_count: max as usize,
                });
            }
        }
        None
    }

    pub fn is_balanced(&self) -> bool {
        self.balance_witness().is_none()
    }

    /// One derivation step: the non-isolated letter loses one occurrence per
    /// maximal block. Blocks touching the window boundary have unknown full
    /// length and are discarded, so the result runs from the first to the
    /// last occurrence of the isolated letter. Ambient indexing is not
    /// preserved; the result gets origin 0.
    pub fn derive_once(&self) -> Result<EWord, WordError> {
        if self.letters.is_empty() {
            return Err(WordError::Empty);
        }
        let has_hh = self.letters.windows(2).any(|w| w[0] == EdgeLetter::H && w[1] == EdgeLetter::H);
        let has_vv = self.letters.windows(2).any(|w| w[0] == EdgeLetter::V && w[1] == EdgeLetter::V);
        let iso = match (has_hh, has_vv) {
            (true, true) => return Err(WordError::NeitherLetterIsolated),
            (false, false) => return Err(WordError::BothLettersIsolated),
            (true, false) => EdgeLetter::V,
            (false, true) => EdgeLetter::H,
        };
        let non = iso.other();
        let anchors: Vec<usize> = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == iso)
            .map(|(i, _)| i)
            .collect();
        let mut out = Vec::new();
        for (j, &pos) in anchors.iter().enumerate() {
            out.push(iso);
            if let Some(&next) = anchors.get(j + 1) {
                let gap = next - pos - 1;
                for _ in 1..gap {
                    out.push(non);
                }
            }
        }
        Ok(EWord::new(out, 0))
    }

    /// Extracts continued-fraction quotients of the reciprocal slope by
    /// repeated block deletion, starting with `a₀` = the least number of
    /// `H`'s between consecutive `V`'s. Stops after `max_quotients`, or as
    /// soon as the window no longer shows a complete block, and returns the
    /// quotients that were certified.
    pub fn recover_cf(&self, max_quotients: usize) -> Result<Vec<usize>, WordError> {
        let mut word: Vec<EdgeLetter> = self.letters.clone();
        // Stage 0 counts H-runs delimited by V.
        let mut delimiter = EdgeLetter::V;
        let mut quotients = Vec::new();
        for stage in 0..max_quotients {
            let counted = delimiter.other();
            let anchors: Vec<usize> = word
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == delimiter)
                .map(|(i, _)| i)
                .collect();
            if anchors.len() < 2 {
                break;
            }
            let gaps: Vec<usize> = anchors.windows(2).map(|w| w[1] - w[0] - 1).collect();
            let min = *gaps.iter().min().unwrap();
            let max = *gaps.iter().max().unwrap();
            if max - min > 1 {
                return Err(WordError::NotBalanced { stage });
            }
            quotients.push(min);
            // Delete `min` counted letters from each complete block and trim
            // the unknown boundary blocks.
            let mut next = Vec::new();
            for (j, &pos) in anchors.iter().enumerate() {
                next.push(delimiter);
                if j + 1 < anchors.len() {
                    let gap = anchors[j + 1] - pos - 1;
                    for _ in 0..(gap - min) {
                        next.push(counted);
                    }
                }
            }
            word = next;
            delimiter = counted;
        }
        Ok(quotients)
    }

    /// Window-relative symmetry classification.
    ///
    /// Every candidate center is scanned with its mirror relation; a
    /// candidate is certified when the verified pairs cover the whole window
    /// except for at most one unpaired boundary letter, with at most one
    /// mismatch forgiven when it involves the first or last letter of the
    /// window (an excerpt may be cropped asymmetrically). Among certified
    /// candidates the one with the best coverage wins.
    pub fn classify_symmetry(&self) -> SymmetryVerdict {
        let n = self.len();
        let mut best: Option<(CandidateScore, SymmetryKind, usize)> = None;
        let mut consider = |score: Option<CandidateScore>, kind: SymmetryKind, center: usize| {
            let Some(score) = score else { return };
            match &best {
                Some((b, _, _)) if !score.beats(b) => {}
                _ => best = Some((score, kind, center)),
            }
        };
        for center in 0..n {
            consider(self.scan_center(center, SymmetryKind::Odd), SymmetryKind::Odd, center);
            if center >= 1 {
                consider(self.scan_center(center, SymmetryKind::Even), SymmetryKind::Even, center);
                consider(
                    self.scan_center(center, SymmetryKind::Almost),
                    SymmetryKind::Almost,
                    center,
                );
            }
        }
        match best {
            Some((score, kind, center)) => SymmetryVerdict {
                kind,
                center: Some(self.ambient(center)),
                verified_pairs: score.verified,
            },
            None => SymmetryVerdict { kind: SymmetryKind::None, center: None, verified_pairs: 0 },
        }
    }

    fn scan_center(&self, center: usize, kind: SymmetryKind) -> Option<CandidateScore> {
        let w = &self.letters;
        let n = w.len();
        let last = n - 1;
        // Mirror of position center+k is center−k (odd) or center−k−1
        // (even/almost). The seam conditions at k = 0 are mandatory.
        let (offset, k_start) = match kind {
            SymmetryKind::Odd => (0usize, 1usize),
            SymmetryKind::Even => (1, 0),
            SymmetryKind::Almost => (1, 1),
            SymmetryKind::None => return None,
        };
        if kind == SymmetryKind::Almost && w[center] == w[center - 1] {
            return None;
        }
        let mut verified = 0usize;
        let mut forgiven = 0usize;
        let mut lo = center; // least covered position
        let mut hi = center; // greatest covered position
        if offset == 1 {
            lo = center - 1;
        }
        let mut k = k_start;
        loop {
            let i = center + k;
            if i > last || center < k + offset {
                break;
            }
            let j = center - k - offset;
            if w[i] == w[j] {
                verified += 1;
            } else if (i == last || j == 0) && !(kind == SymmetryKind::Even && k == 0) {
                forgiven += 1;
            } else {
                return None;
            }
            lo = j;
            hi = i;
            k += 1;
        }
        let uncovered = lo + (last - hi);
        if uncovered > 1 || forgiven > 1 || verified == 0 {
            return None;
        }
        let center_slack = (2 * center as i64 + offset as i64 - last as i64).unsigned_abs();
        Some(CandidateScore { uncovered, forgiven, verified, center_slack })
    }
}

impl fmt::Display for EWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Two equal-length factors whose `H`-counts differ by at least two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceWitness {
    pub length: usize,
    pub low_pos: usize,
    pub low_count: usize,
    pub high_pos: usize,
    pub high_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CandidateScore {
    uncovered: usize,
    forgiven: usize,
    verified: usize,
    center_slack: u64,
}

impl CandidateScore {
    fn beats(&self, other: &CandidateScore) -> bool {
        let key = |s: &CandidateScore| (s.uncovered, s.forgiven, usize::MAX - s.verified, s.center_slack);
        key(self) < key(other)
    }
}

/// Symmetry kinds of bi-infinite edge words around a center.
///
/// * `Odd`: `ε_{N+k} = ε_{N−k}` — mirror through the letter at `N`.
/// * `Even`: `ε_{N+k} = ε_{N−k−1}` for `k ≥ 0` — mirror through the gap.
/// * `Almost`: the even relation for `k ≥ 1` but `ε_N ≠ ε_{N−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    Odd,
    Even,
    Almost,
    None,
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymmetryKind::Odd => "odd",
            SymmetryKind::Even => "even",
            SymmetryKind::Almost => "almost",
            SymmetryKind::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryVerdict {
    pub kind: SymmetryKind,
    /// Ambient index of the center letter (`Odd`) or of the letter just
    /// right of the mirror gap (`Even`/`Almost`).
    pub center: Option<i64>,
    pub verified_pairs: usize,
}

/// Slope data for the skew product: `M_raw = ⌊1/m⌋`, `θ = 1/m − M_raw`, and
/// `M_raw` reduced modulo the horizontal cylinder modulus of the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeParams {
    m: QuadNum,
    m_raw: usize,
    m_mod: usize,
    modulus: usize,
    theta: QuadNum,
}

impl SlopeParams {
    pub fn slope(&self) -> &QuadNum {
        &self.m
    }

    pub fn m_raw(&self) -> usize {
        self.m_raw
    }

    pub fn m_mod(&self) -> usize {
        self.m_mod
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn theta(&self) -> &QuadNum {
        &self.theta
    }
}

/// Computes the slope parameters of a positive slope with respect to the
/// given cylinder modulus.
pub fn slope_params(m: &QuadNum, modulus: usize) -> Result<SlopeParams, WordError> {
    if m.sign() <= 0 {
        return Err(WordError::NonPositiveSlope);
    }
    debug_assert!(modulus >= 1);
    let inv = m.recip()?;
    let floor = inv.floor();
    let m_raw = floor.to_usize().ok_or(WordError::SlopeTooSmall)?;
    let theta = inv.try_sub(&QuadNum::from_rational(crate::algebra::Rational::from(floor)))?;
    Ok(SlopeParams {
        m: m.clone(),
        m_raw,
        m_mod: m_raw % modulus,
        modulus,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, QuadNum};

    fn w(text: &str) -> EWord {
        EWord::parse(text).unwrap()
    }

    #[test]
    fn parse_render_origin_marker() {
        let word = w("HV|HHV");
        assert_eq!(word.origin_index(), -2);
        assert_eq!(word.len(), 5);
        assert_eq!(word.render(), "HV|HHV");
        assert_eq!(w("HVH").origin_index(), 0);
        assert!(EWord::parse("HXV").is_err());
        assert!(EWord::parse("").is_err());
        assert!(EWord::parse("H|V|H").is_err());
    }

    #[test]
    fn balance_and_complexity() {
        // A geodesic window: H-block sizes differ by one at every length.
        let word = w("HVHHVHHHVH");
        assert!(word.is_balanced());

        // HH and VV in one word spread the length-2 counts to 0 and 2.
        let bad = w("HHVV");
        assert!(!bad.is_balanced());
        let witness = bad.balance_witness().unwrap();
        assert_eq!(witness.length, 2);
        assert!(witness.high_count - witness.low_count > 1);

        let ok = w("HVHHVHHV");
        assert!(ok.is_balanced());
        assert_eq!(ok.complexity(1), 2);
        assert_eq!(ok.complexity(2), 3);
    }

    #[test]
    fn derive_once_deletes_one_per_block() {
        assert_eq!(w("VHHVHHHV").derive_once().unwrap().render(), "VHVHHV");
        assert_eq!(w("VHHHVHHHV").derive_once().unwrap().render(), "VHHVHHV");
        // Boundary blocks are discarded.
        assert_eq!(w("HHVHHHVH").derive_once().unwrap().render(), "VHHV");
        assert_eq!(
            w("HHVHVVH").derive_once().unwrap_err(),
            WordError::NeitherLetterIsolated
        );
        assert_eq!(
            w("HVHVHV").derive_once().unwrap_err(),
            WordError::BothLettersIsolated
        );
    }

    #[test]
    fn recover_cf_examples() {
        // Window of the slope-211/500 torus word: H-blocks of sizes 2 and 3.
        assert_eq!(w("HVHHVHHHVH").recover_cf(8).unwrap(), alloc::vec![2]);
        // Alternating word: a₀ = 1, then exhaustion.
        assert_eq!(w("HVHVHVHV").recover_cf(8).unwrap(), alloc::vec![1]);
        // Unbalanced blocks are rejected.
        assert_eq!(
            w("VHHVHHHHV").recover_cf(8).unwrap_err(),
            WordError::NotBalanced { stage: 0 }
        );
        // max_quotients caps the expansion.
        assert_eq!(w("HVHVHVHV").recover_cf(0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn symmetry_table_rows() {
        let odd = w("HVVHVVVHVVVHVV").classify_symmetry();
        assert_eq!(odd.kind, SymmetryKind::Odd);
        assert_eq!(odd.center, Some(7));

        let even = w("VVHVVHVVHVVHVV").classify_symmetry();
        assert_eq!(even.kind, SymmetryKind::Even);
        assert_eq!(even.center, Some(7));

        let almost = w("HVVHVVVHVVHVVV").classify_symmetry();
        assert_eq!(almost.kind, SymmetryKind::Almost);
        assert_eq!(almost.center, Some(7));

        let none = w("HHVVVHHHVVHVHV").classify_symmetry();
        assert_eq!(none.kind, SymmetryKind::None);
    }

    #[test]
    fn symmetry_respects_ambient_indexing() {
        let mut word = w("HVVHVVVHVVVHVV");
        word = EWord::new(word.letters().to_vec(), -7);
        let verdict = word.classify_symmetry();
        assert_eq!(verdict.kind, SymmetryKind::Odd);
        assert_eq!(verdict.center, Some(0));
    }

    #[test]
    fn slope_params_examples() {
        // m = 2/5 with modulus 2: 1/m = 5/2.
        let m = QuadNum::from_rational(rational(2, 5));
        let p = slope_params(&m, 2).unwrap();
        assert_eq!(p.m_raw(), 2);
        assert_eq!(p.m_mod(), 0);
        assert_eq!(p.theta(), &QuadNum::from_rational(rational(1, 2)));

        // m = 1: θ = 0.
        let one = QuadNum::one();
        let p = slope_params(&one, 6).unwrap();
        assert_eq!(p.m_raw(), 1);
        assert_eq!(p.m_mod(), 1);
        assert!(p.theta().is_zero());

        // Golden slope m = (−1+√5)/2: 1/m = (1+√5)/2, M_raw = 1.
        let golden = QuadNum::new(rational(-1, 2), rational(1, 2), 5);
        let p = slope_params(&golden, 6).unwrap();
        assert_eq!(p.m_raw(), 1);
        assert_eq!(p.m_mod(), 1);
        assert_eq!(p.theta(), &QuadNum::new(rational(-1, 2), rational(1, 2), 5));

        assert_eq!(
            slope_params(&QuadNum::zero(), 2).unwrap_err(),
            WordError::NonPositiveSlope
        );
        assert_eq!(
            slope_params(&QuadNum::from_int(-2), 2).unwrap_err(),
            WordError::NonPositiveSlope
        );
    }
}
