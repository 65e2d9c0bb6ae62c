//! Interval exchange transformations with exact quadratic arithmetic, the
//! skew product on `[0,1) × Λ` induced by a slope, and its conjugate IET on
//! `[0, d)`.
//!
//! Conventions: an IET on `k` letters is given by positive lengths `ℓ_a` and
//! two rank functions `π₀, π₁ : letters → {1..k}` describing the domain and
//! range orders. `δ⁰_a` (resp. `δ¹_a`) is the left endpoint of the domain
//! (resp. range) interval of `a`, and `T(x) = x − δ⁰_a + δ¹_a` on
//! `I⁰_a = [δ⁰_a, δ⁰_a + ℓ_a)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{QuadError, QuadNum};
use crate::surface::Surface;
use crate::torusword::SlopeParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IetError {
    Empty,
    SizeMismatch,
    /// A rank vector is not a bijection onto `{1..k}`.
    BadRanks,
    /// A subinterval has non-positive length (for the conjugate IET this
    /// happens exactly when `θ = 0`, i.e. the slope reciprocal is an
    /// integer).
    DegenerateLength { letter: usize },
    NotInDomain,
    Quad(QuadError),
}

impl fmt::Display for IetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IetError::Empty => write!(f, "interval exchange needs at least one letter"),
            IetError::SizeMismatch => write!(f, "lengths and rank vectors disagree in size"),
            IetError::BadRanks => write!(f, "rank vector is not a bijection onto 1..k"),
            IetError::DegenerateLength { letter } => {
                write!(f, "subinterval {letter} has non-positive length")
            }
            IetError::NotInDomain => write!(f, "point lies outside [0, total)"),
            IetError::Quad(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IetError {}

impl From<QuadError> for IetError {
    fn from(e: QuadError) -> IetError {
        IetError::Quad(e)
    }
}

/// An idoc failure: `Tⁿ(δ⁰_a) = δ⁰_b` with `π₀(b) > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdocViolation {
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

/// An interval exchange transformation over letters `0..k`.
#[derive(Debug, Clone)]
pub struct IetSpec {
    names: Vec<String>,
    lengths: Vec<QuadNum>,
    pi0: Vec<usize>,
    pi1: Vec<usize>,
    d0: Vec<QuadNum>,
    d1: Vec<QuadNum>,
    total: QuadNum,
}

impl IetSpec {
    /// Builds an IET from lengths and 1-based rank vectors. All lengths must
    /// be strictly positive and live in a common quadratic field.
    pub fn new(lengths: Vec<QuadNum>, pi0: Vec<usize>, pi1: Vec<usize>) -> Result<IetSpec, IetError> {
        let k = lengths.len();
        if k == 0 {
            return Err(IetError::Empty);
        }
        if pi0.len() != k || pi1.len() != k {
            return Err(IetError::SizeMismatch);
        }
        for ranks in [&pi0, &pi1] {
            let mut seen = alloc::vec![false; k];
            for &r in ranks.iter() {
                if r < 1 || r > k || seen[r - 1] {
                    return Err(IetError::BadRanks);
                }
                seen[r - 1] = true;
            }
        }
        // Summing validates that all lengths live in one quadratic field, so
        // later arithmetic cannot hit a radicand mismatch.
        let mut total = QuadNum::zero();
        for (letter, l) in lengths.iter().enumerate() {
            if l.sign() <= 0 {
                return Err(IetError::DegenerateLength { letter });
            }
            total = total.try_add(l)?;
        }
        let d0 = endpoint_table(&lengths, &pi0);
        let d1 = endpoint_table(&lengths, &pi1);
        let names = (1..=k).map(|i| i.to_string()).collect();
        Ok(IetSpec { names, lengths, pi0, pi1, d0, d1, total })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<IetSpec, IetError> {
        if names.len() != self.k() {
            return Err(IetError::SizeMismatch);
        }
        self.names = names;
        Ok(self)
    }

    /// The IET conjugate to the skew product of `surface` at the given slope
    /// via `φ(x, λ) = x + λ − 1`. Letters come in pairs `(λ,L), (λ,R)` with
    /// indices `2(λ−1)` and `2(λ−1)+1`.
    pub fn conjugate_of(surface: &Surface, params: &SlopeParams) -> Result<IetSpec, IetError> {
        let d = surface.degree();
        let theta = params.theta().clone();
        if theta.is_zero() {
            return Err(IetError::DegenerateLength { letter: 1 });
        }
        let one_minus_theta = QuadNum::one().try_sub(&theta)?;
        let low = surface.v().compose(&surface.h().pow(params.m_mod()));
        let high = surface.v().compose(&surface.h().pow(params.m_mod() + 1));
        let mut lengths = Vec::with_capacity(2 * d);
        let mut pi0 = Vec::with_capacity(2 * d);
        let mut pi1 = Vec::with_capacity(2 * d);
        let mut names = Vec::with_capacity(2 * d);
        for sq in 1..=d {
            lengths.push(one_minus_theta.clone());
            lengths.push(theta.clone());
            pi0.push(2 * sq - 1);
            pi0.push(2 * sq);
            pi1.push(2 * low.apply(sq));
            pi1.push(2 * high.apply(sq) - 1);
            names.push(alloc::format!("{sq}L"));
            names.push(alloc::format!("{sq}R"));
        }
        IetSpec::new(lengths, pi0, pi1)?.with_names(names)
    }

    /// Letter index of `(square, side)` in the conjugate IET.
    pub fn conjugate_index(square: usize, right: bool) -> usize {
        2 * (square - 1) + right as usize
    }

    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    pub fn name(&self, letter: usize) -> &str {
        &self.names[letter]
    }

    pub fn length(&self, letter: usize) -> &QuadNum {
        &self.lengths[letter]
    }

    pub fn pi0(&self, letter: usize) -> usize {
        self.pi0[letter]
    }

    pub fn pi1(&self, letter: usize) -> usize {
        self.pi1[letter]
    }

    pub fn total(&self) -> &QuadNum {
        &self.total
    }

    /// Left endpoint of the domain interval `I⁰`.
    pub fn delta0(&self, letter: usize) -> &QuadNum {
        &self.d0[letter]
    }

    /// Left endpoint of the range interval `I¹`.
    pub fn delta1(&self, letter: usize) -> &QuadNum {
        &self.d1[letter]
    }

    /// Domain interval `[δ⁰_a, δ⁰_a + ℓ_a)`.
    pub fn interval0(&self, letter: usize) -> (QuadNum, QuadNum) {
        let lo = self.d0[letter].clone();
        let hi = &lo + &self.lengths[letter];
        (lo, hi)
    }

    pub fn interval1(&self, letter: usize) -> (QuadNum, QuadNum) {
        let lo = self.d1[letter].clone();
        let hi = &lo + &self.lengths[letter];
        (lo, hi)
    }

    /// The letter whose domain interval contains `x`.
    pub fn locate(&self, x: &QuadNum) -> Result<usize, IetError> {
        use core::cmp::Ordering;
        if x.try_cmp(&QuadNum::zero())? == Ordering::Less
            || x.try_cmp(&self.total)? != Ordering::Less
        {
            return Err(IetError::NotInDomain);
        }
        for letter in 0..self.k() {
            let (lo, hi) = self.interval0(letter);
            if x.try_cmp(&lo)? != Ordering::Less && x.try_cmp(&hi)? == Ordering::Less {
                return Ok(letter);
            }
        }
        unreachable!("intervals partition the domain");
    }

    fn locate_range(&self, y: &QuadNum) -> Result<usize, IetError> {
        use core::cmp::Ordering;
        if y.try_cmp(&QuadNum::zero())? == Ordering::Less
            || y.try_cmp(&self.total)? != Ordering::Less
        {
            return Err(IetError::NotInDomain);
        }
        for letter in 0..self.k() {
            let (lo, hi) = self.interval1(letter);
            if y.try_cmp(&lo)? != Ordering::Less && y.try_cmp(&hi)? == Ordering::Less {
                return Ok(letter);
            }
        }
        unreachable!("range intervals partition the domain");
    }

    pub fn apply(&self, x: &QuadNum) -> Result<QuadNum, IetError> {
        let a = self.locate(x)?;
        Ok(&(x - &self.d0[a]) + &self.d1[a])
    }

    pub fn apply_inv(&self, y: &QuadNum) -> Result<QuadNum, IetError> {
        let a = self.locate_range(y)?;
        Ok(&(y - &self.d1[a]) + &self.d0[a])
    }

    /// Letters visited by `x, T(x), …, T^{n−1}(x)`.
    pub fn itinerary(&self, x: &QuadNum, n: usize) -> Result<Vec<usize>, IetError> {
        let mut out = Vec::with_capacity(n);
        let mut p = x.clone();
        for _ in 0..n {
            let a = self.locate(&p)?;
            out.push(a);
            p = &(&p - &self.d0[a]) + &self.d1[a];
        }
        Ok(out)
    }

    /// Keane's infinite-distinct-orbit condition, checked up to `n_max`
    /// iterations: no forward orbit of a left endpoint may land on a left
    /// endpoint other than 0.
    pub fn check_idoc(&self, n_max: usize) -> Result<(), IdocViolation> {
        for a in 0..self.k() {
            let mut p = self.d0[a].clone();
            for n in 1..=n_max {
                p = self.apply(&p).expect("orbit stays in the domain");
                for b in 0..self.k() {
                    if self.pi0[b] > 1 && p == self.d0[b] {
                        return Err(IdocViolation { n, a, b });
                    }
                }
            }
        }
        Ok(())
    }

    /// An IET is irreducible when no proper prefix of the domain order is a
    /// prefix of the range order (as a set of letters).
    pub fn is_irreducible(&self) -> bool {
        let k = self.k();
        let mut inv0 = alloc::vec![0usize; k];
        let mut inv1 = alloc::vec![0usize; k];
        for a in 0..k {
            inv0[self.pi0[a] - 1] = a;
            inv1[self.pi1[a] - 1] = a;
        }
        let mut seen0 = alloc::collections::BTreeSet::new();
        let mut seen1 = alloc::collections::BTreeSet::new();
        for j in 0..k - 1 {
            seen0.insert(inv0[j]);
            seen1.insert(inv1[j]);
            if seen0 == seen1 {
                return false;
            }
        }
        true
    }

    /// Cylinder `I⁰_w = { x : itinerary(x) starts with w }`, computed as an
    /// exact half-open interval by pulling the constraint back through the
    /// word. Returns `None` when the cylinder is empty.
    pub fn cylinder(&self, word: &[usize]) -> Result<Option<(QuadNum, QuadNum)>, IetError> {
        use core::cmp::Ordering;
        let mut lo = QuadNum::zero();
        let mut hi = self.total.clone();
        for &a in word.iter().rev() {
            if a >= self.k() {
                return Err(IetError::NotInDomain);
            }
            // S ← I⁰_a ∩ T⁻¹(S): shift S back by the translation of `a`,
            // then clip to I⁰_a.
            let shift = &self.d1[a] - &self.d0[a];
            lo = &lo - &shift;
            hi = &hi - &shift;
            let (a_lo, a_hi) = self.interval0(a);
            if lo.try_cmp(&a_lo)? == Ordering::Less {
                lo = a_lo;
            }
            if hi.try_cmp(&a_hi)? == Ordering::Greater {
                hi = a_hi;
            }
            if lo.try_cmp(&hi)? != Ordering::Less {
                return Ok(None);
            }
        }
        Ok(Some((lo, hi)))
    }

    pub fn cylinder_length(&self, word: &[usize]) -> Result<QuadNum, IetError> {
        match self.cylinder(word)? {
            Some((lo, hi)) => Ok(&hi - &lo),
            None => Ok(QuadNum::zero()),
        }
    }

    /// Arrival set `A(w)`: letters `a` such that `aw` occurs, in range
    /// order. For an idoc IET this is always an interval of consecutive
    /// letters in the `π₁` order.
    pub fn arrivals(&self, word: &[usize]) -> Result<Vec<usize>, IetError> {
        use core::cmp::Ordering;
        let Some((lo, hi)) = self.cylinder(word)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut by_rank: Vec<usize> = (0..self.k()).collect();
        by_rank.sort_by_key(|&a| self.pi1[a]);
        for a in by_rank {
            let (a_lo, a_hi) = self.interval1(a);
            if a_lo.try_cmp(&hi)? == Ordering::Less && lo.try_cmp(&a_hi)? == Ordering::Less {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// Departure set `D(w)`: letters `b` such that `wb` occurs, in domain
    /// order. Always an interval of consecutive letters in the `π₀` order
    /// for an idoc IET.
    pub fn departures(&self, word: &[usize]) -> Result<Vec<usize>, IetError> {
        use core::cmp::Ordering;
        let Some((mut lo, mut hi)) = self.cylinder(word)? else {
            return Ok(Vec::new());
        };
        // Push the cylinder forward through the word; it stays inside one
        // subinterval at every step, so each step is a single translation.
        for &a in word {
            let shift = &self.d1[a] - &self.d0[a];
            lo = &lo + &shift;
            hi = &hi + &shift;
        }
        let mut out = Vec::new();
        let mut by_rank: Vec<usize> = (0..self.k()).collect();
        by_rank.sort_by_key(|&b| self.pi0[b]);
        for b in by_rank {
            let (b_lo, b_hi) = self.interval0(b);
            if b_lo.try_cmp(&hi)? == Ordering::Less && lo.try_cmp(&b_hi)? == Ordering::Less {
                out.push(b);
            }
        }
        Ok(out)
    }
}

fn endpoint_table(lengths: &[QuadNum], ranks: &[usize]) -> Vec<QuadNum> {
    let k = lengths.len();
    let mut order = alloc::vec![0usize; k];
    for (a, &r) in ranks.iter().enumerate() {
        order[r - 1] = a;
    }
    let mut table = alloc::vec![QuadNum::zero(); k];
    let mut acc = QuadNum::zero();
    for &a in &order {
        table[a] = acc.clone();
        acc = &acc + &lengths[a];
    }
    table
}

/// A point of the skew product phase space `[0,1) × Λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewState {
    pub x: QuadNum,
    pub square: usize,
}

impl SkewState {
    pub fn new(x: QuadNum, square: usize) -> SkewState {
        SkewState { x, square }
    }
}

impl fmt::Display for SkewState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.square)
    }
}

/// The first-return map of a slope-`m` flow to the union of bottom edges:
/// rotation by `θ` on the base, with the square advanced by `v∘h^M` or
/// `v∘h^{M+1}` depending on whether the rotation wraps.
#[derive(Debug, Clone)]
pub struct SkewProduct {
    low: crate::algebra::Permutation,
    high: crate::algebra::Permutation,
    theta: QuadNum,
    boundary: QuadNum,
}

impl SkewProduct {
    pub fn new(surface: &Surface, params: &SlopeParams) -> Result<SkewProduct, IetError> {
        let theta = params.theta().clone();
        let boundary = QuadNum::one().try_sub(&theta)?;
        Ok(SkewProduct {
            low: surface.v().compose(&surface.h().pow(params.m_mod())),
            high: surface.v().compose(&surface.h().pow(params.m_mod() + 1)),
            theta,
            boundary,
        })
    }

    pub fn theta(&self) -> &QuadNum {
        &self.theta
    }

    /// `v∘h^M`, the square map on the non-wrapping piece.
    pub fn low_map(&self) -> &crate::algebra::Permutation {
        &self.low
    }

    /// `v∘h^{M+1}`, the square map on the wrapping piece.
    pub fn high_map(&self) -> &crate::algebra::Permutation {
        &self.high
    }

    pub fn step(&self, s: &SkewState) -> Result<SkewState, IetError> {
        use core::cmp::Ordering;
        if s.x.try_cmp(&self.boundary)? == Ordering::Less {
            Ok(SkewState::new(s.x.try_add(&self.theta)?, self.low.apply(s.square)))
        } else {
            let x = s.x.try_add(&self.theta)?.try_sub(&QuadNum::one())?;
            Ok(SkewState::new(x, self.high.apply(s.square)))
        }
    }

    pub fn step_back(&self, s: &SkewState) -> Result<SkewState, IetError> {
        use core::cmp::Ordering;
        if s.x.try_cmp(&self.theta)? != Ordering::Less {
            Ok(SkewState::new(
                s.x.try_sub(&self.theta)?,
                self.low.inverse().apply(s.square),
            ))
        } else {
            let x = s.x.try_sub(&self.theta)?.try_add(&QuadNum::one())?;
            Ok(SkewState::new(x, self.high.inverse().apply(s.square)))
        }
    }
}
