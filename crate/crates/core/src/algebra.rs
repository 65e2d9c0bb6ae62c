//! Exact scalar and permutation arithmetic.
//!
//! All geometry in this crate reduces to three primitives: arbitrary-precision
//! rationals, numbers of the form `a + b·√n` with `n` squarefree, and
//! permutations of `{1, …, d}` written in cycle notation. Comparisons of
//! quadratic numbers are decided by sign bookkeeping and cross-squaring,
//! never by floating point.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
#[cfg(feature = "std")]
use num_traits::ToPrimitive;

/// Arbitrary-precision rational number, always kept reduced with a positive
/// denominator by the underlying representation.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact floor of a rational as a big integer.
pub fn rational_floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Errors from quadratic-number arithmetic and literal parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadError {
    /// Two operands carry genuinely different irrational parts.
    MismatchedRadicands(u64, u64),
    /// Division by an exact zero.
    DivisionByZero,
    /// A scalar literal did not match the grammar.
    BadLiteral(String),
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::MismatchedRadicands(a, b) => {
                write!(f, "mismatched radicands: √{a} vs √{b}")
            }
            QuadError::DivisionByZero => write!(f, "division by zero"),
            QuadError::BadLiteral(s) => write!(f, "bad scalar literal: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QuadError {}

/// Splits `n = s² · m` with `m` squarefree and returns `(s, m)`.
///
/// Trial division runs to the cube root of `n`; the remaining cofactor has at
/// most two prime factors, so a final perfect-square test completes the
/// factorization for every `u64` input.
fn extract_square_part(n: u64) -> (u64, u64) {
    if n < 2 {
        return (1, n);
    }
    let mut reduced = n;
    let mut square = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= reduced {
        while reduced.is_multiple_of(p * p) {
            reduced /= p * p;
            square *= p;
        }
        p += 1;
    }
    let root = reduced.sqrt();
    if root * root == reduced {
        square *= root;
        reduced = 1;
    }
    (square, reduced)
}

/// An exact element `rat + surd·√radicand` of a real quadratic field.
///
/// Canonical form: the radicand is squarefree and ≥ 2 when the surd
/// coefficient is nonzero, and both surd and radicand are zero for rational
/// values, so derived equality is value equality. Two operands of one
/// operation must live in the same field: combining values whose radicands
/// differ (and whose surd parts are both nonzero) is an error. Purely
/// rational values interoperate with any radicand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadNum {
    rat: Rational,
    surd: Rational,
    radicand: u64,
}

impl QuadNum {
    /// Builds `rat + surd·√radicand`, normalizing to canonical form.
    pub fn new(rat: Rational, surd: Rational, radicand: u64) -> QuadNum {
        let (sq, free) = extract_square_part(radicand);
        let mut surd = surd * Rational::from(BigInt::from(sq));
        let mut rat = rat;
        let mut radicand = free;
        if radicand <= 1 {
            // √0 = 0 and √1 = 1 fold into the rational part.
            if radicand == 1 {
                rat += surd.clone();
            }
            surd = Rational::zero();
            radicand = 0;
        }
        if surd.is_zero() {
            radicand = 0;
        }
        QuadNum { rat, surd, radicand }
    }

    pub fn from_rational(rat: Rational) -> QuadNum {
        QuadNum { rat, surd: Rational::zero(), radicand: 0 }
    }

    pub fn from_int(n: i64) -> QuadNum {
        QuadNum::from_rational(Rational::from(BigInt::from(n)))
    }

    pub fn zero() -> QuadNum {
        QuadNum::from_int(0)
    }

    pub fn one() -> QuadNum {
        QuadNum::from_int(1)
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn surd_part(&self) -> &Rational {
        &self.surd
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// The rational value, if this number has no irrational part.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.rat)
        } else {
            None
        }
    }

    fn merged_radicand(&self, other: &QuadNum) -> Result<u64, QuadError> {
        match (self.surd.is_zero(), other.surd.is_zero()) {
            (true, true) => Ok(0),
            (false, true) => Ok(self.radicand),
            (true, false) => Ok(other.radicand),
            (false, false) => {
                if self.radicand == other.radicand {
                    Ok(self.radicand)
                } else {
                    Err(QuadError::MismatchedRadicands(self.radicand, other.radicand))
                }
            }
        }
    }

    /// Sign of the value: `-1`, `0`, or `1`.
    ///
    /// When the rational and surd parts have opposite signs the comparison is
    /// settled by cross-squaring: for positive `p`, `q`, the inequality
    /// `p > q·√n` holds exactly when `p² > q²·n`. Equality of the squares is
    /// impossible for a squarefree radicand ≥ 2.
    pub fn sign(&self) -> i32 {
        let sr = rational_sign(&self.rat);
        if self.surd.is_zero() {
            return sr;
        }
        let ss = rational_sign(&self.surd);
        if sr == 0 {
            return ss;
        }
        if sr == ss {
            return sr;
        }
        let rat_sq = &self.rat * &self.rat;
        let surd_sq = &self.surd * &self.surd * Rational::from(BigInt::from(self.radicand));
        debug_assert_ne!(rat_sq, surd_sq, "√{} collapsed to a rational", self.radicand);
        if rat_sq > surd_sq {
            sr
        } else {
            ss
        }
    }

    /// Exact comparison. Fails only when the two values live in different
    /// quadratic fields.
    pub fn try_cmp(&self, other: &QuadNum) -> Result<Ordering, QuadError> {
        let diff = self.try_sub(other)?;
        Ok(match diff.sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    pub fn try_add(&self, other: &QuadNum) -> Result<QuadNum, QuadError> {
        let radicand = self.merged_radicand(other)?;
        Ok(QuadNum::new(&self.rat + &other.rat, &self.surd + &other.surd, radicand))
    }

    pub fn try_sub(&self, other: &QuadNum) -> Result<QuadNum, QuadError> {
        let radicand = self.merged_radicand(other)?;
        Ok(QuadNum::new(&self.rat - &other.rat, &self.surd - &other.surd, radicand))
    }

    pub fn try_mul(&self, other: &QuadNum) -> Result<QuadNum, QuadError> {
        let radicand = self.merged_radicand(other)?;
        let n = Rational::from(BigInt::from(radicand));
        let rat = &self.rat * &other.rat + &self.surd * &other.surd * n;
        let surd = &self.rat * &other.surd + &self.surd * &other.rat;
        Ok(QuadNum::new(rat, surd, radicand))
    }

    /// Exact reciprocal via the field conjugate:
    /// `1/(a + b√n) = (a − b√n)/(a² − b²n)`.
    pub fn recip(&self) -> Result<QuadNum, QuadError> {
        if self.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        if self.surd.is_zero() {
            return Ok(QuadNum::from_rational(self.rat.recip()));
        }
        let n = Rational::from(BigInt::from(self.radicand));
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * n;
        debug_assert!(!norm.is_zero());
        Ok(QuadNum::new(&self.rat / &norm, -(&self.surd / &norm), self.radicand))
    }

    pub fn try_div(&self, other: &QuadNum) -> Result<QuadNum, QuadError> {
        self.try_mul(&other.recip()?)
    }

    /// Exact floor.
    ///
    /// The irrational part is bracketed by integer square roots of scaled
    /// integers; the bracket is refined until it pins down one integer. The
    /// loop terminates because a value with a nonzero surd part is never an
    /// integer.
    pub fn floor(&self) -> BigInt {
        if self.surd.is_zero() {
            return rational_floor(&self.rat);
        }
        // surd·√n = sign(surd)·√(surd²·n)
        let t: Rational =
            &self.surd * &self.surd * Rational::from(BigInt::from(self.radicand));
        let negative = self.surd.is_negative();
        let mut scale = BigInt::one();
        loop {
            // √(num/den) = √(num·den)/den; scaling num·den by scale² refines.
            let num = t.numer() * &scale * &scale;
            let den = t.denom() * &scale * &scale;
            let root = (&num * &den).sqrt();
            let lo = Rational::new(root.clone(), den.clone());
            let hi = Rational::new(root + 1, den);
            let (val_lo, val_hi) = if negative {
                (&self.rat - hi, &self.rat - lo)
            } else {
                (&self.rat + lo, &self.rat + hi)
            };
            let floor_lo = rational_floor(&val_lo);
            let floor_hi = rational_floor(&val_hi);
            if floor_lo == floor_hi {
                return floor_lo;
            }
            scale *= BigInt::from(1u64 << 16);
        }
    }

    /// Parses the scalar literal grammar: `rat:p/q` or `quad:a0/a1,b0/b1,n`.
    /// The denominator may be omitted (`rat:3` means `3/1`).
    pub fn parse(text: &str) -> Result<QuadNum, QuadError> {
        let text = text.trim();
        if let Some(body) = text.strip_prefix("rat:") {
            return Ok(QuadNum::from_rational(parse_rational(body)?));
        }
        if let Some(body) = text.strip_prefix("quad:") {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 3 {
                return Err(QuadError::BadLiteral(text.to_string()));
            }
            let rat = parse_rational(parts[0])?;
            let surd = parse_rational(parts[1])?;
            let radicand: u64 = parts[2]
                .trim()
                .parse()
                .map_err(|_| QuadError::BadLiteral(text.to_string()))?;
            return Ok(QuadNum::new(rat, surd, radicand));
        }
        Err(QuadError::BadLiteral(text.to_string()))
    }

    /// Floating-point preview; display convenience only, never used to decide
    /// anything.
    #[cfg(feature = "std")]
    pub fn to_f64(&self) -> f64 {
        let rat = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.surd.is_zero() {
            return rat;
        }
        rat + self.surd.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }
}

fn rational_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Parses `p/q` or `p` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, QuadError> {
    let text = text.trim();
    let bad = || QuadError::BadLiteral(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

impl fmt::Display for QuadNum {
    /// Renders in the literal grammar accepted by [`QuadNum::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "rat:{}/{}", self.rat.numer(), self.rat.denom())
        } else {
            write!(
                f,
                "quad:{}/{},{}/{},{}",
                self.rat.numer(),
                self.rat.denom(),
                self.surd.numer(),
                self.surd.denom(),
                self.radicand
            )
        }
    }
}

impl PartialOrd for QuadNum {
    /// `None` exactly when the operands live in different quadratic fields.
    fn partial_cmp(&self, other: &QuadNum) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

macro_rules! quad_binop {
    ($trait:ident, $method:ident, $try_method:ident) => {
        impl $trait for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                self.$try_method(rhs)
                    .expect("operands live in different quadratic fields")
            }
        }
        impl $trait for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                (&self).$method(&rhs)
            }
        }
    };
}

quad_binop!(Add, add, try_add);
quad_binop!(Sub, sub, try_sub);
quad_binop!(Mul, mul, try_mul);
quad_binop!(Div, div, try_div);

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum {
            rat: -&self.rat,
            surd: -&self.surd,
            radicand: self.radicand,
        }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

/// Errors from permutation construction and cycle-notation parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermError {
    RepeatedLabel(usize),
    LabelOutOfRange { label: usize, degree: usize },
    NotABijection,
    Malformed(String),
}

impl fmt::Display for PermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermError::RepeatedLabel(l) => write!(f, "label {l} appears twice"),
            PermError::LabelOutOfRange { label, degree } => {
                write!(f, "label {label} out of range 1..={degree}")
            }
            PermError::NotABijection => write!(f, "images do not form a bijection"),
            PermError::Malformed(s) => write!(f, "malformed cycle notation: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PermError {}

/// A permutation of the labels `1..=d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// `img[i]` is the image of label `i + 1`, as a 1-based label.
    img: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Permutation {
        Permutation { img: (1..=d).collect() }
    }

    /// Builds from a 1-based image table.
    pub fn from_images(img: Vec<usize>) -> Result<Permutation, PermError> {
        let d = img.len();
        let mut seen = alloc::vec![false; d + 1];
        for &x in &img {
            if x < 1 || x > d {
                return Err(PermError::LabelOutOfRange { label: x, degree: d });
            }
            if seen[x] {
                return Err(PermError::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Permutation { img })
    }

    /// Parses cycle notation such as `(1)(2 3 4)(5 6)` into a permutation of
    /// `1..=d`. Whitespace between labels and between cycles is free; labels
    /// omitted from every cycle are fixed points; an empty string is the
    /// identity.
    pub fn from_cycles(text: &str, d: usize) -> Result<Permutation, PermError> {
        let mut img: Vec<usize> = (1..=d).collect();
        let mut placed = alloc::vec![false; d + 1];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(open) = rest.strip_prefix('(') else {
                return Err(PermError::Malformed(text.trim().to_string()));
            };
            let Some(close) = open.find(')') else {
                return Err(PermError::Malformed(text.trim().to_string()));
            };
            let body = &open[..close];
            rest = open[close + 1..].trim_start();
            let mut cycle = Vec::new();
            for token in body.split_whitespace() {
                let label: usize = token
                    .parse()
                    .map_err(|_| PermError::Malformed(text.trim().to_string()))?;
                if label < 1 || label > d {
                    return Err(PermError::LabelOutOfRange { label, degree: d });
                }
                if placed[label] {
                    return Err(PermError::RepeatedLabel(label));
                }
                placed[label] = true;
                cycle.push(label);
            }
            if cycle.is_empty() {
                return Err(PermError::Malformed(text.trim().to_string()));
            }
            for i in 0..cycle.len() {
                img[cycle[i] - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { img })
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    /// Image of a 1-based label.
    pub fn apply(&self, label: usize) -> usize {
        self.img[label - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut img = alloc::vec![0usize; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            img[x - 1] = i + 1;
        }
        Permutation { img }
    }

    /// Composition `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        let img = (1..=other.degree()).map(|l| self.apply(other.apply(l))).collect();
        Permutation { img }
    }

    /// Non-negative power by repeated squaring.
    pub fn pow(&self, mut e: usize) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = base.compose(&acc);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Cycle decomposition; each cycle starts at its smallest label and the
    /// cycles are ordered by that label. Fixed points appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = alloc::vec![false; d + 1];
        let mut out = Vec::new();
        for start in 1..=d {
            if seen[start] {
                continue;
            }
            let mut cycle = alloc::vec![start];
            seen[start] = true;
            let mut next = self.apply(start);
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.apply(next);
            }
            out.push(cycle);
        }
        out
    }

    /// Least common multiple of the cycle lengths, i.e. the order of the
    /// permutation.
    pub fn cycle_lcm(&self) -> usize {
        self.cycles().iter().fold(1usize, |acc, c| acc.lcm(&c.len()))
    }

    /// Renders in the cycle notation accepted by [`Permutation::from_cycles`],
    /// fixed points included.
    pub fn to_cycle_string(&self) -> String {
        let mut out = String::new();
        for cycle in self.cycles() {
            out.push('(');
            for (i, label) in cycle.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&label.to_string());
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}
