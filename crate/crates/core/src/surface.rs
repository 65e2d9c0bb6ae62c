//! Square-tiled surfaces given by a pair of permutations.
//!
//! Squares are labeled `1..=d`. Crossing the right edge of square `λ` enters
//! `h(λ)`; crossing the top edge enters `v(λ)`. The surface is connected
//! exactly when `⟨h, v⟩` acts transitively on the labels. A square is *good*
//! when `vh(λ) = hv(λ)` — its upper-right corner is then a regular point —
//! and *bad* when the two compositions disagree, which puts a conical
//! singularity at that corner.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use core::fmt;

use crate::algebra::{PermError, Permutation};

/// The two edge letters of a cutting sequence: `H` marks a crossing of a
/// vertical (left/right) edge, `V` a crossing of a horizontal (bottom/top)
/// edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLetter {
    H,
    V,
}

impl EdgeLetter {
    pub fn other(self) -> EdgeLetter {
        match self {
            EdgeLetter::H => EdgeLetter::V,
            EdgeLetter::V => EdgeLetter::H,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            EdgeLetter::H => 'H',
            EdgeLetter::V => 'V',
        }
    }

    pub fn from_char(c: char) -> Option<EdgeLetter> {
        match c {
            'H' => Some(EdgeLetter::H),
            'V' => Some(EdgeLetter::V),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One symbol of a labeled cutting sequence: the square being entered and the
/// kind of edge crossed to enter it. Token form: `2V`, `3H`, ….
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutSym {
    pub square: usize,
    pub edge: EdgeLetter,
}

impl CutSym {
    pub fn new(square: usize, edge: EdgeLetter) -> CutSym {
        CutSym { square, edge }
    }
}

impl fmt::Display for CutSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.square, self.edge)
    }
}

/// Flow directions. `NE` is the reference quadrant (positive slope, moving
/// up-right); the other three are reached by inverting `h`, `v`, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    NE,
    NW,
    SE,
    SW,
}

/// Errors from surface construction and the surface file grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    /// `⟨h, v⟩` is not transitive; the glued squares fall apart into several
    /// components, the smallest reachable orbit is reported.
    Disconnected { reachable: usize, degree: usize },
    DegreeMismatch { h: usize, v: usize },
    Perm(PermError),
    Parse(String),
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceError::Disconnected { reachable, degree } => write!(
                f,
                "disconnected surface: only {reachable} of {degree} squares reachable from square 1"
            ),
            SurfaceError::DegreeMismatch { h, v } => {
                write!(f, "h permutes {h} labels but v permutes {v}")
            }
            SurfaceError::Perm(e) => write!(f, "{e}"),
            SurfaceError::Parse(s) => write!(f, "malformed surface description: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SurfaceError {}

impl From<PermError> for SurfaceError {
    fn from(e: PermError) -> SurfaceError {
        SurfaceError::Perm(e)
    }
}

/// A connected square-tiled surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    d: usize,
    h: Permutation,
    v: Permutation,
    bad: BTreeSet<usize>,
    /// lcm of the cycle lengths of `h`; the horizontal cylinder modulus used
    /// by the skew product.
    cycle_modulus: usize,
}

impl Surface {
    /// Builds a surface from the two gluing permutations, verifying that they
    /// act on the same labels and generate a transitive action.
    pub fn build(h: Permutation, v: Permutation) -> Result<Surface, SurfaceError> {
        let d = h.degree();
        if v.degree() != d {
            return Err(SurfaceError::DegreeMismatch { h: d, v: v.degree() });
        }
        // Orbit of square 1 under h, v and their inverses.
        let hinv = h.inverse();
        let vinv = v.inverse();
        let mut seen = alloc::vec![false; d + 1];
        let mut stack = alloc::vec![1usize];
        seen[1] = true;
        let mut reachable = 1usize;
        while let Some(s) = stack.pop() {
            for next in [h.apply(s), v.apply(s), hinv.apply(s), vinv.apply(s)] {
                if !seen[next] {
                    seen[next] = true;
                    reachable += 1;
                    stack.push(next);
                }
            }
        }
        if reachable != d {
            return Err(SurfaceError::Disconnected { reachable, degree: d });
        }
        let bad = (1..=d)
            .filter(|&l| v.apply(h.apply(l)) != h.apply(v.apply(l)))
            .collect();
        let cycle_modulus = h.cycle_lcm();
        Ok(Surface { d, h, v, bad, cycle_modulus })
    }

    /// Convenience: build from cycle notation.
    pub fn from_cycle_strings(h: &str, v: &str, d: usize) -> Result<Surface, SurfaceError> {
        Surface::build(
            Permutation::from_cycles(h, d)?,
            Permutation::from_cycles(v, d)?,
        )
    }

    /// The one-square torus.
    pub fn torus() -> Surface {
        Surface::build(Permutation::identity(1), Permutation::identity(1)).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn h(&self) -> &Permutation {
        &self.h
    }

    pub fn v(&self) -> &Permutation {
        &self.v
    }

    /// lcm of the cycle lengths of `h`.
    pub fn cycle_modulus(&self) -> usize {
        self.cycle_modulus
    }

    /// Squares whose upper-right corner is a conical singularity.
    pub fn bad_squares(&self) -> &BTreeSet<usize> {
        &self.bad
    }

    pub fn is_bad(&self, square: usize) -> bool {
        self.bad.contains(&square)
    }

    /// Partition of the labels into (good, bad).
    pub fn classify_squares(&self) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let good = (1..=self.d).filter(|l| !self.bad.contains(l)).collect();
        (good, self.bad.clone())
    }

    /// The square entered when leaving `square` across an edge of the given
    /// kind: `h(square)` for `H`, `v(square)` for `V`.
    pub fn act(&self, edge: EdgeLetter, square: usize) -> usize {
        match edge {
            EdgeLetter::H => self.h.apply(square),
            EdgeLetter::V => self.v.apply(square),
        }
    }

    /// `vh(λ)`: the square diagonally up-right across a good corner.
    pub fn diag(&self, square: usize) -> usize {
        self.v.apply(self.h.apply(square))
    }

    /// `(vh)⁻¹(λ)`: the square diagonally down-left across a good corner.
    pub fn diag_inverse(&self, square: usize) -> usize {
        self.h.inverse().apply(self.v.inverse().apply(square))
    }

    /// The surface whose NE geodesics model this surface's geodesics in the
    /// given quadrant: `NW ↦ (h⁻¹, v)`, `SE ↦ (h, v⁻¹)`, `SW ↦ (h⁻¹, v⁻¹)`.
    pub fn quadrant_transform(&self, q: Quadrant) -> Surface {
        let (h, v) = match q {
            Quadrant::NE => (self.h.clone(), self.v.clone()),
            Quadrant::NW => (self.h.inverse(), self.v.clone()),
            Quadrant::SE => (self.h.clone(), self.v.inverse()),
            Quadrant::SW => (self.h.inverse(), self.v.inverse()),
        };
        Surface::build(h, v).expect("quadrant transform preserves connectivity")
    }

    /// Parses the surface file grammar: optional `d = <int>` line, `h = <cycles>`
    /// and `v = <cycles>` lines, `#` comments. When `d` is absent it is
    /// inferred as the largest label mentioned.
    pub fn parse(text: &str) -> Result<Surface, SurfaceError> {
        let mut d: Option<usize> = None;
        let mut h_text: Option<String> = None;
        let mut v_text: Option<String> = None;
        for raw_line in text.lines() {
            let line = match raw_line.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw_line.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SurfaceError::Parse(line.to_string()));
            };
            let value = value.trim();
            match key.trim() {
                "d" => {
                    d = Some(
                        value
                            .parse()
                            .map_err(|_| SurfaceError::Parse(line.to_string()))?,
                    )
                }
                "h" => h_text = Some(value.to_string()),
                "v" => v_text = Some(value.to_string()),
                _ => return Err(SurfaceError::Parse(line.to_string())),
            }
        }
        let h_text = h_text.ok_or_else(|| SurfaceError::Parse("missing h".to_string()))?;
        let v_text = v_text.ok_or_else(|| SurfaceError::Parse("missing v".to_string()))?;
        let d = match d {
            Some(d) => d,
            None => {
                let max_label = |s: &str| {
                    s.split(|c: char| !c.is_ascii_digit())
                        .filter(|t| !t.is_empty())
                        .filter_map(|t| t.parse::<usize>().ok())
                        .max()
                        .unwrap_or(1)
                };
                max_label(&h_text).max(max_label(&v_text))
            }
        };
        Surface::from_cycle_strings(&h_text, &v_text, d)
    }

    /// Renders in the file grammar accepted by [`Surface::parse`].
    pub fn render(&self) -> String {
        alloc::format!(
            "d = {}\nh = {}\nv = {}\n",
            self.d,
            self.h.to_cycle_string(),
            self.v.to_cycle_string()
        )
    }
}

/// Reference surfaces shared by unit tests across the crate.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::Surface;

    /// Six squares, two horizontal cylinders; good squares are 3 and 5.
    pub(crate) fn six_square() -> Surface {
        Surface::from_cycle_strings("(1)(2 3 4)(5 6)", "(1 2)(3 5)(4 6)", 6).unwrap()
    }

    /// The three-square L: every square is bad.
    pub(crate) fn l_surface() -> Surface {
        Surface::from_cycle_strings("(1)(2 3)", "(1 2)(3)", 3).unwrap()
    }
}
