//! Exact geodesic tracer: the ground truth that everything else is checked
//! against.
//!
//! The tracer works square-locally. A state is a square label plus exact
//! coordinates in the closed unit square; one step moves to the next edge
//! crossing by comparing `m(1−x)` with `1−y`. Equality means the trajectory
//! passes through the upper-right corner of the current square: a good
//! square lets it continue into `vh(λ)`, a bad square is a conical
//! singularity and the flow ends there. No floating point, no tolerances —
//! corner hits are exact rational/quadratic coincidences.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::algebra::{QuadError, QuadNum};
use crate::surface::{CutSym, EdgeLetter, Quadrant, Surface};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    SlopeNotPositive,
    StartOutsideSquare,
    BadLabel { label: usize, degree: usize },
    Quad(QuadError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SlopeNotPositive => write!(f, "tracer requires a positive slope"),
            OracleError::StartOutsideSquare => {
                write!(f, "start point lies outside the closed unit square")
            }
            OracleError::BadLabel { label, degree } => {
                write!(f, "square label {label} out of range 1..={degree}")
            }
            OracleError::Quad(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

impl From<QuadError> for OracleError {
    fn from(e: QuadError) -> OracleError {
        OracleError::Quad(e)
    }
}

/// Which symbol of the two-symbol corner record comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerConvention {
    HV,
    VH,
}

impl CornerConvention {
    pub fn opposite(self) -> CornerConvention {
        match self {
            CornerConvention::HV => CornerConvention::VH,
            CornerConvention::VH => CornerConvention::HV,
        }
    }
}

/// A point of the flow: exact coordinates inside (or on the boundary of)
/// the unit square carrying the given label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoState {
    pub square: usize,
    pub x: QuadNum,
    pub y: QuadNum,
}

impl GeoState {
    pub fn new(square: usize, x: QuadNum, y: QuadNum) -> GeoState {
        GeoState { square, x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOutcome {
    RanToLength,
    SingularityHit,
}

/// A finite cutting-sequence window produced by the tracer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub symbols: Vec<CutSym>,
    pub outcome: TraceOutcome,
    /// The square whose upper-right corner was struck, when singular.
    pub hit_square: Option<usize>,
    /// Where the trace stopped, when not singular.
    pub final_state: Option<GeoState>,
}

/// One crossing event of the flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepEvent {
    /// Crossed the right edge into `state.square = h(λ)`.
    Right { state: GeoState },
    /// Crossed the top edge into `state.square = v(λ)`.
    Top { state: GeoState },
    /// Hit the upper-right corner of `square` exactly; `continued` is the
    /// state in `vh(square)` for a good square and `None` for a bad one.
    Corner { square: usize, continued: Option<GeoState> },
}

/// Exact slope-`m` flow on a fixed surface.
pub struct Tracer<'a> {
    surface: &'a Surface,
    m: QuadNum,
    m_inv: QuadNum,
}

impl<'a> Tracer<'a> {
    pub fn new(surface: &'a Surface, m: &QuadNum) -> Result<Tracer<'a>, OracleError> {
        if m.sign() <= 0 {
            return Err(OracleError::SlopeNotPositive);
        }
        Ok(Tracer { surface, m: m.clone(), m_inv: m.recip()? })
    }

    pub fn surface(&self) -> &Surface {
        self.surface
    }

    fn check_state(&self, st: &GeoState) -> Result<(), OracleError> {
        let d = self.surface.degree();
        if st.square < 1 || st.square > d {
            return Err(OracleError::BadLabel { label: st.square, degree: d });
        }
        let zero = QuadNum::zero();
        let one = QuadNum::one();
        for c in [&st.x, &st.y] {
            if c.try_cmp(&zero)? == Ordering::Less || c.try_cmp(&one)? == Ordering::Greater {
                return Err(OracleError::StartOutsideSquare);
            }
        }
        Ok(())
    }

    /// Advances to the next edge crossing. Requires `0 ≤ x < 1`, `0 ≤ y < 1`.
    pub fn step(&self, st: &GeoState) -> Result<StepEvent, OracleError> {
        let one = QuadNum::one();
        let rise = self.m.try_mul(&one.try_sub(&st.x)?)?;
        let remaining = one.try_sub(&st.y)?;
        match rise.try_cmp(&remaining)? {
            Ordering::Less => {
                let state = GeoState::new(
                    self.surface.h().apply(st.square),
                    QuadNum::zero(),
                    st.y.try_add(&rise)?,
                );
                Ok(StepEvent::Right { state })
            }
            Ordering::Greater => {
                let run = remaining.try_mul(&self.m_inv)?;
                let state = GeoState::new(
                    self.surface.v().apply(st.square),
                    st.x.try_add(&run)?,
                    QuadNum::zero(),
                );
                Ok(StepEvent::Top { state })
            }
            Ordering::Equal => {
                let square = st.square;
                let continued = if self.surface.is_bad(square) {
                    None
                } else {
                    Some(GeoState::new(
                        self.surface.diag(square),
                        QuadNum::zero(),
                        QuadNum::zero(),
                    ))
                };
                Ok(StepEvent::Corner { square, continued })
            }
        }
    }

    fn corner_pair(&self, square: usize, conv: CornerConvention) -> [CutSym; 2] {
        let h = self.surface.h().apply(square);
        let v = self.surface.v().apply(square);
        match conv {
            CornerConvention::HV => [
                CutSym::new(h, EdgeLetter::H),
                CutSym::new(self.surface.v().apply(h), EdgeLetter::V),
            ],
            CornerConvention::VH => [
                CutSym::new(v, EdgeLetter::V),
                CutSym::new(self.surface.h().apply(v), EdgeLetter::H),
            ],
        }
    }

    /// Brings a boundary start point into `[0,1) × [0,1)`, recording the
    /// crossings the point sits on. Starting on the bottom edge of λ is the
    /// crossing `(λ,V)`, on the left edge `(λ,H)`; the lower-left corner is
    /// an arrival through the upper-right corner of `β = (vh)⁻¹(λ)` and
    /// yields the two-symbol record unless β is bad (then the trajectory
    /// emanates from the singularity and nothing was crossed).
    fn normalize_start(
        &self,
        st: GeoState,
        conv: CornerConvention,
    ) -> Result<StartNorm, OracleError> {
        self.check_state(&st)?;
        let one = QuadNum::one();
        let zero = QuadNum::zero();
        let x_is_one = st.x == one;
        let y_is_one = st.y == one;
        let mut state = st;
        if x_is_one && y_is_one {
            // The upper-right corner of the start square itself.
            if self.surface.is_bad(state.square) {
                return Ok(StartNorm::Singular { square: state.square });
            }
            let pair = self.corner_pair(state.square, conv);
            let state = GeoState::new(self.surface.diag(state.square), zero.clone(), zero);
            return Ok(StartNorm::Ready { symbols: alloc::vec![pair[0], pair[1]], state });
        }
        let mut symbols = Vec::new();
        if x_is_one {
            state = GeoState::new(self.surface.h().apply(state.square), zero.clone(), state.y);
            symbols.push(CutSym::new(state.square, EdgeLetter::H));
            if state.y == zero {
                // Landed on the lower-left corner of h(λ); fall through.
                symbols.clear();
            } else {
                return Ok(StartNorm::Ready { symbols, state });
            }
        } else if y_is_one {
            state = GeoState::new(self.surface.v().apply(state.square), state.x, zero.clone());
            symbols.push(CutSym::new(state.square, EdgeLetter::V));
            if state.x == zero {
                symbols.clear();
            } else {
                return Ok(StartNorm::Ready { symbols, state });
            }
        }
        let x_zero = state.x == zero;
        let y_zero = state.y == zero;
        if x_zero && y_zero {
            let beta = self.surface.diag_inverse(state.square);
            if !self.surface.is_bad(beta) {
                let pair = self.corner_pair(beta, conv);
                symbols.push(pair[0]);
                symbols.push(pair[1]);
            }
        } else if x_zero {
            symbols.push(CutSym::new(state.square, EdgeLetter::H));
        } else if y_zero {
            symbols.push(CutSym::new(state.square, EdgeLetter::V));
        }
        Ok(StartNorm::Ready { symbols, state })
    }
}

// One short-lived value per trace; the size gap between variants is moot.
#[allow(clippy::large_enum_variant)]
enum StartNorm {
    Singular { square: usize },
    Ready { symbols: Vec<CutSym>, state: GeoState },
}

/// Traces `n` symbols of the forward (north-east) flow from `start`,
/// including the crossings the start point itself sits on. A two-symbol
/// corner record is never split, so the result may hold `n + 1` symbols.
pub fn trace(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    n: usize,
    conv: CornerConvention,
) -> Result<TraceResult, OracleError> {
    trace_impl(surface, m, start, n, conv, true)
}

fn trace_impl(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    n: usize,
    conv: CornerConvention,
    emit_start: bool,
) -> Result<TraceResult, OracleError> {
    let tracer = Tracer::new(surface, m)?;
    let (mut symbols, mut state) = match tracer.normalize_start(start, conv)? {
        StartNorm::Singular { square } => {
            return Ok(TraceResult {
                symbols: Vec::new(),
                outcome: TraceOutcome::SingularityHit,
                hit_square: Some(square),
                final_state: None,
            });
        }
        StartNorm::Ready { symbols, state } => {
            (if emit_start { symbols } else { Vec::new() }, state)
        }
    };
    while symbols.len() < n {
        match tracer.step(&state)? {
            StepEvent::Right { state: next } => {
                symbols.push(CutSym::new(next.square, EdgeLetter::H));
                state = next;
            }
            StepEvent::Top { state: next } => {
                symbols.push(CutSym::new(next.square, EdgeLetter::V));
                state = next;
            }
            StepEvent::Corner { square, continued } => match continued {
                Some(next) => {
                    let pair = tracer.corner_pair(square, conv);
                    symbols.push(pair[0]);
                    symbols.push(pair[1]);
                    state = next;
                }
                None => {
                    return Ok(TraceResult {
                        symbols,
                        outcome: TraceOutcome::SingularityHit,
                        hit_square: Some(square),
                        final_state: None,
                    });
                }
            },
        }
    }
    Ok(TraceResult {
        symbols,
        outcome: TraceOutcome::RanToLength,
        hit_square: None,
        final_state: Some(state),
    })
}

/// Traces `n` symbols of the flow **into** `start` (the past of the
/// trajectory), returned in forward reading order. The crossing at the
/// start point itself is not included — a bidirectional window is
/// `backward_trace ++ trace` with no overlap.
///
/// Implemented as a forward trace on the south-west quadrant transform from
/// `(1−x, 1−y)`, with the opposite corner convention and each emitted
/// square pushed forward through the crossed edge. A singular outcome means
/// the past flow line emanates from that singularity; `hit_square` is the
/// struck square of the original surface.
pub fn backward_trace(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    n: usize,
    conv: CornerConvention,
) -> Result<TraceResult, OracleError> {
    let sw = surface.quadrant_transform(Quadrant::SW);
    let one = QuadNum::one();
    let sw_start = GeoState::new(
        start.square,
        one.try_sub(&start.x)?,
        one.try_sub(&start.y)?,
    );
    let raw = trace_impl(&sw, m, sw_start, n, conv.opposite(), false)?;
    let mut symbols: Vec<CutSym> = raw
        .symbols
        .into_iter()
        .map(|sym| match sym.edge {
            EdgeLetter::H => CutSym::new(surface.h().apply(sym.square), EdgeLetter::H),
            EdgeLetter::V => CutSym::new(surface.v().apply(sym.square), EdgeLetter::V),
        })
        .collect();
    symbols.reverse();
    let hit_square = raw.hit_square.map(|sq| surface.diag_inverse(sq));
    let final_state = raw.final_state.map(|st| {
        GeoState::new(
            st.square,
            (&one - &st.x).clone(),
            (&one - &st.y).clone(),
        )
    });
    Ok(TraceResult { symbols, outcome: raw.outcome, hit_square, final_state })
}

/// A window assembled around a point: `n_back` past symbols, then the
/// forward trace with its start crossings at ambient index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidiTrace {
    pub symbols: Vec<CutSym>,
    pub origin_index: i64,
    pub backward_outcome: TraceOutcome,
    pub forward_outcome: TraceOutcome,
}

pub fn bidirectional_trace(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    n_back: usize,
    n_fwd: usize,
    conv: CornerConvention,
) -> Result<BidiTrace, OracleError> {
    let back = backward_trace(surface, m, start.clone(), n_back, conv)?;
    let fwd = trace(surface, m, start, n_fwd, conv)?;
    let origin_index = -(back.symbols.len() as i64);
    let mut symbols = back.symbols;
    symbols.extend_from_slice(&fwd.symbols);
    Ok(BidiTrace {
        symbols,
        origin_index,
        backward_outcome: back.outcome,
        forward_outcome: fwd.outcome,
    })
}

/// Landing of the first-return construction of the skew product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstReturn {
    Landed(crate::iet::SkewState),
    Singular { square: usize },
}

/// Follows the flow from `(x0, 0)` in `λ0` until it next lands on the
/// bottom edge of some square, and reports the landing. This is the
/// geometric definition that the skew product must reproduce.
pub fn first_return_oracle(
    surface: &Surface,
    m: &QuadNum,
    x0: &QuadNum,
    lambda0: usize,
) -> Result<FirstReturn, OracleError> {
    let tracer = Tracer::new(surface, m)?;
    let mut state = GeoState::new(lambda0, x0.clone(), QuadNum::zero());
    tracer.check_state(&state)?;
    if state.x == QuadNum::one() {
        return Err(OracleError::StartOutsideSquare);
    }
    loop {
        match tracer.step(&state)? {
            StepEvent::Right { state: next } => state = next,
            StepEvent::Top { state: next } => {
                return Ok(FirstReturn::Landed(crate::iet::SkewState::new(
                    next.x.clone(),
                    next.square,
                )));
            }
            StepEvent::Corner { square, continued } => {
                return match continued {
                    Some(next) => Ok(FirstReturn::Landed(crate::iet::SkewState::new(
                        next.x.clone(),
                        next.square,
                    ))),
                    None => Ok(FirstReturn::Singular { square }),
                };
            }
        }
    }
}

/// Result of running the flow until it meets a corner exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerHit {
    /// The square whose upper-right corner is met.
    pub square: usize,
    /// Crossings strictly before the hit.
    pub crossings: usize,
}

/// Runs the flow forward until the first exact corner coincidence, good or
/// bad, up to `max_crossings` edge crossings. Intended for callers that
/// already know a hit exists (the parametric decision procedure certifies
/// one before tracing).
pub fn trace_to_corner(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    max_crossings: usize,
) -> Result<Option<CornerHit>, OracleError> {
    let tracer = Tracer::new(surface, m)?;
    let mut state = start;
    tracer.check_state(&state)?;
    let one = QuadNum::one();
    if state.x == one && state.y == one {
        return Ok(Some(CornerHit { square: state.square, crossings: 0 }));
    }
    if state.x == one {
        state = GeoState::new(surface.h().apply(state.square), QuadNum::zero(), state.y);
    }
    if state.y == one {
        state = GeoState::new(surface.v().apply(state.square), state.x, QuadNum::zero());
    }
    let mut crossings = 0usize;
    while crossings < max_crossings {
        match tracer.step(&state)? {
            StepEvent::Right { state: next } | StepEvent::Top { state: next } => {
                state = next;
                crossings += 1;
            }
            StepEvent::Corner { square, .. } => {
                return Ok(Some(CornerHit { square, crossings }));
            }
        }
    }
    Ok(None)
}

/// One straight run across a single square: entry point to exit point, in
/// that square's own coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub square: usize,
    pub from: (QuadNum, QuadNum),
    pub to: (QuadNum, QuadNum),
}

/// Exact per-square segments of the forward flow, for external plotters.
/// Stops after `max_segments` squares or at a singularity, whichever comes
/// first.
pub fn trace_segments(
    surface: &Surface,
    m: &QuadNum,
    start: GeoState,
    max_segments: usize,
) -> Result<(Vec<Segment>, TraceOutcome), OracleError> {
    let tracer = Tracer::new(surface, m)?;
    let mut state = match tracer.normalize_start(start, CornerConvention::HV)? {
        StartNorm::Singular { .. } => return Ok((Vec::new(), TraceOutcome::SingularityHit)),
        StartNorm::Ready { state, .. } => state,
    };
    let one = QuadNum::one();
    let mut segments = Vec::new();
    while segments.len() < max_segments {
        let (to, next) = match tracer.step(&state)? {
            StepEvent::Right { state: next } => ((one.clone(), next.y.clone()), Some(next)),
            StepEvent::Top { state: next } => ((next.x.clone(), one.clone()), Some(next)),
            StepEvent::Corner { continued, .. } => ((one.clone(), one.clone()), continued),
        };
        segments.push(Segment {
            square: state.square,
            from: (state.x.clone(), state.y.clone()),
            to,
        });
        match next {
            Some(n) => state = n,
            None => return Ok((segments, TraceOutcome::SingularityHit)),
        }
    }
    Ok((segments, TraceOutcome::RanToLength))
}
