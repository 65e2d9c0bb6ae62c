//! Exact models of square-tiled translation surfaces and the symbolic
//! sequences their geodesics cut out.
//!
//! A square-tiled surface is described by a pair of permutations `(h, v)` of
//! the squares `1..=d`: the right edge of square `λ` is glued to the left edge
//! of `h(λ)`, the top edge to the bottom edge of `v(λ)`. Geodesics of positive
//! slope cross the glued edges and spell out sequences of `(square, edge)`
//! symbols. This crate provides:
//!
//! * exact arithmetic over `ℚ` and real quadratic fields ([`algebra`]),
//! * the surface combinatorics ([`surface`]),
//! * Sturmian machinery for the torus edge words ([`torusword`]),
//! * interval exchange transformations, the vertical skew product and its
//!   conjugate ([`iet`]),
//! * the two-out directed graphs that carry admissible label walks
//!   ([`gamma`]),
//! * window validators and the full recognition procedure
//!   ([`characterize`]),
//! * an independent geodesic-tracing oracle ([`oracle`]).
//!
//! Everything is computed with arbitrary-precision integers; there is no
//! floating point on any decision path. The crate is `no_std`-compatible
//! (requires `alloc`); the default `std` feature only adds conveniences such
//! as `std::error::Error` impls and `f64` previews.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod characterize;
pub mod gamma;
pub mod iet;
pub mod oracle;
pub mod surface;
pub mod torusword;

pub use algebra::{Permutation, QuadNum, Rational};
pub use characterize::{LabeledSeq, Verdict, VerdictKind, Walk};
pub use gamma::GammaGraph;
pub use iet::{IetSpec, SkewState};
pub use oracle::{TraceOutcome, TraceResult};
pub use surface::{CutSym, EdgeLetter, Quadrant, Surface};
pub use torusword::{EWord, SlopeParams, SymmetryKind};
