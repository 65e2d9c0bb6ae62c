//! Fixtures and generators shared by the integration test targets.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use cutseq_core::algebra::{rational, Permutation, QuadNum};
use cutseq_core::surface::Surface;

/// Six squares, two horizontal cylinders; squares 3 and 5 are good.
pub fn six_square() -> Surface {
    Surface::from_cycle_strings("(1)(2 3 4)(5 6)", "(1 2)(3 5)(4 6)", 6).unwrap()
}

/// The three-square L; every square is bad.
pub fn l_surface() -> Surface {
    Surface::from_cycle_strings("(1)(2 3)", "(1 2)(3)", 3).unwrap()
}

/// `(−1+√5)/2 ≈ 0.618`, the inverse golden ratio.
pub fn golden() -> QuadNum {
    QuadNum::new(rational(-1, 2), rational(1, 2), 5)
}

/// The slope `1/(m + golden)`, whose reciprocal has integer part `m` and
/// fractional part `golden`.
pub fn golden_slope(m: usize) -> QuadNum {
    QuadNum::from_int(m as i64)
        .try_add(&golden())
        .unwrap()
        .recip()
        .unwrap()
}

/// A uniformly random permutation of `1..=d`.
pub fn random_permutation(rng: &mut ChaCha8Rng, d: usize) -> Permutation {
    let mut img: Vec<usize> = (1..=d).collect();
    img.shuffle(rng);
    Permutation::from_images(img).unwrap()
}

/// Rejection-samples a connected surface on `d` squares.
pub fn random_transitive_surface(rng: &mut ChaCha8Rng, d: usize) -> Surface {
    loop {
        let h = random_permutation(rng, d);
        let v = random_permutation(rng, d);
        if let Ok(s) = Surface::build(h, v) {
            return s;
        }
    }
}

/// A random exact point of `[0, 1)` with prime denominator 997. Such points
/// never put a quadratic-slope trajectory through a vertex, and rational
/// slopes `p/q` with `p, q < 997` cannot reach one either.
pub fn random_unit_997(rng: &mut ChaCha8Rng) -> QuadNum {
    QuadNum::from_rational(rational(rng.gen_range(0..997), 997))
}
