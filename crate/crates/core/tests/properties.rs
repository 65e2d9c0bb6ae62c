//! Cross-module property tests: algebra laws, surface combinatorics, the
//! skew-product/IET conjugacy, graph connectivity under derivation, and
//! soundness of the window battery on oracle-generated data.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    golden, golden_slope, l_surface, random_permutation, random_transitive_surface, six_square,
};
use cutseq_core::algebra::{rational, QuadNum};
use cutseq_core::characterize::{
    check_consistent, combinatorial_lift, contract, decide_window, expand, LabeledSeq,
    VerdictKind,
};
use cutseq_core::gamma::{derive_graph, fz_check, BlockType, GammaGraph, LR};
use cutseq_core::iet::{IetSpec, SkewProduct, SkewState};
use cutseq_core::oracle::{
    bidirectional_trace, first_return_oracle, trace, CornerConvention, FirstReturn, GeoState,
    StepEvent, Tracer, TraceOutcome,
};
use cutseq_core::surface::{EdgeLetter, Quadrant, Surface};
use cutseq_core::torusword::{slope_params, SymmetryKind};
use cutseq_core::EWord;

/// Dropping a handful of symbols from either end realigns a window whose
/// mirror arms came out uneven; certification must be reachable within that
/// slack if the symmetry genuinely survived.
fn some_trim_certifies_almost(w: &EWord) -> bool {
    let letters = w.letters();
    for front in 0..4 {
        for back in 0..4 {
            if letters.len() < front + back + 8 {
                continue;
            }
            let trimmed = EWord::new(letters[front..letters.len() - back].to_vec(), 0);
            if trimmed.classify_symmetry().kind == SymmetryKind::Almost {
                return true;
            }
        }
    }
    false
}

/// An almost symmetric window stays almost symmetric under derivation when
/// the seam survives the discarded boundary blocks. The discards need not be
/// balanced across the seam, so the derived window may need a small end trim
/// before the mirror arms line up again.
#[test]
fn almost_symmetry_survives_derivation() {
    let s = Surface::torus();
    let m = golden();
    let start = GeoState::new(1, QuadNum::zero(), QuadNum::zero());
    let bidi = bidirectional_trace(&s, &m, start, 60, 61, CornerConvention::HV).unwrap();
    let seq = LabeledSeq::new(bidi.symbols, bidi.origin_index).unwrap();
    let eps = seq.eps();
    let verdict = eps.classify_symmetry();
    assert_eq!(verdict.kind, SymmetryKind::Almost);
    let derived = eps.derive_once().unwrap();
    assert!(some_trim_certifies_almost(&derived));
    let twice = derived.derive_once().unwrap();
    assert!(some_trim_certifies_almost(&twice));
}

/// The quotients read back from an oracle window are those of the slope
/// reciprocal's continued fraction.
#[test]
fn recovered_quotients_match_the_slope() {
    let s = Surface::torus();
    let start = |x, y| GeoState::new(1, QuadNum::from_rational(x), QuadNum::from_rational(y));
    // 1/golden = [1; 1, 1, …]
    let w = trace(&s, &golden(), start(rational(1, 7), rational(1, 11)), 4000,
        CornerConvention::HV)
        .unwrap();
    let eps = LabeledSeq::new(w.symbols, 0).unwrap().eps();
    assert_eq!(eps.recover_cf(5).unwrap(), vec![1, 1, 1, 1, 1]);
    // 1/(1/(2+golden)) = [2; 1, 1, …]
    let w = trace(&s, &golden_slope(2), start(rational(1, 7), rational(1, 11)), 4000,
        CornerConvention::HV)
        .unwrap();
    let eps = LabeledSeq::new(w.symbols, 0).unwrap().eps();
    assert_eq!(eps.recover_cf(4).unwrap(), vec![2, 1, 1, 1]);
}

proptest! {
    /// The exact order is a total order consistent with `f64` previews away
    /// from ties, with addition, and with multiplication by positives.
    #[test]
    fn quad_order_agrees_with_float_previews(
        xr in -50i64..=50, xrd in 1i64..=40,
        xs in -50i64..=50, xsd in 1i64..=40,
        yr in -50i64..=50, yrd in 1i64..=40,
        ys in -50i64..=50, ysd in 1i64..=40,
        n in 2u64..=10,
    ) {
        let x = QuadNum::new(rational(xr, xrd), rational(xs, xsd), n);
        let y = QuadNum::new(rational(yr, yrd), rational(ys, ysd), n);
        let ord = x.try_cmp(&y).unwrap();
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-6 {
            prop_assert_eq!(ord, fx.partial_cmp(&fy).unwrap());
        }
        let t = QuadNum::new(rational(yr, xrd), rational(xs, ysd), n);
        prop_assert_eq!(
            x.try_add(&t).unwrap().try_cmp(&y.try_add(&t).unwrap()).unwrap(),
            ord
        );
        let p = QuadNum::new(rational(xrd, 3), rational(ysd, 5), n);
        prop_assert_eq!(
            x.try_mul(&p).unwrap().try_cmp(&y.try_mul(&p).unwrap()).unwrap(),
            ord
        );
        // A constructed tie stays a tie.
        let same = x.try_add(&QuadNum::zero()).unwrap();
        prop_assert_eq!(x.try_cmp(&same).unwrap(), core::cmp::Ordering::Equal);
    }
}

proptest! {
    /// Composition applies the right factor first, is associative, cancels
    /// against the inverse, and `cycle_lcm` is the exact group order.
    #[test]
    fn permutation_algebra_laws(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_permutation(&mut rng, d);
        let q = random_permutation(&mut rng, d);
        let r = random_permutation(&mut rng, d);
        let left = p.compose(&q).compose(&r);
        let right = p.compose(&q.compose(&r));
        for l in 1..=d {
            prop_assert_eq!(left.apply(l), right.apply(l));
            prop_assert_eq!(p.compose(&q).apply(l), p.apply(q.apply(l)));
            prop_assert_eq!(p.compose(&p.inverse()).apply(l), l);
        }
        let (a, b) = (rng.gen_range(0..6), rng.gen_range(0..6));
        let pow_sum = p.pow(a + b);
        for l in 1..=d {
            prop_assert_eq!(pow_sum.apply(l), p.pow(a).apply(p.pow(b).apply(l)));
        }
        let ord = p.cycle_lcm();
        let full = p.pow(ord);
        for l in 1..=d {
            prop_assert_eq!(full.apply(l), l);
        }
        for e in 1..ord {
            let pe = p.pow(e);
            prop_assert!((1..=d).any(|l| pe.apply(l) != l));
        }
    }
}

proptest! {
    /// Good/bad squares partition the labels, the file grammar round-trips,
    /// quadrant transforms are involutions, and the tracer's corner
    /// bookkeeping agrees with the commutator rule square by square.
    #[test]
    fn surface_combinatorics(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_transitive_surface(&mut rng, d);
        let (good, bad) = s.classify_squares();
        prop_assert!(good.is_disjoint(&bad));
        prop_assert_eq!(good.len() + bad.len(), d);
        prop_assert_eq!(Surface::parse(&s.render()).unwrap(), s.clone());
        for q in [Quadrant::NW, Quadrant::SE, Quadrant::SW] {
            prop_assert_eq!(s.quadrant_transform(q).quadrant_transform(q), s.clone());
        }
        // The slope-1 diagonal from the center of any square runs exactly
        // into its upper-right corner; the tracer must stop there iff the
        // commutator rule marks the square bad.
        let tracer = Tracer::new(&s, &QuadNum::one()).unwrap();
        let half = QuadNum::from_rational(rational(1, 2));
        for sq in 1..=d {
            match tracer.step(&GeoState::new(sq, half.clone(), half.clone())).unwrap() {
                StepEvent::Corner { square, continued } => {
                    prop_assert_eq!(square, sq);
                    prop_assert_eq!(continued.is_none(), s.is_bad(sq));
                    if let Some(next) = continued {
                        prop_assert_eq!(next.square, s.diag(sq));
                    }
                }
                other => prop_assert!(false, "expected a corner event, got {other:?}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    /// Γ^M is strongly connected for every M on every connected surface, its
    /// R-map is `v∘h∘v⁻¹` after the L-map, and word derivation preserves the
    /// vertex count, the two-out permutation structure, and connectivity.
    #[test]
    fn gamma_graphs_survive_derivation(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_transitive_surface(&mut rng, d);
        let vhv = s.v().compose(s.h()).compose(&s.v().inverse());
        for m in 0..s.cycle_modulus() {
            let g = GammaGraph::build(&s, m).unwrap();
            prop_assert!(g.is_strongly_connected());
            for sq in 1..=d {
                prop_assert_eq!(g.r_map().apply(sq), vhv.apply(g.l_map().apply(sq)));
            }
            let avoided = (
                rng.gen_range(1..=d),
                if rng.gen::<bool>() { LR::L } else { LR::R },
            );
            let block = if rng.gen::<bool>() {
                BlockType::SigmaIsolated { m: rng.gen_range(0..4) }
            } else {
                BlockType::TauIsolated
            };
            let derived = derive_graph(&g, avoided, block).unwrap();
            prop_assert_eq!(derived.degree(), g.degree());
            prop_assert!(derived.is_strongly_connected());
            prop_assert!(derived.bad_edges().is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    /// The geometric first-return map agrees with the skew product exactly,
    /// for rational and quadratic slopes alike.
    #[test]
    fn first_return_agrees_with_skew_step(
        seed in any::<u64>(),
        j in 1i64..997,
        which in 0usize..6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = match which % 3 {
            0 => six_square(),
            1 => l_surface(),
            _ => Surface::torus(),
        };
        let m = if which < 3 {
            golden_slope(rng.gen_range(0..4))
        } else {
            let (p, q) = [(2i64, 5i64), (5, 12), (3, 7)][rng.gen_range(0..3)];
            QuadNum::from_rational(rational(p, q))
        };
        let params = slope_params(&m, s.cycle_modulus()).unwrap();
        let skew = SkewProduct::new(&s, &params).unwrap();
        let x0 = QuadNum::from_rational(rational(j, 997));
        let l0 = rng.gen_range(1..=s.degree());
        let landed = skew.step(&SkewState::new(x0.clone(), l0)).unwrap();
        prop_assert_eq!(
            first_return_oracle(&s, &m, &x0, l0).unwrap(),
            FirstReturn::Landed(landed)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    /// The conjugacy `φ(x, λ) = x + λ − 1` intertwines the skew product with
    /// its interval exchange on random connected surfaces; the IET's lengths
    /// partition `[0, d)` and applying it is invertible.
    #[test]
    fn conjugacy_intertwines_skew_and_iet(
        seed in any::<u64>(),
        d in 2usize..=8,
        j in 0i64..997,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_transitive_surface(&mut rng, d);
        let m = if rng.gen::<bool>() {
            golden_slope(rng.gen_range(0..3))
        } else {
            let (p, q) = [(2i64, 5i64), (5, 12), (3, 7), (4, 9)][rng.gen_range(0..4)];
            QuadNum::from_rational(rational(p, q))
        };
        let params = slope_params(&m, s.cycle_modulus()).unwrap();
        let skew = SkewProduct::new(&s, &params).unwrap();
        let iet = IetSpec::conjugate_of(&s, &params).unwrap();
        let mut sum = QuadNum::zero();
        for a in 0..iet.k() {
            sum = sum.try_add(iet.length(a)).unwrap();
        }
        prop_assert_eq!(&sum, iet.total());
        prop_assert_eq!(sum, QuadNum::from_int(d as i64));
        let mut state = SkewState::new(QuadNum::from_rational(rational(j, 997)), rng.gen_range(1..=d));
        let mut point = state
            .x
            .try_add(&QuadNum::from_int(state.square as i64 - 1))
            .unwrap();
        for _ in 0..8 {
            let previous = point.clone();
            state = skew.step(&state).unwrap();
            point = iet.apply(&point).unwrap();
            let image = state
                .x
                .try_add(&QuadNum::from_int(state.square as i64 - 1))
                .unwrap();
            prop_assert_eq!(&point, &image);
            prop_assert_eq!(iet.apply_inv(&point).unwrap(), previous);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    /// Two-orientedness of the conjugate IET language: observed words have at
    /// most two arrivals (π₁-adjacent) and two departures (π₀-adjacent), and
    /// cylinder lengths satisfy the shift-invariance identity on both sides.
    #[test]
    fn cylinders_are_two_oriented_and_additive(seed in any::<u64>(), j in 1i64..997) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = if rng.gen::<bool>() { six_square() } else { l_surface() };
        let m = golden_slope(rng.gen_range(0..3));
        let params = slope_params(&m, s.cycle_modulus()).unwrap();
        let iet = IetSpec::conjugate_of(&s, &params).unwrap();
        let square = rng.gen_range(1..=s.degree());
        let point = QuadNum::from_rational(rational(j, 997))
            .try_add(&QuadNum::from_int(square as i64 - 1))
            .unwrap();
        let itinerary = iet.itinerary(&point, 400).unwrap();
        let mut observed: BTreeSet<Vec<usize>> = BTreeSet::new();
        for len in 1..=4usize {
            for w in itinerary.windows(len) {
                observed.insert(w.to_vec());
            }
        }
        for w in &observed {
            let arr = iet.arrivals(w).unwrap();
            let dep = iet.departures(w).unwrap();
            prop_assert!(arr.len() <= 2, "arrivals of {w:?}: {arr:?}");
            prop_assert!(dep.len() <= 2, "departures of {w:?}: {dep:?}");
            if let [a, b] = arr[..] {
                prop_assert_eq!(iet.pi1(b), iet.pi1(a) + 1);
            }
            if let [a, b] = dep[..] {
                prop_assert_eq!(iet.pi0(b), iet.pi0(a) + 1);
            }
            let total = iet.cylinder_length(w).unwrap();
            let mut by_arrivals = QuadNum::zero();
            for a in arr {
                let mut ext = vec![a];
                ext.extend_from_slice(w);
                by_arrivals = by_arrivals
                    .try_add(&iet.cylinder_length(&ext).unwrap())
                    .unwrap();
            }
            prop_assert_eq!(&by_arrivals, &total);
            let mut by_departures = QuadNum::zero();
            for b in dep {
                let mut ext = w.clone();
                ext.push(b);
                by_departures = by_departures
                    .try_add(&iet.cylinder_length(&ext).unwrap())
                    .unwrap();
            }
            prop_assert_eq!(&by_departures, &total);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    /// Oracle windows are consistent lifts of balanced eps words, their
    /// contraction is an unambiguous balanced walk that passes the window
    /// battery, derivation keeps the eps balanced, and a window trimmed to
    /// end on a complete R block round-trips through contract/expand.
    #[test]
    fn oracle_windows_are_sound(
        seed in any::<u64>(),
        j in 1i64..997,
        mm in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = if rng.gen::<bool>() { six_square() } else { l_surface() };
        let m = golden_slope(mm);
        let params = slope_params(&m, s.cycle_modulus()).unwrap();
        let l0 = rng.gen_range(1..=s.degree());
        let start = GeoState::new(l0, QuadNum::from_rational(rational(j, 997)), QuadNum::zero());
        let result = trace(&s, &m, start, 160, CornerConvention::HV).unwrap();
        prop_assert_eq!(result.outcome, TraceOutcome::RanToLength);
        let seq = LabeledSeq::new(result.symbols.clone(), 0).unwrap();

        prop_assert!(!check_consistent(&seq, &s).is_refuted());
        let eps = seq.eps();
        prop_assert!(eps.is_balanced());
        for n in 1..=6 {
            prop_assert_eq!(eps.complexity(n), n + 1);
        }
        prop_assert!(eps.derive_once().unwrap().is_balanced());

        // A consistent window is exactly the lift of its eps word.
        let lifted = combinatorial_lift(&eps, seq.symbols()[0].square, &s).unwrap();
        prop_assert_eq!(lifted.symbols(), seq.symbols());

        // The refuting checks never fire on a genuine window.
        prop_assert_ne!(decide_window(&seq, &s).kind, VerdictKind::Reject);

        let walk = contract(&seq, &s).unwrap();
        prop_assert!(!walk.ambiguous);
        prop_assert_eq!(walk.m_observed, mm);
        let sigma = EWord::new(
            walk.symbols
                .iter()
                .map(|&(_, letter)| if letter == LR::L { EdgeLetter::H } else { EdgeLetter::V })
                .collect(),
            0,
        );
        prop_assert!(sigma.is_balanced());
        let graph = GammaGraph::build(&s, params.m_mod()).unwrap();
        for pair in walk.symbols.windows(2) {
            prop_assert_eq!(graph.step(pair[0].0, pair[0].1), pair[1].0);
        }
        prop_assert!(fz_check(&walk.symbols, &graph, 8).passed());

        // Trim to end right after a complete R block (an L block would be
        // indistinguishable from a truncated R block) and round-trip.
        let v_positions: Vec<usize> = result
            .symbols
            .iter()
            .enumerate()
            .filter(|(_, sym)| sym.edge == EdgeLetter::V)
            .map(|(i, _)| i)
            .collect();
        let r_gap = v_positions
            .windows(2)
            .rposition(|w| w[1] - w[0] == mm + 2)
            .expect("golden slopes see an R gap within two blocks");
        let end = v_positions[r_gap + 1];
        let trimmed = LabeledSeq::new(result.symbols[v_positions[0]..end].to_vec(), 0).unwrap();
        let trimmed_walk = contract(&trimmed, &s).unwrap();
        prop_assert!(!trimmed_walk.ambiguous);
        let expanded = expand(&trimmed_walk, trimmed_walk.m_observed, 0, &s).unwrap();
        prop_assert_eq!(expanded.symbols(), trimmed.symbols());
    }
}
