//! Decoder contracts, cross-validated against the independent brute-force
//! oracle: exact per-class optimal weights, defect cancellation, consistency
//! between the free and class-conditioned decoders, hidden-assignment
//! inference optimality, and the structural distance invariants that govern
//! the postselection floor.

mod common;

use std::sync::Arc;

use gapsel::circuits::dem::Mechanism;
use gapsel::circuits::Shot;
use gapsel::{
    repetition_cluster, surface_cluster, DecodeError, Decoder, DetectorErrorModel, MatchingGraph,
    ShotSampler,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn decoder_for(dem: &DetectorErrorModel) -> Decoder {
    Decoder::new(MatchingGraph::new(dem).unwrap())
}

/// Full defect list (visible and hidden detector ids), sorted.
fn full_defects(dem: &DetectorErrorModel, shot: &Shot) -> Vec<u32> {
    let mut out: Vec<u32> = dem
        .visible_ids()
        .iter()
        .zip(&shot.visible)
        .filter(|(_, &b)| b)
        .map(|(&i, _)| i)
        .collect();
    out.extend(
        dem.hidden_ids().iter().zip(&shot.hidden).filter(|(_, &b)| b).map(|(&i, _)| i),
    );
    out.sort_unstable();
    out
}

fn assert_weights_close(got: [f64; 2], want: [f64; 2], ctx: &str) {
    for l in 0..2 {
        match (got[l].is_finite(), want[l].is_finite()) {
            (false, false) => {}
            (true, true) => {
                let tol = 5e-5 * (1.0 + want[l].abs());
                assert!(
                    (got[l] - want[l]).abs() <= tol,
                    "{ctx}: class {l} weight {} vs oracle {}",
                    got[l],
                    want[l]
                );
            }
            _ => panic!("{ctx}: class {l} feasibility mismatch: {} vs {}", got[l], want[l]),
        }
    }
}

/// Shared harness: check one defect set against the oracle and the internal
/// consistency contracts, returning the oracle class weights.
fn check_defect_set(
    dec: &Decoder,
    tables: &common::OracleTables,
    defects: &[u32],
    ctx: &str,
) -> [f64; 2] {
    let udef: Vec<usize> = defects.iter().map(|&d| d as usize).collect();
    let want = common::oracle_class_weights(tables, &udef);
    let got = dec.class_weights(defects);
    assert_weights_close(got, want, ctx);

    // Free decode agrees with the best class.
    let best = want[0].min(want[1]);
    match dec.decode(defects) {
        Ok(c) => {
            assert!(
                (c.weight - best).abs() <= 5e-5 * (1.0 + best),
                "{ctx}: free decode weight {} vs best {}",
                c.weight,
                best
            );
            if (want[0] - want[1]).abs() > 1e-4 {
                assert_eq!(c.class, want[1] < want[0], "{ctx}: free decode picked wrong class");
            }
            assert_correction_cancels(dec, defects, &c.edges, c.class, c.weight, ctx);
        }
        Err(DecodeError::Unmatchable) => {
            assert!(best.is_infinite(), "{ctx}: decode unmatchable but oracle found {best}");
        }
        Err(e) => panic!("{ctx}: unexpected decode error {e}"),
    }

    // Conditioned decode reproduces each feasible class optimum exactly.
    for class in [false, true] {
        match dec.decode_conditioned(defects, class) {
            Ok(c) => {
                let w = want[class as usize];
                assert!(
                    w.is_finite() && (c.weight - w).abs() <= 5e-5 * (1.0 + w),
                    "{ctx}: conditioned({class}) weight {} vs oracle {}",
                    c.weight,
                    w
                );
                assert_eq!(c.class, class);
                assert_correction_cancels(dec, defects, &c.edges, c.class, c.weight, ctx);
            }
            Err(DecodeError::InfeasibleClass) => {
                assert!(
                    want[class as usize].is_infinite(),
                    "{ctx}: conditioned({class}) infeasible but oracle found {}",
                    want[class as usize]
                );
            }
            Err(e) => panic!("{ctx}: unexpected conditioned error {e}"),
        }
    }
    want
}

/// A correction must flip exactly the defect set, carry the class it claims,
/// and cost the sum of its edge weights.
fn assert_correction_cancels(
    dec: &Decoder,
    defects: &[u32],
    edges: &[u32],
    class: bool,
    weight: f64,
    ctx: &str,
) {
    let g = dec.graph();
    let n = g.n_detectors();
    let mut parity = vec![false; n];
    let mut frame = false;
    let mut total = 0.0;
    for &e in edges {
        let edge = &g.edges()[e as usize];
        for node in [edge.a, edge.b] {
            if !g.is_terminal(node) {
                parity[node as usize] ^= true;
            }
        }
        frame ^= edge.frame;
        total += edge.weight;
    }
    let flipped: Vec<u32> =
        (0..n as u32).filter(|&d| parity[d as usize]).collect();
    assert_eq!(flipped, defects, "{ctx}: correction does not cancel the defects");
    assert_eq!(frame, class, "{ctx}: correction class mismatch");
    assert!((total - weight).abs() <= 1e-9 * (1.0 + weight), "{ctx}: weight mismatch");
}

/// Sampled shots plus random defect subsets, checked against the oracle.
fn oracle_cross_check(dem: DetectorErrorModel, n_shots: u64, seed: u64, name: &str) {
    let tables = common::build_tables(&dem);
    let dec = decoder_for(&dem);
    let dem = Arc::new(dem);
    let sampler = ShotSampler::new(dem.clone(), seed);
    let mut checked = 0;
    for i in 0..n_shots {
        let shot = sampler.sample_shot(i);
        let defects = full_defects(&dem, &shot);
        if defects.len() > 10 {
            continue; // keep the exhaustive oracle tractable
        }
        check_defect_set(&dec, &tables, &defects, &format!("{name} shot {i}"));
        checked += 1;
    }
    assert!(checked >= n_shots / 2, "{name}: too few tractable shots ({checked})");

    // Arbitrary defect patterns, not necessarily reachable by any error.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for case in 0..60 {
        let size = rng.gen_range(1..=7.min(dem.n_detectors));
        let mut defects: Vec<u32> =
            rand::seq::index::sample(&mut rng, dem.n_detectors, size)
                .iter()
                .map(|x| x as u32)
                .collect();
        defects.sort_unstable();
        check_defect_set(&dec, &tables, &defects, &format!("{name} random {case}"));
    }
}

#[test]
fn matches_oracle_on_repetition_layouts() {
    oracle_cross_check(repetition_cluster(3, 0.02).extract_dem().unwrap(), 300, 11, "rep d3");
    oracle_cross_check(repetition_cluster(5, 0.01).extract_dem().unwrap(), 200, 12, "rep d5");
}

#[test]
fn matches_oracle_on_surface_layout() {
    oracle_cross_check(surface_cluster(3, 6e-3).extract_dem().unwrap(), 150, 13, "surf d3");
}

#[test]
fn empty_defect_set_is_trivial() {
    for dem in [
        repetition_cluster(3, 2e-3).extract_dem().unwrap(),
        surface_cluster(3, 2e-3).extract_dem().unwrap(),
    ] {
        let tables = common::build_tables(&dem);
        let dec = decoder_for(&dem);
        let c = dec.decode(&[]).unwrap();
        assert_eq!((c.weight, c.class, c.edges.len()), (0.0, false, 0));
        let [w0, w1] = dec.class_weights(&[]);
        assert_eq!(w0, 0.0);
        assert!((w1 - tables.crossing).abs() <= 5e-5 * (1.0 + tables.crossing));
        let cross = dec.decode_conditioned(&[], true).unwrap();
        assert!((cross.weight - tables.crossing).abs() <= 5e-5 * (1.0 + tables.crossing));
        assert!(!cross.edges.is_empty());
        assert_eq!(dec.infer_hidden(&[]).unwrap(), vec![false; dec.graph().hidden().len()]);
    }
}

/// Hand-built model with three components: a two-sided chain, a closed pair
/// with no boundary, and a one-sided detector. Exercises infeasible classes,
/// cross-component crossings, and the unmatchable case.
#[test]
fn multi_component_feasibility() {
    let text = "\
error(0.1) D0 L0
error(0.1) D0 D1
error(0.1) D1
error(0.05) D2 D3
error(0.2) D4
error(0.12) D4 D5
";
    let dem = DetectorErrorModel::parse(text).unwrap();
    let tables = common::build_tables(&dem);
    let dec = decoder_for(&dem);

    // Closed component: a lone defect has no correction in either class.
    assert_eq!(dec.decode(&[2]), Err(DecodeError::Unmatchable));
    assert_eq!(dec.decode_conditioned(&[2], false), Err(DecodeError::InfeasibleClass));
    assert_eq!(dec.decode_conditioned(&[2], true), Err(DecodeError::InfeasibleClass));
    assert_eq!(dec.class_weights(&[2]), [f64::INFINITY; 2]);
    assert!(dec.logical_gap(&[2]).is_infinite());

    // Paired defects in the closed component decode fine.
    check_defect_set(&dec, &tables, &[2, 3], "closed pair");

    // One-sided component: the off-class answer must route a crossing
    // through the two-sided component.
    let w = check_defect_set(&dec, &tables, &[4], "one-sided defect");
    assert!(w[0].is_finite() && w[1].is_finite());
    assert!((w[0].max(w[1]) - (w[0].min(w[1]) + tables.crossing)).abs() <= 1e-9);

    // Everything at once.
    check_defect_set(&dec, &tables, &[0, 2, 3, 4, 5], "mixed defects");
}

/// The inferred hidden assignment must reach the global optimum over every
/// hidden assignment (exhaustively checked where the hidden count allows).
#[test]
fn inferred_hidden_assignment_is_globally_optimal() {
    for (dem, n_shots, seed, name) in [
        (repetition_cluster(3, 0.015).extract_dem().unwrap(), 250, 21, "rep d3"),
        (repetition_cluster(5, 0.01).extract_dem().unwrap(), 150, 22, "rep d5"),
    ] {
        let dec = decoder_for(&dem);
        let hidden_ids = dem.hidden_ids();
        assert!(hidden_ids.len() <= 8);
        let dem = Arc::new(dem);
        let sampler = ShotSampler::new(dem.clone(), seed);
        for i in 0..n_shots {
            let shot = sampler.sample_shot(i);
            let visible: Vec<u32> = dem
                .visible_ids()
                .iter()
                .zip(&shot.visible)
                .filter(|(_, &b)| b)
                .map(|(&d, _)| d)
                .collect();
            let bits = dec.infer_hidden(&visible).unwrap();

            let with_hidden = |mask: usize| -> Vec<u32> {
                let mut d = visible.clone();
                for (b, &h) in hidden_ids.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        d.push(h);
                    }
                }
                d.sort_unstable();
                d
            };
            let global = (0..1usize << hidden_ids.len())
                .map(|mask| {
                    let [w0, w1] = dec.class_weights(&with_hidden(mask));
                    w0.min(w1)
                })
                .fold(f64::INFINITY, f64::min);
            let mask =
                bits.iter().enumerate().fold(0usize, |m, (b, &v)| m | ((v as usize) << b));
            let [w0, w1] = dec.class_weights(&with_hidden(mask));
            let achieved = w0.min(w1);
            assert!(
                (achieved - global).abs() <= 5e-5 * (1.0 + global),
                "{name} shot {i}: inferred assignment costs {achieved}, global optimum {global}"
            );
        }
    }
}

/// On the surface layout the hidden space is too big to enumerate; the
/// inferred assignment must still beat the true one, the empty one, and a
/// bag of random assignments.
#[test]
fn inferred_hidden_assignment_beats_alternatives_on_surface() {
    let dem = surface_cluster(3, 4e-3).extract_dem().unwrap();
    let dec = decoder_for(&dem);
    let hidden_ids: Vec<u32> = dem.hidden_ids();
    let dem = Arc::new(dem);
    let sampler = ShotSampler::new(dem.clone(), 31);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..80u64 {
        let shot = sampler.sample_shot(i);
        let visible: Vec<u32> = dem
            .visible_ids()
            .iter()
            .zip(&shot.visible)
            .filter(|(_, &b)| b)
            .map(|(&d, _)| d)
            .collect();
        let bits = dec.infer_hidden(&visible).unwrap();
        let eval = |hid: &[bool]| -> f64 {
            let mut d = visible.clone();
            for (b, &h) in hidden_ids.iter().enumerate() {
                if hid[b] {
                    d.push(h);
                }
            }
            d.sort_unstable();
            let [w0, w1] = dec.class_weights(&d);
            w0.min(w1)
        };
        let achieved = eval(&bits);
        let mut rivals = vec![vec![false; hidden_ids.len()], shot.hidden.clone()];
        for _ in 0..25 {
            rivals.push((0..hidden_ids.len()).map(|_| rng.gen_bool(0.2)).collect());
        }
        for (r, rival) in rivals.iter().enumerate() {
            assert!(
                achieved <= eval(rival) + 5e-5 * (1.0 + achieved),
                "shot {i}: rival assignment {r} beats the inferred one"
            );
        }
    }
}

/// Distance structure behind postselection: the full-syndrome code distance
/// is d, while a single hidden-adjacent mechanism already flips the
/// observable invisibly — the floor no cutoff can reject.
#[test]
fn code_distance_and_hidden_floor() {
    for (dem, d) in [
        (repetition_cluster(3, 2e-3).extract_dem().unwrap(), 3),
        (repetition_cluster(5, 2e-3).extract_dem().unwrap(), 5),
        (repetition_cluster(7, 2e-3).extract_dem().unwrap(), 7),
        (surface_cluster(3, 2e-3).extract_dem().unwrap(), 3),
        (surface_cluster(5, 2e-3).extract_dem().unwrap(), 5),
    ] {
        assert_eq!(common::oracle_bfs_distance(&dem), d, "full-syndrome distance");
        let floor_mechs: Vec<&Mechanism> = dem
            .mechanisms
            .iter()
            .filter(|m| {
                !m.detectors.is_empty()
                    && m.flips_observable
                    && m.detectors.iter().all(|&x| dem.hidden[x as usize])
            })
            .collect();
        assert!(
            floor_mechs.iter().any(|m| m.detectors.len() == 1),
            "expected single-detector hidden-only observable flips at distance {d}"
        );
    }
}

/// Identical inputs give identical corrections, across decoder instances.
#[test]
fn decoding_is_deterministic() {
    let dem = surface_cluster(3, 5e-3).extract_dem().unwrap();
    let dec_a = decoder_for(&dem);
    let dec_b = decoder_for(&dem);
    let dem = Arc::new(dem);
    let sampler = ShotSampler::new(dem.clone(), 77);
    for i in 0..50 {
        let shot = sampler.sample_shot(i);
        let defects = full_defects(&dem, &shot);
        let a = dec_a.decode(&defects).unwrap();
        let b = dec_b.decode(&defects).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            dec_a.class_weights(&defects),
            dec_b.class_weights(&defects)
        );
        let visible: Vec<u32> = dem
            .visible_ids()
            .iter()
            .zip(&shot.visible)
            .filter(|(_, &b)| b)
            .map(|(&d, _)| d)
            .collect();
        assert_eq!(dec_a.infer_hidden(&visible), dec_b.infer_hidden(&visible));
    }
}
