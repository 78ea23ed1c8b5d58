mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tenfac::canonical::canonical_form;
use tenfac::io::embedded_fixtures;
use tenfac::moments::MomentError;
use tenfac::{double_factorial, factorization_diagnostic, max_faces, mc_estimate, moment_polynomial, ColoredGraph};

fn classes_up_to(n: usize) -> Vec<ColoredGraph> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in 1..=n {
        for g in common::graphs_with_fixed_e1(k) {
            if seen.insert(canonical_form(&g)) {
                out.push(g);
            }
        }
    }
    out
}

#[test]
fn contraction_oracle_up_to_n2() {
    for g in classes_up_to(2) {
        for nu in [0, 1, 2] {
            let p = moment_polynomial(&g, nu, false).unwrap();
            for size in 1..=3 {
                assert_eq!(p.wick_sum(size), common::wick_sum_by_contraction(&g, size));
            }
        }
    }
}

#[test]
fn contraction_oracle_at_n3() {
    for g in classes_up_to(3).into_iter().filter(|g| g.n() == 3) {
        let p = moment_polynomial(&g, 2, false).unwrap();
        for size in 1..=3 {
            assert_eq!(p.wick_sum(size), common::wick_sum_by_contraction(&g, size));
        }
    }
}

#[test]
fn degree_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let g = ColoredGraph::random(rng.gen_range(1..=6), &mut rng);
        let nu = rng.gen_range(0..=3);
        let p = moment_polynomial(&g, nu, false).unwrap();
        assert_eq!(p.total_multiplicity(), double_factorial(g.n()));
        assert_eq!(p.top_exponent(), max_faces(&g).max_f as i64 - (nu as i64) * g.n() as i64);
        assert!(p.terms.values().all(|&c| c > 0));
        assert!(p.evaluate(2) > 0.0);
        // Evaluation at N = 1 is the number of matchings.
        assert_eq!(p.evaluate(1), double_factorial(g.n()) as f64);
    }
}

#[test]
fn mc_agrees_with_exact() {
    let graphs = [
        ColoredGraph::triple_edge(),
        ColoredGraph::tetrahedron(),
        ColoredGraph::new(2, &[(0, 1), (2, 3)], &[(0, 1), (2, 3)], &[(0, 2), (1, 3)]).unwrap(),
    ];
    for (s, g) in graphs.iter().enumerate() {
        for size in [2u64, 3] {
            let exact = moment_polynomial(g, 2, false).unwrap().evaluate(size);
            let est = mc_estimate(g, size as usize, 2, 100_000, 40 + s as u64).unwrap();
            let z = (est.mean - exact) / est.std_error;
            assert!(z.abs() < 5.0, "graph {s}, N = {size}: exact {exact}, mc {} +- {}", est.mean, est.std_error);
        }
    }
}

#[test]
fn mc_guards() {
    let g = &embedded_fixtures()[0];
    assert!(matches!(mc_estimate(g, 2, 2, 10, 0), Err(MomentError::TooManyTerms { .. })));
}

#[test]
fn pair_check_on_small_classes() {
    for g in classes_up_to(3).into_iter().filter(|g| g.is_connected()) {
        let r = factorization_diagnostic(&g, &[0, 2]).unwrap();
        assert!(!r.violates);
        let pair = r.pair.unwrap();
        assert_eq!(pair.union_max, pair.disjoint_max);
        assert!(pair.connected_max < pair.disjoint_max);
        for e in &r.exponents {
            assert_eq!(e.pair, Some(e.squared));
            assert!(e.pair_connected.unwrap() < e.squared);
        }
    }
}

#[test]
fn diagnostic_flags_fixtures() {
    let t = factorization_diagnostic(&ColoredGraph::tetrahedron(), &[2]).unwrap();
    assert!(!t.violates);
    let r = factorization_diagnostic(&embedded_fixtures()[0], &[0, 2]).unwrap();
    assert!(r.violates);
    assert_eq!((r.max_f, r.threshold_times_two), (12, 24));
    assert!(r.pair.is_none());
    assert_eq!(r.exponents[1].squared, 24 - 32);
}

#[test]
fn diagnostic_needs_connected_input() {
    let g = ColoredGraph::triple_edge().disjoint_union(&ColoredGraph::tetrahedron());
    assert_eq!(factorization_diagnostic(&g, &[2]), Err(MomentError::Disconnected));
}
