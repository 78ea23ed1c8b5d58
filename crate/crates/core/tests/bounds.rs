mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tenfac::bounds::{first_flip, BoundError, Rule};
use tenfac::io::embedded_fixtures;
use tenfac::{
    certified_lower_bound, enumerate_matchings, faces_with_color0, flip_improve, max_faces, parallel_matching,
    shared_color_edges, Color, ColoredGraph,
};

use Color::{One, Three, Two};

#[test]
fn parallel_examples() {
    let g = ColoredGraph::triple_edge();
    assert_eq!(faces_with_color0(&g, &parallel_matching(&g, One)).unwrap(), 3);
    let t = ColoredGraph::tetrahedron();
    for c in Color::ALL {
        assert_eq!(faces_with_color0(&t, &parallel_matching(&t, c)).unwrap(), 4);
    }
}

#[test]
fn parallel_count_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2000 {
        let g = ColoredGraph::random(rng.gen_range(1..=8), &mut rng);
        let p = g.face_profile();
        for i in Color::ALL {
            let (j, k) = i.others();
            let m = parallel_matching(&g, i);
            assert_eq!(common::faces_by_definition(&g, m.partners()), g.n() + p.get(i, j) + p.get(i, k));
        }
    }
}

#[test]
fn mst_faces_share_every_edge() {
    for g in embedded_fixtures().iter().take(3) {
        let a = &g.faces(One, Two)[0];
        let b = &g.faces(One, Three)[0];
        assert_eq!(shared_color_edges(a, b).len(), g.n());
    }
}

#[test]
fn disjoint_faces_share_nothing() {
    let g = ColoredGraph::triple_edge().disjoint_union(&ColoredGraph::triple_edge());
    let a = g.faces(One, Two).into_iter().find(|f| f.cycle.contains(&0)).unwrap();
    let b = g.faces(One, Three).into_iter().find(|f| f.cycle.contains(&2)).unwrap();
    assert!(shared_color_edges(&a, &b).is_empty());
}

#[test]
fn two_shared_edges_is_a_precondition_error() {
    // E3 = E2: the lone (1,2) and (1,3) faces are the same 4-cycle.
    let g = ColoredGraph::new(2, &[(0, 1), (2, 3)], &[(1, 2), (3, 0)], &[(1, 2), (3, 0)]).unwrap();
    let (a, b) = (&g.faces(One, Two)[0], &g.faces(One, Three)[0]);
    assert_eq!(shared_color_edges(a, b).len(), 2);
    let m = parallel_matching(&g, One);
    assert_eq!(flip_improve(&g, &m, a, b), Err(BoundError::TooFewShared(2)));
}

#[test]
fn flip_rejects_bad_inputs() {
    let g = &embedded_fixtures()[0];
    let (a, b) = (&g.faces(One, Two)[0], &g.faces(One, Three)[0]);
    let e2 = parallel_matching(g, Two);
    assert_eq!(flip_improve(g, &e2, a, b), Err(BoundError::NotParallel(One)));
    let e1 = parallel_matching(g, One);
    assert_eq!(flip_improve(g, &e1, a, a), Err(BoundError::FaceColors));
    let mut bent = b.clone();
    bent.cycle.swap(0, 2);
    assert_eq!(flip_improve(g, &e1, a, &bent), Err(BoundError::NotAFace));
}

#[test]
fn flip_on_n3_mst_reaches_max() {
    let mut seen = 0;
    for m in enumerate_matchings(3) {
        let g = common::survey_graph(3, &m);
        if !g.is_mst() {
            continue;
        }
        seen += 1;
        let e1 = parallel_matching(&g, One);
        let flip = flip_improve(&g, &e1, &g.faces(One, Two)[0], &g.faces(One, Three)[0]).unwrap();
        assert_eq!((flip.before, flip.after), (5, 6));
        assert_eq!(max_faces(&g).max_f, 6);
    }
    assert!(seen > 0);
}

#[test]
fn flip_on_fixtures_stops_short_of_max() {
    for g in embedded_fixtures() {
        let flip = first_flip(&g, One).unwrap();
        assert_eq!((flip.before, flip.after), (10, 11));
        assert_eq!(flip.matching.edge_difference(&parallel_matching(&g, One)), 2);
        let d = &flip.data;
        assert_eq!(d.colors, [One, Two, Three]);
        assert_eq!((d.e_new, d.f_new), ((d.e.0, d.f.1), (d.f.0, d.e.1)));
    }
}

#[test]
fn flip_locality_near_mst() {
    // Random graphs with at most one extra face somewhere.
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut applied = 0;
    for _ in 0..20_000 {
        let g = ColoredGraph::random(rng.gen_range(3..=7), &mut rng);
        let p = g.face_profile();
        if p.f12 + p.f13 + p.f23 > 4 {
            continue;
        }
        for i in Color::ALL {
            let (j, k) = i.others();
            let m = parallel_matching(&g, i);
            for a in g.faces(i, j) {
                for b in g.faces(i, k) {
                    let shared = shared_color_edges(&a, &b).len();
                    match flip_improve(&g, &m, &a, &b) {
                        Ok(f) => {
                            assert!(shared >= 3);
                            assert_eq!(f.after, f.before + 1);
                            assert_eq!(f.matching.edge_difference(&m), 2);
                            applied += 1;
                        }
                        Err(BoundError::TooFewShared(s)) => assert!(s < 3 && s == shared),
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
    assert!(applied > 1000, "only {applied} flips");
}

#[test]
fn certificates_by_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked = 0;
    while checked < 3000 {
        let n = rng.gen_range(1..=9);
        let g = ColoredGraph::random(n, &mut rng);
        if !g.is_connected() || g.is_mst() {
            continue;
        }
        let cert = certified_lower_bound(&g).unwrap();
        assert_eq!(faces_with_color0(&g, &cert.witness).unwrap(), cert.bound);
        assert!(cert.exceeds_threshold());
        let p = g.face_profile();
        let need = match n {
            ..=5 => n + 3,
            6..=7 => n + 4,
            _ if p.f12.min(p.f13).min(p.f23) >= 2 => n + 5,
            _ => 3 * n / 2 + 1,
        };
        assert!(cert.bound >= need, "n = {n}, profile {p:?}, bound {}", cert.bound);
        if n <= 7 {
            assert!(cert.bound <= max_faces(&g).max_f);
            assert_ne!(cert.rule, Rule::Search);
        }
        checked += 1;
    }
}

#[test]
fn mst_certificates_are_not_errors() {
    for g in embedded_fixtures() {
        let cert = certified_lower_bound(&g).unwrap();
        assert_eq!(cert.bound, 11);
        assert_eq!(cert.rule, Rule::Flip);
        assert!(!cert.exceeds_threshold());
    }
}
