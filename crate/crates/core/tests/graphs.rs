use ffcircle::ff::{gcd_monic, iter_irreducible, IndexedRing};
use ffcircle::graphs::*;
use ffcircle::{Error, Fq, FqElem, Poly};

fn morgenstern_720() -> CayleyGraph {
    let f = Fq::new(3).unwrap();
    build_graph(
        &Poly::parse(&f, "t^2+t+2").unwrap(),
        f.from_int(-1),
        1 << 20,
    )
    .unwrap()
}

#[test]
fn norm_one_pairs_at_q3() {
    let f = Fq::new(3).unwrap();
    let mut pairs = norm_one_pairs(&f, f.from_int(-1));
    pairs.sort();
    let pm = [f.from_int(1), f.from_int(-1)];
    let mut want: Vec<(FqElem, FqElem)> = pm
        .iter()
        .flat_map(|&a| pm.iter().map(move |&b| (a, b)))
        .collect();
    want.sort();
    assert_eq!(pairs, want);
}

#[test]
fn generator_count_is_q_plus_one() {
    for (q, nu) in [(3u64, -1i64), (5, 2), (7, 3)] {
        let f = Fq::new(q).unwrap();
        let t_t1 = Poly::parse(&f, "t^2-t").unwrap();
        let g = iter_irreducible(&f, 2)
            .find(|g| gcd_monic(g, &t_t1).unwrap().is_one())
            .unwrap();
        let ring = IndexedRing::new(&g).unwrap();
        let gens = generators(&ring, f.from_int(nu)).unwrap();
        assert_eq!(gens.len(), q as usize + 1, "q={q}");
        let t = ring.index(&Poly::t(&f));
        for s in &gens {
            // canonical scaling may change det by a square, never its class
            assert_eq!(
                square_class(&ring, s.det(&ring)).unwrap(),
                square_class(&ring, t).unwrap()
            );
        }
    }
}

#[test]
fn pgl_order_and_structure() {
    let g = morgenstern_720();
    assert_eq!(g.len(), 720);
    assert_eq!(g.pgl_order(), Some(720));
    assert_eq!(g.degree(), 4);
    assert!(g.check_symmetric());
    assert!(g.is_bipartite());
    assert_eq!(g.check_determinant_classes().unwrap(), 720 * 4);
    assert_eq!(g.distance(0, 0).unwrap(), 0);
    for &w in g.neighbors(0) {
        assert_eq!(g.distance(0, w).unwrap(), 1);
    }
}

#[test]
fn spectrum_is_ramanujan_and_paired() {
    let g = morgenstern_720();
    let s = g.spectrum(4096).unwrap();
    assert!(s.second <= 2.0 * 3f64.sqrt() + 1e-6);
    assert!(s.pairing_defect() < 1e-8);
    let (est, res) = power_second_eigenvalue(&g, 1e-8, 200_000, 7).unwrap();
    assert!(res <= 1e-8);
    assert!((est - s.second).abs() < 1e-6, "{est} vs {}", s.second);
}

#[test]
fn dense_solver_refuses_large_graphs() {
    let g = morgenstern_720();
    assert!(matches!(g.spectrum(100), Err(Error::Budget { .. })));
}

#[test]
fn distance_to_w_is_even_and_at_least_eight() {
    let f = Fq::new(3).unwrap();
    let g = Poly::parse(&f, "t^2+t+2").unwrap();
    let rep = lower_bound_experiment(&g, f.from_int(-1), Variant::Bipartite, 1 << 20).unwrap();
    let h = rep.h.unwrap();
    assert_eq!(h % 2, 0);
    assert!(h >= 8);
    assert!(rep.ok());
    assert!(rep.diameter as f64 <= rep.two_log + 6.0);
    assert_eq!(rep.targets[0].word.as_ref().unwrap().len() as u32, h);
}

#[test]
fn suitable_moduli() {
    let f = Fq::new(3).unwrap();
    assert_eq!(
        find_suitable_g(&f, 2, Profile::Bipartite).unwrap(),
        Poly::parse(&f, "t^2+t+2").unwrap()
    );
    assert!(matches!(
        find_suitable_g(&f, 1, Profile::Bipartite),
        Err(Error::NotFound(_))
    ));
    let g = find_suitable_g(&f, 2, Profile::NonBipartite).unwrap();
    assert!(profile_holds(&g, Profile::NonBipartite).unwrap());
    let graph = build_graph(&g, f.from_int(-1), 1 << 20).unwrap();
    assert!(!graph.is_bipartite());
    assert_eq!(graph.len() as u64, graph.pgl_order().unwrap() / 2);
    let c = certify(&graph, 4096).unwrap();
    assert!(c.ok());
}

#[test]
fn bipartite_iff_t_is_a_non_square() {
    let f = Fq::new(3).unwrap();
    for g in iter_irreducible(&f, 2) {
        let Ok(graph) = build_graph(&g, f.from_int(-1), 1 << 20) else {
            continue;
        };
        let ring = &graph.ring;
        let t_sq = square_class(ring, ring.index(&Poly::t(&f))).unwrap();
        assert_eq!(graph.is_bipartite(), !t_sq, "g={g}");
        assert!(certify(&graph, 4096).unwrap().ok(), "g={g}");
    }
}

#[test]
fn edge_list_has_one_line_per_edge() {
    let g = morgenstern_720();
    let mut buf = Vec::new();
    g.write_edges(&mut buf).unwrap();
    let lines = String::from_utf8(buf).unwrap();
    assert_eq!(lines.lines().count(), 720 * 4 / 2);
}
