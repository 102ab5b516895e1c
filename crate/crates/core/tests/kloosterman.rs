use std::sync::Arc;

use ffcircle::ff::{iter_below, iter_monic_upto, Fq, Laurent, Poly};
use ffcircle::kloosterman::*;
use proptest::prelude::*;

fn closed_vs_direct(q: u64) {
    let f = Fq::new(q).unwrap();
    for c in f.units() {
        for j in -8..=2 {
            let alpha = Laurent::monomial(&f, c, j);
            let direct = kl_infinity(&alpha).unwrap();
            let closed = kl_infinity_closed(&alpha).unwrap();
            assert_eq!(direct, closed, "q={q} c={c:?} j={j}");
        }
    }
}

#[test]
fn kl_infinity_closed_matches_integral_q3() {
    closed_vs_direct(3);
}

#[test]
fn kl_infinity_closed_matches_integral_q5() {
    closed_vs_direct(5);
}

#[test]
fn kl_infinity_with_lower_order_terms() {
    // alpha with a nontrivial tail exercises the (1 + a~)^{1/2} phase
    for q in [3u64, 5] {
        let f = Fq::new(q).unwrap();
        for lead in f.units() {
            for tail in iter_below(&f, 3) {
                for top in [0i64, 2, 4] {
                    let alpha = Laurent::from_poly(&tail)
                        .shift(top - 3)
                        .add(&Laurent::monomial(&f, lead, top));
                    assert_eq!(
                        kl_infinity(&alpha).unwrap(),
                        kl_infinity_closed(&alpha).unwrap(),
                        "q={q} alpha={alpha}"
                    );
                }
            }
        }
    }
}

#[test]
fn b_infinity_table_grid() {
    for q in [3u64, 5] {
        let f = Fq::new(q).unwrap();
        for c in f.units() {
            for a in -4..=1 {
                for b in -3..=3 {
                    if b == 0 {
                        continue;
                    }
                    let alpha = Laurent::monomial(&f, c, 2 * a + b);
                    assert_eq!(
                        b_infinity(a, &alpha).unwrap(),
                        b_infinity_closed(a, &alpha).unwrap(),
                        "q={q} a={a} b={b}"
                    );
                }
            }
        }
    }
}

fn f3() -> Arc<Fq> {
    Fq::new(3).unwrap()
}

#[test]
fn kloosterman_symmetry_and_twisting() {
    let f = f3();
    for r in iter_monic_upto(&f, 2).skip(1) {
        let units: Vec<Poly> = iter_below(&f, r.deg().unwrap())
            .filter(|u| ffcircle::ff::gcd_monic(u, &r).unwrap().is_one())
            .collect();
        for m in iter_below(&f, r.deg().unwrap()) {
            for n in iter_below(&f, r.deg().unwrap()) {
                let k = kl_finite(&r, &m, &n).unwrap();
                assert_eq!(k, kl_finite(&r, &n, &m).unwrap());
                for u in &units {
                    assert_eq!(
                        kl_finite(&r, &(u * &m), &n).unwrap(),
                        kl_finite(&r, &m, &(u * &n)).unwrap()
                    );
                }
                assert!(weil_check(&r, &m, &n).unwrap(), "r={r} m={m} n={n}");
            }
        }
    }
}

#[test]
fn kloosterman_crt_multiplicativity() {
    // Kl_{r1 r2}(m, n) = Kl_{r1}(m r2bar, n r2bar) Kl_{r2}(m r1bar, n r1bar)
    let f = f3();
    let r1 = Poly::parse(&f, "t").unwrap();
    let r2 = Poly::parse(&f, "t^2+1").unwrap();
    let r = &r1 * &r2;
    for m in iter_below(&f, 3).step_by(5) {
        for n in iter_below(&f, 3).step_by(7) {
            let lhs = kl_finite(&r, &m, &n).unwrap();
            let r2b = ffcircle::ff::inv_mod(&r2, &r1).unwrap();
            let r1b = ffcircle::ff::inv_mod(&r1, &r2).unwrap();
            let a = kl_finite(&r1, &(&m * &r2b), &(&n * &r2b)).unwrap();
            let b = kl_finite(&r2, &(&m * &r1b), &(&n * &r1b)).unwrap();
            assert_eq!(lhs, &a * &b, "m={m} n={n}");
        }
    }
}

#[test]
fn quad_sum_closed_matches_direct() {
    for q in [3u64, 5] {
        let f = Fq::new(q).unwrap();
        for c in iter_monic_upto(&f, 3).step_by(if q == 3 { 1 } else { 7 }) {
            for a in iter_below(&f, 2) {
                for b in iter_below(&f, 2) {
                    assert_eq!(
                        quad_complete_sum(&a, &b, &c).unwrap(),
                        quad_complete_sum_closed(&a, &b, &c).unwrap(),
                        "q={q} a={a} b={b} c={c}"
                    );
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn b_infinity_is_locally_constant(a in -3i64..=1, e in -6i64..=3, c in 1u32..3) {
        let f = f3();
        let alpha = Laurent::monomial(&f, f.elem(c), e);
        let d = b_infinity_depth(e - 2 * a).min(a);
        prop_assert_eq!(b_infinity_at(a, &alpha, d).unwrap(), b_infinity_at(a, &alpha, d - 1).unwrap());
    }
}
