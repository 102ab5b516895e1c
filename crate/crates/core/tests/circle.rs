use std::sync::Arc;

use ffcircle::characters::psi;
use ffcircle::circle::*;
use ffcircle::cyclo::{qpow, Cyclotomic};
use ffcircle::ff::{inv_mod, iter_below, iter_monic_upto, Fq, Laurent, Poly};
use ffcircle::tlsweep::{tls_sum, GFraction, TlsParams};
use ffcircle::IntCyclo;

fn f3() -> Arc<Fq> {
    Fq::new(3).unwrap()
}

fn poly(f: &Arc<Fq>, s: &str) -> Poly {
    Poly::parse(f, s).unwrap()
}

fn with_k(q: u64, nu: i64, g: &str, lam: [&str; 4], k: &str) -> SystemParams {
    let f = Fq::new(q).unwrap();
    let form = MorgensternForm::new(&f, f.from_int(nu)).unwrap();
    let lam = lam.map(|s| poly(&f, s));
    SystemParams::from_lambda(form, poly(&f, g), lam, &poly(&f, k)).unwrap()
}

fn with_f(g: &str, f: &str, lam: [&str; 4]) -> SystemParams {
    let fld = f3();
    let form = MorgensternForm::new(&fld, fld.from_int(-1)).unwrap();
    SystemParams::new(
        form,
        poly(&fld, f),
        poly(&fld, g),
        lam.map(|s| poly(&fld, s)),
    )
    .unwrap()
}

/// `S_{g,r}(c)` straight from the definition: every `(a, l, b)` with `b` over
/// all of `(O/gr)^4`, each phase read off a Laurent expansion.
fn s_literal(p: &SystemParams, r: &Poly, c: &CVector) -> IntCyclo {
    let f = p.field();
    let gr = &p.g * r;
    let d = gr.deg().unwrap();
    let dr = r.deg().unwrap();
    let units: Vec<Poly> = if dr == 0 {
        vec![Poly::zero(f)]
    } else {
        iter_below(f, dr)
            .filter(|a| inv_mod(a, r).is_ok())
            .collect()
    };
    let bs: Vec<Poly> = iter_below(f, d).collect();
    let mut acc = Cyclotomic::zero(f.p());
    for a in &units {
        for l in iter_below(f, p.deg_g()) {
            let u = a + &(r * &l);
            for b1 in &bs {
                for b2 in &bs {
                    for b3 in &bs {
                        for b4 in &bs {
                            let b = [b1.clone(), b2.clone(), b3.clone(), b4.clone()];
                            let two_lab = p.form.bilinear(&p.lambda, &b).scale(f.from_int(2));
                            let cb = (0..4).fold(Poly::zero(f), |s, i| &s + &(&c.0[i] * &b[i]));
                            let num = &(&(&u * &(&two_lab - &p.k))
                                + &(&(a * &p.g) * &p.form.eval(&b)))
                                - &cb;
                            let x = Laurent::from_fraction(&num, &gr, -8).unwrap();
                            acc += &psi(&x).unwrap().to_cyclo();
                        }
                    }
                }
            }
        }
    }
    acc
}

#[test]
fn direct_and_closed_match_the_literal_definition() {
    let p = with_k(3, -1, "t+1", ["0", "1", "0", "0"], "t^3+t+2");
    let f = p.field().clone();
    let grid = CGrid::new(&f, 0);
    for r in iter_monic_upto(&f, 1) {
        let closed = ClosedSum::new(&p, &r).unwrap();
        let direct = exp_sum_direct_grid(&p, &r, &grid, u128::MAX).unwrap();
        for idx in (0..grid.len()).step_by(7) {
            let c = grid.get(idx);
            let lit = s_literal(&p, &r, &c);
            assert_eq!(direct[idx], lit, "r={r} c={c}");
            assert_eq!(closed.eval(&c).unwrap(), lit, "r={r} c={c}");
        }
    }
}

#[test]
fn trivial_modulus_at_zero_frequency() {
    // r = 1, c = 0, deg g = 1: |g|^4
    let p = with_k(3, -1, "t+1", ["1", "1", "0", "0"], "t^3+2t^2+1");
    let f = p.field().clone();
    let one = Poly::one(&f);
    let zero = CVector::zero(&f);
    assert_eq!(
        exp_sum_direct(&p, &one, &zero, u128::MAX).unwrap(),
        Cyclotomic::from_scalar(3, 81i64)
    );
    assert_eq!(
        exp_sum_closed(&p, &one, &zero).unwrap(),
        Cyclotomic::from_scalar(3, 81i64)
    );
}

#[test]
fn vanishing_clauses_on_the_grid() {
    let p = with_k(3, -1, "t^2+1", ["t", "0", "1", "0"], "t^2+t+1");
    let f = p.field().clone();
    let t1 = poly(&f, "t-1");
    let grid = CGrid::new(&f, 1);
    for r in [poly(&f, "t-1"), poly(&f, "t^2+t+2"), poly(&f, "t^2-1")] {
        let direct = exp_sum_direct_grid(&p, &r, &grid, u128::MAX).unwrap();
        let closed = ClosedSum::new(&p, &r).unwrap();
        let h = ffcircle::ff::gcd_monic(&r, &t1).unwrap();
        let (mut no_beta, mut no_div) = (0, 0);
        for (idx, s) in direct.iter().enumerate() {
            let c = grid.get(idx);
            if beta_of_c(&c, &p).unwrap().is_none() {
                no_beta += 1;
                assert!(s.is_zero(), "r={r} c={c}");
            }
            if !(h.divides(&c.0[2]) && h.divides(&c.0[3])) {
                no_div += 1;
                assert!(s.is_zero(), "r={r} c={c}");
            }
            assert_eq!(closed.eval(&c).unwrap(), *s);
        }
        assert!(no_beta > 0);
        assert!(r.deg() == Some(2) && h.is_one() || no_div > 0);
    }
}

#[test]
fn closed_sum_at_q5() {
    let p = with_k(5, 2, "t+3", ["1", "0", "0", "1"], "t^2+3");
    let f = p.field().clone();
    let grid = CGrid::new(&f, 1);
    let mut nonzero = 0;
    for r in iter_monic_upto(&f, 1) {
        let direct = exp_sum_direct_grid(&p, &r, &grid, u128::MAX).unwrap();
        let closed = ClosedSum::new(&p, &r).unwrap();
        for (idx, s) in direct.iter().enumerate() {
            assert_eq!(closed.eval(&grid.get(idx)).unwrap(), *s, "r={r}");
            nonzero += usize::from(!s.is_zero());
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn g_equal_to_t_minus_one_is_rejected() {
    // t+2 = t-1 divides the discriminant, so the closed form does not apply
    let fld = f3();
    let form = MorgensternForm::new(&fld, fld.from_int(-1)).unwrap();
    let zero = [(); 4].map(|_| Poly::zero(&fld));
    let p = SystemParams::new(
        form.clone(),
        poly(&fld, "t^2+2t"),
        poly(&fld, "t+2"),
        zero.clone(),
    );
    assert!(p.is_err());
    let p = SystemParams::new_relaxed(form, poly(&fld, "t^2+2t"), poly(&fld, "t+2"), zero).unwrap();
    let s = exp_sum_direct(&p, &poly(&fld, "t"), &CVector::zero(&fld), u128::MAX).unwrap();
    assert!(s.to_complex().norm().is_finite());
}

#[test]
fn delta_expansion_reproduces_counts() {
    for p in [
        with_f("1", "t", ["0"; 4]),
        with_f("1", "t^2", ["0"; 4]),
        with_k(3, -1, "t+1", ["0", "1", "0", "0"], "t^2+1"),
        with_k(3, -1, "t+1", ["1", "1", "0", "0"], "t+2"),
        with_k(3, -1, "t", ["1", "0", "0", "0"], "t^2+1"),
    ] {
        let n = count_solutions(&p, u128::MAX).unwrap();
        for method in [SumMethod::Closed, SumMethod::Direct] {
            let d = delta_reconstruct(
                &p,
                &DeltaOptions {
                    method,
                    budget: u128::MAX,
                },
            )
            .unwrap();
            assert_eq!(
                near_integer(&d, 1e-6),
                Some(n as i64),
                "g={} f={} {method:?}",
                p.g,
                p.f
            );
        }
    }
    assert_eq!(
        count_solutions(&with_f("1", "t", ["0"; 4]), u128::MAX).unwrap(),
        16
    );
}

#[test]
fn zero_frequency_integral_is_flat_for_small_moduli() {
    // I(0) / Q^4 agrees at r = 1 and every deg r = 1; at these sizes the flat
    // range does not reach deg r = 2
    for f in ["t^5+t", "t^6+t"] {
        let p = with_f("1", f, ["0"; 4]);
        let fld = p.field().clone();
        let base = osc_integral_zero(&p, &Poly::one(&fld), u128::MAX).unwrap();
        for r in iter_monic_upto(&fld, 1) {
            assert_eq!(
                osc_integral_zero(&p, &r, u128::MAX).unwrap(),
                base,
                "f={f} r={r}"
            );
        }
        let c_f = base.scale(&qpow(3, -4 * p.q_exp));
        assert!(c_f.to_complex().re > 0.0);
    }
}

#[test]
fn osc_closed_matches_numeric_per_point() {
    let p = with_f("t", "t^4+1", ["1", "0", "0", "0"]);
    let f = p.field().clone();
    let grid = CGrid::new(&f, 1);
    for r in iter_monic_upto(&f, 1) {
        let closed = OscClosed::with_numeric_zero(&p, &r, u128::MAX).unwrap();
        for idx in (0..grid.len()).step_by(97) {
            let c = grid.get(idx);
            let num = osc_integral_numeric(&p, &r, &c, None, u128::MAX).unwrap();
            assert_eq!(closed.eval(&c).unwrap().1, num, "r={r} c={c}");
            assert_eq!(osc_integral_closed(&p, &r, &c, u128::MAX).unwrap().1, num);
        }
    }
}

#[test]
fn error_terms_repartition_the_count() {
    let p = with_k(3, -1, "t+1", ["0", "1", "0", "0"], "t^2+1");
    let e = error_terms(
        &p,
        &DeltaOptions {
            method: SumMethod::Closed,
            budget: u128::MAX,
        },
    )
    .unwrap();
    let n = count_solutions(&p, u128::MAX).unwrap();
    let want = Cyclotomic::from_scalar(
        3,
        qpow(3, p.deg_g() as i64 + 2 * p.q_exp) * num_rational::BigRational::from_integer(n.into()),
    );
    assert_eq!(e.total(), want);
    assert!(e.weil_ok);
    for &(t, count) in &e.census {
        assert!(count as f64 <= 81.0 * 3f64.powi(t as i32), "T={t}: {count}");
    }
}

#[test]
fn tls_kernel_edge_cases() {
    let p = with_k(3, -1, "t^2+1", ["t", "0", "1", "0"], "t^2+t+1");
    let f = p.field().clone();
    let c = CVector::zero(&f);
    let one = Poly::one(&f);
    for v in [KernelVariant::Finite, KernelVariant::WithInfinity] {
        let t0 = tls_kernel(&p, &c, 0, v, &one, u128::MAX).unwrap();
        assert!(t0.to_complex().norm() <= 1.0 + 1e-12);
        let empty = tls_kernel(&p, &c, 0, v, &poly(&f, "t-1"), u128::MAX).unwrap();
        assert!(empty.is_zero());
    }
}

#[test]
fn tls_kernel_agrees_with_the_twisted_sum() {
    // with (t-1) | N(c) the kernel is a twisted sum with a = f/g,
    // b = F*(c)/(4 g^3), alpha = -(beta g k + <lambda, c>)
    let p = with_k(3, -1, "t^2+1", ["t", "0", "1", "0"], "t^2+t+1");
    let f = p.field().clone();
    let t1 = p.form.t_minus_one();
    let grid = CGrid::new(&f, 2);
    let mut checked = 0;
    for idx in 1..grid.len() {
        let c = grid.get(idx);
        let Some(beta) = beta_of_c(&c, &p).unwrap() else {
            continue;
        };
        let n = p.form.dual_numerator(&c.0);
        if n.is_zero() || !t1.divides(&n) {
            continue;
        }
        let lc = (0..4).fold(Poly::zero(&f), |s, i| &s + &(&p.lambda[i] * &c.0[i]));
        let alpha = -&(&(&beta * &(&p.g * &p.k)) + &lc);
        let b = n
            .div_exact(&t1)
            .unwrap()
            .scale(f.inv(f.from_int(4)).unwrap());
        for v in [KernelVariant::Finite, KernelVariant::WithInfinity] {
            for t in 1..=2 {
                let tp = TlsParams::new(
                    p.g.clone(),
                    Poly::one(&f),
                    alpha.clone(),
                    GFraction::new(p.f.clone(), 1),
                    GFraction::new(b.clone(), 3),
                    t,
                    v,
                )
                .unwrap();
                let k = tls_kernel(&p, &c, t, v, &Poly::one(&f), u128::MAX).unwrap();
                assert_eq!(k, tls_sum(&tp, u128::MAX).unwrap(), "c={c} T={t} {v}");
            }
        }
        checked += 1;
        if checked == 4 {
            break;
        }
    }
    assert_eq!(checked, 4);
}
