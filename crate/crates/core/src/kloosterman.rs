//! Kloosterman sums at finite places and at infinity.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::characters::{fq_gauss_sum, gauss_factor, gauss_tau, psi, PsiMod};
use crate::cyclo::{qpow, Cyclotomic};
use crate::error::{Error, Result};
use crate::ff::arith::factor;
use crate::ff::{gcd_monic, inv_mod, iter_below, jacobi, Fq, FqElem, Laurent, Poly};

pub type Exact = Cyclotomic<BigRational>;

/// `Kl_r(m, n) = sum_{x in (O/r)^*} psi_r(m x + n xbar)`, exact; `Kl_1 = 1`.
pub fn kl_finite(r: &Poly, m: &Poly, n: &Poly) -> Result<Cyclotomic<i64>> {
    let f = r.field();
    let d = r.deg().ok_or(Error::DivisionByZero)?;
    let p = f.p();
    if d == 0 {
        return Ok(Cyclotomic::one(p));
    }
    let m = m.rem(r)?;
    let n = n.rem(r)?;
    let pm = PsiMod::new(r, 2 * d)?;
    let mut s = Cyclotomic::zero(p);
    for x in iter_below(f, d) {
        let xinv = match inv_mod(&x, r) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let k = (pm.exponent(&(&m * &x)) + pm.exponent(&(&n * &xinv))) % p;
        s.add_zeta(k, 1);
    }
    Ok(s)
}

/// Unit table for repeated evaluation of `Kl_r(m, n)` at a fixed modulus.
/// Each evaluation costs one dot product per unit, using that
/// `x -> [t^-1](m x / r)` is F_q-linear in the coefficients of `x`.
pub struct KlTable {
    r: Poly,
    psi: PsiMod,
    /// Coefficient vectors (length `deg r`) of each unit and its inverse.
    units: Vec<(Vec<FqElem>, Vec<FqElem>)>,
}

impl KlTable {
    pub fn new(r: &Poly) -> Result<KlTable> {
        let f = r.field();
        let d = r.deg().ok_or(Error::DivisionByZero)?;
        let pad = |p: &Poly| {
            let mut v = p.coeffs().to_vec();
            v.resize(d, FqElem::ZERO);
            v
        };
        let mut units = Vec::new();
        if d > 0 {
            for x in iter_below(f, d) {
                if let Ok(xi) = inv_mod(&x, r) {
                    units.push((pad(&x), pad(&xi)));
                }
            }
        }
        Ok(KlTable {
            r: r.clone(),
            psi: PsiMod::new(r, 2 * d)?,
            units,
        })
    }

    pub fn modulus(&self) -> &Poly {
        &self.r
    }

    /// `l[i] = [t^-1](m t^i / r)` for `i < deg r`.
    fn functional(&self, m: &Poly) -> Result<Vec<FqElem>> {
        let m = m.rem(&self.r)?;
        let d = self.r.deg().unwrap();
        Ok((0..d).map(|i| self.psi.residue(&m.shift(i))).collect())
    }

    pub fn eval(&self, m: &Poly, n: &Poly) -> Result<Cyclotomic<i64>> {
        let f = self.r.field();
        let p = f.p();
        if self.r.is_constant() {
            return Ok(Cyclotomic::one(p));
        }
        let (lm, ln) = (self.functional(m)?, self.functional(n)?);
        let mut counts = vec![0i64; p as usize];
        for (x, xi) in &self.units {
            let mut acc = FqElem::ZERO;
            for i in 0..x.len() {
                acc = f.add(acc, f.add(f.mul(x[i], lm[i]), f.mul(xi[i], ln[i])));
            }
            counts[f.trace(acc) as usize] += 1;
        }
        Ok(Cyclotomic::from_counts(p, counts))
    }
}

/// Reduces `num / den` into `O/(r)`; `den` must be coprime to `r`.
pub fn to_residue(num: &Poly, den: &Poly, r: &Poly) -> Result<Poly> {
    if r.is_constant() {
        return Ok(Poly::zero(r.field()));
    }
    (num * &inv_mod(den, r)?).rem(r)
}

/// Prime-field style Kloosterman sum `Kl(a, F_q) = sum_{x in F_q^*} e_q(a/x + x)`.
pub fn kl_prime_field(field: &Fq, a: FqElem) -> Cyclotomic<i64> {
    let mut s = Cyclotomic::zero(field.p());
    for x in field.units() {
        let v = field.add(field.mul(a, field.inv(x).unwrap()), x);
        s.add_zeta(field.trace(v), 1);
    }
    s
}

/// Depth `D` at which `x -> psi(alpha/x + x)` is constant on cells
/// `x + {|y| < q^D}` of the sphere `|x| = q^a`, with `b = ord alpha - 2a`.
pub fn b_infinity_depth(b: i64) -> i64 {
    (-1i64).min(-1 - b)
}

/// Direct evaluation of `B_inf(psi, a, alpha) = int_{|x| = q^a} psi(alpha/x + x) dx`
/// as an exact Riemann sum with cells of size `q^depth`.
pub fn b_infinity_at(a: i64, alpha: &Laurent, depth: i64) -> Result<Exact> {
    let f = alpha.field().clone();
    if alpha.is_zero()? {
        return Err(Error::Invalid("B_inf needs alpha != 0".into()));
    }
    if depth > a {
        return Err(Error::Invalid(format!("depth {depth} above sphere {a}")));
    }
    let p = f.p();
    let mut s = Cyclotomic::<i64>::zero(p);
    let len = (a - depth) as usize;
    for lead in f.units() {
        for low in iter_below(&f, len) {
            let x = Laurent::from_poly(&low)
                .shift(depth)
                .add(&Laurent::monomial(&f, lead, a));
            // alpha/x needs precision down to t^-1
            let q = alpha.div_prec(&x, -2)?;
            let k = (psi(&q)?.k + psi(&x)?.k) % p;
            s.add_zeta(k, 1);
        }
    }
    Ok(s.to_exact().scale_qpow(f.q(), depth))
}

/// `B_inf(psi, a, alpha)` at the derived depth, certified by agreement one level deeper.
pub fn b_infinity(a: i64, alpha: &Laurent) -> Result<Exact> {
    let ord = alpha
        .ord()?
        .ok_or_else(|| Error::Invalid("B_inf needs alpha != 0".into()))?;
    let depth = b_infinity_depth(ord - 2 * a).min(a);
    let v = b_infinity_at(a, alpha, depth)?;
    if b_infinity_at(a, alpha, depth - 1)? != v {
        return Err(Error::Convergence(format!(
            "B_inf not locally constant at depth {depth}"
        )));
    }
    Ok(v)
}

/// Three-case closed form of `B_inf(psi, a, alpha)` for `b = ord alpha - 2a != 0`.
pub fn b_infinity_closed(a: i64, alpha: &Laurent) -> Result<Exact> {
    let f = alpha.field();
    let ord = alpha
        .ord()?
        .ok_or_else(|| Error::Invalid("B_inf needs alpha != 0".into()))?;
    let b = ord - 2 * a;
    if b == 0 {
        return kl_infinity_closed(alpha);
    }
    let (p, q) = (f.p(), f.q());
    let top = (a + b).max(a);
    let val = match top.cmp(&-1) {
        std::cmp::Ordering::Less => qpow(q, a) * BigRational::from_integer((q as i64 - 1).into()),
        std::cmp::Ordering::Equal => -qpow(q, a),
        std::cmp::Ordering::Greater => BigRational::zero(),
    };
    Ok(Cyclotomic::from_scalar(p, val))
}

/// `Kl_inf(psi, alpha)`: `B_inf(psi, l, alpha)` if `|alpha| = q^{2l}`, else 0.
/// Direct sphere integral.
pub fn kl_infinity(alpha: &Laurent) -> Result<Exact> {
    let p = alpha.field().p();
    match alpha.ord()? {
        Some(o) if o.rem_euclid(2) == 0 => b_infinity(o / 2, alpha),
        Some(_) => Ok(Cyclotomic::zero(p)),
        None => Ok(Cyclotomic::zero(p)),
    }
}

/// Which closed-form branch `Kl_inf` falls in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum KlInfBranch {
    OddNorm,
    Small,
    PrimeField,
    Residue,
    NonResidue,
}

pub fn kl_infinity_branch(alpha: &Laurent) -> Result<KlInfBranch> {
    let f = alpha.field();
    let o = match alpha.ord()? {
        Some(o) if o.rem_euclid(2) == 0 => o,
        _ => return Ok(KlInfBranch::OddNorm),
    };
    let a = o / 2;
    Ok(if a < -1 {
        KlInfBranch::Small
    } else if a == -1 {
        KlInfBranch::PrimeField
    } else if f.is_square(alpha.lead()?) {
        KlInfBranch::Residue
    } else {
        KlInfBranch::NonResidue
    })
}

/// Closed form of `Kl_inf(psi, alpha)`. Writing `alpha = t^{2a} a' (1 + a~)`:
/// `(q-1) q^a` for `a < -1`; `q^a Kl(a', F_q)` for `a = -1`;
/// `q^a sum_{x'^2 = a'} psi(2 t^a x' (1+a~)^{1/2}) G(x' t^a)` for `a >= 0`
/// and `a'` a square; `0` for non-squares and for odd `ord alpha`.
///
/// The stationary-phase factor is `G(x' t^a)`: substituting `x = x0 v` with
/// `x0^2 = alpha` gives `psi(x0 (v + 1/v))`, and near `v = +-1` the phase is
/// `+-(2 x0 + x0 z^2)` after a measure-preserving change of variable, so the
/// Gaussian integral is `G(+-x0)`. Using `2 x' t^a` instead would be off by
/// `chi(2)^a`, which the direct integral rules out for odd `a`.
pub fn kl_infinity_closed(alpha: &Laurent) -> Result<Exact> {
    let f = alpha.field().clone();
    let (p, q) = (f.p(), f.q());
    let branch = kl_infinity_branch(alpha)?;
    let zero = Cyclotomic::zero(p);
    if matches!(branch, KlInfBranch::OddNorm | KlInfBranch::NonResidue) {
        return Ok(zero);
    }
    let a = alpha.ord()?.unwrap() / 2;
    let lead = alpha.lead()?;
    match branch {
        KlInfBranch::Small => Ok(Cyclotomic::from_scalar(
            p,
            qpow(q, a) * BigRational::from_integer((q as i64 - 1).into()),
        )),
        KlInfBranch::PrimeField => Ok(kl_prime_field(&f, lead).to_exact().scale_qpow(q, a)),
        KlInfBranch::Residue => {
            // 1 + a~ = alpha / (a' t^{2a})
            let unit = alpha.shift(-2 * a).scale(f.inv(lead)?);
            let s = unit.sqrt_one_plus(-a - 2)?;
            let two = f.from_int(2);
            let mut acc = zero;
            for xp in f.sqrts(lead) {
                let c = f.mul(two, xp);
                let phase = psi(&s.scale(c).shift(a))?;
                let g = gauss_factor(&Laurent::monomial(&f, xp, a))?;
                acc += &g.rotate(phase.k as i64);
            }
            Ok(acc.scale_qpow(q, a))
        }
        _ => unreachable!(),
    }
}

/// `sum_{x mod c} psi_c(a x^2 + b x)` by direct summation.
pub fn quad_complete_sum(a: &Poly, b: &Poly, c: &Poly) -> Result<Cyclotomic<i64>> {
    let f = c.field();
    let d = c.deg().ok_or(Error::DivisionByZero)?;
    let pm = PsiMod::new(c, 2 * d + a.deg().unwrap_or(0) + b.deg().unwrap_or(0))?;
    let (a, b) = (a.rem(c)?, b.rem(c)?);
    let mut s = Cyclotomic::zero(f.p());
    for x in iter_below(f, d) {
        let v = &(&(&a * &x) + &b) * &x;
        s.add_zeta(pm.exponent(&v), 1);
    }
    Ok(s)
}

/// Closed form of [`quad_complete_sum`]: zero if `gcd(a,c)` does not divide
/// `b`; otherwise reduce by `d = gcd(a, c)` and complete the square,
/// `psi_c(-b^2 / 4a) (a/c) tau_c`.
pub fn quad_complete_sum_closed(a: &Poly, b: &Poly, c: &Poly) -> Result<Cyclotomic<i64>> {
    let f = c.field();
    let c = c.monic();
    if c.is_constant() {
        return Ok(Cyclotomic::one(f.p()));
    }
    let d = gcd_monic(a, &c)?;
    if !d.divides(b) {
        return Ok(Cyclotomic::zero(f.p()));
    }
    if !d.is_one() {
        let (a1, b1, c1) = (a.div_exact(&d)?, b.div_exact(&d)?, c.div_exact(&d)?);
        let size = (f.q() as i64).pow(d.deg().unwrap() as u32);
        return Ok(quad_complete_sum_closed(&a1, &b1, &c1)?.scale(&size));
    }
    let four_a = a.scale(f.from_int(4));
    let shift = to_residue(&-&(b * b), &four_a, &c)?;
    let pm = PsiMod::new(&c, c.deg().unwrap())?;
    let sign = jacobi(a, &c)? as i64;
    Ok(gauss_tau(&c)?
        .scale(&sign)
        .rotate(pm.exponent(&shift) as i64))
}

/// Number of distinct monic irreducible factors.
pub fn omega(r: &Poly) -> Result<u32> {
    Ok(factor(r)?.1.len() as u32)
}

/// Weil bound check `|Kl_r(m,n)| <= 2^omega(r) |(m,n,r)|^{1/2} |r|^{1/2}`.
pub fn weil_check(r: &Poly, m: &Poly, n: &Poly) -> Result<bool> {
    let kl = kl_finite(r, m, n)?.to_complex().norm();
    Ok(kl <= weil_bound(r, m, n)? + 1e-9)
}

pub fn weil_bound(r: &Poly, m: &Poly, n: &Poly) -> Result<f64> {
    if r.is_constant() {
        return Ok(1.0);
    }
    let q = r.field().q() as f64;
    let g = gcd_monic(&gcd_monic(&m.rem(r)?, &n.rem(r)?).unwrap_or(r.monic()), r)?;
    let w = omega(r)?;
    Ok(2f64.powi(w as i32)
        * q.powf(g.deg().unwrap() as f64 / 2.0)
        * q.powf(r.deg().unwrap() as f64 / 2.0))
}

/// Upper bound for `|Kl_inf(psi, alpha)|` read off the closed form: `0` for odd
/// `ord alpha`, `(q-1) q^a` for `a < -1` and `2 q^{a/2}` otherwise, where
/// `|alpha| = q^{2a}`.
pub fn kl_infinity_bound(alpha: &Laurent) -> Result<f64> {
    let q = alpha.field().q() as f64;
    Ok(match alpha.ord()? {
        Some(o) if o.rem_euclid(2) == 0 => {
            let a = (o / 2) as f64;
            if o / 2 < -1 {
                (q - 1.0) * q.powf(a)
            } else {
                2.0 * q.powf(a / 2.0)
            }
        }
        _ => 0.0,
    })
}

/// Floating value of an exact element, for reporting.
pub fn approx(x: &Exact) -> num_complex::Complex64 {
    x.to_complex()
}

/// Absolute value of an exact rational, as f64.
pub fn rat_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The F_q Gauss sum as an exact element (re-exported for convenience).
pub fn fq_gauss(field: &Fq, a: FqElem) -> Exact {
    fq_gauss_sum(field, a).to_exact()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn f3() -> Arc<Fq> {
        Fq::new(3).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn kl_infinity_bound_dominates_closed_form() {
        for q in [3, 5] {
            let f = Fq::new(q).unwrap();
            for c in f.units() {
                for j in -8..=4 {
                    for tail in [0, 1] {
                        let alpha = Laurent::from_terms(&f, &[(j, c), (j - 1, f.elem(tail))]);
                        let v = kl_infinity_closed(&alpha).unwrap().to_complex().norm();
                        assert!(
                            v <= kl_infinity_bound(&alpha).unwrap() + 1e-9,
                            "q={q} j={j}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kl_finite_examples() {
        let f = f3();
        let one = Poly::one(&f);
        let t = Poly::t(&f);
        assert_eq!(kl_finite(&one, &t, &t).unwrap(), Cyclotomic::one(3));
        let z = Poly::zero(&f);
        assert_eq!(kl_finite(&t, &z, &z).unwrap().as_scalar(), Some(2));
        assert_eq!(kl_finite(&t, &one, &one).unwrap().as_scalar(), Some(-1));
    }

    #[test]
    fn b_infinity_table_examples() {
        let f = f3();
        // |alpha| = q^{2a+b}
        let al = |e: i64| Laurent::monomial(&f, FqElem::ONE, e);
        assert_eq!(
            b_infinity(-2, &al(-3)).unwrap().as_scalar(),
            Some(rat(-1, 9))
        );
        assert_eq!(
            b_infinity(-3, &al(-5)).unwrap().as_scalar(),
            Some(rat(2, 27))
        );
        assert!(b_infinity(0, &al(2)).unwrap().is_zero());
        for (a, e) in [(-2, -3), (-3, -5), (0, 2)] {
            assert_eq!(
                b_infinity(a, &al(e)).unwrap(),
                b_infinity_closed(a, &al(e)).unwrap()
            );
        }
    }

    #[test]
    fn kl_infinity_examples() {
        let f = f3();
        let al = |e: i64| Laurent::monomial(&f, FqElem::ONE, e);
        assert_eq!(kl_infinity(&al(-4)).unwrap().as_scalar(), Some(rat(2, 9)));
        assert!(kl_infinity(&al(-3)).unwrap().is_zero());
        assert_eq!(kl_infinity(&al(-2)).unwrap().as_scalar(), Some(rat(-1, 3)));
        assert_eq!(
            kl_infinity_closed(&al(-2)).unwrap().as_scalar(),
            Some(rat(-1, 3))
        );
    }

    #[test]
    fn quad_sum_examples() {
        let f = f3();
        let t = Poly::t(&f);
        let one = Poly::one(&f);
        let z = Poly::zero(&f);
        assert_eq!(
            quad_complete_sum(&one, &z, &t).unwrap(),
            gauss_tau(&t).unwrap()
        );
        assert_eq!(quad_complete_sum(&z, &z, &t).unwrap().as_scalar(), Some(3));
        // gcd(a, c) = t does not divide b = 1
        assert!(
            quad_complete_sum(&t, &one, &Poly::from_ints(&f, &[0, 0, 1]))
                .unwrap()
                .is_zero()
        );
    }
}
