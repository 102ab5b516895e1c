//! Number theory in F_q[t]: gcd, inverses, CRT, m-parts, Jacobi symbols,
//! irreducibility, factorization and enumeration.

use std::sync::Arc;

use super::field::{Fq, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Monic generator of the ideal `(a, b)`.
pub fn gcd_monic(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroGcd);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// Extended Euclid: returns `(d, u, v)` with `u a + v b = d`, `d` monic.
pub fn ext_gcd(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroGcd);
    }
    let f = a.field();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
    let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1)?;
        let s = &s0 - &(&q * &s1);
        let t = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let c = f.inv(r0.lead())?;
    Ok((r0.scale(c), s0.scale(c), t0.scale(c)))
}

/// Inverse of `x` modulo `r`, reduced (`deg < deg r`). For a unit modulus the
/// only residue is 0.
pub fn inv_mod(x: &Poly, r: &Poly) -> Result<Poly> {
    if r.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if r.is_constant() {
        return Ok(Poly::zero(r.field()));
    }
    let xr = x.rem(r)?;
    let (d, u, _) = ext_gcd(&xr, r).map_err(|_| Error::NotUnit(x.to_string(), r.to_string()))?;
    if !d.is_one() {
        return Err(Error::NotUnit(x.to_string(), r.to_string()));
    }
    u.rem(r)
}

pub fn mul_mod(a: &Poly, b: &Poly, r: &Poly) -> Result<Poly> {
    (a * b).rem(r)
}

pub fn pow_mod(a: &Poly, mut e: u128, r: &Poly) -> Result<Poly> {
    let mut base = a.rem(r)?;
    let mut acc = Poly::one(a.field()).rem(r)?;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, r)?;
        }
        base = mul_mod(&base, &base, r)?;
        e >>= 1;
    }
    Ok(acc)
}

/// Largest monic divisor of `g` all of whose irreducible factors divide `r`,
/// i.e. `(g, r^inf)`. Computed by repeated squaring of the gcd.
pub fn m_part(g: &Poly, r: &Poly) -> Result<Poly> {
    if g.is_zero() || r.is_zero() {
        return Err(Error::Invalid("m_part needs nonzero arguments".into()));
    }
    let mut m = gcd_monic(g, r)?;
    loop {
        let next = gcd_monic(g, &(&m * &m))?;
        if next == m {
            return Ok(m);
        }
        m = next;
    }
}

/// Solves `x = a1 mod m1`, `x = a2 mod m2` for possibly non-coprime moduli.
/// Returns `(x, lcm)` with `x` reduced, or `None` when incompatible.
pub fn crt(a1: &Poly, m1: &Poly, a2: &Poly, m2: &Poly) -> Result<Option<(Poly, Poly)>> {
    let d = gcd_monic(m1, m2)?;
    let diff = a2 - a1;
    if !d.divides(&diff) {
        return Ok(None);
    }
    let m1d = m1.div_exact(&d)?;
    let m2d = m2.div_exact(&d)?;
    let lcm = (&m1d * m2).monic();
    let k = if m2d.is_constant() {
        Poly::zero(m1.field())
    } else {
        let inv = inv_mod(&m1d, &m2d)?;
        mul_mod(&diff.div_exact(&d)?, &inv, &m2d)?
    };
    let x = (a1 + &(m1 * &k)).rem(&lcm)?;
    Ok(Some((x, lcm)))
}

/// Quadratic character of F_q as `{-1, 0, 1}`.
pub fn chi(f: &Fq, c: FqElem) -> i32 {
    if c.is_zero() {
        0
    } else if f.is_square(c) {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a / r)` for monic `r`, via quadratic reciprocity in F_q[t]:
/// for coprime monic `a, r`, `(a/r)(r/a) = (-1)^{(q-1)/2 deg a deg r}` and
/// `(c/r) = chi(c)^{deg r}` for constants.
pub fn jacobi(a: &Poly, r: &Poly) -> Result<i32> {
    if !r.is_monic() {
        return Err(Error::NotMonic(r.to_string()));
    }
    let f = r.field().clone();
    let half = (f.q() as u64 - 1) / 2;
    let mut sign = 1i32;
    let mut a = a.rem(r)?;
    let mut r = r.clone();
    loop {
        let dr = r.deg().unwrap_or(0) as u64;
        if dr == 0 {
            return Ok(sign);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let c = a.lead();
        if dr % 2 == 1 {
            sign *= chi(&f, c);
        }
        let am = a.monic();
        let da = am.deg().unwrap() as u64;
        if (half * da * dr) % 2 == 1 {
            sign = -sign;
        }
        let next = r.rem(&am)?;
        r = am;
        a = next;
    }
}

/// Distinct-degree irreducibility test: `g` of degree `n` is irreducible iff
/// `gcd(t^{q^i} - t, g) = 1` for `1 <= i <= n/2`.
pub fn is_irreducible(g: &Poly) -> bool {
    let n = match g.deg() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = g.field();
    let q = f.q() as u128;
    let t = Poly::t(f);
    let mut x = t.clone();
    for _ in 1..=n / 2 {
        x = pow_mod(&x, q, g).unwrap();
        let d = gcd_monic(&(&x - &t), g).unwrap();
        if !d.is_one() {
            return false;
        }
    }
    true
}

/// Coefficient vector (length `len`) from a lexicographic rank, `c_0` most significant.
fn lex_coeffs(q: u64, mut idx: u64, len: usize) -> Vec<FqElem> {
    let mut cs = vec![FqElem::ZERO; len];
    for k in (0..len).rev() {
        cs[k] = FqElem((idx % q) as u32);
        idx /= q;
    }
    cs
}

/// Monic polynomials of exact degree `deg`, lexicographic on ascending coefficients.
pub fn iter_monic(field: &Arc<Fq>, deg: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.q() as u64;
    let count = q.pow(deg as u32);
    (0..count).map(move |idx| {
        let mut cs = lex_coeffs(q, idx, deg);
        cs.push(FqElem::ONE);
        Poly::from_coeffs(field, cs)
    })
}

/// All polynomials of degree `< len` (the residues mod a degree-`len` modulus),
/// lexicographic on ascending coefficients.
pub fn iter_below(field: &Arc<Fq>, len: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.q() as u64;
    let count = q.pow(len as u32);
    (0..count).map(move |idx| Poly::from_coeffs(field, lex_coeffs(q, idx, len)))
}

/// Monic polynomials with degree `<= max_deg`, by degree then lexicographically.
pub fn iter_monic_upto(field: &Arc<Fq>, max_deg: usize) -> impl Iterator<Item = Poly> + '_ {
    (0..=max_deg).flat_map(move |d| iter_monic(field, d))
}

pub fn iter_irreducible(field: &Arc<Fq>, deg: usize) -> impl Iterator<Item = Poly> + '_ {
    iter_monic(field, deg).filter(is_irreducible)
}

/// Factorization into monic irreducibles with multiplicities, plus the leading
/// coefficient. Trial division; intended for small degrees.
pub fn factor(p: &Poly) -> Result<(FqElem, Vec<(Poly, u32)>)> {
    if p.is_zero() {
        return Err(Error::Invalid("cannot factor zero".into()));
    }
    let f = p.field().clone();
    let lead = p.lead();
    let mut rest = p.monic();
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg().unwrap() >= 2 * d {
        for w in iter_irreducible(&f, d) {
            let mut e = 0;
            while w.divides(&rest) {
                rest = rest.div_exact(&w)?;
                e += 1;
            }
            if e > 0 {
                out.push((w, e));
            }
        }
        d += 1;
    }
    if !rest.is_constant() {
        // what is left is irreducible; merge if already present
        if let Some(entry) = out.iter_mut().find(|(w, _)| *w == rest) {
            entry.1 += 1;
        } else {
            out.push((rest, 1));
        }
        out.sort();
    }
    Ok((lead, out))
}

/// `v_w(p)`: multiplicity of the irreducible `w` in `p != 0`.
pub fn valuation(p: &Poly, w: &Poly) -> u32 {
    let mut x = p.clone();
    let mut v = 0;
    while !x.is_zero() && w.divides(&x) {
        x = x.div_exact(w).unwrap();
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Fq> {
        Fq::new(3).unwrap()
    }

    fn p(f: &Arc<Fq>, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    #[test]
    fn gcd_examples() {
        let f = f3();
        assert_eq!(
            gcd_monic(&p(&f, &[-1, 0, 1]), &p(&f, &[-1, 1])).unwrap(),
            p(&f, &[2, 1])
        );
        assert!(gcd_monic(&p(&f, &[0, 1]), &p(&f, &[-1, 1]))
            .unwrap()
            .is_one());
        assert_eq!(
            gcd_monic(&p(&f, &[2, 2]), &p(&f, &[1, 1])).unwrap(),
            p(&f, &[1, 1])
        );
        assert_eq!(
            gcd_monic(&Poly::zero(&f), &Poly::zero(&f)),
            Err(Error::ZeroGcd)
        );
    }

    #[test]
    fn inverse_examples() {
        let f = f3();
        let t = Poly::t(&f);
        assert_eq!(inv_mod(&t, &p(&f, &[-1, 1])).unwrap(), Poly::one(&f));
        assert_eq!(inv_mod(&t, &p(&f, &[1, 0, 1])).unwrap(), p(&f, &[0, 2]));
        assert!(inv_mod(&t, &p(&f, &[0, 1, 1])).is_err());
    }

    #[test]
    fn m_part_examples() {
        let f = f3();
        let t = Poly::t(&f);
        assert_eq!(m_part(&p(&f, &[0, 0, 1]), &t).unwrap(), p(&f, &[0, 0, 1]));
        assert!(m_part(&p(&f, &[1, 0, 1]), &t).unwrap().is_one());
        let g = p(&f, &[0, 1, 1]); // t(t+1)
        assert_eq!(m_part(&g, &p(&f, &[0, 0, 0, 1])).unwrap(), t);
    }

    #[test]
    fn jacobi_examples() {
        let f = f3();
        let r = p(&f, &[2, 1, 1]);
        assert_eq!(jacobi(&Poly::one(&f), &r).unwrap(), 1);
        assert_eq!(jacobi(&Poly::t(&f), &r).unwrap(), -1);
        assert_eq!(jacobi(&p(&f, &[-1]), &r).unwrap(), 1);
        assert!(jacobi(&Poly::t(&f), &p(&f, &[1, 2])).is_err());
    }

    #[test]
    fn irreducible_counts() {
        let f = f3();
        assert!(is_irreducible(&p(&f, &[1, 0, 1])));
        assert!(!is_irreducible(&p(&f, &[-1, 0, 1])));
        assert_eq!(iter_irreducible(&f, 2).count(), 3);
        assert_eq!(iter_irreducible(&f, 3).count(), 8);
        let f5 = Fq::new(5).unwrap();
        assert_eq!(iter_irreducible(&f5, 2).count(), 10);
    }

    #[test]
    fn lex_order_starts_with_constant_coefficient() {
        let f = f3();
        let v: Vec<String> = iter_monic(&f, 1).map(|x| x.to_string()).collect();
        assert_eq!(v, ["t", "t+1", "t+2"]);
        let first_two: Vec<String> = iter_monic(&f, 2).take(2).map(|x| x.to_string()).collect();
        assert_eq!(first_two, ["t^2", "t^2+t"]);
    }

    #[test]
    fn crt_non_coprime() {
        let f = f3();
        let t = Poly::t(&f);
        let t2 = p(&f, &[0, 0, 1]);
        let tp1 = p(&f, &[1, 1]);
        // x = 1 mod t, x = 0 mod t+1
        let (x, m) = crt(&Poly::one(&f), &t, &Poly::zero(&f), &tp1)
            .unwrap()
            .unwrap();
        assert_eq!(m, p(&f, &[0, 1, 1]));
        assert!(x.rem(&t).unwrap().is_one() && x.rem(&tp1).unwrap().is_zero());
        // x = t mod t^2, x = 0 mod t: compatible
        assert!(crt(&t, &t2, &Poly::zero(&f), &t).unwrap().is_some());
        // x = 1 mod t^2, x = 0 mod t: incompatible
        assert!(crt(&Poly::one(&f), &t2, &Poly::zero(&f), &t)
            .unwrap()
            .is_none());
    }

    #[test]
    fn factor_round_trip() {
        let f = f3();
        let x = p(&f, &[0, 2, 1, 0, 2, 1]);
        let (c, fs) = factor(&x).unwrap();
        let mut prod = Poly::constant(&f, c);
        for (w, e) in &fs {
            assert!(is_irreducible(w));
            prod = &prod * &w.pow(*e as u64);
        }
        assert_eq!(prod, x);
    }
}
