//! The finite field F_q of odd characteristic.
//!
//! Elements are stored as indices in `0..q`: the element
//! `a_0 + a_1 u + ... + a_{n-1} u^{n-1}` of `F_p[u]/(h(u))` has index
//! `a_0 + a_1 p + ... + a_{n-1} p^{n-1}`. For prime `q` the index is the
//! residue itself. All arithmetic goes through precomputed tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field size for which tables are built.
pub const MAX_Q: u32 = 2048;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub struct Fq {
    p: u32,
    n: u32,
    q: u32,
    /// Defining polynomial `h(u)` of the extension, ascending coefficients in F_p, monic.
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    trace: Vec<u32>,
    sqrt: Vec<Option<u32>>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for Fq {}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^n`, returning `None` when `q` is not a prime power.
fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let (mut m, mut n) = (q, 0);
    while m % p == 0 {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p as u32, n))
}

// Dense polynomial helpers over F_p used only while building the tables.
fn fp_poly_mulmod(a: &[u32], b: &[u32], h: &[u32], p: u32) -> Vec<u32> {
    let n = h.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for d in (n..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            for k in 0..=n {
                let idx = d - n + k;
                prod[idx] = (prod[idx] + (p as u64 - c) * h[k] as u64) % p as u64;
            }
        }
    }
    prod.truncate(n);
    prod.into_iter().map(|x| x as u32).collect()
}

fn fp_irreducible(h: &[u32], p: u32) -> bool {
    // Trial division by every monic polynomial of degree 1..=deg/2.
    let n = h.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                div.push((x % p as u64) as u32);
                x /= p as u64;
            }
            div.push(1);
            // remainder of h by div
            let mut rem: Vec<u64> = h.iter().map(|&c| c as u64).collect();
            for top in (d..=n).rev() {
                let c = rem[top];
                if c != 0 {
                    for k in 0..=d {
                        let i = top - d + k;
                        rem[i] = (rem[i] + (p as u64 - c) * div[k] as u64) % p as u64;
                    }
                }
            }
            if rem[..d].iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Fixed modulus for `F_{p^n}`: `u^2 - (least non-residue)` for `n = 2`
/// (so `F_9 = F_3[u]/(u^2+1)`), otherwise the first monic irreducible in
/// lexicographic order of ascending coefficient vectors.
fn extension_modulus(p: u32, n: u32) -> Vec<u32> {
    if n == 2 {
        let nonres = (2..p)
            .find(|&a| (1..p).all(|x| (x * x) % p != a))
            .expect("odd prime has a non-residue");
        return vec![(p - nonres) % p, 0, 1];
    }
    let count = (p as u64).pow(n);
    for idx in 0..count {
        let mut h = Vec::with_capacity(n as usize + 1);
        let mut x = idx;
        let mut digits = vec![0u32; n as usize];
        // lexicographic on (c_0, c_1, ...) with c_0 most significant
        for k in (0..n as usize).rev() {
            digits[k] = (x % p as u64) as u32;
            x /= p as u64;
        }
        h.extend_from_slice(&digits);
        h.push(1);
        if h[0] != 0 && fp_irreducible(&h, p) {
            return h;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Fq {
    /// Builds `F_q`. Fails for even or non-prime-power `q`.
    pub fn new(q: u64) -> Result<Arc<Fq>> {
        let (p, n) = prime_power(q).ok_or(Error::UnsupportedField(q))?;
        if p == 2 || q > MAX_Q as u64 {
            return Err(Error::UnsupportedField(q));
        }
        let q = q as u32;
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            extension_modulus(p, n)
        };
        let digits = |mut x: u32| -> Vec<u32> {
            (0..n)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let undigits = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let mut neg = vec![0; qs];
        for a in 0..q {
            let da = digits(a);
            neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>());
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s);
                let m = if n == 1 {
                    vec![((a as u64 * b as u64) % p as u64) as u32]
                } else {
                    fp_poly_mulmod(&da, &db, &modulus, p)
                };
                mul[a as usize * qs + b as usize] = undigits(&m);
            }
        }
        let mut inv = vec![0; qs];
        for a in 1..q {
            inv[a as usize] = (1..q)
                .find(|&b| mul[a as usize * qs + b as usize] == 1)
                .expect("field element is invertible");
        }
        let mut sqrt = vec![None; qs];
        for x in 0..q {
            let s = mul[x as usize * qs + x as usize] as usize;
            if sqrt[s].is_none() || x < sqrt[s].unwrap() {
                sqrt[s] = Some(x);
            }
        }
        // trace(a) = a + a^p + ... + a^{p^{n-1}}, lands in the prime field (index < p)
        let pow = |mut a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul[r as usize * qs + a as usize];
                }
                a = mul[a as usize * qs + a as usize];
                e >>= 1;
            }
            r
        };
        let mut trace = vec![0; qs];
        for a in 0..q {
            let mut t = 0u32;
            let mut e = 1u64;
            for _ in 0..n {
                t = add[t as usize * qs + pow(a, e) as usize];
                e *= p as u64;
            }
            debug_assert!(t < p);
            trace[a as usize] = t;
        }
        Ok(Arc::new(Fq {
            p,
            n,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            trace,
            sqrt,
        }))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Ascending F_p coefficients of the extension modulus (`[0, 1]` for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FqElem(self.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let (mut base, mut acc) = (a, FqElem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to F_p, returned as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }

    pub fn is_square(&self, a: FqElem) -> bool {
        self.sqrt[a.0 as usize].is_some()
    }

    /// Smallest-index square root, if any.
    pub fn sqrt(&self, a: FqElem) -> Option<FqElem> {
        self.sqrt[a.0 as usize].map(FqElem)
    }

    /// All square roots of `a` (zero, one or two of them), in index order.
    pub fn sqrts(&self, a: FqElem) -> Vec<FqElem> {
        match self.sqrt(a) {
            None => vec![],
            Some(r) if r.is_zero() => vec![r],
            Some(r) => {
                let mut v = vec![r, self.neg(r)];
                v.sort();
                v
            }
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, x: i64) -> FqElem {
        FqElem(x.rem_euclid(self.p as i64) as u32)
    }

    /// Element with the given index; panics if `idx >= q`.
    pub fn elem(&self, idx: u32) -> FqElem {
        assert!(idx < self.q, "index {idx} out of range for F_{}", self.q);
        FqElem(idx)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    pub fn units(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q).map(FqElem)
    }

    /// Least non-square in index order.
    pub fn least_nonsquare(&self) -> FqElem {
        self.units()
            .find(|&a| !self.is_square(a))
            .expect("odd field has non-squares")
    }

    /// Renders an element: plain integer for prime fields, `a+bu` otherwise.
    pub fn format_elem(&self, a: FqElem) -> String {
        if self.n == 1 {
            return a.0.to_string();
        }
        let mut x = a.0;
        let mut terms = Vec::new();
        for i in 0..self.n {
            let d = x % self.p;
            x /= self.p;
            if d != 0 {
                terms.push(match (i, d) {
                    (0, _) => d.to_string(),
                    (1, 1) => "u".to_string(),
                    (1, _) => format!("{d}u"),
                    (_, 1) => format!("u^{i}"),
                    _ => format!("{d}u^{i}"),
                });
            }
        }
        if terms.is_empty() {
            "0".into()
        } else if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            format!("({})", terms.join("+"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite() {
        assert!(Fq::new(2).is_err());
        assert!(Fq::new(4).is_err());
        assert!(Fq::new(6).is_err());
        assert!(Fq::new(15).is_err());
        assert!(Fq::new(3).is_ok());
        assert!(Fq::new(9).is_ok());
        assert!(Fq::new(27).is_ok());
    }

    #[test]
    fn f9_uses_u2_plus_1() {
        let f = Fq::new(9).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let u = f.elem(3);
        // u^2 = -1
        assert_eq!(f.mul(u, u), f.from_int(-1));
        // tr(u) = u + u^3 = u - u = 0
        assert_eq!(f.trace(u), 0);
        assert_eq!(f.trace(f.elem(1)), 2);
    }

    #[test]
    fn field_axioms_small() {
        for q in [3u64, 5, 7, 9, 25, 27] {
            let f = Fq::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FqElem::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements().step_by(2) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            let squares = f.units().filter(|&a| f.is_square(a)).count();
            assert_eq!(squares as u32, (f.q() - 1) / 2);
        }
    }
}
