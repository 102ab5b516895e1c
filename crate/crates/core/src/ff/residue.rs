//! Residue rings `F_q[t]/(r)` and residue fields `F_{q^n} = F_q[t]/(g)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::arith::{self, gcd_monic, inv_mod, is_irreducible, pow_mod};
use super::field::{Fq, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

/// The ring `F_q[t]/(r)` for a nonzero modulus `r` (normalized to be monic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: Poly,
}

impl ResidueRing {
    pub fn new(r: &Poly) -> Result<Arc<ResidueRing>> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Arc::new(ResidueRing { modulus: r.monic() }))
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn field(&self) -> &Arc<Fq> {
        self.modulus.field()
    }

    /// Number of residues, `|r|`.
    pub fn size(&self) -> u64 {
        (self.field().q() as u64).pow(self.modulus.deg().unwrap() as u32)
    }

    pub fn reduce(&self, x: &Poly) -> Poly {
        x.rem(&self.modulus).expect("nonzero modulus")
    }

    pub fn elem(self: &Arc<Self>, x: &Poly) -> ResidueRingElem {
        ResidueRingElem {
            value: self.reduce(x),
            ring: self.clone(),
        }
    }

    /// All residues, lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Poly> + '_ {
        arith::iter_below(self.field(), self.modulus.deg().unwrap())
    }

    pub fn units(&self) -> impl Iterator<Item = Poly> + '_ {
        self.elements().filter(move |x| {
            gcd_monic(x, &self.modulus)
                .map(|d| d.is_one())
                .unwrap_or(false)
        })
    }
}

/// An element of a residue ring, always reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueRingElem {
    value: Poly,
    ring: Arc<ResidueRing>,
}

impl fmt::Debug for ResidueRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.ring.modulus)
    }
}

impl ResidueRingElem {
    pub fn value(&self) -> &Poly {
        &self.value
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn is_unit(&self) -> bool {
        gcd_monic(&self.value, &self.ring.modulus)
            .map(|d| d.is_one())
            .unwrap_or(false)
    }

    pub fn inv(&self) -> Result<ResidueRingElem> {
        Ok(self.ring.elem(&inv_mod(&self.value, &self.ring.modulus)?))
    }

    pub fn pow(&self, e: u128) -> ResidueRingElem {
        self.ring
            .elem(&pow_mod(&self.value, e, &self.ring.modulus).unwrap())
    }
}

macro_rules! residue_op {
    ($tr:ident, $m:ident) => {
        impl $tr for &ResidueRingElem {
            type Output = ResidueRingElem;
            fn $m(self, rhs: &ResidueRingElem) -> ResidueRingElem {
                debug_assert_eq!(self.ring, rhs.ring);
                self.ring.elem(&(&self.value).$m(&rhs.value))
            }
        }
    };
}

residue_op!(Add, add);
residue_op!(Sub, sub);
residue_op!(Mul, mul);

impl Neg for &ResidueRingElem {
    type Output = ResidueRingElem;
    fn neg(self) -> ResidueRingElem {
        self.ring.elem(&-&self.value)
    }
}

/// `F_q[t]/(g)` for irreducible `g`.
#[derive(Clone, Debug)]
pub struct ResidueField {
    ring: Arc<ResidueRing>,
}

impl ResidueField {
    pub fn new(g: &Poly) -> Result<ResidueField> {
        if !is_irreducible(g) {
            return Err(Error::Reducible(g.to_string()));
        }
        Ok(ResidueField {
            ring: ResidueRing::new(g)?,
        })
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn modulus(&self) -> &Poly {
        self.ring.modulus()
    }

    /// Field size `q^deg g`.
    pub fn size(&self) -> u64 {
        self.ring.size()
    }

    pub fn embed(&self, x: &Poly) -> ResidueRingElem {
        self.ring.elem(x)
    }

    /// Canonical lift: the reduced representative.
    pub fn lift(&self, x: &ResidueRingElem) -> Poly {
        x.value().clone()
    }

    /// Euler's criterion `x^{(|g|-1)/2} = 1`. Zero counts as a square.
    pub fn euler_is_square(&self, x: &Poly) -> bool {
        let x = self.ring.reduce(x);
        if x.is_zero() {
            return true;
        }
        let e = (self.size() as u128 - 1) / 2;
        pow_mod(&x, e, self.modulus()).unwrap().is_one()
    }

    /// Both square roots of `x` (sorted), found by search. Empty for non-squares.
    pub fn sqrts(&self, x: &Poly) -> Vec<Poly> {
        let x = self.ring.reduce(x);
        if !self.euler_is_square(&x) {
            return vec![];
        }
        let mut out: Vec<Poly> = self
            .ring
            .elements()
            .filter(|y| self.ring.reduce(&(y * y)) == x)
            .collect();
        out.sort();
        out
    }
}

/// Square roots of `x` modulo an arbitrary monic `r` coprime to 2x, by search.
pub fn sqrts_mod(x: &Poly, r: &Poly) -> Vec<Poly> {
    let ring = ResidueRing { modulus: r.monic() };
    let x = ring.reduce(x);
    let mut out: Vec<Poly> = ring
        .elements()
        .filter(|y| ring.reduce(&(y * y)) == x)
        .collect();
    out.sort();
    out
}

/// Residue ring with elements encoded as `u32` indices (`sum c_i q^i`) and a
/// precomputed multiplication table when small. Used by the graph code.
pub struct IndexedRing {
    field: Arc<Fq>,
    modulus: Poly,
    deg: usize,
    size: u32,
    add: Vec<u32>,
    mul: Option<Vec<u32>>,
    neg: Vec<u32>,
    unit: Vec<bool>,
    inv: Vec<u32>,
}

/// Rings up to this size get a full multiplication table.
const TABLE_LIMIT: u32 = 4096;

impl IndexedRing {
    pub fn new(modulus: &Poly) -> Result<IndexedRing> {
        let m = modulus.monic();
        let deg = m.deg().ok_or(Error::DivisionByZero)?;
        let field = m.field().clone();
        let size64 = (field.q() as u64).pow(deg as u32);
        if size64 > 1 << 24 {
            return Err(Error::Budget {
                what: "residue ring size".into(),
                needed: size64 as u128,
                budget: 1 << 24,
            });
        }
        let size = size64 as u32;
        let mut ring = IndexedRing {
            field,
            modulus: m,
            deg,
            size,
            add: vec![],
            mul: None,
            neg: vec![0; size as usize],
            unit: vec![false; size as usize],
            inv: vec![0; size as usize],
        };
        if size <= TABLE_LIMIT {
            let mut add = vec![0; (size * size) as usize];
            let mut mul = vec![0; (size * size) as usize];
            for a in 0..size {
                let pa = ring.poly(a);
                for b in 0..size {
                    let pb = ring.poly(b);
                    add[(a * size + b) as usize] = ring.index(&(&pa + &pb));
                    mul[(a * size + b) as usize] = ring.index(&(&pa * &pb).rem(&ring.modulus)?);
                }
            }
            ring.add = add;
            ring.mul = Some(mul);
        }
        for a in 0..size {
            let pa = ring.poly(a);
            ring.neg[a as usize] = ring.index(&-&pa);
            if let Ok(i) = inv_mod(&pa, &ring.modulus) {
                if !ring.modulus.is_constant() || a == 0 {
                    ring.unit[a as usize] = true;
                    ring.inv[a as usize] = ring.index(&i);
                }
            }
        }
        Ok(ring)
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn poly(&self, idx: u32) -> Poly {
        Poly::from_index(&self.field, idx as u64)
    }

    /// Index of a polynomial after reduction.
    pub fn index(&self, p: &Poly) -> u32 {
        p.rem(&self.modulus).unwrap().to_index() as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.add.is_empty() {
            return self.index(&(&self.poly(a) + &self.poly(b)));
        }
        self.add[(a * self.size + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            Some(t) => t[(a * self.size + b) as usize],
            None => self.index(&(&self.poly(a) * &self.poly(b))),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.unit[a as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        self.unit[a as usize].then(|| self.inv[a as usize])
    }

    /// Image of a constant.
    pub fn constant(&self, c: FqElem) -> u32 {
        if self.deg == 0 {
            0
        } else {
            c.index()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_examples() {
        let f = Fq::new(3).unwrap();
        let g = Poly::from_ints(&f, &[2, 1, 1]);
        let k = ResidueField::new(&g).unwrap();
        assert!(k.euler_is_square(&Poly::one(&f)));
        assert!(!k.euler_is_square(&Poly::t(&f)));
        assert!(k.euler_is_square(&Poly::from_ints(&f, &[-1])));
        let t4 = pow_mod(&Poly::t(&f), 4, &g).unwrap();
        assert_eq!(t4, Poly::from_ints(&f, &[-1]));
        assert!(ResidueField::new(&Poly::from_ints(&f, &[-1, 0, 1])).is_err());
    }

    #[test]
    fn indexed_ring_matches_polys() {
        let f = Fq::new(3).unwrap();
        let g = Poly::from_ints(&f, &[1, 0, 2, 0, 1]); // (t^2+1)^2
        let r = IndexedRing::new(&g).unwrap();
        assert_eq!(r.size(), 81);
        for a in (0..81).step_by(7) {
            for b in 0..81 {
                let p = (&r.poly(a) * &r.poly(b)).rem(&g).unwrap();
                assert_eq!(r.mul(a, b), p.to_index() as u32);
            }
            if let Some(i) = r.inv(a) {
                assert_eq!(r.mul(a, i), 1);
            }
        }
        // units: 81 - 9 (multiples of t^2+1)
        assert_eq!((0..81).filter(|&a| r.is_unit(a)).count(), 72);
    }
}
