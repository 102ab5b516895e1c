//! Polynomials over F_q.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::field::{Fq, FqElem};
use crate::error::{Error, Result};

/// Element of F_q[t], coefficients ascending, no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: Arc<Fq>,
    coeffs: Vec<FqElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field.q() == other.field.q()
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Orders by degree, then lexicographically on ascending coefficient vectors.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = self.field.format_elem(c);
            match i {
                0 => write!(f, "{cs}")?,
                _ => {
                    if c != FqElem::ONE {
                        write!(f, "{cs}")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn from_coeffs(field: &Arc<Fq>, coeffs: Vec<FqElem>) -> Poly {
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    /// Coefficients given as integers, mapped into F_q by index (values
    /// reduced modulo `q` after making them non-negative mod `p` for prime fields).
    pub fn from_ints(field: &Arc<Fq>, coeffs: &[i64]) -> Poly {
        let cs = coeffs
            .iter()
            .map(|&c| {
                if field.degree() == 1 {
                    field.from_int(c)
                } else {
                    field.elem(c.rem_euclid(field.q() as i64) as u32)
                }
            })
            .collect();
        Poly::from_coeffs(field, cs)
    }

    pub fn zero(field: &Arc<Fq>) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Arc<Fq>) -> Poly {
        Poly::constant(field, FqElem::ONE)
    }

    pub fn constant(field: &Arc<Fq>, c: FqElem) -> Poly {
        Poly::from_coeffs(field, vec![c])
    }

    /// The variable `t`.
    pub fn t(field: &Arc<Fq>) -> Poly {
        Poly::monomial(field, FqElem::ONE, 1)
    }

    pub fn monomial(field: &Arc<Fq>, c: FqElem, deg: usize) -> Poly {
        let mut coeffs = vec![FqElem::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::from_coeffs(field, coeffs)
    }

    /// `t - a` for a field element `a`.
    pub fn linear(field: &Arc<Fq>, a: FqElem) -> Poly {
        Poly::from_coeffs(field, vec![field.neg(a), FqElem::ONE])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FqElem::ONE
    }

    /// Degree, `None` for the zero polynomial (degree -inf).
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with `deg(0) = i64::MIN`; handy for norm comparisons.
    pub fn deg_i(&self) -> i64 {
        self.deg().map(|d| d as i64).unwrap_or(i64::MIN)
    }

    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == FqElem::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).unwrap();
        self.scale(inv)
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let f = &self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
            .collect();
        Poly::from_coeffs(f, coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let lead_inv = f.inv(d.lead())?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![FqElem::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = rem[top];
            if c.is_zero() {
                continue;
            }
            let m = f.mul(c, lead_inv);
            quo[top - dd] = m;
            for (k, &dk) in d.coeffs.iter().enumerate() {
                let i = top - dd + k;
                rem[i] = f.sub(rem[i], f.mul(m, dk));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(f, quo), Poly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::Invalid(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        match other.rem(self) {
            Ok(r) => r.is_zero(),
            Err(_) => other.is_zero(),
        }
    }

    /// Index of this polynomial among polynomials of degree `< len` in the natural
    /// base-q encoding `sum c_i q^i`.
    pub fn to_index(&self) -> u64 {
        let q = self.field.q() as u64;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, c| acc * q + c.index() as u64)
    }

    pub fn from_index(field: &Arc<Fq>, mut idx: u64) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::new();
        while idx > 0 {
            coeffs.push(FqElem((idx % q) as u32));
            idx /= q;
        }
        Poly::from_coeffs(field, coeffs)
    }

    /// Machine format: comma-separated ascending coefficient indices.
    pub fn to_machine(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if self.coeffs.len() == 1 && self.coeffs[0].index() >= self.field.p() {
            // a bare integer would be read as an element of the prime field
            return format!("{},", self.coeffs[0].index());
        }
        self.coeffs
            .iter()
            .map(|c| c.index().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub(crate) fn same_field(&self, other: &Poly) {
        debug_assert_eq!(
            self.field.q(),
            other.field.q(),
            "polynomials over different fields"
        );
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.same_field(rhs);
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_coeffs(f, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.same_field(rhs);
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_coeffs(f, coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.same_field(rhs);
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(f, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
