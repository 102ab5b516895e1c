//! Truncated Laurent series in `1/t`, i.e. elements of `K_inf = F_q((1/t))`.
//!
//! A series stores the coefficients of `t^lo, ..., t^hi`. If it is not
//! `exact`, coefficients below `lo` are unknown and any attempt to read them
//! is a precision error. Exact series (polynomials, finite sums of monomials)
//! are zero below `lo`.

use std::fmt;
use std::sync::Arc;

use super::field::{Fq, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Default lowest known degree for series produced by division.
pub const DEFAULT_LO: i64 = -64;

#[derive(Clone)]
pub struct Laurent {
    field: Arc<Fq>,
    lo: i64,
    /// `coeffs[i]` is the coefficient of `t^(lo + i)`.
    coeffs: Vec<FqElem>,
    exact: bool,
}

impl PartialEq for Laurent {
    /// Equality of the known parts at the common precision.
    fn eq(&self, other: &Self) -> bool {
        let lo = self.known_lo().max(other.known_lo());
        let hi = self.top().max(other.top());
        (lo..=hi).all(|d| self.coeff_unchecked(d) == other.coeff_unchecked(d))
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let d = self.lo + i as i64;
            let cs = self.field.format_elem(c);
            terms.push(match (d, c == FqElem::ONE) {
                (0, _) => cs,
                (1, true) => "t".into(),
                (1, false) => format!("{cs}t"),
                (_, true) => format!("t^{d}"),
                (_, false) => format!("{cs}t^{d}"),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{}", terms.join("+"))?;
        if !self.exact {
            write!(f, "+O(t^{})", self.lo)?;
        }
        Ok(())
    }
}

impl Laurent {
    fn build(field: &Arc<Fq>, lo: i64, coeffs: Vec<FqElem>, exact: bool) -> Laurent {
        let mut s = Laurent {
            field: field.clone(),
            lo,
            coeffs,
            exact,
        };
        while s.coeffs.last().is_some_and(|c| c.is_zero()) {
            s.coeffs.pop();
        }
        if s.exact {
            // drop leading zeros at the bottom as well
            let skip = s.coeffs.iter().take_while(|c| c.is_zero()).count();
            s.coeffs.drain(..skip);
            s.lo += skip as i64;
            if s.coeffs.is_empty() {
                s.lo = 0;
            }
        }
        s
    }

    pub fn zero(field: &Arc<Fq>) -> Laurent {
        Laurent::build(field, 0, vec![], true)
    }

    pub fn from_poly(p: &Poly) -> Laurent {
        Laurent::build(p.field(), 0, p.coeffs().to_vec(), true)
    }

    /// The exact monomial `c t^d`.
    pub fn monomial(field: &Arc<Fq>, c: FqElem, d: i64) -> Laurent {
        Laurent::build(field, d, vec![c], true)
    }

    /// Exact series from `(degree, coefficient)` pairs.
    pub fn from_terms(field: &Arc<Fq>, terms: &[(i64, FqElem)]) -> Laurent {
        if terms.is_empty() {
            return Laurent::zero(field);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![FqElem::ZERO; (hi - lo + 1) as usize];
        for &(d, c) in terms {
            let i = (d - lo) as usize;
            coeffs[i] = field.add(coeffs[i], c);
        }
        Laurent::build(field, lo, coeffs, true)
    }

    /// Expansion of `a / b` known down to degree `lo`.
    pub fn from_fraction(a: &Poly, b: &Poly, lo: i64) -> Result<Laurent> {
        Laurent::from_poly(a).div_prec(&Laurent::from_poly(b), lo)
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Lowest degree whose coefficient is known (`i64::MIN` for exact series).
    pub fn known_lo(&self) -> i64 {
        if self.exact {
            i64::MIN
        } else {
            self.lo
        }
    }

    /// Precision bound `lo` as stored.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    fn top(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    fn coeff_unchecked(&self, d: i64) -> FqElem {
        if d < self.lo {
            return FqElem::ZERO;
        }
        self.coeffs
            .get((d - self.lo) as usize)
            .copied()
            .unwrap_or(FqElem::ZERO)
    }

    /// Coefficient of `t^d`; precision error below the known range.
    pub fn coeff(&self, d: i64) -> Result<FqElem> {
        if !self.exact && d < self.lo {
            return Err(Error::Precision {
                needed: d,
                known: self.lo,
            });
        }
        Ok(self.coeff_unchecked(d))
    }

    /// Known-zero test; errors when the known part vanishes but the tail is unknown.
    pub fn is_zero(&self) -> Result<bool> {
        match self.coeffs.is_empty() {
            false => Ok(false),
            true if self.exact => Ok(true),
            true => Err(Error::Precision {
                needed: self.lo - 1,
                known: self.lo,
            }),
        }
    }

    /// `ord`: degree of the top nonzero coefficient, `None` for zero. Then
    /// `|x| = q^ord`.
    pub fn ord(&self) -> Result<Option<i64>> {
        if self.is_zero()? {
            return Ok(None);
        }
        Ok(Some(self.top()))
    }

    /// Top (leading) coefficient; errors on zero.
    pub fn lead(&self) -> Result<FqElem> {
        if self.is_zero()? {
            return Err(Error::DivisionByZero);
        }
        Ok(*self.coeffs.last().unwrap())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            field: self.field.clone(),
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, c: FqElem) -> Laurent {
        let f = &self.field;
        Laurent::build(
            f,
            self.lo,
            self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
            self.exact,
        )
    }

    /// Polynomial part (degrees `>= 0`); needs all nonnegative degrees known.
    pub fn poly_part(&self) -> Result<Poly> {
        self.coeff(0)?;
        let coeffs = (0..=self.top().max(-1))
            .map(|d| self.coeff_unchecked(d))
            .collect();
        Ok(Poly::from_coeffs(&self.field, coeffs))
    }

    /// Strictly negative-degree part `((x))`, truncated at the same precision.
    pub fn frac_part(&self) -> Laurent {
        let top = self.top().min(-1);
        if top < self.lo {
            return Laurent::build(&self.field, self.lo.min(0), vec![], self.exact);
        }
        let coeffs = (self.lo..=top).map(|d| self.coeff_unchecked(d)).collect();
        Laurent::build(&self.field, self.lo, coeffs, self.exact)
    }

    /// Truncation: forget everything below degree `lo`.
    pub fn truncate(&self, lo: i64) -> Laurent {
        if !self.exact && lo <= self.lo {
            return self.clone();
        }
        let top = self.top();
        let coeffs = if top < lo {
            vec![]
        } else {
            (lo..=top).map(|d| self.coeff_unchecked(d)).collect()
        };
        Laurent::build(&self.field, lo, coeffs, false)
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.combine(other, true)
    }

    fn combine(&self, other: &Laurent, negate: bool) -> Laurent {
        let f = &self.field;
        let exact = self.exact && other.exact;
        let lo = if exact {
            self.lo.min(other.lo)
        } else {
            self.known_lo().max(other.known_lo())
        };
        let hi = self.top().max(other.top());
        if hi < lo {
            return Laurent::build(f, lo, vec![], exact);
        }
        let coeffs = (lo..=hi)
            .map(|d| {
                let b = other.coeff_unchecked(d);
                let b = if negate { f.neg(b) } else { b };
                f.add(self.coeff_unchecked(d), b)
            })
            .collect();
        Laurent::build(f, lo, coeffs, exact)
    }

    pub fn neg(&self) -> Laurent {
        let f = &self.field;
        Laurent::build(
            f,
            self.lo,
            self.coeffs.iter().map(|&a| f.neg(a)).collect(),
            self.exact,
        )
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let f = &self.field;
        if self.coeffs.is_empty() && self.exact || other.coeffs.is_empty() && other.exact {
            return Laurent::zero(f);
        }
        let exact = self.exact && other.exact;
        // An unknown tail O(t^lo_a) times b contributes from degree lo_a + top(b) downward.
        let lo = if exact {
            self.lo + other.lo
        } else {
            let mut lo = i64::MIN;
            if !self.exact {
                lo = lo.max(self.lo + other.top().max(other.lo));
            }
            if !other.exact {
                lo = lo.max(other.lo + self.top().max(self.lo));
            }
            lo
        };
        let base = self.lo + other.lo;
        let mut prod = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(a, b));
            }
        }
        let s = Laurent::build(f, base, prod, true);
        if exact {
            s
        } else {
            s.truncate(lo)
        }
    }

    /// Inverse known down to degree `lo` (or as far as the input allows).
    pub fn inv_prec(&self, lo: i64) -> Result<Laurent> {
        let f = self.field.clone();
        let d = self.ord()?.ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(self.lead()?)?;
        // x = t^d c (1 - e), e of negative degree; 1/x = t^{-d} c^{-1} sum e^k.
        let mut target = lo;
        if !self.exact {
            // relative precision of the input is lo_in - d
            target = target.max(-d + (self.lo - d));
        }
        let n = (-d - target).max(-1) + 1; // number of coefficients t^{-d}, ..., t^{target}
        let mut out = vec![FqElem::ZERO; n as usize];
        // out[k] = coefficient of t^{-d-k}
        for k in 0..n as usize {
            let mut acc = if k == 0 { FqElem::ONE } else { FqElem::ZERO };
            for j in 1..=k {
                let a = self.coeff_unchecked(d - j as i64);
                if !a.is_zero() {
                    acc = f.sub(acc, f.mul(a, out[k - j]));
                }
            }
            out[k] = f.mul(acc, lead_inv);
        }
        out.reverse();
        Ok(Laurent::build(&f, -d - n + 1, out, false))
    }

    pub fn inv(&self) -> Result<Laurent> {
        self.inv_prec(DEFAULT_LO)
    }

    pub fn div_prec(&self, other: &Laurent, lo: i64) -> Result<Laurent> {
        if self.is_zero()? {
            return Ok(Laurent::zero(&self.field));
        }
        let top = self.top();
        // quotient precision lo needs the inverse down to lo - top
        let inv = other.inv_prec(lo - top)?;
        Ok(self.mul(&inv).truncate(lo.max(self.mul(&inv).lo)))
    }

    pub fn div(&self, other: &Laurent) -> Result<Laurent> {
        self.div_prec(other, DEFAULT_LO)
    }

    /// Square root with constant term 1 of a series `1 + e`, `|e| < 1`,
    /// known down to degree `lo`.
    pub fn sqrt_one_plus(&self, lo: i64) -> Result<Laurent> {
        let f = self.field.clone();
        if self.coeff(0)? != FqElem::ONE || self.top() > 0 {
            return Err(Error::Invalid(format!(
                "{self} is not of the form 1 + O(1/t)"
            )));
        }
        let target = if self.exact { lo } else { lo.max(self.lo) };
        let two_inv = f.inv(f.from_int(2))?;
        // s = 1 + s_1 t^{-1} + ..., s^2 = x: 2 s_k = x_{-k} - sum_{0<j<k} s_j s_{k-j}
        let n = (-target + 1).max(1) as usize;
        let mut s = vec![FqElem::ZERO; n];
        s[0] = FqElem::ONE;
        for k in 1..n {
            let mut acc = self.coeff_unchecked(-(k as i64));
            for j in 1..k {
                acc = f.sub(acc, f.mul(s[j], s[k - j]));
            }
            s[k] = f.mul(acc, two_inv);
        }
        s.reverse();
        Ok(Laurent::build(&f, -(n as i64) + 1, s, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Fq> {
        Fq::new(3).unwrap()
    }

    #[test]
    fn fraction_expansion() {
        let f = f3();
        // (t+2)/t^2 = t^-1 + 2 t^-2
        let a = Poly::from_ints(&f, &[2, 1]);
        let b = Poly::from_ints(&f, &[0, 0, 1]);
        let x = Laurent::from_fraction(&a, &b, -10).unwrap();
        assert_eq!(x.coeff(-1).unwrap(), FqElem::ONE);
        assert_eq!(x.coeff(-2).unwrap(), f.from_int(2));
        assert_eq!(x.coeff(-3).unwrap(), FqElem::ZERO);
        assert!(x.coeff(-11).is_err());
    }

    #[test]
    fn inverse_times_self_is_one() {
        let f = f3();
        let x = Laurent::from_poly(&Poly::from_ints(&f, &[1, 2, 0, 1]));
        let y = x.inv_prec(-20).unwrap();
        let z = x.mul(&y);
        assert_eq!(z.coeff(0).unwrap(), FqElem::ONE);
        for d in -17..0 {
            assert_eq!(z.coeff(d).unwrap(), FqElem::ZERO, "degree {d}");
        }
    }

    #[test]
    fn precision_errors_are_loud() {
        let f = f3();
        let x = Laurent::from_fraction(&Poly::one(&f), &Poly::from_ints(&f, &[1, 1]), -5).unwrap();
        assert!(matches!(x.coeff(-6), Err(Error::Precision { .. })));
        let y = x.mul(&Laurent::monomial(&f, FqElem::ONE, 3));
        assert!(y.coeff(-2).is_ok());
        assert!(y.coeff(-3).is_err());
    }

    #[test]
    fn sqrt_squares_back() {
        let f = Fq::new(5).unwrap();
        let x = Laurent::from_terms(
            &f,
            &[(0, FqElem::ONE), (-1, f.from_int(3)), (-2, f.from_int(1))],
        );
        let s = x.sqrt_one_plus(-15).unwrap();
        let sq = s.mul(&s);
        for d in -14..=0 {
            assert_eq!(sq.coeff(d).unwrap(), x.coeff(d).unwrap(), "degree {d}");
        }
    }
}
