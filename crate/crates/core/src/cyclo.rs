//! Exact arithmetic in the cyclotomic field `Q(zeta_p)`.
//!
//! Every additive character value of F_q (odd characteristic `p`) is a power
//! of `zeta_p = exp(2 pi i / p)`, and every closed form used in this crate
//! lands in `Q(zeta_p)`. Elements are stored as `sum_{k<p} c_k zeta^k`
//! normalized so that `c_{p-1} = 0`, which makes the representation unique.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficient ring requirements.
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + ToPrimitive
    + fmt::Debug
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + ToPrimitive
        + fmt::Debug
{
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<S> {
    p: u32,
    coeffs: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Cyclotomic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{c:?}*z^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{} (p={})", terms.join(" + "), self.p)
        }
    }
}

impl<S: Scalar> Cyclotomic<S> {
    pub fn zero(p: u32) -> Self {
        Cyclotomic {
            p,
            coeffs: vec![S::zero(); p as usize],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::zeta_pow(p, 0)
    }

    /// `zeta_p^k`.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[k.rem_euclid(p as i64) as usize] = S::one();
        z.normalize();
        z
    }

    pub fn from_scalar(p: u32, s: S) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = s;
        z
    }

    /// Element from raw (unnormalized) multiplicities of `zeta^k`.
    pub fn from_counts(p: u32, counts: Vec<S>) -> Self {
        assert_eq!(counts.len(), p as usize);
        let mut z = Cyclotomic { p, coeffs: counts };
        z.normalize();
        z
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Normalized coefficients `c_0..c_{p-1}` (the last one is zero).
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    fn normalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c = c.clone() - last.clone();
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Rational value if the element lies in `Q`.
    pub fn as_scalar(&self) -> Option<S> {
        self.coeffs[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| self.coeffs[0].clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    /// Adds `s * zeta^k` in place.
    pub fn add_zeta(&mut self, k: u32, s: S) {
        let k = (k % self.p) as usize;
        let last = self.p as usize - 1;
        if k == last {
            for c in self.coeffs[..last].iter_mut() {
                *c = c.clone() - s.clone();
            }
        } else {
            self.coeffs[k] = self.coeffs[k].clone() + s;
        }
    }

    /// Multiplication by `zeta^k`.
    pub fn rotate(&self, k: i64) -> Self {
        let p = self.p as usize;
        let k = k.rem_euclid(p as i64) as usize;
        let mut coeffs = vec![S::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i + k) % p] = c.clone();
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }

    /// Complex conjugate (`zeta -> zeta^{-1}`).
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut coeffs = vec![S::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(p - i) % p] = c.clone();
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }

    /// Image under the Galois automorphism `zeta -> zeta^a`, `p` not dividing `a`.
    pub fn galois(&self, a: i64) -> Self {
        let p = self.p as usize;
        let a = a.rem_euclid(p as i64) as usize;
        assert!(a != 0, "galois exponent must be a unit");
        let mut coeffs = vec![S::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i * a) % p] = c.clone();
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }

    pub fn to_complex(&self) -> Complex64 {
        let p = self.p as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / p;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), th)
            })
            .sum()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Cyclotomic<T> {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Cyclotomic<i64> {
    pub fn to_exact(&self) -> Cyclotomic<BigRational> {
        self.map(|&c| BigRational::from_integer(BigInt::from(c)))
    }
}

impl Cyclotomic<BigRational> {
    pub fn from_int(p: u32, n: i64) -> Self {
        Self::from_scalar(p, BigRational::from_integer(BigInt::from(n)))
    }

    /// Multiplication by `q^e` for an integer exponent `e` (possibly negative).
    pub fn scale_qpow(&self, q: u32, e: i64) -> Self {
        self.scale(&qpow(q, e))
    }
}

/// `q^e` as an exact rational.
pub fn qpow(q: u32, e: i64) -> BigRational {
    let base = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

impl<S: Scalar> Add for &Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn add(self, rhs: &Cyclotomic<S>) -> Cyclotomic<S> {
        assert_eq!(self.p, rhs.p);
        Cyclotomic {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> AddAssign<&Cyclotomic<S>> for Cyclotomic<S> {
    fn add_assign(&mut self, rhs: &Cyclotomic<S>) {
        assert_eq!(self.p, rhs.p);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.clone() + b.clone();
        }
    }
}

impl<S: Scalar> Sub for &Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn sub(self, rhs: &Cyclotomic<S>) -> Cyclotomic<S> {
        assert_eq!(self.p, rhs.p);
        Cyclotomic {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for &Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn neg(self) -> Cyclotomic<S> {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn mul(self, rhs: &Cyclotomic<S>) -> Cyclotomic<S> {
        assert_eq!(self.p, rhs.p);
        let p = self.p as usize;
        let mut coeffs = vec![S::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                coeffs[k] = coeffs[k].clone() + a.clone() * b.clone();
            }
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }
}

impl<S: Scalar> Add for Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn add(self, rhs: Cyclotomic<S>) -> Cyclotomic<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn sub(self, rhs: Cyclotomic<S>) -> Cyclotomic<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn mul(self, rhs: Cyclotomic<S>) -> Cyclotomic<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Neg for Cyclotomic<S> {
    type Output = Cyclotomic<S>;
    fn neg(self) -> Cyclotomic<S> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Z = Cyclotomic<i64>;

    #[test]
    fn sum_of_roots_vanishes() {
        for p in [3u32, 5, 7] {
            let mut s = Z::zero(p);
            for k in 0..p {
                s.add_zeta(k, 1);
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn gauss_sum_squares_to_minus_three() {
        // sum_x zeta^{x^2} over F_3 is i sqrt 3; its square is -3
        let mut g = Z::zero(3);
        for x in 0..3i64 {
            g.add_zeta((x * x % 3) as u32, 1);
        }
        assert_eq!((&g * &g).as_scalar(), Some(-3));
        let c = g.to_complex();
        assert!((c.re).abs() < 1e-12 && (c.im - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn conj_and_galois() {
        let z = Z::zeta_pow(5, 2);
        assert_eq!(&z * &z.conj(), Z::one(5));
        assert_eq!(z.galois(3), Z::zeta_pow(5, 6));
    }
}
