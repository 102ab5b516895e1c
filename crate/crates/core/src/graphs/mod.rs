//! Morgenstern Cayley graphs `X^{q,g}` of `PGL_2` / `PSL_2` over `F_q[t]/(g)`.
//!
//! - [`ProjMat`]: projective 2x2 matrices over an [`IndexedRing`].
//! - [`cayley`]: closure under the `q + 1` generators, BFS distances.
//! - [`eigen`]: symmetric eigensolvers for spectral certification.
//! - [`experiments`]: the diameter lower-bound experiments.

pub mod cayley;
pub mod eigen;
pub mod experiments;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{factor, gcd_monic, iter_irreducible, Fq, FqElem, IndexedRing, Poly, ResidueField};

pub use cayley::{build_graph, CayleyGraph};
pub use eigen::{power_second_eigenvalue, symmetric_eigenvalues, Spectrum};
pub use experiments::{certify, lower_bound_experiment, Certificate, LowerBoundReport, Variant};

/// A 2x2 matrix over `F_q[t]/(g)` up to unit scalars, entries as ring
/// indices in row-major order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjMat(pub [u32; 4]);

impl ProjMat {
    pub fn identity(ring: &IndexedRing) -> ProjMat {
        let one = ring.index(&Poly::one(ring.field()));
        ProjMat([one, 0, 0, one])
    }

    pub fn from_polys(ring: &IndexedRing, e: [&Poly; 4]) -> ProjMat {
        ProjMat(e.map(|p| ring.index(p)))
    }

    pub fn det(&self, ring: &IndexedRing) -> u32 {
        let [a, b, c, d] = self.0;
        ring.sub(ring.mul(a, d), ring.mul(b, c))
    }

    pub fn mul(&self, other: &ProjMat, ring: &IndexedRing) -> ProjMat {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = other.0;
        let dot = |x: u32, y: u32, z: u32, w: u32| ring.add(ring.mul(x, y), ring.mul(z, w));
        ProjMat([
            dot(a, e, b, g),
            dot(a, f, b, h),
            dot(c, e, d, g),
            dot(c, f, d, h),
        ])
    }

    /// The adjugate, which is the inverse in `PGL_2`.
    pub fn adjugate(&self, ring: &IndexedRing) -> ProjMat {
        let [a, b, c, d] = self.0;
        ProjMat([d, ring.neg(b), ring.neg(c), a])
    }

    /// Scales so that the first unit entry in row-major order is 1. Over a
    /// field this is the first nonzero entry. Fails for non-invertible
    /// matrices.
    pub fn canonical(&self, ring: &IndexedRing) -> Result<ProjMat> {
        if !ring.is_unit(self.det(ring)) {
            return Err(Error::Invalid("matrix is not invertible".into()));
        }
        let lead = self
            .0
            .iter()
            .copied()
            .find(|&x| ring.is_unit(x))
            .ok_or_else(|| Error::Invalid("invertible matrix without unit entry".into()))?;
        let inv = ring.inv(lead).unwrap();
        Ok(ProjMat(self.0.map(|x| ring.mul(x, inv))))
    }

    /// Dense key `((a n + b) n + c) n + d` with `n` the ring size.
    pub fn key(&self, ring: &IndexedRing) -> u64 {
        let n = ring.size() as u64;
        self.0.iter().fold(0u64, |acc, &x| acc * n + x as u64)
    }

    pub fn from_key(key: u64, ring: &IndexedRing) -> ProjMat {
        let n = ring.size() as u64;
        let mut k = key;
        let mut e = [0u32; 4];
        for slot in e.iter_mut().rev() {
            *slot = (k % n) as u32;
            k /= n;
        }
        ProjMat(e)
    }

    pub fn display<'a>(&'a self, ring: &'a IndexedRing) -> impl fmt::Display + 'a {
        DisplayMat(self, ring)
    }
}

struct DisplayMat<'a>(&'a ProjMat, &'a IndexedRing);

impl fmt::Display for DisplayMat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |i: usize| self.1.poly(self.0 .0[i]);
        write!(f, "[[{}, {}], [{}, {}]]", p(0), p(1), p(2), p(3))
    }
}

/// `sqrt(nu) mod g`: the smaller (in the base-`q` index order) of the
/// square roots, found by search.
pub fn sqrt_nu(ring: &IndexedRing, nu: FqElem) -> Result<u32> {
    let target = ring.constant(nu);
    (0..ring.size())
        .find(|&y| ring.mul(y, y) == target)
        .ok_or_else(|| {
            Error::Construction(format!(
                "nu = {} is not a square modulo {}",
                ring.field().format_elem(nu),
                ring.modulus()
            ))
        })
}

/// Solutions `(x3, x4)` in `F_q^2` of `nu x4^2 - x3^2 = 1`.
pub fn norm_one_pairs(field: &Arc<Fq>, nu: FqElem) -> Vec<(FqElem, FqElem)> {
    let mut out = Vec::new();
    for x3 in field.elements() {
        for x4 in field.elements() {
            let v = field.sub(field.mul(nu, field.mul(x4, x4)), field.mul(x3, x3));
            if v == FqElem::ONE {
                out.push((x3, x4));
            }
        }
    }
    out
}

/// The `q + 1` generators `[[1, x3 - x4 i], [(t-1)(x3 + x4 i), 1]]`, canonical,
/// each of determinant `t`, closed under inversion.
pub fn generators(ring: &IndexedRing, nu: FqElem) -> Result<Vec<ProjMat>> {
    let field = ring.field().clone();
    let g = ring.modulus();
    let t = Poly::t(&field);
    let t1 = Poly::linear(&field, FqElem::ONE);
    if !gcd_monic(g, &(&t * &t1))?.is_one() {
        return Err(Error::Construction(format!(
            "g = {g} must be coprime to t(t-1)"
        )));
    }
    let i = sqrt_nu(ring, nu)?;
    let one = ring.index(&Poly::one(&field));
    let tm1 = ring.index(&t1);
    let t_idx = ring.index(&t);
    let mut gens = Vec::new();
    for (x3, x4) in norm_one_pairs(&field, nu) {
        let a = ring.constant(x3);
        let b = ring.mul(ring.constant(x4), i);
        let m = ProjMat([one, ring.sub(a, b), ring.mul(tm1, ring.add(a, b)), one]);
        if m.det(ring) != t_idx {
            return Err(Error::Construction(format!(
                "generator {} has determinant other than t",
                m.display(ring)
            )));
        }
        gens.push(m.canonical(ring)?);
    }
    gens.sort();
    gens.dedup();
    let q = field.q() as usize;
    if gens.len() != q + 1 {
        return Err(Error::Construction(format!(
            "expected {} generators, found {}",
            q + 1,
            gens.len()
        )));
    }
    for s in &gens {
        let inv = s.adjugate(ring).canonical(ring)?;
        if gens.binary_search(&inv).is_err() {
            return Err(Error::Construction(format!(
                "generator set is not closed under inversion: {}",
                s.display(ring)
            )));
        }
    }
    Ok(gens)
}

/// Conditions on `g` selecting the graph family.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `t` a non-square and `-1` a square modulo `g`.
    Bipartite,
    /// `t` and `-1` both squares modulo `g`.
    NonBipartite,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bipartite" => Ok(Profile::Bipartite),
            "non_bipartite" | "nonbipartite" | "non-bipartite" => Ok(Profile::NonBipartite),
            _ => Err(Error::Invalid(format!("unknown profile {s:?}"))),
        }
    }
}

/// Whether `g` (irreducible, coprime to `t(t-1)`) satisfies the profile.
pub fn profile_holds(g: &Poly, profile: Profile) -> Result<bool> {
    let field = g.field();
    let t = Poly::t(field);
    let t1 = Poly::linear(field, FqElem::ONE);
    if !gcd_monic(g, &(&t * &t1))?.is_one() {
        return Ok(false);
    }
    let rf = ResidueField::new(g)?;
    let minus_one = Poly::constant(field, field.from_int(-1));
    let t_sq = rf.euler_is_square(&t);
    let m1_sq = rf.euler_is_square(&minus_one);
    Ok(m1_sq
        && match profile {
            Profile::Bipartite => !t_sq,
            Profile::NonBipartite => t_sq,
        })
}

/// First monic irreducible `g` of degree `deg` (lexicographic) satisfying the
/// profile.
pub fn find_suitable_g(field: &Arc<Fq>, deg: usize, profile: Profile) -> Result<Poly> {
    for g in iter_irreducible(field, deg) {
        if profile_holds(&g, profile)? {
            return Ok(g);
        }
    }
    Err(Error::NotFound(format!(
        "no monic irreducible of degree {deg} over F_{} with the {profile:?} profile",
        field.q()
    )))
}

/// Square class of a unit modulo the first irreducible factor of the ring
/// modulus (`true` for squares).
pub fn square_class(ring: &IndexedRing, x: u32) -> Result<bool> {
    let (_, facs) = factor(ring.modulus())?;
    let w = &facs
        .first()
        .ok_or_else(|| Error::Invalid("constant modulus".into()))?
        .0;
    Ok(ResidueField::new(w)?.euler_is_square(&ring.poly(x)))
}
