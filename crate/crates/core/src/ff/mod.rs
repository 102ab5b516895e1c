//! Exact arithmetic over F_q: the field, polynomials, residue rings and
//! Laurent series at the infinite place.

pub mod arith;
pub mod field;
pub mod laurent;
pub mod parse;
pub mod poly;
pub mod residue;

pub use arith::{
    crt, ext_gcd, factor, gcd_monic, inv_mod, is_irreducible, iter_below, iter_irreducible,
    iter_monic, iter_monic_upto, jacobi, m_part, pow_mod, valuation,
};
pub use field::{Fq, FqElem};
pub use laurent::Laurent;
pub use poly::Poly;
pub use residue::{IndexedRing, ResidueField, ResidueRing, ResidueRingElem};

use num_rational::BigRational;

/// `|p| = q^deg p`, with `|0| = 0`, as an exact rational.
pub fn norm(p: &Poly) -> BigRational {
    match p.deg() {
        None => BigRational::from_integer(0.into()),
        Some(d) => BigRational::from_integer(num_bigint::BigInt::from(p.field().q()).pow(d as u32)),
    }
}
