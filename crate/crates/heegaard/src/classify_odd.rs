//! Classification of linking forms on odd-primary groups.
//!
//! For an odd prime `p`, a nonsingular form on `⊕ Z/p^{e_i}` is determined
//! by the multiset of exponents together with one sign per exponent value:
//! the Legendre character of the determinant of the scaled pairing block of
//! that exponent.  Two components are equivalent exactly when these data
//! agree, which turns the classification into a finite comparison.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::numtheory::{legendre_symbol, normalize_mod};
use crate::linked::PrimaryComponent;

/// The invariant attached to one exponent value inside an odd component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddBlock {
    /// Common exponent: the generators in this block have order `p^exponent`.
    pub exponent: u32,
    /// Number of generators sharing the exponent.
    pub multiplicity: usize,
    /// Legendre character (±1) of the block determinant modulo `p`.
    pub character: i32,
}

/// Complete equivalence data of a linking form at an odd prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddPrimeInvariants {
    /// The odd prime.
    pub prime: BigInt,
    /// Per-exponent blocks, ascending in exponent.
    pub blocks: Vec<OddBlock>,
}

/// Computes the per-exponent characters of an odd component.
///
/// The block with exponent `ε` scales its pairing entries by `p^ε` into
/// integers; the determinant of that integer matrix is prime to `p` whenever
/// the component is nonsingular, and its Legendre character is the block
/// invariant.  A vanishing character therefore reports a degenerate
/// component as an error.  Components at the prime 2 are rejected: their
/// classification needs the finer phase invariants.
pub fn seifert_invariants(component: &PrimaryComponent) -> Result<OddPrimeInvariants> {
    let p = component.prime().clone();
    if p == BigInt::from(2) {
        return Err(Error::EvenTorsion(
            "per-exponent characters classify odd components only".into(),
        ));
    }
    let exponents = component.exponents();
    let linking = component.linking();
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < exponents.len() {
        let eps = exponents[start];
        let mut end = start;
        while end < exponents.len() && exponents[end] == eps {
            end += 1;
        }
        let scale = p.pow(eps);
        let size = end - start;
        let block = crate::exact::matrix::IntegerMatrix::from_fn(size, size, |u, v| {
            let entry = &linking[start + u][start + v];
            let scaled = entry.numer() * (&scale / entry.denom());
            normalize_mod(&scaled, &scale)
        });
        let det = block.determinant();
        let character = legendre_symbol(&det, &p)?;
        if character == 0 {
            return Err(Error::InvalidGroup(format!(
                "degenerate block at exponent {eps}: the scaled determinant {det} \
                 is divisible by {p}"
            )));
        }
        blocks.push(OddBlock {
            exponent: eps,
            multiplicity: size,
            character,
        });
        start = end;
    }
    Ok(OddPrimeInvariants { prime: p, blocks })
}

/// Whether two odd components carry equivalent linking forms.
pub fn odd_equivalent(a: &PrimaryComponent, b: &PrimaryComponent) -> Result<bool> {
    Ok(seifert_invariants(a)? == seifert_invariants(b)?)
}
