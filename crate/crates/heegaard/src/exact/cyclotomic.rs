//! Exact arithmetic in the cyclotomic rings ℤ[ζ] for ζ a primitive
//! 2ⁿ-th root of unity.
//!
//! An element of level `n` is a polynomial in `ℤ[x]/(x^(2^(n-1)) + 1)`
//! with `x` standing for `ζ = e^(2πi/2^n)`.  All arithmetic is exact;
//! there is no floating point anywhere.  Levels embed upward along
//! `ζ_{2^m} = (ζ_{2^n})^(2^(n-m))`, and equality first unifies levels.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Exact element of `ℤ[ζ_{2^level}]`.
#[derive(Clone)]
pub struct CyclotomicElement {
    level: u32,
    /// Coefficients of `1, x, …, x^(half-1)` where `half = 2^(level-1)`.
    coeffs: Vec<BigInt>,
}

impl CyclotomicElement {
    fn half(level: u32) -> usize {
        1usize << (level - 1)
    }

    /// The zero element at the given level (level ≥ 1).
    pub fn zero(level: u32) -> Self {
        assert!(level >= 1, "level must be at least 1");
        CyclotomicElement {
            level,
            coeffs: vec![BigInt::zero(); Self::half(level)],
        }
    }

    /// The integer `n` as a constant at the given level.
    pub fn from_integer(n: BigInt, level: u32) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = n;
        z
    }

    pub fn one(level: u32) -> Self {
        Self::from_integer(BigInt::one(), level)
    }

    /// `ζ^exponent` where `ζ = e^(2πi / 2^level)`.
    ///
    /// The exponent is taken modulo `2^level`; the upper half of the
    /// cycle maps to negated monomials via `x^half = −1`.
    pub fn root_of_unity(exponent: &BigInt, level: u32) -> Self {
        assert!(level >= 1);
        let order = BigInt::from(1) << level;
        let e = num_integer::Integer::mod_floor(exponent, &order);
        let e = usize::try_from(&e).expect("reduced exponent fits");
        let half = Self::half(level);
        let mut z = Self::zero(level);
        if e < half {
            z.coeffs[e] = BigInt::one();
        } else {
            z.coeffs[e - half] = -BigInt::one();
        }
        z
    }

    /// Adds `n · ζ^exponent` in place — constant-time accumulation for
    /// summations with many terms.
    pub fn add_root_multiple(&mut self, n: &BigInt, exponent: &BigInt) {
        let order = BigInt::from(1) << self.level;
        let e = num_integer::Integer::mod_floor(exponent, &order);
        let e = usize::try_from(&e).expect("reduced exponent fits");
        let half = Self::half(self.level);
        if e < half {
            self.coeffs[e] += n;
        } else {
            self.coeffs[e - half] -= n;
        }
    }

    /// `√2` represented exactly as `ρ − ρ³` with `ρ = e^(2πi/8)`,
    /// embedded at the requested level (≥ 3).
    pub fn sqrt2(level: u32) -> Result<Self> {
        let rho = Self::root_of_unity(&BigInt::one(), 3);
        let rho3 = Self::root_of_unity(&BigInt::from(3), 3);
        rho.sub(&rho3).embed(level)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The constant term, if the element is a rational integer.
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Reinterpret at a higher (or equal) level.  Embedding into a lower
    /// level is rejected: the subring inclusion only goes upward.
    pub fn embed(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::EmbedLevel {
                from: self.level,
                to: level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let stride = 1usize << (level - self.level);
        let mut z = Self::zero(level);
        for (k, c) in self.coeffs.iter().enumerate() {
            z.coeffs[k * stride] = c.clone();
        }
        Ok(z)
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        let level = self.level.max(other.level);
        (
            self.embed(level).expect("embedding upward cannot fail"),
            other.embed(level).expect("embedding upward cannot fail"),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        CyclotomicElement {
            level: a.level,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicElement {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        CyclotomicElement {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Ring product; the convolution wraps with a sign via `x^half = −1`.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        let half = a.coeffs.len();
        let mut out = vec![BigInt::zero(); half];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let k = i + j;
                if k < half {
                    out[k] += ai * bj;
                } else {
                    out[k - half] -= ai * bj;
                }
            }
        }
        CyclotomicElement {
            level: a.level,
            coeffs: out,
        }
    }

    /// `self^exp` by repeated squaring.
    pub fn pow(&self, exp: u64) -> Self {
        let mut acc = Self::one(self.level);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugate: `ζ ↦ ζ⁻¹`, i.e. `x^k ↦ −x^(half−k)` for `k ≥ 1`.
    pub fn conj(&self) -> Self {
        let half = self.coeffs.len();
        let mut out = vec![BigInt::zero(); half];
        out[0] = self.coeffs[0].clone();
        for k in 1..half {
            out[half - k] = -self.coeffs[k].clone();
        }
        CyclotomicElement {
            level: self.level,
            coeffs: out,
        }
    }

    /// `|self|²` as an element of the same ring; for Gauss sums this is a
    /// rational integer.
    pub fn norm_squared(&self) -> Self {
        self.mul(&self.conj())
    }
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.unify(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicElement {}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic(level {}; ", self.level)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z^{k}")?;
            } else {
                write!(f, "{c}·z^{k}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rho() -> CyclotomicElement {
        CyclotomicElement::root_of_unity(&BigInt::one(), 3)
    }

    fn int(n: i64, level: u32) -> CyclotomicElement {
        CyclotomicElement::from_integer(BigInt::from(n), level)
    }

    #[test]
    fn eighth_root_has_order_eight() {
        assert_eq!(rho().pow(8), int(1, 3));
        assert_ne!(rho().pow(4), int(1, 3));
        assert_eq!(rho().pow(4), int(-1, 3));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = CyclotomicElement::sqrt2(3).unwrap();
        assert_eq!(s.mul(&s), int(2, 3));
        // And at a higher level after embedding.
        let s5 = CyclotomicElement::sqrt2(5).unwrap();
        assert_eq!(s5.mul(&s5), int(2, 5));
    }

    #[test]
    fn embeddings_are_compatible() {
        // ζ₁₆² equals the embedding of ρ = ζ₈ at level 4.
        let zeta16 = CyclotomicElement::root_of_unity(&BigInt::one(), 4);
        assert_eq!(zeta16.pow(2), rho().embed(4).unwrap());
        // Equality across levels without explicit embedding.
        assert_eq!(zeta16.pow(2), rho());
    }

    #[test]
    fn embed_downward_is_rejected() {
        assert!(matches!(
            rho().embed(2),
            Err(Error::EmbedLevel { from: 3, to: 2 })
        ));
    }

    #[test]
    fn level_one_and_two_behave() {
        // Level 1: x = ζ₂ = −1.
        let z2 = CyclotomicElement::root_of_unity(&BigInt::one(), 1);
        assert_eq!(z2, int(-1, 1));
        // Level 2: i = ζ₄, i² = −1.
        let i = CyclotomicElement::root_of_unity(&BigInt::one(), 2);
        assert_eq!(i.pow(2), int(-1, 2));
        assert_eq!(i.pow(4), int(1, 1));
    }

    #[test]
    fn negative_and_large_exponents_wrap() {
        let a = CyclotomicElement::root_of_unity(&BigInt::from(-1), 3);
        assert_eq!(a, rho().pow(7));
        let b = CyclotomicElement::root_of_unity(&BigInt::from(8 + 5), 3);
        assert_eq!(b, rho().pow(5));
    }

    #[test]
    fn conjugation_inverts_roots() {
        for e in 0..8u64 {
            assert_eq!(rho().pow(e).conj(), rho().pow((8 - e) % 8));
        }
        // (1 + ρ)(1 + ρ̄) = 2 + (ρ + ρ⁻¹) = 2 + √2.
        let z = int(1, 3).add(&rho());
        let expected = int(2, 3).add(&CyclotomicElement::sqrt2(3).unwrap());
        assert_eq!(z.norm_squared(), expected);
    }

    #[test]
    fn as_integer_detection() {
        assert_eq!(int(5, 4).as_integer(), Some(&BigInt::from(5)));
        assert_eq!(rho().as_integer(), None);
        assert_eq!(rho().pow(4).as_integer(), Some(&BigInt::from(-1)));
    }

    fn arb_element(level: u32) -> impl Strategy<Value = CyclotomicElement> {
        let half = 1usize << (level - 1);
        proptest::collection::vec(-10i64..10, half).prop_map(move |cs| CyclotomicElement {
            level,
            coeffs: cs.into_iter().map(BigInt::from).collect(),
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_element(4), b in arb_element(4), c in arb_element(4)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
        }

        #[test]
        fn embedding_is_a_ring_homomorphism(a in arb_element(3), b in arb_element(3)) {
            let (ea, eb) = (a.embed(5).unwrap(), b.embed(5).unwrap());
            prop_assert_eq!(a.mul(&b).embed(5).unwrap(), ea.mul(&eb));
            prop_assert_eq!(a.add(&b).embed(5).unwrap(), ea.add(&eb));
        }

        #[test]
        fn conjugation_is_a_ring_involution(a in arb_element(4), b in arb_element(4)) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        }
    }
}
