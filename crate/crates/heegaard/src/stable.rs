//! Stable equivalence of symplectic gluings.
//!
//! Two gluings become equivalent after enough stabilizations exactly when
//! their linked quotients are isomorphic.  That reduces to a finite list
//! of invariants: the free rank, the torsion coefficients, and — prime by
//! prime — the odd quadratic characters and the 2-primary phase vector.
//! [`stable_invariants`] collects the list; [`stable_equivalence`] and
//! [`groups_stably_equivalent`] compare two inputs.

use num_bigint::BigInt;

use crate::classify_odd::{seifert_invariants, OddPrimeInvariants};
use crate::classify_two::{phase_vector, PhaseVector};
use crate::error::Result;
use crate::linked::{linked_group_of, LinkedGroup};
use crate::symplectic::SymplecticMatrix;

/// Classification data of one primary component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeInvariant {
    /// Odd prime: block structure with quadratic-residue characters.
    Odd(OddPrimeInvariants),
    /// Prime 2: generator exponents and the Gauss-sum phase vector.
    Two {
        exponents: Vec<u32>,
        phases: PhaseVector,
    },
}

/// The complete set of stable invariants of a linked group.
///
/// Two gluings are stably equivalent exactly when these values coincide;
/// equality of this struct is the decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// One entry per prime dividing the torsion, in increasing prime order.
    pub primes: Vec<PrimeInvariant>,
}

/// Computes every stable invariant of a linked group.
pub fn stable_invariants(g: &LinkedGroup) -> Result<StableInvariants> {
    let mut primes = Vec::new();
    for component in g.primary_decompose() {
        if component.prime() == &BigInt::from(2) {
            primes.push(PrimeInvariant::Two {
                exponents: component.exponents().to_vec(),
                phases: phase_vector(&component)?,
            });
        } else {
            primes.push(PrimeInvariant::Odd(seifert_invariants(&component)?));
        }
    }
    Ok(StableInvariants {
        free_rank: g.free_rank(),
        torsion: g.torsion().to_vec(),
        primes,
    })
}

/// Whether two linked groups are isomorphic as groups with linking forms.
pub fn groups_stably_equivalent(a: &LinkedGroup, b: &LinkedGroup) -> Result<bool> {
    if a.free_rank() != b.free_rank() || a.torsion() != b.torsion() {
        return Ok(false);
    }
    Ok(stable_invariants(a)? == stable_invariants(b)?)
}

/// Whether two symplectic gluings are stably equivalent: their linked
/// quotients must be isomorphic.
pub fn stable_equivalence(h1: &SymplecticMatrix, h2: &SymplecticMatrix) -> Result<bool> {
    groups_stably_equivalent(&linked_group_of(h1)?, &linked_group_of(h2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::IntegerMatrix;
    use crate::exact::ratmat::rational;
    use crate::symplectic::{sampling, stabilize, validate_symplectic};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn genus_one(r: i64, p: i64, s: i64, q: i64) -> SymplecticMatrix {
        validate_symplectic(IntegerMatrix::from_rows(&[vec![r, p], vec![s, q]])).unwrap()
    }

    fn lens(p: i64, q: i64) -> SymplecticMatrix {
        // A genus-one gluing [[r, p], [s, q]] with rq − ps = 1.
        for r in 1..=p.abs() {
            for s in 0..=p.abs() {
                if r * q - p * s == 1 {
                    return genus_one(r, p, s, q);
                }
            }
        }
        panic!("no SL2 completion for ({p}, {q})");
    }

    fn u_matrix() -> SymplecticMatrix {
        let r = IntegerMatrix::from_rows(&[vec![0, -15], vec![-15, 0]]);
        let p = IntegerMatrix::from_rows(&[vec![8, 0], vec![0, 8]]);
        let s = IntegerMatrix::from_rows(&[vec![-2, 0], vec![0, -2]]);
        let q = IntegerMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        SymplecticMatrix::from_blocks(&r, &p, &s, &q).unwrap()
    }

    fn v_matrix() -> SymplecticMatrix {
        let r = IntegerMatrix::from_rows(&[vec![0, -5], vec![-5, 0]]);
        let p = IntegerMatrix::from_rows(&[vec![8, 0], vec![0, 8]]);
        let s = IntegerMatrix::from_rows(&[vec![-2, 0], vec![0, -2]]);
        let q = IntegerMatrix::from_rows(&[vec![0, 3], vec![3, 0]]);
        SymplecticMatrix::from_blocks(&r, &p, &s, &q).unwrap()
    }

    #[test]
    fn golden_pair_is_stably_equivalent() {
        assert!(stable_equivalence(&u_matrix(), &v_matrix()).unwrap());
    }

    #[test]
    fn lens_five_one_and_five_two_differ() {
        // Linkings 1/5 and 2/5: quadratic characters +1 and −1.
        assert!(!stable_equivalence(&lens(5, 1), &lens(5, 2)).unwrap());
    }

    #[test]
    fn lens_five_one_and_five_four_agree_stably() {
        // Linkings 1/5 and 4/5 share the character (+1).
        assert!(stable_equivalence(&lens(5, 1), &lens(5, 4)).unwrap());
    }

    #[test]
    fn stabilization_preserves_stable_class() {
        let h = v_matrix();
        assert!(stable_equivalence(&h, &stabilize(&h, 3)).unwrap());
        let l = lens(5, 2);
        assert!(stable_equivalence(&l, &stabilize(&l, 1)).unwrap());
    }

    #[test]
    fn mixed_torsion_invariants_are_computed() {
        let g = LinkedGroup::new(
            1,
            vec![BigInt::from(6)],
            vec![vec![rational(1, 6)]],
        )
        .unwrap();
        let inv = stable_invariants(&g).unwrap();
        assert_eq!(inv.free_rank, 1);
        assert_eq!(inv.primes.len(), 2);
        assert!(matches!(inv.primes[0], PrimeInvariant::Two { .. }));
        assert!(matches!(inv.primes[1], PrimeInvariant::Odd(_)));
        assert!(groups_stably_equivalent(&g, &g).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn handlebody_moves_preserve_stable_class(seed in 0u64..4000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = rand::Rng::gen_range(&mut rng, 1..=3);
            let h = sampling::random_symplectic(g, 4, &mut rng);
            let l = sampling::random_handlebody(g, 3, &mut rng);
            let r = sampling::random_handlebody(g, 3, &mut rng);
            let moved = validate_symplectic(
                &(l.matrix() * h.matrix()) * r.matrix(),
            ).unwrap();
            prop_assert!(stable_equivalence(&h, &moved).unwrap());
        }
    }
}
