//! Exact-arithmetic classification of symplectic Heegaard splittings.
//!
//! The crate takes a symplectic gluing matrix (or a directly specified
//! linked abelian group), reduces it to a partial normal form, extracts
//! the first homology with its torsion linking form, and computes the
//! invariants that decide stable and minimal equivalence of splittings:
//!
//! * rank and torsion coefficients,
//! * quadratic-residue characters at odd primes,
//! * Gauss-sum phase vectors at the prime 2,
//! * the mod-τ̄ determinant invariant for minimal splittings.
//!
//! All computation is exact: arbitrary-precision integers and rationals,
//! and cyclotomic integers for the Gauss sums.  No floating point.

pub mod classify_odd;
pub mod classify_two;
pub mod error;
pub mod exact;
pub mod iso;
pub mod linked;
pub mod minimal;
pub mod report;
pub mod stable;
pub mod symplectic;

pub use classify_odd::{odd_equivalent, seifert_invariants, OddBlock, OddPrimeInvariants};
pub use classify_two::{
    burger_counts, gauss_sum_bruteforce, gauss_sum_closed_form, gauss_sum_symbolic, phase_vector,
    two_equivalent, wall_decompose, BasicForm, GaussSum, Phase, PhaseVector, WallDecomposition,
};
pub use error::{Error, Result};
pub use exact::{smith_normal_form, CyclotomicElement, IntegerMatrix, SmithForm};
pub use linked::{
    linked_group_of, linking_from_normal_form, pair_from_matrix, quotient_with_linking,
    reassemble_components, HeegaardPair, LinkedGroup, PrimaryComponent,
};
pub use minimal::{
    class_count, det_invariant, diagonalize_odd, exterior_det, groups_minimally_equivalent,
    is_even_linking, minimal_equivalence, reidemeister_symbols, volume_class_count, ExteriorDet,
    MinimalInvariant, MinimalVerdict, Parity, ReidemeisterSymbol, ReidemeisterSymbols,
    SymmetricLift, DEFAULT_SEARCH_LIMIT,
};
pub use report::{
    compare_groups, compare_matrices, report_for_group, report_for_group_with_limit,
    report_for_matrix, report_for_matrix_with_limit, CompareReport, InvariantReport,
    MinimalSection, OddBlockReport, PrimeSection, SymbolReport,
};
pub use stable::{
    groups_stably_equivalent, stable_equivalence, stable_invariants, PrimeInvariant,
    StableInvariants,
};
pub use symplectic::{
    in_handlebody_subgroup, is_stabilized, minimal_genus, partial_normal_form, stabilize,
    validate_symplectic, PartialNormalForm, SymplecticMatrix,
};
