//! Finitely generated abelian groups carrying a linking form.
//!
//! A [`LinkedGroup`] is `Z^r ⊕ Z/τ₁ ⊕ … ⊕ Z/τ_t` (with `τ₁ | τ₂ | … | τ_t`,
//! each `τ_i ≥ 2`) together with a symmetric bilinear pairing on the torsion
//! part taking values in `Q/Z`.  The pairing is stored as a `t×t` matrix of
//! rationals, each entry normalized to `[0, 1)`.
//!
//! Such a group arises as the first homology of the closed manifold built
//! from a Heegaard splitting; the pairing is its torsion linking form.  This
//! module provides two independent ways to compute it from a symplectic
//! gluing matrix — via the partial normal form, and via a Smith-form quotient
//! of the spanned Lagrangian pair — together with the splitting of the form
//! into its primary (one prime at a time) components and the inverse
//! reassembly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::matrix::IntegerMatrix;
use crate::exact::numtheory::{factorize, is_prime, mod1, normalize_mod, padic_valuation};
use crate::exact::ratmat::{det_rational, is_symmetric_rational};
use crate::exact::snf::smith_normal_form;
use crate::symplectic::{partial_normal_form, standard_form_matrix, PartialNormalForm, SymplecticMatrix};

/// A finitely generated abelian group with a nonsingular linking form on its
/// torsion subgroup.
///
/// Invariants enforced by the constructor:
/// * the torsion coefficients form a divisibility chain of integers ≥ 2;
/// * the pairing matrix is `t×t`, symmetric, with entries in `[0, 1)`;
/// * the entry pairing generator `i` with generator `j` has denominator
///   dividing `gcd(τ_i, τ_j)`, so the pairing is well defined on the group;
/// * the pairing is nonsingular: the adjoint map to the character group is
///   bijective.  This is checked one prime at a time, which catches forms
///   that look invertible over the rationals but kill part of a single
///   primary component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkedGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
    linking: Vec<Vec<BigRational>>,
}

impl LinkedGroup {
    /// Builds a linked group, validating every structural invariant.
    pub fn new(
        free_rank: usize,
        torsion: Vec<BigInt>,
        linking: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        let t = torsion.len();
        for (i, tau) in torsion.iter().enumerate() {
            if tau < &BigInt::from(2) {
                return Err(Error::InvalidGroup(format!(
                    "torsion coefficient {tau} at position {i} is smaller than 2"
                )));
            }
            if i + 1 < t && !(&torsion[i + 1] % tau).is_zero() {
                return Err(Error::InvalidGroup(format!(
                    "torsion coefficients must form a divisibility chain: {} does not divide {}",
                    tau,
                    torsion[i + 1]
                )));
            }
        }
        if linking.len() != t || linking.iter().any(|row| row.len() != t) {
            return Err(Error::InvalidGroup(format!(
                "linking matrix must be {t}x{t} to match the torsion coefficients"
            )));
        }
        let linking: Vec<Vec<BigRational>> = linking
            .iter()
            .map(|row| row.iter().map(mod1).collect())
            .collect();
        if !is_symmetric_rational(&linking) {
            return Err(Error::InvalidGroup(
                "linking matrix is not symmetric".into(),
            ));
        }
        for i in 0..t {
            for j in 0..t {
                let bound = torsion[i].gcd(&torsion[j]);
                if !(&bound % linking[i][j].denom()).is_zero() {
                    return Err(Error::InvalidGroup(format!(
                        "entry ({i},{j}) = {} has denominator incompatible with \
                         generator orders {} and {}",
                        linking[i][j], torsion[i], torsion[j]
                    )));
                }
            }
        }
        let group = LinkedGroup {
            free_rank,
            torsion,
            linking,
        };
        if t > 0 {
            // Global check: the torsion order times the determinant of the
            // canonical lift must be an integer prime to τ₁.
            let scaled = scaled_determinant(&group.torsion, &group.linking);
            if !scaled.is_integer() {
                return Err(Error::InvalidGroup(format!(
                    "scaled determinant {scaled} of the linking form is not an integer"
                )));
            }
            let d = scaled.to_integer();
            let tau1 = group.torsion[0].clone();
            if normalize_mod(&d, &tau1).gcd(&tau1) != BigInt::one() {
                return Err(Error::InvalidGroup(format!(
                    "linking form is singular: scaled determinant {d} shares a factor \
                     with the smallest torsion coefficient {tau1}"
                )));
            }
            // Per-prime check: the global determinant can be a unit modulo τ₁
            // while a primary component for a prime dividing only the later
            // coefficients is still degenerate, so each component is tested on
            // its own.
            for component in components_of(&group.torsion, &group.linking)? {
                if !component.is_nonsingular() {
                    return Err(Error::InvalidGroup(format!(
                        "linking form is singular on its {}-primary component",
                        component.prime()
                    )));
                }
            }
        }
        Ok(group)
    }

    /// Rank of the free part.
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Torsion coefficients `τ₁ | τ₂ | … | τ_t`, each ≥ 2.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Number of torsion generators.
    pub fn torsion_rank(&self) -> usize {
        self.torsion.len()
    }

    /// The full pairing matrix, entries in `[0, 1)`.
    pub fn linking(&self) -> &[Vec<BigRational>] {
        &self.linking
    }

    /// Pairing of torsion generators `i` and `j`, in `[0, 1)`.
    pub fn linking_entry(&self, i: usize, j: usize) -> &BigRational {
        &self.linking[i][j]
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Splits the linking form into its primary components, one per prime
    /// dividing the torsion order, sorted by prime.
    ///
    /// The generator of order `τ_i` contributes the element of order
    /// `p^{v_p(τ_i)}` obtained by multiplying by the prime-to-`p` part of
    /// `τ_i`; pairings between components of different primes vanish, so no
    /// information is lost.
    pub fn primary_decompose(&self) -> Vec<PrimaryComponent> {
        let components = components_of(&self.torsion, &self.linking)
            .expect("torsion order was factored when the group was built");
        // Elements of coprime order pair trivially; verify for every pair of
        // components since the reassembly relies on it.
        for a in &components {
            for b in &components {
                if a.prime() == b.prime() {
                    continue;
                }
                for (i, &gi) in a.source_indices.iter().enumerate() {
                    for (j, &gj) in b.source_indices.iter().enumerate() {
                        let cross = BigRational::from_integer(
                            &a.multipliers[i] * &b.multipliers[j],
                        ) * &self.linking[gi][gj];
                        assert!(
                            cross.is_integer(),
                            "elements of coprime order must pair to zero"
                        );
                    }
                }
            }
        }
        components
    }
}

impl std::fmt::Display for LinkedGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for tau in &self.torsion {
            parts.push(format!("Z/{tau}"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))?;
        if !self.torsion.is_empty() {
            write!(f, " with linking [")?;
            for (i, row) in self.linking.iter().enumerate() {
                if i > 0 {
                    write!(f, "; ")?;
                }
                let entries: Vec<String> = row.iter().map(|q| q.to_string()).collect();
                write!(f, "{}", entries.join(", "))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// The restriction of a linking form to the subgroup of elements whose order
/// is a power of one prime.
///
/// The constructor checks shape only: `prime` must be prime, the exponents
/// ascending and positive, and the pairing symmetric with `p`-power
/// denominators bounded by the generator orders.  Nonsingularity is *not*
/// required here — degenerate components are representable so that the
/// classification routines can report them as errors — and can be queried
/// with [`PrimaryComponent::is_nonsingular`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryComponent {
    prime: BigInt,
    exponents: Vec<u32>,
    linking: Vec<Vec<BigRational>>,
    /// Positions of the originating generators inside the parent group
    /// (identity mapping for hand-built components).
    source_indices: Vec<usize>,
    /// Prime-to-`p` multiplier applied to each originating generator.
    multipliers: Vec<BigInt>,
}

impl PrimaryComponent {
    /// Builds a primary component, validating shape and symmetry.
    pub fn new(prime: BigInt, exponents: Vec<u32>, linking: Vec<Vec<BigRational>>) -> Result<Self> {
        if !is_prime(&prime)? {
            return Err(Error::InvalidGroup(format!(
                "{prime} is not prime, so it cannot index a primary component"
            )));
        }
        if exponents.is_empty() {
            return Err(Error::InvalidGroup(
                "a primary component needs at least one generator".into(),
            ));
        }
        for (i, &e) in exponents.iter().enumerate() {
            if e == 0 {
                return Err(Error::InvalidGroup(
                    "every generator of a primary component must have order > 1".into(),
                ));
            }
            if i + 1 < exponents.len() && exponents[i + 1] < e {
                return Err(Error::InvalidGroup(
                    "exponents of a primary component must be ascending".into(),
                ));
            }
        }
        let s = exponents.len();
        if linking.len() != s || linking.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidGroup(format!(
                "component linking matrix must be {s}x{s}"
            )));
        }
        let linking: Vec<Vec<BigRational>> = linking
            .iter()
            .map(|row| row.iter().map(mod1).collect())
            .collect();
        if !is_symmetric_rational(&linking) {
            return Err(Error::InvalidGroup(
                "component linking matrix is not symmetric".into(),
            ));
        }
        for i in 0..s {
            for j in 0..s {
                let bound = prime.pow(exponents[i].min(exponents[j]));
                if !(&bound % linking[i][j].denom()).is_zero() {
                    return Err(Error::InvalidGroup(format!(
                        "component entry ({i},{j}) = {} is incompatible with \
                         generator orders {}^{} and {}^{}",
                        linking[i][j], prime, exponents[i], prime, exponents[j]
                    )));
                }
            }
        }
        let source_indices = (0..s).collect();
        let multipliers = vec![BigInt::one(); s];
        Ok(PrimaryComponent {
            prime,
            exponents,
            linking,
            source_indices,
            multipliers,
        })
    }

    /// The prime this component belongs to.
    pub fn prime(&self) -> &BigInt {
        &self.prime
    }

    /// Ascending positive exponents: generator `i` has order `p^{e_i}`.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// The pairing matrix restricted to this component, entries in `[0, 1)`.
    pub fn linking(&self) -> &[Vec<BigRational>] {
        &self.linking
    }

    /// Generator orders `p^{e_i}` as integers.
    pub fn orders(&self) -> Vec<BigInt> {
        self.exponents.iter().map(|&e| self.prime.pow(e)).collect()
    }

    /// Order of the component as a group.
    pub fn group_size(&self) -> BigInt {
        self.orders().iter().product()
    }

    /// Whether the pairing restricted to this component is nonsingular.
    ///
    /// The component order times the determinant of the canonical lift is an
    /// integer exactly when the pairing is defined, and the adjoint map is
    /// bijective exactly when that integer is a unit modulo `p`.
    pub fn is_nonsingular(&self) -> bool {
        let scaled = scaled_determinant(&self.orders(), &self.linking);
        if !scaled.is_integer() {
            return false;
        }
        !(scaled.to_integer() % &self.prime).is_zero()
    }
}

/// Torsion order times the determinant of the canonical `[0, 1)` lift.
fn scaled_determinant(orders: &[BigInt], linking: &[Vec<BigRational>]) -> BigRational {
    let size: BigInt = orders.iter().product();
    BigRational::from_integer(size) * det_rational(linking)
}

/// Splits a validated (chain, linking) pair into primary components.
fn components_of(
    torsion: &[BigInt],
    linking: &[Vec<BigRational>],
) -> Result<Vec<PrimaryComponent>> {
    let t = torsion.len();
    if t == 0 {
        return Ok(Vec::new());
    }
    let mut components = Vec::new();
    for (p, _) in factorize(&torsion[t - 1])? {
        let mut indices = Vec::new();
        let mut exponents = Vec::new();
        let mut multipliers = Vec::new();
        for (i, tau) in torsion.iter().enumerate() {
            let e = padic_valuation(tau, &p);
            if e > 0 {
                indices.push(i);
                exponents.push(e);
                multipliers.push(tau / p.pow(e));
            }
        }
        let s = indices.len();
        let restricted: Vec<Vec<BigRational>> = (0..s)
            .map(|a| {
                (0..s)
                    .map(|b| {
                        let scale =
                            BigRational::from_integer(&multipliers[a] * &multipliers[b]);
                        mod1(&(scale * &linking[indices[a]][indices[b]]))
                    })
                    .collect()
            })
            .collect();
        let mut component = PrimaryComponent::new(p, exponents, restricted)?;
        component.source_indices = indices;
        component.multipliers = multipliers;
        components.push(component);
    }
    Ok(components)
}

/// Rebuilds a single linked group out of primary components for distinct
/// primes, inverting [`LinkedGroup::primary_decompose`] up to isometry.
///
/// Generators are aligned from the largest order downwards: the reassembled
/// chain has length `max_p s_p`, and slot `k` collects the generator
/// `k - (t - s_p)` of every component long enough to reach it.  Orders
/// multiply and pairings add, because elements of coprime order pair to zero.
pub fn reassemble_components(components: &[PrimaryComponent]) -> Result<LinkedGroup> {
    for (i, a) in components.iter().enumerate() {
        for b in &components[i + 1..] {
            if a.prime() == b.prime() {
                return Err(Error::InvalidGroup(format!(
                    "two components share the prime {}",
                    a.prime()
                )));
            }
        }
    }
    let mut ordered: Vec<&PrimaryComponent> = components.iter().collect();
    ordered.sort_by(|a, b| a.prime().cmp(b.prime()));
    let t = ordered.iter().map(|c| c.exponents().len()).max().unwrap_or(0);
    let local = |c: &PrimaryComponent, slot: usize| -> Option<usize> {
        (slot + c.exponents().len()).checked_sub(t)
    };
    let mut torsion = Vec::with_capacity(t);
    let mut linking = vec![vec![BigRational::zero(); t]; t];
    for k in 0..t {
        let mut tau = BigInt::one();
        for c in &ordered {
            if let Some(l) = local(c, k) {
                tau *= c.prime().pow(c.exponents()[l]);
            }
        }
        torsion.push(tau);
        for l in 0..t {
            let mut sum = BigRational::zero();
            for c in &ordered {
                if let (Some(a), Some(b)) = (local(c, k), local(c, l)) {
                    sum += &c.linking()[a][b];
                }
            }
            linking[k][l] = mod1(&sum);
        }
    }
    LinkedGroup::new(0, torsion, linking)
}

/// A pair of transverse Lagrangian summands of the standard symplectic
/// lattice `Z^{2g}`: the fixed summand spanned by the last `g` basis vectors,
/// and a second summand given by the columns of `spanned`.
///
/// The constructor checks that the columns are isotropic (all pairings under
/// the standard alternating form vanish) and span a direct summand (their
/// Smith form is all ones).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegaardPair {
    genus: usize,
    spanned: IntegerMatrix,
}

impl HeegaardPair {
    /// Builds a pair from the `2g×g` column span of the second summand.
    pub fn new(genus: usize, spanned: IntegerMatrix) -> Result<Self> {
        if spanned.rows() != 2 * genus || spanned.cols() != genus {
            return Err(Error::Dimension(format!(
                "spanning matrix must be {}x{}, got {}x{}",
                2 * genus,
                genus,
                spanned.rows(),
                spanned.cols()
            )));
        }
        let j = standard_form_matrix(genus);
        let pairing = &(&spanned.transpose() * &j) * &spanned;
        if !pairing.is_zero() {
            return Err(Error::InvalidGroup(
                "spanning columns are not isotropic for the alternating form".into(),
            ));
        }
        let snf = smith_normal_form(&spanned);
        if snf.diag.iter().any(|d| d != &BigInt::one()) {
            return Err(Error::InvalidGroup(
                "spanning columns do not span a direct summand".into(),
            ));
        }
        Ok(HeegaardPair { genus, spanned })
    }

    /// Genus of the pair.
    pub fn genus(&self) -> usize {
        self.genus
    }

    /// The `2g×g` matrix whose columns span the second summand.
    pub fn spanned(&self) -> &IntegerMatrix {
        &self.spanned
    }
}

/// The pair spanned by the image of the fixed summand under a symplectic
/// matrix: its columns are the last `g` columns of the matrix, i.e. the `P`
/// block stacked over the `Q` block.
pub fn pair_from_matrix(h: &SymplecticMatrix) -> HeegaardPair {
    let spanned = h.p_block().vstack(&h.q_block());
    HeegaardPair::new(h.genus(), spanned)
        .expect("the symplectic image of a Lagrangian summand is a Lagrangian summand")
}

/// Quotient of `Z^{2g}` by both summands of a pair, with its linking form.
///
/// Column-reduce `[B | B̄]` to Smith form `U G V = D`: the classes of the
/// columns of `U⁻¹` generate the quotient with orders `d_i`.  For torsion
/// generators `x_i`, the relation `d_i x_i = G (V e_i)` rewrites a multiple
/// of `x_i` as a lattice vector whose `B`-part `b_i` is explicit, and the
/// linking is `λ(x_i, x_j) = ⟨b_i, J x_j⟩ / d_i mod 1`.
pub fn quotient_with_linking(pair: &HeegaardPair) -> Result<LinkedGroup> {
    let g = pair.genus();
    let b_fixed = {
        let top = IntegerMatrix::zeros(g, g);
        let bottom = IntegerMatrix::identity(g);
        top.vstack(&bottom)
    };
    let gmat = b_fixed.hstack(pair.spanned());
    let snf = smith_normal_form(&gmat);
    let mut torsion = Vec::new();
    let mut torsion_idx = Vec::new();
    let mut free_rank = 0usize;
    for (i, d) in snf.diag.iter().enumerate() {
        if d.is_zero() {
            free_rank += 1;
        } else if d > &BigInt::one() {
            torsion.push(d.clone());
            torsion_idx.push(i);
        }
    }
    let j = standard_form_matrix(g);
    let t = torsion.len();
    let mut linking = vec![vec![BigRational::zero(); t]; t];
    for (a, &i) in torsion_idx.iter().enumerate() {
        // d_i x_i = B w_top + B̄ w_bottom where w = V e_i.
        let w = snf.v.column(i);
        let mut b_part = IntegerMatrix::zeros(2 * g, 1);
        for k in 0..g {
            b_part.set(g + k, 0, w.get(k, 0).clone());
        }
        for (b, &jj) in torsion_idx.iter().enumerate() {
            let x_j = snf.u_inv.column(jj);
            let pairing = (&(&b_part.transpose() * &j) * &x_j).get(0, 0).clone();
            let value = BigRational::new(pairing, torsion[a].clone());
            linking[a][b] = mod1(&value);
        }
    }
    assert!(
        is_symmetric_rational(&linking),
        "the quotient linking of a Lagrangian pair is symmetric"
    );
    certified(
        LinkedGroup::new(free_rank, torsion, linking),
        "the quotient of a Lagrangian pair carries a nonsingular linking form",
    )
}

/// Unwraps a group construction whose structural validity is guaranteed
/// by the caller, but lets certification-size failures (torsion
/// coefficients too large to factor exactly) pass through as errors.
fn certified(group: Result<LinkedGroup>, claim: &str) -> Result<LinkedGroup> {
    match group {
        Ok(g) => Ok(g),
        Err(e @ (Error::PrimalityOutOfRange(_) | Error::FactorOutOfRange(_))) => Err(e),
        Err(e) => panic!("{claim}: {e}"),
    }
}

/// Reads the linked group straight off a partial normal form: the free rank
/// is the rank of the zero block of `P`, the torsion coefficients are the
/// `τ_i`, and generator `i` pairs with generator `j` as `q_ij / τ_j mod 1`,
/// where `q` is the `Q` block of the torsion core.
pub fn linking_from_normal_form(nf: &PartialNormalForm) -> Result<LinkedGroup> {
    let t = nf.t;
    let q = nf.core.q_block();
    let mut linking = vec![vec![BigRational::zero(); t]; t];
    for i in 0..t {
        for j in 0..t {
            let value = BigRational::new(q.get(i, j).clone(), nf.tau[j].clone());
            linking[i][j] = mod1(&value);
        }
    }
    assert!(
        is_symmetric_rational(&linking),
        "normal-form pairing is symmetric because q_ij τ_i = q_ji τ_j"
    );
    certified(
        LinkedGroup::new(nf.r, nf.tau.clone(), linking),
        "a partial normal form induces a valid linked group",
    )
}

/// The linked group of a symplectic gluing matrix, computed through the
/// partial normal form.
pub fn linked_group_of(h: &SymplecticMatrix) -> Result<LinkedGroup> {
    linking_from_normal_form(&partial_normal_form(h))
}

/// Random generation of valid linked groups and primary components, used by
/// randomized tests.
pub mod sampling {
    use super::*;
    use rand::Rng;

    /// A random divisibility chain `τ₁ | … | τ_t` with entries ≥ 2.
    pub fn random_torsion_chain<R: Rng>(rng: &mut R, max_t: usize, max_factor: u64) -> Vec<BigInt> {
        let t = rng.gen_range(0..=max_t);
        let mut chain = Vec::with_capacity(t);
        let mut current = BigInt::one();
        for i in 0..t {
            let lo = if i == 0 { 2 } else { 1 };
            current *= BigInt::from(rng.gen_range(lo..=max_factor.max(2)));
            if current < BigInt::from(2) {
                current = BigInt::from(2);
            }
            chain.push(current.clone());
        }
        chain
    }

    /// A random linked group with the given free rank; retries random
    /// pairings until the constructor accepts one.
    pub fn random_linked_group<R: Rng>(
        rng: &mut R,
        max_t: usize,
        max_factor: u64,
        free_rank: usize,
    ) -> LinkedGroup {
        for _ in 0..2000 {
            let torsion = random_torsion_chain(rng, max_t, max_factor);
            let t = torsion.len();
            let mut linking = vec![vec![BigRational::zero(); t]; t];
            for i in 0..t {
                for j in i..t {
                    let bound = torsion[i].gcd(&torsion[j]);
                    let modulus: u64 = (&bound).try_into().unwrap_or(u64::MAX);
                    let mut num = BigInt::from(rng.gen_range(0..modulus));
                    if i == j && rng.gen_bool(0.7) {
                        // Bias the diagonal towards units to keep the form
                        // nonsingular most of the time.
                        while num.gcd(&bound) != BigInt::one() {
                            num += 1;
                        }
                    }
                    let value = mod1(&BigRational::new(num, bound.clone()));
                    linking[i][j] = value.clone();
                    linking[j][i] = value;
                }
            }
            if let Ok(group) = LinkedGroup::new(free_rank, torsion, linking) {
                return group;
            }
        }
        panic!("failed to sample a nonsingular linking form");
    }

    /// A random nonsingular primary component for the prime `p`.
    pub fn random_primary_component<R: Rng>(
        rng: &mut R,
        p: u64,
        max_s: usize,
        max_exp: u32,
    ) -> PrimaryComponent {
        let s = rng.gen_range(1..=max_s);
        let mut exponents: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=max_exp)).collect();
        exponents.sort_unstable();
        random_component_with_exponents(rng, p, &exponents)
    }

    /// A random nonsingular component on the fixed group `⊕ Z/p^{e_i}`.
    pub fn random_component_with_exponents<R: Rng>(
        rng: &mut R,
        p: u64,
        exponents: &[u32],
    ) -> PrimaryComponent {
        let prime = BigInt::from(p);
        for _ in 0..2000 {
            let exponents = exponents.to_vec();
            let s = exponents.len();
            let orders: Vec<BigInt> = exponents.iter().map(|&e| prime.pow(e)).collect();
            let mut linking = vec![vec![BigRational::zero(); s]; s];
            for i in 0..s {
                for j in i..s {
                    let bound = orders[i].gcd(&orders[j]);
                    let modulus: u64 = (&bound).try_into().unwrap();
                    let mut num = BigInt::from(rng.gen_range(0..modulus));
                    if i == j && rng.gen_bool(0.6) {
                        while num.gcd(&bound) != BigInt::one() {
                            num += 1;
                        }
                    }
                    let value = mod1(&BigRational::new(num, bound.clone()));
                    linking[i][j] = value.clone();
                    linking[j][i] = value;
                }
            }
            if let Ok(component) = PrimaryComponent::new(prime.clone(), exponents, linking) {
                if component.is_nonsingular() {
                    return component;
                }
            }
        }
        panic!("failed to sample a nonsingular primary component");
    }
}
