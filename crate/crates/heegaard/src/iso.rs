//! Exhaustive isometry search between finite linking forms.
//!
//! Two torsion groups with pairings are isometric when some group
//! isomorphism carries one pairing to the other.  For the group sizes the
//! classification tests care about (a few thousand elements) this can be
//! decided by direct search: pick images for the generators one at a time,
//! pruning on element order and on the pairings against everything already
//! placed, and confirm surjectivity at the end.  The search doubles as an
//! independent oracle for the invariant-based classification routines.
//!
//! All arithmetic runs over `i64`/`i128` after rescaling the pairings to a
//! common denominator; the size limits guarantee no overflow.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::matrix::IntegerMatrix;
use crate::exact::numtheory::normalize_mod;
use crate::exact::snf::smith_normal_form;
use crate::linked::{LinkedGroup, PrimaryComponent};

/// Default cap on the number of candidate placements the search may try.
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

/// A finite abelian group with a linking form, rescaled to machine integers.
///
/// Generator `i` has order `orders[i]` (an ascending divisibility chain) and
/// pairs with generator `j` as `num[i][j] / modulus` where `modulus` is the
/// largest order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteForm {
    orders: Vec<i64>,
    modulus: i64,
    num: Vec<Vec<i64>>,
    size: i64,
}

impl FiniteForm {
    /// Rescales a (orders, pairing) presentation, refusing groups larger
    /// than `limit` elements.
    pub fn from_parts(
        orders: &[BigInt],
        linking: &[Vec<BigRational>],
        limit: usize,
    ) -> Result<Self> {
        let size_big: BigInt = orders.iter().product();
        if size_big > BigInt::from(limit) {
            return Err(Error::SizeLimit {
                needed: size_big.to_string(),
                limit,
            });
        }
        let size = size_big.to_i64().expect("size fits after the limit check");
        let orders: Vec<i64> = orders
            .iter()
            .map(|o| o.to_i64().expect("orders divide the group size"))
            .collect();
        let modulus = orders.last().copied().unwrap_or(1);
        let t = orders.len();
        let big_modulus = BigInt::from(modulus);
        let mut num = vec![vec![0i64; t]; t];
        for i in 0..t {
            for j in 0..t {
                let scaled = &linking[i][j] * BigRational::from_integer(big_modulus.clone());
                assert!(
                    scaled.is_integer(),
                    "pairing denominators divide the largest order"
                );
                num[i][j] = normalize_mod(&scaled.to_integer(), &big_modulus)
                    .to_i64()
                    .expect("reduced numerator fits");
            }
        }
        Ok(FiniteForm {
            orders,
            modulus,
            num,
            size,
        })
    }

    /// The torsion part of a linked group as a finite form.
    pub fn from_group(group: &LinkedGroup, limit: usize) -> Result<Self> {
        Self::from_parts(group.torsion(), group.linking(), limit)
    }

    /// A primary component as a finite form.
    pub fn from_component(component: &PrimaryComponent, limit: usize) -> Result<Self> {
        Self::from_parts(&component.orders(), component.linking(), limit)
    }

    /// Generator orders, ascending.
    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    /// Number of generators.
    pub fn generator_count(&self) -> usize {
        self.orders.len()
    }

    /// Number of group elements.
    pub fn size(&self) -> i64 {
        self.size
    }

    /// Order of the element with the given generator coordinates.
    fn element_order(&self, coords: &[i64]) -> i64 {
        let mut order = 1i64;
        for (&c, &o) in coords.iter().zip(&self.orders) {
            order = order.lcm(&(o / c.gcd(&o)));
        }
        order
    }

    /// Pairing of two elements, returned as a numerator in `[0, modulus)`.
    fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.modulus as i128;
        let mut acc: i128 = 0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                acc = (acc + (xi as i128) * (yj as i128) % m * (self.num[i][j] as i128)) % m;
            }
        }
        acc.rem_euclid(m) as i64
    }

    /// All elements in lexicographic coordinate order.
    fn elements(&self) -> Vec<Vec<i64>> {
        let t = self.orders.len();
        let mut out = Vec::with_capacity(self.size as usize);
        let mut coords = vec![0i64; t];
        loop {
            out.push(coords.clone());
            let mut k = t;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                coords[k] += 1;
                if coords[k] < self.orders[k] {
                    break;
                }
                coords[k] = 0;
            }
        }
    }
}

/// Whether the placed images generate the whole target group: together with
/// the order relations they must span the full coordinate lattice.
fn generates(target: &FiniteForm, placed: &[Vec<i64>]) -> bool {
    let t = target.orders.len();
    let mut m = IntegerMatrix::zeros(t, t + placed.len());
    for j in 0..t {
        m.set(j, j, BigInt::from(target.orders[j]));
    }
    for (i, y) in placed.iter().enumerate() {
        for j in 0..t {
            m.set(j, t + i, BigInt::from(y[j]));
        }
    }
    let snf = smith_normal_form(&m);
    snf.diag.iter().all(|d| d == &BigInt::one())
}

/// Column matrix of a complete assignment: column `i` holds the coordinates
/// of the image of generator `i`.
fn matrix_of(placed: &[Vec<i64>], t: usize) -> IntegerMatrix {
    IntegerMatrix::from_fn(t, placed.len(), |j, i| BigInt::from(placed[i][j]))
}

#[allow(clippy::too_many_arguments)]
fn place(
    a: &FiniteForm,
    b: &FiniteForm,
    by_order: &BTreeMap<i64, Vec<Vec<i64>>>,
    placed: &mut Vec<Vec<i64>>,
    nodes: &mut usize,
    node_limit: usize,
    on_complete: &mut dyn FnMut(&[Vec<i64>]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    let i = placed.len();
    if i == a.orders.len() {
        if generates(b, placed) {
            return Ok(on_complete(placed));
        }
        return Ok(ControlFlow::Continue(()));
    }
    let Some(candidates) = by_order.get(&a.orders[i]) else {
        return Ok(ControlFlow::Continue(()));
    };
    'candidates: for y in candidates {
        *nodes += 1;
        if *nodes > node_limit {
            return Err(Error::SizeLimit {
                needed: "an isometry search exceeding the node budget".into(),
                limit: node_limit,
            });
        }
        if b.pairing(y, y) != a.num[i][i] {
            continue;
        }
        for (k, prev) in placed.iter().enumerate() {
            if b.pairing(prev, y) != a.num[k][i] {
                continue 'candidates;
            }
        }
        placed.push(y.clone());
        let flow = place(a, b, by_order, placed, nodes, node_limit, on_complete)?;
        placed.pop();
        if flow.is_break() {
            return Ok(flow);
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Runs the backtracking search, invoking `on_complete` for every isometry
/// found; a `Break` return stops the enumeration early.
fn run_search(
    a: &FiniteForm,
    b: &FiniteForm,
    node_limit: usize,
    on_complete: &mut dyn FnMut(&[Vec<i64>]) -> ControlFlow<()>,
) -> Result<()> {
    if a.orders != b.orders {
        return Ok(());
    }
    if a.orders.is_empty() {
        let _ = on_complete(&[]);
        return Ok(());
    }
    let mut by_order: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for e in b.elements() {
        by_order.entry(b.element_order(&e)).or_default().push(e);
    }
    let mut placed = Vec::with_capacity(a.orders.len());
    let mut nodes = 0usize;
    let _ = place(a, b, &by_order, &mut placed, &mut nodes, node_limit, on_complete)?;
    Ok(())
}

/// Searches for one isometry from `a` to `b`; `Ok(None)` means none exists.
///
/// The returned matrix sends generator `i` of `a` to the element of `b`
/// whose coordinates form its column `i`.
pub fn find_isometry(
    a: &FiniteForm,
    b: &FiniteForm,
    node_limit: usize,
) -> Result<Option<IntegerMatrix>> {
    let mut found = None;
    let t = a.generator_count();
    run_search(a, b, node_limit, &mut |placed| {
        found = Some(matrix_of(placed, t));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Whether the two forms are isometric, by exhaustive search.
pub fn are_isometric(a: &FiniteForm, b: &FiniteForm, node_limit: usize) -> Result<bool> {
    Ok(find_isometry(a, b, node_limit)?.is_some())
}

/// Determinants of *all* isometries from `a` to `b`, reduced modulo the
/// smallest generator order.
///
/// The determinant is well defined there: changing a coordinate in row `j`
/// by the order `τ_j` moves the determinant by a multiple of `τ_j`, and every
/// `τ_j` is a multiple of `τ₁`.  An empty set means the forms are not
/// isometric; a trivial group reports `{1 mod 1} = {0}` conventions aside as
/// the singleton of the empty determinant.
pub fn isometry_dets(
    a: &FiniteForm,
    b: &FiniteForm,
    node_limit: usize,
) -> Result<BTreeSet<BigInt>> {
    let mut dets = BTreeSet::new();
    let t = a.generator_count();
    let tau1 = BigInt::from(a.orders.first().copied().unwrap_or(1));
    run_search(a, b, node_limit, &mut |placed| {
        let det = matrix_of(placed, t).determinant();
        dets.insert(normalize_mod(&det, &tau1));
        ControlFlow::Continue(())
    })?;
    Ok(dets)
}

/// Certifies that `m` columns define an isometry from `a` to `b`: every
/// image has the exact order of its source generator, all pairings match,
/// and the images generate.
pub fn validate_isometry(a: &FiniteForm, b: &FiniteForm, m: &IntegerMatrix) -> bool {
    let t = a.generator_count();
    if a.orders != b.orders || m.rows() != t || m.cols() != t {
        return false;
    }
    let columns: Vec<Vec<i64>> = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    normalize_mod(m.get(j, i), &BigInt::from(b.orders[j]))
                        .to_i64()
                        .expect("reduced coordinate fits")
                })
                .collect()
        })
        .collect();
    for (i, y) in columns.iter().enumerate() {
        if b.element_order(y) != a.orders[i] {
            return false;
        }
        for (k, z) in columns.iter().enumerate() {
            if b.pairing(y, z) != a.num[i][k] {
                return false;
            }
        }
    }
    generates(b, &columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratmat::rational;
    use crate::linked::sampling::random_linked_group;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cyclic_form(order: i64, num: i64) -> FiniteForm {
        FiniteForm::from_parts(
            &[BigInt::from(order)],
            &[vec![rational(num, order)]],
            1 << 20,
        )
        .unwrap()
    }

    fn plane_form(order: i64, off: i64) -> FiniteForm {
        let z = rational(0, 1);
        let l = rational(off, order);
        FiniteForm::from_parts(
            &[BigInt::from(order), BigInt::from(order)],
            &[vec![z.clone(), l.clone()], vec![l, z]],
            1 << 20,
        )
        .unwrap()
    }

    #[test]
    fn cyclic_isometries_are_unit_square_rescalings() {
        // u·g has pairing u²λ, so (Z/5, 1/5) ≅ (Z/5, 4/5) via u = 2 but is
        // not isometric to (Z/5, 2/5): 2 is not a square modulo 5.
        let a = cyclic_form(5, 1);
        assert!(are_isometric(&a, &cyclic_form(5, 4), 10_000).unwrap());
        assert!(!are_isometric(&a, &cyclic_form(5, 2), 10_000).unwrap());
        assert!(are_isometric(&cyclic_form(5, 2), &cyclic_form(5, 3), 10_000).unwrap());
    }

    #[test]
    fn self_isometry_determinants_of_z8() {
        // Every unit u modulo 8 satisfies u² ≡ 1, so all four units give
        // self-isometries of (Z/8, 1/8).
        let a = cyclic_form(8, 1);
        let dets = isometry_dets(&a, &a, 10_000).unwrap();
        let expect: BTreeSet<BigInt> =
            [1, 3, 5, 7].iter().map(|&u| BigInt::from(u)).collect();
        assert_eq!(dets, expect);
    }

    #[test]
    fn self_isometry_determinants_of_z5() {
        let a = cyclic_form(5, 1);
        let dets = isometry_dets(&a, &a, 10_000).unwrap();
        let expect: BTreeSet<BigInt> = [1, 4].iter().map(|&u| BigInt::from(u)).collect();
        assert_eq!(dets, expect);
    }

    #[test]
    fn hyperbolic_planes_on_z8_are_isometric() {
        let a = plane_form(8, 1);
        let b = plane_form(8, 3);
        let m = find_isometry(&a, &b, 100_000).unwrap().expect("isometric");
        assert!(validate_isometry(&a, &b, &m));
        // Found isometries must certify in both directions of the check.
        assert!(!validate_isometry(&a, &cyclic_form(8, 1), &m));
    }

    #[test]
    fn order_nine_squares_decide_isometry()  {
        // Squares modulo 9 are {1, 4, 7}.
        let a = cyclic_form(9, 1);
        assert!(are_isometric(&a, &cyclic_form(9, 4), 10_000).unwrap());
        assert!(are_isometric(&a, &cyclic_form(9, 7), 10_000).unwrap());
        assert!(!are_isometric(&a, &cyclic_form(9, 2), 10_000).unwrap());
    }

    #[test]
    fn mismatched_orders_are_never_isometric() {
        let a = cyclic_form(4, 1);
        let b = FiniteForm::from_parts(
            &[BigInt::from(2), BigInt::from(2)],
            &[
                vec![rational(1, 2), rational(0, 1)],
                vec![rational(0, 1), rational(1, 2)],
            ],
            1 << 20,
        )
        .unwrap();
        assert_eq!(a.size(), b.size());
        assert!(!are_isometric(&a, &b, 10_000).unwrap());
        assert!(isometry_dets(&a, &b, 10_000).unwrap().is_empty());
    }

    #[test]
    fn trivial_group_is_isometric_to_itself() {
        let a = FiniteForm::from_parts(&[], &[], 16).unwrap();
        assert!(are_isometric(&a, &a, 16).unwrap());
        let m = find_isometry(&a, &a, 16).unwrap().unwrap();
        assert_eq!(m.rows(), 0);
        assert_eq!(isometry_dets(&a, &a, 16).unwrap().len(), 1);
    }

    #[test]
    fn size_and_node_limits_error() {
        assert!(matches!(
            FiniteForm::from_parts(&[BigInt::from(64)], &[vec![rational(1, 64)]], 32),
            Err(Error::SizeLimit { .. })
        ));
        let a = plane_form(8, 1);
        assert!(matches!(
            isometry_dets(&a, &a, 3),
            Err(Error::SizeLimit { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn unit_rescaling_produces_isometric_forms(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_linked_group(&mut rng, 2, 8, 0);
            let a = match FiniteForm::from_group(&g, 4096) {
                Ok(f) => f,
                Err(_) => return Ok(()),
            };
            // Rescale each generator by a random unit: an explicit isometry.
            let t = g.torsion_rank();
            let units: Vec<i64> = (0..t)
                .map(|i| {
                    let o = a.orders()[i];
                    loop {
                        let u = rng.gen_range(1..o.max(2));
                        if u.gcd(&o) == 1 {
                            return u;
                        }
                    }
                })
                .collect();
            let rescaled: Vec<Vec<BigRational>> = (0..t)
                .map(|i| {
                    (0..t)
                        .map(|j| {
                            let s = BigRational::from_integer(BigInt::from(units[i] * units[j]));
                            crate::exact::numtheory::mod1(&(s * g.linking_entry(i, j)))
                        })
                        .collect()
                })
                .collect();
            let b = FiniteForm::from_parts(g.torsion(), &rescaled, 4096).unwrap();
            let m = find_isometry(&a, &b, 500_000).unwrap();
            prop_assert!(m.is_some());
            prop_assert!(validate_isometry(&a, &b, &m.unwrap()));
        }

        #[test]
        fn determinants_of_self_isometries_form_a_group_closed_under_inverse(
            order in 2i64..20,
            num in 1i64..19,
        ) {
            let order = order;
            let num = num % order;
            prop_assume!(num.gcd(&order) == 1);
            let a = cyclic_form(order, num);
            let dets = isometry_dets(&a, &a, 100_000).unwrap();
            prop_assert!(!dets.is_empty());
            // Closed under inversion modulo the order.
            for d in &dets {
                let inv = crate::exact::numtheory::mod_inverse(d, &BigInt::from(order))
                    .expect("determinant of an isometry is a unit");
                prop_assert!(dets.contains(&inv));
                prop_assert!(!d.is_zero());
            }
        }
    }
}
