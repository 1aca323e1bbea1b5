//! Smith normal form over the integers with unimodular transforms.
//!
//! For an integer matrix `P` this computes unimodular `U`, `V` and a
//! diagonal `D` with `U * P * V = D`, nonnegative diagonal entries, each
//! entry dividing the next, and nonzero entries preceding zeros.  The
//! inverse transforms are accumulated alongside, so callers that need
//! `U⁻¹` or `V⁻¹` (for example to express new generators in the original
//! basis) get them exactly without solving any linear system.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::IntegerMatrix;

/// Result of a Smith normal form computation: `U * input * V = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Unimodular row transform (`rows x rows`).
    pub u: IntegerMatrix,
    /// Diagonal matrix, same shape as the input.
    pub d: IntegerMatrix,
    /// Unimodular column transform (`cols x cols`).
    pub v: IntegerMatrix,
    /// Diagonal entries of `d` (length `min(rows, cols)`), nonnegative,
    /// each dividing the next, nonzero entries first.
    pub diag: Vec<BigInt>,
    /// Exact inverse of `u`.
    pub u_inv: IntegerMatrix,
    /// Exact inverse of `v`.
    pub v_inv: IntegerMatrix,
}

impl SmithForm {
    /// Number of diagonal entries equal to zero.
    pub fn rank_deficiency(&self) -> usize {
        self.diag.iter().filter(|d| d.is_zero()).count()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diag.len() - self.rank_deficiency()
    }

    /// Check every advertised invariant against the original input.
    /// Panics on any violation; used as a self-check after computation.
    fn verify(&self, input: &IntegerMatrix) {
        assert_eq!(&(&self.u * input) * &self.v, self.d, "U*P*V != D");
        assert!((&self.u * &self.u_inv).is_identity(), "u_inv is not U^-1");
        assert!((&self.v * &self.v_inv).is_identity(), "v_inv is not V^-1");
        let det_u = self.u.determinant();
        let det_v = self.v.determinant();
        assert!(det_u.abs().is_one(), "U not unimodular");
        assert!(det_v.abs().is_one(), "V not unimodular");
        let mut seen_zero = false;
        for k in 0..self.diag.len() {
            assert!(self.diag[k].sign() != num_bigint::Sign::Minus, "negative diagonal");
            if self.diag[k].is_zero() {
                seen_zero = true;
            } else {
                assert!(!seen_zero, "zero before nonzero on the diagonal");
                if k + 1 < self.diag.len() && !self.diag[k + 1].is_zero() {
                    assert!(
                        (&self.diag[k + 1] % &self.diag[k]).is_zero(),
                        "divisibility chain broken"
                    );
                }
            }
        }
    }
}

trait IsOne {
    fn is_one(&self) -> bool;
}
impl IsOne for BigInt {
    fn is_one(&self) -> bool {
        use num_traits::One;
        *self == BigInt::one()
    }
}

/// State threaded through the elimination: the working matrix plus the
/// four transform accumulators, kept consistent after every elementary op.
struct Workspace {
    a: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl Workspace {
    fn new(input: &IntegerMatrix) -> Self {
        Workspace {
            a: input.clone(),
            u: IntegerMatrix::identity(input.rows()),
            u_inv: IntegerMatrix::identity(input.rows()),
            v: IntegerMatrix::identity(input.cols()),
            v_inv: IntegerMatrix::identity(input.cols()),
        }
    }

    /// Row op `row[dst] += f * row[src]`; mirrored into `u` and `u_inv`.
    fn row_add(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.row_add(dst, src, f);
        self.u.row_add(dst, src, f);
        let neg = -f;
        self.u_inv.col_add(src, dst, &neg);
    }

    /// Column op `col[dst] += f * col[src]`; mirrored into `v` and `v_inv`.
    fn col_add(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.col_add(dst, src, f);
        self.v.col_add(dst, src, f);
        let neg = -f;
        self.v_inv.row_add(src, dst, &neg);
    }

    fn row_swap(&mut self, r1: usize, r2: usize) {
        self.a.row_swap(r1, r2);
        self.u.row_swap(r1, r2);
        self.u_inv.col_swap(r1, r2);
    }

    fn col_swap(&mut self, c1: usize, c2: usize) {
        self.a.col_swap(c1, c2);
        self.v.col_swap(c1, c2);
        self.v_inv.row_swap(c1, c2);
    }

    fn row_negate(&mut self, r: usize) {
        self.a.row_negate(r);
        self.u.row_negate(r);
        self.u_inv.col_negate(r);
    }
}

/// Find the nonzero entry of smallest absolute value in the trailing
/// submatrix starting at `(k, k)`, scanning row-major so ties resolve to
/// the lowest `(row, col)`.  Returns `None` when the submatrix is zero.
fn find_pivot(a: &IntegerMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            let val = a.get(i, j);
            if val.is_zero() {
                continue;
            }
            let abs = val.abs();
            match &best {
                Some((_, _, b)) if *b <= abs => {}
                _ => best = Some((i, j, abs)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Compute the Smith normal form of an arbitrary integer matrix.
///
/// Deterministic: pivots are chosen as the smallest nonzero absolute
/// value, ties broken by the lowest `(row, col)` position.
pub fn smith_normal_form(input: &IntegerMatrix) -> SmithForm {
    let mut w = Workspace::new(input);
    let m = input.rows();
    let n = input.cols();
    let steps = m.min(n);

    'diag: for k in 0..steps {
        'pivot: loop {
            let (pi, pj) = match find_pivot(&w.a, k) {
                Some(p) => p,
                None => break 'diag, // trailing submatrix is zero
            };
            w.row_swap(k, pi);
            w.col_swap(k, pj);

            // Clear column k below the pivot; a nonzero remainder is
            // strictly smaller than the pivot, so re-select.
            let mut clean = true;
            for i in k + 1..m {
                if w.a.get(i, k).is_zero() {
                    continue;
                }
                let q = w.a.get(i, k) / w.a.get(k, k);
                w.row_add(i, k, &(-q));
                if !w.a.get(i, k).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Clear row k to the right of the pivot.
            for j in k + 1..n {
                if w.a.get(k, j).is_zero() {
                    continue;
                }
                let q = w.a.get(k, j) / w.a.get(k, k);
                w.col_add(j, k, &(-q));
                if !w.a.get(k, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Make the pivot divide every trailing entry, so the final
            // diagonal automatically satisfies the divisibility chain.
            for i in k + 1..m {
                for j in k + 1..n {
                    if !(w.a.get(i, j) % w.a.get(k, k)).is_zero() {
                        w.row_add(k, i, &BigInt::from(1));
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
        if w.a.get(k, k).sign() == num_bigint::Sign::Minus {
            w.row_negate(k);
        }
    }

    let diag: Vec<BigInt> = (0..steps).map(|k| w.a.get(k, k).clone()).collect();
    let form = SmithForm {
        u: w.u,
        d: w.a,
        v: w.v,
        diag,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    };
    form.verify(input);
    form
}
