//! Small helpers for dense matrices of exact rationals, used for linking
//! matrices and their determinants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact determinant of a square rational matrix by Gaussian elimination
/// over ℚ (no rounding anywhere).
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    for row in m {
        assert_eq!(row.len(), n, "determinant of a non-square matrix");
    }
    if n == 0 {
        return BigRational::one();
    }
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let pivot_row = match (k..n).find(|&i| !a[i][k].is_zero()) {
            Some(i) => i,
            None => return BigRational::zero(),
        };
        if pivot_row != k {
            a.swap(k, pivot_row);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            for j in k..n {
                let sub = &factor * &a[k][j];
                a[i][j] -= sub;
            }
        }
    }
    det
}

/// Exact symmetry test.
pub fn is_symmetric_rational(m: &[Vec<BigRational>]) -> bool {
    let n = m.len();
    m.iter().all(|row| row.len() == n)
        && (0..n).all(|i| (i + 1..n).all(|j| m[i][j] == m[j][i]))
}

/// Convenience constructor for a rational from machine integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_integer_matrix() {
        let m = vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(1, 4), rational(1, 5)],
        ];
        // 1/10 - 1/12 = 1/60.
        assert_eq!(det_rational(&m), rational(1, 60));
        assert_eq!(det_rational(&[]), rational(1, 1));
        let singular = vec![
            vec![rational(1, 2), rational(1, 2)],
            vec![rational(1, 2), rational(1, 2)],
        ];
        assert_eq!(det_rational(&singular), rational(0, 1));
    }

    #[test]
    fn determinant_needs_row_swap() {
        let m = vec![
            vec![rational(0, 1), rational(1, 1)],
            vec![rational(1, 1), rational(0, 1)],
        ];
        assert_eq!(det_rational(&m), rational(-1, 1));
    }

    #[test]
    fn symmetry() {
        let m = vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(1, 3), rational(1, 5)],
        ];
        assert!(is_symmetric_rational(&m));
        let n = vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(2, 3), rational(1, 5)],
        ];
        assert!(!is_symmetric_rational(&n));
    }
}
