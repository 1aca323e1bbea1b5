//! Dense integer matrices with exact arithmetic.
//!
//! All entries are arbitrary-precision integers, so products, determinants,
//! and elimination steps never overflow or round.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A dense `rows x cols` matrix over the integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    /// The `n x n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Build a matrix from a closure giving the entry at `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntegerMatrix { rows, cols, data }
    }

    /// Build a matrix from rows of machine integers (convenient in tests).
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row * self.cols + col]
    }

    /// Overwrite the entry at `(row, col)`.
    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.data[row * self.cols + col] = value;
    }

    /// Mutable access to the entry at `(row, col)`.
    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut BigInt {
        &mut self.data[row * self.cols + col]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Copy of the block with the given half-open row and column ranges.
    pub fn submatrix(&self, row0: usize, row1: usize, col0: usize, col1: usize) -> Self {
        assert!(row0 <= row1 && row1 <= self.rows && col0 <= col1 && col1 <= self.cols);
        Self::from_fn(row1 - row0, col1 - col0, |i, j| {
            self.get(row0 + i, col0 + j).clone()
        })
    }

    /// Overwrite the block whose top-left corner is `(row0, col0)` with `block`.
    pub fn set_submatrix(&mut self, row0: usize, col0: usize, block: &IntegerMatrix) {
        assert!(row0 + block.rows <= self.rows && col0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row0 + i, col0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &IntegerMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_submatrix(0, 0, self);
        m.set_submatrix(self.rows, self.cols, other);
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntegerMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack: row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        m.set_submatrix(0, 0, self);
        m.set_submatrix(0, self.cols, other);
        m
    }

    /// Vertical concatenation of `self` on top of `other`.
    pub fn vstack(&self, other: &IntegerMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack: column mismatch");
        let mut m = Self::zeros(self.rows + other.rows, self.cols);
        m.set_submatrix(0, 0, self);
        m.set_submatrix(self.rows, 0, other);
        m
    }

    /// The `col`-th column as an `n x 1` matrix.
    pub fn column(&self, col: usize) -> Self {
        self.submatrix(0, self.rows, col, col + 1)
    }

    /// Apply `f` to every entry.
    pub fn map(&self, mut f: impl FnMut(&BigInt) -> BigInt) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j)))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: &BigInt) -> Self {
        self.map(|x| x * s)
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    ///
    /// Every intermediate division in the Bareiss recurrence is exact over
    /// the integers, so no rationals are needed.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                // Find a row below with a nonzero pivot and swap it up.
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Elementary row operation: add `factor` times row `src` to row `dst`.
    pub fn row_add(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + self.get(src, j) * factor;
            self.set(dst, j, v);
        }
    }

    /// Elementary column operation: add `factor` times column `src` to column `dst`.
    pub fn col_add(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + self.get(i, src) * factor;
            self.set(i, dst, v);
        }
    }

    /// Swap two rows.
    pub fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let ja = a * self.cols + j;
            let jb = b * self.cols + j;
            self.data.swap(ja, jb);
        }
    }

    /// Swap two columns.
    pub fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Negate a row in place.
    pub fn row_negate(&mut self, row: usize) {
        for j in 0..self.cols {
            let v = -self.get(row, j);
            self.set(row, j, v);
        }
    }

    /// Negate a column in place.
    pub fn col_negate(&mut self, col: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, col);
            self.set(i, col, v);
        }
    }
}

impl Add for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn add(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shape mismatch");
        IntegerMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl Sub for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn sub(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shape mismatch");
        IntegerMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl Neg for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn neg(self) -> IntegerMatrix {
        self.map(|x| -x)
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "mul: inner dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = self.get(i, k);
                if lik.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + lik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Column-aligned plain text, one row per line.
        let strings: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| strings.iter().map(|row| row[j].len()).max().unwrap_or(0))
            .collect();
        for (i, row) in strings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, s) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", s, width = widths[j])?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}
