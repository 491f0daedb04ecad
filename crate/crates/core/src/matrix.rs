//! Dense exact matrices and exact-rank elimination.
//!
//! Rational ranks use fraction-free (Bareiss) elimination on an integer
//! copy of the matrix; prime-field ranks use plain Gaussian elimination on
//! residues. Kernel bases come from a reduced row echelon form computed with
//! field arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{inv_mod, mul_mod, sub_mod, Field, Scalar};

/// Random entries are drawn uniformly from `[-ENTRY_BOUND, ENTRY_BOUND]`.
pub const ENTRY_BOUND: i64 = 1_000_000;

/// Row-major dense matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<Scalar>,
}

impl Matrix {
    /// Builds a matrix, checking the entry count and that all entries live in
    /// `field`.
    pub fn new(rows: usize, cols: usize, field: Field, entries: Vec<Scalar>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|s| s.field() != field) {
            return Err(Error::MixedField {
                left: field,
                right: bad.field(),
            });
        }
        Ok(Matrix {
            rows,
            cols,
            field,
            entries,
        })
    }

    /// Infers the field from the entries; an empty matrix is rational.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Matrix> {
        let field = entries.first().map_or(Field::Rational, Scalar::field);
        Matrix::new(rows, cols, field, entries)
    }

    /// Rational matrix from integer rows.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            entries.extend(
                r.as_ref()
                    .iter()
                    .map(|&v| Scalar::from_i64(v, Field::Rational)),
            );
        }
        Matrix {
            rows: rows.len(),
            cols,
            field: Field::Rational,
            entries,
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: Field,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                assert_eq!(v.field(), field, "entry outside matrix field");
                entries.push(v);
            }
        }
        Matrix {
            rows,
            cols,
            field,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Matrix {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![Scalar::zero(field); rows * cols],
        }
    }

    pub fn identity(n: usize, field: Field) -> Matrix {
        Matrix::from_fn(n, n, field, |r, c| Scalar::from_i64((r == c) as i64, field))
    }

    /// Matrix unit `E_{kl}`.
    pub fn unit(n: usize, k: usize, l: usize, field: Field) -> Matrix {
        Matrix::from_fn(n, n, field, |r, c| {
            Scalar::from_i64((r == k && c == l) as i64, field)
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry outside matrix field");
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |r, c| {
            self.get(c, r).clone()
        })
    }

    fn same_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field,
                right: other.field,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.field);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * other.cols + c;
                        out.entries[idx] = &out.entries[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![Scalar::zero(self.field); self.rows];
        for (r, acc) in out.iter_mut().enumerate() {
            for (a, b) in self.row(r).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    *acc = &*acc + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("matrix sum of different sizes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(&Scalar::from_i64(-1, other.field)))
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// `P * P == P`.
    pub fn is_idempotent(&self) -> bool {
        self.is_square() && self.mul(self).map(|sq| sq == *self).unwrap_or(false)
    }

    pub fn to_field(&self, field: Field) -> Result<Matrix> {
        let entries = self
            .entries
            .iter()
            .map(|s| s.to_field(field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            field,
            entries,
        })
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Rational => bareiss_rank(self.integer_rows(), self.cols),
            Field::Prime(p) => prime_rank(self.residue_rows(), self.cols, p),
        }
    }

    /// `cols - rank`.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right kernel, one vector per free column of the reduced
    /// row echelon form. The free coordinate of each vector is `1`.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[free] = Scalar::one(self.field);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref.get(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.entries[idx] = &m.entries[idx] * &inv;
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let idx = i * m.cols + j;
                    m.entries[idx] = &m.entries[idx] - &(&f * pv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, self.field, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else {
                Scalar::from_i64((c - n == r) as i64, self.field)
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Matrix::from_fn(n, n, self.field, |r, c| {
            red.get(r, c + n).clone()
        }))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |acc, s| {
                    acc.lcm(s.as_rational().expect("rational entry").denom())
                });
                row.iter()
                    .map(|s| {
                        let q = s.as_rational().expect("rational entry");
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect()
    }

    fn residue_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|s| s.residue().expect("prime entry"))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Fraction-free elimination. After step `k` every surviving entry is a
/// `(k+1)`-minor of the input, so the division by the previous pivot is
/// exact. Rows that become zero are dropped from the working set.
fn bareiss_rank(mut a: Vec<Vec<BigInt>>, ncols: usize) -> usize {
    a.retain(|row| row.iter().any(|v| !v.is_zero()));
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == a.len() {
            break;
        }
        // smallest nonzero pivot keeps the minors short
        let Some(p) = (rank..a.len())
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let piv = &pivot_row[c];
        for row in tail.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let pj = &pivot_row[j];
                let x = &row[j];
                let lead_term = !lead.is_zero() && !pj.is_zero();
                if x.is_zero() && !lead_term {
                    continue;
                }
                let mut v = piv * x;
                if lead_term {
                    v -= &lead * pj;
                }
                if !prev.is_one() {
                    debug_assert!((&v % &prev).is_zero());
                    v /= &prev;
                }
                row[j] = v;
            }
        }
        prev = a[rank][c].clone();
        rank += 1;
        let (_, tail) = a.split_at(rank);
        if tail.iter().any(|row| row.iter().all(Zero::is_zero)) {
            let keep: Vec<Vec<BigInt>> = a
                .drain(rank..)
                .filter(|row| row.iter().any(|v| !v.is_zero()))
                .collect();
            a.extend(keep);
        }
    }
    rank
}

fn prime_rank(mut a: Vec<Vec<u64>>, ncols: usize, p: u64) -> usize {
    let mut rank = 0;
    for c in 0..ncols {
        if rank == a.len() {
            break;
        }
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            row[c] = 0;
            for j in c + 1..ncols {
                if prow[j] != 0 {
                    row[j] = sub_mod(row[j], mul_mod(f, prow[j], p), p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Deterministic rational matrix with integer entries uniform in
/// `[-ENTRY_BOUND, ENTRY_BOUND]`.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, cols, Field::Rational, |_, _| random_entry(&mut rng))
}

pub(crate) fn random_entry(rng: &mut impl Rng) -> Scalar {
    Scalar::from_i64(
        rng.random_range(-ENTRY_BOUND..=ENTRY_BOUND),
        Field::Rational,
    )
}
