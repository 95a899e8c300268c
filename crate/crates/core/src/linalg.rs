//! Dense exact linear algebra: row echelon forms, ranks, kernels, membership.
//!
//! Elimination is column-by-column with the lowest-index nonzero row as
//! pivot, so results are deterministic for a fixed input. The row updates
//! below (and, for the reduced form, above) each pivot are independent and
//! run on the rayon pool when the `parallel` feature is enabled and
//! [`Strategy::Parallel`] is selected.

use thiserror::Error;

use crate::field::Field;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per rayon task; below this the pool overhead dominates.
#[cfg(feature = "parallel")]
const MIN_ROWS_PER_TASK: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("vector has length {found}, matrix has {expected} columns")]
    LengthMismatch { expected: usize, found: usize },
}

/// How row reductions are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Strategy {
    /// Parallel when built with `parallel` and the pool has more than one thread.
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        if rayon::current_num_threads() > 1 {
            return Strategy::Parallel;
        }
        Strategy::Sequential
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> DenseMatrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<F::Elem>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F::Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `M * v` for a column vector `v`.
    pub fn mul_vec(&self, field: &F, v: &[F::Elem]) -> Result<Vec<F::Elem>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).fold(field.zero(), |acc, (a, b)| {
                    if field.is_zero(a) || field.is_zero(b) {
                        acc
                    } else {
                        field.add(&acc, &field.mul(a, b))
                    }
                })
            })
            .collect())
    }

    pub fn count_nonzero(&self, field: &F) -> usize {
        self.data.iter().filter(|x| !field.is_zero(x)).count()
    }
}

/// Reduced row echelon form with its pivot columns.
///
/// Only the `rank` nonzero rows are kept; each has a 1 in its pivot column
/// and every other row has 0 there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrefResult<F: Field> {
    matrix: DenseMatrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> RrefResult<F> {
    /// The row space spanned by nothing, inside `F^cols`.
    pub fn empty(cols: usize) -> Self {
        Self {
            matrix: DenseMatrix {
                rows: 0,
                cols,
                data: Vec::new(),
            },
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix<F> {
        self.matrix
    }

    /// Basis of the null space `{v : M v = 0}` of the original matrix.
    ///
    /// One vector per free column `f`, with `v[f] = 1`, zero on the other free
    /// columns and `-R[i][f]` on pivot column `i`.
    pub fn kernel_basis(&self, field: &F) -> Vec<Vec<F::Elem>> {
        let cols = self.cols();
        let mut is_pivot = vec![false; cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![field.zero(); cols];
                v[free] = field.one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    v[p] = field.neg(self.matrix.get(i, free));
                }
                v
            })
            .collect()
    }

    /// Whether `v` lies in the row space.
    pub fn in_row_space(&self, field: &F, v: &[F::Elem]) -> Result<bool, LinalgError> {
        Ok(self.reduce(field, v)?.iter().all(|x| field.is_zero(x)))
    }

    /// Remainder of `v` after subtracting its row-space component along the pivots.
    pub fn reduce(&self, field: &F, v: &[F::Elem]) -> Result<Vec<F::Elem>, LinalgError> {
        if v.len() != self.cols() {
            return Err(LinalgError::LengthMismatch {
                expected: self.cols(),
                found: v.len(),
            });
        }
        let mut v = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if !field.is_zero(&v[p]) {
                let factor = v[p].clone();
                field.sub_mul_assign(&mut v[p..], &factor, &self.matrix.row(i)[p..]);
            }
        }
        Ok(v)
    }
}

fn update_rows<E, G>(block: &mut [E], cols: usize, strategy: Strategy, op: G)
where
    E: Send,
    G: Fn(&mut [E]) + Send + Sync,
{
    if cols == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel && block.len() / cols >= 2 * MIN_ROWS_PER_TASK {
        block
            .par_chunks_mut(cols)
            .with_min_len(MIN_ROWS_PER_TASK)
            .for_each(op);
        return;
    }
    let _ = strategy;
    block.chunks_mut(cols).for_each(op);
}

fn swap_rows<E>(data: &mut [E], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Forward elimination in place; returns pivot columns. Rows `0..rank`
/// end up in echelon form with unit pivots, the remaining rows are zero.
fn echelonize<F: Field>(
    field: &F,
    data: &mut [F::Elem],
    rows: usize,
    cols: usize,
    strategy: Strategy,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(r) = (rank..rows).find(|&r| !field.is_zero(&data[r * cols + c])) else {
            continue;
        };
        swap_rows(data, cols, r, rank);
        let inv = field.inv(&data[rank * cols + c]).expect("pivot is nonzero");
        field.scale_assign(&mut data[rank * cols + c..(rank + 1) * cols], &inv);
        let (head, tail) = data.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols + c..];
        update_rows(&mut tail[..(rows - rank - 1) * cols], cols, strategy, |row| {
            if !field.is_zero(&row[c]) {
                let factor = row[c].clone();
                field.sub_mul_assign(&mut row[c..], &factor, pivot_row);
            }
        });
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Clears the entries above each pivot of an echelon form.
fn back_substitute<F: Field>(
    field: &F,
    data: &mut [F::Elem],
    cols: usize,
    pivots: &[usize],
    strategy: Strategy,
) {
    for (i, &c) in pivots.iter().enumerate().rev() {
        let (head, tail) = data.split_at_mut(i * cols);
        let pivot_row = &tail[c..cols];
        update_rows(head, cols, strategy, |row| {
            if !field.is_zero(&row[c]) {
                let factor = row[c].clone();
                field.sub_mul_assign(&mut row[c..], &factor, pivot_row);
            }
        });
    }
}

pub fn rref<F: Field>(field: &F, mut m: DenseMatrix<F>, strategy: Strategy) -> RrefResult<F> {
    let (rows, cols) = (m.rows, m.cols);
    let pivots = echelonize(field, &mut m.data, rows, cols, strategy);
    back_substitute(field, &mut m.data, cols, &pivots, strategy);
    m.data.truncate(pivots.len() * cols);
    m.rows = pivots.len();
    RrefResult { matrix: m, pivots }
}

/// Rank only; skips back substitution.
pub fn rank<F: Field>(field: &F, mut m: DenseMatrix<F>, strategy: Strategy) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    echelonize(field, &mut m.data, rows, cols, strategy).len()
}

/// Basis of the right null space of `m`.
pub fn kernel_basis<F: Field>(field: &F, m: &DenseMatrix<F>, strategy: Strategy) -> Vec<Vec<F::Elem>> {
    rref(field, m.clone(), strategy).kernel_basis(field)
}

/// RREF of the span of the given vectors.
pub fn span<F: Field>(field: &F, cols: usize, vectors: Vec<Vec<F::Elem>>, strategy: Strategy) -> RrefResult<F> {
    if vectors.is_empty() {
        return RrefResult::empty(cols);
    }
    rref(field, DenseMatrix::from_rows(cols, vectors), strategy)
}
