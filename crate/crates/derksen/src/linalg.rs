//! Exact rational linear algebra.
//!
//! Dense matrices over [`Rat`] with deterministic Gauss-Jordan elimination.
//! [`solve_linear`] never just says "no solution": an infeasible system comes
//! back with a row combination `y` satisfying `yᵀA = 0` and `yᵀb ≠ 0`, so the
//! verdict can be revalidated independently of the elimination that found it.

use crate::rat::Rat;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error(
        "dimension mismatch: matrix has {rows} rows but right-hand side has {rhs_len} entries"
    )]
    DimensionMismatch { rows: usize, rhs_len: usize },
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Mat {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `A·x`. Panics on length mismatch.
    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rat::zero();
                for (c, xc) in x.iter().enumerate() {
                    if !xc.is_zero() {
                        acc += &(self.get(r, c) * xc);
                    }
                }
                acc
            })
            .collect()
    }

    /// `yᵀA`. Panics on length mismatch.
    pub fn left_mul_vec(&self, y: &[Rat]) -> Vec<Rat> {
        assert_eq!(y.len(), self.rows, "vector length must equal row count");
        (0..self.cols)
            .map(|c| {
                let mut acc = Rat::zero();
                for (r, yr) in y.iter().enumerate() {
                    if !yr.is_zero() {
                        acc += &(self.get(r, c) * yr);
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form with pivots normalized to 1 (the canonical
    /// form of the row space) together with the pivot column indices.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut work: Vec<Vec<Rat>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let pivots = eliminate(&mut work, None, None);
        let pivot_cols = pivots.iter().map(|&(_, c)| c).collect();
        (Mat::from_rows(work), pivot_cols)
    }

    /// A basis of `{x : A·x = 0}`, one vector per free column, produced in
    /// ascending free-column order.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let (r, pivot_cols) = self.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut vec = vec![Rat::zero(); self.cols];
            vec[free] = Rat::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                vec[pc] = -r.get(row, free);
            }
            basis.push(vec);
        }
        basis
    }
}

// Matrices serialize as {rows, cols, entries} with exact string entries.
impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Mat", 3)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("cols", &self.cols)?;
        let entries: Vec<&[Rat]> = (0..self.rows).map(|r| self.row(r)).collect();
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

/// In-place Gauss-Jordan over a row list, mirroring every row operation onto
/// the optional transform matrix and right-hand side. Pivot choice is
/// deterministic: leftmost column first, then the first row with a nonzero
/// entry. Returns the `(row, col)` pivot positions.
fn eliminate(
    work: &mut [Vec<Rat>],
    mut transform: Option<&mut Vec<Vec<Rat>>>,
    mut rhs: Option<&mut Vec<Rat>>,
) -> Vec<(usize, usize)> {
    let rows = work.len();
    let cols = work.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row == rows {
            break;
        }
        let Some(pivot) = (next_row..rows).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(pivot, next_row);
        if let Some(t) = transform.as_deref_mut() {
            t.swap(pivot, next_row);
        }
        if let Some(b) = rhs.as_deref_mut() {
            b.swap(pivot, next_row);
        }
        // normalize the pivot row
        let inv = work[next_row][col].recip();
        for v in work[next_row].iter_mut() {
            *v *= &inv;
        }
        if let Some(t) = transform.as_deref_mut() {
            for v in t[next_row].iter_mut() {
                *v *= &inv;
            }
        }
        if let Some(b) = rhs.as_deref_mut() {
            b[next_row] *= &inv;
        }
        // clear the column everywhere else
        for r in 0..rows {
            if r == next_row || work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone();
            // two rows of the same matrix are touched per step
            #[allow(clippy::needless_range_loop)]
            for c in 0..cols {
                let delta = &work[next_row][c] * &factor;
                work[r][c] -= &delta;
            }
            if let Some(t) = transform.as_deref_mut() {
                for c in 0..t[r].len() {
                    let delta = &t[next_row][c] * &factor;
                    t[r][c] -= &delta;
                }
            }
            if let Some(b) = rhs.as_deref_mut() {
                let delta = &b[next_row] * &factor;
                b[r] -= &delta;
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }
    pivots
}

/// Outcome of an exact solve: a solution vector, or an infeasibility witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(Vec<Rat>),
    Infeasible { witness: Vec<Rat> },
}

/// Solves `A·x = b` exactly. Free variables are set to zero. An infeasible
/// system yields a witness `y` with `yᵀA = 0` and `yᵀb ≠ 0`, extracted from
/// the row-operation transform of the elimination.
pub fn solve_linear(a: &Mat, b: &[Rat]) -> Result<SolveOutcome, LinAlgError> {
    if b.len() != a.rows() {
        return Err(LinAlgError::DimensionMismatch {
            rows: a.rows(),
            rhs_len: b.len(),
        });
    }
    let mut work: Vec<Vec<Rat>> = (0..a.rows()).map(|r| a.row(r).to_vec()).collect();
    let mut transform: Vec<Vec<Rat>> = (0..a.rows())
        .map(|r| {
            let mut row = vec![Rat::zero(); a.rows()];
            row[r] = Rat::one();
            row
        })
        .collect();
    let mut rhs = b.to_vec();
    let pivots = eliminate(&mut work, Some(&mut transform), Some(&mut rhs));

    let pivot_rows: Vec<usize> = pivots.iter().map(|&(r, _)| r).collect();
    for r in 0..a.rows() {
        if !pivot_rows.contains(&r) && !rhs[r].is_zero() {
            // row r of the transform reproduces the contradictory equation
            let scale = rhs[r].recip();
            let witness = transform[r].iter().map(|v| v * &scale).collect();
            return Ok(SolveOutcome::Infeasible { witness });
        }
    }

    let mut x = vec![Rat::zero(); a.cols()];
    for &(r, c) in &pivots {
        x[c] = rhs[r].clone();
    }
    Ok(SolveOutcome::Solution(x))
}
