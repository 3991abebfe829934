//! Dense linear algebra over small finite fields.

use crate::gf::{FieldCtx, Gf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Gf::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Gf>>, cols: usize) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row");
            m.row_mut(i).copy_from_slice(&r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Gf {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Gf) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Gf] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Gf] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Reduces in place to reduced row echelon form and returns the pivot
    /// column of each nonzero row.
    pub fn rref(&mut self, f: &FieldCtx) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        let mut support = Vec::with_capacity(self.cols);
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if found != pivot_row {
                for c in col..self.cols {
                    self.data.swap(found * self.cols + c, pivot_row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(pivot_row, col)).expect("pivot is nonzero");
            support.clear();
            for c in col..self.cols {
                let v = f.mul(self.get(pivot_row, c), inv);
                self.set(pivot_row, c, v);
                if !v.is_zero() {
                    support.push(c);
                }
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                let neg = f.neg(factor);
                for &c in &support {
                    let v = f.mul_add(self.get(r, c), neg, self.get(pivot_row, c));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        self.clone().rref(f).len()
    }
}

/// Nonzero kernel vector obtained by setting the first pivot-free column to
/// one and every other free column to zero. `None` when the kernel is
/// trivial.
pub fn first_kernel_vector(m: &Matrix, f: &FieldCtx) -> Option<Vec<Gf>> {
    let mut r = m.clone();
    let pivots = r.rref(f);
    let free = (0..m.cols).find(|c| pivots.binary_search(c).is_err())?;
    let mut x = vec![Gf::ZERO; m.cols];
    x[free] = Gf::ONE;
    for (row, &pc) in pivots.iter().enumerate() {
        if pc < free {
            x[pc] = f.neg(r.get(row, free));
        }
    }
    Some(x)
}

/// Dimension of the kernel.
pub fn nullity(m: &Matrix, f: &FieldCtx) -> usize {
    m.cols - m.rank(f)
}

/// Solves `a x = b`, setting all free variables to zero. `None` when the
/// system is inconsistent.
pub fn solve(a: &Matrix, b: &[Gf], f: &FieldCtx) -> Option<Vec<Gf>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    for r in 0..a.rows {
        aug.row_mut(r)[..a.cols].copy_from_slice(a.row(r));
        aug.set(r, a.cols, b[r]);
    }
    let pivots = aug.rref(f);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![Gf::ZERO; a.cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(row, a.cols);
    }
    Some(x)
}

pub fn mat_vec(a: &Matrix, x: &[Gf], f: &FieldCtx) -> Vec<Gf> {
    (0..a.rows)
        .map(|r| {
            a.row(r)
                .iter()
                .zip(x)
                .fold(Gf::ZERO, |acc, (&u, &v)| f.mul_add(acc, u, v))
        })
        .collect()
}
