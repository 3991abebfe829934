//! Dense interpolation: the homogeneous linear system for `Q(z)`, solved by
//! Gaussian elimination, and an independent multiplicity checker.

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::AGCode;
use crate::curve::{CurveCtx, FuncElem, Monomial, Place};
use crate::gf::{binomial_mod_p, Gf};
use crate::linalg::{self, Matrix};
use crate::radius::GsParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("interpolation system has only the zero solution")]
    NoNonzeroSolution,
}

/// `Q(z) = sum_j Q_j z^(p^e j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<FuncElem>,
    pub e: u32,
}

impl QPoly {
    pub fn ell(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FuncElem::is_zero)
    }

    /// `sum_j Q_j f^(p^e j)` as a function.
    pub fn substitute(&self, curve: &CurveCtx, f: &FuncElem) -> FuncElem {
        let pe = (curve.field().characteristic() as u64).pow(self.e);
        let fp = curve.pow(f, pe);
        let mut acc = curve.zero();
        for q in self.coeffs.iter().rev() {
            acc = curve.add(&curve.mul(&acc, &fp), q);
        }
        acc
    }

    /// `true` when `delta(Q_j) <= alpha - p^e j m` for all `j`.
    pub fn within_degrees(&self, curve: &CurveCtx, alpha: i64, m: u32) -> bool {
        let pe = (curve.field().characteristic() as i64).pow(self.e);
        self.coeffs.iter().enumerate().all(|(j, q)| match curve.delta(q) {
            None => true,
            Some(d) => d <= alpha - pe * j as i64 * m as i64,
        })
    }
}

/// Everything needed to set up the interpolation system.
pub struct InterpProblem<'a> {
    pub code: &'a AGCode,
    pub received: &'a [Gf],
    pub params: GsParams,
    pub alpha: i64,
    pub tau: u64,
}

impl InterpProblem<'_> {
    fn pe(&self) -> u64 {
        (self.code.field().characteristic() as u64).pow(self.params.e)
    }

    /// Monomial basis of `L((alpha - p^e j m) P_inf)` for each `j`.
    pub fn column_blocks(&self) -> Vec<Vec<Monomial>> {
        let pe = self.pe() as i64;
        let m = self.code.m() as i64;
        (0..=self.params.ell as i64)
            .map(|j| self.code.curve().ya_basis_upto(self.alpha - pe * j * m))
            .collect()
    }

    pub fn row_count(&self) -> usize {
        let s = self.params.s as usize;
        self.code.n() * self.pe() as usize * s * (s + 1) / 2
    }
}

/// Coefficient matrix of the multiplicity constraints. Rows are ordered by
/// place, then `b'`, then `a`; columns by `j`, then basis monomial.
pub fn build_constraints(problem: &InterpProblem) -> Matrix {
    let code = problem.code;
    let curve = code.curve();
    let field = curve.field();
    let p = field.characteristic();
    let pe = problem.pe() as usize;
    let s = problem.params.s as usize;
    let blocks = problem.column_blocks();
    let cols: usize = blocks.iter().map(Vec::len).sum();
    let all_monos = &blocks[0];
    let precision = pe * s;

    let per_place: Vec<Vec<Vec<Gf>>> = code
        .places()
        .par_iter()
        .zip(problem.received.par_iter())
        .map(|(place, &r)| {
            let frame = curve.local_frame(place, precision);
            let expansions: Vec<Vec<Gf>> =
                all_monos.iter().map(|mono| frame.expand_monomial(curve, *mono)).collect();
            let rpe = field.pow(r, pe as u64);
            let mut rows = Vec::new();
            for bp in 0..s {
                for a in 0..pe * (s - bp) {
                    let mut row = vec![Gf::ZERO; cols];
                    let mut col = 0;
                    for (j, block) in blocks.iter().enumerate() {
                        if j < bp {
                            col += block.len();
                            continue;
                        }
                        let binom = binomial_mod_p(j as u64, bp as u64, p);
                        let factor = field.mul(field.from_int(binom as i64), field.pow(rpe, (j - bp) as u64));
                        for (idx, _) in block.iter().enumerate() {
                            // blocks are prefixes of the j = 0 block
                            row[col + idx] = field.mul(factor, expansions[idx][a]);
                        }
                        col += block.len();
                    }
                    rows.push(row);
                }
            }
            rows
        })
        .collect();

    let mut mat = Matrix::zeros(problem.row_count(), cols);
    for (i, row) in per_place.into_iter().flatten().enumerate() {
        mat.row_mut(i).copy_from_slice(&row);
    }
    mat
}

/// Deterministic nonzero solution of the interpolation system.
pub fn solve_q(problem: &InterpProblem) -> Result<QPoly, InterpError> {
    let curve = problem.code.curve();
    let mat = build_constraints(problem);
    let v = linalg::first_kernel_vector(&mat, curve.field()).ok_or(InterpError::NoNonzeroSolution)?;
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for block in problem.column_blocks() {
        let terms = block
            .iter()
            .zip(&v[offset..offset + block.len()])
            .map(|(mono, &c)| (mono.x_deg, mono.y_deg, c));
        coeffs.push(curve.from_terms(terms));
        offset += block.len();
    }
    Ok(QPoly { coeffs, e: problem.params.e })
}

/// Checks that `Q` has a root of multiplicity at least `target` at
/// `(place, r)` by full re-expansion in `t` and `z - r`.
pub fn verify_multiplicity(curve: &CurveCtx, q: &QPoly, place: &Place, r: Gf, target: usize) -> bool {
    if target == 0 {
        return true;
    }
    let field = curve.field();
    let p = field.characteristic();
    let pe = (p as u64).pow(q.e);
    let frame = curve.local_frame(place, target);
    let series: Vec<Vec<Gf>> = q.coeffs.iter().map(|c| frame.expand(curve, c).coeffs).collect();
    for big_b in 0..target {
        // coefficient of (z - r)^B in z^(p^e j) is C(p^e j, B) r^(p^e j - B)
        let weights: Vec<Gf> = (0..series.len() as u64)
            .map(|j| {
                let exp = pe * j;
                if (big_b as u64) > exp {
                    Gf::ZERO
                } else {
                    let c = binomial_mod_p(exp, big_b as u64, p);
                    field.mul(field.from_int(c as i64), field.pow(r, exp - big_b as u64))
                }
            })
            .collect();
        for a in 0..target - big_b {
            let c = series
                .iter()
                .zip(&weights)
                .fold(Gf::ZERO, |acc, (s, &w)| field.mul_add(acc, w, s[a]));
            if !c.is_zero() {
                return false;
            }
        }
    }
    true
}
