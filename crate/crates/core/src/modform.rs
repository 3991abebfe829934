//! Module backend: the interpolation module as an `F_q[x]`-row space of a
//! square polynomial matrix, minimized by weighted weak Popov reduction.
//!
//! Column `(u, b)` holds the `y^b` component of the coefficient of
//! `w^u = z^(p^e u)`. The row generators are `beta * (w - R^(p^e))^j` with
//! `beta` running over an `F_q[x]`-basis of the functions vanishing to order
//! `p^e (s - j)` on every evaluation place, and `y^b (w - R^(p^e))^s w^(j-s)`
//! for `j > s`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::codec::AGCode;
use crate::curve::{CurveCtx, FuncElem};
use crate::gf::{binomial_mod_p, FieldCtx, Gf};
use crate::interp::QPoly;
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::radius::GsParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("module has no element of weighted degree <= 0 (minimal value {0})")]
    NoSmallElement(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMatrix {
    pub rows: Vec<Vec<Poly>>,
    pub weights: Vec<i64>,
    /// `(j, k)`: generator family and index within it.
    pub labels: Vec<(usize, usize)>,
    pub mu: usize,
    pub e: u32,
}

impl ModuleMatrix {
    pub fn row_value(&self, i: usize) -> Option<i64> {
        row_value(&self.rows[i], &self.weights, self.mu as i64)
    }

    pub fn leading_position(&self, i: usize) -> Option<usize> {
        leading_position(&self.rows[i], &self.weights, self.mu as i64)
    }

    /// The row as `Q(z)`.
    pub fn row_as_q(&self, curve: &CurveCtx, i: usize) -> QPoly {
        let coeffs = self.rows[i]
            .chunks(self.mu)
            .map(|c| curve.from_components(c.to_vec()))
            .collect();
        QPoly { coeffs, e: self.e }
    }

    /// One line per row, polynomials separated by commas, each polynomial as
    /// its coefficients from low to high degree.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# weights {:?}", self.weights);
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let polys: Vec<String> = row
                .iter()
                .map(|p| {
                    if p.is_zero() {
                        "0".to_string()
                    } else {
                        p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
                    }
                })
                .collect();
            let _ = writeln!(out, "j={} k={}: {}", label.0, label.1, polys.join(", "));
        }
        out
    }
}

fn row_value(row: &[Poly], weights: &[i64], mu: i64) -> Option<i64> {
    row.iter()
        .zip(weights)
        .filter_map(|(p, &w)| p.degree().map(|d| mu * d as i64 + w))
        .max()
}

/// Column attaining the row value; the rightmost one on ties.
fn leading_position(row: &[Poly], weights: &[i64], mu: i64) -> Option<usize> {
    let mut best: Option<(i64, usize)> = None;
    for (c, (p, &w)) in row.iter().zip(weights).enumerate() {
        if let Some(d) = p.degree() {
            let v = mu * d as i64 + w;
            if best.is_none_or(|(bv, _)| v >= bv) {
                best = Some((v, c));
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Mulders-Storjohann simple transformations until all nonzero rows have
/// distinct leading positions.
fn weak_popov(rows: &mut [Vec<Poly>], weights: &[i64], mu: i64, f: &FieldCtx) {
    let mut lead: Vec<Option<usize>> = rows.iter().map(|r| leading_position(r, weights, mu)).collect();
    loop {
        let mut owner = vec![None; weights.len()];
        let mut conflict = None;
        for (i, lp) in lead.iter().enumerate() {
            if let Some(c) = *lp {
                match owner[c] {
                    Some(k) => {
                        conflict = Some((k, i, c));
                        break;
                    }
                    None => owner[c] = Some(i),
                }
            }
        }
        let Some((a, b, c)) = conflict else { break };
        let (da, db) = (rows[a][c].degree().unwrap(), rows[b][c].degree().unwrap());
        let (target, pivot) = if da >= db { (a, b) } else { (b, a) };
        let shift = da.abs_diff(db);
        let factor = f.neg(f.div(rows[target][c].leading(), rows[pivot][c].leading()).unwrap());
        let pivot_row = rows[pivot].clone();
        for (dst, src) in rows[target].iter_mut().zip(&pivot_row) {
            dst.add_scaled_shifted(src, factor, shift, f);
        }
        lead[target] = leading_position(&rows[target], weights, mu);
    }
}

/// Interpolant `R` with `R(P_i) = r_i` on every evaluation place and
/// `delta(R) <= n + 2g - 1`; free coordinates are set to zero.
pub fn build_r(code: &AGCode, received: &[Gf]) -> FuncElem {
    let curve = code.curve();
    let n = code.n();
    let basis = curve.ya_basis_upto(n as i64 + 2 * curve.genus() as i64 - 1);
    let mut a = Matrix::zeros(n, basis.len());
    for (i, place) in code.places().iter().enumerate() {
        for (j, mono) in basis.iter().enumerate() {
            a.set(i, j, curve.evaluate(&curve.monomial(*mono, Gf::ONE), place));
        }
    }
    let sol = linalg::solve(&a, received, curve.field()).expect("evaluation map is surjective");
    curve.from_terms(basis.iter().zip(sol).map(|(m, c)| (m.x_deg, m.y_deg, c)))
}

/// `F_q[x]`-basis of the functions vanishing to order at least `c` at every
/// evaluation place of the code.
pub fn vanishing_module_basis(code: &AGCode, c: u64) -> Vec<FuncElem> {
    let curve = code.curve();
    let mu = curve.mu() as usize;
    let ys: Vec<FuncElem> = (0..mu as u32).map(|b| curve.from_terms([(0, b, Gf::ONE)])).collect();
    if c == 0 {
        return ys;
    }
    let mut gens = vec![curve.vanishing_function(c)];
    for place in code.excluded() {
        gens.push(curve.vanishing_except(place, c));
    }
    let mut rows: Vec<Vec<Poly>> = gens
        .iter()
        .flat_map(|g| ys.iter().map(move |y| curve.mul(g, y)))
        .map(|g| g.components().to_vec())
        .collect();
    let weights: Vec<i64> = (0..mu as u32).map(|b| curve.y_pole_order(b) as i64).collect();
    weak_popov(&mut rows, &weights, mu as i64, curve.field());
    let basis: Vec<FuncElem> = rows
        .into_iter()
        .filter(|r| r.iter().any(|p| !p.is_zero()))
        .map(|r| curve.from_components(r))
        .collect();
    assert_eq!(basis.len(), mu, "vanishing module must be free of rank mu");
    basis
}

/// Weighted degree bound for generator family `j`, with `A = alpha P_inf`.
pub fn generator_bound(n: i64, g: i64, pe: i64, s: i64, j: i64, alpha: i64) -> i64 {
    if j <= s {
        (pe * (j + s) + 2) * n + (pe * j + 3) * (2 * g - 1) + 1 - alpha
    } else {
        2 * pe * s * n + (pe * s + 2) * (2 * g - 1) + 1 - alpha
    }
}

pub fn build_module_matrix(code: &AGCode, r: &FuncElem, params: &GsParams, alpha: i64) -> ModuleMatrix {
    let curve = code.curve();
    let field = curve.field();
    let p = field.characteristic();
    let pe = (p as u64).pow(params.e);
    let mu = curve.mu() as usize;
    let (s, ell) = (params.s as usize, params.ell as usize);
    let m = code.m() as i64;

    let neg_s = curve.neg(&curve.pow(r, pe));
    let mut neg_s_pows = vec![curve.one()];
    for _ in 0..s {
        let next = curve.mul(neg_s_pows.last().unwrap(), &neg_s);
        neg_s_pows.push(next);
    }

    let mut weights = Vec::with_capacity(mu * (ell + 1));
    for u in 0..=ell as i64 {
        for b in 0..mu as u32 {
            weights.push(pe as i64 * u * m + curve.y_pole_order(b) as i64 - alpha);
        }
    }

    let mut rows = Vec::with_capacity(mu * (ell + 1));
    let mut labels = Vec::with_capacity(mu * (ell + 1));
    for j in 0..=ell {
        let (betas, low, span) = if j <= s {
            let c = pe * (s - j) as u64;
            (code.vanishing_basis(c), 0, j)
        } else {
            (code.vanishing_basis(0), j - s, s)
        };
        for (k, beta) in betas.iter().enumerate() {
            let mut row = vec![Poly::zero(); mu * (ell + 1)];
            // beta * (w - S)^span * w^low
            for i in 0..=span {
                let binom = binomial_mod_p(span as u64, i as u64, p);
                if binom == 0 {
                    continue;
                }
                let coeff = curve.scale(
                    &curve.mul(beta, &neg_s_pows[span - i]),
                    field.from_int(binom as i64),
                );
                let u = low + i;
                for (b, comp) in coeff.components().iter().enumerate() {
                    row[u * mu + b] = comp.clone();
                }
            }
            rows.push(row);
            labels.push((j, k));
        }
    }

    let mx = ModuleMatrix { rows, weights, labels, mu, e: params.e };
    debug_assert!((0..mx.rows.len()).all(|i| {
        let j = mx.labels[i].0 as i64;
        let bound = generator_bound(
            code.n() as i64,
            curve.genus() as i64,
            pe as i64,
            s as i64,
            j,
            alpha,
        );
        mx.row_value(i).is_none_or(|v| v <= bound)
    }));
    mx
}

/// Weighted weak Popov form of the same row space.
pub fn shifted_reduce(mx: &ModuleMatrix, field: &FieldCtx) -> ModuleMatrix {
    let mut out = mx.clone();
    weak_popov(&mut out.rows, &out.weights, out.mu as i64, field);
    out
}

/// Row of minimal weighted degree (lowest index on ties), which must be
/// nonpositive.
pub fn minimal_q(reduced: &ModuleMatrix, curve: &CurveCtx) -> Result<QPoly, ModError> {
    let best = (0..reduced.rows.len())
        .filter_map(|i| reduced.row_value(i).map(|v| (v, i)))
        .min()
        .expect("module matrix has a nonzero row");
    if best.0 > 0 {
        return Err(ModError::NoSmallElement(best.0));
    }
    Ok(reduced.row_as_q(curve, best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveKind;
    use crate::interp::verify_multiplicity;
    use crate::radius::{choose_a_degree, floor, tau_best};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn code(kind: CurveKind, base: u32, m: u32) -> AGCode {
        AGCode::with_default_exclusion(Arc::new(CurveCtx::new(kind, base).unwrap()), m).unwrap()
    }

    fn random_word(c: &AGCode, rng: &mut ChaCha8Rng) -> Vec<Gf> {
        let q = c.field().size();
        (0..c.n()).map(|_| Gf(rng.gen_range(0..q))).collect()
    }

    fn near_codeword(c: &AGCode, weight: usize, rng: &mut ChaCha8Rng) -> Vec<Gf> {
        let q = c.field().size();
        let msg: Vec<Gf> = (0..c.k()).map(|_| Gf(rng.gen_range(0..q))).collect();
        let mut w = c.encode(&msg).unwrap();
        for pos in rand::seq::index::sample(rng, c.n(), weight).iter() {
            w[pos] = c.field().add(w[pos], Gf(rng.gen_range(1..q)));
        }
        w
    }

    fn cases() -> Vec<(AGCode, GsParams)> {
        vec![
            (code(CurveKind::Hermitian, 2, 4), GsParams { s: 1, ell: 1, e: 1 }),
            (code(CurveKind::Hermitian, 2, 3), GsParams { s: 2, ell: 3, e: 0 }),
            (code(CurveKind::Hermitian, 3, 14), GsParams { s: 1, ell: 1, e: 2 }),
            (code(CurveKind::Hermitian, 3, 8), GsParams { s: 1, ell: 2, e: 2 }),
            (code(CurveKind::Rational, 16, 6), GsParams { s: 2, ell: 3, e: 0 }),
            (code(CurveKind::Rational, 8, 3), GsParams { s: 1, ell: 2, e: 1 }),
        ]
    }

    #[test]
    fn interpolant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = code(CurveKind::Hermitian, 2, 4);
        let curve = c.curve();
        for _ in 0..100 {
            let r = random_word(&c, &mut rng);
            let big_r = build_r(&c, &r);
            assert!(curve.delta(&big_r).unwrap_or(0) < c.n() as i64 + 2 * curve.genus() as i64);
            for (place, &ri) in c.places().iter().zip(&r) {
                assert_eq!(curve.evaluate(&big_r, place), ri);
            }
        }
        let msg: Vec<Gf> = (0..c.k()).map(|i| Gf(i as u32 % 4)).collect();
        let word = c.encode(&msg).unwrap();
        let diff = curve.sub(&build_r(&c, &word), &c.function_of(&msg));
        for place in c.places() {
            assert!(curve.evaluate(&diff, place).is_zero());
        }
        assert!(build_r(&c, &vec![Gf::ZERO; c.n()]).is_zero());
    }

    #[test]
    fn vanishing_bases() {
        for c in [code(CurveKind::Hermitian, 2, 4), code(CurveKind::Hermitian, 3, 14), code(CurveKind::Rational, 16, 6)] {
            let curve = c.curve();
            for order in [1u64, 2, 4] {
                let basis = c.vanishing_basis(order);
                assert_eq!(basis.len(), curve.mu() as usize);
                for beta in basis.iter() {
                    for place in c.places() {
                        let e = curve.local_expand(beta, place, order as usize);
                        assert!(e.coeffs.iter().all(|v| v.is_zero()));
                    }
                }
                // not everything vanishes at the reserved place
                let p0 = c.reserved_place();
                assert!(basis.iter().any(|b| !curve.evaluate(b, p0).is_zero()));
                let h = curve.delta(&curve.vanishing_function(order)).unwrap();
                assert!(basis.iter().map(|b| curve.delta(b).unwrap()).min().unwrap() <= h);
            }
        }
    }

    #[test]
    fn freshman_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (c, e) in [(code(CurveKind::Hermitian, 2, 4), 2u32), (code(CurveKind::Hermitian, 3, 14), 1)] {
            let curve = c.curve();
            let r = build_r(&c, &random_word(&c, &mut rng));
            let pe = (curve.field().characteristic() as usize).pow(e);
            // (z - R)^(p^e) by repeated multiplication in z
            let mut poly = vec![curve.one()];
            for _ in 0..pe {
                let mut next = vec![curve.zero(); poly.len() + 1];
                for (i, coeff) in poly.iter().enumerate() {
                    next[i + 1] = curve.add(&next[i + 1], coeff);
                    next[i] = curve.sub(&next[i], &curve.mul(coeff, &r));
                }
                poly = next;
            }
            assert_eq!(poly[0], curve.neg(&curve.pow(&r, pe as u64)));
            assert_eq!(poly[pe], curve.one());
            assert!(poly[1..pe].iter().all(FuncElem::is_zero));
        }
    }

    #[test]
    fn rows_satisfy_constraints_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (c, params) in cases() {
            let curve = c.curve();
            let pe = (curve.field().characteristic() as u64).pow(params.e);
            let tau = floor(&tau_best(&c.shape(), &params).0) as u64;
            let alpha = choose_a_degree(curve.field().characteristic() as u64, params.e, params.s, c.n() as u64, tau);
            let r = near_codeword(&c, tau as usize, &mut rng);
            let big_r = build_r(&c, &r);
            let mx = build_module_matrix(&c, &big_r, &params, alpha);
            let size = curve.mu() as usize * (params.ell as usize + 1);
            assert_eq!(mx.rows.len(), size);
            assert!(mx.rows.iter().all(|row| row.len() == size));
            let target = (pe * params.s) as usize;
            for i in 0..mx.rows.len() {
                let q = mx.row_as_q(curve, i);
                for (place, &ri) in c.places().iter().zip(&r) {
                    assert!(verify_multiplicity(curve, &q, place, ri, target));
                }
                let bound = generator_bound(c.n() as i64, curve.genus() as i64, pe as i64, params.s as i64, mx.labels[i].0 as i64, alpha);
                assert!(mx.row_value(i).unwrap() <= bound);
            }

            let reduced = shifted_reduce(&mx, curve.field());
            let mut leads: Vec<usize> = (0..reduced.rows.len()).filter_map(|i| reduced.leading_position(i)).collect();
            assert_eq!(leads.len(), size);
            leads.sort_unstable();
            leads.dedup();
            assert_eq!(leads.len(), size);

            let min_in = (0..size).filter_map(|i| mx.row_value(i)).min().unwrap();
            let min_out = (0..size).filter_map(|i| reduced.row_value(i)).min().unwrap();
            assert!(min_out <= min_in);
            assert!(min_out <= 0);

            // random F_q[x]-combinations of the reduced rows stay in the module
            let f = curve.field();
            for _ in 0..3 {
                let mut combo = vec![Poly::zero(); size];
                for row in &reduced.rows {
                    let mult = Poly::from_coeffs((0..3).map(|_| Gf(rng.gen_range(0..f.size()))).collect());
                    for (dst, src) in combo.iter_mut().zip(row) {
                        *dst = dst.add(&src.mul(&mult, f), f);
                    }
                }
                let probe = ModuleMatrix { rows: vec![combo], labels: vec![(0, 0)], ..reduced.clone() };
                let q = probe.row_as_q(curve, 0);
                for (place, &ri) in c.places().iter().zip(&r) {
                    assert!(verify_multiplicity(curve, &q, place, ri, target));
                }
            }

            let q = minimal_q(&reduced, curve).unwrap();
            assert!(q.within_degrees(curve, alpha, c.m()));
        }
    }

    #[test]
    fn classical_specialization() {
        let c = code(CurveKind::Hermitian, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = random_word(&c, &mut rng);
        let big_r = build_r(&c, &r);
        let params = GsParams { s: 1, ell: 1, e: 0 };
        let mx = build_module_matrix(&c, &big_r, &params, 10);
        assert_eq!(mx.rows.len(), 4);
        let curve = c.curve();
        // j = 1 rows are y^b (z - R)
        for k in 0..2 {
            let q = mx.row_as_q(curve, 2 + k);
            let yb = curve.from_terms([(0, k as u32, Gf::ONE)]);
            assert_eq!(q.coeffs[1], yb);
            assert_eq!(q.coeffs[0], curve.neg(&curve.mul(&yb, &big_r)));
        }
    }

    #[test]
    fn reducing_reduced_matrix_is_identity() {
        let c = code(CurveKind::Hermitian, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = random_word(&c, &mut rng);
        let mx = build_module_matrix(&c, &build_r(&c, &r), &GsParams { s: 1, ell: 1, e: 1 }, 11);
        let once = shifted_reduce(&mx, c.field());
        assert_eq!(shifted_reduce(&once, c.field()), once);
    }

    // Fraction-free elimination over F_q[x].
    fn det(mut m: Vec<Vec<Poly>>, f: &FieldCtx) -> Poly {
        let n = m.len();
        let mut prev = Poly::constant(Gf::ONE);
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return Poly::zero();
            };
            m.swap(k, piv);
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j].mul(&m[k][k], f).sub(&m[i][k].mul(&m[k][j], f), f);
                    let (q, r) = num.div_rem(&prev, f);
                    assert!(r.is_zero());
                    m[i][j] = q;
                }
            }
            prev = m[k][k].clone();
        }
        prev
    }

    #[test]
    fn reduction_is_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (c, params) in cases().into_iter().take(4) {
            let f = c.field();
            let tau = floor(&tau_best(&c.shape(), &params).0) as u64;
            let alpha = choose_a_degree(f.characteristic() as u64, params.e, params.s, c.n() as u64, tau);
            let r = near_codeword(&c, tau as usize, &mut rng);
            let mx = build_module_matrix(&c, &build_r(&c, &r), &params, alpha);
            let reduced = shifted_reduce(&mx, f);
            let (d0, d1) = (det(mx.rows.clone(), f), det(reduced.rows.clone(), f));
            assert!(!d0.is_zero());
            // same determinant up to a unit means the same row space
            assert_eq!(d0.degree(), d1.degree());
            let ratio = f.div(d1.leading(), d0.leading()).unwrap();
            assert_eq!(d0.scale(ratio, f), d1);
        }
    }

    #[test]
    fn infeasible_target() {
        let c = code(CurveKind::Hermitian, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let r = random_word(&c, &mut rng);
        let params = GsParams { s: 1, ell: 1, e: 0 };
        let tau = c.n() as u64 - 1;
        let alpha = choose_a_degree(2, 0, 1, c.n() as u64, tau);
        let mx = build_module_matrix(&c, &build_r(&c, &r), &params, alpha);
        let reduced = shifted_reduce(&mx, c.field());
        assert!(matches!(minimal_q(&reduced, c.curve()), Err(ModError::NoSmallElement(_))));
    }

    #[test]
    fn text_dump() {
        let c = code(CurveKind::Hermitian, 2, 4);
        let r = vec![Gf::ZERO; c.n()];
        let mx = build_module_matrix(&c, &build_r(&c, &r), &GsParams { s: 1, ell: 1, e: 0 }, 10);
        let text = mx.to_text();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("j=0 k=0: "));
    }
}
