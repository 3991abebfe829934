//! Root finding for `Q(z)`: power-series roots of the deflated polynomial
//! `sum_j Q_j w^j` at the reserved place, `p^e`-th roots of those series and
//! reconstruction of the message functions.

use thiserror::Error;

use crate::codec::AGCode;
use crate::curve::{CurveCtx, CurveError, FuncElem, LocalSeries, Place};
use crate::gf::{binomial_mod_p, FieldCtx, Gf};
use crate::interp::QPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("series root finding did not settle with {0} coefficients of precision")]
    PrecisionLimit(usize),
}

/// The series has a nonzero coefficient at an index not divisible by `p^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotAPower;

struct Exhausted;

/// Roth-Ruckenstein search for all series roots of `sum_j coeffs[j] w^j`
/// modulo `t^depth`, where `t = x - a` at `place`. Branches that are not
/// roots of the full polynomial may be included.
pub fn rr_roots(
    curve: &CurveCtx,
    coeffs: &[FuncElem],
    place: &Place,
    depth: usize,
) -> Result<Vec<LocalSeries>, RootError> {
    let f = curve.field();
    let mut precision = 2 * depth + 8;
    let cap = 64 * (depth + 8);
    loop {
        let frame = curve.local_frame(place, precision);
        let poly: Vec<Vec<Gf>> = coeffs.iter().map(|c| frame.expand(curve, c).coeffs).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(depth);
        match recurse(f, poly, precision, depth, &mut prefix, &mut out) {
            Ok(()) => {
                return Ok(out
                    .into_iter()
                    .map(|coeffs| LocalSeries { place: place.index, coeffs })
                    .collect())
            }
            Err(Exhausted) if precision < cap => precision *= 2,
            Err(Exhausted) => return Err(RootError::PrecisionLimit(precision)),
        }
    }
}

fn recurse(
    f: &FieldCtx,
    poly: Vec<Vec<Gf>>,
    precision: usize,
    depth: usize,
    prefix: &mut Vec<Gf>,
    out: &mut Vec<Vec<Gf>>,
) -> Result<(), Exhausted> {
    if prefix.len() == depth {
        out.push(prefix.clone());
        return Ok(());
    }
    let v = poly
        .iter()
        .filter_map(|s| s.iter().take(precision).position(|c| !c.is_zero()))
        .min()
        .ok_or(Exhausted)?;
    let precision = precision - v;
    let poly: Vec<Vec<Gf>> = poly.into_iter().map(|s| s[v..v + precision].to_vec()).collect();
    let residue: Vec<Gf> = poly.iter().map(|s| s[0]).collect();
    for gamma in f.elements() {
        let val = residue.iter().rev().fold(Gf::ZERO, |acc, &c| f.add(f.mul(acc, gamma), c));
        if !val.is_zero() {
            continue;
        }
        // P(gamma + t w): shift in w, then scale coefficient i by t^i
        let deg = poly.len();
        let mut shifted = vec![vec![Gf::ZERO; precision]; deg];
        for (k, pk) in poly.iter().enumerate() {
            for (i, dst) in shifted.iter_mut().enumerate().take(k + 1) {
                let c = binomial_mod_p(k as u64, i as u64, f.characteristic());
                if c == 0 {
                    continue;
                }
                let factor = f.mul(f.from_int(c as i64), f.pow(gamma, (k - i) as u64));
                if factor.is_zero() {
                    continue;
                }
                for idx in 0..precision.saturating_sub(i) {
                    dst[idx + i] = f.mul_add(dst[idx + i], factor, pk[idx]);
                }
            }
        }
        prefix.push(gamma);
        let res = recurse(f, shifted, precision, depth, prefix, out);
        prefix.pop();
        res?;
    }
    Ok(())
}

/// Series `sum c_i t^i` with `c_i^(p^e)` at index `p^e i` of the input.
pub fn pe_root_series(sr: &LocalSeries, e: u32, f: &FieldCtx) -> Result<LocalSeries, NotAPower> {
    let pe = (f.characteristic() as usize).pow(e);
    if sr.coeffs.iter().enumerate().any(|(i, c)| i % pe != 0 && !c.is_zero()) {
        return Err(NotAPower);
    }
    let len = sr.coeffs.len() / pe;
    let coeffs = (0..len).map(|i| f.p_root(sr.coeffs[i * pe], e)).collect();
    Ok(LocalSeries { place: sr.place, coeffs })
}

/// Functions of `L(m P_inf)` matching the given expansions; series that
/// match nothing are dropped.
pub fn candidates(code: &AGCode, roots: &[LocalSeries]) -> Result<Vec<FuncElem>, CurveError> {
    let mut out = Vec::new();
    for r in roots {
        if r.precision() < code.m() as usize + 1 {
            return Err(CurveError::InsufficientPrecision { have: r.precision(), need: code.m() as usize });
        }
        match code.curve().reconstruct_from_expansion(r, code.m() as i64) {
            Ok(f) => out.push(f),
            Err(CurveError::NoMatch) => {}
            Err(other) => return Err(other),
        }
    }
    Ok(out)
}

/// All `f` in `L(m P_inf)` with `Q(f) = 0`, verified by direct substitution.
pub fn find_roots(code: &AGCode, q: &QPoly) -> Result<Vec<FuncElem>, RootError> {
    let curve = code.curve();
    let f = curve.field();
    let pe = (f.characteristic() as usize).pow(q.e);
    let depth = pe * (code.m() as usize + 1);
    let series = rr_roots(curve, &q.coeffs, code.reserved_place(), depth)?;
    let roots: Vec<LocalSeries> = series.iter().filter_map(|s| pe_root_series(s, q.e, f).ok()).collect();
    let found = candidates(code, &roots).expect("root series carry m + 1 coefficients");
    let mut out: Vec<FuncElem> = Vec::new();
    for cand in found {
        if !out.contains(&cand) && q.substitute(curve, &cand).is_zero() {
            out.push(cand);
        }
    }
    Ok(out)
}
