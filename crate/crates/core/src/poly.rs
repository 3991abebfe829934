//! Dense univariate polynomials over a [`FieldCtx`], plus the truncated
//! power-series helpers used for local expansions.

use crate::gf::{FieldCtx, Gf};

/// Polynomial with coefficients from low to high degree. Trailing zeros are
/// never stored, so the zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Gf>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Gf) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: Gf, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Gf::ZERO; k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn from_coeffs(mut v: Vec<Gf>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Poly(v)
    }

    pub fn coeffs(&self) -> &[Gf] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Gf {
        self.0.get(i).copied().unwrap_or(Gf::ZERO)
    }

    pub fn leading(&self) -> Gf {
        self.0.last().copied().unwrap_or(Gf::ZERO)
    }

    pub fn add(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: Gf, f: &FieldCtx) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// `self += c * x^shift * other`, in place.
    pub fn add_scaled_shifted(&mut self, other: &Poly, c: Gf, shift: usize, f: &FieldCtx) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let need = other.0.len() + shift;
        if self.0.len() < need {
            self.0.resize(need, Gf::ZERO);
        }
        for (i, &b) in other.0.iter().enumerate() {
            self.0[i + shift] = f.mul_add(self.0[i + shift], c, b);
        }
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn mul(&self, other: &Poly, f: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Gf::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = f.mul_add(out[i + j], a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, d: &Poly, f: &FieldCtx) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = f.inv(d.leading()).expect("leading coefficient is nonzero");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Gf::ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], inv);
            if c.is_zero() {
                continue;
            }
            quot[k] = c;
            for (i, &di) in d.0.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, di));
            }
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn eval(&self, x: Gf, f: &FieldCtx) -> Gf {
        self.0.iter().rev().fold(Gf::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Expansion of `self(a + t)` as a series in `t`, truncated to `n` terms.
    pub fn taylor_at(&self, a: Gf, n: usize, f: &FieldCtx) -> Vec<Gf> {
        let mut acc = vec![Gf::ZERO; n];
        if n == 0 {
            return acc;
        }
        for &c in self.0.iter().rev() {
            // acc <- acc * (a + t) + c
            for i in (0..n).rev() {
                let lower = if i > 0 { acc[i - 1] } else { Gf::ZERO };
                acc[i] = f.add(f.mul(acc[i], a), lower);
            }
            acc[0] = f.add(acc[0], c);
        }
        acc
    }
}

/// Truncated product of two series, `n` terms.
pub fn series_mul(a: &[Gf], b: &[Gf], n: usize, f: &FieldCtx) -> Vec<Gf> {
    let mut out = vec![Gf::ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = f.mul_add(out[i + j], x, y);
        }
    }
    out
}

pub fn series_add(a: &[Gf], b: &[Gf], f: &FieldCtx) -> Vec<Gf> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(Gf::ZERO);
            let y = b.get(i).copied().unwrap_or(Gf::ZERO);
            f.add(x, y)
        })
        .collect()
}

/// `a^k` as a truncated series.
pub fn series_pow(a: &[Gf], mut k: u64, n: usize, f: &FieldCtx) -> Vec<Gf> {
    let mut result = vec![Gf::ZERO; n];
    if n > 0 {
        result[0] = Gf::ONE;
    }
    let mut base: Vec<Gf> = a.iter().copied().take(n).collect();
    base.resize(n, Gf::ZERO);
    while k > 0 {
        if k & 1 == 1 {
            result = series_mul(&result, &base, n, f);
        }
        k >>= 1;
        if k > 0 {
            base = series_mul(&base, &base, n, f);
        }
    }
    result
}
