//! One-point curves: the projective line and the Hermitian curve
//! `y^q0 + y = x^(q0+1)` over `F_{q0^2}`.
//!
//! Functions regular away from the point at infinity are kept in the normal
//! form `sum_b A_b(x) y^b` with `b < mu`, i.e. as `mu` polynomials in `x`.
//! This is also the `F_q[x]`-module structure the module backend works with.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{prime_power, FieldCtx, FieldError, Gf};
use crate::linalg::{self, Matrix};
use crate::poly::{series_add, series_mul, series_pow, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),
    #[error("series precision {have} is too small, need more than {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("series does not match any function of bounded pole order")]
    NoMatch,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Rational,
    Hermitian,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::Rational => write!(f, "rational"),
            CurveKind::Hermitian => write!(f, "hermitian"),
        }
    }
}

impl std::str::FromStr for CurveKind {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(CurveKind::Rational),
            "hermitian" => Ok(CurveKind::Hermitian),
            other => Err(CurveError::UnsupportedCurve(other.to_string())),
        }
    }
}

/// An affine rational place. For the rational curve `b` is always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    pub index: usize,
    pub a: Gf,
    pub b: Gf,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The monomial `x^x_deg y^y_deg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x_deg: u32,
    pub y_deg: u32,
}

/// Element of the ring of functions with poles only at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncElem {
    comps: Vec<Poly>,
}

impl FuncElem {
    /// Coefficient polynomial of `y^b`.
    pub fn component(&self, b: usize) -> &Poly {
        &self.comps[b]
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Nonzero terms as `(x_deg, y_deg, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Gf)> + '_ {
        self.comps.iter().enumerate().flat_map(|(b, p)| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(a, &c)| (a as u32, b as u32, c))
        })
    }
}

impl fmt::Display for FuncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b, c) in self.terms() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "({a},{b}):{c}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Truncated expansion `sum c_i t^i` of a function at an affine place, in the
/// local parameter `t = x - a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSeries {
    pub place: usize,
    pub coeffs: Vec<Gf>,
}

impl LocalSeries {
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }
}

/// Curve context; immutable after construction.
#[derive(Debug)]
pub struct CurveCtx {
    kind: CurveKind,
    base: u32,
    field: Arc<FieldCtx>,
    genus: u32,
    mu: u32,
    y_pole: u32,
    generators: Vec<u32>,
    places: Vec<Place>,
}

impl CurveCtx {
    /// `base` is the field size for the rational curve and `q0` for the
    /// Hermitian curve over `F_{q0^2}`.
    pub fn new(kind: CurveKind, base: u32) -> Result<Self, CurveError> {
        let (p, k) = prime_power(base as u64).ok_or_else(|| {
            CurveError::UnsupportedCurve(format!("base parameter {base} is not a prime power"))
        })?;
        match kind {
            CurveKind::Rational => {
                let field = Arc::new(FieldCtx::new(p, k)?);
                let places = field
                    .elements()
                    .enumerate()
                    .map(|(index, a)| Place { index, a, b: Gf::ZERO })
                    .collect();
                Ok(CurveCtx {
                    kind,
                    base,
                    field,
                    genus: 0,
                    mu: 1,
                    y_pole: 0,
                    generators: vec![1],
                    places,
                })
            }
            CurveKind::Hermitian => {
                if (base as u64).pow(2) > crate::gf::MAX_FIELD_SIZE {
                    return Err(CurveError::UnsupportedCurve(format!(
                        "Hermitian curve over F_{{{base}^2}} exceeds the field cap"
                    )));
                }
                let field = Arc::new(FieldCtx::new(p, 2 * k)?);
                let places = hermitian_places(&field, base);
                Ok(CurveCtx {
                    kind,
                    base,
                    field,
                    genus: base * (base - 1) / 2,
                    mu: base,
                    y_pole: base + 1,
                    generators: vec![base, base + 1],
                    places,
                })
            }
        }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// All affine rational places in lexicographic order of `(a, b)`.
    pub fn rational_places(&self) -> &[Place] {
        &self.places
    }

    pub fn place(&self, index: usize) -> &Place {
        &self.places[index]
    }

    /// Pole order at infinity of `y^b`.
    pub fn y_pole_order(&self, b: u32) -> u32 {
        b * self.y_pole
    }

    pub fn monomial_pole_order(&self, m: Monomial) -> u32 {
        m.x_deg * self.mu + m.y_deg * self.y_pole
    }

    /// The unique normal-form monomial with pole order `d`, if `d` is in the
    /// Weierstrass semigroup.
    pub fn monomial_with_pole_order(&self, d: u32) -> Option<Monomial> {
        let b = d % self.mu;
        let rest = d.checked_sub(b * self.y_pole)?;
        (rest % self.mu == 0).then_some(Monomial { x_deg: rest / self.mu, y_deg: b })
    }

    pub fn in_semigroup(&self, d: u32) -> bool {
        self.monomial_with_pole_order(d).is_some()
    }

    /// Gaps of the Weierstrass semigroup at infinity.
    pub fn gaps(&self) -> Vec<u32> {
        let bound = 2 * self.genus;
        (0..bound).filter(|&d| !self.in_semigroup(d)).collect()
    }

    /// Monomials of pole order at most `dmax`, sorted by pole order: a basis
    /// of `L(dmax * P_inf)`.
    pub fn ya_basis_upto(&self, dmax: i64) -> Vec<Monomial> {
        if dmax < 0 {
            return Vec::new();
        }
        (0..=dmax as u32)
            .filter_map(|d| self.monomial_with_pole_order(d))
            .collect()
    }

    /// `dim L(d * P_inf)`.
    pub fn riemann_roch_dim(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        (0..=d as u32).filter(|&k| self.in_semigroup(k)).count()
    }

    pub fn zero(&self) -> FuncElem {
        FuncElem { comps: vec![Poly::zero(); self.mu as usize] }
    }

    /// Builds a function from its `y^b` coefficient polynomials.
    pub fn from_components(&self, mut comps: Vec<Poly>) -> FuncElem {
        assert!(comps.len() <= self.mu as usize, "too many components");
        comps.resize(self.mu as usize, Poly::zero());
        FuncElem { comps }
    }

    pub fn constant(&self, c: Gf) -> FuncElem {
        let mut z = self.zero();
        z.comps[0] = Poly::constant(c);
        z
    }

    pub fn one(&self) -> FuncElem {
        self.constant(Gf::ONE)
    }

    pub fn x(&self) -> FuncElem {
        self.monomial(Monomial { x_deg: 1, y_deg: 0 }, Gf::ONE)
    }

    /// The function `y`; only meaningful on the Hermitian curve.
    pub fn y(&self) -> FuncElem {
        self.from_terms([(0, 1, Gf::ONE)])
    }

    pub fn monomial(&self, m: Monomial, c: Gf) -> FuncElem {
        self.from_terms([(m.x_deg, m.y_deg, c)])
    }

    /// Builds `sum c x^a y^b`, reducing `y`-degrees at or above `mu`.
    pub fn from_terms(&self, terms: impl IntoIterator<Item = (u32, u32, Gf)>) -> FuncElem {
        let f = &self.field;
        let mut out = self.zero();
        for (a, b, c) in terms {
            if c.is_zero() {
                continue;
            }
            if self.kind == CurveKind::Rational && b > 0 {
                // y is not a function on the line; treat it as zero
                continue;
            }
            let term = if b < self.mu {
                let mut t = self.zero();
                t.comps[b as usize] = Poly::monomial(c, a as usize);
                t
            } else {
                let yb = self.pow(&self.y(), b as u64);
                let xa = self.monomial(Monomial { x_deg: a, y_deg: 0 }, c);
                self.mul(&xa, &yb)
            };
            out = self.add(&out, &term);
        }
        let _ = f;
        out
    }

    /// `delta(f) = -v_inf(f)`; `None` stands for `-infinity` (the zero function).
    pub fn delta(&self, g: &FuncElem) -> Option<i64> {
        g.comps
            .iter()
            .enumerate()
            .filter_map(|(b, p)| {
                p.degree()
                    .map(|d| (d as i64) * self.mu as i64 + self.y_pole_order(b as u32) as i64)
            })
            .max()
    }

    pub fn add(&self, a: &FuncElem, b: &FuncElem) -> FuncElem {
        let f = &self.field;
        FuncElem { comps: a.comps.iter().zip(&b.comps).map(|(x, y)| x.add(y, f)).collect() }
    }

    pub fn sub(&self, a: &FuncElem, b: &FuncElem) -> FuncElem {
        let f = &self.field;
        FuncElem { comps: a.comps.iter().zip(&b.comps).map(|(x, y)| x.sub(y, f)).collect() }
    }

    pub fn neg(&self, a: &FuncElem) -> FuncElem {
        self.scale(a, self.field.neg(Gf::ONE))
    }

    pub fn scale(&self, a: &FuncElem, c: Gf) -> FuncElem {
        let f = &self.field;
        FuncElem { comps: a.comps.iter().map(|x| x.scale(c, f)).collect() }
    }

    /// Multiplication by a polynomial in `x`.
    pub fn mul_poly(&self, a: &FuncElem, p: &Poly) -> FuncElem {
        let f = &self.field;
        FuncElem { comps: a.comps.iter().map(|x| x.mul(p, f)).collect() }
    }

    pub fn mul(&self, a: &FuncElem, b: &FuncElem) -> FuncElem {
        let f = &self.field;
        let mu = self.mu as usize;
        if mu == 1 {
            return FuncElem { comps: vec![a.comps[0].mul(&b.comps[0], f)] };
        }
        let mut tmp = vec![Poly::zero(); 2 * mu - 1];
        for (i, pa) in a.comps.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (j, pb) in b.comps.iter().enumerate() {
                if pb.is_zero() {
                    continue;
                }
                tmp[i + j] = tmp[i + j].add(&pa.mul(pb, f), f);
            }
        }
        // y^mu = x^(mu+1) - y
        let minus_one = f.neg(Gf::ONE);
        for k in (mu..2 * mu - 1).rev() {
            let top = std::mem::take(&mut tmp[k]);
            if top.is_zero() {
                continue;
            }
            tmp[k - mu].add_scaled_shifted(&top, Gf::ONE, mu + 1, f);
            tmp[k - mu + 1].add_scaled_shifted(&top, minus_one, 0, f);
        }
        tmp.truncate(mu);
        FuncElem { comps: tmp }
    }

    pub fn pow(&self, a: &FuncElem, mut k: u64) -> FuncElem {
        let mut result = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn evaluate(&self, g: &FuncElem, place: &Place) -> Gf {
        let f = &self.field;
        let mut acc = Gf::ZERO;
        let mut yb = Gf::ONE;
        for comp in &g.comps {
            acc = f.add(acc, f.mul(comp.eval(place.a, f), yb));
            yb = f.mul(yb, place.b);
        }
        acc
    }

    /// Precomputed expansions of `x` and powers of `y` at a place.
    pub fn local_frame(&self, place: &Place, precision: usize) -> LocalFrame {
        let f = &self.field;
        let n = precision;
        let mut y_powers = vec![unit_series(n)];
        if self.kind == CurveKind::Hermitian && n > 0 {
            let q0 = self.base as u64;
            let mut x_series = vec![Gf::ZERO; n];
            x_series[0] = place.a;
            if n > 1 {
                x_series[1] = Gf::ONE;
            }
            let rhs = series_pow(&x_series, q0 + 1, n, f);
            let mut y = vec![Gf::ZERO; n];
            y[0] = place.b;
            // y <- x^(q0+1) - y^q0; agreement with the true expansion
            // multiplies by q0 at every step.
            loop {
                let yq = frobenius_series(&y, self.base, n, f);
                let next: Vec<Gf> = rhs.iter().zip(&yq).map(|(&r, &s)| f.sub(r, s)).collect();
                if next == y {
                    break;
                }
                y = next;
            }
            for _ in 1..self.mu {
                let last = y_powers.last().unwrap();
                y_powers.push(series_mul(last, &y, n, f));
            }
        }
        LocalFrame { place: *place, precision: n, y_powers }
    }

    /// Expansion of `g` at `place` in `t = x - a`, `precision` terms.
    pub fn local_expand(&self, g: &FuncElem, place: &Place, precision: usize) -> LocalSeries {
        self.local_frame(place, precision).expand(self, g)
    }

    /// `h^c` where `h` has a simple zero at every affine rational place.
    pub fn vanishing_function(&self, c: u64) -> FuncElem {
        let q = self.field.size() as usize;
        let h = Poly::from_coeffs({
            let mut v = vec![Gf::ZERO; q + 1];
            v[q] = Gf::ONE;
            v[1] = self.field.neg(Gf::ONE);
            v
        });
        let mut out = self.zero();
        out.comps[0] = h;
        self.pow(&out, c)
    }

    /// A function vanishing to order at least `c` at every affine rational
    /// place other than `place`, and nonzero at `place`.
    pub fn vanishing_except(&self, place: &Place, c: u64) -> FuncElem {
        let f = &self.field;
        let mut xpart = Poly::constant(Gf::ONE);
        for a in f.elements().filter(|&a| a != place.a) {
            xpart = xpart.mul(&Poly::from_coeffs(vec![f.neg(a), Gf::ONE]), f);
        }
        let mut g = self.zero();
        g.comps[0] = xpart;
        if self.kind == CurveKind::Hermitian {
            for other in self.places.iter().filter(|p| p.a == place.a && p.b != place.b) {
                let factor = self.sub(&self.y(), &self.constant(other.b));
                g = self.mul(&g, &factor);
            }
        }
        self.pow(&g, c)
    }

    /// The unique `f` in `L(m P_inf)` whose expansion at the series' place
    /// agrees with the series.
    pub fn reconstruct_from_expansion(
        &self,
        series: &LocalSeries,
        m: i64,
    ) -> Result<FuncElem, CurveError> {
        let n = series.precision();
        if (n as i64) <= m {
            return Err(CurveError::InsufficientPrecision { have: n, need: m.max(0) as usize });
        }
        let basis = self.ya_basis_upto(m);
        if basis.is_empty() {
            return if series.coeffs.iter().all(|c| c.is_zero()) {
                Ok(self.zero())
            } else {
                Err(CurveError::NoMatch)
            };
        }
        let frame = self.local_frame(&self.places[series.place], n);
        let mut a = Matrix::zeros(n, basis.len());
        for (j, mono) in basis.iter().enumerate() {
            let e = frame.expand_monomial(self, *mono);
            for (i, &c) in e.iter().enumerate() {
                a.set(i, j, c);
            }
        }
        let sol = linalg::solve(&a, &series.coeffs, &self.field).ok_or(CurveError::NoMatch)?;
        Ok(self.from_terms(basis.iter().zip(sol).map(|(m, c)| (m.x_deg, m.y_deg, c))))
    }

    pub fn parse_place(&self, text: &str) -> Result<Place, CurveError> {
        let bad = || CurveError::Parse(text.to_string());
        let inner = text.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let mut parts = inner.split(',').map(|s| s.trim().parse::<u64>());
        let a = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
        let b = match parts.next() {
            Some(v) => v.map_err(|_| bad())?,
            None => 0,
        };
        let (a, b) = (self.field.elem(a)?, self.field.elem(b)?);
        self.places
            .iter()
            .find(|p| p.a == a && p.b == b)
            .copied()
            .ok_or_else(bad)
    }

    pub fn parse_func(&self, text: &str) -> Result<FuncElem, CurveError> {
        let bad = || CurveError::Parse(text.to_string());
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(self.zero());
        }
        let mut terms = Vec::new();
        for tok in text.split_whitespace() {
            let (mono, coeff) = tok.split_once(':').ok_or_else(bad)?;
            let inner = mono.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            let c = self.field.elem(coeff.parse().map_err(|_| bad())?)?;
            terms.push((a, b, c));
        }
        Ok(self.from_terms(terms))
    }
}

/// Expansion data at one place: powers `y^0..y^(mu-1)` as series in `t`.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    place: Place,
    precision: usize,
    y_powers: Vec<Vec<Gf>>,
}

impl LocalFrame {
    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn expand(&self, curve: &CurveCtx, g: &FuncElem) -> LocalSeries {
        let f = curve.field();
        let n = self.precision;
        let mut acc = vec![Gf::ZERO; n];
        for (b, comp) in g.comps.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let shifted = comp.taylor_at(self.place.a, n, f);
            let term = if b == 0 { shifted } else { series_mul(&shifted, &self.y_powers[b], n, f) };
            acc = series_add(&acc, &term, f);
        }
        LocalSeries { place: self.place.index, coeffs: acc }
    }

    pub fn expand_monomial(&self, curve: &CurveCtx, m: Monomial) -> Vec<Gf> {
        let f = curve.field();
        let n = self.precision;
        let mut xs = vec![Gf::ZERO; n];
        if n > 0 {
            xs[0] = self.place.a;
        }
        if n > 1 {
            xs[1] = Gf::ONE;
        }
        let xa = series_pow(&xs, m.x_deg as u64, n, f);
        if m.y_deg == 0 {
            xa
        } else {
            series_mul(&xa, &self.y_powers[m.y_deg as usize], n, f)
        }
    }
}

fn unit_series(n: usize) -> Vec<Gf> {
    let mut v = vec![Gf::ZERO; n];
    if n > 0 {
        v[0] = Gf::ONE;
    }
    v
}

/// `s^k` for `k` a power of the characteristic: coefficientwise power and
/// index scaling.
fn frobenius_series(s: &[Gf], k: u32, n: usize, f: &FieldCtx) -> Vec<Gf> {
    let mut out = vec![Gf::ZERO; n];
    for (i, &c) in s.iter().enumerate() {
        let j = i * k as usize;
        if j >= n {
            break;
        }
        out[j] = f.pow(c, k as u64);
    }
    out
}

fn hermitian_places(field: &FieldCtx, q0: u32) -> Vec<Place> {
    let mut by_trace: BTreeMap<Gf, Vec<Gf>> = BTreeMap::new();
    for b in field.elements() {
        let t = field.add(field.pow(b, q0 as u64), b);
        by_trace.entry(t).or_default().push(b);
    }
    let mut places = Vec::new();
    for a in field.elements() {
        let norm = field.pow(a, q0 as u64 + 1);
        if let Some(bs) = by_trace.get(&norm) {
            for &b in bs {
                places.push(Place { index: 0, a, b });
            }
        }
    }
    places.sort_by_key(|p| (p.a, p.b));
    for (i, p) in places.iter_mut().enumerate() {
        p.index = i;
    }
    places
}
