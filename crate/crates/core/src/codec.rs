//! One-point codes `C_L(D, m P_inf)` and the decoding pipeline.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveCtx, CurveError, CurveKind, FuncElem, Monomial, Place};
use crate::gf::{FieldCtx, FieldError, Gf};
use crate::interp::{self, InterpProblem, QPoly};
use crate::modform::{self, ModuleMatrix};
use crate::radius::{self, CodeShape, GsParams};
use crate::roots;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("m = {m} is below 2g - 1 = {min}")]
    DegreeTooSmall { m: u32, min: i64 },
    #[error("m = {m} must be smaller than the length n = {n}")]
    DegreeTooLarge { m: u32, n: usize },
    #[error("at least one affine place must be excluded")]
    NoExcludedPlace,
    #[error("expected {expected} symbols, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("infeasible decoding parameters: {0}")]
    InfeasibleParams(String),
    #[error("interpolation failed: {0}")]
    InterpolationFailure(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("no codeword within the unique decoding radius")]
    UniqueDecodingFailure,
    #[error("bad descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Evaluation code of `L(m P_inf)` on all affine rational places except the
/// excluded ones. The last excluded place is reserved for root finding.
#[derive(Debug)]
pub struct AGCode {
    curve: Arc<CurveCtx>,
    m: u32,
    places: Vec<Place>,
    excluded: Vec<Place>,
    basis: Vec<Monomial>,
    generator: Vec<Vec<Gf>>,
    vanishing_cache: Mutex<HashMap<u64, Arc<Vec<FuncElem>>>>,
}

impl AGCode {
    pub fn new(curve: Arc<CurveCtx>, m: u32, excluded: &[Place]) -> Result<Self, CodecError> {
        let min = 2 * curve.genus() as i64 - 1;
        if (m as i64) < min {
            return Err(CodecError::DegreeTooSmall { m, min });
        }
        let mut excl: Vec<Place> = Vec::new();
        for p in excluded {
            let p = *curve.place(p.index);
            if !excl.contains(&p) {
                excl.push(p);
            }
        }
        if excl.is_empty() {
            return Err(CodecError::NoExcludedPlace);
        }
        let places: Vec<Place> =
            curve.rational_places().iter().filter(|p| !excl.contains(p)).copied().collect();
        if m as usize >= places.len() {
            return Err(CodecError::DegreeTooLarge { m, n: places.len() });
        }
        let basis = curve.ya_basis_upto(m as i64);
        let generator = basis
            .iter()
            .map(|mono| {
                let f = curve.monomial(*mono, Gf::ONE);
                places.iter().map(|p| curve.evaluate(&f, p)).collect()
            })
            .collect();
        Ok(AGCode {
            curve,
            m,
            places,
            excluded: excl,
            basis,
            generator,
            vanishing_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Excludes the lexicographically last affine place.
    pub fn with_default_exclusion(curve: Arc<CurveCtx>, m: u32) -> Result<Self, CodecError> {
        let last = *curve.rational_places().last().expect("curve has affine places");
        AGCode::new(curve, m, &[last])
    }

    pub fn curve(&self) -> &CurveCtx {
        &self.curve
    }

    pub fn curve_arc(&self) -> &Arc<CurveCtx> {
        &self.curve
    }

    pub fn field(&self) -> &FieldCtx {
        self.curve.field()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.places.len()
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn designed_distance(&self) -> i64 {
        self.n() as i64 - self.m as i64
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn excluded(&self) -> &[Place] {
        &self.excluded
    }

    pub fn reserved_place(&self) -> &Place {
        self.excluded.last().unwrap()
    }

    /// Monomial basis of `L(m P_inf)`; message symbol `i` multiplies `basis()[i]`.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn shape(&self) -> CodeShape {
        CodeShape {
            n: self.n() as u64,
            deg_g: self.m as u64,
            g: self.curve.genus() as u64,
            p: self.field().characteristic() as u64,
        }
    }

    pub fn function_of(&self, message: &[Gf]) -> FuncElem {
        self.curve.from_terms(self.basis.iter().zip(message).map(|(m, &c)| (m.x_deg, m.y_deg, c)))
    }

    pub fn message_of(&self, f: &FuncElem) -> Vec<Gf> {
        self.basis
            .iter()
            .map(|m| f.component(m.y_deg as usize).coeff(m.x_deg as usize))
            .collect()
    }

    pub fn encode(&self, message: &[Gf]) -> Result<Vec<Gf>, CodecError> {
        if message.len() != self.k() {
            return Err(CodecError::WrongLength { expected: self.k(), got: message.len() });
        }
        let f = self.field();
        let mut word = vec![Gf::ZERO; self.n()];
        for (row, &c) in self.generator.iter().zip(message) {
            if c.is_zero() {
                continue;
            }
            for (w, &g) in word.iter_mut().zip(row) {
                *w = f.mul_add(*w, c, g);
            }
        }
        Ok(word)
    }

    pub fn evaluate(&self, f: &FuncElem) -> Vec<Gf> {
        self.places.iter().map(|p| self.curve.evaluate(f, p)).collect()
    }

    pub fn generator_matrix(&self) -> &[Vec<Gf>] {
        &self.generator
    }

    /// `F_q[x]`-basis of the functions vanishing to order `c` on every
    /// evaluation place; cached per `c`.
    pub fn vanishing_basis(&self, c: u64) -> Arc<Vec<FuncElem>> {
        if let Some(b) = self.vanishing_cache.lock().unwrap().get(&c) {
            return b.clone();
        }
        let basis = Arc::new(modform::vanishing_module_basis(self, c));
        self.vanishing_cache.lock().unwrap().insert(c, basis.clone());
        basis
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            kind: self.curve.kind(),
            base: self.curve.base(),
            m: self.m,
            excluded: self.excluded.iter().map(|p| p.to_string()).collect(),
            modulus: self.field().descriptor(),
        }
    }

    pub fn from_descriptor(d: &CodeDescriptor) -> Result<Self, CodecError> {
        let curve = Arc::new(CurveCtx::new(d.kind, d.base)?);
        if curve.field().descriptor() != d.modulus {
            return Err(CodecError::Descriptor(format!(
                "field {} does not match the fixed modulus {}",
                d.modulus,
                curve.field().descriptor()
            )));
        }
        let excluded = d
            .excluded
            .iter()
            .map(|s| curve.parse_place(s))
            .collect::<Result<Vec<_>, _>>()?;
        AGCode::new(curve, d.m, &excluded)
    }
}

impl fmt::Display for AGCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} code over F_{}: [n={}, k={}, d*={}], g={}, m={}",
            self.curve.kind(),
            self.field().size(),
            self.n(),
            self.k(),
            self.designed_distance(),
            self.curve.genus(),
            self.m
        )
    }
}

/// Serializable code description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub kind: CurveKind,
    pub base: u32,
    pub m: u32,
    pub excluded: Vec<String>,
    pub modulus: String,
}

impl CodeDescriptor {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, CodecError> {
        toml::from_str(text).map_err(|e| CodecError::Descriptor(e.to_string()))
    }
}

/// Space-separated field-element integers.
pub fn parse_word(text: &str, field: &FieldCtx) -> Result<Vec<Gf>, CodecError> {
    text.split_whitespace()
        .map(|tok| {
            let v: u64 = tok.parse().map_err(|_| CodecError::Descriptor(format!("bad symbol {tok:?}")))?;
            Ok(field.elem(v)?)
        })
        .collect()
}

pub fn format_word(word: &[Gf]) -> String {
    word.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    #[default]
    Module,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Dense => write!(f, "dense"),
            Backend::Module => write!(f, "module"),
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Backend::Dense),
            "module" => Ok(Backend::Module),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    #[default]
    Fixed,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeParams {
    pub s: u64,
    pub ell: u64,
    pub e: u32,
    pub backend: Backend,
    pub strategy: Strategy,
    /// Target radius; `None` means `floor(tau_best)`.
    pub tau: Option<u64>,
}

impl DecodeParams {
    pub fn new(s: u64, ell: u64, e: u32) -> Self {
        DecodeParams { s, ell, e, backend: Backend::default(), strategy: Strategy::Fixed, tau: None }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_tau(mut self, tau: u64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn adaptive(mut self) -> Self {
        self.strategy = Strategy::Adaptive;
        self
    }

    pub fn gs(&self) -> GsParams {
        GsParams { s: self.s, ell: self.ell, e: self.e }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeEntry {
    pub message: Vec<Gf>,
    pub codeword: Vec<Gf>,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub entries: Vec<DecodeEntry>,
    pub backend: Backend,
    pub e_used: u32,
    pub tau: u64,
    pub q_found: bool,
}

impl DecodeResult {
    pub fn contains(&self, codeword: &[Gf]) -> bool {
        self.entries.iter().any(|e| e.codeword == codeword)
    }

    pub fn codewords(&self) -> Vec<Vec<Gf>> {
        self.entries.iter().map(|e| e.codeword.clone()).collect()
    }
}

pub fn hamming(a: &[Gf], b: &[Gf]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Checks feasibility and resolves the target radius.
pub fn resolve_tau(code: &AGCode, gs: &GsParams, requested: Option<u64>) -> Result<u64, CodecError> {
    let shape = code.shape();
    radius::check_feasible(&shape, gs).map_err(|v| CodecError::InfeasibleParams(v.to_string()))?;
    let best = radius::floor(&radius::tau_best(&shape, gs).0) as u64;
    match requested {
        Some(t) if t > best => Err(CodecError::InfeasibleParams(format!(
            "requested radius {t} exceeds the guaranteed radius {best}"
        ))),
        Some(t) => Ok(t),
        None => Ok(best),
    }
}

/// Interpolation step alone, for a resolved target radius.
pub fn interpolate(
    code: &AGCode,
    received: &[Gf],
    gs: &GsParams,
    tau: u64,
    backend: Backend,
) -> Result<QPoly, CodecError> {
    let p = code.field().characteristic() as u64;
    let alpha = radius::choose_a_degree(p, gs.e, gs.s, code.n() as u64, tau);
    match backend {
        Backend::Dense => {
            let problem = InterpProblem { code, received, params: *gs, alpha, tau };
            interp::solve_q(&problem).map_err(|e| CodecError::InterpolationFailure(e.to_string()))
        }
        Backend::Module => {
            let reduced = modform::shifted_reduce(&module_matrix(code, received, gs, tau), code.field());
            modform::minimal_q(&reduced, code.curve())
                .map_err(|e| CodecError::InterpolationFailure(e.to_string()))
        }
    }
}

/// Unreduced module generator matrix for the given target radius.
pub fn module_matrix(code: &AGCode, received: &[Gf], gs: &GsParams, tau: u64) -> ModuleMatrix {
    let p = code.field().characteristic() as u64;
    let alpha = radius::choose_a_degree(p, gs.e, gs.s, code.n() as u64, tau);
    let r = modform::build_r(code, received);
    modform::build_module_matrix(code, &r, gs, alpha)
}

pub fn decode(code: &AGCode, received: &[Gf], params: &DecodeParams) -> Result<DecodeResult, CodecError> {
    match params.strategy {
        Strategy::Fixed => decode_fixed(code, received, params),
        Strategy::Adaptive => decode_adaptive(code, received, params.s, params.ell, params.backend),
    }
}

fn decode_fixed(code: &AGCode, received: &[Gf], params: &DecodeParams) -> Result<DecodeResult, CodecError> {
    if received.len() != code.n() {
        return Err(CodecError::WrongLength { expected: code.n(), got: received.len() });
    }
    let gs = params.gs();
    let tau = resolve_tau(code, &gs, params.tau)?;
    // Within the guaranteed radius a missing Q proves that no codeword is
    // close enough, so the list is empty.
    let q = match interpolate(code, received, &gs, tau, params.backend) {
        Ok(q) => q,
        Err(CodecError::InterpolationFailure(_)) => {
            return Ok(DecodeResult { entries: Vec::new(), backend: params.backend, e_used: params.e, tau, q_found: false })
        }
        Err(other) => return Err(other),
    };
    let found = roots::find_roots(code, &q).map_err(|e| CodecError::RootFinding(e.to_string()))?;
    let mut entries: Vec<DecodeEntry> = found
        .into_iter()
        .filter_map(|f| {
            let codeword = code.evaluate(&f);
            let distance = hamming(&codeword, received);
            (distance as u64 <= tau).then(|| DecodeEntry { message: code.message_of(&f), codeword, distance })
        })
        .collect();
    entries.sort_by(|a, b| (a.distance, &a.codeword).cmp(&(b.distance, &b.codeword)));
    entries.dedup_by(|a, b| a.codeword == b.codeword);
    Ok(DecodeResult { entries, backend: params.backend, e_used: params.e, tau, q_found: true })
}

/// Decodes with `e = 0` first and retries with the penalty-free exponent
/// when that yields nothing.
pub fn decode_adaptive(
    code: &AGCode,
    received: &[Gf],
    s: u64,
    ell: u64,
    backend: Backend,
) -> Result<DecodeResult, CodecError> {
    let first = decode_fixed(code, received, &DecodeParams::new(s, ell, 0).with_backend(backend));
    match &first {
        Ok(res) if !res.entries.is_empty() => return first,
        Err(CodecError::WrongLength { .. }) => return first,
        _ => {}
    }
    let e2 = radius::e_for_no_penalty(code.shape().p, code.shape().g, ell);
    if e2 == 0 {
        return first;
    }
    decode_fixed(code, received, &DecodeParams::new(s, ell, e2).with_backend(backend))
}

/// Bounded-distance decoding up to `floor((d* - 1)/2)` with `s = ell = 1`.
pub fn unique_decode(code: &AGCode, received: &[Gf], backend: Backend) -> Result<DecodeEntry, CodecError> {
    let shape = code.shape();
    let e = radius::e_for_no_penalty(shape.p, shape.g, 1);
    let tau = ((code.designed_distance() - 1).max(0) / 2) as u64;
    let params = DecodeParams::new(1, 1, e).with_backend(backend).with_tau(tau);
    let res = decode_fixed(code, received, &params)?;
    res.entries.into_iter().next().ok_or(CodecError::UniqueDecodingFailure)
}
