//! Seeded channel simulation and Monte-Carlo decoding experiments.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{decode, AGCode, Backend, CodeDescriptor, CodecError, DecodeParams};
use crate::gf::{FieldCtx, Gf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("error weight {weight} exceeds the length {n}")]
    WeightTooLarge { weight: usize, n: usize },
    #[error("bad experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Changes exactly `weight` positions to uniformly chosen different symbols.
pub fn corrupt<R: Rng>(word: &[Gf], weight: usize, field: &FieldCtx, rng: &mut R) -> Result<Vec<Gf>, ExperimentError> {
    if weight > word.len() {
        return Err(ExperimentError::WeightTooLarge { weight, n: word.len() });
    }
    let mut out = word.to_vec();
    for pos in sample(rng, word.len(), weight).iter() {
        let delta = Gf(rng.gen_range(1..field.size()));
        out[pos] = field.add(out[pos], delta);
    }
    Ok(out)
}

/// RNG for one trial: the experiment seed selects the key, the cell and
/// trial indices select an independent stream.
pub fn trial_rng(seed: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((cell << 32) | trial);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: u64,
    pub weight_min: usize,
    pub weight_max: usize,
    pub s: Vec<u64>,
    pub ell: Vec<u64>,
    pub e: Vec<u32>,
    #[serde(default)]
    pub backend: Option<Backend>,
    pub code: CodeDescriptor,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| ExperimentError::Spec(e.to_string()))?;
        if spec.trials == 0 {
            return Err(ExperimentError::Spec("trials must be at least 1".into()));
        }
        if spec.weight_min > spec.weight_max {
            return Err(ExperimentError::Spec("weight_min exceeds weight_max".into()));
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub s: u64,
    pub ell: u64,
    pub e: u32,
    pub weight: usize,
    pub trials: u64,
    pub successes: u64,
    pub mean_list_size: f64,
    pub mean_wall_time_ms: f64,
    pub backend: Backend,
}

pub const CSV_HEADER: &str = "s,ℓ,e,weight,trials,successes,mean_list_size,mean_wall_time_ms,backend";

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.4},{:.3},{}",
            r.s, r.ell, r.e, r.weight, r.trials, r.successes, r.mean_list_size, r.mean_wall_time_ms, r.backend
        );
    }
    out
}

/// One cell: `trials` codewords corrupted with `weight` errors and decoded.
pub fn run_cell(
    code: &AGCode,
    params: &DecodeParams,
    weight: usize,
    trials: u64,
    seed: u64,
    cell: u64,
) -> Result<ExperimentRow, ExperimentError> {
    if weight > code.n() {
        return Err(ExperimentError::WeightTooLarge { weight, n: code.n() });
    }
    let q = code.field().size();
    let outcomes: Vec<Result<(bool, usize, f64), ExperimentError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, cell, trial);
            let msg: Vec<Gf> = (0..code.k()).map(|_| Gf(rng.gen_range(0..q))).collect();
            let word = code.encode(&msg)?;
            let received = corrupt(&word, weight, code.field(), &mut rng)?;
            let start = Instant::now();
            let res = decode(code, &received, params)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            Ok((res.contains(&word), res.entries.len(), ms))
        })
        .collect();
    let mut successes = 0;
    let (mut lists, mut time) = (0usize, 0f64);
    for o in outcomes {
        let (ok, len, ms) = o?;
        successes += ok as u64;
        lists += len;
        time += ms;
    }
    Ok(ExperimentRow {
        s: params.s,
        ell: params.ell,
        e: params.e,
        weight,
        trials,
        successes,
        mean_list_size: lists as f64 / trials as f64,
        mean_wall_time_ms: time / trials as f64,
        backend: params.backend,
    })
}

/// Runs every `(s, ell, e, weight)` cell of the grid in order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let code = AGCode::from_descriptor(&spec.code)?;
    if spec.weight_max > code.n() {
        return Err(ExperimentError::WeightTooLarge { weight: spec.weight_max, n: code.n() });
    }
    let backend = spec.backend.unwrap_or_default();
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &s in &spec.s {
        for &ell in &spec.ell {
            for &e in &spec.e {
                let params = DecodeParams::new(s, ell, e).with_backend(backend);
                for weight in spec.weight_min..=spec.weight_max {
                    rows.push(run_cell(&code, &params, weight, spec.trials, spec.seed, cell)?);
                    cell += 1;
                }
            }
        }
    }
    Ok(rows)
}
