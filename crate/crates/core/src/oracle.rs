//! Brute-force ground truth by enumerating every message.

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{hamming, AGCode, DecodeEntry};
use crate::gf::Gf;

pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{q}^{k} messages exceed the enumeration budget of {budget}")]
    BudgetExceeded { q: u32, k: usize, budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_messages: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_messages: DEFAULT_BUDGET }
    }
}

fn message_count(code: &AGCode, budget: &OracleBudget) -> Result<u64, OracleError> {
    let q = code.field().size();
    let k = code.k();
    let too_big = || OracleError::BudgetExceeded { q, k, budget: budget.max_messages };
    let count = (q as u64).checked_pow(k as u32).ok_or_else(too_big)?;
    if count > budget.max_messages {
        return Err(too_big());
    }
    Ok(count)
}

fn message_at(index: u64, q: u32, k: usize) -> Vec<Gf> {
    let mut idx = index;
    (0..k)
        .map(|_| {
            let d = (idx % q as u64) as u32;
            idx /= q as u64;
            Gf(d)
        })
        .collect()
}

/// Every codeword within distance `tau` of `received`, sorted by distance
/// and then lexicographically.
pub fn exhaustive_list(
    code: &AGCode,
    received: &[Gf],
    tau: u64,
    budget: &OracleBudget,
) -> Result<Vec<DecodeEntry>, OracleError> {
    let count = message_count(code, budget)?;
    let (q, k) = (code.field().size(), code.k());
    let mut out: Vec<DecodeEntry> = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let message = message_at(i, q, k);
            let codeword = code.encode(&message).expect("message has length k");
            let distance = hamming(&codeword, received);
            (distance as u64 <= tau).then_some(DecodeEntry { message, codeword, distance })
        })
        .collect();
    out.sort_by(|a, b| (a.distance, &a.codeword).cmp(&(b.distance, &b.codeword)));
    Ok(out)
}

/// Minimum weight of a nonzero codeword.
pub fn true_minimum_distance(code: &AGCode, budget: &OracleBudget) -> Result<usize, OracleError> {
    let count = message_count(code, budget)?;
    let (q, k) = (code.field().size(), code.k());
    Ok((1..count)
        .into_par_iter()
        .map(|i| {
            let w = code.encode(&message_at(i, q, k)).expect("message has length k");
            w.iter().filter(|c| !c.is_zero()).count()
        })
        .min()
        .unwrap_or(code.n()))
}
