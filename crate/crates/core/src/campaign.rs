//! Monte Carlo campaigns over many OFDM blocks.
//!
//! Block `b` of a campaign always draws its symbols (and then its noise) from
//! stream `b` of the campaign seed, and per-block results are reduced in block
//! order, so every number here is independent of the rayon thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, NoiseModel};
use crate::error::Result;
use crate::filters::FilterTaps;
use crate::metrics::{ccdf, papr_db, symbol_errors, CcdfCurve, SweepResult};
use crate::rng::StreamSeed;

/// PAPR in dB of `n_blocks` random blocks.
pub fn papr_samples(
    chain: &Chain,
    taps: &FilterTaps,
    n_blocks: u64,
    seed: StreamSeed,
) -> Result<Vec<f64>> {
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.block(b);
            let s = chain.random_symbols(&mut rng);
            papr_db(&chain.transmit(taps, &s)?)
        })
        .collect()
}

pub fn ccdf_campaign(
    chain: &Chain,
    taps: &FilterTaps,
    n_blocks: u64,
    seed: StreamSeed,
    edges: &[f64],
) -> Result<CcdfCurve> {
    let samples = papr_samples(chain, taps, n_blocks, seed)?;
    Ok(ccdf(&samples, edges))
}

/// Early-stopping rule for one SER point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    pub min_errors: u64,
    pub min_blocks: u64,
    pub max_blocks: u64,
    /// Blocks simulated between stopping checks.
    pub chunk: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 400,
            min_blocks: 10_000,
            max_blocks: 200_000,
            chunk: 1_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub errors: u64,
    pub symbols: u64,
    pub blocks: u64,
}

impl SerPoint {
    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.errors as f64 / self.symbols as f64
        }
    }
}

/// Simulates one SNR point until the stop rule is met.
pub fn ser_point(
    chain: &Chain,
    taps: &FilterTaps,
    noise: &NoiseModel,
    seed: StreamSeed,
    rule: &StopRule,
) -> Result<SerPoint> {
    let n_data = chain.config().n_data as u64;
    let chunk = rule.chunk.max(1);
    let mut errors = 0u64;
    let mut blocks = 0u64;
    while blocks < rule.max_blocks
        && !(errors >= rule.min_errors && blocks >= rule.min_blocks)
    {
        let end = (blocks + chunk).min(rule.max_blocks);
        let found: u64 = (blocks..end)
            .into_par_iter()
            .map(|b| {
                let mut rng = seed.block(b);
                let s = chain.random_symbols(&mut rng);
                let out = chain.run_chain(taps, &s, noise, &mut rng)?;
                symbol_errors(&s, &out.s_hat)
            })
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum();
        errors += found;
        blocks = end;
        if noise.sigma2 == 0.0 && blocks >= rule.min_blocks {
            break;
        }
    }
    Ok(SerPoint {
        snr_db: noise.snr_db,
        errors,
        symbols: blocks * n_data,
        blocks,
    })
}

/// SER over an SNR grid. Every point replays the same block streams.
pub fn ser_sweep(
    chain: &Chain,
    taps: &FilterTaps,
    snr_grid: &[f64],
    seed: StreamSeed,
    rule: &StopRule,
) -> Result<SweepResult> {
    let mut out = SweepResult {
        snr_db: Vec::with_capacity(snr_grid.len()),
        ser: Vec::with_capacity(snr_grid.len()),
        n_blocks: Vec::with_capacity(snr_grid.len()),
    };
    for &snr in snr_grid {
        let p = ser_point(chain, taps, &chain.calibrate_noise(snr), seed, rule)?;
        out.snr_db.push(snr);
        out.ser.push(p.ser());
        out.n_blocks.push(p.blocks);
    }
    Ok(out)
}
