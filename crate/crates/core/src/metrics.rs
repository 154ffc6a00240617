//! Scalar metrics and distribution estimators.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::chain::{combined_gain, NormMode, SystemConfig};
use crate::error::{check_len, FdssError, Result};
use crate::filters::FilterTaps;

/// SFM reported for a mid-band containing a zero tap.
pub const SFM_FLOOR_DB: f64 = -300.0;

/// Peak-to-average power ratio of one block (linear).
pub fn papr(samples: &[Complex64]) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut total = 0.0;
    for s in samples {
        let p = s.norm_sqr();
        peak = peak.max(p);
        total += p;
    }
    if !(total > 0.0) {
        return Err(FdssError::UndefinedPapr);
    }
    Ok(peak * samples.len() as f64 / total)
}

pub fn papr_db(samples: &[Complex64]) -> Result<f64> {
    papr(samples).map(|r| 10.0 * r.log10())
}

/// Uniform grid `start, start+step, …, stop` (inclusive, rounded to the step).
/// Empty when the arguments describe no finite increasing grid.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0 && start.is_finite() && stop >= start && (stop - start) / step < 1e7) {
        return Vec::new();
    }
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// Bin edges and sigmoid sharpness of the smooth AUCCDF surrogate.
///
/// Deserializes either from explicit `edges` or from a `start`/`stop`/`step` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "AuccdfRepr")]
pub struct AuccdfConfig {
    pub edges: Vec<f64>,
    pub sharpness: f64,
}

impl Default for AuccdfConfig {
    fn default() -> Self {
        AuccdfConfig {
            edges: db_grid(0.0, 10.0, 0.05),
            sharpness: 100.0,
        }
    }
}

fn default_sharpness() -> f64 {
    100.0
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AuccdfRepr {
    Edges {
        edges: Vec<f64>,
        #[serde(default = "default_sharpness")]
        sharpness: f64,
    },
    Grid {
        start: f64,
        stop: f64,
        step: f64,
        #[serde(default = "default_sharpness")]
        sharpness: f64,
    },
}

impl From<AuccdfRepr> for AuccdfConfig {
    fn from(r: AuccdfRepr) -> Self {
        match r {
            AuccdfRepr::Edges { edges, sharpness } => AuccdfConfig { edges, sharpness },
            AuccdfRepr::Grid {
                start,
                stop,
                step,
                sharpness,
            } => AuccdfConfig {
                edges: db_grid(start, stop, step),
                sharpness,
            },
        }
    }
}

impl AuccdfConfig {
    pub fn papr_max(&self) -> f64 {
        *self.edges.last().unwrap_or(&0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() || self.edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FdssError::Config("AUCCDF edges must be strictly increasing".into()));
        }
        if !(self.sharpness > 0.0) {
            return Err(FdssError::Config("sigmoid sharpness must be positive".into()));
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Area under the CCDF with the CDF built from shifted logistic steps.
pub fn auccdf_smooth(papr_db: &[f64], acfg: &AuccdfConfig) -> f64 {
    let b = papr_db.len() as f64;
    acfg.edges
        .iter()
        .map(|&e| {
            let cdf: f64 = papr_db.iter().map(|&p| sigmoid(acfg.sharpness * (e - p))).sum::<f64>() / b;
            1.0 - cdf
        })
        .sum()
}

/// Same area with hard indicator counts.
pub fn auccdf_hard(papr_db: &[f64], edges: &[f64]) -> f64 {
    let b = papr_db.len() as f64;
    edges
        .iter()
        .map(|&e| papr_db.iter().filter(|&&p| p > e).count() as f64 / b)
        .sum()
}

/// Empirical `Pr[PAPR > edge]` on a dB grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub edges: Vec<f64>,
    pub probs: Vec<f64>,
    pub n_samples: u64,
}

/// Mergeable exceedance counts behind a [`CcdfCurve`].
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfAccumulator {
    edges: Vec<f64>,
    exceed: Vec<u64>,
    n: u64,
}

impl CcdfAccumulator {
    pub fn new(edges: Vec<f64>) -> Self {
        let exceed = vec![0; edges.len()];
        CcdfAccumulator { edges, exceed, n: 0 }
    }

    pub fn push(&mut self, papr_db: f64) {
        // Edges are sorted, so exceedances form a prefix.
        let k = self.edges.partition_point(|&e| e < papr_db);
        for c in &mut self.exceed[..k] {
            *c += 1;
        }
        self.n += 1;
    }

    pub fn extend(&mut self, samples: &[f64]) {
        for &p in samples {
            self.push(p);
        }
    }

    pub fn merge(&mut self, other: &CcdfAccumulator) -> Result<()> {
        if self.edges != other.edges {
            return Err(FdssError::Input("cannot merge CCDFs with different edges".into()));
        }
        for (a, b) in self.exceed.iter_mut().zip(&other.exceed) {
            *a += b;
        }
        self.n += other.n;
        Ok(())
    }

    pub fn curve(&self) -> CcdfCurve {
        let n = self.n.max(1) as f64;
        CcdfCurve {
            edges: self.edges.clone(),
            probs: self.exceed.iter().map(|&c| c as f64 / n).collect(),
            n_samples: self.n,
        }
    }
}

pub fn ccdf(papr_db: &[f64], edges: &[f64]) -> CcdfCurve {
    let mut acc = CcdfAccumulator::new(edges.to_vec());
    acc.extend(papr_db);
    acc.curve()
}

/// Default readout grid: 0.01 dB steps from 0 to 14 dB.
pub fn readout_edges() -> Vec<f64> {
    db_grid(0.0, 14.0, 0.01)
}

impl CcdfCurve {
    /// PAPR (dB) at which the curve crosses probability `p`, interpolated
    /// linearly in log-probability between the bracketing edges.
    pub fn level(&self, p: f64) -> Result<f64> {
        ccdf_level(self, p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_db,ccdf\n");
        for (e, p) in self.edges.iter().zip(&self.probs) {
            let _ = writeln!(out, "{e},{p}");
        }
        out
    }
}

pub fn ccdf_level(curve: &CcdfCurve, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(FdssError::Input(format!("CCDF level {p} outside (0, 1)")));
    }
    if (curve.n_samples as f64) * p < 1.0 {
        return Err(FdssError::InsufficientSamples(format!(
            "{} samples cannot resolve CCDF level {p}",
            curve.n_samples
        )));
    }
    let i = curve.probs.iter().position(|&q| q <= p).ok_or_else(|| {
        FdssError::InsufficientData(format!("CCDF stays above {p} over the whole grid"))
    })?;
    if i == 0 {
        return Err(FdssError::InsufficientData(format!(
            "CCDF is already below {p} at the first edge"
        )));
    }
    let (e0, e1) = (curve.edges[i - 1], curve.edges[i]);
    let (q0, q1) = (curve.probs[i - 1], curve.probs[i]);
    let frac = if q1 > 0.0 {
        (q0.ln() - p.ln()) / (q0.ln() - q1.ln())
    } else {
        (q0 - p) / (q0 - q1)
    };
    Ok(e0 + frac * (e1 - e0))
}

/// `level(baseline) - level(candidate)`: positive when the candidate has lower PAPR.
pub fn papr_gain_db(baseline: &CcdfCurve, candidate: &CcdfCurve, p: f64) -> Result<f64> {
    Ok(ccdf_level(baseline, p)? - ccdf_level(candidate, p)?)
}

/// SFM in dB over the mid-band `[2·n_se, n_sc - 2·n_se)` (0-based).
pub fn spectral_flatness(taps: &FilterTaps, cfg: &SystemConfig) -> Result<f64> {
    check_len(cfg.n_sc(), taps.len())?;
    let lo = 2 * cfg.n_se;
    let hi = cfg.n_sc() - 2 * cfg.n_se;
    Ok(sfm_db(&taps[lo..hi]))
}

/// Geometric over arithmetic mean, in dB, computed in the log domain.
pub fn sfm_db(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    if values.iter().any(|&v| v <= 0.0) {
        return SFM_FLOOR_DB;
    }
    if values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let n = values.len() as f64;
    let log_gm = values.iter().map(|v| v.ln()).sum::<f64>() / n;
    let am = values.iter().sum::<f64>() / n;
    let sfm = (log_gm - am.ln()).exp().min(1.0);
    (10.0 * sfm.log10()).max(SFM_FLOOR_DB)
}

/// Hamming distance between index vectors.
pub fn symbol_errors(s: &[usize], s_hat: &[usize]) -> Result<u64> {
    check_len(s.len(), s_hat.len())?;
    Ok(s.iter().zip(s_hat).filter(|(a, b)| a != b).count() as u64)
}

pub fn ser(s: &[usize], s_hat: &[usize]) -> Result<f64> {
    if s.is_empty() {
        return Err(FdssError::Input("empty symbol vector".into()));
    }
    Ok(symbol_errors(s, s_hat)? as f64 / s.len() as f64)
}

/// Spectral-extension overhead in both bookkeeping conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    /// `2·n_se / n_data`.
    pub ebw: f64,
    /// `2·n_se / n_sc`.
    pub er: f64,
}

pub fn dims(cfg: &SystemConfig) -> Dims {
    let two_se = 2.0 * cfg.n_se as f64;
    Dims {
        ebw: two_se / cfg.n_data as f64,
        er: two_se / cfg.n_sc() as f64,
    }
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact Gray-QPSK symbol error rate over AWGN at Es/N0 = `snr_db`.
pub fn qpsk_ser(snr_db: f64) -> f64 {
    let q = q_function(10f64.powf(snr_db / 20.0));
    2.0 * q - q * q
}

/// Inverse of [`qpsk_ser`] by bisection.
pub fn qpsk_snr_for_ser(target: f64) -> f64 {
    let (mut lo, mut hi) = (-20.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qpsk_ser(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// SNR penalty (dB) of a filter under MRC normalization relative to an
/// ISI-free filter of the same energy: `10·log10(mean(1/g)·mean(g))` over
/// the combined gains `g`. With MRC every data bin is unbiased, so the only
/// penalty is the unequal noise enhancement across bins.
pub fn mrc_snr_penalty_db(taps: &FilterTaps, cfg: &SystemConfig) -> Result<f64> {
    let g = combined_gain(taps, cfg, NormMode::Mrc)?;
    let n = g.len() as f64;
    let inv = g.iter().map(|v| 1.0 / v).sum::<f64>() / n;
    let mean = g.iter().sum::<f64>() / n;
    Ok(10.0 * (inv * mean).log10())
}

/// Symbol error rate versus SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub snr_db: Vec<f64>,
    pub ser: Vec<f64>,
    pub n_blocks: Vec<u64>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,ser,n_blocks\n");
        for ((s, e), n) in self.snr_db.iter().zip(&self.ser).zip(&self.n_blocks) {
            let _ = writeln!(out, "{s},{e},{n}");
        }
        out
    }

    /// SNR at which the SER curve crosses `target`, log-linear in SER.
    pub fn snr_at(&self, target: f64) -> Result<f64> {
        snr_at_ser(&self.snr_db, &self.ser, target)
    }
}

pub fn snr_at_ser(snr_db: &[f64], ser: &[f64], target: f64) -> Result<f64> {
    check_len(snr_db.len(), ser.len())?;
    if !(target > 0.0) {
        return Err(FdssError::Input("target SER must be positive".into()));
    }
    for i in 0..snr_db.len().saturating_sub(1) {
        let (a, b) = (ser[i], ser[i + 1]);
        if a >= target && b <= target && a > b {
            if b <= 0.0 {
                let t = (a - target) / (a - b);
                return Ok(snr_db[i] + t * (snr_db[i + 1] - snr_db[i]));
            }
            let t = (a.ln() - target.ln()) / (a.ln() - b.ln());
            return Ok(snr_db[i] + t * (snr_db[i + 1] - snr_db[i]));
        }
    }
    Err(FdssError::InsufficientData(format!(
        "SER curve never crosses {target} on the measured grid"
    )))
}

/// Extra SNR the candidate needs to reach `target` compared with the baseline.
pub fn snr_loss_db(baseline: &SweepResult, candidate: &SweepResult, target: f64) -> Result<f64> {
    Ok(candidate.snr_at(target)? - baseline.snr_at(target)?)
}
