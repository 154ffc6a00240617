//! Stochastic gradient training of polynomial FDSS filters.
//!
//! The loss is `E + P + γ·S` with
//! `E` the mean squared symbol error per block,
//! `P = λ1·mean(PAPR_dB) + λ2·AUCCDF` over the batch and
//! `S` the mid-band flatness penalty. Gradients are central finite
//! differences over the active polynomial coefficients; every perturbed
//! evaluation replays the same symbols and noise (common random numbers),
//! so the difference only sees the change in the filter.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{
    combined_gain, noise_samples, normalize, se_combine, Chain, FreqSymbols, NoiseModel, SystemConfig,
    Waveform,
};
use crate::error::{FdssError, Result};
use crate::filters::{eval_poly_filter, fit_model, rrc_taps, Design, FilterTaps, PolyFilterModel, Rectify};
use crate::metrics::{auccdf_smooth, papr_db, qpsk_snr_for_ser, spectral_flatness, AuccdfConfig};
use crate::rng::{tags, StreamSeed};

/// Tradeoff multipliers. `λ` of the composite loss is folded into `λ1`, `λ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
}

impl LossWeights {
    pub fn new(lambda1: f64, lambda2: f64, gamma: f64) -> Result<Self> {
        let w = LossWeights {
            lambda1,
            lambda2,
            gamma,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn zero() -> Self {
        LossWeights {
            lambda1: 0.0,
            lambda2: 0.0,
            gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2), ("gamma", self.gamma)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(FdssError::Config(format!("{name} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

/// Sign convention of the flatness term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatnessSign {
    /// `S = -SFM_dB`: a positive `γ` penalizes a non-flat mid-band.
    #[default]
    Penalize,
    /// `S = SFM_dB`, the printed form.
    Literal,
}

fn default_degree() -> usize {
    10
}
fn default_batch() -> usize {
    256
}
fn default_steps() -> usize {
    400
}
fn default_lr() -> f64 {
    1e-2
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}
fn default_fd_step() -> f64 {
    1e-3
}
fn default_valid_blocks() -> usize {
    1024
}
fn default_eval_every() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_batch")]
    pub batch_blocks: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Relative finite-difference step.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Training SNR; `None` picks the SNR where an ISI-free filter reaches SER 1e-2.
    #[serde(default)]
    pub train_snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub auccdf: AuccdfConfig,
    #[serde(default)]
    pub flatness_sign: FlatnessSign,
    /// Fixed held-out batch used to pick the best iterate.
    #[serde(default = "default_valid_blocks")]
    pub valid_blocks: usize,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            degree: default_degree(),
            batch_blocks: default_batch(),
            steps: default_steps(),
            lr: default_lr(),
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
            fd_step: default_fd_step(),
            train_snr_db: None,
            seed: 0,
            auccdf: AuccdfConfig::default(),
            flatness_sign: FlatnessSign::Penalize,
            valid_blocks: default_valid_blocks(),
            eval_every: default_eval_every(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_blocks == 0 || self.valid_blocks == 0 {
            return Err(FdssError::Config("batch sizes must be at least 1".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(FdssError::Config("fd_step must be positive".into()));
        }
        if !(self.lr > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(FdssError::Config("invalid Adam hyperparameters".into()));
        }
        if self.eval_every == 0 {
            return Err(FdssError::Config("eval_every must be at least 1".into()));
        }
        self.auccdf.validate()
    }

    pub fn snr_db(&self) -> f64 {
        self.train_snr_db.unwrap_or_else(|| qpsk_snr_for_ser(1e-2))
    }
}

/// Loss components of one batch. Invariant: `total = mse + papr + gamma * flatness`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub total: f64,
    pub mse: f64,
    pub papr: f64,
    pub flatness: f64,
}

impl LossParts {
    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.mse.is_finite() && self.papr.is_finite() && self.flatness.is_finite()
    }
}

/// Combines per-block outputs into the composite loss.
pub fn loss(
    papr_db: &[f64],
    sq_err: &[f64],
    taps: &FilterTaps,
    cfg: &SystemConfig,
    weights: &LossWeights,
    acfg: &AuccdfConfig,
    sign: FlatnessSign,
) -> Result<LossParts> {
    if papr_db.is_empty() || papr_db.len() != sq_err.len() {
        return Err(FdssError::Input("loss needs one PAPR and one error per block".into()));
    }
    let b = papr_db.len() as f64;
    let mse = sq_err.iter().sum::<f64>() / b;
    let mean_papr = papr_db.iter().sum::<f64>() / b;
    let mut papr = weights.lambda1 * mean_papr;
    if weights.lambda2 != 0.0 {
        papr += weights.lambda2 * auccdf_smooth(papr_db, acfg);
    }
    let sfm = spectral_flatness(taps, cfg)?;
    let flatness = match sign {
        FlatnessSign::Penalize => -sfm,
        FlatnessSign::Literal => sfm,
    };
    Ok(LossParts {
        total: mse + papr + weights.gamma * flatness,
        mse,
        papr,
        flatness,
    })
}

/// Frozen symbols and receiver-side noise for a set of blocks.
///
/// The receiver is linear, so the in-band noise after the FFT is stored
/// once and added to each candidate filter's output.
#[derive(Debug, Clone)]
pub struct Batch {
    x: Vec<Vec<Complex64>>,
    extended: Vec<Vec<Complex64>>,
    noise: Vec<Vec<Complex64>>,
}

impl Batch {
    /// Block `b` uses stream `b` of `seed`, consumed in the same order as
    /// [`Chain::run_chain`]: symbols first, then noise.
    pub fn draw(chain: &Chain, noise: &NoiseModel, seed: StreamSeed, n_blocks: usize) -> Result<Self> {
        let n_fft = chain.config().n_fft;
        let blocks: Vec<_> = (0..n_blocks as u64)
            .into_par_iter()
            .map(|b| -> Result<_> {
                let mut rng = seed.block(b);
                let s = chain.random_symbols(&mut rng);
                let x = chain.map_symbols(&s)?;
                let ext = chain.spectral_extend(&chain.dft_spread(&x))?;
                let z = if noise.sigma2 > 0.0 {
                    let w = Waveform(noise_samples(n_fft, noise.sigma2, &mut rng));
                    chain.receiver_front(&w)?.0
                } else {
                    Vec::new()
                };
                Ok((x.0, ext.0, z))
            })
            .collect::<Result<_>>()?;
        let mut batch = Batch {
            x: Vec::with_capacity(n_blocks),
            extended: Vec::with_capacity(n_blocks),
            noise: Vec::with_capacity(n_blocks),
        };
        for (x, e, z) in blocks {
            batch.x.push(x);
            batch.extended.push(e);
            batch.noise.push(z);
        }
        Ok(batch)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Per-block PAPR (dB) and squared symbol error `||x - y||²`.
    pub fn evaluate(&self, chain: &Chain, taps: &FilterTaps) -> Result<(Vec<f64>, Vec<f64>)> {
        let cfg = chain.config();
        let gains = combined_gain(taps, cfg, cfg.norm_mode)?;
        let mut paprs = Vec::with_capacity(self.len());
        let mut errs = Vec::with_capacity(self.len());
        for b in 0..self.len() {
            let shaped = FreqSymbols(
                self.extended[b]
                    .iter()
                    .zip(taps.iter())
                    .map(|(x, &f)| x * f)
                    .collect(),
            );
            let tx = chain.ofdm_modulate(&shaped)?;
            paprs.push(papr_db(&tx)?);

            let z = &self.noise[b];
            let matched: Vec<Complex64> = shaped
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let y = if z.is_empty() { v } else { v + z[k] };
                    y * taps[k]
                })
                .collect();
            let equalized = normalize(&se_combine(&matched, cfg), &gains)?;
            let y = chain.idft_despread(&equalized);
            errs.push(
                self.x[b]
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum(),
            );
        }
        Ok((paprs, errs))
    }
}

/// Everything needed to score a coefficient vector on a batch.
pub struct Objective<'a> {
    pub chain: &'a Chain,
    pub design: Design,
    pub e_fdss: f64,
    pub weights: LossWeights,
    pub auccdf: &'a AuccdfConfig,
    pub sign: FlatnessSign,
}

impl Objective<'_> {
    /// Taps as seen by the loss (smooth rectification).
    pub fn taps(&self, coeffs: &[f64]) -> Result<FilterTaps> {
        let model = PolyFilterModel {
            design: self.design,
            coeffs: coeffs.to_vec(),
            e_fdss: self.e_fdss,
        };
        eval_poly_filter(&model, self.chain.config(), Rectify::Smooth)
    }

    pub fn loss(&self, coeffs: &[f64], batch: &Batch) -> Result<LossParts> {
        let taps = self.taps(coeffs)?;
        let (paprs, errs) = batch.evaluate(self.chain, &taps)?;
        loss(
            &paprs,
            &errs,
            &taps,
            self.chain.config(),
            &self.weights,
            self.auccdf,
            self.sign,
        )
    }
}

/// Central finite-difference gradient over the active coefficients, each
/// perturbation evaluated on the same batch. Inactive coefficients get 0.
pub fn grad_estimate(obj: &Objective<'_>, coeffs: &[f64], batch: &Batch, fd_step: f64) -> Result<Vec<f64>> {
    let active = crate::filters::active_indices(obj.design, coeffs.len() - 1);
    let evals: Vec<(usize, f64)> = active
        .par_iter()
        .flat_map_iter(|&d| [(d, 1.0), (d, -1.0)])
        .map(|(d, dir)| -> Result<(usize, f64)> {
            let h = fd_step * coeffs[d].abs().max(1.0);
            let mut c = coeffs.to_vec();
            c[d] += dir * h;
            let l = obj.loss(&c, batch).map_err(|_| FdssError::Gradient { index: d })?;
            if !l.total.is_finite() {
                return Err(FdssError::Gradient { index: d });
            }
            Ok((d, dir * l.total))
        })
        .collect::<Result<_>>()?;
    let mut grad = vec![0.0; coeffs.len()];
    for (d, signed) in evals {
        let h = fd_step * coeffs[d].abs().max(1.0);
        grad[d] += signed / (2.0 * h);
    }
    Ok(grad)
}

/// Bias-corrected Adam moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    /// Applies one update to `params` in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64, beta1: f64, beta2: f64, eps: f64) {
        self.t += 1;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    #[serde(flatten)]
    pub loss: LossParts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub design: Design,
    pub weights: LossWeights,
    pub seed: u64,
    pub train_snr_db: f64,
    /// Training-batch loss before each update.
    pub history: Vec<StepRecord>,
    /// Held-out loss of the starting point.
    pub initial_loss: LossParts,
    /// Held-out loss of the returned model.
    pub best_loss: LossParts,
    /// Number of updates applied to reach the returned model.
    pub best_step: usize,
    pub initial_model: PolyFilterModel,
    pub model: PolyFilterModel,
    pub diverged_at: Option<usize>,
    pub wall_clock_s: f64,
}

impl TrainReport {
    pub fn history_csv(&self) -> String {
        let mut out = String::from("step,E,P,S,total\n");
        for r in &self.history {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.step, r.loss.mse, r.loss.papr, r.loss.flatness, r.loss.total
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Trains `design` starting from a polynomial fit of the RRC baseline.
pub fn train(design: Design, cfg: &SystemConfig, weights: &LossWeights, tcfg: &TrainConfig) -> Result<TrainReport> {
    let init = fit_model(design, tcfg.degree, &rrc_taps(cfg)?, cfg)?;
    train_from(init, cfg, weights, tcfg)
}

/// Trains from an explicit starting model.
pub fn train_from(
    init: PolyFilterModel,
    cfg: &SystemConfig,
    weights: &LossWeights,
    tcfg: &TrainConfig,
) -> Result<TrainReport> {
    weights.validate()?;
    tcfg.validate()?;
    init.validate()?;
    let started = Instant::now();
    let chain = Chain::new(*cfg)?;
    let snr_db = tcfg.snr_db();
    let noise = chain.calibrate_noise(snr_db);
    let obj = Objective {
        chain: &chain,
        design: init.design,
        e_fdss: init.e_fdss,
        weights: *weights,
        auccdf: &tcfg.auccdf,
        sign: tcfg.flatness_sign,
    };
    let root = StreamSeed::new(tcfg.seed);
    let valid = Batch::draw(&chain, &noise, root.derive(tags::TEST), tcfg.valid_blocks)?;
    let train_seeds = root.derive(tags::TRAIN);

    let initial_loss = obj.loss(&init.coeffs, &valid)?;
    let mut best = (initial_loss, init.coeffs.clone(), 0usize);
    let mut coeffs = init.coeffs.clone();
    let mut adam = AdamState::new(coeffs.len());
    let mut history = Vec::with_capacity(tcfg.steps);
    let mut diverged_at = None;

    for step in 0..tcfg.steps {
        let batch = Batch::draw(&chain, &noise, train_seeds.derive(step as u64), tcfg.batch_blocks)?;
        let parts = obj.loss(&coeffs, &batch);
        let parts = match parts {
            Ok(p) if p.is_finite() => p,
            _ => {
                diverged_at = Some(step);
                break;
            }
        };
        history.push(StepRecord { step, loss: parts });
        let grad = match grad_estimate(&obj, &coeffs, &batch, tcfg.fd_step) {
            Ok(g) => g,
            Err(_) => {
                diverged_at = Some(step);
                break;
            }
        };
        adam.step(&mut coeffs, &grad, tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.eps);
        if coeffs.iter().any(|c| !c.is_finite()) {
            diverged_at = Some(step);
            break;
        }
        let done = step + 1;
        if done % tcfg.eval_every == 0 || done == tcfg.steps {
            if let Ok(v) = obj.loss(&coeffs, &valid) {
                if v.total < best.0.total {
                    best = (v, coeffs.clone(), done);
                }
            }
        }
    }

    let model = PolyFilterModel::new(init.design, best.1, init.e_fdss)?;
    Ok(TrainReport {
        design: init.design,
        weights: *weights,
        seed: tcfg.seed,
        train_snr_db: snr_db,
        history,
        initial_loss,
        best_loss: best.0,
        best_step: best.2,
        initial_model: init,
        model,
        diverged_at,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{check_zero_isi, passband_constant};

    fn small_cfg() -> SystemConfig {
        SystemConfig::new(48, 6, 128).unwrap()
    }

    #[test]
    fn weights_must_be_non_negative() {
        assert!(LossWeights::new(1.0, 0.0, 0.0).is_ok());
        assert!(LossWeights::new(-1.0, 0.0, 0.0).is_err());
        assert!(LossWeights::new(0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut s = AdamState::new(3);
        let mut p = vec![1.0, -2.0, 0.5];
        for _ in 0..50 {
            s.step(&mut p, &[0.0; 3], 0.1, 0.9, 0.999, 1e-8);
        }
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn adam_first_step_size() {
        // m̂ = g, v̂ = g², so the first move is lr·g/(|g| + eps).
        let mut s = AdamState::new(2);
        let mut p = vec![0.0, 0.0];
        let g = [0.3, -4.0];
        s.step(&mut p, &g, 0.01, 0.9, 0.999, 1e-8);
        for i in 0..2 {
            let expect = -0.01 * g[i] / (g[i].abs() + 1e-8);
            assert!((p[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn loss_bookkeeping() {
        let cfg = small_cfg();
        let taps = PolyFilterModel::new(Design::NonFlat, vec![1.0, 0.0, -0.9], 1.0)
            .unwrap()
            .eval(&cfg)
            .unwrap();
        let w = LossWeights::new(0.7, 0.01, 2.5).unwrap();
        let paprs = [4.0, 5.5, 6.1];
        let errs = [0.3, 0.1, 0.9];
        let acfg = AuccdfConfig::default();
        let l = loss(&paprs, &errs, &taps, &cfg, &w, &acfg, FlatnessSign::Penalize).unwrap();
        assert!((l.total - l.mse - l.papr - w.gamma * l.flatness).abs() < 1e-12);
        assert!(l.flatness > 0.0);
        let lit = loss(&paprs, &errs, &taps, &cfg, &w, &acfg, FlatnessSign::Literal).unwrap();
        assert_eq!(lit.flatness, -l.flatness);
    }

    #[test]
    fn flat_midband_has_zero_shape_term() {
        let cfg = small_cfg();
        let taps = FilterTaps::normalized(vec![1.0; cfg.n_sc()], 1.0).unwrap();
        let w = LossWeights::new(0.0, 0.0, 5.0).unwrap();
        let l = loss(&[3.0], &[0.0], &taps, &cfg, &w, &AuccdfConfig::default(), FlatnessSign::Penalize)
            .unwrap();
        assert_eq!(l.flatness, 0.0);
    }

    #[test]
    fn noiseless_zero_isi_loss_vanishes() {
        let cfg = small_cfg();
        let chain = Chain::new(cfg).unwrap();
        let batch = Batch::draw(&chain, &NoiseModel::noiseless(), StreamSeed::new(1), 32).unwrap();
        let acfg = AuccdfConfig::default();
        let obj = Objective {
            chain: &chain,
            design: Design::ZeroIsi,
            e_fdss: 1.0,
            weights: LossWeights::zero(),
            auccdf: &acfg,
            sign: FlatnessSign::Penalize,
        };
        let coeffs = vec![0.3, -0.2, 0.5, 0.0, 0.1];
        let l = obj.loss(&coeffs, &batch).unwrap();
        assert!(l.total.abs() < 1e-20, "{}", l.total);
        let g = grad_estimate(&obj, &coeffs, &batch, 1e-3).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn batch_matches_run_chain() {
        let cfg = small_cfg();
        let chain = Chain::new(cfg).unwrap();
        let taps = rrc_taps(&cfg).unwrap();
        let noise = chain.calibrate_noise(6.0);
        let seed = StreamSeed::new(9);
        let batch = Batch::draw(&chain, &noise, seed, 8).unwrap();
        let (paprs, errs) = batch.evaluate(&chain, &taps).unwrap();
        for b in 0..8u64 {
            let mut rng = seed.block(b);
            let s = chain.random_symbols(&mut rng);
            let out = chain.run_chain(&taps, &s, &noise, &mut rng).unwrap();
            let e: f64 = out.x.iter().zip(out.y.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!((paprs[b as usize] - papr_db(&out.tx).unwrap()).abs() < 1e-10);
            assert!((errs[b as usize] - e).abs() < 1e-9 * e.max(1.0));
        }
    }

    #[test]
    fn odd_coefficients_never_move() {
        let cfg = small_cfg();
        let chain = Chain::new(cfg).unwrap();
        let noise = chain.calibrate_noise(8.0);
        let batch = Batch::draw(&chain, &noise, StreamSeed::new(2), 16).unwrap();
        let acfg = AuccdfConfig::default();
        let obj = Objective {
            chain: &chain,
            design: Design::NonFlat,
            e_fdss: 1.0,
            weights: LossWeights::new(1.0, 0.01, 0.1).unwrap(),
            auccdf: &acfg,
            sign: FlatnessSign::Penalize,
        };
        let init = fit_model(Design::NonFlat, 10, &rrc_taps(&cfg).unwrap(), &cfg).unwrap();
        let g = grad_estimate(&obj, &init.coeffs, &batch, 1e-3).unwrap();
        for d in (1..=10).step_by(2) {
            assert_eq!(g[d], 0.0);
        }
        assert!(g.iter().step_by(2).any(|v| *v != 0.0));
    }

    #[test]
    fn short_training_is_deterministic_and_monotone() {
        let cfg = small_cfg();
        let tcfg = TrainConfig {
            steps: 6,
            batch_blocks: 16,
            valid_blocks: 32,
            eval_every: 2,
            seed: 5,
            ..TrainConfig::default()
        };
        let w = LossWeights::new(1.0, 0.0, 0.0).unwrap();
        let a = train(Design::ZeroIsi, &cfg, &w, &tcfg).unwrap();
        let b = train(Design::ZeroIsi, &cfg, &w, &tcfg).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.model, b.model);
        assert!(a.best_loss.total <= a.initial_loss.total);
        assert_eq!(a.history.len(), 6);
        let taps = a.model.eval(&cfg).unwrap();
        assert!(check_zero_isi(&taps, &cfg) < 1e-10);
        let c_v = passband_constant(1.0, cfg.n_data);
        assert!(taps[2 * cfg.n_se..cfg.n_sc() - 2 * cfg.n_se].iter().all(|&v| v == c_v));
        assert!(a.history_csv().starts_with("step,E,P,S,total\n0,"));
    }
}
