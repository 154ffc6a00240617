//! DFT-s-OFDM transmit/receive chain with spectral extension and FDSS.
//!
//! Transmitter: symbol mapping, unitary DFT spreading, symmetric spectral
//! extension, FDSS weighting and a unitary IFFT with the occupied block
//! centred on DC. Receiver: unitary FFT, matched FDSS filter, extension
//! combining, per-bin normalization, IDFT despreading and hard decisions.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, FdssError, Result};
use crate::filters::FilterTaps;

/// How combined extension bins are normalized at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// Divide by the sum of squared taps feeding each bin (unbiased).
    #[default]
    Mrc,
    /// Divide by the squared sum of taps, as printed for the reference receiver.
    Literal,
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormMode::Mrc => f.write_str("mrc"),
            NormMode::Literal => f.write_str("literal"),
        }
    }
}

fn default_mod_order() -> usize {
    4
}

/// Dimensions and global settings of one link configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_data: usize,
    pub n_se: usize,
    pub n_fft: usize,
    #[serde(default = "default_mod_order")]
    pub mod_order: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub norm_mode: NormMode,
}

impl SystemConfig {
    pub fn new(n_data: usize, n_se: usize, n_fft: usize) -> Result<Self> {
        let cfg = SystemConfig {
            n_data,
            n_se,
            n_fft,
            mod_order: 4,
            seed: 0,
            norm_mode: NormMode::Mrc,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 32 PRBs after extension: 336 data subcarriers, 24 per side, 1024-point FFT.
    pub fn reference() -> Self {
        SystemConfig::new(336, 24, 1024).expect("reference config is valid")
    }

    /// Wide-extension variant holding 384 occupied subcarriers with 48 per side.
    pub fn wide_extension() -> Self {
        SystemConfig::new(288, 48, 1024).expect("wide config is valid")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_norm_mode(mut self, mode: NormMode) -> Self {
        self.norm_mode = mode;
        self
    }

    pub fn n_sc(&self) -> usize {
        self.n_data + 2 * self.n_se
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_data == 0 {
            return Err(FdssError::Config("n_data must be positive".into()));
        }
        if self.n_se > self.n_data {
            return Err(FdssError::Config(format!(
                "n_se ({}) exceeds n_data ({})",
                self.n_se, self.n_data
            )));
        }
        if self.n_sc() > self.n_fft {
            return Err(FdssError::Config(format!(
                "n_sc ({}) exceeds n_fft ({})",
                self.n_sc(),
                self.n_fft
            )));
        }
        if 4 * self.n_se > self.n_sc() {
            return Err(FdssError::Config(format!(
                "4*n_se ({}) exceeds n_sc ({})",
                4 * self.n_se,
                self.n_sc()
            )));
        }
        if self.mod_order != 4 {
            return Err(FdssError::Config(format!(
                "mod_order {} unsupported; only QPSK (4) is implemented",
                self.mod_order
            )));
        }
        Ok(())
    }
}

macro_rules! vec_newtype {
    ($(#[$m:meta])* $name:ident, $elem:ty) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub Vec<$elem>);

        impl Deref for $name {
            type Target = [$elem];
            fn deref(&self) -> &[$elem] {
                &self.0
            }
        }

        impl From<Vec<$elem>> for $name {
            fn from(v: Vec<$elem>) -> Self {
                $name(v)
            }
        }
    };
}

vec_newtype!(
    /// Constellation indices, 1-based (`1..=M`).
    SymbolIndices,
    usize
);
vec_newtype!(
    /// Time-domain modulation symbols.
    ModSymbols,
    Complex64
);
vec_newtype!(
    /// Frequency-domain symbols at any stage between DFT and IDFT.
    FreqSymbols,
    Complex64
);
vec_newtype!(
    /// One OFDM block of `n_fft` time samples.
    Waveform,
    Complex64
);

/// AWGN level for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Variance per complex sample.
    pub sigma2: f64,
    pub snr_db: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            sigma2: 0.0,
            snr_db: f64::INFINITY,
        }
    }
}

/// Gray-mapped QPSK points, indexed by symbol index - 1.
pub const QPSK: [Complex64; 4] = [
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// Outputs of one block through the full chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    /// Transmitted waveform (for PAPR).
    pub tx: Waveform,
    /// Transmitted modulation symbols.
    pub x: ModSymbols,
    /// Equalized symbols after despreading (for MSE).
    pub y: ModSymbols,
    pub s_hat: SymbolIndices,
}

/// Every intermediate vector of one block, for inspection in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub x: ModSymbols,
    pub freq: FreqSymbols,
    pub extended: FreqSymbols,
    pub shaped: FreqSymbols,
    pub tx: Waveform,
    pub rx: Waveform,
    pub rx_band: FreqSymbols,
    pub matched: FreqSymbols,
    pub combined: FreqSymbols,
    pub equalized: FreqSymbols,
    pub y: ModSymbols,
    pub s_hat: SymbolIndices,
}

impl ChainTrace {
    /// Looks up a frequency-domain stage by its block-diagram symbol
    /// (`X`, `X_ext`, `X_tilde`, `Y_tilde`, `R`, `T`, `Y_hat`).
    pub fn stage(&self, name: &str) -> Option<&[Complex64]> {
        match name {
            "x" => Some(&self.x),
            "X" => Some(&self.freq),
            "X_ext" => Some(&self.extended),
            "X_tilde" => Some(&self.shaped),
            "x_tilde" => Some(&self.tx),
            "y_tilde" => Some(&self.rx),
            "Y_tilde" => Some(&self.rx_band),
            "R" => Some(&self.matched),
            "T" => Some(&self.combined),
            "Y_hat" => Some(&self.equalized),
            "y" => Some(&self.y),
            _ => None,
        }
    }
}

/// Planned transforms for one [`SystemConfig`]. Cheap to clone and share
/// between threads.
#[derive(Clone)]
pub struct Chain {
    cfg: SystemConfig,
    dft: Arc<dyn Fft<f64>>,
    idft: Arc<dyn Fft<f64>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    bins: Vec<usize>,
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chain").field("cfg", &self.cfg).finish()
    }
}

impl Chain {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        let n_sc = cfg.n_sc();
        let half = (n_sc / 2) as isize;
        let n_fft = cfg.n_fft as isize;
        let bins = (0..n_sc as isize)
            .map(|k| (k - half).rem_euclid(n_fft) as usize)
            .collect();
        Ok(Chain {
            cfg,
            dft: planner.plan_fft_forward(cfg.n_data),
            idft: planner.plan_fft_inverse(cfg.n_data),
            fft: planner.plan_fft_forward(cfg.n_fft),
            ifft: planner.plan_fft_inverse(cfg.n_fft),
            bins,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    /// FFT bin carrying each occupied subcarrier, in subcarrier order.
    pub fn occupied_bins(&self) -> &[usize] {
        &self.bins
    }

    /// Draws `n_data` equiprobable indices.
    pub fn random_symbols<R: Rng + ?Sized>(&self, rng: &mut R) -> SymbolIndices {
        let m = self.cfg.mod_order;
        SymbolIndices((0..self.cfg.n_data).map(|_| rng.random_range(1..=m)).collect())
    }

    pub fn map_symbols(&self, s: &SymbolIndices) -> Result<ModSymbols> {
        check_len(self.cfg.n_data, s.len())?;
        map_qpsk(s)
    }

    pub fn dft_spread(&self, x: &ModSymbols) -> FreqSymbols {
        FreqSymbols(unitary(&self.dft, &x.0))
    }

    pub fn idft_despread(&self, y_hat: &FreqSymbols) -> ModSymbols {
        ModSymbols(unitary(&self.idft, &y_hat.0))
    }

    pub fn spectral_extend(&self, freq: &FreqSymbols) -> Result<FreqSymbols> {
        spectral_extend(freq, self.cfg.n_se)
    }

    /// Unitary IFFT with the occupied block centred on DC.
    pub fn ofdm_modulate(&self, shaped: &FreqSymbols) -> Result<Waveform> {
        check_len(self.cfg.n_sc(), shaped.len())?;
        let mut grid = vec![Complex64::new(0.0, 0.0); self.cfg.n_fft];
        for (&bin, &v) in self.bins.iter().zip(shaped.iter()) {
            grid[bin] = v;
        }
        Ok(self.grid_to_waveform(&grid))
    }

    /// Unitary IFFT of a full `n_fft` grid. Exposed so tests can inject
    /// energy into unoccupied bins.
    pub fn grid_to_waveform(&self, grid: &[Complex64]) -> Waveform {
        Waveform(unitary(&self.ifft, grid))
    }

    /// Unitary FFT keeping only the occupied bins.
    pub fn receiver_front(&self, rx: &Waveform) -> Result<FreqSymbols> {
        check_len(self.cfg.n_fft, rx.len())?;
        let spectrum = unitary(&self.fft, &rx.0);
        Ok(FreqSymbols(self.bins.iter().map(|&b| spectrum[b]).collect()))
    }

    /// Per-complex-sample noise variance for a nominal Es/N0.
    ///
    /// With unit-energy taps the combined gain of an ISI-free filter is
    /// `1/n_data` on every bin, so the post-normalization noise per symbol is
    /// `sigma2 * n_data`. Setting it to `1/snr` gives `sigma2 = 1/(n_data*snr)`.
    pub fn calibrate_noise(&self, snr_db: f64) -> NoiseModel {
        calibrate_noise(snr_db, &self.cfg)
    }

    pub fn se_combine(&self, matched: &FreqSymbols) -> Result<FreqSymbols> {
        check_len(self.cfg.n_sc(), matched.len())?;
        Ok(FreqSymbols(se_combine(&matched.0, &self.cfg)))
    }

    pub fn combined_gain(&self, taps: &FilterTaps) -> Result<Vec<f64>> {
        combined_gain(taps, &self.cfg, self.cfg.norm_mode)
    }

    /// Hard decisions on equalized symbols.
    pub fn demod(&self, y: &ModSymbols) -> SymbolIndices {
        demod_qpsk(y)
    }

    /// Runs one block end to end.
    pub fn run_chain<R: Rng + ?Sized>(
        &self,
        taps: &FilterTaps,
        s: &SymbolIndices,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Result<ChainOutput> {
        let t = self.trace(taps, s, noise, rng)?;
        Ok(ChainOutput {
            tx: t.tx,
            x: t.x,
            y: t.y,
            s_hat: t.s_hat,
        })
    }

    /// Same as [`Chain::run_chain`] but keeps every intermediate vector.
    pub fn trace<R: Rng + ?Sized>(
        &self,
        taps: &FilterTaps,
        s: &SymbolIndices,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Result<ChainTrace> {
        check_len(self.cfg.n_sc(), taps.len())?;
        let x = self.map_symbols(s)?;
        let freq = self.dft_spread(&x);
        let extended = self.spectral_extend(&freq)?;
        let shaped = apply_fdss(&extended, taps)?;
        let tx = self.ofdm_modulate(&shaped)?;
        let rx = add_awgn(&tx, noise, rng);
        let rx_band = self.receiver_front(&rx)?;
        let matched = matched_filter(&rx_band, taps)?;
        let combined = self.se_combine(&matched)?;
        let gains = self.combined_gain(taps)?;
        let equalized = normalize(&combined, &gains)?;
        let y = self.idft_despread(&equalized);
        let s_hat = self.demod(&y);
        Ok(ChainTrace {
            x,
            freq,
            extended,
            shaped,
            tx,
            rx,
            rx_band,
            matched,
            combined,
            equalized,
            y,
            s_hat,
        })
    }

    /// Transmit side only, for PAPR campaigns.
    pub fn transmit(&self, taps: &FilterTaps, s: &SymbolIndices) -> Result<Waveform> {
        check_len(self.cfg.n_sc(), taps.len())?;
        let x = self.map_symbols(s)?;
        let extended = self.spectral_extend(&self.dft_spread(&x))?;
        self.ofdm_modulate(&apply_fdss(&extended, taps)?)
    }
}

fn unitary(plan: &Arc<dyn Fft<f64>>, input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    plan.process(&mut buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

pub fn map_qpsk(s: &SymbolIndices) -> Result<ModSymbols> {
    s.iter()
        .map(|&i| {
            if (1..=4).contains(&i) {
                Ok(QPSK[i - 1])
            } else {
                Err(FdssError::Input(format!("symbol index {i} outside 1..=4")))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(ModSymbols)
}

/// Minimum-distance decisions; exact ties go to the lowest index.
pub fn demod_qpsk(y: &ModSymbols) -> SymbolIndices {
    SymbolIndices(
        y.iter()
            .map(|v| {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, p) in QPSK.iter().enumerate() {
                    let d = (v - p).norm_sqr();
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                best + 1
            })
            .collect(),
    )
}

/// `[X_{n-se+1..n}, X_{1..n}, X_{1..se}]`.
pub fn spectral_extend(freq: &[Complex64], n_se: usize) -> Result<FreqSymbols> {
    let n = freq.len();
    if n_se > n {
        return Err(FdssError::Config(format!(
            "n_se ({n_se}) exceeds n_data ({n})"
        )));
    }
    let mut out = Vec::with_capacity(n + 2 * n_se);
    out.extend_from_slice(&freq[n - n_se..]);
    out.extend_from_slice(freq);
    out.extend_from_slice(&freq[..n_se]);
    Ok(FreqSymbols(out))
}

pub fn apply_fdss(extended: &[Complex64], taps: &FilterTaps) -> Result<FreqSymbols> {
    check_len(extended.len(), taps.len())?;
    Ok(FreqSymbols(
        extended.iter().zip(taps.iter()).map(|(x, &f)| x * f).collect(),
    ))
}

/// `R = Y ⊙ F*`. Taps are real, so conjugation is the identity here.
pub fn matched_filter(rx_band: &[Complex64], taps: &FilterTaps) -> Result<FreqSymbols> {
    check_len(rx_band.len(), taps.len())?;
    Ok(FreqSymbols(
        rx_band
            .iter()
            .zip(taps.iter())
            .map(|(y, &f)| y * Complex64::new(f, 0.0).conj())
            .collect(),
    ))
}

/// Index of the replica tap folded onto data bin `j` (0-based), if any.
#[inline]
pub(crate) fn partner_index(j: usize, cfg: &SystemConfig) -> Option<usize> {
    let (n_se, n_data, n_sc) = (cfg.n_se, cfg.n_data, cfg.n_sc());
    if j < n_se {
        Some(n_sc - n_se + j)
    } else if j >= n_data - n_se {
        Some(j - (n_data - n_se))
    } else {
        None
    }
}

pub(crate) fn se_combine(r: &[Complex64], cfg: &SystemConfig) -> Vec<Complex64> {
    (0..cfg.n_data)
        .map(|j| {
            let main = r[cfg.n_se + j];
            match partner_index(j, cfg) {
                Some(p) => main + r[p],
                None => main,
            }
        })
        .collect()
}

/// Per-bin receiver gain after matched filtering and combining.
pub fn combined_gain(taps: &FilterTaps, cfg: &SystemConfig, mode: NormMode) -> Result<Vec<f64>> {
    check_len(cfg.n_sc(), taps.len())?;
    let f = taps.values();
    let gains: Vec<f64> = (0..cfg.n_data)
        .map(|j| {
            let a = f[cfg.n_se + j];
            match (partner_index(j, cfg), mode) {
                (None, _) => a * a,
                (Some(p), NormMode::Mrc) => a * a + f[p] * f[p],
                (Some(p), NormMode::Literal) => (a + f[p]) * (a + f[p]),
            }
        })
        .collect();
    if let Some(j) = gains.iter().position(|&g| g <= 0.0 || !g.is_finite()) {
        return Err(FdssError::DegenerateFilter(format!(
            "combined gain of data bin {} is zero",
            j + 1
        )));
    }
    Ok(gains)
}

pub fn normalize(combined: &[Complex64], gains: &[f64]) -> Result<FreqSymbols> {
    check_len(combined.len(), gains.len())?;
    if gains.iter().any(|&g| g <= 0.0) {
        return Err(FdssError::DegenerateFilter("non-positive gain".into()));
    }
    Ok(FreqSymbols(
        combined.iter().zip(gains).map(|(t, &g)| t / g).collect(),
    ))
}

pub fn calibrate_noise(snr_db: f64, cfg: &SystemConfig) -> NoiseModel {
    let snr = 10f64.powf(snr_db / 10.0);
    NoiseModel {
        sigma2: 1.0 / (cfg.n_data as f64 * snr),
        snr_db,
    }
}

/// Circular complex Gaussian samples with variance `sigma2`.
pub fn noise_samples<R: Rng + ?Sized>(n: usize, sigma2: f64, rng: &mut R) -> Vec<Complex64> {
    let sd = (sigma2 / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}

/// Adds AWGN. A zero variance returns the input without drawing from `rng`.
pub fn add_awgn<R: Rng + ?Sized>(tx: &Waveform, noise: &NoiseModel, rng: &mut R) -> Waveform {
    if noise.sigma2 <= 0.0 {
        return tx.clone();
    }
    let z = noise_samples(tx.len(), noise.sigma2, rng);
    Waveform(tx.iter().zip(z).map(|(a, b)| a + b).collect())
}
