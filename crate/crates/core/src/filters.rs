//! FDSS filter construction.
//!
//! Filters are real, non-negative, even-symmetric tap vectors over the
//! `n_sc` occupied subcarriers. Besides the root-raised-cosine baseline, the
//! learnable filters are polynomials in a per-subcarrier support value, in one
//! of three designs:
//!
//! * `non_flat`: even polynomial over the whole band;
//! * `flat`: the support collapses to 0 over the mid-band so those taps share
//!   one value;
//! * `zero_isi`: the polynomial only drives the inner half of each transition
//!   band, the outer half is its vestigial complement and the mid-band sits at
//!   the passband constant, which makes the folded spectrum flat.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::Deref;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::{combined_gain, NormMode, SystemConfig};
use crate::error::{FdssError, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const ENERGY_TOL: f64 = 1e-9;

/// Real non-negative FDSS frequency response with its total energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterTaps {
    values: Vec<f64>,
    e_fdss: f64,
}

impl FilterTaps {
    /// Validates non-negativity, even symmetry and `Σ F² = e_fdss`.
    pub fn new(values: Vec<f64>, e_fdss: f64) -> Result<Self> {
        let taps = FilterTaps { values, e_fdss };
        taps.validate()?;
        Ok(taps)
    }

    /// Scales `values` to energy `e_fdss` and validates the result.
    pub fn normalized(mut values: Vec<f64>, e_fdss: f64) -> Result<Self> {
        let energy: f64 = values.iter().map(|v| v * v).sum();
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(FdssError::DegenerateFilter("all taps are zero".into()));
        }
        let scale = (e_fdss / energy).sqrt();
        for v in &mut values {
            *v *= scale;
        }
        FilterTaps::new(values, e_fdss)
    }

    /// Wraps arbitrary taps without checks; the energy is whatever they sum to.
    pub fn from_values_unchecked(values: Vec<f64>) -> Self {
        let e_fdss = values.iter().map(|v| v * v).sum();
        FilterTaps { values, e_fdss }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn e_fdss(&self) -> f64 {
        self.e_fdss
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.values.len();
        if n == 0 {
            return Err(FdssError::Constraint("empty filter".into()));
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(FdssError::Constraint(format!(
                "tap {} is negative or non-finite ({})",
                k + 1,
                self.values[k]
            )));
        }
        let peak = self.values.iter().cloned().fold(0.0, f64::max);
        for k in 0..n / 2 {
            let (a, b) = (self.values[k], self.values[n - 1 - k]);
            if (a - b).abs() > SYMMETRY_TOL * peak.max(1.0) {
                return Err(FdssError::Constraint(format!(
                    "taps {} and {} break even symmetry",
                    k + 1,
                    n - k
                )));
            }
        }
        let energy = self.energy();
        if (energy - self.e_fdss).abs() > ENERGY_TOL * self.e_fdss.max(1.0) {
            return Err(FdssError::Constraint(format!(
                "tap energy {energy} differs from e_fdss {}",
                self.e_fdss
            )));
        }
        Ok(())
    }
}

impl Deref for FilterTaps {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Constrained polynomial filter designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    NonFlat,
    Flat,
    ZeroIsi,
}

impl Design {
    pub fn name(&self) -> &'static str {
        match self {
            Design::NonFlat => "non_flat",
            Design::Flat => "flat",
            Design::ZeroIsi => "zero_isi",
        }
    }

    /// Only even powers are allowed for the full-band designs.
    pub fn even_only(&self) -> bool {
        !matches!(self, Design::ZeroIsi)
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Design {
    type Err = FdssError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "non_flat" | "non-flat" => Ok(Design::NonFlat),
            "flat" => Ok(Design::Flat),
            "zero_isi" | "zero-isi" => Ok(Design::ZeroIsi),
            _ => Err(FdssError::Input(format!("unknown design '{s}'"))),
        }
    }
}

/// How negative raw polynomial values are pushed to the non-negative range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rectify {
    /// `max(x, 0)`, used for exported filters.
    Hard,
    /// Smooth strictly-positive clamp, used inside the training loss.
    Smooth,
}

/// Learnable polynomial tap model `F_k = Σ_d a_d s(k)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFilterModel {
    pub design: Design,
    /// `a_0 ..= a_D`.
    pub coeffs: Vec<f64>,
    pub e_fdss: f64,
}

impl PolyFilterModel {
    pub fn new(design: Design, coeffs: Vec<f64>, e_fdss: f64) -> Result<Self> {
        let m = PolyFilterModel {
            design,
            coeffs,
            e_fdss,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient indices the optimizer may move.
    pub fn active_indices(&self) -> Vec<usize> {
        active_indices(self.design, self.degree())
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(FdssError::Config("model has no coefficients".into()));
        }
        if !(self.e_fdss > 0.0) {
            return Err(FdssError::Config("e_fdss must be positive".into()));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(FdssError::Config("non-finite coefficient".into()));
        }
        if self.design.even_only() {
            if self.degree() % 2 != 0 {
                return Err(FdssError::Config(format!(
                    "{} design needs an even degree, got {}",
                    self.design,
                    self.degree()
                )));
            }
            if let Some(d) = (1..self.coeffs.len())
                .step_by(2)
                .find(|&d| self.coeffs[d] != 0.0)
            {
                return Err(FdssError::Config(format!(
                    "{} design has a non-zero odd coefficient a_{d}",
                    self.design
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, cfg: &SystemConfig) -> Result<FilterTaps> {
        eval_poly_filter(self, cfg, Rectify::Hard)
    }
}

pub fn active_indices(design: Design, degree: usize) -> Vec<usize> {
    if design.even_only() {
        (0..=degree).step_by(2).collect()
    } else {
        (0..=degree).collect()
    }
}

/// `n` equally spaced points on `[-1, 1]`, built so `s[n-1-k] == -s[k]` exactly.
fn antisymmetric_grid(n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0; n];
    }
    let mut s = vec![0.0; n];
    let step = 2.0 / (n - 1) as f64;
    for k in 0..n / 2 {
        let v = -1.0 + step * k as f64;
        s[k] = v;
        s[n - 1 - k] = -v;
    }
    s
}

/// Support value of each subcarrier (or of each upper-sideband tap for
/// `zero_isi`).
pub fn support_values(design: Design, cfg: &SystemConfig) -> Vec<f64> {
    let n_sc = cfg.n_sc();
    let n_se = cfg.n_se;
    match design {
        Design::NonFlat => antisymmetric_grid(n_sc),
        Design::Flat => {
            let mut s = vec![0.0; n_sc];
            let edge = 2 * n_se;
            for k in 0..edge {
                let v = -1.0 + k as f64 / edge as f64;
                s[k] = v;
                s[n_sc - 1 - k] = -v;
            }
            s
        }
        Design::ZeroIsi => match n_se {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n).map(|m| m as f64 / (n - 1) as f64).collect(),
        },
    }
}

fn poly(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Strictly positive C¹ clamp: identity above `delta`, exponential tail below.
fn smooth_clamp(x: f64, delta: f64) -> f64 {
    if x >= delta {
        x
    } else {
        delta * (x / delta - 1.0).exp()
    }
}

/// `√(e_fdss / n_data)`: the mid-band level of a vestigial filter with energy `e_fdss`.
pub fn passband_constant(e_fdss: f64, n_data: usize) -> f64 {
    (e_fdss / n_data as f64).sqrt()
}

/// Outer transition-band taps that complete `upper` to a Nyquist pair:
/// `lower[k]² + upper[n_se-1-k]² = c_v²`.
pub fn vestigial_complete(upper: &[f64], c_v: f64) -> Result<Vec<f64>> {
    let lo = c_v * FRAC_1_SQRT_2;
    let tol = 1e-12 * c_v;
    if let Some((m, u)) = upper
        .iter()
        .enumerate()
        .find(|(_, &u)| !(u >= lo - tol && u <= c_v + tol))
    {
        return Err(FdssError::Constraint(format!(
            "upper-sideband tap {} = {u} outside [{lo}, {c_v}]",
            m + 1
        )));
    }
    Ok(upper
        .iter()
        .rev()
        .map(|u| (c_v * c_v - u * u).max(0.0).sqrt())
        .collect())
}

/// Squashes raw polynomial output into `[c_v/√2, c_v]`.
pub(crate) fn squash_upper(raw: f64, c_v: f64) -> f64 {
    let lo = c_v * FRAC_1_SQRT_2;
    lo + (c_v - lo) * logistic(raw)
}

/// Assembles a full zero-ISI filter from its upper-sideband taps.
pub fn zero_isi_from_upper(upper: &[f64], cfg: &SystemConfig, e_fdss: f64) -> Result<FilterTaps> {
    let n_se = cfg.n_se;
    if upper.len() != n_se {
        return Err(FdssError::LengthMismatch {
            expected: n_se,
            actual: upper.len(),
        });
    }
    let c_v = passband_constant(e_fdss, cfg.n_data);
    let lower = vestigial_complete(upper, c_v)?;
    let n_sc = cfg.n_sc();
    let mut f = vec![c_v; n_sc];
    for k in 0..n_se {
        f[k] = lower[k];
        f[n_se + k] = upper[k];
        f[n_sc - 1 - k] = lower[k];
        f[n_sc - 1 - n_se - k] = upper[k];
    }
    FilterTaps::new(f, e_fdss)
}

/// Evaluates a polynomial model on the subcarriers of `cfg`.
pub fn eval_poly_filter(
    model: &PolyFilterModel,
    cfg: &SystemConfig,
    rectify: Rectify,
) -> Result<FilterTaps> {
    model.validate()?;
    let support = support_values(model.design, cfg);
    match model.design {
        Design::NonFlat | Design::Flat => {
            let raw: Vec<f64> = support.iter().map(|&s| poly(&model.coeffs, s)).collect();
            let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(peak > 0.0) || !peak.is_finite() {
                return Err(FdssError::DegenerateFilter(
                    "polynomial evaluates to zero on every subcarrier".into(),
                ));
            }
            let rectified: Vec<f64> = match rectify {
                Rectify::Hard => raw.iter().map(|v| v.max(0.0)).collect(),
                Rectify::Smooth => {
                    let delta = 1e-3 * peak;
                    raw.iter().map(|&v| smooth_clamp(v, delta)).collect()
                }
            };
            FilterTaps::normalized(rectified, model.e_fdss)
        }
        Design::ZeroIsi => {
            let c_v = passband_constant(model.e_fdss, cfg.n_data);
            let upper: Vec<f64> = support
                .iter()
                .map(|&s| squash_upper(poly(&model.coeffs, s), c_v))
                .collect();
            zero_isi_from_upper(&upper, cfg, model.e_fdss)
        }
    }
}

/// Re-evaluates a trained model for different dimensions.
pub fn resample(model: &PolyFilterModel, new_cfg: &SystemConfig) -> Result<FilterTaps> {
    eval_poly_filter(model, new_cfg, Rectify::Hard)
}

/// Raised-cosine spectrum at normalized frequency `f` (Nyquist band edge at ½).
pub fn rc_spectrum(f: f64, alpha: f64) -> f64 {
    let a = f.abs();
    let lo = (1.0 - alpha) / 2.0;
    let hi = (1.0 + alpha) / 2.0;
    if a <= lo {
        1.0
    } else if a <= hi {
        0.5 * (1.0 + (PI / alpha * (a - lo)).cos())
    } else {
        0.0
    }
}

/// Normalized frequency of each occupied subcarrier, in data-bandwidth units.
pub fn subcarrier_freqs(cfg: &SystemConfig) -> Vec<f64> {
    let n_sc = cfg.n_sc();
    let centre = (n_sc as f64 - 1.0) / 2.0;
    (0..n_sc)
        .map(|k| (k as f64 - centre) / cfg.n_data as f64)
        .collect()
}

/// Ratio of the raised-cosine roll-off to the data bandwidth; equals the EBW.
pub fn rrc_rolloff(cfg: &SystemConfig) -> f64 {
    2.0 * cfg.n_se as f64 / cfg.n_data as f64
}

/// Root-raised-cosine taps whose roll-off exactly fills the extension.
pub fn rrc_taps(cfg: &SystemConfig) -> Result<FilterTaps> {
    rrc_taps_with_energy(cfg, 1.0)
}

pub fn rrc_taps_with_energy(cfg: &SystemConfig, e_fdss: f64) -> Result<FilterTaps> {
    let alpha = rrc_rolloff(cfg);
    let raw = symmetric_from(subcarrier_freqs(cfg), |f| rc_spectrum(f, alpha).sqrt());
    FilterTaps::normalized(raw, e_fdss)
}

/// Plain DFT-s-OFDM: flat over the data bins, nothing on the extension.
pub fn rectangular_taps(cfg: &SystemConfig) -> Result<FilterTaps> {
    let raw = symmetric_from(subcarrier_freqs(cfg), |f| rc_spectrum(f, 0.0));
    FilterTaps::normalized(raw, 1.0)
}

/// Flat over every occupied subcarrier, extension included.
pub fn flat_taps(cfg: &SystemConfig) -> Result<FilterTaps> {
    FilterTaps::normalized(vec![1.0; cfg.n_sc()], 1.0)
}

fn symmetric_from(freqs: Vec<f64>, g: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = freqs.len();
    let mut out = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let v = g(freqs[k]);
        out[k] = v;
        out[n - 1 - k] = v;
    }
    out
}

/// Relative spread of the folded matched-filter gain; 0 means no ISI.
pub fn check_zero_isi(taps: &FilterTaps, cfg: &SystemConfig) -> f64 {
    let gains = match combined_gain(taps, cfg, NormMode::Mrc) {
        Ok(g) => g,
        Err(_) => return f64::INFINITY,
    };
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    gains
        .iter()
        .map(|g| (g - mean).abs() / mean)
        .fold(0.0, f64::max)
}

/// Bound on the squashed fit target. The sideband of a Nyquist filter reaches
/// `c_v` at the inner edge, where the logit diverges; clamping keeps the
/// fitted coefficients small.
const LOGIT_CLAMP: f64 = 1e-2;

/// Least-squares polynomial fit of `design` to `target`, used to start
/// training from a known filter.
pub fn fit_model(
    design: Design,
    degree: usize,
    target: &FilterTaps,
    cfg: &SystemConfig,
) -> Result<PolyFilterModel> {
    if target.len() != cfg.n_sc() {
        return Err(FdssError::LengthMismatch {
            expected: cfg.n_sc(),
            actual: target.len(),
        });
    }
    if design.even_only() && degree % 2 != 0 {
        return Err(FdssError::Config(format!(
            "{design} design needs an even degree, got {degree}"
        )));
    }
    let active = active_indices(design, degree);
    let support = support_values(design, cfg);
    let e_fdss = target.e_fdss();
    let (xs, ys): (Vec<f64>, Vec<f64>) = match design {
        Design::NonFlat | Design::Flat => {
            let peak = target.iter().cloned().fold(0.0, f64::max);
            (support, target.iter().map(|v| v / peak).collect())
        }
        Design::ZeroIsi => {
            let c_v = passband_constant(e_fdss, cfg.n_data);
            let lo = c_v * FRAC_1_SQRT_2;
            let n_se = cfg.n_se;
            let ys = target[n_se..2 * n_se]
                .iter()
                .map(|&u| {
                    let t = ((u - lo) / (c_v - lo)).clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP);
                    (t / (1.0 - t)).ln()
                })
                .collect();
            (support, ys)
        }
    };
    let mut coeffs = vec![0.0; degree + 1];
    if !xs.is_empty() {
        let a = DMatrix::from_fn(xs.len(), active.len(), |i, j| xs[i].powi(active[j] as i32));
        let b = DVector::from_vec(ys);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| FdssError::Config(format!("least-squares fit failed: {e}")))?;
        for (j, &d) in active.iter().enumerate() {
            coeffs[d] = sol[j];
        }
    }
    PolyFilterModel::new(design, coeffs, e_fdss)
}

/// Kind tag of a stored filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    NonFlat,
    Flat,
    ZeroIsi,
    Rrc,
    Rectangular,
}

impl From<Design> for FilterKind {
    fn from(d: Design) -> Self {
        match d {
            Design::NonFlat => FilterKind::NonFlat,
            Design::Flat => FilterKind::Flat,
            Design::ZeroIsi => FilterKind::ZeroIsi,
        }
    }
}

impl FilterKind {
    pub fn design(&self) -> Option<Design> {
        match self {
            FilterKind::NonFlat => Some(Design::NonFlat),
            FilterKind::Flat => Some(Design::Flat),
            FilterKind::ZeroIsi => Some(Design::ZeroIsi),
            FilterKind::Rrc | FilterKind::Rectangular => None,
        }
    }
}

/// Filter exchange record. For polynomial designs the coefficients are
/// authoritative and `taps` is kept for auditing; fixed filters carry taps only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub design: FilterKind,
    pub degree: usize,
    pub coeffs: Vec<f64>,
    pub n_data: usize,
    pub n_se: usize,
    pub e_fdss: f64,
    pub taps: Vec<f64>,
}

impl FilterRecord {
    pub fn from_model(model: &PolyFilterModel, cfg: &SystemConfig) -> Result<Self> {
        let taps = model.eval(cfg)?;
        Ok(FilterRecord {
            design: model.design.into(),
            degree: model.degree(),
            coeffs: model.coeffs.clone(),
            n_data: cfg.n_data,
            n_se: cfg.n_se,
            e_fdss: model.e_fdss,
            taps: taps.into_values(),
        })
    }

    pub fn from_taps(kind: FilterKind, taps: &FilterTaps, cfg: &SystemConfig) -> Self {
        FilterRecord {
            design: kind,
            degree: 0,
            coeffs: Vec::new(),
            n_data: cfg.n_data,
            n_se: cfg.n_se,
            e_fdss: taps.e_fdss(),
            taps: taps.values().to_vec(),
        }
    }

    pub fn model(&self) -> Option<PolyFilterModel> {
        self.design.design().map(|d| PolyFilterModel {
            design: d,
            coeffs: self.coeffs.clone(),
            e_fdss: self.e_fdss,
        })
    }

    /// Checks the record against `cfg` and returns validated taps.
    pub fn to_taps(&self, cfg: &SystemConfig) -> Result<FilterTaps> {
        if self.n_data != cfg.n_data || self.n_se != cfg.n_se {
            return Err(FdssError::Config(format!(
                "filter built for n_data={}, n_se={} but config has n_data={}, n_se={}",
                self.n_data, self.n_se, cfg.n_data, cfg.n_se
            )));
        }
        let stored = FilterTaps::new(self.taps.clone(), self.e_fdss)?;
        if stored.len() != cfg.n_sc() {
            return Err(FdssError::LengthMismatch {
                expected: cfg.n_sc(),
                actual: stored.len(),
            });
        }
        if let Some(model) = self.model() {
            if model.degree() != self.degree {
                return Err(FdssError::Format(format!(
                    "degree {} does not match {} coefficients",
                    self.degree,
                    self.coeffs.len()
                )));
            }
            let fresh = model.eval(cfg)?;
            let dev = fresh
                .iter()
                .zip(stored.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev > 1e-9 {
                return Err(FdssError::Format(format!(
                    "stored taps deviate from coefficients by {dev:e}"
                )));
            }
            return Ok(fresh);
        }
        Ok(stored)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FdssError::Io(format!("{}: {e}", path.display())))?;
        FilterRecord::from_json(&text)
    }
}
