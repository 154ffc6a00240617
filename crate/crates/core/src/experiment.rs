//! JSON experiment descriptions and the commands that execute them.
//!
//! One experiment seed drives everything: inline training runs use it as
//! their training seed, CCDF campaigns draw from its `EVAL` family and SER
//! sweeps from its `SWEEP` family. All filters of an experiment therefore
//! see the same symbols and noise, and rerunning a spec with the same seed
//! rewrites byte-identical CSV files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::campaign::{papr_samples, ser_sweep, StopRule};
use crate::chain::{Chain, SystemConfig};
use crate::error::{FdssError, Result};
use crate::filters::{
    rectangular_taps, resample, rrc_taps, Design, FilterKind, FilterRecord, FilterTaps, PolyFilterModel,
};
use crate::metrics::{ccdf, db_grid, mrc_snr_penalty_db, readout_edges, CcdfCurve, SweepResult};
use crate::plot::{LinePlot, Series};
use crate::rng::{tags, StreamSeed};
use crate::trainer::{train, LossWeights, TrainConfig, TrainReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ccdf,
    SerSweep,
    Train,
    Compare,
    ResampleStudy,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Ccdf => "ccdf",
            ExperimentKind::SerSweep => "ser-sweep",
            ExperimentKind::Train => "train",
            ExperimentKind::Compare => "compare",
            ExperimentKind::ResampleStudy => "resample-study",
        }
    }

    fn reads_ccdf(&self) -> bool {
        matches!(self, ExperimentKind::Ccdf | ExperimentKind::Compare | ExperimentKind::ResampleStudy)
    }
}

/// Training request embedded in a spec. `train.seed` is replaced by the
/// experiment seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub design: Design,
    pub weights: LossWeights,
    #[serde(default)]
    pub train: TrainConfig,
}

impl TrainSpec {
    fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        self.train.validate()?;
        if self.design.even_only() && self.train.degree % 2 != 0 {
            return Err(FdssError::Config(format!(
                "{} design needs an even degree, got {}",
                self.design, self.train.degree
            )));
        }
        Ok(())
    }

    /// Trains at `cfg` with `seed` as the training seed.
    pub fn run(&self, cfg: &SystemConfig, seed: u64) -> Result<TrainReport> {
        let tcfg = TrainConfig {
            seed,
            ..self.train.clone()
        };
        train(self.design, cfg, &self.weights, &tcfg)
    }
}

/// Where a filter comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum FilterSource {
    Rrc,
    Rectangular,
    /// A filter exchange record; relative paths resolve against the spec file.
    File { path: PathBuf },
    /// Trained when the experiment runs.
    Train(TrainSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub label: String,
    #[serde(flatten)]
    pub source: FilterSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CcdfSettings {
    pub n_blocks: u64,
    /// Probability level of the PAPR readout.
    pub p: f64,
}

impl Default for CcdfSettings {
    fn default() -> Self {
        CcdfSettings {
            n_blocks: 100_000,
            p: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SerSettings {
    pub snr_db: Vec<f64>,
    pub target_ser: f64,
    pub stop: StopRule,
}

impl Default for SerSettings {
    fn default() -> Self {
        SerSettings {
            snr_db: db_grid(6.0, 10.0, 0.5),
            target_ser: 1e-2,
            stop: StopRule::default(),
        }
    }
}

/// Reuse of a learned zero-ISI model at a second configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleSpec {
    /// Configuration the base model is resampled to.
    pub target: SystemConfig,
    /// Base model at the experiment config: a `zero_isi` file or training run.
    pub base: FilterSource,
    /// Training run performed from scratch at `target`.
    pub retrain: TrainSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub name: String,
    pub config: SystemConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub filters: Vec<FilterSpec>,
    /// Label of the reference filter for comparisons; defaults to the first.
    #[serde(default)]
    pub baseline: Option<String>,
    #[serde(default)]
    pub ccdf: CcdfSettings,
    #[serde(default)]
    pub ser: SerSettings,
    #[serde(default)]
    pub resample: Option<ResampleSpec>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses a spec file and resolves relative filter paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| FdssError::Input(format!("{}: {e}", path.display())))?;
        let mut spec = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        spec.resolve_paths(base);
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |src: &mut FilterSource| {
            if let FilterSource::File { path } = src {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        for f in &mut self.filters {
            fix(&mut f.source);
        }
        if let Some(r) = &mut self.resample {
            fix(&mut r.base);
        }
    }

    fn baseline_label(&self) -> Option<&str> {
        self.baseline
            .as_deref()
            .or_else(|| self.filters.first().map(|f| f.label.as_str()))
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let c = &self.ccdf;
        if self.kind.reads_ccdf() {
            if !(c.p > 0.0 && c.p < 1.0) {
                return Err(FdssError::Config(format!("ccdf.p = {} must lie in (0, 1)", c.p)));
            }
            if c.p * (c.n_blocks as f64) < 100.0 {
                return Err(FdssError::InsufficientSamples(format!(
                    "p * n_blocks = {} but at least 100 is required",
                    c.p * c.n_blocks as f64
                )));
            }
        }
        if matches!(self.kind, ExperimentKind::SerSweep | ExperimentKind::Compare) {
            let s = &self.ser;
            if s.snr_db.is_empty() || s.snr_db.windows(2).any(|w| w[1] <= w[0]) {
                return Err(FdssError::Config("ser.snr_db must be a non-empty increasing grid".into()));
            }
            if !(s.target_ser > 0.0 && s.target_ser < 1.0) {
                return Err(FdssError::Config("ser.target_ser must lie in (0, 1)".into()));
            }
            if s.stop.max_blocks == 0 || s.stop.min_blocks > s.stop.max_blocks {
                return Err(FdssError::Config("ser.stop needs 0 < min_blocks <= max_blocks".into()));
            }
        }

        let mut labels = BTreeSet::new();
        for f in &self.filters {
            if f.label.is_empty()
                || !f.label.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-')
            {
                return Err(FdssError::Config(format!(
                    "filter label {:?} must be non-empty and use only [A-Za-z0-9_-]",
                    f.label
                )));
            }
            if !labels.insert(f.label.as_str()) {
                return Err(FdssError::Config(format!("duplicate filter label {:?}", f.label)));
            }
            validate_source(&f.source, &self.config)?;
        }

        match self.kind {
            ExperimentKind::Ccdf | ExperimentKind::SerSweep if self.filters.is_empty() => {
                return Err(FdssError::Config(format!("{} needs at least one filter", self.kind.name())));
            }
            ExperimentKind::Compare => {
                if self.filters.len() < 2 {
                    return Err(FdssError::Config("compare needs a baseline and a candidate".into()));
                }
                let b = self.baseline_label().unwrap_or_default();
                if !labels.contains(b) {
                    return Err(FdssError::Config(format!("baseline {b:?} is not a filter label")));
                }
            }
            ExperimentKind::Train => {
                if !self.filters.iter().any(|f| matches!(f.source, FilterSource::Train(_))) {
                    return Err(FdssError::Config("train needs at least one filter with source \"train\"".into()));
                }
            }
            ExperimentKind::ResampleStudy => {
                let r = self
                    .resample
                    .as_ref()
                    .ok_or_else(|| FdssError::Config("resample-study needs a \"resample\" section".into()))?;
                r.target.validate()?;
                r.retrain.validate()?;
                if r.retrain.design != Design::ZeroIsi {
                    return Err(FdssError::Config("resample.retrain must use the zero_isi design".into()));
                }
                match &r.base {
                    FilterSource::Train(t) if t.design == Design::ZeroIsi => validate_source(&r.base, &self.config)?,
                    FilterSource::File { path } => {
                        validate_source(&r.base, &self.config)?;
                        if FilterRecord::load(path)?.design != FilterKind::ZeroIsi {
                            return Err(FdssError::Config("resample.base file must hold a zero_isi model".into()));
                        }
                    }
                    _ => {
                        return Err(FdssError::Config(
                            "resample.base must be a zero_isi training run or file".into(),
                        ))
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn validate_source(src: &FilterSource, cfg: &SystemConfig) -> Result<()> {
    match src {
        FilterSource::Rrc | FilterSource::Rectangular => Ok(()),
        FilterSource::File { path } => {
            if !path.exists() {
                return Err(FdssError::Input(format!("filter file {} does not exist", path.display())));
            }
            FilterRecord::load(path)?.to_taps(cfg).map(|_| ())
        }
        FilterSource::Train(t) => t.validate(),
    }
}

/// A filter ready for simulation.
#[derive(Debug, Clone)]
pub struct BuiltFilter {
    pub label: String,
    pub taps: FilterTaps,
    pub model: Option<PolyFilterModel>,
    pub report: Option<TrainReport>,
}

fn build(label: &str, src: &FilterSource, cfg: &SystemConfig, seed: u64) -> Result<BuiltFilter> {
    let (taps, model, report) = match src {
        FilterSource::Rrc => (rrc_taps(cfg)?, None, None),
        FilterSource::Rectangular => (rectangular_taps(cfg)?, None, None),
        FilterSource::File { path } => {
            let rec = FilterRecord::load(path)?;
            (rec.to_taps(cfg)?, rec.model(), None)
        }
        FilterSource::Train(t) => {
            let rep = t.run(cfg, seed)?;
            (rep.model.eval(cfg)?, Some(rep.model.clone()), Some(rep))
        }
    };
    Ok(BuiltFilter {
        label: label.to_string(),
        taps,
        model,
        report,
    })
}

/// PAPR gain of `candidate` over `baseline` and its SNR loss. Swapping the
/// arguments negates both fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub papr_gain_db: f64,
    pub snr_loss_db: f64,
}

impl Comparison {
    /// From CCDF levels at `p` and SNRs at the target SER of both filters.
    pub fn from_levels(base_papr_db: f64, cand_papr_db: f64, base_snr_db: f64, cand_snr_db: f64) -> Self {
        Comparison {
            papr_gain_db: base_papr_db - cand_papr_db,
            snr_loss_db: cand_snr_db - base_snr_db,
        }
    }
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| FdssError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| FdssError::Io(format!("{}: {e}", path.display())))
}

/// Files written by a command and a short human-readable summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

struct Out<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Out<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        self.summary.files.push(path);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.summary.lines.push(line);
    }
}

/// Runs `spec` with `seed` and writes every result under `out_dir`.
pub fn run(spec: &ExperimentSpec, seed: u64, out_dir: &Path) -> Result<RunSummary> {
    spec.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| FdssError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut out = Out {
        dir: out_dir,
        summary: RunSummary::default(),
    };
    match spec.kind {
        ExperimentKind::Ccdf => cmd_ccdf(spec, seed, &mut out)?,
        ExperimentKind::SerSweep => cmd_ser_sweep(spec, seed, &mut out)?,
        ExperimentKind::Train => cmd_train(spec, seed, &mut out)?,
        ExperimentKind::Compare => cmd_compare(spec, seed, &mut out)?,
        ExperimentKind::ResampleStudy => cmd_resample_study(spec, seed, &mut out)?,
    }
    Ok(out.summary)
}

fn build_all(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<Vec<BuiltFilter>> {
    let mut built = Vec::with_capacity(spec.filters.len());
    for f in &spec.filters {
        let b = build(&f.label, &f.source, &spec.config, seed)?;
        if let Some(rep) = &b.report {
            write_training(out, &b.label, rep, &spec.config)?;
        }
        built.push(b);
    }
    Ok(built)
}

fn write_training(out: &mut Out<'_>, label: &str, rep: &TrainReport, cfg: &SystemConfig) -> Result<()> {
    let record = FilterRecord::from_model(&rep.model, cfg)?;
    out.write(&format!("filter_{label}.json"), &record.to_json()?)?;
    out.write(&format!("train_{label}.json"), &rep.to_json()?)?;
    out.write(&format!("history_{label}.csv"), &rep.history_csv())?;
    out.say(format!(
        "{label}: trained {} (degree {}), held-out loss {:.4} -> {:.4} at step {}",
        rep.design,
        rep.model.degree(),
        rep.initial_loss.total,
        rep.best_loss.total,
        rep.best_step
    ));
    Ok(())
}

fn ccdf_curves(
    cfg: &SystemConfig,
    filters: &[(&str, &FilterTaps)],
    settings: &CcdfSettings,
    seed: u64,
) -> Result<Vec<CcdfCurve>> {
    let chain = Chain::new(*cfg)?;
    let stream = StreamSeed::new(seed).derive(tags::EVAL);
    let edges = readout_edges();
    filters
        .iter()
        .map(|(_, taps)| Ok(ccdf(&papr_samples(&chain, taps, settings.n_blocks, stream)?, &edges)))
        .collect()
}

fn ccdf_plot(title: &str, labels: &[&str], curves: &[CcdfCurve]) -> String {
    let mut plot = LinePlot::new(title, "PAPR (dB)", "CCDF").log_y();
    for (l, c) in labels.iter().zip(curves) {
        plot = plot.with_series(Series::new(*l, c.edges.clone(), c.probs.clone()));
    }
    plot.to_svg()
}

fn taps_plot(title: &str, filters: &[(&str, &FilterTaps)]) -> String {
    let mut plot = LinePlot::new(title, "subcarrier", "tap");
    for (l, t) in filters {
        let x = (0..t.len()).map(|k| k as f64).collect();
        plot = plot.with_series(Series::new(*l, x, t.values().to_vec()));
    }
    plot.to_svg()
}

fn levels_csv(labels: &[&str], curves: &[CcdfCurve], p: f64) -> Result<(String, Vec<f64>)> {
    let mut csv = String::from("label,p,papr_db\n");
    let mut levels = Vec::with_capacity(curves.len());
    for (l, c) in labels.iter().zip(curves) {
        let v = c.level(p)?;
        let _ = writeln!(csv, "{l},{p},{v}");
        levels.push(v);
    }
    Ok((csv, levels))
}

fn cmd_ccdf(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<()> {
    let built = build_all(spec, seed, out)?;
    let pairs: Vec<(&str, &FilterTaps)> = built.iter().map(|b| (b.label.as_str(), &b.taps)).collect();
    let labels: Vec<&str> = pairs.iter().map(|p| p.0).collect();
    let curves = ccdf_curves(&spec.config, &pairs, &spec.ccdf, seed)?;
    for (l, c) in labels.iter().zip(&curves) {
        out.write(&format!("ccdf_{l}.csv"), &c.to_csv())?;
    }
    let (csv, levels) = levels_csv(&labels, &curves, spec.ccdf.p)?;
    out.write("ccdf_levels.csv", &csv)?;
    out.write("ccdf.svg", &ccdf_plot("PAPR CCDF", &labels, &curves))?;
    for (l, v) in labels.iter().zip(levels) {
        out.say(format!("{l}: PAPR {v:.3} dB at CCDF {}", spec.ccdf.p));
    }
    Ok(())
}

fn sweeps(spec: &ExperimentSpec, built: &[BuiltFilter], seed: u64) -> Result<Vec<SweepResult>> {
    let chain = Chain::new(spec.config)?;
    let stream = StreamSeed::new(seed).derive(tags::SWEEP);
    built
        .iter()
        .map(|b| ser_sweep(&chain, &b.taps, &spec.ser.snr_db, stream, &spec.ser.stop))
        .collect()
}

fn ser_plot(labels: &[&str], results: &[SweepResult]) -> String {
    let mut plot = LinePlot::new("Symbol error rate", "SNR (dB)", "SER").log_y();
    for (l, r) in labels.iter().zip(results) {
        plot = plot.with_series(Series::new(*l, r.snr_db.clone(), r.ser.clone()));
    }
    plot.to_svg()
}

fn cmd_ser_sweep(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<()> {
    let built = build_all(spec, seed, out)?;
    let labels: Vec<&str> = built.iter().map(|b| b.label.as_str()).collect();
    let results = sweeps(spec, &built, seed)?;
    let target = spec.ser.target_ser;
    let mut csv = String::from("label,target_ser,snr_db\n");
    let mut lines = Vec::new();
    for (l, r) in labels.iter().zip(&results) {
        out.write(&format!("ser_{l}.csv"), &r.to_csv())?;
        let snr = r.snr_at(target)?;
        let _ = writeln!(csv, "{l},{target},{snr}");
        lines.push(format!("{l}: SER {target} at {snr:.3} dB"));
    }
    out.write("ser_targets.csv", &csv)?;
    out.write("ser.svg", &ser_plot(&labels, &results))?;
    for l in lines {
        out.say(l);
    }
    Ok(())
}

fn cmd_train(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<()> {
    let mut pairs = Vec::new();
    for f in &spec.filters {
        if let FilterSource::Train(_) = f.source {
            let b = build(&f.label, &f.source, &spec.config, seed)?;
            if let Some(rep) = &b.report {
                write_training(out, &b.label, rep, &spec.config)?;
            }
            pairs.push(b);
        }
    }
    let mut plot = LinePlot::new("Training loss", "step", "loss");
    for b in &pairs {
        let rep = b.report.as_ref().expect("trained filters carry a report");
        let x = rep.history.iter().map(|r| r.step as f64).collect();
        let y = rep.history.iter().map(|r| r.loss.total).collect();
        plot = plot.with_series(Series::new(b.label.clone(), x, y));
    }
    out.write("history.svg", &plot.to_svg())?;
    let rrc = rrc_taps(&spec.config)?;
    let mut shown: Vec<(&str, &FilterTaps)> = vec![("rrc", &rrc)];
    shown.extend(pairs.iter().map(|b| (b.label.as_str(), &b.taps)));
    out.write("taps.svg", &taps_plot("FDSS taps", &shown))?;
    Ok(())
}

fn cmd_compare(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<()> {
    let built = build_all(spec, seed, out)?;
    let base_label = spec.baseline_label().expect("validated");
    let base = built.iter().position(|b| b.label == base_label).expect("validated");
    let pairs: Vec<(&str, &FilterTaps)> = built.iter().map(|b| (b.label.as_str(), &b.taps)).collect();
    let labels: Vec<&str> = pairs.iter().map(|p| p.0).collect();

    let curves = ccdf_curves(&spec.config, &pairs, &spec.ccdf, seed)?;
    let (levels_csv, levels) = levels_csv(&labels, &curves, spec.ccdf.p)?;
    let results = sweeps(spec, &built, seed)?;
    let target = spec.ser.target_ser;
    let snrs = results.iter().map(|r| r.snr_at(target)).collect::<Result<Vec<f64>>>()?;

    let mut csv = String::from("label,baseline,papr_gain_db,snr_loss_db,predicted_snr_loss_db\n");
    let base_penalty = mrc_snr_penalty_db(&built[base].taps, &spec.config)?;
    for (i, b) in built.iter().enumerate() {
        if i == base {
            continue;
        }
        let c = Comparison::from_levels(levels[base], levels[i], snrs[base], snrs[i]);
        let predicted = mrc_snr_penalty_db(&b.taps, &spec.config)? - base_penalty;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            b.label, base_label, c.papr_gain_db, c.snr_loss_db, predicted
        );
        out.say(format!(
            "{} vs {base_label}: PAPR gain {:.3} dB at CCDF {}, SNR loss {:.3} dB at SER {target}",
            b.label, c.papr_gain_db, spec.ccdf.p, c.snr_loss_db
        ));
    }
    for (l, c) in labels.iter().zip(&curves) {
        out.write(&format!("ccdf_{l}.csv"), &c.to_csv())?;
    }
    for (l, r) in labels.iter().zip(&results) {
        out.write(&format!("ser_{l}.csv"), &r.to_csv())?;
    }
    out.write("ccdf_levels.csv", &levels_csv)?;
    out.write("compare.csv", &csv)?;
    out.write("ccdf.svg", &ccdf_plot("PAPR CCDF", &labels, &curves))?;
    out.write("ser.svg", &ser_plot(&labels, &results))?;
    out.write("taps.svg", &taps_plot("FDSS taps", &pairs))?;
    Ok(())
}

/// Gains of the resample study, all against RRC at the respective config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleOutcome {
    pub base_gain_db: f64,
    pub resampled_gain_db: f64,
    pub retrained_gain_db: f64,
}

fn cmd_resample_study(spec: &ExperimentSpec, seed: u64, out: &mut Out<'_>) -> Result<()> {
    let r = spec.resample.as_ref().expect("validated");
    let base_cfg = spec.config;
    let wide = r.target;

    let base = build("base", &r.base, &base_cfg, seed)?;
    if let Some(rep) = &base.report {
        write_training(out, "base", rep, &base_cfg)?;
    }
    let model = base
        .model
        .clone()
        .ok_or_else(|| FdssError::Config("resample base carries no polynomial model".into()))?;
    let resampled = resample(&model, &wide)?;
    out.write(
        "filter_resampled.json",
        &FilterRecord::from_model(&model, &wide)?.to_json()?,
    )?;
    let retrained = build("retrained", &FilterSource::Train(r.retrain.clone()), &wide, seed)?;
    if let Some(rep) = &retrained.report {
        write_training(out, "retrained", rep, &wide)?;
    }

    let rrc_base = rrc_taps(&base_cfg)?;
    let base_pairs = [("rrc", &rrc_base), ("base", &base.taps)];
    let base_curves = ccdf_curves(&base_cfg, &base_pairs, &spec.ccdf, seed)?;
    let rrc_wide = rrc_taps(&wide)?;
    let wide_pairs = [("rrc", &rrc_wide), ("resampled", &resampled), ("retrained", &retrained.taps)];
    let wide_curves = ccdf_curves(&wide, &wide_pairs, &spec.ccdf, seed)?;

    let p = spec.ccdf.p;
    let outcome = ResampleOutcome {
        base_gain_db: base_curves[0].level(p)? - base_curves[1].level(p)?,
        resampled_gain_db: wide_curves[0].level(p)? - wide_curves[1].level(p)?,
        retrained_gain_db: wide_curves[0].level(p)? - wide_curves[2].level(p)?,
    };
    let mut csv = String::from("filter,n_data,n_se,papr_gain_db\n");
    let _ = writeln!(csv, "base,{},{},{}", base_cfg.n_data, base_cfg.n_se, outcome.base_gain_db);
    let _ = writeln!(csv, "resampled,{},{},{}", wide.n_data, wide.n_se, outcome.resampled_gain_db);
    let _ = writeln!(csv, "retrained,{},{},{}", wide.n_data, wide.n_se, outcome.retrained_gain_db);

    for ((l, _), c) in base_pairs.iter().zip(&base_curves) {
        out.write(&format!("ccdf_base_{l}.csv"), &c.to_csv())?;
    }
    for ((l, _), c) in wide_pairs.iter().zip(&wide_curves) {
        out.write(&format!("ccdf_target_{l}.csv"), &c.to_csv())?;
    }
    out.write("resample_study.csv", &csv)?;
    out.write("resample_study.json", &serde_json::to_string_pretty(&outcome)?)?;
    let wide_labels: Vec<&str> = wide_pairs.iter().map(|p| p.0).collect();
    out.write("ccdf_target.svg", &ccdf_plot("PAPR CCDF at target config", &wide_labels, &wide_curves))?;
    out.write("taps_target.svg", &taps_plot("FDSS taps at target config", &wide_pairs))?;
    out.say(format!(
        "base gain {:.3} dB; at target: resampled {:.3} dB, retrained {:.3} dB (CCDF {p})",
        outcome.base_gain_db, outcome.resampled_gain_db, outcome.retrained_gain_db
    ));
    Ok(())
}
