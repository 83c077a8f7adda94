use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use faer::{c64, Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::ensemble::{empirical_moments, EnsembleKind, EnsembleSpec, EntryLaw, SelfAdjoint, SpectralSample};
use super::stats::{freeness_defect, Histogram};
use crate::analytic::{
    band_spectrum, stieltjes_density, uniform_grid, Atom, BandModel, GridDensity, InversionOptions, PoissonProduct,
    RationalR, RationalSolver, SolverOptions,
};
use crate::error::RmtError;
use crate::transforms::{families, free_multiplicative_convolve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig1Sum,
    Fig1Product,
    Band,
    WishartCompound,
    FreenessDecay,
    WignerUniversality,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::Fig1Sum,
        Self::Fig1Product,
        Self::Band,
        Self::WishartCompound,
        Self::FreenessDecay,
        Self::WignerUniversality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1Sum => "fig1-sum",
            Self::Fig1Product => "fig1-product",
            Self::Band => "band",
            Self::WishartCompound => "wishart-compound",
            Self::FreenessDecay => "freeness-decay",
            Self::WignerUniversality => "wigner-universality",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::Band => 0.08,
            Self::WishartCompound => 0.03,
            _ => 0.05,
        }
    }

    pub fn default_seeds(self) -> usize {
        match self {
            Self::FreenessDecay => 20,
            _ => 1,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = RmtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| RmtError::UnknownExperiment(s.to_string()))
    }
}

/// The two-block variance profile used when no band kernel is supplied.
pub fn default_band_model() -> BandModel {
    BandModel::new(vec![0.0, 0.0], vec![vec![2.0, 0.5], vec![0.5, 1.0]]).expect("valid default kernel")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub size: usize,
    pub seed: u64,
    /// Independent samples; defaults per experiment.
    pub seeds: Option<usize>,
    /// Wishart shape ratio `λ` for fig1-sum, wigner-universality and
    /// wishart-compound.
    pub ratio: f64,
    /// Free Poisson rate of both factors in fig1-product.
    pub product_rate: f64,
    /// Diagonal pattern of `T` in wishart-compound.
    pub jump: Vec<f64>,
    pub band: Option<BandModel>,
    pub sizes: Vec<usize>,
    pub word: Vec<(u32, u32)>,
    pub bin_width: Option<f64>,
    pub grid_points: usize,
    pub epsilon: f64,
    pub quantile_atoms: usize,
    pub tolerance: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            size: 2000,
            seed: 7,
            seeds: None,
            ratio: 0.5,
            product_rate: 5.0,
            jump: vec![1.0, 3.0],
            band: None,
            sizes: vec![100, 400, 1600],
            word: vec![(2, 2)],
            bin_width: None,
            grid_points: 2000,
            epsilon: 1e-3,
            quantile_atoms: 64,
            tolerance: None,
        }
    }
}

impl ExperimentConfig {
    fn seeds_for(&self, e: Experiment) -> usize {
        self.seeds.unwrap_or_else(|| e.default_seeds()).max(1)
    }

    fn inversion(&self) -> InversionOptions {
        InversionOptions {
            epsilon: self.epsilon,
            richardson: false,
        }
    }

    fn validate(&self) -> Result<(), RmtError> {
        let invalid = |m: &str| Err(RmtError::Validation(m.to_string()));
        if self.size == 0 || self.sizes.contains(&0) {
            return invalid("matrix sizes must be at least 1");
        }
        if !(self.ratio > 0.0 && self.product_rate > 0.0) {
            return invalid("ratios and rates must be positive");
        }
        if self.grid_points < 2 || self.quantile_atoms == 0 {
            return invalid("grid and atom counts must be positive");
        }
        if !(self.epsilon > 0.0) {
            return invalid("epsilon must be positive");
        }
        Ok(())
    }
}

/// Output of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub histogram: Option<Histogram>,
    pub theory: Option<GridDensity>,
    pub l1: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub summary: Value,
}

impl ExperimentReport {
    /// Writes `<name>-hist.csv`, `<name>-theory.csv` and `<name>-summary.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, RmtError> {
        std::fs::create_dir_all(dir)?;
        let name = self.experiment.name();
        let hist = dir.join(format!("{name}-hist.csv"));
        let theory = dir.join(format!("{name}-theory.csv"));
        let summary = dir.join(format!("{name}-summary.json"));
        let mut out = BufWriter::new(File::create(&hist)?);
        match &self.histogram {
            Some(h) => h.write_csv(&mut out)?,
            None => std::io::Write::write_all(&mut out, b"bin_left,bin_right,count,density\n")?,
        }
        let mut out = BufWriter::new(File::create(&theory)?);
        match &self.theory {
            Some(d) => d.write_csv(&mut out)?,
            None => std::io::Write::write_all(&mut out, b"t,density\n")?,
        }
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        std::fs::write(&summary, text)?;
        Ok(vec![hist, theory, summary])
    }
}

/// Runs a named experiment.
pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    run(name.parse()?, config)
}

pub fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    config.validate()?;
    match experiment {
        Experiment::Fig1Sum => additive(experiment, config, EnsembleKind::GaussianHermitian),
        Experiment::WignerUniversality => additive(
            experiment,
            config,
            EnsembleKind::WignerGeneric {
                law: EntryLaw::Rademacher,
            },
        ),
        Experiment::Fig1Product => product(config),
        Experiment::Band => band(config),
        Experiment::WishartCompound => wishart_compound(config),
        Experiment::FreenessDecay => freeness_decay(config),
    }
}

const STREAMS_PER_TASK: u64 = 4;

fn spec(kind: EnsembleKind, config: &ExperimentConfig, size: usize, task: usize, k: u64) -> EnsembleSpec {
    EnsembleSpec::new(kind, size, config.seed).with_stream(task as u64 * STREAMS_PER_TASK + k)
}

fn padded_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let pad = 0.05 * (hi - lo);
    uniform_grid(lo - pad, hi + pad, points)
}

#[derive(Debug, Clone, Serialize)]
struct MomentStats {
    mean: Vec<f64>,
    sd: Vec<f64>,
}

fn moment_stats(samples: &[SpectralSample], k: usize) -> MomentStats {
    let per: Vec<Vec<f64>> = samples.iter().map(|s| empirical_moments(s, k).into_vec()).collect();
    let count = per.len() as f64;
    let mean: Vec<f64> = (0..k).map(|j| per.iter().map(|m| m[j]).sum::<f64>() / count).collect();
    let sd = (0..k)
        .map(|j| {
            if per.len() < 2 {
                return 0.0;
            }
            let var = per.iter().map(|m| (m[j] - mean[j]).powi(2)).sum::<f64>() / (count - 1.0);
            var.sqrt()
        })
        .collect();
    MomentStats { mean, sd }
}

fn histogram_summary(h: &Histogram) -> Value {
    json!({
        "bins": h.bins(),
        "width": h.width,
        "left": h.left,
        "right": h.right(),
        "rule": "freedman-diaconis unless bin_width is set",
    })
}

fn sample_all<F>(seeds: usize, f: F) -> Result<Vec<SpectralSample>, RmtError>
where
    F: Fn(usize) -> Result<SpectralSample, RmtError> + Sync + Send,
{
    (0..seeds).into_par_iter().map(f).collect()
}

/// Gaussian or Wigner matrix plus a Wishart matrix of ratio `λ`, against
/// `semicircle ⊞ free Poisson(λ)`.
fn additive(experiment: Experiment, config: &ExperimentConfig, wigner: EnsembleKind) -> Result<ExperimentReport, RmtError> {
    let seeds = config.seeds_for(experiment);
    let wishart = EnsembleKind::Wishart {
        ratio: config.ratio,
        jump: vec![],
    };
    let samples = sample_all(seeds, |task| {
        let a = spec(wigner.clone(), config, config.size, task, 0).sample()?;
        let b = spec(wishart.clone(), config, config.size, task, 1).sample()?;
        SpectralSample::from_matrix(&a.add(&b)?, config.seed)
    })?;
    let r = RationalR::semicircle(1.0)?.plus(&RationalR::free_poisson(config.ratio)?);
    let (lo, hi) = r.support_bound();
    let grid = padded_grid(lo, hi, config.grid_points);
    let theory = stieltjes_density(&RationalSolver::new(r.clone()), &grid, &config.inversion())?;
    let predicted = r.moments(4).into_vec();
    let stats = moment_stats(&samples, 4);
    let hist = Histogram::new(&samples[0].eigenvalues, config.bin_width)?;
    let l1 = hist.l1_distance(&theory);
    let tolerance = config.tolerance.unwrap_or(experiment.default_tolerance());
    let first = empirical_moments(&samples[0], 2).into_vec();
    let variance = first[1] - first[0] * first[0];
    let predicted_variance = predicted[1] - predicted[0] * predicted[0];
    let summary = json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "config": config,
        "l1": l1,
        "tolerance": tolerance,
        "pass": l1 <= tolerance,
        "theory_mass": theory.mass(),
        "histogram": histogram_summary(&hist),
        "moments": { "empirical": stats, "predicted": predicted },
        "sample_mean": first[0],
        "sample_variance": variance,
        "predicted_mean": predicted[0],
        "predicted_variance": predicted_variance,
    });
    Ok(ExperimentReport {
        experiment,
        histogram: Some(hist),
        theory: Some(theory),
        l1: Some(l1),
        tolerance,
        pass: l1 <= tolerance,
        summary,
    })
}

/// Spectrum of `W₁^{1/2} W₂ W₁^{1/2}` through the Cholesky factor
/// `W₁ = L L*`, as the eigenvalues of `L* W₂ L`.
pub fn symmetrized_product(w1: &SelfAdjoint, w2: &SelfAdjoint) -> Result<SelfAdjoint, RmtError> {
    if w1.dim() != w2.dim() {
        return Err(RmtError::Dimension(w1.dim(), w2.dim()));
    }
    let (a, b) = (w1.to_complex(), w2.to_complex());
    let llt = a
        .llt(Side::Lower)
        .map_err(|_| RmtError::Validation("first factor is not positive definite".into()))?;
    let l = llt.L();
    let m = l.adjoint() * (&b * l);
    let n = m.nrows();
    Ok(SelfAdjoint::Complex(Mat::<c64>::from_fn(n, n, |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    })))
}

fn product(config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    let experiment = Experiment::Fig1Product;
    let seeds = config.seeds_for(experiment);
    let rate = config.product_rate;
    let wishart = EnsembleKind::Wishart {
        ratio: rate,
        jump: vec![],
    };
    let samples = sample_all(seeds, |task| {
        let w1 = spec(wishart.clone(), config, config.size, task, 0).sample()?;
        let w2 = spec(wishart.clone(), config, config.size, task, 1).sample()?;
        SpectralSample::from_matrix(&symmetrized_product(&w1, &w2)?, config.seed)
    })?;

    let factor = RationalR::free_poisson(rate)?;
    let (flo, fhi) = factor.support_bound();
    let factor_density = stieltjes_density(
        &RationalSolver::new(factor),
        &uniform_grid(flo.max(0.0), fhi, config.grid_points),
        &config.inversion(),
    )?;
    let atoms: Vec<Atom> = factor_density.quantile_atoms(config.quantile_atoms);
    let model = PoissonProduct::new(rate, &atoms, SolverOptions::default())?;
    let (lo, hi) = model.support_bound();
    let theory = stieltjes_density(&model, &padded_grid(lo, hi, config.grid_points), &config.inversion())?;

    let fp = families::free_poisson_moments(rate, 2);
    let predicted = free_multiplicative_convolve(&fp, &fp)?.into_vec();
    let stats = moment_stats(&samples, 2);
    let within: Vec<bool> = (0..2)
        .map(|j| {
            let se = stats.sd[j] / (seeds as f64).sqrt();
            (stats.mean[j] - predicted[j]).abs() <= 3.0 * se
        })
        .collect();
    let hist = Histogram::new(&samples[0].eigenvalues, config.bin_width)?;
    let l1 = hist.l1_distance(&theory);
    let tolerance = config.tolerance.unwrap_or(experiment.default_tolerance());
    let summary = json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "config": config,
        "l1": l1,
        "tolerance": tolerance,
        "pass": l1 <= tolerance,
        "theory_mass": theory.mass(),
        "histogram": histogram_summary(&hist),
        "moments": { "empirical": stats, "predicted": predicted, "within_3_standard_errors": within },
        "jump_atoms": config.quantile_atoms,
    });
    Ok(ExperimentReport {
        experiment,
        histogram: Some(hist),
        theory: Some(theory),
        l1: Some(l1),
        tolerance,
        pass: l1 <= tolerance,
        summary,
    })
}

fn band(config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    let experiment = Experiment::Band;
    let model = config.band.clone().unwrap_or_else(default_band_model);
    let seeds = config.seeds_for(experiment);
    let kind = EnsembleKind::Band { model: model.clone() };
    let samples = sample_all(seeds, |task| spec(kind.clone(), config, config.size, task, 0).spectrum())?;
    let (lo, hi) = model.support_bound();
    let theory = band_spectrum(&model, &padded_grid(lo, hi, config.grid_points), &config.inversion())?;
    let hist = Histogram::new(&samples[0].eigenvalues, config.bin_width)?;
    let l1 = hist.l1_distance(&theory);
    let tolerance = config.tolerance.unwrap_or(experiment.default_tolerance());
    let summary = json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "config": config,
        "model": model,
        "l1": l1,
        "tolerance": tolerance,
        "pass": l1 <= tolerance,
        "theory_mass": theory.mass(),
        "histogram": histogram_summary(&hist),
        "moments": { "empirical": moment_stats(&samples, 4), "theory_grid": (1..=4).map(|n| theory.moment(n)).collect::<Vec<_>>() },
    });
    Ok(ExperimentReport {
        experiment,
        histogram: Some(hist),
        theory: Some(theory),
        l1: Some(l1),
        tolerance,
        pass: l1 <= tolerance,
        summary,
    })
}

fn wishart_compound(config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    let experiment = Experiment::WishartCompound;
    if config.jump.is_empty() {
        return Err(RmtError::Validation("wishart-compound needs a nonempty jump pattern".into()));
    }
    let seeds = config.seeds_for(experiment);
    let kind = EnsembleKind::Wishart {
        ratio: config.ratio,
        jump: config.jump.clone(),
    };
    let samples = sample_all(seeds, |task| spec(kind.clone(), config, config.size, task, 0).spectrum())?;
    let weight = 1.0 / config.jump.len() as f64;
    let atoms: Vec<Atom> = config.jump.iter().map(|&x| Atom::new(weight, x)).collect();
    let r = RationalR::compound_free_poisson(config.ratio, atoms)?;
    let predicted = r.moments(3).into_vec();
    let stats = moment_stats(&samples, 3);
    let relative: Vec<f64> = stats
        .mean
        .iter()
        .zip(&predicted)
        .map(|(m, p)| ((m - p) / p).abs())
        .collect();
    let tolerance = config.tolerance.unwrap_or(experiment.default_tolerance());
    let pass = relative.iter().all(|e| *e <= tolerance);
    let (lo, hi) = r.support_bound();
    let theory = stieltjes_density(&RationalSolver::new(r), &padded_grid(lo, hi, config.grid_points), &config.inversion())?;
    let hist = Histogram::new(&samples[0].eigenvalues, config.bin_width)?;
    let l1 = hist.l1_distance(&theory);
    let summary = json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "config": config,
        "l1": l1,
        "tolerance": tolerance,
        "pass": pass,
        "histogram": histogram_summary(&hist),
        "moments": { "empirical": stats, "predicted": predicted, "relative_error": relative },
    });
    Ok(ExperimentReport {
        experiment,
        histogram: Some(hist),
        theory: Some(theory),
        l1: Some(l1),
        tolerance,
        pass,
        summary,
    })
}

/// Matrix pairs whose freeness defect is tracked across sizes.
pub fn decay_pairs() -> Vec<(&'static str, EnsembleKind, EnsembleKind)> {
    vec![
        ("gaussian-hermitian", EnsembleKind::GaussianHermitian, EnsembleKind::GaussianHermitian),
        (
            "haar-conjugated",
            EnsembleKind::HaarConjugated {
                diagonal: vec![1.0, 2.0],
            },
            EnsembleKind::DeterministicDiagonal {
                diagonal: vec![0.0, 1.0, 3.0],
            },
        ),
        (
            "wigner-diagonal",
            EnsembleKind::WignerGeneric {
                law: EntryLaw::Rademacher,
            },
            EnsembleKind::DeterministicDiagonal {
                diagonal: vec![1.0, 2.0],
            },
        ),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub pair: String,
    pub size: usize,
    pub mean_abs_defect: f64,
    pub defects: Vec<f64>,
}

fn freeness_decay(config: &ExperimentConfig) -> Result<ExperimentReport, RmtError> {
    let experiment = Experiment::FreenessDecay;
    if config.word.is_empty() {
        return Err(RmtError::Validation("freeness-decay needs a nonempty word".into()));
    }
    let seeds = config.seeds_for(experiment);
    let pairs = decay_pairs();
    let mut tasks = Vec::new();
    for (p, _) in pairs.iter().enumerate() {
        for (s, &size) in config.sizes.iter().enumerate() {
            for seed in 0..seeds {
                tasks.push((p, s, size, seed));
            }
        }
    }
    let defects: Vec<f64> = tasks
        .par_iter()
        .enumerate()
        .map(|(task, &(p, _, size, _))| {
            let a = spec(pairs[p].1.clone(), config, size, task, 0).sample()?;
            let b = spec(pairs[p].2.clone(), config, size, task, 1).sample()?;
            freeness_defect(&a, &b, &config.word)
        })
        .collect::<Result<_, RmtError>>()?;
    let mut rows = Vec::new();
    for (p, pair) in pairs.iter().enumerate() {
        for (s, &size) in config.sizes.iter().enumerate() {
            let values: Vec<f64> = tasks
                .iter()
                .zip(&defects)
                .filter(|((tp, ts, _, _), _)| *tp == p && *ts == s)
                .map(|(_, d)| *d)
                .collect();
            let mean_abs = values.iter().map(|d| d.abs()).sum::<f64>() / values.len() as f64;
            rows.push(DecayRow {
                pair: pair.0.to_string(),
                size,
                mean_abs_defect: mean_abs,
                defects: values,
            });
        }
    }
    let monotone: Vec<(String, bool)> = pairs
        .iter()
        .map(|pair| {
            let series: Vec<f64> = rows
                .iter()
                .filter(|r| r.pair == pair.0)
                .map(|r| r.mean_abs_defect)
                .collect();
            (pair.0.to_string(), series.windows(2).all(|w| w[1] < w[0]))
        })
        .collect();
    let pass = monotone.iter().all(|(_, ok)| *ok);
    let summary = json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "config": config,
        "seeds": seeds,
        "rows": rows,
        "strictly_decreasing": monotone.iter().map(|(p, ok)| (p.clone(), Value::Bool(*ok))).collect::<serde_json::Map<_, _>>(),
        "pass": pass,
    });
    Ok(ExperimentReport {
        experiment,
        histogram: None,
        theory: None,
        l1: None,
        tolerance: 0.0,
        pass,
        summary,
    })
}
