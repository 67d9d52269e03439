//! The three experiment series: errors against analytic true opposites,
//! error curves of an evolving rule base, and guess/opposite selection on
//! 2-D optimization landscapes.

use std::num::NonZeroUsize;

use opplearn_core::{
    build_fis, evolve_update, mine_opposites, mining_dataset, type1_opposite, Bounds, ErrorStats, FisModel, FunctionId,
    History, Matrix, OppositionScheme, OptFunction, Sample, SampleSet, TestFunction, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Environment variable capping the number of runs executed concurrently.
pub const THREADS_ENV: &str = "OPPLEARN_THREADS";

/// A ground-truth opposite set where more than this share is flagged aborts the run.
const MAX_FLAGGED_SHARE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_samples: usize,
    pub n_runs: usize,
    pub scheme: OppositionScheme,
    pub seed: u64,
    pub train_config: TrainConfig,
    #[serde(with = "function_name")]
    pub function_id: FunctionId,
    /// Evaluation points per run, as a fraction of `n_samples`.
    pub test_fraction: f64,
    /// Replaces the default domain of a test function.
    pub domain: Option<Bounds>,
}

impl ExperimentConfig {
    /// 100 samples, 30 runs, T1, one evaluation point per sample.
    pub fn series1(function_id: FunctionId) -> Self {
        Self {
            n_samples: 100,
            n_runs: 30,
            scheme: OppositionScheme::T1,
            seed: 0,
            train_config: TrainConfig::default(),
            function_id,
            test_fraction: 1.0,
            domain: None,
        }
    }

    /// 100 initial samples and 100 held-out points, 5 runs.
    pub fn series2(function_id: FunctionId) -> Self {
        Self {
            n_runs: 5,
            ..Self::series1(function_id)
        }
    }

    /// 1000 samples, 5 runs, evaluation on a tenth as many fresh points.
    pub fn series3(function_id: FunctionId) -> Self {
        Self {
            n_samples: 1000,
            n_runs: 5,
            test_fraction: 0.1,
            ..Self::series1(function_id)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config.validate()?;
        if self.n_runs == 0 {
            return Err(HarnessError::Usage("runs must be at least 1".into()));
        }
        if self.n_samples < self.train_config.n_clusters {
            return Err(HarnessError::Usage(format!(
                "samples ({}) must be at least the number of clusters ({})",
                self.n_samples, self.train_config.n_clusters
            )));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction <= 1.0) {
            return Err(HarnessError::Usage(format!(
                "test fraction {} must lie in (0, 1]",
                self.test_fraction
            )));
        }
        Ok(())
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        match self.function_id {
            FunctionId::Test(id) => match self.domain {
                Some(domain) => Ok(TestFunction::with_domain(id, domain)?),
                None => Ok(TestFunction::new(id)),
            },
            FunctionId::Opt(id) => Err(HarnessError::Usage(format!(
                "'{id}' is an optimization function; this series needs one of f1..f9"
            ))),
        }
    }

    pub fn opt_function(&self) -> Result<OptFunction> {
        match self.function_id {
            FunctionId::Opt(_) if self.domain.is_some() => Err(HarnessError::Usage(
                "--domain applies to test functions only".into(),
            )),
            FunctionId::Opt(id) => Ok(OptFunction::new(id)),
            FunctionId::Test(id) => Err(HarnessError::Usage(format!(
                "'{id}' is a test function; series 3 needs ackley, booth or bukin4"
            ))),
        }
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    fn eval_count(&self) -> usize {
        ((self.test_fraction * self.n_samples as f64).ceil() as usize).max(1)
    }

    fn run_train_config(&self, run: usize) -> TrainConfig {
        self.train_config.clone().with_seed(self.run_seed(run))
    }
}

mod function_name {
    use opplearn_core::FunctionId;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(id: &FunctionId, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(id.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FunctionId, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub series: u8,
    pub function: String,
    pub scheme: String,
    pub opposite_type: String,
    pub run: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

/// Worker count from `OPPLEARN_THREADS`, else the number of logical processors.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(value) => match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(HarnessError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got '{value}'"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, NonZeroUsize::get)),
    }
}

/// Runs `0..n_runs` on a bounded pool; results keep run order.
fn run_parallel<T, F>(n_runs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n_runs).into_par_iter().map(f).collect())
}

/// Uniform draw from `(lo, hi]`, which keeps clear of a pole at `lo`.
fn uniform(rng: &mut ChaCha8Rng, b: Bounds) -> f64 {
    b.hi() - b.width() * rng.random::<f64>()
}

/// `n` uniform samples of `f` over its domain.
pub fn sample_test_function(f: &TestFunction, n: usize, rng: &mut ChaCha8Rng) -> Result<SampleSet> {
    let rows = (0..n)
        .map(|_| {
            let x = uniform(rng, f.domain());
            Ok(Sample {
                inputs: vec![x],
                output: f.eval(x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::new(rows, vec![f.domain()])?)
}

/// `n` uniform samples of `g` over its rectangle.
pub fn sample_opt_function(g: &OptFunction, n: usize, rng: &mut ChaCha8Rng) -> Result<SampleSet> {
    let [b1, b2] = g.domain();
    let rows = (0..n)
        .map(|_| {
            let (x1, x2) = (uniform(rng, b1), uniform(rng, b2));
            Sample {
                inputs: vec![x1, x2],
                output: g.eval(x1, x2),
            }
        })
        .collect();
    Ok(SampleSet::new(rows, g.domain().to_vec())?)
}

/// Mines opposites from `samples` and fits the rule base `(x, y) -> opposite x`.
pub fn train_opposites(samples: &SampleSet, scheme: OppositionScheme, cfg: &TrainConfig) -> Result<FisModel> {
    let pairs = mine_opposites(samples, scheme)?;
    let (inputs, targets) = mining_dataset(&pairs)?;
    Ok(build_fis(&inputs, &targets, cfg)?)
}

/// Smallest interval holding every observed value of input `dim`.
fn observed_bounds(samples: &SampleSet, dim: usize) -> Result<Bounds> {
    let (lo, hi) = samples
        .rows()
        .iter()
        .map(|r| r.inputs[dim])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(Bounds::new(lo, hi)?)
}

/// Per-point errors of the type-I and learned type-II opposites of a test function.
struct OppositeErrors {
    type1: Vec<f64>,
    type2: Vec<f64>,
}

/// Compares both opposites of every point in `eval` with the analytic true
/// opposite under `samples`' output range. The type-I opposite reflects within
/// the observed input interval, whose image is that output range.
fn opposite_errors(
    f: &TestFunction,
    model: &FisModel,
    samples: &SampleSet,
    eval: &[f64],
    scheme: OppositionScheme,
    run: usize,
) -> Result<OppositeErrors> {
    let bounds = observed_bounds(samples, 0)?;
    let range = samples.output_range();
    let mut out = OppositeErrors {
        type1: Vec::with_capacity(eval.len()),
        type2: Vec::with_capacity(eval.len()),
    };
    let mut flagged = 0;
    for &x in eval {
        let truth = f.true_opposite(x, scheme, range)?;
        if truth.flagged {
            flagged += 1;
            continue;
        }
        let y = f.eval(x)?;
        let learned = model.predict(&[x, y])?[0];
        out.type1.push((truth.value - type1_opposite(x, bounds)?).abs());
        out.type2.push((truth.value - learned).abs());
    }
    if out.type1.is_empty() || flagged as f64 > MAX_FLAGGED_SHARE * eval.len() as f64 {
        return Err(HarnessError::SchemeMismatch {
            run,
            flagged,
            total: eval.len(),
        });
    }
    Ok(out)
}

fn over_runs<T>(runs: &[T], pick: impl Fn(&T) -> f64) -> Result<ErrorStats> {
    let means: Vec<f64> = runs.iter().map(pick).collect();
    Ok(ErrorStats::from_values(&means)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series1Run {
    pub run: usize,
    pub type1: ErrorStats,
    pub type2: ErrorStats,
}

/// Per-run errors and their spread over runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series1Report {
    pub runs: Vec<Series1Run>,
    pub type1: ErrorStats,
    pub type2: ErrorStats,
}

/// Type-I and learned type-II opposite errors against the analytic inverse.
///
/// Each run samples the function, trains on the mined opposites and scores
/// both opposites on fresh points drawn from the sampled input interval.
pub fn run_series1(cfg: &ExperimentConfig) -> Result<Series1Report> {
    cfg.validate()?;
    let f = cfg.test_function()?;
    let runs = run_parallel(cfg.n_runs, |run| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seed(run));
        let samples = sample_test_function(&f, cfg.n_samples, &mut rng)?;
        let model = train_opposites(&samples, cfg.scheme, &cfg.run_train_config(run))?;
        let bounds = observed_bounds(&samples, 0)?;
        let eval: Vec<f64> = (0..cfg.eval_count()).map(|_| uniform(&mut rng, bounds)).collect();
        let errors = opposite_errors(&f, &model, &samples, &eval, cfg.scheme, run)?;
        Ok(Series1Run {
            run,
            type1: ErrorStats::from_values(&errors.type1)?,
            type2: ErrorStats::from_values(&errors.type2)?,
        })
    })?;
    Ok(Series1Report {
        type1: over_runs(&runs, |r| r.type1.mean)?,
        type2: over_runs(&runs, |r| r.type2.mean)?,
        runs,
    })
}

impl Series1Report {
    pub fn rows(&self, cfg: &ExperimentConfig) -> Vec<ResultRow> {
        self.runs
            .iter()
            .flat_map(|r| {
                [("type1", r.type1), ("type2", r.type2)]
                    .map(|(kind, s)| result_row(1, cfg, kind, r.run, s))
            })
            .collect()
    }
}

fn result_row(series: u8, cfg: &ExperimentConfig, kind: &str, run: usize, s: ErrorStats) -> ResultRow {
    ResultRow {
        series,
        function: cfg.function_id.as_str().to_string(),
        scheme: cfg.scheme.as_str().to_string(),
        opposite_type: kind.to_string(),
        run,
        mean_error: s.mean,
        std_error: s.std,
    }
}

/// Held-out type-II error after the model has seen `n_seen` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n_seen: usize,
    pub errors: ErrorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series2Run {
    pub run: usize,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series2Report {
    pub runs: Vec<Series2Run>,
    /// Spread over runs of the per-run held-out mean at each step.
    pub curve: Vec<CurvePoint>,
}

/// Trains on `initial_n` samples, then feeds samples one at a time up to
/// `final_n`, recording the held-out type-II error after every update.
///
/// Each update re-mines the accumulated samples under their current output
/// range and warm-starts the rule base from the previous one.
pub fn run_series2(cfg: &ExperimentConfig, initial_n: usize, final_n: usize) -> Result<Series2Report> {
    cfg.validate()?;
    let f = cfg.test_function()?;
    if initial_n < cfg.train_config.n_clusters {
        return Err(HarnessError::Usage(format!(
            "initial ({initial_n}) must be at least the number of clusters ({})",
            cfg.train_config.n_clusters
        )));
    }
    if final_n <= initial_n {
        return Err(HarnessError::Usage(format!(
            "final ({final_n}) must exceed initial ({initial_n})"
        )));
    }
    let runs = run_parallel(cfg.n_runs, |run| series2_run(cfg, &f, initial_n, final_n, run))?;
    let curve = (0..final_n - initial_n)
        .map(|step| {
            Ok(CurvePoint {
                n_seen: runs[0].curve[step].n_seen,
                errors: over_runs(&runs, |r| r.curve[step].errors.mean)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Series2Report { runs, curve })
}

fn series2_run(cfg: &ExperimentConfig, f: &TestFunction, initial_n: usize, final_n: usize, run: usize) -> Result<Series2Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seed(run));
    let stream = sample_test_function(f, final_n, &mut rng)?;
    let mut seen = SampleSet::new(stream.rows()[..initial_n].to_vec(), vec![f.domain()])?;
    // held-out points stay inside every later observed interval
    let held_bounds = observed_bounds(&seen, 0)?;
    let held_out: Vec<f64> = (0..cfg.eval_count()).map(|_| uniform(&mut rng, held_bounds)).collect();

    let mut model = train_opposites(&seen, cfg.scheme, &cfg.run_train_config(run))?;
    let mut curve = Vec::with_capacity(final_n - initial_n);
    for sample in &stream.rows()[initial_n..] {
        seen.push(sample.clone())?;
        let (inputs, targets) = mining_dataset(&mine_opposites(&seen, cfg.scheme)?)?;
        let last = inputs.rows() - 1;
        let mut history = History::new(leading_rows(&inputs, last)?, leading_rows(&targets, last)?)?;
        model = evolve_update(
            &model,
            &trailing_row(&inputs, last)?,
            &trailing_row(&targets, last)?,
            &mut history,
        )?;
        let errors = opposite_errors(f, &model, &seen, &held_out, cfg.scheme, run)?;
        curve.push(CurvePoint {
            n_seen: seen.len(),
            errors: ErrorStats::from_values(&errors.type2)?,
        });
    }
    Ok(Series2Run { run, curve })
}

fn leading_rows(m: &Matrix, n: usize) -> Result<Matrix> {
    Ok(Matrix::from_row_major(n, m.cols(), m.as_slice()[..n * m.cols()].to_vec())?)
}

fn trailing_row(m: &Matrix, i: usize) -> Result<Matrix> {
    Ok(Matrix::from_row_major(1, m.cols(), m.row(i).to_vec())?)
}

impl Series2Report {
    /// One row per run holding the held-out error after the final update.
    pub fn rows(&self, cfg: &ExperimentConfig) -> Vec<ResultRow> {
        self.runs
            .iter()
            .filter_map(|r| r.curve.last().map(|p| result_row(2, cfg, "type2", r.run, p.errors)))
            .collect()
    }
}

/// Outcome of weighing a guess against its opposite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub chosen: [f64; 2],
    pub err_x: f64,
    pub err_opp: f64,
}

/// Keeps whichever of `x` and `x_opp` scores lower on `g`; ties keep `x`.
/// Both points are clamped into the domain first.
pub fn obl_select(g: &OptFunction, x: [f64; 2], x_opp: [f64; 2]) -> Selection {
    let x = g.clamp(x);
    let x_opp = g.clamp(x_opp);
    let err_x = g.eval(x[0], x[1]);
    let err_opp = g.eval(x_opp[0], x_opp[1]);
    Selection {
        chosen: if err_opp < err_x { x_opp } else { x },
        err_x,
        err_opp,
    }
}

/// Errors of one evaluation point: the guess, both opposites, and the
/// better of the guess and each opposite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuessErrors {
    pub random: f64,
    pub type2: f64,
    pub type1: f64,
    pub select_type2: f64,
    pub select_type1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series3Run {
    pub run: usize,
    pub points: Vec<GuessErrors>,
    pub random: ErrorStats,
    pub type2: ErrorStats,
    pub type1: ErrorStats,
    pub select_type2: ErrorStats,
    pub select_type1: ErrorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series3Report {
    pub runs: Vec<Series3Run>,
    pub random: ErrorStats,
    pub type2: ErrorStats,
    pub type1: ErrorStats,
    pub select_type2: ErrorStats,
    pub select_type1: ErrorStats,
}

impl Series3Report {
    /// Per-point errors of one kind pooled over all runs.
    pub fn pooled(&self, pick: impl Fn(&GuessErrors) -> f64) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.points.iter().map(&pick)).collect()
    }

    pub fn rows(&self, cfg: &ExperimentConfig) -> Vec<ResultRow> {
        self.runs
            .iter()
            .flat_map(|r| {
                [
                    ("random", r.random),
                    ("type2", r.type2),
                    ("type1", r.type1),
                    ("select_type2", r.select_type2),
                    ("select_type1", r.select_type1),
                ]
                .map(|(kind, s)| result_row(3, cfg, kind, r.run, s))
            })
            .collect()
    }
}

/// Random guesses versus their learned and type-I opposites on a 2-D
/// landscape whose minimum is 0, so the error of a point is its value.
pub fn run_series3(cfg: &ExperimentConfig) -> Result<Series3Report> {
    cfg.validate()?;
    let g = cfg.opt_function()?;
    let runs = run_parallel(cfg.n_runs, |run| series3_run(cfg, &g, run))?;
    Ok(Series3Report {
        random: over_runs(&runs, |r| r.random.mean)?,
        type2: over_runs(&runs, |r| r.type2.mean)?,
        type1: over_runs(&runs, |r| r.type1.mean)?,
        select_type2: over_runs(&runs, |r| r.select_type2.mean)?,
        select_type1: over_runs(&runs, |r| r.select_type1.mean)?,
        runs,
    })
}

fn series3_run(cfg: &ExperimentConfig, g: &OptFunction, run: usize) -> Result<Series3Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seed(run));
    let samples = sample_opt_function(g, cfg.n_samples, &mut rng)?;
    let model = train_opposites(&samples, cfg.scheme, &cfg.run_train_config(run))?;
    let [b1, b2] = g.domain();
    let points = (0..cfg.eval_count())
        .map(|_| {
            let x = [uniform(&mut rng, b1), uniform(&mut rng, b2)];
            let y = g.eval(x[0], x[1]);
            let learned = model.predict(&[x[0], x[1], y])?;
            let learned = [learned[0], learned[1]];
            let reflected = [type1_opposite(x[0], b1)?, type1_opposite(x[1], b2)?];
            let with_learned = obl_select(g, x, learned);
            let with_reflected = obl_select(g, x, reflected);
            Ok(GuessErrors {
                random: y,
                type2: with_learned.err_opp,
                type1: with_reflected.err_opp,
                select_type2: with_learned.err_x.min(with_learned.err_opp),
                select_type1: with_reflected.err_x.min(with_reflected.err_opp),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = |pick: fn(&GuessErrors) -> f64| -> Result<ErrorStats> {
        Ok(ErrorStats::from_values(&points.iter().map(pick).collect::<Vec<_>>())?)
    };
    Ok(Series3Run {
        run,
        random: stats(|p| p.random)?,
        type2: stats(|p| p.type2)?,
        type1: stats(|p| p.type1)?,
        select_type2: stats(|p| p.select_type2)?,
        select_type1: stats(|p| p.select_type1)?,
        points,
    })
}
