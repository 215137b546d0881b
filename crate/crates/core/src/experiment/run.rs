use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::evaluation::{empirical_error, mc_error, ErrorEstimate};
use crate::experiment::config::{
    ExperimentConfig, LearnerSpec, TAG_EVAL, TAG_POOL, TAG_RUN, TAG_VALIDATION,
};
use crate::geometry::{self, Hyperplane};
use crate::learners::{
    localize, monomial_count, realizable_sample_bound, repeat_and_validate, train_averaging,
    train_kearns_li, train_lp_realizable, train_poly_regression, BandOracle, HingeBandOracle,
    KearnsLiConfig, KearnsLiOutcome, KearnsLiPlan, LocalizationSchedule, Model, PolyHingeBandOracle,
    RoundDiagnostics, RoundParams, ScheduleConstants, ScheduleMode,
};
use crate::synthdata::stream::derive_seed;
use crate::synthdata::{generate, read_csv, Dataset, PoolSampler, Sampler, StreamSampler};

/// Where a run failed; decides the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Invalid configuration or input file.
    Config(Error),
    /// Training or evaluation failed.
    Learner(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Learner(_) => 3,
        }
    }

    pub fn error(&self) -> &Error {
        match self {
            RunError::Config(e) | RunError::Learner(e) => e,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Learner(e) => write!(f, "learner error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Every constant a run used, including the uncapped theoretical counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConstants {
    pub w_star: Hyperplane,
    /// `⌈(4/ε)(d ln(12/ε) + ln(2/δ))⌉` at the configured ε, δ.
    pub realizable_sample_bound: usize,
    pub ci_level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kearns_li: Option<KearnsLiCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ResolvedSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<PolyCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KearnsLiCounts {
    #[serde(flatten)]
    pub plan: KearnsLiPlan,
    pub repetition_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedSchedule {
    pub mode: ScheduleMode,
    pub constants: ScheduleConstants,
    pub c0: f64,
    pub c_gamma: f64,
    pub rounds: usize,
    pub per_round: Vec<RoundParams>,
    pub quota: usize,
    pub hinge_iters: usize,
    pub step_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_c0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyCounts {
    pub degree: usize,
    pub features: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyDiagnostics {
    pub l1_error: f64,
    pub train_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_run: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kearns_li: Option<KearnsLiOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localization: Option<Vec<RoundDiagnostics>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warm_start_angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<PolyDiagnostics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub learner: &'static str,
    pub constants: ResolvedConstants,
    pub model: Box<RawValue>,
    pub mc_error: ErrorEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_error: Option<f64>,
    /// Angle to `w*`, for halfspace models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    pub diagnostics: Diagnostics,
    pub wall_ms: u128,
    pub version: &'static str,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn model(&self) -> Model {
        Model::from_json(self.model.get()).expect("report holds a valid model")
    }
}

/// The training sample the config asks for.
pub fn training_data(config: &ExperimentConfig, w_star: &Hyperplane) -> std::result::Result<Dataset, RunError> {
    match &config.train_data {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| RunError::Config(Error::Io(format!("{}: {e}", path.display()))))?;
            let s = read_csv(BufReader::new(file)).map_err(RunError::Config)?;
            if s.dim() != config.marginal.d {
                return Err(RunError::Config(Error::DimensionMismatch {
                    expected: config.marginal.d,
                    got: s.dim(),
                }));
            }
            Ok(s)
        }
        None => generate(&config.marginal, w_star, &config.noise, config.n_train, config.seed)
            .map_err(RunError::Config),
    }
}

/// The `n_train` generated samples a config describes, ignoring `train_data`.
pub fn generate_dataset(config: &ExperimentConfig) -> std::result::Result<Dataset, RunError> {
    config.validate().map_err(RunError::Config)?;
    let w_star = config.resolve_w_star().map_err(RunError::Config)?;
    generate(&config.marginal, &w_star, &config.noise, config.n_train, config.seed).map_err(RunError::Config)
}

/// Fresh draws past the training sample for per-sample noise; resampling
/// of the training sample otherwise.
fn sampler_for(config: &ExperimentConfig, w_star: &Hyperplane, train: &Dataset) -> Result<Box<dyn Sampler>> {
    if config.noise.is_per_sample() && config.train_data.is_none() {
        let mut s = StreamSampler::new(config.marginal, w_star.clone(), config.noise, config.seed)?;
        s.skip_to(config.n_train as u64);
        Ok(Box::new(s))
    } else {
        Ok(Box::new(PoolSampler::new(train.clone(), derive_seed(config.seed, TAG_POOL, 0))?))
    }
}

fn schedule_of(config: &ExperimentConfig) -> Result<LocalizationSchedule> {
    LocalizationSchedule::new(config.schedule.constants, config.schedule.mode, config.epsilon)
}

fn resolve(config: &ExperimentConfig, w_star: &Hyperplane) -> Result<ResolvedConstants> {
    let d = config.marginal.d;
    let mut out = ResolvedConstants {
        w_star: w_star.clone(),
        realizable_sample_bound: realizable_sample_bound(d, config.epsilon, config.delta)?,
        ci_level: 0.95,
        kearns_li: None,
        schedule: None,
        poly: None,
    };
    match &config.learner {
        LearnerSpec::KearnsLi { repetition_cap } => {
            let plan = KearnsLiPlan::new(
                d,
                &KearnsLiConfig {
                    epsilon: config.epsilon,
                    delta: config.delta,
                    repetition_cap: *repetition_cap,
                },
            )?;
            out.kearns_li = Some(KearnsLiCounts {
                plan,
                repetition_cap: *repetition_cap,
            });
        }
        LearnerSpec::Poly { degree, runs, .. } => {
            out.poly = Some(PolyCounts {
                degree: *degree,
                features: monomial_count(d, *degree),
                runs: Some(*runs),
            });
        }
        LearnerSpec::LocalizeHinge {} | LearnerSpec::LocalizePolyHinge { .. } => {
            let sched = schedule_of(config)?;
            let mut rs = ResolvedSchedule {
                mode: sched.mode,
                constants: sched.constants,
                c0: sched.c0,
                c_gamma: sched.c_gamma,
                rounds: sched.rounds,
                per_round: sched.all_rounds(),
                quota: config.schedule.quota,
                hinge_iters: config.schedule.hinge.iters,
                step_radius: config.schedule.hinge.step_radius,
                oracle_nu: None,
                g_c0: None,
            };
            if let LearnerSpec::LocalizePolyHinge { degree, nu, g_scale } = &config.learner {
                rs.oracle_nu = Some(nu.unwrap_or_else(|| config.noise_nu()));
                rs.g_c0 = Some(g_scale * sched.c0.powi(4));
                out.poly = Some(PolyCounts {
                    degree: *degree,
                    features: monomial_count(d, *degree),
                    runs: None,
                });
            }
            out.schedule = Some(rs);
        }
        LearnerSpec::Lp {} | LearnerSpec::Averaging {} => {}
    }
    Ok(out)
}

fn train(
    config: &ExperimentConfig,
    w_star: &Hyperplane,
    train: &Dataset,
) -> Result<(Model, Diagnostics)> {
    let mut diag = Diagnostics::default();
    let model = match &config.learner {
        LearnerSpec::Lp {} => match train_lp_realizable(train)? {
            Some(w) => Model::Halfspace(w),
            None => return Err(Error::NoFeasibleSeparator),
        },
        LearnerSpec::Averaging {} => Model::Halfspace(train_averaging(train)?),
        LearnerSpec::KearnsLi { repetition_cap } => {
            let mut sampler = sampler_for(config, w_star, train)?;
            let out = train_kearns_li(
                sampler.as_mut(),
                &KearnsLiConfig {
                    epsilon: config.epsilon,
                    delta: config.delta,
                    repetition_cap: *repetition_cap,
                },
            )?;
            let model = Model::Halfspace(out.model.clone());
            diag.kearns_li = Some(out);
            model
        }
        LearnerSpec::Poly {
            degree,
            runs,
            n_validation,
        } => {
            if *runs == 1 {
                let fit = train_poly_regression(train, *degree)?;
                diag.poly = Some(PolyDiagnostics {
                    l1_error: fit.l1_error,
                    train_error: fit.train_error,
                    chosen_run: None,
                    validation_errors: None,
                });
                Model::PolyThreshold(fit.model)
            } else {
                let fresh = |tag: u64, i: u64, n: usize| {
                    generate(&config.marginal, w_star, &config.noise, n, derive_seed(config.seed, tag, i))
                };
                let validation = fresh(TAG_VALIDATION, 0, *n_validation)?;
                let chosen = repeat_and_validate(
                    |i| {
                        let s = if i == 0 { train.clone() } else { fresh(TAG_RUN, i as u64, train.len())? };
                        train_poly_regression(&s, *degree)
                    },
                    *runs,
                    &validation,
                )?;
                diag.poly = Some(PolyDiagnostics {
                    l1_error: chosen.model.l1_error,
                    train_error: chosen.model.train_error,
                    chosen_run: Some(chosen.index),
                    validation_errors: Some(chosen.errors),
                });
                Model::PolyThreshold(chosen.model.model)
            }
        }
        LearnerSpec::LocalizeHinge {} | LearnerSpec::LocalizePolyHinge { .. } => {
            let sched = schedule_of(config)?;
            let w1 = train_averaging(train)?;
            diag.warm_start_angle = Some(geometry::angle(&w1, w_star));
            let oracle: Box<dyn BandOracle> = match &config.learner {
                LearnerSpec::LocalizePolyHinge { degree, nu, g_scale } => Box::new(PolyHingeBandOracle {
                    quota: config.schedule.quota,
                    degree: *degree,
                    nu: nu.unwrap_or_else(|| config.noise_nu()),
                    hinge: config.schedule.hinge,
                    g_scale: *g_scale,
                    c0: sched.c0,
                }),
                _ => Box::new(HingeBandOracle {
                    quota: config.schedule.quota,
                    hinge: config.schedule.hinge,
                }),
            };
            let mut sampler = sampler_for(config, w_star, train)?;
            let run = localize(sampler.as_mut(), &sched, oracle.as_ref(), &w1, config.delta)?;
            diag.localization = Some(run.rounds);
            Model::Halfspace(run.w)
        }
    };
    Ok((model, diag))
}

/// Generate, train, evaluate and report.
pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentReport, RunError> {
    let start = Instant::now();
    config.validate().map_err(RunError::Config)?;
    let w_star = config.resolve_w_star().map_err(RunError::Config)?;
    let constants = resolve(config, &w_star).map_err(RunError::Config)?;
    let data = training_data(config, &w_star)?;
    if data.is_empty() && !matches!(config.learner, LearnerSpec::KearnsLi { .. }) {
        return Err(RunError::Config(Error::InvalidParameter(
            "this learner needs n_train >= 1".into(),
        )));
    }
    let (model, diagnostics) = train(config, &w_star, &data).map_err(RunError::Learner)?;
    let eval_seed = derive_seed(config.seed, TAG_EVAL, 0);
    let estimate = mc_error(&model, &config.marginal, &w_star, &config.noise, config.n_eval, eval_seed)
        .map_err(RunError::Learner)?;
    let train_error = if data.is_empty() {
        None
    } else {
        Some(empirical_error(&model, &data).map_err(RunError::Learner)?)
    };
    let angle = model.as_hyperplane().map(|w| geometry::angle(w, &w_star));
    Ok(ExperimentReport {
        config: config.clone(),
        learner: config.learner.name(),
        constants,
        model: model.to_raw_json(),
        mc_error: estimate,
        train_error,
        angle,
        diagnostics,
        wall_ms: start.elapsed().as_millis(),
        version: env!("CARGO_PKG_VERSION"),
    })
}
