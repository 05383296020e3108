//! Experiment specs, seeded parallel runs and CSV output.

use std::io::Write;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use snapmem_core::dba::{build_sensorium, SensorPlan};
use snapmem_core::{err, ground_truth, Agent, AgentConfig, Controller, DirMatrix, Environment, LearnerKind, TruthMode};

use crate::formats::TraceLine;

pub const CSV_HEADER: [&str; 8] = ["setting", "agent", "param_index", "param_value", "run_id", "t", "metric", "value"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    Path,
    Cycle,
    Grid,
    Random,
    PuncturedGrid,
    Rail,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::Path => "path",
            Setting::Cycle => "cycle",
            Setting::Grid => "grid",
            Setting::Random => "random",
            Setting::PuncturedGrid => "punctured-grid",
            Setting::Rail => "rail",
        }
    }

    /// Environment with `n` sensors (grids use `n/2` per axis).
    pub fn make<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<Environment> {
        Ok(match self {
            Setting::Path => Environment::path(n),
            Setting::Cycle => Environment::cycle(n),
            Setting::Grid => Environment::grid(n / 2, n / 2),
            Setting::Random => Environment::random_fields(n, rng),
            Setting::PuncturedGrid => Environment::punctured_grid(n / 2, (n / 4, n / 4))?,
            Setting::Rail => Environment::circular_rail(n)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Empirical,
    Discounted,
    /// Empirical snapshot of every transition, learning off.
    Preloaded,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Empirical => "empirical",
            AgentKind::Discounted => "discounted",
            AgentKind::Preloaded => "preloaded",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrReference {
    /// Footprint containment.
    #[default]
    True,
    /// Derived graph of the stationary measure at the run's threshold.
    Thresholded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrScope {
    #[default]
    Position,
    AllLiterals,
}

/// Ten thresholds spread linearly over `[1/8000, 1/4]`.
pub fn default_taus() -> Vec<f64> {
    let (lo, hi) = (1.0 / 8000.0, 0.25);
    (0..10).map(|k| lo + (hi - lo) * k as f64 / 9.0).collect()
}

/// `q = 1 - 2^-(k+2)`, `k = 0..=9`.
pub fn default_qs() -> Vec<f64> {
    (0..10).map(|k| 1.0 - 0.5f64.powi(k + 2)).collect()
}

fn default_size() -> usize {
    20
}
fn default_runs() -> usize {
    50
}
fn default_steps() -> u64 {
    8000
}
fn default_interval() -> u64 {
    10
}
fn default_tau() -> f64 {
    1.0 / 8000.0
}
fn default_true() -> bool {
    true
}
fn default_period() -> usize {
    5
}
fn default_q() -> f64 {
    1.0 - 0.5f64.powi(7)
}

/// Random-walk learning sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnSpec {
    pub setting: Setting,
    #[serde(default = "default_size")]
    pub sensors: usize,
    pub agent: AgentKind,
    /// Thresholds (empirical) or decay parameters (discounted) to sweep.
    #[serde(default)]
    pub sweep: Vec<f64>,
    /// Threshold of discounted agents.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_steps")]
    pub steps: u64,
    pub seed: Option<u64>,
    #[serde(default = "default_interval")]
    pub sample_interval: u64,
    #[serde(default)]
    pub err_reference: ErrReference,
    #[serde(default)]
    pub err_scope: ErrScope,
    #[serde(default = "default_true")]
    pub equivalences: bool,
}

impl LearnSpec {
    pub fn new(setting: Setting, agent: AgentKind) -> Self {
        LearnSpec {
            setting,
            sensors: 20,
            agent,
            sweep: match agent {
                AgentKind::Discounted => default_qs(),
                _ => default_taus(),
            },
            tau: default_tau(),
            runs: 50,
            steps: 8000,
            seed: None,
            sample_interval: 10,
            err_reference: ErrReference::True,
            err_scope: ErrScope::Position,
            equivalences: true,
        }
    }

    pub fn validate(&self) -> Result<u64> {
        let Some(seed) = self.seed else { bail!("an explicit seed is required (--seed or \"seed\" in the config)") };
        if self.runs == 0 || self.steps == 0 || self.sample_interval == 0 {
            bail!("runs, steps and sample_interval must be at least 1");
        }
        if self.sweep.is_empty() {
            bail!("parameter sweep is empty");
        }
        if self.agent == AgentKind::Preloaded {
            bail!("preloaded agents do not learn");
        }
        Ok(seed)
    }
}

/// One navigating agent of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NavAgent {
    pub kind: AgentKind,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

impl NavAgent {
    fn param_value(&self) -> f64 {
        match self.kind {
            AgentKind::Discounted => self.q,
            _ => 1.0,
        }
    }
}

/// Excitation-driven navigation toward a random target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NavigateSpec {
    pub setting: Setting,
    #[serde(default = "default_size")]
    pub sensors: usize,
    pub agents: Vec<NavAgent>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_steps")]
    pub steps: u64,
    pub seed: Option<u64>,
    #[serde(default = "default_interval")]
    pub sample_interval: u64,
    #[serde(default = "default_period")]
    pub random_period: usize,
    #[serde(default = "default_true")]
    pub equivalences: bool,
}

impl NavigateSpec {
    pub fn new(setting: Setting) -> Self {
        NavigateSpec {
            setting,
            sensors: 20,
            agents: vec![
                NavAgent { kind: AgentKind::Empirical, q: default_q(), tau: default_tau() },
                NavAgent { kind: AgentKind::Discounted, q: default_q(), tau: default_tau() },
            ],
            runs: 50,
            steps: 8000,
            seed: None,
            sample_interval: 10,
            random_period: 5,
            equivalences: true,
        }
    }

    pub fn validate(&self) -> Result<u64> {
        let Some(seed) = self.seed else { bail!("an explicit seed is required (--seed or \"seed\" in the config)") };
        if self.runs == 0 || self.steps == 0 || self.sample_interval == 0 || self.random_period == 0 {
            bail!("runs, steps, sample_interval and random_period must be at least 1");
        }
        if self.agents.is_empty() {
            bail!("no agents to run");
        }
        Ok(seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub setting: String,
    pub agent: String,
    pub param_index: usize,
    pub param_value: f64,
    pub run_id: usize,
    pub t: u64,
    pub metric: String,
    pub value: f64,
}

/// Independent stream for each `(param_index, run_id)`.
pub fn run_rng(seed: u64, param_index: usize, run_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((param_index as u64) << 32) | run_id as u64);
    rng
}

fn agent_rng(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.random())
}

/// Rows of one learning run.
pub fn learning_run(spec: &LearnSpec, seed: u64, param_index: usize, run_id: usize) -> Result<Vec<Row>> {
    let p = spec.sweep[param_index];
    let mut rng = run_rng(seed, param_index, run_id);
    let mut env = spec.setting.make(spec.sensors, &mut rng)?;
    let start = rng.random_range(0..env.n_positions());
    env.set_position(start);
    let (learner, tau) = match spec.agent {
        AgentKind::Discounted => (LearnerKind::Discounted { q: p }, spec.tau),
        _ => (LearnerKind::Empirical, p),
    };
    let layout = build_sensorium(&env, SensorPlan::POSITION_ONLY);
    let scope: Vec<usize> = match spec.err_scope {
        ErrScope::Position => layout.loc_sensors(),
        ErrScope::AllLiterals => (0..layout.sensorium.len()).collect(),
    };
    let mode = match spec.err_reference {
        ErrReference::True => TruthMode::True,
        ErrReference::Thresholded => TruthMode::Thresholded(tau),
    };
    let reference = ground_truth(&env, &scope, mode)?;
    let config = AgentConfig { learner, tau, controller: Controller::Random, equivalences: spec.equivalences };
    let mut agent = Agent::new(layout, config, agent_rng(&mut rng))?;
    let mut rows = Vec::with_capacity((spec.steps / spec.sample_interval) as usize);
    for step in 1..=spec.steps {
        agent.step(&mut env)?;
        if step % spec.sample_interval == 0 {
            let learned = DirMatrix::from_graph(agent.snapshot().graph(), &scope);
            let e = err(&learned, &reference)?;
            rows.push(Row {
                setting: spec.setting.name().into(),
                agent: spec.agent.name().into(),
                param_index,
                param_value: p,
                run_id,
                t: step,
                metric: "err".into(),
                value: e as f64,
            });
        }
    }
    Ok(rows)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    Ok(b.build()?)
}

/// All learning rows, ordered by parameter, run and time.
pub fn run_learning(spec: &LearnSpec, jobs: Option<usize>) -> Result<Vec<Row>> {
    let seed = spec.validate()?;
    let tasks: Vec<(usize, usize)> = (0..spec.sweep.len()).flat_map(|p| (0..spec.runs).map(move |r| (p, r))).collect();
    let out: Vec<Vec<Row>> = pool(jobs)?
        .install(|| tasks.par_iter().map(|&(p, r)| learning_run(spec, seed, p, r)).collect::<Result<_>>())?;
    Ok(out.into_iter().flatten().collect())
}

/// One navigation run. Returns its rows and, if asked, its trace.
pub fn navigation_run(
    spec: &NavigateSpec,
    seed: u64,
    param_index: usize,
    run_id: usize,
    trace: bool,
) -> Result<(Vec<Row>, Vec<TraceLine>)> {
    let a = &spec.agents[param_index];
    let mut rng = run_rng(seed, param_index, run_id);
    let mut env = spec.setting.make(spec.sensors, &mut rng)?.with_wait();
    let start = rng.random_range(0..env.n_positions());
    let target = rng.random_range(0..env.n_positions());
    env.set_position(start);
    env.set_target(target);
    let layout = build_sensorium(&env, SensorPlan::NAVIGATION);
    let learner = match a.kind {
        AgentKind::Discounted => LearnerKind::Discounted { q: a.q },
        _ => LearnerKind::Empirical,
    };
    let config = AgentConfig {
        learner,
        tau: a.tau,
        controller: Controller::Excitation { period: spec.random_period },
        equivalences: spec.equivalences,
    };
    let arng = agent_rng(&mut rng);
    let mut agent = match a.kind {
        AgentKind::Preloaded => Agent::preloaded(layout, config, &env, arng)?,
        _ => Agent::new(layout, config, arng)?,
    };
    let row = |t: u64, d: usize| Row {
        setting: spec.setting.name().into(),
        agent: a.kind.name().into(),
        param_index,
        param_value: a.param_value(),
        run_id,
        t,
        metric: "deviation".into(),
        value: d as f64,
    };
    let mut rows = vec![row(0, env.distance())];
    let mut lines = Vec::new();
    for step in 1..=spec.steps {
        let rec = agent.step(&mut env)?;
        if trace {
            lines.push(TraceLine::new(run_id, &agent.layout().sensorium, env.action_names(), &rec));
        }
        if step % spec.sample_interval == 0 {
            rows.push(row(step, env.distance()));
        }
    }
    Ok((rows, lines))
}

pub fn run_navigation(spec: &NavigateSpec, jobs: Option<usize>) -> Result<Vec<Row>> {
    let seed = spec.validate()?;
    let tasks: Vec<(usize, usize)> = (0..spec.agents.len()).flat_map(|p| (0..spec.runs).map(move |r| (p, r))).collect();
    let out: Vec<Vec<Row>> = pool(jobs)?.install(|| {
        tasks.par_iter().map(|&(p, r)| navigation_run(spec, seed, p, r, false).map(|x| x.0)).collect::<Result<_>>()
    })?;
    Ok(out.into_iter().flatten().collect())
}

pub fn write_rows<W: Write>(w: W, rows: &[Row]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_rows_to(path: &std::path::Path, rows: &[Row]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_rows(std::io::BufWriter::new(f), rows).with_context(|| format!("writing {}", path.display()))
}

/// Mean of `metric` at time `t` over the rows of one parameter.
pub fn mean_at(rows: &[Row], param_index: usize, t: u64) -> Option<f64> {
    let v: Vec<f64> = rows.iter().filter(|r| r.param_index == param_index && r.t == t).map(|r| r.value).collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}
