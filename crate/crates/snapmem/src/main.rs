use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snapmem::formats::{dual_dot, read_json, DualFile, PocSetFile};
use snapmem::harness::{
    navigation_run, run_learning, run_navigation, write_rows_to, AgentKind, LearnSpec, NavigateSpec, Setting,
};
use snapmem::selftest;
use snapmem_core::{Cubing, CubingLimits};

#[derive(Parser)]
#[command(name = "snapmem", version, about = "Snapshot memory experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    sample_interval: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random-walk learning sweep; writes learn.csv.
    Learn {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "path")]
        setting: Setting,
        #[arg(long, value_enum, default_value = "empirical")]
        agent: AgentKind,
    },
    /// Excitation-driven navigation; writes navigate.csv.
    Navigate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "path")]
        setting: Setting,
        /// Also write a JSONL cycle trace of one run of each agent.
        #[arg(long)]
        trace: bool,
        /// Run traced by --trace.
        #[arg(long, default_value_t = 0)]
        trace_run: usize,
    },
    /// Print or export the dual graph of a poc set given as JSON.
    Dual {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: DualFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        max_sensors: usize,
        #[arg(long, default_value_t = 1 << 16)]
        max_vertices: usize,
    },
    /// Run the oracle-equivalence suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DualFormat {
    Dot,
    Json,
}

fn apply_common_learn(spec: &mut LearnSpec, c: &Common) {
    if c.seed.is_some() {
        spec.seed = c.seed;
    }
    if let Some(r) = c.runs {
        spec.runs = r;
    }
    if let Some(s) = c.steps {
        spec.steps = s;
    }
    if let Some(i) = c.sample_interval {
        spec.sample_interval = i;
    }
}

fn apply_common_nav(spec: &mut NavigateSpec, c: &Common) {
    if c.seed.is_some() {
        spec.seed = c.seed;
    }
    if let Some(r) = c.runs {
        spec.runs = r;
    }
    if let Some(s) = c.steps {
        spec.steps = s;
    }
    if let Some(i) = c.sample_interval {
        spec.sample_interval = i;
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Learn { common, setting, agent } => {
            let mut spec = match &common.config {
                Some(p) => read_json::<LearnSpec>(p)?,
                None => LearnSpec::new(setting, agent),
            };
            apply_common_learn(&mut spec, &common);
            let t0 = Instant::now();
            let rows = run_learning(&spec, common.jobs)?;
            let path = common.out.join("learn.csv");
            write_rows_to(&path, &rows)?;
            eprintln!("wrote {} rows to {} in {:.1?}", rows.len(), path.display(), t0.elapsed());
        }
        Cmd::Navigate { common, setting, trace, trace_run } => {
            let mut spec = match &common.config {
                Some(p) => read_json::<NavigateSpec>(p)?,
                None => NavigateSpec::new(setting),
            };
            apply_common_nav(&mut spec, &common);
            let t0 = Instant::now();
            let rows = run_navigation(&spec, common.jobs)?;
            let path = common.out.join("navigate.csv");
            write_rows_to(&path, &rows)?;
            eprintln!("wrote {} rows to {} in {:.1?}", rows.len(), path.display(), t0.elapsed());
            if trace {
                let seed = spec.validate()?;
                let mut text = String::new();
                for p in 0..spec.agents.len() {
                    let (_, lines) = navigation_run(&spec, seed, p, trace_run, true)?;
                    for l in lines {
                        text.push_str(&serde_json::to_string(&l)?);
                        text.push('\n');
                    }
                }
                write_text(&common.out.join("trace.jsonl"), &text)?;
            }
        }
        Cmd::Dual { input, format, out, max_sensors, max_vertices } => {
            let file: PocSetFile = read_json(&input)?;
            let p = file.to_pocset()?;
            let c = Cubing::build_with(&p, CubingLimits { max_sensors, max_vertices })?;
            let text = match format {
                DualFormat::Dot => dual_dot(&c),
                DualFormat::Json => serde_json::to_string_pretty(&DualFile::from_cubing(&c))? + "\n",
            };
            match out {
                Some(path) => write_text(&path, &text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
        }
        Cmd::Selftest { seed } => {
            let t0 = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let reports = selftest::run_all(&mut rng);
            let mut bad = 0;
            for r in &reports {
                let status = if r.ok() { "PASS" } else { "FAIL" };
                println!("{status} {}: {} passed, {} failed, {} skipped", r.name, r.passed, r.failed, r.skipped);
                if let Some(f) = &r.first_failure {
                    println!("  first failure: {f}");
                }
                if !r.ok() {
                    bad += 1;
                }
            }
            println!("selftest finished in {:.1?}", t0.elapsed());
            if bad > 0 {
                bail!("{bad} suite(s) failed");
            }
        }
    }
    Ok(())
}
