use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seedlab_core::oracle::{
    all_ones, brute_force_opt, exact_expected_cost, one_heavy, removal_experiment, Adversary,
    Decrement, EnumerationBudget, RemovalExperimentConfig,
};
use seedlab_core::{Error, Result};
use seedlab_harness::{exit_code, run_on_dataset, sweep, Params, SweepAxis};

#[derive(Parser)]
#[command(name = "seedlab", version, about = "k-means++ seeding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo trials of one configuration.
    Run(Common),
    /// One run per value of a parameter axis, summarised as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// e.g. `ell=1,2,4,8`
        #[arg(long)]
        axis: Option<String>,
    },
    /// Exact optimum and, if enumerable, exact expected seeding cost.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = EnumerationBudget::default().max_outcomes)]
        budget: u64,
    },
    /// The abstract removal process on `z` numbers of average one.
    Removal(RemovalArgs),
}

#[derive(Args)]
struct Common {
    /// simplex:k=32, line:n=1000, gauss:k=16,per=50,d=2,sep=100,sd=1,seed=7 or file:PATH
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// plain, greedy, noisy or moderate
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    /// identity, boost_covered, boost_far or random_within_bounds
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    pmix: Option<f64>,
    /// single or greedy
    #[arg(long)]
    first_step: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Refine every seeding with Lloyd iterations.
    #[arg(long)]
    lloyd: bool,
    /// Force coverage and event tracking on or off.
    #[arg(long)]
    events: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key=value` lines that override the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn params(&self, axis: Option<&str>) -> Result<Params> {
        let mut p = Params::default();
        let flags: [(&str, Option<String>); 14] = [
            ("instance", self.instance.clone()),
            ("k", self.k.map(|v| v.to_string())),
            ("algo", self.algo.clone()),
            ("ell", self.ell.map(|v| v.to_string())),
            ("eps1", self.eps1.map(|v| v.to_string())),
            ("eps2", self.eps2.map(|v| v.to_string())),
            ("strategy", self.strategy.clone()),
            ("pmix", self.pmix.map(|v| v.to_string())),
            ("first_step", self.first_step.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("events", self.events.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|v| v.display().to_string())),
            ("axis", axis.map(str::to_string)),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                p.set(key, &v)?;
            }
        }
        p.lloyd = self.lloyd;
        if let Some(path) = &self.config {
            p.apply_config_text(&fs::read_to_string(path)?)?;
        }
        Ok(p)
    }
}

#[derive(Args)]
struct RemovalArgs {
    #[arg(long, default_value_t = 1024)]
    z: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Defaults to z/2.
    #[arg(long)]
    steps: Option<usize>,
    /// remove_min, remove_max or none
    #[arg(long, default_value = "remove_min")]
    adversary: String,
    /// none or halve
    #[arg(long, default_value = "none")]
    decrement: String,
    /// ones or heavy
    #[arg(long, default_value = "heavy")]
    numbers: String,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let p = common.params(None)?;
            let x = p.instance_spec()?.build()?;
            let cfg = p.experiment(x.labels().is_some())?;
            let report = run_on_dataset(&cfg, &x)?;
            print!("{}", report.render());
        }
        Command::Sweep { common, axis } => {
            let p = common.params(axis.as_deref())?;
            let x = p.instance_spec()?.build()?;
            let cfg = p.experiment(x.labels().is_some())?;
            let axis: SweepAxis = p
                .axis
                .as_deref()
                .ok_or_else(|| Error::Input("sweep needs --axis".into()))?
                .parse()?;
            let table = sweep(&cfg, &axis)?;
            print!("{}", table.to_csv()?);
        }
        Command::Oracle { common, budget } => {
            let p = common.params(None)?;
            let x = p.instance_spec()?.build()?;
            let k =
                p.k.or_else(|| x.num_clusters())
                    .ok_or_else(|| Error::Input("oracle needs --k".into()))?;
            let budget = EnumerationBudget {
                max_outcomes: budget,
            };
            let (opt, labels) = brute_force_opt(&x, k, &budget)?;
            let variant = p.algorithm()?.to_variant()?;
            let expected = exact_expected_cost(&x, k, &variant, &budget)?;
            println!(
                "{}",
                json(&serde_json::json!({
                    "sites": x.len(),
                    "k": k,
                    "opt": opt,
                    "labels": labels,
                    "algo": p.algo,
                    "expected_seed_cost": expected,
                }))?
            );
        }
        Command::Removal(a) => {
            let numbers = match a.numbers.as_str() {
                "ones" => all_ones(a.z),
                "heavy" => one_heavy(a.z),
                other => return Err(Error::Input(format!("unknown number family {other:?}"))),
            };
            let cfg = RemovalExperimentConfig {
                numbers,
                eps: a.eps,
                steps: a.steps.unwrap_or(a.z / 2),
                adversary: a.adversary.parse::<Adversary>()?,
                decrement: a.decrement.parse::<Decrement>()?,
                trials: a.trials,
                base_seed: a.seed,
            };
            let report = removal_experiment(&cfg)?;
            if let Some(dir) = &a.out {
                fs::create_dir_all(dir)?;
                let mut w = BufWriter::new(fs::File::create(dir.join("removal.jsonl"))?);
                for (t, row) in report.trials.iter().enumerate() {
                    let line = serde_json::json!({ "trial": t, "row": row });
                    writeln!(w, "{line}")?;
                }
                w.flush()?;
                fs::write(
                    dir.join("summary.json"),
                    json(&serde_json::json!({
                        "summary": report.summary,
                        "regime": report.regime,
                    }))? + "\n",
                )?;
            }
            let s = &report.summary;
            println!(
                "z = {}, steps = {}, eps = {}: mean A = {:.6}  (sd {:.4}, stderr {:.4}); bound {:.4} [{:?}]",
                a.z,
                cfg.steps,
                cfg.eps,
                s.mean,
                s.std,
                s.stderr,
                report.regime.bound(),
                report.regime
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
