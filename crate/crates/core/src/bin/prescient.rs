use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use prescient::harness::{
    default_bounds, evaluate_bounds, run_game, run_lower_bound, sweep, sweep_svg, write_bounds,
    write_sweep, write_transcripts, BoundReport, GameConfig, SweepSpec, SLACK_NOTE,
};
use prescient::hypotheses::{littlestone_dimension, natarajan_dimension, vc_dimension, HypothesisClass};

#[derive(Parser)]
#[command(name = "prescient", version, about = "Online classification with predicted example streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play the configured game and write transcript.csv.
    Run(Common),
    /// Play the game and check the learner's analytic bound (bounds.csv).
    Bounds(Common),
    /// Play the lower-bound adversary (needs a nature-zn stream).
    Lowerbound(Common),
    /// Repeat the game along the config's "sweep" axis (sweep.csv, sweep.svg).
    Sweep(Common),
    /// Print the combinatorial dimensions of the configured class.
    Dims(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Master seed; PRESCIENT_SEED takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    retain_predictions: bool,
}

impl Common {
    /// The config JSON and the optional sweep spec carried under "sweep".
    fn load(&self) -> anyhow::Result<(GameConfig, Option<SweepSpec>)> {
        let text = fs::read_to_string(&self.config)
            .with_context(|| format!("reading {}", self.config.display()))?;
        let mut value: serde_json::Value = serde_json::from_str(&text).context("parsing config")?;
        let sweep = match value.as_object_mut().and_then(|o| o.remove("sweep")) {
            Some(s) => Some(serde_json::from_value(s).context("parsing sweep")?),
            None => None,
        };
        let mut cfg: GameConfig = serde_json::from_value(value).context("parsing config")?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Ok(s) = std::env::var("PRESCIENT_SEED") {
            cfg.seed = s.parse().context("PRESCIENT_SEED is not a u64")?;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        cfg.retain_full_predictions |= self.retain_predictions;
        cfg.validate()?;
        Ok((cfg, sweep))
    }

    fn file(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        Ok(BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        ))
    }
}

fn print_bounds(report: &BoundReport) {
    for r in &report.rows {
        println!(
            "{:<24} analytic {:>10.4}  measured {:>10.4} ± {:.4}  {}",
            r.name,
            r.analytic,
            r.measured_mean,
            r.stderr,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    if report.rows.iter().any(|r| r.randomized) {
        println!("note: {SLACK_NOTE}");
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, _) = c.load()?;
            let report = run_game(&cfg)?;
            write_transcripts(&report, c.file("transcript.csv")?)?;
            println!(
                "{} trials, mean expected mistakes {:.4}, mean regret {:.4}, mean predictor mistakes {:.2}",
                report.trials.len(),
                report.mean_expected_mistakes(),
                report.mean_regret(),
                report.mean_predictor_mistakes()
            );
            Ok(true)
        }
        Command::Bounds(c) => {
            let (cfg, _) = c.load()?;
            let report = run_game(&cfg)?;
            let bounds = evaluate_bounds(&report, &default_bounds(cfg.learner, cfg.mode()))?;
            write_bounds(&bounds, c.file("bounds.csv")?)?;
            print_bounds(&bounds);
            Ok(bounds.all_pass())
        }
        Command::Lowerbound(c) => {
            let (cfg, _) = c.load()?;
            let (bounds, checks) = run_lower_bound(&cfg)?;
            write_bounds(&bounds, c.file("bounds.csv")?)?;
            print_bounds(&bounds);
            println!("{checks:?}");
            Ok(bounds.all_pass())
        }
        Command::Sweep(c) => {
            let (cfg, spec) = c.load()?;
            let Some(spec) = spec else {
                bail!("config has no \"sweep\" entry");
            };
            let report = sweep(&cfg, &spec)?;
            write_sweep(&report, c.file("sweep.csv")?)?;
            fs::write(c.out.join("sweep.svg"), sweep_svg(&report))?;
            for p in &report.points {
                println!(
                    "{}={:<5} measured {:>9.4} ± {:.4}  per round {:.5}  bound {}",
                    report.axis_name(),
                    p.value,
                    p.measured_mean,
                    p.stderr,
                    p.per_round,
                    p.bound.map_or("-".into(), |b| format!("{b:.4}"))
                );
            }
            Ok(report.all_pass())
        }
        Command::Dims(c) => {
            let (cfg, _) = c.load()?;
            match cfg.class.build() {
                HypothesisClass::Threshold => println!("thresholds: VC = 1, Littlestone = infinite"),
                HypothesisClass::Table(t) => {
                    println!("hypotheses {} over {} points", t.len(), t.domain().len());
                    println!("VC {}", vc_dimension(&t)?);
                    println!("Littlestone {}", littlestone_dimension(&t)?);
                    println!("Natarajan {}", natarajan_dimension(&t)?);
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
