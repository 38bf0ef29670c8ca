use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resect_cli::config::{ExperimentConfig, LaserProfile};
use resect_cli::experiments::{self, TrialResult};
use resect_cli::stages::{self, Artifacts};
use resect_cli::HarnessError;

#[derive(Parser)]
#[command(name = "resect", version, about = "Simulated scan, map, plan and virtual-resection harness")]
struct Cli {
    /// Experiment configuration (JSON). Defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial directory for inputs and outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config laser profile.
    #[arg(long, global = true, value_enum)]
    profile: Option<LaserProfile>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate laser and camera calibration from synthetic fiducials.
    Calibrate,
    /// Render and segment OCT, then raster-scan the probe.
    Scan,
    /// Label the scanned spectra.
    Classify,
    /// Build tumor tags, the boundary and cut targets.
    Map,
    /// Solve waypoints for the cut targets.
    Plan,
    /// Fire the planned waypoints and mark removed surface.
    Resect,
    /// Compare true, predicted and actual regions.
    Evaluate,
    /// Run every stage in order.
    E2e,
    /// Phantom studies.
    Phantom {
        #[command(subcommand)]
        study: Study,
    },
}

#[derive(Subcommand)]
enum Study {
    /// Aim at nine fiducials at mixed heights and measure the miss distance.
    Marker,
    /// Trace an S-curve on the surface and measure the path error.
    Trajectory,
    /// Map, cut and score a tumor region; skips the OCT volume export.
    Roi,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(p) = cli.profile {
        cfg.profile = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

enum Outcome {
    Stage(&'static str, Artifacts),
    Trial(TrialResult),
}

fn run(cli: &Cli) -> Result<Outcome, HarnessError> {
    let cfg = load(cli)?;
    let out = stages::prepare_out(&cli.out)?;
    let stage = |name, r: Result<Artifacts, HarnessError>| r.map(|a| Outcome::Stage(name, a));
    match &cli.command {
        Command::Calibrate => stage("calibrate", stages::calibrate(&cfg, &out)),
        Command::Scan => stage("scan", stages::scan(&cfg, &out)),
        Command::Classify => stage("classify", stages::classify(&cfg, &out)),
        Command::Map => stage("map", stages::map(&cfg, &out)),
        Command::Plan => stage("plan", stages::plan(&cfg, &out)),
        Command::Resect => stage("resect", stages::resect(&cfg, &out)),
        Command::Evaluate => stage("evaluate", stages::evaluate(&cfg, &out).map(|(a, _)| a)),
        Command::E2e => experiments::run_end_to_end(&cfg, &out).map(Outcome::Trial),
        Command::Phantom { study } => match study {
            Study::Marker => experiments::run_marker_experiment(&cfg, &out),
            Study::Trajectory => experiments::run_trajectory_experiment(&cfg, &out),
            Study::Roi => experiments::run_roi_experiment(&cfg, &out),
        }
        .map(Outcome::Trial),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Stage(name, artifacts)) => {
            println!("{name}: wrote {}", artifacts.join(", "));
            ExitCode::SUCCESS
        }
        Ok(Outcome::Trial(t)) => {
            for (stage, secs) in &t.stage_seconds {
                eprintln!("{stage:>10}  {secs:8.3} s");
            }
            if let Some(e) = &t.evaluation {
                for r in &e.reports {
                    println!(
                        "{:<12} edge {:.4} ± {:.4} mm  IoU {:.4}  undercut {:.4}  overcut {:.4}",
                        r.kind.as_str(),
                        r.mean,
                        r.std,
                        r.iou,
                        r.undercut,
                        r.overcut
                    );
                }
            }
            if let Some(p) = &t.points {
                println!("error {:.6} ± {:.6} mm (rmse {:.6}, n = {})", p.summary.mean, p.summary.std, p.summary.rmse, p.summary.n);
            }
            println!("artifacts in {}", t.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", serde_json::to_string(&e).unwrap_or_default());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
