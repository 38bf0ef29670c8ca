//! Phantom studies and the full closed loop, built from the stages.

use std::path::{Path, PathBuf};
use std::time::Instant;

use resect_core::geometry::{nearest_neighbor, PlaneFrame, Vec3};
use resect_core::kinematics::{plan_trajectory, IkOptions};
use resect_core::metrics::{summarize, ErrorSummary};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{AtStage, HarnessError};
use crate::stages::{self, files, write_json, Artifacts, Evaluation};
use crate::truth::{self, stage_rng, Noise};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Marker,
    Trajectory,
    Roi,
    EndToEnd,
}

/// Outcome of one trial. Timings stay in memory; `trial.json` omits them so
/// that repeated runs are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub experiment: Experiment,
    pub profile: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub stage_seconds: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<PointErrors>,
}

impl TrialResult {
    fn new(experiment: Experiment, cfg: &ExperimentConfig, out: &Path) -> Self {
        Self {
            experiment,
            profile: cfg.profile.name().into(),
            seed: cfg.seed(),
            out_dir: out.to_path_buf(),
            artifacts: Vec::new(),
            stage_seconds: Vec::new(),
            evaluation: None,
            points: None,
        }
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> Result<(Artifacts, T), HarnessError>) -> Result<T, HarnessError> {
        let t0 = Instant::now();
        let (files, value) = f()?;
        self.stage_seconds.push((name.into(), t0.elapsed().as_secs_f64()));
        self.artifacts.extend(files);
        Ok(value)
    }

    fn step(&mut self, name: &str, f: impl FnOnce() -> Result<Artifacts, HarnessError>) -> Result<(), HarnessError> {
        self.timed(name, || f().map(|a| (a, ())))
    }

    /// Writes `trial.json` and checks that every listed artifact exists.
    fn finish(mut self) -> Result<Self, HarnessError> {
        self.artifacts.push(files::TRIAL.into());
        let manifest = Manifest {
            experiment: self.experiment,
            profile: &self.profile,
            seed: self.seed,
            artifacts: &self.artifacts,
            evaluation: self.evaluation.as_ref(),
            points: self.points.as_ref(),
        };
        write_json(&self.out_dir.join(files::TRIAL), &manifest, "report")?;
        if let Some(missing) = self.artifacts.iter().find(|a| !self.out_dir.join(a).exists()) {
            return Err(HarnessError::config("report", format!("artifact {missing} was not written")));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: Experiment,
    profile: &'a str,
    seed: u64,
    artifacts: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<&'a Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<&'a PointErrors>,
}

/// Per-point targeting errors for the marker and trajectory studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointErrors {
    pub targets: Vec<Vec3>,
    pub hits: Vec<Vec3>,
    pub errors: Vec<f64>,
    pub summary: ErrorSummary,
}

fn begin(cfg: &ExperimentConfig, out: &Path) -> Result<(), HarnessError> {
    cfg.validate()?;
    stages::prepare_out(out)?;
    Ok(())
}

/// calibrate → scan → classify → map → plan → resect → evaluate.
fn pipeline(experiment: Experiment, cfg: &ExperimentConfig, out: &Path) -> Result<TrialResult, HarnessError> {
    begin(cfg, out)?;
    let mut trial = TrialResult::new(experiment, cfg, out);
    trial.step("calibrate", || stages::calibrate(cfg, out))?;
    trial.step("scan", || stages::scan(cfg, out))?;
    trial.step("classify", || stages::classify(cfg, out))?;
    trial.step("map", || stages::map(cfg, out))?;
    trial.step("plan", || stages::plan(cfg, out))?;
    trial.step("resect", || stages::resect(cfg, out))?;
    let eval = trial.timed("evaluate", || stages::evaluate(cfg, out))?;
    trial.evaluation = Some(eval);
    trial.finish()
}

/// Region study with whatever classifier the config names (the phantom
/// threshold rule by default). The OCT volume is not exported.
pub fn run_roi_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<TrialResult, HarnessError> {
    let cfg = ExperimentConfig { write_volume: false, ..cfg.clone() };
    pipeline(Experiment::Roi, &cfg, out)
}

/// The full loop with every intermediate artifact on disk.
pub fn run_end_to_end(cfg: &ExperimentConfig, out: &Path) -> Result<TrialResult, HarnessError> {
    pipeline(Experiment::EndToEnd, cfg, out)
}

fn point_errors(targets: Vec<Vec3>, hits: Vec<Vec3>, errors: Vec<f64>) -> Result<PointErrors, HarnessError> {
    let summary = summarize(&errors).at("report")?;
    Ok(PointErrors { targets, hits, errors, summary })
}

pub const MARKER_FILE: &str = "marker.json";
pub const TRAJECTORY_FILE: &str = "trajectory.json";

/// Nine fiducials on a 3×3 grid at cycled heights; the laser is aimed at
/// each using the estimated calibration and the real beam is traced onto
/// the fiducial's plane.
pub fn run_marker_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<TrialResult, HarnessError> {
    const S: &str = "marker";
    begin(cfg, out)?;
    let mut trial = TrialResult::new(Experiment::Marker, cfg, out);
    trial.step("calibrate", || stages::calibrate(cfg, out))?;
    let points = trial.timed(S, || {
        let cal = stages::load_calibration(out, S)?;
        let truth_cal = truth::truth_calibration(cfg.profile, cfg.tilt_deg);
        let s = cfg.markers.spacing;
        let fiducials: Vec<Vec3> = (0..9)
            .map(|k| {
                let (i, j) = ((k % 3) as f64 - 1.0, (k / 3) as f64 - 1.0);
                Vec3::new(i * s, j * s, cfg.markers.heights[k % cfg.markers.heights.len()])
            })
            .collect();
        let plan = plan_trajectory(&cal, &fiducials, &IkOptions::default()).at(S)?;
        let mut rng = stage_rng(cfg.seed(), S);
        let noise = Noise::new(cfg.spot_sigma());
        let mut hits = Vec::with_capacity(9);
        for (f, b) in fiducials.iter().zip(&plan.waypoints) {
            let h = resect_core::kinematics::forward_model(&truth_cal, *b, &PlaneFrame::horizontal(f.z)).at(S)?;
            let e = noise.vec2(&mut rng);
            hits.push(h + Vec3::new(e.x, e.y, 0.0));
        }
        let errors = fiducials.iter().zip(&hits).map(|(f, h)| f.distance(*h)).collect();
        let pe = point_errors(fiducials, hits, errors)?;
        write_json(&out.join(MARKER_FILE), &pe, S)?;
        Ok((vec![MARKER_FILE.to_string()], pe))
    })?;
    trial.points = Some(points);
    trial.finish()
}

/// S-curve `x = A·sin(2πs)`, `y = L·(s − ½)` on the scene surface, planned
/// densely and fired at evenly spaced samples. Each target's error is its
/// distance to the nearest actual hit.
pub fn run_trajectory_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<TrialResult, HarnessError> {
    const S: &str = "trajectory";
    begin(cfg, out)?;
    let scene = cfg.resolve_scene()?;
    let mut trial = TrialResult::new(Experiment::Trajectory, cfg, out);
    trial.step("calibrate", || stages::calibrate(cfg, out))?;
    let points = trial.timed(S, || {
        let cal = stages::load_calibration(out, S)?;
        let truth_cal = truth::truth_calibration(cfg.profile, cfg.tilt_deg);
        let t = &cfg.trajectory;
        let c = cfg.scan.center;
        let targets: Vec<Vec3> = (0..t.samples)
            .map(|i| {
                let s = i as f64 / (t.samples - 1) as f64;
                let (x, y) = (c[0] + t.amplitude * (std::f64::consts::TAU * s).sin(), c[1] + t.length * (s - 0.5));
                Vec3::new(x, y, scene.height(x, y))
            })
            .collect();
        let plan = plan_trajectory(&cal, &targets, &IkOptions::default()).at(S)?;
        let shots: Vec<usize> =
            (0..t.shots).map(|j| ((j as f64 * (t.samples - 1) as f64 / (t.shots - 1) as f64).round()) as usize).collect();
        let mut rng = stage_rng(cfg.seed(), S);
        let noise = Noise::new(cfg.spot_sigma());
        let hits = shots
            .iter()
            .map(|&i| {
                stages::noisy_hit(&truth_cal, &scene, plan.waypoints[i], &noise, &mut rng)
                    .ok_or_else(|| HarnessError::new(S, crate::error::ErrorKind::Solver, format!("shot at sample {i} misses the scene")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let errors = targets
            .iter()
            .map(|&p| nearest_neighbor(p, &hits).map(|(_, d)| d).at(S))
            .collect::<Result<Vec<f64>, _>>()?;
        plan.write_csv(&out.join(files::CUT_PLAN_CSV)).at(S)?;
        stages::write_hits_csv(&out.join(files::ACTUAL_HITS), &hits)?;
        let pe = point_errors(targets, hits, errors)?;
        write_json(&out.join(TRAJECTORY_FILE), &pe, S)?;
        Ok(([TRAJECTORY_FILE, files::CUT_PLAN_CSV, files::ACTUAL_HITS].map(String::from).to_vec(), pe))
    })?;
    trial.points = Some(points);
    trial.finish()
}
