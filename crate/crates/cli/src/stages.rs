//! Pipeline stages. Each stage reads its inputs from the trial directory
//! and writes its outputs there, so any stage can be rerun on its own.

use std::path::{Path, PathBuf};

use rand::Rng;
use resect_core::calibration::{
    self, angles_from_incidence, calibrate_laser_axes, calibrate_laser_orientation, estimate_camera_extrinsics, reprojection_error,
    LaserCalibration, OrientationOptions,
};
use resect_core::geometry::{polygon, ray_mesh_intersect, triangulate_grid, Label, Ray, Vec2, Vec3};
use resect_core::kinematics::{plan_trajectory, raster_pattern, solve_ik, CutPlan, IkOptions, ScanPattern, WaypointCoord};
use resect_core::mapping::{
    build_tumor_tags, colorize_surface, estimate_spot_3d, export, label_color, select_cut_targets, CameraView, MappingError, TumorTag,
};
use resect_core::metrics::{
    append_ledger, compare_regions, two_sample_t_test, write_report_json, ComparisonKind, MetricsError, Region2D, RegionReport, RegionRole,
    TTest,
};
use resect_core::sensor::{
    render_oct_volume, segment_surface, synth_spectrum, PinholeCamera, Rect, RegionShape, RenderOptions, ScenePhantom,
    DEFAULT_SURFACE_THRESHOLD,
};
use resect_core::spectra::io::{read_sidecar, read_spectra_csv, write_sidecar, write_spectra_csv, RowMeta, SpectraSidecar};
use resect_core::spectra::{
    classification_metrics, mlp, preprocess, threshold_classify, ClassificationMetrics, PreprocessConfig, Spectrum, ThresholdClassifier,
    TissueClass, TrainConfig,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{ClassifierChoice, ExperimentConfig};
use crate::error::{AtStage, ErrorKind, HarnessError};
use crate::truth::{self, stage_rng, Noise};

pub mod files {
    pub const CALIBRATION: &str = "calibration.json";
    pub const CALIBRATION_REPORT: &str = "calibration_report.json";
    pub const CAMERA_LEFT: &str = "camera_left.json";
    pub const CAMERA_RIGHT: &str = "camera_right.json";
    pub const LASER_SPOTS: &str = "laser_spots.csv";
    pub const CORRESPONDENCES_LEFT: &str = "correspondences_left.csv";
    pub const CORRESPONDENCES_RIGHT: &str = "correspondences_right.csv";
    pub const OCT_STEM: &str = "oct_volume";
    pub const SURFACE: &str = "surface.ply";
    pub const SCAN: &str = "scan.json";
    pub const SPECTRA: &str = "spectra.csv";
    pub const SPECTRA_META: &str = "spectra.json";
    pub const LABELS: &str = "labels.json";
    pub const MODEL: &str = "model.json";
    pub const TAGS: &str = "tags.ply";
    pub const BOUNDARY: &str = "boundary.json";
    pub const TARGETS: &str = "targets.csv";
    pub const CUT_REGION: &str = "cut_region.json";
    pub const CUT_PLAN_CSV: &str = "cut_plan.csv";
    pub const CUT_PLAN_JSON: &str = "cut_plan.json";
    pub const ACTUAL_HITS: &str = "actual_hits.csv";
    pub const RESECTION: &str = "resection.json";
    pub const RESECTED_SURFACE: &str = "resected_surface.ply";
    pub const REPORTS: &str = "reports.json";
    pub const EVALUATION: &str = "evaluation.json";
    pub const LEDGER: &str = "results.csv";
    pub const TRIAL: &str = "trial.json";
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T, stage: &str) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).at(stage)?;
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::config(stage, format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path, stage: &str) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(stage, format!("{}: {e} (run the earlier stages first)", path.display())))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::config(stage, format!("{}: {e}", path.display())))
}

/// Files a stage produced, relative to the trial directory.
pub type Artifacts = Vec<String>;

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraFit {
    pub rms_px: f64,
    pub mean_mm: f64,
    pub rotation_error_rad: f64,
    pub center_error_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// `"estimated"` or `"truth"` (perfect calibration requested).
    pub source: String,
    pub profile: String,
    pub tilt_deg: f64,
    pub truth: LaserCalibration,
    pub residual_rms: f64,
    pub reprojection_rms: f64,
    pub iterations: usize,
    pub angle_error_rad: f64,
    pub alpha_error_mm: f64,
    pub cameras: [CameraFit; 2],
}

fn camera_fit(est: &PinholeCamera, truth: &PinholeCamera, rms_px: f64, mean_mm: f64) -> CameraFit {
    CameraFit {
        rms_px,
        mean_mm,
        rotation_error_rad: calibration::extrinsics::rotation_angle_between(&est.pose.rotation, &truth.pose.rotation),
        center_error_mm: est.pose.center().distance(truth.pose.center()),
    }
}

pub fn calibrate(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "calibrate";
    let truth = truth::truth_calibration(cfg.profile, cfg.tilt_deg);
    let cams = truth::truth_cameras();
    let mut rng = stage_rng(cfg.seed(), S);
    let axes = truth::axis_observations(&truth, 10.0, cfg.axis_sigma(), &mut rng);
    let spots = truth::spot_observations(&truth, cfg.spot_sigma(), &mut rng);
    let corr = cams.map(|c| truth::camera_correspondences(&c, cfg.pixel_sigma(), &mut rng));

    calibration::io::write_spot_observations(&out.join(files::LASER_SPOTS), &spots).at(S)?;
    calibration::io::write_correspondences(&out.join(files::CORRESPONDENCES_LEFT), &corr[0]).at(S)?;
    calibration::io::write_correspondences(&out.join(files::CORRESPONDENCES_RIGHT), &corr[1]).at(S)?;

    let (cal, est_cams, fits, source) = if cfg.perfect_calibration {
        let fits = [0, 1].map(|i| camera_fit(&cams[i], &cams[i], 0.0, 0.0));
        (truth, cams, fits, "truth")
    } else {
        // The home fiducial (start of the x jog) fixes the frame origin.
        let frame = calibrate_laser_axes(axes[0].start, &axes[0], &axes[1]).at(S)?;
        let cal = calibrate_laser_orientation(frame, &spots, &OrientationOptions::default()).at(S)?;
        let mut est = cams;
        let mut fits = Vec::new();
        for i in 0..2 {
            let e = estimate_camera_extrinsics(&cams[i].intrinsics, &corr[i]).at(S)?;
            est[i] = PinholeCamera::new(cams[i].intrinsics, e.pose).at(S)?;
            fits.push(camera_fit(&est[i], &cams[i], e.rms_px, e.mean_mm));
        }
        let fits: [CameraFit; 2] = fits.try_into().expect("two cameras");
        (cal, est, fits, "estimated")
    };

    let (t0, p0) = angles_from_incidence(truth.v_w);
    let (t1, p1) = angles_from_incidence(cal.v_w);
    let (_, reproj) = reprojection_error(&cal, &spots).at(S)?;
    let report = CalibrationReport {
        source: source.into(),
        profile: cfg.profile.name().into(),
        tilt_deg: cfg.tilt_deg,
        truth,
        residual_rms: cal.residual_rms,
        reprojection_rms: reproj,
        iterations: cal.iterations,
        angle_error_rad: (t1 - t0).abs().max((p1 - p0).abs()),
        alpha_error_mm: Vec2::new(cal.alpha[0] - truth.alpha[0], cal.alpha[1] - truth.alpha[1]).norm(),
        cameras: fits,
    };
    calibration::io::write_calibration(&out.join(files::CALIBRATION), &cal).at(S)?;
    write_json(&out.join(files::CAMERA_LEFT), &est_cams[0], S)?;
    write_json(&out.join(files::CAMERA_RIGHT), &est_cams[1], S)?;
    write_json(&out.join(files::CALIBRATION_REPORT), &report, S)?;
    Ok(vec![
        files::LASER_SPOTS,
        files::CORRESPONDENCES_LEFT,
        files::CORRESPONDENCES_RIGHT,
        files::CALIBRATION,
        files::CAMERA_LEFT,
        files::CAMERA_RIGHT,
        files::CALIBRATION_REPORT,
    ]
    .into_iter()
    .map(String::from)
    .collect())
}

pub fn load_calibration(out: &Path, stage: &str) -> Result<LaserCalibration, HarnessError> {
    let p = out.join(files::CALIBRATION);
    if !p.exists() {
        return Err(HarnessError::config(stage, format!("{} missing (run calibrate first)", p.display())));
    }
    calibration::io::read_calibration(&p).at(stage)
}

// --------------------------------------------------------------------- scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Commanded raster position (mm).
    pub raster: Vec2,
    /// Surface point the planner aimed at.
    pub target: Vec3,
    pub beta: WaypointCoord,
    /// Where the real beam landed (simulation truth).
    pub true_hit: Vec3,
    pub left_px: Vec2,
    pub right_px: Vec2,
    /// Fused 3D spot estimate; the tag position.
    pub spot: Vec3,
    pub spread: f64,
    pub truth_label: TissueClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub pattern: ScanPattern,
    pub center: Vec2,
    pub points: Vec<ScanPoint>,
}

fn ray_down(p: Vec2) -> Ray {
    Ray::new(Vec3::new(p.x, p.y, 1.0e3), Vec3::new(0.0, 0.0, -1.0)).expect("unit")
}

/// Beam landing point with lateral spot scatter, kept on the surface.
pub fn noisy_hit(truth: &LaserCalibration, scene: &ScenePhantom, beta: WaypointCoord, noise: &Noise, rng: &mut impl Rng) -> Option<Vec3> {
    let h = truth::fire(truth, scene, beta)?;
    let e = noise.vec2(rng);
    let (x, y) = (h.x + e.x, h.y + e.y);
    Some(Vec3::new(x, y, scene.height(x, y)))
}

fn solver(stage: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::new(stage, ErrorKind::Solver, msg)
}

pub fn scan(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "scan";
    let scene = cfg.resolve_scene()?;
    let cal = load_calibration(out, S)?;
    let cams: [PinholeCamera; 2] = [read_json(&out.join(files::CAMERA_LEFT), S)?, read_json(&out.join(files::CAMERA_RIGHT), S)?];
    let truth_cal = truth::truth_calibration(cfg.profile, cfg.tilt_deg);
    let truth_cams = truth::truth_cameras();
    let mut rng = stage_rng(cfg.seed(), S);
    let mut artifacts = Vec::new();

    let center = Vec2::new(cfg.scan.center[0], cfg.scan.center[1]);
    let window = Rect::centered(center, cfg.oct.extent_x, cfg.oct.extent_y);
    let opts = RenderOptions { noise_amplitude: cfg.oct_noise(), seed: rng.random() };
    let volume = render_oct_volume(&scene, &window, &cfg.oct, &opts).at(S)?;
    if cfg.write_volume {
        volume.export(out, files::OCT_STEM).at(S)?;
        artifacts.push(format!("{}.raw", files::OCT_STEM));
        artifacts.push(format!("{}.json", files::OCT_STEM));
    }
    let surface = segment_surface(&volume, DEFAULT_SURFACE_THRESHOLD).at(S)?;
    drop(volume);
    let (mesh, _) = triangulate_grid(&surface).at(S)?;
    let image = truth::render_camera_image(&scene, &truth_cams[0]);
    let (colored, _) = colorize_surface(&surface, Some(&cams[0]), &image).at(S)?;
    export::write_surface_ply(&out.join(files::SURFACE), &colored).at(S)?;
    artifacts.push(files::SURFACE.into());

    let views = cams.map(|c| CameraView::new(c, &surface));
    let pattern = raster_pattern((cfg.scan.extent[0], cfg.scan.extent[1]), cfg.scan.spec(), cfg.scan.ordering).at(S)?;
    let spot_noise = Noise::new(cfg.spot_sigma());
    let px_noise = Noise::new(cfg.pixel_sigma());
    let mut points = Vec::with_capacity(pattern.len());
    let mut spectra = Vec::with_capacity(pattern.len());
    for (k, raster) in pattern.translated(center).into_iter().enumerate() {
        let (target, _) = ray_mesh_intersect(&ray_down(raster), &mesh)
            .ok_or_else(|| solver(S, format!("raster point {k} lies outside the segmented surface")))?;
        let ik = solve_ik(&cal, target, &IkOptions::default()).at(S)?;
        let true_hit = noisy_hit(&truth_cal, &scene, ik.beta, &spot_noise, &mut rng)
            .ok_or_else(|| solver(S, format!("beam {k} misses the scene")))?;
        let px = [0, 1].map(|i| truth_cams[i].project(true_hit).map(|p| p + px_noise.vec2(&mut rng)));
        let [Ok(left_px), Ok(right_px)] = px else {
            return Err(solver(S, format!("spot {k} is behind a camera")));
        };
        let est = estimate_spot_3d(left_px, &views[0], right_px, &views[1], &surface, &mesh, &cal.pose(ik.beta).ray()).at(S)?;
        let label = if scene.label_at(true_hit.xy()) == Label::Tumor { TissueClass::Tumor } else { TissueClass::Healthy };
        spectra.push(synth_spectrum(label, rng.random()));
        points.push(ScanPoint {
            raster,
            target,
            beta: ik.beta,
            true_hit,
            left_px,
            right_px,
            spot: est.fused,
            spread: est.spread,
            truth_label: label,
        });
    }
    let meta = SpectraSidecar {
        rows: points.iter().map(|p| RowMeta { subject: "scan".into(), label: p.truth_label }).collect(),
    };
    write_spectra_csv(&out.join(files::SPECTRA), &spectra).at(S)?;
    write_sidecar(&out.join(files::SPECTRA_META), &meta).at(S)?;
    write_json(&out.join(files::SCAN), &ScanRecord { pattern, center, points }, S)?;
    artifacts.extend([files::SPECTRA, files::SPECTRA_META, files::SCAN].map(String::from));
    Ok(artifacts)
}

// ----------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub classifier: ClassifierChoice,
    pub labels: Vec<TissueClass>,
    /// Against the simulation's truth labels.
    pub metrics: ClassificationMetrics,
}

pub fn preprocessed_features(s: &Spectrum) -> Result<Vec<f64>, HarnessError> {
    Ok(preprocess(s, &PreprocessConfig::default()).at("classify")?.intensities().to_vec())
}

/// Generated training corpus: `per_class` spectra of each class.
pub fn training_corpus(per_class: usize, rng: &mut impl Rng) -> Result<(Vec<Vec<f64>>, Vec<TissueClass>), HarnessError> {
    let mut x = Vec::with_capacity(2 * per_class);
    let mut y = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        for class in [TissueClass::Healthy, TissueClass::Tumor] {
            x.push(preprocessed_features(&synth_spectrum(class, rng.random()))?);
            y.push(class);
        }
    }
    Ok((x, y))
}

pub fn classify(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "classify";
    let spectra = read_spectra_csv(&out.join(files::SPECTRA)).at(S)?;
    let truth: Vec<TissueClass> = read_sidecar(&out.join(files::SPECTRA_META)).at(S)?.rows.into_iter().map(|r| r.label).collect();
    if truth.len() != spectra.len() {
        return Err(HarnessError::config(S, "spectra and sidecar row counts differ"));
    }
    let mut artifacts = Vec::new();
    let labels: Vec<TissueClass> = match cfg.classifier {
        ClassifierChoice::Threshold => {
            let rule = ThresholdClassifier::phantom_rule();
            spectra
                .iter()
                .map(|s| Ok(threshold_classify(&rule, &preprocess(s, &PreprocessConfig::default()).at(S)?).at(S)?.resolve()))
                .collect::<Result<_, HarnessError>>()?
        }
        ClassifierChoice::Mlp => {
            let mut rng = stage_rng(cfg.seed(), S);
            let (x, y) = training_corpus(cfg.mlp.train_per_class, &mut rng)?;
            let tc = TrainConfig {
                hidden: cfg.mlp.hidden.clone(),
                epochs: cfg.mlp.epochs,
                batch_size: cfg.mlp.batch_size,
                learning_rate: cfg.mlp.learning_rate,
                seed: rng.random(),
                ..TrainConfig::default()
            };
            let (model, _) = mlp::train(&x, &y, &tc).at(S)?;
            write_json(&out.join(files::MODEL), &model, S)?;
            artifacts.push(files::MODEL.to_string());
            spectra
                .iter()
                .map(|s| model.predict(&preprocessed_features(s)?).at(S))
                .collect::<Result<_, HarnessError>>()?
        }
        ClassifierChoice::Oracle => truth.clone(),
        ClassifierChoice::Healthy => vec![TissueClass::Healthy; truth.len()],
    };
    let metrics = classification_metrics(&labels, &truth).at(S)?;
    write_json(&out.join(files::LABELS), &LabelRecord { classifier: cfg.classifier, labels, metrics }, S)?;
    artifacts.push(files::LABELS.into());
    Ok(artifacts)
}

// ---------------------------------------------------------------------- map

pub fn map(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "map";
    let scan: ScanRecord = read_json(&out.join(files::SCAN), S)?;
    let labels: LabelRecord = read_json(&out.join(files::LABELS), S)?;
    let spots: Vec<Vec3> = scan.points.iter().map(|p| p.spot).collect();
    let colors: Vec<[u8; 3]> = labels.labels.iter().map(|&c| label_color(c.into())).collect();
    let tags = build_tumor_tags(&scan.pattern, &spots, &labels.labels, &colors).at(S)?;
    export::write_tags_ply(&out.join(files::TAGS), &tags).at(S)?;
    if !tags.iter().any(TumorTag::is_tumor) {
        return Err(MappingError::EmptyRegion).at(S);
    }
    let boundary = resect_core::mapping::boundary_from_tags(&tags, cfg.shrink).at(S)?;
    let region = select_cut_targets(&tags, &boundary).at(S)?;
    export::write_boundary_json(&out.join(files::BOUNDARY), &boundary).at(S)?;
    export::write_targets_csv(&out.join(files::TARGETS), &region).at(S)?;
    write_json(&out.join(files::CUT_REGION), &region, S)?;
    Ok([files::TAGS, files::BOUNDARY, files::TARGETS, files::CUT_REGION].map(String::from).to_vec())
}

// --------------------------------------------------------------------- plan

pub fn plan(_cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "plan";
    let cal = load_calibration(out, S)?;
    let targets = export::read_targets_csv(&out.join(files::TARGETS)).at(S)?;
    let plan = plan_trajectory(&cal, &targets, &IkOptions::default()).at(S)?;
    plan.write_csv(&out.join(files::CUT_PLAN_CSV)).at(S)?;
    plan.write_json(&out.join(files::CUT_PLAN_JSON)).at(S)?;
    Ok([files::CUT_PLAN_CSV, files::CUT_PLAN_JSON].map(String::from).to_vec())
}

// ------------------------------------------------------------------- resect

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HitRow {
    k: usize,
    x: f64,
    y: f64,
    z: f64,
}

pub fn write_hits_csv(path: &Path, hits: &[Vec3]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).at("resect")?;
    for (k, h) in hits.iter().enumerate() {
        w.serialize(HitRow { k, x: h.x, y: h.y, z: h.z }).at("resect")?;
    }
    w.flush().at("resect")
}

pub fn read_hits_csv(path: &Path, stage: &str) -> Result<Vec<Vec3>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::config(stage, format!("{}: {e}", path.display())))?;
    let rows: Vec<HitRow> = r.deserialize().collect::<Result<_, _>>().at(stage)?;
    Ok(rows.into_iter().map(|h| Vec3::new(h.x, h.y, h.z)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResectionRecord {
    pub spot_diameter: f64,
    pub shots: usize,
    pub surface_points: usize,
    pub cut_points: usize,
    pub tumor_points: usize,
    pub tumor_points_cut: usize,
    pub healthy_points_cut: usize,
    /// Cut points times the lateral cell area of the OCT grid (mm²).
    pub cut_area_mm2: f64,
}

/// Color of ablated surface cells in the post-resection cloud.
pub const CUT_COLOR: [u8; 3] = [20, 20, 20];

pub fn resect(cfg: &ExperimentConfig, out: &Path) -> Result<Artifacts, HarnessError> {
    const S: &str = "resect";
    let scene = cfg.resolve_scene()?;
    let plan: CutPlan = read_json(&out.join(files::CUT_PLAN_JSON), S)?;
    let truth_cal = truth::truth_calibration(cfg.profile, cfg.tilt_deg);
    let mut rng = stage_rng(cfg.seed(), S);
    let noise = Noise::new(cfg.spot_sigma());
    let hits = plan
        .waypoints
        .iter()
        .enumerate()
        .map(|(k, &b)| noisy_hit(&truth_cal, &scene, b, &noise, &mut rng).ok_or_else(|| solver(S, format!("shot {k} misses the scene"))))
        .collect::<Result<Vec<_>, _>>()?;
    write_hits_csv(&out.join(files::ACTUAL_HITS), &hits)?;

    // Surface cells under any laser footprint are marked as removed.
    let mut cloud = export::read_tags_ply(&out.join(files::SURFACE)).at(S)?;
    let r = 0.5 * cfg.spot_diameter;
    let hit_xy: Vec<Vec2> = hits.iter().map(|h| h.xy()).collect();
    let mut rec = ResectionRecord {
        spot_diameter: cfg.spot_diameter,
        shots: hits.len(),
        surface_points: cloud.len(),
        cut_points: 0,
        tumor_points: 0,
        tumor_points_cut: 0,
        healthy_points_cut: 0,
        cut_area_mm2: 0.0,
    };
    for p in &mut cloud {
        let xy = p.position.xy();
        let tumor = scene.label_at(xy) == Label::Tumor;
        let cut = hit_xy.iter().any(|h| h.distance(xy) <= r);
        rec.tumor_points += usize::from(tumor);
        if cut {
            rec.cut_points += 1;
            if tumor {
                rec.tumor_points_cut += 1;
            } else {
                rec.healthy_points_cut += 1;
            }
            p.color = CUT_COLOR;
        }
        p.label = if tumor { Label::Tumor } else { Label::Healthy };
    }
    rec.cut_area_mm2 = rec.cut_points as f64 * cfg.oct.pitch_x() * cfg.oct.pitch_y();
    export::write_tags_ply(&out.join(files::RESECTED_SURFACE), &cloud).at(S)?;
    write_json(&out.join(files::RESECTION), &rec, S)?;
    Ok([files::ACTUAL_HITS, files::RESECTED_SURFACE, files::RESECTION].map(String::from).to_vec())
}

// ----------------------------------------------------------------- evaluate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub trial: String,
    pub reports: Vec<RegionReport>,
    /// Algorithm edge errors against system edge errors; absent when either
    /// sample is degenerate.
    pub welch: Option<TTest>,
}

impl Evaluation {
    pub fn report(&self, kind: ComparisonKind) -> &RegionReport {
        self.reports.iter().find(|r| r.kind == kind).expect("all three comparisons are present")
    }
}

/// The scene's first tumor region as a metric region.
pub fn true_region(scene: &ScenePhantom) -> Result<Region2D, MetricsError> {
    let r = scene.regions.iter().find(|r| r.label == "tumor").ok_or(MetricsError::EmptyTrueRegion)?;
    match &r.shape {
        RegionShape::Disc { center, radius } => Region2D::disc(*center, *radius, RegionRole::True),
        RegionShape::Polygon { vertices } => Region2D::polygon(vertices.clone(), RegionRole::True),
    }
}

/// Convex hull of the laser hits projected along z.
pub fn actual_region(hits: &[Vec3]) -> Result<Region2D, MetricsError> {
    let xy: Vec<Vec2> = hits.iter().map(|h| h.xy()).collect();
    let hull = polygon::convex_hull(&xy);
    if hull.len() < 3 {
        return Err(MetricsError::InvalidRegion(format!("{} laser hits do not enclose an area", hits.len())));
    }
    Region2D::polygon(hull.iter().map(|&i| xy[i]).collect(), RegionRole::Actual)
}

pub fn trial_id(cfg: &ExperimentConfig) -> String {
    format!("{}-seed{}", cfg.profile.name(), cfg.seed())
}

pub fn evaluate(cfg: &ExperimentConfig, out: &Path) -> Result<(Artifacts, Evaluation), HarnessError> {
    const S: &str = "evaluate";
    let scene = cfg.resolve_scene()?;
    let boundary = export::read_boundary_json(&out.join(files::BOUNDARY)).at(S)?;
    let hits = read_hits_csv(&out.join(files::ACTUAL_HITS), S)?;
    let truth = true_region(&scene).at(S)?;
    let predicted = Region2D::polygon(boundary.vertices, RegionRole::Predicted).at(S)?;
    let actual = actual_region(&hits).at(S)?;
    let reports = vec![
        compare_regions(ComparisonKind::Algorithm, &truth, &predicted, cfg.pitch).at(S)?,
        compare_regions(ComparisonKind::System, &truth, &actual, cfg.pitch).at(S)?,
        compare_regions(ComparisonKind::Calibration, &predicted, &actual, cfg.pitch).at(S)?,
    ];
    let welch = two_sample_t_test(&reports[0].edge_errors, &reports[1].edge_errors).ok();
    let eval = Evaluation { trial: trial_id(cfg), reports, welch };
    write_report_json(&out.join(files::REPORTS), &eval.reports).at(S)?;
    write_json(&out.join(files::EVALUATION), &eval, S)?;
    append_ledger(&out.join(files::LEDGER), &eval.trial, &eval.reports).at(S)?;
    Ok(([files::REPORTS, files::EVALUATION, files::LEDGER].map(String::from).to_vec(), eval))
}

/// Creates the trial directory.
pub fn prepare_out(out: &Path) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(out).map_err(|e| HarnessError::config("setup", format!("{}: {e}", out.display())))?;
    Ok(out.to_path_buf())
}
