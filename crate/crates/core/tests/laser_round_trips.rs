use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resect_core::calibration::{
    angles_from_incidence, calibrate_laser_orientation, incidence_from_angles, LaserCalibration, LaserSpotObservation, OrientationOptions,
};
use resect_core::geometry::{PlaneFrame, ReferenceFrame, Vec3};
use resect_core::kinematics::{plan_trajectory, raster_pattern, solve_ik, IkOptions, Ordering, RasterSpec, WaypointCoord};

/// Where the beam from `cal` at `beta` crosses the plane `z = z0`, written
/// out by hand from the waypoint model.
fn hit_at_height(cal: &LaserCalibration, beta: WaypointCoord, z0: f64) -> Vec3 {
    let f = &cal.frame;
    let p = f.origin + f.v_x * (cal.alpha[0] + beta.x) + f.v_y * (cal.alpha[1] + beta.y);
    let t = (z0 - p.z) / cal.v_w.z;
    p + cal.v_w * t
}

fn random_frame(rng: &mut ChaCha8Rng) -> ReferenceFrame {
    let yaw: f64 = rng.random_range(-0.3..0.3);
    let v_x = Vec3::new(yaw.cos(), yaw.sin(), rng.random_range(-0.05..0.05));
    let v_y = Vec3::new(-yaw.sin(), yaw.cos(), rng.random_range(-0.05..0.05));
    ReferenceFrame::new(Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), 56.3), v_x, v_y).unwrap()
}

fn random_calibration(rng: &mut ChaCha8Rng, max_tilt: f64) -> LaserCalibration {
    let v = incidence_from_angles(rng.random_range(-max_tilt..max_tilt), rng.random_range(-max_tilt..max_tilt));
    LaserCalibration::new(random_frame(rng), [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], v).unwrap()
}

#[test]
fn inverse_then_forward_hits_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let cal = random_calibration(&mut rng, 0.7);
        let target = Vec3::new(rng.random_range(-6.5..6.5), rng.random_range(-6.5..6.5), rng.random_range(0.0..6.0));
        let sol = solve_ik(&cal, target, &IkOptions::default()).unwrap();
        worst = worst.max(hit_at_height(&cal, sol.beta, target.z).distance(target));
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn planned_waypoints_reproduce_each_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cal = random_calibration(&mut rng, 0.7);
    let scan = raster_pattern((13.0, 13.0), RasterSpec::Counts(10, 10), Ordering::Serpentine).unwrap();
    let targets: Vec<Vec3> = scan.points.iter().map(|p| Vec3::new(p.x, p.y, 2.0 + 0.1 * p.x)).collect();
    let plan = plan_trajectory(&cal, &targets, &IkOptions::default()).unwrap();
    assert_eq!(plan.targets, targets);
    for (t, b) in plan.targets.iter().zip(&plan.waypoints) {
        assert!(hit_at_height(&cal, *b, t.z).distance(*t) < 1e-6);
    }
}

fn observations(cal: &LaserCalibration, heights: &[f64]) -> Vec<LaserSpotObservation> {
    let mut obs = Vec::new();
    for &z in heights {
        for bx in [-4.0, 0.0, 4.0] {
            for by in [-4.0, 0.0, 4.0] {
                let beta = WaypointCoord::new(bx, by);
                obs.push(LaserSpotObservation {
                    beta,
                    plane: PlaneFrame::horizontal(z),
                    spot: hit_at_height(cal, beta, z),
                });
            }
        }
    }
    obs
}

#[test]
fn orientation_recovered_from_vertical_guess() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..200 {
        let truth = random_calibration(&mut rng, 0.7);
        let obs = observations(&truth, &[0.0, 3.0, 6.0]);
        let fit = calibrate_laser_orientation(truth.frame, &obs, &OrientationOptions::default())
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        let (t0, p0) = angles_from_incidence(truth.v_w);
        let (t1, p1) = angles_from_incidence(fit.v_w);
        assert!((t0 - t1).abs() < 1e-6 && (p0 - p1).abs() < 1e-6, "trial {trial}");
        assert!((fit.alpha[0] - truth.alpha[0]).abs() < 1e-6 && (fit.alpha[1] - truth.alpha[1]).abs() < 1e-6);
    }
}

proptest! {
    #[test]
    fn angle_parametrization_round_trips(theta in -1.2f64..1.2, phi in -1.2f64..1.2) {
        let v = incidence_from_angles(theta, phi);
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        prop_assert!(v.z < 0.0);
        let (t, p) = angles_from_incidence(v);
        prop_assert!((t - theta).abs() < 1e-9 && (p - phi).abs() < 1e-9);
    }

    #[test]
    fn serpentine_neighbours_are_close(ex in 1.0f64..20.0, ey in 1.0f64..20.0, step in 0.2f64..1.0) {
        let p = raster_pattern((ex, ey), RasterSpec::Step(step), Ordering::Serpentine).unwrap();
        prop_assert_eq!(p.len(), p.counts.0 * p.counts.1);
        let diag = (p.spacing.0.powi(2) + p.spacing.1.powi(2)).sqrt();
        prop_assert!(p.max_consecutive_gap() <= diag.max(p.spacing.0).max(p.spacing.1) + 1e-12);
        for q in &p.points {
            prop_assert!(q.x.abs() <= ex / 2.0 + 1e-12 && q.y.abs() <= ey / 2.0 + 1e-12);
        }
    }
}
