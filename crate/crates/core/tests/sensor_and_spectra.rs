use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use resect_core::geometry::Vec2;
use resect_core::sensor::{render_oct_volume, segment_surface, OctGeometry, Primitive, Rect, RenderOptions, ScenePhantom, DEFAULT_SURFACE_THRESHOLD};
use resect_core::spectra::{make_splits, nm_grid, preprocess, savgol, LabeledSample, PreprocessConfig, Spectrum, TissueClass};

fn scene(primitives: Vec<Primitive>) -> ScenePhantom {
    ScenePhantom {
        primitives,
        regions: vec![],
        ..ScenePhantom::flat_with_disc(0.0, Vec2::ZERO, 1.0)
    }
}

fn round_trip_worst(s: &ScenePhantom) -> f64 {
    let g = OctGeometry {
        ascans_per_bscan: 128,
        bscans: 64,
        ..OctGeometry::default()
    };
    let w = Rect::centered(Vec2::ZERO, 12.6, 12.8);
    let vol = render_oct_volume(s, &w, &g, &RenderOptions::default()).unwrap();
    let surf = segment_surface(&vol, DEFAULT_SURFACE_THRESHOLD).unwrap();
    assert_eq!(surf.valid_count(), surf.len());
    surf.valid_points().map(|(_, p)| (p.z - s.height(p.x, p.y)).abs()).fold(0.0, f64::max)
}

#[test]
fn segmentation_recovers_analytic_heights() {
    let scenes = [
        scene(vec![Primitive::Plane { z: 2.5 }]),
        scene(vec![
            Primitive::Plane { z: 1.0 },
            Primitive::SphereCap { center: Vec2::new(0.5, -0.5), radius: 5.0, height: 3.0 },
        ]),
        scene(vec![
            Primitive::Plane { z: 1.0 },
            Primitive::GaussianBump { center: Vec2::new(-3.0, 0.0), sigma: 1.5, height: 2.0 },
            Primitive::GaussianBump { center: Vec2::new(3.0, 1.0), sigma: 1.0, height: 1.2 },
        ]),
    ];
    for s in &scenes {
        assert!(round_trip_worst(s) <= 0.0146, "{s:?}");
    }
}

/// Least-squares smoothing weights from the normal equations of a shifted
/// power basis, solved by QR rather than an explicit inverse.
fn qr_weights(window: usize, order: usize) -> Vec<f64> {
    let m = (window / 2) as f64;
    let v = DMatrix::from_fn(window, order + 1, |i, j| ((i as f64 - m) / m).powi(j as i32));
    let qr = v.clone().qr();
    (0..window)
        .map(|k| {
            let mut e = nalgebra::DVector::zeros(window);
            e[k] = 1.0;
            let c = qr.r().solve_upper_triangular(&(qr.q().transpose() * e)).unwrap();
            c[0]
        })
        .collect()
}

#[test]
fn smoothing_weights_match_qr_fit() {
    for (w, p) in [(5, 2), (7, 3), (11, 3), (11, 4), (21, 5)] {
        let a = savgol::coefficients(w, p);
        let b = qr_weights(w, p);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12, "w={w} p={p}");
        }
    }
}

proptest! {
    #[test]
    fn smoothing_reproduces_low_order_polynomials(c in prop::collection::vec(-1.0f64..1.0, 4)) {
        // Cubic with window 11: interior samples are exact.
        let xs: Vec<f64> = (0..60).map(|i| i as f64 / 59.0).collect();
        let y: Vec<f64> = xs.iter().map(|x| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x).collect();
        let s = savgol::smooth(&y, 11, 3);
        for i in 5..55 {
            prop_assert!((s[i] - y[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn preprocessing_stays_in_unit_interval(raw in prop::collection::vec(0.0f64..1000.0, 351)) {
        prop_assume!(raw.iter().any(|&v| v > 0.0));
        let s = Spectrum::new(nm_grid(350.0, 700.0, 1.0), raw).unwrap();
        let p = preprocess(&s, &PreprocessConfig::default()).unwrap();
        prop_assert_eq!(p.len(), 251);
        prop_assert!(p.intensities().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn splits_are_disjoint_and_exhaustive(counts in prop::collection::vec(1usize..30, 6..8), seed in 0u64..1000) {
        let samples: Vec<LabeledSample> = counts
            .iter()
            .enumerate()
            .flat_map(|(s, &c)| (0..c).map(move |i| LabeledSample {
                subject: format!("s{s}"),
                label: TissueClass::from_index(i % 2),
                features: vec![i as f64],
            }))
            .collect();
        let plans = make_splits(&samples, 4, 2, seed).unwrap();
        let min = *counts.iter().min().unwrap();
        for plan in &plans {
            let train: BTreeSet<usize> = plan.train_indices.iter().copied().collect();
            let test: BTreeSet<usize> = plan.test_indices.iter().copied().collect();
            prop_assert!(train.is_disjoint(&test));
            let ts: BTreeSet<&String> = plan.train_subjects.iter().collect();
            prop_assert!(plan.test_subjects.iter().all(|s| !ts.contains(s)));
            for &i in train.iter().chain(&test) {
                prop_assert_eq!(plan.test_subjects.contains(&samples[i].subject), test.contains(&i));
            }
            for (s, &c) in counts.iter().enumerate() {
                let id = format!("s{s}");
                let kept = train.iter().chain(&test).filter(|&&i| samples[i].subject == id).count();
                prop_assert_eq!(kept, c.min(3 * min));
            }
        }
    }
}
