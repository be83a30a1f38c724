use proptest::prelude::*;
use qprobe_core::correlations::{CorrelationKernel, ProbePair};
use qprobe_core::grid::BrillouinGrid;
use qprobe_core::lindblad::{decay_rate, excited_population, extract_coupling, LindbladParams};
use qprobe_core::models::{thermal_occupation, KitaevModel, Statistics};
use qprobe_core::probe::Position;
use qprobe_core::rates::{rate_lines, CurveMetadata, Line};
use qprobe_core::reconstruct::{
    calibrate_ratio, inject_noise, invert_1d, invert_2d, snap_1d, snap_2d, CalibrationMode, GeometryForm, Peak, PeakSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn peak_set(amps: &[f64], position: Position) -> PeakSet {
    PeakSet {
        peaks: amps.iter().enumerate().map(|(i, &a)| Peak { frequency: 1.0 + i as f64, amplitude: a, width: 0.01 }).collect(),
        position,
        time: 1e4,
        metadata: CurveMetadata::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_inversion_round_trip(half in 1usize..40, c in 0.05f64..5.0, cos4 in any::<bool>()) {
        let n = 2 * half + 1;
        let grid = BrillouinGrid::new(1, n, 1.0).unwrap();
        let form = if cos4 { GeometryForm::ChainCos4 } else { GeometryForm::ChainCos2 };
        for p in grid.points() {
            let r = c * form.value(p.k);
            let k = invert_1d(r, c, form).unwrap();
            prop_assert_eq!(snap_1d(k, &grid), p.k[0].abs());
        }
    }

    #[test]
    fn square_inversion_round_trip(n in 3usize..40) {
        let grid = BrillouinGrid::new(2, n, 1.0).unwrap();
        for p in grid.points() {
            let k = [p.k[0], p.k[1]];
            let raw = invert_2d(GeometryForm::SquareBond.value(k), GeometryForm::SquarePlaquette.value(k), 1.0, 1.0).unwrap();
            let mut truth = [k[0].abs(), k[1].abs()];
            truth.sort_by(f64::total_cmp);
            prop_assert!((raw[0] - truth[0]).abs() < 1e-9 && (raw[1] - truth[1]).abs() < 1e-9, "{:?} vs {:?}", raw, truth);
            prop_assert_eq!(snap_2d(raw, &grid), truth);
        }
    }

    #[test]
    fn calibration_is_linear(amps in prop::collection::vec(0.1f64..10.0, 3..20), g in prop::collection::vec(0.0f64..4.0, 20), scale in 0.01f64..100.0) {
        let base = peak_set(&amps, Position::I);
        let alt: Vec<f64> = amps.iter().zip(&g).map(|(a, g)| a * g).collect();
        let scaled: Vec<f64> = alt.iter().map(|a| a * scale).collect();
        let e1 = calibrate_ratio(&base, &peak_set(&alt, Position::II), GeometryForm::ChainCos2, &CalibrationMode::AnalyticMean).unwrap();
        let e2 = calibrate_ratio(&base, &peak_set(&scaled, Position::II), GeometryForm::ChainCos2, &CalibrationMode::AnalyticMean).unwrap();
        prop_assert!((e2.estimate / e1.estimate / scale - 1.0).abs() < 1e-12 || e1.estimate == 0.0);
    }

    #[test]
    fn noise_is_bounded_and_reproducible(amps in prop::collection::vec(0.1f64..10.0, 1..30), eps in 0.0f64..0.1, seed in any::<u64>()) {
        let set = peak_set(&amps, Position::II);
        let a = inject_noise(&set, eps, seed).unwrap();
        prop_assert_eq!(&a, &inject_noise(&set, eps, seed).unwrap());
        for (p, q) in set.peaks.iter().zip(&a.peaks) {
            prop_assert!((q.amplitude / p.amplitude - 1.0).abs() <= eps * (1.0 + 1e-12));
            prop_assert_eq!(p.frequency, q.frequency);
        }
    }

    #[test]
    fn occupations_in_range(w in 1e-3f64..50.0, beta in 1e-3f64..20.0) {
        let f = thermal_occupation(w, beta, Statistics::Fermionic).unwrap();
        let b = thermal_occupation(w, beta, Statistics::Bosonic).unwrap();
        prop_assert!((0.0..=0.5).contains(&f));
        prop_assert!(b >= 0.0 && b.is_finite());
        prop_assert!(b >= f * (1.0 - 1e-12));
    }

    #[test]
    fn rates_are_non_negative(lines in prop::collection::vec((-5.0f64..5.0, 0.0f64..3.0), 0..20), nu in -6.0f64..6.0, t in 0.01f64..100.0) {
        let lines: Vec<Line> = lines.into_iter().map(|(frequency, weight)| Line { frequency, weight }).collect();
        prop_assert!(rate_lines(&lines, nu, t).unwrap() >= 0.0);
    }

    #[test]
    fn hopping_reflection(half in 1usize..30, alpha in 0.0f64..5.0) {
        let n = 2 * half + 1;
        let m = KitaevModel::new(1.0, 1.0, alpha, n).unwrap();
        for r in 1..n {
            prop_assert!((m.hopping(r).unwrap() - m.hopping(n - r).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn lindblad_population_monotone(w in 1e-3f64..10.0, n in 0.0f64..1.0, boson in any::<bool>(), t in 0.0f64..50.0, dt in 0.0f64..5.0) {
        let stats = if boson { Statistics::Bosonic } else { Statistics::Fermionic };
        let p = LindbladParams::new(w, if boson { 10.0 * n } else { n }, stats).unwrap();
        let a = excited_population(&p, t);
        let b = excited_population(&p, t + dt);
        prop_assert!(b >= a);
        prop_assert!(b <= p.stationary_population() + 1e-15);
        if boson {
            prop_assert!(p.stationary_population() < 0.5);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_probe_symmetries(a in -30i64..30, r in 1i64..25, shift in -50i64..50, nu in -10.0f64..40.0, t in 0.01f64..5.0, alpha in 0.1f64..5.0) {
        let m = KitaevModel::new(5.0, 1.0, alpha, 51).unwrap();
        let k = CorrelationKernel::kitaev(&m, 0.5).unwrap();
        let g = 0.01;
        let pair = ProbePair::new([a, 0], [a + r, 0], nu, g).unwrap();
        let swapped = ProbePair::new([a + r, 0], [a, 0], nu, g).unwrap();
        let moved = ProbePair::new([a + shift, 0], [a + r + shift, 0], nu, g).unwrap();
        let direct = k.gamma_bar(&pair, t).unwrap();
        prop_assert_eq!(direct, k.gamma_bar(&swapped, t).unwrap());
        prop_assert_eq!(direct, k.gamma_bar(&moved, t).unwrap());
        let assembled = k.assembled_gamma_bar(&pair, t).unwrap();
        let scale = k.single_probe_rate([a, 0], g, nu, t).max(1e-300);
        prop_assert!((assembled - direct).abs() <= 1e-10 * scale);
    }

    #[test]
    fn correlation_recovered_from_gamma_bar(r in 1i64..10, t in 0.2f64..3.0) {
        let m = KitaevModel::new(5.0, 1.0, 1.0, 21).unwrap();
        let k = CorrelationKernel::kitaev(&m, 0.5).unwrap();
        let c = k.correlation_from_gamma_bar([0, 0], [r, 0], t, 1e-4).unwrap();
        let exact = k.symmetric([r, 0], t);
        prop_assert!((c - exact).norm() < 1e-4 * (1.0 + exact.norm()), "{} vs {}", c, exact);
    }
}

#[test]
fn coupling_fit_tolerates_one_percent_noise() {
    let p = LindbladParams::new(0.3, 1.0, Statistics::Bosonic).unwrap();
    let gamma = decay_rate(&p);
    let times: Vec<f64> = (0..200).map(|i| i as f64 * 6.0 / (199.0 * gamma)).collect();
    let mut errors: Vec<f64> = (0..100u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<(f64, f64)> =
                times.iter().map(|&t| (t, excited_population(&p, t) + 0.01 * rng.random_range(-1.0..=1.0))).collect();
            let fit = extract_coupling(&samples, 1.0, Statistics::Bosonic).unwrap();
            (fit.weight - 0.3).abs() / 0.3
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    let median = 0.5 * (errors[49] + errors[50]);
    assert!(median <= 0.05, "median relative error {median}");
}
