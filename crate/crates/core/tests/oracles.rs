use num_complex::Complex64;
use qprobe_core::correlations::{kitaev_correlator, CorrelationKernel};
use qprobe_core::models::{KitaevModel, LatticeModel, Statistics};
use qprobe_core::oracle::{bdg_spectrum, FockRing, FockSystem};
use qprobe_core::rates::rate_integral;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bdg_energies_match_k_space() {
    for n in 3..=12 {
        for alpha in [0.3, 1.0, 3.0, 50.0] {
            let m = KitaevModel::with_any_length(2.0, 0.6, alpha, n).unwrap();
            let sol = bdg_spectrum(&m.hopping_matrix(), m.pairing()).unwrap();
            let mut k: Vec<f64> = m.modes(1.0).unwrap().iter().map(|md| md.frequency).collect();
            k.sort_by(f64::total_cmp);
            for (a, b) in sol.energies().iter().zip(&k) {
                assert!((a - b).abs() < 1e-10, "N={n} α={alpha}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn closed_form_correlator_matches_fock_and_bdg() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let alpha = [0.3, 1.0, 3.0, 50.0][rng.random_range(0..4)];
        let m = KitaevModel::with_any_length(rng.random_range(0.5..4.0), rng.random_range(0.2..2.0), alpha, 6).unwrap();
        let fock = FockRing::new(&m.hopping_matrix(), m.pairing()).unwrap();
        let bdg = bdg_spectrum(&m.hopping_matrix(), m.pairing()).unwrap();
        for _ in 0..5 {
            let (l, j) = (rng.random_range(0..6), rng.random_range(0..6));
            let tau = rng.random_range(0.0..4.0);
            let beta = rng.random_range(0.1..3.0);
            let k = kitaev_correlator(&m, l as i64, j as i64, tau, beta).unwrap();
            let f = fock.correlator(l, j, tau, beta);
            let b = bdg.correlator(l, j, tau, beta);
            assert!((k - f).norm() < 1e-10, "closed form {k} vs Fock {f}");
            assert!((b - f).norm() < 1e-10, "BdG {b} vs Fock {f}");
        }
    }
}

#[test]
fn filled_sea_occupation_at_zero_temperature() {
    let m = KitaevModel::with_any_length(1.0, 0.0, 1.0, 7).unwrap();
    let below = m.grid().points().iter().filter(|p| m.band_energy(p.k[0]) < 0.0).count();
    let n = kitaev_correlator(&m, 2, 2, 0.0, f64::INFINITY).unwrap();
    assert!((n.re - below as f64 / 7.0).abs() < 1e-12);
}

#[test]
fn local_rate_matches_double_integral_of_bdg_correlator() {
    let m = KitaevModel::with_any_length(1.5, 0.8, 1.0, 9).unwrap();
    let bdg = bdg_spectrum(&m.hopping_matrix(), m.pairing()).unwrap();
    let kernel = CorrelationKernel::kitaev(&m, 0.7).unwrap();
    let g = 0.01;
    for (nu, t) in [(0.5, 3.0), (2.0, 6.0), (-1.0, 4.0)] {
        let closed = kernel.single_probe_rate([3, 0], g, nu, t);
        let numeric = rate_integral(|a, b| bdg.correlator(3, 3, a - b, 0.7), g, nu, t, 120).unwrap();
        assert!((closed - numeric).abs() < 1e-9 * closed.abs().max(1e-12), "{closed} vs {numeric}");
    }
}

#[test]
fn golden_rule_is_second_order_of_exact_dynamics() {
    let freqs = vec![0.8, 0.9, 0.97, 1.03, 1.1, 1.2];
    let amps = vec![0.12; 6];
    let deviation = |g: f64| {
        let sys = FockSystem::new(freqs.clone(), amps.clone(), Statistics::Fermionic, 1.0, g, 1).unwrap();
        let times: Vec<f64> = (1..=20).map(|i| i as f64 * 5.0).collect();
        let exact = sys.transition_probabilities(1.0, &times).unwrap();
        times.iter().zip(exact).map(|(&t, e)| (e - sys.golden_rule(1.0, t).unwrap()).abs()).fold(0.0, f64::max)
    };
    let ratio = deviation(0.01) / deviation(0.005);
    assert!((8.0..=32.0).contains(&ratio), "{ratio}");
}

#[test]
fn symmetric_correlator_is_hermitian_in_time() {
    let m = KitaevModel::new(5.0, 1.0, 0.3, 11).unwrap();
    let k = CorrelationKernel::kitaev(&m, 0.5).unwrap();
    for tau in [0.3, 1.7] {
        let a = k.symmetric([3, 0], tau);
        let b = k.symmetric([3, 0], -tau);
        assert!((a - b.conj()).norm() < 1e-14);
        assert!((k.symmetric([-3, 0], tau) - a).norm() < 1e-14);
    }
    let _: Complex64 = k.correlator([0, 0], [1, 0], 0.0);
}
