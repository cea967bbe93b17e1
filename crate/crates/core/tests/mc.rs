use hardedge::finite_n::{log_prob_smallest, EnsembleParams};
use hardedge::mc::*;
use hardedge::PrecisionCtx;
use proptest::prelude::*;
use rayon::prelude::*;

fn exact_survival(t: f64, n: usize, alpha: u32, beta: u32) -> f64 {
    let pr = EnsembleParams::new(alpha as f64, beta as f64, n).unwrap();
    log_prob_smallest(t, &pr, &PrecisionCtx::for_degree(n)).unwrap().to_f64().exp()
}

/// Mean and standard error of the single eigenvalue for `n = 1`.
fn single_eigenvalue_stats(alpha: u32, beta: u32, draws: u64, seed: u64) -> (f64, f64) {
    let xs: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| sample_spectrum(1, alpha, beta, RngSpec { seed, stream: i }).unwrap().eigenvalues[0])
        .collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn single_eigenvalue_is_uniform_without_weights() {
    let (mean, _) = single_eigenvalue_stats(0, 0, 100_000, 11);
    let tol = 4.0 / 12f64.sqrt() * 10f64.powf(-2.5);
    assert!((mean - 0.5).abs() <= tol, "{mean}");
}

#[test]
fn single_eigenvalue_follows_beta_two_one() {
    let (mean, se) = single_eigenvalue_stats(1, 0, 50_000, 12);
    assert!((mean - 2.0 / 3.0).abs() <= 4.0 * se, "{mean} +- {se}");
}

#[test]
fn spectra_are_sorted_inside_the_unit_interval() {
    for (n, a, b) in [(1usize, 0u32, 0u32), (4, 2, 1), (12, 0, 5)] {
        for stream in 0..50 {
            let s = sample_spectrum(n, a, b, RngSpec { seed: 3, stream }).unwrap();
            assert_eq!(s.eigenvalues.len(), n);
            assert!(s.eigenvalues.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!(s.eigenvalues.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn alpha_zero_survival_has_closed_form() {
    let e = survival_estimate(100_000, 0.1, 3, 0, 2, 5).unwrap();
    let exact = 0.9f64.powi(15);
    assert!((e.p_hat - exact).abs() <= 4.0 * e.se, "{} +- {} vs {exact}", e.p_hat, e.se);
}

#[test]
fn survival_matches_exact_finite_n() {
    let e = survival_estimate(100_000, 0.05, 5, 1, 2, 7).unwrap();
    let exact = exact_survival(0.05, 5, 1, 2);
    assert!((e.p_hat - exact).abs() <= 4.0 * e.se, "{} +- {} vs {exact}", e.p_hat, e.se);
    assert_eq!(e.samples, 100_000);
    assert!((e.se - (e.p_hat * (1.0 - e.p_hat) / 1e5).sqrt()).abs() < 1e-15);
}

#[test]
fn statistical_grid_is_consistent() {
    let cells = [(2usize, 0u32, 1u32), (3, 1, 0), (4, 2, 1)];
    let ts = [0.01, 0.03, 0.06];
    let mut outliers = 0;
    for (k, &(n, a, b)) in cells.iter().enumerate() {
        for (j, &t) in ts.iter().enumerate() {
            let e = survival_estimate(20_000, t, n, a, b, 100 + (3 * k + j) as u64).unwrap();
            let exact = exact_survival(t, n, a, b);
            if (e.p_hat - exact).abs() > 3.0 * e.se {
                outliers += 1;
            }
        }
    }
    assert!(outliers <= 1, "{outliers} of 9 cells outside 3 se");
}

#[test]
fn survival_tends_to_one_at_the_origin() {
    let e = survival_estimate(1_000, 1e-9, 4, 1, 1, 9).unwrap();
    assert_eq!(e.p_hat, 1.0);
    assert_eq!(e.se, 0.0);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| survival_estimate(5_000, 0.05, 4, 1, 2, 42).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    let spec = RngSpec { seed: 42, stream: 17 };
    assert_eq!(sample_spectrum(6, 1, 3, spec).unwrap(), sample_spectrum(6, 1, 3, spec).unwrap());
}

#[test]
fn invalid_requests_are_rejected() {
    assert!(sample_spectrum(0, 1, 1, RngSpec { seed: 0, stream: 0 }).is_err());
    assert!(survival_estimate(99, 0.5, 2, 0, 0, 1).is_err());
    assert!(survival_estimate(100, 0.0, 2, 0, 0, 1).is_err());
    assert!(survival_estimate(100, 1.0, 2, 0, 0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_sample_is_a_valid_spectrum(n in 1usize..10, a in 0u32..4, b in 0u32..4, seed: u64, stream: u64) {
        let s = sample_spectrum(n, a, b, RngSpec { seed, stream }).unwrap();
        prop_assert_eq!(s.eigenvalues.len(), n);
        prop_assert!(s.eigenvalues.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] < w[1]));
    }
}
