mod common;

use crmgg::crm::{rate_density, sample_three_param_bp, BetaProcessParams, StickBreakingConfig};
use statrs::distribution::{Beta, ContinuousCDF};

fn default_params() -> BetaProcessParams {
    BetaProcessParams::new(1.0, 0.1, 3.0).unwrap()
}

#[test]
fn single_round_weights_follow_first_stick() {
    let params = default_params();
    let mut weights = Vec::new();
    let mut seed = 0;
    while weights.len() < 10_000 {
        let cfg = StickBreakingConfig::new(1, seed).with_weight_floor(0.0);
        weights.extend_from_slice(sample_three_param_bp(params, cfg).unwrap().weights());
        seed += 1;
    }
    weights.truncate(10_000);
    let first_stick = Beta::new(0.9, 1.1).unwrap();
    let d = common::ks_distance(&mut weights, |x| first_stick.cdf(x));
    let critical = 1.628 / (weights.len() as f64).sqrt();
    assert!(d < critical, "KS distance {d} exceeds {critical}");
}

#[test]
fn atoms_per_round_average_to_mass() {
    let params = default_params();
    let seeds = 4000;
    let atoms: usize = (0..seeds)
        .map(|s| {
            let cfg = StickBreakingConfig::new(1, s).with_weight_floor(0.0);
            sample_three_param_bp(params, cfg).unwrap().len()
        })
        .sum();
    let mean = atoms as f64 / seeds as f64;
    let se = (3.0 / seeds as f64).sqrt();
    assert!((mean - 3.0).abs() < 4.0 * se, "mean atom count {mean}");
}

#[test]
fn sampler_ignores_thread_count() {
    let cfg = StickBreakingConfig::new(300, 11);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_three_param_bp(default_params(), cfg).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn density_integrates_to_mass() {
    for (theta, alpha, gamma) in [(1.0, 0.1, 3.0), (2.0, 0.0, 1.5), (0.5, 0.6, 2.0)] {
        let params = BetaProcessParams::new(theta, alpha, gamma).unwrap();
        // w = t^(1/(1-alpha)) absorbs the w^(-alpha) singularity at zero.
        let p = 1.0 / (1.0 - alpha);
        let integrand = |t: f64| {
            let w = t.powf(p);
            w * rate_density(params, w).unwrap() * p * t.powf(p - 1.0)
        };
        let mass = common::gauss_legendre(integrand, 0.0, 1.0, 4000);
        assert!(
            (mass - gamma).abs() < 1e-3 * gamma,
            "theta={theta} alpha={alpha}: {mass}"
        );
    }
}
