use libm::erf;
use std::f64::consts::PI;

use renyi_bounds::{hydrogen_state, oscillator_state, sample_state, QuantumNumberChain, RadialState};

/// Kolmogorov–Smirnov distance between sampled radii and `cdf`.
fn ks_statistic(state: &RadialState, seed: u64, n: usize, cdf: impl Fn(f64) -> f64) -> f64 {
    let chain = QuantumNumberChain::new(3, vec![0, 0]).unwrap();
    let cloud = sample_state(state, &chain, n, seed).unwrap();
    let mut r: Vec<f64> = cloud.points().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    r.sort_by(f64::total_cmp);
    let nf = n as f64;
    r.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max)
}

const N: usize = 100_000;

fn critical_1pct() -> f64 {
    1.628 / (N as f64).sqrt()
}

#[test]
fn hydrogen_1s_radii_pass_ks() {
    let s = hydrogen_state(1, 0, 3).unwrap();
    let d = ks_statistic(&s, 42, N, |r| 1.0 - (-2.0 * r).exp() * (1.0 + 2.0 * r + 2.0 * r * r));
    assert!(d < critical_1pct(), "D = {d}");
}

#[test]
fn oscillator_ground_radii_pass_ks() {
    let s = oscillator_state(0, 0, 3).unwrap();
    let d = ks_statistic(&s, 43, N, |r| erf(r) - 2.0 / PI.sqrt() * r * (-r * r).exp());
    assert!(d < critical_1pct(), "D = {d}");
}

#[test]
fn s_state_cloud_is_isotropic() {
    for d in [2usize, 4, 5] {
        let s = oscillator_state(1, 0, d).unwrap();
        let chain = QuantumNumberChain::new(d, vec![0; d - 1]).unwrap();
        let cloud = sample_state(&s, &chain, 200_000, 5).unwrap();
        let cov = renyi_bounds::empirical_covariance(&cloud).unwrap();
        for c in cov.diagonal() {
            assert!((c - 1.0 / d as f64).abs() < 4.0 / (200_000f64).sqrt(), "d = {d}: {c}");
        }
    }
}
