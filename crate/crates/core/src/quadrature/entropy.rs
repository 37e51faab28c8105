//! Rényi and Shannon entropies of separable densities `|R(r)|² |Y_μ(Ω)|²`.
//!
//! [`renyi_total`] uses the factorization of `∫ρ^λ` into radial and angular
//! one-dimensional integrals. [`renyi_total_tensor`] integrates `ρ^λ` over a
//! full tensor grid without using the factorization and serves as its
//! oracle; [`scaling_check`] does the same for a linearly stretched density.

use std::f64::consts::PI;

use super::rules::{clustered_nodes, composite_nodes, gauss_legendre, half_line_breaks, Grading, QuadratureSpec};
use super::{EntropyValue, Method};
use crate::angular::{angular_density, angular_renyi_with, PolarFactor, QuantumNumberChain};
use crate::coords::{to_cartesian, to_hyperspherical};
use crate::error::{Error, Result};
use crate::states::RadialState;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("Rényi order must be > 0, got {lambda}")));
    }
    Ok(())
}

/// Radial part `(1/(1-λ)) ln ∫ |R|^{2λ} r^{d-1} dr`, or
/// `-∫ |R|² ln |R|² r^{d-1} dr` at `λ = 1`.
pub fn renyi_radial(state: &RadialState, lambda: f64, spec: &QuadratureSpec) -> Result<EntropyValue> {
    check_lambda(lambda)?;
    let (value, est_error) = if lambda == 1.0 {
        state.radial_integral(
            |r| {
                let ld = state.log_density(r);
                if ld == f64::NEG_INFINITY {
                    0.0
                } else {
                    -ld * ld.exp()
                }
            },
            spec,
        )?
    } else {
        let (p, e) = state.radial_integral(|r| (lambda * state.log_density(r)).exp(), spec)?;
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonConvergence(format!("radial power integral is {p}")));
        }
        (p.ln() / (1.0 - lambda), e / (p * (1.0 - lambda).abs()))
    };
    Ok(EntropyValue { lambda, value, method: Method::Quadrature1d, est_error })
}

fn check_pair(state: &RadialState, chain: &QuantumNumberChain) -> Result<()> {
    if state.d() != chain.d() {
        return Err(Error::Domain(format!(
            "state dimension {} does not match chain dimension {}",
            state.d(),
            chain.d()
        )));
    }
    if state.l() != chain.l() {
        return Err(Error::Domain(format!(
            "state has l = {} but chain {chain} has l = {}",
            state.l(),
            chain.l()
        )));
    }
    Ok(())
}

/// Total entropy as radial + angular parts.
pub fn renyi_total(
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<EntropyValue> {
    check_pair(state, chain)?;
    let radial = renyi_radial(state, lambda, spec)?;
    let (angular, angular_err) = angular_renyi_with(chain, lambda, spec)?;
    Ok(EntropyValue {
        lambda,
        value: radial.value + angular,
        method: Method::Quadrature1d,
        est_error: radial.est_error + angular_err,
    })
}

/// `(node, weight)` lists for the radial coordinate; weights include
/// `r^{d-1}` and the map Jacobian.
fn radial_nodes(state: &RadialState, scale: f64, with_zeros: bool, order: usize, spec: &QuadratureSpec) -> Vec<(f64, f64)> {
    let dm1 = (state.d() - 1) as i32;
    let zeros: &[f64] = if with_zeros { state.zeros() } else { &[] };
    match state.support() {
        Some(r_max) => {
            let mut breaks = vec![0.0];
            breaks.extend(zeros.iter().copied().filter(|z| *z > 0.0 && *z < r_max));
            breaks.push(r_max);
            composite_nodes(&breaks, order, Grading::COARSE)
                .into_iter()
                .map(|(r, w)| (r, w * r.powi(dm1)))
                .collect()
        }
        None => {
            let tr = spec.radial_transform;
            let breaks = half_line_breaks(scale, zeros, tr);
            composite_nodes(&breaks, order, Grading::COARSE)
                .into_iter()
                .map(|(t, w)| {
                    let (r, jac) = tr.map(t, scale);
                    (r, w * jac * r.powi(dm1))
                })
                .collect()
        }
    }
}

/// Node lists per angle; polar weights include `sin^{d-1-j} θ_j`.
fn angular_axes(chain: Option<&QuantumNumberChain>, d: usize, order: usize, azimuth_order: usize) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut axes = Vec::with_capacity(d - 1);
    for j in 1..d - 1 {
        let nodes = match chain {
            Some(c) => clustered_nodes(&PolarFactor::new(c, j)?.breaks(), order),
            None => composite_nodes(&[0.0, PI], order, Grading::COARSE),
        };
        let p = (d - 1 - j) as i32;
        axes.push(
            nodes
                .into_iter()
                .map(|(t, w)| (t, w * t.sin().powi(p)))
                .collect(),
        );
    }
    let rule = gauss_legendre(azimuth_order);
    let panels = if chain.is_some() { 1 } else { 4 };
    let h = 2.0 * PI / panels as f64;
    let mut az = Vec::new();
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            az.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    axes.push(az);
    Ok(axes)
}

/// Visits every point of the tensor product of `axes`.
fn for_each_tensor_point<F: FnMut(&[f64], f64)>(axes: &[Vec<(f64, f64)>], mut f: F) {
    let dims = axes.len();
    let mut idx = vec![0usize; dims];
    let mut point = vec![0.0; dims];
    if axes.iter().any(|a| a.is_empty()) {
        return;
    }
    loop {
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            point[k] = axes[k][i].0;
            w *= axes[k][i].1;
        }
        f(&point, w);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == dims {
                return;
            }
        }
    }
}

fn finish(lambda: f64, acc: f64) -> Result<f64> {
    if lambda == 1.0 {
        Ok(acc)
    } else if acc > 0.0 && acc.is_finite() {
        Ok(acc.ln() / (1.0 - lambda))
    } else {
        Err(Error::NonConvergence(format!("tensor power integral is {acc}")))
    }
}

/// `ρ^λ` (or `-ρ ln ρ` at λ = 1) from `ln ρ`.
#[inline]
fn integrand(lambda: f64, log_rho: f64) -> f64 {
    if log_rho == f64::NEG_INFINITY {
        0.0
    } else if lambda == 1.0 {
        -log_rho * log_rho.exp()
    } else {
        (lambda * log_rho).exp()
    }
}

fn check_tensor_dim(d: usize) -> Result<()> {
    if !(2..=4).contains(&d) {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "tensor-product quadrature is limited to d in 2..=4".into(),
        });
    }
    Ok(())
}

fn tensor_orders(spec: &QuadratureSpec) -> (usize, usize) {
    let fine = (spec.base_order / 4).max(8);
    ((fine / 2).max(4), fine)
}

/// Entropy of `|R|² |Y_μ|²` by full tensor-product quadrature over
/// `(r, θ_1, …, θ_{d-1})`, evaluating the density at every grid point.
pub fn renyi_total_tensor(
    state: &RadialState,
    chain: &QuantumNumberChain,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<EntropyValue> {
    check_lambda(lambda)?;
    check_pair(state, chain)?;
    let d = state.d();
    check_tensor_dim(d)?;
    let mut levels = Vec::with_capacity(2);
    let (coarse, fine) = tensor_orders(spec);
    for order in [coarse, fine] {
        // (ln ρ, ρ^λ, weight) per node on each factor; ρ at a tensor point
        // is the product of the radial and angular values
        let radial: Vec<(f64, f64, f64)> = radial_nodes(state, state.length_scale(), true, order, spec)
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(r, w)| {
                let lr = state.log_density(r);
                (lr, (lambda * lr).exp(), w)
            })
            .filter(|(lr, _, _)| *lr > f64::NEG_INFINITY)
            .collect();
        let axes = angular_axes(Some(chain), d, 2 * order, 4)?;
        let mut angular = Vec::new();
        let mut failure = None;
        for_each_tensor_point(&axes, |angles, w| match angular_density(chain, angles) {
            Ok(a) if a > 0.0 => angular.push((a.ln(), a.powf(lambda), w)),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let mut acc = 0.0;
        for &(lr, pr, wr) in &radial {
            let mut inner = 0.0;
            if lambda == 1.0 {
                for &(la, pa, wa) in &angular {
                    inner -= wa * (lr + la) * pr * pa;
                }
            } else {
                for &(_, pa, wa) in &angular {
                    inner += wa * pr * pa;
                }
            }
            acc += wr * inner;
        }
        levels.push(finish(lambda, acc)?);
    }
    Ok(EntropyValue {
        lambda,
        value: levels[1],
        method: Method::QuadratureTensor,
        est_error: (levels[1] - levels[0]).abs(),
    })
}

/// Checks `H_λ[ρ_S] = H_λ[ρ] + ½ Σ ln s_i²` for the stretched density
/// `ρ_S(x) = ρ(S⁻¹x)/|S|`, `S = diag(scales)`. `H_λ[ρ_S]` is integrated on a
/// tensor grid in the stretched coordinates and `H_λ[ρ]` comes from
/// [`renyi_total`]; the residual should vanish.
pub fn scaling_check(
    state: &RadialState,
    chain: &QuantumNumberChain,
    scales: &[f64],
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_lambda(lambda)?;
    check_pair(state, chain)?;
    let d = state.d();
    check_tensor_dim(d)?;
    if scales.len() != d || scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Domain(format!("need {d} positive scale factors, got {scales:?}")));
    }
    let log_det: f64 = scales.iter().map(|s| s.ln()).sum();
    let max_scale = scales.iter().cloned().fold(0.0, f64::max);
    let order = (spec.base_order / 3).max(8);
    let radial = radial_nodes(state, state.length_scale() * max_scale, false, order, spec);
    let axes = angular_axes(None, d, order, order)?;
    let mut dir = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut y_angles = vec![0.0; d - 1];
    let mut acc = 0.0;
    let mut failure = None;
    for_each_tensor_point(&axes, |angles, wa| {
        to_cartesian(1.0, angles, &mut dir);
        for &(r, wr) in &radial {
            if wr == 0.0 {
                continue;
            }
            for i in 0..d {
                y[i] = r * dir[i] / scales[i];
            }
            let ry = to_hyperspherical(&y, &mut y_angles);
            let a = match angular_density(chain, &y_angles) {
                Ok(a) => a,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let log_rho = state.log_density(ry) + a.ln() - log_det;
            acc += wa * wr * integrand(lambda, log_rho);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let stretched = finish(lambda, acc)?;
    let original = renyi_total(state, chain, lambda, spec)?.value;
    Ok(stretched - original - log_det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{hydrogen_state, oscillator_state};
    use approx::assert_abs_diff_eq;

    fn chain(d: usize, mu: &[i64]) -> QuantumNumberChain {
        QuantumNumberChain::new(d, mu.to_vec()).unwrap()
    }

    #[test]
    fn hydrogen_1s_closed_forms() {
        let spec = QuadratureSpec::default();
        let s = hydrogen_state(1, 0, 3).unwrap();
        let c = chain(3, &[0, 0]);
        let h1 = renyi_total(&s, &c, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(h1.value, 3.0 + PI.ln(), epsilon = 1e-10);
        assert_eq!(h1.method, Method::Quadrature1d);
        let h2 = renyi_total(&s, &c, 2.0, &spec).unwrap();
        assert_abs_diff_eq!(h2.value, (8.0 * PI).ln(), epsilon = 1e-10);
        // radial part alone: ∫ 16 e^{-4r} r² dr = 1/2
        let rad = renyi_radial(&s, 2.0, &spec).unwrap();
        assert_abs_diff_eq!(rad.value, 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn oscillator_gaussian_entropy() {
        let spec = QuadratureSpec::default();
        let s = oscillator_state(0, 0, 3).unwrap();
        let h = renyi_total(&s, &chain(3, &[0, 0]), 1.0, &spec).unwrap();
        assert_abs_diff_eq!(h.value, 1.5 * (PI * std::f64::consts::E).ln(), epsilon = 1e-10);
        assert!(h.est_error <= 1e-9);
    }

    #[test]
    fn lambda_one_limit() {
        let spec = QuadratureSpec::default();
        let s = hydrogen_state(2, 1, 3).unwrap();
        let a = renyi_radial(&s, 1.0, &spec).unwrap().value;
        let b = renyi_radial(&s, 1.0 + 1e-6, &spec).unwrap().value;
        assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
    }

    #[test]
    fn mismatch_rejected() {
        let spec = QuadratureSpec::default();
        let s = hydrogen_state(2, 1, 3).unwrap();
        assert!(renyi_total(&s, &chain(3, &[0, 0]), 1.0, &spec).is_err());
        assert!(renyi_total(&s, &chain(4, &[1, 0, 0]), 1.0, &spec).is_err());
        let s5 = oscillator_state(0, 0, 5).unwrap();
        assert!(matches!(
            renyi_total_tensor(&s5, &chain(5, &[0, 0, 0, 0]), 1.0, &spec),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(renyi_radial(&s, 0.0, &spec).is_err());
    }

    #[test]
    fn tensor_golden() {
        let spec = QuadratureSpec::default();
        let s = hydrogen_state(1, 0, 3).unwrap();
        let h = renyi_total_tensor(&s, &chain(3, &[0, 0]), 2.0, &spec).unwrap();
        assert_abs_diff_eq!(h.value, (8.0 * PI).ln(), epsilon = 1e-6);
        assert_eq!(h.method, Method::QuadratureTensor);
        let s = oscillator_state(0, 0, 2).unwrap();
        let h = renyi_total_tensor(&s, &chain(2, &[0]), 1.0, &spec).unwrap();
        assert_abs_diff_eq!(h.value, (PI * std::f64::consts::E).ln(), epsilon = 1e-6);
    }

    #[test]
    fn scaling_identity() {
        let spec = QuadratureSpec::default();
        let s = hydrogen_state(1, 0, 3).unwrap();
        let r = scaling_check(&s, &chain(3, &[0, 0]), &[1.0, 1.0, 1.0], 2.0, &spec).unwrap();
        assert!(r.abs() <= 1e-9, "{r}");
        assert!(scaling_check(&s, &chain(3, &[0, 0]), &[1.0, 0.0, 1.0], 2.0, &spec).is_err());
    }
}
