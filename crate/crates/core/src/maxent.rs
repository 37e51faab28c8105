//! Maximum-entropy bounds under a second-moment constraint.
//!
//! `bd_lambda` is the largest Rényi entropy of order λ attainable by a
//! d-dimensional density with identity covariance. The extremal densities are
//! Student-r (λ > 1, compact support), Gaussian (λ = 1) and Student-t
//! (d/(d+2) < λ < 1, heavy tailed). [`extremal_renyi`] integrates them
//! numerically and serves as an independent check on the closed form.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rules::{integrate_graded, integrate_half_line, refine, Grading, QuadratureSpec};
use crate::special::{log_beta, log_gamma, log_unit_sphere_area};

/// Rényi order together with the dimension it is applied in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenyiOrder {
    pub lambda: f64,
    pub d: usize,
}

impl RenyiOrder {
    pub fn new(lambda: f64, d: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("Rényi order must be > 0, got {lambda}")));
        }
        if d == 0 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        Ok(Self { lambda, d })
    }

    /// Lower end `d/(d+2)` of the open window where the bound is finite.
    pub fn threshold(&self) -> f64 {
        self.d as f64 / (self.d as f64 + 2.0)
    }

    /// Errors unless `λ > d/(d+2)`.
    pub fn check_window(&self) -> Result<()> {
        let threshold = self.threshold();
        if self.lambda <= threshold {
            return Err(Error::BoundUndefined { lambda: self.lambda, d: self.d, threshold });
        }
        Ok(())
    }
}

/// `B_d(λ)` in nats.
pub fn bd_lambda(order: RenyiOrder) -> Result<f64> {
    bd_lambda_impl(order, false)
}

/// `B_d(λ)` with the λ > 1 power term taken to the exponent `1/(1-λ)`
/// instead of `1/(λ-1)`. Reported only for comparison; this variant falls
/// below the Gaussian entropy (e.g. 0.869 vs 1.419 at d = 1, λ = 2) and is not
/// a valid bound.
pub fn bd_lambda_printed(order: RenyiOrder) -> Result<f64> {
    bd_lambda_impl(order, true)
}

fn bd_lambda_impl(order: RenyiOrder, printed_exponent: bool) -> Result<f64> {
    order.check_window()?;
    let lam = order.lambda;
    let d = order.d as f64;
    if lam == 1.0 {
        return Ok(0.5 * d * (2.0 * PI * E).ln());
    }
    let q = (2.0 + d) * lam - d;
    let ln_ratio = (q / (2.0 * lam)).ln();
    if lam > 1.0 {
        let exponent = if printed_exponent { 1.0 / (1.0 - lam) } else { 1.0 / (lam - 1.0) };
        Ok(0.5 * d * (PI * q / (lam - 1.0)).ln()
            + exponent * ln_ratio
            + log_gamma(lam / (lam - 1.0))?
            - log_gamma(q / (2.0 * (lam - 1.0)))?)
    } else {
        Ok(0.5 * d * (PI * q / (1.0 - lam)).ln()
            - (lam / (1.0 - lam) * ln_ratio + log_gamma(lam / (1.0 - lam))?
                - log_gamma(q / (2.0 * (1.0 - lam)))?))
    }
}

/// Shannon bound `(d/2) ln(2πe <r²>/d)`.
pub fn shannon_bound(d: usize, r2: f64) -> Result<f64> {
    check_r2(r2)?;
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    let d = d as f64;
    Ok(0.5 * d * (2.0 * PI * E * r2 / d).ln())
}

/// Baseline Rényi bound `B_d(λ) + (d/2) ln(<r²>/d)`.
pub fn baseline_renyi_bound(order: RenyiOrder, r2: f64) -> Result<f64> {
    check_r2(r2)?;
    let d = order.d as f64;
    Ok(bd_lambda(order)? + 0.5 * d * (r2 / d).ln())
}

fn check_r2(r2: f64) -> Result<()> {
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::Domain(format!("<r^2> must be > 0, got {r2}")));
    }
    Ok(())
}

/// Rényi entropy of the identity-covariance Gaussian in closed form.
pub fn gaussian_renyi(order: RenyiOrder) -> f64 {
    let d = order.d as f64;
    let lam = order.lambda;
    if lam == 1.0 {
        0.5 * d * (2.0 * PI * E).ln()
    } else {
        0.5 * d * (2.0 * PI).ln() + 0.5 * d * lam.ln() / (lam - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalKind {
    StudentR,
    Gaussian,
    StudentT,
}

/// Spherically symmetric maximizer of `H_λ` under identity covariance.
///
/// * `StudentR`: `A (1 - r²/a²)_+^{shape}`, `shape = 1/(λ-1)`, `scale = a`
/// * `Gaussian`: `A exp(-r²/2)`, `shape = 0`, `scale = 1`
/// * `StudentT`: `A (1 + r²/c²)^{-shape}`, `shape = 1/(1-λ)`, `scale = c`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalDensity {
    pub kind: ExtremalKind,
    pub d: usize,
    pub shape: f64,
    pub scale: f64,
    /// `ln A`
    pub log_norm: f64,
}

impl ExtremalDensity {
    /// Natural log of the density at radius `r`.
    pub fn log_density(&self, r: f64) -> f64 {
        let u = r / self.scale;
        match self.kind {
            ExtremalKind::StudentR => {
                let base = 1.0 - u * u;
                if base <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    self.log_norm + self.shape * base.ln()
                }
            }
            ExtremalKind::Gaussian => self.log_norm - 0.5 * r * r,
            ExtremalKind::StudentT => self.log_norm - self.shape * (u * u).ln_1p(),
        }
    }

    pub fn density(&self, r: f64) -> f64 {
        self.log_density(r).exp()
    }

    /// Value at the origin.
    pub fn peak(&self) -> f64 {
        self.log_norm.exp()
    }

    /// `∫ g(r) r^{d-1} dr` over the radial support, where `g` is a function
    /// of the density value and radius.
    fn radial_integral<G: Fn(f64, f64) -> f64>(&self, g: G, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let dm1 = (self.d - 1) as i32;
        let integrand = |r: f64| {
            let ld = self.log_density(r);
            if ld == f64::NEG_INFINITY {
                0.0
            } else {
                g(ld, r) * r.powi(dm1)
            }
        };
        match self.kind {
            ExtremalKind::StudentR => refine(spec, |n| {
                integrate_graded(integrand, &[0.0, self.scale], n, Grading::FINE)
            }),
            _ => refine(spec, |n| {
                integrate_half_line(integrand, self.scale, &[], spec.radial_transform, n, Grading::FINE)
            }),
        }
    }

    /// Per-component variance `<r²>/d`, by radial quadrature.
    pub fn component_variance(&self, spec: &QuadratureSpec) -> Result<f64> {
        let (m, _) = self.radial_integral(|ld, r| ld.exp() * r * r, spec)?;
        Ok(log_unit_sphere_area(self.d).exp() * m / self.d as f64)
    }

    /// Total mass, by radial quadrature.
    pub fn mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        let (m, _) = self.radial_integral(|ld, _| ld.exp(), spec)?;
        Ok(log_unit_sphere_area(self.d).exp() * m)
    }
}

/// Builds the identity-covariance extremal density for `order`.
pub fn extremal_density(order: RenyiOrder) -> Result<ExtremalDensity> {
    order.check_window()?;
    let d = order.d as f64;
    let lam = order.lambda;
    let log_area = log_unit_sphere_area(order.d);
    if lam == 1.0 {
        return Ok(ExtremalDensity {
            kind: ExtremalKind::Gaussian,
            d: order.d,
            shape: 0.0,
            scale: 1.0,
            log_norm: -0.5 * d * (2.0 * PI).ln(),
        });
    }
    let q = (d + 2.0) * lam - d;
    if lam > 1.0 {
        let shape = 1.0 / (lam - 1.0);
        let scale = (q / (lam - 1.0)).sqrt();
        // ∫_0^a (1 - r²/a²)^p r^{d-1} dr = a^d B(d/2, p+1) / 2
        let log_mass = log_area + d * scale.ln() - std::f64::consts::LN_2 + log_beta(0.5 * d, shape + 1.0)?;
        Ok(ExtremalDensity { kind: ExtremalKind::StudentR, d: order.d, shape, scale, log_norm: -log_mass })
    } else {
        let shape = 1.0 / (1.0 - lam);
        let scale = (q / (1.0 - lam)).sqrt();
        // ∫_0^∞ (1 + r²/c²)^{-s} r^{d-1} dr = c^d B(d/2, s - d/2) / 2
        let log_mass =
            log_area + d * scale.ln() - std::f64::consts::LN_2 + log_beta(0.5 * d, shape - 0.5 * d)?;
        Ok(ExtremalDensity { kind: ExtremalKind::StudentT, d: order.d, shape, scale, log_norm: -log_mass })
    }
}

/// `H_λ` of the extremal density, by radial quadrature.
pub fn extremal_renyi(order: RenyiOrder) -> Result<f64> {
    extremal_renyi_with(order, &QuadratureSpec::default())
}

pub fn extremal_renyi_with(order: RenyiOrder, spec: &QuadratureSpec) -> Result<f64> {
    let density = extremal_density(order)?;
    let lam = order.lambda;
    let log_area = log_unit_sphere_area(order.d);
    if lam == 1.0 {
        let (s, _) = density.radial_integral(|ld, _| -ld * ld.exp(), spec)?;
        Ok(log_area.exp() * s)
    } else {
        let (p, _) = density.radial_integral(|ld, _| (lam * ld).exp(), spec)?;
        Ok((log_area + p.ln()) / (1.0 - lam))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ord(lambda: f64, d: usize) -> RenyiOrder {
        RenyiOrder::new(lambda, d).unwrap()
    }

    #[test]
    fn bd_golden() {
        assert_abs_diff_eq!(bd_lambda(ord(1.0, 3)).unwrap(), 4.2568156, epsilon = 1e-7);
        assert_abs_diff_eq!(bd_lambda(ord(1.0, 3)).unwrap(), 1.5 * (2.0 * PI * E).ln(), epsilon = 1e-14);
        // Rényi-2 entropy of (3/(4√5))(1 - x²/5)_+
        let student_r = 1.5 * 5f64.ln() - 3f64.ln();
        assert_abs_diff_eq!(bd_lambda(ord(2.0, 1)).unwrap(), student_r, epsilon = 1e-13);
        assert_abs_diff_eq!(student_r, 1.3155446, epsilon = 1e-7);
        let student_t = 1.5 * 3f64.ln();
        assert_abs_diff_eq!(bd_lambda(ord(0.6, 1)).unwrap(), student_t, epsilon = 1e-13);
        assert_abs_diff_eq!(student_t, 1.6479184, epsilon = 1e-7);
    }

    #[test]
    fn printed_exponent_is_infeasible() {
        let printed = bd_lambda_printed(ord(2.0, 1)).unwrap();
        assert_abs_diff_eq!(printed, 0.8693, epsilon = 1e-4);
        assert!(printed < gaussian_renyi(ord(2.0, 1)));
        // identical off the λ > 1 branch
        assert_eq!(bd_lambda_printed(ord(0.7, 2)).unwrap(), bd_lambda(ord(0.7, 2)).unwrap());
    }

    #[test]
    fn window_is_open() {
        assert!(matches!(bd_lambda(ord(0.6, 3)), Err(Error::BoundUndefined { .. })));
        assert!(matches!(bd_lambda(ord(0.5, 3)), Err(Error::BoundUndefined { .. })));
        assert!(matches!(bd_lambda(ord(1.0 / 3.0, 1)), Err(Error::BoundUndefined { .. })));
        assert!(RenyiOrder::new(0.0, 3).is_err());
        assert!(RenyiOrder::new(-1.0, 3).is_err());
    }

    #[test]
    fn continuity_at_one() {
        for d in [1usize, 2, 3, 5] {
            let at_one = bd_lambda(ord(1.0, d)).unwrap();
            for l in [1.0 - 1e-4, 1.0 + 1e-4] {
                assert!((bd_lambda(ord(l, d)).unwrap() - at_one).abs() <= 1e-3, "d={d} l={l}");
            }
        }
    }

    #[test]
    fn shannon_and_baseline_golden() {
        assert_abs_diff_eq!(shannon_bound(3, 1.5).unwrap(), 1.5 * (PI * E).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(shannon_bound(3, 1.5).unwrap(), 3.2170948, epsilon = 1e-7);
        assert_abs_diff_eq!(shannon_bound(3, 3.0).unwrap(), 4.2568156, epsilon = 1e-7);
        assert_abs_diff_eq!(shannon_bound(2, 2.0).unwrap(), 2.8378771, epsilon = 1e-7);
        assert!(shannon_bound(3, 0.0).is_err());

        assert_abs_diff_eq!(
            baseline_renyi_bound(ord(1.0, 3), 3.0).unwrap(),
            shannon_bound(3, 3.0).unwrap(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(baseline_renyi_bound(ord(2.0, 1), 1.0).unwrap(), 1.3155446, epsilon = 1e-7);
        assert_abs_diff_eq!(
            baseline_renyi_bound(ord(1.0, 3), 30.0).unwrap(),
            4.2568156 + 1.5 * 10f64.ln(),
            epsilon = 1e-7
        );
        assert!(baseline_renyi_bound(ord(1.0, 3), -1.0).is_err());
        assert!(baseline_renyi_bound(ord(0.5, 3), 1.0).is_err());
    }

    #[test]
    fn extremal_shapes() {
        let r = extremal_density(ord(2.0, 1)).unwrap();
        assert_eq!(r.kind, ExtremalKind::StudentR);
        assert_abs_diff_eq!(r.scale * r.scale, 5.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.peak(), 3.0 / (4.0 * 5f64.sqrt()), epsilon = 1e-14);
        let t = extremal_density(ord(0.6, 1)).unwrap();
        assert_eq!(t.kind, ExtremalKind::StudentT);
        assert_abs_diff_eq!(t.scale * t.scale, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(t.shape, 2.5, epsilon = 1e-13);
        let g = extremal_density(ord(1.0, 4)).unwrap();
        assert_eq!(g.kind, ExtremalKind::Gaussian);
    }

    #[test]
    fn extremal_densities_have_identity_covariance() {
        let spec = QuadratureSpec::default();
        for d in [1usize, 2, 3, 5] {
            for l in [0.9, 1.0, 1.5, 2.0, 3.0] {
                let rho = extremal_density(ord(l, d)).unwrap();
                assert_abs_diff_eq!(rho.mass(&spec).unwrap(), 1.0, epsilon = 1e-10);
                assert_abs_diff_eq!(rho.component_variance(&spec).unwrap(), 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn extremal_renyi_golden() {
        assert_abs_diff_eq!(extremal_renyi(ord(2.0, 1)).unwrap(), 1.3155446, epsilon = 1e-7);
        assert_abs_diff_eq!(extremal_renyi(ord(1.0, 3)).unwrap(), 4.2568156, epsilon = 1e-7);
        assert_abs_diff_eq!(extremal_renyi(ord(0.6, 1)).unwrap(), 1.6479184, epsilon = 1e-7);
    }

    #[test]
    fn bound_dominates_gaussian() {
        for d in [1usize, 2, 3, 5] {
            for l in [0.9, 1.0, 1.5, 2.0, 3.0] {
                let o = ord(l, d);
                let b = bd_lambda(o).unwrap();
                let g = gaussian_renyi(o);
                if l == 1.0 {
                    assert_abs_diff_eq!(b, g, epsilon = 1e-13);
                } else {
                    assert!(b > g, "d={d} l={l}: {b} <= {g}");
                }
            }
        }
    }
}
