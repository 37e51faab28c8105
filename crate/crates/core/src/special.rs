//! Scalar special functions: log-gamma, Gegenbauer and generalized Laguerre
//! polynomials, and the Gegenbauer normalization integral.
//!
//! Gamma ratios are always formed as differences of `log_gamma` so that large
//! dimensions or degrees do not overflow.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Degree and superscript of a Gegenbauer polynomial `C_n^lam`.
///
/// `lam` is the polynomial parameter, unrelated to the Rényi order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyIndex {
    pub n: u32,
    pub lam: f64,
}

impl PolyIndex {
    pub fn new(n: u32, lam: f64) -> Result<Self> {
        if !lam.is_finite() || lam < 0.0 {
            return Err(Error::Domain(format!(
                "Gegenbauer parameter must be >= 0, got {lam}"
            )));
        }
        Ok(Self { n, lam })
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Log of the surface area of the unit sphere `S^{d-1}` embedded in `R^d`.
///
/// For `d = 1` this is `ln 2` (the two points `±1`).
pub fn log_unit_sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    std::f64::consts::LN_2 + half * PI.ln() - libm::lgamma(half)
}

/// Gegenbauer polynomial `C_n^λ(x)` by three-term recurrence.
///
/// `λ = 0` is only accepted for `n = 0`; the degenerate case belongs to the
/// azimuthal factor of the harmonics and is handled there.
pub fn gegenbauer(idx: PolyIndex, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "Gegenbauer argument must lie in [-1, 1], got {x}"
        )));
    }
    if idx.n == 0 {
        return Ok(1.0);
    }
    if idx.lam == 0.0 {
        return Err(Error::Domain(
            "Gegenbauer recurrence degenerates at lambda = 0 for n >= 1".into(),
        ));
    }
    Ok(gegenbauer_unchecked(idx.n, idx.lam, x))
}

pub(crate) fn gegenbauer_unchecked(n: u32, lam: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * lam * x;
    for k in 2..=n {
        let k = k as f64;
        let next = (2.0 * (k + lam - 1.0) * x * cur - (k + 2.0 * lam - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln Z(λ, n)`, see [`gegenbauer_norm`].
pub fn log_gegenbauer_norm(idx: PolyIndex) -> Result<f64> {
    let lam = idx.lam;
    if !(lam > 0.0) {
        return Err(Error::Domain(format!(
            "Gegenbauer normalization requires lambda > 0, got {lam}"
        )));
    }
    let n = idx.n as f64;
    Ok(PI.ln() + (1.0 - 2.0 * lam) * std::f64::consts::LN_2 + log_gamma(n + 2.0 * lam)?
        - (lam + n).ln()
        - log_gamma(n + 1.0)?
        - 2.0 * log_gamma(lam)?)
}

/// Normalization integral `Z(λ, n) = ∫_0^π (C_n^λ(cos θ) sin^λ θ)^2 dθ`.
pub fn gegenbauer_norm(idx: PolyIndex) -> Result<f64> {
    log_gegenbauer_norm(idx).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::rules::gauss_legendre;
    use approx::assert_abs_diff_eq;

    /// Explicit hypergeometric-type sum for `C_n^λ`, independent of the recurrence.
    fn gegenbauer_series(n: u32, lam: f64, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..=n / 2 {
            let m = n - 2 * k;
            let log_coef = libm::lgamma(m as f64 + k as f64 + lam)
                - libm::lgamma(lam)
                - libm::lgamma(k as f64 + 1.0)
                - libm::lgamma(m as f64 + 1.0);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * log_coef.exp() * (2.0 * x).powi(m as i32);
        }
        sum
    }

    fn norm_by_quadrature(n: u32, lam: f64) -> f64 {
        // Composite rule; the integrand is smooth except for sin^{2λ} at the ends.
        let rule = gauss_legendre(64);
        let panels = 64;
        let h = PI / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            total += rule.integrate(a, a + h, |t| {
                let c = gegenbauer_series(n, lam, t.cos());
                c * c * t.sin().powf(2.0 * lam)
            });
        }
        total
    }

    #[test]
    fn log_gamma_golden() {
        assert_abs_diff_eq!(log_gamma(1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_gamma(0.5).unwrap(), 0.5723649, epsilon = 1e-7);
        // Γ(3.5) = 2.5 · 1.5 · 0.5 · √π
        let expected = (1.875 * PI.sqrt()).ln();
        assert_abs_diff_eq!(log_gamma(3.5).unwrap(), expected, epsilon = 1e-13);
        assert_abs_diff_eq!(expected, 1.2009736, epsilon = 1e-7);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_recurrence_grid() {
        let mut x = 0.5;
        while x <= 50.0 {
            let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
            assert!(lhs.abs() <= 1e-12, "x = {x}: residual {lhs}");
            x += 0.173;
        }
    }

    #[test]
    fn log_gamma_integer_factorials() {
        let mut fact: f64 = 1.0;
        for n in 1..=100u32 {
            // Γ(n) = (n-1)!
            assert!(
                (log_gamma(n as f64).unwrap() - fact.ln()).abs() <= 1e-13 * fact.ln().max(1.0),
                "n = {n}"
            );
            fact *= n as f64;
        }
    }

    #[test]
    fn gegenbauer_golden() {
        let c = |n, lam, x| gegenbauer(PolyIndex::new(n, lam).unwrap(), x).unwrap();
        assert_eq!(c(0, 2.5, 0.7), 1.0);
        assert_abs_diff_eq!(c(1, 1.5, 0.5), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c(2, 1.0, 0.3), -0.64, epsilon = 1e-15);
    }

    #[test]
    fn gegenbauer_errors() {
        assert!(gegenbauer(PolyIndex::new(1, 0.0).unwrap(), 0.2).is_err());
        assert_eq!(gegenbauer(PolyIndex::new(0, 0.0).unwrap(), 0.2).unwrap(), 1.0);
        assert!(gegenbauer(PolyIndex::new(2, 1.0).unwrap(), 1.5).is_err());
        assert!(PolyIndex::new(2, -0.5).is_err());
    }

    #[test]
    fn gegenbauer_matches_series() {
        for &lam in &[0.5, 1.0, 1.5, 2.5, 3.0] {
            for n in 0..=10 {
                for i in 0..=40 {
                    let x = -1.0 + i as f64 * 0.05;
                    let a = gegenbauer(PolyIndex::new(n, lam).unwrap(), x).unwrap();
                    let b = gegenbauer_series(n, lam, x);
                    assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n={n} lam={lam} x={x}");
                }
            }
        }
    }

    #[test]
    fn laguerre_golden() {
        assert_eq!(laguerre(0, 3.2, 7.0), 1.0);
        assert_abs_diff_eq!(laguerre(1, 0.5, 2.0), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(laguerre(2, 0.0, 1.0), -0.5, epsilon = 1e-15);
        // L_3^{(1)}(x) = (-x^3 + 12x^2 - 36x + 24)/6
        let x = 1.7;
        let closed = (-x * x * x + 12.0 * x * x - 36.0 * x + 24.0) / 6.0;
        assert_abs_diff_eq!(laguerre(3, 1.0, x), closed, epsilon = 1e-13);
    }

    #[test]
    fn gegenbauer_norm_golden() {
        let z = |n, lam| gegenbauer_norm(PolyIndex::new(n, lam).unwrap()).unwrap();
        assert_abs_diff_eq!(z(0, 1.0), PI / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z(0, 0.5), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z(1, 1.0), PI / 2.0, epsilon = 1e-14);
        assert!(gegenbauer_norm(PolyIndex::new(0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn gegenbauer_norm_matches_quadrature() {
        for &lam in &[0.5, 1.0, 1.5, 2.5] {
            for n in 0..=10 {
                let closed = gegenbauer_norm(PolyIndex::new(n, lam).unwrap()).unwrap();
                let quad = norm_by_quadrature(n, lam);
                assert!(
                    ((closed - quad) / quad).abs() <= 1e-10,
                    "n={n} lam={lam}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn sphere_area() {
        assert_abs_diff_eq!(log_unit_sphere_area(1), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(log_unit_sphere_area(2), (2.0 * PI).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_unit_sphere_area(3), (4.0 * PI).ln(), epsilon = 1e-14);
    }
}
