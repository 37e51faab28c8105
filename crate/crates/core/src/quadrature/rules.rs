//! Gauss–Legendre rules and the composite integrators built on them.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn compute_rule(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        if p != 0.0 {
            dp = nf * (x * p - pm1) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

/// `(P_n(x), P_{n-1}(x))`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (p0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss–Legendre rule with `n >= 1` points. Rules are cached per order.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let n = n.max(1);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

/// Map from `t ∈ [0, 1)` onto the half line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadialTransform {
    /// `r = L t / (1 - t)`
    #[default]
    Rational,
    /// `r = -L ln(1 - t)`
    Exponential,
}

impl RadialTransform {
    /// Returns `(r, dr/dt)` for length scale `scale`.
    pub fn map(self, t: f64, scale: f64) -> (f64, f64) {
        let s = 1.0 - t;
        match self {
            RadialTransform::Rational => (scale * t / s, scale / (s * s)),
            RadialTransform::Exponential => (-scale * s.ln(), scale / s),
        }
    }

    pub fn inverse(self, r: f64, scale: f64) -> f64 {
        let u = r / scale;
        match self {
            RadialTransform::Rational => u / (1.0 + u),
            RadialTransform::Exponential => -(-u).exp_m1(),
        }
    }
}

/// Node counts and tolerance targets for every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub base_order: usize,
    pub max_refinements: usize,
    pub rel_tol: f64,
    pub radial_transform: RadialTransform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            base_order: 96,
            max_refinements: 8,
            rel_tol: 1e-10,
            radial_transform: RadialTransform::Rational,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_order < 2 {
            return Err(Error::Domain(format!(
                "base_order must be >= 2, got {}",
                self.base_order
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// Geometric mesh toward both ends of each segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub levels: usize,
    pub ratio: f64,
}

impl Grading {
    /// Strong grading for the high-accuracy one-dimensional integrals.
    pub const FINE: Grading = Grading { levels: 20, ratio: 0.15 };
    /// Light grading for tensor-product oracles.
    pub const COARSE: Grading = Grading { levels: 5, ratio: 0.25 };
    pub const NONE: Grading = Grading { levels: 0, ratio: 0.5 };
}

/// Panel boundaries for `[a, b]` graded toward both endpoints.
fn graded_panels(a: f64, b: f64, grading: Grading) -> Vec<f64> {
    let half = 0.5 * (b - a);
    let mut left = vec![a];
    let mut offsets: Vec<f64> = (0..grading.levels)
        .map(|k| half * grading.ratio.powi((grading.levels - k) as i32))
        .collect();
    left.extend(offsets.iter().map(|o| a + o));
    let mid = a + half;
    left.push(mid);
    offsets.reverse();
    left.extend(offsets.iter().map(|o| b - o));
    left.push(b);
    left
}

/// Tensor-ready `(node, weight)` list for `[breaks[0], breaks[last]]` with a
/// graded composite rule of `order` points per panel on every segment.
pub fn composite_nodes(breaks: &[f64], order: usize, grading: Grading) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let mut out = Vec::new();
    for seg in breaks.windows(2) {
        if !(seg[1] > seg[0]) {
            continue;
        }
        for panel in graded_panels(seg[0], seg[1], grading).windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[1] + panel[0]);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * x, w * half));
            }
        }
    }
    out
}

/// `(node, weight)` list with one panel per segment, mapped through
/// `s ↦ s³ / (s³ + (1-s)³)` so nodes cluster at both ends. An endpoint
/// factor `x^α` becomes `s^{3α+2}`, which Gauss–Legendre handles well.
pub fn clustered_nodes(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let mut out = Vec::new();
    for seg in breaks.windows(2) {
        let len = seg[1] - seg[0];
        if !(len > 0.0) {
            continue;
        }
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = 0.5 * (x + 1.0);
            let (a, b) = (s.powi(3), (1.0 - s).powi(3));
            let phi = a / (a + b);
            let dphi = 3.0 * s * s * (1.0 - s) * (1.0 - s) / (a + b).powi(2);
            out.push((seg[0] + len * phi, 0.5 * w * len * dphi));
        }
    }
    out
}

/// Integrates `f` across consecutive `breaks` with graded panels at every
/// break point, so algebraic endpoint behaviour converges rapidly.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: F, breaks: &[f64], order: usize, grading: Grading) -> f64 {
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for seg in breaks.windows(2) {
        if !(seg[1] > seg[0]) {
            continue;
        }
        for panel in graded_panels(seg[0], seg[1], grading).windows(2) {
            total += rule.integrate(panel[0], panel[1], &f);
        }
    }
    total
}

/// Integrates `f(r)` over `[0, ∞)` through `transform` with length scale
/// `scale`. `interior` lists radii where `f` is not smooth (e.g. zeros of a
/// wavefunction); they become graded break points.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    scale: f64,
    interior: &[f64],
    transform: RadialTransform,
    order: usize,
    grading: Grading,
) -> f64 {
    let breaks = half_line_breaks(scale, interior, transform);
    integrate_graded(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let (r, jac) = transform.map(t, scale);
            if !r.is_finite() {
                return 0.0;
            }
            let v = f(r);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        &breaks,
        order,
        grading,
    )
}

/// Break points in the mapped variable `t` for [`integrate_half_line`].
pub fn half_line_breaks(scale: f64, interior: &[f64], transform: RadialTransform) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut inner: Vec<f64> = interior
        .iter()
        .filter(|r| **r > 0.0 && r.is_finite())
        .map(|&r| transform.inverse(r, scale))
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    breaks.extend(inner);
    breaks.push(1.0);
    breaks
}

/// Runs `eval(order)` at `base_order · 2^k` until two consecutive levels agree.
///
/// Returns the last value and the absolute difference between the last two
/// levels.
pub fn refine<F: FnMut(usize) -> f64>(spec: &QuadratureSpec, mut eval: F) -> Result<(f64, f64)> {
    spec.validate()?;
    let mut order = spec.base_order;
    let mut prev = eval(order);
    if !prev.is_finite() {
        return Err(Error::NonConvergence(format!(
            "integral is not finite ({prev}) at order {order}"
        )));
    }
    let mut last_diff = f64::INFINITY;
    for _ in 0..spec.max_refinements.max(1) {
        order *= 2;
        let cur = eval(order);
        if !cur.is_finite() {
            return Err(Error::NonConvergence(format!(
                "integral is not finite ({cur}) at order {order}"
            )));
        }
        let diff = (cur - prev).abs();
        if diff <= spec.rel_tol * cur.abs() + 1e-12 {
            return Ok((cur, diff));
        }
        last_diff = diff;
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "no convergence after {} refinements (last difference {last_diff:e}, value {prev})",
        spec.max_refinements
    )))
}

/// Simple roots of `f` in `(a, b)` located by a uniform sign scan with
/// `scan` cells followed by bisection.
pub fn bracket_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, scan: usize) -> Vec<f64> {
    let scan = scan.max(2);
    let h = (b - a) / scan as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=scan {
        let x1 = if i == scan { b } else { a + i as f64 * h };
        let f1 = f(x1);
        if f0 == 0.0 && i > 1 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_rules() {
        let r1 = gauss_legendre(1);
        assert_eq!(r1.nodes, vec![0.0]);
        assert_abs_diff_eq!(r1.weights[0], 2.0, epsilon = 1e-15);
        let r2 = gauss_legendre(2);
        assert_abs_diff_eq!(r2.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r2.nodes[0], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[1], 1.0, epsilon = 1e-15);
        let r3 = gauss_legendre(3);
        assert_abs_diff_eq!(r3.integrate(-1.0, 1.0, |x| x.powi(4)), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn weights_sum_and_exactness() {
        for n in [1usize, 2, 5, 16, 33, 96, 192, 384] {
            let rule = gauss_legendre(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() <= 1e-14, "n = {n}: {s}");
            let deg = (2 * n - 1).min(40) as i32;
            for p in 0..=deg {
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(p));
                assert!((got - exact).abs() <= 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn graded_handles_endpoint_singularity() {
        // ∫_0^1 x^{0.3} dx = 1/1.3
        let v = integrate_graded(|x| x.powf(0.3), &[0.0, 1.0], 32, Grading::FINE);
        assert_abs_diff_eq!(v, 1.0 / 1.3, epsilon = 1e-13);
        // ∫_0^2 |x-1|^{1.6} dx = 2/2.6
        let v = integrate_graded(|x| (x - 1.0f64).abs().powf(1.6), &[0.0, 1.0, 2.0], 32, Grading::FINE);
        assert_abs_diff_eq!(v, 2.0 / 2.6, epsilon = 1e-13);
    }

    #[test]
    fn transforms_round_trip() {
        for tr in [RadialTransform::Rational, RadialTransform::Exponential] {
            for &t in &[0.0, 0.1, 0.5, 0.9, 0.999] {
                let (r, _) = tr.map(t, 2.5);
                assert_abs_diff_eq!(tr.inverse(r, 2.5), t, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn refine_reports_difference() {
        let spec = QuadratureSpec::default();
        let (v, err) = refine(&spec, |n| {
            integrate_graded(|x| (-x).exp(), &[0.0, 1.0], n, Grading::NONE)
        })
        .unwrap();
        assert_abs_diff_eq!(v, 1.0 - (-1f64).exp(), epsilon = 1e-14);
        assert!(err <= 1e-12);
        let bad = refine(&spec, |_| f64::NAN);
        assert!(matches!(bad, Err(Error::NonConvergence(_))));
    }

    #[test]
    fn roots_of_cosine() {
        let r = bracket_roots(f64::cos, 0.0, 10.0, 200);
        assert_eq!(r.len(), 3);
        for (k, x) in r.iter().enumerate() {
            assert_abs_diff_eq!(*x, PI / 2.0 + k as f64 * PI, epsilon = 1e-13);
        }
    }

    #[test]
    fn clustered_nodes_integrate_endpoint_powers() {
        let nodes = clustered_nodes(&[0.0, 0.5, 2.0], 24);
        let v: f64 = nodes.iter().map(|(x, w)| w * x.powf(0.3)).sum();
        assert!((v - 2f64.powf(1.3) / 1.3).abs() < 1e-8, "{v}");
        let v: f64 = nodes.iter().map(|(x, w)| w * (x - 0.5).abs().powf(1.6)).sum();
        let exact = (0.5f64.powf(2.6) + 1.5f64.powf(2.6)) / 2.6;
        assert!((v - exact).abs() < 1e-8, "{v}");
    }
}
