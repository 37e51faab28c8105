//! Radial eigenstates of exactly solvable central potentials and tabulated
//! radial functions read from disk.
//!
//! Units are atomic (ħ = m = 1, oscillator ω = 1, hydrogen Z = 1). Every
//! state is renormalized numerically after construction so that
//! `∫ R(r)² r^{d-1} dr = 1`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rules::{bracket_roots, gauss_legendre, integrate_half_line, refine, Grading, QuadratureSpec};
use crate::special::{laguerre, log_gamma};

/// Which system a radial state came from, plus its quantum numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemLabel {
    /// `oscillator`, `hydrogen` or `file`
    pub system: String,
    pub quantum_numbers: Vec<i64>,
    /// Potential family `V_d(r)`, metadata only.
    pub potential: String,
    /// Source path for tabulated states.
    pub source: Option<String>,
}

impl fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.system.as_str() {
            "oscillator" => write!(f, "oscillator(n_r={},l={})", self.quantum_numbers[0], self.quantum_numbers[1]),
            "hydrogen" => write!(f, "hydrogen(n={},l={})", self.quantum_numbers[0], self.quantum_numbers[1]),
            _ => match &self.source {
                Some(src) => write!(f, "file({src})"),
                None => write!(f, "{}", self.system),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `r^l L_k^{(α)}(r²) e^{-r²/2}`
    Oscillator { k: u32, alpha: f64 },
    /// `x^l L_k^{(α)}(x) e^{-x/2}` with `x = 2r/ν`
    Hydrogen { k: u32, alpha: f64, nu: f64 },
    Tabulated(MonotoneCubic),
}

/// A normalized radial wavefunction `R(r)` in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    d: usize,
    l: i64,
    label: SystemLabel,
    r2_analytic: Option<f64>,
    shape: Shape,
    /// `ln` of the factor multiplying the closed-form shape.
    log_scale: f64,
    zeros: Vec<f64>,
    length_scale: f64,
}

impl RadialState {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn label(&self) -> &SystemLabel {
        &self.label
    }

    pub fn r2_analytic(&self) -> Option<f64> {
        self.r2_analytic
    }

    /// Interior zeros of `R(r)`.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Typical radius, used to scale the half-line map.
    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    /// Finite support `[0, r_max]` for tabulated states.
    pub fn support(&self) -> Option<f64> {
        match &self.shape {
            Shape::Tabulated(t) => Some(*t.xs.last().unwrap()),
            _ => None,
        }
    }

    /// Knots of the interpolant for tabulated states (including 0).
    pub fn knots(&self) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Tabulated(t) => {
                let mut k = t.xs.clone();
                if k[0] > 0.0 {
                    k.insert(0, 0.0);
                }
                Some(k)
            }
            _ => None,
        }
    }

    /// Radial amplitude `R(r)`.
    pub fn amplitude(&self, r: f64) -> f64 {
        if !(r >= 0.0) || !r.is_finite() {
            return 0.0;
        }
        match &self.shape {
            Shape::Oscillator { k, alpha } => {
                let expo = self.log_scale - 0.5 * r * r;
                if expo < -745.0 {
                    return 0.0;
                }
                let poly = laguerre(*k, *alpha, r * r);
                expo.exp() * r.powi(self.l as i32) * poly
            }
            Shape::Hydrogen { k, alpha, nu } => {
                let x = 2.0 * r / nu;
                let expo = self.log_scale - 0.5 * x;
                if expo < -745.0 {
                    return 0.0;
                }
                expo.exp() * x.powi(self.l as i32) * laguerre(*k, *alpha, x)
            }
            Shape::Tabulated(t) => self.log_scale.exp() * t.eval(r),
        }
    }

    /// `ln R(r)²` (`-∞` at zeros).
    pub fn log_density(&self, r: f64) -> f64 {
        let a = self.amplitude(r);
        2.0 * a.abs().ln()
    }

    /// `∫ g(r) r^{d-1} dr` over the state's domain, refined per `spec`.
    pub fn radial_integral<G: Fn(f64) -> f64>(&self, g: G, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let dm1 = (self.d - 1) as i32;
        let integrand = |r: f64| {
            let v = g(r);
            if v == 0.0 {
                0.0
            } else {
                v * r.powi(dm1)
            }
        };
        match self.knots() {
            Some(knots) => {
                // Cubic pieces: plain Gauss–Legendre per knot interval.
                let base = (spec.base_order / 8).max(8);
                let shifted = QuadratureSpec { base_order: base, ..*spec };
                refine(&shifted, |n| {
                    let rule = gauss_legendre(n);
                    knots.windows(2).map(|w| rule.integrate(w[0], w[1], &integrand)).sum()
                })
            }
            None => refine(spec, |n| {
                integrate_half_line(
                    &integrand,
                    self.length_scale,
                    &self.zeros,
                    spec.radial_transform,
                    n,
                    Grading::FINE,
                )
            }),
        }
    }

    /// `∫ R² r^{d-1} dr`.
    pub fn norm(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.radial_integral(|r| self.amplitude(r).powi(2), spec).map(|(v, _)| v)
    }

    fn renormalize(mut self, spec: &QuadratureSpec) -> Result<Self> {
        let norm = self.norm(spec)?;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Normalization(format!("radial norm is {norm}")));
        }
        self.log_scale -= 0.5 * norm.ln();
        Ok(self)
    }
}

/// d-dimensional isotropic oscillator eigenstate with `ω = 1`:
/// `R ∝ r^l L_{n_r}^{(l+d/2-1)}(r²) e^{-r²/2}`, `<r²> = 2 n_r + l + d/2`.
pub fn oscillator_state(n_r: u32, l: u32, d: usize) -> Result<RadialState> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if d == 1 && l > 1 {
        return Err(Error::Domain("in d = 1 only l = 0 (even) and l = 1 (odd) exist".into()));
    }
    let df = d as f64;
    let alpha = l as f64 + df / 2.0 - 1.0;
    // N² = 2 n_r! / Γ(n_r + l + d/2)
    let log_n2 = std::f64::consts::LN_2 + log_gamma(n_r as f64 + 1.0)? - log_gamma(n_r as f64 + l as f64 + df / 2.0)?;
    let zeros = if n_r == 0 {
        Vec::new()
    } else {
        let hi = 4.0 * n_r as f64 + 2.0 * alpha + 10.0;
        bracket_roots(|x| laguerre(n_r, alpha, x), 0.0, hi, 400 * n_r as usize)
            .into_iter()
            .map(f64::sqrt)
            .collect()
    };
    let r2 = 2.0 * n_r as f64 + l as f64 + df / 2.0;
    let state = RadialState {
        d,
        l: l as i64,
        label: SystemLabel {
            system: "oscillator".into(),
            quantum_numbers: vec![n_r as i64, l as i64],
            potential: "r^2/2".into(),
            source: None,
        },
        r2_analytic: Some(r2),
        shape: Shape::Oscillator { k: n_r, alpha },
        log_scale: 0.5 * log_n2,
        zeros,
        length_scale: r2.sqrt(),
    };
    state.renormalize(&QuadratureSpec::default())
}

/// Hydrogenic eigenstate (`Z = 1`) with principal number `n` and effective
/// `ν = n + (d-3)/2`: `R ∝ x^l L_{n-l-1}^{(2l+d-2)}(x) e^{-x/2}`, `x = 2r/ν`.
pub fn hydrogen_state(n: u32, l: u32, d: usize) -> Result<RadialState> {
    if d < 2 {
        return Err(Error::Domain(format!("hydrogenic states need d >= 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be >= 1".into()));
    }
    if l >= n {
        return Err(Error::Domain(format!("l = {l} must be < n = {n}")));
    }
    let df = d as f64;
    let nu = n as f64 + (df - 3.0) / 2.0;
    let k = n - l - 1;
    let alpha = 2.0 * l as f64 + df - 2.0;
    // N² = (2/ν)^d k! / (Γ(k+α+1) (2k+α+1))
    let log_n2 = df * (2.0 / nu).ln() + log_gamma(k as f64 + 1.0)?
        - log_gamma(k as f64 + alpha + 1.0)?
        - (2.0 * k as f64 + alpha + 1.0).ln();
    let zeros = if k == 0 {
        Vec::new()
    } else {
        let hi = 4.0 * k as f64 + 2.0 * alpha + 10.0;
        bracket_roots(|x| laguerre(k, alpha, x), 0.0, hi, 400 * k as usize)
            .into_iter()
            .map(|x| 0.5 * nu * x)
            .collect()
    };
    let r2_analytic = (d == 3).then(|| {
        let (nf, lf) = (n as f64, l as f64);
        nf * nf * (5.0 * nf * nf + 1.0 - 3.0 * lf * (lf + 1.0)) / 2.0
    });
    let state = RadialState {
        d,
        l: l as i64,
        label: SystemLabel {
            system: "hydrogen".into(),
            quantum_numbers: vec![n as i64, l as i64],
            potential: "-1/r".into(),
            source: None,
        },
        r2_analytic,
        shape: Shape::Hydrogen { k, alpha, nu },
        log_scale: 0.5 * log_n2,
        zeros,
        length_scale: nu * nu,
    };
    state.renormalize(&QuadratureSpec::default())
}

/// Radial state from samples `(r, R)`, interpolated by a monotone cubic and
/// renormalized. `R` vanishes beyond the last sample.
pub fn tabulated_state(samples: &[(f64, f64)], d: usize, l: i64) -> Result<RadialState> {
    tabulated_state_with_source(samples, d, l, None)
}

fn tabulated_state_with_source(samples: &[(f64, f64)], d: usize, l: i64, source: Option<String>) -> Result<RadialState> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if l < 0 {
        return Err(Error::Domain(format!("l must be >= 0, got {l}")));
    }
    if samples.len() < 8 {
        return Err(Error::Format(format!("need at least 8 samples, got {}", samples.len())));
    }
    for (i, &(r, v)) in samples.iter().enumerate() {
        if !r.is_finite() || !v.is_finite() {
            return Err(Error::Format(format!("non-finite sample at row {}", i + 1)));
        }
        if r < 0.0 {
            return Err(Error::Format(format!("negative radius {r} at row {}", i + 1)));
        }
        if i > 0 && r <= samples[i - 1].0 {
            return Err(Error::Format(format!("radii must be strictly increasing (row {})", i + 1)));
        }
    }
    let interp = MonotoneCubic::new(samples.iter().map(|s| s.0).collect(), samples.iter().map(|s| s.1).collect());
    let mut zeros = Vec::new();
    for w in interp.xs.windows(2) {
        zeros.extend(bracket_roots(|r| interp.eval(r), w[0], w[1], 4));
    }
    let r_max = *interp.xs.last().unwrap();
    let state = RadialState {
        d,
        l,
        label: SystemLabel {
            system: "file".into(),
            quantum_numbers: vec![l],
            potential: "tabulated".into(),
            source,
        },
        r2_analytic: None,
        shape: Shape::Tabulated(interp),
        log_scale: 0.0,
        zeros,
        length_scale: 0.25 * r_max,
    };
    state.renormalize(&QuadratureSpec::default())
}

/// Parses two-column `(r, R)` text. Lines starting with `#` (and trailing
/// `# …` comments) are ignored; columns are separated by commas or
/// whitespace. A non-numeric first line is treated as a header.
pub fn parse_samples(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if cols.len() != 2 {
            return Err(Error::Format(format!(
                "line {}: expected 2 columns, found {}",
                lineno + 1,
                cols.len()
            )));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(r), Ok(v)) => out.push((r, v)),
            _ if out.is_empty() => continue,
            _ => {
                return Err(Error::Format(format!("line {}: cannot parse '{line}'", lineno + 1)));
            }
        }
    }
    Ok(out)
}

/// Reads and builds a tabulated state from a file.
pub fn tabulated_state_from_file(path: &Path, d: usize, l: i64) -> Result<RadialState> {
    let text = std::fs::read_to_string(path)?;
    let samples = parse_samples(&text)?;
    tabulated_state_with_source(&samples, d, l, Some(path.display().to_string()))
}

/// `<r²> = ∫ r² R² r^{d-1} dr`; checked against the closed form if known.
pub fn r2_expectation(state: &RadialState) -> Result<f64> {
    r2_expectation_with(state, &QuadratureSpec::default())
}

pub fn r2_expectation_with(state: &RadialState, spec: &QuadratureSpec) -> Result<f64> {
    let (r2, _) = state.radial_integral(|r| r * r * state.amplitude(r).powi(2), spec)?;
    if let Some(exact) = state.r2_analytic {
        if (r2 - exact).abs() > 1e-8 * exact.max(1.0) {
            return Err(Error::NonConvergence(format!(
                "<r^2> quadrature {r2} disagrees with closed form {exact}"
            )));
        }
    }
    Ok(r2)
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secants[i - 1], secants[i]);
            if a * b <= 0.0 {
                slopes[i] = 0.0;
            } else {
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                slopes[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        Self { xs, ys, slopes }
    }

    /// Value at `x`; constant below the first knot, zero above the last.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&k| k < x).clamp(1, n - 1) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }
}
