//! Hyperspherical-harmonic quantities: quantum-number chains, the angular
//! density, trigonometric second moments, the trace-normalized covariance
//! diagonal and the angular entropy loss.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rules::{bracket_roots, integrate_graded, refine, Grading, QuadratureSpec};
use crate::special::{gegenbauer_unchecked, log_gegenbauer_norm, PolyIndex};

/// Angular quantum numbers `(μ_1, …, μ_{d-1})` with
/// `μ_1 ≥ μ_2 ≥ … ≥ μ_{d-2} ≥ |μ_{d-1}|`. The last entry is the magnetic
/// number `m` and may be negative; `μ_d = 0` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumberChain {
    d: usize,
    mu: Vec<i64>,
}

impl QuantumNumberChain {
    pub fn new(d: usize, mu: Vec<i64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidChain(format!(
                "angular quantum numbers need d >= 2, got d = {d}"
            )));
        }
        if mu.len() != d - 1 {
            return Err(Error::InvalidChain(format!(
                "expected {} quantum numbers for d = {d}, got {}",
                d - 1,
                mu.len()
            )));
        }
        let last = mu.len() - 1;
        for j in 0..last {
            let next = if j + 1 == last { mu[j + 1].abs() } else { mu[j + 1] };
            if mu[j] < next {
                return Err(Error::InvalidChain(format!(
                    "chain {mu:?} violates mu_{} >= |mu_{}|",
                    j + 1,
                    j + 2
                )));
            }
        }
        Ok(Self { d, mu })
    }

    /// The s-state chain `(l, 0, …, 0)`.
    pub fn with_leading(d: usize, l: i64) -> Result<Self> {
        let mut mu = vec![0; d.saturating_sub(1)];
        if let Some(first) = mu.first_mut() {
            *first = l;
        }
        Self::new(d, mu)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> &[i64] {
        &self.mu
    }

    /// Orbital quantum number `l` (`|m|` when d = 2).
    pub fn l(&self) -> i64 {
        self.mu[0].abs()
    }

    /// `μ_j` for `j = 1..=d`, with `|m|` at `j = d-1` and `0` at `j = d`.
    fn mu_abs(&self, j: usize) -> i64 {
        if j == self.d {
            0
        } else if j == self.d - 1 {
            self.mu[j - 1].abs()
        } else {
            self.mu[j - 1]
        }
    }

    /// Every chain with leading entry `l` and `m >= 0`, in lexicographic order.
    pub fn enumerate(d: usize, l: i64) -> Result<Vec<Self>> {
        if d < 2 || l < 0 {
            return Err(Error::InvalidChain(format!("cannot enumerate chains for d = {d}, l = {l}")));
        }
        let mut out = Vec::new();
        let mut prefix = vec![l];
        fn rec(d: usize, prefix: &mut Vec<i64>, out: &mut Vec<QuantumNumberChain>) {
            if prefix.len() == d - 1 {
                out.push(QuantumNumberChain { d, mu: prefix.clone() });
                return;
            }
            let top = *prefix.last().unwrap();
            for v in (0..=top).rev() {
                prefix.push(v);
                rec(d, prefix, out);
                prefix.pop();
            }
        }
        rec(d, &mut prefix, &mut out);
        Ok(out)
    }
}

impl std::fmt::Display for QuantumNumberChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.mu.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `(n_j, λ_j) = (μ_j − μ_{j+1}, (d−1−j)/2 + μ_{j+1})` for `j = 1..=d-1`.
pub fn derived_indices(chain: &QuantumNumberChain, j: usize) -> Result<(u32, f64)> {
    check_index(chain, j)?;
    let (a, b) = (chain.mu_abs(j), chain.mu_abs(j + 1));
    let n = (a - b) as u32;
    let lam = (chain.d - 1 - j) as f64 / 2.0 + b as f64;
    Ok((n, lam))
}

fn check_index(chain: &QuantumNumberChain, j: usize) -> Result<()> {
    if j == 0 || j >= chain.d {
        return Err(Error::Domain(format!(
            "angle index must be in 1..={}, got {j}",
            chain.d - 1
        )));
    }
    Ok(())
}

/// One polar factor of the harmonic, for angle `θ_j` with `j <= d-2`.
///
/// The factor's density with respect to `dΩ` is
/// `C_n^λ(cos θ)² sin^{2 μ_{j+1}} θ / Z(λ, n)` and the surface measure
/// contributes `sin^{d-1-j} θ`; together they form a probability density
/// in `θ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFactor {
    pub n: u32,
    pub lam: f64,
    pub power: f64,
    pub measure_power: f64,
    pub log_norm: f64,
}

impl PolarFactor {
    pub fn new(chain: &QuantumNumberChain, j: usize) -> Result<Self> {
        if j == 0 || j + 1 >= chain.d {
            return Err(Error::Domain(format!("polar factor index must be in 1..={}", chain.d - 2)));
        }
        let (n, lam) = derived_indices(chain, j)?;
        Ok(Self {
            n,
            lam,
            power: 2.0 * chain.mu_abs(j + 1) as f64,
            measure_power: (chain.d - 1 - j) as f64,
            log_norm: log_gegenbauer_norm(PolyIndex::new(n, lam)?)?,
        })
    }

    /// `ln` of the density with respect to `dΩ` (excludes the measure).
    pub fn log_density(&self, theta: f64) -> f64 {
        let c = gegenbauer_unchecked(self.n, self.lam, theta.cos());
        let s = theta.sin();
        let mut v = 2.0 * c.abs().ln() - self.log_norm;
        if self.power != 0.0 {
            v += self.power * s.ln();
        }
        v
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.log_density(theta).exp()
    }

    pub fn measure(&self, theta: f64) -> f64 {
        theta.sin().powf(self.measure_power)
    }

    /// Marginal probability density of `θ` on `[0, π]`.
    pub fn marginal(&self, theta: f64) -> f64 {
        let c = gegenbauer_unchecked(self.n, self.lam, theta.cos());
        c * c * theta.sin().powf(2.0 * self.lam) * (-self.log_norm).exp()
    }

    /// `[0, zeros of C_n^λ(cos θ)…, π]`.
    pub fn breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        if self.n > 0 {
            let scan = 64 * (self.n as usize + 1);
            b.extend(bracket_roots(|t| gegenbauer_unchecked(self.n, self.lam, t.cos()), 0.0, PI, scan));
        }
        b.push(PI);
        b
    }
}

fn polar_factors(chain: &QuantumNumberChain) -> Result<Vec<PolarFactor>> {
    (1..chain.d.saturating_sub(1)).map(|j| PolarFactor::new(chain, j)).collect()
}

/// `|Y_μ(Ω)|²` at angles `(θ_1, …, θ_{d-1})`.
pub fn angular_density(chain: &QuantumNumberChain, angles: &[f64]) -> Result<f64> {
    let d = chain.d;
    if angles.len() != d - 1 {
        return Err(Error::Domain(format!("expected {} angles, got {}", d - 1, angles.len())));
    }
    for (i, &a) in angles.iter().enumerate() {
        let upper = if i + 1 == d - 1 { 2.0 * PI } else { PI };
        if !(0.0..=upper).contains(&a) {
            return Err(Error::Domain(format!("angle theta_{} = {a} outside [0, {upper}]", i + 1)));
        }
    }
    let mut log_v = -(2.0 * PI).ln();
    for (j, f) in polar_factors(chain)?.iter().enumerate() {
        log_v += f.log_density(angles[j]);
    }
    Ok(log_v.exp())
}

/// `<cos² θ_k>` over the harmonic.
pub fn cos2_moment(chain: &QuantumNumberChain, k: usize) -> Result<f64> {
    check_index(chain, k)?;
    let d = chain.d;
    if k == d - 1 {
        return Ok(0.5);
    }
    let (n, lam) = derived_indices(chain, k)?;
    if n as f64 + lam == 1.0 {
        // 0/0 in the closed form; Beta moments of the marginal
        return Ok(if n == 0 { 0.25 } else { 0.5 });
    }
    let mk = chain.mu_abs(k) as f64;
    let mk1 = chain.mu_abs(k + 1) as f64;
    let df = d as f64;
    let kf = k as f64;
    let num = 2.0 * mk * (mk + df - kf - 1.0) - 2.0 * mk1 * (mk1 + df - kf - 2.0) + df - kf - 3.0;
    let den = 4.0 * mk * (mk + df - kf - 1.0) + (df - kf + 1.0) * (df - kf - 3.0);
    Ok(num / den)
}

/// Diagonal of the trace-normalized covariance `C_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDiagonal {
    entries: Vec<f64>,
}

impl CorrelationDiagonal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("correlation diagonal is empty".into()));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("correlation diagonal sums to {sum}, not 1")));
        }
        if entries.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Domain(format!("correlation entries must lie in [0, 1]: {entries:?}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }
}

/// `C_{x,i,i} = (∏_{k<i} <sin² θ_k>) <cos² θ_i>`, with `cos² θ_d ≡ 1`.
pub fn correlation_diagonal(chain: &QuantumNumberChain) -> Result<CorrelationDiagonal> {
    let d = chain.d;
    let mut entries = Vec::with_capacity(d);
    let mut sin_prod = 1.0;
    for k in 1..d {
        let c = cos2_moment(chain, k)?;
        entries.push(sin_prod * c);
        sin_prod *= 1.0 - c;
    }
    entries.push(sin_prod);
    CorrelationDiagonal::new(entries)
}

/// Angular entropy loss `½ Σ ln C_{x,i,i} + (d/2) ln d`, always `<= 0`.
pub fn entropy_loss(chain: &QuantumNumberChain) -> Result<f64> {
    let diag = correlation_diagonal(chain)?;
    let d = diag.d() as f64;
    let sum: f64 = diag.entries.iter().map(|c| (d * c).ln()).sum();
    Ok((0.5 * sum).min(0.0))
}

/// The same loss written as `-(d/2) D_kl(u_d ‖ diag)`.
pub fn kl_loss(diag: &CorrelationDiagonal) -> Result<f64> {
    let d = diag.d() as f64;
    if diag.entries.iter().any(|&e| e <= 0.0) {
        return Err(Error::Divergence(
            "zero eigenvalue in correlation diagonal: loss is -inf".into(),
        ));
    }
    let u = 1.0 / d;
    let kl: f64 = diag.entries.iter().map(|&e| u * (u / e).ln()).sum();
    Ok(-0.5 * d * kl)
}

/// Rényi entropy (Shannon at `λ = 1`) of `|Y_μ|²` on the sphere.
pub fn angular_renyi(chain: &QuantumNumberChain, lambda: f64) -> Result<f64> {
    angular_renyi_with(chain, lambda, &QuadratureSpec::default()).map(|(v, _)| v)
}

/// As [`angular_renyi`], also returning the summed refinement error.
pub fn angular_renyi_with(chain: &QuantumNumberChain, lambda: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("Rényi order must be > 0, got {lambda}")));
    }
    let mut value = (2.0 * PI).ln();
    let mut err = 0.0;
    for f in polar_factors(chain)? {
        let breaks = f.breaks();
        if lambda == 1.0 {
            let (s, e) = refine(spec, |n| {
                integrate_graded(
                    |t| {
                        let ld = f.log_density(t);
                        if ld == f64::NEG_INFINITY {
                            0.0
                        } else {
                            -ld * ld.exp() * f.measure(t)
                        }
                    },
                    &breaks,
                    n,
                    Grading::FINE,
                )
            })?;
            value += s;
            err += e;
        } else {
            let (p, e) = refine(spec, |n| {
                integrate_graded(|t| (lambda * f.log_density(t)).exp() * f.measure(t), &breaks, n, Grading::FINE)
            })?;
            if !(p > 0.0) {
                return Err(Error::NonConvergence(format!("angular power integral is {p}")));
            }
            value += p.ln() / (1.0 - lambda);
            err += e / (p * (1.0 - lambda).abs());
        }
    }
    Ok((value, err))
}
