//! Inverse-CDF sampling of separable states and second-moment estimation.
//!
//! Draws come from `ChaCha8Rng` seeded with the 64-bit user seed; the
//! sample is split into fixed-size chunks and chunk `c` reads ChaCha
//! stream `c`. The output for a given seed is therefore identical on every
//! platform and independent of how chunks are scheduled across threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rules::gauss_legendre;
use crate::angular::{PolarFactor, QuantumNumberChain};
use crate::coords::to_cartesian;
use crate::error::{Error, Result};
use crate::states::RadialState;

const CHUNK: usize = 1 << 14;
const CDF_CELLS: usize = 8192;

/// Points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || coords.len() % d != 0 {
            return Err(Error::Domain(format!(
                "{} coordinates do not form points in d = {d}",
                coords.len()
            )));
        }
        Ok(Self { d, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Piecewise-linear CDF on a grid, inverted by bisection on the cells.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    /// Tabulates the CDF of the (unnormalized) density `f` on `[a, b]`.
    pub fn from_density<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cells: usize) -> Result<Self> {
        let rule = gauss_legendre(8);
        let h = (b - a) / cells as f64;
        let mut grid = Vec::with_capacity(cells + 1);
        let mut cdf = Vec::with_capacity(cells + 1);
        grid.push(a);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == cells { b } else { lo + h };
            acc += rule.integrate(lo, hi, &f).max(0.0);
            grid.push(hi);
            cdf.push(acc);
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::Normalization(format!("sampling density has mass {acc}")));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { grid, cdf })
    }

    /// Quantile for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + frac * (self.grid[i] - self.grid[i - 1])
    }
}

struct Sampler {
    d: usize,
    radial: InverseCdf,
    /// Maps a radial-table abscissa to `r`.
    radial_map: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    polar: Vec<InverseCdf>,
}

impl Sampler {
    fn new(state: &RadialState, chain: &QuantumNumberChain) -> Result<Self> {
        let d = state.d();
        let dm1 = (d - 1) as i32;
        let (radial, radial_map): (InverseCdf, Box<dyn Fn(f64) -> f64 + Sync + Send>) = match state.support() {
            Some(r_max) => (
                InverseCdf::from_density(|r| state.amplitude(r).powi(2) * r.powi(dm1), 0.0, r_max, CDF_CELLS)?,
                Box::new(|r| r),
            ),
            None => {
                let scale = state.length_scale();
                let tr = super::rules::RadialTransform::Rational;
                let table = InverseCdf::from_density(
                    |t| {
                        let (r, jac) = tr.map(t, scale);
                        let a = state.amplitude(r);
                        if a == 0.0 {
                            0.0
                        } else {
                            a * a * r.powi(dm1) * jac
                        }
                    },
                    0.0,
                    1.0,
                    CDF_CELLS,
                )?;
                (table, Box::new(move |t| tr.map(t, scale).0))
            }
        };
        let polar = (1..d - 1)
            .map(|j| {
                let f = PolarFactor::new(chain, j)?;
                InverseCdf::from_density(|t| f.marginal(t), 0.0, PI, CDF_CELLS)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d, radial, radial_map, polar })
    }

    fn draw_chunk(&self, seed: u64, chunk: u64, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut out = vec![0.0; count * self.d];
        let mut angles = vec![0.0; self.d - 1];
        for p in out.chunks_exact_mut(self.d) {
            let r = (self.radial_map)(self.radial.quantile(rng.random::<f64>()));
            for (a, table) in angles.iter_mut().zip(&self.polar) {
                *a = table.quantile(rng.random::<f64>());
            }
            angles[self.d - 2] = 2.0 * PI * rng.random::<f64>();
            to_cartesian(r, &angles, p);
        }
        out
    }
}

/// Draws `count` i.i.d. points from `|R(r)|² |Y_μ(Ω)|²`.
pub fn sample_state(state: &RadialState, chain: &QuantumNumberChain, count: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    if state.d() != chain.d() || state.l() != chain.l() {
        return Err(Error::Domain(format!(
            "state (d = {}, l = {}) does not match chain {chain} in d = {}",
            state.d(),
            state.l(),
            chain.d()
        )));
    }
    let sampler = Sampler::new(state, chain)?;
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = if c + 1 == chunks { count - c * CHUNK } else { CHUNK };
            sampler.draw_chunk(seed, c as u64, n)
        })
        .collect();
    PointCloud::new(state.d(), parts.concat())
}

/// Second-moment matrix about the origin and its trace-normalized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub count: usize,
    /// `R_x = <x xᵗ>`
    pub second_moment: Vec<Vec<f64>>,
    /// `C_x = R_x / Tr R_x`
    pub normalized: Vec<Vec<f64>>,
}

impl CovarianceEstimate {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.normalized.len()).map(|i| self.normalized[i][i]).collect()
    }

    /// Largest `|C_ij|`, `i ≠ j`.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.normalized.len();
        let mut m = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    m = m.max(self.normalized[i][j].abs());
                }
            }
        }
        m
    }
}

/// `R_x = (1/N) Σ x xᵗ` (the states are centred, so the mean is not
/// subtracted) and `C_x = R_x / Tr R_x`.
pub fn empirical_covariance(points: &PointCloud) -> Result<CovarianceEstimate> {
    let n = points.len();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n}")));
    }
    let d = points.d();
    let partials: Vec<Vec<f64>> = points
        .coords
        .par_chunks(CHUNK * d)
        .map(|block| {
            let mut acc = vec![0.0; d * d];
            for p in block.chunks_exact(d) {
                for i in 0..d {
                    for j in i..d {
                        acc[i * d + j] += p[i] * p[j];
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; d * d];
    for part in &partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    let mut second_moment = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let v = total[i * d + j] / n as f64;
            second_moment[i][j] = v;
            second_moment[j][i] = v;
        }
    }
    let trace: f64 = (0..d).map(|i| second_moment[i][i]).sum();
    if !(trace > 0.0) {
        return Err(Error::Domain("point cloud has zero second moment".into()));
    }
    let normalized = second_moment
        .iter()
        .map(|row| row.iter().map(|v| v / trace).collect())
        .collect();
    Ok(CovarianceEstimate { count: n, second_moment, normalized })
}
