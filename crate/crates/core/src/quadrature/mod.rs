//! Numerical integration and sampling.

pub mod entropy;
pub mod rules;
pub mod sampling;

use serde::{Deserialize, Serialize};

pub use entropy::{renyi_radial, renyi_total, renyi_total_tensor, scaling_check};
pub use rules::{gauss_legendre, GaussLegendre, QuadratureSpec, RadialTransform};
pub use sampling::{empirical_covariance, sample_state, CovarianceEstimate, PointCloud};

/// How an entropy value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "closed_form")]
    ClosedForm,
    #[serde(rename = "quadrature_1d")]
    Quadrature1d,
    #[serde(rename = "quadrature_tensor")]
    QuadratureTensor,
    #[serde(rename = "monte_carlo")]
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature1d => "quadrature_1d",
            Method::QuadratureTensor => "quadrature_tensor",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// Entropy in nats with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub lambda: f64,
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}
