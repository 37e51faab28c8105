//! Maximum-entropy upper bounds on Rényi entropies of separable quantum
//! states in `d` dimensions, with the angular correlation correction and
//! numerical verification against catalog states.

pub mod angular;
pub mod coords;
pub mod error;
pub mod maxent;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod states;

pub use angular::{
    angular_density, angular_renyi, correlation_diagonal, cos2_moment, entropy_loss, kl_loss, CorrelationDiagonal,
    QuantumNumberChain,
};
pub use error::{Error, Result};
pub use maxent::{
    baseline_renyi_bound, bd_lambda, bd_lambda_printed, extremal_density, extremal_renyi, shannon_bound,
    ExtremalDensity, ExtremalKind, RenyiOrder,
};
pub use quadrature::{
    empirical_covariance, renyi_radial, renyi_total, renyi_total_tensor, sample_state, scaling_check,
    CovarianceEstimate, EntropyValue, Method, PointCloud, QuadratureSpec, RadialTransform,
};
pub use report::{sweep, verify, verify_with, BoundReport, SweepCell, SweepConfig, SystemKind};
pub use states::{
    hydrogen_state, oscillator_state, r2_expectation, tabulated_state, tabulated_state_from_file, RadialState,
};
