//! Achievable distortion tradeoffs for sending one source over a two-user
//! broadcast channel when each receiver holds its own side information.
//!
//! Two instances are covered: quadratic Gaussian (AWGN channel, Gaussian
//! side information) in [`gaussian`], and binary Hamming (BSC channel,
//! BSC-corrupted side information) in [`binary`]. [`dmc`] evaluates the
//! underlying rate expressions for arbitrary finite auxiliaries,
//! [`optimize`] turns point clouds into convex tradeoff curves, and
//! [`mcsim`] checks the uncoded strategies by simulation.
//!
//! ```
//! use wzbc::gaussian::{gaussian_cds, gaussian_lds_closed_form};
//! use wzbc::{GaussianProblem, RoleAssignment};
//!
//! let p = GaussianProblem::pair(1.0, [1.0, 0.5], [0.8, 0.4]).unwrap();
//! let cds = gaussian_cds(&p).unwrap();
//! assert!((cds.d[1] - 0.4 / 1.5).abs() < 1e-12);
//! let d_r = gaussian_lds_closed_form(&p, RoleAssignment::C1_R2, 0.8, false).unwrap();
//! assert!((d_r - 0.4 / 3.0).abs() < 1e-12);
//! ```

pub mod binary;
pub mod dmc;
pub mod error;
pub mod gaussian;
pub mod infotheory;
pub mod mcsim;
pub mod optimize;
pub mod problem;
pub mod validation;

pub use error::{Error, Result};
pub use infotheory::{binary_convolution, binary_entropy, wz_rate_kernel, JointDistribution};
pub use optimize::{lower_convex_envelope, pareto_merge, Axis, GridSpec};
pub use problem::{
    BinaryProblem, ClampedRates, DistortionPoint, GaussianProblem, Kappa, Params, Problem, RateTriple,
    RoleAssignment, Scheme, TradeoffCurve,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/gaussian.md")]
    mod gaussian {}
    #[doc = include_str!("../../../book/src/binary.md")]
    mod binary {}
    #[doc = include_str!("../../../book/src/dmc.md")]
    mod dmc {}
    #[doc = include_str!("../../../book/src/envelopes.md")]
    mod envelopes {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
