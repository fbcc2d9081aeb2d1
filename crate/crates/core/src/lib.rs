//! Bounds and approximate maximizers for the geometric mean of PSD quadratic
//! forms on the real or complex unit sphere.
//!
//! Given forms `A_1, ..., A_d` the target is
//! `max_{|x| = 1} (prod_i <x, A_i x>)^{1/d}`.
//! The crate provides the trace-constrained SDP relaxation with a dual
//! certificate, Gaussian rounding, a sum-of-squares hierarchy on moment
//! vectors with its own rounding, closed-form constants, and a multistart
//! local oracle for small instances.

pub mod error;
pub mod experiments;
pub mod field;
pub mod instance;
pub mod oracle;
pub mod rng;
pub mod rounding;
pub mod sampling;
pub mod sdp;
pub mod sos;
pub mod special;

pub use error::{Error, Result};
pub use field::{
    eigh, gram_factor, project_simplex, project_spectrahedron, DensityMatrix, Field, GramFactor,
    HermitianMatrix, KVector, SpectralDecomposition, C64,
};
pub use instance::{GraphSpec, ProblemInstance};
pub use rng::SeedStream;
pub use rounding::{
    approx_factor, check_rounding_guarantee, round_gaussian, GuaranteeVerdict, RoundingOutcome,
};
pub use sampling::{sample_gaussian, sample_sphere_uniform, GaussianSampler};
pub use sdp::{amgm_eigen_bound, dual_certificate, exactness_hint, solve_optsdp, Exactness, SolveReport};
