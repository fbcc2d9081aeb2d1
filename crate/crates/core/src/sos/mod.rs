//! Sum-of-squares hierarchy on degree-`k` pseudo-moment vectors.

pub mod basis;
pub mod functional;
pub mod moments;
pub mod poly;
pub mod rounding;
pub mod solver;
pub mod symmetric;

pub use basis::{monomial_basis, MonomialBasis};
pub use functional::{all_product_functionals, product_form_functional, ProductFormFunctional, MAX_SUBSETS};
pub use moments::{MomentLayout, MomentVector};
pub use poly::Poly;
pub use rounding::{round_sos, round_sos_visit, rounding_covariance, SosRoundingOutcome};
pub use solver::{solve_optsos, solve_srel, SosReport};
pub use symmetric::elementary_symmetric;
