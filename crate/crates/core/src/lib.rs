//! p-frame potentials of unit-vector configurations.
//!
//! - [`frame`]: configurations, Gram matrices, the energy `sum_{i != j} |A_ij|^p`.
//! - [`relaxation`]: the simplex relaxation `M(c, p, N)` that lower-bounds the energy.
//! - [`theorem`]: step-by-step numerical check of `E_p >= 2m` for `N = d + m`.
//! - [`transition`]: the five-point circle family and its transition exponent.
//! - [`minimizer`]: random-restart descent on products of spheres.
//! - [`io`]: file formats and 17-digit report output.

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod frame;
pub mod io;
pub mod minimizer;
pub mod relaxation;
pub mod theorem;
pub mod transition;

pub use error::{Error, Result};
pub use frame::{
    frame_energy, gram_of, multiplicity_energy, repeated_ortho_config, validate_rank, Exponent, GramMatrix,
    RankReport, UnitVectorConfiguration,
};
pub use minimizer::{minimize_energy, MinimizationReport, MinimizeOptions};
pub use relaxation::{m_bruteforce, m_value, BoundReport, RelaxationProblem};
pub use theorem::{p_threshold, verify_theorem, TheoremParams, VerificationReport};
pub use transition::{solve_transition, subthreshold_witness, TransitionSolution};
