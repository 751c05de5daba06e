//! Weighted ℓ2/ℓ1 recovery by iteratively reweighted least squares.

pub mod irls;
pub mod linalg;

pub use irls::{
    irls_solve, irls_solve_observed, irls_weight_matrix_diag, objective, weights_from_estimate,
    IrlsConfig, IrlsResult, IrlsStep, Termination, WeightVector,
};
pub use linalg::{min_norm_least_squares, spd_solve, LeastSquares};
