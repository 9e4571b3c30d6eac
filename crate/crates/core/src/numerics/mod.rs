//! Numerical kernels: gamma function, improper quadrature, symmetric
//! tridiagonal eigendecomposition, matrix functions and operator norms.

mod gamma;
mod matfun;
mod quadrature;
mod tridiag;

pub use gamma::{gamma_fn, GAMMA_MAX_ARG};
pub use matfun::{
    apply_matrix_function, expm_taylor, matrix_function, modal_coefficients,
    modal_coefficients_sparse, weighted_op_norm, InputNorm, MAX_CORNER_COLUMNS,
};
pub use quadrature::{
    integrate_adaptive, integrate_power_weighted, quad_cauchy_tail, quad_exp_tail,
    QuadratureResult, EVALUATION_BUDGET,
};
pub use tridiag::{
    sym_tridiag_eig, sym_tridiag_eig_rows, EigenDecomposition, EigenRows, SymTridiagonal,
};
