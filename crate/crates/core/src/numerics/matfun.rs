//! Spectral matrix functions and weighted operator norms.

use nalgebra::DMatrix;

use super::tridiag::{EigenDecomposition, EigenRows};
use crate::error::{Error, Result};

/// Column count beyond which corner enumeration is refused.
pub const MAX_CORNER_COLUMNS: usize = 20;

/// Norm placed on the input space of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InputNorm {
    Euclidean,
    #[default]
    Max,
}

impl InputNorm {
    pub fn of(&self, u: &[f64]) -> f64 {
        match self {
            InputNorm::Euclidean => u.iter().map(|v| v * v).sum::<f64>().sqrt(),
            InputNorm::Max => u.iter().fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputNorm::Euclidean => "euclidean",
            InputNorm::Max => "max",
        }
    }
}

impl std::str::FromStr for InputNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "l2" | "2" => Ok(InputNorm::Euclidean),
            "max" | "inf" | "linf" => Ok(InputNorm::Max),
            other => Err(Error::Parse(format!(
                "unknown input norm '{other}' (expected euclidean or max)"
            ))),
        }
    }
}

fn mapped_eigenvalues<F: Fn(f64) -> f64>(eigenvalues: &[f64], f: F) -> Result<Vec<f64>> {
    eigenvalues
        .iter()
        .map(|&lam| {
            let v = f(lam);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!(
                    "matrix function is not finite at eigenvalue {lam:e}"
                )))
            }
        })
        .collect()
}

/// f(A) = V·diag(f(λ))·Vᵀ.
pub fn matrix_function<F: Fn(f64) -> f64>(eig: &EigenDecomposition, f: F) -> Result<DMatrix<f64>> {
    let values = mapped_eigenvalues(&eig.eigenvalues, f)?;
    let mut scaled = eig.eigenvectors.clone();
    for (mut col, &v) in scaled.column_iter_mut().zip(&values) {
        col *= v;
    }
    Ok(scaled * eig.eigenvectors.transpose())
}

/// f(A)·rhs without forming f(A).
pub fn apply_matrix_function<F: Fn(f64) -> f64>(
    eig: &EigenDecomposition,
    f: F,
    rhs: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if rhs.nrows() != eig.dim() {
        return Err(Error::Dimension {
            expected: eig.dim(),
            got: rhs.nrows(),
        });
    }
    let modal = modal_coefficients(eig, f, rhs)?;
    Ok(&eig.eigenvectors * modal)
}

/// diag(f(λ))·Vᵀ·rhs, the image of f(A)·rhs in eigenvector coordinates.
///
/// Since V is orthogonal this has the same Euclidean column geometry as
/// f(A)·rhs, which is all the operator norms need.
pub fn modal_coefficients<F: Fn(f64) -> f64>(
    eig: &EigenDecomposition,
    f: F,
    rhs: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let values = mapped_eigenvalues(&eig.eigenvalues, f)?;
    let mut modal = eig.eigenvectors.transpose() * rhs;
    for (i, &v) in values.iter().enumerate() {
        modal.row_mut(i).scale_mut(v);
    }
    Ok(modal)
}

/// Modal coefficients for a right-hand side supported on the tracked rows.
///
/// `rhs_rows` has one row per entry of `eig.rows`; every other row of the
/// right-hand side is zero.
pub fn modal_coefficients_sparse<F: Fn(f64) -> f64>(
    eig: &EigenRows,
    f: F,
    rhs_rows: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if rhs_rows.nrows() != eig.rows.len() {
        return Err(Error::Dimension {
            expected: eig.rows.len(),
            got: rhs_rows.nrows(),
        });
    }
    let values = mapped_eigenvalues(&eig.eigenvalues, f)?;
    let mut modal = eig.components.transpose() * rhs_rows;
    for (i, &v) in values.iter().enumerate() {
        modal.row_mut(i).scale_mut(v);
    }
    Ok(modal)
}

/// sup over the unit ball of `col_norm` of `row_weight·‖m·u‖₂`.
pub fn weighted_op_norm(m: &DMatrix<f64>, row_weight: f64, col_norm: InputNorm) -> Result<f64> {
    if !(row_weight > 0.0 && row_weight.is_finite()) {
        return Err(Error::Domain(format!(
            "row weight must be positive, got {row_weight}"
        )));
    }
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let norm = match col_norm {
        InputNorm::Euclidean => m.singular_values().max(),
        InputNorm::Max => max_corner_norm(m)?,
    };
    Ok(row_weight * norm)
}

/// Largest ‖m·u‖₂ over sign vectors u ∈ {±1}^cols, the extreme points of
/// the max-norm unit ball.
fn max_corner_norm(m: &DMatrix<f64>) -> Result<f64> {
    let cols = m.ncols();
    if cols > MAX_CORNER_COLUMNS {
        return Err(Error::UnsupportedDimension(format!(
            "max-norm operator norm needs at most {MAX_CORNER_COLUMNS} columns, got {cols}"
        )));
    }
    // Work with the Gram matrix so each corner costs O(cols²).
    let gram = m.transpose() * m;
    let mut best: f64 = 0.0;
    // u and −u give the same value: fix the sign of the last entry.
    for mask in 0u32..(1u32 << (cols - 1)) {
        let sign = |j: usize| {
            if j + 1 == cols || mask & (1 << j) == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut q = 0.0;
        for i in 0..cols {
            for j in 0..cols {
                q += sign(i) * sign(j) * gram[(i, j)];
            }
        }
        best = best.max(q);
    }
    Ok(best.max(0.0).sqrt())
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// Used where no symmetric eigendecomposition is available.
pub fn expm_taylor(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm1.is_finite() {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sym_tridiag_eig, SymTridiagonal};

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn identity_function_reconstructs() {
        let t = SymTridiagonal::new(vec![1.0, -2.0, 3.0, 0.5], vec![0.7, -0.2, 1.1]).unwrap();
        let eig = t.eigen().unwrap();
        let back = matrix_function(&eig, |l| l).unwrap();
        assert!(max_abs(&(back - t.to_dense())) < 1e-10 * 3.0);
    }

    #[test]
    fn inverse_square_root_of_heat_three() {
        let eig = sym_tridiag_eig(&[-18.0, -18.0], &[9.0]).unwrap();
        let m = matrix_function(&eig, |l| (-l).powf(-0.5)).unwrap();
        let eig = SymTridiagonal::new(vec![m[(0, 0)], m[(1, 1)]], vec![m[(0, 1)]])
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!((eig[0] - 1.0 / 27f64.sqrt()).abs() < 1e-12);
        assert!((eig[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_exponential() {
        let eig = sym_tridiag_eig(&[-8.0], &[]).unwrap();
        let m = matrix_function(&eig, |l| (l * 0.1).exp()).unwrap();
        assert!((m[(0, 0)] - (-0.8f64).exp()).abs() < 1e-15);
        assert!((m[(0, 0)] - 0.449_329).abs() < 1e-6);
    }

    #[test]
    fn non_finite_values_name_the_eigenvalue() {
        let eig = sym_tridiag_eig(&[0.0, 2.0], &[0.0]).unwrap();
        let err = matrix_function(&eig, |l| 1.0 / l).unwrap_err();
        assert!(matches!(err, Error::Domain(ref msg) if msg.contains("0e0")), "{err}");
    }

    #[test]
    fn apply_agrees_with_dense_product() {
        let t = SymTridiagonal::new(vec![-4.0, -5.0, -6.0], vec![1.0, 2.0]).unwrap();
        let eig = t.eigen().unwrap();
        let rhs = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let dense = matrix_function(&eig, |l| (-l).sqrt()).unwrap() * &rhs;
        let applied = apply_matrix_function(&eig, |l| (-l).sqrt(), &rhs).unwrap();
        assert!(max_abs(&(dense - applied)) < 1e-13);

        let rows = t.eigen_rows(&[0, 2]).unwrap();
        let sparse = modal_coefficients_sparse(&rows, |l| (-l).sqrt(), &DMatrix::identity(2, 2)).unwrap();
        let full = modal_coefficients(&eig, |l| (-l).sqrt(), &rhs).unwrap();
        assert!(max_abs(&(sparse - full)) < 1e-13);
    }

    #[test]
    fn op_norm_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((weighted_op_norm(&id, 1.0, InputNorm::Euclidean).unwrap() - 1.0).abs() < 1e-15);
        let v = weighted_op_norm(&id, 0.5, InputNorm::Max).unwrap();
        assert!((v - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        let s = DMatrix::from_element(1, 1, 3.0);
        assert!((weighted_op_norm(&s, 2.0, InputNorm::Euclidean).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_errors() {
        let wide = DMatrix::<f64>::zeros(2, 21);
        assert!(matches!(
            weighted_op_norm(&wide, 1.0, InputNorm::Max),
            Err(Error::UnsupportedDimension(_))
        ));
        assert!(weighted_op_norm(&wide, 1.0, InputNorm::Euclidean).is_ok());
        assert!(weighted_op_norm(&wide, 0.0, InputNorm::Euclidean).is_err());
    }

    #[test]
    fn max_norm_dominates_euclidean_on_unit_balls() {
        // The max-ball contains the Euclidean ball and sits inside √cols times it.
        let m = DMatrix::from_row_slice(3, 3, &[1.0, -2.0, 0.5, 0.0, 3.0, 1.0, 2.0, 0.0, -1.0]);
        let e = weighted_op_norm(&m, 1.0, InputNorm::Euclidean).unwrap();
        let x = weighted_op_norm(&m, 1.0, InputNorm::Max).unwrap();
        assert!(x >= e - 1e-12 && x <= 3f64.sqrt() * e + 1e-12);
    }

    #[test]
    fn taylor_exponential_of_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-30.0, 0.5, 2.0]));
        let e = expm_taylor(&a).unwrap();
        for (i, v) in [-30.0f64, 0.5, 2.0].iter().enumerate() {
            assert!(((e[(i, i)] - v.exp()) / v.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn input_norms() {
        assert_eq!(InputNorm::Max.of(&[1.0, -3.0]), 3.0);
        assert!((InputNorm::Euclidean.of(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert_eq!("MAX".parse::<InputNorm>().unwrap(), InputNorm::Max);
        assert!("taxicab".parse::<InputNorm>().is_err());
    }
}
