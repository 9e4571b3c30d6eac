//! Symmetric tridiagonal matrices: implicit-shift QL eigensolver and
//! direct solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Per-eigenvalue iteration allowance; the total cap is this times the dimension.
const ITERATIONS_PER_EIGENVALUE: usize = 30;

/// A real symmetric tridiagonal matrix stored by its diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Dimension { expected: 1, got: 0 });
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::Dimension {
                expected: diag.len() - 1,
                got: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * factor).collect(),
            off: self.off.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for (i, &e) in self.off.iter().enumerate() {
            y[i] += e * x[i + 1];
            y[i + 1] += e * x[i];
        }
        Ok(y)
    }

    /// Solves (A − shift·I) x = rhs by Gaussian elimination without pivoting.
    ///
    /// Intended for shifts that keep the matrix definite; a vanishing pivot
    /// is reported as a numerical error.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::Dimension { expected: n, got: rhs.len() });
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .fold(shift.abs(), |acc, v| acc.max(v.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut pivots = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut pivot = self.diag[0] - shift;
        if pivot.abs() <= tiny {
            return Err(singular_shift(shift));
        }
        pivots.push(pivot);
        y.push(rhs[0]);
        for i in 1..n {
            let factor = self.off[i - 1] / pivot;
            pivot = self.diag[i] - shift - factor * self.off[i - 1];
            if pivot.abs() <= tiny {
                return Err(singular_shift(shift));
            }
            pivots.push(pivot);
            y.push(rhs[i] - factor * y[i - 1]);
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / pivots[i];
        }
        Ok(x)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_shifted(0.0, rhs)
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(tql_implicit(&self.diag, &self.off, &[])?.0)
    }

    /// Full eigendecomposition.
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        sym_tridiag_eig(&self.diag, &self.off)
    }

    /// Eigenvalues together with the selected rows of the eigenvector matrix.
    pub fn eigen_rows(&self, rows: &[usize]) -> Result<EigenRows> {
        sym_tridiag_eig_rows(&self.diag, &self.off, rows)
    }
}

fn singular_shift(shift: f64) -> Error {
    Error::Numerical(format!(
        "shifted system is singular at lambda = {shift:e}"
    ))
}

/// Spectral decomposition A = V·diag(λ)·Vᵀ of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let scaled = v * DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        scaled * v.transpose()
    }
}

/// Eigenvalues with a subset of eigenvector rows.
///
/// `components[(r, i)]` is entry `rows[r]` of the `i`-th eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenRows {
    pub eigenvalues: Vec<f64>,
    pub rows: Vec<usize>,
    pub components: DMatrix<f64>,
}

pub fn sym_tridiag_eig(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition> {
    let rows: Vec<usize> = (0..diag.len()).collect();
    let (eigenvalues, columns) = tql_implicit(diag, offdiag, &rows)?;
    let n = diag.len();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| columns[c][r]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

pub fn sym_tridiag_eig_rows(diag: &[f64], offdiag: &[f64], rows: &[usize]) -> Result<EigenRows> {
    if let Some(&bad) = rows.iter().find(|&&r| r >= diag.len()) {
        return Err(Error::Dimension {
            expected: diag.len(),
            got: bad + 1,
        });
    }
    let (eigenvalues, columns) = tql_implicit(diag, offdiag, rows)?;
    let components = DMatrix::from_fn(rows.len(), diag.len(), |r, c| columns[c][r]);
    Ok(EigenRows {
        eigenvalues,
        rows: rows.to_vec(),
        components,
    })
}

/// Implicit-shift QL iteration (tql2 lineage) on a symmetric tridiagonal
/// matrix, accumulating the Givens rotations only on the requested rows of
/// the eigenvector matrix.
///
/// Returns ascending eigenvalues and, per eigenvalue, the tracked rows of
/// its eigenvector.
fn tql_implicit(diag: &[f64], offdiag: &[f64], rows: &[usize]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Dimension { expected: 1, got: 0 });
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Dimension {
            expected: n - 1,
            got: offdiag.len(),
        });
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }

    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    // cols[i][r]: entry rows[r] of the i-th column of V, starting from V = I.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|i| rows.iter().map(|&r| if r == i { 1.0 } else { 0.0 }).collect())
        .collect();

    let cap = ITERATIONS_PER_EIGENVALUE * n;
    let mut iterations = 0usize;
    let eps = f64::EPSILON;
    let mut shift_sum = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > cap {
                    return Err(Error::NoConvergence { iterations });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift_sum += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (left, right) = cols.split_at_mut(i + 1);
                    let vi = &mut left[i];
                    let vi1 = &mut right[0];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_sum;
        e[l] = 0.0;
    }

    // Stable sort: equal eigenvalues keep their order of emergence.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let mut sorted_cols = Vec::with_capacity(n);
    for &i in &order {
        sorted_cols.push(std::mem::take(&mut cols[i]));
    }
    Ok((eigenvalues, sorted_cols))
}
