//! Closed-form linear algebra for the equicorrelation matrix `G_N`.
//!
//! `G_N` has unit diagonal and a common off-diagonal correlation `rho`. It is
//! stored implicitly as `(n, rho)`; every production operation here costs
//! O(N). Its spectrum is one eigenvalue `1 + (N-1) rho` on the direction
//! `1_N` and an `(N-1)`-fold eigenvalue `1 - rho` on the orthogonal
//! complement. An explicit orthonormal eigenbasis is given by the rows of
//! `Q_N = B_N^{-1/2} P_N`, where `P_N` is the integer projection matrix
//! built by [`projection_matrix`] and `B_N` holds its squared row norms.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// `|rho - root| < SINGULARITY_EPS` counts as singular for either root of
/// `f_N = (rho - 1)(1 + (N-1) rho)`.
pub const SINGULARITY_EPS: f64 = 1e-12;

/// Feasible correlation interval `[1/(1-n), 1]` for `n >= 2` assets.
pub fn feasible_rho_range(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, got: n });
    }
    Ok((1.0 / (1.0 - n as f64), 1.0))
}

pub(crate) fn check_feasible(n: usize, rho: f64) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    let (min, max) = feasible_rho_range(n)?;
    // one ulp of slack so that literals such as -1.0/3.0 for n = 4 pass
    let slack = f64::EPSILON * min.abs().max(1.0);
    if !rho.is_finite() || rho < min - slack || rho > max + slack {
        return Err(Error::InfeasibleCorrelation { n, rho, min, max });
    }
    Ok(())
}

/// The `N x N` isotropic correlation matrix, held as `(n, rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquiCorrMatrix {
    n: usize,
    rho: f64,
}

impl EquiCorrMatrix {
    /// Builds `G_N`; an infeasible `rho` is an error, never clamped.
    ///
    /// For `n == 1` the matrix is the 1x1 identity and `rho` is ignored
    /// (stored as zero).
    pub fn new(n: usize, rho: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        if n == 1 {
            return Ok(Self { n, rho: 0.0 });
        }
        check_feasible(n, rho)?;
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn eigenvalues(&self) -> EigenStructure {
        let n = self.n as f64;
        EigenStructure {
            common_eigenvalue: 1.0 + (n - 1.0) * self.rho,
            degenerate_eigenvalue: 1.0 - self.rho,
            multiplicity: self.n - 1,
        }
    }

    pub fn trace(&self) -> f64 {
        self.n as f64
    }

    /// `1^T G 1 = N + N(N-1) rho`.
    pub fn grand_sum(&self) -> f64 {
        let n = self.n as f64;
        n * (1.0 + (n - 1.0) * self.rho)
    }

    /// True when `rho` sits within [`SINGULARITY_EPS`] of `1` or `1/(1-N)`.
    pub fn is_singular(&self) -> bool {
        if self.n == 1 {
            return false;
        }
        let lower = 1.0 / (1.0 - self.n as f64);
        (self.rho - 1.0).abs() < SINGULARITY_EPS || (self.rho - lower).abs() < SINGULARITY_EPS
    }

    /// `G^{-1} = a I + b 1 1^T` with `a = 1/(1-rho)` and
    /// `b = -rho / ((1-rho)(1+(N-1)rho))`.
    pub fn inverse(&self) -> Result<ImplicitInverse> {
        if self.is_singular() {
            return Err(Error::Singular {
                n: self.n,
                rho: self.rho,
            });
        }
        let n = self.n as f64;
        let rho = self.rho;
        let a = 1.0 / (1.0 - rho);
        let b = -rho / ((1.0 - rho) * (1.0 + (n - 1.0) * rho));
        Ok(ImplicitInverse {
            n: self.n,
            diagonal: a,
            rank_one: b,
        })
    }

    /// `G x = (1 - rho) x + rho (1^T x) 1`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let total: f64 = x.iter().sum();
        let shift = self.rho * total;
        Ok(x.iter().map(|&v| (1.0 - self.rho) * v + shift).collect())
    }

    pub fn inv_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        self.inverse()?.apply(x)
    }

    /// Dense `G_N`. Debugging and oracle use only.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| if i == j { 1.0 } else { self.rho })
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenStructure {
    /// `1 + (N-1) rho`, eigenvector `1_N`.
    pub common_eigenvalue: f64,
    /// `1 - rho`.
    pub degenerate_eigenvalue: f64,
    /// `N - 1`.
    pub multiplicity: usize,
}

impl EigenStructure {
    /// All `N` eigenvalues in the row order of `Q_N` (common one first).
    pub fn spectrum(&self) -> Vec<f64> {
        std::iter::once(self.common_eigenvalue)
            .chain(std::iter::repeat_n(
                self.degenerate_eigenvalue,
                self.multiplicity,
            ))
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.common_eigenvalue + self.multiplicity as f64 * self.degenerate_eigenvalue
    }

    /// `(1 + (N-1) rho)(1 - rho)^(N-1)`.
    pub fn determinant(&self) -> f64 {
        self.common_eigenvalue * self.degenerate_eigenvalue.powi(self.multiplicity as i32)
    }
}

/// `G^{-1}` as `diagonal * I + rank_one * 1 1^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitInverse {
    pub n: usize,
    pub diagonal: f64,
    pub rank_one: f64,
}

impl ImplicitInverse {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let shift = self.rank_one * x.iter().sum::<f64>();
        Ok(x.iter().map(|&v| self.diagonal * v + shift).collect())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                self.diagonal + self.rank_one
            } else {
                self.rank_one
            }
        })
    }
}

/// Integer matrix `P_N`: top row ones, strict lower triangle `-1`, strict
/// upper triangle zero, and diagonal `i - 1` on (1-based) row `i > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionMatrix {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl ProjectionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Exact row Gram matrix `P P^T` in integer arithmetic.
    pub fn row_gram(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|a| {
                self.rows
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect()
    }
}

pub fn projection_matrix(n: usize) -> Result<ProjectionMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == 0 {
                        1
                    } else if j < i {
                        -1
                    } else if j == i {
                        i as i64
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    Ok(ProjectionMatrix { n, rows })
}

/// Diagonal of `B_N`: `N`, then `j(j-1)` for `j` in `2..=N` (the squared
/// row norms of `P_N`).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizerMatrix {
    n: usize,
    diagonal: Vec<f64>,
}

impl NormalizerMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }
}

pub fn normalizer_matrix(n: usize) -> Result<NormalizerMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let diagonal = std::iter::once(n as f64)
        .chain((2..=n).map(|j| (j * (j - 1)) as f64))
        .collect();
    Ok(NormalizerMatrix { n, diagonal })
}

/// `Q_N = B_N^{-1/2} P_N`; rows are orthonormal eigenvectors of every
/// `G_N`, the first being `1_N / sqrt(N)`.
pub fn orthogonal_eigenmatrix(n: usize) -> Result<DenseMatrix> {
    let p = projection_matrix(n)?;
    let b = normalizer_matrix(n)?;
    let scale: Vec<f64> = b.diagonal().iter().map(|d| 1.0 / d.sqrt()).collect();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        p.rows[i][j] as f64 * scale[i]
    }))
}
