//! Equal-weight portfolio variance, effective degrees of freedom and the
//! model predictions for `N*(N)`.
//!
//! For an equal-weight portfolio over a covariance `S`,
//! `V_P = gs(S)/N^2` splits into the independent part `V_I = tr(S)/N^2` and
//! the covariance part `V_C = (gs(S) - tr(S))/N^2`. The effective degrees of
//! freedom is `N* = N V_I / V_P`. Isotropic, factor and dense empirical
//! covariances all implement [`CovarianceAccessor`] and share one code path.

use serde::Serialize;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::iso_algebra::{check_feasible, EquiCorrMatrix};

/// `V_P` below this is reported as [`Error::DegenerateVariance`].
pub const DEGENERATE_VARIANCE: f64 = 1e-15;

/// What the variance decomposition needs from a covariance matrix.
pub trait CovarianceAccessor {
    fn dim(&self) -> usize;
    fn trace(&self) -> f64;
    /// `1^T S 1`.
    fn grand_sum(&self) -> f64;
    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// `S = diag(sigmas) G_N diag(sigmas)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicModel {
    corr: EquiCorrMatrix,
    sigmas: Vec<f64>,
}

impl IsotropicModel {
    pub fn new(rho: f64, sigmas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = sigmas.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "volatilities must be positive and finite, got {bad}"
            )));
        }
        let corr = EquiCorrMatrix::new(sigmas.len(), rho)?;
        Ok(Self { corr, sigmas })
    }

    pub fn homoskedastic(n: usize, rho: f64, sigma: f64) -> Result<Self> {
        Self::new(rho, vec![sigma; n])
    }

    pub fn n(&self) -> usize {
        self.corr.n()
    }

    pub fn rho(&self) -> f64 {
        self.corr.rho()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn correlation(&self) -> &EquiCorrMatrix {
        &self.corr
    }

    pub fn is_homoskedastic(&self) -> bool {
        self.sigmas.windows(2).all(|w| w[0] == w[1])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let g = self.corr.to_dense();
        DenseMatrix::from_fn(self.n(), self.n(), |i, j| {
            self.sigmas[i] * g[(i, j)] * self.sigmas[j]
        })
    }
}

impl CovarianceAccessor for IsotropicModel {
    fn dim(&self) -> usize {
        self.n()
    }

    fn trace(&self) -> f64 {
        self.sigmas.iter().map(|s| s * s).sum()
    }

    /// `sum s_i^2 + rho [(sum s_i)^2 - sum s_i^2]`, exact for heteroskedastic
    /// volatilities.
    fn grand_sum(&self) -> f64 {
        let sum: f64 = self.sigmas.iter().sum();
        let sum_sq = self.trace();
        sum_sq + self.rho() * (sum * sum - sum_sq)
    }

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        let scaled: Vec<f64> = x.iter().zip(&self.sigmas).map(|(v, s)| v * s).collect();
        let g = self.corr.matvec(&scaled)?;
        Ok(g.iter().zip(&self.sigmas).map(|(v, s)| v * s).collect())
    }
}

/// Linear factor model `S = B B^T + diag(idio_var)` with unit-variance
/// factors. `loadings` is `N x K` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    n: usize,
    k: usize,
    loadings: Vec<f64>,
    idio_var: Vec<f64>,
}

impl FactorModel {
    pub fn new(n: usize, k: usize, loadings: Vec<f64>, idio_var: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { min: 1, got: 0 });
        }
        if k > n {
            return Err(Error::InvalidParameter(format!(
                "{k} factors exceed {n} assets"
            )));
        }
        if loadings.len() != n * k {
            return Err(Error::DimensionMismatch {
                expected: n * k,
                got: loadings.len(),
            });
        }
        if idio_var.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: idio_var.len(),
            });
        }
        if loadings.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("non-finite loading".into()));
        }
        if idio_var.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "idiosyncratic variances must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            n,
            k,
            loadings,
            idio_var,
        })
    }

    /// Every loading equal to `b`, every idiosyncratic variance `s2`.
    pub fn uniform(n: usize, k: usize, b: f64, s2: f64) -> Result<Self> {
        Self::new(n, k, vec![b; n * k], vec![s2; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn loading(&self, asset: usize, factor: usize) -> f64 {
        self.loadings[asset * self.k + factor]
    }

    pub fn loadings_row(&self, asset: usize) -> &[f64] {
        &self.loadings[asset * self.k..(asset + 1) * self.k]
    }

    pub fn idio_var(&self) -> &[f64] {
        &self.idio_var
    }

    /// `tr(B B^T)`: the sum of squared loadings.
    pub fn loadings_sum_sq(&self) -> f64 {
        self.loadings.iter().map(|b| b * b).sum()
    }

    /// Column means of `B`, one per factor.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.k];
        for i in 0..self.n {
            for (m, b) in means.iter_mut().zip(self.loadings_row(i)) {
                *m += b;
            }
        }
        means.iter_mut().for_each(|m| *m /= self.n as f64);
        means
    }

    /// `bbar^T bbar`, the squared norm of the mean loading vector.
    pub fn mean_loading_norm_sq(&self) -> f64 {
        self.column_means().iter().map(|m| m * m).sum()
    }

    /// Mean of the squared elements of `B`, `tr(B B^T) / (N K)`.
    pub fn mean_square_loading(&self) -> Result<f64> {
        if self.k == 0 {
            return Err(Error::NoFactors);
        }
        Ok(self.loadings_sum_sq() / (self.n * self.k) as f64)
    }

    pub fn mean_idio_var(&self) -> f64 {
        self.idio_var.iter().sum::<f64>() / self.n as f64
    }

    /// Dense `B B^T + diag(idio_var)`, checked for positive definiteness.
    pub fn dense_covariance(&self) -> Result<DenseMatrix> {
        let m = DenseMatrix::from_fn(self.n, self.n, |i, j| {
            let bb: f64 = self
                .loadings_row(i)
                .iter()
                .zip(self.loadings_row(j))
                .map(|(a, b)| a * b)
                .sum();
            if i == j {
                bb + self.idio_var[i]
            } else {
                bb
            }
        });
        m.cholesky()?;
        Ok(m)
    }
}

impl CovarianceAccessor for FactorModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn trace(&self) -> f64 {
        self.loadings_sum_sq() + self.idio_var.iter().sum::<f64>()
    }

    /// `|sum_i b_i|^2 + sum s_i^2`.
    fn grand_sum(&self) -> f64 {
        let n2 = (self.n * self.n) as f64;
        n2 * self.mean_loading_norm_sq() + self.idio_var.iter().sum::<f64>()
    }

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut f = vec![0.0; self.k];
        for (i, xi) in x.iter().enumerate() {
            for (fj, b) in f.iter_mut().zip(self.loadings_row(i)) {
                *fj += b * xi;
            }
        }
        Ok((0..self.n)
            .map(|i| {
                let bf: f64 = self
                    .loadings_row(i)
                    .iter()
                    .zip(&f)
                    .map(|(b, v)| b * v)
                    .sum();
                bf + self.idio_var[i] * x[i]
            })
            .collect())
    }
}

impl CovarianceAccessor for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn trace(&self) -> f64 {
        DenseMatrix::trace(self)
    }

    fn grand_sum(&self) -> f64 {
        DenseMatrix::grand_sum(self)
    }

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        DenseMatrix::matvec(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceDecomposition {
    pub n: usize,
    pub v_p: f64,
    pub v_i: f64,
    pub v_c: f64,
    pub n_star: f64,
}

/// Splits the equal-weight portfolio variance of `sigma` into `V_I + V_C`
/// and reports `N* = N V_I / V_P`.
pub fn equal_weight_variance<C: CovarianceAccessor + ?Sized>(
    sigma: &C,
) -> Result<VarianceDecomposition> {
    let n = sigma.dim();
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    let n2 = (n * n) as f64;
    let tr = sigma.trace();
    let gs = sigma.grand_sum();
    decomposition_from_parts(n, tr / n2, gs / n2)
}

pub(crate) fn decomposition_from_parts(
    n: usize,
    v_i: f64,
    v_p: f64,
) -> Result<VarianceDecomposition> {
    if !(v_p >= DEGENERATE_VARIANCE) {
        return Err(Error::DegenerateVariance(v_p));
    }
    Ok(VarianceDecomposition {
        n,
        v_p,
        v_i,
        v_c: v_p - v_i,
        n_star: n as f64 * v_i / v_p,
    })
}

/// `N / (1 + (N-1) rho)`.
pub fn iso_nstar(n: usize, rho: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    check_feasible(n, rho)?;
    let nf = n as f64;
    Ok(nf / (1.0 + (nf - 1.0) * rho))
}

/// Large-`N` limit of [`iso_nstar`], `1 / rho`. Undefined for `rho <= 0`,
/// where `N*` grows without bound.
pub fn iso_nstar_asymptote(rho: f64) -> Option<f64> {
    (rho > 0.0 && rho <= 1.0).then(|| 1.0 / rho)
}

/// Pointwise [`iso_nstar`]; `rho` must be feasible for the largest `n`.
pub fn iso_nstar_curve(rho: f64, n_values: &[usize]) -> Result<Vec<f64>> {
    if let Some(&max) = n_values.iter().max() {
        check_feasible(max, rho)?;
    }
    n_values.iter().map(|&n| iso_nstar(n, rho)).collect()
}

/// Inverts `N* = N / (1 + (N-1) rho)`:
/// `rho_hat = (N - N*) / ((N - 1) N*)`.
pub fn rho_hat_from_nstar(n: usize, n_star: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, got: n });
    }
    if !(n_star > 0.0 && n_star <= n as f64) {
        return Err(Error::NStarOutOfRange { n, n_star });
    }
    let nf = n as f64;
    Ok((nf - n_star) / ((nf - 1.0) * n_star))
}

/// Effective degrees of freedom implied by a factor model,
/// `N (tr(BB^T)/N + s2bar) / (N bbar^T bbar + s2bar)`.
///
/// Identical to `equal_weight_variance(fm).n_star` but expressed through the
/// loading summaries.
pub fn factor_nstar(fm: &FactorModel) -> Result<f64> {
    let n = fm.n() as f64;
    let energy = fm.loadings_sum_sq() / n;
    let s2 = fm.mean_idio_var();
    let denom = n * fm.mean_loading_norm_sq() + s2;
    if !(denom / n >= DEGENERATE_VARIANCE) {
        return Err(Error::DegenerateVariance(denom / n));
    }
    Ok(n * (energy + s2) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoadingsInequality {
    /// Mean of the squared elements of `B`.
    pub lhs: f64,
    /// `bbar^T bbar / K`.
    pub rhs: f64,
    pub holds: bool,
}

/// Mean-square versus squared-mean of the loadings:
/// `mean(b_ij^2) >= bbar^T bbar / K`.
pub fn loadings_mean_inequality(fm: &FactorModel) -> Result<LoadingsInequality> {
    let lhs = fm.mean_square_loading()?;
    let rhs = fm.mean_loading_norm_sq() / fm.k() as f64;
    // equality (constant columns) may round either way by a few ulps
    let holds = lhs >= rhs || (rhs - lhs) <= 8.0 * f64::EPSILON * rhs.abs();
    Ok(LoadingsInequality { lhs, rhs, holds })
}

/// Homoskedastic equal-weight portfolio risk split into the common-factor
/// part `V_S` and the residual part `V_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskPartition {
    pub n: usize,
    pub v_s: f64,
    pub v_r: f64,
}

impl RiskPartition {
    /// `V_S + V_R = sigma^2 / N`, the eigenvalue sum over `N^2`. This is the
    /// independent part `V_I`, not the portfolio variance.
    pub fn total(&self) -> f64 {
        self.v_s + self.v_r
    }

    /// `V_R / V_S`; `None` when `V_S` vanishes.
    pub fn ratio(&self) -> Option<f64> {
        (self.v_s > 0.0).then(|| self.v_r / self.v_s)
    }
}

/// `V_S = s^2 (1 + (N-1) rho) / N^2`, `V_R = s^2 (N-1)(1-rho) / N^2`.
pub fn risk_partition(sigma: f64, rho: f64, n: usize) -> Result<RiskPartition> {
    if n == 0 {
        return Err(Error::InvalidDimension { min: 1, got: 0 });
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "volatility must be positive, got {sigma}"
        )));
    }
    check_feasible(n, rho)?;
    let nf = n as f64;
    let s2 = sigma * sigma / (nf * nf);
    Ok(RiskPartition {
        n,
        v_s: s2 * (1.0 + (nf - 1.0) * rho),
        v_r: s2 * (nf - 1.0) * (1.0 - rho),
    })
}

/// Large-`N` limit of `V_R / V_S`, `(1 - rho) / rho`. Undefined for
/// `rho <= 0`.
pub fn asymptotic_risk_ratio(rho: f64) -> Option<f64> {
    (rho > 0.0).then(|| (1.0 - rho) / rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_covariance_has_full_dof() {
        let s = DenseMatrix::from_fn(7, 7, |i, j| if i == j { 0.04 } else { 0.0 });
        let d = equal_weight_variance(&s).unwrap();
        assert_relative_eq!(d.v_p, 0.04 / 7.0, max_relative = 1e-14);
        assert_relative_eq!(d.n_star, 7.0, max_relative = 1e-14);
        assert_eq!(d.v_c, 0.0);
    }

    #[test]
    fn homoskedastic_isotropic_substitution() {
        let m = IsotropicModel::homoskedastic(10, 0.2, 1.0).unwrap();
        let d = equal_weight_variance(&m).unwrap();
        assert_relative_eq!(d.v_p, 0.28, max_relative = 1e-14);
        assert_relative_eq!(d.n_star, 10.0 / 2.8, max_relative = 1e-14);
        assert_relative_eq!(d.v_i + d.v_c, d.v_p, max_relative = 1e-14);
    }

    #[test]
    fn brute_force_double_loop() {
        // fixed SPD matrix A A^T + I with small integer-ish entries
        let a = DenseMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let mut s = a.matmul(&a.transpose()).unwrap();
        for i in 0..6 {
            s[(i, i)] += 1.0;
        }
        let mut total = 0.0;
        let mut diag = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                total += s[(i, j)];
                if i == j {
                    diag += s[(i, j)];
                }
            }
        }
        let d = equal_weight_variance(&s).unwrap();
        assert_relative_eq!(d.v_p, total / 36.0, max_relative = 1e-14);
        assert_relative_eq!(d.v_i, diag / 36.0, max_relative = 1e-14);
        assert_relative_eq!(d.n_star, 6.0 * diag / total, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_variance_is_an_error() {
        // perfect hedge: rho = -1 with two assets
        let m = IsotropicModel::homoskedastic(2, -1.0, 1.0).unwrap();
        assert!(matches!(
            equal_weight_variance(&m),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn heteroskedastic_grand_sum_matches_dense() {
        let m = IsotropicModel::new(0.35, vec![0.1, 0.3, 0.25, 0.05]).unwrap();
        let dense = m.to_dense();
        assert_relative_eq!(m.grand_sum(), dense.grand_sum(), max_relative = 1e-14);
        assert_relative_eq!(m.trace(), DenseMatrix::trace(&dense), max_relative = 1e-14);
        let x = [1.0, -2.0, 0.5, 3.0];
        let a = CovarianceAccessor::matvec(&m, &x).unwrap();
        let b = dense.matvec(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_relative_eq!(u, v, max_relative = 1e-13);
        }
    }

    #[test]
    fn iso_curve_limits() {
        let big = iso_nstar(100_000_000, 0.2).unwrap();
        assert_relative_eq!(big, 5.0, max_relative = 1e-7);
        assert_eq!(
            iso_nstar_curve(0.0, &[1, 5, 50]).unwrap(),
            vec![1.0, 5.0, 50.0]
        );
        for rho in [-0.9, 0.0, 0.3, 1.0] {
            assert_eq!(iso_nstar(1, rho).unwrap(), 1.0);
        }
        // continuity at rho -> 0
        assert_relative_eq!(iso_nstar(500, 1e-12).unwrap(), 500.0, max_relative = 1e-9);
        // N* = 30 as N -> inf needs rho ~ 1/30
        let rho = rho_hat_from_nstar(1_000_000_000, 30.0).unwrap();
        assert_relative_eq!(rho, 1.0 / 30.0, max_relative = 1e-6);
        assert!(iso_nstar_curve(-0.2, &[2, 10]).is_err());
    }

    #[test]
    fn iso_curve_monotone_for_positive_rho() {
        let ns: Vec<usize> = (1..400).collect();
        let c = iso_nstar_curve(0.13, &ns).unwrap();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        assert!(c.iter().all(|v| *v < 1.0 / 0.13));
    }

    #[test]
    fn rho_hat_values() {
        let r = rho_hat_from_nstar(503, 7.44).unwrap();
        assert!((r - 0.1327).abs() < 5e-5, "{r}");
        let r = rho_hat_from_nstar(503, 7.12).unwrap();
        assert_relative_eq!(r, 495.88 / (502.0 * 7.12), epsilon = 1e-15);
        assert_eq!(rho_hat_from_nstar(50, 50.0).unwrap(), 0.0);
        let ns = iso_nstar(100, 0.3).unwrap();
        assert_relative_eq!(rho_hat_from_nstar(100, ns).unwrap(), 0.3, epsilon = 1e-12);
        assert!(rho_hat_from_nstar(10, 0.0).is_err());
        assert!(rho_hat_from_nstar(10, 10.5).is_err());
        assert!(rho_hat_from_nstar(1, 1.0).is_err());
    }

    #[test]
    fn factor_nstar_without_factors() {
        let fm = FactorModel::new(12, 0, vec![], vec![0.02; 12]).unwrap();
        assert_relative_eq!(factor_nstar(&fm).unwrap(), 12.0, max_relative = 1e-14);
        assert!(matches!(
            loadings_mean_inequality(&fm),
            Err(Error::NoFactors)
        ));
    }

    #[test]
    fn uniform_loadings_equal_isotropic() {
        // b_ij = b makes B B^T = K b^2 1 1^T, an equicorrelation structure with
        // rho = K b^2 / (K b^2 + s^2)
        let (n, k, b, s2) = (300, 5, 0.004, 0.015_f64.powi(2));
        let fm = FactorModel::uniform(n, k, b, s2).unwrap();
        let rho = k as f64 * b * b / (k as f64 * b * b + s2);
        assert_relative_eq!(
            factor_nstar(&fm).unwrap(),
            iso_nstar(n, rho).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn factor_nstar_matches_dense() {
        let (n, k) = (15, 3);
        let loadings: Vec<f64> = (0..n * k)
            .map(|i| ((i * 37 % 11) as f64 - 4.0) / 10.0)
            .collect();
        let idio: Vec<f64> = (0..n).map(|i| 0.1 + 0.01 * i as f64).collect();
        let fm = FactorModel::new(n, k, loadings, idio).unwrap();
        let dense = fm.dense_covariance().unwrap();
        let direct = equal_weight_variance(&dense).unwrap();
        let implicit = equal_weight_variance(&fm).unwrap();
        assert_relative_eq!(
            factor_nstar(&fm).unwrap(),
            direct.n_star,
            max_relative = 1e-12
        );
        assert_relative_eq!(implicit.v_p, direct.v_p, max_relative = 1e-12);
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 7.0).collect();
        let a = CovarianceAccessor::matvec(&fm, &x).unwrap();
        let b = dense.matvec(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_relative_eq!(u, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn loadings_inequality_cases() {
        let constant = FactorModel::uniform(8, 3, 0.7, 1.0).unwrap();
        let r = loadings_mean_inequality(&constant).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.lhs, r.rhs, max_relative = 1e-14);

        // only the first column nonzero: lhs = sum b_i1^2/(N K), rhs = mean(b_i1)^2 / K
        let n = 5;
        let col = [1.0, 2.0, -1.0, 0.5, 3.0];
        let mut loadings = vec![0.0; n * 2];
        for (i, v) in col.iter().enumerate() {
            loadings[i * 2] = *v;
        }
        let fm = FactorModel::new(n, 2, loadings, vec![1.0; n]).unwrap();
        let r = loadings_mean_inequality(&fm).unwrap();
        let sum_sq: f64 = col.iter().map(|v| v * v).sum();
        let mean: f64 = col.iter().sum::<f64>() / n as f64;
        assert_relative_eq!(r.lhs, sum_sq / (n as f64 * 2.0), max_relative = 1e-14);
        assert_relative_eq!(r.rhs, mean * mean / 2.0, max_relative = 1e-14);
        assert!(r.holds && r.lhs > r.rhs);
    }

    #[test]
    fn factor_model_validation() {
        assert!(FactorModel::new(3, 4, vec![0.0; 12], vec![1.0; 3]).is_err());
        assert!(FactorModel::new(3, 1, vec![0.0; 2], vec![1.0; 3]).is_err());
        assert!(FactorModel::new(3, 1, vec![0.0; 3], vec![-1.0, 1.0, 1.0]).is_err());
        let singular = FactorModel::new(2, 1, vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            singular.dense_covariance(),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn risk_partition_limits() {
        for (rho, expected) in [(0.25, 3.0), (0.5, 1.0), (0.75, 1.0 / 3.0)] {
            let p = risk_partition(1.0, rho, 10_000).unwrap();
            let ratio = p.ratio().unwrap();
            assert!((ratio / expected - 1.0).abs() < 0.01, "{rho}: {ratio}");
            assert_relative_eq!(
                asymptotic_risk_ratio(rho).unwrap(),
                expected,
                max_relative = 1e-15
            );
        }
        let p = risk_partition(0.3, 1.0, 50).unwrap();
        assert_eq!(p.v_r, 0.0);
        let p = risk_partition(2.0, 0.2, 10).unwrap();
        assert_relative_eq!(p.total(), 4.0 / 10.0, max_relative = 1e-14);
        assert_relative_eq!(p.v_s, 4.0 * 2.8 / 100.0, max_relative = 1e-14);
        assert_eq!(asymptotic_risk_ratio(0.0), None);
        assert_eq!(asymptotic_risk_ratio(-0.1), None);
    }
}
