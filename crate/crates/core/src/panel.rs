//! The `T x N` returns panel shared by the statistics and experiment code.

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Per-period simple returns, stored column-major (one contiguous series per
/// asset) with asset identifiers and period dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    asset_ids: Vec<String>,
    period_stamps: Vec<NaiveDate>,
    columns: Vec<f64>,
}

impl ReturnsPanel {
    /// `columns[i]` is the return series of `asset_ids[i]`, aligned with
    /// `period_stamps`.
    pub fn from_columns(
        asset_ids: Vec<String>,
        period_stamps: Vec<NaiveDate>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if asset_ids.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: asset_ids.len(),
                got: columns.len(),
            });
        }
        if asset_ids.is_empty() {
            return Err(Error::EmptyPanel("no assets".into()));
        }
        if period_stamps.is_empty() {
            return Err(Error::EmptyPanel("no periods".into()));
        }
        if period_stamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "period stamps must be strictly increasing".into(),
            ));
        }
        let t = period_stamps.len();
        let mut flat = Vec::with_capacity(t * columns.len());
        for (id, col) in asset_ids.iter().zip(&columns) {
            if col.len() != t {
                return Err(Error::DimensionMismatch {
                    expected: t,
                    got: col.len(),
                });
            }
            if let Some(bad) = col.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite return {bad} for asset {id}"
                )));
            }
            flat.extend_from_slice(col);
        }
        Ok(Self {
            asset_ids,
            period_stamps,
            columns: flat,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_periods(&self) -> usize {
        self.period_stamps.len()
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn period_stamps(&self) -> &[NaiveDate] {
        &self.period_stamps
    }

    pub fn column(&self, asset: usize) -> &[f64] {
        let t = self.n_periods();
        &self.columns[asset * t..(asset + 1) * t]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.columns.chunks_exact(self.n_periods())
    }

    /// Equal-weight portfolio return series over `members`: the arithmetic
    /// mean of member returns in each period.
    pub fn equal_weight_series(&self, members: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_periods()];
        for &m in members {
            for (a, r) in acc.iter_mut().zip(self.column(m)) {
                *a += r;
            }
        }
        let k = members.len() as f64;
        acc.iter_mut().for_each(|a| *a /= k);
        acc
    }
}
