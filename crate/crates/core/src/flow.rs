//! Trade totals, share matrices and volume-based rank vectors.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ingest::CountryRegistry;

/// Column-sum tolerance for stochastic matrices and probability vectors.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Yearly money matrix; `M[c, c']` is the value imported by `c` from `c'`.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeMatrix {
    year: i32,
    values: DMatrix<f64>,
    registry: Arc<CountryRegistry>,
}

impl TradeMatrix {
    pub fn new(year: i32, values: DMatrix<f64>, registry: Arc<CountryRegistry>) -> Result<Self> {
        let n = registry.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "trade matrix is {}x{} but registry has {n} countries",
                values.nrows(),
                values.ncols()
            )));
        }
        for col in 0..n {
            for row in 0..n {
                let v = values[(row, col)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, col });
                }
                if v < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "negative trade value {v} at ({row}, {col})"
                    )));
                }
                if row == col && v != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "non-zero diagonal entry {v} at {row}"
                    )));
                }
            }
        }
        Ok(Self {
            year,
            values,
            registry,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn value(&self, importer: usize, exporter: usize) -> f64 {
        self.values[(importer, exporter)]
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn registry(&self) -> &Arc<CountryRegistry> {
        &self.registry
    }

    /// The same year with every flow reversed.
    pub fn transposed(&self) -> Self {
        Self {
            year: self.year,
            values: self.values.transpose(),
            registry: Arc::clone(&self.registry),
        }
    }

    /// True when the country imports or exports anything this year.
    pub fn has_data(&self, c: usize) -> bool {
        self.values.row(c).iter().any(|&v| v > 0.0) || self.values.column(c).iter().any(|&v| v > 0.0)
    }

    pub fn data_mask(&self) -> Vec<bool> {
        (0..self.n()).map(|c| self.has_data(c)).collect()
    }

    pub fn totals(&self) -> Totals {
        let imports: Vec<f64> = self.values.row_iter().map(|r| r.sum()).collect();
        let exports: Vec<f64> = self.values.column_iter().map(|c| c.sum()).collect();
        let total: f64 = imports.iter().sum();
        debug_assert!({
            let alt: f64 = exports.iter().sum();
            (total - alt).abs() <= 1e-9 * total.abs().max(f64::MIN_POSITIVE)
        });
        Totals {
            imports,
            exports,
            total,
        }
    }

    pub fn compute_shares(&self) -> ShareMatrices {
        let n = self.n();
        let Totals { imports, exports, .. } = self.totals();
        let mut s = DMatrix::zeros(n, n);
        let mut s_star = DMatrix::zeros(n, n);
        let s_dangling: Vec<bool> = exports.iter().map(|&e| e <= 0.0).collect();
        let s_star_dangling: Vec<bool> = imports.iter().map(|&i| i <= 0.0).collect();
        for cp in 0..n {
            if !s_dangling[cp] {
                for c in 0..n {
                    s[(c, cp)] = self.values[(c, cp)] / exports[cp];
                }
            }
            if !s_star_dangling[cp] {
                for c in 0..n {
                    s_star[(c, cp)] = self.values[(cp, c)] / imports[cp];
                }
            }
        }
        ShareMatrices {
            s,
            s_star,
            s_dangling,
            s_star_dangling,
        }
    }

    pub fn compute_rank_weights(&self) -> Result<RankWeights> {
        let Totals {
            imports,
            exports,
            total,
        } = self.totals();
        if total <= 0.0 {
            return Err(Error::EmptyTradeYear);
        }
        Ok(RankWeights {
            import_rank: DVector::from_iterator(imports.len(), imports.iter().map(|m| m / total)),
            export_rank: DVector::from_iterator(exports.len(), exports.iter().map(|m| m / total)),
        })
    }
}

/// Per-country import totals `M_c` (row sums), export totals `M*_c` (column
/// sums) and the world total.
#[derive(Debug, Clone, PartialEq)]
pub struct Totals {
    pub imports: Vec<f64>,
    pub exports: Vec<f64>,
    pub total: f64,
}

/// `S[c, c'] = M[c, c'] / M*_{c'}` and `S*[c, c'] = M[c', c] / M_{c'}`.
///
/// Columns whose divisor is zero stay all-zero and are flagged dangling; the
/// Google matrix construction completes them.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareMatrices {
    pub s: DMatrix<f64>,
    pub s_star: DMatrix<f64>,
    pub s_dangling: Vec<bool>,
    pub s_star_dangling: Vec<bool>,
}

impl ShareMatrices {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }
}

/// A pair of probability vectors over countries: ImportRank/ExportRank
/// (`P`, `P*`) from volumes, or PageRank/CheiRank when built from Google
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RankWeights {
    pub import_rank: DVector<f64>,
    pub export_rank: DVector<f64>,
}

impl RankWeights {
    /// Country indices sorted by descending `max(P_c, P*_c)`, ties by index.
    pub fn order_by_max(&self) -> Vec<usize> {
        order_by_max(self.import_rank.as_slice(), self.export_rank.as_slice())
    }
}

pub fn order_by_max(a: &[f64], b: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| {
        let ki = a[i].max(b[i]);
        let kj = a[j].max(b[j]);
        kj.total_cmp(&ki).then(i.cmp(&j))
    });
    idx
}
