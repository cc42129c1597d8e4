//! Reduced Google matrix of a country subset.
//!
//! With the subset `r` and its complement `s`, the effective transition
//! matrix between subset countries is the Schur complement
//!
//! ```text
//! G_R = G_rr + G_rs (1 - G_ss)^-1 G_sr
//! ```
//!
//! The inverse is split with the spectral projector `P = psi_R psi_L^T` of the
//! leading eigenvalue `lambda_c` of `G_ss` (right and left eigenvectors,
//! normalized so `psi_L . psi_R = 1`) and `Q = 1 - P`:
//!
//! ```text
//! G_pr = G_rs P G_sr / (1 - lambda_c)              rank one
//! G_qr = G_rs Q (sum_l (Q G_ss Q)^l) Q G_sr        may hold negative entries
//! ```
//!
//! `G_qr` is summed term by term until the largest term element drops below
//! [`SERIES_TOL`].

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::RankWeights;
use crate::google::{perron, GoogleMatrix};

pub const EIGEN_TOL: f64 = 1e-12;
pub const EIGEN_MAX_ITER: usize = 100_000;
pub const SERIES_TOL: f64 = 1e-14;
pub const SERIES_MAX_TERMS: usize = 10_000;

/// Component weights: element sums divided by the subset size, so that
/// `w_r = w_rr + w_pr + w_qr = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentWeights {
    pub w_r: f64,
    pub w_rr: f64,
    pub w_pr: f64,
    pub w_qr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGoogle {
    pub subset: Vec<usize>,
    pub g_r: DMatrix<f64>,
    pub g_rr: DMatrix<f64>,
    pub g_pr: DMatrix<f64>,
    pub g_qr: DMatrix<f64>,
    /// Leading eigenvalue of the scattering block; 0 when the subset is the
    /// whole network.
    pub lambda_c: f64,
    pub weights: ComponentWeights,
    pub neg_stat: f64,
    pub series_terms: usize,
}

fn submatrix(g: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])])
}

fn weight(m: &DMatrix<f64>) -> f64 {
    m.sum() / m.nrows() as f64
}

/// `(W+ - W-) / (W+ + W-)` with `W+` the mean of the positive elements and
/// `W-` the mean magnitude of the negative ones. Equals 1 without negatives.
pub fn negative_weight_stat(m: &DMatrix<f64>) -> f64 {
    let (mut pos_sum, mut pos_n, mut neg_sum, mut neg_n) = (0.0, 0usize, 0.0, 0usize);
    for &v in m.iter() {
        if v > 0.0 {
            pos_sum += v;
            pos_n += 1;
        } else if v < 0.0 {
            neg_sum -= v;
            neg_n += 1;
        }
    }
    if neg_n == 0 {
        return 1.0;
    }
    let w_neg = neg_sum / neg_n as f64;
    let w_pos = if pos_n == 0 { 0.0 } else { pos_sum / pos_n as f64 };
    (w_pos - w_neg) / (w_pos + w_neg)
}

pub fn reduce(g: &GoogleMatrix, subset: &[usize]) -> Result<ReducedGoogle> {
    let n = g.n();
    if subset.is_empty() {
        return Err(Error::InvalidSubset("subset is empty".into()));
    }
    let mut seen = HashSet::with_capacity(subset.len());
    for &i in subset {
        if i >= n {
            return Err(Error::InvalidSubset(format!("index {i} out of range for N = {n}")));
        }
        if !seen.insert(i) {
            return Err(Error::InvalidSubset(format!("index {i} listed twice")));
        }
    }
    let full = g.matrix();
    let nr = subset.len();
    let g_rr = submatrix(full, subset, subset);

    if nr == n {
        let zero = DMatrix::zeros(nr, nr);
        return Ok(assemble(subset.to_vec(), g_rr, zero.clone(), zero, 0.0, 0));
    }

    let scatter: Vec<usize> = (0..n).filter(|i| !seen.contains(i)).collect();
    let g_rs = submatrix(full, subset, &scatter);
    let g_sr = submatrix(full, &scatter, subset);
    let g_ss = submatrix(full, &scatter, &scatter);

    let (psi_r, lambda_c, _) = perron(&g_ss, EIGEN_TOL, EIGEN_MAX_ITER)?;
    let (psi_l, _, _) = perron(&g_ss.transpose(), EIGEN_TOL, EIGEN_MAX_ITER)?;
    let psi_l = &psi_l / psi_l.dot(&psi_r);

    // P G_sr = psi_R (psi_L^T G_sr)
    let left_sr = psi_l.transpose() * &g_sr;
    let g_pr = (&g_rs * &psi_r) * &left_sr / (1.0 - lambda_c);

    let project = |x: &DMatrix<f64>| -> DMatrix<f64> {
        let coeff = psi_l.transpose() * x;
        x - &psi_r * coeff
    };
    let mut term = project(&g_sr);
    let mut acc = term.clone();
    let mut terms = 1;
    loop {
        let size = term.amax();
        if size < SERIES_TOL {
            break;
        }
        if terms >= SERIES_MAX_TERMS {
            return Err(Error::SeriesDivergence {
                terms,
                residual: size,
            });
        }
        term = project(&(&g_ss * &term));
        acc += &term;
        terms += 1;
    }
    let g_qr = &g_rs * acc;

    Ok(assemble(subset.to_vec(), g_rr, g_pr, g_qr, lambda_c, terms))
}

fn assemble(
    subset: Vec<usize>,
    g_rr: DMatrix<f64>,
    g_pr: DMatrix<f64>,
    g_qr: DMatrix<f64>,
    lambda_c: f64,
    series_terms: usize,
) -> ReducedGoogle {
    let g_r = &g_rr + &g_pr + &g_qr;
    let weights = ComponentWeights {
        w_r: weight(&g_r),
        w_rr: weight(&g_rr),
        w_pr: weight(&g_pr),
        w_qr: weight(&g_qr),
    };
    let neg_stat = negative_weight_stat(&g_qr);
    ReducedGoogle {
        subset,
        g_r,
        g_rr,
        g_pr,
        g_qr,
        lambda_c,
        weights,
        neg_stat,
        series_terms,
    }
}

impl ReducedGoogle {
    pub fn len(&self) -> usize {
        self.subset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }

    /// Perron vector of `G_R`.
    pub fn reduced_pagerank(&self) -> Result<DVector<f64>> {
        perron(&self.g_r, EIGEN_TOL, EIGEN_MAX_ITER).map(|(v, _, _)| v)
    }

    /// Off-diagonal row sums of `G_R`: the total transfer towards each
    /// subset country from the other subset countries.
    pub fn incoming_totals(&self) -> Vec<f64> {
        self.g_r
            .row_iter()
            .enumerate()
            .map(|(i, row)| row.sum() - row[i])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedStats {
    pub lambda_c: f64,
    pub weights: ComponentWeights,
    pub neg_stat: f64,
    /// Incoming totals, aligned with the subset order.
    pub incoming: Vec<f64>,
    /// Positions within the subset, by descending `max(P_c, P*_c)`.
    pub order: Vec<usize>,
}

pub fn component_stats(r: &ReducedGoogle, rank_weights: &RankWeights) -> ReducedStats {
    let p: Vec<f64> = r.subset.iter().map(|&c| rank_weights.import_rank[c]).collect();
    let ps: Vec<f64> = r.subset.iter().map(|&c| rank_weights.export_rank[c]).collect();
    ReducedStats {
        lambda_c: r.lambda_c,
        weights: r.weights,
        neg_stat: r.neg_stat,
        incoming: r.incoming_totals(),
        order: crate::flow::order_by_max(&p, &ps),
    }
}
