//! Google matrices `G` (trade flows) and `G*` (inverted flows) and their
//! Perron vectors, PageRank and CheiRank.
//!
//! Columns of the share matrix that are all zero (a country that exports
//! nothing, or imports nothing for `G*`) are replaced by the uniform column
//! `1/N` before damping, so `G[c, c'] = alpha * S[c, c'] + (1 - alpha) / N` is
//! column-stochastic for every input.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{RankWeights, ShareMatrices};

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `G`, built from import shares `S`; its Perron vector is PageRank.
    Imports,
    /// `G*`, built from export shares `S*`; its Perron vector is CheiRank.
    Exports,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoogleMatrix {
    matrix: DMatrix<f64>,
    alpha: f64,
    direction: Direction,
}

impl GoogleMatrix {
    pub fn build(shares: &ShareMatrices, alpha: f64, direction: Direction) -> Result<Self> {
        let (s, dangling) = match direction {
            Direction::Imports => (&shares.s, &shares.s_dangling),
            Direction::Exports => (&shares.s_star, &shares.s_star_dangling),
        };
        Self::from_stochastic(s, dangling, alpha, direction)
    }

    /// Damps an arbitrary column-substochastic matrix whose zero columns are
    /// listed in `dangling`.
    pub fn from_stochastic(
        s: &DMatrix<f64>,
        dangling: &[bool],
        alpha: f64,
        direction: Direction,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let n = s.nrows();
        let teleport = (1.0 - alpha) / n as f64;
        let uniform = 1.0 / n as f64;
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            if dangling[c] {
                alpha * uniform + teleport
            } else {
                alpha * s[(r, c)] + teleport
            }
        });
        Ok(Self {
            matrix,
            alpha,
            direction,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Power iteration from the uniform vector, stopping when the L1 change
    /// between successive iterates is at most `tol`.
    pub fn power_iterate(&self, tol: f64, max_iter: usize) -> Result<RankResult> {
        if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "power iteration needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
            )));
        }
        let n = self.n();
        let mut v = DVector::from_element(n, 1.0 / n as f64);
        let mut history = Vec::new();
        for it in 1..=max_iter {
            let mut next = &self.matrix * &v;
            let sum = next.sum();
            next /= sum;
            let residual: f64 = next.iter().zip(v.iter()).map(|(a, b)| (a - b).abs()).sum();
            history.push(residual);
            v = next;
            if residual <= tol {
                return Ok(RankResult {
                    vector: v,
                    iterations: it,
                    residual,
                    history,
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: *history.last().unwrap_or(&f64::NAN),
        })
    }

    pub fn rank(&self) -> Result<RankResult> {
        self.power_iterate(DEFAULT_TOL, DEFAULT_MAX_ITER)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub vector: DVector<f64>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub residual: f64,
    /// L1 change of every iteration, in order.
    pub history: Vec<f64>,
}

/// PageRank and CheiRank with default tolerance, packaged as rank weights.
pub fn pagerank_cheirank(shares: &ShareMatrices, alpha: f64) -> Result<RankWeights> {
    let pagerank = GoogleMatrix::build(shares, alpha, Direction::Imports)?.rank()?;
    let cheirank = GoogleMatrix::build(shares, alpha, Direction::Exports)?.rank()?;
    Ok(RankWeights {
        import_rank: pagerank.vector,
        export_rank: cheirank.vector,
    })
}

/// Leading (Perron) eigenpair of a non-negative matrix by power iteration
/// from the uniform vector. The vector is L1-normalized; the eigenvalue is
/// the L1 norm of `A x` at convergence.
pub fn perron(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<(DVector<f64>, f64, usize)> {
    let n = a.nrows();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let y = a * &x;
        let lambda = y.sum();
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::InvalidParameter(
                "matrix annihilates the uniform vector; no Perron vector".into(),
            ));
        }
        let y = y / lambda;
        residual = y.iter().zip(x.iter()).map(|(p, q)| (p - q).abs()).sum();
        x = y;
        if residual <= tol {
            return Ok((x, lambda, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::STOCHASTIC_TOL;

    fn uniform_shares(n: usize) -> ShareMatrices {
        let s = DMatrix::from_fn(n, n, |r, c| if r == c { 0.0 } else { 1.0 / (n - 1) as f64 });
        ShareMatrices {
            s: s.clone(),
            s_star: s,
            s_dangling: vec![false; n],
            s_star_dangling: vec![false; n],
        }
    }

    #[test]
    fn uniform_google_entries() {
        let g = GoogleMatrix::build(&uniform_shares(4), 0.85, Direction::Imports).unwrap();
        let off = 0.85 / 3.0 + 0.15 / 4.0;
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 0.0375 } else { off };
                assert!((g.matrix()[(r, c)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dangling_column_becomes_uniform() {
        let mut sh = uniform_shares(4);
        sh.s.column_mut(2).fill(0.0);
        sh.s_dangling[2] = true;
        let g = GoogleMatrix::build(&sh, 0.85, Direction::Imports).unwrap();
        for r in 0..4 {
            assert!((g.matrix()[(r, 2)] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn near_one_alpha_stays_stochastic() {
        // two disconnected pairs
        let mut s = DMatrix::zeros(4, 4);
        s[(0, 1)] = 1.0;
        s[(1, 0)] = 1.0;
        s[(2, 3)] = 1.0;
        s[(3, 2)] = 1.0;
        let g = GoogleMatrix::from_stochastic(&s, &[false; 4], 0.999999, Direction::Imports).unwrap();
        for col in g.matrix().column_iter() {
            assert!((col.sum() - 1.0).abs() < STOCHASTIC_TOL);
        }
    }

    #[test]
    fn alpha_bounds() {
        for a in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                GoogleMatrix::build(&uniform_shares(3), a, Direction::Imports),
                Err(Error::InvalidAlpha(_))
            ));
        }
    }

    #[test]
    fn symmetric_fixed_points() {
        let r = GoogleMatrix::build(&uniform_shares(4), 0.85, Direction::Imports)
            .unwrap()
            .rank()
            .unwrap();
        assert!(r.vector.iter().all(|&p| (p - 0.25).abs() < 1e-15));

        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = GoogleMatrix::from_stochastic(&s, &[false; 2], 0.85, Direction::Imports)
            .unwrap()
            .rank()
            .unwrap();
        assert!(r.vector.iter().all(|&p| (p - 0.5).abs() < 1e-15));
    }

    #[test]
    fn reports_non_convergence() {
        let mut s = DMatrix::zeros(3, 3);
        s[(1, 0)] = 1.0;
        s[(2, 1)] = 1.0;
        s[(0, 2)] = 0.5;
        s[(1, 2)] = 0.5;
        let g = GoogleMatrix::from_stochastic(&s, &[false; 3], 0.85, Direction::Imports).unwrap();
        assert!(matches!(g.power_iterate(1e-300, 2), Err(Error::NoConvergence { iterations: 2, .. })));
        assert!(g.power_iterate(0.0, 10).is_err());
    }
}
