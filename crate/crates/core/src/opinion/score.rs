use serde::{Deserialize, Serialize};

use super::OpinionState;
use crate::error::{Error, Result};
use crate::flow::{RankWeights, ShareMatrices, TradeMatrix};
use crate::google::pagerank_cheirank;

/// Economic weight attached to each trade partner in the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `(P + P*) / 2` from ImportRank and ExportRank.
    #[default]
    ImportExport,
    /// `(Psi + Psi*) / 2` from PageRank and CheiRank.
    PagerankCheirank,
    /// Constant 1.
    Uniform,
}

/// Precomputed partner couplings.
///
/// For a scored country `c`, partner `c'` contributes
/// `(S[c', c] + S*[c', c]) * w[c']`, where `w` depends on the [`WeightMode`].
/// Only non-zero couplings are stored, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringContext {
    n: usize,
    mode: WeightMode,
    row_start: Vec<usize>,
    partner: Vec<u32>,
    coupling: Vec<f64>,
    has_data: Vec<bool>,
}

impl ScoringContext {
    /// `weights` must match `mode`: volume ranks for `ImportExport`, PageRank
    /// and CheiRank for `PagerankCheirank`; ignored for `Uniform`.
    pub fn new(shares: &ShareMatrices, weights: &RankWeights, mode: WeightMode, has_data: Vec<bool>) -> Self {
        let n = shares.n();
        let w: Vec<f64> = (0..n)
            .map(|c| match mode {
                WeightMode::Uniform => 1.0,
                _ => (weights.import_rank[c] + weights.export_rank[c]) / 2.0,
            })
            .collect();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut partner = Vec::new();
        let mut coupling = Vec::new();
        for c in 0..n {
            row_start.push(partner.len());
            for cp in 0..n {
                if cp == c {
                    continue;
                }
                let j = (shares.s[(cp, c)] + shares.s_star[(cp, c)]) * w[cp];
                if j != 0.0 {
                    partner.push(cp as u32);
                    coupling.push(j);
                }
            }
        }
        row_start.push(partner.len());
        Self {
            n,
            mode,
            row_start,
            partner,
            coupling,
            has_data,
        }
    }

    /// Shares, weights for `mode` and the data mask, all from one matrix.
    pub fn from_trade(m: &TradeMatrix, mode: WeightMode, alpha: f64) -> Result<Self> {
        let shares = m.compute_shares();
        let weights = match mode {
            WeightMode::PagerankCheirank => pagerank_cheirank(&shares, alpha)?,
            _ => m.compute_rank_weights()?,
        };
        Ok(Self::new(&shares, &weights, mode, m.data_mask()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn has_data(&self, c: usize) -> bool {
        self.has_data[c]
    }

    pub fn data_mask(&self) -> &[bool] {
        &self.has_data
    }

    /// Coupling-weighted sum of partners per currency, written to `sums`.
    pub fn currency_sums(&self, c: usize, tcp: &[u8], sums: &mut [f64]) {
        sums.iter_mut().for_each(|s| *s = 0.0);
        let range = self.row_start[c]..self.row_start[c + 1];
        for (&p, &j) in self.partner[range.clone()].iter().zip(&self.coupling[range]) {
            sums[tcp[p as usize] as usize] += j;
        }
    }

    /// Two-currency score: positive favours currency 1, negative currency 0.
    pub fn tcp_score_two(&self, c: usize, state: &OpinionState) -> Result<f64> {
        if state.n_currencies != 2 {
            return Err(Error::NotTwoCurrency(state.n_currencies));
        }
        let mut sums = [0.0; 2];
        self.currency_sums(c, &state.tcp, &mut sums);
        Ok(sums[1] - sums[0])
    }

    /// Normalized per-currency scores, summing to one. `None` for a country
    /// without weighted trade ties.
    pub fn tcp_score_multi(&self, c: usize, state: &OpinionState) -> Option<Vec<f64>> {
        let mut sums = vec![0.0; state.n_currencies];
        self.currency_sums(c, &state.tcp, &mut sums);
        let total: f64 = sums.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(sums.into_iter().map(|s| s / total).collect())
    }

    /// The update rule. Two currencies: currency 1 iff its sum is at least the
    /// other's. More: the currency with the largest sum, keeping the current
    /// label on ties (and for isolated countries), else the lowest index.
    pub(crate) fn decide(&self, c: usize, tcp: &[u8], sums: &mut [f64]) -> u8 {
        self.currency_sums(c, tcp, sums);
        if sums.len() == 2 {
            return u8::from(sums[1] - sums[0] >= 0.0);
        }
        let current = tcp[c];
        let best = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if sums[current as usize] == best {
            return current;
        }
        sums.iter().position(|&s| s == best).unwrap_or(current as usize) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    use crate::ingest::CountryRegistry;

    fn matrix(values: DMatrix<f64>) -> TradeMatrix {
        let n = values.nrows();
        let reg = CountryRegistry::from_pairs((0..n).map(|i| (format!("K{i:02}"), format!("k{i}")))).unwrap();
        TradeMatrix::new(2015, values, Arc::new(reg)).unwrap()
    }

    fn state(tcp: Vec<u8>, k: usize) -> OpinionState {
        let n = tcp.len();
        OpinionState { tcp, frozen: vec![false; n], n_currencies: k }
    }

    fn star(n: usize) -> TradeMatrix {
        // country 0 trades symmetrically and equally with everyone else
        let mut m = DMatrix::zeros(n, n);
        for c in 1..n {
            m[(0, c)] = 1.0;
            m[(c, 0)] = 1.0;
        }
        matrix(m)
    }

    #[test]
    fn opposite_partners_cancel() {
        let ctx = ScoringContext::from_trade(&star(3), WeightMode::ImportExport, 0.85).unwrap();
        let z = ctx.tcp_score_two(0, &state(vec![1, 0, 1], 2)).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn unanimous_partners_give_positive_score() {
        for mode in [WeightMode::ImportExport, WeightMode::PagerankCheirank, WeightMode::Uniform] {
            let ctx = ScoringContext::from_trade(&star(4), mode, 0.85).unwrap();
            assert!(ctx.tcp_score_two(0, &state(vec![0, 1, 1, 1], 2)).unwrap() > 0.0);
        }
    }

    #[test]
    fn two_currency_score_rejects_three() {
        let ctx = ScoringContext::from_trade(&star(3), WeightMode::ImportExport, 0.85).unwrap();
        assert!(matches!(
            ctx.tcp_score_two(0, &state(vec![0, 1, 2], 3)),
            Err(Error::NotTwoCurrency(3))
        ));
    }

    #[test]
    fn multi_scores() {
        let ctx = ScoringContext::from_trade(&star(4), WeightMode::ImportExport, 0.85).unwrap();
        let z = ctx.tcp_score_multi(0, &state(vec![0, 1, 1, 1], 3)).unwrap();
        assert_eq!(z, vec![0.0, 1.0, 0.0]);
        let z = ctx.tcp_score_multi(0, &state(vec![0, 2, 2, 2], 3)).unwrap();
        assert_eq!(z, vec![0.0, 0.0, 1.0]);

        let ctx = ScoringContext::from_trade(&star(3), WeightMode::ImportExport, 0.85).unwrap();
        let z = ctx.tcp_score_multi(0, &state(vec![1, 0, 2], 3)).unwrap();
        assert_eq!(z, vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn isolated_country_has_no_multi_score() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 2.0;
        let ctx = ScoringContext::from_trade(&matrix(m), WeightMode::ImportExport, 0.85).unwrap();
        assert!(ctx.tcp_score_multi(2, &state(vec![0, 1, 2], 3)).is_none());
        assert!(!ctx.has_data(2));
        let mut sums = [0.0; 3];
        assert_eq!(ctx.decide(2, &[0, 1, 2], &mut sums), 2);
    }

    #[test]
    fn multi_rule_keeps_incumbent_on_tie() {
        let ctx = ScoringContext::from_trade(&star(3), WeightMode::ImportExport, 0.85).unwrap();
        let mut sums = [0.0; 3];
        // partners hold 1 and 2 with equal weight
        assert_eq!(ctx.decide(0, &[2, 1, 2], &mut sums), 2);
        assert_eq!(ctx.decide(0, &[1, 1, 2], &mut sums), 1);
        assert_eq!(ctx.decide(0, &[0, 1, 2], &mut sums), 1);
    }

    #[test]
    fn two_currency_zero_score_goes_plus() {
        let ctx = ScoringContext::from_trade(&star(3), WeightMode::Uniform, 0.85).unwrap();
        let mut sums = [0.0; 2];
        assert_eq!(ctx.decide(0, &[0, 0, 1], &mut sums), 1);
    }
}
