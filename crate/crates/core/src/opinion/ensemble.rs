//! Ensembles of independent runs from random initial labels.
//!
//! Run `k` of an ensemble with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` on stream `k`, so results do not depend on
//! how runs are scheduled across threads.
//!
//! Initial labels are drawn per free country from one uniform number, walking
//! the currencies in lexicographic order of their names. The draw therefore
//! depends on currency identity rather than list position: listing the same
//! two currencies in the opposite order, with `f_i` replaced by `1 - f_i`,
//! gives the same initial configuration.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dynamics::{run_to_steady_state, DEFAULT_MAX_SWEEPS};
use super::{OpinionModel, OpinionState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialDistribution {
    /// Two currencies: each free country starts on currency 0 with
    /// probability `f_i`, independently.
    Bernoulli { f_i: f64 },
    /// Any number of currencies, each equally likely.
    Uniform,
}

impl InitialDistribution {
    pub fn f_i(&self) -> Option<f64> {
        match self {
            InitialDistribution::Bernoulli { f_i } => Some(*f_i),
            InitialDistribution::Uniform => None,
        }
    }

    fn probabilities(&self, k: usize) -> Result<Vec<f64>> {
        match *self {
            InitialDistribution::Bernoulli { f_i } => {
                if k != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "Bernoulli initial fraction needs 2 currencies, got {k}"
                    )));
                }
                if !(0.0..=1.0).contains(&f_i) {
                    return Err(Error::InvalidParameter(format!("f_i = {f_i} outside [0, 1]")));
                }
                Ok(vec![f_i, 1.0 - f_i])
            }
            InitialDistribution::Uniform => Ok(vec![1.0 / k as f64; k]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_conf: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_conf: 10_000,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub initial: OpinionState,
    pub final_state: OpinionState,
    pub tau: usize,
}

/// One steady-state composition and how often it was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attractor {
    /// Counted countries holding each currency.
    pub counts: Vec<usize>,
    /// `counts / counted_countries`.
    pub fractions: Vec<f64>,
    /// Fraction holding currency 0.
    pub f_f: f64,
    pub runs: usize,
    /// Share of converged runs ending here.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub currencies: Vec<String>,
    pub initial: InitialDistribution,
    pub seed: u64,
    pub n_conf: usize,
    pub converged: usize,
    pub non_converged: usize,
    /// Denominator of all fractions: countries with trade data.
    pub counted_countries: usize,
    /// Sorted by `counts`.
    pub attractors: Vec<Attractor>,
    /// Mean sweeps to steady state over converged runs.
    pub mean_tau: f64,
    /// `final_counts[c][k]`: converged runs ending with country `c` on
    /// currency `k`.
    pub final_counts: Vec<Vec<usize>>,
    /// `final_counts / converged`.
    pub preference: Vec<Vec<f64>>,
    pub frozen: Vec<bool>,
    pub has_data: Vec<bool>,
}

impl EnsembleSummary {
    pub fn f_i(&self) -> Option<f64> {
        self.initial.f_i()
    }
}

fn draw_initial<R: Rng + ?Sized>(model: &OpinionModel, probs: &[f64], rng: &mut R) -> OpinionState {
    let names = model.core().currencies();
    let mut by_name: Vec<usize> = (0..names.len()).collect();
    by_name.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let last = *by_name.last().expect("at least two currencies");

    let mut state = model.state_with(0);
    for &c in model.free() {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut pick = last;
        for &k in &by_name {
            cumulative += probs[k];
            if u < cumulative {
                pick = k;
                break;
            }
        }
        state.tcp[c] = pick as u8;
    }
    state
}

/// Runs every configuration, in parallel, returning outcomes in run order.
pub fn simulate_runs(
    model: &OpinionModel,
    initial: InitialDistribution,
    cfg: &EnsembleConfig,
) -> Result<Vec<Result<RunOutcome>>> {
    if cfg.n_conf == 0 {
        return Err(Error::InvalidParameter("n_conf must be at least 1".into()));
    }
    let probs = initial.probabilities(model.core().n_currencies())?;
    Ok((0..cfg.n_conf)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(run as u64);
            let init = draw_initial(model, &probs, &mut rng);
            let steady = run_to_steady_state(model, init.clone(), cfg.max_sweeps, &mut rng)?;
            Ok(RunOutcome {
                initial: init,
                final_state: steady.state,
                tau: steady.tau,
            })
        })
        .collect())
}

/// Aggregates run outcomes; non-converged runs are counted and skipped.
pub fn summarize(
    model: &OpinionModel,
    initial: InitialDistribution,
    cfg: &EnsembleConfig,
    runs: &[Result<RunOutcome>],
) -> Result<EnsembleSummary> {
    let n = model.n();
    let k = model.core().n_currencies();
    let counted = model.counted();
    let counted_countries = counted.iter().filter(|&&b| b).count();

    let mut final_counts = vec![vec![0usize; k]; n];
    let mut clusters: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut tau_sum = 0usize;
    let mut converged = 0usize;
    for outcome in runs.iter().filter_map(|r| r.as_ref().ok()) {
        converged += 1;
        tau_sum += outcome.tau;
        for (c, &t) in outcome.final_state.tcp.iter().enumerate() {
            final_counts[c][t as usize] += 1;
        }
        let composition: Vec<usize> = (0..k)
            .map(|cur| outcome.final_state.count(cur as u8, counted))
            .collect();
        *clusters.entry(composition).or_insert(0) += 1;
    }
    if converged == 0 {
        return Err(Error::EnsembleFailed(runs.len()));
    }

    let denom = counted_countries.max(1) as f64;
    let attractors = clusters
        .into_iter()
        .map(|(counts, hits)| {
            let fractions: Vec<f64> = counts.iter().map(|&x| x as f64 / denom).collect();
            Attractor {
                f_f: fractions[0],
                fractions,
                counts,
                runs: hits,
                probability: hits as f64 / converged as f64,
            }
        })
        .collect();
    let preference = final_counts
        .iter()
        .map(|row| row.iter().map(|&x| x as f64 / converged as f64).collect())
        .collect();

    Ok(EnsembleSummary {
        currencies: model.core().currencies().to_vec(),
        initial,
        seed: cfg.seed,
        n_conf: runs.len(),
        converged,
        non_converged: runs.len() - converged,
        counted_countries,
        attractors,
        mean_tau: tau_sum as f64 / converged as f64,
        final_counts,
        preference,
        frozen: model.frozen().to_vec(),
        has_data: counted.to_vec(),
    })
}

pub fn run_ensemble(
    model: &OpinionModel,
    initial: InitialDistribution,
    cfg: &EnsembleConfig,
) -> Result<EnsembleSummary> {
    let runs = simulate_runs(model, initial, cfg)?;
    for err in runs.iter().filter_map(|r| r.as_ref().err()) {
        log::warn!("ensemble run did not converge: {err}");
    }
    summarize(model, initial, cfg, &runs)
}
