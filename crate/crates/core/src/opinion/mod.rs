//! Asynchronous Monte Carlo dynamics of trade-currency preferences (TCP).
//!
//! Every country holds one currency label. Core-group countries are frozen on
//! their group's currency; the others are revisited in random order, one
//! sweep at a time, each adopting the currency favoured by its weighted trade
//! partners, until a full sweep changes nothing.
//!
//! Labels are indices into [`CoreGroupSpec::currencies`]. With two currencies,
//! index 0 is the "minus" currency (spin -1) and index 1 the "plus" currency
//! (spin +1); a zero score resolves to the plus currency.

mod classify;
mod dynamics;
mod ensemble;
mod score;

pub use classify::{classify_groups, GroupLabel};
pub use dynamics::{async_sweep, run_to_steady_state, SteadyState};
pub use ensemble::{
    run_ensemble, simulate_runs, summarize, Attractor, EnsembleConfig, EnsembleSummary,
    InitialDistribution, RunOutcome,
};
pub use score::{ScoringContext, WeightMode};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CountryRegistry;

/// Currencies and the frozen members of each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreGroupSpec {
    currencies: Vec<String>,
    members: Vec<Vec<usize>>,
}

impl CoreGroupSpec {
    pub fn new(currencies: Vec<String>, members: Vec<Vec<usize>>) -> Result<Self> {
        if currencies.len() < 2 {
            return Err(Error::CoreGroups(format!(
                "need at least 2 currencies, got {}",
                currencies.len()
            )));
        }
        if currencies.len() > u8::MAX as usize {
            return Err(Error::CoreGroups("too many currencies".into()));
        }
        if members.len() != currencies.len() {
            return Err(Error::CoreGroups(format!(
                "{} currencies but {} member lists",
                currencies.len(),
                members.len()
            )));
        }
        let names: HashSet<&String> = currencies.iter().collect();
        if names.len() != currencies.len() {
            return Err(Error::CoreGroups("duplicate currency label".into()));
        }
        let mut seen = HashSet::new();
        for (cur, group) in currencies.iter().zip(&members) {
            for &c in group {
                if !seen.insert(c) {
                    return Err(Error::CoreGroups(format!(
                        "country {c} appears in more than one core group (again under {cur})"
                    )));
                }
            }
        }
        Ok(Self {
            currencies,
            members,
        })
    }

    /// Builds the core groups from iso3 member lists, one per currency.
    pub fn from_iso3<S: AsRef<str>>(
        registry: &CountryRegistry,
        groups: &[(String, Vec<S>)],
    ) -> Result<Self> {
        let mut currencies = Vec::with_capacity(groups.len());
        let mut members = Vec::with_capacity(groups.len());
        for (cur, codes) in groups {
            currencies.push(cur.clone());
            members.push(registry.resolve_all(codes)?);
        }
        Self::new(currencies, members)
    }

    pub fn currencies(&self) -> &[String] {
        &self.currencies
    }

    pub fn members(&self, currency: usize) -> &[usize] {
        &self.members[currency]
    }

    pub fn n_currencies(&self) -> usize {
        self.currencies.len()
    }

    pub fn core_currency(&self, c: usize) -> Option<u8> {
        self.members
            .iter()
            .position(|g| g.contains(&c))
            .map(|k| k as u8)
    }

    pub fn core_size(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// Same groups with currency order reversed.
    pub fn reversed(&self) -> Self {
        let mut currencies = self.currencies.clone();
        let mut members = self.members.clone();
        currencies.reverse();
        members.reverse();
        Self {
            currencies,
            members,
        }
    }
}

/// One label per country plus the frozen mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpinionState {
    pub tcp: Vec<u8>,
    pub frozen: Vec<bool>,
    pub n_currencies: usize,
}

impl OpinionState {
    pub fn n(&self) -> usize {
        self.tcp.len()
    }

    /// Number of countries in `mask` holding `currency`.
    pub fn count(&self, currency: u8, mask: &[bool]) -> usize {
        self.tcp
            .iter()
            .zip(mask)
            .filter(|&(&t, &m)| m && t == currency)
            .count()
    }
}

/// A core group specification bound to a scoring context.
#[derive(Debug, Clone)]
pub struct OpinionModel {
    ctx: ScoringContext,
    core: CoreGroupSpec,
    frozen: Vec<bool>,
    free: Vec<usize>,
}

impl OpinionModel {
    pub fn new(ctx: ScoringContext, core: CoreGroupSpec) -> Result<Self> {
        let n = ctx.n();
        let mut frozen = vec![false; n];
        for k in 0..core.n_currencies() {
            for &c in core.members(k) {
                if c >= n {
                    return Err(Error::CoreGroups(format!("country index {c} out of range for N = {n}")));
                }
                frozen[c] = true;
            }
        }
        let free = (0..n).filter(|&c| !frozen[c] && ctx.has_data(c)).collect();
        Ok(Self {
            ctx,
            core,
            frozen,
            free,
        })
    }

    pub fn ctx(&self) -> &ScoringContext {
        &self.ctx
    }

    pub fn core(&self) -> &CoreGroupSpec {
        &self.core
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    /// Countries updated by the dynamics: not frozen and with trade data.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Countries counted in final fractions: those with trade data.
    pub fn counted(&self) -> &[bool] {
        self.ctx.data_mask()
    }

    /// A state with core members on their currency and every other country
    /// on `fill`.
    pub fn state_with(&self, fill: u8) -> OpinionState {
        let tcp = (0..self.n())
            .map(|c| self.core.core_currency(c).unwrap_or(fill))
            .collect();
        OpinionState {
            tcp,
            frozen: self.frozen.clone(),
            n_currencies: self.core.n_currencies(),
        }
    }

    /// A state from explicit labels for the free countries, in [`Self::free`]
    /// order.
    pub fn state_from_free(&self, labels: &[u8]) -> OpinionState {
        let mut s = self.state_with(0);
        for (&c, &l) in self.free.iter().zip(labels) {
            s.tcp[c] = l;
        }
        s
    }

    /// True when no free country would change under the update rule.
    pub fn is_fixed_point(&self, state: &OpinionState) -> bool {
        let mut sums = vec![0.0; self.core.n_currencies()];
        self.free
            .iter()
            .all(|&c| self.ctx.decide(c, &state.tcp, &mut sums) == state.tcp[c])
    }
}
