use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{OpinionModel, OpinionState};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// One asynchronous pass: every free country is visited once, in a fresh
/// uniformly random order, and updated in place before the next is scored.
/// Returns whether any label changed.
pub fn async_sweep<R: Rng + ?Sized>(model: &OpinionModel, state: &mut OpinionState, rng: &mut R) -> bool {
    let mut order = model.free().to_vec();
    order.shuffle(rng);
    let mut sums = vec![0.0; state.n_currencies];
    let mut changed = false;
    for c in order {
        let next = model.ctx().decide(c, &state.tcp, &mut sums);
        if next != state.tcp[c] {
            state.tcp[c] = next;
            changed = true;
        }
    }
    changed
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteadyState {
    pub state: OpinionState,
    /// Sweeps executed, including the final one that changed nothing.
    pub tau: usize,
}

fn fingerprint(state: &OpinionState) -> u64 {
    let mut h = DefaultHasher::new();
    state.tcp.hash(&mut h);
    h.finish()
}

/// Sweeps until a sweep leaves the state unchanged.
pub fn run_to_steady_state<R: Rng + ?Sized>(
    model: &OpinionModel,
    initial: OpinionState,
    max_sweeps: usize,
    rng: &mut R,
) -> Result<SteadyState> {
    if max_sweeps == 0 {
        return Err(Error::InvalidParameter("max_sweeps must be at least 1".into()));
    }
    let mut state = initial;
    let mut recent = Vec::with_capacity(8);
    for tau in 1..=max_sweeps {
        if !async_sweep(model, &mut state, rng) {
            return Ok(SteadyState { state, tau });
        }
        if recent.len() == 8 {
            recent.remove(0);
        }
        recent.push(fingerprint(&state));
    }
    Err(Error::SteadyStateNotReached {
        max_sweeps,
        fingerprints: recent,
    })
}
