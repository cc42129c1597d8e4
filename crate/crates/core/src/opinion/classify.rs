use std::fmt;

use serde::{Serialize, Serializer};

use super::EnsembleSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupLabel {
    /// Ends on this currency in every run at every grid point.
    Fixed(u8),
    Swing,
    NoData,
}

impl GroupLabel {
    pub fn name<'a>(&self, currencies: &'a [String]) -> &'a str {
        match self {
            GroupLabel::Fixed(k) => &currencies[*k as usize],
            GroupLabel::Swing => "swing",
            GroupLabel::NoData => "no_data",
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLabel::Fixed(k) => write!(f, "fixed-{k}"),
            GroupLabel::Swing => f.write_str("swing"),
            GroupLabel::NoData => f.write_str("no_data"),
        }
    }
}

impl Serialize for GroupLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Labels each country from ensembles run over an initial-fraction grid on
/// one scenario.
pub fn classify_groups(summaries: &[EnsembleSummary]) -> Result<Vec<GroupLabel>> {
    let first = summaries
        .first()
        .ok_or_else(|| Error::InconsistentSummaries("no summaries given".into()))?;
    for s in &summaries[1..] {
        if s.currencies != first.currencies {
            return Err(Error::InconsistentSummaries(format!(
                "currencies {:?} vs {:?}",
                s.currencies, first.currencies
            )));
        }
        if s.frozen != first.frozen || s.has_data != first.has_data {
            return Err(Error::InconsistentSummaries(
                "core groups or data masks differ".into(),
            ));
        }
    }

    let n = first.frozen.len();
    let k = first.currencies.len();
    Ok((0..n)
        .map(|c| {
            if !first.has_data[c] {
                return GroupLabel::NoData;
            }
            (0..k)
                .find(|&cur| summaries.iter().all(|s| s.final_counts[c][cur] == s.converged))
                .map_or(GroupLabel::Swing, |cur| GroupLabel::Fixed(cur as u8))
        })
        .collect())
}
