//! Currency-preference opinion dynamics on the world trade network.
//!
//! The pipeline runs from bilateral trade records to yearly money matrices
//! ([`ingest`]), share matrices and volume ranks ([`flow`]), Google matrices
//! with PageRank and CheiRank ([`google`]), reduced Google matrices of country
//! subsets ([`regomax`]), asynchronous Monte Carlo currency-preference
//! dynamics with frozen core groups ([`opinion`]) and scenario orchestration
//! with CSV/JSON outputs ([`report`]).

pub mod error;
pub mod flow;
pub mod google;
pub mod ingest;
pub mod opinion;
pub mod regomax;
pub mod report;

pub use error::{Error, Result};
pub use flow::{RankWeights, ShareMatrices, TradeMatrix};
pub use google::{Direction, GoogleMatrix, RankResult};
pub use ingest::{Category, CountryRegistry, ScalingSpec, TradeRecord};
pub use opinion::{CoreGroupSpec, EnsembleSummary, OpinionModel, OpinionState, WeightMode};
pub use regomax::ReducedGoogle;
