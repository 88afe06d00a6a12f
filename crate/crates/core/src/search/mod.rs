//! Branch-and-prune search for certified zeros and satisfying points.

mod engine;
mod formula;
mod square;

pub use formula::{solve_disjunct, solve_formula, solve_formula_text, CaseReport, DisjunctReport, SatReport, Witness};
pub use square::{solve_square, SolveReport};

use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::algebra::AlgebraError;
use crate::certify::Budget;
use crate::enclose::Dyadic;
use crate::formula::FormulaError;
use crate::reduce::ReduceError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Half-width of the search interval for coordinates without a texp
    /// guard.
    pub radius: Dyadic,
    pub max_depth: u32,
    pub precision: u32,
    pub precision_cap: u32,
    pub workers: usize,
    /// Seeds the jitter of witness-slice centers.
    pub seed: u64,
    /// Cap on the number of boxes processed per search.
    pub max_boxes: usize,
    /// Record wall-clock time in reports.
    pub timing: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            radius: Dyadic::from_i64(8),
            max_depth: 48,
            precision: 64,
            precision_cap: 4096,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            seed: 0,
            max_boxes: 20_000,
            timing: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        if !self.radius.is_positive() {
            return bad("radius must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.precision < 16 || self.precision_cap < self.precision {
            return bad("precision must be at least 16 and at most the cap");
        }
        if self.max_boxes == 0 {
            return bad("max_boxes must be at least 1");
        }
        Ok(())
    }

    pub(crate) fn budget(&self) -> Budget {
        Budget {
            max_iterations: 64,
            precision_start: self.precision,
            precision_cap: self.precision_cap,
        }
    }

    /// Echo for reports. The worker count is left out: reports must not
    /// depend on it.
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "radius": self.radius,
            "max_depth": self.max_depth,
            "precision": self.precision,
            "precision_cap": self.precision_cap,
            "seed": self.seed,
            "max_boxes": self.max_boxes,
        })
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool, SearchError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| SearchError::Config(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "REGION-UNSAT")]
    RegionUnsat,
    #[serde(rename = "UNKNOWN")]
    Unknown,
    /// Not searched because an earlier disjunct was satisfied.
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::RegionUnsat => "REGION-UNSAT",
            Status::Unknown => "UNKNOWN",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("region has dimension {found}, system has {expected} variables")]
    RegionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}
