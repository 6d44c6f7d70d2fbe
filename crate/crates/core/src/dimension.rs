use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Number of relevance dimensions. Every per-dimension vector in the crate
/// has exactly this length.
pub const DIMENSION_COUNT: usize = 7;

/// The seven user-relevance dimensions.
///
/// Iteration and serialization order is the fixed alphabetical order below.
/// Every serialized 7-vector (score rows, weight vectors) follows this order,
/// which keeps file formats deterministic across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionId {
    Habit,
    Interest,
    Novelty,
    Reliability,
    Scope,
    Topicality,
    Understandability,
}

impl DimensionId {
    /// All dimensions in their fixed alphabetical order.
    pub const ALL: [DimensionId; DIMENSION_COUNT] = [
        DimensionId::Habit,
        DimensionId::Interest,
        DimensionId::Novelty,
        DimensionId::Reliability,
        DimensionId::Scope,
        DimensionId::Topicality,
        DimensionId::Understandability,
    ];

    /// Position of this dimension in [`DimensionId::ALL`], usable as a
    /// column index into any 7-wide row.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DimensionId::Habit => "habit",
            DimensionId::Interest => "interest",
            DimensionId::Novelty => "novelty",
            DimensionId::Reliability => "reliability",
            DimensionId::Scope => "scope",
            DimensionId::Topicality => "topicality",
            DimensionId::Understandability => "understandability",
        }
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DimensionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        DimensionId::ALL
            .into_iter()
            .find(|d| d.name() == lower)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown dimension '{s}' (expected one of: habit, interest, novelty, \
                     reliability, scope, topicality, understandability)"
                ))
            })
    }
}
