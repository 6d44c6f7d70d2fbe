//! Session-aware multidimensional relevance capture and re-ranking.
//!
//! Users judge search results along more facets than topical match: the
//! seven dimensions modeled here are habit, interest, novelty, reliability,
//! scope, topicality and understandability. This crate captures how much a
//! user currently cares about each dimension from their satisfied clicks and
//! re-ranks later queries with those weights:
//!
//! 1. [`scorers`] produce a raw per-dimension score matrix for a query's
//!    documents (or pre-scored logs bypass them),
//! 2. [`scores::normalize_scores`] min-max normalizes each dimension,
//! 3. [`vector::build_document_vectors`] lifts each document onto the unit
//!    circle per dimension, and [`capture::capture_weights`] averages the
//!    squared projections of the SAT-clicked documents into a weight vector,
//! 4. [`rerank::weighted_rerank`] orders the next query's documents by the
//!    weighted combination of their normalized scores,
//! 5. [`replay`](mod@replay), [`eval`] and [`synth`] replay session logs under
//!    within-session or cross-session protocols, score strategies with NDCG
//!    and generate synthetic corpora with known planted preferences.

pub mod capture;
pub mod dimension;
pub mod error;
pub mod eval;
pub mod replay;
pub mod rerank;
pub mod scorers;
pub mod scores;
pub mod session;
pub mod synth;
pub mod vector;
pub mod weights;

pub use capture::{capture_weights, SatClickSet};
pub use dimension::{DimensionId, DIMENSION_COUNT};
pub use error::{Error, Result};
pub use eval::{evaluate_strategies, ndcg_at, Cutoff, EvalReport, RelevanceLabels};
pub use replay::{
    replay, replay_cross_session, replay_within_session, stability_analysis, Protocol,
    QueryRanking, RankMode, StabilityReport,
};
pub use rerank::{single_dimension_rerank, weighted_rerank, RankedDoc, RankedList};
pub use scores::{normalize_scores, NormalizedScores, ScoreMatrix};
pub use session::{
    read_sessions, read_sessions_from_path, resolve_sessions, write_sessions, QueryRecord,
    ResolvedQuery, ResolvedSession, SessionLog,
};
pub use vector::{build_document_vectors, DocumentVector};
pub use weights::{DimensionWeights, WeightProvenance};
