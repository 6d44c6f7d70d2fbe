//! Deterministic synthetic session generator with planted preferences.
//!
//! Each session gets a planted simplex weight vector over the seven
//! dimensions. Raw scores are i.i.d. uniform cells, the true utility of a
//! document is the planted dot product with its normalized scores plus
//! bounded noise, SAT clicks go to the top documents by true utility, and
//! grades quantize the utility. The planted vectors are returned as a
//! ground-truth sidecar so experiments can check what capture recovered.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dimension::DIMENSION_COUNT;
use crate::error::{Error, Result};
use crate::scorers::DocumentRecord;
use crate::scores::{normalize_scores, ScoreMatrix};
use crate::session::{QueryRecord, SessionLog};

/// How per-session planted weights are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantedPreference {
    /// Every session uses this exact simplex vector.
    Fixed([f64; DIMENSION_COUNT]),
    /// Random per-session draw: uniform components raised to `sharpness`
    /// and renormalized. Sharpness 0 is flat; large values approach a
    /// one-hot preference.
    Concentrated { sharpness: f64 },
}

/// Generator parameters. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub sessions: usize,
    pub queries_per_session: (usize, usize),
    pub docs_per_query: (usize, usize),
    pub planted: PlantedPreference,
    /// Half-width of the uniform noise added to true utility, in [0, 1].
    pub click_noise: f64,
    /// Optional per-query perturbation: blend weight toward a fresh draw
    /// from the planted distribution (1.0 re-draws every query). Has no
    /// effect with a `Fixed` preference, whose draws are constant.
    pub drift: Option<f64>,
    /// SAT clicks per query (top documents by true utility), capped at the
    /// query's document count.
    pub sat_per_query: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 42,
            sessions: 50,
            queries_per_session: (3, 8),
            docs_per_query: (10, 20),
            planted: PlantedPreference::Concentrated { sharpness: 8.0 },
            click_noise: 0.05,
            drift: None,
            sat_per_query: 1,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.sessions == 0 {
            return Err(Error::config("sessions must be at least 1"));
        }
        for (name, (lo, hi)) in [
            ("queries_per_session", self.queries_per_session),
            ("docs_per_query", self.docs_per_query),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::config(format!(
                    "{name} range {lo}..={hi} is empty or starts at zero"
                )));
            }
        }
        match &self.planted {
            PlantedPreference::Fixed(w) => {
                if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::config("planted weights must be non-negative"));
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::config(format!(
                        "planted weights must sum to 1, got {sum}"
                    )));
                }
            }
            PlantedPreference::Concentrated { sharpness } => {
                if !sharpness.is_finite() || *sharpness < 0.0 {
                    return Err(Error::config("sharpness must be finite and non-negative"));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.click_noise) {
            return Err(Error::config("click_noise must lie in [0, 1]"));
        }
        if let Some(d) = self.drift {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::config("drift must lie in [0, 1]"));
            }
        }
        if self.sat_per_query == 0 {
            return Err(Error::config("sat_per_query must be at least 1"));
        }
        Ok(())
    }
}

/// A generated corpus plus the hidden truth behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub sessions: Vec<SessionLog>,
    /// session_id → the planted simplex weights behind that session.
    pub truth: BTreeMap<String, [f64; DIMENSION_COUNT]>,
}

impl SynthCorpus {
    /// Write the truth sidecar as a JSON object keyed by session id.
    pub fn write_truth(&self, mut writer: impl Write) -> Result<()> {
        serde_json::to_writer(&mut writer, &self.truth)
            .map_err(|e| Error::invalid(format!("serialize truth failed: {e}")))?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}

fn draw_preference(planted: &PlantedPreference, rng: &mut ChaCha12Rng) -> [f64; DIMENSION_COUNT] {
    match planted {
        PlantedPreference::Fixed(w) => *w,
        PlantedPreference::Concentrated { sharpness } => {
            let u: [f64; DIMENSION_COUNT] = std::array::from_fn(|_| rng.random::<f64>());
            let max = u.iter().fold(0.0f64, |a, &b| a.max(b));
            if max <= 0.0 {
                return [1.0 / DIMENSION_COUNT as f64; DIMENSION_COUNT];
            }
            // Dividing by the max before exponentiation pins the largest
            // component at 1, so the sum cannot underflow at high sharpness.
            let mut p = u.map(|v| (v / max).powf(*sharpness));
            let sum: f64 = p.iter().sum();
            for v in &mut p {
                *v /= sum;
            }
            p
        }
    }
}

fn range_sample(rng: &mut ChaCha12Rng, (lo, hi): (usize, usize)) -> usize {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Generate a corpus of pre-scored sessions. The same config (seed included)
/// always yields the identical corpus.
pub fn generate(config: &GeneratorConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut sessions = Vec::with_capacity(config.sessions);
    let mut truth = BTreeMap::new();

    for si in 0..config.sessions {
        let session_id = format!("s{:04}", si + 1);
        let base_weights = draw_preference(&config.planted, &mut rng);
        let n_queries = range_sample(&mut rng, config.queries_per_session);
        let mut queries = Vec::with_capacity(n_queries);

        for qi in 0..n_queries {
            let weights = match config.drift {
                Some(d) if d > 0.0 => {
                    let fresh = draw_preference(&config.planted, &mut rng);
                    std::array::from_fn(|j| (1.0 - d) * base_weights[j] + d * fresh[j])
                }
                _ => base_weights,
            };

            let query_id = format!("{session_id}-q{:02}", qi + 1);
            let n_docs = range_sample(&mut rng, config.docs_per_query);
            let doc_ids: Vec<String> = (0..n_docs).map(|i| format!("d{:02}", i + 1)).collect();
            let rows: Vec<[f64; DIMENSION_COUNT]> = (0..n_docs)
                .map(|_| std::array::from_fn(|_| rng.random::<f64>()))
                .collect();

            let matrix = ScoreMatrix::new(query_id.clone(), doc_ids.clone(), rows.clone())?;
            let norm = normalize_scores(&matrix);
            let utility: Vec<f64> = (0..n_docs)
                .map(|i| {
                    let noise = (rng.random::<f64>() * 2.0 - 1.0) * config.click_noise;
                    let row = norm.row(i);
                    let dot: f64 = (0..DIMENSION_COUNT).map(|j| weights[j] * row[j]).sum();
                    dot + noise
                })
                .collect();

            let mut by_utility: Vec<usize> = (0..n_docs).collect();
            by_utility.sort_by(|&a, &b| utility[b].total_cmp(&utility[a]).then(a.cmp(&b)));
            let sat_count = config.sat_per_query.min(n_docs);
            let sat_doc_ids = by_utility[..sat_count]
                .iter()
                .map(|&i| doc_ids[i].clone())
                .collect();

            let grades: BTreeMap<String, u32> = (0..n_docs)
                .map(|i| {
                    let clamped = utility[i].clamp(0.0, 1.0);
                    (doc_ids[i].clone(), ((clamped * 3.0).floor() as u32).min(2))
                })
                .collect();

            let docs = (0..n_docs)
                .map(|i| DocumentRecord {
                    doc_id: doc_ids[i].clone(),
                    url_host: format!("h{:02}.example", i % 7 + 1),
                    title: doc_ids[i].clone(),
                    body_text: String::new(),
                    length_tokens: 500,
                    sentence_avg_len: 15.0,
                    publish_rank: i as u64,
                })
                .collect();

            queries.push(QueryRecord {
                query_id,
                ts: qi as i64,
                query_text: format!("synthetic task {} step {}", si + 1, qi + 1),
                docs,
                scores: Some(rows),
                sat_doc_ids,
                grades: Some(grades),
            });
        }

        truth.insert(session_id.clone(), base_weights);
        sessions.push(SessionLog {
            session_id,
            queries,
            user_id: None,
        });
    }
    Ok(SynthCorpus { sessions, truth })
}
