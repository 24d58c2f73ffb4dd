//! Query-to-vendor semantic matching and vendor ranking.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::extraction::InstanceSet;
use crate::taxonomy::Taxonomy;
use crate::textcore::Stopwords;

pub const DEFAULT_R_THRESHOLD: f64 = 0.01;
pub const DEFAULT_FALLBACK_THRESHOLD: f64 = 0.009;
pub const DEFAULT_WUP_THRESHOLD: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdsError {
    #[error("{name} must be a finite number greater than 0, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("wup_threshold must not exceed 1, got {0}")]
    WupAboveOne(f64),
}

/// Extraction and matching cut-offs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    r_threshold: f64,
    fallback_threshold: f64,
    wup_threshold: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            r_threshold: DEFAULT_R_THRESHOLD,
            fallback_threshold: DEFAULT_FALLBACK_THRESHOLD,
            wup_threshold: DEFAULT_WUP_THRESHOLD,
        }
    }
}

impl Thresholds {
    pub fn new(
        r_threshold: f64,
        fallback_threshold: f64,
        wup_threshold: f64,
    ) -> Result<Self, ThresholdsError> {
        for (name, value) in [
            ("r_threshold", r_threshold),
            ("fallback_threshold", fallback_threshold),
            ("wup_threshold", wup_threshold),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ThresholdsError::NotPositive { name, value });
            }
        }
        if wup_threshold > 1.0 {
            return Err(ThresholdsError::WupAboveOne(wup_threshold));
        }
        Ok(Thresholds {
            r_threshold,
            fallback_threshold,
            wup_threshold,
        })
    }

    pub fn r_threshold(&self) -> f64 {
        self.r_threshold
    }

    pub fn fallback_threshold(&self) -> f64 {
        self.fallback_threshold
    }

    pub fn wup_threshold(&self) -> f64 {
        self.wup_threshold
    }

    pub fn with_r_threshold(self, r: f64) -> Result<Self, ThresholdsError> {
        Self::new(r, self.fallback_threshold, self.wup_threshold)
    }

    pub fn with_wup_threshold(self, wup: f64) -> Result<Self, ThresholdsError> {
        Self::new(self.r_threshold, self.fallback_threshold, wup)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchPair {
    pub query_phrase: String,
    pub vendor_phrase: String,
    pub score: f64,
    pub query_freq: u64,
    pub vendor_freq: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryCoverage {
    pub query_id: String,
    pub match_percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VendorResult {
    pub vendor_id: String,
    pub match_percentage: f64,
    pub pairs: Vec<MatchPair>,
    /// Coverage of each individual query, in ascending query id order.
    pub per_query: Vec<QueryCoverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    /// Sorted by percentage (descending), then vendor id.
    pub results: Vec<VendorResult>,
    /// `None` when no vendor matched anything.
    pub winner: Option<String>,
    pub thresholds: Thresholds,
}

/// Best vendor phrase for one query phrase.
#[derive(Debug, Clone)]
struct BestMatch<'a> {
    vendor_phrase: &'a str,
    score: f64,
    vendor_freq: u64,
}

/// Matching context: taxonomy, thresholds and the stopwords used when
/// splitting phrases into tokens.
#[derive(Debug, Clone)]
pub struct Matchmaker<'t> {
    pub taxonomy: &'t Taxonomy,
    pub thresholds: Thresholds,
    pub stopwords: Stopwords,
    pub execution: Execution,
}

impl<'t> Matchmaker<'t> {
    pub fn new(taxonomy: &'t Taxonomy, thresholds: Thresholds) -> Self {
        Matchmaker {
            taxonomy,
            thresholds,
            stopwords: Stopwords::default(),
            execution: Execution::default(),
        }
    }

    pub fn with_stopwords(mut self, stopwords: Stopwords) -> Self {
        self.stopwords = stopwords;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn best_match<'v>(&self, query_phrase: &str, vendor: &'v InstanceSet) -> Option<BestMatch<'v>> {
        let mut best: Option<BestMatch<'v>> = None;
        // vendor phrases iterate in ascending order; strict `>` keeps the
        // smallest phrase on ties
        for v in vendor.iter() {
            let score = self
                .taxonomy
                .phrase_score(query_phrase, &v.phrase, &self.stopwords)
                .value;
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(BestMatch {
                    vendor_phrase: &v.phrase,
                    score,
                    vendor_freq: v.frequency,
                });
            }
        }
        best.filter(|b| b.score >= self.thresholds.wup_threshold)
    }

    fn best_matches<'v>(
        &self,
        query: &InstanceSet,
        vendor: &'v InstanceSet,
    ) -> BTreeMap<String, BestMatch<'v>> {
        query
            .iter()
            .filter_map(|q| {
                self.best_match(&q.phrase, vendor)
                    .map(|b| (q.phrase.clone(), b))
            })
            .collect()
    }

    fn pairs_for(query: &InstanceSet, best: &BTreeMap<String, BestMatch<'_>>) -> Vec<MatchPair> {
        query
            .iter()
            .filter_map(|q| {
                best.get(&q.phrase).map(|b| MatchPair {
                    query_phrase: q.phrase.clone(),
                    vendor_phrase: b.vendor_phrase.to_string(),
                    score: b.score,
                    query_freq: q.frequency,
                    vendor_freq: b.vendor_freq,
                })
            })
            .collect()
    }

    /// At most one pair per query instance: its best-scoring vendor instance,
    /// kept when the score reaches the match threshold.
    pub fn semantic_match(&self, query: &InstanceSet, vendor: &InstanceSet) -> Vec<MatchPair> {
        let best = self.best_matches(query, vendor);
        Self::pairs_for(query, &best)
    }

    fn vendor_result(
        &self,
        pooled: &InstanceSet,
        queries: &BTreeMap<String, InstanceSet>,
        vendor: &InstanceSet,
    ) -> VendorResult {
        // the best vendor phrase of a query phrase does not depend on its
        // frequency, so pooled matches also serve each individual query
        let best = self.best_matches(pooled, vendor);
        let pairs = Self::pairs_for(pooled, &best);
        let per_query = queries
            .iter()
            .map(|(id, q)| QueryCoverage {
                query_id: id.clone(),
                match_percentage: match_percentage(q, &Self::pairs_for(q, &best)),
            })
            .collect();
        VendorResult {
            vendor_id: vendor.document_id.clone(),
            match_percentage: match_percentage(pooled, &pairs),
            pairs,
            per_query,
        }
    }

    /// Scores every vendor against the pooled queries and ranks them.
    pub fn rank_vendors(
        &self,
        queries: &BTreeMap<String, InstanceSet>,
        vendors: &BTreeMap<String, InstanceSet>,
    ) -> MatchReport {
        let pooled = InstanceSet::pooled("queries", queries.values());
        let vendor_sets: Vec<InstanceSet> = vendors
            .iter()
            .map(|(id, v)| InstanceSet {
                document_id: id.clone(),
                instances: v.instances.clone(),
            })
            .collect();
        let mut results = self
            .execution
            .map(&vendor_sets, |v| self.vendor_result(&pooled, queries, v));
        results.sort_by(|a, b| {
            b.match_percentage
                .total_cmp(&a.match_percentage)
                .then_with(|| a.vendor_id.cmp(&b.vendor_id))
        });
        let winner = results
            .first()
            .filter(|r| r.match_percentage > 0.0)
            .map(|r| r.vendor_id.clone());
        MatchReport {
            results,
            winner,
            thresholds: self.thresholds,
        }
    }
}

/// `100 * sum(query_freq * score over pairs) / sum(query_freq over all
/// query instances)`; zero for an empty query set.
pub fn match_percentage(query: &InstanceSet, pairs: &[MatchPair]) -> f64 {
    let total = query.total_frequency();
    if total == 0 {
        return 0.0;
    }
    let matched: f64 = pairs.iter().map(|p| p.query_freq as f64 * p.score).sum();
    (100.0 * matched / total as f64).clamp(0.0, 100.0)
}

/// [`Matchmaker::semantic_match`] with the default stopword list.
pub fn semantic_match(
    query: &InstanceSet,
    vendor: &InstanceSet,
    taxonomy: &Taxonomy,
    thresholds: Thresholds,
) -> Vec<MatchPair> {
    Matchmaker::new(taxonomy, thresholds).semantic_match(query, vendor)
}

/// [`Matchmaker::rank_vendors`] with the default stopword list.
pub fn rank_vendors(
    queries: &BTreeMap<String, InstanceSet>,
    vendors: &BTreeMap<String, InstanceSet>,
    taxonomy: &Taxonomy,
    thresholds: Thresholds,
) -> MatchReport {
    Matchmaker::new(taxonomy, thresholds).rank_vendors(queries, vendors)
}
