//! Query handling and the fused global rank.
//!
//! A query's candidate set is every object with positive text relevance.
//! Three per-candidate components are min-max normalized over that set and
//! combined linearly: text relevance, the owning network's partial rank
//! (itself min-max normalized per network first, so networks of different
//! sizes become comparable), and the interlink popularity factor.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{tokenize, Corpus, InvertedIndex, ObjectKind};
use crate::eval::tfidf_scores;
use crate::linkgraph::{normalize_ranks, NormScheme, RankVector};
use crate::matching::PopularityTable;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("query {0:?} normalizes to zero tokens")]
    EmptyQuery(String),
    #[error("invalid fusion params: {0}")]
    InvalidParams(String),
}

/// A normalized query. The id is a stable hash of the token list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub raw: String,
    pub terms: Vec<String>,
    pub id: String,
}

impl Query {
    pub fn parse(raw: &str) -> Result<Query, FusionError> {
        let terms = tokenize(raw);
        if terms.is_empty() {
            return Err(FusionError::EmptyQuery(raw.to_string()));
        }
        let id = format!("{:016x}", fnv1a64(&terms));
        Ok(Query { raw: raw.to_string(), terms, id })
    }
}

// FNV-1a, stable across platforms and runs.
fn fnv1a64(terms: &[String]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut byte = |b: u8| {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for (i, term) in terms.iter().enumerate() {
        if i > 0 {
            byte(0x1f);
        }
        for b in term.bytes() {
            byte(b);
        }
    }
    hash
}

/// Normalizes raw query texts and collapses duplicates (same token list,
/// order preserved), keeping the first occurrence order. An input that
/// normalizes to zero tokens is an error.
pub fn canonicalize_queries(raw: &[String]) -> Result<Vec<Query>, FusionError> {
    let mut seen = BTreeSet::new();
    let mut queries = Vec::new();
    for text in raw {
        let q = Query::parse(text)?;
        if seen.insert(q.terms.clone()) {
            queries.push(q);
        }
    }
    Ok(queries)
}

/// Component weights and result cutoff of the fused rank.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionParams {
    pub w_text: f64,
    pub w_rank: f64,
    pub w_pop: f64,
    /// Result list cutoff.
    pub k: usize,
    /// User objects are excluded from results unless set.
    pub include_users: bool,
}

impl Default for FusionParams {
    fn default() -> Self {
        FusionParams { w_text: 0.6, w_rank: 0.25, w_pop: 0.15, k: 20, include_users: false }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<(), FusionError> {
        for (name, w) in [("w_text", self.w_text), ("w_rank", self.w_rank), ("w_pop", self.w_pop)] {
            if !w.is_finite() || w < 0.0 {
                return Err(FusionError::InvalidParams(format!(
                    "{name} must be a non-negative finite number, got {w}"
                )));
            }
        }
        if self.w_text + self.w_rank + self.w_pop <= 0.0 {
            return Err(FusionError::InvalidParams("weights sum to zero".into()));
        }
        if self.k == 0 {
            return Err(FusionError::InvalidParams("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// One result row with its normalized component breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub object_id: String,
    pub fused: f64,
    pub text: f64,
    pub rank: f64,
    pub pop: f64,
}

/// A scored result ordering: sorted by fused score descending, ties broken
/// by ascending object id, at most `k` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
    /// Set when any contributing partial-rank vector did not converge.
    pub upstream_non_converged: bool,
}

impl RankedList {
    pub fn object_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.object_id.as_str()).collect()
    }
}

/// Per-network rank tables already normalized into [0, 1], plus the
/// convergence flag carried over from the power iteration.
#[derive(Debug, Clone)]
pub struct NormalizedRanks {
    by_network: BTreeMap<String, BTreeMap<String, f64>>,
    pub any_non_converged: bool,
}

impl NormalizedRanks {
    pub fn from_partial_ranks(partial_ranks: &BTreeMap<String, RankVector>) -> Self {
        let by_network = partial_ranks
            .iter()
            .map(|(net, vec)| (net.clone(), normalize_ranks(vec, NormScheme::MinMax)))
            .collect();
        let any_non_converged = partial_ranks.values().any(|v| !v.converged);
        NormalizedRanks { by_network, any_non_converged }
    }

    fn score(&self, network_id: &str, object_id: &str) -> f64 {
        self.by_network
            .get(network_id)
            .and_then(|m| m.get(object_id))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Computes the fused ranking for one query. Convenience wrapper that
/// normalizes the partial ranks on the fly; batch callers should prepare
/// [`NormalizedRanks`] once and use [`fused_rank_prepared`].
pub fn fused_rank(
    query: &Query,
    corpus: &Corpus,
    index: &InvertedIndex,
    partial_ranks: &BTreeMap<String, RankVector>,
    popularity: &PopularityTable,
    params: &FusionParams,
) -> RankedList {
    let ranks = NormalizedRanks::from_partial_ranks(partial_ranks);
    fused_rank_prepared(query, corpus, index, &ranks, popularity, params, None)
}

/// Fused ranking over a prepared rank table, optionally restricted to a
/// scope of candidate ids (used for per-network evaluation).
pub fn fused_rank_prepared(
    query: &Query,
    corpus: &Corpus,
    index: &InvertedIndex,
    ranks: &NormalizedRanks,
    popularity: &PopularityTable,
    params: &FusionParams,
    scope: Option<&BTreeSet<String>>,
) -> RankedList {
    let text_scores = tfidf_scores(query, index);
    let mut candidates: Vec<(&String, f64)> = Vec::with_capacity(text_scores.len());
    for (id, &text) in &text_scores {
        if let Some(allowed) = scope {
            if !allowed.contains(id) {
                continue;
            }
        }
        let Some(object) = corpus.objects.get(id) else { continue };
        if object.kind == ObjectKind::User && !params.include_users {
            continue;
        }
        candidates.push((id, text));
    }

    if candidates.is_empty() {
        return RankedList {
            query_id: query.id.clone(),
            entries: Vec::new(),
            upstream_non_converged: ranks.any_non_converged,
        };
    }

    let texts: Vec<f64> = candidates.iter().map(|(_, t)| *t).collect();
    let rank_vals: Vec<f64> = candidates
        .iter()
        .map(|(id, _)| {
            let net = &corpus.objects[id.as_str()].network_id;
            ranks.score(net, id)
        })
        .collect();
    let pops: Vec<f64> = candidates.iter().map(|(id, _)| popularity.score(id)).collect();

    let t_hat = min_max(&texts);
    let r_hat = min_max(&rank_vals);
    let p_hat = min_max(&pops);

    let mut entries: Vec<RankedEntry> = candidates
        .iter()
        .enumerate()
        .map(|(i, (id, _))| RankedEntry {
            object_id: (*id).clone(),
            fused: params.w_text * t_hat[i] + params.w_rank * r_hat[i] + params.w_pop * p_hat[i],
            text: t_hat[i],
            rank: r_hat[i],
            pop: p_hat[i],
        })
        .collect();

    entries.sort_by(|a, b| {
        b.fused
            .partial_cmp(&a.fused)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.object_id.cmp(&b.object_id))
    });
    entries.truncate(params.k);

    RankedList {
        query_id: query.id.clone(),
        entries,
        upstream_non_converged: ranks.any_non_converged,
    }
}

/// Min-max over one component of the candidate set; a constant component
/// maps to 0.5 everywhere.
fn min_max(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    values
        .iter()
        .map(|&v| if range > 0.0 { (v - min) / range } else { 0.5 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queries_collapse_after_normalization() {
        let raw = vec!["Hello World".to_string(), "hello  world".to_string()];
        let queries = canonicalize_queries(&raw).unwrap();
        assert_eq!(queries.len(), 1);
        assert_eq!(queries[0].terms, vec!["hello", "world"]);
    }

    #[test]
    fn token_order_distinguishes_queries() {
        let raw = vec!["a b".to_string(), "b a".to_string()];
        let queries = canonicalize_queries(&raw).unwrap();
        assert_eq!(queries.len(), 2);
        assert_ne!(queries[0].id, queries[1].id);
    }

    #[test]
    fn blank_query_is_an_error() {
        let raw = vec!["   ".to_string()];
        assert!(matches!(
            canonicalize_queries(&raw),
            Err(FusionError::EmptyQuery(_))
        ));
    }

    #[test]
    fn query_id_is_stable() {
        let a = Query::parse("Hello World").unwrap();
        let b = Query::parse("hello,world!").unwrap();
        assert_eq!(a.id, b.id);
        assert_eq!(a.id.len(), 16);
    }

    #[test]
    fn zero_weight_params_are_rejected() {
        let params = FusionParams { w_text: 0.0, w_rank: 0.0, w_pop: 0.0, ..Default::default() };
        assert!(params.validate().is_err());
        assert!(FusionParams::default().validate().is_ok());
    }

    #[test]
    fn min_max_handles_constant_components() {
        assert_eq!(min_max(&[2.0, 2.0, 2.0]), vec![0.5, 0.5, 0.5]);
        assert_eq!(min_max(&[1.0, 3.0]), vec![0.0, 1.0]);
    }
}
