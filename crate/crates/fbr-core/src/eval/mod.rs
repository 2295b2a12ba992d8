//! Ranking evaluation: the tf-idf baseline, graded relevance, DCG/NDCG,
//! and the two-method experiment runner.

mod experiment;

pub use experiment::{
    run_experiment, write_reports, ExperimentReport, Method, NdcgCurve, PerQueryRow, Pipeline,
    ScopeReport, EvalError,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::corpus::InvertedIndex;
use crate::fusion::{Query, RankedEntry, RankedList};

/// Relevance level on one judging axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Low,
    Medium,
    High,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::High => "high",
            Level::Medium => "medium",
            Level::Low => "low",
        };
        f.write_str(s)
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "high" => Ok(Level::High),
            "medium" => Ok(Level::Medium),
            "low" => Ok(Level::Low),
            other => Err(format!("unknown relevance level {other:?}")),
        }
    }
}

/// A graded relevance value drawn from {0, 2, 3, 5}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Grade(u8);

impl Grade {
    pub const ZERO: Grade = Grade(0);

    pub fn value(self) -> u8 {
        self.0
    }
}

/// The full grading matrix over (content relevance, interest relevance):
/// both high scores 5, one high one medium 3, both medium 2, and any low
/// on either axis 0.
pub fn grade_relevance(content: Level, interest: Level) -> Grade {
    match (content, interest) {
        (Level::High, Level::High) => Grade(5),
        (Level::High, Level::Medium) | (Level::Medium, Level::High) => Grade(3),
        (Level::Medium, Level::Medium) => Grade(2),
        (Level::Low, _) | (_, Level::Low) => Grade(0),
    }
}

/// `DCG_k = g_1 + sum_{i=2..k} g_i / log2(i)`. Lists shorter than `k` are
/// padded with grade 0; the first position is undiscounted and position 2
/// carries no discount either since log2(2) = 1.
pub fn dcg_at_k(grades: &[Grade], k: usize) -> f64 {
    let mut dcg = 0.0;
    for i in 1..=k {
        let g = grades.get(i - 1).map(|g| g.value() as f64).unwrap_or(0.0);
        if i == 1 {
            dcg += g;
        } else {
            dcg += g / (i as f64).log2();
        }
    }
    dcg
}

/// NDCG of `grades` against the ideal reordering of the same list. When the
/// ideal DCG is 0 (all grades zero) the value is 1 by convention.
pub fn ndcg_at_k(grades: &[Grade], k: usize) -> f64 {
    let mut ideal = grades.to_vec();
    ideal.sort_by(|a, b| b.cmp(a));
    ndcg_against_ideal(grades, &ideal, k)
}

/// NDCG of `grades` against an explicit ideal grade list (already sorted
/// descending). The experiment runner normalizes against the best ordering
/// of every judged object for the query, not only the returned ones.
pub fn ndcg_against_ideal(grades: &[Grade], ideal_desc: &[Grade], k: usize) -> f64 {
    let ideal = dcg_at_k(ideal_desc, k);
    if ideal == 0.0 {
        return 1.0;
    }
    dcg_at_k(grades, k) / ideal
}

/// Sum over query terms of `tf * idf` where `tf` is the raw occurrence
/// count across the indexed fields and `idf = ln((N + 1) / (df + 1)) + 1`.
/// Duplicate query terms contribute twice.
pub fn tfidf_score(query: &Query, object_id: &str, index: &InvertedIndex) -> f64 {
    let n = index.doc_count() as f64;
    query
        .terms
        .iter()
        .map(|term| {
            let tf = index.term_frequency(term, object_id) as f64;
            if tf == 0.0 {
                return 0.0;
            }
            let df = index.doc_freq(term) as f64;
            tf * (((n + 1.0) / (df + 1.0)).ln() + 1.0)
        })
        .sum()
}

/// tf-idf scores of every object matching at least one query term.
pub fn tfidf_scores(query: &Query, index: &InvertedIndex) -> BTreeMap<String, f64> {
    let n = index.doc_count() as f64;
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for term in &query.terms {
        let postings = index.postings(term);
        if postings.is_empty() {
            continue;
        }
        let df = index.doc_freq(term) as f64;
        let idf = ((n + 1.0) / (df + 1.0)).ln() + 1.0;
        for p in postings {
            *scores.entry(p.object_id.clone()).or_insert(0.0) += p.tf as f64 * idf;
        }
    }
    scores.retain(|_, s| *s > 0.0);
    scores
}

/// Top-k objects by tf-idf, ties broken by ascending object id. Only
/// objects with positive score appear.
pub fn baseline_rank(query: &Query, index: &InvertedIndex, k: usize) -> RankedList {
    baseline_rank_scoped(query, index, k, None)
}

/// Baseline restricted to a candidate scope (used for per-network runs and
/// for applying the same user-exclusion policy as the fused ranker).
pub fn baseline_rank_scoped(
    query: &Query,
    index: &InvertedIndex,
    k: usize,
    scope: Option<&BTreeSet<String>>,
) -> RankedList {
    let scores = tfidf_scores(query, index);
    let mut ranked: Vec<(String, f64)> = scores
        .into_iter()
        .filter(|(id, _)| scope.map(|s| s.contains(id)).unwrap_or(true))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(k);
    RankedList {
        query_id: query.id.clone(),
        entries: ranked
            .into_iter()
            .map(|(object_id, score)| RankedEntry {
                object_id,
                fused: score,
                text: score,
                rank: 0.0,
                pop: 0.0,
            })
            .collect(),
        upstream_non_converged: false,
    }
}

/// Relevance judgments keyed by (query id, object id). Pairs without a
/// judgment default to (low, low), i.e. grade 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Judgments {
    map: BTreeMap<String, BTreeMap<String, (Level, Level)>>,
    query_texts: BTreeMap<String, String>,
}

impl Judgments {
    pub fn new() -> Self {
        Judgments::default()
    }

    pub fn insert(&mut self, query: &Query, object_id: &str, content: Level, interest: Level) {
        self.map
            .entry(query.id.clone())
            .or_default()
            .insert(object_id.to_string(), (content, interest));
        self.query_texts.insert(query.id.clone(), query.raw.clone());
    }

    pub fn levels(&self, query_id: &str, object_id: &str) -> (Level, Level) {
        self.map
            .get(query_id)
            .and_then(|m| m.get(object_id))
            .copied()
            .unwrap_or((Level::Low, Level::Low))
    }

    pub fn grade(&self, query_id: &str, object_id: &str) -> Grade {
        let (content, interest) = self.levels(query_id, object_id);
        grade_relevance(content, interest)
    }

    /// Grades of every judged object for the query, sorted descending: the
    /// ideal ordering the runner normalizes against.
    pub fn ideal_grades(&self, query_id: &str) -> Vec<Grade> {
        let mut grades: Vec<Grade> = self
            .map
            .get(query_id)
            .map(|m| {
                m.values()
                    .map(|&(c, i)| grade_relevance(c, i))
                    .collect()
            })
            .unwrap_or_default();
        grades.sort_by(|a, b| b.cmp(a));
        grades
    }

    /// Ideal grades restricted to a candidate scope.
    pub fn ideal_grades_scoped(&self, query_id: &str, scope: &BTreeSet<String>) -> Vec<Grade> {
        let mut grades: Vec<Grade> = self
            .map
            .get(query_id)
            .map(|m| {
                m.iter()
                    .filter(|(id, _)| scope.contains(*id))
                    .map(|(_, &(c, i))| grade_relevance(c, i))
                    .collect()
            })
            .unwrap_or_default();
        grades.sort_by(|a, b| b.cmp(a));
        grades
    }

    pub fn judged_count(&self) -> usize {
        self.map.values().map(BTreeMap::len).sum()
    }

    pub fn query_count(&self) -> usize {
        self.map.len()
    }

    /// Tab-separated lines: query text, object id, content level, interest
    /// level. The query text is re-canonicalized on load.
    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Judgments, EvalError> {
        let text = fs::read_to_string(path).map_err(EvalError::Io)?;
        let mut judgments = Judgments::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(EvalError::MalformedJudgment {
                    line: idx + 1,
                    reason: format!("expected 4 tab-separated fields, got {}", fields.len()),
                });
            }
            let query = Query::parse(fields[0]).map_err(|e| EvalError::MalformedJudgment {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            let content = fields[2].parse().map_err(|e| EvalError::MalformedJudgment {
                line: idx + 1,
                reason: e,
            })?;
            let interest = fields[3].parse().map_err(|e| EvalError::MalformedJudgment {
                line: idx + 1,
                reason: e,
            })?;
            judgments.insert(&query, fields[1], content, interest);
        }
        Ok(judgments)
    }

    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<(), EvalError> {
        let mut out = String::new();
        for (query_id, objects) in &self.map {
            let text = self.query_texts.get(query_id).cloned().unwrap_or_default();
            for (object_id, (content, interest)) in objects {
                out.push_str(&format!("{text}\t{object_id}\t{content}\t{interest}\n"));
            }
        }
        fs::write(path, out).map_err(EvalError::Io)
    }
}
