//! End-to-end comparison of the fused ranker against the tf-idf baseline.
//!
//! The pipeline builds every query-independent artifact once (index,
//! per-network partial ranks, validated interlinks, popularity table), then
//! ranks each query with both methods over identical candidate scopes and
//! averages NDCG per position. Besides the overall curves it emits one
//! breakdown per network, ranking within that network's members only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{build_inverted_index, Corpus, InterLink, InvertedIndex, ObjectKind};
use crate::fusion::{
    fused_rank_prepared, FusionError, FusionParams, NormalizedRanks, Query, RankedList,
};
use crate::linkgraph::{build_intra_graph, partial_rank, RankParams, RankVector};
use crate::matching::{
    build_inheritance_graph, validate_interlinks, DomainProfile, MatchingError, PopularityTable,
};

use super::{baseline_rank_scoped, Grade, Judgments};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("judgments file line {line}: {reason}")]
    MalformedJudgment { line: usize, reason: String },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("report file {path}: {reason}")]
    MalformedReport { path: String, reason: String },
}

/// The two compared ranking methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Tfidf,
    Fbr,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Tfidf, Method::Fbr];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Tfidf => f.write_str("tfidf"),
            Method::Fbr => f.write_str("fbr"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tfidf" => Ok(Method::Tfidf),
            "fbr" => Ok(Method::Fbr),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Mean NDCG at positions 1..k for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct NdcgCurve {
    pub method: Method,
    /// `values[i]` is the mean NDCG at position `i + 1`.
    pub values: Vec<f64>,
}

impl NdcgCurve {
    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// Curves for one candidate scope ("overall" or a network id).
#[derive(Debug, Clone, PartialEq)]
pub struct ScopeReport {
    pub scope: String,
    pub n_queries: usize,
    pub curves: Vec<NdcgCurve>,
}

impl ScopeReport {
    pub fn curve(&self, method: Method) -> &NdcgCurve {
        self.curves
            .iter()
            .find(|c| c.method == method)
            .expect("both methods are always evaluated")
    }
}

/// NDCG per query, method and scope (full 1..k vector).
#[derive(Debug, Clone, PartialEq)]
pub struct PerQueryRow {
    pub scope: String,
    pub query_id: String,
    pub query_text: String,
    pub method: Method,
    pub ndcg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub k: usize,
    pub scopes: Vec<ScopeReport>,
    pub per_query: Vec<PerQueryRow>,
}

impl ExperimentReport {
    pub fn scope(&self, name: &str) -> Option<&ScopeReport> {
        self.scopes.iter().find(|s| s.scope == name)
    }

    pub fn overall(&self) -> &ScopeReport {
        self.scope("overall").expect("overall scope always present")
    }
}

/// Query-independent ranking state shared by every query.
pub struct Pipeline<'a> {
    pub corpus: &'a Corpus,
    pub index: InvertedIndex,
    pub partial_ranks: BTreeMap<String, RankVector>,
    pub normalized_ranks: NormalizedRanks,
    pub validated_links: Vec<InterLink>,
    pub popularity: PopularityTable,
    pub fusion_params: FusionParams,
}

impl<'a> Pipeline<'a> {
    pub fn build(
        corpus: &'a Corpus,
        profile: &DomainProfile,
        rank_params: &RankParams,
        fusion_params: FusionParams,
    ) -> Result<Pipeline<'a>, EvalError> {
        profile.validate()?;
        fusion_params.validate()?;
        let index = build_inverted_index(corpus);
        let mut partial_ranks = BTreeMap::new();
        for (network_id, network) in &corpus.networks {
            let graph = build_intra_graph(network);
            let likes = corpus.likes_of_network(network_id);
            let ranks = partial_rank(&graph, &likes, rank_params);
            if !ranks.converged {
                log::warn!("partial rank of network {network_id} did not converge");
            }
            partial_ranks.insert(network_id.clone(), ranks);
        }
        let normalized_ranks = NormalizedRanks::from_partial_ranks(&partial_ranks);
        let ig = build_inheritance_graph(corpus, profile);
        let validated_links = validate_interlinks(corpus, &ig);
        let popularity = PopularityTable::compute(&validated_links, profile)?;
        Ok(Pipeline {
            corpus,
            index,
            partial_ranks,
            normalized_ranks,
            validated_links,
            popularity,
            fusion_params,
        })
    }

    /// Candidate scope of one network: its member objects, with users
    /// removed unless the fusion params include them.
    pub fn network_scope(&self, network_id: &str) -> BTreeSet<String> {
        let Some(network) = self.corpus.networks.get(network_id) else {
            return BTreeSet::new();
        };
        network
            .object_ids
            .iter()
            .filter(|id| self.is_candidate(id))
            .cloned()
            .collect()
    }

    /// Corpus-wide candidate scope under the user-exclusion policy.
    pub fn overall_scope(&self) -> BTreeSet<String> {
        self.corpus
            .objects
            .keys()
            .filter(|id| self.is_candidate(id))
            .cloned()
            .collect()
    }

    fn is_candidate(&self, id: &str) -> bool {
        self.fusion_params.include_users
            || self
                .corpus
                .objects
                .get(id)
                .map(|o| o.kind != ObjectKind::User)
                .unwrap_or(false)
    }

    /// Ranks one query with the given method over a candidate scope. Both
    /// methods see exactly the same scope.
    pub fn rank(&self, method: Method, query: &Query, scope: &BTreeSet<String>) -> RankedList {
        match method {
            Method::Tfidf => {
                baseline_rank_scoped(query, &self.index, self.fusion_params.k, Some(scope))
            }
            Method::Fbr => fused_rank_prepared(
                query,
                self.corpus,
                &self.index,
                &self.normalized_ranks,
                &self.popularity,
                &self.fusion_params,
                Some(scope),
            ),
        }
    }
}

/// Runs both methods over every query and averages NDCG per position, for
/// the overall scope and one breakdown per network.
pub fn run_experiment(
    corpus: &Corpus,
    profile: &DomainProfile,
    queries: &[Query],
    judgments: &Judgments,
    rank_params: &RankParams,
    fusion_params: FusionParams,
    k: usize,
) -> Result<ExperimentReport, EvalError> {
    let fusion_params = FusionParams { k, ..fusion_params };
    let pipeline = Pipeline::build(corpus, profile, rank_params, fusion_params)?;

    let mut scopes: Vec<(String, BTreeSet<String>)> =
        vec![("overall".to_string(), pipeline.overall_scope())];
    for network_id in corpus.networks.keys() {
        scopes.push((network_id.clone(), pipeline.network_scope(network_id)));
    }

    let mut scope_reports = Vec::new();
    let mut per_query = Vec::new();

    for (scope_name, scope) in &scopes {
        let mut sums: BTreeMap<Method, Vec<f64>> = Method::ALL
            .iter()
            .map(|&m| (m, vec![0.0; k]))
            .collect();
        for query in queries {
            let ideal = judgments.ideal_grades_scoped(&query.id, scope);
            for method in Method::ALL {
                let list = pipeline.rank(method, query, scope);
                let grades: Vec<Grade> = list
                    .entries
                    .iter()
                    .map(|e| judgments.grade(&query.id, &e.object_id))
                    .collect();
                let ndcg: Vec<f64> = (1..=k)
                    .map(|pos| super::ndcg_against_ideal(&grades, &ideal, pos))
                    .collect();
                let sum = sums.get_mut(&method).expect("method preseeded");
                for (acc, v) in sum.iter_mut().zip(ndcg.iter()) {
                    *acc += v;
                }
                per_query.push(PerQueryRow {
                    scope: scope_name.clone(),
                    query_id: query.id.clone(),
                    query_text: query.raw.clone(),
                    method,
                    ndcg,
                });
            }
        }
        let n = queries.len();
        let curves = Method::ALL
            .iter()
            .map(|&method| NdcgCurve {
                method,
                values: sums[&method]
                    .iter()
                    .map(|s| if n > 0 { s / n as f64 } else { 0.0 })
                    .collect(),
            })
            .collect();
        scope_reports.push(ScopeReport {
            scope: scope_name.clone(),
            n_queries: n,
            curves,
        });
    }

    Ok(ExperimentReport { k, scopes: scope_reports, per_query })
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn summary_file_name(scope: &str) -> String {
    if scope == "overall" {
        "summary.csv".to_string()
    } else {
        format!("summary_net_{scope}.csv")
    }
}

/// Writes the summary CSV (method,k,mean_ndcg,n_queries), one per scope,
/// plus the per-query detail CSV. Existing files are overwritten.
pub fn write_reports(report: &ExperimentReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, EvalError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    for scope in &report.scopes {
        let mut csv = String::from("method,k,mean_ndcg,n_queries\n");
        for curve in &scope.curves {
            for (i, value) in curve.values.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{:.6},{}\n",
                    curve.method,
                    i + 1,
                    value,
                    scope.n_queries
                ));
            }
        }
        let path = out_dir.join(summary_file_name(&scope.scope));
        fs::write(&path, csv)?;
        written.push(path);
    }

    let mut csv = String::from("scope,query_id,query,method,k,ndcg\n");
    for row in &report.per_query {
        for (i, value) in row.ndcg.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{},{:.6}\n",
                csv_escape(&row.scope),
                row.query_id,
                csv_escape(&row.query_text),
                row.method,
                i + 1,
                value
            ));
        }
    }
    let path = out_dir.join("per_query.csv");
    fs::write(&path, csv)?;
    written.push(path);

    Ok(written)
}

/// Reads the summary CSVs back from a report directory and renders a
/// plain-text comparison table.
pub fn render_comparison(out_dir: impl AsRef<Path>) -> Result<String, EvalError> {
    let out_dir = out_dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(out_dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n == "summary.csv" || (n.starts_with("summary_net_") && n.ends_with(".csv")))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(EvalError::MalformedReport {
            path: out_dir.display().to_string(),
            reason: "no summary CSV found".into(),
        });
    }

    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>4} {:>10} {:>10} {:>10}\n",
        "scope", "k", "tfidf", "fbr", "gap"
    ));
    for path in paths {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let scope = if name == "summary.csv" {
            "overall".to_string()
        } else {
            name.trim_start_matches("summary_net_")
                .trim_end_matches(".csv")
                .to_string()
        };
        let text = fs::read_to_string(&path)?;
        let mut values: BTreeMap<(String, usize), f64> = BTreeMap::new();
        let mut max_k = 0usize;
        for (idx, line) in text.lines().enumerate() {
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let malformed = |reason: String| EvalError::MalformedReport {
                path: path.display().to_string(),
                reason,
            };
            if fields.len() != 4 {
                return Err(malformed(format!("line {}: expected 4 columns", idx + 1)));
            }
            let k: usize = fields[1]
                .parse()
                .map_err(|e| malformed(format!("line {}: bad k: {e}", idx + 1)))?;
            let v: f64 = fields[2]
                .parse()
                .map_err(|e| malformed(format!("line {}: bad mean_ndcg: {e}", idx + 1)))?;
            values.insert((fields[0].to_string(), k), v);
            max_k = max_k.max(k);
        }
        for k in [1usize, 5, 10, 15, 20] {
            if k > max_k {
                continue;
            }
            let tfidf = values.get(&("tfidf".to_string(), k)).copied();
            let fbr = values.get(&("fbr".to_string(), k)).copied();
            if let (Some(t), Some(f)) = (tfidf, fbr) {
                out.push_str(&format!(
                    "{:<24} {:>4} {:>10.4} {:>10.4} {:>+10.4}\n",
                    scope,
                    k,
                    t,
                    f,
                    f - t
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IntraEdge, RelationKind, SocialNetwork, WebObject};
    use crate::eval::Level;

    fn fixture_corpus() -> Corpus {
        let mut corpus = Corpus::new();
        corpus.add_network(SocialNetwork::new("n1", 5.0));
        corpus.add_network(SocialNetwork::new("n2", 10.0));
        let song = |id: &str, net: &str, title: &str, likes: u64| WebObject {
            id: id.into(),
            network_id: net.into(),
            kind: ObjectKind::Song,
            title: title.into(),
            tags: vec!["pop".into()],
            genre: Some("Pop".into()),
            description: "a fine tune with several pleasant words".into(),
            uploader: None,
            rating: 3.0,
            like_count: likes,
        };
        corpus.add_object(song("a1", "n1", "golden night", 50));
        corpus.add_object(song("a2", "n1", "golden day", 5));
        corpus.add_object(song("a3", "n1", "quiet night", 1));
        corpus.add_object(song("b1", "n2", "golden night", 30));
        corpus.add_intra_edge(
            "n1",
            IntraEdge { a: "a1".into(), b: "a2".into(), relation_kind: RelationKind::SimilarTo },
        );
        corpus.add_intra_edge(
            "n1",
            IntraEdge { a: "a2".into(), b: "a3".into(), relation_kind: RelationKind::SimilarTo },
        );
        corpus.interlink_candidates.push(InterLink {
            src: "b1".into(),
            dst: "a1".into(),
            relation_kind: crate::corpus::InterKind::DuplicateOf,
            valid: None,
        });
        corpus
    }

    #[test]
    fn identical_lists_give_identical_curves() {
        let corpus = fixture_corpus();
        let profile = DomainProfile::default_music();
        let queries = vec![Query::parse("quiet night").unwrap()];
        let mut judgments = Judgments::new();
        judgments.insert(&queries[0], "a3", Level::High, Level::High);
        // Pure-text fusion degenerates to the baseline, so both methods
        // return the same list and the curves coincide.
        let params = FusionParams { w_text: 1.0, w_rank: 0.0, w_pop: 0.0, ..Default::default() };
        let report = run_experiment(
            &corpus,
            &profile,
            &queries,
            &judgments,
            &RankParams::default(),
            params,
            10,
        )
        .unwrap();
        let overall = report.overall();
        assert_eq!(
            overall.curve(Method::Fbr).values,
            overall.curve(Method::Tfidf).values
        );
    }

    #[test]
    fn single_relevant_object_ranked_first_gives_all_ones() {
        let corpus = fixture_corpus();
        let profile = DomainProfile::default_music();
        let queries = vec![Query::parse("quiet").unwrap()];
        let mut judgments = Judgments::new();
        judgments.insert(&queries[0], "a3", Level::High, Level::High);
        let report = run_experiment(
            &corpus,
            &profile,
            &queries,
            &judgments,
            &RankParams::default(),
            FusionParams::default(),
            5,
        )
        .unwrap();
        for curve in &report.overall().curves {
            assert!(curve.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn reports_round_trip_to_disk_and_render() {
        let corpus = fixture_corpus();
        let profile = DomainProfile::default_music();
        let queries = vec![Query::parse("golden night").unwrap()];
        let mut judgments = Judgments::new();
        judgments.insert(&queries[0], "a1", Level::High, Level::High);
        judgments.insert(&queries[0], "b1", Level::High, Level::Medium);
        let report = run_experiment(
            &corpus,
            &profile,
            &queries,
            &judgments,
            &RankParams::default(),
            FusionParams::default(),
            10,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = write_reports(&report, dir.path()).unwrap();
        // overall + two networks + per-query detail
        assert_eq!(written.len(), 4);
        let text = render_comparison(dir.path()).unwrap();
        assert!(text.contains("overall"));
        assert!(text.contains("n1"));
        assert!(text.contains("fbr"));
    }
}
