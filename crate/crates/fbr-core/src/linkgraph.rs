//! Per-network link analysis.
//!
//! Each social network becomes a dense-indexed undirected graph; partial
//! ranks are the fixed point of a damped random walk whose teleportation
//! vector is built from per-object like counts. Dangling nodes hand their
//! mass back to the teleportation vector, so every iterate stays a
//! probability distribution.

use std::collections::BTreeMap;

use crate::corpus::SocialNetwork;

/// Dense-indexed undirected graph of one network.
#[derive(Debug, Clone)]
pub struct IntraGraph {
    pub network_id: String,
    node_ids: Vec<String>,
    node_index: BTreeMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    degrees: Vec<usize>,
}

impl IntraGraph {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.degrees[node]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }
}

/// Parameters of the power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RankParams {
    /// Damping factor in (0, 1).
    pub damping: f64,
    /// Convergence threshold on the L1 change per iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Additive smoothing of the teleportation vector; keeps every node a
    /// teleportation target even with zero likes.
    pub feedback_smoothing: f64,
}

impl Default for RankParams {
    fn default() -> Self {
        RankParams {
            damping: 0.85,
            tolerance: 1e-9,
            max_iterations: 200,
            feedback_smoothing: 1.0,
        }
    }
}

/// Converged (or last-iterate) scores of one network. Scores sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub network_id: String,
    pub scores: BTreeMap<String, f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Normalization schemes for mapping raw scores into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormScheme {
    MinMax,
    ZScoreClipped,
    None,
}

/// Expands each undirected edge into two directed arcs.
pub fn build_intra_graph(network: &SocialNetwork) -> IntraGraph {
    let node_ids: Vec<String> = network.object_ids.iter().cloned().collect();
    let node_index: BTreeMap<String, usize> = node_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    let mut adjacency = vec![Vec::new(); node_ids.len()];
    for edge in &network.intra_edges {
        let (Some(&a), Some(&b)) = (node_index.get(&edge.a), node_index.get(&edge.b)) else {
            continue;
        };
        if a == b {
            continue;
        }
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let degrees = adjacency.iter().map(Vec::len).collect();
    IntraGraph {
        network_id: network.network_id.clone(),
        node_ids,
        node_index,
        adjacency,
        degrees,
    }
}

/// Computes the fixed point of `x <- d * A x + (1 - d) * p` where `A` is the
/// column-stochastic random-walk matrix of the undirected graph (dangling
/// nodes redistribute to `p`) and `p` is the normalized teleportation vector
/// with `p_i` proportional to `feedback_smoothing + likes_i`.
///
/// When the iteration budget runs out the last iterate is returned with
/// `converged == false`.
pub fn partial_rank(
    graph: &IntraGraph,
    likes: &BTreeMap<String, u64>,
    params: &RankParams,
) -> RankVector {
    partial_rank_traced(graph, likes, params, |_| {})
}

/// Same as [`partial_rank`] but reports every iterate to `on_iterate`
/// (used by tests to check that mass is conserved at every step).
pub fn partial_rank_traced(
    graph: &IntraGraph,
    likes: &BTreeMap<String, u64>,
    params: &RankParams,
    mut on_iterate: impl FnMut(&[f64]),
) -> RankVector {
    let n = graph.node_count();
    if n == 0 {
        return RankVector {
            network_id: graph.network_id.clone(),
            scores: BTreeMap::new(),
            converged: true,
            iterations: 0,
        };
    }

    let teleport = teleport_vector(graph, likes, params.feedback_smoothing);
    let mut x = teleport.clone();
    on_iterate(&x);

    let d = params.damping;
    let mut next = vec![0.0f64; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        iterations += 1;

        let mut dangling_mass = 0.0;
        for (i, &deg) in graph.degrees.iter().enumerate() {
            if deg == 0 {
                dangling_mass += x[i];
            }
        }

        for (i, p_i) in teleport.iter().enumerate() {
            next[i] = (1.0 - d) * p_i + d * dangling_mass * p_i;
        }
        for (u, neighbors) in graph.adjacency.iter().enumerate() {
            if neighbors.is_empty() {
                continue;
            }
            let share = d * x[u] / neighbors.len() as f64;
            for &v in neighbors {
                next[v] += share;
            }
        }

        let delta: f64 = x.iter().zip(next.iter()).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        on_iterate(&x);
        if delta <= params.tolerance {
            converged = true;
            break;
        }
    }

    let scores = graph
        .node_ids
        .iter()
        .cloned()
        .zip(x.iter().copied())
        .collect();
    RankVector {
        network_id: graph.network_id.clone(),
        scores,
        converged,
        iterations,
    }
}

fn teleport_vector(graph: &IntraGraph, likes: &BTreeMap<String, u64>, smoothing: f64) -> Vec<f64> {
    let n = graph.node_count();
    let mut p: Vec<f64> = graph
        .node_ids
        .iter()
        .map(|id| smoothing + likes.get(id).copied().unwrap_or(0) as f64)
        .collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for v in &mut p {
            *v /= total;
        }
    } else {
        p.fill(1.0 / n as f64);
    }
    p
}

/// Maps scores into [0, 1]. Constant inputs map to 0.5 under every scheme
/// except `None`, which returns the scores untouched.
pub fn normalize_ranks(vec: &RankVector, scheme: NormScheme) -> BTreeMap<String, f64> {
    normalize_scores(&vec.scores, scheme)
}

pub fn normalize_scores(scores: &BTreeMap<String, f64>, scheme: NormScheme) -> BTreeMap<String, f64> {
    match scheme {
        NormScheme::None => scores.clone(),
        NormScheme::MinMax => {
            let min = scores.values().cloned().fold(f64::INFINITY, f64::min);
            let max = scores.values().cloned().fold(f64::NEG_INFINITY, f64::max);
            let range = max - min;
            scores
                .iter()
                .map(|(id, &s)| {
                    let v = if range > 0.0 { (s - min) / range } else { 0.5 };
                    (id.clone(), v)
                })
                .collect()
        }
        NormScheme::ZScoreClipped => {
            let n = scores.len() as f64;
            if n == 0.0 {
                return BTreeMap::new();
            }
            let mean = scores.values().sum::<f64>() / n;
            let var = scores.values().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            scores
                .iter()
                .map(|(id, &s)| {
                    let v = if std > 0.0 {
                        let z = ((s - mean) / std).clamp(-3.0, 3.0);
                        (z + 3.0) / 6.0
                    } else {
                        0.5
                    };
                    (id.clone(), v)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IntraEdge, RelationKind};

    fn network(ids: &[&str], edges: &[(&str, &str)]) -> SocialNetwork {
        let mut net = SocialNetwork::new("n1", 5.0);
        for id in ids {
            net.object_ids.insert(id.to_string());
        }
        for (a, b) in edges {
            net.intra_edges.push(IntraEdge {
                a: a.to_string(),
                b: b.to_string(),
                relation_kind: RelationKind::SimilarTo,
            });
        }
        net
    }

    #[test]
    fn two_nodes_one_edge_have_degree_one() {
        let graph = build_intra_graph(&network(&["a", "b"], &[("a", "b")]));
        assert_eq!(graph.node_count(), 2);
        assert_eq!(graph.degree(0), 1);
        assert_eq!(graph.degree(1), 1);
    }

    #[test]
    fn single_node_graph_has_one_dangling_node() {
        let graph = build_intra_graph(&network(&["a"], &[]));
        assert_eq!(graph.node_count(), 1);
        assert_eq!(graph.degree(0), 0);
    }

    #[test]
    fn triangle_has_all_degrees_two() {
        let graph = build_intra_graph(&network(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c"), ("a", "c")],
        ));
        assert!((0..3).all(|i| graph.degree(i) == 2));
    }

    #[test]
    fn mutual_pair_with_equal_likes_splits_evenly() {
        let graph = build_intra_graph(&network(&["a", "b"], &[("a", "b")]));
        let likes = BTreeMap::from([("a".to_string(), 5), ("b".to_string(), 5)]);
        let ranks = partial_rank(&graph, &likes, &RankParams::default());
        assert!(ranks.converged);
        assert!((ranks.scores["a"] - 0.5).abs() < 1e-12);
        assert!((ranks.scores["b"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_node_gets_full_mass() {
        let graph = build_intra_graph(&network(&["a"], &[]));
        let likes = BTreeMap::from([("a".to_string(), 123)]);
        let ranks = partial_rank(&graph, &likes, &RankParams::default());
        assert!(ranks.converged);
        assert!((ranks.scores["a"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_graph_matches_closed_form() {
        // Path a - b - c with uniform teleportation solves to
        // (19/74, 18/37, 19/74) at damping 0.85.
        let graph = build_intra_graph(&network(&["a", "b", "c"], &[("a", "b"), ("b", "c")]));
        let ranks = partial_rank(&graph, &BTreeMap::new(), &RankParams::default());
        assert!(ranks.converged);
        assert!((ranks.scores["a"] - 19.0 / 74.0).abs() < 1e-8);
        assert!((ranks.scores["b"] - 18.0 / 37.0).abs() < 1e-8);
        assert!((ranks.scores["c"] - 19.0 / 74.0).abs() < 1e-8);
    }

    #[test]
    fn every_iterate_is_a_distribution() {
        let graph = build_intra_graph(&network(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c")],
        ));
        let likes = BTreeMap::from([("a".to_string(), 9), ("d".to_string(), 2)]);
        partial_rank_traced(&graph, &likes, &RankParams::default(), |x| {
            let sum: f64 = x.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "iterate sum {sum}");
            assert!(x.iter().all(|&v| v >= 0.0));
        });
    }

    #[test]
    fn exhausted_budget_is_tagged_non_converged() {
        let graph = build_intra_graph(&network(&["a", "b", "c"], &[("a", "b"), ("b", "c")]));
        let params = RankParams { max_iterations: 1, tolerance: 0.0, ..RankParams::default() };
        let ranks = partial_rank(&graph, &BTreeMap::new(), &params);
        assert!(!ranks.converged);
        assert_eq!(ranks.iterations, 1);
        let sum: f64 = ranks.scores.values().sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn minmax_maps_extremes_and_ties() {
        let vec = RankVector {
            network_id: "n1".into(),
            scores: BTreeMap::from([("a".to_string(), 0.2), ("b".to_string(), 0.8)]),
            converged: true,
            iterations: 1,
        };
        let norm = normalize_ranks(&vec, NormScheme::MinMax);
        assert_eq!(norm["a"], 0.0);
        assert_eq!(norm["b"], 1.0);

        let tied = RankVector {
            network_id: "n1".into(),
            scores: BTreeMap::from([("a".to_string(), 0.5), ("b".to_string(), 0.5)]),
            converged: true,
            iterations: 1,
        };
        let norm = normalize_ranks(&tied, NormScheme::MinMax);
        assert_eq!(norm["a"], 0.5);
        assert_eq!(norm["b"], 0.5);
    }

    #[test]
    fn minmax_on_three_points_is_linear() {
        let vec = RankVector {
            network_id: "n1".into(),
            scores: BTreeMap::from([
                ("a".to_string(), 1.0),
                ("b".to_string(), 2.0),
                ("c".to_string(), 3.0),
            ]),
            converged: true,
            iterations: 1,
        };
        let norm = normalize_ranks(&vec, NormScheme::MinMax);
        assert_eq!(norm["a"], 0.0);
        assert_eq!(norm["b"], 0.5);
        assert_eq!(norm["c"], 1.0);
    }
}
