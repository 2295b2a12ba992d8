//! Domain-feature matching and cross-network relationship scoring.
//!
//! A domain profile declares a feature set (named predicates over object
//! metadata), an admission threshold, and per-relation popularity weights.
//! Objects matching strictly more than `epsilon` features are admitted to
//! the inheritance graph; interlinks are valid only between admitted
//! objects, and each object's popularity factor sums the weights of the
//! valid interlinks pointing at it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, Corpus, InterKind, InterLink, ObjectKind, RelationKind, WebObject};

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("no popularity weight declared for relation kind {0}")]
    UnknownRelationKind(InterKind),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile file line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Built-in feature predicates. Each one is a deterministic test over a
/// single object's metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeaturePredicate {
    /// Title is non-empty after trimming.
    HasTitle,
    /// Genre is present and appears in the corpus category list.
    HasGenreInCategoryList,
    /// At least `min` tags.
    HasTags { min: usize },
    /// Description has at least `min_tokens` tokens.
    HasDescription { min_tokens: usize },
    /// Object kind is one of the listed kinds.
    KindIn { kinds: Vec<ObjectKind> },
    /// Uploader reference is present.
    HasUploader,
}

impl FeaturePredicate {
    pub fn eval(&self, object: &WebObject, categories: &[String]) -> bool {
        match self {
            FeaturePredicate::HasTitle => !object.title.trim().is_empty(),
            FeaturePredicate::HasGenreInCategoryList => object
                .genre
                .as_ref()
                .map(|g| categories.iter().any(|c| c == g))
                .unwrap_or(false),
            FeaturePredicate::HasTags { min } => object.tags.len() >= *min,
            FeaturePredicate::HasDescription { min_tokens } => {
                tokenize(&object.description).len() >= *min_tokens
            }
            FeaturePredicate::KindIn { kinds } => kinds.contains(&object.kind),
            FeaturePredicate::HasUploader => object.uploader.is_some(),
        }
    }
}

/// A named feature of the domain profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub predicate: FeaturePredicate,
}

/// The domain feature set, admission threshold and popularity weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainProfile {
    pub domain_name: String,
    pub features: Vec<Feature>,
    pub epsilon: usize,
    pub popularity_weights: BTreeMap<InterKind, f64>,
}

impl DomainProfile {
    /// The shipped music profile: six predicates, threshold 2, and the
    /// default relation weights.
    pub fn default_music() -> Self {
        let features = vec![
            Feature { name: "has_title".into(), predicate: FeaturePredicate::HasTitle },
            Feature {
                name: "has_genre_in_category_list".into(),
                predicate: FeaturePredicate::HasGenreInCategoryList,
            },
            Feature { name: "has_tags".into(), predicate: FeaturePredicate::HasTags { min: 1 } },
            Feature {
                name: "has_description".into(),
                predicate: FeaturePredicate::HasDescription { min_tokens: 5 },
            },
            Feature {
                name: "kind_is_musical".into(),
                predicate: FeaturePredicate::KindIn {
                    kinds: vec![ObjectKind::Song, ObjectKind::Singer, ObjectKind::Album],
                },
            },
            Feature { name: "has_uploader".into(), predicate: FeaturePredicate::HasUploader },
        ];
        let popularity_weights = BTreeMap::from([
            (InterKind::DuplicateOf, 1.0),
            (InterKind::SameSinger, 0.5),
            (InterKind::SameAlbum, 0.5),
            (InterKind::SharedContext, 0.25),
        ]);
        DomainProfile {
            domain_name: "music".into(),
            features,
            epsilon: 2,
            popularity_weights,
        }
    }

    /// Number of features, the `m` of the profile.
    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn validate(&self) -> Result<(), MatchingError> {
        if self.features.is_empty() {
            return Err(MatchingError::InvalidProfile("feature set is empty".into()));
        }
        if self.epsilon >= self.features.len() {
            return Err(MatchingError::InvalidProfile(format!(
                "epsilon {} must be smaller than the feature count {}",
                self.epsilon,
                self.features.len()
            )));
        }
        let mut names = BTreeSet::new();
        for f in &self.features {
            if !names.insert(&f.name) {
                return Err(MatchingError::InvalidProfile(format!(
                    "duplicate feature name {:?}",
                    f.name
                )));
            }
        }
        for (kind, w) in &self.popularity_weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(MatchingError::InvalidProfile(format!(
                    "weight for {kind} must be a non-negative finite number"
                )));
            }
        }
        Ok(())
    }
}

/// The features of the profile an object matched.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub object_id: String,
    pub matched: BTreeSet<String>,
}

impl FeatureVector {
    /// Count of matched features, the `n` compared against epsilon.
    pub fn n(&self) -> usize {
        self.matched.len()
    }
}

/// Evaluates every profile predicate against one object. `categories` is
/// the owning corpus's category list (consulted by the genre predicate).
pub fn extract_features(
    object: &WebObject,
    profile: &DomainProfile,
    categories: &[String],
) -> FeatureVector {
    let matched = profile
        .features
        .iter()
        .filter(|f| f.predicate.eval(object, categories))
        .map(|f| f.name.clone())
        .collect();
    FeatureVector { object_id: object.id.clone(), matched }
}

/// The binary relationship function: admitted iff strictly more than
/// `epsilon` features matched.
pub fn relationship(fv: &FeatureVector, profile: &DomainProfile) -> bool {
    fv.n() > profile.epsilon
}

/// Edge of the inheritance graph, carrying its originating relation.
#[derive(Debug, Clone, PartialEq)]
pub enum InheritanceEdgeKind {
    Intra(RelationKind),
    Inter(InterKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InheritanceEdge {
    pub a: String,
    pub b: String,
    pub kind: InheritanceEdgeKind,
}

/// Subgraph of admitted objects with their typed relations.
#[derive(Debug, Clone, Default)]
pub struct InheritanceGraph {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<InheritanceEdge>,
}

impl InheritanceGraph {
    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }
}

/// Admits every object with `relationship == 1` and keeps the typed
/// relations whose endpoints are both admitted.
pub fn build_inheritance_graph(corpus: &Corpus, profile: &DomainProfile) -> InheritanceGraph {
    let mut nodes = BTreeSet::new();
    for (id, object) in &corpus.objects {
        let fv = extract_features(object, profile, &corpus.categories);
        if relationship(&fv, profile) {
            nodes.insert(id.clone());
        }
    }
    let mut edges = Vec::new();
    for net in corpus.networks.values() {
        for edge in &net.intra_edges {
            if nodes.contains(&edge.a) && nodes.contains(&edge.b) {
                edges.push(InheritanceEdge {
                    a: edge.a.clone(),
                    b: edge.b.clone(),
                    kind: InheritanceEdgeKind::Intra(edge.relation_kind),
                });
            }
        }
    }
    for link in &corpus.interlink_candidates {
        if nodes.contains(&link.src) && nodes.contains(&link.dst) {
            edges.push(InheritanceEdge {
                a: link.src.clone(),
                b: link.dst.clone(),
                kind: InheritanceEdgeKind::Inter(link.relation_kind),
            });
        }
    }
    InheritanceGraph { nodes, edges }
}

/// Marks every interlink candidate: valid iff both endpoints were admitted
/// to the inheritance graph. Invalid links are kept, not deleted.
pub fn validate_interlinks(corpus: &Corpus, ig: &InheritanceGraph) -> Vec<InterLink> {
    corpus
        .interlink_candidates
        .iter()
        .map(|link| {
            let valid = ig.contains(&link.src) && ig.contains(&link.dst);
            InterLink { valid: Some(valid), ..link.clone() }
        })
        .collect()
}

/// Sum of the popularity weights of the valid interlinks pointing at
/// `object_id`.
pub fn popularity_factor(
    object_id: &str,
    interlinks: &[InterLink],
    profile: &DomainProfile,
) -> Result<f64, MatchingError> {
    let mut score = 0.0;
    for link in interlinks {
        if link.valid == Some(true) && link.dst == object_id {
            let w = profile
                .popularity_weights
                .get(&link.relation_kind)
                .ok_or(MatchingError::UnknownRelationKind(link.relation_kind))?;
            score += w;
        }
    }
    Ok(score)
}

/// Popularity factors of every object with at least one valid incoming
/// interlink. Absent objects score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopularityTable {
    pub scores: BTreeMap<String, f64>,
}

impl PopularityTable {
    pub fn compute(
        interlinks: &[InterLink],
        profile: &DomainProfile,
    ) -> Result<PopularityTable, MatchingError> {
        let mut scores: BTreeMap<String, f64> = BTreeMap::new();
        for link in interlinks {
            if link.valid == Some(true) {
                let w = profile
                    .popularity_weights
                    .get(&link.relation_kind)
                    .ok_or(MatchingError::UnknownRelationKind(link.relation_kind))?;
                *scores.entry(link.dst.clone()).or_insert(0.0) += w;
            }
        }
        Ok(PopularityTable { scores })
    }

    pub fn score(&self, object_id: &str) -> f64 {
        self.scores.get(object_id).copied().unwrap_or(0.0)
    }
}

/// Optional discovery pass: an exact match on (normalized title, kind)
/// across two networks yields a `duplicate_of` candidate in each direction.
/// Candidates already present in the corpus are not repeated.
pub fn discover_interlinks(corpus: &Corpus) -> Vec<InterLink> {
    let mut by_key: BTreeMap<(Vec<String>, ObjectKind), Vec<&WebObject>> = BTreeMap::new();
    for object in corpus.objects.values() {
        let title = tokenize(&object.title);
        if title.is_empty() {
            continue;
        }
        by_key.entry((title, object.kind)).or_default().push(object);
    }
    let existing: BTreeSet<(String, String, InterKind)> = corpus
        .interlink_candidates
        .iter()
        .map(|l| (l.src.clone(), l.dst.clone(), l.relation_kind))
        .collect();
    let mut found = Vec::new();
    for group in by_key.values() {
        for a in group {
            for b in group {
                if a.network_id == b.network_id {
                    continue;
                }
                let key = (a.id.clone(), b.id.clone(), InterKind::DuplicateOf);
                if existing.contains(&key) {
                    continue;
                }
                found.push(InterLink {
                    src: a.id.clone(),
                    dst: b.id.clone(),
                    relation_kind: InterKind::DuplicateOf,
                    valid: None,
                });
            }
        }
    }
    found
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ProfileRecord {
    Profile { domain_name: String, epsilon: usize },
    Feature { name: String, predicate: FeaturePredicate },
    Weight { relation_kind: InterKind, weight: f64 },
}

/// Loads a profile from its line-delimited record file and validates it.
pub fn load_profile(path: impl AsRef<Path>) -> Result<DomainProfile, MatchingError> {
    let text = fs::read_to_string(path)?;
    let mut domain_name = None;
    let mut epsilon = None;
    let mut features = Vec::new();
    let mut weights = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let record: ProfileRecord = serde_json::from_str(line).map_err(|e| {
            MatchingError::MalformedRecord { line: idx + 1, reason: e.to_string() }
        })?;
        match record {
            ProfileRecord::Profile { domain_name: name, epsilon: eps } => {
                domain_name = Some(name);
                epsilon = Some(eps);
            }
            ProfileRecord::Feature { name, predicate } => {
                features.push(Feature { name, predicate })
            }
            ProfileRecord::Weight { relation_kind, weight } => {
                weights.insert(relation_kind, weight);
            }
        }
    }
    let profile = DomainProfile {
        domain_name: domain_name
            .ok_or_else(|| MatchingError::InvalidProfile("missing profile record".into()))?,
        epsilon: epsilon.unwrap_or(0),
        features,
        popularity_weights: weights,
    };
    profile.validate()?;
    Ok(profile)
}

pub fn save_profile(profile: &DomainProfile, path: impl AsRef<Path>) -> Result<(), MatchingError> {
    let mut out = String::new();
    let header = ProfileRecord::Profile {
        domain_name: profile.domain_name.clone(),
        epsilon: profile.epsilon,
    };
    out.push_str(&serde_json::to_string(&header).expect("profile record serializes"));
    out.push('\n');
    for f in &profile.features {
        let record = ProfileRecord::Feature { name: f.name.clone(), predicate: f.predicate.clone() };
        out.push_str(&serde_json::to_string(&record).expect("feature record serializes"));
        out.push('\n');
    }
    for (kind, weight) in &profile.popularity_weights {
        let record = ProfileRecord::Weight { relation_kind: *kind, weight: *weight };
        out.push_str(&serde_json::to_string(&record).expect("weight record serializes"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_categories, IntraEdge, SocialNetwork};

    fn full_song() -> WebObject {
        WebObject {
            id: "s1".into(),
            network_id: "n1".into(),
            kind: ObjectKind::Song,
            title: "Golden Night".into(),
            tags: vec!["pop".into(), "night".into()],
            genre: Some("Pop".into()),
            description: "a shiny pop anthem about the golden night".into(),
            uploader: Some("u1".into()),
            rating: 4.5,
            like_count: 40,
        }
    }

    fn bare_user() -> WebObject {
        WebObject {
            id: "u1".into(),
            network_id: "n1".into(),
            kind: ObjectKind::User,
            title: "listener42".into(),
            tags: vec![],
            genre: None,
            description: "profile".into(),
            uploader: None,
            rating: 0.0,
            like_count: 0,
        }
    }

    #[test]
    fn fully_populated_song_matches_every_feature() {
        let profile = DomainProfile::default_music();
        let fv = extract_features(&full_song(), &profile, &default_categories());
        assert_eq!(fv.n(), profile.feature_count());
    }

    #[test]
    fn empty_object_matches_only_kind() {
        let profile = DomainProfile::default_music();
        let object = WebObject {
            id: "x".into(),
            network_id: "n1".into(),
            kind: ObjectKind::User,
            title: "".into(),
            tags: vec![],
            genre: None,
            description: "".into(),
            uploader: None,
            rating: 0.0,
            like_count: 0,
        };
        let fv = extract_features(&object, &profile, &default_categories());
        assert_eq!(fv.n(), 0);
    }

    #[test]
    fn relationship_requires_strictly_more_than_epsilon() {
        let profile = DomainProfile::default_music();
        // epsilon = 2 in the default profile
        let fv = |n: usize| FeatureVector {
            object_id: "x".into(),
            matched: (0..n).map(|i| format!("f{i}")).collect(),
        };
        assert!(!relationship(&fv(0), &profile));
        assert!(!relationship(&fv(2), &profile));
        assert!(relationship(&fv(3), &profile));
        assert!(relationship(&fv(4), &profile));
    }

    fn three_object_corpus() -> Corpus {
        let mut corpus = Corpus::new();
        corpus.add_network(SocialNetwork::new("n1", 5.0));
        corpus.add_network(SocialNetwork::new("n2", 10.0));
        let mut singer = full_song();
        singer.id = "g1".into();
        singer.kind = ObjectKind::Singer;
        singer.uploader = None;
        let mut song = full_song();
        song.uploader = Some("u1".into());
        corpus.add_object(song);
        corpus.add_object(singer);
        corpus.add_object(bare_user());
        corpus.add_intra_edge(
            "n1",
            IntraEdge { a: "s1".into(), b: "g1".into(), relation_kind: RelationKind::SungBy },
        );
        corpus.add_intra_edge(
            "n1",
            IntraEdge { a: "s1".into(), b: "u1".into(), relation_kind: RelationKind::UploadedBy },
        );
        corpus
    }

    #[test]
    fn inheritance_graph_keeps_only_admitted_endpoints() {
        let corpus = three_object_corpus();
        let profile = DomainProfile::default_music();
        let ig = build_inheritance_graph(&corpus, &profile);
        assert!(ig.contains("s1"));
        assert!(ig.contains("g1"));
        assert!(!ig.contains("u1"));
        assert_eq!(ig.edges.len(), 1);
        assert_eq!(ig.edges[0].a, "s1");
        assert_eq!(ig.edges[0].b, "g1");
    }

    #[test]
    fn inheritance_graph_is_empty_when_nothing_matches() {
        let mut corpus = Corpus::new();
        corpus.add_network(SocialNetwork::new("n1", 5.0));
        corpus.add_object(bare_user());
        let ig = build_inheritance_graph(&corpus, &DomainProfile::default_music());
        assert!(ig.nodes.is_empty());
        assert!(ig.edges.is_empty());
    }

    #[test]
    fn interlink_validity_follows_admission() {
        let mut corpus = three_object_corpus();
        let mut remote = full_song();
        remote.id = "t1".into();
        remote.network_id = "n2".into();
        remote.uploader = None;
        corpus.add_object(remote);
        corpus.interlink_candidates.push(InterLink {
            src: "t1".into(),
            dst: "s1".into(),
            relation_kind: InterKind::DuplicateOf,
            valid: None,
        });
        corpus.interlink_candidates.push(InterLink {
            src: "t1".into(),
            dst: "u1".into(),
            relation_kind: InterKind::SharedContext,
            valid: None,
        });
        let profile = DomainProfile::default_music();
        let ig = build_inheritance_graph(&corpus, &profile);
        let validated = validate_interlinks(&corpus, &ig);
        assert_eq!(validated[0].valid, Some(true));
        assert_eq!(validated[1].valid, Some(false));
    }

    #[test]
    fn popularity_sums_weights_of_valid_incoming_links() {
        let profile = DomainProfile::default_music();
        let links = vec![
            InterLink {
                src: "a".into(),
                dst: "x".into(),
                relation_kind: InterKind::DuplicateOf,
                valid: Some(true),
            },
            InterLink {
                src: "b".into(),
                dst: "x".into(),
                relation_kind: InterKind::SameSinger,
                valid: Some(true),
            },
            InterLink {
                src: "c".into(),
                dst: "x".into(),
                relation_kind: InterKind::SameAlbum,
                valid: Some(false),
            },
            InterLink {
                src: "x".into(),
                dst: "other".into(),
                relation_kind: InterKind::DuplicateOf,
                valid: Some(true),
            },
        ];
        // 1.0 (duplicate_of) + 0.5 (same_singer); the invalid link and the
        // outgoing link do not count.
        assert_eq!(popularity_factor("x", &links, &profile).unwrap(), 1.5);
        assert_eq!(popularity_factor("nobody", &links, &profile).unwrap(), 0.0);

        let table = PopularityTable::compute(&links, &profile).unwrap();
        assert_eq!(table.score("x"), 1.5);
        assert_eq!(table.score("other"), 1.0);
        assert_eq!(table.score("nobody"), 0.0);
    }

    #[test]
    fn missing_weight_is_an_error() {
        let mut profile = DomainProfile::default_music();
        profile.popularity_weights.remove(&InterKind::SameSinger);
        let links = vec![InterLink {
            src: "a".into(),
            dst: "x".into(),
            relation_kind: InterKind::SameSinger,
            valid: Some(true),
        }];
        assert!(matches!(
            popularity_factor("x", &links, &profile),
            Err(MatchingError::UnknownRelationKind(InterKind::SameSinger))
        ));
    }

    #[test]
    fn discovery_finds_cross_network_title_twins() {
        let mut corpus = three_object_corpus();
        let mut remote = full_song();
        remote.id = "t1".into();
        remote.network_id = "n2".into();
        remote.title = "golden NIGHT".into();
        corpus.add_object(remote);
        let found = discover_interlinks(&corpus);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|l| l.relation_kind == InterKind::DuplicateOf));
        let pairs: BTreeSet<(String, String)> =
            found.iter().map(|l| (l.src.clone(), l.dst.clone())).collect();
        assert!(pairs.contains(&("s1".to_string(), "t1".to_string())));
        assert!(pairs.contains(&("t1".to_string(), "s1".to_string())));
    }

    #[test]
    fn profile_roundtrips_through_file() {
        let profile = DomainProfile::default_music();
        let file = tempfile::NamedTempFile::new().unwrap();
        save_profile(&profile, file.path()).unwrap();
        let loaded = load_profile(file.path()).unwrap();
        assert_eq!(profile, loaded);
    }

    #[test]
    fn invalid_epsilon_is_rejected() {
        let mut profile = DomainProfile::default_music();
        profile.epsilon = 6;
        assert!(matches!(profile.validate(), Err(MatchingError::InvalidProfile(_))));
    }
}
