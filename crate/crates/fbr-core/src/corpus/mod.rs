//! Multi-network corpus data model: typed web objects, per-network link
//! graphs, cross-network interlink candidates, and corpus-wide validation.
//!
//! A corpus is a set of social networks. Each network owns a disjoint set of
//! web objects (songs, singers, albums, users) connected by undirected
//! intra-network edges. Interlink candidates relate objects across networks;
//! they stay unvalidated until the matching stage marks them.

mod index;
mod io;

pub use index::{build_inverted_index, tokenize, Field, InvertedIndex, Posting};
pub use io::{load_corpus, load_corpus_lenient, save_corpus, CorpusError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// The object kinds of the music domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Song,
    Singer,
    Album,
    User,
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObjectKind::Song => "song",
            ObjectKind::Singer => "singer",
            ObjectKind::Album => "album",
            ObjectKind::User => "user",
        };
        f.write_str(s)
    }
}

/// Relation kinds for undirected edges inside one network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    SungBy,
    InAlbum,
    SimilarTo,
    UploadedBy,
    FriendOf,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationKind::SungBy => "sung_by",
            RelationKind::InAlbum => "in_album",
            RelationKind::SimilarTo => "similar_to",
            RelationKind::UploadedBy => "uploaded_by",
            RelationKind::FriendOf => "friend_of",
        };
        f.write_str(s)
    }
}

/// Relation kinds for directed cross-network interlinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterKind {
    DuplicateOf,
    SameSinger,
    SameAlbum,
    SharedContext,
}

impl InterKind {
    pub const ALL: [InterKind; 4] = [
        InterKind::DuplicateOf,
        InterKind::SameSinger,
        InterKind::SameAlbum,
        InterKind::SharedContext,
    ];
}

impl fmt::Display for InterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InterKind::DuplicateOf => "duplicate_of",
            InterKind::SameSinger => "same_singer",
            InterKind::SameAlbum => "same_album",
            InterKind::SharedContext => "shared_context",
        };
        f.write_str(s)
    }
}

/// A typed node with textual metadata and feedback counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WebObject {
    pub id: String,
    pub network_id: String,
    pub kind: ObjectKind,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub genre: Option<String>,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub uploader: Option<String>,
    #[serde(default)]
    pub rating: f64,
    #[serde(default)]
    pub like_count: u64,
}

/// An undirected edge inside one network. The unordered pair `{a, b}`
/// together with the relation kind identifies the edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntraEdge {
    pub a: String,
    pub b: String,
    pub relation_kind: RelationKind,
}

impl IntraEdge {
    /// Canonical (sorted) endpoint pair, used for duplicate detection.
    pub fn key(&self) -> (String, String, RelationKind) {
        if self.a <= self.b {
            (self.a.clone(), self.b.clone(), self.relation_kind)
        } else {
            (self.b.clone(), self.a.clone(), self.relation_kind)
        }
    }
}

/// A directed candidate relation between objects in different networks.
/// `valid` stays `None` until interlink validation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterLink {
    pub src: String,
    pub dst: String,
    pub relation_kind: InterKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
}

/// One un-weighted undirected intra-type link graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialNetwork {
    pub network_id: String,
    pub rating_scale_max: f64,
    #[serde(default)]
    pub object_ids: BTreeSet<String>,
    #[serde(default)]
    pub intra_edges: Vec<IntraEdge>,
}

impl SocialNetwork {
    pub fn new(network_id: impl Into<String>, rating_scale_max: f64) -> Self {
        SocialNetwork {
            network_id: network_id.into(),
            rating_scale_max,
            object_ids: BTreeSet::new(),
            intra_edges: Vec::new(),
        }
    }
}

/// The ten category labels of the music domain.
pub const DEFAULT_CATEGORIES: [&str; 10] = [
    "Pop",
    "Rap",
    "Rock",
    "Jazz",
    "Today's Hit",
    "Reggae",
    "Country",
    "International",
    "Comedy",
    "Latin",
];

pub fn default_categories() -> Vec<String> {
    DEFAULT_CATEGORIES.iter().map(|s| s.to_string()).collect()
}

/// The whole multi-network data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub networks: BTreeMap<String, SocialNetwork>,
    pub objects: BTreeMap<String, WebObject>,
    pub interlink_candidates: Vec<InterLink>,
    pub categories: Vec<String>,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus::new()
    }
}

impl Corpus {
    pub fn new() -> Self {
        Corpus {
            networks: BTreeMap::new(),
            objects: BTreeMap::new(),
            interlink_candidates: Vec::new(),
            categories: default_categories(),
        }
    }

    pub fn add_network(&mut self, network: SocialNetwork) {
        self.networks.insert(network.network_id.clone(), network);
    }

    /// Inserts an object and registers it as a member of its network.
    pub fn add_object(&mut self, object: WebObject) {
        if let Some(net) = self.networks.get_mut(&object.network_id) {
            net.object_ids.insert(object.id.clone());
        }
        self.objects.insert(object.id.clone(), object);
    }

    pub fn add_intra_edge(&mut self, network_id: &str, edge: IntraEdge) {
        if let Some(net) = self.networks.get_mut(network_id) {
            net.intra_edges.push(edge);
        }
    }

    pub fn object(&self, id: &str) -> Option<&WebObject> {
        self.objects.get(id)
    }

    /// Per-object like counts for one network, used as the feedback signal
    /// of the link analysis.
    pub fn likes_of_network(&self, network_id: &str) -> BTreeMap<String, u64> {
        let mut likes = BTreeMap::new();
        if let Some(net) = self.networks.get(network_id) {
            for id in &net.object_ids {
                if let Some(obj) = self.objects.get(id) {
                    likes.insert(id.clone(), obj.like_count);
                }
            }
        }
        likes
    }
}

/// A single invariant violation found by [`validate_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnknownNetwork { object_id: String, network_id: String },
    UnknownGenre { object_id: String, genre: String },
    NegativeRating { object_id: String, rating: f64 },
    RatingAboveScale { object_id: String, rating: f64, scale_max: f64 },
    DanglingUploader { object_id: String, uploader: String },
    MembershipDangling { network_id: String, object_id: String },
    MembershipMissing { network_id: String, object_id: String },
    ForeignMember { network_id: String, object_id: String },
    EdgeEndpointNotMember { network_id: String, endpoint: String },
    SelfLoop { network_id: String, id: String, kind: RelationKind },
    DuplicateEdge { network_id: String, a: String, b: String, kind: RelationKind },
    InterlinkDangling { src: String, dst: String, missing: String },
    InterlinkSameNetwork { src: String, dst: String },
    EmptyCategories,
    NonPositiveRatingScale { network_id: String, scale_max: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNetwork { object_id, network_id } => {
                write!(f, "object {object_id} references unknown network {network_id}")
            }
            Violation::UnknownGenre { object_id, genre } => {
                write!(f, "object {object_id} has genre {genre:?} not in the category list")
            }
            Violation::NegativeRating { object_id, rating } => {
                write!(f, "object {object_id} has negative rating {rating}")
            }
            Violation::RatingAboveScale { object_id, rating, scale_max } => {
                write!(f, "object {object_id} has rating {rating} above scale max {scale_max}")
            }
            Violation::DanglingUploader { object_id, uploader } => {
                write!(f, "object {object_id} names unknown uploader {uploader}")
            }
            Violation::MembershipDangling { network_id, object_id } => {
                write!(f, "network {network_id} lists unknown member {object_id}")
            }
            Violation::MembershipMissing { network_id, object_id } => {
                write!(f, "object {object_id} missing from member set of network {network_id}")
            }
            Violation::ForeignMember { network_id, object_id } => {
                write!(f, "network {network_id} lists member {object_id} owned by another network")
            }
            Violation::EdgeEndpointNotMember { network_id, endpoint } => {
                write!(f, "intra edge endpoint {endpoint} is not a member of network {network_id}")
            }
            Violation::SelfLoop { network_id, id, kind } => {
                write!(f, "self-loop {kind} edge on {id} in network {network_id}")
            }
            Violation::DuplicateEdge { network_id, a, b, kind } => {
                write!(f, "duplicate {kind} edge {{{a}, {b}}} in network {network_id}")
            }
            Violation::InterlinkDangling { src, dst, missing } => {
                write!(f, "interlink {src} -> {dst} names unknown object {missing}")
            }
            Violation::InterlinkSameNetwork { src, dst } => {
                write!(f, "interlink {src} -> {dst} stays inside one network")
            }
            Violation::EmptyCategories => write!(f, "category list is empty"),
            Violation::NonPositiveRatingScale { network_id, scale_max } => {
                write!(f, "network {network_id} has non-positive rating scale {scale_max}")
            }
        }
    }
}

/// Every invariant violation found in a corpus. Empty iff the corpus is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "corpus is valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every corpus invariant and reports each violation with the
/// offending identifiers. Violations are data, not failures.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut violations = Vec::new();

    if corpus.categories.is_empty() {
        violations.push(Violation::EmptyCategories);
    }

    for (network_id, net) in &corpus.networks {
        if !(net.rating_scale_max > 0.0) {
            violations.push(Violation::NonPositiveRatingScale {
                network_id: network_id.clone(),
                scale_max: net.rating_scale_max,
            });
        }
        for member in &net.object_ids {
            match corpus.objects.get(member) {
                None => violations.push(Violation::MembershipDangling {
                    network_id: network_id.clone(),
                    object_id: member.clone(),
                }),
                Some(obj) if obj.network_id != *network_id => {
                    violations.push(Violation::ForeignMember {
                        network_id: network_id.clone(),
                        object_id: member.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        let mut seen = BTreeSet::new();
        for edge in &net.intra_edges {
            if edge.a == edge.b {
                violations.push(Violation::SelfLoop {
                    network_id: network_id.clone(),
                    id: edge.a.clone(),
                    kind: edge.relation_kind,
                });
                continue;
            }
            for endpoint in [&edge.a, &edge.b] {
                if !net.object_ids.contains(endpoint) {
                    violations.push(Violation::EdgeEndpointNotMember {
                        network_id: network_id.clone(),
                        endpoint: endpoint.clone(),
                    });
                }
            }
            if !seen.insert(edge.key()) {
                let (a, b, kind) = edge.key();
                violations.push(Violation::DuplicateEdge {
                    network_id: network_id.clone(),
                    a,
                    b,
                    kind,
                });
            }
        }
    }

    for (id, obj) in &corpus.objects {
        match corpus.networks.get(&obj.network_id) {
            None => violations.push(Violation::UnknownNetwork {
                object_id: id.clone(),
                network_id: obj.network_id.clone(),
            }),
            Some(net) => {
                if !net.object_ids.contains(id) {
                    violations.push(Violation::MembershipMissing {
                        network_id: obj.network_id.clone(),
                        object_id: id.clone(),
                    });
                }
                if obj.rating > net.rating_scale_max {
                    violations.push(Violation::RatingAboveScale {
                        object_id: id.clone(),
                        rating: obj.rating,
                        scale_max: net.rating_scale_max,
                    });
                }
            }
        }
        if obj.rating < 0.0 || !obj.rating.is_finite() {
            violations.push(Violation::NegativeRating {
                object_id: id.clone(),
                rating: obj.rating,
            });
        }
        if let Some(genre) = &obj.genre {
            if !corpus.categories.iter().any(|c| c == genre) {
                violations.push(Violation::UnknownGenre {
                    object_id: id.clone(),
                    genre: genre.clone(),
                });
            }
        }
        if let Some(uploader) = &obj.uploader {
            if !corpus.objects.contains_key(uploader) {
                violations.push(Violation::DanglingUploader {
                    object_id: id.clone(),
                    uploader: uploader.clone(),
                });
            }
        }
    }

    for link in &corpus.interlink_candidates {
        let src = corpus.objects.get(&link.src);
        let dst = corpus.objects.get(&link.dst);
        for (endpoint, obj) in [(&link.src, src), (&link.dst, dst)] {
            if obj.is_none() {
                violations.push(Violation::InterlinkDangling {
                    src: link.src.clone(),
                    dst: link.dst.clone(),
                    missing: endpoint.clone(),
                });
            }
        }
        if let (Some(s), Some(d)) = (src, dst) {
            if s.network_id == d.network_id {
                violations.push(Violation::InterlinkSameNetwork {
                    src: link.src.clone(),
                    dst: link.dst.clone(),
                });
            }
        }
    }

    ValidationReport { violations }
}
