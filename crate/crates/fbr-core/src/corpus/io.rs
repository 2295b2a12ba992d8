//! Corpus file format: UTF-8 line-delimited JSON records, each carrying a
//! `type` tag. Unknown fields are ignored with a warning; unknown record
//! types are malformed. One corpus per file.
//!
//! Record types: `categories`, `network`, `object`, `intra_edge`,
//! `interlink`. Network membership is derived from object records; intra
//! edges are attached to the network owning both endpoints. When no
//! `categories` record is present the ten default labels apply.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{
    default_categories, validate_corpus, Corpus, InterKind, InterLink, IntraEdge, ObjectKind,
    RelationKind, SocialNetwork, ValidationReport, WebObject,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("dangling reference to {id}")]
    DanglingReference { id: String },
    #[error("duplicate id {id}")]
    DuplicateId { id: String },
    #[error("corpus violates invariants:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Record {
    Categories {
        labels: Vec<String>,
    },
    Network {
        network_id: String,
        rating_scale_max: f64,
    },
    Object {
        id: String,
        network_id: String,
        kind: ObjectKind,
        #[serde(default)]
        title: String,
        #[serde(default)]
        tags: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        genre: Option<String>,
        #[serde(default)]
        description: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        uploader: Option<String>,
        #[serde(default)]
        rating: f64,
        #[serde(default)]
        like_count: u64,
    },
    IntraEdge {
        a: String,
        b: String,
        relation_kind: RelationKind,
    },
    Interlink {
        src: String,
        dst: String,
        relation_kind: InterKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        valid: Option<bool>,
    },
}

fn known_fields(tag: &str) -> &'static [&'static str] {
    match tag {
        "categories" => &["type", "labels"],
        "network" => &["type", "network_id", "rating_scale_max"],
        "object" => &[
            "type",
            "id",
            "network_id",
            "kind",
            "title",
            "tags",
            "genre",
            "description",
            "uploader",
            "rating",
            "like_count",
        ],
        "intra_edge" => &["type", "a", "b", "relation_kind"],
        "interlink" => &["type", "src", "dst", "relation_kind", "valid"],
        _ => &[],
    }
}

fn parse_line(line_no: usize, line: &str) -> Result<Record, CorpusError> {
    let malformed = |reason: String| CorpusError::MalformedRecord { line: line_no, reason };
    let value: Value =
        serde_json::from_str(line).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let map = value
        .as_object()
        .ok_or_else(|| malformed("record is not a JSON object".into()))?;
    let tag = map
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing string field `type`".into()))?;
    let known = known_fields(tag);
    if known.is_empty() {
        return Err(malformed(format!("unknown record type {tag:?}")));
    }
    for key in map.keys() {
        if !known.contains(&key.as_str()) {
            log::warn!("line {line_no}: ignoring unknown field {key:?} on {tag} record");
        }
    }
    let mut trimmed = serde_json::Map::new();
    for (key, val) in map {
        if known.contains(&key.as_str()) {
            trimmed.insert(key.clone(), val.clone());
        }
    }
    serde_json::from_value(Value::Object(trimmed)).map_err(|e| malformed(e.to_string()))
}

/// Parses and assembles a corpus without enforcing the softer invariants;
/// returns the corpus together with its validation report. Structural
/// problems (malformed records, duplicate ids, references to unknown ids)
/// are still hard errors.
pub fn load_corpus_lenient(path: impl AsRef<Path>) -> Result<(Corpus, ValidationReport), CorpusError> {
    let text = fs::read_to_string(path)?;

    let mut categories: Option<Vec<String>> = None;
    let mut networks: BTreeMap<String, SocialNetwork> = BTreeMap::new();
    let mut objects: BTreeMap<String, WebObject> = BTreeMap::new();
    let mut object_order: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, IntraEdge)> = Vec::new();
    let mut interlinks: Vec<InterLink> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line_no, line)? {
            Record::Categories { labels } => {
                if categories.is_some() {
                    return Err(CorpusError::MalformedRecord {
                        line: line_no,
                        reason: "repeated categories record".into(),
                    });
                }
                categories = Some(labels);
            }
            Record::Network { network_id, rating_scale_max } => {
                if networks.contains_key(&network_id) {
                    return Err(CorpusError::MalformedRecord {
                        line: line_no,
                        reason: format!("duplicate network record for {network_id:?}"),
                    });
                }
                networks.insert(network_id.clone(), SocialNetwork::new(network_id, rating_scale_max));
            }
            Record::Object {
                id,
                network_id,
                kind,
                title,
                tags,
                genre,
                description,
                uploader,
                rating,
                like_count,
            } => {
                if objects.contains_key(&id) {
                    return Err(CorpusError::DuplicateId { id });
                }
                object_order.push(id.clone());
                objects.insert(
                    id.clone(),
                    WebObject {
                        id,
                        network_id,
                        kind,
                        title,
                        tags,
                        genre,
                        description,
                        uploader,
                        rating,
                        like_count,
                    },
                );
            }
            Record::IntraEdge { a, b, relation_kind } => {
                edges.push((line_no, IntraEdge { a, b, relation_kind }));
            }
            Record::Interlink { src, dst, relation_kind, valid } => {
                interlinks.push(InterLink { src, dst, relation_kind, valid });
            }
        }
    }

    // Membership is derived from the object records.
    for id in &object_order {
        let obj = &objects[id];
        if let Some(net) = networks.get_mut(&obj.network_id) {
            net.object_ids.insert(id.clone());
        }
        // An unknown network is a soft violation picked up by validation.
    }

    for (line_no, edge) in edges {
        let owner = {
            let a = objects
                .get(&edge.a)
                .ok_or_else(|| CorpusError::DanglingReference { id: edge.a.clone() })?;
            let b = objects
                .get(&edge.b)
                .ok_or_else(|| CorpusError::DanglingReference { id: edge.b.clone() })?;
            if a.network_id != b.network_id {
                return Err(CorpusError::MalformedRecord {
                    line: line_no,
                    reason: format!(
                        "intra edge {} -- {} spans networks {} and {}",
                        edge.a, edge.b, a.network_id, b.network_id
                    ),
                });
            }
            a.network_id.clone()
        };
        let net = networks
            .get_mut(&owner)
            .ok_or_else(|| CorpusError::DanglingReference { id: owner.clone() })?;
        net.intra_edges.push(edge);
    }

    for link in &interlinks {
        for endpoint in [&link.src, &link.dst] {
            if !objects.contains_key(endpoint) {
                return Err(CorpusError::DanglingReference { id: endpoint.clone() });
            }
        }
    }

    let corpus = Corpus {
        networks,
        objects,
        interlink_candidates: interlinks,
        categories: categories.unwrap_or_else(default_categories),
    };
    let report = validate_corpus(&corpus);
    Ok((corpus, report))
}

/// Loads a corpus, rejecting any file whose contents violate an invariant.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let (corpus, report) = load_corpus_lenient(path)?;
    if !report.is_empty() {
        return Err(CorpusError::Invalid(report));
    }
    Ok(corpus)
}

/// Writes a corpus in the line-delimited record format. Record order is
/// deterministic: categories, networks, objects, intra edges, interlinks.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut out = Vec::new();
    write_record(&mut out, &Record::Categories { labels: corpus.categories.clone() })?;
    for net in corpus.networks.values() {
        write_record(
            &mut out,
            &Record::Network {
                network_id: net.network_id.clone(),
                rating_scale_max: net.rating_scale_max,
            },
        )?;
    }
    for obj in corpus.objects.values() {
        write_record(
            &mut out,
            &Record::Object {
                id: obj.id.clone(),
                network_id: obj.network_id.clone(),
                kind: obj.kind,
                title: obj.title.clone(),
                tags: obj.tags.clone(),
                genre: obj.genre.clone(),
                description: obj.description.clone(),
                uploader: obj.uploader.clone(),
                rating: obj.rating,
                like_count: obj.like_count,
            },
        )?;
    }
    for net in corpus.networks.values() {
        for edge in &net.intra_edges {
            write_record(
                &mut out,
                &Record::IntraEdge {
                    a: edge.a.clone(),
                    b: edge.b.clone(),
                    relation_kind: edge.relation_kind,
                },
            )?;
        }
    }
    for link in &corpus.interlink_candidates {
        write_record(
            &mut out,
            &Record::Interlink {
                src: link.src.clone(),
                dst: link.dst.clone(),
                relation_kind: link.relation_kind,
                valid: link.valid,
            },
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_record(out: &mut Vec<u8>, record: &Record) -> Result<(), CorpusError> {
    let line = serde_json::to_string(record)
        .map_err(|e| CorpusError::MalformedRecord { line: 0, reason: e.to_string() })?;
    out.write_all(line.as_bytes())?;
    out.push(b'\n');
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(lines: &[&str]) -> tempfile::NamedTempFile {
        let file = tempfile::NamedTempFile::new().unwrap();
        fs::write(file.path(), lines.join("\n")).unwrap();
        file
    }

    const BASE: &[&str] = &[
        r#"{"type":"network","network_id":"n1","rating_scale_max":5.0}"#,
        r#"{"type":"network","network_id":"n2","rating_scale_max":10.0}"#,
        r#"{"type":"object","id":"s1","network_id":"n1","kind":"song","title":"Hello World","tags":["rock"],"genre":"Rock","rating":4.0,"like_count":7}"#,
        r#"{"type":"object","id":"s2","network_id":"n1","kind":"song","title":"Quiet Night"}"#,
        r#"{"type":"object","id":"g1","network_id":"n1","kind":"singer","title":"The Band"}"#,
        r#"{"type":"object","id":"t1","network_id":"n2","kind":"song","title":"Hello World"}"#,
        r#"{"type":"object","id":"t2","network_id":"n2","kind":"song","title":"Other Song"}"#,
        r#"{"type":"intra_edge","a":"s1","b":"g1","relation_kind":"sung_by"}"#,
        r#"{"type":"intra_edge","a":"s2","b":"g1","relation_kind":"sung_by"}"#,
        r#"{"type":"intra_edge","a":"s1","b":"s2","relation_kind":"similar_to"}"#,
        r#"{"type":"intra_edge","a":"t1","b":"t2","relation_kind":"similar_to"}"#,
        r#"{"type":"interlink","src":"t1","dst":"s1","relation_kind":"duplicate_of"}"#,
    ];

    #[test]
    fn load_echoes_record_counts() {
        let file = write_temp(BASE);
        let corpus = load_corpus(file.path()).unwrap();
        assert_eq!(corpus.networks.len(), 2);
        assert_eq!(corpus.objects.len(), 5);
        let edges: usize = corpus.networks.values().map(|n| n.intra_edges.len()).sum();
        assert_eq!(edges, 4);
        assert_eq!(corpus.interlink_candidates.len(), 1);
        assert_eq!(corpus.categories.len(), 10);
    }

    #[test]
    fn interlink_to_unknown_dst_is_a_dangling_reference() {
        let mut lines = BASE.to_vec();
        lines.push(r#"{"type":"interlink","src":"t1","dst":"nope","relation_kind":"duplicate_of"}"#);
        let file = write_temp(&lines);
        match load_corpus(file.path()) {
            Err(CorpusError::DanglingReference { id }) => assert_eq!(id, "nope"),
            other => panic!("expected DanglingReference, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_object_id_is_rejected() {
        let mut lines = BASE.to_vec();
        lines.push(r#"{"type":"object","id":"s1","network_id":"n2","kind":"song","title":"again"}"#);
        let file = write_temp(&lines);
        match load_corpus(file.path()) {
            Err(CorpusError::DuplicateId { id }) => assert_eq!(id, "s1"),
            other => panic!("expected DuplicateId, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let lines = vec![BASE[0], "{not json"];
        let file = write_temp(&lines);
        match load_corpus(file.path()) {
            Err(CorpusError::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRecord, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let mut lines = BASE.to_vec();
        let extended = r#"{"type":"object","id":"x1","network_id":"n1","kind":"song","title":"ok","mystery":42}"#;
        lines.push(extended);
        let file = write_temp(&lines);
        let corpus = load_corpus(file.path()).unwrap();
        assert!(corpus.objects.contains_key("x1"));
    }

    #[test]
    fn invalid_corpus_is_rejected_but_lenient_load_reports() {
        let mut lines = BASE.to_vec();
        lines.push(r#"{"type":"intra_edge","a":"s1","b":"s1","relation_kind":"similar_to"}"#);
        let file = write_temp(&lines);
        assert!(matches!(load_corpus(file.path()), Err(CorpusError::Invalid(_))));
        let (_, report) = load_corpus_lenient(file.path()).unwrap();
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn save_then_load_is_identity() {
        let file = write_temp(BASE);
        let corpus = load_corpus(file.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        save_corpus(&corpus, out.path()).unwrap();
        let reloaded = load_corpus(out.path()).unwrap();
        assert_eq!(corpus, reloaded);
    }
}
