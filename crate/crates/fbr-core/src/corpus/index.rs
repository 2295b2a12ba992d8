//! Inverted index over the textual metadata fields.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Corpus;

/// The indexed metadata fields, in index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Title,
    Tags,
    Genre,
    Description,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Title, Field::Tags, Field::Genre, Field::Description];
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::Title => "title",
            Field::Tags => "tags",
            Field::Genre => "genre",
            Field::Description => "description",
        };
        f.write_str(s)
    }
}

/// One posting: a term occurred `tf` times in `field` of `object_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub object_id: String,
    pub field: Field,
    pub tf: u32,
}

/// Immutable term index over a corpus. Postings for a term are sorted by
/// (object id, field), so document frequency is a run count over object ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    doc_lengths: BTreeMap<String, usize>,
    doc_count: usize,
}

impl InvertedIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn doc_length(&self, object_id: &str) -> usize {
        self.doc_lengths.get(object_id).copied().unwrap_or(0)
    }

    pub fn doc_lengths(&self) -> &BTreeMap<String, usize> {
        &self.doc_lengths
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    /// Number of distinct objects containing `term` in any field.
    pub fn doc_freq(&self, term: &str) -> usize {
        let postings = self.postings(term);
        let mut df = 0;
        let mut last: Option<&str> = None;
        for p in postings {
            if last != Some(p.object_id.as_str()) {
                df += 1;
                last = Some(p.object_id.as_str());
            }
        }
        df
    }

    /// Total occurrences of `term` in `object_id`, summed across fields.
    pub fn term_frequency(&self, term: &str, object_id: &str) -> u32 {
        self.postings(term)
            .iter()
            .filter(|p| p.object_id == object_id)
            .map(|p| p.tf)
            .sum()
    }
}

/// Lowercases, splits on non-alphanumeric characters, drops empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Builds the index over the fields title, tags, genre and description of
/// every object. Deterministic: identical corpora produce identical indices.
pub fn build_inverted_index(corpus: &Corpus) -> InvertedIndex {
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths: BTreeMap<String, usize> = BTreeMap::new();

    for (id, obj) in &corpus.objects {
        let mut total = 0usize;
        for field in Field::ALL {
            let tokens = match field {
                Field::Title => tokenize(&obj.title),
                Field::Tags => obj.tags.iter().flat_map(|t| tokenize(t)).collect(),
                Field::Genre => obj.genre.as_deref().map(tokenize).unwrap_or_default(),
                Field::Description => tokenize(&obj.description),
            };
            total += tokens.len();
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for token in tokens {
                *counts.entry(token).or_insert(0) += 1;
            }
            for (term, tf) in counts {
                postings.entry(term).or_default().push(Posting {
                    object_id: id.clone(),
                    field,
                    tf,
                });
            }
        }
        doc_lengths.insert(id.clone(), total);
    }

    // Objects arrive in id order but fields were interleaved per object;
    // normalize each list to (object_id, field) order.
    for list in postings.values_mut() {
        list.sort_by(|x, y| x.object_id.cmp(&y.object_id).then(x.field.cmp(&y.field)));
    }

    InvertedIndex {
        postings,
        doc_lengths,
        doc_count: corpus.objects.len(),
    }
}
