//! Fused ranking of web objects spread across multiple social networks.
//!
//! The pipeline: load or generate a multi-network corpus, build an inverted
//! index over its textual metadata, compute per-network partial ranks by
//! feedback-personalized link analysis, validate cross-network interlinks
//! against a domain feature profile, and combine text relevance, partial
//! rank and interlink popularity into one fused result list. The eval
//! module compares that list against a plain tf-idf baseline with NDCG.

pub mod corpus;
pub mod eval;
pub mod fusion;
pub mod linkgraph;
pub mod matching;
pub mod synthgen;
