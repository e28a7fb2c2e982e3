//! Sources of named-entity mentions: an annotation-file reader for the
//! output of an external NER system, and a built-in gazetteer matcher.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::ne_sentiment::{NEG_TAG, POS_TAG};
use crate::preprocess::{normalize_and_tokenize, NormalizationConfig};

/// Entity type label carried through from the NER output. Unused by the
/// polarity algorithm; retained for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityType {
    Per,
    Loc,
    Org,
    Misc,
}

impl EntityType {
    pub fn parse(s: &str) -> Option<EntityType> {
        match s.to_ascii_uppercase().as_str() {
            "PER" => Some(EntityType::Per),
            "LOC" => Some(EntityType::Loc),
            "ORG" => Some(EntityType::Org),
            "MISC" => Some(EntityType::Misc),
            _ => None,
        }
    }
}

/// A named-entity mention as a normalized token sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NamedEntity {
    pub surface: Vec<String>,
    pub etype: Option<EntityType>,
}

/// Per-document entity mentions, deduplicated by surface within each
/// document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NeAnnotations {
    by_doc: BTreeMap<String, Vec<NamedEntity>>,
}

#[derive(Debug, Error)]
pub enum NeProviderError {
    #[error("annotation record {record}: {reason}")]
    MalformedRecord { record: usize, reason: String },
    #[error("annotated doc_id `{0}` does not exist in the corpus")]
    UnknownDocId(String),
    #[error("entity surface `{0}` contains a reserved tag token")]
    ReservedSurface(String),
    #[error("entity surface normalized to nothing: `{0}`")]
    EmptySurface(String),
    #[error("gazetteer is empty")]
    EmptyGazetteer,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
struct AnnotationRecord {
    doc_id: String,
    entities: Vec<EntityRecord>,
}

#[derive(Deserialize)]
struct EntityRecord {
    surface: String,
    #[serde(rename = "type")]
    etype: Option<String>,
}

impl NeAnnotations {
    pub fn insert(&mut self, doc_id: &str, entity: NamedEntity) {
        let list = self.by_doc.entry(doc_id.to_string()).or_default();
        if !list.iter().any(|e| e.surface == entity.surface) {
            list.push(entity);
        }
    }

    pub fn entities_for(&self, doc_id: &str) -> &[NamedEntity] {
        self.by_doc.get(doc_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &String> {
        self.by_doc.keys()
    }

    pub fn total_docs(&self) -> usize {
        self.by_doc.len()
    }

    /// Checks every annotated doc_id against the corpus.
    pub fn resolve_against(&self, corpus: &Corpus) -> Result<(), NeProviderError> {
        for id in self.by_doc.keys() {
            if corpus.get(id).is_none() {
                return Err(NeProviderError::UnknownDocId(id.clone()));
            }
        }
        Ok(())
    }
}

fn build_entity(
    surface_text: &str,
    etype: Option<EntityType>,
    config: &NormalizationConfig,
) -> Result<NamedEntity, NeProviderError> {
    let surface = normalize_and_tokenize(surface_text, config);
    if surface.is_empty() {
        return Err(NeProviderError::EmptySurface(surface_text.to_string()));
    }
    // PosNE/NegNE are reserved so that tagging stays idempotent.
    if surface.iter().any(|t| t == POS_TAG || t == NEG_TAG) {
        return Err(NeProviderError::ReservedSurface(surface_text.to_string()));
    }
    Ok(NamedEntity { surface, etype })
}

/// Reads NER output in JSONL form: one record per document,
/// `{"doc_id": str, "entities": [{"surface": str, "type": str?}]}`.
/// Surfaces are normalized with the same pipeline as documents.
pub fn load_annotations(
    path: impl AsRef<Path>,
    config: &NormalizationConfig,
) -> Result<NeAnnotations, NeProviderError> {
    let content = fs::read_to_string(path)?;
    let mut annotations = NeAnnotations::default();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord =
            serde_json::from_str(line).map_err(|e| NeProviderError::MalformedRecord {
                record: i,
                reason: e.to_string(),
            })?;
        annotations.by_doc.entry(record.doc_id.clone()).or_default();
        for entity in record.entities {
            let etype = entity.etype.as_deref().and_then(EntityType::parse);
            annotations.insert(&record.doc_id, build_entity(&entity.surface, etype, config)?);
        }
    }
    Ok(annotations)
}

/// Reads a gazetteer file: one entity surface per line, optional
/// tab-separated type column; `#`-prefixed lines are comments.
pub fn load_gazetteer(
    path: impl AsRef<Path>,
    config: &NormalizationConfig,
) -> Result<Vec<NamedEntity>, NeProviderError> {
    let content = fs::read_to_string(path)?;
    let mut gazetteer = Vec::new();
    for line in content.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, etype) = match line.split_once('\t') {
            Some((s, t)) => (s, EntityType::parse(t.trim())),
            None => (line, None),
        };
        gazetteer.push(build_entity(surface, etype, config)?);
    }
    Ok(gazetteer)
}

/// Non-overlapping longest-leftmost spans of `surfaces` within `tokens`.
/// Returns (start, surface-index) pairs in left-to-right order.
pub(crate) fn longest_leftmost_spans(
    tokens: &[String],
    surfaces: &[&[String]],
) -> Vec<(usize, usize)> {
    // Longer surfaces take priority at each position; ties by surface
    // order are irrelevant since surfaces are distinct.
    let mut by_len: Vec<usize> = (0..surfaces.len()).collect();
    by_len.sort_by(|&a, &b| surfaces[b].len().cmp(&surfaces[a].len()).then(a.cmp(&b)));

    let mut spans = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let hit = by_len.iter().copied().find(|&s| {
            let surf = surfaces[s];
            !surf.is_empty() && tokens[i..].starts_with(surf)
        });
        match hit {
            Some(s) => {
                spans.push((i, s));
                i += surfaces[s].len();
            }
            None => i += 1,
        }
    }
    spans
}

/// Matches gazetteer surfaces against every document's tokens.
/// Longest-match-first, leftmost; matched spans do not overlap; each
/// surface is recorded at most once per document.
pub fn gazetteer_match(
    corpus: &Corpus,
    gazetteer: &[NamedEntity],
) -> Result<NeAnnotations, NeProviderError> {
    if gazetteer.is_empty() {
        return Err(NeProviderError::EmptyGazetteer);
    }
    let surfaces: Vec<&[String]> = gazetteer.iter().map(|e| e.surface.as_slice()).collect();
    let mut annotations = NeAnnotations::default();
    for doc in &corpus.docs {
        for (_, idx) in longest_leftmost_spans(&doc.tokens, &surfaces) {
            annotations.insert(&doc.id, gazetteer[idx].clone());
        }
    }
    Ok(annotations)
}
