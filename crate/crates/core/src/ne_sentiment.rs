//! Named-entity polarity mining by majority of attitudes, and PosNE/NegNE
//! corpus tagging.
//!
//! Each distinct entity surface is scored over the labeled documents that
//! contain it as a contiguous token subsequence: +1 per positive document,
//! -1 per negative, 0 per neutral. A positive total assigns the entity
//! positive polarity, a negative total negative polarity; ties stay
//! unassigned and are never tagged.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Document, Polarity, Split};
use crate::ne_provider::{longest_leftmost_spans, NeAnnotations, NeProviderError};

/// Tag token substituted for positively assigned entities.
pub const POS_TAG: &str = "PosNE";
/// Tag token substituted for negatively assigned entities.
pub const NEG_TAG: &str = "NegNE";

/// Which documents contribute mention counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum Scope {
    /// Train split only (no test-label leakage). The default.
    #[default]
    TrainOnly,
    /// Every labeled document, both splits.
    AllLabeled,
}


/// Mention tally for one entity surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeScore {
    pub surface: Vec<String>,
    pub score: i64,
    pub pos_mentions: usize,
    pub neg_mentions: usize,
    pub neu_mentions: usize,
}

/// Mined surface -> polarity assignments plus the tied leftovers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NePolarityMap {
    pub assigned: std::collections::BTreeMap<Vec<String>, Polarity>,
    pub unassigned: Vec<Vec<String>>,
}

impl NePolarityMap {
    pub fn polarity_of(&self, surface: &[String]) -> Option<Polarity> {
        self.assigned.get(surface).copied()
    }

    pub fn len(&self) -> usize {
        self.assigned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assigned.is_empty()
    }
}

/// Counts mirroring the mined-entity statistics report: extracted
/// surfaces, positive/negative assignments, and total annotated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NeStats {
    pub e_nes: usize,
    pub pos_nes: usize,
    pub neg_nes: usize,
    pub a_nes: usize,
}

#[derive(Debug, Error)]
pub enum NeSentimentError {
    #[error(transparent)]
    Provider(#[from] NeProviderError),
    #[error("no documents in the selected scope")]
    EmptyScope,
}

fn contains_subsequence(tokens: &[String], surface: &[String]) -> bool {
    !surface.is_empty()
        && tokens
            .windows(surface.len())
            .any(|window| window == surface)
}

fn in_scope(doc: &Document, scope: Scope) -> bool {
    match scope {
        Scope::TrainOnly => doc.split == Split::Train,
        Scope::AllLabeled => true,
    }
}

/// Runs the majority-of-attitudes scoring over the corpus.
///
/// The annotations supply the entity universe; each surface is then
/// tallied over every in-scope document containing it. Documents are
/// counted once regardless of how many times the surface occurs.
pub fn detect_ne_polarity(
    corpus: &Corpus,
    annotations: &NeAnnotations,
    scope: Scope,
) -> Result<(NePolarityMap, Vec<NeScore>, NeStats), NeSentimentError> {
    annotations.resolve_against(corpus)?;
    let scoped: Vec<&Document> = corpus.docs.iter().filter(|d| in_scope(d, scope)).collect();
    if scoped.is_empty() {
        return Err(NeSentimentError::EmptyScope);
    }

    let scoped_ids: BTreeSet<&str> = scoped.iter().map(|d| d.id.as_str()).collect();
    let surfaces: BTreeSet<Vec<String>> = annotations
        .doc_ids()
        .filter(|id| scoped_ids.contains(id.as_str()))
        .flat_map(|id| annotations.entities_for(id))
        .map(|e| e.surface.clone())
        .collect();

    let mut map = NePolarityMap::default();
    let mut scores = Vec::new();
    for surface in surfaces {
        let mut tally = NeScore {
            surface: surface.clone(),
            score: 0,
            pos_mentions: 0,
            neg_mentions: 0,
            neu_mentions: 0,
        };
        for doc in &scoped {
            if contains_subsequence(&doc.tokens, &surface) {
                match doc.gold {
                    Polarity::Positive => tally.pos_mentions += 1,
                    Polarity::Negative => tally.neg_mentions += 1,
                    Polarity::Neutral => tally.neu_mentions += 1,
                }
            }
        }
        tally.score = tally.pos_mentions as i64 - tally.neg_mentions as i64;
        match tally.score.cmp(&0) {
            std::cmp::Ordering::Greater => {
                map.assigned.insert(surface, Polarity::Positive);
            }
            std::cmp::Ordering::Less => {
                map.assigned.insert(surface, Polarity::Negative);
            }
            std::cmp::Ordering::Equal => map.unassigned.push(surface),
        }
        scores.push(tally);
    }

    let pos = map
        .assigned
        .values()
        .filter(|p| **p == Polarity::Positive)
        .count();
    let neg = map.assigned.len() - pos;
    let stats = NeStats {
        e_nes: scores.len(),
        pos_nes: pos,
        neg_nes: neg,
        a_nes: map.assigned.len(),
    };
    Ok((map, scores, stats))
}

/// Replaces every non-overlapping occurrence of an assigned entity
/// surface, in both splits, with the single PosNE or NegNE token.
/// Unassigned (tied) surfaces are left untouched. Returns a new corpus.
pub fn tag_entities(corpus: &Corpus, map: &NePolarityMap) -> Corpus {
    let surfaces: Vec<&[String]> = map.assigned.keys().map(|s| s.as_slice()).collect();
    let polarities: Vec<Polarity> = map.assigned.values().copied().collect();
    let mut out = corpus.clone();
    for doc in &mut out.docs {
        let spans = longest_leftmost_spans(&doc.tokens, &surfaces);
        if spans.is_empty() {
            continue;
        }
        let mut tokens = Vec::with_capacity(doc.tokens.len());
        let mut next_span = spans.iter().peekable();
        let mut i = 0;
        while i < doc.tokens.len() {
            match next_span.peek() {
                Some(&&(start, idx)) if start == i => {
                    tokens.push(
                        match polarities[idx] {
                            Polarity::Positive => POS_TAG,
                            _ => NEG_TAG,
                        }
                        .to_string(),
                    );
                    i += surfaces[idx].len();
                    next_span.next();
                }
                _ => {
                    tokens.push(doc.tokens[i].clone());
                    i += 1;
                }
            }
        }
        doc.tokens = tokens;
    }
    out
}

#[derive(Serialize)]
struct PolarityLine<'a> {
    surface: String,
    polarity: Option<&'a str>,
    score: i64,
    pos: usize,
    neg: usize,
    neu: usize,
}

/// Writes one JSONL line per scored surface (assigned and tied), sorted
/// by surface for reproducible output.
pub fn write_polarity_map(
    scores: &[NeScore],
    map: &NePolarityMap,
    mut out: impl Write,
) -> std::io::Result<()> {
    let mut sorted: Vec<&NeScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.surface.cmp(&b.surface));
    for score in sorted {
        let line = PolarityLine {
            surface: score.surface.join(" "),
            polarity: map.polarity_of(&score.surface).map(|p| p.as_str()),
            score: score.score,
            pos: score.pos_mentions,
            neg: score.neg_mentions,
            neu: score.neu_mentions,
        };
        writeln!(out, "{}", serde_json::to_string(&line).expect("line"))?;
    }
    Ok(())
}
