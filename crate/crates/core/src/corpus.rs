//! Labeled sentence-level corpora with train/test splits.
//!
//! The canonical interchange format is JSONL with one record per line:
//! `{"id": str, "text": str, "label": str, "split": str}`. A 4-column
//! tab-separated format (id, text, label, split; no header) is accepted
//! as a convenience.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentence-level sentiment label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    pub fn parse(s: &str) -> Option<Polarity> {
        match s {
            "positive" => Some(Polarity::Positive),
            "negative" => Some(Polarity::Negative),
            "neutral" => Some(Polarity::Neutral),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Train/test split assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "test" => Some(Split::Test),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// One tweet/comment with its gold label and split assignment.
///
/// `tokens` is empty until the preprocessing pipeline has run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub gold: Polarity,
    pub split: Split,
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub docs: Vec<Document>,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("record {record}: missing field `{field}`")]
    MissingField { record: usize, field: &'static str },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("unknown label `{0}` (expected positive|negative|neutral)")]
    BadLabel(String),
    #[error("unknown split `{0}` (expected train|test)")]
    BadSplit(String),
    #[error("record {record}: malformed line: {reason}")]
    BadRecord { record: usize, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize, Serialize)]
struct JsonRecord {
    id: String,
    text: String,
    label: String,
    split: String,
}

/// Per-(split, polarity) document counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SplitSummary {
    counts: [[usize; 3]; 2],
}

impl SplitSummary {
    pub fn count(&self, split: Split, polarity: Polarity) -> usize {
        self.counts[split as usize][polarity as usize]
    }

    pub fn split_total(&self, split: Split) -> usize {
        self.counts[split as usize].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

impl Corpus {
    pub fn new(docs: Vec<Document>, provenance: impl Into<String>) -> Result<Corpus, CorpusError> {
        let mut seen = HashSet::new();
        for doc in &docs {
            if !seen.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus {
            docs,
            provenance: provenance.into(),
        })
    }

    pub fn load(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus, CorpusError> {
        let path = path.as_ref();
        let content = fs::read_to_string(path)?;
        let mut docs = Vec::new();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (id, text, label, split) = match format {
                CorpusFormat::Jsonl => parse_json_line(i, line)?,
                CorpusFormat::Tsv => parse_tsv_line(i, line)?,
            };
            let gold = Polarity::parse(&label).ok_or(CorpusError::BadLabel(label))?;
            let split = Split::parse(&split).ok_or(CorpusError::BadSplit(split))?;
            docs.push(Document {
                id,
                raw_text: text,
                tokens: Vec::new(),
                gold,
                split,
            });
        }
        Corpus::new(docs, path.display().to_string())
    }

    /// Writes the corpus in the canonical JSONL interchange format.
    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let mut out = fs::File::create(path)?;
        for doc in &self.docs {
            let rec = JsonRecord {
                id: doc.id.clone(),
                text: doc.raw_text.clone(),
                label: doc.gold.as_str().to_string(),
                split: doc.split.as_str().to_string(),
            };
            let line = serde_json::to_string(&rec).expect("record serialization");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn split_summary(&self) -> SplitSummary {
        let mut summary = SplitSummary::default();
        for doc in &self.docs {
            summary.counts[doc.split as usize][doc.gold as usize] += 1;
        }
        summary
    }

    pub fn split_docs(&self, split: Split) -> impl Iterator<Item = &Document> {
        self.docs.iter().filter(move |d| d.split == split)
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

fn parse_json_line(
    record: usize,
    line: &str,
) -> Result<(String, String, String, String), CorpusError> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| CorpusError::BadRecord {
            record,
            reason: e.to_string(),
        })?;
    let field = |name: &'static str| -> Result<String, CorpusError> {
        value
            .get(name)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or(CorpusError::MissingField {
                record,
                field: name,
            })
    };
    Ok((field("id")?, field("text")?, field("label")?, field("split")?))
}

fn parse_tsv_line(
    record: usize,
    line: &str,
) -> Result<(String, String, String, String), CorpusError> {
    let mut parts = line.split('\t');
    let mut next = |field: &'static str| -> Result<String, CorpusError> {
        parts
            .next()
            .map(str::to_string)
            .ok_or(CorpusError::MissingField { record, field })
    };
    Ok((next("id")?, next("text")?, next("label")?, next("split")?))
}
