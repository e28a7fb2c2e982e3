//! Supervised classification: n-gram presence features with term-frequency
//! selection, Bernoulli naive Bayes, and a linear SVM trained by seeded
//! stochastic subgradient descent.

mod nb;
mod svm;

pub use nb::{predict_nb, train_nb, NbModel};
pub use svm::{predict_svm, svm_objective, train_svm, SvmModel, DEFAULT_EPOCHS, DEFAULT_REG};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Polarity};

/// Which n-gram orders to extract and the minimum training-corpus
/// occurrence count a key needs to enter the feature space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramConfig {
    pub orders: Vec<usize>,
    pub tf_threshold: usize,
}

impl NGramConfig {
    pub fn new(orders: &[usize], tf_threshold: usize) -> Result<NGramConfig, SupervisedError> {
        let mut orders = orders.to_vec();
        orders.sort_unstable();
        orders.dedup();
        if orders.is_empty() || orders.contains(&0) {
            return Err(SupervisedError::BadNGramConfig(
                "orders must be a non-empty set of positive integers".into(),
            ));
        }
        if tf_threshold == 0 {
            return Err(SupervisedError::BadNGramConfig(
                "tf_threshold must be at least 1".into(),
            ));
        }
        Ok(NGramConfig {
            orders,
            tf_threshold,
        })
    }

    /// Short descriptor such as `uni+bi,tf2` for reports.
    pub fn describe(&self) -> String {
        let names: Vec<&str> = self
            .orders
            .iter()
            .map(|o| match o {
                1 => "uni",
                2 => "bi",
                3 => "tri",
                _ => "n",
            })
            .collect();
        format!("{},tf{}", names.join("+"), self.tf_threshold)
    }
}

/// Deterministically ordered n-gram keys with a reverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpace {
    keys: Vec<Vec<String>>,
    index: BTreeMap<Vec<String>, usize>,
    config: NGramConfig,
}

impl FeatureSpace {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[Vec<String>] {
        &self.keys
    }

    pub fn config(&self) -> &NGramConfig {
        &self.config
    }

    pub fn index_of(&self, key: &[String]) -> Option<usize> {
        self.index.get(key).copied()
    }

    fn from_keys(keys: Vec<Vec<String>>, config: NGramConfig) -> FeatureSpace {
        let index = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        FeatureSpace {
            keys,
            index,
            config,
        }
    }
}

/// Binary presence vector: sorted active column indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    indices: Vec<usize>,
}

impl FeatureVector {
    pub fn from_indices(mut indices: Vec<usize>) -> FeatureVector {
        indices.sort_unstable();
        indices.dedup();
        FeatureVector { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_active(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }
}

#[derive(Debug, Error)]
pub enum SupervisedError {
    #[error("invalid n-gram config: {0}")]
    BadNGramConfig(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("training data is missing class {0}")]
    MissingClass(Polarity),
    #[error("regularization strength must be positive")]
    NonPositiveReg,
    #[error("vector index {index} out of range for feature space of size {dim}")]
    DimensionMismatch { index: usize, dim: usize },
    #[error("training labels must be binary, found {0}")]
    NonBinaryLabel(Polarity),
    #[error("malformed model artifact: {0}")]
    BadArtifact(String),
}

pub(crate) fn ngrams_of(tokens: &[String], order: usize) -> impl Iterator<Item = &[String]> {
    tokens.windows(order)
}

/// Builds the feature space from training documents: every n-gram of a
/// requested order whose total occurrence count meets the threshold.
/// Keys are ordered lexicographically, which is deterministic.
pub fn build_feature_space<'a>(
    train_docs: impl IntoIterator<Item = &'a Document>,
    config: &NGramConfig,
) -> Result<FeatureSpace, SupervisedError> {
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut any = false;
    for doc in train_docs {
        any = true;
        for &order in &config.orders {
            for gram in ngrams_of(&doc.tokens, order) {
                *counts.entry(gram.to_vec()).or_insert(0) += 1;
            }
        }
    }
    if !any {
        return Err(SupervisedError::EmptyTrainingSet);
    }
    let keys: Vec<Vec<String>> = counts
        .into_iter()
        .filter(|(_, c)| *c >= config.tf_threshold)
        .map(|(k, _)| k)
        .collect();
    Ok(FeatureSpace::from_keys(keys, config.clone()))
}

/// Maps a document onto the space: a column is active iff its key occurs
/// at least once among the document's n-grams.
pub fn vectorize(tokens: &[String], space: &FeatureSpace) -> FeatureVector {
    let mut indices = Vec::new();
    for &order in &space.config.orders {
        for gram in ngrams_of(tokens, order) {
            if let Some(i) = space.index_of(gram) {
                indices.push(i);
            }
        }
    }
    FeatureVector::from_indices(indices)
}

fn check_binary(labels: &[Polarity]) -> Result<(), SupervisedError> {
    if let Some(l) = labels.iter().find(|l| **l == Polarity::Neutral) {
        return Err(SupervisedError::NonBinaryLabel(*l));
    }
    for class in [Polarity::Positive, Polarity::Negative] {
        if !labels.contains(&class) {
            return Err(SupervisedError::MissingClass(class));
        }
    }
    Ok(())
}

fn check_dims(vector: &FeatureVector, dim: usize) -> Result<(), SupervisedError> {
    match vector.max_index() {
        Some(max) if max >= dim => Err(SupervisedError::DimensionMismatch { index: max, dim }),
        _ => Ok(()),
    }
}

/// A trained model together with its feature space, in the form the
/// model artifact file stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelArtifact {
    Nb {
        ngram: NGramConfig,
        feature_space: Vec<Vec<String>>,
        params: NbModel,
    },
    Svm {
        ngram: NGramConfig,
        feature_space: Vec<Vec<String>>,
        params: SvmModel,
    },
}

impl ModelArtifact {
    pub fn feature_space(&self) -> Result<FeatureSpace, SupervisedError> {
        let (keys, ngram) = match self {
            ModelArtifact::Nb {
                feature_space,
                ngram,
                ..
            }
            | ModelArtifact::Svm {
                feature_space,
                ngram,
                ..
            } => (feature_space.clone(), ngram.clone()),
        };
        Ok(FeatureSpace::from_keys(keys, ngram))
    }

    /// Re-checks model invariants; used after deserialization.
    pub fn validate(&self) -> Result<(), SupervisedError> {
        match self {
            ModelArtifact::Nb {
                feature_space,
                params,
                ..
            } => params.validate(feature_space.len()),
            ModelArtifact::Svm {
                feature_space,
                params,
                ..
            } => params.validate(feature_space.len()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization")
    }

    pub fn from_json(json: &str) -> Result<ModelArtifact, SupervisedError> {
        let artifact: ModelArtifact =
            serde_json::from_str(json).map_err(|e| SupervisedError::BadArtifact(e.to_string()))?;
        artifact.validate()?;
        Ok(artifact)
    }
}
