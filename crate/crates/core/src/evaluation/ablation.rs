//! With/without-NE-tagging ablation: runs each model spec on the plain
//! corpus and on the tagged corpus, sharing preprocessing, and reports
//! per-condition metrics plus deltas.
//!
//! The without-NEs arm is computed before the polarity map is even
//! consulted, so it cannot be influenced by it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{evaluate, percent, EvalError, MetricsReport};
use crate::corpus::{Corpus, Document, Polarity, Split};
use crate::lexicon::{
    add_ne_tags, dp_score, merge_lexicons, sfs_score, Lexicon, LexiconError, Scheme, TiePolicy,
};
use crate::ne_provider::NeAnnotations;
use crate::ne_sentiment::{
    detect_ne_polarity, tag_entities, NePolarityMap, NeSentimentError, Scope,
};
use crate::supervised::{
    build_feature_space, predict_nb, predict_svm, train_nb, train_svm, vectorize, FeatureVector,
    NGramConfig, SupervisedError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Nb,
    Svm,
    LexiconSfs,
    LexiconDp,
}

impl ModelSpec {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelSpec::Nb => "nb",
            ModelSpec::Svm => "svm",
            ModelSpec::LexiconSfs => "lexicon_sfs",
            ModelSpec::LexiconDp => "lexicon_dp",
        }
    }

    pub fn parse(s: &str) -> Option<ModelSpec> {
        match s {
            "nb" => Some(ModelSpec::Nb),
            "svm" => Some(ModelSpec::Svm),
            "lexicon_sfs" => Some(ModelSpec::LexiconSfs),
            "lexicon_dp" => Some(ModelSpec::LexiconDp),
            _ => None,
        }
    }

    fn is_lexicon(&self) -> bool {
        matches!(self, ModelSpec::LexiconSfs | ModelSpec::LexiconDp)
    }
}

#[derive(Debug, Clone)]
pub struct AblationConfig {
    pub dataset_name: String,
    pub scope: Scope,
    pub tie_policy: TiePolicy,
    pub seed: u64,
    pub svm_reg: f64,
    pub svm_epochs: usize,
    pub tf_thresholds: Vec<usize>,
    /// Replaces the internally mined polarity map in the NEs=Yes arm.
    pub polarity_map_override: Option<NePolarityMap>,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            dataset_name: "dataset".to_string(),
            scope: Scope::TrainOnly,
            tie_policy: TiePolicy::Negative,
            seed: 42,
            svm_reg: crate::supervised::DEFAULT_REG,
            svm_epochs: crate::supervised::DEFAULT_EPOCHS,
            tf_thresholds: vec![1, 2, 3],
            polarity_map_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub dataset: String,
    pub nes: String,
    pub model: String,
    pub features: String,
    pub metrics: MetricsReport,
    /// Macro-F1 difference against the matching NEs=No row.
    pub delta_macro_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub scope: Scope,
    /// Set when the polarity map was mined with test labels in scope.
    pub leakage_warning: bool,
    pub neutral_excluded: usize,
}

#[derive(Debug, Error)]
pub enum AblationError {
    #[error("no model specs configured")]
    NoModelSpecs,
    #[error("test split is empty after excluding neutral documents")]
    EmptyTestSplit,
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Supervised(#[from] SupervisedError),
    #[error(transparent)]
    NeSentiment(#[from] NeSentimentError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn binary_docs(corpus: &Corpus, split: Split) -> Vec<&Document> {
    corpus
        .split_docs(split)
        .filter(|d| d.gold != Polarity::Neutral)
        .collect()
}

/// Scores one test document with a lexicon model. An abstaining tie
/// policy falls back to negative so every document receives a label.
pub fn lexicon_predict(
    tokens: &[String],
    lexicon: &Lexicon,
    spec: ModelSpec,
    scheme: Scheme,
    tie_policy: TiePolicy,
) -> Result<Polarity, LexiconError> {
    Ok(match spec {
        ModelSpec::LexiconDp => dp_score(tokens, lexicon, scheme)?,
        _ => sfs_score(tokens, lexicon, scheme, tie_policy)
            .1
            .unwrap_or(Polarity::Negative),
    })
}

fn eval_lexicon_arm(
    test_docs: &[&Document],
    lexicon: &Lexicon,
    spec: ModelSpec,
    tie_policy: TiePolicy,
) -> Result<(MetricsReport, String), AblationError> {
    let golds: Vec<Polarity> = test_docs.iter().map(|d| d.gold).collect();
    let mut best: Option<(MetricsReport, String)> = None;
    for scheme in [Scheme::Uni, Scheme::UniBi] {
        let preds = test_docs
            .iter()
            .map(|d| lexicon_predict(&d.tokens, lexicon, spec, scheme, tie_policy))
            .collect::<Result<Vec<_>, _>>()?;
        let metrics = evaluate(&preds, &golds)?;
        if best.as_ref().is_none_or(|(m, _)| metrics.macro_f1 > m.macro_f1) {
            best = Some((metrics, scheme.as_str().to_string()));
        }
    }
    Ok(best.expect("at least one scheme"))
}

fn order_combinations() -> [&'static [usize]; 7] {
    [
        &[1],
        &[2],
        &[3],
        &[1, 2],
        &[1, 3],
        &[2, 3],
        &[1, 2, 3],
    ]
}

fn eval_supervised_arm(
    train_docs: &[&Document],
    test_docs: &[&Document],
    spec: ModelSpec,
    cfg: &AblationConfig,
) -> Result<(MetricsReport, String), AblationError> {
    let train_labels: Vec<Polarity> = train_docs.iter().map(|d| d.gold).collect();
    let golds: Vec<Polarity> = test_docs.iter().map(|d| d.gold).collect();
    let mut best: Option<(MetricsReport, String)> = None;
    for orders in order_combinations() {
        for &threshold in &cfg.tf_thresholds {
            let ngram = NGramConfig::new(orders, threshold)?;
            let space = build_feature_space(train_docs.iter().copied(), &ngram)?;
            let train_vectors: Vec<FeatureVector> = train_docs
                .iter()
                .map(|d| vectorize(&d.tokens, &space))
                .collect();
            let preds: Vec<Polarity> = match spec {
                ModelSpec::Nb => {
                    let model = train_nb(&train_vectors, &train_labels, space.len())?;
                    test_docs
                        .iter()
                        .map(|d| {
                            predict_nb(&model, &vectorize(&d.tokens, &space)).map(|(p, _)| p)
                        })
                        .collect::<Result<_, _>>()?
                }
                _ => {
                    let model = train_svm(
                        &train_vectors,
                        &train_labels,
                        space.len(),
                        cfg.svm_reg,
                        cfg.svm_epochs,
                        cfg.seed,
                    )?;
                    test_docs
                        .iter()
                        .map(|d| predict_svm(&model, &vectorize(&d.tokens, &space)))
                        .collect::<Result<_, _>>()?
                }
            };
            let metrics = evaluate(&preds, &golds)?;
            if best.as_ref().is_none_or(|(m, _)| metrics.macro_f1 > m.macro_f1) {
                best = Some((metrics, ngram.describe()));
            }
        }
    }
    Ok(best.expect("non-empty sweep"))
}

fn eval_arm(
    corpus: &Corpus,
    lexicon: Option<&Lexicon>,
    spec: ModelSpec,
    cfg: &AblationConfig,
) -> Result<(MetricsReport, String), AblationError> {
    let test_docs = binary_docs(corpus, Split::Test);
    if test_docs.is_empty() {
        return Err(AblationError::EmptyTestSplit);
    }
    if spec.is_lexicon() {
        let lexicon = lexicon.ok_or(AblationError::Lexicon(LexiconError::EmptyList))?;
        eval_lexicon_arm(&test_docs, lexicon, spec, cfg.tie_policy)
    } else {
        let train_docs = binary_docs(corpus, Split::Train);
        eval_supervised_arm(&train_docs, &test_docs, spec, cfg)
    }
}

/// Runs every model spec on both arms. The polarity map is mined with
/// `cfg.scope` (or taken from the override) and used only by the
/// NEs=Yes arm.
pub fn run_ablation(
    corpus: &Corpus,
    annotations: &NeAnnotations,
    lexicons: &[Lexicon],
    specs: &[ModelSpec],
    cfg: &AblationConfig,
) -> Result<AblationReport, AblationError> {
    if specs.is_empty() {
        return Err(AblationError::NoModelSpecs);
    }
    let needs_lexicon = specs.iter().any(ModelSpec::is_lexicon);
    let base_lexicon = if needs_lexicon {
        Some(merge_lexicons(lexicons)?)
    } else {
        None
    };

    // NEs=No arm first, before the polarity map exists.
    let mut no_rows = Vec::new();
    for &spec in specs {
        let (metrics, features) = eval_arm(corpus, base_lexicon.as_ref(), spec, cfg)?;
        no_rows.push((spec, metrics, features));
    }

    let map = match &cfg.polarity_map_override {
        Some(map) => map.clone(),
        None => detect_ne_polarity(corpus, annotations, cfg.scope)?.0,
    };
    let tagged_corpus = tag_entities(corpus, &map);
    let tagged_lexicon = base_lexicon.as_ref().map(add_ne_tags).transpose()?;

    let mut rows = Vec::new();
    let neutral_excluded = corpus
        .docs
        .iter()
        .filter(|d| d.gold == Polarity::Neutral)
        .count();
    for (spec, no_metrics, no_features) in no_rows {
        let (yes_metrics, yes_features) = eval_arm(
            &tagged_corpus,
            tagged_lexicon.as_ref().or(base_lexicon.as_ref()),
            spec,
            cfg,
        )?;
        rows.push(AblationRow {
            dataset: cfg.dataset_name.clone(),
            nes: "No".to_string(),
            model: spec.as_str().to_string(),
            features: no_features,
            metrics: no_metrics,
            delta_macro_f1: None,
        });
        rows.push(AblationRow {
            dataset: cfg.dataset_name.clone(),
            nes: "Yes".to_string(),
            model: spec.as_str().to_string(),
            features: yes_features,
            metrics: yes_metrics,
            delta_macro_f1: Some(yes_metrics.macro_f1 - no_metrics.macro_f1),
        });
    }
    Ok(AblationReport {
        rows,
        scope: cfg.scope,
        leakage_warning: cfg.scope == Scope::AllLabeled,
        neutral_excluded,
    })
}

impl AblationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Aligned plain-text table: Dataset, NEs, Features, then the four
    /// percentage columns rounded half-up to one decimal.
    pub fn render_table(&self) -> String {
        let header = [
            "Dataset".to_string(),
            "NEs".to_string(),
            "Features".to_string(),
            "Prec (%)".to_string(),
            "Rec (%)".to_string(),
            "F1 (%)".to_string(),
            "Acc (%)".to_string(),
        ];
        let mut table: Vec<[String; 7]> = vec![header];
        for row in &self.rows {
            let features = if row.model.starts_with("lexicon") {
                row.features.clone()
            } else {
                format!("{} {}", row.model, row.features)
            };
            table.push([
                row.dataset.clone(),
                row.nes.clone(),
                features,
                format!("{:.1}", percent(row.metrics.macro_precision)),
                format!("{:.1}", percent(row.metrics.macro_recall)),
                format!("{:.1}", percent(row.metrics.macro_f1)),
                format!("{:.1}", percent(row.metrics.accuracy)),
            ]);
        }
        let mut widths = [0usize; 7];
        for row in &table {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(widths.iter().copied())
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        if self.leakage_warning {
            out.push_str(
                "note: polarity map mined over all labeled documents, including test labels\n",
            );
        }
        out
    }
}
