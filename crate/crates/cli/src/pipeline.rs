//! Command implementations. Stage order is fixed: normalize -> tokenize
//! -> NE detect (configured scope) -> tag (both splits) -> features or
//! lexicon lookup -> classify -> evaluate.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use nesent_core::corpus::{Corpus, Polarity, Split};
use nesent_core::evaluation::{evaluate, percent, run_ablation, AblationConfig, ModelSpec};
use nesent_core::lexicon::{
    add_ne_tags, dp_weights, load_lexicon, merge_lexicons, segment_and_match, sfs_score, Lexicon,
};
use nesent_core::ne_provider::{gazetteer_match, load_annotations, load_gazetteer, NeAnnotations};
use nesent_core::ne_sentiment::{
    detect_ne_polarity, tag_entities, write_polarity_map, NePolarityMap,
};
use nesent_core::preprocess::preprocess_corpus;
use nesent_core::supervised::{
    build_feature_space, predict_nb, train_nb, train_svm, vectorize, FeatureVector, ModelArtifact,
    NGramConfig,
};

use crate::config::{AnnotationsSource, RunConfig};

fn load_corpus(config: &RunConfig) -> Result<Corpus> {
    let corpus = Corpus::load(&config.corpus.path, config.corpus.format()?)?;
    Ok(preprocess_corpus(&corpus, &config.normalization))
}

fn load_ne_annotations(config: &RunConfig, corpus: &Corpus) -> Result<NeAnnotations> {
    match &config.annotations {
        None => Ok(NeAnnotations::default()),
        Some(AnnotationsSource::File(path)) => {
            let annotations = load_annotations(path, &config.normalization)?;
            annotations.resolve_against(corpus)?;
            Ok(annotations)
        }
        Some(AnnotationsSource::Gazetteer(path)) => {
            let gazetteer = load_gazetteer(path, &config.normalization)?;
            Ok(gazetteer_match(corpus, &gazetteer)?)
        }
    }
}

fn mine_polarity_map(config: &RunConfig, corpus: &Corpus) -> Result<NePolarityMap> {
    let annotations = load_ne_annotations(config, corpus)?;
    let (map, _, _) = detect_ne_polarity(corpus, &annotations, config.ne_scope)?;
    Ok(map)
}

fn merged_lexicon(config: &RunConfig) -> Result<Lexicon> {
    let lexicons = config
        .lexicons
        .iter()
        .map(|p| load_lexicon(p, &config.normalization).map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_lexicons(&lexicons)?)
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `ne-polarity`: mine the map, write ne_polarity.jsonl and
/// ne_stats.json.
pub fn cmd_ne_polarity(config: &RunConfig) -> Result<()> {
    config.write_effective()?;
    let corpus = load_corpus(config)?;
    let annotations = load_ne_annotations(config, &corpus)?;
    let (map, scores, stats) = detect_ne_polarity(&corpus, &annotations, config.ne_scope)?;
    let mut jsonl = Vec::new();
    write_polarity_map(&scores, &map, &mut jsonl)?;
    write_output(
        &config.output_dir,
        "ne_polarity.jsonl",
        &String::from_utf8(jsonl).expect("utf8"),
    )?;
    write_output(
        &config.output_dir,
        "ne_stats.json",
        &serde_json::to_string_pretty(&stats)?,
    )?;
    Ok(())
}

/// `tag`: write the corpus with assigned entities replaced by tag
/// tokens, text rebuilt from tokens.
pub fn cmd_tag(config: &RunConfig) -> Result<()> {
    config.write_effective()?;
    let corpus = load_corpus(config)?;
    let map = mine_polarity_map(config, &corpus)?;
    let mut tagged = tag_entities(&corpus, &map);
    for doc in &mut tagged.docs {
        doc.raw_text = doc.tokens.join(" ");
    }
    let path = config.output_dir.join("tagged_corpus.jsonl");
    fs::create_dir_all(&config.output_dir)?;
    tagged.save_jsonl(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn prepared_corpus(config: &RunConfig) -> Result<Corpus> {
    let corpus = load_corpus(config)?;
    if config.use_nes {
        let map = mine_polarity_map(config, &corpus)?;
        Ok(tag_entities(&corpus, &map))
    } else {
        Ok(corpus)
    }
}

fn binary_split(corpus: &Corpus, split: Split) -> (Vec<&nesent_core::corpus::Document>, usize) {
    let all: Vec<_> = corpus.split_docs(split).collect();
    let total = all.len();
    let binary: Vec<_> = all
        .into_iter()
        .filter(|d| d.gold != Polarity::Neutral)
        .collect();
    let excluded = total - binary.len();
    (binary, excluded)
}

/// `train`: fit one supervised model with the configured n-gram setup
/// and write the self-describing artifact.
pub fn cmd_train(config: &RunConfig, model: &str) -> Result<()> {
    config.write_effective()?;
    let corpus = prepared_corpus(config)?;
    let (train_docs, excluded) = binary_split(&corpus, Split::Train);
    if excluded > 0 {
        println!("excluded {excluded} neutral training documents");
    }
    let ngram = NGramConfig::new(&config.ngram.orders, config.ngram.tf_threshold)?;
    let space = build_feature_space(train_docs.iter().copied(), &ngram)?;
    println!(
        "n-gram configuration: {} ({} features)",
        ngram.describe(),
        space.len()
    );
    let labels: Vec<Polarity> = train_docs.iter().map(|d| d.gold).collect();
    let vectors: Vec<FeatureVector> = train_docs
        .iter()
        .map(|d| vectorize(&d.tokens, &space))
        .collect();
    let artifact = match model {
        "nb" => ModelArtifact::Nb {
            ngram: ngram.clone(),
            feature_space: space.keys().to_vec(),
            params: train_nb(&vectors, &labels, space.len())?,
        },
        "svm" => ModelArtifact::Svm {
            ngram: ngram.clone(),
            feature_space: space.keys().to_vec(),
            params: train_svm(
                &vectors,
                &labels,
                space.len(),
                config.svm.reg,
                config.svm.epochs,
                config.seed,
            )?,
        },
        other => bail!("unknown model `{other}` (expected nb|svm)"),
    };
    write_output(
        &config.output_dir,
        &format!("model_{model}.json"),
        &artifact.to_json(),
    )?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PredictionRecord {
    id: String,
    predicted: String,
    score: f64,
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn classify_with_lexicon(
    config: &RunConfig,
    corpus: &Corpus,
    spec: ModelSpec,
) -> Result<Vec<PredictionRecord>> {
    let mut lexicon = merged_lexicon(config)?;
    if config.use_nes {
        lexicon = add_ne_tags(&lexicon)?;
    }
    let scheme = config.scheme;
    let mut records = Vec::new();
    for doc in corpus.split_docs(Split::Test) {
        let (predicted, score) = match spec {
            ModelSpec::LexiconDp => {
                let mut pos = Rational64::new(0, 1);
                let mut neg = Rational64::new(0, 1);
                for entry in segment_and_match(&doc.tokens, &lexicon, scheme) {
                    let w = dp_weights(entry)?;
                    pos += w.pos_weight;
                    neg += w.neg_weight;
                }
                let polarity = nesent_core::lexicon::dp_score(&doc.tokens, &lexicon, scheme)?;
                (polarity, rational_to_f64(pos + neg))
            }
            _ => {
                let (score, polarity) =
                    sfs_score(&doc.tokens, &lexicon, scheme, config.tie_policy);
                (
                    polarity.unwrap_or(Polarity::Negative),
                    rational_to_f64(score),
                )
            }
        };
        records.push(PredictionRecord {
            id: doc.id.clone(),
            predicted: predicted.as_str().to_string(),
            score,
        });
    }
    Ok(records)
}

fn classify_with_model(
    corpus: &Corpus,
    artifact_path: &Path,
) -> Result<Vec<PredictionRecord>> {
    let artifact = ModelArtifact::from_json(&fs::read_to_string(artifact_path)?)?;
    let space = artifact.feature_space()?;
    let mut records = Vec::new();
    for doc in corpus.split_docs(Split::Test) {
        let vector = vectorize(&doc.tokens, &space);
        let (predicted, score) = match &artifact {
            ModelArtifact::Nb { params, .. } => {
                let (polarity, posterior) = predict_nb(params, &vector)?;
                (polarity, posterior[0])
            }
            ModelArtifact::Svm { params, .. } => {
                let margin: f64 =
                    params.bias + vector.indices().iter().map(|&i| params.weights[i]).sum::<f64>();
                let polarity = nesent_core::supervised::predict_svm(params, &vector)?;
                (polarity, margin)
            }
        };
        records.push(PredictionRecord {
            id: doc.id.clone(),
            predicted: predicted.as_str().to_string(),
            score,
        });
    }
    Ok(records)
}

/// `classify`: predict the test split with a lexicon scorer or a saved
/// model artifact; writes predictions.jsonl.
pub fn cmd_classify(config: &RunConfig, with: &str) -> Result<()> {
    config.write_effective()?;
    let corpus = prepared_corpus(config)?;
    if corpus.split_docs(Split::Test).next().is_none() {
        bail!("test split is empty");
    }
    let records = match ModelSpec::parse(with) {
        Some(spec @ (ModelSpec::LexiconSfs | ModelSpec::LexiconDp)) => {
            classify_with_lexicon(config, &corpus, spec)?
        }
        Some(_) => bail!("`classify --with {with}`: train first and pass the model file"),
        None => classify_with_model(&corpus, Path::new(with))?,
    };
    let mut jsonl = String::new();
    for record in &records {
        jsonl.push_str(&serde_json::to_string(record)?);
        jsonl.push('\n');
    }
    write_output(&config.output_dir, "predictions.jsonl", &jsonl)?;
    Ok(())
}

/// `evaluate`: compare a predictions file against the corpus test golds.
pub fn cmd_evaluate(config: &RunConfig, predictions: &Path) -> Result<()> {
    config.write_effective()?;
    let corpus = load_corpus(config)?;
    let content = fs::read_to_string(predictions)?;
    let mut by_id: BTreeMap<String, Polarity> = BTreeMap::new();
    for line in content.lines().filter(|l| !l.trim().is_empty()) {
        let record: PredictionRecord = serde_json::from_str(line)?;
        let polarity = Polarity::parse(&record.predicted)
            .with_context(|| format!("bad predicted label `{}`", record.predicted))?;
        by_id.insert(record.id, polarity);
    }
    let (test_docs, excluded) = binary_split(&corpus, Split::Test);
    if excluded > 0 {
        println!("excluded {excluded} neutral test documents from evaluation");
    }
    let mut preds = Vec::new();
    let mut golds = Vec::new();
    for doc in test_docs {
        let pred = by_id
            .get(&doc.id)
            .with_context(|| format!("no prediction for test document `{}`", doc.id))?;
        preds.push(*pred);
        golds.push(doc.gold);
    }
    let metrics = evaluate(&preds, &golds)?;
    write_output(
        &config.output_dir,
        "metrics.json",
        &serde_json::to_string_pretty(&metrics)?,
    )?;
    println!(
        "Prec {:.1}  Rec {:.1}  F1 {:.1}  Acc {:.1}  (n={})",
        percent(metrics.macro_precision),
        percent(metrics.macro_recall),
        percent(metrics.macro_f1),
        percent(metrics.accuracy),
        metrics.n_evaluated
    );
    Ok(())
}

/// `ablate`: run every configured model spec with and without NE tags.
pub fn cmd_ablate(config: &RunConfig) -> Result<()> {
    config.write_effective()?;
    let corpus = load_corpus(config)?;
    let annotations = load_ne_annotations(config, &corpus)?;
    let lexicons = config
        .lexicons
        .iter()
        .map(|p| load_lexicon(p, &config.normalization).map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    let ablation_config = AblationConfig {
        dataset_name: config.dataset_name.clone(),
        scope: config.ne_scope,
        tie_policy: config.tie_policy,
        seed: config.seed,
        svm_reg: config.svm.reg,
        svm_epochs: config.svm.epochs,
        tf_thresholds: config.tf_thresholds.clone(),
        polarity_map_override: None,
    };
    let report = run_ablation(
        &corpus,
        &annotations,
        &lexicons,
        &config.models,
        &ablation_config,
    )?;
    write_output(&config.output_dir, "ablation.json", &report.to_json())?;
    let table = report.render_table();
    write_output(&config.output_dir, "ablation.txt", &table)?;
    print!("{table}");
    Ok(())
}

/// `stats`: split/label counts for the corpus.
pub fn cmd_stats(config: &RunConfig) -> Result<()> {
    config.write_effective()?;
    let corpus = load_corpus(config)?;
    let summary = corpus.split_summary();
    #[derive(Serialize)]
    struct Row {
        split: &'static str,
        positive: usize,
        negative: usize,
        neutral: usize,
    }
    let rows: Vec<Row> = [Split::Train, Split::Test]
        .iter()
        .map(|&s| Row {
            split: s.as_str(),
            positive: summary.count(s, Polarity::Positive),
            negative: summary.count(s, Polarity::Negative),
            neutral: summary.count(s, Polarity::Neutral),
        })
        .collect();
    write_output(
        &config.output_dir,
        "split_summary.json",
        &serde_json::to_string_pretty(&rows)?,
    )?;
    for row in &rows {
        println!(
            "{:<5}  positive {:>5}  negative {:>5}  neutral {:>5}",
            row.split, row.positive, row.negative, row.neutral
        );
    }
    println!("total {}", summary.total());
    Ok(())
}
