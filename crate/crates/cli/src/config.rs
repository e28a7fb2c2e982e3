//! Run configuration: a single JSON file, with command-line flags able
//! to override individual fields. The resolved effective config is
//! written next to every command's outputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use nesent_core::corpus::CorpusFormat;
use nesent_core::evaluation::ModelSpec;
use nesent_core::lexicon::{Scheme, TiePolicy};
use nesent_core::ne_sentiment::Scope;
use nesent_core::preprocess::NormalizationConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRef {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_format() -> String {
    "jsonl".to_string()
}

impl CorpusRef {
    pub fn format(&self) -> Result<CorpusFormat> {
        match self.format.as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => bail!("unknown corpus format `{other}` (expected jsonl|tsv)"),
        }
    }
}

/// Where entity mentions come from: an external annotation file or a
/// gazetteer matched against the corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationsSource {
    File(PathBuf),
    Gazetteer(PathBuf),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmSection {
    pub reg: f64,
    pub epochs: usize,
}

impl Default for SvmSection {
    fn default() -> Self {
        SvmSection {
            reg: nesent_core::supervised::DEFAULT_REG,
            epochs: nesent_core::supervised::DEFAULT_EPOCHS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NgramSection {
    pub orders: Vec<usize>,
    pub tf_threshold: usize,
}

impl Default for NgramSection {
    fn default() -> Self {
        NgramSection {
            orders: vec![1, 2, 3],
            tf_threshold: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: CorpusRef,
    #[serde(default)]
    pub annotations: Option<AnnotationsSource>,
    #[serde(default)]
    pub normalization: NormalizationConfig,
    #[serde(default)]
    pub ne_scope: Scope,
    #[serde(default)]
    pub lexicons: Vec<PathBuf>,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub ngram: NgramSection,
    #[serde(default = "default_thresholds")]
    pub tf_thresholds: Vec<usize>,
    #[serde(default)]
    pub tie_policy: TiePolicy,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub svm: SvmSection,
    /// Tag mined entities before feature extraction / lexicon lookup
    /// in train and classify.
    #[serde(default)]
    pub use_nes: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_dataset")]
    pub dataset_name: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_thresholds() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_scheme() -> Scheme {
    Scheme::UniBi
}

fn default_seed() -> u64 {
    42
}

fn default_dataset() -> String {
    "dataset".to_string()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Flag-level overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
        let content = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: RunConfig = serde_json::from_str(&content)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(corpus) = &overrides.corpus {
            config.corpus.path = corpus.clone();
        }
        if let Some(dir) = &overrides.output_dir {
            config.output_dir = dir.clone();
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        // Paths referenced by the config must resolve relative to the
        // config file's directory.
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        config.validate()?;
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        rebase(&mut self.corpus.path);
        match &mut self.annotations {
            Some(AnnotationsSource::File(p)) | Some(AnnotationsSource::Gazetteer(p)) => rebase(p),
            None => {}
        }
        for p in &mut self.lexicons {
            rebase(p);
        }
        rebase(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        self.corpus.format()?;
        if !self.corpus.path.exists() {
            bail!("corpus file {} does not exist", self.corpus.path.display());
        }
        match &self.annotations {
            Some(AnnotationsSource::File(p)) | Some(AnnotationsSource::Gazetteer(p))
                if !p.exists() =>
            {
                bail!("annotations source {} does not exist", p.display());
            }
            _ => {}
        }
        for lexicon in &self.lexicons {
            if !lexicon.exists() {
                bail!("lexicon file {} does not exist", lexicon.display());
            }
        }
        Ok(())
    }

    /// Serializes the resolved config, seed always explicit.
    pub fn write_effective(&self) -> Result<()> {
        fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join("effective_config.json");
        fs::write(&path, serde_json::to_string_pretty(self)?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
