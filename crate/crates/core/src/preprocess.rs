//! Text normalization and whitespace tokenization.
//!
//! The normalization pass strips URLs, tweet symbols (mentions, retweet
//! markers, hashtag `#` characters), punctuation and out-of-script
//! characters, then collapses whitespace. Stopwords and negation words
//! are never removed, and no stemming is performed.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

/// Keep-set applied after the removal passes; characters outside the
/// set (other than whitespace) are replaced with spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScriptFilter {
    /// Arabic letters plus digits.
    Arabic,
    /// ASCII letters plus digits.
    Latin,
    /// An explicit set of characters to keep.
    Keep(String),
}

impl ScriptFilter {
    fn keeps(&self, c: char) -> bool {
        match self {
            ScriptFilter::Arabic => {
                c.is_ascii_digit()
                    || ('\u{0600}'..='\u{06FF}').contains(&c)
                    || ('\u{0750}'..='\u{077F}').contains(&c)
            }
            ScriptFilter::Latin => c.is_ascii_alphanumeric(),
            ScriptFilter::Keep(set) => set.contains(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub remove_urls: bool,
    pub remove_tweet_symbols: bool,
    pub remove_punctuation: bool,
    pub script_filter: Option<ScriptFilter>,
    pub hashtag_underscore_to_space: bool,
    pub collapse_whitespace: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            remove_urls: true,
            remove_tweet_symbols: true,
            remove_punctuation: true,
            script_filter: Some(ScriptFilter::Arabic),
            hashtag_underscore_to_space: true,
            collapse_whitespace: true,
        }
    }
}

impl NormalizationConfig {
    /// Default config with the keep-set switched to ASCII, for
    /// Latin-script corpora.
    pub fn latin() -> Self {
        NormalizationConfig {
            script_filter: Some(ScriptFilter::Latin),
            ..Default::default()
        }
    }
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:https?://\S+|www\.\S+)").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\S+").unwrap())
}


fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#(\S+)").unwrap())
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '،' | '؛' | '؟' | '٪' | '٭' | '۔' | '«' | '»' | '…')
        || ('\u{2000}'..='\u{206F}').contains(&c)
}

pub fn normalize(text: &str, config: &NormalizationConfig) -> String {
    let mut s = text.to_string();
    if config.remove_urls {
        s = url_re().replace_all(&s, " ").into_owned();
    }
    if config.remove_tweet_symbols {
        s = mention_re().replace_all(&s, " ").into_owned();
    }
    if config.hashtag_underscore_to_space {
        s = hashtag_re()
            .replace_all(&s, |caps: &regex::Captures| {
                format!("#{}", caps[1].replace('_', " "))
            })
            .into_owned();
    }
    if config.remove_tweet_symbols {
        s = s.replace('#', " ");
    }
    s = s
        .chars()
        .map(|c| {
            if config.remove_punctuation && is_punctuation(c) {
                ' '
            } else if let Some(filter) = &config.script_filter {
                if c.is_whitespace() || filter.keeps(c) {
                    c
                } else {
                    ' '
                }
            } else {
                c
            }
        })
        .collect();
    if config.collapse_whitespace {
        // Retweet markers are dropped at the token stage so that marker
        // tokens exposed by the character filters are caught too.
        s = s
            .split_whitespace()
            .filter(|tok| !(config.remove_tweet_symbols && is_retweet_marker(tok)))
            .collect::<Vec<_>>()
            .join(" ");
    }
    s
}

fn is_retweet_marker(token: &str) -> bool {
    token.eq_ignore_ascii_case("rt")
}

/// Whitespace tokenization of already-normalized text.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

pub fn normalize_and_tokenize(text: &str, config: &NormalizationConfig) -> Vec<String> {
    tokenize(&normalize(text, config))
}

/// Returns a copy of the corpus with every document's `tokens` filled
/// from its raw text.
pub fn preprocess_corpus(corpus: &Corpus, config: &NormalizationConfig) -> Corpus {
    let mut out = corpus.clone();
    for doc in &mut out.docs {
        doc.tokens = normalize_and_tokenize(&doc.raw_text, config);
    }
    out
}
