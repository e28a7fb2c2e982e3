//! Sentiment-analysis toolkit that mines the polarity of named entities
//! from a labeled corpus by majority of attitudes, injects them as
//! PosNE/NegNE tags, and classifies sentences with lexicon-based scorers
//! and supervised models, with an ablation harness comparing performance
//! with and without the tags.

pub mod corpus;
pub mod evaluation;
pub mod lexicon;
pub mod ne_provider;
pub mod ne_sentiment;
pub mod preprocess;
pub mod supervised;

pub use corpus::{Corpus, CorpusFormat, Document, Polarity, Split};
pub use evaluation::{evaluate, run_ablation, MetricsReport};
pub use lexicon::{Lexicon, Scheme, TiePolicy};
pub use ne_provider::{NamedEntity, NeAnnotations};
pub use ne_sentiment::{detect_ne_polarity, tag_entities, NePolarityMap, NeStats, Scope};
pub use preprocess::NormalizationConfig;
