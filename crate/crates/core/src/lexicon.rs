//! Sentiment lexicons and the two lexicon scorers: straight-forward sum
//! (uniform +/-1 weights, sign of the sum decides) and double-polarity
//! (each entry carries complementary positive and negative weights; the
//! larger accumulated absolute value decides).
//!
//! Weights are exact rationals so scoring is reproducible bit-exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Polarity;
use crate::ne_sentiment::{NEG_TAG, POS_TAG};
use crate::preprocess::{normalize_and_tokenize, NormalizationConfig};

/// A unigram or bigram lexicon entry. The weight's sign always matches
/// the polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub term: Vec<String>,
    pub polarity: Polarity,
    pub weight: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    entries: BTreeMap<Vec<String>, LexiconEntry>,
    /// Overwrites observed while building (duplicate terms, merges).
    pub conflicts: usize,
}

/// Complementary weight pair used by the double-polarity scorer:
/// for a dominant magnitude m in (0,1), the entry contributes m on its
/// own side and -(1-m) (resp. 1-m) on the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpWeights {
    pub pos_weight: Rational64,
    pub neg_weight: Rational64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Uni,
    UniBi,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Uni => "uni",
            Scheme::UniBi => "uni+bi",
        }
    }
}

/// Resolution for a score of exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum TiePolicy {
    #[default]
    Negative,
    Positive,
    Abstain,
}


#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: unknown polarity `{value}`")]
    BadPolarity { line: usize, value: String },
    #[error("line {line}: zero weight for term `{term}`")]
    ZeroWeight { line: usize, term: String },
    #[error("line {line}: term `{term}` has more than 2 tokens")]
    TermTooLong { line: usize, term: String },
    #[error("line {line}: unparseable weight `{value}`")]
    BadWeight { line: usize, value: String },
    #[error("line {line}: empty term after normalization")]
    EmptyTerm { line: usize },
    #[error("no lexicons to merge")]
    EmptyList,
    #[error("lexicon already contains NE tag entries")]
    AlreadyTagged,
    #[error("entry `{0}` has no fractional weight; double-polarity scoring needs magnitudes in (0,1)")]
    NoDpWeights(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses a decimal string (`0.7`, `-1`, `.5`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational64> {
    let s = s.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    Some(Rational64::new(sign * (int * denom + frac), denom))
}

impl Lexicon {
    pub fn new(name: impl Into<String>) -> Lexicon {
        Lexicon {
            name: name.into(),
            entries: BTreeMap::new(),
            conflicts: 0,
        }
    }

    /// Inserts an entry; a duplicate term is overwritten (later wins)
    /// and counted as a conflict.
    pub fn insert(&mut self, entry: LexiconEntry) {
        if self.entries.insert(entry.term.clone(), entry).is_some() {
            self.conflicts += 1;
        }
    }

    pub fn get(&self, term: &[String]) -> Option<&LexiconEntry> {
        self.entries.get(term)
    }

    pub fn contains(&self, term: &[String]) -> bool {
        self.entries.contains_key(term)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.entries
            .values()
            .filter(|e| e.polarity == Polarity::Positive)
            .count()
    }

    pub fn negative_count(&self) -> usize {
        self.len() - self.positive_count()
    }

    pub fn report(&self) -> LexiconReport {
        LexiconReport {
            name: self.name.clone(),
            size: self.len(),
            positive: self.positive_count(),
            negative: self.negative_count(),
            conflicts: self.conflicts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconReport {
    pub name: String,
    pub size: usize,
    pub positive: usize,
    pub negative: usize,
    pub conflicts: usize,
}

/// Loads a lexicon from TSV: `term<TAB>polarity[<TAB>weight]`; UTF-8;
/// `#`-prefixed lines are comments. Terms are normalized and tokenized
/// with the given pipeline; a missing weight defaults to +/-1. A signed
/// weight column contributes its magnitude, the polarity fixes the sign.
pub fn load_lexicon(
    path: impl AsRef<Path>,
    config: &NormalizationConfig,
) -> Result<Lexicon, LexiconError> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "lexicon".to_string());
    let content = fs::read_to_string(path)?;
    let mut lexicon = Lexicon::new(name);
    for (i, raw) in content.lines().enumerate() {
        let raw = raw.trim_end();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut cols = raw.split('\t');
        let term_text = cols.next().unwrap_or_default();
        let polarity_text = cols.next().unwrap_or_default().trim();
        let polarity = match polarity_text {
            "positive" => Polarity::Positive,
            "negative" => Polarity::Negative,
            other => {
                return Err(LexiconError::BadPolarity {
                    line: i + 1,
                    value: other.to_string(),
                })
            }
        };
        let magnitude = match cols.next() {
            Some(w) => {
                let parsed = parse_decimal(w).ok_or_else(|| LexiconError::BadWeight {
                    line: i + 1,
                    value: w.to_string(),
                })?;
                if parsed.is_zero() {
                    return Err(LexiconError::ZeroWeight {
                        line: i + 1,
                        term: term_text.to_string(),
                    });
                }
                parsed.abs()
            }
            None => Rational64::from_integer(1),
        };
        let term = normalize_and_tokenize(term_text, config);
        if term.is_empty() {
            return Err(LexiconError::EmptyTerm { line: i + 1 });
        }
        if term.len() > 2 {
            return Err(LexiconError::TermTooLong {
                line: i + 1,
                term: term_text.to_string(),
            });
        }
        let weight = match polarity {
            Polarity::Positive => magnitude,
            _ => -magnitude,
        };
        lexicon.insert(LexiconEntry {
            term,
            polarity,
            weight,
        });
    }
    Ok(lexicon)
}

/// Union of the given lexicons; on a term conflict the entry from the
/// later lexicon wins. Conflicts are counted in the result.
pub fn merge_lexicons(lexicons: &[Lexicon]) -> Result<Lexicon, LexiconError> {
    if lexicons.is_empty() {
        return Err(LexiconError::EmptyList);
    }
    let name = lexicons
        .iter()
        .map(|l| l.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let mut merged = Lexicon::new(name);
    for lexicon in lexicons {
        for entry in lexicon.entries() {
            merged.insert(entry.clone());
        }
    }
    Ok(merged)
}

/// Adds the PosNE (+1) and NegNE (-1) tag entries.
pub fn add_ne_tags(lexicon: &Lexicon) -> Result<Lexicon, LexiconError> {
    let pos_term = vec![POS_TAG.to_string()];
    let neg_term = vec![NEG_TAG.to_string()];
    if lexicon.contains(&pos_term) || lexicon.contains(&neg_term) {
        return Err(LexiconError::AlreadyTagged);
    }
    let mut tagged = lexicon.clone();
    tagged.insert(LexiconEntry {
        term: pos_term,
        polarity: Polarity::Positive,
        weight: Rational64::from_integer(1),
    });
    tagged.insert(LexiconEntry {
        term: neg_term,
        polarity: Polarity::Negative,
        weight: Rational64::from_integer(-1),
    });
    Ok(tagged)
}

/// Looks up tokens in the lexicon. Under `uni` every token is matched
/// independently; under `uni_bi` a greedy left-to-right pass prefers a
/// bigram match, which consumes both tokens.
pub fn segment_and_match<'a>(
    tokens: &[String],
    lexicon: &'a Lexicon,
    scheme: Scheme,
) -> Vec<&'a LexiconEntry> {
    let mut matches = Vec::new();
    match scheme {
        Scheme::Uni => {
            for token in tokens {
                if let Some(entry) = lexicon.get(std::slice::from_ref(token)) {
                    matches.push(entry);
                }
            }
        }
        Scheme::UniBi => {
            let mut i = 0;
            while i < tokens.len() {
                if i + 1 < tokens.len() {
                    if let Some(entry) = lexicon.get(&tokens[i..i + 2]) {
                        matches.push(entry);
                        i += 2;
                        continue;
                    }
                }
                if let Some(entry) = lexicon.get(&tokens[i..i + 1]) {
                    matches.push(entry);
                }
                i += 1;
            }
        }
    }
    matches
}

/// Straight-forward sum: total weight of matched entries; the sign
/// decides the polarity, a zero total falls to the tie policy.
pub fn sfs_score(
    tokens: &[String],
    lexicon: &Lexicon,
    scheme: Scheme,
    tie_policy: TiePolicy,
) -> (Rational64, Option<Polarity>) {
    let score: Rational64 = segment_and_match(tokens, lexicon, scheme)
        .iter()
        .map(|e| e.weight)
        .sum();
    let polarity = if score.is_positive() {
        Some(Polarity::Positive)
    } else if score.is_negative() {
        Some(Polarity::Negative)
    } else {
        match tie_policy {
            TiePolicy::Negative => Some(Polarity::Negative),
            TiePolicy::Positive => Some(Polarity::Positive),
            TiePolicy::Abstain => None,
        }
    };
    (score, polarity)
}

/// Derives the complementary weight pair from an entry's dominant
/// magnitude, which must lie strictly inside (0,1).
pub fn dp_weights(entry: &LexiconEntry) -> Result<DpWeights, LexiconError> {
    let one = Rational64::from_integer(1);
    let magnitude = entry.weight.abs();
    if magnitude >= one || magnitude.is_zero() {
        return Err(LexiconError::NoDpWeights(entry.term.join(" ")));
    }
    Ok(match entry.polarity {
        Polarity::Positive => DpWeights {
            pos_weight: magnitude,
            neg_weight: -(one - magnitude),
        },
        _ => DpWeights {
            pos_weight: one - magnitude,
            neg_weight: -magnitude,
        },
    })
}

/// Double-polarity scorer: accumulates the positive and negative sums
/// over all matches; the larger absolute value decides, a tie is
/// resolved negative.
pub fn dp_score(
    tokens: &[String],
    lexicon: &Lexicon,
    scheme: Scheme,
) -> Result<Polarity, LexiconError> {
    let mut pos_sum = Rational64::zero();
    let mut neg_sum = Rational64::zero();
    for entry in segment_and_match(tokens, lexicon, scheme) {
        let weights = dp_weights(entry)?;
        pos_sum += weights.pos_weight;
        neg_sum += weights.neg_weight;
    }
    Ok(if pos_sum.abs() > neg_sum.abs() {
        Polarity::Positive
    } else {
        Polarity::Negative
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn toks(ts: &[&str]) -> Vec<String> {
        ts.iter().map(|s| s.to_string()).collect()
    }

    fn entry(term: &[&str], weight: Rational64) -> LexiconEntry {
        LexiconEntry {
            term: toks(term),
            polarity: if weight.is_positive() {
                Polarity::Positive
            } else {
                Polarity::Negative
            },
            weight,
        }
    }

    fn lex(entries: &[(&[&str], i64)]) -> Lexicon {
        let mut l = Lexicon::new("test");
        for (term, w) in entries {
            l.insert(entry(term, Rational64::from_integer(*w)));
        }
        l
    }

    #[test]
    fn parse_decimal_cases() {
        assert_eq!(parse_decimal("0.7"), Some(Rational64::new(7, 10)));
        assert_eq!(parse_decimal("-1"), Some(Rational64::from_integer(-1)));
        assert_eq!(parse_decimal(".5"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_decimal("-0.25"), Some(Rational64::new(-1, 4)));
        assert_eq!(parse_decimal("x"), None);
        assert_eq!(parse_decimal(""), None);
    }

    #[test]
    fn load_defaults_weight_to_one() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "جميل\tpositive").unwrap();
        let l = load_lexicon(f.path(), &NormalizationConfig::default()).unwrap();
        assert_eq!(l.len(), 1);
        let e = l.entries().next().unwrap();
        assert_eq!(e.weight, Rational64::from_integer(1));
        assert_eq!(e.polarity, Polarity::Positive);
    }

    #[test]
    fn load_rejects_long_terms() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x y z\tnegative").unwrap();
        assert!(matches!(
            load_lexicon(f.path(), &NormalizationConfig::latin()),
            Err(LexiconError::TermTooLong { .. })
        ));
    }

    #[test]
    fn load_rejects_bad_polarity_and_zero_weight() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x\tmeh").unwrap();
        assert!(matches!(
            load_lexicon(f.path(), &NormalizationConfig::latin()),
            Err(LexiconError::BadPolarity { .. })
        ));
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x\tpositive\t0").unwrap();
        assert!(matches!(
            load_lexicon(f.path(), &NormalizationConfig::latin()),
            Err(LexiconError::ZeroWeight { .. })
        ));
    }

    #[test]
    fn duplicate_term_later_line_wins() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "a\tpositive\nb\tnegative\na\tnegative\n").unwrap();
        let l = load_lexicon(f.path(), &NormalizationConfig::latin()).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.conflicts, 1);
        assert_eq!(l.get(&toks(&["a"])).unwrap().polarity, Polarity::Negative);
    }

    #[test]
    fn merge_disjoint_sums_sizes() {
        let a = lex(&[(&["a"], 1), (&["b"], 1), (&["c"], -1)]);
        let b = lex(&[(&["d"], 1), (&["e"], -1), (&["f"], -1), (&["g"], 1)]);
        let merged = merge_lexicons(&[a, b]).unwrap();
        assert_eq!(merged.len(), 7);
        assert_eq!(merged.conflicts, 0);
    }

    #[test]
    fn merge_conflict_later_lexicon_wins() {
        let a = lex(&[(&["t"], 1)]);
        let b = lex(&[(&["t"], -1)]);
        let merged = merge_lexicons(&[a, b]).unwrap();
        assert_eq!(merged.get(&toks(&["t"])).unwrap().polarity, Polarity::Negative);
        assert_eq!(merged.conflicts, 1);
    }

    #[test]
    fn merge_empty_list_is_error() {
        assert!(matches!(merge_lexicons(&[]), Err(LexiconError::EmptyList)));
    }

    // Disjoint stand-ins sized like a 1697-positive / 4256-negative lexicon.
    #[test]
    fn merge_large_disjoint_stand_ins() {
        let mut pos = Lexicon::new("pos");
        for i in 0..1697 {
            pos.insert(entry(&[&format!("p{i}")], Rational64::from_integer(1)));
        }
        let mut neg = Lexicon::new("neg");
        for i in 0..4256 {
            neg.insert(entry(&[&format!("n{i}")], Rational64::from_integer(-1)));
        }
        let merged = merge_lexicons(&[pos, neg]).unwrap();
        assert_eq!(merged.len(), 5953);
        assert_eq!(merged.positive_count(), 1697);
        assert_eq!(merged.negative_count(), 4256);
    }

    #[test]
    fn merge_is_associative_left_to_right() {
        let a = lex(&[(&["t"], 1), (&["u"], 1)]);
        let b = lex(&[(&["t"], -1)]);
        let c = lex(&[(&["u"], -1)]);
        let ab_c = merge_lexicons(&[merge_lexicons(&[a.clone(), b.clone()]).unwrap(), c.clone()])
            .unwrap();
        let a_bc = merge_lexicons(&[a, merge_lexicons(&[b, c]).unwrap()]).unwrap();
        assert_eq!(ab_c.entries, a_bc.entries);
    }

    #[test]
    fn add_ne_tags_to_empty() {
        let tagged = add_ne_tags(&Lexicon::new("empty")).unwrap();
        assert_eq!(tagged.len(), 2);
        assert_eq!(
            tagged.get(&toks(&["PosNE"])).unwrap().weight,
            Rational64::from_integer(1)
        );
        assert_eq!(
            tagged.get(&toks(&["NegNE"])).unwrap().weight,
            Rational64::from_integer(-1)
        );
    }

    #[test]
    fn add_ne_tags_preserves_existing_entries() {
        let base = lex(&[(&["a"], 1), (&["b"], -1), (&["c"], 1), (&["d"], -1), (&["e"], 1)]);
        let tagged = add_ne_tags(&base).unwrap();
        assert_eq!(tagged.len(), 7);
        for e in base.entries() {
            assert_eq!(tagged.get(&e.term), Some(e));
        }
        assert!(matches!(add_ne_tags(&tagged), Err(LexiconError::AlreadyTagged)));
    }

    #[test]
    fn neg_tag_scores_minus_one() {
        let tagged = add_ne_tags(&Lexicon::new("empty")).unwrap();
        let (score, pol) = sfs_score(&toks(&["NegNE"]), &tagged, Scheme::Uni, TiePolicy::Abstain);
        assert_eq!(score, Rational64::from_integer(-1));
        assert_eq!(pol, Some(Polarity::Negative));
    }

    #[test]
    fn bigram_consumes_its_unigrams() {
        let l = lex(&[(&["a", "b"], 1), (&["a"], -1)]);
        let matched = segment_and_match(&toks(&["a", "b"]), &l, Scheme::UniBi);
        assert_eq!(matched.len(), 1);
        assert_eq!(matched[0].term, toks(&["a", "b"]));
        let uni = segment_and_match(&toks(&["a", "b"]), &l, Scheme::Uni);
        assert_eq!(uni.len(), 1);
        assert_eq!(uni[0].term, toks(&["a"]));
    }

    #[test]
    fn empty_tokens_match_nothing() {
        let l = lex(&[(&["a"], 1)]);
        assert!(segment_and_match(&[], &l, Scheme::UniBi).is_empty());
    }

    #[test]
    fn sfs_two_pos_one_neg() {
        let l = lex(&[(&["good"], 1), (&["fine"], 1), (&["bad"], -1)]);
        let (score, pol) = sfs_score(
            &toks(&["good", "fine", "bad"]),
            &l,
            Scheme::Uni,
            TiePolicy::Negative,
        );
        assert_eq!(score, Rational64::from_integer(1));
        assert_eq!(pol, Some(Polarity::Positive));
    }

    #[test]
    fn sfs_tie_policies() {
        let l = lex(&[(&["bad"], -1)]);
        let none = toks(&["nothing", "here"]);
        assert_eq!(
            sfs_score(&none, &l, Scheme::Uni, TiePolicy::Negative).1,
            Some(Polarity::Negative)
        );
        assert_eq!(
            sfs_score(&none, &l, Scheme::Uni, TiePolicy::Positive).1,
            Some(Polarity::Positive)
        );
        assert_eq!(sfs_score(&none, &l, Scheme::Uni, TiePolicy::Abstain).1, None);
    }

    #[test]
    fn sfs_tag_and_word_cancel() {
        let tagged = add_ne_tags(&lex(&[(&["bad"], -1)])).unwrap();
        let (score, pol) = sfs_score(
            &toks(&["PosNE", "bad"]),
            &tagged,
            Scheme::Uni,
            TiePolicy::Abstain,
        );
        assert_eq!(score, Rational64::zero());
        assert_eq!(pol, None);
    }

    #[test]
    fn dp_complement_of_0_7() {
        let e = entry(&["good"], Rational64::new(7, 10));
        let w = dp_weights(&e).unwrap();
        assert_eq!(w.pos_weight, Rational64::new(7, 10));
        assert_eq!(w.neg_weight, Rational64::new(-3, 10));
        let l = {
            let mut l = Lexicon::new("dp");
            l.insert(e);
            l
        };
        assert_eq!(
            dp_score(&toks(&["good"]), &l, Scheme::Uni).unwrap(),
            Polarity::Positive
        );
    }

    #[test]
    fn dp_accumulation_two_matches() {
        // P = 0.7 + 0.1 = 0.8, Ng = -0.3 - 0.9 = -1.2 -> negative.
        let mut l = Lexicon::new("dp");
        l.insert(entry(&["good"], Rational64::new(7, 10)));
        l.insert(entry(&["awful"], Rational64::new(-9, 10)));
        assert_eq!(
            dp_score(&toks(&["good", "awful"]), &l, Scheme::Uni).unwrap(),
            Polarity::Negative
        );
    }

    #[test]
    fn dp_no_match_ties_negative() {
        let mut l = Lexicon::new("dp");
        l.insert(entry(&["good"], Rational64::new(7, 10)));
        assert_eq!(
            dp_score(&toks(&["nothing"]), &l, Scheme::Uni).unwrap(),
            Polarity::Negative
        );
    }

    #[test]
    fn dp_rejects_uniform_weights() {
        let l = lex(&[(&["good"], 1)]);
        assert!(matches!(
            dp_score(&toks(&["good"]), &l, Scheme::Uni),
            Err(LexiconError::NoDpWeights(_))
        ));
    }

    proptest! {
        // Under uni, SFS is invariant under token permutation.
        #[test]
        fn sfs_uni_permutation_invariant(mut tokens in proptest::collection::vec("[a-e]", 0..12)) {
            let l = lex(&[(&["a"], 1), (&["b"], -1), (&["c"], 1)]);
            let toks_v: Vec<String> = tokens.clone();
            let (before, _) = sfs_score(&toks_v, &l, Scheme::Uni, TiePolicy::Negative);
            tokens.reverse();
            let (after, _) = sfs_score(&tokens, &l, Scheme::Uni, TiePolicy::Negative);
            prop_assert_eq!(before, after);
        }

        // DP complement relation: pos_weight - 1 == neg_weight exactly.
        #[test]
        fn dp_complement_holds(num in 1i64..100) {
            let w = Rational64::new(num, 100);
            prop_assume!(!w.is_zero() && w < Rational64::from_integer(1));
            for pol in [1i64, -1] {
                let e = entry(&["t"], w * Rational64::from_integer(pol));
                let dw = dp_weights(&e).unwrap();
                prop_assert_eq!(dw.pos_weight - Rational64::from_integer(1), dw.neg_weight);
            }
        }
    }
}
