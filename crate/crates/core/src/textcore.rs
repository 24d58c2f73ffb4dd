//! Tokenization, character-code vectors, and the relatedness metric.
//!
//! A text object is modelled as the sequence of its ASCII codes scaled into
//! `[0, 1]`. Relatedness between a marked object and a candidate combines a
//! length-normalized Euclidean distance, the gap between the two standard
//! deviations, and the variance of the element-wise difference vector.
//! Smaller is more related; identical phrases score exactly zero.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

/// Largest code point kept as-is; anything above is replaced by `?`.
pub const MAX_CODE: u32 = 127;

const REPLACEMENT: char = '?';

/// Largest n-gram emitted by [`candidates`].
pub const MAX_NGRAM: usize = 3;

const DEFAULT_STOPWORDS: &[&str] = &[
    // articles
    "a",
    "an",
    "the",
    // prepositions
    "about",
    "above",
    "across",
    "after",
    "against",
    "along",
    "among",
    "around",
    "at",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "between",
    "beyond",
    "by",
    "despite",
    "down",
    "during",
    "except",
    "for",
    "from",
    "in",
    "inside",
    "into",
    "like",
    "near",
    "of",
    "off",
    "on",
    "onto",
    "out",
    "outside",
    "over",
    "past",
    "per",
    "since",
    "through",
    "throughout",
    "to",
    "toward",
    "towards",
    "under",
    "underneath",
    "until",
    "up",
    "upon",
    "via",
    "with",
    "within",
    "without",
    // conjunctions
    "and",
    "as",
    "because",
    "but",
    "either",
    "if",
    "neither",
    "nor",
    "or",
    "so",
    "than",
    "that",
    "though",
    "unless",
    "whereas",
    "whether",
    "while",
    "yet",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("invalid object: phrase is empty")]
    EmptyPhrase,
    #[error("invalid object vector: code {value} at index {index} lies outside [0, 1]")]
    CodeOutOfRange { index: usize, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub position: usize,
}

/// Output of [`tokenize_text`]: the tokens plus how many non-ASCII
/// characters had to be replaced.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tokenization {
    pub tokens: Vec<Token>,
    pub non_ascii_replaced: usize,
}

/// Lowercases, replaces code points above 127 with `?`, and splits on every
/// character that is not an ASCII letter or digit.
pub fn tokenize_text(text: &str) -> Tokenization {
    let mut out = Tokenization::default();
    let mut current = String::new();
    let flush = |current: &mut String, tokens: &mut Vec<Token>| {
        if !current.is_empty() {
            let position = tokens.len();
            tokens.push(Token {
                text: std::mem::take(current),
                position,
            });
        }
    };
    for ch in text.chars() {
        let ch = if (ch as u32) > MAX_CODE {
            out.non_ascii_replaced += 1;
            REPLACEMENT
        } else {
            ch
        };
        if ch.is_ascii_alphanumeric() {
            current.push(ch.to_ascii_lowercase());
        } else {
            flush(&mut current, &mut out.tokens);
        }
    }
    flush(&mut current, &mut out.tokens);
    out
}

/// [`tokenize_text`] without the bookkeeping. Replacements are reported
/// through `log::warn!`.
pub fn tokenize(text: &str) -> Vec<Token> {
    let t = tokenize_text(text);
    if t.non_ascii_replaced > 0 {
        log::warn!(
            "replaced {} non-ASCII character(s) with '?' during tokenization",
            t.non_ascii_replaced
        );
    }
    t.tokens
}

/// Set of lowercase words that may not start or end a candidate phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Default for Stopwords {
    /// The bundled English list of articles, prepositions and conjunctions.
    fn default() -> Self {
        Self::new(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Stopwords {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stopwords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Stopwords(BTreeSet::new())
    }

    /// One word per line; blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateObject {
    pub phrase: String,
    pub length_tokens: usize,
    pub frequency: u64,
}

/// All 1- to 3-grams over consecutive tokens whose edge tokens are not
/// stopwords, merged by phrase. Output is in first-occurrence order, where
/// n-grams starting at the same token are ordered by length.
pub fn candidates(tokens: &[Token], stopwords: &Stopwords) -> Vec<CandidateObject> {
    let mut out: Vec<CandidateObject> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for start in 0..tokens.len() {
        if stopwords.contains(&tokens[start].text) {
            continue;
        }
        for len in 1..=MAX_NGRAM {
            let end = start + len;
            if end > tokens.len() {
                break;
            }
            if stopwords.contains(&tokens[end - 1].text) {
                continue;
            }
            let phrase = tokens[start..end]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            match index.get(&phrase) {
                Some(&i) => out[i].frequency += 1,
                None => {
                    index.insert(phrase.clone(), out.len());
                    out.push(CandidateObject {
                        phrase,
                        length_tokens: len,
                        frequency: 1,
                    });
                }
            }
        }
    }
    out
}

/// Arithmetic mean. Zero for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    // rounding can push the quotient just outside the sample range
    let (lo, hi) = min_max(xs);
    m.clamp(lo, hi)
}

/// Population variance (divides by N).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() || all_equal(xs) {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn stddev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

fn all_equal(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// A text object as scaled character codes with cached statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectVector {
    codes: Vec<f64>,
    mean: f64,
    stddev: f64,
}

impl ObjectVector {
    /// Builds a vector from codes already scaled into `[0, 1]`.
    pub fn from_codes(codes: Vec<f64>) -> Result<Self, TextError> {
        if codes.is_empty() {
            return Err(TextError::EmptyPhrase);
        }
        if let Some((index, v)) = codes
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(TextError::CodeOutOfRange {
                index,
                value: v.to_string(),
            });
        }
        let mean = mean(&codes);
        let stddev = stddev(&codes);
        Ok(ObjectVector {
            codes,
            mean,
            stddev,
        })
    }

    pub fn codes(&self) -> &[f64] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }
}

/// Encodes every character, spaces included, as `code / 127`.
/// Non-ASCII characters are encoded as `?`.
pub fn encode(phrase: &str) -> Result<ObjectVector, TextError> {
    let codes: Vec<f64> = phrase
        .chars()
        .map(|c| {
            let code = c as u32;
            let code = if code > MAX_CODE {
                REPLACEMENT as u32
            } else {
                code
            };
            f64::from(code) / f64::from(MAX_CODE)
        })
        .collect();
    ObjectVector::from_codes(codes)
}

/// Iterates `(p_i, q_i)` over the common length, padding the shorter side
/// with zeros.
fn padded_pairs<'a>(p: &'a [f64], q: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
    let len = p.len().max(q.len());
    (0..len).map(move |i| {
        (
            p.get(i).copied().unwrap_or(0.0),
            q.get(i).copied().unwrap_or(0.0),
        )
    })
}

/// Length-normalized Euclidean distance: `sqrt(sum (q_i - p_i)^2) / sqrt(L)`
/// after zero-padding both vectors to the longer length `L`.
pub fn euclidean(p: &ObjectVector, q: &ObjectVector) -> f64 {
    euclidean_codes(p.codes(), q.codes())
}

pub fn euclidean_codes(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    if len == 0 {
        return 0.0;
    }
    let sum: f64 = padded_pairs(p, q).map(|(a, b)| (b - a) * (b - a)).sum();
    sum.sqrt() / (len as f64).sqrt()
}

/// Population variance of the zero-padded difference vector `b - a`.
pub fn variance_pair(a: &ObjectVector, b: &ObjectVector) -> f64 {
    let diff: Vec<f64> = padded_pairs(a.codes(), b.codes())
        .map(|(x, y)| y - x)
        .collect();
    variance(&diff)
}

/// Relatedness of a candidate to a marked object: Euclidean distance plus
/// the standard-deviation gap plus the variance of the difference vector.
/// Argument order is marked object first.
pub fn relatedness(marked: &ObjectVector, candidate: &ObjectVector) -> f64 {
    euclidean(marked, candidate)
        + (marked.stddev() - candidate.stddev()).abs()
        + variance_pair(marked, candidate)
}
