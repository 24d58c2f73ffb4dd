//! Instance extraction: candidates whose relatedness to some marked object
//! falls under the threshold become instances and are fed back into the
//! marking file.

use std::collections::BTreeMap;

use crate::exec::Execution;
use crate::marking::MarkingFile;
use crate::matchmaker::Thresholds;
use crate::textcore::{
    candidates, encode, relatedness, tokenize, CandidateObject, ObjectVector, Stopwords,
};

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub phrase: String,
    /// Occurrences in the source document(s).
    pub frequency: u64,
    /// Minimum relatedness against any marked object.
    pub best_r: f64,
    pub matched_marked_phrase: String,
    pub via_fallback: bool,
}

/// Instances of one document, keyed by phrase.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstanceSet {
    pub document_id: String,
    pub instances: BTreeMap<String, InstanceRecord>,
}

impl InstanceSet {
    pub fn new(document_id: impl Into<String>) -> Self {
        InstanceSet {
            document_id: document_id.into(),
            instances: BTreeMap::new(),
        }
    }

    /// Builds a set from `(phrase, frequency)` pairs, as if every phrase had
    /// been an exact marked hit. Repeated phrases accumulate.
    pub fn from_frequencies<I, S>(document_id: impl Into<String>, items: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut set = InstanceSet::new(document_id);
        for (phrase, frequency) in items {
            let phrase = phrase.into();
            set.insert(InstanceRecord {
                matched_marked_phrase: phrase.clone(),
                phrase,
                frequency,
                best_r: 0.0,
                via_fallback: false,
            });
        }
        set
    }

    /// Inserts a record, merging with an existing one of the same phrase:
    /// frequencies add, and the lower `best_r` wins.
    pub fn insert(&mut self, record: InstanceRecord) {
        match self.instances.get_mut(&record.phrase) {
            Some(existing) => {
                existing.frequency += record.frequency;
                if record.best_r < existing.best_r {
                    existing.best_r = record.best_r;
                    existing.matched_marked_phrase = record.matched_marked_phrase;
                    existing.via_fallback = record.via_fallback;
                }
            }
            None => {
                self.instances.insert(record.phrase.clone(), record);
            }
        }
    }

    /// Union of several sets with frequencies summed per phrase.
    pub fn pooled<'a, I>(document_id: impl Into<String>, sets: I) -> Self
    where
        I: IntoIterator<Item = &'a InstanceSet>,
    {
        let mut out = InstanceSet::new(document_id);
        for set in sets {
            for r in set.instances.values() {
                out.insert(r.clone());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, phrase: &str) -> Option<&InstanceRecord> {
        self.instances.get(phrase)
    }

    pub fn iter(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.instances.values()
    }

    pub fn total_frequency(&self) -> u64 {
        self.iter().map(|r| r.frequency).sum()
    }
}

/// Encoded view of the marking file, kept in step with its entries.
struct MarkedVectors {
    phrases: Vec<String>,
    vectors: Vec<ObjectVector>,
}

impl MarkedVectors {
    fn build(mf: &MarkingFile, exec: Execution) -> Self {
        let entries = mf.entries();
        let vectors = exec.map(entries, |e| {
            encode(&e.phrase).expect("marked phrases are non-empty")
        });
        MarkedVectors {
            phrases: entries.iter().map(|e| e.phrase.clone()).collect(),
            vectors,
        }
    }

    fn push(&mut self, phrase: &str, vector: ObjectVector) {
        self.phrases.push(phrase.to_string());
        self.vectors.push(vector);
    }
}

/// Extraction settings. The default uses the bundled stopword list, the
/// published thresholds, and [`Execution::default`].
#[derive(Debug, Clone, Default)]
pub struct Extractor {
    pub thresholds: Thresholds,
    pub stopwords: Stopwords,
    pub execution: Execution,
}

impl Extractor {
    pub fn new(thresholds: Thresholds, stopwords: Stopwords) -> Self {
        Extractor {
            thresholds,
            stopwords,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Candidate objects of a document, in first-occurrence order.
    pub fn candidates(&self, text: &str) -> Vec<CandidateObject> {
        candidates(&tokenize(text), &self.stopwords)
    }

    /// Extracts the instances of one document and records every admitted
    /// instance in `mf` as it is found, so later candidates are also scored
    /// against instances admitted earlier in the same document.
    pub fn extract_instances(
        &self,
        document_id: &str,
        text: &str,
        mf: &mut MarkingFile,
    ) -> InstanceSet {
        let cands = self.candidates(text);
        self.extract_candidates(document_id, &cands, mf)
    }

    fn extract_candidates(
        &self,
        document_id: &str,
        cands: &[CandidateObject],
        mf: &mut MarkingFile,
    ) -> InstanceSet {
        let exec = self.execution;
        let mut marked = MarkedVectors::build(mf, exec);
        let seeded = marked.vectors.len();

        // Scoring against the marking as it stood on entry is independent
        // per candidate.
        let encoded: Vec<ObjectVector> = exec.map(cands, |c| {
            encode(&c.phrase).expect("candidate phrases are non-empty")
        });
        let initial: Vec<Option<(usize, f64)>> = exec.map(&encoded, |v| {
            Execution::Sequential.argmin_by_key(&marked.vectors, |m| relatedness(m, v))
        });

        let mut set = InstanceSet::new(document_id);
        for ((cand, vector), seed_best) in cands.iter().zip(encoded).zip(initial) {
            // Entries appended during this document come after the seeded
            // ones, so a strict comparison keeps the lowest-index tie rule.
            let mut best = seed_best;
            for (i, m) in marked.vectors.iter().enumerate().skip(seeded) {
                let r = relatedness(m, &vector);
                if best.is_none_or(|(_, b)| r < b) {
                    best = Some((i, r));
                }
            }
            let Some((idx, best_r)) = best else { continue };
            let via_fallback = if best_r < self.thresholds.r_threshold() {
                false
            } else if best_r < self.thresholds.fallback_threshold() {
                true
            } else {
                continue;
            };
            set.insert(InstanceRecord {
                phrase: cand.phrase.clone(),
                frequency: cand.frequency,
                best_r,
                matched_marked_phrase: marked.phrases[idx].clone(),
                via_fallback,
            });
            let added = mf
                .update(&cand.phrase, cand.frequency)
                .expect("candidate frequency is at least 1");
            if added {
                marked.push(&cand.phrase, vector);
            }
        }
        set
    }

    /// Extracts every document in ascending id order, threading the marking
    /// file through.
    pub fn extract_corpus(
        &self,
        documents: &BTreeMap<String, String>,
        mf: &mut MarkingFile,
    ) -> BTreeMap<String, InstanceSet> {
        let docs: Vec<(&String, &String)> = documents.iter().collect();
        // tokenization does not depend on the marking
        let cands = self.execution.map(&docs, |(_, text)| self.candidates(text));
        docs.iter()
            .zip(cands)
            .map(|((id, _), c)| ((*id).clone(), self.extract_candidates(id, &c, mf)))
            .collect()
    }
}

/// [`Extractor::extract_instances`] with the default stopword list.
pub fn extract_instances(
    document_id: &str,
    text: &str,
    mf: &mut MarkingFile,
    thresholds: Thresholds,
) -> InstanceSet {
    Extractor::new(thresholds, Stopwords::default()).extract_instances(document_id, text, mf)
}

/// [`Extractor::extract_corpus`] with the default stopword list.
pub fn extract_corpus(
    documents: &BTreeMap<String, String>,
    mf: &mut MarkingFile,
    thresholds: Thresholds,
) -> BTreeMap<String, InstanceSet> {
    Extractor::new(thresholds, Stopwords::default()).extract_corpus(documents, mf)
}
