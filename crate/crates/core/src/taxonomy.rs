//! Rooted IS-A concept graph with Wu-Palmer similarity.
//!
//! Depth starts at 1 for the root and is `1 + max(parent depth)` elsewhere,
//! so every proper ancestor is strictly shallower than its descendants and
//! Wu-Palmer scores stay in `(0, 1]` on DAGs as well as trees. Least common
//! subsumer ties are broken by the smallest concept id.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::textcore::{tokenize, Stopwords};

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("cannot read taxonomy file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("taxonomy line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("taxonomy contains a cycle through concept {member:?}")]
    Cycle { member: String },
    #[error("taxonomy has no root concept")]
    NoRoot,
    #[error("taxonomy has multiple root concepts: {}", roots.join(", "))]
    MultipleRoots { roots: Vec<String> },
    #[error("edge {child:?} -> {parent:?} names an unknown parent")]
    DanglingParent { child: String, parent: String },
    #[error("unknown concept {0:?}")]
    UnknownConcept(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub parents: Vec<String>,
    pub depth: u32,
}

/// Wu-Palmer similarity of two concepts together with their subsumer.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub lcs_id: String,
}

/// Similarity of two phrases in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseScore {
    pub value: f64,
    /// Token pairs that contributed nothing because at least one side is
    /// not a concept and the tokens differ.
    pub untaxonomized_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    // sorted by id; index order doubles as the tie-break order
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
    depth: Vec<u32>,
    ancestors: Vec<Vec<u64>>,
    root: usize,
}

fn bit_words(n: usize) -> usize {
    n.div_ceil(64)
}

impl Taxonomy {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TaxonomyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TaxonomyError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses an edge list: one `<child>\t<parent>` per line. A line with a
    /// single id declares a concept without adding an edge. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_lowercase()).collect();
            if fields.len() > 2 || fields.iter().any(String::is_empty) {
                return Err(TaxonomyError::Parse {
                    line: i + 1,
                    reason: "expected `child<TAB>parent`".into(),
                });
            }
            let child = fields[0].clone();
            let entry = parents.entry(child).or_default();
            if let Some(parent) = fields.get(1) {
                entry.insert(parent.clone());
                parents.entry(parent.clone()).or_default();
            }
        }
        Self::from_parents(parents)
    }

    /// Builds and validates a taxonomy from a child → parents map.
    pub fn from_parents(map: BTreeMap<String, BTreeSet<String>>) -> Result<Self, TaxonomyError> {
        let ids: Vec<String> = map.keys().map(|k| k.to_lowercase()).collect();
        let index: BTreeMap<String, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        if index.len() != ids.len() {
            let dup = ids.windows(2).find(|w| w[0] == w[1]).map(|w| w[0].clone());
            return Err(TaxonomyError::Parse {
                line: 0,
                reason: format!("concept {:?} declared twice", dup.unwrap_or_default()),
            });
        }
        let mut parents = vec![Vec::new(); ids.len()];
        for (child, ps) in &map {
            let c = index[&child.to_lowercase()];
            for p in ps {
                let Some(&pi) = index.get(&p.to_lowercase()) else {
                    return Err(TaxonomyError::DanglingParent {
                        child: child.clone(),
                        parent: p.clone(),
                    });
                };
                parents[c].push(pi);
            }
            parents[c].sort_unstable();
            parents[c].dedup();
        }

        let order = topo_order(&parents).map_err(|i| TaxonomyError::Cycle {
            member: ids[i].clone(),
        })?;

        let roots: Vec<usize> = (0..ids.len()).filter(|&i| parents[i].is_empty()).collect();
        let root = match roots.as_slice() {
            [] => return Err(TaxonomyError::NoRoot),
            [r] => *r,
            _ => {
                return Err(TaxonomyError::MultipleRoots {
                    roots: roots.iter().map(|&i| ids[i].clone()).collect(),
                })
            }
        };

        let n = ids.len();
        let mut depth = vec![0u32; n];
        let mut ancestors = vec![vec![0u64; bit_words(n)]; n];
        for &c in &order {
            depth[c] = parents[c]
                .iter()
                .map(|&p| depth[p])
                .max()
                .map_or(1, |d| d + 1);
            let mut bits = vec![0u64; bit_words(n)];
            bits[c / 64] |= 1 << (c % 64);
            for &p in &parents[c] {
                for (w, pw) in bits.iter_mut().zip(&ancestors[p]) {
                    *w |= pw;
                }
            }
            ancestors[c] = bits;
        }

        Ok(Taxonomy {
            ids,
            index,
            parents,
            depth,
            ancestors,
            root,
        })
    }

    pub fn root(&self) -> &str {
        &self.ids[self.root]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Concept ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }

    fn lookup(&self, id: &str) -> Result<usize, TaxonomyError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownConcept(id.to_string()))
    }

    pub fn concept(&self, id: &str) -> Result<Concept, TaxonomyError> {
        let i = self.lookup(id)?;
        Ok(Concept {
            id: self.ids[i].clone(),
            parents: self.parents[i]
                .iter()
                .map(|&p| self.ids[p].clone())
                .collect(),
            depth: self.depth[i],
        })
    }

    pub fn depth(&self, id: &str) -> Result<u32, TaxonomyError> {
        Ok(self.depth[self.lookup(id)?])
    }

    /// Ancestors of `id`, the concept itself included, in ascending id order.
    pub fn ancestors(&self, id: &str) -> Result<Vec<&str>, TaxonomyError> {
        let i = self.lookup(id)?;
        Ok(self
            .bits_iter(&self.ancestors[i])
            .map(|j| self.ids[j].as_str())
            .collect())
    }

    fn bits_iter<'a>(&'a self, bits: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
        bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word & (1 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }

    fn lcs_index(&self, a: usize, b: usize) -> usize {
        let common: Vec<u64> = self.ancestors[a]
            .iter()
            .zip(&self.ancestors[b])
            .map(|(x, y)| x & y)
            .collect();
        // index order is id order, so the first maximum is the smallest id
        let mut best = self.root;
        for j in self.bits_iter(&common) {
            if self.depth[j] > self.depth[best] {
                best = j;
            }
        }
        best
    }

    /// Deepest common ancestor; ties go to the smallest id.
    pub fn lcs(&self, a: &str, b: &str) -> Result<&str, TaxonomyError> {
        let (a, b) = (self.lookup(a)?, self.lookup(b)?);
        Ok(&self.ids[self.lcs_index(a, b)])
    }

    /// `2 * depth(lcs) / (depth(a) + depth(b))`.
    pub fn wup_score(&self, a: &str, b: &str) -> Result<SimilarityScore, TaxonomyError> {
        let (a, b) = (self.lookup(a)?, self.lookup(b)?);
        let l = self.lcs_index(a, b);
        Ok(SimilarityScore {
            value: self.wup_value(a, b, l),
            lcs_id: self.ids[l].clone(),
        })
    }

    fn wup_value(&self, a: usize, b: usize, lcs: usize) -> f64 {
        2.0 * f64::from(self.depth[lcs]) / f64::from(self.depth[a] + self.depth[b])
    }

    /// Token-level similarity: Wu-Palmer when both tokens are concepts,
    /// otherwise 1 for equal strings and 0 (untaxonomized) for different ones.
    fn token_score(&self, a: &str, b: &str) -> (f64, bool) {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => (self.wup_value(i, j, self.lcs_index(i, j)), false),
            _ if a == b => (1.0, false),
            _ => (0.0, true),
        }
    }

    /// Symmetrized best-match alignment of the stopword-stripped tokens of
    /// two phrases. Falls back to whole-phrase equality when either side has
    /// no content tokens.
    pub fn phrase_score(&self, a: &str, b: &str, stopwords: &Stopwords) -> PhraseScore {
        let content = |p: &str| -> Vec<String> {
            tokenize(p)
                .into_iter()
                .map(|t| t.text)
                .filter(|t| !stopwords.contains(t))
                .collect()
        };
        let (ta, tb) = (content(a), content(b));
        if ta.is_empty() || tb.is_empty() {
            let norm = |p: &str| {
                p.split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ")
                    .to_lowercase()
            };
            let value = if norm(a) == norm(b) { 1.0 } else { 0.0 };
            return PhraseScore {
                value,
                untaxonomized_pairs: 0,
            };
        }

        let mut untaxonomized = 0;
        let table: Vec<Vec<f64>> = ta
            .iter()
            .map(|x| {
                tb.iter()
                    .map(|y| {
                        let (s, flagged) = self.token_score(x, y);
                        untaxonomized += usize::from(flagged);
                        s
                    })
                    .collect()
            })
            .collect();

        let forward = table
            .iter()
            .map(|row| row.iter().copied().fold(0.0, f64::max))
            .sum::<f64>()
            / ta.len() as f64;
        let backward = (0..tb.len())
            .map(|j| table.iter().map(|row| row[j]).fold(0.0, f64::max))
            .sum::<f64>()
            / tb.len() as f64;

        PhraseScore {
            value: (forward + backward) / 2.0,
            untaxonomized_pairs: untaxonomized,
        }
    }
}

/// Parent-first topological order, or the index of a node on a cycle.
fn topo_order(parents: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = parents.len();
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if mark[start] != Mark::New {
            continue;
        }
        // (node, next parent slot)
        let mut stack = vec![(start, 0usize)];
        mark[start] = Mark::Active;
        while let Some(&mut (node, ref mut slot)) = stack.last_mut() {
            if let Some(&p) = parents[node].get(*slot) {
                *slot += 1;
                match mark[p] {
                    Mark::Active => return Err(p),
                    Mark::New => {
                        mark[p] = Mark::Active;
                        stack.push((p, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}
