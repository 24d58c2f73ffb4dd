#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

/// A rooted DAG as a child -> parents map, plus its edge-list text.
pub struct RandomDag {
    pub parents: BTreeMap<String, BTreeSet<String>>,
    pub edges: String,
}

/// `n` concepts with shuffled ids; node k > 0 gets 1..=3 parents among
/// earlier nodes, so the graph is acyclic with a single root.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize) -> RandomDag {
    let mut ids: Vec<String> = (0..n).map(|i| format!("n{i:03}")).collect();
    ids.shuffle(rng);
    let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut edges = String::new();
    parents.insert(ids[0].clone(), BTreeSet::new());
    edges.push_str(&ids[0]);
    edges.push('\n');
    for k in 1..n {
        let count = rng.gen_range(1..=3.min(k));
        let mut ps = BTreeSet::new();
        while ps.len() < count {
            ps.insert(ids[rng.gen_range(0..k)].clone());
        }
        for p in &ps {
            edges.push_str(&format!("{}\t{}\n", ids[k], p));
        }
        parents.insert(ids[k].clone(), ps);
    }
    RandomDag { parents, edges }
}

/// Depth as 1 + length of the longest upward path to the root, found by
/// relaxing every edge until nothing changes.
pub fn oracle_depths(parents: &BTreeMap<String, BTreeSet<String>>) -> BTreeMap<String, u32> {
    let mut depth: BTreeMap<String, u32> = parents.keys().map(|k| (k.clone(), 1)).collect();
    loop {
        let mut changed = false;
        for (child, ps) in parents {
            for p in ps {
                let want = depth[p] + 1;
                if want > depth[child] {
                    depth.insert(child.clone(), want);
                    changed = true;
                }
            }
        }
        if !changed {
            return depth;
        }
    }
}

pub fn oracle_ancestors(
    parents: &BTreeMap<String, BTreeSet<String>>,
    id: &str,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![id.to_string()];
    while let Some(c) = stack.pop() {
        if out.insert(c.clone()) {
            stack.extend(parents[&c].iter().cloned());
        }
    }
    out
}

/// Brute-force view of a DAG: depths and ancestor sets precomputed.
pub struct Oracle {
    pub depth: BTreeMap<String, u32>,
    pub ancestors: BTreeMap<String, BTreeSet<String>>,
}

impl Oracle {
    pub fn new(parents: &BTreeMap<String, BTreeSet<String>>) -> Self {
        Oracle {
            depth: oracle_depths(parents),
            ancestors: parents
                .keys()
                .map(|k| (k.clone(), oracle_ancestors(parents, k)))
                .collect(),
        }
    }

    /// Enumerates common ancestors, keeps the deepest, smallest id on ties.
    pub fn lcs(&self, a: &str, b: &str) -> (String, u32) {
        let common: Vec<(String, u32)> = self.ancestors[a]
            .intersection(&self.ancestors[b])
            .map(|c| (c.clone(), self.depth[c]))
            .collect();
        let max = common.iter().map(|(_, d)| *d).max().unwrap();
        common.into_iter().filter(|(_, d)| *d == max).min().unwrap()
    }

    pub fn wup(&self, a: &str, b: &str) -> f64 {
        let (_, dl) = self.lcs(a, b);
        2.0 * dl as f64 / (self.depth[a] + self.depth[b]) as f64
    }
}

pub fn oracle_mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..xs.len() {
        s += xs[i];
    }
    s / xs.len() as f64
}

pub fn oracle_variance(xs: &[f64]) -> f64 {
    let m = oracle_mean(xs);
    let mut s = 0.0;
    for i in 0..xs.len() {
        s += (xs[i] - m).powi(2);
    }
    s / xs.len() as f64
}

/// Difference vector `b - a` after zero-padding.
pub fn oracle_diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = if i < a.len() { a[i] } else { 0.0 };
            let y = if i < b.len() { b[i] } else { 0.0 };
            y - x
        })
        .collect()
}

pub fn oracle_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let d = oracle_diff(a, b);
    let mut s = 0.0;
    for v in &d {
        s += v * v;
    }
    (s / d.len() as f64).sqrt()
}

/// Relatedness evaluated term by term from raw character codes.
pub fn oracle_relatedness(marked: &str, candidate: &str) -> f64 {
    let codes = |s: &str| s.bytes().map(|b| b as f64 / 127.0).collect::<Vec<_>>();
    let (a, b) = (codes(marked), codes(candidate));
    oracle_euclidean(&a, &b)
        + (oracle_variance(&a).sqrt() - oracle_variance(&b).sqrt()).abs()
        + oracle_variance(&oracle_diff(&a, &b))
}

pub fn random_phrase<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.1) {
                ' '
            } else {
                rng.gen_range(b'a'..=b'z') as char
            }
        })
        .collect()
}

pub const TABLE1: &str = "energy sources\t24\nenergy\t165\nresources\t51\nsun\t37\nwind\t33\n";

/// Nudges one letter by up to three code points, producing a near-variant
/// whose relatedness to the original straddles the usual thresholds.
pub fn mutate<R: Rng>(rng: &mut R, word: &str) -> String {
    let mut bytes = word.as_bytes().to_vec();
    let letters: Vec<usize> = (0..bytes.len())
        .filter(|&i| bytes[i].is_ascii_lowercase())
        .collect();
    let i = letters[rng.gen_range(0..letters.len())];
    let delta = rng.gen_range(1..=3) as i16 * if rng.gen_bool(0.5) { 1 } else { -1 };
    let shifted = bytes[i] as i16 + delta;
    bytes[i] = if (b'a' as i16..=b'z' as i16).contains(&shifted) {
        shifted as u8
    } else {
        (bytes[i] as i16 - delta) as u8
    };
    String::from_utf8(bytes).unwrap()
}

/// Documents mixing marked phrases, near-variants of them, filler words and
/// stopwords.
pub fn random_corpus<R: Rng>(
    rng: &mut R,
    docs: usize,
    marked: &[&str],
) -> BTreeMap<String, String> {
    const FILLER: &[&str] = &[
        "panel", "grid", "battery", "install", "cost", "site", "of", "the", "and",
    ];
    (0..docs)
        .map(|d| {
            let len = rng.gen_range(0..40);
            let words: Vec<String> = (0..len)
                .map(|_| {
                    let roll = rng.gen_range(0..10);
                    if roll < 3 {
                        marked[rng.gen_range(0..marked.len())].to_string()
                    } else if roll < 6 {
                        let base = marked[rng.gen_range(0..marked.len())];
                        mutate(rng, base)
                    } else {
                        FILLER[rng.gen_range(0..FILLER.len())].to_string()
                    }
                })
                .collect();
            (format!("doc{d:03}"), words.join(" "))
        })
        .collect()
}
