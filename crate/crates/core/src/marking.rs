//! The marking file: a persisted gazetteer of marked objects and their
//! observed frequencies.
//!
//! Format: UTF-8, one record per line, `<phrase>\t<frequency>\n`, phrases
//! lowercase, no header. The file grows as extraction discovers new
//! instances; saves replace the file atomically.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MarkingError {
    #[error("cannot read marking file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}:{line}: duplicate phrase {phrase:?} (first seen on line {first_line})")]
    Duplicate {
        path: PathBuf,
        line: usize,
        first_line: usize,
        phrase: String,
    },
    #[error("cannot write marking file {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("observed frequency must be at least 1 (phrase {phrase:?})")]
    ZeroFrequency { phrase: String },
    #[error("marked phrase must be non-empty and free of tabs and newlines: {phrase:?}")]
    InvalidPhrase { phrase: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedObject {
    pub phrase: String,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkingFile {
    entries: Vec<MarkedObject>,
    index: HashMap<String, usize>,
    source_path: PathBuf,
    dirty: bool,
}

fn valid_phrase(phrase: &str) -> bool {
    !phrase.trim().is_empty() && !phrase.contains(['\t', '\n', '\r'])
}

impl MarkingFile {
    /// An empty, unsaved marking file bound to `path`.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        MarkingFile {
            entries: Vec::new(),
            index: HashMap::new(),
            source_path: path.into(),
            dirty: false,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MarkingError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| MarkingError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses marking-file contents; `path` is used for diagnostics and as
    /// the save target.
    pub fn parse(text: &str, path: impl Into<PathBuf>) -> Result<Self, MarkingError> {
        let mut mf = MarkingFile::new(path);
        let parse_err = |mf: &MarkingFile, line: usize, reason: String| MarkingError::Parse {
            path: mf.source_path.clone(),
            line,
            reason,
        };
        for (i, raw) in text.split_terminator('\n').enumerate() {
            let line_no = i + 1;
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 2 {
                return Err(parse_err(
                    &mf,
                    line_no,
                    format!(
                        "expected `phrase<TAB>frequency`, found {} field(s)",
                        fields.len()
                    ),
                ));
            }
            let phrase = fields[0].to_lowercase();
            if !valid_phrase(&phrase) {
                return Err(parse_err(&mf, line_no, "empty phrase".into()));
            }
            let frequency: u64 = fields[1].parse().map_err(|_| {
                parse_err(
                    &mf,
                    line_no,
                    format!("frequency {:?} is not an integer", fields[1]),
                )
            })?;
            if frequency < 1 {
                return Err(parse_err(
                    &mf,
                    line_no,
                    "frequency must be at least 1".into(),
                ));
            }
            if let Some(&first) = mf.index.get(&phrase) {
                return Err(MarkingError::Duplicate {
                    path: mf.source_path.clone(),
                    line: line_no,
                    first_line: first + 1,
                    phrase,
                });
            }
            mf.index.insert(phrase.clone(), mf.entries.len());
            mf.entries.push(MarkedObject { phrase, frequency });
        }
        Ok(mf)
    }

    pub fn entries(&self) -> &[MarkedObject] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn get(&self, phrase: &str) -> Option<&MarkedObject> {
        self.index
            .get(&phrase.to_lowercase())
            .map(|&i| &self.entries[i])
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.get(phrase).is_some()
    }

    /// Records an observation: appends an absent phrase, or adds
    /// `observed_frequency` to an existing entry. Returns `true` when a new
    /// entry was appended.
    pub fn update(&mut self, phrase: &str, observed_frequency: u64) -> Result<bool, MarkingError> {
        let phrase = phrase.to_lowercase();
        if observed_frequency == 0 {
            return Err(MarkingError::ZeroFrequency { phrase });
        }
        if !valid_phrase(&phrase) {
            return Err(MarkingError::InvalidPhrase { phrase });
        }
        self.dirty = true;
        match self.index.get(&phrase) {
            Some(&i) => {
                let e = &mut self.entries[i];
                e.frequency = e.frequency.saturating_add(observed_frequency);
                Ok(false)
            }
            None => {
                self.index.insert(phrase.clone(), self.entries.len());
                self.entries.push(MarkedObject {
                    phrase,
                    frequency: observed_frequency,
                });
                Ok(true)
            }
        }
    }

    /// Serialized form, exactly as written by [`MarkingFile::save`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.phrase);
            out.push('\t');
            out.push_str(&e.frequency.to_string());
            out.push('\n');
        }
        out
    }

    /// Writes to the source path via a temporary sibling file and rename.
    /// On failure the original file is left untouched.
    pub fn save(&mut self) -> Result<(), MarkingError> {
        let path = self.source_path.clone();
        self.save_to(&path)?;
        self.dirty = false;
        Ok(())
    }

    fn save_to(&self, path: &Path) -> Result<(), MarkingError> {
        let write_err = |source: io::Error| MarkingError::Write {
            path: path.to_path_buf(),
            source,
        };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::Builder::new()
            .prefix(".marking-")
            .tempfile_in(dir)
            .map_err(write_err)?;
        tmp.write_all(self.to_text().as_bytes())
            .map_err(write_err)?;
        tmp.as_file().sync_all().map_err(write_err)?;
        tmp.persist(path).map_err(|e| write_err(e.error))?;
        Ok(())
    }
}
