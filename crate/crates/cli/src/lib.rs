//! End-to-end orchestration: load the marking file and taxonomy, extract
//! instances from the vendor corpus and then the query corpus, rank vendors,
//! and serialize the report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use semmatch_core::{
    Extractor, InstanceSet, MarkingFile, MatchReport, Matchmaker, Stopwords, Taxonomy, Thresholds,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, missing paths, empty corpora.
    #[error("{0}")]
    Config(String),
    /// Unreadable or malformed input data, failed writes.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub vendors_dir: PathBuf,
    pub queries_dir: PathBuf,
    pub marking_path: PathBuf,
    pub taxonomy_path: PathBuf,
    pub stopwords_path: Option<PathBuf>,
    pub thresholds: Thresholds,
    pub output_format: OutputFormat,
    pub update_marking: bool,
}

impl RunConfig {
    pub fn new(
        vendors_dir: impl Into<PathBuf>,
        queries_dir: impl Into<PathBuf>,
        marking_path: impl Into<PathBuf>,
        taxonomy_path: impl Into<PathBuf>,
    ) -> Self {
        RunConfig {
            vendors_dir: vendors_dir.into(),
            queries_dir: queries_dir.into(),
            marking_path: marking_path.into(),
            taxonomy_path: taxonomy_path.into(),
            stopwords_path: None,
            thresholds: Thresholds::default(),
            output_format: OutputFormat::default(),
            update_marking: true,
        }
    }

    /// Checks that every input path exists with the right kind.
    pub fn validate(&self) -> Result<(), CliError> {
        let dirs = [
            ("vendors directory", &self.vendors_dir),
            ("queries directory", &self.queries_dir),
        ];
        for (what, p) in dirs {
            if !p.is_dir() {
                return Err(CliError::Config(format!(
                    "{what} {} does not exist or is not a directory",
                    p.display()
                )));
            }
        }
        let mut files = vec![
            ("marking file", &self.marking_path),
            ("taxonomy file", &self.taxonomy_path),
        ];
        if let Some(sw) = &self.stopwords_path {
            files.push(("stopword file", sw));
        }
        for (what, p) in files {
            if !p.is_file() {
                return Err(CliError::Config(format!(
                    "{what} {} does not exist or is not a file",
                    p.display()
                )));
            }
        }
        Ok(())
    }
}

/// Reads every non-hidden regular file in `dir`; the file stem is the
/// document id.
pub fn load_corpus(dir: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("cannot list {}: {e}", dir.display())))?;
    let mut docs = BTreeMap::new();
    for entry in entries {
        let entry =
            entry.map_err(|e| CliError::Data(format!("cannot list {}: {e}", dir.display())))?;
        let path = entry.path();
        let name = entry.file_name();
        if name.to_string_lossy().starts_with('.') || !path.is_file() {
            continue;
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        if docs.insert(id.clone(), text).is_some() {
            return Err(CliError::Data(format!(
                "duplicate document id {id:?} in {}",
                dir.display()
            )));
        }
    }
    Ok(docs)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: MatchReport,
    pub vendor_instances: BTreeMap<String, InstanceSet>,
    pub query_instances: BTreeMap<String, InstanceSet>,
    /// The marking file as it stood after extraction.
    pub marking: MarkingFile,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let data = |e: &dyn std::fmt::Display| CliError::Data(e.to_string());

    let mut marking = MarkingFile::load(&cfg.marking_path).map_err(|e| data(&e))?;
    let taxonomy = Taxonomy::load(&cfg.taxonomy_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", cfg.taxonomy_path.display())))?;
    let stopwords = match &cfg.stopwords_path {
        Some(p) => Stopwords::parse(
            &fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => Stopwords::default(),
    };

    let vendors = load_corpus(&cfg.vendors_dir)?;
    if vendors.is_empty() {
        return Err(CliError::Config(format!(
            "vendor corpus {} is empty",
            cfg.vendors_dir.display()
        )));
    }
    let queries = load_corpus(&cfg.queries_dir)?;
    if queries.is_empty() {
        return Err(CliError::Config(format!(
            "query corpus {} is empty",
            cfg.queries_dir.display()
        )));
    }

    // vendors first, so vendor vocabulary seeds query extraction
    let extractor = Extractor::new(cfg.thresholds, stopwords.clone());
    let vendor_instances = extractor.extract_corpus(&vendors, &mut marking);
    let query_instances = extractor.extract_corpus(&queries, &mut marking);
    log::info!(
        "extracted {} vendor and {} query instance sets; marking now holds {} entries",
        vendor_instances.len(),
        query_instances.len(),
        marking.len()
    );

    let report = Matchmaker::new(&taxonomy, cfg.thresholds)
        .with_stopwords(stopwords)
        .rank_vendors(&query_instances, &vendor_instances);

    if cfg.update_marking && marking.is_dirty() {
        marking.save().map_err(|e| data(&e))?;
    }

    Ok(RunOutcome {
        report,
        vendor_instances,
        query_instances,
        marking,
    })
}

#[derive(Serialize)]
struct JsonReport<'a> {
    results: &'a [semmatch_core::VendorResult],
    thresholds: &'a Thresholds,
    winner: &'a Option<String>,
}

/// Serializes a report. JSON output has sorted keys and a trailing newline;
/// text output is a ranking table.
pub fn emit_report(report: &MatchReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let doc = JsonReport {
                results: &report.results,
                thresholds: &report.thresholds,
                winner: &report.winner,
            };
            // serde_json maps are BTreeMaps, so going through Value sorts keys
            let value = serde_json::to_value(doc).expect("report is serializable");
            let mut out = serde_json::to_string_pretty(&value).expect("value is serializable");
            out.push('\n');
            out
        }
        OutputFormat::Text => text_table(report),
    }
}

fn text_table(report: &MatchReport) -> String {
    use std::fmt::Write;

    let width = report
        .results
        .iter()
        .map(|r| r.vendor_id.len())
        .max()
        .unwrap_or(0)
        .max("vendor".len());
    let mut out = String::new();
    writeln!(
        out,
        "{:>4}  {:<width$}  {:>8}  {:>5}",
        "rank", "vendor", "match %", "pairs"
    )
    .unwrap();
    for (i, r) in report.results.iter().enumerate() {
        writeln!(
            out,
            "{:>4}  {:<width$}  {:>8.2}  {:>5}",
            i + 1,
            r.vendor_id,
            r.match_percentage,
            r.pairs.len()
        )
        .unwrap();
    }
    match &report.winner {
        Some(w) => writeln!(out, "\nbest match: {w}").unwrap(),
        None => writeln!(out, "\nno vendor matched any query instance").unwrap(),
    }
    out
}
