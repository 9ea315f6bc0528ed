//! Staged pipeline with file-based handoff.
//!
//! Every stage reads its inputs from the output directory (or from the
//! external inputs named in [`RunConfig`]) and writes its outputs there, so
//! any suffix of the stage list can be rerun on its own.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::compare::{cdf_csv, compare_groups, comparison_csv, estimates_csv, regression_csv, regression_grid};
use crate::impact::{compute_baselines, normalize_all, stratify, BaselineIndex};
use crate::ingest::{ingest_dir, normalize_document, read_corpus_jsonl, AbbreviationTable, MetadataPaths, RawDocument};
use crate::metrics::complexity_profile;
use crate::pipeline::tagger::LexiconTagger;
use crate::pipeline::{export_tagged, import_tagged_many, tag_document, TaggedDocument};
use crate::report::{
    baselines_csv, profiles_csv, profiles_jsonl, read_baselines_csv, read_citations_csv, read_profiles_csv,
    read_scores_csv, scores_csv, write_csv, Metadata,
};
use crate::stats::{DEFAULT_ITERATIONS, DEFAULT_LEVEL};

pub const DEFAULT_SEED: u64 = 42;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const REJECTED_FILE: &str = "rejected.csv";
pub const TAGGED_FILE: &str = "tagged.tsv";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const PROFILES_JSONL_FILE: &str = "profiles.jsonl";
pub const BASELINES_FILE: &str = "baselines.csv";
pub const NORMALIZED_FILE: &str = "normalized.csv";
pub const SCORES_FILE: &str = "scores.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const REGRESSION_FILE: &str = "regression.csv";
pub const ERROR_FILE: &str = "error.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Tag,
    Profile,
    Normalize,
    Group,
    Compare,
    Regress,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Tag,
        Stage::Profile,
        Stage::Normalize,
        Stage::Group,
        Stage::Compare,
        Stage::Regress,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Tag => "tag",
            Stage::Profile => "profile",
            Stage::Normalize => "normalize",
            Stage::Group => "group",
            Stage::Compare => "compare",
            Stage::Regress => "regress",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s.trim())
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Parses a comma-separated stage list.
pub fn parse_stages(list: &str) -> Result<Vec<Stage>, String> {
    let mut stages = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<Vec<Stage>, _>>()?;
    stages.sort();
    stages.dedup();
    Ok(stages)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub citations: Option<PathBuf>,
    pub baselines: Option<PathBuf>,
    pub abbrev: Option<PathBuf>,
    pub import_tagged: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub iterations: usize,
    pub level: f64,
    pub stages: Vec<Stage>,
}

impl RunConfig {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            input: None,
            citations: None,
            baselines: None,
            abbrev: None,
            import_tagged: None,
            out: out.into(),
            seed: DEFAULT_SEED,
            iterations: DEFAULT_ITERATIONS,
            level: DEFAULT_LEVEL,
            stages: Stage::ALL.to_vec(),
        }
    }

    /// Short hash of every setting that can change an output value.
    /// The output directory is left out so relocated reruns match.
    pub fn config_hash(&self) -> String {
        let show = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let canonical = format!(
            "input={}\ncitations={}\nbaselines={}\nabbrev={}\nimport_tagged={}\nseed={}\niterations={}\nlevel={}\n",
            show(&self.input),
            show(&self.citations),
            show(&self.baselines),
            show(&self.abbrev),
            show(&self.import_tagged),
            self.seed,
            self.iterations,
            self.level,
        );
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Header block written at the top of every output file.
    pub fn metadata(&self) -> Metadata {
        Metadata::new()
            .with("tool", concat!("lingcx ", env!("CARGO_PKG_VERSION")))
            .with("seed", self.seed)
            .with("config_hash", self.config_hash())
            .with("sd", "sample (n-1); 0 for a single sentence")
            .with("ttr", "lowercased types")
            .with("word_length", "alphabetic characters")
            .with("nc_zero_baseline", "0 when the cell has no citations")
            .with("predictors", "z-scored before term expansion")
            .with("log_models", "rows with NC = 0 dropped")
            .with("ks_p", "asymptotic")
            .with("bootstrap", format!("percentile, nearest rank, {} iterations, level {}", self.iterations, self.level))
    }
}

/// A failure tied to the stage (and document, if known) that produced it.
#[derive(Debug, Error, Serialize)]
#[error("{stage} stage failed{}: {message}", document.as_ref().map(|d| format!(" on {d}")).unwrap_or_default())]
pub struct RunError {
    pub stage: Stage,
    pub document: Option<String>,
    pub message: String,
}

impl RunError {
    fn new(stage: Stage, message: impl ToString) -> Self {
        Self { stage, document: None, message: message.to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("error serializes") + "\n"
    }
}

/// What a run did, for logging and tests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub stages: Vec<Stage>,
    pub written: Vec<PathBuf>,
    pub documents: usize,
    pub rejected: usize,
}

/// Recognised `LINGCX_*` environment variables.
pub const ENV_KEYS: [&str; 10] = [
    "LINGCX_INPUT",
    "LINGCX_CITATIONS",
    "LINGCX_BASELINES",
    "LINGCX_ABBREV",
    "LINGCX_IMPORT_TAGGED",
    "LINGCX_OUT",
    "LINGCX_SEED",
    "LINGCX_ITERATIONS",
    "LINGCX_LEVEL",
    "LINGCX_STAGES",
];

/// Returns the unknown `LINGCX_*` keys among `vars`.
pub fn unknown_env_keys<I: IntoIterator<Item = String>>(vars: I) -> Vec<String> {
    let mut unknown: Vec<String> = vars
        .into_iter()
        .filter(|k| k.starts_with("LINGCX_") && !ENV_KEYS.contains(&k.as_str()))
        .collect();
    unknown.sort();
    unknown
}

struct Runner<'a> {
    config: &'a RunConfig,
    meta: Metadata,
    summary: RunSummary,
}

impl Runner<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.config.out.join(name)
    }

    fn read(&self, stage: Stage, name: &str) -> Result<String, RunError> {
        read_file(stage, &self.path(name))
    }

    fn write(&mut self, stage: Stage, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| RunError::new(stage, format!("writing {}: {e}", path.display())))?;
        self.summary.written.push(path);
        Ok(())
    }

    fn abbreviations(&self, stage: Stage) -> Result<AbbreviationTable, RunError> {
        match &self.config.abbrev {
            Some(p) => AbbreviationTable::load(p).map_err(|e| RunError::new(stage, e)),
            None => Ok(AbbreviationTable::default()),
        }
    }

    fn ingest(&mut self) -> Result<(), RunError> {
        let stage = Stage::Ingest;
        let input = self.config.input.as_ref().ok_or_else(|| RunError::new(stage, "no input directory given"))?;
        let table = self.abbreviations(stage)?;
        let corpus = ingest_dir(input, &MetadataPaths::default()).map_err(|e| RunError::new(stage, e))?;
        let docs: Vec<RawDocument> = corpus.documents.iter().map(|d| normalize_document(d, &table)).collect();
        self.summary.documents = docs.len();
        self.summary.rejected = corpus.rejected.len();
        log::info!("ingested {} documents, rejected {}", docs.len(), corpus.rejected.len());

        let mut text = self.meta.json_header();
        text.push_str(&crate::ingest::write_corpus_jsonl(&docs));
        self.write(stage, CORPUS_FILE, &text)?;
        let rejected: Vec<Vec<String>> = corpus
            .rejected
            .iter()
            .map(|r| {
                let rel = r.path.strip_prefix(input).unwrap_or(&r.path);
                vec![rel.display().to_string(), r.error.to_string()]
            })
            .collect();
        self.write(stage, REJECTED_FILE, &write_csv(&self.meta, &["path", "reason"], &rejected))
    }

    fn tag(&mut self) -> Result<(), RunError> {
        let stage = Stage::Tag;
        let corpus_path = self.path(CORPUS_FILE);
        let mut docs: Vec<TaggedDocument> = Vec::new();
        if corpus_path.exists() || self.config.import_tagged.is_none() {
            let raw = read_corpus_jsonl(&read_file(stage, &corpus_path)?).map_err(|e| RunError::new(stage, e))?;
            let table = self.abbreviations(stage)?;
            let tagger = LexiconTagger::builtin();
            docs = raw
                .par_iter()
                .map(|d| {
                    tag_document(d, &table, &tagger).map_err(|e| RunError {
                        stage,
                        document: Some(d.doc_id.clone()),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(dir) = &self.config.import_tagged {
            for doc in import_dir(stage, dir)? {
                match docs.iter_mut().find(|d| d.doc_id == doc.doc_id) {
                    Some(slot) => *slot = doc,
                    None => docs.push(doc),
                }
            }
            docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        }
        let mut text = self.meta.csv_header().replace("\r\n", "\n");
        for doc in &docs {
            text.push_str(&export_tagged(doc));
        }
        self.write(stage, TAGGED_FILE, &text)
    }

    fn profile(&mut self) -> Result<(), RunError> {
        let stage = Stage::Profile;
        let docs = import_tagged_many(&self.read(stage, TAGGED_FILE)?, "")
            .map_err(|e| RunError::new(stage, format!("{TAGGED_FILE}: {e}")))?;
        let mut profiles = Vec::with_capacity(docs.len());
        for doc in &docs {
            match complexity_profile(doc) {
                Ok(p) => profiles.push(p),
                Err(e) => log::warn!("skipping {}: {e}", doc.doc_id),
            }
        }
        self.write(stage, PROFILES_FILE, &profiles_csv(&self.meta, &profiles))?;
        self.write(stage, PROFILES_JSONL_FILE, &profiles_jsonl(&self.meta, &profiles))
    }

    fn normalize(&mut self) -> Result<(), RunError> {
        let stage = Stage::Normalize;
        let citations_path = self
            .config
            .citations
            .as_ref()
            .ok_or_else(|| RunError::new(stage, "no citations file given"))?;
        let records = read_citations_csv(&read_file(stage, citations_path)?).map_err(|e| RunError::new(stage, e))?;
        let baselines = match &self.config.baselines {
            Some(p) => read_baselines_csv(&read_file(stage, p)?).map_err(|e| RunError::new(stage, e))?,
            None => compute_baselines(&records),
        };
        let index = BaselineIndex::new(baselines).map_err(|e| RunError::new(stage, e))?;
        let scores = normalize_all(&records, &index).map_err(|e| RunError::new(stage, e))?;
        let used: Vec<_> = index.iter().cloned().collect();
        self.write(stage, BASELINES_FILE, &baselines_csv(&self.meta, &used))?;
        let rows: Vec<Vec<String>> = scores.iter().map(|s| vec![s.doc_id.clone(), crate::report::fmt_f64(s.nc)]).collect();
        self.write(stage, NORMALIZED_FILE, &write_csv(&self.meta, &["doc_id", "nc"], &rows))
    }

    fn group(&mut self) -> Result<(), RunError> {
        let stage = Stage::Group;
        let text = self.read(stage, NORMALIZED_FILE)?;
        let rows = crate::report::read_csv(NORMALIZED_FILE, &text, &["doc_id", "nc"]).map_err(|e| RunError::new(stage, e))?;
        let mut scores = Vec::with_capacity(rows.len());
        for row in rows {
            let nc: f64 = row[1]
                .parse()
                .map_err(|_| RunError { stage, document: Some(row[0].clone()), message: format!("bad nc {:?}", row[1]) })?;
            scores.push(crate::impact::NormalizedScore { doc_id: row[0].clone(), nc, group: None });
        }
        // Only articles that have a profile form the population to stratify.
        let profiles_path = self.path(PROFILES_FILE);
        if profiles_path.exists() {
            let profiles = read_profiles_csv(&read_file(stage, &profiles_path)?).map_err(|e| RunError::new(stage, e))?;
            let ids: std::collections::HashSet<&str> = profiles.iter().map(|p| p.doc_id.as_str()).collect();
            if let Some(missing) = ids.iter().find(|id| !scores.iter().any(|s| s.doc_id == **id)) {
                return Err(RunError { stage, document: Some(missing.to_string()), message: "profile has no citation record".into() });
            }
            scores.retain(|s| ids.contains(s.doc_id.as_str()));
        }
        let grouped = stratify(scores);
        self.write(stage, SCORES_FILE, &scores_csv(&self.meta, &grouped))
    }

    fn load_profiles_and_scores(
        &self,
        stage: Stage,
    ) -> Result<(Vec<crate::metrics::ComplexityProfile>, Vec<crate::impact::NormalizedScore>), RunError> {
        let profiles = read_profiles_csv(&self.read(stage, PROFILES_FILE)?).map_err(|e| RunError::new(stage, e))?;
        let scores = read_scores_csv(&self.read(stage, SCORES_FILE)?).map_err(|e| RunError::new(stage, e))?;
        Ok((profiles, scores))
    }

    fn compare(&mut self) -> Result<(), RunError> {
        let stage = Stage::Compare;
        let (profiles, scores) = self.load_profiles_and_scores(stage)?;
        let c = compare_groups(&profiles, &scores, self.config.iterations, self.config.level, self.config.seed)
            .map_err(|e| RunError::new(stage, e))?;
        self.write(stage, COMPARISON_FILE, &comparison_csv(&self.meta, &c.ks))?;
        self.write(stage, CDF_FILE, &cdf_csv(&self.meta, &c.cdf))?;
        self.write(stage, ESTIMATES_FILE, &estimates_csv(&self.meta, &c.estimates))
    }

    fn regress(&mut self) -> Result<(), RunError> {
        let stage = Stage::Regress;
        let (profiles, scores) = self.load_profiles_and_scores(stage)?;
        let rows = regression_grid(&profiles, &scores).map_err(|e| RunError::new(stage, e))?;
        self.write(stage, REGRESSION_FILE, &regression_csv(&self.meta, &rows))
    }
}

fn read_file(stage: Stage, path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|e| RunError::new(stage, format!("reading {}: {e}", path.display())))
}

/// Reads every regular file in `dir` (sorted by name) as tagged-column
/// input, using the file stem as the default document id.
fn import_dir(stage: Stage, dir: &Path) -> Result<Vec<TaggedDocument>, RunError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| RunError::new(stage, format!("reading {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut docs = Vec::new();
    for file in files {
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = read_file(stage, &file)?;
        let imported = import_tagged_many(&text, &stem).map_err(|e| RunError {
            stage,
            document: Some(stem.clone()),
            message: format!("{}: {e}", file.display()),
        })?;
        docs.extend(imported);
    }
    Ok(docs)
}

fn check_config(config: &RunConfig) -> Result<(), RunError> {
    let first = config.stages.first().copied().unwrap_or(Stage::Ingest);
    if config.stages.contains(&Stage::Ingest) && config.input.is_none() {
        return Err(RunError::new(Stage::Ingest, "no input directory given"));
    }
    if config.stages.contains(&Stage::Normalize) {
        match &config.citations {
            None => return Err(RunError::new(Stage::Normalize, "no citations file given")),
            Some(p) if !p.is_file() => {
                return Err(RunError::new(Stage::Normalize, format!("citations file {} not found", p.display())))
            }
            Some(_) => {}
        }
    }
    if config.iterations == 0 {
        return Err(RunError::new(first, "iterations must be at least 1"));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(RunError::new(first, format!("level {} not in (0, 1)", config.level)));
    }
    Ok(())
}

/// Runs the configured stages in pipeline order. On failure `error.json` is
/// written to the output directory (when it can be created) and the error is
/// returned.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let result = run_inner(config);
    if let Err(e) = &result {
        if fs::create_dir_all(&config.out).is_ok() {
            let _ = fs::write(config.out.join(ERROR_FILE), e.to_json());
        }
    }
    result
}

fn run_inner(config: &RunConfig) -> Result<RunSummary, RunError> {
    let mut stages = config.stages.clone();
    stages.sort();
    stages.dedup();
    let config = &RunConfig { stages, ..config.clone() };
    check_config(config)?;
    let first = config.stages.first().copied().unwrap_or(Stage::Ingest);
    fs::create_dir_all(&config.out)
        .map_err(|e| RunError::new(first, format!("creating {}: {e}", config.out.display())))?;
    let stale = config.out.join(ERROR_FILE);
    if stale.exists() {
        let _ = fs::remove_file(stale);
    }

    let mut runner = Runner { config, meta: config.metadata(), summary: RunSummary::default() };
    for &stage in &config.stages {
        log::info!("running {stage} stage");
        match stage {
            Stage::Ingest => runner.ingest()?,
            Stage::Tag => runner.tag()?,
            Stage::Profile => runner.profile()?,
            Stage::Normalize => runner.normalize()?,
            Stage::Group => runner.group()?,
            Stage::Compare => runner.compare()?,
            Stage::Regress => runner.regress()?,
        }
        runner.summary.stages.push(stage);
    }
    Ok(runner.summary)
}
