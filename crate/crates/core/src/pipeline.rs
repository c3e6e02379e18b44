//! Configuration, the four pipeline commands and the run manifest.
//!
//! Every command reads its inputs from the configured sources or from the
//! output directory written by the previous command, so `run` is exactly
//! `freq`, `matrix`, `factors` and `map` in sequence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{
    apply_stopwords, discover_numbered_files, load_file_corpus, load_line_corpus, Corpus,
    LoadedCorpus, Stoplist, TokenizerRules,
};
use crate::error::{Error, Result};
use crate::export;
use crate::factors::{
    assign_frames, fit_factor_model, loading_table, reliability_report, FactorCount,
    FactorOptions, VarimaxOptions, DEFAULT_ALPHA_FLOOR, DEFAULT_SUPPRESS,
};
use crate::graph::{
    build_network, k_core, layout_fruchterman_reingold, layout_kamada_kawai, style,
    threshold_edges, ColorBy, KamadaKawaiOptions, KkDistances, StyleOptions, DEFAULT_THRESHOLD,
};
use crate::lexicon::{
    frequency_list, select_words, word_set_from_list, word_stats, FrequencyList, SelectionPolicy,
    DEFAULT_MAX_WORDS, DEFAULT_MIN_COUNT,
};
use crate::matrix::{
    build_matrix, cosine_matrix, pearson_matrix, variance_filter, Denominator, WordDocMatrix,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const DEFAULT_FR_ITERATIONS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    /// one message per line
    Lines(PathBuf),
    /// directory of `text<N>.txt` files
    Files(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayoutKind {
    KamadaKawai,
    FruchtermanReingold,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub input: Option<InputSource>,
    pub stopwords: Option<PathBuf>,
    pub keep_plurals: bool,
    pub min_token_length: usize,
    pub allow_digits: bool,
    pub words_file: Option<PathBuf>,
    pub max_words: usize,
    pub min_count: u64,
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub tfidf_log_base: f64,
    pub binary: bool,
    pub n_factors: FactorCount,
    pub suppress: f64,
    pub kaiser_normalize: bool,
    pub alpha_floor: f64,
    pub min_loading: Option<f64>,
    pub threshold: f64,
    pub layout: LayoutKind,
    pub kk_distances: KkDistances,
    pub seed: u64,
    pub layout_iterations: Option<usize>,
    pub vertex_size_min: f64,
    pub vertex_size_max: f64,
    pub out_dir: PathBuf,
    /// directory of the config file; recorded paths are shown relative to it
    pub base_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            stopwords: None,
            keep_plurals: false,
            min_token_length: 1,
            allow_digits: false,
            words_file: None,
            max_words: DEFAULT_MAX_WORDS,
            min_count: DEFAULT_MIN_COUNT,
            include: Vec::new(),
            exclude: Vec::new(),
            tfidf_log_base: std::f64::consts::E,
            binary: false,
            n_factors: FactorCount::Kaiser,
            suppress: DEFAULT_SUPPRESS,
            kaiser_normalize: true,
            alpha_floor: DEFAULT_ALPHA_FLOOR,
            min_loading: None,
            threshold: DEFAULT_THRESHOLD,
            layout: LayoutKind::KamadaKawai,
            kk_distances: KkDistances::Hops,
            seed: 1,
            layout_iterations: None,
            vertex_size_min: StyleOptions::default().size_min,
            vertex_size_max: StyleOptions::default().size_max,
            out_dir: PathBuf::from("out"),
            base_dir: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidOption(msg.into())
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {v}")))
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        unit_interval("threshold", self.threshold)?;
        unit_interval("suppress", self.suppress)?;
        unit_interval("alpha floor", self.alpha_floor)?;
        if let Some(t) = self.min_loading {
            unit_interval("min loading", t)?;
        }
        if self.max_words < 1 {
            return Err(invalid("max words must be at least 1"));
        }
        if self.min_token_length < 1 {
            return Err(invalid("min token length must be at least 1"));
        }
        if let FactorCount::Manual(0) = self.n_factors {
            return Err(invalid("n factors must be at least 1"));
        }
        if self.tfidf_log_base.is_nan() || self.tfidf_log_base <= 1.0 {
            return Err(invalid("tf-idf log base must exceed 1"));
        }
        if !(self.vertex_size_min > 0.0 && self.vertex_size_min <= self.vertex_size_max)
            || !self.vertex_size_max.is_finite()
        {
            return Err(invalid(format!(
                "vertex sizes need 0 < min <= max, got {} and {}",
                self.vertex_size_min, self.vertex_size_max
            )));
        }
        Ok(())
    }

    pub fn tokenizer(&self) -> TokenizerRules {
        TokenizerRules {
            min_length: self.min_token_length,
            allow_digits: self.allow_digits,
            strip_plurals: !self.keep_plurals,
            ..TokenizerRules::default()
        }
    }

    pub fn selection_policy(&self) -> SelectionPolicy {
        SelectionPolicy {
            max_words: self.max_words,
            min_count: self.min_count,
            include: self.include.clone(),
            exclude: self.exclude.clone(),
        }
    }

    pub fn factor_options(&self) -> FactorOptions {
        FactorOptions {
            n_factors: self.n_factors,
            varimax: VarimaxOptions {
                kaiser_normalize: self.kaiser_normalize,
                ..VarimaxOptions::default()
            },
        }
    }

    /// Parses config text over the defaults. Relative paths resolve against
    /// `base_dir`.
    pub fn parse(text: &str, path: &Path, base_dir: &Path) -> Result<Self> {
        let mut config = Self {
            base_dir: Some(base_dir.to_path_buf()),
            ..Self::default()
        };
        config.apply_text(text, path, base_dir)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, path, base)
    }

    fn apply_text(&mut self, text: &str, path: &Path, base_dir: &Path) -> Result<()> {
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Config {
                path: path.to_path_buf(),
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                if !SECTIONS.contains(&section.as_str()) {
                    return Err(err(format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            self.set(&section, &key, value, base_dir).map_err(|e| match e {
                Error::InvalidOption(m) => err(m),
                other => other,
            })?;
        }
        Ok(())
    }

    fn set(&mut self, section: &str, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || base.join(value);
        match (section, key) {
            ("corpus", "input") => self.input = Some(InputSource::Lines(path())),
            ("corpus", "corpus_dir") => self.input = Some(InputSource::Files(path())),
            ("corpus", "stopwords") => self.stopwords = Some(path()),
            ("corpus", "keep_plurals") => self.keep_plurals = parse_value(key, value)?,
            ("corpus", "min_token_length") => self.min_token_length = parse_value(key, value)?,
            ("corpus", "allow_digits") => self.allow_digits = parse_value(key, value)?,
            ("lexicon", "words") => self.words_file = Some(path()),
            ("lexicon", "max_words") => self.max_words = parse_value(key, value)?,
            ("lexicon", "min_count") => self.min_count = parse_value(key, value)?,
            ("lexicon", "include") => self.include = parse_list(value),
            ("lexicon", "exclude") => self.exclude = parse_list(value),
            ("lexicon", "tfidf_log_base") => self.tfidf_log_base = parse_value(key, value)?,
            ("matrix", "binary") => self.binary = parse_value(key, value)?,
            ("factors", "n_factors") => self.n_factors = parse_factor_count(value)?,
            ("factors", "suppress") => self.suppress = parse_value(key, value)?,
            ("factors", "kaiser_normalize") => self.kaiser_normalize = parse_value(key, value)?,
            ("factors", "alpha_floor") => self.alpha_floor = parse_value(key, value)?,
            ("factors", "min_loading") => {
                self.min_loading = match value {
                    "none" | "" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            ("map", "threshold") => self.threshold = parse_value(key, value)?,
            ("map", "layout") => self.layout = parse_layout(value)?,
            ("map", "kk_distances") => self.kk_distances = parse_kk_distances(value)?,
            ("map", "seed") => self.seed = parse_value(key, value)?,
            ("map", "layout_iterations") => self.layout_iterations = Some(parse_value(key, value)?),
            ("map", "vertex_size_min") => self.vertex_size_min = parse_value(key, value)?,
            ("map", "vertex_size_max") => self.vertex_size_max = parse_value(key, value)?,
            ("output", "out") => self.out_dir = path(),
            ("", _) => return Err(invalid(format!("key {key:?} outside a section"))),
            _ => return Err(invalid(format!("unknown key {key:?} in [{section}]"))),
        }
        Ok(())
    }

    /// `p` relative to the config directory when it lies inside it.
    pub fn display_path(&self, p: &Path) -> String {
        let shown = self
            .base_dir
            .as_deref()
            .filter(|b| !b.as_os_str().is_empty())
            .and_then(|b| p.strip_prefix(b).ok())
            .unwrap_or(p);
        let shown: PathBuf = shown
            .components()
            .filter(|c| !matches!(c, std::path::Component::CurDir))
            .collect();
        let s = slash_path(&shown);
        if s.is_empty() {
            ".".into()
        } else {
            s
        }
    }

    /// Flat `section.key -> value` view of every option except the output
    /// directory, as recorded in the manifest.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        let show = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| self.display_path(p));
        match &self.input {
            Some(InputSource::Lines(p)) => put("corpus.input", self.display_path(p)),
            Some(InputSource::Files(p)) => put("corpus.corpus_dir", self.display_path(p)),
            None => {}
        }
        put("corpus.stopwords", show(&self.stopwords));
        put("corpus.keep_plurals", self.keep_plurals.to_string());
        put("corpus.min_token_length", self.min_token_length.to_string());
        put("corpus.allow_digits", self.allow_digits.to_string());
        put("lexicon.words", show(&self.words_file));
        put("lexicon.max_words", self.max_words.to_string());
        put("lexicon.min_count", self.min_count.to_string());
        put("lexicon.include", self.include.join(", "));
        put("lexicon.exclude", self.exclude.join(", "));
        put("lexicon.tfidf_log_base", self.tfidf_log_base.to_string());
        put("matrix.binary", self.binary.to_string());
        put(
            "factors.n_factors",
            match self.n_factors {
                FactorCount::Kaiser => "auto".into(),
                FactorCount::Manual(k) => k.to_string(),
            },
        );
        put("factors.suppress", self.suppress.to_string());
        put("factors.kaiser_normalize", self.kaiser_normalize.to_string());
        put("factors.alpha_floor", self.alpha_floor.to_string());
        put(
            "factors.min_loading",
            self.min_loading.map_or("none".into(), |v| v.to_string()),
        );
        put("map.threshold", self.threshold.to_string());
        put(
            "map.layout",
            match self.layout {
                LayoutKind::KamadaKawai => "kk",
                LayoutKind::FruchtermanReingold => "fr",
            }
            .into(),
        );
        put(
            "map.kk_distances",
            match self.kk_distances {
                KkDistances::Hops => "hops",
                KkDistances::Dissimilarity => "dissim",
            }
            .into(),
        );
        put("map.seed", self.seed.to_string());
        put(
            "map.layout_iterations",
            self.layout_iterations.map_or("default".into(), |v| v.to_string()),
        );
        put("map.vertex_size_min", self.vertex_size_min.to_string());
        put("map.vertex_size_max", self.vertex_size_max.to_string());
        m
    }
}

const SECTIONS: [&str; 6] = ["corpus", "lexicon", "matrix", "factors", "map", "output"];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| invalid(format!("bad value {value:?} for {key}")))
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_factor_count(value: &str) -> Result<FactorCount> {
    match value.trim() {
        "auto" | "kaiser" => Ok(FactorCount::Kaiser),
        v => match v.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(FactorCount::Manual(k)),
            _ => Err(invalid(format!("n factors must be \"auto\" or a positive integer, got {v:?}"))),
        },
    }
}

pub fn parse_layout(value: &str) -> Result<LayoutKind> {
    match value.trim() {
        "kk" => Ok(LayoutKind::KamadaKawai),
        "fr" => Ok(LayoutKind::FruchtermanReingold),
        v => Err(invalid(format!("layout must be kk or fr, got {v:?}"))),
    }
}

pub fn parse_kk_distances(value: &str) -> Result<KkDistances> {
    match value.trim() {
        "hops" => Ok(KkDistances::Hops),
        "dissim" => Ok(KkDistances::Dissimilarity),
        v => Err(invalid(format!("kk distances must be hops or dissim, got {v:?}"))),
    }
}

fn slash_path(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub name: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub warnings: Vec<String>,
    pub notices: Vec<String>,
}

impl StageReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    fn read_input(&mut self, path: &Path, label: String) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.push(FileDigest {
            file: label,
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    fn write(&mut self, out_dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(FileDigest {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }
}

/// An error tagged with the pipeline step it came from.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
    /// what the failed command had already written
    pub partial: Option<Box<StageReport>>,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

type StageResult<T> = std::result::Result<T, StageError>;

trait Tag<T> {
    fn at(self, stage: &'static str) -> StageResult<T>;
}

impl<T> Tag<T> for Result<T> {
    fn at(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|error| StageError {
            stage,
            error,
            partial: None,
        })
    }
}

fn ensure_out_dir(config: &PipelineConfig) -> Result<()> {
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))
}

fn load_corpus(config: &PipelineConfig, report: &mut StageReport) -> Result<Corpus> {
    let rules = config.tokenizer();
    let loaded: LoadedCorpus = match &config.input {
        None => return Err(invalid("no input: set --input or --corpus-dir")),
        Some(InputSource::Lines(path)) => {
            report.read_input(path, config.display_path(path))?;
            load_line_corpus(path, &rules)?
        }
        Some(InputSource::Files(dir)) => {
            let files = discover_numbered_files(dir, "text")?;
            for f in &files {
                report.read_input(f, config.display_path(f))?;
            }
            load_file_corpus(&files, &rules)?
        }
    };
    report.warnings.extend(loaded.warnings);
    if loaded.blank_lines > 0 {
        report
            .notices
            .push(format!("{} blank lines skipped", loaded.blank_lines));
    }
    let corpus = match &config.stopwords {
        Some(path) => {
            let bytes = report.read_input(path, config.display_path(path))?;
            let mut warnings = Vec::new();
            let text = crate::corpus::decode_text(&bytes, path, &mut warnings);
            report.warnings.extend(warnings);
            let stoplist = Stoplist::parse(&text, path, &rules)?;
            apply_stopwords(&loaded.corpus, &stoplist, rules.min_plural_length)
        }
        None => loaded.corpus,
    };
    Ok(corpus)
}

fn corpus_and_frequencies(
    config: &PipelineConfig,
    report: &mut StageReport,
) -> StageResult<(Corpus, FrequencyList)> {
    let corpus = load_corpus(config, report).at("corpus")?;
    let freq = frequency_list(&corpus);
    if freq.is_empty() {
        return Err(Error::EmptySelection).at("lexicon");
    }
    Ok((corpus, freq))
}

fn staged(
    name: &str,
    config: &PipelineConfig,
    body: fn(&PipelineConfig, &mut StageReport) -> StageResult<()>,
) -> StageResult<StageReport> {
    let mut report = StageReport::new(name);
    match body(config, &mut report) {
        Ok(()) => Ok(report),
        Err(mut e) => {
            e.partial = Some(Box::new(report));
            Err(e)
        }
    }
}

/// Frequency list of the whole vocabulary: `wrdfrq.csv`.
pub fn cmd_freq(config: &PipelineConfig) -> StageResult<StageReport> {
    staged("freq", config, freq_stage)
}

fn freq_stage(config: &PipelineConfig, report: &mut StageReport) -> StageResult<()> {
    ensure_out_dir(config).at("freq")?;
    let (corpus, freq) = corpus_and_frequencies(config, report)?;
    let stats = word_stats(&corpus, &freq, config.tfidf_log_base).at("lexicon")?;
    report
        .write(&config.out_dir, "wrdfrq.csv", &export::wordstats_csv(&stats))
        .at("export")?;
    Ok(())
}

/// Word/document matrix and cosine exports: `matrix.csv`, `cosine.csv`,
/// `cosine.dat`, `cosine.net`, `labels.csv`.
pub fn cmd_matrix(config: &PipelineConfig) -> StageResult<StageReport> {
    staged("matrix", config, matrix_stage)
}

fn matrix_stage(config: &PipelineConfig, report: &mut StageReport) -> StageResult<()> {
    ensure_out_dir(config).at("matrix")?;
    let (corpus, freq) = corpus_and_frequencies(config, report)?;
    let selection = match &config.words_file {
        Some(path) => {
            let bytes = report.read_input(path, config.display_path(path)).at("lexicon")?;
            let mut warnings = Vec::new();
            let text = crate::corpus::decode_text(&bytes, path, &mut warnings);
            report.warnings.extend(warnings);
            word_set_from_list(&text, &config.tokenizer(), &freq, config.max_words).at("lexicon")?
        }
        None => select_words(&freq, &config.selection_policy()).at("lexicon")?,
    };
    report.warnings.extend(selection.warnings);
    let mut m = build_matrix(&corpus, &selection.words);
    if config.binary {
        m = m.to_binary();
    }
    let cosine = cosine_matrix(&m);
    for &j in cosine.degenerate() {
        report
            .warnings
            .push(format!("word {:?} never occurs; cosine row left at zero", m.words()[j]));
    }
    let network = build_network(&cosine, &frequencies_of(&m), None);
    let labels: Vec<(String, String)> = m
        .words()
        .iter()
        .map(|w| (w.clone(), corpus.display_label(w).to_string()))
        .collect();
    let out = &config.out_dir;
    (|| -> Result<()> {
        report.write(out, "matrix.csv", &export::matrix_csv(&m))?;
        report.write(out, "cosine.csv", &export::similarity_csv(&cosine))?;
        report.write(out, "cosine.dat", &export::write_pajek_matrix(&cosine))?;
        report.write(out, "cosine.net", &export::write_pajek_net(&network))?;
        report.write(out, "labels.csv", &export::labels_csv(&labels))
    })()
    .at("export")?;
    Ok(())
}

fn frequencies_of(m: &WordDocMatrix) -> BTreeMap<String, u64> {
    m.words().iter().cloned().zip(m.column_totals()).collect()
}

fn read_matrix(config: &PipelineConfig, report: &mut StageReport) -> Result<WordDocMatrix> {
    let path = config.out_dir.join("matrix.csv");
    let bytes = report.read_input(&path, "matrix.csv".into())?;
    export::read_matrix_csv(&bytes)
}

/// Variance filter, factor analysis, frames and reliability.
pub fn cmd_factors(config: &PipelineConfig) -> StageResult<StageReport> {
    staged("factors", config, factors_stage)
}

fn factors_stage(config: &PipelineConfig, report: &mut StageReport) -> StageResult<()> {
    ensure_out_dir(config).at("factors")?;
    let m = read_matrix(config, report).at("factors")?;
    let filtered = variance_filter(&m, Denominator::Sample).at("factors")?;
    for w in &filtered.removed {
        report
            .notices
            .push(format!("word {w:?} has zero variance; excluded from factoring"));
    }
    let pearson = pearson_matrix(&filtered.matrix).at("factors")?;
    let model = fit_factor_model(&pearson, &config.factor_options()).at("factors")?;
    report.warnings.extend(model.warnings.iter().cloned());
    let assignment = assign_frames(&model.loadings, &model.words, config.min_loading);
    let mut table = loading_table(
        &model.loadings,
        &model.words,
        &assignment,
        config.suppress,
        model.rotation_converged.then_some(model.rotation_iterations),
    );
    table.kaiser_normalized = model.kaiser_normalized;
    let reliability =
        reliability_report(&filtered.matrix, &assignment, config.alpha_floor).at("factors")?;
    for f in &reliability.frames {
        if !f.passes {
            report.notices.push(format!(
                "frame {} has alpha {} below the floor {}",
                f.frame,
                f.alpha.map_or("undefined".into(), |a| format!("{a:.4}")),
                config.alpha_floor
            ));
        }
    }
    let out = &config.out_dir;
    (|| -> Result<()> {
        report.write(out, "variance.csv", &export::variance_csv(&m, &filtered))?;
        report.write(out, "eigenvalues.csv", &export::eigenvalues_csv(&model))?;
        report.write(out, "loadings.csv", &export::loadings_csv(&model, &assignment))?;
        report.write(out, "loadings_display.csv", &export::loadings_display_csv(&table))?;
        report.write(out, "loadings.txt", table.render_text().as_bytes())?;
        report.write(out, "frames.csv", &export::frames_csv(&assignment))?;
        report.write(out, "reliability.csv", &export::reliability_csv(&reliability))
    })()
    .at("export")?;
    Ok(())
}

/// Thresholded cosine map: `map.net`, `map.clu`, `core.clu`, `map.vec`,
/// `map.svg`. Colors follow frames when `frames.csv` exists, cores otherwise.
pub fn cmd_map(config: &PipelineConfig) -> StageResult<StageReport> {
    staged("map", config, map_stage)
}

fn map_stage(config: &PipelineConfig, report: &mut StageReport) -> StageResult<()> {
    ensure_out_dir(config).at("map")?;
    let m = read_matrix(config, report).at("graph")?;
    let frames_path = config.out_dir.join("frames.csv");
    let frames = if frames_path.exists() {
        let bytes = report
            .read_input(&frames_path, "frames.csv".into())
            .at("graph")?;
        Some(export::read_frames_csv(&bytes).at("graph")?)
    } else {
        report
            .notices
            .push("no frames.csv; vertices classed by core number".into());
        None
    };
    let cosine = cosine_matrix(&m);
    let full = build_network(&cosine, &frequencies_of(&m), frames.as_ref());
    let mut network = threshold_edges(&full, config.threshold);
    let cores = k_core(&network);
    for (v, &c) in network.vertices_mut().iter_mut().zip(&cores) {
        v.core = Some(c);
    }
    let layout = match config.layout {
        LayoutKind::KamadaKawai => {
            let defaults = KamadaKawaiOptions::default();
            layout_kamada_kawai(
                &network,
                &KamadaKawaiOptions {
                    seed: config.seed,
                    max_iterations: config.layout_iterations.unwrap_or(defaults.max_iterations),
                    distances: config.kk_distances,
                    ..defaults
                },
            )
        }
        LayoutKind::FruchtermanReingold => layout_fruchterman_reingold(
            &network,
            config.seed,
            config.layout_iterations.unwrap_or(DEFAULT_FR_ITERATIONS),
        ),
    }
    .at("graph")?;
    let color_by = if frames.is_some() {
        ColorBy::Frame
    } else {
        ColorBy::Core
    };
    let styled = style(
        &network,
        &layout,
        &StyleOptions {
            size_min: config.vertex_size_min,
            size_max: config.vertex_size_max,
        },
        color_by,
    );
    let n = styled.n_vertices();
    let classes: Vec<usize> = styled.vertices().iter().map(|v| v.color.unwrap_or(0)).collect();
    let freqs: Vec<f64> = styled.vertices().iter().map(|v| v.frequency as f64).collect();
    let out = &config.out_dir;
    (|| -> Result<()> {
        report.write(out, "map.net", &export::write_pajek_net(&styled))?;
        report.write(out, "map.clu", &export::write_partition_clu(&classes, n)?)?;
        report.write(out, "core.clu", &export::write_partition_clu(&cores, n)?)?;
        report.write(out, "map.vec", &export::write_vector_vec(&freqs, n)?)?;
        report.write(out, "map.svg", &export::write_svg(&styled, &layout))
    })()
    .at("export")?;
    report.notices.push(format!(
        "layout stress {:.6} (initial {:.6}) after {} iterations",
        layout.stress, layout.initial_stress, layout.iterations
    ));
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Freq,
    Matrix,
    Factors,
    Map,
    Run,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Freq => "freq",
            Command::Matrix => "matrix",
            Command::Factors => "factors",
            Command::Map => "map",
            Command::Run => "run",
        }
    }

    fn stages(self) -> &'static [Command] {
        match self {
            Command::Freq => &[Command::Freq],
            Command::Matrix => &[Command::Matrix],
            Command::Factors => &[Command::Factors],
            Command::Map => &[Command::Map],
            Command::Run => &[Command::Freq, Command::Matrix, Command::Factors, Command::Map],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub command: String,
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub stages: Vec<StageReport>,
    pub failure: Option<Failure>,
}

impl RunManifest {
    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, |f| f.exit_code)
    }
}

fn run_stage(stage: Command, config: &PipelineConfig) -> StageResult<StageReport> {
    match stage {
        Command::Freq => cmd_freq(config),
        Command::Matrix => cmd_matrix(config),
        Command::Factors => cmd_factors(config),
        Command::Map => cmd_map(config),
        Command::Run => unreachable!("run is a sequence of stages"),
    }
}

/// Runs `command`, stopping at the first failure, and writes the manifest
/// into the output directory. Outputs of completed stages are kept.
pub fn execute(command: Command, config: &PipelineConfig) -> RunManifest {
    let mut manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        config: config.snapshot(),
        stages: Vec::new(),
        failure: None,
    };
    if let Err(error) = config.validate() {
        manifest.failure = Some(Failure {
            command: command.name().into(),
            stage: "config".into(),
            message: error.to_string(),
            exit_code: error.exit_code(),
        });
        return manifest;
    }
    for &stage in command.stages() {
        match run_stage(stage, config) {
            Ok(report) => manifest.stages.push(report),
            Err(e) => {
                if let Some(partial) = e.partial {
                    manifest.stages.push(*partial);
                }
                manifest.failure = Some(Failure {
                    command: stage.name().into(),
                    stage: e.stage.into(),
                    message: e.error.to_string(),
                    exit_code: e.error.exit_code(),
                });
                break;
            }
        }
    }
    if config.out_dir.is_dir() {
        let path = config.out_dir.join(MANIFEST_FILE);
        if let Err(e) = fs::write(&path, manifest.to_json()) {
            let e = Error::io(&path, e);
            manifest.failure.get_or_insert(Failure {
                command: command.name().into(),
                stage: "manifest".into(),
                message: e.to_string(),
                exit_code: e.exit_code(),
            });
        }
    }
    manifest
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.max_words, 75);
        assert_eq!(c.suppress, 0.10);
        assert_eq!(c.alpha_floor, 0.65);
        assert_eq!(c.threshold, 0.2);
    }

    #[test]
    fn parse_config_text() {
        let text = "# sample\n[corpus]\ncorpus_dir = docs\nstopwords = stop.txt\n\n[factors]\nn_factors = 6\nsuppress = 0.2\n[map]\nlayout = fr\nseed = 7\n";
        let c = PipelineConfig::parse(text, Path::new("f.ini"), Path::new("/base")).unwrap();
        assert_eq!(c.input, Some(InputSource::Files(PathBuf::from("/base/docs"))));
        assert_eq!(c.stopwords, Some(PathBuf::from("/base/stop.txt")));
        assert_eq!(c.n_factors, FactorCount::Manual(6));
        assert_eq!(c.suppress, 0.2);
        assert_eq!(c.layout, LayoutKind::FruchtermanReingold);
        assert_eq!(c.seed, 7);
        assert_eq!(c.max_words, 75);
    }

    #[test]
    fn config_errors_carry_lines() {
        let bad = |text: &str, want: usize| {
            match PipelineConfig::parse(text, Path::new("c"), Path::new("")) {
                Err(Error::Config { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        };
        bad("[corpus]\nnope = 1\n", 2);
        bad("[weird]\n", 1);
        bad("max_words = 3\n", 1);
        bad("[lexicon]\nmax_words = lots\n", 2);
        bad("[factors]\n\nn_factors = 0\n", 3);
        bad("[map]\njust text\n", 2);
    }

    #[test]
    fn validation_ranges() {
        let check = |f: fn(&mut PipelineConfig)| {
            let mut c = PipelineConfig::default();
            f(&mut c);
            assert!(matches!(c.validate(), Err(Error::InvalidOption(_))));
        };
        check(|c| c.threshold = 1.5);
        check(|c| c.suppress = -0.1);
        check(|c| c.max_words = 0);
        check(|c| c.vertex_size_min = 20.0);
        check(|c| c.alpha_floor = 2.0);
    }

    #[test]
    fn snapshot_omits_output_dir() {
        let mut a = PipelineConfig::default();
        let mut b = PipelineConfig::default();
        a.out_dir = "x".into();
        b.out_dir = "y".into();
        assert_eq!(a.snapshot(), b.snapshot());
        assert_eq!(a.snapshot()["factors.n_factors"], "auto");
    }
}
