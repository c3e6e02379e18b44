//! Message ingestion: line corpora (`text.txt`), numbered file corpora
//! (`text1.txt`, `text2.txt`, ...), tokenization, plural stripping and
//! stopword removal.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Tokenizer configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizerRules {
    /// Tokens shorter than this many characters are dropped.
    pub min_length: usize,
    /// Treat ASCII and Unicode digits as word characters.
    pub allow_digits: bool,
    /// Strip a trailing plural `s` while loading.
    pub strip_plurals: bool,
    /// Tokens must be strictly longer than this for plural stripping.
    pub min_plural_length: usize,
}

impl Default for TokenizerRules {
    fn default() -> Self {
        Self {
            min_length: 1,
            allow_digits: false,
            strip_plurals: true,
            min_plural_length: 3,
        }
    }
}

impl TokenizerRules {
    fn is_word_char(&self, c: char) -> bool {
        c.is_alphabetic() || (self.allow_digits && c.is_numeric())
    }

    /// Whether `token` could have been produced by [`tokenize`] under these rules.
    pub fn is_valid_token(&self, token: &str) -> bool {
        !token.is_empty()
            && token.chars().count() >= self.min_length
            && tokenize(token, self).as_slice() == [token]
    }

    /// Plural normalization as configured; identity when stripping is off.
    pub fn normalize(&self, token: &str) -> String {
        if self.strip_plurals {
            normalize_plural(token, self.min_plural_length)
        } else {
            token.to_string()
        }
    }
}

fn is_joiner(c: char) -> bool {
    c == '-' || c == '\''
}

/// Splits `raw` on every character outside the word alphabet and lowercases
/// the pieces. Hyphens and apostrophes survive only between two word
/// characters.
pub fn tokenize(raw: &str, rules: &TokenizerRules) -> Vec<String> {
    let chars: Vec<char> = raw.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_len = 0usize;

    let mut flush = |current: &mut String, len: &mut usize| {
        if *len >= rules.min_length.max(1) {
            tokens.push(std::mem::take(current));
        } else {
            current.clear();
        }
        *len = 0;
    };

    for (i, &c) in chars.iter().enumerate() {
        if rules.is_word_char(c) {
            current.extend(c.to_lowercase());
            current_len += 1;
        } else if is_joiner(c)
            && current_len > 0
            && chars.get(i + 1).is_some_and(|&n| rules.is_word_char(n))
        {
            current.push(c);
            current_len += 1;
        } else if current_len > 0 {
            flush(&mut current, &mut current_len);
        }
    }
    if current_len > 0 {
        flush(&mut current, &mut current_len);
    }
    tokens
}

/// Removes a trailing plural `s` from tokens longer than `min_plural_length`
/// characters, leaving `-ss` endings alone.
pub fn normalize_plural(token: &str, min_plural_length: usize) -> String {
    if token.chars().count() > min_plural_length && token.ends_with('s') && !token.ends_with("ss")
    {
        token[..token.len() - 1].to_string()
    } else {
        token.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    /// 1-based position in the corpus.
    pub id: usize,
    /// File name (file corpora) or `line N` (line corpora).
    pub source: String,
    pub tokens: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusMode {
    Lines,
    Files,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    mode: CorpusMode,
    /// normalized token -> surface form -> count
    surface: BTreeMap<String, BTreeMap<String, u64>>,
}

impl Corpus {
    /// Builds a corpus from already-tokenized documents; ids are reassigned
    /// 1..=n in the given order.
    pub fn from_documents(mode: CorpusMode, docs: Vec<(String, Vec<String>)>) -> Self {
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(i, (source, tokens))| Document {
                id: i + 1,
                source,
                tokens,
            })
            .collect();
        Self {
            documents,
            mode,
            surface: BTreeMap::new(),
        }
    }

    fn from_raw(
        mode: CorpusMode,
        raw: Vec<(String, String)>,
        rules: &TokenizerRules,
    ) -> Self {
        let mut surface: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let docs = raw
            .into_iter()
            .map(|(source, text)| {
                let tokens = tokenize(&text, rules)
                    .into_iter()
                    .map(|t| {
                        let norm = rules.normalize(&t);
                        *surface
                            .entry(norm.clone())
                            .or_default()
                            .entry(t)
                            .or_insert(0) += 1;
                        norm
                    })
                    .collect();
                (source, tokens)
            })
            .collect();
        let mut corpus = Self::from_documents(mode, docs);
        corpus.surface = surface;
        corpus
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn mode(&self) -> CorpusMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Most frequent original spelling of a normalized word (ties broken
    /// alphabetically). Falls back to the word itself.
    pub fn display_label<'a>(&'a self, word: &'a str) -> &'a str {
        self.surface
            .get(word)
            .and_then(|forms| {
                forms
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                    .map(|(form, _)| form.as_str())
            })
            .unwrap_or(word)
    }
}

/// A loaded corpus together with what the loader noticed along the way.
#[derive(Clone, Debug)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub blank_lines: usize,
    pub warnings: Vec<String>,
}

/// Decodes UTF-8, falling back to Latin-1 for legacy 8-bit text.
pub fn decode_text(bytes: &[u8], path: &Path, warnings: &mut Vec<String>) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.strip_prefix('\u{feff}').unwrap_or(s).to_string(),
        Err(e) => {
            warnings.push(format!(
                "{}: invalid UTF-8 at byte {}; decoded as 8-bit Latin-1",
                path.display(),
                e.valid_up_to()
            ));
            bytes.iter().map(|&b| b as char).collect()
        }
    }
}

fn read_text(path: &Path, warnings: &mut Vec<String>) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode_text(&bytes, path, warnings))
}

/// One document per non-blank line of `path`. CR/LF and LF both accepted.
pub fn load_line_corpus(path: &Path, rules: &TokenizerRules) -> Result<LoadedCorpus> {
    let mut warnings = Vec::new();
    let text = read_text(path, &mut warnings)?;
    let mut blank_lines = 0;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            blank_lines += 1;
        } else {
            raw.push((format!("line {}", i + 1), line.to_string()));
        }
    }
    if raw.is_empty() {
        return Err(Error::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }
    if blank_lines > 0 {
        warnings.push(format!(
            "{}: skipped {blank_lines} blank line(s)",
            path.display()
        ));
    }
    Ok(LoadedCorpus {
        corpus: Corpus::from_raw(CorpusMode::Lines, raw, rules),
        blank_lines,
        warnings,
    })
}

/// Trailing decimal number of the file stem: `text12.txt` -> 12.
pub fn numeric_suffix(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

/// Orders numbered corpus files by their numeric suffix.
pub fn order_numbered_files(paths: &[PathBuf]) -> Result<(Vec<PathBuf>, Vec<String>)> {
    let mut numbered: BTreeMap<u64, PathBuf> = BTreeMap::new();
    for path in paths {
        let number = numeric_suffix(path).ok_or_else(|| Error::UnnumberedCorpusFile {
            path: path.clone(),
        })?;
        if let Some(first) = numbered.get(&number) {
            return Err(Error::DuplicateSuffix {
                number,
                first: first.clone(),
                second: path.clone(),
            });
        }
        numbered.insert(number, path.clone());
    }

    let mut warnings = Vec::new();
    let mut expected = 1;
    for &n in numbered.keys() {
        for missing in expected..n {
            warnings.push(format!("corpus file number {missing} is missing"));
        }
        expected = n + 1;
    }
    Ok((numbered.into_values().collect(), warnings))
}

/// One document per file, ordered numerically by suffix (`text2` before
/// `text10`) regardless of the order given.
pub fn load_file_corpus(paths: &[PathBuf], rules: &TokenizerRules) -> Result<LoadedCorpus> {
    let (ordered, mut warnings) = order_numbered_files(paths)?;
    if ordered.is_empty() {
        return Err(Error::EmptyCorpus {
            path: PathBuf::from("<no files>"),
        });
    }
    let mut raw = Vec::with_capacity(ordered.len());
    for path in &ordered {
        let text = read_text(path, &mut warnings)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        raw.push((name, text));
    }
    Ok(LoadedCorpus {
        corpus: Corpus::from_raw(CorpusMode::Files, raw, rules),
        blank_lines: 0,
        warnings,
    })
}

/// Finds `<prefix><N>.txt` files in `dir` (the `text.txt` line corpus itself
/// is not part of the series).
pub fn discover_numbered_files(dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(rest) = name.strip_prefix(prefix) else {
            continue;
        };
        let Some(num) = rest.strip_suffix(".txt") else {
            continue;
        };
        if !num.is_empty() && num.chars().all(|c| c.is_ascii_digit()) {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stoplist {
    entries: BTreeSet<String>,
}

impl Stoplist {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            entries: entries.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses a stopword list: one word per line, `#` starts a comment.
    /// Every entry must be a single valid token.
    pub fn parse(text: &str, path: &Path, rules: &TokenizerRules) -> Result<Self> {
        let mut entries = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let entry = line.split('#').next().unwrap_or("").trim();
            if entry.is_empty() {
                continue;
            }
            let lowered = entry.to_lowercase();
            let lenient = TokenizerRules {
                min_length: 1,
                ..rules.clone()
            };
            if !lenient.is_valid_token(&lowered) {
                return Err(Error::InvalidStopword {
                    path: path.to_path_buf(),
                    line: i + 1,
                    entry: entry.to_string(),
                });
            }
            entries.insert(lowered);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path, rules: &TokenizerRules) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::InvalidStopword {
            path: path.to_path_buf(),
            line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
            entry: "<undecodable bytes>".into(),
        })?;
        Self::parse(text, path, rules)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

/// Removes stopwords, comparing plural-normalized forms on both sides.
/// Documents that end up empty are kept.
pub fn apply_stopwords(corpus: &Corpus, stoplist: &Stoplist, min_plural_length: usize) -> Corpus {
    if stoplist.is_empty() {
        return corpus.clone();
    }
    let stop: BTreeSet<String> = stoplist
        .iter()
        .map(|s| normalize_plural(s, min_plural_length))
        .collect();
    let documents = corpus
        .documents
        .iter()
        .map(|d| Document {
            id: d.id,
            source: d.source.clone(),
            tokens: d
                .tokens
                .iter()
                .filter(|t| !stop.contains(&normalize_plural(t, min_plural_length)))
                .cloned()
                .collect(),
        })
        .collect();
    let surface = corpus
        .surface
        .iter()
        .filter(|(w, _)| !stop.contains(&normalize_plural(w, min_plural_length)))
        .map(|(w, f)| (w.clone(), f.clone()))
        .collect();
    Corpus {
        documents,
        mode: corpus.mode,
        surface,
    }
}
