//! Word frequency lists, vocabulary selection, and per-word discriminatory
//! statistics (tf-idf and chi-square contribution).

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::corpus::{Corpus, TokenizerRules};
use crate::error::{Error, Result};
use crate::matrix::{build_matrix, WordDocMatrix};

/// Default vocabulary cap; larger maps become hard to read.
pub const DEFAULT_MAX_WORDS: usize = 75;
pub const DEFAULT_MIN_COUNT: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyEntry {
    pub word: String,
    pub count: u64,
}

/// Corpus-wide word counts, sorted by count descending then alphabetically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyList {
    entries: Vec<FrequencyEntry>,
}

impl FrequencyList {
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut entries: Vec<FrequencyEntry> = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(w, count)| FrequencyEntry {
                word: w.into(),
                count,
            })
            .collect();
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.word.cmp(&b.word)));
        Self { entries }
    }

    pub fn entries(&self) -> &[FrequencyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.word == word).map(|e| e.count)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.word.as_str())
    }
}

pub fn frequency_list(corpus: &Corpus) -> FrequencyList {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in corpus.documents() {
        for t in &doc.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    FrequencyList::from_counts(counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionPolicy {
    pub max_words: usize,
    pub min_count: u64,
    /// Kept regardless of `min_count`, ahead of frequency-ranked words.
    pub include: Vec<String>,
    pub exclude: Vec<String>,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            max_words: DEFAULT_MAX_WORDS,
            min_count: DEFAULT_MIN_COUNT,
            include: Vec::new(),
            exclude: Vec::new(),
        }
    }
}

/// Selected analysis vocabulary. Word order is the matrix column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSet {
    words: Vec<String>,
}

impl WordSet {
    pub fn new(words: Vec<String>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut seen = HashSet::new();
        for w in &words {
            if !seen.insert(w.as_str()) {
                return Err(Error::InvalidOption(format!("duplicate word {w:?} in word set")));
            }
        }
        Ok(Self { words })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Selection {
    pub words: WordSet,
    pub warnings: Vec<String>,
}

/// Applies the selection policy: frequent-enough words minus excludes, plus
/// includes, capped at `max_words`, in frequency order.
pub fn select_words(freq: &FrequencyList, policy: &SelectionPolicy) -> Result<Selection> {
    let mut warnings = Vec::new();
    let exclude: BTreeSet<&str> = policy.exclude.iter().map(String::as_str).collect();
    let mut include: BTreeSet<&str> = BTreeSet::new();
    for w in &policy.include {
        if freq.count(w).is_some() {
            include.insert(w.as_str());
        } else {
            warnings.push(format!("included word {w:?} does not occur in the corpus"));
        }
    }

    let cap = policy.max_words;
    let mut chosen: BTreeSet<&str> = include.iter().copied().take(cap).collect();
    if include.len() > cap {
        warnings.push(format!(
            "{} included words exceed the cap of {cap}",
            include.len()
        ));
    }
    for e in freq.entries() {
        if chosen.len() >= cap {
            break;
        }
        if e.count >= policy.min_count && !exclude.contains(e.word.as_str()) {
            chosen.insert(e.word.as_str());
        }
    }

    let words: Vec<String> = freq
        .words()
        .filter(|w| chosen.contains(w))
        .map(str::to_string)
        .collect();
    if words.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(Selection {
        words: WordSet::new(words)?,
        warnings,
    })
}

/// Reads a `words.txt` list (one word per line) as the word set. Entries are
/// normalized like corpus tokens; words absent from the corpus are dropped
/// with a warning.
pub fn word_set_from_list(
    text: &str,
    rules: &TokenizerRules,
    freq: &FrequencyList,
    cap: usize,
) -> Result<Selection> {
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    for line in text.lines() {
        let raw = line.trim();
        if raw.is_empty() {
            continue;
        }
        let word = rules.normalize(&raw.to_lowercase());
        if freq.count(&word).is_none() {
            warnings.push(format!("word {raw:?} does not occur in the corpus; dropped"));
            continue;
        }
        if !seen.insert(word.clone()) {
            warnings.push(format!("word {raw:?} listed twice; kept once"));
            continue;
        }
        words.push(word);
    }
    if words.len() > cap {
        warnings.push(format!(
            "word list has {} words; truncated to {cap}",
            words.len()
        ));
        words.truncate(cap);
    }
    if words.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(Selection {
        words: WordSet::new(words)?,
        warnings,
    })
}

/// Total count times inverse document frequency, `ln(N / df)` scaled to
/// `log_base`. Words with zero document frequency score 0.
pub fn tf_idf(matrix: &WordDocMatrix, log_base: f64) -> Vec<f64> {
    let n = matrix.n_documents() as f64;
    let ln_base = log_base.ln();
    matrix
        .column_totals()
        .into_iter()
        .zip(matrix.document_frequencies())
        .map(|(tf, df)| {
            if df == 0 {
                0.0
            } else {
                tf as f64 * (n / df as f64).ln() / ln_base
            }
        })
        .collect()
}

/// Per-word share of the table's chi-square statistic:
/// `sum_i (O_ij - E_ij)^2 / E_ij` with `E_ij = row_i * col_j / total`.
pub fn chi_square_contrib(matrix: &WordDocMatrix) -> Result<Vec<f64>> {
    let total = matrix.grand_total();
    if total == 0 {
        return Err(Error::ZeroGrandTotal);
    }
    let total = total as f64;
    let rows = matrix.row_totals();
    let cols = matrix.column_totals();
    Ok((0..matrix.n_words())
        .map(|j| {
            rows.iter()
                .enumerate()
                .map(|(i, &r)| {
                    let expected = r as f64 * cols[j] as f64 / total;
                    if expected == 0.0 {
                        0.0
                    } else {
                        let diff = matrix.get(i, j) as f64 - expected;
                        diff * diff / expected
                    }
                })
                .sum()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordStats {
    pub word: String,
    pub frequency: u64,
    pub doc_frequency: u64,
    pub tf_idf: f64,
    pub chi2: f64,
}

/// Statistics for every word in the frequency list, computed on the full
/// vocabulary word/document table.
pub fn word_stats(corpus: &Corpus, freq: &FrequencyList, log_base: f64) -> Result<Vec<WordStats>> {
    if freq.is_empty() {
        return Ok(Vec::new());
    }
    let all = WordSet::new(freq.words().map(str::to_string).collect())?;
    let m = build_matrix(corpus, &all);
    let tfidf = tf_idf(&m, log_base);
    let chi2 = chi_square_contrib(&m)?;
    let df = m.document_frequencies();
    Ok(freq
        .entries()
        .iter()
        .enumerate()
        .map(|(j, e)| WordStats {
            word: e.word.clone(),
            frequency: e.count,
            doc_frequency: df[j],
            tf_idf: tfidf[j],
            chi2: chi2[j],
        })
        .collect())
}
