//! The asymmetric word/document occurrence matrix (documents as cases in
//! the rows, words as variables in the columns) and the two similarity
//! matrices derived from it: cosine for drawing, Pearson for factoring.

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lexicon::WordSet;
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordDocMatrix {
    documents: Vec<String>,
    words: Vec<String>,
    /// row-major, documents x words
    cells: Vec<u64>,
}

impl WordDocMatrix {
    pub fn new(documents: Vec<String>, words: Vec<String>, cells: Vec<u64>) -> Result<Self> {
        let expected = documents.len() * words.len();
        if cells.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: cells.len(),
            });
        }
        Ok(Self {
            documents,
            words,
            cells,
        })
    }

    /// Panics on ragged rows. Handy for tests and small fixtures.
    pub fn from_rows<R: AsRef<[u64]>>(words: &[&str], rows: &[R]) -> Self {
        let mut cells = Vec::new();
        for r in rows {
            assert_eq!(r.as_ref().len(), words.len(), "row width");
            cells.extend_from_slice(r.as_ref());
        }
        Self {
            documents: (1..=rows.len()).map(|i| format!("doc {i}")).collect(),
            words: words.iter().map(|w| w.to_string()).collect(),
            cells,
        }
    }

    pub fn documents(&self) -> &[String] {
        &self.documents
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn n_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn get(&self, doc: usize, word: usize) -> u64 {
        self.cells[doc * self.words.len() + word]
    }

    pub fn row(&self, doc: usize) -> &[u64] {
        let w = self.words.len();
        &self.cells[doc * w..(doc + 1) * w]
    }

    pub fn column(&self, word: usize) -> Vec<u64> {
        (0..self.n_documents()).map(|d| self.get(d, word)).collect()
    }

    pub fn column_f64(&self, word: usize) -> Vec<f64> {
        (0..self.n_documents()).map(|d| self.get(d, word) as f64).collect()
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    pub fn row_totals(&self) -> Vec<u64> {
        (0..self.n_documents()).map(|d| self.row(d).iter().sum()).collect()
    }

    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_words()];
        for d in 0..self.n_documents() {
            for (t, &c) in totals.iter_mut().zip(self.row(d)) {
                *t += c;
            }
        }
        totals
    }

    /// Number of documents in which each word occurs at least once.
    pub fn document_frequencies(&self) -> Vec<u64> {
        let mut df = vec![0u64; self.n_words()];
        for d in 0..self.n_documents() {
            for (f, &c) in df.iter_mut().zip(self.row(d)) {
                if c > 0 {
                    *f += 1;
                }
            }
        }
        df
    }

    pub fn grand_total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Collapses counts to presence/absence.
    pub fn to_binary(&self) -> Self {
        Self {
            documents: self.documents.clone(),
            words: self.words.clone(),
            cells: self.cells.iter().map(|&c| u64::from(c > 0)).collect(),
        }
    }

    pub fn select_words(&self, keep: &[usize]) -> Self {
        let mut cells = Vec::with_capacity(self.n_documents() * keep.len());
        for d in 0..self.n_documents() {
            let row = self.row(d);
            cells.extend(keep.iter().map(|&j| row[j]));
        }
        Self {
            documents: self.documents.clone(),
            words: keep.iter().map(|&j| self.words[j].clone()).collect(),
            cells,
        }
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_vec(
            self.n_documents(),
            self.n_words(),
            self.cells.iter().map(|&c| c as f64).collect(),
        )
    }
}

/// Counts occurrences of every selected word in every document.
pub fn build_matrix(corpus: &Corpus, words: &WordSet) -> WordDocMatrix {
    let index: std::collections::HashMap<&str, usize> = words
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    let n = words.len();
    let mut cells = vec![0u64; corpus.len() * n];
    for (d, doc) in corpus.documents().iter().enumerate() {
        for t in &doc.tokens {
            if let Some(&j) = index.get(t.as_str()) {
                cells[d * n + j] += 1;
            }
        }
    }
    WordDocMatrix {
        documents: corpus.documents().iter().map(|d| d.source.clone()).collect(),
        words: words.words().to_vec(),
        cells,
    }
}

/// Variance denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Denominator {
    /// n - 1
    #[default]
    Sample,
    /// n
    Population,
}

/// Variance of `xs`; zero when fewer than two observations are available
/// for the sample denominator.
pub fn variance(xs: &[f64], denominator: Denominator) -> f64 {
    let n = xs.len();
    let dof = match denominator {
        Denominator::Sample => n.saturating_sub(1),
        Denominator::Population => n,
    };
    if dof == 0 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / dof as f64
}

#[derive(Clone, Debug)]
pub struct VarianceFiltered {
    pub matrix: WordDocMatrix,
    pub removed: Vec<String>,
    /// variance of every input column, in input order
    pub variances: Vec<f64>,
}

/// Drops columns that are constant across documents. A single-document
/// matrix has no variance anywhere.
pub fn variance_filter(matrix: &WordDocMatrix, denominator: Denominator) -> Result<VarianceFiltered> {
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    let mut variances = Vec::with_capacity(matrix.n_words());
    for j in 0..matrix.n_words() {
        let col = matrix.column(j);
        let constant = matrix.n_documents() < 2 || col.iter().all(|&c| c == col[0]);
        variances.push(if constant {
            0.0
        } else {
            variance(&matrix.column_f64(j), denominator)
        });
        if constant {
            removed.push(matrix.words[j].clone());
        } else {
            keep.push(j);
        }
    }
    if keep.is_empty() {
        return Err(Error::AllZeroVariance);
    }
    Ok(VarianceFiltered {
        matrix: matrix.select_words(&keep),
        removed,
        variances,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimilarityKind {
    Cosine,
    Pearson,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    kind: SimilarityKind,
    labels: Vec<String>,
    values: Matrix,
    /// columns with zero norm (cosine); their row and column are all zero
    degenerate: Vec<usize>,
}

impl SimilarityMatrix {
    pub fn new(kind: SimilarityKind, labels: Vec<String>, values: Matrix) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::NotSquare {
                rows: values.rows(),
                cols: values.cols(),
            });
        }
        if labels.len() != values.rows() {
            return Err(Error::LengthMismatch {
                expected: values.rows(),
                found: labels.len(),
            });
        }
        Ok(Self {
            kind,
            labels,
            values,
            degenerate: Vec::new(),
        })
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn degenerate(&self) -> &[usize] {
        &self.degenerate
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine of every pair of columns of a real matrix. Zero-norm columns get
/// an all-zero row and column (diagonal included) and are reported.
pub fn cosine_of(data: &Matrix) -> (Matrix, Vec<usize>) {
    let p = data.cols();
    let cols: Vec<Vec<f64>> = (0..p).map(|j| data.column(j)).collect();
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let degenerate: Vec<usize> = (0..p).filter(|&j| norms[j] == 0.0).collect();
    let mut out = Matrix::zeros(p, p);
    for u in 0..p {
        if norms[u] == 0.0 {
            continue;
        }
        out[(u, u)] = 1.0;
        for v in u + 1..p {
            if norms[v] == 0.0 {
                continue;
            }
            let c = (dot(&cols[u], &cols[v]) / (norms[u] * norms[v])).clamp(-1.0, 1.0);
            out[(u, v)] = c;
            out[(v, u)] = c;
        }
    }
    (out, degenerate)
}

/// Pearson correlation of every pair of columns. Fails on a constant column.
pub fn pearson_of(data: &Matrix, labels: &[String]) -> Result<Matrix> {
    let p = data.cols();
    let n = data.rows() as f64;
    let mut centered = Vec::with_capacity(p);
    let mut ss = Vec::with_capacity(p);
    for j in 0..p {
        let col = data.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let c: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let s = dot(&c, &c);
        if s.is_nan() || s <= 0.0 {
            return Err(Error::ZeroVarianceColumn {
                word: labels.get(j).cloned().unwrap_or_else(|| j.to_string()),
            });
        }
        ss.push(s.sqrt());
        centered.push(c);
    }
    let mut out = Matrix::zeros(p, p);
    for u in 0..p {
        out[(u, u)] = 1.0;
        for v in u + 1..p {
            let r = (dot(&centered[u], &centered[v]) / (ss[u] * ss[v])).clamp(-1.0, 1.0);
            out[(u, v)] = r;
            out[(v, u)] = r;
        }
    }
    Ok(out)
}

pub fn cosine_matrix(matrix: &WordDocMatrix) -> SimilarityMatrix {
    let (values, degenerate) = cosine_of(&matrix.to_dense());
    SimilarityMatrix {
        kind: SimilarityKind::Cosine,
        labels: matrix.words().to_vec(),
        values,
        degenerate,
    }
}

/// Requires every column to vary; run [`variance_filter`] first.
pub fn pearson_matrix(matrix: &WordDocMatrix) -> Result<SimilarityMatrix> {
    let values = pearson_of(&matrix.to_dense(), matrix.words())?;
    Ok(SimilarityMatrix {
        kind: SimilarityKind::Pearson,
        labels: matrix.words().to_vec(),
        values,
        degenerate: Vec::new(),
    })
}
