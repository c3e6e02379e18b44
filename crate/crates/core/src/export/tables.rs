//! CSV tables. Labels are always quoted, numbers are written in shortest
//! round-trip form, lines end in LF.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::factors::{
    format_loading, FactorModel, FrameAssignment, LoadingTable, ReliabilityReport, WordFrame,
};
use crate::lexicon::WordStats;
use crate::matrix::{SimilarityMatrix, VarianceFiltered, WordDocMatrix};

#[derive(Default)]
struct Table {
    out: String,
}

impl Table {
    fn row<I: IntoIterator<Item = Cell>>(&mut self, cells: I) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.out.push(',');
            }
            first = false;
            match cell {
                Cell::Text(s) => {
                    self.out.push('"');
                    self.out.push_str(&s.replace('"', "\"\""));
                    self.out.push('"');
                }
                Cell::Raw(s) => self.out.push_str(&s),
            }
        }
        self.out.push('\n');
    }

    fn finish(self) -> Vec<u8> {
        self.out.into_bytes()
    }
}

enum Cell {
    Text(String),
    Raw(String),
}

fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

fn num(v: impl ToString) -> Cell {
    Cell::Raw(v.to_string())
}

fn blank() -> Cell {
    Cell::Raw(String::new())
}

fn header(first: &str, rest: &[String]) -> Vec<Cell> {
    std::iter::once(text(first))
        .chain(rest.iter().map(|w| text(w.clone())))
        .collect()
}

fn component_headers(k: usize) -> Vec<String> {
    (1..=k).map(|j| format!("component_{j}")).collect()
}

/// Documents as rows, words as columns.
pub fn matrix_csv(matrix: &WordDocMatrix) -> Vec<u8> {
    let mut t = Table::default();
    t.row(header("document", matrix.words()));
    for (i, doc) in matrix.documents().iter().enumerate() {
        t.row(std::iter::once(text(doc.clone())).chain(matrix.row(i).iter().map(num)));
    }
    t.finish()
}

pub fn similarity_csv(matrix: &SimilarityMatrix) -> Vec<u8> {
    let mut t = Table::default();
    t.row(header("word", matrix.labels()));
    for (i, w) in matrix.labels().iter().enumerate() {
        t.row(
            std::iter::once(text(w.clone()))
                .chain((0..matrix.len()).map(|j| num(matrix.get(i, j)))),
        );
    }
    t.finish()
}

pub fn wordstats_csv(stats: &[WordStats]) -> Vec<u8> {
    let mut t = Table::default();
    t.row(["word", "count", "doc_freq", "tf_idf", "chi2"].map(text));
    for s in stats {
        t.row([
            text(s.word.clone()),
            num(s.frequency),
            num(s.doc_frequency),
            num(s.tf_idf),
            num(s.chi2),
        ]);
    }
    t.finish()
}

pub fn variance_csv(original: &WordDocMatrix, filtered: &VarianceFiltered) -> Vec<u8> {
    let mut t = Table::default();
    t.row(["word", "variance", "removed"].map(text));
    for (w, v) in original.words().iter().zip(&filtered.variances) {
        t.row([text(w.clone()), num(v), num(filtered.removed.contains(w))]);
    }
    t.finish()
}

/// Scree data: every eigenvalue with its share of the total variance.
pub fn eigenvalues_csv(model: &FactorModel) -> Vec<u8> {
    let total: f64 = model.eigenvalues.iter().sum();
    let mut t = Table::default();
    t.row(["component", "eigenvalue", "percent_variance", "cumulative_percent", "retained"].map(text));
    let mut cumulative = 0.0;
    for (j, &ev) in model.eigenvalues.iter().enumerate() {
        let pct = if total > 0.0 { 100.0 * ev / total } else { 0.0 };
        cumulative += pct;
        t.row([
            num(j + 1),
            num(ev),
            num(pct),
            num(cumulative),
            num(j < model.retained),
        ]);
    }
    t.finish()
}

/// Raw rotated loadings in input word order.
pub fn loadings_csv(model: &FactorModel, assignment: &FrameAssignment) -> Vec<u8> {
    let k = model.loadings.cols();
    let mut t = Table::default();
    let mut head = vec![text("word"), text("frame"), text("communality")];
    head.extend(component_headers(k).into_iter().map(text));
    t.row(head);
    for (i, w) in model.words.iter().enumerate() {
        let mut row = vec![
            text(w.clone()),
            num(assignment.words[i].frame),
            num(model.communalities[i]),
        ];
        row.extend(model.loadings.row(i).iter().map(num));
        t.row(row);
    }
    t.finish()
}

/// Display order with suppressed cells left empty.
pub fn loadings_display_csv(table: &LoadingTable) -> Vec<u8> {
    let mut t = Table::default();
    let mut head = vec![text("word"), text("frame")];
    head.extend(component_headers(table.n_factors).into_iter().map(text));
    t.row(head);
    for r in &table.rows {
        let mut row = vec![text(r.word.clone()), num(r.frame)];
        row.extend(r.cells.iter().map(|c| match c {
            Some(v) => Cell::Raw(format_loading(*v)),
            None => blank(),
        }));
        t.row(row);
    }
    t.finish()
}

pub fn frames_csv(assignment: &FrameAssignment) -> Vec<u8> {
    let mut t = Table::default();
    t.row(["word", "frame", "loading", "member"].map(text));
    for w in &assignment.words {
        t.row([text(w.word.clone()), num(w.frame), num(w.loading), num(w.member)]);
    }
    t.finish()
}

pub fn reliability_csv(report: &ReliabilityReport) -> Vec<u8> {
    let mut t = Table::default();
    t.row(["frame", "n_items", "alpha", "pass_065"].map(text));
    for f in &report.frames {
        t.row([
            num(f.frame),
            num(f.n_items),
            f.alpha.map_or_else(blank, num),
            num(f.passes),
        ]);
    }
    t.finish()
}

/// Normalized word next to its most frequent surface form.
pub fn labels_csv(labels: &[(String, String)]) -> Vec<u8> {
    let mut t = Table::default();
    t.row(["word", "label"].map(text));
    for (w, l) in labels {
        t.row([text(w.clone()), text(l.clone())]);
    }
    t.finish()
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(bytes)
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let raw = record.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| Error::Parse {
        line: record_line(record),
        message: format!("bad {what} {raw:?}"),
    })
}

/// Inverse of [`matrix_csv`].
pub fn read_matrix_csv(bytes: &[u8]) -> Result<WordDocMatrix> {
    let mut rdr = reader(bytes);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("document") {
        return Err(Error::Parse {
            line: 1,
            message: "matrix header must start with \"document\"".into(),
        });
    }
    let words: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut documents = Vec::new();
    let mut cells = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != words.len() + 1 {
            return Err(Error::Parse {
                line: record_line(&record),
                message: format!("expected {} fields, found {}", words.len() + 1, record.len()),
            });
        }
        documents.push(record[0].to_string());
        for j in 1..record.len() {
            cells.push(field::<u64>(&record, j, "count")?);
        }
    }
    WordDocMatrix::new(documents, words, cells)
}

/// Inverse of [`frames_csv`]; the member column is optional.
pub fn read_frames_csv(bytes: &[u8]) -> Result<FrameAssignment> {
    let mut rdr = reader(bytes);
    let headers = rdr.headers()?.clone();
    let expect = ["word", "frame", "loading"];
    if headers.len() < 3 || headers.iter().take(3).ne(expect) {
        return Err(Error::Parse {
            line: 1,
            message: "frames header must be word,frame,loading".into(),
        });
    }
    let mut words = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let frame: usize = field(&record, 1, "frame")?;
        if frame == 0 {
            return Err(Error::Parse {
                line: record_line(&record),
                message: "frames are numbered from 1".into(),
            });
        }
        let member = match record.get(3) {
            Some(_) => field(&record, 3, "member")?,
            None => true,
        };
        words.push(WordFrame {
            word: record[0].to_string(),
            frame,
            loading: field(&record, 2, "loading")?,
            member,
        });
    }
    let n_frames = words.iter().map(|w| w.frame).max().unwrap_or(0);
    Ok(FrameAssignment { words, n_frames })
}

/// Word to display label map from [`labels_csv`] output.
pub fn read_labels_csv(bytes: &[u8]) -> Result<BTreeMap<String, String>> {
    let mut rdr = reader(bytes);
    let mut map = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        if let (Some(w), Some(l)) = (record.get(0), record.get(1)) {
            map.insert(w.to_string(), l.to_string());
        }
    }
    Ok(map)
}
