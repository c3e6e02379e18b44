use std::fmt::Write as _;

use crate::linalg::Matrix;

/// Loadings below this magnitude are left blank in the display table.
pub const DEFAULT_SUPPRESS: f64 = 0.10;

#[derive(Clone, Debug, PartialEq)]
pub struct WordFrame {
    pub word: String,
    /// 1-based
    pub frame: usize,
    /// signed; negative marks an inverse indicator
    pub loading: f64,
    /// false when |loading| falls below the optional membership threshold
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameAssignment {
    pub words: Vec<WordFrame>,
    pub n_frames: usize,
}

impl FrameAssignment {
    pub fn members(&self, frame: usize) -> Vec<&str> {
        self.words
            .iter()
            .filter(|w| w.frame == frame && w.member)
            .map(|w| w.word.as_str())
            .collect()
    }

    pub fn frame_of(&self, word: &str) -> Option<&WordFrame> {
        self.words.iter().find(|w| w.word == word)
    }
}

/// Each word goes to the factor where its absolute loading is largest; exact
/// ties go to the lower factor index.
pub fn assign_frames(loadings: &Matrix, words: &[String], min_loading: Option<f64>) -> FrameAssignment {
    assert_eq!(loadings.rows(), words.len(), "one loading row per word");
    let words = words
        .iter()
        .enumerate()
        .map(|(i, word)| {
            let row = loadings.row(i);
            let mut best = 0;
            for (j, v) in row.iter().enumerate().skip(1) {
                if v.abs() > row[best].abs() {
                    best = j;
                }
            }
            let loading = row.get(best).copied().unwrap_or(0.0);
            WordFrame {
                word: word.clone(),
                frame: best + 1,
                loading,
                member: min_loading.is_none_or(|t| loading.abs() >= t),
            }
        })
        .collect();
    FrameAssignment {
        words,
        n_frames: loadings.cols(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadingRow {
    pub word: String,
    pub frame: usize,
    /// `None` where the loading is suppressed
    pub cells: Vec<Option<f64>>,
    pub raw: Vec<f64>,
    pub fully_suppressed: bool,
}

/// The rotated component matrix as displayed: grouped by frame, sorted by
/// size within each group, small loadings blanked.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadingTable {
    pub rows: Vec<LoadingRow>,
    pub n_factors: usize,
    pub suppress_below: f64,
    pub rotation_iterations: Option<usize>,
    pub kaiser_normalized: bool,
}

pub fn loading_table(
    loadings: &Matrix,
    words: &[String],
    assignment: &FrameAssignment,
    suppress_below: f64,
    rotation_iterations: Option<usize>,
) -> LoadingTable {
    let mut rows: Vec<(usize, f64, LoadingRow)> = words
        .iter()
        .enumerate()
        .map(|(i, word)| {
            let wf = &assignment.words[i];
            let raw = loadings.row(i).to_vec();
            let cells: Vec<Option<f64>> = raw
                .iter()
                .map(|&v| (v.abs() >= suppress_below).then_some(v))
                .collect();
            let fully_suppressed = cells.iter().all(Option::is_none);
            (
                i,
                wf.loading.abs(),
                LoadingRow {
                    word: word.clone(),
                    frame: wf.frame,
                    cells,
                    raw,
                    fully_suppressed,
                },
            )
        })
        .collect();
    rows.sort_by(|a, b| {
        a.2.frame
            .cmp(&b.2.frame)
            .then(b.1.total_cmp(&a.1))
            .then(a.0.cmp(&b.0))
    });
    LoadingTable {
        rows: rows.into_iter().map(|(_, _, r)| r).collect(),
        n_factors: loadings.cols(),
        suppress_below,
        rotation_iterations,
        kaiser_normalized: true,
    }
}

/// `.875`, `-.209`, `1.000`
pub fn format_loading(v: f64) -> String {
    let s = format!("{v:.3}");
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

impl LoadingTable {
    /// Plain-text rendering in the layout of a statistics package's
    /// rotated component matrix.
    pub fn render_text(&self) -> String {
        let label_width = self
            .rows
            .iter()
            .map(|r| r.word.chars().count())
            .max()
            .unwrap_or(0)
            .max(4);
        let mut out = String::new();
        out.push_str("Rotated Component Matrix\n");
        let _ = writeln!(out, "{:label_width$}  Component", "");
        let _ = write!(out, "{:label_width$}", "");
        for j in 1..=self.n_factors {
            let _ = write!(out, " {j:>7}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:label_width$}", row.word.to_uppercase());
            for cell in &row.cells {
                match cell {
                    Some(v) => {
                        let _ = write!(out, " {:>7}", format_loading(*v));
                    }
                    None => out.push_str("        "),
                }
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out.push_str("Extraction Method: Principal Component Analysis.\n");
        if self.kaiser_normalized {
            out.push_str("Rotation Method: Varimax with Kaiser Normalization.\n");
        } else {
            out.push_str("Rotation Method: Varimax.\n");
        }
        match self.rotation_iterations {
            Some(n) => {
                let _ = writeln!(out, "Rotation converged in {n} iterations.");
            }
            None => out.push_str("Rotation failed to converge.\n"),
        }
        let _ = writeln!(
            out,
            "Absolute values below {} suppressed.",
            format_loading(self.suppress_below)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn negative_dominant_loading_wins() {
        let l = Matrix::from_rows(&[[0.332, 0.05, -0.940], [-0.147, 0.968, 0.202]]);
        let a = assign_frames(&l, &words(&["level", "communication"]), None);
        assert_eq!(a.words[0].frame, 3);
        assert_eq!(a.words[0].loading, -0.940);
        assert_eq!(a.words[1].frame, 2);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let l = Matrix::from_rows(&[[0.5, -0.5, 0.1]]);
        let a = assign_frames(&l, &words(&["w"]), None);
        assert_eq!(a.words[0].frame, 1);
    }

    #[test]
    fn membership_threshold() {
        let l = Matrix::from_rows(&[[0.2, 0.1], [0.9, 0.0]]);
        let a = assign_frames(&l, &words(&["weak", "strong"]), Some(0.3));
        assert!(!a.words[0].member);
        assert_eq!(a.members(1), ["strong"]);
    }

    #[test]
    fn table_suppresses_and_sorts() {
        let l = Matrix::from_rows(&[
            [0.09, 0.95, 0.0],
            [0.875, 0.436, -0.209],
            [0.05, 0.02, -0.01],
            [0.90, 0.10, 0.0],
        ]);
        let w = words(&["communication", "research", "flat", "field"]);
        let a = assign_frames(&l, &w, None);
        let t = loading_table(&l, &w, &a, DEFAULT_SUPPRESS, Some(6));
        let order: Vec<&str> = t.rows.iter().map(|r| r.word.as_str()).collect();
        assert_eq!(order, ["field", "research", "flat", "communication"]);
        let comm = &t.rows[3];
        assert_eq!(comm.cells[0], None);
        assert_eq!(comm.raw[0], 0.09);
        assert!(t.rows[2].fully_suppressed);
        assert_eq!(t.rows[0].cells[1], Some(0.10));
        let text = t.render_text();
        assert!(text.contains("RESEARCH"));
        assert!(text.contains(".875"));
        assert!(text.contains("-.209"));
        assert!(text.contains("Rotation converged in 6 iterations."));
    }

    #[test]
    fn loading_format() {
        assert_eq!(format_loading(0.875), ".875");
        assert_eq!(format_loading(-0.94), "-.940");
        assert_eq!(format_loading(1.0), "1.000");
    }
}
