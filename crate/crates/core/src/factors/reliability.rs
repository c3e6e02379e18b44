use crate::error::{Error, Result};
use crate::matrix::{variance, Denominator, WordDocMatrix};

use super::FrameAssignment;

/// Smallest alpha accepted as an internally consistent frame.
pub const DEFAULT_ALPHA_FLOOR: f64 = 0.65;

/// Cronbach's alpha of the item columns, with n - 1 variances.
pub fn cronbach_alpha(matrix: &WordDocMatrix, items: &[&str]) -> Result<f64> {
    if items.len() < 2 {
        return Err(Error::TooFewItems { n: items.len() });
    }
    let columns = items
        .iter()
        .map(|w| {
            matrix
                .word_index(w)
                .map(|j| matrix.column_f64(j))
                .ok_or_else(|| Error::UnknownWord {
                    word: w.to_string(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = items.len() as f64;
    let item_variance: f64 = columns
        .iter()
        .map(|c| variance(c, Denominator::Sample))
        .sum();
    let totals: Vec<f64> = (0..matrix.n_documents())
        .map(|d| columns.iter().map(|c| c[d]).sum())
        .collect();
    let total_variance = variance(&totals, Denominator::Sample);
    if total_variance <= 0.0 {
        return Err(Error::UndefinedAlpha);
    }
    Ok(k / (k - 1.0) * (1.0 - item_variance / total_variance))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReliability {
    pub frame: usize,
    pub n_items: usize,
    /// `None` for single-item frames or a constant total score
    pub alpha: Option<f64>,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityReport {
    pub floor: f64,
    pub frames: Vec<FrameReliability>,
}

pub fn reliability_report(
    matrix: &WordDocMatrix,
    assignment: &FrameAssignment,
    floor: f64,
) -> Result<ReliabilityReport> {
    let mut frames = Vec::with_capacity(assignment.n_frames);
    for frame in 1..=assignment.n_frames {
        let items = assignment.members(frame);
        let alpha = if items.len() < 2 {
            None
        } else {
            match cronbach_alpha(matrix, &items) {
                Ok(a) => Some(a),
                Err(Error::UndefinedAlpha) => None,
                Err(e) => return Err(e),
            }
        };
        frames.push(FrameReliability {
            frame,
            n_items: items.len(),
            passes: alpha.is_some_and(|a| a >= floor),
            alpha,
        });
    }
    Ok(ReliabilityReport { floor, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::WordFrame;

    #[test]
    fn identical_items_are_perfectly_consistent() {
        let m = WordDocMatrix::from_rows(&["a", "b"], &[[1, 1], [3, 3], [0, 0], [2, 2]]);
        assert_eq!(cronbach_alpha(&m, &["a", "b"]).unwrap(), 1.0);
    }

    #[test]
    fn hand_computed_two_items() {
        let m = WordDocMatrix::from_rows(&["a", "b"], &[[1, 2], [2, 4], [3, 6], [4, 8]]);
        let alpha = cronbach_alpha(&m, &["a", "b"]).unwrap();
        // 2 * (1 - (5/3 + 20/3) / 15)
        assert!((alpha - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn error_paths() {
        let m = WordDocMatrix::from_rows(&["a", "b"], &[[1, 1], [1, 1]]);
        assert!(matches!(cronbach_alpha(&m, &["a"]), Err(Error::TooFewItems { n: 1 })));
        assert!(matches!(cronbach_alpha(&m, &["a", "b"]), Err(Error::UndefinedAlpha)));
        assert!(matches!(cronbach_alpha(&m, &["a", "zz"]), Err(Error::UnknownWord { .. })));
    }

    #[test]
    fn report_flags_low_alpha() {
        let m = WordDocMatrix::from_rows(
            &["a", "b", "c", "d", "e"],
            &[[1, 2, 3, 0, 1], [2, 4, 0, 1, 0], [3, 6, 1, 0, 2], [4, 8, 0, 3, 1]],
        );
        let wf = |w: &str, f| WordFrame {
            word: w.into(),
            frame: f,
            loading: 0.9,
            member: true,
        };
        let a = FrameAssignment {
            words: vec![wf("a", 1), wf("b", 1), wf("c", 2), wf("d", 2), wf("e", 3)],
            n_frames: 3,
        };
        let r = reliability_report(&m, &a, DEFAULT_ALPHA_FLOOR).unwrap();
        assert!(r.frames[0].passes);
        assert!(r.frames[1].alpha.unwrap() < 0.65 && !r.frames[1].passes);
        assert_eq!(r.frames[2].alpha, None);
        assert_eq!(r.frames[2].n_items, 1);
    }
}
