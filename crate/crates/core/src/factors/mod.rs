//! Frame extraction: principal components of the word correlation matrix,
//! varimax rotation, frame assignment and per-frame reliability.

mod eigen;
mod frames;
mod reliability;
mod varimax;

pub use eigen::{eigendecompose, Eigen, MAX_SWEEPS, OFF_DIAGONAL_TOLERANCE, SYMMETRY_TOLERANCE};
pub use frames::{
    assign_frames, format_loading, loading_table, FrameAssignment, LoadingRow, LoadingTable, WordFrame,
    DEFAULT_SUPPRESS,
};
pub use reliability::{
    cronbach_alpha, reliability_report, FrameReliability, ReliabilityReport, DEFAULT_ALPHA_FLOOR,
};
pub use varimax::{varimax, varimax_criterion, Rotation, VarimaxOptions};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matrix::{SimilarityKind, SimilarityMatrix};

/// How many components to retain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FactorCount {
    /// eigenvalues greater than one
    #[default]
    Kaiser,
    Manual(usize),
}

/// Returns the retained count and a warning when the rule had to be bent.
pub fn choose_n_factors(eigenvalues: &[f64], policy: FactorCount) -> (usize, Option<String>) {
    let n = eigenvalues.len();
    match policy {
        FactorCount::Kaiser => {
            let k = eigenvalues.iter().filter(|&&v| v > 1.0).count();
            if k == 0 {
                (
                    1.min(n),
                    Some("no eigenvalue exceeds 1; retaining one component".into()),
                )
            } else {
                (k, None)
            }
        }
        FactorCount::Manual(k) => {
            let clipped = k.clamp(1, n.max(1));
            let warning = (clipped != k)
                .then(|| format!("requested {k} factors; clipped to {clipped}"));
            (clipped, warning)
        }
    }
}

/// Unrotated principal component loadings `v_j * sqrt(lambda_j)` for the
/// first `k` components.
pub fn pca_loadings(eigen: &Eigen, k: usize) -> Result<Matrix> {
    let n = eigen.values.len();
    if k == 0 || k > n {
        return Err(Error::FactorCount {
            requested: k,
            available: n,
        });
    }
    let mut out = Matrix::zeros(eigen.vectors.rows(), k);
    for j in 0..k {
        let lambda = eigen.values[j];
        if lambda < -1e-10 {
            return Err(Error::NegativeEigenvalue {
                index: j,
                value: lambda,
            });
        }
        let scale = lambda.max(0.0).sqrt();
        for i in 0..out.rows() {
            out[(i, j)] = eigen.vectors[(i, j)] * scale;
        }
    }
    Ok(out)
}

pub fn communalities(loadings: &Matrix) -> Vec<f64> {
    (0..loadings.rows())
        .map(|i| loadings.row(i).iter().map(|v| v * v).sum())
        .collect()
}

/// Column sums of squared loadings.
pub fn explained_variance(loadings: &Matrix) -> Vec<f64> {
    (0..loadings.cols())
        .map(|j| loadings.column(j).iter().map(|v| v * v).sum())
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FactorOptions {
    pub n_factors: FactorCount,
    pub varimax: VarimaxOptions,
}

#[derive(Clone, Debug)]
pub struct FactorModel {
    pub words: Vec<String>,
    /// all eigenvalues, descending
    pub eigenvalues: Vec<f64>,
    pub retained: usize,
    pub unrotated_loadings: Matrix,
    pub loadings: Matrix,
    pub communalities: Vec<f64>,
    pub rotation_iterations: usize,
    pub rotation_converged: bool,
    pub explained_variance: Vec<f64>,
    pub kaiser_normalized: bool,
    pub warnings: Vec<String>,
}

/// Principal component extraction with varimax rotation on a Pearson matrix.
pub fn fit_factor_model(correlation: &SimilarityMatrix, options: &FactorOptions) -> Result<FactorModel> {
    if correlation.kind() != SimilarityKind::Pearson {
        return Err(Error::InvalidOption(
            "factor analysis needs a Pearson correlation matrix".into(),
        ));
    }
    let mut warnings = Vec::new();
    let eigen = eigendecompose(correlation.values())?;
    let (k, warn) = choose_n_factors(&eigen.values, options.n_factors);
    warnings.extend(warn);
    let unrotated = pca_loadings(&eigen, k)?;
    let rotation = varimax(&unrotated, &options.varimax);
    if !rotation.converged {
        warnings.push(format!(
            "varimax did not converge in {} sweeps",
            rotation.sweeps
        ));
    }
    for &i in &rotation.zero_communality_rows {
        warnings.push(format!(
            "word {:?} has zero communality; left unnormalized",
            correlation.labels()[i]
        ));
    }
    Ok(FactorModel {
        words: correlation.labels().to_vec(),
        eigenvalues: eigen.values,
        retained: k,
        communalities: communalities(&rotation.loadings),
        explained_variance: explained_variance(&rotation.loadings),
        unrotated_loadings: unrotated,
        loadings: rotation.loadings,
        rotation_iterations: rotation.sweeps,
        rotation_converged: rotation.converged,
        kaiser_normalized: options.varimax.kaiser_normalize,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kaiser_rule() {
        assert_eq!(choose_n_factors(&[2.5, 1.2, 0.8, 0.5], FactorCount::Kaiser), (2, None));
        let (k, w) = choose_n_factors(&[0.9, 0.9, 0.7], FactorCount::Kaiser);
        assert_eq!(k, 1);
        assert!(w.is_some());
    }

    #[test]
    fn manual_count_clipped() {
        let ev = vec![1.0; 8];
        assert_eq!(choose_n_factors(&ev, FactorCount::Manual(6)), (6, None));
        assert_eq!(choose_n_factors(&ev, FactorCount::Manual(20)).0, 8);
        assert_eq!(choose_n_factors(&ev, FactorCount::Manual(0)).0, 1);
    }

    #[test]
    fn identity_loadings_are_unit_columns() {
        let e = eigendecompose(&Matrix::identity(3)).unwrap();
        let l = pca_loadings(&e, 1).unwrap();
        let col = l.column(0);
        assert_eq!(col.iter().filter(|v| **v == 1.0).count(), 1);
        assert_eq!(col.iter().filter(|v| **v == 0.0).count(), 2);
    }

    #[test]
    fn two_by_two_column_norms() {
        let e = eigendecompose(&Matrix::from_rows(&[[1.0, 0.6], [0.6, 1.0]])).unwrap();
        let l = pca_loadings(&e, 2).unwrap();
        let ev = explained_variance(&l);
        assert!((ev[0] - 1.6).abs() < 1e-12 && (ev[1] - 0.4).abs() < 1e-12);
        for h in communalities(&l) {
            assert!((h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let e = Eigen {
            values: vec![1.5, -0.5],
            vectors: Matrix::identity(2),
            sweeps: 0,
        };
        assert!(matches!(pca_loadings(&e, 2), Err(Error::NegativeEigenvalue { index: 1, .. })));
        assert!(pca_loadings(&e, 1).is_ok());
        assert!(matches!(pca_loadings(&e, 3), Err(Error::FactorCount { .. })));
    }
}
