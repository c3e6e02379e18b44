//! Cyclic Jacobi eigensolver for real symmetric matrices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by eigenvalue, largest first.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// eigenvectors in columns, same order as `values`
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn frobenius(a: &Matrix) -> f64 {
    a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Eigendecomposition by cyclic Jacobi sweeps. Each eigenvector is signed so
/// that its entry of largest magnitude is positive (first such entry on ties).
pub fn eigendecompose(matrix: &Matrix) -> Result<Eigen> {
    if !matrix.is_square() {
        return Err(Error::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    let asym = matrix.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    let n = matrix.rows();
    let mut a = matrix.clone();
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let target = OFF_DIAGONAL_TOLERANCE * frobenius(&a).max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                // A <- J^T A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = v.select_columns(&order);
    for j in 0..n {
        let mut lead = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(lead, j)].abs() + 1e-12 {
                lead = i;
            }
        }
        if vectors[(lead, j)] < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_eigenvalues() {
        let e = eigendecompose(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn two_by_two_closed_form() {
        let r = 0.6;
        let e = eigendecompose(&Matrix::from_rows(&[[1.0, r], [r, 1.0]])).unwrap();
        assert!((e.values[0] - 1.6).abs() < 1e-12);
        assert!((e.values[1] - 0.4).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vector(0)[0] - h).abs() < 1e-12 && (e.vector(0)[1] - h).abs() < 1e-12);
        // tie on magnitude: first entry made positive
        assert!(e.vector(1)[0] > 0.0 && e.vector(1)[1] < 0.0);
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        let a = Matrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]);
        assert!(matches!(eigendecompose(&a), Err(Error::NotSymmetric { .. })));
        assert!(matches!(
            eigendecompose(&Matrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn sign_convention_largest_entry_positive() {
        let a = Matrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]);
        let e = eigendecompose(&a).unwrap();
        for j in 0..3 {
            let v = e.vector(j);
            let lead = v.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() + 1e-12 { x } else { m });
            assert!(lead > 0.0, "{v:?}");
            let av = a.mul_vec(&v);
            for i in 0..3 {
                assert!((av[i] - e.values[j] * v[i]).abs() < 1e-10);
            }
        }
    }
}
