//! Orthogonal varimax rotation by sweeps of pairwise planar rotations.

use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarimaxOptions {
    /// Scale each row to unit length while rotating.
    pub kaiser_normalize: bool,
    /// Stop when a full sweep improves the criterion by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for VarimaxOptions {
    fn default() -> Self {
        Self {
            kaiser_normalize: true,
            tol: 1e-5,
            max_sweeps: 25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rotation {
    pub loadings: Matrix,
    /// k x k orthogonal matrix with `loadings = input * rotation`
    pub rotation: Matrix,
    pub sweeps: usize,
    pub converged: bool,
    /// criterion before the first sweep, then after each accepted sweep
    pub criterion_history: Vec<f64>,
    /// rows left unnormalized because their communality is zero
    pub zero_communality_rows: Vec<usize>,
}

/// `sum_j [ mean_v(l_vj^4) - mean_v(l_vj^2)^2 ]`
pub fn varimax_criterion(loadings: &Matrix) -> f64 {
    let p = loadings.rows() as f64;
    if loadings.rows() == 0 {
        return 0.0;
    }
    (0..loadings.cols())
        .map(|j| {
            let mut s2 = 0.0;
            let mut s4 = 0.0;
            for i in 0..loadings.rows() {
                let sq = loadings[(i, j)] * loadings[(i, j)];
                s2 += sq;
                s4 += sq * sq;
            }
            s4 / p - (s2 / p) * (s2 / p)
        })
        .sum()
}

/// Angle maximizing the criterion over the plane of columns `a` and `b`.
fn pair_angle(m: &Matrix, a: usize, b: usize) -> f64 {
    let p = m.rows() as f64;
    let (mut sa, mut sb, mut sc, mut sd) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..m.rows() {
        let x = m[(i, a)];
        let y = m[(i, b)];
        let u = x * x - y * y;
        let v = 2.0 * x * y;
        sa += u;
        sb += v;
        sc += u * u - v * v;
        sd += 2.0 * u * v;
    }
    let num = sd - 2.0 * sa * sb / p;
    let den = sc - (sa * sa - sb * sb) / p;
    0.25 * num.atan2(den)
}

fn rotate_columns(m: &mut Matrix, a: usize, b: usize, phi: f64) {
    let (s, c) = phi.sin_cos();
    for i in 0..m.rows() {
        let x = m[(i, a)];
        let y = m[(i, b)];
        m[(i, a)] = x * c + y * s;
        m[(i, b)] = -x * s + y * c;
    }
}

/// Varimax rotation of a variables x factors loading matrix.
pub fn varimax(loadings: &Matrix, options: &VarimaxOptions) -> Rotation {
    let p = loadings.rows();
    let k = loadings.cols();
    if k < 2 {
        return Rotation {
            loadings: loadings.clone(),
            rotation: Matrix::identity(k),
            sweeps: 0,
            converged: true,
            criterion_history: vec![varimax_criterion(loadings)],
            zero_communality_rows: Vec::new(),
        };
    }

    let mut scale = vec![1.0; p];
    let mut zero_rows = Vec::new();
    let mut work = loadings.clone();
    if options.kaiser_normalize {
        for (i, s) in scale.iter_mut().enumerate() {
            let h = work.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            if h > 0.0 {
                *s = h;
                work.row_mut(i).iter_mut().for_each(|v| *v /= h);
            } else {
                zero_rows.push(i);
            }
        }
    }

    let mut rotation = Matrix::identity(k);
    let mut history = vec![varimax_criterion(&work)];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < options.max_sweeps {
        let before_work = work.clone();
        let before_rot = rotation.clone();
        sweeps += 1;
        for a in 0..k {
            for b in a + 1..k {
                let phi = pair_angle(&work, a, b);
                if phi != 0.0 {
                    rotate_columns(&mut work, a, b, phi);
                    rotate_columns(&mut rotation, a, b, phi);
                }
            }
        }
        let prev = *history.last().expect("history starts non-empty");
        let now = varimax_criterion(&work);
        if now < prev {
            // only reachable through rounding at the optimum
            work = before_work;
            rotation = before_rot;
            converged = true;
            break;
        }
        history.push(now);
        if now - prev < options.tol {
            converged = true;
            break;
        }
    }

    for (i, &s) in scale.iter().enumerate() {
        work.row_mut(i).iter_mut().for_each(|v| *v *= s);
    }
    Rotation {
        loadings: work,
        rotation,
        sweeps,
        converged,
        criterion_history: history,
        zero_communality_rows: zero_rows,
    }
}
