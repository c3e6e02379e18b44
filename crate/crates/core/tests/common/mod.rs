//! Independent reference implementations and random instance generators
//! shared by the integration tests.
#![allow(dead_code)]

use framemap::graph::{Edge, SemanticNetwork, Vertex};
use framemap::linalg::Matrix;
use framemap::matrix::WordDocMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn column(data: &[Vec<f64>], j: usize) -> Vec<f64> {
    data.iter().map(|row| row[j]).collect()
}

/// Double-loop cosine between the columns of `data` (rows = cases).
pub fn cosine_oracle(data: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = data[0].len();
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
            for row in data {
                xy += row[a] * row[b];
                xx += row[a] * row[a];
                yy += row[b] * row[b];
            }
            out[a][b] = if xx == 0.0 || yy == 0.0 {
                0.0
            } else {
                xy / (xx.sqrt() * yy.sqrt())
            };
        }
    }
    out
}

/// Textbook Pearson: sum of co-deviations over the root of the product of
/// sums of squared deviations.
pub fn pearson_oracle(data: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = data[0].len();
    let n = data.len() as f64;
    let means: Vec<f64> = (0..p).map(|j| column(data, j).iter().sum::<f64>() / n).collect();
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
            for row in data {
                let da = row[a] - means[a];
                let db = row[b] - means[b];
                sab += da * db;
                saa += da * da;
                sbb += db * db;
            }
            out[a][b] = sab / (saa * sbb).sqrt();
        }
    }
    out
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// alpha = k/(k-1) * (1 - sum of item variances / variance of the total)
pub fn cronbach_oracle(items: &[Vec<f64>]) -> f64 {
    let k = items.len() as f64;
    let n = items[0].len();
    let totals: Vec<f64> = (0..n).map(|i| items.iter().map(|c| c[i]).sum()).collect();
    let item_var: f64 = items.iter().map(|c| sample_variance(c)).sum();
    k / (k - 1.0) * (1.0 - item_var / sample_variance(&totals))
}

/// Pearson chi-square of a whole contingency table.
pub fn chi_square_oracle(table: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..table[0].len()).map(|j| column(table, j).iter().sum()).collect();
    let total: f64 = rows.iter().sum();
    let mut chi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            if e > 0.0 {
                chi += (o - e) * (o - e) / e;
            }
        }
    }
    chi
}

/// Core numbers by repeated deletion: for each k, strip vertices of degree
/// below k until none remain; a vertex's core is the largest k it survives.
pub fn kcore_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut core = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

pub fn random_counts(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max: u64) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..=max)).collect())
        .collect()
}

pub fn word_doc(counts: &[Vec<u64>]) -> WordDocMatrix {
    let words: Vec<String> = (0..counts[0].len()).map(|j| format!("w{j}")).collect();
    let docs: Vec<String> = (0..counts.len()).map(|i| format!("d{i}")).collect();
    let cells = counts.iter().flatten().copied().collect();
    WordDocMatrix::new(docs, words, cells).unwrap()
}

pub fn to_f64(counts: &[Vec<u64>]) -> Vec<Vec<f64>> {
    counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64).collect())
        .collect()
}

/// Sample correlation matrix of `n` variables from `n + 5` Gaussian-ish
/// cases with a shared factor, so off-diagonals are sizable.
pub fn random_correlation(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let m = n + 5;
    let loadings: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
    let data: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let f: f64 = gauss(rng);
            loadings.iter().map(|l| l * f + gauss(rng)).collect()
        })
        .collect();
    let r = pearson_oracle(&data);
    Matrix::from_rows(&r)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn network(n: usize, edges: &[(usize, usize)]) -> SemanticNetwork {
    SemanticNetwork::new(
        (0..n).map(|i| Vertex::new(format!("v{i}"))).collect(),
        edges.iter().map(|&(u, v)| Edge { u, v, weight: 1.0 }).collect(),
    )
    .unwrap()
}

const LABEL_CHARS: &[char] = &['a', 'z', 'Q', ' ', '"', '\'', '-', 'é', 'ß', '%', '*', '1', '\t'];

/// Random network with positions and sizes, labels drawn from characters
/// that exercise quoting.
pub fn random_styled_network(rng: &mut ChaCha8Rng) -> SemanticNetwork {
    let n = rng.gen_range(0..20);
    let vertices = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..10);
            let label: String = (0..len)
                .map(|_| LABEL_CHARS[rng.gen_range(0..LABEL_CHARS.len())])
                .collect();
            let mut v = Vertex::new(label);
            v.position = Some((rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)));
            v.size = Some(rng.gen_range(4.0..=14.0));
            v
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.3) {
                edges.push(Edge {
                    u,
                    v,
                    weight: rng.gen_range(0.0001..=1.0),
                });
            }
        }
    }
    SemanticNetwork::new(vertices, edges).unwrap()
}

pub fn max_abs(a: &Matrix, b: &Matrix) -> f64 {
    a.max_abs_diff(b)
}

/// Hand-solvable corpus: alpha = beta and gamma = delta column-wise, the two
/// pairs uncorrelated, plus a document made only of stopwords.
pub const MICRO_TEXT: &str = "alpha beta alpha beta gamma delta\n\
gamma delta\n\
gamma delta gamma delta\n\
alpha gamma beta alpha delta beta\n\
the of and\n";

pub const MICRO_STOPWORDS: &str = "the\nof\nand\n";
