//! Force-directed layouts. Kamada-Kawai stress minimization is the default;
//! Fruchterman-Reingold is offered as an alternative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SemanticNetwork;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Vertex coordinates in `[0.05, 0.95]^2` plus run diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub positions: Vec<(f64, f64)>,
    /// final energy, measured in desired-edge-length units before rescaling
    pub stress: f64,
    /// energy of the seeded starting placement, same units as `stress`
    pub initial_stress: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Graph distances fed to Kamada-Kawai.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KkDistances {
    /// unweighted shortest-path lengths
    #[default]
    Hops,
    /// shortest paths over edge lengths `1 - cosine`
    Dissimilarity,
}

/// Floor on `1 - cosine` edge lengths so identical words stay apart.
pub const MIN_DISSIMILARITY: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KamadaKawaiOptions {
    pub seed: u64,
    pub max_iterations: usize,
    /// stop once every vertex gradient norm is below this
    pub tol: f64,
    pub distances: KkDistances,
}

impl Default for KamadaKawaiOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            max_iterations: 1000,
            tol: 1e-6,
            distances: KkDistances::Hops,
        }
    }
}

/// Connected components, largest first (ties by smallest member).
pub fn connected_components(network: &SemanticNetwork) -> Vec<Vec<usize>> {
    let adj = network.adjacency();
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

/// All-pairs shortest paths among `members` (Floyd-Warshall). Unreachable
/// pairs are infinite.
pub fn shortest_paths(network: &SemanticNetwork, members: &[usize], kind: KkDistances) -> Matrix {
    let n = members.len();
    let mut local = vec![usize::MAX; network.n_vertices()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let mut d = Matrix::from_vec(n, n, vec![f64::INFINITY; n * n]);
    for i in 0..n {
        d[(i, i)] = 0.0;
    }
    for e in network.edges() {
        let (a, b) = (local[e.u], local[e.v]);
        if a == usize::MAX || b == usize::MAX {
            continue;
        }
        let len = match kind {
            KkDistances::Hops => 1.0,
            KkDistances::Dissimilarity => (1.0 - e.weight).max(MIN_DISSIMILARITY),
        };
        if len < d[(a, b)] {
            d[(a, b)] = len;
            d[(b, a)] = len;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[(i, k)];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    d
}

/// `sum_{i<j} (|p_i - p_j| - L d_ij)^2 / d_ij^2`
pub fn kk_energy(positions: &[(f64, f64)], dist: &Matrix, edge_length: f64) -> f64 {
    let n = positions.len();
    let mut e = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist[(i, j)];
            let r = distance(positions[i], positions[j]);
            let diff = r - edge_length * d;
            e += diff * diff / (d * d);
        }
    }
    e
}

/// Analytic gradient of [`kk_energy`] with respect to every position.
pub fn kk_gradient(positions: &[(f64, f64)], dist: &Matrix, edge_length: f64) -> Vec<(f64, f64)> {
    (0..positions.len())
        .map(|m| vertex_gradient(positions, dist, edge_length, m))
        .collect()
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn vertex_gradient(p: &[(f64, f64)], dist: &Matrix, l: f64, m: usize) -> (f64, f64) {
    let (mut gx, mut gy) = (0.0, 0.0);
    for i in 0..p.len() {
        if i == m {
            continue;
        }
        let d = dist[(m, i)];
        let dx = p[m].0 - p[i].0;
        let dy = p[m].1 - p[i].1;
        let r = (dx * dx + dy * dy).sqrt().max(1e-12);
        let f = 2.0 * (r - l * d) / (d * d * r);
        gx += f * dx;
        gy += f * dy;
    }
    (gx, gy)
}

fn vertex_energy(p: &[(f64, f64)], dist: &Matrix, l: f64, m: usize, at: (f64, f64)) -> f64 {
    let mut e = 0.0;
    for i in 0..p.len() {
        if i == m {
            continue;
        }
        let d = dist[(m, i)];
        let diff = distance(at, p[i]) - l * d;
        e += diff * diff / (d * d);
    }
    e
}

fn vertex_hessian(p: &[(f64, f64)], dist: &Matrix, l: f64, m: usize) -> (f64, f64, f64) {
    let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
    for i in 0..p.len() {
        if i == m {
            continue;
        }
        let d = dist[(m, i)];
        let k = 2.0 / (d * d);
        let dx = p[m].0 - p[i].0;
        let dy = p[m].1 - p[i].1;
        let r = (dx * dx + dy * dy).sqrt().max(1e-12);
        let r3 = r * r * r;
        hxx += k * (1.0 - l * d * dy * dy / r3);
        hyy += k * (1.0 - l * d * dx * dx / r3);
        hxy += k * l * d * dx * dy / r3;
    }
    (hxx, hxy, hyy)
}

fn initial_circle(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / n as f64;
            let jitter = 0.05 * radius.max(0.5);
            (
                radius * angle.cos() + rng.gen_range(-jitter..=jitter),
                radius * angle.sin() + rng.gen_range(-jitter..=jitter),
            )
        })
        .collect()
}

struct ComponentLayout {
    positions: Vec<(f64, f64)>,
    initial_energy: f64,
    energy: f64,
    iterations: usize,
}

fn kk_component(
    dist: &Matrix,
    rng: &mut ChaCha8Rng,
    options: &KamadaKawaiOptions,
) -> Result<ComponentLayout> {
    let n = dist.rows();
    if n == 1 {
        return Ok(ComponentLayout {
            positions: vec![(0.0, 0.0)],
            initial_energy: 0.0,
            energy: 0.0,
            iterations: 0,
        });
    }
    let l = 1.0;
    let diameter = dist.as_slice().iter().copied().fold(0.0, f64::max);
    let mut p = initial_circle(n, 0.5 * diameter * l, rng);
    let initial_energy = kk_energy(&p, dist, l);
    let mut grads: Vec<(f64, f64)> = kk_gradient(&p, dist, l);

    let mut iterations = 0;
    while iterations < options.max_iterations {
        let (m, gnorm) = grads
            .iter()
            .enumerate()
            .map(|(i, g)| (i, g.0.hypot(g.1)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !gnorm.is_finite() {
            return Err(Error::NonFiniteEnergy {
                iteration: iterations,
                vertex: m,
            });
        }
        if gnorm < options.tol {
            break;
        }
        let g = grads[m];
        let (hxx, hxy, hyy) = vertex_hessian(&p, dist, l, m);
        let det = hxx * hyy - hxy * hxy;
        let newton = (det > 0.0 && hxx > 0.0).then(|| {
            (
                -(hyy * g.0 - hxy * g.1) / det,
                -(hxx * g.1 - hxy * g.0) / det,
            )
        });
        // gradient fallback scaled so the first trial moves about one unit
        let descent = (-g.0 / gnorm.max(1.0), -g.1 / gnorm.max(1.0));

        let before = vertex_energy(&p, dist, l, m, p[m]);
        let mut accepted = None;
        'search: for dir in newton.into_iter().chain(std::iter::once(descent)) {
            let mut step = 1.0;
            for _ in 0..40 {
                let cand = (p[m].0 + step * dir.0, p[m].1 + step * dir.1);
                let after = vertex_energy(&p, dist, l, m, cand);
                if !after.is_finite() {
                    return Err(Error::NonFiniteEnergy {
                        iteration: iterations,
                        vertex: m,
                    });
                }
                if after < before {
                    accepted = Some(cand);
                    break 'search;
                }
                step *= 0.5;
            }
        }
        let Some(cand) = accepted else {
            // no descent left at working precision
            break;
        };
        p[m] = cand;
        iterations += 1;
        for (i, g) in grads.iter_mut().enumerate() {
            *g = vertex_gradient(&p, dist, l, i);
        }
    }
    let energy = kk_energy(&p, dist, l);
    if !energy.is_finite() {
        return Err(Error::NonFiniteEnergy {
            iteration: iterations,
            vertex: 0,
        });
    }
    Ok(ComponentLayout {
        positions: p,
        initial_energy,
        energy,
        iterations,
    })
}

/// Places components left to right, largest first, wrapping rows, then
/// rescales everything uniformly into `[0.05, 0.95]^2`.
fn tile_and_rescale(n: usize, components: &[Vec<usize>], parts: &[Vec<(f64, f64)>]) -> Vec<(f64, f64)> {
    const GAP: f64 = 1.0;
    let boxes: Vec<(f64, f64, f64, f64)> = parts
        .iter()
        .map(|ps| {
            ps.iter().fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |b, &(x, y)| (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y)),
            )
        })
        .collect();
    let total_area: f64 = boxes
        .iter()
        .map(|b| (b.2 - b.0 + GAP) * (b.3 - b.1 + GAP))
        .sum();
    let widest = boxes.iter().map(|b| b.2 - b.0).fold(0.0, f64::max);
    let row_width = total_area.sqrt().max(widest);

    let mut out = vec![(0.0, 0.0); n];
    let (mut x, mut y, mut row_height) = (0.0f64, 0.0f64, 0.0f64);
    for ((members, ps), b) in components.iter().zip(parts).zip(&boxes) {
        let (w, h) = (b.2 - b.0, b.3 - b.1);
        if x > 0.0 && x + w > row_width {
            x = 0.0;
            y += row_height + GAP;
            row_height = 0.0;
        }
        for (&v, &(px, py)) in members.iter().zip(ps) {
            out[v] = (x + px - b.0, y + py - b.1);
        }
        x += w + GAP;
        row_height = row_height.max(h);
    }
    rescale_unit(&mut out);
    out
}

/// Uniform scale and center into `[0.05, 0.95]^2`.
fn rescale_unit(ps: &mut [(f64, f64)]) {
    if ps.is_empty() {
        return;
    }
    let (x0, y0, x1, y1) = ps.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |b, &(x, y)| (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y)),
    );
    let span = (x1 - x0).max(y1 - y0);
    if span <= 0.0 {
        ps.iter_mut().for_each(|p| *p = (0.5, 0.5));
        return;
    }
    let s = 0.9 / span;
    let ox = 0.05 + (0.9 - (x1 - x0) * s) / 2.0;
    let oy = 0.05 + (0.9 - (y1 - y0) * s) / 2.0;
    for p in ps.iter_mut() {
        *p = (
            (ox + (p.0 - x0) * s).clamp(0.05, 0.95),
            (oy + (p.1 - y0) * s).clamp(0.05, 0.95),
        );
    }
}

/// Kamada-Kawai layout; each connected component is laid out on its own.
pub fn layout_kamada_kawai(network: &SemanticNetwork, options: &KamadaKawaiOptions) -> Result<Layout> {
    let n = network.n_vertices();
    if n == 0 {
        return Err(Error::InvalidOption("cannot lay out an empty network".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let components = connected_components(network);
    let mut parts = Vec::with_capacity(components.len());
    let mut stress = 0.0;
    let mut initial_stress = 0.0;
    let mut iterations = 0;
    for members in &components {
        let dist = shortest_paths(network, members, options.distances);
        let c = kk_component(&dist, &mut rng, options)?;
        stress += c.energy;
        initial_stress += c.initial_energy;
        iterations += c.iterations;
        parts.push(c.positions);
    }
    Ok(Layout {
        positions: tile_and_rescale(n, &components, &parts),
        stress,
        initial_stress,
        iterations,
        seed: options.seed,
    })
}

/// Kamada-Kawai energy of arbitrary coordinates, in units of the mean edge
/// length, summed over components.
fn stress_of(network: &SemanticNetwork, positions: &[(f64, f64)]) -> f64 {
    let lengths: Vec<f64> = network
        .edges()
        .iter()
        .map(|e| distance(positions[e.u], positions[e.v]))
        .collect();
    if lengths.is_empty() {
        return 0.0;
    }
    let unit = lengths.iter().sum::<f64>() / lengths.len() as f64;
    if unit <= 0.0 {
        return 0.0;
    }
    connected_components(network)
        .iter()
        .map(|members| {
            let dist = shortest_paths(network, members, KkDistances::Hops);
            let local: Vec<(f64, f64)> = members
                .iter()
                .map(|&v| (positions[v].0 / unit, positions[v].1 / unit))
                .collect();
            kk_energy(&local, &dist, 1.0)
        })
        .sum()
}

/// Fruchterman-Reingold spring embedding with linear cooling.
pub fn layout_fruchterman_reingold(
    network: &SemanticNetwork,
    seed: u64,
    iterations: usize,
) -> Result<Layout> {
    let n = network.n_vertices();
    if n == 0 {
        return Err(Error::InvalidOption("cannot lay out an empty network".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<(f64, f64)> = initial_circle(n, 0.4, &mut rng)
        .into_iter()
        .map(|(x, y)| (x + 0.5, y + 0.5))
        .collect();
    if n == 1 {
        return Ok(Layout {
            positions: vec![(0.5, 0.5)],
            stress: 0.0,
            initial_stress: 0.0,
            iterations: 0,
            seed,
        });
    }
    let initial_stress = stress_of(network, &p);
    let k = (1.0 / n as f64).sqrt();
    let t0 = 0.1;
    for it in 0..iterations {
        let temperature = t0 * (1.0 - it as f64 / iterations as f64);
        let mut disp = vec![(0.0f64, 0.0f64); n];
        for i in 0..n {
            for j in i + 1..n {
                let mut dx = p[i].0 - p[j].0;
                let mut dy = p[i].1 - p[j].1;
                let mut d = (dx * dx + dy * dy).sqrt();
                if d < 1e-9 {
                    // coincident: separate along a fixed direction
                    dx = 1e-6 * (1 + i) as f64;
                    dy = 1e-6 * (1 + j) as f64;
                    d = (dx * dx + dy * dy).sqrt();
                }
                let f = k * k / d;
                disp[i].0 += dx / d * f;
                disp[i].1 += dy / d * f;
                disp[j].0 -= dx / d * f;
                disp[j].1 -= dy / d * f;
            }
        }
        for e in network.edges() {
            let dx = p[e.u].0 - p[e.v].0;
            let dy = p[e.u].1 - p[e.v].1;
            let d = (dx * dx + dy * dy).sqrt();
            if d < 1e-12 {
                continue;
            }
            let f = d * d / k;
            disp[e.u].0 -= dx / d * f;
            disp[e.u].1 -= dy / d * f;
            disp[e.v].0 += dx / d * f;
            disp[e.v].1 += dy / d * f;
        }
        for (pi, di) in p.iter_mut().zip(&disp) {
            let len = di.0.hypot(di.1);
            if len > 0.0 {
                let step = len.min(temperature);
                pi.0 += di.0 / len * step;
                pi.1 += di.1 / len * step;
            }
        }
    }
    if p.iter().any(|q| !q.0.is_finite() || !q.1.is_finite()) {
        return Err(Error::NonFiniteEnergy {
            iteration: iterations,
            vertex: 0,
        });
    }
    rescale_unit(&mut p);
    Ok(Layout {
        stress: stress_of(network, &p),
        initial_stress,
        positions: p,
        iterations,
        seed,
    })
}
