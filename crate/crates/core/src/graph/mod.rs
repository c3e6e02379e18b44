//! The semantic network: words as vertices, cosine similarities as
//! undirected weighted edges.

mod kcore;
mod layout;

pub use kcore::k_core;
pub use layout::{
    connected_components, kk_energy, kk_gradient, layout_fruchterman_reingold,
    layout_kamada_kawai, shortest_paths, KamadaKawaiOptions, KkDistances, Layout,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::factors::FrameAssignment;
use crate::matrix::SimilarityMatrix;

pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub label: String,
    pub frequency: u64,
    /// 1-based frame index
    pub frame: Option<usize>,
    pub core: Option<usize>,
    /// unit-square coordinates
    pub position: Option<(f64, f64)>,
    /// display size
    pub size: Option<f64>,
    /// palette class
    pub color: Option<usize>,
}

impl Vertex {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            frequency: 0,
            frame: None,
            core: None,
            position: None,
            size: None,
            color: None,
        }
    }
}

/// Undirected edge between 0-based vertex indices, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SemanticNetwork {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl SemanticNetwork {
    /// Canonicalizes edges to `u < v` sorted order. Rejects self-loops,
    /// duplicates, out-of-range endpoints and non-positive weights.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let n = vertices.len();
        let mut seen = BTreeMap::new();
        for e in edges {
            let (u, v) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
            if v >= n {
                return Err(Error::InvalidOption(format!(
                    "edge {}-{} references a missing vertex",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidOption(format!("self-loop at vertex {}", u + 1)));
            }
            if !e.weight.is_finite() || e.weight <= 0.0 {
                return Err(Error::InvalidOption(format!(
                    "edge {}-{} has non-positive weight {}",
                    u + 1,
                    v + 1,
                    e.weight
                )));
            }
            if seen.insert((u, v), e.weight).is_some() {
                return Err(Error::InvalidOption(format!(
                    "duplicate edge {}-{}",
                    u + 1,
                    v + 1
                )));
            }
        }
        let edges = seen
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut [Vertex] {
        &mut self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// Copies coordinates from a layout onto the vertices.
    pub fn apply_layout(&mut self, layout: &Layout) {
        for (v, &p) in self.vertices.iter_mut().zip(&layout.positions) {
            v.position = Some(p);
        }
    }
}

/// One vertex per word, one edge per pair with positive cosine. Frequencies
/// and frames are looked up by word label.
pub fn build_network(
    cosine: &SimilarityMatrix,
    frequencies: &BTreeMap<String, u64>,
    frames: Option<&FrameAssignment>,
) -> SemanticNetwork {
    let vertices = cosine
        .labels()
        .iter()
        .map(|w| Vertex {
            frequency: frequencies.get(w).copied().unwrap_or(0),
            frame: frames.and_then(|f| f.frame_of(w)).map(|wf| wf.frame),
            ..Vertex::new(w.clone())
        })
        .collect();
    let n = cosine.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = cosine.get(u, v);
            if w > 0.0 {
                edges.push(Edge { u, v, weight: w });
            }
        }
    }
    SemanticNetwork { vertices, edges }
}

/// Removes edges with weight strictly below `min_weight`; vertices stay.
pub fn threshold_edges(network: &SemanticNetwork, min_weight: f64) -> SemanticNetwork {
    SemanticNetwork {
        vertices: network.vertices.clone(),
        edges: network
            .edges
            .iter()
            .filter(|e| e.weight >= min_weight)
            .copied()
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StyleOptions {
    pub size_min: f64,
    pub size_max: f64,
}

impl Default for StyleOptions {
    fn default() -> Self {
        Self {
            size_min: 4.0,
            size_max: 14.0,
        }
    }
}

/// Which vertex attribute drives the color class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorBy {
    /// factor frame; words without a frame get class 0
    Frame,
    /// k-core number
    Core,
}

/// Vertex sizes grow with log frequency; colors follow frames (or cores).
pub fn style(
    network: &SemanticNetwork,
    layout: &Layout,
    options: &StyleOptions,
    color_by: ColorBy,
) -> SemanticNetwork {
    let mut out = network.clone();
    out.apply_layout(layout);
    let f_max = network.vertices.iter().map(|v| v.frequency).max().unwrap_or(0);
    let denom = (1.0 + f_max as f64).ln();
    for v in &mut out.vertices {
        let share = if denom > 0.0 {
            (1.0 + v.frequency as f64).ln() / denom
        } else {
            0.0
        };
        v.size = Some(options.size_min + (options.size_max - options.size_min) * share);
        v.color = Some(match color_by {
            ColorBy::Frame => v.frame.unwrap_or(0),
            ColorBy::Core => v.core.unwrap_or(0),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::matrix::SimilarityKind;
    use proptest::prelude::*;

    fn cos(values: &[[f64; 3]]) -> SimilarityMatrix {
        SimilarityMatrix::new(
            SimilarityKind::Cosine,
            vec!["a".into(), "b".into(), "c".into()],
            Matrix::from_rows(values),
        )
        .unwrap()
    }

    #[test]
    fn build_from_zero_cosines() {
        let net = build_network(
            &cos(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            &BTreeMap::new(),
            None,
        );
        assert_eq!(net.n_vertices(), 3);
        assert_eq!(net.n_edges(), 0);
    }

    #[test]
    fn build_single_edge_without_loops() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let freq = BTreeMap::from([("a".to_string(), 3u64)]);
        let net = build_network(&cos(&[[1.0, h, 0.0], [h, 1.0, 0.0], [0.0, 0.0, 1.0]]), &freq, None);
        assert_eq!(net.edges(), &[Edge { u: 0, v: 1, weight: h }]);
        assert_eq!(net.vertices()[0].frequency, 3);
        assert_eq!(net.vertices()[1].frequency, 0);
    }

    #[test]
    fn threshold_boundary() {
        let net = SemanticNetwork::new(
            vec![Vertex::new("a"), Vertex::new("b"), Vertex::new("c")],
            vec![
                Edge { u: 0, v: 1, weight: 0.15 },
                Edge { u: 1, v: 2, weight: 0.2 },
            ],
        )
        .unwrap();
        let t = threshold_edges(&net, DEFAULT_THRESHOLD);
        assert_eq!(t.edges(), &[Edge { u: 1, v: 2, weight: 0.2 }]);
        assert_eq!(t.n_vertices(), 3);
        assert_eq!(threshold_edges(&net, 0.0), net);
    }

    #[test]
    fn new_rejects_bad_edges() {
        let vs = || vec![Vertex::new("a"), Vertex::new("b")];
        assert!(SemanticNetwork::new(vs(), vec![Edge { u: 0, v: 0, weight: 1.0 }]).is_err());
        assert!(SemanticNetwork::new(vs(), vec![Edge { u: 0, v: 5, weight: 1.0 }]).is_err());
        assert!(SemanticNetwork::new(vs(), vec![Edge { u: 0, v: 1, weight: 0.0 }]).is_err());
        assert!(SemanticNetwork::new(
            vs(),
            vec![Edge { u: 0, v: 1, weight: 0.5 }, Edge { u: 1, v: 0, weight: 0.5 }]
        )
        .is_err());
        let net = SemanticNetwork::new(vs(), vec![Edge { u: 1, v: 0, weight: 0.5 }]).unwrap();
        assert_eq!((net.edges()[0].u, net.edges()[0].v), (0, 1));
    }

    #[test]
    fn style_sizes_and_colors() {
        let mut vs = vec![Vertex::new("a"), Vertex::new("b"), Vertex::new("c")];
        vs[0].frequency = 10;
        vs[0].frame = Some(2);
        vs[1].frame = Some(2);
        vs[2].core = Some(1);
        let net = SemanticNetwork::new(vs, vec![]).unwrap();
        let layout = Layout {
            positions: vec![(0.1, 0.1), (0.5, 0.5), (0.9, 0.9)],
            stress: 0.0,
            initial_stress: 0.0,
            iterations: 0,
            seed: 1,
        };
        let opts = StyleOptions { size_min: 2.0, size_max: 10.0 };
        let s = style(&net, &layout, &opts, ColorBy::Frame);
        assert_eq!(s.vertices()[0].size, Some(10.0));
        assert_eq!(s.vertices()[1].size, Some(2.0));
        assert_eq!(s.vertices()[0].color, s.vertices()[1].color);
        assert_eq!(s.vertices()[2].color, Some(0));
        assert_eq!(s.vertices()[2].position, Some((0.9, 0.9)));
        let s = style(&net, &layout, &opts, ColorBy::Core);
        assert_eq!(s.vertices()[2].color, Some(1));
    }

    fn arb_network() -> impl Strategy<Value = SemanticNetwork> {
        (2usize..12).prop_flat_map(|n| {
            proptest::collection::vec(0.01f64..1.0, n * (n - 1) / 2).prop_map(move |ws| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if ws[k] > 0.3 {
                            edges.push(Edge { u, v, weight: ws[k] });
                        }
                        k += 1;
                    }
                }
                SemanticNetwork::new((0..n).map(|i| Vertex::new(format!("w{i}"))).collect(), edges)
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn threshold_idempotent_and_monotone(net in arb_network(), t in 0.0f64..1.0, dt in 0.0f64..0.5) {
            let once = threshold_edges(&net, t);
            prop_assert_eq!(threshold_edges(&once, t), once.clone());
            prop_assert!(threshold_edges(&net, t + dt).n_edges() <= once.n_edges());
        }

        #[test]
        fn cores_ignore_weights(net in arb_network(), scale in 0.01f64..1.0) {
            let reweighted = SemanticNetwork::new(
                net.vertices().to_vec(),
                net.edges().iter().map(|e| Edge { weight: (e.weight * scale).max(1e-6), ..*e }).collect(),
            ).unwrap();
            prop_assert_eq!(k_core(&net), k_core(&reweighted));
        }
    }
}
