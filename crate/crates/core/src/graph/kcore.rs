use super::SemanticNetwork;

/// Core number of every vertex (unweighted degree), by bucket-ordered
/// peeling in O(n + m).
pub fn k_core(network: &SemanticNetwork) -> Vec<usize> {
    let adj = network.adjacency();
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // bin[d] = first slot of degree d in `order`
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    {
        let mut next = bin.clone();
        for v in 0..n {
            pos[v] = next[degree[v]];
            order[pos[v]] = v;
            next[degree[v]] += 1;
        }
    }

    for i in 0..n {
        let v = order[i];
        for &u in &adj[v] {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Vertex};

    fn graph(n: usize, edges: &[(usize, usize)]) -> SemanticNetwork {
        SemanticNetwork::new(
            (0..n).map(|i| Vertex::new(i.to_string())).collect(),
            edges.iter().map(|&(u, v)| Edge { u, v, weight: 1.0 }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn small_graphs() {
        assert_eq!(k_core(&graph(3, &[(0, 1), (1, 2), (0, 2)])), vec![2, 2, 2]);
        assert_eq!(k_core(&graph(3, &[(0, 1), (1, 2)])), vec![1, 1, 1]);
        let k4_pendant = graph(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]);
        assert_eq!(k_core(&k4_pendant), vec![3, 3, 3, 3, 1]);
        assert_eq!(k_core(&graph(2, &[])), vec![0, 0]);
        assert!(k_core(&graph(0, &[])).is_empty());
    }
}
