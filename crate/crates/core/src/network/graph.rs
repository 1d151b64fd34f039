use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::SparseSymmetric;
use crate::Real;

/// A finite connected resistor network `(V, E, c)` with base vertex `o`.
///
/// Vertices are numbered in order of first appearance: the base first, then
/// the endpoints of each edge as listed.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T = f64> {
    name: String,
    vertices: Vec<String>,
    edges: Vec<(usize, usize, T)>,
    base: usize,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, T)>>,
}

impl<T: Real> Network<T> {
    pub fn new(name: impl Into<String>, base: &str, edges: Vec<(String, String, T)>) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut index = HashMap::new();
        let mut intern = |label: &str, vertices: &mut Vec<String>| -> Result<usize> {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInput(format!(
                    "vertex label `{label}` is empty or contains whitespace"
                )));
            }
            Ok(*index.entry(label.to_string()).or_insert_with(|| {
                vertices.push(label.to_string());
                vertices.len() - 1
            }))
        };
        intern(base, &mut vertices)?;

        let mut seen = HashSet::new();
        let mut indexed = Vec::with_capacity(edges.len());
        for (u, v, c) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(c.is_finite() && c > T::zero()) {
                return Err(Error::NonpositiveConductance {
                    u,
                    v,
                    value: c.as_f64(),
                });
            }
            let (i, j) = (intern(&u, &mut vertices)?, intern(&v, &mut vertices)?);
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            indexed.push((i, j, c));
        }

        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(i, j, c) in &indexed {
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        let net = Self {
            name: name.into(),
            vertices,
            edges: indexed,
            base: 0,
            index,
            adjacency,
        };
        if !net.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(net)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![self.base];
        seen[self.base] = true;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `(u, v, c_uv)` by vertex index, each undirected edge once.
    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn base_label(&self) -> &str {
        &self.vertices[self.base]
    }

    pub fn label(&self, x: usize) -> &str {
        &self.vertices[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, T)] {
        &self.adjacency[x]
    }

    /// `c(x) = Σ_{y∼x} c_xy`.
    pub fn total_conductance(&self, x: usize) -> T {
        self.adjacency[x].iter().map(|&(_, c)| c).sum()
    }

    /// The graph Laplacian on all of `V`.
    pub fn laplacian(&self) -> SparseSymmetric<T> {
        let n = self.vertex_count();
        let entries = self
            .edges
            .iter()
            .flat_map(|&(i, j, c)| [(i, i, c), (j, j, c), (i, j, -c)]);
        SparseSymmetric::assemble(n, entries).expect("edge indices are in range")
    }

    /// `δ_x` as a vertex function.
    pub fn delta(&self, x: usize) -> Vec<T> {
        let mut d = vec![T::zero(); self.vertex_count()];
        d[x] = T::one();
        d
    }

    /// Edges with labels, in stored order.
    pub fn labelled_edges(&self) -> impl Iterator<Item = (&str, &str, T)> + '_ {
        self.edges
            .iter()
            .map(|&(i, j, c)| (self.vertices[i].as_str(), self.vertices[j].as_str(), c))
    }
}

/// `(Δu)(x) = Σ_{y∼x} c_xy (u(x) − u(y))`.
pub fn laplacian_apply<T: Real>(n: &Network<T>, u: &[T]) -> Vec<T> {
    assert_eq!(u.len(), n.vertex_count(), "vertex function has wrong length");
    (0..u.len())
        .map(|x| n.neighbors(x).iter().map(|&(y, c)| c * (u[x] - u[y])).sum())
        .collect()
}

/// `⟨u, v⟩_E = ½ Σ_x Σ_{y∼x} c_xy (u(x) − u(y))(v(x) − v(y))`.
pub fn energy_inner<T: Real>(n: &Network<T>, u: &[T], v: &[T]) -> T {
    assert_eq!(u.len(), n.vertex_count(), "vertex function has wrong length");
    assert_eq!(v.len(), n.vertex_count(), "vertex function has wrong length");
    n.edges()
        .iter()
        .map(|&(x, y, c)| c * (u[x] - u[y]) * (v[x] - v[y]))
        .sum()
}

fn unit_edges<T: Real>(pairs: impl IntoIterator<Item = (String, String)>) -> Vec<(String, String, T)> {
    pairs.into_iter().map(|(u, v)| (u, v, T::one())).collect()
}

/// `0 – 1 – … – (n−1)`, unit conductances, base `0`.
pub fn path<T: Real>(n: usize) -> Result<Network<T>> {
    Network::new(
        format!("path{n}"),
        "0",
        unit_edges((1..n).map(|i| ((i - 1).to_string(), i.to_string()))),
    )
}

/// Center `0` joined to leaves `1..=k` with the given conductances, base `0`.
pub fn star<T: Real>(conductances: &[T]) -> Result<Network<T>> {
    let edges = conductances
        .iter()
        .enumerate()
        .map(|(i, &c)| ("0".to_string(), (i + 1).to_string(), c))
        .collect();
    Network::new(format!("star{}", conductances.len()), "0", edges)
}

/// `n × n` grid with vertices `i.j`, unit conductances, base `0.0`.
pub fn lattice2d<T: Real>(n: usize) -> Result<Network<T>> {
    let label = |i: usize, j: usize| format!("{i}.{j}");
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                pairs.push((label(i, j), label(i + 1, j)));
            }
            if j + 1 < n {
                pairs.push((label(i, j), label(i, j + 1)));
            }
        }
    }
    Network::new(format!("lattice{n}"), "0.0", unit_edges(pairs))
}

/// Binary tree of the given depth in heap numbering (root `1`, children of
/// `k` are `2k`, `2k+1`). Edges from depth `ℓ` to `ℓ+1` carry conductance
/// `ratio^ℓ`. Base is the root.
pub fn binary_tree<T: Real>(depth: usize, ratio: T) -> Result<Network<T>> {
    let mut edges = Vec::new();
    for level in 0..depth {
        let c = ratio.powi(level as i32);
        for k in (1usize << level)..(1usize << (level + 1)) {
            for child in [2 * k, 2 * k + 1] {
                edges.push((k.to_string(), child.to_string(), c));
            }
        }
    }
    Network::new(format!("binary_tree{depth}"), "1", edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: &str, v: &str, c: f64) -> (String, String, f64) {
        (u.into(), v.into(), c)
    }

    #[test]
    fn validation_errors() {
        let err = |edges| Network::new("n", "a", edges).unwrap_err().name();
        assert_eq!(err(vec![edge("a", "a", 1.0)]), "SelfLoop");
        assert_eq!(err(vec![edge("a", "b", -1.0)]), "NonpositiveConductance");
        assert_eq!(err(vec![edge("a", "b", 1.0), edge("b", "a", 2.0)]), "DuplicateEdge");
        assert_eq!(err(vec![edge("a", "b", 1.0), edge("c", "d", 1.0)]), "NotConnected");
    }

    #[test]
    fn p3_laplacian_of_dipole() {
        let p3 = path::<f64>(3).unwrap();
        assert_eq!(laplacian_apply(&p3, &[0.0, 1.0, 1.0]), vec![-1.0, 1.0, 0.0]);
        assert_eq!(laplacian_apply(&p3, &[4.0, 4.0, 4.0]), vec![0.0; 3]);
        assert_eq!(energy_inner(&p3, &[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]), 1.0);
    }

    #[test]
    fn star_center_conductance() {
        let s = star(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(laplacian_apply(&s, &s.delta(0))[0], 6.0);
        assert_eq!(s.total_conductance(0), 6.0);
    }

    #[test]
    fn generator_sizes() {
        assert_eq!(lattice2d::<f64>(3).unwrap().edges().len(), 12);
        let t = binary_tree(3, 2.0).unwrap();
        assert_eq!(t.vertex_count(), 15);
        assert_eq!(t.total_conductance(t.index_of("2").unwrap()), 1.0 + 2.0 * 2.0);
    }
}
