//! Weighted undirected graphs with the combinatorial structure the
//! synchronization machinery needs: canonical edge orientation, weighted
//! degrees, breadth-first spanning trees and fundamental cycle bases.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// An undirected edge stored with its canonical orientation `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// One entry of a vertex's neighbor list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub neighbor: usize,
    pub edge: usize,
    /// True when the owning vertex is the canonical tail `u` of the edge.
    pub outgoing: bool,
}

/// An edge traversed in a chosen direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: usize,
    /// Traversed `u → v` in canonical orientation when true.
    pub forward: bool,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Incidence>>,
    degrees: Vec<f64>,
    index: HashMap<(usize, usize), usize>,
}

impl WeightedGraph {
    /// Build a graph on `n` vertices. Edges may be given in either
    /// orientation; they are stored canonically with `u < v`, in input order.
    pub fn new(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut index = HashMap::with_capacity(edge_list.len());
        for &(a, b, w) in edge_list {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop { vertex: a });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonpositiveWeight { u, v, weight: w });
            }
            if index.insert((u, v), edges.len()).is_some() {
                return Err(Error::DuplicateEdge { u, v });
            }
            edges.push(Edge { u, v, weight: w });
        }

        let mut adjacency = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            adjacency[edge.u].push(Incidence { neighbor: edge.v, edge: e, outgoing: true });
            adjacency[edge.v].push(Incidence { neighbor: edge.u, edge: e, outgoing: false });
        }
        for list in &mut adjacency {
            list.sort_by_key(|inc| inc.neighbor);
        }
        let degrees = adjacency
            .iter()
            .map(|list| compensated_sum(list.iter().map(|inc| edges[inc.edge].weight)))
            .collect();

        Ok(Self { n, edges, adjacency, degrees, index })
    }

    /// Build a graph whose vertex count is one more than the largest id used.
    pub fn from_edges(edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        let n = edge_list.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(n, edge_list)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn neighbors(&self, vertex: usize) -> &[Incidence] {
        &self.adjacency[vertex]
    }

    pub fn degree(&self, vertex: usize) -> f64 {
        self.degrees[vertex]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Index of the undirected edge `{a, b}`, if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.index.get(&key).copied()
    }

    /// Same edges with new weights; every weight must be positive.
    pub fn with_weights(&self, weights: &[f64]) -> Result<WeightedGraph> {
        if weights.len() != self.m() {
            return Err(Error::dims(format!(
                "{} weights for {} edges",
                weights.len(),
                self.m()
            )));
        }
        let list: Vec<_> = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| (e.u, e.v, w))
            .collect();
        WeightedGraph::new(self.n, &list)
    }

    /// Same topology with the weights replaced. Edges whose new weight is
    /// zero are dropped; the surviving edges keep their relative order, and
    /// the returned map sends each new edge index to its original index.
    pub fn reweighted(&self, weights: &[f64]) -> Result<(WeightedGraph, Vec<usize>)> {
        if weights.len() != self.m() {
            return Err(Error::dims(format!(
                "{} weights for {} edges",
                weights.len(),
                self.m()
            )));
        }
        let mut list = Vec::with_capacity(self.m());
        let mut origin = Vec::with_capacity(self.m());
        for (e, (edge, &w)) in self.edges.iter().zip(weights).enumerate() {
            if w == 0.0 {
                continue;
            }
            list.push((edge.u, edge.v, w));
            origin.push(e);
        }
        Ok((WeightedGraph::new(self.n, &list)?, origin))
    }

    /// Induced subgraph on `vertices` (taken in the given order). Returns
    /// the subgraph and, for each of its edges, the index of the parent edge.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut list = Vec::new();
        let mut origin = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let (a, b) = (local[edge.u], local[edge.v]);
            if a != usize::MAX && b != usize::MAX {
                list.push((a, b, edge.weight));
                origin.push(e);
            }
        }
        let sub = WeightedGraph::new(vertices.len(), &list)
            .expect("induced subgraph of a valid graph is valid");
        (sub, origin)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || connected_components(self).iter().all(|&c| c == 0)
    }

    /// Endpoints `(from, to)` of an oriented edge.
    pub fn endpoints(&self, oe: OrientedEdge) -> (usize, usize) {
        let e = &self.edges[oe.edge];
        if oe.forward {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    /// Parent edge and parent vertex; `None` for the root and for vertices
    /// outside the root's component.
    pub parent: Vec<Option<(usize, usize)>>,
    pub tree_edge_mask: Vec<bool>,
    /// Vertices of the root's component in breadth-first order.
    pub order: Vec<usize>,
    pub depth: Vec<usize>,
}

impl SpanningTree {
    pub fn tree_edge_count(&self) -> usize {
        self.tree_edge_mask.iter().filter(|&&t| t).count()
    }

    pub fn reaches(&self, vertex: usize) -> bool {
        vertex == self.root || self.parent[vertex].is_some()
    }

    /// Oriented tree path from `from` to `to`.
    pub fn path(&self, g: &WeightedGraph, from: usize, to: usize) -> Vec<OrientedEdge> {
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (from, to);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (e, p) = self.parent[a].expect("vertex reached by tree");
                up.push(OrientedEdge { edge: e, forward: g.edge(e).u == a });
                a = p;
            } else {
                let (e, p) = self.parent[b].expect("vertex reached by tree");
                down.push(OrientedEdge { edge: e, forward: g.edge(e).u == p });
                b = p;
            }
        }
        up.extend(down.into_iter().rev());
        up
    }
}

/// Breadth-first spanning tree of `root`'s component, visiting neighbors in
/// ascending vertex order.
pub fn spanning_tree(g: &WeightedGraph, root: usize) -> Result<SpanningTree> {
    if root >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: root, n: g.n() });
    }
    let mut parent = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    let mut depth = vec![0; g.n()];
    let mut mask = vec![false; g.m()];
    let mut order = Vec::with_capacity(g.n());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for inc in g.neighbors(x) {
            if !seen[inc.neighbor] {
                seen[inc.neighbor] = true;
                parent[inc.neighbor] = Some((inc.edge, x));
                depth[inc.neighbor] = depth[x] + 1;
                mask[inc.edge] = true;
                queue.push_back(inc.neighbor);
            }
        }
    }
    Ok(SpanningTree { root, parent, tree_edge_mask: mask, order, depth })
}

#[derive(Debug, Clone)]
pub struct FundamentalCycle {
    pub edge: usize,
    /// Starts with the non-tree edge traversed `u → v`, closes through the tree back to `u`.
    pub path: Vec<OrientedEdge>,
}

#[derive(Debug, Clone, Default)]
pub struct CycleBasis {
    pub cycles: Vec<FundamentalCycle>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn non_tree_edges(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.edge).collect()
    }
}

pub fn cycle_basis(g: &WeightedGraph, tree: &SpanningTree) -> Result<CycleBasis> {
    if tree.order.len() != g.n() {
        return Err(Error::DisconnectedGraph);
    }
    let cycles = (0..g.m())
        .filter(|&e| !tree.tree_edge_mask[e])
        .map(|e| {
            let edge = g.edge(e);
            let mut path = vec![OrientedEdge { edge: e, forward: true }];
            path.extend(tree.path(g, edge.v, edge.u));
            FundamentalCycle { edge: e, path }
        })
        .collect();
    Ok(CycleBasis { cycles })
}

/// Component label per vertex, numbered from 0 in order of smallest member.
pub fn connected_components(g: &WeightedGraph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for inc in g.neighbors(x) {
                if label[inc.neighbor] == usize::MAX {
                    label[inc.neighbor] = next;
                    stack.push(inc.neighbor);
                }
            }
        }
        next += 1;
    }
    label
}

/// Group vertices by label; classes listed in label order, members ascending.
pub fn classes_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut classes = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        classes[l].push(v);
    }
    classes
}

/// Sum of full-graph degrees over `subset`.
pub fn volume(g: &WeightedGraph, subset: &[usize]) -> f64 {
    compensated_sum(subset.iter().map(|&v| g.degree(v)))
}
