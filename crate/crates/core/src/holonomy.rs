//! Holonomy of edge potentials: path products, spanning-tree gauge fixing,
//! and the synchronizability decision from cycle-basis generators.

use crate::error::{Error, Result};
use crate::graph::{cycle_basis, spanning_tree, OrientedEdge, SpanningTree, WeightedGraph};
use crate::potentials::{EdgePotential, Mat, VertexPotential};

pub const DEFAULT_SYNC_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Generator {
    /// Non-tree edge index.
    pub edge: usize,
    pub matrix: Mat,
}

#[derive(Debug, Clone)]
pub struct HolonomyReport {
    pub base: usize,
    pub tree: SpanningTree,
    pub generators: Vec<Generator>,
    /// max over generators of ‖H − I‖_F.
    pub max_deviation: f64,
    pub synchronizable: bool,
    pub gauge: VertexPotential,
}

/// Ordered product ρ_{i0 i1} ρ_{i1 i2} ⋯ along an oriented path.
pub fn hol_path(g: &WeightedGraph, rho: &EdgePotential, path: &[OrientedEdge]) -> Result<Mat> {
    let d = rho.d();
    let mut product = Mat::identity(d, d);
    let mut at = None;
    for (step, &oe) in path.iter().enumerate() {
        let (from, to) = g.endpoints(oe);
        if at.is_some_and(|v| v != from) {
            return Err(Error::BrokenPath { step });
        }
        product *= rho.oriented(oe.edge, oe.forward);
        at = Some(to);
    }
    Ok(product)
}

/// Vertex potential with `f_root = I` and `f_j = ρ_ji f_i` along tree edges,
/// so that the gauge-transformed potential is the identity on the tree.
pub fn tree_gauge(g: &WeightedGraph, rho: &EdgePotential, tree: &SpanningTree) -> Result<VertexPotential> {
    rho.check_graph(g)?;
    if tree.order.len() != g.n() {
        return Err(Error::DisconnectedGraph);
    }
    let d = rho.d();
    let mut f = VertexPotential::identity(g.n(), d);
    for &j in tree.order.iter().skip(1) {
        let (e, i) = tree.parent[j].expect("non-root vertex has a parent");
        // ρ_ji f_i
        let value = rho.oriented(e, g.edge(e).u == j) * f.get(i);
        f.set(j, &value);
    }
    Ok(f)
}

/// Holonomy generators in the breadth-first tree gauge rooted at `base`.
pub fn holonomy_generators_at(
    g: &WeightedGraph,
    rho: &EdgePotential,
    base: usize,
    sync_tol: f64,
) -> Result<HolonomyReport> {
    rho.check_graph(g)?;
    let tree = spanning_tree(g, base)?;
    let basis = cycle_basis(g, &tree)?;
    let gauge = tree_gauge(g, rho, &tree)?;
    let d = rho.d();
    let ident = Mat::identity(d, d);
    let generators: Vec<Generator> = basis
        .cycles
        .iter()
        .map(|c| {
            let edge = g.edge(c.edge);
            let matrix = gauge.get(edge.u).tr_mul(&(rho.block(c.edge) * gauge.get(edge.v)));
            Generator { edge: c.edge, matrix }
        })
        .collect();
    let max_deviation = generators
        .iter()
        .map(|h| (&h.matrix - &ident).norm())
        .fold(0.0, f64::max);
    Ok(HolonomyReport {
        base,
        tree,
        generators,
        max_deviation,
        synchronizable: max_deviation <= sync_tol,
        gauge,
    })
}

pub fn holonomy_generators(g: &WeightedGraph, rho: &EdgePotential) -> Result<HolonomyReport> {
    if g.n() == 0 {
        return Err(Error::DisconnectedGraph);
    }
    holonomy_generators_at(g, rho, 0, DEFAULT_SYNC_TOL)
}

/// Synchronizability flag and the largest generator deviation.
pub fn is_synchronizable(g: &WeightedGraph, rho: &EdgePotential, sync_tol: f64) -> Result<(bool, f64)> {
    if g.n() == 0 {
        return Err(Error::DisconnectedGraph);
    }
    let report = holonomy_generators_at(g, rho, 0, sync_tol)?;
    Ok((report.synchronizable, report.max_deviation))
}

/// Edge potential that is the identity on tree edges and takes the given
/// values (one per fundamental cycle, in edge order) on non-tree edges.
pub fn potential_from_generators(
    g: &WeightedGraph,
    tree: &SpanningTree,
    generators: &[Mat],
) -> Result<EdgePotential> {
    let non_tree: Vec<usize> = (0..g.m()).filter(|&e| !tree.tree_edge_mask[e]).collect();
    if non_tree.len() != generators.len() {
        return Err(Error::dims(format!(
            "{} generators for {} non-tree edges",
            generators.len(),
            non_tree.len()
        )));
    }
    let d = generators.first().map_or(1, |h| h.nrows());
    let mut rho = EdgePotential::identity(g, d);
    for (&e, h) in non_tree.iter().zip(generators) {
        if h.shape() != (d, d) {
            return Err(Error::dims(format!("generator for edge {e} is not {d}x{d}")));
        }
        rho.set_block(e, h.clone());
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_basis;
    use crate::netgen::random_orthogonal;
    use crate::potentials::{gauge_act, potential_from_vertex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
    }

    /// Square with identity on 0→1→2→3 and ρ_30 = r.
    fn square_with_loop(r: &Mat) -> (WeightedGraph, EdgePotential) {
        let g = square();
        let mut rho = EdgePotential::identity(&g, r.nrows());
        let e = g.edge_index(3, 0).unwrap();
        rho.set_block(e, r.transpose());
        (g, rho)
    }

    fn wheel(n: usize) -> WeightedGraph {
        let mut list: Vec<_> = (1..n).map(|i| (0, i, 1.0 + i as f64 * 0.1)).collect();
        for i in 1..n {
            list.push((i, if i + 1 < n { i + 1 } else { 1 }, 0.5));
        }
        WeightedGraph::from_edges(&list).unwrap()
    }

    fn random_vp(n: usize, d: usize, rng: &mut ChaCha8Rng) -> VertexPotential {
        let blocks: Vec<Mat> = (0..n).map(|_| random_orthogonal(d, rng)).collect();
        VertexPotential::from_blocks(d, &blocks).unwrap()
    }

    fn random_ep(g: &WeightedGraph, d: usize, rng: &mut ChaCha8Rng) -> EdgePotential {
        EdgePotential::new(d, (0..g.m()).map(|_| random_orthogonal(d, rng)).collect()).unwrap()
    }

    #[test]
    fn path_holonomy_basics() {
        let g = wheel(6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_ep(&g, 3, &mut rng);
        assert_eq!(hol_path(&g, &rho, &[]).unwrap(), Mat::identity(3, 3));

        let tree = spanning_tree(&g, 2).unwrap();
        let path = tree.path(&g, 2, 4);
        let mut there_and_back = path.clone();
        there_and_back.extend(path.iter().rev().map(|oe| OrientedEdge { edge: oe.edge, forward: !oe.forward }));
        assert!((hol_path(&g, &rho, &there_and_back).unwrap() - Mat::identity(3, 3)).norm() < 1e-12);

        let broken = [
            OrientedEdge { edge: g.edge_index(0, 1).unwrap(), forward: true },
            OrientedEdge { edge: g.edge_index(3, 4).unwrap(), forward: true },
        ];
        assert!(matches!(hol_path(&g, &rho, &broken), Err(Error::BrokenPath { step: 1 })));
    }

    #[test]
    fn square_loop_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_orthogonal(3, &mut rng);
        let (g, rho) = square_with_loop(&r);
        let path: Vec<_> = [(0, 1), (1, 2), (2, 3), (3, 0)]
            .iter()
            .map(|&(a, b)| {
                let e = g.edge_index(a, b).unwrap();
                OrientedEdge { edge: e, forward: g.edge(e).u == a }
            })
            .collect();
        assert!((hol_path(&g, &rho, &path).unwrap() - &r).norm() < 1e-14);

        let report = holonomy_generators(&g, &rho).unwrap();
        assert_eq!(report.generators.len(), 1);
        let dev = (&r - Mat::identity(3, 3)).norm();
        assert!((report.max_deviation - dev).abs() < 1e-12);
        assert!(!report.synchronizable);
    }

    #[test]
    fn concatenation_law() {
        let g = wheel(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_ep(&g, 2, &mut rng);
        let tree = spanning_tree(&g, 0).unwrap();
        for _ in 0..20 {
            let (a, b, c) = (rng.random_range(0..7), rng.random_range(0..7), rng.random_range(0..7));
            let p = tree.path(&g, a, b);
            let q = tree.path(&g, b, c);
            let mut pq = p.clone();
            pq.extend(&q);
            let lhs = hol_path(&g, &rho, &pq).unwrap();
            let rhs = hol_path(&g, &rho, &p).unwrap() * hol_path(&g, &rho, &q).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn tree_gauge_examples() {
        let g = wheel(6);
        let tree = spanning_tree(&g, 0).unwrap();
        let f = tree_gauge(&g, &EdgePotential::identity(&g, 2), &tree).unwrap();
        assert_eq!(f, VertexPotential::identity(6, 2));

        let path = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let rho = EdgePotential::new(1, vec![Mat::from_element(1, 1, -1.0); 2]).unwrap();
        let t = spanning_tree(&path, 0).unwrap();
        let f = tree_gauge(&path, &rho, &t).unwrap();
        let values: Vec<f64> = (0..3).map(|i| f.get(i)[(0, 0)]).collect();
        assert_eq!(values, vec![1.0, -1.0, 1.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gv = random_vp(6, 3, &mut rng);
        let rho = potential_from_vertex(&g, &gv).unwrap();
        let f = tree_gauge(&g, &rho, &tree).unwrap();
        for i in 0..6 {
            let expect = gv.get(i) * gv.get(0).transpose();
            assert!((f.get(i) - expect).norm() < 1e-12);
        }
        let fixed = gauge_act(&g, &f, &rho).unwrap();
        for e in 0..g.m() {
            assert!((fixed.block(e) - Mat::identity(3, 3)).norm() < 1e-12);
        }
    }

    #[test]
    fn tree_gauge_rejects_forest() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let tree = spanning_tree(&g, 0).unwrap();
        assert!(matches!(
            tree_gauge(&g, &EdgePotential::identity(&g, 1), &tree),
            Err(Error::DisconnectedGraph)
        ));
        assert!(matches!(
            is_synchronizable(&g, &EdgePotential::identity(&g, 1), 1e-8),
            Err(Error::DisconnectedGraph)
        ));
    }

    #[test]
    fn synchronizable_recovers_identity_generators() {
        let g = wheel(8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gv = random_vp(8, 4, &mut rng);
        let rho = potential_from_vertex(&g, &gv).unwrap();
        let report = holonomy_generators(&g, &rho).unwrap();
        assert_eq!(report.generators.len(), g.m() - g.n() + 1);
        assert!(report.max_deviation < 1e-10);
        assert!(report.synchronizable);
        let fixed = gauge_act(&g, &report.gauge, &rho).unwrap();
        for e in 0..g.m() {
            assert!((fixed.block(e) - Mat::identity(4, 4)).norm() < 1e-8);
        }
    }

    #[test]
    fn tree_graph_is_always_synchronizable() {
        let g = WeightedGraph::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 2.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_ep(&g, 3, &mut rng);
        let report = holonomy_generators(&g, &rho).unwrap();
        assert!(report.generators.is_empty());
        assert!(report.synchronizable);
    }

    #[test]
    fn identity_and_sign_square() {
        let g = square();
        let (ok, dev) = is_synchronizable(&g, &EdgePotential::identity(&g, 2), 1e-8).unwrap();
        assert!(ok);
        assert_eq!(dev, 0.0);

        let (g, rho) = square_with_loop(&Mat::from_element(1, 1, -1.0));
        let (ok, dev) = is_synchronizable(&g, &rho, 1e-8).unwrap();
        assert!(!ok);
        assert_eq!(dev, 2.0);
    }

    #[test]
    fn generators_round_trip() {
        let g = wheel(7);
        let tree = spanning_tree(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = g.m() - g.n() + 1;
        let hs: Vec<Mat> = (0..k).map(|_| random_orthogonal(3, &mut rng)).collect();
        let rho = potential_from_generators(&g, &tree, &hs).unwrap();
        let report = holonomy_generators(&g, &rho).unwrap();
        for (gen, h) in report.generators.iter().zip(&hs) {
            assert!((&gen.matrix - h).norm() < 1e-14);
        }
        let ident = potential_from_generators(&g, &tree, &vec![Mat::identity(3, 3); k]).unwrap();
        assert_eq!(ident, EdgePotential::identity(&g, 3));
    }

    #[test]
    fn generator_conjugate_to_cycle_product() {
        let g = wheel(6);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_ep(&g, 3, &mut rng);
        let report = holonomy_generators(&g, &rho).unwrap();
        let basis = cycle_basis(&g, &report.tree).unwrap();
        for (c, gen) in basis.cycles.iter().zip(&report.generators) {
            let u = g.edge(c.edge).u;
            let fu = report.gauge.get(u);
            let product = hol_path(&g, &rho, &c.path).unwrap();
            assert!((fu.transpose() * product * &fu - &gen.matrix).norm() < 1e-12);
        }
    }

    #[test]
    fn decision_is_gauge_and_base_invariant() {
        let g = wheel(9);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..10 {
            let rho = if trial % 2 == 0 {
                potential_from_vertex(&g, &random_vp(9, 3, &mut rng)).unwrap()
            } else {
                random_ep(&g, 3, &mut rng)
            };
            let h = random_vp(9, 3, &mut rng);
            let (flag, dev) = is_synchronizable(&g, &rho, 1e-8).unwrap();
            let (flag2, dev2) = is_synchronizable(&g, &gauge_act(&g, &h, &rho).unwrap(), 1e-8).unwrap();
            assert_eq!(flag, flag2);
            assert!((dev - dev2).abs() < 1e-10);
            for base in 0..9 {
                let r = holonomy_generators_at(&g, &rho, base, 1e-8).unwrap();
                assert_eq!(r.synchronizable, flag);
            }
        }
    }
}
