//! Weighted graphs, spanning trees, cycle bases and the graph file format.
//!
//!     cargo run --example graph_basics

use sync_geom::graph::{connected_components, cycle_basis, spanning_tree, volume};
use sync_geom::io::{format_graph, parse_graph};
use sync_geom::{Result, WeightedGraph};

fn main() -> Result<()> {
    // a triangle glued to a square along vertex 2
    let g = WeightedGraph::from_edges(&[
        (0, 1, 1.0),
        (1, 2, 2.0),
        (0, 2, 1.5),
        (2, 3, 1.0),
        (3, 4, 1.0),
        (4, 5, 0.5),
        (2, 5, 1.0),
    ])?;
    println!("n = {}, m = {}, connected = {}", g.n(), g.m(), g.is_connected());
    for v in 0..g.n() {
        println!("  deg({v}) = {}", g.degree(v));
    }
    println!("vol({{0,1,2}}) = {}", volume(&g, &[0, 1, 2]));

    let tree = spanning_tree(&g, 0)?;
    let basis = cycle_basis(&g, &tree)?;
    println!("spanning tree: {} edges, cycle rank {}", tree.tree_edge_count(), basis.len());
    for c in &basis.cycles {
        let e = g.edge(c.edge);
        let walk: Vec<String> = c
            .path
            .iter()
            .map(|oe| {
                let (a, b) = g.endpoints(*oe);
                format!("{a}->{b}")
            })
            .collect();
        println!("  cycle closed by ({}, {}): {}", e.u, e.v, walk.join(" "));
    }

    let (sub, parent) = g.induced_subgraph(&[0, 1, 3, 4]);
    println!("induced on {{0,1,3,4}}: parent edges {parent:?}, components {:?}", connected_components(&sub));

    let text = format_graph(&g);
    print!("\n{text}");
    let back = parse_graph(&text, "inline")?;
    assert_eq!(back.edges(), g.edges());
    Ok(())
}
