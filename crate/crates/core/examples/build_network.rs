//! Fuse three PST chains and show that the junctions leave the spectrum alone.

use spinnet::network::{chain_graph, ChainSpec, NetworkSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = NetworkSpec::new(vec![
        ChainSpec::new(4, 1.0)?,
        ChainSpec::new(4, 0.5)?,
        ChainSpec::new(4, 1.0)?,
    ])?;
    let graph = spec.graph()?;
    println!("{} sites, junctions at {:?}", graph.n_sites(), spec.junction_pairs());
    for (i, j, v) in graph.edges() {
        println!("  J({i},{j}) = {v:+.6}");
    }
    for (k, t) in spec.mirror_times().as_slice().iter().enumerate() {
        println!("chain {k}: t_m = {t:.6}");
    }

    let mut union: Vec<f64> = spec.chains().iter().flat_map(|c| chain_graph(c).spectrum()).collect();
    union.sort_by(f64::total_cmp);
    for (a, b) in graph.spectrum().iter().zip(&union) {
        println!("  {a:+.10}  {b:+.10}");
    }

    // the edge list round-trips
    let text = graph.to_edge_list();
    let back = spinnet::network::CouplingGraph::from_edge_list(&text)?;
    assert_eq!(back.to_matrix(), graph.to_matrix());
    Ok(())
}
