//! Three-party W state across three fused chains.

use spinnet::dynamics::Simulator;
use spinnet::protocols::{w_phase, w_state};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("junction phase {:.9} rad", w_phase());
    for len in 3..=6 {
        let result = w_state(len)?;
        let sim = Simulator::new(&result.graph()?);
        let state = sim.run(&result.readout_protocol()?)?.last().cloned().unwrap();
        let n = result.network.n_sites();
        let sites = [1, 2 * len, 2 * len + 1];
        let pops: Vec<String> = sites.iter().map(|&s| format!("P{s}={:.6}", state.population(s))).collect();
        println!("{n:2} sites: {} fidelity {:.12}", pops.join(" "), result.merit_on(&sim)?);
    }
    Ok(())
}
