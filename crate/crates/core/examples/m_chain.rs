//! Routing along M fused chains with a flip at every junction.

use spinnet::dynamics::Simulator;
use spinnet::protocols::{m_chain_router, m_chain_router_with, mws_transfer_15};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in 2..=6 {
        let result = m_chain_router(m)?;
        let sim = Simulator::new(&result.graph()?);
        println!("{m} chains ({} sites): fidelity {:.12}", result.network.n_sites(), result.merit_on(&sim)?);
    }
    let long = m_chain_router_with(4, 8)?;
    let sim = Simulator::new(&long.graph()?);
    println!("4 chains of 8: fidelity {:.12}", long.merit_on(&sim)?);

    let mws = mws_transfer_15()?;
    let sim = Simulator::new(&mws.graph()?);
    let state = sim.run(&mws.readout_protocol()?)?.last().cloned().unwrap();
    let occupied: Vec<String> = (1..=15)
        .filter(|&s| state.population(s) > 1e-9)
        .map(|s| format!("{s}:{:.3}", state.population(s)))
        .collect();
    println!("15-site MWS transfer populations {}", occupied.join(" "));
    Ok(())
}
