//! Chains of different length: routing still works, and slowing the shorter
//! chain to match mirror times gives a clean Bell pair.

use spinnet::dynamics::Simulator;
use spinnet::protocols::{retuned_pair, unequal_entangle, unequal_phase_entangle, unequal_router};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let router = unequal_router(3, 4)?;
    let sim = Simulator::new(&router.graph()?);
    println!("3+4 router fidelity {:.12}", router.merit_on(&sim)?);

    let net = retuned_pair(3, 4)?;
    for c in net.chains() {
        println!("chain length {} j_max {:.6}", c.length, c.j_max);
    }
    let ent = unequal_entangle(3, 4)?;
    let sim = Simulator::new(&ent.graph()?);
    println!("retuned {} = {:.12}", ent.merit.describe(), ent.merit_on(&sim)?);

    // without retuning the phase protocol leaves amplitude spread over the network
    let raw = unequal_phase_entangle(3, 4, 2.0)?;
    let sim = Simulator::new(&raw.graph()?);
    let state = sim.run(&raw.readout_protocol()?)?.last().cloned().unwrap();
    for site in 1..=7 {
        let a = state.amplitude(site);
        println!("  site {site}: {:+.4} {:+.4}i", a.re, a.im);
    }
    println!("unretuned {} = {:.6}", raw.merit.describe(), raw.merit_on(&sim)?);
    Ok(())
}
