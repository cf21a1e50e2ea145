//! End-to-end Bell pairs on two chains, by a phase kick at the junction or by
//! injecting at the centre.

use spinnet::dynamics::Simulator;
use spinnet::observables::pair_eof;
use spinnet::protocols::{entangle_center_two_chain, entangle_phase_two_chain, phase_interference_amplitudes};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [6, 12, 24] {
        for result in [entangle_phase_two_chain(n)?, entangle_center_two_chain(n)?] {
            let sim = Simulator::new(&result.graph()?);
            println!("N={n:3} {:>28}: {} = {:.12}", result.name, result.merit.describe(), result.merit_on(&sim)?);
        }
    }

    // EOF(1, N) against the kick angle
    let n = 12;
    for deg in [0.0, 30.0, 60.0, 90.0, 120.0, 180.0] {
        let result = spinnet::protocols::entangle_phase_two_chain_with(n, f64::to_radians(deg))?;
        let sim = Simulator::new(&result.graph()?);
        let state = sim.run(&result.readout_protocol()?)?.last().cloned().unwrap();
        let (a1, an) = phase_interference_amplitudes(n, f64::to_radians(deg));
        println!(
            "theta {deg:5.1}: EOF {:.6}, |a_1| {:.4}, |a_N| {:.4}",
            pair_eof(&state, 1, n)?,
            a1.norm(),
            an.norm()
        );
    }
    Ok(())
}
