//! Two-chain router: a flip at the far junction site sends the excitation to
//! the end of the second chain instead of back to the start.

use spinnet::dynamics::Simulator;
use spinnet::protocols::{free_two_chain, router_two_chain, CLEAN_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 10;
    for result in [free_two_chain(n)?, router_two_chain(n)?] {
        let sim = Simulator::new(&result.graph()?);
        println!("{} on {} sites", result.name, result.network.n_sites());
        for chk in result.check_on(&sim)? {
            println!(
                "  t/t_m = {}: {} fidelity {:.12} [{}]",
                chk.time / result.time_unit(),
                chk.label,
                chk.fidelity,
                if chk.passed(CLEAN_TOL) { "ok" } else { "off" }
            );
        }
    }

    let result = router_two_chain(n)?;
    let traj = Simulator::new(&result.graph()?).run(&result.protocol.with_uniform_samples(result.protocol.duration(), 9)?)?;
    for (t, s) in traj.times().iter().zip(traj.states()) {
        let p = s.populations();
        let bar: String = p.iter().map(|x| if *x > 0.25 { '#' } else if *x > 0.02 { '.' } else { ' ' }).collect();
        println!("  {:5.2} |{bar}|", t / result.time_unit());
    }
    Ok(())
}
