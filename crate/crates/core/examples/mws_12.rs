//! Twelve sites with a slowed middle chain: the excitation cycles through
//! multi-site superpositions with period 8 t_m of the outer chains.

use spinnet::dynamics::Simulator;
use spinnet::protocols::{max_entangle_12, mws_12, mws_12_equal_mirror, mws_9, CLEAN_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for result in [mws_9()?, mws_12()?, mws_12_equal_mirror()?, max_entangle_12()?] {
        let sim = Simulator::new(&result.graph()?);
        println!("{}", result.name);
        for chk in result.check_on(&sim)? {
            println!(
                "  t/t_m = {:4}: {:<40} {}",
                chk.time / result.time_unit(),
                chk.label,
                if chk.passed(CLEAN_TOL) { "ok" } else { "off" }
            );
        }
    }

    let result = mws_12()?;
    let traj = Simulator::new(&result.graph()?).run(&result.protocol.with_uniform_samples(8.0 * result.time_unit(), 17)?)?;
    for (t, s) in traj.times().iter().zip(traj.states()) {
        let row: Vec<String> = s.populations().iter().map(|p| format!("{p:.2}")).collect();
        println!("{:4.1} {}", t / result.time_unit(), row.join(" "));
    }
    Ok(())
}
