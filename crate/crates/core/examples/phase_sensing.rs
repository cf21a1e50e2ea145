//! Reading an unknown junction phase from end populations, clean and with
//! diagonal disorder.

use spinnet::disorder::{DisorderKind, DisorderSpec};
use spinnet::dynamics::Simulator;
use spinnet::ensemble::phase_scan;
use spinnet::protocols::PhaseSensor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sensor = PhaseSensor::new(20)?;
    let sim = Simulator::new(&sensor.network().graph()?);
    for deg in [10.0, 95.0, 200.0, 333.0] {
        let (p1, p1q) = sensor.readout(&sim, f64::to_radians(deg))?;
        println!("theta {deg:6.1}: P1 {p1:.4}, P1' {p1q:.4}, estimate {:.9}", sensor.estimate(&sim, f64::to_radians(deg))?);
    }

    let thetas: Vec<f64> = (0..12).map(|k| 30.0 * k as f64).collect();
    let d = DisorderSpec::new(DisorderKind::Diagonal, 0.05)?;
    println!("diagonal E=0.05, 200 realizations");
    for row in phase_scan(&sensor, &d, 200, 42, &thetas)? {
        println!(
            "  {:6.1} -> {:8.3} +- {:.3} (rms {:.3})",
            row.theta_true, row.mean, row.std_of_mean, row.rms_error
        );
    }
    Ok(())
}
