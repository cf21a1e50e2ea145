//! Mean router fidelity over (N, E) with the 0.90 contour, in a few seconds.

use spinnet::contour::{marching_squares, Grid};
use spinnet::disorder::{derive_seed, DisorderKind, DisorderSpec};
use spinnet::ensemble::merit_ensemble;
use spinnet::protocols::router_two_chain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sizes: Vec<usize> = (4..=40).step_by(6).collect();
    let strengths: Vec<f64> = (0..=6).map(|k| 0.05 * k as f64).collect();
    let mut values = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let result = router_two_chain(n)?;
        let mut column = Vec::new();
        for (j, &e) in strengths.iter().enumerate() {
            let d = DisorderSpec::new(DisorderKind::OffDiagonal, e)?;
            let seed = derive_seed(2024, (i * strengths.len() + j) as u64);
            column.push(merit_ensemble(&result, &d, 200, seed)?.mean);
        }
        println!("N={n:3} {}", column.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" "));
        values.push(column);
    }
    let grid = Grid {
        xs: sizes.iter().map(|&n| n as f64).collect(),
        ys: strengths.clone(),
        values,
    };
    let contour = marching_squares(&grid, 0.90);
    for line in &contour.polylines {
        let pts: Vec<String> = line.iter().map(|(x, y)| format!("({x:.1}, {y:.3})")).collect();
        println!("F = 0.90: {}", pts.join(" "));
    }
    Ok(())
}
