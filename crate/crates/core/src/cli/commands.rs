use std::fmt::Write as _;

use crate::disorder::{derive_seed, DisorderKind};
use crate::dynamics::Simulator;
use crate::ensemble::{merit_ensemble, phase_scan as scan};
use crate::network::{chain_graph, NetworkSpec};
use crate::protocols::{PhaseSensor, CLEAN_TOL};

use super::config::{DEFAULT_REALIZATIONS, DEFAULT_SAMPLES};
use super::meta::{sha256_hex, CellSeed};
use super::timeexpr::eval_time;
use super::{plots, write_atomic, CliError, Context, Outcome};

const SPECTRUM_TOL: f64 = 1e-9;

fn network_for_build(ctx: &Context) -> Result<NetworkSpec, CliError> {
    if let Some(net) = &ctx.config.network {
        return Ok(net.clone());
    }
    match &ctx.config.protocol {
        Some(p) => Ok(p.build(None)?.network),
        None => Err(CliError::Config("build needs a [network] or [protocol] section".into())),
    }
}

pub(super) fn build(ctx: &Context) -> Result<Outcome, CliError> {
    let net = network_for_build(ctx)?;
    let graph = net.graph()?;
    write_atomic(&ctx.out.join("edges.txt"), graph.to_edge_list().as_bytes())?;

    let spectrum = graph.spectrum();
    let mut union: Vec<f64> = net.chains().iter().flat_map(|c| chain_graph(c).spectrum()).collect();
    union.sort_by(f64::total_cmp);
    let drift = spectrum
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut csv = String::from("index,eigenvalue\n");
    for (k, e) in spectrum.iter().enumerate() {
        writeln!(csv, "{},{e:?}", k + 1).unwrap();
    }
    write_atomic(&ctx.out.join("spectrum.csv"), csv.as_bytes())?;

    println!("{} sites, {} couplings", graph.n_sites(), graph.edge_count());
    for (k, (chain, t)) in net.chains().iter().zip(net.mirror_times().as_slice()).enumerate() {
        println!("chain {k}: length {}, j_max {}, t_m = {t}", chain.length, chain.j_max);
    }
    println!("max |spectrum - chain spectra| = {drift:.3e}");

    let failure = (drift > SPECTRUM_TOL).then(|| format!("joined spectrum drifts from chain spectra by {drift:e}"));
    Ok(Outcome {
        files: vec!["edges.txt".into(), "spectrum.csv".into()],
        failure,
        ..Outcome::default()
    })
}

pub(super) fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let pcfg = ctx
        .config
        .protocol
        .as_ref()
        .ok_or_else(|| CliError::Config("run needs a [protocol] section".into()))?;
    let result = pcfg.build(ctx.config.network.as_ref())?;
    let times = result.network.mirror_times();
    let tcfg = ctx.config.trajectory.clone().unwrap_or_default();
    let mut outcome = Outcome::default();

    let duration = match &tcfg.duration {
        Some(expr) => eval_time(expr, &times).map_err(CliError::Config)?,
        None => {
            outcome.meta.defaults.insert("trajectory.duration".into(), "protocol duration".into());
            result.protocol.duration()
        }
    };
    let samples = tcfg.samples.unwrap_or_else(|| {
        outcome.meta.defaults.insert("trajectory.samples".into(), DEFAULT_SAMPLES.to_string());
        DEFAULT_SAMPLES
    });
    if duration < result.protocol.duration() {
        return Err(CliError::Config(format!(
            "trajectory.duration {duration} ends before the last protocol event at {}",
            result.protocol.duration()
        )));
    }

    let sim = Simulator::new(&result.graph()?);
    let unit = result.time_unit();
    let traj = sim.run(&result.protocol.with_uniform_samples(duration, samples)?)?;
    let mut csv = Vec::new();
    traj.write_populations_csv(&mut csv, unit)?;
    write_atomic(&ctx.out.join("trajectory.csv"), &csv)?;
    outcome.files.push("trajectory.csv".into());
    if tcfg.amplitudes {
        let mut csv = Vec::new();
        traj.write_amplitudes_csv(&mut csv, unit)?;
        write_atomic(&ctx.out.join("amplitudes.csv"), &csv)?;
        outcome.files.push("amplitudes.csv".into());
    }
    write_atomic(&ctx.out.join("plot_trajectory.py"), plots::TRAJECTORY.as_bytes())?;
    outcome.files.push("plot_trajectory.py".into());

    let mut failures = Vec::new();
    for (k, state) in traj.states().iter().enumerate() {
        let norm: f64 = state.populations().iter().sum();
        if (norm - 1.0).abs() > 1e-10 {
            failures.push(format!("norm {norm} at sample {k}"));
            break;
        }
    }

    let mut report = String::new();
    writeln!(report, "protocol {} on {} sites", result.name, result.network.n_sites()).unwrap();
    writeln!(report, "time unit t_m = {unit}").unwrap();
    for chk in result.check_on(&sim)? {
        let pass = chk.passed(CLEAN_TOL);
        writeln!(
            report,
            "{} {} at t/t_m = {}: fidelity {:.12}, overlap {:.12}{:+.12}i, max |diff| {:.3e}",
            if pass { "PASS" } else { "FAIL" },
            chk.label,
            chk.time / unit,
            chk.fidelity,
            chk.overlap.re,
            chk.overlap.im,
            chk.max_abs_diff
        )
        .unwrap();
        if !pass {
            failures.push(format!("{} at t/t_m = {}", chk.label, chk.time / unit));
        }
    }
    let merit = result.merit_on(&sim)?;
    writeln!(
        report,
        "{} at t/t_m = {}: {merit:.12}",
        result.merit.describe(),
        result.observe_at / unit
    )
    .unwrap();

    if let Some(d) = &ctx.config.disorder {
        let spec = d.spec().map_err(CliError::Config)?;
        let k = d.realizations.unwrap_or(DEFAULT_REALIZATIONS);
        let seed = derive_seed(ctx.seed, 0);
        let stats = merit_ensemble(&result, &spec, k, seed)?;
        writeln!(
            report,
            "{} disorder E={}: mean {} {:.6}, std {:.6}, std of mean {:.6}, K={k}, seed {seed}",
            spec.kind,
            spec.strength,
            result.merit.describe(),
            stats.mean,
            stats.std,
            stats.std_of_mean
        )
        .unwrap();
        outcome.meta.cells.push(CellSeed {
            label: format!("{} E={}", spec.kind, spec.strength),
            seed,
        });
    }
    print!("{report}");
    write_atomic(&ctx.out.join("report.txt"), report.as_bytes())?;
    outcome.files.push("report.txt".into());
    outcome.failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(outcome)
}

fn phase_cell_seed(master: u64, n: usize, kind: DisorderKind, strength: f64) -> u64 {
    let key = format!("phase-scan/{n}/{kind}/{:016x}", strength.to_bits());
    let digest = sha256_hex(key.as_bytes());
    derive_seed(master, u64::from_str_radix(&digest[..16], 16).expect("hex"))
}

pub(super) fn phase_scan(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.config.phase_scan.clone().unwrap_or_default();
    let mut outcome = Outcome::default();
    if cfg.n.is_none() {
        outcome.meta.defaults.insert("phase_scan.n".into(), "[20, 50]".into());
    }
    if cfg.theta.is_none() {
        outcome.meta.defaults.insert("phase_scan.theta".into(), "0..345 step 15".into());
    }
    if cfg.disorder.is_none() {
        outcome.meta.defaults.insert("phase_scan.disorder".into(), "none; diagonal 0.05".into());
    }
    if cfg.realizations.is_none() {
        outcome.meta.defaults.insert("phase_scan.realizations".into(), DEFAULT_REALIZATIONS.to_string());
    }
    let sizes = cfg.sizes().map_err(CliError::Config)?;
    let thetas = cfg.thetas().map_err(CliError::Config)?;
    let k = cfg.realizations().map_err(CliError::Config)?;
    let settings = cfg.settings().map_err(CliError::Config)?;

    let mut csv = String::from("n,kind,E,theta_true,theta_mean,std,std_of_mean,rms_error,K,seed\n");
    let mut failures = Vec::new();
    for &n in &sizes {
        let sensor = PhaseSensor::new(n)?;
        for d in &settings {
            let seed = phase_cell_seed(ctx.seed, n, d.kind, d.strength);
            let kk = if d.is_clean() { 1 } else { k };
            let rows = scan(&sensor, d, kk, seed, &thetas)?;
            outcome.meta.cells.push(CellSeed {
                label: format!("n={n} {} E={}", d.kind, d.strength),
                seed,
            });
            for r in rows {
                if d.is_clean() && (r.mean - r.theta_true).abs() > 1e-6 {
                    failures.push(format!("clean estimate {} for theta {}", r.mean, r.theta_true));
                }
                writeln!(
                    csv,
                    "{n},{},{},{},{:?},{:?},{:?},{:?},{},{seed}",
                    d.kind, d.strength, r.theta_true, r.mean, r.std, r.std_of_mean, r.rms_error, r.count
                )
                .unwrap();
            }
        }
    }
    write_atomic(&ctx.out.join("phase_scan.csv"), csv.as_bytes())?;
    write_atomic(&ctx.out.join("plot_phase_scan.py"), plots::PHASE_SCAN.as_bytes())?;
    println!("{} sizes x {} settings x {} angles", sizes.len(), settings.len(), thetas.len());
    outcome.files.push("phase_scan.csv".into());
    outcome.files.push("plot_phase_scan.py".into());
    outcome.failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(outcome)
}
