//! Monte-Carlo averages over disorder realizations.
//!
//! Realization `r` of a cell seeded with `seed` always draws from
//! `SeededRng::new(seed, r)`, and per-realization results are collected in
//! index order before any reduction, so every statistic is bit-identical
//! regardless of how many worker threads ran.

use rayon::prelude::*;
use thiserror::Error;

use crate::disorder::{sample_disorder, DisorderError, DisorderSpec, SeededRng};
use crate::dynamics::{PureState, Simulator};
use crate::network::CouplingGraph;
use crate::observables::{
    eof, reduce_two_sites, EnsembleAccumulator, EnsembleStats, EofConvention, ObservableError,
    ReducedTwoSiteState,
};
use crate::protocols::{unwrap_near, FigureOfMerit, PhaseSensor, ProtocolError, ProtocolResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("ensemble needs at least one realization")]
    NoRealizations,
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Disorder(#[from] DisorderError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T, F>(workers: Option<usize>, f: F) -> Result<T, EnsembleError>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| EnsembleError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Disorder realization `index` of `clean` under `seed`.
pub fn realization(
    clean: &CouplingGraph,
    disorder: &DisorderSpec,
    seed: u64,
    index: u64,
) -> Result<CouplingGraph, EnsembleError> {
    Ok(sample_disorder(clean, disorder, &SeededRng::new(seed, index))?)
}

fn par_realizations<T, F>(
    clean: &CouplingGraph,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
    f: F,
) -> Result<Vec<T>, EnsembleError>
where
    T: Send,
    F: Fn(&Simulator) -> Result<T, EnsembleError> + Sync,
{
    if realizations == 0 {
        return Err(EnsembleError::NoRealizations);
    }
    disorder.validate()?;
    (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let g = realization(clean, disorder, seed, r)?;
            f(&Simulator::new(&g))
        })
        .collect()
}

/// The protocol's state at `observe_at`, one per realization.
pub fn final_states(
    result: &ProtocolResult,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
) -> Result<Vec<PureState>, EnsembleError> {
    let clean = result.graph()?;
    let readout = result.readout_protocol()?;
    par_realizations(&clean, disorder, realizations, seed, |sim| {
        let traj = sim.run(&readout).map_err(ProtocolError::from)?;
        Ok(traj.last().expect("one sample").clone())
    })
}

/// Figure of merit per realization, in realization order.
pub fn merit_values(
    result: &ProtocolResult,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
) -> Result<Vec<f64>, EnsembleError> {
    let clean = result.graph()?;
    par_realizations(&clean, disorder, realizations, seed, |sim| Ok(result.merit_on(sim)?))
}

pub fn merit_ensemble(
    result: &ProtocolResult,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
) -> Result<EnsembleStats, EnsembleError> {
    let acc: EnsembleAccumulator = merit_values(result, disorder, realizations, seed)?
        .into_iter()
        .collect();
    Ok(acc.stats()?)
}

/// Ensemble EOF under an explicit averaging convention. Fidelity merits
/// ignore the convention (the two coincide for fidelity).
pub fn merit_mean_with(
    result: &ProtocolResult,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
    convention: EofConvention,
) -> Result<f64, EnsembleError> {
    match (&result.merit, convention) {
        (FigureOfMerit::Eof(i, j), EofConvention::MeanState) => {
            let states = final_states(result, disorder, realizations, seed)?;
            let reduced = states
                .iter()
                .map(|s| reduce_two_sites(s, *i, *j))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(eof(&ReducedTwoSiteState::average(&reduced)?)?)
        }
        _ => Ok(merit_ensemble(result, disorder, realizations, seed)?.mean),
    }
}

/// One row of a phase-estimation scan (angles in degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScanRow {
    pub theta_true: f64,
    /// Mean estimate, unwrapped onto the branch nearest `theta_true`.
    pub mean: f64,
    pub std: f64,
    pub std_of_mean: f64,
    pub rms_error: f64,
    pub count: usize,
}

/// Estimates every phase in `thetas_deg` on each realization. All phases
/// share the same realizations, so the scan shows the estimator's bias as a
/// smooth curve rather than independent noise per point.
pub fn phase_scan(
    sensor: &PhaseSensor,
    disorder: &DisorderSpec,
    realizations: usize,
    seed: u64,
    thetas_deg: &[f64],
) -> Result<Vec<PhaseScanRow>, EnsembleError> {
    let clean = sensor.network().graph().map_err(ProtocolError::from)?;
    let per_realization = par_realizations(&clean, disorder, realizations, seed, |sim| {
        thetas_deg
            .iter()
            .map(|&deg| Ok(unwrap_near(sensor.estimate(sim, deg.to_radians())?, deg)))
            .collect::<Result<Vec<f64>, EnsembleError>>()
    })?;
    thetas_deg
        .iter()
        .enumerate()
        .map(|(k, &deg)| {
            let acc: EnsembleAccumulator = per_realization.iter().map(|row| row[k]).collect();
            let stats = acc.stats()?;
            let mse = per_realization.iter().map(|row| (row[k] - deg).powi(2)).sum::<f64>()
                / realizations as f64;
            Ok(PhaseScanRow {
                theta_true: deg,
                mean: stats.mean,
                std: stats.std,
                std_of_mean: stats.std_of_mean,
                rms_error: mse.sqrt(),
                count: stats.count,
            })
        })
        .collect()
}
