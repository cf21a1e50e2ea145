//! Timed protocols: free evolution under a static Hamiltonian, interrupted by
//! instantaneous single-site phase injections.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigh, evolve, ComplexVector, LinalgError, SpectralDecomposition, C64};
use crate::network::CouplingGraph;

/// Norm tolerance for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("phase angle must be finite, got {0}")]
    NonFinitePhase(f64),
    #[error("protocol must start with an injection at t = 0")]
    NoInjection,
    #[error("injection at t = {0} (only allowed at t = 0 as the first event)")]
    LateInjection(f64),
    #[error("event {index} at t = {time} precedes the previous event")]
    UnsortedEvents { index: usize, time: f64 },
    #[error("time {time} outside [0, {duration}]")]
    TimeOutOfRange { time: f64, duration: f64 },
    #[error("sample times must be nondecreasing (index {0})")]
    UnsortedSamples(usize),
    #[error("protocol addresses {protocol} sites but the graph has {graph}")]
    SizeMismatch { protocol: usize, graph: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Normalized amplitudes over the single-excitation basis `|r_1>..|r_N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(ComplexVector);

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, DynamicsError> {
        Self::from_vector(ComplexVector::new(amplitudes)?)
    }

    pub fn from_vector(v: ComplexVector) -> Result<Self, DynamicsError> {
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(DynamicsError::NotNormalized(norm));
        }
        Ok(Self(v))
    }

    /// `|r_site>` (1-based).
    pub fn basis(n_sites: usize, site: usize) -> Result<Self, DynamicsError> {
        check_site(site, n_sites)?;
        Ok(Self(ComplexVector::basis(n_sites, site - 1)))
    }

    /// A state given by `(site, amplitude)` pairs; all other amplitudes zero.
    pub fn from_sites(n_sites: usize, terms: &[(usize, C64)]) -> Result<Self, DynamicsError> {
        let mut amps = vec![C64::new(0.0, 0.0); n_sites];
        for &(site, a) in terms {
            check_site(site, n_sites)?;
            amps[site - 1] += a;
        }
        Self::new(amps)
    }

    pub fn n_sites(&self) -> usize {
        self.0.len()
    }

    /// Amplitude on `site` (1-based).
    pub fn amplitude(&self, site: usize) -> C64 {
        self.0[site - 1]
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn population(&self, site: usize) -> f64 {
        self.amplitude(site).norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.as_slice().iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64, DynamicsError> {
        Ok(self.0.inner(&other.0)?)
    }

    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

fn check_site(site: usize, n_sites: usize) -> Result<(), DynamicsError> {
    if site == 0 || site > n_sites {
        return Err(DynamicsError::SiteOutOfRange { site, n_sites });
    }
    Ok(())
}

/// Multiplies the amplitude on `site` by `e^{iθ}`.
pub fn apply_phase(state: &PureState, site: usize, theta: f64) -> Result<PureState, DynamicsError> {
    check_site(site, state.n_sites())?;
    if !theta.is_finite() {
        return Err(DynamicsError::NonFinitePhase(theta));
    }
    let mut out = state.clone();
    out.0.as_mut_slice()[site - 1] *= C64::from_polar(1.0, theta);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Inject { site: usize },
    Phase { site: usize, angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub time: f64,
    #[serde(flatten)]
    pub action: Action,
}

impl ScheduleEvent {
    pub fn inject(site: usize) -> Self {
        Self {
            time: 0.0,
            action: Action::Inject { site },
        }
    }

    pub fn phase(time: f64, site: usize, angle: f64) -> Self {
        Self {
            time,
            action: Action::Phase { site, angle },
        }
    }

    /// A phase flip, `e^{iπ}`.
    pub fn flip(time: f64, site: usize) -> Self {
        Self::phase(time, site, std::f64::consts::PI)
    }
}

/// A time-ordered event list with observation times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    events: Vec<ScheduleEvent>,
    duration: f64,
    sample_times: Vec<f64>,
}

impl Protocol {
    pub fn new(
        events: Vec<ScheduleEvent>,
        duration: f64,
        sample_times: Vec<f64>,
    ) -> Result<Self, DynamicsError> {
        let p = Self {
            events,
            duration,
            sample_times,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let in_range = |time: f64| {
            if !(time >= 0.0 && time <= self.duration) || !time.is_finite() {
                Err(DynamicsError::TimeOutOfRange {
                    time,
                    duration: self.duration,
                })
            } else {
                Ok(())
            }
        };
        match self.events.first() {
            Some(ScheduleEvent {
                time,
                action: Action::Inject { .. },
            }) if *time == 0.0 => {}
            _ => return Err(DynamicsError::NoInjection),
        }
        let mut last = 0.0;
        for (index, event) in self.events.iter().enumerate() {
            in_range(event.time)?;
            if event.time < last {
                return Err(DynamicsError::UnsortedEvents {
                    index,
                    time: event.time,
                });
            }
            last = event.time;
            match event.action {
                Action::Inject { .. } if index > 0 => {
                    return Err(DynamicsError::LateInjection(event.time))
                }
                Action::Phase { angle, .. } if !angle.is_finite() => {
                    return Err(DynamicsError::NonFinitePhase(angle))
                }
                _ => {}
            }
        }
        for (i, &t) in self.sample_times.iter().enumerate() {
            in_range(t)?;
            if i > 0 && t < self.sample_times[i - 1] {
                return Err(DynamicsError::UnsortedSamples(i));
            }
        }
        Ok(())
    }

    pub fn events(&self) -> &[ScheduleEvent] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    pub fn injection_site(&self) -> usize {
        match self.events[0].action {
            Action::Inject { site } => site,
            Action::Phase { .. } => unreachable!("validated"),
        }
    }

    /// Largest site label any event touches.
    pub fn max_site(&self) -> usize {
        self.events
            .iter()
            .map(|e| match e.action {
                Action::Inject { site } | Action::Phase { site, .. } => site,
            })
            .max()
            .unwrap_or(0)
    }

    /// Same events, observed only at `times`. The duration grows to cover
    /// the last time if needed.
    pub fn with_samples(&self, times: Vec<f64>) -> Result<Self, DynamicsError> {
        let duration = times.iter().cloned().fold(self.duration, f64::max);
        Self::new(self.events.clone(), duration, times)
    }

    /// Same events, observed at `count` uniform points on `[0, duration]`.
    pub fn with_uniform_samples(&self, duration: f64, count: usize) -> Result<Self, DynamicsError> {
        Self::new(self.events.clone(), duration, uniform_grid(duration, count))
    }
}

/// `count` evenly spaced points on `[0, end]`, both ends included.
pub fn uniform_grid(end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![end],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    end
                } else {
                    end * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Recorded states with their times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PureState>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn last(&self) -> Option<&PureState> {
        self.states.last()
    }

    pub fn populations(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(PureState::populations).collect()
    }

    /// The state recorded at `time` (last match wins).
    pub fn state_at(&self, time: f64) -> Option<&PureState> {
        let tol = 1e-12 * time.abs().max(1.0);
        self.times
            .iter()
            .rposition(|t| (t - time).abs() <= tol)
            .map(|i| &self.states[i])
    }

    /// CSV `t,site_1,...,site_N` of populations, with `t` divided by
    /// `time_unit` (pass a mirror time for rescaled output).
    pub fn write_populations_csv<W: Write>(&self, mut w: W, time_unit: f64) -> io::Result<()> {
        let n = self.states.first().map_or(0, PureState::n_sites);
        write!(w, "t")?;
        for i in 1..=n {
            write!(w, ",site_{i}")?;
        }
        writeln!(w)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{}", t / time_unit)?;
            for p in s.populations() {
                write!(w, ",{p:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// CSV `t,re_1,im_1,...,re_N,im_N`.
    pub fn write_amplitudes_csv<W: Write>(&self, mut w: W, time_unit: f64) -> io::Result<()> {
        let n = self.states.first().map_or(0, PureState::n_sites);
        write!(w, "t")?;
        for i in 1..=n {
            write!(w, ",re_{i},im_{i}")?;
        }
        writeln!(w)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{}", t / time_unit)?;
            for a in s.amplitudes() {
                write!(w, ",{:?},{:?}", a.re, a.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// A graph with its spectral decomposition, reusable across protocols.
#[derive(Debug, Clone)]
pub struct Simulator {
    decomp: SpectralDecomposition,
}

impl Simulator {
    pub fn new(graph: &CouplingGraph) -> Self {
        Self {
            decomp: eigh(&graph.hamiltonian()),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.decomp.dim()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    /// Free evolution by `t` (negative `t` runs backwards).
    pub fn evolve(&self, state: &PureState, t: f64) -> Result<PureState, DynamicsError> {
        Ok(PureState(evolve(&self.decomp, state.as_vector(), t)?))
    }

    /// Executes `protocol`. Each segment between events is evolved from its
    /// start state, so sampling density does not accumulate error. An event
    /// sharing a timestamp with a sample is applied before recording.
    pub fn run(&self, protocol: &Protocol) -> Result<Trajectory, DynamicsError> {
        protocol.validate()?;
        let n = self.n_sites();
        if protocol.max_site() > n {
            return Err(DynamicsError::SizeMismatch {
                protocol: protocol.max_site(),
                graph: n,
            });
        }
        let mut segment_state = PureState::basis(n, protocol.injection_site())?;
        let mut segment_start = 0.0;
        let mut pending = protocol.events()[1..].iter().peekable();
        let mut times = Vec::with_capacity(protocol.sample_times().len());
        let mut states = Vec::with_capacity(protocol.sample_times().len());

        for &t in protocol.sample_times() {
            while let Some(event) = pending.next_if(|e| e.time <= t) {
                if let Action::Phase { site, angle } = event.action {
                    let at_event = self.evolve(&segment_state, event.time - segment_start)?;
                    segment_state = apply_phase(&at_event, site, angle)?;
                    segment_start = event.time;
                }
            }
            times.push(t);
            states.push(self.evolve(&segment_state, t - segment_start)?);
        }
        Ok(Trajectory { times, states })
    }
}

/// One-shot [`Simulator::run`]: decomposes `graph` and executes `protocol`.
pub fn run_schedule(graph: &CouplingGraph, protocol: &Protocol) -> Result<Trajectory, DynamicsError> {
    Simulator::new(graph).run(protocol)
}
