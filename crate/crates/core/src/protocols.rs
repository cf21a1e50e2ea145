//! Ready-made network protocols with their analytic target states.
//!
//! Every constructor returns a [`ProtocolResult`]: the network, the timed
//! schedule, the closed-form states the clean dynamics must hit (global
//! phase included), and the figure of merit used under disorder.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use thiserror::Error;

use crate::dynamics::{DynamicsError, Protocol, PureState, ScheduleEvent, Simulator};
use crate::linalg::C64;
use crate::network::{retune_jmax, ChainSpec, CouplingGraph, NetworkError, NetworkSpec};
use crate::observables::{fidelity, pair_eof, ObservableError};

/// Amplitude tolerance for clean-dynamics state checks.
pub const CLEAN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("{protocol} needs an even total length >= 4, got {n}")]
    OddLength { protocol: &'static str, n: usize },
    #[error("{0}")]
    WrongTopology(String),
    #[error("chain mirror times differ ({0:?}); retune with network::retune_jmax first")]
    NotRetuned(Vec<f64>),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// `(-i)^k`, exact.
pub fn neg_i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Global phases accumulated by mirror-symmetric transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorPhase {
    /// `(-i)^(N/2 - 1)`: one half-network transfer.
    Phi,
    /// `(-i)^(N - 2)`: transfer across both halves.
    Gamma,
    /// `(-1)^(N/2 - 1)`: out and back through one half.
    Delta,
    /// `(-i)^(N_j - 1)`: transfer along a single chain of length `N_j`.
    Alpha,
}

impl MirrorPhase {
    pub fn factor(self, n: usize) -> C64 {
        let n = n as i64;
        match self {
            MirrorPhase::Phi => neg_i_pow(n / 2 - 1),
            MirrorPhase::Gamma => neg_i_pow(n - 2),
            MirrorPhase::Delta => neg_i_pow(2 * (n / 2 - 1)),
            MirrorPhase::Alpha => neg_i_pow(n - 1),
        }
    }
}

/// An analytic state the clean dynamics should reach at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedState {
    pub time: f64,
    pub label: &'static str,
    pub state: PureState,
}

/// What a disorder ensemble scores.
#[derive(Debug, Clone, PartialEq)]
pub enum FigureOfMerit {
    Fidelity(PureState),
    Eof(usize, usize),
}

impl FigureOfMerit {
    pub fn evaluate(&self, state: &PureState) -> Result<f64, ProtocolError> {
        Ok(match self {
            FigureOfMerit::Fidelity(target) => fidelity(state, target)?,
            FigureOfMerit::Eof(i, j) => pair_eof(state, *i, *j)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            FigureOfMerit::Fidelity(_) => "fidelity".into(),
            FigureOfMerit::Eof(i, j) => format!("eof({i},{j})"),
        }
    }
}

/// Outcome of comparing a simulated state with its analytic prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCheck {
    pub time: f64,
    pub label: &'static str,
    /// `<expected|achieved>`; equals 1 when the global phase matches too.
    pub overlap: C64,
    pub fidelity: f64,
    pub max_abs_diff: f64,
}

impl StateCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_abs_diff <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub name: &'static str,
    pub network: NetworkSpec,
    pub protocol: Protocol,
    /// Time-ordered analytic states.
    pub expected: Vec<ExpectedState>,
    /// When the figure of merit is read out.
    pub observe_at: f64,
    pub merit: FigureOfMerit,
}

impl ProtocolResult {
    pub fn graph(&self) -> Result<CouplingGraph, ProtocolError> {
        Ok(self.network.graph()?)
    }

    /// Mirror time of the first chain, the natural unit for rescaled time.
    pub fn time_unit(&self) -> f64 {
        self.network.chains()[0].mirror_time()
    }

    /// The schedule observed only at `observe_at`.
    pub fn readout_protocol(&self) -> Result<Protocol, ProtocolError> {
        Ok(self.protocol.with_samples(vec![self.observe_at])?)
    }

    /// Figure of merit on an already-built simulator (clean or disordered).
    pub fn merit_on(&self, sim: &Simulator) -> Result<f64, ProtocolError> {
        let traj = sim.run(&self.readout_protocol()?)?;
        let state = traj.last().expect("one sample");
        self.merit.evaluate(state)
    }

    /// Runs the clean network and compares against every expected state.
    pub fn check_clean(&self) -> Result<Vec<StateCheck>, ProtocolError> {
        let sim = Simulator::new(&self.graph()?);
        self.check_on(&sim)
    }

    pub fn check_on(&self, sim: &Simulator) -> Result<Vec<StateCheck>, ProtocolError> {
        let times: Vec<f64> = self.expected.iter().map(|e| e.time).collect();
        let traj = sim.run(&self.protocol.with_samples(times)?)?;
        self.expected
            .iter()
            .zip(traj.states())
            .map(|(exp, got)| {
                Ok(StateCheck {
                    time: exp.time,
                    label: exp.label,
                    overlap: exp.state.inner(got)?,
                    fidelity: fidelity(got, &exp.state)?,
                    max_abs_diff: exp.state.max_abs_diff(got),
                })
            })
            .collect()
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn require_even(protocol: &'static str, n: usize) -> Result<(), ProtocolError> {
    if n % 2 != 0 || n < 4 {
        return Err(ProtocolError::OddLength { protocol, n });
    }
    Ok(())
}

fn expected(time: f64, label: &'static str, n: usize, terms: &[(usize, C64)]) -> Result<ExpectedState, ProtocolError> {
    Ok(ExpectedState {
        time,
        label,
        state: PureState::from_sites(n, terms)?,
    })
}

/// Two equal chains with no intervention: the even superposition on the
/// central diamond at `t_m`, back on site 1 at `2 t_m`.
pub fn free_two_chain(n: usize) -> Result<ProtocolResult, ProtocolError> {
    require_even("free_two_chain", n)?;
    let network = NetworkSpec::uniform(2, n / 2, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let phi = MirrorPhase::Phi.factor(n) * FRAC_1_SQRT_2;
    let delta = MirrorPhase::Delta.factor(n);
    let protocol = Protocol::new(vec![ScheduleEvent::inject(1)], 2.0 * t_m, vec![t_m, 2.0 * t_m])?;
    Ok(ProtocolResult {
        name: "free",
        expected: vec![
            expected(t_m, "even superposition", n, &[(n / 2, phi), (n / 2 + 1, phi)])?,
            expected(2.0 * t_m, "return to site 1", n, &[(1, delta)])?,
        ],
        observe_at: 2.0 * t_m,
        merit: FigureOfMerit::Fidelity(PureState::basis(n, 1)?),
        network,
        protocol,
    })
}

/// Router from site 1 to site N: flip site N/2 + 1 at `t_m`, arrive at `2 t_m`.
pub fn router_two_chain(n: usize) -> Result<ProtocolResult, ProtocolError> {
    require_even("router_two_chain", n)?;
    let network = NetworkSpec::uniform(2, n / 2, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let phi = MirrorPhase::Phi.factor(n) * FRAC_1_SQRT_2;
    let target = PureState::from_sites(n, &[(n, MirrorPhase::Gamma.factor(n))])?;
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(1), ScheduleEvent::flip(t_m, n / 2 + 1)],
        2.0 * t_m,
        vec![t_m, 2.0 * t_m],
    )?;
    Ok(ProtocolResult {
        name: "router",
        expected: vec![
            expected(t_m, "odd superposition after flip", n, &[(n / 2, phi), (n / 2 + 1, -phi)])?,
            ExpectedState {
                time: 2.0 * t_m,
                label: "routed to site N",
                state: target.clone(),
            },
        ],
        observe_at: 2.0 * t_m,
        merit: FigureOfMerit::Fidelity(target),
        network,
        protocol,
    })
}

/// Amplitudes on sites 1 and N after a phase `theta` on site N/2 + 1 at `t_m`,
/// read at `2 t_m`.
pub fn phase_interference_amplitudes(n: usize, theta: f64) -> (C64, C64) {
    let delta = MirrorPhase::Delta.factor(n);
    let e = C64::from_polar(1.0, theta);
    (delta * (1.0 + e) / 2.0, delta * (1.0 - e) / 2.0)
}

/// Phase `theta` on site N/2 + 1 at `t_m`; interference between the two
/// ends at `2 t_m`. `theta = π/2` gives a maximally entangled pair.
pub fn entangle_phase_two_chain_with(n: usize, theta: f64) -> Result<ProtocolResult, ProtocolError> {
    require_even("entangle_phase_two_chain", n)?;
    let network = NetworkSpec::uniform(2, n / 2, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let (a1, an) = phase_interference_amplitudes(n, theta);
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(1), ScheduleEvent::phase(t_m, n / 2 + 1, theta)],
        2.0 * t_m,
        vec![2.0 * t_m],
    )?;
    Ok(ProtocolResult {
        name: "ent-phase",
        expected: vec![expected(2.0 * t_m, "end-to-end interference", n, &[(1, a1), (n, an)])?],
        observe_at: 2.0 * t_m,
        merit: FigureOfMerit::Eof(1, n),
        network,
        protocol,
    })
}

pub fn entangle_phase_two_chain(n: usize) -> Result<ProtocolResult, ProtocolError> {
    entangle_phase_two_chain_with(n, FRAC_PI_2)
}

/// Inject on the upper central vertex N/2: a Bell pair between the ends at
/// `t_m` with no intervention, back at N/2 after `2 t_m`.
pub fn entangle_center_two_chain(n: usize) -> Result<ProtocolResult, ProtocolError> {
    require_even("entangle_center_two_chain", n)?;
    let network = NetworkSpec::uniform(2, n / 2, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let phi = MirrorPhase::Phi.factor(n) * FRAC_1_SQRT_2;
    let protocol = Protocol::new(vec![ScheduleEvent::inject(n / 2)], 2.0 * t_m, vec![t_m, 2.0 * t_m])?;
    Ok(ProtocolResult {
        name: "ent-center",
        expected: vec![
            expected(t_m, "end-to-end Bell pair", n, &[(1, phi), (n, phi)])?,
            expected(2.0 * t_m, "return to N/2", n, &[(n / 2, MirrorPhase::Delta.factor(n))])?,
        ],
        observe_at: t_m,
        merit: FigureOfMerit::Eof(1, n),
        network,
        protocol,
    })
}

/// Two-run phase readout on an equal two-chain network. The unknown phase
/// sits on site N/2 + 1 at `t_m`; run A reads `P1 = (1 + cos θ)/2` at
/// `2 t_m`, run B adds a known `π/2` and reads `P1' = (1 - sin θ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSensor {
    n: usize,
    network: NetworkSpec,
    t_m: f64,
}

impl PhaseSensor {
    pub fn new(n: usize) -> Result<Self, ProtocolError> {
        require_even("phase_sense", n)?;
        let network = NetworkSpec::uniform(2, n / 2, 1.0)?;
        let t_m = network.mirror_times().as_slice()[0];
        Ok(Self { n, network, t_m })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn network(&self) -> &NetworkSpec {
        &self.network
    }

    pub fn protocol(&self, theta: f64) -> Result<Protocol, ProtocolError> {
        Ok(Protocol::new(
            vec![ScheduleEvent::inject(1), ScheduleEvent::phase(self.t_m, self.n / 2 + 1, theta)],
            2.0 * self.t_m,
            vec![2.0 * self.t_m],
        )?)
    }

    /// `(P1, P1')` for an unknown phase `theta` (radians).
    pub fn readout(&self, sim: &Simulator, theta: f64) -> Result<(f64, f64), ProtocolError> {
        let p = |angle: f64| -> Result<f64, ProtocolError> {
            let traj = sim.run(&self.protocol(angle)?)?;
            Ok(traj.last().expect("one sample").population(1))
        };
        Ok((p(theta)?, p(theta + FRAC_PI_2)?))
    }

    /// Estimated phase in degrees, `[0, 360)`.
    pub fn estimate(&self, sim: &Simulator, theta: f64) -> Result<f64, ProtocolError> {
        let (p1, p1q) = self.readout(sim, theta)?;
        Ok(estimate_from_populations(p1, p1q))
    }
}

/// `atan2(1 - 2 P1', 2 P1 - 1)` in degrees, mapped to `[0, 360)`.
pub fn estimate_from_populations(p1: f64, p1_quadrature: f64) -> f64 {
    let deg = (1.0 - 2.0 * p1_quadrature).atan2(2.0 * p1 - 1.0).to_degrees();
    wrap_degrees(deg)
}

pub fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// The representative of `estimate` (degrees) closest to `reference`.
pub fn unwrap_near(estimate: f64, reference: f64) -> f64 {
    let mut d = (estimate - reference).rem_euclid(360.0);
    if d > 180.0 {
        d -= 360.0;
    }
    reference + d
}

/// Clean-network phase estimate in degrees for a true phase in degrees.
pub fn phase_sense_estimate(n: usize, theta_deg: f64) -> Result<f64, ProtocolError> {
    let sensor = PhaseSensor::new(n)?;
    let sim = Simulator::new(&sensor.network.graph()?);
    sensor.estimate(&sim, theta_deg.to_radians())
}

fn two_chain_network(n_a: usize, n_b: usize) -> Result<NetworkSpec, ProtocolError> {
    Ok(NetworkSpec::new(vec![ChainSpec::new(n_a, 1.0)?, ChainSpec::new(n_b, 1.0)?])?)
}

/// Router across chains of different lengths: flip site N_A + 1 at `t_m,A`,
/// arrive at site N at `t_m,A + t_m,B`.
pub fn unequal_router(n_a: usize, n_b: usize) -> Result<ProtocolResult, ProtocolError> {
    let network = two_chain_network(n_a, n_b)?;
    let t = network.mirror_times();
    let (t_a, t_b) = (t.as_slice()[0], t.as_slice()[1]);
    let n = n_a + n_b;
    let target = PureState::from_sites(n, &[(n, MirrorPhase::Gamma.factor(n))])?;
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(1), ScheduleEvent::flip(t_a, n_a + 1)],
        t_a + t_b,
        vec![t_a + t_b],
    )?;
    Ok(ProtocolResult {
        name: "unequal-router",
        expected: vec![ExpectedState {
            time: t_a + t_b,
            label: "routed to site N",
            state: target.clone(),
        }],
        observe_at: t_a + t_b,
        merit: FigureOfMerit::Fidelity(target),
        network,
        protocol,
    })
}

/// The two-chain network with the shorter chain slowed to the longer
/// chain's mirror time.
pub fn retuned_pair(n_a: usize, n_b: usize) -> Result<NetworkSpec, ProtocolError> {
    let network = two_chain_network(n_a, n_b)?;
    Ok(match n_a.cmp(&n_b) {
        std::cmp::Ordering::Less => retune_jmax(&network, 0, 1)?,
        std::cmp::Ordering::Greater => retune_jmax(&network, 1, 0)?,
        std::cmp::Ordering::Equal => network,
    })
}

/// Bell pair between the ends of an unequal pair of chains, after retuning.
pub fn unequal_entangle(n_a: usize, n_b: usize) -> Result<ProtocolResult, ProtocolError> {
    unequal_entangle_on(&retuned_pair(n_a, n_b)?)
}

/// Inject on the upper central vertex (site N_A) of a two-chain network
/// whose chains share one mirror time.
pub fn unequal_entangle_on(network: &NetworkSpec) -> Result<ProtocolResult, ProtocolError> {
    let chains = network.chains();
    if chains.len() != 2 {
        return Err(ProtocolError::WrongTopology(format!(
            "unequal_entangle needs two chains, got {}",
            chains.len()
        )));
    }
    let times = network.mirror_times();
    if !times.all_equal(1e-9) {
        return Err(ProtocolError::NotRetuned(times.as_slice().to_vec()));
    }
    let (n_a, n_b) = (chains[0].length, chains[1].length);
    let n = n_a + n_b;
    let t_m = times.as_slice()[0];
    let protocol = Protocol::new(vec![ScheduleEvent::inject(n_a)], t_m, vec![t_m])?;
    Ok(ProtocolResult {
        name: "unequal-ent",
        expected: vec![expected(
            t_m,
            "end-to-end Bell pair",
            n,
            &[
                (1, MirrorPhase::Alpha.factor(n_a) * FRAC_1_SQRT_2),
                (n, MirrorPhase::Alpha.factor(n_b) * FRAC_1_SQRT_2),
            ],
        )?],
        observe_at: t_m,
        merit: FigureOfMerit::Eof(1, n),
        network: network.clone(),
        protocol,
    })
}

/// Phase `π/2` on site N_A + 1 at `t_m,A` without retuning; scored by
/// EOF(1, N) at `observe_at` (multiples of `t_m,A`). Only the site-1
/// amplitude has a closed form here, so no expected states are attached.
pub fn unequal_phase_entangle(
    n_a: usize,
    n_b: usize,
    observe_at_multiple: f64,
) -> Result<ProtocolResult, ProtocolError> {
    let network = two_chain_network(n_a, n_b)?;
    let t_a = network.mirror_times().as_slice()[0];
    let observe_at = observe_at_multiple * t_a;
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(1), ScheduleEvent::phase(t_a, n_a + 1, FRAC_PI_2)],
        observe_at.max(t_a),
        vec![observe_at.max(t_a)],
    )?;
    Ok(ProtocolResult {
        name: "unequal-ent-phase",
        expected: vec![],
        observe_at,
        merit: FigureOfMerit::Eof(1, n_a + n_b),
        network,
        protocol,
    })
}

/// `arccos(-1/3)`: the phase that splits the excitation evenly three ways.
pub fn w_phase() -> f64 {
    (-1.0f64 / 3.0).acos()
}

/// W state on sites (1, 2n, 2n + 1) of three equal n-site chains at `2 t_m`.
pub fn w_state(n: usize) -> Result<ProtocolResult, ProtocolError> {
    let network = NetworkSpec::uniform(3, n, 1.0)?;
    w_state_on(&network)
}

pub fn w_state_on(network: &NetworkSpec) -> Result<ProtocolResult, ProtocolError> {
    let chains = network.chains();
    if chains.len() != 3 || chains.iter().any(|c| *c != chains[0]) {
        return Err(ProtocolError::WrongTopology(
            "w_state needs three identical chains".into(),
        ));
    }
    let n = chains[0].length;
    let total = 3 * n;
    let t_m = chains[0].mirror_time();
    let phi = w_phase();
    let e = C64::from_polar(1.0, phi);
    let sign = neg_i_pow(2 * (n as i64 - 1));
    let a1 = sign * (1.0 + e) / 2.0;
    let aw = sign * (1.0 - e) / (2.0 * 2f64.sqrt());
    let target = PureState::from_sites(total, &[(1, a1), (2 * n, aw), (2 * n + 1, aw)])?;
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(1), ScheduleEvent::phase(t_m, n + 1, phi)],
        2.0 * t_m,
        vec![2.0 * t_m],
    )?;
    Ok(ProtocolResult {
        name: "w-state",
        expected: vec![ExpectedState {
            time: 2.0 * t_m,
            label: "W state",
            state: target.clone(),
        }],
        observe_at: 2.0 * t_m,
        merit: FigureOfMerit::Fidelity(target),
        network: network.clone(),
        protocol,
    })
}

fn nine_site() -> Result<(NetworkSpec, f64), ProtocolError> {
    let network = NetworkSpec::uniform(3, 3, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    Ok((network, t_m))
}

/// Nine-site network, inject site 5: four-site W-type state on (3, 4, 6, 7)
/// at `t_m / 2`, back on site 5 at `t_m`.
pub fn mws_9() -> Result<ProtocolResult, ProtocolError> {
    let (network, t_m) = nine_site()?;
    let h = c(0.0, 0.5);
    let mws = PureState::from_sites(9, &[(3, -h), (4, h), (6, -h), (7, -h)])?;
    let protocol = Protocol::new(vec![ScheduleEvent::inject(5)], t_m, vec![t_m / 2.0, t_m])?;
    Ok(ProtocolResult {
        name: "mws",
        expected: vec![
            ExpectedState {
                time: t_m / 2.0,
                label: "MWS on 3,4,6,7",
                state: mws.clone(),
            },
            expected(t_m, "return to site 5", 9, &[(5, c(-1.0, 0.0))])?,
        ],
        observe_at: t_m / 2.0,
        merit: FigureOfMerit::Fidelity(mws),
        network,
        protocol,
    })
}

/// [`mws_9`] followed by simultaneous flips on sites 4 and 7 at `t_m / 2`:
/// a Bell pair between sites 1 and 9 at `3 t_m / 2`.
pub fn mws_9_with_flips() -> Result<ProtocolResult, ProtocolError> {
    let (network, t_m) = nine_site()?;
    let a = c(0.0, FRAC_1_SQRT_2);
    let protocol = Protocol::new(
        vec![
            ScheduleEvent::inject(5),
            ScheduleEvent::flip(t_m / 2.0, 4),
            ScheduleEvent::flip(t_m / 2.0, 7),
        ],
        1.5 * t_m,
        vec![1.5 * t_m],
    )?;
    Ok(ProtocolResult {
        name: "mws-flip",
        expected: vec![expected(1.5 * t_m, "Bell pair on 1,9", 9, &[(1, a), (9, a)])?],
        observe_at: 1.5 * t_m,
        merit: FigureOfMerit::Eof(1, 9),
        network,
        protocol,
    })
}

/// Three 4-site chains with the middle one at half the peak coupling, so
/// its mirror time is twice the outer chains'.
pub fn slowed_middle_12() -> Result<NetworkSpec, ProtocolError> {
    Ok(NetworkSpec::new(vec![
        ChainSpec::new(4, 1.0)?,
        ChainSpec::new(4, 0.5)?,
        ChainSpec::new(4, 1.0)?,
    ])?)
}

fn require_slowed_middle(network: &NetworkSpec) -> Result<f64, ProtocolError> {
    let chains = network.chains();
    if chains.len() != 3 || chains.iter().any(|c| c.length != 4) {
        return Err(ProtocolError::WrongTopology(
            "needs three 4-site chains".into(),
        ));
    }
    let t = network.mirror_times();
    let t = t.as_slice();
    let ok = (t[1] - 2.0 * t[0]).abs() <= 1e-9 * t[0] && (t[2] - t[0]).abs() <= 1e-9 * t[0];
    if !ok {
        return Err(ProtocolError::NotRetuned(t.to_vec()));
    }
    Ok(t[0])
}

/// Twelve-site network with the slowed middle chain, inject site 5: MWS on
/// (4, 5, 8, 9) at `2 t_m,A`, site 4 at `4 t_m,A`, MWS with the opposite
/// relative phase at `6 t_m,A`, site 5 at `8 t_m,A`.
pub fn mws_12() -> Result<ProtocolResult, ProtocolError> {
    mws_12_on(&slowed_middle_12()?)
}

pub fn mws_12_on(network: &NetworkSpec) -> Result<ProtocolResult, ProtocolError> {
    let t_a = require_slowed_middle(network)?;
    let h = 0.5;
    let first = PureState::from_sites(12, &[(4, c(-h, 0.0)), (5, c(-h, 0.0)), (8, c(0.0, -h)), (9, c(0.0, -h))])?;
    let times: Vec<f64> = [2.0, 4.0, 6.0, 8.0].iter().map(|k| k * t_a).collect();
    let protocol = Protocol::new(vec![ScheduleEvent::inject(5)], times[3], times.clone())?;
    Ok(ProtocolResult {
        name: "mws-12",
        expected: vec![
            ExpectedState {
                time: times[0],
                label: "MWS on 4,5,8,9",
                state: first.clone(),
            },
            expected(times[1], "localized on site 4", 12, &[(4, c(1.0, 0.0))])?,
            expected(
                times[2],
                "MWS with opposite phase",
                12,
                &[(4, c(-h, 0.0)), (5, c(-h, 0.0)), (8, c(0.0, h)), (9, c(0.0, h))],
            )?,
            expected(times[3], "return to site 5", 12, &[(5, c(1.0, 0.0))])?,
        ],
        observe_at: times[0],
        merit: FigureOfMerit::Fidelity(first),
        network: network.clone(),
        protocol,
    })
}

/// The same injection on three identical 4-site chains: `-|r_5>` at `2 t_m`.
pub fn mws_12_equal_mirror() -> Result<ProtocolResult, ProtocolError> {
    let network = NetworkSpec::uniform(3, 4, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let protocol = Protocol::new(vec![ScheduleEvent::inject(5)], 2.0 * t_m, vec![2.0 * t_m])?;
    let target = PureState::from_sites(12, &[(5, c(-1.0, 0.0))])?;
    Ok(ProtocolResult {
        name: "mws-equal",
        expected: vec![ExpectedState {
            time: 2.0 * t_m,
            label: "-|r_5>",
            state: target.clone(),
        }],
        observe_at: 2.0 * t_m,
        merit: FigureOfMerit::Fidelity(target),
        network,
        protocol,
    })
}

fn max_entangle_12_unchecked(network: &NetworkSpec, t_a: f64) -> Result<ProtocolResult, ProtocolError> {
    let s = FRAC_1_SQRT_2;
    let protocol = Protocol::new(
        vec![ScheduleEvent::inject(5), ScheduleEvent::flip(2.0 * t_a, 9)],
        3.0 * t_a,
        vec![3.0 * t_a],
    )?;
    Ok(ProtocolResult {
        name: "max-ent",
        expected: vec![expected(3.0 * t_a, "Bell pair on 1,12", 12, &[(1, c(0.0, -s)), (12, c(s, 0.0))])?],
        observe_at: 3.0 * t_a,
        merit: FigureOfMerit::Eof(1, 12),
        network: network.clone(),
        protocol,
    })
}

/// Slowed-middle 12-site network, inject 5, flip site 9 at `2 t_m,A`:
/// a Bell pair between the ends at `3 t_m,A`.
pub fn max_entangle_12() -> Result<ProtocolResult, ProtocolError> {
    max_entangle_12_on(&slowed_middle_12()?)
}

pub fn max_entangle_12_on(network: &NetworkSpec) -> Result<ProtocolResult, ProtocolError> {
    let t_a = require_slowed_middle(network)?;
    max_entangle_12_unchecked(network, t_a)
}

/// Router through `m` chains of `chain_len` sites: a flip on the first site
/// of chain k + 1 at `k t_m`, arriving at the last site at `m t_m`.
pub fn m_chain_router_with(m: usize, chain_len: usize) -> Result<ProtocolResult, ProtocolError> {
    if m < 2 {
        return Err(ProtocolError::WrongTopology(format!("router needs at least 2 chains, got {m}")));
    }
    let network = NetworkSpec::uniform(m, chain_len, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let n = m * chain_len;
    let mut events = vec![ScheduleEvent::inject(1)];
    events.extend((1..m).map(|k| ScheduleEvent::flip(k as f64 * t_m, k * chain_len + 1)));
    let phase = neg_i_pow((m * (chain_len - 1)) as i64);
    let target = PureState::from_sites(n, &[(n, phase)])?;
    let end = m as f64 * t_m;
    let protocol = Protocol::new(events, end, vec![end])?;
    Ok(ProtocolResult {
        name: "m-chain-router",
        expected: vec![ExpectedState {
            time: end,
            label: "routed to last site",
            state: target.clone(),
        }],
        observe_at: end,
        merit: FigureOfMerit::Fidelity(target),
        network,
        protocol,
    })
}

pub fn m_chain_router(m: usize) -> Result<ProtocolResult, ProtocolError> {
    m_chain_router_with(m, 3)
}

/// Five 3-site chains: inject 8, flip 7 and 10 at `t_m / 2`; the MWS on
/// (6, 7, 9, 10) is moved to (3, 4, 12, 13) at `3 t_m / 2`.
pub fn mws_transfer_15() -> Result<ProtocolResult, ProtocolError> {
    let network = NetworkSpec::uniform(5, 3, 1.0)?;
    let t_m = network.mirror_times().as_slice()[0];
    let h = c(0.0, 0.5);
    let moved = PureState::from_sites(15, &[(3, h), (4, -h), (12, h), (13, h)])?;
    let protocol = Protocol::new(
        vec![
            ScheduleEvent::inject(8),
            ScheduleEvent::flip(t_m / 2.0, 7),
            ScheduleEvent::flip(t_m / 2.0, 10),
        ],
        1.5 * t_m,
        vec![t_m / 2.0, 1.5 * t_m],
    )?;
    Ok(ProtocolResult {
        name: "mws-transfer",
        expected: vec![
            // recorded after the flips
            expected(t_m / 2.0, "MWS on 6,7,9,10 (flipped)", 15, &[(6, -h), (7, -h), (9, -h), (10, h)])?,
            ExpectedState {
                time: 1.5 * t_m,
                label: "MWS on 3,4,12,13",
                state: moved.clone(),
            },
        ],
        observe_at: 1.5 * t_m,
        merit: FigureOfMerit::Fidelity(moved),
        network,
        protocol,
    })
}

/// Every canned protocol at its reference size, for bulk checks.
pub fn catalogue() -> Result<Vec<ProtocolResult>, ProtocolError> {
    let mut all = Vec::new();
    for n in [4, 6, 8, 10, 12] {
        all.push(free_two_chain(n)?);
        all.push(router_two_chain(n)?);
        all.push(entangle_phase_two_chain(n)?);
        all.push(entangle_center_two_chain(n)?);
    }
    all.push(unequal_router(3, 4)?);
    all.push(unequal_router(4, 3)?);
    all.push(unequal_entangle(3, 4)?);
    all.push(w_state(3)?);
    all.push(w_state(4)?);
    all.push(mws_9()?);
    all.push(mws_9_with_flips()?);
    all.push(mws_12()?);
    all.push(mws_12_equal_mirror()?);
    all.push(max_entangle_12()?);
    all.push(m_chain_router(3)?);
    all.push(m_chain_router(5)?);
    all.push(mws_transfer_15()?);
    Ok(all)
}
