//! TOML run configuration. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::disorder::{DisorderKind, DisorderSpec};
use crate::network::{ChainSpec, NetworkSpec};
use crate::protocols::{self, FigureOfMerit, ProtocolError, ProtocolResult};

pub const DEFAULT_REALIZATIONS: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 201;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<RunDisorder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_scan: Option<PhaseScanConfig>,
}

impl Config {
    /// Parses TOML; errors carry the offending line and column.
    pub fn parse(text: &str) -> Result<Self, String> {
        let config: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        if let Some(net) = &config.network {
            net.validate().map_err(|e| format!("[network]: {e}"))?;
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }
}

/// A canned protocol and its size parameters, selected by `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProtocolConfig {
    Free {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    /// Two-chain router with `n`, or an M-chain router with `chains`.
    Router {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chains: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chain_length: Option<usize>,
    },
    EntPhase {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        /// Degrees; 90 when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
    EntCenter {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    PhaseSense {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        theta: f64,
    },
    UnequalRouter {
        n_a: usize,
        n_b: usize,
    },
    /// Retunes the shorter chain unless `retune = false`.
    UnequalEnt {
        n_a: usize,
        n_b: usize,
        #[serde(default = "yes")]
        retune: bool,
    },
    /// Phase protocol on an unretuned pair, observed at `observe` mirror times of chain A.
    UnequalEntPhase {
        n_a: usize,
        n_b: usize,
        #[serde(default = "two")]
        observe: f64,
    },
    WState {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chain_length: Option<usize>,
    },
    /// `sites = 9` (optionally with the double flip) or `sites = 12`.
    Mws {
        sites: usize,
        #[serde(default)]
        flips: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j_max_b: Option<f64>,
    },
    MwsTransfer {},
    MaxEnt {},
}

fn yes() -> bool {
    true
}

fn two() -> f64 {
    2.0
}

fn need(value: Option<usize>, protocol: &str, key: &str) -> Result<usize, ProtocolError> {
    value.ok_or_else(|| ProtocolError::WrongTopology(format!("protocol `{protocol}` needs `{key}`")))
}

impl ProtocolConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolConfig::Free { .. } => "free",
            ProtocolConfig::Router { .. } => "router",
            ProtocolConfig::EntPhase { .. } => "ent-phase",
            ProtocolConfig::EntCenter { .. } => "ent-center",
            ProtocolConfig::PhaseSense { .. } => "phase-sense",
            ProtocolConfig::UnequalRouter { .. } => "unequal-router",
            ProtocolConfig::UnequalEnt { .. } => "unequal-ent",
            ProtocolConfig::UnequalEntPhase { .. } => "unequal-ent-phase",
            ProtocolConfig::WState { .. } => "w-state",
            ProtocolConfig::Mws { .. } => "mws",
            ProtocolConfig::MwsTransfer {} => "mws-transfer",
            ProtocolConfig::MaxEnt {} => "max-ent",
        }
    }

    /// Whether the size axis of a sweep is the total site count `n`.
    pub fn sized_by_n(&self) -> bool {
        matches!(
            self,
            ProtocolConfig::Free { .. }
                | ProtocolConfig::EntPhase { .. }
                | ProtocolConfig::EntCenter { .. }
                | ProtocolConfig::PhaseSense { .. }
                | ProtocolConfig::Router { chains: None, .. }
        )
    }

    /// The same protocol with its sweep size parameter replaced.
    pub fn with_size(&self, size: usize) -> Result<Self, String> {
        let mut out = self.clone();
        match &mut out {
            ProtocolConfig::Free { n }
            | ProtocolConfig::EntPhase { n, .. }
            | ProtocolConfig::EntCenter { n }
            | ProtocolConfig::PhaseSense { n, .. } => *n = Some(size),
            ProtocolConfig::Router { n, chains, .. } => {
                if chains.is_some() {
                    *chains = Some(size);
                } else {
                    *n = Some(size);
                }
            }
            ProtocolConfig::WState { chain_length } => *chain_length = Some(size),
            other => return Err(format!("protocol `{}` has no size parameter to sweep", other.name())),
        }
        Ok(out)
    }

    /// Builds the protocol; `network` replaces the default topology for the
    /// protocols that accept one.
    pub fn build(&self, network: Option<&NetworkSpec>) -> Result<ProtocolResult, ProtocolError> {
        let name = self.name();
        let takes_network = matches!(
            self,
            ProtocolConfig::UnequalEnt { .. }
                | ProtocolConfig::WState { .. }
                | ProtocolConfig::Mws { sites: 12, .. }
                | ProtocolConfig::MaxEnt {}
        );
        if network.is_some() && !takes_network {
            return Err(ProtocolError::WrongTopology(format!(
                "protocol `{name}` builds its own network; drop [network] or use unequal-ent, w-state, mws (12) or max-ent"
            )));
        }
        match self {
            ProtocolConfig::Free { n } => protocols::free_two_chain(need(*n, name, "n")?),
            ProtocolConfig::Router { n, chains, chain_length } => match (n, chains) {
                (Some(n), None) => protocols::router_two_chain(*n),
                (None, Some(m)) => protocols::m_chain_router_with(*m, chain_length.unwrap_or(3)),
                _ => Err(ProtocolError::WrongTopology(
                    "router needs exactly one of `n` (two chains) or `chains` (M chains)".into(),
                )),
            },
            ProtocolConfig::EntPhase { n, theta } => protocols::entangle_phase_two_chain_with(
                need(*n, name, "n")?,
                theta.unwrap_or(90.0).to_radians(),
            ),
            ProtocolConfig::EntCenter { n } => protocols::entangle_center_two_chain(need(*n, name, "n")?),
            ProtocolConfig::PhaseSense { n, theta } => {
                protocols::entangle_phase_two_chain_with(need(*n, name, "n")?, theta.to_radians()).map(|mut r| {
                    r.name = "phase-sense";
                    r
                })
            }
            ProtocolConfig::UnequalRouter { n_a, n_b } => protocols::unequal_router(*n_a, *n_b),
            ProtocolConfig::UnequalEnt { n_a, n_b, retune } => match network {
                Some(net) => protocols::unequal_entangle_on(net),
                None if *retune => protocols::unequal_entangle(*n_a, *n_b),
                None => protocols::unequal_entangle_on(&NetworkSpec::new(vec![
                    ChainSpec::new(*n_a, 1.0)?,
                    ChainSpec::new(*n_b, 1.0)?,
                ])?),
            },
            ProtocolConfig::UnequalEntPhase { n_a, n_b, observe } => {
                protocols::unequal_phase_entangle(*n_a, *n_b, *observe)
            }
            ProtocolConfig::WState { chain_length } => match network {
                Some(net) => protocols::w_state_on(net),
                None => protocols::w_state(need(*chain_length, name, "chain_length")?),
            },
            ProtocolConfig::Mws { sites: 9, flips, j_max_b: None } => {
                if *flips {
                    protocols::mws_9_with_flips()
                } else {
                    protocols::mws_9()
                }
            }
            ProtocolConfig::Mws { sites: 12, flips: false, j_max_b } => {
                if let Some(net) = network {
                    return protocols::mws_12_on(net);
                }
                match j_max_b {
                    None => protocols::mws_12(),
                    Some(j) if *j == 1.0 => protocols::mws_12_equal_mirror(),
                    Some(j) => protocols::mws_12_on(&NetworkSpec::new(vec![
                        ChainSpec::new(4, 1.0)?,
                        ChainSpec::new(4, *j)?,
                        ChainSpec::new(4, 1.0)?,
                    ])?),
                }
            }
            ProtocolConfig::Mws { .. } => Err(ProtocolError::WrongTopology(
                "mws supports `sites = 9` (with optional `flips`) or `sites = 12` (with optional `j_max_b`)".into(),
            )),
            ProtocolConfig::MwsTransfer {} => protocols::mws_transfer_15(),
            ProtocolConfig::MaxEnt {} => match network {
                Some(net) => protocols::max_entangle_12_on(net),
                None => protocols::max_entangle_12(),
            },
        }
    }
}

/// Either an explicit list or an inclusive `{ start, stop, step }` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    List(Vec<T>),
    Range(RangeSpec<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec<T> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl Grid<usize> {
    pub fn values(&self) -> Result<Vec<usize>, String> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if r.step == 0 {
                    return Err("grid step must be positive".into());
                }
                (r.start..=r.stop).step_by(r.step).collect()
            }
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(v)
    }
}

impl Grid<f64> {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if !(r.step > 0.0 && r.step.is_finite()) {
                    return Err("grid step must be positive".into());
                }
                let count = ((r.stop - r.start) / r.step + 1e-9).floor();
                if !(count >= 0.0) {
                    return Err("grid is empty".into());
                }
                (0..=count as usize)
                    .map(|k| round12(r.start + k as f64 * r.step))
                    .collect()
            }
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("grid values must be finite".into());
        }
        Ok(v)
    }
}

// Keeps 0.1 * 3 from printing as 0.30000000000000004.
fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn default_size_grid() -> Grid<usize> {
    Grid::Range(RangeSpec { start: 4, stop: 100, step: 2 })
}

pub fn default_strength_grid() -> Grid<f64> {
    Grid::Range(RangeSpec { start: 0.0, stop: 0.25, step: 0.01 })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    /// Time expression; the protocol's own duration when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub amplitudes: bool,
}

/// Optional disorder ensemble reported alongside a clean `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDisorder {
    pub kind: DisorderKind,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
}

impl RunDisorder {
    pub fn spec(&self) -> Result<DisorderSpec, String> {
        let spec = DisorderSpec::new(self.kind, self.strength).map_err(|e| e.to_string())?;
        match self.width {
            Some(w) => spec.with_width(w).map_err(|e| e.to_string()),
            None => Ok(spec),
        }
    }
}

/// What a sweep cell averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Fidelity against the protocol's target state.
    Fidelity,
    /// EOF between two sites.
    Eof([usize; 2]),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Sweep axis: `n` for two-chain protocols, `chains` for the M-chain
    /// router, `chain_length` for the W state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Grid<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<Grid<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<DisorderKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    /// Time expression overriding the protocol's readout time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observe: Option<String>,
}

impl SweepConfig {
    pub fn realizations(&self) -> Result<usize, String> {
        match self.realizations.unwrap_or(DEFAULT_REALIZATIONS) {
            0 => Err("sweep.realizations must be >= 1".into()),
            k => Ok(k),
        }
    }

    pub fn strengths(&self) -> Result<Vec<f64>, String> {
        let v = self.strength.clone().unwrap_or_else(default_strength_grid).values()?;
        if v.iter().any(|&e| e < 0.0) {
            return Err("sweep.strength values must be >= 0".into());
        }
        Ok(v)
    }

    pub fn kinds(&self) -> Result<Vec<DisorderKind>, String> {
        let v = self
            .kinds
            .clone()
            .unwrap_or_else(|| vec![DisorderKind::Diagonal, DisorderKind::OffDiagonal]);
        if v.is_empty() {
            return Err("sweep.kinds is empty".into());
        }
        Ok(v)
    }

    pub fn merit(&self, base: &FigureOfMerit) -> FigureOfMerit {
        match &self.observable {
            None | Some(Observable::Fidelity) => base.clone(),
            Some(Observable::Eof([i, j])) => FigureOfMerit::Eof(*i, *j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseScanConfig {
    /// Total site counts; `[20, 50]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Grid<usize>>,
    /// Degrees in `[0, 360)`; every 15 degrees when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Grid<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    /// Disorder settings, one CSV block each; clean and diagonal 5% when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<Vec<DisorderSpec>>,
}

impl PhaseScanConfig {
    pub fn sizes(&self) -> Result<Vec<usize>, String> {
        self.n.clone().unwrap_or(Grid::List(vec![20, 50])).values()
    }

    pub fn thetas(&self) -> Result<Vec<f64>, String> {
        let v = self
            .theta
            .clone()
            .unwrap_or(Grid::Range(RangeSpec { start: 0.0, stop: 345.0, step: 15.0 }))
            .values()?;
        if v.iter().any(|&t| !(0.0..360.0).contains(&t)) {
            return Err("phase_scan.theta values must lie in [0, 360)".into());
        }
        Ok(v)
    }

    pub fn realizations(&self) -> Result<usize, String> {
        match self.realizations.unwrap_or(DEFAULT_REALIZATIONS) {
            0 => Err("phase_scan.realizations must be >= 1".into()),
            k => Ok(k),
        }
    }

    pub fn settings(&self) -> Result<Vec<DisorderSpec>, String> {
        let v = self.disorder.clone().unwrap_or_else(|| {
            vec![
                DisorderSpec::none(),
                DisorderSpec::new(DisorderKind::Diagonal, 0.05).expect("valid"),
            ]
        });
        for d in &v {
            d.validate().map_err(|e| format!("phase_scan.disorder: {e}"))?;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
seed = 7

[protocol]
name = "router"
n = 12

[trajectory]
duration = "4*t_m"
samples = 101
amplitudes = true

[disorder]
kind = "diagonal"
strength = 0.05
realizations = 50

[sweep]
size = [4, 6, 8]
strength = { start = 0.0, stop = 0.1, step = 0.05 }
kinds = ["off_diagonal"]
realizations = 20
observable = { eof = [1, 8] }
observe = "2*t_m"

[phase_scan]
n = [12]
theta = [0.0, 90.0]
realizations = 5
disorder = [{ kind = "none" }, { kind = "diagonal", strength = 0.05 }]
"#;

    #[test]
    fn full_config_parses_and_round_trips() {
        let c = Config::parse(FULL).unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.protocol, Some(ProtocolConfig::Router { n: Some(12), chains: None, chain_length: None }));
        let sweep = c.sweep.as_ref().unwrap();
        assert_eq!(sweep.strengths().unwrap(), vec![0.0, 0.05, 0.1]);
        assert_eq!(sweep.observable, Some(Observable::Eof([1, 8])));
        let again = Config::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(Config::parse(&again.to_toml()).unwrap(), again);
    }

    #[test]
    fn network_section() {
        let c = Config::parse("[network]\nchains = [{ length = 3 }, { length = 4, j_max = 0.5 }]\n").unwrap();
        let net = c.network.unwrap();
        assert_eq!(net.n_sites(), 7);
        assert_eq!(net.chains()[1].j_max, 0.5);
        let err = Config::parse("[network]\nchains = [{ length = 1 }]\n").unwrap_err();
        assert!(err.contains("at least 2"), "{err}");
    }

    #[test]
    fn unknown_keys_are_line_anchored_errors() {
        let err = Config::parse("seed = 1\n\n[network]\nchains = [{ length = 3, jmax = 1.0 }]\n").unwrap_err();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("jmax"), "{err}");
        let err = Config::parse("[protocol]\nname = \"router\"\nsize = 4\n").unwrap_err();
        assert!(err.contains("line"), "{err}");
        let err = Config::parse("[sweep]\nrealisations = 4\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_protocol_lists_alternatives() {
        let err = Config::parse("[protocol]\nname = \"teleport\"\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        for name in ["router", "ent-phase", "ent-center", "w-state", "mws", "max-ent"] {
            assert!(err.contains(name), "{err}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(default_size_grid().values().unwrap().len(), 49);
        let e = default_strength_grid().values().unwrap();
        assert_eq!(e.len(), 26);
        assert_eq!(e[3], 0.03);
        assert_eq!(e[25], 0.25);
        let bad: Grid<usize> = Grid::Range(RangeSpec { start: 4, stop: 8, step: 0 });
        assert!(bad.values().is_err());
        assert!(Grid::<f64>::List(vec![]).values().is_err());
        let neg = SweepConfig { strength: Some(Grid::List(vec![-0.1])), ..Default::default() };
        assert!(neg.strengths().is_err());
        let zero = SweepConfig { realizations: Some(0), ..Default::default() };
        assert!(zero.realizations().is_err());
        let scan = PhaseScanConfig { theta: Some(Grid::List(vec![360.0])), ..Default::default() };
        assert!(scan.thetas().is_err());
        assert_eq!(PhaseScanConfig::default().thetas().unwrap().len(), 24);
    }

    #[test]
    fn protocol_builders() {
        let cases = [
            "name = \"free\"\nn = 8",
            "name = \"router\"\nn = 6",
            "name = \"router\"\nchains = 5",
            "name = \"ent-phase\"\nn = 12",
            "name = \"ent-center\"\nn = 12",
            "name = \"phase-sense\"\nn = 12\ntheta = 45.0",
            "name = \"unequal-router\"\nn_a = 3\nn_b = 4",
            "name = \"unequal-ent\"\nn_a = 3\nn_b = 4",
            "name = \"unequal-ent-phase\"\nn_a = 3\nn_b = 4",
            "name = \"w-state\"\nchain_length = 3",
            "name = \"mws\"\nsites = 9",
            "name = \"mws\"\nsites = 9\nflips = true",
            "name = \"mws\"\nsites = 12",
            "name = \"mws\"\nsites = 12\nj_max_b = 1.0",
            "name = \"mws-transfer\"",
            "name = \"max-ent\"",
        ];
        for body in cases {
            let c = Config::parse(&format!("[protocol]\n{body}\n")).unwrap();
            let p = c.protocol.unwrap();
            let built = p.build(None).unwrap_or_else(|e| panic!("{body}: {e}"));
            assert!(!built.name.is_empty());
        }
        let retune_off = ProtocolConfig::UnequalEnt { n_a: 3, n_b: 4, retune: false };
        assert!(matches!(retune_off.build(None), Err(ProtocolError::NotRetuned(_))));
        let both = ProtocolConfig::Router { n: Some(6), chains: Some(2), chain_length: None };
        assert!(both.build(None).is_err());
        let missing = ProtocolConfig::EntCenter { n: None };
        assert!(missing.build(None).unwrap_err().to_string().contains("`n`"));
        let net = NetworkSpec::uniform(2, 3, 1.0).unwrap();
        assert!(ProtocolConfig::Router { n: Some(6), chains: None, chain_length: None }.build(Some(&net)).is_err());
        assert!(ProtocolConfig::Mws { sites: 10, flips: false, j_max_b: None }.build(None).is_err());
    }

    #[test]
    fn sizes_replace_the_right_parameter() {
        let r = ProtocolConfig::Router { n: None, chains: Some(3), chain_length: None };
        assert_eq!(r.with_size(4).unwrap(), ProtocolConfig::Router { n: None, chains: Some(4), chain_length: None });
        assert!(!r.sized_by_n());
        let e = ProtocolConfig::EntPhase { n: None, theta: None };
        assert!(e.sized_by_n());
        assert_eq!(e.with_size(20).unwrap(), ProtocolConfig::EntPhase { n: Some(20), theta: None });
        assert!(ProtocolConfig::MaxEnt {}.with_size(3).is_err());
    }
}
