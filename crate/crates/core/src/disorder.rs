//! Static Gaussian disorder on couplings (off-diagonal) or on-site energies
//! (diagonal), applied to the fused device graph.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::CouplingGraph;

/// Standard deviation of the unit draws `d`, `1 / (2 sqrt 3)`.
pub const DEFAULT_WIDTH: f64 = 0.288_675_134_594_812_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DisorderError {
    #[error("disorder strength must be finite and >= 0, got {0}")]
    NegativeStrength(f64),
    #[error("disorder width must be finite and > 0, got {0}")]
    InvalidWidth(f64),
    #[error("reference j_max must be finite and > 0, got {0}")]
    InvalidJmax(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderKind {
    None,
    Diagonal,
    OffDiagonal,
}

impl DisorderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DisorderKind::None => "none",
            DisorderKind::Diagonal => "diagonal",
            DisorderKind::OffDiagonal => "off_diagonal",
        }
    }
}

impl std::fmt::Display for DisorderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Disorder of strength `E`: perturbations are `E * d * j_max` with
/// `d ~ N(0, width^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub kind: DisorderKind,
    #[serde(default)]
    pub strength: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_j_max")]
    pub j_max: f64,
}

fn default_width() -> f64 {
    DEFAULT_WIDTH
}

fn default_j_max() -> f64 {
    1.0
}

impl DisorderSpec {
    pub fn new(kind: DisorderKind, strength: f64) -> Result<Self, DisorderError> {
        let spec = Self {
            kind,
            strength,
            width: DEFAULT_WIDTH,
            j_max: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self {
            kind: DisorderKind::None,
            strength: 0.0,
            width: DEFAULT_WIDTH,
            j_max: 1.0,
        }
    }

    pub fn with_width(mut self, width: f64) -> Result<Self, DisorderError> {
        self.width = width;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), DisorderError> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(DisorderError::NegativeStrength(self.strength));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(DisorderError::InvalidWidth(self.width));
        }
        if !(self.j_max > 0.0 && self.j_max.is_finite()) {
            return Err(DisorderError::InvalidJmax(self.j_max));
        }
        Ok(())
    }

    /// Standard deviation of a single perturbation, `E * width * j_max`.
    pub fn sigma(&self) -> f64 {
        self.strength * self.width * self.j_max
    }

    pub fn is_clean(&self) -> bool {
        self.kind == DisorderKind::None || self.strength == 0.0
    }
}

/// `(seed, stream)` names one reproducible ChaCha8 draw sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// SplitMix64 finalizer; derives independent child seeds (one per sweep
/// cell) from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One disorder realization of `graph`. Off-diagonal disorder perturbs each
/// existing edge once (symmetrically); absent edges stay absent. Diagonal
/// disorder adds `E d_i j_max` to every on-site energy. The input graph is
/// not modified.
pub fn sample_disorder(
    graph: &CouplingGraph,
    spec: &DisorderSpec,
    rng: &SeededRng,
) -> Result<CouplingGraph, DisorderError> {
    spec.validate()?;
    let mut out = graph.clone();
    if spec.is_clean() {
        return Ok(out);
    }
    let normal = Normal::new(0.0, spec.width).map_err(|_| DisorderError::InvalidWidth(spec.width))?;
    let scale = spec.strength * spec.j_max;
    let mut draws = rng.rng();
    match spec.kind {
        DisorderKind::None => {}
        DisorderKind::OffDiagonal => {
            for j in out.couplings_mut() {
                *j += scale * normal.sample(&mut draws);
            }
        }
        DisorderKind::Diagonal => {
            for e in out.onsite_mut() {
                *e += scale * normal.sample(&mut draws);
            }
        }
    }
    Ok(out)
}
