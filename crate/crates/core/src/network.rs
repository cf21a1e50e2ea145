//! Perfect-state-transfer chains and their fusion into networks.
//!
//! A network is a list of PST chains laid out end to end in a global site
//! numbering. Consecutive chains are fused by conjugating the block-diagonal
//! Hamiltonian with a unitary that is the identity except for a 2x2 Hadamard
//! block on (last site of chain k, first site of chain k+1). The conjugation
//! leaves the spectrum untouched, so each component keeps its PST timing.
//!
//! Public site labels are 1-based throughout the crate; chain indices are
//! 0-based (chain `A` is index 0).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigh, HermitianMatrix, LinalgError};

/// Couplings smaller than this (relative to the largest) after the
/// junction transform are treated as exact zeros.
const ZERO_COUPLING_RTOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),
    #[error("j_max must be positive and finite, got {0}")]
    InvalidJmax(f64),
    #[error("network needs at least one chain")]
    NoChains,
    #[error("hadamard join needs at least two chains, got {0}")]
    TooFewChains(usize),
    #[error("junction pairs overlap at site {0}")]
    OverlappingJunction(usize),
    #[error("chain index {index} out of range for {count} chains")]
    ChainIndex { index: usize, count: usize },
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("self coupling on site {0}")]
    SelfCoupling(usize),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One PST chain: `length` sites with peak coupling `j_max` in the middle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub length: usize,
    #[serde(default = "default_j_max")]
    pub j_max: f64,
}

fn default_j_max() -> f64 {
    1.0
}

impl ChainSpec {
    pub fn new(length: usize, j_max: f64) -> Result<Self, NetworkError> {
        let spec = Self { length, j_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.length < 2 {
            return Err(NetworkError::ChainTooShort(self.length));
        }
        if !(self.j_max > 0.0 && self.j_max.is_finite()) {
            return Err(NetworkError::InvalidJmax(self.j_max));
        }
        Ok(())
    }

    /// The prefactor `J0` in `J_{i,i+1} = J0 sqrt(i (N - i))`.
    pub fn coupling_scale(&self) -> f64 {
        let n = self.length as f64;
        if self.length % 2 == 0 {
            2.0 * self.j_max / n
        } else {
            self.j_max / (n * n / 4.0 - 0.25).sqrt()
        }
    }

    pub fn couplings(&self) -> Vec<f64> {
        let j0 = self.coupling_scale();
        let n = self.length;
        (1..n).map(|i| j0 * ((i * (n - i)) as f64).sqrt()).collect()
    }

    pub fn mirror_time(&self) -> f64 {
        PI / (2.0 * self.coupling_scale())
    }
}

/// The `N - 1` PST couplings of an `n`-site chain with peak `j_max`.
pub fn pst_couplings(n: usize, j_max: f64) -> Result<Vec<f64>, NetworkError> {
    Ok(ChainSpec::new(n, j_max)?.couplings())
}

/// Mirroring time `π / (2 J0)`.
pub fn mirror_time(n: usize, j_max: f64) -> Result<f64, NetworkError> {
    Ok(ChainSpec::new(n, j_max)?.mirror_time())
}

/// The peak coupling that gives an `n`-site chain the mirror time `t_m`.
pub fn jmax_for_mirror_time(n: usize, t_m: f64) -> f64 {
    let nf = n as f64;
    if n % 2 == 0 {
        PI * nf / (4.0 * t_m)
    } else {
        PI * ((nf * nf - 1.0) / 4.0).sqrt() / (2.0 * t_m)
    }
}

/// Per-chain mirror times, indexed like the chains of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorTimes(Vec<f64>);

impl MirrorTimes {
    pub fn get(&self, chain: usize) -> Option<f64> {
        self.0.get(chain).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// True when every chain shares the same mirror time within `tol`.
    pub fn all_equal(&self, tol: f64) -> bool {
        self.0.windows(2).all(|w| (w[0] - w[1]).abs() <= tol * w[0].abs().max(1.0))
    }
}

/// Chains fused end-to-end by Hadamard junctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    chains: Vec<ChainSpec>,
}

impl NetworkSpec {
    pub fn new(chains: Vec<ChainSpec>) -> Result<Self, NetworkError> {
        let spec = Self { chains };
        spec.validate()?;
        Ok(spec)
    }

    /// `count` identical chains.
    pub fn uniform(count: usize, length: usize, j_max: f64) -> Result<Self, NetworkError> {
        Self::new(vec![ChainSpec::new(length, j_max)?; count])
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.chains.is_empty() {
            return Err(NetworkError::NoChains);
        }
        self.chains.iter().try_for_each(ChainSpec::validate)
    }

    pub fn chains(&self) -> &[ChainSpec] {
        &self.chains
    }

    pub fn chain(&self, index: usize) -> Result<&ChainSpec, NetworkError> {
        self.chains.get(index).ok_or(NetworkError::ChainIndex {
            index,
            count: self.chains.len(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.chains.iter().map(|c| c.length).sum()
    }

    /// 1-based label of the first site of chain `index`.
    pub fn first_site(&self, index: usize) -> usize {
        1 + self.chains[..index].iter().map(|c| c.length).sum::<usize>()
    }

    /// 1-based label of the last site of chain `index`.
    pub fn last_site(&self, index: usize) -> usize {
        self.first_site(index) + self.chains[index].length - 1
    }

    /// Fused site pairs `(p, p + 1)`, 1-based.
    pub fn junction_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.chains.len().saturating_sub(1))
            .map(|k| (self.last_site(k), self.last_site(k) + 1))
            .collect()
    }

    pub fn mirror_times(&self) -> MirrorTimes {
        MirrorTimes(self.chains.iter().map(ChainSpec::mirror_time).collect())
    }

    /// Block-diagonal graph of the chains before fusion.
    pub fn uncoupled_graph(&self) -> CouplingGraph {
        let mut graph = CouplingGraph::new(self.n_sites());
        for (k, chain) in self.chains.iter().enumerate() {
            let offset = self.first_site(k);
            for (i, j) in chain.couplings().into_iter().enumerate() {
                graph.couplings.insert((offset - 1 + i, offset + i), j);
            }
        }
        graph
    }

    /// The device graph: a bare chain for one chain, the Hadamard-fused
    /// network otherwise.
    pub fn graph(&self) -> Result<CouplingGraph, NetworkError> {
        if self.chains.len() == 1 {
            Ok(chain_graph(&self.chains[0]))
        } else {
            hadamard_join(self)
        }
    }
}

/// Symmetric real couplings plus on-site energies; the single-excitation
/// Hamiltonian in graph form.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n_sites: usize,
    // 0-based (i, j) with i < j
    couplings: BTreeMap<(usize, usize), f64>,
    onsite: Vec<f64>,
    provenance: Option<NetworkSpec>,
}

impl CouplingGraph {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            couplings: BTreeMap::new(),
            onsite: vec![0.0; n_sites],
            provenance: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn provenance(&self) -> Option<&NetworkSpec> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, spec: NetworkSpec) -> Self {
        self.provenance = Some(spec);
        self
    }

    fn check_site(&self, site: usize) -> Result<usize, NetworkError> {
        if site == 0 || site > self.n_sites {
            return Err(NetworkError::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(site - 1)
    }

    /// Sets `J_{i,j} = J_{j,i}` (1-based). A zero value removes the edge.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<(), NetworkError> {
        let (a, b) = (self.check_site(i)?, self.check_site(j)?);
        if a == b {
            return Err(NetworkError::SelfCoupling(i));
        }
        if !value.is_finite() {
            return Err(NetworkError::NonFinite(value));
        }
        let key = (a.min(b), a.max(b));
        if value == 0.0 {
            self.couplings.remove(&key);
        } else {
            self.couplings.insert(key, value);
        }
        Ok(())
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 {
            return 0.0;
        }
        let key = ((i - 1).min(j - 1), (i - 1).max(j - 1));
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set_onsite(&mut self, site: usize, value: f64) -> Result<(), NetworkError> {
        let idx = self.check_site(site)?;
        if !value.is_finite() {
            return Err(NetworkError::NonFinite(value));
        }
        self.onsite[idx] = value;
        Ok(())
    }

    pub fn onsite(&self, site: usize) -> f64 {
        self.onsite[site - 1]
    }

    pub fn onsite_energies(&self) -> &[f64] {
        &self.onsite
    }

    /// Edges as `(i, j, J_ij)` with 1-based `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(a, b), &j)| (a + 1, b + 1, j))
    }

    pub fn edge_count(&self) -> usize {
        self.couplings.len()
    }

    pub(crate) fn couplings_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.couplings.values_mut()
    }

    pub(crate) fn onsite_mut(&mut self) -> &mut [f64] {
        &mut self.onsite
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_sites, self.n_sites);
        for (&(a, b), &j) in &self.couplings {
            m[(a, b)] = j;
            m[(b, a)] = j;
        }
        for (i, e) in self.onsite.iter().enumerate() {
            m[(i, i)] = *e;
        }
        m
    }

    pub fn hamiltonian(&self) -> HermitianMatrix {
        HermitianMatrix::from_real_symmetric(&self.to_matrix())
            .expect("coupling graphs are symmetric by construction")
    }

    /// Reads a real symmetric matrix back into graph form, dropping entries
    /// below `ZERO_COUPLING_RTOL` of the largest magnitude.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self, NetworkError> {
        let h = HermitianMatrix::from_real_symmetric(m)?;
        let n = h.dim();
        let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut graph = Self::new(n);
        for i in 0..n {
            graph.onsite[i] = m[(i, i)];
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                if v.abs() > ZERO_COUPLING_RTOL * scale {
                    graph.couplings.insert((i, j), v);
                }
            }
        }
        Ok(graph)
    }

    /// Ascending eigenvalues of the single-excitation Hamiltonian.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.hamiltonian()).eigenvalues().to_vec()
    }

    /// Text export: `i j J_ij` per edge, then `site i eps_i` per site.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j, v) in self.edges() {
            let _ = writeln!(out, "{i} {j} {v:?}");
        }
        for (i, e) in self.onsite.iter().enumerate() {
            let _ = writeln!(out, "site {} {:?}", i + 1, e);
        }
        out
    }

    /// Parses the format written by [`CouplingGraph::to_edge_list`]. Blank
    /// lines and `#` comments are ignored. The site count is the largest
    /// label mentioned.
    pub fn from_edge_list(text: &str) -> Result<Self, NetworkError> {
        enum Line {
            Edge(usize, usize, f64),
            Site(usize, f64),
        }
        let parse_err = |line: usize, message: String| NetworkError::Parse { line, message };
        let mut parsed = Vec::new();
        let mut n_sites = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let label = |s: &str| -> Result<usize, NetworkError> {
                match s.parse::<usize>() {
                    Ok(0) => Err(parse_err(line_no, "site labels are 1-based".into())),
                    Ok(v) => Ok(v),
                    Err(e) => Err(parse_err(line_no, format!("bad site label {s:?}: {e}"))),
                }
            };
            let real = |s: &str| -> Result<f64, NetworkError> {
                s.parse::<f64>()
                    .map_err(|e| parse_err(line_no, format!("bad number {s:?}: {e}")))
            };
            match fields.as_slice() {
                ["site", i, e] => {
                    let i = label(i)?;
                    n_sites = n_sites.max(i);
                    parsed.push((line_no, Line::Site(i, real(e)?)));
                }
                [i, j, v] => {
                    let (i, j) = (label(i)?, label(j)?);
                    n_sites = n_sites.max(i).max(j);
                    parsed.push((line_no, Line::Edge(i, j, real(v)?)));
                }
                _ => {
                    return Err(parse_err(
                        line_no,
                        "expected `i j J_ij` or `site i eps_i`".into(),
                    ))
                }
            }
        }
        let mut graph = Self::new(n_sites);
        for (line_no, line) in parsed {
            let result = match line {
                Line::Edge(i, j, v) => graph.set_coupling(i, j, v),
                Line::Site(i, e) => graph.set_onsite(i, e),
            };
            result.map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        Ok(graph)
    }
}

/// Path graph with PST couplings and zero on-site energies.
pub fn chain_graph(spec: &ChainSpec) -> CouplingGraph {
    let mut graph = CouplingGraph::new(spec.length);
    for (i, j) in spec.couplings().into_iter().enumerate() {
        graph.couplings.insert((i, i + 1), j);
    }
    graph.with_provenance(NetworkSpec {
        chains: vec![*spec],
    })
}

/// Identity except `[[1, 1], [1, -1]] / sqrt(2)` on every junction pair.
pub fn junction_unitary(spec: &NetworkSpec) -> Result<DMatrix<f64>, NetworkError> {
    let n = spec.n_sites();
    let mut u = DMatrix::identity(n, n);
    let mut used = vec![false; n];
    for (p, q) in spec.junction_pairs() {
        let (a, b) = (p - 1, q - 1);
        for site in [a, b] {
            if used[site] {
                return Err(NetworkError::OverlappingJunction(site + 1));
            }
            used[site] = true;
        }
        u[(a, a)] = FRAC_1_SQRT_2;
        u[(a, b)] = FRAC_1_SQRT_2;
        u[(b, a)] = FRAC_1_SQRT_2;
        u[(b, b)] = -FRAC_1_SQRT_2;
    }
    Ok(u)
}

/// Fuses consecutive chains: `H' = U H U†` with `H` the uncoupled
/// block-diagonal Hamiltonian and `U` from [`junction_unitary`].
pub fn hadamard_join(spec: &NetworkSpec) -> Result<CouplingGraph, NetworkError> {
    spec.validate()?;
    if spec.chains.len() < 2 {
        return Err(NetworkError::TooFewChains(spec.chains.len()));
    }
    let u = junction_unitary(spec)?;
    let h = spec.uncoupled_graph().to_matrix();
    let transformed = &u * h * u.transpose();
    Ok(CouplingGraph::from_matrix(&transformed)?.with_provenance(spec.clone()))
}

/// Returns `spec` with chain `target`'s peak coupling changed so that its
/// mirror time equals that of chain `reference`.
pub fn retune_jmax(
    spec: &NetworkSpec,
    target: usize,
    reference: usize,
) -> Result<NetworkSpec, NetworkError> {
    let t_ref = spec.chain(reference)?.mirror_time();
    let length = spec.chain(target)?.length;
    let mut chains = spec.chains.clone();
    if target != reference {
        chains[target] = ChainSpec::new(length, jmax_for_mirror_time(length, t_ref))?;
    }
    NetworkSpec::new(chains)
}
