//! Fidelity, two-site reduced states, Wootters concurrence and entanglement
//! of formation, and ensemble statistics.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, PureState};
use crate::linalg::{eigh, HermitianMatrix, C64};

/// Tolerance on Hermiticity, trace and positivity of reduced states.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("dimension mismatch: {0} vs {1} sites")]
    DimensionMismatch(usize, usize),
    #[error("reduced state needs two distinct sites, got ({0}, {0})")]
    SameSite(usize),
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("density matrix trace is {0}, expected 1")]
    Trace(f64),
    #[error("density matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0:e} below zero")]
    NotPositive(f64),
    #[error("no values to average")]
    Empty,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// `|<target|state>|^2`.
pub fn fidelity(state: &PureState, target: &PureState) -> Result<f64, ObservableError> {
    if state.n_sites() != target.n_sites() {
        return Err(ObservableError::DimensionMismatch(state.n_sites(), target.n_sites()));
    }
    Ok(target.inner(state)?.norm_sqr().min(1.0))
}

/// Two-qubit density matrix in the ordered basis `|00>, |01>, |10>, |11>`,
/// first qubit = first site of the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTwoSiteState(Matrix4<C64>);

impl ReducedTwoSiteState {
    pub fn new(m: Matrix4<C64>) -> Result<Self, ObservableError> {
        let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > DENSITY_TOL {
            return Err(ObservableError::NotHermitian(asym));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(ObservableError::Trace(trace.re));
        }
        let min_eig = hermitian_eigenvalues(&m)[0];
        if min_eig < -DENSITY_TOL {
            return Err(ObservableError::NotPositive(min_eig));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    /// Equal-weight mixture of several reduced states.
    pub fn average(states: &[ReducedTwoSiteState]) -> Result<Self, ObservableError> {
        if states.is_empty() {
            return Err(ObservableError::Empty);
        }
        let sum = states.iter().fold(Matrix4::zeros(), |acc, s| acc + s.0);
        Self::new(sum / C64::new(states.len() as f64, 0.0))
    }
}

fn hermitian_eigenvalues(m: &Matrix4<C64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let dm = DMatrix::from_iterator(4, 4, sym.iter().copied());
    eigh(&HermitianMatrix::new(dm).expect("symmetrized")).eigenvalues().to_vec()
}

/// Partial trace of a single-excitation state onto sites `(i, j)`.
pub fn reduce_two_sites(
    state: &PureState,
    i: usize,
    j: usize,
) -> Result<ReducedTwoSiteState, ObservableError> {
    let n = state.n_sites();
    for site in [i, j] {
        if site == 0 || site > n {
            return Err(ObservableError::SiteOutOfRange { site, n_sites: n });
        }
    }
    if i == j {
        return Err(ObservableError::SameSite(i));
    }
    let (a_i, a_j) = (state.amplitude(i), state.amplitude(j));
    let zero = C64::new(0.0, 0.0);
    let vacuum = (1.0 - a_i.norm_sqr() - a_j.norm_sqr()).max(0.0);
    let mut m = Matrix4::from_element(zero);
    m[(0, 0)] = C64::new(vacuum, 0.0);
    m[(1, 1)] = C64::new(a_j.norm_sqr(), 0.0);
    m[(2, 2)] = C64::new(a_i.norm_sqr(), 0.0);
    m[(1, 2)] = a_j * a_i.conj();
    m[(2, 1)] = a_i * a_j.conj();
    ReducedTwoSiteState::new(m)
}

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`, with λ the descending
/// square roots of the eigenvalues of `ρ ρ~`.
///
/// X-shaped states (everything reduced from a single-excitation state) use
/// the exact closed form; anything else goes through the singular values of
/// `sqrt(ρ) sqrt(ρ~)`.
pub fn concurrence(rho: &ReducedTwoSiteState) -> Result<f64, ObservableError> {
    match x_state_concurrence(rho) {
        Some(c) => Ok(c),
        None => Ok(general_concurrence(rho)),
    }
}

fn x_state_concurrence(rho: &ReducedTwoSiteState) -> Option<f64> {
    let m = &rho.0;
    let zero = |r: usize, c: usize| m[(r, c)] == C64::new(0.0, 0.0);
    let outside = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)];
    if !outside.iter().all(|&(r, c)| zero(r, c)) {
        return None;
    }
    let p = |k: usize| m[(k, k)].re.max(0.0);
    let a = m[(1, 2)].norm() - (p(0) * p(3)).sqrt();
    let b = m[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    Some((2.0 * a.max(b)).clamp(0.0, 1.0))
}

fn general_concurrence(rho: &ReducedTwoSiteState) -> f64 {
    let m = rho.0;
    // σy ⊗ σy
    let mut yy = Matrix4::<C64>::zeros();
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);

    let sqrt_rho = {
        let dm = DMatrix::from_iterator(4, 4, m.iter().copied());
        let d = eigh(&HermitianMatrix::new((&dm + dm.adjoint()) * C64::new(0.5, 0.0)).expect("symmetrized"));
        let v = d.eigenvectors();
        let mut scaled = v.clone();
        for (k, lambda) in d.eigenvalues().iter().enumerate() {
            scaled.column_mut(k).scale_mut(lambda.max(0.0).sqrt());
        }
        let s = scaled * v.adjoint();
        Matrix4::from_iterator(s.iter().copied())
    };
    // sqrt(rho_tilde) = Y conj(sqrt rho) Y, so the Wootters lambdas are the
    // singular values of sqrt(rho) sqrt(rho_tilde); no square roots of noise.
    let a = sqrt_rho * (yy * sqrt_rho.conjugate() * yy);
    let mut l: Vec<f64> = a.singular_values().iter().copied().collect();
    l.sort_by(|x, y| y.total_cmp(x));
    (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0)
}

/// `h(x) = -x log2 x - (1 - x) log2 (1 - x)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Entanglement of formation of a two-qubit state.
pub fn eof(rho: &ReducedTwoSiteState) -> Result<f64, ObservableError> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

/// EOF between sites `i` and `j` of a pure single-excitation state.
pub fn pair_eof(state: &PureState, i: usize, j: usize) -> Result<f64, ObservableError> {
    eof(&reduce_two_sites(state, i, j)?)
}

/// How an ensemble EOF is formed from per-realization reduced states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EofConvention {
    /// Mean of per-realization EOF values.
    #[default]
    PerRealization,
    /// EOF of the mean reduced state.
    MeanState,
}

pub fn ensemble_eof(
    states: &[ReducedTwoSiteState],
    convention: EofConvention,
) -> Result<f64, ObservableError> {
    match convention {
        EofConvention::PerRealization => {
            let values = states.iter().map(eof).collect::<Result<Vec<_>, _>>()?;
            Ok(ensemble_average(&values)?.mean)
        }
        EofConvention::MeanState => eof(&ReducedTwoSiteState::average(states)?),
    }
}

/// `Tr(ρ̄ |target><target|)` with `ρ̄` the ensemble density matrix.
pub fn ensemble_fidelity(states: &[PureState], target: &PureState) -> Result<f64, ObservableError> {
    if states.is_empty() {
        return Err(ObservableError::Empty);
    }
    let n = target.n_sites();
    let mut rho = DMatrix::<C64>::zeros(n, n);
    for s in states {
        if s.n_sites() != n {
            return Err(ObservableError::DimensionMismatch(s.n_sites(), n));
        }
        let v = s.as_vector().as_dvector();
        rho += v * v.adjoint();
    }
    rho /= C64::new(states.len() as f64, 0.0);
    let t = target.as_vector().as_dvector();
    Ok((t.adjoint() * rho * t)[(0, 0)].re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std: f64,
    pub std_of_mean: f64,
    pub count: usize,
}

/// Mean (compensated sum), sample standard deviation and standard error.
pub fn ensemble_average(values: &[f64]) -> Result<EnsembleStats, ObservableError> {
    if values.is_empty() {
        return Err(ObservableError::Empty);
    }
    let k = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / k;
    let std = if values.len() > 1 {
        (neumaier_sum(values.iter().map(|x| (x - mean) * (x - mean))) / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(EnsembleStats {
        mean,
        std,
        std_of_mean: std / k.sqrt(),
        count: values.len(),
    })
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Running ensemble statistics that merge associatively (Chan et al.
/// pairwise update), keeping the raw values alongside.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnsembleAccumulator {
    values: Vec<f64>,
    mean: f64,
    m2: f64,
}

impl EnsembleAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.values.push(x);
        let k = self.values.len() as f64;
        let delta = x - self.mean;
        self.mean += delta / k;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &EnsembleAccumulator) {
        if other.values.is_empty() {
            return;
        }
        if self.values.is_empty() {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.values.len() as f64, other.values.len() as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.values.extend_from_slice(&other.values);
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        if self.values.len() > 1 {
            (self.m2.max(0.0) / (self.values.len() - 1) as f64).sqrt()
        } else {
            0.0
        }
    }

    pub fn stats(&self) -> Result<EnsembleStats, ObservableError> {
        if self.values.is_empty() {
            return Err(ObservableError::Empty);
        }
        let std = self.std();
        Ok(EnsembleStats {
            mean: self.mean,
            std,
            std_of_mean: std / (self.values.len() as f64).sqrt(),
            count: self.values.len(),
        })
    }
}

impl FromIterator<f64> for EnsembleAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}
