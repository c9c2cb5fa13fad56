//! Two-channel (bipartite) states, conditional partner states, and the
//! correlation checks built on them.
//!
//! A bipartite state is an amplitude matrix `a` over chosen eigenbases of
//! the two channels: `|psi> = sum_ij a_ij |k_i>|l_j>`. Measuring channel 1
//! and finding index `n` leaves channel 2 in the row-normalized partner
//! state; the joint probability of the pair `(n, j)` is `|a_nj|^2`, and is
//! cross-checked internally against the tensor-projector expectation on the
//! flattened state. Composite index convention: `(i, j)` flattens to
//! `i * d2 + j` with channel 1 major.
//!
//! Channel measurements reuse the single-system engine by lifting a channel
//! basis to the product space: the product eigenvectors keep the channel's
//! eigenvalues, so eigenspace pooling and reduction implement "measure one
//! channel, leave the other alone" with no extra machinery.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    inner, orthonormal_completion, outer, tensor_state, ComplexMatrix, ObservableBasis,
    StateVector,
};
use crate::measurement::{born_distribution, run_trials, Ensemble, Substreams};
use crate::stats;
use crate::tol;

/// Which side of a bipartite state an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    One,
    Two,
}

/// Temporal order of the two channel measurements in a simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementOrder {
    Channel1First,
    Channel2First,
}

/// Pure state of two channels, expressed in one chosen eigenbasis per
/// channel. Amplitudes are stored rescaled to exact unit norm; inputs more
/// than `tol::BIPARTITE_NORM_ATOL` away from unit norm are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amplitudes: ComplexMatrix,
    basis1: ObservableBasis,
    basis2: ObservableBasis,
}

/// Outcome of conditioning on one channel index: the probability of that
/// index and the state the partner channel is left in.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalResult {
    pub channel_outcome: usize,
    pub probability: f64,
    pub partner_state: StateVector,
}

impl BipartiteState {
    pub fn new(
        amplitudes: ComplexMatrix,
        basis1: ObservableBasis,
        basis2: ObservableBasis,
    ) -> Result<Self> {
        if amplitudes.rows() != basis1.dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.rows(), right: basis1.dim() });
        }
        if amplitudes.cols() != basis2.dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.cols(), right: basis2.dim() });
        }
        let norm_sq: f64 = amplitudes.entries().iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::BIPARTITE_NORM_ATOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = Complex64::new(1.0 / norm_sq.sqrt(), 0.0);
        Ok(Self { amplitudes: amplitudes.scale(scale), basis1, basis2 })
    }

    /// Re-expresses a flat product-space state in the given channel bases:
    /// `a_ij = <k_i l_j | flat>`.
    pub fn from_flat(
        flat: &StateVector,
        basis1: ObservableBasis,
        basis2: ObservableBasis,
    ) -> Result<Self> {
        let (d1, d2) = (basis1.dim(), basis2.dim());
        if flat.dim() != d1 * d2 {
            return Err(Error::DimensionMismatch { left: flat.dim(), right: d1 * d2 });
        }
        let mut amplitudes = ComplexMatrix::zeros(d1, d2);
        for i in 0..d1 {
            for j in 0..d2 {
                let product = tensor_state(basis1.eigenvector(i), basis2.eigenvector(j));
                amplitudes[(i, j)] = inner(&product, flat)?;
            }
        }
        Self::new(amplitudes, basis1, basis2)
    }

    pub fn d1(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn d2(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[(i, j)]
    }

    pub fn basis1(&self) -> &ObservableBasis {
        &self.basis1
    }

    pub fn basis2(&self) -> &ObservableBasis {
        &self.basis2
    }

    fn channel_basis(&self, channel: Channel) -> &ObservableBasis {
        match channel {
            Channel::One => &self.basis1,
            Channel::Two => &self.basis2,
        }
    }

    /// Equivalent state on the flat product space, in the computational
    /// coordinates both channel bases are expressed in.
    pub fn flat(&self) -> StateVector {
        let dim = self.d1() * self.d2();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..self.d1() {
            for j in 0..self.d2() {
                let a = self.amplitudes[(i, j)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let product = tensor_state(self.basis1.eigenvector(i), self.basis2.eigenvector(j));
                for (acc, e) in amplitudes.iter_mut().zip(product.amplitudes()) {
                    *acc += a * e;
                }
            }
        }
        StateVector::normalized(amplitudes).expect("unit amplitude matrix flattens to unit state")
    }

    /// One channel's observable lifted to the product space: the product
    /// eigenvectors, each carrying that channel's eigenvalue. Measuring the
    /// lifted observable measures the channel and leaves the partner alone.
    pub fn lifted_basis(&self, channel: Channel) -> ObservableBasis {
        let mut eigenvectors = Vec::with_capacity(self.d1() * self.d2());
        let mut eigenvalues = Vec::with_capacity(self.d1() * self.d2());
        for i in 0..self.d1() {
            for j in 0..self.d2() {
                eigenvectors.push(tensor_state(
                    self.basis1.eigenvector(i),
                    self.basis2.eigenvector(j),
                ));
                eigenvalues.push(match channel {
                    Channel::One => self.basis1.eigenvalue(i),
                    Channel::Two => self.basis2.eigenvalue(j),
                });
            }
        }
        ObservableBasis::new(eigenvectors, eigenvalues)
            .expect("products of orthonormal bases are orthonormal")
    }

    /// Conditions on one channel coming out at eigenvector `index` and
    /// returns the normalized partner state: for channel 1 the row
    /// `a_n*` rescaled by the row weight, symmetrically for channel 2.
    pub fn conditional_state(&self, channel: Channel, index: usize) -> Result<ConditionalResult> {
        let (own_dim, partner_dim) = match channel {
            Channel::One => (self.d1(), self.d2()),
            Channel::Two => (self.d2(), self.d1()),
        };
        if index >= own_dim {
            return Err(Error::IndexOutOfRange { index, dim: own_dim });
        }
        let coeff = |t: usize| match channel {
            Channel::One => self.amplitudes[(index, t)],
            Channel::Two => self.amplitudes[(t, index)],
        };
        let probability: f64 = (0..partner_dim).map(|t| coeff(t).norm_sqr()).sum();
        if probability < tol::PROB_FLOOR {
            return Err(Error::ImpossibleOutcome { index, probability });
        }
        let partner_basis = match channel {
            Channel::One => &self.basis2,
            Channel::Two => &self.basis1,
        };
        let scale = 1.0 / probability.sqrt();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); partner_dim];
        for t in 0..partner_dim {
            let c = coeff(t) * scale;
            for (acc, e) in amplitudes.iter_mut().zip(partner_basis.eigenvector(t).amplitudes()) {
                *acc += c * e;
            }
        }
        Ok(ConditionalResult {
            channel_outcome: index,
            probability,
            partner_state: StateVector::normalized(amplitudes)?,
        })
    }

    /// Probability that channel 1 comes out at index `n` and channel 2 at
    /// index `j`. Computed as `|a_nj|^2` and cross-checked against the
    /// tensor-projector expectation on the flattened state; a disagreement
    /// beyond `tol::EXPECT_ATOL` is reported as an error.
    pub fn joint_probability(&self, n: usize, j: usize) -> Result<f64> {
        if n >= self.d1() {
            return Err(Error::IndexOutOfRange { index: n, dim: self.d1() });
        }
        if j >= self.d2() {
            return Err(Error::IndexOutOfRange { index: j, dim: self.d2() });
        }
        let direct = self.amplitudes[(n, j)].norm_sqr();

        let p1 = outer(self.basis1.eigenvector(n), self.basis1.eigenvector(n));
        let p2 = outer(self.basis2.eigenvector(j), self.basis2.eigenvector(j));
        let lifted = p1.kron(&p2);
        let flat = self.flat();
        let image = lifted.apply(&flat)?;
        let via_projector: f64 = flat
            .amplitudes()
            .iter()
            .zip(&image)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();

        let delta = (direct - via_projector).abs();
        if delta > tol::EXPECT_ATOL {
            return Err(Error::ConsistencyCheck { context: "joint probability routes", delta });
        }
        Ok(direct)
    }

    /// Exact joint distribution over pooled eigenvalue pairs, sorted by
    /// pair.
    pub fn joint_distribution(&self) -> Vec<((f64, f64), f64)> {
        let mut cells = Vec::new();
        for s1 in self.basis1.eigenspaces() {
            for s2 in self.basis2.eigenspaces() {
                let p: f64 = s1
                    .indices
                    .iter()
                    .flat_map(|&i| s2.indices.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| self.amplitudes[(i, j)].norm_sqr())
                    .sum();
                cells.push(((s1.eigenvalue, s2.eigenvalue), p));
            }
        }
        cells.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        cells
    }

    /// Exact marginal distribution of one channel over pooled eigenvalues,
    /// sorted by eigenvalue.
    pub fn marginal(&self, channel: Channel) -> Vec<(f64, f64)> {
        let partner = match channel {
            Channel::One => self.d2(),
            Channel::Two => self.d1(),
        };
        let weight = |index: usize| -> f64 {
            (0..partner)
                .map(|t| match channel {
                    Channel::One => self.amplitudes[(index, t)].norm_sqr(),
                    Channel::Two => self.amplitudes[(t, index)].norm_sqr(),
                })
                .sum()
        };
        let mut out: Vec<(f64, f64)> = self
            .channel_basis(channel)
            .eigenspaces()
            .into_iter()
            .map(|space| {
                (space.eigenvalue, space.indices.iter().map(|&i| weight(i)).sum::<f64>())
            })
            .collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        out
    }
}

/// One cell of the dual-ensemble comparison: the direct joint probability
/// and the two conditional routes to it. A route is `None` when its
/// conditioning outcome has probability below `tol::PROB_FLOOR`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCell {
    pub n: usize,
    pub j: usize,
    pub joint: f64,
    pub via_channel1: Option<f64>,
    pub via_channel2: Option<f64>,
}

/// Cell-by-cell result of [`dual_ensemble_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualEnsembleReport {
    pub cells: Vec<DualCell>,
    pub max_discrepancy: f64,
}

impl DualEnsembleReport {
    pub fn passes(&self) -> bool {
        self.max_discrepancy <= tol::EXPECT_ATOL
    }
}

/// Verifies that the joint distribution does not depend on which channel is
/// taken as the conditioning side: for every index pair, channel-1 weight
/// times partner overlap equals channel-2 weight times partner overlap
/// equals `|a_nj|^2`.
pub fn dual_ensemble_check(state: &BipartiteState) -> Result<DualEnsembleReport> {
    let mut cells = Vec::with_capacity(state.d1() * state.d2());
    let mut max_discrepancy: f64 = 0.0;
    for n in 0..state.d1() {
        for j in 0..state.d2() {
            let joint = state.joint_probability(n, j)?;
            let via_channel1 = match state.conditional_state(Channel::One, n) {
                Ok(cond) => {
                    let overlap = inner(state.basis2.eigenvector(j), &cond.partner_state)?;
                    Some(cond.probability * overlap.norm_sqr())
                }
                Err(Error::ImpossibleOutcome { .. }) => None,
                Err(e) => return Err(e),
            };
            let via_channel2 = match state.conditional_state(Channel::Two, j) {
                Ok(cond) => {
                    let overlap = inner(state.basis1.eigenvector(n), &cond.partner_state)?;
                    Some(cond.probability * overlap.norm_sqr())
                }
                Err(Error::ImpossibleOutcome { .. }) => None,
                Err(e) => return Err(e),
            };
            for via in [via_channel1, via_channel2].into_iter().flatten() {
                max_discrepancy = max_discrepancy.max((via - joint).abs());
            }
            cells.push(DualCell { n, j, joint, via_channel1, via_channel2 });
        }
    }
    Ok(DualEnsembleReport { cells, max_discrepancy })
}

pub(crate) fn chain_plan(steps: usize) -> Vec<String> {
    let mut labels: Vec<String> = (1..=steps).rev().map(|m| format!("ch1[-{m}]")).collect();
    labels.push("ch1".to_string());
    labels.push("ch2".to_string());
    labels
}

/// Simulates `n_trials` ideal measurements of both channels in the given
/// order. Stage labels are `ch1` and `ch2` regardless of order; trial `i`
/// uses substream `i`.
pub fn simulate_eprb(
    state: &BipartiteState,
    order: MeasurementOrder,
    n_trials: u64,
    streams: &Substreams,
) -> Result<Ensemble> {
    match order {
        MeasurementOrder::Channel1First => logical_chain_run(state, 0, n_trials, streams),
        MeasurementOrder::Channel2First => {
            let flat = state.flat();
            let lifted1 = state.lifted_basis(Channel::One);
            let lifted2 = state.lifted_basis(Channel::Two);
            run_trials(&flat, &[("ch2", &lifted2), ("ch1", &lifted1)], n_trials, streams)
        }
    }
}

/// Chain run only: `steps` extra channel-1 measurements before the final
/// `ch1` stage, then `ch2`. Earlier stages are labeled `ch1[-m]`, counting
/// how many repetitions they precede the final one by.
pub(crate) fn logical_chain_run(
    state: &BipartiteState,
    steps: usize,
    n_trials: u64,
    streams: &Substreams,
) -> Result<Ensemble> {
    let flat = state.flat();
    let lifted1 = state.lifted_basis(Channel::One);
    let lifted2 = state.lifted_basis(Channel::Two);
    let labels = chain_plan(steps);
    let plan: Vec<(&str, &ObservableBasis)> = labels
        .iter()
        .map(|label| {
            let basis = if label == "ch2" { &lifted2 } else { &lifted1 };
            (label.as_str(), basis)
        })
        .collect();
    run_trials(&flat, &plan, n_trials, streams)
}

/// Result of measuring the partner channel in a basis that contains the
/// conditional partner state versus one that does not.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowupReport {
    pub outcome_index: usize,
    pub conditional_probability: f64,
    /// Probability of the partner-state eigenvalue when the follow-up basis
    /// contains the partner state. One, up to numerics.
    pub aligned_probability: f64,
    /// Born distribution in a basis rotated away from the partner state.
    pub contrast_distribution: Vec<(f64, f64)>,
}

impl FollowupReport {
    /// Follow-up in the aligned basis is deterministic.
    pub fn is_deterministic(&self) -> bool {
        self.aligned_probability > 1.0 - tol::TRUTH_BAND
    }

    /// Follow-up in the rotated basis is genuinely spread: no outcome is
    /// near-certain.
    pub fn contrast_is_spread(&self) -> bool {
        self.contrast_distribution.iter().all(|&(_, w)| w < 1.0 - tol::TRUTH_BAND)
    }

    pub fn passes(&self) -> bool {
        self.is_deterministic() && self.contrast_is_spread()
    }
}

/// After channel 1 comes out at index `n`, measures the channel-2 partner
/// state in a deterministically completed basis whose first vector is the
/// partner state itself (eigenvalue 0), and in a contrast basis with its
/// first two vectors rotated by a quarter turn. The first is deterministic;
/// the second is not.
pub fn commuting_followup_check(state: &BipartiteState, n: usize) -> Result<FollowupReport> {
    if state.d2() < 2 {
        return Err(Error::DimensionMismatch { left: state.d2(), right: 2 });
    }
    let cond = state.conditional_state(Channel::One, n)?;
    let partner = &cond.partner_state;
    let d2 = state.d2();

    let vectors = orthonormal_completion(std::slice::from_ref(partner), d2)?;
    let eigenvalues: Vec<f64> = (0..d2).map(|i| i as f64).collect();
    let aligned = ObservableBasis::new(vectors.clone(), eigenvalues.clone())?;
    let aligned_dist = born_distribution(partner, &aligned)?;
    let aligned_probability = aligned_dist
        .iter()
        .find(|&&(k, _)| k == 0.0)
        .map_or(0.0, |&(_, w)| w);

    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut rotated = vectors;
    let (a, b) = (rotated[0].clone(), rotated[1].clone());
    let mix = |x: &StateVector, y: &StateVector, sign: f64| {
        StateVector::normalized(
            x.amplitudes()
                .iter()
                .zip(y.amplitudes())
                .map(|(p, q)| (p + sign * q) * half)
                .collect(),
        )
        .expect("rotation of unit vectors is unit")
    };
    rotated[0] = mix(&a, &b, 1.0);
    rotated[1] = mix(&a, &b, -1.0);
    let contrast = ObservableBasis::new(rotated, eigenvalues)?;
    let contrast_distribution = born_distribution(partner, &contrast)?;

    Ok(FollowupReport {
        outcome_index: n,
        conditional_probability: cond.probability,
        aligned_probability,
        contrast_distribution,
    })
}

/// Result of running a chain of repeated channel-1 measurements before the
/// channel-2 measurement, against a single-measurement reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub steps: usize,
    pub trials: u64,
    /// Trials in which the repeated channel-1 stages did not all agree.
    pub repeat_violations: u64,
    /// Distance between the chain's final joint distribution and the
    /// reference run's.
    pub tv_distance: f64,
    pub tv_tolerance: f64,
    pub chain_joint: Vec<((f64, f64), f64)>,
    pub reference_joint: Vec<((f64, f64), f64)>,
}

impl ChainReport {
    pub fn passes(&self) -> bool {
        self.repeat_violations == 0 && self.tv_distance <= self.tv_tolerance
    }
}

/// Measures channel 1 `steps + 1` times and then channel 2 once, per trial,
/// and compares against a plain both-channels run on independent
/// substreams. With `steps == 0` the chain run is exactly
/// [`simulate_eprb`] with channel 1 first: same seed, same records.
pub fn logical_chain_check(
    state: &BipartiteState,
    steps: usize,
    n_trials: u64,
    streams: &Substreams,
) -> Result<ChainReport> {
    let chain = logical_chain_run(state, steps, n_trials, streams)?;
    let reference = simulate_eprb(
        state,
        MeasurementOrder::Channel1First,
        n_trials,
        &streams.shifted(n_trials),
    )?;

    let labels = chain_plan(steps);
    let repeat_violations = chain
        .trials()
        .iter()
        .filter(|t| {
            let first = t.stages[0].outcome.eigenvalue;
            labels[..=steps].iter().any(|label| {
                t.stage(label).is_none_or(|s| s.outcome.eigenvalue != first)
            })
        })
        .count() as u64;

    let chain_joint = stats::empirical_joint(&chain, "ch1", "ch2")?;
    let reference_joint = stats::empirical_joint(&reference, "ch1", "ch2")?;
    let tv_distance = stats::tv_distance_joint(&chain_joint, &reference_joint);
    let cells = state
        .joint_distribution()
        .iter()
        .filter(|&&(_, p)| p >= tol::PROB_FLOOR)
        .count();
    let tv_tolerance = stats::tv_tolerance(n_trials, Some(n_trials), cells);

    Ok(ChainReport {
        steps,
        trials: n_trials,
        repeat_violations,
        tv_distance,
        tv_tolerance,
        chain_joint,
        reference_joint,
    })
}
