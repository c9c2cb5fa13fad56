//! Ideal projective measurement and repeated-stage trial ensembles.
//!
//! A measurement samples a pooled eigenvalue by the Born rule and replaces
//! the state by its normalized projection onto the sampled eigenspace, so
//! an immediate repetition returns the same value with certainty. Trials
//! draw from per-trial random substreams: trial `i` always sees the same
//! stream regardless of how trials are batched, which makes every ensemble
//! reproducible from `(seed, trial count)` alone.

use std::collections::BTreeSet;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{inner, ObservableBasis, StateVector};
use crate::stats;
use crate::tol;

/// One sampled measurement result.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Pooled eigenvalue that was observed.
    pub eigenvalue: f64,
    /// Eigenvector indices spanning the observed eigenspace.
    pub indices: BTreeSet<usize>,
    /// Born probability of this eigenvalue on the pre-measurement state.
    pub probability: f64,
    /// Post-measurement state: normalized eigenspace projection with the
    /// largest-magnitude amplitude made real positive.
    pub posterior: StateVector,
}

/// One stage of a trial: which basis was measured, under what label, and
/// what came out.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub label: String,
    /// Producer-assigned identifier, e.g. the stage's position in the plan
    /// or a channel number.
    pub basis_id: usize,
    pub outcome: Outcome,
}

/// Chronological stage outcomes of a single trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub stages: Vec<StageRecord>,
}

impl TrialRecord {
    /// First stage carrying the label, if any.
    pub fn stage(&self, label: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.label == label)
    }
}

/// How an ensemble was filtered out of its parent run.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    All,
    Stage { label: String, eigenvalue: f64 },
}

/// A set of trial records together with the selection that produced it.
/// Every contained trial satisfies the selector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    trials: Vec<TrialRecord>,
    selector: Selector,
}

impl Ensemble {
    pub(crate) fn from_parts(trials: Vec<TrialRecord>, selector: Selector) -> Self {
        Self { trials, selector }
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn selector(&self) -> &Selector {
        &self.selector
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Keeps the trials whose stage `label` produced `eigenvalue` (matched
    /// within `tol::ATOL`). The result may be empty. Errors if some trial
    /// has no stage with that label.
    pub fn select(&self, label: &str, eigenvalue: f64) -> Result<Ensemble> {
        let mut kept = Vec::new();
        for trial in &self.trials {
            let stage = trial
                .stage(label)
                .ok_or_else(|| Error::UnknownStage { label: label.to_string() })?;
            if (stage.outcome.eigenvalue - eigenvalue).abs() <= tol::ATOL {
                kept.push(trial.clone());
            }
        }
        Ok(Ensemble {
            trials: kept,
            selector: Selector::Stage { label: label.to_string(), eigenvalue },
        })
    }

    /// Writes one line per trial: `trial_id, label=eigenvalue, ...` in
    /// stage order.
    pub fn write_records<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for trial in &self.trials {
            write!(w, "{}", trial.trial_id)?;
            for stage in &trial.stages {
                write!(w, ", {}={}", stage.label, stage.outcome.eigenvalue)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn records_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_records(&mut buf).expect("vec write cannot fail");
        String::from_utf8(buf).expect("records are ascii")
    }
}

/// Deterministic per-trial random substreams derived from one seed. Trial
/// `i` maps to stream `base + i` of a ChaCha8 generator, so partitioning
/// trials across batches and merging in trial order reproduces a
/// single-batch run exactly.
#[derive(Debug, Clone, Copy)]
pub struct Substreams {
    seed: u64,
    base: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self { seed, base: 0 }
    }

    /// Same seed, stream ids shifted by `delta`. Used to keep independent
    /// experiments inside one run on non-overlapping streams.
    pub fn shifted(&self, delta: u64) -> Self {
        Self { seed: self.seed, base: self.base + delta }
    }

    pub fn trial(&self, trial_id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.base + trial_id);
        rng
    }
}

/// Born distribution over pooled eigenvalues: `(eigenvalue, probability)`
/// in first-occurrence order of the eigenvalues.
pub fn born_distribution(psi: &StateVector, basis: &ObservableBasis) -> Result<Vec<(f64, f64)>> {
    Ok(eigenspace_weights(psi, basis)?
        .into_iter()
        .map(|(space, w, _)| (space.eigenvalue, w))
        .collect())
}

type WeightedSpace = (crate::hilbert::Eigenspace, f64, Vec<Complex64>);

/// Per-eigenspace weight and eigenvector coefficients of `psi`.
fn eigenspace_weights(psi: &StateVector, basis: &ObservableBasis) -> Result<Vec<WeightedSpace>> {
    if psi.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: basis.dim() });
    }
    let coeffs: Vec<Complex64> = (0..basis.dim())
        .map(|l| inner(basis.eigenvector(l), psi))
        .collect::<Result<_>>()?;
    let spaces = basis.eigenspaces();
    let mut out = Vec::with_capacity(spaces.len());
    for space in spaces {
        let w: f64 = space.indices.iter().map(|&l| coeffs[l].norm_sqr()).sum();
        out.push((space, w, coeffs.clone()));
    }
    debug_assert!(
        (out.iter().map(|(_, w, _)| w).sum::<f64>() - 1.0).abs() <= tol::ATOL,
        "born weights must sum to one"
    );
    Ok(out)
}

/// Samples one ideal measurement of `basis` on `psi` by inverse-CDF over
/// the pooled Born weights. Eigenvalues with probability below
/// `tol::PROB_FLOOR` can never be drawn.
pub fn measure<R: Rng + ?Sized>(
    psi: &StateVector,
    basis: &ObservableBasis,
    rng: &mut R,
) -> Result<Outcome> {
    let weighted = eigenspace_weights(psi, basis)?;
    let eligible: Vec<&WeightedSpace> =
        weighted.iter().filter(|(_, w, _)| *w >= tol::PROB_FLOOR).collect();
    debug_assert!(!eligible.is_empty(), "a unit state has at least one eligible outcome");

    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut chosen = eligible.len() - 1;
    for (pos, (_, w, _)) in eligible.iter().enumerate() {
        cumulative += w;
        if u < cumulative {
            chosen = pos;
            break;
        }
    }
    let (space, w, coeffs) = eligible[chosen];

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); psi.dim()];
    let scale = 1.0 / w.sqrt();
    for &l in &space.indices {
        let v = basis.eigenvector(l);
        let c = coeffs[l] * scale;
        for (a, e) in amplitudes.iter_mut().zip(v.amplitudes()) {
            *a += c * e;
        }
    }
    let posterior = StateVector::normalized(amplitudes)?.phase_canonical();

    Ok(Outcome {
        eigenvalue: space.eigenvalue,
        indices: space.indices.clone(),
        probability: *w,
        posterior,
    })
}

/// Runs `n` independent trials of a chained measurement plan. Stage `s+1`
/// measures the posterior of stage `s`; trial `i` uses substream `i`.
pub fn run_trials(
    psi: &StateVector,
    plan: &[(&str, &ObservableBasis)],
    n: u64,
    streams: &Substreams,
) -> Result<Ensemble> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let mut trials = Vec::with_capacity(n as usize);
    for trial_id in 0..n {
        let mut rng = streams.trial(trial_id);
        let mut state = psi.clone();
        let mut stages = Vec::with_capacity(plan.len());
        for (basis_id, (label, basis)) in plan.iter().enumerate() {
            let outcome = measure(&state, basis, &mut rng)?;
            state = outcome.posterior.clone();
            stages.push(StageRecord { label: (*label).to_string(), basis_id, outcome });
        }
        trials.push(TrialRecord { trial_id, stages });
    }
    Ok(Ensemble::from_parts(trials, Selector::All))
}

/// Retrodiction of a sub-ensemble: how many of its trials already carried
/// the selected eigenvalue at the earlier stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SubEnsembleCheck {
    pub eigenvalue: f64,
    pub trials: u64,
    pub pre_matches: u64,
}

/// Comparison of a lone measurement against a pre-measured run of the same
/// observable on the same state.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrodictionReport {
    pub trials: u64,
    /// Trials of the two-stage run whose stages agree exactly.
    pub repeat_matches: u64,
    /// Total-variation distance between the final-stage distributions of
    /// the one-stage and two-stage runs.
    pub tv_distance: f64,
    pub tv_tolerance: f64,
    pub single_run: Vec<(f64, f64)>,
    pub double_run: Vec<(f64, f64)>,
    /// One entry per possible eigenvalue; empty sub-ensembles have
    /// `trials == 0`.
    pub subensembles: Vec<SubEnsembleCheck>,
}

impl RetrodictionReport {
    pub fn passes(&self) -> bool {
        self.repeat_matches == self.trials
            && self.tv_distance <= self.tv_tolerance
            && self.subensembles.iter().all(|s| s.pre_matches == s.trials)
    }
}

/// Runs two experiments of `n` trials each on independent substreams: the
/// observable measured once, and measured twice in a row. Checks that the
/// repetition agrees exactly, that the extra earlier measurement does not
/// shift the final distribution, and that selecting on the final value
/// retrodicts the earlier one.
pub fn retrodiction_check(
    psi: &StateVector,
    basis: &ObservableBasis,
    n: u64,
    streams: &Substreams,
) -> Result<RetrodictionReport> {
    let single = run_trials(psi, &[("post", basis)], n, streams)?;
    let double = run_trials(psi, &[("pre", basis), ("post", basis)], n, &streams.shifted(n))?;

    let repeat_matches = double
        .trials()
        .iter()
        .filter(|t| {
            t.stages[0].outcome.eigenvalue == t.stages[1].outcome.eigenvalue
                && t.stages[0].outcome.indices == t.stages[1].outcome.indices
        })
        .count() as u64;

    let single_dist = stats::empirical_distribution(&single, "post")?;
    let double_dist = stats::empirical_distribution(&double, "post")?;
    let tv = stats::tv_distance(&single_dist, &double_dist);

    let exact = born_distribution(psi, basis)?;
    let reachable: Vec<f64> = exact
        .iter()
        .filter(|&&(_, w)| w >= tol::PROB_FLOOR)
        .map(|&(k, _)| k)
        .collect();
    let tv_tol = stats::tv_tolerance(n, Some(n), reachable.len());

    let mut subensembles = Vec::new();
    for &k in &reachable {
        let sub = double.select("post", k)?;
        let pre_matches = sub
            .trials()
            .iter()
            .filter(|t| t.stages[0].outcome.eigenvalue == k)
            .count() as u64;
        subensembles.push(SubEnsembleCheck {
            eigenvalue: k,
            trials: sub.len() as u64,
            pre_matches,
        });
    }

    Ok(RetrodictionReport {
        trials: n,
        repeat_matches,
        tv_distance: tv,
        tv_tolerance: tv_tol,
        single_run: single_dist,
        double_run: double_dist,
        subensembles,
    })
}
