//! Distribution summaries and statistical tolerances for trial ensembles.
//!
//! Distributions are sorted `(value, probability)` lists. Tolerances follow
//! a four-sigma binomial rule so seeded runs fail with negligible
//! probability while real defects still surface.

use crate::error::{Error, Result};
use crate::measurement::Ensemble;
use crate::tol;

/// Four standard deviations of a binomial frequency estimate at probability
/// `p` over `n` trials.
pub fn four_sigma(p: f64, n: u64) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Four-sigma-scale bound on the total-variation distance between an
/// empirical distribution over `cells` outcomes and either an exact
/// distribution (`other` = None) or a second empirical one.
///
/// Each cell frequency has standard deviation at most `0.5 / sqrt(n)`; the
/// cell deviations are summed in quadrature across cells.
pub fn tv_tolerance(n: u64, other: Option<u64>, cells: usize) -> f64 {
    let mut var = 0.25 / n as f64;
    if let Some(m) = other {
        var += 0.25 / m as f64;
    }
    2.0 * (cells as f64 * var).sqrt()
}

/// Total-variation distance between two `(value, probability)` lists.
/// Values are matched within `tol::ATOL`; a value missing from one side
/// counts with probability zero there.
pub fn tv_distance(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    let mut keys: Vec<f64> = p.iter().chain(q).map(|&(v, _)| v).collect();
    keys.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    keys.dedup_by(|a, b| (*a - *b).abs() <= tol::ATOL);
    let lookup = |dist: &[(f64, f64)], key: f64| {
        dist.iter()
            .find(|&&(v, _)| (v - key).abs() <= tol::ATOL)
            .map_or(0.0, |&(_, w)| w)
    };
    0.5 * keys
        .iter()
        .map(|&k| (lookup(p, k) - lookup(q, k)).abs())
        .sum::<f64>()
}

/// Total-variation distance between two joint `((a, b), probability)`
/// lists, with both key components matched within `tol::ATOL`.
pub fn tv_distance_joint(p: &[((f64, f64), f64)], q: &[((f64, f64), f64)]) -> f64 {
    let same = |x: (f64, f64), y: (f64, f64)| {
        (x.0 - y.0).abs() <= tol::ATOL && (x.1 - y.1).abs() <= tol::ATOL
    };
    let mut keys: Vec<(f64, f64)> = Vec::new();
    for &(k, _) in p.iter().chain(q) {
        if !keys.iter().any(|&seen| same(seen, k)) {
            keys.push(k);
        }
    }
    keys.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let lookup = |dist: &[((f64, f64), f64)], key: (f64, f64)| {
        dist.iter().find(|&&(k, _)| same(k, key)).map_or(0.0, |&(_, w)| w)
    };
    0.5 * keys
        .iter()
        .map(|&k| (lookup(p, k) - lookup(q, k)).abs())
        .sum::<f64>()
}

/// Empirical eigenvalue distribution of one named stage across all trials.
pub fn empirical_distribution(ensemble: &Ensemble, label: &str) -> Result<Vec<(f64, f64)>> {
    let mut counts: Vec<(f64, u64)> = Vec::new();
    for trial in ensemble.trials() {
        let stage = trial
            .stage(label)
            .ok_or_else(|| Error::UnknownStage { label: label.to_string() })?;
        bump(&mut counts, stage.outcome.eigenvalue);
    }
    Ok(normalize(counts, ensemble.trials().len() as u64))
}

/// Empirical joint distribution of two named stages across all trials,
/// sorted by value pair.
pub fn empirical_joint(
    ensemble: &Ensemble,
    first: &str,
    second: &str,
) -> Result<Vec<((f64, f64), f64)>> {
    let mut counts: Vec<((f64, f64), u64)> = Vec::new();
    for trial in ensemble.trials() {
        let a = trial
            .stage(first)
            .ok_or_else(|| Error::UnknownStage { label: first.to_string() })?
            .outcome
            .eigenvalue;
        let b = trial
            .stage(second)
            .ok_or_else(|| Error::UnknownStage { label: second.to_string() })?
            .outcome
            .eigenvalue;
        match counts.iter_mut().find(|((x, y), _)| *x == a && *y == b) {
            Some((_, n)) => *n += 1,
            None => counts.push(((a, b), 1)),
        }
    }
    let total = ensemble.trials().len() as f64;
    let mut out: Vec<((f64, f64), f64)> =
        counts.into_iter().map(|(k, n)| (k, n as f64 / total)).collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    Ok(out)
}

fn bump(counts: &mut Vec<(f64, u64)>, value: f64) {
    match counts.iter_mut().find(|(v, _)| *v == value) {
        Some((_, n)) => *n += 1,
        None => counts.push((value, 1)),
    }
}

fn normalize(counts: Vec<(f64, u64)>, total: u64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> =
        counts.into_iter().map(|(v, n)| (v, n as f64 / total as f64)).collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tv_distance_of_identical_distributions_is_zero() {
        let p = vec![(0.0, 0.5), (1.0, 0.5)];
        assert_eq!(tv_distance(&p, &p), 0.0);
    }

    #[test]
    fn tv_distance_counts_missing_keys() {
        let p = vec![(0.0, 1.0)];
        let q = vec![(1.0, 1.0)];
        assert_abs_diff_eq!(tv_distance(&p, &q), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tv_distance_of_shifted_coin() {
        let p = vec![(0.0, 0.5), (1.0, 0.5)];
        let q = vec![(0.0, 0.6), (1.0, 0.4)];
        assert_abs_diff_eq!(tv_distance(&p, &q), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn four_sigma_matches_hand_value() {
        // sqrt(0.25 / 1e5) = 1.5811e-3, times four.
        assert_abs_diff_eq!(four_sigma(0.5, 100_000), 0.006_324_555_320_336_759, epsilon = 1e-15);
    }

    #[test]
    fn tv_tolerance_is_inside_the_pinned_bounds() {
        assert!(tv_tolerance(100_000, Some(100_000), 2) < 0.02);
        assert!(tv_tolerance(10_000, Some(10_000), 4) < 0.03);
    }
}
