//! Executes a validated config and assembles its check table.

use num_complex::Complex64;

use crate::eprb::{self, BipartiteState, MeasurementOrder};
use crate::hilbert::{ObservableBasis, StateVector};
use crate::logic::{indeterminacy_witness, Statement};
use crate::measurement::{retrodiction_check, run_trials, Substreams};
use crate::stats;
use crate::tol;

use super::config::{Config, Scenario, ScenarioInput};
use super::report::{CheckRecord, Report};
use super::ScenarioError;

/// Report plus, when the config asked for them, the per-trial records of
/// the sampled ensemble. Analytic scenarios produce no records.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub records: Option<String>,
}

/// Runs the configured scenario. The returned report echoes the digest of
/// the effective config, so overridden seeds and trial counts remain
/// traceable.
pub fn run_scenario(config: &Config) -> Result<RunOutput, ScenarioError> {
    let digest = config.digest();
    match (config.scenario, &config.input) {
        (Scenario::Theorem1, ScenarioInput::Single { state, basis }) => {
            theorem1(config, digest, state, basis)
        }
        (Scenario::Theorem2, ScenarioInput::Single { state, basis }) => {
            theorem2(config, digest, state, basis)
        }
        (Scenario::Retrodiction, ScenarioInput::Single { state, basis }) => {
            retrodiction(config, digest, state, basis)
        }
        (Scenario::Eprb, ScenarioInput::Bipartite { state, order }) => {
            eprb_scenario(config, digest, state, *order)
        }
        (Scenario::DualEnsemble, ScenarioInput::Bipartite { state, .. }) => {
            dual_ensemble(config, digest, state)
        }
        (Scenario::Chain, ScenarioInput::Bipartite { state, .. }) => {
            chain(config, digest, state)
        }
        _ => unreachable!("parse_config pairs each scenario with its input kind"),
    }
}

fn format_dist(dist: &[(f64, f64)]) -> String {
    dist.iter()
        .map(|(k, p)| format!("{k} -> {p}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn max_residual(projected: &[Complex64], amplitudes: &[Complex64]) -> f64 {
    projected
        .iter()
        .zip(amplitudes)
        .map(|(p, a)| (p - a).norm())
        .fold(0.0, f64::max)
}

/// The support statement of the state is certainly true, acts as the
/// identity on the state, and the statement algebra built on its basis is
/// internally consistent.
fn theorem1(
    config: &Config,
    digest: String,
    psi: &StateVector,
    basis: &ObservableBasis,
) -> Result<RunOutput, ScenarioError> {
    let support = Statement::support(psi, basis, config.eps)?;
    let mut notes = vec![format!("support indices: {:?}", support.indices())];
    let mut checks = Vec::new();

    let projected = support.projector().apply(psi)?;
    checks.push(CheckRecord::evaluate(
        "support_projection_residual",
        0.0,
        max_residual(&projected, psi.amplitudes()),
        tol::ATOL,
    ));

    let idempotence = support
        .projector()
        .mul(support.projector())?
        .sub(support.projector())?
        .max_abs();
    checks.push(CheckRecord::evaluate("projector_idempotence", 0.0, idempotence, tol::ATOL));

    let tv = support.truth_value(psi)?;
    notes.push(format!("support statement: {:?}", tv.truth));
    checks.push(CheckRecord::evaluate("support_truth", 1.0, tv.expectation, tol::TRUTH_BAND));

    let elementary: Vec<Statement> = (0..basis.dim())
        .map(|l| Statement::elementary(basis, l))
        .collect::<Result<_, _>>()?;
    let sum: f64 = elementary
        .iter()
        .map(|s| s.truth_value(psi).map(|tv| tv.expectation))
        .sum::<Result<f64, _>>()?;
    checks.push(CheckRecord::evaluate(
        "elementary_expectation_sum",
        1.0,
        sum,
        tol::EXPECT_ATOL,
    ));

    let full = Statement::disjunction(&elementary)?;
    checks.push(CheckRecord::evaluate(
        "full_disjunction_truth",
        1.0,
        full.truth_value(psi)?.expectation,
        tol::TRUTH_BAND,
    ));

    for (l, statement) in elementary.iter().enumerate() {
        let rest: Vec<Statement> = (0..basis.dim())
            .filter(|&m| m != l)
            .map(|m| Statement::elementary(basis, m))
            .collect::<Result<_, _>>()?;
        let negation = statement.negation();
        let diff = if rest.is_empty() {
            negation.projector().max_abs()
        } else {
            let disj = Statement::disjunction(&rest)?;
            negation.projector().sub(disj.projector())?.max_abs()
        };
        checks.push(CheckRecord::evaluate(format!("negation_consistency[{l}]"), 0.0, diff, tol::ATOL));
    }

    Ok(RunOutput {
        report: Report { scenario: config.scenario.name(), digest, seed: config.seed, trials: 0, notes, checks },
        records: None,
    })
}

/// A state supported on more than one eigenvector leaves every elementary
/// statement of that observable indeterminate.
fn theorem2(
    config: &Config,
    digest: String,
    psi: &StateVector,
    basis: &ObservableBasis,
) -> Result<RunOutput, ScenarioError> {
    let support = Statement::support(psi, basis, config.eps)?;
    let notes = vec![format!("support indices: {:?}", support.indices())];
    let mut checks = Vec::new();

    let size = support.indices().len();
    checks.push(CheckRecord::evaluate(
        "support_size_exceeds_one",
        1.0,
        if size >= 2 { 1.0 } else { 0.0 },
        0.0,
    ));

    // The indeterminate band is [b, 1 - b] for the truth band b, which is
    // exactly |e - 1/2| <= 1/2 - b.
    for &l in support.indices() {
        let e = Statement::elementary(basis, l)?.truth_value(psi)?.expectation;
        checks.push(CheckRecord::evaluate(
            format!("elementary_indeterminate[{l}]"),
            0.5,
            e,
            0.5 - tol::TRUTH_BAND,
        ));
    }

    let witness = indeterminacy_witness(psi, basis, config.eps)?;
    checks.push(CheckRecord::evaluate(
        "indeterminacy_witness",
        1.0,
        if witness { 1.0 } else { 0.0 },
        0.0,
    ));

    Ok(RunOutput {
        report: Report { scenario: config.scenario.name(), digest, seed: config.seed, trials: 0, notes, checks },
        records: None,
    })
}

/// Measured once versus measured twice: repetition agrees exactly, the
/// final distribution is unshifted, and selecting on the final value
/// retrodicts the earlier one.
fn retrodiction(
    config: &Config,
    digest: String,
    psi: &StateVector,
    basis: &ObservableBasis,
) -> Result<RunOutput, ScenarioError> {
    let streams = Substreams::new(config.seed);
    let r = retrodiction_check(psi, basis, config.trials, &streams)?;
    let mut notes = vec![
        format!("single-run distribution: {}", format_dist(&r.single_run)),
        format!("double-run distribution: {}", format_dist(&r.double_run)),
    ];
    let mut checks = Vec::new();

    if r.trials == 0 {
        checks.push(CheckRecord::skipped("repeat_agreement", 1.0));
    } else {
        checks.push(CheckRecord::evaluate(
            "repeat_agreement",
            1.0,
            r.repeat_matches as f64 / r.trials as f64,
            0.0,
        ));
    }
    checks.push(CheckRecord::evaluate(
        "tv_single_vs_double",
        0.0,
        r.tv_distance,
        r.tv_tolerance,
    ));
    for sub in &r.subensembles {
        let name = format!("retrodiction[{}]", sub.eigenvalue);
        if sub.trials == 0 {
            notes.push(format!("empty ensemble: no trial selected eigenvalue {}", sub.eigenvalue));
            checks.push(CheckRecord::skipped(name, 1.0));
        } else {
            checks.push(CheckRecord::evaluate(
                name,
                1.0,
                sub.pre_matches as f64 / sub.trials as f64,
                0.0,
            ));
        }
    }

    let records = if config.records.is_some() {
        // Same substreams as the two-stage experiment inside the check.
        let double = run_trials(
            psi,
            &[("pre", basis), ("post", basis)],
            config.trials,
            &streams.shifted(config.trials),
        )?;
        Some(double.records_to_string())
    } else {
        None
    };

    Ok(RunOutput {
        report: Report {
            scenario: config.scenario.name(),
            digest,
            seed: config.seed,
            trials: config.trials,
            notes,
            checks,
        },
        records,
    })
}

fn lookup_joint(dist: &[((f64, f64), f64)], key: (f64, f64)) -> f64 {
    dist.iter()
        .find(|((k, l), _)| (k - key.0).abs() <= tol::ATOL && (l - key.1).abs() <= tol::ATOL)
        .map_or(0.0, |&(_, p)| p)
}

/// Sampled two-channel statistics against the exact joint distribution,
/// cell by cell. Cells of exact probability zero must stay empty.
fn eprb_scenario(
    config: &Config,
    digest: String,
    state: &BipartiteState,
    order: MeasurementOrder,
) -> Result<RunOutput, ScenarioError> {
    let streams = Substreams::new(config.seed);
    let ensemble = eprb::simulate_eprb(state, order, config.trials, &streams)?;
    let exact = state.joint_distribution();
    let notes = vec![
        format!(
            "order: {}",
            match order {
                MeasurementOrder::Channel1First => "1-then-2",
                MeasurementOrder::Channel2First => "2-then-1",
            }
        ),
        format!("channel-1 marginal: {}", format_dist(&state.marginal(eprb::Channel::One))),
        format!("channel-2 marginal: {}", format_dist(&state.marginal(eprb::Channel::Two))),
    ];
    let mut checks = Vec::new();

    if config.trials == 0 {
        for ((k, l), p) in &exact {
            checks.push(CheckRecord::skipped(format!("cell[{k},{l}]"), *p));
        }
    } else {
        let empirical = stats::empirical_joint(&ensemble, "ch1", "ch2")?;
        for ((k, l), p) in &exact {
            checks.push(CheckRecord::evaluate(
                format!("cell[{k},{l}]"),
                *p,
                lookup_joint(&empirical, (*k, *l)),
                stats::four_sigma(*p, config.trials),
            ));
        }
    }

    let records = config.records.is_some().then(|| ensemble.records_to_string());

    Ok(RunOutput {
        report: Report {
            scenario: config.scenario.name(),
            digest,
            seed: config.seed,
            trials: config.trials,
            notes,
            checks,
        },
        records,
    })
}

/// Both conditioning routes reproduce every joint probability to working
/// precision; rows are skipped where the conditioning outcome itself has
/// zero probability.
fn dual_ensemble(
    config: &Config,
    digest: String,
    state: &BipartiteState,
) -> Result<RunOutput, ScenarioError> {
    let r = eprb::dual_ensemble_check(state)?;
    let notes = vec![
        "skipped rows condition on an outcome of zero probability".to_string(),
    ];
    let mut checks = vec![CheckRecord::evaluate(
        "max_route_discrepancy",
        0.0,
        r.max_discrepancy,
        tol::EXPECT_ATOL,
    )];
    for cell in &r.cells {
        let name1 = format!("route1[{},{}]", cell.n, cell.j);
        checks.push(match cell.via_channel1 {
            Some(v) => CheckRecord::evaluate(name1, cell.joint, v, tol::EXPECT_ATOL),
            None => CheckRecord::skipped(name1, cell.joint),
        });
        let name2 = format!("route2[{},{}]", cell.n, cell.j);
        checks.push(match cell.via_channel2 {
            Some(v) => CheckRecord::evaluate(name2, cell.joint, v, tol::EXPECT_ATOL),
            None => CheckRecord::skipped(name2, cell.joint),
        });
    }

    Ok(RunOutput {
        report: Report { scenario: config.scenario.name(), digest, seed: config.seed, trials: 0, notes, checks },
        records: None,
    })
}

/// Repeated channel-1 measurements before the channel-2 one: all repeats
/// agree, and the final joint statistics match both an independent plain
/// run and the exact distribution.
fn chain(config: &Config, digest: String, state: &BipartiteState) -> Result<RunOutput, ScenarioError> {
    let streams = Substreams::new(config.seed);
    let r = eprb::logical_chain_check(state, config.steps, config.trials, &streams)?;
    let notes = vec![format!("stage labels: {}", eprb::chain_plan(config.steps).join(", "))];
    let mut checks = Vec::new();

    if r.trials == 0 {
        checks.push(CheckRecord::skipped("repeat_agreement", 1.0));
    } else {
        checks.push(CheckRecord::evaluate(
            "repeat_agreement",
            1.0,
            (r.trials - r.repeat_violations) as f64 / r.trials as f64,
            0.0,
        ));
    }
    checks.push(CheckRecord::evaluate("tv_vs_reference", 0.0, r.tv_distance, r.tv_tolerance));

    let exact = state.joint_distribution();
    for ((k, l), p) in &exact {
        let name = format!("cell[{k},{l}]");
        if r.trials == 0 {
            checks.push(CheckRecord::skipped(name, *p));
        } else {
            checks.push(CheckRecord::evaluate(
                name,
                *p,
                lookup_joint(&r.chain_joint, (*k, *l)),
                stats::four_sigma(*p, config.trials),
            ));
        }
    }

    let records = if config.records.is_some() {
        let ensemble = eprb::logical_chain_run(state, config.steps, config.trials, &streams)?;
        Some(ensemble.records_to_string())
    } else {
        None
    };

    Ok(RunOutput {
        report: Report {
            scenario: config.scenario.name(),
            digest,
            seed: config.seed,
            trials: config.trials,
            notes,
            checks,
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_config, CheckStatus};

    fn run(text: &str) -> RunOutput {
        run_scenario(&parse_config(text).unwrap()).unwrap()
    }

    const SUPERPOSED: &str = r#"
scenario = "SCENARIO"
[state]
vector = [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.7071067811865476]]
"#;

    #[test]
    fn theorem1_accepts_superposition() {
        let out = run(&SUPERPOSED.replace("SCENARIO", "theorem1"));
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());
        assert!(out.records.is_none());
        assert!(out.report.notes.iter().any(|n| n.contains("{0, 2}")));
    }

    #[test]
    fn theorem2_accepts_superposition_and_rejects_eigenstate() {
        let out = run(&SUPERPOSED.replace("SCENARIO", "theorem2"));
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());

        let eigen = r#"
scenario = "theorem2"
[state]
vector = [[1.0, 0.0], [0.0, 0.0]]
"#;
        let out = run(eigen);
        assert!(!out.report.verdict());
        let failed: Vec<&str> = out
            .report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        assert!(failed.contains(&"support_size_exceeds_one"));
        assert!(failed.contains(&"indeterminacy_witness"));
    }

    #[test]
    fn retrodiction_scenario_passes() {
        let text = r#"
scenario = "retrodiction"
trials = 2000
[state]
vector = [[0.894427190999916, 0.0], [0.0, 0.447213595499958]]
"#;
        let out = run(text);
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());
        let names: Vec<&str> = out.report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"repeat_agreement"));
        assert!(names.contains(&"retrodiction[0]"));
        assert!(names.contains(&"retrodiction[1]"));
    }

    const BELL: &str = r#"
scenario = "SCENARIO"
trials = 2000
[state]
matrix = [[[0.7071067811865476, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071067811865476, 0.0]]]
"#;

    #[test]
    fn eprb_scenario_passes_and_zero_cells_stay_empty() {
        let out = run(&BELL.replace("SCENARIO", "eprb"));
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());
        let zero_cell = out
            .report
            .checks
            .iter()
            .find(|c| c.name == "cell[0,1]")
            .expect("off-diagonal cell present");
        assert_eq!(zero_cell.exact, 0.0);
        assert_eq!(zero_cell.empirical, Some(0.0));
        assert_eq!(zero_cell.tolerance, 0.0);
    }

    #[test]
    fn dual_ensemble_scenario_skips_zero_weight_routes() {
        let text = r#"
scenario = "dual-ensemble"
[state]
matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
"#;
        let out = run(text);
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());
        let skipped = out
            .report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Skipped)
            .count();
        assert!(skipped > 0, "conditioning on the empty row must be skipped");
    }

    #[test]
    fn chain_scenario_passes() {
        let text = r#"
scenario = "chain"
trials = 500
steps = 3
[state]
matrix = [[[0.7071067811865476, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071067811865476, 0.0]]]
"#;
        let out = run(text);
        assert!(out.report.verdict(), "report:\n{}", out.report.to_text());
        assert!(out.report.notes.iter().any(|n| n.contains("ch1[-3], ch1[-2], ch1[-1], ch1, ch2")));
    }

    #[test]
    fn runs_are_deterministic_per_config() {
        let text = &BELL.replace("SCENARIO", "eprb");
        let a = run(text).report.to_csv();
        let b = run(text).report.to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn records_come_back_when_requested() {
        let text = r#"
scenario = "eprb"
trials = 3
records = "records.txt"
[state]
matrix = [[[0.7071067811865476, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071067811865476, 0.0]]]
"#;
        let out = run(text);
        let records = out.records.expect("records requested");
        assert_eq!(records.lines().count(), 3);
        assert!(records.starts_with("0, ch1="));
    }

    #[test]
    fn zero_trials_skip_sampled_checks() {
        let text = r#"
scenario = "eprb"
trials = 0
[state]
matrix = [[[1.0, 0.0]], [[0.0, 0.0]]]
"#;
        let out = run(text);
        assert!(out.report.verdict());
        assert!(out.report.checks.iter().all(|c| c.status == CheckStatus::Skipped));
    }
}
