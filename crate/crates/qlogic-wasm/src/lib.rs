//! Browser bindings for the demo page: three operations that return JSON
//! strings, thin wrappers over the core crate. Invalid inputs come back as
//! `{"error": "..."}` so the page can surface them without unwinding.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use qlogic::eprb::{simulate_eprb, BipartiteState, MeasurementOrder};
use qlogic::hilbert::qubit_basis;
use qlogic::logic::indeterminacy_witness;
use qlogic::{stats, ObservableBasis, Statement, StateVector, Substreams};

fn bell_flat() -> StateVector {
    let z = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    StateVector::new(vec![z, zero, zero, z]).expect("unit flat state")
}

fn fail(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn correlation(joint: &[((f64, f64), f64)]) -> f64 {
    joint.iter().map(|((k, l), p)| k * l * p).sum()
}

/// Measures the maximally correlated pair with analyzers at `theta1` and
/// `theta2` radians. Returns exact and sampled joint cells plus the
/// correlation coefficient of the `+1`/`-1` outcomes.
#[wasm_bindgen]
pub fn eprb_run(theta1: f64, theta2: f64, trials: u32, seed: u32) -> String {
    let state = match BipartiteState::from_flat(
        &bell_flat(),
        qubit_basis(theta1),
        qubit_basis(theta2),
    ) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let n = u64::from(trials);
    let ensemble = match simulate_eprb(
        &state,
        MeasurementOrder::Channel1First,
        n,
        &Substreams::new(u64::from(seed)),
    ) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let empirical = match stats::empirical_joint(&ensemble, "ch1", "ch2") {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let exact = state.joint_distribution();

    let cells: Vec<_> = exact
        .iter()
        .map(|((k, l), p)| {
            let freq = empirical
                .iter()
                .find(|((ek, el), _)| ek == k && el == l)
                .map_or(0.0, |&(_, f)| f);
            json!({ "ch1": k, "ch2": l, "exact": p, "sampled": freq })
        })
        .collect();

    json!({
        "cells": cells,
        "exact_correlation": correlation(&exact),
        "sampled_correlation": correlation(&empirical),
        "trials": n,
    })
    .to_string()
}

/// Sweeps the analyzer offset across half a turn and reports the exact and
/// sampled correlation at each point.
#[wasm_bindgen]
pub fn correlation_curve(points: u32, trials_per_point: u32, seed: u32) -> String {
    if points < 2 {
        return fail("need at least 2 sweep points");
    }
    let n = u64::from(trials_per_point);
    let mut sweep = Vec::with_capacity(points as usize);
    for i in 0..points {
        let delta = PI * f64::from(i) / f64::from(points - 1);
        let state = match BipartiteState::from_flat(
            &bell_flat(),
            qubit_basis(delta),
            qubit_basis(0.0),
        ) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        // One independent substream block per sweep point.
        let streams = Substreams::new(u64::from(seed)).shifted(u64::from(i) * n);
        let sampled = match simulate_eprb(&state, MeasurementOrder::Channel1First, n, &streams)
            .and_then(|e| stats::empirical_joint(&e, "ch1", "ch2"))
        {
            Ok(d) => correlation(&d),
            Err(e) => return fail(e),
        };
        sweep.push(json!({
            "delta": delta,
            "exact": correlation(&state.joint_distribution()),
            "sampled": sampled,
        }));
    }
    json!({ "points": sweep, "trials_per_point": n }).to_string()
}

/// Three-valued truth profile of the superposition
/// `cos(alpha)|0> + sin(alpha)|1>` against the computational observable.
#[wasm_bindgen]
pub fn truth_profile(alpha: f64) -> String {
    let amps = vec![
        Complex64::new(alpha.cos(), 0.0),
        Complex64::new(alpha.sin(), 0.0),
    ];
    let psi = match StateVector::new(amps) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let basis = ObservableBasis::computational(2);

    let mut statements = Vec::with_capacity(2);
    for l in 0..2 {
        let tv = match Statement::elementary(&basis, l).and_then(|s| s.truth_value(&psi)) {
            Ok(tv) => tv,
            Err(e) => return fail(e),
        };
        statements.push(json!({
            "eigenvalue": l,
            "expectation": tv.expectation,
            "truth": format!("{:?}", tv.truth).to_lowercase(),
        }));
    }
    let witness = match indeterminacy_witness(&psi, &basis, 1e-9) {
        Ok(w) => w,
        Err(e) => return fail(e),
    };
    json!({ "statements": statements, "indeterminate_superposition": witness }).to_string()
}
