//! Workloads shared by the benchmarks.

use std::f64::consts::PI;

use geophase::gates::{orange_slice_schedule, spin_echo_schedule, OrangeSliceParams, SpinEchoParams};
use geophase::harness::{parse_scenario, Scenario};
use geophase::{BlochPath, HamiltonianSchedule};

pub fn orange_slice() -> HamiltonianSchedule {
    orange_slice_schedule(&OrangeSliceParams::new(PI / 2.0)).expect("valid orange slice")
}

/// Spin echo on a π/4 cone at the given adiabaticity ratio.
pub fn spin_echo(ratio: f64) -> HamiltonianSchedule {
    spin_echo_schedule(&SpinEchoParams::with_ratio(PI / 4.0, ratio)).expect("valid spin echo")
}

/// Closed latitude circle at polar angle `theta` with `n` vertices.
pub fn latitude_loop(theta: f64, n: usize) -> BlochPath {
    let points = (0..=n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            [theta.sin() * a.cos(), theta.sin() * a.sin(), theta.cos()]
        })
        .collect();
    BlochPath::new(points)
}

/// Orange slice with a reparametrization noise block of `samples` samples.
pub fn noisy_orange_scenario(samples: usize, steps: usize) -> Scenario {
    let text = format!(
        r#"{{"version": 1, "id": "bench-noise",
            "schedule": {{"kind": "orange-slice", "phi": {phi}}},
            "analyses": ["relative-phase"],
            "integrator": {{"steps_per_segment": {steps}}},
            "noise": {{"kind": "solid-angle-preserving-reparametrization", "strength": 0.3, "samples": {samples}, "seed": 1}}}}"#,
        phi = PI / 2.0
    );
    parse_scenario(&text).expect("valid bench scenario")
}
