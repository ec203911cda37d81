use std::path::Path;

use super::noise::noise_sweep;
use super::report::{DeltaReport, NoiseReport, QuantitySamples, RunReport};
use super::scenario::{load_scenario, Analysis, Scenario, ScheduleSpec, StateSpec};
use super::HarnessError;
use crate::error::Error;
use crate::gates::parameter_tuned_schedule;
use crate::phase::{
    balanced_superposition, check_gamma_omega, cyclic_basis, decompose, direct_dynamical_phase,
    dynamical_phase_state, pancharatnam_phase, relative_phase, Label,
};
use crate::propagator::{evolve, refine_until_converged};

/// Command-line values that take precedence over the scenario file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub steps: Option<usize>,
    /// Refinement tolerance; enables step doubling if the file disables it.
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// Doublings used when `--tol` turns refinement on.
const DEFAULT_REFINEMENTS: u32 = 8;

pub fn run_scenario_file(path: &Path, overrides: &Overrides) -> Result<RunReport, HarnessError> {
    let scenario = load_scenario(path)?;
    run_scenario(&scenario, overrides)
}

/// Builds the schedule, evolves it, runs the requested analyses and, if the
/// scenario has a noise block, the noise sweep.
pub fn run_scenario(scenario: &Scenario, overrides: &Overrides) -> Result<RunReport, HarnessError> {
    scenario.validate()?;
    let mut config = scenario.integrator;
    if let Some(n) = overrides.steps {
        config.steps_per_segment = n;
    }
    if let Some(t) = overrides.tolerance {
        config.refinement_tolerance = t;
        if config.max_refinements == 0 {
            config.max_refinements = DEFAULT_REFINEMENTS;
        }
    }
    config.validate().map_err(|e| HarnessError::schema("integrator", e.to_string()))?;
    let mut noise = scenario.noise;
    if let (Some(n), Some(seed)) = (noise.as_mut(), overrides.seed) {
        n.seed = seed;
    }

    let mut warnings = Vec::new();
    let mut tuning = None;
    let schedule = match (&scenario.schedule, scenario.schedule.build_untuned()?) {
        (_, Some(s)) => s,
        (ScheduleSpec::ParameterTuned(t), None) => {
            let (s, report) = parameter_tuned_schedule(t.target_solid_angle, t.winding, &t.seed)?;
            tuning = Some(report);
            s
        }
        (_, None) => unreachable!("only tuned schedules are built lazily"),
    };
    if let ScheduleSpec::SpinEcho(p) = &scenario.schedule {
        warnings.extend(p.warnings());
    }

    let (prop, converged) = if config.max_refinements > 0 {
        let r = refine_until_converged(&schedule, &config)?;
        if !r.converged {
            warnings.push(format!(
                "step doubling did not reach tolerance {:e} after {} refinements",
                config.refinement_tolerance, r.refinements
            ));
        }
        (r.propagation, Some(r.converged))
    } else {
        (evolve(&schedule, &config)?, None)
    };
    let decomposition = decompose(&prop)?;
    warnings.extend(decomposition.warnings.iter().cloned());
    let basis = decomposition.basis;
    let u = prop.final_unitary();

    let specs: Vec<StateSpec> = if scenario.states.is_empty() {
        let psi = balanced_superposition(&basis);
        vec![StateSpec { a: [psi.a.re, psi.a.im], b: [psi.b.re, psi.b.im] }]
    } else {
        scenario.states.clone()
    };
    let states = specs.iter().map(StateSpec::to_state).collect::<Result<Vec<_>, _>>()?;

    let wants = |a: Analysis| scenario.analyses.contains(&a);
    let relative = relative_phase(&u, &basis)?;
    let gamma_omega = if wants(Analysis::GammaOmega) {
        Some(Label::BOTH.iter().map(|&x| check_gamma_omega(x, &basis, &prop)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let delta = if wants(Analysis::Delta) {
        let mut out = Vec::with_capacity(states.len());
        for (spec, psi) in specs.iter().zip(&states) {
            let dynamical = dynamical_phase_state(psi, &basis, &prop)?;
            let pancharatnam = match pancharatnam_phase(psi, &u) {
                Ok(p) => Some(p),
                Err(Error::UndefinedPhase { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            out.push(DeltaReport { state: *spec, dynamical, pancharatnam });
        }
        Some(out)
    } else {
        None
    };

    let noise_report = match noise {
        Some(model) => {
            let baseline_delta: Vec<f64> = states.iter().map(|psi| direct_dynamical_phase(psi, &prop)).collect();
            let samples = noise_sweep(&schedule, &model, &prop, &basis, |s| {
                let p = evolve(s, &config)?;
                let u = p.final_unitary();
                let rel = relative_phase(&u, &cyclic_basis(&u)?)?.value;
                let deltas: Vec<f64> = states.iter().map(|psi| direct_dynamical_phase(psi, &p)).collect();
                Ok((rel, deltas))
            })?;
            let relative_phase = QuantitySamples::new(relative.value, samples.iter().map(|s| s.0).collect());
            let delta = baseline_delta
                .iter()
                .enumerate()
                .map(|(i, &b)| QuantitySamples::new(b, samples.iter().map(|s| s.1[i]).collect()))
                .collect();
            Some(NoiseReport { model, relative_phase, delta })
        }
        None => None,
    };

    Ok(RunReport {
        scenario_id: scenario.id.clone(),
        tool_version: format!("geophase {}", env!("CARGO_PKG_VERSION")),
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed: noise.map(|n| n.seed),
        integrator: config,
        duration: prop.duration(),
        total_steps: prop.total_steps(),
        quadrature_error: prop.quadrature_error(),
        refinement_converged: converged,
        warnings,
        tuning,
        decomposition: wants(Analysis::Decompose).then_some(decomposition),
        relative_phase: wants(Analysis::RelativePhase).then_some(relative),
        gamma_omega,
        delta,
        noise: noise_report,
    })
}
