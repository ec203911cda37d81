//! Time-ordered integration of `U(t, 0)` with the midpoint exponential
//! (second-order Magnus) rule:
//!
//! `U(t_{k+1}) = exp(−i H(t_k + h/2) h) U(t_k)`.
//!
//! Every step is an exact SU(2) exponential, so the propagator is unitary up
//! to rounding. Alongside `U` the integrator accumulates the trapezoidal
//! integral of `U†(t) H(t) U(t)` on the same grid, which is all the phase
//! functionals need.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BlochPath;
use crate::schedule::HamiltonianSchedule;
use crate::su2::{bloch_unchecked, exp_hermitian, Operator2, PauliCoefficients, QubitState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub steps_per_segment: usize,
    /// Target max entrywise change of `U(τ)` between successive doublings.
    #[serde(default = "default_tolerance")]
    pub refinement_tolerance: f64,
    /// Doublings allowed by [`refine_until_converged`]; 0 disables refinement.
    #[serde(default)]
    pub max_refinements: u32,
    /// Keep every `record_stride`-th grid point (segment ends are always kept).
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_stride() -> usize {
    1
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps_per_segment: 1000,
            refinement_tolerance: default_tolerance(),
            max_refinements: 0,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(steps_per_segment: usize) -> Self {
        IntegratorConfig { steps_per_segment, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_segment < 1 {
            return Err(Error::InvalidConfig("steps_per_segment must be at least 1".into()));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(Error::InvalidConfig("refinement_tolerance must be positive".into()));
        }
        if self.record_stride < 1 {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Recorded evolution on a grid `0 = t_0 < … < t_N = τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagation {
    times: Vec<f64>,
    unitaries: Vec<Operator2>,
    /// `H(t_k)` from the segment that starts at or contains `t_k`.
    hamiltonians: Vec<PauliCoefficients>,
    /// Cumulative `∫₀^{t_k} U†HU dt` (trapezoid on the full grid).
    energy_integrals: Vec<Operator2>,
    segment_starts: Vec<usize>,
    trace_integral: f64,
    quadrature_error: f64,
    total_steps: usize,
    steps_per_segment: usize,
}

impl Propagation {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn unitaries(&self) -> &[Operator2] {
        &self.unitaries
    }

    pub fn hamiltonians(&self) -> &[PauliCoefficients] {
        &self.hamiltonians
    }

    pub fn energy_integrals(&self) -> &[Operator2] {
        &self.energy_integrals
    }

    /// Record indices at which each segment starts, followed by the final index.
    pub fn segment_starts(&self) -> &[usize] {
        &self.segment_starts
    }

    pub fn final_unitary(&self) -> Operator2 {
        *self.unitaries.last().expect("propagation has at least two grid points")
    }

    /// `∫₀^τ U†(t) H(t) U(t) dt`.
    pub fn energy_integral(&self) -> Operator2 {
        *self.energy_integrals.last().expect("propagation has at least two grid points")
    }

    /// Exact `∫₀^τ Tr H dt` of the schedule that was integrated.
    pub fn trace_integral(&self) -> f64 {
        self.trace_integral
    }

    /// Richardson estimate (max entry) of the trapezoid error in
    /// [`Propagation::energy_integral`].
    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn steps_per_segment(&self) -> usize {
        self.steps_per_segment
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Largest `max|U†U − I|` over recorded points.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitaries.iter().map(Operator2::unitarity_defect).fold(0.0, f64::max)
    }

    /// `U(t_k) ψ` at every recorded point.
    pub fn evolve_state(&self, psi: &QubitState) -> Vec<QubitState> {
        self.unitaries.iter().map(|u| u.apply(psi)).collect()
    }

    /// Bloch trajectory of `U(t) ψ`, left open.
    pub fn bloch_path(&self, psi: &QubitState) -> BlochPath {
        BlochPath::new(self.unitaries.iter().map(|u| bloch_unchecked(&u.apply(psi)).to_array()).collect())
    }
}

/// Integrates the schedule with `steps_per_segment` midpoint steps per segment.
pub fn evolve(schedule: &HamiltonianSchedule, config: &IntegratorConfig) -> Result<Propagation> {
    config.validate()?;
    let n = config.steps_per_segment;
    let stride = config.record_stride;
    let nseg = schedule.segments().len();
    let est_records = nseg * (n / stride + 2);

    let mut times = Vec::with_capacity(est_records);
    let mut unitaries = Vec::with_capacity(est_records);
    let mut hamiltonians = Vec::with_capacity(est_records);
    let mut energy_integrals = Vec::with_capacity(est_records);
    let mut segment_starts = Vec::with_capacity(nseg + 1);

    let mut u = Operator2::identity();
    let mut integral = Operator2::zero();
    let mut coarse_defect = Operator2::zero();
    let mut t0 = 0.0;

    for (j, seg) in schedule.segments().iter().enumerate() {
        let d = seg.duration;
        let h = d / n as f64;
        let eval = |t: f64| -> Result<PauliCoefficients> {
            let c = seg.coefficients(t);
            if c.is_finite() {
                Ok(c)
            } else {
                Err(Error::NonFinite { segment: j, time: t })
            }
        };

        let h_start = eval(0.0)?;
        let mut m_start = sandwich(&u, &h_start);
        segment_starts.push(if j == 0 { 0 } else { times.len() - 1 });
        if j == 0 {
            times.push(0.0);
            unitaries.push(u);
            energy_integrals.push(integral);
            hamiltonians.push(h_start);
        } else {
            // The boundary point was recorded by the previous segment; it now
            // carries this segment's Hamiltonian.
            *hamiltonians.last_mut().unwrap() = h_start;
        }

        let mut m_prev_prev: Option<Operator2> = None;
        for k in 0..n {
            let h_mid = eval((k as f64 + 0.5) * h)?;
            let t_end = if k + 1 == n { d } else { (k + 1) as f64 * h };
            let h_end = eval(t_end)?;
            u = exp_hermitian(&h_mid, h) * u;
            let m_end = sandwich(&u, &h_end);
            integral = integral + (m_start + m_end).scale_re(0.5 * h);

            // Pairwise comparison against the 2h trapezoid for an error estimate.
            match m_prev_prev.take() {
                None => m_prev_prev = Some(m_start),
                Some(m0) => {
                    coarse_defect = coarse_defect + (m0 - m_start.scale_re(2.0) + m_end).scale_re(0.5 * h);
                }
            }

            let last = k + 1 == n;
            if last || (k + 1) % stride == 0 {
                times.push(t0 + t_end);
                unitaries.push(u);
                energy_integrals.push(integral);
                hamiltonians.push(h_end);
            }
            m_start = m_end;
        }
        t0 += d;
    }
    segment_starts.push(times.len() - 1);
    if let Some(t) = times.last_mut() {
        *t = schedule.duration();
    }

    Ok(Propagation {
        times,
        unitaries,
        hamiltonians,
        energy_integrals,
        segment_starts,
        trace_integral: schedule.trace_integral(),
        quadrature_error: coarse_defect.max_abs() / 3.0,
        total_steps: n * nseg,
        steps_per_segment: n,
    })
}

/// `U† H U`.
fn sandwich(u: &Operator2, h: &PauliCoefficients) -> Operator2 {
    u.dagger() * h.to_operator() * *u
}

/// Outcome of step doubling.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub propagation: Propagation,
    /// Max entrywise change of `U(τ)` in the last doubling; `None` if no
    /// doubling was performed.
    pub error_estimate: Option<f64>,
    pub converged: bool,
    pub refinements: u32,
}

/// Doubles `steps_per_segment` until `U(τ)` changes by less than the
/// configured tolerance, or `max_refinements` doublings have been made.
pub fn refine_until_converged(schedule: &HamiltonianSchedule, config: &IntegratorConfig) -> Result<Refinement> {
    config.validate()?;
    let mut current = evolve(schedule, config)?;
    let mut cfg = *config;
    let mut estimate = None;
    for r in 1..=config.max_refinements {
        cfg.steps_per_segment = cfg
            .steps_per_segment
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidConfig("step count overflow during refinement".into()))?;
        let finer = evolve(schedule, &cfg)?;
        let err = finer.final_unitary().max_abs_diff(&current.final_unitary());
        estimate = Some(err);
        current = finer;
        if err < config.refinement_tolerance {
            return Ok(Refinement { propagation: current, error_estimate: estimate, converged: true, refinements: r });
        }
    }
    Ok(Refinement {
        propagation: current,
        error_estimate: estimate,
        converged: false,
        refinements: config.max_refinements,
    })
}
