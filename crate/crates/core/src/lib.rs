//! Simulation and phase analysis of single-qubit geometric phase-shift gates.
//!
//! The crate evolves a qubit under a piecewise time-dependent Hamiltonian,
//! splits the phases of the resulting gate into dynamical and geometric
//! parts, builds the standard geometric gate schemes (parallel-transport
//! orange slice, parameter-tuned rotating field, adiabatic spin echo) and
//! runs Monte-Carlo noise sweeps over them.
//!
//! Units: ħ = 1, angles in radians, solid angles in steradians.

pub mod error;
pub mod gates;
pub mod geometry;
pub mod harness;
pub mod phase;
pub mod propagator;
pub mod schedule;
pub mod su2;

pub use error::{Error, Result};
pub use geometry::{solid_angle, BlochPath, SolidAngle};
pub use phase::{
    check_gamma_omega, cyclic_basis, decompose, dynamical_phase_basis, dynamical_phase_state, geometric_phase_basis,
    pancharatnam_phase, relative_phase, total_phase, CyclicBasis, Label, PhaseDecomposition, StateDynamicalPhase,
};
pub use propagator::{evolve, refine_until_converged, IntegratorConfig, Propagation};
pub use schedule::{concat_schedules, make_traceless, reverse_schedule, Drive, HamiltonianSchedule, Segment};
pub use su2::{bloch_vector, exp_hermitian, pauli_decompose, BlochVector, Operator2, PauliCoefficients, QubitState};

pub use num_complex::Complex64;
pub use gates::{
    adiabatic_loop, orange_slice_schedule, parameter_tuned_schedule, pi_pulse, rotating_field_schedule,
    spin_echo_schedule, OrangeSliceParams, RotatingFieldParams, SpinEchoParams, TuningReport, TuningSeed,
};
