//! Phase functionals of a single-qubit evolution.
//!
//! For the eigenbasis `{e0, e1}` of `U(τ)`:
//!
//! * total phase `φ_x = arg⟨e_x|U(τ)|e_x⟩`,
//! * dynamical phase `δ_x = −∫⟨e_x|U†HU|e_x⟩ dt`,
//! * geometric phase `γ_x = φ_x − δ_x`, which for cyclic evolution equals
//!   `(x − ½) Ω` with `Ω` the solid angle swept by `e0`.
//!
//! For an arbitrary input `ψ = a e0 + b e1` the dynamical phase splits into a
//! diagonal and a cross term once the traceless gauge `∫Tr H dt = 0` holds.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{solid_angle, SolidAngle, CLOSURE_TOL};
use crate::propagator::Propagation;
use crate::su2::{angle_distance, wrap_angle, Operator2, QubitState};

/// Eigenvalue gap below which `U(τ)` is treated as proportional to `I`.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Smallest `|⟨u|U|v⟩|` for which an argument is reported.
pub const UNDEFINED_OVERLAP: f64 = 1e-12;
/// Gauge tolerance on `∫Tr H dt`.
pub const GAUGE_TOL: f64 = 1e-9;
/// Quadrature error estimate above which a warning is attached.
pub const QUADRATURE_WARN: f64 = 1e-6;
const LABEL_TIE: f64 = 1e-12;

/// Label of a cyclic basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Zero, Label::One];

    pub fn index(self) -> usize {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }

    /// `x − ½`.
    pub fn half_offset(self) -> f64 {
        self.index() as f64 - 0.5
    }
}

/// Orthonormal eigenvectors of `U(τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicBasis {
    pub e0: QubitState,
    pub e1: QubitState,
    /// Set when `U(τ) ∝ I`; the computational basis is returned.
    pub degenerate: bool,
}

impl CyclicBasis {
    pub fn computational() -> Self {
        CyclicBasis { e0: QubitState::zero(), e1: QubitState::one(), degenerate: false }
    }

    pub fn state(&self, x: Label) -> &QubitState {
        match x {
            Label::Zero => &self.e0,
            Label::One => &self.e1,
        }
    }

    /// Components `(⟨e0|ψ⟩, ⟨e1|ψ⟩)`.
    pub fn coordinates(&self, psi: &QubitState) -> (C64, C64) {
        (self.e0.inner(psi), self.e1.inner(psi))
    }
}

/// Eigenbasis of a unitary.
///
/// Label 0 goes to the eigenvector with the larger `⟨σz⟩`, ties broken by
/// `⟨σx⟩` then `⟨σy⟩`. Each vector is phase-fixed so its first nonvanishing
/// component is real and positive.
pub fn cyclic_basis(u: &Operator2) -> Result<CyclicBasis> {
    let defect = u.unitarity_defect();
    if !(defect < 1e-6) {
        return Err(Error::InvalidParams(format!("operator is not unitary: max|U†U − I| = {defect:e}")));
    }
    // U = e^{iα}(cos β I − i sin β n̂·σ); v = sin β n̂ up to the sign of e^{iα}.
    let m = &u.m;
    let alpha = u.det().arg() / 2.0;
    let w = C64::from_polar(1.0, -alpha);
    let (v00, v01, v10) = (m[0][0] * w, m[0][1] * w, m[1][0] * w);
    let v11 = m[1][1] * w;
    let v = [
        -(v01.im + v10.im) / 2.0,
        (v10.re - v01.re) / 2.0,
        -(v00.im - v11.im) / 2.0,
    ];
    let s = crate::su2::norm3(v);
    if 2.0 * s < DEGENERACY_GAP {
        return Ok(CyclicBasis { degenerate: true, ..CyclicBasis::computational() });
    }
    let mut n = [v[0] / s, v[1] / s, v[2] / s];
    let flip = if n[2].abs() > LABEL_TIE {
        n[2] < 0.0
    } else if n[0].abs() > LABEL_TIE {
        n[0] < 0.0
    } else {
        n[1] < 0.0
    };
    if flip {
        n = [-n[0], -n[1], -n[2]];
    }
    let e0 = QubitState::from_bloch(n)?;
    let e1 = QubitState::from_bloch([-n[0], -n[1], -n[2]])?;
    Ok(CyclicBasis { e0, e1, degenerate: false })
}

/// Residual `‖U e − ⟨e|U|e⟩ e‖` of a candidate eigenvector.
pub fn eigen_residual(u: &Operator2, e: &QubitState) -> f64 {
    let ue = u.apply(e);
    let lambda = e.inner(&ue);
    let r = QubitState::from_amplitudes(ue.a - lambda * e.a, ue.b - lambda * e.b);
    r.norm_sqr().sqrt()
}

fn arg_checked(z: C64) -> Result<f64> {
    if z.norm() < UNDEFINED_OVERLAP {
        return Err(Error::UndefinedPhase { overlap: z.norm() });
    }
    Ok(wrap_angle(z.arg()))
}

/// `φ_x = arg⟨e_x|U|e_x⟩` in (−π, π].
pub fn total_phase(x: Label, basis: &CyclicBasis, u: &Operator2) -> Result<f64> {
    arg_checked(u.expectation(basis.state(x)))
}

/// `δ_x = −∫⟨e_x|U†HU|e_x⟩ dt`, unwrapped.
pub fn dynamical_phase_basis(x: Label, basis: &CyclicBasis, prop: &Propagation) -> f64 {
    -prop.energy_integral().expectation(basis.state(x)).re
}

/// `γ_x = φ_x − δ_x` in (−π, π].
pub fn geometric_phase_basis(x: Label, basis: &CyclicBasis, prop: &Propagation) -> Result<f64> {
    let phi = total_phase(x, basis, &prop.final_unitary())?;
    Ok(wrap_angle(phi - dynamical_phase_basis(x, basis, prop)))
}

/// Phases carried by one cyclic basis state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelPhases {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
}

/// `φ_x, δ_x, γ_x` for both labels plus the solid angle swept by `e0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    pub basis: CyclicBasis,
    pub labels: [LabelPhases; 2],
    pub solid_angle: SolidAngle,
    pub warnings: Vec<String>,
}

impl PhaseDecomposition {
    pub fn label(&self, x: Label) -> &LabelPhases {
        &self.labels[x.index()]
    }
}

/// Full phase decomposition of a propagation.
pub fn decompose(prop: &Propagation) -> Result<PhaseDecomposition> {
    let u = prop.final_unitary();
    let basis = cyclic_basis(&u)?;
    let mut labels = [LabelPhases { total: 0.0, dynamical: 0.0, geometric: 0.0 }; 2];
    for x in Label::BOTH {
        let total = total_phase(x, &basis, &u)?;
        let dynamical = dynamical_phase_basis(x, &basis, prop);
        labels[x.index()] = LabelPhases { total, dynamical, geometric: wrap_angle(total - dynamical) };
    }
    let mut warnings = Vec::new();
    if prop.quadrature_error() > QUADRATURE_WARN {
        warnings.push(format!(
            "dynamical-phase quadrature error estimate {:e} exceeds {QUADRATURE_WARN:e}; refine the grid",
            prop.quadrature_error()
        ));
    }
    let path = prop.bloch_path(&basis.e0).close(CLOSURE_TOL)?;
    let solid_angle = solid_angle(&path)?;
    Ok(PhaseDecomposition { basis, labels, solid_angle, warnings })
}

/// Comparison of `γ_x` against `(x − ½)Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaOmegaReport {
    pub label: Label,
    pub geometric: f64,
    /// Solid angle swept by `e0` (for label 1 this is minus the angle swept by `e1`).
    pub solid_angle: SolidAngle,
    /// `(x − ½)Ω`, wrapped.
    pub predicted: f64,
    /// Distance between `γ_x` and `(x − ½)Ω` on the circle.
    pub discrepancy: f64,
    pub closure_defect: f64,
}

/// Evaluates `γ_x` from the phase integrals and `(x − ½)Ω` from the tracked
/// Bloch path of `e_x`, independently.
pub fn check_gamma_omega(x: Label, basis: &CyclicBasis, prop: &Propagation) -> Result<GammaOmegaReport> {
    let path = prop.bloch_path(basis.state(x)).close(CLOSURE_TOL)?;
    let swept = solid_angle(&path)?;
    // e1 runs along the antipodal loop, which encloses −Ω mod 4π.
    let omega = match x {
        Label::Zero => swept,
        Label::One => SolidAngle {
            principal: crate::geometry::wrap_solid_angle(-swept.principal),
            branch: -swept.branch,
            closure_defect: swept.closure_defect,
        },
    };
    let gamma = geometric_phase_basis(x, basis, prop)?;
    let predicted = wrap_angle(x.half_offset() * omega.principal);
    Ok(GammaOmegaReport {
        label: x,
        geometric: gamma,
        solid_angle: omega,
        predicted,
        discrepancy: angle_distance(gamma, predicted),
        closure_defect: swept.closure_defect,
    })
}

/// `arg⟨ψ|U|ψ⟩` in (−π, π].
pub fn pancharatnam_phase(psi: &QubitState, u: &Operator2) -> Result<f64> {
    arg_checked(u.expectation(psi))
}

/// Dynamical phase of an arbitrary input, from the defining integral and from
/// its diagonal + cross-term decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDynamicalPhase {
    /// `−∫⟨ψ|U†HU|ψ⟩ dt`, wrapped.
    pub direct: f64,
    /// `diagonal + cross`, wrapped.
    pub decomposed: f64,
    /// `−(|a|² − |b|²) ∫⟨e0|U†HU|e0⟩ dt`.
    pub diagonal_term: f64,
    /// `−2 Re(a b* ∫⟨e1|U†HU|e0⟩ dt)`.
    pub cross_term: f64,
    /// Distance between `direct` and `decomposed` on the circle.
    pub difference: f64,
}

/// `−∫⟨ψ|U†HU|ψ⟩ dt` without any gauge requirement, unwrapped.
pub fn direct_dynamical_phase(psi: &QubitState, prop: &Propagation) -> f64 {
    -prop.energy_integral().expectation(psi).re
}

/// Dynamical phase of `ψ`; requires the traceless gauge.
pub fn dynamical_phase_state(psi: &QubitState, basis: &CyclicBasis, prop: &Propagation) -> Result<StateDynamicalPhase> {
    let trace = prop.trace_integral();
    if !(trace.abs() <= GAUGE_TOL) {
        return Err(Error::GaugeViolation { trace_integral: trace });
    }
    psi.check_normalized()?;
    let k = prop.energy_integral();
    let (a, b) = basis.coordinates(psi);
    let diag = k.expectation(&basis.e0).re;
    let cross = k.matrix_element(&basis.e1, &basis.e0);
    let diagonal_term = -(a.norm_sqr() - b.norm_sqr()) * diag;
    let cross_term = -2.0 * (a * b.conj() * cross).re;
    let direct = wrap_angle(direct_dynamical_phase(psi, prop));
    let decomposed = wrap_angle(diagonal_term + cross_term);
    Ok(StateDynamicalPhase { direct, decomposed, diagonal_term, cross_term, difference: angle_distance(direct, decomposed) })
}

/// Gate relative phase `φ_0 − φ_1` in (−π, π].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativePhase {
    pub value: f64,
    pub degenerate: bool,
}

pub fn relative_phase(u: &Operator2, basis: &CyclicBasis) -> Result<RelativePhase> {
    if basis.degenerate {
        return Ok(RelativePhase { value: 0.0, degenerate: true });
    }
    let p0 = total_phase(Label::Zero, basis, u)?;
    let p1 = total_phase(Label::One, basis, u)?;
    Ok(RelativePhase { value: wrap_angle(p0 - p1), degenerate: false })
}

/// States whose expectation values determine a 2×2 Hermitian matrix.
pub fn spanning_states() -> [QubitState; 4] {
    [QubitState::zero(), QubitState::one(), QubitState::plus(), QubitState::plus_i()]
}

/// The Hamiltonian at every recorded grid time, rebuilt only from the
/// dynamical-phase integrands `⟨ψ|U†HU|ψ⟩` on [`spanning_states`].
///
/// If all those integrands vanish, so does every reconstructed `H(t_k)`.
pub fn hamiltonian_from_integrands(prop: &Propagation) -> Vec<Operator2> {
    let [z0, z1, px, py] = spanning_states();
    prop.unitaries()
        .iter()
        .zip(prop.hamiltonians())
        .map(|(u, h)| {
            let m = u.dagger() * h.to_operator() * *u;
            let e = |s: &QubitState| m.expectation(s).re;
            let (m00, m11, xx, yy) = (e(&z0), e(&z1), e(&px), e(&py));
            // ⟨+|M|+⟩ = (m00 + m11)/2 + Re m01, ⟨+i|M|+i⟩ = (m00 + m11)/2 + Im m10.
            let mean = 0.5 * (m00 + m11);
            let re01 = xx - mean;
            let im10 = yy - mean;
            let rebuilt = Operator2::new(
                C64::new(m00, 0.0),
                C64::new(re01, -im10),
                C64::new(re01, im10),
                C64::new(m11, 0.0),
            );
            *u * rebuilt * u.dagger()
        })
        .collect()
}

/// Largest `|⟨ψ|U†HU|ψ⟩|` over grid times and spanning states.
pub fn max_integrand(prop: &Propagation) -> f64 {
    let states = spanning_states();
    prop.unitaries()
        .iter()
        .zip(prop.hamiltonians())
        .flat_map(|(u, h)| {
            let m = u.dagger() * h.to_operator() * *u;
            states.iter().map(move |s| m.expectation(s).re.abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Largest `‖H(t_k)‖` over recorded grid times.
pub fn max_hamiltonian_norm(prop: &Propagation) -> f64 {
    prop.hamiltonians().iter().map(|h| h.to_operator().norm()).fold(0.0, f64::max)
}

/// `(e0 + e1)/√2` for a given basis.
pub fn balanced_superposition(basis: &CyclicBasis) -> QubitState {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    QubitState::from_amplitudes(basis.e0.a * s + basis.e1.a * s, basis.e0.b * s + basis.e1.b * s)
}

/// Ray fidelity between `U(τ)ψ` and the diagonal gate `diag(e^{iφ0}, e^{iφ1})`
/// (in the cyclic basis) applied to `ψ`.
pub fn gate_ray_fidelity(psi: &QubitState, basis: &CyclicBasis, u: &Operator2) -> Result<f64> {
    let p0 = total_phase(Label::Zero, basis, u)?;
    let p1 = total_phase(Label::One, basis, u)?;
    let (a, b) = basis.coordinates(psi);
    let g0 = a * C64::from_polar(1.0, p0);
    let g1 = b * C64::from_polar(1.0, p1);
    let gated = QubitState::from_amplitudes(
        basis.e0.a * g0 + basis.e1.a * g1,
        basis.e0.b * g0 + basis.e1.b * g1,
    );
    Ok(u.apply(psi).fidelity(&gated))
}
