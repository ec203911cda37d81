//! Exact 2×2 complex algebra for a single qubit.
//!
//! Conventions: ħ = 1, Hamiltonians are written `H = c0·I + c·σ`, and the
//! Bloch vector of a pure state is `r_i = ⟨ψ|σ_i|ψ⟩`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum entrywise asymmetry `|M − M†|` accepted (and symmetrized away)
/// for Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Norm defect tolerated by operations that require a normalized state.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Principal value of an angle in (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = x.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Distance between two angles on the circle, in [0, π].
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operator2 {
    pub m: [[C64; 2]; 2],
}

impl Operator2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Operator2 { m: [[m00, m01], [m10, m11]] }
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Self::new(ZERO, C64 { re: 0.0, im: -1.0 }, I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, C64 { re: -1.0, im: 0.0 })
    }

    /// The three Pauli matrices in x, y, z order.
    pub const fn paulis() -> [Operator2; 3] {
        [Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        Self::new(d0, ZERO, ZERO, d1)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator2) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |M − M†|` over entries.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// `max |U†U − I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Operator2::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, psi: &QubitState) -> QubitState {
        let m = &self.m;
        QubitState {
            a: m[0][0] * psi.a + m[0][1] * psi.b,
            b: m[1][0] * psi.a + m[1][1] * psi.b,
        }
    }

    /// `⟨u|M|v⟩`.
    pub fn matrix_element(&self, u: &QubitState, v: &QubitState) -> C64 {
        u.inner(&self.apply(v))
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, psi: &QubitState) -> C64 {
        self.matrix_element(psi, psi)
    }

    /// Spectral (operator 2-) norm via the singular values of a 2×2 matrix.
    pub fn norm(&self) -> f64 {
        let fro2: f64 = self.m.iter().flatten().map(|z| z.norm_sqr()).sum();
        let d = self.det().norm();
        let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
        ((fro2 + disc) / 2.0).sqrt()
    }

    /// Checks Hermiticity within [`HERMITIAN_TOL`] and returns the symmetrized
    /// matrix `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Result<Operator2> {
        let defect = self.hermitian_defect();
        if !(defect < HERMITIAN_TOL) {
            return Err(Error::NonHermitian { asymmetry: defect });
        }
        Ok((*self + self.dagger()).scale_re(0.5))
    }
}

impl Default for Operator2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Add for Operator2 {
    type Output = Operator2;
    fn add(self, o: Operator2) -> Operator2 {
        let (a, b) = (&self.m, &o.m);
        Operator2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Operator2 {
    type Output = Operator2;
    fn sub(self, o: Operator2) -> Operator2 {
        let (a, b) = (&self.m, &o.m);
        Operator2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Neg for Operator2 {
    type Output = Operator2;
    fn neg(self) -> Operator2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Operator2 {
    type Output = Operator2;
    fn mul(self, o: Operator2) -> Operator2 {
        let (a, b) = (&self.m, &o.m);
        Operator2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl fmt::Display for Operator2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// A pure qubit state `a|0⟩ + b|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub a: C64,
    pub b: C64,
}

impl QubitState {
    /// Builds a normalized state. Fails on a (numerically) zero vector or
    /// non-finite amplitudes.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        Self { a, b }.normalized()
    }

    /// Builds a state without normalizing.
    pub const fn from_amplitudes(a: C64, b: C64) -> Self {
        Self { a, b }
    }

    pub const fn zero() -> Self {
        Self { a: ONE, b: ZERO }
    }

    pub const fn one() -> Self {
        Self { a: ZERO, b: ONE }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: C64::new(s, 0.0), b: C64::new(s, 0.0) }
    }

    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn plus_i() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: C64::new(s, 0.0), b: C64::new(0.0, s) }
    }

    /// The state whose Bloch vector is the direction of `r` (need not be unit).
    ///
    /// The returned amplitudes are phase-fixed so the first component with
    /// modulus above 1e-10 is real and positive.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let n = norm3(r);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let [x, y, z] = [r[0] / n, r[1] / n, r[2] / n];
        // Eigenvector of r·σ with eigenvalue +1, from whichever column is
        // better conditioned.
        let psi = if z >= 0.0 {
            QubitState { a: C64::new(1.0 + z, 0.0), b: C64::new(x, y) }
        } else {
            QubitState { a: C64::new(x, -y), b: C64::new(1.0 - z, 0.0) }
        };
        Ok(psi.normalized()?.phase_fixed())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { a: self.a / n, b: self.b / n })
    }

    /// Fails unless `|a|² + |b|²` is within [`NORM_TOL`] of one.
    pub fn check_normalized(&self) -> Result<()> {
        let defect = (self.norm_sqr() - 1.0).abs();
        if !(defect <= NORM_TOL) {
            return Err(Error::Unnormalized { defect });
        }
        Ok(())
    }

    /// Multiplies by a global phase so that the first component with modulus
    /// above 1e-10 is real and positive.
    pub fn phase_fixed(&self) -> Self {
        let pivot = if self.a.norm() > 1e-10 { self.a } else { self.b };
        if pivot.norm() == 0.0 {
            return *self;
        }
        let phase = pivot.conj() / pivot.norm();
        Self { a: self.a * phase, b: self.b * phase }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> C64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// `|⟨self|other⟩|²` for normalized states.
    pub fn fidelity(&self, other: &QubitState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { a: self.a * s, b: self.b * s }
    }
}

/// `c0·I + cx·σx + cy·σy + cz·σz`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliCoefficients {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl PauliCoefficients {
    pub const fn new(c0: f64, cx: f64, cy: f64, cz: f64) -> Self {
        Self { c0, cx, cy, cz }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn from_vector(c0: f64, v: [f64; 3]) -> Self {
        Self::new(c0, v[0], v[1], v[2])
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.cx, self.cy, self.cz]
    }

    /// `|c|`, the length of the Pauli vector.
    pub fn magnitude(&self) -> f64 {
        norm3(self.vector())
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.cx.is_finite() && self.cy.is_finite() && self.cz.is_finite()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.c0 * s, self.cx * s, self.cy * s, self.cz * s)
    }

    pub fn to_operator(&self) -> Operator2 {
        let (c0, x, y, z) = (self.c0, self.cx, self.cy, self.cz);
        Operator2::new(
            C64::new(c0 + z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(c0 - z, 0.0),
        )
    }
}

impl Add for PauliCoefficients {
    type Output = PauliCoefficients;
    fn add(self, o: PauliCoefficients) -> PauliCoefficients {
        Self::new(self.c0 + o.c0, self.cx + o.cx, self.cy + o.cy, self.cz + o.cz)
    }
}

/// Splits a Hermitian matrix into `c0 = Tr(M)/2`, `c_i = Tr(σ_i M)/2`.
pub fn pauli_decompose(m: &Operator2) -> Result<PauliCoefficients> {
    let h = m.hermitian_part()?;
    let m = &h.m;
    Ok(PauliCoefficients {
        c0: 0.5 * (m[0][0].re + m[1][1].re),
        cx: m[1][0].re,
        cy: m[1][0].im,
        cz: 0.5 * (m[0][0].re - m[1][1].re),
    })
}

/// `exp(−i H dt)` in closed form:
/// `e^{−i c0 dt}(cos(|c|dt) I − i sin(|c|dt) ĉ·σ)`.
pub fn exp_hermitian(h: &PauliCoefficients, dt: f64) -> Operator2 {
    let mag = h.magnitude();
    let global = C64::from_polar(1.0, -h.c0 * dt);
    if mag < 1e-300 {
        return Operator2::diag(global, global);
    }
    let angle = mag * dt;
    let (s, c) = angle.sin_cos();
    let k = s / mag;
    let (x, y, z) = (h.cx * k, h.cy * k, h.cz * k);
    // c I − i (x σx + y σy + z σz)
    Operator2::new(C64::new(c, -z), C64::new(-y, -x), C64::new(y, -x), C64::new(c, z))
        .scale(global)
}

/// A point on (or, for mixed states, inside) the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn norm(&self) -> f64 {
        norm3(self.to_array())
    }
}

/// `r_i = ⟨ψ|σ_i|ψ⟩` for a normalized state.
pub fn bloch_vector(psi: &QubitState) -> Result<BlochVector> {
    psi.check_normalized()?;
    Ok(bloch_unchecked(psi))
}

pub(crate) fn bloch_unchecked(psi: &QubitState) -> BlochVector {
    let ab = psi.a.conj() * psi.b;
    BlochVector::new(2.0 * ab.re, 2.0 * ab.im, psi.a.norm_sqr() - psi.b.norm_sqr())
}

// Small 3-vector helpers shared by the geometry and gate modules.

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn normalize3(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(a);
    (n > 0.0 && n.is_finite()).then(|| scale3(a, 1.0 / n))
}

/// Geodesic angle between two unit vectors, accurate for small and
/// near-antipodal separations.
pub(crate) fn angle3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(cross3(a, b)).atan2(dot3(a, b))
}

/// A 3×3 rotation matrix, row-major.
pub type Rotation3 = [[f64; 3]; 3];

/// Right-handed rotation by `angle` about the unit `axis` (Rodrigues).
pub fn rotation_matrix(axis: [f64; 3], angle: f64) -> Rotation3 {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = axis;
    [
        [c + t * x * x, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, c + t * y * y, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, c + t * z * z],
    ]
}

pub fn rotate(r: &Rotation3, v: [f64; 3]) -> [f64; 3] {
    [dot3(r[0], v), dot3(r[1], v), dot3(r[2], v)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn decompose_basis_elements() {
        let z = pauli_decompose(&Operator2::sigma_z()).unwrap();
        assert_eq!(z, PauliCoefficients::new(0.0, 0.0, 0.0, 1.0));
        let i = pauli_decompose(&Operator2::identity()).unwrap();
        assert_eq!(i, PauliCoefficients::new(1.0, 0.0, 0.0, 0.0));
        let y = pauli_decompose(&Operator2::sigma_y()).unwrap();
        assert_eq!(y, PauliCoefficients::new(0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let m = Operator2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        match pauli_decompose(&m) {
            Err(Error::NonHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn decompose_symmetrizes_rounding() {
        let mut m = PauliCoefficients::new(0.3, -1.0, 2.0, 0.5).to_operator();
        m.m[0][1] += c(1e-12, 0.0);
        let p = pauli_decompose(&m).unwrap();
        assert!((p.cx - (-1.0 + 0.5e-12)).abs() < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = exp_hermitian(&PauliCoefficients::zero(), 3.7);
        assert_eq!(u, Operator2::identity());
    }

    #[test]
    fn exp_pi_rotation_about_x() {
        let dt = 0.8;
        let h = PauliCoefficients::new(0.0, PI / (2.0 * dt), 0.0, 0.0);
        let u = exp_hermitian(&h, dt);
        let expected = Operator2::sigma_x().scale(c(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn exp_stays_unitary_at_large_angles() {
        for &t in &[1.0, 10.0, 1e2, 1e3] {
            let h = PauliCoefficients::new(0.7, 0.3, -0.8, 0.52);
            let u = exp_hermitian(&h, t / h.magnitude());
            assert!(u.unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn bloch_examples() {
        let n = bloch_vector(&QubitState::zero()).unwrap();
        assert_eq!(n, BlochVector::new(0.0, 0.0, 1.0));
        let p = bloch_vector(&QubitState::plus()).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15 && p.z.abs() < 1e-15);
        let q = bloch_vector(&QubitState::plus_i()).unwrap();
        assert!(q.x.abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15 && q.z.abs() < 1e-15);
    }

    #[test]
    fn bloch_rejects_unnormalized() {
        let psi = QubitState::from_amplitudes(c(1.0, 0.0), c(0.1, 0.0));
        assert!(matches!(bloch_vector(&psi), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn from_bloch_round_trips() {
        for r in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.3, -0.4, -0.866]] {
            let psi = QubitState::from_bloch(r).unwrap();
            let b = bloch_vector(&psi).unwrap().to_array();
            let n = norm3(r);
            for i in 0..3 {
                assert!((b[i] - r[i] / n).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * FRAC_PI_2) + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_matches_known_values() {
        assert!((Operator2::sigma_x().norm() - 1.0).abs() < 1e-15);
        let h = PauliCoefficients::new(0.5, 0.0, 0.0, 2.0).to_operator();
        assert!((h.norm() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn rodrigues_quarter_turn() {
        let r = rotation_matrix([0.0, 0.0, 1.0], FRAC_PI_2);
        let v = rotate(&r, [1.0, 0.0, 0.0]);
        assert!((v[1] - 1.0).abs() < 1e-15 && v[0].abs() < 1e-15);
    }
}
