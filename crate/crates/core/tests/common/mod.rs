//! Reference computations that share no code with the library integrator:
//! dense 2×2 algebra, a Taylor-series matrix exponential, classical RK4 and
//! closed forms for the gate schemes.

#![allow(dead_code)]

use geophase::{Complex64 as C, HamiltonianSchedule, Segment};
use rand::Rng;

pub type M = [[C; 2]; 2];

pub const I: C = C::new(0.0, 1.0);

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn eye() -> M {
    [[c(1.0), c(0.0)], [c(0.0), c(1.0)]]
}

pub fn mul(a: &M, b: &M) -> M {
    let mut m = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn add(a: &M, b: &M) -> M {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn scale(a: &M, s: C) -> M {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn dagger(a: &M) -> M {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// `c0 I + cx σx + cy σy + cz σz`.
pub fn hamiltonian(c0: f64, cx: f64, cy: f64, cz: f64) -> M {
    [[C::new(c0 + cz, 0.0), C::new(cx, -cy)], [C::new(cx, cy), C::new(c0 - cz, 0.0)]]
}

/// `exp(A)` by scaling and squaring with a 30-term Taylor series.
pub fn expm(a: &M) -> M {
    let norm: f64 = a.iter().flatten().map(|z| z.norm()).sum();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let small = scale(a, c(0.5f64.powi(squarings as i32)));
    let mut term = eye();
    let mut sum = eye();
    for k in 1..30 {
        term = scale(&mul(&term, &small), c(1.0 / k as f64));
        sum = add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

pub fn segment_h(seg: &Segment, t: f64) -> M {
    let p = seg.coefficients(t);
    hamiltonian(p.c0, p.cx, p.cy, p.cz)
}

/// Classical RK4 for `dU/dt = −i H U`, run segment by segment.
pub fn rk4_unitary(schedule: &HamiltonianSchedule, steps_per_segment: usize) -> M {
    let mut u = eye();
    for seg in schedule.segments() {
        let h = seg.duration / steps_per_segment as f64;
        let f = |t: f64, u: &M| scale(&mul(&segment_h(seg, t), u), -I);
        for k in 0..steps_per_segment {
            let t = k as f64 * h;
            let k1 = f(t, &u);
            let k2 = f(t + 0.5 * h, &add(&u, &scale(&k1, c(0.5 * h))));
            let k3 = f(t + 0.5 * h, &add(&u, &scale(&k2, c(0.5 * h))));
            let k4 = f(t + h, &add(&u, &scale(&k3, c(h))));
            let inc = add(&add(&k1, &scale(&k2, c(2.0))), &add(&scale(&k3, c(2.0)), &k4));
            u = add(&u, &scale(&inc, c(h / 6.0)));
        }
    }
    u
}

/// Exact propagator of a piecewise-constant schedule.
pub fn constant_product(schedule: &HamiltonianSchedule) -> M {
    let mut u = eye();
    for seg in schedule.segments() {
        let h = segment_h(seg, 0.0);
        u = mul(&expm(&scale(&h, -I * seg.duration)), &u);
    }
    u
}

pub type V = [C; 2];

pub fn apply(m: &M, v: &V) -> V {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn inner(u: &V, v: &V) -> C {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// `−∫⟨ψ(t)|H|ψ(t)⟩dt` for a piecewise-constant schedule: the energy is
/// constant within each segment.
pub fn constant_dynamical_phase(schedule: &HamiltonianSchedule, psi: &V) -> f64 {
    let mut state = *psi;
    let mut phase = 0.0;
    for seg in schedule.segments() {
        let h = segment_h(seg, 0.0);
        phase -= inner(&state, &apply(&h, &state)).re * seg.duration;
        state = apply(&expm(&scale(&h, -I * seg.duration)), &state);
    }
    phase
}

/// Random traceless-or-not piecewise-constant schedule with 3–8 segments,
/// coefficients in [−5, 5] and total duration in [0.5, 3].
pub fn random_constant_schedule<R: Rng>(rng: &mut R, traceless: bool) -> HamiltonianSchedule {
    let n = rng.random_range(3..=8);
    let tau = rng.random_range(0.5..3.0);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let segments = weights
        .iter()
        .map(|w| {
            let c0 = if traceless { 0.0 } else { rng.random_range(-5.0..5.0) };
            let p = geophase::PauliCoefficients::new(
                c0,
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            Segment::constant(tau * w / total, p)
        })
        .collect();
    HamiltonianSchedule::new(segments).unwrap()
}

pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

pub fn angle_gap(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Rotating-frame closed form for `H = (ω1(cos ωt σx + sin ωt σy) + ω0 σz)/2`
/// over one period: the label-0 cyclic Bloch vector `(bx, 0, bz)` with
/// `bz ≥ 0`, its dynamical phase and its solid angle.
pub struct RotatingOracle {
    pub bx: f64,
    pub bz: f64,
    pub dynamical: f64,
    pub solid_angle: f64,
}

pub fn rotating_oracle(omega: f64, omega1: f64, omega0: f64) -> RotatingOracle {
    let d = omega0 - omega;
    let lambda = (omega1 * omega1 + d * d).sqrt();
    let (mut bx, mut bz) = (omega1 / lambda, d / lambda);
    if bz < 0.0 {
        bx = -bx;
        bz = -bz;
    }
    let dynamical = -(std::f64::consts::PI / omega) * (omega1 * bx + omega0 * bz);
    let solid_angle = omega.signum() * std::f64::consts::TAU * (1.0 - bz);
    RotatingOracle { bx, bz, dynamical, solid_angle }
}

/// Parameters solving `δ_0 = 2πn`, `Ω = target` in closed form.
pub fn tuning_closed_form(omega: f64, target: f64, n: i64) -> (f64, f64) {
    let bz = 1.0 - target / std::f64::consts::TAU;
    let bx = (1.0 - bz * bz).sqrt();
    let n = n as f64;
    if n <= -1.0 {
        let k = -omega * (2.0 * n + bz);
        (omega + k * bz, k * bx)
    } else {
        let k = omega * (2.0 * n + bz);
        (omega - k * bz, -k * bx)
    }
}
