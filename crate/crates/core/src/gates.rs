//! Schedules for the three geometric phase-shift gate schemes.
//!
//! * [`orange_slice_schedule`]: two π pulses about equatorial axes separated
//!   by `φ`. Basis states travel pole to pole along a lune and never pick up a
//!   dynamical phase.
//! * [`parameter_tuned_schedule`]: one period of a rotating field with
//!   `(ω0, ω1)` tuned until `δ_0 ∈ 2πℤ` and the cyclic loop encloses a target
//!   solid angle.
//! * [`spin_echo_schedule`]: `C → π → C⁻¹ → π` around an adiabatic cone.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap_solid_angle;
use crate::phase::decompose;
use crate::propagator::{evolve, IntegratorConfig};
use crate::schedule::{concat_schedules, reverse_schedule, Drive, HamiltonianSchedule, Segment};
use crate::su2::{normalize3, Operator2, PauliCoefficients};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrangeSliceParams {
    /// Lune opening angle.
    pub phi: f64,
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "one")]
    pub t2: f64,
}

fn one() -> f64 {
    1.0
}

impl OrangeSliceParams {
    pub fn new(phi: f64) -> Self {
        OrangeSliceParams { phi, t1: 1.0, t2: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi <= TAU) {
            return Err(Error::InvalidParams(format!("orange slice: phi must lie in (0, 2π], got {}", self.phi)));
        }
        for (name, t) in [("t1", self.t1), ("t2", self.t2)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParams(format!("orange slice: {name} must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

pub fn orange_slice_schedule(p: &OrangeSliceParams) -> Result<HamiltonianSchedule> {
    p.validate()?;
    let a1 = PI / (2.0 * p.t1);
    let a2 = PI / (2.0 * p.t2);
    let (s, c) = p.phi.sin_cos();
    HamiltonianSchedule::new(vec![
        Segment::constant(p.t1, PauliCoefficients::new(0.0, a1, 0.0, 0.0)),
        Segment::constant(p.t2, PauliCoefficients::new(0.0, a2 * c, a2 * s, 0.0)),
    ])
}

/// `−exp(−iφσz)`.
pub fn orange_slice_unitary(phi: f64) -> Operator2 {
    let e = C64::from_polar(1.0, -phi);
    Operator2::diag(-e, -e.conj())
}

/// `H(t) = (ω1 (cos ωt σx + sin ωt σy) + ω0 σz) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatingFieldParams {
    pub omega: f64,
    pub omega1: f64,
    pub omega0: f64,
    #[serde(default = "one_loop")]
    pub loops: u32,
}

fn one_loop() -> u32 {
    1
}

impl RotatingFieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega != 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParams("rotating field: omega must be finite and nonzero".into()));
        }
        if !self.omega0.is_finite() || !self.omega1.is_finite() || (self.omega0 == 0.0 && self.omega1 == 0.0) {
            return Err(Error::InvalidParams("rotating field: (omega0, omega1) must be finite and not both zero".into()));
        }
        if self.loops == 0 {
            return Err(Error::InvalidParams("rotating field: loops must be at least 1".into()));
        }
        Ok(())
    }

    /// Duration of one drive period.
    pub fn period(&self) -> f64 {
        TAU / self.omega.abs()
    }
}

/// One segment per drive period.
pub fn rotating_field_schedule(p: &RotatingFieldParams) -> Result<HamiltonianSchedule> {
    p.validate()?;
    let drive = Drive::RotatingField {
        c0: 0.0,
        transverse: 0.5 * p.omega1,
        frequency: p.omega,
        phase: 0.0,
        longitudinal: 0.5 * p.omega0,
    };
    HamiltonianSchedule::new(vec![Segment::new(p.period(), drive); p.loops as usize])
}

/// Search settings for [`parameter_tuned_schedule`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningSeed {
    pub omega: f64,
    /// Search interval for `ω1`; defaults scale with `|ω|` and `|n|`.
    pub omega1_range: Option<[f64; 2]>,
    pub omega0_range: Option<[f64; 2]>,
    pub scan_points: usize,
    /// Steps per period of the sign scan that locates brackets.
    pub scan_steps: usize,
    /// Steps of the coarsest level of the Richardson table.
    pub steps: usize,
    pub levels: usize,
    pub dynamical_tolerance: f64,
    pub solid_angle_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for TuningSeed {
    fn default() -> Self {
        TuningSeed {
            omega: 1.0,
            omega1_range: None,
            omega0_range: None,
            scan_points: 48,
            scan_steps: 64,
            steps: 256,
            levels: 3,
            dynamical_tolerance: 1e-10,
            solid_angle_tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningReport {
    pub target_solid_angle: f64,
    pub winding: i64,
    pub omega: f64,
    pub omega0: f64,
    pub omega1: f64,
    /// `δ_0 − 2πn` at the returned parameters.
    pub dynamical_residual: f64,
    /// `Ω − target` (mod 4π) at the returned parameters.
    pub solid_angle_residual: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub evaluations: usize,
    pub trace: Vec<String>,
}

struct Tuner<'a> {
    seed: &'a TuningSeed,
    target: f64,
    dynamical_target: f64,
    omega0_range: [f64; 2],
}

#[derive(Clone, Copy)]
struct Evaluation {
    dynamical: f64,
    solid_angle: f64,
}

#[derive(Clone, Copy)]
struct InnerRoot {
    omega0: f64,
    eval: Evaluation,
    iterations: usize,
    evaluations: usize,
}

impl Tuner<'_> {
    fn params(&self, omega0: f64, omega1: f64) -> RotatingFieldParams {
        RotatingFieldParams { omega: self.seed.omega, omega1, omega0, loops: 1 }
    }

    fn simulate(&self, omega0: f64, omega1: f64, steps: usize) -> Option<Evaluation> {
        let schedule = rotating_field_schedule(&self.params(omega0, omega1)).ok()?;
        let prop = evolve(&schedule, &IntegratorConfig::with_steps(steps)).ok()?;
        let d = decompose(&prop).ok()?;
        if d.basis.degenerate {
            return None;
        }
        Some(Evaluation { dynamical: d.labels[0].dynamical, solid_angle: d.solid_angle.full() })
    }

    /// Richardson extrapolation of `δ_0` and `Ω` over step doublings.
    fn evaluate(&self, omega0: f64, omega1: f64) -> Option<Evaluation> {
        let levels = self.seed.levels.max(1);
        let mut table: Vec<[f64; 2]> = Vec::with_capacity(levels);
        for l in 0..levels {
            let e = self.simulate(omega0, omega1, self.seed.steps << l)?;
            table.push([e.dynamical, e.solid_angle]);
        }
        let reference = table[levels - 1][1];
        for row in table.iter_mut() {
            row[1] = reference + wrap_solid_angle(row[1] - reference);
        }
        for k in 1..levels {
            let f = 4f64.powi(k as i32);
            for i in (k..levels).rev() {
                for q in 0..2 {
                    table[i][q] = (f * table[i][q] - table[i - 1][q]) / (f - 1.0);
                }
            }
        }
        let [dynamical, solid_angle] = table[levels - 1];
        Some(Evaluation { dynamical, solid_angle })
    }

    fn coarse(&self, omega0: f64, omega1: f64) -> Option<f64> {
        self.simulate(omega0, omega1, self.seed.scan_steps).map(|e| e.dynamical - self.dynamical_target)
    }

    /// `ω0` with `δ_0 = 2πn` at fixed `ω1`. The imprecise variant uses a
    /// single coarse level and serves the outer scan.
    fn inner(&self, omega1: f64, precise: bool) -> std::result::Result<InnerRoot, String> {
        let [lo, hi] = self.omega0_range;
        let m = self.seed.scan_points.max(2);
        let grid: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
        let values: Vec<Option<f64>> = grid.par_iter().map(|&w0| self.coarse(w0, omega1)).collect();
        let mut evaluations = grid.len();
        let mut iterations = 0;
        for k in 0..m {
            let (Some(fa), Some(fb)) = (values[k], values[k + 1]) else { continue };
            if fa.signum() == fb.signum() {
                continue;
            }
            let eval = |w0: f64| {
                if precise {
                    self.evaluate(w0, omega1)
                } else {
                    self.simulate(w0, omega1, self.seed.steps)
                }
            };
            let tol = if precise { self.seed.dynamical_tolerance } else { COARSE_TOLERANCE };
            let f = |w0: f64| eval(w0).map(|e| e.dynamical - self.dynamical_target);
            let Some((a, b, fa, fb)) = refined_bracket(&f, &grid, k) else { continue };
            evaluations += 4;
            let root = illinois(f, a, b, fa, fb, tol, self.seed.max_iterations);
            iterations += root.iterations;
            evaluations += root.iterations;
            if let Some(x) = root.x {
                if let Some(eval) = eval(x) {
                    if (eval.dynamical - self.dynamical_target).abs() <= tol.max(1e-9) {
                        return Ok(InnerRoot { omega0: x, eval, iterations, evaluations: evaluations + 1 });
                    }
                }
            }
        }
        Err(format!(
            "omega1 = {omega1:.6e}: no bracket for δ_0 = {:.6} with omega0 in [{lo:.4e}, {hi:.4e}]",
            self.dynamical_target
        ))
    }
}

/// The coarse sign change in `[grid[k], grid[k+1]]` confirmed by `f`,
/// widened by one grid cell if the root sits next to a node.
fn refined_bracket<F>(f: &F, grid: &[f64], k: usize) -> Option<(f64, f64, f64, f64)>
where
    F: Fn(f64) -> Option<f64>,
{
    let (fa, fb) = (f(grid[k])?, f(grid[k + 1])?);
    if fa.signum() != fb.signum() {
        return Some((grid[k], grid[k + 1], fa, fb));
    }
    if k + 2 < grid.len() {
        if let Some(fc) = f(grid[k + 2]) {
            if fc.signum() != fb.signum() {
                return Some((grid[k + 1], grid[k + 2], fb, fc));
            }
        }
    }
    if k >= 1 {
        if let Some(fz) = f(grid[k - 1]) {
            if fz.signum() != fa.signum() {
                return Some((grid[k - 1], grid[k], fz, fa));
            }
        }
    }
    None
}

const COARSE_TOLERANCE: f64 = 1e-7;

struct Root {
    x: Option<f64>,
    iterations: usize,
}

/// Regula falsi with the Illinois modification. Returns `None` if the bracket
/// collapses onto a discontinuity.
fn illinois<F>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, tol: f64, max_iter: usize) -> Root
where
    F: Fn(f64) -> Option<f64>,
{
    let mut side = 0i8;
    for it in 1..=max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let Some(fx) = f(x) else { return Root { x: None, iterations: it } };
        if fx.abs() <= tol {
            return Root { x: Some(x), iterations: it };
        }
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            return Root { x: None, iterations: it };
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Root { x: None, iterations: max_iter }
}

/// Rotating-field schedule tuned so that `δ_0 = 2πn` and the cyclic loop of
/// `e0` encloses `target_solid_angle` (mod 4π).
pub fn parameter_tuned_schedule(
    target_solid_angle: f64,
    n: i64,
    seed: &TuningSeed,
) -> Result<(HamiltonianSchedule, TuningReport)> {
    if !(target_solid_angle > 0.0 && target_solid_angle < 2.0 * TAU) {
        return Err(Error::InvalidParams(format!(
            "target solid angle must lie in (0, 4π), got {target_solid_angle}"
        )));
    }
    if !(seed.omega != 0.0 && seed.omega.is_finite()) {
        return Err(Error::InvalidParams("tuning seed: omega must be finite and nonzero".into()));
    }
    if seed.steps < 2 || seed.scan_steps < 2 || seed.levels == 0 || seed.scan_points < 2 {
        return Err(Error::InvalidParams(
            "tuning seed: steps ≥ 2, scan_steps ≥ 2, levels ≥ 1, scan_points ≥ 2 required".into(),
        ));
    }
    let w = seed.omega.abs();
    let reach = 2.0 * (2 * n.unsigned_abs() + 1) as f64 * w;
    let omega1_range = seed.omega1_range.unwrap_or([1e-3 * w, reach]);
    let omega0_range = seed.omega0_range.unwrap_or([seed.omega - reach, seed.omega + reach]);
    for r in [omega1_range, omega0_range] {
        if !(r[0] < r[1]) || !r.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams(format!("tuning seed: invalid range {r:?}")));
        }
    }
    let tuner = Tuner { seed, target: target_solid_angle, dynamical_target: TAU * n as f64, omega0_range };
    let mut trace = Vec::new();

    let m = seed.scan_points;
    let [lo, hi] = omega1_range;
    let grid: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
    let scan: Vec<std::result::Result<InnerRoot, String>> = grid.par_iter().map(|&w1| tuner.inner(w1, false)).collect();
    let (grid, scan) = with_feasibility_edges(&tuner, grid, scan);
    let m = grid.len() - 1;
    let mut inner_iterations = 0;
    let mut evaluations = 0;
    let residual = |r: &InnerRoot| wrap_solid_angle(r.eval.solid_angle - tuner.target);
    for (w1, r) in grid.iter().zip(&scan) {
        match r {
            Ok(r) => {
                inner_iterations += r.iterations;
                evaluations += r.evaluations;
                trace.push(format!(
                    "scan omega1 = {w1:.6e}: omega0 = {:.9e}, Ω − target = {:+.3e}",
                    r.omega0,
                    residual(r)
                ));
            }
            Err(msg) => trace.push(format!("scan {msg}")),
        }
    }

    for k in 0..m {
        let (Ok(ra), Ok(rb)) = (&scan[k], &scan[k + 1]) else { continue };
        let (ca, cb) = (residual(ra), residual(rb));
        if ca.signum() == cb.signum() || (ca - cb).abs() > PI {
            continue;
        }
        let inner_stats = std::sync::Mutex::new((0usize, 0usize, None::<(f64, InnerRoot)>));
        let mut confirm = |w1: f64| match tuner.inner(w1, true) {
            Ok(r) => {
                let mut s = inner_stats.lock().unwrap();
                s.0 += r.iterations;
                s.1 += r.evaluations;
                let res = residual(&r);
                s.2 = Some((w1, r));
                Some(res)
            }
            Err(msg) => {
                trace.push(format!("bisection {msg}"));
                None
            }
        };
        let Some((a, b, fa, fb)) = refined_bracket_mut(&mut confirm, &grid, k) else {
            trace.push(format!("bracket omega1 in [{:.6e}, {:.6e}] vanished at full accuracy", grid[k], grid[k + 1]));
            continue;
        };
        let root = illinois_mut(&mut confirm, a, b, fa, fb, seed.solid_angle_tolerance, seed.max_iterations);
        let (it, ev, last) = inner_stats.into_inner().unwrap();
        inner_iterations += it;
        evaluations += ev;
        if let (Some(x), Some((w1, r))) = (root.x, last) {
            if w1 == x {
                let report = TuningReport {
                    target_solid_angle,
                    winding: n,
                    omega: seed.omega,
                    omega0: r.omega0,
                    omega1: w1,
                    dynamical_residual: r.eval.dynamical - tuner.dynamical_target,
                    solid_angle_residual: residual(&r),
                    outer_iterations: root.iterations,
                    inner_iterations,
                    evaluations,
                    trace,
                };
                let schedule = rotating_field_schedule(&tuner.params(r.omega0, w1))?;
                return Ok((schedule, report));
            }
        }
        trace.push(format!(
            "bracket omega1 in [{:.6e}, {:.6e}] did not converge after {} iterations",
            grid[k],
            grid[k + 1],
            root.iterations
        ));
    }
    Err(Error::Tuning {
        message: format!(
            "no (omega0, omega1) in {omega0_range:?} × {omega1_range:?} reaches Ω = {target_solid_angle} with δ_0 = 2π·{n}"
        ),
        trace,
    })
}

/// Bisection steps locating the edge of the region where the inner solve succeeds.
const EDGE_BISECTIONS: usize = 16;

/// Inserts, between every feasible and infeasible neighbour of the outer scan,
/// the feasible point closest to the edge of the feasible region.
fn with_feasibility_edges(
    tuner: &Tuner,
    grid: Vec<f64>,
    scan: Vec<std::result::Result<InnerRoot, String>>,
) -> (Vec<f64>, Vec<std::result::Result<InnerRoot, String>>) {
    let mut out_grid = Vec::with_capacity(grid.len());
    let mut out_scan = Vec::with_capacity(grid.len());
    let n = grid.len();
    let mut items = grid.into_iter().zip(scan).peekable();
    for _ in 0..n {
        let (w, r) = items.next().expect("length checked");
        let next_ok = items.peek().map(|(wn, rn)| (*wn, rn.is_ok()));
        let ok = r.is_ok();
        out_grid.push(w);
        out_scan.push(r);
        let Some((wn, next_ok)) = next_ok else { break };
        if ok == next_ok {
            continue;
        }
        let (mut good, mut bad) = if ok { (w, wn) } else { (wn, w) };
        let mut best = None;
        for _ in 0..EDGE_BISECTIONS {
            let mid = 0.5 * (good + bad);
            match tuner.inner(mid, false) {
                Ok(root) => {
                    good = mid;
                    best = Some((mid, root));
                }
                Err(_) => bad = mid,
            }
        }
        if let Some((mid, root)) = best {
            out_grid.push(mid);
            out_scan.push(Ok(root));
        }
    }
    (out_grid, out_scan)
}

fn refined_bracket_mut<F>(f: &mut F, grid: &[f64], k: usize) -> Option<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Option<f64>,
{
    let cell = std::cell::RefCell::new(f);
    refined_bracket(&|x| (cell.borrow_mut())(x), grid, k)
}

fn illinois_mut<F>(f: &mut F, a: f64, b: f64, fa: f64, fb: f64, tol: f64, max_iter: usize) -> Root
where
    F: FnMut(f64) -> Option<f64>,
{
    let cell = std::cell::RefCell::new(f);
    illinois(|x| (cell.borrow_mut())(x), a, b, fa, fb, tol, max_iter)
}

/// Cone loop and echo settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEchoParams {
    /// Cone half-angle.
    pub theta: f64,
    /// Larmor frequency `ω_L`.
    pub larmor: f64,
    /// Loop traversal frequency `ω_loop`.
    pub loop_frequency: f64,
    #[serde(default = "default_pulse_axis")]
    pub pulse_axis: [f64; 3],
    /// π-pulse duration as a fraction of the loop duration.
    #[serde(default = "default_pulse_fraction")]
    pub pulse_fraction: f64,
    /// Identity term `c0 = level_offset · ω_L / 2` during the loops.
    #[serde(default)]
    pub level_offset: f64,
}

fn default_pulse_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

fn default_pulse_fraction() -> f64 {
    1e-3
}

/// Ratio `ω_loop / ω_L` above which the loop is flagged as non-adiabatic.
pub const ADIABATICITY_WARN: f64 = 0.05;

impl SpinEchoParams {
    pub fn new(theta: f64, larmor: f64, loop_frequency: f64) -> Self {
        SpinEchoParams {
            theta,
            larmor,
            loop_frequency,
            pulse_axis: default_pulse_axis(),
            pulse_fraction: default_pulse_fraction(),
            level_offset: 0.0,
        }
    }

    /// Parameters with `ω_L = 1` and the given adiabaticity ratio.
    pub fn with_ratio(theta: f64, ratio: f64) -> Self {
        Self::new(theta, 1.0, ratio)
    }

    pub fn adiabaticity_ratio(&self) -> f64 {
        self.loop_frequency / self.larmor
    }

    pub fn loop_duration(&self) -> f64 {
        TAU / self.loop_frequency
    }

    pub fn pulse_duration(&self) -> f64 {
        self.pulse_fraction * self.loop_duration()
    }

    /// Cap area `2π(1 − cos θ)`.
    pub fn cap_solid_angle(&self) -> f64 {
        TAU * (1.0 - self.theta.cos())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 0.5 * PI) {
            return Err(Error::InvalidParams(format!("spin echo: theta must lie in (0, π/2), got {}", self.theta)));
        }
        if !(self.larmor > 0.0 && self.larmor.is_finite()) {
            return Err(Error::InvalidParams("spin echo: larmor must be positive".into()));
        }
        if !(self.loop_frequency > 0.0 && self.loop_frequency.is_finite()) {
            return Err(Error::InvalidParams("spin echo: loop_frequency must be positive".into()));
        }
        if !(self.pulse_fraction > 0.0 && self.pulse_fraction.is_finite()) {
            return Err(Error::InvalidParams("spin echo: pulse_fraction must be positive".into()));
        }
        if !self.level_offset.is_finite() {
            return Err(Error::InvalidParams("spin echo: level_offset must be finite".into()));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let r = self.adiabaticity_ratio();
        if r > ADIABATICITY_WARN {
            vec![format!("adiabaticity ratio {r:.3e} exceeds {ADIABATICITY_WARN}; the loop is not adiabatic")]
        } else {
            Vec::new()
        }
    }
}

/// One traversal of the cone
/// `H = (ω_L/2)(sin θ cos(ω_loop t) σx + sin θ sin(ω_loop t) σy + cos θ σz)`.
pub fn adiabatic_loop(p: &SpinEchoParams) -> Result<HamiltonianSchedule> {
    p.validate()?;
    let half = 0.5 * p.larmor;
    let drive = Drive::RotatingField {
        c0: p.level_offset * half,
        transverse: half * p.theta.sin(),
        frequency: p.loop_frequency,
        phase: 0.0,
        longitudinal: half * p.theta.cos(),
    };
    HamiltonianSchedule::new(vec![Segment::new(p.loop_duration(), drive)])
}

/// Constant `H = (π / 2d) n·σ`, so that `U = −i n·σ`.
pub fn pi_pulse(axis: [f64; 3], duration: f64) -> Result<HamiltonianSchedule> {
    let n = unit_axis(axis)?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParams(format!("pi pulse: duration must be positive, got {duration}")));
    }
    let a = PI / (2.0 * duration);
    HamiltonianSchedule::constant(duration, PauliCoefficients::new(0.0, a * n[0], a * n[1], a * n[2]))
}

/// The ideal instantaneous π pulse `−i n·σ`.
pub fn pi_pulse_unitary(axis: [f64; 3]) -> Result<Operator2> {
    let n = unit_axis(axis)?;
    let m = PauliCoefficients::new(0.0, n[0], n[1], n[2]).to_operator();
    Ok(m.scale(C64::new(0.0, -1.0)))
}

fn unit_axis(axis: [f64; 3]) -> Result<[f64; 3]> {
    if !axis.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParams("pi pulse: axis must be finite".into()));
    }
    normalize3(axis).ok_or_else(|| Error::InvalidParams("pi pulse: axis must be nonzero".into()))
}

/// `C → π → C⁻¹ → π`.
pub fn spin_echo_schedule(p: &SpinEchoParams) -> Result<HamiltonianSchedule> {
    let c = adiabatic_loop(p)?;
    let pulse = pi_pulse(p.pulse_axis, p.pulse_duration())?;
    concat_schedules(&[c.clone(), pulse.clone(), reverse_schedule(&c), pulse])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::relative_phase;
    use crate::su2::{angle_distance, wrap_angle};

    #[test]
    fn orange_slice_quarter_turn() {
        let s = orange_slice_schedule(&OrangeSliceParams::new(0.5 * PI)).unwrap();
        let prop = evolve(&s, &IntegratorConfig::with_steps(50)).unwrap();
        let u = prop.final_unitary();
        let i = C64::new(0.0, 1.0);
        assert!(u.max_abs_diff(&Operator2::diag(i, -i)) < 1e-12);
        assert!(u.max_abs_diff(&orange_slice_unitary(0.5 * PI)) < 1e-12);
        let d = decompose(&prop).unwrap();
        let rel = relative_phase(&u, &d.basis).unwrap();
        assert!(angle_distance(rel.value, PI) < 1e-12);
        for l in d.labels {
            assert!(l.dynamical.abs() < 1e-12);
        }
    }

    #[test]
    fn orange_slice_full_lune_is_trivial() {
        let s = orange_slice_schedule(&OrangeSliceParams::new(TAU)).unwrap();
        let u = evolve(&s, &IntegratorConfig::with_steps(10)).unwrap().final_unitary();
        assert!(u.max_abs_diff(&Operator2::identity().scale_re(-1.0)) < 1e-12);
    }

    #[test]
    fn orange_slice_rejects_bad_params() {
        assert!(orange_slice_schedule(&OrangeSliceParams::new(0.0)).is_err());
        assert!(orange_slice_schedule(&OrangeSliceParams { phi: 1.0, t1: -1.0, t2: 1.0 }).is_err());
    }

    #[test]
    fn pi_pulses() {
        for (axis, m) in [([1.0, 0.0, 0.0], Operator2::sigma_x()), ([0.0, 1.0, 0.0], Operator2::sigma_y())] {
            let u = evolve(&pi_pulse(axis, 0.3).unwrap(), &IntegratorConfig::with_steps(7)).unwrap().final_unitary();
            assert!(u.max_abs_diff(&m.scale(C64::new(0.0, -1.0))) < 1e-12);
        }
        let twice = concat_schedules(&[pi_pulse([0.0, 0.0, 2.0], 1.0).unwrap(), pi_pulse([0.0, 0.0, 1.0], 1.0).unwrap()]).unwrap();
        let u = evolve(&twice, &IntegratorConfig::with_steps(3)).unwrap().final_unitary();
        assert!(u.max_abs_diff(&Operator2::identity().scale_re(-1.0)) < 1e-12);
        assert!(pi_pulse([0.0; 3], 1.0).is_err());
    }

    #[test]
    fn cone_loop_cap() {
        let p = SpinEchoParams::new(PI / 3.0, 1.0, 1e-3);
        assert!((p.cap_solid_angle() - PI).abs() < 1e-12);
        assert!(p.warnings().is_empty());
        assert_eq!(SpinEchoParams::with_ratio(0.5, 0.1).warnings().len(), 1);
        assert!(SpinEchoParams::new(0.0, 1.0, 0.1).validate().is_err());
    }

    #[test]
    fn echo_has_four_parts() {
        let p = SpinEchoParams::with_ratio(PI / 4.0, 0.05);
        let s = spin_echo_schedule(&p).unwrap();
        assert_eq!(s.segments().len(), 4);
        let expected = 2.0 * p.loop_duration() + 2.0 * p.pulse_duration();
        assert!((s.duration() - expected).abs() < 1e-9);
    }

    #[test]
    fn rotating_field_period_and_validation() {
        let p = RotatingFieldParams { omega: -2.0, omega1: 1.0, omega0: 0.5, loops: 2 };
        let s = rotating_field_schedule(&p).unwrap();
        assert!((s.duration() - TAU).abs() < 1e-12);
        assert!(rotating_field_schedule(&RotatingFieldParams { omega: 0.0, ..p }).is_err());
        assert!(rotating_field_schedule(&RotatingFieldParams { omega0: 0.0, omega1: 0.0, ..p }).is_err());
    }

    #[test]
    fn tuner_rejects_out_of_range_target() {
        assert!(parameter_tuned_schedule(0.0, -1, &TuningSeed::default()).is_err());
        assert!(parameter_tuned_schedule(4.0 * TAU, -1, &TuningSeed::default()).is_err());
    }

    #[test]
    fn tuner_reaches_quarter_sphere() {
        let (s, r) = parameter_tuned_schedule(PI, -1, &TuningSeed::default()).unwrap();
        assert!(r.dynamical_residual.abs() < 1e-9, "{r:?}");
        assert!(r.solid_angle_residual.abs() < 1e-6, "{r:?}");
        let prop = evolve(&s, &IntegratorConfig::with_steps(4000)).unwrap();
        let d = decompose(&prop).unwrap();
        assert!(angle_distance(d.labels[0].dynamical, 0.0) < 1e-5);
        assert!(wrap_angle(d.labels[0].geometric + 0.5 * PI).abs() < 1e-5);
    }
}
