use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::error::Result;
use crate::phase::CyclicBasis;
use crate::propagator::Propagation;
use crate::schedule::{Dressing, Drive, HamiltonianSchedule, Warp};
use crate::su2::{bloch_unchecked, dot3, normalize3, rotation_matrix, scale3, sub3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Random monotone time warp per segment plus a dressing along the cyclic
    /// directions. The cyclic-state paths and `U(τ)` are unchanged.
    SolidAnglePreservingReparametrization,
    /// Pauli vector of every segment scaled by `1 + s·g`.
    AmplitudeJitter,
    /// Pauli vector of every segment rotated by `s·g` about a random axis
    /// perpendicular to it.
    AxisTilt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub strength: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Terms in the dressing sine series.
const DRESSING_TERMS: usize = 3;

impl NoiseModel {
    pub fn validate(&self) -> std::result::Result<(), HarnessError> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(HarnessError::schema("noise.strength", format!("must be finite and ≥ 0, got {}", self.strength)));
        }
        if self.samples < 1 {
            return Err(HarnessError::schema("noise.samples", "must be at least 1"));
        }
        Ok(())
    }
}

/// Generator for sample `index`: ChaCha8 seeded with `seed`, stream `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_perpendicular(rng: &mut ChaCha8Rng, v: [f64; 3]) -> [f64; 3] {
    loop {
        let w = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let w = match normalize3(v) {
            Some(n) => sub3(w, scale3(n, dot3(w, n))),
            None => w,
        };
        if let Some(u) = normalize3(w) {
            return u;
        }
    }
}

fn random_warp(rng: &mut ChaCha8Rng, s: f64) -> Warp {
    let p1 = rng.random_range(((1.0 - s) / 3.0).max(0.0)..=((1.0 + s) / 3.0).min(1.0));
    let p2 = rng.random_range(((2.0 - s) / 3.0).max(p1)..=((2.0 + s) / 3.0).min(1.0));
    Warp { p1, p2 }
}

/// Sample `index` of the perturbed schedule.
///
/// `baseline` and `basis` describe the unperturbed evolution; they supply the
/// cyclic-state direction at each segment start for the dressing term.
pub fn perturb_schedule(
    schedule: &HamiltonianSchedule,
    model: &NoiseModel,
    index: u64,
    baseline: &Propagation,
    basis: &CyclicBasis,
) -> HamiltonianSchedule {
    let mut out = schedule.clone();
    let s = model.strength;
    if s == 0.0 {
        return out;
    }
    let mut rng = sample_rng(model.seed, index);
    let starts = baseline.segment_starts();
    for (j, seg) in out.segments_mut().iter_mut().enumerate() {
        match model.kind {
            NoiseKind::SolidAnglePreservingReparametrization => {
                let c = seg.coefficients(0.0);
                seg.warp = Some(random_warp(&mut rng, s));
                let amplitudes: Vec<f64> = (1..=DRESSING_TERMS)
                    .map(|k| s * std::f64::consts::PI / seg.duration * gaussian(&mut rng) / k as f64)
                    .collect();
                if matches!(seg.drive, Drive::Constant { .. }) && seg.dressing.is_none() {
                    let u = baseline.unitaries()[starts[j]];
                    let start = bloch_unchecked(&u.apply(&basis.e0)).to_array();
                    let magnitude = c.magnitude();
                    let axis = normalize3(c.vector()).unwrap_or([0.0, 0.0, 1.0]);
                    seg.dressing = Some(Dressing { start, axis, rate: 2.0 * magnitude, amplitudes });
                }
            }
            NoiseKind::AmplitudeJitter => {
                seg.scale *= 1.0 + s * gaussian(&mut rng);
            }
            NoiseKind::AxisTilt => {
                let c = seg.coefficients(0.5 * seg.duration).vector();
                let axis = random_perpendicular(&mut rng, c);
                let tilt = rotation_matrix(axis, s * gaussian(&mut rng));
                seg.rotation = Some(match seg.rotation {
                    Some(r) => compose(&tilt, &r),
                    None => tilt,
                });
            }
        }
    }
    out
}

fn compose(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|j| a[i][j] * b[j][k]).sum();
        }
    }
    m
}

/// Runs `f` on every perturbed sample in parallel; results are in sample order.
pub fn noise_sweep<T, F>(
    schedule: &HamiltonianSchedule,
    model: &NoiseModel,
    baseline: &Propagation,
    basis: &CyclicBasis,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&HamiltonianSchedule) -> Result<T> + Sync,
{
    (0..model.samples as u64)
        .into_par_iter()
        .map(|i| f(&perturb_schedule(schedule, model, i, baseline, basis)))
        .collect()
}
