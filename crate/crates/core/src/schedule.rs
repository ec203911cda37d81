//! Piecewise descriptions of a time-dependent Hamiltonian `H(t)` on `[0, τ]`.
//!
//! Each [`Segment`] evaluates its coefficients as a function of segment-local
//! time. A segment is a base [`Drive`] plus optional modifiers used by the
//! gauge and noise machinery: an identity shift, a Pauli-vector rescaling and
//! frame rotation, a monotone time warp and a dressing term along a precessing
//! axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{rotate, rotation_matrix, scale3, PauliCoefficients, Rotation3};

/// Base coefficient law of a segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Drive {
    /// Time-independent coefficients.
    Constant {
        c0: f64,
        cx: f64,
        cy: f64,
        cz: f64,
    },
    /// `c0 I + transverse (cos(ωt+φ) σx + sin(ωt+φ) σy) + longitudinal σz`.
    RotatingField {
        c0: f64,
        transverse: f64,
        frequency: f64,
        phase: f64,
        longitudinal: f64,
    },
    /// Uniform samples including both endpoints, linearly interpolated.
    Sampled { samples: Vec<[f64; 4]> },
}

impl Drive {
    pub fn constant(c: PauliCoefficients) -> Self {
        Drive::Constant { c0: c.c0, cx: c.cx, cy: c.cy, cz: c.cz }
    }

    /// Coefficients at local time `local` of a segment of length `duration`.
    fn at(&self, local: f64, duration: f64) -> PauliCoefficients {
        match *self {
            Drive::Constant { c0, cx, cy, cz } => PauliCoefficients::new(c0, cx, cy, cz),
            Drive::RotatingField { c0, transverse, frequency, phase, longitudinal } => {
                let (s, c) = (frequency * local + phase).sin_cos();
                PauliCoefficients::new(c0, transverse * c, transverse * s, longitudinal)
            }
            Drive::Sampled { ref samples } => {
                let n = samples.len();
                if n == 1 {
                    let s = samples[0];
                    return PauliCoefficients::new(s[0], s[1], s[2], s[3]);
                }
                let pos = (local / duration).clamp(0.0, 1.0) * (n - 1) as f64;
                let k = (pos.floor() as usize).min(n - 2);
                let w = pos - k as f64;
                let (p, q) = (samples[k], samples[k + 1]);
                let lerp = |i: usize| p[i] + w * (q[i] - p[i]);
                PauliCoefficients::new(lerp(0), lerp(1), lerp(2), lerp(3))
            }
        }
    }

    /// Exact `∫ c0 dt` over a segment of the given length.
    fn identity_integral(&self, duration: f64) -> f64 {
        match self {
            Drive::Constant { c0, .. } | Drive::RotatingField { c0, .. } => c0 * duration,
            Drive::Sampled { samples } => {
                if samples.len() == 1 {
                    return samples[0][0] * duration;
                }
                let h = duration / (samples.len() - 1) as f64;
                samples.windows(2).map(|w| 0.5 * h * (w[0][0] + w[1][0])).sum()
            }
        }
    }

    /// Drive evaluated at mirrored local time `duration − t`.
    fn mirrored(&self, duration: f64) -> Drive {
        match self {
            Drive::Constant { .. } => self.clone(),
            &Drive::RotatingField { c0, transverse, frequency, phase, longitudinal } => Drive::RotatingField {
                c0,
                transverse,
                frequency: -frequency,
                phase: frequency * duration + phase,
                longitudinal,
            },
            Drive::Sampled { samples } => {
                Drive::Sampled { samples: samples.iter().rev().copied().collect() }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match self {
            Drive::Constant { c0, cx, cy, cz } => [c0, cx, cy, cz].iter().all(|v| v.is_finite()),
            Drive::RotatingField { c0, transverse, frequency, phase, longitudinal } => {
                [c0, transverse, frequency, phase, longitudinal].iter().all(|v| v.is_finite())
            }
            Drive::Sampled { samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidSchedule("sampled drive has no samples".into()));
                }
                samples.iter().flatten().all(|v| v.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidSchedule("drive parameters must be finite".into()))
        }
    }
}

/// Cubic Bézier monotone map `B: [0,1] → [0,1]` with control values
/// `0, p1, p2, 1`; `B'(0) = 3 p1`, `B'(1) = 3 (1 − p2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Warp {
    pub p1: f64,
    pub p2: f64,
}

impl Warp {
    pub const IDENTITY: Warp = Warp { p1: 1.0 / 3.0, p2: 2.0 / 3.0 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) || p1 > p2 {
            return Err(Error::InvalidParams(format!(
                "warp control values must satisfy 0 ≤ p1 ≤ p2 ≤ 1, got ({p1}, {p2})"
            )));
        }
        Ok(Warp { p1, p2 })
    }

    pub fn map(&self, u: f64) -> f64 {
        let v = 1.0 - u;
        3.0 * v * v * u * self.p1 + 3.0 * v * u * u * self.p2 + u * u * u
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let v = 1.0 - u;
        3.0 * v * v * self.p1 + 6.0 * v * u * (self.p2 - self.p1) + 3.0 * u * u * (1.0 - self.p2)
    }

    /// `u ↦ 1 − B(1 − u)`.
    pub fn mirrored(&self) -> Warp {
        Warp { p1: 1.0 - self.p2, p2: 1.0 - self.p1 }
    }
}

/// Extra term `f(t) · R(axis, rate·s) start · σ` where `f` is a zero-mean
/// sine series in physical local time `t` and `s` is the warped time.
///
/// With `start` the Bloch vector of a cyclic state at the segment start and
/// `(axis, rate)` the precession of a constant drive, the term rotates the
/// cyclic states about their own Bloch direction. Their paths and the final
/// propagator are unchanged; superposition states pick up a different
/// dynamical phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dressing {
    pub start: [f64; 3],
    pub axis: [f64; 3],
    pub rate: f64,
    /// Amplitudes of `sin(2π k t / d)`, k = 1, 2, …
    pub amplitudes: Vec<f64>,
}

impl Dressing {
    fn profile(&self, t: f64, duration: f64) -> f64 {
        let w = std::f64::consts::TAU * t / duration;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * w).sin())
            .sum()
    }

    fn direction(&self, s: f64) -> [f64; 3] {
        rotate(&rotation_matrix(self.axis, self.rate * s), self.start)
    }

    fn mirrored(&self, duration: f64) -> Dressing {
        Dressing {
            start: self.direction(duration),
            axis: self.axis,
            rate: -self.rate,
            amplitudes: self.amplitudes.iter().map(|a| -a).collect(),
        }
    }
}

/// One piece of a schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub drive: Drive,
    /// Constant added to `c0`.
    #[serde(default)]
    pub shift: f64,
    /// Factor applied to the Pauli vector.
    #[serde(default = "one")]
    pub scale: f64,
    /// Frame rotation applied to the Pauli vector.
    #[serde(default)]
    pub rotation: Option<Rotation3>,
    #[serde(default)]
    pub warp: Option<Warp>,
    #[serde(default)]
    pub dressing: Option<Dressing>,
}

fn one() -> f64 {
    1.0
}

impl Segment {
    pub fn new(duration: f64, drive: Drive) -> Self {
        Segment { duration, drive, shift: 0.0, scale: 1.0, rotation: None, warp: None, dressing: None }
    }

    pub fn constant(duration: f64, c: PauliCoefficients) -> Self {
        Self::new(duration, Drive::constant(c))
    }

    /// Coefficients at segment-local time `t ∈ [0, duration]`.
    pub fn coefficients(&self, t: f64) -> PauliCoefficients {
        let d = self.duration;
        let (s, speed) = match &self.warp {
            Some(w) => {
                let u = t / d;
                (d * w.map(u), w.derivative(u))
            }
            None => (t, 1.0),
        };
        let base = self.drive.at(s, d);
        let mut v = scale3(base.vector(), self.scale);
        if let Some(r) = &self.rotation {
            v = rotate(r, v);
        }
        let mut c = PauliCoefficients::from_vector(base.c0, v).scaled(speed);
        c.c0 += self.shift;
        if let Some(dr) = &self.dressing {
            let f = dr.profile(t, d);
            let n = dr.direction(s);
            c = c + PauliCoefficients::from_vector(0.0, scale3(n, f));
        }
        c
    }

    /// Exact `∫ c0 dt` over the segment.
    pub fn identity_integral(&self) -> f64 {
        // The warp preserves ∫ c0, the dressing is traceless.
        self.drive.identity_integral(self.duration) + self.shift * self.duration
    }

    /// True if the coefficients do not depend on time.
    pub fn is_constant(&self) -> bool {
        matches!(self.drive, Drive::Constant { .. }) && self.warp.is_none() && self.dressing.is_none()
    }

    /// The segment evaluated at mirrored local time `duration − t`.
    pub fn mirrored(&self) -> Segment {
        Segment {
            duration: self.duration,
            drive: self.drive.mirrored(self.duration),
            shift: self.shift,
            scale: self.scale,
            rotation: self.rotation,
            warp: self.warp.map(|w| w.mirrored()),
            dressing: self.dressing.as_ref().map(|dr| dr.mirrored(self.duration)),
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "segment {index}: duration must be positive and finite, got {}",
                self.duration
            )));
        }
        self.drive.validate().map_err(|e| match e {
            Error::InvalidSchedule(m) => Error::InvalidSchedule(format!("segment {index}: {m}")),
            e => e,
        })?;
        if !self.shift.is_finite() || !self.scale.is_finite() {
            return Err(Error::NonFinite { segment: index, time: 0.0 });
        }
        Ok(())
    }
}

/// An ordered list of segments covering `[0, τ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSchedule {
    segments: Vec<Segment>,
}

impl HamiltonianSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("schedule has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            s.validate(i)?;
        }
        Ok(HamiltonianSchedule { segments })
    }

    /// A single constant segment.
    pub fn constant(duration: f64, c: PauliCoefficients) -> Result<Self> {
        Self::new(vec![Segment::constant(duration, c)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segments_mut(&mut self) -> &mut [Segment] {
        &mut self.segments
    }

    /// Total duration τ.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Exact `∫₀^τ Tr H dt = 2 ∫ c0 dt`.
    pub fn trace_integral(&self) -> f64 {
        2.0 * self.segments.iter().map(Segment::identity_integral).sum::<f64>()
    }

    /// Coefficients at global time `t`; at a boundary the later segment wins.
    pub fn coefficients_at(&self, t: f64) -> PauliCoefficients {
        let mut start = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            let end = start + s.duration;
            if t < end || i + 1 == self.segments.len() {
                return s.coefficients((t - start).clamp(0.0, s.duration));
            }
            start = end;
        }
        unreachable!("schedule has at least one segment")
    }

    /// Adds a constant to `c0` on every segment.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.shift += shift;
        }
        out
    }
}

/// Shifts `c0(t)` by one global constant so that `∫₀^τ Tr H dt = 0`.
pub fn make_traceless(schedule: &HamiltonianSchedule) -> HamiltonianSchedule {
    let mean = schedule.trace_integral() / (2.0 * schedule.duration());
    if mean == 0.0 {
        return schedule.clone();
    }
    schedule.shifted(-mean)
}

/// Segment order reversed and local time mirrored in each segment.
pub fn reverse_schedule(schedule: &HamiltonianSchedule) -> HamiltonianSchedule {
    HamiltonianSchedule { segments: schedule.segments.iter().rev().map(Segment::mirrored).collect() }
}

/// Concatenates schedules in order.
pub fn concat_schedules(parts: &[HamiltonianSchedule]) -> Result<HamiltonianSchedule> {
    if parts.is_empty() {
        return Err(Error::InvalidSchedule("cannot concatenate an empty list".into()));
    }
    Ok(HamiltonianSchedule { segments: parts.iter().flat_map(|p| p.segments.iter().cloned()).collect() })
}
