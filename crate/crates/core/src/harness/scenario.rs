use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use super::HarnessError;
use crate::error::Error;
use crate::gates::{
    orange_slice_schedule, rotating_field_schedule, spin_echo_schedule, OrangeSliceParams, RotatingFieldParams,
    SpinEchoParams, TuningSeed,
};
use crate::propagator::IntegratorConfig;
use crate::schedule::{HamiltonianSchedule, Segment};
use crate::su2::QubitState;

pub const SCENARIO_VERSION: u32 = 1;

/// A declarative experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub id: String,
    pub schedule: ScheduleSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleSpec {
    ExplicitSegments(ExplicitSegments),
    OrangeSlice(OrangeSliceParams),
    ParameterTuned(TunedSpec),
    SpinEcho(SpinEchoParams),
    RotatingField(RotatingFieldParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSegments {
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunedSpec {
    pub target_solid_angle: f64,
    pub winding: i64,
    #[serde(default)]
    pub seed: TuningSeed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Decompose,
    Delta,
    GammaOmega,
    RelativePhase,
}

/// Amplitudes `a|0⟩ + b|1⟩` as `[re, im]` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl StateSpec {
    pub fn balanced() -> Self {
        StateSpec { a: [FRAC_1_SQRT_2, 0.0], b: [FRAC_1_SQRT_2, 0.0] }
    }

    pub fn to_state(&self) -> crate::Result<QubitState> {
        QubitState::new(C64::new(self.a[0], self.a[1]), C64::new(self.b[0], self.b[1]))
    }
}

fn params_error(path: &str, e: Error) -> HarnessError {
    let message = match e {
        Error::InvalidParams(m) | Error::InvalidSchedule(m) | Error::InvalidConfig(m) => m,
        e => e.to_string(),
    };
    HarnessError::schema(path, message)
}

impl ScheduleSpec {
    /// Builds the schedule; parameter-tuned specs are only range-checked here
    /// since tuning runs simulations.
    pub fn build_untuned(&self) -> Result<Option<HamiltonianSchedule>, HarnessError> {
        let s = match self {
            ScheduleSpec::ExplicitSegments(e) => HamiltonianSchedule::new(e.segments.clone()),
            ScheduleSpec::OrangeSlice(p) => orange_slice_schedule(p),
            ScheduleSpec::SpinEcho(p) => spin_echo_schedule(p),
            ScheduleSpec::RotatingField(p) => rotating_field_schedule(p),
            ScheduleSpec::ParameterTuned(t) => {
                if !(t.target_solid_angle > 0.0 && t.target_solid_angle < 4.0 * std::f64::consts::PI) {
                    return Err(HarnessError::schema(
                        "schedule.target_solid_angle",
                        format!("must lie in (0, 4π), got {}", t.target_solid_angle),
                    ));
                }
                return Ok(None);
            }
        };
        s.map(Some).map_err(|e| params_error("schedule", e))
    }
}

impl Scenario {
    /// Semantic checks beyond the JSON schema.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != SCENARIO_VERSION {
            return Err(HarnessError::schema(
                "version",
                format!("unsupported version {}, expected {SCENARIO_VERSION}", self.version),
            ));
        }
        if self.id.is_empty() {
            return Err(HarnessError::schema("id", "must not be empty"));
        }
        if self.analyses.is_empty() {
            return Err(HarnessError::schema("analyses", "at least one analysis is required"));
        }
        for (i, s) in self.states.iter().enumerate() {
            s.to_state().map_err(|e| HarnessError::schema(format!("states[{i}]"), e.to_string()))?;
        }
        self.integrator.validate().map_err(|e| params_error("integrator", e))?;
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        self.schedule.build_untuned()?;
        Ok(())
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "schedule" {
            if let Some(inner) = schedule_error(text) {
                return inner;
            }
        }
        HarnessError::schema(path, e.into_inner().to_string())
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Re-parses the schedule block by kind so the error path reaches inside it.
fn schedule_error(text: &str) -> Option<HarnessError> {
    let mut root: serde_json::Value = serde_json::from_str(text).ok()?;
    let mut block = root.get_mut("schedule")?.as_object_mut()?.clone();
    let kind = block.remove("kind")?;
    let body = serde_json::Value::Object(block);
    fn check<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Option<HarnessError> {
        serde_path_to_error::deserialize::<_, T>(v)
            .err()
            .map(|e| HarnessError::schema(format!("schedule.{}", e.path()), e.into_inner().to_string()))
    }
    match kind.as_str()? {
        "explicit-segments" => check::<ExplicitSegments>(body),
        "orange-slice" => check::<OrangeSliceParams>(body),
        "parameter-tuned" => check::<TunedSpec>(body),
        "spin-echo" => check::<SpinEchoParams>(body),
        "rotating-field" => check::<RotatingFieldParams>(body),
        _ => None,
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}
