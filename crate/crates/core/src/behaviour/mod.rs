//! Behaviour metric: static problem success likelihood, memory-based
//! prediction, the self-adjusting dynamic variant and a feedback simulator.

mod predict;
mod scenario;
mod simulate;

use thiserror::Error;

pub use predict::{
    event_term, predict, predict_after_response, problem_complexity_dynamic, psl_dynamic,
    AgentState, Eq6Mode, MemoryEvent, PredictConfig, PslMode, ResponseFn, DEFAULT_PC_FLOOR,
};
pub use scenario::{parse_scenario, ScenarioScript};
pub use simulate::{simulate, SimulationTrace, SituationOutcome, StepRecord, Termination};

#[derive(Debug, Error, PartialEq)]
pub enum BehaviourError {
    #[error("behaviour {id:?}: {attribute} = {value} is outside [0, 1]")]
    AttributeOutOfRange {
        id: String,
        attribute: &'static str,
        value: f64,
    },

    #[error("problem complexity must lie in (0, 1], got {0}")]
    ProblemComplexity(f64),

    #[error("problem behaviour set is empty")]
    EmptyProblem,

    #[error("memory event for {0:?} has time 0")]
    ZeroTime(String),

    #[error("memory event for {0:?} has zero occurrences")]
    ZeroOccurrences(String),

    #[error("response {0} is outside [-1, 1]")]
    ResponseOutOfRange(f64),

    #[error("problem complexity {pc} is below the floor {floor}")]
    BelowFloor { pc: f64, floor: f64 },

    #[error("no behaviour available for situation {0:?}")]
    NoBehaviours(String),

    #[error("no response defined for behaviour {behaviour:?} in situation {situation:?}")]
    NoResponse {
        situation: String,
        behaviour: String,
    },

    #[error("unknown behaviour {0:?}")]
    UnknownBehaviour(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, BehaviourError>;

/// Static attributes of one behaviour, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviourSpec {
    pub id: String,
    pub ability: f64,
    pub flexibility: f64,
    pub coordination: f64,
    pub cooperation: f64,
    pub signal_in: f64,
    pub signal_out: f64,
}

impl BehaviourSpec {
    /// Attribute order: ability, flexibility, coordination, cooperation,
    /// signal in, signal out.
    pub fn new(id: impl Into<String>, attrs: [f64; 6]) -> Result<Self> {
        let id = id.into();
        const NAMES: [&str; 6] = [
            "ability",
            "flexibility",
            "coordination",
            "cooperation",
            "signal_in",
            "signal_out",
        ];
        for (name, &value) in NAMES.iter().zip(&attrs) {
            if !(0.0..=1.0).contains(&value) {
                return Err(BehaviourError::AttributeOutOfRange {
                    id,
                    attribute: name,
                    value,
                });
            }
        }
        let [ability, flexibility, coordination, cooperation, signal_in, signal_out] = attrs;
        Ok(Self {
            id,
            ability,
            flexibility,
            coordination,
            cooperation,
            signal_in,
            signal_out,
        })
    }

    /// Every attribute set to `v`.
    pub fn uniform(id: impl Into<String>, v: f64) -> Result<Self> {
        Self::new(id, [v; 6])
    }

    /// Individual intelligence: mean of ability and flexibility.
    pub fn intelligence(&self) -> f64 {
        (self.ability + self.flexibility) / 2.0
    }

    pub fn communication(&self) -> f64 {
        (self.signal_in + self.signal_out) / 2.0
    }

    /// Collective capability: coordination, cooperation and communication.
    pub fn collective_static(&self) -> f64 {
        (self.coordination + self.cooperation + self.communication()) / 3.0
    }

    /// Collective capability without coordination, which the dynamic metric
    /// moves into the prediction.
    pub fn collective_dynamic(&self) -> f64 {
        (self.cooperation + self.communication()) / 2.0
    }

    pub fn entity_complexity(&self) -> f64 {
        (self.intelligence() + self.collective_static()) / 2.0
    }
}

/// A modelled problem: its behaviour set and required complexity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    behaviours: Vec<BehaviourSpec>,
    problem_complexity: f64,
}

impl ProblemSpec {
    pub fn new(behaviours: Vec<BehaviourSpec>, problem_complexity: f64) -> Result<Self> {
        if behaviours.is_empty() {
            return Err(BehaviourError::EmptyProblem);
        }
        if !(problem_complexity > 0.0 && problem_complexity <= 1.0) {
            return Err(BehaviourError::ProblemComplexity(problem_complexity));
        }
        Ok(Self {
            behaviours,
            problem_complexity,
        })
    }

    pub fn behaviours(&self) -> &[BehaviourSpec] {
        &self.behaviours
    }

    /// Static problem success likelihood: mean entity complexity over the
    /// behaviour set, divided by the problem complexity.
    pub fn psl_static(&self) -> f64 {
        let n = self.behaviours.len() as f64;
        let mean = self
            .behaviours
            .iter()
            .map(BehaviourSpec::entity_complexity)
            .sum::<f64>()
            / n;
        mean / self.problem_complexity
    }
}
