//! Memory-based prediction and the self-adjusting metric.

use std::collections::{BTreeMap, BTreeSet};

use super::{BehaviourError, BehaviourSpec, Result};

/// Default lower bound applied to the dynamic problem complexity.
pub const DEFAULT_PC_FLOOR: f64 = 0.05;

/// Per-event evaluation `f(n, EC, R, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseFn {
    /// `n * (EC + R) / t`
    #[default]
    Additive,
    /// `n * EC * R / t`, for responses read as weights.
    Multiplicative,
}

/// How the current term and the memory terms are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eq6Mode {
    /// `(EC + mean f) / 2`; memoryless prediction equals `EC`.
    #[default]
    Strict,
    /// `EC + sum f`, the un-normalised sums used when tracing the
    /// two-behaviour feedback example by hand.
    WorkedExample,
}

/// How the prediction is combined with the dynamic problem complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PslMode {
    #[default]
    Division,
    Multiplication,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PredictConfig {
    pub response_fn: ResponseFn,
    pub mode: Eq6Mode,
}

/// One remembered behaviour/response pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryEvent {
    pub behaviour: String,
    /// Entity complexity of the behaviour when it was selected.
    pub ec: f64,
    /// Response in `[-1, 1]`.
    pub response: f64,
    /// Age: 1 is the most recent step, larger is older.
    pub t: u32,
    /// Times the event occurred.
    pub n: u32,
}

impl MemoryEvent {
    pub fn new(
        behaviour: impl Into<String>,
        ec: f64,
        response: f64,
        t: u32,
        n: u32,
    ) -> Result<Self> {
        let event = Self {
            behaviour: behaviour.into(),
            ec,
            response,
            t,
            n,
        };
        event.validate()?;
        Ok(event)
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(BehaviourError::ZeroTime(self.behaviour.clone()));
        }
        if self.n == 0 {
            return Err(BehaviourError::ZeroOccurrences(self.behaviour.clone()));
        }
        check_response(self.response)
    }
}

pub(crate) fn check_response(r: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(BehaviourError::ResponseOutOfRange(r));
    }
    Ok(())
}

/// `f(n, EC, R, t)` for one event.
pub fn event_term(event: &MemoryEvent, f: ResponseFn) -> Result<f64> {
    if event.t == 0 {
        return Err(BehaviourError::ZeroTime(event.behaviour.clone()));
    }
    let n = f64::from(event.n);
    let t = f64::from(event.t);
    Ok(match f {
        ResponseFn::Additive => n * (event.ec + event.response) / t,
        ResponseFn::Multiplicative => n * event.ec * event.response / t,
    })
}

fn combine(current: f64, ec: f64, memory: &[MemoryEvent], cfg: PredictConfig) -> Result<f64> {
    let mut sum = 0.0;
    for event in memory {
        sum += event_term(event, cfg.response_fn)?;
    }
    Ok(match cfg.mode {
        Eq6Mode::Strict => {
            let memory_term = if memory.is_empty() {
                ec
            } else {
                sum / memory.len() as f64
            };
            (current + memory_term) / 2.0
        }
        Eq6Mode::WorkedExample => current + sum,
    })
}

/// Prediction for selecting `current` given the situation's memory.
pub fn predict(current: &BehaviourSpec, memory: &[MemoryEvent], cfg: PredictConfig) -> Result<f64> {
    let ec = current.entity_complexity();
    combine(ec, ec, memory, cfg)
}

/// Prediction once the environment has answered: the current term becomes
/// the selected behaviour's complexity plus the response, the memory is the
/// history the selection was made from.
pub fn predict_after_response(
    current: &BehaviourSpec,
    response: f64,
    memory: &[MemoryEvent],
    cfg: PredictConfig,
) -> Result<f64> {
    check_response(response)?;
    let ec = current.entity_complexity();
    combine(ec + response, ec, memory, cfg)
}

/// Evolving state of one simulated agent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AgentState {
    pub known_behaviours: Vec<BehaviourSpec>,
    /// Memory per situation.
    pub memory: BTreeMap<String, Vec<MemoryEvent>>,
    /// `(situation, behaviour)` pairs barred from reselection.
    pub flagged: BTreeSet<(String, String)>,
    pub clock: u32,
}

impl AgentState {
    pub fn new(known_behaviours: Vec<BehaviourSpec>) -> Self {
        Self {
            known_behaviours,
            clock: 1,
            ..Self::default()
        }
    }

    pub fn situation_memory(&self, situation: &str) -> &[MemoryEvent] {
        self.memory.get(situation).map_or(&[], Vec::as_slice)
    }

    pub fn is_flagged(&self, situation: &str, behaviour: &str) -> bool {
        self.flagged
            .contains(&(situation.to_string(), behaviour.to_string()))
    }

    /// Records an event at age 1. An existing event with the same behaviour
    /// and response sign absorbs it: `n` grows, age resets, the response and
    /// complexity take the new values.
    pub fn remember(&mut self, situation: &str, behaviour: &str, ec: f64, response: f64) {
        let events = self.memory.entry(situation.to_string()).or_default();
        let negative = response < 0.0;
        match events
            .iter_mut()
            .find(|e| e.behaviour == behaviour && (e.response < 0.0) == negative)
        {
            Some(e) => {
                e.n += 1;
                e.t = 1;
                e.response = response;
                e.ec = ec;
            }
            None => events.push(MemoryEvent {
                behaviour: behaviour.to_string(),
                ec,
                response,
                t: 1,
                n: 1,
            }),
        }
    }

    /// Advances the clock; every remembered event grows one step older.
    pub fn tick(&mut self) {
        self.clock += 1;
        for event in self.memory.values_mut().flatten() {
            event.t += 1;
        }
    }

    fn responses(&self) -> impl Iterator<Item = f64> + '_ {
        self.memory.values().flatten().map(|e| e.response)
    }
}

/// Dynamic problem complexity: known behaviour complexities plus received
/// responses, over the size of the problem behaviour set, floored at `floor`.
pub fn problem_complexity_dynamic(state: &AgentState, pbs_size: usize, floor: f64) -> f64 {
    let known: f64 = state
        .known_behaviours
        .iter()
        .map(BehaviourSpec::entity_complexity)
        .sum();
    let responses: f64 = state.responses().sum();
    let pc = (known + responses) / pbs_size.max(1) as f64;
    pc.max(floor)
}

/// Dynamic problem success likelihood.
pub fn psl_dynamic(pr: f64, pc: f64, mode: PslMode, floor: f64) -> Result<f64> {
    if pc.is_nan() || pc < floor {
        return Err(BehaviourError::BelowFloor { pc, floor });
    }
    Ok(match mode {
        PslMode::Division => pr / pc,
        PslMode::Multiplication => pr * pc,
    })
}
