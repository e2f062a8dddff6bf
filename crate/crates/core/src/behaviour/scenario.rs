//! Scenario scripts.
//!
//! ```text
//! behaviour B4 0.8 0.8 0.8 0.8 0.8 0.8   # BA BF COR COP SI SO
//! agent B1 B2 B3 B4 B5
//! situation S1
//! memory S1 B4 0.4 2 1                   # situation behaviour R t n
//! respond S1 B4 -0.6                     # situation behaviour R
//! default_response = 0.0
//! f = additive
//! psl = division
//! eq6 = worked_example
//! pc_floor = 0.05
//! max_steps = 10
//! ```

use std::collections::BTreeMap;

use super::predict::check_response;
use super::{
    BehaviourError, BehaviourSpec, Eq6Mode, MemoryEvent, PredictConfig, PslMode, ResponseFn,
    Result, DEFAULT_PC_FLOOR,
};

pub const DEFAULT_MAX_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioScript {
    /// Every behaviour in the modelled world (the problem behaviour set).
    pub world: Vec<BehaviourSpec>,
    /// Ids of the behaviours the agent knows, in declaration order.
    pub agent: Vec<String>,
    /// Situations to resolve, in order.
    pub situations: Vec<String>,
    /// Initial memory as `(situation, event)`.
    pub memory: Vec<(String, MemoryEvent)>,
    /// `(situation, behaviour) -> response`.
    pub policy: BTreeMap<(String, String), f64>,
    pub default_response: Option<f64>,
    pub predict: PredictConfig,
    pub psl: PslMode,
    pub pc_floor: f64,
    pub max_steps: usize,
}

impl ScenarioScript {
    pub fn behaviour(&self, id: &str) -> Option<&BehaviourSpec> {
        self.world.iter().find(|b| b.id == id)
    }

    pub fn response(&self, situation: &str, behaviour: &str) -> Result<f64> {
        self.policy
            .get(&(situation.to_string(), behaviour.to_string()))
            .copied()
            .or(self.default_response)
            .ok_or_else(|| BehaviourError::NoResponse {
                situation: situation.to_string(),
                behaviour: behaviour.to_string(),
            })
    }
}

fn num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| BehaviourError::Parse {
        line,
        message: format!("{what}: cannot parse {s:?}"),
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioScript> {
    let mut script = ScenarioScript {
        world: Vec::new(),
        agent: Vec::new(),
        situations: Vec::new(),
        memory: Vec::new(),
        policy: BTreeMap::new(),
        default_response: None,
        predict: PredictConfig::default(),
        psl: PslMode::default(),
        pc_floor: DEFAULT_PC_FLOOR,
        max_steps: DEFAULT_MAX_STEPS,
    };
    // raw memory lines resolved once every behaviour is known
    let mut pending_memory = Vec::new();
    let mut mentioned = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| BehaviourError::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim();
            match key.trim() {
                "f" => {
                    script.predict.response_fn = match value {
                        "additive" => ResponseFn::Additive,
                        "multiplicative" => ResponseFn::Multiplicative,
                        v => {
                            return Err(err(format!(
                                "f must be additive|multiplicative, got {v:?}"
                            )))
                        }
                    }
                }
                "psl" => {
                    script.psl = match value {
                        "division" => PslMode::Division,
                        "multiplication" => PslMode::Multiplication,
                        v => {
                            return Err(err(format!(
                                "psl must be division|multiplication, got {v:?}"
                            )))
                        }
                    }
                }
                "eq6" => {
                    script.predict.mode = match value {
                        "strict" => Eq6Mode::Strict,
                        "worked_example" => Eq6Mode::WorkedExample,
                        v => {
                            return Err(err(format!(
                                "eq6 must be strict|worked_example, got {v:?}"
                            )))
                        }
                    }
                }
                "max_steps" => {
                    script.max_steps = num(value, line_no, "max_steps")?;
                    if script.max_steps == 0 {
                        return Err(err("max_steps must be positive".into()));
                    }
                }
                "pc_floor" => {
                    script.pc_floor = num(value, line_no, "pc_floor")?;
                    if script.pc_floor.is_nan() || script.pc_floor <= 0.0 {
                        return Err(err("pc_floor must be positive".into()));
                    }
                }
                "default_response" => {
                    let r: f64 = num(value, line_no, "default_response")?;
                    check_response(r).map_err(|e| err(e.to_string()))?;
                    script.default_response = Some(r);
                }
                other => return Err(err(format!("unknown setting {other:?}"))),
            }
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "behaviour" => {
                if words.len() != 8 {
                    return Err(err("expected `behaviour <id> BA BF COR COP SI SO`".into()));
                }
                let mut attrs = [0.0; 6];
                for (slot, w) in attrs.iter_mut().zip(&words[2..]) {
                    *slot = num(w, line_no, "attribute")?;
                }
                if script.behaviour(words[1]).is_some() {
                    return Err(err(format!("behaviour {:?} declared twice", words[1])));
                }
                let spec = BehaviourSpec::new(words[1], attrs).map_err(|e| err(e.to_string()))?;
                script.world.push(spec);
            }
            "agent" => {
                if words.len() < 2 {
                    return Err(err("expected `agent <id>...`".into()));
                }
                script
                    .agent
                    .extend(words[1..].iter().map(|s| s.to_string()));
            }
            "situation" => {
                if words.len() != 2 {
                    return Err(err("expected `situation <name>`".into()));
                }
                script.situations.push(words[1].to_string());
            }
            "memory" => {
                if words.len() != 6 {
                    return Err(err(
                        "expected `memory <situation> <behaviour> <R> <t> <n>`".into()
                    ));
                }
                let r: f64 = num(words[3], line_no, "response")?;
                let t: u32 = num(words[4], line_no, "time")?;
                let n: u32 = num(words[5], line_no, "occurrences")?;
                mentioned.push(words[1].to_string());
                pending_memory.push((line_no, words[1].to_string(), words[2].to_string(), r, t, n));
            }
            "respond" => {
                if words.len() != 4 {
                    return Err(err(
                        "expected `respond <situation> <behaviour> <value>`".into()
                    ));
                }
                let r: f64 = num(words[3], line_no, "response")?;
                check_response(r).map_err(|e| err(e.to_string()))?;
                mentioned.push(words[1].to_string());
                script
                    .policy
                    .insert((words[1].to_string(), words[2].to_string()), r);
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }

    for (line, situation, behaviour, r, t, n) in pending_memory {
        let ec = script
            .behaviour(&behaviour)
            .ok_or_else(|| BehaviourError::Parse {
                line,
                message: format!("unknown behaviour {behaviour:?}"),
            })?
            .entity_complexity();
        let event =
            MemoryEvent::new(behaviour, ec, r, t, n).map_err(|e| BehaviourError::Parse {
                line,
                message: e.to_string(),
            })?;
        script.memory.push((situation, event));
    }
    for id in &script.agent {
        if script.behaviour(id).is_none() {
            return Err(BehaviourError::UnknownBehaviour(id.clone()));
        }
    }
    if script.situations.is_empty() {
        for s in mentioned {
            if !script.situations.contains(&s) {
                script.situations.push(s);
            }
        }
    }
    if script.situations.is_empty() {
        return Err(BehaviourError::Parse {
            line: 0,
            message: "scenario names no situation".into(),
        });
    }
    Ok(script)
}
