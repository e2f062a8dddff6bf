//! Feedback loop: select, predict, receive a response, re-evaluate, flag bad
//! behaviours, repeat until the prediction stops falling.

use std::fmt::{self, Write as _};

use super::{
    predict, predict_after_response, problem_complexity_dynamic, psl_dynamic, AgentState,
    BehaviourError, BehaviourSpec, Result, ScenarioScript,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The prediction did not fall across the last step.
    Stable,
    /// Every known behaviour got flagged.
    Exhausted,
    /// `max_steps` ran out first.
    Unstable,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Stable => "STABLE",
            Termination::Exhausted => "EXHAUSTED",
            Termination::Unstable => "UNSTABLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based within the situation.
    pub step: usize,
    pub situation: String,
    pub selected: String,
    /// Prediction that won the selection.
    pub pr_selected: f64,
    /// Selection prediction plus the selected behaviour's complexity.
    pub expected: f64,
    pub response: f64,
    pub pr_after: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SituationOutcome {
    pub situation: String,
    pub termination: Termination,
    pub selections: usize,
    pub final_pr: f64,
    pub pc_dynamic: f64,
    pub psl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub steps: Vec<StepRecord>,
    pub outcomes: Vec<SituationOutcome>,
    pub final_state: AgentState,
}

impl SimulationTrace {
    pub fn to_text(&self) -> String {
        let mut out = String::from("step situation selected expected response pr_after flagged\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {} {:.6} {:.6} {:.6} {}",
                s.step,
                s.situation,
                s.selected,
                s.expected,
                s.response,
                s.pr_after,
                if s.flagged { "yes" } else { "no" }
            );
        }
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{} {} after {} selections pr={:.6} pc={:.6} psl={:.6}",
                o.situation, o.termination, o.selections, o.final_pr, o.pc_dynamic, o.psl
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,situation,selected,expected,response,pr_after,flagged\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{}",
                s.step, s.situation, s.selected, s.expected, s.response, s.pr_after, s.flagged
            );
        }
        out
    }
}

fn select<'a>(
    state: &'a AgentState,
    situation: &str,
    script: &ScenarioScript,
) -> Result<Option<(&'a BehaviourSpec, f64)>> {
    let memory = state.situation_memory(situation);
    let mut best: Option<(&BehaviourSpec, f64)> = None;
    let mut candidates: Vec<&BehaviourSpec> = state
        .known_behaviours
        .iter()
        .filter(|b| !state.is_flagged(situation, &b.id))
        .collect();
    candidates.sort_by(|a, b| a.id.cmp(&b.id));
    for b in candidates {
        let pr = predict(b, memory, script.predict)?;
        if best.is_none_or(|(_, top)| pr > top) {
            best = Some((b, pr));
        }
    }
    Ok(best)
}

/// Runs every situation of the script in order on one agent.
pub fn simulate(script: &ScenarioScript) -> Result<SimulationTrace> {
    let known = script
        .agent
        .iter()
        .map(|id| {
            script
                .behaviour(id)
                .cloned()
                .ok_or_else(|| BehaviourError::UnknownBehaviour(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut state = AgentState::new(known);
    for (situation, event) in &script.memory {
        state
            .memory
            .entry(situation.clone())
            .or_default()
            .push(event.clone());
    }

    let mut steps = Vec::new();
    let mut outcomes = Vec::new();
    for situation in &script.situations {
        let mut reference: Option<f64> = None;
        let mut termination = Termination::Unstable;
        let mut selections = 0;
        for step in 1..=script.max_steps {
            let Some((chosen, pr_selected)) = select(&state, situation, script)? else {
                if step == 1 {
                    return Err(BehaviourError::NoBehaviours(situation.clone()));
                }
                termination = Termination::Exhausted;
                break;
            };
            let chosen = chosen.clone();
            let ec = chosen.entity_complexity();
            let expected = pr_selected + ec;
            let response = script.response(situation, &chosen.id)?;
            let pr_after = predict_after_response(
                &chosen,
                response,
                state.situation_memory(situation),
                script.predict,
            )?;
            state.remember(situation, &chosen.id, ec, response);
            let flagged = pr_after < expected;
            if flagged {
                state.flagged.insert((situation.clone(), chosen.id.clone()));
            }
            let stable = pr_after >= reference.unwrap_or(pr_selected);
            reference = Some(pr_after);
            state.tick();
            selections += 1;
            steps.push(StepRecord {
                step,
                situation: situation.clone(),
                selected: chosen.id.clone(),
                pr_selected,
                expected,
                response,
                pr_after,
                flagged,
            });
            if stable {
                termination = Termination::Stable;
                break;
            }
        }
        let final_pr = reference.unwrap_or(0.0);
        let pc_dynamic = problem_complexity_dynamic(&state, script.world.len(), script.pc_floor);
        let psl = psl_dynamic(final_pr, pc_dynamic, script.psl, script.pc_floor)?;
        outcomes.push(SituationOutcome {
            situation: situation.clone(),
            termination,
            selections,
            final_pr,
            pc_dynamic,
            psl,
        });
    }
    Ok(SimulationTrace {
        steps,
        outcomes,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviour::parse_scenario;

    #[test]
    fn single_behaviour_positive_response_is_stable() {
        let script = parse_scenario(
            "behaviour A 0.4 0.4 0.4 0.4 0.4 0.4\nagent A\nsituation S\nrespond S A 1\n",
        )
        .unwrap();
        let trace = simulate(&script).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert!(!trace.steps[0].flagged);
        assert_eq!(trace.outcomes[0].termination, Termination::Stable);
    }

    #[test]
    fn no_behaviours_rejected() {
        let script = parse_scenario("behaviour A 0 0 0 0 0 0\nsituation S\n").unwrap();
        assert_eq!(
            simulate(&script),
            Err(BehaviourError::NoBehaviours("S".into()))
        );
    }

    #[test]
    fn all_flagged_exhausts() {
        let script = parse_scenario(
            "behaviour A 0.6 0.6 0.6 0.6 0.6 0.6\nbehaviour B 0.4 0.4 0.4 0.4 0.4 0.4\n\
             agent A B\nsituation S\ndefault_response = -1\n",
        )
        .unwrap();
        let trace = simulate(&script).unwrap();
        assert_eq!(trace.outcomes[0].termination, Termination::Exhausted);
        let order: Vec<_> = trace.steps.iter().map(|s| s.selected.as_str()).collect();
        assert_eq!(order, ["A", "B"]);
    }

    #[test]
    fn step_limit_marks_unstable() {
        let script = parse_scenario(
            "behaviour A 0.6 0.6 0.6 0.6 0.6 0.6\nbehaviour B 0.4 0.4 0.4 0.4 0.4 0.4\n\
             agent A B\nsituation S\ndefault_response = -1\nmax_steps = 1\n",
        )
        .unwrap();
        let trace = simulate(&script).unwrap();
        assert_eq!(trace.outcomes[0].termination, Termination::Unstable);
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn missing_response_is_an_error() {
        let script =
            parse_scenario("behaviour A 0.6 0.6 0.6 0.6 0.6 0.6\nagent A\nsituation S\n").unwrap();
        assert!(matches!(
            simulate(&script),
            Err(BehaviourError::NoResponse { .. })
        ));
    }
}
