mod oracle;

use cobind_core::behaviour::{
    parse_scenario, predict, predict_after_response, problem_complexity_dynamic, psl_dynamic,
    simulate, AgentState, BehaviourSpec, Eq6Mode, MemoryEvent, PredictConfig, ProblemSpec, PslMode,
    ResponseFn, Termination, DEFAULT_PC_FLOOR,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;
const WORKED: &str = include_str!("fixtures/worked_example.scn");

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn spec(attrs: [f64; 6]) -> BehaviourSpec {
    BehaviourSpec::new("b", attrs).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, id: &str) -> BehaviourSpec {
    let attrs: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.0..=1.0));
    BehaviourSpec::new(id, attrs).unwrap()
}

fn random_event(rng: &mut ChaCha8Rng) -> MemoryEvent {
    MemoryEvent::new(
        "m",
        rng.gen_range(0.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(1..=8),
        rng.gen_range(1..=4),
    )
    .unwrap()
}

#[test]
fn static_metric_examples() {
    // BA BF COR COP SI SO
    assert!(close(spec([1.0; 6]).intelligence(), 1.0));
    assert!(close(spec([0.0; 6]).intelligence(), 0.0));
    assert!(close(
        spec([0.6, 0.8, 0.0, 0.0, 0.0, 0.0]).intelligence(),
        0.7
    ));

    assert!(close(spec([1.0; 6]).communication(), 1.0));
    assert!(close(
        spec([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).communication(),
        0.5
    ));
    assert!(close(
        spec([0.0, 0.0, 0.0, 0.0, 0.4, 0.6]).communication(),
        0.5
    ));

    assert!(close(spec([1.0; 6]).collective_static(), 1.0));
    assert!(close(spec([0.0; 6]).collective_static(), 0.0));
    let mixed = spec([0.6, 0.8, 0.9, 0.6, 0.4, 0.6]);
    assert!(close(mixed.collective_static(), 2.0 / 3.0));

    assert!(close(spec([1.0; 6]).entity_complexity(), 1.0));
    assert!(close(spec([0.0; 6]).entity_complexity(), 0.0));
    assert!(close(mixed.entity_complexity(), 41.0 / 60.0));

    assert!(close(spec([1.0; 6]).collective_dynamic(), 1.0));
    assert!(close(spec([0.0; 6]).collective_dynamic(), 0.0));
    assert!(close(
        spec([0.0, 0.0, 0.0, 0.6, 0.4, 0.6]).collective_dynamic(),
        0.55
    ));
}

#[test]
fn psl_examples() {
    let perfect = ProblemSpec::new(vec![spec([1.0; 6]), spec([1.0; 6])], 1.0).unwrap();
    assert!(close(perfect.psl_static(), 1.0));
    let single = ProblemSpec::new(vec![BehaviourSpec::uniform("a", 0.5).unwrap()], 1.0).unwrap();
    assert!(close(single.psl_static(), 0.5));
    let pair = ProblemSpec::new(
        vec![
            BehaviourSpec::uniform("a", 0.6).unwrap(),
            BehaviourSpec::uniform("b", 0.8).unwrap(),
        ],
        0.7,
    )
    .unwrap();
    assert!(close(pair.psl_static(), 1.0));
    assert!(ProblemSpec::new(vec![spec([1.0; 6])], 0.0).is_err());
    assert!(ProblemSpec::new(vec![], 1.0).is_err());

    let floor = DEFAULT_PC_FLOOR;
    assert!(close(
        psl_dynamic(0.5, 1.0, PslMode::Division, floor).unwrap(),
        0.5
    ));
    assert!(close(
        psl_dynamic(0.5, 0.5, PslMode::Division, floor).unwrap(),
        1.0
    ));
    assert!(close(
        psl_dynamic(0.5, 0.5, PslMode::Multiplication, floor).unwrap(),
        0.25
    ));
    assert!(close(
        psl_dynamic(0.0, 0.3, PslMode::Division, floor).unwrap(),
        0.0
    ));
    assert!(psl_dynamic(0.5, 0.01, PslMode::Division, floor).is_err());
}

#[test]
fn dynamic_complexity_examples() {
    let floor = DEFAULT_PC_FLOOR;
    assert!(close(
        problem_complexity_dynamic(&AgentState::new(vec![]), 4, floor),
        0.05
    ));
    let one = AgentState::new(vec![BehaviourSpec::uniform("a", 0.5).unwrap()]);
    assert!(close(problem_complexity_dynamic(&one, 10, floor), 0.05));

    let mut three = AgentState::new(
        ["a", "b", "c"]
            .iter()
            .map(|id| BehaviourSpec::uniform(*id, 0.5).unwrap())
            .collect(),
    );
    three.remember("s", "a", 0.5, 0.3);
    three.remember("s", "b", 0.5, -0.1);
    assert!(close(problem_complexity_dynamic(&three, 5, floor), 0.34));
}

#[test]
fn prediction_examples() {
    let cfg = PredictConfig::default();
    let b = BehaviourSpec::uniform("b", 0.7).unwrap();
    assert!(close(predict(&b, &[], cfg).unwrap(), 0.7));
    let event = MemoryEvent::new("b", 0.7, 0.0, 1, 1).unwrap();
    assert!(close(predict(&b, &[event], cfg).unwrap(), 0.7));
    assert!(MemoryEvent::new("b", 0.7, 0.0, 0, 1).is_err());
}

#[test]
fn attributes_stay_in_unit_range() {
    let mut rng = oracle::rng(10);
    for _ in 0..1000 {
        let b = random_spec(&mut rng, "r");
        for v in [
            b.intelligence(),
            b.communication(),
            b.collective_static(),
            b.collective_dynamic(),
            b.entity_complexity(),
        ] {
            assert!((0.0..=1.0).contains(&v), "{v} from {b:?}");
        }
    }
}

#[test]
fn prediction_monotone_in_response() {
    let mut rng = oracle::rng(11);
    for i in 0..1000 {
        let cfg = PredictConfig {
            response_fn: if i % 2 == 0 {
                ResponseFn::Additive
            } else {
                ResponseFn::Multiplicative
            },
            mode: if i % 4 < 2 {
                Eq6Mode::Strict
            } else {
                Eq6Mode::WorkedExample
            },
        };
        let b = random_spec(&mut rng, "b");
        let mut memory: Vec<MemoryEvent> = (0..rng.gen_range(1..5))
            .map(|_| random_event(&mut rng))
            .collect();
        let base = predict(&b, &memory, cfg).unwrap();
        let slot = rng.gen_range(0..memory.len());
        let old = memory[slot].response;
        memory[slot].response = rng.gen_range(old..=1.0);
        assert!(predict(&b, &memory, cfg).unwrap() >= base - TOL);
    }
}

#[test]
fn event_terms_decay_with_age() {
    let mut rng = oracle::rng(12);
    for i in 0..1000 {
        let f = if i % 2 == 0 {
            ResponseFn::Additive
        } else {
            ResponseFn::Multiplicative
        };
        let mut event = random_event(&mut rng);
        let before = cobind_core::behaviour::event_term(&event, f).unwrap().abs();
        event.t += rng.gen_range(1..5);
        let after = cobind_core::behaviour::event_term(&event, f).unwrap().abs();
        assert!(after <= before + TOL);
    }
}

#[test]
fn memoryless_prediction_is_entity_complexity() {
    let mut rng = oracle::rng(13);
    for _ in 0..1000 {
        let b = random_spec(&mut rng, "b");
        for mode in [Eq6Mode::Strict, Eq6Mode::WorkedExample] {
            for response_fn in [ResponseFn::Additive, ResponseFn::Multiplicative] {
                let pr = predict(&b, &[], PredictConfig { response_fn, mode }).unwrap();
                assert!(close(pr, b.entity_complexity()));
            }
        }
    }
}

#[test]
fn worked_example_trace() {
    let script = parse_scenario(WORKED).unwrap();
    let trace = simulate(&script).unwrap();
    let s = &trace.steps;
    assert_eq!(s.len(), 2);
    assert_eq!(trace.outcomes[0].termination, Termination::Stable);
    assert_eq!(trace.outcomes[0].selections, 2);
    assert_eq!(
        (s[0].selected.as_str(), s[1].selected.as_str()),
        ("B4", "B2")
    );

    // Hand evaluation of the un-normalised sums with the fixture numbers.
    let mem_1 = 1.0 * (0.8 + 0.4) / 2.0 + 1.0 * (0.5 - 0.2) / 3.0;
    let pr_1 = 0.8 + mem_1;
    let after_1 = 0.8 - 0.1 + mem_1;
    let mem_2 = (0.8 + 0.4) / 3.0 + (0.5 - 0.2) / 4.0 + (0.8 - 0.1) / 2.0;
    let pr_2 = 0.7 + mem_2;
    let after_2 = 0.7 - 0.1 + mem_2;
    assert!(close(s[0].pr_selected, pr_1));
    assert!(close(s[0].expected, pr_1 + 0.8));
    assert!(close(s[0].pr_after, after_1));
    assert!(close(s[1].pr_selected, pr_2));
    assert!(close(s[1].expected, pr_2 + 0.7));
    assert!(close(s[1].pr_after, after_2));

    assert!(s[0].pr_after < s[0].expected, "prediction reduces");
    assert!(s[0].flagged);
    assert!(s[1].pr_after > s[0].pr_after, "prediction increases");
    assert!(s.iter().skip(1).all(|r| r.selected != "B4"));

    let mem_strict: Vec<_> = script.memory.iter().map(|(_, e)| e.clone()).collect();
    let b4 = script.behaviour("B4").unwrap();
    let strict = PredictConfig::default();
    let expected_strict = (0.8 + (0.6 + 0.1) / 2.0) / 2.0;
    assert!(close(
        predict(b4, &mem_strict, strict).unwrap(),
        expected_strict
    ));
    assert!(close(
        predict_after_response(b4, -0.1, &mem_strict, strict).unwrap(),
        (0.7 + 0.35) / 2.0
    ));
}

#[test]
fn worked_example_text_is_stable() {
    let script = parse_scenario(WORKED).unwrap();
    let a = simulate(&script).unwrap();
    let b = simulate(&script).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert!(a
        .to_text()
        .lines()
        .last()
        .unwrap()
        .starts_with("S1 STABLE after 2 selections"));
}

fn random_scenario(rng: &mut ChaCha8Rng) -> String {
    let mut text = String::new();
    let n = rng.gen_range(2..7);
    let ids: Vec<String> = (0..n).map(|i| format!("B{i}")).collect();
    for id in &ids {
        let attrs: Vec<String> = (0..6)
            .map(|_| format!("{:.3}", rng.gen_range(0.0..=1.0)))
            .collect();
        text.push_str(&format!("behaviour {id} {}\n", attrs.join(" ")));
    }
    let known = rng.gen_range(1..=n);
    text.push_str(&format!("agent {}\n", ids[..known].join(" ")));
    let situations: Vec<String> = (0..rng.gen_range(1..4)).map(|i| format!("S{i}")).collect();
    for s in &situations {
        text.push_str(&format!("situation {s}\n"));
        for id in &ids[..known] {
            if rng.gen_bool(0.3) {
                let t = rng.gen_range(1..5);
                text.push_str(&format!(
                    "memory {s} {id} {:.3} {t} 1\n",
                    rng.gen_range(-1.0..=1.0)
                ));
            }
            text.push_str(&format!(
                "respond {s} {id} {:.3}\n",
                rng.gen_range(-1.0..=1.0)
            ));
        }
    }
    for (key, options) in [
        ("f", ["additive", "multiplicative"]),
        ("eq6", ["strict", "worked_example"]),
        ("psl", ["division", "multiplication"]),
    ] {
        text.push_str(&format!("{key} = {}\n", options[rng.gen_range(0..2)]));
    }
    text.push_str("max_steps = 100\n");
    text
}

#[test]
fn flagged_pairs_are_never_reselected() {
    let mut rng = oracle::rng(14);
    for _ in 0..300 {
        let text = random_scenario(&mut rng);
        let script = parse_scenario(&text).unwrap();
        let trace = simulate(&script).unwrap();
        let mut flagged = std::collections::BTreeSet::new();
        for step in &trace.steps {
            let key = (step.situation.clone(), step.selected.clone());
            assert!(!flagged.contains(&key), "reselected {key:?}\n{text}");
            if step.flagged {
                flagged.insert(key);
            }
        }
        for outcome in &trace.outcomes {
            assert!(outcome.selections >= 1 && outcome.selections <= script.max_steps);
        }
    }
}
