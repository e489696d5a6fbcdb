//! Programmatic generators for the benchmark family: the six illustrative
//! environments, the thermostat, the arbiter, the asynchronous/synchronous
//! shared-variable simulations, and the hardness-reduction instances.
//!
//! Every generator emits the textual model grammar and parses it back, so
//! written files and in-memory models stay interchangeable.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::automata::FiniteNfa;
use crate::parse::{parse_model, Model, ParseError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("example index {0} out of range 0..=5")]
    ExampleRange(usize),
    #[error("thermostat level {0} out of range 1..=3")]
    ThermostatRange(usize),
    #[error("arbiter needs at least 2 processes, got {0}")]
    ArbiterRange(usize),
    #[error("reduction automaton must be complete over its alphabet")]
    IncompleteNfa,
    #[error("reduction automaton must have exactly one initial state")]
    MultipleInitial,
    #[error("generated source failed to parse: {0}")]
    Parse(#[from] ParseError),
}

/// Environments of the six illustrative coordination problems. The
/// specification is deadlock freedom plus finitely many `b` actions.
pub fn example_text(k: usize) -> Result<String, BenchError> {
    let body = match k {
        0 => "process E  = a0 -> E0 | a1 -> STOP;\nprocess E0 = a0 -> E0;\n",
        1 => {
            "process E  = a0 -> E0 | a1 -> E1;\nprocess E0 = a0 -> E0;\nprocess E1 = b -> E1;\n"
        }
        2 => {
            "process E  = a0 -> E0 | a0 -> E1;\nprocess E0 = a0 -> E0;\nprocess E1 = b -> E1;\n"
        }
        3 => {
            "process E  = a0 -> E0 | a0 -> E1;\nprocess E0 = a0 -> E0;\nprocess E1 = b -> E1 | a0 -> E0;\n"
        }
        4 => {
            "process E  = a0 -> E0 | a0 -> E1;\nprocess E0 = a0 -> E0;\nprocess E1 = a1 -> E1;\n"
        }
        5 => "process E  = a0 -> E0;\nprocess E0 = b -> E;\n",
        other => return Err(BenchError::ExampleRange(other)),
    };
    let publics = match k {
        0 | 1 | 4 => "a0, a1",
        _ => "a0",
    };
    Ok(format!(
        "# Illustrative example {k}\n\
         public {publics};\n\
         private b;\n\
         {body}\
         system E;\n\
         safety_complement universal;\n\
         liveness \"F G !b\";\n"
    ))
}

pub fn example(k: usize) -> Result<Model, BenchError> {
    Ok(parse_model(&example_text(k)?)?)
}

/// Smart-thermostat environment: a three-state temperature sensor with
/// private fluctuations, a heater, and an air conditioner, synchronized on
/// the device-to-sensor interactions. Levels add liveness conjuncts:
/// 1 = ambient temperature, 2 = + device interaction, 3 = + no simultaneous
/// heating and cooling.
pub fn thermostat_text(level: usize) -> Result<String, BenchError> {
    let ambient = "G F JustRight";
    let interact = "G F switchACOn & G F switchHeatOn";
    let efficient = "!(F (switchACOn & (!switchACOff U switchHeatOn))) & \
                     !(F (switchHeatOn & (!switchHeatOff U switchACOn)))";
    let liveness = match level {
        1 => ambient.to_string(),
        2 => format!("{ambient} & {interact}"),
        3 => format!("{ambient} & {interact} & {efficient}"),
        other => return Err(BenchError::ThermostatRange(other)),
    };
    Ok(format!(
        "# Smart thermostat, level {level}\n\
         public JustRight, Cold, Warm, switchHeatOn, switchHeatOff, switchACOn, switchACOff, HeatisOn, ACisOn;\n\
         private fluct;\n\
         process Heater   = switchHeatOn -> HeaterOn;\n\
         process HeaterOn = HeatisOn -> HeaterOn | switchHeatOff -> Heater;\n\
         process AC   = switchACOn -> ACOn;\n\
         process ACOn = ACisOn -> ACOn | switchACOff -> AC;\n\
         process SensorJR = JustRight -> SensorJR | HeatisOn -> SensorTW | fluct -> SensorTW | ACisOn -> SensorTC | fluct -> SensorTC;\n\
         process SensorTC = HeatisOn -> SensorJR | fluct -> SensorJR | ACisOn -> SensorTC | Cold -> SensorTC;\n\
         process SensorTW = ACisOn -> SensorJR | fluct -> SensorJR | HeatisOn -> SensorTW | Warm -> SensorTW;\n\
         system Heater ||{{HeatisOn}} SensorJR ||{{ACisOn}} AC;\n\
         safety_complement universal;\n\
         liveness \"{liveness}\";\n"
    ))
}

pub fn thermostat(level: usize) -> Result<Model, BenchError> {
    Ok(parse_model(&thermostat_text(level)?)?)
}

/// Resource arbiter for `n` request/grant/release client processes with no
/// internal interactions. The liveness specification is mutual exclusion,
/// starvation freedom, and the recurrent-request condition that rules out
/// vacuously fair arbiters.
pub fn arbiter_text(n: usize) -> Result<String, BenchError> {
    if n < 2 {
        return Err(BenchError::ArbiterRange(n));
    }
    let mut publics = Vec::new();
    let mut procs = String::new();
    let mut heads = Vec::new();
    for i in 0..n {
        publics.push(format!("request.{i}, grant.{i}, release.{i}"));
        procs.push_str(&format!(
            "process P{i}  = request.{i} -> P{i}g;\n\
             process P{i}g = grant.{i} -> P{i}r;\n\
             process P{i}r = release.{i} -> P{i};\n"
        ));
        heads.push(format!("P{i}"));
    }
    let mutex: Vec<String> = (0..n)
        .map(|i| {
            let others: Vec<String> =
                (0..n).filter(|&j| j != i).map(|j| format!("grant.{j}")).collect();
            format!(
                "!(F (grant.{i} & (!release.{i} U ({}))))",
                others.join(" | ")
            )
        })
        .collect();
    let starve: Vec<String> =
        (0..n).map(|i| format!("G (request.{i} -> F grant.{i})")).collect();
    let fairness: Vec<String> = (0..n).map(|i| format!("G F request.{i}")).collect();
    let liveness = format!(
        "{} & {} & {}",
        mutex.join(" & "),
        starve.join(" & "),
        fairness.join(" & ")
    );
    Ok(format!(
        "# Arbiter for {n} processes\n\
         public {};\n\
         {procs}\
         system {};\n\
         safety_complement universal;\n\
         liveness \"{liveness}\";\n",
        publics.join(", "),
        heads.join(" || ")
    ))
}

pub fn arbiter(n: usize) -> Result<Model, BenchError> {
    Ok(parse_model(&arbiter_text(n)?)?)
}

fn copy_spec(async_mode: bool) -> String {
    let read = "(r0 | r1)";
    let write = "(w0 | w1)";
    // alpha W beta rendered as beta R (alpha | beta)
    let start_write = format!("({write} R (!{read} | {write}))");
    let alternate = format!(
        "G ({write} -> X ({read} R (!{write} | {read}))) & \
         G ({read} -> X ({write} R (!{read} | {write})))"
    );
    let recur_reads = format!("G F {read}");
    let copy = if async_mode {
        "G ((r0 | h0) -> X (w0 R (!w1 | w0))) & G ((r1 | h1) -> X (w1 R (!w0 | w1)))".to_string()
    } else {
        "G (r0 -> X (w0 R (!w1 | w0))) & G (r1 -> X (w1 R (!w0 | w1)))".to_string()
    };
    format!("{start_write} & {alternate} & {recur_reads} & {copy}")
}

/// Asynchronous shared-variable simulation: the input cell flips its value
/// invisibly on hidden sampling actions, so the copy specification has no
/// coordinator.
pub fn pr_async_text() -> String {
    format!(
        "# Shared-variable copy, asynchronous sampling\n\
         public r0, r1, w0, w1;\n\
         private h0, h1, tau;\n\
         process Xhat = tau -> X0 | tau -> X1;\n\
         process X0 = r0 -> X0 | r0 -> X1 | h0 -> X0 | h0 -> X1;\n\
         process X1 = r1 -> X1 | r1 -> X0 | h1 -> X1 | h1 -> X0;\n\
         process Yhat = w0 -> Y0 | w1 -> Y1;\n\
         process Y0 = w0 -> Y0 | w1 -> Y1;\n\
         process Y1 = w1 -> Y1 | w0 -> Y0;\n\
         system Xhat || Yhat;\n\
         safety_complement universal;\n\
         liveness \"{}\";\n",
        copy_spec(true)
    )
}

/// Synchronous variant: every sample is a visible read, so echoing the last
/// read value solves the copy specification.
pub fn pr_sync_text() -> String {
    format!(
        "# Shared-variable copy, synchronous sampling\n\
         public r0, r1, w0, w1;\n\
         private tau;\n\
         process Xhat = tau -> X0 | tau -> X1;\n\
         process X0 = r0 -> X0 | r0 -> X1;\n\
         process X1 = r1 -> X1 | r1 -> X0;\n\
         process Yhat = w0 -> Y0 | w1 -> Y1;\n\
         process Y0 = w0 -> Y0 | w1 -> Y1;\n\
         process Y1 = w1 -> Y1 | w0 -> Y0;\n\
         system Xhat || Yhat;\n\
         safety_complement universal;\n\
         liveness \"{}\";\n",
        copy_spec(false)
    )
}

pub fn pr_async() -> Result<Model, BenchError> {
    Ok(parse_model(&pr_async_text())?)
}

pub fn pr_sync() -> Result<Model, BenchError> {
    Ok(parse_model(&pr_sync_text())?)
}

/// Letter names used by the reduction instances: `a`, `b`, ... for the input
/// automaton's alphabet plus the three fresh letters.
pub fn reduction_letter_name(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

/// Non-universality reduction: the environment is a copy of the (complete)
/// automaton with `accept`/`reject` states reached on `hash` from
/// accepting/non-accepting states, looping on `plus`/`minus`. The liveness
/// specification asks for a `hash` followed by `minus` forever, so a
/// coordinator exists exactly when some word is rejected.
pub fn pspace_instance_text(a: &FiniteNfa, num_letters: usize) -> Result<String, BenchError> {
    if !a.is_complete(&(0..num_letters).collect::<Vec<_>>()) {
        return Err(BenchError::IncompleteNfa);
    }
    if a.initial.len() != 1 {
        return Err(BenchError::MultipleInitial);
    }
    let init = *a.initial.iter().next().unwrap();
    let mut publics: Vec<String> = (0..num_letters).map(reduction_letter_name).collect();
    publics.extend(["hash".into(), "plus".into(), "minus".into()]);
    let sname = |s: usize| if s == init { "S".to_string() } else { format!("S{s}") };
    let mut procs = String::new();
    for s in 0..a.num_states {
        let mut branches = Vec::new();
        for l in 0..num_letters {
            for t in a.successors(s, l) {
                branches.push(format!("{} -> {}", reduction_letter_name(l), sname(t)));
            }
        }
        if a.accepting.contains(&s) {
            branches.push("hash -> Acc".into());
        } else {
            branches.push("hash -> Rej".into());
        }
        procs.push_str(&format!("process {} = {};\n", sname(s), branches.join(" | ")));
    }
    procs.push_str("process Acc = plus -> Acc;\n");
    procs.push_str("process Rej = minus -> Rej;\n");
    Ok(format!(
        "# Non-universality reduction instance\n\
         public {};\n\
         {procs}\
         system S;\n\
         safety_complement universal;\n\
         liveness \"F (hash & X G minus)\";\n",
        publics.join(", ")
    ))
}

pub fn pspace_instance(a: &FiniteNfa, num_letters: usize) -> Result<Model, BenchError> {
    Ok(parse_model(&pspace_instance_text(a, num_letters)?)?)
}

/// Random complete NFA with a single initial state, for the reduction
/// property tests.
pub fn random_complete_nfa(
    num_states: usize,
    num_letters: usize,
    rng: &mut impl Rng,
) -> FiniteNfa {
    let mut transitions = BTreeSet::new();
    for s in 0..num_states {
        for l in 0..num_letters {
            let mut any = false;
            for t in 0..num_states {
                if rng.gen_bool(0.4) {
                    transitions.insert((s, l, t));
                    any = true;
                }
            }
            if !any {
                transitions.insert((s, l, rng.gen_range(0..num_states)));
            }
        }
    }
    let mut accepting = BTreeSet::new();
    for s in 0..num_states {
        if rng.gen_bool(0.5) {
            accepting.insert(s);
        }
    }
    FiniteNfa {
        num_states,
        initial: [0].into_iter().collect(),
        transitions,
        accepting,
    }
}

/// Subset-construction universality check; returns a shortest rejected word
/// when the language is not universal.
pub fn shortest_rejected_word(a: &FiniteNfa, num_letters: usize) -> Option<Vec<usize>> {
    use std::collections::{BTreeMap, VecDeque};
    let start: BTreeSet<usize> = a.initial.clone();
    if start.is_disjoint(&a.accepting) {
        return Some(Vec::new());
    }
    let mut parent: BTreeMap<BTreeSet<usize>, (BTreeSet<usize>, usize)> = BTreeMap::new();
    let mut seen: BTreeSet<BTreeSet<usize>> = [start.clone()].into_iter().collect();
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for l in 0..num_letters {
            let mut next = BTreeSet::new();
            for &s in &cur {
                next.extend(a.successors(s, l));
            }
            if seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            parent.insert(next.clone(), (cur.clone(), l));
            if next.is_disjoint(&a.accepting) {
                // Rebuild the word.
                let mut word = Vec::new();
                let mut node = next;
                while let Some((prev, letter)) = parent.get(&node) {
                    word.push(*letter);
                    node = prev.clone();
                }
                word.reverse();
                return Some(word);
            }
            queue.push_back(next);
        }
    }
    None
}

pub fn nfa_is_universal(a: &FiniteNfa, num_letters: usize) -> bool {
    shortest_rejected_word(a, num_letters).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples_parse_and_roundtrip() {
        for k in 0..=5 {
            let m = example(k).unwrap();
            let again = parse_model(&m.to_text()).unwrap();
            assert_eq!(m, again, "example {k}");
        }
        assert!(example(6).is_err());
    }

    #[test]
    fn example_shapes() {
        let m1 = example(1).unwrap();
        assert_eq!(m1.network.agents[0].num_states(), 3);
        let m0 = example(0).unwrap();
        // Includes the a1 -> STOP branch.
        let a1 = m0.table.lookup("a1").unwrap();
        let e = &m0.network.agents[0];
        let stop = e.simulate(&[a1]);
        assert!(stop.iter().all(|&s| e.outgoing(s).is_empty()));
        let m4 = example(4).unwrap();
        assert!(!m4.network.agents[0].is_deterministic());
    }

    #[test]
    fn generators_roundtrip() {
        for level in 1..=3 {
            let m = thermostat(level).unwrap();
            assert_eq!(m, parse_model(&m.to_text()).unwrap(), "thermostat {level}");
        }
        for n in 2..=4 {
            let m = arbiter(n).unwrap();
            assert_eq!(m, parse_model(&m.to_text()).unwrap(), "arbiter {n}");
        }
        let m = pr_async().unwrap();
        assert_eq!(m, parse_model(&m.to_text()).unwrap());
        let m = pr_sync().unwrap();
        assert_eq!(m, parse_model(&m.to_text()).unwrap());
    }

    #[test]
    fn arbiter_sizes() {
        let m2 = arbiter(2).unwrap();
        assert_eq!(m2.table.len(), 6);
        let e3 = crate::csp::flatten_network(&arbiter(3).unwrap().network, &m2.table).unwrap();
        assert_eq!(e3.num_states(), 27);
        let m4 = arbiter(4).unwrap();
        let e4 = crate::csp::flatten_network(&m4.network, &m4.table).unwrap();
        assert_eq!(e4.num_states(), 81);
    }

    #[test]
    fn pr_async_env_shape() {
        let m = pr_async().unwrap();
        let x = &m.network.agents[0];
        // X0 reached after tau has both r0 and h0 branches with value flips.
        let tau = m.table.lookup("tau").unwrap();
        let r0 = m.table.lookup("r0").unwrap();
        let h0 = m.table.lookup("h0").unwrap();
        let after_tau = x.simulate(&[tau]);
        assert_eq!(after_tau.len(), 2);
        let x0 = *after_tau.iter().next().unwrap();
        assert_eq!(x.successors(x0, r0).len(), 2);
        assert_eq!(x.successors(x0, h0).len(), 2);
    }

    #[test]
    fn pspace_text_and_universality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_complete_nfa(3, 2, &mut rng);
        let m = pspace_instance(&a, 2).unwrap();
        assert_eq!(m, parse_model(&m.to_text()).unwrap());
        // One-state universal NFA.
        let uni = FiniteNfa::universal(2);
        assert!(nfa_is_universal(&uni, 2));
        assert!(pspace_instance(&uni, 2).is_ok());
        // NFA rejecting exactly the words containing letter 1.
        let mut rej = FiniteNfa::universal(2);
        rej.num_states = 2;
        rej.transitions.remove(&(0, 1, 0));
        rej.transitions.insert((0, 1, 1));
        rej.transitions.insert((1, 0, 1));
        rej.transitions.insert((1, 1, 1));
        let w = shortest_rejected_word(&rej, 2).unwrap();
        assert_eq!(w, vec![1]);
        // Incomplete automata are rejected.
        let mut inc = FiniteNfa::universal(2);
        inc.transitions.remove(&(0, 1, 0));
        assert!(matches!(pspace_instance(&inc, 2), Err(BenchError::IncompleteNfa)));
    }
}
