//! End-to-end pipeline: parse, flatten, build the liveness-negation
//! automaton, construct the specification automaton (explicitly,
//! symbolically, or both with a cross-check), run bounded synthesis, convert
//! the machine back to CSP, and re-verify independently.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::Nba;
use crate::coordinator::moore_to_csp;
use crate::csp::{flatten_network, ActionId, CspError, Process};
use crate::ltl::{negate, to_nba};
use crate::parse::Model;
use crate::specauto::{
    build_spec_automaton, ExplicitMode, SpecAutoError, SpecAutomaton, SpecContext, SpecUcw,
    SymbolicMode,
};
use crate::synth::{synthesize, MooreMachine, SynthConfig, SynthError, SynthOutcome};
use crate::verify::{check, Verdict, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explicit,
    Symbolic,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "explicit" => Ok(Mode::Explicit),
            "symbolic" => Ok(Mode::Symbolic),
            "both" => Ok(Mode::Both),
            other => Err(format!("unknown mode `{other}` (expected explicit|symbolic|both)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("composition: {0}")]
    Csp(#[from] CspError),
    #[error("specification automaton: {0}")]
    SpecAuto(#[from] SpecAutoError),
    #[error("synthesis: {0}")]
    Synth(#[from] SynthError),
    #[error("verification: {0}")]
    Verify(#[from] VerifyError),
    #[error("construction modes disagree: {0}")]
    ModeMismatch(String),
    #[error("extracted coordinator failed verification: {0}")]
    UnsoundResult(String),
}

pub struct PipelineConfig {
    pub mode: Mode,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { mode: Mode::Symbolic, synth: SynthConfig::default() }
    }
}

/// Everything a run produces, including the sizes reported alongside.
pub struct RunReport {
    pub sigma: Vec<ActionId>,
    pub env_states: usize,
    pub al_states: usize,
    pub as_states: usize,
    pub spec_states_pre: usize,
    pub spec_states: usize,
    pub spec_edges: usize,
    pub bound_schedule: Vec<usize>,
    pub outcome: RunOutcome,
    pub phase_times: Vec<(&'static str, Duration)>,
}

pub enum RunOutcome {
    Realizable {
        machine: MooreMachine,
        coordinator: Process,
        bound: usize,
        max_greens: usize,
        verdict: Verdict,
    },
    BoundedUnrealizable {
        max_bound: usize,
    },
}

/// Flatten the model and build the negated-liveness automaton.
pub fn prepare(model: &Model) -> Result<(Process, Nba<ActionId>), PipelineError> {
    let env = flatten_network(&model.network, &model.table)?;
    let universe: Vec<ActionId> = model.table.ids().collect();
    let al = to_nba(&negate(&model.spec.liveness), &universe);
    Ok((env, al))
}

/// Build the specification automaton in the requested mode; `Both` checks
/// the explicit and symbolic constructions against each other.
pub fn build_for_mode(
    ctx: &SpecContext,
    mode: Mode,
) -> Result<SpecAutomaton, PipelineError> {
    match mode {
        Mode::Explicit => {
            let mut m = ExplicitMode::new(ctx)?;
            Ok(build_spec_automaton(ctx, &mut m)?)
        }
        Mode::Symbolic => {
            let mut m = SymbolicMode::new(ctx)?;
            Ok(build_spec_automaton(ctx, &mut m)?)
        }
        Mode::Both => {
            let mut ex = ExplicitMode::new(ctx)?;
            let a = build_spec_automaton(ctx, &mut ex)?;
            let mut sy = SymbolicMode::new(ctx)?;
            let b = build_spec_automaton(ctx, &mut sy)?;
            if a.fingerprint() != b.fingerprint() || a.states != b.states {
                return Err(PipelineError::ModeMismatch(format!(
                    "explicit {} states / {} edges vs symbolic {} states / {} edges",
                    a.states.len(),
                    a.edges.len(),
                    b.states.len(),
                    b.edges.len()
                )));
            }
            Ok(a)
        }
    }
}

pub fn run_synthesis(model: &Model, config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let mut phase_times = Vec::new();
    let t0 = Instant::now();
    let (env, al) = prepare(model)?;
    phase_times.push(("flatten+liveness-automaton", t0.elapsed()));

    let t1 = Instant::now();
    let ctx = SpecContext::new(&al, &model.spec.safety_complement, &env, model.table.len());
    let auto = build_for_mode(&ctx, config.mode)?;
    let ucw = auto.to_ucw();
    phase_times.push(("spec-automaton", t1.elapsed()));

    let t2 = Instant::now();
    let outcome = synthesize(&ucw, &config.synth)?;
    phase_times.push(("bounded-synthesis", t2.elapsed()));

    let outcome = match outcome {
        SynthOutcome::Realizable { machine, bound, max_greens } => {
            let t3 = Instant::now();
            let mut coordinator = moore_to_csp(&machine, &model.table);
            coordinator.public = env.public.clone();
            let verdict = check(&env, &coordinator, &model.spec, model.table.len())?;
            phase_times.push(("verification", t3.elapsed()));
            if !verdict.passed() {
                return Err(PipelineError::UnsoundResult(verdict.render(&model.table)));
            }
            RunOutcome::Realizable { machine, coordinator, bound, max_greens, verdict }
        }
        SynthOutcome::BoundedUnrealizable { max_bound } => {
            RunOutcome::BoundedUnrealizable { max_bound }
        }
    };

    Ok(RunReport {
        sigma: ucw.sigma.clone(),
        env_states: env.num_states(),
        al_states: al.num_states,
        as_states: ctx.asc.num_states,
        spec_states_pre: ucw.pre_conversion_states,
        spec_states: ucw.num_states,
        spec_edges: ucw.edges.len(),
        bound_schedule: config.synth.bounds.clone(),
        outcome,
        phase_times,
    })
}

/// Build just the specification automaton and its co-Büchi reinterpretation.
pub fn spec_automaton_of(model: &Model, mode: Mode) -> Result<(SpecAutomaton, SpecUcw), PipelineError> {
    let (env, al) = prepare(model)?;
    let ctx = SpecContext::new(&al, &model.spec.safety_complement, &env, model.table.len());
    let auto = build_for_mode(&ctx, mode)?;
    let ucw = auto.to_ucw();
    Ok((auto, ucw))
}

impl RunReport {
    /// Machine-readable key/value record. Deterministic for fixed inputs and
    /// solver: timings are deliberately excluded.
    pub fn record(&self, model: &Model) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k}={v}\n"));
        kv("sigma", {
            self.sigma
                .iter()
                .map(|&a| model.table.name(a).to_string())
                .collect::<Vec<_>>()
                .join(",")
        });
        kv("env_states", self.env_states.to_string());
        kv("al_states", self.al_states.to_string());
        kv("as_states", self.as_states.to_string());
        kv("spec_states_pre", self.spec_states_pre.to_string());
        kv("spec_states", self.spec_states.to_string());
        kv("spec_edges", self.spec_edges.to_string());
        kv(
            "bound_schedule",
            self.bound_schedule.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
        );
        match &self.outcome {
            RunOutcome::Realizable { coordinator, bound, max_greens, verdict, .. } => {
                kv("outcome", "realizable".into());
                kv("bound_reached", bound.to_string());
                kv("coordinator_states", coordinator.num_states().to_string());
                kv("certificate_max_greens", max_greens.to_string());
                kv("verifier", verdict.render(&model.table));
                let eq = coordinator.to_equations(&model.table, "M");
                kv("coordinator", eq.replace('\n', " "));
            }
            RunOutcome::BoundedUnrealizable { max_bound } => {
                kv("outcome", "bounded-unrealizable".into());
                kv("bound_reached", max_bound.to_string());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth_example(k: usize, bounds: Vec<usize>) -> RunReport {
        let m = crate::benchgen::example(k).unwrap();
        let config = PipelineConfig {
            mode: Mode::Both,
            synth: SynthConfig { bounds, ..Default::default() },
        };
        run_synthesis(&m, &config).unwrap()
    }

    #[test]
    fn examples_0_1_3_4_synthesize_at_bound_1() {
        for (k, offers) in [(0, vec!["a0"]), (1, vec!["a0"]), (3, vec!["a0"]), (4, vec!["a0", "a1"])] {
            let m = crate::benchgen::example(k).unwrap();
            let report = synth_example(k, vec![1]);
            match &report.outcome {
                RunOutcome::Realizable { machine, bound, verdict, .. } => {
                    assert_eq!(*bound, 1, "example {k}");
                    assert!(verdict.passed());
                    let expected: u64 = offers
                        .iter()
                        .map(|o| {
                            let a = m.table.lookup(o).unwrap();
                            1u64 << machine.sigma.iter().position(|&x| x == a).unwrap()
                        })
                        .sum();
                    assert_eq!(machine.output[0], expected, "example {k} output");
                }
                RunOutcome::BoundedUnrealizable { .. } => panic!("example {k} must be realizable"),
            }
        }
    }

    #[test]
    fn examples_2_and_5_bounded_unrealizable() {
        for k in [2, 5] {
            let report = synth_example(k, vec![1, 2, 3, 4]);
            match &report.outcome {
                RunOutcome::BoundedUnrealizable { max_bound } => assert_eq!(*max_bound, 4),
                RunOutcome::Realizable { .. } => panic!("example {k} must be unrealizable"),
            }
        }
    }

    #[test]
    fn report_record_is_deterministic() {
        let m = crate::benchgen::example(1).unwrap();
        let config = PipelineConfig::default();
        let a = run_synthesis(&m, &config).unwrap().record(&m);
        let b = run_synthesis(&m, &config).unwrap().record(&m);
        assert_eq!(a, b);
        assert!(a.contains("outcome=realizable"));
    }
}
