//! Bounded realizability of the specification automaton: a propositional
//! encoding of the run-graph annotation (activation plus bounded counters)
//! for a Moore machine of a given size, expanded only over one-hot action
//! assignments, solved by the built-in solver or an external one speaking
//! the competition output format.

use std::collections::{HashMap, VecDeque};
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::tarjan_sccs;
use crate::bdd::SnapshotBdd;
use crate::csp::ActionId;
use crate::sat::{SolveResult, Solver};
use crate::specauto::SpecUcw;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("counter width {0} exceeds the configured budget of 62 bits")]
    CounterWidth(u32),
    #[error("satisfying assignment misses variable {0}")]
    MissingVariable(String),
    #[error("external solver failed: {0}")]
    External(String),
    #[error("solver timeout after {0:?}")]
    Timeout(Duration),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("extracted machine fails the run-graph certificate: {0}")]
    Certificate(String),
}

/// Deterministic Moore machine over Σ: each state outputs a subset of Σ (as
/// a bitmask in sigma order) and has a total transition function. The
/// composed system only follows actions inside the current output; totality
/// just keeps the encoding uniform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreMachine {
    pub num_states: usize,
    pub initial: usize,
    pub sigma: Vec<ActionId>,
    pub output: Vec<u64>,
    pub transition: Vec<Vec<usize>>,
}

impl MooreMachine {
    pub fn offers(&self, s: usize, sigma_idx: usize) -> bool {
        self.output[s] >> sigma_idx & 1 == 1
    }
}

/// A CNF instance with a named variable table. Variable indices are dense
/// and positive; clauses are non-tautological by construction.
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    pub var_names: Vec<String>,
    /// Count of (automaton state, machine state, action) constraint groups
    /// iterated by the one-hot expansion.
    pub one_hot_groups: usize,
    t_vars: HashMap<(usize, usize, usize), i32>,
    o_vars: HashMap<(usize, usize), i32>,
    bound: usize,
    sigma: Vec<ActionId>,
}

impl CnfInstance {
    pub fn to_dimacs(&self) -> String {
        let mut out = String::with_capacity(self.clauses.len() * 12);
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TLit {
    Const(bool),
    Var(i32),
}

impl TLit {
    fn neg(self) -> TLit {
        match self {
            TLit::Const(b) => TLit::Const(!b),
            TLit::Var(v) => TLit::Var(-v),
        }
    }
}

fn emit(clauses: &mut Vec<Vec<i32>>, parts: &[TLit]) {
    let mut lits = Vec::with_capacity(parts.len());
    for &p in parts {
        match p {
            TLit::Const(true) => return,
            TLit::Const(false) => {}
            TLit::Var(v) => lits.push(v),
        }
    }
    clauses.push(lits);
}

struct VarAlloc {
    names: Vec<String>,
}

impl VarAlloc {
    fn new() -> Self {
        VarAlloc { names: Vec::new() }
    }
    fn fresh(&mut self, name: String) -> i32 {
        self.names.push(name);
        self.names.len() as i32
    }
}

/// Encode bounded realizability of the specification automaton for a machine
/// with `n_states` states.
///
/// Clauses assert: totality and functionality of the transition table,
/// activation of initial automaton states at machine state 0, and for every
/// active pair and every action, propagation of activation along automaton
/// edges whose label predicate matches the machine's output, with counters
/// that never decrease and strictly increase into green states. Counter
/// width is ceil(log2(|Q|·N + 2)), so a forced strict increase past the top
/// makes the instance unsatisfiable. States that cannot reach a green state
/// never influence acceptance and receive no tracking clauses.
pub fn encode(ucw: &SpecUcw, n_states: usize) -> Result<CnfInstance, SynthError> {
    assert!(n_states >= 1);
    let nq = ucw.num_states;
    let nsigma = ucw.sigma.len();
    let width = {
        let bound = (nq * n_states + 2) as u64;
        (64 - bound.leading_zeros()).max(1)
    };
    if width > 62 {
        return Err(SynthError::CounterWidth(width));
    }

    let mut alloc = VarAlloc::new();
    let mut clauses: Vec<Vec<i32>> = Vec::new();

    let mut t_vars: HashMap<(usize, usize, usize), i32> = HashMap::new();
    for s in 0..n_states {
        for a in 0..nsigma {
            for s2 in 0..n_states {
                let v = alloc.fresh(format!("T({s},{a},{s2})"));
                t_vars.insert((s, a, s2), v);
            }
        }
    }
    let mut o_vars: HashMap<(usize, usize), i32> = HashMap::new();
    for s in 0..n_states {
        for m in 0..nsigma {
            let v = alloc.fresh(format!("O({s},{m})"));
            o_vars.insert((s, m), v);
        }
    }
    for s in 0..n_states {
        for a in 0..nsigma {
            let row: Vec<i32> = (0..n_states).map(|s2| t_vars[&(s, a, s2)]).collect();
            clauses.push(row.clone());
            for i in 0..n_states {
                for j in i + 1..n_states {
                    clauses.push(vec![-row[i], -row[j]]);
                }
            }
        }
    }

    let green_reaching = {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); nq];
        for &(q, _, _, q2) in &ucw.edges {
            rev[q2].push(q);
        }
        let mut mark = vec![false; nq];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &g in &ucw.greens {
            if !mark[g] {
                mark[g] = true;
                queue.push_back(g);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &p in &rev[x] {
                if !mark[p] {
                    mark[p] = true;
                    queue.push_back(p);
                }
            }
        }
        mark
    };

    let mut act_vars: HashMap<(usize, usize), i32> = HashMap::new();
    let mut cnt_vars: HashMap<(usize, usize), Vec<i32>> = HashMap::new();
    for q in 0..nq {
        if !green_reaching[q] {
            continue;
        }
        for s in 0..n_states {
            act_vars.insert((q, s), alloc.fresh(format!("act({q},{s})")));
        }
    }
    for q in 0..nq {
        if !green_reaching[q] {
            continue;
        }
        for s in 0..n_states {
            let bits: Vec<i32> =
                (0..width).map(|b| alloc.fresh(format!("cnt({q},{s},{b})"))).collect();
            cnt_vars.insert((q, s), bits);
        }
    }

    // Green states that self-loop on every action with an unconditional
    // label are rejecting traps: activation is contradictory outright, and
    // saying so directly spares the solver a walk through counter chains.
    let mut trap = vec![false; nq];
    {
        let mut self_loop_actions: HashMap<usize, std::collections::BTreeSet<usize>> =
            HashMap::new();
        for &(q, a, ref pred, q2) in &ucw.edges {
            if q == q2 && ucw.greens.contains(&q) && pred.root == 1 {
                self_loop_actions.entry(q).or_default().insert(a);
            }
        }
        for (q, acts) in self_loop_actions {
            if acts.len() == nsigma {
                trap[q] = true;
            }
        }
    }
    for q in 0..nq {
        if trap[q] && green_reaching[q] {
            for s in 0..n_states {
                clauses.push(vec![-act_vars[&(q, s)]]);
            }
        }
    }

    for &q0 in &ucw.initial {
        if green_reaching[q0] {
            clauses.push(vec![act_vars[&(q0, 0)]]);
        }
    }

    // Deduplicate label predicates; Tseitin nodes are shared per
    // (predicate, machine state).
    let mut pred_ids: HashMap<(Vec<(u32, usize, usize)>, usize), usize> = HashMap::new();
    let mut pred_store: Vec<SnapshotBdd> = Vec::new();
    let mut edge_pred: Vec<usize> = Vec::new();
    let mut edges_by_qa: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (i, &(q, a, ref pred, q2)) in ucw.edges.iter().enumerate() {
        let key = (pred.nodes.clone(), pred.root);
        let id = *pred_ids.entry(key).or_insert_with(|| {
            pred_store.push(pred.clone());
            pred_store.len() - 1
        });
        edge_pred.push(id);
        edges_by_qa.entry((q, a)).or_default().push((i, q2));
    }

    // memo[(pred, node, s)] -> literal meaning "node evaluates true under
    // the output bits of machine state s".
    let mut memo: HashMap<(usize, usize, usize), TLit> = HashMap::new();
    fn pred_root_lit(
        pred_store: &[SnapshotBdd],
        pred_id: usize,
        s: usize,
        o_vars: &HashMap<(usize, usize), i32>,
        alloc: &mut VarAlloc,
        clauses: &mut Vec<Vec<i32>>,
        memo: &mut HashMap<(usize, usize, usize), TLit>,
    ) -> TLit {
        let snap = &pred_store[pred_id];
        let lit_of = |node: usize, memo: &HashMap<(usize, usize, usize), TLit>| -> TLit {
            match node {
                0 => TLit::Const(false),
                1 => TLit::Const(true),
                x => memo[&(pred_id, x, s)],
            }
        };
        for idx in 0..snap.nodes.len() {
            let node_id = idx + 2;
            if memo.contains_key(&(pred_id, node_id, s)) {
                continue;
            }
            let (lvl, lo, hi) = snap.nodes[idx];
            let lo_lit = lit_of(lo, memo);
            let hi_lit = lit_of(hi, memo);
            let o = TLit::Var(o_vars[&(s, lvl as usize)]);
            let v = TLit::Var(alloc.fresh(format!("pred{pred_id}n{node_id}s{s}")));
            // v <-> if O then hi else lo
            emit(clauses, &[v.neg(), o.neg(), hi_lit]);
            emit(clauses, &[v.neg(), o, lo_lit]);
            emit(clauses, &[v, o.neg(), hi_lit.neg()]);
            emit(clauses, &[v, o, lo_lit.neg()]);
            memo.insert((pred_id, node_id, s), v);
        }
        lit_of(snap.root, memo)
    }

    // Counter comparators, allocated per (q, s) -> (q2, s2) pair; the strict
    // variant is selected by the greenness of the target.
    let mut comparators: HashMap<(usize, usize, usize, usize), i32> = HashMap::new();
    fn comparator_root(
        key: (usize, usize, usize, usize),
        strict: bool,
        cnt_vars: &HashMap<(usize, usize), Vec<i32>>,
        alloc: &mut VarAlloc,
        clauses: &mut Vec<Vec<i32>>,
        comparators: &mut HashMap<(usize, usize, usize, usize), i32>,
    ) -> i32 {
        if let Some(&v) = comparators.get(&key) {
            return v;
        }
        let (q, s, q2, s2) = key;
        let x = &cnt_vars[&(q, s)];
        let y = &cnt_vars[&(q2, s2)];
        let w = x.len();
        let chain: Vec<i32> =
            (0..w).map(|i| alloc.fresh(format!("cmp({q},{s},{q2},{s2},{i})"))).collect();
        for i in 0..w {
            // Compare from the most significant bit down.
            let xb = x[w - 1 - i];
            let yb = y[w - 1 - i];
            let c = chain[i];
            clauses.push(vec![-c, yb, -xb]);
            if i + 1 < w {
                let next = chain[i + 1];
                clauses.push(vec![-c, yb, xb, next]);
                clauses.push(vec![-c, -yb, -xb, next]);
            } else if strict {
                clauses.push(vec![-c, yb, xb]);
                clauses.push(vec![-c, -yb, -xb]);
            }
        }
        comparators.insert(key, chain[0]);
        chain[0]
    }

    // One-hot expansion: one constraint group per (q, s, a).
    let mut groups = 0usize;
    for q in 0..nq {
        for s in 0..n_states {
            for a in 0..nsigma {
                groups += 1;
                if !green_reaching[q] {
                    continue;
                }
                let edges = match edges_by_qa.get(&(q, a)) {
                    Some(v) => v,
                    None => continue,
                };
                for &(edge_idx, q2) in edges {
                    if !green_reaching[q2] {
                        continue;
                    }
                    let pred_id = edge_pred[edge_idx];
                    let pred_lit = pred_root_lit(
                        &pred_store,
                        pred_id,
                        s,
                        &o_vars,
                        &mut alloc,
                        &mut clauses,
                        &mut memo,
                    );
                    if pred_lit == TLit::Const(false) {
                        continue;
                    }
                    let strict = ucw.greens.contains(&q2);
                    for s2 in 0..n_states {
                        let act = TLit::Var(act_vars[&(q, s)]);
                        let t = TLit::Var(t_vars[&(s, a, s2)]);
                        let act2 = TLit::Var(act_vars[&(q2, s2)]);
                        emit(clauses.as_mut(), &[act.neg(), pred_lit.neg(), t.neg(), act2]);
                        if trap[q2] {
                            // Activation of the trap is already forbidden;
                            // the counter constraint would be vacuous.
                            continue;
                        }
                        let cmp = comparator_root(
                            (q, s, q2, s2),
                            strict,
                            &cnt_vars,
                            &mut alloc,
                            &mut clauses,
                            &mut comparators,
                        );
                        emit(
                            clauses.as_mut(),
                            &[act.neg(), pred_lit.neg(), t.neg(), TLit::Var(cmp)],
                        );
                    }
                }
            }
        }
    }

    Ok(CnfInstance {
        num_vars: alloc.names.len(),
        clauses,
        var_names: alloc.names,
        one_hot_groups: groups,
        t_vars,
        o_vars,
        bound: n_states,
        sigma: ucw.sigma.clone(),
    })
}

#[derive(Debug, Clone)]
pub enum SolverChoice {
    BuiltIn { learning: bool },
    External(PathBuf),
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::BuiltIn { learning: true }
    }
}

/// Solve an instance. The external bridge writes DIMACS to a temp file,
/// invokes the solver with the path as its sole argument, and reads the
/// competition `s ...` / `v ...` output.
pub fn solve(
    instance: &CnfInstance,
    solver: &SolverChoice,
    timeout: Option<Duration>,
    cancel: Option<Arc<AtomicBool>>,
) -> Result<SolveResult, SynthError> {
    match solver {
        SolverChoice::BuiltIn { learning } => {
            let mut s = Solver::new(instance.num_vars);
            s.learning = *learning;
            let flag = cancel.unwrap_or_else(|| Arc::new(AtomicBool::new(false)));
            if let Some(limit) = timeout {
                let timer_flag = flag.clone();
                let started = Instant::now();
                std::thread::spawn(move || {
                    while started.elapsed() < limit {
                        if timer_flag.load(Ordering::Relaxed) {
                            return;
                        }
                        std::thread::sleep(Duration::from_millis(50));
                    }
                    timer_flag.store(true, Ordering::Relaxed);
                });
            }
            s.set_cancel_flag(flag);
            for c in &instance.clauses {
                if !s.add_clause(c) {
                    return Ok(SolveResult::Unsat);
                }
            }
            Ok(s.solve())
        }
        SolverChoice::External(path) => {
            let mut file = tempfile::NamedTempFile::new()?;
            file.write_all(instance.to_dimacs().as_bytes())?;
            file.flush()?;
            let mut child = std::process::Command::new(path)
                .arg(file.path())
                .stdout(std::process::Stdio::piped())
                .stderr(std::process::Stdio::null())
                .spawn()
                .map_err(|e| SynthError::External(format!("spawn {path:?}: {e}")))?;
            let started = Instant::now();
            loop {
                match child.try_wait()? {
                    Some(_) => break,
                    None => {
                        if let Some(limit) = timeout {
                            if started.elapsed() > limit {
                                let _ = child.kill();
                                return Err(SynthError::Timeout(limit));
                            }
                        }
                        std::thread::sleep(Duration::from_millis(20));
                    }
                }
            }
            let out = child.wait_with_output()?;
            let text = String::from_utf8_lossy(&out.stdout);
            parse_solver_output(&text, instance.num_vars)
        }
    }
}

fn parse_solver_output(text: &str, num_vars: usize) -> Result<SolveResult, SynthError> {
    let mut status: Option<bool> = None;
    let mut model = vec![false; num_vars];
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("s ") {
            match rest.trim() {
                "SATISFIABLE" => status = Some(true),
                "UNSATISFIABLE" => status = Some(false),
                other => return Err(SynthError::External(format!("unknown status `{other}`"))),
            }
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let l: i64 = tok
                    .parse()
                    .map_err(|_| SynthError::External(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    continue;
                }
                let v = l.unsigned_abs() as usize;
                if v <= num_vars {
                    model[v - 1] = l > 0;
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(model)),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(SynthError::External("no status line in solver output".into())),
    }
}

/// Read the machine off a satisfying assignment.
pub fn extract_moore(instance: &CnfInstance, model: &[bool]) -> Result<MooreMachine, SynthError> {
    let n = instance.bound;
    let nsigma = instance.sigma.len();
    let get = |v: i32| -> bool { model[(v - 1) as usize] };
    let mut output = vec![0u64; n];
    for s in 0..n {
        for m in 0..nsigma {
            if get(instance.o_vars[&(s, m)]) {
                output[s] |= 1 << m;
            }
        }
    }
    let mut transition = vec![vec![0usize; nsigma]; n];
    for s in 0..n {
        for a in 0..nsigma {
            let mut found = None;
            for s2 in 0..n {
                if get(instance.t_vars[&(s, a, s2)]) {
                    found = Some(s2);
                    break;
                }
            }
            transition[s][a] =
                found.ok_or_else(|| SynthError::MissingVariable(format!("T({s},{a},*)")))?;
        }
    }
    Ok(MooreMachine { num_states: n, initial: 0, sigma: instance.sigma.clone(), output, transition })
}

/// Independent run-graph re-check of an extracted machine: re-walk the
/// product of the automaton with the machine and confirm no reachable cycle
/// visits a green state, returning the maximum green count over paths.
pub fn certify_run_graph(ucw: &SpecUcw, m: &MooreMachine) -> Result<usize, SynthError> {
    let nq = ucw.num_states;
    let n = m.num_states;
    let node = |q: usize, s: usize| q * n + s;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nq * n];
    for s in 0..n {
        let out = m.output[s];
        for &(q, a, ref pred, q2) in &ucw.edges {
            if pred.eval(&|lvl| out >> lvl & 1 == 1) {
                adj[node(q, s)].push(node(q2, m.transition[s][a]));
            }
        }
    }
    let mut seen = vec![false; nq * n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &q0 in &ucw.initial {
        let x = node(q0, m.initial);
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &t in &adj[x] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    let mut reach_edges: Vec<(usize, usize)> = Vec::new();
    for (x, succ) in adj.iter().enumerate() {
        if seen[x] {
            for &t in succ {
                reach_edges.push((x, t));
            }
        }
    }
    let sccs = tarjan_sccs(nq * n, &reach_edges);
    let mut scc_of = vec![usize::MAX; nq * n];
    for (i, scc) in sccs.iter().enumerate() {
        for &x in scc {
            scc_of[x] = i;
        }
    }
    let is_green = |x: usize| seen[x] && ucw.greens.contains(&(x / n));
    let mut cyclic = vec![false; sccs.len()];
    for &(x, t) in &reach_edges {
        if scc_of[x] == scc_of[t] {
            cyclic[scc_of[x]] = true;
        }
    }
    for (i, scc) in sccs.iter().enumerate() {
        if cyclic[i] && scc.iter().any(|&x| is_green(x)) {
            return Err(SynthError::Certificate(
                "reachable cycle visits a rejecting state".into(),
            ));
        }
    }
    // Longest green count along the SCC condensation; Tarjan emits SCCs in
    // reverse topological order, so successors are already computed.
    let mut dp = vec![0usize; sccs.len()];
    for (i, scc) in sccs.iter().enumerate() {
        let greens_here = scc.iter().filter(|&&x| is_green(x)).count();
        let mut best_succ = 0usize;
        for &x in scc {
            if !seen[x] {
                continue;
            }
            for &t in &adj[x] {
                if scc_of[t] != i && scc_of[t] != usize::MAX {
                    best_succ = best_succ.max(dp[scc_of[t]]);
                }
            }
        }
        dp[i] = greens_here + best_succ;
    }
    let mut max = 0usize;
    for &q0 in &ucw.initial {
        let x = node(q0, m.initial);
        if scc_of[x] != usize::MAX {
            max = max.max(dp[scc_of[x]]);
        }
    }
    Ok(max)
}

/// Whether the machine's full tree is accepted by the specification
/// automaton in its universal reading.
pub fn ucw_accepts_machine(ucw: &SpecUcw, m: &MooreMachine) -> bool {
    certify_run_graph(ucw, m).is_ok()
}

#[derive(Debug, Clone)]
pub enum SynthOutcome {
    Realizable { machine: MooreMachine, bound: usize, max_greens: usize },
    BoundedUnrealizable { max_bound: usize },
}

pub struct SynthConfig {
    pub bounds: Vec<usize>,
    pub solver: SolverChoice,
    pub timeout: Option<Duration>,
    pub jobs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            bounds: vec![1, 2, 3, 4, 6, 8, 12, 16],
            solver: SolverChoice::default(),
            timeout: None,
            jobs: 1,
        }
    }
}

/// Try the bound schedule in order; the first satisfiable bound wins. An
/// exhausted schedule is evidence of unrealizability at the tried sizes, not
/// a proof. With `jobs > 1`, bounds are solved in parallel; a success
/// cancels every larger bound and the smallest satisfiable bound is kept.
pub fn synthesize(ucw: &SpecUcw, config: &SynthConfig) -> Result<SynthOutcome, SynthError> {
    assert!(!config.bounds.is_empty());
    let mut max_bound = 0;
    if config.jobs <= 1 {
        for &n in &config.bounds {
            max_bound = max_bound.max(n);
            let instance = encode(ucw, n)?;
            match solve(&instance, &config.solver, config.timeout, None)? {
                SolveResult::Sat(model) => {
                    let machine = extract_moore(&instance, &model)?;
                    let max_greens = certify_run_graph(ucw, &machine)?;
                    return Ok(SynthOutcome::Realizable { machine, bound: n, max_greens });
                }
                SolveResult::Unsat => continue,
                SolveResult::Cancelled => {
                    return Err(SynthError::Timeout(config.timeout.unwrap_or_default()))
                }
            }
        }
        return Ok(SynthOutcome::BoundedUnrealizable { max_bound });
    }

    let mut instances = Vec::new();
    for &n in &config.bounds {
        max_bound = max_bound.max(n);
        instances.push((n, encode(ucw, n)?));
    }
    let flags: Vec<Arc<AtomicBool>> =
        instances.iter().map(|_| Arc::new(AtomicBool::new(false))).collect();
    let bounds: Vec<usize> = instances.iter().map(|&(n, _)| n).collect();
    let results: Vec<(usize, Result<SolveResult, SynthError>)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (i, (n, instance)) in instances.iter().enumerate() {
            let flag = flags[i].clone();
            let all_flags = flags.clone();
            let all_bounds = bounds.clone();
            let solver = config.solver.clone();
            let timeout = config.timeout;
            let n = *n;
            handles.push(scope.spawn(move || {
                let r = solve(instance, &solver, timeout, Some(flag));
                if matches!(r, Ok(SolveResult::Sat(_))) {
                    for (j, f) in all_flags.iter().enumerate() {
                        if all_bounds[j] > n {
                            f.store(true, Ordering::Relaxed);
                        }
                    }
                }
                (n, r)
            }));
        }
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });
    let mut best: Option<(usize, Vec<bool>)> = None;
    for (n, r) in results {
        if let Ok(SolveResult::Sat(model)) = r {
            if best.as_ref().map_or(true, |(bn, _)| n < *bn) {
                best = Some((n, model));
            }
        }
    }
    match best {
        Some((n, model)) => {
            let instance = encode(ucw, n)?;
            let machine = extract_moore(&instance, &model)?;
            let max_greens = certify_run_graph(ucw, &machine)?;
            Ok(SynthOutcome::Realizable { machine, bound: n, max_greens })
        }
        None => Ok(SynthOutcome::BoundedUnrealizable { max_bound }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_ucw() -> SpecUcw {
        // Two states over one action: state 0 loops on any label; on the
        // empty label it moves to the green state 1 which self-loops.
        // Accepted machines must always offer the action.
        let l_has = SnapshotBdd { nodes: vec![(0, 0, 1)], root: 2 };
        let l_not = SnapshotBdd { nodes: vec![(0, 1, 0)], root: 2 };
        SpecUcw {
            num_states: 2,
            initial: [0].into_iter().collect(),
            edges: vec![
                (0, 0, l_has, 0),
                (0, 0, l_not.clone(), 1),
                (1, 0, SnapshotBdd::constant(true), 1),
            ],
            greens: [1].into_iter().collect(),
            sigma: vec![7],
            pre_conversion_states: 2,
        }
    }

    #[test]
    fn encode_and_solve_tiny() {
        let ucw = tiny_ucw();
        let instance = encode(&ucw, 1).unwrap();
        assert_eq!(instance.one_hot_groups, 2 * 1 * 1);
        let r = solve(&instance, &SolverChoice::default(), None, None).unwrap();
        match r {
            SolveResult::Sat(model) => {
                let m = extract_moore(&instance, &model).unwrap();
                assert_eq!(m.output[0], 0b1);
                assert!(certify_run_graph(&ucw, &m).is_ok());
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn encode_deterministic_dimacs() {
        let ucw = tiny_ucw();
        let a = encode(&ucw, 2).unwrap().to_dimacs();
        let b = encode(&ucw, 2).unwrap().to_dimacs();
        assert_eq!(a, b);
    }

    #[test]
    fn certificate_rejects_bad_machine() {
        let ucw = tiny_ucw();
        // Machine that never offers the action walks into the green loop.
        let m = MooreMachine {
            num_states: 1,
            initial: 0,
            sigma: vec![7],
            output: vec![0],
            transition: vec![vec![0]],
        };
        assert!(certify_run_graph(&ucw, &m).is_err());
        assert!(!ucw_accepts_machine(&ucw, &m));
    }

    #[test]
    fn solver_output_parsing() {
        let r = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2 3 0\n", 3).unwrap();
        assert_eq!(r, SolveResult::Sat(vec![true, false, true]));
        let r = parse_solver_output("s UNSATISFIABLE\n", 3).unwrap();
        assert_eq!(r, SolveResult::Unsat);
        assert!(parse_solver_output("garbage\n", 1).is_err());
    }
}
