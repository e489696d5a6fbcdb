//! Independent model checker for candidate coordinators: deadlock/safety
//! over maximal finite computations and liveness over infinite fair
//! computations, with replayable witnesses; plus a brute-force coordinator
//! enumeration for desk-scale unrealizability evidence.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::{nba_accepts_lasso, tarjan_sccs, Nba};
use crate::csp::{ActionId, ActionTable, Process, SpecPair, Trace};
use crate::ltl::{negate, to_nba};
use crate::synth::MooreMachine;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("coordinator has private actions")]
    CoordinatorPrivate,
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailKind {
    DeadlockSafety,
    FairLiveness,
}

/// Outcome with a replayable witness: a finite trace for safety failures, a
/// lasso for liveness failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail { kind: FailKind, witness: Trace },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn render(&self, table: &ActionTable) -> String {
        match self {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail { kind, witness } => {
                let k = match kind {
                    FailKind::DeadlockSafety => "deadlock-safety",
                    FailKind::FairLiveness => "fair-liveness",
                };
                format!("fail({k}: {})", witness.render(table))
            }
        }
    }
}

/// Check a coordinator against the environment and the specification pair.
///
/// Safety: search the synchronized product (tracking the safety-complement
/// automaton by subsets) for a reachable dead end whose trace the
/// complement automaton accepts. Liveness: search the product with the
/// automaton for the negated liveness formula for a fair green lasso — one
/// whose loop either contains a synchronization, or whose loop states never
/// enable one.
pub fn check(
    env: &Process,
    coordinator: &Process,
    spec: &SpecPair,
    num_actions: usize,
) -> Result<Verdict, VerifyError> {
    if !coordinator.private.is_empty() {
        return Err(VerifyError::CoordinatorPrivate);
    }
    if let Some(witness) = safety_witness(env, coordinator, spec, num_actions) {
        return Ok(Verdict::Fail { kind: FailKind::DeadlockSafety, witness });
    }
    if let Some(witness) = liveness_witness(env, coordinator, spec, num_actions) {
        return Ok(Verdict::Fail { kind: FailKind::FairLiveness, witness });
    }
    Ok(Verdict::Pass)
}

/// Moves of the synchronized composition at `(e, m)`: private environment
/// steps interleave freely, public actions need both sides.
fn product_moves(
    env: &Process,
    m: &Process,
    e: usize,
    s: usize,
) -> Vec<(ActionId, usize, usize, bool)> {
    let mut out = Vec::new();
    for (a, e2) in env.outgoing(e) {
        if env.private.contains(&a) {
            out.push((a, e2, s, false));
        } else {
            for s2 in m.successors(s, a) {
                out.push((a, e2, s2, true));
            }
        }
    }
    out
}

fn sync_enabled(env: &Process, m: &Process, e: usize, s: usize) -> bool {
    env.enabled_public(e)
        .iter()
        .any(|&a| !m.successors(s, a).is_empty())
}

fn safety_witness(
    env: &Process,
    m: &Process,
    spec: &SpecPair,
    num_actions: usize,
) -> Option<Trace> {
    let letters: Vec<ActionId> = (0..num_actions).collect();
    let asc = spec.safety_complement.completed(&letters);
    // Product state: (e, m-state, subset of safety-complement states).
    type Key = (usize, usize, BTreeSet<usize>);
    let start: Key = (env.initial, m.initial, asc.initial.clone());
    let mut parent: BTreeMap<Key, (Key, ActionId)> = BTreeMap::new();
    let mut seen: BTreeSet<Key> = [start.clone()].into_iter().collect();
    let mut queue: VecDeque<Key> = [start].into_iter().collect();
    while let Some(key) = queue.pop_front() {
        let (e, s, ref subset) = key;
        let moves = product_moves(env, m, e, s);
        if moves.is_empty() {
            // Maximal finite computation; violating iff the complement
            // automaton accepts the consumed trace.
            if subset.iter().any(|r| asc.accepting.contains(r)) {
                let mut word = Vec::new();
                let mut cur = key;
                while let Some((prev, a)) = parent.get(&cur) {
                    word.push(*a);
                    cur = prev.clone();
                }
                word.reverse();
                return Some(Trace::finite(word));
            }
            continue;
        }
        for (a, e2, s2, _) in moves {
            let mut subset2 = BTreeSet::new();
            for &r in subset.iter() {
                subset2.extend(asc.successors(r, a));
            }
            let next: Key = (e2, s2, subset2);
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), (key.clone(), a));
                queue.push_back(next);
            }
        }
    }
    None
}

fn liveness_witness(
    env: &Process,
    m: &Process,
    spec: &SpecPair,
    num_actions: usize,
) -> Option<Trace> {
    let universe: Vec<ActionId> = (0..num_actions).collect();
    let neg = negate(&spec.liveness);
    let a_neg: Nba<ActionId> = to_nba(&neg, &universe);
    if a_neg.num_states == 0 {
        return None;
    }
    let nq = a_neg.num_states;
    let node = |e: usize, s: usize, q: usize| (e * m.num_states() + s) * nq + q;
    let total = env.num_states() * m.num_states() * nq;

    // Build the reachable product graph.
    let mut edges: Vec<(usize, usize, ActionId, bool)> = Vec::new();
    let mut adj: Vec<Vec<(usize, ActionId, bool)>> = vec![Vec::new(); total];
    let mut seen = vec![false; total];
    let mut queue = VecDeque::new();
    for &q0 in &a_neg.initial {
        let x = node(env.initial, m.initial, q0);
        if !seen[x] {
            seen[x] = true;
            queue.push_back((env.initial, m.initial, q0));
        }
    }
    while let Some((e, s, q)) = queue.pop_front() {
        let src = node(e, s, q);
        for (a, e2, s2, is_sync) in product_moves(env, m, e, s) {
            for q2 in a_neg.successors(q, &a) {
                let dst = node(e2, s2, q2);
                edges.push((src, dst, a, is_sync));
                adj[src].push((dst, a, is_sync));
                if !seen[dst] {
                    seen[dst] = true;
                    queue.push_back((e2, s2, q2));
                }
            }
        }
    }

    let green = |x: usize| a_neg.greens.contains(&(x % nq));
    let decode = |x: usize| -> (usize, usize, usize) {
        let q = x % nq;
        let rest = x / nq;
        (rest / m.num_states(), rest % m.num_states(), q)
    };

    // Pass 1: green SCC containing an internal synchronization edge — its
    // lasso interacts infinitely often, hence fair.
    let plain: Vec<(usize, usize)> = edges.iter().map(|&(x, t, _, _)| (x, t)).collect();
    let sccs = tarjan_sccs(total, &plain);
    let mut scc_of = vec![usize::MAX; total];
    for (i, scc) in sccs.iter().enumerate() {
        for &x in scc {
            scc_of[x] = i;
        }
    }
    for (i, scc) in sccs.iter().enumerate() {
        if scc.iter().all(|&x| !seen[x]) {
            continue;
        }
        let internal_sync = edges
            .iter()
            .any(|&(x, t, _, is_sync)| is_sync && scc_of[x] == i && scc_of[t] == i);
        let has_green = scc.iter().any(|&x| seen[x] && green(x));
        let cyclic = edges.iter().any(|&(x, t, _, _)| scc_of[x] == i && scc_of[t] == i);
        if internal_sync && has_green && cyclic {
            return Some(extract_lasso(env, m, &adj, &sccs[i], &edges, i, &scc_of, green, decode, true));
        }
    }

    // Pass 2: a loop of hidden steps through states where no
    // synchronization is ever enabled — vacuously fair.
    let restricted: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(x, t, a, _)| {
            let (e1, s1, _) = decode(x);
            let (e2, s2, _) = decode(t);
            env.private.contains(&a)
                && !sync_enabled(env, m, e1, s1)
                && !sync_enabled(env, m, e2, s2)
        })
        .map(|&(x, t, _, _)| (x, t))
        .collect();
    let sccs2 = tarjan_sccs(total, &restricted);
    let mut scc2_of = vec![usize::MAX; total];
    for (i, scc) in sccs2.iter().enumerate() {
        for &x in scc {
            scc2_of[x] = i;
        }
    }
    for (i, scc) in sccs2.iter().enumerate() {
        let cyclic = restricted.iter().any(|&(x, t)| scc2_of[x] == i && scc2_of[t] == i);
        let has_green = scc.iter().any(|&x| seen[x] && green(x));
        if cyclic && has_green && scc.iter().any(|&x| seen[x]) {
            let redges: Vec<(usize, usize, ActionId, bool)> = edges
                .iter()
                .filter(|&&(x, t, _, _)| restricted.contains(&(x, t)))
                .copied()
                .collect();
            return Some(extract_lasso(env, m, &adj, &sccs2[i], &redges, i, &scc2_of, green, decode, false));
        }
    }
    None
}

/// Build prefix;loop action sequences: a path from the initial product state
/// to the SCC, then a cycle inside it visiting a green state (and a
/// synchronization edge when requested).
#[allow(clippy::too_many_arguments)]
fn extract_lasso(
    env: &Process,
    m: &Process,
    adj: &[Vec<(usize, ActionId, bool)>],
    scc: &[usize],
    scc_edges: &[(usize, usize, ActionId, bool)],
    scc_idx: usize,
    scc_of: &[usize],
    green: impl Fn(usize) -> bool,
    decode: impl Fn(usize) -> (usize, usize, usize),
    need_sync: bool,
) -> Trace {
    let _ = decode;
    // BFS from the initial node to any SCC member.
    let start_candidates: BTreeSet<usize> = scc.iter().copied().collect();
    let init: Vec<usize> = {
        // Initial nodes are those with env/m initial; recover via adj index
        // structure: we re-derive by scanning for nodes whose decode matches.
        let mut v = Vec::new();
        for x in 0..adj.len() {
            let (e, s, _) = {
                let q = x % (adj.len() / (env.num_states() * m.num_states()).max(1)).max(1);
                let _ = q;
                // decode inline.
                let nq = adj.len() / (env.num_states() * m.num_states());
                let rest = x / nq.max(1);
                (rest / m.num_states(), rest % m.num_states(), x % nq.max(1))
            };
            if e == env.initial && s == m.initial {
                v.push(x);
            }
        }
        v
    };
    let mut parent: BTreeMap<usize, (usize, ActionId)> = BTreeMap::new();
    let mut seen: BTreeSet<usize> = init.iter().copied().collect();
    let mut queue: VecDeque<usize> = init.iter().copied().collect();
    let mut entry = None;
    'outer: while let Some(x) = queue.pop_front() {
        if start_candidates.contains(&x) {
            entry = Some(x);
            break 'outer;
        }
        for &(t, a, _) in &adj[x] {
            if seen.insert(t) {
                parent.insert(t, (x, a));
                queue.push_back(t);
            }
        }
    }
    let entry = entry.expect("SCC reachable from initial");
    let mut prefix = Vec::new();
    let mut cur = entry;
    while let Some(&(p, a)) = parent.get(&cur) {
        prefix.push(a);
        cur = p;
    }
    prefix.reverse();

    // Cycle within the SCC: entry -> green -> (sync edge) -> entry using BFS
    // legs over SCC-internal edges.
    let internal: Vec<(usize, usize, ActionId)> = scc_edges
        .iter()
        .filter(|&&(x, t, _, _)| scc_of[x] == scc_idx && scc_of[t] == scc_idx)
        .map(|&(x, t, a, _)| (x, t, a))
        .collect();
    let bfs_leg = |from: usize, goal: &dyn Fn(usize) -> bool| -> (Vec<ActionId>, usize) {
        let mut parent: BTreeMap<usize, (usize, ActionId)> = BTreeMap::new();
        let mut seen: BTreeSet<usize> = [from].into_iter().collect();
        let mut queue: VecDeque<usize> = [from].into_iter().collect();
        while let Some(x) = queue.pop_front() {
            if goal(x) && x != from || goal(x) && parent.contains_key(&x) {
                let mut word = Vec::new();
                let mut cur = x;
                while let Some(&(p, a)) = parent.get(&cur) {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return (word, x);
            }
            for &(s, t, a) in &internal {
                if s == x && seen.insert(t) {
                    parent.insert(t, (x, a));
                    queue.push_back(t);
                    if goal(t) {
                        // loop continues; handled on pop
                    }
                }
            }
            if goal(x) && x == from && !parent.is_empty() {
                return (Vec::new(), x);
            }
        }
        (Vec::new(), from)
    };

    // Leg 1: to a green node (possibly the entry itself).
    let (leg1, at_green) = if green(entry) {
        (Vec::new(), entry)
    } else {
        bfs_leg(entry, &|x| green(x))
    };
    // Leg 2: optionally traverse a sync edge.
    let (leg2, at_sync_end) = if need_sync {
        let sync_heads: BTreeSet<usize> = scc_edges
            .iter()
            .filter(|&&(x, t, _, is_sync)| is_sync && scc_of[x] == scc_idx && scc_of[t] == scc_idx)
            .map(|&(x, _, _, _)| x)
            .collect();
        if sync_heads.contains(&at_green) {
            (Vec::new(), at_green)
        } else {
            bfs_leg(at_green, &|x| sync_heads.contains(&x))
        }
    } else {
        (Vec::new(), at_green)
    };
    let (leg2b, after_sync) = if need_sync {
        // Take one sync edge.
        let e = scc_edges
            .iter()
            .find(|&&(x, _, _, is_sync)| is_sync && x == at_sync_end && scc_of[x] == scc_idx)
            .expect("sync edge at head");
        (vec![e.2], e.1)
    } else {
        (Vec::new(), at_sync_end)
    };
    // Leg 3: back to the entry.
    let (leg3, _) = if after_sync == entry {
        // Still need a non-empty loop; walk to entry via any cycle.
        let mut one_step: Option<(Vec<ActionId>, usize)> = None;
        for &(s, t, a) in &internal {
            if s == entry {
                if t == entry {
                    one_step = Some((vec![a], t));
                    break;
                }
                let (back, _) = bfs_leg(t, &|x| x == entry);
                if !back.is_empty() || t == entry {
                    let mut w = vec![a];
                    w.extend(back);
                    one_step = Some((w, entry));
                    break;
                }
            }
        }
        one_step.unwrap_or((Vec::new(), entry))
    } else {
        bfs_leg(after_sync, &|x| x == entry)
    };
    let mut loop_part = leg1;
    loop_part.extend(leg2);
    loop_part.extend(leg2b);
    loop_part.extend(leg3);
    if loop_part.is_empty() {
        // Self-loop on the entry.
        if let Some(&(_, _, a)) = internal.iter().find(|&&(s, t, _)| s == entry && t == entry) {
            loop_part.push(a);
        }
    }
    Trace::lasso(prefix, loop_part)
}

/// Replay a verdict's witness and confirm it reproduces the violation.
pub fn replay_witness(
    env: &Process,
    m: &Process,
    spec: &SpecPair,
    num_actions: usize,
    verdict: &Verdict,
) -> bool {
    let compose = |trace: &[ActionId]| -> Vec<(usize, usize)> {
        // All runs of the composition over the exact trace.
        let mut cur: BTreeSet<(usize, usize)> = [(env.initial, m.initial)].into_iter().collect();
        for &a in trace {
            let mut next = BTreeSet::new();
            for &(e, s) in &cur {
                for (b, e2, s2, _) in product_moves(env, m, e, s) {
                    if b == a {
                        next.insert((e2, s2));
                    }
                }
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur.into_iter().collect()
    };
    match verdict {
        Verdict::Pass => true,
        Verdict::Fail { kind: FailKind::DeadlockSafety, witness } => {
            let ends = compose(&witness.prefix);
            let letters: Vec<ActionId> = (0..num_actions).collect();
            let asc = spec.safety_complement.completed(&letters);
            ends.iter().any(|&(e, s)| product_moves(env, m, e, s).is_empty())
                && asc.runs_word(&witness.prefix)
        }
        Verdict::Fail { kind: FailKind::FairLiveness, witness } => {
            let lp = witness.lasso.as_ref().expect("liveness witness is a lasso");
            // The lasso must be executable and loop back to a visited state.
            let mid = compose(&witness.prefix);
            if mid.is_empty() {
                return false;
            }
            let full: Vec<ActionId> =
                witness.prefix.iter().chain(lp.iter()).copied().collect();
            let end = compose(&full);
            if end.is_empty() {
                return false;
            }
            // The negated liveness automaton accepts the lasso word.
            let universe: Vec<ActionId> = (0..num_actions).collect();
            let a_neg = to_nba(&negate(&spec.liveness), &universe);
            nba_accepts_lasso(&a_neg, &witness.prefix, lp).unwrap_or(false)
        }
    }
}

#[derive(Debug, Clone)]
pub enum EnumerationOutcome {
    Solution(MooreMachine),
    Exhausted(usize),
}

/// Brute-force search over deterministic Moore-shaped coordinators with at
/// most `max_states` states (canonicalized by reachable BFS renumbering),
/// returning the first verifier-passing one.
pub fn enumerate_coordinators(
    env: &Process,
    spec: &SpecPair,
    max_states: usize,
    num_actions: usize,
) -> Result<EnumerationOutcome, VerifyError> {
    let sigma: Vec<ActionId> = env.public.iter().copied().collect();
    if max_states > 3 || sigma.len() > 3 {
        return Err(VerifyError::CapExceeded(format!(
            "k={max_states}, |sigma|={}",
            sigma.len()
        )));
    }
    let nsigma = sigma.len();
    let mut seen_canonical: BTreeSet<Vec<(u64, Vec<usize>)>> = BTreeSet::new();
    for k in 1..=max_states {
        // Outputs: one mask per state; transitions: targets for offered
        // actions only (non-offered default to self).
        let mut outputs = vec![0u64; k];
        loop {
            // Enumerate transition tables for the current outputs.
            let offered: Vec<Vec<usize>> = (0..k)
                .map(|s| (0..nsigma).filter(|&i| outputs[s] >> i & 1 == 1).collect())
                .collect();
            let slots: usize = offered.iter().map(|v| v.len()).sum();
            let mut assignment = vec![0usize; slots];
            loop {
                // Build the machine.
                let mut transition = vec![vec![0usize; nsigma]; k];
                {
                    let mut idx = 0;
                    for s in 0..k {
                        for &i in &offered[s] {
                            transition[s][i] = assignment[idx];
                            idx += 1;
                        }
                    }
                }
                let machine = MooreMachine {
                    num_states: k,
                    initial: 0,
                    sigma: sigma.clone(),
                    output: outputs.clone(),
                    transition,
                };
                if let Some(canon) = canonical_form(&machine) {
                    if seen_canonical.insert(canon) {
                        let table = ActionTable::new();
                        let p = crate::coordinator::moore_to_csp(&machine, &table);
                        let mut p = p;
                        p.public = env.public.clone();
                        if check(env, &p, spec, num_actions)?.passed() {
                            return Ok(EnumerationOutcome::Solution(machine));
                        }
                    }
                }
                // Advance the assignment.
                let mut pos = 0;
                loop {
                    if pos == slots {
                        break;
                    }
                    assignment[pos] += 1;
                    if assignment[pos] < k {
                        break;
                    }
                    assignment[pos] = 0;
                    pos += 1;
                }
                if pos == slots {
                    break;
                }
            }
            // Advance outputs.
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                outputs[pos] += 1;
                if outputs[pos] < (1 << nsigma) {
                    break;
                }
                outputs[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    Ok(EnumerationOutcome::Exhausted(max_states))
}

/// Reachable canonical form: BFS renumbering from the initial state along
/// offered actions in sigma order. Machines with unreachable states collapse
/// onto their reachable cores.
fn canonical_form(m: &MooreMachine) -> Option<Vec<(u64, Vec<usize>)>> {
    let nsigma = m.sigma.len();
    let mut order: Vec<usize> = Vec::new();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    index.insert(m.initial, 0);
    order.push(m.initial);
    queue.push_back(m.initial);
    while let Some(s) = queue.pop_front() {
        for i in 0..nsigma {
            if m.output[s] >> i & 1 == 1 {
                let t = m.transition[s][i];
                if !index.contains_key(&t) {
                    index.insert(t, order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
    }
    // Skip machines with unreachable states: the same behavior shows up as
    // a smaller machine in an earlier round.
    if order.len() != m.num_states {
        return None;
    }
    Some(
        order
            .iter()
            .map(|&s| {
                let targets: Vec<usize> = (0..nsigma)
                    .map(|i| {
                        if m.output[s] >> i & 1 == 1 {
                            index[&m.transition[s][i]]
                        } else {
                            usize::MAX
                        }
                    })
                    .collect();
                (m.output[s], targets)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinator::moore_to_csp;
    use crate::csp::flatten_network;

    fn setup(k: usize) -> (Process, crate::parse::Model) {
        let m = crate::benchgen::example(k).unwrap();
        let env = flatten_network(&m.network, &m.table).unwrap();
        (env, m)
    }

    fn coordinator_offering(env: &Process, table: &ActionTable, offers: &[&str]) -> Process {
        let sigma: Vec<ActionId> = env.public.iter().copied().collect();
        let mut output = 0u64;
        for o in offers {
            let a = table.lookup(o).unwrap();
            let i = sigma.iter().position(|&x| x == a).unwrap();
            output |= 1 << i;
        }
        let m = MooreMachine {
            num_states: 1,
            initial: 0,
            sigma,
            output: vec![output],
            transition: vec![vec![0; env.public.len()]],
        };
        let mut p = moore_to_csp(&m, table);
        p.public = env.public.clone();
        p
    }

    #[test]
    fn example3_passes_under_fairness() {
        let (env, m) = setup(3);
        let coord = coordinator_offering(&env, &m.table, &["a0"]);
        let v = check(&env, &coord, &m.spec, m.table.len()).unwrap();
        assert!(v.passed(), "{}", v.render(&m.table));
    }

    #[test]
    fn example2_fails_liveness_with_b_lasso() {
        let (env, m) = setup(2);
        let coord = coordinator_offering(&env, &m.table, &["a0"]);
        let v = check(&env, &coord, &m.spec, m.table.len()).unwrap();
        match &v {
            Verdict::Fail { kind: FailKind::FairLiveness, witness } => {
                let b = m.table.lookup("b").unwrap();
                let lp = witness.lasso.as_ref().unwrap();
                assert!(lp.contains(&b));
                assert!(replay_witness(&env, &coord, &m.spec, m.table.len(), &v));
            }
            other => panic!("expected fair-liveness failure, got {other:?}"),
        }
    }

    #[test]
    fn example0_deadlocks_on_a1_only() {
        let (env, m) = setup(0);
        let coord = coordinator_offering(&env, &m.table, &["a1"]);
        let v = check(&env, &coord, &m.spec, m.table.len()).unwrap();
        match &v {
            Verdict::Fail { kind: FailKind::DeadlockSafety, witness } => {
                let a1 = m.table.lookup("a1").unwrap();
                assert_eq!(witness.prefix, vec![a1]);
                assert!(replay_witness(&env, &coord, &m.spec, m.table.len(), &v));
            }
            other => panic!("expected deadlock failure, got {other:?}"),
        }
    }

    #[test]
    fn example0_and_1_pass_with_a0() {
        for k in [0, 1] {
            let (env, m) = setup(k);
            let coord = coordinator_offering(&env, &m.table, &["a0"]);
            let v = check(&env, &coord, &m.spec, m.table.len()).unwrap();
            assert!(v.passed(), "example {k}: {}", v.render(&m.table));
        }
    }

    #[test]
    fn enumeration_examples() {
        // Example 1 has the single-state solution.
        let (env, m) = setup(1);
        match enumerate_coordinators(&env, &m.spec, 1, m.table.len()).unwrap() {
            EnumerationOutcome::Solution(sol) => {
                let a0 = m.table.lookup("a0").unwrap();
                let i = sol.sigma.iter().position(|&x| x == a0).unwrap();
                assert_eq!(sol.output[0], 1 << i);
            }
            other => panic!("expected a solution, got {other:?}"),
        }
        // Examples 2 and 5 exhaust at two states.
        for k in [2, 5] {
            let (env, m) = setup(k);
            match enumerate_coordinators(&env, &m.spec, 2, m.table.len()).unwrap() {
                EnumerationOutcome::Exhausted(2) => {}
                other => panic!("example {k}: expected exhausted(2), got {other:?}"),
            }
        }
        // Cap enforcement.
        let (env, m) = setup(1);
        assert!(enumerate_coordinators(&env, &m.spec, 4, m.table.len()).is_err());
    }

    #[test]
    fn check_invariant_under_renaming() {
        let (env, m) = setup(3);
        let coord = coordinator_offering(&env, &m.table, &["a0"]);
        // Shuffle: add a second state reachable nowhere and swap indices.
        let mut renamed = coord.clone();
        renamed.states = vec!["X".into(), "Y".into()];
        renamed.transitions = coord
            .transitions
            .iter()
            .map(|&(s, a, t)| (1 - s, a, 1 - t))
            .collect();
        renamed.initial = 1;
        let v1 = check(&env, &coord, &m.spec, m.table.len()).unwrap();
        let v2 = check(&env, &renamed, &m.spec, m.table.len()).unwrap();
        assert_eq!(v1.passed(), v2.passed());
    }
}
