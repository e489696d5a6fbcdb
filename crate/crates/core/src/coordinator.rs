//! Moore machines as CSP coordinators, normalization of candidate
//! coordinators (hiding internal actions, restricting nondeterminism), and
//! the labeled-tree view of deterministic processes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::csp::{ActionId, ActionTable, CspError, Process};
use crate::synth::MooreMachine;

/// Depth-bounded slice of the full labeled tree of a deterministic
/// coordinator: every action string up to the depth maps to the enabled set
/// at the end of the unique matching computation (empty when unreachable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTreePrefix {
    pub sigma: Vec<ActionId>,
    pub depth: usize,
    pub labels: BTreeMap<Vec<ActionId>, BTreeSet<ActionId>>,
}

/// Interpret a Moore machine as a CSP process: a transition `(s, a, t)`
/// exists iff `a` is in the output of `s` and the machine moves to `t`.
/// The result is deterministic with no private actions.
pub fn moore_to_csp(m: &MooreMachine, table: &ActionTable) -> Process {
    let _ = table;
    let names = (0..m.num_states).map(|s| format!("M{s}")).collect();
    let mut p = Process::new(names, m.initial);
    p.public = m.sigma.iter().copied().collect();
    for s in 0..m.num_states {
        for (i, &a) in m.sigma.iter().enumerate() {
            if m.output[s] >> i & 1 == 1 {
                p.transitions.insert((s, a, m.transition[s][i]));
            }
        }
    }
    p
}

/// Remove private actions: `(s, a, t)` is kept iff some path with trace
/// `internal* a internal*` connects `s` to `t`. The result has no private
/// actions over the same state set.
pub fn hide_internal(m: &Process) -> Process {
    let n = m.num_states();
    // Private-closure per state.
    let closure: Vec<BTreeSet<usize>> = (0..n)
        .map(|s| {
            let mut seen: BTreeSet<usize> = [s].into_iter().collect();
            let mut queue: VecDeque<usize> = [s].into_iter().collect();
            while let Some(x) = queue.pop_front() {
                for (a, t) in m.outgoing(x) {
                    if m.private.contains(&a) && seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
            seen
        })
        .collect();
    let mut out = Process::new(m.states.clone(), m.initial);
    out.public = m.public.clone();
    for s in 0..n {
        for &u in &closure[s] {
            for (a, v) in m.outgoing(u) {
                if !m.public.contains(&a) {
                    continue;
                }
                for &t in &closure[v] {
                    out.transitions.insert((s, a, t));
                }
            }
        }
    }
    out
}

/// Remove external nondeterminism by keeping, for each `(state, action)`,
/// only the transition to the smallest successor index. Enabled sets are
/// unchanged.
pub fn restrict_deterministic(m: &Process) -> Result<Process, CspError> {
    if !m.private.is_empty() {
        return Err(CspError::PrivateActionsPresent);
    }
    let mut out = Process::new(m.states.clone(), m.initial);
    out.public = m.public.clone();
    let mut best: BTreeMap<(usize, ActionId), usize> = BTreeMap::new();
    for &(s, a, t) in &m.transitions {
        let e = best.entry((s, a)).or_insert(t);
        if t < *e {
            *e = t;
        }
    }
    for ((s, a), t) in best {
        out.transitions.insert((s, a, t));
    }
    Ok(out)
}

/// Tree labels of a deterministic, internal-action-free process down to
/// `depth`. Unreachable nodes are labeled with the empty set.
pub fn fulltree_prefix(m: &Process, depth: usize) -> Result<LabeledTreePrefix, CspError> {
    if !m.private.is_empty() {
        return Err(CspError::PrivateActionsPresent);
    }
    if !m.is_deterministic() {
        return Err(CspError::Nondeterministic);
    }
    let sigma: Vec<ActionId> = m.public.iter().copied().collect();
    let mut labels = BTreeMap::new();
    // Walk all strings up to depth, tracking the unique reached state.
    let mut frontier: Vec<(Vec<ActionId>, Option<usize>)> = vec![(Vec::new(), Some(m.initial))];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for (path, state) in &frontier {
            let label: BTreeSet<ActionId> = match state {
                Some(s) => m
                    .outgoing(*s)
                    .into_iter()
                    .map(|(a, _)| a)
                    .collect(),
                None => BTreeSet::new(),
            };
            labels.insert(path.clone(), label);
            if path.len() < depth {
                for &a in &sigma {
                    let succ = state.and_then(|s| {
                        let mut it = m.successors(s, a).into_iter();
                        it.next()
                    });
                    let mut p2 = path.clone();
                    p2.push(a);
                    next.push((p2, succ));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(LabeledTreePrefix { sigma, depth, labels })
}

/// Depth-truncated process of a labeled tree prefix: nodes become states,
/// `a`-transitions follow `a ∈ μ(σ)`. Nodes at the depth boundary are
/// returned as the frontier.
pub struct TreeProcess {
    pub process: Process,
    pub frontier: BTreeSet<usize>,
}

pub fn proc_of_tree(t: &LabeledTreePrefix, table: &ActionTable) -> TreeProcess {
    let mut ids: BTreeMap<Vec<ActionId>, usize> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut order: Vec<Vec<ActionId>> = t.labels.keys().cloned().collect();
    order.sort_by_key(|k| (k.len(), k.clone()));
    for path in &order {
        let name = if path.is_empty() {
            "T".to_string()
        } else {
            format!(
                "T_{}",
                path.iter().map(|&a| table.name(a).to_string()).collect::<Vec<_>>().join("_")
            )
        };
        ids.insert(path.clone(), names.len());
        names.push(name);
    }
    let mut p = Process::new(names, ids[&Vec::new()]);
    p.public = t.sigma.iter().copied().collect();
    let mut frontier = BTreeSet::new();
    for path in &order {
        let src = ids[path];
        if path.len() == t.depth {
            frontier.insert(src);
            continue;
        }
        for &a in t.labels[path].iter() {
            let mut p2 = path.clone();
            p2.push(a);
            if let Some(&dst) = ids.get(&p2) {
                p.transitions.insert((src, a, dst));
            }
        }
    }
    TreeProcess { process: p, frontier }
}

/// Depth-bounded bisimilarity by partition refinement truncated at `d`
/// rounds: initial states must remain related after `d` refinements of the
/// all-pairs relation.
pub fn bisimilar_to_depth(p: &Process, q: &Process, d: usize) -> bool {
    let np = p.num_states();
    let nq = q.num_states();
    let mut rel = vec![vec![true; nq]; np];
    let alphabet: BTreeSet<ActionId> = p.alphabet().union(&q.alphabet()).copied().collect();
    for _ in 0..d {
        let mut next = rel.clone();
        let mut changed = false;
        for s in 0..np {
            for t in 0..nq {
                if !rel[s][t] {
                    continue;
                }
                let ok = alphabet.iter().all(|&a| {
                    let ps = p.successors(s, a);
                    let qs = q.successors(t, a);
                    ps.iter().all(|&s2| qs.iter().any(|&t2| rel[s2][t2]))
                        && qs.iter().all(|&t2| ps.iter().any(|&s2| rel[s2][t2]))
                });
                if !ok {
                    next[s][t] = false;
                    changed = true;
                }
            }
        }
        rel = next;
        if !changed {
            break;
        }
    }
    rel[p.initial][q.initial]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::MooreMachine;

    fn table2() -> ActionTable {
        let mut t = ActionTable::new();
        t.intern("a0");
        t.intern("a1");
        t
    }

    fn one_state_machine(table: &ActionTable, offers: &[&str]) -> MooreMachine {
        let sigma: Vec<ActionId> = table.ids().collect();
        let mut output = 0u64;
        for o in offers {
            let a = table.lookup(o).unwrap();
            let i = sigma.iter().position(|&x| x == a).unwrap();
            output |= 1 << i;
        }
        MooreMachine {
            num_states: 1,
            initial: 0,
            sigma,
            output: vec![output],
            transition: vec![vec![0; table.len()]],
        }
    }

    #[test]
    fn moore_to_csp_examples() {
        let t = table2();
        let m = one_state_machine(&t, &["a0"]);
        let p = moore_to_csp(&m, &t);
        assert_eq!(p.num_states(), 1);
        assert!(p.is_deterministic());
        let a0 = t.lookup("a0").unwrap();
        assert_eq!(p.transitions, [(0, a0, 0)].into_iter().collect());

        let stop = one_state_machine(&t, &[]);
        let p = moore_to_csp(&stop, &t);
        assert!(p.transitions.is_empty());
    }

    #[test]
    fn hide_internal_examples() {
        let mut t = ActionTable::new();
        let a = t.intern("a");
        let tau = t.intern("tau");
        // No private actions: unchanged.
        let mut p = Process::new(vec!["A".into(), "B".into()], 0);
        p.public = [a].into_iter().collect();
        p.transitions.insert((0, a, 1));
        assert_eq!(hide_internal(&p), p);

        // s -tau-> u -a-> t collapses to a direct step.
        let mut q = Process::new(vec!["S".into(), "U".into(), "T".into()], 0);
        q.public = [a].into_iter().collect();
        q.private = [tau].into_iter().collect();
        q.transitions.insert((0, tau, 1));
        q.transitions.insert((1, a, 2));
        let h = hide_internal(&q);
        assert!(h.transitions.contains(&(0, a, 2)));
        assert!(h.private.is_empty());

        // A tau-cycle before a still yields exactly one (s, a, t) edge.
        let mut c = Process::new(vec!["S".into(), "U".into(), "T".into()], 0);
        c.public = [a].into_iter().collect();
        c.private = [tau].into_iter().collect();
        c.transitions.insert((0, tau, 1));
        c.transitions.insert((1, tau, 0));
        c.transitions.insert((1, a, 2));
        let h = hide_internal(&c);
        let a_edges: Vec<_> = h
            .transitions
            .iter()
            .filter(|&&(s, x, _)| s == 0 && x == a)
            .collect();
        assert_eq!(a_edges.len(), 1);
        assert_eq!(*a_edges[0], (0, a, 2));
    }

    #[test]
    fn hide_internal_preserves_projected_traces() {
        // Oracle: explicit path enumeration to depth 5.
        let m = crate::benchgen::example(5).unwrap();
        let e = crate::csp::flatten_network(&m.network, &m.table).unwrap();
        let h = hide_internal(&e);
        let sigma: Vec<ActionId> = e.public.iter().copied().collect();
        fn traces(p: &Process, depth: usize, project: &BTreeSet<ActionId>) -> BTreeSet<Vec<ActionId>> {
            let mut out = BTreeSet::new();
            let mut stack = vec![(p.initial, Vec::new(), 0usize)];
            while let Some((s, tr, len)) = stack.pop() {
                out.insert(tr.clone());
                if len == depth {
                    continue;
                }
                for (a, t) in p.outgoing(s) {
                    let mut tr2 = tr.clone();
                    if project.contains(&a) {
                        tr2.push(a);
                    }
                    stack.push((t, tr2, len + 1));
                }
            }
            out
        }
        let proj: BTreeSet<ActionId> = sigma.iter().copied().collect();
        // Projected traces of the original up to depth 5 appear in the
        // hidden version (whose every step is public).
        let t_orig = traces(&e, 5, &proj);
        let t_hidden = traces(&h, 5, &proj);
        for tr in t_orig {
            if tr.len() <= 2 {
                assert!(t_hidden.contains(&tr), "missing projected trace {tr:?}");
            }
        }
    }

    #[test]
    fn restrict_deterministic_examples() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        // Already deterministic: unchanged.
        let mut p = Process::new(vec!["A".into(), "B".into()], 0);
        p.public = [a0].into_iter().collect();
        p.transitions.insert((0, a0, 1));
        assert_eq!(restrict_deterministic(&p).unwrap(), p);

        // Tie-break keeps the smallest target.
        let mut q = Process::new(vec!["S".into(), "T1".into(), "T2".into()], 0);
        q.public = [a0].into_iter().collect();
        q.transitions.insert((0, a0, 1));
        q.transitions.insert((0, a0, 2));
        let r = restrict_deterministic(&q).unwrap();
        assert_eq!(r.transitions, [(0, a0, 1)].into_iter().collect());
        // Enabled sets preserved per state.
        for s in 0..q.num_states() {
            assert_eq!(q.enabled_public(s), r.enabled_public(s));
        }

        // Private actions are rejected.
        let mut bad = Process::new(vec!["A".into()], 0);
        bad.private = [a0].into_iter().collect();
        assert!(restrict_deterministic(&bad).is_err());
    }

    #[test]
    fn fulltree_examples() {
        let t = table2();
        let m = one_state_machine(&t, &["a0"]);
        let p = moore_to_csp(&m, &t);
        let tree = fulltree_prefix(&p, 1).unwrap();
        let a0 = t.lookup("a0").unwrap();
        let a1 = t.lookup("a1").unwrap();
        let l = |path: &[ActionId]| tree.labels[&path.to_vec()].clone();
        assert_eq!(l(&[]), [a0].into_iter().collect());
        assert_eq!(l(&[a0]), [a0].into_iter().collect());
        assert_eq!(l(&[a1]), BTreeSet::new());

        let stop = moore_to_csp(&one_state_machine(&t, &[]), &t);
        let tree = fulltree_prefix(&stop, 2).unwrap();
        assert!(tree.labels.values().all(|s| s.is_empty()));
    }

    #[test]
    fn proc_of_tree_examples() {
        let t = table2();
        let m = one_state_machine(&t, &["a0"]);
        let p = moore_to_csp(&m, &t);
        let tree = fulltree_prefix(&p, 3).unwrap();
        let tp = proc_of_tree(&tree, &t);
        // Chain of 4 nodes each enabling a0 (the reachable spine).
        let a0 = t.lookup("a0").unwrap();
        let mut s = tp.process.initial;
        for _ in 0..3 {
            let succ = tp.process.successors(s, a0);
            assert_eq!(succ.len(), 1);
            s = succ[0];
        }
        assert!(tp.frontier.contains(&s));

        // The all-empty tree is a single STOP-like root.
        let stop = moore_to_csp(&one_state_machine(&t, &[]), &t);
        let tree = fulltree_prefix(&stop, 2).unwrap();
        let tp = proc_of_tree(&tree, &t);
        assert!(tp.process.outgoing(tp.process.initial).is_empty());
    }

    #[test]
    fn tree_roundtrip_bisimilar() {
        let t = table2();
        for offers in [vec!["a0"], vec!["a0", "a1"], vec![]] {
            let m = one_state_machine(&t, &offers);
            let p = moore_to_csp(&m, &t);
            for d in 1..=4 {
                let tree = fulltree_prefix(&p, d).unwrap();
                let tp = proc_of_tree(&tree, &t);
                assert!(bisimilar_to_depth(&tp.process, &p, d), "offers {offers:?} depth {d}");
            }
        }
    }

    #[test]
    fn moore_labels_match_outputs() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let a1 = t.lookup("a1").unwrap();
        // Two states: offer {a0} then {a0, a1}.
        let m = MooreMachine {
            num_states: 2,
            initial: 0,
            sigma: vec![a0, a1],
            output: vec![0b01, 0b11],
            transition: vec![vec![1, 0], vec![1, 1]],
        };
        let p = moore_to_csp(&m, &t);
        let tree = fulltree_prefix(&p, 2).unwrap();
        // Along reachable strings the label equals the output of the state.
        assert_eq!(tree.labels[&vec![]], [a0].into_iter().collect());
        assert_eq!(tree.labels[&vec![a0]], [a0, a1].into_iter().collect());
        assert_eq!(tree.labels[&vec![a1]], BTreeSet::new());
        assert_eq!(tree.labels[&vec![a0, a1]], [a0, a1].into_iter().collect());
    }
}
