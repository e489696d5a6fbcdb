//! Flat CSP processes: labeled transition systems with public and private
//! action alphabets, synchronized composition, and trace simulation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

/// Index into the model's global action table.
pub type ActionId = usize;
/// Index into a process's state vector.
pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub id: ActionId,
    pub name: String,
}

/// Interned action names, shared by every process and formula of one model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionTable {
    names: Vec<String>,
    index: BTreeMap<String, ActionId>,
}

impl ActionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> ActionId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<ActionId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ActionId) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ActionId> {
        0..self.names.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CspError {
    #[error("sync action `{0}` is not a common public action of both operands")]
    BadSyncAction(String),
    #[error("network has no agents")]
    EmptyNetwork,
    #[error("process has private actions; expected none")]
    PrivateActionsPresent,
    #[error("process is nondeterministic; expected deterministic")]
    Nondeterministic,
}

/// A finite labeled transition system with disjoint public (`Σ`) and private
/// (`Γ`) alphabets. `STOP` is any state without outgoing transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub states: Vec<String>,
    pub initial: StateId,
    pub public: BTreeSet<ActionId>,
    pub private: BTreeSet<ActionId>,
    pub transitions: BTreeSet<(StateId, ActionId, StateId)>,
}

impl Process {
    pub fn new(states: Vec<String>, initial: StateId) -> Self {
        Process {
            states,
            initial,
            public: BTreeSet::new(),
            private: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> BTreeSet<ActionId> {
        self.public.union(&self.private).copied().collect()
    }

    pub fn successors(&self, s: StateId, a: ActionId) -> Vec<StateId> {
        self.transitions
            .range((s, a, 0)..=(s, a, usize::MAX))
            .map(|&(_, _, t)| t)
            .collect()
    }

    pub fn outgoing(&self, s: StateId) -> Vec<(ActionId, StateId)> {
        self.transitions
            .range((s, 0, 0)..=(s, usize::MAX, usize::MAX))
            .map(|&(_, a, t)| (a, t))
            .collect()
    }

    /// Public actions with a direct outgoing transition at `s`. The
    /// private-closure variant lives with the specification-automaton
    /// relations.
    pub fn enabled_public(&self, s: StateId) -> BTreeSet<ActionId> {
        self.outgoing(s)
            .into_iter()
            .filter(|(a, _)| self.public.contains(a))
            .map(|(a, _)| a)
            .collect()
    }

    pub fn has_private_transition(&self, s: StateId) -> bool {
        self.outgoing(s).iter().any(|(a, _)| self.private.contains(a))
    }

    /// All states reachable from the initial state by executions whose trace
    /// equals `t` exactly. Empty when no execution matches.
    pub fn simulate(&self, t: &[ActionId]) -> BTreeSet<StateId> {
        let mut current: BTreeSet<StateId> = BTreeSet::new();
        current.insert(self.initial);
        for &a in t {
            let mut next = BTreeSet::new();
            for &s in &current {
                for t in self.successors(s, a) {
                    next.insert(t);
                }
            }
            current = next;
            if current.is_empty() {
                break;
            }
        }
        current
    }

    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        for &(s, a, _) in &self.transitions {
            if !seen.insert((s, a)) {
                return false;
            }
        }
        true
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.initial);
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            for (_, t) in self.outgoing(s) {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Equational rendering using the process's own state names; states named
    /// `STOP` are referenced, not defined.
    pub fn to_named_equations(&self, table: &ActionTable) -> String {
        let mut out = String::new();
        let mut order: Vec<StateId> = vec![self.initial];
        order.extend((0..self.states.len()).filter(|&s| s != self.initial));
        for s in order {
            if self.states[s] == "STOP" {
                continue;
            }
            let branches: Vec<String> = self
                .outgoing(s)
                .into_iter()
                .map(|(a, t)| format!("{} -> {}", table.name(a), self.states[t]))
                .collect();
            let rhs = if branches.is_empty() {
                "STOP".to_string()
            } else {
                branches.join(" | ")
            };
            out.push_str(&format!("process {} = {};\n", self.states[s], rhs));
        }
        out
    }

    /// Equational rendering in the model grammar, e.g. `process M = a0 -> M;`.
    pub fn to_equations(&self, table: &ActionTable, base_name: &str) -> String {
        let name_of = |s: StateId| {
            if s == self.initial {
                base_name.to_string()
            } else if s < self.initial {
                format!("{}{}", base_name, s + 1)
            } else {
                format!("{}{}", base_name, s)
            }
        };
        let mut out = String::new();
        let mut order: Vec<StateId> = vec![self.initial];
        order.extend((0..self.states.len()).filter(|&s| s != self.initial));
        for s in order {
            let branches: Vec<String> = self
                .outgoing(s)
                .into_iter()
                .map(|(a, t)| format!("{} -> {}", table.name(a), name_of(t)))
                .collect();
            let rhs = if branches.is_empty() {
                "STOP".to_string()
            } else {
                branches.join(" | ")
            };
            out.push_str(&format!("process {} = {};\n", name_of(s), rhs));
        }
        out
    }
}

/// An agent network prior to flattening. `sync_sets[i]` is the action set
/// synchronized when composing the fold-so-far with `agents[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub agents: Vec<Process>,
    pub sync_sets: Vec<BTreeSet<ActionId>>,
}

/// A finite word or an ultimately periodic word split as prefix + loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub prefix: Vec<ActionId>,
    pub lasso: Option<Vec<ActionId>>,
}

impl Trace {
    pub fn finite(prefix: Vec<ActionId>) -> Self {
        Trace { prefix, lasso: None }
    }

    pub fn lasso(prefix: Vec<ActionId>, loop_part: Vec<ActionId>) -> Self {
        assert!(!loop_part.is_empty(), "lasso loop must be non-empty");
        Trace { prefix, lasso: Some(loop_part) }
    }

    pub fn render(&self, table: &ActionTable) -> String {
        let names = |v: &[ActionId]| {
            v.iter().map(|&a| table.name(a).to_string()).collect::<Vec<_>>().join(" ")
        };
        match &self.lasso {
            None => names(&self.prefix),
            Some(l) => format!("{} ; ( {} )^w", names(&self.prefix), names(l)),
        }
    }
}

/// The temporal specification: `safety_complement` is a finite-word automaton
/// for the complement of the safety set, `liveness` constrains infinite fair
/// computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecPair {
    pub safety_complement: crate::automata::FiniteNfa,
    pub liveness: crate::ltl::Formula,
}

/// Synchronized product of two processes relative to sync set `x`.
///
/// Public alphabet of the result is `(Σ_P ∪ Σ_Q) \ x`, private is
/// `Γ_P ∪ Γ_Q ∪ x`. Only states reachable from the initial pair are kept,
/// renumbered densely in BFS order.
pub fn compose_pair(
    p: &Process,
    q: &Process,
    x: &BTreeSet<ActionId>,
    table: &ActionTable,
) -> Result<Process, CspError> {
    for &a in x {
        if !p.public.contains(&a) || !q.public.contains(&a) {
            return Err(CspError::BadSyncAction(table.name(a).to_string()));
        }
    }
    let mut ids: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut queue = VecDeque::new();
    let mut transitions = BTreeSet::new();

    let intern = |s: StateId, t: StateId, names: &mut Vec<String>,
                      queue: &mut VecDeque<(StateId, StateId)>,
                      ids: &mut BTreeMap<(StateId, StateId), StateId>| {
        *ids.entry((s, t)).or_insert_with(|| {
            let id = names.len();
            names.push(format!("({},{})", p.states[s], q.states[t]));
            queue.push_back((s, t));
            id
        })
    };

    let init = intern(p.initial, q.initial, &mut names, &mut queue, &mut ids);
    while let Some((s, t)) = queue.pop_front() {
        let src = ids[&(s, t)];
        for (a, s2) in p.outgoing(s) {
            if x.contains(&a) {
                for t2 in q.successors(t, a) {
                    let dst = intern(s2, t2, &mut names, &mut queue, &mut ids);
                    transitions.insert((src, a, dst));
                }
            } else {
                let dst = intern(s2, t, &mut names, &mut queue, &mut ids);
                transitions.insert((src, a, dst));
            }
        }
        for (a, t2) in q.outgoing(t) {
            if !x.contains(&a) {
                let dst = intern(s, t2, &mut names, &mut queue, &mut ids);
                transitions.insert((src, a, dst));
            }
        }
    }

    let mut public: BTreeSet<ActionId> = p.public.union(&q.public).copied().collect();
    for a in x {
        public.remove(a);
    }
    let mut private: BTreeSet<ActionId> = p.private.union(&q.private).copied().collect();
    private.extend(x.iter().copied());

    Ok(Process { states: names, initial: init, public, private, transitions })
}

/// Left fold of `compose_pair` over the network's agents. Action names are
/// preserved, so the specification can still reference actions that became
/// private.
pub fn flatten_network(n: &Network, table: &ActionTable) -> Result<Process, CspError> {
    let mut agents = n.agents.iter();
    let mut acc = agents.next().ok_or(CspError::EmptyNetwork)?.clone();
    for (i, agent) in agents.enumerate() {
        acc = compose_pair(&acc, agent, &n.sync_sets[i], table)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen;

    fn ex(k: usize) -> (Process, ActionTable) {
        let m = benchgen::example(k).unwrap();
        let e = flatten_network(&m.network, &m.table).unwrap();
        (e, m.table)
    }

    #[test]
    fn example1_shape() {
        let (e, table) = ex(1);
        assert_eq!(e.num_states(), 3);
        let sigma: Vec<&str> = e.public.iter().map(|&a| table.name(a)).collect();
        assert_eq!(sigma, vec!["a0", "a1"]);
        let gamma: Vec<&str> = e.private.iter().map(|&a| table.name(a)).collect();
        assert_eq!(gamma, vec!["b"]);
    }

    #[test]
    fn stop_state_has_no_transitions() {
        let (e, table) = ex(0);
        let a1 = table.lookup("a1").unwrap();
        let stops = e.simulate(&[a1]);
        assert_eq!(stops.len(), 1);
        let stop = *stops.iter().next().unwrap();
        assert!(e.outgoing(stop).is_empty());
    }

    #[test]
    fn enabled_public_examples() {
        // Example 4 state E1 enables only a1.
        let (e4, t4) = ex(4);
        let a0 = t4.lookup("a0").unwrap();
        let a1 = t4.lookup("a1").unwrap();
        let after = e4.simulate(&[a0]);
        assert_eq!(after.len(), 2);
        let mut enabled_sets: Vec<BTreeSet<ActionId>> =
            after.iter().map(|&s| e4.enabled_public(s)).collect();
        enabled_sets.sort();
        assert_eq!(enabled_sets[0], [a0].into_iter().collect());
        assert_eq!(enabled_sets[1], [a1].into_iter().collect());

        // Example 1 state E1 has only the private b.
        let (e1, t1) = ex(1);
        let a1 = t1.lookup("a1").unwrap();
        let e1_state = e1.simulate(&[a1]);
        let s = *e1_state.iter().next().unwrap();
        assert!(e1.enabled_public(s).is_empty());
        assert!(e1.has_private_transition(s));
    }

    #[test]
    fn simulate_examples() {
        let (e4, t4) = ex(4);
        let a0 = t4.lookup("a0").unwrap();
        assert_eq!(e4.simulate(&[a0]).len(), 2);
        assert_eq!(e4.simulate(&[]), [e4.initial].into_iter().collect());

        // Example 5, trace (a0, b, a0) ends back at the post-a0 state.
        let (e5, t5) = ex(5);
        let a0 = t5.lookup("a0").unwrap();
        let b = t5.lookup("b").unwrap();
        let end = e5.simulate(&[a0, b, a0]);
        assert_eq!(end.len(), 1);
        assert_eq!(end, e5.simulate(&[a0]));
    }

    #[test]
    fn determinism_examples() {
        let (e2, _) = ex(2);
        assert!(!e2.is_deterministic());
        let (e0, _) = ex(0);
        assert!(e0.is_deterministic());
    }

    #[test]
    fn simulate_prefix_closure() {
        let (e3, t3) = ex(3);
        let a0 = t3.lookup("a0").unwrap();
        let b = t3.lookup("b").unwrap();
        let t = [a0, b, b, a0];
        if !e3.simulate(&t).is_empty() {
            for k in 0..t.len() {
                assert!(!e3.simulate(&t[..k]).is_empty());
            }
        }
    }

    #[test]
    fn arbiter3_flatten_is_27_states_no_private() {
        let m = benchgen::arbiter(3).unwrap();
        let (e, table) = (flatten_network(&m.network, &m.table).unwrap(), m.table);
        assert_eq!(e.num_states(), 27);
        assert!(e.private.is_empty());
        assert_eq!(e.public.len(), 9);
    }

    #[test]
    fn thermostat_private_interactions() {
        let m = benchgen::thermostat(1).unwrap();
        let (e, table) = (flatten_network(&m.network, &m.table).unwrap(), m.table);
        let heat = table.lookup("HeatisOn").unwrap();
        let ac = table.lookup("ACisOn").unwrap();
        assert!(e.private.contains(&heat));
        assert!(e.private.contains(&ac));
        assert_eq!(e.public.len(), 7);
    }

    #[test]
    fn single_agent_flatten_is_identity() {
        let m = benchgen::example(1).unwrap();
        let e = flatten_network(&m.network, &m.table).unwrap();
        assert_eq!(e, m.network.agents[0]);
    }

    #[test]
    fn neutral_partner_composition() {
        // Composing with a process that self-loops on all of x yields a
        // process isomorphic to the left operand with x moved to private.
        let m = benchgen::example(1).unwrap();
        let p = &m.network.agents[0];
        let x: BTreeSet<ActionId> = p.public.clone();
        let mut q = Process::new(vec!["N".into()], 0);
        q.public = x.clone();
        for &a in &x {
            q.transitions.insert((0, a, 0));
        }
        let c = compose_pair(p, &q, &x, &m.table).unwrap();
        assert_eq!(c.num_states(), p.num_states());
        assert!(c.public.is_empty());
        assert_eq!(c.transitions.len(), p.transitions.len());
    }

    #[test]
    fn bad_sync_action_rejected() {
        let mut m = benchgen::example(1).unwrap();
        let stray = m.table.intern("zz");
        let p = &m.network.agents[0];
        let x: BTreeSet<ActionId> = [stray].into_iter().collect();
        let q = Process::new(vec!["N".into()], 0);
        assert!(matches!(compose_pair(p, &q, &x, &m.table), Err(CspError::BadSyncAction(_))));
    }
}
