//! Büchi, universal co-Büchi, and finite-word automata with the basic
//! transformations the synthesis pipeline needs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Display;

use thiserror::Error;

use crate::csp::ActionId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomataError {
    #[error("lasso loop is empty")]
    EmptyLoop,
    #[error("serialization parse error on line {0}: {1}")]
    Parse(usize, String),
}

/// Letters an automaton can read. Action letters cover `Σ ∪ Γ`; the
/// specification automaton's composite letters live in `specauto`.
pub trait Letter: Clone + Ord + Display {}
impl<T: Clone + Ord + Display> Letter for T {}

/// Nondeterministic Büchi automaton: a run accepts iff a green state appears
/// on it infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba<L> {
    pub num_states: usize,
    pub initial: BTreeSet<usize>,
    pub transitions: Vec<(usize, L, usize)>,
    pub greens: BTreeSet<usize>,
}

/// Universal co-Büchi automaton: same structure as an NBA; a word is accepted
/// iff every run visits green states only finitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ucw<L>(pub Nba<L>);

/// NBA with a green bit per transition in addition to green states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGreenNba<L> {
    pub num_states: usize,
    pub initial: BTreeSet<usize>,
    pub transitions: Vec<(usize, L, usize, bool)>,
    pub greens: BTreeSet<usize>,
}

/// Finite-word NFA; houses the automaton for the complement of the safety
/// property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteNfa {
    pub num_states: usize,
    pub initial: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, ActionId, usize)>,
    pub accepting: BTreeSet<usize>,
}

impl<L: Letter> Nba<L> {
    pub fn new(num_states: usize) -> Self {
        Nba {
            num_states,
            initial: BTreeSet::new(),
            transitions: Vec::new(),
            greens: BTreeSet::new(),
        }
    }

    pub fn successors<'a>(&'a self, s: usize, l: &'a L) -> impl Iterator<Item = usize> + 'a {
        self.transitions
            .iter()
            .filter(move |(src, letter, _)| *src == s && letter == l)
            .map(|&(_, _, t)| t)
    }

    /// Reinterpret as a universal co-Büchi automaton; the language becomes
    /// the complement.
    pub fn as_ucw(&self) -> Ucw<L> {
        Ucw(self.clone())
    }

    /// Remove states unreachable from the initial set or unable to reach a
    /// cycle through a green state. Language preserved.
    pub fn prune(&self) -> Nba<L> {
        let fwd = self.reachable_forward();
        let live = self.green_cycle_coreachable(&fwd);
        self.restrict(&live)
    }

    fn reachable_forward(&self) -> BTreeSet<usize> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for &(s, _, t) in &self.transitions {
            adj[s].push(t);
        }
        let mut seen: BTreeSet<usize> = self.initial.clone();
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &t in &adj[s] {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States (within `within`) from which some cycle containing a green
    /// state is reachable.
    fn green_cycle_coreachable(&self, within: &BTreeSet<usize>) -> BTreeSet<usize> {
        let edges: Vec<(usize, usize)> = self
            .transitions
            .iter()
            .filter(|(s, _, t)| within.contains(s) && within.contains(t))
            .map(|&(s, _, t)| (s, t))
            .collect();
        let sccs = tarjan_sccs(self.num_states, &edges);
        // A green-cyclic SCC has a green member and an internal edge.
        let mut scc_of = vec![usize::MAX; self.num_states];
        for (i, scc) in sccs.iter().enumerate() {
            for &s in scc {
                scc_of[s] = i;
            }
        }
        let mut cyclic = vec![false; sccs.len()];
        for &(s, t) in &edges {
            if scc_of[s] == scc_of[t] && scc_of[s] != usize::MAX {
                cyclic[scc_of[s]] = true;
            }
        }
        let mut target = vec![false; sccs.len()];
        for (i, scc) in sccs.iter().enumerate() {
            if cyclic[i] && scc.iter().any(|s| self.greens.contains(s)) {
                target[i] = true;
            }
        }
        // Backward closure over the edge relation.
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for &(s, t) in &edges {
            rev[t].push(s);
        }
        let mut live: BTreeSet<usize> = BTreeSet::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (i, scc) in sccs.iter().enumerate() {
            if target[i] {
                for &s in scc {
                    if live.insert(s) {
                        queue.push_back(s);
                    }
                }
            }
        }
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s] {
                if live.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        live.intersection(within).copied().collect()
    }

    fn restrict(&self, keep: &BTreeSet<usize>) -> Nba<L> {
        let remap: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Nba {
            num_states: keep.len(),
            initial: self.initial.iter().filter_map(|s| remap.get(s).copied()).collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|(s, _, t)| keep.contains(s) && keep.contains(t))
                .map(|(s, l, t)| (remap[s], l.clone(), remap[t]))
                .collect(),
            greens: self.greens.iter().filter_map(|s| remap.get(s).copied()).collect(),
        }
    }

    /// Remove only unreachable states. Safe on a structure reinterpreted as a
    /// universal automaton, where dropping rejecting sinks would change the
    /// language.
    pub fn prune_unreachable(&self) -> Nba<L> {
        let fwd = self.reachable_forward();
        self.restrict(&fwd)
    }
}

impl<L: Letter> Ucw<L> {
    pub fn prune(&self) -> Ucw<L> {
        Ucw(self.0.prune_unreachable())
    }
}

impl FiniteNfa {
    pub fn universal(num_letters: usize) -> FiniteNfa {
        let mut transitions = BTreeSet::new();
        for a in 0..num_letters {
            transitions.insert((0, a, 0));
        }
        FiniteNfa {
            num_states: 1,
            initial: [0].into_iter().collect(),
            transitions,
            accepting: [0].into_iter().collect(),
        }
    }

    /// Complete non-accepting structure: rejects every finite word.
    pub fn empty(num_letters: usize) -> FiniteNfa {
        let mut nfa = FiniteNfa::universal(num_letters);
        nfa.accepting.clear();
        nfa
    }

    pub fn successors(&self, s: usize, a: ActionId) -> Vec<usize> {
        self.transitions
            .range((s, a, 0)..=(s, a, usize::MAX))
            .map(|&(_, _, t)| t)
            .collect()
    }

    /// Standard membership by subset simulation.
    pub fn runs_word(&self, w: &[ActionId]) -> bool {
        let mut current: BTreeSet<usize> = self.initial.clone();
        for &a in w {
            let mut next = BTreeSet::new();
            for &s in &current {
                next.extend(self.successors(s, a));
            }
            current = next;
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|s| self.accepting.contains(s))
    }

    /// Whether every transition on every listed letter exists at every state.
    pub fn is_complete(&self, letters: &[ActionId]) -> bool {
        (0..self.num_states)
            .all(|s| letters.iter().all(|&a| !self.successors(s, a).is_empty()))
    }

    /// Add a non-accepting sink so that runs never die. The accepted language
    /// is unchanged; the joint specification-automaton construction needs
    /// live runs on every extension.
    pub fn completed(&self, letters: &[ActionId]) -> FiniteNfa {
        if self.is_complete(letters) {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.num_states;
        out.num_states += 1;
        for s in 0..out.num_states {
            for &a in letters {
                if out.successors(s, a).is_empty() {
                    out.transitions.insert((s, a, sink));
                }
            }
        }
        if out.initial.is_empty() {
            out.initial.insert(sink);
        }
        out
    }

    pub fn prune_unreachable(&self) -> FiniteNfa {
        let mut seen = self.initial.clone();
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &(src, _, t) in self.transitions.range((s, 0, 0)..=(s, usize::MAX, usize::MAX)) {
                debug_assert_eq!(src, s);
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        let remap: BTreeMap<usize, usize> =
            seen.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        FiniteNfa {
            num_states: seen.len(),
            initial: self.initial.iter().filter_map(|s| remap.get(s).copied()).collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|(s, _, t)| seen.contains(s) && seen.contains(t))
                .map(|&(s, a, t)| (remap[&s], a, remap[&t]))
                .collect(),
            accepting: self.accepting.iter().filter_map(|s| remap.get(s).copied()).collect(),
        }
    }
}

impl<L: Letter> EdgeGreenNba<L> {
    pub fn new(num_states: usize) -> Self {
        EdgeGreenNba {
            num_states,
            initial: BTreeSet::new(),
            transitions: Vec::new(),
            greens: BTreeSet::new(),
        }
    }

    /// Fold green edges into green states by doubling the state space:
    /// `(s, flag)` pairs where a green edge targets the flagged copy. Greens
    /// of the result are all flagged copies plus copies of originally-green
    /// states. Over the letter projection, acceptance means "a green edge or
    /// a green state recurs".
    pub fn green_edges_to_states(&self) -> Nba<L> {
        let id = |s: usize, flag: bool| s * 2 + flag as usize;
        let mut out = Nba::new(self.num_states * 2);
        out.initial = self.initial.iter().map(|&s| id(s, false)).collect();
        for &(s, ref l, t, g) in &self.transitions {
            for flag in [false, true] {
                out.transitions.push((id(s, flag), l.clone(), id(t, g)));
            }
        }
        for s in 0..self.num_states {
            out.greens.insert(id(s, true));
            if self.greens.contains(&s) {
                out.greens.insert(id(s, false));
                out.greens.insert(id(s, true));
            }
        }
        out.prune_unreachable()
    }

    /// Direct acceptance over the edge-green structure, as an oracle for the
    /// state conversion: some run takes green edges or visits green states
    /// infinitely often.
    pub fn accepts_lasso(&self, prefix: &[L], loop_part: &[L]) -> Result<bool, AutomataError> {
        if loop_part.is_empty() {
            return Err(AutomataError::EmptyLoop);
        }
        // Product positions: lasso index × state; edge carries greenness.
        let p = prefix.len();
        let n = p + loop_part.len();
        let letter = |i: usize| -> &L {
            if i < p {
                &prefix[i]
            } else {
                &loop_part[i - p]
            }
        };
        let next = |i: usize| if i + 1 < n { i + 1 } else { p };
        let node = |i: usize, s: usize| i * self.num_states + s;
        let mut edges: Vec<(usize, usize, bool)> = Vec::new();
        for i in 0..n {
            for &(s, ref l, t, g) in &self.transitions {
                if l == letter(i) {
                    let green = g || self.greens.contains(&t);
                    edges.push((node(i, s), node(next(i), t), green));
                }
            }
        }
        let starts: Vec<usize> = self.initial.iter().map(|&s| node(0, s)).collect();
        has_green_cycle_reachable(n * self.num_states, &edges, &starts)
    }
}

/// True iff some run of the NBA over `prefix·loop^ω` visits a green state
/// infinitely often.
pub fn nba_accepts_lasso<L: Letter>(
    a: &Nba<L>,
    prefix: &[L],
    loop_part: &[L],
) -> Result<bool, AutomataError> {
    if loop_part.is_empty() {
        return Err(AutomataError::EmptyLoop);
    }
    let p = prefix.len();
    let n = p + loop_part.len();
    let letter = |i: usize| -> &L {
        if i < p {
            &prefix[i]
        } else {
            &loop_part[i - p]
        }
    };
    let next = |i: usize| if i + 1 < n { i + 1 } else { p };
    let node = |i: usize, s: usize| i * a.num_states + s;
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..n {
        for &(s, ref l, t) in &a.transitions {
            if l == letter(i) {
                edges.push((node(i, s), node(next(i), t), a.greens.contains(&t)));
            }
        }
    }
    // Greenness is decided on targets; a green initial state recurs only if
    // revisited, which the target marking covers.
    let starts: Vec<usize> = a.initial.iter().map(|&s| node(0, s)).collect();
    has_green_cycle_reachable(n * a.num_states, &edges, &starts)
}

pub fn ucw_accepts_lasso<L: Letter>(
    u: &Ucw<L>,
    prefix: &[L],
    loop_part: &[L],
) -> Result<bool, AutomataError> {
    Ok(!nba_accepts_lasso(&u.0, prefix, loop_part)?)
}

/// Reachable cycle containing a green edge, via SCC decomposition.
fn has_green_cycle_reachable(
    num_nodes: usize,
    edges: &[(usize, usize, bool)],
    starts: &[usize],
) -> Result<bool, AutomataError> {
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); num_nodes];
    for &(s, t, g) in edges {
        adj[s].push((t, g));
    }
    let mut seen = vec![false; num_nodes];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &(t, _) in &adj[s] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    let reach_edges: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(s, t, _)| seen[s] && seen[t])
        .map(|&(s, t, _)| (s, t))
        .collect();
    let sccs = tarjan_sccs(num_nodes, &reach_edges);
    let mut scc_of = vec![usize::MAX; num_nodes];
    for (i, scc) in sccs.iter().enumerate() {
        for &s in scc {
            scc_of[s] = i;
        }
    }
    for &(s, t, g) in edges {
        if g && seen[s] && seen[t] && scc_of[s] == scc_of[t] && scc_of[s] != usize::MAX {
            // Green edge inside an SCC: a cycle through it exists.
            return Ok(true);
        }
    }
    Ok(false)
}

/// Iterative Tarjan over an explicit edge list. Singleton SCCs without
/// self-loops are still reported (callers filter for cyclicity).
pub fn tarjan_sccs(num_nodes: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for &(s, t) in edges {
        adj[s].push(t);
    }
    let mut index = vec![usize::MAX; num_nodes];
    let mut lowlink = vec![0usize; num_nodes];
    let mut on_stack = vec![false; num_nodes];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    enum Frame {
        Enter(usize),
        Resume(usize, usize),
    }

    for root in 0..num_nodes {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![Frame::Enter(root)];
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(v) => {
                    index[v] = next_index;
                    lowlink[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    work.push(Frame::Resume(v, 0));
                }
                Frame::Resume(v, mut i) => {
                    let mut descended = false;
                    while i < adj[v].len() {
                        let w = adj[v][i];
                        i += 1;
                        if index[w] == usize::MAX {
                            work.push(Frame::Resume(v, i));
                            work.push(Frame::Enter(w));
                            descended = true;
                            break;
                        } else if on_stack[w] {
                            lowlink[v] = lowlink[v].min(index[w]);
                        }
                    }
                    if descended {
                        continue;
                    }
                    if lowlink[v] == index[v] {
                        let mut scc = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            scc.push(w);
                            if w == v {
                                break;
                            }
                        }
                        scc.sort();
                        sccs.push(scc);
                    }
                    // Propagate lowlink to parent.
                    if let Some(Frame::Resume(p, _)) = work.last() {
                        let p = *p;
                        lowlink[p] = lowlink[p].min(lowlink[v]);
                    }
                }
            }
        }
    }
    sccs
}

/// Batch acceptance checks for one automaton against many lassos, used by
/// the exhaustive agreement suites. States are packed into 128-bit rows;
/// automata beyond 128 states fall back to the graph-based check.
pub struct LassoAcceptor<'a, L: Letter> {
    nba: &'a Nba<L>,
    /// delta[letter index][state] = successor bitset.
    letters: Vec<L>,
    delta: Vec<Vec<u128>>,
    green_mask: u128,
    initial_mask: u128,
}

impl<'a, L: Letter> LassoAcceptor<'a, L> {
    pub fn new(nba: &'a Nba<L>) -> Option<Self> {
        if nba.num_states > 128 {
            return None;
        }
        let mut letters: Vec<L> = nba.transitions.iter().map(|(_, l, _)| l.clone()).collect();
        letters.sort();
        letters.dedup();
        let mut delta = vec![vec![0u128; nba.num_states]; letters.len()];
        for (s, l, t) in &nba.transitions {
            let li = letters.binary_search(l).unwrap();
            delta[li][*s] |= 1 << t;
        }
        let mut green_mask = 0u128;
        for &g in &nba.greens {
            green_mask |= 1 << g;
        }
        let mut initial_mask = 0u128;
        for &i in &nba.initial {
            initial_mask |= 1 << i;
        }
        Some(LassoAcceptor { nba, letters, delta, green_mask, initial_mask })
    }

    fn letter_index(&self, l: &L) -> Option<usize> {
        self.letters.binary_search(l).ok()
    }

    /// States from which reading the loop forever yields a green-recurrent
    /// run, as a bitset.
    pub fn loop_accepting(&self, loop_part: &[L]) -> Result<u128, AutomataError> {
        if loop_part.is_empty() {
            return Err(AutomataError::EmptyLoop);
        }
        let n = self.nba.num_states;
        // One full pass of the loop: reach sets split by green-seen.
        let mut pass_nog: Vec<u128> = (0..n).map(|q| 1u128 << q).collect();
        let mut pass_g: Vec<u128> = vec![0; n];
        for l in loop_part {
            let li = match self.letter_index(l) {
                Some(i) => i,
                None => {
                    // Letter absent: all runs die.
                    return Ok(0);
                }
            };
            let step = &self.delta[li];
            let mut next_nog = vec![0u128; n];
            let mut next_g = vec![0u128; n];
            for q in 0..n {
                let mut from_nog = 0u128;
                let mut from_g = 0u128;
                let mut rest_nog = pass_nog[q];
                while rest_nog != 0 {
                    let x = rest_nog.trailing_zeros() as usize;
                    rest_nog &= rest_nog - 1;
                    from_nog |= step[x];
                }
                let mut rest_g = pass_g[q];
                while rest_g != 0 {
                    let x = rest_g.trailing_zeros() as usize;
                    rest_g &= rest_g - 1;
                    from_g |= step[x];
                }
                next_g[q] = from_g | (from_nog & self.green_mask);
                next_nog[q] = from_nog & !self.green_mask;
            }
            pass_nog = next_nog;
            pass_g = next_g;
        }
        // Pass graph on states; a state accepts if it reaches a cycle with a
        // green pass edge.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut green_edge: Vec<(usize, usize)> = Vec::new();
        for q in 0..n {
            let mut all = pass_nog[q] | pass_g[q];
            while all != 0 {
                let t = all.trailing_zeros() as usize;
                all &= all - 1;
                edges.push((q, t));
                if pass_g[q] >> t & 1 == 1 {
                    green_edge.push((q, t));
                }
            }
        }
        let sccs = tarjan_sccs(n, &edges);
        let mut scc_of = vec![usize::MAX; n];
        for (i, scc) in sccs.iter().enumerate() {
            for &x in scc {
                scc_of[x] = i;
            }
        }
        let mut target = 0u128;
        for &(q, t) in &green_edge {
            if scc_of[q] == scc_of[t] {
                for &x in &sccs[scc_of[q]] {
                    target |= 1 << x;
                }
            }
        }
        // Backward closure of target over pass edges.
        loop {
            let mut grew = false;
            for q in 0..n {
                if target >> q & 1 == 0 && (pass_nog[q] | pass_g[q]) & target != 0 {
                    target |= 1 << q;
                    grew = true;
                }
            }
            if !grew {
                return Ok(target);
            }
        }
    }

    pub fn accepts(&self, prefix: &[L], loop_accepting_mask: u128) -> bool {
        let mut cur = self.initial_mask;
        for l in prefix {
            let li = match self.letter_index(l) {
                Some(i) => i,
                None => return false,
            };
            let step = &self.delta[li];
            let mut next = 0u128;
            let mut rest = cur;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= step[x];
            }
            cur = next;
            if cur == 0 {
                return false;
            }
        }
        cur & loop_accepting_mask != 0
    }
}

// ---- line-oriented text serialization ----

impl<L: Letter> Nba<L> {
    /// `states N / initial i.. / green g.. / trans s letter t` with
    /// deterministic ordering for golden files.
    pub fn serialize(&self, letter: impl Fn(&L) -> String) -> String {
        let mut out = String::new();
        out.push_str(&format!("states {}\n", self.num_states));
        let fmt_set = |set: &BTreeSet<usize>| {
            set.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("initial {}\n", fmt_set(&self.initial)));
        out.push_str(&format!("green {}\n", fmt_set(&self.greens)));
        let mut lines: Vec<String> = self
            .transitions
            .iter()
            .map(|(s, l, t)| format!("trans {} {} {}", s, letter(l), t))
            .collect();
        lines.sort();
        lines.dedup();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval_lasso, negate, parse_ltl, to_nba};
    use crate::csp::ActionTable;

    fn table2() -> ActionTable {
        let mut t = ActionTable::new();
        t.intern("a0");
        t.intern("b");
        t
    }

    fn gfb_nba() -> (Nba<ActionId>, ActionId, ActionId) {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        (to_nba(&parse_ltl("G F b", &t).unwrap(), &[a0, b]), a0, b)
    }

    #[test]
    fn lasso_acceptance_examples() {
        let (nba, a0, b) = gfb_nba();
        assert!(nba_accepts_lasso(&nba, &[a0], &[b]).unwrap());
        let empty: Nba<ActionId> = Nba::new(0);
        assert!(!nba_accepts_lasso(&empty, &[a0], &[a0]).unwrap());
        // Automaton for !(FG!b) = GFb rejects the b-free lasso.
        assert!(!nba_accepts_lasso(&nba, &[], &[a0]).unwrap());
        assert!(matches!(nba_accepts_lasso(&nba, &[a0], &[]), Err(AutomataError::EmptyLoop)));
    }

    #[test]
    fn as_ucw_examples() {
        let (nba, a0, b) = gfb_nba();
        let ucw = nba.as_ucw();
        assert!(ucw_accepts_lasso(&ucw, &[], &[a0]).unwrap());
        assert!(!ucw_accepts_lasso(&ucw, &[a0], &[b]).unwrap());
        let empty: Nba<ActionId> = Nba::new(0);
        assert!(ucw_accepts_lasso(&empty.as_ucw(), &[a0], &[a0, b]).unwrap());
    }

    #[test]
    fn prune_examples() {
        // An isolated state disappears.
        let mut a: Nba<ActionId> = Nba::new(3);
        a.initial.insert(0);
        a.greens.insert(1);
        a.transitions.push((0, 7, 1));
        a.transitions.push((1, 7, 1));
        // state 2 isolated
        let p = a.prune();
        assert_eq!(p.num_states, 2);

        // All greens unreachable: empty automaton.
        let mut b: Nba<ActionId> = Nba::new(2);
        b.initial.insert(0);
        b.greens.insert(1);
        b.transitions.push((0, 7, 0));
        let p = b.prune();
        assert_eq!(p.num_states, 0);
        assert!(!nba_accepts_lasso(&p, &[], &[7]).unwrap());
    }

    #[test]
    fn prune_preserves_acceptance_sampled() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        for src in ["G F b", "F G !b", "a0 U b", "X (b R a0)"] {
            let f = parse_ltl(src, &t).unwrap();
            let raw = to_nba(&f, &[a0, b]);
            let pruned = raw.prune();
            for (pre, lp) in [
                (vec![], vec![a0]),
                (vec![], vec![b]),
                (vec![a0], vec![b, a0]),
                (vec![b, b], vec![a0, b]),
            ] {
                assert_eq!(
                    nba_accepts_lasso(&raw, &pre, &lp).unwrap(),
                    nba_accepts_lasso(&pruned, &pre, &lp).unwrap(),
                    "{src} on {pre:?} {lp:?}"
                );
            }
        }
    }

    #[test]
    fn green_edge_conversion_single_state() {
        // One state, one green self-loop: two states after conversion, the
        // flagged copy green, language = all words.
        let mut e: EdgeGreenNba<ActionId> = EdgeGreenNba::new(1);
        e.initial.insert(0);
        e.transitions.push((0, 5, 0, true));
        let n = e.green_edges_to_states();
        assert_eq!(n.num_states, 2);
        assert!(nba_accepts_lasso(&n, &[], &[5]).unwrap());
        assert!(nba_accepts_lasso(&n, &[5, 5], &[5]).unwrap());
    }

    #[test]
    fn green_edge_conversion_no_green_edges() {
        let mut e: EdgeGreenNba<ActionId> = EdgeGreenNba::new(2);
        e.initial.insert(0);
        e.greens.insert(1);
        e.transitions.push((0, 5, 1, false));
        e.transitions.push((1, 5, 1, false));
        e.transitions.push((1, 6, 0, false));
        let n = e.green_edges_to_states();
        for (pre, lp) in [(vec![], vec![5]), (vec![5], vec![6, 5]), (vec![5, 6], vec![6, 5])] {
            assert_eq!(
                e.accepts_lasso(&pre, &lp).unwrap(),
                nba_accepts_lasso(&n, &pre, &lp).unwrap()
            );
        }
    }

    #[test]
    fn green_edge_conversion_at_most_doubles_and_agrees() {
        let mut e: EdgeGreenNba<ActionId> = EdgeGreenNba::new(3);
        e.initial.insert(0);
        e.greens.insert(2);
        e.transitions.push((0, 1, 1, true));
        e.transitions.push((1, 2, 2, false));
        e.transitions.push((2, 1, 0, false));
        e.transitions.push((1, 1, 1, true));
        let n = e.green_edges_to_states();
        assert!(n.num_states <= 2 * e.num_states);
        // All lassos up to length 4 over letters {1, 2}.
        let letters = [1usize, 2usize];
        let words = |len: usize| -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| {
                        letters.iter().map(move |&l| {
                            let mut w2 = w.clone();
                            w2.push(l);
                            w2
                        })
                    })
                    .collect();
            }
            out
        };
        for pl in 0..3 {
            for ll in 1..3 {
                for pre in words(pl) {
                    for lp in words(ll) {
                        assert_eq!(
                            e.accepts_lasso(&pre, &lp).unwrap(),
                            nba_accepts_lasso(&n, &pre, &lp).unwrap(),
                            "pre {pre:?} loop {lp:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nfa_membership_examples() {
        let uni = FiniteNfa::universal(2);
        assert!(uni.runs_word(&[0, 1, 0]));
        assert!(uni.runs_word(&[]));
        let empty = FiniteNfa::empty(2);
        assert!(!empty.runs_word(&[]));
        assert!(!empty.runs_word(&[0, 0]));

        // Odd number of letter 0.
        let mut odd = FiniteNfa {
            num_states: 2,
            initial: [0].into_iter().collect(),
            transitions: BTreeSet::new(),
            accepting: [1].into_iter().collect(),
        };
        odd.transitions.insert((0, 0, 1));
        odd.transitions.insert((1, 0, 0));
        odd.transitions.insert((0, 1, 0));
        odd.transitions.insert((1, 1, 1));
        assert!(odd.runs_word(&[0, 0, 0]));
        assert!(!odd.runs_word(&[0, 0]));
    }

    #[test]
    fn ucw_complement_exhaustive_small() {
        // Complementation check: UCW acceptance equals negated NBA acceptance
        // for all formulas up to size 5 over two letters, lassos up to 4.
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        let formulas = crate::ltl::tests_support::enumerate_formulas(&[a0, b], 5);
        let lassos = crate::ltl::tests_support::enumerate_lassos(&[a0, b], 4);
        for f in &formulas {
            let nba = to_nba(f, &[a0, b]);
            let ucw = nba.as_ucw();
            for (pre, lp) in &lassos {
                let n = nba_accepts_lasso(&nba, pre, lp).unwrap();
                let u = ucw_accepts_lasso(&ucw, pre, lp).unwrap();
                assert!(n ^ u, "complement violated for {f} on {pre:?} {lp:?}");
            }
        }
    }

    #[test]
    fn batch_acceptor_matches_reference() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        let lassos = crate::ltl::tests_support::enumerate_lassos(&[a0, b], 3);
        for src in ["G F b", "F G !b", "a0 U b", "X (b R a0)", "F (a0 & X b)"] {
            let f = parse_ltl(src, &t).unwrap();
            let nba = to_nba(&f, &[a0, b]);
            let acc = LassoAcceptor::new(&nba).unwrap();
            for (pre, lp) in &lassos {
                let mask = acc.loop_accepting(lp).unwrap();
                assert_eq!(
                    acc.accepts(pre, mask),
                    nba_accepts_lasso(&nba, pre, lp).unwrap(),
                    "{src} on {pre:?} {lp:?}"
                );
            }
        }
    }

    #[test]
    fn negation_xor_sampled() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        let lassos = crate::ltl::tests_support::enumerate_lassos(&[a0, b], 3);
        for src in ["G F b", "a0 U (b R a0)", "X X b", "F (a0 & X b)"] {
            let f = parse_ltl(src, &t).unwrap();
            let nf = negate(&f);
            for (pre, lp) in &lassos {
                assert!(
                    eval_lasso(&f, pre, lp).unwrap() ^ eval_lasso(&nf, pre, lp).unwrap(),
                    "{src} on {pre:?} {lp:?}"
                );
            }
        }
    }
}
