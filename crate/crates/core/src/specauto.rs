//! The specification automaton: a Büchi automaton over composite letters
//! `(a, L, g)` built from the environment, the safety-complement automaton,
//! and the Büchi automaton for the negated liveness formula. Fail traps
//! deadlocks and abandoned-synchronization violations, Sink absorbs
//! inconsistent or blocked branches, and normal `(q, r, e)` states advance
//! all three components across hidden-action closures.
//!
//! Two construction modes produce identical results: an explicit worklist
//! mode enumerating label sets, and a symbolic mode computing the closure
//! relations as BDD fixpoints.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use thiserror::Error;

use crate::automata::{tarjan_sccs, FiniteNfa, Nba};
use crate::bdd::{Bdd, BddError, BddManager, SnapshotBdd, BDD_FALSE, BDD_TRUE};
use crate::csp::{ActionId, Process};

pub const FAIL: usize = 0;
pub const SINK: usize = 1;

pub const STATE_CAP: usize = 200_000;

#[derive(Debug, Error)]
pub enum SpecAutoError {
    #[error("explicit mode supports at most 12 public actions, got {0}")]
    SigmaTooLarge(usize),
    #[error("state-space cap exceeded: {0} specification states")]
    StateCap(usize),
    #[error("bdd: {0}")]
    Bdd(#[from] BddError),
    #[error("oracle scale exceeded: {0}")]
    OracleScale(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub q: usize,
    pub r: usize,
    pub e: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpecState {
    Fail,
    Sink,
    Normal(Triple),
}

/// Everything the construction reads: the liveness-negation automaton, the
/// completed safety-complement automaton, and the flattened environment.
pub struct SpecContext<'a> {
    pub al: &'a Nba<ActionId>,
    pub asc: FiniteNfa,
    pub env: &'a Process,
    /// Public actions in label-bit order.
    pub sigma: Vec<ActionId>,
    pub gamma: Vec<ActionId>,
    pub num_actions: usize,
}

impl<'a> SpecContext<'a> {
    pub fn new(
        al: &'a Nba<ActionId>,
        safety_complement: &FiniteNfa,
        env: &'a Process,
        num_actions: usize,
    ) -> Self {
        let letters: Vec<ActionId> = (0..num_actions).collect();
        SpecContext {
            al,
            asc: safety_complement.completed(&letters),
            env,
            sigma: env.public.iter().copied().collect(),
            gamma: env.private.iter().copied().collect(),
            num_actions,
        }
    }

    pub fn sigma_index(&self, a: ActionId) -> Option<usize> {
        self.sigma.iter().position(|&x| x == a)
    }

    fn e_pub_mask(&self, e: usize) -> u64 {
        let mut mask = 0u64;
        for (i, &a) in self.sigma.iter().enumerate() {
            if !self.env.successors(e, a).is_empty() {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn initial_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for &q in &self.al.initial {
            for &r in &self.asc.initial {
                out.push(Triple { q, r, e: self.env.initial });
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Per-state expansion produced by either mode. Label predicates live in the
/// shared assembly manager whose levels 0..|Σ| are the label bits.
pub struct StateExpansion {
    pub efail: Bdd,
    pub nosynch_green: Bdd,
    pub actions: Vec<ActionExpansion>,
}

pub struct ActionExpansion {
    pub enabled: bool,
    /// (edge green bit, successor), sorted.
    pub succs: Vec<(bool, Triple)>,
}

pub trait ConstructionMode {
    fn expand(&mut self, lm: &mut BddManager, s: Triple) -> Result<StateExpansion, SpecAutoError>;
}

// ---------------------------------------------------------------------------
// Explicit mode
// ---------------------------------------------------------------------------

/// Worklist construction. Label sets are enumerated as bitmasks over Σ; the
/// closure relations are plain reachability computations on the joint
/// product graph restricted to private actions.
pub struct ExplicitMode<'a> {
    ctx: &'a SpecContext<'a>,
    nr: usize,
    ne: usize,
    priv_succ: Vec<Vec<usize>>,
    pub_succ: Vec<HashMap<usize, Vec<usize>>>,
    re_priv_pred: Vec<Vec<usize>>,
    e_pub_masks: Vec<u64>,
    dead_end: Vec<bool>,
    enabled_closure: Vec<Vec<bool>>,
    green_q: Vec<bool>,
    efail_cache: HashMap<u64, Vec<bool>>,
    /// Per label mask: (on a green hidden cycle, on a green-free hidden cycle).
    nosynch_cache: HashMap<u64, (Vec<bool>, Vec<bool>)>,
    eprivate_cache: HashMap<usize, Rc<Vec<(usize, bool, bool)>>>,
}

impl<'a> ExplicitMode<'a> {
    pub fn new(ctx: &'a SpecContext<'a>) -> Result<Self, SpecAutoError> {
        if ctx.sigma.len() > 12 {
            return Err(SpecAutoError::SigmaTooLarge(ctx.sigma.len()));
        }
        let nq = ctx.al.num_states.max(1);
        let nr = ctx.asc.num_states;
        let ne = ctx.env.num_states();
        let n_triples = nq * nr * ne;

        let mut al_succ: HashMap<(usize, ActionId), Vec<usize>> = HashMap::new();
        for &(s, a, t) in &ctx.al.transitions {
            al_succ.entry((s, a)).or_default().push(t);
        }
        let mut as_succ: HashMap<(usize, ActionId), Vec<usize>> = HashMap::new();
        for &(s, a, t) in &ctx.asc.transitions {
            as_succ.entry((s, a)).or_default().push(t);
        }

        let idx = |q: usize, r: usize, e: usize| (q * nr + r) * ne + e;

        let mut priv_succ: Vec<Vec<usize>> = vec![Vec::new(); n_triples];
        let mut pub_succ: Vec<HashMap<usize, Vec<usize>>> =
            vec![HashMap::new(); ctx.sigma.len()];
        for q in 0..nq {
            for r in 0..nr {
                for e in 0..ne {
                    let s = idx(q, r, e);
                    for (a, e2) in ctx.env.outgoing(e) {
                        let (qs, rs) = match (al_succ.get(&(q, a)), as_succ.get(&(r, a))) {
                            (Some(qs), Some(rs)) => (qs, rs),
                            _ => continue,
                        };
                        for &q2 in qs {
                            for &r2 in rs {
                                let t = idx(q2, r2, e2);
                                if ctx.env.private.contains(&a) {
                                    priv_succ[s].push(t);
                                } else if let Some(ai) = ctx.sigma_index(a) {
                                    pub_succ[ai].entry(s).or_default().push(t);
                                }
                            }
                        }
                    }
                }
            }
        }
        for v in &mut priv_succ {
            v.sort_unstable();
            v.dedup();
        }
        for m in &mut pub_succ {
            for v in m.values_mut() {
                v.sort_unstable();
                v.dedup();
            }
        }

        // (r, e) private product, reversed, for the deadlock fixpoint.
        let re_idx = |r: usize, e: usize| r * ne + e;
        let mut re_priv_pred: Vec<Vec<usize>> = vec![Vec::new(); nr * ne];
        for r in 0..nr {
            for e in 0..ne {
                for (a, e2) in ctx.env.outgoing(e) {
                    if !ctx.env.private.contains(&a) {
                        continue;
                    }
                    if let Some(rs) = as_succ.get(&(r, a)) {
                        for &r2 in rs {
                            re_priv_pred[re_idx(r2, e2)].push(re_idx(r, e));
                        }
                    }
                }
            }
        }

        let e_pub_masks: Vec<u64> = (0..ne).map(|e| ctx.e_pub_mask(e)).collect();
        let dead_end: Vec<bool> =
            (0..ne).map(|e| !ctx.env.has_private_transition(e)).collect();

        // enabled(a, e): direct transition closed under hidden predecessors.
        let mut e_priv_pred: Vec<Vec<usize>> = vec![Vec::new(); ne];
        for e in 0..ne {
            for (a, e2) in ctx.env.outgoing(e) {
                if ctx.env.private.contains(&a) {
                    e_priv_pred[e2].push(e);
                }
            }
        }
        let mut enabled_closure = Vec::new();
        for (ai, _) in ctx.sigma.iter().enumerate() {
            let mut x: Vec<bool> = (0..ne).map(|e| e_pub_masks[e] >> ai & 1 == 1).collect();
            let mut queue: VecDeque<usize> = (0..ne).filter(|&e| x[e]).collect();
            while let Some(e) = queue.pop_front() {
                for &p in &e_priv_pred[e] {
                    if !x[p] {
                        x[p] = true;
                        queue.push_back(p);
                    }
                }
            }
            enabled_closure.push(x);
        }

        let green_q: Vec<bool> = (0..nq).map(|q| ctx.al.greens.contains(&q)).collect();

        Ok(ExplicitMode {
            ctx,
            nr,
            ne,
            priv_succ,
            pub_succ,
            re_priv_pred,
            e_pub_masks,
            dead_end,
            enabled_closure,
            green_q,
            efail_cache: HashMap::new(),
            nosynch_cache: HashMap::new(),
            eprivate_cache: HashMap::new(),
        })
    }

    pub fn triple_index(&self, t: Triple) -> usize {
        (t.q * self.nr + t.r) * self.ne + t.e
    }

    pub fn triple_of(&self, i: usize) -> Triple {
        Triple { q: i / (self.nr * self.ne), r: i / self.ne % self.nr, e: i % self.ne }
    }

    /// Joint step on a single action: all three components move.
    pub fn joint(&self, s: Triple, c: ActionId, t: Triple) -> bool {
        self.ctx.env.successors(s.e, c).contains(&t.e)
            && self.ctx.al.successors(s.q, &c).any(|x| x == t.q)
            && self.ctx.asc.successors(s.r, c).contains(&t.r)
    }

    /// Public action enabled at `e` directly or after hidden steps.
    pub fn enabled(&self, sigma_idx: usize, e: usize) -> bool {
        self.enabled_closure[sigma_idx][e]
    }

    /// Deadlock relation: a hidden-only path to a dead end whose enabled
    /// public actions avoid `l_mask`, with the safety-complement automaton
    /// accepting the consumed trace.
    pub fn efail(&mut self, r: usize, e: usize, l_mask: u64) -> bool {
        self.ensure_efail(l_mask);
        self.efail_cache[&l_mask][r * self.ne + e]
    }

    fn ensure_efail(&mut self, l_mask: u64) {
        if self.efail_cache.contains_key(&l_mask) {
            return;
        }
        let ne = self.ne;
        let mut table = vec![false; self.nr * ne];
        let mut queue = VecDeque::new();
        for r in 0..self.nr {
            if !self.ctx.asc.accepting.contains(&r) {
                continue;
            }
            for e in 0..ne {
                if self.dead_end[e] && self.e_pub_masks[e] & l_mask == 0 {
                    table[r * ne + e] = true;
                    queue.push_back(r * ne + e);
                }
            }
        }
        while let Some(x) = queue.pop_front() {
            for &p in &self.re_priv_pred[x] {
                if !table[p] {
                    table[p] = true;
                    queue.push_back(p);
                }
            }
        }
        self.efail_cache.insert(l_mask, table);
    }

    /// Hidden-only reachability with green accumulation: (target triple,
    /// reachable with green bit false, with green bit true). The green bit
    /// covers every liveness-automaton state on the path, endpoints included.
    pub fn eprivate_from(&mut self, s: Triple) -> Rc<Vec<(usize, bool, bool)>> {
        let si = self.triple_index(s);
        if let Some(v) = self.eprivate_cache.get(&si) {
            return v.clone();
        }
        let mut acc: BTreeMap<usize, [bool; 2]> = BTreeMap::new();
        let g0 = self.green_q[s.q];
        let mut queue = VecDeque::new();
        acc.insert(si, [!g0, g0]);
        queue.push_back((si, g0));
        while let Some((x, g)) = queue.pop_front() {
            for &t in &self.priv_succ[x] {
                let g2 = g || self.green_q[self.triple_of(t).q];
                let entry = acc.entry(t).or_insert([false, false]);
                if !entry[g2 as usize] {
                    entry[g2 as usize] = true;
                    queue.push_back((t, g2));
                }
            }
        }
        let v: Vec<(usize, bool, bool)> =
            acc.into_iter().map(|(t, gs)| (t, gs[0], gs[1])).collect();
        let rc = Rc::new(v);
        self.eprivate_cache.insert(si, rc.clone());
        rc
    }

    /// Like `eprivate_from` but every state on the path (endpoints included)
    /// must enable no public action in `l_mask`.
    pub fn gen_eprivate_from(&mut self, s: Triple, l_mask: u64) -> Vec<(usize, bool, bool)> {
        if self.e_pub_masks[s.e] & l_mask != 0 {
            return Vec::new();
        }
        let si = self.triple_index(s);
        let mut acc: BTreeMap<usize, [bool; 2]> = BTreeMap::new();
        let g0 = self.green_q[s.q];
        let mut queue = VecDeque::new();
        acc.insert(si, [!g0, g0]);
        queue.push_back((si, g0));
        while let Some((x, g)) = queue.pop_front() {
            for &t in &self.priv_succ[x] {
                let tt = self.triple_of(t);
                if self.e_pub_masks[tt.e] & l_mask != 0 {
                    continue;
                }
                let g2 = g || self.green_q[tt.q];
                let entry = acc.entry(t).or_insert([false, false]);
                if !entry[g2 as usize] {
                    entry[g2 as usize] = true;
                    queue.push_back((t, g2));
                }
            }
        }
        acc.into_iter().map(|(t, gs)| (t, gs[0], gs[1])).collect()
    }

    /// Abandoned-synchronization relation: from `s`, a hidden-only stem to a
    /// lasso whose loop avoids every public action in `l_mask`; `green`
    /// selects whether the loop visits a liveness-automaton green state.
    pub fn no_synch(&mut self, s: Triple, l_mask: u64, green: bool) -> bool {
        self.ensure_nosynch(l_mask);
        let reach = self.eprivate_from(s);
        let tables = &self.nosynch_cache[&l_mask];
        let table = if green { &tables.0 } else { &tables.1 };
        reach.iter().any(|&(t, _, _)| table[t])
    }

    fn ensure_nosynch(&mut self, l_mask: u64) {
        if self.nosynch_cache.contains_key(&l_mask) {
            return;
        }
        let n = self.priv_succ.len();
        let in_sub: Vec<bool> =
            (0..n).map(|x| self.e_pub_masks[self.triple_of(x).e] & l_mask == 0).collect();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (x, succ) in self.priv_succ.iter().enumerate() {
            if !in_sub[x] {
                continue;
            }
            for &t in succ {
                if in_sub[t] {
                    edges.push((x, t));
                }
            }
        }
        let with_green = {
            let sccs = tarjan_sccs(n, &edges);
            let mut scc_of = vec![usize::MAX; n];
            for (i, scc) in sccs.iter().enumerate() {
                for &x in scc {
                    scc_of[x] = i;
                }
            }
            let mut cyclic = vec![false; sccs.len()];
            for &(x, t) in &edges {
                if scc_of[x] == scc_of[t] {
                    cyclic[scc_of[x]] = true;
                }
            }
            let mut out = vec![false; n];
            for (i, scc) in sccs.iter().enumerate() {
                if cyclic[i] && scc.iter().any(|&x| self.green_q[self.triple_of(x).q]) {
                    for &x in scc {
                        out[x] = true;
                    }
                }
            }
            out
        };
        let without_green = {
            let ng_edges: Vec<(usize, usize)> = edges
                .iter()
                .filter(|&&(x, t)| {
                    !self.green_q[self.triple_of(x).q] && !self.green_q[self.triple_of(t).q]
                })
                .copied()
                .collect();
            let sccs = tarjan_sccs(n, &ng_edges);
            let mut scc_of = vec![usize::MAX; n];
            for (i, scc) in sccs.iter().enumerate() {
                for &x in scc {
                    scc_of[x] = i;
                }
            }
            let mut cyclic = vec![false; sccs.len()];
            for &(x, t) in &ng_edges {
                if scc_of[x] == scc_of[t] {
                    cyclic[scc_of[x]] = true;
                }
            }
            (0..n).map(|x| scc_of[x] != usize::MAX && cyclic[scc_of[x]]).collect()
        };
        self.nosynch_cache.insert(l_mask, (with_green, without_green));
    }

    /// Single public step wrapped in hidden closures on both sides; the edge
    /// green bit accumulates greens across the whole segment.
    pub fn normal_trans(&mut self, s: Triple, sigma_idx: usize) -> Vec<(bool, Triple)> {
        let mut out: BTreeSet<(bool, Triple)> = BTreeSet::new();
        let reach = self.eprivate_from(s);
        for &(s0, g_f, g_t) in reach.iter() {
            let step_targets = match self.pub_succ[sigma_idx].get(&s0) {
                Some(v) => v.clone(),
                None => continue,
            };
            for s1 in step_targets {
                let t1 = self.triple_of(s1);
                let tail = self.eprivate_from(t1);
                for &(s2, h_f, h_t) in tail.iter() {
                    let t2 = self.triple_of(s2);
                    for (g0, ok0) in [(false, g_f), (true, g_t)] {
                        if !ok0 {
                            continue;
                        }
                        for (g1, ok1) in [(false, h_f), (true, h_t)] {
                            if ok1 {
                                out.insert((g0 || g1, t2));
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

impl<'a> ConstructionMode for ExplicitMode<'a> {
    fn expand(&mut self, lm: &mut BddManager, s: Triple) -> Result<StateExpansion, SpecAutoError> {
        let nsigma = self.ctx.sigma.len();
        let masks = 1u64 << nsigma;
        let mut efail_masks = Vec::new();
        let mut nosynch_masks = Vec::new();
        for l in 0..masks {
            if self.efail(s.r, s.e, l) {
                efail_masks.push(l);
            }
            if self.no_synch(s, l, true) {
                nosynch_masks.push(l);
            }
        }
        let efail = masks_to_bdd(lm, &efail_masks, nsigma);
        let nosynch_green = masks_to_bdd(lm, &nosynch_masks, nsigma);
        let mut actions = Vec::new();
        for ai in 0..nsigma {
            let enabled = self.enabled(ai, s.e);
            let succs = if enabled { self.normal_trans(s, ai) } else { Vec::new() };
            actions.push(ActionExpansion { enabled, succs });
        }
        Ok(StateExpansion { efail, nosynch_green, actions })
    }
}

fn masks_to_bdd(lm: &mut BddManager, masks: &[u64], nsigma: usize) -> Bdd {
    let mut acc = BDD_FALSE;
    for &m in masks {
        let lits: Vec<(u32, bool)> =
            (0..nsigma).map(|i| (i as u32, m >> i & 1 == 1)).collect();
        let cube = lm.cube(&lits);
        acc = lm.or(acc, cube);
    }
    acc
}

// ---------------------------------------------------------------------------
// Symbolic mode
// ---------------------------------------------------------------------------

/// Bit layout: for each state-component bit i there are three levels
/// (unprimed 3i, primed 3i+1, auxiliary 3i+2) so relational products rename
/// only rightward; then three green-bit slots, then binary action bits, then
/// one level per public action for the label set.
struct Layout {
    nq_bits: u32,
    nr_bits: u32,
    ne_bits: u32,
    na_bits: u32,
    nsigma: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    U,
    P,
    W,
}

impl Layout {
    fn nb(&self) -> u32 {
        self.nq_bits + self.nr_bits + self.ne_bits
    }
    fn state_level(&self, group: Group, bit: u32) -> u32 {
        3 * bit
            + match group {
                Group::U => 0,
                Group::P => 1,
                Group::W => 2,
            }
    }
    fn g_level(&self, slot: u32) -> u32 {
        3 * self.nb() + slot
    }
    fn a_level(&self, bit: u32) -> u32 {
        3 * self.nb() + 3 + bit
    }
    fn l_level(&self, i: u32) -> u32 {
        3 * self.nb() + 3 + self.na_bits + i
    }
    fn state_levels(&self, group: Group) -> Vec<u32> {
        (0..self.nb()).map(|i| self.state_level(group, i)).collect()
    }
    fn a_levels(&self) -> Vec<u32> {
        (0..self.na_bits).map(|i| self.a_level(i)).collect()
    }
    fn group_map(&self, from: Group, to: Group) -> Vec<(u32, u32)> {
        (0..self.nb())
            .map(|i| (self.state_level(from, i), self.state_level(to, i)))
            .collect()
    }
}

fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub struct SymbolicMode<'a> {
    ctx: &'a SpecContext<'a>,
    m: BddManager,
    layout: Layout,
    y_efail: Bdd,
    x_enabled: Bdd,
    nosynch_green: Bdd,
    ntrans: Bdd,
}

enum Comp {
    Q,
    R,
    E,
}

struct SymbolicBuilder<'a, 'b> {
    ctx: &'a SpecContext<'a>,
    layout: &'b Layout,
    m: &'b mut BddManager,
}

impl<'a> SymbolicMode<'a> {
    pub fn new(ctx: &'a SpecContext<'a>) -> Result<Self, SpecAutoError> {
        let layout = Layout {
            nq_bits: bits_for(ctx.al.num_states.max(1)),
            nr_bits: bits_for(ctx.asc.num_states),
            ne_bits: bits_for(ctx.env.num_states()),
            na_bits: bits_for(ctx.num_actions).max(1),
            nsigma: ctx.sigma.len() as u32,
        };
        let mut m = BddManager::new();
        let g0 = layout.g_level(0);
        let g1 = layout.g_level(1);
        let g2 = layout.g_level(2);

        let (y_efail, x_enabled, z_up, z_wp, zg_up, j_wp, is_public) = {
            let mut b = SymbolicBuilder { ctx, layout: &layout, m: &mut m };

            let al_u = b.component_rel(Group::U, Group::P, Comp::Q)?;
            let as_u = b.component_rel(Group::U, Group::P, Comp::R)?;
            let env_u = b.component_rel(Group::U, Group::P, Comp::E)?;
            let j_up = {
                let t = b.m.try_and(al_u, as_u)?;
                b.m.try_and(t, env_u)?
            };
            let al_w = b.component_rel(Group::W, Group::P, Comp::Q)?;
            let as_w = b.component_rel(Group::W, Group::P, Comp::R)?;
            let env_w = b.component_rel(Group::W, Group::P, Comp::E)?;
            let j_wp = {
                let t = b.m.try_and(al_w, as_w)?;
                b.m.try_and(t, env_w)?
            };

            let is_private = b.action_set(&ctx.gamma.clone());
            let is_public = b.action_set(&ctx.sigma.clone());
            let a_levels = layout.a_levels();
            let jpriv_up = {
                let t = b.m.try_and(j_up, is_private)?;
                b.m.exists(t, &a_levels)
            };
            let jpriv_wp = {
                let t = b.m.try_and(j_wp, is_private)?;
                b.m.exists(t, &a_levels)
            };

            let triples =
                ctx.al.num_states.max(1) * ctx.asc.num_states * ctx.env.num_states();
            let cap = 2 * triples * triples + 2;

            // Deadlock fixpoint over (r, e, L).
            let y_efail = {
                let base = b.efail_base()?;
                let re_priv = {
                    let t = b.m.try_and(as_u, env_u)?;
                    let t = b.m.try_and(t, is_private)?;
                    b.m.exists(t, &a_levels)
                };
                let rename_re = b.re_unprimed_to_primed();
                let p_levels: Vec<u32> = rename_re.iter().map(|&(_, p)| p).collect();
                b.m.lfp(BDD_FALSE, cap, |m, cur| {
                    let cur_p = m.rename(cur, &rename_re)?;
                    let step = m.try_and(re_priv, cur_p)?;
                    let pre = m.exists(step, &p_levels);
                    let grown = m.try_or(base, pre)?;
                    m.try_or(cur, grown)
                })?
            };

            // Enabled-with-closure fixpoint over (a, e).
            let x_enabled = {
                let base = b.enabled_base()?;
                let env_priv = {
                    let t = b.m.try_and(env_u, is_private)?;
                    b.m.exists(t, &a_levels)
                };
                let rename_e = b.e_unprimed_to_primed();
                let p_levels: Vec<u32> = rename_e.iter().map(|&(_, p)| p).collect();
                b.m.lfp(BDD_FALSE, cap, |m, cur| {
                    let cur_p = m.rename(cur, &rename_e)?;
                    let step = m.try_and(env_priv, cur_p)?;
                    let pre = m.exists(step, &p_levels);
                    let grown = m.try_or(base, pre)?;
                    m.try_or(cur, grown)
                })?
            };

            let green_p = b.green_cubes(Group::P)?;
            let green_w = b.green_cubes(Group::W)?;
            let valid_u = b.valid(Group::U)?;
            let valid_p = b.valid(Group::P)?;
            let valid_w = b.valid(Group::W)?;

            // Hidden-closure relation with green accumulation, (u, g, p).
            let z_up = {
                let eq = b.eq_groups(Group::U, Group::P)?;
                let green_u = b.green_cubes(Group::U)?;
                let gv = b.m.var(g0);
                let gdef = b.m.iff(gv, green_u);
                let base = {
                    let t = b.m.try_and(eq, gdef)?;
                    let t = b.m.try_and(t, valid_u)?;
                    b.m.try_and(t, valid_p)?
                };
                let map_pw_g = {
                    let mut v = layout.group_map(Group::P, Group::W);
                    v.push((g0, g1));
                    v
                };
                let w_levels = layout.state_levels(Group::W);
                b.m.lfp(BDD_FALSE, cap, |m, cur| {
                    let cur_w = m.rename(cur, &map_pw_g)?;
                    let step = m.try_and(cur_w, jpriv_wp)?;
                    let gp = m.var(g0);
                    let gprev = m.var(g1);
                    let gor = m.try_or(gprev, green_p)?;
                    let gdef = m.iff(gp, gor);
                    let step = m.try_and(step, gdef)?;
                    let mut quant = w_levels.clone();
                    quant.push(g1);
                    let appended = m.exists(step, &quant);
                    let grown = m.try_or(base, appended)?;
                    m.try_or(cur, grown)
                })?
            };

            // Same relation in (w, g, p) layout; recomputed natively because
            // swapping groups is not an order-compatible rename.
            let z_wp = {
                let eq = b.eq_groups(Group::W, Group::P)?;
                let gv = b.m.var(g0);
                let gdef = b.m.iff(gv, green_w);
                let base = {
                    let t = b.m.try_and(eq, gdef)?;
                    let t = b.m.try_and(t, valid_w)?;
                    b.m.try_and(t, valid_p)?
                };
                let map_pu_g = {
                    let mut v = layout.group_map(Group::P, Group::U);
                    v.push((g0, g1));
                    v
                };
                let u_levels = layout.state_levels(Group::U);
                b.m.lfp(BDD_FALSE, cap, |m, cur| {
                    let cur_u = m.rename(cur, &map_pu_g)?;
                    let step = m.try_and(cur_u, jpriv_up)?;
                    let gp = m.var(g0);
                    let gprev = m.var(g1);
                    let gor = m.try_or(gprev, green_p)?;
                    let gdef = m.iff(gp, gor);
                    let step = m.try_and(step, gdef)?;
                    let mut quant = u_levels.clone();
                    quant.push(g1);
                    let appended = m.exists(step, &quant);
                    let grown = m.try_or(base, appended)?;
                    m.try_or(cur, grown)
                })?
            };

            // Hidden closure avoiding the label set along the whole path.
            let zg_up = {
                let eq = b.eq_groups(Group::U, Group::P)?;
                let green_u = b.green_cubes(Group::U)?;
                let lavoid_u = b.l_avoid(Group::U)?;
                let lavoid_p = b.l_avoid(Group::P)?;
                let gv = b.m.var(g0);
                let gdef = b.m.iff(gv, green_u);
                let base = {
                    let t = b.m.try_and(eq, gdef)?;
                    let t = b.m.try_and(t, valid_u)?;
                    let t = b.m.try_and(t, valid_p)?;
                    b.m.try_and(t, lavoid_u)?
                };
                let map_pw_g = {
                    let mut v = layout.group_map(Group::P, Group::W);
                    v.push((g0, g1));
                    v
                };
                let w_levels = layout.state_levels(Group::W);
                b.m.lfp(BDD_FALSE, cap, |m, cur| {
                    let cur_w = m.rename(cur, &map_pw_g)?;
                    let step = m.try_and(cur_w, jpriv_wp)?;
                    let gp = m.var(g0);
                    let gprev = m.var(g1);
                    let gor = m.try_or(gprev, green_p)?;
                    let gdef = m.iff(gp, gor);
                    let step = m.try_and(step, gdef)?;
                    let step = m.try_and(step, lavoid_p)?;
                    let mut quant = w_levels.clone();
                    quant.push(g1);
                    let appended = m.exists(step, &quant);
                    let grown = m.try_or(base, appended)?;
                    m.try_or(cur, grown)
                })?
            };
            (y_efail, x_enabled, z_up, z_wp, zg_up, j_wp, is_public)
        };

        // Abandoned synchronization over (u, L, g): a hidden stem to the loop
        // entry, one hidden step, and a label-avoiding hidden path closing
        // the loop. The resulting green bit is the loop's.
        let a_levels = layout.a_levels();
        let jpriv_wp2 = {
            let mut b = SymbolicBuilder { ctx, layout: &layout, m: &mut m };
            let is_private = b.action_set(&ctx.gamma.clone());
            let t = b.m.try_and(j_wp, is_private)?;
            b.m.exists(t, &a_levels)
        };
        let nosynch = {
            let reach_up = m.exists(z_up, &[g0]);
            let reach_uw = m.rename(reach_up, &layout.group_map(Group::P, Group::W))?;
            let map: Vec<(u32, u32)> = {
                let mut v = layout.group_map(Group::U, Group::P);
                v.extend(layout.group_map(Group::P, Group::W));
                v.sort_unstable();
                v
            };
            let zg_shift = m.rename(zg_up, &map)?;
            let t = m.try_and(reach_uw, jpriv_wp2)?;
            let t = m.try_and(t, zg_shift)?;
            let mut quant = layout.state_levels(Group::P);
            quant.extend(layout.state_levels(Group::W));
            m.exists(t, &quant)
        };
        let nosynch_green = {
            let gvar = m.var(g0);
            let t = m.and(nosynch, gvar);
            m.exists(t, &[g0])
        };

        // One public step with hidden closures on both sides.
        let ntrans = {
            let z_uw_g = m.rename(z_up, &layout.group_map(Group::P, Group::W))?;
            let t1 = {
                let t = m.try_and(z_uw_g, j_wp)?;
                m.try_and(t, is_public)?
            };
            let w_levels = layout.state_levels(Group::W);
            let t1 = m.exists(t1, &w_levels);
            let map_t1 = {
                let mut v = layout.group_map(Group::P, Group::W);
                v.push((g0, g1));
                v
            };
            let t1w = m.rename(t1, &map_t1)?;
            let zwp2 = m.rename(z_wp, &[(g0, g2)])?;
            let conj = m.try_and(t1w, zwp2)?;
            let ga = m.var(g0);
            let gb = m.var(g1);
            let gc = m.var(g2);
            let gor = m.or(gb, gc);
            let gdef = m.iff(ga, gor);
            let conj = m.try_and(conj, gdef)?;
            let mut quant = layout.state_levels(Group::W);
            quant.push(g1);
            quant.push(g2);
            m.exists(conj, &quant)
        };

        Ok(SymbolicMode { ctx, m, layout, y_efail, x_enabled, nosynch_green, ntrans })
    }

    fn restrict_state(&mut self, f: Bdd, group: Group, t: Triple) -> Bdd {
        let mut cur = f;
        let mut bit = 0u32;
        let plan = [
            (t.q, self.layout.nq_bits),
            (t.r, self.layout.nr_bits),
            (t.e, self.layout.ne_bits),
        ];
        for (val, nbits) in plan {
            for i in 0..nbits {
                let level = self.layout.state_level(group, bit);
                cur = self.m.restrict(cur, level, val >> i & 1 == 1);
                bit += 1;
            }
        }
        cur
    }

    fn restrict_action(&mut self, f: Bdd, a: ActionId) -> Bdd {
        let mut cur = f;
        for i in 0..self.layout.na_bits {
            let level = self.layout.a_level(i);
            cur = self.m.restrict(cur, level, a >> i & 1 == 1);
        }
        cur
    }

    /// Export a predicate over label bits with levels remapped to 0..|Σ|,
    /// then import into the assembly manager.
    fn export_l_pred(&mut self, f: Bdd, lm: &mut BddManager) -> Bdd {
        let map: Vec<(u32, u32)> =
            (0..self.layout.nsigma).map(|i| (self.layout.l_level(i), i)).collect();
        let snap = export_with_map(&self.m, f, &map);
        import_snapshot(lm, &snap)
    }

    fn enumerate_succs(&mut self, f: Bdd) -> Vec<(bool, Triple)> {
        let mut out = Vec::new();
        let g0 = self.layout.g_level(0);
        let nb = self.layout.nb();
        for g in [false, true] {
            let fg = self.m.restrict(f, g0, g);
            let mut stack = vec![(fg, 0u32, 0usize)];
            while let Some((cur, bit, acc)) = stack.pop() {
                if cur == BDD_FALSE {
                    continue;
                }
                if bit == nb {
                    let l = &self.layout;
                    let q = acc & ((1usize << l.nq_bits) - 1);
                    let r = acc >> l.nq_bits & ((1usize << l.nr_bits) - 1);
                    let e = acc >> (l.nq_bits + l.nr_bits);
                    out.push((g, Triple { q, r, e }));
                    continue;
                }
                let level = self.layout.state_level(Group::P, bit);
                let lo = self.m.restrict(cur, level, false);
                let hi = self.m.restrict(cur, level, true);
                stack.push((lo, bit + 1, acc));
                stack.push((hi, bit + 1, acc | 1 << bit));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl<'a> ConstructionMode for SymbolicMode<'a> {
    fn expand(&mut self, lm: &mut BddManager, s: Triple) -> Result<StateExpansion, SpecAutoError> {
        let f = self.y_efail;
        let efail_raw = self.restrict_state(f, Group::U, s);
        let efail = self.export_l_pred(efail_raw, lm);
        let f = self.nosynch_green;
        let nosynch_raw = self.restrict_state(f, Group::U, s);
        let nosynch_green = self.export_l_pred(nosynch_raw, lm);
        let mut actions = Vec::new();
        for ai in 0..self.ctx.sigma.len() {
            let a = self.ctx.sigma[ai];
            let enabled = {
                let f = self.x_enabled;
                let f = self.restrict_action(f, a);
                let f = self.restrict_state(f, Group::U, s);
                f == BDD_TRUE
            };
            let succs = if enabled {
                let f = self.ntrans;
                let f = self.restrict_state(f, Group::U, s);
                let f = self.restrict_action(f, a);
                self.enumerate_succs(f)
            } else {
                Vec::new()
            };
            actions.push(ActionExpansion { enabled, succs });
        }
        Ok(StateExpansion { efail, nosynch_green, actions })
    }
}

impl<'a, 'b> SymbolicBuilder<'a, 'b> {
    fn comp_bit_base(&self, comp: &Comp) -> u32 {
        match comp {
            Comp::Q => 0,
            Comp::R => self.layout.nq_bits,
            Comp::E => self.layout.nq_bits + self.layout.nr_bits,
        }
    }

    fn comp_bits(&self, comp: &Comp) -> u32 {
        match comp {
            Comp::Q => self.layout.nq_bits,
            Comp::R => self.layout.nr_bits,
            Comp::E => self.layout.ne_bits,
        }
    }

    fn comp_cube(&mut self, group: Group, comp: &Comp, val: usize) -> Bdd {
        let base = self.comp_bit_base(comp);
        let lits: Vec<(u32, bool)> = (0..self.comp_bits(comp))
            .map(|i| (self.layout.state_level(group, base + i), val >> i & 1 == 1))
            .collect();
        self.m.cube(&lits)
    }

    fn action_cube(&mut self, a: ActionId) -> Bdd {
        let lits: Vec<(u32, bool)> = (0..self.layout.na_bits)
            .map(|i| (self.layout.a_level(i), a >> i & 1 == 1))
            .collect();
        self.m.cube(&lits)
    }

    fn action_set(&mut self, actions: &[ActionId]) -> Bdd {
        let mut acc = BDD_FALSE;
        for &a in actions {
            let c = self.action_cube(a);
            acc = self.m.or(acc, c);
        }
        acc
    }

    fn component_rel(
        &mut self,
        from: Group,
        to: Group,
        comp: Comp,
    ) -> Result<Bdd, SpecAutoError> {
        let trans: Vec<(usize, ActionId, usize)> = match comp {
            Comp::Q => self.ctx.al.transitions.clone(),
            Comp::R => self.ctx.asc.transitions.iter().copied().collect(),
            Comp::E => self.ctx.env.transitions.iter().copied().collect(),
        };
        let mut acc = BDD_FALSE;
        for (s, a, t) in trans {
            let cs = self.comp_cube(from, &comp, s);
            let ct = self.comp_cube(to, &comp, t);
            let ca = self.action_cube(a);
            let x = self.m.try_and(cs, ct)?;
            let x = self.m.try_and(x, ca)?;
            acc = self.m.try_or(acc, x)?;
        }
        Ok(acc)
    }

    fn green_cubes(&mut self, group: Group) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_FALSE;
        let greens: Vec<usize> = self.ctx.al.greens.iter().copied().collect();
        for q in greens {
            let c = self.comp_cube(group, &Comp::Q, q);
            acc = self.m.try_or(acc, c)?;
        }
        Ok(acc)
    }

    fn valid(&mut self, group: Group) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_TRUE;
        let sizes = [
            (Comp::Q, self.ctx.al.num_states.max(1)),
            (Comp::R, self.ctx.asc.num_states),
            (Comp::E, self.ctx.env.num_states()),
        ];
        for (comp, n) in sizes {
            let mut any = BDD_FALSE;
            for v in 0..n {
                let c = self.comp_cube(group, &comp, v);
                any = self.m.try_or(any, c)?;
            }
            acc = self.m.try_and(acc, any)?;
        }
        Ok(acc)
    }

    fn eq_groups(&mut self, a: Group, b: Group) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_TRUE;
        for i in 0..self.layout.nb() {
            let va = self.m.var(self.layout.state_level(a, i));
            let vb = self.m.var(self.layout.state_level(b, i));
            let eq = self.m.iff(va, vb);
            acc = self.m.try_and(acc, eq)?;
        }
        Ok(acc)
    }

    /// No public action both enabled at the group's environment state and
    /// present in the label set.
    fn l_avoid(&mut self, group: Group) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_FALSE;
        for e in 0..self.ctx.env.num_states() {
            let ce = self.comp_cube(group, &Comp::E, e);
            let mut cond = BDD_TRUE;
            for i in 0..self.ctx.sigma.len() {
                let a = self.ctx.sigma[i];
                if !self.ctx.env.successors(e, a).is_empty() {
                    let lv = self.m.var(self.layout.l_level(i as u32));
                    let nl = self.m.not(lv);
                    cond = self.m.try_and(cond, nl)?;
                }
            }
            let x = self.m.try_and(ce, cond)?;
            acc = self.m.try_or(acc, x)?;
        }
        Ok(acc)
    }

    fn efail_base(&mut self) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_FALSE;
        let accepting: Vec<usize> = self.ctx.asc.accepting.iter().copied().collect();
        for e in 0..self.ctx.env.num_states() {
            if self.ctx.env.has_private_transition(e) {
                continue;
            }
            let ce = self.comp_cube(Group::U, &Comp::E, e);
            let mut cond = BDD_TRUE;
            for i in 0..self.ctx.sigma.len() {
                let a = self.ctx.sigma[i];
                if !self.ctx.env.successors(e, a).is_empty() {
                    let lv = self.m.var(self.layout.l_level(i as u32));
                    let nl = self.m.not(lv);
                    cond = self.m.try_and(cond, nl)?;
                }
            }
            let ce = self.m.try_and(ce, cond)?;
            for &r in &accepting {
                let cr = self.comp_cube(Group::U, &Comp::R, r);
                let x = self.m.try_and(ce, cr)?;
                acc = self.m.try_or(acc, x)?;
            }
        }
        Ok(acc)
    }

    fn enabled_base(&mut self) -> Result<Bdd, SpecAutoError> {
        let mut acc = BDD_FALSE;
        for e in 0..self.ctx.env.num_states() {
            let sigma = self.ctx.sigma.clone();
            for a in sigma {
                if !self.ctx.env.successors(e, a).is_empty() {
                    let ce = self.comp_cube(Group::U, &Comp::E, e);
                    let ca = self.action_cube(a);
                    let x = self.m.try_and(ce, ca)?;
                    acc = self.m.try_or(acc, x)?;
                }
            }
        }
        Ok(acc)
    }

    fn re_unprimed_to_primed(&self) -> Vec<(u32, u32)> {
        let base = self.layout.nq_bits;
        (base..self.layout.nb())
            .map(|i| (self.layout.state_level(Group::U, i), self.layout.state_level(Group::P, i)))
            .collect()
    }

    fn e_unprimed_to_primed(&self) -> Vec<(u32, u32)> {
        let base = self.layout.nq_bits + self.layout.nr_bits;
        (base..self.layout.nb())
            .map(|i| (self.layout.state_level(Group::U, i), self.layout.state_level(Group::P, i)))
            .collect()
    }
}

fn export_with_map(m: &BddManager, f: Bdd, map: &[(u32, u32)]) -> SnapshotBdd {
    let lookup = |lvl: u32| -> u32 {
        map.iter().find(|&&(from, _)| from == lvl).map(|&(_, to)| to).unwrap_or(lvl)
    };
    let snap = m.export(f);
    SnapshotBdd {
        nodes: snap.nodes.iter().map(|&(lvl, lo, hi)| (lookup(lvl), lo, hi)).collect(),
        root: snap.root,
    }
}

fn import_snapshot(m: &mut BddManager, snap: &SnapshotBdd) -> Bdd {
    let mut handles: Vec<Bdd> = Vec::with_capacity(snap.nodes.len() + 2);
    handles.push(BDD_FALSE);
    handles.push(BDD_TRUE);
    for &(lvl, lo, hi) in &snap.nodes {
        let v = m.var(lvl);
        let h = m.ite(v, handles[hi], handles[lo]);
        handles.push(h);
    }
    handles[snap.root]
}

// ---------------------------------------------------------------------------
// Assembly and the resulting automaton
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SpecEdge {
    pub src: usize,
    /// Index into `sigma`.
    pub action: usize,
    pub green: bool,
    pub dst: usize,
    pub label: SnapshotBdd,
}

/// The specification automaton before the co-Büchi reinterpretation: green
/// edges plus green states over composite `(a, L, g)` letters, label sets
/// kept as predicates over the Σ bits.
#[derive(Debug, Clone)]
pub struct SpecAutomaton {
    pub states: Vec<SpecState>,
    pub initial: BTreeSet<usize>,
    pub edges: Vec<SpecEdge>,
    pub greens: BTreeSet<usize>,
    pub sigma: Vec<ActionId>,
}

/// Priority cascade per input symbol: deadlock to Fail, then abandoned
/// synchronization (with a green loop) to Fail, then inconsistent or blocked
/// symbols to Sink, otherwise the normal joint step.
pub fn build_spec_automaton(
    ctx: &SpecContext,
    mode: &mut dyn ConstructionMode,
) -> Result<SpecAutomaton, SpecAutoError> {
    let mut lm = BddManager::new();
    let nsigma = ctx.sigma.len();
    let mut states = vec![SpecState::Fail, SpecState::Sink];
    let mut ids: BTreeMap<Triple, usize> = BTreeMap::new();
    let mut queue: VecDeque<Triple> = VecDeque::new();
    let mut edges: Vec<SpecEdge> = Vec::new();
    let mut greens: BTreeSet<usize> = [FAIL].into_iter().collect();
    let mut initial = BTreeSet::new();

    let truth = lm.export(BDD_TRUE);
    for a in 0..nsigma {
        for g in [false, true] {
            edges.push(SpecEdge { src: FAIL, action: a, green: g, dst: FAIL, label: truth.clone() });
        }
        edges.push(SpecEdge { src: SINK, action: a, green: false, dst: SINK, label: truth.clone() });
    }

    for t in ctx.initial_triples() {
        let id = states.len();
        states.push(SpecState::Normal(t));
        ids.insert(t, id);
        initial.insert(id);
        queue.push_back(t);
    }

    while let Some(t) = queue.pop_front() {
        if states.len() > STATE_CAP {
            return Err(SpecAutoError::StateCap(states.len()));
        }
        let src = ids[&t];
        if ctx.al.greens.contains(&t.q) {
            greens.insert(src);
        }
        let exp = mode.expand(&mut lm, t)?;
        let not_efail = lm.not(exp.efail);
        let nosynch = lm.and(not_efail, exp.nosynch_green);
        let live = {
            let nn = lm.not(exp.nosynch_green);
            lm.and(not_efail, nn)
        };
        for (a, act) in exp.actions.iter().enumerate() {
            if exp.efail != BDD_FALSE {
                edges.push(SpecEdge {
                    src,
                    action: a,
                    green: false,
                    dst: FAIL,
                    label: lm.export(exp.efail),
                });
            }
            if nosynch != BDD_FALSE {
                edges.push(SpecEdge {
                    src,
                    action: a,
                    green: true,
                    dst: FAIL,
                    label: lm.export(nosynch),
                });
            }
            let sink_pred = if act.enabled {
                let la = lm.var(a as u32);
                let nla = lm.not(la);
                lm.and(live, nla)
            } else {
                live
            };
            if sink_pred != BDD_FALSE {
                edges.push(SpecEdge {
                    src,
                    action: a,
                    green: false,
                    dst: SINK,
                    label: lm.export(sink_pred),
                });
            }
            if act.enabled {
                let la = lm.var(a as u32);
                let norm_pred = lm.and(live, la);
                if norm_pred != BDD_FALSE {
                    let label = lm.export(norm_pred);
                    for &(g, succ) in &act.succs {
                        let dst = *ids.entry(succ).or_insert_with(|| {
                            let id = states.len();
                            states.push(SpecState::Normal(succ));
                            queue.push_back(succ);
                            id
                        });
                        edges.push(SpecEdge { src, action: a, green: g, dst, label: label.clone() });
                    }
                }
            }
        }
    }

    Ok(SpecAutomaton { states, initial, edges, greens, sigma: ctx.sigma.clone() })
}

/// The specification automaton reinterpreted as a universal co-Büchi
/// automaton over `(a, L)` letters, green edges folded into doubled states.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecUcw {
    pub num_states: usize,
    pub initial: BTreeSet<usize>,
    /// (src, sigma index, label predicate over Σ bits, dst)
    pub edges: Vec<(usize, usize, SnapshotBdd, usize)>,
    pub greens: BTreeSet<usize>,
    pub sigma: Vec<ActionId>,
    /// Pre-conversion state count, for reports.
    pub pre_conversion_states: usize,
}

impl SpecAutomaton {
    pub fn num_normal_states(&self) -> usize {
        self.states.len() - 2
    }

    /// Canonical fingerprint for cross-checking construction modes: every
    /// edge expanded to its sorted label masks.
    pub fn fingerprint(&self) -> Vec<(usize, usize, bool, usize, Vec<u64>)> {
        let universe: Vec<u32> = (0..self.sigma.len() as u32).collect();
        let mut out: Vec<(usize, usize, bool, usize, Vec<u64>)> = self
            .edges
            .iter()
            .map(|e| (e.src, e.action, e.green, e.dst, e.label.minterms(&universe)))
            .filter(|e| !e.4.is_empty())
            .collect();
        out.sort();
        out
    }

    /// Fold green edges into doubled states and reinterpret as a universal
    /// co-Büchi automaton. Only unreachable states are pruned; the universal
    /// reading forbids dropping rejecting sinks.
    pub fn to_ucw(&self) -> SpecUcw {
        let id = |s: usize, flag: bool| s * 2 + flag as usize;
        let mut greens: BTreeSet<usize> = BTreeSet::new();
        for s in 0..self.states.len() {
            greens.insert(id(s, true));
            if self.greens.contains(&s) {
                greens.insert(id(s, false));
            }
        }
        let initial: BTreeSet<usize> = self.initial.iter().map(|&s| id(s, false)).collect();
        let mut edges: Vec<(usize, usize, SnapshotBdd, usize)> = Vec::new();
        for e in &self.edges {
            for flag in [false, true] {
                edges.push((id(e.src, flag), e.action, e.label.clone(), id(e.dst, e.green)));
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.states.len() * 2];
        for &(s, _, _, t) in &edges {
            adj[s].push(t);
        }
        let mut seen: BTreeSet<usize> = initial.clone();
        let mut queue: VecDeque<usize> = initial.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &t in &adj[s] {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        let remap: BTreeMap<usize, usize> =
            seen.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SpecUcw {
            num_states: seen.len(),
            initial: initial.iter().map(|s| remap[s]).collect(),
            edges: edges
                .into_iter()
                .filter(|(s, _, _, t)| seen.contains(s) && seen.contains(t))
                .map(|(s, a, l, t)| (remap[&s], a, l, remap[&t]))
                .collect(),
            greens: greens.iter().filter_map(|s| remap.get(s).copied()).collect(),
            sigma: self.sigma.clone(),
            pre_conversion_states: self.states.len(),
        }
    }

    /// Text dump with composite letters rendered as `a|{l1,l2}|g`.
    pub fn serialize(&self, table: &crate::csp::ActionTable) -> String {
        let mut out = String::new();
        out.push_str(&format!("states {}\n", self.states.len()));
        let set = |s: &BTreeSet<usize>| {
            s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("initial {}\n", set(&self.initial)));
        out.push_str(&format!("green {}\n", set(&self.greens)));
        for (i, s) in self.states.iter().enumerate() {
            let d = match s {
                SpecState::Fail => "Fail".to_string(),
                SpecState::Sink => "Sink".to_string(),
                SpecState::Normal(t) => format!("({},{},{})", t.q, t.r, t.e),
            };
            out.push_str(&format!("state {i} {d}\n"));
        }
        let universe: Vec<u32> = (0..self.sigma.len() as u32).collect();
        let mut lines = Vec::new();
        for e in &self.edges {
            for mask in e.label.minterms(&universe) {
                let actions: Vec<String> = (0..self.sigma.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| table.name(self.sigma[i]).to_string())
                    .collect();
                lines.push(format!(
                    "trans {} {}|{{{}}}|{} {}",
                    e.src,
                    table.name(self.sigma[e.action]),
                    actions.join(","),
                    if e.green { "g" } else { "-" },
                    e.dst
                ));
            }
        }
        lines.sort();
        lines.dedup();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Bounded violation-search oracle over labeled tree prefixes
// ---------------------------------------------------------------------------

/// Witness kinds found by the bounded tree-prefix oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationWitness {
    /// A consistent finite path after which the composition reaches a dead
    /// end with the safety complement accepting.
    Deadlock { path: Vec<ActionId>, trace: Vec<ActionId> },
    /// A consistent finite path followed by an infinite hidden-only suffix
    /// violating the liveness property while the offered label set is never
    /// enabled along the loop.
    AbandonedSuffix { path: Vec<ActionId> },
    /// A consistent repeating segment through the tree whose computation
    /// violates the liveness property while synchronizing infinitely often.
    RecurrentPath { node: Vec<ActionId> },
}

/// Brute-force search for tree-prefix violations, used only as a test oracle
/// against the specification-automaton construction. Scale-capped: depth at
/// most 6 and at most 3 public actions. Cycles are detected by revisiting
/// the same environment/liveness pair at a deeper node with an identical
/// remaining subtree, which is exact for trees generated by small machines.
pub fn check_violation_conditions(
    env: &Process,
    spec: &crate::csp::SpecPair,
    tree: &crate::coordinator::LabeledTreePrefix,
    num_actions: usize,
) -> Result<Option<ViolationWitness>, SpecAutoError> {
    if tree.depth > 6 || tree.sigma.len() > 3 {
        return Err(SpecAutoError::OracleScale(format!(
            "depth {} sigma {}",
            tree.depth,
            tree.sigma.len()
        )));
    }
    let letters: Vec<ActionId> = (0..num_actions).collect();
    let asc = spec.safety_complement.completed(&letters);
    let al = crate::ltl::to_nba(&crate::ltl::negate(&spec.liveness), &letters);

    // Condition (A): BFS over (env state, tree node, safety subset); a dead
    // end with the complement automaton accepting is a deadlock witness.
    {
        type Key = (usize, Vec<ActionId>, BTreeSet<usize>);
        let start: Key = (env.initial, Vec::new(), asc.initial.clone());
        let mut seen: BTreeSet<Key> = [start.clone()].into_iter().collect();
        let mut queue: VecDeque<(Key, Vec<ActionId>)> = VecDeque::new();
        queue.push_back((start, Vec::new()));
        while let Some(((e, path, subset), trace)) = queue.pop_front() {
            let label = &tree.labels[&path];
            let mut moves: Vec<(ActionId, usize, bool)> = Vec::new();
            for (a, e2) in env.outgoing(e) {
                if env.private.contains(&a) {
                    moves.push((a, e2, false));
                } else if label.contains(&a) {
                    moves.push((a, e2, true));
                }
            }
            if moves.is_empty() {
                if subset.iter().any(|r| asc.accepting.contains(r)) {
                    return Ok(Some(ViolationWitness::Deadlock { path, trace }));
                }
                continue;
            }
            for (a, e2, is_sync) in moves {
                if is_sync && path.len() == tree.depth {
                    continue; // beyond the known prefix
                }
                let mut subset2 = BTreeSet::new();
                for &r in &subset {
                    subset2.extend(asc.successors(r, a));
                }
                let path2 = if is_sync {
                    let mut p = path.clone();
                    p.push(a);
                    p
                } else {
                    path.clone()
                };
                let key: Key = (e2, path2, subset2);
                if seen.insert(key.clone()) {
                    let mut trace2 = trace.clone();
                    trace2.push(a);
                    queue.push_back((key, trace2));
                }
            }
        }
    }

    // Reachable (env, node, liveness) keys for conditions (B) and (C).
    type LKey = (usize, Vec<ActionId>, usize);
    let mut keys: Vec<LKey> = Vec::new();
    {
        let mut seen: BTreeSet<LKey> = BTreeSet::new();
        let mut queue: VecDeque<LKey> = VecDeque::new();
        for &q0 in &al.initial {
            let k: LKey = (env.initial, Vec::new(), q0);
            if seen.insert(k.clone()) {
                queue.push_back(k);
            }
        }
        while let Some((e, path, q)) = queue.pop_front() {
            keys.push((e, path.clone(), q));
            let label = &tree.labels[&path];
            for (a, e2) in env.outgoing(e) {
                let is_sync = !env.private.contains(&a);
                if is_sync && (!label.contains(&a) || path.len() == tree.depth) {
                    continue;
                }
                for q2 in al.successors(q, &a) {
                    let path2 = if is_sync {
                        let mut p = path.clone();
                        p.push(a);
                        p
                    } else {
                        path.clone()
                    };
                    let k: LKey = (e2, path2, q2);
                    if seen.insert(k.clone()) {
                        queue.push_back(k);
                    }
                }
            }
        }
    }

    // Condition (B): from any reachable key, a hidden-only green lasso whose
    // loop never enables an action offered at the node.
    for (e, path, q) in &keys {
        let label = &tree.labels[path];
        if hidden_green_lasso(env, &al, *e, *q, label) {
            return Ok(Some(ViolationWitness::AbandonedSuffix { path: path.clone() }));
        }
    }

    // Condition (C): from a reachable key, a consistent segment with a
    // synchronization and a liveness green returning to the same (env,
    // liveness) pair at a deeper node with an identical remaining subtree.
    for (e0, path0, q0) in &keys {
        // Flagged BFS: (env, node, liveness, green seen, sync seen).
        type FKey = (usize, Vec<ActionId>, usize, bool, bool);
        let start: FKey = (*e0, path0.clone(), *q0, al.greens.contains(q0), false);
        let mut seen: BTreeSet<FKey> = [start.clone()].into_iter().collect();
        let mut queue: VecDeque<FKey> = [start].into_iter().collect();
        while let Some((e, path, q, g, sy)) = queue.pop_front() {
            if e == *e0 && q == *q0 && g && sy && path.len() > path0.len() {
                let horizon = tree.depth - path.len();
                if subtrees_equal(tree, path0, &path, horizon) {
                    return Ok(Some(ViolationWitness::RecurrentPath { node: path0.clone() }));
                }
            }
            let label = &tree.labels[&path];
            for (a, e2) in env.outgoing(e) {
                let is_sync = !env.private.contains(&a);
                if is_sync && (!label.contains(&a) || path.len() == tree.depth) {
                    continue;
                }
                for q2 in al.successors(q, &a) {
                    let path2 = if is_sync {
                        let mut p = path.clone();
                        p.push(a);
                        p
                    } else {
                        path.clone()
                    };
                    let k: FKey =
                        (e2, path2, q2, g || al.greens.contains(&q2), sy || is_sync);
                    if seen.insert(k.clone()) {
                        queue.push_back(k);
                    }
                }
            }
        }
    }

    Ok(None)
}

/// A hidden-only lasso from `(e, q)` whose loop visits a liveness-negation
/// green state and never enables an action offered in `label`.
fn hidden_green_lasso(
    env: &Process,
    al: &Nba<ActionId>,
    e0: usize,
    q0: usize,
    label: &BTreeSet<ActionId>,
) -> bool {
    let nq = al.num_states.max(1);
    let node = |e: usize, q: usize| e * nq + q;
    let mut seen = vec![false; env.num_states() * nq];
    let mut queue = VecDeque::new();
    seen[node(e0, q0)] = true;
    queue.push_back((e0, q0));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    while let Some((e, q)) = queue.pop_front() {
        for (a, e2) in env.outgoing(e) {
            if !env.private.contains(&a) {
                continue;
            }
            for q2 in al.successors(q, &a) {
                edges.push((node(e, q), node(e2, q2)));
                if !seen[node(e2, q2)] {
                    seen[node(e2, q2)] = true;
                    queue.push_back((e2, q2));
                }
            }
        }
    }
    let avoid_ok = |x: usize| -> bool {
        let e = x / nq;
        env.enabled_public(e).intersection(label).next().is_none()
    };
    let loop_edges: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(x, t)| avoid_ok(x) && avoid_ok(t))
        .copied()
        .collect();
    let sccs = tarjan_sccs(env.num_states() * nq, &loop_edges);
    let mut scc_of = vec![usize::MAX; env.num_states() * nq];
    for (i, scc) in sccs.iter().enumerate() {
        for &x in scc {
            scc_of[x] = i;
        }
    }
    let mut cyclic = vec![false; sccs.len()];
    for &(x, t) in &loop_edges {
        if scc_of[x] == scc_of[t] {
            cyclic[scc_of[x]] = true;
        }
    }
    sccs.iter().enumerate().any(|(i, scc)| {
        cyclic[i] && scc.iter().any(|&x| seen[x] && al.greens.contains(&(x % nq)))
    })
}

fn subtrees_equal(
    tree: &crate::coordinator::LabeledTreePrefix,
    a: &[ActionId],
    b: &[ActionId],
    horizon: usize,
) -> bool {
    let mut stack = vec![Vec::new()];
    while let Some(suffix) = stack.pop() {
        let mut pa = a.to_vec();
        pa.extend(suffix.iter().copied());
        let mut pb = b.to_vec();
        pb.extend(suffix.iter().copied());
        let la = tree.labels.get(&pa);
        let lb = tree.labels.get(&pb);
        if la != lb {
            return false;
        }
        if suffix.len() < horizon {
            if let Some(l) = la {
                for &x in l {
                    let mut s2 = suffix.clone();
                    s2.push(x);
                    stack.push(s2);
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::flatten_network;
    use crate::ltl::{negate, to_nba};

    fn setup(k: usize) -> (Process, crate::parse::Model, Nba<ActionId>) {
        let m = crate::benchgen::example(k).unwrap();
        let env = flatten_network(&m.network, &m.table).unwrap();
        let universe: Vec<ActionId> = m.table.ids().collect();
        let al = to_nba(&negate(&m.spec.liveness), &universe);
        (env, m, al)
    }

    fn mask_of(ctx: &SpecContext, actions: &[ActionId]) -> u64 {
        actions.iter().map(|&a| 1u64 << ctx.sigma_index(a).unwrap()).sum()
    }

    #[test]
    fn enabled_closure_examples() {
        // Closure through a hidden step: after a0 in example 5, a0 becomes
        // enabled again only via the private b.
        let (env, m, al) = setup(5);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let ex = ExplicitMode::new(&ctx).unwrap();
        let a0 = ctx.sigma_index(m.table.lookup("a0").unwrap()).unwrap();
        assert!(ex.enabled(a0, env.initial));
        let e0 = *env.simulate(&[m.table.lookup("a0").unwrap()]).iter().next().unwrap();
        assert!(ex.enabled(a0, e0));

        // Example 1: E1 only loops on b; a0 never becomes enabled there.
        let (env1, m1, al1) = setup(1);
        let ctx1 = SpecContext::new(&al1, &m1.spec.safety_complement, &env1, m1.table.len());
        let ex1 = ExplicitMode::new(&ctx1).unwrap();
        let a0i = ctx1.sigma_index(m1.table.lookup("a0").unwrap()).unwrap();
        let e1 = *env1.simulate(&[m1.table.lookup("a1").unwrap()]).iter().next().unwrap();
        assert!(!ex1.enabled(a0i, e1));
    }

    #[test]
    fn efail_examples() {
        // Example 0: the STOP state is a dead end whatever the label set.
        let (env, m, al) = setup(0);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let a0 = m.table.lookup("a0").unwrap();
        let a1 = m.table.lookup("a1").unwrap();
        let stop = *env.simulate(&[a1]).iter().next().unwrap();
        let r0 = *ctx.asc.initial.iter().next().unwrap();
        assert!(ex.efail(r0, stop, 0));
        assert!(ex.efail(r0, stop, mask_of(&ctx, &[a0])));
        // The initial state offering {a0} continues; offering nothing
        // deadlocks immediately.
        assert!(!ex.efail(r0, env.initial, mask_of(&ctx, &[a0])));
        assert!(ex.efail(r0, env.initial, 0));
        // A state with a private self-loop never reaches the base case.
        let (env1, m1, al1) = setup(1);
        let ctx1 = SpecContext::new(&al1, &m1.spec.safety_complement, &env1, m1.table.len());
        let mut ex1 = ExplicitMode::new(&ctx1).unwrap();
        let e1 = *env1.simulate(&[m1.table.lookup("a1").unwrap()]).iter().next().unwrap();
        for l in 0..4u64 {
            assert!(!ex1.efail(0, e1, l));
        }
    }

    #[test]
    fn eprivate_and_gen_eprivate_examples() {
        // Example 1 at E1: the b loop hits a liveness-negation green.
        let (env, m, al) = setup(1);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let e1 = *env.simulate(&[m.table.lookup("a1").unwrap()]).iter().next().unwrap();
        let q0 = *ctx.al.initial.iter().next().unwrap();
        let s = Triple { q: q0, r: 0, e: e1 };
        let reach = ex.eprivate_from(s);
        let si = ex.triple_index(s);
        let self_entry = reach.iter().find(|&&(t, _, _)| t == si).unwrap();
        // Base case: the reflexive entry carries the greenness of q; cycles
        // back to the source may add the other variant on top.
        let g0 = ctx.al.greens.contains(&q0);
        assert!(if g0 { self_entry.2 } else { self_entry.1 });
        let greens = &ctx.al.greens;
        assert!(reach
            .iter()
            .any(|&(t, _, with_g)| with_g && greens.contains(&ex.triple_of(t).q)));

        // Empty label mask: coincides with the unrestricted closure.
        let gen0 = ex.gen_eprivate_from(s, 0);
        assert_eq!(&*reach, &gen0);

        // Example 3 at E1 with {a0}: a0 stays enabled, so even the reflexive
        // entry is blocked.
        let (env3, m3, al3) = setup(3);
        let ctx3 = SpecContext::new(&al3, &m3.spec.safety_complement, &env3, m3.table.len());
        let mut ex3 = ExplicitMode::new(&ctx3).unwrap();
        let a0 = m3.table.lookup("a0").unwrap();
        let e1_3 = (0..env3.num_states())
            .find(|&e| env3.has_private_transition(e) && !env3.enabled_public(e).is_empty())
            .unwrap();
        let s3 = Triple { q: *ctx3.al.initial.iter().next().unwrap(), r: 0, e: e1_3 };
        assert!(ex3.gen_eprivate_from(s3, mask_of(&ctx3, &[a0])).is_empty());
    }

    #[test]
    fn no_synch_examples() {
        // Example 2 at E1 with {a0}: the b lasso avoids the label and visits
        // a green, driving Fail.
        let (env, m, al) = setup(2);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let a0 = m.table.lookup("a0").unwrap();
        let e1 = (0..env.num_states())
            .find(|&e| env.has_private_transition(e) && env.enabled_public(e).is_empty())
            .unwrap();
        let s = Triple { q: *ctx.al.initial.iter().next().unwrap(), r: 0, e: e1 };
        assert!(ex.no_synch(s, mask_of(&ctx, &[a0]), true));

        // Example 3 at E1 with {a0}: a0 is enabled in the loop, no witness.
        let (env3, m3, al3) = setup(3);
        let ctx3 = SpecContext::new(&al3, &m3.spec.safety_complement, &env3, m3.table.len());
        let mut ex3 = ExplicitMode::new(&ctx3).unwrap();
        let a0_3 = m3.table.lookup("a0").unwrap();
        let e1_3 = (0..env3.num_states())
            .find(|&e| env3.has_private_transition(e) && !env3.enabled_public(e).is_empty())
            .unwrap();
        let s3 = Triple { q: *ctx3.al.initial.iter().next().unwrap(), r: 0, e: e1_3 };
        assert!(!ex3.no_synch(s3, mask_of(&ctx3, &[a0_3]), true));

        // Without private actions the relation is empty.
        let m_arb = crate::benchgen::arbiter(2).unwrap();
        let env_a = flatten_network(&m_arb.network, &m_arb.table).unwrap();
        let universe: Vec<ActionId> = m_arb.table.ids().collect();
        let al_a = to_nba(&negate(&m_arb.spec.liveness), &universe);
        let ctx_a =
            SpecContext::new(&al_a, &m_arb.spec.safety_complement, &env_a, m_arb.table.len());
        let mut ex_a = ExplicitMode::new(&ctx_a).unwrap();
        let s_a =
            Triple { q: *ctx_a.al.initial.iter().next().unwrap(), r: 0, e: env_a.initial };
        for l in 0..8u64 {
            assert!(!ex_a.no_synch(s_a, l, true));
            assert!(!ex_a.no_synch(s_a, l, false));
        }
    }

    #[test]
    fn normal_trans_examples() {
        // Without private actions the relation is the plain joint step with
        // the green bit from the endpoints.
        let m_arb = crate::benchgen::arbiter(2).unwrap();
        let env = flatten_network(&m_arb.network, &m_arb.table).unwrap();
        let universe: Vec<ActionId> = m_arb.table.ids().collect();
        let al = to_nba(&negate(&m_arb.spec.liveness), &universe);
        let ctx = SpecContext::new(&al, &m_arb.spec.safety_complement, &env, m_arb.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let req0 = m_arb.table.lookup("request.0").unwrap();
        let ai = ctx.sigma_index(req0).unwrap();
        let s = Triple { q: *ctx.al.initial.iter().next().unwrap(), r: 0, e: env.initial };
        let succs = ex.normal_trans(s, ai);
        assert!(!succs.is_empty());
        for &(g, t) in &succs {
            assert!(ex.joint(s, req0, t));
            assert_eq!(g, ctx.al.greens.contains(&t.q) || ctx.al.greens.contains(&s.q));
        }

        // Example 5 on a0: the hidden return composes into the step and can
        // set the green bit.
        let (env5, m5, al5) = setup(5);
        let ctx5 = SpecContext::new(&al5, &m5.spec.safety_complement, &env5, m5.table.len());
        let mut ex5 = ExplicitMode::new(&ctx5).unwrap();
        let ai5 = ctx5.sigma_index(m5.table.lookup("a0").unwrap()).unwrap();
        let s5 = Triple { q: *ctx5.al.initial.iter().next().unwrap(), r: 0, e: env5.initial };
        let succs5 = ex5.normal_trans(s5, ai5);
        assert!(succs5.iter().any(|&(g, _)| g));

        // No reachable joint step: empty relation at that source.
        let (env1, m1, al1) = setup(1);
        let ctx1 = SpecContext::new(&al1, &m1.spec.safety_complement, &env1, m1.table.len());
        let mut ex1 = ExplicitMode::new(&ctx1).unwrap();
        let e1 = *env1.simulate(&[m1.table.lookup("a1").unwrap()]).iter().next().unwrap();
        let a0i = ctx1.sigma_index(m1.table.lookup("a0").unwrap()).unwrap();
        let s1 = Triple { q: *ctx1.al.initial.iter().next().unwrap(), r: 0, e: e1 };
        assert!(ex1.normal_trans(s1, a0i).is_empty());
    }

    #[test]
    fn explicit_symbolic_agree_on_examples() {
        for k in 0..=5 {
            let (env, m, al) = setup(k);
            let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
            let mut ex = ExplicitMode::new(&ctx).unwrap();
            let auto_ex = build_spec_automaton(&ctx, &mut ex).unwrap();
            let mut sy = SymbolicMode::new(&ctx).unwrap();
            let auto_sy = build_spec_automaton(&ctx, &mut sy).unwrap();
            assert_eq!(auto_ex.states, auto_sy.states, "example {k}");
            assert_eq!(auto_ex.fingerprint(), auto_sy.fingerprint(), "example {k}");
            let bound = ctx.al.num_states.max(1) * ctx.asc.num_states * env.num_states() + 2;
            assert!(auto_ex.states.len() <= bound);
            let ucw = auto_ex.to_ucw();
            assert!(ucw.num_states <= 2 * auto_ex.states.len());
        }
    }

    #[test]
    fn fail_and_sink_loop_shape() {
        let (env, m, al) = setup(1);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let auto = build_spec_automaton(&ctx, &mut ex).unwrap();
        let universe: Vec<u32> = (0..ctx.sigma.len() as u32).collect();
        let full = 1u64 << ctx.sigma.len();
        for a in 0..ctx.sigma.len() {
            for g in [false, true] {
                let found = auto.edges.iter().any(|e| {
                    e.src == FAIL
                        && e.dst == FAIL
                        && e.action == a
                        && e.green == g
                        && e.label.minterms(&universe).len() as u64 == full
                });
                assert!(found, "Fail self-loop on action {a} g={g}");
            }
            let sink_green =
                auto.edges.iter().any(|e| e.src == SINK && e.action == a && e.green);
            assert!(!sink_green, "Sink must carry only non-green self-loops");
        }
        assert!(auto.greens.contains(&FAIL));
        assert!(!auto.greens.contains(&SINK));
    }

    #[test]
    fn efail_antitone_in_label_set() {
        let (env, m, al) = setup(0);
        let ctx = SpecContext::new(&al, &m.spec.safety_complement, &env, m.table.len());
        let mut ex = ExplicitMode::new(&ctx).unwrap();
        let masks = 1u64 << ctx.sigma.len();
        for small in 0..masks {
            for big in 0..masks {
                if small & big == small && small != big {
                    for r in 0..ctx.asc.num_states {
                        for e in 0..env.num_states() {
                            // Larger label sets never create new failures.
                            if ex.efail(r, e, big) {
                                assert!(ex.efail(r, e, small));
                            }
                        }
                    }
                }
            }
        }
    }
}
