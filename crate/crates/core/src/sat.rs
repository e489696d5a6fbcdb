//! Built-in CNF solver: two-watched-literal unit propagation with
//! conflict-driven clause learning (1UIP), activity-ordered decisions, phase
//! saving, Luby restarts, and learned-clause reduction. Learning can be
//! switched off, leaving chronological backtracking.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

pub type Lit = i32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Vec<bool>),
    Unsat,
    Cancelled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Unassigned,
    True,
    False,
}

fn lit_value(assign: &[Value], l: Lit) -> Value {
    let v = assign[l.unsigned_abs() as usize];
    match (v, l > 0) {
        (Value::Unassigned, _) => Value::Unassigned,
        (Value::True, true) | (Value::False, false) => Value::True,
        _ => Value::False,
    }
}

struct Clause {
    lits: Vec<Lit>,
    learned: bool,
    activity: f64,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    prop_head: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    saved_phase: Vec<bool>,
    heap: VarHeap,
    pub learning: bool,
    conflicts: u64,
    cancel: Option<Arc<AtomicBool>>,
}

/// Binary max-heap over variable activities with a position index, so
/// decisions avoid linear scans.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(num_vars: usize) -> Self {
        let heap: Vec<usize> = (1..=num_vars).collect();
        let mut pos = vec![NOT_IN_HEAP; num_vars + 1];
        for (i, &v) in heap.iter().enumerate() {
            pos[v] = i;
        }
        VarHeap { heap, pos }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if activity[self.heap[i]] <= activity[self.heap[parent]] {
                break;
            }
            self.heap.swap(i, parent);
            self.pos[self.heap[i]] = i;
            self.pos[self.heap[parent]] = parent;
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        loop {
            let l = 2 * i + 1;
            let r = 2 * i + 2;
            let mut best = i;
            if l < self.heap.len() && activity[self.heap[l]] > activity[self.heap[best]] {
                best = l;
            }
            if r < self.heap.len() && activity[self.heap[r]] > activity[self.heap[best]] {
                best = r;
            }
            if best == i {
                break;
            }
            self.heap.swap(i, best);
            self.pos[self.heap[i]] = i;
            self.pos[self.heap[best]] = best;
            i = best;
        }
    }

    fn push(&mut self, v: usize, activity: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.pos[v], activity);
    }

    fn pop(&mut self, activity: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, activity: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v], activity);
        }
    }
}

fn watch_index(l: Lit) -> usize {
    let v = l.unsigned_abs() as usize;
    v * 2 + (l < 0) as usize
}

impl Solver {
    pub fn new(num_vars: usize) -> Self {
        Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); (num_vars + 1) * 2],
            assign: vec![Value::Unassigned; num_vars + 1],
            level: vec![0; num_vars + 1],
            reason: vec![None; num_vars + 1],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            prop_head: 0,
            activity: vec![0.0; num_vars + 1],
            var_inc: 1.0,
            cla_inc: 1.0,
            saved_phase: vec![false; num_vars + 1],
            heap: VarHeap::new(num_vars),
            learning: true,
            conflicts: 0,
            cancel: None,
        }
    }

    pub fn set_cancel_flag(&mut self, flag: Arc<AtomicBool>) {
        self.cancel = Some(flag);
    }

    /// Returns false if the formula is already unsatisfiable at level 0.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        debug_assert!(lits.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        let mut ls: Vec<Lit> = lits.to_vec();
        ls.sort_unstable();
        ls.dedup();
        if ls.windows(2).any(|w| w[0] == -w[1]) {
            return true; // tautology
        }
        ls.retain(|&l| lit_value(&self.assign, l) != Value::False || self.level[l.unsigned_abs() as usize] > 0);
        if ls.iter().any(|&l| lit_value(&self.assign, l) == Value::True && self.level[l.unsigned_abs() as usize] == 0) {
            return true;
        }
        match ls.len() {
            0 => false,
            1 => {
                if lit_value(&self.assign, ls[0]) == Value::False {
                    return false;
                }
                if lit_value(&self.assign, ls[0]) == Value::Unassigned {
                    self.enqueue(ls[0], None);
                }
                self.propagate().is_none()
            }
            _ => {
                self.attach(ls, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learned: bool) -> usize {
        let idx = self.clauses.len();
        self.watches[watch_index(lits[0])].push(idx);
        self.watches[watch_index(lits[1])].push(idx);
        self.clauses.push(Clause { lits, learned, activity: 0.0 });
        idx
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.unsigned_abs() as usize;
        self.assign[v] = if l > 0 { Value::True } else { Value::False };
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.prop_head < self.trail.len() {
            let l = self.trail[self.prop_head];
            self.prop_head += 1;
            let falsified = -l;
            let widx = watch_index(falsified);
            let mut i = 0;
            'watchers: while i < self.watches[widx].len() {
                let ci = self.watches[widx][i];
                // Ensure the falsified literal is at position 1.
                if self.clauses[ci].lits[0] == falsified {
                    self.clauses[ci].lits.swap(0, 1);
                }
                let first = self.clauses[ci].lits[0];
                if lit_value(&self.assign, first) == Value::True {
                    i += 1;
                    continue;
                }
                // Look for a new watch.
                for k in 2..self.clauses[ci].lits.len() {
                    let cand = self.clauses[ci].lits[k];
                    if lit_value(&self.assign, cand) != Value::False {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[widx].swap_remove(i);
                        self.watches[watch_index(cand)].push(ci);
                        continue 'watchers;
                    }
                }
                // Unit or conflict.
                if lit_value(&self.assign, first) == Value::False {
                    self.prop_head = self.trail.len();
                    return Some(ci);
                }
                self.enqueue(first, Some(ci));
                i += 1;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            // Rescaling preserves order; no heap fix needed.
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, ci: usize) {
        self.clauses[ci].activity += self.cla_inc;
        if self.clauses[ci].activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis; returns the learned clause and the
    /// backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learned: Vec<Lit> = vec![0];
        let mut seen = vec![false; self.num_vars + 1];
        let mut counter = 0usize;
        let mut p: Lit = 0;
        let mut trail_idx = self.trail.len();
        let cur_level = self.trail_lim.len() as u32;

        loop {
            self.bump_clause(confl);
            let start = if p == 0 { 0 } else { 1 };
            let lits: Vec<Lit> = self.clauses[confl].lits[start..].to_vec();
            for q in lits {
                let v = q.unsigned_abs() as usize;
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == cur_level {
                        counter += 1;
                    } else {
                        learned.push(q);
                    }
                }
            }
            // Find the next literal to resolve on.
            loop {
                trail_idx -= 1;
                p = self.trail[trail_idx];
                if seen[p.unsigned_abs() as usize] {
                    break;
                }
            }
            let v = p.unsigned_abs() as usize;
            seen[v] = false;
            counter -= 1;
            if counter == 0 {
                learned[0] = -p;
                break;
            }
            confl = self.reason[v].expect("resolved literal has a reason");
        }

        let backjump = if learned.len() == 1 {
            0
        } else {
            let mut max = 0u32;
            for &q in &learned[1..] {
                max = max.max(self.level[q.unsigned_abs() as usize]);
            }
            // Put a literal of the backjump level in the second watch slot.
            let pos = learned[1..]
                .iter()
                .position(|&q| self.level[q.unsigned_abs() as usize] == max)
                .unwrap()
                + 1;
            learned.swap(1, pos);
            max
        };
        (learned, backjump)
    }

    fn backtrack(&mut self, target: u32) {
        while self.trail_lim.len() as u32 > target {
            let lim = self.trail_lim.pop().unwrap();
            while self.trail.len() > lim {
                let l = self.trail.pop().unwrap();
                let v = l.unsigned_abs() as usize;
                self.saved_phase[v] = l > 0;
                self.assign[v] = Value::Unassigned;
                self.reason[v] = None;
                self.heap.push(v, &self.activity);
            }
        }
        self.prop_head = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v] == Value::Unassigned {
                return Some(if self.saved_phase[v] { v as Lit } else { -(v as Lit) });
            }
        }
        None
    }

    fn reduce_learned(&mut self) {
        // Drop the less active half of learned clauses not locked as reasons.
        let mut learned: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.clauses[i].learned && self.clauses[i].lits.len() > 2)
            .collect();
        if learned.len() < 2000 {
            return;
        }
        learned.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut locked = vec![false; self.clauses.len()];
        for r in self.reason.iter().flatten() {
            locked[*r] = true;
        }
        let to_remove: std::collections::HashSet<usize> = learned
            .iter()
            .take(learned.len() / 2)
            .copied()
            .filter(|&i| !locked[i])
            .collect();
        if to_remove.is_empty() {
            return;
        }
        // Rebuild clause store and watches.
        let mut remap: Vec<Option<usize>> = vec![None; self.clauses.len()];
        let mut kept = Vec::new();
        for (i, c) in self.clauses.drain(..).enumerate() {
            if to_remove.contains(&i) {
                continue;
            }
            remap[i] = Some(kept.len());
            kept.push(c);
        }
        self.clauses = kept;
        for w in &mut self.watches {
            w.clear();
        }
        for (i, c) in self.clauses.iter().enumerate() {
            self.watches[watch_index(c.lits[0])].push(i);
            self.watches[watch_index(c.lits[1])].push(i);
        }
        for r in &mut self.reason {
            if let Some(old) = *r {
                *r = remap[old];
            }
        }
    }

    pub fn solve(&mut self) -> SolveResult {
        if self.propagate().is_some() {
            return SolveResult::Unsat;
        }
        let mut luby_idx = 1u64;
        let mut restart_budget = 64 * luby(luby_idx);
        loop {
            if self.conflicts % 1024 == 0 {
                if let Some(flag) = &self.cancel {
                    if flag.load(Ordering::Relaxed) {
                        return SolveResult::Cancelled;
                    }
                }
            }
            match self.propagate() {
                Some(confl) => {
                    self.conflicts += 1;
                    if self.trail_lim.is_empty() {
                        return SolveResult::Unsat;
                    }
                    if self.learning {
                        let (learned, backjump) = self.analyze(confl);
                        self.backtrack(backjump);
                        if learned.len() == 1 {
                            self.enqueue(learned[0], None);
                        } else {
                            let ci = self.attach(learned.clone(), true);
                            self.enqueue(learned[0], Some(ci));
                        }
                        self.var_inc /= 0.95;
                        self.cla_inc /= 0.999;
                        restart_budget = restart_budget.saturating_sub(1);
                        if restart_budget == 0 {
                            luby_idx += 1;
                            restart_budget = 64 * luby(luby_idx);
                            self.backtrack(0);
                        }
                        if self.conflicts % 8192 == 0 {
                            self.reduce_learned();
                        }
                    } else {
                        // Chronological: flip the most recent decision.
                        let lim = *self.trail_lim.last().unwrap();
                        let decision = self.trail[lim];
                        self.backtrack(self.trail_lim.len() as u32 - 1);
                        if lit_value(&self.assign, -decision) == Value::Unassigned {
                            self.enqueue(-decision, None);
                        } else {
                            return SolveResult::Unsat;
                        }
                    }
                }
                None => match self.pick_branch() {
                    None => {
                        let model = (1..=self.num_vars)
                            .map(|v| self.assign[v] == Value::True)
                            .collect();
                        return SolveResult::Sat(model);
                    }
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                },
            }
        }
    }
}

fn luby(mut i: u64) -> u64 {
    // Sequence 1 1 2 1 1 2 4 ...
    loop {
        let k = 64 - i.leading_zeros() as u64;
        if i == (1 << k) - 1 {
            return 1 << (k - 1);
        }
        i = i - (1 << (k - 1)) + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve_clauses(n: usize, clauses: &[Vec<Lit>], learning: bool) -> SolveResult {
        let mut s = Solver::new(n);
        s.learning = learning;
        for c in clauses {
            if !s.add_clause(c) {
                return SolveResult::Unsat;
            }
        }
        s.solve()
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(solve_clauses(1, &[vec![1], vec![-1]], true), SolveResult::Unsat);
        match solve_clauses(2, &[vec![1, 2], vec![-1]], true) {
            SolveResult::Sat(m) => {
                assert!(!m[0]);
                assert!(m[1]);
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn pigeonhole_4_into_3_unsat() {
        // Variables p(i,j) = pigeon i in hole j, i in 0..4, j in 0..3.
        let var = |i: usize, j: usize| (i * 3 + j + 1) as Lit;
        let mut clauses = Vec::new();
        for i in 0..4 {
            clauses.push((0..3).map(|j| var(i, j)).collect::<Vec<_>>());
        }
        for j in 0..3 {
            for i1 in 0..4 {
                for i2 in i1 + 1..4 {
                    clauses.push(vec![-var(i1, j), -var(i2, j)]);
                }
            }
        }
        assert_eq!(solve_clauses(12, &clauses, true), SolveResult::Unsat);
        assert_eq!(solve_clauses(12, &clauses, false), SolveResult::Unsat);
    }

    #[test]
    fn random_3sat_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for round in 0..60 {
            let n = rng.gen_range(3..=10);
            let m = rng.gen_range(2..=30);
            let clauses: Vec<Vec<Lit>> = (0..m)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let v = rng.gen_range(1..=n) as Lit;
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let brute = (0..1u32 << n).any(|mask| {
                clauses.iter().all(|c| {
                    c.iter().any(|&l| {
                        let bit = mask >> (l.unsigned_abs() - 1) & 1 == 1;
                        if l > 0 {
                            bit
                        } else {
                            !bit
                        }
                    })
                })
            });
            for learning in [true, false] {
                let got = solve_clauses(n, &clauses, learning);
                match (&got, brute) {
                    (SolveResult::Sat(model), true) => {
                        assert!(clauses.iter().all(|c| c.iter().any(|&l| {
                            let bit = model[l.unsigned_abs() as usize - 1];
                            if l > 0 {
                                bit
                            } else {
                                !bit
                            }
                        })), "round {round}: bad model");
                    }
                    (SolveResult::Unsat, false) => {}
                    other => panic!("round {round} learning={learning}: {other:?} vs brute {brute}"),
                }
            }
        }
    }
}
