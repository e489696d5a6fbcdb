//! Reduced ordered binary decision diagrams with hash-consed nodes, memoized
//! apply/ITE, quantification, order-compatible renaming, and least fixpoints.

use std::collections::HashMap;

use thiserror::Error;

/// Handle to a node inside one manager. Constants live at the top indices so
/// freshly created managers have them ready.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd(u32);

pub const BDD_FALSE: Bdd = Bdd(0);
pub const BDD_TRUE: Bdd = Bdd(1);

const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    level: u32,
    lo: Bdd,
    hi: Bdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BddError {
    #[error("node limit exceeded ({0} nodes)")]
    NodeLimit(usize),
    #[error("rename map is not order-compatible")]
    BadRename,
    #[error("fixpoint iteration cap {0} exceeded")]
    FixpointCap(usize),
}

/// Single-owner node store. Levels strictly increase from root to leaves.
pub struct BddManager {
    nodes: Vec<Node>,
    unique: HashMap<Node, Bdd>,
    apply_cache: HashMap<(Op, Bdd, Bdd), Bdd>,
    ite_cache: HashMap<(Bdd, Bdd, Bdd), Bdd>,
    not_cache: HashMap<Bdd, Bdd>,
    node_limit: usize,
}

impl BddManager {
    pub fn new() -> Self {
        let mut m = BddManager {
            nodes: Vec::new(),
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            ite_cache: HashMap::new(),
            not_cache: HashMap::new(),
            node_limit: 50_000_000,
        };
        // Index 0 = false, 1 = true.
        m.nodes.push(Node { level: TERMINAL_LEVEL, lo: BDD_FALSE, hi: BDD_FALSE });
        m.nodes.push(Node { level: TERMINAL_LEVEL, lo: BDD_TRUE, hi: BDD_TRUE });
        m
    }

    pub fn with_node_limit(limit: usize) -> Self {
        let mut m = Self::new();
        m.node_limit = limit;
        m
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, v: bool) -> Bdd {
        if v {
            BDD_TRUE
        } else {
            BDD_FALSE
        }
    }

    fn node(&self, f: Bdd) -> Node {
        self.nodes[f.0 as usize]
    }

    pub fn level(&self, f: Bdd) -> Option<u32> {
        let n = self.node(f);
        (n.level != TERMINAL_LEVEL).then_some(n.level)
    }

    fn mk(&mut self, level: u32, lo: Bdd, hi: Bdd) -> Result<Bdd, BddError> {
        if lo == hi {
            return Ok(lo);
        }
        let n = Node { level, lo, hi };
        if let Some(&f) = self.unique.get(&n) {
            return Ok(f);
        }
        if self.nodes.len() >= self.node_limit {
            return Err(BddError::NodeLimit(self.node_limit));
        }
        let f = Bdd(self.nodes.len() as u32);
        self.nodes.push(n);
        self.unique.insert(n, f);
        Ok(f)
    }

    pub fn var(&mut self, level: u32) -> Bdd {
        self.mk(level, BDD_FALSE, BDD_TRUE).expect("var under node limit")
    }

    pub fn nvar(&mut self, level: u32) -> Bdd {
        self.mk(level, BDD_TRUE, BDD_FALSE).expect("var under node limit")
    }

    pub fn not(&mut self, f: Bdd) -> Bdd {
        if f == BDD_TRUE {
            return BDD_FALSE;
        }
        if f == BDD_FALSE {
            return BDD_TRUE;
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let n = self.node(f);
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.level, lo, hi).expect("negation adds no fresh structure");
        self.not_cache.insert(f, r);
        r
    }

    fn apply(&mut self, op: Op, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        match op {
            Op::And => {
                if f == BDD_FALSE || g == BDD_FALSE {
                    return Ok(BDD_FALSE);
                }
                if f == BDD_TRUE {
                    return Ok(g);
                }
                if g == BDD_TRUE || f == g {
                    return Ok(f);
                }
            }
            Op::Or => {
                if f == BDD_TRUE || g == BDD_TRUE {
                    return Ok(BDD_TRUE);
                }
                if f == BDD_FALSE {
                    return Ok(g);
                }
                if g == BDD_FALSE || f == g {
                    return Ok(f);
                }
            }
            Op::Xor => {
                if f == BDD_FALSE {
                    return Ok(g);
                }
                if g == BDD_FALSE {
                    return Ok(f);
                }
                if f == g {
                    return Ok(BDD_FALSE);
                }
            }
        }
        let key = if f <= g { (op, f, g) } else { (op, g, f) };
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let nf = self.node(f);
        let ng = self.node(g);
        let level = nf.level.min(ng.level);
        let (flo, fhi) = if nf.level == level { (nf.lo, nf.hi) } else { (f, f) };
        let (glo, ghi) = if ng.level == level { (ng.lo, ng.hi) } else { (g, g) };
        let lo = self.apply(op, flo, glo)?;
        let hi = self.apply(op, fhi, ghi)?;
        let r = self.mk(level, lo, hi)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.try_and(f, g).expect("node limit exceeded")
    }
    pub fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.try_or(f, g).expect("node limit exceeded")
    }
    pub fn xor(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::Xor, f, g).expect("node limit exceeded")
    }
    pub fn try_and(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        self.apply(Op::And, f, g)
    }
    pub fn try_or(&mut self, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        self.apply(Op::Or, f, g)
    }

    pub fn iff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let x = self.xor(f, g);
        self.not(x)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let nf = self.not(f);
        self.or(nf, g)
    }

    pub fn ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> Bdd {
        if f == BDD_TRUE {
            return g;
        }
        if f == BDD_FALSE {
            return h;
        }
        if g == h {
            return g;
        }
        if g == BDD_TRUE && h == BDD_FALSE {
            return f;
        }
        if g == BDD_FALSE && h == BDD_TRUE {
            return self.not(f);
        }
        let key = (f, g, h);
        if let Some(&r) = self.ite_cache.get(&key) {
            return r;
        }
        let levels = [self.node(f).level, self.node(g).level, self.node(h).level];
        let level = *levels.iter().min().unwrap();
        let split = |m: &BddManager, x: Bdd| {
            let n = m.node(x);
            if n.level == level {
                (n.lo, n.hi)
            } else {
                (x, x)
            }
        };
        let (flo, fhi) = split(self, f);
        let (glo, ghi) = split(self, g);
        let (hlo, hhi) = split(self, h);
        let lo = self.ite(flo, glo, hlo);
        let hi = self.ite(fhi, ghi, hhi);
        let r = self.mk(level, lo, hi).expect("node limit exceeded");
        self.ite_cache.insert(key, r);
        r
    }

    /// Existential quantification over the given levels.
    pub fn exists(&mut self, f: Bdd, vars: &[u32]) -> Bdd {
        let mut sorted: Vec<u32> = vars.to_vec();
        sorted.sort_unstable();
        let mut memo = HashMap::new();
        self.exists_rec(f, &sorted, &mut memo)
    }

    fn exists_rec(&mut self, f: Bdd, vars: &[u32], memo: &mut HashMap<Bdd, Bdd>) -> Bdd {
        let n = self.node(f);
        if n.level == TERMINAL_LEVEL {
            return f;
        }
        if vars.last().map_or(true, |&max| n.level > max) {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.exists_rec(n.lo, vars, memo);
        let hi = self.exists_rec(n.hi, vars, memo);
        let r = if vars.binary_search(&n.level).is_ok() {
            self.or(lo, hi)
        } else {
            self.mk(n.level, lo, hi).expect("node limit exceeded")
        };
        memo.insert(f, r);
        r
    }

    pub fn forall(&mut self, f: Bdd, vars: &[u32]) -> Bdd {
        let nf = self.not(f);
        let ex = self.exists(nf, vars);
        self.not(ex)
    }

    /// Variable substitution. The map must be injective and order-compatible:
    /// relative level order of mapped variables is preserved, and images do
    /// not cross unmapped variables occurring in `f`.
    pub fn rename(&mut self, f: Bdd, map: &[(u32, u32)]) -> Result<Bdd, BddError> {
        let mut sorted = map.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0].1 >= w[1].1 || w[0].0 == w[1].0 {
                return Err(BddError::BadRename);
            }
        }
        // Collect levels present in f and check monotonicity of the full
        // transformation (mapped levels move, others stay).
        let mut present = Vec::new();
        self.collect_levels(f, &mut present);
        present.sort_unstable();
        present.dedup();
        let image = |lvl: u32| -> u32 {
            match sorted.binary_search_by_key(&lvl, |&(from, _)| from) {
                Ok(i) => sorted[i].1,
                Err(_) => lvl,
            }
        };
        let mut prev = None;
        for &lvl in &present {
            let img = image(lvl);
            if let Some(p) = prev {
                if img <= p {
                    return Err(BddError::BadRename);
                }
            }
            prev = Some(img);
        }
        let mut memo = HashMap::new();
        self.rename_rec(f, &sorted, &mut memo)
    }

    fn rename_rec(
        &mut self,
        f: Bdd,
        map: &[(u32, u32)],
        memo: &mut HashMap<Bdd, Bdd>,
    ) -> Result<Bdd, BddError> {
        let n = self.node(f);
        if n.level == TERMINAL_LEVEL {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let lo = self.rename_rec(n.lo, map, memo)?;
        let hi = self.rename_rec(n.hi, map, memo)?;
        let lvl = match map.binary_search_by_key(&n.level, |&(from, _)| from) {
            Ok(i) => map[i].1,
            Err(_) => n.level,
        };
        let r = self.mk(lvl, lo, hi)?;
        memo.insert(f, r);
        Ok(r)
    }

    fn collect_levels(&self, f: Bdd, out: &mut Vec<u32>) {
        let mut stack = vec![f];
        let mut seen = std::collections::HashSet::new();
        while let Some(g) = stack.pop() {
            if !seen.insert(g) {
                continue;
            }
            let n = self.node(g);
            if n.level == TERMINAL_LEVEL {
                continue;
            }
            out.push(n.level);
            stack.push(n.lo);
            stack.push(n.hi);
        }
    }

    /// Cofactor: fix variable `level` to `value`.
    pub fn restrict(&mut self, f: Bdd, level: u32, value: bool) -> Bdd {
        let mut memo = HashMap::new();
        self.restrict_rec(f, level, value, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        f: Bdd,
        level: u32,
        value: bool,
        memo: &mut HashMap<Bdd, Bdd>,
    ) -> Bdd {
        let n = self.node(f);
        if n.level == TERMINAL_LEVEL || n.level > level {
            return f;
        }
        if n.level == level {
            return if value { n.hi } else { n.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.restrict_rec(n.lo, level, value, memo);
        let hi = self.restrict_rec(n.hi, level, value, memo);
        let r = self.mk(n.level, lo, hi).expect("restrict shrinks");
        memo.insert(f, r);
        r
    }

    /// Least fixpoint of a monotone transformer from `bottom`, with an
    /// iteration safety cap.
    pub fn lfp(
        &mut self,
        bottom: Bdd,
        cap: usize,
        mut step: impl FnMut(&mut BddManager, Bdd) -> Result<Bdd, BddError>,
    ) -> Result<Bdd, BddError> {
        let mut current = bottom;
        for _ in 0..=cap {
            let next = step(self, current)?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
        Err(BddError::FixpointCap(cap))
    }

    /// Evaluate under a total assignment level → bool.
    pub fn eval(&self, f: Bdd, assignment: &dyn Fn(u32) -> bool) -> bool {
        let mut cur = f;
        loop {
            let n = self.node(cur);
            if n.level == TERMINAL_LEVEL {
                return cur == BDD_TRUE;
            }
            cur = if assignment(n.level) { n.hi } else { n.lo };
        }
    }

    /// Minterm of a conjunction of literals (level, positive).
    pub fn cube(&mut self, literals: &[(u32, bool)]) -> Bdd {
        let mut sorted = literals.to_vec();
        sorted.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut acc = BDD_TRUE;
        for &(lvl, pos) in &sorted {
            acc = if pos {
                self.mk(lvl, BDD_FALSE, acc).expect("cube")
            } else {
                self.mk(lvl, acc, BDD_FALSE).expect("cube")
            };
        }
        acc
    }

    /// Export a function as a standalone node list (var, lo, hi) with the
    /// root last; terminals are encoded as indices 0/1. Used to hand
    /// predicates to threads without sharing the manager.
    pub fn export(&self, f: Bdd) -> crate::bdd::SnapshotBdd {
        let mut order = Vec::new();
        let mut seen = std::collections::HashMap::new();
        seen.insert(BDD_FALSE, 0usize);
        seen.insert(BDD_TRUE, 1usize);
        fn visit(
            m: &BddManager,
            f: Bdd,
            seen: &mut std::collections::HashMap<Bdd, usize>,
            order: &mut Vec<(u32, usize, usize)>,
        ) -> usize {
            if let Some(&i) = seen.get(&f) {
                return i;
            }
            let n = m.node(f);
            let lo = visit(m, n.lo, seen, order);
            let hi = visit(m, n.hi, seen, order);
            let idx = order.len() + 2;
            order.push((n.level, lo, hi));
            seen.insert(f, idx);
            idx
        }
        let root = visit(self, f, &mut seen, &mut order);
        SnapshotBdd { nodes: order, root }
    }

    /// Graphviz dump for debugging.
    pub fn to_dot(&self, f: Bdd, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        let mut stack = vec![f];
        let mut seen = std::collections::HashSet::new();
        while let Some(g) = stack.pop() {
            if !seen.insert(g) {
                continue;
            }
            let n = self.node(g);
            if n.level == TERMINAL_LEVEL {
                out.push_str(&format!("  n{} [shape=box,label=\"{}\"];\n", g.0, g == BDD_TRUE));
            } else {
                out.push_str(&format!("  n{} [label=\"v{}\"];\n", g.0, n.level));
                out.push_str(&format!("  n{} -> n{} [style=dashed];\n", g.0, n.lo.0));
                out.push_str(&format!("  n{} -> n{};\n", g.0, n.hi.0));
                stack.push(n.lo);
                stack.push(n.hi);
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

/// Manager-independent ROBDD snapshot over the same variable levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotBdd {
    /// (level, lo, hi); indices 0 and 1 are the false/true terminals,
    /// node i is stored at nodes[i - 2].
    pub nodes: Vec<(u32, usize, usize)>,
    pub root: usize,
}

impl SnapshotBdd {
    pub fn constant(v: bool) -> Self {
        SnapshotBdd { nodes: Vec::new(), root: v as usize }
    }

    pub fn is_false(&self) -> bool {
        self.root == 0
    }

    pub fn eval(&self, assignment: &dyn Fn(u32) -> bool) -> bool {
        let mut cur = self.root;
        loop {
            if cur < 2 {
                return cur == 1;
            }
            let (lvl, lo, hi) = self.nodes[cur - 2];
            cur = if assignment(lvl) { hi } else { lo };
        }
    }

    /// Satisfying assignments over the given level universe, as bitmasks
    /// (bit i set iff the variable at `universe[i]` is true).
    pub fn minterms(&self, universe: &[u32]) -> Vec<u64> {
        assert!(universe.len() <= 63);
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << universe.len()) {
            let assignment = |lvl: u32| {
                universe
                    .iter()
                    .position(|&u| u == lvl)
                    .map(|i| mask >> i & 1 == 1)
                    .unwrap_or(false)
            };
            if self.eval(&assignment) {
                out.push(mask);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_laws() {
        let mut m = BddManager::new();
        let x = m.var(0);
        let y = m.var(1);
        let nx = m.not(x);
        assert_eq!(m.and(x, nx), BDD_FALSE);
        assert_eq!(m.ite(x, BDD_TRUE, BDD_FALSE), x);
        // (x | y) & (!x | y) == y
        let xy = m.or(x, y);
        let nxy = m.or(nx, y);
        assert_eq!(m.and(xy, nxy), y);
    }

    #[test]
    fn canonicity_random_truth_tables() {
        // Random 8-variable functions built two different ways share roots.
        let mut m = BddManager::new();
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..20 {
            let bits: Vec<bool> = (0..256).map(|_| next() & 1 == 1).collect();
            // Route 1: Shannon expansion by minterms.
            let mut f1 = BDD_FALSE;
            for (i, &b) in bits.iter().enumerate() {
                if b {
                    let lits: Vec<(u32, bool)> =
                        (0..8).map(|v| (v as u32, i >> v & 1 == 1)).collect();
                    let cube = m.cube(&lits);
                    f1 = m.or(f1, cube);
                }
            }
            // Route 2: balanced ITE over variable 7 split.
            let mut f_parts = Vec::new();
            for half in 0..2 {
                let mut g = BDD_FALSE;
                for i in 0..128 {
                    let idx = i | half << 7;
                    if bits[idx] {
                        let lits: Vec<(u32, bool)> =
                            (0..7).map(|v| (v as u32, idx >> v & 1 == 1)).collect();
                        let cube = m.cube(&lits);
                        g = m.or(g, cube);
                    }
                }
                f_parts.push(g);
            }
            let v7 = m.var(7);
            let f2 = m.ite(v7, f_parts[1], f_parts[0]);
            assert_eq!(f1, f2);
            // Against the naive evaluator.
            for i in 0..256usize {
                assert_eq!(m.eval(f1, &|lvl| i >> lvl & 1 == 1), bits[i]);
            }
        }
    }

    #[test]
    fn quantification() {
        let mut m = BddManager::new();
        let x = m.var(0);
        let y = m.var(1);
        let xy = m.and(x, y);
        assert_eq!(m.exists(xy, &[0]), y);
        let xoy = m.or(x, y);
        assert_eq!(m.forall(xoy, &[0]), y);
        assert_eq!(m.exists(xy, &[0, 1]), BDD_TRUE);
    }

    #[test]
    fn quantification_matches_expansion() {
        let mut m = BddManager::new();
        // f over 6 vars; compare exists against manual or of cofactors.
        let a = m.var(0);
        let b = m.var(2);
        let c = m.var(4);
        let d = m.var(5);
        let ab = m.and(a, b);
        let cd = m.xor(c, d);
        let f = m.or(ab, cd);
        for lvl in [0u32, 2, 4, 5] {
            let lo = m.restrict(f, lvl, false);
            let hi = m.restrict(f, lvl, true);
            let manual = m.or(lo, hi);
            assert_eq!(m.exists(f, &[lvl]), manual);
            let manual_all = m.and(lo, hi);
            assert_eq!(m.forall(f, &[lvl]), manual_all);
        }
    }

    #[test]
    fn rename_examples() {
        let mut m = BddManager::new();
        let x = m.var(0);
        let x2 = m.var(1);
        assert_eq!(m.rename(x, &[(0, 1)]).unwrap(), x2);
        // Inverse round-trip.
        let y = m.var(2);
        let f = m.and(x, y);
        let g = m.rename(f, &[(0, 1), (2, 3)]).unwrap();
        let back = m.rename(g, &[(1, 0), (3, 2)]).unwrap();
        assert_eq!(back, f);
        // Crossing an unmapped variable is rejected.
        let h = m.and(x2, y);
        assert!(m.rename(h, &[(1, 3)]).is_err());
    }

    #[test]
    fn two_step_relation_composition() {
        // T(s, s') on a 4-state graph; compose to T2(s, s'') and compare
        // against explicit 2-step reachability. Interleaved layout: bit i of
        // s at 3i, of s' at 3i+1, of s'' at 3i+2, so the shift maps stay
        // order-compatible.
        let mut m = BddManager::new();
        let edges = [(0usize, 1usize), (1, 2), (2, 3), (3, 0), (1, 0)];
        let enc = |m: &mut BddManager, s: usize, lv: [u32; 2]| {
            let lits = [(lv[0], s & 1 == 1), (lv[1], s >> 1 & 1 == 1)];
            m.cube(&lits)
        };
        let mut t = BDD_FALSE;
        for &(s, t2) in &edges {
            let cs = enc(&mut m, s, [0, 3]);
            let ct = enc(&mut m, t2, [1, 4]);
            let both = m.and(cs, ct);
            t = m.or(t, both);
        }
        // T(s', s'') = rename s->s', s'->s''.
        let t_shift = m.rename(t, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let conj = m.and(t, t_shift);
        let t2 = m.exists(conj, &[1, 4]);
        for s in 0..4usize {
            for u in 0..4usize {
                let expect = edges
                    .iter()
                    .any(|&(a, b)| a == s && edges.iter().any(|&(c, d)| c == b && d == u));
                let assign = |lvl: u32| match lvl {
                    0 => s & 1 == 1,
                    3 => s >> 1 & 1 == 1,
                    2 => u & 1 == 1,
                    5 => u >> 1 & 1 == 1,
                    _ => false,
                };
                assert_eq!(m.eval(t2, &assign), expect, "s={s} u={u}");
            }
        }
    }

    #[test]
    fn lfp_examples() {
        let mut m = BddManager::new();
        let x = m.var(0);
        // Identity step returns bottom.
        let r = m.lfp(x, 4, |_, cur| Ok(cur)).unwrap();
        assert_eq!(r, x);

        // Reachability on a 3-cycle from state 0: all three states.
        // States encoded by 2 bits at levels {0,2}, primed {1,3}.
        let edges = [(0usize, 1usize), (1, 2), (2, 0)];
        let enc = |m: &mut BddManager, s: usize, lv: [u32; 2]| {
            let lits = [(lv[0], s & 1 == 1), (lv[1], s >> 1 & 1 == 1)];
            m.cube(&lits)
        };
        let mut t = BDD_FALSE;
        for &(s, t2) in &edges {
            let cs = enc(&mut m, s, [0, 2]);
            let ct = enc(&mut m, t2, [1, 3]);
            let both = m.and(cs, ct);
            t = m.or(t, both);
        }
        let init = enc(&mut m, 0, [0, 2]);
        let result = m
            .lfp(init, 8, |m, cur| {
                // image: rename reached to primed source? Successors of cur:
                // exists s: cur(s) & T(s,s'), then rename s'->s.
                let conj = m.try_and(cur, t)?;
                let img = m.exists(conj, &[0, 2]);
                let img = m.rename(img, &[(1, 0), (3, 2)])?;
                m.try_or(cur, img)
            })
            .unwrap();
        for s in 0..4usize {
            let assign = |lvl: u32| match lvl {
                0 => s & 1 == 1,
                2 => s >> 1 & 1 == 1,
                _ => false,
            };
            assert_eq!(m.eval(result, &assign), s < 3, "state {s}");
        }
        // lfp result is a fixpoint containing bottom.
        let once_more = {
            let conj = m.and(result, t);
            let img = m.exists(conj, &[0, 2]);
            let img = m.rename(img, &[(1, 0), (3, 2)]).unwrap();
            m.or(result, img)
        };
        assert_eq!(once_more, result);

        // Cap exceeded reports an error.
        let grow = m.lfp(BDD_FALSE, 0, |m, cur| {
            let v = m.var(7);
            Ok(m.or(cur, v))
        });
        assert!(matches!(grow, Err(BddError::FixpointCap(0))));
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut m = BddManager::new();
        let x = m.var(0);
        let y = m.var(1);
        let z = m.var(2);
        let xy = m.and(x, y);
        let f = m.or(xy, z);
        let snap = m.export(f);
        for mask in 0..8u32 {
            let assign = |lvl: u32| mask >> lvl & 1 == 1;
            assert_eq!(snap.eval(&assign), m.eval(f, &assign));
        }
        assert_eq!(snap.minterms(&[0, 1, 2]).len(), 5);
    }
}
