//! LTL over action alphabets: at each position of a word exactly one action
//! occurs, and an atom holds iff it names that action.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::automata::{EdgeGreenNba, Nba};
use crate::csp::{ActionId, ActionTable};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(ActionId),
    Not(Rc<Formula>),
    And(Rc<Formula>, Rc<Formula>),
    Or(Rc<Formula>, Rc<Formula>),
    Next(Rc<Formula>),
    Until(Rc<Formula>, Rc<Formula>),
    Release(Rc<Formula>, Rc<Formula>),
    Eventually(Rc<Formula>),
    Always(Rc<Formula>),
}

use Formula::*;

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Not(Rc::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Rc::new(a), Rc::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Rc::new(a), Rc::new(b))
    }
    pub fn next(f: Formula) -> Formula {
        Next(Rc::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Formula {
        Until(Rc::new(a), Rc::new(b))
    }
    pub fn release(a: Formula, b: Formula) -> Formula {
        Release(Rc::new(a), Rc::new(b))
    }
    pub fn eventually(f: Formula) -> Formula {
        Eventually(Rc::new(f))
    }
    pub fn always(f: Formula) -> Formula {
        Always(Rc::new(f))
    }

    /// Conjunction of a non-empty list, right-nested.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => True,
            1 => fs.pop().unwrap(),
            _ => {
                let mut acc = fs.pop().unwrap();
                while let Some(f) = fs.pop() {
                    acc = Formula::and(f, acc);
                }
                acc
            }
        }
    }

    pub fn disj(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => False,
            1 => fs.pop().unwrap(),
            _ => {
                let mut acc = fs.pop().unwrap();
                while let Some(f) = fs.pop() {
                    acc = Formula::or(f, acc);
                }
                acc
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) => 1,
            Not(f) | Next(f) | Eventually(f) | Always(f) => 1 + f.size(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn render(&self, table: &ActionTable) -> String {
        match self {
            True => "true".into(),
            False => "false".into(),
            Atom(a) => table.name(*a).into(),
            Not(f) => format!("!({})", f.render(table)),
            And(a, b) => format!("({} & {})", a.render(table), b.render(table)),
            Or(a, b) => format!("({} | {})", a.render(table), b.render(table)),
            Next(f) => format!("X ({})", f.render(table)),
            Until(a, b) => format!("({} U {})", a.render(table), b.render(table)),
            Release(a, b) => format!("({} R {})", a.render(table), b.render(table)),
            Eventually(f) => format!("F ({})", f.render(table)),
            Always(f) => format!("G ({})", f.render(table)),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtlError {
    #[error("LTL syntax error at offset {0}: {1}")]
    Syntax(usize, String),
    #[error("unknown action name `{0}` in formula")]
    UnknownAction(String),
    #[error("lasso loop is empty")]
    EmptyLoop,
}

/// Parse an LTL formula. Grammar (loosest first): `->` right-assoc, then `|`,
/// `&`, `U`/`R` right-assoc, then unary `! X F G`, then atoms, `true`,
/// `false`, parentheses. `a -> b` desugars to `!a | b`.
pub fn parse_ltl(text: &str, actions: &ActionTable) -> Result<Formula, LtlError> {
    let mut p = LtlParser { toks: lex(text)?, pos: 0, actions };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return Err(LtlError::Syntax(p.toks[p.pos].1, "trailing input".into()));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    // A lone `-` begins an action name (the hardness
                    // reduction uses `-` and `+` as letters).
                    let start = i;
                    i += 1;
                    toks.push((Tok::Ident(text[start..i].into()), start));
                }
            }
            '+' | '#' => {
                toks.push((Tok::Ident(c.to_string()), i));
                i += 1;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_alphanumeric() || c == '_' || c == '.' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(text[start..i].into()), start));
            }
            _ => return Err(LtlError::Syntax(i, format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

struct LtlParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    actions: &'a ActionTable,
}

impl<'a> LtlParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(Formula::or(Formula::not(lhs), rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.binding()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.binding()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    /// U and R, right-associative.
    fn binding(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "U" => {
                self.pos += 1;
                let rhs = self.binding()?;
                Ok(Formula::until(lhs, rhs))
            }
            Some(Tok::Ident(s)) if s == "R" => {
                self.pos += 1;
                let rhs = self.binding()?;
                Ok(Formula::release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "X" => {
                self.pos += 1;
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "F" => {
                self.pos += 1;
                Ok(Formula::eventually(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "G" => {
                self.pos += 1;
                Ok(Formula::always(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LtlError> {
        match self.toks.get(self.pos).cloned() {
            Some((Tok::LParen, _)) => {
                self.pos += 1;
                let f = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    let off = self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(0);
                    return Err(LtlError::Syntax(off, "expected `)`".into()));
                }
                Ok(f)
            }
            Some((Tok::Ident(s), off)) => {
                self.pos += 1;
                match s.as_str() {
                    "true" => Ok(True),
                    "false" => Ok(False),
                    "U" | "R" | "X" | "F" | "G" => {
                        Err(LtlError::Syntax(off, format!("operator `{s}` used as atom")))
                    }
                    name => self
                        .actions
                        .lookup(name)
                        .map(Atom)
                        .ok_or_else(|| LtlError::UnknownAction(name.into())),
                }
            }
            other => {
                let off = other.map(|(_, o)| o).unwrap_or(0);
                Err(LtlError::Syntax(off, "expected formula".into()))
            }
        }
    }
}

/// Negation pushed to negation normal form via the Until/Release duality.
pub fn negate(f: &Formula) -> Formula {
    nnf_neg(f)
}

/// Normalize to NNF without negating.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        True => True,
        False => False,
        Atom(a) => Atom(*a),
        Not(g) => nnf_neg(g),
        And(a, b) => Formula::and(nnf(a), nnf(b)),
        Or(a, b) => Formula::or(nnf(a), nnf(b)),
        Next(g) => Formula::next(nnf(g)),
        Until(a, b) => Formula::until(nnf(a), nnf(b)),
        Release(a, b) => Formula::release(nnf(a), nnf(b)),
        Eventually(g) => Formula::until(True, nnf(g)),
        Always(g) => Formula::release(False, nnf(g)),
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    match f {
        True => False,
        False => True,
        Atom(a) => Formula::not(Atom(*a)),
        Not(g) => nnf(g),
        And(a, b) => Formula::or(nnf_neg(a), nnf_neg(b)),
        Or(a, b) => Formula::and(nnf_neg(a), nnf_neg(b)),
        Next(g) => Formula::next(nnf_neg(g)),
        Until(a, b) => Formula::release(nnf_neg(a), nnf_neg(b)),
        Release(a, b) => Formula::until(nnf_neg(a), nnf_neg(b)),
        Eventually(g) => Formula::release(False, nnf_neg(g)),
        Always(g) => Formula::until(True, nnf_neg(g)),
    }
}

/// Evaluate `w, 0 ⊨ f` for an ultimately periodic word `prefix·loop^ω`.
///
/// Satisfaction at position `i` depends only on the residue class of `i` in
/// the loop once past the prefix, so positions `0..prefix.len()+loop.len()`
/// suffice; Until/Release values on the cyclic tail are solved as fixpoints.
pub fn eval_lasso(f: &Formula, prefix: &[ActionId], loop_part: &[ActionId]) -> Result<bool, LtlError> {
    if loop_part.is_empty() {
        return Err(LtlError::EmptyLoop);
    }
    let n = prefix.len() + loop_part.len();
    let letter = |i: usize| -> ActionId {
        if i < prefix.len() {
            prefix[i]
        } else {
            loop_part[i - prefix.len()]
        }
    };
    let next = |i: usize| -> usize {
        if i + 1 < n {
            i + 1
        } else {
            prefix.len()
        }
    };

    // Bottom-up evaluation: one bool per position per subformula.
    fn eval(
        f: &Formula,
        n: usize,
        prefix_len: usize,
        letter: &impl Fn(usize) -> ActionId,
        next: &impl Fn(usize) -> usize,
    ) -> Vec<bool> {
        match f {
            True => vec![true; n],
            False => vec![false; n],
            Atom(a) => (0..n).map(|i| letter(i) == *a).collect(),
            Not(g) => eval(g, n, prefix_len, letter, next).into_iter().map(|b| !b).collect(),
            And(a, b) => {
                let va = eval(a, n, prefix_len, letter, next);
                let vb = eval(b, n, prefix_len, letter, next);
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            Or(a, b) => {
                let va = eval(a, n, prefix_len, letter, next);
                let vb = eval(b, n, prefix_len, letter, next);
                va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
            }
            Next(g) => {
                let vg = eval(g, n, prefix_len, letter, next);
                (0..n).map(|i| vg[next(i)]).collect()
            }
            Until(a, b) => {
                let va = eval(a, n, prefix_len, letter, next);
                let vb = eval(b, n, prefix_len, letter, next);
                lfp_until(&va, &vb, n, next)
            }
            Eventually(g) => {
                let vg = eval(g, n, prefix_len, letter, next);
                let vt = vec![true; n];
                lfp_until(&vt, &vg, n, next)
            }
            Release(a, b) => {
                let va = eval(a, n, prefix_len, letter, next);
                let vb = eval(b, n, prefix_len, letter, next);
                gfp_release(&va, &vb, n, next)
            }
            Always(g) => {
                let vg = eval(g, n, prefix_len, letter, next);
                let vf = vec![false; n];
                gfp_release(&vf, &vg, n, next)
            }
        }
    }
    fn lfp_until(va: &[bool], vb: &[bool], n: usize, next: &impl Fn(usize) -> usize) -> Vec<bool> {
        let mut v = vb.to_vec();
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let new = vb[i] || (va[i] && v[next(i)]);
                if new != v[i] {
                    v[i] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }
    fn gfp_release(va: &[bool], vb: &[bool], n: usize, next: &impl Fn(usize) -> usize) -> Vec<bool> {
        let mut v = vec![true; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let new = vb[i] && (va[i] || v[next(i)]);
                if new != v[i] {
                    v[i] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }
    Ok(eval(f, n, prefix.len(), &letter, &next)[0])
}

/// Translate an LTL formula to a nondeterministic Büchi automaton over
/// single-action letters drawn from `universe`.
///
/// Classic node-cover tableau producing a generalized-Büchi automaton, then
/// degeneralized to a single green set (counter order fixed by subterm index,
/// immediately satisfied sets skipped) and pruned.
pub fn to_nba(f: &Formula, universe: &[ActionId]) -> Nba<ActionId> {
    let f = nnf(f);
    let tableau = build_tableau(&f);
    let gba = tableau_to_gba(&tableau, universe);
    let edge_green = degeneralize(&gba);
    let nba = edge_green.green_edges_to_states();
    nba.prune()
}

// ---- tableau construction (old / new / next node sets) ----

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Node {
    old: Vec<Formula>,
    next: Vec<Formula>,
}

struct Tableau {
    nodes: Vec<Node>,
    /// incoming[i] = predecessors of node i; usize::MAX marks the virtual
    /// initial predecessor.
    incoming: Vec<Vec<usize>>,
    untils: Vec<(Formula, Formula)>,
}

const INIT_MARK: usize = usize::MAX;

fn insert_sorted(v: &mut Vec<Formula>, f: Formula) {
    if let Err(pos) = v.binary_search(&f) {
        v.insert(pos, f);
    }
}

fn build_tableau(f: &Formula) -> Tableau {
    let mut untils: Vec<(Formula, Formula)> = Vec::new();
    collect_untils(f, &mut untils);
    untils.sort();
    untils.dedup();

    let mut nodes: Vec<Node> = Vec::new();
    let mut incoming: Vec<Vec<usize>> = Vec::new();

    struct Pending {
        incoming: Vec<usize>,
        old: Vec<Formula>,
        new: Vec<Formula>,
        next: Vec<Formula>,
    }

    let mut stack = vec![Pending {
        incoming: vec![INIT_MARK],
        old: Vec::new(),
        new: vec![f.clone()],
        next: Vec::new(),
    }];

    while let Some(mut cur) = stack.pop() {
        match cur.new.pop() {
            None => {
                let node = Node { old: cur.old, next: cur.next };
                if let Some(i) = nodes.iter().position(|n| *n == node) {
                    for p in cur.incoming {
                        if !incoming[i].contains(&p) {
                            incoming[i].push(p);
                        }
                    }
                } else {
                    let i = nodes.len();
                    nodes.push(node.clone());
                    incoming.push(cur.incoming);
                    stack.push(Pending {
                        incoming: vec![i],
                        old: Vec::new(),
                        new: node.next.clone(),
                        next: Vec::new(),
                    });
                }
            }
            Some(g) => {
                if cur.old.contains(&g) {
                    stack.push(cur);
                    continue;
                }
                match &g {
                    False => { /* contradiction: drop the node */ }
                    True => {
                        insert_sorted(&mut cur.old, g);
                        stack.push(cur);
                    }
                    Atom(_) | Not(_) => {
                        // NNF input: Not only wraps atoms here.
                        insert_sorted(&mut cur.old, g);
                        stack.push(cur);
                    }
                    And(a, b) => {
                        insert_sorted(&mut cur.old, g.clone());
                        cur.new.push((**a).clone());
                        cur.new.push((**b).clone());
                        stack.push(cur);
                    }
                    Or(a, b) => {
                        insert_sorted(&mut cur.old, g.clone());
                        let mut other = Pending {
                            incoming: cur.incoming.clone(),
                            old: cur.old.clone(),
                            new: cur.new.clone(),
                            next: cur.next.clone(),
                        };
                        cur.new.push((**a).clone());
                        other.new.push((**b).clone());
                        stack.push(cur);
                        stack.push(other);
                    }
                    Next(a) => {
                        insert_sorted(&mut cur.old, g.clone());
                        insert_sorted(&mut cur.next, (**a).clone());
                        stack.push(cur);
                    }
                    Until(a, b) => {
                        insert_sorted(&mut cur.old, g.clone());
                        // ψ ∨ (φ ∧ X(φ U ψ))
                        let mut fulfil = Pending {
                            incoming: cur.incoming.clone(),
                            old: cur.old.clone(),
                            new: cur.new.clone(),
                            next: cur.next.clone(),
                        };
                        fulfil.new.push((**b).clone());
                        cur.new.push((**a).clone());
                        insert_sorted(&mut cur.next, g.clone());
                        stack.push(fulfil);
                        stack.push(cur);
                    }
                    Release(a, b) => {
                        insert_sorted(&mut cur.old, g.clone());
                        // ψ ∧ (φ ∨ X(φ R ψ))
                        let mut now = Pending {
                            incoming: cur.incoming.clone(),
                            old: cur.old.clone(),
                            new: cur.new.clone(),
                            next: cur.next.clone(),
                        };
                        now.new.push((**a).clone());
                        now.new.push((**b).clone());
                        cur.new.push((**b).clone());
                        insert_sorted(&mut cur.next, g.clone());
                        stack.push(now);
                        stack.push(cur);
                    }
                    Eventually(_) | Always(_) => {
                        // nnf() rewrote these away.
                        unreachable!("derived operator survived NNF")
                    }
                }
            }
        }
    }

    Tableau { nodes, incoming, untils }
}

fn collect_untils(f: &Formula, out: &mut Vec<(Formula, Formula)>) {
    match f {
        True | False | Atom(_) => {}
        Not(g) | Next(g) | Eventually(g) | Always(g) => collect_untils(g, out),
        And(a, b) | Or(a, b) | Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Until(a, b) => {
            out.push(((**a).clone(), (**b).clone()));
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

struct Gba {
    /// transitions[i] = (letter, target)
    transitions: Vec<Vec<(ActionId, usize)>>,
    initial: Vec<usize>,
    /// greens[k] = membership bitvec of acceptance set k over nodes.
    greens: Vec<Vec<bool>>,
    num_states: usize,
}

fn tableau_to_gba(t: &Tableau, universe: &[ActionId]) -> Gba {
    let n = t.nodes.len();
    // Letters allowed while *in* a node, from its literal constraints.
    let letters: Vec<Vec<ActionId>> = t
        .nodes
        .iter()
        .map(|node| {
            let mut pos: Vec<ActionId> = Vec::new();
            let mut neg: Vec<ActionId> = Vec::new();
            for f in &node.old {
                match f {
                    Atom(a) => pos.push(*a),
                    Not(g) => {
                        if let Atom(a) = &**g {
                            neg.push(*a);
                        }
                    }
                    _ => {}
                }
            }
            pos.sort();
            pos.dedup();
            match pos.len() {
                0 => universe.iter().copied().filter(|a| !neg.contains(a)).collect(),
                1 if !neg.contains(&pos[0]) && universe.contains(&pos[0]) => vec![pos[0]],
                _ => Vec::new(),
            }
        })
        .collect();

    let mut transitions: Vec<Vec<(ActionId, usize)>> = vec![Vec::new(); n];
    let mut initial = Vec::new();
    for (i, inc) in t.incoming.iter().enumerate() {
        for &p in inc {
            if p == INIT_MARK {
                initial.push(i);
            } else {
                for &a in &letters[p] {
                    transitions[p].push((a, i));
                }
            }
        }
    }
    for row in &mut transitions {
        row.sort();
        row.dedup();
    }
    initial.sort();

    let greens: Vec<Vec<bool>> = t
        .untils
        .iter()
        .map(|(a, b)| {
            let u = Formula::until(a.clone(), b.clone());
            t.nodes
                .iter()
                .map(|node| !node.old.contains(&u) || node.old.contains(b))
                .collect()
        })
        .collect();

    Gba { transitions, initial, greens, num_states: n }
}

/// Degeneralize with a counter over acceptance sets. The counter skips sets
/// already satisfied by the target node; a wrap around the last set marks the
/// edge green.
fn degeneralize(g: &Gba) -> EdgeGreenNba<ActionId> {
    let k = g.greens.len();
    if k == 0 {
        // No obligations: every edge is green.
        let mut out = EdgeGreenNba::new(g.num_states);
        out.initial = g.initial.iter().copied().collect();
        for (s, row) in g.transitions.iter().enumerate() {
            for &(a, t) in row {
                out.transitions.push((s, a, t, true));
            }
        }
        return out;
    }
    let advance = |mut j: usize, node: usize| -> (usize, bool) {
        let mut wrapped = false;
        while j < k && g.greens[j][node] {
            j += 1;
        }
        if j == k {
            wrapped = true;
            j = 0;
            while j < k && g.greens[j][node] {
                j += 1;
            }
            if j == k {
                j = 0;
            }
        }
        (j, wrapped)
    };

    // States are (node, counter) pairs, discovered from the initial seeds.
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut out = EdgeGreenNba::new(0);

    let intern = |key: (usize, usize),
                      ids: &mut BTreeMap<(usize, usize), usize>,
                      order: &mut Vec<(usize, usize)>,
                      queue: &mut VecDeque<(usize, usize)>| {
        *ids.entry(key).or_insert_with(|| {
            let id = order.len();
            order.push(key);
            queue.push_back(key);
            id
        })
    };

    for &s in &g.initial {
        let (j, _) = advance(0, s);
        let id = intern((s, j), &mut ids, &mut order, &mut queue);
        out.initial.insert(id);
    }
    while let Some((node, j)) = queue.pop_front() {
        let src = ids[&(node, j)];
        for &(a, t) in &g.transitions[node] {
            let (j2, wrapped) = advance(j, t);
            let dst = intern((t, j2), &mut ids, &mut order, &mut queue);
            out.transitions.push((src, a, dst, wrapped));
        }
    }
    out.num_states = order.len();
    out
}

/// Enumeration helpers backing the exhaustive oracle suites.
pub mod tests_support {
    use super::*;

    /// All formula trees with at most `max_size` nodes over the given atoms.
    pub fn enumerate_formulas(atoms: &[ActionId], max_size: usize) -> Vec<Formula> {
        let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
        if max_size >= 1 {
            by_size[1].push(True);
            by_size[1].push(False);
            for &a in atoms {
                by_size[1].push(Atom(a));
            }
        }
        for size in 2..=max_size {
            let mut bucket = Vec::new();
            for f in &by_size[size - 1] {
                bucket.push(Formula::not(f.clone()));
                bucket.push(Formula::next(f.clone()));
                bucket.push(Formula::eventually(f.clone()));
                bucket.push(Formula::always(f.clone()));
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        bucket.push(Formula::and(a.clone(), b.clone()));
                        bucket.push(Formula::or(a.clone(), b.clone()));
                        bucket.push(Formula::until(a.clone(), b.clone()));
                        bucket.push(Formula::release(a.clone(), b.clone()));
                    }
                }
            }
            by_size[size] = bucket;
        }
        by_size.into_iter().flatten().collect()
    }

    /// All (prefix, loop) pairs with |prefix| ≤ max_len, 1 ≤ |loop| ≤ max_len.
    pub fn enumerate_lassos(
        atoms: &[ActionId],
        max_len: usize,
    ) -> Vec<(Vec<ActionId>, Vec<ActionId>)> {
        let words = |len: usize| -> Vec<Vec<ActionId>> {
            let mut out = vec![Vec::new()];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| {
                        atoms.iter().map(move |&a| {
                            let mut w2 = w.clone();
                            w2.push(a);
                            w2
                        })
                    })
                    .collect();
            }
            out
        };
        let mut all_prefixes = Vec::new();
        for l in 0..=max_len {
            all_prefixes.extend(words(l));
        }
        let mut all_loops = Vec::new();
        for l in 1..=max_len {
            all_loops.extend(words(l));
        }
        let mut out = Vec::new();
        for p in &all_prefixes {
            for lp in &all_loops {
                out.push((p.clone(), lp.clone()));
            }
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(a) => write!(f, "@{a}"),
            Not(g) => write!(f, "!({g})"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Next(g) => write!(f, "X ({g})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
            Eventually(g) => write!(f, "F ({g})"),
            Always(g) => write!(f, "G ({g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::nba_accepts_lasso;

    fn table2() -> ActionTable {
        let mut t = ActionTable::new();
        t.intern("a0");
        t.intern("b");
        t
    }

    #[test]
    fn parse_examples() {
        let t = table2();
        let f = parse_ltl("F G !b", &t).unwrap();
        let b = t.lookup("b").unwrap();
        assert_eq!(f, Formula::eventually(Formula::always(Formula::not(Atom(b)))));
        assert_eq!(parse_ltl("true", &t).unwrap(), True);
        assert!(matches!(parse_ltl("F G !c", &t), Err(LtlError::UnknownAction(_))));
        // Implication desugars.
        let g = parse_ltl("a0 -> b", &t).unwrap();
        let a0 = t.lookup("a0").unwrap();
        assert_eq!(g, Formula::or(Formula::not(Atom(a0)), Atom(b)));
    }

    #[test]
    fn parse_arbiter_starvefreedom() {
        let mut t = ActionTable::new();
        for n in ["request.0", "grant.0", "request.1", "grant.1"] {
            t.intern(n);
        }
        let f = parse_ltl(
            "G (request.0 -> F grant.0) & G (request.1 -> F grant.1)",
            &t,
        )
        .unwrap();
        match f {
            And(a, b) => {
                assert!(matches!(*a, Always(_)));
                assert!(matches!(*b, Always(_)));
            }
            other => panic!("expected conjunction, got {other}"),
        }
    }

    #[test]
    fn eval_lasso_examples() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        let fgnb = parse_ltl("F G !b", &t).unwrap();
        assert!(eval_lasso(&fgnb, &[], &[a0]).unwrap());
        assert!(!eval_lasso(&fgnb, &[a0], &[b]).unwrap());
        let gfa1 = parse_ltl("G F a0", &t).unwrap();
        assert!(eval_lasso(&gfa1, &[b], &[a0, b]).unwrap());
        assert!(matches!(eval_lasso(&fgnb, &[a0], &[]), Err(LtlError::EmptyLoop)));
    }

    #[test]
    fn negate_examples() {
        let t = table2();
        let b = t.lookup("b").unwrap();
        let fgnb = parse_ltl("F G !b", &t).unwrap();
        // NNF of !(FG!b) is true U (false R ... ) shaped like GF b.
        let neg = negate(&fgnb);
        assert_eq!(neg, Formula::release(False, Formula::until(True, Atom(b))));
        assert_eq!(negate(&True), False);
        let a0 = t.lookup("a0").unwrap();
        let aub = Formula::until(Atom(a0), Atom(b));
        assert_eq!(
            negate(&aub),
            Formula::release(Formula::not(Atom(a0)), Formula::not(Atom(b)))
        );
    }

    #[test]
    fn negate_involution_up_to_nnf() {
        let t = table2();
        for src in ["F G !b", "a0 U b", "(a0 R b) | X a0", "G (a0 -> F b)"] {
            let f = parse_ltl(src, &t).unwrap();
            assert_eq!(negate(&negate(&f)), nnf(&f), "formula {src}");
        }
    }

    #[test]
    fn to_nba_examples() {
        let t = table2();
        let a0 = t.lookup("a0").unwrap();
        let b = t.lookup("b").unwrap();
        let universe = [a0, b];

        let gfb = parse_ltl("G F b", &t).unwrap();
        let nba = to_nba(&gfb, &universe);
        assert!(nba_accepts_lasso(&nba, &[a0], &[b]).unwrap());
        assert!(!nba_accepts_lasso(&nba, &[], &[a0]).unwrap());

        let empty = to_nba(&False, &universe);
        assert!(!nba_accepts_lasso(&empty, &[], &[a0]).unwrap());
        assert!(!nba_accepts_lasso(&empty, &[b], &[b, a0]).unwrap());

        let xa0 = parse_ltl("X a0", &t).unwrap();
        let nba_x = to_nba(&xa0, &universe);
        for (pre, lp) in [
            (vec![a0], vec![a0]),
            (vec![b], vec![a0]),
            (vec![], vec![a0, b]),
            (vec![b, b], vec![a0]),
            (vec![a0, b], vec![b]),
        ] {
            let expect = eval_lasso(&xa0, &pre, &lp).unwrap();
            assert_eq!(nba_accepts_lasso(&nba_x, &pre, &lp).unwrap(), expect);
        }
    }
}
