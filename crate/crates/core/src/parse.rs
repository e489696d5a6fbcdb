//! Parser for the textual model grammar: alphabet declarations, process
//! equations, the system composition clause, and the specification pair.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::FiniteNfa;
use crate::csp::{ActionId, ActionTable, Network, Process, SpecPair};
use crate::ltl::{parse_ltl, Formula, LtlError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared action `{name}`")]
    UndeclaredAction { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate process name `{name}`")]
    DuplicateProcess { line: usize, col: usize, name: String },
    #[error("{line}:{col}: action `{name}` declared twice")]
    DuplicateAction { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undefined process `{name}`")]
    UndefinedProcess { line: usize, col: usize, name: String },
    #[error("sync action `{0}` is not a common public action of both operands")]
    BadSyncAction(String),
    #[error("model is missing a `{0}` clause")]
    MissingClause(&'static str),
    #[error("liveness formula: {0}")]
    Ltl(#[from] LtlError),
    #[error("nfa state {0} out of range (states {1})")]
    NfaStateRange(usize, usize),
}

/// A parsed model: global action table, the agent network, and the
/// specification pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub table: ActionTable,
    pub network: Network,
    pub spec: SpecPair,
    /// Declared alphabets; agents carry the used subsets.
    pub public_actions: BTreeSet<ActionId>,
    pub private_actions: BTreeSet<ActionId>,
    /// Original liveness source, kept for faithful re-emission.
    pub liveness_src: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '"' => {
                let (l, cstart) = (line, col);
                chars.next();
                col += 1;
                let mut s = String::from("\"");
                let mut closed = false;
                while let Some(&c) = chars.peek() {
                    chars.next();
                    col += 1;
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    if c == '\n' {
                        line += 1;
                        col = 1;
                    }
                    s.push(c);
                }
                if !closed {
                    return Err(ParseError::Syntax {
                        line: l,
                        col: cstart,
                        msg: "unterminated string".into(),
                    });
                }
                toks.push(Token { text: s, line: l, col: cstart });
            }
            ';' | ',' | '{' | '}' | '=' => {
                toks.push(Token { text: c.to_string(), line, col });
                chars.next();
                col += 1;
            }
            '|' => {
                let (l, c0) = (line, col);
                chars.next();
                col += 1;
                if chars.peek() == Some(&'|') {
                    chars.next();
                    col += 1;
                    toks.push(Token { text: "||".into(), line: l, col: c0 });
                } else {
                    toks.push(Token { text: "|".into(), line: l, col: c0 });
                }
            }
            '-' => {
                let (l, c0) = (line, col);
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    toks.push(Token { text: "->".into(), line: l, col: c0 });
                } else {
                    toks.push(Token { text: "-".into(), line: l, col: c0 });
                }
            }
            '+' => {
                toks.push(Token { text: "+".into(), line, col });
                chars.next();
                col += 1;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let (l, c0) = (line, col);
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '.' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push(Token { text: s, line: l, col: c0 });
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self
            .peek()
            .map(|t| (t.line, t.col))
            .unwrap_or_else(|| self.toks.last().map(|t| (t.line, t.col)).unwrap_or((1, 1)));
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self.peek().cloned().ok_or_else(|| self.err_here("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, text: &str) -> Result<Token, ParseError> {
        let t = self.next()?;
        if t.text != text {
            return Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected `{text}`, found `{}`", t.text),
            });
        }
        Ok(t)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek().map(|t| t.text.as_str()) == Some(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Token, ParseError> {
        let t = self.next()?;
        let ok = t.text == "-"
            || t.text == "+"
            || t
                .text
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '.');
        if !ok || t.text.is_empty() {
            return Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected identifier, found `{}`", t.text),
            });
        }
        Ok(t)
    }

    fn integer(&mut self) -> Result<(usize, Token), ParseError> {
        let t = self.ident()?;
        let v = t.text.parse::<usize>().map_err(|_| ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("expected integer, found `{}`", t.text),
        })?;
        Ok((v, t))
    }
}

#[derive(Debug, Clone)]
enum SafetyClause {
    Universal,
    Empty,
    Nfa { states: usize, initial: Vec<usize>, accepting: Vec<usize>, trans: Vec<(usize, Token, usize)> },
}

/// Parse a full model source into a network and specification pair.
pub fn parse_model(src: &str) -> Result<Model, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };

    let mut public_decl: Vec<Token> = Vec::new();
    let mut private_decl: Vec<Token> = Vec::new();
    // name -> (token, branches); a branch is (action token, target token).
    let mut equations: BTreeMap<String, (Token, Vec<(Token, Token)>)> = BTreeMap::new();
    let mut equation_order: Vec<String> = Vec::new();
    let mut system: Option<(Vec<Token>, Vec<Option<Vec<Token>>>)> = None;
    let mut safety: Option<SafetyClause> = None;
    let mut liveness: Option<Token> = None;

    while p.peek().is_some() {
        let kw = p.next()?;
        match kw.text.as_str() {
            "public" | "private" => {
                let dst = if kw.text == "public" { &mut public_decl } else { &mut private_decl };
                loop {
                    dst.push(p.ident()?);
                    if !p.eat(",") {
                        break;
                    }
                }
                p.expect(";")?;
            }
            "process" => {
                let name = p.ident()?;
                p.expect("=")?;
                let mut branches = Vec::new();
                if p.eat("STOP") {
                    // no branches
                } else {
                    loop {
                        let action = p.ident()?;
                        p.expect("->")?;
                        let target = p.ident()?;
                        branches.push((action, target));
                        if !p.eat("|") {
                            break;
                        }
                    }
                }
                p.expect(";")?;
                if equations.contains_key(&name.text) {
                    return Err(ParseError::DuplicateProcess {
                        line: name.line,
                        col: name.col,
                        name: name.text,
                    });
                }
                equation_order.push(name.text.clone());
                equations.insert(name.text.clone(), (name, branches));
            }
            "system" => {
                let mut heads = vec![p.ident()?];
                let mut syncs: Vec<Option<Vec<Token>>> = Vec::new();
                while p.eat("||") {
                    if p.eat("{") {
                        let mut set = Vec::new();
                        if !p.eat("}") {
                            loop {
                                set.push(p.ident()?);
                                if !p.eat(",") {
                                    break;
                                }
                            }
                            p.expect("}")?;
                        }
                        syncs.push(Some(set));
                    } else {
                        syncs.push(None);
                    }
                    heads.push(p.ident()?);
                }
                p.expect(";")?;
                system = Some((heads, syncs));
            }
            "safety_complement" => {
                let kind = p.ident()?;
                let clause = match kind.text.as_str() {
                    "universal" => SafetyClause::Universal,
                    "empty" => SafetyClause::Empty,
                    "nfa" => {
                        p.expect("{")?;
                        let mut states = 0usize;
                        let mut initial = Vec::new();
                        let mut accepting = Vec::new();
                        let mut trans = Vec::new();
                        loop {
                            if p.eat("}") {
                                break;
                            }
                            let kw = p.ident()?;
                            match kw.text.as_str() {
                                "states" => states = p.integer()?.0,
                                "initial" | "accepting" => {
                                    let dst = if kw.text == "initial" {
                                        &mut initial
                                    } else {
                                        &mut accepting
                                    };
                                    while p
                                        .peek()
                                        .map(|t| t.text.chars().all(|c| c.is_ascii_digit()))
                                        .unwrap_or(false)
                                    {
                                        dst.push(p.integer()?.0);
                                    }
                                }
                                "trans" => {
                                    let s = p.integer()?.0;
                                    let a = p.ident()?;
                                    let t = p.integer()?.0;
                                    trans.push((s, a, t));
                                }
                                other => {
                                    return Err(ParseError::Syntax {
                                        line: kw.line,
                                        col: kw.col,
                                        msg: format!("unknown nfa clause `{other}`"),
                                    })
                                }
                            }
                        }
                        SafetyClause::Nfa { states, initial, accepting, trans }
                    }
                    other => {
                        return Err(ParseError::Syntax {
                            line: kind.line,
                            col: kind.col,
                            msg: format!(
                                "expected `universal`, `empty`, or `nfa`, found `{other}`"
                            ),
                        })
                    }
                };
                p.expect(";")?;
                safety = Some(clause);
            }
            "liveness" => {
                let s = p.next()?;
                if !s.text.starts_with('"') {
                    return Err(ParseError::Syntax {
                        line: s.line,
                        col: s.col,
                        msg: "expected quoted LTL formula".into(),
                    });
                }
                p.expect(";")?;
                liveness = Some(s);
            }
            other => {
                return Err(ParseError::Syntax {
                    line: kw.line,
                    col: kw.col,
                    msg: format!("unknown clause `{other}`"),
                })
            }
        }
    }

    // Build the global action table; publics first for stable ids.
    let mut table = ActionTable::new();
    let mut public_ids: BTreeSet<ActionId> = BTreeSet::new();
    let mut private_ids: BTreeSet<ActionId> = BTreeSet::new();
    for t in &public_decl {
        if table.lookup(&t.text).is_some() {
            return Err(ParseError::DuplicateAction {
                line: t.line,
                col: t.col,
                name: t.text.clone(),
            });
        }
        public_ids.insert(table.intern(&t.text));
    }
    for t in &private_decl {
        if table.lookup(&t.text).is_some() {
            return Err(ParseError::DuplicateAction {
                line: t.line,
                col: t.col,
                name: t.text.clone(),
            });
        }
        private_ids.insert(table.intern(&t.text));
    }

    let lookup_action = |t: &Token| -> Result<ActionId, ParseError> {
        table.lookup(&t.text).ok_or_else(|| ParseError::UndeclaredAction {
            line: t.line,
            col: t.col,
            name: t.text.clone(),
        })
    };

    // Assemble agents: reachable equation closure per system head.
    let (heads, syncs) = system.ok_or(ParseError::MissingClause("system"))?;
    let mut agents = Vec::new();
    for head in &heads {
        if !equations.contains_key(&head.text) {
            return Err(ParseError::UndefinedProcess {
                line: head.line,
                col: head.col,
                name: head.text.clone(),
            });
        }
        let mut state_ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut state_names: Vec<String> = Vec::new();
        let mut queue = VecDeque::new();
        state_ids.insert(head.text.clone(), 0);
        state_names.push(head.text.clone());
        queue.push_back(head.text.clone());
        let mut transitions = BTreeSet::new();
        let mut used: BTreeSet<ActionId> = BTreeSet::new();
        while let Some(name) = queue.pop_front() {
            let src = state_ids[&name];
            let (_, branches) = &equations[&name];
            for (atok, ttok) in branches {
                let a = lookup_action(atok)?;
                used.insert(a);
                let tname = ttok.text.clone();
                if tname != "STOP" && !equations.contains_key(&tname) {
                    return Err(ParseError::UndefinedProcess {
                        line: ttok.line,
                        col: ttok.col,
                        name: tname,
                    });
                }
                let dst = *state_ids.entry(tname.clone()).or_insert_with(|| {
                    let id = state_names.len();
                    state_names.push(tname.clone());
                    if tname != "STOP" {
                        queue.push_back(tname.clone());
                    }
                    id
                });
                transitions.insert((src, a, dst));
            }
        }
        let mut proc = Process::new(state_names, 0);
        proc.transitions = transitions;
        proc.public = used.intersection(&public_ids).copied().collect();
        proc.private = used.intersection(&private_ids).copied().collect();
        agents.push(proc);
    }

    // Sync sets; `||` with no braces means all common public actions.
    let mut sync_sets: Vec<BTreeSet<ActionId>> = Vec::new();
    let mut acc_public: BTreeSet<ActionId> = agents
        .first()
        .map(|a| a.public.clone())
        .unwrap_or_default();
    for (i, sync) in syncs.iter().enumerate() {
        let rhs = &agents[i + 1];
        let set: BTreeSet<ActionId> = match sync {
            None => acc_public.intersection(&rhs.public).copied().collect(),
            Some(toks) => {
                let mut set = BTreeSet::new();
                for t in toks {
                    let a = lookup_action(t)?;
                    if !acc_public.contains(&a) || !rhs.public.contains(&a) {
                        return Err(ParseError::BadSyncAction(t.text.clone()));
                    }
                    set.insert(a);
                }
                set
            }
        };
        acc_public = acc_public.union(&rhs.public).copied().collect();
        for a in &set {
            acc_public.remove(a);
        }
        sync_sets.push(set);
    }

    // Safety complement automaton over the full action alphabet.
    let n_letters = table.len();
    let safety_nfa = match safety.ok_or(ParseError::MissingClause("safety_complement"))? {
        SafetyClause::Universal => FiniteNfa::universal(n_letters),
        SafetyClause::Empty => FiniteNfa::empty(n_letters),
        SafetyClause::Nfa { states, initial, accepting, trans } => {
            let mut nfa = FiniteNfa {
                num_states: states,
                initial: BTreeSet::new(),
                transitions: BTreeSet::new(),
                accepting: BTreeSet::new(),
            };
            for s in initial {
                if s >= states {
                    return Err(ParseError::NfaStateRange(s, states));
                }
                nfa.initial.insert(s);
            }
            for s in accepting {
                if s >= states {
                    return Err(ParseError::NfaStateRange(s, states));
                }
                nfa.accepting.insert(s);
            }
            for (s, atok, t) in trans {
                if s >= states || t >= states {
                    return Err(ParseError::NfaStateRange(s.max(t), states));
                }
                let a = lookup_action(&atok)?;
                nfa.transitions.insert((s, a, t));
            }
            nfa
        }
    };

    let live_tok = liveness.ok_or(ParseError::MissingClause("liveness"))?;
    let live_src = live_tok.text.trim_start_matches('"').to_string();
    let formula: Formula = parse_ltl(&live_src, &table)?;

    Ok(Model {
        table,
        network: Network { agents, sync_sets },
        spec: SpecPair { safety_complement: safety_nfa, liveness: formula },
        public_actions: public_ids,
        private_actions: private_ids,
        liveness_src: live_src,
    })
}

/// Parse coordinator equations (same `process` syntax); the first equation is
/// the initial state. Actions are resolved against the model's table and must
/// be public.
pub fn parse_coordinator(src: &str, table: &ActionTable, sigma: &BTreeSet<ActionId>) -> Result<Process, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut equations: BTreeMap<String, Vec<(Token, Token)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    while p.peek().is_some() {
        let kw = p.expect("process")?;
        let _ = kw;
        let name = p.ident()?;
        p.expect("=")?;
        let mut branches = Vec::new();
        if p.eat("STOP") {
        } else {
            loop {
                let action = p.ident()?;
                p.expect("->")?;
                let target = p.ident()?;
                branches.push((action, target));
                if !p.eat("|") {
                    break;
                }
            }
        }
        p.expect(";")?;
        if equations.contains_key(&name.text) {
            return Err(ParseError::DuplicateProcess {
                line: name.line,
                col: name.col,
                name: name.text,
            });
        }
        order.push(name.text.clone());
        equations.insert(name.text.clone(), branches);
    }
    let head = order.first().ok_or(ParseError::MissingClause("process"))?.clone();
    let mut state_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut names = Vec::new();
    let mut queue = VecDeque::new();
    state_ids.insert(head.clone(), 0);
    names.push(head.clone());
    queue.push_back(head);
    let mut transitions = BTreeSet::new();
    while let Some(n) = queue.pop_front() {
        let src = state_ids[&n];
        for (atok, ttok) in &equations[&n] {
            let a = table.lookup(&atok.text).ok_or_else(|| ParseError::UndeclaredAction {
                line: atok.line,
                col: atok.col,
                name: atok.text.clone(),
            })?;
            if !sigma.contains(&a) {
                return Err(ParseError::UndeclaredAction {
                    line: atok.line,
                    col: atok.col,
                    name: format!("{} (not a public interface action)", atok.text),
                });
            }
            let tname = ttok.text.clone();
            if tname != "STOP" && !equations.contains_key(&tname) {
                return Err(ParseError::UndefinedProcess {
                    line: ttok.line,
                    col: ttok.col,
                    name: tname,
                });
            }
            let dst = *state_ids.entry(tname.clone()).or_insert_with(|| {
                let id = names.len();
                names.push(tname.clone());
                if tname != "STOP" {
                    queue.push_back(tname.clone());
                }
                id
            });
            transitions.insert((src, a, dst));
        }
    }
    let mut proc = Process::new(names, 0);
    proc.transitions = transitions;
    proc.public = sigma.clone();
    Ok(proc)
}

impl Model {
    /// Canonical re-emission in the model grammar.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names = |set: &BTreeSet<ActionId>| {
            set.iter().map(|&a| self.table.name(a).to_string()).collect::<Vec<_>>().join(", ")
        };
        if !self.public_actions.is_empty() {
            out.push_str(&format!("public {};\n", names(&self.public_actions)));
        }
        if !self.private_actions.is_empty() {
            out.push_str(&format!("private {};\n", names(&self.private_actions)));
        }
        for agent in &self.network.agents {
            out.push_str(&agent.to_named_equations(&self.table));
        }
        let mut sys = String::new();
        for (i, agent) in self.network.agents.iter().enumerate() {
            if i > 0 {
                let set = &self.network.sync_sets[i - 1];
                sys.push_str(&format!(
                    " ||{{{}}} ",
                    set.iter()
                        .map(|&a| self.table.name(a).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
            }
            sys.push_str(&agent.states[agent.initial]);
        }
        out.push_str(&format!("system {sys};\n"));

        let nfa = &self.spec.safety_complement;
        let uni = FiniteNfa::universal(self.table.len());
        let empty = FiniteNfa::empty(self.table.len());
        if *nfa == uni {
            out.push_str("safety_complement universal;\n");
        } else if *nfa == empty {
            out.push_str("safety_complement empty;\n");
        } else {
            out.push_str("safety_complement nfa {\n");
            out.push_str(&format!("  states {}\n", nfa.num_states));
            let list = |s: &BTreeSet<usize>| {
                s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            };
            out.push_str(&format!("  initial {}\n", list(&nfa.initial)));
            out.push_str(&format!("  accepting {}\n", list(&nfa.accepting)));
            for &(s, a, t) in &nfa.transitions {
                out.push_str(&format!("  trans {} {} {}\n", s, self.table.name(a), t));
            }
            out.push_str("};\n");
        }
        out.push_str(&format!("liveness \"{}\";\n", self.liveness_src));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"
# Example 1
public a0, a1;
private b;
process E  = a0 -> E0 | a1 -> E1;
process E0 = a0 -> E0;
process E1 = b  -> E1;
system  E;
safety_complement universal;
liveness "F G !b";
"#;

    #[test]
    fn parses_example1() {
        let m = parse_model(EX1).unwrap();
        assert_eq!(m.network.agents.len(), 1);
        let e = &m.network.agents[0];
        assert_eq!(e.num_states(), 3);
        assert_eq!(e.public.len(), 2);
        assert_eq!(e.private.len(), 1);
        assert_eq!(e.transitions.len(), 4);
    }

    #[test]
    fn stop_target() {
        let src = r#"
public a0, a1;
private b;
process E  = a0 -> E0 | a1 -> STOP;
process E0 = a0 -> E0;
system E;
safety_complement universal;
liveness "F G !b";
"#;
        let m = parse_model(src).unwrap();
        let e = &m.network.agents[0];
        let a1 = m.table.lookup("a1").unwrap();
        let after = e.simulate(&[a1]);
        let s = *after.iter().next().unwrap();
        assert!(e.outgoing(s).is_empty());
    }

    #[test]
    fn arbiter2_network_shape() {
        let m = crate::benchgen::arbiter(2).unwrap();
        assert_eq!(m.network.agents.len(), 2);
        for a in &m.network.agents {
            assert_eq!(a.num_states(), 3);
        }
        assert_eq!(m.table.len(), 6);
    }

    #[test]
    fn error_cases() {
        let undeclared = r#"
public a0;
process E = a0 -> E | zz -> E;
system E;
safety_complement universal;
liveness "true";
"#;
        assert!(matches!(parse_model(undeclared), Err(ParseError::UndeclaredAction { .. })));

        let dup = r#"
public a0;
process E = a0 -> E;
process E = a0 -> E;
system E;
safety_complement universal;
liveness "true";
"#;
        assert!(matches!(parse_model(dup), Err(ParseError::DuplicateProcess { .. })));

        let badsync = r#"
public a0, a1;
process A = a0 -> A;
process B = a1 -> B;
system A ||{a0} B;
safety_complement universal;
liveness "true";
"#;
        assert!(matches!(parse_model(badsync), Err(ParseError::BadSyncAction(_))));

        let syntax = "public a0\nprocess";
        match parse_model(syntax) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_example1() {
        let m = parse_model(EX1).unwrap();
        let text = m.to_text();
        let m2 = parse_model(&text).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn nfa_safety_clause() {
        let src = r#"
public a0;
process E = a0 -> E;
system E;
safety_complement nfa {
  states 2
  initial 0
  accepting 1
  trans 0 a0 1
  trans 1 a0 0
};
liveness "true";
"#;
        let m = parse_model(src).unwrap();
        let a0 = m.table.lookup("a0").unwrap();
        assert!(m.spec.safety_complement.runs_word(&[a0]));
        assert!(!m.spec.safety_complement.runs_word(&[a0, a0]));
        let m2 = parse_model(&m.to_text()).unwrap();
        assert_eq!(m, m2);
    }
}
