//! The line-oriented model format. Grammar in `docs/model-format.md`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::types::{Action, Atom, ClockConstraint, Constant, Location, Relation, Switch, TimedAutomaton};
use super::ModelError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Constant),
    Op(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>, ModelError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let op = match two.as_str() {
            "<=" => Some("<="),
            ">=" => Some(">="),
            "==" => Some("=="),
            "->" => Some("->"),
            "||" => Some("|"),
            "&&" => Some("&"),
            _ => None,
        };
        if let Some(op) = op {
            out.push(Token { tok: Tok::Op(op), col });
            i += 2;
            continue;
        }
        let single = match c {
            '<' => Some("<"),
            '>' => Some(">"),
            '=' => Some("=="),
            '&' => Some("&"),
            ',' => Some(","),
            '|' => Some("|"),
            _ => None,
        };
        if let Some(op) = single {
            out.push(Token { tok: Tok::Op(op), col });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: i64 = parse_int(&chars[start..i], lineno, col)?;
            let mut value = Constant::from_integer(num);
            if i < chars.len() && chars[i] == '/' {
                let dstart = i + 1;
                let mut j = dstart;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let den = parse_int(&chars[dstart..j], lineno, i + 2)?;
                if den == 0 {
                    return Err(ModelError::syntax(lineno, i + 1, "zero denominator"));
                }
                value = Constant::new(num, den);
                i = j;
            }
            if i < chars.len() && is_ident_char(chars[i]) {
                return Err(ModelError::syntax(lineno, col, "malformed number"));
            }
            out.push(Token { tok: Tok::Num(value), col });
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(ModelError::syntax(lineno, col, &format!("unexpected character '{c}'")));
    }
    Ok(out)
}

fn parse_int(digits: &[char], line: usize, col: usize) -> Result<i64, ModelError> {
    let s: String = digits.iter().collect();
    s.parse()
        .map_err(|_| ModelError::syntax(line, col, "expected an integer constant"))
}

const KEYWORDS: &[&str] = &["guard", "action", "reset", "invariant", "initial"];

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn err(&self, msg: &str) -> ModelError {
        ModelError::syntax(self.line, self.col(), msg)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String, ModelError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err(&format!("expected {what}"))),
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// `atom (& atom)*`, stopping at the next keyword or end of line.
    fn conjunction(&mut self) -> Result<ClockConstraint, ModelError> {
        let mut atoms = Vec::new();
        loop {
            let clock = self.ident("a clock name")?;
            let op = match self.next() {
                Some(Tok::Op(op)) => *op,
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected a comparison operator"));
                }
            };
            let bound = match self.next() {
                Some(Tok::Num(n)) => *n,
                Some(Tok::Ident(_)) => {
                    self.pos -= 1;
                    return Err(self.err("clock differences are not supported"));
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected a constant"));
                }
            };
            match op {
                "<" => atoms.push(Atom { clock, op: Relation::Lt, bound }),
                "<=" => atoms.push(Atom { clock, op: Relation::Le, bound }),
                ">=" => atoms.push(Atom { clock, op: Relation::Ge, bound }),
                ">" => atoms.push(Atom { clock, op: Relation::Gt, bound }),
                "==" => {
                    atoms.push(Atom {
                        clock: clock.clone(),
                        op: Relation::Le,
                        bound,
                    });
                    atoms.push(Atom { clock, op: Relation::Ge, bound });
                }
                _ => {
                    self.pos -= 2;
                    return Err(self.err("expected a comparison operator"));
                }
            }
            match self.peek() {
                Some(Tok::Op("&")) => {
                    self.pos += 1;
                }
                Some(Tok::Op("|")) => return Err(self.err("disjunctive constraints are not supported")),
                Some(Tok::Ident(s)) if s == "true" => {
                    return Err(self.err("unexpected 'true' inside a conjunction"))
                }
                _ => return Ok(ClockConstraint::of(atoms)),
            }
        }
    }

    /// A conjunction or the literal `true`.
    fn constraint(&mut self) -> Result<ClockConstraint, ModelError> {
        if self.at_keyword("true") {
            self.pos += 1;
            return Ok(ClockConstraint::truth());
        }
        self.conjunction()
    }
}

/// Parses a standalone constraint expression such as `x <= 2 && y > 1`;
/// the empty string means `true`.
pub(crate) fn parse_constraint_expr(text: &str) -> Result<ClockConstraint, ModelError> {
    let toks = lex(text, 1)?;
    if toks.is_empty() {
        return Ok(ClockConstraint::truth());
    }
    let toks: Vec<Token> = toks
        .into_iter()
        .map(|t| match &t.tok {
            Tok::Ident(s) if s == "and" => Token { tok: Tok::Op("&"), col: t.col },
            _ => t,
        })
        .collect();
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        line: 1,
        end_col: text.chars().count() + 1,
    };
    let cc = cur.constraint()?;
    if !cur.done() {
        return Err(cur.err("unexpected trailing input"));
    }
    Ok(cc)
}

/// Parses one automaton in the model format.
pub fn parse_model(text: &str) -> Result<TimedAutomaton, ModelError> {
    let mut name: Option<String> = None;
    let mut clocks: Option<Vec<String>> = None;
    let mut alphabet: Option<BTreeSet<String>> = None;
    let mut locations: Vec<Location> = Vec::new();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut initial: Option<String> = None;
    let mut switches = Vec::new();
    let mut any = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        any = true;
        let mut cur = Cursor {
            toks: &toks,
            pos: 1,
            line: lineno,
            end_col: raw.trim_end().chars().count() + 1,
        };
        let head = match &toks[0].tok {
            Tok::Ident(s) => s.as_str(),
            _ => return Err(ModelError::syntax(lineno, toks[0].col, "expected a declaration")),
        };
        match head {
            "ta" => {
                if name.is_some() {
                    return Err(ModelError::syntax(lineno, 1, "duplicate 'ta' header"));
                }
                name = Some(cur.ident("an automaton name")?);
            }
            "clocks" => {
                if clocks.is_some() {
                    return Err(ModelError::syntax(lineno, 1, "duplicate 'clocks' line"));
                }
                let mut cs = Vec::new();
                while !cur.done() {
                    let c = cur.ident("a clock name")?;
                    if cs.contains(&c) {
                        return Err(ModelError::syntax(lineno, toks[cur.pos - 1].col, "duplicate clock"));
                    }
                    cs.push(c);
                    if matches!(cur.peek(), Some(Tok::Op(","))) {
                        cur.pos += 1;
                    }
                }
                clocks = Some(cs);
            }
            "actions" => {
                if alphabet.is_some() {
                    return Err(ModelError::syntax(lineno, 1, "duplicate 'actions' line"));
                }
                let mut acts = BTreeSet::new();
                while !cur.done() {
                    let a = cur.ident("an action name")?;
                    if a == "tau" {
                        return Err(ModelError::syntax(lineno, toks[cur.pos - 1].col, "'tau' is reserved"));
                    }
                    acts.insert(a);
                    if matches!(cur.peek(), Some(Tok::Op(","))) {
                        cur.pos += 1;
                    }
                }
                alphabet = Some(acts);
            }
            "location" => {
                let id = cur.ident("a location id")?;
                if !declared.insert(id.clone()) {
                    return Err(ModelError::syntax(lineno, toks[1].col, "duplicate location"));
                }
                let mut invariant = ClockConstraint::truth();
                let mut seen_inv = false;
                while !cur.done() {
                    if cur.at_keyword("initial") {
                        if initial.is_some() {
                            return Err(cur.err("more than one initial location"));
                        }
                        initial = Some(id.clone());
                        cur.pos += 1;
                    } else if cur.at_keyword("invariant") && !seen_inv {
                        cur.pos += 1;
                        invariant = cur.constraint()?;
                        seen_inv = true;
                    } else {
                        return Err(cur.err("expected 'initial' or 'invariant'"));
                    }
                }
                // an earlier switch may have introduced it implicitly
                if let Some(l) = locations.iter_mut().find(|l| l.id == id) {
                    l.invariant = invariant;
                } else {
                    locations.push(Location { id, invariant });
                }
            }
            "switch" => {
                let source = cur.ident("a source location")?;
                if !matches!(cur.next(), Some(Tok::Op("->"))) {
                    cur.pos -= 1;
                    return Err(cur.err("expected '->'"));
                }
                let target = cur.ident("a target location")?;
                let mut guard = None;
                let mut action = None;
                let mut resets = None;
                while !cur.done() {
                    if cur.at_keyword("guard") && guard.is_none() {
                        cur.pos += 1;
                        guard = Some(cur.constraint()?);
                    } else if cur.at_keyword("action") && action.is_none() {
                        cur.pos += 1;
                        let a = cur.ident("an action name")?;
                        action = Some(if a == "tau" { Action::Tau } else { Action::Visible(a) });
                    } else if cur.at_keyword("reset") && resets.is_none() {
                        cur.pos += 1;
                        let mut rs = BTreeSet::new();
                        loop {
                            rs.insert(cur.ident("a clock name")?);
                            if matches!(cur.peek(), Some(Tok::Op(","))) {
                                cur.pos += 1;
                            } else {
                                break;
                            }
                        }
                        resets = Some(rs);
                    } else {
                        return Err(cur.err("expected 'guard', 'action' or 'reset'"));
                    }
                }
                for l in [&source, &target] {
                    if !locations.iter().any(|x| &x.id == l) {
                        locations.push(Location {
                            id: l.clone(),
                            invariant: ClockConstraint::truth(),
                        });
                    }
                }
                switches.push(Switch {
                    source,
                    target,
                    guard: guard.unwrap_or_default(),
                    action: action.unwrap_or(Action::Tau),
                    resets: resets.unwrap_or_default(),
                });
            }
            other => {
                return Err(ModelError::syntax(
                    lineno,
                    toks[0].col,
                    &format!("unknown declaration '{other}'"),
                ))
            }
        }
    }
    if !any {
        return Err(ModelError::syntax(1, 1, "empty document"));
    }
    let name = name.ok_or_else(|| ModelError::syntax(1, 1, "missing 'ta' header"))?;
    let initial = initial.ok_or_else(|| ModelError::syntax(1, 1, "no initial location"))?;
    Ok(TimedAutomaton {
        name,
        clocks: clocks.unwrap_or_default(),
        alphabet: alphabet.unwrap_or_default(),
        locations,
        initial,
        switches,
    })
}

/// Renders an automaton in the model format; `parse_model` inverts it.
pub fn serialize(ta: &TimedAutomaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ta {}", ta.name);
    let _ = writeln!(out, "clocks {}", ta.clocks.join(" "));
    let acts: Vec<&str> = ta.alphabet.iter().map(String::as_str).collect();
    let _ = writeln!(out, "actions {}", acts.join(" "));
    for l in &ta.locations {
        out.push_str("location ");
        out.push_str(&l.id);
        if l.id == ta.initial {
            out.push_str(" initial");
        }
        if !l.invariant.is_true() {
            let _ = write!(out, " invariant {}", l.invariant);
        }
        out.push('\n');
    }
    for s in &ta.switches {
        let _ = write!(out, "switch {} -> {}", s.source, s.target);
        if !s.guard.is_true() {
            let _ = write!(out, " guard {}", s.guard);
        }
        let _ = write!(out, " action {}", s.action);
        if !s.resets.is_empty() {
            let rs: Vec<&str> = s.resets.iter().map(String::as_str).collect();
            let _ = write!(out, " reset {}", rs.join(","));
        }
        out.push('\n');
    }
    out
}
