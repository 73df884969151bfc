//! Surface syntax for background knowledge, examples and hypotheses.
//!
//! ```text
//! parent(a,b).                         % fact
//! anc(X,Y) :- parent(X,Z), anc(Z,Y).   % rule
//! pos(anc(a,c)).  neg(anc(c,a)).       % examples
//! ```
//!
//! Lowercase or numeric identifiers are constants and predicate names,
//! uppercase or `_`-initial identifiers are variables. `%` starts a comment.

use std::collections::{HashMap, HashSet};

use crate::error::ParseError;
use crate::logic::{Atom, Clause, ExampleSet, GroundAtom, Hypothesis, Predicate, Program, Term};
use crate::symbol::Sym;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            col += 1;
            continue;
        }
        if c == ':' && chars.get(i + 1) == Some(&'-') {
            out.push((Tok::Neck, pos));
            i += 2;
            col += 2;
            continue;
        }
        let negative_number = c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
        if c.is_ascii_alphanumeric() || c == '_' || negative_number {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if c.is_ascii_uppercase() || c == '_' {
                out.push((Tok::Var(word), pos));
            } else {
                out.push((Tok::Name(word), pos));
            }
            continue;
        }
        return Err(ParseError::Syntax {
            line,
            col,
            msg: format!("unexpected character {c:?}"),
        });
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    anon: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            anon: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, msg: String) -> ParseError {
        let p = self.pos();
        ParseError::Syntax {
            line: p.line,
            col: p.col,
            msg,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.bump().0 {
            Tok::Name(n) => Ok(Term::Const(Sym::intern(&n))),
            Tok::Var(v) if v == "_" => {
                self.anon += 1;
                Ok(Term::Var(Sym::intern(&format!("_G{}", self.anon))))
            }
            Tok::Var(v) => Ok(Term::Var(Sym::intern(&v))),
            other => {
                self.at -= 1;
                Err(self.err(format!("expected a term, found {}", other.describe())))
            }
        }
    }

    fn atom(&mut self) -> Result<(Atom, Pos), ParseError> {
        let pos = self.pos();
        let name = match self.peek().clone() {
            Tok::Name(n) if !n.starts_with(|c: char| c.is_ascii_digit() || c == '-') => {
                self.bump();
                n
            }
            other => {
                return Err(self.err(format!(
                    "expected a predicate name, found {}",
                    other.describe()
                )))
            }
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok((Atom::new(&name, args), pos))
    }

    fn clause(&mut self) -> Result<(Clause, Pos), ParseError> {
        let (head, pos) = self.atom()?;
        let mut body = Vec::new();
        if *self.peek() == Tok::Neck {
            self.bump();
            body.push(self.atom()?.0);
            while *self.peek() == Tok::Comma {
                self.bump();
                body.push(self.atom()?.0);
            }
        }
        self.expect(Tok::Dot)?;
        Ok((Clause::new(head, body), pos))
    }
}

#[derive(Default)]
struct ArityTable(HashMap<Sym, usize>);

impl ArityTable {
    fn check(&mut self, atom: &Atom, pos: Pos) -> Result<(), ParseError> {
        match self.0.get(&atom.pred) {
            Some(&a) if a != atom.arity() => Err(ParseError::ArityClash {
                line: pos.line,
                col: pos.col,
                name: atom.pred.to_string(),
                expected: a,
                found: atom.arity(),
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(atom.pred, atom.arity());
                Ok(())
            }
        }
    }
}

fn parse_clauses(text: &str) -> Result<Vec<(Clause, Pos)>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut arities = ArityTable::default();
    let mut out = Vec::new();
    while !p.at_eof() {
        let (clause, pos) = p.clause()?;
        arities.check(&clause.head, pos)?;
        for a in &clause.body {
            arities.check(a, pos)?;
        }
        out.push((clause, pos));
    }
    Ok(out)
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut program = Program::default();
    let mut seen: HashSet<GroundAtom> = HashSet::new();
    let mut seen_rules: HashSet<String> = HashSet::new();
    for (clause, pos) in parse_clauses(text)? {
        if clause.body.is_empty() {
            let Some(fact) = clause.head.to_ground() else {
                return Err(ParseError::NonGroundFact {
                    line: pos.line,
                    col: pos.col,
                    atom: clause.head.to_string(),
                });
            };
            if seen.insert(fact.clone()) {
                program.facts.push(fact);
            }
        } else {
            if !clause.is_range_restricted() {
                return Err(ParseError::NotRangeRestricted {
                    line: pos.line,
                    col: pos.col,
                    clause: clause.to_string(),
                });
            }
            if seen_rules.insert(clause.to_string()) {
                program.rules.push(clause);
            }
        }
    }
    Ok(program)
}

/// Parses `pos(atom).` / `neg(atom).` lines. Duplicates within a polarity
/// collapse; an atom in both polarities is an error.
pub fn parse_examples(text: &str) -> Result<ExampleSet, ParseError> {
    let mut p = Parser::new(text)?;
    let mut target: Option<Predicate> = None;
    let mut pos_seen: HashSet<GroundAtom> = HashSet::new();
    let mut neg_seen: HashSet<GroundAtom> = HashSet::new();
    let mut examples = ExampleSet::default();
    while !p.at_eof() {
        let at = p.pos();
        let positive = match p.bump().0 {
            Tok::Name(w) if w == "pos" => true,
            Tok::Name(w) if w == "neg" => false,
            other => {
                return Err(ParseError::BadExampleWrapper {
                    line: at.line,
                    col: at.col,
                    found: other.describe(),
                })
            }
        };
        p.expect(Tok::LParen)?;
        let (atom, apos) = p.atom()?;
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
        let Some(ground) = atom.to_ground() else {
            return Err(ParseError::NonGroundExample {
                line: apos.line,
                col: apos.col,
                atom: atom.to_string(),
            });
        };
        match target {
            None => target = Some(ground.predicate()),
            Some(t) if t != ground.predicate() => {
                return Err(ParseError::MixedTarget {
                    line: apos.line,
                    col: apos.col,
                    expected: t.to_string(),
                    found: ground.predicate().to_string(),
                })
            }
            Some(_) => {}
        }
        if positive {
            if pos_seen.insert(ground.clone()) {
                examples.pos.push(ground);
            }
        } else if neg_seen.insert(ground.clone()) {
            examples.neg.push(ground);
        }
    }
    if let Some(both) = examples.pos.iter().find(|a| neg_seen.contains(*a)) {
        return Err(ParseError::ContradictoryExample {
            atom: both.to_string(),
        });
    }
    Ok(examples)
}

/// Parses a hypothesis: range-restricted clauses, returned in canonical form.
pub fn parse_hypothesis(text: &str) -> Result<Hypothesis, ParseError> {
    let mut clauses = Vec::new();
    for (clause, pos) in parse_clauses(text)? {
        if !clause.is_range_restricted() {
            return Err(ParseError::NotRangeRestricted {
                line: pos.line,
                col: pos.col,
                clause: clause.to_string(),
            });
        }
        clauses.push(clause);
    }
    Ok(Hypothesis::new(clauses))
}

/// Parses a single ground atom such as `gp(a,c)`.
pub fn parse_ground_atom(text: &str) -> Result<GroundAtom, ParseError> {
    let mut p = Parser::new(text)?;
    let (atom, pos) = p.atom()?;
    if !p.at_eof() {
        return Err(p.err(format!("trailing input {}", p.peek().describe())));
    }
    atom.to_ground().ok_or(ParseError::NonGroundExample {
        line: pos.line,
        col: pos.col,
        atom: atom.to_string(),
    })
}

/// Parses `name/arity`.
pub fn parse_predicate(text: &str) -> Result<Predicate, ParseError> {
    let bad = || ParseError::Bias(format!("expected name/arity, found {text:?}"));
    let (name, arity) = text.trim().rsplit_once('/').ok_or_else(bad)?;
    let valid_name = name.starts_with(|c: char| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid_name {
        return Err(bad());
    }
    let arity = arity.parse::<usize>().map_err(|_| bad())?;
    Ok(Predicate::new(name, arity))
}
