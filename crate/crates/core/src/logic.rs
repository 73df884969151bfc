//! Terms, atoms, definite clauses and the containers built from them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::symbol::Sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Sym),
    Var(Sym),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) | Term::Var(s) => write!(f, "{s}"),
        }
    }
}

/// A predicate symbol together with its arity, printed as `name/arity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: Sym,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate {
            name: Sym::intern(name),
            arity,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: Sym::intern(pred),
            args,
        }
    }

    pub fn predicate(&self) -> Predicate {
        Predicate {
            name: self.pred,
            arity: self.args.len(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(*c),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            pred: self.pred,
            args: args.into_boxed_slice(),
        })
    }

    pub fn vars(&self) -> impl Iterator<Item = Sym> + '_ {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A variable-free atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: Sym,
    pub args: Box<[Sym]>,
}

impl GroundAtom {
    pub fn new(pred: &str, args: &[&str]) -> Self {
        GroundAtom {
            pred: Sym::intern(pred),
            args: args.iter().map(|a| Sym::intern(a)).collect(),
        }
    }

    pub fn predicate(&self) -> Predicate {
        Predicate {
            name: self.pred,
            arity: self.args.len(),
        }
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.iter().map(|&c| Term::Const(c)).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A definite clause `head :- body`. An empty body with a ground head is a fact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Atom>) -> Self {
        Clause { head, body }
    }

    /// Number of atoms, head included.
    pub fn size(&self) -> usize {
        1 + self.body.len()
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.is_ground()
    }

    /// Every head variable also occurs in the body.
    pub fn is_range_restricted(&self) -> bool {
        let body_vars: HashSet<Sym> = self.body.iter().flat_map(|a| a.vars()).collect();
        self.head.vars().all(|v| body_vars.contains(&v))
    }

    pub fn mentions(&self, pred: Predicate) -> bool {
        self.body.iter().any(|a| a.predicate() == pred)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(":-")?;
            for (i, a) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
        }
        f.write_str(".")
    }
}

/// Canonical name for the `i`-th variable of a clause.
pub fn var_name(i: usize) -> Sym {
    if i < 26 {
        let c = (b'A' + i as u8) as char;
        Sym::intern(&c.to_string())
    } else {
        Sym::intern(&format!("V{i}"))
    }
}

// Above this many body-only variables the exhaustive permutation search is
// replaced by a greedy naming pass.
const MAX_PERMUTED_VARS: usize = 6;

fn rename_atom(atom: &Atom, map: &HashMap<Sym, Sym>) -> Atom {
    Atom {
        pred: atom.pred,
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(map[v]),
                c => *c,
            })
            .collect(),
    }
}

fn render_body(body: &[Atom], map: &HashMap<Sym, Sym>) -> (Vec<Atom>, Vec<String>) {
    let mut lits: Vec<(String, Atom)> = body
        .iter()
        .map(|a| {
            let r = rename_atom(a, map);
            (r.to_string(), r)
        })
        .collect();
    lits.sort_by(|a, b| a.0.cmp(&b.0));
    lits.dedup_by(|a, b| a.0 == b.0);
    let strings = lits.iter().map(|(s, _)| s.clone()).collect();
    (lits.into_iter().map(|(_, a)| a).collect(), strings)
}

fn for_each_permutation(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Canonical representative of a clause's renaming/reordering class.
///
/// Head variables are numbered by first occurrence in the head. Body-only
/// variables get the numbering that makes the sorted body literal list
/// lexicographically smallest, and the body is sorted and deduplicated.
pub fn canonical_clause(clause: &Clause) -> Clause {
    let mut head_vars: Vec<Sym> = Vec::new();
    for v in clause.head.vars() {
        if !head_vars.contains(&v) {
            head_vars.push(v);
        }
    }
    let mut body_only: Vec<Sym> = Vec::new();
    for v in clause.body.iter().flat_map(|a| a.vars()) {
        if !head_vars.contains(&v) && !body_only.contains(&v) {
            body_only.push(v);
        }
    }
    let mut map: HashMap<Sym, Sym> = head_vars
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, var_name(i)))
        .collect();
    let offset = head_vars.len();
    let head = rename_atom(&clause.head, &map);

    let body = if body_only.len() <= MAX_PERMUTED_VARS {
        let mut best: Option<(Vec<String>, Vec<Atom>)> = None;
        let mut perm: Vec<usize> = (0..body_only.len()).collect();
        for_each_permutation(&mut perm, 0, &mut |p| {
            for (j, &v) in body_only.iter().enumerate() {
                map.insert(v, var_name(offset + p[j]));
            }
            let (atoms, strings) = render_body(&clause.body, &map);
            if best.as_ref().is_none_or(|(b, _)| strings < *b) {
                best = Some((strings, atoms));
            }
        });
        best.map(|(_, atoms)| atoms).unwrap_or_default()
    } else {
        canonical_body_heuristic(&clause.body, &body_only, offset, &mut map)
    };
    Clause { head, body }
}

fn canonical_body_heuristic(
    body: &[Atom],
    body_only: &[Sym],
    offset: usize,
    map: &mut HashMap<Sym, Sym>,
) -> Vec<Atom> {
    // Greedy: repeatedly take the smallest literal with still-unnamed
    // variables masked, then name its fresh variables in argument order.
    let masked = Sym::intern("_");
    let mut remaining: Vec<&Atom> = body.iter().collect();
    let mut next = offset;
    while !remaining.is_empty() {
        let idx = (0..remaining.len())
            .min_by_key(|&i| {
                let a = remaining[i];
                let m: HashMap<Sym, Sym> = a
                    .vars()
                    .map(|v| (v, map.get(&v).copied().unwrap_or(masked)))
                    .collect();
                rename_atom(a, &m).to_string()
            })
            .expect("non-empty");
        let atom = remaining.remove(idx);
        for v in atom.vars() {
            if body_only.contains(&v) && !map.contains_key(&v) {
                map.insert(v, var_name(next));
                next += 1;
            }
        }
    }
    render_body(body, map).0
}

/// A finite set of definite clauses, stored in canonical form.
///
/// Clauses are canonicalised on construction and kept sorted by size and then
/// by their printed form. Equality and hashing use the canonical string.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    clauses: Vec<Clause>,
    key: String,
}

impl Hypothesis {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let parts = clauses
            .into_iter()
            .map(|c| {
                let c = canonical_clause(&c);
                let s = c.to_string();
                (c, s)
            })
            .collect();
        Self::from_canonical_parts(parts)
    }

    pub fn empty() -> Self {
        Hypothesis {
            clauses: Vec::new(),
            key: String::new(),
        }
    }

    /// Builds a hypothesis from clauses that are already canonical, paired
    /// with their printed form.
    pub(crate) fn from_canonical_parts(mut parts: Vec<(Clause, String)>) -> Self {
        parts.sort_by(|a, b| (a.0.size(), &a.1).cmp(&(b.0.size(), &b.1)));
        parts.dedup_by(|a, b| a.1 == b.1);
        let key = parts
            .iter()
            .map(|(_, s)| s.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Hypothesis {
            clauses: parts.into_iter().map(|(c, _)| c).collect(),
            key,
        }
    }

    /// Clauses already canonical and in canonical order, with their joined text.
    pub(crate) fn from_sorted(clauses: Vec<Clause>, key: String) -> Self {
        Hypothesis { clauses, key }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Total number of atoms, heads and bodies.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::size).sum()
    }

    pub fn canonical_form(&self) -> &str {
        &self.key
    }
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Hypothesis {}

impl Hash for Hypothesis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// Background knowledge: ground facts plus function-free rules.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub facts: Vec<GroundAtom>,
    pub rules: Vec<Clause>,
}

impl Program {
    pub fn predicates(&self) -> HashSet<Predicate> {
        let mut preds: HashSet<Predicate> = self.facts.iter().map(|f| f.predicate()).collect();
        for r in &self.rules {
            preds.insert(r.head.predicate());
            preds.extend(r.body.iter().map(|a| a.predicate()));
        }
        preds
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{fact}.")?;
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// Labelled examples `(E+, E-)`.
///
/// Parsed example sets hold each atom once. Bootstrap resamples may repeat an
/// atom within a polarity; repeated atoms count once per occurrence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExampleSet {
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
}

impl ExampleSet {
    pub fn new(pos: Vec<GroundAtom>, neg: Vec<GroundAtom>) -> Self {
        ExampleSet { pos, neg }
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn target(&self) -> Option<Predicate> {
        self.pos
            .first()
            .or_else(|| self.neg.first())
            .map(|a| a.predicate())
    }

    /// Positives first, then negatives, each paired with its label.
    pub fn labeled(&self) -> impl Iterator<Item = (&GroundAtom, bool)> {
        self.pos
            .iter()
            .map(|a| (a, true))
            .chain(self.neg.iter().map(|a| (a, false)))
    }
}

impl fmt::Display for ExampleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.pos {
            writeln!(f, "pos({a}).")?;
        }
        for a in &self.neg {
            writeln!(f, "neg({a}).")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Term {
        Term::Var(Sym::intern(name))
    }

    fn gp_rule(x: &str, y: &str, z: &str, swap: bool) -> Clause {
        let mut body = vec![
            Atom::new("parent", vec![v(x), v(z)]),
            Atom::new("parent", vec![v(z), v(y)]),
        ];
        if swap {
            body.reverse();
        }
        Clause::new(Atom::new("gp", vec![v(x), v(y)]), body)
    }

    #[test]
    fn renaming_and_reordering_are_invisible() {
        let a = Hypothesis::new([gp_rule("A", "B", "C", false)]);
        let b = Hypothesis::new([gp_rule("X", "Y", "Z", false)]);
        let c = Hypothesis::new([gp_rule("P", "Q", "R", true)]);
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_eq!(a.canonical_form(), c.canonical_form());
        assert_eq!(a.canonical_form(), "gp(A,B):-parent(A,C),parent(C,B).");
    }

    #[test]
    fn size_counts_atoms() {
        let h = Hypothesis::new([gp_rule("A", "B", "C", false)]);
        assert_eq!(h.size(), 3);
        assert_eq!(Hypothesis::empty().size(), 0);
    }

    #[test]
    fn duplicate_clauses_collapse() {
        let h = Hypothesis::new([gp_rule("A", "B", "C", false), gp_rule("X", "Y", "Z", true)]);
        assert_eq!(h.clauses().len(), 1);
    }

    #[test]
    fn range_restriction() {
        let ok = gp_rule("A", "B", "C", false);
        assert!(ok.is_range_restricted());
        let bad = Clause::new(
            Atom::new("gp", vec![v("A"), v("B")]),
            vec![Atom::new("parent", vec![v("A"), v("C")])],
        );
        assert!(!bad.is_range_restricted());
    }

    #[test]
    fn heuristic_path_is_deterministic() {
        // Eight body-only variables exceed the permutation limit.
        let vars: Vec<String> = (0..8).map(|i| format!("X{i}")).collect();
        let mut body = vec![Atom::new("e", vec![v("A"), v(&vars[0])])];
        for w in vars.windows(2) {
            body.push(Atom::new("e", vec![v(&w[0]), v(&w[1])]));
        }
        let c = Clause::new(Atom::new("p", vec![v("A")]), body.clone());
        let mut reversed = body;
        reversed.reverse();
        let d = Clause::new(Atom::new("p", vec![v("A")]), reversed);
        assert_eq!(canonical_clause(&c).to_string(), canonical_clause(&d).to_string());
    }
}
