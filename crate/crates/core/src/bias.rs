//! Hypothesis-space declarations.

use serde::Deserialize;

use crate::error::ParseError;
use crate::logic::Predicate;
use crate::parse::parse_predicate;

/// Bounds on the hypothesis space searched by the learner.
#[derive(Clone, Debug, PartialEq)]
pub struct Bias {
    pub target: Predicate,
    pub body_preds: Vec<Predicate>,
    pub max_clauses: usize,
    pub max_body: usize,
    pub max_vars: usize,
    pub allow_recursion: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBias {
    target: String,
    body: Vec<String>,
    max_clauses: usize,
    max_body: usize,
    max_vars: usize,
    #[serde(default)]
    allow_recursion: bool,
}

impl Bias {
    pub fn new(
        target: Predicate,
        body_preds: Vec<Predicate>,
        max_clauses: usize,
        max_body: usize,
        max_vars: usize,
        allow_recursion: bool,
    ) -> Result<Self, ParseError> {
        let mut body_preds = body_preds;
        body_preds.sort();
        body_preds.dedup();
        let bias = Bias {
            target,
            body_preds,
            max_clauses,
            max_body,
            max_vars,
            allow_recursion,
        };
        bias.validate()?;
        Ok(bias)
    }

    /// Parses the flat `key = value` format (`#` comments).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let raw: RawBias = toml::from_str(text).map_err(|e| ParseError::Bias(e.to_string()))?;
        let target = parse_predicate(&raw.target)?;
        let body = raw
            .body
            .iter()
            .map(|s| parse_predicate(s))
            .collect::<Result<Vec<_>, _>>()?;
        Bias::new(
            target,
            body,
            raw.max_clauses,
            raw.max_body,
            raw.max_vars,
            raw.allow_recursion,
        )
    }

    fn validate(&self) -> Result<(), ParseError> {
        let fail = |m: String| Err(ParseError::Bias(m));
        if self.max_clauses < 1 {
            return fail("max_clauses must be at least 1".into());
        }
        if self.max_body < 1 {
            return fail("max_body must be at least 1".into());
        }
        let widest = self
            .body_preds
            .iter()
            .chain(std::iter::once(&self.target))
            .map(|p| p.arity)
            .max()
            .unwrap_or(0);
        if self.max_vars < widest {
            return fail(format!(
                "max_vars = {} is below the largest declared arity {widest}",
                self.max_vars
            ));
        }
        if !self.allow_recursion && self.body_preds.contains(&self.target) {
            return fail(format!(
                "target {} appears in the body without allow_recursion",
                self.target
            ));
        }
        if let Some(p) = self
            .body_preds
            .iter()
            .find(|p| p.name == self.target.name && p.arity != self.target.arity)
        {
            return fail(format!("{p} clashes with target {}", self.target));
        }
        Ok(())
    }

    /// Predicates that may appear in clause bodies.
    pub fn literal_preds(&self) -> Vec<Predicate> {
        let mut preds = self.body_preds.clone();
        if self.allow_recursion && !preds.contains(&self.target) {
            preds.push(self.target);
            preds.sort();
        }
        preds
    }

    pub fn to_toml_string(&self) -> String {
        let body = self
            .body_preds
            .iter()
            .map(|p| format!("\"{p}\""))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "target = \"{}\"\nbody = [{body}]\nmax_clauses = {}\nmax_body = {}\nmax_vars = {}\nallow_recursion = {}\n",
            self.target, self.max_clauses, self.max_body, self.max_vars, self.allow_recursion
        )
    }
}
