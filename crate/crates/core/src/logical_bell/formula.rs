//! Propositional formulas over atoms `variable = outcome`.
//!
//! Text syntax, loosest binding first:
//!
//! ```text
//! formula := disj (("->" | "<->" | "(+)") formula)?    right-associative
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "!" unary | "(" formula ")" | "true" | "false" | atom
//! atom    := NAME "=" NAME        NAME = [A-Za-z0-9_.]+
//! ```
//!
//! Whitespace is insignificant. `(+)` is exclusive or.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scenario::{Scenario, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom { var: VarId, outcome: usize },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(var: VarId, outcome: usize) -> Formula {
        Formula::Atom { var, outcome }
    }

    pub fn negate(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    /// Truth value under `lookup`, which must cover every atom's variable.
    pub fn eval(&self, lookup: &impl Fn(VarId) -> usize) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { var, outcome } => lookup(*var) == *outcome,
            Formula::Not(f) => !f.eval(lookup),
            Formula::And(a, b) => a.eval(lookup) && b.eval(lookup),
            Formula::Or(a, b) => a.eval(lookup) || b.eval(lookup),
            Formula::Implies(a, b) => !a.eval(lookup) || b.eval(lookup),
            Formula::Iff(a, b) => a.eval(lookup) == b.eval(lookup),
            Formula::Xor(a, b) => a.eval(lookup) != b.eval(lookup),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { var, .. } => {
                out.insert(*var);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Xor(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn parse(text: &str, scenario: &Scenario) -> Result<Formula> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: text.len(),
            scenario,
        };
        let f = parser.formula()?;
        match parser.tokens.get(parser.pos) {
            None => Ok(f),
            Some((at, tok)) => Err(Error::FormulaParse {
                position: *at,
                message: format!("unexpected {tok:?}"),
            }),
        }
    }

    /// Fully parenthesized text in the parse syntax.
    pub fn render(&self, scenario: &Scenario) -> String {
        match self {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom { var, outcome } => {
                format!("{}={}", scenario.variables()[*var], scenario.outcomes(*var)[*outcome])
            }
            Formula::Not(f) => format!("!{}", f.render(scenario)),
            Formula::And(a, b) => format!("({} & {})", a.render(scenario), b.render(scenario)),
            Formula::Or(a, b) => format!("({} | {})", a.render(scenario), b.render(scenario)),
            Formula::Implies(a, b) => format!("({} -> {})", a.render(scenario), b.render(scenario)),
            Formula::Iff(a, b) => format!("({} <-> {})", a.render(scenario), b.render(scenario)),
            Formula::Xor(a, b) => format!("({} (+) {})", a.render(scenario), b.render(scenario)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Name(String),
    Eq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Xor,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let rest = &text[i..];
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if rest.starts_with("(+)") {
            (Token::Xor, 3)
        } else if rest.starts_with("<->") {
            (Token::Iff, 3)
        } else if rest.starts_with("->") {
            (Token::Implies, 2)
        } else {
            match c {
                b'(' => (Token::LParen, 1),
                b')' => (Token::RParen, 1),
                b'!' => (Token::Not, 1),
                b'&' => (Token::And, 1),
                b'|' => (Token::Or, 1),
                b'=' => (Token::Eq, 1),
                _ if is_name_byte(c) => {
                    let len = bytes[i..].iter().take_while(|b| is_name_byte(**b)).count();
                    (Token::Name(rest[..len].to_string()), len)
                }
                _ => {
                    return Err(Error::FormulaParse {
                        position: i,
                        message: format!("unexpected character {:?}", rest.chars().next().unwrap()),
                    })
                }
            }
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.'
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    scenario: &'a Scenario,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::FormulaParse {
            position: self.here(),
            message: message.into(),
        })
    }

    fn formula(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        let build: fn(Formula, Formula) -> Formula = match self.peek() {
            Some(Token::Implies) => Formula::implies,
            Some(Token::Iff) => Formula::iff,
            Some(Token::Xor) => Formula::xor,
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.formula()?;
        Ok(build(left, right))
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Formula::negate(self.unary()?))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Token::Name(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Token::Eq) {
                    return match name.as_str() {
                        "true" => Ok(Formula::True),
                        "false" => Ok(Formula::False),
                        _ => self.error(format!("expected `=` after `{name}`")),
                    };
                }
                self.pos += 1;
                let Some(Token::Name(label)) = self.peek().cloned() else {
                    return self.error("expected an outcome label");
                };
                let var = match self.scenario.var_id(&name) {
                    Ok(v) => v,
                    Err(_) => return self.error(format!("unknown variable `{name}`")),
                };
                let outcome = match self.scenario.outcome_id(var, &label) {
                    Ok(o) => o,
                    Err(_) => return self.error(format!("`{label}` is not an outcome of `{name}`")),
                };
                self.pos += 1;
                Ok(Formula::atom(var, outcome))
            }
            Some(tok) => self.error(format!("unexpected {tok:?}")),
            None => self.error("unexpected end of formula"),
        }
    }
}
