//! SMT-LIB 2 (QF_NRA) serialization and model parsing.
//!
//! Constants are written as exact decimal ratios, e.g. `(/ 1.0 3.0)` and
//! `(- 2.0)`, which every QF_NRA front end reads as reals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{ETRFormula, Relation, SparsePoly};
use crate::error::{Error, Result};
use crate::scalar::Rational;

fn decimal(n: &BigInt) -> String {
    format!("{n}.0")
}

pub fn rational_literal(q: &Rational) -> String {
    let mag = q.abs();
    let body = if mag.denom() == &BigInt::from(1) {
        decimal(mag.numer())
    } else {
        format!("(/ {} {})", decimal(mag.numer()), decimal(mag.denom()))
    };
    if q.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn poly_sexpr(p: &SparsePoly, names: &[String]) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(m, c)| {
            let mut factors: Vec<String> = Vec::new();
            let unit = c == &Rational::from_integer(1.into());
            if !unit || m.is_empty() {
                factors.push(rational_literal(c));
            }
            for &(v, e) in m {
                for _ in 0..e {
                    factors.push(names[v].clone());
                }
            }
            if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                format!("(* {})", factors.join(" "))
            }
        })
        .collect();
    match terms.len() {
        0 => "0.0".to_string(),
        1 => terms.into_iter().next().expect("one term"),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

/// Full script: options, logic, declarations, assertions, `check-sat`, `get-model`.
pub fn to_smtlib(f: &ETRFormula) -> String {
    let mut out = String::from("(set-option :produce-models true)\n(set-logic QF_NRA)\n");
    for v in &f.vars {
        out.push_str(&format!("(declare-fun {v} () Real)\n"));
    }
    for a in &f.atoms {
        let op = match a.rel {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        };
        out.push_str(&format!("(assert ({op} {} 0.0))\n", poly_sexpr(&a.poly, &f.vars)));
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                chars.next();
                stack.push(Vec::new());
            }
            ')' => {
                chars.next();
                let done = stack.pop().ok_or_else(|| Error::Backend("unbalanced `)`".into()))?;
                stack
                    .last_mut()
                    .ok_or_else(|| Error::Backend("unbalanced `)`".into()))?
                    .push(Sexp::List(done));
            }
            ';' => {
                while chars.next().is_some_and(|c| c != '\n') {}
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                for c in chars.by_ref() {
                    s.push(c);
                    if c == '"' {
                        break;
                    }
                }
                stack.last_mut().expect("stack nonempty").push(Sexp::Atom(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                stack.last_mut().expect("stack nonempty").push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::Backend("unbalanced `(`".into()));
    }
    Ok(stack.pop().expect("root"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (int_part, frac) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() || !int_part.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac}").parse().ok()?;
    let scale = BigInt::from(10).pow(frac.len() as u32);
    Some(Rational::new(digits, scale))
}

/// Exact value of a model term; `None` for anything non-rational (e.g. `root-obj`).
pub fn sexp_value(e: &Sexp) -> Option<Rational> {
    match e {
        Sexp::Atom(s) => parse_decimal(s),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => sexp_value(x).map(|v| -v),
            [Sexp::Atom(op), a, b] if op == "/" => {
                let d = sexp_value(b)?;
                if d.is_zero() {
                    None
                } else {
                    Some(sexp_value(a)? / d)
                }
            }
            [Sexp::Atom(op), a, b] if op == "-" => Some(sexp_value(a)? - sexp_value(b)?),
            _ => None,
        },
    }
}

/// Model from `(define-fun name () Real value)` entries. Returns `None` when
/// any value is not an exact rational.
pub fn parse_model(text: &str) -> Result<Option<BTreeMap<String, Rational>>> {
    let exprs = parse_sexps(text)?;
    let mut model = BTreeMap::new();
    let defs: Vec<&Sexp> = match exprs.as_slice() {
        [Sexp::List(items)] => {
            let start = usize::from(matches!(items.first(), Some(Sexp::Atom(a)) if a == "model"));
            items[start..].iter().collect()
        }
        _ => return Ok(None),
    };
    for d in defs {
        match d {
            Sexp::List(parts) => match parts.as_slice() {
                [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), _sort, value] if kw == "define-fun" && args.is_empty() => {
                    match sexp_value(value) {
                        Some(v) => {
                            model.insert(name.clone(), v);
                        }
                        None => return Ok(None),
                    }
                }
                _ => return Ok(None),
            },
            _ => return Ok(None),
        }
    }
    Ok(Some(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn literals() {
        assert_eq!(rational_literal(&rat(1, 3)), "(/ 1.0 3.0)");
        assert_eq!(rational_literal(&rat(-1, 3)), "(- (/ 1.0 3.0))");
        assert_eq!(rational_literal(&int(-2)), "(- 2.0)");
        assert_eq!(rational_literal(&int(0)), "0.0");
    }

    #[test]
    fn script_shape() {
        let mut f = ETRFormula::new();
        let x = f.var("x");
        f.assert(SparsePoly::var(x).mul(&SparsePoly::var(x)).add(&SparsePoly::constant(int(1))), Relation::Eq);
        let s = to_smtlib(&f);
        assert!(s.starts_with("(set-option :produce-models true)\n(set-logic QF_NRA)\n"));
        assert!(s.contains("(declare-fun x () Real)"));
        assert!(s.contains("(assert (= (+ 1.0 (* x x)) 0.0))"));
    }

    #[test]
    fn model_parsing() {
        let text = "(\n  (define-fun x () Real\n    (/ 1.0 2.0))\n  (define-fun y () Real\n    (- 2.0))\n)";
        let m = parse_model(text).unwrap().unwrap();
        assert_eq!(m["x"], rat(1, 2));
        assert_eq!(m["y"], int(-2));
        let root = "((define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 1)))";
        assert_eq!(parse_model(root).unwrap(), None);
        assert_eq!(parse_decimal("0.25"), Some(rat(1, 4)));
        assert!(parse_sexps("((").is_err());
    }
}
