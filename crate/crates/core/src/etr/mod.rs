//! Existential formulas over the reals for universal-circuit queries.
//!
//! Each gate `u` gets one real unknown `z_u` and one equality atom:
//! `z_u − (z_l + z_r) = 0` for Add, `z_u − z_l·z_r = 0` for Mul, and
//! `z_u − c = 0` for leaves pinned to a value `c` (or `z_u − w = 0` for a
//! leaf tied to another unknown `w`). Every gate atom has degree at most 2.

pub mod smtlib;
pub mod solver;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::circuit::GateKind;
use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational};
use crate::universal::UniversalCircuit;

pub use smtlib::{parse_model, to_smtlib};
pub use solver::{solve, solve_script, SolverConfig, SolverStatus, SolverVerdict};

/// A monomial as sorted `(variable, exponent)` pairs.
pub type Monomial = Vec<(usize, u32)>;

/// A sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Rational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<usize, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *out.entry(v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(vec![(i, 1)], Rational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).max()
    }

    /// Exact evaluation; unassigned variables read as zero.
    pub fn eval(&self, vals: &[Rational]) -> Rational {
        let zero = Rational::zero();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut acc = c.clone();
                for &(v, e) in m {
                    let x = vals.get(v).unwrap_or(&zero);
                    for _ in 0..e {
                        acc *= x;
                    }
                }
                acc
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `p = 0`
    Eq,
    /// `p ≥ 0`
    Ge,
    /// `p > 0`
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub poly: SparsePoly,
    pub rel: Relation,
}

impl Atom {
    pub fn holds(&self, vals: &[Rational]) -> bool {
        let v = self.poly.eval(vals);
        match self.rel {
            Relation::Eq => v.is_zero(),
            Relation::Ge => v >= Rational::zero(),
            Relation::Gt => v > Rational::zero(),
        }
    }
}

/// `∃ vars: ⋀ atoms`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ETRFormula {
    pub vars: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl ETRFormula {
    pub fn new() -> Self {
        ETRFormula::default()
    }

    pub fn var(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(name.into());
        self.vars.len() - 1
    }

    pub fn assert(&mut self, poly: SparsePoly, rel: Relation) {
        self.atoms.push(Atom { poly, rel });
    }

    /// Every atom references declared variables only.
    pub fn check_vars(&self) -> Result<()> {
        for (i, a) in self.atoms.iter().enumerate() {
            if let Some(v) = a.poly.max_var() {
                if v >= self.vars.len() {
                    return Err(Error::validation(format!("atom {i} references undeclared variable {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn satisfied_by(&self, vals: &[Rational]) -> bool {
        self.atoms.iter().all(|a| a.holds(vals))
    }

    /// Values in declaration order from a name-keyed model (missing names read as 0).
    pub fn assignment(&self, model: &BTreeMap<String, Rational>) -> Vec<Rational> {
        self.vars.iter().map(|n| model.get(n).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    /// Re-evaluates every atom at a solver model.
    pub fn check_model(&self, model: &BTreeMap<String, Rational>) -> bool {
        self.satisfied_by(&self.assignment(model))
    }

    pub fn max_degree(&self) -> u32 {
        self.atoms.iter().map(|a| a.poly.degree()).max().unwrap_or(0)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

impl fmt::Display for ETRFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∃ {} :", self.vars.join(", "))?;
        for a in &self.atoms {
            let rel = match a.rel {
                Relation::Eq => "=",
                Relation::Ge => "≥",
                Relation::Gt => ">",
            };
            let body: Vec<String> = a
                .poly
                .terms()
                .map(|(m, c)| {
                    let mono: Vec<String> = m
                        .iter()
                        .map(|&(v, e)| if e == 1 { self.vars[v].clone() } else { format!("{}^{e}", self.vars[v]) })
                        .collect();
                    if mono.is_empty() {
                        format_rational(c)
                    } else {
                        format!("{}·{}", format_rational(c), mono.join("·"))
                    }
                })
                .collect();
            let body = if body.is_empty() { "0".to_string() } else { body.join(" + ") };
            write!(f, "\n  {body} {rel} 0")?;
        }
        Ok(())
    }
}

/// How auxiliary inputs enter a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxMode {
    /// Fresh existential `y_j`.
    Symbolic,
    /// Pinned to the given values.
    Fixed(Vec<Rational>),
}

/// A source of leaf values: constants or previously declared unknowns.
enum Leaves<'a> {
    Values(&'a [Rational]),
    Vars(&'a [usize]),
}

impl Leaves<'_> {
    fn poly(&self, i: usize) -> SparsePoly {
        match self {
            Leaves::Values(v) => SparsePoly::constant(v[i].clone()),
            Leaves::Vars(v) => SparsePoly::var(v[i]),
        }
    }
}

fn real_const(c: &crate::scalar::GaussianRational) -> Result<Rational> {
    if c.is_real() {
        Ok(c.re.clone())
    } else {
        Err(Error::NotReal)
    }
}

/// Adds one unknown and one equality atom per gate; returns the output unknown.
fn encode_gates(f: &mut ETRFormula, u: &UniversalCircuit, tag: &str, x: &Leaves, y: &Leaves) -> Result<usize> {
    let n = u.n_essential;
    let gates = u.base.gates();
    let mut z = Vec::with_capacity(gates.len());
    for g in gates {
        let zu = f.var(format!("z{tag}_{}", g.id));
        z.push(zu);
        let rhs = match &g.kind {
            GateKind::Input(v) if *v < n => x.poly(*v),
            GateKind::Input(v) => y.poly(v - n),
            GateKind::Const(c) => SparsePoly::constant(real_const(c)?),
            GateKind::Add(l, r) => SparsePoly::var(z[*l]).add(&SparsePoly::var(z[*r])),
            GateKind::Mul(l, r) => SparsePoly::var(z[*l]).mul(&SparsePoly::var(z[*r])),
        };
        f.assert(SparsePoly::var(zu).sub(&rhs), Relation::Eq);
    }
    Ok(z[u.base.outputs()[0]])
}

fn aux_leaves(f: &mut ETRFormula, u: &UniversalCircuit, a: &AuxMode) -> Result<AuxHolder> {
    match a {
        AuxMode::Symbolic => Ok(AuxHolder::Vars((0..u.m_auxiliary).map(|j| f.var(format!("y_{j}"))).collect())),
        AuxMode::Fixed(vals) => {
            if vals.len() != u.m_auxiliary {
                return Err(Error::Dimension { expected: u.m_auxiliary, got: vals.len() });
            }
            Ok(AuxHolder::Values(vals.clone()))
        }
    }
}

enum AuxHolder {
    Vars(Vec<usize>),
    Values(Vec<Rational>),
}

impl AuxHolder {
    fn leaves(&self) -> Leaves<'_> {
        match self {
            AuxHolder::Vars(v) => Leaves::Vars(v),
            AuxHolder::Values(v) => Leaves::Values(v),
        }
    }
}

fn square(z: usize) -> SparsePoly {
    SparsePoly::var(z).mul(&SparsePoly::var(z))
}

/// `z_o² − ε² ≥ 0`, or `ε² − z_o² > 0` when `negate`.
fn output_atom(f: &mut ETRFormula, zo: usize, eps: &Rational, negate: bool) {
    let eps_sq = SparsePoly::constant(eps * eps);
    if negate {
        f.assert(eps_sq.sub(&square(zo)), Relation::Gt);
    } else {
        f.assert(square(zo).sub(&eps_sq), Relation::Ge);
    }
}

fn check_point(u: &UniversalCircuit, v: &[Rational]) -> Result<()> {
    if v.len() != u.n_essential {
        return Err(Error::Dimension { expected: u.n_essential, got: v.len() });
    }
    Ok(())
}

/// `|Ψ(v, a)| ≥ ε` as a formula (or `|Ψ(v, a)| < ε` when `negate`).
pub fn encode_phi(u: &UniversalCircuit, v: &[Rational], eps: &Rational, a: &AuxMode, negate: bool) -> Result<ETRFormula> {
    check_point(u, v)?;
    let mut f = ETRFormula::new();
    let aux = aux_leaves(&mut f, u, a)?;
    let zo = encode_gates(&mut f, u, "", &Leaves::Values(v), &aux.leaves())?;
    output_atom(&mut f, zo, eps, negate);
    Ok(f)
}

/// `∃ v ∈ [-1,1]^n : |Ψ(v, a)| ≥ 1`.
pub fn encode_psi(u: &UniversalCircuit, a: &AuxMode) -> Result<ETRFormula> {
    let mut f = ETRFormula::new();
    let aux = aux_leaves(&mut f, u, a)?;
    psi_block(&mut f, u, &aux)?;
    Ok(f)
}

fn psi_block(f: &mut ETRFormula, u: &UniversalCircuit, aux: &AuxHolder) -> Result<()> {
    let v: Vec<usize> = (0..u.n_essential).map(|i| f.var(format!("v_{i}"))).collect();
    let zo = encode_gates(f, u, "p", &Leaves::Vars(&v), &aux.leaves())?;
    for &vi in &v {
        f.assert(SparsePoly::constant(Rational::one()).sub(&square(vi)), Relation::Ge);
    }
    output_atom(f, zo, &Rational::one(), false);
    Ok(())
}

/// Shared symbolic `y`: ψ holds and `|Ψ(v_i, y)| < ε` at every candidate point.
pub fn encode_search_query(u: &UniversalCircuit, candidate: &[Vec<Rational>], eps: &Rational) -> Result<ETRFormula> {
    for p in candidate {
        check_point(u, p)?;
    }
    let mut f = ETRFormula::new();
    let aux = aux_leaves(&mut f, u, &AuxMode::Symbolic)?;
    psi_block(&mut f, u, &aux)?;
    for (i, p) in candidate.iter().enumerate() {
        let zo = encode_gates(&mut f, u, &format!("c{i}"), &Leaves::Values(p), &aux.leaves())?;
        output_atom(&mut f, zo, eps, true);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use crate::universal::build_universal;

    #[test]
    fn sizes_are_linear() {
        let u = build_universal(2, 2, 2, None).unwrap();
        let gates = u.base.gates().len();
        let a = vec![int(1); u.m_auxiliary];
        let phi = encode_phi(&u, &[int(1), int(0)], &rat(1, 2), &AuxMode::Fixed(a), false).unwrap();
        assert_eq!(phi.atoms.len(), gates + 1);
        assert_eq!(phi.vars.len(), gates);
        assert!(phi.max_degree() <= 2);
        let sym = encode_phi(&u, &[int(1), int(0)], &rat(1, 2), &AuxMode::Symbolic, false).unwrap();
        assert_eq!(sym.vars.len(), gates + u.m_auxiliary);
        let psi = encode_psi(&u, &AuxMode::Symbolic).unwrap();
        assert_eq!(psi.atoms.len(), gates + 1 + 2);
        assert_eq!(psi.vars.len(), gates + u.m_auxiliary + 2);
        psi.check_vars().unwrap();
        let q = encode_search_query(&u, &[], &rat(1, 2)).unwrap();
        assert_eq!(q, psi);
    }

    #[test]
    fn ground_formula_matches_eval() {
        let u = build_universal(1, 1, 1, None).unwrap();
        // Ψ = y0·x0; the gate values are forced, so the formula holds iff
        // the forced output satisfies the output atom.
        let a = vec![int(3)];
        let f = encode_phi(&u, &[rat(1, 2)], &int(1), &AuxMode::Fixed(a.clone()), false).unwrap();
        let vals = forced_values(&f);
        assert!(f.satisfied_by(&vals));
        let g = encode_phi(&u, &[rat(1, 4)], &int(1), &AuxMode::Fixed(a), false).unwrap();
        assert!(!g.satisfied_by(&forced_values(&g)));
    }

    /// Solves the triangular gate system of a ground formula.
    fn forced_values(f: &ETRFormula) -> Vec<Rational> {
        let mut vals = vec![Rational::zero(); f.vars.len()];
        for (i, a) in f.atoms.iter().enumerate().take(f.vars.len()) {
            // z_i − rhs = 0 with rhs using earlier unknowns only.
            vals[i] = SparsePoly::var(i).sub(&a.poly).eval(&vals);
        }
        vals
    }

    #[test]
    fn epsilon_zero_is_trivial() {
        let u = build_universal(1, 1, 1, None).unwrap();
        let f = encode_phi(&u, &[int(0)], &int(0), &AuxMode::Fixed(vec![int(0)]), false).unwrap();
        assert!(f.satisfied_by(&forced_values(&f)));
    }

    #[test]
    fn dimension_errors() {
        let u = build_universal(2, 1, 1, None).unwrap();
        assert!(matches!(
            encode_phi(&u, &[int(0)], &int(1), &AuxMode::Symbolic, false),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            encode_search_query(&u, &[vec![int(0)]], &int(1)),
            Err(Error::Dimension { .. })
        ));
    }
}
