//! Extraction of a nonzero homogeneous polynomial vanishing on a point set.
//!
//! The evaluation matrix of `H` against the degree-`d′` monomials (columns in
//! descending lexicographic order) is brought to reduced row-echelon form by
//! fraction-free Gauss–Jordan elimination over the integers. The returned
//! polynomial is the nullspace vector obtained by setting the first free
//! column to 1 and every other free column to 0, divided by its leading
//! coefficient so the first nonzero coefficient is 1.
//!
//! The hardness query asks a decision procedure whether some assignment `a`
//! with `ψ(a, 1)` true makes `Ψ(x, a)` a nonzero multiple of `f`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::GateKind;
use crate::error::{Error, Result};
use crate::etr::{encode_psi, AuxMode, ETRFormula, Relation, SparsePoly};
use crate::poly::{monomials, n_hom, DensePoly, ExponentVector};
use crate::robust::HittingSet;
use crate::scalar::{pow, Rational};
use crate::universal::UniversalCircuit;

/// Smallest `d′ ≥ 1` with `N^hom(n, d′) > |H|`.
pub fn choose_degree(h_size: usize, n: usize) -> Result<u32> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    if n == 1 {
        return if h_size == 0 {
            Ok(1)
        } else {
            Err(Error::Infeasible("a single variable has one monomial per degree".into()))
        };
    }
    let target = num_bigint::BigUint::from(h_size);
    let mut d = 1u32;
    while n_hom(n, d) <= target {
        d += 1;
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearSystem {
    pub monomials: Vec<ExponentVector>,
    pub matrix: Vec<Vec<Rational>>,
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// One basis vector per free column, in column order.
    #[serde(skip)]
    pub nullspace: Vec<Vec<Rational>>,
}

fn eval_monomial(e: &ExponentVector, v: &[Rational]) -> Rational {
    e.0.iter().zip(v).map(|(&k, x)| pow(x, k)).product()
}

/// Integer row with the same nullspace as a rational row.
fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect()
}

fn reduce_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Reduced echelon form by integer cross-multiplication; returns pivot columns.
fn gauss_jordan(rows: &mut Vec<Vec<BigInt>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        let pv = pivot_row[c].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pv - &f * y;
            }
            reduce_content(row);
        }
        reduce_content(&mut rows[rank]);
        pivots.push(c);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub fn build_system(points: &[Vec<Rational>], n: usize, d: u32) -> Result<LinearSystem> {
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::Dimension { expected: n, got: p.len() });
    }
    let monos = monomials(n, d);
    let matrix: Vec<Vec<Rational>> =
        points.par_iter().map(|v| monos.iter().map(|e| eval_monomial(e, v)).collect()).collect();
    let mut rows: Vec<Vec<BigInt>> = matrix.iter().map(|r| clear_denominators(r)).collect();
    let cols = monos.len();
    let pivots = gauss_jordan(&mut rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&j| {
            let mut x = vec![Rational::zero(); cols];
            x[j] = Rational::one();
            for (row, &pc) in rows.iter().zip(&pivots) {
                x[pc] = -Rational::new(row[j].clone(), row[pc].clone());
            }
            x
        })
        .collect();
    Ok(LinearSystem { monomials: monos, matrix, rank: pivots.len(), pivots, nullspace })
}

#[derive(Clone, Debug)]
pub struct HardPoly {
    pub degree: u32,
    pub poly: DensePoly,
    pub rank: usize,
    pub nullity: usize,
}

fn real_points(h: &HittingSet) -> Result<Vec<Vec<Rational>>> {
    h.points
        .iter()
        .map(|p| p.iter().map(|c| if c.is_real() { Ok(c.re.clone()) } else { Err(Error::NotReal) }).collect())
        .collect()
}

/// Nonzero homogeneous degree-`d′` polynomial vanishing on `points`.
pub fn extract_from_points(points: &[Vec<Rational>], n: usize, degree: Option<u32>) -> Result<HardPoly> {
    let d = match degree {
        Some(d) => d,
        // In one variable only the origin is a common zero of x^d.
        None if n == 1 && points.iter().all(|p| p.iter().all(Zero::is_zero)) => 1,
        None => choose_degree(points.len(), n)?,
    };
    let sys = build_system(points, n, d)?;
    let v = sys
        .nullspace
        .first()
        .ok_or_else(|| Error::Infeasible(format!("evaluation matrix has full column rank {}", sys.rank)))?;
    let lead = v.iter().find(|c| !c.is_zero()).expect("basis vector has a unit entry").clone();
    let terms: Vec<(Vec<u32>, Rational)> =
        sys.monomials.iter().zip(v).map(|(e, c)| (e.0.clone(), c / &lead)).collect();
    let poly = DensePoly::from_real_terms(n, d, &terms)?;
    assert!(!poly.is_zero(), "nullspace vector is nonzero");
    Ok(HardPoly { degree: d, poly, rank: sys.rank, nullity: sys.nullspace.len() })
}

pub fn extract_hard_poly(h: &HittingSet, degree: Option<u32>) -> Result<HardPoly> {
    let points = real_points(h)?;
    let n = h.dim().ok_or_else(|| Error::validation("cannot infer dimension of an empty set"))?;
    extract_from_points(&points, n, degree)
}

/// Default cap on intermediate terms in the symbolic expansion.
pub const DEFAULT_SYMBOLIC_BUDGET: usize = 100_000;

/// `Ψ(x, y)` as a map from `x`-exponents to polynomials in the `y` unknowns.
pub fn symbolic_expand(u: &UniversalCircuit, y: &[usize], budget: usize) -> Result<BTreeMap<Vec<u32>, SparsePoly>> {
    let n = u.n_essential;
    let mut vals: Vec<BTreeMap<Vec<u32>, SparsePoly>> = Vec::with_capacity(u.base.gates().len());
    let mut used = 0usize;
    for g in u.base.gates() {
        let mut out = BTreeMap::new();
        match &g.kind {
            GateKind::Input(v) if *v < n => {
                let mut e = vec![0; n];
                e[*v] = 1;
                out.insert(e, SparsePoly::constant(Rational::one()));
            }
            GateKind::Input(v) => {
                out.insert(vec![0; n], SparsePoly::var(y[v - n]));
            }
            GateKind::Const(c) => {
                if !c.is_real() {
                    return Err(Error::NotReal);
                }
                out.insert(vec![0; n], SparsePoly::constant(c.re.clone()));
            }
            GateKind::Add(l, r) => {
                out = vals[*l].clone();
                for (e, p) in &vals[*r] {
                    let slot = out.entry(e.clone()).or_insert_with(SparsePoly::zero);
                    *slot = slot.add(p);
                }
            }
            GateKind::Mul(l, r) => {
                for (ea, pa) in &vals[*l] {
                    for (eb, pb) in &vals[*r] {
                        let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                        let slot = out.entry(e).or_insert_with(SparsePoly::zero);
                        *slot = slot.add(&pa.mul(pb));
                    }
                }
            }
        }
        out.retain(|_, p| !p.is_zero());
        used += out.values().map(|p| p.terms().count()).sum::<usize>();
        if used > budget {
            return Err(Error::Budget(format!("symbolic expansion exceeds {budget} terms")));
        }
        vals.push(out);
    }
    Ok(vals.swap_remove(u.base.outputs()[0]))
}

/// `ψ(a, 1) ∧ Ψ(x, a) = t·f ∧ t² > 0` over unknowns `a`, `t` and the ψ block.
pub fn encode_hardness_query(u: &UniversalCircuit, f: &DensePoly, budget: usize) -> Result<ETRFormula> {
    if f.n() != u.n_essential {
        return Err(Error::Dimension { expected: u.n_essential, got: f.n() });
    }
    let fc = f.real_coeffs()?;
    let mut phi = encode_psi(u, &AuxMode::Symbolic)?;
    let y: Vec<usize> = (0..u.m_auxiliary)
        .map(|j| phi.index_of(&format!("y_{j}")).expect("symbolic auxiliary declared"))
        .collect();
    let psi_coeffs = symbolic_expand(u, &y, budget)?;
    let t = phi.var("t");
    let mut keys: Vec<Vec<u32>> = psi_coeffs.keys().cloned().collect();
    keys.extend(fc.keys().map(|e| e.0.clone()));
    keys.sort();
    keys.dedup();
    for e in keys {
        let lhs = psi_coeffs.get(&e).cloned().unwrap_or_default();
        let c = fc.get(&ExponentVector(e)).cloned().unwrap_or_else(Rational::zero);
        phi.assert(lhs.sub(&SparsePoly::var(t).scale(&c)), Relation::Eq);
    }
    phi.assert(SparsePoly::var(t).mul(&SparsePoly::var(t)), Relation::Gt);
    Ok(phi)
}
