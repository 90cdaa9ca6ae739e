//! Dense homogeneous polynomials indexed by exponent vectors.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit::{check_homogeneous, Circuit, GateKind, Homogeneity};
use crate::error::{Error, ParseError, Result};
use crate::scalar::{binomial, GaussianRational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExponentVector(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// `C(n+r-1, r)`: number of degree-`r` monomials in `n` variables.
pub fn n_hom(n: usize, r: u32) -> BigUint {
    if n == 0 {
        return if r == 0 { BigUint::from(1u32) } else { BigUint::zero() };
    }
    binomial(n as u64 + r as u64 - 1, r as u64)
}

/// All degree-`r` exponent vectors in `n` variables, in descending
/// lexicographic order (`x1^r` first, `xn^r` last).
pub fn monomials(n: usize, r: u32) -> Vec<ExponentVector> {
    fn rec(n: usize, r: u32, prefix: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if prefix.len() + 1 == n {
            prefix.push(r);
            out.push(ExponentVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=r).rev() {
            prefix.push(e);
            rec(n, r - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if r == 0 {
            out.push(ExponentVector(vec![]));
        }
        return out;
    }
    rec(n, r, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Homogeneous polynomial of degree `r` in `n` variables; zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    n: usize,
    r: u32,
    coeffs: BTreeMap<ExponentVector, GaussianRational>,
}

impl DensePoly {
    pub fn zero(n: usize, r: u32) -> Self {
        DensePoly { n, r, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        let mut p = DensePoly::zero(n, 0);
        p.add_term(ExponentVector::zero(n), c).expect("degree 0 term");
        p
    }

    pub fn variable(n: usize, i: usize) -> Self {
        let mut p = DensePoly::zero(n, 1);
        p.add_term(ExponentVector::unit(n, i), GaussianRational::one()).expect("degree 1 term");
        p
    }

    pub fn from_terms(
        n: usize,
        r: u32,
        terms: impl IntoIterator<Item = (ExponentVector, GaussianRational)>,
    ) -> Result<Self> {
        let mut p = DensePoly::zero(n, r);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// Real polynomial from `(exponents, coefficient)` pairs.
    pub fn from_real_terms(n: usize, r: u32, terms: &[(Vec<u32>, Rational)]) -> Result<Self> {
        DensePoly::from_terms(
            n,
            r,
            terms.iter().map(|(e, c)| (ExponentVector(e.clone()), GaussianRational::real(c.clone()))),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, e: &ExponentVector) -> GaussianRational {
        self.coeffs.get(e).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Number of nonzero coefficients (`S`).
    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(GaussianRational::is_real)
    }

    pub fn add_term(&mut self, e: ExponentVector, c: GaussianRational) -> Result<()> {
        if e.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: e.len() });
        }
        if e.degree() != self.r {
            return Err(Error::validation(format!(
                "exponent vector of degree {} in a degree-{} homogeneous polynomial",
                e.degree(),
                self.r
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        let slot = self.coeffs.entry(e).or_insert_with(GaussianRational::zero);
        *slot += &c;
        if slot.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.r != other.r {
            return Err(Error::validation(format!(
                "adding homogeneous polynomials of degrees {} and {}",
                self.r, other.r
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, a: &GaussianRational) -> DensePoly {
        let mut out = DensePoly::zero(self.n, self.r);
        if a.is_zero() {
            return out;
        }
        for (e, c) in &self.coeffs {
            out.coeffs.insert(e.clone(), c * a);
        }
        out
    }

    pub fn scale_real(&self, a: &Rational) -> DensePoly {
        self.scale(&GaussianRational::real(a.clone()))
    }

    /// Naive convolution.
    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        let mut out = DensePoly::zero(self.n, self.r + other.r);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = e1.add(e2);
                let slot = out.coeffs.entry(e).or_insert_with(GaussianRational::zero);
                *slot += &(c1 * c2);
            }
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: point.len() });
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    term = &term * &x.pow(k);
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Evaluation of a real polynomial at a real point.
    pub fn eval_real(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: point.len() });
        }
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.re.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    term *= crate::scalar::pow(x, k);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn real_coeffs(&self) -> Result<BTreeMap<ExponentVector, Rational>> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        Ok(self.coeffs.iter().map(|(e, c)| (e.clone(), c.re.clone())).collect())
    }

    /// Formal partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> DensePoly {
        let mut out = DensePoly::zero(self.n, self.r.saturating_sub(1));
        for (e, c) in &self.coeffs {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[i] -= 1;
            out.coeffs.insert(d, c.scale(&Rational::from_integer(k.into())));
        }
        out
    }

    /// Split `f(a + ιb)` into real polynomials `Re f, Im f` over the `2n`
    /// real variables `(a_1..a_n, b_1..b_n)`.
    pub fn complex_parts(&self) -> (DensePoly, DensePoly) {
        let n2 = 2 * self.n;
        let mut acc = DensePoly::zero(n2, self.r);
        for (e, c) in &self.coeffs {
            // Expand ∏_j (a_j + ι b_j)^{e_j} by the binomial theorem.
            let mut term = DensePoly::constant(n2, c.clone());
            for (j, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut factor = DensePoly::zero(n2, k);
                for t in 0..=k {
                    let mut ev = vec![0u32; n2];
                    ev[j] = k - t;
                    ev[self.n + j] = t;
                    let bin = Rational::from_integer(binomial(k as u64, t as u64).into());
                    let coeff = GaussianRational::i().pow(t).scale(&bin);
                    factor.add_term(ExponentVector(ev), coeff).expect("degree k term");
                }
                term = term.mul(&factor).expect("same dimension");
            }
            acc = acc.add(&term).expect("same degree");
        }
        let mut re = DensePoly::zero(n2, self.r);
        let mut im = DensePoly::zero(n2, self.r);
        for (e, c) in acc.coeffs {
            if !c.re.is_zero() {
                re.coeffs.insert(e.clone(), GaussianRational::real(c.re));
            }
            if !c.im.is_zero() {
                im.coeffs.insert(e, GaussianRational::real(c.im));
            }
        }
        (re, im)
    }

    pub fn to_file(&self) -> PolyFile {
        PolyFile {
            n: self.n,
            r: self.r,
            terms: self
                .coeffs
                .iter()
                .map(|(e, c)| TermRecord { exp: e.0.clone(), coeff: c.clone() })
                .collect(),
        }
    }

    pub fn from_file(file: &PolyFile) -> Result<Self> {
        DensePoly::from_terms(
            file.n,
            file.r,
            file.terms.iter().map(|t| (ExponentVector(t.exp.clone()), t.coeff.clone())),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("polynomial serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolyFile =
            serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()))?;
        DensePoly::from_file(&file)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyFile {
    pub n: usize,
    pub r: u32,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermRecord {
    pub exp: Vec<u32>,
    pub coeff: GaussianRational,
}

/// Default cap on the monomial count `N^hom` of any gate during expansion.
pub const DEFAULT_EXPAND_BUDGET: u64 = 200_000;

/// Bottom-up expansion of every output of a homogeneous circuit.
pub fn expand(c: &Circuit) -> Result<Vec<DensePoly>> {
    expand_with_budget(c, DEFAULT_EXPAND_BUDGET)
}

pub fn expand_with_budget(c: &Circuit, max_monomials: u64) -> Result<Vec<DensePoly>> {
    if let Homogeneity::MixedAt(g) = check_homogeneous(c) {
        return Err(Error::validation(format!("cannot expand: gate {g} mixes degrees")));
    }
    let n = c.n_vars();
    for g in c.gates() {
        let count = n_hom(n, g.degree);
        if count.to_u64().is_none_or(|k| k > max_monomials) {
            return Err(Error::Budget(format!(
                "gate {} needs N^hom({n}, {}) = {count} coefficients (budget {max_monomials})",
                g.id, g.degree
            )));
        }
    }
    let mut polys: Vec<DensePoly> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let p = match &g.kind {
            GateKind::Input(i) => DensePoly::variable(n, *i),
            GateKind::Const(k) => DensePoly::constant(n, k.clone()),
            GateKind::Add(l, r) => {
                let mut s = polys[*l].add(&polys[*r])?;
                s.r = g.degree;
                s
            }
            GateKind::Mul(l, r) => polys[*l].mul(&polys[*r])?,
        };
        polys.push(p);
    }
    Ok(c.outputs().iter().map(|&o| polys[o].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{tensor_t, tensor_t_eps, CircuitBuilder};
    use crate::scalar::{int, rat};

    fn ev(e: &[u32]) -> ExponentVector {
        ExponentVector(e.to_vec())
    }

    #[test]
    fn n_hom_values() {
        assert_eq!(n_hom(3, 2), BigUint::from(6u32));
        assert_eq!(n_hom(1, 7), BigUint::from(1u32));
        assert_eq!(n_hom(2, 3), BigUint::from(4u32));
        for (n, r) in [(3usize, 2u32), (2, 4), (4, 3)] {
            assert_eq!(BigUint::from(monomials(n, r).len()), n_hom(n, r));
        }
    }

    #[test]
    fn monomial_order_is_descending_lex() {
        let m = monomials(2, 2);
        assert_eq!(m, vec![ev(&[2, 0]), ev(&[1, 1]), ev(&[0, 2])]);
    }

    #[test]
    fn expand_tensor() {
        let t = &expand(&tensor_t()).unwrap()[0];
        // x0 x1 y0 y1 z0 z1
        let expected = DensePoly::from_real_terms(
            6,
            3,
            &[
                (vec![1, 0, 1, 0, 1, 0], int(1)),
                (vec![0, 1, 1, 0, 0, 1], int(1)),
                (vec![1, 0, 0, 1, 0, 1], int(1)),
            ],
        )
        .unwrap();
        assert_eq!(t, &expected);

        let te = &expand(&tensor_t_eps(&rat(1, 3)).unwrap()).unwrap()[0];
        let mut with_eps = expected.clone();
        with_eps
            .add_term(ev(&[0, 1, 0, 1, 0, 1]), GaussianRational::real(rat(1, 3)))
            .unwrap();
        assert_eq!(te, &with_eps);
    }

    #[test]
    fn expand_input() {
        let c = CircuitBuilder::new(1);
        let mut c = c;
        let x = c.input(0);
        let c = c.finish(vec![x], true).unwrap();
        assert_eq!(expand(&c).unwrap()[0], DensePoly::variable(1, 0));
    }

    #[test]
    fn expand_budget() {
        let mut b = CircuitBuilder::new(30);
        let mut acc = b.input(0);
        for i in 1..30 {
            let x = b.input(i);
            acc = b.mul(acc, x);
        }
        let c = b.finish(vec![acc], true).unwrap();
        assert!(matches!(expand(&c), Err(Error::Budget(_))));
    }

    #[test]
    fn degree_violations() {
        let mut p = DensePoly::zero(2, 2);
        assert!(p.add_term(ev(&[1, 0]), GaussianRational::one()).is_err());
        assert!(p.add_term(ev(&[1, 1, 0]), GaussianRational::one()).is_err());
        p.add_term(ev(&[1, 1]), GaussianRational::one()).unwrap();
        p.add_term(ev(&[1, 1]), GaussianRational::from_int(-1)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn complex_parts_of_square() {
        // (a + ιb)^2 = a^2 - b^2 + 2ιab
        let mut f = DensePoly::zero(1, 2);
        f.add_term(ev(&[2]), GaussianRational::one()).unwrap();
        let (re, im) = f.complex_parts();
        assert_eq!(
            re,
            DensePoly::from_real_terms(2, 2, &[(vec![2, 0], int(1)), (vec![0, 2], int(-1))]).unwrap()
        );
        assert_eq!(im, DensePoly::from_real_terms(2, 2, &[(vec![1, 1], int(2))]).unwrap());
    }

    #[test]
    fn partial_derivative() {
        let f = DensePoly::from_real_terms(2, 3, &[(vec![2, 1], int(3))]).unwrap();
        let dx = f.partial(0);
        assert_eq!(dx, DensePoly::from_real_terms(2, 2, &[(vec![1, 1], int(6))]).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let f = DensePoly::from_terms(
            2,
            1,
            [(ev(&[1, 0]), "1/2-1 i".parse().unwrap()), (ev(&[0, 1]), "3".parse().unwrap())],
        )
        .unwrap();
        assert_eq!(DensePoly::from_json(&f.to_json()).unwrap(), f);
    }
}
