//! L2 / L∞ norm machinery for real homogeneous polynomials.
//!
//! `‖f‖₂` is taken against the uniform probability measure on `[-1,1]^n`,
//! so `E[x^k] = 1/(k+1)` for even `k` and `0` otherwise, and the
//! 1-D Legendre polynomials satisfy `E[L_k²] = 1/(2k+1)`.
//!
//! Every comparison is made on squares so that no square root is ever
//! materialized; irrational constants are replaced by rational bounds in the
//! direction that keeps the checked statement implied by the original.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GridVariant};
use crate::poly::{DensePoly, ExponentVector};
use crate::scalar::{binomial, int, pow, pow_int, rat, rational_str, GaussianRational, Rational};

/// `E[x^e]` under the uniform probability measure on `[-1,1]^n`.
pub fn integrate_monomial(e: &ExponentVector) -> Rational {
    let mut acc = Rational::one();
    for &k in &e.0 {
        if k % 2 == 1 {
            return Rational::zero();
        }
        acc /= int(k as i64 + 1);
    }
    acc
}

/// `‖f‖₂²` by squaring `f` and integrating monomial by monomial.
pub fn l2_norm_sq_direct(f: &DensePoly) -> Result<Rational> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let sq = f.mul(f)?;
    Ok(sq.terms().map(|(e, c)| &c.re * integrate_monomial(e)).sum())
}

/// `(‖Re f‖₂², ‖Im f‖₂²)` for a complex polynomial viewed on `ℝ^{2n}`.
///
/// The complex norm is `‖f‖₂ = ‖Re f‖₂ + ‖Im f‖₂`; squares of that sum are
/// bracketed by [`ComplexNormSq::lower`] and [`ComplexNormSq::upper`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexNormSq {
    #[serde(with = "rational_str")]
    pub re_sq: Rational,
    #[serde(with = "rational_str")]
    pub im_sq: Rational,
}

impl ComplexNormSq {
    /// `a² + b² ≤ (a+b)²`.
    pub fn lower(&self) -> Rational {
        &self.re_sq + &self.im_sq
    }

    /// `(a+b)² ≤ 2(a² + b²)`.
    pub fn upper(&self) -> Rational {
        int(2) * (&self.re_sq + &self.im_sq)
    }
}

pub fn complex_l2_parts(f: &DensePoly) -> ComplexNormSq {
    let (re, im) = f.complex_parts();
    ComplexNormSq {
        re_sq: l2_norm_sq_direct(&re).expect("real part is real"),
        im_sq: l2_norm_sq_direct(&im).expect("imaginary part is real"),
    }
}

/// Coefficients of the 1-D Legendre polynomial `L_k`, ascending powers.
///
/// Bonnet recursion `(k+1) L_{k+1} = (2k+1) x L_k − k L_{k−1}`; the leading
/// coefficient is `C(2k,k) / 2^k`.
pub fn legendre_poly(k: u32) -> Vec<Rational> {
    let mut prev = vec![Rational::one()];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![Rational::zero(), Rational::one()];
    for j in 1..k {
        let j = j as i64;
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += c * rat(2 * j + 1, j + 1);
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] -= c * rat(j, j + 1);
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `x^k = Σ_j a_j L_j(x)`; returns `a_0..a_k`.
pub fn monomial_in_legendre(k: u32) -> Vec<Rational> {
    // Peel off the top Legendre term repeatedly.
    let mut rest = vec![Rational::zero(); k as usize + 1];
    rest[k as usize] = Rational::one();
    let mut out = vec![Rational::zero(); k as usize + 1];
    for j in (0..=k).rev() {
        let lj = legendre_poly(j);
        let coef = &rest[j as usize] / &lj[j as usize];
        if coef.is_zero() {
            continue;
        }
        for (p, c) in lj.iter().enumerate() {
            rest[p] -= &coef * c;
        }
        out[j as usize] = coef;
    }
    out
}

/// A real polynomial written in the tensor Legendre basis `L_ē = ∏ L_{e_i}(x_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreExpansion {
    pub n: usize,
    pub r: u32,
    pub coeffs: BTreeMap<ExponentVector, Rational>,
}

impl LegendreExpansion {
    pub fn get(&self, e: &ExponentVector) -> Rational {
        self.coeffs.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Orthogonality route to `‖f‖₂²`: `Σ ℓ_ē² · ∏ 1/(2e_i+1)`.
    pub fn l2_norm_sq(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|(e, l)| {
                let w: Rational =
                    e.0.iter().map(|&k| rat(1, 2 * k as i64 + 1)).product();
                l * l * w
            })
            .sum()
    }
}

pub fn monomial_to_legendre(f: &DensePoly) -> Result<LegendreExpansion> {
    let real = f.real_coeffs()?;
    let max_e = real.keys().flat_map(|e| e.0.iter().copied()).max().unwrap_or(0);
    let tables: Vec<Vec<Rational>> = (0..=max_e).map(monomial_in_legendre).collect();
    let mut coeffs: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
    for (e, c) in &real {
        // Tensor product of the 1-D expansions of each x_i^{e_i}.
        let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), c.clone())];
        for &k in &e.0 {
            let table = &tables[k as usize];
            let mut next = Vec::new();
            for (prefix, w) in &partial {
                for (j, a) in table.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut p = prefix.clone();
                    p.push(j as u32);
                    next.push((p, w * a));
                }
            }
            partial = next;
        }
        for (idx, w) in partial {
            *coeffs.entry(ExponentVector(idx)).or_insert_with(Rational::zero) += w;
        }
    }
    coeffs.retain(|_, v| !v.is_zero());
    Ok(LegendreExpansion { n: f.n(), r: f.degree(), coeffs })
}

/// Top-degree Legendre coefficient predicted from the monomial coefficient:
/// `c_ē · ∏ 2^{e_i} / C(2e_i, e_i)`.
pub fn top_degree_legendre_coeff(c: &Rational, e: &ExponentVector) -> Rational {
    let mut acc = c.clone();
    for &k in &e.0 {
        acc *= pow_int(2, k);
        acc /= Rational::from_integer(BigInt::from(binomial(2 * k as u64, k as u64)));
    }
    acc
}

/// Default cap on grid points enumerated by [`linf_grid_lower_bound`].
pub const DEFAULT_GRID_BUDGET: u64 = 2_000_000;

/// `max_{v ∈ G_δ} |f(v)|²`, an exact lower bound on `‖f‖_∞²`.
pub fn linf_grid_lower_bound(f: &DensePoly, delta: &Rational) -> Result<Rational> {
    linf_grid_lower_bound_with_budget(f, delta, DEFAULT_GRID_BUDGET)
}

pub fn linf_grid_lower_bound_with_budget(
    f: &DensePoly,
    delta: &Rational,
    max_points: u64,
) -> Result<Rational> {
    if f.is_zero() {
        return Ok(Rational::zero());
    }
    let grid = GridSpec::new(f.n(), delta.clone(), GridVariant::Real)?;
    let size = grid.size_u64().filter(|&s| s <= max_points).ok_or_else(|| {
        Error::Budget(format!("grid of {} points exceeds budget {max_points}", grid.size()))
    })?;
    // Max is order independent, so the parallel reduction is deterministic.
    let best = (0..size)
        .into_par_iter()
        .map(|i| {
            let p = grid.point_u64(i);
            f.eval(&p).expect("grid dimension matches").norm_sq()
        })
        .reduce(Rational::zero, |a, b| if a >= b { a } else { b });
    Ok(best)
}

/// `Σ |c_ē|²` over the coefficient vector.
pub fn coeff_vector_norm_sq(f: &DensePoly) -> Rational {
    f.terms().map(|(_, c)| c.norm_sq()).sum()
}

/// `Σ |c_ē|`, an upper bound on `‖f‖_∞` (real coefficients only).
pub fn coeff_l1(f: &DensePoly) -> Result<Rational> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    Ok(f.terms().map(|(_, c)| c.re.abs()).sum())
}

pub fn max_coeff_sq(f: &DensePoly) -> Rational {
    f.terms().map(|(_, c)| c.norm_sq()).max().unwrap_or_else(Rational::zero)
}

pub fn gradient(f: &DensePoly, v: &[Rational]) -> Result<Vec<Rational>> {
    if v.len() != f.n() {
        return Err(Error::Dimension { expected: f.n(), got: v.len() });
    }
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    (0..f.n()).map(|i| f.partial(i).eval_real(v)).collect()
}

/// One checked inequality `lhs ≤ rhs` (or `lhs < rhs` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub name: String,
    #[serde(with = "rational_str")]
    pub lhs: Rational,
    #[serde(with = "rational_str")]
    pub rhs: Rational,
    pub strict: bool,
    pub holds: bool,
}

impl Inequality {
    pub fn le(name: &str, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs <= rhs;
        Inequality { name: name.to_string(), lhs, rhs, strict: false, holds }
    }

    pub fn lt(name: &str, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs < rhs;
        Inequality { name: name.to_string(), lhs, rhs, strict: true, holds }
    }

    pub fn margin(&self) -> Rational {
        &self.rhs - &self.lhs
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub n: usize,
    pub r: u32,
    #[serde(with = "rational_str")]
    pub l2_sq: Rational,
    #[serde(with = "rational_str")]
    pub grid_linf_sq_lower: Rational,
    #[serde(with = "rational_str")]
    pub coeff_l1: Rational,
    #[serde(with = "rational_str")]
    pub coeff_norm_sq: Rational,
    pub num_terms: usize,
    /// Inequalities that must hold; any failure is a violation.
    pub checked: Vec<Inequality>,
    /// Alternative readings reported for comparison only.
    pub informational: Vec<Inequality>,
}

impl NormReport {
    pub fn violations(&self) -> Vec<&Inequality> {
        self.checked.iter().filter(|i| !i.holds).collect()
    }

    pub fn all_hold(&self) -> bool {
        self.checked.iter().all(|i| i.holds)
    }
}

/// `Vol(n, ρ)` lower bound `(ρ/n)^n`: the ball contains a cube of side `2ρ/√n`.
pub fn ball_volume_lower(n: usize, rho: &Rational) -> Rational {
    pow(&(rho / int(n as i64)), n as u32)
}

/// Constant of the L∞→L2 comparison with the rational volume bound:
/// `2^{-(2n+2)} · (1/(4r²n))^n`.
pub fn infty_to_two_constant(n: usize, r: u32) -> Rational {
    let r = r.max(1) as i64;
    let rho = rat(1, 4 * r * r);
    ball_volume_lower(n, &rho) / pow_int(2, 2 * n as u32 + 2)
}

/// The norm-comparison chain for a real homogeneous `f`.
///
/// Checked (squared, exact):
/// * `grid_lb · K² ≤ ‖f‖₂²` with `K = 2^{-(2n+2)}(1/(4r²n))^n`;
/// * `‖f‖₂² ≤ (Σ|c|)²` and `(Σ|c|)² ≤ S·‖f⃗‖²`;
/// * `grid_lb ≤ (Σ|c|)²`;
/// * `α²·2^n·3^{-2r} ≤ 2^n·‖f‖₂²`, the coefficient lower bound with
///   `e^{-r} ↦ 3^{-r}` and the norm taken against Lebesgue measure on the
///   cube (the measure whose Legendre normalization is `2/(2k+1)`).
///
/// Reported only: the same coefficient bound against the probability-measure
/// norm, `α²·2^n·3^{-2r} ≤ ‖f‖₂²`, which is false e.g. for `f = x_1`, `n ≥ 2`.
pub fn check_norm_inequalities(f: &DensePoly, delta: &Rational) -> Result<NormReport> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let (n, r) = (f.n(), f.degree());
    let l2_sq = l2_norm_sq_direct(f)?;
    let grid_lb = linf_grid_lower_bound(f, delta)?;
    let l1 = coeff_l1(f)?;
    let l1_sq = &l1 * &l1;
    let cn = coeff_vector_norm_sq(f);
    let s = f.num_terms();
    let k = infty_to_two_constant(n, r);
    let alpha_sq = max_coeff_sq(f);
    let two_n = pow_int(2, n as u32);
    let coeff_bound = &alpha_sq * &two_n * pow_int(3, 2 * r).recip();

    let checked = vec![
        Inequality::le("infty_to_two", &grid_lb * &k * &k, l2_sq.clone()),
        Inequality::le("two_le_coeff_l1", l2_sq.clone(), l1_sq.clone()),
        Inequality::le("coeff_l1_le_sqrt_s", l1_sq.clone(), int(s as i64) * &cn),
        Inequality::le("grid_le_coeff_l1", grid_lb.clone(), l1_sq.clone()),
        Inequality::le("coeff_lower_bound", coeff_bound.clone(), &two_n * &l2_sq),
    ];
    let informational = vec![Inequality::le(
        "coeff_lower_bound_probability_measure",
        coeff_bound,
        l2_sq.clone(),
    )];
    Ok(NormReport {
        n,
        r,
        l2_sq,
        grid_linf_sq_lower: grid_lb,
        coeff_l1: l1,
        coeff_norm_sq: cn,
        num_terms: s,
        checked,
        informational,
    })
}

/// Gradient bound at `v` with `‖v‖² ≤ 1`:
/// `‖∇f(v)‖² ≤ 4r⁴ · S · ‖f⃗‖²` (Markov chained with `‖f‖_∞ ≤ √S‖f⃗‖`).
pub fn check_markov_at(f: &DensePoly, v: &[Rational]) -> Result<Inequality> {
    let norm_v: Rational = v.iter().map(|x| x * x).sum();
    if norm_v > Rational::one() {
        return Err(Error::Range("Markov check needs ‖v‖ ≤ 1".into()));
    }
    let g = gradient(f, v)?;
    let lhs: Rational = g.iter().map(|x| x * x).sum();
    let r = f.degree() as i64;
    let rhs = int(4 * r * r * r * r) * int(f.num_terms() as i64) * coeff_vector_norm_sq(f);
    Ok(Inequality::le("markov_gradient", lhs, rhs))
}

/// Pointwise `|f(v)|² ≤ S·‖f⃗‖²` for `v` in the cube.
pub fn check_pointwise_at(f: &DensePoly, v: &[GaussianRational]) -> Result<Inequality> {
    let lhs = f.eval(v)?.norm_sq();
    let rhs = int(f.num_terms() as i64) * coeff_vector_norm_sq(f);
    Ok(Inequality::le("pointwise_le_sqrt_s", lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, r: u32, terms: &[(Vec<u32>, Rational)]) -> DensePoly {
        DensePoly::from_real_terms(n, r, terms).unwrap()
    }

    #[test]
    fn l2_direct_examples() {
        assert_eq!(l2_norm_sq_direct(&real(1, 1, &[(vec![1], int(1))])).unwrap(), rat(1, 3));
        assert_eq!(l2_norm_sq_direct(&real(1, 0, &[(vec![0], int(1))])).unwrap(), int(1));
        assert_eq!(l2_norm_sq_direct(&real(2, 2, &[(vec![1, 1], int(1))])).unwrap(), rat(1, 9));
    }

    #[test]
    fn legendre_polys() {
        assert_eq!(legendre_poly(2), vec![rat(-1, 2), int(0), rat(3, 2)]);
        assert_eq!(legendre_poly(3), vec![int(0), rat(-3, 2), int(0), rat(5, 2)]);
        for k in 0..8u32 {
            let lead = legendre_poly(k)[k as usize].clone();
            let expect = Rational::from_integer(BigInt::from(binomial(2 * k as u64, k as u64)))
                / pow_int(2, k);
            assert_eq!(lead, expect);
        }
    }

    #[test]
    fn monomial_to_legendre_examples() {
        let l = monomial_to_legendre(&real(1, 2, &[(vec![2], int(1))])).unwrap();
        assert_eq!(l.get(&ExponentVector(vec![2])), rat(2, 3));
        assert_eq!(l.get(&ExponentVector(vec![0])), rat(1, 3));
        assert_eq!(l.get(&ExponentVector(vec![1])), int(0));
        let l = monomial_to_legendre(&real(1, 1, &[(vec![1], int(1))])).unwrap();
        assert_eq!(l.coeffs.len(), 1);
        assert_eq!(l.get(&ExponentVector(vec![1])), int(1));
    }

    #[test]
    fn grid_lower_bound_examples() {
        let x = real(1, 1, &[(vec![1], int(1))]);
        assert_eq!(linf_grid_lower_bound(&x, &rat(1, 2)).unwrap(), int(1));
        assert_eq!(linf_grid_lower_bound(&DensePoly::zero(2, 3), &rat(1, 2)).unwrap(), int(0));
        let xy = real(2, 2, &[(vec![1, 1], int(1))]);
        assert_eq!(linf_grid_lower_bound(&xy, &int(1)).unwrap(), int(1));
        assert!(matches!(
            linf_grid_lower_bound_with_budget(&xy, &rat(1, 1000), 10),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn coeff_norms() {
        assert_eq!(coeff_vector_norm_sq(&DensePoly::zero(3, 2)), int(0));
        let f = real(2, 1, &[(vec![1, 0], rat(1, 2)), (vec![0, 1], rat(1, 3))]);
        assert_eq!(coeff_vector_norm_sq(&f), rat(13, 36));
    }

    #[test]
    fn gradient_examples() {
        let f = real(1, 2, &[(vec![2], int(1))]);
        assert_eq!(gradient(&f, &[rat(1, 2)]).unwrap(), vec![int(1)]);
        let f = real(2, 2, &[(vec![1, 1], int(1))]);
        assert_eq!(gradient(&f, &[int(0), int(0)]).unwrap(), vec![int(0), int(0)]);
        let f = real(2, 2, &[(vec![2, 0], int(1)), (vec![0, 2], int(1))]);
        assert_eq!(gradient(&f, &[int(1), int(1)]).unwrap(), vec![int(2), int(2)]);
        assert!(matches!(gradient(&f, &[int(1)]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn inequality_examples() {
        let x = real(1, 1, &[(vec![1], int(1))]);
        let rep = check_norm_inequalities(&x, &rat(1, 2)).unwrap();
        assert!(rep.all_hold());
        let coeff = rep.informational.iter().find(|i| i.name.starts_with("coeff_lower")).unwrap();
        assert_eq!(coeff.lhs, rat(2, 9));
        assert_eq!(coeff.rhs, rat(1, 3));

        let zero = check_norm_inequalities(&DensePoly::zero(2, 2), &rat(1, 2)).unwrap();
        assert!(zero.all_hold());

        let xy = real(2, 2, &[(vec![1, 1], int(1))]);
        let rep = check_norm_inequalities(&xy, &rat(1, 2)).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.l2_sq, rat(1, 9));
        assert_eq!(int(rep.num_terms as i64) * &rep.coeff_norm_sq, int(1));
    }

    #[test]
    fn probability_measure_coefficient_bound_fails_for_x1_in_two_vars() {
        let x1 = real(2, 1, &[(vec![1, 0], int(1))]);
        let rep = check_norm_inequalities(&x1, &rat(1, 2)).unwrap();
        assert!(rep.all_hold());
        assert!(!rep.informational[0].holds);
    }

    #[test]
    fn complex_norm_of_x() {
        let x = DensePoly::variable(1, 0);
        let parts = complex_l2_parts(&x);
        assert_eq!(parts.re_sq, rat(1, 3));
        assert_eq!(parts.im_sq, rat(1, 3));
        assert_eq!(parts.upper(), rat(4, 3));
    }
}
