//! Robust hitting sets: `H` is ε-robust for `f` when some `v ∈ H` has
//! `|f(v)| ≥ ε·‖f‖₂`. Everything is compared squared.
//!
//! For complex-domain sets the norm is bracketed as in [`crate::norms`]; the
//! verifier uses the upper bound `2(‖Re f‖₂² + ‖Im f‖₂²)`, so a reported
//! witness is a witness for the true norm as well.

use num_traits::{Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{tensor_t, tensor_t_eps};
use crate::error::{Error, ParseError, Result};
use crate::grid::{GridSpec, GridVariant, Seed};
use crate::norms::{complex_l2_parts, l2_norm_sq_direct, Inequality};
use crate::params::ParamBundle;
use crate::poly::{expand, n_hom, DensePoly};
use crate::scalar::{
    biguint_to_rational, factorial, format_rational, int, pow_int, rational_str, GaussianRational, Rational,
};
use crate::universal::{build_universal, random_assignment, UniversalCircuit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Searched,
    Sampled,
    Loaded,
    Realified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingSet {
    pub domain: Domain,
    #[serde(with = "rational_str")]
    pub epsilon_sq: Rational,
    pub points: Vec<Vec<GaussianRational>>,
    pub provenance: Provenance,
}

impl HittingSet {
    pub fn new(domain: Domain, epsilon_sq: Rational, points: Vec<Vec<GaussianRational>>, provenance: Provenance) -> Self {
        HittingSet { domain, epsilon_sq, points, provenance }
    }

    /// Nonempty, `ε² > 0`, consistent dimension, real points for a real domain.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::validation("hitting set is empty"));
        }
        if self.epsilon_sq <= Rational::zero() {
            return Err(Error::validation("ε² must be positive"));
        }
        let n = self.points[0].len();
        if let Some(p) = self.points.iter().find(|p| p.len() != n) {
            return Err(Error::Dimension { expected: n, got: p.len() });
        }
        if self.domain == Domain::Real && self.points.iter().flatten().any(|c| !c.is_real()) {
            return Err(Error::validation("real hitting set contains a non-real coordinate"));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hitting set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()).into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum RobustOutcome {
    Witness {
        index: usize,
        #[serde(with = "rational_str")]
        value_sq: Rational,
        #[serde(with = "rational_str")]
        threshold_sq: Rational,
    },
    NoWitness {
        #[serde(with = "rational_str")]
        best_value_sq: Rational,
        #[serde(with = "rational_str")]
        threshold_sq: Rational,
    },
    ZeroPolynomial,
}

impl RobustOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, RobustOutcome::Witness { .. })
    }

    pub fn witness_index(&self) -> Option<usize> {
        match self {
            RobustOutcome::Witness { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// `‖f‖₂²` for the domain of `H` (upper bound for the complex domain).
pub fn domain_norm_sq(f: &DensePoly, domain: Domain) -> Result<Rational> {
    match domain {
        Domain::Real => l2_norm_sq_direct(f),
        Domain::Complex => Ok(complex_l2_parts(f).upper()),
    }
}

/// First index `i` with `|f(v_i)|² ≥ ε²·‖f‖₂²`.
pub fn verify_robust(h: &HittingSet, f: &DensePoly) -> Result<RobustOutcome> {
    h.validate()?;
    if h.dim() != Some(f.n()) {
        return Err(Error::Dimension { expected: f.n(), got: h.dim().unwrap_or(0) });
    }
    if f.is_zero() {
        return Ok(RobustOutcome::ZeroPolynomial);
    }
    let threshold_sq = &h.epsilon_sq * domain_norm_sq(f, h.domain)?;
    let mut best = Rational::zero();
    for (index, p) in h.points.iter().enumerate() {
        let value_sq = f.eval(p)?.norm_sq();
        if value_sq >= threshold_sq {
            return Ok(RobustOutcome::Witness { index, value_sq, threshold_sq });
        }
        if value_sq > best {
            best = value_sq;
        }
    }
    Ok(RobustOutcome::NoWitness { best_value_sq: best, threshold_sq })
}

/// `m` points of `G_δ^ℂ` with `ε = η/4`.
pub fn sample_candidate(params: &ParamBundle, seed: Seed) -> Result<HittingSet> {
    let grid = GridSpec::new(params.n, params.delta.clone(), GridVariant::Complex)?;
    let points = grid.sample(seed, params.m_usize()?);
    let eps = &params.eta / int(4);
    Ok(HittingSet::new(Domain::Complex, &eps * &eps, points, Provenance::Sampled))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetCondition {
    pub n: usize,
    pub r: u32,
    pub n_hom: String,
    /// `100·ε²·N < (η/8)²·2^n·3^{-2r}`: the left inequality with `e^{-2r}`
    /// lowered to `3^{-2r}`.
    pub left: Inequality,
    /// `(η/8)²·2^n·2^{-2r} < 1/16`: the right inequality with `e^{-2r}`
    /// raised to `2^{-2r}`.
    pub right: Inequality,
    pub holds: bool,
}

pub fn check_robust_net_condition(eps_net: &Rational, eta: &Rational, n: usize, r: u32) -> NetCondition {
    let nh = n_hom(n, r);
    let n_rat = biguint_to_rational(&nh);
    let eta8 = eta / int(8);
    let common = &eta8 * &eta8 * pow_int(2, n as u32);
    let left = Inequality::lt(
        "net_radius",
        int(100) * eps_net * eps_net * n_rat,
        &common * pow_int(3, 2 * r).recip(),
    );
    let right = Inequality::lt("net_scale", &common * pow_int(2, 2 * r).recip(), Rational::new(1.into(), 16.into()));
    let holds = left.holds && right.holds;
    NetCondition { n, r, n_hom: nh.to_string(), left, right, holds }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterpolationConstants {
    pub r: u32,
    pub c: Vec<GaussianRational>,
}

/// `c_k = ∏_{j≠k} (ι − j)/(k − j)`, so that `g(ι) = Σ_k c_k g(k)` for `deg g ≤ r`.
pub fn interpolation_constants(r: u32) -> InterpolationConstants {
    let iota = GaussianRational::i();
    let c = (0..=r as i64)
        .map(|k| {
            let mut acc = GaussianRational::one();
            for j in (0..=r as i64).filter(|&j| j != k) {
                let num = iota.clone() - GaussianRational::from_int(j);
                acc = acc * num.scale(&Rational::new(1.into(), (k - j).into()));
            }
            acc
        })
        .collect();
    InterpolationConstants { r, c }
}

/// `{a + k·b : a + ιb ∈ H, 0 ≤ k ≤ r}` with `ε² / ((r+2)!)²`.
pub fn realify(h: &HittingSet, r: u32) -> HittingSet {
    let mut points = Vec::with_capacity(h.points.len() * (r as usize + 1));
    for p in &h.points {
        for k in 0..=r as i64 {
            let k = int(k);
            points.push(p.iter().map(|c| GaussianRational::real(&c.re + &k * &c.im)).collect());
        }
    }
    let f = biguint_to_rational(&factorial(r as u64 + 2));
    HittingSet::new(Domain::Real, &h.epsilon_sq / (&f * &f), points, Provenance::Realified)
}

/// `|f(a+ιb)|² ≤ ((r+2)!)² · max_k |f(a+kb)|²` at one point.
pub fn realification_inequality(f: &DensePoly, v: &[GaussianRational]) -> Result<Inequality> {
    let r = f.degree();
    let lhs = f.eval(v)?.norm_sq();
    let mut best = Rational::zero();
    for k in 0..=r as i64 {
        let k = int(k);
        let p: Vec<GaussianRational> = v.iter().map(|c| GaussianRational::real(&c.re + &k * &c.im)).collect();
        let val = f.eval(&p)?.norm_sq();
        if val > best {
            best = val;
        }
    }
    let fact = biguint_to_rational(&factorial(r as u64 + 2));
    Ok(Inequality::le("realification", lhs, &fact * &fact * best))
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorRow {
    #[serde(with = "rational_str")]
    pub eps: Rational,
    /// `T_ε((0,1),(0,1),(0,1))`.
    pub value_at_bad_point: GaussianRational,
    /// `‖T_ε‖₂²`.
    #[serde(with = "rational_str")]
    pub norm_sq: Rational,
    /// `|T_ε(bad)|² / ‖T_ε‖₂²`, the best robustness the bad point can offer.
    #[serde(with = "rational_str")]
    pub bad_point_ratio: Rational,
    /// `T_ε` expands to `T + ε·x1·y1·z1`.
    pub expansion_matches: bool,
    pub hit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorDemo {
    pub rows: Vec<TensorRow>,
    pub t_at_bad_point: GaussianRational,
    pub t_at_unit_point: GaussianRational,
    pub t_nonzero: bool,
    pub hitting_set: HittingSet,
    pub t_hit: bool,
    pub all_hit: bool,
}

fn tensor_point(pairs: [(i64, i64); 3]) -> Vec<GaussianRational> {
    pairs.iter().flat_map(|&(a, b)| [GaussianRational::from_int(a), GaussianRational::from_int(b)]).collect()
}

/// The border-rank example: `T_ε(pt) = ε → 0` while the limit `T` vanishes
/// at the same point, together with a finite set that robustly hits every
/// `T_ε` in the schedule and `T` itself.
pub fn tensor_limit_demo(schedule: &[Rational]) -> Result<TensorDemo> {
    let bad = tensor_point([(0, 1), (0, 1), (0, 1)]);
    let unit = tensor_point([(1, 0), (1, 0), (1, 0)]);
    let t = tensor_t();
    let t_poly = expand(&t)?.remove(0);
    let x1y1z1 = crate::poly::ExponentVector(vec![0, 1, 0, 1, 0, 1]);

    let mut polys = Vec::new();
    let mut rows = Vec::new();
    for eps in schedule {
        let c = tensor_t_eps(eps).ok_or_else(|| Error::validation("ε must be nonzero"))?;
        let p = expand(&c)?.remove(0);
        let mut expected = t_poly.clone();
        expected.add_term(x1y1z1.clone(), GaussianRational::real(eps.clone()))?;
        let norm_sq = l2_norm_sq_direct(&p)?;
        let value = c.eval_single(&bad)?;
        rows.push(TensorRow {
            eps: eps.clone(),
            bad_point_ratio: value.norm_sq() / &norm_sq,
            value_at_bad_point: value,
            norm_sq,
            expansion_matches: p == expected,
            hit: false,
        });
        polys.push(p);
    }
    polys.push(t_poly.clone());

    // ε′² is the smallest |f(unit)|²/‖f‖₂² over the family, so every member is hit.
    let mut eps_sq: Option<Rational> = None;
    for p in &polys {
        let ratio = p.eval(&unit)?.norm_sq() / l2_norm_sq_direct(p)?;
        eps_sq = Some(match eps_sq {
            Some(e) if e <= ratio => e,
            _ => ratio,
        });
    }
    let hitting_set = HittingSet::new(
        Domain::Real,
        eps_sq.expect("family contains T"),
        vec![unit.clone()],
        Provenance::Loaded,
    );
    for (row, p) in rows.iter_mut().zip(&polys) {
        row.hit = verify_robust(&hitting_set, p)?.is_witness();
    }
    let t_hit = verify_robust(&hitting_set, &t_poly)?.is_witness();
    let all_hit = t_hit && rows.iter().all(|r| r.hit);
    Ok(TensorDemo {
        rows,
        t_at_bad_point: t.eval_single(&bad)?,
        t_at_unit_point: t.eval_single(&unit)?,
        t_nonzero: !t_poly.is_zero(),
        hitting_set,
        t_hit,
        all_hit,
    })
}

impl TensorDemo {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "eps={} T_eps(bad)={} |T_eps(bad)|^2/|T_eps|_2^2={} hit={}\n",
                format_rational(&row.eps),
                row.value_at_bad_point,
                format_rational(&row.bad_point_ratio),
                row.hit
            ));
        }
        out.push_str(&format!(
            "T(bad)={} T(unit)={} T_nonzero={} eps'^2={} all_hit={}\n",
            self.t_at_bad_point,
            self.t_at_unit_point,
            self.t_nonzero,
            format_rational(&self.hitting_set.epsilon_sq),
            self.all_hit
        ));
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCurve {
    pub n: usize,
    pub s: usize,
    pub r: u32,
    pub family_size: usize,
    #[serde(with = "rational_str")]
    pub epsilon_sq: Rational,
    /// `(m, members with a witness among the first m points)`.
    pub points: Vec<(usize, usize)>,
}

/// Witness coverage of a seeded random family by growing prefixes of one
/// sampled complex candidate set.
#[allow(clippy::too_many_arguments)]
pub fn family_witness_curve(
    n: usize,
    s: usize,
    r: u32,
    family_size: usize,
    ms: &[usize],
    delta: &Rational,
    epsilon_sq: &Rational,
    seed: Seed,
) -> Result<FamilyCurve> {
    let u: UniversalCircuit = build_universal(n, s, r, None)?;
    let grid = GridSpec::new(n, delta.clone(), GridVariant::Complex)?;
    let max_m = ms.iter().copied().max().unwrap_or(0);
    let all_points = grid.sample(seed, max_m);
    let family: Vec<DensePoly> = (0..family_size)
        .into_par_iter()
        .map(|i| -> Result<DensePoly> {
            let a = random_assignment(&u, seed.wrapping_add(1 + i as u64), 4);
            Ok(expand(&u.specialize(&a)?)?.remove(0))
        })
        .collect::<Result<_>>()?;
    // First witness index per member; prefixes then count in one pass.
    let first: Vec<Option<usize>> = family
        .par_iter()
        .map(|f| -> Result<Option<usize>> {
            if f.is_zero() || max_m == 0 {
                return Ok(None);
            }
            let h = HittingSet::new(Domain::Complex, epsilon_sq.clone(), all_points.clone(), Provenance::Sampled);
            Ok(verify_robust(&h, f)?.witness_index())
        })
        .collect::<Result<_>>()?;
    let points = ms
        .iter()
        .map(|&m| (m, first.iter().filter(|w| matches!(w, Some(i) if *i < m)).count()))
        .collect();
    Ok(FamilyCurve { n, s, r, family_size, epsilon_sq: epsilon_sq.clone(), points })
}
