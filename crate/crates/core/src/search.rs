//! Toy-scale search for a real robust hitting set.
//!
//! Candidates are ordered `m`-tuples over the realified grid `G_{δ,r}`
//! (lexicographic over the product, first tuple entry most significant) or
//! seeded samples. For each candidate the driver asks whether some
//! assignment `a` makes `Ψ(·, a)` reach 1 on the box while staying below `ε`
//! at every candidate point. The first candidate whose query is `unsat` is
//! returned. `unknown` and `timeout` verdicts are skipped and taint the
//! certificate.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, ParseError, Result};
use crate::etr::{encode_search_query, solve_script, to_smtlib, SolverConfig, SolverStatus};
use crate::grid::{GridSpec, GridVariant, Seed};
use crate::norms::linf_grid_lower_bound;
use crate::params::ParamBundle;
use crate::poly::{expand, DensePoly};
use crate::robust::{verify_robust, Domain, HittingSet, Provenance, RobustOutcome};
use crate::scalar::{rat, rational_str, sqrt_lower, GaussianRational, Rational};
use crate::universal::{build_universal, random_assignment, scale_embedding, UniversalCircuit};

/// Default cap on the estimated number of atoms issued across all queries.
pub const DEFAULT_COST_CAP: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SearchMode {
    Lexicographic,
    Randomized { seed: Seed },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub params: ParamBundle,
    pub mode: SearchMode,
    pub max_candidates: usize,
    pub solver: SolverConfig,
    pub cost_cap: BigUint,
    /// Candidates solved concurrently; acceptance is still committed in order.
    pub lookahead: usize,
}

impl SearchConfig {
    pub fn new(params: ParamBundle, mode: SearchMode, max_candidates: usize, solver: SolverConfig) -> Self {
        SearchConfig { params, mode, max_candidates, solver, cost_cap: BigUint::from(DEFAULT_COST_CAP), lookahead: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub index: usize,
    /// SHA-256 of the SMT-LIB script, hex encoded.
    pub hash: String,
    pub status: SolverStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub params: ParamBundle,
    pub mode: SearchMode,
    pub max_candidates: usize,
    pub solver_path: String,
    pub solver_identity: String,
    pub timeout_secs: u64,
    #[serde(with = "rational_str")]
    pub epsilon: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub hitting_set: HittingSet,
    pub queries: Vec<QueryRecord>,
    pub accepted_at: usize,
    /// Some query before acceptance was `unknown` or `timeout` and was skipped.
    pub tainted: bool,
    pub skipped: Vec<usize>,
    pub config: ConfigSnapshot,
}

impl SearchCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()).into())
    }

    /// Accepted query is `unsat`, every earlier one is `sat` or a recorded skip.
    pub fn is_well_formed(&self) -> bool {
        let Some(last) = self.queries.last() else { return false };
        last.index == self.accepted_at
            && last.status == SolverStatus::Unsat
            && self.queries[..self.queries.len() - 1]
                .iter()
                .all(|q| q.status == SolverStatus::Sat || self.skipped.contains(&q.index))
            && self.tainted == !self.skipped.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionReport {
    pub tried: usize,
    pub queries: Vec<QueryRecord>,
    pub skipped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Certificate(SearchCertificate),
    Exhausted(ExhaustionReport),
}

impl SearchOutcome {
    pub fn into_certificate(self) -> Result<SearchCertificate> {
        match self {
            SearchOutcome::Certificate(c) => Ok(c),
            SearchOutcome::Exhausted(r) => Err(Error::Exhausted(r.tried)),
        }
    }
}

/// Per-point candidate grid `G_{δ,r}` in dimension `n`.
pub fn candidate_grid(params: &ParamBundle) -> Result<GridSpec> {
    GridSpec::new(params.n, params.delta.clone(), GridVariant::Realified(params.r))
}

/// Number of candidate tuples, `|G_{δ,r}|^m`.
pub fn candidate_space(params: &ParamBundle) -> Result<BigUint> {
    Ok(candidate_grid(params)?.size().pow(params.m_usize()? as u32))
}

/// Candidate `index` as `m` real points.
pub fn candidate_at(params: &ParamBundle, mode: SearchMode, index: usize) -> Result<Vec<Vec<Rational>>> {
    let grid = candidate_grid(params)?;
    let m = params.m_usize()?;
    let points = match mode {
        SearchMode::Lexicographic => {
            let base = grid.size();
            let mut rest = BigUint::from(index);
            let mut digits = vec![BigUint::zero(); m];
            for d in digits.iter_mut().rev() {
                *d = &rest % &base;
                rest /= &base;
            }
            if !rest.is_zero() {
                return Err(Error::Range(format!("candidate {index} outside the tuple space")));
            }
            digits.iter().map(|d| grid.point(d)).collect::<Result<Vec<_>>>()?
        }
        SearchMode::Randomized { seed } => (0..m).map(|j| grid.sample_at(seed, index * m + j)).collect(),
    };
    Ok(points.into_iter().map(|p| p.into_iter().map(|c| c.re).collect()).collect())
}

/// Atoms per query times the number of queries the run may issue.
pub fn estimate_cost(params: &ParamBundle, u: &UniversalCircuit, max_candidates: usize) -> Result<BigUint> {
    let m = params.m_usize()?;
    let per_query = BigUint::from((m + 1) * (u.base.gates().len() + 1) + params.n);
    let queries = candidate_space(params)?.min(BigUint::from(max_candidates));
    Ok(per_query * queries)
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn search_script(u: &UniversalCircuit, params: &ParamBundle, mode: SearchMode, index: usize) -> Result<String> {
    let cand = candidate_at(params, mode, index)?;
    Ok(to_smtlib(&encode_search_query(u, &cand, &params.eps_alg)?))
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let p = &cfg.params;
    if p.m.is_zero() {
        return Err(Error::validation("m must be at least 1"));
    }
    let u = build_universal(p.n, p.s, p.r, None)?;
    let cost = estimate_cost(p, &u, cfg.max_candidates)?;
    if cost > cfg.cost_cap {
        return Err(Error::Cost { estimate: cost.to_string(), cap: cfg.cost_cap.to_string() });
    }
    let space = candidate_space(p)?.to_usize().unwrap_or(usize::MAX);
    let limit = cfg.max_candidates.min(space);
    let identity = if limit == 0 { String::new() } else { cfg.solver.identity()? };

    let mut queries = Vec::new();
    let mut skipped = Vec::new();
    let step = cfg.lookahead.max(1);
    let mut start = 0;
    while start < limit {
        let end = (start + step).min(limit);
        let batch: Vec<(usize, String, SolverStatus)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let script = search_script(&u, p, cfg.mode, i)?;
                let verdict = solve_script(&script, &cfg.solver)?;
                Ok((i, sha256_hex(&script), verdict.status))
            })
            .collect::<Result<_>>()?;
        for (index, hash, status) in batch {
            queries.push(QueryRecord { index, hash, status });
            match status {
                SolverStatus::Sat => {}
                SolverStatus::Unknown | SolverStatus::Timeout => skipped.push(index),
                SolverStatus::Unsat => {
                    let points = candidate_at(p, cfg.mode, index)?
                        .into_iter()
                        .map(|v| v.into_iter().map(GaussianRational::real).collect())
                        .collect();
                    let eps_sq = &p.eps_alg * &p.eps_alg;
                    return Ok(SearchOutcome::Certificate(SearchCertificate {
                        hitting_set: HittingSet::new(Domain::Real, eps_sq, points, Provenance::Searched),
                        queries,
                        accepted_at: index,
                        tainted: !skipped.is_empty(),
                        skipped,
                        config: ConfigSnapshot {
                            params: p.clone(),
                            mode: cfg.mode,
                            max_candidates: cfg.max_candidates,
                            solver_path: cfg.solver.path.display().to_string(),
                            solver_identity: identity,
                            timeout_secs: cfg.solver.timeout.as_secs(),
                            epsilon: p.eps_alg.clone(),
                        },
                    }));
                }
            }
        }
        start = end;
    }
    Ok(SearchOutcome::Exhausted(ExhaustionReport { tried: limit, queries, skipped }))
}

/// Re-solves the accepted query; `true` when it is still `unsat` with the same hash.
pub fn recheck_accepted(cert: &SearchCertificate, solver: &SolverConfig) -> Result<bool> {
    let p = &cert.config.params;
    let u = build_universal(p.n, p.s, p.r, None)?;
    let script = search_script(&u, p, cert.config.mode, cert.accepted_at)?;
    let same_hash = cert.queries.last().is_some_and(|q| q.hash == sha256_hex(&script));
    Ok(same_hash && solve_script(&script, solver)?.status == SolverStatus::Unsat)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub trials: usize,
    /// Zero polynomials drawn from the family; excluded from the fraction.
    pub vacuous: usize,
    pub passes: usize,
    pub failures: Vec<usize>,
    /// `passes / (trials − vacuous)`, or 1 when nothing was checked.
    #[serde(with = "rational_str")]
    pub pass_fraction: Rational,
}

/// Runs the robust verifier of `h` on each family member.
pub fn check_family(h: &HittingSet, family: &[DensePoly]) -> Result<CertificateCheck> {
    let outcomes: Vec<RobustOutcome> = family.par_iter().map(|f| verify_robust(h, f)).collect::<Result<_>>()?;
    let mut check = CertificateCheck {
        trials: family.len(),
        vacuous: 0,
        passes: 0,
        failures: Vec::new(),
        pass_fraction: Rational::one(),
    };
    for (i, o) in outcomes.iter().enumerate() {
        match o {
            RobustOutcome::ZeroPolynomial => check.vacuous += 1,
            RobustOutcome::Witness { .. } => check.passes += 1,
            RobustOutcome::NoWitness { .. } => check.failures.push(i),
        }
    }
    let checked = check.trials - check.vacuous;
    if checked > 0 {
        check.pass_fraction = rat(check.passes as i64, checked as i64);
    }
    Ok(check)
}

/// `trials` seeded members of the family, each scaled so that
/// `max_{G_δ} |f| ≥ 1`.
pub fn sample_scaled_family(params: &ParamBundle, trials: usize, seed: Seed, bound: i64) -> Result<Vec<DensePoly>> {
    let u = build_universal(params.n, params.s, params.r, None)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = random_assignment(&u, seed.wrapping_add(t as u64), bound);
            let f = expand(&u.specialize(&a)?)?.remove(0);
            if f.is_zero() {
                return Ok(f);
            }
            let lb = linf_grid_lower_bound(&f, &params.delta)?;
            let root = sqrt_lower(&lb);
            if root.is_zero() {
                return Ok(f);
            }
            let alpha = GaussianRational::real(root.recip());
            Ok(expand(&u.specialize(&scale_embedding(&u, &a, &alpha))?)?.remove(0))
        })
        .collect()
}

/// Independent check of a certificate on sampled, scaled family members.
pub fn verify_certificate(cert: &SearchCertificate, trials: usize, seed: Seed) -> Result<CertificateCheck> {
    let p = &cert.config.params;
    let family = sample_scaled_family(p, trials, seed, 10)?;
    check_family(&cert.hitting_set, &family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{compute_params, ParamOverrides};
    use crate::scalar::int;

    fn toy() -> ParamBundle {
        let mut ov = ParamOverrides::default();
        for kv in ["delta=1/2", "m=2", "eps=1/100"] {
            ov.parse_pair(kv).unwrap();
        }
        compute_params(1, 1, 1, &ov).unwrap()
    }

    #[test]
    fn lexicographic_candidates() {
        let p = toy();
        // G_{1/2,1} in (a, b, k) order starts −1 + 0·(−1), −1 + 1·(−1), −1 + 0·(−1/2).
        assert_eq!(candidate_at(&p, SearchMode::Lexicographic, 0).unwrap(), vec![vec![int(-1)], vec![int(-1)]]);
        assert_eq!(candidate_at(&p, SearchMode::Lexicographic, 1).unwrap(), vec![vec![int(-1)], vec![int(-2)]]);
        assert_eq!(candidate_at(&p, SearchMode::Lexicographic, 2).unwrap(), vec![vec![int(-1)], vec![int(-1)]]);
        assert_eq!(candidate_at(&p, SearchMode::Lexicographic, 32).unwrap(), vec![vec![int(-2)], vec![int(-1)]]);
        assert_eq!(candidate_space(&p).unwrap(), BigUint::from(1024u32));
        assert!(candidate_at(&p, SearchMode::Lexicographic, 1024).is_err());
    }

    #[test]
    fn randomized_candidates_are_seeded() {
        let p = toy();
        let m = SearchMode::Randomized { seed: 3 };
        assert_eq!(candidate_at(&p, m, 5).unwrap(), candidate_at(&p, m, 5).unwrap());
    }

    #[test]
    fn zero_budget_exhausts_without_solver() {
        let mut cfg = SearchConfig::new(toy(), SearchMode::Lexicographic, 0, SolverConfig::default());
        cfg.solver.path = "/nonexistent".into();
        let out = run_search(&cfg).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted(ExhaustionReport { tried: 0, .. })));
        assert!(matches!(out.into_certificate(), Err(Error::Exhausted(0))));
    }

    #[test]
    fn cost_guard_refuses_unscaled_parameters() {
        let p = compute_params(1, 1, 1, &ParamOverrides::default()).unwrap();
        let mut cfg = SearchConfig::new(p, SearchMode::Lexicographic, usize::MAX, SolverConfig::default());
        cfg.cost_cap = BigUint::from(1000u32);
        assert!(matches!(run_search(&cfg), Err(Error::Cost { .. })));
    }

    #[test]
    fn origin_set_fails_every_nonzero_form() {
        let p = toy();
        let h = HittingSet::new(Domain::Real, rat(1, 10000), vec![vec![GaussianRational::zero()]], Provenance::Loaded);
        let fam = sample_scaled_family(&p, 20, 1, 10).unwrap();
        let check = check_family(&h, &fam).unwrap();
        assert_eq!(check.passes, 0);
        assert!(check.vacuous < check.trials);
        let empty = check_family(&h, &[]).unwrap();
        assert_eq!(empty.pass_fraction, int(1));
    }

    #[test]
    fn scaled_members_reach_one_on_the_grid() {
        let p = toy();
        for f in sample_scaled_family(&p, 10, 4, 10).unwrap() {
            if !f.is_zero() {
                assert!(linf_grid_lower_bound(&f, &p.delta).unwrap() >= int(1));
            }
        }
    }
}
