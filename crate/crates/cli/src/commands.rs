//! Subcommand implementations. Each returns a [`Report`] whose result is
//! printed and, with `--output`, written as an artifact.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hitset_core::anticonc::{cw_test_complex, cw_test_real, CWReport, Mode};
use hitset_core::circuit::{check_homogeneous, parse_circuit, Circuit, Homogeneity};
use hitset_core::error::Error;
use hitset_core::etr::{
    encode_phi, encode_psi, encode_search_query, solve, solve_script, to_smtlib, AuxMode, ETRFormula, SolverConfig,
    SolverVerdict,
};
use hitset_core::grid::{GridSpec, GridVariant};
use hitset_core::hardpoly::{encode_hardness_query, extract_hard_poly};
use hitset_core::norms::{check_markov_at, check_norm_inequalities, Inequality};
use hitset_core::params::{compute_params, ParamBundle, ParamOverrides};
use hitset_core::poly::{expand_with_budget, DensePoly};
use hitset_core::robust::{
    check_robust_net_condition, realify, sample_candidate, tensor_limit_demo, verify_robust, HittingSet, RobustOutcome,
};
use hitset_core::scalar::{format_rational, GaussianRational, Rational};
use hitset_core::search::{
    recheck_accepted, run_search, verify_certificate, SearchCertificate, SearchConfig, SearchMode, SearchOutcome,
};
use hitset_core::universal::{build_universal, embed_normal_form, scale_embedding, UniversalCircuit};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::*;
use crate::manifest::read_document;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Backend(_)) => 3,
            CliError::Core(_) | CliError::Io(..) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A text file written next to the main artifact.
pub struct SideFile {
    pub path: PathBuf,
    /// Comment marker for the digest line.
    pub comment: &'static str,
    pub body: String,
}

pub struct Report {
    /// Artifact file stem.
    pub name: String,
    pub result: Value,
    pub seeds: Vec<u64>,
    pub solver: Option<SolverConfig>,
    pub side_files: Vec<SideFile>,
    /// Set when the run completed but its check failed.
    pub failure: Option<String>,
}

impl Report {
    fn new(name: &str, result: Value) -> Self {
        Report { name: name.into(), result, seeds: Vec::new(), solver: None, side_files: Vec::new(), failure: None }
    }

    fn seeds(mut self, seeds: &[u64]) -> Self {
        self.seeds = seeds.to_vec();
        self
    }

    fn solver(mut self, cfg: SolverConfig) -> Self {
        self.solver = Some(cfg);
        self
    }

    fn fail_if(mut self, cond: bool, msg: impl Into<String>) -> Self {
        if cond {
            self.failure = Some(msg.into());
        }
        self
    }

    fn csv(mut self, target: &CsvArg, body: impl FnOnce() -> String) -> Self {
        if let Some(path) = &target.csv {
            self.side_files.push(SideFile { path: path.clone(), comment: "#", body: body() });
        }
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn read(path: &Path) -> CliResult<String> {
    read_document(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    Ok(parse_circuit(&read(path)?)?)
}

fn load_poly(path: &Path) -> CliResult<DensePoly> {
    Ok(DensePoly::from_json(&read(path)?)?)
}

fn load_set(path: &Path) -> CliResult<HittingSet> {
    Ok(HittingSet::from_json(&read(path)?)?)
}

fn solver_config(a: &SolverArgs) -> SolverConfig {
    SolverConfig::resolve(a.solver.clone(), Duration::from_secs(a.timeout))
}

fn overrides(pairs: &Overrides) -> CliResult<ParamOverrides> {
    let mut ov = ParamOverrides::default();
    for p in &pairs.pairs {
        ov.parse_pair(p).map_err(|e| CliError::Usage(format!("--override {p}: {e}")))?;
    }
    Ok(ov)
}

fn model_value(m: &Option<BTreeMap<String, Rational>>) -> Value {
    match m {
        Some(m) => to_value(&m.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect::<BTreeMap<_, _>>()),
        None => Value::Null,
    }
}

pub fn dispatch(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Params(a) => params(a),
        Command::Circuit { cmd } => circuit(cmd),
        Command::Norm(a) => norm(a),
        Command::Universal { cmd } => universal(cmd),
        Command::Grid { cmd } => grid(cmd),
        Command::Anticonc { cmd } => anticonc(cmd),
        Command::Robust { cmd } => robust(cmd),
        Command::Etr { cmd } => etr(cmd),
        Command::Search { cmd } => search(cmd, cli.jobs),
        Command::Hardpoly(a) => hardpoly(a),
    }
}

fn bundle(shape: &Shape, ov: ParamOverrides) -> CliResult<ParamBundle> {
    Ok(compute_params(shape.n, shape.s, shape.r, &ov)?)
}

fn params(a: &ParamsArgs) -> CliResult<Report> {
    let mut ov = overrides(&a.overrides)?;
    if let Some(c) = &a.ccw {
        ov.c_cw = Some(c.clone());
    }
    let p = bundle(&a.shape, ov)?;
    let net = check_robust_net_condition(&p.net_epsilon(), &p.eta, p.n, p.r);
    let mut result = to_value(&p);
    result["net_condition"] = to_value(&net);
    Ok(Report::new("params", result))
}

fn homogeneity(h: &Homogeneity) -> Value {
    match h {
        Homogeneity::Homogeneous(d) => json!({"homogeneous": true, "degrees": d}),
        Homogeneity::MixedAt(g) => json!({"homogeneous": false, "mixed_at": g}),
    }
}

fn circuit(cmd: &CircuitCmd) -> CliResult<Report> {
    match cmd {
        CircuitCmd::Eval { circuit, point } => {
            let c = load_circuit(circuit)?;
            let values = c.eval(&point.0)?;
            Ok(Report::new("circuit-eval", json!({ "point": point.0, "values": values })))
        }
        CircuitCmd::Expand { circuit, index, budget } => {
            let c = load_circuit(circuit)?;
            let mut polys = expand_with_budget(&c, *budget)?;
            if *index >= polys.len() {
                return Err(CliError::Usage(format!("output index {index} out of range ({} outputs)", polys.len())));
            }
            let f = polys.swap_remove(*index);
            Ok(Report::new("circuit-expand", to_value(&f.to_file())))
        }
        CircuitCmd::Check { circuit } => {
            let c = load_circuit(circuit)?;
            let h = check_homogeneous(&c);
            let result = json!({
                "n_vars": c.n_vars(),
                "gates": c.gates().len(),
                "size": c.size(),
                "outputs": c.outputs(),
                "output_degrees": c.output_degrees(),
                "declared_homogeneous": c.is_declared_homogeneous(),
                "homogeneity": homogeneity(&h),
            });
            let bad = c.is_declared_homogeneous() && !matches!(h, Homogeneity::Homogeneous(_));
            Ok(Report::new("circuit-check", result).fail_if(bad, "circuit is declared homogeneous but is not"))
        }
    }
}

fn inequality_csv(rows: &[&Inequality]) -> String {
    let mut out = String::from("name,lhs,rhs,strict,holds\n");
    for i in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i.name,
            format_rational(&i.lhs),
            format_rational(&i.rhs),
            i.strict,
            i.holds
        ));
    }
    out
}

fn norm(a: &NormArgs) -> CliResult<Report> {
    let f = load_poly(&a.poly)?;
    let report = check_norm_inequalities(&f, &a.delta)?;
    let markov: Vec<Inequality> = a.markov_points.iter().map(|p| check_markov_at(&f, &p.0)).collect::<Result<_, _>>()?;
    let pointwise: Vec<Inequality> = a
        .pointwise_points
        .iter()
        .map(|p| hitset_core::norms::check_pointwise_at(&f, &p.0))
        .collect::<Result<_, _>>()?;
    let mut result = to_value(&report);
    result["markov"] = to_value(&markov);
    result["pointwise"] = to_value(&pointwise);
    let checked: Vec<&Inequality> = report.checked.iter().chain(&markov).chain(&pointwise).collect();
    let violated = checked.iter().any(|i| !i.holds);
    let all: Vec<&Inequality> = checked.iter().copied().chain(&report.informational).collect();
    let csv = inequality_csv(&all);
    Ok(Report::new("norm", result).fail_if(violated, "an inequality is violated").csv(&a.csv, || csv))
}

fn universal(cmd: &UniversalCmd) -> CliResult<Report> {
    match cmd {
        UniversalCmd::Build { shape, width } => {
            let u = build_universal(shape.n, shape.s, shape.r, *width)?;
            let result: Value = serde_json::from_str(&u.to_json()).map_err(Error::from)?;
            Ok(Report::new("universal-build", result))
        }
        UniversalCmd::Embed { shape, width, circuit, scale } => {
            let u = build_universal(shape.n, shape.s, shape.r, *width)?;
            let c = load_circuit(circuit)?;
            let mut a = embed_normal_form(&u, &c)?;
            let mut target = expand_with_budget(&c, hitset_core::poly::DEFAULT_EXPAND_BUDGET)?.remove(0);
            if let Some(q) = scale {
                let alpha = GaussianRational::real(q.clone());
                a = scale_embedding(&u, &a, &alpha);
                target = target.scale(&alpha);
            }
            let got = expand_with_budget(&u.specialize(&a)?, hitset_core::poly::DEFAULT_EXPAND_BUDGET)?.remove(0);
            let ok = got == target;
            let result = json!({
                "m_auxiliary": u.m_auxiliary,
                "assignment": a,
                "reproduces_circuit": ok,
            });
            Ok(Report::new("universal-embed", result).fail_if(!ok, "specialization differs from the circuit"))
        }
    }
}

fn grid_spec(g: &GridArgs) -> CliResult<GridSpec> {
    let variant = match (g.variant, g.r) {
        (VariantArg::Real, _) => GridVariant::Real,
        (VariantArg::Complex, _) => GridVariant::Complex,
        (VariantArg::Realified, Some(r)) => GridVariant::Realified(r),
        (VariantArg::Realified, None) => return Err(CliError::Usage("--variant realified requires --r".into())),
    };
    Ok(GridSpec::new(g.n, g.delta.clone(), variant)?)
}

fn points_csv(points: &[Vec<GaussianRational>], first: &BigUint) -> String {
    let dim = points.first().map_or(0, Vec::len);
    let header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    let mut out = format!("index,{}\n", header.join(","));
    for (k, p) in points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("{},{}\n", first + BigUint::from(k), coords.join(",")));
    }
    out
}

fn grid(cmd: &GridCmd) -> CliResult<Report> {
    match cmd {
        GridCmd::Enum { grid, from, csv } => {
            let spec = grid_spec(grid)?;
            let start: BigUint = from.parse().map_err(|_| CliError::Usage(format!("--from {from}: not an index")))?;
            let points = spec.enumerate(&start, grid.count)?;
            let result = json!({
                "grid": spec,
                "size": spec.size().to_string(),
                "from": start.to_string(),
                "points": points,
            });
            let body = points_csv(&points, &start);
            Ok(Report::new("grid-enum", result).csv(csv, || body))
        }
        GridCmd::Sample { grid, seed, csv } => {
            let spec = grid_spec(grid)?;
            let points = spec.sample(*seed, grid.count);
            let result = json!({
                "grid": spec,
                "size": spec.size().to_string(),
                "seed": seed,
                "points": points,
            });
            let body = points_csv(&points, &BigUint::from(0u8));
            Ok(Report::new("grid-sample", result).seeds(&[*seed]).csv(csv, || body))
        }
    }
}

fn anticonc(cmd: &AnticoncCmd) -> CliResult<Report> {
    let (a, complex) = match cmd {
        AnticoncCmd::Real(a) => (a, false),
        AnticoncCmd::Complex(a) => (a, true),
    };
    let f = load_poly(&a.poly)?;
    let mode = if a.exhaustive { Mode::Exhaustive } else { Mode::Sampled { samples: a.samples, seed: a.seed } };
    let rep: CWReport = if complex {
        cw_test_complex(&f, &a.delta, &a.beta.0, &a.c, mode)?
    } else {
        cw_test_real(&f, &a.delta, &a.beta.0, &a.c, mode)?
    };
    let seeds: Vec<u64> = if a.exhaustive { Vec::new() } else { vec![a.seed] };
    let name = if complex { "anticonc-complex" } else { "anticonc-real" };
    let fail = !rep.all_pass();
    let csv = rep.to_csv();
    Ok(Report::new(name, to_value(&rep))
        .seeds(&seeds)
        .fail_if(fail, "empirical probability exceeds the bound")
        .csv(&a.csv, || csv))
}

fn robust(cmd: &RobustCmd) -> CliResult<Report> {
    match cmd {
        RobustCmd::Verify { hitting_set, poly } => {
            let h = load_set(hitting_set)?;
            let f = load_poly(poly)?;
            let outcome = verify_robust(&h, &f)?;
            let miss = matches!(outcome, RobustOutcome::NoWitness { .. });
            Ok(Report::new("robust-verify", to_value(&outcome)).fail_if(miss, "no point of the set is a witness"))
        }
        RobustCmd::Sample { shape, overrides: ov, seed } => {
            let p = bundle(shape, overrides(ov)?)?;
            let h = sample_candidate(&p, *seed)?;
            Ok(Report::new("robust-sample", to_value(&h)).seeds(&[*seed]))
        }
        RobustCmd::Realify { hitting_set, r } => {
            let h = load_set(hitting_set)?;
            h.validate()?;
            Ok(Report::new("robust-realify", to_value(&realify(&h, *r))))
        }
        RobustCmd::DemoTensor { eps, csv } => {
            let schedule: Vec<Rational> = eps.iter().flat_map(|p| p.0.iter().cloned()).collect();
            let demo = tensor_limit_demo(&schedule)?;
            let mut result = to_value(&demo);
            result["summary"] = Value::String(demo.summary());
            let mut body = String::from("eps,value_at_bad_point,norm_sq,bad_point_ratio,hit\n");
            for row in &demo.rows {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_rational(&row.eps),
                    row.value_at_bad_point,
                    format_rational(&row.norm_sq),
                    format_rational(&row.bad_point_ratio),
                    row.hit
                ));
            }
            Ok(Report::new("robust-demo-tensor", result).fail_if(!demo.all_hit, "family not hit").csv(csv, || body))
        }
    }
}

fn universal_from(shape: &UniversalShape) -> CliResult<UniversalCircuit> {
    Ok(build_universal(shape.shape.n, shape.shape.s, shape.shape.r, shape.width)?)
}

fn aux_mode(a: &AuxArgs) -> CliResult<AuxMode> {
    if let Some(v) = &a.aux {
        return Ok(AuxMode::Fixed(v.0.clone()));
    }
    let Some(path) = &a.assignment else { return Ok(AuxMode::Symbolic) };
    let doc: Value = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    let raw: Vec<GaussianRational> =
        serde_json::from_value(doc.get("assignment").cloned().unwrap_or(Value::Null)).map_err(Error::from)?;
    let real = raw.into_iter().map(|c| if c.is_real() { Ok(c.re) } else { Err(Error::NotReal) });
    Ok(AuxMode::Fixed(real.collect::<Result<_, _>>()?))
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn verdict_value(f: Option<&ETRFormula>, v: &SolverVerdict) -> Value {
    json!({
        "status": v.status,
        "model": model_value(&v.model),
        "model_checked": match (f, &v.model) {
            (Some(f), Some(m)) => Value::Bool(f.check_model(m)),
            _ => Value::Null,
        },
    })
}

fn formula_report(name: &str, f: &ETRFormula, out: &FormulaOut) -> CliResult<Report> {
    let script = to_smtlib(f);
    let mut result = json!({
        "vars": f.vars.len(),
        "atoms": f.atoms.len(),
        "max_degree": f.max_degree(),
        "smtlib_sha256": sha256_hex(&script),
    });
    let mut report = Report::new(name, Value::Null);
    match &out.dump {
        Some(path) => report.side_files.push(SideFile { path: path.clone(), comment: ";", body: script }),
        None => result["smtlib"] = Value::String(script),
    }
    if out.solve {
        let cfg = solver_config(&out.solver);
        let v = solve(f, &cfg)?;
        let checked = verdict_value(Some(f), &v);
        let bad_model = checked["model_checked"] == Value::Bool(false);
        result["verdict"] = checked;
        report = report.solver(cfg).fail_if(bad_model, "solver model violates an atom");
    }
    report.result = result;
    Ok(report)
}

fn etr(cmd: &EtrCmd) -> CliResult<Report> {
    match cmd {
        EtrCmd::EncodePhi { universal, point, eps, aux, negate, out } => {
            let u = universal_from(universal)?;
            let f = encode_phi(&u, &point.0, eps, &aux_mode(aux)?, *negate)?;
            formula_report("etr-encode-phi", &f, out)
        }
        EtrCmd::EncodePsi { universal, aux, out } => {
            let u = universal_from(universal)?;
            let f = encode_psi(&u, &aux_mode(aux)?)?;
            formula_report("etr-encode-psi", &f, out)
        }
        EtrCmd::EncodeSearch { universal, candidate, eps, out } => {
            let u = universal_from(universal)?;
            let cand: Vec<Vec<Rational>> = candidate.iter().map(|p| p.0.clone()).collect();
            let f = encode_search_query(&u, &cand, eps)?;
            formula_report("etr-encode-search", &f, out)
        }
        EtrCmd::Solve { input, solver } => {
            let script = std::fs::read_to_string(input).map_err(|e| CliError::Io(input.clone(), e))?;
            let cfg = solver_config(solver);
            let v = solve_script(&script, &cfg)?;
            let mut result = verdict_value(None, &v);
            result["input_sha256"] = Value::String(sha256_hex(&script));
            result["transcript"] = Value::String(v.transcript.clone());
            Ok(Report::new("etr-solve", result).solver(cfg))
        }
    }
}

fn queries_csv(q: &[hitset_core::search::QueryRecord]) -> String {
    let mut out = String::from("index,hash,status\n");
    for r in q {
        out.push_str(&format!("{},{},{}\n", r.index, r.hash, to_value(&r.status).as_str().unwrap_or("")));
    }
    out
}

fn search(cmd: &SearchCmd, jobs: usize) -> CliResult<Report> {
    match cmd {
        SearchCmd::Run {
            shape,
            delta,
            m,
            eps,
            mode,
            seed,
            max_candidates,
            cost_cap,
            lookahead,
            overrides: ov,
            solver,
            csv,
        } => {
            let mut ov = overrides(ov)?;
            if let Some(d) = delta {
                ov.delta = Some(d.clone());
            }
            if let Some(m) = m {
                ov.m = Some(*m);
            }
            if let Some(e) = eps {
                ov.eps_alg = Some(e.clone());
            }
            let mode = match (mode, seed) {
                (ModeArg::Lex, _) => SearchMode::Lexicographic,
                (ModeArg::Rand, Some(s)) => SearchMode::Randomized { seed: *s },
                (ModeArg::Rand, None) => return Err(CliError::Usage("--mode rand requires --seed".into())),
            };
            let params = bundle(shape, ov)?;
            let cfg_solver = solver_config(solver);
            let mut cfg = SearchConfig::new(params, mode, *max_candidates, cfg_solver.clone());
            if let Some(cap) = cost_cap {
                cfg.cost_cap = cap.parse().map_err(|_| CliError::Usage(format!("--cost-cap {cap}: not an integer")))?;
            }
            cfg.lookahead = lookahead.unwrap_or(jobs).max(1);
            let seeds: Vec<u64> = match mode {
                SearchMode::Randomized { seed } => vec![seed],
                SearchMode::Lexicographic => Vec::new(),
            };
            let outcome = run_search(&cfg)?;
            let (queries, exhausted) = match &outcome {
                SearchOutcome::Certificate(c) => (c.queries.clone(), None),
                SearchOutcome::Exhausted(r) => (r.queries.clone(), Some(r.tried)),
            };
            let body = queries_csv(&queries);
            let report = Report::new("search-run", to_value(&outcome))
                .seeds(&seeds)
                .solver(cfg_solver)
                .csv(csv, || body);
            Ok(match exhausted {
                Some(t) => report.fail_if(true, format!("search exhausted after {t} candidates")),
                None => report,
            })
        }
        SearchCmd::VerifyCert { certificate, trials, seed, recheck, solver } => {
            let cert = SearchCertificate::from_json(&read(certificate)?)?;
            let well_formed = cert.is_well_formed();
            let check = verify_certificate(&cert, *trials, *seed)?;
            let mut report = Report::new("search-verify-cert", Value::Null).seeds(&[*seed]);
            let rechecked = if *recheck {
                let cfg = solver_config(solver);
                let ok = recheck_accepted(&cert, &cfg)?;
                report = report.solver(cfg);
                Some(ok)
            } else {
                None
            };
            report.result = json!({
                "well_formed": well_formed,
                "tainted": cert.tainted,
                "accepted_at": cert.accepted_at,
                "check": check,
                "recheck": rechecked,
            });
            let bad = !well_formed || rechecked == Some(false) || !check.failures.is_empty();
            Ok(report.fail_if(bad, "certificate did not verify"))
        }
    }
}

fn hardpoly(a: &HardpolyArgs) -> CliResult<Report> {
    let h = load_set(&a.hitting_set)?;
    let hp = extract_hard_poly(&h, a.degree)?;
    let mut result = to_value(&hp.poly.to_file());
    result["degree"] = json!(hp.degree);
    result["rank"] = json!(hp.rank);
    result["nullity"] = json!(hp.nullity);
    let mut report = Report::new("hardpoly", Value::Null);
    if a.check_hardness {
        let s = a.s.expect("clap enforces --s");
        let r = a.r.unwrap_or(hp.degree);
        let u = build_universal(hp.poly.n(), s, r, None)?;
        let q = encode_hardness_query(&u, &hp.poly, a.budget)?;
        let script = to_smtlib(&q);
        if let Some(path) = &a.dump {
            report.side_files.push(SideFile { path: path.clone(), comment: ";", body: script.clone() });
        }
        let cfg = solver_config(&a.solver);
        let v = solve(&q, &cfg)?;
        let mut verdict = verdict_value(Some(&q), &v);
        verdict["s"] = json!(s);
        verdict["r"] = json!(r);
        verdict["query_sha256"] = Value::String(sha256_hex(&script));
        result["hardness"] = verdict;
        report = report.solver(cfg);
    }
    report.result = result;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Backend("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(Error::validation("x")).exit_code(), 1);
        assert_eq!(CliError::Core(Error::Exhausted(3)).exit_code(), 1);
    }

    #[test]
    fn csv_rows_use_exact_rationals() {
        let rows = [Inequality::le("a", Rational::new(1.into(), 3.into()), Rational::new(1.into(), 2.into()))];
        let body = inequality_csv(&rows.iter().collect::<Vec<_>>());
        assert_eq!(body, "name,lhs,rhs,strict,holds\na,1/3,1/2,false,true\n");
    }
}
