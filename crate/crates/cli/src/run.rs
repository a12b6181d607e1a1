//! The four commands and their output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sqrtlap_core::constants::ConstantsBundle;
use sqrtlap_core::energy::{BetaField, Growth, Nonlinearity, ProblemInstance, Subquadratic};
use sqrtlap_core::function_space::{EmbeddingOptions, SpectralField};
use sqrtlap_core::solvers::{solve_three, SolveReport, SolverOptions};
use sqrtlap_core::spectral_basis::{Basis, DomainSpec};
use sqrtlap_core::test_functions::{verify_competitor_chain, ChainReport};
use sqrtlap_core::{derive, Derived, EmbeddingChoice, VariationalChoice};
use toml::{Table, Value};

use crate::config::{ConfigError, DomainName, NonlinearityName, RunConfig, SubquadraticChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    Constants,
    Verify,
    Solve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Constants => "constants",
            Command::Verify => "verify",
            Command::Solve => "solve",
        }
    }
}

/// What went wrong, with the process exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl Failure {
    fn config(e: ConfigError) -> Self {
        Failure { code: "CONFIG".into(), message: e.0, exit: 2 }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: "IO".into(), message: format!("{}: {e}", path.display()), exit: 1 }
    }

    fn input(message: String) -> Self {
        Failure { code: "INPUT".into(), message, exit: 2 }
    }

    fn from_code(code: &str, message: String) -> Self {
        Failure { code: code.into(), message, exit: exit_for(code) }
    }
}

impl From<sqrtlap_core::Error> for Failure {
    fn from(e: sqrtlap_core::Error) -> Self {
        Failure::from_code(e.code(), e.to_string())
    }
}

pub fn exit_for(code: &str) -> i32 {
    match code {
        "NO_CONVERGENCE" | "BOUNDARY_MINIMUM" | "MP_COLLAPSE" => 3,
        "THEOREM_VIOLATION" | "CHAIN_VIOLATION" => 4,
        "INTERNAL_INCONSISTENCY" | "IO" => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    /// Where report.toml was written, when an output directory was known.
    pub report: Option<PathBuf>,
    /// Human summary for stdout.
    pub summary: String,
    pub error: Option<Failure>,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn run(command: Command, config_path: &Path, overrides: &Overrides) -> Outcome {
    let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loaded = fs::read_to_string(config_path)
        .map_err(|e| Failure { code: "CONFIG".into(), message: format!("cannot read {}: {e}", config_path.display()), exit: 2 })
        .and_then(|text| RunConfig::parse(&text).map_err(Failure::config));
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(f) => {
            // without a parsed config only --out says where a report may go
            let report = overrides.out.as_ref().and_then(|dir| {
                let mut t = Table::new();
                t.insert("run".into(), Value::Table(run_table(command)));
                t.insert("error".into(), Value::Table(error_table(&f)));
                write_report(dir, &t).ok()
            });
            return Outcome { exit: f.exit, report, summary: String::new(), error: Some(f) };
        }
    };
    if let Some(seed) = overrides.seed {
        cfg.solver.seed = seed;
    }
    let out_dir = overrides.out.clone().unwrap_or_else(|| base.join(&cfg.output.directory));
    let mut report = echo(&cfg);
    report.insert("run".into(), Value::Table(run_table(command)));
    let mut summary = String::new();
    let result = fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::io(&out_dir, e))
        .and_then(|_| execute(command, &cfg, &base, &out_dir, &mut report, &mut summary));
    let error = result.err();
    if let Some(f) = &error {
        report.insert("error".into(), Value::Table(error_table(f)));
    }
    let exit = error.as_ref().map_or(0, |f| f.exit);
    let written = match write_report(&out_dir, &report) {
        Ok(p) => Some(p),
        Err(f) => {
            return Outcome { exit: if exit == 0 { f.exit } else { exit }, report: None, summary, error: error.or(Some(f)) };
        }
    };
    Outcome { exit, report: written, summary, error }
}

fn run_table(command: Command) -> Table {
    let mut t = Table::new();
    t.insert("command".into(), command.name().into());
    t.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    t
}

fn error_table(f: &Failure) -> Table {
    let mut t = Table::new();
    t.insert("code".into(), f.code.clone().into());
    t.insert("message".into(), f.message.clone().into());
    t
}

fn echo(cfg: &RunConfig) -> Table {
    Table::try_from(cfg).expect("configuration serializes")
}

fn write_report(dir: &Path, report: &Table) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join("report.toml");
    let text = emit(report);
    fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
    Ok(path)
}

/// TOML text with floats in shortest round-trip form, scalars before
/// subtables.
pub fn emit(table: &Table) -> String {
    let mut out = String::new();
    emit_into(&mut out, &[], table);
    out
}

fn emit_into(out: &mut String, path: &[String], table: &Table) {
    let scalars: Vec<_> = table.iter().filter(|(_, v)| !v.is_table()).collect();
    if !path.is_empty() && (!scalars.is_empty() || table.values().all(|v| !v.is_table())) {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "[{}]", path.iter().map(|k| key(k)).collect::<Vec<_>>().join("."));
    }
    for (k, v) in scalars {
        let _ = writeln!(out, "{} = {}", key(k), value(v));
    }
    for (k, v) in table {
        if let Value::Table(t) = v {
            let mut sub = path.to_vec();
            sub.push(k.clone());
            emit_into(out, &sub, t);
        }
    }
}

fn key(k: &str) -> String {
    if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        k.to_string()
    } else {
        Value::String(k.to_string()).to_string()
    }
}

fn value(v: &Value) -> String {
    match v {
        Value::Float(x) if x.is_nan() => "nan".into(),
        Value::Float(x) if x.is_infinite() => if *x > 0.0 { "inf".into() } else { "-inf".into() },
        Value::Float(x) => format!("{x:e}"),
        Value::Array(items) => format!("[{}]", items.iter().map(value).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Domain, β and f from a configuration; files resolve against `base`.
pub struct Inputs {
    pub domain: DomainSpec,
    pub beta: BetaField,
    pub nonlinearity: Option<Nonlinearity>,
}

pub fn build_inputs(cfg: &RunConfig, base: &Path, with_nonlinearity: bool) -> Result<Inputs, Failure> {
    for (key, path) in cfg.referenced_files(base) {
        if !path.is_file() {
            return Err(Failure::input(format!("`{key}` names a missing file {}", path.display())));
        }
    }
    let domain = match cfg.domain.kind {
        DomainName::Rectangle => DomainSpec::rectangle(&cfg.domain.sizes)?,
        DomainName::Disk => DomainSpec::disk(cfg.domain.sizes[0])?,
    };
    let beta = match (&cfg.beta.constant, &cfg.beta.grid_file) {
        (Some(b), _) => BetaField::constant(*b)?,
        (None, Some(p)) => read_beta_grid(&base.join(p))?,
        (None, None) => unreachable!("validated"),
    };
    let nonlinearity = if with_nonlinearity { Some(build_nonlinearity(cfg, base)?) } else { None };
    Ok(Inputs { domain, beta, nonlinearity })
}

fn build_nonlinearity(cfg: &RunConfig, base: &Path) -> Result<Nonlinearity, Failure> {
    let s = &cfg.nonlinearity;
    let v = |x: Option<f64>| x.expect("validated");
    let mut nl = match s.kind {
        NonlinearityName::Power => Nonlinearity::power(v(s.c), v(s.q))?,
        NonlinearityName::Bump => Nonlinearity::bump(v(s.m), v(s.zeta))?,
        NonlinearityName::TruncatedBump => Nonlinearity::truncated_bump(v(s.m), v(s.zeta))?,
        NonlinearityName::Cubic => Nonlinearity::cubic(v(s.lin), v(s.cub), v(s.clamp))?,
        NonlinearityName::Tabulated => {
            let path = base.join(s.table_file.as_ref().expect("validated"));
            let rows = read_csv(&path, &["t", "f"])?;
            Nonlinearity::tabulated(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| r[1]).collect())?
        }
    };
    if let Some([a1, a2, q]) = s.growth {
        nl = nl.with_growth(Growth { a1, a2, q });
    }
    match &s.subquadratic {
        Some(SubquadraticChoice::None) => nl = nl.with_subquadratic(None),
        Some(SubquadraticChoice::Bound([b, l])) => nl = nl.with_subquadratic(Some(Subquadratic { b: *b, l: *l })),
        None => {}
    }
    Ok(nl)
}

fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>, Failure> {
    let bad = |m: String| Failure::input(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| bad(e.to_string()))?;
    let found: Vec<String> = reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(bad(format!("expected header `{}`, found `{}`", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| bad(format!("row {}: {e}", line + 2)))?);
    }
    Ok(rows)
}

/// `x1,x2,beta` rows covering a uniform grid, in any order.
fn read_beta_grid(path: &Path) -> Result<BetaField, Failure> {
    let rows = read_csv(path, &["x1", "x2", "beta"])?;
    let bad = |m: &str| Failure::input(format!("{}: {m}", path.display()));
    let axis = |k: usize| -> Result<Vec<f64>, Failure> {
        let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        if v.len() < 2 {
            return Err(bad("β grid needs at least two points per axis"));
        }
        let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        if v.iter().enumerate().any(|(i, x)| (x - (v[0] + step * i as f64)).abs() > 1e-9 * step.max(1.0)) {
            return Err(bad("β grid is not uniform"));
        }
        Ok(v)
    };
    let (xs, ys) = (axis(0)?, axis(1)?);
    if rows.len() != xs.len() * ys.len() {
        return Err(bad("β grid has missing or repeated points"));
    }
    let mut values = vec![f64::NAN; rows.len()];
    for r in &rows {
        let i = xs.partition_point(|x| *x < r[0]);
        let j = ys.partition_point(|y| *y < r[1]);
        values[i * ys.len() + j] = r[2];
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(bad("β grid has missing or repeated points"));
    }
    Ok(BetaField::grid(vec![xs[0], ys[0]], vec![xs[xs.len() - 1], ys[ys.len() - 1]], vec![xs.len(), ys.len()], values)?)
}

fn solver_options(cfg: &RunConfig) -> SolverOptions {
    let s = &cfg.solver;
    SolverOptions {
        tol_res: s.tol_res,
        max_iter: s.max_iter,
        seed: s.seed,
        restarts: s.restarts,
        path_nodes: s.path_nodes,
        mp_max_iter: s.mp_max_iter,
        ..SolverOptions::default()
    }
}

fn derive_for(cfg: &RunConfig, inputs: &Inputs) -> Result<Derived, Failure> {
    let v = &cfg.variational;
    let choice = VariationalChoice {
        x0: v.x0.value(),
        tau: v.tau.value(),
        gamma: v.gamma.value(),
        rho: v.rho.value(),
        lambda: v.lambda.value(),
    };
    let s = &cfg.solver;
    let emb = EmbeddingChoice {
        c1: s.c1.value(),
        cq: s.cq.value(),
        modes: s.embedding_modes,
        options: EmbeddingOptions { restarts: s.embedding_restarts, steps: s.embedding_steps, seed: s.seed, ..Default::default() },
    };
    Ok(derive(&inputs.domain, &inputs.beta, inputs.nonlinearity.as_ref().expect("built"), &choice, &emb)?)
}

fn instance(cfg: &RunConfig, inputs: &Inputs, lambda: f64) -> Result<ProblemInstance, Failure> {
    Ok(ProblemInstance::new(
        inputs.domain.clone(),
        inputs.beta.clone(),
        inputs.nonlinearity.clone().expect("built"),
        lambda,
        cfg.solver.modes,
        cfg.solver.order,
    )?)
}

fn execute(
    command: Command,
    cfg: &RunConfig,
    base: &Path,
    out: &Path,
    report: &mut Table,
    summary: &mut String,
) -> Result<(), Failure> {
    let inputs = build_inputs(cfg, base, command != Command::Eigen)?;
    match command {
        Command::Eigen => eigen(cfg, &inputs, out, report, summary),
        Command::Constants => {
            let d = derive_for(cfg, &inputs)?;
            report.insert("constants".into(), Value::Table(constants_table(&d, inputs.nonlinearity.as_ref().unwrap())));
            let _ = writeln!(summary, "μ1 = {:e}, μ2 = {:e}, λ = {:e}", d.bundle.mu1, d.bundle.mu2, d.lambda);
            Ok(())
        }
        Command::Verify => {
            let d = derive_for(cfg, &inputs)?;
            report.insert("constants".into(), Value::Table(constants_table(&d, inputs.nonlinearity.as_ref().unwrap())));
            let inst = instance(cfg, &inputs, d.lambda)?;
            let chain = verify_competitor_chain(&d.bundle, &inst, cfg.solver.seed)?;
            report.insert("chain".into(), Value::Table(chain_table(&chain)));
            for c in &chain.clauses {
                let _ = writeln!(summary, "{:<24} {:<8} {:e} vs {:e}", c.name, c.status.to_string(), c.lhs, c.rhs);
            }
            if !chain.passed() {
                let failed: Vec<&str> =
                    chain.clauses.iter().filter(|c| c.status.to_string() == "FAIL").map(|c| c.name).collect();
                return Err(Failure::from_code("CHAIN_VIOLATION", format!("failed clauses: {}", failed.join(", "))));
            }
            Ok(())
        }
        Command::Solve => {
            let d = derive_for(cfg, &inputs)?;
            report.insert("constants".into(), Value::Table(constants_table(&d, inputs.nonlinearity.as_ref().unwrap())));
            let inst = instance(cfg, &inputs, d.lambda)?;
            let sr = solve_three(&inst, &d.bundle, &solver_options(cfg))?;
            let (solve, solutions) = solve_tables(&inst, &sr, cfg, out)?;
            report.insert("solve".into(), Value::Table(solve));
            report.insert("solutions".into(), Value::Table(solutions));
            for s in &sr.solutions {
                let _ = writeln!(summary, "{}: J = {:e}, residual = {:e}, Φ = {:e}, trivial = {}", s.label, s.energy, s.residual, s.phi, s.trivial);
            }
            let _ = writeln!(summary, "distinct nontrivial solutions: {}", sr.distinct_nontrivial);
            match sr.first_failure() {
                Some(f) => Err(Failure::from_code(&f.code, format!("{}: {}", f.stage, f.message))),
                None => Ok(()),
            }
        }
    }
}

fn eigen(cfg: &RunConfig, inputs: &Inputs, out: &Path, report: &mut Table, summary: &mut String) -> Result<(), Failure> {
    let basis = Basis::new(inputs.domain.clone(), cfg.solver.modes)?;
    let path = out.join("eigenvalues.csv");
    let mut text = String::from("index,eigenvalue,sqrt_eigenvalue,mode\n");
    let _ = writeln!(summary, "{:>5}  {:>24}  {:>24}  mode", "j", "λ_j", "λ_j^(1/2)");
    for (p, s) in basis.pairs().iter().zip(basis.sqrt_eigenvalues()) {
        let _ = writeln!(text, "{},{:.16e},{:.16e},{}", p.index, p.eigenvalue, s, p.mode);
        let _ = writeln!(summary, "{:>5}  {:>24.16e}  {:>24.16e}  {}", p.index, p.eigenvalue, s, p.mode);
    }
    fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
    let mut t = Table::new();
    t.insert("count".into(), Value::Integer(basis.len() as i64));
    t.insert("first".into(), basis.pairs()[0].eigenvalue.into());
    t.insert("last".into(), basis.pairs()[basis.len() - 1].eigenvalue.into());
    t.insert("table".into(), "eigenvalues.csv".into());
    report.insert("eigen".into(), Value::Table(t));
    Ok(())
}

fn constants_table(d: &Derived, nl: &Nonlinearity) -> Table {
    let b: &ConstantsBundle = &d.bundle;
    let g = &b.geometry;
    let mut t = Table::new();
    let mut put = |k: &str, v: Value| {
        t.insert(k.into(), v);
    };
    put("x0", Value::Array(g.x0.iter().map(|x| Value::Float(*x)).collect()));
    put("tau", g.tau.into());
    put("measure", g.measure.into());
    put("omega_n", g.omega.into());
    put("g", g.g.into());
    put("h", g.h.into());
    put("beta0", b.beta0.into());
    put("beta_inf", b.beta_inf.into());
    put("a1", b.a1.into());
    put("a2", b.a2.into());
    put("q", b.q.into());
    put("c1", b.c1.into());
    put("cq", b.cq.into());
    put("c2", b.c2.into());
    put("k1", b.k1.into());
    put("k2", b.k2.into());
    put("gamma", b.gamma.into());
    put("gamma_auto", d.gamma_auto.into());
    put("rho", b.rho.into());
    put("f_rho", b.f_rho.into());
    put("mu1", b.mu1.into());
    put("mu2", b.mu2.into());
    put("interval_valid", b.interval_valid.into());
    put("ai", b.ai.holds.into());
    put("ai_margin", b.ai.margin.into());
    let aii = nl.subquadratic.is_some_and(|s| s.l < 2.0);
    put("aii", aii.into());
    if let Some(s) = nl.subquadratic {
        put("aii_b", s.b.into());
        put("aii_l", s.l.into());
    }
    put("rho_gamma", b.rho_gamma_ok.into());
    if let Some(ls) = &b.lambda_star {
        put("lambda_star", ls.value.into());
        put("rho_bar", ls.rho_bar.into());
        put("inf_ratio", ls.inf_ratio.into());
    }
    put("lambda", d.lambda.into());
    put("lambda_auto", d.lambda_auto.into());
    put("lambda_in_interval", b.contains(d.lambda).into());
    put("guaranteed", b.guarantees(d.lambda).into());
    put("indicative", b.indicative.into());
    t
}

fn chain_table(c: &ChainReport) -> Table {
    let mut t = Table::new();
    t.insert("lambda".into(), c.lambda.into());
    t.insert("phi".into(), c.phi.into());
    t.insert("psi".into(), c.psi.into());
    t.insert("energy".into(), c.energy.into());
    t.insert("psi_sup_bound".into(), c.psi_sup_bound.into());
    t.insert("psi_sup_sampled".into(), c.psi_sup_sampled.into());
    t.insert("passed".into(), c.passed().into());
    for clause in &c.clauses {
        let mut e = Table::new();
        e.insert("status".into(), clause.status.to_string().into());
        e.insert("lhs".into(), clause.lhs.into());
        e.insert("rhs".into(), clause.rhs.into());
        t.insert(clause.name.into(), Value::Table(e));
    }
    t
}

fn solve_tables(inst: &ProblemInstance, sr: &SolveReport, cfg: &RunConfig, out: &Path) -> Result<(Table, Table), Failure> {
    let mut t = Table::new();
    t.insert("lambda".into(), sr.lambda.into());
    t.insert("gamma".into(), sr.gamma.into());
    t.insert("guaranteed".into(), sr.guaranteed.into());
    t.insert("tol_zero".into(), sr.tol_zero.into());
    t.insert("delta_dist".into(), sr.delta_dist.into());
    t.insert("distinct_nontrivial".into(), Value::Integer(sr.distinct_nontrivial as i64));
    let trivial = sr.solutions.iter().filter(|s| s.trivial).count();
    t.insert("trivial".into(), Value::Integer(trivial as i64));
    t.insert("labels".into(), Value::Array(sr.solutions.iter().map(|s| s.label.into()).collect()));
    let m = sr.distances.nrows();
    let rows = (0..m).map(|i| Value::Array((0..m).map(|j| Value::Float(sr.distances[(i, j)])).collect())).collect();
    t.insert("distances".into(), Value::Array(rows));
    t.insert("notes".into(), Value::Array(sr.notes.iter().map(|n| n.clone().into()).collect()));
    let mut starts = Table::new();
    for s in &sr.global_starts {
        let mut e = Table::new();
        if let Some(j) = s.energy {
            e.insert("energy".into(), j.into());
        }
        if let Some(err) = &s.error {
            e.insert("error".into(), err.clone().into());
        }
        starts.insert(s.label.clone(), Value::Table(e));
    }
    t.insert("global_starts".into(), Value::Table(starts));
    let mut failures = Table::new();
    for f in &sr.failures {
        failures.insert(f.stage.into(), Value::Table(error_table(&Failure::from_code(&f.code, f.message.clone()))));
    }
    t.insert("failures".into(), Value::Table(failures));

    let mut sols = Table::new();
    for s in &sr.solutions {
        let coeffs_name = format!("{}_coeffs.csv", s.label);
        let trace_name = format!("{}_trace.csv", s.label);
        let mut text = String::from("j,a_j\n");
        for (j, a) in s.coeffs.iter().enumerate() {
            let _ = writeln!(text, "{},{:.16e}", j + 1, a);
        }
        let path = out.join(&coeffs_name);
        fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        let path = out.join(&trace_name);
        fs::write(&path, trace_csv(&inst.field(&s.coeffs), cfg.output.grid)?).map_err(|e| Failure::io(&path, e))?;

        let mut e = Table::new();
        e.insert("energy".into(), s.energy.into());
        e.insert("phi".into(), s.phi.into());
        e.insert("residual".into(), s.residual.into());
        e.insert("norm".into(), s.norm.into());
        e.insert("trace_max".into(), s.trace_max.into());
        e.insert("trace_min".into(), s.trace_min.into());
        e.insert("trivial".into(), s.trivial.into());
        e.insert("nonnegative".into(), s.nonnegative.into());
        e.insert("inside_ball".into(), s.inside_ball.into());
        e.insert("iterations".into(), Value::Integer(s.iterations as i64));
        e.insert("newton_steps".into(), Value::Integer(s.newton_steps as i64));
        e.insert("coefficients".into(), coeffs_name.into());
        e.insert("trace".into(), trace_name.into());
        sols.insert(s.label.into(), Value::Table(e));
    }
    Ok((t, sols))
}

/// `x1,x2,u,inside` on a grid × grid lattice over the bounding box, x1
/// fastest; points outside the closure get u = 0.
pub fn trace_csv(u: &SpectralField, grid: usize) -> Result<String, Failure> {
    let domain = u.basis().domain();
    let (lo, hi) = domain.bounding_box();
    let coord = |d: usize, i: usize| if i + 1 == grid { hi[d] } else { lo[d] + (hi[d] - lo[d]) * i as f64 / (grid - 1) as f64 };
    let rows: Result<Vec<String>, Failure> = (0..grid)
        .into_par_iter()
        .map(|iy| {
            let y = coord(1, iy);
            let points: Vec<Vec<f64>> = (0..grid).map(|ix| vec![coord(0, ix), y]).collect();
            let inside: Vec<bool> = points.iter().map(|p| domain.contains_closure(p)).collect();
            let kept: Vec<Vec<f64>> = points.iter().zip(&inside).filter(|(_, k)| **k).map(|(p, _)| p.clone()).collect();
            let values = if kept.is_empty() { Vec::new() } else { u.eval_at(&kept)? };
            let mut next = values.into_iter();
            let mut text = String::with_capacity(grid * 80);
            for (p, k) in points.iter().zip(&inside) {
                let v = if *k { next.next().expect("one value per kept point") } else { 0.0 };
                let _ = writeln!(text, "{:.16e},{:.16e},{:.16e},{}", p[0], p[1], v, u8::from(*k));
            }
            Ok(text)
        })
        .collect();
    let mut out = String::from("x1,x2,u,inside\n");
    for r in rows? {
        out.push_str(&r);
    }
    Ok(out)
}
