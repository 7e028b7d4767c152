//! Command-line front end: batch subcommands that write JSON / JSON-lines /
//! CSV reports. No interactive UI, no plotting — plot data is CSV.
//!
//! Exit-code contract: `0` success (inconclusive verdicts are still
//! success), `1` property anomaly (a qualitative prediction was violated),
//! `2` invalid configuration, `3` solver failure. Identical configuration
//! and seed produce byte-identical report files.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assembly::{assemble, DirichletSides};
use crate::continuation::{seed_field, trace, trace_jsonl, TraceConfig};
use crate::eigensolve::{smallest_eigenpairs, SolveError, DEFAULT_SEED};
use crate::geometry::{canonicalize, classify, AngleClass, Point, Triangle};
use crate::inequalities::{analytic_suite, chain, estimate_eigenvalue, ScanGrid};
use crate::meshing::uniform_mesh;
use crate::report::{
    parse_triangle, planted_interior_max_anomalies, render_json, run_battery, run_battery_full,
    RunConfig,
};

const EXIT_OK: i32 = 0;
const EXIT_ANOMALY: i32 = 1;
const EXIT_CONFIG: i32 = 2;
const EXIT_SOLVER: i32 = 3;

#[derive(Parser)]
#[command(
    name = "hotspots-lab",
    version,
    about = "Finite-element laboratory for qualitative spectral geometry on triangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full property battery for one triangle (JSON report + CSV plot data)
    Solve(SolveArgs),
    /// Mixed-eigenvalue inequality chain for one triangle
    Chain(ChainArgs),
    /// Battery sweep over a grid in the angle simplex
    Scan(ScanArgs),
    /// Homotopy trace from the half-equilateral seed to a target triangle
    Continuation(ContinuationArgs),
    /// FEM-free analytic suite: exact identities, bound claims, the F-scan
    Analytic(AnalyticArgs),
    /// Closed-form convergence self-tests
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Refinement level range `lo:hi`
    #[arg(long, value_parser = parse_levels, default_value = "4:6")]
    levels: (u32, u32),
    /// Element order for eigenvalue estimates (1 or 2); the qualitative
    /// battery always runs on quadratic elements
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Output file path (defaults to `<command>_report.json` or `.jsonl`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: HOTSPOTS_LAB_JOBS or 1)
    #[arg(long)]
    jobs: Option<usize>,
    /// RNG seed as hex (e.g. `0x5eed`)
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Boundary-gradient tolerance factor for the critical point census
    #[arg(long, default_value_t = 1.0)]
    tol_grad: f64,
    /// Monotonicity/dominance tolerance factor (error budget at the
    /// diameter reference scale)
    #[arg(long, default_value_t = 1e-6)]
    tol_mono: f64,
    /// Relative sign band for vertex values
    #[arg(long, default_value_t = 1e-4)]
    tol_vertex: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Injection {
    /// Corrupt the mesh before assembly (forces a solver failure)
    CorruptMesh,
    /// Plant a synthetic interior maximum in one scan cell
    InteriorMax,
}

#[derive(Args)]
struct SolveArgs {
    /// Triangle as `"x1,y1;x2,y2;x3,y3"`
    #[arg(long)]
    triangle: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Test hook: inject a synthetic failure
    #[arg(long, hide = true, value_enum)]
    inject: Option<Injection>,
}

#[derive(Args)]
struct ChainArgs {
    /// Triangle as `"x1,y1;x2,y2;x3,y3"`
    #[arg(long)]
    triangle: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Grid resolution per angle axis
    #[arg(long, default_value_t = 12)]
    grid: usize,
    #[command(flatten)]
    common: CommonArgs,
    /// Test hook: inject a synthetic anomaly into the first obtuse cell
    #[arg(long, hide = true, value_enum)]
    inject: Option<Injection>,
}

#[derive(Args)]
struct ContinuationArgs {
    /// Target triangle as `"x1,y1;x2,y2;x3,y3"` (the trace starts at the
    /// half-equilateral seed)
    #[arg(long)]
    triangle: String,
    /// Number of homotopy intervals
    #[arg(long, default_value_t = 32)]
    steps: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AnalyticArgs {
    /// Scan resolution for the F-scan
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Output file path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_levels(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `lo:hi`, got {s:?}"))?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("level {lo:?}: {e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("level {hi:?}: {e}"))?;
    Ok((lo, hi))
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| format!("seed {s:?} is not hex: {e}"))
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Chain(a) => cmd_chain(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Continuation(a) => cmd_continuation(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Selftest(a) => cmd_selftest(a),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("HOTSPOTS_LAB_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn build_config(command: &str, triangle: Option<&str>, c: &CommonArgs) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        triangle: triangle.map(|s| s.to_string()),
        levels: c.levels,
        order: c.order,
        grad_tol: c.tol_grad,
        mono_tol: c.tol_mono,
        vertex_tol: c.tol_vertex,
        jobs: resolve_jobs(c.jobs),
        seed: c.seed.unwrap_or(DEFAULT_SEED),
        out: c.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    }
}

fn invalid(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_CONFIG
}

fn solver_failed(err: &SolveError) -> i32 {
    eprintln!("solver failure: {err}");
    EXIT_SOLVER
}

fn write_file(path: &Path, contents: &str) -> Result<(), i32> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_CONFIG
    })
}

/// `solve_report.json` + `_nodal` → `solve_report_nodal.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    path.with_file_name(format!("{stem}{suffix}.csv"))
}

fn thread_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("worker pool")
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(a: SolveArgs) -> i32 {
    let config = build_config("solve", Some(&a.triangle), &a.common);
    if let Err(m) = config.validate() {
        return invalid(&m);
    }
    let tri = match parse_triangle(&a.triangle) {
        Ok(t) => t,
        Err(m) => return invalid(&m),
    };

    if a.inject == Some(Injection::CorruptMesh) {
        return match corrupted_solve(&tri, &config) {
            Err(e) => solver_failed(&e),
            Ok(()) => {
                eprintln!("error: corrupted-mesh injection did not fail the solver");
                EXIT_ANOMALY
            }
        };
    }

    let (battery, csvs) = match run_battery_full(&tri, &config, true) {
        Ok(pair) => pair,
        Err(e) => return solver_failed(&e),
    };
    let (nodal, gradient) = csvs.expect("csvs requested");

    let out = a
        .common
        .out
        .unwrap_or_else(|| PathBuf::from("solve_report.json"));
    if let Err(code) = write_file(&out, &render_json(&config, &battery)) {
        return code;
    }
    if let Err(code) = write_file(&sibling(&out, "_nodal"), &nodal) {
        return code;
    }
    if let Err(code) = write_file(&sibling(&out, "_gradient"), &gradient) {
        return code;
    }

    println!(
        "solve: mu2 = {:.9} ± {:.2e}, gap = {:.6}, census = {}, anomalies = {} -> {}",
        battery.mu2.value,
        battery.mu2.error_bar,
        battery.gap,
        battery.census.points.len(),
        battery.anomalies.len(),
        out.display()
    );
    for an in &battery.anomalies {
        eprintln!("anomaly: {an}");
    }
    if battery.anomalies.is_empty() {
        EXIT_OK
    } else {
        EXIT_ANOMALY
    }
}

/// Deliberate failure path: mesh the triangle, overwrite every node with
/// NaN, and push the garbage through assembly and the eigensolver, which
/// must reject it.
fn corrupted_solve(tri: &Triangle, config: &RunConfig) -> Result<(), SolveError> {
    let (canon, _) = canonicalize(tri)?;
    let mut mesh = uniform_mesh(&canon, config.levels.1, 2)?;
    for p in mesh.nodes.iter_mut() {
        *p = Point::new(f64::NAN, f64::NAN);
    }
    let sys = assemble(&mesh, DirichletSides::NEUMANN)?;
    let shift_scale = 0.5 * PI * PI / canon.diameter().powi(2);
    smallest_eigenpairs(&sys, 1, true, shift_scale, config.seed)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

fn cmd_chain(a: ChainArgs) -> i32 {
    let config = build_config("chain", Some(&a.triangle), &a.common);
    if let Err(m) = config.validate() {
        return invalid(&m);
    }
    let tri = match parse_triangle(&a.triangle) {
        Ok(t) => t,
        Err(m) => return invalid(&m),
    };
    let report = match chain(&tri, config.levels, config.order, config.seed) {
        Ok(r) => r,
        Err(e) => return solver_failed(&e),
    };
    let out = a
        .common
        .out
        .unwrap_or_else(|| PathBuf::from("chain_report.json"));
    if let Err(code) = write_file(&out, &render_json(&config, &report)) {
        return code;
    }
    let violated = report.violated_count > 0
        || report
            .entries
            .iter()
            .any(|e| e.cone_verdict == crate::eigensolve::ComparisonVerdict::Violated)
        || report
            .flat_neumann
            .iter()
            .any(|p| p.verdict == crate::eigensolve::ComparisonVerdict::Violated);
    println!(
        "chain: {} strict, {} inconclusive, {} violated -> {}",
        report.strict_count,
        report.inconclusive_count,
        report.violated_count,
        out.display()
    );
    if violated {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    }
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
struct ScanCell {
    i: usize,
    j: usize,
    beta: f64,
    gamma: f64,
    triangle: Triangle,
    angle_class: AngleClass,
    mu2: f64,
    mu2_error: f64,
    relative_gap: f64,
    census_count: usize,
    census_stable: bool,
    anomalies: Vec<String>,
    /// Set when the synthetic-injection test hook corrupted this cell.
    injected: bool,
    failed: Option<String>,
}

#[derive(Serialize)]
struct ScanBody {
    grid: usize,
    cells: Vec<ScanCell>,
    failed_cells: usize,
    anomalous_cells: usize,
}

/// Triangle with angles `alpha >= beta >= gamma` at `z1, z2, z3`,
/// canonically placed (unit shortest side on the x-axis).
fn triangle_from_angles(beta: f64, gamma: f64) -> Result<Triangle, String> {
    let alpha = PI - beta - gamma;
    let len_m = beta.sin() / gamma.sin();
    Triangle::new(
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(len_m * alpha.cos(), len_m * alpha.sin()),
    )
    .map_err(|e| e.to_string())
}

fn cmd_scan(a: ScanArgs) -> i32 {
    let mut config = build_config("scan", None, &a.common);
    config.grid = a.grid;
    if let Err(m) = config.validate() {
        return invalid(&m);
    }
    let n = config.grid;

    // Row-parameterized grid over the angle simplex gamma <= beta <= alpha:
    // gamma in (0, pi/3], beta in [gamma, (pi - gamma)/2], sampled at cell
    // midpoints with a margin keeping triangles non-degenerate.
    let gamma_lo = 0.15;
    let gamma_hi = PI / 3.0 - 1e-3;
    let mut params = Vec::with_capacity(n * n);
    for j in 0..n {
        let gamma = gamma_lo + (j as f64 + 0.5) * (gamma_hi - gamma_lo) / n as f64;
        let beta_hi = (PI - gamma) / 2.0 - 1e-3;
        for i in 0..n {
            let beta = gamma + (i as f64 + 0.5) * (beta_hi - gamma) / n as f64;
            params.push((i, j, beta, gamma));
        }
    }

    let pool = thread_pool(config.jobs);
    let cells: Vec<ScanCell> = pool.install(|| {
        use rayon::prelude::*;
        params
            .par_iter()
            .map(|&(i, j, beta, gamma)| scan_cell(i, j, beta, gamma, &config))
            .collect()
    });
    let mut cells = cells;

    if a.inject == Some(Injection::InteriorMax) {
        let target = cells
            .iter()
            .position(|c| c.angle_class == AngleClass::Obtuse && c.failed.is_none());
        match target {
            None => return invalid("injection requested but the scan has no obtuse cell"),
            Some(k) => {
                let tri = cells[k].triangle;
                match planted_interior_max_anomalies(&tri, &config) {
                    Ok(anoms) => {
                        cells[k].anomalies = anoms;
                        cells[k].injected = true;
                    }
                    Err(e) => return solver_failed(&e),
                }
            }
        }
    }

    let failed_cells = cells.iter().filter(|c| c.failed.is_some()).count();
    let anomalous_cells = cells.iter().filter(|c| !c.anomalies.is_empty()).count();
    let body = ScanBody {
        grid: n,
        cells,
        failed_cells,
        anomalous_cells,
    };
    let out = a
        .common
        .out
        .unwrap_or_else(|| PathBuf::from("scan_report.json"));
    if let Err(code) = write_file(&out, &render_json(&config, &body)) {
        return code;
    }
    println!(
        "scan: {} cells, {} failed, {} anomalous -> {}",
        body.cells.len(),
        failed_cells,
        anomalous_cells,
        out.display()
    );
    if failed_cells > 0 {
        EXIT_SOLVER
    } else if anomalous_cells > 0 {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    }
}

fn scan_cell(i: usize, j: usize, beta: f64, gamma: f64, config: &RunConfig) -> ScanCell {
    let mut cell = ScanCell {
        i,
        j,
        beta,
        gamma,
        triangle: Triangle::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 1.0),
        )
        .expect("placeholder triangle"),
        angle_class: AngleClass::Acute,
        mu2: f64::NAN,
        mu2_error: f64::NAN,
        relative_gap: f64::NAN,
        census_count: 0,
        census_stable: false,
        anomalies: Vec::new(),
        injected: false,
        failed: None,
    };
    let tri = match triangle_from_angles(beta, gamma) {
        Ok(t) => t,
        Err(m) => {
            cell.failed = Some(m);
            return cell;
        }
    };
    cell.triangle = tri;
    cell.angle_class = classify(&tri).angle_class;
    match run_battery(&tri, config) {
        Ok(b) => {
            cell.mu2 = b.mu2.value;
            cell.mu2_error = b.mu2.error_bar;
            cell.relative_gap = b.relative_gap;
            cell.census_count = b.census.points.len();
            cell.census_stable = b.census_stable;
            cell.anomalies = b.anomalies;
        }
        Err(e) => cell.failed = Some(e.to_string()),
    }
    cell
}

// ---------------------------------------------------------------------------
// continuation
// ---------------------------------------------------------------------------

fn cmd_continuation(a: ContinuationArgs) -> i32 {
    let mut config = build_config("continuation", Some(&a.triangle), &a.common);
    config.steps = a.steps;
    if let Err(m) = config.validate() {
        return invalid(&m);
    }
    let target = match parse_triangle(&a.triangle) {
        Ok(t) => t,
        Err(m) => return invalid(&m),
    };
    let seed = seed_field("half_equilateral").expect("built-in seed");

    let tc = TraceConfig {
        steps: config.steps,
        level: config.levels.1,
        order: config.order,
        seed: config.seed,
        sign_rel_tol: config.vertex_tol,
        parallel: config.jobs > 1,
        ..TraceConfig::default()
    };
    let pool = thread_pool(config.jobs);
    let report = pool.install(|| trace(&seed.triangle, &target, &tc));

    #[derive(Serialize)]
    struct RunLine<'a> {
        kind: &'static str,
        schema_version: u32,
        config: &'a RunConfig,
    }
    let mut text = serde_json::to_string(&RunLine {
        kind: "run",
        schema_version: crate::report::SCHEMA_VERSION,
        config: &config,
    })
    .expect("serializable");
    text.push('\n');
    text.push_str(&trace_jsonl(&report));

    let out = a
        .common
        .out
        .unwrap_or_else(|| PathBuf::from("continuation_trace.jsonl"));
    if let Err(code) = write_file(&out, &text) {
        return code;
    }
    let anomalous_steps = report
        .steps
        .iter()
        .filter(|s| !s.anomalies.is_empty())
        .count();
    println!(
        "continuation: {} steps, {} failed, {} anomalous, {} flags, {} census events -> {}",
        report.steps.len(),
        report.failed_steps,
        anomalous_steps,
        report.flags.len(),
        report.census_events.len(),
        out.display()
    );
    if report.failed_steps > 0 {
        EXIT_SOLVER
    } else if anomalous_steps > 0 {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    }
}

// ---------------------------------------------------------------------------
// analytic
// ---------------------------------------------------------------------------

fn cmd_analytic(a: AnalyticArgs) -> i32 {
    if a.grid < 8 {
        return invalid(&format!("grid must be at least 8, got {}", a.grid));
    }
    let config = RunConfig {
        command: "analytic".into(),
        grid: a.grid,
        out: a.out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    };
    let grid = ScanGrid {
        resolution: a.grid,
        ..ScanGrid::default()
    };
    let report = analytic_suite(&grid);
    let out = a.out.unwrap_or_else(|| PathBuf::from("analytic_report.json"));
    if let Err(code) = write_file(&out, &render_json(&config, &report)) {
        return code;
    }
    println!(
        "analytic: scan min = {:.6} at (beta, gamma) = ({:.4}, {:.4}), identities {}, pass = {} -> {}",
        report.scan.min,
        report.scan.argmin_beta,
        report.scan.argmin_gamma,
        if report.identities.pass { "ok" } else { "FAILED" },
        report.pass,
        out.display()
    );
    if report.pass {
        EXIT_OK
    } else {
        EXIT_ANOMALY
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SelftestCheck {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct SelftestBody {
    checks: Vec<SelftestCheck>,
    pass: bool,
}

fn cmd_selftest(a: SelftestArgs) -> i32 {
    let config = build_config("selftest", None, &a.common);
    if let Err(m) = config.validate() {
        return invalid(&m);
    }
    match selftest_checks(&config) {
        Err(e) => solver_failed(&e),
        Ok(checks) => {
            let pass = checks.iter().all(|c| c.pass);
            let body = SelftestBody { checks, pass };
            let out = a
                .common
                .out
                .unwrap_or_else(|| PathBuf::from("selftest_report.json"));
            if let Err(code) = write_file(&out, &render_json(&config, &body)) {
                return code;
            }
            for c in &body.checks {
                println!(
                    "selftest {}: {} ({})",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if pass {
                EXIT_OK
            } else {
                EXIT_ANOMALY
            }
        }
    }
}

fn selftest_checks(config: &RunConfig) -> Result<Vec<SelftestCheck>, SolveError> {
    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(SelftestCheck {
            name: name.to_string(),
            pass,
            detail,
        })
    };

    // Bessel zero against the 25-digit reference value.
    let j01 = crate::special::j0_first_zero();
    let j01_dev = (j01 - 2.404825557695772768621632).abs();
    push(
        "j0_first_zero",
        j01_dev < 1e-12,
        format!("dev = {j01_dev:.3e}"),
    );

    // Closed-form second Neumann eigenvalues.
    let he = seed_field("half_equilateral").expect("built-in seed");
    let ir = seed_field("isosceles_right").expect("built-in seed");
    for seed in [&he, &ir] {
        let est = estimate_eigenvalue(
            &seed.triangle,
            DirichletSides::NEUMANN,
            (4, 7),
            2,
            config.seed,
        )?;
        let rel = (est.value - seed.eigenvalue).abs() / seed.eigenvalue;
        push(
            &format!("mu2 closed form {:?}", seed.kind),
            rel < 1e-5,
            format!("value = {:.10}, target = {:.10}, rel dev = {rel:.3e}", est.value, seed.eigenvalue),
        );
    }

    // Mixed closed forms on the right isosceles triangle: Dirichlet on the
    // hypotenuse gives pi^2, all-Dirichlet gives 5 pi^2.
    let hyp = estimate_eigenvalue(
        &ir.triangle,
        DirichletSides::from_sides(&[crate::geometry::Side::Long]),
        (4, 7),
        2,
        config.seed,
    )?;
    let rel = (hyp.value - PI * PI).abs() / (PI * PI);
    push(
        "lambda1 dirichlet hypotenuse",
        rel < 1e-5,
        format!("value = {:.10}, rel dev = {rel:.3e}", hyp.value),
    );
    let full = estimate_eigenvalue(&ir.triangle, DirichletSides::ALL, (4, 7), 2, config.seed)?;
    let rel = (full.value - 5.0 * PI * PI).abs() / (5.0 * PI * PI);
    push(
        "lambda1 full dirichlet",
        rel < 1e-5,
        format!("value = {:.10}, rel dev = {rel:.3e}", full.value),
    );

    // Observed convergence orders on the half-equilateral.
    let p1 = estimate_eigenvalue(&he.triangle, DirichletSides::NEUMANN, (3, 7), 1, config.seed)?;
    let o1 = p1.observed_order.unwrap_or(f64::NAN);
    push(
        "mu2 convergence order P1",
        (o1 - 2.0).abs() <= 0.3,
        format!("observed order = {o1:.3}"),
    );
    let p2 = estimate_eigenvalue(&he.triangle, DirichletSides::NEUMANN, (3, 7), 2, config.seed)?;
    let o2 = p2.observed_order.unwrap_or(f64::NAN);
    push(
        "mu2 convergence order P2",
        (o2 - 4.0).abs() <= 0.5,
        format!("observed order = {o2:.3}"),
    );

    // Discrete-mode convergence to the closed forms.
    for seed in [&he, &ir] {
        let c1 = crate::continuation::seed_consistency(seed, (3, 6), 1)?;
        let o1 = *c1.mode_orders.last().unwrap();
        push(
            &format!("mode error order P1 {:?}", seed.kind),
            (1.5..=2.7).contains(&o1),
            format!("order = {o1:.3}, errors = {:?}", c1.mode_errors),
        );
        let c2 = crate::continuation::seed_consistency(seed, (3, 6), 2)?;
        let o2 = *c2.mode_orders.last().unwrap();
        push(
            &format!("mode error order P2 {:?}", seed.kind),
            (2.4..=4.2).contains(&o2),
            format!("order = {o2:.3}, errors = {:?}", c2.mode_errors),
        );
    }

    Ok(checks)
}

// ---------------------------------------------------------------------------
// Tests (pure parsing/plumbing; the binary contract lives in tests/cli.rs)
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_and_seed_parsers() {
        assert_eq!(parse_levels("4:7").unwrap(), (4, 7));
        assert!(parse_levels("4").is_err());
        assert!(parse_levels("a:b").is_err());
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed("ff").unwrap(), 255);
        assert!(parse_seed("zz").is_err());
    }

    #[test]
    fn sibling_paths_replace_extension() {
        let p = PathBuf::from("/tmp/x/solve_report.json");
        assert_eq!(
            sibling(&p, "_nodal"),
            PathBuf::from("/tmp/x/solve_report_nodal.csv")
        );
    }

    #[test]
    fn angle_grid_triangles_are_canonical() {
        let t = triangle_from_angles(0.9, 0.7).unwrap();
        let (c, _) = canonicalize(&t).unwrap();
        let d = (t.z3 - c.z3).norm() + (t.z2 - c.z2).norm() + (t.z1 - c.z1).norm();
        assert!(d < 1e-12, "constructed triangle should be canonical: {d}");
        let angles = t.angles();
        assert!((angles[1] - 0.9).abs() < 1e-12);
        assert!((angles[2] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn corrupted_solve_reports_an_error() {
        let tri = parse_triangle("0,0;1,0;0.45,1.1").unwrap();
        let config = RunConfig {
            levels: (3, 3),
            ..RunConfig::default()
        };
        assert!(corrupted_solve(&tri, &config).is_err());
    }
}
