//! Subcommand surface: parse flags, dispatch to the core, write outputs and
//! manifests, and map outcomes to exit codes (0 = all checks passed, 1 =
//! a contracted check failed or a computation error, 2 = usage error).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fraclap_core::closedform::ClosedForm;
use fraclap_core::fracop::FracParams;
use fraclap_core::geometry::Domain;
use fraclap_core::harness::{estimate_index, second_difference_profile, sweep_row, SweepRow};
use fraclap_core::solver1d::{solve_dirichlet, Mesh};

use crate::formats::{
    kprofile_csv, profile_csv, rates_csv, ratio_csv, sweep_csv, to_json_bytes, GridFunctionJson,
    Meta, SolveReportJson,
};
use crate::manifest::{Manifest, DEFAULT_SEED};
use crate::parse::{effective_threads, parse_domain, parse_values};
use crate::suites::{run_suite, Suite};

#[derive(Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Fractional-Laplacian Dirichlet solves and smoothness measurements",
    disable_help_subcommand = true
)]
struct Cli {
    /// Worker threads for independent rows (or set FRACLAP_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve (-Δ)^s u = f with zero exterior condition on an interval union.
    Solve {
        /// Operator order s in [0.05, 0.95].
        #[arg(long)]
        s: f64,
        /// Domain as `a,b` or `a,b;c,d` interval lists.
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        /// Right-hand side descriptor, e.g. `const:1`, `poly:0,1`, `bump`.
        #[arg(long)]
        f: String,
        /// Mesh cells per interval.
        #[arg(long)]
        n: usize,
        /// Output path for the solution JSON; the solve report and manifest
        /// are written beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure second-difference moduli of a stored solution and fit the
    /// smoothness index.
    Analyze {
        /// Solution JSON produced by `solve` (or compatible).
        #[arg(long)]
        input: PathBuf,
        /// Indices to classify, as `lo:hi:step` or a comma list.
        #[arg(long)]
        sigma: String,
        /// Output path for the rate CSV; the modulus profile CSV and
        /// manifest are written beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named identity/bound suite and print its pass/fail table.
    Verify {
        /// One of: getoor, cone-identity, marchaud, k-functional,
        /// equivalence, all.
        #[arg(long)]
        suite: String,
        /// Orders for the explicit-solution checks (comma list).
        #[arg(long, default_value = "0.25,0.5,0.75")]
        s: String,
        /// Tolerance for the explicit-solution identity.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Optional CSV output for the table (manifest written beside it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve across a grid of orders s and report measured vs predicted
    /// smoothness indices.
    Sweep {
        /// Orders as `lo:hi:step` or a comma list, within [0.05, 0.95].
        #[arg(long)]
        s: String,
        /// Domain as `a,b` or `a,b;c,d` interval lists.
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        /// Right-hand side descriptor.
        #[arg(long)]
        f: String,
        /// Mesh cells per interval for every solve.
        #[arg(long)]
        n: usize,
        /// Output path for the sweep CSV (manifest written beside it).
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn check<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Check(e.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Entry point shared by the binary and the integration tests.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads;
    let outcome = match cli.command {
        Command::Solve { s, domain, f, n, out } => cmd_solve(s, &domain, &f, n, &out),
        Command::Analyze { input, sigma, out } => cmd_analyze(&input, &sigma, &out),
        Command::Verify { suite, s, tol, out } => cmd_verify(&suite, &s, tol, out.as_deref()),
        Command::Sweep { s, domain, f, n, out } => cmd_sweep(&s, &domain, &f, n, &out, threads),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(m)) => {
            eprintln!("fraclap: {m}");
            2
        }
        Err(Failure::Check(m)) => {
            eprintln!("fraclap: {m}");
            1
        }
    }
}

fn cmd_solve(s: f64, domain: &str, f: &str, n: usize, out: &Path) -> Result<bool, Failure> {
    let dom = parse_domain(domain).map_err(Failure::Usage)?;
    let data = ClosedForm::parse(f).map_err(usage)?;
    let params = FracParams::new(1, s).map_err(usage)?;
    let mesh = Mesh::uniform(&dom, n).map_err(usage)?;

    let (u, report) = solve_dirichlet(&mesh, &data, &params).map_err(check)?;

    let meta = Meta {
        zero_extended: true,
        f: Some(data.descriptor()),
        s: Some(s),
        cells: Some(n),
    };
    let solution = GridFunctionJson::from_core(&u, meta);
    let report_path = out.with_extension("report.json");

    let mut manifest = Manifest::new(
        "solve",
        serde_json::json!({"s": s, "domain": domain, "f": data.descriptor(), "n": n}),
    );
    manifest.record_output(out);
    manifest.record_output(&report_path);

    write_file(out, &to_json_bytes(&solution))?;
    write_file(&report_path, &to_json_bytes(&SolveReportJson::from_core(&report)))?;
    let mpath = manifest
        .write_beside(out)
        .map_err(|e| Failure::Usage(format!("cannot write manifest: {e}")))?;

    println!(
        "wrote {} {} {}",
        out.display(),
        report_path.display(),
        mpath.display()
    );
    println!(
        "n={n} s={s} energy={} l2={} stability_gap={}",
        report.energy, report.l2, report.stability_gap
    );
    Ok(true)
}

fn cmd_analyze(input: &Path, sigma: &str, out: &Path) -> Result<bool, Failure> {
    let sigmas = parse_values(sigma).map_err(Failure::Usage)?;
    let bytes = std::fs::read(input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
    let stored: GridFunctionJson = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Usage(format!("{} is not a solution JSON: {e}", input.display())))?;
    let v = stored.to_core().map_err(Failure::Usage)?;

    let profile = second_difference_profile(&v).map_err(check)?;
    let estimate = estimate_index(&profile).map_err(check)?;

    let profile_path = out.with_extension("profile.csv");
    let mut manifest = Manifest::new(
        "analyze",
        serde_json::json!({"input": input.display().to_string(), "sigma": sigma}),
    );
    manifest.record_output(out);
    manifest.record_output(&profile_path);

    write_file(out, rates_csv(&estimate, &sigmas).as_bytes())?;
    write_file(&profile_path, profile_csv(&profile).as_bytes())?;
    let mpath = manifest
        .write_beside(out)
        .map_err(|e| Failure::Usage(format!("cannot write manifest: {e}")))?;

    println!(
        "wrote {} {} {}",
        out.display(),
        profile_path.display(),
        mpath.display()
    );
    println!(
        "sigma_star={} ci=[{},{}] r2={}",
        estimate.sigma_star, estimate.slope_ci.0, estimate.slope_ci.1, estimate.r2
    );
    Ok(true)
}

fn cmd_verify(suite: &str, s: &str, tol: f64, out: Option<&Path>) -> Result<bool, Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown suite `{suite}`; expected getoor, cone-identity, marchaud, k-functional, equivalence, or all"
            ))
        })?]
    };
    let s_values = parse_values(s).map_err(Failure::Usage)?;

    let mut all_rows = Vec::new();
    let mut kprofile = None;
    let mut pass = true;
    for sel in &suites {
        let report = run_suite(*sel, &s_values, tol, DEFAULT_SEED).map_err(Failure::Check)?;
        println!("suite: {} (tol {tol})", sel.name());
        println!("{:<42} {:>13} {:>13} {:>10} status", "name", "lhs", "rhs", "ratio");
        for r in &report.rows {
            println!(
                "{:<42} {:>13.6e} {:>13.6e} {:>10.4} {}",
                r.name,
                r.lhs,
                r.rhs,
                r.ratio,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let ok = report.all_pass();
        println!(
            "result: {} ({}/{} checks)",
            if ok { "PASS" } else { "FAIL" },
            report.rows.iter().filter(|r| r.pass).count(),
            report.rows.len()
        );
        pass &= ok;
        if report.kprofile.is_some() {
            kprofile = report.kprofile.clone();
        }
        all_rows.extend(report.rows);
    }

    if let Some(out) = out {
        let mut manifest = Manifest::new(
            "verify",
            serde_json::json!({"suite": suite, "s": s, "tol": tol}),
        );
        manifest.record_output(out);
        write_file(out, ratio_csv(&all_rows).as_bytes())?;
        if let Some(kp) = &kprofile {
            let kpath = out.with_extension("kprofile.csv");
            manifest.record_output(&kpath);
            write_file(&kpath, kprofile_csv(kp).as_bytes())?;
        }
        manifest
            .write_beside(out)
            .map_err(|e| Failure::Usage(format!("cannot write manifest: {e}")))?;
    }
    Ok(pass)
}

fn cmd_sweep(
    s: &str,
    domain: &str,
    f: &str,
    n: usize,
    out: &Path,
    threads: Option<usize>,
) -> Result<bool, Failure> {
    let s_values = parse_values(s).map_err(Failure::Usage)?;
    let dom = parse_domain(domain).map_err(Failure::Usage)?;
    let data = ClosedForm::parse(f).map_err(usage)?;
    let workers = effective_threads(threads).map_err(Failure::Usage)?;

    let mut rows = parallel_sweep(&dom, &s_values, n, &data, workers);
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite orders"));

    let mut ok_rows: Vec<SweepRow> = Vec::new();
    let mut errors = Vec::new();
    for (sv, outcome) in rows {
        match outcome {
            Ok(row) => ok_rows.push(row),
            Err(e) => errors.push(format!("s={sv}: {e}")),
        }
    }
    for e in &errors {
        eprintln!("fraclap: sweep row failed: {e}");
    }

    let mut manifest = Manifest::new(
        "sweep",
        serde_json::json!({
            "s": s, "domain": domain, "f": data.descriptor(), "n": n, "threads": workers
        }),
    );
    manifest.record_output(out);
    manifest.errors = errors.clone();
    write_file(out, sweep_csv(&ok_rows).as_bytes())?;
    let mpath = manifest
        .write_beside(out)
        .map_err(|e| Failure::Usage(format!("cannot write manifest: {e}")))?;

    println!("wrote {} {}", out.display(), mpath.display());
    println!("rows={} errors={}", ok_rows.len(), errors.len());
    Ok(errors.is_empty())
}

type RowResult = (f64, fraclap_core::Result<SweepRow>);

/// Runs sweep rows on up to `workers` threads; results keep input order
/// before the caller's sort, so the output is identical for any thread
/// count.
fn parallel_sweep(
    dom: &Domain,
    s_values: &[f64],
    cells: usize,
    data: &ClosedForm,
    workers: usize,
) -> Vec<RowResult> {
    if workers <= 1 || s_values.len() <= 1 {
        return s_values
            .iter()
            .map(|&sv| (sv, sweep_row(dom, sv, cells, data)))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RowResult>>> = Mutex::new(vec![None; s_values.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(s_values.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= s_values.len() {
                    break;
                }
                let sv = s_values[i];
                let result = (sv, sweep_row(dom, sv, cells, data));
                slots.lock().expect("no poisoned workers")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect()
}
