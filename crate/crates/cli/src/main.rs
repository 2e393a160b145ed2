use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use framepot::frame::{frame_energy, gram_of, validate_rank, Exponent, RANK_TOL};
use framepot::io::{self, fmt_sig17, RunManifest};
use framepot::minimizer::{conjecture_scan, minimize_energy, MinimizeOptions, ScanTable};
use framepot::relaxation::check_bound;
use framepot::theorem::verify_theorem;
use framepot::transition::{
    agreeing_digits, circle_transition, reference_alpha, reference_p, solve_transition, subthreshold_witness,
    REFERENCE_ALPHA, REFERENCE_P, REFERENCE_P_SEVEN,
};
use framepot::Error;

/// Largest m accepted by `verify-theorem`.
const MAX_M: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "framepot", version, about = "p-frame potentials of unit-vector configurations")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write machine-readable output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy, size and numerical rank of a configuration file.
    Energy {
        config: PathBuf,
        #[arg(long)]
        p: f64,
        /// Also export the Gram matrix as CSV.
        #[arg(long)]
        gram_csv: Option<PathBuf>,
    },
    /// Compare the energy with the simplex relaxation lower bound.
    Bound {
        config: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Check every numerical step of the lower bound 2m for N = d + m.
    VerifyTheorem {
        #[arg(long)]
        m: usize,
        /// Run at this exponent instead of p0(m); dips are then reported, not failed.
        #[arg(long)]
        p_override: Option<f64>,
    },
    /// Transition exponent for five (or seven) points on the circle.
    Transition {
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Also produce a configuration with energy 8 - 2 epsilon (n = 5).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Bisection tolerance on p (n = 7).
        #[arg(long, default_value_t = 1e-4)]
        precision: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Random-restart minimization of the energy.
    Minimize {
        #[arg(long)]
        d: usize,
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Threshold estimates for N = m + k d as CSV.
    Scan {
        #[arg(long, value_delimiter = ',', required = true)]
        d_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iterations: usize,
}

impl SearchArgs {
    fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            ..MinimizeOptions::default()
        }
        .with_seed(self.seed)
    }
}

/// A run that completed but whose check did not hold.
const EXIT_CHECK_FAILED: u8 = 1;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) => 2,
        Error::Empty
        | Error::DimensionMismatch { .. }
        | Error::NonUnitVector { .. }
        | Error::InvalidGram(_)
        | Error::Domain(_) => 3,
        Error::Precondition(_) | Error::Infeasible(_) => 4,
        Error::Solver(_) | Error::StructureViolation(_) => 5,
    }
}

struct Output {
    body: String,
    ok: bool,
}

fn doc<T: Serialize>(manifest: &RunManifest, result: &T, ok: bool) -> Result<Output, Error> {
    Ok(Output {
        body: io::document_json(manifest, result)?,
        ok,
    })
}

fn run(cmd: &Command) -> Result<Output, Error> {
    match cmd {
        Command::Energy { config, p, gram_csv } => {
            let manifest = RunManifest::new("energy", json!({"config": config, "p": p}), None);
            let cfg = io::read_config(config)?;
            let gram = gram_of(&cfg);
            let energy = frame_energy(&gram, Exponent::new(*p)?);
            let rank = validate_rank(&gram, cfg.dim(), RANK_TOL);
            if let Some(path) = gram_csv {
                io::write_gram_csv(&gram, std::fs::File::create(path)?)?;
            }
            eprintln!("E_p = {}  (N = {}, d = {}, rank = {})", fmt_sig17(energy), cfg.len(), cfg.dim(), rank.rank);
            let result = json!({
                "energy": energy,
                "n": cfg.len(),
                "d": cfg.dim(),
                "rank": rank.rank,
                "singular_values": rank.singular_values,
                "sorted_off_diagonal_abs": gram.sorted_off_diagonal_abs(),
            });
            doc(&manifest, &result, true)
        }
        Command::Bound { config, p } => {
            let manifest = RunManifest::new("bound", json!({"config": config, "p": p}), None);
            let cfg = io::read_config(config)?;
            let report = check_bound(&gram_of(&cfg), cfg.dim(), *p)?;
            eprintln!(
                "E_p = {}  M = {}  slack = {}",
                fmt_sig17(report.energy),
                fmt_sig17(report.relaxation),
                fmt_sig17(report.slack)
            );
            doc(&manifest, &report, report.pass)
        }
        Command::VerifyTheorem { m, p_override } => {
            let manifest = RunManifest::new("verify-theorem", json!({"m": m, "p_override": p_override}), None);
            if !(1..=MAX_M).contains(m) {
                return Err(Error::Domain(format!("m must lie in [1, {MAX_M}], got {m}")));
            }
            let report = verify_theorem(*m, *p_override)?;
            match report.first_failure() {
                Some(f) if !report.exploratory => eprintln!(
                    "FAIL m={} j={:?} x={:?} {}: {}",
                    f.m, f.j, f.x, f.check, f.detail
                ),
                _ if report.exploratory => eprintln!(
                    "exploratory run at p={}: {} interval(s) dip below 2m",
                    report.p,
                    report.dips.len()
                ),
                _ => eprintln!("pass m={m} p0={}", fmt_sig17(report.p0)),
            }
            let ok = report.pass || report.exploratory;
            doc(&manifest, &report, ok)
        }
        Command::Transition {
            n,
            epsilon,
            precision,
            search,
        } => {
            let manifest = RunManifest::new(
                "transition",
                json!({"n": n, "epsilon": epsilon, "precision": precision, "search": search_json(search, *n == 7)}),
                (*n == 7).then_some(search.seed),
            );
            match n {
                5 => {
                    let sol = solve_transition()?;
                    let witness = epsilon.map(subthreshold_witness).transpose()?;
                    let comparison = json!({
                        "alpha": {"computed": fmt_sig17(sol.alpha_star), "reference": REFERENCE_ALPHA,
                                  "agreeing_digits": agreeing_digits(sol.alpha_star, reference_alpha())},
                        "p": {"computed": fmt_sig17(sol.p_star), "reference": REFERENCE_P,
                              "agreeing_digits": agreeing_digits(sol.p_star, reference_p())},
                    });
                    eprintln!("alpha  computed {}  reference {REFERENCE_ALPHA}", fmt_sig17(sol.alpha_star));
                    eprintln!("p      computed {}  reference {REFERENCE_P}", fmt_sig17(sol.p_star));
                    let result = json!({"solution": sol, "comparison": comparison, "witness": witness});
                    doc(&manifest, &result, true)
                }
                7 => {
                    let est = circle_transition(7, *precision, &search.options())?;
                    eprintln!(
                        "p estimate {}  bracket [{}, {}]  reference {REFERENCE_P_SEVEN}",
                        fmt_sig17(est.estimate),
                        fmt_sig17(est.bracket.0),
                        fmt_sig17(est.bracket.1)
                    );
                    let result = json!({"estimate": est, "reference": REFERENCE_P_SEVEN});
                    doc(&manifest, &result, true)
                }
                _ => Err(Error::Domain(format!("--n must be 5 or 7, got {n}"))),
            }
        }
        Command::Minimize { d, n, p, search } => {
            let manifest = RunManifest::new(
                "minimize",
                json!({"d": d, "n": n, "p": p, "search": search_json(search, true)}),
                Some(search.seed),
            );
            let report = minimize_energy(*d, *n, *p, &search.options())?;
            eprintln!("best energy {} (restart {})", fmt_sig17(report.best_energy), report.best_restart);
            doc(&manifest, &report.summary(*p), true)
        }
        Command::Scan {
            d_list,
            k_list,
            m_list,
            tol,
            search,
        } => {
            let manifest = RunManifest::new(
                "scan",
                json!({"d_list": d_list, "k_list": k_list, "m_list": m_list, "tol": tol,
                       "search": search_json(search, true)}),
                Some(search.seed),
            );
            let table = conjecture_scan(d_list, k_list, m_list, *tol, &search.options())?;
            for s in &table.skipped {
                eprintln!("warning: skipped {s}");
            }
            for r in &table.rows {
                if let Some(e) = &r.error {
                    eprintln!("warning: (d={}, k={}, m={}): {e}", r.d, r.k, r.m);
                }
            }
            Ok(Output {
                body: scan_csv(&manifest, &table)?,
                ok: true,
            })
        }
    }
}

fn search_json(s: &SearchArgs, used: bool) -> serde_json::Value {
    if used {
        json!({"restarts": s.restarts, "seed": s.seed, "max_iterations": s.max_iterations})
    } else {
        serde_json::Value::Null
    }
}

const SCAN_COLUMNS: &str = "d,k,m,N,p_lo,p_hi,p_estimate,ortho_value,best_energy_at_p_hi,restarts,seed";

fn scan_csv(manifest: &RunManifest, table: &ScanTable) -> Result<String, Error> {
    let opt = |x: Option<f64>| x.map(fmt_sig17).unwrap_or_default();
    let mut out = manifest.csv_header()?;
    out.push_str(SCAN_COLUMNS);
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.d,
            r.k,
            r.m,
            r.n,
            fmt_sig17(r.p_lo),
            fmt_sig17(r.p_hi),
            opt(r.p_estimate),
            fmt_sig17(r.ortho_value),
            opt(r.best_energy_at_p_hi),
            r.restarts,
            r.seed
        ));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(3);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let start = Instant::now();
    let result = run(&cli.command).and_then(|out| {
        match &cli.out {
            Some(path) => std::fs::write(path, &out.body)?,
            None => print!("{}", out.body),
        }
        Ok(out.ok)
    });
    // duration goes to stderr so output files stay byte-identical across reruns
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
