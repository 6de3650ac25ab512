//! Command-line driver. Results go to stdout (JSON or CSV, byte-stable
//! for fixed inputs); progress and diagnostics go to stderr.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use rootsum_core::driver::{exponent_scan, solve_theorem2, ScanMode, ScanOutcome};
use rootsum_core::error::Error;
use rootsum_core::eval::{Dyadic, RoundDir};
use rootsum_core::greedy::{build_ladder, LadderEntry, LadderEntryJson};
use rootsum_core::pairs::{build_pair, default_v_schedule, theorem1_instance};
use rootsum_core::pigeonhole::{brute_min_dist, dirichlet_search};
use rootsum_core::ring::Basis;
use rootsum_core::series::{c_coeff, k_coeffs, p_coeffs};
use rootsum_core::Config;

#[derive(Parser)]
#[command(
    name = "rootsum",
    version,
    about = "Certified sums of square roots modulo one"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Cap on enumeration sizes (points held at once).
    #[arg(long, global = true, default_value_t = rootsum_core::DEFAULT_ENUM_CAP)]
    enum_cap: u64,
    /// Precision-escalation budget in bits.
    #[arg(long, global = true, default_value_t = rootsum_core::eval::DEFAULT_BIT_BUDGET)]
    bits: u32,
    /// Worker threads for enumerations (0 = library default).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where both apply.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Ladder cache directory (default: $ROOTSUM_CACHE_DIR or .rootsum-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the primes and squarefree products of a basis.
    BasisInfo {
        #[arg(long)]
        tau: u32,
    },
    /// Smallest-fraction witness of height <= n via sorted enumeration.
    Pigeonhole {
        #[arg(long)]
        tau: u32,
        #[arg(long)]
        n: u64,
    },
    /// Exact minimizer of the distance to the integers over the full box.
    MinGap {
        #[arg(long)]
        tau: u32,
        #[arg(long)]
        n: u64,
    },
    /// Build (and cache) ladder levels 1..=levels.
    Ladder {
        #[arg(long)]
        tau: u32,
        #[arg(long)]
        levels: u32,
    },
    /// Approximate alpha by k square roots of integers in [1, n].
    Approx {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
    },
    /// Error scan over an ascending n list, with a fitted slope.
    Scan {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "0")]
        alpha: String,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
    },
    /// Build an integer-radicand instance with fractional part ~ G0/n^k.
    Theorem1 {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        t_order: u32,
        #[arg(long, default_value = "1/4")]
        eps: String,
    },
    /// Certified scan of the k-instance over an n list.
    Theorem1Verify {
        #[arg(long)]
        k: u32,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
    },
    /// Print the exact coefficient tables used by the expansions.
    Series {
        #[arg(long)]
        probe: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    T1,
    T2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
        {
            eprintln!("rootsum: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let cfg = Config {
        enum_cap: cli.global.enum_cap,
        bit_budget: cli.global.bits,
    };
    match run(&cli, &cfg) {
        Ok(output) => {
            if let Some(path) = &cli.global.out {
                if let Err(e) = fs::write(path, output) {
                    eprintln!("rootsum: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{output}");
                let _ = std::io::stdout().flush();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rootsum: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 2,
        Error::PrecisionBudget { .. } => 3,
        Error::Usage(_)
        | Error::Parse(..)
        | Error::Range(_)
        | Error::TauOutOfRange(_)
        | Error::SignVectorLength { .. }
        | Error::BasisMismatch => 64,
        _ => 1,
    }
}

fn dec_lo(d: &Dyadic) -> String {
    d.to_decimal(12, RoundDir::Down)
}

fn dec_hi(d: &Dyadic) -> String {
    d.to_decimal(12, RoundDir::Up)
}

fn cache_dir(cli: &Cli) -> PathBuf {
    cli.global
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("ROOTSUM_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".rootsum-cache"))
}

/// Load cached entries, extend to the requested depth if needed, rewrite.
/// A changed enumeration cap can change witnesses, so it keys the file.
fn ladder_with_cache(
    cli: &Cli,
    tau: u32,
    levels: u32,
    cfg: &Config,
) -> rootsum_core::Result<Vec<LadderEntry>> {
    let dir = cache_dir(cli);
    let path = dir.join(format!("ladder-tau{}-cap{}.jsonl", tau, cfg.enum_cap));
    if let Ok(text) = fs::read_to_string(&path) {
        let mut entries = Vec::new();
        let mut ok = true;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<LadderEntryJson>(line)
                .map_err(|e| Error::Parse(line.into(), e.to_string()))
                .and_then(|js| LadderEntry::from_json(&js))
            {
                Ok(e) => entries.push(e),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && entries.len() >= levels as usize {
            entries.truncate(levels as usize);
            if !cli.global.quiet {
                eprintln!("ladder: {} levels from cache {}", levels, path.display());
            }
            return Ok(entries);
        }
    }
    let basis = Basis::new(tau)?;
    let entries = build_ladder(&basis, levels, cfg)?;
    if fs::create_dir_all(&dir).is_ok() {
        let mut text = String::new();
        for e in &entries {
            text.push_str(&serde_json::to_string(&e.to_json()).expect("serializable"));
            text.push('\n');
        }
        // write-then-rename so concurrent invocations never read a torn file
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        let result = fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            if !cli.global.quiet {
                eprintln!("ladder: cache write failed: {e}");
            }
        }
    }
    Ok(entries)
}

fn scan_csv(out: &ScanOutcome) -> String {
    let mut s = String::from("n,err_lo,err_hi,bound,slope_window\n");
    for r in &out.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            dec_lo(r.err.lo()),
            dec_hi(r.err.hi()),
            dec_hi(&r.bound),
            r.slope_window
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default()
        ));
    }
    s.push_str(&format!(
        "# slope={:.6} max_ratio={:.6}\n",
        out.slope, out.max_ratio
    ));
    s
}

fn scan_json(out: &ScanOutcome) -> String {
    let rows: Vec<serde_json::Value> = out
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "n": r.n,
                "err": r.err.encode(),
                "bound": r.bound.encode(),
                "slope_window": r.slope_window,
            })
        })
        .collect();
    let v = serde_json::json!({
        "rows": rows,
        "slope": out.slope,
        "max_ratio": out.max_ratio,
    });
    format!(
        "{}\n",
        serde_json::to_string_pretty(&v).expect("serializable")
    )
}

fn run(cli: &Cli, cfg: &Config) -> rootsum_core::Result<String> {
    macro_rules! progress {
        ($($arg:tt)*) => {
            if !cli.global.quiet {
                eprintln!($($arg)*);
            }
        };
    }
    match &cli.command {
        Command::BasisInfo { tau } => {
            let basis = Basis::new(*tau)?;
            let v = serde_json::json!({
                "tau": basis.tau(),
                "primes": basis.primes(),
                "products": basis.products(),
            });
            Ok(format!(
                "{}\n",
                serde_json::to_string(&v).expect("serializable")
            ))
        }
        Command::Pigeonhole { tau, n } => {
            let basis = Basis::new(*tau)?;
            progress!("pigeonhole: tau={tau} n={n}");
            let w = dirichlet_search(&basis, *n, cfg)?;
            let exponent = (basis.dim() - 1) as u32;
            let v = serde_json::json!({
                "w": w.w.to_json(),
                "dist": w.dist.encode(),
                "bound": format!("1/{}", pow_u64_str(*n, exponent)),
                "certified": true,
            });
            Ok(format!(
                "{}\n",
                serde_json::to_string(&v).expect("serializable")
            ))
        }
        Command::MinGap { tau, n } => {
            let basis = Basis::new(*tau)?;
            progress!("min-gap: tau={tau} n={n}");
            let (w, dist) = brute_min_dist(&basis, *n, cfg)?;
            let v = serde_json::json!({
                "w": w.to_json(),
                "dist": dist.encode(),
            });
            Ok(format!(
                "{}\n",
                serde_json::to_string(&v).expect("serializable")
            ))
        }
        Command::Ladder { tau, levels } => {
            let entries = ladder_with_cache(cli, *tau, *levels, cfg)?;
            let mut s = String::new();
            for e in &entries {
                s.push_str(&serde_json::to_string(&e.to_json()).expect("serializable"));
                s.push('\n');
            }
            Ok(s)
        }
        Command::Approx { k, alpha, n } => {
            progress!("approx: k={k} alpha={alpha} n={n}");
            let a = solve_theorem2(*k, alpha, *n, cfg)?;
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&a.to_json()).expect("serializable")
            ))
        }
        Command::Scan {
            mode,
            k,
            alpha,
            n_list,
        } => {
            let mode = match mode {
                Mode::T1 => ScanMode::Theorem1,
                Mode::T2 => ScanMode::Theorem2,
            };
            progress!("scan: k={k} alpha={alpha} points={}", n_list.len());
            let out = exponent_scan(mode, *k, alpha, n_list, cfg)?;
            Ok(match cli.global.format {
                Format::Csv => scan_csv(&out),
                Format::Json => scan_json(&out),
            })
        }
        Command::Theorem1 { k, t_order, eps } => {
            let eps: BigRational = eps
                .parse()
                .map_err(|e| Error::Parse(eps.clone(), format!("{e}")))?;
            progress!("theorem1: k={k} T={t_order} eps={eps}");
            let cert = build_pair(*k, *t_order, &eps, &default_v_schedule())?;
            let inst = theorem1_instance(*k, &cert, None)?;
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&inst.to_json()).expect("serializable")
            ))
        }
        Command::Theorem1Verify { k, n_list } => {
            progress!("theorem1-verify: k={k} points={}", n_list.len());
            let out =
                rootsum_core::driver::exponent_scan(ScanMode::Theorem1, *k, "0", n_list, cfg)?;
            match cli.global.format {
                Format::Json => Ok(scan_json(&out)),
                Format::Csv => {
                    let mut s = String::from("n,err_lo,err_hi,nk_times_err\n");
                    for r in &out.rows {
                        let nk_err =
                            (r.err.midpoint().ln_f64() + (*k as f64) * (r.n as f64).ln()).exp();
                        s.push_str(&format!(
                            "{},{},{},{:.6}\n",
                            r.n,
                            dec_lo(r.err.lo()),
                            dec_hi(r.err.hi()),
                            nk_err
                        ));
                    }
                    s.push_str(&format!("# slope={:.6}\n", out.slope));
                    Ok(s)
                }
            }
        }
        Command::Series { probe } => {
            if !*probe {
                return Err(Error::Usage("series requires --probe".into()));
            }
            let mut s = String::new();
            s.push_str("# K(j,t): expansion of the j-th difference of 1/n\n");
            for j in 1..=6u32 {
                let ks = k_coeffs(j, 6);
                let row: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                s.push_str(&format!("K({j},0..6) = [{}]\n", row.join(", ")));
            }
            s.push_str("# C_w: Taylor coefficients of sqrt(1+x)\n");
            let cs: Vec<String> = (0..=8u32).map(|w| c_coeff(w).to_string()).collect();
            s.push_str(&format!("C(0..8) = [{}]\n", cs.join(", ")));
            s.push_str("# P(t,d,q): recentering of 1/(n+d)^t\n");
            for t in 1..=3u32 {
                for d in [-2i64, -1, 1, 2] {
                    let ps = p_coeffs(t, d, 4);
                    let row: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                    s.push_str(&format!("P({t},{d},0..4) = [{}]\n", row.join(", ")));
                }
            }
            Ok(s)
        }
    }
}

fn pow_u64_str(n: u64, e: u32) -> String {
    let mut acc = num_rational::BigRational::from_integer(1.into());
    for _ in 0..e {
        acc *= num_rational::BigRational::from_integer(n.into());
    }
    acc.to_string()
}
