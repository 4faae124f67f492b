//! `smoothprog` command-line driver.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 capacity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use smoothprog::charsum::{b_profile, char_sum, compute_thresholds, l_bound_compare, polya_vinogradov, SumQuery};
use smoothprog::harness::{discrepancy, label_ranges, run, ExperimentConfig};
use smoothprog::lfunc::checkers::{deuring_heilbronn_check, density_count_check, theorem1_constants, zero_free_region_check};
use smoothprog::lfunc::zeros::ZERO_CSV_HEADER;
use smoothprog::lfunc::{classify, scan_zeros, Rect, ScanOptions};
use smoothprog::saddle::solve_alpha;
use smoothprog::{CharacterGroup, DirichletCharacter, Error, Result, SmoothTable};

/// `println!` that exits quietly when the reader has closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

#[derive(Parser)]
#[command(name = "smoothprog", version, about = "Smooth numbers in arithmetic progressions: counts, saddle points, L-function zeros")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count smooth numbers: Ψ(x,y), Ψ_q(x,y) or Ψ(x,y;q,a).
    Sieve {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        a: Option<u64>,
        /// Also write the largest-prime-factor table to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Saddle point α(x,y), L(α,χ₀;y) and E_q(x,y).
    Alpha {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value_t = 1)]
        q: u64,
    },
    /// Dickman ρ at the given points.
    Rho {
        #[arg(required = true)]
        u: Vec<f64>,
    },
    /// Characters modulo q with order, conductor and parity.
    Chars {
        #[arg(long)]
        q: u64,
    },
    /// Zeros of L(s,χ) in [sigma_lo, sigma_hi] × [-t_max, t_max].
    Lzeros {
        /// Character label `q:e1,...,ek`; `1:` is ζ.
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 0.0)]
        sigma_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_hi: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
    },
    /// Ξ_q(k) indices and the problem set 𝒜.
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long = "A")]
        a: f64,
        #[arg(long = "D")]
        d: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
    },
    /// Zero-free region, repulsion and density checks for modulus q.
    Checkers {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0.1)]
        c1: f64,
        #[arg(long, default_value_t = 0.1)]
        c2: f64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long = "C1", default_value_t = 1.0)]
        big_c1: f64,
        #[arg(long = "C2", default_value_t = 1.0)]
        big_c2: f64,
        #[arg(long = "A", default_value_t = 6.594885082800512)]
        a: f64,
        #[arg(long = "D", default_value_t = 10.0)]
        d: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
    },
    /// Σ_{N<n≤M} χ(n) n^{-σ-it}, or the Pólya–Vinogradov comparison with --pv.
    Charsum {
        #[arg(long)]
        chi: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Largest interval sum over all primitive characters mod this q.
        #[arg(long)]
        pv: Option<u64>,
        /// Compare |L(s, χ)| with η⁻¹ q♭^η near σ = 1 instead of summing.
        #[arg(long)]
        lbound: bool,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        c3: f64,
        #[arg(long, default_value_t = 1000.0)]
        e0: f64,
        #[arg(long, default_value_t = 0.0)]
        c4: f64,
    },
    /// Discrepancy Δ for one (x, y, q) with range labels.
    Equidist {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        q: u64,
        #[arg(long = "A", default_value_t = 6.594885082800512)]
        a: f64,
        #[arg(long = "D", default_value_t = 10.0)]
        d: f64,
    },
    /// k₀, Q_A and, given q, the thresholds q♭, η, ξ.
    Constants {
        #[arg(long = "A")]
        a: f64,
        #[arg(long = "D")]
        d: f64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        c3: f64,
        #[arg(long, default_value_t = 1000.0)]
        e0: f64,
        #[arg(long, default_value_t = 0.0)]
        c4: f64,
    },
    /// Run the experiments of a JSON config and write the output bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    out!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn table_for(x: f64) -> Result<SmoothTable> {
    SmoothTable::build(x.max(1.0).floor() as u64)
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Sieve { x, y, q, a, dump } => {
            let table = table_for(x)?;
            let count = match (q, a) {
                (None, None) => table.psi(x, y)?,
                (Some(q), None) => table.psi_coprime(x, y, q)?,
                (Some(q), Some(a)) => table.psi_progression(x, y, q, a)?,
                (None, Some(_)) => return Err(Error::Config("--a needs --q".into())),
            };
            if let Some(path) = dump {
                table.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))?;
            }
            out!("{count}");
        }
        Command::Alpha { x, y, q } => print_json(&solve_alpha(x, y, q)?)?,
        Command::Rho { u } => {
            let u_max = u.iter().cloned().fold(1.0, f64::max);
            let mut grid = smoothprog::RhoGrid64::new(u_max);
            out!("u,rho");
            for v in u {
                out!("{:.16e},{:.16e}", v, grid.value(v));
            }
        }
        Command::Chars { q } => {
            if q == 0 {
                return Err(Error::Config("q must be positive".into()));
            }
            out!("label,order,conductor,primitive,real,parity");
            for chi in CharacterGroup::new(q).characters() {
                let parity = if chi.is_odd() { "odd" } else { "even" };
                out!("{},{},{},{},{},{}", chi.label(), chi.order(), chi.conductor().conductor, chi.is_primitive(), chi.is_real(), parity);
            }
        }
        Command::Lzeros { chi, sigma_lo, sigma_hi, t_max } => {
            let chi = DirichletCharacter::from_label(&chi)?;
            let report = scan_zeros(&chi, &Rect::new(sigma_lo, sigma_hi, -t_max, t_max), &ScanOptions::default())?;
            out!("{ZERO_CSV_HEADER}");
            for z in &report.zeros {
                out!("{}", z.csv_row());
            }
            eprintln!("total winding {}, certified {}, indeterminate boxes {}", report.total.map_or("unknown".to_string(), |n| n.to_string()), report.certificate(), report.indeterminate.len());
            if !report.is_complete() {
                return Ok(3);
            }
        }
        Command::Classify { q, a, d, t_max } => print_json(&classify(q, a, d, t_max, &ScanOptions::default())?)?,
        Command::Checkers { q, c1, c2, eps, big_c1, big_c2, a, d, t_max } => {
            let opts = ScanOptions::default();
            out!("{}", zero_free_region_check(q, c1, t_max, &opts)?.to_json_line());
            out!("{}", deuring_heilbronn_check(q, eps, c2, t_max, &opts)?.to_json_line());
            let c = classify(q, a, d, t_max, &opts)?;
            out!("{}", density_count_check(&c, big_c1, big_c2).to_json_line());
        }
        Command::Charsum { chi, n, m, t, sigma, pv, lbound, nu, tau, c3, e0, c4 } => match (chi, pv) {
            (_, Some(q)) => print_json(&polya_vinogradov(q))?,
            (Some(label), None) if lbound => {
                let chi = DirichletCharacter::from_label(&label)?;
                let q = chi.modulus();
                let params = compute_thresholds(q, nu, tau, c3, e0)?.with_c4(c4);
                let t_top = (3.0 * (q as f64).powf(tau)).min(1000.0);
                let mut grid = Vec::new();
                for &t in &[0.0, 1.0, 0.5 * t_top, t_top] {
                    let eta = params.eta_at(t);
                    for sigma in [1.0 - 0.5 * eta, 1.0, 1.5, 2.0] {
                        grid.push((sigma, t));
                    }
                }
                print_json(&l_bound_compare(&chi, &grid, &params)?)?;
            }
            (Some(label), None) => {
                let chi = DirichletCharacter::from_label(&label)?;
                let v = char_sum(&SumQuery { chi, n, m, t, sigma })?;
                print_json(&json!({ "re": v.re, "im": v.im, "abs": v.norm() }))?;
            }
            (None, None) => return Err(Error::Config("charsum needs --chi or --pv".into())),
        },
        Command::Equidist { x, y, q, a, d } => {
            let r = discrepancy(&table_for(x)?, x, y, q)?;
            print_json(&json!({ "report": r, "labels": label_ranges(x, y, q, a, d) }))?;
        }
        Command::Constants { a, d, q, nu, tau, c3, e0, c4 } => {
            let t1 = theorem1_constants(a, d)?;
            let thresholds = q.map(|q| compute_thresholds(q, nu, tau, c3, e0).map(|p| p.with_c4(c4))).transpose()?;
            let profile = match &thresholds {
                Some(p) => {
                    let top = (2.0 * p.xi * p.xi / (4.0 * p.eta * p.eta)).max(4.0);
                    let grid: Vec<f64> = (1..=200).map(|i| (top * i as f64 / 200.0).exp()).collect();
                    let b = b_profile(&grid, p.eta, p.xi)?;
                    Some(json!({
                        "log_n_star": b.log_n_star,
                        "log_omega_first_form": b.log_omega_first_form,
                        "log_omega_second_form": b.log_omega_second_form,
                        "discrepancy_factor": b.discrepancy_factor,
                        "decreasing_below_star": b.decreasing_below_star,
                        "sign_change": b.sign_change,
                    }))
                }
                None => None,
            };
            print_json(&json!({ "k0_qa": t1, "thresholds": thresholds, "b_profile": profile }))?;
        }
        Command::Run { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&config.output_dir));
            let outcome = run(&config, &dir)?;
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            for msg in &outcome.failures {
                eprintln!("failed: {msg}");
            }
            return Ok(outcome.exit_code);
        }
    }
    Ok(0)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("SMOOTHPROG_THREADS") else { return Ok(()) };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config(format!("SMOOTHPROG_THREADS={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| execute(cli.command));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
