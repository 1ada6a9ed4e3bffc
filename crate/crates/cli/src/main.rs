//! `spectral-feast`: filtered subspace iteration runs on the study domains.
//!
//! Subcommands: `filter-stats`, `mesh`, `solve`, `study`, `oracle`.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spectral_feast_cli::driver::{
    self, csv_table, rate_summary, RateAssertion, SolveSpec, StudySpec,
};
use spectral_feast_cli::io;
use spectral_feast_core::feast::FeastStatus;
use spectral_feast_core::filter::{PhiSign, RationalFilter, SearchInterval};
use spectral_feast_core::metrics::DomainId;

#[derive(Parser)]
#[command(
    name = "spectral-feast",
    about = "Filtered subspace iteration for Dirichlet Laplacian eigenvalue clusters",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Square,
    Lshape,
    Dumbbell,
}

impl From<DomainArg> for DomainId {
    fn from(d: DomainArg) -> DomainId {
        match d {
            DomainArg::Square => DomainId::Square,
            DomainArg::Lshape => DomainId::LShape,
            DomainArg::Dumbbell => DomainId::Dumbbell,
        }
    }
}

/// Flags shared by solve, study and oracle.
#[derive(Args, Clone)]
struct RunArgs {
    /// Study domain.
    #[arg(long, value_enum)]
    domain: DomainArg,
    /// Lagrange polynomial degree (1..=3).
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Search interval endpoints "A,B".
    #[arg(long, value_parser = parse_interval)]
    interval: (f64, f64),
    /// Quadrature node count N of the Butterworth filter.
    #[arg(long = "n-quad", default_value_t = 8)]
    n_quad: usize,
    /// Initial subspace dimension.
    #[arg(long, default_value_t = 6)]
    m0: usize,
    /// Ritz-change stopping tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// RNG seed for the starting subspace.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation slack: keep Ritz values within (1+R) times the radius.
    #[arg(long = "keep-margin", default_value_t = 0.1)]
    keep_margin: f64,
    /// Relative spectral gap assumed by the filter diagnostics.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Worker threads for factorizations (0 = all cores, 1 = serial).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output path for the CSV table (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn solve_spec(&self, exponent: u32) -> SolveSpec {
        let mut s = SolveSpec::new(self.domain.into(), self.p, exponent, self.interval);
        s.rel_gap = self.delta;
        s.quad_order = self.n_quad;
        s.m0 = self.m0;
        s.tol = self.tol;
        s.seed = self.seed;
        s.keep_margin = self.keep_margin;
        s.jobs = self.jobs;
        s
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print W, kappa_hat and the inner/outer filter extrema as CSV.
    FilterStats {
        /// Interval center y.
        #[arg(long)]
        center: f64,
        /// Interval radius gamma.
        #[arg(long)]
        radius: f64,
        /// Relative spectral gap delta.
        #[arg(long)]
        delta: f64,
        /// Quadrature node count N.
        #[arg(long)]
        n: usize,
        /// Sample count for the non-Butterworth sampling fallback.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Generate a structured mesh and write it in the text format.
    Mesh {
        #[arg(long, value_enum)]
        domain: DomainArg,
        /// Cells per unit edge (grid spacing 1/n).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// One run: mesh, assemble, factor, iterate; emit one CSV table.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Mesh exponent k (grid spacing 2^-k).
        #[arg(long)]
        k: u32,
    },
    /// Refinement sweep over a range of mesh exponents with rate summary.
    Study {
        #[command(flatten)]
        run: RunArgs,
        /// Inclusive exponent range "A..B".
        #[arg(long = "k-range", value_parser = parse_range)]
        k_range: (u32, u32),
        /// Expected Hausdorff-error rate "R" or "R:TOL" (default TOL 0.35).
        #[arg(long = "expect-hausdorff-rate", value_parser = parse_expect)]
        expect_hausdorff_rate: Option<(f64, f64)>,
        /// Expected per-value rate "IDX=R" or "IDX=R:TOL"; repeatable.
        #[arg(long = "expect-value-rate", value_parser = parse_value_expect)]
        expect_value_rate: Vec<(usize, f64, f64)>,
    },
    /// Compare the filtered iteration against the dense brute-force oracle.
    Oracle {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        k: u32,
        /// Maximum free-dof count the dense oracle accepts.
        #[arg(long, default_value_t = 2000)]
        cap: usize,
    },
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected \"A,B\", got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad interval start: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad interval end: {e}"))?;
    if a >= b {
        return Err(format!("interval start {a} must be below end {b}"));
    }
    Ok((a, b))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected \"A..B\", got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err(format!("range start {a} must not exceed end {b}"));
    }
    Ok((a, b))
}

fn parse_expect(s: &str) -> Result<(f64, f64), String> {
    let (rate, tol) = match s.split_once(':') {
        Some((r, t)) => (r, Some(t)),
        None => (s, None),
    };
    let rate: f64 = rate.trim().parse().map_err(|e| format!("bad rate: {e}"))?;
    let tol: f64 = match tol {
        Some(t) => t.trim().parse().map_err(|e| format!("bad tolerance: {e}"))?,
        None => 0.35,
    };
    Ok((rate, tol))
}

fn parse_value_expect(s: &str) -> Result<(usize, f64, f64), String> {
    let (idx, rest) = s.split_once('=').ok_or_else(|| format!("expected \"IDX=R\", got {s:?}"))?;
    let idx: usize = idx.trim().parse().map_err(|e| format!("bad index: {e}"))?;
    let (rate, tol) = parse_expect(rest)?;
    Ok((idx, rate, tol))
}

fn emit(out: &Option<PathBuf>, table: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, table).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::FilterStats { center, radius, delta, n, samples } => {
            let interval = SearchInterval::new(center, radius, delta).map_err(|e| anyhow!(e))?;
            let filter =
                RationalFilter::butterworth(interval, n, PhiSign::Plus).map_err(|e| anyhow!(e))?;
            let stats = filter.stats(samples).map_err(|e| anyhow!(e))?;
            println!("w_sum,kappa_hat,inner_min,outer_sup");
            println!(
                "{},{},{},{}",
                io::fmt_f64(stats.w_sum),
                io::fmt_f64(stats.kappa_hat),
                io::fmt_f64(stats.inner_min),
                io::fmt_f64(stats.outer_sup)
            );
            Ok(0)
        }
        Command::Mesh { domain, n, out } => {
            let domain: DomainId = domain.into();
            let mesh = match domain {
                DomainId::Square => spectral_feast_core::mesh::make_square_mesh(n),
                DomainId::LShape => spectral_feast_core::mesh::make_lshape_mesh(n),
                DomainId::Dumbbell => spectral_feast_core::mesh::make_dumbbell_mesh(n),
            }
            .map_err(|e| anyhow!(e))?;
            io::write_mesh(&out, &mesh)?;
            eprintln!(
                "wrote {} ({} vertices, {} triangles, h_max {:.6})",
                out.display(),
                mesh.n_vertices(),
                mesh.n_triangles(),
                mesh.h_max
            );
            Ok(0)
        }
        Command::Solve { run, k } => {
            let spec = run.solve_spec(k);
            let outcome = driver::run_solve(&spec)?;
            emit(&run.out, &csv_table(core::slice::from_ref(&outcome)))?;
            eprintln!(
                "{} p={} k={}: {} after {} iterations, {} value(s)",
                spec.domain.name(),
                spec.degree,
                k,
                outcome.status_str(),
                outcome.iterations,
                outcome.ritz_values.len()
            );
            Ok(i32::from(outcome.status != FeastStatus::Converged))
        }
        Command::Study { run, k_range, expect_hausdorff_rate, expect_value_rate } => {
            let spec = StudySpec {
                base: run.solve_spec(k_range.0),
                exponents: (k_range.0..=k_range.1).collect(),
                expect_hausdorff_rate,
                expect_value_rates: expect_value_rate,
            };
            let study = driver::run_study(&spec)?;
            emit(&run.out, &csv_table(&study.solves))?;
            let summary = rate_summary(&study);
            if run.out.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            let ok = study.all_converged() && study.assertions_pass();
            for RateAssertion { label, pass, .. } in &study.assertions {
                if !pass {
                    eprintln!("rate assertion failed: {label}");
                }
            }
            Ok(i32::from(!ok))
        }
        Command::Oracle { run, k, cap } => {
            let spec = run.solve_spec(k);
            let report = driver::run_oracle(&spec, cap)?;
            println!("feast_count,oracle_count,max_rel_discrepancy");
            println!(
                "{},{},{}",
                report.feast_in_interval.len(),
                report.oracle_in_interval.len(),
                report
                    .max_rel_discrepancy
                    .map(io::fmt_f64)
                    .unwrap_or_else(|| "mismatch".into())
            );
            if !report.counts_match {
                bail!(
                    "filtered iteration found {} values but the oracle found {}",
                    report.feast_in_interval.len(),
                    report.oracle_in_interval.len()
                );
            }
            Ok(0)
        }
    }
}
