//! Experiment drivers: one filtered-iteration solve per mesh, refinement
//! studies with observed-rate summaries, and the dense-oracle cross check.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use spectral_feast_core::feast::{self, FeastConfig, FeastStatus};
use spectral_feast_core::fem::{
    apply_filtered_operator, assemble_mass, assemble_stiffness, build_space, FeSpace,
    ResolventSolver,
};
use spectral_feast_core::filter::{PhiSign, RationalFilter, SearchInterval};
use spectral_feast_core::linalg::dense_pencil_bruteforce;
use spectral_feast_core::mesh::{make_dumbbell_mesh, make_lshape_mesh, make_square_mesh, Mesh};
use spectral_feast_core::metrics::{
    self, ConvergenceRecord, DomainId, EigenvalueReference, RateTable,
};
use spectral_feast_core::sparse::SparseMatrix;
use spectral_feast_core::Complex64;

use crate::io::fmt_f64;

/// Parameters of a single (domain, degree, mesh exponent, interval) run.
#[derive(Debug, Clone)]
pub struct SolveSpec {
    pub domain: DomainId,
    pub degree: usize,
    /// Grid spacing is `2^-exponent`.
    pub exponent: u32,
    /// Search interval endpoints `(a, b)`.
    pub interval: (f64, f64),
    /// Relative spectral gap used by the filter diagnostics.
    pub rel_gap: f64,
    /// Number of quadrature nodes N of the Butterworth filter.
    pub quad_order: usize,
    pub m0: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub keep_margin: f64,
    /// Worker threads for the per-node factorizations (1 = serial,
    /// 0 = rayon default).
    pub jobs: usize,
}

impl SolveSpec {
    pub fn new(domain: DomainId, degree: usize, exponent: u32, interval: (f64, f64)) -> Self {
        SolveSpec {
            domain,
            degree,
            exponent,
            interval,
            rel_gap: 1.0,
            quad_order: 8,
            m0: 6,
            tol: 1e-9,
            max_iter: 50,
            seed: 0,
            keep_margin: 0.1,
            jobs: 0,
        }
    }

    pub fn search_interval(&self) -> Result<SearchInterval> {
        SearchInterval::from_endpoints(self.interval.0, self.interval.1, self.rel_gap)
            .map_err(|e| anyhow!(e))
    }
}

/// Builds the structured mesh of a domain at spacing `2^-exponent`.
pub fn domain_mesh(domain: DomainId, exponent: u32) -> Result<Mesh> {
    let n = 1usize
        .checked_shl(exponent)
        .with_context(|| format!("mesh exponent {exponent} too large"))?;
    let mesh = match domain {
        DomainId::Square => make_square_mesh(n),
        DomainId::LShape => make_lshape_mesh(n),
        DomainId::Dumbbell => make_dumbbell_mesh(n),
    };
    mesh.map_err(|e| anyhow!(e))
}

/// Everything measured on one run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub spec: SolveSpec,
    pub h_max: f64,
    pub n_dofs: usize,
    pub n_free: usize,
    pub status: FeastStatus,
    pub iterations: usize,
    pub ritz_values: Vec<f64>,
    pub reference: EigenvalueReference,
    /// Nearest-reference index per Ritz value.
    pub assignment: Vec<usize>,
    /// Largest error per distinct reference value.
    pub per_ref_error: Vec<Option<f64>>,
    pub hausdorff: Option<f64>,
    pub gap_h: Option<f64>,
    pub gap_v: Option<f64>,
}

impl SolveOutcome {
    pub fn status_str(&self) -> &'static str {
        match self.status {
            FeastStatus::Converged => "converged",
            FeastStatus::MaxIterReached => "max-iter",
            FeastStatus::NoEigenvalues => "no-eigenvalues",
        }
    }

    pub fn record(&self) -> ConvergenceRecord {
        ConvergenceRecord {
            spacing: 0.5f64.powi(self.spec.exponent as i32),
            h_max: self.h_max,
            degree: self.spec.degree,
            iterations: self.iterations,
            ritz_values: self.ritz_values.clone(),
            errors: self.per_ref_error.clone(),
            hausdorff: self.hausdorff,
            gap_h: self.gap_h,
            gap_v: self.gap_v,
        }
    }
}

/// Factors one solver per upper-half-plane node, in parallel when `jobs`
/// allows it.  Results are keyed by node index, so the parallel and serial
/// paths produce identical maps.
pub fn build_solvers_parallel(
    space: &FeSpace,
    kf: &Arc<SparseMatrix>,
    mf: &Arc<SparseMatrix>,
    filter: &RationalFilter,
    jobs: usize,
) -> Result<std::collections::BTreeMap<usize, ResolventSolver>> {
    let coords = space.free_coords();
    let nodes = filter.upper_half_nodes();
    let build = |idx: usize| -> Result<(usize, ResolventSolver)> {
        let z: Complex64 = filter.nodes()[idx];
        let solver = ResolventSolver::from_matrices(kf.clone(), mf.clone(), z, Some(&coords))
            .map_err(|e| anyhow!(e))?;
        Ok((idx, solver))
    };
    let built: Vec<(usize, ResolventSolver)> = if jobs == 1 {
        nodes.into_iter().map(build).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?;
        pool.install(|| nodes.into_par_iter().map(build).collect::<Result<_>>())?
    };
    Ok(built.into_iter().collect())
}

/// Runs mesh generation, assembly, factorization and the filtered subspace
/// iteration for one spec, then attaches the error metrics.
pub fn run_solve(spec: &SolveSpec) -> Result<SolveOutcome> {
    let interval = spec.search_interval()?;
    let mesh = domain_mesh(spec.domain, spec.exponent)?;
    let space = build_space(mesh, spec.degree).map_err(|e| anyhow!(e))?;
    let h_max = space.mesh().h_max;
    let n_dofs = space.n_dofs();
    let n_free = space.n_free();
    let k = assemble_stiffness(&space);
    let m = assemble_mass(&space);
    let kf = Arc::new(space.restrict_to_free(&k).map_err(|e| anyhow!(e))?);
    let mf = Arc::new(space.restrict_to_free(&m).map_err(|e| anyhow!(e))?);
    let filter = RationalFilter::butterworth(interval, spec.quad_order, PhiSign::Plus)
        .map_err(|e| anyhow!(e))?;
    let solvers = build_solvers_parallel(&space, &kf, &mf, &filter, spec.jobs)?;
    let config = FeastConfig {
        filter,
        m0: spec.m0,
        tol: spec.tol,
        max_iter: spec.max_iter,
        keep_margin: spec.keep_margin,
        seed: spec.seed,
    };
    let result = feast::iterate(&config, &kf, &mf, &solvers).map_err(|e| anyhow!(e))?;

    let reference = metrics::reference_for(spec.domain, &interval).map_err(|e| anyhow!(e))?;
    let ritz = result.state.ritz_values.clone();
    let matched = metrics::match_to_reference(&ritz, &reference);
    let expanded = reference.expanded();
    let hausdorff = (!ritz.is_empty() && !expanded.is_empty())
        .then(|| metrics::hausdorff(&ritz, &expanded))
        .transpose()
        .map_err(|e| anyhow!(e))?;

    let (mut gap_h, mut gap_v) = (None, None);
    if spec.domain == DomainId::Square && !ritz.is_empty() {
        let modes = metrics::square_modes_in(&interval, mode_cutoff(&interval))
            .map_err(|e| anyhow!(e))?;
        if !modes.is_empty() {
            gap_h = Some(
                metrics::gap_to_exact_square(&result.state.basis, &space, &modes, &mf)
                    .map_err(|e| anyhow!(e))?,
            );
            gap_v = Some(
                metrics::gap_to_exact_square(&result.state.basis, &space, &modes, &kf)
                    .map_err(|e| anyhow!(e))?,
            );
        }
    }

    Ok(SolveOutcome {
        spec: spec.clone(),
        h_max,
        n_dofs,
        n_free,
        status: result.status,
        iterations: result.iterations(),
        ritz_values: ritz,
        reference,
        assignment: matched.assignment,
        per_ref_error: matched.per_ref_error,
        hausdorff,
        gap_h,
        gap_v,
    })
}

fn mode_cutoff(interval: &SearchInterval) -> usize {
    (interval.upper() / (core::f64::consts::PI * core::f64::consts::PI)).sqrt() as usize + 2
}

/// CSV header shared by solve and study outputs.
pub const CSV_HEADER: &str = "domain,p,k,h_max,n_dofs,n_free,status,iters,idx,ritz_value,\
ref_value,abs_error,dist_hausdorff,gap_H,gap_V";

/// Renders one outcome as CSV rows (one per retained Ritz value, none when
/// the run found no eigenvalues).
pub fn csv_rows(outcome: &SolveOutcome) -> String {
    let mut out = String::new();
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for (idx, &value) in outcome.ritz_values.iter().enumerate() {
        let (ref_value, abs_error) = match outcome.reference.values.get(outcome.assignment[idx]) {
            Some(r) => (fmt_f64(r.value), fmt_f64((value - r.value).abs())),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            outcome.spec.domain.name(),
            outcome.spec.degree,
            outcome.spec.exponent,
            fmt_f64(outcome.h_max),
            outcome.n_dofs,
            outcome.n_free,
            outcome.status_str(),
            outcome.iterations,
            idx,
            fmt_f64(value),
            ref_value,
            abs_error,
            opt(outcome.hausdorff),
            opt(outcome.gap_h),
            opt(outcome.gap_v),
        );
    }
    out
}

pub fn csv_table(outcomes: &[SolveOutcome]) -> String {
    let mut out = String::with_capacity(256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for o in outcomes {
        out.push_str(&csv_rows(o));
    }
    out
}

/// A rate assertion the study was asked to verify.
#[derive(Debug, Clone)]
pub struct RateAssertion {
    pub label: String,
    pub observed: Option<f64>,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Study parameters: one solve per exponent plus rate expectations.
#[derive(Debug, Clone)]
pub struct StudySpec {
    pub base: SolveSpec,
    /// Ascending mesh exponents.
    pub exponents: Vec<u32>,
    /// Expected Hausdorff-error rate with tolerance.
    pub expect_hausdorff_rate: Option<(f64, f64)>,
    /// `(reference index, expected rate, tolerance)` triples.
    pub expect_value_rates: Vec<(usize, f64, f64)>,
}

#[derive(Debug)]
pub struct StudyOutcome {
    pub solves: Vec<SolveOutcome>,
    pub rates: RateTable,
    pub assertions: Vec<RateAssertion>,
}

impl StudyOutcome {
    pub fn all_converged(&self) -> bool {
        self.solves.iter().all(|s| s.status == FeastStatus::Converged)
    }

    pub fn assertions_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// Last defined entry of a rate sequence: the finest, most asymptotic rate.
fn final_rate(seq: &[Option<f64>]) -> Option<f64> {
    seq.iter().rev().flatten().next().copied()
}

/// Runs the sweep over the configured exponents and summarizes rates.
pub fn run_study(spec: &StudySpec) -> Result<StudyOutcome> {
    if spec.exponents.len() < 2 {
        bail!("a study needs at least two mesh exponents");
    }
    if spec.exponents.windows(2).any(|w| w[1] != w[0] + 1) {
        bail!("study exponents must increase by one (halving spacing)");
    }
    let mut solves = Vec::with_capacity(spec.exponents.len());
    for &k in &spec.exponents {
        let mut s = spec.base.clone();
        s.exponent = k;
        solves.push(run_solve(&s).with_context(|| format!("exponent {k}"))?);
    }
    let records: Vec<ConvergenceRecord> = solves.iter().map(|s| s.record()).collect();
    let rates = metrics::observed_rates(&records).map_err(|e| anyhow!(e))?;
    let mut assertions = Vec::new();
    if let Some((expected, tol)) = spec.expect_hausdorff_rate {
        let observed = final_rate(&rates.hausdorff);
        assertions.push(RateAssertion {
            label: "hausdorff".into(),
            observed,
            expected,
            tol,
            pass: observed.map_or(false, |r| (r - expected).abs() <= tol),
        });
    }
    for &(idx, expected, tol) in &spec.expect_value_rates {
        let observed = rates.per_value.get(idx).and_then(|s| final_rate(s));
        assertions.push(RateAssertion {
            label: format!("value[{idx}]"),
            observed,
            expected,
            tol,
            pass: observed.map_or(false, |r| (r - expected).abs() <= tol),
        });
    }
    Ok(StudyOutcome { solves, rates, assertions })
}

/// Human-readable rate summary printed next to the CSV table.
pub fn rate_summary(study: &StudyOutcome) -> String {
    let fmt_seq = |seq: &[Option<f64>]| {
        seq.iter()
            .map(|r| r.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "# hausdorff rates: {}", fmt_seq(&study.rates.hausdorff));
    let reference = &study.solves[0].reference;
    for (j, seq) in study.rates.per_value.iter().enumerate() {
        let label = reference
            .values
            .get(j)
            .map(|r| format!("{:.6}", r.value))
            .unwrap_or_else(|| "?".into());
        let _ = writeln!(out, "# value[{j}] (ref {label}) rates: {}", fmt_seq(seq));
    }
    if study.rates.gap_h.iter().any(Option::is_some) {
        let _ = writeln!(out, "# gap_H rates: {}", fmt_seq(&study.rates.gap_h));
        let _ = writeln!(out, "# gap_V rates: {}", fmt_seq(&study.rates.gap_v));
    }
    for a in &study.assertions {
        let observed =
            a.observed.map(|r| format!("{r:.3}")).unwrap_or_else(|| "undefined".into());
        let _ = writeln!(
            out,
            "# {} {}: observed rate {} expected {} +- {}",
            if a.pass { "PASS" } else { "FAIL" },
            a.label,
            observed,
            a.expected,
            a.tol,
        );
    }
    out
}

/// Dense-oracle comparison for one solve.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub feast_in_interval: Vec<f64>,
    pub oracle_in_interval: Vec<f64>,
    pub counts_match: bool,
    /// Largest relative discrepancy over matched (sorted) pairs.
    pub max_rel_discrepancy: Option<f64>,
}

/// Runs both the filtered iteration and the dense brute-force decomposition
/// and compares their spectra inside the strict search interval.
pub fn run_oracle(spec: &SolveSpec, cap: usize) -> Result<OracleReport> {
    let mesh = domain_mesh(spec.domain, spec.exponent)?;
    let space = build_space(mesh, spec.degree).map_err(|e| anyhow!(e))?;
    let k = assemble_stiffness(&space);
    let m = assemble_mass(&space);
    let kf = space.restrict_to_free(&k).map_err(|e| anyhow!(e))?;
    let mf = space.restrict_to_free(&m).map_err(|e| anyhow!(e))?;
    let all = dense_pencil_bruteforce(&kf, &mf, cap).map_err(|e| anyhow!(e))?;
    let (a, b) = spec.interval;
    let oracle_in_interval: Vec<f64> = all.into_iter().filter(|&v| v >= a && v <= b).collect();
    let outcome = run_solve(spec)?;
    let feast_in_interval: Vec<f64> =
        outcome.ritz_values.iter().copied().filter(|&v| v >= a && v <= b).collect();
    let counts_match = feast_in_interval.len() == oracle_in_interval.len();
    let max_rel_discrepancy = counts_match.then(|| {
        feast_in_interval
            .iter()
            .zip(&oracle_in_interval)
            .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
            .fold(0.0f64, f64::max)
    });
    Ok(OracleReport { feast_in_interval, oracle_in_interval, counts_match, max_rel_discrepancy })
}

/// Convenience wrapper used by tests that need direct access to the
/// assembled pencil and iteration result of a spec.
pub struct AssembledProblem {
    pub space: FeSpace,
    pub kf: Arc<SparseMatrix>,
    pub mf: Arc<SparseMatrix>,
    pub filter: RationalFilter,
    pub solvers: std::collections::BTreeMap<usize, ResolventSolver>,
}

pub fn assemble_problem(spec: &SolveSpec) -> Result<AssembledProblem> {
    let interval = spec.search_interval()?;
    let mesh = domain_mesh(spec.domain, spec.exponent)?;
    let space = build_space(mesh, spec.degree).map_err(|e| anyhow!(e))?;
    let k = assemble_stiffness(&space);
    let m = assemble_mass(&space);
    let kf = Arc::new(space.restrict_to_free(&k).map_err(|e| anyhow!(e))?);
    let mf = Arc::new(space.restrict_to_free(&m).map_err(|e| anyhow!(e))?);
    let filter = RationalFilter::butterworth(interval, spec.quad_order, PhiSign::Plus)
        .map_err(|e| anyhow!(e))?;
    let solvers = build_solvers_parallel(&space, &kf, &mf, &filter, spec.jobs)?;
    Ok(AssembledProblem { space, kf, mf, filter, solvers })
}

/// Applies the assembled filter once to a coefficient block (exposed for the
/// filter-diagnostic tests in the acceptance suite).
pub fn apply_once(
    problem: &AssembledProblem,
    block: &spectral_feast_core::linalg::DenseMatrix,
) -> Result<spectral_feast_core::linalg::DenseMatrix> {
    apply_filtered_operator(&problem.filter, &problem.solvers, block).map_err(|e| anyhow!(e))
}
