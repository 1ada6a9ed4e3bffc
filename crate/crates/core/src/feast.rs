//! Filtered subspace iteration.
//!
//! Starting from a random subspace, each step applies the discrete filter,
//! reorthonormalizes, extracts Ritz values on the iterate, and discards
//! basis vectors whose Ritz values drifted too far outside the search
//! interval.  Iteration stops when successive retained Ritz values agree to
//! the configured tolerance.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem::{apply_filtered_operator, ResolventSolver};
use crate::filter::{RationalFilter, SearchInterval};
use crate::linalg::{dense_sym_gevp, m_orthonormalize, DenseMatrix};
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Driver configuration; the defaults mirror the reference experiments
/// (subspace dimension six, stopping tolerance `1e-9`).
#[derive(Debug, Clone)]
pub struct FeastConfig {
    pub filter: RationalFilter,
    /// Initial subspace dimension.
    pub m0: usize,
    /// Stop when successive retained Ritz values change by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Ritz values with `|lambda - center| > (1 + keep_margin) * radius`
    /// are truncated.
    pub keep_margin: f64,
    pub seed: u64,
}

impl FeastConfig {
    pub fn new(filter: RationalFilter) -> Self {
        FeastConfig { filter, m0: 6, tol: 1e-9, max_iter: 50, keep_margin: 0.1, seed: 0 }
    }

    fn validate(&self, n_free: usize) -> Result<()> {
        if self.m0 < 1 || self.m0 > n_free {
            return Err(Error::InvalidArgument(format!(
                "initial dimension {} must lie in 1..={n_free}",
                self.m0
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be > 0", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        if !(self.keep_margin >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "keep_margin {} must be >= 0",
                self.keep_margin
            )));
        }
        Ok(())
    }
}

/// Current iterate: an M-orthonormal, Ritz-rotated basis and its values.
#[derive(Debug, Clone)]
pub struct SubspaceState {
    pub basis: DenseMatrix,
    /// Ascending, truncated to the keep window.
    pub ritz_values: Vec<f64>,
    pub iteration: usize,
    /// Max Ritz change over the last step; infinite while the retained
    /// count is still settling.
    pub last_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeastStatus {
    Converged,
    MaxIterReached,
    /// Every Ritz value was truncated: no spectrum in the search window.
    NoEigenvalues,
}

#[derive(Debug, Clone)]
pub struct FeastResult {
    pub state: SubspaceState,
    pub status: FeastStatus,
    /// Retained Ritz values after each iteration.
    pub history: Vec<Vec<f64>>,
}

impl FeastResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

fn fill_random(rng: &mut ChaCha8Rng, block: &mut DenseMatrix) {
    for x in block.data_mut() {
        // 53-bit uniform in [0,1), mapped onto (-1,1).
        *x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    }
}

/// Random M-orthonormal starting basis of `m0` columns, deterministic in
/// `seed`.
pub fn init_subspace(m_free: &SparseMatrix, m0: usize, seed: u64) -> Result<DenseMatrix> {
    let n = m_free.nrows();
    if m0 < 1 || m0 > n {
        return Err(Error::InvalidArgument(format!("m0 {m0} must lie in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = DenseMatrix::zeros(n, m0);
    fill_random(&mut rng, &mut basis);
    let (q, _) = m_orthonormalize(&basis, m_free)?;
    Ok(q)
}

/// Rayleigh–Ritz extraction on the span of `basis`: forms the projected
/// pencil `(Y^T K Y, Y^T M Y)`, solves the small dense generalized
/// eigenproblem, and returns ascending Ritz values with the rotated
/// (M-orthonormal) basis.
pub fn rayleigh_ritz(
    k_free: &SparseMatrix,
    m_free: &SparseMatrix,
    basis: &DenseMatrix,
) -> Result<(Vec<f64>, DenseMatrix)> {
    let (k_y, m_y) = project_pencil(k_free, m_free, basis);
    let (values, q) = dense_sym_gevp(&k_y, &m_y)?;
    Ok((values, basis.matmul(&q)))
}

/// Projected pencil `(Y^T K Y, Y^T M Y)` of a basis block.
pub fn project_pencil(
    k_free: &SparseMatrix,
    m_free: &SparseMatrix,
    basis: &DenseMatrix,
) -> (DenseMatrix, DenseMatrix) {
    let n = basis.nrows();
    let m = basis.ncols();
    let mut kb = alloc::vec![0.0; n * m];
    k_free.mul_block(basis.data(), m, &mut kb);
    let kb = DenseMatrix::from_row_major(n, m, kb).expect("shape by construction");
    let mut mb = alloc::vec![0.0; n * m];
    m_free.mul_block(basis.data(), m, &mut mb);
    let mb = DenseMatrix::from_row_major(n, m, mb).expect("shape by construction");
    let sym = |a: DenseMatrix| {
        let mut s = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                s.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
            }
        }
        s
    };
    (sym(basis.transpose_matmul(&kb)), sym(basis.transpose_matmul(&mb)))
}

/// Drops Ritz pairs with `|lambda - center| > (1 + keep_margin) * radius`.
pub fn truncate(
    state: SubspaceState,
    interval: &SearchInterval,
    keep_margin: f64,
) -> SubspaceState {
    let (values, basis) = truncate_pair(state.ritz_values, state.basis, interval, keep_margin);
    SubspaceState {
        basis,
        ritz_values: values,
        iteration: state.iteration,
        last_change: state.last_change,
    }
}

fn truncate_pair(
    values: Vec<f64>,
    basis: DenseMatrix,
    interval: &SearchInterval,
    keep_margin: f64,
) -> (Vec<f64>, DenseMatrix) {
    let window = (1.0 + keep_margin) * interval.radius();
    let keep: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - interval.center()).abs() <= window)
        .map(|(i, _)| i)
        .collect();
    if keep.len() == values.len() {
        return (values, basis);
    }
    let kept_values = keep.iter().map(|&i| values[i]).collect();
    let kept_basis = basis.select_cols(&keep);
    (kept_values, kept_basis)
}

/// Runs the filtered subspace iteration from a fresh random subspace.
pub fn iterate(
    config: &FeastConfig,
    k_free: &SparseMatrix,
    m_free: &SparseMatrix,
    solvers: &BTreeMap<usize, ResolventSolver>,
) -> Result<FeastResult> {
    let report = config.filter.check_assumption();
    if !report.holds() {
        return Err(Error::AssumptionViolated(format!(
            "nodes off spectrum: {}, finite weight sum: {}, contraction: {}",
            report.nodes_off_spectrum, report.weight_sum_finite, report.contraction
        )));
    }
    config.validate(k_free.nrows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut basis = DenseMatrix::zeros(k_free.nrows(), config.m0);
    fill_random(&mut rng, &mut basis);
    let (basis, _) = m_orthonormalize(&basis, m_free)?;
    run(config, k_free, m_free, solvers, basis, None, rng)
}

/// Continues the iteration from a previous state (for example a converged
/// one); the state's Ritz values seed the stopping test, so restarting from
/// a fixed point converges after one additional iteration.
pub fn resume(
    config: &FeastConfig,
    k_free: &SparseMatrix,
    m_free: &SparseMatrix,
    solvers: &BTreeMap<usize, ResolventSolver>,
    state: &SubspaceState,
) -> Result<FeastResult> {
    config.validate(k_free.nrows())?;
    let prev = (!state.ritz_values.is_empty()).then(|| state.ritz_values.clone());
    let rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(state.iteration as u64));
    run(config, k_free, m_free, solvers, state.basis.clone(), prev, rng)
}

fn run(
    config: &FeastConfig,
    k_free: &SparseMatrix,
    m_free: &SparseMatrix,
    solvers: &BTreeMap<usize, ResolventSolver>,
    mut basis: DenseMatrix,
    mut prev: Option<Vec<f64>>,
    mut rng: ChaCha8Rng,
) -> Result<FeastResult> {
    let interval = *config.filter.interval();
    let mut history: Vec<Vec<f64>> = Vec::new();
    for iteration in 1..=config.max_iter {
        let target = basis.ncols();
        let filtered = apply_filtered_operator(&config.filter, solvers, &basis)?;
        let mut q = match m_orthonormalize(&filtered, m_free) {
            Ok((q, _)) => q,
            // The filter annihilated the whole block: nothing to retain.
            Err(Error::EmptyBasis) => {
                return Ok(FeastResult {
                    state: SubspaceState {
                        basis: DenseMatrix::zeros(k_free.nrows(), 0),
                        ritz_values: Vec::new(),
                        iteration,
                        last_change: f64::INFINITY,
                    },
                    status: FeastStatus::NoEigenvalues,
                    history,
                });
            }
            Err(e) => return Err(e),
        };
        // Re-seed columns lost to rank collapse so the subspace keeps the
        // dimension of the retained Ritz set.
        let mut attempts = 0;
        while q.ncols() < target && attempts < 4 * target {
            attempts += 1;
            let n = q.nrows();
            let mut widened = DenseMatrix::zeros(n, q.ncols() + 1);
            for j in 0..q.ncols() {
                for i in 0..n {
                    widened.set(i, j, q.get(i, j));
                }
            }
            let mut fresh = DenseMatrix::zeros(n, 1);
            fill_random(&mut rng, &mut fresh);
            for i in 0..n {
                widened.set(i, q.ncols(), fresh.get(i, 0));
            }
            let (wq, _) = m_orthonormalize(&widened, m_free)?;
            q = wq;
        }
        let (values, rotated) = rayleigh_ritz(k_free, m_free, &q)?;
        let (values, rotated) = truncate_pair(values, rotated, &interval, config.keep_margin);
        if values.is_empty() {
            return Ok(FeastResult {
                state: SubspaceState {
                    basis: rotated,
                    ritz_values: values,
                    iteration,
                    last_change: f64::INFINITY,
                },
                status: FeastStatus::NoEigenvalues,
                history,
            });
        }
        let last_change = match &prev {
            Some(p) if p.len() == values.len() => p
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max),
            _ => f64::INFINITY,
        };
        history.push(values.clone());
        basis = rotated;
        prev = Some(values.clone());
        if last_change < config.tol {
            return Ok(FeastResult {
                state: SubspaceState {
                    basis,
                    ritz_values: prev.expect("set above"),
                    iteration,
                    last_change,
                },
                status: FeastStatus::Converged,
                history,
            });
        }
    }
    let values = prev.unwrap_or_default();
    Ok(FeastResult {
        state: SubspaceState {
            basis,
            ritz_values: values,
            iteration: config.max_iter,
            last_change: f64::INFINITY,
        },
        status: FeastStatus::MaxIterReached,
        history,
    })
}
