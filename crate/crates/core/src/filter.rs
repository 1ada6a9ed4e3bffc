//! Rational filters built from contour quadrature.
//!
//! A filter is the rational function `r_N(xi) = w_N + sum_k w_k / (z_k - xi)`
//! determined by quadrature nodes `z_k` and weights `w_k` on a contour
//! enclosing the search interval.  Applied to a selfadjoint operator it maps
//! the eigenvalues inside the interval to dominant eigenvalues of the
//! filtered operator; the contraction factor `kappa_hat` measures how
//! dominant.  Only the Butterworth filter (equispaced nodes on the circle
//! around the interval, offset off the real axis) has a constructor here,
//! but the type represents any trapezoid-rule filter.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Real search interval `[center - radius, center + radius]` together with
/// the relative spectral gap separating it from the rest of the spectrum.
///
/// The guarded outer region is `|x - center| >= (1 + rel_gap) * radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    center: f64,
    radius: f64,
    rel_gap: f64,
}

impl SearchInterval {
    /// `radius` must be positive and `rel_gap` nonnegative.
    pub fn new(center: f64, radius: f64, rel_gap: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("interval radius {radius} must be > 0")));
        }
        if !(rel_gap >= 0.0) || !rel_gap.is_finite() {
            return Err(Error::InvalidArgument(format!("relative gap {rel_gap} must be >= 0")));
        }
        Ok(SearchInterval { center, radius, rel_gap })
    }

    /// Interval from its endpoints `a < b`.
    pub fn from_endpoints(a: f64, b: f64, rel_gap: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("endpoints must satisfy {a} < {b}")));
        }
        SearchInterval::new(0.5 * (a + b), 0.5 * (b - a), rel_gap)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rel_gap(&self) -> f64 {
        self.rel_gap
    }

    pub fn lower(&self) -> f64 {
        self.center - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.center + self.radius
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.radius
    }
}

/// Sign of the angular offset `phi = +-pi/N` applied to Butterworth nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PhiSign {
    #[default]
    Plus,
    Minus,
}

/// Rational filter `r_N(xi) = w_const + sum_k weights[k] / (nodes[k] - xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFilter {
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
    w_const: Complex64,
    interval: SearchInterval,
}

/// Contraction diagnostics of a filter on its interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterStats {
    /// `W = |w_const| + sum_k |w_k|`.
    pub w_sum: f64,
    /// `sup_outer |r_N| / inf_inner |r_N|`.
    pub kappa_hat: f64,
    /// Infimum of `|r_N|` over the search interval.
    pub inner_min: f64,
    /// Supremum of `|r_N|` over the guarded outer region.
    pub outer_sup: f64,
}

/// Which clauses of the separation assumption hold for a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// No node lies on the real axis (the closure of the spectrum).
    pub nodes_off_spectrum: bool,
    /// `W` is finite.
    pub weight_sum_finite: bool,
    /// `kappa_hat < 1`; `false` also when the stats are degenerate.
    pub contraction: bool,
    pub stats: Option<FilterStats>,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.nodes_off_spectrum && self.weight_sum_finite && self.contraction
    }
}

/// Default sample count used when estimating `kappa_hat` by dense sampling.
pub const DEFAULT_STAT_SAMPLES: usize = 100_000;

/// Sampling cutoff: the outer supremum is searched on
/// `(1 + rel_gap) * radius <= |x - center| <= 10 (1 + rel_gap) * radius`.
const OUTER_CUTOFF_FACTOR: f64 = 10.0;

impl RationalFilter {
    /// Builds a filter from explicit nodes and weights.
    ///
    /// Shape is validated here; the separation clauses (no real node,
    /// conjugate closure, finite `W`) are reported by
    /// [`RationalFilter::check_assumption`] so that deliberately broken
    /// filters can still be constructed and diagnosed.
    pub fn from_parts(
        nodes: Vec<Complex64>,
        weights: Vec<Complex64>,
        w_const: Complex64,
        interval: SearchInterval,
    ) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: weights.len() });
        }
        Ok(RationalFilter { nodes, weights, w_const, interval })
    }

    /// Butterworth filter of even order `n >= 2` for the given interval:
    /// nodes `center + radius * exp(i(theta_k + phi))` and weights
    /// `radius * exp(i(theta_k + phi)) / n` with `theta_k = 2 pi k / n` and
    /// `phi = +-pi/n`; the constant term is zero.
    pub fn butterworth(interval: SearchInterval, n: usize, phi_sign: PhiSign) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "butterworth order must be even and >= 2, got {n}"
            )));
        }
        let phi = match phi_sign {
            PhiSign::Plus => core::f64::consts::PI / n as f64,
            PhiSign::Minus => -core::f64::consts::PI / n as f64,
        };
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + phi;
            let dir = Complex64::from_polar(interval.radius(), theta);
            nodes.push(dir + interval.center());
            weights.push(dir / n as f64);
        }
        Ok(RationalFilter { nodes, weights, w_const: Complex64::new(0.0, 0.0), interval })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn w_const(&self) -> Complex64 {
        self.w_const
    }

    pub fn interval(&self) -> &SearchInterval {
        &self.interval
    }

    /// `W = |w_const| + sum |w_k|`.
    pub fn weight_sum(&self) -> f64 {
        self.w_const.norm() + self.weights.iter().map(|w| w.norm()).sum::<f64>()
    }

    /// Indices of nodes in the open upper half plane, one per conjugate pair.
    pub fn upper_half_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].im > 0.0).collect()
    }

    /// Whether for every node/weight pair the conjugate pair is also present
    /// and the constant term is real.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        if self.w_const.im.abs() > tol * (1.0 + self.w_const.norm()) {
            return false;
        }
        let scale_z = self.nodes.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
        let scale_w = self.weights.iter().map(|w| w.norm()).fold(0.0f64, f64::max).max(1.0);
        self.nodes.iter().zip(&self.weights).all(|(z, w)| {
            self.nodes.iter().zip(&self.weights).any(|(z2, w2)| {
                (z2 - z.conj()).norm() <= tol * scale_z && (w2 - w.conj()).norm() <= tol * scale_w
            })
        })
    }

    /// Evaluates `r_N` at `xi`.
    pub fn eval(&self, xi: Complex64) -> Result<Complex64> {
        let mut acc = self.w_const;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            let d = z - xi;
            if d.norm_sqr() == 0.0 {
                return Err(Error::PoleCollision { node: *z });
            }
            acc += w / d;
        }
        Ok(acc)
    }

    /// Evaluates `r_N` at a real point.
    pub fn eval_real(&self, x: f64) -> Result<Complex64> {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Images `r_N(lambda)` of candidate eigenvalues, in input order.
    pub fn mapped_eigenvalues(&self, lambdas: &[f64]) -> Result<Vec<Complex64>> {
        lambdas.iter().map(|&l| self.eval_real(l)).collect()
    }

    /// Detects the Butterworth structure: nodes on the interval circle whose
    /// scaled offsets are the N-th roots of -1, weights `(z_k - y)/N`, and a
    /// vanishing constant term.
    fn butterworth_shape(&self) -> bool {
        let n = self.nodes.len();
        if n < 2 || n % 2 != 0 || self.w_const.norm() > 0.0 {
            return false;
        }
        let y = self.interval.center();
        let radius = self.interval.radius();
        self.nodes.iter().zip(&self.weights).all(|(z, w)| {
            let u = (z - y) / radius;
            let pow = u.powu(n as u32);
            (u.norm() - 1.0).abs() <= 1e-12
                && (pow + 1.0).norm() <= 1e-10
                && (w - (z - y) / n as f64).norm() <= 1e-12 * radius
        })
    }

    /// Contraction statistics.
    ///
    /// For Butterworth filters the reported values come from the closed form
    /// `|r_N(x)| = 1 / (1 + ((x - y)/radius)^N)`; otherwise `inner_min` and
    /// `outer_sup` are estimated by dense sampling with `n_samples` points on
    /// the interval and on each side of the guarded region up to the
    /// documented cutoff.  A filter with a pole on the interval is reported
    /// as degenerate.
    pub fn stats(&self, n_samples: usize) -> Result<FilterStats> {
        if n_samples < 1000 {
            return Err(Error::InvalidArgument(format!(
                "kappa_hat sampling needs at least 1000 points, got {n_samples}"
            )));
        }
        let w_sum = self.weight_sum();
        let delta = self.interval.rel_gap();
        if self.butterworth_shape() {
            let n = self.nodes.len() as i32;
            let inner_min = 0.5;
            let outer_sup = 1.0 / (1.0 + (1.0 + delta).powi(n));
            return Ok(FilterStats { w_sum, kappa_hat: outer_sup / inner_min, inner_min, outer_sup });
        }
        let y = self.interval.center();
        let radius = self.interval.radius();
        let mut inner_min = f64::INFINITY;
        for i in 0..=n_samples {
            let x = y - radius + 2.0 * radius * i as f64 / n_samples as f64;
            match self.eval_real(x) {
                Ok(v) => inner_min = inner_min.min(v.norm()),
                Err(Error::PoleCollision { .. }) => {
                    return Err(Error::DegenerateFilter);
                }
                Err(e) => return Err(e),
            }
        }
        if inner_min == 0.0 {
            return Err(Error::DegenerateFilter);
        }
        let lo = (1.0 + delta) * radius;
        let hi = OUTER_CUTOFF_FACTOR * lo;
        let mut outer_sup = 0.0f64;
        for i in 0..=n_samples {
            let off = lo + (hi - lo) * i as f64 / n_samples as f64;
            for x in [y - off, y + off] {
                let v = self.eval_real(x)?;
                outer_sup = outer_sup.max(v.norm());
            }
        }
        Ok(FilterStats { w_sum, kappa_hat: outer_sup / inner_min, inner_min, outer_sup })
    }

    /// Checks the spectral-separation assumption: no node on the real axis,
    /// finite weight sum, and `kappa_hat < 1`.
    pub fn check_assumption(&self) -> AssumptionReport {
        let nodes_off_spectrum = self.nodes.iter().all(|z| z.im != 0.0);
        let w_sum = self.weight_sum();
        let weight_sum_finite = w_sum.is_finite();
        let stats = if nodes_off_spectrum { self.stats(DEFAULT_STAT_SAMPLES).ok() } else { None };
        let contraction = stats.map(|s| s.kappa_hat < 1.0).unwrap_or(false);
        AssumptionReport { nodes_off_spectrum, weight_sum_finite, contraction, stats }
    }
}

/// Bounds on the resolvent-related quantities over a spectrum sample:
/// `alpha = max |lambda - z| / |lambda|` and `beta = max |lambda| / |lambda - z|`.
///
/// The supremum over the true spectrum is approximated by the supplied
/// sample (for the unit square the exact spectrum up to a cutoff is used).
pub fn resolvent_bounds(z: Complex64, spectrum_sample: &[f64]) -> Result<(f64, f64)> {
    if spectrum_sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut alpha = 0.0f64;
    let mut beta = 0.0f64;
    for &lambda in spectrum_sample {
        if lambda == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "spectrum sample must be nonzero, found {lambda}"
            )));
        }
        let d = (Complex64::new(lambda, 0.0) - z).norm();
        if d == 0.0 {
            return Err(Error::InvalidArgument(format!("shift {z} lies in the spectrum sample")));
        }
        alpha = alpha.max(d / lambda.abs());
        beta = beta.max(lambda.abs() / d);
    }
    Ok((alpha, beta))
}
