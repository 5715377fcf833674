//! Harmonic extension and the Dirichlet-to-Neumann map on periodic samples.
//!
//! A sampled function on `[0, X)` is expanded in modes `e^{iξ_j x}` with
//! `ξ_j = 2πj/X`, `j ∈ {−n/2, …, n/2−1}`. The DtN map multiplies mode `j` by
//! `−k(ξ_j) − αξ_j²` and the extension to height `y` by `φ_{ξ_j}(y)`, using
//! `k(−ξ) = conj k(ξ)` and `φ_{−ξ} = conj φ_ξ`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use krein_core::propagator::{bounded_solution, evaluate_at, weyl_k, weyl_k_extrapolated, weyl_with_grid, WeylError};
use krein_core::{Complex64, GridPolicy, StringCoefficients, WeylResult};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, thiserror::Error)]
pub enum ExtensionError {
    #[error("sample count {0} must be a power of two and at least 4")]
    SampleCount(usize),
    #[error("period {0} must be positive and finite")]
    Period(f64),
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(f64, f64),
    #[error("Weyl function failed at mode {mode} (ξ = {xi}): {cause:?}")]
    Weyl { mode: i64, xi: f64, cause: WeylError },
    #[error("height {y} is outside [0, {r})")]
    Height { y: f64, r: f64 },
}

/// Samples `f(jX/n)`, `j = 0, …, n−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub period: f64,
    pub values: Vec<Complex64>,
}

fn fft(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

impl SampledFunction {
    pub fn new(period: f64, values: Vec<Complex64>) -> Result<Self, ExtensionError> {
        let n = values.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(ExtensionError::SampleCount(n));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(ExtensionError::Period(period));
        }
        Ok(SampledFunction { period, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(period: f64, n: usize, f: F) -> Self {
        let values = (0..n).map(|j| f(period * j as f64 / n as f64)).collect();
        SampledFunction::new(period, values).expect("valid sampling")
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(period: f64, n: usize, f: F) -> Self {
        Self::from_fn(period, n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.period * j as f64 / self.len() as f64
    }

    /// Signed mode number of FFT bin `j`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.len();
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Bin `n/2`, which stands for both `±ξ`; multipliers there are averaged
    /// over the pair so that real input stays real.
    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.len() / 2
    }

    /// `ξ` of FFT bin `j`.
    pub fn frequency(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.period
    }

    /// Fourier coefficients `f̂_j = (1/n) Σ f(x_l) e^{−iξ_j x_l}` in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft(buf.len(), false).process(&mut buf);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }

    pub fn from_spectrum(period: f64, spectrum: &[Complex64]) -> Result<Self, ExtensionError> {
        let mut buf = spectrum.to_vec();
        fft(buf.len(), true).process(&mut buf);
        SampledFunction::new(period, buf)
    }

    /// Applies `m(ξ_j)` mode by mode.
    pub fn multiply<M: Fn(f64) -> Complex64>(&self, m: M) -> Self {
        let spec: Vec<Complex64> = self.spectrum().iter().enumerate().map(|(j, c)| c * m(self.frequency(j))).collect();
        SampledFunction::from_spectrum(self.period, &spec).expect("same sampling")
    }

    /// Discrete `L²` norm `(X/n · Σ|f_j|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.period / self.len() as f64 * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Norm of a spectrum in the same units as [`SampledFunction::norm`].
pub fn spectrum_norm(period: f64, spectrum: &[Complex64]) -> f64 {
    (period * spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// `k(ξ)` of one string with results cached per `ξ`.
///
/// Missing values are computed in parallel and stored in a fixed order.
pub struct DtnOperator {
    pub coefficients: StringCoefficients,
    pub policy: GridPolicy,
    pub tol: f64,
    /// Use the refinement-extrapolated evaluation.
    pub extrapolate: bool,
    cache: Mutex<HashMap<u64, WeylResult>>,
}

impl DtnOperator {
    pub fn new(coefficients: StringCoefficients, policy: GridPolicy, tol: f64) -> Self {
        DtnOperator { coefficients, policy, tol, extrapolate: true, cache: Mutex::new(HashMap::new()) }
    }

    /// Origin atom `α`.
    pub fn alpha(&self) -> f64 {
        self.coefficients.alpha0()
    }

    fn compute(&self, xi: f64) -> Result<WeylResult, WeylError> {
        let z = Complex64::new(xi, 0.0);
        if self.extrapolate {
            weyl_k_extrapolated(&self.coefficients, &self.policy, z, self.tol)
        } else {
            weyl_k(&self.coefficients, &self.policy, z, self.tol)
        }
    }

    /// `k(ξ)` for `ξ ≥ 0` from the cache or the propagator.
    fn positive(&self, xis: &[f64]) -> Result<Vec<WeylResult>, (f64, WeylError)> {
        let missing: Vec<f64> = {
            let cache = self.cache.lock().unwrap();
            let mut m: Vec<f64> = xis.iter().copied().filter(|x| !cache.contains_key(&x.to_bits())).collect();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            m.dedup();
            m
        };
        let fresh: Vec<Result<WeylResult, (f64, WeylError)>> =
            missing.par_iter().map(|&x| self.compute(x).map_err(|e| (x, e))).collect();
        let mut cache = self.cache.lock().unwrap();
        for (x, r) in missing.iter().zip(fresh) {
            cache.insert(x.to_bits(), r?);
        }
        Ok(xis.iter().map(|x| cache[&x.to_bits()]).collect())
    }

    /// `k(ξ)` on the real line with `k(−ξ) = conj k(ξ)`.
    pub fn symbols(&self, xis: &[f64]) -> Result<Vec<Complex64>, (f64, WeylError)> {
        let abs: Vec<f64> = xis.iter().map(|x| x.abs()).collect();
        let r = self.positive(&abs)?;
        Ok(xis.iter().zip(r).map(|(x, w)| if *x < 0.0 { w.k.conj() } else { w.k }).collect())
    }

    pub fn symbol(&self, xi: f64) -> Result<Complex64, (f64, WeylError)> {
        Ok(self.symbols(&[xi])?[0])
    }

    /// `−k(ξ_j)` on the modes of `f` (no `α` term).
    fn multipliers(&self, f: &SampledFunction) -> Result<Vec<Complex64>, ExtensionError> {
        let xis: Vec<f64> = (0..f.len()).map(|j| f.frequency(j)).collect();
        let ks = self.symbols(&xis).map_err(|(x, cause)| {
            let j = xis.iter().position(|&y| y.abs() == x).unwrap_or(0);
            ExtensionError::Weyl { mode: f.mode(j), xi: xis[j], cause }
        })?;
        Ok(ks.into_iter().enumerate().map(|(j, k)| if f.is_nyquist(j) { Complex64::new(-k.re, 0.0) } else { -k }).collect())
    }

    /// `Kf` with symbol `−k(ξ) − αξ²`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction, ExtensionError> {
        let (out, _) = self.apply_with_spectrum(f, true)?;
        Ok(out)
    }

    /// `Kf` and its spectrum; `with_alpha = false` drops the `αf″` term.
    pub fn apply_with_spectrum(&self, f: &SampledFunction, with_alpha: bool) -> Result<(SampledFunction, Vec<Complex64>), ExtensionError> {
        let m = self.multipliers(f)?;
        let alpha = if with_alpha { self.alpha() } else { 0.0 };
        let spec: Vec<Complex64> = f
            .spectrum()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let xi = f.frequency(j);
                c * (m[j] - alpha * xi * xi)
            })
            .collect();
        Ok((SampledFunction::from_spectrum(f.period, &spec)?, spec))
    }

    /// `φ_ξ(y)` for each height (`φ_ξ(0) = 1`), `ξ ≥ 0`.
    fn profile(&self, xi: f64, heights: &[f64]) -> Result<Vec<Complex64>, WeylError> {
        let r = self.coefficients.r;
        if xi == 0.0 {
            return Ok(heights.iter().map(|&y| Complex64::new(if r.is_finite() { 1.0 - y / r } else { 1.0 }, 0.0)).collect());
        }
        let mut p = self.policy.clone();
        p.extra_nodes.extend(heights.iter().copied().filter(|&y| y > 0.0));
        let z = Complex64::new(xi, 0.0);
        let (_, d) = weyl_with_grid(&self.coefficients, &p, z, self.tol)?;
        let trace = bounded_solution(&d, z);
        Ok(heights
            .iter()
            .map(|&y| if y >= d.end() { Complex64::new(0.0, 0.0) } else { evaluate_at(&d, &trace, y).0 })
            .collect())
    }

    /// `u(·, y)` with `û(ξ, y) = f̂(ξ)φ_ξ(y)`.
    pub fn extend(&self, f: &SampledFunction, heights: &[f64]) -> Result<Vec<SampledFunction>, ExtensionError> {
        let r = self.coefficients.r;
        for &y in heights {
            if !(y >= 0.0 && y < r) {
                return Err(ExtensionError::Height { y, r });
            }
        }
        let spec = f.spectrum();
        let mut xs: Vec<f64> = (0..f.len()).map(|j| f.frequency(j).abs()).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let profiles: Vec<Result<Vec<Complex64>, (f64, WeylError)>> =
            xs.par_iter().map(|&x| self.profile(x, heights).map_err(|e| (x, e))).collect();
        let mut table = HashMap::new();
        for (x, p) in xs.iter().zip(profiles) {
            let p = p.map_err(|(x, cause)| {
                let j = (0..f.len()).find(|&j| f.frequency(j).abs() == x).unwrap_or(0);
                ExtensionError::Weyl { mode: f.mode(j), xi: f.frequency(j), cause }
            })?;
            table.insert(x.to_bits(), p);
        }
        heights
            .iter()
            .enumerate()
            .map(|(h, _)| {
                let s: Vec<Complex64> = spec
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let xi = f.frequency(j);
                        let phi = table[&xi.abs().to_bits()][h];
                        c * if f.is_nyquist(j) {
                            Complex64::new(phi.re, 0.0)
                        } else if xi < 0.0 {
                            phi.conj()
                        } else {
                            phi
                        }
                    })
                    .collect();
                SampledFunction::from_spectrum(f.period, &s)
            })
            .collect()
    }

    /// `(u(·, y) − f)/y` against `Kf` without the `αf″` term, for each `y`.
    pub fn difference_quotient_check(&self, f: &SampledFunction, ys: &[f64]) -> Result<QuotientReport, ExtensionError> {
        let (target, _) = self.apply_with_spectrum(f, false)?;
        let us = self.extend(f, ys)?;
        let errors: Vec<f64> = ys
            .iter()
            .zip(&us)
            .map(|(&y, u)| {
                let q = SampledFunction {
                    period: f.period,
                    values: u.values.iter().zip(&f.values).map(|(a, b)| (a - b) / y).collect(),
                };
                q.max_abs_diff(&target)
            })
            .collect();
        let scale = target.max_abs().max(f.max_abs());
        Ok(QuotientReport { ys: ys.to_vec(), errors, scale, rate: None }.with_rate())
    }
}

/// Least-squares slope of `log e` against `log y`.
fn fit_rate(ys: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ys.iter().zip(errors).filter(|(_, e)| **e > 0.0).map(|(y, e)| (y.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Convergence of the difference quotient toward the DtN output.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientReport {
    pub ys: Vec<f64>,
    /// Sup error at each height.
    pub errors: Vec<f64>,
    /// Sup of `|f|` and `|Kf|`, for relative comparisons.
    pub scale: f64,
    /// Fitted order of convergence, if the errors are not all at roundoff.
    pub rate: Option<f64>,
}

impl QuotientReport {
    fn with_rate(mut self) -> Self {
        let floor = 1e-11 * self.scale.max(1.0);
        let ys: Vec<f64> = self.ys.iter().zip(&self.errors).filter(|(_, e)| **e > floor).map(|(y, _)| *y).collect();
        let es: Vec<f64> = self.errors.iter().copied().filter(|e| *e > floor).collect();
        self.rate = fit_rate(&ys, &es);
        self
    }

    /// Exact up to roundoff.
    pub fn exact(&self) -> bool {
        self.errors.iter().all(|e| *e <= 1e-11 * self.scale.max(1.0))
    }

    /// Exact, or first order within a factor of two.
    pub fn first_order(&self) -> bool {
        self.exact() || self.rate.is_some_and(|r| (0.5..=2.0).contains(&r))
    }
}

/// [`DtnOperator::apply`] with the default grid.
pub fn apply_dtn(s: &StringCoefficients, f: &SampledFunction, tol: f64) -> Result<SampledFunction, ExtensionError> {
    DtnOperator::new(s.clone(), GridPolicy::default(), tol).apply(f)
}

/// [`DtnOperator::extend`] with the default grid.
pub fn harmonic_extend(s: &StringCoefficients, f: &SampledFunction, heights: &[f64], tol: f64) -> Result<Vec<SampledFunction>, ExtensionError> {
    DtnOperator::new(s.clone(), GridPolicy::default(), tol).extend(f, heights)
}

/// [`DtnOperator::difference_quotient_check`] with the default grid.
pub fn dtn_difference_quotient_check(s: &StringCoefficients, f: &SampledFunction, ys: &[f64], tol: f64) -> Result<QuotientReport, ExtensionError> {
    DtnOperator::new(s.clone(), GridPolicy::default(), tol).difference_quotient_check(f, ys)
}
