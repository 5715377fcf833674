//! Exact propagation of `φ'' = ξ² a φ − 2iξ b φ'` on a [`DiscretizedString`].
//!
//! Inside a cell the coefficients are `b = b̄` and `a = b̄²·dy`, for which the
//! sheared solution `e^{iξB}φ` is affine. Sweeps run in sheared variables
//! and only leave them to record a node. The point mass of the cell and any input atom on a node act
//! as kicks `φ' ↦ φ' + ξ² m φ`. Derivatives are left-continuous.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::strings::{discretize, DiscretizeError, DiscretizedString, GridPolicy, StringCoefficients};
use crate::summation::pairwise_sum;

/// `(φ, φ')` at a point.
pub type State = (Complex64, Complex64);

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;
const MAX_TAIL_DOUBLINGS: u32 = 48;
const MAX_CELLS: usize = 1 << 24;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Flow across `dt` (negative allowed) where `b` is constant and `a = b²·dy`.
pub fn propagate_cell(state: State, xi: Complex64, dt: f64, b: f64) -> State {
    let (s, log) = propagate_cell_scaled(state, xi, dt, b);
    let m = libm::exp(log);
    (s.0 * m, s.1 * m)
}

/// [`propagate_cell`] with the modulus of the shear factor returned as a log.
fn propagate_cell_scaled(state: State, xi: Complex64, dt: f64, b: f64) -> (State, f64) {
    let (phi, dphi) = state;
    let w = I * xi * b;
    let z = -w * dt;
    let e = Complex64::new(libm::cos(z.im), libm::sin(z.im));
    let slope = dphi + w * phi;
    let lin = phi + slope * dt;
    ((e * lin, e * (slope - w * lin)), z.re)
}

/// Kick from a point mass: `φ' ↦ φ' + ξ² m φ`.
pub fn apply_mass(state: State, xi: Complex64, m: f64) -> State {
    if m == 0.0 {
        return state;
    }
    (state.0, state.1 + xi * xi * m * state.0)
}

/// Sheared state `(φ̃, ψ) = e^{iξB}(φ, φ' + iξb̄φ)` with `b̄` from the current cell.
/// Inside a cell `φ̃` is affine with slope `ψ`, so no cancellation builds up.
type Sheared = (Complex64, Complex64);

fn shear_step(d: &DiscretizedString, k: usize, s: Sheared, xi: Complex64) -> Sheared {
    let dt = d.grid[k + 1] - d.grid[k];
    let off = d.kick_offset[k];
    let (mut u, mut v) = s;
    if k > 0 {
        v += I * xi * (d.bconst[k] - d.bconst[k - 1]) * u;
    }
    v += xi * xi * d.node_atoms[k] * u;
    u += v * off;
    v += xi * xi * d.kick_mass[k] * u;
    u += v * (dt - off);
    (u, v)
}

fn shear_unstep(d: &DiscretizedString, k: usize, s: Sheared, xi: Complex64) -> Sheared {
    let dt = d.grid[k + 1] - d.grid[k];
    let off = d.kick_offset[k];
    let (mut u, mut v) = s;
    u -= v * (dt - off);
    v -= xi * xi * d.kick_mass[k] * u;
    u -= v * off;
    v -= xi * xi * d.node_atoms[k] * u;
    if k > 0 {
        v -= I * xi * (d.bconst[k] - d.bconst[k - 1]) * u;
    }
    (u, v)
}

/// `b̄` seen by the left-continuous derivative at node `k`.
fn b_left(d: &DiscretizedString, k: usize) -> f64 {
    match d.bconst.len() {
        0 => 0.0,
        _ => d.bconst[k.max(1) - 1],
    }
}

/// Back to `(φ, φ'(t_k⁻))` at node `k`, with the modulus of `e^{−iξB}` as a log.
fn unshear(d: &DiscretizedString, k: usize, s: Sheared, xi: Complex64) -> (State, f64) {
    let z = -I * xi * d.bcum[k];
    let e = Complex64::new(libm::cos(z.im), libm::sin(z.im));
    let w = I * xi * b_left(d, k);
    ((e * s.0, e * (s.1 - w * s.0)), z.re)
}

/// Sampled solution; true values are `phi[k]·e^{log_scale[k]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionTrace {
    pub xi: Complex64,
    pub grid: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub log_scale: Vec<f64>,
}

impl SolutionTrace {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn phi_at(&self, k: usize) -> Complex64 {
        self.phi[k] * libm::exp(self.log_scale[k])
    }

    pub fn dphi_at(&self, k: usize) -> Complex64 {
        self.dphi[k] * libm::exp(self.log_scale[k])
    }

    pub fn state_at(&self, k: usize) -> State {
        (self.phi_at(k), self.dphi_at(k))
    }

    /// `−φ'(0)/φ(0)`.
    pub fn weyl(&self) -> Complex64 {
        -self.dphi[0] / self.phi[0]
    }

    /// `φ̃ = e^{iξB}φ` at every node.
    pub fn sheared(&self, d: &DiscretizedString) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| (I * self.xi * d.bcum[k]).exp() * self.phi_at(k))
            .collect()
    }

    /// `|φ(t_k)|²` at every node.
    pub fn modulus_squared(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.phi_at(k).norm_sqr()).collect()
    }
}

/// Forward propagation of an initial state over the whole grid.
pub fn propagate(d: &DiscretizedString, xi: Complex64, init: State) -> SolutionTrace {
    let (mut pair, _) = propagate_pair(d, xi, [init, (ZERO, ZERO)]);
    pair.swap_remove(0)
}

fn propagate_pair(d: &DiscretizedString, xi: Complex64, init: [State; 2]) -> (Vec<SolutionTrace>, f64) {
    let n = d.grid.len();
    let mut out: Vec<SolutionTrace> = (0..2)
        .map(|_| SolutionTrace {
            xi,
            grid: d.grid.clone(),
            phi: Vec::with_capacity(n),
            dphi: Vec::with_capacity(n),
            log_scale: Vec::with_capacity(n),
        })
        .collect();
    let w0 = I * xi * b_left(d, 0);
    let mut s: [Sheared; 2] = [(init[0].0, init[0].1 + w0 * init[0].0), (init[1].0, init[1].1 + w0 * init[1].0)];
    let mut ls = 0.0;
    for k in 0..n {
        for (t, st) in out.iter_mut().zip(s.iter()) {
            let ((p, dp), log) = unshear(d, k, *st, xi);
            t.phi.push(p);
            t.dphi.push(dp);
            t.log_scale.push(ls + log);
        }
        if k + 1 == n {
            break;
        }
        s = [shear_step(d, k, s[0], xi), shear_step(d, k, s[1], xi)];
        let big = s.iter().map(|st| st.0.norm().max(st.1.norm())).fold(0.0, f64::max);
        if big > RESCALE_ABOVE || (big < RESCALE_BELOW && big > 0.0) {
            let f = 1.0 / big;
            for st in s.iter_mut() {
                st.0 *= f;
                st.1 *= f;
            }
            ls += libm::log(big);
        }
    }
    (out, ls)
}

/// `(φ_D, φ_N)` with `φ_D(0) = φ_N'(0) = 0`, `φ_D'(0) = φ_N(0) = 1`.
///
/// The atom at the origin is not part of the propagation. Both traces share
/// their `log_scale`.
pub fn solve_fundamental(d: &DiscretizedString, xi: Complex64) -> (SolutionTrace, SolutionTrace) {
    let (mut v, _) = propagate_pair(d, xi, [(ZERO, ONE), (ONE, ZERO)]);
    let n = v.pop().unwrap();
    let dd = v.pop().unwrap();
    (dd, n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylResult {
    pub k: Complex64,
    /// Bound on `|k − k_exact|` from the truncation point.
    pub truncation_bound: f64,
    /// The bound is only heuristic (non-real `ξ`).
    pub heuristic: bool,
    pub t_used: f64,
    pub n_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeylError {
    Discretize(DiscretizeError),
    BoundNotAchieved { best: WeylResult },
}

impl From<DiscretizeError> for WeylError {
    fn from(e: DiscretizeError) -> Self {
        WeylError::Discretize(e)
    }
}

fn zero_frequency(r: f64) -> WeylResult {
    WeylResult {
        k: Complex64::new(if r.is_finite() { 1.0 / r } else { 0.0 }, 0.0),
        truncation_bound: 0.0,
        heuristic: false,
        t_used: 0.0,
        n_used: 0,
    }
}

/// `k = φ_N(T)/φ_D(T)` at the last node of a fixed grid.
pub fn weyl_k_on(d: &DiscretizedString, xi: Complex64) -> WeylResult {
    if xi == ZERO {
        return zero_frequency(d.r);
    }
    let (pd, pn) = solve_fundamental(d, xi);
    let last = d.grid.len() - 1;
    let k = pn.phi[last] / pd.phi[last];
    let t = d.end();
    let mag = pd.phi[last].norm() * libm::exp(pd.log_scale[last]);
    let bound = if t >= d.r {
        0.0
    } else if d.r.is_finite() {
        2.0 * libm::sqrt(1.0 - t / d.r) / mag
    } else {
        2.0 / mag
    };
    WeylResult { k, truncation_bound: bound, heuristic: xi.im != 0.0, t_used: t, n_used: d.cells() }
}

/// Weyl function with truncation control, plus the grid that achieved it.
///
/// Infinite strings get tail segments appended (each doubling the
/// truncation point) until the bound drops below `tol`. For non-real `ξ` the
/// change between doublings is used instead; if roundoff stops it shrinking
/// the last improving result is returned with that change as its bound.
pub fn weyl_with_grid(
    c: &StringCoefficients,
    policy: &GridPolicy,
    xi: Complex64,
    tol: f64,
) -> Result<(WeylResult, DiscretizedString), WeylError> {
    let mut p = policy.clone();
    let mut prev: Option<(WeylResult, DiscretizedString, f64)> = None;
    loop {
        let d = discretize(c, &p)?;
        let mut res = weyl_k_on(&d, xi);
        if xi == ZERO || (res.truncation_bound < tol && !res.heuristic) || !d.truncated() {
            return Ok((res, d));
        }
        let exhausted = c.r.is_finite() || p.tail_doublings >= MAX_TAIL_DOUBLINGS || d.cells() + p.tail_cells > MAX_CELLS;
        // Off the real axis the bound is only a guide: fall back on the change
        // between doublings, and stop once roundoff makes it grow again.
        if res.heuristic {
            if let Some((r0, d0, last)) = prev.take() {
                let step = (res.k - r0.k).norm();
                if step < tol * res.k.norm().max(1.0) {
                    res.truncation_bound = step;
                    return Ok((res, d));
                }
                if step >= last {
                    let mut r0 = r0;
                    r0.truncation_bound = last;
                    return Ok((r0, d0));
                }
                prev = Some((res, d, step));
            } else {
                prev = Some((res, d, f64::INFINITY));
            }
        }
        if exhausted {
            return Err(WeylError::BoundNotAchieved { best: res });
        }
        p.tail_doublings += 1;
    }
}

/// Weyl function `k(ξ) = lim φ_N(t)/φ_D(t)` of the string without its origin atom.
pub fn weyl_k(c: &StringCoefficients, policy: &GridPolicy, xi: Complex64, tol: f64) -> Result<WeylResult, WeylError> {
    if xi == ZERO {
        return Ok(zero_frequency(c.r));
    }
    weyl_with_grid(c, policy, xi, tol).map(|r| r.0)
}

/// [`weyl_k`] on the grid and on its refinement, combined as `(4k_{2n} − k_n)/3`.
///
/// Removes the leading `h²` term for strings with smooth coefficients. The
/// bound covers truncation of both evaluations.
pub fn weyl_k_extrapolated(c: &StringCoefficients, policy: &GridPolicy, xi: Complex64, tol: f64) -> Result<WeylResult, WeylError> {
    let coarse = weyl_k(c, policy, xi, tol)?;
    let mut p = policy.clone();
    p.cells *= 2;
    p.tail_cells *= 2;
    let fine = weyl_k(c, &p, xi, tol)?;
    Ok(WeylResult {
        k: (fine.k * 4.0 - coarse.k) / 3.0,
        truncation_bound: (4.0 * fine.truncation_bound + coarse.truncation_bound) / 3.0,
        ..fine
    })
}

/// The solution with `φ(0) = 1` that vanishes at the grid end.
///
/// Computed by shooting backwards from `(0, 1)` at the last node, where that
/// solution is the growing one, then normalizing. On a grid reaching a finite
/// `R` this is the bounded solution; on a truncated grid it is the truncated
/// approximation whose Weyl value equals [`weyl_k_on`].
pub fn bounded_solution(d: &DiscretizedString, xi: Complex64) -> SolutionTrace {
    let n = d.grid.len();
    if xi == ZERO {
        let (phi, dphi) = if d.r.is_finite() {
            (d.grid.iter().map(|t| Complex64::new(1.0 - t / d.r, 0.0)).collect(), alloc::vec![Complex64::new(-1.0 / d.r, 0.0); n])
        } else {
            (alloc::vec![ONE; n], alloc::vec![ZERO; n])
        };
        return SolutionTrace { xi, grid: d.grid.clone(), phi, dphi, log_scale: alloc::vec![0.0; n] };
    }
    let mut phi = alloc::vec![ZERO; n];
    let mut dphi = alloc::vec![ZERO; n];
    let mut ls = alloc::vec![0.0; n];
    let mut s: Sheared = (ZERO, ONE);
    let mut scale = 0.0;
    let ((p, dp), log) = unshear(d, n - 1, s, xi);
    phi[n - 1] = p;
    dphi[n - 1] = dp;
    ls[n - 1] = log;
    for k in (0..n - 1).rev() {
        s = shear_unstep(d, k, s, xi);
        let big = s.0.norm().max(s.1.norm());
        if big > RESCALE_ABOVE || (big < RESCALE_BELOW && big > 0.0) {
            s.0 /= big;
            s.1 /= big;
            scale += libm::log(big);
        }
        let ((p, dp), log) = unshear(d, k, s, xi);
        phi[k] = p;
        dphi[k] = dp;
        ls[k] = scale + log;
    }
    let p0 = phi[0];
    let base = ls[0];
    for k in 0..n {
        phi[k] /= p0;
        dphi[k] /= p0;
        ls[k] = -(base - ls[k]);
    }
    SolutionTrace { xi, grid: d.grid.clone(), phi, dphi, log_scale: ls }
}

/// `(φ(y), φ'(y⁻))` at an arbitrary height inside the grid.
pub fn evaluate_at(d: &DiscretizedString, trace: &SolutionTrace, y: f64) -> State {
    let k = d.cell_of(y);
    let tk = d.grid[k];
    let mut s = trace.state_at(k);
    if y <= tk {
        return s;
    }
    if k + 1 < d.grid.len() && y >= d.grid[k + 1] {
        return trace.state_at(k + 1);
    }
    let xi = trace.xi;
    let b = d.bconst[k];
    let off = d.kick_offset[k];
    let h = y - tk;
    s = apply_mass(s, xi, d.node_atoms[k]);
    if h <= off {
        return propagate_cell(s, xi, h, b);
    }
    s = propagate_cell(s, xi, off, b);
    s = apply_mass(s, xi, d.kick_mass[k]);
    propagate_cell(s, xi, h - off, b)
}

/// `W = φ_a' φ_b − φ_a φ_b'` at node `k`.
pub fn wronskian(a: &SolutionTrace, b: &SolutionTrace, k: usize) -> Complex64 {
    let w = a.dphi[k] * b.phi[k] - a.phi[k] * b.dphi[k];
    let m = w.norm();
    if m == 0.0 {
        return w;
    }
    w / m * libm::exp(libm::log(m) + a.log_scale[k] + b.log_scale[k])
}

/// Largest node deviation of `W(φ_D, φ)` from `e^{−2iξB}` relative to `|e^{−2iξB}|`.
pub fn wronskian_deviation(d: &DiscretizedString, a: &SolutionTrace, b: &SolutionTrace) -> f64 {
    let xi = a.xi;
    (0..a.len())
        .map(|k| {
            let w = a.dphi[k] * b.phi[k] - a.phi[k] * b.dphi[k];
            let ls = a.log_scale[k] + b.log_scale[k];
            (w * (2.0 * I * xi * d.bcum[k] + ls).exp() - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest node deviation of `W` from `e^{−2iξB}` relative to the size of
/// the two products forming it, i.e. in units of the rounding it incurs.
pub fn wronskian_roundoff(d: &DiscretizedString, a: &SolutionTrace, b: &SolutionTrace) -> f64 {
    let xi = a.xi;
    (0..a.len())
        .map(|k| {
            let p = a.dphi[k] * b.phi[k];
            let q = a.phi[k] * b.dphi[k];
            let ls = a.log_scale[k] + b.log_scale[k];
            let target = (-2.0 * I * xi * d.bcum[k] - ls).exp();
            let scale = (p.norm() + q.norm()).max(target.norm());
            (p - q - target).norm() / scale
        })
        .fold(0.0, f64::max)
}

/// Energy identity `ξ²∫|φ̃|²dã + ∫|φ̃'|² = Re k` on a bounded-solution trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    /// `|lhs − Re k|/max(Re k, 1e−30)`.
    pub residual: f64,
    pub lhs: f64,
    pub re_k: f64,
    /// Node where the tail is measured (nearest to half the grid end).
    pub tail_from: f64,
    pub tail: f64,
    /// `min(Re k, 2/t)`.
    pub tail_bound: f64,
    /// `max(0, tail − tail_bound)`.
    pub tail_violation: f64,
}

fn cell_energy(d: &DiscretizedString, k: usize, s: State, xi: f64) -> f64 {
    let x = Complex64::new(xi, 0.0);
    let dt = d.grid[k + 1] - d.grid[k];
    let b = d.bconst[k];
    let off = d.kick_offset[k];
    let shear = I * x * b;
    let xi2 = xi * xi;
    let mut e = xi2 * d.node_atoms[k] * s.0.norm_sqr();
    let s = apply_mass(s, x, d.node_atoms[k]);
    e += (s.1 + shear * s.0).norm_sqr() * off;
    let s = propagate_cell(s, x, off, b);
    e += xi2 * d.kick_mass[k] * s.0.norm_sqr();
    let s = apply_mass(s, x, d.kick_mass[k]);
    e += (s.1 + shear * s.0).norm_sqr() * (dt - off);
    e
}

/// Per-cell closed-form evaluation of the energy identity for real `ξ`.
pub fn energy_residual(d: &DiscretizedString, xi: f64, trace: &SolutionTrace) -> EnergyReport {
    let n = d.cells();
    let cells: Vec<f64> = (0..n).map(|k| cell_energy(d, k, trace.state_at(k), xi)).collect();
    let lhs = pairwise_sum(&cells);
    let re_k = trace.weyl().re;
    let half = 0.5 * d.end();
    let kt = d.grid.partition_point(|&t| t < half).min(n.saturating_sub(1)).max(1.min(n - 1));
    let tail_from = d.grid[kt];
    let tail = pairwise_sum(&cells[kt..]);
    let tail_bound = re_k.min(2.0 / tail_from);
    EnergyReport {
        residual: (lhs - re_k).abs() / re_k.max(1e-30),
        lhs,
        re_k,
        tail_from,
        tail,
        tail_bound,
        tail_violation: (tail - tail_bound).max(0.0),
    }
}

/// Shape of `|φ|²` and `|φ'|` along the nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeReport {
    /// Largest increase of `|φ|²` between neighbours (should be ≤ 0).
    pub max_first_difference: f64,
    /// Smallest grid-weighted second difference of `|φ|²` (should be ≥ 0).
    pub min_second_difference: f64,
    /// Largest increase of `|φ'|` between neighbours (should be ≤ 0).
    pub max_derivative_increase: f64,
}

impl ShapeReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_first_difference <= tol && self.min_second_difference >= -tol && self.max_derivative_increase <= tol
    }
}

/// Convexity and monotonicity diagnostics of a bounded-solution trace.
///
/// On a non-uniform grid the second difference is
/// `f_{k+1} − f_k − (h_k/h_{k−1})(f_k − f_{k−1})`.
pub fn shape_report(trace: &SolutionTrace) -> ShapeReport {
    let f = trace.modulus_squared();
    let g: Vec<f64> = (0..trace.len()).map(|k| trace.dphi_at(k).norm()).collect();
    let t = &trace.grid;
    let mut first = f64::NEG_INFINITY;
    let mut second = f64::INFINITY;
    let mut deriv = f64::NEG_INFINITY;
    for k in 0..f.len().saturating_sub(1) {
        first = first.max(f[k + 1] - f[k]);
        deriv = deriv.max(g[k + 1] - g[k]);
        if k > 0 {
            let ratio = (t[k + 1] - t[k]) / (t[k] - t[k - 1]);
            second = second.min(f[k + 1] - f[k] - ratio * (f[k] - f[k - 1]));
        }
    }
    ShapeReport { max_first_difference: first, min_second_difference: second, max_derivative_increase: deriv }
}
