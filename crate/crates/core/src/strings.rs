//! Coefficient triples `(R, a, b)` and their atomized discretization.
//!
//! A [`DiscretizedString`] replaces `b` by its cell averages and the
//! measure `a` on each cell by `b̄²·dy` plus a single point mass
//! `a(cell) − b̄²·Δt` placed at the cell's centre of mass. Both pieces are
//! non-negative whenever `a − b²dy` is, so the discretized string is itself
//! a valid string and its ODE can be propagated exactly.

use alloc::vec;
use alloc::vec::Vec;

use crate::piecewise::{PieceKind, PiecewiseFn, MAX_POLY_DEGREE};

/// Relative slack allowed when checking `a − b²dy ≥ 0` cell by cell.
pub const TOL_STRUCT: f64 = 1e-12;

/// Default truncation point for infinite strings.
pub const DEFAULT_TRUNCATION: f64 = 16.0;

const REFERENCE_CELLS: usize = 64;
const REFERENCE_HORIZON_DOUBLINGS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub y: f64,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StringCoefficients {
    /// Length of the string; `f64::INFINITY` allowed.
    pub r: f64,
    pub atoms: Vec<Atom>,
    pub density: PiecewiseFn,
    pub b: PiecewiseFn,
}

impl StringCoefficients {
    pub fn new(r: f64, atoms: Vec<Atom>, density: PiecewiseFn, b: PiecewiseFn) -> Self {
        StringCoefficients { r, atoms, density, b }
    }

    /// The zero string of length `r`.
    pub fn zero(r: f64) -> Self {
        StringCoefficients::new(r, Vec::new(), PiecewiseFn::zero(), PiecewiseFn::zero())
    }

    /// Mass of the atom at the origin.
    pub fn alpha0(&self) -> f64 {
        self.atoms.iter().filter(|a| a.y == 0.0).map(|a| a.m).sum()
    }

    /// No atom at the origin.
    pub fn is_star(&self) -> bool {
        self.alpha0() == 0.0
    }

    /// Same string with the atom at the origin removed.
    pub fn without_origin_atom(&self) -> Self {
        let mut out = self.clone();
        out.atoms.retain(|a| a.y != 0.0);
        out
    }

    /// `a([0, t))` in closed form, including an atom at the origin.
    pub fn cumulative_a(&self, t: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.y < t).map(|a| a.m).sum();
        atoms + self.density.integral(0.0, t)
    }

    /// `B(t) = ∫_0^t b`.
    pub fn cumulative_b(&self, t: f64) -> f64 {
        self.b.integral(0.0, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NonPositiveLength,
    AtomOutOfRange,
    AtomOrder,
    NonPositiveAtom,
    PieceOrder,
    PieceOutOfRange,
    PolyDegree,
    NonIntegrableDensity,
    NonSquareIntegrableB,
    NegativeDensity,
    NegativeTildeA,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Location (start of the offending cell, piece or atom).
    pub at: f64,
    /// Size of the violation where meaningful.
    pub amount: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, at: f64, amount: f64) {
        self.violations.push(Violation { kind, at, amount });
    }
}

fn check_pieces(f: &PiecewiseFn, r: f64, min_alpha: f64, bad_exponent: ViolationKind, report: &mut ValidationReport) {
    let mut last = 0.0;
    for p in &f.pieces {
        if !(p.from.is_finite() && !p.to.is_nan()) {
            report.push(ViolationKind::NonFinite, p.from, 0.0);
            continue;
        }
        if p.from < last || p.to <= p.from {
            report.push(ViolationKind::PieceOrder, p.from, 0.0);
        }
        if p.from < 0.0 || p.to > r {
            report.push(ViolationKind::PieceOutOfRange, p.from, 0.0);
        }
        last = p.to;
        match &p.kind {
            PieceKind::Poly { coeffs, origin } => {
                if coeffs.len() > MAX_POLY_DEGREE + 1 && p.kind.degree().unwrap_or(0) > MAX_POLY_DEGREE {
                    report.push(ViolationKind::PolyDegree, p.from, coeffs.len() as f64 - 1.0);
                }
                if coeffs.iter().any(|c| !c.is_finite()) || !origin.is_finite() {
                    report.push(ViolationKind::NonFinite, p.from, 0.0);
                }
            }
            PieceKind::Power { c, alpha } => {
                if !c.is_finite() || !alpha.is_finite() {
                    report.push(ViolationKind::NonFinite, p.from, 0.0);
                } else if *alpha <= min_alpha && p.from == 0.0 && *c != 0.0 {
                    report.push(bad_exponent, p.from, *alpha);
                }
            }
        }
    }
}

/// Cells of the reference partition used for the `ã ≥ 0` check.
pub fn reference_partition(c: &StringCoefficients) -> Vec<f64> {
    let mut knots = vec![0.0];
    knots.extend(c.density.breakpoints());
    knots.extend(c.b.breakpoints());
    knots.extend(c.atoms.iter().map(|a| a.y));
    knots.retain(|x| *x >= 0.0 && *x < c.r);
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let mut cells = Vec::new();
    for (i, &u) in knots.iter().enumerate() {
        let v = knots.get(i + 1).copied().unwrap_or(c.r);
        if v.is_finite() {
            if u == 0.0 {
                // geometric refinement towards a possibly singular origin
                for j in (1..=20).rev() {
                    cells.push(v * libm::ldexp(1.0, -j));
                }
                cells.pop();
            }
            for j in 0..REFERENCE_CELLS {
                cells.push(u + (v - u) * j as f64 / REFERENCE_CELLS as f64);
            }
        } else {
            let w = if u > 0.0 { u } else { 1.0 };
            if u == 0.0 {
                for j in 0..REFERENCE_CELLS {
                    cells.push(j as f64 / REFERENCE_CELLS as f64);
                }
            } else {
                cells.push(u);
            }
            for j in 0..REFERENCE_HORIZON_DOUBLINGS {
                let a = w * libm::ldexp(1.0, j as i32);
                for i in 0..8 {
                    cells.push(a + a * i as f64 / 8.0);
                }
            }
        }
    }
    if c.r.is_finite() {
        cells.push(c.r);
    } else {
        cells.push(knots.last().copied().unwrap_or(0.0).max(1.0) * libm::ldexp(1.0, REFERENCE_HORIZON_DOUBLINGS as i32));
    }
    cells.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cells.dedup();
    cells
}

/// Check membership in the class of admissible strings.
pub fn validate(c: &StringCoefficients) -> ValidationReport {
    let mut report = ValidationReport::default();
    if c.r.is_nan() || c.r <= 0.0 {
        report.push(ViolationKind::NonPositiveLength, 0.0, c.r);
        return report;
    }
    let mut last = f64::NEG_INFINITY;
    for a in &c.atoms {
        if !(a.y.is_finite() && a.m.is_finite()) {
            report.push(ViolationKind::NonFinite, a.y, a.m);
            continue;
        }
        if a.y < 0.0 || a.y >= c.r {
            report.push(ViolationKind::AtomOutOfRange, a.y, a.m);
        }
        if a.y <= last {
            report.push(ViolationKind::AtomOrder, a.y, a.m);
        }
        if a.m <= 0.0 {
            report.push(ViolationKind::NonPositiveAtom, a.y, a.m);
        }
        last = a.y;
    }
    check_pieces(&c.density, c.r, -1.0, ViolationKind::NonIntegrableDensity, &mut report);
    check_pieces(&c.b, c.r, -0.5, ViolationKind::NonSquareIntegrableB, &mut report);
    if !report.passed() {
        return report;
    }
    let cells = reference_partition(c);
    for w in cells.windows(2) {
        let (u, v) = (w[0], w[1]);
        for y in [u, 0.5 * (u + v)] {
            let d = c.density.eval(y);
            if d < 0.0 && !(y == 0.0 && d.is_infinite()) {
                report.push(ViolationKind::NegativeDensity, y, d);
                break;
            }
        }
        let mass = c.density.integral(u, v);
        let drift = c.b.square_integral(u, v);
        let atoms: f64 = c.atoms.iter().filter(|a| a.y >= u && a.y < v).map(|a| a.m).sum();
        if mass - drift < -TOL_STRUCT * (mass + atoms) {
            report.push(ViolationKind::NegativeTildeA, u, mass - drift);
        }
    }
    report
}

/// Grid construction rules for [`discretize`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridPolicy {
    /// Cells in the graded core region.
    pub cells: usize,
    /// End of the core region; required below `R` when `R` is finite.
    pub truncation: Option<f64>,
    /// Clustering exponent: nodes sit at `(k/n)^κ` in the core region.
    pub kappa: f64,
    /// Cells in each tail segment `[T·2^j, T·2^(j+1)]` of an infinite string.
    pub tail_cells: usize,
    /// Number of tail segments appended after the core region.
    pub tail_doublings: u32,
    /// Extra nodes to insert (heights where the solution is wanted).
    pub extra_nodes: Vec<f64>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            cells: 4096,
            truncation: None,
            kappa: 1.0,
            tail_cells: 1024,
            tail_doublings: 0,
            extra_nodes: Vec::new(),
        }
    }
}

impl GridPolicy {
    pub fn with_cells(cells: usize) -> Self {
        GridPolicy { cells, tail_cells: (cells / 4).max(16), ..GridPolicy::default() }
    }

    pub fn kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn truncation(mut self, t: f64) -> Self {
        self.truncation = Some(t);
        self
    }

    /// The clustering heuristic `max(1, 2/μ)` for power-law densities.
    pub fn kappa_for_order(mu: f64) -> f64 {
        (2.0 / mu).max(1.0)
    }

    /// Grading for a density `c·y^α` at the origin, `α > −1`: the order
    /// heuristic, or uniform steps in cumulative mass when that is finer.
    pub fn kappa_for_density(alpha: f64) -> f64 {
        Self::kappa_for_order(2.0 / (alpha + 2.0)).max(1.0 / (alpha + 1.0))
    }

    /// [`Self::kappa_for_density`] for the leading piece of `c`, or 1.
    pub fn kappa_for(c: &StringCoefficients) -> f64 {
        match c.density.pieces.first() {
            Some(p) if p.from == 0.0 => match p.kind.as_power() {
                Some((_, alpha)) if alpha > -1.0 && alpha != 0.0 => Self::kappa_for_density(alpha),
                _ => 1.0,
            },
            _ => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiscretizeError {
    Invalid(ValidationReport),
    TruncationBeyondLength { t: f64, r: f64 },
    NonIntegrableDensity { at: f64 },
    BadPolicy,
}

/// Atomized string on which propagation is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedString {
    /// `0 = t_0 < … < t_n`.
    pub grid: Vec<f64>,
    /// Input atoms sitting on nodes (index 0 always zero).
    pub node_atoms: Vec<f64>,
    /// Density mass of each cell.
    pub cell_mass: Vec<f64>,
    /// Cell averages of `b`.
    pub bconst: Vec<f64>,
    /// `B(t_k)`, the exact integral of the piecewise-constant `b`.
    pub bcum: Vec<f64>,
    /// `a(cell) − b̄²Δt`, the point mass carried inside each cell.
    pub kick_mass: Vec<f64>,
    /// Position of that point mass relative to the cell start.
    pub kick_offset: Vec<f64>,
    /// `a([0, t_k))` excluding the origin atom.
    pub acum: Vec<f64>,
    pub alpha0: f64,
    /// Length of the underlying string.
    pub r: f64,
}

impl DiscretizedString {
    pub fn cells(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// True when the grid stops short of the string's end.
    pub fn truncated(&self) -> bool {
        self.end() < self.r
    }

    /// `a([t_k, t_{k+1}))` per cell: node atom plus density mass.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.cells()).map(|k| self.node_atoms[k] + self.cell_mass[k]).collect()
    }

    /// Index `k` with `t_k ≤ t < t_{k+1}` (the last cell for `t = t_n`).
    pub fn cell_of(&self, t: f64) -> usize {
        let k = self.grid.partition_point(|&x| x <= t);
        k.saturating_sub(1).min(self.cells() - 1)
    }

    fn check_range(&self, t: f64) -> Result<(), OutOfGrid> {
        if t.is_nan() || t < 0.0 || t > self.end() {
            Err(OutOfGrid { t, end: self.end() })
        } else {
            Ok(())
        }
    }

    /// `a([0, t))` of the discretized measure, origin atom excluded.
    pub fn cumulative_a(&self, t: f64) -> Result<f64, OutOfGrid> {
        self.check_range(t)?;
        let k = self.cell_of(t);
        let tk = self.grid[k];
        let mut s = self.acum[k];
        if t > tk {
            let b = self.bconst[k];
            s += self.node_atoms[k] + b * b * (t - tk);
            if self.kick_offset[k] < t - tk {
                s += self.kick_mass[k];
            }
        }
        if t == self.end() && k + 1 < self.grid.len() {
            s = self.acum[k + 1];
        }
        Ok(s)
    }

    /// `B(t)` of the piecewise-constant drift.
    pub fn cumulative_b(&self, t: f64) -> Result<f64, OutOfGrid> {
        self.check_range(t)?;
        let k = self.cell_of(t);
        Ok(self.bcum[k] + self.bconst[k] * (t - self.grid[k]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutOfGrid {
    pub t: f64,
    pub end: f64,
}

fn graded_nodes(n: usize, kappa: f64, end: f64, two_sided: bool) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let x = k as f64 / n as f64;
            let g = if two_sided {
                if x <= 0.5 {
                    0.5 * libm::pow(2.0 * x, kappa)
                } else {
                    1.0 - 0.5 * libm::pow(2.0 * (1.0 - x), kappa)
                }
            } else {
                libm::pow(x, kappa)
            };
            if k == n {
                end
            } else {
                end * g
            }
        })
        .collect()
}

/// Build the atomized string.
pub fn discretize(c: &StringCoefficients, policy: &GridPolicy) -> Result<DiscretizedString, DiscretizeError> {
    let report = validate(c);
    if !report.passed() {
        return Err(DiscretizeError::Invalid(report));
    }
    if policy.cells == 0 || !(policy.kappa > 0.0) {
        return Err(DiscretizeError::BadPolicy);
    }
    let (core_end, two_sided) = match (c.r.is_finite(), policy.truncation) {
        (true, None) => (c.r, true),
        (true, Some(t)) if t >= c.r => return Err(DiscretizeError::TruncationBeyondLength { t, r: c.r }),
        (_, Some(t)) if !(t > 0.0) => return Err(DiscretizeError::BadPolicy),
        (true, Some(t)) => (t, false),
        (false, t) => (t.unwrap_or(DEFAULT_TRUNCATION), false),
    };
    let mut grid = graded_nodes(policy.cells, policy.kappa, core_end, two_sided);
    let mut end = core_end;
    if c.r.is_infinite() {
        for _ in 0..policy.tail_doublings {
            let next = 2.0 * end;
            let m = policy.tail_cells.max(1);
            for j in 1..=m {
                grid.push(end + (next - end) * j as f64 / m as f64);
            }
            end = next;
        }
    }
    let mut extra: Vec<f64> = c.atoms.iter().map(|a| a.y).collect();
    extra.extend(c.density.breakpoints());
    extra.extend(c.b.breakpoints());
    extra.extend(policy.extra_nodes.iter().copied());
    for x in extra {
        if x > 0.0 && x < end {
            grid.push(x);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let n = grid.len() - 1;
    let mut node_atoms = vec![0.0; n + 1];
    for a in &c.atoms {
        if a.y > 0.0 && a.y < end {
            let k = grid.partition_point(|&x| x < a.y);
            node_atoms[k] += a.m;
        }
    }
    let mut cell_mass = Vec::with_capacity(n);
    let mut bconst = Vec::with_capacity(n);
    let mut kick_mass = Vec::with_capacity(n);
    let mut kick_offset = Vec::with_capacity(n);
    for k in 0..n {
        let (u, v) = (grid[k], grid[k + 1]);
        let dt = v - u;
        let mass = c.density.integral(u, v);
        if !mass.is_finite() {
            return Err(DiscretizeError::NonIntegrableDensity { at: u });
        }
        let b = c.b.integral(u, v) / dt;
        let w = (mass - b * b * dt).max(0.0);
        let offset = if w > 0.0 {
            let first = c.density.moment_about(u, v, u) - b * b * dt * dt * 0.5;
            let o = first / w;
            if o.is_finite() {
                o.clamp(0.0, dt)
            } else {
                0.5 * dt
            }
        } else {
            0.5 * dt
        };
        cell_mass.push(mass);
        bconst.push(b);
        kick_mass.push(w);
        kick_offset.push(offset);
    }
    let mut bcum = Vec::with_capacity(n + 1);
    let mut acum = Vec::with_capacity(n + 1);
    let (mut bs, mut as_) = (0.0, 0.0);
    bcum.push(0.0);
    acum.push(0.0);
    for k in 0..n {
        bs += bconst[k] * (grid[k + 1] - grid[k]);
        as_ += node_atoms[k] + cell_mass[k];
        bcum.push(bs);
        acum.push(as_);
    }
    Ok(DiscretizedString {
        grid,
        node_atoms,
        cell_mass,
        bconst,
        bcum,
        kick_mass,
        kick_offset,
        acum,
        alpha0: c.alpha0(),
        r: c.r,
    })
}
