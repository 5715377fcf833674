//! Piecewise functions built from shifted polynomials and power laws.
//!
//! Every piece integrates in closed form, which is what lets a string be
//! atomized with exact cell masses and exact cumulative drift.

use alloc::vec;
use alloc::vec::Vec;

use crate::quadrature::integrate_composite;

/// Largest polynomial degree accepted on input.
pub const MAX_POLY_DEGREE: usize = 8;

const SAME_EXPONENT: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub enum PieceKind {
    /// `Σ coeffs[i]·(y − origin)^i`.
    Poly { origin: f64, coeffs: Vec<f64> },
    /// `c·y^alpha`.
    Power { c: f64, alpha: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    pub kind: PieceKind,
}

/// Sorted, disjoint pieces; the function vanishes outside them.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PiecewiseFn {
    pub pieces: Vec<Piece>,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `(v^p − u^p)/p` without cancellation when `v ≈ u > 0`.
fn power_difference(u: f64, v: f64, p: f64) -> f64 {
    if p == 0.0 {
        return libm::log(v / u);
    }
    if u > 0.0 && v.is_finite() {
        let r = libm::log1p((v - u) / u);
        return libm::pow(u, p) * libm::expm1(p * r) / p;
    }
    let fv = if v.is_infinite() {
        if p < 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        libm::pow(v, p)
    };
    let fu = if u == 0.0 {
        if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        libm::pow(u, p)
    };
    (fv - fu) / p
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for j in 0..k {
        r = r * (n - j) as f64 / (j + 1) as f64;
    }
    r
}

/// Coefficients of `Σ c_i (y − from)^i` rewritten around `to`.
pub fn recenter(coeffs: &[f64], from: f64, to: f64) -> Vec<f64> {
    let d = to - from;
    let mut out = vec![0.0; coeffs.len()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
            *slot += c * binomial(i, j) * libm::pow(d, (i - j) as f64);
        }
    }
    out
}

fn poly_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

impl PieceKind {
    pub fn constant(c: f64) -> Self {
        PieceKind::Poly { origin: 0.0, coeffs: vec![c] }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            PieceKind::Poly { origin, coeffs } => horner(coeffs, y - origin),
            PieceKind::Power { c, alpha } => {
                if *alpha == 0.0 {
                    *c
                } else {
                    c * libm::pow(y, *alpha)
                }
            }
        }
    }

    /// Degree of a polynomial piece, ignoring trailing zeros.
    pub fn degree(&self) -> Option<usize> {
        match self {
            PieceKind::Poly { coeffs, .. } => {
                Some(coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0))
            }
            PieceKind::Power { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PieceKind::Poly { coeffs, .. } => coeffs.iter().all(|&c| c == 0.0),
            PieceKind::Power { c, .. } => *c == 0.0,
        }
    }

    /// `∫_u^v f`.
    pub fn integral(&self, u: f64, v: f64) -> f64 {
        if v <= u || self.is_zero() {
            return 0.0;
        }
        match self {
            PieceKind::Poly { origin, coeffs } => {
                if v.is_infinite() {
                    return f64::INFINITY * coeffs.iter().rev().find(|c| **c != 0.0).unwrap_or(&0.0).signum();
                }
                let (xu, xv) = (u - origin, v - origin);
                let mut s = 0.0;
                for (i, &c) in coeffs.iter().enumerate() {
                    let p = (i + 1) as f64;
                    s += c * (libm::pow(xv, p) - libm::pow(xu, p)) / p;
                }
                s
            }
            PieceKind::Power { c, alpha } => c * power_difference(u, v, alpha + 1.0),
        }
    }

    /// `∫_u^v (y − o)·f(y) dy`.
    pub fn moment_about(&self, u: f64, v: f64, o: f64) -> f64 {
        if v <= u || self.is_zero() {
            return 0.0;
        }
        match self {
            PieceKind::Poly { origin, coeffs } => {
                let shifted = recenter(coeffs, *origin, o);
                let mut moment = vec![0.0];
                moment.extend(shifted);
                PieceKind::Poly { origin: o, coeffs: moment }.integral(u, v)
            }
            PieceKind::Power { c, alpha } => {
                c * (power_difference(u, v, alpha + 2.0) - o * power_difference(u, v, alpha + 1.0))
            }
        }
    }

    /// Pointwise square of the piece.
    pub fn square(&self) -> PieceKind {
        match self {
            PieceKind::Poly { origin, coeffs } => PieceKind::Poly {
                origin: *origin,
                coeffs: trim(poly_product(coeffs, coeffs)),
            },
            PieceKind::Power { c, alpha } => PieceKind::Power { c: c * c, alpha: 2.0 * alpha },
        }
    }

    /// `∫_u^v f²`.
    pub fn square_integral(&self, u: f64, v: f64) -> f64 {
        self.square().integral(u, v)
    }

    /// Multiply by a constant.
    pub fn scaled(&self, k: f64) -> PieceKind {
        match self {
            PieceKind::Poly { origin, coeffs } => PieceKind::Poly {
                origin: *origin,
                coeffs: coeffs.iter().map(|c| c * k).collect(),
            },
            PieceKind::Power { c, alpha } => PieceKind::Power { c: c * k, alpha: *alpha },
        }
    }

    /// `(c, α)` when the piece is a single monomial `c·y^α`.
    pub fn as_power(&self) -> Option<(f64, f64)> {
        match self {
            PieceKind::Power { c, alpha } => Some((*c, *alpha)),
            PieceKind::Poly { origin, coeffs } => {
                let nonzero: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
                match nonzero.as_slice() {
                    [] => Some((0.0, 0.0)),
                    [0] => Some((coeffs[0], 0.0)),
                    [i] if *origin == 0.0 => Some((coeffs[*i], *i as f64)),
                    _ => None,
                }
            }
        }
    }

    /// `(origin, coeffs)` when the piece is a polynomial (integer powers included).
    pub fn as_poly(&self) -> Option<(f64, Vec<f64>)> {
        match self {
            PieceKind::Poly { origin, coeffs } => Some((*origin, coeffs.clone())),
            PieceKind::Power { c, alpha } => {
                let n = libm::round(*alpha);
                if *alpha == n && (0.0..=(2 * MAX_POLY_DEGREE) as f64).contains(&n) {
                    let mut coeffs = vec![0.0; n as usize + 1];
                    coeffs[n as usize] = *c;
                    Some((0.0, coeffs))
                } else {
                    None
                }
            }
        }
    }

    /// `self − other` when the difference stays in the symbolic class.
    pub fn difference(&self, other: &PieceKind) -> Option<PieceKind> {
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(other.scaled(-1.0));
        }
        if let (PieceKind::Power { c: c1, alpha: a1 }, PieceKind::Power { c: c2, alpha: a2 }) = (self, other) {
            if (a1 - a2).abs() <= SAME_EXPONENT * (1.0 + a1.abs()) {
                return Some(PieceKind::Power { c: c1 - c2, alpha: *a1 });
            }
        }
        let (o1, p1) = self.as_poly()?;
        let (o2, p2) = other.as_poly()?;
        let p2 = recenter(&p2, o2, o1);
        let n = p1.len().max(p2.len());
        let coeffs = (0..n)
            .map(|i| p1.get(i).copied().unwrap_or(0.0) - p2.get(i).copied().unwrap_or(0.0))
            .collect();
        Some(PieceKind::Poly { origin: o1, coeffs: trim(coeffs) })
    }
}

impl Piece {
    pub fn new(from: f64, to: f64, kind: PieceKind) -> Self {
        Piece { from, to, kind }
    }
}

impl PiecewiseFn {
    pub fn new(pieces: Vec<Piece>) -> Self {
        PiecewiseFn { pieces }
    }

    pub fn zero() -> Self {
        PiecewiseFn { pieces: Vec::new() }
    }

    pub fn constant(from: f64, to: f64, c: f64) -> Self {
        PiecewiseFn::new(vec![Piece::new(from, to, PieceKind::constant(c))])
    }

    pub fn power(from: f64, to: f64, c: f64, alpha: f64) -> Self {
        PiecewiseFn::new(vec![Piece::new(from, to, PieceKind::Power { c, alpha })])
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.kind.is_zero())
    }

    pub fn piece_at(&self, y: f64) -> Option<&Piece> {
        let i = self.pieces.partition_point(|p| p.to <= y);
        self.pieces.get(i).filter(|p| p.from <= y && y < p.to)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.piece_at(y).map_or(0.0, |p| p.kind.eval(y))
    }

    fn overlapping(&self, u: f64, v: f64) -> impl Iterator<Item = (&Piece, f64, f64)> {
        let start = self.pieces.partition_point(|p| p.to <= u);
        self.pieces[start..]
            .iter()
            .take_while(move |p| p.from < v)
            .map(move |p| (p, p.from.max(u), p.to.min(v)))
            .filter(|(_, a, b)| a < b)
    }

    /// `∫_u^v f`.
    pub fn integral(&self, u: f64, v: f64) -> f64 {
        self.overlapping(u, v).map(|(p, a, b)| p.kind.integral(a, b)).sum()
    }

    /// `∫_u^v (y − o) f(y) dy`.
    pub fn moment_about(&self, u: f64, v: f64, o: f64) -> f64 {
        self.overlapping(u, v).map(|(p, a, b)| p.kind.moment_about(a, b, o)).sum()
    }

    /// `∫_u^v f²`.
    pub fn square_integral(&self, u: f64, v: f64) -> f64 {
        self.overlapping(u, v).map(|(p, a, b)| p.kind.square_integral(a, b)).sum()
    }

    /// `∫_u^v g(f(y)) dy` by composite Gauss–Legendre quadrature.
    pub fn integral_of<G: Fn(f64) -> f64>(&self, u: f64, v: f64, g: G) -> f64 {
        self.overlapping(u, v)
            .map(|(p, a, b)| integrate_composite(|y| g(p.kind.eval(y)), a, b, 32))
            .sum()
    }

    /// Finite interior piece endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for x in [p.from, p.to] {
                if x.is_finite() && out.last() != Some(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    pub fn scaled(&self, k: f64) -> PiecewiseFn {
        PiecewiseFn::new(
            self.pieces
                .iter()
                .map(|p| Piece::new(p.from, p.to, p.kind.scaled(k)))
                .collect(),
        )
    }

    /// Sorted union of the breakpoints of two functions over `[0, end)`.
    pub fn common_partition(&self, other: &PiecewiseFn, end: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        pts.extend(self.breakpoints());
        pts.extend(other.breakpoints());
        pts.retain(|x| *x >= 0.0 && *x < end);
        pts.push(end);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Kind active on `[u, v)`, or zero when no piece covers it.
    pub fn kind_on(&self, u: f64, v: f64) -> PieceKind {
        let probe = if v.is_finite() { 0.5 * (u + v) } else { u + 1.0 };
        self.piece_at(probe)
            .map(|p| p.kind.clone())
            .unwrap_or_else(|| PieceKind::constant(0.0))
    }
}
