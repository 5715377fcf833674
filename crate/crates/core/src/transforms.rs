//! Conversions between the standard, Eckhardt–Kostenko and divergence-like
//! coefficient forms, and reduction of a general operator to a string.
//!
//! Power laws anchored at the origin and constants map in closed form.
//! Anything else is replaced by a midpoint-constant sampling whose sup
//! deviation is reported as the conversion's resolution.

use alloc::vec;
use alloc::vec::Vec;

use crate::piecewise::{Piece, PieceKind, PiecewiseFn};
use crate::quadrature::{gauss_legendre_8, integrate_composite};
use crate::strings::StringCoefficients;

/// Cells per piece used by the sampled fallback.
pub const FALLBACK_CELLS: usize = 1024;

const SUP_PROBES: [f64; 3] = [0.0625, 0.5, 0.9375];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransformError {
    /// Atoms, or a density vanishing on an interval.
    NotRepresentable { at: f64 },
    /// `1/ȧ` (or `√a`) is not integrable near `at`.
    NonIntegrable { at: f64 },
    /// A non-symbolic piece reaches infinity, so it cannot be sampled.
    UnboundedFallback { from: f64 },
    /// Divergence data with `ȧ ≤ 0`, `|ḃ| > ȧ`, or gaps.
    InvalidDivergence { at: f64 },
    NonPositiveC0 { at: f64 },
    LostEllipticity { at: f64 },
    BadGrid,
}

/// Converted value plus the sup deviation introduced by sampled pieces (0 when exact).
#[derive(Clone, Debug, PartialEq)]
pub struct Converted<T> {
    pub value: T,
    pub resolution: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EKCoefficients {
    pub r: f64,
    pub atoms: Vec<crate::strings::Atom>,
    /// Density of `ã = a − b²dy`.
    pub a_tilde: PiecewiseFn,
    /// `b`, whose distributional derivative is `−d̃`.
    pub b_rep: PiecewiseFn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceCoefficients {
    pub r_dot: f64,
    pub a_dot: PiecewiseFn,
    pub b_dot: PiecewiseFn,
}

/// `a₀∂xx + 2b₀∂xy + c₀∂yy + d₀∂x + e₀∂y` on `[0, r0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralCoefficients {
    pub r0: f64,
    pub a0: PiecewiseFn,
    pub b0: PiecewiseFn,
    pub c0: PiecewiseFn,
    pub d0: PiecewiseFn,
    pub e0: PiecewiseFn,
}

fn graded_nodes(u: f64, v: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let f = j as f64 / n as f64;
            if u == 0.0 {
                v * f * f
            } else {
                u + (v - u) * f
            }
        })
        .collect()
}

fn interior_samples(u: f64, v: f64) -> [f64; 3] {
    let w = if v.is_finite() { v - u } else { 1.0 + u.abs() };
    [u + 0.25 * w, u + 0.5 * w, u + 0.75 * w]
}

/// Midpoint-constant pieces over `[s(y_j), s(y_{j+1}))` for `f` given in `y`.
/// Returns the pieces and the largest deviation at probe points inside each cell.
fn sample_in<S, F>(ys: &[f64], s_of: S, f: F) -> (Vec<Piece>, f64)
where
    S: Fn(usize) -> f64,
    F: Fn(f64) -> f64,
{
    let mut pieces = Vec::with_capacity(ys.len());
    let mut sup: f64 = 0.0;
    for j in 0..ys.len() - 1 {
        let (y0, y1) = (ys[j], ys[j + 1]);
        let mid = f(0.5 * (y0 + y1));
        for p in SUP_PROBES {
            sup = sup.max((f(y0 + p * (y1 - y0)) - mid).abs());
        }
        let (s0, s1) = (s_of(j), s_of(j + 1));
        if s1 > s0 {
            pieces.push(Piece::new(s0, s1, PieceKind::constant(mid)));
        }
    }
    (pieces, sup)
}

fn add_kinds(a: &PieceKind, b: &PieceKind) -> Option<PieceKind> {
    a.difference(&b.scaled(-1.0))
}

/// `ã = a − b²dy`, keeping `b` itself.
pub fn standard_to_ek(s: &StringCoefficients) -> Result<Converted<EKCoefficients>, TransformError> {
    let parts = s.density.common_partition(&s.b, s.r);
    let mut pieces = Vec::new();
    let mut sup: f64 = 0.0;
    for w in parts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let ka = s.density.kind_on(u, v);
        let kb = s.b.kind_on(u, v);
        match ka.difference(&kb.square()) {
            Some(k) => pieces.push(Piece::new(u, v, k)),
            None => {
                if !v.is_finite() {
                    return Err(TransformError::UnboundedFallback { from: u });
                }
                let ys = graded_nodes(u, v, FALLBACK_CELLS);
                let (p, e) = sample_in(&ys, |j| ys[j], |y| ka.eval(y) - kb.eval(y) * kb.eval(y));
                pieces.extend(p);
                sup = sup.max(e);
            }
        }
    }
    Ok(Converted {
        value: EKCoefficients { r: s.r, atoms: s.atoms.clone(), a_tilde: PiecewiseFn::new(pieces), b_rep: s.b.clone() },
        resolution: sup,
    })
}

/// `a = ã + b²dy`.
pub fn ek_to_standard(e: &EKCoefficients) -> Result<Converted<StringCoefficients>, TransformError> {
    let parts = e.a_tilde.common_partition(&e.b_rep, e.r);
    let mut pieces = Vec::new();
    let mut sup: f64 = 0.0;
    for w in parts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let ka = e.a_tilde.kind_on(u, v);
        let kb = e.b_rep.kind_on(u, v);
        match add_kinds(&ka, &kb.square()) {
            Some(k) => pieces.push(Piece::new(u, v, k)),
            None => {
                if !v.is_finite() {
                    return Err(TransformError::UnboundedFallback { from: u });
                }
                let ys = graded_nodes(u, v, FALLBACK_CELLS);
                let (p, err) = sample_in(&ys, |j| ys[j], |y| ka.eval(y) + kb.eval(y) * kb.eval(y));
                pieces.extend(p);
                sup = sup.max(err);
            }
        }
    }
    Ok(Converted {
        value: StringCoefficients::new(e.r, e.atoms.clone(), PiecewiseFn::new(pieces), e.b_rep.clone()),
        resolution: sup,
    })
}

/// Check `ȧ > 0`, `|ḃ| ≤ ȧ` at interior samples and that `ȧ` covers `[0, Ṙ)` without gaps.
pub fn validate_divergence(d: &DivergenceCoefficients) -> Result<(), TransformError> {
    if !(d.r_dot > 0.0) {
        return Err(TransformError::InvalidDivergence { at: 0.0 });
    }
    let mut reach = 0.0;
    for p in &d.a_dot.pieces {
        if p.from != reach {
            return Err(TransformError::InvalidDivergence { at: reach });
        }
        reach = p.to;
    }
    if reach < d.r_dot {
        return Err(TransformError::InvalidDivergence { at: reach });
    }
    let parts = d.a_dot.common_partition(&d.b_dot, d.r_dot);
    for w in parts.windows(2) {
        for y in interior_samples(w[0], w[1]) {
            let a = d.a_dot.eval(y);
            if !(a > 0.0) || d.b_dot.eval(y).abs() > a * (1.0 + 1e-12) {
                return Err(TransformError::InvalidDivergence { at: y });
            }
        }
    }
    Ok(())
}

// Closed-form change of variable on one piece, old variable `y` to new `t`.
enum ScaleMap {
    /// `t = y^{1−α}/g`.
    Power { g: f64, alpha: f64 },
    /// `t = t0 + (y − y0)/c`.
    Affine { y0: f64, t0: f64, c: f64 },
}

impl ScaleMap {
    fn t_of(&self, y: f64) -> f64 {
        match *self {
            ScaleMap::Power { g, alpha } => {
                if y.is_infinite() {
                    f64::INFINITY
                } else {
                    libm::pow(y, 1.0 - alpha) / g
                }
            }
            ScaleMap::Affine { y0, t0, c } => t0 + (y - y0) / c,
        }
    }

    /// `k(y(t))` as a piece in `t`, when closed form.
    fn compose(&self, k: &PieceKind) -> Option<PieceKind> {
        match *self {
            ScaleMap::Power { g, alpha } => {
                let (d, beta) = k.as_power()?;
                let e = beta / (1.0 - alpha);
                Some(PieceKind::Power { c: d * libm::pow(g, e), alpha: e })
            }
            ScaleMap::Affine { y0, t0, c } => {
                let (o, coeffs) = k.as_poly()?;
                let mut scale = 1.0;
                let coeffs = coeffs
                    .iter()
                    .map(|a| {
                        let out = a * scale;
                        scale *= c;
                        out
                    })
                    .collect();
                Some(PieceKind::Poly { origin: t0 + (o - y0) / c, coeffs })
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    /// `dt = dy/ȧ`, new density `ȧ²`.
    ToStandard,
    /// `dt = √a dy`, new coefficient `√a`.
    ToDivergence,
}

fn sqrt_kind(k: &PieceKind) -> Option<PieceKind> {
    let (c, alpha) = k.as_power()?;
    Some(PieceKind::Power { c: libm::sqrt(c), alpha: 0.5 * alpha })
}

struct Rescaled {
    end: f64,
    a: PiecewiseFn,
    b: PiecewiseFn,
    resolution: f64,
}

fn rescale(a: &PiecewiseFn, b: &PiecewiseFn, end: f64, dir: Direction) -> Result<Rescaled, TransformError> {
    let parts = a.common_partition(b, end);
    let (mut out_a, mut out_b) = (Vec::new(), Vec::new());
    let mut t_u = 0.0;
    let mut sup: f64 = 0.0;
    for w in parts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let ka = a.kind_on(u, v);
        let kb = b.kind_on(u, v);
        for x in interior_samples(u, v) {
            if !(ka.eval(x) > 0.0) {
                return Err(match dir {
                    Direction::ToStandard => TransformError::InvalidDivergence { at: x },
                    Direction::ToDivergence => TransformError::NotRepresentable { at: x },
                });
            }
        }
        let rate = |y: f64| match dir {
            Direction::ToStandard => 1.0 / ka.eval(y),
            Direction::ToDivergence => libm::sqrt(ka.eval(y)),
        };
        let value = |y: f64| match dir {
            Direction::ToStandard => ka.eval(y) * ka.eval(y),
            Direction::ToDivergence => libm::sqrt(ka.eval(y)),
        };
        let new_a = match dir {
            Direction::ToStandard => Some(ka.square()),
            Direction::ToDivergence => sqrt_kind(&ka),
        };
        let map = match ka.as_power() {
            Some((c, 0.0)) => Some(ScaleMap::Affine {
                y0: u,
                t0: t_u,
                c: if dir == Direction::ToStandard { c } else { 1.0 / libm::sqrt(c) },
            }),
            Some((c, alpha)) if u == 0.0 => {
                // exponent of the rate y^{−α'}: t = y^{1−α'}/g
                let (ap, coef) = match dir {
                    Direction::ToStandard => (alpha, 1.0 / c),
                    Direction::ToDivergence => (-0.5 * alpha, libm::sqrt(c)),
                };
                if ap >= 1.0 {
                    return Err(TransformError::NonIntegrable { at: 0.0 });
                }
                Some(ScaleMap::Power { g: (1.0 - ap) / coef, alpha: ap })
            }
            _ => None,
        };
        let t_v;
        match map {
            Some(m) => {
                t_v = m.t_of(v);
                out_a.push(Piece::new(t_u, t_v, m.compose(new_a.as_ref().unwrap()).unwrap()));
                match m.compose(&kb) {
                    Some(k) => out_b.push(Piece::new(t_u, t_v, k.scaled(-1.0))),
                    None => {
                        if !v.is_finite() {
                            return Err(TransformError::UnboundedFallback { from: u });
                        }
                        let ys = graded_nodes(u, v, FALLBACK_CELLS);
                        let ts: Vec<f64> = ys.iter().map(|y| m.t_of(*y)).collect();
                        let (p, e) = sample_in(&ys, |j| ts[j], |y| -kb.eval(y));
                        out_b.extend(p);
                        sup = sup.max(e);
                    }
                }
            }
            None => {
                if !v.is_finite() {
                    return Err(TransformError::UnboundedFallback { from: u });
                }
                let ys = graded_nodes(u, v, FALLBACK_CELLS);
                let mut ts = vec![t_u];
                for w in ys.windows(2) {
                    let last = *ts.last().unwrap();
                    ts.push(last + integrate_composite(rate, w[0], w[1], 2));
                }
                let (pa, ea) = sample_in(&ys, |j| ts[j], value);
                let (pb, eb) = sample_in(&ys, |j| ts[j], |y| -kb.eval(y));
                out_a.extend(pa);
                out_b.extend(pb);
                sup = sup.max(ea).max(eb);
                t_v = *ts.last().unwrap();
            }
        }
        t_u = t_v;
    }
    Ok(Rescaled { end: t_u, a: PiecewiseFn::new(out_a), b: PiecewiseFn::new(out_b), resolution: sup })
}

/// Change of scale `s = σ̇(y) = ∫₀ʸ 1/ȧ`, with `a(σ̇(y)) = ȧ(y)²`, `b(σ̇(y)) = −ḃ(y)`.
pub fn divergence_to_standard(d: &DivergenceCoefficients) -> Result<Converted<StringCoefficients>, TransformError> {
    validate_divergence(d)?;
    let r = rescale(&d.a_dot, &d.b_dot, d.r_dot, Direction::ToStandard)?;
    Ok(Converted { value: StringCoefficients::new(r.end, Vec::new(), r.a, r.b), resolution: r.resolution })
}

/// Inverse change of scale `Y(s) = ∫₀ˢ √a`, with `ȧ(Y(s)) = √a(s)`, `ḃ(Y(s)) = −b(s)`.
pub fn standard_to_divergence(s: &StringCoefficients) -> Result<Converted<DivergenceCoefficients>, TransformError> {
    if let Some(a) = s.atoms.first() {
        return Err(TransformError::NotRepresentable { at: a.y });
    }
    let r = rescale(&s.density, &s.b, s.r, Direction::ToDivergence)?;
    Ok(Converted { value: DivergenceCoefficients { r_dot: r.end, a_dot: r.a, b_dot: r.b }, resolution: r.resolution })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedNode {
    pub y: f64,
    pub sigma: f64,
    pub dsigma: f64,
    /// Shear `τ` and `τ′`, as functions of the new variable `s = σ(y)`.
    pub tau: f64,
    pub dtau: f64,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a3: f64,
    pub b3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub nodes: Vec<ReducedNode>,
    /// `(a₃, b₃)` interpolated linearly in `s` between nodes.
    pub coefficients: StringCoefficients,
}

fn gl8_on<F: FnMut(f64) -> f64>(mut f: F, u: f64, v: f64) -> f64 {
    if v == u {
        return 0.0;
    }
    gauss_legendre_8(u, v).iter().map(|&(x, w)| w * f(x)).sum()
}

/// Change of scale, normalization by `c₁` and shearing on `nodes` (starting at 0, ending at `r0`).
pub fn reduce_general(g: &GeneralCoefficients, nodes: &[f64]) -> Result<Reduction, TransformError> {
    if nodes.len() < 2 || nodes[0] != 0.0 || *nodes.last().unwrap() != g.r0 || !g.r0.is_finite() {
        return Err(TransformError::BadGrid);
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(TransformError::BadGrid);
    }
    let check = |y: f64| -> Result<(), TransformError> {
        let c = g.c0.eval(y);
        if !(c > 0.0) {
            return Err(TransformError::NonPositiveC0 { at: y });
        }
        let b = g.b0.eval(y);
        if g.a0.eval(y) * c - b * b < -1e-12 * (b * b).max(1.0) {
            return Err(TransformError::LostEllipticity { at: y });
        }
        Ok(())
    };
    let ratio_e = |y: f64| g.e0.eval(y) / g.c0.eval(y);
    let mut out = Vec::with_capacity(nodes.len());
    let (mut sigma, mut dsigma, mut tau, mut dtau) = (0.0, 1.0, 0.0, 0.0);
    for (j, &y) in nodes.iter().enumerate() {
        if j > 0 {
            let y0 = nodes[j - 1];
            let (ds0, dt0) = (dsigma, dtau);
            let ds_at = |x: f64| ds0 * libm::exp(-gl8_on(ratio_e, y0, x));
            let dt_at = |x: f64| dt0 - gl8_on(|z| g.d0.eval(z) / (g.c0.eval(z) * ds_at(z)), y0, x);
            for (x, _) in gauss_legendre_8(y0, y) {
                check(x)?;
            }
            sigma += gl8_on(ds_at, y0, y);
            tau += gl8_on(|x| dt_at(x) * ds_at(x), y0, y);
            dsigma = ds_at(y);
            dtau = dt_at(y);
        }
        let probe = if j + 1 < nodes.len() { y } else { y - 1e-15 * (1.0 + y) };
        check(probe)?;
        let (a0, b0, c0) = (g.a0.eval(probe), g.b0.eval(probe), g.c0.eval(probe));
        let a2 = a0 / (c0 * dsigma * dsigma);
        let b2 = b0 / (c0 * dsigma);
        out.push(ReducedNode {
            y,
            sigma,
            dsigma,
            tau,
            dtau,
            a1: a0,
            b1: b0 * dsigma,
            c1: c0 * dsigma * dsigma,
            a3: a2 + 2.0 * b2 * dtau + dtau * dtau,
            b3: b2 + dtau,
        });
    }
    let linear = |f: fn(&ReducedNode) -> f64| {
        PiecewiseFn::new(
            out.windows(2)
                .map(|w| {
                    let slope = (f(&w[1]) - f(&w[0])) / (w[1].sigma - w[0].sigma);
                    Piece::new(w[0].sigma, w[1].sigma, PieceKind::Poly { origin: w[0].sigma, coeffs: vec![f(&w[0]), slope] })
                })
                .collect(),
        )
    };
    let density = linear(|n| n.a3);
    let b = linear(|n| n.b3);
    let r = out.last().unwrap().sigma;
    Ok(Reduction { coefficients: StringCoefficients::new(r, Vec::new(), density, b), nodes: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn ek_constant() {
        let s = StringCoefficients::new(
            f64::INFINITY,
            Vec::new(),
            PiecewiseFn::constant(0.0, f64::INFINITY, 2.0),
            PiecewiseFn::constant(0.0, f64::INFINITY, -1.0),
        );
        let e = standard_to_ek(&s).unwrap();
        assert_eq!(e.resolution, 0.0);
        assert!(close(e.value.a_tilde.eval(3.0), 1.0, 1e-15));
        assert_eq!(e.value.b_rep, s.b);
        let back = ek_to_standard(&e.value).unwrap().value;
        assert!(close(back.density.eval(7.0), 2.0, 1e-15));
    }

    #[test]
    fn ek_one_sided_vanishes() {
        let s = StringCoefficients::new(
            f64::INFINITY,
            Vec::new(),
            PiecewiseFn::power(0.0, f64::INFINITY, 1.0, 2.0),
            PiecewiseFn::power(0.0, f64::INFINITY, 1.0, 1.0),
        );
        let e = standard_to_ek(&s).unwrap().value;
        for y in [0.1, 1.0, 10.0] {
            assert!(e.a_tilde.eval(y).abs() < 1e-14 * y * y);
        }
    }

    #[test]
    fn divergence_identity() {
        let d = DivergenceCoefficients { r_dot: 1.0, a_dot: PiecewiseFn::constant(0.0, 1.0, 1.0), b_dot: PiecewiseFn::zero() };
        let s = divergence_to_standard(&d).unwrap();
        assert_eq!(s.resolution, 0.0);
        assert!(close(s.value.r, 1.0, 1e-15));
        assert!(close(s.value.density.eval(0.5), 1.0, 1e-15));
        assert_eq!(s.value.b.eval(0.5), 0.0);
    }

    #[test]
    fn divergence_square_root() {
        let d = DivergenceCoefficients {
            r_dot: f64::INFINITY,
            a_dot: PiecewiseFn::power(0.0, f64::INFINITY, libm::sqrt(2.0), 0.5),
            b_dot: PiecewiseFn::zero(),
        };
        let s = divergence_to_standard(&d).unwrap().value;
        for y in [0.01, 0.5, 3.0, 40.0] {
            let sd = libm::sqrt(2.0 * y);
            assert!(close(s.density.eval(sd), 2.0 * y, 1e-13));
            assert!(close(s.density.eval(y), y * y, 1e-13));
        }
    }

    #[test]
    fn standard_to_divergence_one_sided() {
        let s = StringCoefficients::new(
            f64::INFINITY,
            Vec::new(),
            PiecewiseFn::power(0.0, f64::INFINITY, 1.0, 2.0),
            PiecewiseFn::power(0.0, f64::INFINITY, 1.0, 1.0),
        );
        let d = standard_to_divergence(&s).unwrap();
        assert_eq!(d.resolution, 0.0);
        for y in [0.02, 1.0, 9.0] {
            assert!(close(d.value.a_dot.eval(y), libm::sqrt(2.0 * y), 1e-13));
            assert!(close(d.value.b_dot.eval(y), -libm::sqrt(2.0 * y), 1e-13));
        }
        let back = divergence_to_standard(&d.value).unwrap().value;
        for y in [0.02, 1.0, 9.0] {
            assert!(close(back.density.eval(y), y * y, 1e-12));
            assert!(close(back.b.eval(y), y, 1e-12));
        }
    }

    #[test]
    fn standard_to_divergence_rejects() {
        assert!(standard_to_divergence(&StringCoefficients::zero(1.0)).is_err());
        let mut s = StringCoefficients::new(1.0, Vec::new(), PiecewiseFn::constant(0.0, 1.0, 1.0), PiecewiseFn::zero());
        s.atoms.push(crate::strings::Atom { y: 0.5, m: 1.0 });
        assert_eq!(standard_to_divergence(&s), Err(TransformError::NotRepresentable { at: 0.5 }));
    }

    #[test]
    fn constant_with_drift_round_trip() {
        let s = StringCoefficients::new(
            3.0,
            Vec::new(),
            PiecewiseFn::new(vec![
                Piece::new(0.0, 1.0, PieceKind::constant(4.0)),
                Piece::new(1.0, 3.0, PieceKind::constant(9.0)),
            ]),
            PiecewiseFn::new(vec![Piece::new(0.0, 3.0, PieceKind::Poly { origin: 0.5, coeffs: vec![0.5, 0.25] })]),
        );
        let d = standard_to_divergence(&s).unwrap();
        assert_eq!(d.resolution, 0.0);
        assert!(close(d.value.r_dot, 2.0 + 6.0, 1e-15));
        let back = divergence_to_standard(&d.value).unwrap().value;
        assert!(close(back.r, 3.0, 1e-15));
        for y in [0.1, 0.9, 1.5, 2.9] {
            assert!(close(back.density.eval(y), s.density.eval(y), 1e-13));
            assert!(close(back.b.eval(y), s.b.eval(y), 1e-13));
        }
    }

    #[test]
    fn sampled_fallback_reports_resolution() {
        let d = DivergenceCoefficients {
            r_dot: 2.0,
            a_dot: PiecewiseFn::new(vec![Piece::new(0.0, 2.0, PieceKind::Poly { origin: 0.0, coeffs: vec![1.0, 1.0] })]),
            b_dot: PiecewiseFn::zero(),
        };
        let s = divergence_to_standard(&d).unwrap();
        assert!(s.resolution > 0.0 && s.resolution < 5e-2);
        assert!(close(s.value.r, libm::log(3.0), 1e-10));
    }

    #[test]
    fn reduce_identity() {
        let one = PiecewiseFn::constant(0.0, 2.0, 1.0);
        let g = GeneralCoefficients {
            r0: 2.0,
            a0: one.clone(),
            b0: PiecewiseFn::zero(),
            c0: one,
            d0: PiecewiseFn::zero(),
            e0: PiecewiseFn::zero(),
        };
        let nodes: Vec<f64> = (0..=8).map(|j| j as f64 * 0.25).collect();
        let r = reduce_general(&g, &nodes).unwrap();
        for n in &r.nodes {
            assert!(close(n.sigma, n.y, 1e-15) && n.tau == 0.0 && n.a3 == 1.0 && n.b3 == 0.0);
        }
        assert!(close(r.coefficients.r, 2.0, 1e-15));
    }

    #[test]
    fn reduce_rejects_degenerate_c() {
        let g = GeneralCoefficients {
            r0: 1.0,
            a0: PiecewiseFn::constant(0.0, 1.0, 1.0),
            b0: PiecewiseFn::zero(),
            c0: PiecewiseFn::constant(0.0, 0.5, 1.0),
            d0: PiecewiseFn::zero(),
            e0: PiecewiseFn::zero(),
        };
        assert!(matches!(reduce_general(&g, &[0.0, 0.25, 0.5, 0.75, 1.0]), Err(TransformError::NonPositiveC0 { .. })));
    }
}
