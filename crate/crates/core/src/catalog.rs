//! Closed-form strings paired with their exact symbols, plus duality.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::piecewise::{Piece, PieceKind, PiecewiseFn, MAX_POLY_DEGREE};
use crate::strings::{Atom, GridPolicy, StringCoefficients};
use crate::symbols::{log_gamma_complex, LevyTriplet, Side, StableTerm, SymbolError};
use crate::transforms::{
    divergence_to_standard, standard_to_divergence, standard_to_ek, validate_divergence, Converted,
    DivergenceCoefficients, EKCoefficients, TransformError,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CatalogError {
    /// `k(ξ) = 0` where a complement was requested.
    ZeroSymbol,
    BadParameters,
    /// One-sided measure outside the supported shapes.
    Unsupported,
    Gamma(SymbolError),
    Transform(TransformError),
}

impl From<SymbolError> for CatalogError {
    fn from(e: SymbolError) -> Self {
        CatalogError::Gamma(e)
    }
}

impl From<TransformError> for CatalogError {
    fn from(e: TransformError) -> Self {
        CatalogError::Transform(e)
    }
}

/// Exact Weyl functions of the catalog strings.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactSymbol {
    /// `(p − iq)ξ`.
    Constant { p: f64, q: f64 },
    /// `γ`.
    Zero { gamma: f64 },
    /// `coeff·ξ^μ`, principal power.
    PowerLaw { mu: f64, coeff: Complex64 },
    /// `scale·√(iξ)`.
    SqrtI { scale: f64 },
    /// `ξ²/k(ξ)`.
    Complement(Box<ExactSymbol>),
}

impl ExactSymbol {
    fn eval_right(&self, xi: Complex64) -> Result<Complex64, CatalogError> {
        Ok(match self {
            ExactSymbol::Constant { p, q } => Complex64::new(*p, -*q) * xi,
            ExactSymbol::Zero { gamma } => Complex64::new(*gamma, 0.0),
            ExactSymbol::PowerLaw { mu, coeff } => {
                if xi == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    coeff * (xi.ln() * mu).exp()
                }
            }
            ExactSymbol::SqrtI { scale } => (I * xi).sqrt() * scale,
            ExactSymbol::Complement(k) => {
                let v = k.eval_right(xi)?;
                if v == Complex64::new(0.0, 0.0) {
                    return Err(CatalogError::ZeroSymbol);
                }
                xi * xi / v
            }
        })
    }

    /// `k(ξ)` on the closed right half-plane, extended by `k(−ξ̄) = conj k(ξ)`.
    pub fn eval(&self, xi: Complex64) -> Result<Complex64, CatalogError> {
        if xi.re < 0.0 {
            Ok(self.eval_right(-xi.conj())?.conj())
        } else {
            self.eval_right(xi)
        }
    }

    pub fn eval_real(&self, xi: f64) -> Result<Complex64, CatalogError> {
        self.eval(Complex64::new(xi, 0.0))
    }
}

/// `k ↦ ξ²/k`.
pub fn complementary_symbol<F>(k: F) -> impl Fn(Complex64) -> Result<Complex64, CatalogError>
where
    F: Fn(Complex64) -> Complex64,
{
    move |xi| {
        let v = k(xi);
        if v == Complex64::new(0.0, 0.0) {
            Err(CatalogError::ZeroSymbol)
        } else {
            Ok(xi * xi / v)
        }
    }
}

/// `A + iB` and the one-sided stable weights `C₊, C₋` of a fractional entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalConstants {
    pub mu: f64,
    pub ab: Complex64,
    pub c_plus: f64,
    pub c_minus: f64,
}

/// `(C₊e^{−iμπ/2} + C₋e^{iμπ/2})·sign(1−μ)`.
pub fn ab_from_weights(mu: f64, c_plus: f64, c_minus: f64) -> Complex64 {
    let t = 0.5 * mu * PI;
    let e = Complex64::new(libm::cos(t), libm::sin(t));
    (c_plus * e.conj() + c_minus * e) * (1.0 - mu).signum()
}

/// `C₊, C₋` from `A + iB`.
pub fn weights_from_ab(mu: f64, ab: Complex64) -> (f64, f64) {
    let t = 0.5 * mu * PI;
    let (x, y) = (ab.re / (2.0 * libm::cos(t)), ab.im / (2.0 * libm::sin(t)));
    ((x - y).abs(), (x + y).abs())
}

/// `A + iB` for the power-law string of order `μ ∈ (0, 2)`.
pub fn fractional_ab(mu: f64, p: f64, q: f64) -> Result<Complex64, CatalogError> {
    if !(mu > 0.0 && mu < 2.0) || p < 0.0 || (p == 0.0 && q == 0.0) {
        return Err(CatalogError::BadParameters);
    }
    if mu == 1.0 {
        return Ok(Complex64::new(p, -q));
    }
    let lg = |x: Complex64| log_gamma_complex(x);
    let re = |x: f64| Complex64::new(x, 0.0);
    if p > 0.0 {
        let w = Complex64::new(p, -q) * ((1.0 - mu) / (2.0 * p));
        let l = lg(re(-mu))? + lg(w + mu)? - lg(re(mu))? - lg(w)?;
        Ok(-l.exp() * libm::pow(2.0 * mu * p, mu))
    } else {
        let ratio = -(lg(re(-mu))? - lg(re(mu))?).exp();
        let phase = -0.5 * PI * mu * (q * (1.0 - mu)).signum();
        let m = libm::pow((q * mu * (1.0 - mu)).abs(), mu);
        Ok(ratio * Complex64::new(libm::cos(phase), libm::sin(phase)) * m)
    }
}

pub fn fractional_constants(mu: f64, p: f64, q: f64) -> Result<FractionalConstants, CatalogError> {
    let ab = fractional_ab(mu, p, q)?;
    let (c_plus, c_minus) = if mu == 1.0 { (p, p) } else { weights_from_ab(mu, ab) };
    Ok(FractionalConstants { mu, ab, c_plus, c_minus })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub note: &'static str,
    pub coefficients: StringCoefficients,
    pub ek: Option<EKCoefficients>,
    pub divergence: Option<DivergenceCoefficients>,
    pub exact_k: Option<ExactSymbol>,
    pub levy: Option<LevyTriplet>,
    /// Suggested grid grading exponent.
    pub kappa: f64,
}

fn fmt_num(x: f64) -> String {
    if x < 0.0 {
        format!("m{}", -x)
    } else {
        format!("{}", x)
    }
}

fn with_forms(mut e: CatalogEntry) -> CatalogEntry {
    e.ek = standard_to_ek(&e.coefficients).ok().filter(|c| c.resolution == 0.0).map(|c| c.value);
    if e.divergence.is_none() {
        e.divergence = standard_to_divergence(&e.coefficients).ok().filter(|c| c.resolution == 0.0).map(|c| c.value);
    }
    e
}

fn stable_pair(mu: f64, c_plus: f64, c_minus: f64) -> LevyTriplet {
    let beta = if mu == 1.0 {
        0.0
    } else {
        let g = libm::exp(log_gamma_complex(Complex64::new(-mu, 0.0)).unwrap().re);
        (c_plus - c_minus) / (g * (1.0 - mu))
    };
    LevyTriplet {
        beta,
        stable: vec![
            StableTerm { side: Side::Plus, c: c_plus, mu },
            StableTerm { side: Side::Minus, c: c_minus, mu },
        ],
        ..Default::default()
    }
}

/// `a = (p²+q²)dy`, `b = −q` on `[0, ∞)`; `k(ξ) = p|ξ| − iqξ`.
pub fn example_constant(p: f64, q: f64) -> CatalogEntry {
    let inf = f64::INFINITY;
    let coefficients = StringCoefficients::new(
        inf,
        Vec::new(),
        PiecewiseFn::constant(0.0, inf, p * p + q * q),
        PiecewiseFn::constant(0.0, inf, -q),
    );
    let mut levy = stable_pair(1.0, p, p);
    levy.beta = q;
    with_forms(CatalogEntry {
        name: format!("constant-p{}-q{}", fmt_num(p), fmt_num(q)),
        note: "constant coefficients: k(ξ) = p|ξ| − iqξ",
        coefficients,
        ek: None,
        divergence: None,
        exact_k: Some(ExactSymbol::Constant { p, q }),
        levy: Some(levy),
        kappa: 1.0,
    })
}

/// Zero coefficients on `[0, R)`; `k ≡ 1/R`.
pub fn example_zero(r: f64) -> CatalogEntry {
    let gamma = if r.is_finite() { 1.0 / r } else { 0.0 };
    CatalogEntry {
        name: if r.is_finite() { format!("zero-r{}", r) } else { String::from("zero-inf") },
        note: "zero coefficients: Kf = −f/R",
        coefficients: StringCoefficients::zero(r),
        ek: Some(EKCoefficients { r, atoms: Vec::new(), a_tilde: PiecewiseFn::zero(), b_rep: PiecewiseFn::zero() }),
        divergence: None,
        exact_k: Some(ExactSymbol::Zero { gamma }),
        levy: Some(LevyTriplet { gamma, ..Default::default() }),
        kappa: 1.0,
    }
}

/// `a = (p²+q²)y^{2/μ−2}dy`, `b = −q·y^{1/μ−1}`; `k(ξ) = (A + iB)ξ^μ`.
pub fn example_power_law(mu: f64, p: f64, q: f64) -> Result<CatalogEntry, CatalogError> {
    if mu == 1.0 {
        return Ok(example_constant(p, q));
    }
    let fc = fractional_constants(mu, p, q)?;
    let inf = f64::INFINITY;
    let n2 = p * p + q * q;
    let coefficients = StringCoefficients::new(
        inf,
        Vec::new(),
        PiecewiseFn::power(0.0, inf, n2, 2.0 / mu - 2.0),
        PiecewiseFn::power(0.0, inf, -q, 1.0 / mu - 1.0),
    );
    let lead = libm::pow(mu, mu - 1.0);
    let divergence = DivergenceCoefficients {
        r_dot: inf,
        a_dot: PiecewiseFn::power(0.0, inf, lead * libm::pow(n2, 0.5 * mu), 1.0 - mu),
        b_dot: PiecewiseFn::power(0.0, inf, lead * q * libm::pow(n2, 0.5 * (mu - 1.0)), 1.0 - mu),
    };
    Ok(with_forms(CatalogEntry {
        name: format!("power-mu{}-p{}-q{}", mu, fmt_num(p), fmt_num(q)),
        note: "power-law coefficients: k(ξ) = (A + iB sign ξ)|ξ|^μ with Γ-constants",
        coefficients,
        ek: None,
        divergence: Some(divergence),
        exact_k: Some(ExactSymbol::PowerLaw { mu, coeff: fc.ab }),
        levy: Some(stable_pair(mu, fc.c_plus, fc.c_minus)),
        kappa: (2.0 / mu).max(1.0),
    }))
}

/// Measure `a₀` on `[0, ∞)` of a one-sided operator `−ψ(−∂x)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OneSidedSpec {
    pub atoms: Vec<Atom>,
    /// Polynomial pieces of degree ≤ 3, or a single power law from the origin.
    pub density: PiecewiseFn,
}

impl OneSidedSpec {
    pub fn lebesgue(c: f64) -> Self {
        OneSidedSpec { atoms: Vec::new(), density: PiecewiseFn::constant(0.0, f64::INFINITY, c) }
    }
}

fn antiderivative(origin: f64, coeffs: &[f64], from: f64, base: f64) -> PieceKind {
    // ∫_from^y Σ c_i (x−o)^i dx + base, as a polynomial about o.
    let mut out = vec![0.0; coeffs.len() + 1];
    for (i, c) in coeffs.iter().enumerate() {
        out[i + 1] = c / (i + 1) as f64;
    }
    let at_from = PieceKind::Poly { origin, coeffs: out.clone() }.eval(from);
    out[0] = base - at_from;
    PieceKind::Poly { origin, coeffs: out }
}

/// `a = A₀²dy`, `b = A₀` with `A₀(y) = a₀([0, y))`.
pub fn example_one_sided(spec: &OneSidedSpec) -> Result<CatalogEntry, CatalogError> {
    let inf = f64::INFINITY;
    let origin_mass: f64 = spec.atoms.iter().filter(|a| a.y == 0.0).map(|a| a.m).sum();
    if spec.density.is_zero() && spec.atoms.iter().all(|a| a.y == 0.0) {
        let mut e = example_constant(0.0, -origin_mass);
        e.name = format!("one-sided-atom-m{}", origin_mass);
        e.note = "one-sided, atom at the origin: pure drift k(ξ) = imξ";
        return Ok(e);
    }
    if let [Piece { from, to, kind }] = spec.density.pieces.as_slice() {
        if *from == 0.0 && to.is_infinite() && spec.atoms.is_empty() {
            if let Some((c, alpha)) = kind.as_power() {
                if c > 0.0 && alpha > -1.0 {
                    let e = alpha + 1.0;
                    let big_a = PieceKind::Power { c: c / e, alpha: e };
                    let coefficients = StringCoefficients::new(
                        inf,
                        Vec::new(),
                        PiecewiseFn::new(vec![Piece::new(0.0, inf, big_a.square())]),
                        PiecewiseFn::new(vec![Piece::new(0.0, inf, big_a)]),
                    );
                    let exact = (alpha == 0.0).then(|| ExactSymbol::SqrtI { scale: libm::sqrt(c) });
                    return Ok(with_forms(CatalogEntry {
                        name: if alpha == 0.0 {
                            format!("one-sided-lebesgue-c{}", c)
                        } else {
                            format!("one-sided-power-c{}-alpha{}", c, alpha)
                        },
                        note: "one-sided: a = A₀²dy, b = A₀; Lebesgue a₀ gives k(ξ) = √(iξ)",
                        coefficients,
                        ek: None,
                        divergence: None,
                        exact_k: exact,
                        levy: None,
                        kappa: 1.0,
                    }));
                }
            }
        }
    }
    // General case: polynomial pieces and atoms, A₀ piecewise polynomial.
    let mut cuts: Vec<f64> = spec.density.breakpoints();
    cuts.extend(spec.atoms.iter().map(|a| a.y));
    cuts.push(0.0);
    cuts.retain(|x| *x >= 0.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts.push(inf);
    let mut a_pieces = Vec::new();
    let mut b_pieces = Vec::new();
    let mut base = origin_mass;
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        if u > 0.0 {
            base += spec.atoms.iter().filter(|a| a.y == u).map(|a| a.m).sum::<f64>();
        }
        let k = spec.density.kind_on(u, v);
        let (o, coeffs) = k.as_poly().ok_or(CatalogError::Unsupported)?;
        if coeffs.len() > 4 || (!v.is_finite() && !k.is_zero()) {
            return Err(CatalogError::Unsupported);
        }
        let big_a = antiderivative(o, &coeffs, u, base);
        let sq = big_a.square();
        if sq.degree().unwrap_or(0) > MAX_POLY_DEGREE {
            return Err(CatalogError::Unsupported);
        }
        if v.is_finite() {
            base = big_a.eval(v);
        }
        a_pieces.push(Piece::new(u, v, sq));
        b_pieces.push(Piece::new(u, v, big_a));
    }
    let coefficients = StringCoefficients::new(inf, Vec::new(), PiecewiseFn::new(a_pieces), PiecewiseFn::new(b_pieces));
    Ok(with_forms(CatalogEntry {
        name: String::from("one-sided-general"),
        note: "one-sided: a = A₀²dy, b = A₀",
        coefficients,
        ek: None,
        divergence: None,
        exact_k: None,
        levy: None,
        kappa: 1.0,
    }))
}

fn reciprocal_kind(k: &PieceKind) -> Option<PieceKind> {
    let (c, alpha) = k.as_power()?;
    if c == 0.0 {
        return None;
    }
    Some(PieceKind::Power { c: 1.0 / c, alpha: -alpha })
}

/// `ȧ♯ = 1/ȧ`, `ḃ♯ = −ḃ/ȧ²`, `Ṙ♯ = Ṙ`. Pieces outside the power class are
/// sampled midpoint-constant; the reported resolution bounds that error.
pub fn dual_coefficients(d: &DivergenceCoefficients) -> Result<Converted<DivergenceCoefficients>, CatalogError> {
    validate_divergence(d)?;
    let parts = d.a_dot.common_partition(&d.b_dot, d.r_dot);
    let (mut pa, mut pb) = (Vec::new(), Vec::new());
    let mut sup: f64 = 0.0;
    for w in parts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let ka = d.a_dot.kind_on(u, v);
        let kb = d.b_dot.kind_on(u, v);
        let inv = reciprocal_kind(&ka);
        let b_dual = match (&inv, kb.as_power()) {
            (Some(PieceKind::Power { c, alpha }), Some((bc, beta))) => {
                Some(PieceKind::Power { c: -bc * c * c, alpha: beta + 2.0 * alpha })
            }
            (Some(_), None) if ka.degree() == Some(0) => {
                let c = ka.eval(u);
                Some(kb.scaled(-1.0 / (c * c)))
            }
            _ => None,
        };
        match (inv, b_dual) {
            (Some(ia), Some(ib)) => {
                pa.push(Piece::new(u, v, ia));
                pb.push(Piece::new(u, v, ib));
            }
            _ => {
                if !v.is_finite() {
                    return Err(CatalogError::Transform(TransformError::UnboundedFallback { from: u }));
                }
                let n = crate::transforms::FALLBACK_CELLS;
                for j in 0..n {
                    let (y0, y1) = (u + (v - u) * j as f64 / n as f64, u + (v - u) * (j + 1) as f64 / n as f64);
                    let fa = |y: f64| 1.0 / ka.eval(y);
                    let fb = |y: f64| -kb.eval(y) / (ka.eval(y) * ka.eval(y));
                    let ym = 0.5 * (y0 + y1);
                    for y in [y0 + 0.0625 * (y1 - y0), y1 - 0.0625 * (y1 - y0)] {
                        sup = sup.max((fa(y) - fa(ym)).abs()).max((fb(y) - fb(ym)).abs());
                    }
                    pa.push(Piece::new(y0, y1, PieceKind::constant(fa(ym))));
                    pb.push(Piece::new(y0, y1, PieceKind::constant(fb(ym))));
                }
            }
        }
    }
    Ok(Converted {
        value: DivergenceCoefficients { r_dot: d.r_dot, a_dot: PiecewiseFn::new(pa), b_dot: PiecewiseFn::new(pb) },
        resolution: sup,
    })
}

/// Standard-form string of the dual of a divergence-form entry, with `k♯ = ξ²/k`.
pub fn example_dual(entry: &CatalogEntry) -> Result<CatalogEntry, CatalogError> {
    let d = entry.divergence.as_ref().ok_or(CatalogError::Unsupported)?;
    let dual = dual_coefficients(d)?;
    let standard = divergence_to_standard(&dual.value)?;
    let kappa = entry.kappa.max(GridPolicy::kappa_for(&standard.value));
    Ok(with_forms(CatalogEntry {
        name: format!("dual-{}", entry.name),
        note: "dual string: ȧ♯ = 1/ȧ, ḃ♯ = −ḃ/ȧ², k♯ = ξ²/k",
        coefficients: standard.value,
        ek: None,
        divergence: Some(dual.value),
        exact_k: entry.exact_k.clone().map(|k| ExactSymbol::Complement(Box::new(k))),
        levy: None,
        kappa,
    }))
}

/// The shipped catalog, in a fixed order.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = vec![example_zero(f64::INFINITY), example_zero(0.5), example_zero(1.0), example_zero(2.0)];
    for (p, q) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -3.0)] {
        out.push(example_constant(p, q));
    }
    let lebesgue = example_one_sided(&OneSidedSpec::lebesgue(1.0)).unwrap();
    out.push(example_one_sided(&OneSidedSpec { atoms: vec![Atom { y: 0.0, m: 1.0 }], density: PiecewiseFn::zero() }).unwrap());
    out.push(example_dual(&lebesgue).unwrap());
    out.push(lebesgue);
    for (mu, p, q) in [(0.5, 1.0, 0.0), (0.5, 1.0, 1.0), (1.5, 1.0, 0.0), (0.5, 0.0, 1.0), (1.5, 1.0, 1.0), (0.75, 2.0, -1.0)] {
        out.push(example_power_law(mu, p, q).unwrap());
    }
    let half = example_power_law(0.5, 1.0, 0.0).unwrap();
    out.push(example_dual(&half).unwrap());
    out
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::validate;
    use crate::symbols::levy_symbol;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_values() {
        let k = ExactSymbol::Constant { p: 1.0, q: 1.0 };
        assert_eq!(k.eval_real(1.0).unwrap(), c(1.0, -1.0));
        assert_eq!(k.eval_real(-2.0).unwrap(), c(2.0, 2.0));
        assert_eq!(ExactSymbol::Constant { p: 1.0, q: 0.0 }.eval_real(2.0).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn zero_values() {
        assert_eq!(example_zero(2.0).exact_k.unwrap().eval_real(5.0).unwrap(), c(0.5, 0.0));
        assert_eq!(example_zero(f64::INFINITY).exact_k.unwrap().eval_real(5.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn complement_involution() {
        let k = ExactSymbol::SqrtI { scale: 1.0 };
        let kk = ExactSymbol::Complement(Box::new(ExactSymbol::Complement(Box::new(k.clone()))));
        for xi in [c(0.3, 0.0), c(2.0, -1.0), c(-1.5, 0.0)] {
            assert!((kk.eval(xi).unwrap() - k.eval(xi).unwrap()).norm() < 1e-14);
        }
        let kc = ExactSymbol::Complement(Box::new(k));
        let e = kc.eval_real(1.0).unwrap();
        assert!((e - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        let f = complementary_symbol(|_| c(0.0, 0.0));
        assert_eq!(f(c(1.0, 0.0)), Err(CatalogError::ZeroSymbol));
    }

    #[test]
    fn weights_round_trip() {
        for (mu, p, q) in [(0.5, 1.0, 0.0), (0.5, 1.0, 1.0), (1.5, 1.0, 0.0), (0.5, 0.0, 1.0), (1.5, 1.0, 1.0)] {
            let f = fractional_constants(mu, p, q).unwrap();
            assert!((ab_from_weights(mu, f.c_plus, f.c_minus) - f.ab).norm() < 1e-12 * f.ab.norm());
        }
    }

    #[test]
    fn mu_one_routes_to_constant() {
        let e = example_power_law(1.0, 1.0, 1.0).unwrap();
        assert_eq!(e.exact_k, Some(ExactSymbol::Constant { p: 1.0, q: 1.0 }));
        assert_eq!(fractional_ab(1.0, 1.0, 1.0).unwrap(), c(1.0, -1.0));
    }

    #[test]
    fn catalog_validates() {
        for e in catalog() {
            assert!(validate(&e.coefficients).passed(), "{}", e.name);
        }
    }

    #[test]
    fn levy_matches_exact() {
        for e in catalog() {
            if let (Some(t), Some(k)) = (&e.levy, &e.exact_k) {
                for xi in [-2.0, -0.3, 0.7, 3.0] {
                    let d = levy_symbol(t, xi) + k.eval_real(xi).unwrap();
                    assert!(d.norm() < 1e-12 * (1.0 + k.eval_real(xi).unwrap().norm()), "{} {}", e.name, xi);
                }
            }
        }
    }

    #[test]
    fn one_sided_atom_is_drift() {
        let e = example_one_sided(&OneSidedSpec { atoms: vec![Atom { y: 0.0, m: 2.0 }], density: PiecewiseFn::zero() }).unwrap();
        let k = e.exact_k.unwrap().eval_real(1.5).unwrap();
        assert!(k.re == 0.0 && k.im > 0.0);
    }

    #[test]
    fn one_sided_general_pieces() {
        let spec = OneSidedSpec {
            atoms: vec![Atom { y: 0.0, m: 0.5 }, Atom { y: 1.0, m: 1.0 }],
            density: PiecewiseFn::constant(0.0, 2.0, 1.0),
        };
        let e = example_one_sided(&spec).unwrap();
        assert!((e.coefficients.b.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((e.coefficients.b.eval(1.5) - 3.0).abs() < 1e-15);
        assert!((e.coefficients.b.eval(5.0) - 3.5).abs() < 1e-15);
        assert!(validate(&e.coefficients).passed());
    }

    #[test]
    fn dual_of_identity_is_identity() {
        let d = DivergenceCoefficients { r_dot: 1.0, a_dot: PiecewiseFn::constant(0.0, 1.0, 1.0), b_dot: PiecewiseFn::zero() };
        let dd = dual_coefficients(&d).unwrap();
        assert_eq!(dd.resolution, 0.0);
        assert_eq!(dd.value.a_dot.eval(0.5), 1.0);
        assert_eq!(dd.value.b_dot.eval(0.5), 0.0);
    }

    #[test]
    fn dual_square_root() {
        let s2 = libm::sqrt(2.0);
        let d = DivergenceCoefficients {
            r_dot: f64::INFINITY,
            a_dot: PiecewiseFn::power(0.0, f64::INFINITY, s2, 0.5),
            b_dot: PiecewiseFn::power(0.0, f64::INFINITY, -s2, 0.5),
        };
        let dd = dual_coefficients(&d).unwrap().value;
        for y in [0.1, 1.0, 7.0] {
            let want = 1.0 / libm::sqrt(2.0 * y);
            assert!((dd.a_dot.eval(y) - want).abs() < 1e-14 * want);
            assert!((dd.b_dot.eval(y) - want).abs() < 1e-14 * want);
        }
    }
}
