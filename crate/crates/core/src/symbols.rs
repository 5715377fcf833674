//! Rogers symbols: Lévy triplets, Stieltjes and exponential representations,
//! plus the complex log-gamma needed for fractional constants.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos-type series with g = 671/128 and 14 terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_SERIES0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolError {
    /// `log Γ` evaluated at a non-positive integer.
    GammaPole(f64),
    /// `ξ = −is` for an atom of the Stieltjes measure.
    StieltjesPole { s: f64 },
    /// Angle outside `[0, π]` or unordered pieces.
    BadTheta,
}

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    let t = z + LANCZOS_G;
    let mut ser = Complex64::new(LANCZOS_SERIES0, 0.0);
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += *c / (z + (j + 1) as f64);
    }
    (z + 0.5) * t.ln() - t + LN_SQRT_2PI + ser.ln() - z.ln()
}

/// `log Γ(z)` (principal branch up to multiples of `2πi` on the reflected half).
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64, SymbolError> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == libm::round(z.re) {
        return Err(SymbolError::GammaPole(z.re));
    }
    if z.re >= 0.5 {
        Ok(lanczos_log_gamma(z))
    } else {
        let s = (z * PI).sin();
        Ok(Complex64::new(libm::log(PI), 0.0) - s.ln() - lanczos_log_gamma(Complex64::new(1.0, 0.0) - z))
    }
}

/// `Γ(z)`.
pub fn gamma_complex(z: Complex64) -> Result<Complex64, SymbolError> {
    log_gamma_complex(z).map(|l| l.exp())
}

/// `Γ(x)` for real non-pole `x`.
pub fn gamma_real(x: f64) -> Result<f64, SymbolError> {
    gamma_complex(Complex64::new(x, 0.0)).map(|g| g.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Jump density `c·e^{−s|z|}` on one half-line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm {
    pub c: f64,
    pub s: f64,
}

/// Jump density `C/|Γ(−μ)|·|z|^{−1−μ}` on one side; for `μ = 1` the
/// density is `C/π·|z|^{−2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableTerm {
    pub side: Side,
    pub c: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevyTriplet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nu_plus: Vec<ExpTerm>,
    pub nu_minus: Vec<ExpTerm>,
    pub stable: Vec<StableTerm>,
}

/// `(1 − e^{−s}(1+s))/s² = ∫_0^1 z e^{−sz} dz`.
fn unit_moment(s: f64) -> f64 {
    if s < 0.5 {
        // Σ_{n≥2} (−1)^n (n−1)/n! · s^{n−2}
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 2..40 {
            term /= n as f64;
            if n > 2 {
                term *= -s;
            }
            sum += term * (n - 1) as f64;
        }
        sum
    } else {
        (-libm::expm1(-s) - s * libm::exp(-s)) / (s * s)
    }
}

fn exp_term_plus(t: &ExpTerm, xi: Complex64) -> Complex64 {
    t.c * (1.0 / (t.s - I * xi) - 1.0 / t.s - I * xi * unit_moment(t.s))
}

fn exp_term_minus(t: &ExpTerm, xi: Complex64) -> Complex64 {
    t.c * (1.0 / (t.s + I * xi) - 1.0 / t.s + I * xi * unit_moment(t.s))
}

fn principal_power(z: Complex64, mu: f64) -> Complex64 {
    if z == ZERO {
        ZERO
    } else {
        (z.ln() * mu).exp()
    }
}

// Stable terms are evaluated with their natural compensator (none for μ < 1,
// the full `iξz` for μ > 1); the difference to the `iξz·1_{|z|<1}` convention
// is `∓iξ·C/(|Γ(−μ)|(1−μ))`, added explicitly below.
fn stable_term(t: &StableTerm, xi: Complex64) -> Complex64 {
    if xi == ZERO || t.c == 0.0 {
        return ZERO;
    }
    let w = match t.side {
        Side::Plus => -I * xi,
        Side::Minus => I * xi,
    };
    let sign = match t.side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    if t.mu == 1.0 {
        return t.c / PI * (w * w.ln() + sign * I * xi * (1.0 - EULER_GAMMA));
    }
    let g = libm::exp(log_gamma_complex(Complex64::new(-t.mu, 0.0)).unwrap().re);
    let natural = -(1.0 - t.mu).signum() * t.c * principal_power(w, t.mu);
    natural - sign * I * xi * t.c / (g * (1.0 - t.mu))
}

/// `K̂(ξ)` extended holomorphically to `Re ξ > 0` (and valid on the real line).
pub fn levy_exponent(t: &LevyTriplet, xi: Complex64) -> Complex64 {
    let mut k = -t.alpha * xi * xi + I * t.beta * xi - t.gamma;
    for e in &t.nu_plus {
        k += exp_term_plus(e, xi);
    }
    for e in &t.nu_minus {
        k += exp_term_minus(e, xi);
    }
    for s in &t.stable {
        k += stable_term(s, xi);
    }
    k
}

/// Fourier symbol `K̂(ξ)` of the Lévy-type operator at real `ξ`.
pub fn levy_symbol(t: &LevyTriplet, xi: f64) -> Complex64 {
    levy_exponent(t, Complex64::new(xi, 0.0))
}

/// Discrete Stieltjes data `(α, β̌, γ, μ)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StieltjesData {
    pub alpha: f64,
    pub beta_check: f64,
    pub gamma: f64,
    /// Atoms `(s_j, weight_j)` with `s_j ≠ 0`.
    pub mu: Vec<(f64, f64)>,
}

/// `αξ² − iβ̌ξ + γ + (1/π)Σ (ξ/(ξ+is) + iξ·sign s/(1+|s|))·w/|s|`.
pub fn stieltjes_symbol(d: &StieltjesData, xi: Complex64) -> Result<Complex64, SymbolError> {
    let mut k = d.alpha * xi * xi - I * d.beta_check * xi + d.gamma;
    for &(s, w) in &d.mu {
        let den = xi + I * s;
        if den == ZERO {
            return Err(SymbolError::StieltjesPole { s });
        }
        k += (xi / den + I * xi * s.signum() / (1.0 + s.abs())) * (w / (PI * s.abs()));
    }
    Ok(k)
}

/// Constant piece of the angle function `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaPiece {
    pub from: f64,
    pub to: f64,
    pub value: f64,
}

/// `(c, θ)` with `θ` piecewise constant in `[0, π]`, zero off the pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialData {
    pub c: f64,
    pub theta: Vec<ThetaPiece>,
}

// ∫ (ξ/(ξ+is) − 1/(1+s))/s ds = ln(1+s) − ln(ξ+is) for s > 0.
fn positive_antiderivative(xi: Complex64, s: f64) -> Complex64 {
    if s.is_infinite() {
        return -I * (PI / 2.0);
    }
    Complex64::new(libm::log1p(s), 0.0) - (xi + I * s).ln()
}

// Same integrand mirrored to s < 0, as a function of u = −s > 0.
fn negative_antiderivative(xi: Complex64, u: f64) -> Complex64 {
    if u.is_infinite() {
        return I * (PI / 2.0);
    }
    Complex64::new(libm::log1p(u), 0.0) - (xi - I * u).ln()
}

/// `c·exp((1/π)∫(ξ/(ξ+is) − 1/(1+|s|))·θ(s)/|s| ds)`, piece by piece in closed form.
pub fn exponential_symbol(d: &ExponentialData, xi: Complex64) -> Result<Complex64, SymbolError> {
    let mut exponent = ZERO;
    for p in &d.theta {
        if !(0.0..=PI).contains(&p.value) || !(p.from < p.to) {
            return Err(SymbolError::BadTheta);
        }
        if p.to > 0.0 {
            let u = p.from.max(0.0);
            exponent += p.value * (positive_antiderivative(xi, p.to) - positive_antiderivative(xi, u));
        }
        if p.from < 0.0 {
            let (u, v) = ((-p.to).max(0.0), -p.from);
            exponent += p.value * (negative_antiderivative(xi, v) - negative_antiderivative(xi, u));
        }
    }
    Ok(d.c * (exponent / PI).exp())
}

/// Sampling rectangle in the right half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlaneGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for HalfPlaneGrid {
    fn default() -> Self {
        HalfPlaneGrid { re_min: 0.05, re_max: 20.0, im_min: -20.0, im_max: 20.0, n_re: 10, n_im: 10 }
    }
}

impl HalfPlaneGrid {
    /// Real parts spaced geometrically, imaginary parts uniformly.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n_re * self.n_im);
        for i in 0..self.n_re {
            let f = if self.n_re > 1 { i as f64 / (self.n_re - 1) as f64 } else { 0.0 };
            let re = self.re_min * libm::pow(self.re_max / self.re_min, f);
            for j in 0..self.n_im {
                let g = if self.n_im > 1 { j as f64 / (self.n_im - 1) as f64 } else { 0.5 };
                out.push(Complex64::new(re, self.im_min + (self.im_max - self.im_min) * g));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityReport {
    /// `min Re(k(ξ)/ξ)` over the grid.
    pub min: f64,
    pub at: Complex64,
    pub passed: bool,
}

/// Check `Re(k(ξ)/ξ) ≥ −tol` on a half-plane grid.
pub fn rogers_positivity_check<F: FnMut(Complex64) -> Complex64>(
    mut k: F,
    grid: &HalfPlaneGrid,
    tol: f64,
) -> PositivityReport {
    let mut min = f64::INFINITY;
    let mut at = ZERO;
    for xi in grid.points() {
        let v = (k(xi) / xi).re;
        if !(v >= min) {
            min = v;
            at = xi;
        }
    }
    PositivityReport { min, at, passed: min >= -tol }
}
