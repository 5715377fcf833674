//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::approx_constant, clippy::excessive_precision)]

use krein_core::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let mag = WGK[7] * fc.abs() + (0..7).map(|j| WGK[j] * (f(c - h * XGK[j]).abs() + f(c + h * XGK[j]).abs())).sum::<f64>();
    (k * h, ((k - g) * h).abs(), mag * h.abs())
}

/// Adaptive Gauss–Kronrod 7/15 on a finite interval.
///
/// A panel is accepted once its error estimate is below its share of `tol`
/// or below the rounding floor of `∫|f|` on it.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e, mag) = gk15(f, a, b);
        if e <= tol || e <= 50.0 * f64::EPSILON * mag || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 30)
}

/// `∫_a^∞ f` via `x = a + t/(1−t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    integrate(
        |t| {
            if t >= 1.0 {
                0.0
            } else {
                let x = a + t / (1.0 - t);
                f(x) / ((1.0 - t) * (1.0 - t))
            }
        },
        0.0,
        1.0,
        tol,
    )
}

pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    Complex64::new(integrate(|x| f(x).re, a, b, tol), integrate(|x| f(x).im, a, b, tol))
}

fn rk4<F: Fn(f64, [Complex64; 2]) -> [Complex64; 2]>(f: &F, y0: f64, y1: f64, s: [Complex64; 2], steps: usize) -> [Complex64; 2] {
    let h = (y1 - y0) / steps as f64;
    let top = y1 - 1e-13 * (1.0 + y1.abs());
    let f = |y: f64, s| f(y.min(top), s);
    let mut s = s;
    for j in 0..steps {
        let y = y0 + h * j as f64;
        let add = |a: [Complex64; 2], b: [Complex64; 2], t: f64| [a[0] + b[0] * t, a[1] + b[1] * t];
        let k1 = f(y, s);
        let k2 = f(y + 0.5 * h, add(s, k1, 0.5 * h));
        let k3 = f(y + 0.5 * h, add(s, k2, 0.5 * h));
        let k4 = f(y + h, add(s, k3, h));
        s = [
            s[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
            s[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
        ];
    }
    s
}

fn rk4_pieces<F: Fn(f64, [Complex64; 2]) -> [Complex64; 2]>(f: &F, breaks: &[f64], s: [Complex64; 2], steps: usize) -> [Complex64; 2] {
    rk4_with_jumps(f, breaks, s, steps, |_, s| s)
}

fn rk4_with_jumps<F, J>(f: &F, breaks: &[f64], s: [Complex64; 2], steps: usize, jump: J) -> [Complex64; 2]
where
    F: Fn(f64, [Complex64; 2]) -> [Complex64; 2],
    J: Fn(f64, [Complex64; 2]) -> [Complex64; 2],
{
    let mut s = s;
    for w in breaks.windows(2) {
        s = rk4(f, w[0], w[1], s, steps);
        s = jump(w[1], s);
    }
    s
}

/// `k = φ_N(R)/φ_D(R)` for `φ'' = ξ²aφ − 2iξbφ'` with smooth pieces between `breaks`
/// (ending at `R`); `atoms` sit on interior breaks and make `φ'` jump by `ξ²mφ`.
pub fn rk4_standard_weyl(
    a: &dyn Fn(f64) -> f64,
    b: &dyn Fn(f64) -> f64,
    atoms: &[(f64, f64)],
    xi: Complex64,
    breaks: &[f64],
    steps: usize,
) -> Complex64 {
    let f = |y: f64, s: [Complex64; 2]| [s[1], xi * xi * a(y) * s[0] - I * xi * 2.0 * b(y) * s[1]];
    let jump = |y: f64, s: [Complex64; 2]| {
        let m: f64 = atoms.iter().filter(|(at, _)| *at == y).map(|(_, m)| m).sum();
        [s[0], s[1] + xi * xi * m * s[0]]
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let d = rk4_with_jumps(&f, breaks, [zero, one], steps, jump);
    let n = rk4_with_jumps(&f, breaks, [one, zero], steps, jump);
    n[0] / d[0]
}

/// Same for the divergence-like equation, in the variables `(ψ, ȧψ' + iξḃψ)`;
/// `k = −(ȧψ' + iξḃψ)(0)` for the solution vanishing at `Ṙ`.
pub fn rk4_divergence_weyl(a_dot: &dyn Fn(f64) -> f64, b_dot: &dyn Fn(f64) -> f64, xi: Complex64, breaks: &[f64], steps: usize) -> Complex64 {
    let f = |y: f64, s: [Complex64; 2]| {
        let (a, b) = (a_dot(y), b_dot(y));
        [(s[1] - I * xi * b * s[0]) / a, xi * xi * a * s[0] + I * xi * (b / a) * s[1]]
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let d = rk4_pieces(&f, breaks, [zero, one], steps);
    let n = rk4_pieces(&f, breaks, [one, zero], steps);
    n[0] / d[0]
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// `log Γ(z)` from an arbitrary-precision reference, `(Re z, Im z, Re, Im)`.
pub const LOG_GAMMA_TABLE: [(f64, f64, f64, f64); 10] = [
    (0.75, 0.25, 0.126_851_266_520_956_964_528_57, -0.258_432_548_458_810_581_313_581_6),
    (0.5, 0.0, 0.572_364_942_924_700_087_071_713_7, 0.0),
    (-0.5, 0.0, 1.265_512_123_484_645_396_488_946, -3.141_592_653_589_793_238_462_643),
    (3.3, -7.1, -4.678_035_812_831_855_073_517_798, -10.681_359_606_214_863_519_965_61),
    (-4.2, 2.5, -8.865_048_289_647_104_268_490_549, -10.783_877_057_614_401_975_671_03),
    (20.0, 25.0, 26.110_546_954_101_312_765_215_16, 79.126_646_160_574_813_199_854_97),
    (0.1, -29.0, -45.981_066_140_400_078_483_724_39, -68.021_938_613_560_087_346_898_83),
    (-12.5, 0.3, -20.502_574_376_185_091_907_993_88, -40.071_119_217_552_361_541_853_27),
    (0.001, 0.001, 6.560_604_473_837_552_618_736_46, -0.785_973_734_929_653_434_847_941_9),
    (29.9, 0.0, 70.918_764_820_987_185_596_772_31, 0.0),
];

/// `A + iB` from an arbitrary-precision reference, `(μ, p, q, A, B)`.
pub const AB_TABLE: [(f64, f64, f64, f64, f64); 7] = [
    (0.5, 1.0, 0.0, 0.675_978_240_067_284_728_995_447_7, 0.0),
    (0.5, 1.0, 1.0, 0.768_483_356_318_873_173_178_380_9, -0.503_966_929_893_615_326_944_871),
    (1.5, 1.0, 0.0, 2.562_287_814_762_313_136_444_786, 0.0),
    (0.5, 0.0, 1.0, 0.707_106_781_186_547_524_400_844_4, -0.707_106_781_186_547_524_400_844_4),
    (1.5, 1.0, 1.0, 3.152_100_563_407_046_850_212_245, -2.067_129_275_597_521_831_185_864),
    (1.5, 0.0, 1.0, 1.224_744_871_391_589_049_098_642, -1.224_744_871_391_589_049_098_642),
    (0.75, 2.0, -1.0, 1.315_420_014_381_034_897_960_75, 0.615_656_615_342_328_503_624_418_8),
];

/// `∫_0^∞ (e^{iξz} − 1 − iξz·1_{z<1}) ρ(z) dz` for a density `ρ` on `z > 0`
/// that is negligible beyond `cut`.
pub fn plus_side_quadrature(rho: &dyn Fn(f64) -> f64, xi: f64, cut: f64) -> Complex64 {
    let near = integrate_complex(|z| second_order_remainder(xi * z) * rho(z), 0.0, 1.0, 1e-14);
    let far = integrate_complex(|z| ((I * xi * z).exp() - 1.0) * rho(z), 1.0, cut, 1e-14);
    near + far
}

pub fn exp_term_oracle(c: f64, s: f64, xi: f64) -> Complex64 {
    plus_side_quadrature(&|z| c * (-s * z).exp(), xi, 1.0 + 45.0 / s)
}

/// `e^{iw} − 1 − iw` without cancellation for small `w`.
pub fn second_order_remainder(w: f64) -> Complex64 {
    if w.abs() > 0.1 {
        return (I * w).exp() - 1.0 - I * w;
    }
    let mut term = I * w;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 2..20 {
        term = term * I * w / n as f64;
        sum += term;
    }
    sum
}
