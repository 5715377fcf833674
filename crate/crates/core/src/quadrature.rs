//! Gauss–Legendre rules for smooth integrands on finite intervals.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_26,
];

/// The eight Gauss–Legendre abscissae mapped to `[u, v]`, with weights.
pub fn gauss_legendre_8(u: f64, v: f64) -> [(f64, f64); 8] {
    let half = 0.5 * (v - u);
    let mid = 0.5 * (u + v);
    let mut out = [(0.0, 0.0); 8];
    for (i, (&x, &w)) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()).enumerate() {
        out[2 * i] = (mid - half * x, half * w);
        out[2 * i + 1] = (mid + half * x, half * w);
    }
    out
}

/// Eight-point rule on `[u, v]`.
pub fn integrate_gl8<F: FnMut(f64) -> f64>(mut f: F, u: f64, v: f64) -> f64 {
    let mut s = 0.0;
    for (x, w) in gauss_legendre_8(u, v) {
        s += w * f(x);
    }
    s
}

/// Composite eight-point rule with `panels` equal panels.
pub fn integrate_composite<F: FnMut(f64) -> f64>(mut f: F, u: f64, v: f64, panels: usize) -> f64 {
    let h = (v - u) / panels as f64;
    let mut s = 0.0;
    for j in 0..panels {
        let a = u + h * j as f64;
        let b = if j + 1 == panels { v } else { a + h };
        s += integrate_gl8(&mut f, a, b);
    }
    s
}
