//! The invariant suite behind `krein verify`, one named check per property.
//!
//! Each check measures a violation and passes when it is at most its
//! tolerance.

use std::f64::consts::PI;

use krein_core::catalog::{
    ab_from_weights, catalog, catalog_entry, complementary_symbol, dual_coefficients, example_dual, fractional_constants,
    weights_from_ab,
};
use krein_core::piecewise::{Piece, PieceKind, PiecewiseFn};
use krein_core::propagator::{
    bounded_solution, shape_report, solve_fundamental, weyl_k, weyl_k_extrapolated, weyl_with_grid, wronskian_deviation,
};
use krein_core::quadrature::integrate_composite;
use krein_core::strings::{discretize, validate};
use krein_core::symbols::{levy_exponent, levy_symbol, log_gamma_complex, rogers_positivity_check, ExpTerm, HalfPlaneGrid, LevyTriplet};
use krein_core::transforms::{divergence_to_standard, standard_to_divergence};
use krein_core::{Atom, CatalogEntry, Complex64, GridPolicy, StringCoefficients};
use rayon::prelude::*;

use crate::extension::{spectrum_norm, DtnOperator, SampledFunction};
use crate::random::StringGenerator;

pub struct Context {
    pub seed: u64,
}

type Measure = Result<(f64, String), String>;

pub struct Check {
    pub id: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    run: fn(&Context) -> Measure,
}

impl Check {
    pub fn module(&self) -> &'static str {
        self.id.split('.').next().unwrap_or("")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:<36} measured {:.3e} tol {:.1e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($id:expr, $tol:expr, $f:expr, $d:expr) => {
            Check { id: $id, description: $d, tolerance: $tol, run: $f }
        };
    }
    vec![
        check!("strings.refinement-monotone", 0.0, strings_refinement, "sup error of the cumulative mass never grows under refinement"),
        check!("strings.catalog-valid", 0.0, strings_catalog_valid, "every catalog string validates"),
        check!("strings.discretize-deterministic", 0.0, strings_deterministic, "discretize gives bit-identical grids"),
        check!("propagator.wronskian", 1e-8, propagator_wronskian, "W(φ_D, φ) = e^{−2iξB} on catalog strings at ξ = 1 + i"),
        check!("propagator.rogers-positivity", 1e-8, propagator_rogers, "Re(k(ξ)/ξ) ≥ 0 on random and catalog strings"),
        check!("propagator.conjugate-symmetry", 1e-10, propagator_conjugate, "k(−ξ) = conj k(ξ)"),
        check!("propagator.refinement-convergence", 0.0, propagator_refinement, "|k_n − k_2n| decreases beyond n = 1024"),
        check!("propagator.shape", 1e-10, propagator_shape, "|φ|² non-increasing and convex, |φ'| non-increasing"),
        check!("symbols.conjugate-symmetry", 1e-12, symbols_conjugate, "K̂(−ξ) = conj K̂(ξ)"),
        check!("symbols.rogers-positivity", 1e-8, symbols_rogers, "−K̂ of Lévy triplets is a Rogers function"),
        check!("symbols.exponential-quadrature", 1e-10, symbols_quadrature, "exponential terms agree with quadrature on [−10, 10]"),
        check!("symbols.log-gamma-recurrence", 1e-11, symbols_log_gamma, "log Γ(z+1) − log Γ(z) − log z ∈ 2πiℤ"),
        check!("transforms.round-trip", 1.0, transforms_round_trip, "standard → divergence → standard within resolution (ratio)"),
        check!("transforms.weyl-invariance", 1e-3, transforms_weyl_invariance, "k of a divergence form equals k of its standard form"),
        check!("transforms.dual-strings", 1.0, transforms_dual_strings, "cumulative masses of dual strings are inverse (ratio)"),
        check!("extension.multiplier-consistency", 1e-3, extension_multiplier, "K K♯ is the ξ² multiplier"),
        check!("extension.realness", 1e-12, extension_realness, "real input gives real output"),
        check!("extension.plancherel", 1e-12, extension_plancherel, "‖Kf‖ equals the norm of the multiplied spectrum"),
        check!("extension.norm-monotone", 1e-12, extension_norm_monotone, "‖u(·, y)‖ is non-increasing in y"),
        check!("catalog.exact-matches-weyl", 1.0, catalog_exact, "exact symbols match the propagator (error/tolerance)"),
        check!("catalog.constants-round-trip", 1e-12, catalog_constants, "A + iB ↔ (C₊, C₋) round trip"),
        check!("catalog.complement-involution", 1e-12, catalog_involution, "k♯♯ = k"),
        check!("catalog.exact-rogers", 1e-8, catalog_exact_rogers, "exact symbols are Rogers functions"),
        check!("cli.parallel-serial-agree", 1e-12, cli_parallel_serial, "one and four worker threads give the same table"),
        check!("cli.verify-coverage", 0.0, cli_coverage, "every module has checks and ids are unique"),
    ]
}

pub fn run_check(c: &Check, ctx: &Context) -> Outcome {
    match (c.run)(ctx) {
        Ok((m, detail)) => Outcome { id: c.id, passed: m <= c.tolerance, measured: m, tolerance: c.tolerance, detail },
        Err(e) => Outcome { id: c.id, passed: false, measured: f64::NAN, tolerance: c.tolerance, detail: format!("error: {e}") },
    }
}

/// Runs the selected checks (all when `ids` is empty) in suite order.
pub fn run(ids: &[String], ctx: &Context) -> Result<Vec<Outcome>, String> {
    let all = checks();
    for id in ids {
        if !all.iter().any(|c| c.id == id || c.module() == id) {
            return Err(format!("unknown check {id:?}"));
        }
    }
    Ok(all
        .iter()
        .filter(|c| ids.is_empty() || ids.iter().any(|i| i == c.id || i == c.module()))
        .map(|c| run_check(c, ctx))
        .collect())
}

fn policy_for(e: &CatalogEntry, cells: usize) -> GridPolicy {
    GridPolicy::with_cells(cells).kappa(e.kappa)
}

fn worst(it: impl Iterator<Item = (f64, String)>) -> (f64, String) {
    it.fold((0.0, String::new()), |a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a })
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn weyl_err(e: krein_core::propagator::WeylError) -> String {
    format!("{e:?}")
}

fn singular_string(atoms: Vec<Atom>) -> StringCoefficients {
    let density = PiecewiseFn::new(vec![
        Piece::new(0.0, 1.0, PieceKind::Power { c: 1.5, alpha: -0.6 }),
        Piece::new(1.0, 2.5, PieceKind::Poly { origin: 1.0, coeffs: vec![1.5, -0.5, 0.25, 0.1] }),
        Piece::new(2.5, 4.0, PieceKind::Power { c: 0.3, alpha: 1.7 }),
    ]);
    StringCoefficients::new(4.0, atoms, density, PiecewiseFn::zero())
}

fn strings_refinement(_: &Context) -> Measure {
    let mut growth: f64 = 0.0;
    for atoms in [vec![], vec![Atom { y: 0.7, m: 0.3 }, Atom { y: 2.9, m: 1.1 }]] {
        let s = singular_string(atoms);
        let ts: Vec<f64> = (1..2000).map(|j| 4.0 * j as f64 / 2000.0).collect();
        let mut last = f64::INFINITY;
        for n in [16, 64, 256, 1024, 4096] {
            let d = discretize(&s, &GridPolicy::with_cells(n)).map_err(|e| format!("{e:?}"))?;
            let mut sup: f64 = 0.0;
            for &t in &ts {
                sup = sup.max((d.cumulative_a(t).map_err(|e| format!("{e:?}"))? - s.cumulative_a(t)).abs());
            }
            growth = growth.max(sup - last);
            last = sup;
        }
    }
    Ok((growth.max(0.0), String::from("n = 16 … 4096")))
}

fn strings_catalog_valid(_: &Context) -> Measure {
    let bad: Vec<String> = catalog().into_iter().filter(|e| !validate(&e.coefficients).passed()).map(|e| e.name).collect();
    Ok((bad.len() as f64, bad.join(" ")))
}

fn strings_deterministic(ctx: &Context) -> Measure {
    let mut strings: Vec<(String, StringCoefficients, f64)> = catalog().into_iter().map(|e| (e.name, e.coefficients, e.kappa)).collect();
    strings.extend(StringGenerator::new(ctx.seed).take(10).enumerate().map(|(j, s)| (format!("random-{j}"), s, 1.0)));
    let mut bad = Vec::new();
    for (name, s, kappa) in strings {
        let p = GridPolicy::with_cells(512).kappa(kappa);
        let a = discretize(&s, &p).map_err(|e| format!("{name}: {e:?}"))?;
        let b = discretize(&s, &p).map_err(|e| format!("{name}: {e:?}"))?;
        let same = a.grid.iter().zip(&b.grid).all(|(x, y)| x.to_bits() == y.to_bits())
            && a.masses().iter().zip(b.masses()).all(|(x, y)| x.to_bits() == y.to_bits())
            && a == b;
        if !same {
            bad.push(name);
        }
    }
    Ok((bad.len() as f64, bad.join(" ")))
}

fn propagator_wronskian(_: &Context) -> Measure {
    let xi = Complex64::new(1.0, 1.0);
    let r: Result<Vec<(f64, String)>, String> = catalog()
        .par_iter()
        .map(|e| {
            let d = discretize(&e.coefficients, &policy_for(e, 2048)).map_err(|x| format!("{}: {x:?}", e.name))?;
            let (pd, _) = solve_fundamental(&d, xi);
            let b = bounded_solution(&d, xi);
            Ok((wronskian_deviation(&d, &pd, &b), e.name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn random_and_catalog(ctx: &Context, random: usize) -> Vec<(String, StringCoefficients, f64)> {
    let mut v: Vec<(String, StringCoefficients, f64)> = catalog().into_iter().map(|e| (e.name, e.coefficients, e.kappa)).collect();
    v.extend(StringGenerator::new(ctx.seed).take(random).enumerate().map(|(j, s)| (format!("random-{j}"), s, 1.0)));
    v
}

fn propagator_rogers(ctx: &Context) -> Measure {
    let grid = HalfPlaneGrid { n_re: 5, n_im: 5, ..HalfPlaneGrid::default() };
    let r: Result<Vec<(f64, String)>, String> = random_and_catalog(ctx, 10)
        .par_iter()
        .map(|(name, s, kappa)| {
            let p = GridPolicy::with_cells(1024).kappa(*kappa);
            let mut err = None;
            let rep = rogers_positivity_check(
                |xi| match weyl_k(s, &p, xi, 1e-8) {
                    Ok(r) => r.k,
                    Err(e) => {
                        err = Some(weyl_err(e));
                        Complex64::new(0.0, 0.0)
                    }
                },
                &grid,
                1e-8,
            );
            match err {
                Some(e) => Err(format!("{name}: {e}")),
                None => Ok(((-rep.min).max(0.0), format!("{name} at {}", rep.at))),
            }
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn propagator_conjugate(ctx: &Context) -> Measure {
    let r: Result<Vec<(f64, String)>, String> = random_and_catalog(ctx, 10)
        .par_iter()
        .map(|(name, s, kappa)| {
            let p = GridPolicy::with_cells(1024).kappa(*kappa);
            let mut w: f64 = 0.0;
            for xi in [0.3, 1.0, 3.0] {
                let a = weyl_k(s, &p, real(xi), 1e-8).map_err(weyl_err)?.k;
                let b = weyl_k(s, &p, real(-xi), 1e-8).map_err(weyl_err)?.k;
                w = w.max((a - b.conj()).norm() / a.norm().max(1.0));
            }
            Ok((w, name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn propagator_refinement(_: &Context) -> Measure {
    let r: Result<Vec<(f64, String)>, String> = catalog()
        .par_iter()
        .map(|e| {
            let mut diffs = Vec::new();
            let mut prev: Option<Complex64> = None;
            for n in [512, 1024, 2048, 4096, 8192] {
                let k = weyl_k(&e.coefficients, &policy_for(e, n), real(1.0), 1e-9).map_err(weyl_err)?.k;
                if let Some(p) = prev {
                    diffs.push((k - p).norm());
                }
                prev = Some(k);
            }
            let floor = 1e-11 * prev.unwrap().norm().max(1.0);
            let ups = diffs.windows(2).skip(1).filter(|w| w[1] > w[0] && w[1] > floor).count();
            Ok((ups as f64, e.name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn propagator_shape(_: &Context) -> Measure {
    let r: Result<Vec<(f64, String)>, String> = catalog()
        .par_iter()
        .map(|e| {
            let mut w: f64 = 0.0;
            for xi in [0.25, 1.0, 4.0] {
                let (_, d) = weyl_with_grid(&e.coefficients, &policy_for(e, 2048), real(xi), 1e-10).map_err(weyl_err)?;
                let s = shape_report(&bounded_solution(&d, real(xi)));
                w = w.max(s.max_first_difference).max(-s.min_second_difference).max(s.max_derivative_increase);
            }
            Ok((w, e.name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn triplets() -> Vec<(String, LevyTriplet)> {
    let mut v: Vec<(String, LevyTriplet)> = catalog().into_iter().filter_map(|e| e.levy.map(|l| (e.name, l))).collect();
    v.push((String::from("exponential-mixture"), mixture()));
    v
}

fn mixture() -> LevyTriplet {
    LevyTriplet {
        alpha: 0.3,
        beta: -0.4,
        gamma: 0.2,
        nu_plus: vec![ExpTerm { c: 1.0, s: 0.5 }, ExpTerm { c: 2.0, s: 3.0 }],
        nu_minus: vec![ExpTerm { c: 0.7, s: 1.5 }],
        stable: Vec::new(),
    }
}

fn symbols_conjugate(_: &Context) -> Measure {
    Ok(worst(triplets().into_iter().map(|(name, t)| {
        let w = (1..=40)
            .map(|j| {
                let xi = 0.25 * j as f64;
                let a = levy_symbol(&t, xi);
                (levy_symbol(&t, -xi) - a.conj()).norm() / a.norm().max(1.0)
            })
            .fold(0.0, f64::max);
        (w, name)
    })))
}

fn symbols_rogers(_: &Context) -> Measure {
    Ok(worst(triplets().into_iter().map(|(name, t)| {
        let rep = rogers_positivity_check(|xi| -levy_exponent(&t, xi), &HalfPlaneGrid::default(), 1e-8);
        ((-rep.min).max(0.0), format!("{name} at {}", rep.at))
    })))
}

/// `∫ (e^{iξz} − 1 − iξz·1_{|z|<1}) c e^{−s|z|} dz` over one side, by panels.
fn side_integral(t: &ExpTerm, xi: f64, sign: f64) -> Complex64 {
    let f = |z: f64, part: usize| {
        let w = sign * xi * z;
        let comp = if z < 1.0 { w } else { 0.0 };
        let v = Complex64::new(w.cos() - 1.0, w.sin() - comp) * (t.c * (-t.s * z).exp());
        if part == 0 {
            v.re
        } else {
            v.im
        }
    };
    let end = 1.0 + 40.0 / t.s;
    let panels = ((end - 1.0) * (1.0 + xi.abs()) * 2.0).ceil() as usize;
    let near = (20.0 * (1.0 + xi.abs())).ceil() as usize;
    let re = integrate_composite(|z| f(z, 0), 0.0, 1.0, near) + integrate_composite(|z| f(z, 0), 1.0, end, panels);
    let im = integrate_composite(|z| f(z, 1), 0.0, 1.0, near) + integrate_composite(|z| f(z, 1), 1.0, end, panels);
    Complex64::new(re, im)
}

fn symbols_quadrature(_: &Context) -> Measure {
    let t = mixture();
    let mut w: f64 = 0.0;
    let mut at = 0.0;
    for j in -40..=40 {
        let xi = 0.25 * j as f64;
        let mut q = Complex64::new(-t.alpha * xi * xi - t.gamma, t.beta * xi);
        q += t.nu_plus.iter().map(|e| side_integral(e, xi, 1.0)).sum::<Complex64>();
        q += t.nu_minus.iter().map(|e| side_integral(e, xi, -1.0)).sum::<Complex64>();
        let d = (levy_symbol(&t, xi) - q).norm();
        if d > w {
            w = d;
            at = xi;
        }
    }
    Ok((w, format!("worst at ξ = {at}")))
}

fn symbols_log_gamma(_: &Context) -> Measure {
    let mut w: f64 = 0.0;
    for i in 0..=20 {
        for j in 0..=20 {
            let z = Complex64::new(-5.05 + 0.5 * i as f64, -5.0 + 0.5 * j as f64);
            let lhs = log_gamma_complex(z + 1.0).map_err(|e| format!("{e:?}"))? - log_gamma_complex(z).map_err(|e| format!("{e:?}"))? - z.ln();
            let turns = (lhs.im / (2.0 * PI)).round();
            w = w.max((lhs - Complex64::new(0.0, 2.0 * PI * turns)).norm());
        }
    }
    Ok((w, String::from("21×21 grid on [−5, 5]²")))
}

fn probes(r: f64) -> Vec<f64> {
    let end = if r.is_finite() { r } else { 12.0 };
    (1..200).map(|j| end * (j as f64 / 200.0).powi(2)).collect()
}

fn rel_gap(f: &PiecewiseFn, g: &PiecewiseFn, r: f64) -> f64 {
    probes(r).into_iter().map(|y| (f.eval(y) - g.eval(y)).abs() / (1.0 + g.eval(y).abs())).fold(0.0, f64::max)
}

fn transforms_round_trip(_: &Context) -> Measure {
    let mut out = Vec::new();
    for e in catalog() {
        let s = &e.coefficients;
        let Ok(div) = standard_to_divergence(s) else { continue };
        let back = divergence_to_standard(&div.value).map_err(|x| format!("{}: {x:?}", e.name))?;
        let tol = 1e-6_f64.max(2.0 * (div.resolution + back.resolution));
        let gap = rel_gap(&back.value.density, &s.density, s.r).max(rel_gap(&back.value.b, &s.b, s.r));
        out.push((gap / tol, e.name.clone()));
    }
    if out.len() < 10 {
        return Err(format!("only {} convertible entries", out.len()));
    }
    Ok(worst(out.into_iter()))
}

fn transforms_weyl_invariance(_: &Context) -> Measure {
    let r: Result<Vec<(f64, String)>, String> = catalog()
        .par_iter()
        .filter(|e| e.divergence.is_some())
        .map(|e| {
            let d = e.divergence.as_ref().unwrap();
            let s2 = divergence_to_standard(d).map_err(|x| format!("{x:?}"))?.value;
            let p = policy_for(e, 8192);
            let mut w: f64 = 0.0;
            for xi in [0.5, 1.0, 2.0] {
                let a = weyl_k(&e.coefficients, &p, real(xi), 1e-8).map_err(weyl_err)?.k;
                let b = weyl_k(&s2, &p, real(xi), 1e-8).map_err(weyl_err)?.k;
                w = w.max((a - b).norm() / a.norm().max(1e-300));
            }
            Ok((w, e.name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn transforms_dual_strings(_: &Context) -> Measure {
    let mut out = Vec::new();
    for e in catalog() {
        let Some(d) = e.divergence.clone().or_else(|| standard_to_divergence(&e.coefficients).ok().map(|c| c.value)) else {
            continue;
        };
        let Ok(dual) = dual_coefficients(&d) else { continue };
        let s = divergence_to_standard(&d).map_err(|x| format!("{x:?}"))?;
        let sd = divergence_to_standard(&dual.value).map_err(|x| format!("{x:?}"))?;
        let tol = 1e-9 + 4.0 * (dual.resolution + s.resolution + sd.resolution);
        let end = if s.value.r.is_finite() { 0.999 * s.value.r } else { 6.0 };
        let w = (1..50)
            .map(|j| {
                let y = end * j as f64 / 50.0;
                (sd.value.cumulative_a(s.value.cumulative_a(y)) - y).abs() / (1.0 + y)
            })
            .fold(0.0, f64::max);
        out.push((w / tol, e.name.clone()));
    }
    if out.is_empty() {
        return Err(String::from("no dualizable entries"));
    }
    Ok(worst(out.into_iter()))
}

fn band_limited() -> SampledFunction {
    SampledFunction::from_real_fn(2.0 * PI, 32, |x| x.cos() + 0.5 * (3.0 * x).sin() - 0.25 * (5.0 * x).cos())
}

fn extension_multiplier(_: &Context) -> Measure {
    let mut out = Vec::new();
    for name in ["power-mu0.5-p1-q0", "one-sided-lebesgue-c1"] {
        let e = catalog_entry(name).ok_or("missing catalog entry")?;
        let dual = example_dual(&e).map_err(|x| format!("{x:?}"))?;
        let k = DtnOperator::new(e.coefficients.clone(), policy_for(&e, 8192), 1e-8);
        let kd = DtnOperator::new(dual.coefficients.clone(), policy_for(&dual, 8192), 1e-8);
        let f = band_limited();
        let both = kd.apply(&k.apply(&f).map_err(|x| x.to_string())?).map_err(|x| x.to_string())?;
        let want = f.multiply(|xi| Complex64::new(xi * xi, 0.0));
        out.push((both.max_abs_diff(&want) / want.max_abs(), String::from(name)));
    }
    Ok(worst(out.into_iter()))
}

fn extension_realness(ctx: &Context) -> Measure {
    let f = band_limited();
    let r: Result<Vec<(f64, String)>, String> = random_and_catalog(ctx, 4)
        .par_iter()
        .map(|(name, s, kappa)| {
            let op = DtnOperator::new(s.clone(), GridPolicy::with_cells(1024).kappa(*kappa), 1e-8);
            let g = op.apply(&f).map_err(|x| format!("{name}: {x}"))?;
            Ok((g.max_imag() / g.max_abs().max(1e-300), name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn extension_plancherel(ctx: &Context) -> Measure {
    let f = SampledFunction::from_fn(5.0, 64, |x| Complex64::new((x * 1.3).sin().exp(), (2.0 * x).cos()));
    let r: Result<Vec<(f64, String)>, String> = random_and_catalog(ctx, 4)
        .par_iter()
        .map(|(name, s, kappa)| {
            let op = DtnOperator::new(s.clone(), GridPolicy::with_cells(1024).kappa(*kappa), 1e-8);
            let (g, spec) = op.apply_with_spectrum(&f, true).map_err(|x| format!("{name}: {x}"))?;
            let a = g.norm();
            let b = spectrum_norm(f.period, &spec);
            Ok(((a - b).abs() / a.max(1e-300), name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn extension_norm_monotone(ctx: &Context) -> Measure {
    let f = band_limited();
    let r: Result<Vec<(f64, String)>, String> = random_and_catalog(ctx, 4)
        .par_iter()
        .map(|(name, s, kappa)| {
            let ys: Vec<f64> = [0.0, 0.1, 1.0, 3.0].into_iter().filter(|y| *y < s.r).collect();
            let op = DtnOperator::new(s.clone(), GridPolicy::with_cells(1024).kappa(*kappa), 1e-8);
            let us = op.extend(&f, &ys).map_err(|x| format!("{name}: {x}"))?;
            let g = us.windows(2).map(|w| w[1].norm() - w[0].norm()).fold(0.0, f64::max);
            let exact0 = us[0].max_abs_diff(&f);
            Ok((g.max(exact0) / f.norm(), name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

/// Accuracy expected of each catalog family.
pub fn catalog_tolerance(e: &CatalogEntry) -> f64 {
    let n = e.name.as_str();
    if n == "zero-inf" {
        // k = 0 is approached as 1/T, so the truncation tolerance is the limit.
        1e-8
    } else if n.starts_with("zero") {
        1e-10
    } else if n.starts_with("constant") || n.starts_with("one-sided-atom") {
        1e-6
    } else if n.contains("lebesgue") {
        1e-4
    } else {
        1e-3
    }
}

fn catalog_exact(_: &Context) -> Measure {
    let r: Result<Vec<(f64, String)>, String> = catalog()
        .par_iter()
        .filter(|e| e.exact_k.is_some())
        .map(|e| {
            let exact = e.exact_k.as_ref().unwrap();
            let mut w: f64 = 0.0;
            for xi in [0.25, 1.0, 4.0] {
                let k = weyl_k_extrapolated(&e.coefficients, &policy_for(e, 8192), real(xi), 1e-8).map_err(weyl_err)?.k;
                let want = exact.eval_real(xi).map_err(|x| format!("{x:?}"))?;
                let err = if want.norm() > 0.0 { (k - want).norm() / want.norm() } else { k.norm() };
                w = w.max(err / catalog_tolerance(e));
            }
            Ok((w, e.name.clone()))
        })
        .collect();
    Ok(worst(r?.into_iter()))
}

fn catalog_constants(_: &Context) -> Measure {
    let mut out = Vec::new();
    for (mu, p, q) in [(0.5, 1.0, 0.0), (0.5, 1.0, 1.0), (1.5, 1.0, 0.0), (0.5, 0.0, 1.0), (1.5, 1.0, 1.0), (0.75, 2.0, -1.0), (1.2, 0.5, 2.0)] {
        let fc = fractional_constants(mu, p, q).map_err(|x| format!("{x:?}"))?;
        let back = ab_from_weights(mu, fc.c_plus, fc.c_minus);
        let (cp, cm) = weights_from_ab(mu, fc.ab);
        let w = ((back - fc.ab).norm() / fc.ab.norm()).max((cp - fc.c_plus).abs().max((cm - fc.c_minus).abs()) / fc.ab.norm());
        out.push((w, format!("μ={mu} p={p} q={q}")));
    }
    Ok(worst(out.into_iter()))
}

fn catalog_involution(_: &Context) -> Measure {
    let mut out = Vec::new();
    for e in catalog() {
        let Some(exact) = e.exact_k.clone() else { continue };
        if exact.eval_real(1.0).map(|v| v.norm() == 0.0).unwrap_or(true) {
            continue;
        }
        let k = move |xi: Complex64| exact.eval(xi).unwrap();
        let kk = complementary_symbol(k.clone());
        let kkk = complementary_symbol(move |xi| kk(xi).unwrap());
        let mut w: f64 = 0.0;
        for xi in (HalfPlaneGrid { n_re: 6, n_im: 6, ..HalfPlaneGrid::default() }).points() {
            let a = k(xi);
            let b = kkk(xi).map_err(|x| format!("{x:?}"))?;
            w = w.max((a - b).norm() / a.norm());
        }
        out.push((w, e.name));
    }
    Ok(worst(out.into_iter()))
}

fn catalog_exact_rogers(_: &Context) -> Measure {
    let mut out = Vec::new();
    for e in catalog() {
        let Some(exact) = e.exact_k.clone() else { continue };
        let rep = rogers_positivity_check(|xi| exact.eval(xi).unwrap_or(Complex64::new(f64::NAN, 0.0)), &HalfPlaneGrid::default(), 1e-8);
        let v = if rep.min.is_nan() { f64::INFINITY } else { (-rep.min).max(0.0) };
        out.push((v, e.name));
    }
    Ok(worst(out.into_iter()))
}

/// `(ξ, Re k, Im k, bound)` rows for `xis`, evaluated in parallel.
pub fn weyl_table(s: &StringCoefficients, policy: &GridPolicy, xis: &[f64], tol: f64, extrapolate: bool) -> Result<Vec<Vec<f64>>, String> {
    xis.par_iter()
        .map(|&xi| {
            let r = if extrapolate {
                weyl_k_extrapolated(s, policy, real(xi), tol)
            } else {
                weyl_k(s, policy, real(xi), tol)
            }
            .map_err(|e| format!("ξ = {xi}: {e:?}"))?;
            Ok(vec![xi, r.k.re, r.k.im, r.truncation_bound])
        })
        .collect()
}

fn cli_parallel_serial(_: &Context) -> Measure {
    let e = catalog_entry("power-mu0.5-p1-q1").ok_or("missing catalog entry")?;
    let xis: Vec<f64> = (0..16).map(|j| 0.25 * 1.2f64.powi(j)).collect();
    let p = policy_for(&e, 2048);
    let table = |threads: usize| -> Result<Vec<Vec<f64>>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|x| x.to_string())?;
        pool.install(|| weyl_table(&e.coefficients, &p, &xis, 1e-8, false))
    };
    let a = table(1)?;
    let b = table(4)?;
    let w = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((w, String::from("16-point table")))
}

fn cli_coverage(_: &Context) -> Measure {
    let all = checks();
    let mut missing = Vec::new();
    for m in ["strings", "propagator", "symbols", "transforms", "extension", "catalog", "cli"] {
        if !all.iter().any(|c| c.module() == m) {
            missing.push(m.to_string());
        }
    }
    let mut ids: Vec<&str> = all.iter().map(|c| c.id).collect();
    ids.sort();
    let n = ids.len();
    ids.dedup();
    Ok(((missing.len() + n - ids.len()) as f64, format!("{} checks {}", all.len(), missing.join(" "))))
}
