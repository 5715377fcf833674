//! Acceptance report: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::{exp_term_oracle, rel, AB_TABLE};
use krein::extension::{DtnOperator, SampledFunction};
use krein::random::StringGenerator;
use krein_core::catalog::{
    ab_from_weights, catalog, catalog_entry, complementary_symbol, dual_coefficients, example_constant, example_one_sided,
    example_power_law, example_zero, fractional_constants, weights_from_ab, OneSidedSpec,
};
use krein_core::piecewise::PiecewiseFn;
use krein_core::propagator::{
    bounded_solution, energy_residual, shape_report, solve_fundamental, weyl_k, weyl_k_extrapolated, weyl_with_grid,
    wronskian_deviation,
};
use krein_core::strings::discretize;
use krein_core::symbols::{levy_symbol, rogers_positivity_check, ExpTerm, HalfPlaneGrid, LevyTriplet};
use krein_core::transforms::{divergence_to_standard, reduce_general, standard_to_divergence, GeneralCoefficients};
use krein_core::{CatalogEntry, Complex64, GridPolicy};
use rayon::prelude::*;

/// One measured quantity against its limit; `measured ≤ limit` passes.
struct Part {
    label: &'static str,
    measured: f64,
    limit: f64,
}

impl Part {
    fn new(label: &'static str, measured: f64, limit: f64) -> Self {
        Part { label, measured, limit }
    }

    fn passed(&self) -> bool {
        self.measured <= self.limit
    }
}

type Outcome = Result<Vec<Part>, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn policy(e: &CatalogEntry, cells: usize) -> GridPolicy {
    GridPolicy::with_cells(cells).kappa(e.kappa)
}

fn fail<E: std::fmt::Debug>(what: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{what}: {e:?}")
}

fn max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| if b > a || b.is_nan() { b } else { a })
}

fn constant_strings() -> Outcome {
    let cases: Vec<(f64, f64, f64)> =
        [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -3.0)].iter().flat_map(|&(p, q)| [0.25, 1.0, 4.0].map(|xi| (p, q, xi))).collect();
    let r: Result<Vec<(f64, f64)>, String> = cases
        .par_iter()
        .map(|&(p, q, xi)| {
            let e = example_constant(p, q);
            let w = weyl_k(&e.coefficients, &GridPolicy::with_cells(65536), real(xi), 1e-7).map_err(fail("weyl"))?;
            Ok((rel(w.k, Complex64::new(p * xi, -q * xi)), w.truncation_bound))
        })
        .collect();
    let r = r?;
    Ok(vec![Part::new("rel err", max(r.iter().map(|x| x.0)), 1e-6), Part::new("bound", max(r.iter().map(|x| x.1)), 1e-6)])
}

fn zero_strings() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let e = example_zero(r);
        for j in 0..20 {
            let xi = 0.1 * 1.4f64.powi(j);
            let k = weyl_k(&e.coefficients, &GridPolicy::with_cells(256), real(xi), 1e-12).map_err(fail("weyl"))?.k;
            worst = worst.max((k - 1.0 / r).norm());
        }
    }
    Ok(vec![Part::new("abs err", worst, 1e-10)])
}

fn square_root() -> Outcome {
    let e = example_one_sided(&OneSidedSpec::lebesgue(1.0)).map_err(fail("catalog"))?;
    let mut worst: f64 = 0.0;
    for xi in [0.25, 1.0, 4.0] {
        let k = weyl_k(&e.coefficients, &GridPolicy::with_cells(16384), real(xi), 1e-9).map_err(fail("weyl"))?.k;
        worst = worst.max(rel(k, (Complex64::i() * xi).sqrt()));
    }
    Ok(vec![Part::new("rel err", worst, 1e-4)])
}

fn fractional() -> Outcome {
    let mut cases = Vec::new();
    for (mu, p, q) in [(0.5, 1.0, 0.0), (0.5, 1.0, 1.0), (1.5, 1.0, 0.0), (0.5, 0.0, 1.0)] {
        let &(_, _, _, a, b) = AB_TABLE.iter().find(|t| (t.0, t.1, t.2) == (mu, p, q)).ok_or("missing reference value")?;
        for xi in [0.25, 1.0, 4.0] {
            cases.push((mu, p, q, Complex64::new(a, b), xi));
        }
    }
    let r: Result<Vec<f64>, String> = cases
        .par_iter()
        .map(|&(mu, p, q, ab, xi)| {
            let e = example_power_law(mu, p, q).map_err(fail("catalog"))?;
            let pol = GridPolicy::with_cells(16384).kappa(2.0 / mu);
            let k = weyl_k(&e.coefficients, &pol, real(xi), 1e-9).map_err(fail("weyl"))?.k;
            Ok(rel(k, ab * xi.powf(mu)))
        })
        .collect();
    Ok(vec![Part::new("rel err", max(r?.into_iter()), 1e-3)])
}

fn positivity() -> Outcome {
    let grid = HalfPlaneGrid::default();
    let strings: Vec<_> = StringGenerator::new(2024).take(50).collect();
    let r: Vec<f64> = strings
        .par_iter()
        .map(|s| {
            let mut failure = None;
            let rep = rogers_positivity_check(
                |xi| match weyl_k(s, &GridPolicy::with_cells(1024), xi, 1e-8) {
                    Ok(w) => w.k,
                    Err(e) => {
                        failure = Some(format!("{e:?}"));
                        Complex64::new(f64::NAN, 0.0)
                    }
                },
                &grid,
                1e-8,
            );
            if failure.is_some() {
                f64::NAN
            } else {
                -rep.min
            }
        })
        .collect();
    Ok(vec![Part::new("max −Re(k/ξ)", max(r.into_iter()), 1e-8)])
}

fn wronskian() -> Outcome {
    let xi = Complex64::new(1.0, 1.0);
    let r: Result<Vec<f64>, String> = catalog()
        .par_iter()
        .map(|e| {
            let d = discretize(&e.coefficients, &policy(e, 2048)).map_err(fail(&e.name))?;
            let (pd, _) = solve_fundamental(&d, xi);
            Ok(wronskian_deviation(&d, &pd, &bounded_solution(&d, xi)))
        })
        .collect();
    Ok(vec![Part::new("node deviation", max(r?.into_iter()), 1e-8)])
}

fn real_axis_traces<T: Send>(f: impl Fn(&krein_core::DiscretizedString, f64, &krein_core::SolutionTrace) -> T + Sync) -> Result<Vec<T>, String> {
    let cases: Vec<(CatalogEntry, f64)> = catalog().into_iter().flat_map(|e| [0.25, 1.0, 4.0].map(|xi| (e.clone(), xi))).collect();
    cases
        .par_iter()
        .map(|(e, xi)| {
            let (_, d) = weyl_with_grid(&e.coefficients, &policy(e, 4096), real(*xi), 1e-10).map_err(fail(&e.name))?;
            let t = bounded_solution(&d, real(*xi));
            Ok(f(&d, *xi, &t))
        })
        .collect()
}

fn energy() -> Outcome {
    let r = real_axis_traces(energy_residual)?;
    Ok(vec![
        Part::new("residual", max(r.iter().map(|e| e.residual)), 1e-4),
        Part::new("tail excess", max(r.iter().map(|e| e.tail_violation)), 1e-6),
    ])
}

fn shape() -> Outcome {
    let r = real_axis_traces(|_, _, t| shape_report(t))?;
    Ok(vec![
        Part::new("−min Δ²|φ|²", max(r.iter().map(|s| -s.min_second_difference)), 1e-10),
        Part::new("max Δ|φ|²", max(r.iter().map(|s| s.max_first_difference)), 1e-10),
    ])
}

fn entry(name: &str) -> Result<CatalogEntry, String> {
    catalog_entry(name).ok_or_else(|| format!("no catalog entry {name}"))
}

fn duality() -> Outcome {
    let (e, dual) = (entry("power-mu0.5-p1-q0")?, entry("dual-power-mu0.5-p1-q0")?);
    let r: Result<Vec<f64>, String> = [0.5, 1.0, 2.0]
        .par_iter()
        .map(|&xi| {
            let k = weyl_k_extrapolated(&e.coefficients, &policy(&e, 8192), real(xi), 1e-10).map_err(fail("weyl"))?.k;
            let kd = weyl_k_extrapolated(&dual.coefficients, &policy(&dual, 8192), real(xi), 1e-10).map_err(fail("weyl ♯"))?.k;
            Ok((k * kd / (xi * xi) - 1.0).norm())
        })
        .collect();
    let mut involution: f64 = 0.0;
    let grid = HalfPlaneGrid { n_re: 6, n_im: 6, ..HalfPlaneGrid::default() };
    for c in catalog() {
        let Some(exact) = c.exact_k.clone() else { continue };
        if c.name.starts_with("zero") {
            continue;
        }
        let k = move |xi: Complex64| exact.eval(xi).unwrap();
        let once = complementary_symbol(k.clone());
        let twice = complementary_symbol(move |xi| once(xi).unwrap());
        for xi in grid.points() {
            involution = involution.max(rel(twice(xi).map_err(fail("complement"))?, k(xi)));
        }
    }
    Ok(vec![Part::new("|kk♯/ξ² − 1|", max(r?.into_iter()), 1e-3), Part::new("involution", involution, 1e-12)])
}

fn trig(n: usize, f: impl Fn(f64) -> f64) -> SampledFunction {
    SampledFunction::from_real_fn(2.0 * PI, n, f)
}

fn dtn() -> Outcome {
    let cases = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -3.0)];
    let eigen: Result<Vec<f64>, String> = cases
        .par_iter()
        .map(|&(p, q)| {
            let op = DtnOperator::new(example_constant(p, q).coefficients, GridPolicy::with_cells(8192), 1e-10);
            let kc = op.apply(&trig(8, f64::cos)).map_err(fail("dtn"))?;
            let ks = op.apply(&trig(8, f64::sin)).map_err(fail("dtn"))?;
            let ec = kc.max_abs_diff(&trig(8, |x| -p * x.cos() - q * x.sin()));
            let es = ks.max_abs_diff(&trig(8, |x| -p * x.sin() + q * x.cos()));
            Ok(ec.max(es))
        })
        .collect();
    let (e, dual) = (entry("power-mu0.5-p1-q0")?, entry("dual-power-mu0.5-p1-q0")?);
    let op = DtnOperator::new(e.coefficients.clone(), policy(&e, 8192), 1e-10);
    let op_dual = DtnOperator::new(dual.coefficients.clone(), policy(&dual, 8192), 1e-10);
    let f = trig(16, |x| x.cos() + 0.5 * (2.0 * x).sin() + 0.25 * (3.0 * x).cos() - 0.1 * (4.0 * x).sin());
    let g = op_dual.apply(&op.apply(&f).map_err(fail("dtn"))?).map_err(fail("dtn ♯"))?;
    let want = f.multiply(|xi| real(xi * xi));
    let composition = g.max_abs_diff(&want) / want.max_abs();
    Ok(vec![Part::new("eigen", max(eigen?.into_iter()), 1e-8), Part::new("K♯K − ξ²", composition, 1e-3)])
}

fn exponential_mixture() -> Outcome {
    let t = LevyTriplet {
        nu_plus: vec![ExpTerm { c: 1.0, s: 1.0 }, ExpTerm { c: 0.4, s: 0.3 }, ExpTerm { c: 2.0, s: 5.0 }],
        nu_minus: vec![ExpTerm { c: 0.7, s: 2.5 }, ExpTerm { c: 0.1, s: 0.05 }],
        ..LevyTriplet::default()
    };
    let xis: Vec<f64> = (0..=80).map(|j| -10.0 + 0.25 * j as f64).collect();
    let worst = max(xis.par_iter().map(|&xi| {
        let mut want = Complex64::new(0.0, 0.0);
        for e in &t.nu_plus {
            want += exp_term_oracle(e.c, e.s, xi);
        }
        for e in &t.nu_minus {
            want += exp_term_oracle(e.c, e.s, -xi);
        }
        (levy_symbol(&t, xi) - want).norm() / want.norm().max(1.0)
    }).collect::<Vec<_>>().into_iter());
    Ok(vec![Part::new("rel err", worst, 1e-8)])
}

fn sup_gap(f: &PiecewiseFn, g: &PiecewiseFn, r: f64) -> f64 {
    let end = if r.is_finite() { r } else { 12.0 };
    max((1..400).map(|j| end * (j as f64 / 400.0).powi(2)).map(|y| (f.eval(y) - g.eval(y)).abs() / (1.0 + g.eval(y).abs())))
}

fn constant_general(r0: f64, a0: f64, c0: f64, d0: f64, e0: f64) -> GeneralCoefficients {
    let k = |v: f64| PiecewiseFn::constant(0.0, r0, v);
    GeneralCoefficients { r0, a0: k(a0), b0: k(0.0), c0: k(c0), d0: k(d0), e0: k(e0) }
}

fn transforms() -> Outcome {
    let mut round_trip: f64 = 0.0;
    let mut checked = 0;
    for e in catalog() {
        let s = &e.coefficients;
        let positive = !s.density.pieces.is_empty() && (1..100).all(|j| s.density.eval(j as f64 * s.r.min(12.0) / 100.0) > 0.0);
        if !positive {
            continue;
        }
        let div = standard_to_divergence(s).map_err(fail(&e.name))?;
        let back = divergence_to_standard(&div.value).map_err(fail(&e.name))?;
        round_trip = round_trip.max(sup_gap(&back.value.density, &s.density, s.r)).max(sup_gap(&back.value.b, &s.b, s.r));
        checked += 1;
    }
    if checked == 0 {
        return Err(String::from("no positive-density entries"));
    }
    let nodes: Vec<f64> = (0..=20).map(|j| 2.0 * j as f64 / 20.0).collect();
    let mut reduction: f64 = 0.0;
    let id = reduce_general(&constant_general(2.0, 1.0, 1.0, 0.0, 0.0), &nodes).map_err(fail("identity"))?;
    for n in &id.nodes {
        reduction = reduction.max((n.sigma - n.y).abs()).max(n.tau.abs());
    }
    let delta = 1.3;
    let drift = reduce_general(&constant_general(2.0, 1.0, 1.0, delta, 0.0), &nodes).map_err(fail("drift"))?;
    for n in &drift.nodes {
        reduction = reduction.max((n.sigma - n.y).abs()).max((n.tau + 0.5 * delta * n.y * n.y).abs());
    }
    Ok(vec![Part::new("round trip", round_trip, 1e-6), Part::new("σ, τ", reduction, 1e-8)])
}

fn weights() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases: Vec<(f64, f64, f64)> = AB_TABLE.iter().map(|t| (t.0, t.1, t.2)).collect();
    for mu in [0.1, 0.3, 0.7, 0.9, 1.1, 1.3, 1.7, 1.9] {
        for (p, q) in [(1.0, 0.0), (0.0, 1.0), (1.0, -2.0), (0.5, 0.5)] {
            cases.push((mu, p, q));
        }
    }
    for (mu, p, q) in cases {
        let fc = fractional_constants(mu, p, q).map_err(fail("constants"))?;
        let (cp, cm) = weights_from_ab(mu, fc.ab);
        let back = ab_from_weights(mu, cp, cm);
        let scale = fc.ab.norm();
        worst = worst.max((back - fc.ab).norm() / scale);
        worst = worst.max(((cp - fc.c_plus).abs() + (cm - fc.c_minus).abs()) / scale);
        let again = weights_from_ab(mu, ab_from_weights(mu, fc.c_plus, fc.c_minus));
        worst = worst.max(((again.0 - fc.c_plus).abs() + (again.1 - fc.c_minus).abs()) / scale);
    }
    Ok(vec![Part::new("rel err", worst, 1e-12)])
}

fn dual_round_trip() -> Result<(), String> {
    let e = entry("power-mu1.5-p1-q1")?;
    let d = e.divergence.ok_or("no divergence form")?;
    let twice = dual_coefficients(&dual_coefficients(&d).map_err(fail("dual"))?.value).map_err(fail("dual"))?.value;
    let gap = sup_gap(&twice.a_dot, &d.a_dot, d.r_dot).max(sup_gap(&twice.b_dot, &d.b_dot, d.r_dot));
    if gap > 1e-12 {
        return Err(format!("dual of dual differs by {gap:e}"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("constant strings", constant_strings),
        ("finite zero strings", zero_strings),
        ("square-root witness", square_root),
        ("fractional power laws", fractional),
        ("Rogers positivity, random strings", positivity),
        ("Wronskian", wronskian),
        ("energy identity and tail bound", energy),
        ("monotone convex |φ|²", shape),
        ("duality and involution", || {
            dual_round_trip()?;
            duality()
        }),
        ("DtN eigenfunctions and composition", dtn),
        ("exponential-mixture symbol", exponential_mixture),
        ("form round trips and reduction", transforms),
        ("stable weights round trip", weights),
    ];
    let mut failed = 0;
    for (j, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(parts) => (
                parts.iter().all(Part::passed),
                parts.iter().map(|p| format!("{} {:.3e} (≤ {:.0e})", p.label, p.measured, p.limit)).collect::<Vec<_>>().join(", "),
            ),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {} {:<36} {} [{:.1}s]", j + 1, if ok { "PASS" } else { "FAIL" }, name, detail, secs);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
