//! The `krein` command line.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use krein_core::catalog::{catalog, catalog_entry, dual_coefficients};
use krein_core::propagator::{bounded_solution, solve_fundamental, weyl_with_grid, SolutionTrace};
use krein_core::strings::validate;
use krein_core::transforms::{ek_to_standard, standard_to_divergence, standard_to_ek};
use krein_core::{CatalogEntry, Complex64, GridPolicy, StringCoefficients};

use crate::extension::DtnOperator;
use crate::formats::{parse_document, parse_symbol, read_samples, write_samples, write_table, Coefficients, Document, Form};
use crate::verify::{self, weyl_table, Context};

#[derive(Debug, Parser)]
#[command(name = "krein", version, about = "Krein strings, Weyl functions and Dirichlet-to-Neumann maps")]
pub struct Cli {
    /// Seed of the random string generator used by `verify`.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl function on a ξ-grid: CSV `xi, re_k, im_k, bound`.
    Weyl {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: XiGrid,
        #[command(flatten)]
        num: Numerics,
        #[command(flatten)]
        out: Output,
    },
    /// Solution trace at one ξ: CSV `t, re_phi, im_phi, re_dphi, im_dphi`.
    Solve {
        #[command(flatten)]
        input: Input,
        /// Real part of ξ.
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        /// Imaginary part of ξ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        xi_im: f64,
        #[arg(long, value_enum, default_value_t = Solution::Bounded)]
        solution: Solution,
        #[command(flatten)]
        num: Numerics,
        #[command(flatten)]
        out: Output,
    },
    /// Rogers symbol of a Lévy, Stieltjes or exponential spec: CSV `xi, re_k, im_k`.
    Symbol {
        /// JSON symbol spec.
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        grid: XiGrid,
        #[command(flatten)]
        out: Output,
    },
    /// DtN map applied to periodic samples: CSV `x, re, im`.
    Dtn {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        samples: Samples,
        #[command(flatten)]
        num: Numerics,
        #[command(flatten)]
        out: Output,
    },
    /// Harmonic extension of periodic samples to the given heights.
    Extend {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        samples: Samples,
        /// Comma-separated heights in [0, R).
        #[arg(long, value_delimiter = ',', required = true)]
        heights: Vec<f64>,
        #[command(flatten)]
        num: Numerics,
        /// Directory for one `u_y=<y>.csv` per height (default: stdout, blocks headed by `# y = …`).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Convert a coefficient file to another form.
    Convert {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        to: Form,
        #[command(flatten)]
        out: Output,
    },
    /// Dual coefficients in divergence form.
    Dual {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form examples.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the invariant suite; exit code 0 iff every selected check passes.
    Verify {
        /// Check id or module name (repeatable; default: all).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// List the checks without running them.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// Entry names and notes.
    List,
    /// Write `<name>.json` and `<name>.exact_k.csv`.
    Emit {
        /// Entry name (omit with `--all`).
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        #[command(flatten)]
        grid: XiGrid,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// JSON coefficient file (any form).
    #[arg(short, long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solution {
    /// φ(0) = 1, decaying.
    Bounded,
    /// φ(0) = 0, φ'(0) = 1.
    Dirichlet,
    /// φ(0) = 1, φ'(0) = 0.
    Neumann,
}

#[derive(Debug, Clone, Args)]
pub struct XiGrid {
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 9)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,
}

impl XiGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let (a, b, n) = (self.xi_min, self.xi_max, self.count);
        if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && a == b) {
            return Err(CliError::usage("the ξ-grid must be non-empty with distinct finite ends"));
        }
        if self.scale == Scale::Log && !(a > 0.0 && b > 0.0) {
            return Err(CliError::usage("a log ξ-grid needs positive ends"));
        }
        Ok((0..n)
            .map(|j| {
                let f = if n == 1 { 0.0 } else { j as f64 / (n - 1) as f64 };
                match self.scale {
                    Scale::Log => a * (b / a).powf(f),
                    Scale::Linear => a + (b - a) * f,
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Args)]
pub struct Numerics {
    /// Truncation tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Cells in the core region.
    #[arg(long, default_value_t = 4096)]
    pub cells: usize,
    /// Grading exponent (default: from a power-law density at the origin).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Combine the grid with its refinement to cancel the leading error term.
    #[arg(long)]
    pub extrapolate: bool,
}

#[derive(Debug, Args)]
pub struct Samples {
    /// CSV with columns x, re, im at x_j = jX/n.
    #[arg(long)]
    pub samples: PathBuf,
    /// Period X (default: inferred from the spacing).
    #[arg(long)]
    pub period: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn usage(m: impl Into<String>) -> Self {
        CliError::Usage(m.into())
    }

    /// 2 for bad input, 1 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input { path: path.display().to_string(), message: e.to_string() }
}

fn load(path: &Path) -> Result<Document, CliError> {
    parse_document(&read(path)?).map_err(|e| input_error(path, e))
}

fn load_standard(path: &Path) -> Result<StringCoefficients, CliError> {
    let doc = load(path)?;
    let s = doc.coefficients.to_standard(512).map(|(s, _)| s).map_err(|e| input_error(path, e))?;
    let report = validate(&s);
    if let Some(v) = report.violations.first() {
        let more = report.violations.len() - 1;
        return Err(input_error(path, format!("not a valid string: {:?} at y = {} ({}), {more} more", v.kind, v.at, v.amount)));
    }
    Ok(s)
}

fn emit(out: &Output, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: String::from("stdout"), source })
        }
    }
}

impl Numerics {
    fn check(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0) {
            return Err(CliError::usage("--tol must be positive"));
        }
        if self.cells == 0 {
            return Err(CliError::usage("--cells must be positive"));
        }
        Ok(())
    }

    fn policy(&self, s: &StringCoefficients) -> GridPolicy {
        GridPolicy::with_cells(self.cells).kappa(self.kappa.unwrap_or_else(|| GridPolicy::kappa_for(s)))
    }
}

fn trace_rows(t: &SolutionTrace) -> Vec<Vec<f64>> {
    (0..t.len())
        .map(|k| {
            let (p, d) = t.state_at(k);
            vec![t.grid[k], p.re, p.im, d.re, d.im]
        })
        .collect()
}

fn exact_k_csv(e: &CatalogEntry, xis: &[f64]) -> Result<String, CliError> {
    let Some(exact) = &e.exact_k else {
        return Ok(write_table(&["xi", "re_k", "im_k"], &[]));
    };
    let rows: Result<Vec<Vec<f64>>, CliError> = xis
        .iter()
        .map(|&xi| {
            let k = exact.eval_real(xi).map_err(|x| CliError::Numerical(format!("{}: {x:?}", e.name)))?;
            Ok(vec![xi, k.re, k.im])
        })
        .collect();
    Ok(write_table(&["xi", "re_k", "im_k"], &rows?))
}

/// The standard-form file of a catalog entry.
pub fn catalog_document(e: &CatalogEntry) -> Document {
    Document { name: Some(e.name.clone()), note: Some(e.note.to_string()), coefficients: Coefficients::Standard(e.coefficients.clone()) }
}

/// Writes `<name>.json` and `<name>.exact_k.csv` for each entry.
pub fn emit_catalog(entries: &[CatalogEntry], dir: &Path, xis: &[f64]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    for e in entries {
        for (file, text) in [
            (format!("{}.json", e.name), catalog_document(e).to_json()),
            (format!("{}.exact_k.csv", e.name), exact_k_csv(e, xis)?),
        ] {
            let p = dir.join(file);
            fs::write(&p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        }
    }
    Ok(())
}

/// Runs a parsed command line; `Ok(false)` when requested checks fail.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    if cli.threads > 0 {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match cli.command {
        Command::Weyl { input, grid, num, out } => {
            num.check()?;
            let s = load_standard(&input.input)?;
            let rows = weyl_table(&s, &num.policy(&s), &grid.points()?, num.tol, num.extrapolate).map_err(CliError::Numerical)?;
            emit(&out, &write_table(&["xi", "re_k", "im_k", "bound"], &rows))?;
        }
        Command::Solve { input, xi, xi_im, solution, num, out } => {
            num.check()?;
            let s = load_standard(&input.input)?;
            let z = Complex64::new(xi, xi_im);
            let (_, d) = weyl_with_grid(&s, &num.policy(&s), z, num.tol).map_err(|e| CliError::Numerical(format!("{e:?}")))?;
            let t = match solution {
                Solution::Bounded => bounded_solution(&d, z),
                Solution::Dirichlet => solve_fundamental(&d, z).0,
                Solution::Neumann => solve_fundamental(&d, z).1,
            };
            emit(&out, &write_table(&["t", "re_phi", "im_phi", "re_dphi", "im_dphi"], &trace_rows(&t)))?;
        }
        Command::Symbol { input, grid, out } => {
            let spec = parse_symbol(&read(&input)?).map_err(|e| input_error(&input, e))?;
            let rows: Result<Vec<Vec<f64>>, CliError> = grid
                .points()?
                .into_iter()
                .map(|xi| {
                    let k = spec.eval(xi).map_err(|e| CliError::Numerical(format!("ξ = {xi}: {e}")))?;
                    Ok(vec![xi, k.re, k.im])
                })
                .collect();
            emit(&out, &write_table(&["xi", "re_k", "im_k"], &rows?))?;
        }
        Command::Dtn { input, samples, num, out } => {
            num.check()?;
            let s = load_standard(&input.input)?;
            let f = read_samples(&read(&samples.samples)?, samples.period).map_err(|e| input_error(&samples.samples, e))?;
            let mut op = DtnOperator::new(s.clone(), num.policy(&s), num.tol);
            op.extrapolate = num.extrapolate;
            let g = op.apply(&f).map_err(|e| CliError::Numerical(e.to_string()))?;
            emit(&out, &write_samples(&g))?;
        }
        Command::Extend { input, samples, heights, num, output_dir } => {
            num.check()?;
            let s = load_standard(&input.input)?;
            let f = read_samples(&read(&samples.samples)?, samples.period).map_err(|e| input_error(&samples.samples, e))?;
            let op = DtnOperator::new(s.clone(), num.policy(&s), num.tol);
            let us = op.extend(&f, &heights).map_err(|e| match e {
                crate::extension::ExtensionError::Height { .. } => CliError::Usage(e.to_string()),
                _ => CliError::Numerical(e.to_string()),
            })?;
            match output_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
                    for (y, u) in heights.iter().zip(&us) {
                        let p = dir.join(format!("u_y={y}.csv"));
                        fs::write(&p, write_samples(u)).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
                    }
                }
                None => {
                    let text: String = heights.iter().zip(&us).map(|(y, u)| format!("# y = {y}\n{}", write_samples(u))).collect();
                    emit(&Output { output: None }, &text)?;
                }
            }
        }
        Command::Convert { input, to, out } => {
            let doc = load(&input.input)?;
            let fail = |e: String| CliError::Numerical(format!("conversion failed: {e}"));
            let standard = || doc.coefficients.to_standard(512).map(|(s, _)| s).map_err(fail);
            let coefficients = match (to, &doc.coefficients) {
                (t, c) if t == c.form() => c.clone(),
                (Form::Standard, _) => Coefficients::Standard(standard()?),
                (Form::Ek, _) => Coefficients::Ek(standard_to_ek(&standard()?).map_err(|e| fail(format!("{e:?}")))?.value),
                (Form::Divergence, _) => {
                    Coefficients::Divergence(standard_to_divergence(&standard()?).map_err(|e| fail(format!("{e:?}")))?.value)
                }
                (Form::General, _) => return Err(CliError::usage("conversion to general form is not supported")),
            };
            emit(&out, &Document { name: doc.name.clone(), note: doc.note.clone(), coefficients }.to_json())?;
        }
        Command::Dual { input, out } => {
            let doc = load(&input.input)?;
            let d = match &doc.coefficients {
                Coefficients::Divergence(d) => d.clone(),
                Coefficients::Ek(e) => {
                    let s = ek_to_standard(e).map_err(|x| CliError::Numerical(format!("{x:?}")))?.value;
                    standard_to_divergence(&s).map_err(|x| CliError::Numerical(format!("{x:?}")))?.value
                }
                c => {
                    let s = c.to_standard(512).map_err(CliError::Numerical)?.0;
                    standard_to_divergence(&s).map_err(|x| CliError::Numerical(format!("{x:?}")))?.value
                }
            };
            let dual = dual_coefficients(&d).map_err(|x| CliError::Numerical(format!("{x:?}")))?;
            let name = doc.name.as_ref().map(|n| format!("dual-{n}"));
            emit(&out, &Document { name, note: None, coefficients: Coefficients::Divergence(dual.value) }.to_json())?;
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let text: String = catalog().iter().map(|e| format!("{}\t{}\n", e.name, e.note)).collect();
                emit(&Output { output: None }, &text)?;
            }
            CatalogAction::Emit { name, all, dir, grid } => {
                let entries = match (name, all) {
                    (_, true) => catalog(),
                    (Some(n), false) => vec![catalog_entry(&n).ok_or_else(|| CliError::usage(format!("no catalog entry named {n:?}")))?],
                    (None, false) => return Err(CliError::usage("give an entry name or --all")),
                };
                emit_catalog(&entries, &dir, &grid.points()?)?;
            }
        },
        Command::Verify { checks, list, out } => {
            if list {
                let text: String = verify::checks().iter().map(|c| format!("{:<36} tol {:.1e}  {}\n", c.id, c.tolerance, c.description)).collect();
                emit(&out, &text)?;
                return Ok(true);
            }
            let outcomes = verify::run(&checks, &Context { seed: cli.seed }).map_err(CliError::Usage)?;
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let mut text: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
            emit(&out, &text)?;
            return Ok(passed == outcomes.len());
        }
    }
    Ok(true)
}
