//! JSON coefficient and symbol files, CSV tables.
//!
//! Numbers may be written as `"inf"` or `"-inf"`. A coefficient file without
//! a `form` tag is read as standard form.

use std::fmt::Write as _;

use krein_core::piecewise::{Piece, PieceKind, PiecewiseFn};
use krein_core::symbols::{
    exponential_symbol, levy_symbol, stieltjes_symbol, ExpTerm, ExponentialData, LevyTriplet, Side, StableTerm,
    StieltjesData, ThetaPiece,
};
use krein_core::transforms::{
    divergence_to_standard, ek_to_standard, reduce_general, DivergenceCoefficients, EKCoefficients, GeneralCoefficients,
};
use krein_core::{Atom, Complex64, StringCoefficients};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::extension::SampledFunction;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Invalid { location: location.into(), message: message.into() }
}

/// A number that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            x if x.is_finite() => s.serialize_f64(x),
            x if x == f64::INFINITY => s.serialize_str("inf"),
            x if x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            _ => Err(serde::ser::Error::custom("NaN is not representable")),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            F(f64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::F(x) => Ok(Num(x)),
            Repr::S(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(Num(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Num(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceTag {
    Power,
    Poly,
}

/// `{from, to, kind: "power", c, alpha}` or `{from, to, kind: "poly", coeffs, origin?}`;
/// polynomial coefficients are in powers of `y − origin` (default origin 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub from: Num,
    pub to: Num,
    pub kind: PieceTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub y: f64,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardSpec {
    #[serde(rename = "R")]
    pub r: Num,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub density: Vec<PieceSpec>,
    #[serde(default)]
    pub b: Vec<PieceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EkSpec {
    #[serde(rename = "R")]
    pub r: Num,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub a_tilde: Vec<PieceSpec>,
    #[serde(default)]
    pub b: Vec<PieceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceSpec {
    #[serde(rename = "R")]
    pub r: Num,
    pub a_dot: Vec<PieceSpec>,
    #[serde(default)]
    pub b_dot: Vec<PieceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralSpec {
    #[serde(rename = "R")]
    pub r: Num,
    pub a0: Vec<PieceSpec>,
    #[serde(default)]
    pub b0: Vec<PieceSpec>,
    pub c0: Vec<PieceSpec>,
    #[serde(default)]
    pub d0: Vec<PieceSpec>,
    #[serde(default)]
    pub e0: Vec<PieceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum FormSpec {
    Standard(StandardSpec),
    Ek(EkSpec),
    Divergence(DivergenceSpec),
    General(GeneralSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocumentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(flatten)]
    pub body: FormSpec,
}

/// Coefficients in any of the four forms.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Standard(StringCoefficients),
    Ek(EKCoefficients),
    Divergence(DivergenceCoefficients),
    General(GeneralCoefficients),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Form {
    Standard,
    Ek,
    Divergence,
    General,
}

impl Coefficients {
    pub fn form(&self) -> Form {
        match self {
            Coefficients::Standard(_) => Form::Standard,
            Coefficients::Ek(_) => Form::Ek,
            Coefficients::Divergence(_) => Form::Divergence,
            Coefficients::General(_) => Form::General,
        }
    }

    /// The standard-form string and the resolution of the conversion.
    ///
    /// General coefficients are reduced on `reduction_nodes` uniform nodes.
    pub fn to_standard(&self, reduction_nodes: usize) -> Result<(StringCoefficients, f64), String> {
        match self {
            Coefficients::Standard(s) => Ok((s.clone(), 0.0)),
            Coefficients::Ek(e) => ek_to_standard(e).map(|c| (c.value, c.resolution)).map_err(|e| format!("{e:?}")),
            Coefficients::Divergence(d) => {
                divergence_to_standard(d).map(|c| (c.value, c.resolution)).map_err(|e| format!("{e:?}"))
            }
            Coefficients::General(g) => {
                if !g.r0.is_finite() {
                    return Err(String::from("reduction needs a finite R"));
                }
                let n = reduction_nodes.max(2);
                let nodes: Vec<f64> = (0..=n).map(|j| g.r0 * j as f64 / n as f64).collect();
                reduce_general(g, &nodes).map(|r| (r.coefficients, 0.0)).map_err(|e| format!("{e:?}"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub name: Option<String>,
    pub note: Option<String>,
    pub coefficients: Coefficients,
}

fn num(x: f64) -> Num {
    Num(x)
}

pub fn piece_spec(p: &Piece) -> PieceSpec {
    let mut s = PieceSpec { from: num(p.from), to: num(p.to), kind: PieceTag::Poly, c: None, alpha: None, coeffs: None, origin: None };
    match &p.kind {
        PieceKind::Power { c, alpha } => {
            s.kind = PieceTag::Power;
            s.c = Some(*c);
            s.alpha = Some(*alpha);
        }
        PieceKind::Poly { origin, coeffs } => {
            s.coeffs = Some(coeffs.clone());
            s.origin = (*origin != 0.0).then_some(*origin);
        }
    }
    s
}

fn piece_specs(f: &PiecewiseFn) -> Vec<PieceSpec> {
    f.pieces.iter().map(piece_spec).collect()
}

fn piece_from_spec(s: &PieceSpec, at: &str) -> Result<Piece, FormatError> {
    let kind = match s.kind {
        PieceTag::Power => {
            if s.coeffs.is_some() || s.origin.is_some() {
                return Err(invalid(at, "power pieces take c and alpha only"));
            }
            let c = s.c.ok_or_else(|| invalid(at, "missing c"))?;
            let alpha = s.alpha.ok_or_else(|| invalid(at, "missing alpha"))?;
            PieceKind::Power { c, alpha }
        }
        PieceTag::Poly => {
            if s.c.is_some() || s.alpha.is_some() {
                return Err(invalid(at, "poly pieces take coeffs and origin only"));
            }
            let coeffs = s.coeffs.clone().ok_or_else(|| invalid(at, "missing coeffs"))?;
            if coeffs.is_empty() {
                return Err(invalid(at, "empty coeffs"));
            }
            PieceKind::Poly { origin: s.origin.unwrap_or(0.0), coeffs }
        }
    };
    if !(s.from.0 < s.to.0) {
        return Err(invalid(at, format!("piece [{}, {}) is empty", s.from.0, s.to.0)));
    }
    Ok(Piece::new(s.from.0, s.to.0, kind))
}

fn piecewise(specs: &[PieceSpec], field: &str) -> Result<PiecewiseFn, FormatError> {
    let pieces = specs
        .iter()
        .enumerate()
        .map(|(j, s)| piece_from_spec(s, &format!("{field}[{j}]")))
        .collect::<Result<Vec<_>, _>>()?;
    for (j, w) in pieces.windows(2).enumerate() {
        if w[1].from < w[0].to {
            return Err(invalid(format!("{field}[{}]", j + 1), "pieces overlap or are out of order"));
        }
    }
    Ok(PiecewiseFn::new(pieces))
}

fn atoms(specs: &[AtomSpec]) -> Vec<Atom> {
    specs.iter().map(|a| Atom { y: a.y, m: a.m }).collect()
}

fn atom_specs(a: &[Atom]) -> Vec<AtomSpec> {
    a.iter().map(|a| AtomSpec { y: a.y, m: a.m }).collect()
}

impl Document {
    pub fn new(coefficients: Coefficients) -> Self {
        Document { name: None, note: None, coefficients }
    }

    pub fn spec(&self) -> DocumentSpec {
        let body = match &self.coefficients {
            Coefficients::Standard(s) => FormSpec::Standard(StandardSpec {
                r: num(s.r),
                atoms: atom_specs(&s.atoms),
                density: piece_specs(&s.density),
                b: piece_specs(&s.b),
            }),
            Coefficients::Ek(e) => FormSpec::Ek(EkSpec {
                r: num(e.r),
                atoms: atom_specs(&e.atoms),
                a_tilde: piece_specs(&e.a_tilde),
                b: piece_specs(&e.b_rep),
            }),
            Coefficients::Divergence(d) => FormSpec::Divergence(DivergenceSpec {
                r: num(d.r_dot),
                a_dot: piece_specs(&d.a_dot),
                b_dot: piece_specs(&d.b_dot),
            }),
            Coefficients::General(g) => FormSpec::General(GeneralSpec {
                r: num(g.r0),
                a0: piece_specs(&g.a0),
                b0: piece_specs(&g.b0),
                c0: piece_specs(&g.c0),
                d0: piece_specs(&g.d0),
                e0: piece_specs(&g.e0),
            }),
        };
        DocumentSpec { name: self.name.clone(), note: self.note.clone(), body }
    }

    pub fn from_spec(spec: DocumentSpec) -> Result<Self, FormatError> {
        let coefficients = match spec.body {
            FormSpec::Standard(s) => Coefficients::Standard(StringCoefficients::new(
                s.r.0,
                atoms(&s.atoms),
                piecewise(&s.density, "density")?,
                piecewise(&s.b, "b")?,
            )),
            FormSpec::Ek(e) => Coefficients::Ek(EKCoefficients {
                r: e.r.0,
                atoms: atoms(&e.atoms),
                a_tilde: piecewise(&e.a_tilde, "a_tilde")?,
                b_rep: piecewise(&e.b, "b")?,
            }),
            FormSpec::Divergence(d) => Coefficients::Divergence(DivergenceCoefficients {
                r_dot: d.r.0,
                a_dot: piecewise(&d.a_dot, "a_dot")?,
                b_dot: piecewise(&d.b_dot, "b_dot")?,
            }),
            FormSpec::General(g) => Coefficients::General(GeneralCoefficients {
                r0: g.r.0,
                a0: piecewise(&g.a0, "a0")?,
                b0: piecewise(&g.b0, "b0")?,
                c0: piecewise(&g.c0, "c0")?,
                d0: piecewise(&g.d0, "d0")?,
                e0: piecewise(&g.e0, "e0")?,
            }),
        };
        Ok(Document { name: spec.name, note: spec.note, coefficients })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.spec()).expect("coefficients are serializable");
        s.push('\n');
        s
    }
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let obj = v.as_object().ok_or_else(|| invalid("line 1", "expected a JSON object"))?;
    // The tag goes on the line of the opening brace, so reported lines still match.
    let spec: DocumentSpec = if obj.contains_key("form") {
        serde_json::from_str(text)?
    } else {
        serde_json::from_str(&text.replacen('{', "{\"form\": \"standard\", ", 1))?
    };
    Document::from_spec(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpSpec {
    pub c: f64,
    pub s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableSpec {
    pub side: SideSpec,
    pub c: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StieltjesAtom {
    pub s: f64,
    pub w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub from: Num,
    pub to: Num,
    pub value: f64,
}

/// Symbol descriptions; every field defaults to zero or empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SymbolSpec {
    Levy {
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        nu_plus: Vec<ExpSpec>,
        #[serde(default)]
        nu_minus: Vec<ExpSpec>,
        #[serde(default)]
        stable: Vec<StableSpec>,
    },
    Stieltjes {
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta_check: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        mu: Vec<StieltjesAtom>,
    },
    Exponential {
        c: f64,
        #[serde(default)]
        theta: Vec<ThetaSpec>,
    },
}

impl SymbolSpec {
    pub fn levy(&self) -> Option<LevyTriplet> {
        match self {
            SymbolSpec::Levy { alpha, beta, gamma, nu_plus, nu_minus, stable } => Some(LevyTriplet {
                alpha: *alpha,
                beta: *beta,
                gamma: *gamma,
                nu_plus: nu_plus.iter().map(|e| ExpTerm { c: e.c, s: e.s }).collect(),
                nu_minus: nu_minus.iter().map(|e| ExpTerm { c: e.c, s: e.s }).collect(),
                stable: stable
                    .iter()
                    .map(|t| StableTerm {
                        side: if t.side == SideSpec::Plus { Side::Plus } else { Side::Minus },
                        c: t.c,
                        mu: t.mu,
                    })
                    .collect(),
            }),
            _ => None,
        }
    }

    /// Rogers symbol `k(ξ)`; for a Lévy triplet this is `−K̂(ξ)`.
    pub fn eval(&self, xi: f64) -> Result<Complex64, String> {
        let z = Complex64::new(xi, 0.0);
        match self {
            SymbolSpec::Levy { .. } => Ok(-levy_symbol(&self.levy().unwrap(), xi)),
            SymbolSpec::Stieltjes { alpha, beta_check, gamma, mu } => {
                let d = StieltjesData { alpha: *alpha, beta_check: *beta_check, gamma: *gamma, mu: mu.iter().map(|a| (a.s, a.w)).collect() };
                stieltjes_symbol(&d, z).map_err(|e| format!("{e:?}"))
            }
            SymbolSpec::Exponential { c, theta } => {
                let d = ExponentialData {
                    c: *c,
                    theta: theta.iter().map(|t| ThetaPiece { from: t.from.0, to: t.to.0, value: t.value }).collect(),
                };
                exponential_symbol(&d, z).map_err(|e| format!("{e:?}"))
            }
        }
    }
}

pub fn parse_symbol(text: &str) -> Result<SymbolSpec, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Columns `x, re, im`.
pub fn write_samples(f: &SampledFunction) -> String {
    let rows: Vec<Vec<f64>> = f.values.iter().enumerate().map(|(j, v)| vec![f.x(j), v.re, v.im]).collect();
    write_table(&["x", "re", "im"], &rows)
}

/// Reads `x, re, im` rows (header and `#` comments allowed). Samples must sit
/// at `x_j = jX/n`; without `period` it is inferred from the spacing.
pub fn read_samples(text: &str, period: Option<f64>) -> Result<SampledFunction, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    let mut lines = Vec::new();
    for (j, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FormatError::Csv { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = rec.position().map_or(j as u64 + 1, |p| p.line());
        if rec.len() != 3 {
            return Err(FormatError::Csv { line, message: format!("expected 3 columns (x, re, im), found {}", rec.len()) });
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(v) => {
                xs.push(v[0]);
                vals.push(Complex64::new(v[1], v[2]));
                lines.push(line);
            }
            Err(_) if xs.is_empty() && j == 0 => continue,
            Err(e) => return Err(FormatError::Csv { line, message: e.to_string() }),
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(FormatError::Csv { line: 0, message: String::from("need at least two samples") });
    }
    let period = period.unwrap_or((xs[1] - xs[0]) * n as f64);
    let h = period / n as f64;
    for (j, &x) in xs.iter().enumerate() {
        if (x - j as f64 * h).abs() > 1e-9 * period.abs().max(1.0) {
            return Err(FormatError::Csv { line: lines[j], message: format!("x = {x} is not on the uniform grid jX/n") });
        }
    }
    SampledFunction::new(period, vals).map_err(|e| FormatError::Csv { line: 0, message: e.to_string() })
}
