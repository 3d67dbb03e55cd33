//! File formats: polynomials and bases as JSON, node layouts and evaluations as CSV,
//! and custom grid schemes as JSON lists of exact rationals.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::basis::SerendipityBasis;
use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::multiindex::{FaceIndex, MultiIndex};
use crate::nodes::GridScheme;
use crate::polynomial::{to_f64, Polynomial};
use crate::Rational;

/// One monomial term. Numerator and denominator are decimal strings so that
/// arbitrarily large integers survive the round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub numerator: String,
    pub denominator: String,
}

pub fn polynomial_to_json(p: &Polynomial) -> Vec<TermJson> {
    p.terms()
        .map(|(e, c)| TermJson {
            exponents: e.entries().to_vec(),
            numerator: c.numer().to_string(),
            denominator: c.denom().to_string(),
        })
        .collect()
}

pub fn polynomial_from_json(dim: usize, terms: &[TermJson]) -> Result<Polynomial> {
    let parsed = terms
        .iter()
        .map(|t| {
            let num = BigInt::from_str(&t.numerator).map_err(|_| {
                Error::InvalidCoordinates(format!("bad numerator `{}`", t.numerator))
            })?;
            let den = BigInt::from_str(&t.denominator).map_err(|_| {
                Error::InvalidCoordinates(format!("bad denominator `{}`", t.denominator))
            })?;
            if den == BigInt::from(0) {
                return Err(Error::InvalidCoordinates("zero denominator".into()));
            }
            Ok((
                MultiIndex::new(t.exponents.clone()),
                Rational::new(num, den),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Polynomial::from_terms(dim, parsed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub index: MultiIndex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<FaceIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MultiIndex>,
    pub polynomial: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub alpha: MultiIndex,
    pub c: i64,
}

/// Serialized basis: `{n, r, scheme, functions, coefficient_table}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    pub n: usize,
    pub r: u32,
    pub scheme: String,
    pub functions: Vec<FunctionJson>,
    pub coefficient_table: Vec<CoefficientJson>,
}

impl BasisJson {
    pub fn from_basis(basis: &SerendipityBasis) -> Result<Self> {
        let labels = match basis.scheme() {
            GridScheme::HermiteMidpoint => Some(basis.hermite_labels()?),
            _ => None,
        };
        let functions = basis
            .functions()
            .iter()
            .map(|(alpha, p)| {
                let label = labels.as_ref().map(|l| l[alpha].clone());
                FunctionJson {
                    index: alpha.clone(),
                    beta: label.as_ref().map(|l| l.0.clone()),
                    rho: label.map(|l| l.1),
                    polynomial: polynomial_to_json(p),
                }
            })
            .collect();
        Ok(BasisJson {
            n: basis.dim(),
            r: basis.order(),
            scheme: basis.scheme().name().to_string(),
            functions,
            coefficient_table: coefficients_to_json(basis.coefficients()),
        })
    }

    /// Basis functions keyed by index, in lexicographic order.
    pub fn polynomials(&self) -> Result<BTreeMap<MultiIndex, Polynomial>> {
        self.functions
            .iter()
            .map(|f| {
                if f.index.dim() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        actual: f.index.dim(),
                    });
                }
                Ok((
                    f.index.clone(),
                    polynomial_from_json(self.n, &f.polynomial)?,
                ))
            })
            .collect()
    }
}

pub fn coefficients_to_json(table: &CoefficientTable) -> Vec<CoefficientJson> {
    table
        .iter()
        .map(|(a, c)| CoefficientJson {
            alpha: a.clone(),
            c,
        })
        .collect()
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidCoordinates(format!("`{s}` is not an exact rational p/q"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Reads a custom scheme: a JSON list of per-axis lists of `"p/q"` strings.
/// JSON numbers are rejected so that coordinates stay exact.
pub fn read_custom_scheme(reader: impl Read) -> Result<GridScheme> {
    let value: serde_json::Value = serde_json::from_reader(reader)
        .map_err(|e| Error::InvalidCoordinates(format!("malformed scheme file: {e}")))?;
    let axes = value
        .as_array()
        .ok_or_else(|| Error::InvalidCoordinates("expected a list of axes".into()))?;
    let axes = axes
        .iter()
        .map(|axis| {
            axis.as_array()
                .ok_or_else(|| Error::InvalidCoordinates("each axis must be a list".into()))?
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => parse_rational(s),
                    other => Err(Error::InvalidCoordinates(format!(
                        "coordinate {other} must be a \"p/q\" string"
                    ))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridScheme::Custom(axes))
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidCoordinates(format!("csv: {e}"))
}

fn index_header(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |j| format!("{prefix}_{j}"))
}

/// One row per `α ∈ S_r`: index, exact point coordinates, derivative order.
pub fn write_nodes_csv(basis: &SerendipityBasis, out: impl Write) -> Result<()> {
    let n = basis.dim();
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = index_header("alpha", n)
        .chain(index_header("x", n))
        .chain(index_header("rho", n))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for (alpha, f) in basis.functionals() {
        let row: Vec<String> = alpha
            .entries()
            .iter()
            .map(u32::to_string)
            .chain(f.node.point.iter().map(|x| x.to_string()))
            .chain(f.derivative_order.entries().iter().map(u32::to_string))
            .collect();
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(csv_error)?;
    Ok(())
}

/// Reads evaluation points: one point per row, `n` comma-separated floats.
/// Lines starting with `#` and blank lines are skipped; a non-numeric first row is treated as a header.
pub fn read_points_csv(reader: impl Read, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut points = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(f64::from_str).collect();
        match parsed {
            Ok(p) if p.len() == n => points.push(p),
            Ok(p) => {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.len(),
                })
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(csv_error(format!("row {}: {e}", i + 1))),
        }
    }
    Ok(points)
}

/// Rows `(x_1..x_n, alpha_1..alpha_n, value)` for every point and every function.
pub fn write_evaluations_csv(
    functions: &BTreeMap<MultiIndex, Polynomial>,
    points: &[Vec<f64>],
    n: usize,
    out: impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = index_header("x", n)
        .chain(index_header("alpha", n))
        .chain(std::iter::once("value".to_string()))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for x in points {
        for (alpha, p) in functions {
            let value = p.evaluate_f64(x)?;
            let row: Vec<String> = x
                .iter()
                .map(|v| format!("{v:?}"))
                .chain(alpha.entries().iter().map(u32::to_string))
                .chain(std::iter::once(format!("{value:?}")))
                .collect();
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush().map_err(csv_error)?;
    Ok(())
}

/// Nodes as floating-point tuples, for plotting.
pub fn node_points_f64(basis: &SerendipityBasis) -> Vec<(MultiIndex, Vec<f64>)> {
    basis
        .functionals()
        .iter()
        .map(|(a, f)| (a.clone(), f.node.point.iter().map(to_f64).collect()))
        .collect()
}
