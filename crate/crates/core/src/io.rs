//! JSON readers and writers for matrices, functions, witnesses and reports.
//!
//! Exact values are written as `"p/q"` strings and float values as JSON
//! numbers, so every document records its own mode and reads back into it.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::functions::{Convexity, FunctionKind, FunctionSpec, Interval};
use crate::hypothesis::{SubsetPair, WitnessCertificate};
use crate::inequality::{SideEvaluation, VerifyReport, ViolationWitness};
use crate::numerics::{format_rational, Matrix, Mode, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "field": self.field, "message": self.message } })
    }
}

type Result<T> = std::result::Result<T, InputError>;

/// A parsed numeric literal. Integers fit either mode; rational strings are
/// exact; decimal numbers are float.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Integer(Rational),
    Rational(Rational),
    Float(f64),
}

impl Number {
    pub fn to_scalar<S: Scalar>(&self) -> S {
        match self {
            Number::Integer(r) | Number::Rational(r) => S::from_rational(r),
            Number::Float(x) => S::from_f64_approx(*x),
        }
    }

    /// Exact value; floats convert to the rational they represent in binary.
    pub fn to_rational(&self, field: &str) -> Result<Rational> {
        match self {
            Number::Integer(r) | Number::Rational(r) => Ok(r.clone()),
            Number::Float(x) => Rational::from_float(*x)
                .ok_or_else(|| InputError::new(field, format!("{x} is not a finite number"))),
        }
    }
}

/// `"p/q"` or `"p"` with integer `p` and nonzero `q`.
pub fn parse_rational_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Exact value of a plain decimal literal such as `-0.125`.
pub fn parse_decimal_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || int.is_empty() && frac.is_empty() {
        return None;
    }
    let num = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

/// One comma-separated CLI token: `p/q` is exact, an integer is neutral, a
/// decimal is float.
pub fn parse_token(s: &str, field: &str) -> Result<Number> {
    let s = s.trim();
    if let Some(r) = parse_rational_str(s) {
        return Ok(if s.contains('/') {
            Number::Rational(r)
        } else {
            Number::Integer(r)
        });
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(Number::Float(x)),
        _ => Err(InputError::new(field, format!("cannot parse {s:?} as a number"))),
    }
}

pub fn parse_number(v: &Value, field: &str) -> Result<Number> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Number::Integer(Rational::from_int(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Number::Integer(Rational::from_integer(BigInt::from(u))))
            } else {
                Ok(Number::Float(n.as_f64().expect("JSON number")))
            }
        }
        Value::String(s) => match s.as_str() {
            "inf" => Ok(Number::Float(f64::INFINITY)),
            "-inf" => Ok(Number::Float(f64::NEG_INFINITY)),
            "nan" => Ok(Number::Float(f64::NAN)),
            _ => parse_rational_str(s)
                .map(Number::Rational)
                .ok_or_else(|| InputError::new(field, format!("{s:?} is not a rational \"p/q\""))),
        },
        _ => Err(InputError::new(field, "expected a number or a \"p/q\" string")),
    }
}

fn number_array(v: &Value, field: &str) -> Result<Vec<Number>> {
    let arr = v
        .as_array()
        .ok_or_else(|| InputError::new(field, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| parse_number(x, &format!("{field}[{i}]")))
        .collect()
}

fn parse_mode(v: &Value, field: &str) -> Result<Mode> {
    match v.as_str() {
        Some("exact") => Ok(Mode::Exact),
        Some("float") => Ok(Mode::Float),
        _ => Err(InputError::new(field, "expected \"exact\" or \"float\"")),
    }
}

/// Collects the mode implied by every literal of an invocation.
#[derive(Debug, Clone, Default)]
pub struct ModeVote {
    exact_at: Option<String>,
    float_at: Option<String>,
}

impl ModeVote {
    pub fn record(&mut self, n: &Number, field: &str) {
        match n {
            Number::Rational(_) => {
                self.exact_at.get_or_insert_with(|| field.to_string());
            }
            Number::Float(_) => {
                self.float_at.get_or_insert_with(|| field.to_string());
            }
            Number::Integer(_) => {}
        }
    }

    pub fn record_mode(&mut self, mode: Mode, field: &str) {
        let slot = match mode {
            Mode::Exact => &mut self.exact_at,
            Mode::Float => &mut self.float_at,
        };
        slot.get_or_insert_with(|| field.to_string());
    }

    /// Exact unless something forces float. `prefer_float` breaks the tie
    /// when every literal is an integer.
    pub fn resolve(&self, requested: Option<Mode>, prefer_float: bool) -> Result<Mode> {
        match (&self.exact_at, &self.float_at, requested) {
            (Some(e), Some(f), _) => Err(InputError::new(
                f.clone(),
                format!("decimal value mixed with the rational string at {e}"),
            )),
            (Some(e), None, Some(Mode::Float)) => Err(InputError::new(
                e.clone(),
                "rational string given in float mode",
            )),
            (None, Some(f), Some(Mode::Exact)) => Err(InputError::new(
                f.clone(),
                "decimal value given in exact mode",
            )),
            (_, _, Some(m)) => Ok(m),
            (Some(_), None, None) => Ok(Mode::Exact),
            (None, Some(_), None) => Ok(Mode::Float),
            (None, None, None) if prefer_float => Ok(Mode::Float),
            (None, None, None) => Ok(Mode::Exact),
        }
    }
}

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    match x.as_rational() {
        Some(r) => Value::String(format_rational(&r)),
        None => f64_to_json(x.as_f64()),
    }
}

fn f64_to_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn scalars_to_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

/// Integers as JSON numbers, everything else as `"p/q"`.
pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    Value::String(format_rational(r))
}

fn field_of<'a>(obj: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| InputError::new(format!("{field}.{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| InputError::new(field, "expected a JSON object"))
}

fn as_usize(v: &Value, field: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| InputError::new(field, "expected a nonnegative integer"))
}

/// A square matrix as read, before the mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Number>>,
    pub mode: Option<Mode>,
}

impl RawMatrix {
    pub fn vote(&self, vote: &mut ModeVote, field: &str) {
        if let Some(m) = self.mode {
            vote.record_mode(m, &format!("{field}.mode"));
        }
        for (i, row) in self.entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                vote.record(x, &format!("{field}.entries[{i}][{j}]"));
            }
        }
    }

    pub fn to_matrix<S: Scalar>(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, self.n, |i, j| self.entries[i][j].to_scalar())
    }
}

/// `{"n": int, "entries": [[...]], "mode"?: "exact"|"float"}`
pub fn read_matrix(v: &Value, field: &str) -> Result<RawMatrix> {
    let obj = as_object(v, field)?;
    let n = as_usize(field_of(obj, "n", field)?, &format!("{field}.n"))?;
    if n == 0 {
        return Err(InputError::new(format!("{field}.n"), "order must be at least 1"));
    }
    let rows = field_of(obj, "entries", field)?
        .as_array()
        .ok_or_else(|| InputError::new(format!("{field}.entries"), "expected an array of rows"))?;
    if rows.len() != n {
        return Err(InputError::new(
            format!("{field}.entries"),
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let entries = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let f = format!("{field}.entries[{i}]");
            let row = number_array(row, &f)?;
            if row.len() != n {
                return Err(InputError::new(f, format!("expected {n} entries, found {}", row.len())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mode = obj
        .get("mode")
        .map(|m| parse_mode(m, &format!("{field}.mode")))
        .transpose()?;
    Ok(RawMatrix { n, entries, mode })
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    let entries: Vec<Value> = (0..m.rows()).map(|i| scalars_to_json(m.row(i))).collect();
    json!({ "n": m.rows(), "entries": entries, "mode": S::MODE.as_str() })
}

fn bound_to_json(b: Option<&Rational>, sentinel: &str) -> Value {
    b.map_or_else(|| json!(sentinel), rational_to_json)
}

pub fn interval_to_json(i: &Interval) -> Value {
    json!([bound_to_json(i.lo(), "-inf"), bound_to_json(i.hi(), "inf")])
}

fn read_bound(v: &Value, sentinel: &str, field: &str) -> Result<Option<Rational>> {
    if v.as_str() == Some(sentinel) {
        return Ok(None);
    }
    match v {
        Value::Number(n) if n.as_i64().is_none() && n.as_u64().is_none() => {
            parse_decimal_exact(&n.to_string())
                .map(Some)
                .ok_or_else(|| InputError::new(field, "expected a finite bound"))
        }
        _ => parse_number(v, field)?.to_rational(field).map(Some),
    }
}

/// `[lo, hi]` with `"-inf"` / `"inf"` for unbounded ends.
pub fn read_interval(v: &Value, field: &str) -> Result<Interval> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| InputError::new(field, "expected [lo, hi]"))?;
    let lo = read_bound(&arr[0], "-inf", &format!("{field}[0]"))?;
    let hi = read_bound(&arr[1], "inf", &format!("{field}[1]"))?;
    Interval::new(lo, hi).map_err(|e| InputError::new(field, e.to_string()))
}

/// `lo,hi` from the command line; decimals are read exactly.
pub fn parse_interval_arg(s: &str, field: &str) -> Result<Interval> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| InputError::new(field, "expected lo,hi"))?;
    let bound = |t: &str, sentinel: &str| -> Result<Option<Rational>> {
        let t = t.trim();
        if t == sentinel {
            return Ok(None);
        }
        parse_rational_str(t)
            .or_else(|| parse_decimal_exact(t))
            .map(Some)
            .ok_or_else(|| InputError::new(field, format!("cannot parse bound {t:?}")))
    };
    Interval::new(bound(lo, "-inf")?, bound(hi, "inf")?)
        .map_err(|e| InputError::new(field, e.to_string()))
}

fn convexity_str(c: Convexity) -> &'static str {
    match c {
        Convexity::Convex => "convex",
        Convexity::Concave => "concave",
        Convexity::Neither => "neither",
        Convexity::Unknown => "unknown",
    }
}

fn function_body(f: &FunctionSpec) -> Value {
    let params = match &f.kind {
        FunctionKind::Power { p } => json!({ "p": rational_to_json(p) }),
        FunctionKind::Exp | FunctionKind::Abs | FunctionKind::NegSquare => json!({}),
        FunctionKind::Affine { a, b } => json!({ "a": rational_to_json(a), "b": rational_to_json(b) }),
        FunctionKind::PiecewiseLinear { points } => {
            let pts: Vec<Value> = points
                .iter()
                .map(|(x, y)| json!([rational_to_json(x), rational_to_json(y)]))
                .collect();
            json!({ "points": pts })
        }
        FunctionKind::Polynomial { coeffs } => {
            json!({ "coeffs": coeffs.iter().map(rational_to_json).collect::<Vec<_>>() })
        }
        FunctionKind::Scaled { inner, c } => {
            json!({ "c": rational_to_json(c), "inner": function_body(inner) })
        }
        FunctionKind::Sum { terms } => {
            json!({ "terms": terms.iter().map(function_body).collect::<Vec<_>>() })
        }
    };
    json!({
        "kind": f.kind.name(),
        "params": params,
        "convexity": convexity_str(f.convexity),
    })
}

pub fn function_to_json(f: &FunctionSpec, interval: Option<&Interval>) -> Value {
    let mut v = function_body(f);
    if let Some(i) = interval {
        v["interval"] = interval_to_json(i);
    }
    v
}

fn read_function_body(v: &Value, field: &str) -> Result<FunctionSpec> {
    let obj = as_object(v, field)?;
    let kind = field_of(obj, "kind", field)?
        .as_str()
        .ok_or_else(|| InputError::new(format!("{field}.kind"), "expected a string"))?;
    let empty = Map::new();
    let params = match obj.get("params") {
        Some(p) => as_object(p, &format!("{field}.params"))?,
        None => &empty,
    };
    let pf = |key: &str| format!("{field}.params.{key}");
    let rational = |key: &str| -> Result<Rational> {
        let f = pf(key);
        let v = params
            .get(key)
            .ok_or_else(|| InputError::new(f.clone(), "missing parameter"))?;
        parse_number(v, &f)?.to_rational(&f)
    };
    let bad = |key: &str, e: crate::functions::FunctionError| InputError::new(pf(key), e.to_string());
    let spec = match kind {
        "power" => FunctionSpec::power(rational("p")?).map_err(|e| bad("p", e))?,
        "exp" => FunctionSpec::exp(),
        "abs" => FunctionSpec::abs(),
        "negsquare" => FunctionSpec::neg_square(),
        "affine" => FunctionSpec::affine(rational("a")?, rational("b")?),
        "piecewise_linear" => {
            let f = pf("points");
            let pts = params
                .get("points")
                .and_then(Value::as_array)
                .ok_or_else(|| InputError::new(f.clone(), "expected [[x, y], ...]"))?;
            let points = pts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let pf = format!("{f}[{i}]");
                    let xy = number_array(p, &pf)?;
                    if xy.len() != 2 {
                        return Err(InputError::new(pf, "expected [x, y]"));
                    }
                    Ok((xy[0].to_rational(&pf)?, xy[1].to_rational(&pf)?))
                })
                .collect::<Result<Vec<_>>>()?;
            FunctionSpec::piecewise_linear(points).map_err(|e| bad("points", e))?
        }
        "polynomial" => {
            let f = pf("coeffs");
            let raw = params
                .get("coeffs")
                .ok_or_else(|| InputError::new(f.clone(), "missing parameter"))?;
            let coeffs = number_array(raw, &f)?
                .iter()
                .map(|c| c.to_rational(&f))
                .collect::<Result<Vec<_>>>()?;
            FunctionSpec::polynomial(coeffs).map_err(|e| bad("coeffs", e))?
        }
        "scaled" => {
            let inner = params
                .get("inner")
                .ok_or_else(|| InputError::new(pf("inner"), "missing parameter"))?;
            FunctionSpec::scaled(read_function_body(inner, &pf("inner"))?, rational("c")?)
        }
        "sum" => {
            let f = pf("terms");
            let terms = params
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| InputError::new(f.clone(), "expected an array of functions"))?
                .iter()
                .enumerate()
                .map(|(i, t)| read_function_body(t, &format!("{f}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            FunctionSpec::sum(terms).map_err(|e| bad("terms", e))?
        }
        other => {
            return Err(InputError::new(
                format!("{field}.kind"),
                format!("unknown function kind {other:?}"),
            ))
        }
    };
    match obj.get("convexity") {
        None => Ok(spec),
        Some(c) => {
            let label = match c.as_str() {
                Some("convex") => Convexity::Convex,
                Some("concave") => Convexity::Concave,
                Some("neither") => Convexity::Neither,
                Some("unknown") => Convexity::Unknown,
                _ => return Err(InputError::new(format!("{field}.convexity"), "unknown label")),
            };
            Ok(spec.with_convexity(label))
        }
    }
}

/// `{"kind", "params", "interval"?, "convexity"?}`
pub fn read_function(v: &Value, field: &str) -> Result<(FunctionSpec, Option<Interval>)> {
    let spec = read_function_body(v, field)?;
    let interval = v
        .get("interval")
        .map(|i| read_interval(i, &format!("{field}.interval")))
        .transpose()?;
    Ok((spec, interval))
}

fn pair_json(pair: &SubsetPair) -> (Value, Value) {
    (json!(pair.a()), json!(pair.b()))
}

/// `{"A", "B", "coeffs", "residual", "mode"}`
pub fn witness_to_json<S: Scalar>(w: &WitnessCertificate<S>) -> Value {
    let (a, b) = pair_json(&w.pair);
    json!({
        "A": a,
        "B": b,
        "coeffs": scalars_to_json(&w.coeffs),
        "residual": match w.residual_sq.as_rational() {
            Some(r) => json!(format_rational(&r)),
            None => f64_to_json(w.residual_norm()),
        },
        "mode": S::MODE.as_str(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRecord {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub coeffs: Vec<Number>,
    pub residual: Number,
    pub mode: Mode,
}

impl WitnessRecord {
    pub fn pair(&self) -> std::result::Result<SubsetPair, crate::hypothesis::HypothesisError> {
        SubsetPair::new(self.coeffs.len(), self.a.clone(), self.b.clone())
    }
}

fn index_array(v: &Value, field: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| InputError::new(field, "expected an array of indices"))?
        .iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &format!("{field}[{i}]")))
        .collect()
}

pub fn read_witness(v: &Value, field: &str) -> Result<WitnessRecord> {
    let obj = as_object(v, field)?;
    let get = |k: &str| field_of(obj, k, field);
    Ok(WitnessRecord {
        a: index_array(get("A")?, &format!("{field}.A"))?,
        b: index_array(get("B")?, &format!("{field}.B"))?,
        coeffs: number_array(get("coeffs")?, &format!("{field}.coeffs"))?,
        residual: parse_number(get("residual")?, &format!("{field}.residual"))?,
        mode: parse_mode(get("mode")?, &format!("{field}.mode"))?,
    })
}

/// `{"min_gap", "argmin_x", "violations", "mode"}`
pub fn report_to_json<S: Scalar>(r: &VerifyReport<S>) -> Value {
    json!({
        "min_gap": scalar_to_json(&r.min_gap),
        "argmin_x": scalars_to_json(&r.argmin_x),
        "violations": r.num_violations,
        "mode": S::MODE.as_str(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub min_gap: Number,
    pub argmin_x: Vec<Number>,
    pub violations: usize,
    pub mode: Mode,
}

pub fn read_report(v: &Value, field: &str) -> Result<ReportRecord> {
    let obj = as_object(v, field)?;
    let get = |k: &str| field_of(obj, k, field);
    Ok(ReportRecord {
        min_gap: parse_number(get("min_gap")?, &format!("{field}.min_gap"))?,
        argmin_x: number_array(get("argmin_x")?, &format!("{field}.argmin_x"))?,
        violations: as_usize(get("violations")?, &format!("{field}.violations"))?,
        mode: parse_mode(get("mode")?, &format!("{field}.mode"))?,
    })
}

/// `{"x", "y", "lhs", "rhs", "gap", "matrix", "function", "mode"}`
pub fn violation_to_json<S: Scalar>(w: &ViolationWitness<S>) -> Value {
    json!({
        "x": scalars_to_json(&w.x),
        "y": scalars_to_json(&w.evaluation.y),
        "lhs": scalar_to_json(&w.evaluation.lhs),
        "rhs": scalar_to_json(&w.evaluation.rhs),
        "gap": scalar_to_json(&w.evaluation.gap),
        "matrix": matrix_to_json(&w.matrix),
        "function": function_to_json(&w.function, Some(&w.interval)),
        "mode": S::MODE.as_str(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationRecord {
    pub x: Vec<Number>,
    pub y: Vec<Number>,
    pub lhs: Number,
    pub rhs: Number,
    pub gap: Number,
    pub matrix: RawMatrix,
    pub function: FunctionSpec,
    pub interval: Interval,
    pub mode: Mode,
}

impl ViolationRecord {
    pub fn to_witness<S: Scalar>(&self) -> ViolationWitness<S> {
        let conv = |v: &[Number]| v.iter().map(Number::to_scalar).collect::<Vec<S>>();
        ViolationWitness {
            x: conv(&self.x),
            evaluation: SideEvaluation {
                lhs: self.lhs.to_scalar(),
                rhs: self.rhs.to_scalar(),
                gap: self.gap.to_scalar(),
                y: conv(&self.y),
            },
            matrix: self.matrix.to_matrix(),
            function: self.function.clone(),
            interval: self.interval.clone(),
        }
    }
}

pub fn read_violation(v: &Value, field: &str) -> Result<ViolationRecord> {
    let obj = as_object(v, field)?;
    let get = |k: &str| field_of(obj, k, field);
    let sub = |k: &str| format!("{field}.{k}");
    let (function, interval) = read_function(get("function")?, &sub("function"))?;
    let interval =
        interval.ok_or_else(|| InputError::new(sub("function.interval"), "missing field"))?;
    Ok(ViolationRecord {
        x: number_array(get("x")?, &sub("x"))?,
        y: number_array(get("y")?, &sub("y"))?,
        lhs: parse_number(get("lhs")?, &sub("lhs"))?,
        rhs: parse_number(get("rhs")?, &sub("rhs"))?,
        gap: parse_number(get("gap")?, &sub("gap"))?,
        matrix: read_matrix(get("matrix")?, &sub("matrix"))?,
        function,
        interval,
        mode: parse_mode(get("mode")?, &sub("mode"))?,
    })
}

/// Parses `"1/4,1/6,..."` into tokens.
pub fn parse_weights(s: &str, field: &str) -> Result<Vec<Number>> {
    if s.trim().is_empty() {
        return Err(InputError::new(field, "no weights given"));
    }
    s.split(',')
        .enumerate()
        .map(|(i, t)| parse_token(t, &format!("{field}[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn tokens_and_modes() {
        assert_eq!(parse_token("1/4", "w").unwrap(), Number::Rational(q(1, 4)));
        assert_eq!(parse_token(" 3 ", "w").unwrap(), Number::Integer(q(3, 1)));
        assert_eq!(parse_token("0.25", "w").unwrap(), Number::Float(0.25));
        assert!(parse_token("1/0", "w").is_err());
        assert!(parse_token("abc", "w").is_err());

        let mut vote = ModeVote::default();
        vote.record(&Number::Integer(q(1, 1)), "a");
        assert_eq!(vote.resolve(None, false).unwrap(), Mode::Exact);
        assert_eq!(vote.resolve(None, true).unwrap(), Mode::Float);
        vote.record(&Number::Rational(q(1, 2)), "b");
        assert_eq!(vote.resolve(None, true).unwrap(), Mode::Exact);
        assert_eq!(vote.resolve(Some(Mode::Float), false).unwrap_err().field, "b");
        vote.record(&Number::Float(0.5), "c");
        assert_eq!(vote.resolve(None, false).unwrap_err().field, "c");
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal_exact("-0.125"), Some(q(-1, 8)));
        assert_eq!(parse_decimal_exact("10"), Some(q(10, 1)));
        assert_eq!(parse_decimal_exact("."), None);
        assert_eq!(parse_decimal_exact("1.2.3"), None);
        let i = parse_interval_arg("-10,10", "interval").unwrap();
        assert_eq!(i, Interval::finite(-10, 10).unwrap());
        let i = parse_interval_arg("-inf,0.5", "interval").unwrap();
        assert_eq!(i.hi(), Some(&q(1, 2)));
        assert!(i.lo().is_none());
        assert!(parse_interval_arg("2,1", "interval").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_rows(vec![vec![q(1, 3), q(2, 3)], vec![q(2, 3), q(1, 3)]]).unwrap();
        let v = matrix_to_json(&m);
        assert_eq!(v["entries"][0][0], json!("1/3"));
        let raw = read_matrix(&v, "matrix").unwrap();
        assert_eq!(raw.to_matrix::<Rational>(), m);
        let f = m.map(|x| x.as_f64());
        let raw = read_matrix(&matrix_to_json(&f), "matrix").unwrap();
        assert_eq!(raw.to_matrix::<f64>(), f);
        assert!(matches!(raw.entries[0][0], Number::Float(_)));
    }

    #[test]
    fn matrix_shape_errors_name_the_field() {
        let bad = json!({"n": 2, "entries": [[1, 0], [0]]});
        assert_eq!(read_matrix(&bad, "matrix").unwrap_err().field, "matrix.entries[1]");
        let bad = json!({"n": 2, "entries": [[1, 0], [0, "x"]]});
        assert_eq!(read_matrix(&bad, "matrix").unwrap_err().field, "matrix.entries[1][1]");
    }

    #[test]
    fn function_round_trip() {
        let f = FunctionSpec::sum(vec![
            FunctionSpec::scaled(FunctionSpec::power(q(3, 2)).unwrap(), q(1, 2)),
            FunctionSpec::piecewise_linear(vec![(q(-1, 1), q(1, 1)), (q(1, 3), q(0, 1))]).unwrap(),
            FunctionSpec::polynomial(vec![q(1, 1), q(0, 1), q(-2, 7)]).unwrap(),
            FunctionSpec::affine(q(2, 1), q(-1, 1)),
            FunctionSpec::exp(),
        ])
        .unwrap();
        let i = Interval::new(None, Some(q(5, 2))).unwrap();
        let v = function_to_json(&f, Some(&i));
        let (g, j) = read_function(&v, "function").unwrap();
        assert_eq!(g, f);
        assert_eq!(j, Some(i));
        let v = json!({"kind": "power", "params": {"p": 0.5}});
        assert_eq!(read_function(&v, "function").unwrap_err().field, "function.params.p");
        let v = json!({"kind": "cosh"});
        assert_eq!(read_function(&v, "function").unwrap_err().field, "function.kind");
    }
}
