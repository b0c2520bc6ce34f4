//! Graphon JSON and plain-text graph files.
//!
//! A graphon file is `{"weights": [..], "values": [[..], ..], "ambient_mass": x}`
//! where `x` is a number, a rational or `"inf"`. Every entry may be a JSON
//! number, a decimal string such as `"0.125"`, or a rational object
//! `{"num": 1, "den": 3}`. When all entries are integers, decimal strings or
//! rationals the file is also read exactly.

use std::fs;
use std::path::Path;

use graphonkit_core::exact::{ExactStepGraphon, Q};
use graphonkit_core::{Mass, StepGraphon};
use serde_json::{json, Map, Value};

use crate::error::CliError;

/// A graphon read from disk, with its exact form when one is available.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphonFile {
    pub graphon: StepGraphon,
    pub exact: Option<ExactStepGraphon>,
}

#[derive(Clone, Copy, Debug)]
enum Number {
    Exact(Q, f64),
    Float(f64),
}

impl Number {
    fn float(self) -> f64 {
        match self {
            Number::Exact(_, f) | Number::Float(f) => f,
        }
    }

    fn exact(self) -> Option<Q> {
        match self {
            Number::Exact(q, _) => Some(q),
            Number::Float(_) => None,
        }
    }
}

fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (i128, i128) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut num: i128 = 0;
    for c in int.chars().chain(frac.chars()) {
        num = num.checked_mul(10)?.checked_add(c.to_digit(10)? as i128)?;
    }
    let scale = exp - frac.len() as i32;
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let q = if scale >= 0 { Q::from_integer(num.checked_mul(pow)?) } else { Q::new(num, pow) };
    Some(if neg { -q } else { q })
}

fn ratio_f64(q: &Q) -> f64 {
    graphonkit_core::math::ratio_to_f64(q)
}

fn parse_number(v: &Value, what: &str) -> Result<Number, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Number::Exact(Q::from_integer(i as i128), i as f64))
            } else {
                n.as_f64().map(Number::Float).ok_or_else(|| format!("{what}: number out of range"))
            }
        }
        Value::String(s) => {
            let q = parse_decimal(s).ok_or_else(|| format!("{what}: cannot read {s:?} as a decimal or a fraction"))?;
            // The float is the correctly rounded decimal where Rust can parse it.
            let f = s.trim().parse::<f64>().unwrap_or_else(|_| ratio_f64(&q));
            Ok(Number::Exact(q, f))
        }
        Value::Object(o) => {
            let get = |k: &str| o.get(k).and_then(Value::as_i64).ok_or_else(|| format!("{what}: rational needs integer \"{k}\""));
            let (n, d) = (get("num")?, get("den")?);
            if d == 0 {
                return Err(format!("{what}: zero denominator"));
            }
            let q = Q::new(n as i128, d as i128);
            Ok(Number::Exact(q, ratio_f64(&q)))
        }
        _ => Err(format!("{what}: expected a number, a decimal string or {{\"num\", \"den\"}}")),
    }
}

/// Parses graphon JSON text. `origin` names the source in error messages.
pub fn parse_graphon(text: &str, origin: &str) -> Result<GraphonFile, CliError> {
    let parse_err = |message: String| CliError::Parse { path: origin.to_string(), message };
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| parse_err("expected a JSON object".into()))?;
    let weights = obj
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing array \"weights\"".into()))?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_number(v, &format!("weights[{i}]")))
        .collect::<Result<Vec<_>, _>>()
        .map_err(parse_err)?;
    let rows = obj.get("values").and_then(Value::as_array).ok_or_else(|| parse_err("missing array \"values\"".into()))?;
    let mut values = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err(format!("values[{i}] is not an array")))?;
        let parsed = row
            .iter()
            .enumerate()
            .map(|(j, v)| parse_number(v, &format!("values[{i}][{j}]")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(parse_err)?;
        values.push(parsed);
    }
    let ambient = match obj.get("ambient_mass") {
        None => return Err(parse_err("missing \"ambient_mass\"".into())),
        Some(Value::String(s)) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => None,
        Some(v) => Some(parse_number(v, "ambient_mass").map_err(parse_err)?),
    };

    let graphon = StepGraphon::new(
        weights.iter().map(|w| w.float()).collect(),
        values.iter().map(|r| r.iter().map(|v| v.float()).collect()).collect(),
        ambient.map_or(Mass::Infinite, |a| Mass::Finite(a.float())),
    )?;
    let exact = (|| {
        let w: Vec<Q> = weights.iter().map(|w| w.exact()).collect::<Option<_>>()?;
        let v: Vec<Q> = values.iter().flatten().map(|v| v.exact()).collect::<Option<_>>()?;
        let a = match ambient {
            None => None,
            Some(a) => Some(a.exact()?),
        };
        ExactStepGraphon::from_ratios(&w, &v, a).ok()
    })();
    Ok(GraphonFile { graphon, exact })
}

/// Renders graphon JSON with one matrix row per line.
pub fn graphon_text(v: &Value) -> String {
    let field = |k: &str| serde_json::to_string(&v[k]).expect("JSON values serialize");
    let rows: Vec<String> = v["values"]
        .as_array()
        .map(|rows| rows.iter().map(|r| format!("    {}", serde_json::to_string(r).expect("JSON values serialize"))).collect())
        .unwrap_or_default();
    let values = if rows.is_empty() { "[]".to_string() } else { format!("[\n{}\n  ]", rows.join(",\n")) };
    format!(
        "{{\n  \"weights\": {},\n  \"values\": {},\n  \"ambient_mass\": {}\n}}\n",
        field("weights"),
        values,
        field("ambient_mass")
    )
}

pub fn read_graphon(path: &Path) -> Result<GraphonFile, CliError> {
    parse_graphon(&read_text(path)?, &path.display().to_string())
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.display().to_string()),
        _ => CliError::Io(e),
    })
}

fn float_json(x: f64) -> Value {
    // NaN and infinities never reach here: graphons hold finite numbers.
    json!(x)
}

fn rational_json(q: &Q) -> Value {
    if *q.denom() == 1 {
        if let Ok(i) = i64::try_from(*q.numer()) {
            return json!(i);
        }
    }
    json!({ "num": q.numer().to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::String(q.numer().to_string())),
            "den": q.denom().to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::String(q.denom().to_string())) })
}

fn object(weights: Vec<Value>, values: Vec<Value>, ambient: Value) -> Value {
    let mut m = Map::new();
    m.insert("weights".into(), Value::Array(weights));
    m.insert("values".into(), Value::Array(values));
    m.insert("ambient_mass".into(), ambient);
    Value::Object(m)
}

/// JSON of a floating-point graphon; numbers round-trip bit for bit.
pub fn graphon_to_json(w: &StepGraphon) -> Value {
    let k = w.block_count();
    let weights = w.weights().iter().map(|&x| float_json(x)).collect();
    let values = (0..k).map(|i| Value::Array(w.row(i).iter().map(|&x| float_json(x)).collect())).collect();
    let ambient = match w.ambient_mass() {
        Mass::Infinite => json!("inf"),
        Mass::Finite(a) => float_json(a),
    };
    object(weights, values, ambient)
}

/// JSON of an exact graphon: integers stay integers, other entries become
/// `{"num", "den"}` objects.
pub fn exact_graphon_to_json(w: &ExactStepGraphon) -> Value {
    let k = w.block_count();
    let weights = (0..k).map(|i| rational_json(&w.weight(i))).collect();
    let values = (0..k).map(|i| Value::Array((0..k).map(|j| rational_json(&w.value(i, j))).collect())).collect();
    let ambient = w.ambient().map_or(json!("inf"), |a| rational_json(&a));
    object(weights, values, ambient)
}

/// A simple graph given by its vertex count and edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Parses `n m` followed by `m` lines `u v` (0-based).
pub fn parse_graph(text: &str, origin: &str) -> Result<GraphFile, CliError> {
    let err = |message: String| CliError::Parse { path: origin.to_string(), message };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err("empty graph file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let parse = |s: &str, line: usize| s.parse::<usize>().map_err(|_| err(format!("line {}: {s:?} is not a vertex index or count", line + 1)));
    if head.len() != 2 {
        return Err(err("first line must be `n m`".into()));
    }
    let (n, m) = (parse(head[0], 0)?, parse(head[1], 0)?);
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(err(format!("line {}: expected `u v`", line + 1)));
        }
        edges.push((parse(parts[0], line)?, parse(parts[1], line)?));
    }
    if edges.len() != m {
        return Err(err(format!("header announces {m} edges, found {}", edges.len())));
    }
    Ok(GraphFile { n, edges })
}

pub fn read_graph(path: &Path) -> Result<GraphFile, CliError> {
    parse_graph(&read_text(path)?, &path.display().to_string())
}

pub fn graph_to_text(n: usize, edges: &[(usize, usize)]) -> String {
    let mut out = format!("{n} {}\n", edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
