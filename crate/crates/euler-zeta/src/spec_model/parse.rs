//! Spec-file format: a JSON document with top-level keys `dimension`,
//! `phi`, `eta`, `directions`, `mode`, and `rules`.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "phi": 1,
//!   "eta": 2,
//!   "directions": [[1]],
//!   "mode": "independent",
//!   "rules": [[
//!     {"kind": "constant", "value": "1"},
//!     {"kind": "character", "modulus": 4, "table": {"1": "1", "3": "-1"}}
//!   ]]
//! }
//! ```
//!
//! Direction entries are JSON numbers (stored as binary floating point) or
//! `"p/q"` fraction strings (stored exactly). Complex values are literals
//! like `"1"`, `"-i"`, `"1/2+1/2 i"`. `mode` is `"independent"`,
//! `"scalar:<gamma list>"`, or `"integer:<gamma list>"`. Rule kinds:
//! `constant {value}`, `power-decay {exponent}`, `character {modulus,
//! table}`, `unit-power {base}`, `finite-support {support, default}`, and
//! `root {inner, order, index}` (normally produced by the reduction of
//! integer-dependent products). Unknown keys are rejected.

use super::{
    CoefficientRule, DependenceMode, Direction, EulerProductSpec, NumberLiteral,
};
use crate::error::{Error, Result};
use crate::value::{parse_complex_literal, parse_rational, ComplexRational};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub fn parse_spec(text: &str) -> Result<EulerProductSpec> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    let obj = as_object(&value, "spec document")?;
    reject_unknown_keys(
        obj,
        &["dimension", "phi", "eta", "directions", "mode", "rules"],
        "spec document",
    )?;
    let dimension = get_usize(obj, "dimension")?;
    let phi = get_usize(obj, "phi")?;
    let eta = get_usize(obj, "eta")?;
    let directions = parse_directions(require(obj, "directions")?)?;
    let mode = parse_mode(require(obj, "mode")?)?;
    let rules = parse_rules(require(obj, "rules")?)?;
    if directions.len() != phi {
        return Err(Error::Constraint(format!(
            "`directions` lists {} vectors but phi = {phi}",
            directions.len()
        )));
    }
    if rules.len() != phi || rules.iter().any(|row| row.len() != eta) {
        return Err(Error::Constraint(format!(
            "`rules` must be a phi x eta = {phi} x {eta} grid"
        )));
    }
    EulerProductSpec::new(dimension, directions, rules, mode)
}

pub fn serialize(spec: &EulerProductSpec) -> String {
    let directions: Vec<Value> = spec
        .directions
        .iter()
        .map(|d| {
            Value::Array(
                d.0.iter()
                    .map(|e| match &e.exact {
                        Some(r) => json!(r.to_string()),
                        None => json!(e.value),
                    })
                    .collect(),
            )
        })
        .collect();
    let mode = match &spec.mode {
        DependenceMode::Independent => "independent".to_string(),
        DependenceMode::ScalarMultiples { gammas } => format!(
            "scalar:{}",
            gammas
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        DependenceMode::IntegerDependent { gammas } => format!(
            "integer:{}",
            gammas
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    };
    let rules: Vec<Value> = spec
        .rules
        .iter()
        .map(|row| Value::Array(row.iter().map(rule_to_value).collect()))
        .collect();
    let doc = json!({
        "dimension": spec.dimension,
        "phi": spec.phi,
        "eta": spec.eta,
        "directions": directions,
        "mode": mode,
        "rules": rules,
    });
    serde_json::to_string_pretty(&doc).expect("spec serialization cannot fail")
}

fn rule_to_value(rule: &CoefficientRule) -> Value {
    match rule {
        CoefficientRule::ConstantExact(v) => json!({
            "kind": "constant",
            "value": v.to_string(),
        }),
        CoefficientRule::PowerDecay { exponent } => json!({
            "kind": "power-decay",
            "exponent": exponent.to_string(),
        }),
        CoefficientRule::DirichletCharacter { modulus, table } => {
            let mut t = Map::new();
            for (r, v) in table {
                t.insert(r.to_string(), json!(v.to_string()));
            }
            json!({"kind": "character", "modulus": modulus, "table": t})
        }
        CoefficientRule::UnitPowerByIndex { base } => json!({
            "kind": "unit-power",
            "base": base.to_string(),
        }),
        CoefficientRule::FiniteSupport { support, default } => {
            let mut s = Map::new();
            for (p, v) in support {
                s.insert(p.to_string(), json!(v.to_string()));
            }
            json!({"kind": "finite-support", "support": s, "default": rule_to_value(default)})
        }
        CoefficientRule::RootOfRule {
            inner,
            order,
            index,
        } => json!({
            "kind": "root",
            "inner": rule_to_value(inner),
            "order": order,
            "index": index,
        }),
    }
}

fn parse_directions(value: &Value) -> Result<Vec<Direction>> {
    let rows = as_array(value, "directions")?;
    rows.iter()
        .map(|row| {
            let entries = as_array(row, "direction vector")?;
            let parsed: Result<Vec<NumberLiteral>> =
                entries.iter().map(parse_number_literal).collect();
            Ok(Direction(parsed?))
        })
        .collect()
}

fn parse_number_literal(value: &Value) -> Result<NumberLiteral> {
    match value {
        Value::Number(n) => {
            let v = n
                .as_f64()
                .ok_or_else(|| Error::syntax(format!("non-finite number {n}")))?;
            // Integers written as JSON numbers stay exact.
            if let Some(i) = n.as_i64() {
                Ok(NumberLiteral::from_integer(i))
            } else {
                Ok(NumberLiteral::from_f64(v))
            }
        }
        Value::String(s) => {
            let r = parse_rational(s).map_err(Error::syntax)?;
            Ok(NumberLiteral::from_rational(r))
        }
        other => Err(Error::syntax(format!(
            "expected number or fraction string, got {other}"
        ))),
    }
}

fn parse_mode(value: &Value) -> Result<DependenceMode> {
    let text = value
        .as_str()
        .ok_or_else(|| Error::syntax("`mode` must be a string"))?;
    if text == "independent" {
        return Ok(DependenceMode::Independent);
    }
    if let Some(list) = text.strip_prefix("scalar:") {
        let gammas: Result<Vec<NumberLiteral>> = list
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if let Ok(r) = parse_rational(tok) {
                    Ok(NumberLiteral::from_rational(r))
                } else {
                    tok.parse::<f64>()
                        .map(NumberLiteral::from_f64)
                        .map_err(|_| Error::syntax(format!("invalid scaling factor `{tok}`")))
                }
            })
            .collect();
        return Ok(DependenceMode::ScalarMultiples { gammas: gammas? });
    }
    if let Some(list) = text.strip_prefix("integer:") {
        let gammas: Result<Vec<u64>> = list
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::syntax(format!("invalid integer factor `{tok}`")))
            })
            .collect();
        return Ok(DependenceMode::IntegerDependent { gammas: gammas? });
    }
    Err(Error::syntax(format!(
        "mode must be `independent`, `scalar:<list>`, or `integer:<list>`, got `{text}`"
    )))
}

fn parse_rules(value: &Value) -> Result<Vec<Vec<CoefficientRule>>> {
    let rows = as_array(value, "rules")?;
    rows.iter()
        .map(|row| {
            as_array(row, "rule row")?
                .iter()
                .map(parse_rule)
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

fn parse_rule(value: &Value) -> Result<CoefficientRule> {
    let obj = as_object(value, "rule object")?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::syntax("rule object missing string `kind`"))?;
    match kind {
        "constant" => {
            reject_unknown_keys(obj, &["kind", "value"], "constant rule")?;
            Ok(CoefficientRule::ConstantExact(get_complex(obj, "value")?))
        }
        "power-decay" => {
            reject_unknown_keys(obj, &["kind", "exponent"], "power-decay rule")?;
            let raw = require(obj, "exponent")?;
            let exponent = match raw {
                Value::String(s) => parse_rational(s).map_err(Error::syntax)?,
                Value::Number(n) => {
                    let i = n.as_i64().ok_or_else(|| {
                        Error::syntax(
                            "power-decay exponent must be an integer or a fraction string",
                        )
                    })?;
                    num::BigRational::from_integer(i.into())
                }
                _ => {
                    return Err(Error::syntax(
                        "power-decay exponent must be an integer or a fraction string",
                    ))
                }
            };
            Ok(CoefficientRule::PowerDecay { exponent })
        }
        "character" => {
            reject_unknown_keys(obj, &["kind", "modulus", "table"], "character rule")?;
            let modulus = require(obj, "modulus")?
                .as_u64()
                .ok_or_else(|| Error::syntax("character modulus must be a positive integer"))?;
            let raw_table = as_object(require(obj, "table")?, "character table")?;
            let mut table = BTreeMap::new();
            for (key, v) in raw_table {
                let residue: u64 = key
                    .parse()
                    .map_err(|_| Error::syntax(format!("invalid residue key `{key}`")))?;
                table.insert(residue, complex_from_value(v)?);
            }
            Ok(CoefficientRule::DirichletCharacter { modulus, table })
        }
        "unit-power" => {
            reject_unknown_keys(obj, &["kind", "base"], "unit-power rule")?;
            Ok(CoefficientRule::UnitPowerByIndex {
                base: get_complex(obj, "base")?,
            })
        }
        "finite-support" => {
            reject_unknown_keys(obj, &["kind", "support", "default"], "finite-support rule")?;
            let raw_support = as_object(require(obj, "support")?, "support map")?;
            let mut support = BTreeMap::new();
            for (key, v) in raw_support {
                let p: u64 = key
                    .parse()
                    .map_err(|_| Error::syntax(format!("invalid support prime `{key}`")))?;
                support.insert(p, complex_from_value(v)?);
            }
            let default = parse_rule(require(obj, "default")?)?;
            Ok(CoefficientRule::FiniteSupport {
                support,
                default: Box::new(default),
            })
        }
        "root" => {
            reject_unknown_keys(obj, &["kind", "inner", "order", "index"], "root rule")?;
            let inner = parse_rule(require(obj, "inner")?)?;
            let order = require(obj, "order")?
                .as_u64()
                .ok_or_else(|| Error::syntax("root order must be a positive integer"))?;
            let index = require(obj, "index")?
                .as_u64()
                .ok_or_else(|| Error::syntax("root index must be a positive integer"))?;
            Ok(CoefficientRule::RootOfRule {
                inner: Box::new(inner),
                order: order as u32,
                index: index as u32,
            })
        }
        other => Err(Error::syntax(format!("unknown rule kind `{other}`"))),
    }
}

fn get_complex(obj: &Map<String, Value>, key: &str) -> Result<ComplexRational> {
    complex_from_value(require(obj, key)?)
}

fn complex_from_value(value: &Value) -> Result<ComplexRational> {
    match value {
        Value::String(s) => parse_complex_literal(s).map_err(Error::syntax),
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| {
                Error::syntax(format!(
                    "complex values must be literals like \"1/2+1/2 i\"; got {n}"
                ))
            })?;
            Ok(ComplexRational::from_integers(i, 0))
        }
        other => Err(Error::syntax(format!(
            "complex values must be string literals, got {other}"
        ))),
    }
}

fn as_object<'v>(value: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::syntax(format!("{what} must be a JSON object")))
}

fn as_array<'v>(value: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::syntax(format!("{what} must be a JSON array")))
}

fn require<'v>(obj: &'v Map<String, Value>, key: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| Error::syntax(format!("missing key `{key}`")))
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    require(obj, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::syntax(format!("`{key}` must be a nonnegative integer")))
}

fn reject_unknown_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::syntax(format!("unknown key `{key}` in {what}")));
        }
    }
    Ok(())
}
