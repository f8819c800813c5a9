//! JSON file formats.
//!
//! Rationals are written as strings, `"p/q"` or `"n"`; plain JSON integers
//! are accepted on input too. Every semantic error names the offending
//! field by path, e.g. `error_matrix[1][0]`.
//!
//! * Relation: `{"x_size", "y_size", "z_size", "accept": [[[z, …], …], …]}`
//!   with an optional `"error": "1/10"` or `"error_matrix": [[…], …]`.
//! * Certificate: `{"tiles": [{"xs": […], "ys": […], "z": k, "w": "p/q"}, …]}`.
//! * Pseudotranscript: `{"x_size", "y_size", "z_size",
//!   "outcomes": [{"z": k, "matrix": [[…], …]}, …]}`.
//! * Distribution: `{"x_size", "y_size", "probs": [[…], …]}`, or the bare
//!   word `uniform` in place of a file.
//! * Protocol tree: `{"speaker": "A" | "B", "msg": [bits], "children": [t0, t1]}`
//!   or `{"z": k}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::BoundResult;
use crate::constructions::{Check, PruneResult};
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::protocols::{ProtocolTree, Speaker};
use crate::pseudotranscript::Pseudotranscript;
use crate::rational::{self, Rational};
use crate::relation::{ErrorFn, Relation};
use crate::tiles::{Tile, TileWeighting};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum RawRational {
    Text(String),
    Int(i64),
}

impl RawRational {
    fn parse(&self, field: &str) -> Result<Rational> {
        match self {
            RawRational::Text(s) => rational::parse(s, field),
            RawRational::Int(n) => Ok(rational::int(*n)),
        }
    }
}

fn text(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn parse_matrix(rows: &[Vec<RawRational>], field: &str, nx: usize, ny: usize) -> Result<Vec<Rational>> {
    if rows.len() != nx {
        return Err(Error::parse(field, format!("has {} rows, expected {nx}", rows.len())));
    }
    let mut out = Vec::with_capacity(nx * ny);
    for (x, row) in rows.iter().enumerate() {
        if row.len() != ny {
            return Err(Error::parse(
                format!("{field}[{x}]"),
                format!("has {} entries, expected {ny}", row.len()),
            ));
        }
        for (y, v) in row.iter().enumerate() {
            out.push(v.parse(&format!("{field}[{x}][{y}]"))?);
        }
    }
    Ok(out)
}

fn matrix_json(values: &[Rational], ny: usize) -> Value {
    Value::Array(values.chunks(ny).map(|r| Value::Array(r.iter().map(text).collect())).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    accept: Vec<Vec<Vec<usize>>>,
    error: Option<RawRational>,
    error_matrix: Option<Vec<Vec<RawRational>>>,
}

/// A relation together with the error bound stored alongside it, if any.
#[derive(Debug, Clone)]
pub struct RelationFile {
    pub relation: Relation,
    pub error: Option<ErrorFn>,
}

pub fn parse_relation(src: &str) -> Result<RelationFile> {
    let raw: RawRelation = serde_json::from_str(src)?;
    if raw.accept.len() != raw.x_size {
        return Err(Error::parse(
            "accept",
            format!("has {} rows, expected x_size = {}", raw.accept.len(), raw.x_size),
        ));
    }
    for (x, row) in raw.accept.iter().enumerate() {
        if row.len() != raw.y_size {
            return Err(Error::parse(
                format!("accept[{x}]"),
                format!("has {} entries, expected y_size = {}", row.len(), raw.y_size),
            ));
        }
        for (y, set) in row.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::parse(format!("accept[{x}][{y}]"), "accept set is empty"));
            }
            if let Some((k, z)) = set.iter().enumerate().find(|(_, z)| **z >= raw.z_size) {
                return Err(Error::parse(
                    format!("accept[{x}][{y}][{k}]"),
                    format!("output {z} outside 0..{}", raw.z_size),
                ));
            }
        }
    }
    let relation = Relation::new(raw.z_size, raw.accept)?;
    let (nx, ny) = (raw.x_size, raw.y_size);
    let error = match (raw.error, raw.error_matrix) {
        (Some(_), Some(_)) => {
            return Err(Error::parse("error", "give either error or error_matrix, not both"))
        }
        (Some(e), None) => {
            let eps = e.parse("error")?;
            Some(ErrorFn::constant(nx, ny, eps).map_err(|e| Error::parse("error", e.to_string()))?)
        }
        (None, Some(m)) => {
            let values = parse_matrix(&m, "error_matrix", nx, ny)?;
            Some(
                ErrorFn::from_values(nx, ny, values)
                    .map_err(|e| Error::parse("error_matrix", e.to_string()))?,
            )
        }
        (None, None) => None,
    };
    Ok(RelationFile { relation, error })
}

pub fn relation_to_json(rel: &Relation, error: Option<&ErrorFn>) -> Value {
    let accept: Vec<Vec<Vec<usize>>> = (0..rel.x_size())
        .map(|x| (0..rel.y_size()).map(|y| rel.accepted(x, y)).collect())
        .collect();
    let mut v = json!({
        "x_size": rel.x_size(),
        "y_size": rel.y_size(),
        "z_size": rel.z_size(),
        "accept": accept,
    });
    if let Some(e) = error {
        v["error_matrix"] = matrix_json(e.values(), rel.y_size());
    }
    v
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTile {
    xs: Vec<usize>,
    ys: Vec<usize>,
    z: usize,
    w: RawRational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificate {
    tiles: Vec<RawTile>,
}

/// Tiles are checked for index range only; sizes are checked against a
/// relation when the certificate is used.
pub fn parse_certificate(src: &str) -> Result<TileWeighting> {
    let raw: RawCertificate = serde_json::from_str(src)?;
    let mut w = TileWeighting::new();
    for (i, t) in raw.tiles.iter().enumerate() {
        for (name, set) in [("xs", &t.xs), ("ys", &t.ys)] {
            if set.is_empty() {
                return Err(Error::parse(format!("tiles[{i}].{name}"), "set is empty"));
            }
            if let Some(v) = set.iter().find(|v| **v >= crate::relation::MAX_ALPHABET) {
                return Err(Error::parse(format!("tiles[{i}].{name}"), format!("index {v} too large")));
            }
        }
        let weight = t.w.parse(&format!("tiles[{i}].w"))?;
        w.add(Tile::from_sets(&t.xs, &t.ys, t.z), weight);
    }
    Ok(w)
}

pub fn certificate_to_json(w: &TileWeighting) -> Value {
    let tiles: Vec<Value> = w
        .iter()
        .map(|(t, v)| json!({ "xs": t.xs_list(), "ys": t.ys_list(), "z": t.z, "w": text(v) }))
        .collect();
    json!({ "tiles": tiles })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcome {
    z: usize,
    matrix: Vec<Vec<RawRational>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPseudotranscript {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    outcomes: Vec<RawOutcome>,
}

pub fn parse_pseudotranscript(src: &str) -> Result<Pseudotranscript> {
    let raw: RawPseudotranscript = serde_json::from_str(src)?;
    let outcomes = raw
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let field = format!("outcomes[{i}].matrix");
            Ok((o.z, parse_matrix(&o.matrix, &field, raw.x_size, raw.y_size)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Pseudotranscript::new(raw.x_size, raw.y_size, raw.z_size, outcomes)
}

pub fn pseudotranscript_to_json(q: &Pseudotranscript) -> Value {
    let outcomes: Vec<Value> = q
        .outcomes()
        .iter()
        .map(|o| json!({ "z": o.z(), "matrix": matrix_json(o.matrix(), q.y_size()) }))
        .collect();
    json!({
        "x_size": q.x_size(),
        "y_size": q.y_size(),
        "z_size": q.z_size(),
        "outcomes": outcomes,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    x_size: usize,
    y_size: usize,
    probs: Vec<Vec<RawRational>>,
}

pub fn parse_distribution(src: &str) -> Result<InputDistribution> {
    let raw: RawDistribution = serde_json::from_str(src)?;
    let probs = parse_matrix(&raw.probs, "probs", raw.x_size, raw.y_size)?;
    InputDistribution::new(raw.x_size, raw.y_size, probs)
        .map_err(|e| Error::parse("probs", e.to_string()))
}

pub fn distribution_to_json(mu: &InputDistribution) -> Value {
    json!({
        "x_size": mu.x_size(),
        "y_size": mu.y_size(),
        "probs": matrix_json(mu.probs(), mu.y_size()),
    })
}

pub fn parse_protocol(src: &str) -> Result<ProtocolTree> {
    let v: Value = serde_json::from_str(src)?;
    protocol_from_value(&v, "root")
}

fn protocol_from_value(v: &Value, path: &str) -> Result<ProtocolTree> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse(path, "expected an object"))?;
    if let Some(z) = obj.get("z") {
        if obj.len() != 1 {
            return Err(Error::parse(path, "a leaf has only the field z"));
        }
        let z = z
            .as_u64()
            .ok_or_else(|| Error::parse(format!("{path}.z"), "expected a nonnegative integer"))?;
        return Ok(ProtocolTree::leaf(z as usize));
    }
    let speaker = match obj.get("speaker").and_then(Value::as_str) {
        Some("A") => Speaker::Alice,
        Some("B") => Speaker::Bob,
        _ => return Err(Error::parse(format!("{path}.speaker"), "expected \"A\" or \"B\"")),
    };
    let msg = obj
        .get("msg")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{path}.msg"), "expected an array of bits"))?
        .iter()
        .enumerate()
        .map(|(i, b)| match b.as_u64() {
            Some(b @ (0 | 1)) => Ok(b as u8),
            _ => Err(Error::parse(format!("{path}.msg[{i}]"), "expected 0 or 1")),
        })
        .collect::<Result<Vec<u8>>>()?;
    let children = obj
        .get("children")
        .and_then(Value::as_array)
        .filter(|c| c.len() == 2)
        .ok_or_else(|| Error::parse(format!("{path}.children"), "expected two subtrees"))?;
    let zero = protocol_from_value(&children[0], &format!("{path}.children[0]"))?;
    let one = protocol_from_value(&children[1], &format!("{path}.children[1]"))?;
    Ok(ProtocolTree::node(speaker, msg, zero, one))
}

pub fn protocol_to_json(t: &ProtocolTree) -> Value {
    match t {
        ProtocolTree::Leaf { z } => json!({ "z": z }),
        ProtocolTree::Node {
            speaker,
            msg,
            children,
        } => json!({
            "speaker": match speaker { Speaker::Alice => "A", Speaker::Bob => "B" },
            "msg": msg,
            "children": [protocol_to_json(&children[0]), protocol_to_json(&children[1])],
        }),
    }
}

pub fn bound_to_json(b: &BoundResult) -> Value {
    json!({
        "value": text(&b.value),
        "log2": b.log2_value,
        "certificate": certificate_to_json(&b.certificate),
    })
}

fn check_json(c: &Check) -> Value {
    json!({ "pass": c.pass, "lhs": c.lhs, "rhs": c.rhs })
}

/// The pruning report. Non-finite floats (single-cell domains) are written
/// as `null`.
pub fn prune_report_json(r: &PruneResult) -> Value {
    json!({
        "delta": text(&r.delta),
        "Delta": r.big_delta,
        "epsilon": text(&r.epsilon),
        "information": r.information,
        "theta": r.theta,
        "bad_pairs": r.bad_set.len(),
        "removed_mass": text(&r.removed_mass),
        "trivial": r.trivial,
        "claim_missingmass": {
            "pass": r.missing_mass.pass,
            "removed_mass": text(&r.removed_mass),
            "delta": text(&r.delta),
        },
        "claim_tilebound": check_json(&r.tile_bound),
        "certificate_feasible": {
            "pass": r.feasible,
            "average_error": text(&r.pruned_error),
            "limit": text(&(&r.epsilon + &r.delta)),
        },
        "final_inequality": {
            "pass": r.final_inequality.pass,
            "lhs": r.final_inequality.lhs,
            "information": r.final_inequality.rhs,
            "relaxed_prt_mu": text(&r.relaxed_value),
        },
        "markov": check_json(&r.markov),
        "hyperbola": r.hyperbola.iter().map(|h| json!({
            "outcome": h.outcome,
            "theta": h.theta,
            "surviving": text(&h.surviving),
            "bound": h.bound,
            "pass": h.pass,
        })).collect::<Vec<_>>(),
        "certificate": certificate_to_json(&r.certificate),
    })
}
