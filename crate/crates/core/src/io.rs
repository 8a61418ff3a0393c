//! External formats: the whitespace polytope text format ("H n" / "V n"
//! headers, `p/q` tokens), its JSON mirror with `{"num","den"}` rationals,
//! binarization descriptors and instance files.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bef::ExtendedFormulation;
use crate::binarization::{Binarization, Classification, HypercubePerm};
use crate::geom::{HPolytope, VPolytope};
use crate::num::{QVector, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Polytope {
    H(HPolytope),
    V(VPolytope),
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        Value::Object(o) => {
            let field = |k: &str| -> Result<String> {
                match o.get(k) {
                    Some(Value::String(s)) => Ok(s.clone()),
                    Some(Value::Number(n)) => Ok(n.to_string()),
                    _ => Err(Error::Parse(format!("rational object missing {k:?}"))),
                }
            };
            let num = field("num")?;
            let den = field("den")?;
            parse_rational(&format!("{num}/{den}"))
        }
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

pub fn point_to_json(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(rational_to_json).collect())
}

pub fn points_to_json(ps: &[QVector]) -> Value {
    Value::Array(ps.iter().map(|p| point_to_json(p)).collect())
}

fn point_from_json(v: &Value, dim: usize) -> Result<QVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("point must be an array".into()))?;
    if arr.len() != dim {
        return Err(Error::Parse(format!(
            "point has {} coordinates, expected {dim}",
            arr.len()
        )));
    }
    arr.iter().map(rational_from_json).collect()
}

/// Text form: header `H n` or `V n`; V rows are `n` rational tokens, H rows
/// are `n` tokens, a relation (`<=` or `=`), and the right-hand side.
pub fn polytope_to_text(p: &Polytope) -> String {
    let mut out = String::new();
    match p {
        Polytope::H(h) => {
            out.push_str(&format!("H {}\n", h.dim));
            for (a, b) in &h.ineqs {
                for c in a {
                    out.push_str(&format_rational(c));
                    out.push(' ');
                }
                out.push_str(&format!("<= {}\n", format_rational(b)));
            }
            for (a, b) in &h.eqs {
                for c in a {
                    out.push_str(&format_rational(c));
                    out.push(' ');
                }
                out.push_str(&format!("= {}\n", format_rational(b)));
            }
        }
        Polytope::V(v) => {
            out.push_str(&format!("V {}\n", v.dim));
            for p in &v.vertices {
                let row: Vec<String> = p.iter().map(format_rational).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

pub fn polytope_from_text(s: &str) -> Result<Polytope> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty polytope file".into()))?;
    let mut tokens = header.split_whitespace();
    let repr = tokens.next().unwrap_or("");
    let dim: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad polytope header {header:?}")))?;
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    match repr {
        "V" => {
            let mut vertices = Vec::new();
            for line in lines {
                let coords: Vec<Rational> = line
                    .split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<_>>()?;
                if coords.len() != dim {
                    return Err(Error::Parse(format!("V row {line:?} has wrong arity")));
                }
                vertices.push(coords);
            }
            Ok(Polytope::V(VPolytope::new(dim, vertices)))
        }
        "H" => {
            let mut ineqs = Vec::new();
            let mut eqs = Vec::new();
            for line in lines {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != dim + 2 {
                    return Err(Error::Parse(format!("H row {line:?} has wrong arity")));
                }
                let a: QVector = toks[..dim]
                    .iter()
                    .map(|t| parse_rational(t))
                    .collect::<Result<_>>()?;
                let b = parse_rational(toks[dim + 1])?;
                match toks[dim] {
                    "<=" | "≤" => ineqs.push((a, b)),
                    "=" => eqs.push((a, b)),
                    rel => return Err(Error::Parse(format!("bad relation {rel:?}"))),
                }
            }
            Ok(Polytope::H(HPolytope::new(dim, ineqs, eqs)?))
        }
        _ => Err(Error::Parse(format!("bad polytope header {header:?}"))),
    }
}

pub fn polytope_to_json(p: &Polytope) -> Value {
    match p {
        Polytope::H(h) => json!({
            "repr": "H",
            "dim": h.dim,
            "ineqs": h.ineqs.iter().map(|(a, b)| json!({"a": point_to_json(a), "b": rational_to_json(b)})).collect::<Vec<_>>(),
            "eqs": h.eqs.iter().map(|(a, b)| json!({"a": point_to_json(a), "b": rational_to_json(b)})).collect::<Vec<_>>(),
        }),
        Polytope::V(v) => json!({
            "repr": "V",
            "dim": v.dim,
            "vertices": points_to_json(&v.vertices),
        }),
    }
}

pub fn polytope_from_json(v: &Value) -> Result<Polytope> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("polytope must be a JSON object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("polytope needs a positive integer dim".into()))?
        as usize;
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    match obj.get("repr").and_then(Value::as_str) {
        Some("V") => {
            let rows = obj
                .get("vertices")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("V polytope needs a vertices array".into()))?;
            let vertices = rows
                .iter()
                .map(|r| point_from_json(r, dim))
                .collect::<Result<_>>()?;
            Ok(Polytope::V(VPolytope::new(dim, vertices)))
        }
        Some("H") => {
            let parse_rows = |key: &str| -> Result<Vec<(QVector, Rational)>> {
                let Some(rows) = obj.get(key) else {
                    return Ok(Vec::new());
                };
                rows.as_array()
                    .ok_or_else(|| Error::Parse(format!("{key} must be an array")))?
                    .iter()
                    .map(|r| {
                        let a = r
                            .get("a")
                            .ok_or_else(|| Error::Parse("row missing a".into()))?;
                        let b = r
                            .get("b")
                            .ok_or_else(|| Error::Parse("row missing b".into()))?;
                        Ok((point_from_json(a, dim)?, rational_from_json(b)?))
                    })
                    .collect()
            };
            Ok(Polytope::H(HPolytope::new(
                dim,
                parse_rows("ineqs")?,
                parse_rows("eqs")?,
            )?))
        }
        _ => Err(Error::Parse("polytope repr must be \"H\" or \"V\"".into())),
    }
}

/// CLI-facing binarization descriptor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BinSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Value>,
}

pub fn binarization_from_spec(spec: &BinSpec) -> Result<Binarization> {
    let need_d = || {
        spec.d
            .ok_or_else(|| Error::Parse(format!("kind {:?} needs d", spec.kind)))
    };
    match spec.kind.as_str() {
        "unary" => Binarization::unary(need_d()?),
        "full" => Binarization::full(need_d()?),
        "log" => Binarization::log(need_d()?),
        "trunc_log" => {
            let v = spec
                .v
                .ok_or_else(|| Error::Parse("trunc_log needs v".into()))?;
            Binarization::trunc_log(v, need_d()?)
        }
        "hypercube" => {
            let sigma = spec
                .sigma
                .clone()
                .ok_or_else(|| Error::Parse("hypercube needs sigma".into()))?;
            Binarization::hypercube(HypercubePerm::new(need_d()?, sigma)?)
        }
        "custom" => {
            let k = spec
                .k
                .ok_or_else(|| Error::Parse("custom needs k".into()))?;
            let body = spec
                .body
                .as_ref()
                .ok_or_else(|| Error::Parse("custom needs a body polytope".into()))?;
            match polytope_from_json(body)? {
                Polytope::H(h) => Binarization::custom_from_h(h, k),
                Polytope::V(v) => Binarization::custom_from_v(&v, k),
            }
        }
        other => Err(Error::Parse(format!("unknown binarization kind {other:?}"))),
    }
}

pub fn classification_to_json(c: &Classification) -> Value {
    json!({
        "natural": c.natural,
        "integral": c.integral,
        "exact": c.exact,
        "perfect": c.perfect,
        "affine": c.affine.as_ref().map(|(a, beta)| json!({
            "a": point_to_json(a),
            "beta": rational_to_json(beta),
        })),
        "linear": c.linear,
        "hypercube": c.hypercube,
        "x_beyond_range": c.x_beyond_range,
    })
}

/// Instance file: `{"P": <polytope>, "binarized": ["x1", ...], "bins":
/// [<descriptor>, ...]}`. Variable names are `x<j>`, 1-based.
pub fn instance_from_json(v: &Value) -> Result<ExtendedFormulation> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;
    let p = match polytope_from_json(
        obj.get("P")
            .ok_or_else(|| Error::Parse("instance needs P".into()))?,
    )? {
        Polytope::H(h) => h,
        Polytope::V(v) => crate::geom::facet_hull(&v)?,
    };
    let names = obj
        .get("binarized")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("instance needs a binarized name list".into()))?;
    let mut binarized = Vec::new();
    for name in names {
        let s = name
            .as_str()
            .ok_or_else(|| Error::Parse("binarized entries must be names like \"x2\"".into()))?;
        let idx: usize = s
            .strip_prefix('x')
            .and_then(|t| t.parse().ok())
            .filter(|&j| j >= 1)
            .ok_or_else(|| Error::Parse(format!("bad variable name {s:?}")))?;
        binarized.push(idx - 1);
    }
    let bins = obj
        .get("bins")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("instance needs a bins array".into()))?
        .iter()
        .map(|b| {
            let spec: BinSpec = serde_json::from_value(b.clone())
                .map_err(|e| Error::Parse(format!("bad binarization descriptor: {e}")))?;
            binarization_from_spec(&spec)
        })
        .collect::<Result<Vec<_>>>()?;
    ExtendedFormulation::build(p, binarized, bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qint, qvec};

    #[test]
    fn text_round_trip_h() {
        let h = HPolytope::new(
            2,
            vec![
                (qvec(&[1, 0]), qint(2)),
                (qvec(&[-1, 0]), qint(0)),
                (qvec(&[0, 1]), q(3, 2)),
                (qvec(&[0, -1]), qint(0)),
            ],
            vec![],
        )
        .unwrap();
        let text = polytope_to_text(&Polytope::H(h.clone()));
        match polytope_from_text(&text).unwrap() {
            Polytope::H(h2) => assert_eq!(h2.vertices(), h.vertices()),
            _ => panic!("expected H"),
        }
    }

    #[test]
    fn text_round_trip_v() {
        let v = VPolytope::new(2, vec![qvec(&[0, 0]), vec![q(1, 2), qint(1)]]);
        let text = polytope_to_text(&Polytope::V(v.clone()));
        assert_eq!(polytope_from_text(&text).unwrap(), Polytope::V(v));
    }

    #[test]
    fn unicode_relation_accepted() {
        let p = polytope_from_text("H 1\n1 ≤ 1\n-1 <= 0\n").unwrap();
        match p {
            Polytope::H(h) => assert_eq!(h.ineqs.len(), 2),
            _ => panic!(),
        }
    }

    #[test]
    fn json_round_trip() {
        let v = VPolytope::new(2, vec![qvec(&[0, 0]), vec![q(1, 3), qint(1)]]);
        let j = polytope_to_json(&Polytope::V(v.clone()));
        assert_eq!(polytope_from_json(&j).unwrap(), Polytope::V(v));
        let r = rational_from_json(&json!({"num": "-4", "den": "6"})).unwrap();
        assert_eq!(r, q(-2, 3));
        assert_eq!(rational_from_json(&json!(5)).unwrap(), qint(5));
        assert_eq!(rational_from_json(&json!("7/2")).unwrap(), q(7, 2));
    }

    #[test]
    fn descriptor_constructors() {
        let spec: BinSpec = serde_json::from_value(json!({"kind": "log", "d": 2})).unwrap();
        let b = binarization_from_spec(&spec).unwrap();
        assert_eq!(b.k, 3);
        let spec: BinSpec =
            serde_json::from_value(json!({"kind": "trunc_log", "d": 2, "v": 3})).unwrap();
        assert_eq!(binarization_from_spec(&spec).unwrap().k, 2);
        let spec: BinSpec =
            serde_json::from_value(json!({"kind": "hypercube", "d": 2, "sigma": [0, 2, 1, 3]}))
                .unwrap();
        assert_eq!(binarization_from_spec(&spec).unwrap().k, 3);
    }

    #[test]
    fn instance_parsing() {
        let inst = json!({
            "P": {"repr": "H", "dim": 1, "ineqs": [
                {"a": [1], "b": 3}, {"a": [-1], "b": 0}
            ]},
            "binarized": ["x1"],
            "bins": [{"kind": "log", "d": 2}],
        });
        let ef = instance_from_json(&inst).unwrap();
        assert_eq!(ef.n, 1);
        assert_eq!(ef.q.dim, 3);
    }
}
