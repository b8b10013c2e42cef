//! Cone and decomposition spec files.
//!
//! ```json
//! { "dim": 3, "facet_normals": [[1,0,0],[1,1,0],[1,1,1],[1,0,1]] }
//! { "base_reeb": ["3","3/2","3/2"], "pieces": [ { "vertices": [["0","0","2/3"], ...] } ] }
//! ```
//!
//! Syntax errors carry the line and column; shape errors carry the path of
//! the offending field.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::num::{parse_q, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    pub dim: usize,
    pub facet_normals: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSpec {
    pub base_reeb: Vec<Q>,
    pub pieces: Vec<Vec<Vec<Q>>>,
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e)))
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| Error::Parse("top level: expected an object".into()))?
        .get(name)
        .ok_or_else(|| Error::Parse(format!("{name}: missing field")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{path}: expected an array")))
}

pub fn parse_cone(text: &str) -> Result<ConeSpec> {
    let v = parse_json(text)?;
    let dim = field(&v, "dim")?
        .as_u64()
        .ok_or_else(|| Error::Parse("dim: expected a positive integer".into()))? as usize;
    let rows = array(field(&v, "facet_normals")?, "facet_normals")?;
    let mut normals = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let path = format!("facet_normals[{i}]");
        let entries = array(row, &path)?;
        if entries.len() != dim {
            return Err(Error::Parse(format!("{path}: expected {dim} entries, got {}", entries.len())));
        }
        let ints = entries
            .iter()
            .enumerate()
            .map(|(j, x)| x.as_i64().ok_or_else(|| Error::Parse(format!("{path}[{j}]: expected an integer, got {x}"))))
            .collect::<Result<Vec<i64>>>()?;
        normals.push(ints);
    }
    Ok(ConeSpec { dim, facet_normals: normals })
}

fn rational(v: &Value, path: &str) -> Result<Q> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(Error::Parse(format!("{path}: expected a rational string like \"3/2\", got {v}"))),
    };
    parse_q(&s).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

pub fn parse_decomposition(text: &str) -> Result<DecompositionSpec> {
    let v = parse_json(text)?;
    let base_reeb = array(field(&v, "base_reeb")?, "base_reeb")?
        .iter()
        .enumerate()
        .map(|(i, x)| rational(x, &format!("base_reeb[{i}]")))
        .collect::<Result<Vec<Q>>>()?;
    let mut pieces = Vec::new();
    for (k, piece) in array(field(&v, "pieces")?, "pieces")?.iter().enumerate() {
        let path = format!("pieces[{k}].vertices");
        let verts = piece
            .get("vertices")
            .ok_or_else(|| Error::Parse(format!("{path}: missing field")))?;
        let mut out = Vec::new();
        for (i, vert) in array(verts, &path)?.iter().enumerate() {
            let vpath = format!("{path}[{i}]");
            let coords = array(vert, &vpath)?;
            if coords.len() != base_reeb.len() {
                return Err(Error::Parse(format!(
                    "{vpath}: expected {} entries, got {}",
                    base_reeb.len(),
                    coords.len()
                )));
            }
            out.push(
                coords
                    .iter()
                    .enumerate()
                    .map(|(j, x)| rational(x, &format!("{vpath}[{j}]")))
                    .collect::<Result<Vec<Q>>>()?,
            );
        }
        pieces.push(out);
    }
    Ok(DecompositionSpec { base_reeb, pieces })
}

/// Parses a comma-separated rational vector such as `3,3/2,3/2`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|x| parse_q(x.trim())).collect()
}
