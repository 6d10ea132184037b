//! JSON formats for groupoids and arrow functions.
//!
//! Groupoid:
//! `{"units": 2, "arrows": [{"id", "r", "s", "inv"}], "compose": [[x, y, xy]], "weights": [{"unit", "w"}]}`.
//! The unit arrow of `u` is the arrow with `r = s = u` that composes with
//! itself to itself. Omitted weights are 1.
//!
//! Function: `{"arrows": 4, "values": {"0": [re, im], ...}}`; omitted arrows are 0.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::ArrowFunction;
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidParts};
use crate::C64;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupoidFile {
    units: usize,
    arrows: Vec<ArrowRecord>,
    compose: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    weights: Vec<WeightRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowRecord {
    id: usize,
    r: usize,
    s: usize,
    inv: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightRecord {
    unit: usize,
    w: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    arrows: usize,
    values: BTreeMap<usize, [f64; 2]>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn groupoid_to_string(g: &FiniteGroupoid) -> String {
    let parts = g.to_parts();
    let file = GroupoidFile {
        units: g.unit_count(),
        arrows: (0..g.arrow_count())
            .map(|x| ArrowRecord {
                id: x,
                r: g.range(x),
                s: g.source(x),
                inv: g.inverse(x),
            })
            .collect(),
        compose: parts.compose.iter().map(|&(x, y, z)| [x, y, z]).collect(),
        weights: if g.has_unit_weights() {
            Vec::new()
        } else {
            (0..g.unit_count())
                .map(|u| WeightRecord {
                    unit: u,
                    w: g.unit_weight(u),
                })
                .collect()
        },
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes") + "\n"
}

pub fn parse_groupoid(text: &str) -> Result<FiniteGroupoid> {
    let file: GroupoidFile = serde_json::from_str(text).map_err(parse_err)?;
    let n = file.arrows.len();
    let mut range = vec![usize::MAX; n];
    let mut source = vec![0; n];
    let mut inverse = vec![0; n];
    for a in &file.arrows {
        if a.id >= n || range[a.id] != usize::MAX {
            return Err(Error::Parse(format!(
                "arrow ids must be 0..{n} without repeats (got {})",
                a.id
            )));
        }
        range[a.id] = a.r;
        source[a.id] = a.s;
        inverse[a.id] = a.inv;
    }
    let compose: Vec<(usize, usize, usize)> = file.compose.iter().map(|c| (c[0], c[1], c[2])).collect();
    let mut unit_arrows = Vec::with_capacity(file.units);
    for u in 0..file.units {
        let idempotents: Vec<usize> = (0..n)
            .filter(|&x| range[x] == u && source[x] == u && compose.contains(&(x, x, x)))
            .collect();
        match idempotents.as_slice() {
            [x] => unit_arrows.push(*x),
            [] => return Err(Error::Parse(format!("unit {u} has no identity arrow"))),
            _ => return Err(Error::Parse(format!("unit {u} has several identity arrows"))),
        }
    }
    let weights = if file.weights.is_empty() {
        None
    } else {
        let mut unit_w = vec![1.0; file.units];
        for w in &file.weights {
            if w.unit >= file.units {
                return Err(Error::Parse(format!("weight for missing unit {}", w.unit)));
            }
            unit_w[w.unit] = w.w;
        }
        Some(
            source
                .iter()
                .map(|&s| unit_w.get(s).copied().unwrap_or(1.0))
                .collect(),
        )
    };
    FiniteGroupoid::from_parts(GroupoidParts {
        unit_arrows,
        range,
        source,
        inverse,
        compose,
        weights,
    })
    .map_err(|e| Error::Parse(e.to_string()))
}

pub fn function_to_string(f: &ArrowFunction) -> String {
    let file = FunctionFile {
        arrows: f.len(),
        values: f.values().iter().enumerate().map(|(k, z)| (k, [z.re, z.im])).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes") + "\n"
}

pub fn parse_function(text: &str) -> Result<ArrowFunction> {
    let file: FunctionFile = serde_json::from_str(text).map_err(parse_err)?;
    let mut f = ArrowFunction::zeros(file.arrows);
    for (&k, &[re, im]) in &file.values {
        if k >= file.arrows {
            return Err(Error::Parse(format!("value for arrow {k} beyond {}", file.arrows)));
        }
        f[k] = C64::new(re, im);
    }
    Ok(f)
}

/// Reads a function file and checks it against the groupoid.
pub fn parse_function_for(g: &FiniteGroupoid, text: &str) -> Result<ArrowFunction> {
    let f = parse_function(text)?;
    if f.len() != g.arrow_count() {
        return Err(Error::DimensionMismatch {
            expected: g.arrow_count(),
            found: f.len(),
        });
    }
    Ok(f)
}

pub fn read_groupoid(path: &Path) -> Result<FiniteGroupoid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_groupoid(&text)
}

pub fn read_function(path: &Path) -> Result<ArrowFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_function(&text)
}
