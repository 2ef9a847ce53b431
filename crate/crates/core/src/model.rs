//! Problem instances, right-hand-side sets, and the JSON instance format.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cone::{ConeBlock, ConeSpec};
use crate::error::{Error, Result};
use crate::exact;

/// Largest magnitude accepted for an entry of `A` or of a right-hand side.
///
/// Keeps every intermediate product of the exact cone tests inside `i128`.
pub const MAX_ENTRY: i64 = 1 << 31;

/// Default cap on the number of right-hand sides in `H`.
pub const DEFAULT_RHS_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarSign {
    #[serde(rename = "nonneg")]
    Nonnegative,
    #[serde(rename = "free")]
    Free,
}

/// `A x ⪯_K β` with integral `A` (stored by columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: Option<String>,
    columns: Vec<Vec<i64>>,
    cone: ConeSpec,
    var_signs: Vec<VarSign>,
    objective: Option<Vec<f64>>,
}

impl Instance {
    /// Builds an instance from the row-major matrix `rows` (m x n).
    pub fn new(rows: Vec<Vec<i64>>, cone: ConeSpec, var_signs: Vec<VarSign>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::invalid("A", "at least one row is required"));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::invalid("A", "at least one column is required"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dimension(format!("A[{i}]"), n, row.len()));
            }
            if let Some(j) = row.iter().position(|v| v.abs() > MAX_ENTRY) {
                return Err(Error::invalid(format!("A[{i}][{j}]"), "entry magnitude above 2^31"));
            }
        }
        if cone.total_dim() != m {
            return Err(Error::dimension("cone", m, cone.total_dim()));
        }
        if var_signs.len() != n {
            return Err(Error::dimension("var_signs", n, var_signs.len()));
        }
        let columns = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Ok(Instance {
            name: None,
            columns,
            cone,
            var_signs,
            objective: None,
        })
    }

    /// All-nonnegative instance.
    pub fn nonnegative(rows: Vec<Vec<i64>>, cone: ConeSpec) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(rows, cone, vec![VarSign::Nonnegative; n])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn m(&self) -> usize {
        self.cone.total_dim()
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    /// Column `a^j`.
    pub fn column(&self, j: usize) -> &[i64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn var_signs(&self) -> &[VarSign] {
        &self.var_signs
    }

    /// The objective as parsed; feasibility never reads it.
    pub fn objective(&self) -> Option<&[f64]> {
        self.objective.as_deref()
    }

    pub fn has_free_variables(&self) -> bool {
        self.var_signs.contains(&VarSign::Free)
    }

    /// Row-major copy of `A`.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.m())
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect()
    }

    /// `A x` for a nonnegative integer `x`.
    pub fn apply(&self, x: &[u64]) -> Vec<i64> {
        debug_assert_eq!(x.len(), self.n());
        let mut out = vec![0i64; self.m()];
        for (col, &xj) in self.columns.iter().zip(x) {
            if xj == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(col) {
                *o += a * xj as i64;
            }
        }
        out
    }

    /// `A x` for a signed integer `x`.
    pub fn apply_signed(&self, x: &[i64]) -> Vec<i64> {
        debug_assert_eq!(x.len(), self.n());
        let mut out = vec![0i64; self.m()];
        for (col, &xj) in self.columns.iter().zip(x) {
            for (o, &a) in out.iter_mut().zip(col) {
                *o += a * xj;
            }
        }
        out
    }

    /// Replaces every free `x_j` by `x_j⁺ - x_j⁻`: one column `a^j`
    /// followed by `-a^j`, both nonnegative. Nonnegative variables keep
    /// their column, in order.
    pub fn split_free_variables(&self) -> Instance {
        if !self.has_free_variables() {
            return self.clone();
        }
        let mut columns = Vec::with_capacity(2 * self.n());
        for (col, sign) in self.columns.iter().zip(&self.var_signs) {
            columns.push(col.clone());
            if *sign == VarSign::Free {
                columns.push(col.iter().map(|v| -v).collect());
            }
        }
        Instance {
            name: self.name.clone(),
            var_signs: vec![VarSign::Nonnegative; columns.len()],
            columns,
            cone: self.cone.clone(),
            objective: None,
        }
    }

    /// Maps a witness of the split instance back to this instance's
    /// variables.
    pub fn fold_split_witness(&self, split: &[u64]) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n());
        let mut it = split.iter().map(|&v| v as i64);
        for sign in &self.var_signs {
            let plus = it.next().expect("split witness too short");
            match sign {
                VarSign::Nonnegative => out.push(plus),
                VarSign::Free => out.push(plus - it.next().expect("split witness too short")),
            }
        }
        out
    }
}

/// The finite set `H` of integral right-hand sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsSet {
    Box { lower: Vec<i64>, upper: Vec<i64> },
    Explicit(Vec<Vec<i64>>),
}

impl RhsSet {
    pub fn new_box(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::dimension("rhs.upper", lower.len(), upper.len()));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::invalid(format!("rhs.lower[{i}]"), "lower bound exceeds upper bound"));
        }
        Ok(RhsSet::Box { lower, upper })
    }

    /// Explicit list; duplicates are dropped keeping first occurrences.
    pub fn explicit(points: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(first) = points.first() {
            if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != first.len()) {
                return Err(Error::dimension(format!("rhs.points[{i}]"), first.len(), p.len()));
            }
        }
        let mut seen = HashSet::new();
        let points = points.into_iter().filter(|p| seen.insert(p.clone())).collect();
        Ok(RhsSet::Explicit(points))
    }

    /// Point dimension, or `None` for an empty explicit list.
    pub fn dim(&self) -> Option<usize> {
        match self {
            RhsSet::Box { lower, .. } => Some(lower.len()),
            RhsSet::Explicit(p) => p.first().map(Vec::len),
        }
    }

    pub fn cardinality(&self) -> u128 {
        match self {
            RhsSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (*u as i128 - *l as i128 + 1) as u128)
                .fold(1u128, |acc, w| acc.saturating_mul(w)),
            RhsSet::Explicit(p) => p.len() as u128,
        }
    }

    /// Lexicographic order for boxes, input order for explicit lists.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Vec<i64>>> {
        let count = self.cardinality();
        if count > cap as u128 {
            return Err(Error::RhsCapExceeded { count, cap });
        }
        match self {
            RhsSet::Explicit(p) => Ok(p.clone()),
            RhsSet::Box { lower, upper } => {
                let mut out = Vec::with_capacity(count as usize);
                let mut cur = lower.clone();
                loop {
                    out.push(cur.clone());
                    // Odometer increment, last coordinate fastest.
                    let mut i = cur.len();
                    loop {
                        if i == 0 {
                            return Ok(out);
                        }
                        i -= 1;
                        if cur[i] < upper[i] {
                            cur[i] += 1;
                            break;
                        }
                        cur[i] = lower[i];
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EngineKind {
    /// Cardinality-bounded sequence with level-set-minimal pools.
    #[default]
    #[serde(rename = "f")]
    F,
    /// Componentwise doubling sequence.
    #[serde(rename = "g")]
    G,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::F => "f",
            EngineKind::G => "g",
        })
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(EngineKind::F),
            "g" => Ok(EngineKind::G),
            other => Err(Error::invalid("options.engine", format!("unknown engine {other:?}"))),
        }
    }
}

/// Solver options carried by the instance file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceOptions {
    pub engine: Option<EngineKind>,
    pub kbar: Option<u64>,
    pub dual_cert: Option<Vec<BigRational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub rhs: RhsSet,
    pub options: InstanceOptions,
}

/// Parses and validates an instance file with the default `H` cap.
pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    parse_instance_with_cap(text, DEFAULT_RHS_CAP)
}

pub fn parse_instance_with_cap(text: &str, rhs_cap: u64) -> Result<ParsedInstance> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "$")?;

    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(Error::invalid("name", "expected a string")),
    };
    let m = positive(required(obj, "m")?, "m")?;
    let n = positive(required(obj, "n")?, "n")?;

    let rows = int_matrix(required(obj, "A")?, "A")?;
    if rows.len() != m {
        return Err(Error::dimension("A", m, rows.len()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::dimension(format!("A[{i}]"), n, r.len()));
        }
    }

    let objective = match obj.get("c") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let arr = as_array(v, "c")?;
            if arr.len() != n {
                return Err(Error::dimension("c", n, arr.len()));
            }
            let vals = arr
                .iter()
                .enumerate()
                .map(|(j, x)| x.as_f64().ok_or_else(|| Error::invalid(format!("c[{j}]"), "expected a number")))
                .collect::<Result<Vec<_>>>()?;
            Some(vals)
        }
    };

    let var_signs = match obj.get("var_signs") {
        None | Some(Value::Null) => vec![VarSign::Nonnegative; n],
        Some(v) => {
            let arr = as_array(v, "var_signs")?;
            if arr.len() != n {
                return Err(Error::dimension("var_signs", n, arr.len()));
            }
            arr.iter()
                .enumerate()
                .map(|(j, s)| match s.as_str() {
                    Some("nonneg") => Ok(VarSign::Nonnegative),
                    Some("free") => Ok(VarSign::Free),
                    _ => Err(Error::invalid(format!("var_signs[{j}]"), "expected \"nonneg\" or \"free\"")),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let cone = parse_cone(required(obj, "cone")?)?;
    if cone.total_dim() != m {
        return Err(Error::dimension("cone", m, cone.total_dim()));
    }

    let mut instance = Instance::new(rows, cone, var_signs)?;
    instance.name = name;
    instance.objective = objective;

    let rhs = parse_rhs(required(obj, "rhs")?, m)?;
    let count = rhs.cardinality();
    if count > rhs_cap as u128 {
        return Err(Error::RhsCapExceeded { count, cap: rhs_cap });
    }

    let options = match obj.get("options") {
        None | Some(Value::Null) => InstanceOptions::default(),
        Some(v) => parse_options(v, m)?,
    };

    Ok(ParsedInstance { instance, rhs, options })
}

fn parse_cone(v: &Value) -> Result<ConeSpec> {
    let obj = as_object(v, "cone")?;
    let blocks = as_array(required_at(obj, "blocks", "cone.blocks")?, "cone.blocks")?;
    let mut out = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let field = format!("cone.blocks[{i}]");
        let bo = as_object(b, &field)?;
        let kind = required_at(bo, "type", &format!("{field}.type"))?
            .as_str()
            .ok_or_else(|| Error::invalid(format!("{field}.type"), "expected a string"))?;
        let block = match kind {
            "orthant" => ConeBlock::orthant(positive(required_at(bo, "dim", &format!("{field}.dim"))?, &format!("{field}.dim"))?)?,
            "soc" => ConeBlock::second_order(positive(required_at(bo, "dim", &format!("{field}.dim"))?, &format!("{field}.dim"))?)?,
            "psd" => ConeBlock::psd(positive(required_at(bo, "d", &format!("{field}.d"))?, &format!("{field}.d"))?)?,
            "polyhedral" => {
                let rows = int_matrix(required_at(bo, "M", &format!("{field}.M"))?, &format!("{field}.M"))?;
                ConeBlock::polyhedral(rows).map_err(|e| match e {
                    Error::NonPointedCone { rank, dim, .. } => Error::NonPointedCone { block: i, rank, dim },
                    other => other,
                })?
            }
            other => return Err(Error::invalid(format!("{field}.type"), format!("unknown cone type {other:?}"))),
        };
        out.push(block);
    }
    ConeSpec::new(out)
}

fn parse_rhs(v: &Value, m: usize) -> Result<RhsSet> {
    let obj = as_object(v, "rhs")?;
    let kind = required_at(obj, "type", "rhs.type")?
        .as_str()
        .ok_or_else(|| Error::invalid("rhs.type", "expected a string"))?;
    match kind {
        "box" => {
            let lower = int_vector(required_at(obj, "lower", "rhs.lower")?, "rhs.lower")?;
            let upper = int_vector(required_at(obj, "upper", "rhs.upper")?, "rhs.upper")?;
            if lower.len() != m {
                return Err(Error::dimension("rhs.lower", m, lower.len()));
            }
            if upper.len() != m {
                return Err(Error::dimension("rhs.upper", m, upper.len()));
            }
            RhsSet::new_box(lower, upper)
        }
        "list" => {
            let points = int_matrix(required_at(obj, "points", "rhs.points")?, "rhs.points")?;
            if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != m) {
                return Err(Error::dimension(format!("rhs.points[{i}]"), m, p.len()));
            }
            RhsSet::explicit(points)
        }
        other => Err(Error::invalid("rhs.type", format!("unknown rhs type {other:?}"))),
    }
}

fn parse_options(v: &Value, m: usize) -> Result<InstanceOptions> {
    let obj = as_object(v, "options")?;
    let engine = match obj.get("engine") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.parse()?),
        Some(_) => return Err(Error::invalid("options.engine", "expected \"f\" or \"g\"")),
    };
    let kbar = match obj.get("kbar") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let k = int(v, "options.kbar")?;
            if k < 0 {
                return Err(Error::invalid("options.kbar", "must be nonnegative"));
            }
            Some(k as u64)
        }
    };
    let dual_cert = match obj.get("dual_cert") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let arr = as_array(v, "options.dual_cert")?;
            if arr.len() != m {
                return Err(Error::dimension("options.dual_cert", m, arr.len()));
            }
            let vals = arr
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let field = format!("options.dual_cert[{i}]");
                    match x {
                        Value::String(s) => exact::parse_rational(s)
                            .ok_or_else(|| Error::invalid(field, format!("cannot parse rational {s:?}"))),
                        other => int(other, &field).map(exact::rat),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Some(vals)
        }
    };
    Ok(InstanceOptions { engine, kbar, dual_cert })
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    required_at(obj, key, key)
}

fn required_at<'a>(obj: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::invalid(field, "missing"))
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::invalid(field, "expected an object"))
}

fn as_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::invalid(field, "expected an array"))
}

fn int(v: &Value, field: &str) -> Result<i64> {
    let Value::Number(num) = v else {
        return Err(Error::invalid(field, "expected a number"));
    };
    let value = if let Some(i) = num.as_i64() {
        i
    } else {
        match num.as_f64() {
            Some(f) if f.fract() == 0.0 && f.abs() <= MAX_ENTRY as f64 => f as i64,
            _ => {
                return Err(Error::Integrality {
                    field: field.to_string(),
                    value: num.to_string(),
                })
            }
        }
    };
    if value.abs() > MAX_ENTRY {
        return Err(Error::invalid(field, "magnitude above 2^31"));
    }
    Ok(value)
}

fn positive(v: &Value, field: &str) -> Result<usize> {
    let x = int(v, field)?;
    if x < 1 {
        return Err(Error::invalid(field, "must be at least 1"));
    }
    Ok(x as usize)
}

fn int_vector(v: &Value, field: &str) -> Result<Vec<i64>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, x)| int(x, &format!("{field}[{i}]")))
        .collect()
}

fn int_matrix(v: &Value, field: &str) -> Result<Vec<Vec<i64>>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, r)| int_vector(r, &format!("{field}[{i}]")))
        .collect()
}
