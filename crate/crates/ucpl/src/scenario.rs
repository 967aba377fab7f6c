//! Scenario files: JSON descriptions of either a Hilbert model (named
//! complex matrices, entries as [re, im] pairs in row-major order) or an
//! abstract logic (element names, orthocomplement map, orthogonality pair
//! list, partial sum table, optional named states).
//!
//! Numeric entries may be given as JSON numbers or as strings; strings are
//! parsed exactly ("0.25", "-1/3"), which keeps fixtures bit-stable and
//! abstract states exactly additive.

use crate::catalog;
use crate::exact::{self, Q};
use crate::hilbert::{DensityState, HilbertScenario, Projection, VALIDATION_TOL};
use crate::logic::{LogicError, OrthoLogic};
use crate::matrix::{self, CMat};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown scenario `{0}` (not a readable file or catalog name)")]
    UnknownTarget(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A loaded, validated scenario.
#[derive(Clone, Debug)]
pub enum Scenario {
    Hilbert(HilbertScenario),
    Abstract(AbstractScenario),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Hilbert(_) => "hilbert",
            Scenario::Abstract(_) => "abstract",
        }
    }
}

/// An abstract logic with named raw states (values per element index,
/// exact). States are canonicalized against the polytope when used.
#[derive(Clone, Debug)]
pub struct AbstractScenario {
    pub logic: OrthoLogic,
    pub states: Vec<(String, Vec<Q>)>,
}

impl AbstractScenario {
    pub fn from_f64_states(logic: OrthoLogic, states: Vec<(String, Vec<f64>)>) -> Self {
        let states = states
            .into_iter()
            .map(|(name, vals)| {
                let exact_vals = vals
                    .into_iter()
                    .map(|v| exact::q_from_f64(v).expect("finite state value"))
                    .collect();
                (name, exact_vals)
            })
            .collect();
        AbstractScenario { logic, states }
    }

    pub fn state_values(&self, name: &str) -> Option<&Vec<Q>> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumOrText {
    Num(f64),
    Text(String),
}

impl NumOrText {
    fn as_f64(&self) -> Result<f64, ScenarioError> {
        match self {
            NumOrText::Num(x) => Ok(*x),
            NumOrText::Text(s) => f64::from_str(s.trim())
                .map_err(|_| ScenarioError::Invalid(format!("bad numeric entry `{s}`"))),
        }
    }

    fn as_exact(&self) -> Result<Q, ScenarioError> {
        match self {
            NumOrText::Num(x) => exact::q_from_f64(*x)
                .ok_or_else(|| ScenarioError::Invalid(format!("non-finite value {x}"))),
            NumOrText::Text(s) => parse_exact(s.trim())
                .ok_or_else(|| ScenarioError::Invalid(format!("bad exact value `{s}`"))),
        }
    }
}

/// Parses "p/q", an integer, or a finite decimal, exactly.
fn parse_exact(s: &str) -> Option<Q> {
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i32, rest),
        None => (1, s),
    };
    let body = body.strip_prefix('+').unwrap_or(body);
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numerator = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let denominator = BigInt::from(10u32).pow(frac_part.len() as u32);
    let q = Q::new(numerator, denominator);
    Some(if sign < 0 { -q } else { q })
}

fn format_exact(q: &Q) -> NumOrText {
    if let Some(x) = q.to_f64() {
        if exact::q_from_f64(x).as_ref() == Some(q) {
            return NumOrText::Num(x);
        }
    }
    NumOrText::Text(q.to_string())
}

type MatrixEntries = Vec<Vec<[NumOrText; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScenarioFile {
    #[serde(rename = "hilbert")]
    Hilbert(HilbertFile),
    #[serde(rename = "abstract")]
    Abstract(AbstractFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HilbertFile {
    pub dim: usize,
    #[serde(default)]
    pub projections: BTreeMap<String, MatrixEntries>,
    #[serde(default)]
    pub states: BTreeMap<String, MatrixEntries>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbstractFile {
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub ocomp: BTreeMap<String, String>,
    pub orth: Vec<[String; 2]>,
    pub sum: Vec<[String; 3]>,
    #[serde(default)]
    pub states: BTreeMap<String, BTreeMap<String, NumOrText>>,
}

fn parse_matrix(name: &str, dim: usize, entries: &MatrixEntries) -> Result<CMat, ScenarioError> {
    if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
        return Err(ScenarioError::Invalid(format!(
            "matrix `{name}` is not {dim}x{dim}"
        )));
    }
    let mut m = matrix::zeros(dim);
    for (i, row) in entries.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(cell[0].as_f64()?, cell[1].as_f64()?);
        }
    }
    Ok(m)
}

fn matrix_entries(m: &CMat) -> MatrixEntries {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [NumOrText::Num(m[(i, j)].re), NumOrText::Num(m[(i, j)].im)])
                .collect()
        })
        .collect()
}

/// Validates a parsed file into a runtime scenario.
pub fn from_file(file: &ScenarioFile) -> Result<Scenario, ScenarioError> {
    match file {
        ScenarioFile::Hilbert(h) => {
            if h.dim == 0 {
                return Err(ScenarioError::Invalid("dim must be positive".to_string()));
            }
            let mut projections = Vec::new();
            for (name, entries) in &h.projections {
                let m = parse_matrix(name, h.dim, entries)?;
                let p = Projection::new(m, VALIDATION_TOL).map_err(|e| {
                    ScenarioError::Validation(format!("projection `{name}`: {e}"))
                })?;
                projections.push((name.clone(), p));
            }
            let mut states = Vec::new();
            for (name, entries) in &h.states {
                let m = parse_matrix(name, h.dim, entries)?;
                let s = DensityState::new(m, VALIDATION_TOL)
                    .map_err(|e| ScenarioError::Validation(format!("state `{name}`: {e}")))?;
                states.push((name.clone(), s));
            }
            let scen = HilbertScenario::new(h.dim, projections, states)
                .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            Ok(Scenario::Hilbert(scen))
        }
        ScenarioFile::Abstract(a) => {
            let index = |name: &str| -> Result<usize, ScenarioError> {
                a.elements
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| ScenarioError::Invalid(format!("unknown element `{name}`")))
            };
            let zero = index(&a.zero)?;
            let one = index(&a.one)?;
            let mut ocomp = vec![usize::MAX; a.elements.len()];
            for (from, to) in &a.ocomp {
                ocomp[index(from)?] = index(to)?;
            }
            if let Some(pos) = ocomp.iter().position(|&c| c == usize::MAX) {
                return Err(ScenarioError::Invalid(format!(
                    "ocomp is missing an entry for `{}`",
                    a.elements[pos]
                )));
            }
            let mut orth = Vec::new();
            for [x, y] in &a.orth {
                orth.push((index(x)?, index(y)?));
            }
            let mut sums = Vec::new();
            for [x, y, s] in &a.sum {
                sums.push(((index(x)?, index(y)?), index(s)?));
            }
            let logic =
                OrthoLogic::from_tables(a.elements.clone(), zero, one, ocomp, orth, sums)?;
            let mut states = Vec::new();
            for (name, mapping) in &a.states {
                let mut values = vec![Q::zero(); logic.len()];
                let mut assigned = vec![false; logic.len()];
                for (elem, value) in mapping {
                    let i = index(elem)?;
                    values[i] = value.as_exact()?;
                    assigned[i] = true;
                }
                if let Some(pos) = assigned.iter().position(|&x| !x) {
                    return Err(ScenarioError::Invalid(format!(
                        "state `{name}` is missing a value for `{}`",
                        logic.names()[pos]
                    )));
                }
                states.push((name.clone(), values));
            }
            Ok(Scenario::Abstract(AbstractScenario { logic, states }))
        }
    }
}

/// Re-encodes a runtime scenario; parse∘serialize is semantically the
/// identity (same matrices, same tables).
pub fn to_file(scenario: &Scenario) -> ScenarioFile {
    match scenario {
        Scenario::Hilbert(h) => ScenarioFile::Hilbert(HilbertFile {
            dim: h.dim(),
            projections: h
                .projections()
                .iter()
                .map(|(n, p)| (n.clone(), matrix_entries(p.matrix())))
                .collect(),
            states: h
                .states()
                .iter()
                .map(|(n, s)| (n.clone(), matrix_entries(s.matrix())))
                .collect(),
        }),
        Scenario::Abstract(a) => {
            let l = &a.logic;
            ScenarioFile::Abstract(AbstractFile {
                elements: l.names().to_vec(),
                zero: l.name(l.zero()).to_string(),
                one: l.name(l.one()).to_string(),
                ocomp: l
                    .elements()
                    .map(|e| (l.name(e).to_string(), l.name(l.ocomp(e)).to_string()))
                    .collect(),
                orth: l
                    .orth_pairs()
                    .map(|(x, y)| [l.name(x).to_string(), l.name(y).to_string()])
                    .collect(),
                sum: l
                    .sum_entries()
                    .map(|(x, y, s)| {
                        [l.name(x).to_string(), l.name(y).to_string(), l.name(s).to_string()]
                    })
                    .collect(),
                states: a
                    .states
                    .iter()
                    .map(|(name, values)| {
                        let mapping = l
                            .elements()
                            .map(|e| (l.name(e).to_string(), format_exact(&values[e.index()])))
                            .collect();
                        (name.clone(), mapping)
                    })
                    .collect(),
            })
        }
    }
}

pub fn load_path(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: ScenarioFile = serde_json::from_str(&text)?;
    from_file(&file)
}

/// Resolves a CLI target: an existing file path, else a catalog name.
pub fn resolve(target: &str) -> Result<Scenario, ScenarioError> {
    let path = Path::new(target);
    if path.exists() {
        return load_path(path);
    }
    catalog::by_name(target).ok_or_else(|| ScenarioError::UnknownTarget(target.to_string()))
}
