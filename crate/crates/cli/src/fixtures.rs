//! JSON layout of elements and paths, and the demo fixture files.
//!
//! An element is `{base: {kind, N, G}, amp, T, fibers}` where `fibers` holds
//! one row-major list of `[re, im]` pairs per base point. A path uses the
//! same object with `T` set and one such list of fibres per sample.

use std::path::Path;

use dimdrop_core::algebra::{AlgebraElement, BaseAlgebra};
use dimdrop_core::grid::GridPath;
use dimdrop_core::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("fixture shape: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseJson {
    pub kind: String,
    #[serde(rename = "N")]
    pub fiber: usize,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl From<BaseAlgebra> for BaseJson {
    fn from(base: BaseAlgebra) -> Self {
        match base {
            BaseAlgebra::Scalars => BaseJson { kind: "Scalars".into(), fiber: 1, grid: None },
            BaseAlgebra::Matrices(n) => BaseJson { kind: "Matrices".into(), fiber: n, grid: None },
            BaseAlgebra::CircleLoops(n, g) => BaseJson { kind: "CircleLoops".into(), fiber: n, grid: Some(g) },
        }
    }
}

impl TryFrom<&BaseJson> for BaseAlgebra {
    type Error = FixtureError;

    fn try_from(b: &BaseJson) -> Result<Self, FixtureError> {
        let base = match (b.kind.as_str(), b.grid) {
            ("Scalars", _) => BaseAlgebra::Scalars,
            ("Matrices", _) => BaseAlgebra::Matrices(b.fiber),
            ("CircleLoops", Some(g)) => BaseAlgebra::CircleLoops(b.fiber, g),
            _ => return Err(FixtureError::Shape(format!("unknown base {:?}", b.kind))),
        };
        base.validate().map_err(|e| FixtureError::Shape(e.to_string()))?;
        Ok(base)
    }
}

type Fibres = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub base: BaseJson,
    pub amp: usize,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    pub fibers: serde_json::Value,
}

fn encode(x: &AlgebraElement) -> Fibres {
    x.fibers().iter().map(|f| f.as_slice().iter().map(|c| [c.re, c.im]).collect()).collect()
}

fn decode(base: BaseAlgebra, amp: usize, fibres: Fibres) -> Result<AlgebraElement, FixtureError> {
    let matrices = fibres
        .into_iter()
        .map(|f| {
            ComplexMatrix::from_row_major(f.into_iter().map(|[re, im]| C64::new(re, im)).collect())
                .ok_or_else(|| FixtureError::Shape("fibre is not a square matrix".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    AlgebraElement::new(base, amp, matrices).map_err(|e| FixtureError::Shape(e.to_string()))
}

pub fn element_to_json(x: &AlgebraElement) -> ElementJson {
    ElementJson {
        base: x.base().into(),
        amp: x.amp(),
        resolution: None,
        fibers: serde_json::to_value(encode(x)).expect("plain numbers"),
    }
}

pub fn element_from_json(e: &ElementJson) -> Result<AlgebraElement, FixtureError> {
    if e.resolution.is_some() {
        return Err(FixtureError::Shape("expected an element, found a path".into()));
    }
    let base = BaseAlgebra::try_from(&e.base)?;
    decode(base, e.amp, serde_json::from_value(e.fibers.clone())?)
}

pub fn path_to_json(path: &GridPath) -> ElementJson {
    let first = path.first();
    let samples: Vec<Fibres> = path.samples().iter().map(encode).collect();
    ElementJson {
        base: first.base().into(),
        amp: first.amp(),
        resolution: Some(path.resolution()),
        fibers: serde_json::to_value(samples).expect("plain numbers"),
    }
}

pub fn path_from_json(e: &ElementJson) -> Result<GridPath, FixtureError> {
    let t = e.resolution.ok_or_else(|| FixtureError::Shape("path without T".into()))?;
    let base = BaseAlgebra::try_from(&e.base)?;
    let samples: Vec<Fibres> = serde_json::from_value(e.fibers.clone())?;
    if samples.len() != t + 1 {
        return Err(FixtureError::Shape(format!("T = {t} but {} samples", samples.len())));
    }
    let samples = samples.into_iter().map(|f| decode(base, e.amp, f)).collect::<Result<Vec<_>, _>>()?;
    GridPath::new(samples).map_err(|e| FixtureError::Shape(e.to_string()))
}

/// Inputs of the unitary-equivalence demo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjugationFixture {
    pub m: usize,
    pub n: usize,
    pub p: ElementJson,
    pub q: ElementJson,
    pub u0: ElementJson,
    pub u1: ElementJson,
}

/// Inputs of the intertwiner demo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntertwinerFixture {
    pub m: usize,
    pub n: usize,
    pub p: ElementJson,
    pub q: ElementJson,
    pub v0: ElementJson,
    pub v1: ElementJson,
}

/// Inputs of the complement demo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplementFixture {
    pub v: ElementJson,
    pub w: ElementJson,
}

pub fn read_fixture<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FixtureError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_fixture<T: Serialize>(path: &Path, fixture: &T) -> Result<(), FixtureError> {
    let mut text = serde_json::to_string_pretty(fixture)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
