//! Numerical certificates for sampled one- and two-parameter families.
//!
//! A family is streamed one `s`-slice at a time, so only the current and
//! previous slices are ever held in memory. Matrix defects are Frobenius
//! norms, which bound the operator norm from above.

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::{Resolution, Tolerances};
use crate::error::Result;
use crate::grid::GridPath;
use crate::sequence::PathSequence;

/// A single `s`-slice of a family: a sampled path in `t`.
pub trait Slice {
    fn unitarity_defect(&self) -> f64;
    fn step_jump_t(&self) -> f64;
    /// Largest sample-wise distance to a slice of the same shape.
    fn slice_distance(&self, other: &Self) -> f64;
}

impl Slice for GridPath {
    fn unitarity_defect(&self) -> f64 {
        self.max_unitarity_defect()
    }

    fn step_jump_t(&self) -> f64 {
        self.max_step_jump()
    }

    fn slice_distance(&self, other: &Self) -> f64 {
        self.distance(other)
    }
}

impl Slice for PathSequence {
    fn unitarity_defect(&self) -> f64 {
        self.max_unitarity_defect()
    }

    fn step_jump_t(&self) -> f64 {
        self.max_step_jump()
    }

    fn slice_distance(&self, other: &Self) -> f64 {
        self.distance(other)
    }
}

/// Per-slice validation result.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceVerdict {
    pub boundary_defect: f64,
    pub valid: bool,
    /// Fixed-`t` determinant windings, for circle bases.
    pub windings: Option<Vec<i64>>,
}

impl SliceVerdict {
    pub fn valid(boundary_defect: f64, limit: f64) -> Self {
        SliceVerdict { boundary_defect, valid: boundary_defect <= limit, windings: None }
    }
}

/// Thresholds a stage is judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Limits {
    pub unitarity: f64,
    pub boundary: f64,
    pub endpoint: f64,
    pub step_budget: f64,
}

impl Limits {
    pub fn new(tol: &Tolerances, res: &Resolution) -> Self {
        Limits { unitarity: tol.tol, boundary: tol.boundary_tol, endpoint: tol.tol, step_budget: res.step_budget }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageReport {
    pub name: String,
    pub max_unitarity_defect: f64,
    pub max_boundary_defect: f64,
    pub max_step_jump_s: f64,
    pub max_step_jump_t: f64,
    pub endpoints_ok: bool,
    pub slices_valid: bool,
    /// Largest distance of the first and last slices from their targets.
    pub endpoint_defect: f64,
    /// Common fixed-`t` winding, when every sample of every slice agrees.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub winding: Option<i64>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub winding_constant: Option<bool>,
    pub pass: bool,
}

impl StageReport {
    fn judge(&mut self, limits: &Limits) {
        self.pass = self.max_unitarity_defect <= limits.unitarity
            && self.max_boundary_defect <= limits.boundary
            && self.max_step_jump_s <= limits.step_budget
            && self.max_step_jump_t <= limits.step_budget
            && self.endpoints_ok
            && self.slices_valid
            && self.winding_constant != Some(false);
    }

    /// A stage that consists of a single identity check.
    pub fn check(name: &str, defect: f64, limit: f64) -> Self {
        StageReport {
            name: String::from(name),
            max_unitarity_defect: 0.0,
            max_boundary_defect: 0.0,
            max_step_jump_s: 0.0,
            max_step_jump_t: 0.0,
            endpoints_ok: defect <= limit,
            slices_valid: true,
            endpoint_defect: defect,
            winding: None,
            winding_constant: None,
            pass: defect <= limit,
        }
    }
}

/// Expected first and last slices of a stage.
pub struct Endpoints<'a, S> {
    pub start: Option<&'a S>,
    pub end: Option<&'a S>,
}

impl<S> Endpoints<'_, S> {
    pub fn none() -> Self {
        Endpoints { start: None, end: None }
    }
}

/// Sweeps `s = 0, 1/S, …, 1`, building and checking one slice at a time.
///
/// Returns the report together with the first and last slices, so that
/// consecutive stages can be chained.
pub fn run_stage<S: Slice + Clone>(
    name: &str,
    grid_s: usize,
    mut slice_at: impl FnMut(f64) -> Result<S>,
    mut validate: impl FnMut(&S) -> Result<SliceVerdict>,
    targets: Endpoints<'_, S>,
    limits: &Limits,
) -> Result<(StageReport, S, S)> {
    let grid_s = grid_s.max(1);
    let mut report = StageReport {
        name: String::from(name),
        max_unitarity_defect: 0.0,
        max_boundary_defect: 0.0,
        max_step_jump_s: 0.0,
        max_step_jump_t: 0.0,
        endpoints_ok: true,
        slices_valid: true,
        endpoint_defect: 0.0,
        winding: None,
        winding_constant: None,
        pass: false,
    };
    let mut first: Option<S> = None;
    let mut prev: Option<S> = None;
    let mut common_winding: Option<Option<i64>> = None;
    for k in 0..=grid_s {
        let s = k as f64 / grid_s as f64;
        let slice = slice_at(s)?;
        report.max_unitarity_defect = report.max_unitarity_defect.max(slice.unitarity_defect());
        report.max_step_jump_t = report.max_step_jump_t.max(slice.step_jump_t());
        let verdict = validate(&slice)?;
        report.max_boundary_defect = report.max_boundary_defect.max(verdict.boundary_defect);
        report.slices_valid &= verdict.valid;
        if let Some(ws) = verdict.windings {
            for w in ws {
                common_winding = Some(match common_winding {
                    None => Some(w),
                    Some(Some(c)) if c == w => Some(c),
                    Some(_) => None,
                });
            }
        }
        if let Some(p) = &prev {
            report.max_step_jump_s = report.max_step_jump_s.max(slice.slice_distance(p));
        }
        if k == 0 {
            if let Some(target) = targets.start {
                report.endpoint_defect = report.endpoint_defect.max(slice.slice_distance(target));
            }
        }
        if k == grid_s {
            if let Some(target) = targets.end {
                report.endpoint_defect = report.endpoint_defect.max(slice.slice_distance(target));
            }
        }
        if k == 0 {
            first = Some(slice.clone());
        }
        prev = Some(slice);
    }
    let first = first.expect("at least one slice");
    let last = prev.expect("at least one slice");
    if let Some(w) = common_winding {
        report.winding = w;
        report.winding_constant = Some(w.is_some());
    }
    report.endpoints_ok = report.endpoint_defect <= limits.endpoint;
    report.judge(limits);
    Ok((report, first, last))
}

/// A bundle of stage reports with an overall verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomotopyCertificate {
    pub name: String,
    pub stages: Vec<StageReport>,
    pub pass: bool,
}

impl HomotopyCertificate {
    pub fn new(name: &str, stages: Vec<StageReport>) -> Self {
        let mut cert = HomotopyCertificate { name: String::from(name), stages, pass: false };
        cert.pass = cert.stages.iter().all(|s| s.pass) && cert.winding_consistent();
        cert
    }

    /// Whether all stages that carry a winding agree on it.
    pub fn winding_consistent(&self) -> bool {
        let mut seen: Option<i64> = None;
        for s in &self.stages {
            match (s.winding_constant, s.winding) {
                (Some(false), _) => return false,
                (Some(true), Some(w)) => match seen {
                    None => seen = Some(w),
                    Some(c) if c != w => return false,
                    _ => {}
                },
                _ => {}
            }
        }
        true
    }

    /// The common winding of all stages, if any stage carries one.
    pub fn winding(&self) -> Option<i64> {
        if !self.winding_consistent() {
            return None;
        }
        self.stages.iter().find_map(|s| s.winding)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.stages.iter().map(|s| s.max_unitarity_defect).fold(0.0, f64::max)
    }

    pub fn max_boundary_defect(&self) -> f64 {
        self.stages.iter().map(|s| s.max_boundary_defect).fold(0.0, f64::max)
    }

    pub fn max_endpoint_defect(&self) -> f64 {
        self.stages.iter().map(|s| s.endpoint_defect).fold(0.0, f64::max)
    }

    pub fn max_step_jump(&self) -> f64 {
        self.stages.iter().map(|s| s.max_step_jump_s.max(s.max_step_jump_t)).fold(0.0, f64::max)
    }

    /// Prefixes every stage name, for embedding in a larger report.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for s in &mut self.stages {
            let mut name = String::from(prefix);
            name.push('/');
            name.push_str(&s.name);
            s.name = name;
        }
        self
    }
}
