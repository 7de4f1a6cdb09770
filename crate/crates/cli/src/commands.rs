//! The subcommands. Each one builds seeded inputs, runs a library pipeline
//! and returns its report as JSON together with the overall verdict.

use std::path::PathBuf;

use dimdrop_core::algebra::{AlgebraElement, BaseAlgebra};
use dimdrop_core::basic::{
    basic_map_eval, diagram_certificate, eta_iota_certificate, shear_top_edge_variation, BasicMapSpec,
};
use dimdrop_core::grid::GridPath;
use dimdrop_core::ktheory::{bezout, k1_class, k1_representative, K1Class};
use dimdrop_core::pipelines::{
    corollary36_complement, corollary36_fixture, lemma34_fixture, lemma34_pipeline, theorem39_fixture,
    theorem39_intertwiner, Correction, PartialIsometry,
};
use dimdrop_core::random::random_unitary_element;
use dimdrop_core::sequence::{ComposedMap, ElementaryMap};
use dimdrop_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{BaseArg, RunConfig};
use crate::fixtures::{
    element_from_json, element_to_json, read_fixture, write_fixture, ComplementFixture, ConjugationFixture,
    FixtureError, IntertwinerFixture,
};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Library(#[from] Error),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

pub type Outcome = Result<(Value, bool), CommandError>;

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

/// A random unitary of `M_amp(A)` times the class representative of `winding`.
pub fn seeded_unitary(
    rng: &mut ChaCha8Rng,
    base: BaseAlgebra,
    amp: usize,
    winding: i64,
) -> Result<AlgebraElement, Error> {
    let u = random_unitary_element(rng, base, amp)?;
    u.mul(&k1_representative(base, &K1Class { windings: vec![winding] }, amp)?)
}

fn windings(path: &GridPath) -> Result<Vec<i64>, Error> {
    path.samples().iter().map(|x| k1_class(x).map(|c| c.winding())).collect()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports are plain data")
}

pub fn verify_elementary(cfg: &RunConfig, n: usize, base: BaseArg, samples: usize) -> Outcome {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument(format!("need n ≥ 1 and samples ≥ 1 (got {n}, {samples})")).into());
    }
    let base = base.resolve(cfg.grid_g);
    let map = ElementaryMap::standard(n, cfg.grid_t)?;
    let mut rng = rng(cfg);
    let mut rows = Vec::with_capacity(samples);
    let mut pass = true;
    for s in 0..samples {
        let winding = if base.is_circle() { s as i64 % 7 - 3 } else { 0 };
        let u = seeded_unitary(&mut rng, base, 1, winding)?;
        let image = map.image(&u, cfg.tol)?;
        let start = image.first().distance(&u.tensor_identity(n));
        let end = image.last().distance(&u.pow(n as i64).pad_identity(n - 1));
        let unitarity = image.max_unitarity_defect();
        let expected = n as i64 * winding;
        let winding_ok = !base.is_circle() || windings(&image)?.iter().all(|&w| w == expected);
        let ok = start <= cfg.tol && end <= cfg.tol && unitarity <= cfg.tol && winding_ok;
        pass &= ok;
        rows.push(json!({
            "sample": s,
            "winding": winding,
            "start_defect": start,
            "end_defect": end,
            "unitarity_defect": unitarity,
            "max_step_jump": image.max_step_jump(),
            "image_winding": expected,
            "winding_constant": winding_ok,
            "pass": ok,
        }));
    }
    Ok((json!({ "samples": rows }), pass))
}

pub fn verify_basic(
    cfg: &RunConfig,
    k: usize,
    m: usize,
    n: usize,
    base: BaseArg,
    winding: i64,
    homotopy: bool,
) -> Outcome {
    let base = base.resolve(cfg.grid_g);
    let tol = cfg.tolerances();
    let spec = BasicMapSpec::standard(k, m, n, cfg.grid_t)?;
    let mut rng = rng(cfg);
    let u = seeded_unitary(&mut rng, base, k, winding)?;
    let probe = seeded_unitary(&mut rng, base, 1, winding)?;

    let element = basic_map_eval(&spec, &u, &tol)?;
    let expected = (m * n) as i64 * winding;
    let winding_ok = !base.is_circle() || windings(element.path())?.iter().all(|&w| w == expected);
    let unitarity = element.path().max_unitarity_defect();
    let composed = [
        ComposedMap::new(ElementaryMap::standard(m, cfg.grid_t)?, spec.w0().clone())?,
        ComposedMap::new(ElementaryMap::standard(n, cfg.grid_t)?, spec.w1().clone())?,
    ];
    let mut dual = Vec::new();
    for c in &composed {
        dual.push(json!({
            "inner_degree": c.inner().degree(),
            "outer_degree": c.outer().degree(),
            "dual_evaluation_defect": c.dual_evaluation_defect(&probe),
            "top_edge_variation": shear_top_edge_variation(c, &probe, cfg.grid_s)?,
        }));
    }
    let dual_ok = dual.iter().all(|d| {
        d["dual_evaluation_defect"].as_f64().unwrap_or(f64::INFINITY) <= cfg.tol
            && d["top_edge_variation"].as_f64().unwrap_or(f64::INFINITY) <= cfg.tol
    });
    let certificate =
        if homotopy && k == 1 { Some(eta_iota_certificate(&spec, &u, &tol, &cfg.resolution())?) } else { None };
    let pass = element.boundary_defect() <= cfg.boundary_tol
        && unitarity <= cfg.tol
        && winding_ok
        && dual_ok
        && certificate.as_ref().is_none_or(|c| c.pass && (!base.is_circle() || c.winding() == Some(expected)));
    let report = json!({
        "boundary_defect": element.boundary_defect(),
        "unitarity_defect": unitarity,
        "max_step_jump": element.path().max_step_jump(),
        "coprime": spec.coprime(),
        "image_winding": if base.is_circle() { Some(expected) } else { None },
        "winding_constant": winding_ok,
        "composed": dual,
        "certificate": certificate.map(|c| to_value(&c)),
    });
    Ok((report, pass))
}

pub fn certify_diagram(cfg: &RunConfig, k: usize, m: usize, n: usize, base: BaseArg, winding: i64) -> Outcome {
    let base = base.resolve(cfg.grid_g);
    bezout(m as i64, n as i64)?;
    let spec = BasicMapSpec::standard(k, m, n, cfg.grid_t)?;
    let mut rng = rng(cfg);
    let u = seeded_unitary(&mut rng, base, 1, winding)?;
    let v = seeded_unitary(&mut rng, base, k, -winding)?;
    let report = diagram_certificate(&spec, &u, &v, &cfg.tolerances(), &cfg.resolution())?;
    Ok((to_value(&report), report.pass))
}

pub struct FixtureFiles {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
pub fn demo_lemma34(
    cfg: &RunConfig,
    m: usize,
    n: usize,
    rank: usize,
    winding: i64,
    d: usize,
    base: BaseArg,
    files: &FixtureFiles,
) -> Outcome {
    let tol = cfg.tolerances();
    let fixture = match &files.input {
        Some(path) => read_fixture::<ConjugationFixture>(path)?,
        None => {
            let fx = lemma34_fixture(&mut rng(cfg), base.resolve(cfg.grid_g), d, rank, winding, m, n)?;
            ConjugationFixture {
                m: fx.m,
                n: fx.n,
                p: element_to_json(&fx.p),
                q: element_to_json(&fx.q),
                u0: element_to_json(&fx.u0),
                u1: element_to_json(&fx.u1),
            }
        }
    };
    if let Some(path) = &files.output {
        write_fixture(path, &fixture)?;
    }
    let (p, q) = (element_from_json(&fixture.p)?, element_from_json(&fixture.q)?);
    let (u0, u1) = (element_from_json(&fixture.u0)?, element_from_json(&fixture.u1)?);
    let (m, n) = (fixture.m, fixture.n);
    let run = |c| lemma34_pipeline(&p, &q, &u0, &u1, m, n, c, &tol, cfg.grid_t);
    let corrected = run(Correction::Enabled)?;
    let control = run(Correction::Disabled)?;
    let class = corrected.report.corner_classes[0];
    let element_ok = corrected.element.as_ref().is_some_and(|e| e.boundary_defect() <= cfg.boundary_tol);
    let control_ok = control.report.corrected_classes[0] == class && (class == 0) == control.element.is_some();
    let pass = corrected.report.pass && element_ok && control_ok;
    let report = json!({
        "corner_class": class,
        "result": to_value(&corrected.report),
        "negative_control": {
            "corner_class": control.report.corrected_classes[0],
            "valid_element": control.element.is_some(),
            "report": to_value(&control.report),
            "pass": control_ok,
        },
    });
    Ok((report, pass))
}

#[allow(clippy::too_many_arguments)]
pub fn demo_theorem39(
    cfg: &RunConfig,
    m: usize,
    n: usize,
    d: usize,
    p_rank: usize,
    q_rank: usize,
    base: BaseArg,
    files: &FixtureFiles,
) -> Outcome {
    let fixture = match &files.input {
        Some(path) => read_fixture::<IntertwinerFixture>(path)?,
        None => {
            let fx = theorem39_fixture(&mut rng(cfg), base.resolve(cfg.grid_g), d, p_rank, q_rank, m, n)?;
            IntertwinerFixture {
                m: fx.m,
                n: fx.n,
                p: element_to_json(&fx.p),
                q: element_to_json(&fx.q),
                v0: element_to_json(&fx.v0),
                v1: element_to_json(&fx.v1),
            }
        }
    };
    if let Some(path) = &files.output {
        write_fixture(path, &fixture)?;
    }
    let (p, q) = (element_from_json(&fixture.p)?, element_from_json(&fixture.q)?);
    let (v0, v1) = (element_from_json(&fixture.v0)?, element_from_json(&fixture.v1)?);
    let out = theorem39_intertwiner(&p, &q, &v0, &v1, fixture.m, fixture.n, &cfg.tolerances(), cfg.grid_t)?;
    Ok((to_value(&out.report), out.report.pass))
}

pub fn demo_corollary36(
    cfg: &RunConfig,
    d: usize,
    rank: usize,
    winding: i64,
    base: BaseArg,
    files: &FixtureFiles,
) -> Outcome {
    let fixture = match &files.input {
        Some(path) => read_fixture::<ComplementFixture>(path)?,
        None => {
            let (v, w) = corollary36_fixture(&mut rng(cfg), base.resolve(cfg.grid_g), d, rank, winding, cfg.tol)?;
            ComplementFixture { v: element_to_json(v.carrier()), w: element_to_json(&w) }
        }
    };
    if let Some(path) = &files.output {
        write_fixture(path, &fixture)?;
    }
    let v = PartialIsometry::new(element_from_json(&fixture.v)?, cfg.tol)?;
    let w = element_from_json(&fixture.w)?;
    let out = corollary36_complement(&v, &w, &cfg.tolerances(), cfg.grid_t)?;
    Ok((to_value(&out.report), out.report.pass))
}
