//! The acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the
//! process fails if any criterion does.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use dimdrop_core::algebra::{AlgebraElement, BaseAlgebra};
use dimdrop_core::basic::{
    basic_map_eval, diagram_certificate, eta_iota_certificate, shear_top_edge_variation, BasicMapSpec,
};
use dimdrop_core::certificate::{HomotopyCertificate, Limits};
use dimdrop_core::grid::dd_check;
use dimdrop_core::homotopy::elementary_homotopy;
use dimdrop_core::ktheory::{det_winding, k1_class, k1_representative, K1Class};
use dimdrop_core::linalg::hermitian_eigen;
use dimdrop_core::pipelines::{
    lemma34_fixture, lemma34_pipeline, theorem39_fixture, theorem39_intertwiner, Correction,
};
use dimdrop_core::random::random_unitary_element;
use dimdrop_core::sequence::{ComposedMap, ElementaryMap, PathSequence};
use dimdrop_core::{ComplexMatrix, Resolution, Tolerances, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed <= Duration::from_secs(limit_s) {
        Ok(())
    } else {
        Err(format!("took {elapsed:.1?}, limit {limit_s} s"))
    }
}

fn loop_with_winding(rng: &mut ChaCha8Rng, base: BaseAlgebra, amp: usize, c: i64) -> AlgebraElement {
    let u = random_unitary_element(rng, base, amp).unwrap();
    u.mul(&k1_representative(base, &K1Class { windings: vec![c] }, amp).unwrap()).unwrap()
}

fn circle_winding(x: &AlgebraElement) -> i64 {
    k1_class(x).unwrap().winding()
}

/// Windings gathered from circle certificates, for the invariance check.
#[derive(Default)]
struct Windings(Vec<(String, Option<bool>, Option<i64>)>);

impl Windings {
    fn record(&mut self, label: &str, cert: &HomotopyCertificate) {
        for s in &cert.stages {
            if s.winding_constant.is_some() {
                self.0.push((format!("{label}/{}", s.name), s.winding_constant, s.winding));
            }
        }
    }
}

fn endpoints() -> Verdict {
    let start = Instant::now();
    let res = 256;
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5] {
        let map = ElementaryMap::standard(n, res).unwrap();
        for base in [BaseAlgebra::Scalars, BaseAlgebra::Matrices(2), BaseAlgebra::CircleLoops(1, 256)] {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..10 {
                let u = random_unitary_element(&mut rng, base, 1).unwrap();
                let w0 = map.eval_index(&u, 0, 1e-9).unwrap();
                let w1 = map.eval_index(&u, res, 1e-9).unwrap();
                worst = worst.max(w0.distance(&u.tensor_identity(n)));
                worst = worst.max(w1.distance(&u.pow(n as i64).pad_identity(n - 1)));
            }
        }
    }
    within(start.elapsed(), 10)?;
    ensure(worst <= 1e-12, format!("max endpoint defect {worst:.2e} in {:.2?}", start.elapsed()))
}

fn elementary_certificate(windings: &mut Windings) -> Verdict {
    let start = Instant::now();
    let res = 256;
    let mut notes = Vec::new();
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = loop_with_winding(&mut rng, BaseAlgebra::CircleLoops(1, 64), 1, 1);
    for n in [2usize, 3] {
        let e = PathSequence::standard(n, res).unwrap();
        let phases: Vec<C64> = (0..n).map(|j| C64::from_polar(1.0, 0.7 * (j as f64 + 1.0) - 0.3 * n as f64)).collect();
        let f = e.conjugated(&ComplexMatrix::diag(&phases));
        let family = elementary_homotopy(&e, &f, 1e-9, 1e-6).map_err(|err| err.to_string())?;
        let budget = 16.0 * e.max_step_jump();
        let limits = Limits { unitarity: 1e-8, boundary: 1e-8, endpoint: 1e-10, step_budget: budget };
        let cert = family.certificate(32, &limits).map_err(|err| err.to_string())?;
        ok &= cert.pass && cert.max_boundary_defect() <= 1e-8 && cert.max_endpoint_defect() <= 1e-10;
        ok &= family.slice(0.0).distance(&e) <= 1e-10 && family.slice(1.0).distance(&f) <= 1e-10;

        // Push the family through the elementary map at a winding-one loop.
        let mut seen = Vec::new();
        for k in 0..=32 {
            let image = ElementaryMap::new(family.slice(k as f64 / 32.0)).image(&u, 1e-9).unwrap();
            seen.extend(image.samples().iter().map(circle_winding));
        }
        seen.dedup();
        let constant = seen == [n as i64];
        windings.0.push((format!("elementary n={n}"), Some(constant), seen.first().copied()));
        ok &= constant;
        notes.push(format!(
            "n={n}: law {:.1e}, endpoints {:.1e}, jump {:.3}/{budget:.3}",
            cert.max_boundary_defect(),
            cert.max_endpoint_defect(),
            cert.max_step_jump()
        ));
    }
    within(start.elapsed(), 30)?;
    ensure(ok, format!("{} in {:.2?}", notes.join("; "), start.elapsed()))
}

fn dual_evaluation() -> Verdict {
    let res = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut dual, mut edge): (f64, f64) = (0.0, 0.0);
    for (m, n) in [(2, 3), (3, 4)] {
        let composed =
            ComposedMap::new(ElementaryMap::standard(m, res).unwrap(), ElementaryMap::standard(n, res).unwrap())
                .unwrap();
        for base in [BaseAlgebra::Matrices(2), BaseAlgebra::CircleLoops(1, 64)] {
            let u = loop_with_winding(&mut rng, base, 1, if base.is_circle() { 1 } else { 0 });
            dual = dual.max(composed.dual_evaluation_defect(&u));
            edge = edge.max(shear_top_edge_variation(&composed, &u, 16).map_err(|e| e.to_string())?);
        }
    }
    ensure(dual <= 1e-9 && edge <= 1e-10, format!("dual evaluation {dual:.2e}, top edge {edge:.2e}"))
}

fn embedding_homotopy(windings: &mut Windings) -> Verdict {
    let start = Instant::now();
    let base = BaseAlgebra::CircleLoops(1, 256);
    let u = AlgebraElement::from_fn(base, 1, |z| ComplexMatrix::scalar(1, z)).unwrap();
    let tol = Tolerances::default();
    let spec = BasicMapSpec::standard(1, 2, 3, 256).unwrap();
    let eta = basic_map_eval(&spec, &u, &tol).map_err(|e| e.to_string())?;
    let per_t = eta.path().samples().iter().all(|x| circle_winding(x) == 6);
    let cert = eta_iota_certificate(&spec, &u, &tol, &Resolution::default()).map_err(|e| e.to_string())?;
    windings.record("eta-iota", &cert);
    let valid = cert.stages.iter().all(|s| s.slices_valid);
    let ok = cert.pass && valid && per_t && cert.max_unitarity_defect() <= 1e-8 && cert.winding() == Some(6);
    ensure(
        ok,
        format!(
            "unitarity {:.1e}, slices valid {valid}, winding {:?}, per-t winding 6: {per_t}, {:.1?}",
            cert.max_unitarity_defect(),
            cert.winding(),
            start.elapsed()
        ),
    )
}

fn diagram(windings: &mut Windings) -> Verdict {
    let start = Instant::now();
    let spec = BasicMapSpec::standard(2, 2, 3, 256).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for base in [BaseAlgebra::Scalars, BaseAlgebra::CircleLoops(1, 128)] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = if base.is_circle() { 1 } else { 0 };
        let u = loop_with_winding(&mut rng, base, 1, c);
        let v = loop_with_winding(&mut rng, base, 2, -c);
        let report = diagram_certificate(&spec, &u, &v, &Tolerances::default(), &Resolution::default())
            .map_err(|e| e.to_string())?;
        let defect = [&report.upper, &report.lower]
            .iter()
            .map(|c| c.max_unitarity_defect().max(c.max_boundary_defect()).max(c.max_endpoint_defect()))
            .fold(0.0, f64::max);
        if base.is_circle() {
            windings.record("diagram/upper", &report.upper);
            windings.record("diagram/lower", &report.lower);
        }
        ok &= report.pass && defect <= 1e-7;
        notes.push(format!("{base}: pass {} defect {defect:.1e}", report.pass));
    }
    within(start.elapsed(), 300)?;
    ensure(ok, format!("{} in {:.1?}", notes.join("; "), start.elapsed()))
}

/// Determinant by Gaussian elimination with partial pivoting.
fn lu_determinant(m: &ComplexMatrix) -> C64 {
    let d = m.dim();
    let mut a: Vec<C64> = m.as_slice().to_vec();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| a[i * d + col].norm().total_cmp(&a[j * d + col].norm())).unwrap();
        if pivot != col {
            for k in 0..d {
                a.swap(col * d + k, pivot * d + k);
            }
            det = -det;
        }
        let p = a[col * d + col];
        det *= p;
        for row in col + 1..d {
            let factor = a[row * d + col] / p;
            for k in col..d {
                let sub = factor * a[col * d + k];
                a[row * d + k] -= sub;
            }
        }
    }
    det
}

fn phase_integration(samples: &[ComplexMatrix]) -> i64 {
    let dets: Vec<C64> = samples.iter().map(lu_determinant).collect();
    let mut total = 0.0;
    for i in 0..dets.len() {
        let (a, b) = (dets[i], dets[(i + 1) % dets.len()]);
        let ratio = b / a;
        total += ratio.im.atan2(ratio.re);
    }
    (total / (2.0 * PI)).round() as i64
}

fn winding_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = Vec::new();
    for i in 0..20 {
        let c = i as i64 % 7 - 3;
        let base = BaseAlgebra::CircleLoops(1 + i % 3, 256);
        let u = loop_with_winding(&mut rng, base, 1 + i % 2, c);
        let (library, oracle) = (det_winding(u.fibers()).map_err(|e| e.to_string())?, phase_integration(u.fibers()));
        if library != c || oracle != c {
            mismatches.push(format!("loop {i}: expected {c}, library {library}, oracle {oracle}"));
        }
    }
    ensure(
        mismatches.is_empty(),
        if mismatches.is_empty() { "20/20 loops agree".into() } else { mismatches.join("; ") },
    )
}

fn conjugation_demo() -> Verdict {
    let tol = Tolerances::default();
    let base = BaseAlgebra::CircleLoops(1, 256);
    let fx = lemma34_fixture(&mut ChaCha8Rng::seed_from_u64(0), base, 4, 2, 1, 2, 3).map_err(|e| e.to_string())?;
    let run = |c| lemma34_pipeline(&fx.p, &fx.q, &fx.u0, &fx.u1, 2, 3, c, &tol, 256).map_err(|e| e.to_string());
    let corrected = run(Correction::Enabled)?;
    let control = run(Correction::Disabled)?;
    let Some(element) = corrected.element else {
        return Err(format!("no element: {:?}", corrected.report.failure));
    };
    let checked = dd_check(element.path().clone(), 2, 3, 1e-10).is_ok();
    let (big_p, big_q) = (fx.p.tensor_identity(6), fx.q.tensor_identity(6));
    let conjugation = element
        .path()
        .samples()
        .iter()
        .map(|x| x.mul(&big_p).unwrap().mul(&x.adjoint()).unwrap().distance(&big_q))
        .fold(0.0, f64::max);
    let endpoint = corrected.report.endpoint_defect.unwrap_or(f64::INFINITY);
    let control_class = control.report.corrected_classes[0];
    let ok = checked && conjugation <= 1e-8 && endpoint <= 1e-10 && control_class == 1 && control.element.is_none();
    ensure(
        ok,
        format!(
            "dd_check {checked}, conjugation {conjugation:.1e}, endpoints {endpoint:.1e}, \
             control class {control_class} with element {}",
            control.element.is_some()
        ),
    )
}

fn intertwiner_demo() -> Verdict {
    let tol = Tolerances::default();
    let fx = theorem39_fixture(&mut ChaCha8Rng::seed_from_u64(0), BaseAlgebra::Matrices(1), 4, 1, 3, 2, 3)
        .map_err(|e| e.to_string())?;
    let out = theorem39_intertwiner(&fx.p, &fx.q, &fx.v0, &fx.v1, 2, 3, &tol, 256).map_err(|e| e.to_string())?;
    let (big_p, big_q) = (fx.p.tensor_identity(6), fx.q.tensor_identity(6));
    let mut isometry: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for x in out.element.path().samples() {
        isometry = isometry.max(x.adjoint().mul(x).unwrap().distance(&big_p));
        let gap = big_q.sub(&x.mul(&x.adjoint()).unwrap()).unwrap();
        for f in gap.fibers() {
            margin = margin.min(hermitian_eigen(f).values.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    ensure(isometry <= 1e-8 && margin >= -1e-8, format!("isometry {isometry:.1e}, min eigenvalue {margin:.1e}"))
}

fn winding_invariance(windings: &Windings) -> Verdict {
    let broken: Vec<&str> =
        windings.0.iter().filter(|(_, c, w)| *c != Some(true) || w.is_none()).map(|(l, _, _)| l.as_str()).collect();
    let detail = windings.0.iter().map(|(l, _, w)| format!("{l}={}", w.unwrap_or(i64::MIN))).collect::<Vec<_>>();
    ensure(!windings.0.is_empty() && broken.is_empty(), format!("{} (broken: {broken:?})", detail.join(", ")))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"seed": 17, "G": 64, "T": 64}"#).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for args in [
        vec!["verify-elementary", "--n", "3", "--base", "circle:1"],
        vec!["demo-lemma34"],
        vec!["demo-theorem39"],
        vec!["demo-corollary36", "--format", "csv"],
    ] {
        let mut reports = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{}-{run}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_dimdrop"))
                .args(&args)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args[0]));
            }
            reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if reports[0] != reports[1] {
            return Err(format!("{} reports differ", args[0]));
        }
        compared += 1;
    }
    Ok(format!("{compared} commands byte-identical across reruns"))
}

fn main() {
    let mut windings = Windings::default();
    let results: Vec<(&str, Verdict)> = vec![
        ("elementary endpoints", endpoints()),
        ("elementary homotopy certificate", elementary_certificate(&mut windings)),
        ("dual evaluation", dual_evaluation()),
        ("basic map vs unital embedding", embedding_homotopy(&mut windings)),
        ("amplification diagram", diagram(&mut windings)),
        ("winding oracle", winding_oracle()),
        ("unitary equivalence demo", conjugation_demo()),
        ("intertwiner demo", intertwiner_demo()),
        ("winding invariance", winding_invariance(&windings)),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name}: {detail}", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
