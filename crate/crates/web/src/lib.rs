//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string;
//! failures come back as `{"error": "..."}` so the page never has to catch.
//! Drawing coordinates are the orthogonal projection of a slice onto the
//! plane through `o` perpendicular to `o`, which is the same plane for every
//! Reeb vector on the slice, so pictures at different `xi` are comparable.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use volmin::cone::{CalabiYauData, MomentCone};
use volmin::functionals::{futaki, Functional};
use volmin::io::{parse_cone, parse_decomposition};
use volmin::num::{fmt_q, rationalize, Scalar, Q};
use volmin::optimizer::{check_minkowski_exact, minimize, MinimizationConfig};
use volmin::oracle::slice_box;
use volmin::polytope::{Decomposition, SlicePolytope};

const PRESETS: &[(&str, &str, Option<&str>)] = &[
    ("conifold, two homothetic pieces", include_str!("../../../data/conifold.json"), Some(include_str!("../../../data/conifold_split_critical.json"))),
    ("conifold, pieces based at (3,1,1)", include_str!("../../../data/conifold.json"), Some(include_str!("../../../data/conifold_split_311.json"))),
    ("dP3, triangle plus reflection", include_str!("../../../data/dp3.json"), Some(include_str!("../../../data/dp3_triangles.json"))),
    ("Y(2,1)", include_str!("../../../data/y21.json"), None),
    ("C^3/Z_3", include_str!("../../../data/c3z3.json"), None),
    ("C^3", include_str!("../../../data/orthant3.json"), None),
];

/// Names and spec texts of the built-in examples.
#[wasm_bindgen]
pub fn presets() -> String {
    let list: Vec<Value> = PRESETS
        .iter()
        .map(|(name, cone, dec)| json!({ "name": name, "cone": cone, "decomposition": dec }))
        .collect();
    Value::Array(list).to_string()
}

struct Scene {
    functional: Functional,
    decomposition: Option<Decomposition>,
    origin: Vec<f64>,
    /// Orthonormal basis of the plane perpendicular to `o`.
    frame: Vec<Vec<f64>>,
}

impl Scene {
    fn load(cone: &str, decomposition: &str) -> Result<Scene, String> {
        let spec = parse_cone(cone).map_err(|e| e.to_string())?;
        let c = MomentCone::validate(&spec.facet_normals).map_err(|e| e.to_string())?;
        let cy: CalabiYauData = c.calabi_yau().map_err(|e| e.to_string())?;
        if c.m() != 2 {
            return Err(format!("the demo draws 2-dimensional slices; this cone has m = {}", c.m()));
        }
        let decomposition = if decomposition.trim().is_empty() {
            None
        } else {
            let d = parse_decomposition(decomposition).map_err(|e| e.to_string())?;
            Some(Decomposition::new(&c, &cy, d.base_reeb, &d.pieces).map_err(|e| e.to_string())?)
        };
        let functional = Functional::new(&c, &cy, decomposition.as_ref()).map_err(|e| e.to_string())?;
        let origin: Vec<f64> = cy.origin.iter().map(Scalar::to_f64).collect();
        let frame = perpendicular_frame(&origin);
        Ok(Scene { functional, decomposition, origin, frame })
    }

    fn project(&self, p: &[f64]) -> [f64; 2] {
        let d: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        [dot(&d, &self.frame[0]), dot(&d, &self.frame[1])]
    }

    fn polygon<S: Scalar>(&self, vertices: &[Vec<S>]) -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> =
            vertices.iter().map(|v| self.project(&v.iter().map(Scalar::to_f64).collect::<Vec<_>>())).collect();
        let n = pts.len() as f64;
        let c = pts.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0] / n, a[1] + p[1] / n]);
        pts.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
        pts
    }

    /// Chart point rounded to a rational so the twist check is exact.
    fn rational_t(t: &[f64]) -> Vec<Q> {
        t.iter().map(|&x| rationalize(x, 240)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt on the standard basis with `o` projected out.
fn perpendicular_frame(o: &[f64]) -> Vec<Vec<f64>> {
    let n = o.len();
    let oo = dot(o, o);
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v: Vec<f64> = (0..n).map(|j| if i == j { 1.0 } else { 0.0 } - o[i] * o[j] / oo).collect();
        for f in &frame {
            let c = dot(&v, f);
            v.iter_mut().zip(f).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-9 {
            frame.push(v.iter().map(|x| x / norm).collect());
        }
    }
    frame
}

fn error(msg: String) -> String {
    json!({ "error": msg }).to_string()
}

/// `W` sampled on a `resolution^2` grid over the Reeb slice in chart
/// coordinates, the boundary of the slice, and the Newton path.
#[wasm_bindgen]
pub fn landscape(cone: &str, decomposition: &str, resolution: usize) -> String {
    let scene = match Scene::load(cone, decomposition) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let f = &scene.functional;
    let (lo, hi) = slice_box(f);
    let res = resolution.clamp(2, 400);
    let mut values = Vec::with_capacity(res * res);
    for i in 0..res {
        for j in 0..res {
            let t = [
                lo[0] + (hi[0] - lo[0]) * j as f64 / (res - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * i as f64 / (res - 1) as f64,
            ];
            values.push(f.value(&t).ok().filter(|v| v.is_finite()));
        }
    }
    // Corners of the slice are the facet normals rescaled to pair to 1 with o.
    let region: Vec<Vec<Q>> = f
        .cone()
        .normals()
        .iter()
        .map(|l| {
            let lq = volmin::num::z_to_q(l);
            let s = volmin::num::dot(&lq, f.origin());
            f.chart().coords(&lq.iter().map(|x| x / &s).collect::<Vec<Q>>())
        })
        .collect();
    let n = region.len() as f64;
    let rf: Vec<[f64; 2]> = region.iter().map(|t| [t[0].to_f64(), t[1].to_f64()]).collect();
    let c = rf.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0] / n, a[1] + p[1] / n]);
    let mut outline = rf.clone();
    outline.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
    let result = match minimize(f, &MinimizationConfig::default()) {
        Ok(r) => r,
        Err(e) => return error(e.to_string()),
    };
    json!({
        "lo": lo,
        "hi": hi,
        "resolution": res,
        "values": values,
        "outline": outline,
        "path": result.trace.iter().map(|it| it.t.clone()).collect::<Vec<_>>(),
        "t_star": result.t_star,
        "xi_star": result.xi_star,
        "W_star": result.w_star,
        "status": format!("{:?}", result.status),
        "verdict": format!("{:?}", result.existence_verdict),
        "k": f.k(),
    })
    .to_string()
}

/// Slice polygon at chart point `(t0, t1)` with its barycenter and the
/// Futaki vector.
#[wasm_bindgen]
pub fn slice_view(cone: &str, t0: f64, t1: f64) -> String {
    let scene = match Scene::load(cone, "") {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let f = &scene.functional;
    let xi = f.xi(&[t0, t1]);
    let p = match SlicePolytope::slice(f.cone(), &xi) {
        Ok(p) => p,
        Err(e) => return error(e.to_string()),
    };
    let bc = match p.barycenter() {
        Ok(b) => b,
        Err(e) => return error(e.to_string()),
    };
    let fut = futaki(&p, &scene.origin).unwrap_or_default();
    json!({
        "xi": xi,
        "polygon": scene.polygon(p.vertices()),
        "barycenter": scene.project(&bc),
        "origin": [0.0, 0.0],
        "futaki": fut,
        "W": f.value(&[t0, t1]).ok(),
    })
    .to_string()
}

/// Twists the decomposition to the rational point nearest `(t0, t1)` and
/// compares the Minkowski sum of the twisted pieces with the true slice.
#[wasm_bindgen]
pub fn twist_view(cone: &str, decomposition: &str, t0: f64, t1: f64) -> String {
    let scene = match Scene::load(cone, decomposition) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    if scene.decomposition.is_none() {
        return error("this example has no decomposition".into());
    }
    let f = &scene.functional;
    let xi = f.xi(&Scene::rational_t(&[t0, t1]));
    let mk = match check_minkowski_exact(f, &xi) {
        Ok(mk) => mk,
        Err(e) => return error(e.to_string()),
    };
    let witness = mk.witness.as_ref().map(|w| scene.project(&w.iter().map(Scalar::to_f64).collect::<Vec<_>>()));
    json!({
        "xi": xi.iter().map(fmt_q).collect::<Vec<_>>(),
        "pieces": mk.pieces.iter().map(|p| scene.polygon(p.vertices())).collect::<Vec<_>>(),
        "sum": scene.polygon(mk.sum.vertices()),
        "slice": scene.polygon(mk.slice.vertices()),
        "holds": mk.holds,
        "discrepancy": mk.discrepancy,
        "witness": witness,
    })
    .to_string()
}
