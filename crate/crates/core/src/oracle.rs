//! Brute-force cross-checks: Monte Carlo moments, finite differences and
//! grid search. None of these share code paths with the exact formulas
//! beyond slicing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::moments::MomentData;
use crate::num::Scalar;
use crate::polycone::PolyCone;
use crate::polytope::SlicePolytope;

/// Samples per independent random stream.
const BATCH: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|value - mean|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.mean).abs();
        if self.std_error == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.std_error
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub m0: Estimate,
    pub m1: Vec<Estimate>,
    pub m2: Vec<Vec<Estimate>>,
    pub samples: usize,
    pub seed: u64,
}

/// Running sums for the `1 + n + n^2` integrands.
#[derive(Clone)]
struct Sums {
    s: Vec<f64>,
    sq: Vec<f64>,
}

impl Sums {
    fn new(len: usize) -> Self {
        Sums { s: vec![0.0; len], sq: vec![0.0; len] }
    }

    fn merge(mut self, other: &Sums) -> Self {
        for (a, b) in self.s.iter_mut().zip(&other.s) {
            *a += b;
        }
        for (a, b) in self.sq.iter_mut().zip(&other.sq) {
            *a += b;
        }
        self
    }
}

/// Rejection sampling of the truncated cone `{p in C : <p, xi> <= 1}` inside
/// its bounding box. Batch `b` draws from stream `b` of a ChaCha8 generator
/// keyed by `seed`, and batches are combined in index order, so the result
/// does not depend on thread count.
pub fn mc_moments(cone: &PolyCone, xi: &[f64], samples: usize, seed: u64) -> Result<McEstimate> {
    let n = cone.dim();
    let slice = SlicePolytope::slice(&std::sync::Arc::new(cone.clone()), xi)?;
    let mut lo = vec![0.0f64; n];
    let mut hi = vec![0.0f64; n];
    for v in slice.vertices() {
        for j in 0..n {
            lo[j] = lo[j].min(v[j]);
            hi[j] = hi[j].max(v[j]);
        }
    }
    if samples == 0 || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
        return Err(Error::DegenerateBox);
    }
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let normals: Vec<Vec<f64>> =
        cone.normals().iter().map(|l| l.iter().map(|x| <f64 as Scalar>::from_z(x)).collect()).collect();
    let len = 1 + n + n * n;
    let batches = samples.div_ceil(BATCH);
    let run = |b: usize| -> Sums {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = BATCH.min(samples - b * BATCH);
        let mut sums = Sums::new(len);
        let mut p = vec![0.0; n];
        let mut f = vec![0.0; len];
        for _ in 0..count {
            for j in 0..n {
                p[j] = lo[j] + (hi[j] - lo[j]) * rng.random::<f64>();
            }
            let inside = dot(&p, xi) <= 1.0 && normals.iter().all(|l| dot(l, &p) >= 0.0);
            if !inside {
                continue;
            }
            f[0] = 1.0;
            f[1..=n].copy_from_slice(&p);
            for i in 0..n {
                for j in 0..n {
                    f[1 + n + i * n + j] = p[i] * p[j];
                }
            }
            for (k, x) in f.iter().enumerate() {
                sums.s[k] += x;
                sums.sq[k] += x * x;
            }
        }
        sums
    };
    let parts: Vec<Sums> = run_batches(batches, run);
    let total = parts.iter().fold(Sums::new(len), |acc, s| acc.merge(s));
    let nf = samples as f64;
    let est = |k: usize| {
        let mean = total.s[k] / nf;
        let var = (total.sq[k] / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
        Estimate { mean: box_vol * mean, std_error: box_vol * (var / nf).sqrt() }
    };
    Ok(McEstimate {
        m0: est(0),
        m1: (0..n).map(|i| est(1 + i)).collect(),
        m2: (0..n).map(|i| (0..n).map(|j| est(1 + n + i * n + j)).collect()).collect(),
        samples,
        seed,
    })
}

/// One exact moment component against its Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentComparison {
    pub name: String,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
}

/// Componentwise comparison of `M0`, `M1` and the upper triangle of `M2`.
pub fn compare_moments(exact: &MomentData<f64>, mc: &McEstimate) -> Vec<MomentComparison> {
    let row = |name: String, x: f64, e: &Estimate| MomentComparison {
        name,
        exact: x,
        estimate: e.mean,
        std_error: e.std_error,
        z: e.z_score(x),
    };
    let n = exact.dim();
    let mut out = vec![row("M0".into(), exact.m0, &mc.m0)];
    for i in 0..n {
        out.push(row(format!("M1[{i}]"), exact.m1[i], &mc.m1[i]));
    }
    for i in 0..n {
        for j in i..n {
            out.push(row(format!("M2[{i}][{j}]"), exact.m2[i][j], &mc.m2[i][j]));
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn run_batches<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_batches<T, F: Fn(usize) -> T>(count: usize, f: F) -> Vec<T> {
    (0..count).map(f).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDiff {
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
    pub step: f64,
}

/// Central differences of `f` at `x`. Infeasible stencil points give
/// `StepTooLarge`.
pub fn finite_diff<F>(f: F, x: &[f64], step: f64) -> Result<FiniteDiff>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let eval = |p: &[f64]| match f(p) {
        Err(Error::InfeasibleReeb { .. }) => Err(Error::StepTooLarge { step }),
        other => other,
    };
    let n = x.len();
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(i, d) in moves {
            p[i] += d;
        }
        p
    };
    let f0 = eval(x)?;
    let h = step;
    let mut gradient = vec![0.0; n];
    let mut hessian = vec![vec![0.0; n]; n];
    for i in 0..n {
        let fp = eval(&shifted(&[(i, h)]))?;
        let fm = eval(&shifted(&[(i, -h)]))?;
        gradient[i] = (fp - fm) / (2.0 * h);
        hessian[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = eval(&shifted(&[(i, h), (j, h)]))?;
            let fpm = eval(&shifted(&[(i, h), (j, -h)]))?;
            let fmp = eval(&shifted(&[(i, -h), (j, h)]))?;
            let fmm = eval(&shifted(&[(i, -h), (j, -h)]))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hessian[i][j] = v;
            hessian[j][i] = v;
        }
    }
    Ok(FiniteDiff { gradient, hessian, step })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluated: usize,
    /// Grid spacing per chart axis.
    pub cell: Vec<f64>,
}

/// Upper bound on grid size.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// Chart-coordinate bounding box of the closure of `Xi_o`, whose vertices
/// are the normals rescaled onto the slice.
pub fn slice_box(f: &Functional) -> (Vec<f64>, Vec<f64>) {
    let m = f.m();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for l in f.cone().normals() {
        let lq: Vec<crate::num::Q> = crate::num::z_to_q(l);
        let s = crate::num::dot(&lq, f.origin());
        let v: Vec<crate::num::Q> = lq.iter().map(|x| x / &s).collect();
        let t = f.chart().coords(&v);
        for j in 0..m {
            lo[j] = lo[j].min(t[j].to_f64());
            hi[j] = hi[j].max(t[j].to_f64());
        }
    }
    (lo, hi)
}

/// Exhaustive evaluation of `W` on a `resolution^m` grid over the slice box;
/// infeasible points are skipped. Ties go to the first point in row-major
/// order.
pub fn grid_search(f: &Functional, resolution: usize) -> Result<GridResult> {
    let m = f.m();
    let total = resolution.checked_pow(m as u32).unwrap_or(usize::MAX);
    if m > 3 || resolution < 2 || total > MAX_GRID_POINTS {
        return Err(Error::GridTooLarge(total));
    }
    let (lo, hi) = slice_box(f);
    let cell: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / (resolution - 1) as f64).collect();
    let point = |idx: usize| -> Vec<f64> {
        let mut rest = idx;
        (0..m)
            .map(|j| {
                let k = rest % resolution;
                rest /= resolution;
                lo[j] + k as f64 * cell[j]
            })
            .collect()
    };
    let values: Vec<Option<f64>> = run_batches(total, |idx| f.value(&point(idx)).ok().filter(|v| v.is_finite()));
    let mut best: Option<(usize, f64)> = None;
    let mut evaluated = 0;
    for (idx, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            evaluated += 1;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((idx, v));
            }
        }
    }
    let (idx, value) = best.ok_or(Error::EmptyInterior)?;
    Ok(GridResult { best: point(idx), value, evaluated, cell })
}

/// Deterministic feasible chart points: `t = (1 - s) c + s v` where `c` is
/// the analytic center, `v` a random convex combination of the vertices of
/// the slice box closure, and `s` uniform in `[0, shrink]`.
pub fn random_feasible_points(f: &Functional, count: usize, seed: u64, shrink: f64) -> Result<Vec<Vec<f64>>> {
    let center = crate::optimizer::analytic_center(f)?;
    let verts: Vec<Vec<f64>> = f
        .cone()
        .normals()
        .iter()
        .map(|l| {
            let lq = crate::num::z_to_q(l);
            let s = crate::num::dot(&lq, f.origin());
            let v: Vec<crate::num::Q> = lq.iter().map(|x| x / &s).collect();
            f.chart().coords(&v).iter().map(Scalar::to_f64).collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w: Vec<f64> = verts.iter().map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = w.iter().sum();
        let s = shrink * rng.random::<f64>();
        let t: Vec<f64> = (0..f.m())
            .map(|j| {
                let v: f64 = verts.iter().zip(&w).map(|(p, wi)| p[j] * wi / total).sum();
                (1.0 - s) * center[j] + s * v
            })
            .collect();
        if f.margin(&f.xi(&t)) > 0.0 {
            out.push(t);
        }
    }
    Ok(out)
}
