//! Damped Newton minimization of `W` over the Reeb slice, and the
//! coupled-existence decision built on it.

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{coupled_obstruction, futaki, min_eigenvalue, Functional};
use crate::num::{fmt_q, rationalize, sub, to_f64_vec, Scalar, Q};
use crate::oracle::{grid_search, GridResult};
use crate::polytope::{minkowski_sum, polytope_equal, SlicePolytope};

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationConfig {
    pub grad_tol: f64,
    pub max_iter: usize,
    pub backtrack_factor: f64,
    pub min_feasibility_margin: f64,
}

impl Default for MinimizationConfig {
    fn default() -> Self {
        MinimizationConfig { grad_tol: 1e-10, max_iter: 100, backtrack_factor: 0.5, min_feasibility_margin: 1e-14 }
    }
}

impl MinimizationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.min_feasibility_margin > 0.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parse("tolerances must be positive and backtrack factor in (0, 1)".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    DivergedToBoundary,
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    TransverseKE,
    TransverseCoupledKE,
    HypothesisFails,
    NoCriticalPoint,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iterate {
    pub t: Vec<f64>,
    #[serde(rename = "W")]
    pub w: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiCheck {
    pub holds: bool,
    pub discrepancy: f64,
    /// A vertex of the true slice that the twisted sum misses, and the
    /// point the sum puts there instead.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub slice_vertex: Vec<f64>,
    pub sum_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizationResult {
    pub xi_star: Vec<f64>,
    pub t_star: Vec<f64>,
    #[serde(rename = "W_star")]
    pub w_star: f64,
    /// `exp(W)`: the volume for a single piece.
    pub vol_star: f64,
    pub grad_norm: f64,
    pub hess_min_eig: f64,
    pub margin: f64,
    pub status: Status,
    pub iterations: usize,
    pub minkowski: Option<MinkowskiCheck>,
    pub minkowski_holds: Option<bool>,
    pub coupled_obstruction: Vec<f64>,
    pub existence_verdict: Verdict,
    pub trace: Vec<Iterate>,
}

/// Maximizes `sum_i log <r_i, xi(t)>` over the chart from `t = 0`.
pub fn analytic_center(f: &Functional) -> Result<Vec<f64>> {
    let m = f.m();
    let basis = f.chart().basis_f64();
    let rays: Vec<Vec<f64>> = f.cone().generators().iter().map(|r| r.iter().map(|x| Scalar::from_z(x)).collect()).collect();
    let a: Vec<Vec<f64>> = rays.iter().map(|r| basis.iter().map(|nu| dot(r, nu)).collect()).collect();
    let pairings = |t: &[f64]| -> Vec<f64> { rays.iter().map(|r| dot(r, &f.xi(t))).collect() };
    let phi = |s: &[f64]| s.iter().map(|x| x.ln()).sum::<f64>();
    let mut t = vec![0.0; m];
    let mut s = pairings(&t);
    if s.iter().any(|&x| x <= 0.0) {
        return Err(Error::EmptyInterior);
    }
    for _ in 0..50 {
        let mut g = DVector::<f64>::zeros(m);
        let mut h = DMatrix::<f64>::zeros(m, m);
        for (ai, si) in a.iter().zip(&s) {
            for j in 0..m {
                g[j] += ai[j] / si;
                for k in 0..m {
                    h[(j, k)] += ai[j] * ai[k] / (si * si);
                }
            }
        }
        if g.norm() < 1e-13 {
            break;
        }
        let Some(chol) = h.cholesky() else { break };
        let d = chol.solve(&g);
        let mut step = 1.0;
        let base = phi(&s);
        let mut moved = false;
        while step > 1e-12 {
            let cand: Vec<f64> = t.iter().zip(d.iter()).map(|(x, di)| x + step * di).collect();
            let sc = pairings(&cand);
            if sc.iter().all(|&x| x > 0.0) && phi(&sc) >= base {
                t = cand;
                s = sc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok(t)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Damped Newton in the Reeb chart, followed by the Minkowski and
/// obstruction checks at the minimizer.
pub fn minimize(f: &Functional, config: &MinimizationConfig) -> Result<MinimizationResult> {
    config.validate()?;
    let m = f.m();
    let mut t = analytic_center(f)?;
    let mut trace = Vec::new();
    let mut status = Status::MaxIter;
    let mut iterations = 0;
    let mut cuts = 0;
    let margin0 = f.margin(&f.xi(&t));
    let mut ev = f.evaluate(&t)?;
    trace.push(Iterate { t: t.clone(), w: ev.value, grad_norm: ev.grad_norm(), step: 0.0, margin: margin0 });
    loop {
        let gnorm = ev.grad_norm();
        if gnorm <= config.grad_tol {
            status = Status::Converged;
            break;
        }
        if iterations >= config.max_iter {
            break;
        }
        let h = DMatrix::from_fn(m, m, |i, j| ev.hessian[i][j]);
        let g = DVector::from_column_slice(&ev.gradient);
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::NumericalBreakdown(format!("Hessian not positive definite at t = {t:?}")))?;
        let d = -chol.solve(&g);
        let slope = g.dot(&d);
        let mut step = 1.0;
        let mut accepted = None;
        let mut cut_for_feasibility = false;
        while step > 1e-16 {
            let cand: Vec<f64> = t.iter().zip(d.iter()).map(|(x, di)| x + step * di).collect();
            let margin = f.margin(&f.xi(&cand));
            if margin <= config.min_feasibility_margin {
                cut_for_feasibility = true;
                step *= config.backtrack_factor;
                continue;
            }
            let ce = f.evaluate(&cand)?;
            // Armijo; below float resolution of W fall back to the gradient.
            let resolvable = -slope * step > 1e-14 * ev.value.abs().max(1.0);
            let ok = if resolvable {
                ce.value <= ev.value + 1e-4 * step * slope
            } else {
                ce.grad_norm() < gnorm
            };
            if ok {
                accepted = Some((cand, ce, margin));
                break;
            }
            step *= config.backtrack_factor;
        }
        iterations += 1;
        let Some((cand, ce, margin)) = accepted else {
            if cut_for_feasibility {
                status = Status::DivergedToBoundary;
            }
            break;
        };
        cuts = if cut_for_feasibility { cuts + 1 } else { 0 };
        t = cand;
        ev = ce;
        trace.push(Iterate { t: t.clone(), w: ev.value, grad_norm: ev.grad_norm(), step, margin });
        if cuts >= 8 && margin < 1e-6 * margin0 {
            status = Status::DivergedToBoundary;
            break;
        }
    }
    let xi = f.xi(&t);
    let margin = f.margin(&xi);
    let hess_min_eig = min_eigenvalue(&ev.hessian_f64());
    if status == Status::Converged && !(hess_min_eig > 0.0 && margin > 0.0) {
        return Err(Error::NumericalBreakdown("converged point is not a strict minimum".into()));
    }
    let origin: Vec<f64> = f.origin().iter().map(Scalar::from_q).collect();
    let coupled = coupled_obstruction(&f.pieces_at(&xi)?, &origin).map(|v| to_f64_vec(&v))?;
    let minkowski = if status == Status::Converged { Some(check_minkowski_at(f, &xi)?) } else { None };
    let verdict = match (status, &minkowski) {
        (Status::Converged, Some(mk)) if mk.holds => {
            if f.k() == 1 {
                Verdict::TransverseKE
            } else {
                Verdict::TransverseCoupledKE
            }
        }
        (Status::Converged, _) => Verdict::HypothesisFails,
        (Status::DivergedToBoundary, _) => Verdict::NoCriticalPoint,
        (Status::MaxIter, _) => Verdict::Unknown,
    };
    Ok(MinimizationResult {
        xi_star: xi,
        t_star: t,
        w_star: ev.value,
        vol_star: ev.value.exp(),
        grad_norm: ev.grad_norm(),
        hess_min_eig,
        margin,
        status,
        iterations,
        minkowski_holds: minkowski.as_ref().map(|mk| mk.holds),
        minkowski,
        coupled_obstruction: coupled,
        existence_verdict: verdict,
        trace,
    })
}

/// Compares the true slice at `xi` with the Minkowski sum (about `o`) of
/// the pieces sliced at `xi`, in floating point.
///
/// The sum `S` lies in the slice `P` iff `sum_a min_{P_a} l - (k-1) l(o) >= 0`
/// for every facet normal `l`. Given that, `P` lies in `S` iff for each
/// vertex `y` of `P`, the maximizer of `S` in a direction `u` interior to
/// the normal cone at `y` (sum of outward facet normals) is `y` itself.
pub fn check_minkowski_at(f: &Functional, xi: &[f64]) -> Result<MinkowskiCheck> {
    let whole = SlicePolytope::slice(f.cone(), xi)?;
    let pieces = f.pieces_at(xi)?;
    let origin: Vec<f64> = f.origin().iter().map(Scalar::from_q).collect();
    let k = pieces.len() as f64;
    let scale = whole.vertices().iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
    let normals = f.cone().normals();
    let mut discrepancy: f64 = 0.0;
    for l in normals {
        let lf: Vec<f64> = l.iter().map(|x| Scalar::from_z(x)).collect();
        let lo = dot(&lf, &origin);
        let smin: f64 = pieces
            .iter()
            .map(|p| p.vertices().iter().map(|v| dot(&lf, v)).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            - (k - 1.0) * lo;
        let norm = dot(&lf, &lf).sqrt();
        discrepancy = discrepancy.max(-smin / norm);
    }
    let mut witness = None;
    let mut worst_vertex = 0.0;
    for (i, y) in whole.vertices().iter().enumerate() {
        let mut u = vec![0.0; xi.len()];
        for a in whole.facet_incidence(i) {
            for (uj, lj) in u.iter_mut().zip(&normals[a]) {
                *uj -= <f64 as Scalar>::from_z(lj);
            }
        }
        let mut z: Vec<f64> = origin.iter().map(|o| -(k - 1.0) * o).collect();
        for p in &pieces {
            let best = p
                .vertices()
                .iter()
                .max_by(|a, b| dot(a, &u).total_cmp(&dot(b, &u)))
                .expect("pieces have vertices");
            for (zj, bj) in z.iter_mut().zip(best) {
                *zj += bj;
            }
        }
        let gap = sub(&z, y).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if gap > worst_vertex {
            worst_vertex = gap;
            witness = Some(Witness { slice_vertex: y.clone(), sum_point: z });
        }
    }
    discrepancy = discrepancy.max(worst_vertex);
    let holds = discrepancy <= 1e-9 * scale;
    Ok(MinkowskiCheck { holds, discrepancy, witness: if holds { None } else { witness } })
}

/// Exact comparison at a rational `xi`: discrepancy is the largest distance
/// from a vertex of either polytope to the nearest vertex of the other.
pub fn check_minkowski_exact(f: &Functional, xi: &[Q]) -> Result<ExactMinkowski> {
    let whole = SlicePolytope::slice(f.cone(), xi)?;
    let pieces = f.pieces_at(xi)?;
    let sum = minkowski_sum(&pieces, f.origin())?;
    let holds = polytope_equal(&whole, &sum, 0.0);
    let dist = |a: &[Q], b: &[Q]| sub(a, b).iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    let nearest = |v: &[Q], set: &[Vec<Q>]| set.iter().map(|w| dist(v, w)).fold(f64::INFINITY, f64::min);
    let mut discrepancy: f64 = 0.0;
    let mut witness = None;
    for v in whole.vertices() {
        let d = nearest(v, sum.vertices());
        if d > discrepancy {
            discrepancy = d;
            witness = Some(v.clone());
        }
    }
    for v in sum.vertices() {
        let d = nearest(v, whole.vertices());
        if d > discrepancy {
            discrepancy = d;
            witness = Some(v.clone());
        }
    }
    Ok(ExactMinkowski { holds, discrepancy, witness, pieces, sum, slice: whole })
}

/// Scans `base + s nu_j` over chart directions `j` and `s = 1/2, -1/2,
/// 1/4, -1/4, ...` down to `1/64` for the first feasible point where the
/// twisted pieces no longer sum to the slice.
pub fn find_twist_witness(f: &Functional, base: &[Q]) -> Option<(Vec<Q>, ExactMinkowski)> {
    for nu in &f.chart().basis {
        for e in 1..=6 {
            for sign in [1, -1] {
                let s = Q::new(sign.into(), (1i64 << e).into());
                let cand: Vec<Q> = base.iter().zip(nu).map(|(b, n)| b + &s * n).collect();
                if !f.margin(&cand).is_positive() {
                    continue;
                }
                if let Ok(mk) = check_minkowski_exact(f, &cand) {
                    if !mk.holds {
                        return Some((cand, mk));
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMinkowski {
    pub holds: bool,
    pub discrepancy: f64,
    pub witness: Option<Vec<Q>>,
    pub pieces: Vec<SlicePolytope<Q>>,
    pub sum: SlicePolytope<Q>,
    pub slice: SlicePolytope<Q>,
}

/// Rational certificate at a rounding of the float minimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactCertificate {
    pub t: Vec<String>,
    pub xi: Vec<String>,
    pub per_piece_volumes: Vec<String>,
    pub gradient_zero: bool,
    pub hessian_positive_definite: bool,
    pub futaki_zero: bool,
    pub stokes_exact: bool,
    pub minkowski_holds: bool,
}

pub fn exact_certificate(f: &Functional, t_star: &[f64]) -> Result<ExactCertificate> {
    let t: Vec<Q> = t_star.iter().map(|&x| rationalize(x, 1_000_000)).collect();
    let ev = f.evaluate(&t)?;
    let xi = f.xi(&t);
    let whole = SlicePolytope::slice(f.cone(), &xi)?;
    let fut = futaki(&whole, f.origin())?;
    let stokes = crate::functionals::stokes_identities(&whole, f.origin())?;
    let mk = check_minkowski_exact(f, &xi)?;
    Ok(ExactCertificate {
        t: t.iter().map(fmt_q).collect(),
        xi: xi.iter().map(fmt_q).collect(),
        per_piece_volumes: ev.per_piece_volumes.iter().map(fmt_q).collect(),
        gradient_zero: ev.gradient.iter().all(|g| g == &Q::from_integer(0.into())),
        hessian_positive_definite: leading_minors_positive(&ev.hessian),
        futaki_zero: fut.iter().all(|x| x == &Q::from_integer(0.into())),
        stokes_exact: stokes.is_exact_zero(),
        minkowski_holds: mk.holds,
    })
}

/// Sylvester's criterion.
pub fn leading_minors_positive(h: &[Vec<Q>]) -> bool {
    (1..=h.len()).all(|k| {
        let minor: Vec<Vec<Q>> = h[..k].iter().map(|r| r[..k].to_vec()).collect();
        crate::num::det(minor) > Q::from_integer(0.into())
    })
}

/// Grid comparison of the Newton minimizer against the feasible grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCertificate {
    pub resolution: usize,
    pub points_evaluated: usize,
    pub grid_min: f64,
    pub grid_argmin: Vec<f64>,
    /// `grid_min - W(xi*)`; nonnegative up to rounding when the minimizer
    /// is global.
    pub margin: f64,
    pub cell: Vec<f64>,
    pub within_one_cell: bool,
}

pub fn grid_certify(f: &Functional, result: &MinimizationResult, resolution: usize) -> Result<GridCertificate> {
    let GridResult { best, value, evaluated, cell } = grid_search(f, resolution)?;
    let within = best.iter().zip(&result.t_star).zip(&cell).all(|((b, t), c)| (b - t).abs() <= c * (1.0 + 1e-9));
    Ok(GridCertificate {
        resolution,
        points_evaluated: evaluated,
        grid_min: value,
        grid_argmin: best,
        margin: value - result.w_star,
        cell,
        within_one_cell: within,
    })
}
