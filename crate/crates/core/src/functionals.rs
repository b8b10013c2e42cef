//! The volume functional and its obstructions.
//!
//! `V(xi) = (m + 1) Vol(Delta_xi)` for the truncated cone `Delta_xi`, and the
//! coupled functional `W = sum_a log V_a` over decomposition pieces. With
//! moments `M0, M1, M2` of `Delta`:
//!
//! ```text
//! dV/dnu   = -(m+1)(m+2) <M1, nu>
//! d2V/dnu2 =  (m+1)(m+2)(m+3) nu^T M2 nu
//! ```
//!
//! Derivatives of `W` are taken along the Reeb chart basis, so they are
//! exact rationals when `xi` is rational.

use std::sync::Arc;

use serde::Serialize;

use crate::cone::{CalabiYauData, MomentCone, ReebChart};
use crate::error::{Error, Result};
use crate::moments::MomentData;
use crate::num::{add, det, dot, dot_zs, factorial, norm2, scale, sub, to_f64_vec, Scalar, Q};
use crate::polycone::PolyCone;
use crate::polytope::{Decomposition, SliceChart, SlicePolytope};

/// Raw functional `(m + 1) Vol(Delta_xi)` of a cone; `xi` need not lie on
/// the Reeb slice.
pub fn vol<S: Scalar>(cone: &Arc<PolyCone>, xi: &[S]) -> Result<S> {
    let p = SlicePolytope::slice(cone, xi)?;
    let md = p.truncate().moments()?;
    Ok(S::from_i64(p.m() as i64 + 1) * md.m0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalEvaluation<S> {
    pub value: f64,
    /// Gradient of `W` in the Reeb chart basis.
    pub gradient: Vec<S>,
    pub hessian: Vec<Vec<S>>,
    /// `(m + 1) Vol(Delta_a)` per piece.
    pub per_piece_volumes: Vec<S>,
}

impl<S: Scalar> FunctionalEvaluation<S> {
    pub fn grad_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn hessian_f64(&self) -> Vec<Vec<f64>> {
        self.hessian.iter().map(|r| to_f64_vec(r)).collect()
    }
}

/// `W` restricted to the Reeb slice `Xi_o`, parametrized by the chart
/// `xi(t) = base + sum t_i nu_i`.
#[derive(Debug, Clone)]
pub struct Functional {
    cone: Arc<PolyCone>,
    pieces: Vec<Arc<PolyCone>>,
    chart: ReebChart,
    origin: Vec<Q>,
}

impl Functional {
    /// Single-piece functional when `decomposition` is `None`.
    pub fn new(cone: &MomentCone, cy: &CalabiYauData, decomposition: Option<&Decomposition>) -> Result<Self> {
        let whole = Arc::new(cone.as_polycone().clone());
        let pieces = match decomposition {
            Some(d) => d.piece_cones(),
            None => vec![Arc::clone(&whole)],
        };
        Ok(Functional { cone: whole, pieces, chart: cone.reeb_chart(cy)?, origin: cy.origin.clone() })
    }

    pub fn chart(&self) -> &ReebChart {
        &self.chart
    }

    pub fn origin(&self) -> &[Q] {
        &self.origin
    }

    pub fn cone(&self) -> &Arc<PolyCone> {
        &self.cone
    }

    pub fn pieces(&self) -> &[Arc<PolyCone>] {
        &self.pieces
    }

    pub fn k(&self) -> usize {
        self.pieces.len()
    }

    pub fn m(&self) -> usize {
        self.chart.m()
    }

    pub fn xi<S: Scalar>(&self, t: &[S]) -> Vec<S> {
        self.chart.point(t)
    }

    /// Minimum pairing of `xi` with the rays of the whole cone.
    pub fn margin<S: Scalar>(&self, xi: &[S]) -> S {
        self.cone
            .generators()
            .iter()
            .map(|r| dot_zs(r, xi))
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cone has rays")
    }

    fn check_feasible<S: Scalar>(&self, xi: &[S]) -> Result<()> {
        let margin = self.margin(xi);
        if margin <= S::zero() {
            return Err(Error::InfeasibleReeb { margin: margin.to_f64() });
        }
        Ok(())
    }

    /// `W`, its chart gradient and Hessian at chart point `t`.
    pub fn evaluate<S: Scalar>(&self, t: &[S]) -> Result<FunctionalEvaluation<S>> {
        let xi = self.xi(t);
        self.check_feasible(&xi)?;
        let m = self.m() as i64;
        let nu: Vec<Vec<S>> = self.chart.basis.iter().map(|b| b.iter().map(S::from_q).collect()).collect();
        let c1 = S::from_i64((m + 1) * (m + 2));
        let c2 = S::from_i64((m + 1) * (m + 2) * (m + 3));
        let dim = nu.len();
        let mut value = 0.0;
        let mut gradient = vec![S::zero(); dim];
        let mut hessian = vec![vec![S::zero(); dim]; dim];
        let mut per_piece = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            let md = SlicePolytope::slice(piece, &xi)?.truncate().moments()?;
            let v = S::from_i64(m + 1) * md.m0.clone();
            if v.is_zero() {
                return Err(Error::DegeneratePolytope { got: 0, need: self.m() });
            }
            let g: Vec<S> = nu.iter().map(|n| -(c1.clone() * dot(&md.m1, n)) / v.clone()).collect();
            for i in 0..dim {
                gradient[i] = gradient[i].clone() + g[i].clone();
                for j in 0..dim {
                    let h = c2.clone() * md.m2_form(&nu[i], &nu[j]) / v.clone();
                    hessian[i][j] = hessian[i][j].clone() + h - g[i].clone() * g[j].clone();
                }
            }
            value += v.to_f64().ln();
            per_piece.push(v);
        }
        Ok(FunctionalEvaluation { value, gradient, hessian, per_piece_volumes: per_piece })
    }

    /// `W` alone, in floating point.
    pub fn value(&self, t: &[f64]) -> Result<f64> {
        let xi = self.xi(t);
        self.check_feasible(&xi)?;
        let mut w = 0.0;
        for piece in &self.pieces {
            w += vol(piece, &xi)?.ln();
        }
        Ok(w)
    }

    /// Slices of every piece at `xi`.
    pub fn pieces_at<S: Scalar>(&self, xi: &[S]) -> Result<Vec<SlicePolytope<S>>> {
        self.pieces.iter().map(|c| SlicePolytope::slice(c, xi)).collect()
    }
}

/// Donaldson's obstruction `(m + 1)(M1 - q M0)` in the slice chart
/// centred at `origin`, with `M0, M1` the chart moments of the polytope.
pub fn futaki<S: Scalar>(p: &SlicePolytope<S>, origin: &[S]) -> Result<Vec<S>> {
    let chart = p.chart(origin);
    let mom = p.chart_moments(&chart)?;
    if mom.m0.is_zero() {
        return Err(Error::DegeneratePolytope { got: 0, need: p.m() });
    }
    let q = chart.coords(origin);
    let k = S::from_i64(p.m() as i64 + 1);
    Ok(mom.m1.iter().zip(&q).map(|(a, qi)| k.clone() * (a.clone() - qi.clone() * mom.m0.clone())).collect())
}

/// `sum_a (b_a - origin)` in the slice chart centred at `origin`.
pub fn coupled_obstruction<S: Scalar>(pieces: &[SlicePolytope<S>], origin: &[S]) -> Result<Vec<S>> {
    let first = pieces.first().ok_or(Error::DegeneratePolytope { got: 0, need: 1 })?;
    if pieces.iter().any(|p| p.xi() != first.xi()) {
        return Err(Error::MixedSlices);
    }
    let chart = first.chart(origin);
    let mut acc = vec![S::zero(); first.m()];
    for p in pieces {
        let mom = p.chart_moments(&chart)?;
        if mom.m0.is_zero() {
            return Err(Error::DegeneratePolytope { got: 0, need: p.m() });
        }
        acc = add(&acc, &sub(&mom.barycenter(), &chart.coords(origin)));
    }
    Ok(acc)
}

/// Both sides of the Stokes identities for `sigma = (m + 1) i_{x - q} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesReport<S> {
    /// `int_{dP} sigma`, summed facet by facet.
    pub boundary_mass: S,
    /// `m (m + 1) int_P dx`.
    pub interior_mass: S,
    /// `int_{dP} x^i sigma / (m (m + 1)) - int_P (x^i - q^i) dx / m`.
    pub q5_lhs: Vec<S>,
    /// `int_P x^i dx`.
    pub q5_rhs: Vec<S>,
}

impl<S: Scalar> StokesReport<S> {
    pub fn q4_residual(&self) -> S {
        self.boundary_mass.clone() - self.interior_mass.clone()
    }

    pub fn q5_residuals(&self) -> Vec<S> {
        sub(&self.q5_lhs, &self.q5_rhs)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.q4_residual().is_zero() && self.q5_residuals().iter().all(|r| r.is_zero())
    }

    /// Largest residual relative to the size of the terms compared.
    pub fn max_relative_residual(&self) -> f64 {
        let rel = |r: f64, a: f64, b: f64| r.abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let mut worst = rel(self.q4_residual().to_f64(), self.boundary_mass.to_f64(), self.interior_mass.to_f64());
        let scale = self.q5_lhs.iter().chain(&self.q5_rhs).map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        for r in self.q5_residuals() {
            worst = worst.max(rel(r.to_f64(), scale, 0.0));
        }
        worst
    }
}

/// Evaluates the boundary integrals through pyramids from `origin` over
/// triangulated facets, and the interior side from chart moments.
///
/// On a facet `F`, `i_{x - q} dx` restricts to `h dA` with `h` the distance
/// from `q`, so `int_F y sigma = (m + 1) m Vol(pyr(q, F)) y(centroid)` for
/// affine `y`, the pyramid volume signed by the side of `F` that `q` is on.
pub fn stokes_identities<S: Scalar>(p: &SlicePolytope<S>, origin: &[S]) -> Result<StokesReport<S>> {
    let m = p.m();
    let chart = p.chart(origin);
    let mom = p.chart_moments(&chart)?;
    let q = chart.coords(origin);
    let coords: Vec<Vec<S>> = p.vertices().iter().map(|v| chart.coords(v)).collect();
    let kappa = S::from_i64(m as i64 + 1);
    let mm = S::from_i64(m as i64);
    let mfact = S::from_i64(factorial(m));
    let mut boundary_mass = S::zero();
    let mut boundary_first = vec![S::zero(); m];
    let cone = p.cone();
    for (a, facet) in cone.facets().iter().enumerate() {
        let side: S = dot_zs(&cone.normals()[a], origin);
        if side.is_zero() {
            continue;
        }
        let sign = if side > S::zero() { S::one() } else { -S::one() };
        for simplex in cone.face_triangulation(facet) {
            let pts: Vec<Vec<S>> = simplex.iter().map(|&i| coords[i].clone()).collect();
            let rows: Vec<Vec<S>> = pts.iter().map(|v| sub(v, &q)).collect();
            let pyr = det(rows).abs_val() / mfact.clone() * sign.clone();
            let weight = kappa.clone() * mm.clone() * pyr;
            let mut centroid = vec![S::zero(); m];
            for v in &pts {
                centroid = add(&centroid, v);
            }
            let centroid = scale(&centroid, &(S::one() / S::from_i64(pts.len() as i64)));
            boundary_mass = boundary_mass + weight.clone();
            boundary_first = add(&boundary_first, &scale(&centroid, &weight));
        }
    }
    let c = S::from_i64((m * (m + 1)) as i64);
    let q5_lhs = (0..m)
        .map(|i| {
            boundary_first[i].clone() / c.clone()
                - (mom.m1[i].clone() - q[i].clone() * mom.m0.clone()) / mm.clone()
        })
        .collect();
    Ok(StokesReport {
        boundary_mass,
        interior_mass: c * mom.m0.clone(),
        q5_lhs,
        q5_rhs: mom.m1,
    })
}

/// Residuals of the cone/slice identities
/// `(m + 1 + j) int_Delta p^j dp = (1/|xi|) int_P p^j dsigma` for `j = 0, 1, 2`.
///
/// The slice measure is `sqrt(det G) dx` for the chart Gram matrix `G`.
/// The volume identity is checked squared, which stays rational. For the
/// moments the ratio `sqrt(det G) / |xi|` is needed; it is rational for the
/// lattice chart of a rational `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSliceReport<S> {
    /// `Vol_m(P)^2 - (m + 1)^2 Vol(Delta)^2 |xi|^2`.
    pub volume_sq_residual: S,
    pub first_moment_residual: Option<Vec<S>>,
    pub second_moment_residual: Option<Vec<Vec<S>>>,
}

pub fn cone_slice_identities<S: Scalar>(p: &SlicePolytope<S>) -> Result<ConeSliceReport<S>> {
    let m = p.m() as i64;
    let chart = p.chart(&p.vertices()[0]);
    let pm = p.chart_moments(&chart)?;
    let dm = p.truncate().moments()?;
    let gram: Vec<Vec<S>> = chart.basis.iter().map(|u| chart.basis.iter().map(|v| dot(u, v)).collect()).collect();
    let g = det(gram);
    let xi2 = norm2(p.xi());
    let k0 = S::from_i64(m + 1);
    let volume_sq_residual =
        pm.m0.clone() * pm.m0.clone() * g.clone() - k0.clone() * k0 * dm.m0.clone() * dm.m0.clone() * xi2.clone();
    let ratio = (g / xi2).exact_sqrt();
    let (first, second) = match ratio {
        Some(r) => {
            let amb = ambient_moments(&chart, &pm);
            let k1 = S::from_i64(m + 2);
            let k2 = S::from_i64(m + 3);
            let first = dm.m1.iter().zip(&amb.m1).map(|(d, a)| k1.clone() * d.clone() - r.clone() * a.clone()).collect();
            let second = dm
                .m2
                .iter()
                .zip(&amb.m2)
                .map(|(dr, ar)| dr.iter().zip(ar).map(|(d, a)| k2.clone() * d.clone() - r.clone() * a.clone()).collect())
                .collect();
            (Some(first), Some(second))
        }
        None => (None, None),
    };
    Ok(ConeSliceReport { volume_sq_residual, first_moment_residual: first, second_moment_residual: second })
}

/// Ambient moments `int_P p^j dx` from chart moments, for `p = o + B x`.
fn ambient_moments<S: Scalar>(chart: &SliceChart<S>, cm: &MomentData<S>) -> MomentData<S> {
    let o = &chart.origin;
    let n = o.len();
    let bm1 = chart.direction(&cm.m1);
    let m1 = add(&scale(o, &cm.m0), &bm1);
    let mut m2 = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = o[i].clone() * o[j].clone() * cm.m0.clone()
                + o[i].clone() * bm1[j].clone()
                + bm1[i].clone() * o[j].clone();
            for (a, ba) in chart.basis.iter().enumerate() {
                for (b, bb) in chart.basis.iter().enumerate() {
                    acc = acc + ba[i].clone() * cm.m2[a][b].clone() * bb[j].clone();
                }
            }
            m2[i][j] = acc;
        }
    }
    MomentData { m0: cm.m0.clone(), m1, m2 }
}

/// The comparison map `p -> ((m + 1) / 2)(p - origin)` applied to a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseImage<S> {
    pub factor: S,
    pub origin: Vec<S>,
    /// Image vertices in ambient coordinates.
    pub vertices: Vec<Vec<S>>,
    /// Image vertices in the slice chart centred at `origin`.
    pub chart_vertices: Vec<Vec<S>>,
}

impl<S: Scalar> TransverseImage<S> {
    pub fn apply(&self, p: &[S]) -> Vec<S> {
        scale(&sub(p, &self.origin), &self.factor)
    }
}

pub fn transverse_map<S: Scalar>(p: &SlicePolytope<S>, origin: &[S]) -> TransverseImage<S> {
    let factor = S::from_i64(p.m() as i64 + 1) / S::from_i64(2);
    let chart = p.chart(origin);
    let vertices: Vec<Vec<S>> = p.vertices().iter().map(|v| scale(&sub(v, origin), &factor)).collect();
    let chart_vertices = p.vertices().iter().map(|v| scale(&chart.coords(v), &factor)).collect();
    TransverseImage { factor, origin: origin.to_vec(), vertices, chart_vertices }
}

/// JSON report fragment for one point of the Reeb slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    #[serde(rename = "W")]
    pub w: f64,
    pub grad_norm: f64,
    pub hess_min_eig: f64,
    pub futaki: Vec<f64>,
    pub futaki_norm: f64,
    pub coupled_obstruction: Vec<f64>,
    pub coupled_norm: f64,
    pub barycenter_offset: f64,
    pub stokes_residuals: StokesSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StokesSummary {
    pub q4: f64,
    pub q5: Vec<f64>,
    pub max_relative: f64,
    pub exact: bool,
}

impl StokesSummary {
    pub fn from_report<S: Scalar>(r: &StokesReport<S>) -> Self {
        StokesSummary {
            q4: r.q4_residual().to_f64(),
            q5: to_f64_vec(&r.q5_residuals()),
            max_relative: r.max_relative_residual(),
            exact: S::EXACT && r.is_exact_zero(),
        }
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(h: &[Vec<f64>]) -> f64 {
    let n = h.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (h[i][j] + h[j][i]));
    mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Full obstruction report at chart point `t`.
pub fn obstruction_report<S: Scalar>(f: &Functional, t: &[S]) -> Result<ObstructionReport> {
    let ev = f.evaluate(t)?;
    let xi = f.xi(t);
    let origin: Vec<S> = f.origin().iter().map(S::from_q).collect();
    let whole = SlicePolytope::slice(f.cone(), &xi)?;
    let fut = futaki(&whole, &origin)?;
    let pieces = f.pieces_at(&xi)?;
    let cpl = coupled_obstruction(&pieces, &origin)?;
    let stokes = stokes_identities(&whole, &origin)?;
    let bc = whole.barycenter()?;
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let futaki = to_f64_vec(&fut);
    let coupled = to_f64_vec(&cpl);
    Ok(ObstructionReport {
        w: ev.value,
        grad_norm: ev.grad_norm(),
        hess_min_eig: min_eigenvalue(&ev.hessian_f64()),
        futaki_norm: norm(&futaki),
        futaki,
        coupled_norm: norm(&coupled),
        coupled_obstruction: coupled,
        barycenter_offset: norm(&to_f64_vec(&sub(&bc, &origin))),
        stokes_residuals: StokesSummary::from_report(&stokes),
    })
}
