//! Slices of cones by Reeb hyperplanes and the operations on them.
//!
//! A [`SlicePolytope`] is the compact polytope `{p in C : <p, xi> = 1}` of a
//! pointed cone `C`. Its vertices are the cone generators rescaled onto the
//! hyperplane, so a slice at a different covector (a twist) keeps the same
//! face lattice and triangulation.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::Zero;

use crate::cone::{CalabiYauData, MomentCone};
use crate::error::{Error, Result};
use crate::moments::{simplex_moments, MomentData};
use crate::num::{
    add, dot, dot_zs, primitive_from_q, scale, solve, sub, to_f64_vec, Scalar, Q,
};
use crate::polycone::PolyCone;

#[derive(Debug, Clone, PartialEq)]
pub struct SlicePolytope<S> {
    xi: Vec<S>,
    vertices: Vec<Vec<S>>,
    cone: Arc<PolyCone>,
}

impl<S: Scalar> SlicePolytope<S> {
    /// `{p in cone : <p, xi> = 1}`; vertices are `g / <g, xi>` over the cone
    /// generators `g`.
    pub fn slice(cone: &Arc<PolyCone>, xi: &[S]) -> Result<Self> {
        if xi.len() != cone.dim() {
            return Err(Error::DimensionMismatch { expected: cone.dim(), got: xi.len() });
        }
        let mut vertices = Vec::with_capacity(cone.generators().len());
        for g in cone.generators() {
            let s: S = dot_zs(g, xi);
            if s <= S::zero() {
                return Err(Error::InfeasibleReeb { margin: s.to_f64() });
            }
            vertices.push(g.iter().map(|x| S::from_z(x) / s.clone()).collect());
        }
        Ok(SlicePolytope { xi: xi.to_vec(), vertices, cone: Arc::clone(cone) })
    }

    pub fn of_cone(cone: &MomentCone, xi: &[S]) -> Result<Self> {
        Self::slice(&Arc::new(cone.as_polycone().clone()), xi)
    }

    /// Rescales every vertex onto the hyperplane `<p, xi_new> = 1`.
    pub fn twist(&self, xi_new: &[S]) -> Result<Self> {
        if xi_new.len() != self.xi.len() {
            return Err(Error::DimensionMismatch { expected: self.xi.len(), got: xi_new.len() });
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let f = dot(v, xi_new);
            if f <= S::zero() {
                return Err(Error::InfeasibleReeb { margin: f.to_f64() });
            }
            vertices.push(v.iter().map(|x| x.clone() / f.clone()).collect());
        }
        Ok(SlicePolytope { xi: xi_new.to_vec(), vertices, cone: Arc::clone(&self.cone) })
    }

    pub fn xi(&self) -> &[S] {
        &self.xi
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn ambient_dim(&self) -> usize {
        self.xi.len()
    }

    /// Dimension of the polytope, `ambient_dim - 1`.
    pub fn m(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn cone(&self) -> &Arc<PolyCone> {
        &self.cone
    }

    /// Vertex index sets of the facets, aligned with `cone().normals()`.
    pub fn facets(&self) -> &[Vec<usize>] {
        self.cone.facets()
    }

    pub fn facet_incidence(&self, vertex: usize) -> Vec<usize> {
        self.cone.incidence(vertex)
    }

    /// The truncated cone `{p in cone : <p, xi> <= 1}` with its apex fan
    /// triangulation.
    pub fn truncate(&self) -> TruncatedCone<S> {
        TruncatedCone { base: self.clone() }
    }

    /// Affine chart of the slice hyperplane centred at `origin`.
    pub fn chart(&self, origin: &[S]) -> SliceChart<S> {
        SliceChart::new(origin.to_vec(), S::hyperplane_basis(&self.xi))
    }

    /// `m`-dimensional moments in the coordinates of `chart`.
    pub fn chart_moments(&self, chart: &SliceChart<S>) -> Result<MomentData<S>> {
        let coords: Vec<Vec<S>> = self.vertices.iter().map(|v| chart.coords(v)).collect();
        let mut acc = MomentData::zero(self.m());
        for simplex in self.cone.triangulation() {
            let pts: Vec<Vec<S>> = simplex.iter().map(|&i| coords[i].clone()).collect();
            let mom = simplex_moments(&pts).ok_or(Error::DegenerateSimplex)?;
            acc.accumulate(&mom);
        }
        Ok(acc)
    }

    /// Centroid with respect to the Euclidean measure on the hyperplane.
    pub fn barycenter(&self) -> Result<Vec<S>> {
        let chart = self.chart(&self.vertices[0]);
        let mom = self.chart_moments(&chart)?;
        if mom.m0.is_zero() {
            return Err(Error::DegeneratePolytope { got: 0, need: self.m() });
        }
        Ok(chart.point(&mom.barycenter()))
    }

    pub fn to_f64(&self) -> SlicePolytope<f64> {
        SlicePolytope {
            xi: to_f64_vec(&self.xi),
            vertices: self.vertices.iter().map(|v| to_f64_vec(v)).collect(),
            cone: Arc::clone(&self.cone),
        }
    }

    /// Whether `<origin, xi> = 1` (up to rounding in float mode).
    pub fn on_hyperplane(&self, p: &[S]) -> bool {
        let d = dot(p, &self.xi) - S::one();
        if S::EXACT {
            d.is_zero()
        } else {
            d.to_f64().abs() <= 1e-12 * (1.0 + crate::num::max_abs(p).to_f64())
        }
    }
}

impl SlicePolytope<Q> {
    /// Polytope spanned by rational points lying on `<p, xi> = 1`.
    pub fn from_points(points: &[Vec<Q>], xi: &[Q]) -> Result<Self> {
        let dim = xi.len();
        let mut gens = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if dot(p, xi) != Q::from_integer(1.into()) {
                return Err(Error::MixedSlices);
            }
            gens.push(primitive_from_q(p));
        }
        let cone = PolyCone::from_generators(dim, &gens)?;
        Self::slice(&Arc::new(cone), xi)
    }
}

/// Truncated cone over a slice, triangulated by coning the slice
/// triangulation from the apex `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedCone<S> {
    pub base: SlicePolytope<S>,
}

impl<S: Scalar> TruncatedCone<S> {
    /// Simplices as base-vertex indices; the apex is implicit.
    pub fn simplices(&self) -> &[Vec<usize>] {
        self.base.cone.triangulation()
    }

    pub fn moments(&self) -> Result<MomentData<S>> {
        let n = self.base.ambient_dim();
        let mut acc = MomentData::zero(n);
        let nfact = S::from_i64(crate::num::factorial(n));
        for simplex in self.simplices() {
            let verts: Vec<Vec<S>> = simplex.iter().map(|&i| self.base.vertices[i].clone()).collect();
            let d = crate::num::det(verts.clone());
            if d.is_zero() {
                return Err(Error::DegenerateSimplex);
            }
            let vol = d.abs_val() / nfact.clone();
            // The apex contributes nothing to the moment sums.
            let mut with_apex = verts;
            with_apex.push(vec![S::zero(); n]);
            acc.accumulate(&crate::moments::moments_with_volume(&with_apex, vol));
        }
        Ok(acc)
    }
}

/// Affine coordinates `p = origin + sum_i x_i basis_i` on a slice hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceChart<S> {
    pub origin: Vec<S>,
    pub basis: Vec<Vec<S>>,
    gram: Vec<Vec<S>>,
}

impl<S: Scalar> SliceChart<S> {
    pub fn new(origin: Vec<S>, basis: Vec<Vec<S>>) -> Self {
        let gram = basis.iter().map(|u| basis.iter().map(|v| dot(u, v)).collect()).collect();
        SliceChart { origin, basis, gram }
    }

    pub fn coords(&self, p: &[S]) -> Vec<S> {
        let d = sub(p, &self.origin);
        let rhs = self.basis.iter().map(|u| dot(u, &d)).collect();
        solve(self.gram.clone(), rhs).expect("chart basis is independent")
    }

    pub fn point(&self, x: &[S]) -> Vec<S> {
        let mut p = self.origin.clone();
        for (xi, b) in x.iter().zip(&self.basis) {
            p = add(&p, &scale(b, xi));
        }
        p
    }

    /// Pushes a chart vector forward to an ambient direction.
    pub fn direction(&self, x: &[S]) -> Vec<S> {
        let mut p = vec![S::zero(); self.origin.len()];
        for (xi, b) in x.iter().zip(&self.basis) {
            p = add(&p, &scale(b, xi));
        }
        p
    }
}

/// Minkowski sum `sum_a (P_a - origin) + origin` of polytopes on a common
/// slice, via the hull of all vertex sums.
pub fn minkowski_sum(pieces: &[SlicePolytope<Q>], origin: &[Q]) -> Result<SlicePolytope<Q>> {
    let first = pieces.first().ok_or(Error::DegeneratePolytope { got: 0, need: 1 })?;
    let xi = first.xi().to_vec();
    if pieces.iter().any(|p| p.xi() != xi.as_slice()) || !first.on_hyperplane(origin) {
        return Err(Error::MixedSlices);
    }
    let shift = scale(origin, &Q::from_integer((pieces.len() as i64 - 1).into()));
    let points: Vec<Vec<Q>> = pieces
        .iter()
        .map(|p| p.vertices().iter())
        .multi_cartesian_product()
        .map(|combo| {
            let s = combo.into_iter().fold(vec![Q::zero(); xi.len()], |acc, v| add(&acc, v));
            sub(&s, &shift)
        })
        .collect();
    SlicePolytope::from_points(&points, &xi)
}

/// Vertex-set equality up to `tol` in the max norm (exact for `tol = 0` in
/// rational mode).
pub fn polytope_equal<S: Scalar>(p: &SlicePolytope<S>, q: &SlicePolytope<S>, tol: f64) -> bool {
    if p.ambient_dim() != q.ambient_dim() || p.vertices().len() != q.vertices().len() {
        return false;
    }
    let close = |a: &[S], b: &[S]| {
        let d = crate::num::max_abs(&sub(a, b));
        if S::EXACT && tol == 0.0 {
            d.is_zero()
        } else {
            d.to_f64() <= tol
        }
    };
    let mut used = vec![false; q.vertices().len()];
    for v in p.vertices() {
        match (0..used.len()).find(|&j| !used[j] && close(v, &q.vertices()[j])) {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

/// User-supplied decomposition of the slice polytope at a base covector into
/// full-dimensional pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    base_xi: Vec<Q>,
    pieces: Vec<SlicePolytope<Q>>,
}

impl Decomposition {
    /// Validates pieces against the cone: every vertex must lie on the base
    /// slice and inside the cone, every piece must be full-dimensional, and
    /// the pieces must sum to the slice about the origin `o`.
    pub fn new(cone: &MomentCone, cy: &CalabiYauData, base_xi: Vec<Q>, pieces: &[Vec<Vec<Q>>]) -> Result<Self> {
        if base_xi.len() != cone.dim() {
            return Err(Error::DimensionMismatch { expected: cone.dim(), got: base_xi.len() });
        }
        let f = cone.feasibility(&base_xi);
        if !f.feasible {
            return Err(Error::InfeasibleReeb { margin: f.margin.to_f64() });
        }
        if pieces.is_empty() {
            return Err(Error::DegeneratePolytope { got: 0, need: cone.m() });
        }
        let mut out = Vec::with_capacity(pieces.len());
        for (k, verts) in pieces.iter().enumerate() {
            if verts.iter().any(|v| v.len() == cone.dim() && !cone.as_polycone().contains(v)) {
                return Err(Error::PieceOutsidePolytope { piece: k });
            }
            out.push(SlicePolytope::from_points(verts, &base_xi)?);
        }
        let whole = SlicePolytope::of_cone(cone, &base_xi)?;
        if !polytope_equal(&minkowski_sum(&out, &cy.origin)?, &whole, 0.0) {
            return Err(Error::NotMinkowskiSum);
        }
        Ok(Decomposition { base_xi, pieces: out })
    }

    /// The trivial decomposition with the whole slice as the single piece.
    pub fn whole(cone: &MomentCone, base_xi: Vec<Q>) -> Result<Self> {
        let p = SlicePolytope::of_cone(cone, &base_xi)?;
        Ok(Decomposition { base_xi, pieces: vec![p] })
    }

    /// Pieces `o + w_a (P - o)` with weights summing to one; these always
    /// sum to `P` at the base covector.
    pub fn homothetic(
        cone: &MomentCone,
        cy: &CalabiYauData,
        base_xi: Vec<Q>,
        weights: &[Q],
    ) -> Result<Self> {
        let p = SlicePolytope::of_cone(cone, &base_xi)?;
        if !p.on_hyperplane(&cy.origin) {
            return Err(Error::MixedSlices);
        }
        let pieces: Vec<Vec<Vec<Q>>> = weights
            .iter()
            .map(|w| {
                p.vertices()
                    .iter()
                    .map(|v| add(&cy.origin, &scale(&sub(v, &cy.origin), w)))
                    .collect()
            })
            .collect();
        Self::new(cone, cy, base_xi, &pieces)
    }

    pub fn base_xi(&self) -> &[Q] {
        &self.base_xi
    }

    pub fn pieces(&self) -> &[SlicePolytope<Q>] {
        &self.pieces
    }

    pub fn k(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_cones(&self) -> Vec<Arc<PolyCone>> {
        self.pieces.iter().map(|p| Arc::clone(p.cone())).collect()
    }

    /// Translations applied to the pieces when canonicalizing. Pieces are
    /// kept as given, so these are all zero.
    pub fn translations(&self) -> Vec<Vec<Q>> {
        vec![vec![Q::zero(); self.base_xi.len()]; self.pieces.len()]
    }

    /// Pieces at another covector: `C_a ∩ {<p, xi> = 1}`.
    pub fn pieces_at<S: Scalar>(&self, xi: &[S]) -> Result<Vec<SlicePolytope<S>>> {
        self.pieces.iter().map(|p| SlicePolytope::slice(p.cone(), xi)).collect()
    }
}

/// Signed minimum over the vertices of `<v, xi>`, used to check twists.
pub fn min_pairing<S: Scalar>(p: &SlicePolytope<S>, xi: &[S]) -> S {
    p.vertices()
        .iter()
        .map(|v| dot(v, xi))
        .reduce(|a, b| if b < a { b } else { a })
        .unwrap_or_else(S::zero)
}
