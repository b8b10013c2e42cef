//! Moment cones: validation, rays, goodness, the Calabi-Yau vector and the
//! space of admissible Reeb covectors.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{
    dot, dot_zs, fmt_q, lattice_annihilator_basis, primitive, primitive_from_q, qi, scale,
    solve_exact, z_to_q, IVec, LinearSolution, Scalar, Q, Z,
};
use crate::polycone::PolyCone;
use crate::smith::elementary_divisors;

/// Rational polyhedral cone `{p : <p, l_a> >= 0}` given by primitive integer
/// facet normals. Always full-dimensional and pointed.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCone {
    cone: PolyCone,
    warnings: Vec<String>,
}

impl MomentCone {
    /// Canonicalizes and validates a list of facet normals: normals are made
    /// primitive, duplicates and redundant normals are dropped (with a
    /// warning each), and the result is checked to be full-dimensional and
    /// pointed.
    pub fn validate(normals: &[Vec<i64>]) -> Result<Self> {
        let big: Vec<IVec> = normals.iter().map(|v| v.iter().map(|&x| Z::from(x)).collect()).collect();
        Self::validate_big(&big)
    }

    pub fn validate_big(normals: &[IVec]) -> Result<Self> {
        let dim = normals.first().map_or(0, Vec::len);
        if dim < 2 || normals.len() < dim {
            return Err(Error::TooFewNormals { dim, need: dim.max(2), got: normals.len() });
        }
        let mut warnings = Vec::new();
        let mut seen = BTreeSet::new();
        let mut canon = Vec::new();
        for (i, l) in normals.iter().enumerate() {
            if l.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: l.len() });
            }
            if l.iter().all(Zero::is_zero) {
                return Err(Error::ZeroNormal { index: i });
            }
            let p = primitive(l);
            if &p != l {
                let g = l.iter().fold(Z::zero(), |g, x| g.gcd(x));
                warnings.push(format!("normal {i} divided by {g} to make it primitive"));
            }
            if seen.insert(p.clone()) {
                canon.push(p);
            } else {
                warnings.push(format!("normal {i} duplicates an earlier normal and was dropped"));
            }
        }
        let (cone, redundant) = PolyCone::from_normals(dim, canon.clone())?;
        for r in redundant {
            warnings.push(format!("normal {:?} is redundant and was dropped", to_i64s(&canon[r])));
        }
        Ok(MomentCone { cone, warnings })
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    /// `m` with `dim = m + 1`.
    pub fn m(&self) -> usize {
        self.cone.dim() - 1
    }

    pub fn normals(&self) -> &[IVec] {
        self.cone.normals()
    }

    /// Primitive generators of the extreme rays, sorted lexicographically.
    pub fn rays(&self) -> &[IVec] {
        self.cone.generators()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn as_polycone(&self) -> &PolyCone {
        &self.cone
    }

    /// Lerman goodness: for every face, the active normals span a saturated
    /// sublattice. The apex (all normals active) is included.
    pub fn goodness(&self) -> GoodnessReport {
        let n = self.dim();
        let mut faces: Vec<FaceVerdict> = self
            .cone
            .faces()
            .into_iter()
            .map(|(rays, active)| {
                let dim = crate::num::rank_z(rays.iter().map(|&i| &self.rays()[i]));
                (dim, active)
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|(dim, active)| self.face_verdict(dim, active))
            .collect();
        faces.push(self.face_verdict(0, (0..self.normals().len()).collect()));
        faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.active_normals.cmp(&b.active_normals)));
        let good = faces.iter().all(|f| f.saturated);
        let good_away_from_apex = faces.iter().filter(|f| f.dim > 0).all(|f| f.saturated);
        debug_assert!(faces.iter().all(|f| f.dim < n));
        GoodnessReport { good, good_away_from_apex, faces }
    }

    fn face_verdict(&self, dim: usize, active: Vec<usize>) -> FaceVerdict {
        let rows: Vec<IVec> = active.iter().map(|&a| self.normals()[a].clone()).collect();
        let divisors = elementary_divisors(&rows);
        let saturated = divisors.iter().all(|d| d == &Z::from(1));
        FaceVerdict {
            dim,
            active_normals: active,
            elementary_divisors: divisors.iter().map(|d| d.to_string()).collect(),
            saturated,
        }
    }

    /// Solves `<gamma, l_a> = -1` for all facets.
    pub fn calabi_yau(&self) -> Result<CalabiYauData> {
        let rows: Vec<Vec<Q>> = self.normals().iter().map(|l| z_to_q(l)).collect();
        let rhs = vec![qi(-1); rows.len()];
        match solve_exact(&rows, &rhs) {
            LinearSolution::Unique(gamma) => {
                let m = self.m();
                let origin = scale(&gamma, &(qi(-1) / qi(m as i64 + 1)));
                Ok(CalabiYauData { m, gamma, origin })
            }
            LinearSolution::Inconsistent => Err(Error::NoCalabiYauVector),
            LinearSolution::Underdetermined => Err(Error::AmbiguousGamma),
        }
    }

    /// Minimum pairing of `xi` with the rays; feasible iff positive.
    pub fn feasibility<S: Scalar>(&self, xi: &[S]) -> Feasibility<S> {
        let margin = self
            .rays()
            .iter()
            .map(|r| dot_zs(r, xi))
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cone has rays");
        Feasibility { feasible: margin > S::zero(), margin }
    }

    /// Affine chart of the Reeb slice `{xi : <xi, o> = 1}`.
    pub fn reeb_chart(&self, cy: &CalabiYauData) -> Result<ReebChart> {
        // The normals generate the dual cone, so their sum is interior.
        let sum: Vec<Q> = (0..self.dim())
            .map(|j| self.normals().iter().fold(Q::zero(), |acc, l| acc + Q::from_integer(l[j].clone())))
            .collect();
        let s = dot(&sum, &cy.origin);
        if !s.is_positive() {
            return Err(Error::EmptyInterior);
        }
        let base = scale(&sum, &s.recip());
        if !self.feasibility(&base).feasible {
            return Err(Error::EmptyInterior);
        }
        let w = primitive_from_q(&cy.origin);
        let basis = lattice_annihilator_basis(&w).iter().map(|v| z_to_q(v)).collect();
        Ok(ReebChart { base, basis })
    }

    /// Vertices `(m + 1) l_a` of the closure of the Reeb slice.
    pub fn reeb_slice_vertices(&self, cy: &CalabiYauData) -> Vec<Vec<Q>> {
        self.normals()
            .iter()
            .map(|l| {
                let l = z_to_q(l);
                let s = dot(&l, &cy.origin);
                scale(&l, &s.recip())
            })
            .collect()
    }
}

pub fn to_i64s(v: &IVec) -> Vec<i64> {
    use num_traits::ToPrimitive;
    v.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceVerdict {
    /// Dimension of the face (0 for the apex).
    pub dim: usize,
    pub active_normals: Vec<usize>,
    pub elementary_divisors: Vec<String>,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    /// Every face including the apex is saturated.
    pub good: bool,
    /// Every face other than the apex is saturated, which is the condition
    /// for the link to be smooth.
    pub good_away_from_apex: bool,
    pub faces: Vec<FaceVerdict>,
}

impl GoodnessReport {
    /// Largest elementary divisor over all faces.
    pub fn worst_divisor(&self) -> Z {
        self.faces
            .iter()
            .flat_map(|f| f.elementary_divisors.iter())
            .map(|d| d.parse::<Z>().unwrap_or_default())
            .max()
            .unwrap_or_else(|| Z::from(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalabiYauData {
    pub m: usize,
    pub gamma: Vec<Q>,
    /// `o = -gamma / (m + 1)`.
    pub origin: Vec<Q>,
}

impl CalabiYauData {
    pub fn gamma_strings(&self) -> Vec<String> {
        self.gamma.iter().map(fmt_q).collect()
    }

    pub fn origin_strings(&self) -> Vec<String> {
        self.origin.iter().map(fmt_q).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<S> {
    pub feasible: bool,
    pub margin: S,
}

/// `xi(t) = base + sum_i t_i basis_i` with `<basis_i, o> = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebChart {
    pub base: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

impl ReebChart {
    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn point<S: Scalar>(&self, t: &[S]) -> Vec<S> {
        let mut xi: Vec<S> = self.base.iter().map(S::from_q).collect();
        for (ti, nu) in t.iter().zip(&self.basis) {
            for (x, b) in xi.iter_mut().zip(nu) {
                *x = x.clone() + ti.clone() * S::from_q(b);
            }
        }
        xi
    }

    /// Chart coordinates of a covector on the slice (least squares).
    pub fn coords<S: Scalar>(&self, xi: &[S]) -> Vec<S> {
        let base: Vec<S> = self.base.iter().map(S::from_q).collect();
        let d = crate::num::sub(xi, &base);
        let basis: Vec<Vec<S>> = self.basis.iter().map(|b| b.iter().map(S::from_q).collect()).collect();
        let gram: Vec<Vec<S>> = basis.iter().map(|u| basis.iter().map(|v| dot(u, v)).collect()).collect();
        let rhs: Vec<S> = basis.iter().map(|u| dot(u, &d)).collect();
        crate::num::solve(gram, rhs).expect("chart basis is independent")
    }

    pub fn basis_f64(&self) -> Vec<Vec<f64>> {
        self.basis.iter().map(|b| b.iter().map(crate::num::q_to_f64).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{ivec, q, qvec};

    fn conifold() -> MomentCone {
        MomentCone::validate(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]).unwrap()
    }

    #[test]
    fn quadrant_is_valid() {
        let c = MomentCone::validate(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        assert!(c.warnings().is_empty());
    }

    #[test]
    fn non_primitive_normal_is_rescaled() {
        let c = MomentCone::validate(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.normals(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
        assert_eq!(c.warnings().len(), 1);
        assert!(c.warnings()[0].contains("divided by 2"));
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            MomentCone::validate(&[vec![1, 0]]),
            Err(Error::TooFewNormals { .. })
        ));
        assert!(matches!(
            MomentCone::validate(&[vec![1, 0], vec![0, 1, 0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            MomentCone::validate(&[vec![1, 0], vec![0, 0]]),
            Err(Error::ZeroNormal { index: 1 })
        ));
        assert_eq!(
            MomentCone::validate(&[vec![1, 1], vec![-1, -1], vec![0, 1]]).unwrap_err(),
            Error::NotFullDimensional
        );
    }

    #[test]
    fn rays_of_tilted_quadrant() {
        let c = MomentCone::validate(&[vec![1, 1], vec![1, -1]]).unwrap();
        assert_eq!(c.rays(), &[ivec(&[1, -1]), ivec(&[1, 1])]);
    }

    #[test]
    fn goodness_verdicts() {
        let c = MomentCone::validate(&[vec![1, 1], vec![1, -1]]).unwrap();
        let g = c.goodness();
        assert!(!g.good);
        assert_eq!(g.worst_divisor(), Z::from(2));
        assert!(conifold().goodness().good);
        let orthant = MomentCone::validate(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let g = orthant.goodness();
        assert!(g.good);
        // 3 facets, 3 edges and the apex.
        assert_eq!(g.faces.len(), 7);
    }

    #[test]
    fn gamma_and_origin() {
        let cy = conifold().calabi_yau().unwrap();
        assert_eq!(cy.gamma, qvec(&[-1, 0, 0]));
        assert_eq!(cy.origin, vec![q(1, 3), qi(0), qi(0)]);
        let quad = MomentCone::validate(&[vec![1, 0], vec![0, 1]]).unwrap();
        let cy = quad.calabi_yau().unwrap();
        assert_eq!(cy.gamma, qvec(&[-1, -1]));
        assert_eq!(cy.origin, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn no_gamma_for_non_gorenstein_cone() {
        // The fourth normal is off the affine plane through the other three.
        let c = MomentCone::validate(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![2, 0, 1]]).unwrap();
        assert_eq!(c.calabi_yau(), Err(Error::NoCalabiYauVector));
    }

    #[test]
    fn chart_examples() {
        let orthant = MomentCone::validate(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let ch = orthant.reeb_chart(&orthant.calabi_yau().unwrap()).unwrap();
        assert_eq!(ch.base, qvec(&[1, 1, 1]));
        assert_eq!(ch.basis, vec![qvec(&[1, -1, 0]), qvec(&[1, 0, -1])]);
        let c = conifold();
        let ch = c.reeb_chart(&c.calabi_yau().unwrap()).unwrap();
        assert_eq!(ch.basis, vec![qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]);
        assert_eq!(ch.base, vec![qi(3), q(3, 2), q(3, 2)]);
    }

    #[test]
    fn feasibility_examples() {
        let orthant = MomentCone::validate(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let f = orthant.feasibility(&qvec(&[1, 1, 1]));
        assert!(f.feasible);
        assert_eq!(f.margin, qi(1));
        let f = orthant.feasibility(&qvec(&[1, 0, 1]));
        assert!(!f.feasible);
        assert_eq!(f.margin, qi(0));
        let f = conifold().feasibility(&[qi(3), qi(3), q(1, 2)]);
        assert!(!f.feasible);
        assert_eq!(f.margin, qi(0));
    }
}
