//! Pointed, full-dimensional polyhedral cones with both descriptions.
//!
//! A [`PolyCone`] stores primitive integer generators of its extreme rays,
//! primitive inward facet normals, the ray/facet incidence, and a pulling
//! triangulation into simplicial cones. The moment cone and every
//! decomposition piece are stored this way; slicing by a Reeb covector only
//! rescales generators, so all combinatorics are computed once, exactly.
//!
//! Facet and ray enumeration is by brute force over `(n-1)`-subsets, which is
//! comfortable for `n <= 8` and a few dozen inputs.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::num::{cross_z, dot_z, primitive, rank_z, IVec};

#[derive(Debug, Clone, PartialEq)]
pub struct PolyCone {
    dim: usize,
    generators: Vec<IVec>,
    normals: Vec<IVec>,
    /// For each normal, the sorted indices of generators it vanishes on.
    facets: Vec<Vec<usize>>,
    /// Simplicial cones (sorted generator indices, `dim` each).
    triangulation: Vec<Vec<usize>>,
}

/// Extreme rays of `{x : <x, g> >= 0 for all g}` as sorted primitive vectors.
///
/// Every returned vector vanishes on `n - 1` linearly independent inputs and
/// is nonnegative on all of them. When the inputs positively span a pointed
/// cone this is exactly the set of facet normals of that cone (and dually).
pub fn dual_extreme_rays(inputs: &[IVec], dim: usize) -> Vec<IVec> {
    let mut out = BTreeSet::new();
    if dim == 0 {
        return Vec::new();
    }
    for combo in (0..inputs.len()).combinations(dim - 1) {
        let rows: Vec<&IVec> = combo.iter().map(|&i| &inputs[i]).collect();
        let c = cross_z(&rows);
        if c.iter().all(Zero::is_zero) {
            continue;
        }
        let (mut pos, mut neg) = (false, false);
        for g in inputs {
            let s = dot_z(&c, g);
            pos |= s.is_positive();
            neg |= s.is_negative();
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        let c = if neg { c.iter().map(|x| -x).collect() } else { c };
        out.insert(primitive(&c));
    }
    out.into_iter().collect()
}

impl PolyCone {
    /// Cone `{p : <p, l> >= 0}` from (primitive, irredundant) normals. Rays
    /// are computed; normals that support no facet are reported back.
    pub(crate) fn from_normals(dim: usize, normals: Vec<IVec>) -> Result<(Self, Vec<usize>)> {
        let rank = rank_z(&normals);
        if rank < dim {
            return Err(Error::NotPointed { rank, dim });
        }
        let rays = dual_extreme_rays(&normals, dim);
        if rays.is_empty() || rank_z(&rays) < dim {
            return Err(Error::NotFullDimensional);
        }
        let redundant: Vec<usize> = normals
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                let zero: Vec<&IVec> = rays.iter().filter(|r| dot_z(r, l).is_zero()).collect();
                rank_z(zero) + 1 < dim
            })
            .map(|(i, _)| i)
            .collect();
        let kept: Vec<IVec> = normals
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !redundant.contains(i))
            .map(|(_, l)| l)
            .collect();
        Ok((Self::assemble(dim, rays, kept), redundant))
    }

    /// Cone generated by nonzero integer vectors; non-extreme and repeated
    /// generators are discarded.
    pub fn from_generators(dim: usize, gens: &[IVec]) -> Result<Self> {
        let gens: Vec<IVec> = gens
            .iter()
            .map(|g| primitive(g))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rank = rank_z(&gens);
        if rank < dim {
            return Err(Error::DegeneratePolytope { got: rank.saturating_sub(1), need: dim - 1 });
        }
        let normals = dual_extreme_rays(&gens, dim);
        if normals.is_empty() || rank_z(&normals) < dim {
            // Not pointed: the generators positively span a line.
            return Err(Error::NotPointed { rank: rank_z(&normals), dim });
        }
        let extreme: Vec<IVec> = gens
            .into_iter()
            .filter(|g| {
                let on: Vec<&IVec> = normals.iter().filter(|l| dot_z(g, l).is_zero()).collect();
                rank_z(on) + 1 == dim
            })
            .collect();
        Ok(Self::assemble(dim, extreme, normals))
    }

    fn assemble(dim: usize, mut generators: Vec<IVec>, mut normals: Vec<IVec>) -> Self {
        generators.sort();
        normals.sort();
        let facets: Vec<Vec<usize>> = normals
            .iter()
            .map(|l| {
                (0..generators.len())
                    .filter(|&i| dot_z(&generators[i], l).is_zero())
                    .collect()
            })
            .collect();
        let all: Vec<usize> = (0..generators.len()).collect();
        let triangulation = pulling_triangulation(&generators, &facets, &all, dim);
        PolyCone { dim, generators, normals, facets, triangulation }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[IVec] {
        &self.generators
    }

    pub fn normals(&self) -> &[IVec] {
        &self.normals
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn triangulation(&self) -> &[Vec<usize>] {
        &self.triangulation
    }

    /// Indices of the facets containing generator `i`.
    pub fn incidence(&self, i: usize) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&f| self.facets[f].binary_search(&i).is_ok())
            .collect()
    }

    /// All nonzero faces, as sorted generator-index sets, mapped to the
    /// facets (normal indices) active on them. The cone itself is skipped.
    pub fn faces(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut faces: BTreeSet<Vec<usize>> = self.facets.iter().cloned().collect();
        let mut frontier: Vec<Vec<usize>> = faces.iter().cloned().collect();
        while let Some(face) = frontier.pop() {
            for facet in &self.facets {
                let meet: Vec<usize> =
                    face.iter().copied().filter(|i| facet.binary_search(i).is_ok()).collect();
                if !meet.is_empty() && faces.insert(meet.clone()) {
                    frontier.push(meet);
                }
            }
        }
        faces
            .into_iter()
            .map(|f| {
                let active = (0..self.normals.len())
                    .filter(|&a| f.iter().all(|i| self.facets[a].binary_search(i).is_ok()))
                    .collect();
                (f, active)
            })
            .collect()
    }

    /// Simplicial subdivision of a face given by its generator indices.
    pub fn face_triangulation(&self, face: &[usize]) -> Vec<Vec<usize>> {
        let rank = rank_z(face.iter().map(|&i| &self.generators[i]));
        pulling_triangulation(&self.generators, &self.facets, face, rank)
    }

    /// Whether `x` pairs nonnegatively with every facet normal.
    pub fn contains(&self, x: &[crate::num::Q]) -> bool {
        self.normals.iter().all(|l| {
            let s: crate::num::Q = crate::num::dot_zs(l, x);
            !s.is_negative()
        })
    }
}

/// Pulling triangulation of the face spanned by `face` (generator indices):
/// cone from its least generator over every facet of the face that does not
/// contain it, recursively.
fn pulling_triangulation(
    gens: &[IVec],
    facets: &[Vec<usize>],
    face: &[usize],
    rank: usize,
) -> Vec<Vec<usize>> {
    if rank == 1 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for facet in facets {
        let meet: Vec<usize> =
            face.iter().copied().filter(|i| facet.binary_search(i).is_ok()).collect();
        if meet.is_empty() || meet.len() == face.len() || meet.contains(&apex) {
            continue;
        }
        if rank_z(meet.iter().map(|&i| &gens[i])) + 1 == rank {
            subfaces.insert(meet);
        }
    }
    let mut out = Vec::new();
    for sub in subfaces {
        for mut simplex in pulling_triangulation(gens, facets, &sub, rank - 1) {
            simplex.insert(0, apex);
            simplex.sort_unstable();
            out.push(simplex);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ivec;

    fn conifold_normals() -> Vec<IVec> {
        vec![ivec(&[1, 0, 0]), ivec(&[1, 1, 0]), ivec(&[1, 1, 1]), ivec(&[1, 0, 1])]
    }

    #[test]
    fn conifold_rays() {
        let (c, red) = PolyCone::from_normals(3, conifold_normals()).unwrap();
        assert!(red.is_empty());
        assert_eq!(
            c.generators(),
            &[ivec(&[0, 0, 1]), ivec(&[0, 1, 0]), ivec(&[1, -1, 0]), ivec(&[1, 0, -1])]
        );
        // Two tetrahedra sharing the diagonal through the least ray.
        assert_eq!(c.triangulation(), &[vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn redundant_normal_detected() {
        let normals = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])];
        let (c, red) = PolyCone::from_normals(2, normals).unwrap();
        assert_eq!(red, vec![2]);
        assert_eq!(c.normals().len(), 2);
    }

    #[test]
    fn non_full_dimensional_rejected() {
        let normals = vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1])];
        assert_eq!(PolyCone::from_normals(2, normals), Err(Error::NotFullDimensional));
        let normals = vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0])];
        assert!(matches!(
            PolyCone::from_normals(3, normals),
            Err(Error::NotPointed { rank: 2, dim: 3 })
        ));
    }

    #[test]
    fn generator_hull_drops_interior_points() {
        let gens = vec![
            ivec(&[1, 0, 1]),
            ivec(&[0, 1, 1]),
            ivec(&[0, 0, 1]),
            ivec(&[1, 1, 1]),
            ivec(&[1, 1, 2]), // midpoint of the square at height 1
        ];
        let c = PolyCone::from_generators(3, &gens).unwrap();
        assert_eq!(c.generators().len(), 4);
        assert_eq!(c.normals().len(), 4);
        assert_eq!(c.triangulation().len(), 2);
    }

    #[test]
    fn cube_cone_triangulates_into_six() {
        // Cone over a unit cube: pulling from one corner gives 6 simplices.
        let gens: Vec<IVec> = (0..8)
            .map(|b| ivec(&[1, b & 1, (b >> 1) & 1, (b >> 2) & 1]))
            .collect();
        let c = PolyCone::from_generators(4, &gens).unwrap();
        assert_eq!(c.normals().len(), 6);
        assert_eq!(c.triangulation().len(), 6);
    }
}
