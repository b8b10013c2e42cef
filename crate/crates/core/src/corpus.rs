//! Named cones used in tests, the CLI and the browser demo.

use crate::cone::{CalabiYauData, MomentCone};
use crate::num::{q, qi, qvec, Q};
use crate::polytope::Decomposition;

/// `(name, facet normals)` of cones with a Calabi-Yau vector and smooth
/// links. All are good except `c3z3`, whose apex has index 3.
pub fn test_cones() -> Vec<(&'static str, Vec<Vec<i64>>)> {
    vec![
        ("orthant2", vec![vec![1, 0], vec![0, 1]]),
        ("orthant3", vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
        ("orthant4", vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]),
        ("conifold", conifold()),
        ("y21", vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 2, 2], vec![1, 0, 1]]),
        ("c3z3", vec![vec![1, -1, -1], vec![1, 1, 0], vec![1, 0, 1]]),
        ("dp3", dp3()),
    ]
}

pub fn conifold() -> Vec<Vec<i64>> {
    vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]]
}

/// Cone over the hexagon; its slice at `(3,0,0)` is the difference body of a
/// triangle.
pub fn dp3() -> Vec<Vec<i64>> {
    vec![vec![1, 1, 0], vec![1, 0, 1], vec![1, -1, 1], vec![1, -1, 0], vec![1, 0, -1], vec![1, 1, -1]]
}

/// A cone that is valid but not good: its two normals span an index-2
/// sublattice.
pub fn not_good() -> Vec<Vec<i64>> {
    vec![vec![1, 1], vec![1, -1]]
}

pub fn conifold_critical() -> Vec<Q> {
    vec![qi(3), q(3, 2), q(3, 2)]
}

/// Two homothetic copies of the conifold slice about `o`, with weights
/// 1/3 and 2/3, based at `base`.
pub fn conifold_split(base: Vec<Q>) -> (MomentCone, CalabiYauData, Decomposition) {
    let c = MomentCone::validate(&conifold()).expect("conifold is valid");
    let cy = c.calabi_yau().expect("conifold has gamma");
    let d = Decomposition::homothetic(&c, &cy, base, &[q(1, 3), q(2, 3)]).expect("homothetic split is valid");
    (c, cy, d)
}

/// The hexagon of dP3 at `(3,0,0)` as a triangle plus its reflection.
pub fn dp3_triangles() -> (MomentCone, CalabiYauData, Decomposition) {
    let c = MomentCone::validate(&dp3()).expect("dP3 is valid");
    let cy = c.calabi_yau().expect("dP3 has gamma");
    let third = q(1, 3);
    let pt = |a: i64, b: i64| vec![third.clone(), q(a, 3), q(b, 3)];
    let t1 = vec![pt(0, 0), pt(1, 0), pt(1, 1)];
    let t2 = vec![pt(0, 0), pt(-1, 0), pt(-1, -1)];
    let d = Decomposition::new(&c, &cy, qvec(&[3, 0, 0]), &[t1, t2]).expect("triangles sum to the hexagon");
    (c, cy, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid_and_good() {
        for (name, normals) in test_cones() {
            let c = MomentCone::validate(&normals).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(c.warnings().is_empty(), "{name}");
            let g = c.goodness();
            assert!(g.good_away_from_apex, "{name}");
            assert_eq!(g.good, name != "c3z3", "{name}");
            c.calabi_yau().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn presets_build() {
        conifold_split(conifold_critical());
        conifold_split(qvec(&[3, 1, 1]));
        dp3_triangles();
    }
}
