use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use volmin::cone::{to_i64s, CalabiYauData, MomentCone};
use volmin::corpus;
use volmin::functionals::{min_eigenvalue, vol, Functional};
use volmin::moments::{simplex_moments, MomentData};
use volmin::num::{dot, ivec, lattice_annihilator_basis, primitive_from_q, qi, rationalize, scale, Q};
use volmin::optimizer::{minimize, MinimizationConfig};
use volmin::oracle::random_feasible_points;
use volmin::polycone::PolyCone;
use volmin::polytope::{minkowski_sum, polytope_equal, Decomposition, SlicePolytope};

fn setup(i: usize) -> (MomentCone, CalabiYauData, Functional) {
    let normals = &corpus::test_cones()[i].1;
    let c = MomentCone::validate(normals).unwrap();
    let cy = c.calabi_yau().unwrap();
    let f = Functional::new(&c, &cy, None).unwrap();
    (c, cy, f)
}

/// Rational Reeb covector on the slice near a random chart point.
fn rational_xi(f: &Functional, seed: u64, shrink: f64) -> Option<Vec<Q>> {
    let t = random_feasible_points(f, 1, seed, shrink).ok()?.remove(0);
    let tq: Vec<Q> = t.iter().map(|&x| rationalize(x, 1000)).collect();
    let xi = f.xi(&tq);
    f.margin(&xi).is_positive().then_some(xi)
}

fn three_dim_cones() -> Vec<usize> {
    (0..corpus::test_cones().len()).filter(|&i| corpus::test_cones()[i].1[0].len() == 3).collect()
}

fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    v.sort();
    v
}

fn generators(dim: usize, max: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let first = 1..=max;
    let rest = proptest::collection::vec(-max..=max, dim - 1);
    proptest::collection::vec((first, rest), dim..dim + 4).prop_map(|gs| {
        gs.into_iter()
            .map(|(a, mut r)| {
                r.insert(0, a);
                r
            })
            .collect()
    })
}

/// Moments of the truncated cone from a second triangulation: cone from
/// the apex over a star of the slice from its vertex centroid.
fn star_moments(p: &SlicePolytope<Q>) -> MomentData<Q> {
    let n = p.ambient_dim();
    let k = Q::from_integer((p.vertices().len() as i64).into());
    let c: Vec<Q> = (0..n).map(|j| p.vertices().iter().map(|v| v[j].clone()).sum::<Q>() / &k).collect();
    let mut acc = MomentData::zero(n);
    for facet in p.cone().facets() {
        for simplex in p.cone().face_triangulation(facet) {
            let mut verts = vec![vec![Q::zero(); n], c.clone()];
            verts.extend(simplex.iter().map(|&i| p.vertices()[i].clone()));
            acc.accumulate(&simplex_moments(&verts).expect("star simplices are full-dimensional"));
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn duality_round_trip_3d(gens in generators(3, 4)) {
        let gens: Vec<_> = gens.iter().map(|g| ivec(g)).collect();
        let c1 = PolyCone::from_generators(3, &gens);
        prop_assume!(c1.is_ok());
        let c1 = c1.unwrap();
        let normals: Vec<Vec<i64>> = c1.normals().iter().map(to_i64s).collect();
        let m = MomentCone::validate(&normals).unwrap();
        prop_assert!(m.warnings().is_empty());
        let rays: Vec<Vec<i64>> = m.rays().iter().map(to_i64s).collect();
        prop_assert_eq!(sorted(rays.clone()), sorted(c1.generators().iter().map(to_i64s).collect()));
        let again = PolyCone::from_generators(3, &rays.iter().map(|r| ivec(r)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(sorted(again.normals().iter().map(to_i64s).collect()), sorted(normals));
    }

    #[test]
    fn duality_round_trip_4d(gens in generators(4, 2)) {
        let gens: Vec<_> = gens.iter().map(|g| ivec(g)).collect();
        let c1 = PolyCone::from_generators(4, &gens);
        prop_assume!(c1.is_ok());
        let c1 = c1.unwrap();
        let normals: Vec<Vec<i64>> = c1.normals().iter().map(to_i64s).collect();
        let m = MomentCone::validate(&normals).unwrap();
        prop_assert_eq!(
            sorted(m.rays().iter().map(to_i64s).collect()),
            sorted(c1.generators().iter().map(to_i64s).collect())
        );
    }

    #[test]
    fn simplicial_cone_is_good_iff_unimodular(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 3)) {
        let m = MomentCone::validate(&rows);
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        prop_assume!(m.warnings().is_empty() && m.normals().len() == 3);
        let det = volmin::num::det_z(rows.iter().map(|r| ivec(r)).collect());
        let g = m.goodness();
        prop_assert_eq!(g.good, det.abs().is_one());
        prop_assert_eq!(g.worst_divisor(), det.abs());
    }

    #[test]
    fn reeb_slice_pairs_exactly_with_gamma(i in 0usize..7, seed in any::<u64>()) {
        let (_, cy, f) = setup(i);
        let xi = rational_xi(&f, seed, 0.95);
        prop_assume!(xi.is_some());
        let m = qi(f.m() as i64 + 1);
        prop_assert_eq!(dot(&xi.unwrap(), &cy.gamma), -m);
    }

    #[test]
    fn minkowski_sum_commutes_and_associates(
        idx in 0usize..5,
        seed in any::<u64>(),
        coeffs in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 9..=12),
    ) {
        let i = three_dim_cones()[idx];
        let (_, cy, f) = setup(i);
        let xi = rational_xi(&f, seed, 0.8);
        prop_assume!(xi.is_some());
        let xi = xi.unwrap();
        let basis: Vec<Vec<Q>> = lattice_annihilator_basis(&primitive_from_q(&xi))
            .iter()
            .map(|b| b.iter().map(|x| Q::from_integer(x.clone())).collect())
            .collect();
        let point = |c: &Vec<i64>| -> Vec<Q> {
            let mut p = cy.origin.clone();
            for (b, &ci) in basis.iter().zip(c) {
                p = volmin::num::add(&p, &scale(b, &Q::new(ci.into(), 7.into())));
            }
            p
        };
        let third = coeffs.len() / 3;
        let polys: Vec<_> = coeffs
            .chunks(third)
            .take(3)
            .map(|cs| SlicePolytope::from_points(&cs.iter().map(point).collect::<Vec<_>>(), &xi))
            .collect();
        prop_assume!(polys.iter().all(Result::is_ok));
        let [a, b, c]: [SlicePolytope<Q>; 3] = polys.into_iter().map(Result::unwrap).collect::<Vec<_>>().try_into().unwrap();
        let o = &cy.origin;
        let ab = minkowski_sum(&[a.clone(), b.clone()], o).unwrap();
        let ba = minkowski_sum(&[b.clone(), a.clone()], o).unwrap();
        prop_assert!(polytope_equal(&ab, &ba, 0.0));
        let left = minkowski_sum(&[ab, c.clone()], o).unwrap();
        let right = minkowski_sum(&[a.clone(), minkowski_sum(&[b.clone(), c.clone()], o).unwrap()], o).unwrap();
        prop_assert!(polytope_equal(&left, &right, 0.0));
        let all = minkowski_sum(&[a, b, c], o).unwrap();
        prop_assert!(polytope_equal(&left, &all, 0.0));
    }

    #[test]
    fn twist_is_a_bijection_between_slices(i in 0usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (_, _, f) = setup(i);
        let (x1, x2) = (rational_xi(&f, s1, 0.95), rational_xi(&f, s2, 0.95));
        prop_assume!(x1.is_some() && x2.is_some());
        let (x1, x2) = (x1.unwrap(), x2.unwrap());
        let p1 = SlicePolytope::slice(f.cone(), &x1).unwrap();
        let p2 = SlicePolytope::slice(f.cone(), &x2).unwrap();
        let there = p1.twist(&x2).unwrap();
        prop_assert!(polytope_equal(&there, &p2, 0.0));
        prop_assert!(polytope_equal(&there.twist(&x1).unwrap(), &p1, 0.0));
    }

    #[test]
    fn twist_of_a_piece_stays_in_its_subcone(seed in any::<u64>()) {
        let (_, _, d) = corpus::conifold_split(corpus::conifold_critical());
        let (_, _, f) = setup(3);
        let xi = rational_xi(&f, seed, 0.9);
        prop_assume!(xi.is_some());
        let xi = xi.unwrap();
        for (piece, cone) in d.pieces().iter().zip(d.piece_cones()) {
            let twisted = piece.twist(&xi).unwrap();
            prop_assert!(polytope_equal(&twisted, &SlicePolytope::slice(&cone, &xi).unwrap(), 0.0));
            prop_assert!(polytope_equal(&twisted.twist(d.base_xi()).unwrap(), piece, 0.0));
        }
    }

    #[test]
    fn moments_do_not_depend_on_triangulation(i in 0usize..7, seed in any::<u64>()) {
        let (_, _, f) = setup(i);
        let xi = rational_xi(&f, seed, 0.95);
        prop_assume!(xi.is_some());
        let p = SlicePolytope::slice(f.cone(), &xi.unwrap()).unwrap();
        prop_assert_eq!(p.truncate().moments().unwrap(), star_moments(&p));
    }

    #[test]
    fn volume_scales_under_homothety(i in 0usize..7, seed in any::<u64>(), a in 2i64..=3) {
        let (_, _, f) = setup(i);
        let xi = rational_xi(&f, seed, 0.95);
        prop_assume!(xi.is_some());
        let xi = xi.unwrap();
        let v = vol(f.cone(), &xi).unwrap();
        let va = vol(f.cone(), &scale(&xi, &qi(a))).unwrap();
        let n = f.m() as i32 + 1;
        prop_assert_eq!(va * Q::from_integer(a.into()).pow(n), v);
    }

    #[test]
    fn w_is_strongly_convex_along_segments(i in 0usize..7, seed in any::<u64>()) {
        let (_, _, f) = setup(i);
        let ts = random_feasible_points(&f, 2, seed, 0.95).unwrap();
        let lerp = |s: f64| -> Vec<f64> { ts[0].iter().zip(&ts[1]).map(|(a, b)| (1.0 - s) * a + s * b).collect() };
        let floor = (0..=20)
            .map(|k| min_eigenvalue(&f.evaluate::<f64>(&lerp(k as f64 / 20.0)).unwrap().hessian_f64()))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(floor > 0.0);
        let mu = 0.5 * floor;
        let d2: f64 = ts[0].iter().zip(&ts[1]).map(|(a, b)| (a - b) * (a - b)).sum();
        let (w0, w1) = (f.value(&ts[0]).unwrap(), f.value(&ts[1]).unwrap());
        for s in [0.25, 0.5, 0.75] {
            let bound = (1.0 - s) * w0 + s * w1 - 0.5 * s * (1.0 - s) * mu * d2;
            prop_assert!(f.value(&lerp(s)).unwrap() <= bound + 1e-12 * w0.abs().max(1.0));
        }
    }
}

#[test]
fn gamma_solves_the_normal_equations() {
    for i in 0..corpus::test_cones().len() {
        let (c, cy, f) = setup(i);
        for l in c.normals() {
            let lq: Vec<Q> = l.iter().map(|x| Q::from_integer(x.clone())).collect();
            assert_eq!(dot(&lq, &cy.gamma), -Q::one());
        }
        assert!(c.feasibility(&f.chart().base).feasible);
    }
}

#[test]
fn orthants_are_good_up_to_six() {
    for n in 2..=6 {
        let normals: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        assert!(MomentCone::validate(&normals).unwrap().goodness().good, "n = {n}");
    }
}

#[test]
fn newton_descends_feasibly_and_deterministically() {
    for i in 0..corpus::test_cones().len() {
        let (_, _, f) = setup(i);
        let config = MinimizationConfig::default();
        let r = minimize(&f, &config).unwrap();
        assert_eq!(r, minimize(&f, &config).unwrap());
        for it in &r.trace {
            assert!(it.margin > 0.0);
        }
        for w in r.trace.windows(2) {
            let resolvable = (w[0].w - w[1].w).abs() > 1e-14 * w[0].w.abs().max(1.0);
            if resolvable {
                assert!(w[1].w < w[0].w, "cone {i}: W rose from {} to {}", w[0].w, w[1].w);
            } else {
                assert!(w[1].grad_norm < w[0].grad_norm);
            }
        }
    }
}

#[test]
fn coupled_minimizer_is_base_for_homothetic_split() {
    let (c, cy, d): (MomentCone, CalabiYauData, Decomposition) = corpus::conifold_split(corpus::conifold_critical());
    let f = Functional::new(&c, &cy, Some(&d)).unwrap();
    let r = minimize(&f, &MinimizationConfig::default()).unwrap();
    for (x, b) in r.xi_star.iter().zip([3.0, 1.5, 1.5]) {
        assert!((x - b).abs() < 1e-10);
    }
}
