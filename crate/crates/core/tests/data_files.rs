//! The sample inputs in `data/` agree with the built-in corpus.

use std::path::PathBuf;

use volmin::cone::MomentCone;
use volmin::corpus;
use volmin::io::{parse_cone, parse_decomposition};
use volmin::num::qvec;
use volmin::polytope::{polytope_equal, Decomposition};

fn read(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn normals(name: &str) -> Vec<Vec<i64>> {
    parse_cone(&read(name)).unwrap().facet_normals
}

fn same_pieces(a: &Decomposition, b: &Decomposition) {
    assert_eq!(a.base_xi(), b.base_xi());
    assert_eq!(a.k(), b.k());
    for (p, q) in a.pieces().iter().zip(b.pieces()) {
        assert!(polytope_equal(p, q, 0.0));
    }
}

fn load(cone: &str, dec: &str) -> Decomposition {
    let c = MomentCone::validate(&normals(cone)).unwrap();
    let cy = c.calabi_yau().unwrap();
    let d = parse_decomposition(&read(dec)).unwrap();
    Decomposition::new(&c, &cy, d.base_reeb, &d.pieces).unwrap()
}

#[test]
fn cone_files_match_corpus() {
    for (name, ns) in corpus::test_cones() {
        assert_eq!(normals(&format!("{name}.json")), ns, "{name}");
    }
    assert_eq!(normals("not_good.json"), corpus::not_good());
    let e = MomentCone::validate(&normals("no_gamma.json")).unwrap().calabi_yau().unwrap_err();
    assert_eq!(e, volmin::Error::NoCalabiYauVector);
}

#[test]
fn decomposition_files_match_corpus() {
    same_pieces(&load("conifold.json", "conifold_split_critical.json"), &corpus::conifold_split(corpus::conifold_critical()).2);
    same_pieces(&load("conifold.json", "conifold_split_311.json"), &corpus::conifold_split(qvec(&[3, 1, 1])).2);
    same_pieces(&load("dp3.json", "dp3_triangles.json"), &corpus::dp3_triangles().2);
    let (c, _, _) = corpus::conifold_split(corpus::conifold_critical());
    let whole = Decomposition::whole(&c, corpus::conifold_critical()).unwrap();
    same_pieces(&load("conifold.json", "conifold_whole.json"), &whole);
}
