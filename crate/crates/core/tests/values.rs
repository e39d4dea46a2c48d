//! Worked values, each checked against an independent computation.

use std::collections::BTreeSet;
use std::sync::Arc;

use pgroup::autom::{construct_noninner, order_of, Endo};
use pgroup::deriv::{derivation_space, inner_derivation, Derivation};
use pgroup::fpmod::{self, FpModule, Realization, DEFAULT_MODULE_CAP};
use pgroup::group::quotient;
use pgroup::oracle::{self, DEFAULT_ORACLE_CAP};
use pgroup::series::{self, Subgroup};
use pgroup::{catalog, Element, Error, Group, GroupHom};

fn group(name: &str) -> Group {
    Group::from_presentation(catalog::parse(name).unwrap()).unwrap()
}

fn el(v: &[u32]) -> Element {
    Element::from_exponents(v.to_vec())
}

/// Multiplication table straight from the defining relations of H(3):
/// `a^i b^j c^k` times `a^x b^y c^z` is `a^{i+x} b^{j+y} c^{k+z+jx}`.
fn heisenberg_by_hand(x: &[u32], y: &[u32]) -> Vec<u32> {
    vec![(x[0] + y[0]) % 3, (x[1] + y[1]) % 3, (x[2] + y[2] + x[1] * y[0]) % 3]
}

#[test]
fn heisenberg_collection_matches_hand_table() {
    let g = group("heisenberg:3");
    let pres = g.presentation();
    assert_eq!(pres.collect(&[(2, 1), (1, 1)]).unwrap(), el(&[1, 1, 1]));
    assert_eq!(pres.collect(&[(1, 3)]).unwrap(), el(&[0, 0, 0]));
    assert_eq!(pres.commutator(&pres.generator(1), &pres.generator(0)).unwrap(), el(&[0, 0, 1]));
    for x in g.enumerate() {
        for y in g.enumerate() {
            assert_eq!(pres.multiply(&x, &y).unwrap().exponents(), heisenberg_by_hand(x.exponents(), y.exponents()).as_slice());
        }
    }
}

#[test]
fn orders_of_d() {
    assert_eq!(group("d:2,3").order(), 27);
    assert_eq!(group("d:3,3").order(), 729);
    assert_eq!(group("d:2,5").order(), 125);
}

#[test]
fn d23_is_isomorphic_to_heisenberg() {
    let d = group("d:2,3");
    let h = group("heisenberg:3");
    let found = (0..27usize).any(|x| {
        (0..27usize).any(|y| {
            (0..27usize).any(|z| {
                let images = vec![h.element(x), h.element(y), h.element(z)];
                GroupHom::new(d.presentation_arc(), h.presentation_arc(), images).map(|f| f.kind(&h).is_iso()).unwrap_or(false)
            })
        })
    });
    assert!(found);
}

#[test]
fn quotients() {
    let h = group("heisenberg:3");
    let (q, _) = quotient(&h, series::center(&h).members()).unwrap();
    let q = Group::new(Arc::new(q)).unwrap();
    assert_eq!(q.order(), 9);
    assert!(q.is_abelian());
    assert!((0..9).all(|x| q.pow(x, 3) == 0));
    let d = group("d:2,3");
    let (q, _) = quotient(&d, series::frattini(&d).members()).unwrap();
    let q = Group::new(Arc::new(q)).unwrap();
    assert_eq!(q.order(), 9);
    assert!(q.is_abelian());
    let (same, pi) = quotient(&h, Subgroup::trivial(&h).members()).unwrap();
    assert_eq!(same.order(), 27);
    assert!(pi.kind(&Group::new(Arc::new(same)).unwrap()).is_iso());
}

#[test]
fn heisenberg_series_by_definition() {
    let g = group("heisenberg:3");
    // Center and Frattini by brute force over all elements.
    let central: Vec<usize> = (0..27).filter(|&x| (0..27).all(|y| g.mul(x, y) == g.mul(y, x))).collect();
    assert_eq!(series::center(&g).elements(), central.as_slice());
    assert_eq!(series::frattini(&g).elements(), central.as_slice());
    assert!(series::gamma3_agemo(&g).is_trivial());
    assert_eq!(series::min_generators(&g), 2);
    let r = series::hypothesis_report(&g);
    assert!(r.center_cyclic);
    assert!(r.main_hypothesis);
    assert_eq!(series::refine_chain(&g).t(), 1);
    assert_eq!(series::frattini(&group("d:2,3")).order(), 3);
}

#[test]
fn regular_dimensions() {
    let d = group("d:2,3");
    let (q, _) = quotient(&d, series::frattini(&d).members()).unwrap();
    let q = Group::new(Arc::new(q)).unwrap();
    assert_eq!(FpModule::regular(&q, DEFAULT_MODULE_CAP).unwrap().dim(), 9);
    assert_eq!(FpModule::regular(&group("cyclic:3,1"), DEFAULT_MODULE_CAP).unwrap().dim(), 3);
}

#[test]
fn cr_recognition() {
    let l = group("elem:3,2");
    let reg = Arc::new(FpModule::regular(&l, DEFAULT_MODULE_CAP).unwrap());
    let diag = fpmod::is_cr(&l, &reg, &[]).unwrap();
    assert!(diag.is_cr);
    assert_eq!(diag.h1_dim, 0);
    // F_3(C_3): brute force finds 9 derivations, all inner (dim M - dim C_M = 2).
    let c3 = group("cyclic:3,1");
    let reg3 = Arc::new(FpModule::regular(&c3, DEFAULT_MODULE_CAP).unwrap());
    assert_eq!(oracle::enumerate_derivations_bruteforce(&reg3).unwrap().len(), 9);
    assert_eq!(derivation_space(&reg3).unwrap().ider_dim(), 2);
    let triv = Arc::new(FpModule::trivial(l.presentation_arc(), 2));
    assert!(!fpmod::is_cr(&l, &triv, &[]).unwrap().is_cr);
    let one = Arc::new(FpModule::trivial(c3.presentation_arc(), 1));
    assert!(fpmod::is_cr(&c3, &one, &[]).unwrap().is_cr);
}

#[test]
fn theta_cr_dimension() {
    let d = group("d:2,3");
    let (q, pi) = quotient(&d, series::frattini(&d).members()).unwrap();
    let q = Group::new(Arc::new(q)).unwrap();
    let k = Arc::new(FpModule::regular(&q, DEFAULT_MODULE_CAP).unwrap().inflate(&pi).unwrap());
    let built = fpmod::theta_cr_build(&d, &k, &Subgroup::trivial(&d)).unwrap();
    assert_eq!(built.dim(), 10);
    let unchanged = fpmod::theta_cr_build(&d, &k, &series::frattini(&d)).unwrap();
    assert_eq!(&unchanged, k.as_ref());
}

#[test]
fn embedding_counts() {
    for name in ["cyclic:3,1", "elem:3,2"] {
        let g = group(name);
        let reg = FpModule::regular(&g, DEFAULT_MODULE_CAP).unwrap();
        let k2 = reg.submodule(&reg.socle_filtration()[1]).unwrap();
        assert_eq!(fpmod::submodule_embedding_count(&g, &k2).unwrap(), 1);
        assert_eq!(fpmod::submodule_embedding_count(&g, &FpModule::trivial(g.presentation_arc(), 1)).unwrap(), 1);
    }
}

#[test]
fn inner_derivations() {
    let g = group("heisenberg:3");
    let real = Realization::new(&g, &series::center(&g)).unwrap();
    assert!(inner_derivation(real.module(), &[0]).is_zero());
    assert!(inner_derivation(real.module(), &[1]).is_zero());
    let c3 = group("cyclic:3,1");
    let reg = Arc::new(FpModule::regular(&c3, DEFAULT_MODULE_CAP).unwrap());
    let s = derivation_space(&reg).unwrap();
    assert_eq!((s.der_dim(), s.ider_dim(), s.h1_dim()), (2, 2, 0));
}

/// Central automorphism `a -> ac` of H(3): order 3 and, contrary to a
/// tempting guess, conjugation by `b^-1`.
#[test]
fn heisenberg_central_automorphism() {
    let g = group("heisenberg:3");
    let real = Realization::new(&g, &series::center(&g)).unwrap();
    let delta = Derivation::new(Arc::clone(real.module()), vec![vec![1], vec![0], vec![0]]).unwrap();
    let psi = Endo::induce(&g, &delta, &real).unwrap();
    assert_eq!(psi.images(), &[el(&[1, 0, 1]), el(&[0, 1, 0]), el(&[0, 0, 1])]);
    assert!(psi.is_automorphism(&g));
    assert_eq!(order_of(&g, &psi, Some((&delta, &real))).unwrap(), 3);
    let w = psi.inner_witness(&g).unwrap();
    assert_eq!(Endo::inner(&g, w), psi);
    // a -> ab is the non-inner one
    let pres = g.presentation();
    let phi = Endo::new(g.presentation_arc(), vec![el(&[1, 1, 0]), pres.generator(1), pres.generator(2)]).unwrap();
    assert!(!phi.is_inner(&g));
    assert_eq!(phi.order_naive(&g).unwrap(), 3);
}

#[test]
fn inner_witness_is_in_the_right_coset() {
    let g = group("heisenberg:3");
    let z = series::center(&g);
    for x in 0..27 {
        let w = Endo::inner(&g, x).inner_witness(&g).unwrap();
        assert!(z.contains(g.mul(g.inv(x), w)));
    }
    assert_eq!(Endo::identity(g.presentation_arc()).inner_witness(&g), Some(0));
    assert!(Endo::inner(&g, g.gen(2)).is_identity());
}

#[test]
fn collapse_map_is_not_an_automorphism() {
    let g = group("heisenberg:3");
    let id = g.presentation().identity();
    let collapse = Endo::new(g.presentation_arc(), vec![id.clone(), id.clone(), id]).unwrap();
    assert!(!collapse.is_automorphism(&g));
    assert!(Endo::identity(g.presentation_arc()).is_automorphism(&g));
}

#[test]
fn automorphism_groups() {
    let h = oracle::enumerate_automorphisms(&group("heisenberg:3"), DEFAULT_ORACLE_CAP).unwrap();
    assert_eq!((h.len(), h.inner_count), (432, 9));
    assert_eq!(oracle::enumerate_automorphisms(&group("cyclic:3,1"), DEFAULT_ORACLE_CAP).unwrap().len(), 2);
    assert_eq!(oracle::enumerate_automorphisms(&group("elem:3,2"), DEFAULT_ORACLE_CAP).unwrap().len(), (9 - 1) * (9 - 3));
}

#[test]
fn pipeline_certificate_lies_in_oracle_set() {
    let g = group("heisenberg:3");
    let cert = construct_noninner(&g).unwrap().certificate;
    let all = oracle::enumerate_automorphisms(&g, DEFAULT_ORACLE_CAP).unwrap();
    assert!(all.contains(&cert.gen_images));
    let phi = Endo::new(g.presentation_arc(), cert.gen_images.clone()).unwrap();
    assert!(!phi.is_inner(&g));
    assert_eq!(phi.order_naive(&g).unwrap(), 3);
}

#[test]
fn order_27_catalog() {
    let names: Vec<String> = catalog::names(3, 27).into_iter().filter(|n| catalog::parse(n).unwrap().order() == 27).collect();
    assert_eq!(names.len(), 5);
    let mut exists = BTreeSet::new();
    for name in &names {
        let row = oracle::verify_group(&group(name), DEFAULT_ORACLE_CAP);
        assert!(row.agree, "{name}");
        if row.oracle == "exists" {
            exists.insert(name.clone());
        } else {
            assert_eq!(row.pipeline, "n/a (abelian)");
        }
    }
    assert_eq!(exists, ["heisenberg:3".to_string(), "meta:3".to_string()].into_iter().collect());
}

#[test]
fn abelian_is_out_of_scope() {
    assert!(matches!(construct_noninner(&group("cyclic:9,1")), Err(Error::OutOfScope(_))));
}

#[test]
fn commutator_derivation_value() {
    let d = Arc::new(catalog::parse("d:2,3").unwrap());
    let a = Arc::new(fpmod::module_a(&d).unwrap());
    let delta = fpmod::commutator_derivation(&a, 0, 1).unwrap();
    // [y1, y2] is sent to -a.
    let c = d.commutator(&d.generator(0), &d.generator(1)).unwrap();
    assert_eq!(delta.eval(&c), vec![2, 0, 0]);
}
