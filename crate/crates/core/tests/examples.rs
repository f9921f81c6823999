//! Worked examples on the disk, each checked against a value computed by hand.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use pervglue::cftg::{cokernel_of, kernel_of, CftgContext, CftgMorphism, CftgObject};
use pervglue::complex::{hom_homotopy_classes, SheafComplex};
use pervglue::derived::{gamma_closed, global_sections, ClosedInclusion};
use pervglue::fixtures;
use pervglue::linalg::Matrix;
use pervglue::mv::{build_b_phi, functor_c, functor_p, roundtrip_cp, roundtrip_pc};
use pervglue::perverse::{
    default_test_family, functor_f_g_t, is_perverse, is_perverse_closed, PerverseOnX0, StratifiedSpace, Witness,
};
use pervglue::poset::Subspace;
use pervglue::sheaf::{LocalSystem, Sheaf, SheafMorphism};

use common::*;

fn nonzero(c: &SheafComplex, x: usize) -> BTreeMap<i64, usize> {
    c.cohomology_dims_at(x).into_iter().filter(|(_, n)| *n > 0).collect()
}

fn small_family(x: &StratifiedSpace) -> Vec<PerverseOnX0> {
    vec![
        fixtures::shifted_local_system(x, q(1)),
        fixtures::shifted_local_system(x, q(2)),
        PerverseOnX0::new(x, &fixtures::jordan_local_system(), "jordan").unwrap(),
    ]
}

fn ctx() -> CftgContext {
    let x = fixtures::strat_disk();
    let tests = small_family(&x);
    CftgContext::new(&x, &fixtures::k_good(&x), &tests).unwrap()
}

fn l1(ctx: &CftgContext) -> PerverseOnX0 {
    fixtures::shifted_local_system(ctx.space(), q(1))
}

fn point_sheaf(ctx: &CftgContext, rank: usize) -> Sheaf {
    Sheaf::constant(ctx.space().stratum().sub().clone(), rank)
}

fn object(ctx: &CftgContext, a: &PerverseOnX0, b_rank: usize, u: Option<Matrix>, v: Option<Matrix>) -> CftgObject {
    let fgt = ctx.fgt(a).unwrap();
    let b = point_sheaf(ctx, b_rank);
    let u = match u {
        Some(m) => SheafMorphism::new(fgt.fa.sheaf().clone(), b.clone(), vec![m]).unwrap(),
        None => SheafMorphism::zero(fgt.fa.sheaf(), &b),
    };
    let v = match v {
        Some(m) => SheafMorphism::new(b.clone(), fgt.ga.sheaf().clone(), vec![m]).unwrap(),
        None => SheafMorphism::zero(&b, fgt.ga.sheaf()),
    };
    ctx.object_with(fgt, &b, &u, &v).unwrap()
}

#[test]
fn sector_has_one_dimensional_sections() {
    let p = Arc::new(fixtures::circle());
    let sector = p.indices_of(&["b", "c", "d"]).unwrap();
    for lambda in [1, 2, -1] {
        let l = fixtures::circle_local_system(q(lambda));
        let c = SheafComplex::concentrated(l.sheaf(), 0).restrict(&sector);
        assert_eq!(global_sections(&c).cohomology_dims(), BTreeMap::from([(0, 1)]));
    }
}

#[test]
fn sections_of_constant_sheaves() {
    let seg = Arc::new(fixtures::segment());
    let c = SheafComplex::concentrated(&Sheaf::constant(seg, 1), 0);
    assert_eq!(global_sections(&c).cohomology_dims(), BTreeMap::from([(0, 1)]));
    let circ = Arc::new(fixtures::circle());
    let c = SheafComplex::concentrated(&Sheaf::constant(circ, 1), 0);
    assert_eq!(global_sections(&c).cohomology_dims(), BTreeMap::from([(0, 1), (1, 1)]));
}

#[test]
fn local_cohomology_along_the_stratum() {
    let x = fixtures::strat_disk();
    let c = SheafComplex::concentrated(&Sheaf::constant(x.space().clone(), 1), 0);
    let s = ClosedInclusion::new(x.space(), &[0]).unwrap();
    let g = gamma_closed(&s, &c).unwrap();
    // cone(unit) has H¹ = H¹(circle) at s; the [-1] shift moves it to degree 2
    let cone = pervglue::complex::cone(&g.open.unit).unwrap();
    assert_eq!(nonzero(&cone.complex, 0), BTreeMap::from([(1, 1)]));
    assert_eq!(nonzero(&g.complex, 0), BTreeMap::from([(2, 1)]));

    let k = ClosedInclusion::new(x.space(), fixtures::k_good(&x).members()).unwrap();
    let g = gamma_closed(&k, &fixtures::pushed_local_system(&x, q(1))).unwrap();
    assert_eq!(nonzero(&g.complex, 0), BTreeMap::from([(0, 1)]));
}

#[test]
fn no_maps_from_ic_to_the_skyscraper() {
    let x = fixtures::strat_disk();
    let sky = SheafComplex::concentrated(&Sheaf::skyscraper(x.space().clone(), 0, 1), 0);
    assert_eq!(hom_homotopy_classes(&fixtures::ic1(&x), &sky).unwrap().dim, 0);
}

#[test]
fn perversity_of_basic_complexes() {
    let x = fixtures::strat_disk();
    let sky = SheafComplex::concentrated(&Sheaf::skyscraper(x.space().clone(), 0, 1), 0);
    assert!(is_perverse(&x, &sky).unwrap().is_perverse());
    assert!(is_perverse(&x, &fixtures::pushed_local_system(&x, q(1))).unwrap().is_perverse());
    let constant = SheafComplex::concentrated(&Sheaf::constant(x.space().clone(), 1), 0);
    assert!(!is_perverse(&x, &constant).unwrap().is_perverse());
}

#[test]
fn perverse_closed_sets_on_the_small_family() {
    let x = fixtures::strat_disk();
    let tests = small_family(&x);
    assert!(is_perverse_closed(&x, &fixtures::k_good(&x), &tests).unwrap().pass);

    let rep = is_perverse_closed(&x, &x.closed_subspace(&["s"]).unwrap(), &tests).unwrap();
    match &rep.witnesses[0] {
        Witness::Nonvanishing { test, degree, dims, .. } => {
            assert_eq!(test, "L(1)");
            assert_eq!(*degree, 0);
            assert_eq!(dims, &vec![("s".to_string(), 1)]);
        }
        w => panic!("unexpected witness {w:?}"),
    }

    let rep = is_perverse_closed(&x, &Subspace::whole(x.space()), &tests).unwrap();
    assert!(matches!(&rep.witnesses[0], Witness::Nonvanishing { test, degree: -1, .. } if test == "L(1)"));
}

#[test]
fn default_family_is_reproducible() {
    let x = fixtures::strat_disk();
    let labels = |seed| -> Vec<String> {
        default_test_family(&x, 1, seed).unwrap().iter().map(|p| p.label().to_string()).collect()
    };
    let fam = labels(0);
    assert!(fam.iter().any(|l| l == "trivial rank 1"));
    assert!(fam.iter().any(|l| l.starts_with("holonomy")));
    assert_eq!(fam, labels(0));
}

#[test]
fn fgt_on_rank_one_and_trivial_systems() {
    let x = fixtures::strat_disk();
    let k = fixtures::k_good(&x);
    for (lambda, rank_t) in [(1, 0), (2, 1), (-1, 1)] {
        let f = functor_f_g_t(&x, &k, &fixtures::shifted_local_system(&x, q(lambda))).unwrap();
        assert_eq!((f.fa.rank(), f.ga.rank(), f.t.comp(0).rank()), (Some(1), Some(1), rank_t));
    }
    for n in 1..=4 {
        let ls = LocalSystem::new(Sheaf::constant(x.open_part().sub().clone(), n)).unwrap();
        let a = PerverseOnX0::new(&x, &ls, "trivial").unwrap();
        let f = functor_f_g_t(&x, &k, &a).unwrap();
        assert_eq!((f.fa.rank(), f.ga.rank()), (Some(n), Some(n)));
        assert!(f.t.is_zero());
    }
}

#[test]
fn quadruple_must_compose_to_t() {
    let ctx = ctx();
    let a = l1(&ctx);
    let fgt = ctx.fgt(&a).unwrap();
    let b = point_sheaf(&ctx, 1);
    let u = SheafMorphism::new(fgt.fa.sheaf().clone(), b.clone(), vec![Matrix::identity(1)]).unwrap();
    let v = SheafMorphism::new(b.clone(), fgt.ga.sheaf().clone(), vec![Matrix::identity(1)]).unwrap();
    assert!(ctx.object(&a, &b, &u, &v).is_err());
}

#[test]
fn kernel_and_cokernel_of_sum_maps() {
    let ctx = ctx();
    let x = ctx.space();
    let a = l1(&ctx);
    let a2 = PerverseOnX0::direct_sum(x, &[&a, &a]).unwrap();
    let big = object(&ctx, &a2, 1, None, None);
    let small = object(&ctx, &a, 0, None, None);
    let sum = SheafMorphism::from_fn(big.a().sheaf(), small.a().sheaf(), |_| Matrix::from_ints(&[[1, 1]])).unwrap();
    let m = CftgMorphism::new(&ctx, &big, &small, &sum, &SheafMorphism::zero(big.b(), small.b())).unwrap();
    let k = kernel_of(&ctx, &m).unwrap();
    assert_eq!((k.object.a().rank(), k.object.b().dim(0)), (1, 1));

    let diag = SheafMorphism::from_fn(small.a().sheaf(), big.a().sheaf(), |_| Matrix::from_ints(&[[1], [1]])).unwrap();
    let m = CftgMorphism::new(&ctx, &small, &big, &diag, &SheafMorphism::zero(small.b(), big.b())).unwrap();
    let c = cokernel_of(&ctx, &m).unwrap();
    assert_eq!((c.object.a().rank(), c.object.b().dim(0)), (1, 1));
}

#[test]
fn c_of_the_pushforward_has_rank_one_b() {
    let ctx = ctx();
    let c = functor_c(&ctx, &fixtures::pushed_local_system(ctx.space(), q(1))).unwrap();
    assert_eq!(c.object.b().dim(0), 1);
    assert!(c.object.v.is_iso());
}

#[test]
fn glued_extension_at_s() {
    let ctx = ctx();
    let a = l1(&ctx);
    let without = build_b_phi(&ctx, &object(&ctx, &a, 0, None, None)).unwrap();
    let with = build_b_phi(&ctx, &object(&ctx, &a, 1, None, None)).unwrap();
    let s = 0;
    assert_eq!(with.glued.sheaf().dim(s), without.glued.sheaf().dim(s) + 1);
    assert_eq!(without.glued.sheaf().dim(s), 0);
}

#[test]
fn p_on_small_quadruples() {
    let ctx = ctx();
    let x = ctx.space();
    let a = l1(&ctx);
    let killed = functor_p(&ctx, &object(&ctx, &a, 1, Some(Matrix::identity(1)), None)).unwrap();
    assert!(nonzero(&killed.complex, 0).is_empty());
    let j_shriek = fixtures::extension_by_zero(x, q(1));
    for pt in 0..x.space().len() {
        assert_eq!(nonzero(&killed.complex, pt), nonzero(&j_shriek, pt));
    }

    let ic = functor_p(&ctx, &object(&ctx, &a, 0, None, None)).unwrap();
    assert_eq!(nonzero(&ic.complex, 0), BTreeMap::from([(-1, 1)]));

    let zero = PerverseOnX0::zero(x);
    let sky = functor_p(&ctx, &object(&ctx, &zero, 1, None, None)).unwrap();
    assert_eq!(nonzero(&sky.complex, 0), BTreeMap::from([(0, 1)]));
    for pt in 1..x.space().len() {
        assert!(nonzero(&sky.complex, pt).is_empty());
    }
}

#[test]
fn cp_round_trip_on_small_quadruples() {
    let ctx = ctx();
    let a = l1(&ctx);
    let o = object(&ctx, &a, 0, None, None);
    let cp = roundtrip_cp(&ctx, &o).unwrap();
    assert!(cp.iso.is_iso());
    assert_eq!(cp.c.object.b().dim(0), 0);

    let o = object(&ctx, &PerverseOnX0::zero(ctx.space()), 1, None, None);
    let cp = roundtrip_cp(&ctx, &o).unwrap();
    assert!(cp.iso.is_iso());
    assert_eq!(cp.iso.b.comp(0), &Matrix::identity(1));
}

#[test]
fn pc_round_trip_on_ic() {
    let ctx = ctx();
    let ic = fixtures::ic1(ctx.space());
    let pc = roundtrip_pc(&ctx, &ic).unwrap();
    assert!(pc.zigzag.all_quasi_iso().unwrap());
    assert_eq!(nonzero(pc.zigzag.start(), 0), BTreeMap::from([(-1, 1)]));
    assert_eq!(nonzero(pc.zigzag.end(), 0), nonzero(pc.zigzag.start(), 0));
    for lambda in [2, -1] {
        let f = fixtures::pushed_local_system(ctx.space(), q(lambda));
        assert!(roundtrip_pc(&ctx, &f).unwrap().zigzag.all_quasi_iso().unwrap());
    }
}
