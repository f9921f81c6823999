mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pervglue::cftg::{random_morphism, random_object, validate_object, CftgContext, CftgMorphism};
use pervglue::complex::{cohomology_sheaf, cone, find_homotopy, is_quasi_iso, ChainMap, SheafComplex};
use pervglue::fixtures;
use pervglue::gluing::{gluing_functor_gf, quasi_inverse_witnesses, restriction_functor_rf};
use pervglue::linalg::{Matrix, Rational};
use pervglue::mv::{functor_p, functor_p_on_morphism, restriction_witness};
use pervglue::perverse::{default_test_family, is_perverse, PerverseOnX0};
use pervglue::poset::Poset;
use pervglue::sheaf::{cokernel, kernel, Sheaf, SheafMorphism};

use common::*;

fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            Matrix::from_vec(r, c, v.into_iter().map(Rational::from_int).collect()).unwrap()
        })
    })
}

fn square(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(-3i64..=3, n * n)
            .prop_map(move |v| Matrix::from_vec(n, n, v.into_iter().map(Rational::from_int).collect()).unwrap())
    })
}

/// Random posets on up to five points: `i < j` only for `i < j` as integers.
fn poset() -> impl Strategy<Value = Poset> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let mut rel = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if bits[i * n + j] {
                        rel.push((names[i].clone(), names[j].clone()));
                    }
                }
            }
            Poset::new(&names, &rel).unwrap()
        })
    })
}

fn disk_ctx() -> CftgContext {
    let x = fixtures::strat_disk();
    let tests = default_test_family(&x, 2, 7).unwrap();
    CftgContext::new(&x, &fixtures::k_good(&x), &tests).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(m in matrix(5)) {
        prop_assert_eq!(m.rank() + m.kernel().cols(), m.cols());
        prop_assert!((&m * &m.kernel()).is_zero());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rref_is_idempotent(m in matrix(5)) {
        let r = m.rref();
        prop_assert_eq!(r.matrix.rref().matrix, r.matrix.clone());
    }

    #[test]
    fn inverse_is_two_sided(m in square(4)) {
        if let Some(inv) = m.inverse() {
            prop_assert!((&m * &inv).is_identity());
            prop_assert!((&inv * &m).is_identity());
        } else {
            prop_assert!(m.rank() < m.rows());
        }
    }

    #[test]
    fn solve_returns_a_solution(m in matrix(4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, m.cols(), 1);
        let b = &m * &x;
        let sol = m.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(&m * &sol, b);
    }

    #[test]
    fn open_and_closed_sets_are_complementary(p in poset(), bits in prop::collection::vec(any::<bool>(), 5)) {
        let set: Vec<usize> = (0..p.len()).filter(|&i| bits[i]).collect();
        let comp = p.complement(&set);
        prop_assert_eq!(p.is_up_set(&set), p.is_down_set(&comp));
        for x in 0..p.len() {
            prop_assert!(p.is_up_set(&p.up_set(x)));
            prop_assert!(p.is_down_set(&p.down_set(x)));
        }
    }

    #[test]
    fn order_is_transitive(p in poset()) {
        for x in 0..p.len() {
            prop_assert!(!p.lt(x, x));
            for y in 0..p.len() {
                for z in 0..p.len() {
                    if p.lt(x, y) && p.lt(y, z) {
                        prop_assert!(p.lt(x, z));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_and_cokernel_are_exact(seed in any::<u64>()) {
        let dec = disk_decomposition();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = random_triple(&dec, &mut rng, 2);
        let t2 = random_triple(&dec, &mut rng, 2);
        let m = random_triple_morphism(&mut rng, &t1, &t2);
        let phi = pervglue::gluing::gluing_on_morphisms(&m).unwrap();
        let (_, k) = kernel(&phi).unwrap();
        let (_, c) = cokernel(&phi).unwrap();
        prop_assert!(phi.compose(&k).unwrap().is_zero());
        prop_assert!(c.compose(&phi).unwrap().is_zero());
        for x in 0..phi.source().space().len() {
            let n = phi.comp(x);
            prop_assert_eq!(k.comp(x).cols(), n.cols() - n.rank());
            prop_assert_eq!(c.comp(x).rows(), n.rows() - n.rank());
        }
    }

    #[test]
    fn gluing_round_trips(seed in any::<u64>()) {
        let dec = disk_decomposition();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triple(&dec, &mut rng, 3);
        let glued = gluing_functor_gf(&t).unwrap();
        let (a, b) = quasi_inverse_witnesses(glued.sheaf(), &t).unwrap();
        prop_assert!(a.is_iso() && b.is_iso());
        let back = restriction_functor_rf(&dec, glued.sheaf()).unwrap();
        prop_assert_eq!(back.closed_sheaf().dims(), t.closed_sheaf().dims());
    }

    #[test]
    fn cone_of_identity_is_acyclic(seed in any::<u64>(), deg in -2i64..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let l = circle_system(&Arc::new(fixtures::circle()), &mixed_holonomy(&mut rng, n));
        let c = SheafComplex::concentrated(l.sheaf(), deg);
        let cone = cone(&ChainMap::identity(&c)).unwrap();
        prop_assert!(cone.complex.is_acyclic());
        prop_assert!(cone.iota.compose(&ChainMap::identity(&c)).is_ok());
        prop_assert_eq!(c.shift(1).shift(-1), c);
    }

    #[test]
    fn truncation_keeps_low_cohomology(lambda in prop::sample::select(vec![1i64, 2, -1, 3]), k in -2i64..=1) {
        let x = fixtures::strat_disk();
        let r = fixtures::pushed_local_system(&x, q(lambda));
        let (tau, incl) = r.truncate_le(k).unwrap();
        for j in r.degrees() {
            let (a, b) = (cohomology_sheaf(&tau, j).unwrap(), cohomology_sheaf(&r, j).unwrap());
            if j <= k {
                prop_assert_eq!(a.sheaf.dims(), b.sheaf.dims());
            } else {
                prop_assert!(a.sheaf.is_zero());
            }
        }
        let nothing_above = (k + 1..r.degrees().end).all(|j| cohomology_sheaf(&r, j).unwrap().sheaf.is_zero());
        prop_assert_eq!(is_quasi_iso(&incl).unwrap(), nothing_above);
    }

    #[test]
    fn augmentation_is_quasi_iso(seed in any::<u64>()) {
        let x = fixtures::strat_disk();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let l = circle_system(x.open_part().sub(), &mixed_holonomy(&mut rng, n));
        let c = SheafComplex::concentrated(l.sheaf(), -1);
        let pushed = x.open_part().pushforward(&c).unwrap();
        prop_assert!(is_quasi_iso(&x.open_part().augmentation(&c, &pushed).unwrap()).unwrap());
        let a = PerverseOnX0::new(&x, &l, "l").unwrap();
        prop_assert!(is_perverse(&x, &x.pushforward(&a.complex()).unwrap().truncate_le(-1).unwrap().0).unwrap().is_perverse());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cftg_morphisms_compose(seed in any::<u64>()) {
        let ctx = disk_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o1 = random_object(&ctx, &mut rng, 2).unwrap();
        let o2 = random_object(&ctx, &mut rng, 2).unwrap();
        validate_object(&ctx, &o1).unwrap();
        let m = random_morphism(&ctx, &mut rng, &o1, &o2).unwrap();
        m.validate().unwrap();
        let id1 = CftgMorphism::identity(&ctx, &o1).unwrap();
        let id2 = CftgMorphism::identity(&ctx, &o2).unwrap();
        prop_assert!(m.compose(&ctx, &id1).unwrap().same_components(&m));
        prop_assert!(id2.compose(&ctx, &m).unwrap().same_components(&m));
    }

    #[test]
    fn p_images_are_perverse_and_functorial(seed in any::<u64>()) {
        let ctx = disk_ctx();
        let x = ctx.space();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o1 = random_object(&ctx, &mut rng, 2).unwrap();
        let o2 = random_object(&ctx, &mut rng, 2).unwrap();
        let (p1, p2) = (functor_p(&ctx, &o1).unwrap(), functor_p(&ctx, &o2).unwrap());
        prop_assert!(is_perverse(x, &p1.complex).unwrap().is_perverse());
        restriction_witness(&ctx, &o1, &p1).unwrap();
        // RΓ_S P(ℷ) has nothing below -d
        let s = pervglue::derived::ClosedInclusion::new(x.space(), x.stratum().members()).unwrap();
        let g = pervglue::derived::gamma_closed(&s, &p1.complex).unwrap();
        for k in g.complex.degrees().filter(|&k| k < -x.d()) {
            prop_assert!(cohomology_sheaf(&g.complex, k).unwrap().sheaf.is_zero());
        }
        let id = CftgMorphism::identity(&ctx, &o1).unwrap();
        let pid = functor_p_on_morphism(&ctx, &id, &p1, &p1).unwrap();
        prop_assert!(find_homotopy(&pid.chain, &ChainMap::identity(&p1.complex)).unwrap().is_some());
        let zero = CftgMorphism::zero(&ctx, &o1, &o2).unwrap();
        let pz = functor_p_on_morphism(&ctx, &zero, &p1, &p2).unwrap();
        prop_assert!(find_homotopy(&pz.chain, &ChainMap::zero(&p1.complex, &p2.complex)).unwrap().is_some());
    }
}

#[test]
fn skyscraper_morphism_scalars() {
    let p = Arc::new(fixtures::disk());
    let s = Sheaf::skyscraper(p, 0, 2);
    let two = SheafMorphism::scalar(&s, q(2));
    assert!(two.is_iso());
    assert!(SheafMorphism::scalar(&s, q(0)).is_zero());
}
