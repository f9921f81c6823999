//! End-to-end checks on the disk fixtures. Runs without the libtest harness
//! and prints one line per criterion.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pervglue::cftg::{
    check_cokernel_universal, check_kernel_universal, cokernel_of, image_coimage_compare, kernel_of, random_morphism,
    random_object, CftgContext, CftgObject,
};
use pervglue::complex::{fill_in_ambiguity, is_quasi_iso, SheafComplex};
use pervglue::derived::{gamma_closed, ClosedInclusion};
use pervglue::fixtures;
use pervglue::gluing::{
    counit_iso, gluing_functor_gf, glued_map, quasi_inverse_witnesses, restriction_functor_rf, restriction_on_morphisms,
    unit_iso,
};
use pervglue::linalg::Matrix;
use pervglue::mv::{functor_p, functor_p_on_morphism, restriction_witness, roundtrip_cp, roundtrip_pc, PImage};
use pervglue::perverse::{default_test_family, is_perverse, is_perverse_closed, PerverseOnX0, StratifiedSpace, Witness};
use pervglue::poset::Subspace;
use pervglue::sheaf::Sheaf;

use common::*;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(ctx: &'static str) -> impl Fn(E) -> String {
    move |e| format!("{ctx}: {e}")
}

fn context(x: &StratifiedSpace) -> CftgContext {
    let tests = default_test_family(x, 3, 7).unwrap();
    CftgContext::new(x, &fixtures::k_good(x), &tests).unwrap()
}

fn perverse_fixtures(x: &StratifiedSpace) -> Vec<(&'static str, SheafComplex)> {
    vec![
        ("Q_S", SheafComplex::concentrated(&Sheaf::skyscraper(x.space().clone(), 0, 1), 0)),
        ("IC1", fixtures::ic1(x)),
        ("Rj*L1[1]", fixtures::pushed_local_system(x, q(1))),
        ("Rj*L2[1]", fixtures::pushed_local_system(x, q(2))),
        ("Rj*L-1[1]", fixtures::pushed_local_system(x, q(-1))),
        ("j!L1[1]", fixtures::extension_by_zero(x, q(1))),
    ]
}

fn gluing_equivalence() -> Outcome {
    let dec = disk_decomposition();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let triples: Vec<_> = (0..100).map(|_| random_triple(&dec, &mut rng, 3)).collect();
    for (i, t) in triples.iter().enumerate() {
        let glued = gluing_functor_gf(t).map_err(err("glue"))?;
        let (a, b) = quasi_inverse_witnesses(glued.sheaf(), t).map_err(err("witnesses"))?;
        check(a.is_iso() && b.is_iso(), || format!("triple {i}: witnesses not invertible"))?;
    }
    for i in 0..50 {
        let t1 = &triples[rng.gen_range(0..triples.len())];
        let t2 = &triples[rng.gen_range(0..triples.len())];
        let m = random_triple_morphism(&mut rng, t1, t2);
        let (g1, g2) = (gluing_functor_gf(t1).unwrap(), gluing_functor_gf(t2).unwrap());
        let (r1, r2) = (
            restriction_functor_rf(&dec, g1.sheaf()).unwrap(),
            restriction_functor_rf(&dec, g2.sheaf()).unwrap(),
        );
        // R∘G side: m ∘ ε₁ = ε₂ ∘ R(G(m))
        let gm = glued_map(&m, &g1, &g2).map_err(err("G(m)"))?;
        let rgm = restriction_on_morphisms(&gm, &r1, &r2).map_err(err("R(G(m))"))?;
        let (e1, e2) = (counit_iso(&g1, &r1).unwrap(), counit_iso(&g2, &r2).unwrap());
        let lhs = m.compose(&e1).unwrap();
        let rhs = e2.compose(&rgm).unwrap();
        check(
            lhs.on_closed() == rhs.on_closed() && lhs.on_open() == rhs.on_open(),
            || format!("morphism {i}: counit square fails"),
        )?;
        // G∘R side: φ ∘ η₁ = η₂ ∘ G(R(φ)) for φ = G(m)
        let (gr1, gr2) = (gluing_functor_gf(&r1).unwrap(), gluing_functor_gf(&r2).unwrap());
        let grphi = glued_map(&rgm, &gr1, &gr2).unwrap();
        let (u1, u2) = (unit_iso(g1.sheaf(), &gr1).unwrap(), unit_iso(g2.sheaf(), &gr2).unwrap());
        check(
            gm.compose(&u1).unwrap() == u2.compose(&grphi).unwrap(),
            || format!("morphism {i}: unit square fails"),
        )?;
    }
    Ok("100 triples round-trip, 50 naturality squares commute".into())
}

fn perverse_closed_sets() -> Outcome {
    let x = fixtures::strat_disk();
    let p = x.space();
    let tests = default_test_family(&x, 3, 7).unwrap();
    let good = is_perverse_closed(&x, &fixtures::k_good(&x), &tests).map_err(err("K_good"))?;
    check(good.pass, || format!("K_good rejected: {:?}", good.witnesses))?;

    let point = is_perverse_closed(&x, &x.closed_subspace(&["s"]).unwrap(), &tests).unwrap();
    let w = point.witnesses.first().ok_or("K={s} passed")?;
    check(
        matches!(w, Witness::Nonvanishing { degree: 0, .. }) && w.total() == 1,
        || format!("K={{s}} witness {w:?}"),
    )?;

    let all = is_perverse_closed(&x, &Subspace::whole(p), &tests).unwrap();
    check(
        !all.pass && all.witnesses.iter().all(|w| matches!(w, Witness::Nonvanishing { degree: -1, .. })),
        || format!("K=X witnesses {:?}", all.witnesses),
    )?;

    let mut filtered = 0;
    for bits in 0u32..(1 << p.len()) {
        let members: Vec<usize> = (0..p.len()).filter(|i| bits & (1 << i) != 0).collect();
        if !p.is_down_set(&members) || members.contains(&0) {
            continue;
        }
        let k = Subspace::closed(p, &members).unwrap();
        let rep = is_perverse_closed(&x, &k, &tests).unwrap();
        check(rep.prefiltered && !rep.pass, || format!("{members:?} not prefiltered"))?;
        filtered += 1;
    }

    let kincl = ClosedInclusion::new(p, fixtures::k_good(&x).members()).unwrap();
    for (name, f) in perverse_fixtures(&x) {
        let g = gamma_closed(&kincl, &f).unwrap();
        for pt in 0..p.len() {
            let dims: BTreeMap<i64, usize> = g.complex.cohomology_dims_at(pt).into_iter().filter(|(_, n)| *n > 0).collect();
            check(dims.keys().all(|&k| k == -x.d()), || format!("RΓ_K {name} at {}: {dims:?}", p.name(pt)))?;
        }
    }
    Ok(format!(
        "K_good passes on {} tests, K={{s}} and K=X fail as expected, {filtered} candidate(s) prefiltered",
        tests.len()
    ))
}

fn fgt_dimensions() -> Outcome {
    let x = fixtures::strat_disk();
    let k = fixtures::k_good(&x);
    let sub = x.open_part().sub().clone();
    let all: Vec<usize> = (0..sub.len()).collect();
    let l = sub.indices_of(&["b", "c", "d"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = BTreeMap::new();
    for i in 0..20 {
        let n = 1 + i % 4;
        let m = mixed_holonomy(&mut rng, n);
        let ls = circle_system(&sub, &m);
        let a = PerverseOnX0::new(&x, &ls, "sample").unwrap();
        let fgt = pervglue::perverse::functor_f_g_t(&x, &k, &a).map_err(err("F, G, T"))?;
        let expected = (&m - &Matrix::identity(n)).rank();
        let (h0l, h1k, oracle) = les_oracle(ls.sheaf(), &all, &l);
        let got = (fgt.fa.rank(), fgt.ga.rank(), fgt.t.comp(0).rank());
        check(
            got == (Some(n), Some(n), expected) && (h0l, h1k, oracle) == (n, n, expected),
            || format!("sample {i}: n={n} library {got:?} oracle {:?} rank(M-I)={expected}", (h0l, h1k, oracle)),
        )?;
        *seen.entry((n, expected)).or_insert(0) += 1;
    }
    Ok(format!("20 samples agree with the oracle; (n, rank T) seen: {:?}", seen.keys().collect::<Vec<_>>()))
}

fn abelian() -> Outcome {
    let x = fixtures::strat_disk();
    let ctx = context(&x);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let objects: Vec<CftgObject> = (0..12).map(|_| random_object(&ctx, &mut rng, 2).unwrap()).collect();
    let mut nonzero = 0;
    for i in 0..50 {
        let s = &objects[rng.gen_range(0..objects.len())];
        let t = &objects[rng.gen_range(0..objects.len())];
        let m = random_morphism(&ctx, &mut rng, s, t).map_err(err("morphism"))?;
        nonzero += usize::from(!m.is_zero());
        let k = kernel_of(&ctx, &m).map_err(err("kernel"))?;
        let c = cokernel_of(&ctx, &m).map_err(err("cokernel"))?;
        let test = &objects[rng.gen_range(0..objects.len())];
        check_kernel_universal(&ctx, &m, &k, test, &mut rng, 3).map_err(|e| format!("morphism {i}: {e}"))?;
        check_cokernel_universal(&ctx, &m, &c, test, &mut rng, 3).map_err(|e| format!("morphism {i}: {e}"))?;
        let ic = image_coimage_compare(&ctx, &m).map_err(err("image"))?;
        check(ic.is_iso(), || format!("morphism {i}: coimage -> image not invertible"))?;
    }
    Ok(format!("50 morphisms ({nonzero} nonzero): universal properties hold, image ≅ coimage"))
}

fn p_images(ctx: &CftgContext) -> Vec<CftgObject> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..100).map(|_| random_object(ctx, &mut rng, 3).unwrap()).collect()
}

fn p_is_perverse(ctx: &CftgContext, objects: &[CftgObject]) -> Outcome {
    for (i, o) in objects.iter().enumerate() {
        let p = functor_p(ctx, o).map_err(|e| format!("object {i}: {e}"))?;
        let rep = is_perverse(ctx.space(), &p.complex).unwrap();
        check(rep.is_perverse(), || format!("object {i}: {:?}", rep.failures))?;
        restriction_witness(ctx, o, &p).map_err(|e| format!("object {i}: {e}"))?;
    }
    Ok(format!("{} P-images perverse, restrictions to X0 recovered", objects.len()))
}

fn quasi_inverse(ctx: &CftgContext, objects: &[CftgObject]) -> Outcome {
    let mut images = Vec::new();
    for (i, o) in objects.iter().enumerate() {
        let cp = roundtrip_cp(ctx, o).map_err(|e| format!("CP on object {i}: {e}"))?;
        check(cp.iso.is_iso(), || format!("CP on object {i}: not invertible"))?;
        if i < 50 {
            images.push(cp.p.complex);
        }
    }
    let x = ctx.space();
    let named = perverse_fixtures(x);
    for (name, f) in named.iter().map(|(n, f)| (n.to_string(), f)).chain(
        images.iter().enumerate().map(|(i, f)| (format!("P-image {i}"), f)),
    ) {
        let pc = roundtrip_pc(ctx, f).map_err(|e| format!("PC on {name}: {e}"))?;
        check(pc.zigzag.all_quasi_iso().unwrap(), || format!("PC on {name}: zig-zag not quasi-iso"))?;
    }
    Ok(format!(
        "{} CP isos; PC zig-zags on {} fixtures and {} P-images",
        objects.len(),
        named.len(),
        images.len()
    ))
}

fn fill_ins(ctx: &CftgContext, objects: &[CftgObject]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool = &objects[..10];
    let images: Vec<PImage> = pool.iter().map(|o| functor_p(ctx, o).unwrap()).collect();
    for i in 0..50 {
        let (a, b) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
        let m = random_morphism(ctx, &mut rng, &pool[a], &pool[b]).unwrap();
        let pm = functor_p_on_morphism(ctx, &m, &images[a], &images[b]).map_err(|e| format!("instance {i}: {e}"))?;
        pm.fill.left_square.validate().map_err(|e| format!("instance {i}: {e}"))?;
        pm.fill.right_square.validate().map_err(|e| format!("instance {i}: {e}"))?;
        let amb = fill_in_ambiguity(&images[a].triangle, &images[b].triangle).unwrap();
        check(pm.fill.unique && amb == 0, || format!("instance {i}: ambiguity {amb}"))?;
    }
    Ok("50 fill-ins found, each unique".into())
}

fn derived_sanity() -> Outcome {
    let x = fixtures::strat_disk();
    let s = 0;
    for lambda in [1, 2, -1, 3] {
        let r = fixtures::pushed_local_system(&x, q(lambda));
        let at_s = r.stalk(s);
        let expected = usize::from(lambda == 1);
        let got = (at_s.cohomology_dim(-1), at_s.cohomology_dim(0));
        check(got == (expected, expected), || format!("λ={lambda}: (R⁰, R¹) at s = {got:?}"))?;
    }
    let j = x.open_part();
    let mut systems = vec![fixtures::jordan_local_system()];
    systems.extend([1, 2, -1].map(|l| fixtures::circle_local_system(q(l))));
    let mut count = 0;
    for ls in &systems {
        for deg in [-1, 0] {
            let c = SheafComplex::concentrated(ls.sheaf(), deg);
            let pushed = j.pushforward(&c).unwrap();
            let aug = j.augmentation(&c, &pushed).unwrap();
            check(is_quasi_iso(&aug).unwrap(), || format!("augmentation in degree {deg} not a quasi-iso"))?;
            count += 1;
        }
    }
    for (name, f) in perverse_fixtures(&x) {
        let restricted = j.restrict(&f).unwrap();
        let pushed = j.pushforward(&restricted).unwrap();
        let aug = j.augmentation(&restricted, &pushed).unwrap();
        check(is_quasi_iso(&aug).unwrap(), || format!("augmentation on {name} not a quasi-iso"))?;
        count += 1;
    }
    Ok(format!("stalks of R^k j_* match, {count} augmentations are quasi-isomorphisms"))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let x = fixtures::strat_disk();
    let ctx = context(&x);
    let objects = p_images(&ctx);
    let results: Vec<(usize, &str, Outcome)> = std::thread::scope(|sc| {
        let (ctx, objects) = (&ctx, &objects);
        let jobs: Vec<(usize, &str, std::thread::ScopedJoinHandle<'_, Outcome>)> = vec![
            (1, "gluing equivalence", sc.spawn(gluing_equivalence)),
            (2, "perverse closed sets", sc.spawn(perverse_closed_sets)),
            (3, "F, G, T dimensions", sc.spawn(fgt_dimensions)),
            (4, "abelian category", sc.spawn(abelian)),
            (5, "P lands in perverse sheaves", sc.spawn(move || p_is_perverse(ctx, objects))),
            (6, "P and C quasi-inverse", sc.spawn(move || quasi_inverse(ctx, objects))),
            (7, "fill-in uniqueness", sc.spawn(move || fill_ins(ctx, objects))),
            (8, "derived functor sanity", sc.spawn(derived_sanity)),
        ];
        jobs.into_iter()
            .map(|(n, name, h)| (n, name, h.join().unwrap_or_else(|_| Err("panicked".into()))))
            .collect()
    });
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n} ({name}): PASS: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {msg}");
            }
        }
    }
    println!("acceptance: {}/8 passed in {:.1} s", 8 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
