//! The category `C(F, G, T)` of quadruples `(A, B, u, v)` with
//! `v ∘ u = T_A`, for `A` perverse on `X₀` and `B` a local system on `S`.
//!
//! Kernels and cokernels are computed componentwise and certified against
//! their universal properties rather than trusted.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::perverse::{
    fgt_on_morphism, functor_f_g_t, is_perverse_closed, Fgt, FgtMorphism, PerverseClosedReport,
    PerverseOnX0, StratifiedSpace,
};
use crate::poset::Subspace;
use crate::sheaf::{cokernel, corestrict, factor_through_epi, hom_basis, kernel, LocalSystem, Sheaf, SheafMorphism};

/// A stratified space with a fixed perverse closed set `K`.
#[derive(Debug, Clone)]
pub struct CftgContext {
    x: StratifiedSpace,
    k: Subspace,
    report: PerverseClosedReport,
}

impl CftgContext {
    /// Fails unless `K` passes [`is_perverse_closed`] on `tests`.
    pub fn new(x: &StratifiedSpace, k: &Subspace, tests: &[PerverseOnX0]) -> Result<Self> {
        let report = is_perverse_closed(x, k, tests)?;
        if !report.pass {
            return Err(Error::Precondition(format!(
                "{{{}}} is not a perverse closed set",
                report.candidate.join(",")
            )));
        }
        Ok(CftgContext {
            x: x.clone(),
            k: k.clone(),
            report,
        })
    }

    pub fn space(&self) -> &StratifiedSpace {
        &self.x
    }

    pub fn closed_set(&self) -> &Subspace {
        &self.k
    }

    /// The complement `L` of `K`.
    pub fn open_set(&self) -> Subspace {
        self.k.complement(self.x.space())
    }

    pub fn report(&self) -> &PerverseClosedReport {
        &self.report
    }

    pub fn fgt(&self, a: &PerverseOnX0) -> Result<Fgt> {
        functor_f_g_t(&self.x, &self.k, a)
    }

    /// A local system on `S` in this context.
    pub fn local_system_on_s(&self, s: &Sheaf) -> Result<LocalSystem> {
        LocalSystem::new(s.on_space(self.x.stratum().sub())?)
    }

    pub fn object(&self, a: &PerverseOnX0, b: &Sheaf, u: &SheafMorphism, v: &SheafMorphism) -> Result<CftgObject> {
        let fgt = self.fgt(a)?;
        self.object_with(fgt, b, u, v)
    }

    /// Like [`CftgContext::object`] with `F`, `G`, `T` already computed.
    pub fn object_with(&self, fgt: Fgt, b: &Sheaf, u: &SheafMorphism, v: &SheafMorphism) -> Result<CftgObject> {
        let o = CftgObject::new_unchecked(self, fgt, b, u, v)?;
        validate_object(self, &o)?;
        Ok(o)
    }

    pub fn zero_object(&self) -> Result<CftgObject> {
        let fgt = self.fgt(&PerverseOnX0::zero(&self.x))?;
        let b = Sheaf::zero(self.x.stratum().sub().clone());
        let u = SheafMorphism::zero(fgt.fa.sheaf(), &b);
        let v = SheafMorphism::zero(&b, fgt.ga.sheaf());
        self.object_with(fgt, &b, &u, &v)
    }
}

/// `(A, B, u: F(A) -> B, v: B -> G(A))`.
#[derive(Debug, Clone)]
pub struct CftgObject {
    pub fgt: Fgt,
    pub b: LocalSystem,
    pub u: SheafMorphism,
    pub v: SheafMorphism,
}

impl CftgObject {
    /// Builds the quadruple without checking `v ∘ u = T_A`.
    pub fn new_unchecked(ctx: &CftgContext, fgt: Fgt, b: &Sheaf, u: &SheafMorphism, v: &SheafMorphism) -> Result<Self> {
        let b = ctx.local_system_on_s(b)?;
        let u = u.with_ends(fgt.fa.sheaf(), b.sheaf())?;
        let v = v.with_ends(b.sheaf(), fgt.ga.sheaf())?;
        u.check_natural()?;
        v.check_natural()?;
        Ok(CftgObject { fgt, b, u, v })
    }

    pub fn a(&self) -> &PerverseOnX0 {
        &self.fgt.object
    }

    pub fn b(&self) -> &Sheaf {
        self.b.sheaf()
    }

    pub fn is_zero(&self) -> bool {
        self.a().sheaf().is_zero() && self.b().is_zero()
    }
}

/// Checks `v ∘ u = T_A` at every point of `S`.
pub fn validate_object(ctx: &CftgContext, o: &CftgObject) -> Result<()> {
    let vu = o.v.compose(&o.u)?;
    let s = ctx.x.stratum().sub();
    for p in 0..s.len() {
        if vu.comp(p) != o.fgt.t.comp(p) {
            return Err(Error::Violation(format!(
                "v∘u ≠ T_A at {}: {:?} vs {:?}",
                s.name(p),
                vu.comp(p),
                o.fgt.t.comp(p)
            )));
        }
    }
    Ok(())
}

/// `(a, b)` with `b ∘ u = u' ∘ F(a)` and `v' ∘ b = G(a) ∘ v`.
#[derive(Debug, Clone)]
pub struct CftgMorphism {
    pub source: CftgObject,
    pub target: CftgObject,
    pub a: SheafMorphism,
    pub b: SheafMorphism,
    pub image: FgtMorphism,
}

impl CftgMorphism {
    pub fn new(ctx: &CftgContext, source: &CftgObject, target: &CftgObject, a: &SheafMorphism, b: &SheafMorphism) -> Result<Self> {
        let m = CftgMorphism::new_unchecked(ctx, source, target, a, b)?;
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(ctx: &CftgContext, source: &CftgObject, target: &CftgObject, a: &SheafMorphism, b: &SheafMorphism) -> Result<Self> {
        let image = fgt_on_morphism(&ctx.x, a, &source.fgt, &target.fgt)?;
        Ok(CftgMorphism {
            source: source.clone(),
            target: target.clone(),
            a: a.with_ends(source.a().sheaf(), target.a().sheaf())?,
            b: b.with_ends(source.b(), target.b())?,
            image,
        })
    }

    /// The two prism faces.
    pub fn validate(&self) -> Result<()> {
        self.b.check_natural()?;
        let left = self.b.compose(&self.source.u)?;
        let right = self.target.u.compose(&self.image.f)?;
        if left.components() != right.components() {
            return Err(Error::Violation("b∘u ≠ u'∘F(a)".into()));
        }
        let left = self.target.v.compose(&self.b)?;
        let right = self.image.g.compose(&self.source.v)?;
        if left.components() != right.components() {
            return Err(Error::Violation("v'∘b ≠ G(a)∘v".into()));
        }
        Ok(())
    }

    pub fn identity(ctx: &CftgContext, o: &CftgObject) -> Result<Self> {
        CftgMorphism::new(
            ctx,
            o,
            o,
            &SheafMorphism::identity(o.a().sheaf()),
            &SheafMorphism::identity(o.b()),
        )
    }

    pub fn zero(ctx: &CftgContext, source: &CftgObject, target: &CftgObject) -> Result<Self> {
        CftgMorphism::new(
            ctx,
            source,
            target,
            &SheafMorphism::zero(source.a().sheaf(), target.a().sheaf()),
            &SheafMorphism::zero(source.b(), target.b()),
        )
    }

    /// `self ∘ first`.
    pub fn compose(&self, ctx: &CftgContext, first: &CftgMorphism) -> Result<Self> {
        CftgMorphism::new(
            ctx,
            &first.source,
            &self.target,
            &self.a.compose(&first.a)?,
            &self.b.compose(&first.b)?,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_iso(&self) -> bool {
        self.a.is_iso() && self.b.is_iso()
    }

    pub fn same_components(&self, other: &CftgMorphism) -> bool {
        self.a.components() == other.a.components() && self.b.components() == other.b.components()
    }
}

fn combine(source: &Sheaf, target: &Sheaf, basis: &[SheafMorphism], coeffs: &[Rational]) -> Result<SheafMorphism> {
    let mut acc = SheafMorphism::zero(source, target);
    for (m, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&m.scale(c))?;
        }
    }
    Ok(acc)
}

/// Pairs `(a, b)` spanning the morphisms `source -> target` that satisfy the
/// homogeneous linear `constraint` in addition to the prism conditions.
fn hom_space_where(
    ctx: &CftgContext,
    source: &CftgObject,
    target: &CftgObject,
    constraint: impl Fn(&SheafMorphism, &SheafMorphism) -> Result<Vec<Rational>>,
) -> Result<Vec<(SheafMorphism, SheafMorphism)>> {
    let basis_a = hom_basis(source.a().sheaf(), target.a().sheaf());
    let basis_b = hom_basis(source.b(), target.b());
    let zero_a = SheafMorphism::zero(source.a().sheaf(), target.a().sheaf());
    let zero_b = SheafMorphism::zero(source.b(), target.b());
    let mut columns = Vec::new();
    let residual = |a: &SheafMorphism, b: &SheafMorphism, img: &FgtMorphism| -> Result<Vec<Rational>> {
        let mut out = b.compose(&source.u)?.sub(&target.u.compose(&img.f)?)?.flatten();
        out.extend(target.v.compose(b)?.sub(&img.g.compose(&source.v)?)?.flatten());
        out.extend(constraint(a, b)?);
        Ok(out)
    };
    for a in &basis_a {
        let img = fgt_on_morphism(&ctx.x, a, &source.fgt, &target.fgt)?;
        columns.push(residual(a, &zero_b, &img)?);
    }
    let zero_img = fgt_on_morphism(&ctx.x, &zero_a, &source.fgt, &target.fgt)?;
    for b in &basis_b {
        columns.push(residual(&zero_a, b, &zero_img)?);
    }
    let n = columns.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let rows = columns[0].len();
    let mut m = Matrix::zeros(rows, n);
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    let ker = m.kernel();
    (0..ker.cols())
        .map(|j| {
            let coeffs: Vec<Rational> = (0..n).map(|i| ker.get(i, j).clone()).collect();
            let (ca, cb) = coeffs.split_at(basis_a.len());
            Ok((
                combine(source.a().sheaf(), target.a().sheaf(), &basis_a, ca)?,
                combine(source.b(), target.b(), &basis_b, cb)?,
            ))
        })
        .collect()
}

/// A basis of `Hom(source, target)` in `C(F, G, T)`.
pub fn hom_space(ctx: &CftgContext, source: &CftgObject, target: &CftgObject) -> Result<Vec<CftgMorphism>> {
    hom_space_where(ctx, source, target, |_, _| Ok(Vec::new()))?
        .into_iter()
        .map(|(a, b)| CftgMorphism::new(ctx, source, target, &a, &b))
        .collect()
}

fn random_combination(
    ctx: &CftgContext,
    rng: &mut impl Rng,
    source: &CftgObject,
    target: &CftgObject,
    basis: &[(SheafMorphism, SheafMorphism)],
) -> Result<CftgMorphism> {
    let coeffs: Vec<Rational> = basis.iter().map(|_| Rational::from_int(rng.gen_range(-2..=2))).collect();
    let pa: Vec<SheafMorphism> = basis.iter().map(|p| p.0.clone()).collect();
    let pb: Vec<SheafMorphism> = basis.iter().map(|p| p.1.clone()).collect();
    CftgMorphism::new(
        ctx,
        source,
        target,
        &combine(source.a().sheaf(), target.a().sheaf(), &pa, &coeffs)?,
        &combine(source.b(), target.b(), &pb, &coeffs)?,
    )
}

/// A random element of `Hom(source, target)` with small integer
/// coordinates in the solver's basis.
pub fn random_morphism(ctx: &CftgContext, rng: &mut impl Rng, source: &CftgObject, target: &CftgObject) -> Result<CftgMorphism> {
    let basis = hom_space_where(ctx, source, target, |_, _| Ok(Vec::new()))?;
    random_combination(ctx, rng, source, target, &basis)
}

/// A random perverse object on `X₀` of rank at most `max_rank`, drawn from
/// a freshly seeded [`default_test_family`](crate::perverse::default_test_family).
pub fn random_perverse(x: &StratifiedSpace, rng: &mut impl Rng, max_rank: usize) -> Result<PerverseOnX0> {
    let n = rng.gen_range(1..=max_rank);
    let family = crate::perverse::default_test_family(x, max_rank, rng.gen())?;
    let candidates: Vec<&PerverseOnX0> = family.iter().filter(|p| p.rank() == n).collect();
    Ok(candidates[rng.gen_range(0..candidates.len())].clone())
}

/// A random object: `A` from [`random_perverse`], `B` trivial of rank at
/// most `max_rank`, `u` random and `v` a random solution of `v ∘ u = T_A`.
/// Falls back to `(A, F(A), id, T_A)` when no `v` exists for the drawn `u`.
pub fn random_object(ctx: &CftgContext, rng: &mut impl Rng, max_rank: usize) -> Result<CftgObject> {
    let a = random_perverse(&ctx.x, rng, max_rank)?;
    let fgt = ctx.fgt(&a)?;
    let s = ctx.x.stratum().sub().clone();
    let m = rng.gen_range(0..=max_rank);
    let b = Sheaf::constant(s, m);
    let fa = fgt.fa.sheaf().clone();
    let ga = fgt.ga.sheaf().clone();
    let basis_u = hom_basis(&fa, &b);
    let coeffs: Vec<Rational> = basis_u.iter().map(|_| Rational::from_int(rng.gen_range(-2..=2))).collect();
    let u = combine(&fa, &b, &basis_u, &coeffs)?;
    let basis_v = hom_basis(&b, &ga);
    let target = fgt.t.flatten();
    if !basis_v.is_empty() && !target.is_empty() {
        let cols: Vec<Vec<Rational>> = basis_v
            .iter()
            .map(|v| Ok(v.compose(&u)?.flatten()))
            .collect::<Result<_>>()?;
        let mut mat = Matrix::zeros(target.len(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, e) in c.iter().enumerate() {
                mat.set(i, j, e.clone());
            }
        }
        if let Some(sol) = mat.solve(&Matrix::column(target.clone()))? {
            let ker = mat.kernel();
            let mut coeffs: Vec<Rational> = (0..cols.len()).map(|i| sol.get(i, 0).clone()).collect();
            for j in 0..ker.cols() {
                let c = Rational::from_int(rng.gen_range(-1..=1));
                for (i, e) in coeffs.iter_mut().enumerate() {
                    *e += &(ker.get(i, j).clone() * c.clone());
                }
            }
            let v = combine(&b, &ga, &basis_v, &coeffs)?;
            return ctx.object_with(fgt, &b, &u, &v);
        }
    } else if fgt.t.is_zero() {
        let v = SheafMorphism::zero(&b, &ga);
        return ctx.object_with(fgt, &b, &u, &v);
    }
    let t = fgt.t.clone();
    ctx.object_with(fgt.clone(), fgt.fa.sheaf(), &SheafMorphism::identity(fgt.fa.sheaf()), &t)
}

/// Kernel object with its mono.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub object: CftgObject,
    pub mono: CftgMorphism,
}

/// Cokernel object with its epi.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub object: CftgObject,
    pub epi: CftgMorphism,
}

fn require_mono(m: &SheafMorphism, what: &str) -> Result<()> {
    if m.components().iter().all(|c| c.rank() == c.cols()) {
        Ok(())
    } else {
        Err(Error::Model(format!("{what} is not a monomorphism")))
    }
}

fn require_epi(m: &SheafMorphism, what: &str) -> Result<()> {
    if m.components().iter().all(|c| c.rank() == c.rows()) {
        Ok(())
    } else {
        Err(Error::Model(format!("{what} is not an epimorphism")))
    }
}

/// `(ker a, ker b)` with `u₀`, `v₀` obtained by corestriction.
pub fn kernel_of(ctx: &CftgContext, m: &CftgMorphism) -> Result<Kernel> {
    let (ka, incl_a) = kernel(&m.a)?;
    let (kb, incl_b) = kernel(&m.b)?;
    let a0 = PerverseOnX0::new(&ctx.x, &LocalSystem::new(ka)?, format!("ker({})", m.source.a().label()))?;
    let fgt0 = ctx.fgt(&a0)?;
    let img = fgt_on_morphism(&ctx.x, &incl_a, &fgt0, &m.source.fgt)?;
    require_mono(&img.g, "G(ker a -> A)")?;
    let u0 = corestrict(&m.source.u.compose(&img.f)?, &incl_b)?;
    let v0 = corestrict(&m.source.v.compose(&incl_b)?, &img.g)?;
    let object = ctx.object_with(fgt0, &kb, &u0, &v0)?;
    let mono = CftgMorphism::new(ctx, &object, &m.source, &incl_a, &incl_b)?;
    Ok(Kernel { object, mono })
}

/// `(coker a, coker b)` with `u₁`, `v₁` induced through the projections.
pub fn cokernel_of(ctx: &CftgContext, m: &CftgMorphism) -> Result<Cokernel> {
    let (ca, proj_a) = cokernel(&m.a)?;
    let (cb, proj_b) = cokernel(&m.b)?;
    let a1 = PerverseOnX0::new(&ctx.x, &LocalSystem::new(ca)?, format!("coker({})", m.target.a().label()))?;
    let fgt1 = ctx.fgt(&a1)?;
    let img = fgt_on_morphism(&ctx.x, &proj_a, &m.target.fgt, &fgt1)?;
    require_epi(&img.f, "F(A' -> coker a)")?;
    let model = |e: Error| Error::Model(format!("induced structure map does not exist: {e}"));
    let u1 = factor_through_epi(&proj_b.compose(&m.target.u)?, &img.f).map_err(model)?;
    let v1 = factor_through_epi(&img.g.compose(&m.target.v)?, &proj_b).map_err(model)?;
    let object = ctx.object_with(fgt1, &cb, &u1, &v1)?;
    let epi = CftgMorphism::new(ctx, &m.target, &object, &proj_a, &proj_b)?;
    Ok(Cokernel { object, epi })
}

/// The unique `t: z.source -> ker` with `mono ∘ t = z`, if `z` factors.
pub fn factor_through_kernel(ctx: &CftgContext, k: &Kernel, z: &CftgMorphism) -> Result<CftgMorphism> {
    let a = corestrict(&z.a, &k.mono.a)?;
    let b = corestrict(&z.b, &k.mono.b)?;
    CftgMorphism::new(ctx, &z.source, &k.object, &a, &b)
}

/// The unique `t: coker -> z.target` with `t ∘ epi = z`, if `z` factors.
pub fn factor_through_cokernel(ctx: &CftgContext, c: &Cokernel, z: &CftgMorphism) -> Result<CftgMorphism> {
    let a = factor_through_epi(&z.a, &c.epi.a)?;
    let b = factor_through_epi(&z.b, &c.epi.b)?;
    CftgMorphism::new(ctx, &c.object, &z.target, &a, &b)
}

/// Checks the kernel's universal property against random cones from `test`:
/// every `z: test -> source` with `m ∘ z = 0` factors, uniquely because the
/// mono is injective. Returns the number of cones checked.
pub fn check_kernel_universal(ctx: &CftgContext, m: &CftgMorphism, k: &Kernel, test: &CftgObject, rng: &mut impl Rng, trials: usize) -> Result<usize> {
    require_mono(&k.mono.a, "kernel mono")?;
    require_mono(&k.mono.b, "kernel mono")?;
    if !m.compose(ctx, &k.mono)?.is_zero() {
        return Err(Error::Violation("m ∘ ker ≠ 0".into()));
    }
    let basis = hom_space_where(ctx, test, &m.source, |a, b| {
        let mut out = m.a.compose(a)?.flatten();
        out.extend(m.b.compose(b)?.flatten());
        Ok(out)
    })?;
    for _ in 0..trials {
        let z = random_combination(ctx, rng, test, &m.source, &basis)?;
        let t = factor_through_kernel(ctx, k, &z)?;
        if !k.mono.compose(ctx, &t)?.same_components(&z) {
            return Err(Error::Violation("kernel factorization does not reproduce the cone".into()));
        }
    }
    Ok(trials)
}

/// Dual of [`check_kernel_universal`].
pub fn check_cokernel_universal(ctx: &CftgContext, m: &CftgMorphism, c: &Cokernel, test: &CftgObject, rng: &mut impl Rng, trials: usize) -> Result<usize> {
    require_epi(&c.epi.a, "cokernel epi")?;
    require_epi(&c.epi.b, "cokernel epi")?;
    if !c.epi.compose(ctx, m)?.is_zero() {
        return Err(Error::Violation("coker ∘ m ≠ 0".into()));
    }
    let basis = hom_space_where(ctx, &m.target, test, |a, b| {
        let mut out = a.compose(&m.a)?.flatten();
        out.extend(b.compose(&m.b)?.flatten());
        Ok(out)
    })?;
    for _ in 0..trials {
        let z = random_combination(ctx, rng, &m.target, test, &basis)?;
        let t = factor_through_cokernel(ctx, c, &z)?;
        if !t.compose(ctx, &c.epi)?.same_components(&z) {
            return Err(Error::Violation("cokernel factorization does not reproduce the cocone".into()));
        }
    }
    Ok(trials)
}

/// Coimage, image and the canonical map between them.
#[derive(Debug, Clone)]
pub struct ImageCoimage {
    pub coimage: Cokernel,
    pub image: Kernel,
    pub canonical: CftgMorphism,
}

impl ImageCoimage {
    pub fn is_iso(&self) -> bool {
        self.canonical.is_iso()
    }
}

/// Builds `coim = coker(ker m)`, `im = ker(coker m)` and the canonical map
/// `coim -> im` through which `m` factors.
pub fn image_coimage_compare(ctx: &CftgContext, m: &CftgMorphism) -> Result<ImageCoimage> {
    let k = kernel_of(ctx, m)?;
    let coimage = cokernel_of(ctx, &k.mono)?;
    let c = cokernel_of(ctx, m)?;
    let image = kernel_of(ctx, &c.epi)?;
    let through_coim = factor_through_cokernel(ctx, &coimage, m)?;
    let canonical = factor_through_kernel(ctx, &image, &through_coim)?;
    Ok(ImageCoimage {
        coimage,
        image,
        canonical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn ctx() -> CftgContext {
        let x = fixtures::strat_disk();
        let tests = crate::perverse::default_test_family(&x, 2, 7).unwrap();
        CftgContext::new(&x, &fixtures::k_good(&x), &tests).unwrap()
    }

    fn through_fa(ctx: &CftgContext, lambda: i64) -> CftgObject {
        let fgt = ctx.fgt(&fixtures::shifted_local_system(ctx.space(), q(lambda))).unwrap();
        let fa = fgt.fa.sheaf().clone();
        let t = fgt.t.clone();
        ctx.object_with(fgt, &fa, &SheafMorphism::identity(&fa), &t).unwrap()
    }

    #[test]
    fn triangle_validation() {
        let ctx = ctx();
        through_fa(&ctx, 1);
        through_fa(&ctx, 2);
        let fgt = ctx.fgt(&fixtures::shifted_local_system(ctx.space(), q(2))).unwrap();
        let ga = fgt.ga.sheaf().clone();
        let t = fgt.t.clone();
        ctx.object_with(fgt, &ga, &t, &SheafMorphism::identity(&ga)).unwrap();

        let fgt = ctx.fgt(&fixtures::shifted_local_system(ctx.space(), q(1))).unwrap();
        let b = Sheaf::constant(ctx.space().stratum().sub().clone(), 1);
        // T_A = 0 here while v∘u = 1
        let id = SheafMorphism::identity(&b);
        let bad = CftgObject::new_unchecked(&ctx, fgt, &b, &id, &id).unwrap();
        assert!(matches!(validate_object(&ctx, &bad), Err(Error::Violation(_))));
    }

    #[test]
    fn kernel_and_cokernel_of_identity_and_zero() {
        let ctx = ctx();
        let o = through_fa(&ctx, 2);
        let id = CftgMorphism::identity(&ctx, &o).unwrap();
        assert!(kernel_of(&ctx, &id).unwrap().object.is_zero());
        assert!(cokernel_of(&ctx, &id).unwrap().object.is_zero());
        let zero = CftgMorphism::zero(&ctx, &o, &o).unwrap();
        let k = kernel_of(&ctx, &zero).unwrap();
        assert!(k.mono.is_iso());
        let c = cokernel_of(&ctx, &zero).unwrap();
        assert!(c.epi.is_iso());
    }

    #[test]
    fn sum_map_kernel() {
        let ctx = ctx();
        let x = ctx.space().clone();
        let l1 = fixtures::shifted_local_system(&x, q(1));
        let sum = PerverseOnX0::direct_sum(&x, &[&l1, &l1]).unwrap();
        let b = Sheaf::constant(x.stratum().sub().clone(), 1);
        let mk = |a: &PerverseOnX0| {
            let fgt = ctx.fgt(a).unwrap();
            let u = SheafMorphism::zero(fgt.fa.sheaf(), &b);
            let v = SheafMorphism::zero(&b, fgt.ga.sheaf());
            ctx.object_with(fgt, &b, &u, &v).unwrap()
        };
        let (src, tgt) = (mk(&sum), mk(&l1));
        let a = SheafMorphism::from_fn(src.a().sheaf(), tgt.a().sheaf(), |_| Matrix::from_ints(&[[1, 1]])).unwrap();
        let m = CftgMorphism::new(&ctx, &src, &tgt, &a, &SheafMorphism::zero(&b, &b)).unwrap();
        let k = kernel_of(&ctx, &m).unwrap();
        assert_eq!(k.object.a().rank(), 1);
        assert_eq!(k.object.b().dims(), b.dims());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        check_kernel_universal(&ctx, &m, &k, &src, &mut rng, 3).unwrap();
        let c = cokernel_of(&ctx, &m).unwrap();
        assert_eq!(c.object.a().rank(), 0);
        check_cokernel_universal(&ctx, &m, &c, &tgt, &mut rng, 3).unwrap();
        assert!(image_coimage_compare(&ctx, &m).unwrap().is_iso());
    }

    #[test]
    fn random_objects_validate() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let o = random_object(&ctx, &mut rng, 2).unwrap();
            validate_object(&ctx, &o).unwrap();
            let e = random_morphism(&ctx, &mut rng, &o, &o).unwrap();
            e.validate().unwrap();
        }
    }
}
