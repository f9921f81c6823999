//! The functors `C` from perverse complexes to quadruples `(A, B, u, v)` and
//! `P` back, with explicit witnesses for both round trips.
//!
//! `P(A, B, u, v)` is realised as the complex `τ≤-d-1 RΓ_L Rj_*A` with one
//! extra term `B̃` in degree `-d`, where `B̃` glues `B` on `S` to
//! `j⁻¹H^{-d}(RΓ_K Rj_*A)` on `X₀` along `v`.

use std::collections::BTreeMap;

use crate::cftg::{CftgContext, CftgMorphism, CftgObject};
use crate::complex::{
    cohomology_sheaf, cone, fill_in, union_of, Arrow, ChainMap, Cohomology, FillIn, SheafComplex, Triangle, ZigZag,
};
use crate::derived::{gamma_closed, gamma_closed_map, gamma_open_map, ClosedInclusion, GammaClosed};
use crate::error::{Error, Result};
use crate::gluing::{
    canonical_map, glued_map, gluing_functor_gf, restriction_functor_rf, Decomposition, Glued, GluingMorphism,
    GluingTriple,
};
use crate::linalg::{Matrix, Rational};
use crate::perverse::{connecting_on_cohomology, is_perverse, PerverseOnX0, StratifiedSpace};
use crate::sheaf::{corestrict, LocalSystem, Sheaf, SheafMorphism};

fn k_inclusion(ctx: &CftgContext) -> Result<ClosedInclusion> {
    ClosedInclusion::new(ctx.space().space(), ctx.closed_set().members())
}

fn decomposition(x: &StratifiedSpace) -> Result<Decomposition> {
    Decomposition::new(x.space(), x.stratum().members())
}

fn theorem(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Theorem(format!("{what}: {e}"))
}

fn invert(m: &SheafMorphism, what: &str) -> Result<SheafMorphism> {
    m.inverse()
        .ok_or_else(|| Error::Theorem(format!("{what} is not invertible")))
}

/// Restricts `f: X -> Y` to subcomplexes `X' -> X` and `Y' -> Y`; fails if
/// `f` does not carry `X'` into `Y'`.
pub fn restrict_chain_map(f: &ChainMap, source: &ChainMap, target: &ChainMap) -> Result<ChainMap> {
    let (src, tgt) = (source.source(), target.source());
    let mut comp = BTreeMap::new();
    for k in union_of(src.degrees(), tgt.degrees()) {
        if src.term(k).is_zero() || tgt.term(k).is_zero() {
            continue;
        }
        let m = f.comp(k).compose(&source.comp(k))?;
        comp.insert(k, corestrict(&m, &target.comp(k))?);
    }
    ChainMap::new(src.clone(), tgt.clone(), comp)
}

/// `tau` followed by `top` in degree `top_deg`, joined by `top_diff`.
pub fn appended(tau: &SheafComplex, top_deg: i64, top: &Sheaf, top_diff: &SheafMorphism) -> Result<SheafComplex> {
    let r = tau.degrees();
    let lo = if r.is_empty() { top_deg } else { r.start.min(top_deg) };
    let below = tau.padded(lo..top_deg);
    let mut terms: Vec<Sheaf> = (lo..top_deg).map(|k| below.term(k).clone()).collect();
    let mut diffs: Vec<SheafMorphism> = (lo..top_deg - 1).map(|k| below.diff(k)).collect();
    if lo < top_deg {
        diffs.push(top_diff.with_ends(below.term(top_deg - 1), top)?);
    }
    terms.push(top.clone());
    SheafComplex::new(tau.space().clone(), lo, terms, diffs)
}

/// The map between appended complexes given by `lower` below `top_deg` and
/// `top` in degree `top_deg`.
pub fn appended_map(
    source: &SheafComplex,
    target: &SheafComplex,
    lower: &ChainMap,
    top_deg: i64,
    top: &SheafMorphism,
) -> Result<ChainMap> {
    let mut comp = BTreeMap::new();
    for k in union_of(source.degrees(), target.degrees()) {
        if k < top_deg {
            comp.insert(k, lower.comp(k).with_ends(source.term(k), target.term(k))?);
        }
    }
    comp.insert(top_deg, top.with_ends(source.term(top_deg), target.term(top_deg))?);
    ChainMap::new(source.clone(), target.clone(), comp)
}

/// Local cohomology of a complex `N` along `K` in the two degrees that
/// matter, with the truncation `τ≤-d-1 RΓ_L N`.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub complex: SheafComplex,
    pub gamma: GammaClosed,
    /// `H^{-d-1}(RΓ_L N)`.
    pub h_open: Cohomology,
    /// `H^{-d}(RΓ_K N)`.
    pub h_closed: Cohomology,
    /// The connecting map `h_open -> h_closed`.
    pub t: SheafMorphism,
    pub tau: SheafComplex,
    pub tau_incl: ChainMap,
    d: i64,
}

/// `W ≃ N` together with `W -> E_N`, where `E_N` is `τ` with
/// `H^{-d}(RΓ_K N)` appended along `T`.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub complex: SheafComplex,
    pub to_complex: ChainMap,
    pub standard: SheafComplex,
    pub to_standard: ChainMap,
}

impl LocalData {
    pub fn new(ctx: &CftgContext, n: &SheafComplex) -> Result<Self> {
        let gamma = gamma_closed(&k_inclusion(ctx)?, n)?;
        let d = ctx.space().d();
        let h_open = cohomology_sheaf(&gamma.open.complex, -d - 1)?;
        let h_closed = cohomology_sheaf(&gamma.complex, -d)?;
        let t = connecting_on_cohomology(&gamma, &h_open, &h_closed)?;
        LocalData::assemble(d, n, gamma, h_open, h_closed, t)
    }

    pub fn from_fgt(ctx: &CftgContext, fgt: &crate::perverse::Fgt) -> Result<Self> {
        LocalData::assemble(
            ctx.space().d(),
            &fgt.pushed,
            fgt.gamma.clone(),
            fgt.f_cohomology.clone(),
            fgt.g_cohomology.clone(),
            fgt.t_full.clone(),
        )
    }

    fn assemble(
        d: i64,
        n: &SheafComplex,
        gamma: GammaClosed,
        h_open: Cohomology,
        h_closed: Cohomology,
        t: SheafMorphism,
    ) -> Result<Self> {
        let (tau, tau_incl) = gamma.open.complex.truncate_le(-d - 1)?;
        Ok(LocalData {
            complex: n.clone(),
            gamma,
            h_open,
            h_closed,
            t,
            tau,
            tau_incl,
            d,
        })
    }

    /// `τ^{-d-1} -> H^{-d-1}(RΓ_L N)`.
    pub fn class_on_tau(&self) -> Result<SheafMorphism> {
        self.h_open.class_of(&self.tau_incl.comp(-self.d - 1))
    }

    /// `τ` with `top` appended along `top_map ∘ class`.
    pub fn appended(&self, top: &Sheaf, top_map: &SheafMorphism) -> Result<SheafComplex> {
        let diff = top_map.compose(&self.class_on_tau()?.with_ends(
            self.tau.term(-self.d - 1),
            top_map.source(),
        )?)?;
        appended(&self.tau, -self.d, top, &diff)
    }

    pub fn standard(&self) -> Result<SheafComplex> {
        self.appended(&self.h_closed.sheaf, &self.t)
    }

    /// `W = cone(τ -> (τ≤-d RΓ_K N)[1])[-1]` with its maps to `N` and `E_N`.
    /// The second map is `-1` on `τ`, so both legs agree with the unit
    /// `N -> RΓ_L N` on `H^{-d-1}`.
    pub fn resolution(&self) -> Result<Resolution> {
        let d = self.d;
        let (sigma, sigma_incl) = self.gamma.complex.truncate_le(-d)?;
        let iota = restrict_chain_map(&self.gamma.connecting, &self.tau_incl, &sigma_incl.shift(1))?;
        let w = cone(&iota)?.complex.shift(-1);
        let standard = self.standard()?;
        let kappa = self.h_closed.class_of(&sigma_incl.comp(-d))?;
        let space = self.complex.space().clone();
        let mut to_complex = BTreeMap::new();
        let mut to_standard = BTreeMap::new();
        for k in w.degrees() {
            let mut down = Vec::with_capacity(space.len());
            let mut across = Vec::with_capacity(space.len());
            for x in 0..space.len() {
                let (t, s) = (self.tau.term(k).dim(x), sigma.term(k).dim(x));
                let mut second = Matrix::zeros(s, t + s);
                second.set_block(0, t, &Matrix::identity(s));
                down.push(&(&self.gamma.counit.comp_at(k, x) * &sigma_incl.comp_at(k, x)) * &second);
                across.push(if k < -d {
                    let mut first = Matrix::zeros(t, t + s);
                    first.set_block(0, 0, &Matrix::scalar(t, Rational::from_int(-1)));
                    first
                } else if k == -d {
                    kappa.comp(x) * &second
                } else {
                    Matrix::zeros(standard.term(k).dim(x), t + s)
                });
            }
            to_complex.insert(k, SheafMorphism::new_unchecked(w.term(k).clone(), self.complex.term(k).clone(), down)?);
            to_standard.insert(k, SheafMorphism::new_unchecked(w.term(k).clone(), standard.term(k).clone(), across)?);
        }
        Ok(Resolution {
            to_complex: ChainMap::new(w.clone(), self.complex.clone(), to_complex)?,
            to_standard: ChainMap::new(w.clone(), standard.clone(), to_standard)?,
            complex: w,
            standard,
        })
    }
}

/// `C(F)` with the intermediate data the round trips reuse.
#[derive(Debug, Clone)]
pub struct CImage {
    pub object: CftgObject,
    pub complex: SheafComplex,
    pub local: LocalData,
    /// `τ≤-c j⁻¹F`.
    pub truncated: SheafComplex,
    pub truncated_incl: ChainMap,
    /// `H^{-c}` of the truncation; its sheaf is `A`.
    pub top_cohomology: Cohomology,
    /// `F -> Rj_*j⁻¹F <- Rj_*τ≤-c j⁻¹F -> Rj_*A[c]`.
    pub path: ZigZag,
    /// The same path after `RΓ_L`.
    pub open_path: ZigZag,
    /// The same path after `RΓ_K`.
    pub closed_path: ZigZag,
    /// `H^{-d-1}(RΓ_L F) ≅ F(A)` over the whole space.
    pub psi: SheafMorphism,
    /// `H^{-d}(RΓ_K F) -> G(A)` over the whole space.
    pub gamma_map: SheafMorphism,
}

pub fn functor_c(ctx: &CftgContext, f: &SheafComplex) -> Result<CImage> {
    let x = ctx.space();
    let c = x.c();
    let report = is_perverse(x, f)?;
    if !report.is_perverse() {
        return Err(Error::Precondition(format!(
            "complex is not perverse: {}",
            report.failures.join("; ")
        )));
    }
    let j = x.open_part();
    let jf = j.restrict(f)?;
    let (truncated, truncated_incl) = jf.truncate_le(-c)?;
    let top_cohomology = cohomology_sheaf(&truncated, -c)?;
    let ls = LocalSystem::new(top_cohomology.sheaf.clone())
        .map_err(|_| Error::Theorem("the open part of a perverse complex is not a local system".into()))?;
    let a = PerverseOnX0::new(x, &ls, "j⁻¹F")?;
    let a_complex = a.complex();
    let class = top_cohomology.class_of(&SheafMorphism::identity(truncated.term(-c)))?;
    let projection = ChainMap::new(
        truncated.clone(),
        a_complex.clone(),
        [(-c, class.with_ends(truncated.term(-c), a_complex.term(-c))?)].into_iter().collect(),
    )?;
    let fgt = ctx.fgt(&a)?;
    let m = fgt.pushed.clone();
    let n1 = j.pushforward(&jf)?;
    let unit = j.unit(f, &n1)?;
    let n2 = j.pushforward(&truncated)?;
    let f2 = j.pushforward_map(&truncated_incl, &n2, &n1)?;
    let f3 = j.pushforward_map(&projection, &n2, &m)?;
    let path = ZigZag::new(f).forward(&unit)?.backward(&f2)?.forward(&f3)?;

    let kincl = k_inclusion(ctx)?;
    let g0 = gamma_closed(&kincl, f)?;
    let g1 = gamma_closed(&kincl, &n1)?;
    let g2 = gamma_closed(&kincl, &n2)?;
    let g3 = &fgt.gamma;
    let open_path = ZigZag::new(&g0.open.complex)
        .forward(&gamma_open_map(&unit, &g0.open, &g1.open)?)?
        .backward(&gamma_open_map(&f2, &g2.open, &g1.open)?)?
        .forward(&gamma_open_map(&f3, &g2.open, &g3.open)?)?;
    let closed_path = ZigZag::new(&g0.complex)
        .forward(&gamma_closed_map(&unit, &g0, &g1)?)?
        .backward(&gamma_closed_map(&f2, &g2, &g1)?)?
        .forward(&gamma_closed_map(&f3, &g2, g3)?)?;

    let d = x.d();
    let h_open = cohomology_sheaf(&g0.open.complex, -d - 1)?;
    let h_closed = cohomology_sheaf(&g0.complex, -d)?;
    let t = connecting_on_cohomology(&g0, &h_open, &h_closed)?;
    let local = LocalData::assemble(d, f, g0, h_open, h_closed, t)?;
    let psi = open_path.transport(&local.h_open, &fgt.f_cohomology)?;
    let gamma_map = closed_path.transport(&local.h_closed, &fgt.g_cohomology)?;
    let u_full = local.t.compose(&invert(&psi, "H^{-d-1}(RΓ_L F) -> F(A)")?)?;
    let s = x.stratum().sub();
    let b = local.h_closed.sheaf.restrict_to(s)?;
    let u = u_full.restrict_to(s)?;
    let v = gamma_map.restrict_to(s)?;
    let object = ctx
        .object_with(fgt, &b, &u, &v)
        .map_err(theorem("C(F) is not an object"))?;
    Ok(CImage {
        object,
        complex: f.clone(),
        local,
        truncated,
        truncated_incl,
        top_cohomology,
        path,
        open_path,
        closed_path,
        psi,
        gamma_map,
    })
}

/// `B̃ = G_S(B, j⁻¹G(A), ṽ)` and `φ: F(A) -> B̃` induced by `(u, T)`.
#[derive(Debug, Clone)]
pub struct GluedExtensionData {
    pub decomposition: Decomposition,
    pub triple: GluingTriple,
    pub glued: Glued,
    pub phi: SheafMorphism,
}

pub fn build_b_phi(ctx: &CftgContext, o: &CftgObject) -> Result<GluedExtensionData> {
    let dec = decomposition(ctx.space())?;
    let h_k = &o.fgt.g_cohomology.sheaf;
    let h_l = &o.fgt.f_cohomology.sheaf;
    let jk = dec.jstar(&dec.restrict_open(h_k)?)?;
    let eta = dec.unit(h_k, &jk)?.restrict_to(dec.closed().sub())?;
    let v = o.v.with_ends(&dec.restrict_closed(o.b())?, eta.source())?;
    let triple = GluingTriple::new(&dec, o.b(), jk.source(), &eta.compose(&v)?)?;
    let glued = gluing_functor_gf(&triple)?;
    let rest = restriction_functor_rf(&dec, h_l)?;
    let on_open = o.fgt.t_full.restrict_to(dec.open().sub())?;
    let m = GluingMorphism::new(&rest, &triple, &o.u, &on_open).map_err(theorem("(u, T) is not a gluing morphism"))?;
    let source = gluing_functor_gf(&rest)?;
    let phi = glued_map(&m, &source, &glued)?.compose(&canonical_map(h_l, &source)?)?;
    Ok(GluedExtensionData {
        decomposition: dec,
        triple,
        glued,
        phi,
    })
}

/// `P(A, B, u, v)` with its defining triangle
/// `P -> τ -> B̃[d+1] -> P[1]`.
#[derive(Debug, Clone)]
pub struct PImage {
    pub complex: SheafComplex,
    pub extension: GluedExtensionData,
    /// Local data of `Rj_*A`.
    pub local: LocalData,
    pub triangle: Triangle,
}

pub fn functor_p(ctx: &CftgContext, o: &CftgObject) -> Result<PImage> {
    let x = ctx.space();
    let d = x.d();
    let local = LocalData::from_fgt(ctx, &o.fgt)?;
    let extension = build_b_phi(ctx, o)?;
    let b = extension.glued.sheaf();
    let complex = local.appended(b, &extension.phi)?;
    let report = is_perverse(x, &complex)?;
    if !report.is_perverse() {
        return Err(Error::Theorem(format!(
            "P(A, B, u, v) is not perverse: {}",
            report.failures.join("; ")
        )));
    }
    let q_comp = local
        .tau
        .degrees()
        .map(|k| Ok((k, SheafMorphism::identity(local.tau.term(k)).with_ends(complex.term(k), local.tau.term(k))?)))
        .collect::<Result<_>>()?;
    let q = ChainMap::new(complex.clone(), local.tau.clone(), q_comp)?;
    let bd = SheafComplex::concentrated(b, -d - 1);
    let top = extension
        .phi
        .compose(&local.class_on_tau()?.with_ends(local.tau.term(-d - 1), extension.phi.source())?)?;
    let phi_prime = ChainMap::new(local.tau.clone(), bd.clone(), [(-d - 1, top)].into_iter().collect())?;
    let w = ChainMap::new(
        bd.clone(),
        complex.shift(1),
        [(-d - 1, SheafMorphism::identity(b))].into_iter().collect(),
    )?;
    let triangle = Triangle::new(q, phi_prime, w)?;
    Ok(PImage {
        complex,
        extension,
        local,
        triangle,
    })
}

/// `P(a, b)`: the unique fill-in of the morphism of defining triangles.
#[derive(Debug, Clone)]
pub struct PMorphism {
    pub chain: ChainMap,
    pub fill: FillIn,
    /// The map on the appended term.
    pub on_top: SheafMorphism,
}

pub fn functor_p_on_morphism(ctx: &CftgContext, m: &CftgMorphism, source: &PImage, target: &PImage) -> Result<PMorphism> {
    let d = ctx.space().d();
    let beta_full = gamma_open_map(&m.image.pushed, &source.local.gamma.open, &target.local.gamma.open)?;
    let beta = restrict_chain_map(&beta_full, &source.local.tau_incl, &target.local.tau_incl)?;
    let dec = &source.extension.decomposition;
    let on_open = m.image.g_full.restrict_to(dec.open().sub())?;
    let gm = GluingMorphism::new(&source.extension.triple, &target.extension.triple, &m.b, &on_open)
        .map_err(theorem("(b, G(a)) is not a gluing morphism"))?;
    let on_top = glued_map(&gm, &source.extension.glued, &target.extension.glued)?;
    let gamma = ChainMap::new(
        source.triangle.c().clone(),
        target.triangle.c().clone(),
        [(-d - 1, on_top.clone())].into_iter().collect(),
    )?;
    let fill = fill_in(&source.triangle, &target.triangle, &beta, &gamma)?;
    if !fill.unique {
        return Err(Error::Theorem("the fill-in defining P(a, b) is not unique".into()));
    }
    Ok(PMorphism {
        chain: fill.alpha.clone(),
        fill,
        on_top,
    })
}

/// `j⁻¹P(A, B, u, v) ≃ A[c]` as an explicit zig-zag of quasi-isomorphisms
/// over `X₀`, ending at `A[c]`.
pub fn restriction_witness(ctx: &CftgContext, o: &CftgObject, p: &PImage) -> Result<ZigZag> {
    let x = ctx.space();
    let d = x.d();
    let j = x.open_part();
    let res = p.local.resolution()?;
    let e = j.restrict(&p.complex)?;
    let em = j.restrict(&res.standard)?;
    let open_id = p.extension.glued.open_identification()?;
    let lower = ChainMap::identity(&j.restrict(&p.local.tau)?);
    let to_em = appended_map(&e, &em, &lower, -d, &open_id)?;
    let aug = j.augmentation(&o.a().complex(), &o.fgt.pushed)?;
    let z = ZigZag::new(&e)
        .forward(&to_em)?
        .backward(&j.restrict_map(&res.to_standard)?)?
        .forward(&j.restrict_map(&res.to_complex)?)?
        .backward(&aug.with_ends(&o.a().complex().on_space(j.sub())?, &j.restrict(&o.fgt.pushed)?)?)?;
    if let Some(i) = z.first_non_quasi_iso()? {
        return Err(Error::Theorem(format!("arrow {i} of the restriction witness is not a quasi-isomorphism")));
    }
    Ok(z)
}

/// `C(P(ℷ)) ≅ ℷ` with the witnesses used to build it.
#[derive(Debug, Clone)]
pub struct RoundTripCp {
    pub p: PImage,
    pub c: CImage,
    pub witness: ZigZag,
    pub iso: CftgMorphism,
}

pub fn roundtrip_cp(ctx: &CftgContext, o: &CftgObject) -> Result<RoundTripCp> {
    let x = ctx.space();
    let (c, d) = (x.c(), x.d());
    let p = functor_p(ctx, o)?;
    let image = functor_c(ctx, &p.complex)?;
    let witness = restriction_witness(ctx, o, &p)?;

    let path = ZigZag::new(&image.truncated)
        .forward(&image.truncated_incl)?
        .then(&witness)?;
    let a_complex = o.a().complex();
    let last = cohomology_sheaf(&a_complex, -c)?;
    let to_h = path.transport(&image.top_cohomology, &last)?;
    let to_a = invert(&last.class_of(&SheafMorphism::identity(a_complex.term(-c)))?, "H^{-c}(A[c]) -> A")?;
    let a = to_a
        .with_ends(&last.sheaf, o.a().sheaf())?
        .compose(&to_h.with_ends(image.object.a().sheaf(), &last.sheaf)?)?;

    let b_sheaf = p.extension.glued.sheaf();
    let bd = SheafComplex::concentrated(b_sheaf, -d);
    let incl = ChainMap::new(
        bd.clone(),
        p.complex.clone(),
        [(-d, SheafMorphism::identity(b_sheaf))].into_iter().collect(),
    )?;
    let gb = gamma_closed(&k_inclusion(ctx)?, &bd)?;
    let on_gamma = gamma_closed_map(&incl, &gb, &image.local.gamma)?;
    let hb = cohomology_sheaf(&gb.complex, -d)?;
    let top = gb.complex.term(-d);
    let into = hb.class_of(&SheafMorphism::identity(top).with_ends(b_sheaf, top)?)?;
    let beta = Cohomology::induced(&on_gamma, &hb, &image.local.h_closed)?.compose(&into)?;
    let s = x.stratum().sub();
    let beta_s = invert(&beta.restrict_to(s)?, "B̃|_S -> H^{-d}(RΓ_K P)|_S")?;
    let closed_id = p.extension.glued.closed_identification()?;
    let b = closed_id.compose(&beta_s.with_ends(&beta_s.source().clone(), closed_id.source())?)?;

    let iso = CftgMorphism::new(ctx, &image.object, o, &a, &b).map_err(theorem("C(P(ℷ)) -> ℷ"))?;
    if !iso.is_iso() {
        return Err(Error::Theorem("C(P(ℷ)) -> ℷ is not invertible".into()));
    }
    Ok(RoundTripCp {
        p,
        c: image,
        witness,
        iso,
    })
}

/// `F ≃ P(C(F))` as a zig-zag of quasi-isomorphisms.
#[derive(Debug, Clone)]
pub struct RoundTripPc {
    pub c: CImage,
    pub p: PImage,
    pub zigzag: ZigZag,
}

pub fn roundtrip_pc(ctx: &CftgContext, f: &SheafComplex) -> Result<RoundTripPc> {
    let d = ctx.space().d();
    let image = functor_c(ctx, f)?;
    let p = functor_p(ctx, &image.object)?;
    let local = &image.local;
    let res = local.resolution()?;
    let mut zigzag = ZigZag::new(f).backward(&res.to_complex)?.forward(&res.to_standard)?;

    let opens = &image.open_path;
    let hk = &local.h_closed.sheaf;
    let n = opens.len();
    let mut cohs = vec![local.h_open.clone()];
    for g in &opens.complexes()[1..n] {
        cohs.push(cohomology_sheaf(g, -d - 1)?);
    }
    cohs.push(p.local.h_open.clone());
    let mut psi = vec![SheafMorphism::identity(&local.h_open.sheaf)];
    for (i, arrow) in opens.arrows().iter().enumerate() {
        let step = match arrow {
            Arrow::Forward(g) => Cohomology::induced(g, &cohs[i], &cohs[i + 1])?,
            Arrow::Backward(g) => invert(&Cohomology::induced(g, &cohs[i + 1], &cohs[i])?, "RΓ_L of the path")?,
        };
        psi.push(step.compose(&psi[i])?);
    }
    let mut stages = Vec::with_capacity(n + 1);
    for (i, g) in opens.complexes().iter().enumerate() {
        let (tau, incl) = g.truncate_le(-d - 1)?;
        let class = cohs[i].class_of(&incl.comp(-d - 1))?;
        let top = local.t.compose(&invert(&psi[i], "RΓ_L of the path")?)?.compose(&class)?;
        let e = appended(&tau, -d, hk, &top)?;
        stages.push((tau, incl, e));
    }
    for (i, arrow) in opens.arrows().iter().enumerate() {
        let id = SheafMorphism::identity(hk);
        zigzag = match arrow {
            Arrow::Forward(g) => {
                let (s, t) = (&stages[i], &stages[i + 1]);
                let lower = restrict_chain_map(g, &s.1, &t.1)?;
                zigzag.forward(&appended_map(&s.2, &t.2, &lower, -d, &id)?)?
            }
            Arrow::Backward(g) => {
                let (s, t) = (&stages[i + 1], &stages[i]);
                let lower = restrict_chain_map(g, &s.1, &t.1)?;
                zigzag.backward(&appended_map(&s.2, &t.2, &lower, -d, &id)?)?
            }
        };
    }

    let dec = &p.extension.decomposition;
    let rest = restriction_functor_rf(dec, hk)?;
    let on_open = image.gamma_map.restrict_to(dec.open().sub())?;
    let gm = GluingMorphism::new(
        &rest,
        &p.extension.triple,
        &SheafMorphism::identity(rest.closed_sheaf()),
        &on_open,
    )
    .map_err(theorem("(Id, γ) is not a gluing morphism"))?;
    let src_glued = gluing_functor_gf(&rest)?;
    let g = glued_map(&gm, &src_glued, &p.extension.glued)?.compose(&canonical_map(hk, &src_glued)?)?;
    let (tau, _, e) = &stages[n];
    let last = appended_map(e, &p.complex, &ChainMap::identity(tau), -d, &g)?;
    zigzag = zigzag.forward(&last)?;
    if let Some(i) = zigzag.first_non_quasi_iso()? {
        return Err(Error::Theorem(format!("arrow {i} of F ≃ P(C(F)) is not a quasi-isomorphism")));
    }
    Ok(RoundTripPc {
        c: image,
        p,
        zigzag,
    })
}
