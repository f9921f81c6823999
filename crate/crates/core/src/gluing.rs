//! Gluing sheaves from a closed part `F` and its open complement `U`.
//!
//! A gluing triple is `(F_F, F_U, f: F_F -> i⁻¹j_*F_U)` with `j_*` the plain
//! (degree-0) direct image. `R` restricts a sheaf to such a triple and `G`
//! glues a triple back by a fiber product over `i_*i⁻¹j_*F_U`.

use std::sync::Arc;

use crate::complex::{ChainMap, SheafComplex};
use crate::derived::{ClosedInclusion, OpenInclusion};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poset::{Poset, Subspace, SubspaceKind};
use crate::sheaf::{corestrict, fiber_product, kernel, FiberProduct, Sheaf, SheafMorphism};

/// A closed subspace together with its open complement.
#[derive(Debug, Clone)]
pub struct Decomposition {
    closed: ClosedInclusion,
    open: OpenInclusion,
}

/// `j_*G` in degree 0, kept as a subsheaf of the degree-0 bar term so that
/// the derived and underived versions stay comparable.
#[derive(Debug, Clone)]
pub struct JStar {
    pub sheaf: Sheaf,
    source: Sheaf,
    complex: SheafComplex,
    pushed: SheafComplex,
    incl: SheafMorphism,
}

impl JStar {
    /// The sheaf on `U` this was computed from.
    pub fn source(&self) -> &Sheaf {
        &self.source
    }

    /// The full derived pushforward `Rj_*G`.
    pub fn derived(&self) -> &SheafComplex {
        &self.pushed
    }

    /// Inclusion of `j_*G` into the degree-0 term of `Rj_*G`.
    pub fn inclusion(&self) -> &SheafMorphism {
        &self.incl
    }
}

impl Decomposition {
    pub fn new(ambient: &Arc<Poset>, closed: &[usize]) -> Result<Self> {
        let closed = ClosedInclusion::new(ambient, closed)?;
        let open = closed.complement();
        Ok(Decomposition { closed, open })
    }

    pub fn from_subspace(ambient: &Arc<Poset>, part: &Subspace) -> Result<Self> {
        if part.kind() == SubspaceKind::Open && !ambient.is_down_set(part.members()) {
            return Err(Error::Input("gluing needs a closed subspace".into()));
        }
        Decomposition::new(ambient, part.members())
    }

    pub fn ambient(&self) -> &Arc<Poset> {
        self.closed.ambient()
    }

    pub fn closed(&self) -> &ClosedInclusion {
        &self.closed
    }

    pub fn open(&self) -> &OpenInclusion {
        &self.open
    }

    /// `i⁻¹`.
    pub fn restrict_closed(&self, s: &Sheaf) -> Result<Sheaf> {
        s.restrict_to(self.closed.sub())
    }

    /// `j⁻¹`.
    pub fn restrict_open(&self, s: &Sheaf) -> Result<Sheaf> {
        s.restrict_to(self.open.sub())
    }

    /// `j_*G`: the stalk at `x` is the space of sections of `G` over `U ∩ U_x`.
    pub fn jstar(&self, g: &Sheaf) -> Result<JStar> {
        let source = g.on_space(self.open.sub())?;
        let complex = SheafComplex::concentrated(&source, 0);
        let pushed = self.open.pushforward(&complex)?;
        let (sheaf, incl) = kernel(&pushed.diff(0))?;
        Ok(JStar {
            sheaf,
            source,
            complex,
            pushed,
            incl,
        })
    }

    /// `j_*φ` for `φ: G -> G'` on `U`.
    pub fn jstar_map(&self, phi: &SheafMorphism, source: &JStar, target: &JStar) -> Result<SheafMorphism> {
        let phi = phi.with_ends(&source.source, &target.source)?;
        let f = ChainMap::new_unchecked(
            source.complex.clone(),
            target.complex.clone(),
            [(0, phi)].into_iter().collect(),
        )?;
        let pushed = self.open.pushforward_map(&f, &source.pushed, &target.pushed)?;
        corestrict(&pushed.comp(0).compose(&source.incl)?, &target.incl)
    }

    /// The unit `η: S -> j_*j⁻¹S`; `js` must be `jstar(j⁻¹S)`.
    pub fn unit(&self, s: &Sheaf, js: &JStar) -> Result<SheafMorphism> {
        if self.restrict_open(s)? != js.source {
            return Err(Error::Input("unit needs j_* of the open restriction".into()));
        }
        let c = SheafComplex::concentrated(s, 0);
        let u = self.open.unit(&c, &js.pushed)?;
        corestrict(&u.comp(0), &js.incl)
    }

    /// The unit `S -> i_*i⁻¹S`: identity over the closed part, zero elsewhere.
    pub fn closed_unit(&self, s: &Sheaf) -> Result<SheafMorphism> {
        let target = self.restrict_closed(s)?.pushforward_closed(self.ambient())?;
        let inside = self.ambient().membership(self.closed.members());
        SheafMorphism::from_fn(s, &target, |x| {
            if inside[x] {
                Matrix::identity(s.dim(x))
            } else {
                Matrix::zeros(0, s.dim(x))
            }
        })
    }

    /// The canonical isomorphism `(j_*G)|_U -> G`.
    pub fn eval(&self, js: &JStar) -> Result<SheafMorphism> {
        let aug = self.open.augmentation(&js.complex, &js.pushed)?;
        let incl = js.incl.restrict_to(self.open.sub())?;
        let into = corestrict(&aug.comp(0), &incl)?;
        into.inverse()
            .ok_or_else(|| Error::Model("sections over U ∩ U_x do not match the stalk".into()))
    }

    /// Whether `s` is locally constant on both pieces.
    pub fn is_constructible(&self, s: &Sheaf) -> Result<bool> {
        Ok(self.restrict_closed(s)?.is_locally_constant() && self.restrict_open(s)?.is_locally_constant())
    }
}

/// `(F_F, F_U, f)` with `f: F_F -> i⁻¹j_*F_U`.
#[derive(Debug, Clone)]
pub struct GluingTriple {
    decomposition: Decomposition,
    closed_sheaf: Sheaf,
    open_sheaf: Sheaf,
    jstar: JStar,
    map: SheafMorphism,
}

impl GluingTriple {
    pub fn new(decomposition: &Decomposition, closed_sheaf: &Sheaf, open_sheaf: &Sheaf, map: &SheafMorphism) -> Result<Self> {
        let closed_sheaf = closed_sheaf.on_space(decomposition.closed.sub())?;
        let jstar = decomposition.jstar(open_sheaf)?;
        let target = decomposition.restrict_closed(&jstar.sheaf)?;
        let map = map.with_ends(&closed_sheaf, &target)?;
        map.check_natural()?;
        Ok(GluingTriple {
            decomposition: decomposition.clone(),
            closed_sheaf,
            open_sheaf: jstar.source.clone(),
            jstar,
            map,
        })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn closed_sheaf(&self) -> &Sheaf {
        &self.closed_sheaf
    }

    pub fn open_sheaf(&self) -> &Sheaf {
        &self.open_sheaf
    }

    pub fn map(&self) -> &SheafMorphism {
        &self.map
    }

    pub fn jstar(&self) -> &JStar {
        &self.jstar
    }

    /// `i⁻¹j_*F_U`.
    pub fn glue_target(&self) -> &Sheaf {
        self.map.target()
    }
}

/// `(φ_F, φ_U)` with `i⁻¹j_*φ_U ∘ f = g ∘ φ_F`.
#[derive(Debug, Clone)]
pub struct GluingMorphism {
    source: GluingTriple,
    target: GluingTriple,
    on_closed: SheafMorphism,
    on_open: SheafMorphism,
}

impl GluingMorphism {
    pub fn new(source: &GluingTriple, target: &GluingTriple, on_closed: &SheafMorphism, on_open: &SheafMorphism) -> Result<Self> {
        let on_closed = on_closed.with_ends(&source.closed_sheaf, &target.closed_sheaf)?;
        let on_open = on_open.with_ends(&source.open_sheaf, &target.open_sheaf)?;
        on_closed.check_natural()?;
        on_open.check_natural()?;
        let dec = &source.decomposition;
        let pushed = dec
            .jstar_map(&on_open, &source.jstar, &target.jstar)?
            .restrict_to(dec.closed.sub())?;
        let lhs = pushed.compose(&source.map)?;
        let rhs = target.map.compose(&on_closed)?;
        if let Some(x) = (0..lhs.components().len()).find(|&x| lhs.comp(x) != rhs.comp(x)) {
            return Err(Error::Input(format!(
                "gluing square does not commute at {}",
                dec.closed.sub().name(x)
            )));
        }
        Ok(GluingMorphism {
            source: source.clone(),
            target: target.clone(),
            on_closed,
            on_open,
        })
    }

    pub fn identity(t: &GluingTriple) -> Self {
        GluingMorphism {
            source: t.clone(),
            target: t.clone(),
            on_closed: SheafMorphism::identity(&t.closed_sheaf),
            on_open: SheafMorphism::identity(&t.open_sheaf),
        }
    }

    pub fn source(&self) -> &GluingTriple {
        &self.source
    }

    pub fn target(&self) -> &GluingTriple {
        &self.target
    }

    pub fn on_closed(&self) -> &SheafMorphism {
        &self.on_closed
    }

    pub fn on_open(&self) -> &SheafMorphism {
        &self.on_open
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GluingMorphism) -> Result<GluingMorphism> {
        GluingMorphism::new(
            &first.source,
            &self.target,
            &self.on_closed.compose(&first.on_closed)?,
            &self.on_open.compose(&first.on_open)?,
        )
    }

    pub fn is_iso(&self) -> bool {
        self.on_closed.is_iso() && self.on_open.is_iso()
    }
}

/// `R_F(S) = (S|_F, S|_U, η|_F)`.
pub fn restriction_functor_rf(dec: &Decomposition, s: &Sheaf) -> Result<GluingTriple> {
    let s = s.on_space(dec.ambient())?;
    let closed_sheaf = dec.restrict_closed(&s)?;
    let open_sheaf = dec.restrict_open(&s)?;
    let jstar = dec.jstar(&open_sheaf)?;
    let eta = dec.unit(&s, &jstar)?.restrict_to(dec.closed.sub())?;
    GluingTriple::new(dec, &closed_sheaf, &open_sheaf, &eta)
}

/// `R_F(φ)` between already restricted triples.
pub fn restriction_on_morphisms(phi: &SheafMorphism, source: &GluingTriple, target: &GluingTriple) -> Result<GluingMorphism> {
    let dec = &source.decomposition;
    GluingMorphism::new(
        source,
        target,
        &phi.restrict_to(dec.closed.sub())?,
        &phi.restrict_to(dec.open.sub())?,
    )
}

/// A glued sheaf with the fiber product that defines it.
#[derive(Debug, Clone)]
pub struct Glued {
    pub triple: GluingTriple,
    pub fiber: FiberProduct,
}

impl Glued {
    pub fn sheaf(&self) -> &Sheaf {
        &self.fiber.sheaf
    }

    /// The canonical isomorphism `G_F(t)|_U -> F_U`.
    pub fn open_identification(&self) -> Result<SheafMorphism> {
        let dec = &self.triple.decomposition;
        let p = self.fiber.to_second.restrict_to(dec.open.sub())?;
        dec.eval(&self.triple.jstar)?.compose(&p)
    }

    /// The canonical isomorphism `G_F(t)|_F -> F_F`.
    pub fn closed_identification(&self) -> Result<SheafMorphism> {
        let dec = &self.triple.decomposition;
        self.fiber
            .to_first
            .restrict_to(dec.closed.sub())?
            .with_ends(&dec.restrict_closed(self.sheaf())?, &self.triple.closed_sheaf)
    }
}

/// `G_F(t)`: the pull-back of `i_*f` and `j_*F_U -> i_*i⁻¹j_*F_U`.
pub fn gluing_functor_gf(t: &GluingTriple) -> Result<Glued> {
    let dec = &t.decomposition;
    let leg_closed = t.map.pushforward_closed(dec.ambient())?;
    let leg_open = dec.closed_unit(&t.jstar.sheaf)?;
    let fiber = fiber_product(&leg_closed, &leg_open)?;
    Ok(Glued {
        triple: t.clone(),
        fiber,
    })
}

/// `G_F(m)`, the unique map compatible with both projections.
pub fn gluing_on_morphisms(m: &GluingMorphism) -> Result<SheafMorphism> {
    let source = gluing_functor_gf(&m.source)?;
    let target = gluing_functor_gf(&m.target)?;
    glued_map(m, &source, &target)
}

/// `G_F(m)` between already glued ends.
pub fn glued_map(m: &GluingMorphism, source: &Glued, target: &Glued) -> Result<SheafMorphism> {
    let dec = &m.source.decomposition;
    let closed = m
        .on_closed
        .pushforward_closed(dec.ambient())?
        .with_ends(source.fiber.to_first.target(), target.fiber.to_first.target())?;
    let open = dec.jstar_map(&m.on_open, &m.source.jstar, &m.target.jstar)?;
    target.fiber.factor(
        &closed.compose(&source.fiber.to_first)?,
        &open.compose(&source.fiber.to_second)?,
    )
}

/// The canonical map `S -> G_F(R_F(S))` for a glued restriction.
pub fn canonical_map(s: &Sheaf, glued: &Glued) -> Result<SheafMorphism> {
    let dec = &glued.triple.decomposition;
    let s = s.on_space(dec.ambient())?;
    let first = dec
        .closed_unit(&s)?
        .with_ends(&s, glued.fiber.to_first.target())?;
    let second = dec.unit(&s, &glued.triple.jstar)?;
    glued.fiber.factor(&first, &second)
}

/// The isomorphism `G_F(R_F(S)) -> S`.
pub fn unit_iso(s: &Sheaf, glued: &Glued) -> Result<SheafMorphism> {
    canonical_map(s, glued)?
        .inverse()
        .ok_or_else(|| Error::Theorem("S -> G_F(R_F(S)) is not invertible".into()))
}

/// The isomorphism of triples `R_F(G_F(t)) -> t`, given `R_F(G_F(t))`.
pub fn counit_iso(glued: &Glued, restricted: &GluingTriple) -> Result<GluingMorphism> {
    let m = GluingMorphism::new(
        restricted,
        &glued.triple,
        &glued.closed_identification()?,
        &glued.open_identification()?,
    )?;
    if !m.is_iso() {
        return Err(Error::Theorem("R_F(G_F(t)) -> t is not invertible".into()));
    }
    Ok(m)
}

/// Witnesses that `R_F` and `G_F` are quasi-inverse: `G_F(R_F(S)) ≅ S` and
/// `R_F(G_F(t)) ≅ t`.
pub fn quasi_inverse_witnesses(s: &Sheaf, t: &GluingTriple) -> Result<(SheafMorphism, GluingMorphism)> {
    let dec = &t.decomposition;
    let rf = restriction_functor_rf(dec, s)?;
    let iso1 = unit_iso(s, &gluing_functor_gf(&rf)?)?;
    let glued = gluing_functor_gf(t)?;
    let back = restriction_functor_rf(dec, glued.sheaf())?;
    let iso2 = counit_iso(&glued, &back)?;
    Ok((iso1, iso2))
}
