//! Sheaves on finite posets, stored as representations of the Hasse diagram.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Matrix, Rational};
use crate::poset::{same_space, Poset};

struct SheafData {
    space: Arc<Poset>,
    dims: Vec<usize>,
    cover_maps: Vec<Matrix>,
    // every x < y, composed along covers
    maps: HashMap<(usize, usize), Matrix>,
}

/// A sheaf on a finite poset: one stalk per element and one restriction map
/// `stalk(x) -> stalk(y)` per covering relation `x ⋖ y`. Cheap to clone.
#[derive(Clone)]
pub struct Sheaf(Arc<SheafData>);

impl PartialEq for Sheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (same_space(&self.0.space, &other.0.space)
                && self.0.dims == other.0.dims
                && self.0.cover_maps == other.0.cover_maps)
    }
}

impl Eq for Sheaf {}

impl fmt::Debug for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stalks: Vec<String> = (0..self.space().len())
            .map(|x| format!("{}:{}", self.space().name(x), self.dim(x)))
            .collect();
        write!(f, "Sheaf[{}]", stalks.join(" "))
    }
}

impl Sheaf {
    /// Validating constructor; `cover_maps[i]` belongs to `space.covers()[i]`
    /// and has shape `dims[y] x dims[x]`.
    pub fn new(space: Arc<Poset>, dims: Vec<usize>, cover_maps: Vec<Matrix>) -> Result<Self> {
        if dims.len() != space.len() {
            return Err(Error::Shape(format!(
                "{} stalk dimensions for {} elements",
                dims.len(),
                space.len()
            )));
        }
        if cover_maps.len() != space.covers().len() {
            return Err(Error::Shape(format!(
                "{} restriction maps for {} covering relations",
                cover_maps.len(),
                space.covers().len()
            )));
        }
        for (&(x, y), m) in space.covers().iter().zip(&cover_maps) {
            if m.shape() != (dims[y], dims[x]) {
                return Err(Error::Shape(format!(
                    "restriction {}<{} has shape {:?}, expected {:?}",
                    space.name(x),
                    space.name(y),
                    m.shape(),
                    (dims[y], dims[x])
                )));
            }
        }
        let maps = compose_all(&space, &cover_maps)?;
        Ok(Sheaf(Arc::new(SheafData {
            space,
            dims,
            cover_maps,
            maps,
        })))
    }

    /// Builds a sheaf from restriction maps keyed by covering relation.
    pub fn from_map_table(
        space: Arc<Poset>,
        dims: Vec<usize>,
        mut table: HashMap<(usize, usize), Matrix>,
    ) -> Result<Self> {
        let mut cover_maps = Vec::with_capacity(space.covers().len());
        for &(x, y) in space.covers() {
            let m = table.remove(&(x, y)).ok_or_else(|| {
                Error::Input(format!(
                    "missing restriction map {}<{}",
                    space.name(x),
                    space.name(y)
                ))
            })?;
            cover_maps.push(m);
        }
        if let Some((x, y)) = table.keys().next() {
            return Err(Error::Input(format!(
                "{}<{} is not a covering relation",
                space.name(*x),
                space.name(*y)
            )));
        }
        Sheaf::new(space, dims, cover_maps)
    }

    /// Builds a sheaf from a rule giving the map for every pair `x < y`; only
    /// covering relations are queried.
    pub fn from_fn(space: Arc<Poset>, dims: Vec<usize>, mut f: impl FnMut(usize, usize) -> Matrix) -> Result<Self> {
        let cover_maps = space.covers().iter().map(|&(x, y)| f(x, y)).collect();
        Sheaf::new(space, dims, cover_maps)
    }

    pub fn zero(space: Arc<Poset>) -> Self {
        let dims = vec![0; space.len()];
        let maps = space.covers().iter().map(|_| Matrix::zeros(0, 0)).collect();
        Sheaf::new(space, dims, maps).expect("zero sheaf")
    }

    pub fn constant(space: Arc<Poset>, rank: usize) -> Self {
        let dims = vec![rank; space.len()];
        let maps = space.covers().iter().map(|_| Matrix::identity(rank)).collect();
        Sheaf::new(space, dims, maps).expect("constant sheaf")
    }

    /// Stalk `stalk` at `at`, zero elsewhere.
    pub fn skyscraper(space: Arc<Poset>, at: usize, rank: usize) -> Self {
        let dims: Vec<usize> = (0..space.len()).map(|x| if x == at { rank } else { 0 }).collect();
        Sheaf::from_fn(space, dims.clone(), |x, y| Matrix::zeros(dims[y], dims[x])).expect("skyscraper")
    }

    pub fn space(&self) -> &Arc<Poset> {
        &self.0.space
    }

    pub fn dim(&self, x: usize) -> usize {
        self.0.dims[x]
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn total_dim(&self) -> usize {
        self.0.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.dims.iter().all(|&d| d == 0)
    }

    pub fn cover_maps(&self) -> &[Matrix] {
        &self.0.cover_maps
    }

    /// Restriction map `stalk(x) -> stalk(y)` for `x <= y`.
    pub fn map(&self, x: usize, y: usize) -> Matrix {
        if x == y {
            return Matrix::identity(self.dim(x));
        }
        self.0
            .maps
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(|| panic!("no restriction map {x} -> {y}: not comparable"))
    }

    pub fn map_ref(&self, x: usize, y: usize) -> Option<&Matrix> {
        self.0.maps.get(&(x, y))
    }

    pub fn same_space_as(&self, other: &Sheaf) -> bool {
        same_space(self.space(), other.space())
    }

    /// Re-runs the shape and functoriality checks.
    pub fn validate(&self) -> Result<()> {
        Sheaf::new(self.space().clone(), self.dims().to_vec(), self.cover_maps().to_vec()).map(|_| ())
    }

    /// Every restriction map is square and invertible.
    pub fn is_locally_constant(&self) -> bool {
        self.cover_maps().iter().all(Matrix::is_invertible)
    }

    /// Same data viewed on a structurally equal poset handle.
    pub fn on_space(&self, space: &Arc<Poset>) -> Result<Sheaf> {
        if Arc::ptr_eq(self.space(), space) {
            return Ok(self.clone());
        }
        if **self.space() != **space {
            return Err(Error::Input("sheaf lives on a different space".into()));
        }
        Ok(Sheaf(Arc::new(SheafData {
            space: space.clone(),
            dims: self.0.dims.clone(),
            cover_maps: self.0.cover_maps.clone(),
            maps: self.0.maps.clone(),
        })))
    }

    /// Restriction to the induced subposet on `members`.
    pub fn restrict(&self, members: &[usize]) -> Sheaf {
        let sub = Arc::new(self.space().induced(members));
        self.restrict_to(&sub).expect("induced subposet")
    }

    /// Restriction to a given induced subposet of this sheaf's space.
    pub fn restrict_to(&self, sub: &Arc<Poset>) -> Result<Sheaf> {
        let emb = self.space().embedding_of(sub)?;
        let dims = emb.iter().map(|&i| self.dim(i)).collect();
        Sheaf::from_fn(sub.clone(), dims, |x, y| self.map(emb[x], emb[y]))
    }

    /// Extension by zero along a closed inclusion into `ambient`; this is the
    /// direct image for a closed subset of a finite poset.
    pub fn pushforward_closed(&self, ambient: &Arc<Poset>) -> Result<Sheaf> {
        let emb = ambient.embedding_of(self.space())?;
        if !ambient.is_down_set(&emb) {
            return Err(Error::Input("pushforward_closed needs a closed subspace".into()));
        }
        let mut local = vec![None; ambient.len()];
        for (i, &a) in emb.iter().enumerate() {
            local[a] = Some(i);
        }
        let dims: Vec<usize> = (0..ambient.len())
            .map(|a| local[a].map_or(0, |i| self.dim(i)))
            .collect();
        Sheaf::from_fn(ambient.clone(), dims.clone(), |x, y| match (local[x], local[y]) {
            (Some(i), Some(j)) => self.map(i, j),
            _ => Matrix::zeros(dims[y], dims[x]),
        })
    }

    pub fn direct_sum(parts: &[&Sheaf]) -> Result<Sheaf> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Input("empty direct sum".into()))?;
        let space = first.space().clone();
        if parts.iter().any(|p| !p.same_space_as(first)) {
            return Err(Error::Input("direct sum across different spaces".into()));
        }
        let dims = (0..space.len())
            .map(|x| parts.iter().map(|p| p.dim(x)).sum())
            .collect();
        Sheaf::from_fn(space, dims, |x, y| {
            let blocks: Vec<Matrix> = parts.iter().map(|p| p.map(x, y)).collect();
            Matrix::block_diag(&blocks.iter().collect::<Vec<_>>())
        })
    }
}

fn compose_all(space: &Poset, cover_maps: &[Matrix]) -> Result<HashMap<(usize, usize), Matrix>> {
    let n = space.len();
    let mut maps: HashMap<(usize, usize), Matrix> = HashMap::new();
    // Process targets one at a time; sources in order of decreasing distance
    // is ensured by recursion through the memo table.
    fn get(
        space: &Poset,
        cover_maps: &[Matrix],
        maps: &mut HashMap<(usize, usize), Matrix>,
        x: usize,
        y: usize,
    ) -> Result<Matrix> {
        if let Some(m) = maps.get(&(x, y)) {
            return Ok(m.clone());
        }
        let mut result: Option<(usize, Matrix)> = None;
        for (i, &(a, z)) in space.covers().iter().enumerate() {
            if a != x || !space.le(z, y) {
                continue;
            }
            let step = &cover_maps[i];
            let candidate = if z == y {
                step.clone()
            } else {
                let rest = get(space, cover_maps, maps, z, y)?;
                &rest * step
            };
            match &result {
                None => result = Some((z, candidate)),
                Some((z0, m0)) => {
                    if *m0 != candidate {
                        return Err(Error::Violation(format!(
                            "functoriality fails on the diamond {x}<{{{a},{b}}}<{y}: {m0:?} vs {candidate:?}",
                            x = space.name(x),
                            a = space.name(*z0),
                            b = space.name(z),
                            y = space.name(y),
                        )));
                    }
                }
            }
        }
        let (_, m) = result.expect("x < y has a cover on the way");
        maps.insert((x, y), m.clone());
        Ok(m)
    }
    for x in 0..n {
        for y in 0..n {
            if space.lt(x, y) {
                get(space, cover_maps, &mut maps, x, y)?;
            }
        }
    }
    Ok(maps)
}

/// A natural transformation between two sheaves on the same space.
#[derive(Clone, PartialEq, Eq)]
pub struct SheafMorphism {
    source: Sheaf,
    target: Sheaf,
    comp: Vec<Matrix>,
}

impl fmt::Debug for SheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SheafMorphism")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("comp", &self.comp)
            .finish()
    }
}

impl SheafMorphism {
    /// Validating constructor: shapes and naturality on every covering relation.
    pub fn new(source: Sheaf, target: Sheaf, comp: Vec<Matrix>) -> Result<Self> {
        let m = SheafMorphism::new_unchecked(source, target, comp)?;
        m.check_natural()?;
        Ok(m)
    }

    /// Checks shapes only; naturality is the caller's responsibility.
    pub fn new_unchecked(source: Sheaf, target: Sheaf, comp: Vec<Matrix>) -> Result<Self> {
        if !source.same_space_as(&target) {
            return Err(Error::Input("morphism between sheaves on different spaces".into()));
        }
        let n = source.space().len();
        if comp.len() != n {
            return Err(Error::Shape(format!("{} components for {n} elements", comp.len())));
        }
        for (x, c) in comp.iter().enumerate() {
            if c.shape() != (target.dim(x), source.dim(x)) {
                return Err(Error::Shape(format!(
                    "component at {} has shape {:?}, expected {:?}",
                    source.space().name(x),
                    c.shape(),
                    (target.dim(x), source.dim(x))
                )));
            }
        }
        Ok(SheafMorphism { source, target, comp })
    }

    pub fn check_natural(&self) -> Result<()> {
        let space = self.source.space();
        for (i, &(x, y)) in space.covers().iter().enumerate() {
            let lhs = &self.target.cover_maps()[i] * &self.comp[x];
            let rhs = &self.comp[y] * &self.source.cover_maps()[i];
            if lhs != rhs {
                return Err(Error::Violation(format!(
                    "naturality fails on {}<{}",
                    space.name(x),
                    space.name(y)
                )));
            }
        }
        Ok(())
    }

    pub fn from_fn(source: &Sheaf, target: &Sheaf, f: impl FnMut(usize) -> Matrix) -> Result<Self> {
        let comp = (0..source.space().len()).map(f).collect();
        SheafMorphism::new(source.clone(), target.clone(), comp)
    }

    pub fn identity(s: &Sheaf) -> Self {
        let comp = s.dims().iter().map(|&d| Matrix::identity(d)).collect();
        SheafMorphism {
            source: s.clone(),
            target: s.clone(),
            comp,
        }
    }

    pub fn zero(source: &Sheaf, target: &Sheaf) -> Self {
        let comp = (0..source.space().len())
            .map(|x| Matrix::zeros(target.dim(x), source.dim(x)))
            .collect();
        SheafMorphism {
            source: source.clone(),
            target: target.clone(),
            comp,
        }
    }

    pub fn scalar(s: &Sheaf, value: Rational) -> Self {
        let comp = s.dims().iter().map(|&d| Matrix::scalar(d, value.clone())).collect();
        SheafMorphism {
            source: s.clone(),
            target: s.clone(),
            comp,
        }
    }

    pub fn source(&self) -> &Sheaf {
        &self.source
    }

    pub fn target(&self) -> &Sheaf {
        &self.target
    }

    pub fn comp(&self, x: usize) -> &Matrix {
        &self.comp[x]
    }

    pub fn components(&self) -> &[Matrix] {
        &self.comp
    }

    pub fn is_zero(&self) -> bool {
        self.comp.iter().all(Matrix::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.comp.iter().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<SheafMorphism> {
        let comp = self
            .comp
            .iter()
            .map(Matrix::inverse)
            .collect::<Option<Vec<_>>>()?;
        Some(SheafMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            comp,
        })
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SheafMorphism) -> Result<SheafMorphism> {
        if first.target != self.source {
            return Err(Error::Shape("composing morphisms with mismatched ends".into()));
        }
        let comp = self.comp.iter().zip(&first.comp).map(|(a, b)| a * b).collect();
        Ok(SheafMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            comp,
        })
    }

    fn zip_with(&self, other: &SheafMorphism, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<SheafMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("combining morphisms with different ends".into()));
        }
        let comp = self.comp.iter().zip(&other.comp).map(|(a, b)| f(a, b)).collect();
        Ok(SheafMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            comp,
        })
    }

    pub fn add(&self, other: &SheafMorphism) -> Result<SheafMorphism> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SheafMorphism) -> Result<SheafMorphism> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Rational) -> SheafMorphism {
        SheafMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            comp: self.comp.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Same components between replacement endpoints with identical stalks.
    pub fn with_ends(&self, source: &Sheaf, target: &Sheaf) -> Result<SheafMorphism> {
        SheafMorphism::new_unchecked(source.clone(), target.clone(), self.comp.clone())
    }

    pub fn restrict_to(&self, sub: &Arc<Poset>) -> Result<SheafMorphism> {
        let emb = self.source.space().embedding_of(sub)?;
        let source = self.source.restrict_to(sub)?;
        let target = self.target.restrict_to(sub)?;
        let comp = emb.iter().map(|&i| self.comp[i].clone()).collect();
        SheafMorphism::new_unchecked(source, target, comp)
    }

    pub fn restrict(&self, members: &[usize]) -> SheafMorphism {
        let sub = Arc::new(self.source.space().induced(members));
        self.restrict_to(&sub).expect("induced subposet")
    }

    pub fn pushforward_closed(&self, ambient: &Arc<Poset>) -> Result<SheafMorphism> {
        let emb = ambient.embedding_of(self.source.space())?;
        let source = self.source.pushforward_closed(ambient)?;
        let target = self.target.pushforward_closed(ambient)?;
        let mut comp: Vec<Matrix> = (0..ambient.len())
            .map(|x| Matrix::zeros(target.dim(x), source.dim(x)))
            .collect();
        for (i, &a) in emb.iter().enumerate() {
            comp[a] = self.comp[i].clone();
        }
        SheafMorphism::new_unchecked(source, target, comp)
    }

    /// Block-diagonal sum of morphisms.
    pub fn direct_sum(parts: &[&SheafMorphism]) -> Result<SheafMorphism> {
        let sources: Vec<&Sheaf> = parts.iter().map(|p| &p.source).collect();
        let targets: Vec<&Sheaf> = parts.iter().map(|p| &p.target).collect();
        let source = Sheaf::direct_sum(&sources)?;
        let target = Sheaf::direct_sum(&targets)?;
        let comp = (0..source.space().len())
            .map(|x| Matrix::block_diag(&parts.iter().map(|p| &p.comp[x]).collect::<Vec<_>>()))
            .collect();
        SheafMorphism::new_unchecked(source, target, comp)
    }
}

/// Subsheaf spanned stalkwise by the columns of `bases[x]` (full column rank),
/// with its inclusion. Fails if the subspaces are not stable under restriction.
pub fn subsheaf(ambient: &Sheaf, bases: Vec<Matrix>) -> Result<(Sheaf, SheafMorphism)> {
    let space = ambient.space().clone();
    let lefts: Vec<Matrix> = bases
        .iter()
        .map(|b| {
            b.left_inverse()
                .ok_or_else(|| Error::Shape("subsheaf basis is not independent".into()))
        })
        .collect::<Result<_>>()?;
    let mut cover_maps = Vec::with_capacity(space.covers().len());
    for (i, &(x, y)) in space.covers().iter().enumerate() {
        let pushed = &ambient.cover_maps()[i] * &bases[x];
        let induced = &lefts[y] * &pushed;
        if &bases[y] * &induced != pushed {
            return Err(Error::Violation(format!(
                "subspace at {} does not restrict into the subspace at {}",
                space.name(x),
                space.name(y)
            )));
        }
        cover_maps.push(induced);
    }
    let dims = bases.iter().map(Matrix::cols).collect();
    let sub = Sheaf::new(space, dims, cover_maps)?;
    let incl = SheafMorphism::new_unchecked(sub.clone(), ambient.clone(), bases)?;
    Ok((sub, incl))
}

/// Quotient sheaf given stalkwise full-row-rank projections, with the
/// projection morphism. Fails if the kernels are not stable under restriction.
pub fn quotient_sheaf(ambient: &Sheaf, projections: Vec<Matrix>) -> Result<(Sheaf, SheafMorphism)> {
    let space = ambient.space().clone();
    let rights: Vec<Matrix> = projections
        .iter()
        .map(|q| {
            q.right_inverse()
                .ok_or_else(|| Error::Shape("quotient projection is not surjective".into()))
        })
        .collect::<Result<_>>()?;
    let mut cover_maps = Vec::with_capacity(space.covers().len());
    for (i, &(x, y)) in space.covers().iter().enumerate() {
        let along = &projections[y] * &ambient.cover_maps()[i];
        let induced = &along * &rights[x];
        if &induced * &projections[x] != along {
            return Err(Error::Violation(format!(
                "quotient at {} is not compatible with restriction to {}",
                space.name(x),
                space.name(y)
            )));
        }
        cover_maps.push(induced);
    }
    let dims = projections.iter().map(Matrix::rows).collect();
    let quot = Sheaf::new(space, dims, cover_maps)?;
    let proj = SheafMorphism::new_unchecked(ambient.clone(), quot.clone(), projections)?;
    Ok((quot, proj))
}

/// Stalkwise kernel, image and cokernel of a sheaf morphism.
#[derive(Debug, Clone)]
pub struct PointwiseAbelian {
    pub kernel: Sheaf,
    pub kernel_mono: SheafMorphism,
    pub image: Sheaf,
    pub image_mono: SheafMorphism,
    pub cokernel: Sheaf,
    pub cokernel_epi: SheafMorphism,
}

pub fn kernel(phi: &SheafMorphism) -> Result<(Sheaf, SheafMorphism)> {
    subsheaf(phi.source(), phi.components().iter().map(Matrix::kernel).collect())
}

pub fn image(phi: &SheafMorphism) -> Result<(Sheaf, SheafMorphism)> {
    subsheaf(phi.target(), phi.components().iter().map(Matrix::image).collect())
}

pub fn cokernel(phi: &SheafMorphism) -> Result<(Sheaf, SheafMorphism)> {
    quotient_sheaf(
        phi.target(),
        phi.components().iter().map(Matrix::cokernel_projection).collect(),
    )
}

pub fn pointwise_abelian(phi: &SheafMorphism) -> Result<PointwiseAbelian> {
    let (kernel, kernel_mono) = kernel(phi)?;
    let (image, image_mono) = image(phi)?;
    let (cokernel, cokernel_epi) = cokernel(phi)?;
    Ok(PointwiseAbelian {
        kernel,
        kernel_mono,
        image,
        image_mono,
        cokernel,
        cokernel_epi,
    })
}

/// Expresses `m` (landing in the image of the mono `incl`) as a morphism into
/// the source of `incl`. Fails when some component does not factor.
pub fn corestrict(m: &SheafMorphism, incl: &SheafMorphism) -> Result<SheafMorphism> {
    let comp = m
        .components()
        .iter()
        .zip(incl.components())
        .map(|(a, i)| {
            i.solve(a)?
                .ok_or_else(|| Error::Model("map does not land in the given subsheaf".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    SheafMorphism::new_unchecked(m.source().clone(), incl.source().clone(), comp)
}

/// Factors `m` through the epi `proj` (`m = result ∘ proj`). Fails when `m`
/// does not vanish on the kernel of `proj`.
pub fn factor_through_epi(m: &SheafMorphism, proj: &SheafMorphism) -> Result<SheafMorphism> {
    let comp = m
        .components()
        .iter()
        .zip(proj.components())
        .map(|(a, p)| {
            let r = p
                .right_inverse()
                .ok_or_else(|| Error::Shape("projection is not surjective".into()))?;
            let candidate = a * &r;
            if &candidate * p != *a {
                return Err(Error::Model("map does not factor through the quotient".into()));
            }
            Ok(candidate)
        })
        .collect::<Result<Vec<_>>>()?;
    SheafMorphism::new_unchecked(proj.target().clone(), m.target().clone(), comp)
}

/// Offsets of the stalkwise blocks of `Hom(source, target)` when all
/// component entries are laid out in one vector (by element, row-major).
pub fn hom_offsets(source: &Sheaf, target: &Sheaf) -> Vec<usize> {
    let mut off = Vec::with_capacity(source.space().len() + 1);
    let mut acc = 0;
    off.push(0);
    for x in 0..source.space().len() {
        acc += target.dim(x) * source.dim(x);
        off.push(acc);
    }
    off
}

impl SheafMorphism {
    /// All component entries, element by element, row-major.
    pub fn flatten(&self) -> Vec<Rational> {
        self.comp.iter().flat_map(|m| m.entries().iter().cloned()).collect()
    }

    /// Inverse of [`SheafMorphism::flatten`]; does not check naturality.
    pub fn unflatten(source: &Sheaf, target: &Sheaf, values: &[Rational]) -> SheafMorphism {
        let off = hom_offsets(source, target);
        let comp = (0..source.space().len())
            .map(|x| {
                Matrix::from_vec(target.dim(x), source.dim(x), values[off[x]..off[x + 1]].to_vec())
                    .expect("block size")
            })
            .collect();
        SheafMorphism {
            source: source.clone(),
            target: target.clone(),
            comp,
        }
    }
}

/// Adds the naturality equations of an unknown morphism `source -> target`
/// whose entries occupy `base + hom_offsets(..)` in `sys`.
pub fn add_naturality_equations(sys: &mut LinearSystem, base: usize, source: &Sheaf, target: &Sheaf) {
    let space = source.space();
    let off = hom_offsets(source, target);
    for (i, &(x, y)) in space.covers().iter().enumerate() {
        let ra = &source.cover_maps()[i];
        let rb = &target.cover_maps()[i];
        let (tx, sx) = (target.dim(x), source.dim(x));
        let (ty, sy) = (target.dim(y), source.dim(y));
        // (rb * f_x - f_y * ra)[r][c] = 0 for r < ty, c < sx
        for r in 0..ty {
            for c in 0..sx {
                let mut eq = Vec::new();
                for l in 0..tx {
                    let v = rb.get(r, l);
                    if !v.is_zero() {
                        eq.push((base + off[x] + l * sx + c, v.clone()));
                    }
                }
                for l in 0..sy {
                    let v = ra.get(l, c);
                    if !v.is_zero() {
                        eq.push((base + off[y] + r * sy + l, -v));
                    }
                }
                if !eq.is_empty() {
                    sys.add_homogeneous(eq);
                }
            }
        }
    }
}

/// A basis of the space of natural transformations `source -> target`.
pub fn hom_basis(source: &Sheaf, target: &Sheaf) -> Vec<SheafMorphism> {
    let off = hom_offsets(source, target);
    let n = *off.last().unwrap();
    if n == 0 {
        return Vec::new();
    }
    let mut sys = LinearSystem::new(n);
    add_naturality_equations(&mut sys, 0, source, target);
    let sol = sys.solve().expect("homogeneous system");
    sol.nullspace
        .iter()
        .map(|v| SheafMorphism::unflatten(source, target, v))
        .collect()
}

/// A sheaf all of whose restriction maps are invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSystem(Sheaf);

impl LocalSystem {
    pub fn new(sheaf: Sheaf) -> Result<Self> {
        for (i, m) in sheaf.cover_maps().iter().enumerate() {
            if !m.is_invertible() {
                let (x, y) = sheaf.space().covers()[i];
                return Err(Error::Model(format!(
                    "restriction {}<{} is not invertible",
                    sheaf.space().name(x),
                    sheaf.space().name(y)
                )));
            }
        }
        Ok(LocalSystem(sheaf))
    }

    pub fn sheaf(&self) -> &Sheaf {
        &self.0
    }

    pub fn into_sheaf(self) -> Sheaf {
        self.0
    }

    /// Common stalk dimension; `None` if stalks differ (disconnected space).
    pub fn rank(&self) -> Option<usize> {
        let dims = self.0.dims();
        match dims.first() {
            None => Some(0),
            Some(&d) => dims.iter().all(|&e| e == d).then_some(d),
        }
    }
}

/// Stalkwise fiber product `{(a, b) : f(a) = g(b)}` with its projections.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub sheaf: Sheaf,
    pub to_first: SheafMorphism,
    pub to_second: SheafMorphism,
    // stalk basis inside first ⊕ second
    bases: Vec<Matrix>,
}

pub fn fiber_product(f: &SheafMorphism, g: &SheafMorphism) -> Result<FiberProduct> {
    if f.target() != g.target() {
        return Err(Error::Input("fiber product legs must share a target".into()));
    }
    let a = f.source();
    let b = g.source();
    let sum = Sheaf::direct_sum(&[a, b])?;
    let bases: Vec<Matrix> = (0..a.space().len())
        .map(|x| {
            let stacked = Matrix::hstack(&[f.comp(x), &(-g.comp(x))]).expect("shared target");
            stacked.kernel()
        })
        .collect();
    let (sheaf, incl) = subsheaf(&sum, bases.clone())?;
    let top = |x: usize| incl.comp(x).block(0, 0, a.dim(x), sheaf.dim(x));
    let bottom = |x: usize| incl.comp(x).block(a.dim(x), 0, b.dim(x), sheaf.dim(x));
    let to_first = SheafMorphism::new_unchecked(
        sheaf.clone(),
        a.clone(),
        (0..a.space().len()).map(top).collect(),
    )?;
    let to_second = SheafMorphism::new_unchecked(
        sheaf.clone(),
        b.clone(),
        (0..a.space().len()).map(bottom).collect(),
    )?;
    Ok(FiberProduct {
        sheaf,
        to_first,
        to_second,
        bases,
    })
}

impl FiberProduct {
    /// The unique morphism `t -> P` with the given projections, found by
    /// solving stalkwise. Fails if `(t_first, t_second)` is not a cone.
    pub fn factor(&self, t_first: &SheafMorphism, t_second: &SheafMorphism) -> Result<SheafMorphism> {
        if t_first.source() != t_second.source() {
            return Err(Error::Input("cone legs must share a source".into()));
        }
        let comp = (0..self.sheaf.space().len())
            .map(|x| {
                let stacked = Matrix::vstack(&[t_first.comp(x), t_second.comp(x)])?;
                self.bases[x].solve(&stacked)?.ok_or_else(|| {
                    Error::Input(format!(
                        "not a cone over the fiber product at {}",
                        self.sheaf.space().name(x)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SheafMorphism::new(t_first.source().clone(), self.sheaf.clone(), comp)
    }
}
