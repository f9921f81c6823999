//! Bounded cochain complexes of sheaves, chain maps, shifts, cones and
//! truncations.

mod cohomology;
mod homotopy;
mod zigzag;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

pub use cohomology::{cohomology_sheaf, is_quasi_iso, Cohomology};
pub use zigzag::{Arrow, ZigZag};
pub use homotopy::{
    fill_in, fill_in_ambiguity, find_homotopy, hom_homotopy_classes, FillIn, HomClasses, Homotopy, Triangle,
};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::poset::{same_space, Poset};
use crate::sheaf::{subsheaf, Sheaf, SheafMorphism};

fn sign(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        Rational::from_int(-1)
    }
}

/// A bounded complex `... -> C^k -> C^{k+1} -> ...` of sheaves on one space.
/// Terms outside `degrees()` are zero.
#[derive(Clone)]
pub struct SheafComplex {
    space: Arc<Poset>,
    lo: i64,
    terms: Vec<Sheaf>,
    // diffs[i]: terms[i] -> terms[i+1]
    diffs: Vec<SheafMorphism>,
    zero: Sheaf,
}

impl fmt::Debug for SheafComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SheafComplex{{")?;
        for (i, t) in self.terms.iter().enumerate() {
            write!(f, " {}: {:?}", self.lo + i as i64, t)?;
        }
        write!(f, " }}")
    }
}

impl PartialEq for SheafComplex {
    fn eq(&self, other: &Self) -> bool {
        if !same_space(&self.space, &other.space) {
            return false;
        }
        let r = union(self.degrees(), other.degrees());
        r.clone().all(|k| self.term(k) == other.term(k))
            && r.clone().all(|k| self.diff(k).components() == other.diff(k).components())
    }
}

impl Eq for SheafComplex {}

/// Smallest degree window containing both (empty windows are ignored).
pub fn union_of(a: Range<i64>, b: Range<i64>) -> Range<i64> {
    union(a, b)
}

pub(crate) fn union(a: Range<i64>, b: Range<i64>) -> Range<i64> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    a.start.min(b.start)..a.end.max(b.end)
}

impl SheafComplex {
    /// Validating constructor: endpoints, naturality of every differential
    /// and `d∘d = 0`.
    pub fn new(space: Arc<Poset>, lo: i64, terms: Vec<Sheaf>, diffs: Vec<SheafMorphism>) -> Result<Self> {
        let c = SheafComplex::new_unchecked(space, lo, terms, diffs)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks endpoints and shapes only.
    pub fn new_unchecked(space: Arc<Poset>, lo: i64, terms: Vec<Sheaf>, diffs: Vec<SheafMorphism>) -> Result<Self> {
        if diffs.len() != terms.len().saturating_sub(1) {
            return Err(Error::Shape(format!(
                "{} differentials for {} terms",
                diffs.len(),
                terms.len()
            )));
        }
        for t in &terms {
            if !same_space(t.space(), &space) {
                return Err(Error::Input("complex terms live on different spaces".into()));
            }
        }
        for (i, d) in diffs.iter().enumerate() {
            if *d.source() != terms[i] || *d.target() != terms[i + 1] {
                return Err(Error::Shape(format!(
                    "differential in degree {} has wrong endpoints",
                    lo + i as i64
                )));
            }
        }
        let zero = Sheaf::zero(space.clone());
        Ok(SheafComplex {
            space,
            lo,
            terms,
            diffs,
            zero,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.diffs.iter().enumerate() {
            d.check_natural().map_err(|e| {
                Error::Violation(format!("differential in degree {}: {e}", self.lo + i as i64))
            })?;
        }
        for i in 1..self.diffs.len() {
            let dd = self.diffs[i].compose(&self.diffs[i - 1])?;
            if !dd.is_zero() {
                return Err(Error::Violation(format!(
                    "d∘d ≠ 0 in degree {}",
                    self.lo + i as i64 - 1
                )));
            }
        }
        Ok(())
    }

    /// Builds the complex on `degrees` from a term rule and a differential
    /// rule; validates.
    pub fn from_fn(
        space: Arc<Poset>,
        degrees: Range<i64>,
        mut term: impl FnMut(i64) -> Sheaf,
        mut diff: impl FnMut(i64, &Sheaf, &Sheaf) -> SheafMorphism,
    ) -> Result<Self> {
        let terms: Vec<Sheaf> = degrees.clone().map(&mut term).collect();
        let diffs = (0..terms.len().saturating_sub(1))
            .map(|i| diff(degrees.start + i as i64, &terms[i], &terms[i + 1]))
            .collect();
        SheafComplex::new(space, degrees.start, terms, diffs)
    }

    pub fn zero(space: Arc<Poset>) -> Self {
        SheafComplex::new_unchecked(space, 0, Vec::new(), Vec::new()).expect("zero complex")
    }

    /// The sheaf `s` placed in degree `k`.
    pub fn concentrated(s: &Sheaf, k: i64) -> Self {
        SheafComplex::new_unchecked(s.space().clone(), k, vec![s.clone()], Vec::new()).expect("one term")
    }

    pub fn space(&self) -> &Arc<Poset> {
        &self.space
    }

    /// Degrees in which terms are stored (others are zero).
    pub fn degrees(&self) -> Range<i64> {
        self.lo..self.lo + self.terms.len() as i64
    }

    pub fn term(&self, k: i64) -> &Sheaf {
        let r = self.degrees();
        if r.contains(&k) {
            &self.terms[(k - r.start) as usize]
        } else {
            &self.zero
        }
    }

    /// The differential `C^k -> C^{k+1}`.
    pub fn diff(&self, k: i64) -> SheafMorphism {
        let i = k - self.lo;
        if i >= 0 && (i as usize) < self.diffs.len() {
            self.diffs[i as usize].clone()
        } else {
            SheafMorphism::zero(self.term(k), self.term(k + 1))
        }
    }

    pub fn diff_ref(&self, k: i64) -> Option<&SheafMorphism> {
        let i = k - self.lo;
        (i >= 0 && (i as usize) < self.diffs.len()).then(|| &self.diffs[i as usize])
    }

    /// Component of `d^k` at `x`.
    pub fn diff_at(&self, k: i64, x: usize) -> Matrix {
        match self.diff_ref(k) {
            Some(d) => d.comp(x).clone(),
            None => Matrix::zeros(self.term(k + 1).dim(x), self.term(k).dim(x)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Sheaf::is_zero)
    }

    /// Drops zero terms at both ends.
    pub fn trimmed(&self) -> SheafComplex {
        let first = self.terms.iter().position(|t| !t.is_zero());
        let Some(first) = first else {
            return SheafComplex::zero(self.space.clone());
        };
        let last = self.terms.iter().rposition(|t| !t.is_zero()).unwrap();
        SheafComplex {
            space: self.space.clone(),
            lo: self.lo + first as i64,
            terms: self.terms[first..=last].to_vec(),
            diffs: self.diffs[first..last].to_vec(),
            zero: self.zero.clone(),
        }
    }

    /// Same complex stored over a larger degree window.
    pub fn padded(&self, degrees: Range<i64>) -> SheafComplex {
        let r = union(self.degrees(), degrees);
        let terms: Vec<Sheaf> = r.clone().map(|k| self.term(k).clone()).collect();
        let diffs = r.clone().take(terms.len().saturating_sub(1)).map(|k| self.diff(k)).collect();
        SheafComplex {
            space: self.space.clone(),
            lo: r.start,
            terms,
            diffs,
            zero: self.zero.clone(),
        }
    }

    /// `C[n]^k = C^{n+k}` with differential `(-1)^n d`.
    pub fn shift(&self, n: i64) -> SheafComplex {
        let s = sign(n);
        SheafComplex {
            space: self.space.clone(),
            lo: self.lo - n,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
            zero: self.zero.clone(),
        }
    }

    /// The cochain complex of stalks at `x`.
    pub fn stalk(&self, x: usize) -> CochainComplex {
        CochainComplex {
            lo: self.lo,
            dims: self.terms.iter().map(|t| t.dim(x)).collect(),
            diffs: self.diffs.iter().map(|d| d.comp(x).clone()).collect(),
        }
    }

    pub fn restrict_to(&self, sub: &Arc<Poset>) -> Result<SheafComplex> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.restrict_to(sub))
            .collect::<Result<Vec<_>>>()?;
        let diffs = self
            .diffs
            .iter()
            .map(|d| d.restrict_to(sub))
            .collect::<Result<Vec<_>>>()?;
        // reattach endpoints so they are pointer-equal to the new terms
        let diffs = diffs
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.with_ends(&terms[i], &terms[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        SheafComplex::new_unchecked(sub.clone(), self.lo, terms, diffs)
    }

    pub fn restrict(&self, members: &[usize]) -> SheafComplex {
        let sub = Arc::new(self.space.induced(members));
        self.restrict_to(&sub).expect("induced subposet")
    }

    pub fn pushforward_closed(&self, ambient: &Arc<Poset>) -> Result<SheafComplex> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.pushforward_closed(ambient))
            .collect::<Result<Vec<_>>>()?;
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, d)| d.pushforward_closed(ambient)?.with_ends(&terms[i], &terms[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        SheafComplex::new_unchecked(ambient.clone(), self.lo, terms, diffs)
    }

    pub fn on_space(&self, space: &Arc<Poset>) -> Result<SheafComplex> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.on_space(space))
            .collect::<Result<Vec<_>>>()?;
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, d)| d.with_ends(&terms[i], &terms[i + 1]))
            .collect::<Result<Vec<_>>>()?;
        SheafComplex::new_unchecked(space.clone(), self.lo, terms, diffs)
    }

    pub fn direct_sum(parts: &[&SheafComplex]) -> Result<SheafComplex> {
        let first = parts.first().ok_or_else(|| Error::Input("empty direct sum".into()))?;
        let r = parts.iter().fold(first.degrees(), |r, p| union(r, p.degrees()));
        let terms: Vec<Sheaf> = r
            .clone()
            .map(|k| Sheaf::direct_sum(&parts.iter().map(|p| p.term(k)).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let diffs = r
            .clone()
            .take(terms.len().saturating_sub(1))
            .enumerate()
            .map(|(i, k)| {
                let ds: Vec<SheafMorphism> = parts.iter().map(|p| p.diff(k)).collect();
                SheafMorphism::direct_sum(&ds.iter().collect::<Vec<_>>())?.with_ends(&terms[i], &terms[i + 1])
            })
            .collect::<Result<Vec<_>>>()?;
        SheafComplex::new_unchecked(first.space.clone(), r.start, terms, diffs)
    }

    /// Stalk cohomology dimensions at `x`, nonzero degrees only.
    pub fn cohomology_dims_at(&self, x: usize) -> BTreeMap<i64, usize> {
        self.stalk(x).cohomology_dims()
    }

    /// Every stalk complex is exact.
    pub fn is_acyclic(&self) -> bool {
        (0..self.space.len()).all(|x| self.stalk(x).is_acyclic())
    }

    /// Canonical truncation `τ≤k` and its inclusion.
    pub fn truncate_le(&self, k: i64) -> Result<(SheafComplex, ChainMap)> {
        let r = self.degrees();
        if k >= r.end - 1 {
            return Ok((self.clone(), ChainMap::identity(self)));
        }
        if k < r.start {
            let z = SheafComplex::zero(self.space.clone());
            let incl = ChainMap::zero(&z, self);
            return Ok((z, incl));
        }
        let dk = self.diff(k);
        let (cycles, cycles_incl) = subsheaf(self.term(k), dk.components().iter().map(Matrix::kernel).collect())?;
        let mut terms: Vec<Sheaf> = (r.start..k).map(|j| self.term(j).clone()).collect();
        terms.push(cycles.clone());
        let mut diffs: Vec<SheafMorphism> = (r.start..k - 1).map(|j| self.diff(j)).collect();
        if k > r.start {
            let last = self.diff(k - 1);
            let comp = last
                .components()
                .iter()
                .zip(cycles_incl.components())
                .map(|(d, z)| z.solve(d).map(|s| s.expect("boundaries are cycles")))
                .collect::<Result<Vec<_>>>()?;
            diffs.push(SheafMorphism::new_unchecked(self.term(k - 1).clone(), cycles.clone(), comp)?);
        }
        let tau = SheafComplex::new_unchecked(self.space.clone(), r.start, terms, diffs)?;
        let mut comp = BTreeMap::new();
        for j in r.start..k {
            comp.insert(j, SheafMorphism::identity(self.term(j)));
        }
        comp.insert(k, cycles_incl);
        let incl = ChainMap::new_unchecked(tau.clone(), self.clone(), comp)?;
        Ok((tau, incl))
    }

    /// The mapping cone of `f` with its canonical maps.
    pub fn cone(f: &ChainMap) -> Result<Cone> {
        cone(f)
    }
}

/// A bounded cochain complex of finite-dimensional vector spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainComplex {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<Matrix>,
}

impl CochainComplex {
    fn rank_out(&self, i: usize) -> usize {
        self.diffs.get(i).map_or(0, Matrix::rank)
    }

    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let ranks: Vec<usize> = (0..self.dims.len()).map(|i| self.rank_out(i)).collect();
        let mut out = BTreeMap::new();
        for (i, &n) in self.dims.iter().enumerate() {
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            let h = n - ranks[i] - incoming;
            if h != 0 {
                out.insert(self.lo + i as i64, h);
            }
        }
        out
    }

    pub fn cohomology_dim(&self, k: i64) -> usize {
        self.cohomology_dims().get(&k).copied().unwrap_or(0)
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_dims().is_empty()
    }

    pub fn is_complex(&self) -> bool {
        self.diffs.windows(2).all(|w| (&w[1] * &w[0]).is_zero())
    }
}

/// A degree-0 map of complexes commuting with the differentials.
#[derive(Clone)]
pub struct ChainMap {
    source: SheafComplex,
    target: SheafComplex,
    comp: BTreeMap<i64, SheafMorphism>,
}

impl fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.comp.iter()).finish()
    }
}

impl PartialEq for ChainMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.degrees().all(|k| self.comp(k).components() == other.comp(k).components())
    }
}

impl ChainMap {
    /// Validating constructor: naturality of every component and the chain
    /// condition in every degree.
    pub fn new(source: SheafComplex, target: SheafComplex, comp: BTreeMap<i64, SheafMorphism>) -> Result<Self> {
        let f = ChainMap::new_unchecked(source, target, comp)?;
        f.validate()?;
        Ok(f)
    }

    pub fn new_unchecked(
        source: SheafComplex,
        target: SheafComplex,
        comp: BTreeMap<i64, SheafMorphism>,
    ) -> Result<Self> {
        if !same_space(source.space(), target.space()) {
            return Err(Error::Input("chain map between different spaces".into()));
        }
        for (&k, m) in &comp {
            if m.source().dims() != source.term(k).dims() || m.target().dims() != target.term(k).dims() {
                return Err(Error::Shape(format!("chain map component in degree {k} has wrong shape")));
            }
        }
        let comp = comp
            .into_iter()
            .filter(|(k, _)| !source.term(*k).is_zero() && !target.term(*k).is_zero())
            .map(|(k, m)| {
                let m = m.with_ends(source.term(k), target.term(k))?;
                Ok((k, m))
            })
            .collect::<Result<_>>()?;
        Ok(ChainMap { source, target, comp })
    }

    pub fn from_fn(
        source: &SheafComplex,
        target: &SheafComplex,
        mut f: impl FnMut(i64, &Sheaf, &Sheaf) -> SheafMorphism,
    ) -> Result<Self> {
        let comp = union(source.degrees(), target.degrees())
            .map(|k| (k, f(k, source.term(k), target.term(k))))
            .collect();
        ChainMap::new(source.clone(), target.clone(), comp)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, m) in &self.comp {
            m.check_natural()
                .map_err(|e| Error::Violation(format!("chain map degree {k}: {e}")))?;
        }
        for k in self.degrees() {
            let lhs = self.comp(k + 1).compose(&self.source.diff(k))?;
            let rhs = self.target.diff(k).compose(&self.comp(k))?;
            if lhs.components() != rhs.components() {
                return Err(Error::Violation(format!("chain condition fails in degree {k}")));
            }
        }
        Ok(())
    }

    pub fn identity(c: &SheafComplex) -> Self {
        let comp = c.degrees().map(|k| (k, SheafMorphism::identity(c.term(k)))).collect();
        ChainMap::new_unchecked(c.clone(), c.clone(), comp).expect("identity")
    }

    pub fn zero(source: &SheafComplex, target: &SheafComplex) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            comp: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &SheafComplex {
        &self.source
    }

    pub fn target(&self) -> &SheafComplex {
        &self.target
    }

    pub fn degrees(&self) -> Range<i64> {
        union(self.source.degrees(), self.target.degrees())
    }

    pub fn comp(&self, k: i64) -> SheafMorphism {
        self.comp
            .get(&k)
            .cloned()
            .unwrap_or_else(|| SheafMorphism::zero(self.source.term(k), self.target.term(k)))
    }

    pub fn comp_at(&self, k: i64, x: usize) -> Matrix {
        match self.comp.get(&k) {
            Some(m) => m.comp(x).clone(),
            None => Matrix::zeros(self.target.term(k).dim(x), self.source.term(k).dim(x)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comp.values().all(SheafMorphism::is_zero)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::Shape("composing chain maps with mismatched ends".into()));
        }
        let mut comp = BTreeMap::new();
        for (&k, g) in &self.comp {
            if let Some(f) = first.comp.get(&k) {
                comp.insert(k, g.compose(&f.with_ends(f.source(), g.source())?)?);
            }
        }
        ChainMap::new_unchecked(first.source.clone(), self.target.clone(), comp)
    }

    fn zip_with(
        &self,
        other: &ChainMap,
        f: impl Fn(&SheafMorphism, &SheafMorphism) -> Result<SheafMorphism>,
    ) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("combining chain maps with different ends".into()));
        }
        let comp = self
            .degrees()
            .map(|k| {
                let a = self.comp(k);
                let b = other.comp(k).with_ends(a.source(), a.target())?;
                Ok((k, f(&a, &b)?))
            })
            .collect::<Result<_>>()?;
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), comp)
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: &Rational) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comp: self.comp.iter().map(|(&k, m)| (k, m.scale(s))).collect(),
        }
    }

    /// `f[n]^k = f^{n+k}` (no sign).
    pub fn shift(&self, n: i64) -> ChainMap {
        let source = self.source.shift(n);
        let target = self.target.shift(n);
        let comp = self.comp.iter().map(|(&k, m)| (k - n, m.clone())).collect();
        ChainMap::new_unchecked(source, target, comp).expect("shifted components")
    }

    /// Replaces endpoints by equal complexes (same terms degreewise).
    pub fn with_ends(&self, source: &SheafComplex, target: &SheafComplex) -> Result<ChainMap> {
        ChainMap::new_unchecked(source.clone(), target.clone(), self.comp.clone())
    }

    pub fn restrict_to(&self, sub: &Arc<Poset>) -> Result<ChainMap> {
        let source = self.source.restrict_to(sub)?;
        let target = self.target.restrict_to(sub)?;
        let comp = self
            .comp
            .iter()
            .map(|(&k, m)| Ok((k, m.restrict_to(sub)?)))
            .collect::<Result<_>>()?;
        ChainMap::new_unchecked(source, target, comp)
    }

    pub fn restrict(&self, members: &[usize]) -> ChainMap {
        let sub = Arc::new(self.source.space().induced(members));
        self.restrict_to(&sub).expect("induced subposet")
    }

    pub fn pushforward_closed(&self, ambient: &Arc<Poset>) -> Result<ChainMap> {
        let source = self.source.pushforward_closed(ambient)?;
        let target = self.target.pushforward_closed(ambient)?;
        let comp = self
            .comp
            .iter()
            .map(|(&k, m)| Ok((k, m.pushforward_closed(ambient)?)))
            .collect::<Result<_>>()?;
        ChainMap::new_unchecked(source, target, comp)
    }

    pub fn direct_sum(parts: &[&ChainMap]) -> Result<ChainMap> {
        let source = SheafComplex::direct_sum(&parts.iter().map(|p| &p.source).collect::<Vec<_>>())?;
        let target = SheafComplex::direct_sum(&parts.iter().map(|p| &p.target).collect::<Vec<_>>())?;
        let comp = union(source.degrees(), target.degrees())
            .map(|k| {
                let cs: Vec<SheafMorphism> = parts.iter().map(|p| p.comp(k)).collect();
                Ok((k, SheafMorphism::direct_sum(&cs.iter().collect::<Vec<_>>())?))
            })
            .collect::<Result<_>>()?;
        ChainMap::new_unchecked(source, target, comp)
    }

    /// All component entries over `degrees`, degree by degree.
    pub fn flatten(&self, degrees: Range<i64>) -> Vec<Rational> {
        degrees.flat_map(|k| self.comp(k).flatten()).collect()
    }
}

/// `cone(f)` with `ι: target -> cone` and `π: cone -> source[1]`.
#[derive(Debug, Clone)]
pub struct Cone {
    pub complex: SheafComplex,
    pub iota: ChainMap,
    pub pi: ChainMap,
}

/// `Cone^k = A^{k+1} ⊕ B^k`, `d = [[-d_A, 0], [f, d_B]]`.
pub fn cone(f: &ChainMap) -> Result<Cone> {
    let a = f.source();
    let b = f.target();
    let space = a.space().clone();
    let ra = a.degrees();
    let degrees = union(
        if ra.is_empty() { ra.clone() } else { ra.start - 1..ra.end - 1 },
        b.degrees(),
    );
    let terms: Vec<Sheaf> = degrees
        .clone()
        .map(|k| Sheaf::direct_sum(&[a.term(k + 1), b.term(k)]))
        .collect::<Result<_>>()?;
    let mut diffs = Vec::new();
    for (i, k) in degrees.clone().enumerate().take(terms.len().saturating_sub(1)) {
        let comp = (0..space.len())
            .map(|x| {
                let (a1, a2) = (a.term(k + 1).dim(x), a.term(k + 2).dim(x));
                let (b0, b1) = (b.term(k).dim(x), b.term(k + 1).dim(x));
                let mut m = Matrix::zeros(a2 + b1, a1 + b0);
                m.set_block(0, 0, &(-&a.diff_at(k + 1, x)));
                m.set_block(a2, 0, &f.comp_at(k + 1, x));
                m.set_block(a2, a1, &b.diff_at(k, x));
                m
            })
            .collect();
        diffs.push(SheafMorphism::new_unchecked(terms[i].clone(), terms[i + 1].clone(), comp)?);
    }
    let complex = SheafComplex::new_unchecked(space.clone(), degrees.start, terms, diffs)?;
    let iota_comp = degrees
        .clone()
        .map(|k| {
            let comp = (0..space.len())
                .map(|x| {
                    let (a1, b0) = (a.term(k + 1).dim(x), b.term(k).dim(x));
                    let mut m = Matrix::zeros(a1 + b0, b0);
                    m.set_block(a1, 0, &Matrix::identity(b0));
                    m
                })
                .collect();
            Ok((k, SheafMorphism::new_unchecked(b.term(k).clone(), complex.term(k).clone(), comp)?))
        })
        .collect::<Result<_>>()?;
    let iota = ChainMap::new_unchecked(b.clone(), complex.clone(), iota_comp)?;
    let a1 = a.shift(1);
    let pi_comp = degrees
        .clone()
        .map(|k| {
            let comp = (0..space.len())
                .map(|x| {
                    let (n, b0) = (a.term(k + 1).dim(x), b.term(k).dim(x));
                    let mut m = Matrix::zeros(n, n + b0);
                    m.set_block(0, 0, &Matrix::identity(n));
                    m
                })
                .collect();
            Ok((k, SheafMorphism::new_unchecked(complex.term(k).clone(), a1.term(k).clone(), comp)?))
        })
        .collect::<Result<_>>()?;
    let pi = ChainMap::new_unchecked(complex.clone(), a1, pi_comp)?;
    Ok(Cone { complex, iota, pi })
}
