//! Derived direct image along open inclusions (bar construction), local
//! cohomology for an open/closed decomposition, adjunction units and global
//! sections.
//!
//! In bar degree `p` the stalk of `Rj_*C` at `x` is the sum over chains
//! `σ0 < ... < σp` in `U ∩ U_x` of `C(σp)`; the total differential is
//! `δ + (-1)^p d_C` with `δ` the alternating face sum.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use crate::complex::{cone, ChainMap, CochainComplex, SheafComplex};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::poset::{Poset, Subspace, SubspaceKind};
use crate::sheaf::{Sheaf, SheafMorphism};

/// `j: U -> X` for an open (up-closed) `U`.
#[derive(Debug, Clone)]
pub struct OpenInclusion {
    ambient: Arc<Poset>,
    part: Subspace,
    sub: Arc<Poset>,
}

/// `i: Z -> X` for a closed (down-closed) `Z`.
#[derive(Debug, Clone)]
pub struct ClosedInclusion {
    ambient: Arc<Poset>,
    part: Subspace,
    sub: Arc<Poset>,
}

impl OpenInclusion {
    pub fn new(ambient: &Arc<Poset>, members: &[usize]) -> Result<Self> {
        let part = Subspace::open(ambient, members)?;
        let sub = Arc::new(ambient.induced(part.members()));
        Ok(OpenInclusion {
            ambient: ambient.clone(),
            part,
            sub,
        })
    }

    pub fn from_subspace(ambient: &Arc<Poset>, part: &Subspace) -> Result<Self> {
        if part.kind() == SubspaceKind::Closed && !ambient.is_up_set(part.members()) {
            return Err(Error::Input("expected an open subspace".into()));
        }
        OpenInclusion::new(ambient, part.members())
    }

    pub fn ambient(&self) -> &Arc<Poset> {
        &self.ambient
    }

    /// The open part as a poset in its own right.
    pub fn sub(&self) -> &Arc<Poset> {
        &self.sub
    }

    pub fn members(&self) -> &[usize] {
        self.part.members()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.part
    }

    /// The complementary closed inclusion.
    pub fn complement(&self) -> ClosedInclusion {
        ClosedInclusion::new(&self.ambient, &self.ambient.complement(self.members())).expect("complement of open")
    }

    /// `j⁻¹`.
    pub fn restrict(&self, c: &SheafComplex) -> Result<SheafComplex> {
        c.restrict_to(&self.sub)
    }

    pub fn restrict_map(&self, f: &ChainMap) -> Result<ChainMap> {
        f.restrict_to(&self.sub)
    }

    fn bar(&self) -> Bar {
        let emb = self.ambient.embedding_of(&self.sub).expect("induced");
        let chains = (0..self.ambient.len())
            .map(|x| {
                let above: Vec<usize> = (0..self.sub.len())
                    .filter(|&u| self.ambient.le(x, emb[u]))
                    .collect();
                self.sub.all_chains(&above)
            })
            .collect();
        Bar::new(chains)
    }

    /// `Rj_*C` for a complex `C` on the open part.
    pub fn pushforward(&self, c: &SheafComplex) -> Result<SheafComplex> {
        let c = c.on_space(&self.sub).map_err(|_| {
            Error::Input("complex is not supported on the open part".into())
        })?;
        self.bar().complex(&self.ambient, &c)
    }

    /// `Rj_*f` between already computed pushforwards.
    pub fn pushforward_map(&self, f: &ChainMap, source: &SheafComplex, target: &SheafComplex) -> Result<ChainMap> {
        let f = f.with_ends(&f.source().on_space(&self.sub)?, &f.target().on_space(&self.sub)?)?;
        self.bar().chain_map(&self.ambient, &f, source, target)
    }

    /// The unit `C -> Rj_* j⁻¹ C` for `C` on the ambient space, given the
    /// pushforward of `j⁻¹C`.
    pub fn unit(&self, c: &SheafComplex, pushed: &SheafComplex) -> Result<ChainMap> {
        let emb = self.ambient.embedding_of(&self.sub)?;
        let all: Vec<usize> = (0..self.ambient.len()).collect();
        let comp = self.unit_components(
            &all,
            pushed,
            |n| c.term(n).clone(),
            |q, u| c.term(q).dim(emb[u]),
            |n, x, u| c.term(n).map(x, emb[u]),
        )?;
        ChainMap::new_unchecked(c.clone(), pushed.clone(), comp)
    }

    /// The augmentation `C -> j⁻¹Rj_*C` for `C` on the open part; a
    /// quasi-isomorphism because `U ∩ U_x` has least element `x`.
    pub fn augmentation(&self, c: &SheafComplex, pushed: &SheafComplex) -> Result<ChainMap> {
        let c = c.on_space(&self.sub)?;
        let emb = self.ambient.embedding_of(&self.sub)?;
        let restricted = self.restrict(pushed)?;
        let comp = self.unit_components(
            &emb,
            &restricted,
            |n| c.term(n).clone(),
            |q, u| c.term(q).dim(u),
            |n, u, v| c.term(n).map(u, v),
        )?;
        ChainMap::new_unchecked(c.clone(), restricted, comp)
    }

    // Components of a unit-type map into `target`, whose element `i` sits at
    // ambient `points[i]`; `restriction(n, i, u)` maps the source stalk at
    // `i` to the stalk at the open element `u` (local index), whose
    // dimension in degree `q` is `open_dim(q, u)`.
    fn unit_components(
        &self,
        points: &[usize],
        target: &SheafComplex,
        source_term: impl Fn(i64) -> Sheaf,
        open_dim: impl Fn(i64, usize) -> usize,
        restriction: impl Fn(i64, usize, usize) -> Matrix,
    ) -> Result<BTreeMap<i64, SheafMorphism>> {
        let bar = self.bar();
        target
            .degrees()
            .map(|n| {
                let source = source_term(n);
                let tgt = target.term(n);
                let comp = points
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let mut m = Matrix::zeros(tgt.dim(i), source.dim(i));
                        let layout = bar.layout(x, n, &open_dim);
                        for (blk, _) in layout.iter().filter(|(b, _)| b.p == 0) {
                            let top = bar.chains[x][0][blk.chain][0];
                            m.set_block(blk.offset, 0, &restriction(n, i, top));
                        }
                        m
                    })
                    .collect();
                Ok((n, SheafMorphism::new_unchecked(source.clone(), tgt.clone(), comp)?))
            })
            .collect()
    }
}

impl ClosedInclusion {
    pub fn new(ambient: &Arc<Poset>, members: &[usize]) -> Result<Self> {
        let part = Subspace::closed(ambient, members)?;
        let sub = Arc::new(ambient.induced(part.members()));
        Ok(ClosedInclusion {
            ambient: ambient.clone(),
            part,
            sub,
        })
    }

    pub fn ambient(&self) -> &Arc<Poset> {
        &self.ambient
    }

    pub fn sub(&self) -> &Arc<Poset> {
        &self.sub
    }

    pub fn members(&self) -> &[usize] {
        self.part.members()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.part
    }

    pub fn complement(&self) -> OpenInclusion {
        OpenInclusion::new(&self.ambient, &self.ambient.complement(self.members())).expect("complement of closed")
    }

    /// `i⁻¹`.
    pub fn restrict(&self, c: &SheafComplex) -> Result<SheafComplex> {
        c.restrict_to(&self.sub)
    }

    /// `i_*` (extension by zero).
    pub fn pushforward(&self, c: &SheafComplex) -> Result<SheafComplex> {
        c.on_space(&self.sub)?.pushforward_closed(&self.ambient)
    }
}

struct Block {
    p: usize,
    chain: usize,
    offset: usize,
}

struct Bar {
    // element -> bar degree -> chains (local indices, increasing)
    chains: Vec<Vec<Vec<Vec<usize>>>>,
    index: Vec<Vec<HashMap<Vec<usize>, usize>>>,
}

impl Bar {
    fn new(chains: Vec<Vec<Vec<Vec<usize>>>>) -> Self {
        let index = chains
            .iter()
            .map(|per_p| {
                per_p
                    .iter()
                    .map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
                    .collect()
            })
            .collect();
        Bar { chains, index }
    }

    fn max_p(&self) -> usize {
        self.chains.iter().map(|c| c.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Blocks of total degree `n` at `x`; `dim(q, u)` is the dimension of
    /// `C^q` at the local element `u`.
    fn layout(&self, x: usize, n: i64, dim: impl Fn(i64, usize) -> usize) -> Vec<(Block, usize)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (p, cs) in self.chains[x].iter().enumerate() {
            let q = n - p as i64;
            for (i, c) in cs.iter().enumerate() {
                let size = dim(q, *c.last().unwrap());
                out.push((Block { p, chain: i, offset }, size));
                offset += size;
            }
        }
        out
    }

    fn degrees(&self, c: &SheafComplex) -> Range<i64> {
        let r = c.degrees();
        if r.is_empty() || self.chains.iter().all(|cs| cs.is_empty()) {
            return 0..0;
        }
        r.start..r.end + self.max_p() as i64
    }

    fn complex(&self, ambient: &Arc<Poset>, c: &SheafComplex) -> Result<SheafComplex> {
        let degrees = self.degrees(c);
        let n_el = ambient.len();
        let dim = |q: i64, u: usize| c.term(q).dim(u);
        let layouts: Vec<Vec<Vec<(Block, usize)>>> = degrees
            .clone()
            .map(|n| (0..n_el).map(|x| self.layout(x, n, dim)).collect())
            .collect();
        let total = |i: usize, x: usize| layouts[i][x].iter().map(|b| b.1).sum::<usize>();
        let mut terms = Vec::new();
        for (i, _) in degrees.clone().enumerate() {
            let dims: Vec<usize> = (0..n_el).map(|x| total(i, x)).collect();
            let maps = ambient
                .covers()
                .iter()
                .map(|&(x, y)| {
                    let mut m = Matrix::zeros(dims[y], dims[x]);
                    for (blk, size) in &layouts[i][y] {
                        let chain = &self.chains[y][blk.p][blk.chain];
                        let src = self.index[x][blk.p][chain];
                        let (sb, _) = layouts[i][x]
                            .iter()
                            .find(|(b, _)| b.p == blk.p && b.chain == src)
                            .expect("chain present below");
                        m.set_block(blk.offset, sb.offset, &Matrix::identity(*size));
                    }
                    m
                })
                .collect();
            terms.push(Sheaf::new(ambient.clone(), dims, maps)?);
        }
        let mut diffs = Vec::new();
        for (i, n) in degrees.clone().enumerate().take(terms.len().saturating_sub(1)) {
            let comp = (0..n_el)
                .map(|x| self.differential(x, n, c, &layouts[i][x], &layouts[i + 1][x], total(i + 1, x), total(i, x)))
                .collect();
            diffs.push(SheafMorphism::new_unchecked(terms[i].clone(), terms[i + 1].clone(), comp)?);
        }
        SheafComplex::new_unchecked(ambient.clone(), degrees.start, terms, diffs)
    }

    #[allow(clippy::too_many_arguments)]
    fn differential(
        &self,
        x: usize,
        n: i64,
        c: &SheafComplex,
        from: &[(Block, usize)],
        to: &[(Block, usize)],
        rows: usize,
        cols: usize,
    ) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        let find = |layout: &[(Block, usize)], p: usize, chain: usize| {
            layout
                .iter()
                .find(|(b, _)| b.p == p && b.chain == chain)
                .map(|(b, s)| (b.offset, *s))
        };
        for (blk, size) in from {
            if *size == 0 {
                continue;
            }
            let chain = &self.chains[x][blk.p][blk.chain];
            let top = *chain.last().unwrap();
            let q = n - blk.p as i64;
            // internal differential, sign (-1)^p
            if let Some((off, tsize)) = find(to, blk.p, blk.chain) {
                if tsize > 0 {
                    let mut d = c.diff_at(q, top);
                    if blk.p % 2 == 1 {
                        d = -&d;
                    }
                    m.add_block(off, blk.offset, &d);
                }
            }
        }
        // face maps into each (p+1)-chain
        for (blk, size) in to {
            if *size == 0 || blk.p == 0 {
                continue;
            }
            let rho = &self.chains[x][blk.p][blk.chain];
            let q = n + 1 - blk.p as i64;
            let p = blk.p;
            for i in 0..=p {
                let mut face = rho.clone();
                face.remove(i);
                let Some(&fi) = self.index[x][p - 1].get(&face) else { continue };
                let Some((off, fsize)) = find(from, p - 1, fi) else { continue };
                if fsize == 0 {
                    continue;
                }
                let sgn = if i % 2 == 0 { Rational::one() } else { Rational::from_int(-1) };
                let block = if i == p {
                    c.term(q).map(face[p - 1], rho[p]).scale(&sgn)
                } else {
                    Matrix::scalar(*size, sgn)
                };
                m.add_block(blk.offset, off, &block);
            }
        }
        m
    }

    fn chain_map(
        &self,
        ambient: &Arc<Poset>,
        f: &ChainMap,
        source: &SheafComplex,
        target: &SheafComplex,
    ) -> Result<ChainMap> {
        let degrees = crate::complex::union_of(source.degrees(), target.degrees());
        let comp = degrees
            .map(|n| {
                let s = source.term(n);
                let t = target.term(n);
                let comp = (0..ambient.len())
                    .map(|x| {
                        let ls = self.layout(x, n, |q, u| f.source().term(q).dim(u));
                        let lt = self.layout(x, n, |q, u| f.target().term(q).dim(u));
                        let mut m = Matrix::zeros(t.dim(x), s.dim(x));
                        for ((bs, ss), (bt, st)) in ls.iter().zip(&lt) {
                            if *ss == 0 || *st == 0 {
                                continue;
                            }
                            let top = *self.chains[x][bs.p][bs.chain].last().unwrap();
                            let q = n - bs.p as i64;
                            m.set_block(bt.offset, bs.offset, &f.comp_at(q, top));
                        }
                        m
                    })
                    .collect();
                Ok((n, SheafMorphism::new_unchecked(s.clone(), t.clone(), comp)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        ChainMap::new_unchecked(source.clone(), target.clone(), comp)
    }
}

/// Hypercohomology complex of `C` over the whole space (bar construction
/// over all chains).
pub fn global_sections(c: &SheafComplex) -> CochainComplex {
    let space = c.space();
    let all: Vec<usize> = (0..space.len()).collect();
    let bar = Bar::new(vec![space.all_chains(&all)]);
    let degrees = bar.degrees(c);
    let dim = |q: i64, u: usize| c.term(q).dim(u);
    let layouts: Vec<Vec<(Block, usize)>> = degrees.clone().map(|n| bar.layout(0, n, dim)).collect();
    let totals: Vec<usize> = layouts.iter().map(|l| l.iter().map(|b| b.1).sum()).collect();
    let diffs = degrees
        .clone()
        .enumerate()
        .take(totals.len().saturating_sub(1))
        .map(|(i, n)| bar.differential(0, n, c, &layouts[i], &layouts[i + 1], totals[i + 1], totals[i]))
        .collect();
    CochainComplex {
        lo: degrees.start,
        dims: totals,
        diffs,
    }
}

/// `RΓ_L C = Rj_{L*} j_L⁻¹ C` with the unit `ρ: C -> RΓ_L C`.
#[derive(Debug, Clone)]
pub struct GammaOpen {
    pub inclusion: OpenInclusion,
    pub complex: SheafComplex,
    pub unit: ChainMap,
}

/// `RΓ_K C = cone(ρ)[-1]` with the triangle
/// `RΓ_K C -> C -> RΓ_L C -> RΓ_K C[1]`.
#[derive(Debug, Clone)]
pub struct GammaClosed {
    pub open: GammaOpen,
    pub complex: SheafComplex,
    /// `RΓ_K C -> C`.
    pub counit: ChainMap,
    /// `RΓ_L C -> RΓ_K C[1]`, the cone inclusion.
    pub connecting: ChainMap,
}

pub fn gamma_open(l: &OpenInclusion, c: &SheafComplex) -> Result<GammaOpen> {
    let restricted = l.restrict(c)?;
    let complex = l.pushforward(&restricted)?;
    let unit = l.unit(c, &complex)?;
    Ok(GammaOpen {
        inclusion: l.clone(),
        complex,
        unit,
    })
}

pub fn gamma_closed(k: &ClosedInclusion, c: &SheafComplex) -> Result<GammaClosed> {
    let open = gamma_open(&k.complement(), c)?;
    let cone = cone(&open.unit)?;
    let complex = cone.complex.shift(-1);
    let counit = cone.pi.shift(-1).with_ends(&complex, c)?;
    let connecting = cone.iota.with_ends(&open.complex, &complex.shift(1))?;
    Ok(GammaClosed {
        open,
        complex,
        counit,
        connecting,
    })
}

/// `RΓ_L f` between computed local cohomologies.
pub fn gamma_open_map(f: &ChainMap, source: &GammaOpen, target: &GammaOpen) -> Result<ChainMap> {
    let l = &source.inclusion;
    let restricted = l.restrict_map(f)?;
    l.pushforward_map(&restricted, &source.complex, &target.complex)
}

/// `RΓ_K f`: componentwise `(f, RΓ_L f)` on the shifted cones.
pub fn gamma_closed_map(f: &ChainMap, source: &GammaClosed, target: &GammaClosed) -> Result<ChainMap> {
    let g = gamma_open_map(f, &source.open, &target.open)?;
    let space = f.source().space().clone();
    let degrees = crate::complex::union_of(source.complex.degrees(), target.complex.degrees());
    let comp = degrees
        .map(|k| {
            let s = source.complex.term(k);
            let t = target.complex.term(k);
            let comp = (0..space.len())
                .map(|x| Matrix::block_diag(&[&f.comp_at(k, x), &g.comp_at(k - 1, x)]))
                .collect();
            Ok((k, SheafMorphism::new_unchecked(s.clone(), t.clone(), comp)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    ChainMap::new_unchecked(source.complex.clone(), target.complex.clone(), comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cohomology_sheaf, is_quasi_iso};
    use crate::fixtures;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn disk_setup() -> (Arc<Poset>, OpenInclusion) {
        let p = Arc::new(fixtures::disk());
        let u = OpenInclusion::new(&p, &p.indices_of(&["a", "b", "c", "d"]).unwrap()).unwrap();
        (p, u)
    }

    fn push_local(lambda: i64) -> (Arc<Poset>, SheafComplex) {
        let (p, u) = disk_setup();
        let l = fixtures::circle_local_system(q(lambda)).into_sheaf();
        let c = SheafComplex::concentrated(&l, 0);
        let r = u.pushforward(&c).unwrap();
        r.validate().unwrap();
        (p, r)
    }

    #[test]
    fn pushforward_of_trivial_local_system() {
        let (p, r) = push_local(1);
        let s = p.index_of("s").unwrap();
        let dims = r.cohomology_dims_at(s);
        assert_eq!(dims, BTreeMap::from([(0, 1), (1, 1)]));
        for x in 1..p.len() {
            assert_eq!(r.cohomology_dims_at(x), BTreeMap::from([(0, 1)]));
        }
    }

    #[test]
    fn pushforward_with_holonomy_vanishes_at_s() {
        for lambda in [2, -1, 3] {
            let (p, r) = push_local(lambda);
            assert!(r.cohomology_dims_at(p.index_of("s").unwrap()).is_empty());
        }
    }

    #[test]
    fn unit_is_quasi_iso_for_whole_space() {
        let p = Arc::new(fixtures::disk());
        let all: Vec<usize> = (0..p.len()).collect();
        let j = OpenInclusion::new(&p, &all).unwrap();
        let c = SheafComplex::concentrated(&Sheaf::constant(p.clone(), 2), 0);
        let g = gamma_open(&j, &c).unwrap();
        g.unit.validate().unwrap();
        assert!(is_quasi_iso(&g.unit).unwrap());
    }

    #[test]
    fn augmentation_is_quasi_iso_on_open_part() {
        let (_, u) = disk_setup();
        let l = fixtures::jordan_local_system().into_sheaf();
        let c = SheafComplex::concentrated(&l, -1);
        let r = u.pushforward(&c).unwrap();
        let back = u.restrict(&r).unwrap();
        // unit of the identity inclusion of U into itself
        let all: Vec<usize> = (0..u.sub().len()).collect();
        let id = OpenInclusion::new(u.sub(), &all).unwrap();
        let g = gamma_open(&id, &c.on_space(u.sub()).unwrap()).unwrap();
        assert!(is_quasi_iso(&g.unit).unwrap());
        for x in 0..u.sub().len() {
            assert_eq!(back.cohomology_dims_at(x), BTreeMap::from([(-1, 2)]));
        }
    }

    #[test]
    fn augmentation_on_circle_part() {
        let (_, u) = disk_setup();
        for lambda in [1, 2] {
            let l = fixtures::circle_local_system(q(lambda)).into_sheaf();
            let c = SheafComplex::concentrated(&l, 0);
            let r = u.pushforward(&c).unwrap();
            let aug = u.augmentation(&c, &r).unwrap();
            aug.validate().unwrap();
            assert!(is_quasi_iso(&aug).unwrap());
        }
    }

    #[test]
    fn gamma_open_sector() {
        let (p, _) = disk_setup();
        let l = OpenInclusion::new(&p, &p.indices_of(&["b", "c", "d"]).unwrap()).unwrap();
        for lambda in [1, 2, -1] {
            let (_, r) = push_local(lambda);
            let g = gamma_open(&l, &r.shift(1)).unwrap();
            g.unit.validate().unwrap();
            let s = p.index_of("s").unwrap();
            assert_eq!(g.complex.cohomology_dims_at(s), BTreeMap::from([(-1, 1)]), "λ={lambda}");
        }
    }

    #[test]
    fn gamma_open_empty_is_zero() {
        let p = Arc::new(fixtures::disk());
        let e = OpenInclusion::new(&p, &[]).unwrap();
        let c = SheafComplex::concentrated(&Sheaf::constant(p.clone(), 1), 0);
        assert!(gamma_open(&e, &c).unwrap().complex.is_zero());
    }

    #[test]
    fn gamma_closed_examples() {
        let (p, r) = push_local(1);
        let r1 = r.shift(1);
        let s = p.index_of("s").unwrap();
        let kgood = ClosedInclusion::new(&p, &p.indices_of(&["s", "a"]).unwrap()).unwrap();
        let g = gamma_closed(&kgood, &r1).unwrap();
        g.complex.validate().unwrap();
        g.counit.validate().unwrap();
        g.connecting.validate().unwrap();
        assert_eq!(g.complex.cohomology_dims_at(s), BTreeMap::from([(0, 1)]));

        let ks = ClosedInclusion::new(&p, &[s]).unwrap();
        let g = gamma_closed(&ks, &r1).unwrap();
        assert_eq!(g.open.complex.cohomology_dims_at(s).get(&0), Some(&1));

        let all: Vec<usize> = (0..p.len()).collect();
        let kx = ClosedInclusion::new(&p, &all).unwrap();
        let g = gamma_closed(&kx, &r1).unwrap();
        assert!(is_quasi_iso(&g.counit).unwrap());
    }

    #[test]
    fn global_sections_examples() {
        let seg = Arc::new(fixtures::segment());
        let c = SheafComplex::concentrated(&Sheaf::constant(seg, 1), 0);
        assert_eq!(global_sections(&c).cohomology_dims(), BTreeMap::from([(0, 1)]));
        let circ = Arc::new(fixtures::circle());
        let c = SheafComplex::concentrated(&Sheaf::constant(circ.clone(), 1), 0);
        assert_eq!(global_sections(&c).cohomology_dims(), BTreeMap::from([(0, 1), (1, 1)]));
        assert!(global_sections(&SheafComplex::zero(circ)).cohomology_dims().is_empty());
    }

    #[test]
    fn cohomology_sheaf_of_pushforward() {
        let (p, r) = push_local(1);
        let r1 = r.shift(1);
        let s = p.index_of("s").unwrap();
        assert_eq!(cohomology_sheaf(&r1, -1).unwrap().sheaf.dim(s), 1);
        assert_eq!(cohomology_sheaf(&r1, 0).unwrap().sheaf.dim(s), 1);
    }

    #[test]
    fn pushforward_is_functorial() {
        let (_, u) = disk_setup();
        let l = fixtures::circle_local_system(q(1)).into_sheaf();
        let c = SheafComplex::concentrated(&l, 0);
        let two = ChainMap::from_fn(&c, &c, |_, s, _| SheafMorphism::scalar(s, q(2))).unwrap();
        let r = u.pushforward(&c).unwrap();
        let f = u.pushforward_map(&two, &r, &r).unwrap();
        f.validate().unwrap();
        assert_eq!(f, ChainMap::identity(&r).scale(&q(2)));
    }
}
