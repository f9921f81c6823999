//! Homotopies, homotopy classes of chain maps and the triangle fill-in.
//!
//! Every unknown natural transformation is written in a basis of its Hom
//! space, so all systems below are in basis coefficients.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Rational};
use crate::sheaf::{hom_basis, hom_offsets, Sheaf, SheafMorphism};

use super::{union, ChainMap, SheafComplex};

/// `h^k: source^k -> target^{k-1}` with `f - g = d h + h d`.
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub f: ChainMap,
    pub g: ChainMap,
    comp: BTreeMap<i64, SheafMorphism>,
}

impl Homotopy {
    pub fn new(f: ChainMap, g: ChainMap, comp: BTreeMap<i64, SheafMorphism>) -> Result<Self> {
        let h = Homotopy { f, g, comp };
        h.validate()?;
        Ok(h)
    }

    pub fn comp(&self, k: i64) -> SheafMorphism {
        let s = self.f.source().term(k);
        let t = self.f.target().term(k - 1);
        self.comp
            .get(&k)
            .cloned()
            .unwrap_or_else(|| SheafMorphism::zero(s, t))
    }

    pub fn validate(&self) -> Result<()> {
        let src = self.f.source();
        let tgt = self.f.target();
        if self.g.source() != src || self.g.target() != tgt {
            return Err(Error::Shape("homotopy between maps with different ends".into()));
        }
        for m in self.comp.values() {
            m.check_natural()?;
        }
        for k in union(src.degrees(), tgt.degrees()) {
            for x in 0..src.space().len() {
                let lhs = &self.f.comp_at(k, x) - &self.g.comp_at(k, x);
                let dh = &tgt.diff_at(k - 1, x) * self.comp(k).comp(x);
                let hd = self.comp(k + 1).comp(x) * &src.diff_at(k, x);
                if lhs != &dh + &hd {
                    return Err(Error::Violation(format!("homotopy relation fails in degree {k}")));
                }
            }
        }
        Ok(())
    }
}

// ---- coefficient systems -------------------------------------------------

struct Block {
    offset: usize,
    basis: Vec<SheafMorphism>,
}

struct Unknowns {
    count: usize,
}

impl Unknowns {
    fn block(&mut self, source: &Sheaf, target: &Sheaf) -> Block {
        let basis = hom_basis(source, target);
        let b = Block {
            offset: self.count,
            basis,
        };
        self.count += b.basis.len();
        b
    }
}

impl Block {
    fn value(&self, coeffs: &[Rational]) -> Option<SheafMorphism> {
        let first = self.basis.first()?;
        let mut acc = SheafMorphism::zero(first.source(), first.target());
        for (i, b) in self.basis.iter().enumerate() {
            let c = &coeffs[self.offset + i];
            if !c.is_zero() {
                acc = acc.add(&b.scale(c)).expect("same ends");
            }
        }
        Some(acc)
    }
}

/// One term `sign · left ∘ X ∘ right` of a linear equation in `Hom(P, Q)`.
struct Term<'a> {
    block: &'a Block,
    left: Option<&'a SheafMorphism>,
    right: Option<&'a SheafMorphism>,
    sign: i64,
}

fn sandwich(left: Option<&SheafMorphism>, mid: &SheafMorphism, right: Option<&SheafMorphism>) -> Vec<Rational> {
    (0..mid.source().space().len())
        .flat_map(|x| {
            let mut m = mid.comp(x).clone();
            if let Some(r) = right {
                m = &m * r.comp(x);
            }
            if let Some(l) = left {
                m = l.comp(x) * &m;
            }
            m.entries().to_vec()
        })
        .collect()
}

/// Adds `Σ terms = rhs` entrywise in `Hom(p, q)`.
fn add_equation(sys: &mut LinearSystem, p: &Sheaf, q: &Sheaf, terms: &[Term<'_>], rhs: Option<&SheafMorphism>) {
    let n = *hom_offsets(p, q).last().unwrap();
    if n == 0 {
        return;
    }
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for t in terms {
        let s = Rational::from_int(t.sign);
        for (i, b) in t.block.basis.iter().enumerate() {
            let v = sandwich(t.left, b, t.right);
            debug_assert_eq!(v.len(), n);
            for (e, val) in v.into_iter().enumerate() {
                if !val.is_zero() {
                    rows[e].push((t.block.offset + i, &val * &s));
                }
            }
        }
    }
    let rhs: Vec<Rational> = match rhs {
        Some(r) => r.flatten(),
        None => vec![Rational::zero(); n],
    };
    for (row, r) in rows.into_iter().zip(rhs) {
        if row.is_empty() && r.is_zero() {
            continue;
        }
        sys.add_equation(row, r);
    }
}

fn flat_len(c: &SheafComplex, d: &SheafComplex, r: Range<i64>) -> usize {
    r.map(|k| *hom_offsets(c.term(k), d.term(k)).last().unwrap()).sum()
}

fn window(parts: &[Range<i64>]) -> Range<i64> {
    let r = parts.iter().cloned().fold(0..0, union);
    if r.is_empty() {
        r
    } else {
        r.start - 1..r.end + 1
    }
}

fn assemble_chain_map(
    source: &SheafComplex,
    target: &SheafComplex,
    blocks: &BTreeMap<i64, Block>,
    coeffs: &[Rational],
) -> Result<ChainMap> {
    let comp = blocks
        .iter()
        .filter_map(|(&k, b)| b.value(coeffs).map(|m| (k, m)))
        .collect();
    ChainMap::new_unchecked(source.clone(), target.clone(), comp)
}

fn assemble_homotopy(
    f: &ChainMap,
    g: &ChainMap,
    blocks: &BTreeMap<i64, Block>,
    coeffs: &[Rational],
) -> Result<Homotopy> {
    let comp = blocks
        .iter()
        .filter_map(|(&k, b)| b.value(coeffs).map(|m| (k, m)))
        .collect();
    Homotopy::new(f.clone(), g.clone(), comp)
}

/// Whether `f` and `g` are chain homotopic; returns a homotopy if so.
pub fn find_homotopy(f: &ChainMap, g: &ChainMap) -> Result<Option<Homotopy>> {
    let src = f.source();
    let tgt = f.target();
    let r = window(&[src.degrees(), tgt.degrees()]);
    let mut unk = Unknowns { count: 0 };
    let hb: BTreeMap<i64, Block> = r.clone().map(|k| (k, unk.block(src.term(k), tgt.term(k - 1)))).collect();
    let mut sys = LinearSystem::new(unk.count);
    for k in r.start..r.end - 1 {
        let fk = f.comp(k);
        let rhs = fk.sub(&g.comp(k).with_ends(fk.source(), fk.target())?)?;
        let d_t = tgt.diff(k - 1);
        let d_s = src.diff(k);
        let terms = [
            Term {
                block: &hb[&k],
                left: Some(&d_t),
                right: None,
                sign: 1,
            },
            Term {
                block: &hb[&(k + 1)],
                left: None,
                right: Some(&d_s),
                sign: 1,
            },
        ];
        add_equation(&mut sys, src.term(k), tgt.term(k), &terms, Some(&rhs));
    }
    match sys.particular() {
        None => Ok(None),
        Some(coeffs) => Ok(Some(assemble_homotopy(f, g, &hb, &coeffs)?)),
    }
}

/// Chain maps `C -> D` modulo homotopy.
#[derive(Debug, Clone)]
pub struct HomClasses {
    /// Dimension of the space of homotopy classes.
    pub dim: usize,
    /// Chain maps whose classes form a basis.
    pub representatives: Vec<ChainMap>,
    /// Dimension of the space of chain maps.
    pub cycles: usize,
    /// Dimension of the space of null-homotopic chain maps.
    pub boundaries: usize,
}

fn add_chain_conditions(
    sys: &mut LinearSystem,
    c: &SheafComplex,
    d: &SheafComplex,
    blocks: &BTreeMap<i64, Block>,
    r: Range<i64>,
) {
    for k in r.start..r.end - 1 {
        let dd = d.diff(k);
        let dc = c.diff(k);
        let terms = [
            Term {
                block: &blocks[&k],
                left: Some(&dd),
                right: None,
                sign: 1,
            },
            Term {
                block: &blocks[&(k + 1)],
                left: None,
                right: Some(&dc),
                sign: -1,
            },
        ];
        add_equation(sys, c.term(k), d.term(k + 1), &terms, None);
    }
}

/// Flattened null-homotopic maps `dh + hd`, `h` running over a basis of
/// degree `-1` maps, over the window `r`.
fn null_homotopic_vectors(c: &SheafComplex, d: &SheafComplex, r: Range<i64>) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let sizes: Vec<usize> = r
        .clone()
        .map(|k| *hom_offsets(c.term(k), d.term(k)).last().unwrap())
        .collect();
    let starts: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let v = *acc;
            *acc += s;
            Some(v)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    for k in r.clone() {
        for h in hom_basis(c.term(k), d.term(k - 1)) {
            let mut v = vec![Rational::zero(); total];
            // degree k: d^{k-1} h ; degree k-1: h d^{k-1}
            if r.contains(&k) {
                let dh = sandwich(Some(&d.diff(k - 1)), &h, None);
                let i = (k - r.start) as usize;
                for (e, val) in dh.into_iter().enumerate() {
                    v[starts[i] + e] += &val;
                }
            }
            if r.contains(&(k - 1)) {
                let hd = sandwich(None, &h, Some(&c.diff(k - 1)));
                let i = (k - 1 - r.start) as usize;
                for (e, val) in hd.into_iter().enumerate() {
                    v[starts[i] + e] += &val;
                }
            }
            if v.iter().any(|e| !e.is_zero()) {
                out.push(v);
            }
        }
    }
    out
}

/// A basis of `Hom_K(c, d)`: chain maps modulo chain homotopy.
pub fn hom_homotopy_classes(c: &SheafComplex, d: &SheafComplex) -> Result<HomClasses> {
    let r = window(&[c.degrees(), d.degrees()]);
    let mut unk = Unknowns { count: 0 };
    let blocks: BTreeMap<i64, Block> = r.clone().map(|k| (k, unk.block(c.term(k), d.term(k)))).collect();
    let mut sys = LinearSystem::new(unk.count);
    add_chain_conditions(&mut sys, c, d, &blocks, r.clone());
    let sol = sys.solve().expect("homogeneous");
    let cycles: Vec<ChainMap> = sol
        .nullspace
        .iter()
        .map(|v| assemble_chain_map(c, d, &blocks, v))
        .collect::<Result<_>>()?;
    let mut span = LinearSystem::new(flat_len(c, d, r.clone()));
    for v in &null_homotopic_vectors(c, d, r.clone()) {
        span.add_homogeneous(v.iter().cloned().enumerate());
    }
    let boundaries = span.rank();
    let mut representatives = Vec::new();
    for f in cycles.iter() {
        let before = span.rank();
        span.add_homogeneous(f.flatten(r.clone()).into_iter().enumerate());
        if span.rank() > before {
            representatives.push(f.clone());
        }
    }
    Ok(HomClasses {
        dim: representatives.len(),
        representatives,
        cycles: cycles.len(),
        boundaries,
    })
}

/// A triangle `A -u-> B -v-> C -w-> A[1]` of chain maps.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub u: ChainMap,
    pub v: ChainMap,
    pub w: ChainMap,
}

impl Triangle {
    pub fn new(u: ChainMap, v: ChainMap, w: ChainMap) -> Result<Self> {
        if u.target() != v.source() || v.target() != w.source() || *w.target() != u.source().shift(1) {
            return Err(Error::Shape("triangle maps are not composable".into()));
        }
        Ok(Triangle { u, v, w })
    }

    pub fn a(&self) -> &SheafComplex {
        self.u.source()
    }

    pub fn b(&self) -> &SheafComplex {
        self.v.source()
    }

    pub fn c(&self) -> &SheafComplex {
        self.w.source()
    }

    /// `X -f-> Y -ι-> cone(f) -π-> X[1]`.
    pub fn of_cone(f: &ChainMap) -> Result<Self> {
        let cone = super::cone(f)?;
        Triangle::new(f.clone(), cone.iota, cone.pi)
    }
}

/// Result of completing a morphism of triangles.
#[derive(Debug, Clone)]
pub struct FillIn {
    pub alpha: ChainMap,
    /// `u' ∘ α ~ β ∘ u`.
    pub left_square: Homotopy,
    /// `α[1] ∘ w ~ w' ∘ γ`.
    pub right_square: Homotopy,
    /// `Hom_K(B, C'[-1])` and `Hom_K(C, B')` both vanish.
    pub unique: bool,
    pub obstruction_dims: (usize, usize),
}

struct FillSystem {
    sys: LinearSystem,
    alpha: BTreeMap<i64, Block>,
    h1: BTreeMap<i64, Block>,
    h2: BTreeMap<i64, Block>,
    r: Range<i64>,
}

fn fill_system(t: &Triangle, t2: &Triangle, beta: &ChainMap, gamma: &ChainMap, homogeneous: bool) -> Result<FillSystem> {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let (a2, b2, c2) = (t2.a(), t2.b(), t2.c());
    let r = window(&[
        a.degrees(),
        b.degrees(),
        c.degrees(),
        a2.degrees(),
        b2.degrees(),
        c2.degrees(),
    ]);
    let mut unk = Unknowns { count: 0 };
    let alpha: BTreeMap<i64, Block> = r.clone().map(|k| (k, unk.block(a.term(k), a2.term(k)))).collect();
    let h1: BTreeMap<i64, Block> = r.clone().map(|k| (k, unk.block(a.term(k), b2.term(k - 1)))).collect();
    let h2: BTreeMap<i64, Block> = r.clone().map(|k| (k, unk.block(c.term(k), a2.term(k)))).collect();
    let mut sys = LinearSystem::new(unk.count);
    add_chain_conditions(&mut sys, a, a2, &alpha, r.clone());
    for k in r.start..r.end - 1 {
        // u' α - d h1 - h1 d = β u
        let u2 = t2.u.comp(k);
        let d_b2 = b2.diff(k - 1);
        let d_a = a.diff(k);
        let rhs = if homogeneous {
            None
        } else {
            Some(sandwich_morphism(&beta.comp(k), &t.u.comp(k), a.term(k), b2.term(k)))
        };
        let mut terms = vec![
            Term {
                block: &alpha[&k],
                left: Some(&u2),
                right: None,
                sign: 1,
            },
            Term {
                block: &h1[&(k + 1)],
                left: None,
                right: Some(&d_a),
                sign: -1,
            },
        ];
        terms.push(Term {
            block: &h1[&k],
            left: Some(&d_b2),
            right: None,
            sign: -1,
        });
        add_equation(&mut sys, a.term(k), b2.term(k), &terms, rhs.as_ref());

        // α[1] w + d_{A'} h2 - h2 d_C = w' γ   (in Hom(C^k, A'^{k+1}))
        let w = t.w.comp(k);
        let d_a2 = a2.diff(k);
        let d_c = c.diff(k);
        let rhs = if homogeneous {
            None
        } else {
            Some(sandwich_morphism(&t2.w.comp(k), &gamma.comp(k), c.term(k), a2.term(k + 1)))
        };
        let terms = vec![
            Term {
                block: &alpha[&(k + 1)],
                left: None,
                right: Some(&w),
                sign: 1,
            },
            Term {
                block: &h2[&k],
                left: Some(&d_a2),
                right: None,
                sign: 1,
            },
            Term {
                block: &h2[&(k + 1)],
                left: None,
                right: Some(&d_c),
                sign: -1,
            },
        ];
        add_equation(&mut sys, c.term(k), a2.term(k + 1), &terms, rhs.as_ref());
    }
    Ok(FillSystem {
        sys,
        alpha,
        h1,
        h2,
        r,
    })
}

// `outer ∘ inner` stalkwise, with explicit endpoints.
fn sandwich_morphism(outer: &SheafMorphism, inner: &SheafMorphism, p: &Sheaf, q: &Sheaf) -> SheafMorphism {
    let comp = (0..p.space().len()).map(|x| outer.comp(x) * inner.comp(x)).collect();
    SheafMorphism::new_unchecked(p.clone(), q.clone(), comp).expect("composable")
}

/// Given triangles `t`, `t2` and `β: B -> B'`, `γ: C -> C'` with
/// `γ v ~ v' β`, finds `α: A -> A'` completing a morphism of triangles up
/// to explicit homotopies. `unique` certifies the homotopy class of `α`.
pub fn fill_in(t: &Triangle, t2: &Triangle, beta: &ChainMap, gamma: &ChainMap) -> Result<FillIn> {
    let lhs = gamma.compose(&t.v)?;
    let rhs = t2.v.compose(beta)?;
    if lhs != rhs && find_homotopy(&lhs, &rhs)?.is_none() {
        return Err(Error::Precondition("the middle square does not commute up to homotopy".into()));
    }
    let fs = fill_system(t, t2, beta, gamma, false)?;
    let coeffs = fs
        .sys
        .particular()
        .ok_or_else(|| Error::NoFillIn("the fill-in system is inconsistent".into()))?;
    let alpha = assemble_chain_map(t.a(), t2.a(), &fs.alpha, &coeffs)?;
    let u_side = t2.u.compose(&alpha)?;
    let b_side = beta.compose(&t.u)?;
    let left_square = assemble_homotopy(&u_side, &b_side, &fs.h1, &coeffs)?;
    let alpha1 = alpha.shift(1);
    let a_side = alpha1.compose(&t.w)?;
    let w_side = t2.w.compose(gamma)?;
    let right_square = assemble_homotopy(&a_side, &w_side, &fs.h2, &coeffs)?;
    let first = hom_homotopy_classes(t.b(), &t2.c().shift(-1))?.dim;
    let second = hom_homotopy_classes(t.c(), t2.b())?.dim;
    Ok(FillIn {
        alpha,
        left_square,
        right_square,
        unique: first == 0 && second == 0,
        obstruction_dims: (first, second),
    })
}

/// Dimension of the space of homotopy classes of `α` solving the
/// homogeneous fill-in problem; zero means the fill-in class is unique.
pub fn fill_in_ambiguity(t: &Triangle, t2: &Triangle) -> Result<usize> {
    let zero_b = ChainMap::zero(t.b(), t2.b());
    let zero_c = ChainMap::zero(t.c(), t2.c());
    let fs = fill_system(t, t2, &zero_b, &zero_c, true)?;
    let sol = fs.sys.solve().expect("homogeneous");
    let (a, a2) = (t.a(), t2.a());
    let r = fs.r.clone();
    let mut span = LinearSystem::new(flat_len(a, a2, r.clone()));
    for v in null_homotopic_vectors(a, a2, r.clone()) {
        span.add_homogeneous(v.into_iter().enumerate());
    }
    let base = span.rank();
    for v in &sol.nullspace {
        let alpha = assemble_chain_map(a, a2, &fs.alpha, v)?;
        span.add_homogeneous(alpha.flatten(r.clone()).into_iter().enumerate());
    }
    Ok(span.rank() - base)
}
