#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;

use pervglue::fixtures;
use pervglue::gluing::{Decomposition, GluingMorphism, GluingTriple};
use pervglue::linalg::{Matrix, Rational};
use pervglue::perverse::{holonomy_on_cover, random_holonomy};
use pervglue::sheaf::{hom_basis, LocalSystem, Sheaf, SheafMorphism};

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn disk_decomposition() -> Decomposition {
    let x = Arc::new(fixtures::disk());
    Decomposition::new(&x, &[0]).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, q(rng.gen_range(-2..=2)));
        }
    }
    m
}

/// Holonomy `diag(I_k, M')` with `M'` random, so that every rank of
/// `M - I` shows up.
pub fn mixed_holonomy(rng: &mut impl Rng, n: usize) -> Matrix {
    let k = rng.gen_range(0..=n);
    let id = Matrix::identity(k);
    if k == n {
        return id;
    }
    let rest = random_holonomy(rng, n - k);
    Matrix::block_diag(&[&id, &rest])
}

/// Local system on `space` (a copy of the circle model) with holonomy on `b < d`.
pub fn circle_system(space: &Arc<pervglue::poset::Poset>, m: &Matrix) -> LocalSystem {
    let b = space.index_of("b").unwrap();
    let d = space.index_of("d").unwrap();
    holonomy_on_cover(space, (b, d), m).expect("circle has no commuting squares")
}

pub fn combine(source: &Sheaf, target: &Sheaf, basis: &[SheafMorphism], coeffs: &[Rational]) -> SheafMorphism {
    basis
        .iter()
        .zip(coeffs)
        .fold(SheafMorphism::zero(source, target), |acc, (b, c)| acc.add(&b.scale(c)).unwrap())
}

/// A random constructible triple: a local system of rank `1..=max_rank` on
/// the circle, `ℚ^m` on `s` and a random map into `i⁻¹j_*`.
pub fn random_triple(dec: &Decomposition, rng: &mut impl Rng, max_rank: usize) -> GluingTriple {
    let n = rng.gen_range(1..=max_rank);
    let open = circle_system(dec.open().sub(), &mixed_holonomy(rng, n)).into_sheaf();
    let closed = Sheaf::constant(dec.closed().sub().clone(), rng.gen_range(0..=max_rank));
    let js = dec.jstar(&open).unwrap();
    let target = dec.restrict_closed(&js.sheaf).unwrap();
    let map = SheafMorphism::from_fn(&closed, &target, |p| random_matrix(rng, target.dim(p), closed.dim(p))).unwrap();
    GluingTriple::new(dec, &closed, &open, &map).unwrap()
}

/// A random morphism of triples: pairs `(φ, ψ)` with
/// `f' ∘ φ = i⁻¹j_*ψ ∘ f`, drawn from the solution space.
pub fn random_triple_morphism(rng: &mut impl Rng, t1: &GluingTriple, t2: &GluingTriple) -> GluingMorphism {
    let dec = t1.decomposition();
    let bs = hom_basis(t1.closed_sheaf(), t2.closed_sheaf());
    let bo = hom_basis(t1.open_sheaf(), t2.open_sheaf());
    let closed = dec.closed().sub();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for phi in &bs {
        cols.push(t2.map().compose(phi).unwrap().flatten());
    }
    for psi in &bo {
        let pushed = dec.jstar_map(psi, t1.jstar(), t2.jstar()).unwrap();
        let on_s = pushed
            .restrict_to(closed)
            .unwrap()
            .with_ends(t1.map().target(), t2.map().target())
            .unwrap();
        cols.push(on_s.compose(t1.map()).unwrap().scale(&q(-1)).flatten());
    }
    let rows = cols.first().map_or(0, Vec::len);
    let mut mat = Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, e) in c.iter().enumerate() {
            mat.set(i, j, e.clone());
        }
    }
    let ker = if rows == 0 { Matrix::identity(cols.len()) } else { mat.kernel() };
    let mut coeffs = vec![q(0); cols.len()];
    for j in 0..ker.cols() {
        let c = q(rng.gen_range(-2..=2));
        for (i, e) in coeffs.iter_mut().enumerate() {
            *e += &(ker.get(i, j).clone() * c.clone());
        }
    }
    let (cs, co) = coeffs.split_at(bs.len());
    let phi = combine(t1.closed_sheaf(), t2.closed_sheaf(), &bs, cs);
    let psi = combine(t1.open_sheaf(), t2.open_sheaf(), &bo, co);
    GluingMorphism::new(t1, t2, &phi, &psi).unwrap()
}

/// Sections and first derived sections of a sheaf over a subset of a
/// poset of height one, from `⊕_x F_x -> ⊕_{x<y} F_y`.
pub struct HeightOne {
    pub d: Matrix,
    /// Offsets of each element's stalk in degree 0.
    pub off0: Vec<Option<usize>>,
    pub edges: Vec<(usize, usize, usize)>,
}

impl HeightOne {
    pub fn new(f: &Sheaf, set: &[usize]) -> Self {
        let p = f.space();
        let mut off0 = vec![None; p.len()];
        let mut n0 = 0;
        for &x in set {
            off0[x] = Some(n0);
            n0 += f.dim(x);
        }
        let mut edges = Vec::new();
        let mut n1 = 0;
        for &(x, y) in p.covers() {
            if set.contains(&x) && set.contains(&y) {
                edges.push((x, y, n1));
                n1 += f.dim(y);
            }
        }
        let mut d = Matrix::zeros(n1, n0);
        for &(x, y, o) in &edges {
            d.set_block(o, off0[x].unwrap(), &f.map(x, y));
            d.add_block(o, off0[y].unwrap(), &Matrix::identity(f.dim(y)).scale(&q(-1)));
        }
        HeightOne { d, off0, edges }
    }

    pub fn h0(&self) -> usize {
        self.d.cols() - self.d.rank()
    }

    pub fn h1(&self) -> usize {
        self.d.rows() - self.d.rank()
    }
}

/// Brute-force long exact sequence for `L ⊂ X₀` open:
/// `0 -> H⁰_K -> H⁰(X₀) -> H⁰(L) -> H¹_K -> H¹(X₀) -> H¹(L)`.
/// Returns `(dim H⁰(L), dim H¹_K, rank of H⁰(L) -> H¹_K)`.
pub fn les_oracle(f: &Sheaf, all: &[usize], l: &[usize]) -> (usize, usize, usize) {
    let big = HeightOne::new(f, all);
    let small = HeightOne::new(f, l);
    let p0 = {
        let mut m = Matrix::zeros(small.d.cols(), big.d.cols());
        for &x in l {
            m.set_block(small.off0[x].unwrap(), big.off0[x].unwrap(), &Matrix::identity(f.dim(x)));
        }
        m
    };
    let p1 = {
        let mut m = Matrix::zeros(small.d.rows(), big.d.rows());
        for &(x, y, o) in &small.edges {
            let &(_, _, ob) = big.edges.iter().find(|e| (e.0, e.1) == (x, y)).unwrap();
            m.set_block(o, ob, &Matrix::identity(f.dim(y)));
        }
        m
    };
    let k0 = big.d.kernel();
    let res0 = (&p0 * &k0).rank();
    let coker_res0 = small.h0() - res0;
    // cocycles of X₀ whose restriction is a coboundary on L, modulo coboundaries
    let stacked = Matrix::hstack(&[&p1, &small.d.scale(&q(-1))]).unwrap();
    let ker = stacked.kernel();
    let z_part = ker.block(0, 0, big.d.rows(), ker.cols()).rank();
    let ker_res1 = z_part - big.d.rank();
    (small.h0(), coker_res0 + ker_res1, coker_res0)
}
