//! Cohomology sheaves and quasi-isomorphism testing.

use crate::error::Result;
use crate::linalg::Matrix;
use crate::sheaf::{Sheaf, SheafMorphism};

use super::{cone, ChainMap, SheafComplex};

/// `H^k` of a complex, with stalkwise cycle representatives (`lift`) and
/// the class map (`class`, meaningful on cycles).
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub degree: i64,
    pub sheaf: Sheaf,
    /// `H_x -> C^k_x`, landing in cycles.
    pub lift: Vec<Matrix>,
    /// `C^k_x -> H_x`; `class · lift = id`, kills boundaries.
    pub class: Vec<Matrix>,
}

pub fn cohomology_sheaf(c: &SheafComplex, k: i64) -> Result<Cohomology> {
    let space = c.space().clone();
    let term = c.term(k);
    let n = space.len();
    let mut lift = Vec::with_capacity(n);
    let mut class = Vec::with_capacity(n);
    for x in 0..n {
        let z = c.diff_at(k, x).kernel();
        let zl = z.left_inverse().expect("kernel basis is independent");
        let b = &zl * &c.diff_at(k - 1, x);
        let q = b.cokernel_projection();
        let r = q.right_inverse().expect("cokernel projection is onto");
        lift.push(&z * &r);
        class.push(&q * &zl);
    }
    let dims: Vec<usize> = class.iter().map(Matrix::rows).collect();
    let cover_maps = space
        .covers()
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| &(&class[y] * &term.cover_maps()[i]) * &lift[x])
        .collect();
    let sheaf = Sheaf::new(space, dims, cover_maps)?;
    Ok(Cohomology {
        degree: k,
        sheaf,
        lift,
        class,
    })
}

impl Cohomology {
    /// The map `H^k(f): H^k(source) -> H^k(target)`, given both cohomologies.
    pub fn induced(f: &ChainMap, source: &Cohomology, target: &Cohomology) -> Result<SheafMorphism> {
        debug_assert_eq!(source.degree, target.degree);
        let k = source.degree;
        let comp = (0..source.sheaf.space().len())
            .map(|x| &(&target.class[x] * &f.comp_at(k, x)) * &source.lift[x])
            .collect();
        SheafMorphism::new_unchecked(source.sheaf.clone(), target.sheaf.clone(), comp)
    }

    /// `H^k(f)`, computing both cohomology sheaves.
    pub fn of_map(f: &ChainMap, k: i64) -> Result<SheafMorphism> {
        let s = cohomology_sheaf(f.source(), k)?;
        let t = cohomology_sheaf(f.target(), k)?;
        Cohomology::induced(f, &s, &t)
    }

    /// The projection `Z -> H^k` for a morphism `z` whose image consists of
    /// degree-`k` cycles.
    pub fn class_of(&self, z: &SheafMorphism) -> Result<SheafMorphism> {
        let comp = (0..self.sheaf.space().len())
            .map(|x| &self.class[x] * z.comp(x))
            .collect();
        SheafMorphism::new_unchecked(z.source().clone(), self.sheaf.clone(), comp)
    }
}

/// Whether `f` induces isomorphisms on all cohomology sheaves, decided by
/// exactness of every stalk of `cone(f)`.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    Ok(cone(f)?.complex.is_acyclic())
}
