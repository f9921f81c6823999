//! The standard small models: point, segment, circle and disk posets, the
//! two-strata disk, and the local systems and complexes built on them.

use std::sync::Arc;

use crate::complex::SheafComplex;
use crate::linalg::{Matrix, Rational};
use crate::perverse::{PerverseOnX0, StratifiedSpace};
use crate::poset::{Poset, Subspace};
use crate::sheaf::{LocalSystem, Sheaf};

pub fn point() -> Poset {
    Poset::new(&["p"], &[]).expect("point")
}

/// `x < y`.
pub fn segment() -> Poset {
    Poset::new(&["x", "y"], &[("x", "y")]).expect("segment")
}

/// The minimal circle model: two minimal points `a, b` below two maximal
/// points `c, d`.
pub fn circle() -> Poset {
    Poset::new(
        &["a", "b", "c", "d"],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )
    .expect("circle")
}

/// The circle model with a bottom element `s` (a cone over the circle).
pub fn disk() -> Poset {
    Poset::new(
        &["s", "a", "b", "c", "d"],
        &[
            ("s", "a"),
            ("s", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
        ],
    )
    .expect("disk")
}

/// Local system on the circle model whose only non-identity restriction is
/// `b < d`, carrying the holonomy `m`.
pub fn holonomy_local_system(m: &Matrix) -> LocalSystem {
    let space = Arc::new(circle());
    let n = m.rows();
    let b = space.index_of("b").unwrap();
    let d = space.index_of("d").unwrap();
    let sheaf = Sheaf::from_fn(space, vec![n; 4], |x, y| {
        if (x, y) == (b, d) {
            m.clone()
        } else {
            Matrix::identity(n)
        }
    })
    .expect("holonomy sheaf");
    LocalSystem::new(sheaf).expect("invertible holonomy")
}

/// Rank-one local system `L_λ`.
pub fn circle_local_system(lambda: Rational) -> LocalSystem {
    holonomy_local_system(&Matrix::scalar(1, lambda))
}

/// Rank-two unipotent local system with holonomy `[[1,1],[0,1]]`.
pub fn jordan_local_system() -> LocalSystem {
    holonomy_local_system(&Matrix::from_ints(&[[1, 1], [0, 1]]))
}

/// The disk with closed stratum `S = {s}`, `d = 0`, `c = 1`.
pub fn strat_disk() -> StratifiedSpace {
    StratifiedSpace::from_names(&Arc::new(disk()), &["s"], 0, 1).expect("two-strata disk")
}

/// `K = {s, a}`; its complement `{b, c, d}` is a contractible sector.
pub fn k_good(x: &StratifiedSpace) -> Subspace {
    x.closed_subspace(&["s", "a"]).expect("K_good")
}

/// `L_λ[1]` as a perverse object on the open part of `x`.
pub fn shifted_local_system(x: &StratifiedSpace, lambda: Rational) -> PerverseOnX0 {
    PerverseOnX0::new(x, &circle_local_system(lambda.clone()), format!("L({lambda})")).expect("circle open part")
}

/// `Rj_*L_λ[1]`.
pub fn pushed_local_system(x: &StratifiedSpace, lambda: Rational) -> SheafComplex {
    x.pushforward(&shifted_local_system(x, lambda).complex())
        .expect("pushforward")
}

/// `IC₁ = τ≤-1 Rj_*L₁[1]`.
pub fn ic1(x: &StratifiedSpace) -> SheafComplex {
    pushed_local_system(x, Rational::from_int(1))
        .truncate_le(-1)
        .expect("truncation")
        .0
}

/// `j_!L_λ[1]`: the local system extended by zero across `S`.
pub fn extension_by_zero(x: &StratifiedSpace, lambda: Rational) -> SheafComplex {
    extension_by_zero_of(x, &circle_local_system(lambda))
}

/// `j_!L[c]` for a local system on the open part.
pub fn extension_by_zero_of(x: &StratifiedSpace, l: &LocalSystem) -> SheafComplex {
    let l = l.sheaf();
    let emb = x.space().embedding_of(l.space()).expect("open part");
    let inside = x.space().membership(&emb);
    let mut local = vec![0; x.space().len()];
    for (i, &p) in emb.iter().enumerate() {
        local[p] = i;
    }
    let dims = (0..x.space().len())
        .map(|p| if inside[p] { l.dim(local[p]) } else { 0 })
        .collect::<Vec<_>>();
    let sheaf = Sheaf::from_fn(x.space().clone(), dims.clone(), |p, q| {
        if inside[p] {
            l.map(local[p], local[q])
        } else {
            Matrix::zeros(dims[q], dims[p])
        }
    })
    .expect("extension by zero");
    SheafComplex::concentrated(&sheaf, -x.c())
}
