//! Two-strata stratified posets, the perversity test, perverse closed sets
//! and the functors `F`, `G` with the transformation `T: F -> G`.
//!
//! Degree conventions: a perverse object on `X₀` is a local system placed in
//! degree `-c`; the closed stratum `S` carries the integer `d`. "Lesser
//! than `-d`" and "bigger than `-d`" are read non-strictly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{cohomology_sheaf, ChainMap, Cohomology, SheafComplex};
use crate::derived::{gamma_closed, gamma_closed_map, gamma_open_map, ClosedInclusion, GammaClosed, OpenInclusion};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::poset::{Poset, Subspace, SubspaceKind};
use crate::sheaf::{LocalSystem, Sheaf, SheafMorphism};

/// A finite poset split into a closed stratum `S` and its open complement
/// `X₀`.
#[derive(Debug, Clone)]
pub struct StratifiedSpace {
    stratum: ClosedInclusion,
    open: OpenInclusion,
    d: i64,
    c: i64,
}

impl StratifiedSpace {
    pub fn new(space: &Arc<Poset>, stratum: &[usize], d: i64, c: i64) -> Result<Self> {
        if c <= 0 {
            return Err(Error::Input("perversity degree c must be positive".into()));
        }
        let stratum = ClosedInclusion::new(space, stratum)?;
        if !space.is_connected(stratum.members()) {
            return Err(Error::Input("the closed stratum must be connected".into()));
        }
        let open = stratum.complement();
        Ok(StratifiedSpace { stratum, open, d, c })
    }

    pub fn from_names<S: AsRef<str>>(space: &Arc<Poset>, stratum: &[S], d: i64, c: i64) -> Result<Self> {
        StratifiedSpace::new(space, &space.indices_of(stratum)?, d, c)
    }

    pub fn space(&self) -> &Arc<Poset> {
        self.stratum.ambient()
    }

    pub fn stratum(&self) -> &ClosedInclusion {
        &self.stratum
    }

    pub fn open_part(&self) -> &OpenInclusion {
        &self.open
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// A closed subspace of this space by element names.
    pub fn closed_subspace<S: AsRef<str>>(&self, names: &[S]) -> Result<Subspace> {
        Subspace::from_names(self.space(), names, SubspaceKind::Closed)
    }

    /// `Rj_*` of a complex on `X₀`.
    pub fn pushforward(&self, c: &SheafComplex) -> Result<SheafComplex> {
        self.open.pushforward(c)
    }
}

/// A local system on `X₀` viewed as a perverse sheaf in degree `-c`.
#[derive(Debug, Clone)]
pub struct PerverseOnX0 {
    ls: LocalSystem,
    degree: i64,
    label: String,
}

impl PerverseOnX0 {
    pub fn new(x: &StratifiedSpace, ls: &LocalSystem, label: impl Into<String>) -> Result<Self> {
        let sheaf = ls.sheaf().on_space(x.open.sub())?;
        Ok(PerverseOnX0 {
            ls: LocalSystem::new(sheaf)?,
            degree: -x.c,
            label: label.into(),
        })
    }

    pub fn zero(x: &StratifiedSpace) -> Self {
        PerverseOnX0::new(x, &LocalSystem::new(Sheaf::zero(x.open.sub().clone())).expect("zero"), "0")
            .expect("zero object")
    }

    pub fn local_system(&self) -> &LocalSystem {
        &self.ls
    }

    pub fn sheaf(&self) -> &Sheaf {
        self.ls.sheaf()
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.ls.rank().unwrap_or_else(|| self.sheaf().dims().iter().copied().max().unwrap_or(0))
    }

    /// The complex `ls[c]`.
    pub fn complex(&self) -> SheafComplex {
        SheafComplex::concentrated(self.sheaf(), self.degree)
    }

    /// A morphism of local systems as a chain map of the placed complexes.
    pub fn chain_map(a: &SheafMorphism, source: &PerverseOnX0, target: &PerverseOnX0) -> Result<ChainMap> {
        let a = a.with_ends(source.sheaf(), target.sheaf())?;
        a.check_natural()?;
        ChainMap::new_unchecked(
            source.complex(),
            target.complex(),
            [(source.degree, a)].into_iter().collect(),
        )
    }

    pub fn direct_sum(x: &StratifiedSpace, parts: &[&PerverseOnX0]) -> Result<Self> {
        let sheaves: Vec<&Sheaf> = parts.iter().map(|p| p.sheaf()).collect();
        let sum = if sheaves.is_empty() {
            Sheaf::zero(x.open.sub().clone())
        } else {
            Sheaf::direct_sum(&sheaves)?
        };
        let label = parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(" ⊕ ");
        PerverseOnX0::new(x, &LocalSystem::new(sum)?, label)
    }
}

/// Outcome of the three perversity conditions.
#[derive(Debug, Clone, Serialize)]
pub struct PerversityReport {
    pub open_part: bool,
    pub support: bool,
    pub cosupport: bool,
    pub failures: Vec<String>,
}

impl PerversityReport {
    pub fn is_perverse(&self) -> bool {
        self.open_part && self.support && self.cosupport
    }
}

fn require_constructible(x: &StratifiedSpace, c: &SheafComplex) -> Result<()> {
    for k in c.degrees() {
        let h = cohomology_sheaf(c, k)?.sheaf;
        for (name, sub) in [("S", x.stratum.sub()), ("X0", x.open.sub())] {
            if !h.restrict_to(sub)?.is_locally_constant() {
                return Err(Error::Input(format!(
                    "H^{k} is not locally constant on {name}; complex is not constructible"
                )));
            }
        }
    }
    Ok(())
}

/// The perversity test: `j⁻¹C` is a local system in degree `-c`,
/// `H^k(i⁻¹C) = 0` for `k > -d` and `H^k(RΓ_S C)|_S = 0` for `k < -d`.
pub fn is_perverse(x: &StratifiedSpace, c: &SheafComplex) -> Result<PerversityReport> {
    let c = c.on_space(x.space())?;
    require_constructible(x, &c)?;
    let space = x.space();
    let mut report = PerversityReport {
        open_part: true,
        support: true,
        cosupport: true,
        failures: Vec::new(),
    };
    for &p in x.open.members() {
        for (k, dim) in c.cohomology_dims_at(p) {
            if dim > 0 && k != -x.c {
                report.open_part = false;
                report.failures.push(format!("H^{k} at {} has dimension {dim}", space.name(p)));
            }
        }
    }
    for &p in x.stratum.members() {
        for (k, dim) in c.cohomology_dims_at(p) {
            if dim > 0 && k > -x.d {
                report.support = false;
                report.failures.push(format!("H^{k} at {} has dimension {dim}", space.name(p)));
            }
        }
    }
    let gamma = gamma_closed(&x.stratum, &c)?;
    for &p in x.stratum.members() {
        for (k, dim) in gamma.complex.cohomology_dims_at(p) {
            if dim > 0 && k < -x.d {
                report.cosupport = false;
                report
                    .failures
                    .push(format!("H^{k}(RΓ_S) at {} has dimension {dim}", space.name(p)));
            }
        }
    }
    Ok(report)
}

/// Which local cohomology a witness refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalCohomology {
    /// `RΓ_K`, required to vanish below `-d`.
    Closed,
    /// `RΓ_L`, required to vanish from `-d` on.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// The candidate misses these points of `S`.
    MissesStratum { points: Vec<String> },
    Nonvanishing {
        test: String,
        functor: LocalCohomology,
        degree: i64,
        /// Nonzero stalk dimensions by point.
        dims: Vec<(String, usize)>,
    },
}

impl Witness {
    /// Sum of the recorded stalk dimensions.
    pub fn total(&self) -> usize {
        match self {
            Witness::MissesStratum { .. } => 0,
            Witness::Nonvanishing { dims, .. } => dims.iter().map(|d| d.1).sum(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerverseClosedReport {
    pub candidate: Vec<String>,
    pub pass: bool,
    /// Rejected before any computation because `S ⊄ K`.
    pub prefiltered: bool,
    pub tests: Vec<String>,
    pub witnesses: Vec<Witness>,
}

fn nonvanishing(space: &Poset, c: &SheafComplex, k: i64) -> Vec<(String, usize)> {
    (0..space.len())
        .filter_map(|p| {
            let dim = c.stalk(p).cohomology_dim(k);
            (dim > 0).then(|| (space.name(p).to_string(), dim))
        })
        .collect()
}

/// Checks the perverse-closed-set conditions for `K` against a finite family
/// of perverse objects on `X₀`. A pass means no counterexample was found.
pub fn is_perverse_closed(x: &StratifiedSpace, k: &Subspace, tests: &[PerverseOnX0]) -> Result<PerverseClosedReport> {
    if tests.is_empty() {
        return Err(Error::Input("empty test family".into()));
    }
    let space = x.space();
    let kincl = ClosedInclusion::new(space, k.members())?;
    let mut report = PerverseClosedReport {
        candidate: k.names(space),
        pass: true,
        prefiltered: false,
        tests: tests.iter().map(|t| t.label.clone()).collect(),
        witnesses: Vec::new(),
    };
    let missing: Vec<String> = x
        .stratum
        .members()
        .iter()
        .filter(|&&p| !k.contains(p))
        .map(|&p| space.name(p).to_string())
        .collect();
    if !missing.is_empty() {
        report.pass = false;
        report.prefiltered = true;
        report.witnesses.push(Witness::MissesStratum { points: missing });
        return Ok(report);
    }
    for t in tests {
        let pushed = x.pushforward(&t.complex())?;
        let gamma = gamma_closed(&kincl, &pushed)?;
        for (functor, c) in [
            (LocalCohomology::Closed, &gamma.complex),
            (LocalCohomology::Open, &gamma.open.complex),
        ] {
            for deg in c.degrees() {
                let checked = match functor {
                    LocalCohomology::Closed => deg < -x.d,
                    LocalCohomology::Open => deg >= -x.d,
                };
                if !checked {
                    continue;
                }
                let dims = nonvanishing(space, c, deg);
                if !dims.is_empty() {
                    report.pass = false;
                    report.witnesses.push(Witness::Nonvanishing {
                        test: t.label.clone(),
                        functor,
                        degree: deg,
                        dims,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Random invertible `n × n` matrix with small integer entries, distinct
/// from the identity.
pub fn random_holonomy(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let m = if n == 1 {
            let choices = [-3, -2, -1, 2, 3];
            Matrix::scalar(1, Rational::from_int(choices[rng.gen_range(0..choices.len())]))
        } else {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, Rational::from_int(rng.gen_range(-2..=2)));
                }
            }
            m
        };
        if m.is_invertible() && m != Matrix::identity(n) {
            return m;
        }
    }
}

// Covers of `space` outside a spanning forest of its Hasse diagram.
fn cycle_covers(space: &Poset) -> Vec<(usize, usize)> {
    let mut root: Vec<usize> = (0..space.len()).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while root[r] != r {
            r = root[r];
        }
        root[x] = r;
        r
    }
    let mut out = Vec::new();
    for &(x, y) in space.covers() {
        let (rx, ry) = (find(&mut root, x), find(&mut root, y));
        if rx == ry {
            out.push((x, y));
        } else {
            root[rx] = ry;
        }
    }
    out
}

/// Local system on `space` with holonomy `m` on the cover `edge` and
/// identities elsewhere, if that is functorial.
pub fn holonomy_on_cover(space: &Arc<Poset>, edge: (usize, usize), m: &Matrix) -> Option<LocalSystem> {
    let n = m.rows();
    let maps = space
        .covers()
        .iter()
        .map(|&e| if e == edge { m.clone() } else { Matrix::identity(n) })
        .collect();
    let sheaf = Sheaf::new(space.clone(), vec![n; space.len()], maps).ok()?;
    LocalSystem::new(sheaf).ok()
}

fn format_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let entries: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// A deterministic finite family of perverse objects on `X₀`: the trivial
/// local system of every rank up to `max_rank`, two seeded random holonomies
/// per rank around each independent cycle, and a unipotent Jordan block.
pub fn default_test_family(x: &StratifiedSpace, max_rank: usize, seed: u64) -> Result<Vec<PerverseOnX0>> {
    if max_rank == 0 {
        return Err(Error::Input("max_rank must be at least 1".into()));
    }
    let sub = x.open.sub();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 1..=max_rank {
        let ls = LocalSystem::new(Sheaf::constant(sub.clone(), n))?;
        out.push(PerverseOnX0::new(x, &ls, format!("trivial rank {n}"))?);
    }
    let cycles = cycle_covers(sub);
    for &(a, b) in &cycles {
        let edge = format!("{}<{}", sub.name(a), sub.name(b));
        for n in 1..=max_rank {
            let mut found = 0;
            for _ in 0..50 {
                if found == 2 {
                    break;
                }
                let m = random_holonomy(&mut rng, n);
                if let Some(ls) = holonomy_on_cover(sub, (a, b), &m) {
                    out.push(PerverseOnX0::new(x, &ls, format!("holonomy {} on {edge}", format_matrix(&m)))?);
                    found += 1;
                }
            }
        }
        if max_rank >= 2 {
            let m = Matrix::from_ints(&[[1, 1], [0, 1]]);
            if let Some(ls) = holonomy_on_cover(sub, (a, b), &m) {
                out.push(PerverseOnX0::new(x, &ls, format!("holonomy {} on {edge}", format_matrix(&m)))?);
            }
        }
    }
    Ok(out)
}

/// `F(A) = H^{-d-1}(RΓ_L Rj_*A)|_S`, `G(A) = H^{-d}(RΓ_K Rj_*A)|_S` and
/// `T_A` induced by the connecting map `RΓ_L -> RΓ_K[1]`.
#[derive(Debug, Clone)]
pub struct Fgt {
    pub object: PerverseOnX0,
    pub pushed: SheafComplex,
    pub gamma: GammaClosed,
    pub f_cohomology: Cohomology,
    pub g_cohomology: Cohomology,
    /// `T` over the whole space.
    pub t_full: SheafMorphism,
    pub fa: LocalSystem,
    pub ga: LocalSystem,
    pub t: SheafMorphism,
}

/// The connecting morphism on cohomology, `H^{k}(RΓ_L) -> H^{k+1}(RΓ_K)`.
pub fn connecting_on_cohomology(gamma: &GammaClosed, source: &Cohomology, target: &Cohomology) -> Result<SheafMorphism> {
    let k = source.degree;
    debug_assert_eq!(target.degree, k + 1);
    let conn = &gamma.connecting;
    let comp = (0..source.sheaf.space().len())
        .map(|p| &(&target.class[p] * &conn.comp_at(k, p)) * &source.lift[p])
        .collect();
    SheafMorphism::new_unchecked(source.sheaf.clone(), target.sheaf.clone(), comp)
}

pub fn functor_f_g_t(x: &StratifiedSpace, k: &Subspace, a: &PerverseOnX0) -> Result<Fgt> {
    let kincl = ClosedInclusion::new(x.space(), k.members())?;
    let pushed = x.pushforward(&a.complex())?;
    let gamma = gamma_closed(&kincl, &pushed)?;
    let f_cohomology = cohomology_sheaf(&gamma.open.complex, -x.d - 1)?;
    let g_cohomology = cohomology_sheaf(&gamma.complex, -x.d)?;
    let t_full = connecting_on_cohomology(&gamma, &f_cohomology, &g_cohomology)?;
    let s = x.stratum.sub();
    let local = |sheaf: &Sheaf, what: &str| {
        LocalSystem::new(sheaf.restrict_to(s)?)
            .map_err(|_| Error::Model(format!("{what} is not locally constant on S; K is not perverse closed")))
    };
    let fa = local(&f_cohomology.sheaf, "F(A)")?;
    let ga = local(&g_cohomology.sheaf, "G(A)")?;
    let t = t_full.restrict_to(s)?;
    Ok(Fgt {
        object: a.clone(),
        pushed,
        gamma,
        f_cohomology,
        g_cohomology,
        t_full,
        fa,
        ga,
        t,
    })
}

/// Images of a morphism `a: A -> A'` under the functors.
#[derive(Debug, Clone)]
pub struct FgtMorphism {
    /// `Rj_*a`.
    pub pushed: ChainMap,
    pub f_full: SheafMorphism,
    pub g_full: SheafMorphism,
    pub f: SheafMorphism,
    pub g: SheafMorphism,
}

pub fn fgt_on_morphism(x: &StratifiedSpace, a: &SheafMorphism, source: &Fgt, target: &Fgt) -> Result<FgtMorphism> {
    let chain = PerverseOnX0::chain_map(a, &source.object, &target.object)?;
    let pushed = x
        .open
        .pushforward_map(&chain, &source.pushed, &target.pushed)?;
    let on_open = gamma_open_map(&pushed, &source.gamma.open, &target.gamma.open)?;
    let on_closed = gamma_closed_map(&pushed, &source.gamma, &target.gamma)?;
    let f_full = Cohomology::induced(&on_open, &source.f_cohomology, &target.f_cohomology)?;
    let g_full = Cohomology::induced(&on_closed, &source.g_cohomology, &target.g_cohomology)?;
    let s = x.stratum.sub();
    Ok(FgtMorphism {
        f: f_full.restrict_to(s)?,
        g: g_full.restrict_to(s)?,
        pushed,
        f_full,
        g_full,
    })
}
