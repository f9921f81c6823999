//! Finite posets as finite topological spaces.
//!
//! Convention used throughout the crate: open sets are up-sets, closed sets
//! are down-sets, the smallest open neighbourhood of `x` is `{y : y >= x}`,
//! and sheaf restriction maps point upward.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite poset with its strict order stored transitively closed.
#[derive(Clone)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    less: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    name_rank: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.less == other.less
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel: Vec<String> = self
            .covers
            .iter()
            .map(|&(x, y)| format!("{}<{}", self.elements[x], self.elements[y]))
            .collect();
        write!(f, "Poset({:?}; {})", self.elements, rel.join(", "))
    }
}

/// Checks the strict-order axioms on raw, unclosed input and reports the
/// first offending pair.
pub fn validate_poset(elements: &[&str], relations: &[(&str, &str)]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for e in elements {
        if !seen.insert(*e) {
            return Err(Error::Violation(format!("duplicate element {e}")));
        }
    }
    for (x, y) in relations {
        for v in [x, y] {
            if !seen.contains(v) {
                return Err(Error::Input(format!("unknown element {v}")));
            }
        }
    }
    let rel: BTreeSet<(&str, &str)> = relations.iter().copied().collect();
    for &(x, y) in relations {
        if x == y {
            return Err(Error::Violation(format!("irreflexivity fails at {x}<{y}")));
        }
        if rel.contains(&(y, x)) {
            return Err(Error::Violation(format!(
                "antisymmetry fails at {x}<{y} and {y}<{x}"
            )));
        }
    }
    for &(x, y) in relations {
        for &(y2, z) in relations {
            if y == y2 && !rel.contains(&(x, z)) {
                return Err(Error::Violation(format!(
                    "transitivity fails: {x}<{y} and {y}<{z} but not {x}<{z}"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsetClass {
    Open,
    Closed,
    Clopen,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Open,
    Closed,
    Arbitrary,
}

impl Poset {
    /// Builds a poset from element names and (not necessarily closed) strict
    /// relations `x < y`. The relation is transitively closed before the
    /// axioms are checked.
    pub fn new<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let elements: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if e.is_empty() || e.contains(['<', ',', ' ']) {
                return Err(Error::Input(format!("invalid element identifier {e:?}")));
            }
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Violation(format!("duplicate element {e}")));
            }
        }
        let n = elements.len();
        let mut less = vec![vec![false; n]; n];
        for (x, y) in relations {
            let (x, y) = (x.as_ref(), y.as_ref());
            let xi = *index
                .get(x)
                .ok_or_else(|| Error::Input(format!("unknown element {x}")))?;
            let yi = *index
                .get(y)
                .ok_or_else(|| Error::Input(format!("unknown element {y}")))?;
            less[xi][yi] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            if less[i][i] {
                return Err(Error::Violation(format!(
                    "relation has a cycle through {}",
                    elements[i]
                )));
            }
        }
        Ok(Self::from_closed(elements, index, less))
    }

    fn from_closed(elements: Vec<String>, index: HashMap<String, usize>, less: Vec<Vec<bool>>) -> Self {
        let n = elements.len();
        let mut covers = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if less[x][y] && !(0..n).any(|z| less[x][z] && less[z][y]) {
                    covers.push((x, y));
                }
            }
        }
        let mut by_name: Vec<usize> = (0..n).collect();
        by_name.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
        let mut name_rank = vec![0; n];
        for (r, &i) in by_name.iter().enumerate() {
            name_rank[i] = r;
        }
        Poset {
            elements,
            index,
            less,
            covers,
            name_rank,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, x: usize) -> &str {
        &self.elements[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| Error::Input(format!("unknown element {}", n.as_ref())))
            })
            .collect::<Result<_>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.less[x][y]
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        x == y || self.less[x][y]
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.le(x, y) || self.le(y, x)
    }

    /// Covering relations `x ⋖ y`, sorted by `(x, y)` index.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_index(&self, x: usize, y: usize) -> Option<usize> {
        self.covers.binary_search(&(x, y)).ok()
    }

    /// All strict relations `x < y` as pairs.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.less[x][y])
            .collect()
    }

    /// Minimal open neighbourhood `{y : y >= x}`.
    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.le(x, y)).collect()
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.le(y, x)).collect()
    }

    pub fn is_up_set(&self, set: &[usize]) -> bool {
        let mem = self.membership(set);
        set.iter()
            .all(|&x| (0..self.len()).all(|y| !self.less[x][y] || mem[y]))
    }

    pub fn is_down_set(&self, set: &[usize]) -> bool {
        let mem = self.membership(set);
        set.iter()
            .all(|&x| (0..self.len()).all(|y| !self.less[y][x] || mem[y]))
    }

    pub fn membership(&self, set: &[usize]) -> Vec<bool> {
        let mut mem = vec![false; self.len()];
        for &x in set {
            mem[x] = true;
        }
        mem
    }

    pub fn complement(&self, set: &[usize]) -> Vec<usize> {
        let mem = self.membership(set);
        (0..self.len()).filter(|&x| !mem[x]).collect()
    }

    pub fn classify(&self, set: &[usize]) -> SubsetClass {
        match (self.is_up_set(set), self.is_down_set(set)) {
            (true, true) => SubsetClass::Clopen,
            (true, false) => SubsetClass::Open,
            (false, true) => SubsetClass::Closed,
            (false, false) => SubsetClass::Neither,
        }
    }

    /// Connectedness of `set` under the comparability graph.
    pub fn is_connected(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return true;
        }
        let mem = self.membership(set);
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([set[0]]);
        seen[set[0]] = true;
        while let Some(x) = queue.pop_front() {
            for &y in set {
                if !seen[y] && mem[y] && self.comparable(x, y) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        set.iter().all(|&x| seen[x])
    }

    /// Length of the longest strict chain inside `set` (number of elements
    /// minus one); `None` for the empty set.
    pub fn height(&self, set: &[usize]) -> Option<usize> {
        (0..=set.len())
            .rev()
            .find(|&k| !self.strict_chains(set, k).is_empty())
    }

    fn name_key(&self, chain: &[usize]) -> Vec<usize> {
        chain.iter().map(|&x| self.name_rank[x]).collect()
    }

    /// All strict chains `x0 < ... < xk` inside `set`, in lexicographic order
    /// of element identifiers.
    pub fn strict_chains(&self, set: &[usize], k: usize) -> Vec<Vec<usize>> {
        let mut by_name = set.to_vec();
        by_name.sort_by_key(|&x| self.name_rank[x]);
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k + 1);
        self.extend_chains(&by_name, k + 1, &mut current, &mut out);
        out.sort_by_cached_key(|c| self.name_key(c));
        out
    }

    fn extend_chains(&self, set: &[usize], len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for &x in set {
            if current.last().is_none_or(|&last| self.less[last][x]) {
                current.push(x);
                self.extend_chains(set, len, current, out);
                current.pop();
            }
        }
    }

    /// All strict chains inside `set`, grouped by degree (`result[k]` holds
    /// chains with `k + 1` elements).
    pub fn all_chains(&self, set: &[usize]) -> Vec<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for k in 0.. {
            let chains = self.strict_chains(set, k);
            if chains.is_empty() {
                break;
            }
            out.push(chains);
        }
        out
    }

    /// The induced subposet on `members`, keeping identifiers and the
    /// relative order of elements.
    pub fn induced(&self, members: &[usize]) -> Poset {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let elements: Vec<String> = members.iter().map(|&i| self.elements[i].clone()).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let less = members
            .iter()
            .map(|&x| members.iter().map(|&y| self.less[x][y]).collect())
            .collect();
        Self::from_closed(elements, index, less)
    }

    /// Indices in `self` of the elements of `sub`, provided `sub` is an
    /// induced subposet of `self` (matched by identifier).
    pub fn embedding_of(&self, sub: &Poset) -> Result<Vec<usize>> {
        let map: Vec<usize> = sub
            .elements
            .iter()
            .map(|e| {
                self.index_of(e)
                    .ok_or_else(|| Error::Input(format!("element {e} not in ambient poset")))
            })
            .collect::<Result<_>>()?;
        for i in 0..sub.len() {
            for j in 0..sub.len() {
                if sub.less[i][j] != self.less[map[i]][map[j]] {
                    return Err(Error::Input(format!(
                        "order on {} and {} differs from the ambient order",
                        sub.elements[i], sub.elements[j]
                    )));
                }
            }
        }
        Ok(map)
    }
}

/// Whether two shared posets are the same space (pointer or structure).
pub fn same_space(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A subset of a poset together with its topological kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    members: Vec<usize>,
    kind: SubspaceKind,
}

impl Subspace {
    pub fn new(poset: &Poset, members: &[usize], kind: SubspaceKind) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&x| x >= poset.len()) {
            return Err(Error::Input(format!("element index {bad} out of range")));
        }
        match kind {
            SubspaceKind::Open if !poset.is_up_set(&members) => {
                return Err(Error::Input(format!(
                    "{} is not open (not an up-set)",
                    describe(poset, &members)
                )))
            }
            SubspaceKind::Closed if !poset.is_down_set(&members) => {
                let witness = violating_down_pair(poset, &members);
                return Err(Error::Input(format!(
                    "{} is not closed (not a down-set): {witness}",
                    describe(poset, &members)
                )));
            }
            _ => {}
        }
        Ok(Subspace { members, kind })
    }

    pub fn from_names<S: AsRef<str>>(poset: &Poset, names: &[S], kind: SubspaceKind) -> Result<Self> {
        let members = poset.indices_of(names)?;
        Subspace::new(poset, &members, kind)
    }

    pub fn open(poset: &Poset, members: &[usize]) -> Result<Self> {
        Subspace::new(poset, members, SubspaceKind::Open)
    }

    pub fn closed(poset: &Poset, members: &[usize]) -> Result<Self> {
        Subspace::new(poset, members, SubspaceKind::Closed)
    }

    pub fn whole(poset: &Poset) -> Self {
        Subspace {
            members: (0..poset.len()).collect(),
            kind: SubspaceKind::Open,
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Complement with the dual kind (open <-> closed).
    pub fn complement(&self, poset: &Poset) -> Subspace {
        let kind = match self.kind {
            SubspaceKind::Open => SubspaceKind::Closed,
            SubspaceKind::Closed => SubspaceKind::Open,
            SubspaceKind::Arbitrary => SubspaceKind::Arbitrary,
        };
        Subspace {
            members: poset.complement(&self.members),
            kind,
        }
    }

    pub fn names(&self, poset: &Poset) -> Vec<String> {
        self.members.iter().map(|&i| poset.name(i).to_string()).collect()
    }
}

fn describe(poset: &Poset, members: &[usize]) -> String {
    let names: Vec<&str> = members.iter().map(|&i| poset.name(i)).collect();
    format!("{{{}}}", names.join(","))
}

fn violating_down_pair(poset: &Poset, members: &[usize]) -> String {
    let mem = poset.membership(members);
    for &x in members {
        for y in 0..poset.len() {
            if poset.lt(y, x) && !mem[y] {
                return format!("{}<{} with {} outside", poset.name(y), poset.name(x), poset.name(y));
            }
        }
    }
    String::new()
}
