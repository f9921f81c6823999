//! The `.space` text format.
//!
//! ```text
//! # comment
//! [poset]
//! elements = s a b c d
//! s<a, s<b
//! a<c
//!
//! [strata]
//! S = s
//! d = 0
//! c = 1
//!
//! [closed K_good]
//! s a
//!
//! [local-system L2]
//! rank = 1
//! b<d = [["2"]]
//!
//! [sheaf sky]
//! degree = 0
//! stalk s = 1
//! ```
//!
//! Relations need not be transitively closed. Matrices are JSON arrays of
//! rows of `"p/q"` strings. Unlisted covers of a local system carry the
//! identity; unlisted covers of a sheaf must have a zero-dimensional end.

use std::collections::BTreeMap;
use std::sync::Arc;

use pervglue::linalg::{Matrix, Rational};
use pervglue::perverse::StratifiedSpace;
use pervglue::poset::{Poset, Subspace, SubspaceKind};
use pervglue::sheaf::{LocalSystem, Sheaf};
use pervglue::Error;

/// A sheaf from the file, placed in one degree.
#[derive(Debug, Clone)]
pub struct SheafEntry {
    pub sheaf: Sheaf,
    pub degree: i64,
}

#[derive(Debug, Clone)]
pub struct SpaceDoc {
    pub space: StratifiedSpace,
    pub closed: BTreeMap<String, Subspace>,
    pub local_systems: BTreeMap<String, LocalSystem>,
    pub sheaves: BTreeMap<String, SheafEntry>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

// Re-tags an engine error with the line it came from.
fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => err(line, other.to_string()),
    }
}

#[derive(Debug, Default)]
struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    body: Vec<(usize, String)>,
}

fn sections(text: &str) -> Result<Vec<Section>, Error> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[') {
            let head = head
                .strip_suffix(']')
                .ok_or_else(|| err(n, "unterminated section header"))?;
            let mut parts = head.split_whitespace();
            let kind = parts.next().ok_or_else(|| err(n, "empty section header"))?.to_string();
            let name = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(err(n, "section header has extra words"));
            }
            out.push(Section {
                kind,
                name,
                line: n,
                body: Vec::new(),
            });
            continue;
        }
        let current = out
            .last_mut()
            .ok_or_else(|| err(n, "content before the first section"))?;
        current.body.push((n, line.to_string()));
    }
    Ok(out)
}

fn key_value(line: &str) -> Option<(&str, &str)> {
    line.split_once('=').map(|(k, v)| (k.trim(), v.trim()))
}

fn parse_int(n: usize, what: &str, v: &str) -> Result<i64, Error> {
    v.parse().map_err(|_| err(n, format!("{what} must be an integer, got {v:?}")))
}

fn parse_relation(n: usize, s: &str) -> Result<(String, String), Error> {
    let (x, y) = s
        .split_once('<')
        .ok_or_else(|| err(n, format!("expected a relation x<y, got {s:?}")))?;
    let (x, y) = (x.trim(), y.trim());
    if x.is_empty() || y.is_empty() {
        return Err(err(n, format!("incomplete relation {s:?}")));
    }
    Ok((x.to_string(), y.to_string()))
}

fn parse_matrix(n: usize, v: &str) -> Result<Matrix, Error> {
    let rows: Vec<Vec<String>> =
        serde_json::from_str(v).map_err(|e| err(n, format!("matrix must be an array of rows of \"p/q\" strings: {e}")))?;
    let rows = rows
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|s| s.parse::<Rational>().map_err(|e| err(n, e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).map_err(at(n))
}

fn names(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

fn find_name<'a>(poset: &Poset, n: usize, name: &'a str) -> Result<usize, Error> {
    poset
        .index_of(name)
        .ok_or_else(|| err(n, format!("undeclared element {name}")))
}

fn parse_poset(sec: &Section) -> Result<Poset, Error> {
    let mut elements: Option<Vec<String>> = None;
    let mut relations = Vec::new();
    for (n, line) in &sec.body {
        match key_value(line) {
            Some(("elements", v)) => {
                if elements.is_some() {
                    return Err(err(*n, "elements declared twice"));
                }
                elements = Some(names(v).map(str::to_string).collect());
            }
            Some((k, _)) => return Err(err(*n, format!("unknown key {k:?} in [poset]"))),
            None => {
                for rel in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    relations.push((*n, parse_relation(*n, rel)?));
                }
            }
        }
    }
    let elements = elements.ok_or_else(|| err(sec.line, "[poset] has no elements line"))?;
    for (n, (x, y)) in &relations {
        for e in [x, y] {
            if !elements.contains(e) {
                return Err(err(*n, format!("undeclared element {e}")));
            }
        }
    }
    let pairs: Vec<(String, String)> = relations.into_iter().map(|(_, r)| r).collect();
    Poset::new(&elements, &pairs).map_err(at(sec.line))
}

fn parse_strata(sec: &Section, poset: &Arc<Poset>) -> Result<StratifiedSpace, Error> {
    let mut s: Option<(usize, Vec<usize>)> = None;
    let mut x0: Option<(usize, Vec<usize>)> = None;
    let (mut d, mut c) = (None, None);
    for (n, line) in &sec.body {
        let (k, v) = key_value(line).ok_or_else(|| err(*n, "expected key = value"))?;
        match k {
            "S" => {
                let m = names(v).map(|e| find_name(poset, *n, e)).collect::<Result<_, _>>()?;
                s = Some((*n, m));
            }
            "X0" => {
                let m = names(v).map(|e| find_name(poset, *n, e)).collect::<Result<_, _>>()?;
                x0 = Some((*n, m));
            }
            "d" => d = Some(parse_int(*n, "d", v)?),
            "c" => c = Some(parse_int(*n, "c", v)?),
            _ => return Err(err(*n, format!("unknown key {k:?} in [strata]"))),
        }
    }
    let (sn, s) = s.ok_or_else(|| err(sec.line, "[strata] has no S line"))?;
    let d = d.ok_or_else(|| err(sec.line, "[strata] has no d line"))?;
    let c = c.ok_or_else(|| err(sec.line, "[strata] has no c line"))?;
    Subspace::new(poset, &s, SubspaceKind::Closed).map_err(at(sn))?;
    if let Some((n, mut given)) = x0 {
        given.sort_unstable();
        given.dedup();
        if given != poset.complement(&s) {
            return Err(err(n, "X0 is not the complement of S"));
        }
    }
    StratifiedSpace::new(poset, &s, d, c).map_err(at(sn))
}

fn parse_closed(sec: &Section, poset: &Arc<Poset>) -> Result<Subspace, Error> {
    let mut members = Vec::new();
    for (n, line) in &sec.body {
        for e in names(line) {
            members.push(find_name(poset, *n, e)?);
        }
    }
    Subspace::new(poset, &members, SubspaceKind::Closed).map_err(at(sec.line))
}

fn cover_of(poset: &Poset, n: usize, key: &str) -> Result<usize, Error> {
    let (x, y) = parse_relation(n, key)?;
    let (x, y) = (find_name(poset, n, &x)?, find_name(poset, n, &y)?);
    poset
        .cover_index(x, y)
        .ok_or_else(|| err(n, format!("{key} is not a covering relation")))
}

fn parse_local_system(sec: &Section, x: &StratifiedSpace) -> Result<LocalSystem, Error> {
    let sub = x.open_part().sub().clone();
    let mut rank = None;
    let mut given: BTreeMap<usize, (usize, Matrix)> = BTreeMap::new();
    for (n, line) in &sec.body {
        let (k, v) = key_value(line).ok_or_else(|| err(*n, "expected key = value"))?;
        if k == "rank" {
            rank = Some(parse_int(*n, "rank", v)?);
            continue;
        }
        if !k.contains('<') {
            return Err(err(*n, format!("unknown key {k:?} in [local-system]")));
        }
        let i = cover_of(&sub, *n, k).map_err(|e| match e {
            Error::Parse { line, message } => err(line, format!("{message} of the open part")),
            e => e,
        })?;
        given.insert(i, (*n, parse_matrix(*n, v)?));
    }
    let rank = rank.ok_or_else(|| err(sec.line, "local system has no rank line"))?;
    let rank = usize::try_from(rank).map_err(|_| err(sec.line, "rank must be non-negative"))?;
    for (n, m) in given.values() {
        if m.shape() != (rank, rank) {
            return Err(err(*n, format!("matrix must be {rank}x{rank}")));
        }
    }
    let maps = (0..sub.covers().len())
        .map(|i| given.get(&i).map_or_else(|| Matrix::identity(rank), |(_, m)| m.clone()))
        .collect();
    let sheaf = Sheaf::new(sub, vec![rank; x.open_part().sub().len()], maps).map_err(at(sec.line))?;
    LocalSystem::new(sheaf).map_err(at(sec.line))
}

fn parse_sheaf(sec: &Section, poset: &Arc<Poset>) -> Result<SheafEntry, Error> {
    let mut degree = 0;
    let mut dims = vec![0; poset.len()];
    let mut given: BTreeMap<usize, (usize, Matrix)> = BTreeMap::new();
    for (n, line) in &sec.body {
        let (k, v) = key_value(line).ok_or_else(|| err(*n, "expected key = value"))?;
        if k == "degree" {
            degree = parse_int(*n, "degree", v)?;
        } else if let Some(e) = k.strip_prefix("stalk ") {
            let dim = parse_int(*n, "stalk dimension", v)?;
            dims[find_name(poset, *n, e.trim())?] = usize::try_from(dim).map_err(|_| err(*n, "negative stalk dimension"))?;
        } else if k.contains('<') {
            given.insert(cover_of(poset, *n, k)?, (*n, parse_matrix(*n, v)?));
        } else {
            return Err(err(*n, format!("unknown key {k:?} in [sheaf]")));
        }
    }
    let mut maps = Vec::with_capacity(poset.covers().len());
    for (i, &(x, y)) in poset.covers().iter().enumerate() {
        let expected = (dims[y], dims[x]);
        match given.get(&i) {
            Some((n, m)) if m.shape() != expected => {
                return Err(err(
                    *n,
                    format!("map {}<{} must be {}x{}", poset.name(x), poset.name(y), expected.0, expected.1),
                ))
            }
            Some((_, m)) => maps.push(m.clone()),
            None if expected.0 == 0 || expected.1 == 0 => maps.push(Matrix::zeros(expected.0, expected.1)),
            None => {
                return Err(err(
                    sec.line,
                    format!("missing map {}<{}", poset.name(x), poset.name(y)),
                ))
            }
        }
    }
    let sheaf = Sheaf::new(poset.clone(), dims, maps).map_err(at(sec.line))?;
    Ok(SheafEntry { sheaf, degree })
}

pub fn parse_space_file(text: &str) -> Result<SpaceDoc, Error> {
    let secs = sections(text)?;
    let one = |kind: &str| -> Result<&Section, Error> {
        let mut it = secs.iter().filter(|s| s.kind == kind);
        let first = it.next().ok_or_else(|| err(0, format!("missing [{kind}] section")))?;
        if let Some(dup) = it.next() {
            return Err(err(dup.line, format!("second [{kind}] section")));
        }
        Ok(first)
    };
    let poset = Arc::new(parse_poset(one("poset")?)?);
    let space = parse_strata(one("strata")?, &poset)?;
    let mut doc = SpaceDoc {
        space,
        closed: BTreeMap::new(),
        local_systems: BTreeMap::new(),
        sheaves: BTreeMap::new(),
    };
    for sec in &secs {
        let named = || {
            sec.name
                .clone()
                .ok_or_else(|| err(sec.line, format!("[{}] needs a name", sec.kind)))
        };
        let fresh = |doc: &SpaceDoc, name: &str| {
            if doc.closed.contains_key(name) || doc.local_systems.contains_key(name) || doc.sheaves.contains_key(name) {
                Err(err(sec.line, format!("name {name} is used twice")))
            } else {
                Ok(())
            }
        };
        match sec.kind.as_str() {
            "poset" | "strata" => {}
            "closed" => {
                let name = named()?;
                fresh(&doc, &name)?;
                let k = parse_closed(sec, &poset)?;
                doc.closed.insert(name, k);
            }
            "local-system" => {
                let name = named()?;
                fresh(&doc, &name)?;
                let l = parse_local_system(sec, &doc.space)?;
                doc.local_systems.insert(name, l);
            }
            "sheaf" => {
                let name = named()?;
                fresh(&doc, &name)?;
                let s = parse_sheaf(sec, &poset)?;
                doc.sheaves.insert(name, s);
            }
            other => return Err(err(sec.line, format!("unknown section [{other}]"))),
        }
    }
    Ok(doc)
}

impl SpaceDoc {
    /// Looks up a closed set by name, or reads it as a comma-separated list
    /// of elements.
    pub fn closed_set(&self, arg: &str) -> Result<Subspace, Error> {
        if let Some(k) = self.closed.get(arg) {
            return Ok(k.clone());
        }
        let poset = self.space.space();
        let members = names(arg)
            .map(|e| {
                poset
                    .index_of(e)
                    .ok_or_else(|| Error::Input(format!("{e} is neither a closed-set name nor an element")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Subspace::new(poset, &members, SubspaceKind::Closed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = include_str!("../fixtures/disk.space");

    #[test]
    fn disk_fixture_matches_library() {
        let doc = parse_space_file(DISK).unwrap();
        let lib = pervglue::fixtures::strat_disk();
        assert_eq!(**doc.space.space(), **lib.space());
        assert_eq!(doc.space.stratum().members(), lib.stratum().members());
        assert_eq!((doc.space.d(), doc.space.c()), (0, 1));
        assert_eq!(doc.closed["K_good"], pervglue::fixtures::k_good(&lib));
        let l2 = pervglue::fixtures::circle_local_system(Rational::from_int(2));
        assert_eq!(doc.local_systems["L2"].sheaf().dims(), l2.sheaf().dims());
        assert_eq!(doc.local_systems["L2"].sheaf().cover_maps(), l2.sheaf().cover_maps());
    }

    #[test]
    fn raw_relations_are_closed() {
        let text = "[poset]\nelements = x y z\nx<y\ny<z\n[strata]\nS = x\nd = 0\nc = 1\n";
        let doc = parse_space_file(text).unwrap();
        let p = doc.space.space();
        assert!(p.lt(p.index_of("x").unwrap(), p.index_of("z").unwrap()));
    }

    #[test]
    fn open_stratum_is_rejected_with_pair() {
        let text = "[poset]\nelements = x y\nx<y\n[strata]\nS = y\nd = 0\nc = 1\n";
        let e = parse_space_file(text).unwrap_err();
        let Error::Parse { line, message } = e else { panic!("{e:?}") };
        assert_eq!(line, 5);
        assert!(message.contains('x') && message.contains('y'), "{message}");
    }

    #[test]
    fn errors_carry_lines() {
        let text = "[poset]\nelements = x y\nx<w\n";
        assert!(matches!(parse_space_file(text), Err(Error::Parse { line: 3, .. })));
        let text = "[poset]\nelements = x y\nx<y\n[strata]\nS = x\nd = zero\nc = 1\n";
        assert!(matches!(parse_space_file(text), Err(Error::Parse { line: 6, .. })));
        let text = "[poset]\nelements = x y\nx<y\n[strata]\nS = x\nd = 0\nc = 1\n[sheaf f]\nstalk x = 1\nstalk y = 1\n";
        assert!(matches!(parse_space_file(text), Err(Error::Parse { line: 8, .. })));
    }
}
