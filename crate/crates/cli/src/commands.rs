use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Subcommand;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pervglue::cftg::{random_object, CftgContext};
use pervglue::complex::SheafComplex;
use pervglue::fixtures;
use pervglue::gluing::{gluing_functor_gf, quasi_inverse_witnesses, restriction_functor_rf, Decomposition};
use pervglue::linalg::Rational;
use pervglue::mv::{roundtrip_cp, roundtrip_pc};
use pervglue::perverse::{
    default_test_family, functor_f_g_t, is_perverse, is_perverse_closed, PerverseOnX0, StratifiedSpace, Witness,
};
use pervglue::Error;

use crate::report::{ReportDoc, Verdict};
use crate::spacefile::{parse_space_file, SpaceDoc};

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Load a space file and summarise it.
    CheckSpace {
        #[arg(long)]
        space: PathBuf,
    },
    /// Decide whether a closed set is perverse closed on the default test family.
    CheckPerverseClosed {
        #[arg(long)]
        space: PathBuf,
        /// A closed-set name from the file or a comma-separated element list.
        #[arg(long)]
        closed: String,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Dimensions of F(A), G(A) and the rank of T_A for local systems in the file.
    DescribeFgt {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        closed: String,
        /// Restrict to one local system.
        #[arg(long)]
        local_system: Option<String>,
    },
    /// Restrict sheaves to the two strata and glue them back.
    Glue {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        sheaf: Option<String>,
    },
    /// Test perversity of sheaves in the file and of complexes built from its local systems.
    PerverseCheck {
        #[arg(long)]
        space: PathBuf,
        /// One object, e.g. `sky`, `push:L1`, `ic:L2` or `extzero:L1`.
        #[arg(long)]
        object: Option<String>,
    },
    /// Random objects through C∘P and P∘C.
    Roundtrip {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        closed: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
    },
    /// Built-in checks on the disk fixture.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckSpace { .. } => "check-space",
            Command::CheckPerverseClosed { .. } => "check-perverse-closed",
            Command::DescribeFgt { .. } => "describe-fgt",
            Command::Glue { .. } => "glue",
            Command::PerverseCheck { .. } => "perverse-check",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Selftest => "selftest",
        }
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            Command::CheckSpace { space } => put("space", space.display().to_string()),
            Command::CheckPerverseClosed {
                space,
                closed,
                max_rank,
                seed,
            } => {
                put("space", space.display().to_string());
                put("closed", closed.clone());
                put("max_rank", max_rank.to_string());
                put("seed", seed.to_string());
            }
            Command::DescribeFgt {
                space,
                closed,
                local_system,
            } => {
                put("space", space.display().to_string());
                put("closed", closed.clone());
                if let Some(l) = local_system {
                    put("local_system", l.clone());
                }
            }
            Command::Glue { space, sheaf } => {
                put("space", space.display().to_string());
                if let Some(s) = sheaf {
                    put("sheaf", s.clone());
                }
            }
            Command::PerverseCheck { space, object } => {
                put("space", space.display().to_string());
                if let Some(o) = object {
                    put("object", o.clone());
                }
            }
            Command::Roundtrip {
                space,
                closed,
                trials,
                seed,
                max_rank,
            } => {
                put("space", space.display().to_string());
                put("closed", closed.clone());
                put("trials", trials.to_string());
                put("seed", seed.to_string());
                put("max_rank", max_rank.to_string());
            }
            Command::Selftest => {}
        }
        m
    }

    fn space_path(&self) -> Option<&PathBuf> {
        match self {
            Command::CheckSpace { space }
            | Command::CheckPerverseClosed { space, .. }
            | Command::DescribeFgt { space, .. }
            | Command::Glue { space, .. }
            | Command::PerverseCheck { space, .. }
            | Command::Roundtrip { space, .. } => Some(space),
            Command::Selftest => None,
        }
    }
}

/// Operational errors (bad input) versus mathematical ones.
fn verdict_for(e: &Error) -> Verdict {
    match e {
        Error::Parse { .. } | Error::Input(_) | Error::Shape(_) => Verdict::Error,
        _ => Verdict::Fail,
    }
}

pub fn run(cmd: &Command) -> ReportDoc {
    let inputs = cmd.inputs();
    let text = match cmd.space_path().map(std::fs::read_to_string).transpose() {
        Ok(t) => t,
        Err(e) => return ReportDoc::error(cmd.name(), inputs, &format!("cannot read space file: {e}")),
    };
    let files: Vec<&str> = text.iter().map(String::as_str).collect();
    let mut report = ReportDoc::new(cmd.name(), inputs.clone(), &files);
    let result = match text {
        Some(text) => parse_space_file(&text).and_then(|doc| execute(cmd, &doc, &mut report)),
        None => selftest(&mut report),
    };
    if let Err(e) = result {
        report.verdict = verdict_for(&e);
        report.line(format!("error: {e}"));
    }
    report
}

fn execute(cmd: &Command, doc: &SpaceDoc, r: &mut ReportDoc) -> Result<(), Error> {
    match cmd {
        Command::CheckSpace { .. } => check_space(doc, r),
        Command::CheckPerverseClosed {
            closed,
            max_rank,
            seed,
            ..
        } => check_perverse_closed(doc, closed, *max_rank, *seed, r),
        Command::DescribeFgt {
            closed, local_system, ..
        } => describe_fgt(doc, closed, local_system.as_deref(), r),
        Command::Glue { sheaf, .. } => glue(doc, sheaf.as_deref(), r),
        Command::PerverseCheck { object, .. } => perverse_check(doc, object.as_deref(), r),
        Command::Roundtrip {
            closed,
            trials,
            seed,
            max_rank,
            ..
        } => roundtrip(doc, closed, *trials, *seed, *max_rank, r),
        Command::Selftest => selftest(r),
    }
}

fn names(x: &StratifiedSpace, members: &[usize]) -> Vec<String> {
    members.iter().map(|&i| x.space().name(i).to_string()).collect()
}

fn check_space(doc: &SpaceDoc, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let p = x.space();
    r.line(format!("elements: {}", p.elements().join(" ")));
    r.line(format!("covering relations: {}", p.covers().len()));
    r.line(format!("S = {{{}}}, X0 = {{{}}}", names(x, x.stratum().members()).join(","), names(x, x.open_part().members()).join(",")));
    r.line(format!("d = {}, c = {}", x.d(), x.c()));
    let closed: BTreeMap<&String, Vec<String>> = doc.closed.iter().map(|(k, v)| (k, v.names(p))).collect();
    for (k, v) in &closed {
        r.line(format!("closed {k} = {{{}}}", v.join(",")));
    }
    let ls: BTreeMap<&String, Option<usize>> = doc.local_systems.iter().map(|(k, l)| (k, l.rank())).collect();
    for (k, rank) in &ls {
        r.line(format!("local system {k}: rank {}", rank.map_or("-".into(), |n| n.to_string())));
    }
    let sheaves: BTreeMap<&String, Value> = doc
        .sheaves
        .iter()
        .map(|(k, s)| (k, json!({"degree": s.degree, "dims": s.sheaf.dims()})))
        .collect();
    for (k, s) in &doc.sheaves {
        r.line(format!("sheaf {k}: degree {}, stalks {:?}", s.degree, s.sheaf.dims()));
    }
    r.details = json!({
        "elements": p.elements(),
        "covers": p.covers().iter().map(|&(a, b)| format!("{}<{}", p.name(a), p.name(b))).collect::<Vec<_>>(),
        "stratum": names(x, x.stratum().members()),
        "d": x.d(),
        "c": x.c(),
        "closed": closed,
        "local_systems": ls,
        "sheaves": sheaves,
    });
    Ok(())
}

fn witness_line(w: &Witness) -> String {
    serde_json::to_string(w).expect("witness serializes")
}

fn check_perverse_closed(doc: &SpaceDoc, closed: &str, max_rank: usize, seed: u64, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let k = doc.closed_set(closed)?;
    let tests = default_test_family(x, max_rank, seed)?;
    let report = is_perverse_closed(x, &k, &tests)?;
    r.line(format!("candidate K = {{{}}}", report.candidate.join(",")));
    r.line(format!("test objects: {}", report.tests.len()));
    if report.prefiltered {
        r.line("rejected: K does not contain S");
    }
    for w in &report.witnesses {
        r.line(format!("witness: {}", witness_line(w)));
        r.witnesses.push(serde_json::to_value(w).expect("witness serializes"));
    }
    r.details = serde_json::to_value(&report).expect("report serializes");
    if !report.pass {
        r.fail("K is not perverse closed");
    } else {
        r.line("K is perverse closed on the test family");
    }
    Ok(())
}

fn describe_fgt(doc: &SpaceDoc, closed: &str, only: Option<&str>, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let k = doc.closed_set(closed)?;
    let chosen: Vec<(&String, _)> = match only {
        Some(name) => {
            let l = doc
                .local_systems
                .get_key_value(name)
                .ok_or_else(|| Error::Input(format!("no local system named {name}")))?;
            vec![l]
        }
        None => doc.local_systems.iter().collect(),
    };
    let mut rows = BTreeMap::new();
    for (name, l) in chosen {
        let a = PerverseOnX0::new(x, l, name.as_str())?;
        match functor_f_g_t(x, &k, &a) {
            Ok(fgt) => {
                let s0 = fgt.t.comp(0);
                let row = json!({
                    "rank_a": a.rank(),
                    "dim_f": fgt.fa.rank(),
                    "dim_g": fgt.ga.rank(),
                    "rank_t": s0.rank(),
                    "t": s0,
                });
                r.line(format!(
                    "{name}: rank {} | dim F = {:?} | dim G = {:?} | rank T = {}",
                    a.rank(),
                    fgt.fa.rank().unwrap_or(0),
                    fgt.ga.rank().unwrap_or(0),
                    s0.rank()
                ));
                rows.insert(name.clone(), row);
            }
            Err(e) => {
                r.fail(format!("{name}: {e}"));
                rows.insert(name.clone(), json!({"error": e.to_string()}));
            }
        }
    }
    r.details = json!(rows);
    Ok(())
}

fn glue(doc: &SpaceDoc, only: Option<&str>, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let dec = Decomposition::new(x.space(), x.stratum().members())?;
    let chosen: Vec<_> = match only {
        Some(name) => vec![doc
            .sheaves
            .get_key_value(name)
            .ok_or_else(|| Error::Input(format!("no sheaf named {name}")))?],
        None => doc.sheaves.iter().collect(),
    };
    let mut rows = BTreeMap::new();
    for (name, entry) in chosen {
        let s = &entry.sheaf;
        let t = restriction_functor_rf(&dec, s)?;
        let glued = gluing_functor_gf(&t)?;
        match quasi_inverse_witnesses(s, &t) {
            Ok((iso, counit)) => {
                let ok = iso.is_iso() && counit.is_iso();
                r.line(format!(
                    "{name}: stalks {:?} -> glued {:?}, isomorphisms {}",
                    s.dims(),
                    glued.sheaf().dims(),
                    if ok { "found" } else { "NOT invertible" }
                ));
                if !ok {
                    r.verdict = Verdict::Fail;
                }
                rows.insert(name.clone(), json!({"dims": s.dims(), "glued": glued.sheaf().dims(), "iso": ok}));
            }
            Err(e) => {
                r.fail(format!("{name}: {e}"));
                rows.insert(name.clone(), json!({"error": e.to_string()}));
            }
        }
    }
    r.details = json!(rows);
    Ok(())
}

/// Named complexes for `perverse-check`.
pub fn objects(doc: &SpaceDoc) -> Result<BTreeMap<String, SheafComplex>, Error> {
    let x = &doc.space;
    let mut out = BTreeMap::new();
    for (name, s) in &doc.sheaves {
        out.insert(name.clone(), SheafComplex::concentrated(&s.sheaf, s.degree));
    }
    for (name, l) in &doc.local_systems {
        let a = PerverseOnX0::new(x, l, name.as_str())?;
        let pushed = x.pushforward(&a.complex())?;
        out.insert(format!("ic:{name}"), pushed.truncate_le(-x.d() - 1)?.0);
        out.insert(format!("push:{name}"), pushed);
        out.insert(format!("extzero:{name}"), fixtures::extension_by_zero_of(x, l));
    }
    Ok(out)
}

fn perverse_check(doc: &SpaceDoc, only: Option<&str>, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let all = objects(doc)?;
    let chosen: Vec<(&String, &SheafComplex)> = match only {
        Some(name) => vec![all
            .get_key_value(name)
            .ok_or_else(|| Error::Input(format!("no object named {name}")))?],
        None => all.iter().collect(),
    };
    let mut rows = BTreeMap::new();
    for (name, c) in chosen {
        let rep = is_perverse(x, c)?;
        if rep.is_perverse() {
            r.line(format!("{name}: perverse"));
        } else {
            r.fail(format!("{name}: not perverse ({})", rep.failures.join("; ")));
            r.witnesses.push(json!({"object": name, "failures": rep.failures}));
        }
        rows.insert(name.clone(), json!({"perverse": rep.is_perverse(), "failures": rep.failures}));
    }
    r.details = json!(rows);
    Ok(())
}

fn stalk_cohomology(x: &StratifiedSpace, c: &SheafComplex) -> BTreeMap<String, BTreeMap<i64, usize>> {
    (0..x.space().len())
        .map(|p| {
            let dims = c.cohomology_dims_at(p).into_iter().filter(|(_, n)| *n > 0).collect();
            (x.space().name(p).to_string(), dims)
        })
        .collect()
}

fn roundtrip(doc: &SpaceDoc, closed: &str, trials: usize, seed: u64, max_rank: usize, r: &mut ReportDoc) -> Result<(), Error> {
    let x = &doc.space;
    let k = doc.closed_set(closed)?;
    let tests = default_test_family(x, max_rank, seed)?;
    let ctx = CftgContext::new(x, &k, &tests)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(trials);
    let mut passed = 0;
    for i in 0..trials {
        let o = random_object(&ctx, &mut rng, max_rank)?;
        let (rank_a, rank_b) = (o.a().rank(), o.b().dim(0));
        let mut row = json!({"trial": i, "rank_a": rank_a, "rank_b": rank_b});
        let cp = roundtrip_cp(&ctx, &o);
        let ok = match &cp {
            Ok(cp) => {
                row["p_cohomology"] = json!(stalk_cohomology(x, &cp.p.complex));
                row["cp"] = json!("ok");
                match roundtrip_pc(&ctx, &cp.p.complex) {
                    Ok(pc) => {
                        row["pc"] = json!(format!("ok ({} arrows)", pc.zigzag.len()));
                        true
                    }
                    Err(e) => {
                        row["pc"] = json!(e.to_string());
                        false
                    }
                }
            }
            Err(e) => {
                row["cp"] = json!(e.to_string());
                false
            }
        };
        r.line(format!(
            "trial {i}: rank A = {rank_a}, rank B = {rank_b}: {}",
            if ok { "ok" } else { "FAILED" }
        ));
        if ok {
            passed += 1;
        } else {
            r.verdict = Verdict::Fail;
            r.witnesses.push(row.clone());
        }
        rows.push(row);
    }
    r.line(format!("{passed}/{trials} round trips succeeded"));
    r.details = json!({ "trials": rows });
    Ok(())
}

fn selftest(r: &mut ReportDoc) -> Result<(), Error> {
    let x = fixtures::strat_disk();
    let check = |r: &mut ReportDoc, name: &str, ok: Result<bool, Error>| match ok {
        Ok(true) => r.line(format!("ok: {name}")),
        Ok(false) => r.fail(format!("FAILED: {name}")),
        Err(e) => r.fail(format!("FAILED: {name}: {e}")),
    };
    let tests = default_test_family(&x, 3, 7)?;
    let good = fixtures::k_good(&x);
    check(r, "K_good is perverse closed", is_perverse_closed(&x, &good, &tests).map(|rep| rep.pass));
    let point = x.closed_subspace(&["s"])?;
    check(
        r,
        "K = {s} fails in degree 0",
        is_perverse_closed(&x, &point, &tests).map(|rep| {
            !rep.pass
                && rep.witnesses.iter().any(|w| matches!(w, Witness::Nonvanishing { degree: 0, .. }))
        }),
    );
    let ctx = CftgContext::new(&x, &good, &tests)?;
    let q = Rational::from_int;
    let sky = SheafComplex::concentrated(&pervglue::sheaf::Sheaf::skyscraper(x.space().clone(), 0, 1), 0);
    let fixtures_set = [
        ("skyscraper", sky),
        ("IC1", fixtures::ic1(&x)),
        ("Rj_*L1[1]", fixtures::pushed_local_system(&x, q(1))),
        ("Rj_*L2[1]", fixtures::pushed_local_system(&x, q(2))),
        ("Rj_*L-1[1]", fixtures::pushed_local_system(&x, q(-1))),
        ("j_!L1[1]", fixtures::extension_by_zero(&x, q(1))),
    ];
    for (name, f) in &fixtures_set {
        let res = roundtrip_pc(&ctx, f).and_then(|pc| roundtrip_cp(&ctx, &pc.c.object).map(|cp| cp.iso.is_iso()));
        check(r, &format!("round trips through {name}"), res);
    }
    r.details = json!({"fixtures": fixtures_set.iter().map(|(n, _)| *n).collect::<Vec<_>>()});
    Ok(())
}
