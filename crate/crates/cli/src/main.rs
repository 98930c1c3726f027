mod config;
mod suites;

use std::collections::BTreeMap;

use perfhopf::cech;
use perfhopf::endo;
use perfhopf::error::{Error, Result};
use perfhopf::modules::{self, ModuleSpec};
use perfhopf::witt;
use serde::Serialize;

use config::{Flags, Format, RunConfig};
use suites::Assertion;

fn main() {
    // die quietly instead of panicking when the consumer of stdout goes away
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(Error::Usage(m)) => {
            eprintln!("usage error: {}", m);
            eprintln!("{}", USAGE);
            2
        }
        // requests outside the supported envelope are usage, not math failures
        Err(
            e @ (Error::UnsupportedPresentation(_)
            | Error::PrecisionExceeded(_)
            | Error::DegreeBoundExceeded(_)),
        ) => {
            eprintln!("usage error: {}", e);
            2
        }
        Err(e) => {
            eprintln!("error: {}", e);
            1
        }
    }
}

const USAGE: &str = "\
usage:
  perfhopf verify <suite> [--p P] [--witt N] [--depth N] [--maxdeg D] [--seed S] [--format json|text]
      suites: witt, hopf, exactseq, transm1, endos, cech-twisted, cech-dr, all
  perfhopf cohomology a1 --module <spec> [--p P] [--witt N] [--depth N] [--maxdeg D] [--weights] [--format json|text]
  perfhopf endos [--p P] [--witt N] [--depth N] [--maxdeg D] [--symbolic] [--format json|text]
  perfhopf dump module <spec> [--p P] [--witt N] [--depth N] [--maxdeg D]
  perfhopf dump witt-polys [--p P] [--witt N]
  perfhopf dump cech-complex --module <spec> [--p P] [--witt N] [--depth N] [--maxdeg D]
  perfhopf dump sections --module <spec> --pair 'perf(x,y) kill(y)' [--p P] [--witt N] [--depth N] [--maxdeg D]

module specs: alpha_flat, alpha_p_pullback, uWF, uWF_over_p, twisted, identity,
              X^(1/p), fiber(A, B, over C)
environment: PERFHOPF_CACHE caches the universal addition polynomials";

const PARAM_FLAGS: &[&str] = &["p", "witt", "depth", "maxdeg", "seed", "format", "module"];

fn dispatch(args: &[String]) -> Result<i32> {
    let Some(cmd) = args.first() else {
        return Err(Error::Usage("no command given".into()));
    };
    match cmd.as_str() {
        "verify" => {
            let Some(suite) = args.get(1) else {
                return Err(Error::Usage("verify needs a suite".into()));
            };
            let flags = Flags::parse(&args[2..], &[])?;
            flags.reject_unknown(PARAM_FLAGS)?;
            let cfg = flags.config()?;
            cmd_verify(suite, &cfg)
        }
        "cohomology" => {
            if args.get(1).map(String::as_str) != Some("a1") {
                return Err(Error::Usage(
                    "cohomology supports the affine line: cohomology a1".into(),
                ));
            }
            let flags = Flags::parse(&args[2..], &["weights"])?;
            flags.reject_unknown(PARAM_FLAGS)?;
            let cfg = flags.config()?;
            let spec_str = flags
                .get("module")
                .ok_or_else(|| Error::Usage("cohomology needs --module".into()))?;
            cmd_cohomology(spec_str, flags.has("weights"), &cfg)
        }
        "endos" => {
            let flags = Flags::parse(&args[1..], &["symbolic"])?;
            flags.reject_unknown(PARAM_FLAGS)?;
            let mut cfg = flags.config()?;
            if flags.get("maxdeg").is_none() {
                // default the bound to the envelope's p^2
                cfg.maxdeg = (cfg.p * cfg.p) as i64;
                cfg.params()?;
            }
            cmd_endos(flags.has("symbolic"), &cfg)
        }
        "dump" => {
            let Some(what) = args.get(1) else {
                return Err(Error::Usage("dump needs a target".into()));
            };
            match what.as_str() {
                "module" => {
                    let Some(spec) = args.get(2) else {
                        return Err(Error::Usage("dump module needs a module spec".into()));
                    };
                    let flags = Flags::parse(&args[3..], &[])?;
                    flags.reject_unknown(PARAM_FLAGS)?;
                    let cfg = flags.config()?;
                    cmd_dump_module(spec, &cfg)
                }
                "witt-polys" => {
                    let flags = Flags::parse(&args[2..], &[])?;
                    flags.reject_unknown(PARAM_FLAGS)?;
                    let cfg = flags.config()?;
                    cmd_dump_witt(&cfg)
                }
                "sections" => {
                    let flags = Flags::parse(&args[2..], &[])?;
                    flags.reject_unknown(&["p", "witt", "depth", "maxdeg", "seed", "format", "module", "pair"])?;
                    let cfg = flags.config()?;
                    let spec = flags
                        .get("module")
                        .ok_or_else(|| Error::Usage("dump sections needs --module".into()))?;
                    let pair = flags
                        .get("pair")
                        .ok_or_else(|| Error::Usage("dump sections needs --pair, e.g. 'perf(x,y) kill(y)'".into()))?;
                    cmd_dump_sections(spec, pair, &cfg)
                }
                "cech-complex" => {
                    let flags = Flags::parse(&args[2..], &[])?;
                    flags.reject_unknown(PARAM_FLAGS)?;
                    let cfg = flags.config()?;
                    let spec = flags
                        .get("module")
                        .ok_or_else(|| Error::Usage("dump cech-complex needs --module".into()))?;
                    cmd_dump_cech(spec, &cfg)
                }
                other => Err(Error::Usage(format!("unknown dump target {}", other))),
            }
        }
        other => Err(Error::Usage(format!("unknown command {}", other))),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema: u32,
    command: &'static str,
    suite: &'a str,
    config: &'a RunConfig,
    assertions: &'a [Assertion],
    passed: usize,
    failed: usize,
}

fn cmd_verify(suite: &str, cfg: &RunConfig) -> Result<i32> {
    let assertions = suites::run_suite(suite, cfg)?;
    let passed = assertions.iter().filter(|a| a.passed()).count();
    let failed = assertions.len() - passed;
    match cfg.format {
        Format::Json => {
            let report = VerifyReport {
                schema: 1,
                command: "verify",
                suite,
                config: cfg,
                assertions: &assertions,
                passed,
                failed,
            };
            println!("{}", to_json(&report)?);
        }
        Format::Text => {
            for a in &assertions {
                match &a.detail {
                    None => println!("{}  {}  {}", a.status.to_uppercase(), a.id, a.claim),
                    Some(d) => {
                        println!("{}  {}  {} [{}]", a.status.to_uppercase(), a.id, a.claim, d)
                    }
                }
            }
            println!("{} passed, {} failed", passed, failed);
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

#[derive(Serialize)]
struct TableRow {
    i: u8,
    degree: String,
    weight: Option<i64>,
    dim: usize,
    representatives: Vec<String>,
}

#[derive(Serialize)]
struct CohomologyOut<'a> {
    schema: u32,
    command: &'static str,
    space: &'static str,
    module: String,
    #[serde(rename = "params")]
    config: &'a RunConfig,
    tables: Vec<TableRow>,
    flags: Vec<String>,
}

fn cmd_cohomology(spec_str: &str, weights: bool, cfg: &RunConfig) -> Result<i32> {
    let spec = ModuleSpec::parse(spec_str)?;
    if weights && spec != ModuleSpec::Twisted {
        return Err(Error::Usage(
            "--weights applies to the twisted module, the only catalog entry with the scaling action"
                .into(),
        ));
    }
    let params = cfg.params()?;
    let cx = cech::build_cech_line(&spec, &params)?;
    let rep = cech::cohomology(&cx)?;
    let mut tables = Vec::new();
    if weights {
        for row in &rep.rows {
            tables.push(TableRow {
                i: row.h,
                degree: row.degree.to_string(),
                weight: row.weight,
                dim: row.dim,
                representatives: row.representatives.clone(),
            });
        }
    } else {
        // aggregate over weights; key by the exact rational for ordering
        let mut merged: BTreeMap<(u8, perfhopf::rat::Rat), (usize, Vec<String>)> = BTreeMap::new();
        for row in &rep.rows {
            let e = merged.entry((row.h, row.degree)).or_insert((0, Vec::new()));
            e.0 += row.dim;
            e.1.extend(row.representatives.iter().cloned());
        }
        for ((h, degree), (dim, reps)) in merged {
            tables.push(TableRow {
                i: h,
                degree: degree.to_string(),
                weight: None,
                dim,
                representatives: reps,
            });
        }
    }
    let out = CohomologyOut {
        schema: 1,
        command: "cohomology",
        space: "a1",
        module: spec.canonical(),
        config: cfg,
        tables,
        flags: rep.flags.clone(),
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for t in &out.tables {
                println!(
                    "H{} degree {} weight {} dim {}  [{}]",
                    t.i,
                    t.degree,
                    t.weight.map_or("-".into(), |w| w.to_string()),
                    t.dim,
                    t.representatives.join(", ")
                );
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct EndoOut<'a> {
    schema: u32,
    command: &'static str,
    module: String,
    config: &'a RunConfig,
    endomorphisms: Vec<EndoRow>,
    composition: Vec<Vec<usize>>,
    identity: usize,
    automorphisms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbolic: Option<SymbolicOut>,
}

#[derive(Serialize)]
struct EndoRow {
    scalar: u32,
    invertible: bool,
    images: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct SymbolicOut {
    images: BTreeMap<String, String>,
    exponents: Vec<(String, i64)>,
}

fn cmd_endos(symbolic: bool, cfg: &RunConfig) -> Result<i32> {
    let params = cfg.params()?;
    let m = modules::build_module(&ModuleSpec::Twisted, &params)?;
    let table = endo::solve_endos(&m)?;
    let alg = &m.hopf.alg;
    let endomorphisms = table
        .endos
        .iter()
        .zip(&table.scalars)
        .zip(&table.invertible)
        .map(|((e, c), inv)| EndoRow {
            scalar: c.value(),
            invertible: *inv,
            images: m
                .witt_vars()
                .iter()
                .map(|v| (alg.vars()[*v].name.clone(), alg.poly_string(e.image(*v))))
                .collect(),
        })
        .collect();
    let symbolic_out = if symbolic {
        let sym = endo::symbolic_endos(&m)?;
        Some(SymbolicOut {
            images: m
                .witt_vars()
                .iter()
                .map(|v| {
                    (alg.vars()[*v].name.clone(), alg.poly_string(sym.family.image(*v)))
                })
                .collect(),
            exponents: sym.exponents.clone(),
        })
    } else {
        None
    };
    let out = EndoOut {
        schema: 1,
        command: "endos",
        module: table.module.clone(),
        config: cfg,
        endomorphisms,
        composition: table.composition.clone(),
        identity: table.identity,
        automorphisms: table.automorphism_count(),
        symbolic: symbolic_out,
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for (i, e) in out.endomorphisms.iter().enumerate() {
                println!(
                    "endo {}: scalar {}{} {:?}",
                    i,
                    e.scalar,
                    if e.invertible { " (unit)" } else { "" },
                    e.images
                );
            }
            println!("automorphisms: {}", out.automorphisms);
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct VarDump {
    name: String,
    kind: &'static str,
    degree: String,
    weight: i64,
}

#[derive(Serialize)]
struct ModuleDump<'a> {
    schema: u32,
    command: &'static str,
    what: &'static str,
    module: String,
    config: &'a RunConfig,
    variables: Vec<VarDump>,
    relations: Vec<String>,
    comultiplication: BTreeMap<String, String>,
    antipode: BTreeMap<String, String>,
    augmentation: BTreeMap<String, String>,
}

fn kind_str(kind: perfhopf::algebra::VarKind) -> &'static str {
    match kind {
        perfhopf::algebra::VarKind::PerfectTower => "perfect-tower",
        perfhopf::algebra::VarKind::NilpotentOrderP => "nilpotent-order-p",
        perfhopf::algebra::VarKind::Plain => "plain",
    }
}

fn algebra_dump(alg: &perfhopf::algebra::Algebra) -> (Vec<VarDump>, Vec<String>) {
    let vars = alg
        .vars()
        .iter()
        .map(|v| VarDump {
            name: v.name.clone(),
            kind: kind_str(v.kind),
            degree: v.degree.to_string(),
            weight: v.weight,
        })
        .collect();
    let mut relations = Vec::new();
    for (v, rule) in alg.rewrites() {
        match rule {
            perfhopf::algebra::Rewrite::Bottom(poly) => {
                relations.push(format!("{} -> {}", alg.vars()[*v].name, alg.poly_string(poly)));
            }
            perfhopf::algebra::Rewrite::Whole { target, level } => {
                relations.push(format!(
                    "{} -> {}^(1/{}^{})",
                    alg.monomial_string(&alg.deepest(*v)),
                    alg.vars()[*target].name,
                    alg.prime(),
                    level
                ));
            }
        }
    }
    for (v, var) in alg.vars().iter().enumerate() {
        if var.kind == perfhopf::algebra::VarKind::NilpotentOrderP
            && !alg.rewrites().contains_key(&v)
        {
            relations.push(format!("{}^{} -> 0", var.name, alg.prime()));
        }
    }
    (vars, relations)
}

fn cmd_dump_module(spec_str: &str, cfg: &RunConfig) -> Result<i32> {
    let spec = ModuleSpec::parse(spec_str)?;
    let params = cfg.params()?;
    let m = modules::build_module(&spec, &params)?;
    let alg = &m.hopf.alg;
    let (variables, relations) = algebra_dump(alg);
    let gen_name = |v: usize| alg.monomial_string(&alg.deepest(v));
    let comultiplication: BTreeMap<String, String> = (0..alg.vars().len())
        .map(|v| (gen_name(v), m.hopf.square.alg.poly_string(m.hopf.comult.image(v))))
        .collect();
    let antipode: BTreeMap<String, String> = (0..alg.vars().len())
        .map(|v| (gen_name(v), alg.poly_string(m.hopf.antipode.image(v))))
        .collect();
    let augmentation: BTreeMap<String, String> = (0..m.base.vars().len())
        .map(|v| {
            (
                m.base.monomial_string(&m.base.deepest(v)),
                alg.poly_string(m.aug.image(v)),
            )
        })
        .collect();
    let out = ModuleDump {
        schema: 1,
        command: "dump",
        what: "module",
        module: spec.canonical(),
        config: cfg,
        variables,
        relations,
        comultiplication,
        antipode,
        augmentation,
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for v in &out.variables {
                println!("{} {} {} {}", v.name, v.kind, v.degree, v.weight);
            }
            for r in &out.relations {
                println!("relation: {}", r);
            }
            for (g, img) in &out.comultiplication {
                println!("comult: {} -> {}", g, img);
            }
            for (g, img) in &out.antipode {
                println!("antipode: {} -> {}", g, img);
            }
            for (g, img) in &out.augmentation {
                println!("augmentation: {} -> {}", g, img);
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct WittDump<'a> {
    schema: u32,
    command: &'static str,
    what: &'static str,
    config: &'a RunConfig,
    sum_integer: Vec<String>,
    sum_mod_p: Vec<String>,
    negation_integer: Vec<String>,
    negation_mod_p: Vec<String>,
}

fn cmd_dump_witt(cfg: &RunConfig) -> Result<i32> {
    let polys = witt::witt_polys_cached(cfg.p, cfg.witt)?;
    let n = cfg.witt as usize;
    let mut names: Vec<String> = (0..n).map(|i| format!("X{}", i)).collect();
    names.extend((0..n).map(|i| format!("Y{}", i)));
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let xonly: Vec<&str> = name_refs[..n].to_vec();
    let out = WittDump {
        schema: 1,
        command: "dump",
        what: "witt-polys",
        config: cfg,
        sum_integer: polys.sum.iter().map(|s| witt::int_poly_string(s, &name_refs)).collect(),
        sum_mod_p: polys
            .sum
            .iter()
            .map(|s| witt::int_poly_string(&s.mod_p(cfg.p), &name_refs))
            .collect(),
        negation_integer: polys
            .negation
            .iter()
            .map(|s| witt::int_poly_string(s, &xonly))
            .collect(),
        negation_mod_p: polys
            .negation
            .iter()
            .map(|s| witt::int_poly_string(&s.mod_p(cfg.p), &xonly))
            .collect(),
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for (i, s) in out.sum_integer.iter().enumerate() {
                println!("S{} = {}", i, s);
            }
            for (i, s) in out.sum_mod_p.iter().enumerate() {
                println!("S{} mod {} = {}", i, cfg.p, s);
            }
            for (i, s) in out.negation_integer.iter().enumerate() {
                println!("I{} = {}", i, s);
            }
            for (i, s) in out.negation_mod_p.iter().enumerate() {
                println!("I{} mod {} = {}", i, cfg.p, s);
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct LevelDump {
    level: u8,
    variables: Vec<VarDump>,
    relations: Vec<String>,
}

#[derive(Serialize)]
struct FaceDump {
    from_level: u8,
    index: u8,
    images: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct CechDump<'a> {
    schema: u32,
    command: &'static str,
    what: &'static str,
    module: String,
    config: &'a RunConfig,
    levels: Vec<LevelDump>,
    cofaces: Vec<FaceDump>,
}

fn cmd_dump_cech(spec_str: &str, cfg: &RunConfig) -> Result<i32> {
    let spec = ModuleSpec::parse(spec_str)?;
    let params = cfg.params()?;
    let cx = cech::build_cech_line(&spec, &params)?;
    let mut levels = Vec::new();
    for (i, alg) in [&cx.c0, &cx.c1, &cx.c2].into_iter().enumerate() {
        let (variables, relations) = algebra_dump(alg);
        levels.push(LevelDump { level: i as u8, variables, relations });
    }
    let mut cofaces = Vec::new();
    for (idx, f) in cx.d01.iter().enumerate() {
        cofaces.push(face_dump(0, idx as u8, f));
    }
    for (idx, f) in cx.d12.iter().enumerate() {
        cofaces.push(face_dump(1, idx as u8, f));
    }
    let out = CechDump {
        schema: 1,
        command: "dump",
        what: "cech-complex",
        module: spec.canonical(),
        config: cfg,
        levels,
        cofaces,
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for l in &out.levels {
                println!("level {}:", l.level);
                for v in &l.variables {
                    println!("  {} {} {} {}", v.name, v.kind, v.degree, v.weight);
                }
                for r in &l.relations {
                    println!("  relation: {}", r);
                }
            }
            for f in &out.cofaces {
                println!("face d^{} from level {}:", f.index, f.from_level);
                for (g, img) in &f.images {
                    println!("  {} -> {}", g, img);
                }
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SectionsDump<'a> {
    schema: u32,
    command: &'static str,
    what: &'static str,
    module: String,
    pair: String,
    config: &'a RunConfig,
    variables: Vec<VarDump>,
    relations: Vec<String>,
    blocks: Vec<BlockDump>,
    structure: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct BlockDump {
    generator: String,
    kind: &'static str,
    variables: Vec<String>,
}

fn cmd_dump_sections(spec_str: &str, pair_str: &str, cfg: &RunConfig) -> Result<i32> {
    let spec = ModuleSpec::parse(spec_str)?;
    let pair = perfhopf::sections::Pair::parse(pair_str)?;
    let params = cfg.params()?;
    let m = modules::build_module(&spec, &params)?;
    let value = perfhopf::sections::evaluate(&m, &pair)?;
    let (variables, relations) = algebra_dump(&value.alg);
    let blocks = value
        .blocks
        .iter()
        .map(|b| BlockDump {
            generator: b.generator.clone(),
            kind: match b.kind {
                perfhopf::sections::BlockKind::FreeTower => "free-tower",
                perfhopf::sections::BlockKind::ModuleCopy => "module-copy",
            },
            variables: b.vars.iter().map(|v| value.alg.vars()[*v].name.clone()).collect(),
        })
        .collect();
    let structure: BTreeMap<String, String> = (0..value.pair_ring.vars().len())
        .map(|v| {
            (
                value.pair_ring.monomial_string(&value.pair_ring.deepest(v)),
                value.alg.poly_string(value.structure.image(v)),
            )
        })
        .collect();
    let out = SectionsDump {
        schema: 1,
        command: "dump",
        what: "sections",
        module: spec.canonical(),
        pair: pair_str.to_string(),
        config: cfg,
        variables,
        relations,
        blocks,
        structure,
    };
    match cfg.format {
        Format::Json => println!("{}", to_json(&out)?),
        Format::Text => {
            for v in &out.variables {
                println!("{} {} {} {}", v.name, v.kind, v.degree, v.weight);
            }
            for r in &out.relations {
                println!("relation: {}", r);
            }
            for b in &out.blocks {
                println!("block {} ({}): {}", b.generator, b.kind, b.variables.join(", "));
            }
            for (g, img) in &out.structure {
                println!("structure: {} -> {}", g, img);
            }
        }
    }
    Ok(0)
}

fn face_dump(from_level: u8, index: u8, f: &perfhopf::maps::AlgebraMap) -> FaceDump {
    let images = (0..f.source.vars().len())
        .map(|v| {
            (
                f.source.monomial_string(&f.source.deepest(v)),
                f.target.poly_string(f.image(v)),
            )
        })
        .collect();
    FaceDump { from_level, index, images }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {}", e)))
}
