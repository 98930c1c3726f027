use perfhopf::cech;
use perfhopf::endo;
use perfhopf::error::{Error, Result};
use perfhopf::hopf;
use perfhopf::linalg::FpMatrix;
use perfhopf::modules::{self, ModuleSpec, Params};
use perfhopf::rat::Rat;
use perfhopf::rng::SplitMix64;
use perfhopf::scalars::Fp;
use perfhopf::sections;
use perfhopf::witt;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub id: String,
    pub claim: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Assertion {
    fn ok(id: &str, claim: &str) -> Assertion {
        Assertion { id: id.into(), claim: claim.into(), status: "pass", detail: None }
    }

    fn fail(id: &str, claim: &str, detail: String) -> Assertion {
        Assertion { id: id.into(), claim: claim.into(), status: "fail", detail: Some(detail) }
    }

    fn check(id: &str, claim: &str, ok: bool, detail: impl Fn() -> String) -> Assertion {
        if ok {
            Assertion::ok(id, claim)
        } else {
            Assertion::fail(id, claim, detail())
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Checks that report falsification through a `Result` fold into one
/// assertion: errors become failures, not aborts.
fn from_result(id: &str, claim: &str, r: Result<()>) -> Assertion {
    match r {
        Ok(()) => Assertion::ok(id, claim),
        Err(e) => Assertion::fail(id, claim, e.to_string()),
    }
}

pub fn known_suites() -> &'static [&'static str] {
    &["witt", "hopf", "exactseq", "transm1", "endos", "cech-twisted", "cech-dr", "all"]
}

pub fn run_suite(suite: &str, cfg: &RunConfig) -> Result<Vec<Assertion>> {
    match suite {
        "witt" => suite_witt(cfg),
        "hopf" => suite_hopf(cfg),
        "exactseq" => suite_exactseq(cfg),
        "transm1" => suite_transm1(cfg),
        "endos" => suite_endos(cfg),
        "cech-twisted" => suite_cech_twisted(cfg),
        "cech-dr" => suite_cech_dr(cfg),
        "all" => {
            let mut all = Vec::new();
            all.extend(suite_witt(cfg)?);
            all.extend(suite_hopf(cfg)?);
            all.extend(suite_exactseq(cfg)?);
            all.extend(suite_transm1(cfg)?);
            all.extend(suite_endos(cfg)?);
            all.extend(suite_cech_twisted(cfg)?);
            all.extend(suite_cech_dr(cfg)?);
            all.extend(suite_sanity(cfg)?);
            all.extend(suite_linalg(cfg)?);
            Ok(all)
        }
        other => Err(Error::Usage(format!(
            "unknown suite {}; expected one of {}",
            other,
            known_suites().join(", ")
        ))),
    }
}

pub fn suite_witt(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let mut out = Vec::new();
    for n in 1..=cfg.witt {
        let id = format!("witt-ghost-identity-p{}-n{}", cfg.p, n);
        let claim = format!(
            "universal addition laws at p={}, length {} satisfy the ghost identities exactly over the integers",
            cfg.p, n
        );
        match witt::witt_polys_cached(cfg.p, n) {
            Ok(polys) => {
                out.push(from_result(&id, &claim, witt::verify_witt(&polys)));
                let nid = format!("witt-negation-p{}-n{}", cfg.p, n);
                out.push(Assertion::check(
                    &nid,
                    "negation polynomials invert the addition law exactly",
                    polys.negation.len() == n as usize,
                    || "negation list truncated".into(),
                ));
            }
            Err(e) => out.push(Assertion::fail(&id, &claim, e.to_string())),
        }
    }
    if cfg.witt >= 2 {
        let id = format!("witt-level-one-shape-p{}", cfg.p);
        let claim =
            "level-one addition law equals the binomial closed form X1 + Y1 - (1/p) sum binom(p,i) X0^i Y0^(p-i)";
        match witt::witt_polys_cached(cfg.p, 2) {
            Ok(w) => {
                let names = ["X0", "X1", "Y0", "Y1"];
                let rendered =
                    format!("S1 mod {} = {}", cfg.p, witt::int_poly_string(&w.sum[1].mod_p(cfg.p), &names));
                if w.sum[1] == witt::level_one_closed_form(cfg.p) {
                    out.push(Assertion {
                        id: id.clone(),
                        claim: claim.into(),
                        status: "pass",
                        detail: Some(rendered),
                    });
                } else {
                    out.push(Assertion::fail(&id, claim, rendered));
                }
            }
            Err(e) => out.push(Assertion::fail(&id, claim, e.to_string())),
        }
    }
    Ok(out)
}

pub fn suite_hopf(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let bound = params.bound;
    let w = witt::witt_polys_cached(cfg.p, cfg.witt)?;
    let mut out = Vec::new();
    let claim = "coassociativity, counit, cocommutativity and antipode laws hold on generators";
    out.push(from_result(
        "hopf-axioms-witt-kernel",
        claim,
        hopf::witt_kernel_hopf(&w, hopf::WittGrading::Standard, cfg.depth, bound).map(|_| ()),
    ));
    out.push(from_result(
        "hopf-axioms-witt-kernel-twisted",
        claim,
        hopf::witt_kernel_hopf(&w, hopf::WittGrading::Twisted, cfg.depth, bound).map(|_| ()),
    ));
    out.push(from_result(
        "hopf-axioms-additive-p-kernel",
        claim,
        hopf::additive_p_kernel_hopf(cfg.p, cfg.depth, bound).map(|_| ()),
    ));
    out.push(from_result(
        "hopf-axioms-perfection-kernel",
        claim,
        hopf::perfect_kernel_hopf(cfg.p, cfg.depth, bound).map(|_| ()),
    ));
    out.push(from_result(
        "hopf-axioms-twisted-module",
        claim,
        modules::build_module(&ModuleSpec::Twisted, &params)
            .and_then(|m| m.hopf.check_axioms()),
    ));
    Ok(out)
}

pub fn suite_exactseq(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let w = witt::witt_polys_cached(cfg.p, cfg.witt)?;
    let mut out = Vec::new();
    match hopf::verschiebung(&w, cfg.depth, params.bound) {
        Err(e) => {
            out.push(Assertion::fail(
                "verschiebung-hopf-map",
                "the coordinate shift is a map of Hopf algebras",
                e.to_string(),
            ));
        }
        Ok(v) => {
            out.push(Assertion::ok(
                "verschiebung-hopf-map",
                "the coordinate shift is a map of Hopf algebras",
            ));
            match hopf::verschiebung_exactness(&v) {
                Err(e) => out.push(Assertion::fail(
                    "verschiebung-exactness",
                    "exactness witnesses computable",
                    e.to_string(),
                )),
                Ok(ex) => {
                    out.push(Assertion::check(
                        "verschiebung-composite-vanishes",
                        "the composite with the length-one kernel inclusion kills the augmentation ideal",
                        ex.composite_vanishes,
                        || "composite image nonzero".into(),
                    ));
                    out.push(Assertion::check(
                        "verschiebung-quotient-identification",
                        "dividing by the shifted coordinates leaves the length-one kernel, degree for degree",
                        ex.quotient_matches,
                        || format!("{:?}", ex.quotient_dims),
                    ));
                }
            }
        }
    }
    Ok(out)
}

pub fn suite_transm1(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let ident = modules::twisted_fiber_identification(&params)?;
    Ok(vec![
        Assertion::check(
            "fiber-dimension-tables",
            "the fiber of the pushed-forward pullback against the pushed-forward kernel matches the twisted module degree for degree",
            ident.dims_equal,
            || format!("{:?}", ident.dims),
        ),
        Assertion::check(
            "fiber-isomorphism-comultiplication",
            "the generator matching intertwines the comultiplications",
            ident.hopf_compatible,
            || "comultiplication squares differ".into(),
        ),
        Assertion::check(
            "fiber-isomorphism-antipode",
            "the generator matching intertwines the antipodes",
            ident.antipode_compatible,
            || "antipode squares differ".into(),
        ),
        Assertion::check(
            "fiber-isomorphism-augmentation",
            "the generator matching intertwines the augmentations",
            ident.augmentation_compatible,
            || "augmentations differ".into(),
        ),
        Assertion::check(
            "fiber-isomorphism-bijective",
            "the generator matching is a bijection on monomial bases in every degree",
            ident.basis_bijection,
            || "basis matching fails".into(),
        ),
    ])
}

pub fn suite_endos(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let m = modules::build_module(&ModuleSpec::Twisted, &params)?;
    let table = endo::solve_endos(&m)?;
    let p = cfg.p as usize;
    let mut out = vec![
        Assertion::check(
            "endomorphism-count",
            "the twisted module has exactly p endomorphisms over the prime field",
            table.endos.len() == p,
            || format!("found {}", table.endos.len()),
        ),
        Assertion::check(
            "automorphism-count",
            "exactly the p-1 nonzero scalars are invertible",
            table.automorphism_count() == p - 1,
            || format!("found {}", table.automorphism_count()),
        ),
        Assertion::check(
            "endomorphism-monoid-multiplication",
            "the composition table is multiplication in the prime field",
            table.is_multiplication_table(),
            || "table deviates from field multiplication".into(),
        ),
        Assertion::check(
            "units-are-nonzero-scalars",
            "an endomorphism is invertible exactly when its degree-one coefficient is nonzero",
            table
                .invertible
                .iter()
                .zip(&table.scalars)
                .all(|(inv, c)| *inv == !c.is_zero()),
            || "invertibility disagrees with the scalar".into(),
        ),
    ];
    match endo::symbolic_endos(&m) {
        Err(e) => out.push(Assertion::fail(
            "scaling-family-exponents",
            "the symbolic family scales the i-th coordinate by the p^i-th power",
            e.to_string(),
        )),
        Ok(sym) => {
            let expect: Vec<i64> =
                (0..cfg.witt).map(|i| (cfg.p as i64).pow(i)).collect();
            let got: Vec<i64> = sym.exponents.iter().map(|(_, w)| *w).collect();
            out.push(Assertion::check(
                "scaling-family-exponents",
                "the symbolic family scales the i-th coordinate by the p^i-th power",
                got == expect,
                || format!("exponents {:?}", got),
            ));
        }
    }
    match endo::verify_scaling_family(&m, &table) {
        Ok(ok) => out.push(Assertion::check(
            "scaling-family-matches-enumeration",
            "specializations of the symbolic family are exactly the enumerated endomorphisms",
            ok,
            || "specializations and enumeration differ".into(),
        )),
        Err(e) => out.push(Assertion::fail(
            "scaling-family-matches-enumeration",
            "specializations of the symbolic family are exactly the enumerated endomorphisms",
            e.to_string(),
        )),
    }
    Ok(out)
}

fn lattice(params: &Params) -> Vec<Rat> {
    let den = (params.p as i64).pow(params.depth);
    let steps = params.bound.mul_int(den).as_integer().unwrap_or(0);
    (0..=steps).map(|k| Rat::new(k, den)).collect()
}

pub fn suite_cech_twisted(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let cx = cech::build_cech_line(&ModuleSpec::Twisted, &params)?;
    let rep = cech::cohomology(&cx)?;
    let mut out = Vec::new();
    out.push(Assertion::check(
        "cech-twisted-unflagged",
        "no graded piece touches the truncation boundary",
        rep.flags.is_empty(),
        || rep.flags.join("; "),
    ));
    let mut h0_ok = true;
    let mut h1_ok = true;
    let mut reps_ok = true;
    let mut detail = String::new();
    for d in lattice(&params) {
        let expect0 = if d.is_integer() { 1 } else { 0 };
        if rep.dim(0, d) != expect0 {
            h0_ok = false;
            detail = format!("H0 at {} is {}", d, rep.dim(0, d));
        }
        let expect1 = usize::from(d.is_integer() && d >= Rat::ONE);
        if rep.dim(1, d) != expect1 {
            h1_ok = false;
            detail = format!("H1 at {} is {}", d, rep.dim(1, d));
        }
        if d.is_integer() && d >= Rat::ONE {
            let want = if d == Rat::ONE {
                "y0".to_string()
            } else {
                format!("x^{}*y0", d.sub(&Rat::ONE))
            };
            let want = if d == Rat::from_int(2) { "x*y0".to_string() } else { want };
            if rep.representatives(1, d) != vec![want.clone()] {
                reps_ok = false;
                detail = format!("representative at {} is {:?}", d, rep.representatives(1, d));
            }
        }
    }
    out.push(Assertion::check(
        "cech-twisted-h0-table",
        "H0 is one-dimensional at the integers and vanishes at fractional degrees",
        h0_ok,
        || detail.clone(),
    ));
    out.push(Assertion::check(
        "cech-twisted-h1-table",
        "H1 is one-dimensional at the positive integers and vanishes elsewhere",
        h1_ok,
        || detail.clone(),
    ));
    out.push(Assertion::check(
        "cech-twisted-h1-representatives",
        "H1 representatives are the powers of the cover coordinate times the degree-one class",
        reps_ok,
        || detail.clone(),
    ));
    match cech::weight_split(&rep) {
        Err(e) => out.push(Assertion::fail(
            "cech-twisted-weight-split",
            "H0 sits purely in weight 0 and H1 purely in weight 1",
            e.to_string(),
        )),
        Ok(split) => {
            let pure = split.iter().all(|((h, _), w)| i64::from(*h) == *w);
            out.push(Assertion::check(
                "cech-twisted-weight-split",
                "H0 sits purely in weight 0 and H1 purely in weight 1",
                pure,
                || format!("{:?}", split),
            ));
        }
    }
    match cech::x_multiplication_isos(&cx, &rep) {
        Err(e) => out.push(Assertion::fail(
            "cech-twisted-x-multiplication",
            "multiplication by the cover coordinate identifies consecutive integer H1 pieces",
            e.to_string(),
        )),
        Ok(isos) => out.push(Assertion::check(
            "cech-twisted-x-multiplication",
            "multiplication by the cover coordinate identifies consecutive integer H1 pieces",
            !isos.is_empty() && isos.iter().all(|(_, ok)| *ok),
            || format!("{:?}", isos),
        )),
    }
    Ok(out)
}

pub fn suite_cech_dr(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    // classical comparison runs at bound p + 1, agreeing below the boundary
    let bound = cfg.p as i64 + 1;
    let params = Params::new(cfg.p, cfg.witt, cfg.depth, Rat::from_int(bound))?;
    let cx = cech::build_cech_line(&ModuleSpec::UWF, &params)?;
    let rep = cech::cohomology(&cx)?;
    let oracle = cech::de_rham_line_tables(cfg.p, bound - 1);
    let mut ok = true;
    let mut detail = String::new();
    for (d, dim) in &oracle.h0 {
        if rep.dim(0, Rat::from_int(*d)) != *dim {
            ok = false;
            detail = format!("H0 at {}: {} vs {}", d, rep.dim(0, Rat::from_int(*d)), dim);
        }
    }
    for (d, dim) in &oracle.h1 {
        if rep.dim(1, Rat::from_int(*d)) != *dim {
            ok = false;
            detail = format!("H1 at {}: {} vs {}", d, rep.dim(1, Rat::from_int(*d)), dim);
        }
    }
    let mut frac_ok = true;
    let den = (cfg.p as i64).pow(cfg.depth);
    for k in 0..(bound - 1) * den {
        let d = Rat::new(k, den);
        if d.is_integer() {
            continue;
        }
        if rep.dim(0, d) != 0 || rep.dim(1, d) != 0 {
            frac_ok = false;
            detail = format!("fractional class at {}", d);
        }
    }
    Ok(vec![
        Assertion::check(
            "cech-de-rham-integer-tables",
            "cochain tables for the Witt pullback agree with the two-term de Rham tables below the boundary",
            ok,
            || detail.clone(),
        ),
        Assertion::check(
            "cech-de-rham-fractional-vanishing",
            "no fractional-degree classes appear below the boundary",
            frac_ok,
            || detail.clone(),
        ),
    ])
}

pub fn suite_sanity(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let params = cfg.params()?;
    let mut out = Vec::new();
    let cx = cech::build_cech_line(&ModuleSpec::Identity, &params)?;
    let rep = cech::cohomology(&cx)?;
    let mut ok = true;
    let mut detail = String::new();
    for d in lattice(&params) {
        let expect0 = if d.is_integer() { 1 } else { 0 };
        if rep.dim(0, d) != expect0 || rep.dim(1, d) != 0 {
            ok = false;
            detail = format!("H at {}: ({}, {})", d, rep.dim(0, d), rep.dim(1, d));
        }
    }
    out.push(Assertion::check(
        "cech-initial-object-tables",
        "the initial object has the polynomial line as H0 and no H1",
        ok,
        || detail.clone(),
    ));
    match sections::unit_identity_catalog(&params) {
        Ok(labels) => out.push(Assertion::check(
            "restriction-unit-identity",
            "restricting the generator-pair value reproduces each catalog module",
            labels.len() == 6,
            || format!("checked {:?}", labels),
        )),
        Err(e) => out.push(Assertion::fail(
            "restriction-unit-identity",
            "restricting the generator-pair value reproduces each catalog module",
            e.to_string(),
        )),
    }
    let m = modules::build_module(&ModuleSpec::Twisted, &params)?;
    out.push(from_result(
        "sections-product-rule",
        "pair values factor through per-block dimension convolution",
        sections::evaluate(&m, &sections::Pair::parse("perf(x,y) kill(y)")?)
            .and_then(|v| sections::kunneth_check(&v)),
    ));
    out.push(from_result(
        "frobenius-square",
        "the p-th power square of the generator pair commutes with the structure map",
        sections::frobenius_square(&m, &sections::Pair::generator("y")).map(|_| ()),
    ));
    Ok(out)
}

pub fn suite_linalg(cfg: &RunConfig) -> Result<Vec<Assertion>> {
    let p = cfg.p;
    let mut rng = SplitMix64::new(cfg.seed);
    let (rows, cols) = (20usize, 30usize);
    let mut m = FpMatrix::zero(p, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, Fp::new(rng.below(p as u64) as i64, p));
        }
    }
    let (rank, kernel) = m.rank_kernel();
    let a1 = Assertion::check(
        "linalg-rank-nullity",
        "rank plus kernel dimension equals the column count on a seeded random matrix",
        rank + kernel.len() == cols,
        || format!("rank {} kernel {}", rank, kernel.len()),
    );
    // permuting rows leaves the rank unchanged
    let mut perm: Vec<usize> = (0..rows).collect();
    for i in (1..rows).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        perm.swap(i, j);
    }
    let mut pm = FpMatrix::zero(p, rows, cols);
    for (r, pr) in perm.iter().enumerate() {
        for c in 0..cols {
            pm.set(r, c, m.get(*pr, c));
        }
    }
    let a2 = Assertion::check(
        "linalg-rank-permutation-invariant",
        "row permutations leave the rank unchanged",
        pm.rank() == rank,
        || format!("{} vs {}", pm.rank(), rank),
    );
    Ok(vec![a1, a2])
}
