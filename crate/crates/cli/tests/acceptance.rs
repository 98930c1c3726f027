//! Acceptance gate: one test per criterion, each printing its verdict line.
//! Run with `cargo test -p perfhopf-cli --test acceptance -- --nocapture`
//! to see the lines; timings are asserted against the stated budgets.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use perfhopf::cech;
use perfhopf::endo;
use perfhopf::hopf;
use perfhopf::modules::{self, ModuleSpec, Params};
use perfhopf::rat::Rat;
use perfhopf::sections;
use perfhopf::witt::{self, IntPoly};

fn params(p: u32, n: u32, depth: u32, bound: i64) -> Params {
    Params::new(p, n, depth, Rat::from_int(bound)).unwrap()
}

fn verdict(id: &str, description: &str, ok: bool, budget: Duration, started: Instant) {
    let elapsed = started.elapsed();
    let status = if ok && elapsed <= budget { "PASS" } else { "FAIL" };
    println!("{} {} ({:.2?}) - {}", id, status, elapsed, description);
    assert!(ok, "{} failed: {}", id, description);
    assert!(
        elapsed <= budget,
        "{} exceeded its {:?} budget: {:?}",
        id,
        budget,
        elapsed
    );
}

#[test]
fn a1_witt_correctness() {
    let started = Instant::now();
    let mut ok = true;
    // ghost identities hold exactly over the integers
    for p in [2u32, 3, 5] {
        for n in 1..=3u32 {
            let w = witt::witt_polys(p, n).unwrap();
            ok &= witt::verify_witt(&w).is_ok();
        }
    }
    // level-one shapes; variables are X0 X1 Y0 Y1
    let expected_p2 = {
        let mut e = IntPoly::var(4, 1).add(&IntPoly::var(4, 3));
        e = e.add(&IntPoly::var(4, 0).mul(&IntPoly::var(4, 2)));
        e
    };
    ok &= witt::witt_polys(2, 2).unwrap().sum[1].mod_p(2) == expected_p2;
    let expected_p3 = {
        let x0 = IntPoly::var(4, 0);
        let y0 = IntPoly::var(4, 2);
        let mut e = IntPoly::var(4, 1).add(&IntPoly::var(4, 3));
        e = e.add(&x0.pow(2).mul(&y0).scale(&BigInt::from(2)));
        e = e.add(&x0.mul(&y0.pow(2)).scale(&BigInt::from(2)));
        e
    };
    ok &= witt::witt_polys(3, 2).unwrap().sum[1].mod_p(3) == expected_p3;
    verdict(
        "A1",
        "ghost identities exact for p in {2,3,5}, n <= 3; level-one sums have the binomial shape mod 2 and mod 3",
        ok,
        Duration::from_secs(5),
        started,
    );
}

#[test]
fn a2_hopf_axioms() {
    let started = Instant::now();
    let mut ok = true;
    for p in [2u32, 3] {
        let bound = Rat::from_int((p * p) as i64);
        let w = witt::witt_polys(p, 2).unwrap();
        ok &= hopf::witt_kernel_hopf(&w, hopf::WittGrading::Standard, 2, bound)
            .and_then(|h| h.check_axioms())
            .is_ok();
        ok &= hopf::witt_kernel_hopf(&w, hopf::WittGrading::Twisted, 2, bound)
            .and_then(|h| h.check_axioms())
            .is_ok();
        ok &= hopf::additive_p_kernel_hopf(p, 2, bound)
            .and_then(|h| h.check_axioms())
            .is_ok();
        ok &= hopf::perfect_kernel_hopf(p, 2, bound)
            .and_then(|h| h.check_axioms())
            .is_ok();
        let pr = Params::new(p, 2, 2, bound).unwrap();
        ok &= modules::build_module(&ModuleSpec::Twisted, &pr)
            .and_then(|m| m.hopf.check_axioms())
            .is_ok();
    }
    verdict(
        "A2",
        "coassociativity, counit, cocommutativity and antipode hold for all four kernels and the twisted module at p in {2,3}, n=2, depth 2, bound p^2",
        ok,
        Duration::from_secs(30),
        started,
    );
}

#[test]
fn a3_verschiebung_exact_sequence() {
    let started = Instant::now();
    let mut ok = true;
    for p in [2u32, 3] {
        let w = witt::witt_polys(p, 3).unwrap();
        let bound = Rat::from_int((p * p) as i64);
        match hopf::verschiebung(&w, 2, bound).and_then(|v| hopf::verschiebung_exactness(&v)) {
            Ok(ex) => ok &= ex.composite_vanishes && ex.quotient_matches,
            Err(_) => ok = false,
        }
    }
    verdict(
        "A3",
        "the shift composite vanishes and the quotient by shifted coordinates is the length-one kernel, p in {2,3}, n=3",
        ok,
        Duration::from_secs(10),
        started,
    );
}

#[test]
fn a4_fiber_identification() {
    let started = Instant::now();
    let pr = params(2, 2, 2, 2);
    let ident = modules::twisted_fiber_identification(&pr).unwrap();
    verdict(
        "A4",
        "per-degree dimensions agree and an explicit generator matching is a Hopf and augmented-module isomorphism at p=2, n=2, depth=2, degrees <= 2",
        ident.certified(),
        Duration::from_secs(30),
        started,
    );
}

#[test]
fn a5_endomorphism_monoid() {
    let started = Instant::now();
    let mut ok = true;
    for p in [2u32, 3] {
        let pr = params(p, 2, 2, (p * p) as i64);
        let m = modules::build_module(&ModuleSpec::Twisted, &pr).unwrap();
        let table = endo::solve_endos(&m).unwrap();
        ok &= table.endos.len() == p as usize;
        ok &= table.automorphism_count() == p as usize - 1;
        ok &= table.is_multiplication_table();
        ok &= endo::verify_scaling_family(&m, &table).unwrap();
        let sym = endo::symbolic_endos(&m).unwrap();
        let expect: Vec<i64> = (0..2).map(|i| (p as i64).pow(i)).collect();
        ok &= sym.exponents.iter().map(|(_, w)| *w).collect::<Vec<_>>() == expect;
    }
    verdict(
        "A5",
        "exactly p endomorphisms with p-1 units composing as field multiplication, and the symbolic family scales coordinate i by the p^i-th power, p in {2,3}",
        ok,
        Duration::from_secs(120),
        started,
    );
}

#[test]
fn a6_cech_twisted_module() {
    let started = Instant::now();
    let pr = params(2, 2, 2, 3);
    let cx = cech::build_cech_line(&ModuleSpec::Twisted, &pr).unwrap();
    let rep = cech::cohomology(&cx).unwrap();
    let mut ok = rep.flags.is_empty();
    for k in 0..=12 {
        let d = Rat::new(k, 4);
        let expect0 = usize::from(d.is_integer());
        let expect1 = usize::from(d.is_integer() && d >= Rat::ONE);
        ok &= rep.dim(0, d) == expect0;
        ok &= rep.dim(1, d) == expect1;
    }
    ok &= rep.representatives(1, Rat::ONE) == vec!["y0"];
    ok &= rep.representatives(1, Rat::from_int(2)) == vec!["x*y0"];
    ok &= rep.representatives(1, Rat::from_int(3)) == vec!["x^2*y0"];
    match cech::weight_split(&rep) {
        Ok(split) => {
            for ((h, _), w) in split {
                ok &= i64::from(h) == w;
            }
        }
        Err(_) => ok = false,
    }
    let isos = cech::x_multiplication_isos(&cx, &rep).unwrap();
    ok &= isos.len() == 2 && isos.iter().all(|(_, b)| *b);
    verdict(
        "A6",
        "H0 dims (1,1,1,1) at degrees 0..3 and 0 at fractional degrees; H1 dims (1,1,1) at 1..3 with representatives x^j*y0; weights pure (0 and 1); x-multiplication identifies consecutive H1 pieces",
        ok,
        Duration::from_secs(120),
        started,
    );
}

#[test]
fn a7_cech_against_classical_tables() {
    let started = Instant::now();
    let mut ok = true;
    for p in [2u32, 3] {
        let bound = p as i64 + 1;
        let pr = params(p, 2, 2, bound);
        let cx = cech::build_cech_line(&ModuleSpec::UWF, &pr).unwrap();
        let rep = cech::cohomology(&cx).unwrap();
        let oracle = cech::de_rham_line_tables(p, bound - 1);
        for (d, dim) in &oracle.h0 {
            ok &= rep.dim(0, Rat::from_int(*d)) == *dim;
        }
        for (d, dim) in &oracle.h1 {
            ok &= rep.dim(1, Rat::from_int(*d)) == *dim;
        }
        let den = (p as i64).pow(2);
        for k in 0..(bound - 1) * den {
            let d = Rat::new(k, den);
            if !d.is_integer() {
                ok &= rep.dim(0, d) == 0 && rep.dim(1, d) == 0;
            }
        }
    }
    verdict(
        "A7",
        "cochain tables for the Witt pullback equal the two-term de Rham tables for all degrees <= bound - 1, p in {2,3}, bound p+1",
        ok,
        Duration::from_secs(120),
        started,
    );
}

#[test]
fn a8_sanity_initial_object_and_unit() {
    let started = Instant::now();
    let pr = params(2, 2, 2, 3);
    let cx = cech::build_cech_line(&ModuleSpec::Identity, &pr).unwrap();
    let rep = cech::cohomology(&cx).unwrap();
    let mut ok = true;
    for k in 0..=12 {
        let d = Rat::new(k, 4);
        ok &= rep.dim(0, d) == usize::from(d.is_integer());
        ok &= rep.dim(1, d) == 0;
    }
    let labels = sections::unit_identity_catalog(&pr).unwrap();
    ok &= labels.len() == 6;
    verdict(
        "A8",
        "the initial object's tables are the polynomial line in H0 with no H1, and restriction undoes evaluation across the catalog",
        ok,
        Duration::from_secs(30),
        started,
    );
}

#[test]
fn a9_reports_are_byte_identical() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_perfhopf");
    let run = || {
        std::process::Command::new(bin)
            .args([
                "verify", "all", "--p", "2", "--depth", "2", "--witt", "2", "--maxdeg", "3",
                "--seed", "7",
            ])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    let ok = first.status.code() == Some(0)
        && second.status.code() == Some(0)
        && first.stdout == second.stdout
        && !first.stdout.is_empty();
    verdict(
        "A9",
        "two consecutive full verification runs with the same configuration produce byte-identical reports",
        ok,
        Duration::from_secs(120),
        started,
    );
}
