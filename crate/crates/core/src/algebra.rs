use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::scalars::{Fp, WeightScalar};

/// How a generator may appear in monomials and which implicit relation it
/// carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// `v` together with the truncated root tower `v^(1/p^m)`, `m <= depth`.
    /// Exponents are rationals with denominator dividing `p^depth`.
    PerfectTower,
    /// `v^p = 0`; exponents are integers in `0..p`.
    NilpotentOrderP,
    /// Free polynomial variable, integer exponents.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// Degree of `v` itself; level `m` of a tower has degree `degree / p^m`.
    pub degree: Rat,
    /// Scaling weight of `v` under the formal unit `b`; tower levels carry 0.
    pub weight: i64,
}

impl Variable {
    pub fn tower(name: &str, degree: Rat) -> Variable {
        Variable { name: name.into(), kind: VarKind::PerfectTower, degree, weight: 0 }
    }

    pub fn nilpotent(name: &str, degree: Rat, weight: i64) -> Variable {
        Variable { name: name.into(), kind: VarKind::NilpotentOrderP, degree, weight }
    }

    pub fn plain(name: &str, degree: Rat, weight: i64) -> Variable {
        Variable { name: name.into(), kind: VarKind::Plain, degree, weight }
    }
}

/// Sorted exponent vector; exponents are strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<(usize, Rat)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: usize, e: Rat) -> Monomial {
        if e.is_zero() {
            Monomial::one()
        } else {
            Monomial { exps: vec![(v, e)] }
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: usize) -> Rat {
        self.exps
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(Rat::ZERO)
    }

    pub fn exponents(&self) -> &[(usize, Rat)] {
        &self.exps
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut exps: BTreeMap<usize, Rat> = self.exps.iter().cloned().collect();
        for (v, e) in &o.exps {
            let cur = exps.entry(*v).or_insert(Rat::ZERO);
            *cur = cur.add(e);
        }
        Monomial { exps: exps.into_iter().filter(|(_, e)| !e.is_zero()).collect() }
    }

    pub fn with_exponent(&self, v: usize, e: Rat) -> Monomial {
        let mut exps: BTreeMap<usize, Rat> =
            self.exps.iter().cloned().filter(|(w, _)| *w != v).collect();
        if !e.is_zero() {
            exps.insert(v, e);
        }
        Monomial { exps: exps.into_iter().collect() }
    }

    pub fn reindex(&self, var_map: &[usize]) -> Monomial {
        let mut exps: Vec<(usize, Rat)> =
            self.exps.iter().map(|(v, e)| (var_map[*v], *e)).collect();
        exps.sort();
        Monomial { exps }
    }
}

/// Coefficient ring interface shared by `Fp` and `WeightScalar`.
pub trait Coeff: Clone + PartialEq + Eq + PartialOrd + Ord + fmt::Debug + fmt::Display {
    fn c_zero(p: u32) -> Self;
    fn c_one(p: u32) -> Self;
    fn c_from_fp(c: Fp) -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add(&self, o: &Self) -> Self;
    fn c_mul(&self, o: &Self) -> Self;
    fn c_neg(&self) -> Self;
}

impl Coeff for Fp {
    fn c_zero(p: u32) -> Self {
        Fp::zero(p)
    }
    fn c_one(p: u32) -> Self {
        Fp::one(p)
    }
    fn c_from_fp(c: Fp) -> Self {
        c
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn c_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
}

impl Coeff for WeightScalar {
    fn c_zero(p: u32) -> Self {
        WeightScalar::zero(p)
    }
    fn c_one(p: u32) -> Self {
        WeightScalar::one(p)
    }
    fn c_from_fp(c: Fp) -> Self {
        WeightScalar::from_fp(c)
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn c_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
}

/// Sparse polynomial; raw ring element prior to quotient reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<C: Coeff = Fp> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Poly<C> {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(p: u32, c: i64) -> Poly<C> {
        Poly::term(Monomial::one(), C::c_from_fp(Fp::new(c, p)))
    }

    pub fn term(m: Monomial, c: C) -> Poly<C> {
        let mut terms = BTreeMap::new();
        if !c.c_is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn monomial(p: u32, m: Monomial) -> Poly<C> {
        Poly::term(m, C::c_one(p))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.c_is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.c_add(&c);
                if !s.c_is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, o: &Poly<C>) -> Poly<C> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.c_neg())).collect() }
    }

    pub fn sub(&self, o: &Poly<C>) -> Poly<C> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly<C>) -> Poly<C> {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.c_mul(c2));
            }
        }
        r
    }

    pub fn scale(&self, c: &C) -> Poly<C> {
        let mut r = Poly::zero();
        for (m, c0) in &self.terms {
            r.add_term(m.clone(), c0.c_mul(c));
        }
        r
    }

    pub fn reindex(&self, var_map: &[usize]) -> Poly<C> {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            r.add_term(m.reindex(var_map), c.clone());
        }
        r
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }
}

impl Poly<Fp> {
    pub fn lift_ws(&self) -> Poly<WeightScalar> {
        self.map_coeffs(|c| WeightScalar::from_fp(*c))
    }
}

/// Rewrite rule attached to a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rewrite {
    /// Tower variable: `v^e` with `e >= 1` rewrites via `v -> poly`.
    /// Non-tower variable: `v` is substituted by `poly` entirely.
    Bottom(Poly<Fp>),
    /// Tower variable eliminated level-by-level:
    /// `v^(1/p^depth) -> target^(1/p^level)`.
    Whole { target: usize, level: u32 },
}

/// Result of reduction to normal form. `truncated` records that terms of
/// degree above the bound were discarded, so equality conclusions drawn from
/// this value are only valid on untruncated pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced<C: Coeff = Fp> {
    pub poly: Poly<C>,
    pub truncated: bool,
}

/// Degree of a polynomial, when defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(Rat),
    Mixed,
}

/// A quotient of a sparse polynomial ring over `F_p`, graded by rationals
/// with p-power denominators, truncated both in root depth and in degree.
///
/// All quotients are of rewrite type: unique normal forms come from the
/// implicit `v^p = 0` of nilpotent variables plus the oriented rules in
/// `rewrites`. The rule dependency graph is acyclic by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    p: u32,
    depth: u32,
    degree_bound: Rat,
    vars: Vec<Variable>,
    rewrites: BTreeMap<usize, Rewrite>,
}

impl Algebra {
    pub fn new(
        p: u32,
        depth: u32,
        degree_bound: Rat,
        vars: Vec<Variable>,
        rewrites: BTreeMap<usize, Rewrite>,
    ) -> Result<Arc<Algebra>> {
        let mut names = BTreeSet::new();
        for v in &vars {
            if !names.insert(v.name.clone()) {
                return Err(Error::Usage(format!("duplicate variable name {}", v.name)));
            }
            if v.degree <= Rat::ZERO {
                return Err(Error::UnsupportedPresentation(format!(
                    "variable {} must have positive degree",
                    v.name
                )));
            }
        }
        let alg = Algebra { p, depth, degree_bound, vars, rewrites };
        alg.check_rewrites()?;
        Ok(Arc::new(alg))
    }

    fn check_rewrites(&self) -> Result<()> {
        // rules must point at other variables only, acyclically
        for (v, rule) in &self.rewrites {
            let deps: Vec<usize> = match rule {
                Rewrite::Bottom(poly) => poly
                    .terms()
                    .flat_map(|(m, _)| m.exponents().iter().map(|(w, _)| *w))
                    .collect(),
                Rewrite::Whole { target, level } => {
                    if self.vars[*target].kind != VarKind::PerfectTower {
                        return Err(Error::UnsupportedPresentation(format!(
                            "whole-tower rule for {} must target a tower",
                            self.vars[*v].name
                        )));
                    }
                    if *level > self.depth {
                        return Err(Error::PrecisionExceeded(format!(
                            "tower identification past depth {}",
                            self.depth
                        )));
                    }
                    vec![*target]
                }
            };
            if deps.contains(v) {
                return Err(Error::UnsupportedPresentation(format!(
                    "rewrite for {} mentions itself",
                    self.vars[*v].name
                )));
            }
        }
        // depth-first cycle check over the rule graph
        let mut state = vec![0u8; self.vars.len()];
        fn visit(alg: &Algebra, v: usize, state: &mut Vec<u8>) -> Result<()> {
            if state[v] == 1 {
                return Err(Error::UnsupportedPresentation(format!(
                    "cyclic rewrites through {}",
                    alg.vars[v].name
                )));
            }
            if state[v] == 2 {
                return Ok(());
            }
            state[v] = 1;
            if let Some(rule) = alg.rewrites.get(&v) {
                match rule {
                    Rewrite::Bottom(poly) => {
                        for (m, _) in poly.terms() {
                            for (w, _) in m.exponents() {
                                visit(alg, *w, state)?;
                            }
                        }
                    }
                    Rewrite::Whole { target, .. } => visit(alg, *target, state)?,
                }
            }
            state[v] = 2;
            Ok(())
        }
        for v in 0..self.vars.len() {
            visit(self, v, &mut state)?;
        }
        Ok(())
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn degree_bound(&self) -> Rat {
        self.degree_bound
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rewrites(&self) -> &BTreeMap<usize, Rewrite> {
        &self.rewrites
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// `v^(1/p^m)` as a monomial.
    pub fn tower_level(&self, v: usize, m: u32) -> Monomial {
        debug_assert_eq!(self.vars[v].kind, VarKind::PerfectTower);
        Monomial::var(v, Rat::new(1, (self.p as i64).pow(m)))
    }

    /// The deepest incarnation of a generator: `v^(1/p^depth)` for towers,
    /// `v` otherwise. Maps are recorded on these.
    pub fn deepest(&self, v: usize) -> Monomial {
        match self.vars[v].kind {
            VarKind::PerfectTower => self.tower_level(v, self.depth),
            _ => Monomial::var(v, Rat::ONE),
        }
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Rat {
        let mut d = Rat::ZERO;
        for (v, e) in m.exponents() {
            d = d.add(&e.mul(&self.vars[*v].degree));
        }
        d
    }

    pub fn monomial_weight(&self, m: &Monomial) -> i64 {
        let mut w = Rat::ZERO;
        for (v, e) in m.exponents() {
            w = w.add(&e.mul_int(self.vars[*v].weight));
        }
        w.as_integer().expect("monomial weight must be an integer")
    }

    fn validate_exponents(&self, m: &Monomial) -> Result<()> {
        for (v, e) in m.exponents() {
            let var = &self.vars[*v];
            match var.kind {
                VarKind::PerfectTower => {
                    if !e.den_divides_pow(self.p as i64, self.depth) {
                        return Err(Error::PrecisionExceeded(format!(
                            "{}^({}) needs roots deeper than p^{}",
                            var.name, e, self.depth
                        )));
                    }
                    if *e < Rat::ZERO {
                        return Err(Error::Usage(format!("negative exponent on {}", var.name)));
                    }
                }
                VarKind::NilpotentOrderP | VarKind::Plain => {
                    if !e.is_integer() || *e < Rat::ZERO {
                        return Err(Error::Usage(format!(
                            "exponent {} on {} must be a nonnegative integer",
                            e, var.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical representative in the quotient, with degree truncation.
    pub fn nf<C: Coeff>(&self, poly: &Poly<C>) -> Result<Reduced<C>> {
        let mut out = Poly::zero();
        let mut truncated = false;
        for (m, c) in poly.terms() {
            self.reduce_term(m, c, &mut out, &mut truncated, 0)?;
        }
        Ok(Reduced { poly: out, truncated })
    }

    fn reduce_term<C: Coeff>(
        &self,
        m: &Monomial,
        c: &C,
        out: &mut Poly<C>,
        truncated: &mut bool,
        fuel: u32,
    ) -> Result<()> {
        if fuel > 64 {
            return Err(Error::Internal("rewrite recursion too deep".into()));
        }
        self.validate_exponents(m)?;
        if c.c_is_zero() {
            return Ok(());
        }
        // nilpotent kills first: they hold regardless of degree bookkeeping
        for (v, e) in m.exponents() {
            if self.vars[*v].kind == VarKind::NilpotentOrderP && *e >= Rat::from_int(self.p as i64)
            {
                return Ok(());
            }
        }
        for (v, e) in m.exponents() {
            match self.rewrites.get(v) {
                Some(Rewrite::Whole { target, level }) => {
                    // v^(k/p^depth) -> target^(k/p^level)
                    let k = e
                        .scaled_int(self.p as i64, self.depth)
                        .ok_or_else(|| Error::PrecisionExceeded(format!(
                            "exponent {} on eliminated tower",
                            e
                        )))?;
                    let ne = Rat::new(k, (self.p as i64).pow(*level));
                    let rest = m.with_exponent(*v, Rat::ZERO);
                    let merged = rest.mul(&Monomial::var(*target, ne));
                    return self.reduce_term(&merged, c, out, truncated, fuel + 1);
                }
                Some(Rewrite::Bottom(rule)) => {
                    let is_tower = self.vars[*v].kind == VarKind::PerfectTower;
                    let whole = if is_tower { e.floor() } else { e.as_integer().unwrap() };
                    if whole >= 1 {
                        let frac = if is_tower { e.frac() } else { Rat::ZERO };
                        let rest = m.with_exponent(*v, frac);
                        // rule^whole * rest, re-reduced
                        let mut acc = Poly::term(rest, c.clone());
                        let rule_c: Poly<C> = rule.map_coeffs(|x| C::c_from_fp(*x));
                        for _ in 0..whole {
                            acc = acc.mul(&rule_c);
                        }
                        for (m2, c2) in acc.terms() {
                            self.reduce_term(m2, c2, out, truncated, fuel + 1)?;
                        }
                        return Ok(());
                    }
                }
                None => {}
            }
        }
        if self.monomial_degree(m) > self.degree_bound {
            *truncated = true;
            return Ok(());
        }
        out.add_term(m.clone(), c.clone());
        Ok(())
    }

    /// Product in the quotient.
    pub fn mul_nf<C: Coeff>(&self, a: &Poly<C>, b: &Poly<C>) -> Result<Reduced<C>> {
        self.nf(&a.mul(b))
    }

    /// `base^k` in the quotient, by squaring.
    pub fn pow_nf<C: Coeff>(&self, base: &Poly<C>, mut k: u64) -> Result<Reduced<C>> {
        let mut acc = Reduced { poly: Poly::constant(self.p, 1), truncated: false };
        let mut sq = Reduced { poly: base.clone(), truncated: false };
        sq = self.combine(self.nf(&sq.poly)?, sq.truncated);
        while k > 0 {
            if k & 1 == 1 {
                let t = acc.truncated || sq.truncated;
                acc = self.combine(self.mul_nf(&acc.poly, &sq.poly)?, t);
            }
            k >>= 1;
            if k > 0 {
                let t = sq.truncated;
                sq = self.combine(self.mul_nf(&sq.poly, &sq.poly)?, t);
            }
        }
        Ok(acc)
    }

    fn combine<C: Coeff>(&self, r: Reduced<C>, earlier: bool) -> Reduced<C> {
        Reduced { poly: r.poly, truncated: r.truncated || earlier }
    }

    pub fn homogeneity<C: Coeff>(&self, poly: &Poly<C>) -> Homogeneity {
        let mut seen: Option<Rat> = None;
        for (m, _) in poly.terms() {
            let d = self.monomial_degree(m);
            match seen {
                None => seen = Some(d),
                Some(s) if s == d => {}
                Some(_) => return Homogeneity::Mixed,
            }
        }
        match seen {
            None => Homogeneity::Zero,
            Some(d) => Homogeneity::Degree(d),
        }
    }

    /// Weight homogeneity (b-grading); same contract as `homogeneity`.
    pub fn weight_homogeneity<C: Coeff>(&self, poly: &Poly<C>) -> Option<i64> {
        let mut seen: Option<i64> = None;
        for (m, _) in poly.terms() {
            let w = self.monomial_weight(m);
            match seen {
                None => seen = Some(w),
                Some(s) if s == w => {}
                Some(_) => return None,
            }
        }
        seen.or(Some(0))
    }

    /// Monomial basis of the degree-`d` piece, in the canonical order
    /// (lexicographic on variable name, then exponent).
    pub fn graded_piece(&self, d: Rat) -> Result<Vec<Monomial>> {
        if d > self.degree_bound {
            return Err(Error::DegreeBoundExceeded(format!(
                "piece at {} beyond bound {}",
                d, self.degree_bound
            )));
        }
        if d < Rat::ZERO {
            return Ok(Vec::new());
        }
        let mut result = Vec::new();
        let mut current: Vec<(usize, Rat)> = Vec::new();
        self.enumerate(0, d, &mut current, &mut result);
        let mut result: Vec<Monomial> = result;
        result.sort_by_key(|a| self.monomial_key(a));
        Ok(result)
    }

    fn enumerate(
        &self,
        i: usize,
        remaining: Rat,
        current: &mut Vec<(usize, Rat)>,
        out: &mut Vec<Monomial>,
    ) {
        if i == self.vars.len() {
            if remaining.is_zero() {
                let mut exps = current.clone();
                exps.sort();
                out.push(Monomial { exps });
            }
            return;
        }
        let var = &self.vars[i];
        let rewritten = self.rewrites.contains_key(&i);
        let choices: Vec<Rat> = match var.kind {
            VarKind::PerfectTower => {
                if let Some(Rewrite::Whole { .. }) = self.rewrites.get(&i) {
                    vec![Rat::ZERO]
                } else {
                    let unit = Rat::new(1, (self.p as i64).pow(self.depth));
                    let step_deg = unit.mul(&var.degree);
                    let mut ch = Vec::new();
                    let mut k: i64 = 0;
                    loop {
                        let e = unit.mul_int(k);
                        if rewritten && e >= Rat::ONE {
                            break; // bottom rewrites away v^{>=1}
                        }
                        if step_deg.mul_int(k) > remaining {
                            break;
                        }
                        ch.push(e);
                        k += 1;
                    }
                    ch
                }
            }
            VarKind::NilpotentOrderP => {
                if rewritten {
                    vec![Rat::ZERO]
                } else {
                    (0..self.p as i64)
                        .map(Rat::from_int)
                        .filter(|e| e.mul(&var.degree) <= remaining)
                        .collect()
                }
            }
            VarKind::Plain => {
                if rewritten {
                    vec![Rat::ZERO]
                } else {
                    let mut ch = Vec::new();
                    let mut k = 0i64;
                    while Rat::from_int(k).mul(&var.degree) <= remaining {
                        ch.push(Rat::from_int(k));
                        k += 1;
                    }
                    ch
                }
            }
        };
        for e in choices {
            let used = e.mul(&var.degree);
            if !e.is_zero() {
                current.push((i, e));
            }
            self.enumerate(i + 1, remaining.sub(&used), current, out);
            if !e.is_zero() {
                current.pop();
            }
        }
    }

    fn monomial_key(&self, m: &Monomial) -> Vec<(String, Rat)> {
        let mut key: Vec<(String, Rat)> =
            m.exponents().iter().map(|(v, e)| (self.vars[*v].name.clone(), *e)).collect();
        key.sort();
        key
    }

    /// Canonical comparison used for deterministic reports.
    pub fn cmp_monomials(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        self.monomial_key(a).cmp(&self.monomial_key(b))
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (name, e) in self.monomial_key(m) {
            if e == Rat::ONE {
                parts.push(name);
            } else if e.is_integer() {
                parts.push(format!("{}^{}", name, e));
            } else {
                parts.push(format!("{}^({})", name, e));
            }
        }
        parts.join("*")
    }

    pub fn poly_string<C: Coeff>(&self, poly: &Poly<C>) -> String {
        if poly.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(Vec<(String, Rat)>, String)> = poly
            .terms()
            .map(|(m, c)| {
                let cs = format!("{}", c);
                let ms = self.monomial_string(m);
                let key = self.monomial_key(m);
                let s = if ms == "1" {
                    cs
                } else if cs == "1" {
                    ms
                } else {
                    format!("{}*{}", cs, ms)
                };
                (key, s)
            })
            .collect();
        terms.sort();
        terms.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(" + ")
    }
}

/// Tensor product of two algebras: disjoint union of variables (second
/// factor renamed on collision) and of relations.
#[derive(Debug, Clone)]
pub struct TensorPair {
    pub alg: Arc<Algebra>,
    /// image of each left variable in `alg`
    pub left: Vec<usize>,
    /// image of each right variable in `alg`
    pub right: Vec<usize>,
}

pub fn tensor(a: &Algebra, b: &Algebra) -> Result<TensorPair> {
    if a.prime() != b.prime() || a.depth() != b.depth() || a.degree_bound() != b.degree_bound() {
        return Err(Error::Usage("tensor factors disagree on (p, depth, bound)".into()));
    }
    let mut vars = a.vars().to_vec();
    let mut names: BTreeSet<String> = vars.iter().map(|v| v.name.clone()).collect();
    let left: Vec<usize> = (0..vars.len()).collect();
    let mut right = Vec::new();
    for v in b.vars() {
        let mut nv = v.clone();
        while names.contains(&nv.name) {
            nv.name.push('\'');
        }
        names.insert(nv.name.clone());
        right.push(vars.len());
        vars.push(nv);
    }
    let mut rewrites = BTreeMap::new();
    for (v, rule) in a.rewrites() {
        rewrites.insert(left[*v], remap_rule(rule, &left));
    }
    for (v, rule) in b.rewrites() {
        rewrites.insert(right[*v], remap_rule(rule, &right));
    }
    let alg = Algebra::new(a.prime(), a.depth(), a.degree_bound(), vars, rewrites)?;
    Ok(TensorPair { alg, left, right })
}

fn remap_rule(rule: &Rewrite, map: &[usize]) -> Rewrite {
    match rule {
        Rewrite::Bottom(p) => Rewrite::Bottom(p.reindex(map)),
        Rewrite::Whole { target, level } => Rewrite::Whole { target: map[*target], level: *level },
    }
}

/// The coefficient field itself, as an algebra with no generators.
pub fn unit_algebra(p: u32, depth: u32, bound: Rat) -> Arc<Algebra> {
    Algebra::new(p, depth, bound, Vec::new(), BTreeMap::new()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn killed_tower(p: u32, depth: u32, bound: i64) -> Arc<Algebra> {
        // k[x^(1/p^inf)]/(x), truncated
        Algebra::new(
            p,
            depth,
            Rat::from_int(bound),
            vec![Variable::tower("x", Rat::ONE)],
            [(0usize, Rewrite::Bottom(Poly::zero()))].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn roots_of_killed_generator_multiply_to_zero() {
        // x^(1/2) * x^(1/2) = x = 0 in k[x^(1/p^inf)]/(x), p = 2
        let a = killed_tower(2, 2, 4);
        let half = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(1, 2)));
        let r = a.mul_nf(&half, &half).unwrap();
        assert!(r.poly.is_zero());
        assert!(!r.truncated);
    }

    #[test]
    fn nilpotent_square_dies() {
        // y0 * y0 = 0 at p = 2
        let a = Algebra::new(
            2,
            2,
            Rat::from_int(4),
            vec![
                Variable::tower("y", Rat::ONE),
                Variable::nilpotent("y0", Rat::ONE, 1),
            ],
            [(0usize, Rewrite::Bottom(Poly::zero()))].into_iter().collect(),
        )
        .unwrap();
        let y0 = Poly::<Fp>::monomial(2, Monomial::var(1, Rat::ONE));
        assert!(a.mul_nf(&y0, &y0).unwrap().poly.is_zero());
    }

    #[test]
    fn exponents_add_exactly() {
        // x^(3/4) * x^(1/2) = x^(5/4) in the free truncated tower
        let a = Algebra::new(
            2,
            2,
            Rat::from_int(4),
            vec![Variable::tower("x", Rat::ONE)],
            BTreeMap::new(),
        )
        .unwrap();
        let u = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(3, 4)));
        let v = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(1, 2)));
        let r = a.mul_nf(&u, &v).unwrap();
        let expect = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(5, 4)));
        assert_eq!(r.poly, expect);
    }

    #[test]
    fn precision_violations_error_not_round() {
        let a = killed_tower(2, 2, 4);
        let deep = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(1, 8)));
        assert!(matches!(a.nf(&deep), Err(Error::PrecisionExceeded(_))));
    }

    #[test]
    fn graded_piece_of_killed_tower() {
        let a = killed_tower(2, 2, 4);
        // d = 1/2: only x^(1/2)
        let piece = a.graded_piece(Rat::new(1, 2)).unwrap();
        assert_eq!(piece, vec![Monomial::var(0, Rat::new(1, 2))]);
        // d = 1: x is dead, and x^(1/2)*x^(1/2) etc. collapse to it
        assert!(a.graded_piece(Rat::ONE).unwrap().is_empty());
        assert!(a.graded_piece(Rat::from_int(5)).is_err());
    }

    #[test]
    fn graded_piece_of_witt_kernel_coordinates() {
        // x0 deg 1, x1 deg 2, both order-p nilpotent, p = 2: degree 3 = {x0*x1}
        let a = Algebra::new(
            2,
            0,
            Rat::from_int(4),
            vec![
                Variable::nilpotent("x0", Rat::ONE, 1),
                Variable::nilpotent("x1", Rat::from_int(2), 2),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let piece = a.graded_piece(Rat::from_int(3)).unwrap();
        assert_eq!(piece.len(), 1);
        assert_eq!(a.monomial_string(&piece[0]), "x0*x1");
    }

    #[test]
    fn truncation_is_flagged() {
        // free tower, bound 2: (x^(3/4))^3 = x^(9/4) exceeds the bound
        let a = Algebra::new(
            2,
            2,
            Rat::from_int(2),
            vec![Variable::tower("x", Rat::ONE)],
            BTreeMap::new(),
        )
        .unwrap();
        let x34 = Poly::<Fp>::monomial(2, Monomial::var(0, Rat::new(3, 4)));
        let prod = a.pow_nf(&x34, 3).unwrap();
        assert!(prod.poly.is_zero());
        assert!(prod.truncated);
        // in the killed tower the same power is exactly zero, no flag
        let k = killed_tower(2, 2, 2);
        let prod2 = k.pow_nf(&x34, 3).unwrap();
        assert!(prod2.poly.is_zero());
        assert!(!prod2.truncated);
    }

    #[test]
    fn tensor_kunneth_dimensions() {
        // (k[y^..]/(y, y0^2)) tensor (same with z), p=2, depth 1:
        // the degree-1 piece is {y0, z0, y^(1/2) z^(1/2)}
        let block = |t: &str, w: &str| {
            Algebra::new(
                2,
                1,
                Rat::from_int(4),
                vec![
                    Variable::tower(t, Rat::ONE),
                    Variable::nilpotent(w, Rat::ONE, 1),
                ],
                [(0usize, Rewrite::Bottom(Poly::zero()))].into_iter().collect(),
            )
            .unwrap()
        };
        let a = block("y", "y0");
        let b = block("z", "z0");
        let t = tensor(&a, &b).unwrap();
        let piece = t.alg.graded_piece(Rat::ONE).unwrap();
        let names: Vec<String> =
            piece.iter().map(|m| t.alg.monomial_string(m)).collect();
        assert_eq!(names, vec!["y^(1/2)*z^(1/2)", "y0", "z0"]);

        // Kunneth at d = 2: dim(A tensor B)_2 = sum dim A_i * dim B_{2-i}
        let d2 = t.alg.graded_piece(Rat::from_int(2)).unwrap().len();
        let mut expect = 0;
        let lattice: Vec<Rat> = (0..=4).map(|k| Rat::new(k, 2)).collect();
        for d1 in &lattice {
            let d2r = Rat::from_int(2).sub(d1);
            if d2r < Rat::ZERO {
                continue;
            }
            expect += a.graded_piece(*d1).unwrap().len() * b.graded_piece(d2r).unwrap().len();
        }
        assert_eq!(d2, expect);
    }

    #[test]
    fn tensor_rejects_parameter_mismatch() {
        let a = killed_tower(2, 2, 4);
        let b = killed_tower(2, 1, 4);
        assert!(matches!(tensor(&a, &b), Err(Error::Usage(_))));
        let c = killed_tower(3, 2, 4);
        assert!(matches!(tensor(&a, &c), Err(Error::Usage(_))));
    }

    #[test]
    fn trivial_algebra_is_a_tensor_unit() {
        let a = killed_tower(2, 2, 4);
        let unit = unit_algebra(2, 2, Rat::from_int(4));
        let t = tensor(&a, &unit).unwrap();
        for k in 0..=16 {
            let d = Rat::new(k, 4);
            assert_eq!(
                t.alg.graded_piece(d).unwrap().len(),
                a.graded_piece(d).unwrap().len()
            );
        }
    }

    #[test]
    fn renaming_on_collision() {
        let a = killed_tower(2, 2, 4);
        let t = tensor(&a, &a).unwrap();
        assert_eq!(t.alg.vars()[t.right[0]].name, "x'");
    }
}
