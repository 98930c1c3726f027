use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Coeff, Monomial, Poly};
use crate::error::{Error, Result};
use crate::scalars::Fp;

/// Sparse polynomial over the integers in `nvars` variables; the carrier for
/// the universal addition laws before any reduction mod p happens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> IntPoly {
        IntPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn var(nvars: usize, v: usize) -> IntPoly {
        let mut exps = vec![0u32; nvars];
        exps[v] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, BigInt::one());
        IntPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            None => {
                self.terms.insert(exps, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exps, s);
                }
            }
        }
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        if k.is_zero() {
            return IntPoly::zero(self.nvars);
        }
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        debug_assert_eq!(self.nvars, o.nvars);
        // the corner of the envelope multiplies hundred-thousand-term
        // operands; exponent vectors pack into one u128 (8 vars, 16 bits
        // each) so accumulation hashes a scalar instead of a heap key
        let max_exp = |p: &IntPoly| {
            p.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
        };
        if self.nvars <= 8 && max_exp(self) + max_exp(o) < u16::MAX as u32 {
            let pack = |e: &[u32]| -> u128 {
                e.iter().enumerate().fold(0u128, |acc, (i, x)| acc | ((*x as u128) << (16 * i)))
            };
            let mut acc: std::collections::HashMap<u128, BigInt> =
                std::collections::HashMap::with_capacity(
                    self.terms.len().max(o.terms.len()) * 2,
                );
            let packed: Vec<(u128, &BigInt)> =
                o.terms.iter().map(|(e, c)| (pack(e), c)).collect();
            for (e1, c1) in &self.terms {
                let p1 = pack(e1);
                for (p2, c2) in &packed {
                    match acc.get_mut(&(p1 + p2)) {
                        Some(c) => *c += c1 * *c2,
                        None => {
                            acc.insert(p1 + p2, c1 * *c2);
                        }
                    }
                }
            }
            let nv = self.nvars;
            let terms: BTreeMap<Vec<u32>, BigInt> = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    let exps: Vec<u32> =
                        (0..nv).map(|i| ((k >> (16 * i)) & 0xffff) as u32).collect();
                    (exps, c)
                })
                .collect();
            return IntPoly { nvars: self.nvars, terms };
        }
        let mut acc: std::collections::HashMap<Vec<u32>, BigInt> =
            std::collections::HashMap::with_capacity(self.terms.len().max(o.terms.len()) * 2);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let exps: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                match acc.get_mut(&exps) {
                    Some(c) => *c += c1 * c2,
                    None => {
                        acc.insert(exps, c1 * c2);
                    }
                }
            }
        }
        let terms: BTreeMap<Vec<u32>, BigInt> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        IntPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, k: u32) -> IntPoly {
        let mut acc = {
            let mut one = IntPoly::zero(self.nvars);
            one.add_term(vec![0; self.nvars], BigInt::one());
            one
        };
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients reduced into `0..p`, zero terms dropped.
    pub fn mod_p(&self, p: u32) -> IntPoly {
        let mut r = IntPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let cp = bigint_mod_p(c, p);
            if cp != 0 {
                r.add_term(e.clone(), BigInt::from(cp));
            }
        }
        r
    }

    /// Exact division by an integer; error on any non-divisible coefficient.
    pub fn div_exact(&self, k: &BigInt) -> Result<IntPoly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let (q, r) = (c / k, c % k);
            if !r.is_zero() {
                return Err(Error::Internal(format!(
                    "inexact division by {} in universal polynomial",
                    k
                )));
            }
            terms.insert(e.clone(), q);
        }
        Ok(IntPoly { nvars: self.nvars, terms })
    }

    /// Substitute polynomials for the variables. Powers of the arguments
    /// are shared across terms; substitution into the big addition laws
    /// re-raises the same operands thousands of times otherwise.
    pub fn substitute(&self, args: &[IntPoly]) -> IntPoly {
        assert_eq!(args.len(), self.nvars);
        let out_vars = args.first().map_or(self.nvars, |a| a.nvars);
        let mut powers: BTreeMap<(usize, u32), IntPoly> = BTreeMap::new();
        let mut power_of = |v: usize, e: u32, args: &[IntPoly]| -> IntPoly {
            if let Some(p) = powers.get(&(v, e)) {
                return p.clone();
            }
            let mut best: Option<u32> = None;
            for k in (1..e).rev() {
                if powers.contains_key(&(v, k)) {
                    best = Some(k);
                    break;
                }
            }
            let (mut acc, start) = match best {
                Some(k) => (powers[&(v, k)].clone(), k),
                None => (args[v].clone(), 1),
            };
            for k in start..e {
                acc = acc.mul(&args[v]);
                powers.insert((v, k + 1), acc.clone());
            }
            acc
        };
        let mut r = IntPoly::zero(out_vars);
        for (exps, c) in &self.terms {
            let mut term = {
                let mut one = IntPoly::zero(out_vars);
                one.add_term(vec![0; out_vars], c.clone());
                one
            };
            for (v, e) in exps.iter().enumerate() {
                if *e > 0 {
                    term = term.mul(&power_of(v, *e, args));
                }
            }
            r = r.add(&term);
        }
        r
    }

    /// Reduce coefficients into `F_p` and rebuild over a target algebra:
    /// variable `v` of self becomes the monomial `targets[v]`.
    pub fn reduce_mod_p<C: Coeff>(&self, p: u32, targets: &[Monomial]) -> Poly<C> {
        assert_eq!(targets.len(), self.nvars);
        let mut out: Poly<C> = Poly::zero();
        for (exps, c) in &self.terms {
            let cp = bigint_mod_p(c, p);
            if cp == 0 {
                continue;
            }
            let mut m = Monomial::one();
            for (v, e) in exps.iter().enumerate() {
                for _ in 0..*e {
                    m = m.mul(&targets[v]);
                }
            }
            out.add_term(m, C::c_from_fp(Fp::new(cp as i64, p)));
        }
        out
    }
}

fn bigint_mod_p(c: &BigInt, p: u32) -> u32 {
    let m = c % p;
    let m = if m.is_negative() { m + p } else { m };
    let digits = m.to_u32_digits().1;
    digits.first().copied().unwrap_or(0)
}

/// Universal p-typical addition polynomials `S_0 .. S_{n-1}` in
/// `X_0..X_{n-1}, Y_0..Y_{n-1}` (variables `0..n` are X, `n..2n` are Y),
/// together with the negation polynomials `I_0 .. I_{n-1}` in `X` alone.
///
/// Both are produced by the ghost recursion over the integers; every
/// division is checked exact, the ghost identities are re-verified by
/// substitution before the value is returned, and isobarity (assigning
/// `X_j, Y_j` degree `p^j` makes `S_i` homogeneous of degree `p^i`) is
/// asserted, which is what later makes every comultiplication graded.
#[derive(Debug, Clone)]
pub struct WittPolys {
    pub p: u32,
    pub n: u32,
    pub sum: Vec<IntPoly>,
    pub negation: Vec<IntPoly>,
}

/// Render with explicit variable names, terms in the stored order.
pub fn int_poly_string(poly: &IntPoly, names: &[&str]) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (exps, c) in poly.terms() {
        let mut s = format!("{}", c);
        for (v, e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => s.push_str(&format!("*{}", names[v])),
                e => s.push_str(&format!("*{}^{}", names[v], e)),
            }
        }
        parts.push(s);
    }
    parts.join(" + ")
}

/// `S_1` written directly from the binomial coefficients,
/// `X1 + Y1 - (1/p) * sum_i binom(p, i) X0^i Y0^(p-i)`: an independent
/// route to the level-one addition law.
pub fn level_one_closed_form(p: u32) -> IntPoly {
    let nv = 4usize; // X0 X1 Y0 Y1
    let mut r = IntPoly::var(nv, 1).add(&IntPoly::var(nv, 3));
    let mut binom = BigInt::one();
    for i in 1..p {
        binom = binom * (p - i + 1) / i;
        let coeff = -(binom.clone() / p);
        let term = IntPoly::var(nv, 0)
            .pow(i)
            .mul(&IntPoly::var(nv, 2).pow(p - i))
            .scale(&coeff);
        r = r.add(&term);
    }
    r
}

/// Ghost component `w_m` of a coordinate list given as polynomials.
fn ghost(p: u32, m: usize, coords: &[IntPoly]) -> IntPoly {
    let nvars = coords[0].nvars();
    let mut acc = IntPoly::zero(nvars);
    for i in 0..=m {
        let pi = BigInt::from(p).pow(i as u32);
        let power = p.pow((m - i) as u32);
        acc = acc.add(&coords[i].pow(power).scale(&pi));
    }
    acc
}

pub fn witt_polys(p: u32, n: u32) -> Result<WittPolys> {
    if n == 0 || n > 4 {
        return Err(Error::Usage(format!("witt length {} outside 1..=4", n)));
    }
    if p > 7 {
        return Err(Error::Usage(format!("characteristic {} outside the envelope", p)));
    }
    let nv = 2 * n as usize;
    let xs: Vec<IntPoly> = (0..n as usize).map(|i| IntPoly::var(nv, i)).collect();
    let ys: Vec<IntPoly> = (0..n as usize).map(|i| IntPoly::var(nv, n as usize + i)).collect();

    let mut sum: Vec<IntPoly> = Vec::new();
    for m in 0..n as usize {
        // p^m * S_m = w_m(X) + w_m(Y) - sum_{i<m} p^i S_i^{p^(m-i)}
        let mut rhs = ghost(p, m, &xs).add(&ghost(p, m, &ys));
        for i in 0..m {
            let pi = BigInt::from(p).pow(i as u32);
            let power = p.pow((m - i) as u32);
            rhs = rhs.sub(&sum[i].pow(power).scale(&pi));
        }
        let pm = BigInt::from(p).pow(m as u32);
        sum.push(rhs.div_exact(&pm)?);
    }

    // negation: ghost components of I are -w_m(X)
    let nx = n as usize;
    let xs_only: Vec<IntPoly> = (0..nx).map(|i| IntPoly::var(nx, i)).collect();
    let mut negation: Vec<IntPoly> = Vec::new();
    for m in 0..nx {
        let mut rhs = ghost(p, m, &xs_only).scale(&BigInt::from(-1));
        for i in 0..m {
            let pi = BigInt::from(p).pow(i as u32);
            let power = p.pow((m - i) as u32);
            rhs = rhs.sub(&negation[i].pow(power).scale(&pi));
        }
        let pm = BigInt::from(p).pow(m as u32);
        negation.push(rhs.div_exact(&pm)?);
    }

    let polys = WittPolys { p, n, sum, negation };
    verify_witt(&polys)?;
    Ok(polys)
}

/// Ghost identities, isobarity and the negation law, re-verified exactly
/// over the integers. Runs on freshly computed polynomials and on anything
/// loaded from a cache.
pub fn verify_witt(polys: &WittPolys) -> Result<()> {
    let (p, n) = (polys.p, polys.n as usize);
    let nv = 2 * n;
    let xs: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(nv, i)).collect();
    let ys: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(nv, n + i)).collect();
    for m in 0..n {
        let lhs = ghost(p, m, &polys.sum);
        let rhs = ghost(p, m, &xs).add(&ghost(p, m, &ys));
        if lhs != rhs {
            return Err(Error::Internal(format!("ghost identity fails at level {}", m)));
        }
    }
    for (m, s) in polys.sum.iter().enumerate() {
        let want = (p as u64).pow(m as u32);
        for (exps, _) in s.terms() {
            let mut d = 0u64;
            for (v, e) in exps.iter().enumerate() {
                let j = if v < n { v } else { v - n };
                d += (*e as u64) * (p as u64).pow(j as u32);
            }
            if d != want {
                return Err(Error::Internal(format!("S_{} is not isobaric", m)));
            }
        }
    }
    let xs_only: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(n, i)).collect();
    let mut args: Vec<IntPoly> = xs_only;
    args.extend(polys.negation.iter().cloned());
    for (m, s) in polys.sum.iter().enumerate() {
        if !s.substitute(&args).is_zero() {
            return Err(Error::Internal(format!("negation fails to invert S_{}", m)));
        }
    }
    Ok(())
}

/// Cache-aware construction: with `PERFHOPF_CACHE` set, polynomials are
/// stored under it in a plain text form and re-verified on load; otherwise
/// (or on any mismatch) they are recomputed.
pub fn witt_polys_cached(p: u32, n: u32) -> Result<WittPolys> {
    let Some(dir) = std::env::var_os("PERFHOPF_CACHE") else {
        return witt_polys(p, n);
    };
    let path = std::path::Path::new(&dir).join(format!("witt_p{}_n{}.txt", p, n));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Some(polys) = parse_cache(p, n, &text) {
            if verify_witt(&polys).is_ok() {
                return Ok(polys);
            }
        }
    }
    let polys = witt_polys(p, n)?;
    let _ = std::fs::create_dir_all(&dir);
    let _ = std::fs::write(&path, render_cache(&polys));
    Ok(polys)
}

fn render_cache(polys: &WittPolys) -> String {
    let mut out = format!("p {} n {}\n", polys.p, polys.n);
    let dump = |out: &mut String, tag: &str, list: &[IntPoly]| {
        for (i, poly) in list.iter().enumerate() {
            for (exps, c) in poly.terms() {
                let es: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
                out.push_str(&format!("{} {} {} {}\n", tag, i, c, es.join(" ")));
            }
        }
    };
    dump(&mut out, "S", &polys.sum);
    dump(&mut out, "I", &polys.negation);
    out
}

fn parse_cache(p: u32, n: u32, text: &str) -> Option<WittPolys> {
    let mut lines = text.lines();
    let header = lines.next()?;
    if header != format!("p {} n {}", p, n) {
        return None;
    }
    let mut sum = vec![IntPoly::zero(2 * n as usize); n as usize];
    let mut negation = vec![IntPoly::zero(n as usize); n as usize];
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next()?;
        let i: usize = it.next()?.parse().ok()?;
        let c: BigInt = it.next()?.parse().ok()?;
        let exps: Vec<u32> = it.map(|e| e.parse().ok()).collect::<Option<_>>()?;
        let slot = match tag {
            "S" => sum.get_mut(i)?,
            "I" => negation.get_mut(i)?,
            _ => return None,
        };
        if exps.len() != slot.nvars() {
            return None;
        }
        slot.add_term(exps, c);
    }
    Some(WittPolys { p, n, sum, negation })
}

impl WittPolys {
    /// `S_i` with `X_j`, `Y_j` sent to the given target monomials,
    /// coefficients reduced mod p.
    pub fn sum_mod_p<C: Coeff>(&self, i: usize, x: &[Monomial], y: &[Monomial]) -> Poly<C> {
        let mut targets = x.to_vec();
        targets.extend_from_slice(y);
        self.sum[i].reduce_mod_p(self.p, &targets)
    }

    pub fn negation_mod_p<C: Coeff>(&self, i: usize, x: &[Monomial]) -> Poly<C> {
        self.negation[i].reduce_mod_p(self.p, x)
    }
}
