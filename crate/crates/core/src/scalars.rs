use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A prime characteristic in the supported range `2 ..= 7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Prime> {
        if !(2..=7).contains(&p) {
            return Err(Error::Usage(format!("characteristic {} outside 2..=7", p)));
        }
        // deterministic trial division; the range is tiny but the check stays
        for d in 2..p {
            if p.is_multiple_of(d) {
                return Err(Error::Usage(format!("{} is not prime", p)));
            }
        }
        Ok(Prime(p))
    }

    pub fn get(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Element of the prime field, carrying its modulus.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp {
    v: u32,
    p: u32,
}

impl Fp {
    pub fn new(v: i64, p: u32) -> Fp {
        Fp { v: v.rem_euclid(p as i64) as u32, p }
    }

    pub fn zero(p: u32) -> Fp {
        Fp { v: 0, p }
    }

    pub fn one(p: u32) -> Fp {
        Fp { v: 1 % p, p }
    }

    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn add(&self, o: &Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { v: (self.v + o.v) % self.p, p: self.p }
    }

    pub fn sub(&self, o: &Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }

    pub fn mul(&self, o: &Fp) -> Fp {
        debug_assert_eq!(self.p, o.p);
        Fp { v: (self.v * o.v) % self.p, p: self.p }
    }

    pub fn neg(&self) -> Fp {
        Fp { v: (self.p - self.v) % self.p, p: self.p }
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let mut base = *self;
        let mut acc = Fp::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Fp {
        assert!(self.v != 0, "inverse of zero in F_{}", self.p);
        self.pow(self.p as u64 - 2)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

/// Laurent polynomial in a formal unit `b` with `F_p` coefficients.
///
/// The exponent of `b` is the weight bookkeeping device: multiplying two
/// scalars adds weights, and specializing `b` to a field element collapses a
/// weight to an ordinary scalar. No zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightScalar {
    p: u32,
    coeffs: BTreeMap<i64, u32>, // weight -> nonzero residue
}

impl WeightScalar {
    pub fn zero(p: u32) -> WeightScalar {
        WeightScalar { p, coeffs: BTreeMap::new() }
    }

    pub fn one(p: u32) -> WeightScalar {
        WeightScalar::monomial(p, 0, 1)
    }

    /// `c * b^w`
    pub fn monomial(p: u32, w: i64, c: i64) -> WeightScalar {
        let c = c.rem_euclid(p as i64) as u32;
        let mut coeffs = BTreeMap::new();
        if c != 0 {
            coeffs.insert(w, c);
        }
        WeightScalar { p, coeffs }
    }

    pub fn from_fp(c: Fp) -> WeightScalar {
        WeightScalar::monomial(c.modulus(), 0, c.value() as i64)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Fp)> + '_ {
        self.coeffs.iter().map(|(w, c)| (*w, Fp::new(*c as i64, self.p)))
    }

    /// The single weight of a one-term scalar, if it is one.
    pub fn single_weight(&self) -> Option<(i64, Fp)> {
        if self.coeffs.len() == 1 {
            let (w, c) = self.coeffs.iter().next().unwrap();
            Some((*w, Fp::new(*c as i64, self.p)))
        } else {
            None
        }
    }

    pub fn add(&self, o: &WeightScalar) -> WeightScalar {
        debug_assert_eq!(self.p, o.p);
        let mut coeffs = self.coeffs.clone();
        for (w, c) in &o.coeffs {
            let e = coeffs.entry(*w).or_insert(0);
            *e = (*e + c) % self.p;
            if *e == 0 {
                coeffs.remove(w);
            }
        }
        WeightScalar { p: self.p, coeffs }
    }

    pub fn neg(&self) -> WeightScalar {
        let coeffs = self.coeffs.iter().map(|(w, c)| (*w, (self.p - c) % self.p)).collect();
        WeightScalar { p: self.p, coeffs }
    }

    pub fn sub(&self, o: &WeightScalar) -> WeightScalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &WeightScalar) -> WeightScalar {
        debug_assert_eq!(self.p, o.p);
        let mut coeffs: BTreeMap<i64, u32> = BTreeMap::new();
        for (w1, c1) in &self.coeffs {
            for (w2, c2) in &o.coeffs {
                let w = w1 + w2;
                let e = coeffs.entry(w).or_insert(0);
                *e = (*e + c1 * c2) % self.p;
                if *e == 0 {
                    coeffs.remove(&w);
                }
            }
        }
        WeightScalar { p: self.p, coeffs }
    }

    pub fn scale(&self, c: Fp) -> WeightScalar {
        self.mul(&WeightScalar::from_fp(c))
    }

    /// Specialize `b` to a field element.
    pub fn eval_at(&self, b: Fp) -> Fp {
        let mut acc = Fp::zero(self.p);
        for (w, c) in &self.coeffs {
            // b is a unit whenever a negative weight occurs
            let pw = if *w >= 0 {
                b.pow(*w as u64)
            } else {
                b.inv().pow((-*w) as u64)
            };
            acc = acc.add(&pw.mul(&Fp::new(*c as i64, self.p)));
        }
        acc
    }

    /// Substitute `b -> b^k` (weights multiply by `k`).
    pub fn substitute_power(&self, k: i64) -> WeightScalar {
        let coeffs = self.coeffs.iter().map(|(w, c)| (w * k, *c)).collect();
        WeightScalar { p: self.p, coeffs }
    }
}

impl fmt::Display for WeightScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (*w, *c) {
                (0, c) => write!(f, "{}", c)?,
                (1, 1) => write!(f, "b")?,
                (1, c) => write!(f, "{}*b", c)?,
                (w, 1) => write!(f, "b^{}", w)?,
                (w, c) => write!(f, "{}*b^{}", c, w)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeightScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_gate() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(7).is_ok());
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(6).is_err());
        assert!(Prime::new(11).is_err());
    }

    #[test]
    fn fermat_exhaustive() {
        // a^p = a for every residue, all supported primes
        for p in [2u32, 3, 5, 7] {
            for a in 0..p {
                let x = Fp::new(a as i64, p);
                assert_eq!(x.pow(p as u64), x);
            }
        }
    }

    #[test]
    fn field_inverses() {
        for p in [2u32, 3, 5, 7] {
            for a in 1..p {
                let x = Fp::new(a as i64, p);
                assert_eq!(x.mul(&x.inv()), Fp::one(p));
            }
        }
    }

    #[test]
    fn weight_scalar_ring() {
        let b = WeightScalar::monomial(3, 1, 1);
        let binv = WeightScalar::monomial(3, -1, 1);
        assert_eq!(b.mul(&binv), WeightScalar::one(3));
        let s = b.add(&WeightScalar::monomial(3, 1, 2)); // b + 2b = 0
        assert!(s.is_zero());
        let t = b.add(&WeightScalar::one(3));
        assert_eq!(t.mul(&t).eval_at(Fp::new(2, 3)), Fp::new(0, 3)); // (2+1)^2 = 0
        assert_eq!(b.substitute_power(2), WeightScalar::monomial(3, 2, 1));
    }
}
