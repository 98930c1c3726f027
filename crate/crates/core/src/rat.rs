use std::cmp::Ordering;
use std::fmt;

/// Exact rational number with a small positive denominator.
///
/// Every degree and exponent in this crate is of the form `a / p^k`, so an
/// `i64` numerator is far more than enough headroom; intermediate products
/// are taken in `i128` to keep comparisons exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64, // always > 0, gcd(num, den) = 1
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let (num, den) = (num * s, den * s);
        let g = gcd(num, den);
        if g == 0 {
            return Rat { num: 0, den: 1 };
        }
        Rat { num: num / g, den: den / g }
    }

    pub fn from_int(n: i64) -> Rat {
        Rat { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_integer(&self) -> Option<i64> {
        if self.den == 1 { Some(self.num) } else { None }
    }

    pub fn add(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.num, self.den * o.den)
    }

    pub fn mul_int(&self, k: i64) -> Rat {
        Rat::new(self.num * k, self.den)
    }

    pub fn div_int(&self, k: i64) -> Rat {
        Rat::new(self.num, self.den * k)
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> Rat {
        self.sub(&Rat::from_int(self.floor()))
    }

    /// True iff the denominator divides `p^k`.
    pub fn den_divides_pow(&self, p: i64, k: u32) -> bool {
        let mut d = self.den;
        for _ in 0..k {
            if d == 1 {
                return true;
            }
            if d % p == 0 {
                d /= p;
            }
        }
        d == 1
    }

    /// `self * p^k` must be an integer; returns it.
    pub fn scaled_int(&self, p: i64, k: u32) -> Option<i64> {
        let mut n = self.num as i128;
        let mut d = self.den;
        for _ in 0..k {
            if d % p == 0 {
                d /= p;
            } else {
                n *= p as i128;
            }
        }
        if d == 1 { Some(n as i64) } else { None }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_order() {
        let a = Rat::new(3, 4);
        let b = Rat::new(1, 2);
        assert_eq!(a.add(&b), Rat::new(5, 4));
        assert_eq!(a.mul(&b), Rat::new(3, 8));
        assert!(b < a);
        assert_eq!(Rat::new(6, 4), Rat::new(3, 2));
        assert_eq!(Rat::new(5, 4).floor(), 1);
        assert_eq!(Rat::new(5, 4).frac(), Rat::new(1, 4));
    }

    #[test]
    fn p_power_denominators() {
        assert!(Rat::new(3, 8).den_divides_pow(2, 3));
        assert!(!Rat::new(3, 8).den_divides_pow(2, 2));
        assert_eq!(Rat::new(3, 8).scaled_int(2, 3), Some(3));
        assert_eq!(Rat::new(1, 2).scaled_int(2, 2), Some(2));
        assert_eq!(Rat::from_int(3).scaled_int(2, 2), Some(12));
        assert_eq!(Rat::new(1, 3).scaled_int(2, 4), None);
    }
}
