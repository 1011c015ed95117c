use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use super::AlgebraicNumber;

/// Closed interval of reals with outward-rounded arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Rigorous enclosure of an algebraic number.
    pub fn enclose(a: &AlgebraicNumber) -> Self {
        if a.is_rational() {
            let q = &a.coords()[0];
            let v = q.to_f64().unwrap_or(f64::NAN);
            return Self::new(v.next_down(), v.next_up());
        }
        let (lo, hi) = a.enclosure(64);
        Self::new(
            lo.to_f64().unwrap_or(f64::NEG_INFINITY).next_down(),
            hi.to_f64().unwrap_or(f64::INFINITY).next_up(),
        )
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(&self, o: &Interval) -> bool {
        o.lo < self.lo && self.hi < o.hi
    }

    pub fn hull(&self, o: &Interval) -> Self {
        Self::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn intersect(&self, o: &Interval) -> Option<Self> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then(|| Self::new(lo, hi))
    }

    pub fn split(&self) -> (Self, Self) {
        let m = self.mid();
        (Self::new(self.lo, m), Self::new(m, self.hi))
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Enclosure of the reciprocal; `None` if the interval meets zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Self::new((1.0 / self.hi).next_down(), (1.0 / self.lo).next_up()))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15e}, {:.15e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new((self.lo - o.hi).next_down(), (self.hi - o.lo).next_up())
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == 0.0 && hi == 0.0 {
            return Self::point(0.0);
        }
        Self::new(lo.next_down(), hi.next_up())
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

impl Zero for Interval {
    fn zero() -> Self {
        Self::point(0.0)
    }
    fn is_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }
}

impl One for Interval {
    fn one() -> Self {
        Self::point(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_sqrt() {
        let r2 = AlgebraicNumber::sqrt_of(2).unwrap();
        let i = Interval::enclose(&r2);
        assert!(i.contains(std::f64::consts::SQRT_2));
        assert!(i.width() < 1e-15);
        let sq = i * i;
        assert!(sq.contains(2.0));
    }

    #[test]
    fn outward_rounding() {
        let a = Interval::point(0.1);
        let s = a + a + a;
        assert!(s.lo < 0.3 && 0.3 < s.hi);
        let m = Interval::new(-1.0, 2.0) * Interval::new(-3.0, 0.5);
        assert!(m.lo <= -6.0 && m.hi >= 3.0);
        assert!(Interval::new(-1.0, 1.0).recip().is_none());
    }
}
