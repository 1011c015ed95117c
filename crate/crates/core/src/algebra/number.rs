//! Exact arithmetic in the multiquadratic field Q(√2, √3, √5).
//!
//! An element is stored as eight rational coordinates. Internally the
//! coordinate for `√(2^a 3^b 5^c)` lives at index `a | b << 1 | c << 2`, which
//! turns basis multiplication into an XOR of indices times the square of the
//! shared primes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactField;

const PRIMES: [i64; 3] = [2, 3, 5];

/// Radicand of the basis element stored at internal index `mask`.
const fn radicand(mask: usize) -> i64 {
    let mut r = 1;
    let mut i = 0;
    while i < 3 {
        if mask >> i & 1 == 1 {
            r *= PRIMES[i];
        }
        i += 1;
    }
    r
}

/// Internal indices in the public coordinate order `1, √2, √3, √5, √6, √10, √15, √30`.
const PUBLIC_ORDER: [usize; 8] = [0, 1, 2, 4, 3, 5, 6, 7];

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Element of Q(√2, √3, √5).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AlgebraicNumber {
    c: [BigRational; 8],
}

impl AlgebraicNumber {
    pub fn from_rational(q: BigRational) -> Self {
        let mut c: [BigRational; 8] = Default::default();
        c[0] = q;
        Self { c }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// The square root of a basis radicand (2, 3, 5, 6, 10, 15 or 30).
    pub fn sqrt_of(n: i64) -> Option<Self> {
        let mask = (0..8).find(|&m| radicand(m) == n)?;
        let mut c: [BigRational; 8] = Default::default();
        c[mask] = BigRational::one();
        Some(Self { c })
    }

    /// Builds an element from coordinates in the public basis order
    /// `1, √2, √3, √5, √6, √10, √15, √30`.
    pub fn from_coords(coords: [BigRational; 8]) -> Self {
        let mut c: [BigRational; 8] = Default::default();
        for (q, &m) in coords.into_iter().zip(PUBLIC_ORDER.iter()) {
            c[m] = q;
        }
        Self { c }
    }

    /// Coordinates in the public basis order, each in lowest terms.
    pub fn coords(&self) -> [BigRational; 8] {
        PUBLIC_ORDER.map(|m| self.c[m].clone())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    /// `√5`-golden ratio `(1 + √5) / 2`.
    pub fn golden() -> Self {
        let mut c: [BigRational; 8] = Default::default();
        c[0] = rat(1, 2);
        c[4] = rat(1, 2);
        Self { c }
    }

    /// Applies the field automorphism flipping the sign of `√p` for every
    /// prime `p` selected by `flip` (bit 0 = 2, bit 1 = 3, bit 2 = 5).
    pub fn conjugate(&self, flip: usize) -> Self {
        let mut out = self.clone();
        for m in 0..8 {
            if (m & flip).count_ones() % 2 == 1 {
                out.c[m] = -out.c[m].clone();
            }
        }
        out
    }

    /// Field norm down to Q: the product of all eight conjugates.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for bit in [1usize, 2, 4] {
            let conj = acc.conjugate(bit);
            acc = &acc * &conj;
        }
        debug_assert!(acc.is_rational());
        acc.c[0].clone()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // Multiply by the conjugate in each quadratic step of the tower
        // Q ⊂ Q(√2) ⊂ Q(√2,√3) ⊂ Q(√2,√3,√5); the running denominator
        // loses one generator at a time.
        let mut num = Self::one();
        let mut den = self.clone();
        for bit in [4usize, 2, 1] {
            let conj = den.conjugate(bit);
            num = &num * &conj;
            den = &den * &conj;
        }
        debug_assert!(den.is_rational());
        let d = den.c[0].clone();
        Some(num.scale(&d.recip()))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            *x = &*x * q;
        }
        out
    }

    /// Fast floating-point estimate. Accurate to a few ulps of the sum of
    /// absolute term values.
    pub fn to_f64(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .map(|(m, q)| ToPrimitive::to_f64(q).unwrap_or(f64::NAN) * (radicand(m) as f64).sqrt())
            .sum()
    }

    /// Rational enclosure `[lo, hi]` of the value, with every square root
    /// bracketed to within `2^-bits`.
    pub fn enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        let scale = BigInt::one() << bits;
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (m, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if m == 0 {
                lo += q;
                hi += q;
                continue;
            }
            let (r_lo, r_hi) = sqrt_bracket(radicand(m), bits, &scale);
            if q.is_positive() {
                lo += q * &r_lo;
                hi += q * &r_hi;
            } else {
                lo += q * &r_hi;
                hi += q * &r_lo;
            }
        }
        (lo, hi)
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.is_rational() {
            return self.c[0].cmp(&BigRational::zero());
        }
        // f64 fast path, guarded by a bound on accumulated rounding.
        let mut total = 0.0;
        let mut magnitude = 0.0;
        for (m, q) in self.c.iter().enumerate() {
            if let Some(v) = ToPrimitive::to_f64(q) {
                let t = v * (radicand(m) as f64).sqrt();
                total += t;
                magnitude += t.abs();
            } else {
                magnitude = f64::INFINITY;
            }
        }
        if magnitude.is_finite() && total.abs() > 1e-12 * magnitude {
            return total.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }
}

/// `[⌊√n·2^b⌋/2^b, (⌊√n·2^b⌋+1)/2^b]`.
fn sqrt_bracket(n: i64, bits: u64, scale: &BigInt) -> (BigRational, BigRational) {
    let s = (BigInt::from(n) << (2 * bits)).sqrt();
    let lo = BigRational::new(s.clone(), scale.clone());
    let hi = BigRational::new(s + 1, scale.clone());
    (lo, hi)
}

impl Zero for AlgebraicNumber {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl One for AlgebraicNumber {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl<'a> Add<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let mut c: [BigRational; 8] = Default::default();
        for (a, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in rhs.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let factor = radicand(a & b);
                let prod = x * y;
                c[a ^ b] += if factor == 1 {
                    prod
                } else {
                    prod * BigInt::from(factor)
                };
            }
        }
        AlgebraicNumber { c }
    }
}

impl<'a> Div<&'a AlgebraicNumber> for &'a AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn div(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        self * &rhs.inverse().expect("division by zero in Q(√2,√3,√5)")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $f(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&AlgebraicNumber> for AlgebraicNumber {
    fn add_assign(&mut self, rhs: &AlgebraicNumber) {
        for (x, y) in self.c.iter_mut().zip(rhs.c.iter()) {
            if !y.is_zero() {
                *x += y;
            }
        }
    }
}

impl SubAssign<&AlgebraicNumber> for AlgebraicNumber {
    fn sub_assign(&mut self, rhs: &AlgebraicNumber) {
        for (x, y) in self.c.iter_mut().zip(rhs.c.iter()) {
            if !y.is_zero() {
                *x -= y;
            }
        }
    }
}

impl MulAssign<&AlgebraicNumber> for AlgebraicNumber {
    fn mul_assign(&mut self, rhs: &AlgebraicNumber) {
        *self = &*self * rhs;
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(mut self) -> AlgebraicNumber {
        for x in self.c.iter_mut() {
            *x = -x.clone();
        }
        self
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -self.clone()
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for &m in PUBLIC_ORDER.iter() {
            let q = &self.c[m];
            if q.is_zero() {
                continue;
            }
            if wrote {
                write!(f, "{}", if q.is_negative() { " - " } else { " + " })?;
            } else if q.is_negative() {
                write!(f, "-")?;
            }
            let a = q.abs();
            if m == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "√{}", radicand(m))?;
            } else {
                write!(f, "{a}·√{}", radicand(m))?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraicNumber({self})")
    }
}

impl ExactField for AlgebraicNumber {
    fn from_rational(q: BigRational) -> Self {
        AlgebraicNumber::from_rational(q)
    }
    fn inverse(&self) -> Option<Self> {
        AlgebraicNumber::inverse(self)
    }
    fn signum(&self) -> Ordering {
        AlgebraicNumber::signum(self)
    }
    fn to_f64(&self) -> f64 {
        AlgebraicNumber::to_f64(self)
    }
}

/// `−cos(π/k)` for `2 ≤ k ≤ 6`, the off-diagonal Gram entry of a dihedral
/// angle `π/k`.
pub fn gram_entry(weight: u8) -> Option<AlgebraicNumber> {
    let v = match weight {
        2 => AlgebraicNumber::zero(),
        3 => AlgebraicNumber::from_ratio(-1, 2),
        4 => -AlgebraicNumber::sqrt_of(2)?.scale(&rat(1, 2)),
        5 => -AlgebraicNumber::golden().scale(&rat(1, 2)),
        6 => -AlgebraicNumber::sqrt_of(3)?.scale(&rat(1, 2)),
        _ => return None,
    };
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> impl Strategy<Value = AlgebraicNumber> {
        prop::array::uniform8(-6i64..=6).prop_map(|a| {
            AlgebraicNumber::from_coords(a.map(|n| rat(n, 1 + (n.abs() % 3))))
        })
    }

    #[test]
    fn gram_entries_match_cosines() {
        for k in 2..=6u8 {
            let e = gram_entry(k).unwrap();
            let want = -(std::f64::consts::PI / k as f64).cos();
            assert!((e.to_f64() - want).abs() < 1e-15, "k = {k}");
        }
        assert!(gram_entry(7).is_none());
        assert!(gram_entry(1).is_none());
    }

    #[test]
    fn golden_ratio_satisfies_its_quadratic() {
        // m = 2cos(π/5) satisfies m² − m − 1 = 0.
        let m = -gram_entry(5).unwrap().scale(&rat(2, 1));
        let lhs = &(&(&m * &m) - &m) - &AlgebraicNumber::one();
        assert!(lhs.is_zero());
        let n = -gram_entry(6).unwrap().scale(&rat(2, 1));
        assert_eq!(&n * &n, AlgebraicNumber::from_int(3));
        let l = -gram_entry(4).unwrap().scale(&rat(2, 1));
        assert_eq!(&l * &l, AlgebraicNumber::from_int(2));
    }

    #[test]
    fn sign_of_nearly_cancelling_value() {
        // 1351/780 is a convergent of √3; the difference is about 4.7e-7.
        let d = &AlgebraicNumber::from_ratio(1351, 780) - &AlgebraicNumber::sqrt_of(3).unwrap();
        assert_eq!(d.signum(), Ordering::Greater);
        // Pell-type cancellation: 4478554083/2585706703 against √3 differs by ~1e-19.
        let d = &AlgebraicNumber::from_ratio(4_478_554_083, 2_585_706_703)
            - &AlgebraicNumber::sqrt_of(3).unwrap();
        assert_eq!(d.signum(), Ordering::Less);
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small(), b in small(), c in small()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn inverse_and_sign(a in small(), b in small()) {
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse().unwrap(), AlgebraicNumber::one());
            }
            prop_assert_eq!(a.signum() as i8 * b.signum() as i8, (&a * &b).signum() as i8);
            let f = a.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(a.signum(), f.partial_cmp(&0.0).unwrap());
            }
        }

        #[test]
        fn norm_is_multiplicative(a in small(), b in small()) {
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }
    }
}
