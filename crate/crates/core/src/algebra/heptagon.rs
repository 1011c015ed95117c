//! The cubic extension of Q(√2, √3, √5) by `c = cos(π/7)`.
//!
//! `c` is a root of `8c³ − 4c² − 4c + 1`, irreducible over the base field
//! because the base has degree 8 over Q. Only the exact fallback of diagram
//! classification works here; the pipeline otherwise keeps weight 7 symbolic.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{rational, AlgebraicNumber, ExactField};

/// `a₀ + a₁c + a₂c²` with `c = cos(π/7)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Heptagonal {
    a: [AlgebraicNumber; 3],
}

/// `cos(π/7)` in the extension.
pub fn cos_pi_over_7() -> Heptagonal {
    Heptagonal {
        a: [AlgebraicNumber::zero(), AlgebraicNumber::one(), AlgebraicNumber::zero()],
    }
}

impl Heptagonal {
    pub fn from_base(x: AlgebraicNumber) -> Self {
        Self {
            a: [x, AlgebraicNumber::zero(), AlgebraicNumber::zero()],
        }
    }

    /// Matrix of multiplication by `self` in the basis `1, c, c²`.
    fn mult_matrix(&self) -> [[AlgebraicNumber; 3]; 3] {
        let one = Heptagonal::from_base(AlgebraicNumber::one());
        let c = cos_pi_over_7();
        let cc = &c * &c;
        let cols = [self * &one, self * &c, self * &cc];
        let mut m: [[AlgebraicNumber; 3]; 3] = Default::default();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col.a[i].clone();
            }
        }
        m
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let m = self.mult_matrix();
        let det3 = |m: &[[AlgebraicNumber; 3]; 3]| {
            let t = |i: usize, j: usize, k: usize| &(&m[0][i] * &m[1][j]) * &m[2][k];
            let pos = &(&t(0, 1, 2) + &t(1, 2, 0)) + &t(2, 0, 1);
            let neg = &(&t(2, 1, 0) + &t(0, 2, 1)) + &t(1, 0, 2);
            &pos - &neg
        };
        let d = det3(&m);
        let dinv = d.inverse()?;
        // Cramer's rule for m·x = e₀.
        let mut a: [AlgebraicNumber; 3] = Default::default();
        for (j, slot) in a.iter_mut().enumerate() {
            let mut mj = m.clone();
            for (i, row) in mj.iter_mut().enumerate() {
                row[j] = if i == 0 {
                    AlgebraicNumber::one()
                } else {
                    AlgebraicNumber::zero()
                };
            }
            *slot = &det3(&mj) * &dinv;
        }
        Some(Self { a })
    }

    pub fn to_f64(&self) -> f64 {
        let c = (std::f64::consts::PI / 7.0).cos();
        self.a[0].to_f64() + c * (self.a[1].to_f64() + c * self.a[2].to_f64())
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = 64u64;
        loop {
            let (cl, ch) = cos_bracket(bits);
            let terms = [
                self.a[0].enclosure(bits),
                self.a[1].enclosure(bits),
                self.a[2].enclosure(bits),
            ];
            let powers = [
                (BigRational::one(), BigRational::one()),
                (cl.clone(), ch.clone()),
                (&cl * &cl, &ch * &ch),
            ];
            let mut lo = BigRational::zero();
            let mut hi = BigRational::zero();
            for ((tl, th), (pl, ph)) in terms.iter().zip(powers.iter()) {
                let p = [tl * pl, tl * ph, th * pl, th * ph];
                lo += p.iter().min().unwrap();
                hi += p.iter().max().unwrap();
            }
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

/// Rational bracket of `cos(π/7)` of width `2^-bits`, by bisection on
/// `8c³ − 4c² − 4c + 1`, which is increasing on `[0.9, 0.91]`.
fn cos_bracket(bits: u64) -> (BigRational, BigRational) {
    let f = |c: &BigRational| {
        let c2 = c * c;
        let c3 = &c2 * c;
        c3 * BigInt::from(8) - c2 * BigInt::from(4) - c * BigInt::from(4) + BigInt::one()
    };
    let mut lo = rational(9, 10);
    let mut hi = rational(91, 100);
    let width = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let two = BigInt::from(2);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if f(&mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

impl Zero for Heptagonal {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }
}

impl One for Heptagonal {
    fn one() -> Self {
        Self::from_base(AlgebraicNumber::one())
    }
}

impl Add for Heptagonal {
    type Output = Heptagonal;
    fn add(self, rhs: Heptagonal) -> Heptagonal {
        &self + &rhs
    }
}

impl<'a> Add<&'a Heptagonal> for &'a Heptagonal {
    type Output = Heptagonal;
    fn add(self, rhs: &Heptagonal) -> Heptagonal {
        Heptagonal {
            a: [0, 1, 2].map(|i| &self.a[i] + &rhs.a[i]),
        }
    }
}

impl Sub for Heptagonal {
    type Output = Heptagonal;
    fn sub(self, rhs: Heptagonal) -> Heptagonal {
        Heptagonal {
            a: [0, 1, 2].map(|i| &self.a[i] - &rhs.a[i]),
        }
    }
}

impl<'a> Mul<&'a Heptagonal> for &'a Heptagonal {
    type Output = Heptagonal;
    fn mul(self, rhs: &Heptagonal) -> Heptagonal {
        let mut p: [AlgebraicNumber; 5] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                if !self.a[i].is_zero() && !rhs.a[j].is_zero() {
                    p[i + j] += &(&self.a[i] * &rhs.a[j]);
                }
            }
        }
        // c³ = (4c² + 4c − 1)/8 and c⁴ = c·c³ = (4c³ + 4c² − c)/8.
        for k in [4usize, 3] {
            let t = std::mem::take(&mut p[k]);
            if t.is_zero() {
                continue;
            }
            let t8 = t.scale(&rational(1, 8));
            p[k - 1] += &t8.scale(&rational(4, 1));
            p[k - 2] += &t8.scale(&rational(4, 1));
            p[k - 3] -= &t8;
        }
        Heptagonal {
            a: [p[0].clone(), p[1].clone(), p[2].clone()],
        }
    }
}

impl Mul for Heptagonal {
    type Output = Heptagonal;
    fn mul(self, rhs: Heptagonal) -> Heptagonal {
        &self * &rhs
    }
}

impl Neg for Heptagonal {
    type Output = Heptagonal;
    fn neg(self) -> Heptagonal {
        Heptagonal {
            a: self.a.map(|x| -x),
        }
    }
}

impl ExactField for Heptagonal {
    fn from_rational(q: BigRational) -> Self {
        Self::from_base(AlgebraicNumber::from_rational(q))
    }
    fn inverse(&self) -> Option<Self> {
        Heptagonal::inverse(self)
    }
    fn signum(&self) -> Ordering {
        Heptagonal::signum(self)
    }
    fn to_f64(&self) -> f64 {
        Heptagonal::to_f64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_satisfies_its_cubic() {
        let c = cos_pi_over_7();
        let c2 = &c * &c;
        let c3 = &c2 * &c;
        let sum = c3.clone() + c3.clone();
        assert!((c3.to_f64() - (std::f64::consts::PI / 7.0).cos().powi(3)).abs() < 1e-14);
        assert!((sum.to_f64() - 2.0 * c3.to_f64()).abs() < 1e-14);
        let x = Heptagonal::from_base(AlgebraicNumber::sqrt_of(5).unwrap()) - c2;
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Heptagonal::one());
    }

    #[test]
    fn sign_near_cancellation() {
        // 2cos(π/7) ≈ 1.8019377; the bound 1.8 sits just below it.
        let two_c = cos_pi_over_7() + cos_pi_over_7();
        let d = two_c.clone() - Heptagonal::from_rational(rational(9, 5));
        assert_eq!(d.signum(), Ordering::Greater);
        let d = two_c - Heptagonal::from_rational(rational(18_019_378, 10_000_000));
        assert_eq!(d.signum(), Ordering::Less);
    }
}
