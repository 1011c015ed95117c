//! Closed forms for solution values and their exact verification.
//!
//! A value is fitted as `c` or `√c` with `c` in `Q(√5)`, `Q(√2)` or
//! `Q(√3)`. The fitted values are then substituted into the reduced system
//! over the field generated by the radicals, where vanishing is decided
//! exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{AlgebraicNumber, Poly};

/// `value` or `√value`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub value: AlgebraicNumber,
    pub root: bool,
}

impl ClosedForm {
    pub fn to_f64(&self) -> f64 {
        let v = self.value.to_f64();
        if self.root {
            v.sqrt()
        } else {
            v
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root {
            write!(f, "√({})", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

const MAX_DENOMINATOR: i64 = 48;
const MAX_COEFFICIENT: i64 = 256;

/// `v ≈ a + b√d` with small denominators.
fn fit_quadratic(v: f64, d: i64) -> Option<AlgebraicNumber> {
    if !v.is_finite() {
        return None;
    }
    let r = (d as f64).sqrt();
    for den in 1..=MAX_DENOMINATOR {
        let target = v * den as f64;
        let tol = 1e-10 * den as f64 * (1.0 + v.abs());
        let bmax = MAX_COEFFICIENT * den;
        for k in 0..=2 * bmax {
            let b = if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 };
            let rest = target - b as f64 * r;
            let a = rest.round();
            if (rest - a).abs() < tol {
                let q = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(den));
                let sqrt_d = AlgebraicNumber::sqrt_of(d)?;
                return Some(&AlgebraicNumber::from_rational(q(a as i64)) + &sqrt_d.scale(&q(b)));
            }
        }
    }
    None
}

/// Fits a positive value as an element or the square root of an element.
pub fn fit_closed_form(v: f64) -> Option<ClosedForm> {
    if v <= 0.0 {
        return None;
    }
    for d in [5, 2, 3] {
        if let Some(c) = fit_quadratic(v, d) {
            return Some(ClosedForm { value: c, root: false });
        }
        if let Some(c) = fit_quadratic(v * v, d) {
            if c.signum().is_gt() {
                return Some(ClosedForm { value: c, root: true });
            }
        }
    }
    None
}

/// Elements `Σ c_S ∏_{i∈S} √r_i` over the base field.
#[derive(Clone, Debug, PartialEq)]
pub struct Surd {
    terms: BTreeMap<u16, AlgebraicNumber>,
}

impl Surd {
    pub fn base(c: AlgebraicNumber) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mask: u16, c: AlgebraicNumber) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(AlgebraicNumber::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, o: &Surd) -> Surd {
        let mut s = self.clone();
        for (&m, c) in &o.terms {
            s.add_term(m, c.clone());
        }
        s
    }

    pub fn neg(&self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }

    /// The element as a closed form, if it is one.
    pub fn closed_form(&self, field: &SurdField) -> Option<ClosedForm> {
        if self.terms.is_empty() {
            return Some(ClosedForm {
                value: AlgebraicNumber::zero(),
                root: false,
            });
        }
        if let [(&m, c)] = self.terms.iter().collect::<Vec<_>>()[..] {
            if m == 0 {
                return Some(ClosedForm { value: c.clone(), root: false });
            }
            if c.signum().is_lt() {
                return None;
            }
            let value = (0..16)
                .filter(|i| m >> i & 1 == 1)
                .fold(c * c, |acc, i| &acc * &field.radicands[i]);
            return Some(ClosedForm { value, root: true });
        }
        let v = field.to_f64(self);
        let form = fit_closed_form(v)?;
        let sq = field.mul(self, self);
        let target = if form.root { form.value.clone() } else { &form.value * &form.value };
        (sq == Surd::base(target)).then_some(form)
    }
}

/// The radicals adjoined so far.
#[derive(Clone, Debug, Default)]
pub struct SurdField {
    radicands: Vec<AlgebraicNumber>,
}

/// Whether `c` is `w²·m` for `w ∈ Q(√5)` and `m ∈ {1, 2, 3, 6}`; returns
/// `w·√m`.
fn base_sqrt(c: &AlgebraicNumber) -> Option<AlgebraicNumber> {
    let v = c.to_f64();
    if v <= 0.0 {
        return None;
    }
    for m in [1i64, 2, 3, 6] {
        let sm = AlgebraicNumber::sqrt_of(m)?;
        let Some(w) = fit_quadratic((v / m as f64).sqrt(), 5) else {
            continue;
        };
        let cand = &w * &sm;
        if &(&cand * &cand) == c {
            return Some(cand);
        }
    }
    None
}

impl SurdField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn radicands(&self) -> &[AlgebraicNumber] {
        &self.radicands
    }

    /// `√c` for positive `c`, reusing existing radicals where the ratio is a
    /// square in the base field.
    pub fn sqrt(&mut self, c: &AlgebraicNumber) -> Option<Surd> {
        if c.signum().is_le() {
            return None;
        }
        if let Some(w) = base_sqrt(c) {
            return Some(Surd::base(w));
        }
        for (i, r) in self.radicands.iter().enumerate() {
            let ratio = c / r;
            if let Some(w) = base_sqrt(&ratio) {
                let mut s = Surd::base(AlgebraicNumber::zero());
                s.add_term(1 << i, w);
                return Some(s);
            }
        }
        if self.radicands.len() >= 16 {
            return None;
        }
        self.radicands.push(c.clone());
        let mut s = Surd::base(AlgebraicNumber::zero());
        s.add_term(1 << (self.radicands.len() - 1), AlgebraicNumber::from_int(1));
        Some(s)
    }

    pub fn from_form(&mut self, f: &ClosedForm) -> Option<Surd> {
        if f.root {
            self.sqrt(&f.value)
        } else {
            Some(Surd::base(f.value.clone()))
        }
    }

    pub fn mul(&self, a: &Surd, b: &Surd) -> Surd {
        let mut out = Surd::base(AlgebraicNumber::zero());
        for (&ma, ca) in &a.terms {
            for (&mb, cb) in &b.terms {
                let mut c = ca * cb;
                let common = ma & mb;
                for i in 0..16 {
                    if common >> i & 1 == 1 {
                        c = &c * &self.radicands[i];
                    }
                }
                out.add_term(ma ^ mb, c);
            }
        }
        out
    }

    pub fn to_f64(&self, a: &Surd) -> f64 {
        a.terms
            .iter()
            .map(|(&m, c)| {
                (0..16)
                    .filter(|i| m >> i & 1 == 1)
                    .fold(c.to_f64(), |acc, i| acc * self.radicands[i].to_f64().sqrt())
            })
            .sum()
    }

    pub fn eval(&self, p: &Poly<AlgebraicNumber>, point: &[Surd]) -> Surd {
        let mut acc = Surd::base(AlgebraicNumber::zero());
        for (e, c) in p.terms() {
            let mut t = Surd::base(c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = self.mul(&t, &point[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_golden_ratio_and_roots() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let f = fit_closed_form(phi).unwrap();
        assert!(!f.root);
        assert_eq!(f.value, AlgebraicNumber::golden());
        let v = 0.5 * (2.5 + 5f64.sqrt()).sqrt();
        let f = fit_closed_form(v).unwrap();
        assert!(f.root);
        let want = &AlgebraicNumber::from_ratio(5, 8) + &AlgebraicNumber::sqrt_of(5).unwrap().scale(&BigRational::new(1.into(), 4.into()));
        assert_eq!(f.value, want);
        assert!((f.to_f64() - v).abs() < 1e-14);
    }

    #[test]
    fn dependent_radicals_are_merged() {
        let mut k = SurdField::new();
        let a = k.sqrt(&(&AlgebraicNumber::from_ratio(5, 2) + &AlgebraicNumber::sqrt_of(5).unwrap())).unwrap();
        let two_r5 = AlgebraicNumber::sqrt_of(5).unwrap().scale(&BigRational::from_integer(2.into()));
        let b = k.sqrt(&(&AlgebraicNumber::from_int(5) + &two_r5)).unwrap();
        assert_eq!(k.radicands().len(), 1);
        // b = √2 · a
        let r2 = Surd::base(AlgebraicNumber::sqrt_of(2).unwrap());
        assert_eq!(b, k.mul(&r2, &a));
        let sq = k.mul(&a, &a);
        assert_eq!(sq.closed_form(&k).unwrap().value.to_f64(), 2.5 + 5f64.sqrt());
    }
}
