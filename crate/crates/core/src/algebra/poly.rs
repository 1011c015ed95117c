use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Coefficient ring for [`Poly`].
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

pub type Monomial = Vec<u8>;

/// Sparse multivariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, C::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().expect("one term");
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree_in(&self, var: usize) -> u8 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Whether the variable occurs.
    pub fn depends_on(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut p = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), f(v));
        }
        p
    }

    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut powers: Vec<Vec<C>> = Vec::with_capacity(self.nvars);
        for (i, x) in point.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut v = vec![C::one()];
            for k in 0..d {
                let next = v[k].clone() * x.clone();
                v.push(next);
            }
            powers.push(v);
        }
        self.terms.iter().fold(C::zero(), |acc, (e, c)| {
            let t = e
                .iter()
                .enumerate()
                .fold(c.clone(), |t, (i, &k)| if k == 0 { t } else { t * powers[i][k as usize].clone() });
            acc + t
        })
    }

    /// Partial derivative; `from_int` embeds the exponent.
    pub fn derivative(&self, var: usize, from_int: impl Fn(i64) -> C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[var] -= 1;
            p.add_term(f, c.clone() * from_int(e[var] as i64));
        }
        p
    }

    /// Substitutes `var = value`, keeping the variable count.
    pub fn substitute(&self, var: usize, value: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[var];
            f[var] = 0;
            let mut t = c.clone();
            for _ in 0..k {
                t = t * value.clone();
            }
            p.add_term(f, t);
        }
        p
    }

    /// `s^d · p(…, a/s, …)` for `d = degree_in(var)`, as a polynomial in
    /// `s` occupying the same slot.
    pub fn reciprocal_in(&self, var: usize, a: &C) -> Self {
        let d = self.degree_in(var);
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[var];
            f[var] = d - k;
            let mut t = c.clone();
            for _ in 0..k {
                t = t * a.clone();
            }
            p.add_term(f, t);
        }
        p
    }
}

impl<C: Coefficient> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: &Poly<C>) -> Poly<C> {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<C: Coefficient> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: &Poly<C>) -> Poly<C> {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<C: Coefficient> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.clone() * c2.clone());
            }
        }
        p
    }
}

impl<C: Coefficient> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.map(|c| -c.clone())
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion,
/// memoised over column subsets.
pub fn poly_determinant<C: Coefficient>(m: &[Vec<Poly<C>>], nvars: usize) -> Poly<C> {
    let n = m.len();
    if n == 0 {
        return Poly::constant(nvars, C::one());
    }
    // memo[S] = det of rows n-|S|.. with columns S.
    let mut memo: Vec<Option<Poly<C>>> = vec![None; 1 << n];
    memo[0] = Some(Poly::constant(nvars, C::one()));
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for s in 1usize..1 << n {
        by_size[s.count_ones() as usize].push(s);
    }
    for (k, sets) in by_size.iter().enumerate().skip(1) {
        let row = n - k;
        for &s in sets {
            let mut acc = Poly::zero(nvars);
            let mut sign_pos = true;
            for j in 0..n {
                if s >> j & 1 == 0 {
                    continue;
                }
                let e = &m[row][j];
                if !e.is_zero() {
                    let rest = memo[s & !(1 << j)].as_ref().expect("smaller subset");
                    if !rest.is_zero() {
                        let t = e * rest;
                        acc = if sign_pos { &acc + &t } else { &acc - &t };
                    }
                }
                sign_pos = !sign_pos;
            }
            memo[s] = Some(acc);
        }
    }
    memo[(1 << n) - 1].take().expect("full set")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly<f64> {
        Poly::var(2, i)
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = &(&x(0) * &x(0)) - &Poly::constant(2, 2.0);
        assert_eq!(p.eval(&[3.0, 0.0]), 7.0);
        assert_eq!(p.degree_in(0), 2);
        assert!(!p.depends_on(1));
        let q = &p + &(-&p);
        assert!(q.is_zero());
        let d = p.derivative(0, |k| k as f64);
        assert_eq!(d.eval(&[5.0, 1.0]), 10.0);
    }

    #[test]
    fn reciprocal_substitution() {
        // p = 1 + 3x + 2x², s²·p(-1/s) = s² - 3s + 2.
        let p = Poly::from_terms(1, [(vec![0], 1.0), (vec![1], 3.0), (vec![2], 2.0)]);
        let r = p.reciprocal_in(0, &-1.0);
        for s in [0.3f64, 0.7, 2.0] {
            assert!((r.eval(&[s]) - s * s * p.eval(&[-1.0 / s])).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_matches_numeric() {
        let c = |v: f64| Poly::constant(2, v);
        let m = vec![
            vec![c(1.0), x(0), c(0.5)],
            vec![x(0), c(1.0), x(1)],
            vec![c(0.5), x(1), c(1.0)],
        ];
        let d = poly_determinant(&m, 2);
        let (a, b) = (-1.3, 0.4);
        let want = 1.0 * (1.0 - b * b) - a * (a - 0.5 * b) + 0.5 * (a * b - 0.5);
        assert!((d.eval(&[a, b]) - want).abs() < 1e-12);
        assert_eq!(d.degree_in(0), 2);
    }
}
