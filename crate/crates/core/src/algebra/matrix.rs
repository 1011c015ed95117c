use std::cmp::Ordering;

use thiserror::Error;

use super::{ExactField, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("index {0} out of range for a {1}x{1} matrix")]
    IndexOutOfRange(usize, usize),
    #[error("matrix of size {0} has no principal submatrix of size {1} that is positive definite")]
    NoPositiveWitness(usize, usize),
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Clone> Matrix<F> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.n + j] = v;
    }

    pub fn submatrix(&self, idx: &[usize]) -> Result<Self, MatrixError> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n) {
            return Err(MatrixError::IndexOutOfRange(bad, self.n));
        }
        Ok(Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone()))
    }

    pub fn map<G: Clone>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<F: ExactField> Matrix<F> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(F::zero(), |acc, k| {
                acc + self.get(i, k).clone() * other.get(k, j).clone()
            })
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn determinant(&self) -> F {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = F::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
                return F::zero();
            };
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let piv = a[k * n + k].clone();
            let inv = piv.inverse().expect("nonzero pivot");
            det = det * piv;
            for r in k + 1..n {
                if a[r * n + k].is_zero() {
                    continue;
                }
                let f = a[r * n + k].clone() * inv.clone();
                for c in k..n {
                    let t = f.clone() * a[k * n + c].clone();
                    a[r * n + c] = a[r * n + c].clone() - t;
                }
            }
        }
        det
    }
}

/// Inertia by symmetric elimination (congruence), exact pivots.
///
/// A nonzero diagonal entry is used as a 1×1 pivot; if the remaining
/// diagonal vanishes but an off-diagonal entry `b` does not, the block
/// `[[0, b], [b, 0]]` is a 2×2 pivot contributing one positive and one
/// negative eigenvalue.
pub fn signature_exact<F: ExactField>(m: &Matrix<F>) -> Signature {
    let n = m.n;
    let mut a = m.data.clone();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut sig = Signature::new(0, 0, 0);
    while !alive.is_empty() {
        if let Some(pos) = alive.iter().position(|&k| !a[k * n + k].is_zero()) {
            let k = alive.remove(pos);
            let p = a[k * n + k].clone();
            match p.signum() {
                Ordering::Greater => sig.pos += 1,
                _ => sig.neg += 1,
            }
            let inv = p.inverse().expect("nonzero pivot");
            for &i in &alive {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let f = a[i * n + k].clone() * inv.clone();
                for &j in &alive {
                    let t = f.clone() * a[k * n + j].clone();
                    a[i * n + j] = a[i * n + j].clone() - t;
                }
            }
            continue;
        }
        let pair = alive.iter().enumerate().find_map(|(x, &k)| {
            alive[x + 1..]
                .iter()
                .find(|&&l| !a[k * n + l].is_zero())
                .map(|&l| (k, l))
        });
        let Some((k, l)) = pair else {
            sig.zero += alive.len();
            break;
        };
        alive.retain(|&i| i != k && i != l);
        sig.pos += 1;
        sig.neg += 1;
        let binv = a[k * n + l].inverse().expect("nonzero pivot");
        let rows: Vec<(F, F)> = alive
            .iter()
            .map(|&i| (a[i * n + k].clone(), a[i * n + l].clone()))
            .collect();
        for (x, &i) in alive.iter().enumerate() {
            for (y, &j) in alive.iter().enumerate() {
                let t = (rows[x].0.clone() * rows[y].1.clone()
                    + rows[x].1.clone() * rows[y].0.clone())
                    * binv.clone();
                a[i * n + j] = a[i * n + j].clone() - t;
            }
        }
    }
    sig
}

/// Floating-point inertia by pivoted symmetric elimination. Returns `None`
/// when a pivot, or the whole remaining block, falls below `tol` in
/// magnitude, so that the caller can fall back to exact arithmetic.
pub fn inertia_f64(m: &[f64], n: usize, tol: f64) -> Option<Signature> {
    let mut a = m.to_vec();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut sig = Signature::new(0, 0, 0);
    while !alive.is_empty() {
        let (dpos, dmax) = alive
            .iter()
            .enumerate()
            .map(|(x, &k)| (x, a[k * n + k].abs()))
            .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        let mut omax = 0.0;
        let mut opair = (0, 0);
        for (x, &k) in alive.iter().enumerate() {
            for &l in &alive[x + 1..] {
                let v = a[k * n + l].abs();
                if v > omax {
                    omax = v;
                    opair = (k, l);
                }
            }
        }
        // Bunch–Kaufman style choice between 1×1 and 2×2 pivots.
        if dmax >= tol && dmax >= 0.6404 * omax {
            let k = alive.remove(dpos);
            let p = a[k * n + k];
            if p > 0.0 {
                sig.pos += 1
            } else {
                sig.neg += 1
            }
            for &i in &alive {
                let f = a[i * n + k] / p;
                if f == 0.0 {
                    continue;
                }
                for &j in &alive {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
            continue;
        }
        if omax < tol {
            return None;
        }
        let (k, l) = opair;
        let (e00, e01, e11) = (a[k * n + k], a[k * n + l], a[l * n + l]);
        let det = e00 * e11 - e01 * e01;
        if det.abs() < tol * tol {
            return None;
        }
        if det < 0.0 {
            sig.pos += 1;
            sig.neg += 1;
        } else if e00 + e11 > 0.0 {
            sig.pos += 2;
        } else {
            sig.neg += 2;
        }
        alive.retain(|&i| i != k && i != l);
        let rows: Vec<(f64, f64)> = alive
            .iter()
            .map(|&i| (a[i * n + k], a[i * n + l]))
            .collect();
        for (x, &i) in alive.iter().enumerate() {
            let (u0, u1) = rows[x];
            let w0 = (e11 * u0 - e01 * u1) / det;
            let w1 = (e00 * u1 - e01 * u0) / det;
            for (y, &j) in alive.iter().enumerate() {
                a[i * n + j] -= w0 * rows[y].0 + w1 * rows[y].1;
            }
        }
    }
    Some(sig)
}

/// Exact determinant of the principal submatrix on `idx`.
pub fn principal_minor<F: ExactField>(m: &Matrix<F>, idx: &[usize]) -> Result<F, MatrixError> {
    Ok(m.submatrix(idx)?.determinant())
}

/// Outcome of the two-coefficient signature test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharpolyDecision {
    Accepted(Signature),
    Rejected,
}

/// Decides between signatures `(n−1, 1)` and `(n−2, 1, 1)` from the two
/// lowest coefficients of `det(M + xI)`, given that `M` has at least `n − 2`
/// positive eigenvalues.
///
/// The precondition is checked by finding a positive definite principal
/// submatrix of size `n − 2` (Cauchy interlacing).
pub fn charpoly_signature_test<F: ExactField>(
    m: &Matrix<F>,
) -> Result<CharpolyDecision, MatrixError> {
    let n = m.size();
    let need = n.saturating_sub(2);
    let witness = (0..n).any(|i| {
        (i + 1..n).any(|j| {
            let idx: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
            m.submatrix(&idx)
                .map(|s| signature_exact(&s).pos == need)
                .unwrap_or(false)
        })
    });
    if !witness && n >= 2 {
        return Err(MatrixError::NoPositiveWitness(n, need));
    }
    let c0 = m.determinant();
    match c0.signum() {
        Ordering::Less => return Ok(CharpolyDecision::Accepted(Signature::new(n - 1, 1, 0))),
        Ordering::Greater => return Ok(CharpolyDecision::Rejected),
        Ordering::Equal => {}
    }
    let c1 = (0..n).fold(F::zero(), |acc, i| {
        let idx: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        acc + m.submatrix(&idx).expect("in range").determinant()
    });
    if c1.signum() == Ordering::Less {
        Ok(CharpolyDecision::Accepted(Signature::new(n - 2, 1, 1)))
    } else {
        Ok(CharpolyDecision::Rejected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gram_entry, AlgebraicNumber};
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn diag(v: &[i64]) -> Matrix<AlgebraicNumber> {
        Matrix::from_fn(v.len(), |i, j| {
            if i == j {
                AlgebraicNumber::from_int(v[i])
            } else {
                AlgebraicNumber::zero()
            }
        })
    }

    fn path_gram(n: usize) -> Matrix<AlgebraicNumber> {
        Matrix::from_fn(n, |i, j| {
            if i == j {
                AlgebraicNumber::one()
            } else if i.abs_diff(j) == 1 {
                gram_entry(3).unwrap()
            } else {
                AlgebraicNumber::zero()
            }
        })
    }

    #[test]
    fn identity_signature() {
        let m = Matrix::<AlgebraicNumber>::identity(9);
        assert_eq!(signature_exact(&m), Signature::new(9, 0, 0));
        assert_eq!(principal_minor(&m, &[0, 4, 8]).unwrap(), AlgebraicNumber::one());
    }

    #[test]
    fn small_minors() {
        let m = path_gram(2);
        assert_eq!(m.determinant(), AlgebraicNumber::from_ratio(3, 4));
        // det A_n = (n + 1) / 2^n.
        assert_eq!(path_gram(5).determinant(), AlgebraicNumber::from_ratio(3, 16));
        assert!(principal_minor(&m, &[0, 2]).is_err());
    }

    #[test]
    fn affine_a4_is_degenerate() {
        let m = Matrix::from_fn(5, |i, j| {
            if i == j {
                AlgebraicNumber::one()
            } else if (i + 1) % 5 == j || (j + 1) % 5 == i {
                gram_entry(3).unwrap()
            } else {
                AlgebraicNumber::zero()
            }
        });
        assert_eq!(signature_exact(&m), Signature::new(4, 0, 1));
    }

    #[test]
    fn zero_diagonal_uses_block_pivots() {
        let m = Matrix::from_fn(3, |i, j| {
            AlgebraicNumber::from_int(if i != j && (i == 0 || j == 0) { 1 } else { 0 })
        });
        assert_eq!(signature_exact(&m), Signature::new(1, 1, 1));
        let raw: Vec<f64> = (0..9).map(|k| m.get(k / 3, k % 3).to_f64()).collect();
        assert_eq!(inertia_f64(&raw, 3, 1e-9), None);
    }

    #[test]
    fn charpoly_examples() {
        let m = diag(&[1, 1, 1, 1, 1, -1]);
        assert_eq!(
            charpoly_signature_test(&m).unwrap(),
            CharpolyDecision::Accepted(Signature::new(5, 1, 0))
        );
        let m = diag(&[1, 1, 1, 1, 1, 0]);
        assert_eq!(charpoly_signature_test(&m).unwrap(), CharpolyDecision::Rejected);
        let m = diag(&[1, 1, 1, 1, -1, 0]);
        assert_eq!(
            charpoly_signature_test(&m).unwrap(),
            CharpolyDecision::Accepted(Signature::new(4, 1, 1))
        );
        let m = diag(&[1, 1, 1, -1, -1, -1]);
        assert!(charpoly_signature_test(&m).is_err());
    }

    fn small_sym(n: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-3i64..=3, n * n)
    }

    fn to_matrix(n: usize, v: &[i64]) -> Matrix<AlgebraicNumber> {
        Matrix::from_fn(n, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            let x = AlgebraicNumber::from_int(v[a * n + b]);
            if (a + b) % 3 == 0 {
                x * AlgebraicNumber::sqrt_of(5).unwrap()
            } else {
                x
            }
        })
    }

    proptest! {
        #[test]
        fn congruence_invariance(v in small_sym(5), s in prop::collection::vec(-2i64..=2, 10)) {
            let m = to_matrix(5, &v);
            // Unit upper-triangular integer matrix is unimodular.
            let mut k = 0;
            let sm = Matrix::from_fn(5, |i, j| {
                if i == j {
                    AlgebraicNumber::one()
                } else if i < j {
                    k += 1;
                    AlgebraicNumber::from_int(s[k - 1])
                } else {
                    AlgebraicNumber::zero()
                }
            });
            let c = sm.transpose().mul(&m).mul(&sm);
            prop_assert_eq!(signature_exact(&c), signature_exact(&m));
        }

        #[test]
        fn float_and_exact_agree(v in small_sym(5)) {
            let m = to_matrix(5, &v);
            let raw: Vec<f64> = (0..25).map(|k| m.get(k / 5, k % 5).to_f64()).collect();
            if let Some(sig) = inertia_f64(&raw, 5, 1e-9) {
                prop_assert_eq!(sig, signature_exact(&m));
            }
        }

        #[test]
        fn sylvester(v in small_sym(4)) {
            let m = to_matrix(4, &v);
            if signature_exact(&m).is_positive_definite() {
                for mask in 1u32..16 {
                    let idx: Vec<usize> = (0..4).filter(|&i| mask >> i & 1 == 1).collect();
                    prop_assert!(principal_minor(&m, &idx).unwrap().signum() == Ordering::Greater);
                }
            }
        }
    }
}
