//! Reduction of the rank condition to a nondegenerate 6-facet block.
//!
//! If `G_T` is an invertible principal block of a rank-6 matrix `G`, then
//! `G_RR = G_RT G_T⁻¹ G_TR` and `G` has the inertia of `G_T` plus three
//! zeros. With `G_T` free of unknowns this leaves a small system in the
//! unknowns of `G_TR`.

use num_traits::{One, Zero};

use super::SymbolicGramMatrix;
use crate::algebra::{signature_exact, AlgebraicNumber, Matrix, Poly, Signature, SymbolicEntry};
use crate::combinatorics::{labels, subsets_of_size};

/// Global unknown of a [`SymbolicGramMatrix`]: `x`s first, then `y`s.
pub type UnknownId = usize;

/// A `G_RR` entry that is itself unknown and follows from the others.
#[derive(Clone, Debug)]
pub struct Derived {
    pub unknown: UnknownId,
    /// Entry value as a polynomial in the local variables.
    pub entry: Poly<AlgebraicNumber>,
}

#[derive(Clone, Debug)]
pub struct SchurReduction {
    /// The block facets, 0-based.
    pub t: Vec<usize>,
    pub r: Vec<usize>,
    /// Global unknowns of `G_TR`, in local variable order.
    pub locals: Vec<UnknownId>,
    /// Local variables that are dotted values, the rest are `y`s.
    pub local_dotted: usize,
    /// Polynomials that vanish at every solution.
    pub equations: Vec<Poly<AlgebraicNumber>>,
    pub derived: Vec<Derived>,
    pub block_signature: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionError {
    /// Every candidate block contains an unknown or is singular.
    NoBlock,
}

fn inverse(m: &Matrix<AlgebraicNumber>) -> Option<Matrix<AlgebraicNumber>> {
    let n = m.size();
    let mut a: Vec<Vec<AlgebraicNumber>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        m.get(i, j).clone()
                    } else if j - n == i {
                        AlgebraicNumber::one()
                    } else {
                        AlgebraicNumber::zero()
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        let inv = a[k][k].inverse()?;
        for c in 0..2 * n {
            a[k][c] = &a[k][c] * &inv;
        }
        for r in 0..n {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for c in 0..2 * n {
                let t = &f * &a[k][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    Some(Matrix::from_fn(n, |i, j| a[i][j + n].clone()))
}

impl SchurReduction {
    /// Picks the unknown-free nondegenerate block with the fewest
    /// unknowns in `G_TR`, breaking ties by the number of equations.
    pub fn new(g: &SymbolicGramMatrix) -> Result<Self, ReductionError> {
        let m = g.size();
        let k = m.min(6);
        let unknown = |i: usize, j: usize| !matches!(g.entry(i, j), SymbolicEntry::Known(_));
        let mut candidates: Vec<(usize, usize, Vec<usize>)> = subsets_of_size(m, k)
            .into_iter()
            .filter_map(|mask| {
                let t: Vec<usize> = labels(mask).iter().map(|l| l - 1).collect();
                if t.iter().any(|&i| t.iter().any(|&j| i < j && unknown(i, j))) {
                    return None;
                }
                let r: Vec<usize> = (0..m).filter(|i| !t.contains(i)).collect();
                let cross = r
                    .iter()
                    .map(|&i| t.iter().filter(|&&j| unknown(i, j)).count())
                    .sum::<usize>();
                let known_rr = r
                    .iter()
                    .flat_map(|&i| r.iter().map(move |&j| (i, j)))
                    .filter(|&(i, j)| i < j && !unknown(i, j))
                    .count();
                Some((cross, usize::MAX - known_rr, t))
            })
            .collect();
        candidates.sort();
        for (_, _, t) in candidates {
            let gt = Matrix::from_fn(k, |a, b| {
                g.entry(t[a], t[b]).known().expect("unknown-free block").clone()
            });
            let Some(inv) = inverse(&gt) else {
                continue;
            };
            return Ok(Self::with_block(g, t, &gt, &inv));
        }
        Err(ReductionError::NoBlock)
    }

    fn with_block(
        g: &SymbolicGramMatrix,
        t: Vec<usize>,
        gt: &Matrix<AlgebraicNumber>,
        inv: &Matrix<AlgebraicNumber>,
    ) -> Self {
        let m = g.size();
        let nd = g.dotted().len();
        let r: Vec<usize> = (0..m).filter(|i| !t.contains(i)).collect();
        let global = |e: &SymbolicEntry| match e {
            SymbolicEntry::Known(_) => None,
            SymbolicEntry::Dotted(k) => Some(*k),
            SymbolicEntry::Seven(k) => Some(nd + k),
        };
        let mut locals: Vec<UnknownId> = r
            .iter()
            .flat_map(|&i| t.iter().filter_map(move |&j| global(g.entry(i, j))))
            .collect();
        locals.sort_unstable();
        locals.dedup();
        let n = locals.len();
        let local_dotted = locals.iter().filter(|&&u| u < nd).count();
        let half = AlgebraicNumber::from_ratio(-1, 2);
        let cell = |i: usize, j: usize| -> Poly<AlgebraicNumber> {
            match g.entry(i, j) {
                SymbolicEntry::Known(v) => Poly::constant(n, v.clone()),
                e => {
                    let u = global(e).expect("unknown entry");
                    let v = Poly::var(n, locals.binary_search(&u).expect("local unknown"));
                    if u >= nd {
                        v.scale(&half)
                    } else {
                        v
                    }
                }
            }
        };
        let cols: Vec<Vec<Poly<AlgebraicNumber>>> =
            r.iter().map(|&i| t.iter().map(|&j| cell(i, j)).collect()).collect();
        let inv_col: Vec<Vec<Poly<AlgebraicNumber>>> = cols
            .iter()
            .map(|c| {
                (0..t.len())
                    .map(|a| {
                        (0..t.len()).fold(Poly::zero(n), |acc, b| {
                            &acc + &c[b].scale(inv.get(a, b))
                        })
                    })
                    .collect()
            })
            .collect();
        let schur = |a: usize, b: usize| -> Poly<AlgebraicNumber> {
            (0..t.len()).fold(Poly::zero(n), |acc, k| &acc + &(&cols[a][k] * &inv_col[b][k]))
        };
        let mut equations = Vec::new();
        let mut derived = Vec::new();
        for a in 0..r.len() {
            for b in a..r.len() {
                let s = schur(a, b);
                match g.entry(r[a], r[b]) {
                    SymbolicEntry::Known(v) => {
                        let e = &s - &Poly::constant(n, v.clone());
                        if !e.is_zero() {
                            equations.push(e);
                        }
                    }
                    SymbolicEntry::Dotted(k) => derived.push(Derived { unknown: *k, entry: s }),
                    SymbolicEntry::Seven(k) => derived.push(Derived {
                        unknown: nd + k,
                        entry: s,
                    }),
                }
            }
        }
        Self {
            t,
            r,
            locals,
            local_dotted,
            equations,
            derived,
            block_signature: signature_exact(gt),
        }
    }

    pub fn num_locals(&self) -> usize {
        self.locals.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_block() {
        let g = SymbolicGramMatrix::from_weights(3, &[3, 2, 4]).unwrap();
        let m = g.instantiate(&[]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
    }
}
