use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{gram_entry, AlgebraicNumber, Matrix, Poly, SymbolicEntry};
use crate::diagram::{num_pairs, pair_index, INFINITY};
use crate::pasting::{ColumnLayout, Row};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GramError {
    #[error("weight {0} at pair ({1},{2}) is outside 2..7")]
    BadWeight(u8, usize, usize),
    #[error("expected {0} weights, got {1}")]
    Length(usize, usize),
}

/// Gram matrix of a potential vector with unknowns at the diverging pairs
/// and at weight-7 slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicGramMatrix {
    m: usize,
    entries: Vec<SymbolicEntry>,
    /// 0-based facet pairs of the unknowns `x_0, x_1, …`.
    dotted: Vec<(usize, usize)>,
    /// 0-based facet pairs of `y_0, y_1, …`.
    sevens: Vec<(usize, usize)>,
    weights: Vec<u8>,
}

impl SymbolicGramMatrix {
    /// From the upper-triangle weight list, `0` marking a diverging pair.
    pub fn from_weights(m: usize, weights: &[u8]) -> Result<Self, GramError> {
        if weights.len() != num_pairs(m) {
            return Err(GramError::Length(num_pairs(m), weights.len()));
        }
        let mut entries = vec![SymbolicEntry::Known(AlgebraicNumber::zero()); m * m];
        let mut dotted = Vec::new();
        let mut sevens = Vec::new();
        for i in 0..m {
            entries[i * m + i] = SymbolicEntry::Known(AlgebraicNumber::one());
            for j in i + 1..m {
                let w = weights[pair_index(m, i, j)];
                let e = match w {
                    INFINITY => {
                        dotted.push((i, j));
                        SymbolicEntry::Dotted(dotted.len() - 1)
                    }
                    7 => {
                        sevens.push((i, j));
                        SymbolicEntry::Seven(sevens.len() - 1)
                    }
                    _ => SymbolicEntry::Known(
                        gram_entry(w).ok_or(GramError::BadWeight(w, i + 1, j + 1))?,
                    ),
                };
                entries[i * m + j] = e.clone();
                entries[j * m + i] = e;
            }
        }
        Ok(Self {
            m,
            entries,
            dotted,
            sevens,
            weights: weights.to_vec(),
        })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &SymbolicEntry {
        &self.entries[i * self.m + j]
    }

    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> u8 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.weights[pair_index(self.m, a, b)]
    }

    pub fn dotted(&self) -> &[(usize, usize)] {
        &self.dotted
    }

    pub fn sevens(&self) -> &[(usize, usize)] {
        &self.sevens
    }

    /// Unknowns: dotted values first, then the `y`s.
    pub fn num_unknowns(&self) -> usize {
        self.dotted.len() + self.sevens.len()
    }

    /// Entries as polynomials in the unknowns.
    pub fn poly_matrix(&self) -> Vec<Vec<Poly<AlgebraicNumber>>> {
        let n = self.num_unknowns();
        let nd = self.dotted.len();
        let half = AlgebraicNumber::from_ratio(-1, 2);
        (0..self.m)
            .map(|i| {
                (0..self.m)
                    .map(|j| match self.entry(i, j) {
                        SymbolicEntry::Known(v) => Poly::constant(n, v.clone()),
                        SymbolicEntry::Dotted(k) => Poly::var(n, *k),
                        SymbolicEntry::Seven(k) => Poly::var(n, nd + k).scale(&half),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn sub_poly_matrix(&self, idx: &[usize]) -> Vec<Vec<Poly<AlgebraicNumber>>> {
        let full = self.poly_matrix();
        idx.iter()
            .map(|&i| idx.iter().map(|&j| full[i][j].clone()).collect())
            .collect()
    }

    /// The matrix at the given unknown values (`x`s then `y`s).
    pub fn instantiate(&self, values: &[AlgebraicNumber]) -> Matrix<AlgebraicNumber> {
        assert_eq!(values.len(), self.num_unknowns());
        let nd = self.dotted.len();
        let half = BigRational::new((-1).into(), 2.into());
        Matrix::from_fn(self.m, |i, j| match self.entry(i, j) {
            SymbolicEntry::Known(v) => v.clone(),
            SymbolicEntry::Dotted(k) => values[*k].clone(),
            SymbolicEntry::Seven(k) => values[nd + k].scale(&half),
        })
    }

    pub fn instantiate_f64(&self, values: &[f64]) -> Vec<f64> {
        let nd = self.dotted.len();
        let mut g = vec![0.0; self.m * self.m];
        for i in 0..self.m {
            for j in 0..self.m {
                g[i * self.m + j] = match self.entry(i, j) {
                    SymbolicEntry::Known(v) => v.to_f64(),
                    SymbolicEntry::Dotted(k) => values[*k],
                    SymbolicEntry::Seven(k) => -0.5 * values[nd + k],
                };
            }
        }
        g
    }
}

/// Symbolic Gram matrix of a fully determined row.
pub fn symbolize(row: Row, layout: &ColumnLayout) -> Result<SymbolicGramMatrix, GramError> {
    let m = layout.num_facets();
    let mut weights = vec![INFINITY; num_pairs(m)];
    for (c, &(a, b)) in layout.columns().iter().enumerate() {
        weights[pair_index(m, a - 1, b - 1)] = layout.get(row, c);
    }
    SymbolicGramMatrix::from_weights(m, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_angled_has_no_unknowns() {
        let g = SymbolicGramMatrix::from_weights(4, &[2; 6]).unwrap();
        assert_eq!(g.num_unknowns(), 0);
        assert_eq!(g.instantiate(&[]), Matrix::identity(4));
    }

    #[test]
    fn unknown_slots() {
        // 1-2 diverge, 1-3 weight 7.
        let g = SymbolicGramMatrix::from_weights(3, &[0, 7, 3]).unwrap();
        assert_eq!(g.dotted(), &[(0, 1)]);
        assert_eq!(g.sevens(), &[(0, 2)]);
        let m = g.instantiate_f64(&[-2.0, 1.9]);
        assert_eq!((m[1], m[2], m[5]), (-2.0, -0.95, -0.5));
        assert!(SymbolicGramMatrix::from_weights(3, &[1, 2, 2]).is_err());
    }
}
