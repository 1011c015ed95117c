use super::SymbolicGramMatrix;
use crate::algebra::{poly_determinant, AlgebraicNumber, Poly};

/// Rank conditions of a potential Gram matrix: all principal minors one
/// size above the target rank vanish, each scaled by 2.
#[derive(Clone, Debug)]
pub struct RankSystem {
    /// 0-based index sets of the minors.
    pub subsets: Vec<Vec<usize>>,
    pub minors: Vec<Poly<AlgebraicNumber>>,
    /// Number of dotted unknowns; each must be below −1.
    pub dotted: usize,
    /// Number of `y` unknowns; each lies in `(1.8, 2)`.
    pub sevens: usize,
}

impl RankSystem {
    /// Minor values at a point (`x`s then `y`s).
    pub fn residuals(&self, point: &[f64]) -> Vec<f64> {
        self.minors
            .iter()
            .map(|p| p.map(|c| c.to_f64()).eval(point))
            .collect()
    }

    pub fn satisfied_by(&self, point: &[f64], tol: f64) -> bool {
        point[..self.dotted].iter().all(|&x| x < -1.0)
            && point[self.dotted..].iter().all(|&y| super::Y_RANGE.0 < y && y < super::Y_RANGE.1)
            && self.residuals(point).iter().all(|r| r.abs() <= tol)
    }
}

/// For a matrix of size `m` and target rank `rank`, the `C(m, rank+1)`
/// principal minors of size `rank + 1`; 36 for `m = 9`, `rank = 6`.
pub fn rank_conditions(g: &SymbolicGramMatrix, rank: usize) -> RankSystem {
    let m = g.size();
    let n = g.num_unknowns();
    let two = AlgebraicNumber::from_int(2);
    let k = rank + 1;
    let subsets: Vec<Vec<usize>> = crate::combinatorics::subsets_of_size(m, k)
        .into_iter()
        .map(|s| crate::combinatorics::labels(s).iter().map(|l| l - 1).collect())
        .collect();
    let minors = subsets
        .iter()
        .map(|idx| poly_determinant(&g.sub_poly_matrix(idx), n).scale(&two))
        .collect();
    RankSystem {
        subsets,
        minors,
        dotted: g.dotted().len(),
        sevens: g.sevens().len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_system_counts() {
        let g = SymbolicGramMatrix::from_weights(9, &[2; 36]).unwrap();
        let r = rank_conditions(&g, 6);
        assert_eq!(r.minors.len(), 36);
        // The identity has full rank: every minor is the constant 2.
        assert!(r.minors.iter().all(|p| p.as_constant() == Some(AlgebraicNumber::from_int(2))));
    }
}
