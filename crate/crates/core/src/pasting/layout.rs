use crate::combinatorics::{labels, CombinatorialData, CombinatorialPolytope, FacetSet};

/// Packed row: three bits per column, column 0 most significant, so that
/// integer order is lexicographic order. Value 0 means undetermined.
pub type Row = u128;

pub const MAX_COLUMNS: usize = 42;

/// Facet pairs carrying a finite weight, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnLayout {
    m: usize,
    columns: Vec<(usize, usize)>,
    /// `index[i][j]` for 0-based facets `i < j`.
    index: Vec<Vec<Option<usize>>>,
}

impl ColumnLayout {
    pub fn new(m: usize, disjoint_pairs: &[FacetSet]) -> Self {
        let mut columns = Vec::new();
        let mut index = vec![vec![None; m]; m];
        for i in 1..=m {
            for j in i + 1..=m {
                let mask: FacetSet = 1 << (i - 1) | 1 << (j - 1);
                if disjoint_pairs.contains(&mask) {
                    continue;
                }
                index[i - 1][j - 1] = Some(columns.len());
                index[j - 1][i - 1] = Some(columns.len());
                columns.push((i, j));
            }
        }
        assert!(columns.len() <= MAX_COLUMNS, "too many columns");
        Self { m, columns, index }
    }

    pub fn num_facets(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Column pairs, 1-based facet labels.
    pub fn columns(&self) -> &[(usize, usize)] {
        &self.columns
    }

    /// Column of the pair of 1-based facets `a ≠ b`, if they meet.
    pub fn column(&self, a: usize, b: usize) -> Option<usize> {
        self.index[a - 1][b - 1]
    }

    pub fn shift(&self, c: usize) -> u32 {
        3 * (self.columns.len() - 1 - c) as u32
    }

    pub fn get(&self, row: Row, c: usize) -> u8 {
        (row >> self.shift(c) & 7) as u8
    }

    pub fn put(&self, row: Row, c: usize, w: u8) -> Row {
        let s = self.shift(c);
        row & !(7u128 << s) | (w as u128) << s
    }

    /// Field mask covering the given columns.
    pub fn mask(&self, cols: impl IntoIterator<Item = usize>) -> Row {
        cols.into_iter().fold(0, |m, c| m | 7u128 << self.shift(c))
    }

    pub fn decode(&self, row: Row) -> Vec<u8> {
        (0..self.len()).map(|c| self.get(row, c)).collect()
    }

    pub fn encode(&self, values: &[u8]) -> Row {
        values
            .iter()
            .enumerate()
            .fold(0, |r, (c, &w)| self.put(r, c, w))
    }

    /// Columns of the pairs inside a facet subset, in the subset's own
    /// lexicographic pair order; `None` for disjoint pairs.
    pub fn subset_columns(&self, s: FacetSet) -> Vec<Option<usize>> {
        let l = labels(s);
        let mut out = Vec::new();
        for a in 0..l.len() {
            for b in a + 1..l.len() {
                out.push(self.column(l[a], l[b]));
            }
        }
        out
    }

    /// Column map induced by a facet permutation (0-based images).
    pub fn permutation_map(&self, image: &[usize]) -> Option<Vec<usize>> {
        self.columns
            .iter()
            .map(|&(i, j)| self.column(image[i - 1] + 1, image[j - 1] + 1))
            .collect()
    }

    pub fn permute(&self, row: Row, map: &[usize]) -> Row {
        (0..self.len()).fold(0, |r, c| r | ((row >> self.shift(c) & 7) << self.shift(map[c])))
    }

    pub fn format_row(&self, row: Row) -> String {
        self.decode(row)
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Layout of a polytope: all `C(m,2)` pairs minus the disjoint ones.
pub fn column_layout(p: &CombinatorialPolytope, data: &CombinatorialData) -> ColumnLayout {
    ColumnLayout::new(p.num_facets(), &data.disjoint_pairs)
}
