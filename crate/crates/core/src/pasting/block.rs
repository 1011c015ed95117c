use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::Range;

use thiserror::Error;

use super::layout::{ColumnLayout, Row};
use crate::combinatorics::{labels, FacetSet};
use crate::diagram::{num_pairs, unpack, VectorSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("pair ({0},{1}) of chunk {2} is not a layout column")]
    MissingColumn(usize, usize, String),
    #[error("pre-block rank {0} does not match chunk size {1}")]
    RankMismatch(usize, usize),
}

/// Facets at one vertex, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub vertex_index: usize,
    pub facets: FacetSet,
}

impl Chunk {
    pub fn label_pairs(&self) -> Vec<(usize, usize)> {
        let l = labels(self.facets);
        let mut out = Vec::new();
        for a in 0..l.len() {
            for b in a + 1..l.len() {
                out.push((l[a], l[b]));
            }
        }
        out
    }
}

/// Rows over a layout, all sharing the same set of determined columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub determined: Row,
    pub rows: Vec<Row>,
}

impl Block {
    pub fn empty(determined: Row) -> Self {
        Self {
            determined,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Scatters every pre-block vector into the chunk's columns. Rows that
/// contradict a pinned column value are dropped.
pub fn build_block(
    chunk: &Chunk,
    pre_block: &VectorSet,
    layout: &ColumnLayout,
    pins: &[(usize, u8)],
) -> Result<Block, BlockError> {
    let pairs = chunk.label_pairs();
    if num_pairs(pre_block.rank()) != pairs.len() {
        return Err(BlockError::RankMismatch(
            pre_block.rank(),
            labels(chunk.facets).len(),
        ));
    }
    let cols: Vec<usize> = pairs
        .iter()
        .map(|&(a, b)| {
            layout.column(a, b).ok_or_else(|| {
                BlockError::MissingColumn(a, b, crate::combinatorics::format_set(chunk.facets))
            })
        })
        .collect::<Result<_, _>>()?;
    let local_pins: Vec<(usize, u8)> = pins
        .iter()
        .filter_map(|&(c, w)| cols.iter().position(|&x| x == c).map(|k| (k, w)))
        .collect();
    let mut rows = Vec::with_capacity(pre_block.len());
    for &code in pre_block.codes() {
        let w = unpack(code, pairs.len());
        if local_pins.iter().any(|&(k, v)| w[k] != v) {
            continue;
        }
        let row = cols
            .iter()
            .zip(w.iter())
            .fold(0, |r, (&c, &x)| layout.put(r, c, x));
        rows.push(row);
    }
    rows.sort_unstable();
    Ok(Block {
        determined: layout.mask(cols),
        rows,
    })
}

/// Multiplicative hasher for packed rows.
#[derive(Default, Clone, Copy)]
pub struct RowHasher(u64);

impl Hasher for RowHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u128(&mut self, x: u128) {
        let v = (x as u64) ^ ((x >> 64) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 = (self.0 ^ v).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        self.0 ^= self.0 >> 29;
    }
}

pub type RowMap<V> = HashMap<Row, V, BuildHasherDefault<RowHasher>>;

/// Hash index of a block on a linking key.
pub struct JoinIndex {
    key: Row,
    rows: Vec<Row>,
    groups: RowMap<Range<usize>>,
}

impl JoinIndex {
    pub fn new(block: &Block, key: Row) -> Self {
        let mut rows = block.rows.clone();
        rows.sort_unstable_by_key(|&r| (r & key, r));
        let mut groups: RowMap<Range<usize>> = RowMap::default();
        let mut start = 0;
        for k in 1..=rows.len() {
            if k == rows.len() || rows[k] & key != rows[start] & key {
                groups.insert(rows[start] & key, start..k);
                start = k;
            }
        }
        Self {
            key,
            rows,
            groups,
        }
    }

    /// Calls `emit` with every joined row for the probe row `r`.
    #[inline]
    pub fn probe(&self, r: Row, mut emit: impl FnMut(Row)) {
        if let Some(range) = self.groups.get(&(r & self.key)) {
            for &s in &self.rows[range.clone()] {
                emit(r | s);
            }
        }
    }
}

/// Keyed join. Rows agree on the columns determined in both blocks; the
/// result takes each column from whichever side determines it.
pub fn paste(b1: &Block, b2: &Block) -> Block {
    let key = b1.determined & b2.determined;
    let determined = b1.determined | b2.determined;
    let (big, small) = if b1.len() >= b2.len() { (b1, b2) } else { (b2, b1) };
    let index = JoinIndex::new(small, key);
    let mut rows = Vec::new();
    for &r in &big.rows {
        index.probe(r, |x| rows.push(x));
    }
    rows.sort_unstable();
    Block { determined, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        // Columns 12,13,14,15,... with the first rows of the two blocks.
        let layout = ColumnLayout::new(9, &[]);
        let cols = |v: &[u8]| layout.encode(v);
        let d1 = layout.mask(0..6);
        let d2 = layout.mask([0, 1, 2, 3, 6, 7]);
        let b1 = Block {
            determined: d1,
            rows: vec![cols(&[1, 2, 4, 4, 2, 6]), cols(&[1, 2, 4, 5, 2, 6])],
        };
        let b2 = Block {
            determined: d2,
            rows: vec![
                cols(&[1, 2, 4, 4, 0, 0, 1, 7]),
                cols(&[1, 2, 4, 4, 0, 0, 6, 5]),
                cols(&[1, 2, 3, 4, 0, 0, 1, 7]),
            ],
        };
        let out = paste(&b1, &b2);
        let want = vec![cols(&[1, 2, 4, 4, 2, 6, 1, 7]), cols(&[1, 2, 4, 4, 2, 6, 6, 5])];
        assert_eq!(out.rows, want);
        assert!(paste(&b1, &Block::empty(d2)).is_empty());
    }
}
