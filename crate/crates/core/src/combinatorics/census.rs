//! The 322 combinatorial types of simple 5-polytopes with 9 facets.
//!
//! The data file lists the dual simplicial polytopes with 9 vertices, one
//! per line in the standard census numbering, each bracket the facet set of a
//! vertex with labels descending. The loader relabels facet `i` as `10 − i`
//! so that the vertex order used for pasting is ascending.

use super::{parse_polytope_line, CombinatorialPolytope};

const DATA: &str = include_str!("../../data/simplicial_5d_9v.txt");

pub const CENSUS_SIZE: usize = 322;

pub fn census() -> Vec<CombinatorialPolytope> {
    DATA.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_polytope_line(l).expect("census line").reversed())
        .collect()
}

/// Polytope number `n` (1-based).
pub fn census_polytope(n: usize) -> Option<CombinatorialPolytope> {
    let line = DATA.lines().filter(|l| !l.trim().is_empty()).nth(n.checked_sub(1)?)?;
    Some(parse_polytope_line(line).expect("census line").reversed())
}
