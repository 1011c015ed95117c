//! Facet–vertex incidence of simple polytopes and the facet subsets that
//! drive the filters.
//!
//! Facets are numbered `1..=m` in the public API. Internally a set of facets
//! is a bitmask with facet `i` at bit `i − 1`.

mod census;
mod pattern;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

pub use census::{census, census_polytope, CENSUS_SIZE};
pub use pattern::{find_pattern_embeddings, Pattern};

/// Bitmask over facets, bit `i − 1` for facet `i`.
pub type FacetSet = u16;

pub const MAX_FACETS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("malformed bracket near `{0}`")]
    Malformed(String),
    #[error("facet index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("vertex sets have different sizes ({0} and {1})")]
    NonUniform(usize, usize),
    #[error("vertex {0} is listed twice")]
    DuplicateVertex(String),
    #[error("facet {0} lies on no vertex")]
    UnusedFacet(usize),
    #[error("empty incidence line")]
    Empty,
}

/// Facet labels of a mask, ascending, 1-based.
pub fn labels(mask: FacetSet) -> Vec<usize> {
    (0..MAX_FACETS).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn mask_of(labels: &[usize]) -> FacetSet {
    labels.iter().fold(0, |m, &l| m | 1 << (l - 1))
}

pub fn format_set(mask: FacetSet) -> String {
    let l: Vec<String> = labels(mask).iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", l.join(","))
}

/// All `k`-subsets of `0..m` as masks, ordered by their label lists.
pub fn subsets_of_size(m: usize, k: usize) -> Vec<FacetSet> {
    let mut out: Vec<FacetSet> = (0..1u32 << m)
        .filter(|x| x.count_ones() as usize == k)
        .map(|x| x as FacetSet)
        .collect();
    out.sort_unstable_by_key(|&x| labels(x));
    out
}

/// Simple polytope given by the facet sets of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialPolytope {
    dim: usize,
    num_facets: usize,
    /// Vertex facet sets, sorted lexicographically by ascending label lists.
    vertices: Vec<FacetSet>,
}

impl CombinatorialPolytope {
    pub fn new(
        num_facets: usize,
        vertex_sets: &[Vec<usize>],
    ) -> Result<Self, CombinatoricsError> {
        let Some(first) = vertex_sets.first() else {
            return Err(CombinatoricsError::Empty);
        };
        let dim = first.len();
        if num_facets > MAX_FACETS {
            return Err(CombinatoricsError::IndexOutOfRange(num_facets, MAX_FACETS));
        }
        let mut vertices = Vec::with_capacity(vertex_sets.len());
        for v in vertex_sets {
            if v.len() != dim {
                return Err(CombinatoricsError::NonUniform(dim, v.len()));
            }
            if let Some(&bad) = v.iter().find(|&&i| i == 0 || i > num_facets) {
                return Err(CombinatoricsError::IndexOutOfRange(bad, num_facets));
            }
            let mask = mask_of(v);
            if mask.count_ones() as usize != dim {
                return Err(CombinatoricsError::Malformed(format!("{v:?}")));
            }
            if vertices.contains(&mask) {
                return Err(CombinatoricsError::DuplicateVertex(format_set(mask)));
            }
            vertices.push(mask);
        }
        let used = vertices.iter().fold(0, |a, &v| a | v);
        if let Some(f) = (1..=num_facets).find(|&f| used >> (f - 1) & 1 == 0) {
            return Err(CombinatoricsError::UnusedFacet(f));
        }
        vertices.sort_unstable_by_key(|&v| labels(v));
        Ok(Self {
            dim,
            num_facets,
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.num_facets
    }

    pub fn vertices(&self) -> &[FacetSet] {
        &self.vertices
    }

    /// Whether the facets in `s` meet, i.e. `s` lies in some vertex set.
    pub fn is_face(&self, s: FacetSet) -> bool {
        self.vertices.iter().any(|&v| v & s == s)
    }

    /// Relabels facet `i` as `m + 1 − i`.
    pub fn reversed(&self) -> Self {
        let m = self.num_facets;
        let sets: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|&v| labels(v).into_iter().map(|i| m + 1 - i).collect())
            .collect();
        Self::new(m, &sets).expect("relabelling preserves validity")
    }

    pub fn relabelled(&self, image: &[usize]) -> Self {
        let sets: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|&v| labels(v).into_iter().map(|i| image[i - 1] + 1).collect())
            .collect();
        Self::new(self.num_facets, &sets).expect("relabelling preserves validity")
    }

    /// Incidence line in bracket form, ascending labels.
    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self
            .vertices
            .iter()
            .map(|&v| {
                let l: Vec<String> = labels(v).iter().map(|x| x.to_string()).collect();
                format!("[{}]", l.join(","))
            })
            .collect();
        parts.join(" ")
    }
}

/// Parses a line of bracketed facet lists, one bracket per vertex. The
/// facet count is the largest index that occurs.
pub fn parse_polytope_line(text: &str) -> Result<CombinatorialPolytope, CombinatoricsError> {
    parse_polytope_line_with(text, None)
}

/// As [`parse_polytope_line`], checking indices against a declared facet count.
pub fn parse_polytope_line_with(
    text: &str,
    declared_facets: Option<usize>,
) -> Result<CombinatorialPolytope, CombinatoricsError> {
    let mut sets = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(stripped) = rest.strip_prefix('[') else {
            return Err(CombinatoricsError::Malformed(rest.chars().take(12).collect()));
        };
        let Some(end) = stripped.find(']') else {
            return Err(CombinatoricsError::Malformed(rest.chars().take(12).collect()));
        };
        let body = &stripped[..end];
        let mut v = Vec::new();
        for tok in body.split(',').map(str::trim) {
            let x: usize = tok
                .parse()
                .map_err(|_| CombinatoricsError::Malformed(format!("[{body}]")))?;
            v.push(x);
        }
        sets.push(v);
        rest = stripped[end + 1..].trim_start();
    }
    if sets.is_empty() {
        return Err(CombinatoricsError::Empty);
    }
    let max = sets.iter().flatten().copied().max().unwrap_or(0);
    let m = declared_facets.unwrap_or(max);
    CombinatorialPolytope::new(m, &sets)
}

/// Facet subsets derived from the incidence data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialData {
    pub num_facets: usize,
    pub disjoint_pairs: Vec<FacetSet>,
    pub l4: Vec<FacetSet>,
    pub l5: Vec<FacetSet>,
    /// `(b, S)`: facet `b` (1-based) bounds a simplex facet cut out by `S`.
    pub l5_basis: Vec<(usize, FacetSet)>,
    pub l4_basis: Vec<(usize, FacetSet)>,
    pub s3: Vec<FacetSet>,
    pub s4: Vec<FacetSet>,
    pub s5: Vec<FacetSet>,
    pub e3: Vec<FacetSet>,
    pub e4: Vec<FacetSet>,
    pub e5: Vec<FacetSet>,
    pub se6: Vec<FacetSet>,
    pub se7: Vec<FacetSet>,
    pub i2: Vec<FacetSet>,
    /// Facet permutations preserving the vertex family; `g[i]` is the
    /// 0-based image of facet `i + 1`.
    pub symmetry: Vec<Vec<usize>>,
}

impl CombinatorialData {
    pub fn e(&self, j: usize) -> &[FacetSet] {
        match j {
            3 => &self.e3,
            4 => &self.e4,
            5 => &self.e5,
            6 => &self.se6,
            7 => &self.se7,
            _ => &[],
        }
    }

    pub fn s(&self, j: usize) -> &[FacetSet] {
        match j {
            3 => &self.s3,
            4 => &self.s4,
            5 => &self.s5,
            _ => &[],
        }
    }

    pub fn is_disjoint_pair(&self, i: usize, j: usize) -> bool {
        self.disjoint_pairs.contains(&mask_of(&[i, j]))
    }
}

fn contains_disjoint_pair(s: FacetSet, pairs: &[FacetSet]) -> bool {
    pairs.iter().any(|&p| s & p == p)
}

/// Facet sets of size `k ≤ d` all of whose `(k−1)`-subsets are faces but
/// which are not faces themselves. For `k = d + 1` such a set would be the
/// whole of a simplex, not a sublattice of it.
fn simplex_sublattices(p: &CombinatorialPolytope, k: usize) -> Vec<FacetSet> {
    if k > p.dim {
        return Vec::new();
    }
    subsets_of_size(p.num_facets, k)
        .into_iter()
        .filter(|&s| {
            !p.is_face(s) && labels(s).iter().all(|&f| p.is_face(s & !(1 << (f - 1))))
        })
        .collect()
}

pub fn compute_data(p: &CombinatorialPolytope) -> CombinatorialData {
    let m = p.num_facets;
    let disjoint_pairs: Vec<FacetSet> = subsets_of_size(m, 2)
        .into_iter()
        .filter(|&s| !p.is_face(s))
        .collect();
    let e = |j: usize| -> Vec<FacetSet> {
        subsets_of_size(m, j)
            .into_iter()
            .filter(|&s| !contains_disjoint_pair(s, &disjoint_pairs))
            .collect()
    };
    let (e3, e4, e5, se6, se7) = (e(3), e(4), e(5), e(6), e(7));
    let s = |ej: &[FacetSet]| -> Vec<FacetSet> {
        ej.iter().copied().filter(|&x| !p.is_face(x)).collect()
    };
    let (s3, s4, s5) = (s(&e3), s(&e4), s(&e5));
    let l4 = simplex_sublattices(p, 4);
    let l5 = simplex_sublattices(p, 5);
    let basis = |l: &[FacetSet]| -> Vec<(usize, FacetSet)> {
        let mut out = Vec::new();
        for &sset in l {
            for b in 1..=m {
                let bit = 1 << (b - 1);
                if sset & bit != 0 {
                    continue;
                }
                let at_b: Vec<FacetSet> = p.vertices.iter().copied().filter(|&v| v & bit != 0).collect();
                if !at_b.is_empty() && at_b.iter().all(|&v| (v & !bit) & !sset == 0) {
                    out.push((b, sset));
                }
            }
        }
        out.sort_unstable_by_key(|&(b, s)| (b, labels(s)));
        out
    };
    let l5_basis = if p.dim == 5 { basis(&l5) } else { Vec::new() };
    let l4_basis = if p.dim == 4 { basis(&l4) } else { Vec::new() };
    let i2 = subsets_of_size(m, 4)
        .into_iter()
        .filter(|&s| is_square(s, &disjoint_pairs))
        .collect();
    let symmetry = symmetry_group(p);
    CombinatorialData {
        num_facets: m,
        disjoint_pairs,
        l4,
        l5,
        l5_basis,
        l4_basis,
        s3,
        s4,
        s5,
        e3,
        e4,
        e5,
        se6,
        se7,
        i2,
        symmetry,
    }
}

/// Exactly two disjoint pairs among the six, and they partition the set.
fn is_square(s: FacetSet, pairs: &[FacetSet]) -> bool {
    let inside: Vec<FacetSet> = pairs.iter().copied().filter(|&p| s & p == p).collect();
    inside.len() == 2 && inside[0] & inside[1] == 0
}

/// Facet permutations mapping vertex sets to vertex sets, found by
/// backtracking with facet degrees and pairwise co-occurrence counts as
/// invariants.
pub fn symmetry_group(p: &CombinatorialPolytope) -> Vec<Vec<usize>> {
    let m = p.num_facets;
    let co = |i: usize, j: usize| {
        p.vertices
            .iter()
            .filter(|&&v| v >> i & 1 == 1 && v >> j & 1 == 1)
            .count()
    };
    let table: Vec<Vec<usize>> = (0..m).map(|i| (0..m).map(|j| co(i, j)).collect()).collect();
    let mut sorted = p.vertices.clone();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; m];
    let mut used = vec![false; m];
    fn rec(
        k: usize,
        m: usize,
        table: &[Vec<usize>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        verts: &[FacetSet],
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == m {
            let mut mapped: Vec<FacetSet> = verts
                .iter()
                .map(|&v| (0..m).filter(|&i| v >> i & 1 == 1).fold(0, |a, i| a | 1 << image[i]))
                .collect();
            mapped.sort_unstable();
            if mapped == verts {
                out.push(image.clone());
            }
            return;
        }
        for t in 0..m {
            if used[t] || table[k][k] != table[t][t] {
                continue;
            }
            if (0..k).any(|j| table[j][k] != table[image[j]][t]) {
                continue;
            }
            image[k] = t;
            used[t] = true;
            rec(k + 1, m, table, image, used, verts, out);
            used[t] = false;
        }
        image[k] = usize::MAX;
    }
    rec(0, m, &table, &mut image, &mut used, &sorted, &mut out);
    out.sort();
    out
}

/// Keeps polytopes with at least two disjoint facet pairs, grouped by the
/// number of pairs. Values are indices into `polytopes`.
pub fn filter_by_disjoint_pairs(polytopes: &[CombinatorialPolytope]) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, p) in polytopes.iter().enumerate() {
        let n = subsets_of_size(p.num_facets, 2)
            .into_iter()
            .filter(|&s| !p.is_face(s))
            .count();
        if n >= 2 {
            out.entry(n).or_default().push(k);
        }
    }
    out
}

/// Structured-text dump with a fixed field order.
pub fn dump(index: usize, p: &CombinatorialPolytope, d: &CombinatorialData) -> String {
    let sets = |v: &[FacetSet]| -> String {
        v.iter().map(|&s| format_set(s)).collect::<Vec<_>>().join(" ")
    };
    let basis = |v: &[(usize, FacetSet)]| -> String {
        v.iter()
            .map(|&(b, s)| format!("({b},{})", format_set(s)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "polytope {index}");
    let _ = writeln!(out, "  dim {}", p.dim);
    let _ = writeln!(out, "  facets {}", p.num_facets);
    let _ = writeln!(out, "  vertices {}", p.vertices.len());
    let _ = writeln!(out, "  disjoint_pairs {} : {}", d.disjoint_pairs.len(), sets(&d.disjoint_pairs));
    for (name, v) in [
        ("l4", &d.l4),
        ("l5", &d.l5),
        ("s3", &d.s3),
        ("s4", &d.s4),
        ("s5", &d.s5),
        ("e3", &d.e3),
        ("e4", &d.e4),
        ("e5", &d.e5),
        ("se6", &d.se6),
        ("se7", &d.se7),
        ("i2", &d.i2),
    ] {
        let _ = writeln!(out, "  {name} {} : {}", v.len(), sets(v));
    }
    let _ = writeln!(out, "  l5_basis {} : {}", d.l5_basis.len(), basis(&d.l5_basis));
    let _ = writeln!(out, "  l4_basis {} : {}", d.l4_basis.len(), basis(&d.l4_basis));
    let _ = writeln!(out, "  symmetry {}", d.symmetry.len());
    out
}

impl fmt::Display for CombinatorialPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P322: &str = "[9,8,7,6,5] [9,8,7,6,4] [9,8,7,5,4] [9,8,6,5,4] [9,7,6,5,4] [8,7,6,5,3] \
        [8,7,6,4,3] [8,7,5,4,3] [8,6,5,4,3] [7,6,5,4,2] [7,6,5,3,2] [7,6,4,3,2] [7,5,4,3,2] \
        [6,5,4,3,1] [6,5,4,2,1] [6,5,3,2,1] [6,4,3,2,1] [5,4,3,2,1]";

    #[test]
    fn parse_examples() {
        let p = parse_polytope_line(P322).unwrap();
        assert_eq!((p.dim(), p.num_facets(), p.vertices().len()), (5, 9, 18));
        let s = parse_polytope_line("[1,2,3] [1,2,4] [1,3,4] [2,3,4]").unwrap();
        assert_eq!((s.dim(), s.num_facets(), s.vertices().len()), (3, 4, 4));
        assert!(matches!(
            parse_polytope_line("[1,2,3,4,5] [1,2,3,4]"),
            Err(CombinatoricsError::NonUniform(5, 4))
        ));
        assert!(parse_polytope_line("[1,2,0]").is_err());
        assert!(parse_polytope_line("[1,2,3").is_err());
        assert!(parse_polytope_line_with("[1,2,3] [1,2,4] [1,3,4] [2,3,4]", Some(3)).is_err());
    }

    #[test]
    fn p322_data() {
        let p = parse_polytope_line(P322).unwrap();
        let d = compute_data(&p);
        let pairs: Vec<FacetSet> = [[1, 7], [1, 8], [2, 8], [1, 9], [2, 9], [3, 9]]
            .iter()
            .map(|s| mask_of(s))
            .collect();
        let mut want = pairs.clone();
        want.sort_unstable_by_key(|&s| labels(s));
        assert_eq!(d.disjoint_pairs, want);
        assert_eq!((d.e3.len(), d.e4.len(), d.e5.len()), (50, 45, 21));
        let l5: Vec<FacetSet> = [[2, 3, 4, 5, 6], [3, 4, 5, 6, 7], [4, 5, 6, 7, 8]]
            .iter()
            .map(|s| mask_of(s))
            .collect();
        assert_eq!(d.l5, l5);
        assert_eq!(d.s5, d.l5);
        assert!(d.l4.is_empty());
        assert!(d.i2.is_empty());
        assert_eq!(d.symmetry.len(), 12);
        assert_eq!(
            d.l5_basis,
            vec![(1, mask_of(&[2, 3, 4, 5, 6])), (9, mask_of(&[4, 5, 6, 7, 8]))]
        );
    }

    #[test]
    fn simplex_data() {
        let p = parse_polytope_line("[1,2,3] [1,2,4] [1,3,4] [2,3,4]").unwrap();
        let d = compute_data(&p);
        assert!(d.disjoint_pairs.is_empty());
        assert!(d.s3.is_empty() && d.l4.is_empty() && d.l5.is_empty());
        assert_eq!(d.symmetry.len(), 24);
        assert!(filter_by_disjoint_pairs(&[p]).is_empty());
    }
}
