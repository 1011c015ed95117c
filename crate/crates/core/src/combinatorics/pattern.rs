use super::{labels, subsets_of_size, CombinatorialPolytope, FacetSet};
use crate::diagram::all_permutations;

/// Small simple polytopes whose facet intersection pattern is searched for
/// inside larger ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    /// Triangular prism, 5 facets.
    P3,
    /// Tetrahedral prism, 6 facets.
    P4,
    /// Product of two triangles, 6 facets.
    D4,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::P3, Pattern::P4, Pattern::D4];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::P3 => "P3",
            Pattern::P4 => "P4",
            Pattern::D4 => "D4",
        }
    }

    /// The pattern polytope. Prism bases carry the labels 1 and 2.
    pub fn polytope(self) -> CombinatorialPolytope {
        let sets: Vec<Vec<usize>> = match self {
            Pattern::P3 => [1, 2]
                .iter()
                .flat_map(|&b| [[3, 4], [3, 5], [4, 5]].map(|s| vec![b, s[0], s[1]]))
                .collect(),
            Pattern::P4 => [1, 2]
                .iter()
                .flat_map(|&b| {
                    [[3, 4, 5], [3, 4, 6], [3, 5, 6], [4, 5, 6]]
                        .map(|s| vec![b, s[0], s[1], s[2]])
                })
                .collect(),
            Pattern::D4 => {
                let a = [[1, 2], [1, 3], [2, 3]];
                let b = [[4, 5], [4, 6], [5, 6]];
                a.iter()
                    .flat_map(|x| b.iter().map(move |y| vec![x[0], x[1], y[0], y[1]]))
                    .collect()
            }
        };
        let m = sets.iter().flatten().copied().max().unwrap_or(0);
        CombinatorialPolytope::new(m, &sets).expect("pattern polytope")
    }
}

/// Faces of the complex induced on `u`: subsets of `u` lying in a vertex.
fn induced_faces(p: &CombinatorialPolytope, u: &[usize]) -> Vec<u8> {
    let k = u.len();
    (1u16..1 << k)
        .filter(|&w| {
            let mask: FacetSet = (0..k).filter(|&i| w >> i & 1 == 1).fold(0, |a, i| a | 1 << u[i]);
            p.is_face(mask)
        })
        .map(|w| w as u8)
        .collect()
}

/// Facet subsets of `p` whose mutual intersections form the same pattern as
/// those of the pattern polytope: a subset `W` of the chosen facets meets
/// in `p` exactly when the corresponding facets of the pattern meet.
pub fn find_pattern_embeddings(p: &CombinatorialPolytope, pattern: Pattern) -> Vec<FacetSet> {
    let q = pattern.polytope();
    let k = q.num_facets();
    if p.num_facets() < k {
        return Vec::new();
    }
    let q_units: Vec<usize> = (0..k).collect();
    let mut target = induced_faces(&q, &q_units);
    target.sort_unstable();
    let perms = all_permutations(k);
    let mut out = Vec::new();
    for s in subsets_of_size(p.num_facets(), k) {
        let u: Vec<usize> = labels(s).into_iter().map(|l| l - 1).collect();
        let faces = induced_faces(p, &u);
        if faces.len() != target.len() {
            continue;
        }
        let found = perms.iter().any(|sigma| {
            let mut mapped: Vec<u8> = faces
                .iter()
                .map(|&w| (0..k).filter(|&i| w >> i & 1 == 1).fold(0u8, |a, i| a | 1 << sigma[i]))
                .collect();
            mapped.sort_unstable();
            mapped == target
        });
        if found {
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{compute_data, parse_polytope_line};

    #[test]
    fn pattern_shapes() {
        let p3 = Pattern::P3.polytope();
        assert_eq!((p3.dim(), p3.num_facets(), p3.vertices().len()), (3, 5, 6));
        assert_eq!(compute_data(&p3).disjoint_pairs.len(), 1);
        let p4 = Pattern::P4.polytope();
        assert_eq!((p4.dim(), p4.num_facets(), p4.vertices().len()), (4, 6, 8));
        let d4 = Pattern::D4.polytope();
        assert_eq!((d4.dim(), d4.num_facets(), d4.vertices().len()), (4, 6, 9));
        assert!(compute_data(&d4).disjoint_pairs.is_empty());
        for pat in Pattern::ALL {
            assert_eq!(find_pattern_embeddings(&pat.polytope(), pat).len(), 1);
        }
    }

    #[test]
    fn simplex_has_no_embeddings() {
        let s = parse_polytope_line("[1,2,3] [1,2,4] [1,3,4] [2,3,4]").unwrap();
        for pat in Pattern::ALL {
            assert!(find_pattern_embeddings(&s, pat).is_empty());
        }
    }
}
