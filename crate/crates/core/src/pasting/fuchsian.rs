use std::collections::{BTreeMap, HashSet};

use super::{run_enumeration, Approach, ColumnLayout, EnumerationConfig, PastingError, Row};
use crate::combinatorics::{
    compute_data, find_pattern_embeddings, labels, CombinatorialPolytope, FacetSet, Pattern,
};
use crate::diagram::{num_pairs, pack, pair_index, unpack, DiagramLibrary, PairPermuter, INFINITY};
use crate::gram::{fuchsian_admissibility, symbolize, Admissibility};

/// Box budget of the admissibility search per vector.
pub const ADMISSIBILITY_BUDGET: usize = 200_000;

/// Restriction set of one pattern.
#[derive(Clone, Debug)]
pub struct FuchsianSet {
    pub pattern: Pattern,
    pub seilper: usize,
    pub admissible: usize,
    /// Admissible vectors that also reach `(n−2, 1, 1)`.
    pub singular: usize,
    pub undecided: usize,
    /// All node relabellings of the admissible vectors, `0` at diverging
    /// pairs.
    pub vectors: HashSet<u64>,
    /// Relabellings keeping the diverging pairs of the pattern in place.
    pub distinct: usize,
}

impl FuchsianSet {
    pub fn rank(&self) -> usize {
        self.pattern.polytope().num_facets()
    }
}

#[derive(Clone, Debug)]
pub struct FuchsianSets {
    pub sets: Vec<FuchsianSet>,
}

impl FuchsianSets {
    pub fn get(&self, p: Pattern) -> &FuchsianSet {
        self.sets.iter().find(|s| s.pattern == p).expect("all patterns built")
    }
}

/// Full pair vector of a row, `0` at pairs outside the layout.
pub fn row_weights(row: Row, layout: &ColumnLayout) -> Vec<u8> {
    let m = layout.num_facets();
    let mut w = vec![INFINITY; num_pairs(m)];
    for (c, &(a, b)) in layout.columns().iter().enumerate() {
        w[pair_index(m, a - 1, b - 1)] = layout.get(row, c);
    }
    w
}

pub fn fuchsian_set(p: Pattern, lib: &DiagramLibrary) -> Result<FuchsianSet, PastingError> {
    let poly = p.polytope();
    let data = compute_data(&poly);
    let cfg = EnumerationConfig {
        id: p.name().to_string(),
        approach: Approach::Direct,
        ..Default::default()
    };
    let e = run_enumeration(&poly, &data, lib, &cfg)?;
    let k = poly.num_facets();
    let perm = PairPermuter::new(k);
    let mut out = FuchsianSet {
        pattern: p,
        seilper: e.rows.len(),
        admissible: 0,
        singular: 0,
        undecided: 0,
        vectors: HashSet::new(),
        distinct: 0,
    };
    for &row in &e.rows {
        let g = symbolize(row, &e.layout).expect("weights in range");
        match fuchsian_admissibility(&g, ADMISSIBILITY_BUDGET) {
            Admissibility::Admissible { signature, singular_nearby, .. } => {
                out.admissible += 1;
                if singular_nearby || signature.zero > 0 {
                    out.singular += 1;
                }
                out.vectors.extend(perm.orbit(pack(&row_weights(row, &e.layout))));
            }
            Admissibility::Rejected => {}
            Admissibility::Undecided => out.undecided += 1,
        }
    }
    let fixed: Vec<usize> = data
        .disjoint_pairs
        .iter()
        .map(|&d| {
            let l = labels(d);
            pair_index(k, l[0] - 1, l[1] - 1)
        })
        .collect();
    let len = num_pairs(k);
    out.distinct = out
        .vectors
        .iter()
        .filter(|&&c| fixed.iter().all(|&i| unpack(c, len)[i] == INFINITY))
        .count();
    Ok(out)
}

pub fn build_fuchsian_sets(lib: &DiagramLibrary) -> Result<FuchsianSets, PastingError> {
    Ok(FuchsianSets {
        sets: Pattern::ALL
            .iter()
            .map(|&p| fuchsian_set(p, lib))
            .collect::<Result<_, _>>()?,
    })
}

/// Saving conditions from the pattern embeddings of one polytope.
pub struct IntersectionFilter<'a> {
    checks: Vec<(Vec<Option<u32>>, &'a HashSet<u64>)>,
    pub counts: BTreeMap<Pattern, usize>,
}

impl<'a> IntersectionFilter<'a> {
    pub fn new(
        p: &CombinatorialPolytope,
        layout: &ColumnLayout,
        sets: &'a FuchsianSets,
    ) -> Self {
        let mut checks = Vec::new();
        let mut counts = BTreeMap::new();
        for pat in Pattern::ALL {
            let emb: Vec<FacetSet> = find_pattern_embeddings(p, pat);
            counts.insert(pat, emb.len());
            for u in emb {
                let shifts = layout
                    .subset_columns(u)
                    .into_iter()
                    .map(|c| c.map(|c| layout.shift(c)))
                    .collect();
                checks.push((shifts, &sets.get(pat).vectors));
            }
        }
        Self { checks, counts }
    }

    pub fn keeps(&self, row: Row) -> bool {
        self.checks.iter().all(|(shifts, set)| {
            let code = shifts
                .iter()
                .fold(0u64, |c, s| c << 3 | s.map_or(0, |s| (row >> s & 7) as u64));
            set.contains(&code)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

/// Keeps the rows whose restriction to every embedded pattern lies in the
/// pattern's restriction set.
pub fn apply_intersection_filter(
    rows: &[Row],
    p: &CombinatorialPolytope,
    layout: &ColumnLayout,
    sets: &FuchsianSets,
) -> Vec<Row> {
    let f = IntersectionFilter::new(p, layout, sets);
    rows.iter().copied().filter(|&r| f.keeps(r)).collect()
}

/// Embeddings per pattern, as facet label lists.
pub fn embeddings(p: &CombinatorialPolytope) -> Vec<(Pattern, Vec<Vec<usize>>)> {
    Pattern::ALL
        .iter()
        .map(|&pat| {
            (
                pat,
                find_pattern_embeddings(p, pat)
                    .into_iter()
                    .map(labels)
                    .collect(),
            )
        })
        .collect()
}
