//! Simplicial prisms with an orthogonal end, and their gluing onto the
//! orthogonal simplex facets of basis certificates.
//!
//! Gluing a prism along its orthogonal end replaces the simplex facet `b`
//! by the far end of the prism. The sides continue the five facets around
//! `b`, so the combinatorial type is unchanged and only the row of `b`
//! changes. Lengths of the glued matrix are solved again from scratch.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::{
    labels, subsets_of_size, symmetry_group, CombinatorialData, CombinatorialPolytope, FacetSet,
};
use crate::diagram::{
    all_permutations, classify, num_pairs, pair_index, Class, DiagramLibrary, WeightedGraph,
};
use crate::gram::{
    solve_and_certify, symbolize, GramCertificate, SolveOptions, SymbolicGramMatrix,
};
use crate::pasting::{run_enumeration, Approach, BasisPins, EnumerationConfig};

#[derive(Debug, Error)]
pub enum GluingError {
    #[error("facet {0} is not orthogonal to its simplex neighbours")]
    NotOrthogonal(usize),
    #[error("no diagram isomorphism between the simplex ends")]
    NoMatch,
    #[error("enumeration failed: {0}")]
    Enumeration(String),
}

/// Simplex × interval of dimension `d`: ends 1 and 2, sides `3..=d+2`.
pub fn simplicial_prism(d: usize) -> CombinatorialPolytope {
    let sets: Vec<Vec<usize>> = [1, 2]
        .iter()
        .flat_map(|&e| {
            subsets_of_size(d, d - 1).into_iter().map(move |mask| {
                let mut v = vec![e];
                v.extend(labels(mask).iter().map(|&k| k + 2));
                v
            })
        })
        .collect();
    CombinatorialPolytope::new(d + 2, &sets).expect("prism polytope")
}

#[derive(Clone, Debug)]
pub struct OrthogonalPrism {
    pub certificate: GramCertificate,
    /// 0-based facets.
    pub orthogonal: usize,
    pub far: usize,
    pub sides: Vec<usize>,
    /// Diagram of the sides, which bound the orthogonal end.
    pub base_diagram: WeightedGraph,
}

impl OrthogonalPrism {
    /// `cosh` of the distance between the two ends.
    pub fn length(&self) -> f64 {
        self.certificate.dotted[0].cosh
    }

    fn far_weight(&self, side: usize) -> u32 {
        self.certificate.weight(self.far, self.sides[side])
    }
}

#[derive(Clone, Debug, Default)]
pub struct PrismCatalog {
    pub prisms: Vec<OrthogonalPrism>,
    /// Potential vectors of the prism.
    pub seilper: usize,
    pub undecided: Vec<String>,
}

fn is_orthogonal_end(c: &GramCertificate, end: usize, sides: &[usize]) -> bool {
    sides.iter().all(|&s| c.weight(end, s) == 2)
}

fn small_weights(c: &GramCertificate, nodes: &[usize]) -> Option<WeightedGraph> {
    let w: Option<Vec<u8>> = nodes
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| nodes[a + 1..].iter().map(move |&j| c.weight(i, j)))
        .map(|k| u8::try_from(k).ok().filter(|&k| k <= 6))
        .collect();
    WeightedGraph::new(nodes.len(), w?).ok()
}

/// Compact 5-dimensional simplicial prisms with one end orthogonal to all
/// sides, one per certified solution.
pub fn enumerate_orthogonal_prisms(
    lib: &DiagramLibrary,
    opts: &SolveOptions,
) -> Result<PrismCatalog, GluingError> {
    let p = simplicial_prism(5);
    let data = crate::combinatorics::compute_data(&p);
    let cfg = EnumerationConfig {
        id: "prism5".into(),
        approach: Approach::Basis,
        basis_pins: BasisPins::First,
        ..Default::default()
    };
    let e = run_enumeration(&p, &data, lib, &cfg)
        .map_err(|err| GluingError::Enumeration(err.to_string()))?;
    let sides: Vec<usize> = (2..7).collect();
    let results: Vec<_> = e
        .rows
        .par_iter()
        .map(|&r| {
            let g = symbolize(r, &e.layout).expect("determined row");
            solve_and_certify(&g, &p, opts)
        })
        .collect();
    let mut catalog = PrismCatalog {
        seilper: e.rows.len(),
        ..Default::default()
    };
    for (k, res) in results.into_iter().enumerate() {
        if let Some(u) = res.undecided {
            catalog.undecided.push(format!("prism vector {}: {u}", k + 1));
        }
        for c in res.certificates {
            let Some(base_diagram) = small_weights(&c, &sides) else {
                continue;
            };
            if classify(&base_diagram).ok() != Some(Class::Lanner) {
                continue;
            }
            for (orthogonal, far) in [(0, 1), (1, 0)] {
                if is_orthogonal_end(&c, orthogonal, &sides) {
                    catalog.prisms.push(OrthogonalPrism {
                        certificate: c.clone(),
                        orthogonal,
                        far,
                        sides: sides.clone(),
                        base_diagram: base_diagram.clone(),
                    });
                    break;
                }
            }
        }
    }
    Ok(catalog)
}

/// A 9-facet (in general `m`-facet) candidate built from a certificate and
/// a prism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GluedCandidate {
    /// Upper-triangle weights, `0` at diverging pairs, `7` at unresolved
    /// weights of at least 7.
    pub weights: Vec<u8>,
    /// 0-based glued facet.
    pub facet: usize,
    pub prism: usize,
}

impl GluedCandidate {
    pub fn size(&self) -> usize {
        let n = self.weights.len();
        (1..).find(|m| num_pairs(*m) == n).expect("triangular length")
    }
}

/// Isomorphisms from the diagram on `simplex` to the prism's side
/// diagram: `map[k]` is the prism side matched with `simplex[k]`.
fn isomorphisms(c: &GramCertificate, simplex: &[usize], prism: &OrthogonalPrism) -> Vec<Vec<usize>> {
    let n = simplex.len();
    all_permutations(n)
        .into_iter()
        .filter(|s| {
            (0..n).all(|a| {
                (a + 1..n).all(|b| {
                    c.weight(simplex[a], simplex[b])
                        == prism.base_diagram.weight(s[a], s[b]) as u32
                })
            })
        })
        .collect()
}

/// Glues `prism` onto the simplex facet `facet` bounded by `simplex`.
pub fn glue(
    c: &GramCertificate,
    facet: usize,
    simplex: FacetSet,
    prism: &OrthogonalPrism,
    prism_index: usize,
) -> Result<Vec<GluedCandidate>, GluingError> {
    let simplex: Vec<usize> = labels(simplex).iter().map(|l| l - 1).collect();
    if !is_orthogonal_end(c, facet, &simplex) {
        return Err(GluingError::NotOrthogonal(facet + 1));
    }
    let maps = isomorphisms(c, &simplex, prism);
    if maps.is_empty() {
        return Err(GluingError::NoMatch);
    }
    let m = c.size;
    let base: Vec<u8> = c.weights.iter().map(|&k| k.min(7) as u8).collect();
    let out: BTreeSet<GluedCandidate> = maps
        .iter()
        .map(|map| {
            let mut weights = base.clone();
            for (k, &s) in simplex.iter().enumerate() {
                let (a, b) = if facet < s { (facet, s) } else { (s, facet) };
                weights[pair_index(m, a, b)] = prism.far_weight(map[k]).min(7) as u8;
            }
            GluedCandidate {
                weights,
                facet,
                prism: prism_index,
            }
        })
        .collect();
    Ok(out.into_iter().collect())
}

/// Orbit-invariant form of a certificate: weights with `cosh` values at
/// diverging pairs, minimised over the symmetry group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<i64>);

/// Resolution of `cosh` values in [`CanonicalKey`].
const KEY_SCALE: f64 = 1e8;

pub fn canonical_key(c: &GramCertificate, group: &[Vec<usize>]) -> CanonicalKey {
    let m = c.size;
    let mut value = vec![0i64; num_pairs(m)];
    let mut dotted = c.dotted.iter();
    for i in 0..m {
        for j in i + 1..m {
            let w = c.weight(i, j);
            value[pair_index(m, i, j)] = if w == 0 {
                let d = dotted.next().expect("dotted pairs in order");
                -((d.cosh * KEY_SCALE).round() as i64)
            } else {
                w as i64
            };
        }
    }
    let identity: Vec<usize> = (0..m).collect();
    let best = group
        .iter()
        .chain(std::iter::once(&identity))
        .map(|g| {
            let mut v = vec![0i64; value.len()];
            for i in 0..m {
                for j in i + 1..m {
                    let (a, b) = (g[i].min(g[j]), g[i].max(g[j]));
                    v[pair_index(m, a, b)] = value[pair_index(m, i, j)];
                }
            }
            v
        })
        .min()
        .expect("nonempty group");
    CanonicalKey(best)
}

/// Where a certificate of the closure came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Basis,
    /// Glued onto facet `facet` (1-based) of certificate `parent` of the
    /// closure with prism `prism`.
    Glued {
        parent: usize,
        facet: usize,
        prism: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ClosureEntry {
    pub certificate: GramCertificate,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default)]
pub struct Closure {
    pub entries: Vec<ClosureEntry>,
    pub rounds: usize,
    /// Glued candidates submitted to the solver.
    pub candidates: usize,
    pub undecided: Vec<String>,
}

/// Iterates [`glue`] over all certificates, simplex facets and prisms
/// until no new certificate appears.
pub fn glue_closure(
    p: &CombinatorialPolytope,
    data: &CombinatorialData,
    basis: &[GramCertificate],
    prisms: &[OrthogonalPrism],
    opts: &SolveOptions,
) -> Closure {
    let group = symmetry_group(p);
    let mut seen: BTreeMap<CanonicalKey, usize> = BTreeMap::new();
    let mut out = Closure::default();
    let mut push = |out: &mut Closure, c: GramCertificate, prov: Provenance| -> Option<usize> {
        let key = canonical_key(&c, &group);
        if seen.contains_key(&key) {
            return None;
        }
        seen.insert(key, out.entries.len());
        out.entries.push(ClosureEntry {
            certificate: c,
            provenance: prov,
        });
        Some(out.entries.len() - 1)
    };
    let mut frontier: Vec<usize> = basis
        .iter()
        .filter_map(|c| push(&mut out, c.clone(), Provenance::Basis))
        .collect();
    let mut tried: BTreeSet<Vec<u8>> = BTreeSet::new();
    while !frontier.is_empty() {
        out.rounds += 1;
        let mut jobs: Vec<(usize, GluedCandidate)> = Vec::new();
        for &parent in &frontier {
            let c = &out.entries[parent].certificate;
            for &(b, s) in &data.l5_basis {
                for (k, prism) in prisms.iter().enumerate() {
                    let Ok(cands) = glue(c, b - 1, s, prism, k) else {
                        continue;
                    };
                    for cand in cands {
                        if tried.insert(cand.weights.clone()) {
                            jobs.push((parent, cand));
                        }
                    }
                }
            }
        }
        out.candidates += jobs.len();
        let results: Vec<_> = jobs
            .par_iter()
            .map(|(_, cand)| {
                let g = SymbolicGramMatrix::from_weights(cand.size(), &cand.weights)
                    .expect("valid weights");
                solve_and_certify(&g, p, opts)
            })
            .collect();
        let mut next = Vec::new();
        for ((parent, cand), res) in jobs.into_iter().zip(results) {
            if let Some(u) = res.undecided {
                out.undecided.push(format!("{:?}: {u}", cand.weights));
            }
            for c in res.certificates {
                let prov = Provenance::Glued {
                    parent,
                    facet: cand.facet + 1,
                    prism: cand.prism,
                };
                if let Some(i) = push(&mut out, c, prov) {
                    next.push(i);
                }
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::compute_data;

    #[test]
    fn prism_combinatorics() {
        let p = simplicial_prism(5);
        assert_eq!((p.dim(), p.num_facets(), p.vertices().len()), (5, 7, 10));
        let d = compute_data(&p);
        assert_eq!(d.disjoint_pairs.len(), 1);
        assert_eq!(d.l5_basis.len(), 2);
    }
}
