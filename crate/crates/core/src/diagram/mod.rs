//! Coxeter diagrams: classification and labelled datasets.
//!
//! A diagram of rank `r` is stored as its upper-triangle weight tuple in
//! lexicographic pair order `(0,1), (0,2), …, (r−2,r−1)`. Tuples of up to 21
//! entries pack into a `u64` at three bits per entry, first entry most
//! significant, so that numeric order equals lexicographic order.

mod library;
mod perm;

use std::collections::HashSet;

use thiserror::Error;

use crate::algebra::{
    cos_pi_over_7, gram_entry, inertia_f64, signature_exact, AlgebraicNumber, ExactField,
    Heptagonal, Matrix, Signature,
};

pub use library::{DatasetManifest, DiagramLibrary, LibraryKind};
pub use perm::{all_permutations, PairPermuter};

/// Weight marking a pair of non-intersecting, parallel hyperplanes.
pub const INFINITY: u8 = 0;

/// Maximum rank handled by the packed representation.
pub const MAX_RANK: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram contains an infinite weight")]
    Infinite,
    #[error("rank {0} is outside the supported range 2..=7")]
    RankOutOfRange(usize),
    #[error("input diagrams have mixed ranks")]
    MixedRanks,
    #[error("weight {0} is not allowed")]
    BadWeight(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Elliptic,
    Parabolic,
    Lanner,
    Other,
}

/// Coxeter diagram given by its weight matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedGraph {
    rank: usize,
    /// Upper-triangle weights in lexicographic pair order.
    weights: Vec<u8>,
}

pub fn num_pairs(r: usize) -> usize {
    r * r.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j`, in the upper-triangle order.
pub fn pair_index(r: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < r);
    i * (2 * r - i - 1) / 2 + (j - i - 1)
}

pub fn pack(weights: &[u8]) -> u64 {
    weights.iter().fold(0u64, |acc, &w| acc << 3 | w as u64)
}

pub fn unpack(code: u64, len: usize) -> Vec<u8> {
    (0..len).map(|k| (code >> (3 * (len - 1 - k)) & 7) as u8).collect()
}

impl WeightedGraph {
    pub fn new(rank: usize, weights: Vec<u8>) -> Result<Self, DiagramError> {
        if rank == 0 || rank > MAX_RANK || weights.len() != num_pairs(rank) {
            return Err(DiagramError::RankOutOfRange(rank));
        }
        if let Some(&w) = weights.iter().find(|&&w| w == 1 || w > 7) {
            return Err(DiagramError::BadWeight(w));
        }
        Ok(Self { rank, weights })
    }

    /// Builds a diagram from its edges (all unlisted pairs get weight 2).
    pub fn from_edges(rank: usize, edges: &[(usize, usize, u8)]) -> Result<Self, DiagramError> {
        let mut w = vec![2u8; num_pairs(rank)];
        for &(i, j, k) in edges {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            w[pair_index(rank, a, b)] = k;
        }
        Self::new(rank, w)
    }

    pub fn from_code(rank: usize, code: u64) -> Self {
        Self {
            rank,
            weights: unpack(code, num_pairs(rank)),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> u8 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => self.weights[pair_index(self.rank, i, j)],
            std::cmp::Ordering::Greater => self.weights[pair_index(self.rank, j, i)],
        }
    }

    pub fn code(&self) -> u64 {
        pack(&self.weights)
    }

    pub fn induced(&self, nodes: &[usize]) -> WeightedGraph {
        let r = nodes.len();
        let mut w = Vec::with_capacity(num_pairs(r));
        for a in 0..r {
            for b in a + 1..r {
                w.push(self.weight(nodes[a], nodes[b]));
            }
        }
        WeightedGraph { rank: r, weights: w }
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.rank];
        let mut out = Vec::new();
        for s in 0..self.rank {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let u = comp[k];
                for v in 0..self.rank {
                    if !seen[v] && self.weight(u, v) != 2 {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Inertia of the Gram matrix `(−cos(π/k_ij))`, with `−1` at infinite
    /// weights.
    pub fn signature(&self) -> Signature {
        let r = self.rank;
        let g = gram_f64(r, &self.weights);
        if let Some(s) = inertia_f64(&g, r, 1e-9) {
            return s;
        }
        if self.weights.contains(&7) {
            signature_exact(&self.gram_exact(|w| {
                if w == 7 {
                    -cos_pi_over_7()
                } else {
                    Heptagonal::from_base(entry_exact(w))
                }
            }))
        } else {
            signature_exact(&self.gram_exact(entry_exact))
        }
    }

    fn gram_exact<F: ExactField>(&self, entry: impl Fn(u8) -> F) -> Matrix<F> {
        Matrix::from_fn(self.rank, |i, j| {
            if i == j {
                F::one()
            } else {
                entry(self.weight(i, j))
            }
        })
    }
}

fn entry_exact(w: u8) -> AlgebraicNumber {
    if w == INFINITY {
        AlgebraicNumber::from_int(-1)
    } else {
        gram_entry(w).expect("weight in 2..=6")
    }
}

pub fn cos_entry(w: u8) -> f64 {
    if w == INFINITY {
        -1.0
    } else {
        -(std::f64::consts::PI / w as f64).cos()
    }
}

pub(crate) fn gram_f64(r: usize, weights: &[u8]) -> Vec<f64> {
    let mut g = vec![0.0; r * r];
    for i in 0..r {
        g[i * r + i] = 1.0;
        for j in i + 1..r {
            let v = cos_entry(weights[pair_index(r, i, j)]);
            g[i * r + j] = v;
            g[j * r + i] = v;
        }
    }
    g
}

/// Classifies a diagram with finite weights.
pub fn classify(g: &WeightedGraph) -> Result<Class, DiagramError> {
    if g.weights.contains(&INFINITY) {
        return Err(DiagramError::Infinite);
    }
    Ok(classify_any(g))
}

/// Classification that also accepts infinite weights, as needed for the
/// Euclidean square dataset.
pub(crate) fn classify_any(g: &WeightedGraph) -> Class {
    let sig = g.signature();
    if sig.is_positive_definite() {
        return Class::Elliptic;
    }
    let comps = g.components();
    if comps.len() > 1 {
        let all_parabolic = comps
            .iter()
            .all(|c| is_connected_parabolic(&g.induced(c)));
        return if all_parabolic { Class::Parabolic } else { Class::Other };
    }
    if !proper_subdiagrams_elliptic(g) {
        return Class::Other;
    }
    if sig.neg == 0 {
        Class::Parabolic
    } else {
        Class::Lanner
    }
}

fn is_connected_parabolic(g: &WeightedGraph) -> bool {
    let sig = g.signature();
    sig.neg == 0 && sig.zero == 1 && proper_subdiagrams_elliptic(g)
}

/// Ellipticity is hereditary, so it suffices to test the corank-one
/// subdiagrams.
fn proper_subdiagrams_elliptic(g: &WeightedGraph) -> bool {
    (0..g.rank).all(|drop| {
        let nodes: Vec<usize> = (0..g.rank).filter(|&k| k != drop).collect();
        g.rank == 1 || g.induced(&nodes).signature().is_positive_definite()
    })
}

/// Class requested from [`enumerate_class`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Elliptic,
    ParabolicConnected,
    Lanner,
}

/// Labelled diagrams of each rank, grown rank by rank from the elliptic
/// ones: a rank-`r` diagram all of whose proper subdiagrams are elliptic
/// restricts to a labelled elliptic diagram on its first `r − 1` nodes.
pub struct LabelledEnumeration {
    max_weight: u8,
    /// `elliptic[r]` = labelled elliptic codes of rank `r`.
    elliptic: Vec<HashSet<u64>>,
    /// `critical[r]` = non-elliptic codes all of whose proper subdiagrams are elliptic.
    critical: Vec<Vec<u64>>,
}

impl LabelledEnumeration {
    pub fn new(max_rank: usize, max_weight: u8) -> Result<Self, DiagramError> {
        if !(2..=MAX_RANK).contains(&max_rank) {
            return Err(DiagramError::RankOutOfRange(max_rank));
        }
        if !(2..=7).contains(&max_weight) {
            return Err(DiagramError::BadWeight(max_weight));
        }
        let mut me = Self {
            max_weight,
            elliptic: vec![HashSet::new(), HashSet::from([0u64])],
            critical: vec![Vec::new(), Vec::new()],
        };
        for r in 2..=max_rank {
            me.grow(r);
        }
        Ok(me)
    }

    fn grow(&mut self, r: usize) {
        let prev = &self.elliptic[r - 1];
        let s3 = self.elliptic.get(3).cloned().unwrap_or_default();
        let mut prev_sorted: Vec<u64> = prev.iter().copied().collect();
        prev_sorted.sort_unstable();
        let drop_maps: Vec<Vec<usize>> = (0..r - 1)
            .map(|d| {
                let nodes: Vec<usize> = (0..r).filter(|&k| k != d).collect();
                restriction_positions(r, &nodes)
            })
            .collect();
        let mut elliptic = HashSet::new();
        let mut critical = Vec::new();
        let mut new_w = vec![0u8; r - 1];
        for &code in &prev_sorted {
            let old = unpack(code, num_pairs(r - 1));
            self.extend(r, &old, &s3, 0, &mut new_w, &mut |w| {
                let mut full = vec![0u8; num_pairs(r)];
                for i in 0..r - 1 {
                    for j in i + 1..r - 1 {
                        full[pair_index(r, i, j)] = old[pair_index(r - 1, i, j)];
                    }
                    full[pair_index(r, i, r - 1)] = w[i];
                }
                let ok = drop_maps.iter().all(|map| {
                    let sub: Vec<u8> = map.iter().map(|&p| full[p]).collect();
                    prev.contains(&pack(&sub))
                });
                if !ok {
                    return;
                }
                let code = pack(&full);
                let sig = WeightedGraph { rank: r, weights: full }.signature();
                if sig.is_positive_definite() {
                    elliptic.insert(code);
                } else {
                    critical.push(code);
                }
            });
        }
        critical.sort_unstable();
        self.elliptic.push(elliptic);
        self.critical.push(critical);
    }

    fn extend(
        &self,
        r: usize,
        old: &[u8],
        s3: &HashSet<u64>,
        k: usize,
        w: &mut Vec<u8>,
        emit: &mut impl FnMut(&[u8]),
    ) {
        if k == r - 1 {
            emit(w);
            return;
        }
        for x in 2..=self.max_weight {
            w[k] = x;
            // Every triangle through the new node must be elliptic once
            // rank-3 subdiagrams are proper.
            let ok = r < 4
                || (0..k).all(|j| s3.contains(&pack(&[old[pair_index(r - 1, j, k)], w[j], x])));
            if ok {
                self.extend(r, old, s3, k + 1, w, emit);
            }
        }
    }

    /// Labelled codes of the given class and rank.
    pub fn labelled(&self, r: usize, target: Target) -> Vec<u64> {
        match target {
            Target::Elliptic => {
                let mut v: Vec<u64> = self.elliptic[r].iter().copied().collect();
                v.sort_unstable();
                v
            }
            Target::ParabolicConnected | Target::Lanner => self.critical[r]
                .iter()
                .copied()
                .filter(|&c| {
                    let g = WeightedGraph::from_code(r, c);
                    let sig = g.signature();
                    g.is_connected()
                        && match target {
                            Target::ParabolicConnected => sig.neg == 0,
                            _ => sig.neg > 0,
                        }
                })
                .collect(),
        }
    }
}

/// Row positions of the induced sub-tuple on `nodes`.
pub fn restriction_positions(r: usize, nodes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(num_pairs(nodes.len()));
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let (i, j) = (nodes[a].min(nodes[b]), nodes[a].max(nodes[b]));
            out.push(pair_index(r, i, j));
        }
    }
    out
}

/// Isomorphism-class representatives (lexicographically minimal tuples)
/// of a labelled set closed under relabelling.
pub fn orbit_representatives(r: usize, labelled: &[u64]) -> Vec<WeightedGraph> {
    let permuter = PairPermuter::new(r);
    let mut remaining: HashSet<u64> = labelled.iter().copied().collect();
    let mut sorted = labelled.to_vec();
    sorted.sort_unstable();
    let mut reps = Vec::new();
    for code in sorted {
        if !remaining.contains(&code) {
            continue;
        }
        let orbit = permuter.orbit(code);
        let rep = *orbit.iter().min().expect("nonempty orbit");
        for c in orbit {
            remaining.remove(&c);
        }
        reps.push(WeightedGraph::from_code(r, rep));
    }
    reps.sort();
    reps
}

/// Isomorphism-class representatives of rank-`r` diagrams of the given class.
pub fn enumerate_class(
    rank: usize,
    target: Target,
    max_weight: u8,
) -> Result<Vec<WeightedGraph>, DiagramError> {
    let e = LabelledEnumeration::new(rank, max_weight)?;
    Ok(orbit_representatives(rank, &e.labelled(rank, target)))
}

/// Labelled vector set of a diagram collection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSet {
    rank: usize,
    codes: Vec<u64>,
}

impl VectorSet {
    pub fn new(rank: usize, mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        Self { rank, codes }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn contains(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        let len = num_pairs(self.rank);
        self.codes.iter().map(move |&c| unpack(c, len))
    }
}

/// All distinct tuples obtained by relabelling the nodes of each diagram.
pub fn expand_permutations(diagrams: &[WeightedGraph]) -> Result<VectorSet, DiagramError> {
    let Some(first) = diagrams.first() else {
        return Ok(VectorSet::new(0, Vec::new()));
    };
    let r = first.rank;
    if diagrams.iter().any(|d| d.rank != r) {
        return Err(DiagramError::MixedRanks);
    }
    let permuter = PairPermuter::new(r);
    let mut codes = Vec::new();
    for d in diagrams {
        codes.extend(permuter.orbit(d.code()));
    }
    Ok(VectorSet::new(r, codes))
}

/// Named diagrams used in tests and examples.
pub mod named {
    use super::WeightedGraph;

    pub fn path(r: usize, weights: &[u8]) -> WeightedGraph {
        let edges: Vec<(usize, usize, u8)> =
            (0..r - 1).map(|i| (i, i + 1, weights[i])).collect();
        WeightedGraph::from_edges(r, &edges).expect("valid path")
    }

    pub fn a(r: usize) -> WeightedGraph {
        path(r, &vec![3; r - 1])
    }

    pub fn d(r: usize) -> WeightedGraph {
        let mut edges: Vec<(usize, usize, u8)> = (0..r - 2).map(|i| (i, i + 1, 3)).collect();
        edges.push((r - 3, r - 1, 3));
        WeightedGraph::from_edges(r, &edges).expect("valid D diagram")
    }

    pub fn cycle(r: usize, weights: &[u8]) -> WeightedGraph {
        let edges: Vec<(usize, usize, u8)> =
            (0..r).map(|i| (i, (i + 1) % r, weights[i])).collect();
        WeightedGraph::from_edges(r, &edges).expect("valid cycle")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_order_is_lexicographic() {
        let mut k = 0;
        for i in 0..6 {
            for j in i + 1..6 {
                assert_eq!(pair_index(6, i, j), k);
                k += 1;
            }
        }
        assert_eq!(unpack(pack(&[2, 7, 3, 0]), 4), vec![2, 7, 3, 0]);
    }

    #[test]
    fn basic_classes() {
        assert_eq!(classify(&named::a(5)), Ok(Class::Elliptic));
        assert_eq!(
            classify(&WeightedGraph::new(1, vec![]).unwrap()),
            Ok(Class::Elliptic)
        );
        assert_eq!(classify(&named::cycle(5, &[3; 5])), Ok(Class::Parabolic));
        // Ã₁ × Ã₁ is parabolic but not connected.
        let sq = WeightedGraph::new(4, vec![0, 2, 2, 2, 2, 0]).unwrap();
        assert_eq!(classify(&sq), Err(DiagramError::Infinite));
        assert_eq!(classify_any(&sq), Class::Parabolic);
        // [5,3,3,3] is Lannér; [5,3,3,5] too.
        assert_eq!(classify(&named::path(5, &[5, 3, 3, 3])), Ok(Class::Lanner));
        assert_eq!(classify(&named::path(5, &[3, 3, 3, 3]).clone()), Ok(Class::Elliptic));
        assert_eq!(classify(&named::path(3, &[3, 7])), Ok(Class::Lanner));
        assert_eq!(classify(&named::path(3, &[3, 6])), Ok(Class::Parabolic));
        assert_eq!(classify(&named::path(4, &[3, 6, 3])), Ok(Class::Other));
    }
}
