use super::{num_pairs, pack, pair_index, unpack};

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Action of node relabellings on upper-triangle weight tuples.
pub struct PairPermuter {
    rank: usize,
    /// For each permutation σ, `maps[σ][k]` is the destination of pair `k`.
    maps: Vec<Vec<usize>>,
}

impl PairPermuter {
    pub fn new(rank: usize) -> Self {
        let maps = all_permutations(rank)
            .into_iter()
            .map(|s| Self::pair_map(rank, &s))
            .collect();
        Self { rank, maps }
    }

    /// Destination of each pair position under the node map `s`.
    pub fn pair_map(rank: usize, s: &[usize]) -> Vec<usize> {
        let mut m = vec![0; num_pairs(rank)];
        for i in 0..rank {
            for j in i + 1..rank {
                let (a, b) = (s[i].min(s[j]), s[i].max(s[j]));
                m[pair_index(rank, i, j)] = pair_index(rank, a, b);
            }
        }
        m
    }

    pub fn apply(map: &[usize], w: &[u8], out: &mut [u8]) {
        for (k, &d) in map.iter().enumerate() {
            out[d] = w[k];
        }
    }

    /// Distinct images of a packed tuple, sorted.
    pub fn orbit(&self, code: u64) -> Vec<u64> {
        let len = num_pairs(self.rank);
        let w = unpack(code, len);
        let mut buf = vec![0u8; len];
        let mut out: Vec<u64> = self
            .maps
            .iter()
            .map(|m| {
                Self::apply(m, &w, &mut buf);
                pack(&buf)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(7).len(), 5040);
        assert_eq!(all_permutations(0).len(), 1);
    }
}
