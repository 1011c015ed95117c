use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{
    classify_any, num_pairs, orbit_representatives, pack, Class, DiagramError,
    LabelledEnumeration, Target, VectorSet, WeightedGraph, INFINITY,
};

/// The datasets consumed by the saving and killing filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LibraryKind {
    /// Labelled elliptic diagrams of the given rank.
    Elliptic(usize),
    /// Labelled connected parabolic diagrams.
    Parabolic(usize),
    /// Labelled Lannér diagrams.
    Lanner(usize),
    /// Right-angled Euclidean squares: two infinite edges on a perfect
    /// matching of four nodes, all other weights 2.
    EuclideanSquare,
}

impl LibraryKind {
    pub fn rank(self) -> usize {
        match self {
            LibraryKind::Elliptic(r) | LibraryKind::Parabolic(r) | LibraryKind::Lanner(r) => r,
            LibraryKind::EuclideanSquare => 4,
        }
    }

    pub fn name(self) -> String {
        match self {
            LibraryKind::Elliptic(r) => format!("S{r}"),
            LibraryKind::Parabolic(r) => format!("E{r}"),
            LibraryKind::Lanner(r) => format!("L{r}"),
            LibraryKind::EuclideanSquare => "I2".to_string(),
        }
    }

    fn class(self) -> &'static str {
        match self {
            LibraryKind::Elliptic(_) => "elliptic",
            LibraryKind::Parabolic(_) => "parabolic_connected",
            LibraryKind::Lanner(_) => "lanner",
            LibraryKind::EuclideanSquare => "euclidean_square",
        }
    }

    pub fn standard() -> Vec<LibraryKind> {
        let mut v = vec![LibraryKind::Lanner(5), LibraryKind::Lanner(4)];
        v.extend((3..=7).map(LibraryKind::Elliptic));
        v.extend((3..=7).map(LibraryKind::Parabolic));
        v.push(LibraryKind::EuclideanSquare);
        v
    }
}

/// Manifest line for one persisted dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: String,
    pub rank: usize,
    pub class: String,
    pub max_weight: u8,
    pub diagrams: usize,
    pub count: usize,
    pub sha256: String,
}

impl fmt::Display for DatasetManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rank={} class={} max_weight={} diagrams={} count={} sha256={}",
            self.name, self.rank, self.class, self.max_weight, self.diagrams, self.count, self.sha256
        )
    }
}

/// All filter datasets, as labelled code sets.
pub struct DiagramLibrary {
    max_weight: u8,
    sets: BTreeMap<LibraryKind, HashSet<u64>>,
    vectors: BTreeMap<LibraryKind, VectorSet>,
}

impl DiagramLibrary {
    pub fn build(max_weight: u8) -> Result<Self, DiagramError> {
        let e = LabelledEnumeration::new(7, max_weight)?;
        let mut vectors = BTreeMap::new();
        for r in 2..=7 {
            vectors.insert(
                LibraryKind::Elliptic(r),
                VectorSet::new(r, e.labelled(r, Target::Elliptic)),
            );
        }
        for r in 3..=7 {
            vectors.insert(
                LibraryKind::Parabolic(r),
                VectorSet::new(r, e.labelled(r, Target::ParabolicConnected)),
            );
        }
        for r in 3..=5 {
            vectors.insert(
                LibraryKind::Lanner(r),
                VectorSet::new(r, e.labelled(r, Target::Lanner)),
            );
        }
        vectors.insert(LibraryKind::EuclideanSquare, euclidean_squares(max_weight));
        Ok(Self::from_vectors(max_weight, vectors))
    }

    fn from_vectors(max_weight: u8, vectors: BTreeMap<LibraryKind, VectorSet>) -> Self {
        let sets = vectors
            .iter()
            .map(|(&k, v)| (k, v.codes().iter().copied().collect()))
            .collect();
        Self {
            max_weight,
            sets,
            vectors,
        }
    }

    pub fn max_weight(&self) -> u8 {
        self.max_weight
    }

    pub fn set(&self, kind: LibraryKind) -> &HashSet<u64> {
        &self.sets[&kind]
    }

    pub fn vectors(&self, kind: LibraryKind) -> &VectorSet {
        &self.vectors[&kind]
    }

    pub fn contains(&self, kind: LibraryKind, code: u64) -> bool {
        self.sets.get(&kind).is_some_and(|s| s.contains(&code))
    }

    pub fn diagrams(&self, kind: LibraryKind) -> Vec<WeightedGraph> {
        let v = self.vectors(kind);
        orbit_representatives(v.rank(), v.codes())
    }

    pub fn manifest(&self, kind: LibraryKind) -> DatasetManifest {
        let v = self.vectors(kind);
        DatasetManifest {
            name: kind.name(),
            rank: kind.rank(),
            class: kind.class().to_string(),
            max_weight: self.max_weight,
            diagrams: self.diagrams(kind).len(),
            count: v.len(),
            sha256: content_hash(v),
        }
    }

    /// Writes one `<name>.txt` per dataset plus `manifest.txt`.
    pub fn save(&self, dir: &Path) -> io::Result<Vec<DatasetManifest>> {
        std::fs::create_dir_all(dir)?;
        let mut manifests = Vec::new();
        for &kind in self.vectors.keys() {
            let v = self.vectors(kind);
            let mut f = io::BufWriter::new(std::fs::File::create(
                dir.join(format!("{}.txt", kind.name())),
            )?);
            for row in v.vectors() {
                writeln!(f, "{}", row_text(&row))?;
            }
            f.flush()?;
            manifests.push(self.manifest(kind));
        }
        let mut m = std::fs::File::create(dir.join("manifest.txt"))?;
        for man in &manifests {
            writeln!(m, "{man}")?;
        }
        Ok(manifests)
    }

    /// Loads datasets written by [`DiagramLibrary::save`], verifying every
    /// content hash against the manifest.
    pub fn load(dir: &Path) -> io::Result<Self> {
        let manifest = std::fs::read_to_string(dir.join("manifest.txt"))?;
        let mut vectors = BTreeMap::new();
        let mut max_weight = 7;
        for line in manifest.lines().filter(|l| !l.trim().is_empty()) {
            let mut fields = BTreeMap::new();
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or_default().to_string();
            for p in parts {
                if let Some((k, v)) = p.split_once('=') {
                    fields.insert(k, v);
                }
            }
            let bad = |what: &str| io::Error::new(io::ErrorKind::InvalidData, format!("{name}: {what}"));
            let kind = LibraryKind::standard()
                .into_iter()
                .chain([LibraryKind::Elliptic(2), LibraryKind::Lanner(3)])
                .find(|k| k.name() == name)
                .ok_or_else(|| bad("unknown dataset"))?;
            max_weight = fields
                .get("max_weight")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("missing max_weight"))?;
            let text = std::fs::read_to_string(dir.join(format!("{name}.txt")))?;
            let mut codes = Vec::new();
            for row in text.lines().filter(|l| !l.trim().is_empty()) {
                let w: Result<Vec<u8>, _> = row.split(',').map(|x| x.trim().parse::<u8>()).collect();
                let w = w.map_err(|_| bad("malformed row"))?;
                if w.len() != num_pairs(kind.rank()) {
                    return Err(bad("row length"));
                }
                codes.push(pack(&w));
            }
            let v = VectorSet::new(kind.rank(), codes);
            if fields.get("sha256").copied() != Some(content_hash(&v).as_str()) {
                return Err(bad("content hash mismatch"));
            }
            vectors.insert(kind, v);
        }
        Ok(Self::from_vectors(max_weight, vectors))
    }
}

fn row_text(row: &[u8]) -> String {
    row.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn content_hash(v: &VectorSet) -> String {
    let mut h = Sha256::new();
    for row in v.vectors() {
        h.update(row_text(&row).as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Rank-4 diagrams with infinite weights on a perfect matching whose
/// remaining four weights make the whole diagram parabolic.
fn euclidean_squares(max_weight: u8) -> VectorSet {
    let matchings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut codes = Vec::new();
    for m in matchings {
        let sides: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|p| !m.contains(p))
            .collect();
        for mut t in 0..(max_weight as usize - 1).pow(4) {
            let mut edges: Vec<(usize, usize, u8)> =
                m.iter().map(|&(i, j)| (i, j, INFINITY)).collect();
            for &(i, j) in &sides {
                edges.push((i, j, 2 + (t % (max_weight as usize - 1)) as u8));
                t /= max_weight as usize - 1;
            }
            let g = WeightedGraph::from_edges(4, &edges).expect("valid square");
            if classify_any(&g) == Class::Parabolic {
                codes.push(g.code());
            }
        }
    }
    VectorSet::new(4, codes)
}
