//! Block pasting: per-vertex blocks of elliptic vectors are joined on their
//! shared facet pairs, with saving and killing filters applied as soon as
//! the columns they read are determined.

mod block;
mod fuchsian;
mod layout;
mod store;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use block::{build_block, paste, Block, BlockError, Chunk, JoinIndex, RowHasher, RowMap};
pub use fuchsian::{
    apply_intersection_filter, build_fuchsian_sets, embeddings, fuchsian_set, row_weights,
    FuchsianSet, FuchsianSets, IntersectionFilter, ADMISSIBILITY_BUDGET,
};
pub use layout::{column_layout, ColumnLayout, Row, MAX_COLUMNS};
pub use store::{read_checkpoint, write_checkpoint, CheckpointHeader, RowSink, RowSource};

use crate::combinatorics::{format_set, labels, CombinatorialData, CombinatorialPolytope, FacetSet};
use crate::diagram::{DiagramLibrary, LibraryKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// The restriction must lie in the dataset.
    Saving,
    /// The restriction must not lie in the dataset.
    Killing,
}

/// Condition on the restriction of a row to the pairs inside `subset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterRule {
    pub kind: RuleKind,
    pub subset: FacetSet,
    pub dataset: LibraryKind,
    /// Number of pasted chunks after which the rule first applies.
    pub layer: usize,
}

impl fmt::Display for FilterRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            RuleKind::Saving => "IN",
            RuleKind::Killing => "NOT IN",
        };
        write!(
            f,
            "layer {} {} {} {}",
            self.layer,
            format_set(self.subset),
            kind,
            self.dataset.name()
        )
    }
}

/// Which condition families are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterSet {
    pub l4: bool,
    pub l5: bool,
    pub s: bool,
    pub e: bool,
    pub se: bool,
    pub i2: bool,
}

impl FilterSet {
    pub fn all() -> Self {
        Self {
            l4: true,
            l5: true,
            s: true,
            e: true,
            se: true,
            i2: true,
        }
    }

    pub fn none() -> Self {
        Self {
            l4: false,
            l5: false,
            s: false,
            e: false,
            se: false,
            i2: false,
        }
    }
}

impl Default for FilterSet {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Debug, Error)]
pub enum PastingError {
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("saving rule on {0} reads the disjoint pair ({1},{2})")]
    SavingOnDisjointPair(String, usize, usize),
    #[error("chunk order is not a permutation of the {0} vertices")]
    BadChunkOrder(usize),
    #[error("symmetry element {0} does not preserve the disjoint pairs")]
    BadSymmetry(usize),
    #[error("checkpoint {path} does not match this run: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },
    #[error("row storage failed after layer {layer}{}: {source}",
        .checkpoint.as_ref().map(|p| format!(" (last checkpoint {})", p.display())).unwrap_or_default())]
    Io {
        layer: usize,
        checkpoint: Option<PathBuf>,
        #[source]
        source: std::io::Error,
    },
}

/// Chunks in the default order: vertices ascending by label list.
pub fn chunks(p: &CombinatorialPolytope) -> Vec<Chunk> {
    p.vertices()
        .iter()
        .enumerate()
        .map(|(vertex_index, &facets)| Chunk {
            vertex_index,
            facets,
        })
        .collect()
}

/// For each chunk position, the columns determined once it has been pasted.
fn cumulative_masks(layout: &ColumnLayout, order: &[Chunk]) -> Vec<Row> {
    let mut acc = 0;
    order
        .iter()
        .map(|c| {
            let cols = c
                .label_pairs()
                .into_iter()
                .filter_map(|(a, b)| layout.column(a, b));
            acc |= layout.mask(cols);
            acc
        })
        .collect()
}

/// Emits every condition at the first layer where all its columns are
/// determined. Killing rules against parabolic datasets are omitted on
/// faces: a face lies in a vertex, so its restriction is elliptic already.
pub fn schedule_filters(
    p: &CombinatorialPolytope,
    data: &CombinatorialData,
    order: &[Chunk],
    filters: FilterSet,
) -> Result<Vec<FilterRule>, PastingError> {
    let layout = column_layout(p, data);
    let masks = cumulative_masks(&layout, order);
    let layer_of = |s: FacetSet| -> usize {
        let need = layout.mask(layout.subset_columns(s).into_iter().flatten());
        masks
            .iter()
            .position(|&m| m & need == need)
            .map_or(order.len(), |k| k + 1)
    };
    let mut rules = Vec::new();
    let mut push = |kind, subset, dataset| rules.push(FilterRule {
        kind,
        subset,
        dataset,
        layer: layer_of(subset),
    });
    let saving = |s: FacetSet| -> Result<(), PastingError> {
        let l = labels(s);
        for a in 0..l.len() {
            for b in a + 1..l.len() {
                if data.is_disjoint_pair(l[a], l[b]) {
                    return Err(PastingError::SavingOnDisjointPair(format_set(s), l[a], l[b]));
                }
            }
        }
        Ok(())
    };
    if filters.l4 {
        for &s in &data.l4 {
            saving(s)?;
            push(RuleKind::Saving, s, LibraryKind::Lanner(4));
        }
    }
    if filters.l5 {
        for &s in &data.l5 {
            saving(s)?;
            push(RuleKind::Saving, s, LibraryKind::Lanner(5));
        }
    }
    if filters.s {
        for j in 3..=5 {
            for &s in data.s(j) {
                push(RuleKind::Killing, s, LibraryKind::Elliptic(j));
            }
        }
    }
    if filters.e {
        for j in 3..=5 {
            for &s in data.e(j) {
                if !p.is_face(s) {
                    push(RuleKind::Killing, s, LibraryKind::Parabolic(j));
                }
            }
        }
    }
    if filters.se {
        for j in 6..=7 {
            for &s in data.e(j) {
                push(RuleKind::Killing, s, LibraryKind::Elliptic(j));
                push(RuleKind::Killing, s, LibraryKind::Parabolic(j));
            }
        }
    }
    if filters.i2 {
        for &s in &data.i2 {
            push(RuleKind::Killing, s, LibraryKind::EuclideanSquare);
        }
    }
    rules.sort_by_key(|r| r.layer);
    Ok(rules)
}

/// A scheduled rule bound to its columns and dataset.
struct CompiledRule<'a> {
    kind: RuleKind,
    shifts: Vec<Option<u32>>,
    set: &'a HashSet<u64>,
}

impl CompiledRule<'_> {
    #[inline]
    fn keeps(&self, row: Row) -> bool {
        let code = self.shifts.iter().fold(0u64, |c, s| {
            c << 3 | s.map_or(0, |s| (row >> s & 7) as u64)
        });
        self.set.contains(&code) == (self.kind == RuleKind::Saving)
    }
}

fn compile<'a>(layout: &ColumnLayout, rule: &FilterRule, lib: &'a DiagramLibrary) -> CompiledRule<'a> {
    CompiledRule {
        kind: rule.kind,
        shifts: layout
            .subset_columns(rule.subset)
            .into_iter()
            .map(|c| c.map(|c| layout.shift(c)))
            .collect(),
        set: lib.set(rule.dataset),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    /// Pin the pairs around a simplex facet to weight 2.
    Basis,
    Direct,
}

/// Which simplex-facet entries are pinned in the basis approach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisPins {
    /// Only the first entry of the basis list.
    First,
    /// Every entry.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterTiming {
    /// At the scheduled layer.
    Scheduled,
    /// All rules after the last paste.
    Final,
}

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    /// Polytope identifier recorded in checkpoints.
    pub id: String,
    pub approach: Approach,
    pub basis_pins: BasisPins,
    pub filters: FilterSet,
    pub timing: FilterTiming,
    /// Chunk order as vertex indices; default ascending.
    pub chunk_order: Option<Vec<usize>>,
    /// Rows held in memory per layer before spilling to disk.
    pub row_budget: usize,
    pub spill_dir: Option<PathBuf>,
    /// Write the accumulated block after every layer.
    pub checkpoint_dir: Option<PathBuf>,
    pub resume_from: Option<PathBuf>,
    /// Stop after this many chunks (trace runs).
    pub max_layers: Option<usize>,
    pub dedup: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            id: "P".to_string(),
            approach: Approach::Basis,
            basis_pins: BasisPins::All,
            filters: FilterSet::all(),
            timing: FilterTiming::Scheduled,
            chunk_order: None,
            row_budget: 64 << 20,
            spill_dir: None,
            checkpoint_dir: None,
            resume_from: None,
            max_layers: None,
            dedup: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerStat {
    pub layer: usize,
    pub chunk: FacetSet,
    pub pasted: u64,
    pub filtered: u64,
    pub rules: usize,
    pub seconds: f64,
    pub spilled: bool,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub layout: ColumnLayout,
    pub schedule: Vec<FilterRule>,
    pub pins: Vec<(usize, u8)>,
    pub trace: Vec<LayerStat>,
    /// Final rows, sorted; orbit representatives when dedup is on.
    pub rows: Vec<Row>,
    pub complete: bool,
}

impl Enumeration {
    pub fn vectors(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.rows.iter().map(|&r| self.layout.decode(r))
    }
}

/// Columns fixed to weight 2 by the basis approach.
pub fn basis_pins(
    p: &CombinatorialPolytope,
    data: &CombinatorialData,
    layout: &ColumnLayout,
    mode: BasisPins,
) -> Vec<(usize, u8)> {
    let basis = if p.dim() == 4 { &data.l4_basis } else { &data.l5_basis };
    let take = match mode {
        BasisPins::First => basis.len().min(1),
        BasisPins::All => basis.len(),
    };
    let mut pins: Vec<(usize, u8)> = basis[..take]
        .iter()
        .flat_map(|&(b, s)| labels(s).into_iter().filter_map(move |f| layout.column(b, f)))
        .map(|c| (c, 2))
        .collect();
    pins.sort_unstable();
    pins.dedup();
    pins
}

/// Column maps of the symmetry group.
pub fn symmetry_maps(
    layout: &ColumnLayout,
    group: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>, PastingError> {
    group
        .iter()
        .enumerate()
        .map(|(k, g)| layout.permutation_map(g).ok_or(PastingError::BadSymmetry(k)))
        .collect()
}

/// Replaces every orbit by its lexicographically least row.
pub fn dedup_by_symmetry(
    rows: &[Row],
    group: &[Vec<usize>],
    layout: &ColumnLayout,
) -> Result<Vec<Row>, PastingError> {
    let maps = symmetry_maps(layout, group)?;
    let mut out: Vec<Row> = rows
        .par_iter()
        .map(|&r| maps.iter().map(|m| layout.permute(r, m)).fold(r, Row::min))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn checkpoint_path(cfg: &EnumerationConfig) -> Option<PathBuf> {
    cfg.checkpoint_dir
        .as_ref()
        .map(|d| d.join(format!("{}.ckpt", cfg.id)))
}

/// Pastes all chunk blocks with the scheduled filters and returns the
/// potential vectors.
pub fn run_enumeration(
    p: &CombinatorialPolytope,
    data: &CombinatorialData,
    lib: &DiagramLibrary,
    cfg: &EnumerationConfig,
) -> Result<Enumeration, PastingError> {
    let layout = column_layout(p, data);
    let all = chunks(p);
    let order: Vec<Chunk> = match &cfg.chunk_order {
        None => all.clone(),
        Some(o) => {
            let mut seen = o.clone();
            seen.sort_unstable();
            if seen != (0..all.len()).collect::<Vec<_>>() {
                return Err(PastingError::BadChunkOrder(all.len()));
            }
            o.iter().map(|&i| all[i].clone()).collect()
        }
    };
    let mut schedule = schedule_filters(p, data, &order, cfg.filters)?;
    if cfg.timing == FilterTiming::Final {
        for r in &mut schedule {
            r.layer = order.len();
        }
    }
    let pins = match cfg.approach {
        Approach::Basis => basis_pins(p, data, &layout, cfg.basis_pins),
        Approach::Direct => Vec::new(),
    };
    let pre_block = lib.vectors(LibraryKind::Elliptic(p.dim()));
    let last = cfg.max_layers.unwrap_or(order.len()).min(order.len());
    let ckpt = checkpoint_path(cfg);

    let mut trace = Vec::new();
    let (mut layer, mut determined, mut acc) = match &cfg.resume_from {
        Some(path) => resume(path, cfg, &layout)?,
        None => (0, 0, RowSource::Memory(Vec::new())),
    };
    let io_err = |layer: usize, ckpt: &Option<PathBuf>| {
        let checkpoint = ckpt.clone().filter(|p| p.exists());
        move |source| PastingError::Io {
            layer,
            checkpoint,
            source,
        }
    };
    while layer < last {
        let start = Instant::now();
        let chunk = &order[layer];
        let block = build_block(chunk, pre_block, &layout, &pins)?;
        let rules: Vec<CompiledRule> = schedule
            .iter()
            .filter(|r| r.layer == layer + 1)
            .map(|r| compile(&layout, r, lib))
            .collect();
        let keep = |r: Row| rules.iter().all(|c| c.keeps(r));
        let mut sink = RowSink::new(cfg.row_budget, cfg.spill_dir.as_deref());
        let mut pasted = 0u64;
        if layer == 0 {
            pasted = block.len() as u64;
            for &r in block.rows.iter().filter(|&&r| keep(r)) {
                sink.push(r).map_err(io_err(layer, &ckpt))?;
            }
        } else {
            let index = JoinIndex::new(&block, determined & block.determined);
            acc.for_each_batch(|batch| {
                let parts: Vec<(u64, Vec<Row>)> = batch
                    .par_chunks(4096)
                    .map(|part| {
                        let mut n = 0;
                        let mut out = Vec::new();
                        for &r in part {
                            index.probe(r, |x| {
                                n += 1;
                                if keep(x) {
                                    out.push(x);
                                }
                            });
                        }
                        (n, out)
                    })
                    .collect();
                for (n, out) in parts {
                    pasted += n;
                    for x in out {
                        sink.push(x)?;
                    }
                }
                Ok(())
            })
            .map_err(io_err(layer, &ckpt))?;
        }
        determined |= block.determined;
        let spilled = sink.spilled();
        drop(acc);
        acc = sink.finish().map_err(io_err(layer, &ckpt))?;
        layer += 1;
        trace.push(LayerStat {
            layer,
            chunk: chunk.facets,
            pasted,
            filtered: acc.len(),
            rules: rules.len(),
            seconds: start.elapsed().as_secs_f64(),
            spilled,
        });
        if let Some(path) = &ckpt {
            write_checkpoint(path, &cfg.id, layer, layout.columns(), determined, &mut acc)
                .map_err(io_err(layer, &None))?;
        }
        if acc.is_empty() {
            layer = last.max(layer);
            break;
        }
    }
    let complete = layer >= order.len() || acc.is_empty();
    let mut rows = acc.into_vec().map_err(io_err(layer, &ckpt))?;
    if complete && cfg.dedup {
        rows = dedup_by_symmetry(&rows, &data.symmetry, &layout)?;
    } else {
        rows.sort_unstable();
    }
    Ok(Enumeration {
        layout,
        schedule,
        pins,
        trace,
        rows,
        complete,
    })
}

fn resume(
    path: &std::path::Path,
    cfg: &EnumerationConfig,
    layout: &ColumnLayout,
) -> Result<(usize, Row, RowSource), PastingError> {
    let mismatch = |reason: String| PastingError::CheckpointMismatch {
        path: path.to_path_buf(),
        reason,
    };
    let (h, rows) = read_checkpoint(path).map_err(|e| mismatch(e.to_string()))?;
    if h.polytope != cfg.id {
        return Err(mismatch(format!("polytope {} expected {}", h.polytope, cfg.id)));
    }
    if h.layout != layout.columns() {
        return Err(mismatch("column layout differs".to_string()));
    }
    Ok((h.layer, h.determined, RowSource::Memory(rows)))
}
