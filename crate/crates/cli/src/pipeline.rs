//! Stage orchestration: ingest, libgen, enumerate, solve, glue, report.
//!
//! Every invocation runs the stages up to the requested one. The diagram
//! library and the enumerated vectors are reused from the output directory
//! when their recorded input hash matches; a file whose content no longer
//! matches its own hash stops the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use coxpoly::algebra::inertia_f64;
use coxpoly::combinatorics::{
    census, compute_data, filter_by_disjoint_pairs, parse_polytope_line, symmetry_group,
    CombinatorialData, CombinatorialPolytope,
};
use coxpoly::diagram::DiagramLibrary;
use coxpoly::gluing::{
    canonical_key, enumerate_orthogonal_prisms, glue_closure, PrismCatalog, Provenance,
};
use coxpoly::gram::{solve_and_certify, symbolize, GramCertificate, SolveOptions};
use coxpoly::pasting::{
    build_fuchsian_sets, column_layout, run_enumeration, Approach, ColumnLayout,
    EnumerationConfig, FuchsianSets, IntersectionFilter, Row,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifact::{read_hashed, sha256_hex, write_hashed, write_plain, ReadHashed};
use crate::export::{render, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Libgen,
    Enumerate,
    Solve,
    Glue,
    Report,
}

/// Polytopes that take hours with the default settings.
pub const HEAVY: &[usize] = &[2];

/// The polytopes admitting compact hyperbolic structures.
pub const DEFAULT_POLYTOPES: &[usize] = &[284, 302, 312, 313, 319, 322];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    Ids(Vec<usize>),
    /// Every polytope with at least two diverging facet pairs.
    Sweep,
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub stage: Stage,
    pub approach: Approach,
    pub max_weight: u8,
    pub timeout: Duration,
    pub row_budget: usize,
    pub out: PathBuf,
    pub selection: Selection,
    pub heavy: bool,
    pub export: Option<Format>,
}

#[derive(Debug)]
pub enum PipelineError {
    Input(String),
    /// An intermediate no longer matches its recorded hash.
    Stale(PathBuf),
    Io(io::Error),
    Verify(String),
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Input(m) => write!(f, "input error: {m}"),
            PipelineError::Stale(p) => {
                write!(f, "checkpoint hash mismatch in {}; remove it to recompute", p.display())
            }
            PipelineError::Io(e) => write!(f, "i/o error: {e}"),
            PipelineError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<io::Error> for PipelineError {
    fn from(e: io::Error) -> Self {
        PipelineError::Io(e)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct PolytopeReport {
    pub id: usize,
    pub seilper: usize,
    pub filtered: usize,
    pub certificates: usize,
    #[serde(rename = "final")]
    pub final_count: usize,
    pub undecided: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub approach: String,
    pub stage: String,
    pub polytopes: Vec<PolytopeReport>,
    pub prisms: Option<usize>,
    pub undecided: Vec<String>,
    pub complete: bool,
    /// Dataset manifest lines of the diagram library.
    pub datasets: Vec<String>,
    /// Relative path to SHA-256 of every file written.
    pub artifacts: BTreeMap<String, String>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

struct Work {
    id: usize,
    polytope: CombinatorialPolytope,
    data: CombinatorialData,
    layout: ColumnLayout,
    rows: Vec<Row>,
    kept: Vec<Row>,
    solved: Vec<GramCertificate>,
    finals: Vec<(GramCertificate, String)>,
    undecided: Vec<String>,
}

fn approach_name(a: Approach) -> &'static str {
    match a {
        Approach::Basis => "basis",
        Approach::Direct => "direct",
    }
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::Ingest => "ingest",
        Stage::Libgen => "libgen",
        Stage::Enumerate => "enumerate",
        Stage::Solve => "solve",
        Stage::Glue => "glue",
        Stage::Report => "report",
    }
}

fn load_input(cfg: &PipelineConfig) -> Result<Vec<CombinatorialPolytope>, PipelineError> {
    let Some(path) = &cfg.input else {
        return Ok(census());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            parse_polytope_line(l)
                .map(|p| p.reversed())
                .map_err(|e| PipelineError::Input(format!("{} line {}: {e}", path.display(), k + 1)))
        })
        .collect()
}

fn select(cfg: &PipelineConfig, all: &[CombinatorialPolytope]) -> Result<Vec<usize>, PipelineError> {
    let ids = match &cfg.selection {
        Selection::Ids(ids) => ids.clone(),
        Selection::Sweep => {
            if !cfg.heavy {
                return Err(PipelineError::Input(
                    "the full sweep runs only with --heavy".into(),
                ));
            }
            filter_by_disjoint_pairs(all).values().flatten().map(|i| i + 1).collect()
        }
    };
    for &id in &ids {
        if id == 0 || id > all.len() {
            return Err(PipelineError::Input(format!(
                "polytope {id} is outside 1..{}",
                all.len()
            )));
        }
        if HEAVY.contains(&id) && !cfg.heavy {
            return Err(PipelineError::Input(format!(
                "polytope {id} is a heavy case; pass --heavy to run it"
            )));
        }
    }
    let mut ids = ids;
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn rel(out: &Path, p: &Path) -> String {
    p.strip_prefix(out).unwrap_or(p).display().to_string()
}

fn library(cfg: &PipelineConfig, report: &mut RunReport) -> Result<DiagramLibrary, PipelineError> {
    let dir = cfg.out.join("library");
    let record = |report: &mut RunReport| -> io::Result<()> {
        let manifest = fs::read(dir.join("manifest.txt"))?;
        report
            .artifacts
            .insert(rel(&cfg.out, &dir.join("manifest.txt")), sha256_hex(&manifest));
        Ok(())
    };
    if dir.join("manifest.txt").exists() {
        match DiagramLibrary::load(&dir) {
            Ok(lib) if lib.max_weight() == cfg.max_weight => {
                record(report)?;
                return Ok(lib);
            }
            Ok(_) => {}
            Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                return Err(PipelineError::Stale(dir.join("manifest.txt")))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let lib = DiagramLibrary::build(cfg.max_weight)
        .map_err(|e| PipelineError::Input(format!("library: {e}")))?;
    lib.save(&dir)?;
    record(report)?;
    Ok(lib)
}

fn parse_rows(body: &str, layout: &ColumnLayout) -> Option<(Vec<Row>, Vec<Row>)> {
    let mut rows = Vec::new();
    let mut kept = Vec::new();
    for line in body.lines().filter(|l| !l.is_empty()) {
        let (vec, flag) = line.split_once(' ').unwrap_or((line, ""));
        let w: Option<Vec<u8>> = vec.split(',').map(|t| t.parse().ok()).collect();
        let w = w?;
        if w.len() != layout.len() {
            return None;
        }
        let r = layout.encode(&w);
        rows.push(r);
        if flag == "kept" {
            kept.push(r);
        }
    }
    Some((rows, kept))
}

fn enumerate(
    cfg: &PipelineConfig,
    w: &mut Work,
    lib: &DiagramLibrary,
    sets: &FuchsianSets,
    report: &mut RunReport,
) -> Result<(), PipelineError> {
    let path = cfg.out.join("enumerate").join(format!("P{}.txt", w.id));
    let datasets: Vec<String> = report.datasets.clone();
    let input = sha256_hex(
        format!(
            "{}\n{}\n{}\n{}",
            w.polytope.to_line(),
            approach_name(cfg.approach),
            cfg.max_weight,
            datasets.join("\n")
        )
        .as_bytes(),
    );
    let kind = "coxpoly-seilper v1";
    match read_hashed(&path, kind, &input)? {
        ReadHashed::Valid(body) => {
            if let Some((rows, kept)) = parse_rows(&body, &w.layout) {
                w.rows = rows;
                w.kept = kept;
                let text = fs::read(&path)?;
                report.artifacts.insert(rel(&cfg.out, &path), sha256_hex(&text));
                return Ok(());
            }
            return Err(PipelineError::Stale(path));
        }
        ReadHashed::Corrupt(p) => return Err(PipelineError::Stale(p)),
        ReadHashed::Missing | ReadHashed::Outdated => {}
    }
    let spill = cfg.out.join("spill");
    fs::create_dir_all(&spill)?;
    let ecfg = EnumerationConfig {
        id: format!("P{}", w.id),
        approach: cfg.approach,
        row_budget: cfg.row_budget,
        spill_dir: Some(spill),
        ..Default::default()
    };
    let e = run_enumeration(&w.polytope, &w.data, lib, &ecfg)
        .map_err(|e| PipelineError::Input(format!("enumeration of P{}: {e}", w.id)))?;
    let filter = IntersectionFilter::new(&w.polytope, &e.layout, sets);
    w.rows = e.rows;
    w.kept = w.rows.iter().copied().filter(|&r| filter.keeps(r)).collect();
    let mut body = String::new();
    for &r in &w.rows {
        let flag = if filter.keeps(r) { " kept" } else { "" };
        let _ = writeln!(body, "{}{flag}", w.layout.format_row(r));
    }
    let sha = write_hashed(&path, kind, &input, &body)?;
    report.artifacts.insert(rel(&cfg.out, &path), sha);
    Ok(())
}

fn solve(cfg: &PipelineConfig, w: &mut Work) {
    let opts = SolveOptions {
        timeout: cfg.timeout,
        ..Default::default()
    };
    let results: Vec<_> = w
        .kept
        .par_iter()
        .map(|&r| {
            let g = symbolize(r, &w.layout).expect("determined row");
            (r, solve_and_certify(&g, &w.polytope, &opts))
        })
        .collect();
    for (r, res) in results {
        if let Some(u) = res.undecided {
            w.undecided
                .push(format!("P{} {}: {u}", w.id, w.layout.format_row(r)));
        }
        w.solved.extend(res.certificates);
    }
}

fn glue(cfg: &PipelineConfig, w: &mut Work, catalog: Option<&PrismCatalog>) {
    let group = symmetry_group(&w.polytope);
    let mut entries: Vec<(GramCertificate, Option<Provenance>)> = match catalog {
        Some(cat) => {
            let opts = SolveOptions {
                timeout: cfg.timeout,
                ..Default::default()
            };
            let closure = glue_closure(&w.polytope, &w.data, &w.solved, &cat.prisms, &opts);
            w.undecided
                .extend(closure.undecided.iter().map(|u| format!("P{} glued {u}", w.id)));
            closure
                .entries
                .into_iter()
                .map(|e| (e.certificate, Some(e.provenance)))
                .collect()
        }
        None => w.solved.iter().cloned().map(|c| (c, None)).collect(),
    };
    let keys: Vec<_> = entries.iter().map(|(c, _)| canonical_key(c, &group)).collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut position = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let describe = |p: &Option<Provenance>| match p {
        None => "direct".to_string(),
        Some(Provenance::Basis) => "basis".to_string(),
        Some(Provenance::Glued {
            parent,
            facet,
            prism,
        }) => format!(
            "glued onto facet {facet} of certificate {} with prism {}",
            position[*parent] + 1,
            prism + 1
        ),
    };
    let described: Vec<String> = entries.iter().map(|(_, p)| describe(p)).collect();
    let mut taken: Vec<Option<(GramCertificate, String)>> = entries
        .drain(..)
        .zip(described)
        .map(|((c, _), d)| Some((c, d)))
        .collect();
    w.finals = order
        .iter()
        .map(|&i| taken[i].take().expect("each entry once"))
        .collect();
}

fn gram_line(c: &GramCertificate) -> String {
    let v: Vec<String> = c.matrix.iter().map(|x| format!("{x:.17e}")).collect();
    format!("gram {}", v.join(" "))
}

fn certificate_file(cfg: &PipelineConfig, w: &Work) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "polytope {}", w.id);
    let _ = writeln!(s, "approach {}", approach_name(cfg.approach));
    let _ = writeln!(s, "certificates {}", w.finals.len());
    for (k, (c, prov)) in w.finals.iter().enumerate() {
        let _ = writeln!(s, "\ncertificate {}", k + 1);
        let _ = writeln!(s, "provenance {prov}");
        let _ = writeln!(s, "block {:?}", c.block);
        let _ = write!(s, "{c}");
        for y in &c.sevens {
            let _ = writeln!(s, "  k({},{}) = {}", y.pair.0, y.pair.1, y.k);
        }
        let _ = writeln!(s, "{}", gram_line(c));
    }
    s
}

fn prism_file(cat: &PrismCatalog) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prism vectors {}", cat.seilper);
    let _ = writeln!(s, "prisms {}", cat.prisms.len());
    for (k, p) in cat.prisms.iter().enumerate() {
        let _ = writeln!(
            s,
            "\nprism {} orthogonal end {} far end {} length {:.12}",
            k + 1,
            p.orthogonal + 1,
            p.far + 1,
            p.length()
        );
        let _ = write!(s, "{}", p.certificate);
        let _ = writeln!(s, "{}", gram_line(&p.certificate));
    }
    s
}

fn report_text(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "coxpoly report");
    let _ = writeln!(s, "approach {}", r.approach);
    let _ = writeln!(s, "stage {}", r.stage);
    let _ = writeln!(s, "polytope seilper filtered certificates final undecided");
    for p in &r.polytopes {
        let _ = writeln!(
            s,
            "P{} {} {} {} {} {}",
            p.id,
            p.seilper,
            p.filtered,
            p.certificates,
            p.final_count,
            p.undecided.len()
        );
    }
    let total: usize = r.polytopes.iter().map(|p| p.final_count).sum();
    let _ = writeln!(s, "total {total}");
    if let Some(n) = r.prisms {
        let _ = writeln!(s, "prisms {n}");
    }
    if r.undecided.is_empty() {
        let _ = writeln!(s, "undecided none");
    } else {
        for u in &r.undecided {
            let _ = writeln!(s, "undecided {u}");
        }
    }
    let _ = writeln!(s, "complete {}", if r.complete { "yes" } else { "no" });
    s
}

pub fn run(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    if cfg.timeout.is_zero() {
        return Err(PipelineError::Input("timeout must be positive".into()));
    }
    fs::create_dir_all(&cfg.out)?;
    let mut report = RunReport {
        approach: approach_name(cfg.approach).into(),
        stage: stage_name(cfg.stage).into(),
        ..Default::default()
    };
    let mut clock = Instant::now();
    let mut lap = |report: &mut RunReport, name: &str| {
        report.timings.push((name.to_string(), clock.elapsed().as_secs_f64()));
        clock = Instant::now();
    };

    let all = load_input(cfg)?;
    let ids = select(cfg, &all)?;
    let mut work: Vec<Work> = ids
        .iter()
        .map(|&id| {
            let polytope = all[id - 1].clone();
            let data = compute_data(&polytope);
            let layout = column_layout(&polytope, &data);
            Work {
                id,
                polytope,
                data,
                layout,
                rows: Vec::new(),
                kept: Vec::new(),
                solved: Vec::new(),
                finals: Vec::new(),
                undecided: Vec::new(),
            }
        })
        .collect();
    let mut ingest = String::new();
    for w in &work {
        let _ = writeln!(ingest, "{} {}", w.id, w.polytope.to_line());
    }
    let path = cfg.out.join("ingest.txt");
    let sha = write_plain(&path, &ingest)?;
    report.artifacts.insert(rel(&cfg.out, &path), sha);
    lap(&mut report, "ingest");

    let finish = |mut report: RunReport, work: &[Work]| -> Result<RunReport, PipelineError> {
        report.polytopes = work
            .iter()
            .map(|w| PolytopeReport {
                id: w.id,
                seilper: w.rows.len(),
                filtered: w.kept.len(),
                certificates: w.solved.len(),
                final_count: w.finals.len(),
                undecided: w.undecided.clone(),
            })
            .collect();
        report.undecided = work.iter().flat_map(|w| w.undecided.clone()).collect();
        report.complete = report.undecided.is_empty() && cfg.stage >= Stage::Glue;
        Ok(report)
    };
    if cfg.stage == Stage::Ingest {
        return finish(report, &work);
    }

    let lib = library(cfg, &mut report)?;
    report.datasets = coxpoly::diagram::LibraryKind::standard()
        .into_iter()
        .map(|k| lib.manifest(k).to_string())
        .collect();
    lap(&mut report, "libgen");
    if cfg.stage == Stage::Libgen {
        return finish(report, &work);
    }

    let sets = build_fuchsian_sets(&lib)
        .map_err(|e| PipelineError::Input(format!("restriction sets: {e}")))?;
    for w in &mut work {
        enumerate(cfg, w, &lib, &sets, &mut report)?;
    }
    lap(&mut report, "enumerate");
    if cfg.stage == Stage::Enumerate {
        return finish(report, &work);
    }

    for w in &mut work {
        solve(cfg, w);
    }
    lap(&mut report, "solve");
    if cfg.stage == Stage::Solve {
        return finish(report, &work);
    }

    let catalog = match cfg.approach {
        Approach::Basis => {
            let opts = SolveOptions {
                timeout: cfg.timeout,
                ..Default::default()
            };
            let cat = enumerate_orthogonal_prisms(&lib, &opts)
                .map_err(|e| PipelineError::Input(format!("prisms: {e}")))?;
            report
                .undecided
                .extend(cat.undecided.iter().map(|u| format!("prism {u}")));
            let path = cfg.out.join("prisms.txt");
            let sha = write_plain(&path, &prism_file(&cat))?;
            report.artifacts.insert(rel(&cfg.out, &path), sha);
            report.prisms = Some(cat.prisms.len());
            Some(cat)
        }
        Approach::Direct => None,
    };
    let prism_undecided = report.undecided.clone();
    for w in &mut work {
        glue(cfg, w, catalog.as_ref());
    }
    for w in &work {
        let path = cfg.out.join("certificates").join(format!("P{}.txt", w.id));
        let sha = write_plain(&path, &certificate_file(cfg, w))?;
        report.artifacts.insert(rel(&cfg.out, &path), sha);
    }
    if let Some(format) = cfg.export {
        export(cfg, &work, format, &mut report)?;
    }
    lap(&mut report, "glue");
    let mut report = finish(report, &work)?;
    report.undecided.splice(0..0, prism_undecided);
    report.complete = report.undecided.is_empty();
    if cfg.stage == Stage::Glue {
        return Ok(report);
    }

    let path = cfg.out.join("report.txt");
    let sha = write_plain(&path, &report_text(&report))?;
    report.artifacts.insert(rel(&cfg.out, &path), sha);
    let mut timings = String::new();
    for (name, secs) in &report.timings {
        let _ = writeln!(timings, "{name} {secs:.3}");
    }
    write_plain(&cfg.out.join("timings.txt"), &timings)?;
    let json = serde_json::to_string_pretty(&report).expect("serialisable report");
    write_plain(&cfg.out.join("summary.json"), &(json + "\n"))?;
    Ok(report)
}

fn export(
    cfg: &PipelineConfig,
    work: &[Work],
    format: Format,
    report: &mut RunReport,
) -> Result<(), PipelineError> {
    let dir = cfg.out.join("diagrams").join(format.extension());
    for w in work {
        for (k, (c, _)) in w.finals.iter().enumerate() {
            let name = format!("P{}_{}", w.id, k + 1);
            let path = dir.join(format!("{name}.{}", format.extension()));
            let sha = write_plain(&path, &render(c, &name, format))?;
            report.artifacts.insert(rel(&cfg.out, &path), sha);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub files: usize,
    pub certificates: usize,
}

/// Re-checks an output directory: file hashes, count consistency and the
/// signature of every stored Gram matrix.
pub fn verify(out: &Path) -> Result<Verification, PipelineError> {
    let summary = out.join("summary.json");
    let text = match fs::read_to_string(&summary) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(PipelineError::Input(format!(
                "nothing to verify in {}",
                out.display()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let report: RunReport = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Verify(format!("summary.json: {e}")))?;
    for (file, sha) in &report.artifacts {
        let bytes = fs::read(out.join(file))
            .map_err(|e| PipelineError::Verify(format!("{file}: {e}")))?;
        if &sha256_hex(&bytes) != sha {
            return Err(PipelineError::Verify(format!("{file}: content hash mismatch")));
        }
    }
    for p in &report.polytopes {
        if p.certificates > p.filtered || p.filtered > p.seilper {
            return Err(PipelineError::Verify(format!("P{}: inconsistent counts", p.id)));
        }
    }
    let mut certificates = 0;
    for p in &report.polytopes {
        let file = format!("certificates/P{}.txt", p.id);
        let Ok(body) = fs::read_to_string(out.join(&file)) else {
            continue;
        };
        let mut found = 0;
        for line in body.lines().filter_map(|l| l.strip_prefix("gram ")) {
            let v: Result<Vec<f64>, _> = line.split(' ').map(str::parse).collect();
            let v = v.map_err(|e| PipelineError::Verify(format!("{file}: {e}")))?;
            let n = (v.len() as f64).sqrt() as usize;
            if n * n != v.len() || n < 6 {
                return Err(PipelineError::Verify(format!("{file}: malformed matrix")));
            }
            let sig = inertia_f64(&v, n, 1e-7);
            if sig.is_some_and(|s| s.pos != 5 || s.neg != 1) {
                return Err(PipelineError::Verify(format!(
                    "{file}: matrix {} has signature {}",
                    found + 1,
                    sig.expect("checked")
                )));
            }
            found += 1;
        }
        if found != p.final_count {
            return Err(PipelineError::Verify(format!(
                "{file}: {found} matrices, report lists {}",
                p.final_count
            )));
        }
        certificates += found;
    }
    Ok(Verification {
        files: report.artifacts.len(),
        certificates,
    })
}
