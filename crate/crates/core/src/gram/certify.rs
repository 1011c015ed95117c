use std::fmt;

use super::closed::{fit_closed_form, ClosedForm, Surd, SurdField};
use super::schur::SchurReduction;
use super::solve::{solve_system, Solution, SolveOptions, SolveOutcome};
use super::SymbolicGramMatrix;
use crate::algebra::{inertia_f64, Interval, Signature};
use crate::combinatorics::{labels, CombinatorialPolytope, FacetSet};
use crate::diagram::{classify, Class, WeightedGraph, INFINITY};

/// `cosh` of the distance between two diverging facets.
#[derive(Clone, Debug)]
pub struct DottedValue {
    /// 1-based facet labels.
    pub pair: (usize, usize),
    pub cosh: f64,
    pub enclosure: Interval,
    pub closed_form: Option<ClosedForm>,
}

#[derive(Clone, Debug)]
pub struct SevenResolution {
    pub pair: (usize, usize),
    pub y: f64,
    pub k: u32,
}

#[derive(Clone, Debug)]
pub struct GramCertificate {
    pub size: usize,
    /// Coxeter weights with `0` at diverging pairs and resolved `k` at the
    /// weight-7 slots.
    pub weights: Vec<u32>,
    /// Row-major entries.
    pub matrix: Vec<f64>,
    pub signature: Signature,
    pub dotted: Vec<DottedValue>,
    pub sevens: Vec<SevenResolution>,
    /// The reduced system vanishes exactly at the closed forms.
    pub exact: bool,
    /// The unknown-free block, 1-based.
    pub block: Vec<usize>,
}

impl GramCertificate {
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.weights[crate::diagram::pair_index(self.size, a, b)]
    }

    pub fn cosh_values(&self) -> Vec<f64> {
        self.dotted.iter().map(|d| d.cosh).collect()
    }
}

impl fmt::Display for GramCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "signature {} exact {}", self.signature, self.exact)?;
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|j| {
                    if i == j {
                        "1".into()
                    } else {
                        match self.weight(i, j) {
                            0 => "∞".into(),
                            w => w.to_string(),
                        }
                    }
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        for d in &self.dotted {
            write!(
                f,
                "  cosh ρ({},{}) = {:.12}  width {:.1e}",
                d.pair.0,
                d.pair.1,
                d.cosh,
                d.enclosure.width()
            )?;
            if let Some(c) = &d.closed_form {
                write!(f, "  = {c}")?;
            }
            writeln!(f)?;
        }
        for s in &self.sevens {
            writeln!(f, "  y({},{}) = {:.12}  k = {}", s.pair.0, s.pair.1, s.y, s.k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    Signature(Signature),
    VertexNotElliptic(Vec<usize>),
    Parabolic(Vec<usize>),
    SevenNotInteger { pair: (usize, usize), y: f64 },
    NotDiverging { pair: (usize, usize) },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Signature(s) => write!(f, "signature {s}"),
            Rejection::VertexNotElliptic(v) => write!(f, "vertex {v:?} not elliptic"),
            Rejection::Parabolic(v) => write!(f, "parabolic subdiagram on {v:?}"),
            Rejection::SevenNotInteger { pair, y } => {
                write!(f, "y{pair:?} = {y} is not 2cos(π/k)")
            }
            Rejection::NotDiverging { pair } => write!(f, "cosh at {pair:?} is not above 1"),
        }
    }
}

/// Tolerance of the integer-angle test.
const ANGLE_TOL: f64 = 1e-9;

fn resolve_seven(y: &Interval) -> Option<u32> {
    let mid = y.mid();
    let k = (std::f64::consts::PI / (mid / 2.0).acos()).round();
    if !(7.0..=1e6).contains(&k) {
        return None;
    }
    let want = 2.0 * (std::f64::consts::PI / k).cos();
    ((want - mid).abs() <= ANGLE_TOL.max(y.width())).then_some(k as u32)
}

/// Exact substitution of fitted closed forms into the reduced system.
struct ExactCheck {
    field: SurdField,
    unknowns: Vec<Option<Surd>>,
}

fn exact_check(g: &SymbolicGramMatrix, red: &SchurReduction, sol: &Solution) -> Option<ExactCheck> {
    let nd = g.dotted().len();
    let mut field = SurdField::new();
    let mut locals = Vec::with_capacity(red.locals.len());
    for &v in &sol.locals {
        let form = fit_closed_form(v.abs())?;
        let s = field.from_form(&form)?;
        locals.push(if v < 0.0 { s.neg() } else { s });
    }
    if red
        .equations
        .iter()
        .any(|e| !field.eval(e, &locals).is_zero())
    {
        return None;
    }
    let mut unknowns = vec![None; g.num_unknowns()];
    for (k, &u) in red.locals.iter().enumerate() {
        unknowns[u] = Some(locals[k].clone());
    }
    for d in &red.derived {
        let mut v = field.eval(&d.entry, &locals);
        if d.unknown >= nd {
            v = v.add(&v).neg();
        }
        unknowns[d.unknown] = Some(v);
    }
    Some(ExactCheck { field, unknowns })
}

/// Connected subdiagrams without diverging pairs that are parabolic.
fn parabolic_subdiagram(g: &SymbolicGramMatrix) -> Option<Vec<usize>> {
    let m = g.size();
    for mask in 1u32..1 << m {
        let nodes: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if nodes.len() < 2 || nodes.len() > 7 {
            continue;
        }
        if nodes
            .iter()
            .any(|&i| nodes.iter().any(|&j| i < j && g.weight(i, j) == INFINITY))
        {
            continue;
        }
        let w: Vec<u8> = nodes
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| nodes[a + 1..].iter().map(move |&j| g.weight(i, j)))
            .collect();
        let Ok(d) = WeightedGraph::new(nodes.len(), w) else {
            continue;
        };
        if d.is_connected() && classify(&d) == Ok(Class::Parabolic) {
            return Some(nodes.iter().map(|i| i + 1).collect());
        }
    }
    None
}

fn vertex_not_elliptic(g: &SymbolicGramMatrix, vertices: &[FacetSet]) -> Option<Vec<usize>> {
    vertices.iter().find_map(|&v| {
        let nodes: Vec<usize> = labels(v).iter().map(|l| l - 1).collect();
        let w: Vec<u8> = nodes
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| nodes[a + 1..].iter().map(move |&j| g.weight(i, j)))
            .collect();
        let elliptic = WeightedGraph::new(nodes.len(), w)
            .ok()
            .and_then(|d| classify(&d).ok())
            == Some(Class::Elliptic);
        (!elliptic).then(|| labels(v))
    })
}

/// Verifies one solution. Besides the conditions checked here, the
/// signature of the completed matrix is that of the unknown-free block.
pub fn certify(
    g: &SymbolicGramMatrix,
    polytope: &CombinatorialPolytope,
    red: &SchurReduction,
    sol: &Solution,
) -> Result<GramCertificate, Rejection> {
    let m = g.size();
    let nd = g.dotted().len();
    if red.block_signature.neg != 1 {
        return Err(Rejection::Signature(red.block_signature));
    }
    if let Some(v) = vertex_not_elliptic(g, polytope.vertices()) {
        return Err(Rejection::VertexNotElliptic(v));
    }
    if let Some(p) = parabolic_subdiagram(g) {
        return Err(Rejection::Parabolic(p));
    }
    let exact = exact_check(g, red, sol);
    let mut dotted = Vec::new();
    for (k, &(i, j)) in g.dotted().iter().enumerate() {
        let x = sol.enclosures[k];
        if x.hi >= -1.0 {
            return Err(Rejection::NotDiverging { pair: (i + 1, j + 1) });
        }
        let closed_form = exact
            .as_ref()
            .and_then(|e| e.unknowns[k].as_ref().map(|s| (e, s.neg())))
            .and_then(|(e, s)| s.closed_form(&e.field));
        dotted.push(DottedValue {
            pair: (i + 1, j + 1),
            cosh: -sol.values[k],
            enclosure: -x,
            closed_form,
        });
    }
    let mut sevens = Vec::new();
    let mut weights: Vec<u32> = g.weights().iter().map(|&w| w as u32).collect();
    for (k, &(i, j)) in g.sevens().iter().enumerate() {
        let y = sol.enclosures[nd + k];
        let Some(kk) = resolve_seven(&y) else {
            return Err(Rejection::SevenNotInteger {
                pair: (i + 1, j + 1),
                y: sol.values[nd + k],
            });
        };
        weights[crate::diagram::pair_index(m, i, j)] = kk;
        sevens.push(SevenResolution {
            pair: (i + 1, j + 1),
            y: sol.values[nd + k],
            k: kk,
        });
    }
    let matrix = g.instantiate_f64(&sol.values);
    let numeric = inertia_f64(&matrix, m, 1e-7);
    let signature = Signature::new(red.block_signature.pos, 1, m - red.t.len());
    if numeric.is_some_and(|s| s != signature) {
        return Err(Rejection::Signature(numeric.expect("checked")));
    }
    Ok(GramCertificate {
        size: m,
        weights,
        matrix,
        signature,
        dotted,
        sevens,
        exact: exact.is_some(),
        block: red.t.iter().map(|i| i + 1).collect(),
    })
}

/// Outcome of the solver and certification on one potential matrix.
#[derive(Clone, Debug)]
pub struct MatrixResult {
    pub certificates: Vec<GramCertificate>,
    pub rejections: Vec<Rejection>,
    /// Set when the search did not complete.
    pub undecided: Option<String>,
}

pub fn solve_and_certify(
    g: &SymbolicGramMatrix,
    polytope: &CombinatorialPolytope,
    opts: &SolveOptions,
) -> MatrixResult {
    let outcome = solve_system(g, opts);
    let mut out = MatrixResult {
        certificates: Vec::new(),
        rejections: Vec::new(),
        undecided: None,
    };
    let red = match &outcome {
        SolveOutcome::Solved { reduction, .. } => reduction,
        SolveOutcome::WrongBlockSignature(r) => {
            out.rejections.push(Rejection::Signature(r.block_signature));
            return out;
        }
        SolveOutcome::Undecided { reason, .. } => {
            out.undecided = Some(reason.clone());
            return out;
        }
    };
    for sol in outcome.solutions() {
        match certify(g, polytope, red, sol) {
            Ok(c) => out.certificates.push(c),
            Err(r) => out.rejections.push(r),
        }
    }
    out
}
