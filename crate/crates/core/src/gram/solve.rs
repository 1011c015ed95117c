//! All real solutions of a reduced system inside the constraint box.
//!
//! Interval branch and bound with a Krawczyk test. Dotted unknowns are
//! compactified as `x = −1/s`, `s ∈ (0, 1)`; `y` ranges over `(1.8, 2)`.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_traits::Zero;

use super::schur::{ReductionError, SchurReduction};
use super::{SymbolicGramMatrix, Y_RANGE};
use crate::algebra::{AlgebraicNumber, Interval, Poly};

/// Dotted values above `1/S_MIN` are not searched.
pub const S_MIN: f64 = 1e-6;
/// Dotted values below `1/S_MAX` are not searched.
pub const S_MAX: f64 = 1.0 - 1e-9;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub timeout: Duration,
    pub budget: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            budget: 2_000_000,
        }
    }
}

/// One isolated solution.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Every unknown of the matrix, `x`s then `y`s.
    pub values: Vec<f64>,
    pub enclosures: Vec<Interval>,
    /// The local unknowns of the reduction, in its order.
    pub locals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// The search completed; the list may be empty.
    Solved {
        reduction: SchurReduction,
        solutions: Vec<Solution>,
    },
    /// The block `G_T` has a signature other than `(n−1, 1)`, so no rank-6
    /// completion has the hyperbolic signature.
    WrongBlockSignature(SchurReduction),
    Undecided {
        reason: String,
        partial: Vec<Solution>,
    },
}

impl SolveOutcome {
    pub fn solutions(&self) -> &[Solution] {
        match self {
            SolveOutcome::Solved { solutions, .. } => solutions,
            SolveOutcome::Undecided { partial, .. } => partial,
            SolveOutcome::WrongBlockSignature(_) => &[],
        }
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, SolveOutcome::Undecided { .. })
    }
}

struct Forms {
    float: Poly<f64>,
    interval: Poly<Interval>,
}

impl Forms {
    fn new(p: &Poly<AlgebraicNumber>) -> Self {
        Self {
            float: p.map(|c| c.to_f64()),
            interval: p.map(Interval::enclose),
        }
    }
}

/// Equations in box coordinates.
struct BoxedSystem {
    n: usize,
    nd: usize,
    eqs: Vec<Forms>,
    jac: Vec<Vec<Forms>>,
    /// Must be negative.
    negative: Vec<Forms>,
    /// Must be positive.
    positive: Vec<Forms>,
}

fn boxed(p: &Poly<AlgebraicNumber>, nd: usize) -> Poly<AlgebraicNumber> {
    (0..nd).fold(p.clone(), |q, k| q.reciprocal_in(k, &AlgebraicNumber::from_int(-1)))
}

impl BoxedSystem {
    fn new(red: &SchurReduction, nd_total: usize) -> Self {
        let n = red.num_locals();
        let nd = red.local_dotted;
        let one = Poly::constant(n, AlgebraicNumber::from_int(1));
        let eqs_exact: Vec<Poly<AlgebraicNumber>> =
            red.equations.iter().map(|e| boxed(e, nd)).collect();
        let jac = eqs_exact
            .iter()
            .map(|e| {
                (0..n)
                    .map(|k| Forms::new(&e.derivative(k, AlgebraicNumber::from_int)))
                    .collect()
            })
            .collect();
        let mut negative = Vec::new();
        let mut positive = Vec::new();
        for d in &red.derived {
            if d.unknown < nd_total {
                negative.push(Forms::new(&boxed(&(&d.entry + &one), nd)));
            } else {
                // y = −2·entry ∈ (1.8, 2).
                let y = d.entry.scale(&AlgebraicNumber::from_int(-2));
                let lo = AlgebraicNumber::from_ratio(9, 5);
                positive.push(Forms::new(&boxed(&(&y - &Poly::constant(n, lo)), nd)));
                let two = Poly::constant(n, AlgebraicNumber::from_int(2));
                positive.push(Forms::new(&boxed(&(&two - &y), nd)));
            }
        }
        Self {
            n,
            nd,
            eqs: eqs_exact.iter().map(Forms::new).collect(),
            jac,
            negative,
            positive,
        }
    }

    fn domain(&self, k: usize) -> (f64, f64) {
        if k < self.nd {
            (0.0, 1.0)
        } else {
            Y_RANGE
        }
    }

    fn initial(&self) -> Vec<Interval> {
        (0..self.n)
            .map(|k| {
                let (a, b) = self.domain(k);
                Interval::new(a, b)
            })
            .collect()
    }

    fn scale(&self, k: usize) -> f64 {
        let (a, b) = self.domain(k);
        b - a
    }

    fn excluded(&self, b: &[Interval]) -> bool {
        self.eqs.iter().any(|e| !e.interval.eval(b).contains_zero())
            || self.negative.iter().any(|c| c.interval.eval(b).lo >= 0.0)
            || self.positive.iter().any(|c| c.interval.eval(b).hi <= 0.0)
    }

    /// Boxes within `S_MIN` of `x = ∞` or within `1 − S_MAX` of `x = −1`.
    fn degenerate(&self, b: &[Interval]) -> bool {
        b[..self.nd].iter().any(|iv| iv.hi < S_MIN || iv.lo > S_MAX)
    }

    fn residual(&self, z: &[f64]) -> Vec<f64> {
        self.eqs.iter().map(|e| e.float.eval(z)).collect()
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        self.jac
            .iter()
            .map(|row| row.iter().map(|d| d.float.eval(z)).collect())
            .collect()
    }

    /// Gauss–Newton from `z`; `None` if it leaves the neighbourhood of the
    /// domain or does not converge.
    fn newton(&self, mut z: Vec<f64>) -> Option<Vec<f64>> {
        for _ in 0..60 {
            let f = self.residual(&z);
            let j = self.jacobian(&z);
            let n = self.n;
            let mut a = vec![vec![0.0; n]; n];
            let mut rhs = vec![0.0; n];
            for (row, fi) in j.iter().zip(&f) {
                for p in 0..n {
                    rhs[p] -= row[p] * fi;
                    for q in 0..n {
                        a[p][q] += row[p] * row[q];
                    }
                }
            }
            let step = solve_dense(a, rhs)?;
            let mut size = 0.0f64;
            for k in 0..n {
                z[k] += step[k];
                size = size.max(step[k].abs() / self.scale(k));
                let (lo, hi) = self.domain(k);
                let w = hi - lo;
                if !(lo - w..=hi + w).contains(&z[k]) {
                    return None;
                }
            }
            if size < 1e-15 {
                return Some(z);
            }
        }
        let f = self.residual(&z);
        (f.iter().all(|v| v.abs() < 1e-10)).then_some(z)
    }

    /// Square subsystem with the best-conditioned Jacobian at `z`.
    fn square_rows(&self, z: &[f64]) -> Option<Vec<usize>> {
        let j = self.jacobian(z);
        let m = j.len();
        let n = self.n;
        if m < n {
            return None;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        for mask in 0u32..1 << m {
            if mask.count_ones() as usize != n {
                continue;
            }
            let rows: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let sub: Vec<Vec<f64>> = rows
                .iter()
                .map(|&i| {
                    let norm = j[i].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                    j[i].iter().map(|v| v / norm).collect()
                })
                .collect();
            let d = det_dense(sub).abs();
            if best.as_ref().is_none_or(|(b, _)| d > *b) {
                best = Some((d, rows));
            }
        }
        best.filter(|(d, _)| *d > 1e-12).map(|(_, r)| r)
    }

    /// Krawczyk operator on the box for the given rows. `Some(true)`:
    /// unique root inside; `Some(false)`: no root; `None`: inconclusive.
    fn krawczyk(&self, rows: &[usize], b: &[Interval]) -> Option<bool> {
        let n = self.n;
        let z: Vec<f64> = b.iter().map(Interval::mid).collect();
        let zi: Vec<Interval> = z.iter().map(|&v| Interval::point(v)).collect();
        let jm = self.jacobian(&z);
        let jm: Vec<Vec<f64>> = rows.iter().map(|&i| jm[i].clone()).collect();
        let y = invert_dense(jm)?;
        let fz: Vec<Interval> = rows.iter().map(|&i| self.eqs[i].interval.eval(&zi)).collect();
        let jb: Vec<Vec<Interval>> = rows
            .iter()
            .map(|&i| self.jac[i].iter().map(|d| d.interval.eval(b)).collect())
            .collect();
        let mut inside = true;
        for p in 0..n {
            let mut k = zi[p];
            for q in 0..n {
                k = k - Interval::point(y[p][q]) * fz[q];
            }
            for q in 0..n {
                let mut m = if p == q { Interval::point(1.0) } else { Interval::zero() };
                for r in 0..n {
                    m = m - Interval::point(y[p][r]) * jb[r][q];
                }
                k = k + m * (b[q] - zi[q]);
            }
            match k.intersect(&b[p]) {
                None => return Some(false),
                Some(_) => inside &= k.is_subset_of(&b[p]),
            }
        }
        inside.then_some(true)
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn det_dense(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let Some(p) = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())) else {
            return 0.0;
        };
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    det
}

fn invert_dense(a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols: Option<Vec<Vec<f64>>> = (0..n)
        .map(|c| solve_dense(a.clone(), (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect()))
        .collect();
    let cols = cols?;
    Some((0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect())
}

fn contains_box(outer: &[Interval], inner: &[Interval]) -> bool {
    outer.iter().zip(inner).all(|(o, i)| o.lo <= i.lo && i.hi <= o.hi)
}

/// Local values and enclosures in original coordinates.
fn unbox(z: &[f64], b: &[Interval], nd: usize) -> (Vec<f64>, Vec<Interval>) {
    let vals = z
        .iter()
        .enumerate()
        .map(|(k, &v)| if k < nd { -1.0 / v } else { v })
        .collect();
    let encl = b
        .iter()
        .enumerate()
        .map(|(k, iv)| {
            if k < nd {
                -iv.recip().unwrap_or(Interval::new(f64::NEG_INFINITY, f64::INFINITY))
            } else {
                *iv
            }
        })
        .collect();
    (vals, encl)
}

fn complete(
    g: &SymbolicGramMatrix,
    red: &SchurReduction,
    locals: Vec<f64>,
    local_encl: Vec<Interval>,
) -> Solution {
    let total = g.num_unknowns();
    let mut values = vec![f64::NAN; total];
    let mut enclosures = vec![Interval::point(f64::NAN); total];
    for (k, &u) in red.locals.iter().enumerate() {
        values[u] = locals[k];
        enclosures[u] = local_encl[k];
    }
    let nd = g.dotted().len();
    for d in &red.derived {
        let v = d.entry.map(|c| c.to_f64()).eval(&locals);
        let iv = d.entry.map(Interval::enclose).eval(&local_encl);
        if d.unknown < nd {
            values[d.unknown] = v;
            enclosures[d.unknown] = iv;
        } else {
            values[d.unknown] = -2.0 * v;
            enclosures[d.unknown] = Interval::point(-2.0) * iv;
        }
    }
    Solution {
        values,
        enclosures,
        locals,
    }
}

/// Whether every local unknown lies strictly inside its range, with the
/// box proven clear of the boundary.
fn strictly_inside(b: &[Interval], sys: &BoxedSystem) -> Option<bool> {
    let mut all = true;
    for (k, iv) in b.iter().enumerate() {
        let (lo, hi) = sys.domain(k);
        if iv.hi <= lo || iv.lo >= hi {
            return Some(false);
        }
        all &= iv.lo > lo && iv.hi < hi;
    }
    all.then_some(true)
}

/// Solves the rank-6 conditions of `g`.
pub fn solve_system(g: &SymbolicGramMatrix, opts: &SolveOptions) -> SolveOutcome {
    let red = match SchurReduction::new(g) {
        Ok(r) => r,
        Err(ReductionError::NoBlock) => {
            return SolveOutcome::Undecided {
                reason: "no unknown-free nondegenerate 6-facet block".into(),
                partial: Vec::new(),
            }
        }
    };
    let want = g.size().min(6);
    if red.block_signature.neg != 1 || red.block_signature.pos != want - 1 {
        return SolveOutcome::WrongBlockSignature(red);
    }
    if red.num_locals() == 0 {
        return solve_constant(g, red);
    }
    let sys = BoxedSystem::new(&red, g.dotted().len());
    let start = Instant::now();
    let mut stack = vec![sys.initial()];
    let mut found: Vec<(Vec<Interval>, Option<Solution>)> = Vec::new();
    let mut visited = 0usize;
    let mut unresolved: Option<String> = None;
    while let Some(b) = stack.pop() {
        visited += 1;
        if visited > opts.budget || start.elapsed() > opts.timeout {
            unresolved = Some(format!("search budget exhausted after {visited} boxes"));
            break;
        }
        if found.iter().any(|(k, _)| contains_box(k, &b)) || sys.excluded(&b) || sys.degenerate(&b) {
            continue;
        }
        let width = (0..sys.n)
            .map(|k| b[k].width() / sys.scale(k))
            .fold(0.0, f64::max);
        if width < 0.25 {
            let mid: Vec<f64> = b.iter().map(Interval::mid).collect();
            if let Some(z) = sys.newton(mid) {
                if !found.iter().any(|(k, _)| k.iter().zip(&z).all(|(iv, v)| iv.contains(*v))) {
                    if let Some(hit) = isolate(&sys, &z) {
                        let sol = accept(g, &red, &sys, &hit.tight);
                        if let Err(reason) = &sol {
                            if unresolved.is_none() && !reason.is_empty() {
                                unresolved = Some(reason.clone());
                            }
                        }
                        found.push((hit.wide, sol.ok().flatten()));
                        if found.iter().any(|(k, _)| contains_box(k, &b)) {
                            continue;
                        }
                    }
                }
            }
        }
        if width < 0.25 {
            if let Some(rows) = sys.square_rows(&b.iter().map(Interval::mid).collect::<Vec<_>>()) {
                if sys.krawczyk(&rows, &b) == Some(false) {
                    continue;
                }
            }
        }
        if width < 1e-10 {
            unresolved.get_or_insert_with(|| "unisolated solution cluster".into());
            continue;
        }
        let k = (0..sys.n)
            .max_by(|&i, &j| {
                (b[i].width() / sys.scale(i))
                    .partial_cmp(&(b[j].width() / sys.scale(j)))
                    .unwrap_or(Ordering::Equal)
            })
            .expect("at least one variable");
        let (l, r) = b[k].split();
        let mut right = b.clone();
        right[k] = r;
        let mut left = b;
        left[k] = l;
        stack.push(right);
        stack.push(left);
    }
    let solutions: Vec<Solution> = found.into_iter().filter_map(|(_, s)| s).collect();
    match unresolved {
        None => SolveOutcome::Solved {
            reduction: red,
            solutions,
        },
        Some(reason) => SolveOutcome::Undecided {
            reason,
            partial: solutions,
        },
    }
}

/// A box around `z` proven by Krawczyk to hold exactly one root of a
/// square subsystem.
/// Boxes with a unique root: a tight enclosure and the largest proven box.
struct Isolated {
    tight: Vec<Interval>,
    wide: Vec<Interval>,
}

fn isolate(sys: &BoxedSystem, z: &[f64]) -> Option<Isolated> {
    let rows = sys.square_rows(z)?;
    let around = |r: f64| -> Vec<Interval> {
        z.iter()
            .enumerate()
            .map(|(k, &v)| {
                let h = r * sys.scale(k) * (1.0 + v.abs());
                Interval::new(v - h, v + h)
            })
            .collect()
    };
    let mut proven = None;
    for r in [1e-12, 1e-10, 1e-8, 1e-6] {
        match sys.krawczyk(&rows, &around(r)) {
            Some(true) => {
                proven = Some(r);
                break;
            }
            Some(false) => return None,
            None => continue,
        }
    }
    // Widen the proven box so that the search can discard its neighbourhood.
    let tight = proven?;
    let mut r = tight;
    while r < 1e-2 && sys.krawczyk(&rows, &around(r * 4.0)) == Some(true) {
        r *= 4.0;
    }
    Some(Isolated {
        tight: around(tight),
        wide: around(r),
    })
}

/// Checks the remaining conditions on an isolated root. `Ok(None)`: the
/// root is not a solution; `Err`: undecidable at this precision.
fn accept(
    g: &SymbolicGramMatrix,
    red: &SchurReduction,
    sys: &BoxedSystem,
    b: &[Interval],
) -> Result<Option<Solution>, String> {
    match strictly_inside(b, sys) {
        Some(false) => return Ok(None),
        None => {
            // A root within rounding of x = −1, s = 0 or the y bounds.
            return Ok(None);
        }
        Some(true) => {}
    }
    let z: Vec<f64> = b.iter().map(Interval::mid).collect();
    if sys.eqs.iter().any(|e| !e.interval.eval(b).contains_zero()) {
        return Ok(None);
    }
    if sys.negative.iter().any(|c| c.interval.eval(b).lo >= 0.0)
        || sys.positive.iter().any(|c| c.interval.eval(b).hi <= 0.0)
    {
        return Ok(None);
    }
    if sys.negative.iter().any(|c| c.interval.eval(b).hi >= 0.0)
        || sys.positive.iter().any(|c| c.interval.eval(b).lo <= 0.0)
    {
        return Err("derived entry on the boundary of its range".into());
    }
    let (vals, encl) = unbox(&z, b, sys.nd);
    Ok(Some(complete(g, red, vals, encl)))
}

fn solve_constant(g: &SymbolicGramMatrix, red: SchurReduction) -> SolveOutcome {
    let holds = red.equations.iter().all(|e| e.as_constant().is_some_and(|c| c.is_zero()));
    let nd = g.dotted().len();
    let in_range = red.derived.iter().all(|d| {
        let v = d.entry.as_constant().expect("constant entry");
        if d.unknown < nd {
            (&v + &AlgebraicNumber::from_int(1)).signum() == Ordering::Less
        } else {
            let y = -(&v + &v);
            (&y - &AlgebraicNumber::from_ratio(9, 5)).signum() == Ordering::Greater
                && (&AlgebraicNumber::from_int(2) - &y).signum() == Ordering::Greater
        }
    });
    let solutions = if holds && in_range {
        vec![complete(g, &red, Vec::new(), Vec::new())]
    } else {
        Vec::new()
    };
    SolveOutcome::Solved {
        reduction: red,
        solutions,
    }
}
