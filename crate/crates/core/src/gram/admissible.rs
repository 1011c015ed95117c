//! Existence of parameter values giving a Gram matrix of signature
//! `(n−1, 1)` or `(n−2, 1, 1)`.

use std::cmp::Ordering;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::SymbolicGramMatrix;
use crate::algebra::{
    charpoly_signature_test, poly_determinant, AlgebraicNumber, CharpolyDecision, Interval, Poly,
    Signature,
};

/// Open range of the `y` unknowns.
pub const Y_RANGE: (f64, f64) = (1.8, 2.0);

#[derive(Clone, Debug, PartialEq)]
pub enum Admissibility {
    /// Exact witness values (`x`s then `y`s) and the certified signature.
    /// `singular_nearby` records a numerically located point of the
    /// parameter box where the determinant vanishes and the next
    /// coefficient is negative.
    Admissible {
        witness: Vec<BigRational>,
        signature: Signature,
        singular_nearby: bool,
    },
    /// Proven: no parameter values give either signature.
    Rejected,
    /// Box budget exhausted.
    Undecided,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// The determinant in box coordinates: each dotted `x` becomes `-1/s`
/// with `s ∈ (0,1)` and the polynomial is multiplied by `s^deg`, which
/// keeps its sign.
fn boxed(p: &Poly<AlgebraicNumber>, nd: usize) -> Poly<AlgebraicNumber> {
    (0..nd).fold(p.clone(), |q, k| q.reciprocal_in(k, &AlgebraicNumber::from_int(-1)))
}

fn unbox(point: &[f64], nd: usize) -> Vec<f64> {
    point
        .iter()
        .enumerate()
        .map(|(k, &v)| if k < nd { -1.0 / v } else { v })
        .collect()
}

fn exact_point(point: &[f64], nd: usize) -> Option<Vec<BigRational>> {
    point
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let q = BigRational::from_float(v)?;
            Some(if k < nd { -q.recip() } else { q })
        })
        .collect()
}

fn initial_box(nd: usize, ny: usize) -> Vec<Interval> {
    let mut b = vec![Interval::new(0.0, 1.0); nd];
    b.extend(std::iter::repeat_n(Interval::new(Y_RANGE.0, Y_RANGE.1), ny));
    b
}

fn interior(point: &[f64], nd: usize) -> bool {
    point.iter().enumerate().all(|(k, &v)| {
        if k < nd {
            v > 0.0 && v < 1.0
        } else {
            v > Y_RANGE.0 && v < Y_RANGE.1
        }
    })
}

/// Moves coordinates on the outer boundary slightly inwards.
fn nudge_inside(point: &[f64], nd: usize) -> Vec<f64> {
    const EPS: f64 = 1e-9;
    point
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let (lo, hi) = if k < nd { (0.0, 1.0) } else { Y_RANGE };
            v.clamp(lo + EPS * (hi - lo), hi - EPS * (hi - lo))
        })
        .collect()
}

/// Result of a sign search over the parameter box.
#[derive(Clone, Debug, PartialEq)]
pub enum SignSearch {
    /// A box point (box coordinates) where the polynomial is negative.
    Negative(Vec<f64>),
    /// The polynomial is nonnegative on the closed box.
    Positive,
    Undecided,
}

/// A polynomial with its float, interval and partial-derivative forms.
struct Forms {
    exact: Poly<AlgebraicNumber>,
    float: Poly<f64>,
    interval: Poly<Interval>,
    partials: Vec<Poly<Interval>>,
}

impl Forms {
    fn new(exact: Poly<AlgebraicNumber>) -> Rc<Self> {
        let n = exact.nvars();
        let partials = (0..n)
            .map(|k| {
                exact
                    .derivative(k, AlgebraicNumber::from_int)
                    .map(Interval::enclose)
            })
            .collect();
        Rc::new(Self {
            float: exact.map(|c| c.to_f64()),
            interval: exact.map(Interval::enclose),
            partials,
            exact,
        })
    }

    /// The polynomial on the face `var = value`.
    fn restrict(&self, var: usize, value: f64) -> Rc<Self> {
        let q = BigRational::from_float(value).expect("finite box endpoint");
        Self::new(self.exact.substitute(var, &AlgebraicNumber::from_rational(q)))
    }
}

/// Branch and bound for a negative value of `p` on the open box. Boxes on
/// which `p` is monotone in some variable are replaced by the face holding
/// the minimum, so zeros on the boundary of the box do not stall the
/// search.
pub fn search_negative(p: &Poly<AlgebraicNumber>, nd: usize, ny: usize, budget: usize) -> SignSearch {
    let root = p.map(|c| c.to_f64());
    let mut stack = vec![(Forms::new(p.clone()), initial_box(nd, ny))];
    let mut visited = 0usize;
    while let Some((f, b)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return SignSearch::Undecided;
        }
        if let Some(c) = f.exact.as_constant() {
            if c.signum() != Ordering::Less {
                continue;
            }
        }
        let mid: Vec<f64> = b.iter().map(Interval::mid).collect();
        if f.float.eval(&mid) < 0.0 {
            if interior(&mid, nd) {
                return SignSearch::Negative(mid);
            }
            let inside = nudge_inside(&mid, nd);
            if root.eval(&inside) < 0.0 && interior(&inside, nd) {
                return SignSearch::Negative(inside);
            }
        }
        if f.interval.eval(&b).lo > 0.0 {
            continue;
        }
        let free: Vec<usize> = (0..b.len()).filter(|&k| b[k].width() > 0.0).collect();
        let monotone = free.iter().find_map(|&k| {
            let d = f.partials[k].eval(&b);
            if d.lo >= 0.0 {
                Some((k, b[k].lo))
            } else if d.hi <= 0.0 {
                Some((k, b[k].hi))
            } else {
                None
            }
        });
        if let Some((k, v)) = monotone {
            let mut face = b;
            face[k] = Interval::point(v);
            stack.push((f.restrict(k, v), face));
            continue;
        }
        let Some(&k) = free.iter().max_by(|&&i, &&j| {
            let w = |k: usize| b[k].width() / if k < nd { 1.0 } else { Y_RANGE.1 - Y_RANGE.0 };
            w(i).total_cmp(&w(j))
        }) else {
            // A point where the enclosure still meets zero.
            return SignSearch::Undecided;
        };
        let (l, r) = b[k].split();
        let mut right = b.clone();
        right[k] = r;
        let mut left = b;
        left[k] = l;
        stack.push((f.clone(), right));
        stack.push((f, left));
    }
    SignSearch::Positive
}

/// Sum of the principal `(n−1)`-minors.
fn c1_poly(g: &SymbolicGramMatrix) -> Poly<AlgebraicNumber> {
    let n = g.size();
    (0..n).fold(Poly::zero(g.num_unknowns()), |acc, i| {
        let idx: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        &acc + &poly_determinant(&g.sub_poly_matrix(&idx), g.num_unknowns())
    })
}

fn certify_point(g: &SymbolicGramMatrix, point: &[f64], nd: usize) -> Option<(Vec<BigRational>, Signature)> {
    let q = exact_point(point, nd)?;
    let vals: Vec<AlgebraicNumber> = q.iter().cloned().map(AlgebraicNumber::from_rational).collect();
    match charpoly_signature_test(&g.instantiate(&vals)) {
        Ok(CharpolyDecision::Accepted(sig)) => Some((q, sig)),
        _ => None,
    }
}

/// Numerically locates a zero of `det` on a segment from a negative point
/// to a positive one and reports whether `c1` is negative there.
fn singular_nearby(
    det: &Poly<f64>,
    c1: &Poly<f64>,
    neg: &[f64],
    nd: usize,
    ny: usize,
) -> bool {
    let b = initial_box(nd, ny);
    let steps = 6usize;
    let dims = b.len();
    let total = (steps + 1).pow(dims as u32);
    for idx in 0..total {
        let mut t = idx;
        let pos: Vec<f64> = b
            .iter()
            .map(|iv| {
                let k = t % (steps + 1);
                t /= steps + 1;
                iv.lo + (iv.hi - iv.lo) * (k as f64 + 0.5) / (steps as f64 + 1.0)
            })
            .collect();
        if det.eval(&pos) <= 0.0 {
            continue;
        }
        let (mut a, mut z) = (neg.to_vec(), pos);
        for _ in 0..80 {
            let m: Vec<f64> = a.iter().zip(&z).map(|(p, q)| 0.5 * (p + q)).collect();
            if det.eval(&m) < 0.0 {
                a = m;
            } else {
                z = m;
            }
        }
        if c1.eval(&unbox(&a, nd)) < 0.0 {
            return true;
        }
    }
    false
}

/// Decides whether some `x < −1`, `y ∈ (1.8, 2)` give signature `(n−1,1)`
/// or `(n−2,1,1)`. Requires a principal `(n−2)`-submatrix that is positive
/// definite for all parameter values.
pub fn fuchsian_admissibility(g: &SymbolicGramMatrix, budget: usize) -> Admissibility {
    let nd = g.dotted().len();
    let ny = g.sevens().len();
    let nv = g.num_unknowns();
    let det = poly_determinant(&g.poly_matrix(), nv);
    let c1 = c1_poly(g);
    let target = if det.is_zero() { &c1 } else { &det };
    match search_negative(&boxed(target, nd), nd, ny, budget) {
        SignSearch::Negative(point) => {
            let Some((witness, signature)) = certify_point(g, &point, nd) else {
                return Admissibility::Undecided;
            };
            let sing = det.is_zero()
                || singular_nearby(
                    &boxed(&det, nd).map(|c| c.to_f64()),
                    &c1.map(|c| c.to_f64()),
                    &point,
                    nd,
                    ny,
                );
            Admissibility::Admissible {
                witness,
                signature,
                singular_nearby: sing,
            }
        }
        SignSearch::Positive => Admissibility::Rejected,
        SignSearch::Undecided => {
            if nv == 0 {
                // Constant determinant: the exact test is conclusive.
                match certify_point(g, &[], 0) {
                    Some((w, s)) => Admissibility::Admissible {
                        witness: w,
                        signature: s,
                        singular_nearby: s.zero > 0,
                    },
                    None => Admissibility::Rejected,
                }
            } else {
                Admissibility::Undecided
            }
        }
    }
}

/// Witness values as decimals, for reports.
pub fn witness_f64(w: &[BigRational]) -> Vec<f64> {
    w.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}
