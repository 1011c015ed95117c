use std::collections::BTreeSet;

use coxpoly::combinatorics::{census_polytope, compute_data, symmetry_group};
use coxpoly::diagram::DiagramLibrary;
use coxpoly::gluing::{canonical_key, enumerate_orthogonal_prisms, glue_closure, Provenance};
use coxpoly::gram::{rank_conditions, solve_and_certify, symbolize, Rejection, SolveOptions};
use coxpoly::pasting::{
    build_fuchsian_sets, run_enumeration, Approach, EnumerationConfig, FilterSet,
    IntersectionFilter,
};

fn library() -> DiagramLibrary {
    DiagramLibrary::build(7).unwrap()
}

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

#[test]
fn p284_single_golden_certificate() {
    let lib = library();
    let sets = build_fuchsian_sets(&lib).unwrap();
    let p = census_polytope(284).unwrap();
    let d = compute_data(&p);
    let e = run_enumeration(&p, &d, &lib, &EnumerationConfig::default()).unwrap();
    let f = IntersectionFilter::new(&p, &e.layout, &sets);
    let mut certs = Vec::new();
    for &r in e.rows.iter().filter(|&&r| f.keeps(r)) {
        let g = symbolize(r, &e.layout).unwrap();
        assert_eq!(g.dotted().len(), 3);
        assert_eq!(rank_conditions(&g, 6).minors.len(), 36);
        let res = solve_and_certify(&g, &p, &SolveOptions::default());
        assert!(res.undecided.is_none());
        certs.extend(res.certificates);
    }
    assert_eq!(certs.len(), 1);
    let c = &certs[0];
    assert!(c.exact);
    for v in c.cosh_values() {
        assert!((v - golden()).abs() < 1e-12);
    }
    assert_eq!((c.signature.pos, c.signature.neg), (5, 1));
}

#[test]
fn p311_has_no_solution() {
    let lib = library();
    let sets = build_fuchsian_sets(&lib).unwrap();
    let p = census_polytope(311).unwrap();
    let d = compute_data(&p);
    let e = run_enumeration(&p, &d, &lib, &EnumerationConfig::default()).unwrap();
    let f = IntersectionFilter::new(&p, &e.layout, &sets);
    let kept: Vec<_> = e.rows.iter().copied().filter(|&r| f.keeps(r)).collect();
    assert_eq!(kept.len(), 57);
    for r in kept.into_iter().take(8) {
        let g = symbolize(r, &e.layout).unwrap();
        let res = solve_and_certify(&g, &p, &SolveOptions::default());
        assert!(res.undecided.is_none());
        assert!(res.certificates.is_empty());
    }
}

#[test]
fn right_angled_row_is_rejected() {
    let p = census_polytope(284).unwrap();
    let d = compute_data(&p);
    let lib = library();
    let cfg = EnumerationConfig {
        filters: FilterSet::none(),
        max_layers: Some(0),
        ..Default::default()
    };
    let e = run_enumeration(&p, &d, &lib, &cfg).unwrap();
    let weights: Vec<u8> = e.layout.columns().iter().map(|_| 2).collect();
    let g = symbolize(e.layout.encode(&weights), &e.layout).unwrap();
    let res = solve_and_certify(&g, &p, &SolveOptions::default());
    assert!(res.certificates.is_empty());
    assert!(res.undecided.is_none());
    assert!(!res.rejections.is_empty());
    assert!(res.rejections.iter().all(|r| !matches!(r, Rejection::Parabolic(_))));
}

#[test]
fn unfiltered_counts_bound_filtered() {
    let lib = library();
    let p = census_polytope(312).unwrap();
    let d = compute_data(&p);
    let full = run_enumeration(&p, &d, &lib, &EnumerationConfig::default()).unwrap();
    let raw = run_enumeration(
        &p,
        &d,
        &lib,
        &EnumerationConfig {
            dedup: false,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(full.rows.len(), 1);
    assert!(raw.rows.len() >= full.rows.len());
    assert_eq!(full.trace.len(), raw.trace.len());
}

#[test]
fn prisms_and_closure() {
    let lib = library();
    let opts = SolveOptions::default();
    let cat = enumerate_orthogonal_prisms(&lib, &opts).unwrap();
    assert!(cat.undecided.is_empty());
    let lengths: Vec<f64> = cat.prisms.iter().map(|p| p.length()).collect();
    assert_eq!(lengths.len(), 3);
    assert!(lengths.iter().all(|&l| l > 1.0));

    let sets = build_fuchsian_sets(&lib).unwrap();
    let p = census_polytope(313).unwrap();
    let d = compute_data(&p);
    let group = symmetry_group(&p);
    let mut keys = Vec::new();
    for approach in [Approach::Basis, Approach::Direct] {
        let cfg = EnumerationConfig {
            approach,
            ..Default::default()
        };
        let e = run_enumeration(&p, &d, &lib, &cfg).unwrap();
        let f = IntersectionFilter::new(&p, &e.layout, &sets);
        let mut certs = Vec::new();
        for &r in e.rows.iter().filter(|&&r| f.keeps(r)) {
            certs.extend(solve_and_certify(&symbolize(r, &e.layout).unwrap(), &p, &opts).certificates);
        }
        let set: BTreeSet<_> = if approach == Approach::Basis {
            let cl = glue_closure(&p, &d, &certs, &cat.prisms, &opts);
            assert!(cl.undecided.is_empty());
            assert!(cl.entries.iter().any(|e| matches!(e.provenance, Provenance::Glued { .. })));
            cl.entries.iter().map(|e| canonical_key(&e.certificate, &group)).collect()
        } else {
            certs.iter().map(|c| canonical_key(c, &group)).collect()
        };
        keys.push(set);
    }
    assert_eq!(keys[0].len(), 3);
    assert_eq!(keys[0], keys[1]);
}
