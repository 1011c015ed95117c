use coxpoly::diagram::named::{a, cycle, d, path};
use coxpoly::diagram::{
    classify, enumerate_class, expand_permutations, Class, DiagramLibrary, LibraryKind, Target,
    WeightedGraph,
};

#[test]
fn classical_diagrams() {
    assert_eq!(classify(&a(5)).unwrap(), Class::Elliptic);
    assert_eq!(classify(&d(5)).unwrap(), Class::Elliptic);
    assert_eq!(classify(&path(4, &[5, 3, 3])).unwrap(), Class::Elliptic);
    assert_eq!(classify(&path(5, &[5, 3, 3, 3])).unwrap(), Class::Lanner);
    // Affine A4 and affine C3.
    assert_eq!(classify(&cycle(5, &[3; 5])).unwrap(), Class::Parabolic);
    assert_eq!(classify(&path(4, &[4, 3, 4])).unwrap(), Class::Parabolic);
    assert_eq!(classify(&path(3, &[7, 3])).unwrap(), Class::Lanner);
}

#[test]
fn disconnected_elliptic() {
    let g = WeightedGraph::from_edges(5, &[(0, 1, 3), (2, 3, 5)]).unwrap();
    assert_eq!(classify(&g).unwrap(), Class::Elliptic);
    assert_eq!(g.components().len(), 3);
}

#[test]
fn small_ranks_match_expansion() {
    for (r, target) in [(3, Target::Elliptic), (3, Target::Lanner), (4, Target::ParabolicConnected)] {
        let reps = enumerate_class(r, target, 7).unwrap();
        let set = expand_permutations(&reps).unwrap();
        for v in set.vectors() {
            let g = WeightedGraph::new(r, v).unwrap();
            let want = match target {
                Target::Elliptic => Class::Elliptic,
                Target::ParabolicConnected => Class::Parabolic,
                Target::Lanner => Class::Lanner,
            };
            assert_eq!(classify(&g).unwrap(), want);
        }
    }
}

#[test]
fn rank_three_lanner_triangles() {
    let reps = enumerate_class(3, Target::Lanner, 7).unwrap();
    let mut shapes: Vec<Vec<u8>> = reps
        .iter()
        .map(|g| {
            let mut w = g.weights().to_vec();
            w.sort();
            w
        })
        .collect();
    shapes.dedup();
    assert!(shapes.contains(&vec![2, 3, 7]));
    assert!(!shapes.contains(&vec![2, 3, 5]));
    assert!(reps.iter().all(|g| g.is_connected()));
}

#[test]
fn library_is_deterministic() {
    let a = DiagramLibrary::build(7).unwrap();
    let b = DiagramLibrary::build(7).unwrap();
    for k in LibraryKind::standard() {
        assert_eq!(a.manifest(k), b.manifest(k));
    }
    let dir = tempfile::tempdir().unwrap();
    a.save(dir.path()).unwrap();
    let c = DiagramLibrary::load(dir.path()).unwrap();
    for k in LibraryKind::standard() {
        assert_eq!(a.manifest(k), c.manifest(k));
    }
}

#[test]
fn elliptic_counts_grow_with_weight() {
    let small = DiagramLibrary::build(5).unwrap();
    let full = DiagramLibrary::build(7).unwrap();
    let k = LibraryKind::Elliptic(4);
    assert!(small.vectors(k).len() < full.vectors(k).len());
    for &c in small.vectors(k).codes() {
        assert!(full.contains(k, c));
    }
}
