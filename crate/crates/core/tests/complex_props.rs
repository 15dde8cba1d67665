use ggt_core::angle::PiFraction;
use ggt_core::complex::{
    check_link_condition, compose, induced_link_map, relabel_check, relabeling, relabeling_order, vertex_link, x1bar,
    x1bar_link, y_relabeling, Relabeling, TriComplex,
};
use ggt_core::graph::is_automorphism;
use proptest::prelude::*;

fn fixtures() -> Vec<TriComplex> {
    ["ybar1", "ybar2", "ybar3", "x1bar", "digon"].iter().map(|n| TriComplex::fixture(n).unwrap()).collect()
}

fn power(sigma: &Relabeling, k: usize) -> Relabeling {
    (0..k).fold(relabeling(&[]), |acc, _| compose(sigma, &acc))
}

/// Relabelings of X1-bar: the y-powers, the identity, or a random
/// permutation of the labels.
fn relabelings() -> impl Strategy<Value = Relabeling> {
    let labels: Vec<String> = x1bar().labels().iter().map(|s| s.to_string()).collect();
    prop_oneof![
        (0usize..3).prop_map(|k| power(&y_relabeling(), k)),
        Just(labels.clone()).prop_shuffle().prop_map(move |image| labels
            .iter()
            .cloned()
            .zip(image)
            .collect::<Relabeling>()),
    ]
}

proptest! {
    #[test]
    fn symmetries_compose(s in relabelings(), t in relabelings()) {
        let c = x1bar();
        if relabel_check(&c, &s) && relabel_check(&c, &t) {
            prop_assert!(relabel_check(&c, &compose(&s, &t)));
        }
    }
}

#[test]
fn triangle_angles_sum_to_pi() {
    for c in fixtures() {
        for t in c.triangles() {
            assert_eq!(t.angles.iter().copied().sum::<PiFraction>(), PiFraction::PI);
        }
    }
}

#[test]
fn link_counts() {
    for c in fixtures() {
        for v in c.vertices() {
            let vi = c.vertex(v).unwrap();
            let ends: usize = c.edges().iter().map(|e| (e.from == vi) as usize + (e.to == vi) as usize).sum();
            let corners = 3 * c.triangles().len();
            let link = vertex_link(&c, v).unwrap();
            // every vertex is the only one in these fixtures
            assert_eq!(c.vertices().len(), 1);
            assert_eq!(link.node_count(), ends);
            assert_eq!(link.arc_count(), corners);
            let sum: usize = (0..link.node_count()).map(|n| link.degree(n)).sum();
            assert_eq!(sum, 2 * link.arc_count());
        }
    }
}

#[test]
fn y_symmetry_of_x1bar() {
    let y = y_relabeling();
    assert!(relabel_check(&x1bar(), &y));
    assert_eq!(relabeling_order(&y), 3);
    let link = x1bar_link();
    let map = induced_link_map(&link, &y).unwrap();
    assert!(is_automorphism(&link, &map));
    assert!(map.iter().enumerate().all(|(i, &j)| i != j));
    let swap = relabeling(&[("a", "e"), ("e", "a")]);
    assert!(!relabel_check(&x1bar(), &swap));
}

#[test]
fn link_condition_reports() {
    assert!(check_link_condition(&x1bar()).pass);
    assert!(check_link_condition(&TriComplex::fixture("ybar1").unwrap()).pass);
    let digon = check_link_condition(&TriComplex::fixture("digon").unwrap());
    assert!(!digon.pass);
    assert_eq!(digon.vertices[0].girth, Some(PiFraction::new(2, 3)));
}
