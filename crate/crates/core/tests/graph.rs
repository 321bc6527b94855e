use aspmt::graph::{cycle_detector, cycle_detectors, is_cycle, DiGraph};
use proptest::prelude::*;

fn graph(n: u8, edges: &[(u8, u8)]) -> DiGraph<u8> {
    let mut g = DiGraph::new();
    (0..n).for_each(|v| g.add_vertex(v));
    for &(a, b) in edges {
        g.add_edge(a % n, b % n);
    }
    g
}

/// A cycle exists exactly when some edge `a -> b` has `b` reaching `a`.
fn has_cycle(g: &DiGraph<u8>) -> bool {
    g.edges().any(|(a, b)| g.reaches(b, a))
}

#[test]
fn both_detectors_are_registered() {
    let names: Vec<&str> = cycle_detectors::<u8>().iter().map(|d| d.name()).collect();
    assert_eq!(names, ["dfs", "kahn"]);
    assert!(cycle_detector::<u8>("tarjan").is_none());
}

proptest! {
    #[test]
    fn detectors_agree(n in 1u8..12, edges in prop::collection::vec((any::<u8>(), any::<u8>()), 0..30)) {
        let g = graph(n, &edges);
        let expected = has_cycle(&g);
        for d in cycle_detectors::<u8>() {
            let found = d.find_cycle(&g);
            prop_assert_eq!(found.is_some(), expected, "{}", d.name());
            if let Some(c) = found {
                prop_assert!(is_cycle(&g, &c), "{} returned {:?}", d.name(), c);
            }
        }
    }
}
