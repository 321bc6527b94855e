//! Directed graphs and interchangeable cycle detectors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Debug;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph<N: Ord> {
    edges: BTreeMap<N, BTreeSet<N>>,
}

impl<N: Ord> Default for DiGraph<N> {
    fn default() -> Self {
        DiGraph { edges: BTreeMap::new() }
    }
}

impl<N: Ord + Clone> DiGraph<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, n: N) {
        self.edges.entry(n).or_default();
    }

    pub fn add_edge(&mut self, from: N, to: N) {
        self.add_vertex(to.clone());
        self.edges.entry(from).or_default().insert(to);
    }

    pub fn vertices(&self) -> impl Iterator<Item = &N> {
        self.edges.keys()
    }

    pub fn successors(&self, n: &N) -> impl Iterator<Item = &N> {
        self.edges.get(n).into_iter().flatten()
    }

    pub fn has_edge(&self, from: &N, to: &N) -> bool {
        self.edges.get(from).is_some_and(|s| s.contains(to))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeSet::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&N, &N)> {
        self.edges.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    /// True when `to` is reachable from `from` by a path of length zero or more.
    pub fn reaches(&self, from: &N, to: &N) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.successors(n));
            }
        }
        false
    }
}

/// A strategy for finding a directed cycle.
pub trait CycleDetector<N: Ord + Clone + Debug>: Send + Sync {
    fn name(&self) -> &'static str;
    /// A witness cycle `[n0, n1, .., nk]` with an edge from each node to the next
    /// and from `nk` back to `n0`, or `None` when the graph is acyclic.
    fn find_cycle(&self, graph: &DiGraph<N>) -> Option<Vec<N>>;
}

pub struct DfsDetector;

impl<N: Ord + Clone + Debug> CycleDetector<N> for DfsDetector {
    fn name(&self) -> &'static str {
        "dfs"
    }

    fn find_cycle(&self, graph: &DiGraph<N>) -> Option<Vec<N>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<&N, Mark> = BTreeMap::new();
        for root in graph.vertices() {
            if marks.contains_key(root) {
                continue;
            }
            let mut path: Vec<&N> = vec![root];
            let mut iters = vec![graph.successors(root).collect::<Vec<_>>().into_iter()];
            marks.insert(root, Mark::Open);
            while let Some(it) = iters.last_mut() {
                match it.next() {
                    Some(next) => match marks.get(next) {
                        Some(Mark::Open) => {
                            let start = path.iter().position(|n| *n == next).unwrap();
                            return Some(path[start..].iter().map(|n| (*n).clone()).collect());
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(next, Mark::Open);
                            path.push(next);
                            iters.push(graph.successors(next).collect::<Vec<_>>().into_iter());
                        }
                    },
                    None => {
                        iters.pop();
                        let n = path.pop().unwrap();
                        marks.insert(n, Mark::Done);
                    }
                }
            }
        }
        None
    }
}

pub struct KahnDetector;

impl<N: Ord + Clone + Debug> CycleDetector<N> for KahnDetector {
    fn name(&self) -> &'static str {
        "kahn"
    }

    fn find_cycle(&self, graph: &DiGraph<N>) -> Option<Vec<N>> {
        let mut indegree: BTreeMap<&N, usize> = graph.vertices().map(|v| (v, 0)).collect();
        for (_, b) in graph.edges() {
            *indegree.get_mut(b).unwrap() += 1;
        }
        let mut queue: VecDeque<&N> =
            indegree.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let mut removed = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            removed.insert(v);
            for s in graph.successors(v) {
                let d = indegree.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(s);
                }
            }
        }
        // Every remaining vertex has a remaining predecessor, so walking
        // predecessors backwards must revisit a vertex.
        let remaining: BTreeSet<&N> =
            graph.vertices().filter(|v| !removed.contains(v)).collect();
        let start = *remaining.iter().next()?;
        let mut preds: BTreeMap<&N, &N> = BTreeMap::new();
        for (a, b) in graph.edges() {
            if remaining.contains(a) && remaining.contains(b) {
                preds.entry(b).or_insert(a);
            }
        }
        let mut walk = vec![start];
        let mut seen = BTreeSet::from([start]);
        let mut cur = start;
        loop {
            let p = preds[cur];
            if seen.contains(p) {
                let pos = walk.iter().position(|n| *n == p).unwrap();
                let mut cycle: Vec<N> = walk[pos..].iter().map(|n| (*n).clone()).collect();
                cycle.reverse();
                return Some(cycle);
            }
            seen.insert(p);
            walk.push(p);
            cur = p;
        }
    }
}

/// All registered cycle detectors.
pub fn cycle_detectors<N: Ord + Clone + Debug + 'static>() -> Vec<Box<dyn CycleDetector<N>>> {
    vec![Box::new(DfsDetector), Box::new(KahnDetector)]
}

pub fn cycle_detector<N: Ord + Clone + Debug + 'static>(
    name: &str,
) -> Option<Box<dyn CycleDetector<N>>> {
    cycle_detectors().into_iter().find(|d| d.name() == name)
}

/// Checks that consecutive nodes of `cycle` are joined by edges, wrapping around.
pub fn is_cycle<N: Ord + Clone>(graph: &DiGraph<N>, cycle: &[N]) -> bool {
    !cycle.is_empty()
        && (0..cycle.len()).all(|i| graph.has_edge(&cycle[i], &cycle[(i + 1) % cycle.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u32, u32)]) -> DiGraph<u32> {
        let mut g = DiGraph::new();
        for (a, b) in edges {
            g.add_edge(*a, *b);
        }
        g
    }

    #[test]
    fn detectors_find_self_loops_and_long_cycles() {
        for d in cycle_detectors::<u32>() {
            let g = graph(&[(1, 1)]);
            assert_eq!(d.find_cycle(&g), Some(vec![1]), "{}", d.name());
            let g = graph(&[(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)]);
            let c = d.find_cycle(&g).unwrap();
            assert!(is_cycle(&g, &c), "{} returned {c:?}", d.name());
            assert_eq!(c.len(), 3);
        }
    }

    #[test]
    fn detectors_accept_dags() {
        for d in cycle_detectors::<u32>() {
            assert_eq!(d.find_cycle(&graph(&[(0, 1), (0, 2), (1, 2)])), None);
            assert_eq!(d.find_cycle(&DiGraph::new()), None);
        }
    }

    #[test]
    fn reachability_includes_trivial_paths() {
        let g = graph(&[(0, 1), (1, 2)]);
        assert!(g.reaches(&0, &2));
        assert!(g.reaches(&2, &2));
        assert!(!g.reaches(&2, &0));
    }
}
