use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::world_model::{NodeId, WaypointGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (f, node id).
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* over the waypoint graph with a straight-line heuristic. Returns the
/// node sequence and its total weight.
pub fn plan_route(g: &WaypointGraph, start: NodeId, goal: NodeId) -> Result<(Vec<NodeId>, f64)> {
    let n = g.node_count();
    if start.0 >= n || goal.0 >= n {
        return Err(Error::InvalidArgument(format!(
            "route endpoints {} and {} must be graph nodes (graph has {n})",
            start.0, goal.0
        )));
    }
    let target = g.node(goal).position;
    let h = |id: usize| g.node(NodeId(id)).position.distance(target);
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[start.0] = 0.0;
    heap.push(Open {
        f: h(start.0),
        node: start.0,
    });
    while let Some(Open { node, .. }) = heap.pop() {
        if closed[node] {
            continue;
        }
        if node == goal.0 {
            let mut path = vec![goal];
            let mut cur = node;
            while let Some(p) = prev[cur] {
                path.push(NodeId(p));
                cur = p;
            }
            path.reverse();
            return Ok((path, dist[goal.0]));
        }
        closed[node] = true;
        for &(next, w) in g.neighbors(NodeId(node)) {
            let cand = dist[node] + w;
            let better = cand < dist[next.0]
                || (cand == dist[next.0] && prev[next.0].is_some_and(|p| node < p));
            if !closed[next.0] && better {
                dist[next.0] = cand;
                prev[next.0] = Some(node);
                heap.push(Open {
                    f: cand + h(next.0),
                    node: next.0,
                });
            }
        }
    }
    Err(Error::NoPath {
        start: start.0,
        goal: goal.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn diamond() -> (WaypointGraph, [NodeId; 4]) {
        let mut g = WaypointGraph::new();
        let a = g.add_node(Vec2::new(0.0, 0.0));
        let b = g.add_node(Vec2::new(0.5, 0.5));
        let c = g.add_node(Vec2::new(0.5, -0.5));
        let d = g.add_node(Vec2::new(1.0, 0.0));
        g.add_edge(a, b, 1.0);
        g.add_edge(b, d, 1.0);
        g.add_edge(a, c, 1.0);
        g.add_edge(c, d, 2.0);
        (g, [a, b, c, d])
    }

    #[test]
    fn diamond_route() {
        let (g, [a, b, _, d]) = diamond();
        let (path, cost) = plan_route(&g, a, d).unwrap();
        assert_eq!(path, vec![a, b, d]);
        assert_eq!(cost, 2.0);
    }

    #[test]
    fn start_is_goal() {
        let (g, [a, ..]) = diamond();
        assert_eq!(plan_route(&g, a, a).unwrap(), (vec![a], 0.0));
    }

    #[test]
    fn unreachable() {
        let (mut g, [a, ..]) = diamond();
        let lonely = g.add_node(Vec2::new(9.0, 9.0));
        assert!(matches!(plan_route(&g, a, lonely), Err(Error::NoPath { .. })));
    }
}
