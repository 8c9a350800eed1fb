use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

use super::VectorMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct WaypointNode {
    pub position: Vec2,
    /// Owning lane, empty for hand-built graphs.
    pub lane_id: String,
    pub sample: usize,
}

/// Directed graph over resampled lane waypoints. Edge weights are
/// Euclidean distances.
#[derive(Debug, Clone, Default)]
pub struct WaypointGraph {
    nodes: Vec<WaypointNode>,
    edges: Vec<Vec<(NodeId, f64)>>,
    lane_nodes: BTreeMap<String, Vec<NodeId>>,
}

impl WaypointGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, position: Vec2) -> NodeId {
        self.push_node(WaypointNode {
            position,
            lane_id: String::new(),
            sample: 0,
        })
    }

    fn push_node(&mut self, node: WaypointNode) -> NodeId {
        self.nodes.push(node);
        self.edges.push(Vec::new());
        NodeId(self.nodes.len() - 1)
    }

    /// Adds an edge with an explicit weight.
    pub fn add_edge(&mut self, from: NodeId, to: NodeId, weight: f64) {
        self.edges[from.0].push((to, weight));
    }

    pub fn node(&self, id: NodeId) -> &WaypointNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[WaypointNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.edges[id.0]
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().flatten().map(|(_, w)| w).sum()
    }

    /// Sum of edge weights between samples of one lane.
    pub fn lane_weight(&self, lane_id: &str) -> f64 {
        let Some(ids) = self.lane_nodes.get(lane_id) else {
            return 0.0;
        };
        ids.windows(2)
            .map(|w| {
                self.edges[w[0].0]
                    .iter()
                    .find(|(to, _)| *to == w[1])
                    .map_or(0.0, |(_, wt)| *wt)
            })
            .sum()
    }

    pub fn lane_nodes(&self, lane_id: &str) -> &[NodeId] {
        self.lane_nodes.get(lane_id).map_or(&[], Vec::as_slice)
    }

    pub fn nearest_node(&self, p: Vec2) -> Option<NodeId> {
        self.nodes
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.position
                    .distance(p)
                    .total_cmp(&b.1.position.distance(p))
                    .then(a.0.cmp(&b.0))
            })
            .map(|(i, _)| NodeId(i))
    }
}

/// Resamples every lane at no more than `spacing` between samples. Every
/// original centerline vertex is kept, so per-lane weight equals the lane's
/// arc length.
pub fn build_waypoint_graph(m: &VectorMap, spacing: f64) -> Result<WaypointGraph> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "waypoint spacing must be > 0, got {spacing}"
        )));
    }
    let mut g = WaypointGraph::new();
    for lane in &m.lanes {
        let mut ids = Vec::new();
        let mut sample = 0;
        let first = g.push_node(WaypointNode {
            position: lane.centerline[0],
            lane_id: lane.id.clone(),
            sample,
        });
        ids.push(first);
        for seg in lane.centerline.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let len = a.distance(b);
            let pieces = ((len / spacing) - 1e-9).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                let p = if k == pieces {
                    b
                } else {
                    a + (b - a) * (k as f64 / pieces as f64)
                };
                sample += 1;
                let id = g.push_node(WaypointNode {
                    position: p,
                    lane_id: lane.id.clone(),
                    sample,
                });
                let prev = *ids.last().unwrap();
                let w = g.nodes[prev.0].position.distance(p);
                g.add_edge(prev, id, w);
                ids.push(id);
            }
        }
        g.lane_nodes.insert(lane.id.clone(), ids);
    }
    for lane in &m.lanes {
        let last = *g.lane_nodes[&lane.id].last().unwrap();
        for succ in &lane.successors {
            let first = g.lane_nodes[succ][0];
            let w = g.nodes[last.0].position.distance(g.nodes[first.0].position);
            g.add_edge(last, first, w);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::Lane;

    fn lane(id: &str, pts: &[[f64; 2]], succ: &[&str]) -> Lane {
        Lane {
            id: id.into(),
            centerline: pts.iter().map(|&p| p.into()).collect(),
            width: 3.0,
            successors: succ.iter().map(|s| s.to_string()).collect(),
            speed_limit: 10.0,
        }
    }

    #[test]
    fn single_lane_spacing_two() {
        let m = VectorMap::new(vec![lane("a", &[[0.0, 0.0], [10.0, 0.0]], &[])], vec![], vec![], 0.0)
            .unwrap();
        let g = build_waypoint_graph(&m, 2.0).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 5);
        assert!((g.total_weight() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn successor_link_endpoints_only() {
        let m = VectorMap::new(
            vec![
                lane("a", &[[0.0, 0.0], [10.0, 0.0]], &["b"]),
                lane("b", &[[10.0, 0.0], [20.0, 0.0]], &[]),
            ],
            vec![],
            vec![],
            0.0,
        )
        .unwrap();
        let g = build_waypoint_graph(&m, 10.0).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn bent_lane_weight_equals_arc_length() {
        let m = VectorMap::new(
            vec![lane("a", &[[0.0, 0.0], [3.0, 0.0], [3.0, 7.3], [-1.0, 9.0]], &[])],
            vec![],
            vec![],
            0.0,
        )
        .unwrap();
        let g = build_waypoint_graph(&m, 1.7).unwrap();
        let arc = m.lane_path("a").unwrap().length();
        assert!((g.lane_weight("a") - arc).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_spacing() {
        let m = VectorMap::new(vec![], vec![], vec![], 0.0).unwrap();
        assert!(build_waypoint_graph(&m, 0.0).is_err());
    }
}
