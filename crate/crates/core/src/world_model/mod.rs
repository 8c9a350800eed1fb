//! Static scene: lanes, intersection regions, traffic signals and the
//! waypoint graph derived from them.

mod graph;
mod map;

pub use graph::{build_waypoint_graph, NodeId, WaypointGraph, WaypointNode};
pub use map::{
    load_map, nearest_lane, point_in_intersection, IntersectionRegion, Lane, LaneMatch,
    TrafficSignal, VectorMap, DEFAULT_HEIGHT_BAND,
};
