//! Roadside sensing: sensor specs, infrastructure units (co-located sensors
//! sharing one processing unit), intersection agent groups and coverage.

mod coverage;
mod sensor;
mod units;

pub use coverage::{placement_coverage, CoverageCell, CoverageMap, LayoutKind, PlacementLayout};
pub use sensor::{
    load_sensors, sensor_visibility, visible_objects, SensorKind, SensorSpec,
};
pub(crate) use units::assign_intersections;
pub use units::{
    cluster_sensors_into_ius, group_ius_by_intersection, IntersectionAgentGroup,
    InfrastructureUnit, MAX_PLANAR_SEPARATION, MAX_VERTICAL_SEPARATION,
};
