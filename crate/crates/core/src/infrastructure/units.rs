use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::world_model::{point_in_intersection, VectorMap};

use super::SensorSpec;

/// Largest horizontal distance between two sensors of one unit, meters.
pub const MAX_PLANAR_SEPARATION: f64 = 2.0;
/// Largest height difference between two sensors of one unit, meters.
pub const MAX_VERTICAL_SEPARATION: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfrastructureUnit {
    pub id: String,
    pub sensors: Vec<SensorSpec>,
    pub processing_unit: String,
    pub intersection_id: Option<String>,
}

impl InfrastructureUnit {
    /// Mean planar position of the member sensors.
    pub fn centroid(&self) -> Vec2 {
        let n = self.sensors.len() as f64;
        let sum = self
            .sensors
            .iter()
            .fold(Vec2::ZERO, |acc, s| acc + s.planar());
        sum * (1.0 / n)
    }

    /// Every pair of members satisfies the co-location constraints.
    pub fn is_consistent(&self) -> bool {
        !self.sensors.is_empty()
            && self.sensors.iter().enumerate().all(|(i, a)| {
                a.processing_unit == self.processing_unit
                    && self.sensors[i + 1..].iter().all(|b| compatible(a, b))
            })
    }
}

fn compatible(a: &SensorSpec, b: &SensorSpec) -> bool {
    let planar = (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]);
    planar <= MAX_PLANAR_SEPARATION
        && (a.position[2] - b.position[2]).abs() <= MAX_VERTICAL_SEPARATION
        && a.processing_unit == b.processing_unit
}

/// Partitions sensors into units whose members are pairwise co-located and
/// share a processing unit.
///
/// Sensors are visited in ascending id order; each joins the first existing
/// unit it is compatible with every member of, or opens a new one. The
/// result does not depend on input order.
pub fn cluster_sensors_into_ius(sensors: &[SensorSpec]) -> Result<Vec<InfrastructureUnit>> {
    let mut sorted: Vec<&SensorSpec> = sensors.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for w in sorted.windows(2) {
        if w[0].id == w[1].id {
            return Err(Error::DuplicateId(w[0].id.clone()));
        }
    }
    let mut groups: Vec<Vec<&SensorSpec>> = Vec::new();
    for s in sorted {
        match groups
            .iter_mut()
            .find(|g| g.iter().all(|m| compatible(m, s)))
        {
            Some(g) => g.push(s),
            None => groups.push(vec![s]),
        }
    }
    let mut per_unit_count = BTreeMap::<&str, usize>::new();
    Ok(groups
        .into_iter()
        .map(|g| {
            let pu = g[0].processing_unit.as_str();
            let k = per_unit_count.entry(pu).or_insert(0);
            *k += 1;
            let id = if *k == 1 {
                format!("iu-{pu}")
            } else {
                format!("iu-{pu}-{k}")
            };
            InfrastructureUnit {
                id,
                processing_unit: pu.to_string(),
                sensors: g.into_iter().cloned().collect(),
                intersection_id: None,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionAgentGroup {
    pub intersection_id: String,
    pub units: Vec<String>,
}

/// Assigns each unit to the region containing all of its sensors. Units in
/// several overlapping regions go to the nearest center (ties: smallest
/// region id); units in none stay ungrouped. Returned groups are sorted by
/// region id.
pub fn group_ius_by_intersection(
    units: &[InfrastructureUnit],
    m: &VectorMap,
) -> Vec<IntersectionAgentGroup> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for u in units {
        let c = u.centroid();
        let best = m
            .intersections
            .iter()
            .filter(|r| u.sensors.iter().all(|s| point_in_intersection(s.position, r)))
            .min_by(|a, b| {
                a.center
                    .distance(c)
                    .total_cmp(&b.center.distance(c))
                    .then_with(|| a.id.cmp(&b.id))
            });
        if let Some(r) = best {
            groups.entry(r.id.clone()).or_default().push(u.id.clone());
        }
    }
    groups
        .into_iter()
        .map(|(intersection_id, units)| IntersectionAgentGroup {
            intersection_id,
            units,
        })
        .collect()
}

/// Stamps each unit with the intersection its group belongs to.
pub(crate) fn assign_intersections(units: &mut [InfrastructureUnit], m: &VectorMap) {
    let groups = group_ius_by_intersection(units, m);
    let lookup: BTreeMap<String, String> = groups
        .into_iter()
        .flat_map(|g| {
            let r = g.intersection_id;
            g.units.into_iter().map(move |u| (u, r.clone()))
        })
        .collect();
    for u in units.iter_mut() {
        u.intersection_id = lookup.get(&u.id).cloned();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infrastructure::SensorKind;
    use crate::world_model::{IntersectionRegion, Lane};

    fn sensor(id: &str, x: f64, y: f64, z: f64, pu: &str) -> SensorSpec {
        SensorSpec::new(id, SensorKind::Lidar, [x, y, z], 0.0, pu)
    }

    #[test]
    fn close_sensors_share_unit() {
        let ius = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 3.0, "p"), sensor("b", 1.0, 0.0, 3.0, "p")])
            .unwrap();
        assert_eq!(ius.len(), 1);
        assert_eq!(ius[0].sensors.len(), 2);
        assert_eq!(ius[0].processing_unit, "p");
    }

    #[test]
    fn far_sensors_split() {
        let ius = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 3.0, "p"), sensor("b", 3.0, 0.0, 3.0, "p")])
            .unwrap();
        assert_eq!(ius.len(), 2);
        assert!(ius.iter().all(|u| u.sensors.len() == 1));
    }

    #[test]
    fn different_processors_split() {
        let ius = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 3.0, "p1"), sensor("b", 0.0, 0.0, 3.0, "p2")])
            .unwrap();
        assert_eq!(ius.len(), 2);
    }

    #[test]
    fn vertical_separation_bound() {
        let ius = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 0.0, "p"), sensor("b", 0.0, 0.0, 4.0, "p")])
            .unwrap();
        assert_eq!(ius.len(), 1);
        let ius = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 0.0, "p"), sensor("b", 0.0, 0.0, 4.5, "p")])
            .unwrap();
        assert_eq!(ius.len(), 2);
    }

    #[test]
    fn chain_is_split_greedily() {
        // a-b and b-c are within 2 m, a-c is not: {a, b} then {c}.
        let ius = cluster_sensors_into_ius(&[
            sensor("c", 3.0, 0.0, 3.0, "p"),
            sensor("a", 0.0, 0.0, 3.0, "p"),
            sensor("b", 1.5, 0.0, 3.0, "p"),
        ])
        .unwrap();
        let ids: Vec<Vec<&str>> = ius
            .iter()
            .map(|u| u.sensors.iter().map(|s| s.id.as_str()).collect())
            .collect();
        assert_eq!(ids, vec![vec!["a", "b"], vec!["c"]]);
        assert_eq!(ius[1].id, "iu-p-2");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = cluster_sensors_into_ius(&[sensor("a", 0.0, 0.0, 3.0, "p"), sensor("a", 9.0, 0.0, 3.0, "p")]);
        assert!(matches!(err, Err(Error::DuplicateId(id)) if id == "a"));
    }

    fn map_with(regions: Vec<IntersectionRegion>) -> VectorMap {
        let lane = Lane {
            id: "l".into(),
            centerline: vec![Vec2::new(-300.0, 0.0), Vec2::new(300.0, 0.0)],
            width: 3.5,
            successors: vec![],
            speed_limit: 10.0,
        };
        VectorMap::new(vec![lane], regions, vec![], 0.0).unwrap()
    }

    #[test]
    fn two_corner_units_form_one_group() {
        let m = map_with(vec![IntersectionRegion::new("x", Vec2::ZERO, 50.0, 0.0)]);
        let ius = cluster_sensors_into_ius(&[
            sensor("a", 12.0, 12.0, 3.5, "ne"),
            sensor("b", -12.0, -12.0, 3.5, "sw"),
        ])
        .unwrap();
        let groups = group_ius_by_intersection(&ius, &m);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].units.len(), 2);
    }

    #[test]
    fn distant_unit_ungrouped() {
        let m = map_with(vec![IntersectionRegion::new("x", Vec2::ZERO, 50.0, 0.0)]);
        let ius = cluster_sensors_into_ius(&[sensor("a", 200.0, 0.0, 3.5, "p")]).unwrap();
        assert!(group_ius_by_intersection(&ius, &m).is_empty());
    }

    #[test]
    fn overlapping_regions_pick_nearest_center() {
        let m = map_with(vec![
            IntersectionRegion::new("A", Vec2::new(0.0, 0.0), 50.0, 0.0),
            IntersectionRegion::new("B", Vec2::new(60.0, 0.0), 50.0, 0.0),
        ]);
        let mut ius = cluster_sensors_into_ius(&[sensor("s", 35.0, 0.0, 3.5, "p")]).unwrap();
        let groups = group_ius_by_intersection(&ius, &m);
        assert_eq!(groups, vec![IntersectionAgentGroup { intersection_id: "B".into(), units: vec!["iu-p".into()] }]);
        assign_intersections(&mut ius, &m);
        assert_eq!(ius[0].intersection_id.as_deref(), Some("B"));

        // Equidistant: smallest id wins.
        let ius = cluster_sensors_into_ius(&[sensor("s", 30.0, 0.0, 3.5, "p")]).unwrap();
        assert_eq!(group_ius_by_intersection(&ius, &m)[0].intersection_id, "A");
    }
}
