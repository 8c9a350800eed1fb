use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::world_model::VectorMap;

use super::{SensorKind, SensorSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Centralized,
    PartiallyDistributed,
    FullyDistributed,
    Custom(String),
}

impl LayoutKind {
    pub fn name(&self) -> &str {
        match self {
            LayoutKind::Centralized => "centralized",
            LayoutKind::PartiallyDistributed => "partially_distributed",
            LayoutKind::FullyDistributed => "fully_distributed",
            LayoutKind::Custom(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementLayout {
    pub name: LayoutKind,
    pub sensors: Vec<SensorSpec>,
}

impl PlacementLayout {
    pub fn custom(name: impl Into<String>, sensors: Vec<SensorSpec>) -> Self {
        PlacementLayout {
            name: LayoutKind::Custom(name.into()),
            sensors,
        }
    }

    /// Sensors concentrated on a single pole beside the center: a 360°
    /// lidar plus one camera per approach.
    pub fn centralized(center: Vec2) -> Self {
        let pole = center + Vec2::new(6.0, 6.0);
        let at = |dx: f64, dy: f64, z: f64| [pole.x + dx, pole.y + dy, z];
        let mut sensors = vec![SensorSpec::new("c-lidar", SensorKind::Lidar, at(0.0, 0.0, 4.0), 0.0, "pu-center")];
        for (i, yaw) in [0.0, FRAC_PI_2, PI, -FRAC_PI_2].into_iter().enumerate() {
            sensors.push(SensorSpec::new(
                format!("c-cam{i}"),
                SensorKind::Camera,
                at(0.3, 0.3, 3.8),
                yaw,
                "pu-center",
            ));
        }
        PlacementLayout {
            name: LayoutKind::Centralized,
            sensors,
        }
    }

    /// Two poles on opposite corners, each looking across the junction.
    pub fn partially_distributed(center: Vec2) -> Self {
        let mut sensors = Vec::new();
        for (tag, corner) in [("ne", Vec2::new(12.0, 12.0)), ("sw", Vec2::new(-12.0, -12.0))] {
            let p = center + corner;
            let inward = (-corner).angle();
            sensors.push(SensorSpec::new(format!("{tag}-lidar"), SensorKind::Lidar, [p.x, p.y, 4.0], 0.0, format!("pu-{tag}")));
            sensors.push(SensorSpec::new(
                format!("{tag}-cam0"),
                SensorKind::Camera,
                [p.x + 0.5, p.y, 3.8],
                inward - FRAC_PI_4,
                format!("pu-{tag}"),
            ));
            sensors.push(SensorSpec::new(
                format!("{tag}-cam1"),
                SensorKind::Camera,
                [p.x, p.y + 0.5, 3.8],
                inward + FRAC_PI_4,
                format!("pu-{tag}"),
            ));
        }
        PlacementLayout {
            name: LayoutKind::PartiallyDistributed,
            sensors,
        }
    }

    /// One pole on every corner with lidar, camera and radar facing in.
    pub fn fully_distributed(center: Vec2) -> Self {
        let mut sensors = Vec::new();
        for (tag, corner) in [
            ("ne", Vec2::new(12.0, 12.0)),
            ("nw", Vec2::new(-12.0, 12.0)),
            ("sw", Vec2::new(-12.0, -12.0)),
            ("se", Vec2::new(12.0, -12.0)),
        ] {
            let p = center + corner;
            let inward = (-corner).angle();
            let pu = format!("pu-{tag}");
            sensors.push(SensorSpec::new(format!("{tag}-lidar"), SensorKind::Lidar, [p.x, p.y, 4.0], 0.0, pu.clone()).with_range(60.0));
            sensors.push(SensorSpec::new(format!("{tag}-cam"), SensorKind::Camera, [p.x + 0.4, p.y, 3.8], inward, pu.clone()));
            sensors.push(SensorSpec::new(format!("{tag}-radar"), SensorKind::Radar, [p.x, p.y + 0.4, 3.0], inward, pu));
        }
        PlacementLayout {
            name: LayoutKind::FullyDistributed,
            sensors,
        }
    }

    pub fn preset(kind: &LayoutKind, center: Vec2) -> Option<Self> {
        match kind {
            LayoutKind::Centralized => Some(Self::centralized(center)),
            LayoutKind::PartiallyDistributed => Some(Self::partially_distributed(center)),
            LayoutKind::FullyDistributed => Some(Self::fully_distributed(center)),
            LayoutKind::Custom(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageCell {
    pub center: Vec2,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageMap {
    pub grid: f64,
    pub cells: Vec<CoverageCell>,
    /// Share of cells seen by at least one sensor.
    pub covered_fraction: f64,
    /// Share of cells seen by at least two sensors.
    pub redundancy_fraction: f64,
}

/// Counts, for every grid cell whose center lies in an intersection region,
/// how many sensors reach it (range and aperture; no dynamic occluders).
/// Cell centers sit at `((i + ½)·grid, (j + ½)·grid)`.
pub fn placement_coverage(layout: &PlacementLayout, m: &VectorMap, grid: f64) -> CoverageMap {
    assert!(grid > 0.0, "grid must be positive");
    let mut cells = Vec::new();
    for r in &m.intersections {
        let lo_i = ((r.center.x - r.d_f) / grid).floor() as i64 - 1;
        let hi_i = ((r.center.x + r.d_f) / grid).ceil() as i64 + 1;
        let lo_j = ((r.center.y - r.d_f) / grid).floor() as i64 - 1;
        let hi_j = ((r.center.y + r.d_f) / grid).ceil() as i64 + 1;
        for i in lo_i..=hi_i {
            for j in lo_j..=hi_j {
                let c = Vec2::new((i as f64 + 0.5) * grid, (j as f64 + 0.5) * grid);
                if !r.contains_planar(c) {
                    continue;
                }
                // Overlapping regions share cells; count each cell once.
                if m.intersections
                    .iter()
                    .take_while(|o| o.id != r.id)
                    .any(|o| o.contains_planar(c))
                {
                    continue;
                }
                let count = layout.sensors.iter().filter(|s| s.covers(c)).count();
                cells.push(CoverageCell { center: c, count });
            }
        }
    }
    let n = cells.len().max(1) as f64;
    let covered = cells.iter().filter(|c| c.count >= 1).count() as f64;
    let redundant = cells.iter().filter(|c| c.count >= 2).count() as f64;
    CoverageMap {
        grid,
        covered_fraction: if cells.is_empty() { 0.0 } else { covered / n },
        redundancy_fraction: if cells.is_empty() { 0.0 } else { redundant / n },
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::{IntersectionRegion, Lane};
    use std::f64::consts::TAU;

    fn fixture() -> VectorMap {
        let lane = Lane {
            id: "l".into(),
            centerline: vec![Vec2::new(-100.0, 0.0), Vec2::new(100.0, 0.0)],
            width: 3.5,
            successors: vec![],
            speed_limit: 10.0,
        };
        VectorMap::new(vec![lane], vec![IntersectionRegion::new("x", Vec2::ZERO, 50.0, 0.0)], vec![], 0.0)
            .unwrap()
    }

    #[test]
    fn central_lidar_covers_everything() {
        let s = SensorSpec::new("l", SensorKind::Lidar, [0.0, 0.0, 4.0], 0.0, "p").with_range(50.0);
        assert_eq!(s.fov, TAU);
        let cov = placement_coverage(&PlacementLayout::custom("one", vec![s]), &fixture(), 5.0);
        assert_eq!(cov.covered_fraction, 1.0);
        assert_eq!(cov.redundancy_fraction, 0.0);
    }

    #[test]
    fn no_sensors_no_coverage() {
        let cov = placement_coverage(&PlacementLayout::custom("none", vec![]), &fixture(), 5.0);
        assert_eq!(cov.covered_fraction, 0.0);
        assert!(!cov.cells.is_empty());
    }

    #[test]
    fn corner_cameras_beat_one_central_camera() {
        let d_f = 50.0;
        let corners: Vec<SensorSpec> = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
            .iter()
            .enumerate()
            .map(|(i, &(sx, sy))| {
                let p = Vec2::new(sx, sy) * (d_f / 2f64.sqrt());
                SensorSpec::new(format!("c{i}"), SensorKind::Camera, [p.x, p.y, 4.0], (-p).angle(), "p")
                    .with_fov(FRAC_PI_2)
                    .with_range(2.0 * d_f)
            })
            .collect();
        let central = vec![SensorSpec::new("c", SensorKind::Camera, [0.0, 0.0, 4.0], 0.0, "p")
            .with_fov(FRAC_PI_2)
            .with_range(2.0 * d_f)];
        let m = fixture();
        let a = placement_coverage(&PlacementLayout::custom("corners", corners.clone()), &m, 5.0);
        let b = placement_coverage(&PlacementLayout::custom("center", central.clone()), &m, 5.0);
        // Independent cell enumeration over the same lattice.
        let brute = |layout: &[SensorSpec]| {
            let mut tot = 0;
            let mut hit = 0;
            for i in -20..20 {
                for j in -20..20 {
                    let c = Vec2::new((i as f64 + 0.5) * 5.0, (j as f64 + 0.5) * 5.0);
                    if c.norm() <= d_f {
                        tot += 1;
                        if layout.iter().any(|s| s.covers(c)) {
                            hit += 1;
                        }
                    }
                }
            }
            hit as f64 / tot as f64
        };
        assert_eq!(a.covered_fraction, brute(&corners));
        assert_eq!(b.covered_fraction, brute(&central));
        assert!(b.covered_fraction > 0.2 && b.covered_fraction < 0.3, "{}", b.covered_fraction);
        assert!(a.covered_fraction > b.covered_fraction);
        assert!(a.covered_fraction > 0.9);
    }

    #[test]
    fn presets_are_consistent_units() {
        for kind in [LayoutKind::Centralized, LayoutKind::PartiallyDistributed, LayoutKind::FullyDistributed] {
            let layout = PlacementLayout::preset(&kind, Vec2::ZERO).unwrap();
            let ius = crate::infrastructure::cluster_sensors_into_ius(&layout.sensors).unwrap();
            assert!(ius.iter().all(|u| u.is_consistent()));
            let expected = match kind {
                LayoutKind::Centralized => 1,
                LayoutKind::PartiallyDistributed => 2,
                _ => 4,
            };
            assert_eq!(ius.len(), expected, "{}", kind.name());
        }
    }
}
