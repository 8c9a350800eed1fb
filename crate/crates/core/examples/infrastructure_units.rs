//! Clusters roadside sensors into infrastructure units, groups them by
//! intersection and checks who sees a pedestrian behind a truck.

use coopsim::infrastructure::{cluster_sensors_into_ius, group_ius_by_intersection, load_sensors, sensor_visibility};
use coopsim::sim_kernel::{ObjectClass, ObjectState};
use coopsim::world_model::load_map;

fn main() -> coopsim::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let map = load_map(format!("{dir}/maps/four_way.json"))?;
    let sensors = load_sensors(format!("{dir}/sensors/occlusion_pair.json"))?;
    let units = cluster_sensors_into_ius(&sensors)?;
    for u in &units {
        let ids: Vec<&str> = u.sensors.iter().map(|s| s.id.as_str()).collect();
        println!("{}: {}", u.id, ids.join(", "));
    }
    for g in group_ius_by_intersection(&units, &map) {
        println!("intersection {} <- {:?}", g.intersection_id, g.units);
    }

    let scene = [
        ObjectState::new(ObjectClass::Truck).with_id("truck").at(0.0, -1.75).sized(12.0, 2.5, 3.5),
        ObjectState::new(ObjectClass::Pedestrian).with_id("ped").at(0.0, 12.0),
    ];
    for u in &units {
        let seen: Vec<String> = sensor_visibility(&u.sensors[0], &scene).iter().map(|id| id.to_string()).collect();
        println!("{} sees {:?}", u.sensors[0].id, seen);
    }
    Ok(())
}
