use std::f64::consts::PI;

use proptest::prelude::*;

use coopsim::coop_perception::{late_fuse, FusionParams};
use coopsim::data_pipeline::{
    hungarian, kalman_predict_update, read_frames, refine_trajectories, write_frames, Detection, DetectionFrame,
    KalmanNoise, KalmanState, RefineParams, TrackRecord,
};
use coopsim::evaluation::{average_precision, bev_iou, run_pose_errors, traffic_metrics, TrafficParams};
use coopsim::geometry::{OrientedBox, Vec2};
use coopsim::infrastructure::{cluster_sensors_into_ius, SensorKind, SensorSpec};
use coopsim::sim_kernel::{detect_conflicts, plan_route, run_scenario, ObjectClass, ObjectState, ScenarioConfig, TrackId};
use coopsim::world_model::{IntersectionRegion, NodeId, WaypointGraph};

fn class_strategy() -> impl Strategy<Value = ObjectClass> {
    prop_oneof![
        Just(ObjectClass::Car),
        Just(ObjectClass::Truck),
        Just(ObjectClass::Bus),
        Just(ObjectClass::Pedestrian),
        Just(ObjectClass::Cyclist),
    ]
}

fn state_strategy() -> impl Strategy<Value = ObjectState> {
    (
        class_strategy(),
        -50.0..50.0f64,
        -50.0..50.0f64,
        -PI..PI,
        0.0..15.0f64,
        0.5..1.5f64,
    )
        .prop_map(|(class, x, y, yaw, speed, scale)| {
            let [l, w, h] = class.default_size();
            ObjectState::new(class)
                .at(x, y)
                .heading(yaw)
                .moving(speed)
                .sized(l * scale, w * scale, h * scale)
        })
}

fn box_strategy() -> impl Strategy<Value = OrientedBox> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.3..6.0f64, 0.3..3.0f64, -PI..PI)
        .prop_map(|(x, y, l, w, yaw)| OrientedBox::new(Vec2::new(x, y), l, w, yaw))
}

fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.min(cost[row][c] + go(cost, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let (n, m) = (cost.len(), cost[0].len());
    if n <= m {
        go(cost, 0, &mut vec![false; m])
    } else {
        let t: Vec<Vec<f64>> = (0..m).map(|c| (0..n).map(|r| cost[r][c]).collect()).collect();
        go(&t, 0, &mut vec![false; n])
    }
}

fn ids(frame: &DetectionFrame) -> DetectionFrame {
    let mut f = frame.clone();
    for (i, d) in f.objects.iter_mut().enumerate() {
        d.object.track_id = Some(TrackId::new(format!("o{i}")));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hungarian_is_optimal((n, m) in (1usize..=5, 1usize..=5), seed in prop::collection::vec(0u32..50, 25)) {
        let cost: Vec<Vec<f64>> = (0..n).map(|r| (0..m).map(|c| seed[r * 5 + c] as f64).collect()).collect();
        let assign = hungarian(&cost);
        let total: f64 = assign.iter().enumerate().filter_map(|(r, c)| c.map(|c| cost[r][c])).sum();
        prop_assert_eq!(assign.iter().flatten().count(), n.min(m));
        prop_assert_eq!(total, brute_force_min(&cost));
    }

    #[test]
    fn kalman_covariance_stays_psd(steps in prop::collection::vec((0.01..2.0f64, prop::option::of((-20.0..20.0f64, -20.0..20.0f64))), 1..60),
                                   accel_var in 0.0..10.0f64, meas_var in 1e-4..5.0f64) {
        let noise = KalmanNoise { accel_var, meas_var };
        let mut s = KalmanState::from_position(0.0, 0.0, 1.0, 1.0);
        for (dt, z) in steps {
            s = kalman_predict_update(&s, dt, z, &noise).unwrap();
            prop_assert!(s.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn false_positive_never_raises_ap(scored in prop::collection::vec((1u8..10, any::<bool>()), 0..10), extra in 1u8..10, n_gt in 1usize..10) {
        let mut scored: Vec<(f64, bool)> = scored.into_iter().map(|(c, tp)| (c as f64 / 10.0, tp)).collect();
        let mut tp_budget = n_gt;
        for s in scored.iter_mut() {
            if s.1 {
                if tp_budget == 0 { s.1 = false } else { tp_budget -= 1 }
            }
        }
        let before = average_precision(&scored, n_gt).unwrap();
        scored.push((extra as f64 / 10.0, false));
        prop_assert!(average_precision(&scored, n_gt).unwrap() <= before + 1e-12);
    }

    #[test]
    fn top_true_positive_never_lowers_ap(scored in prop::collection::vec((1u8..10, any::<bool>()), 0..10), n_gt in 1usize..10) {
        let mut scored: Vec<(f64, bool)> = scored.into_iter().map(|(c, tp)| (c as f64 / 10.0, tp)).collect();
        let mut tp_budget = n_gt - 1;
        for s in scored.iter_mut() {
            if s.1 {
                if tp_budget == 0 { s.1 = false } else { tp_budget -= 1 }
            }
        }
        let before = average_precision(&scored, n_gt).unwrap();
        scored.push((1.0, true));
        prop_assert!(average_precision(&scored, n_gt).unwrap() >= before - 1e-12);
    }

    #[test]
    fn iou_symmetric_and_bounded(a in box_strategy(), b in box_strategy()) {
        let ab = bev_iou(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - bev_iou(&b, &a)).abs() < 1e-12);
        prop_assert!((bev_iou(&a, &a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn iou_rigid_invariant(a in box_strategy(), b in box_strategy(), dx in -100.0..100.0f64, dy in -100.0..100.0f64, rot in -PI..PI) {
        let move_box = |o: &OrientedBox| OrientedBox::new(o.center.rotate(rot) + Vec2::new(dx, dy), o.length, o.width, o.yaw + rot);
        prop_assert!((bev_iou(&a, &b) - bev_iou(&move_box(&a), &move_box(&b))).abs() < 1e-9);
    }

    #[test]
    fn refine_is_idempotent(pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3..30), spikes in prop::collection::vec((0usize..30, -20.0..20.0f64), 0..4)) {
        let mut states: Vec<ObjectState> = pts.iter().enumerate().map(|(i, &(nx, ny))| {
            let mut s = ObjectState::new(ObjectClass::Car).with_id("a").at(i as f64 * 0.5 + nx * 0.1, ny * 0.1).moving(10.0);
            s.timestamp = i as f64 * 0.05;
            s
        }).collect();
        for (k, d) in spikes {
            if let Some(s) = states.get_mut(k) { s.y += d; }
        }
        let once = refine_trajectories(&[TrackRecord::from_states(TrackId::from("a"), states)], &RefineParams::default());
        prop_assert_eq!(refine_trajectories(&once, &RefineParams::default()), once);
    }

    #[test]
    fn wire_round_trip(objs in prop::collection::vec((state_strategy(), 0.0..=1.0f64), 0..8), t in 0.0..1000.0f64) {
        let mut f = DetectionFrame::new(t, "src");
        f.objects = objs.into_iter().map(|(mut s, c)| { s.timestamp = t; Detection::new(s, c) }).collect();
        let f = ids(&f);
        let mut buf = Vec::new();
        write_frames(&mut buf, [&f]).unwrap();
        let back = read_frames(buf.as_slice()).unwrap();
        prop_assert_eq!(back.frames, vec![f]);
    }

    #[test]
    fn clustering_partitions_and_ignores_order(raw in prop::collection::vec((0.0..5.0f64, 0.0..5.0f64, 2.0..8.0f64, 0usize..3), 1..20), seed in any::<u64>()) {
        let sensors: Vec<SensorSpec> = raw.iter().enumerate()
            .map(|(i, &(x, y, z, p))| SensorSpec::new(format!("s{i:02}"), SensorKind::Lidar, [x, y, z], 0.0, format!("p{p}")))
            .collect();
        let units = cluster_sensors_into_ius(&sensors).unwrap();
        prop_assert_eq!(units.iter().map(|u| u.sensors.len()).sum::<usize>(), sensors.len());
        prop_assert!(units.iter().all(|u| u.is_consistent()));
        let mut shuffled = sensors.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_mul(31).wrapping_add(i * 7) % n);
        }
        prop_assert_eq!(cluster_sensors_into_ius(&shuffled).unwrap(), units);
    }

    #[test]
    fn fusion_invariants(local in prop::collection::vec((state_strategy(), 0.05..=1.0f64), 0..6),
                         remote in prop::collection::vec((state_strategy(), 0.05..=1.0f64), 0..6)) {
        let frame = |src: &str, v: &[(ObjectState, f64)]| {
            let mut f = DetectionFrame::new(1.0, src);
            f.objects = v.iter().map(|(s, c)| Detection::new(s.clone(), *c)).collect();
            ids(&f)
        };
        let l = frame("local", &local);
        let r = frame("remote", &remote);
        let params = FusionParams::default();
        prop_assert_eq!(late_fuse(&l, &[], &params).frame, l.clone());
        let fused = late_fuse(&l, &[r], &params);
        prop_assert!(fused.frame.objects.len() <= local.len() + remote.len());
        prop_assert_eq!(fused.provenance.len(), fused.frame.objects.len());
        prop_assert_eq!(fused.provenance.iter().map(|p| p.len()).sum::<usize>(), local.len() + remote.len());
        prop_assert!(fused.frame.objects.iter().all(|d| (0.0..=1.0).contains(&d.confidence)));
        prop_assert_eq!(fused.frame.timestamp, 1.0);
    }

    #[test]
    fn route_is_shortest(pos in prop::collection::vec((0.0..20.0f64, 0.0..20.0f64), 2..9),
                         edges in prop::collection::vec((0usize..9, 0usize..9, 1.0..3.0f64), 0..25)) {
        let n = pos.len();
        let mut g = WaypointGraph::new();
        for &(x, y) in &pos { g.add_node(Vec2::new(x, y)); }
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in dist.iter_mut().enumerate() { row[i] = 0.0; }
        for &(a, b, stretch) in &edges {
            let (a, b) = (a % n, b % n);
            if a == b { continue; }
            let w = g.node(NodeId(a)).position.distance(g.node(NodeId(b)).position) * stretch;
            g.add_edge(NodeId(a), NodeId(b), w);
            dist[a][b] = dist[a][b].min(w);
        }
        for k in 0..n { for i in 0..n { for j in 0..n {
            if dist[i][k] + dist[k][j] < dist[i][j] { dist[i][j] = dist[i][k] + dist[k][j]; }
        }}}
        match plan_route(&g, NodeId(0), NodeId(n - 1)) {
            Ok((path, cost)) => {
                prop_assert!((cost - dist[0][n - 1]).abs() < 1e-9);
                prop_assert_eq!(path.first().copied(), Some(NodeId(0)));
                prop_assert_eq!(path.last().copied(), Some(NodeId(n - 1)));
            }
            Err(_) => prop_assert!(dist[0][n - 1].is_infinite()),
        }
    }

    #[test]
    fn conflicts_ignore_input_order(states in prop::collection::vec(state_strategy(), 0..8), rot in 1usize..8) {
        let states: Vec<ObjectState> = states.into_iter().enumerate()
            .map(|(i, s)| s.with_id(format!("v{i}"))).collect();
        let a = detect_conflicts(&states, 4.0, 0.1);
        let mut shuffled = states.clone();
        if !shuffled.is_empty() {
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
        }
        prop_assert_eq!(detect_conflicts(&shuffled, 4.0, 0.1), a);
    }

    #[test]
    fn traffic_windows_are_consistent(speeds in prop::collection::vec(prop::collection::vec(0.0..12.0f64, 3), 5..40), w in 1.0..20.0f64) {
        let frames: Vec<DetectionFrame> = speeds.iter().enumerate().map(|(k, v)| {
            let t = k as f64 * 0.5;
            let states: Vec<ObjectState> = v.iter().enumerate().map(|(j, &sp)| {
                let mut s = ObjectState::new(ObjectClass::Car).with_id(format!("c{j}"))
                    .at(-15.0 + k as f64 * (1.0 + j as f64), j as f64).moving(sp);
                s.timestamp = t;
                s
            }).collect();
            DetectionFrame::from_states(t, "world", &states)
        }).collect();
        let region = IntersectionRegion::new("x", Vec2::ZERO, 10.0, 0.0);
        let m = traffic_metrics(&frames, &region, &TrafficParams { window: w, stop_speed: 0.5 });
        prop_assert!(m.delay_max >= m.delay_avg);
        prop_assert_eq!(m.windows.iter().map(|x| x.crossings).sum::<usize>(), m.crossings);
        prop_assert!(m.crossings <= m.vehicles_entered);
        for pair in m.windows.windows(2) {
            prop_assert!((pair[0].end - pair[1].start).abs() < 1e-9);
        }
        prop_assert_eq!(m.count_series.len(), frames.len());
    }

    #[test]
    fn pose_errors_rigid_invariant(pairs in prop::collection::vec((state_strategy(), -0.8..0.8f64, -0.8..0.8f64, -0.5..0.5f64), 1..6),
                                   dx in -100.0..100.0f64, dy in -100.0..100.0f64, rot in -PI..PI) {
        let gt: Vec<ObjectState> = pairs.iter().enumerate()
            .map(|(i, (s, ..))| { let mut s = s.clone(); s.x = i as f64 * 20.0; s.y = 0.0; s.with_id(format!("g{i}")) })
            .collect();
        let det: Vec<ObjectState> = gt.iter().zip(&pairs)
            .map(|(g, (_, ex, ey, eyaw))| g.clone().at(g.x + ex, g.y + ey).heading(g.yaw + eyaw))
            .collect();
        let moved = |v: &[ObjectState]| -> Vec<ObjectState> {
            v.iter().map(|s| {
                let p = Vec2::new(s.x, s.y).rotate(rot) + Vec2::new(dx, dy);
                s.clone().at(p.x, p.y).heading(s.yaw + rot)
            }).collect()
        };
        let frame = |v: &[ObjectState]| vec![DetectionFrame::from_states(0.0, "s", v)];
        let a = run_pose_errors(&frame(&gt), &frame(&det)).unwrap().unwrap();
        let b = run_pose_errors(&frame(&moved(&gt)), &frame(&moved(&det))).unwrap().unwrap();
        prop_assert!((a.ate - b.ate).abs() < 1e-9);
        prop_assert!((a.ase - b.ase).abs() < 1e-9);
        prop_assert!((a.aoe - b.aoe).abs() < 1e-9);
        prop_assert_eq!(a.count, b.count);
    }
}

#[test]
fn traffic_never_teleports() {
    let mut cfg = ScenarioConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios/traffic.json")).unwrap();
    for seed in [1, 2, 3] {
        cfg.environment.seed = seed;
        let out = run_scenario(&cfg).unwrap();
        let dt = cfg.environment.dt;
        for w in out.frames.windows(2) {
            for s in w[1].states() {
                if let Some(p) = w[0].states().find(|q| q.track_id == s.track_id) {
                    let step = Vec2::new(s.x - p.x, s.y - p.y).norm();
                    let bound = p.speed.max(s.speed) * dt + 1e-6;
                    assert!(step <= bound, "{} moved {step} m in one step (bound {bound})", s.id_str());
                }
            }
        }
    }
}
