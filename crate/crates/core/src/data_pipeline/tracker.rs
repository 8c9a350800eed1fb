use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim_kernel::{ObjectClass, ObjectState, TrackId};

use super::{assign_gated, kalman_predict_update, DetectionFrame, KalmanNoise, KalmanState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerParams {
    /// Association gate on predicted-to-detected center distance, meters.
    pub gate: f64,
    /// A track dies after this many consecutive misses.
    pub max_misses: u32,
    /// Tracks with fewer hits are provisional.
    pub min_hits: u32,
    pub noise: KalmanNoise,
    pub init_pos_var: f64,
    pub init_vel_var: f64,
    pub id_prefix: String,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            gate: 2.0,
            max_misses: 3,
            min_hits: 2,
            noise: KalmanNoise::default(),
            init_pos_var: 0.25,
            init_vel_var: 4.0,
            id_prefix: "trk".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub track_id: TrackId,
    pub class: ObjectClass,
    /// Detections attributed to this track, in time order.
    pub states: Vec<ObjectState>,
    pub kalman: KalmanState,
    pub hits: u32,
    pub misses: u32,
    last_time: f64,
}

impl TrackRecord {
    /// A track built from an already-labelled sequence of states.
    pub fn from_states(track_id: TrackId, states: Vec<ObjectState>) -> Self {
        let first = &states[0];
        let last = states.last().unwrap();
        let v = last.velocity();
        TrackRecord {
            class: first.class,
            kalman: KalmanState::from_position(last.x, last.y, 0.25, 4.0),
            hits: states.len() as u32,
            misses: 0,
            last_time: last.timestamp,
            track_id,
            states,
        }
        .with_velocity(v.x, v.y)
    }

    fn with_velocity(mut self, vx: f64, vy: f64) -> Self {
        self.kalman.mean[2] = vx;
        self.kalman.mean[3] = vy;
        self
    }

    pub fn start_time(&self) -> f64 {
        self.states.first().map_or(f64::NAN, |s| s.timestamp)
    }

    pub fn end_time(&self) -> f64 {
        self.states.last().map_or(f64::NAN, |s| s.timestamp)
    }

    pub fn is_confirmed(&self, min_hits: u32) -> bool {
        self.hits >= min_hits
    }
}

/// Multi-frame associator: constant-velocity Kalman prediction, gated
/// Hungarian matching on center distance, track birth and death.
#[derive(Debug, Clone)]
pub struct Tracker {
    pub params: TrackerParams,
    live: Vec<TrackRecord>,
    finished: Vec<TrackRecord>,
    next_id: u64,
}

impl Tracker {
    pub fn new(params: TrackerParams) -> Self {
        Tracker {
            params,
            live: Vec::new(),
            finished: Vec::new(),
            next_id: 1,
        }
    }

    pub fn live_tracks(&self) -> &[TrackRecord] {
        &self.live
    }

    /// Every track ever opened (live and dead), ordered by id.
    pub fn into_tracks(mut self) -> Vec<TrackRecord> {
        self.finished.append(&mut self.live);
        self.finished.sort_by(|a, b| a.track_id.cmp(&b.track_id));
        self.finished
    }

    fn fresh_id(&mut self) -> TrackId {
        let id = TrackId(format!("{}{:06}", self.params.id_prefix, self.next_id));
        self.next_id += 1;
        id
    }

    /// Associates one frame. Returns the frame with every detection labelled
    /// by the track it was attributed to.
    pub fn associate(&mut self, frame: &DetectionFrame) -> Result<DetectionFrame> {
        let t = frame.timestamp;
        let noise = self.params.noise;
        let mut predicted = Vec::with_capacity(self.live.len());
        for tr in &self.live {
            let dt = t - tr.last_time;
            let k = if dt > 0.0 {
                kalman_predict_update(&tr.kalman, dt, None, &noise)?
            } else {
                tr.kalman
            };
            predicted.push(k);
        }
        let cost: Vec<Vec<f64>> = self
            .live
            .iter()
            .zip(&predicted)
            .map(|(tr, k)| {
                let (px, py) = k.position();
                frame
                    .objects
                    .iter()
                    .map(|d| {
                        if d.object.class != tr.class {
                            f64::INFINITY
                        } else {
                            (d.object.x - px).hypot(d.object.y - py)
                        }
                    })
                    .collect()
            })
            .collect();
        let pairs = if self.live.is_empty() {
            Vec::new()
        } else {
            assign_gated(&cost, self.params.gate)
        };

        let mut labelled = frame.clone();
        let mut det_taken = vec![false; frame.objects.len()];
        let mut track_hit = vec![false; self.live.len()];
        for &(ti, di) in &pairs {
            det_taken[di] = true;
            track_hit[ti] = true;
            let det = &frame.objects[di].object;
            let tr = &mut self.live[ti];
            let dt = t - tr.last_time;
            tr.kalman = if dt > 0.0 {
                kalman_predict_update(&tr.kalman, dt, Some((det.x, det.y)), &noise)?
            } else {
                tr.kalman
            };
            tr.hits += 1;
            tr.misses = 0;
            tr.last_time = t;
            let mut s = det.clone();
            s.track_id = Some(tr.track_id.clone());
            s.timestamp = t;
            labelled.objects[di].object.track_id = s.track_id.clone();
            tr.states.push(s);
        }
        let mut survivors = Vec::with_capacity(self.live.len());
        for (i, mut tr) in std::mem::take(&mut self.live).into_iter().enumerate() {
            if !track_hit[i] {
                tr.kalman = predicted[i];
                if t > tr.last_time {
                    tr.last_time = t;
                }
                tr.misses += 1;
                if tr.misses >= self.params.max_misses {
                    self.finished.push(tr);
                    continue;
                }
            }
            survivors.push(tr);
        }
        self.live = survivors;
        for (di, taken) in det_taken.into_iter().enumerate() {
            if taken {
                continue;
            }
            let det = &frame.objects[di].object;
            let id = self.fresh_id();
            let v = det.velocity();
            let mut k =
                KalmanState::from_position(det.x, det.y, self.params.init_pos_var, self.params.init_vel_var);
            k.mean[2] = v.x;
            k.mean[3] = v.y;
            let mut s = det.clone();
            s.track_id = Some(id.clone());
            s.timestamp = t;
            labelled.objects[di].object.track_id = Some(id.clone());
            self.live.push(TrackRecord {
                track_id: id,
                class: det.class,
                states: vec![s],
                kalman: k,
                hits: 1,
                misses: 0,
                last_time: t,
            });
        }
        Ok(labelled)
    }
}

/// Free-function form of [`Tracker::associate`].
pub fn associate(tracker: &mut Tracker, frame: &DetectionFrame) -> Result<DetectionFrame> {
    tracker.associate(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_pipeline::Detection;

    fn frame(t: f64, pts: &[(f64, f64)]) -> DetectionFrame {
        let mut f = DetectionFrame::new(t, "cam");
        for &(x, y) in pts {
            f.objects
                .push(Detection::new(ObjectState::new(ObjectClass::Car).at(x, y), 0.9));
        }
        f
    }

    #[test]
    fn nearby_detection_updates_track() {
        let mut tr = Tracker::new(TrackerParams::default());
        tr.associate(&frame(0.0, &[(10.0, 0.0)])).unwrap();
        let out = tr.associate(&frame(0.1, &[(10.4, 0.0)])).unwrap();
        assert_eq!(tr.live_tracks().len(), 1);
        let t0 = &tr.live_tracks()[0];
        assert_eq!(t0.hits, 2);
        let (x, _) = t0.kalman.position();
        assert!(x > 10.0 && x < 10.4);
        assert_eq!(out.objects[0].object.track_id, Some(t0.track_id.clone()));
    }

    #[test]
    fn distant_detection_opens_track() {
        let mut tr = Tracker::new(TrackerParams::default());
        tr.associate(&frame(0.0, &[(10.0, 0.0)])).unwrap();
        tr.associate(&frame(0.1, &[(15.0, 0.0)])).unwrap();
        assert_eq!(tr.live_tracks().len(), 2);
    }

    #[test]
    fn track_dies_after_max_misses() {
        let mut tr = Tracker::new(TrackerParams::default());
        tr.associate(&frame(0.0, &[(0.0, 0.0)])).unwrap();
        for k in 1..=3 {
            tr.associate(&frame(0.1 * k as f64, &[])).unwrap();
        }
        assert!(tr.live_tracks().is_empty());
        assert_eq!(tr.into_tracks().len(), 1);
    }

    #[test]
    fn class_mismatch_never_associates() {
        let mut tr = Tracker::new(TrackerParams::default());
        tr.associate(&frame(0.0, &[(0.0, 0.0)])).unwrap();
        let mut f = DetectionFrame::new(0.1, "cam");
        f.objects
            .push(Detection::new(ObjectState::new(ObjectClass::Pedestrian).at(0.1, 0.0), 0.9));
        tr.associate(&f).unwrap();
        assert_eq!(tr.live_tracks().len(), 2);
    }
}
