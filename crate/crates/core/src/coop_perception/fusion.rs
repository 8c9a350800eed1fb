use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::data_pipeline::{assign_gated, Detection, DetectionFrame};
use crate::geometry::Vec2;
use crate::sim_kernel::TrackId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionParams {
    /// Largest center distance at which two reports are the same object.
    pub fuse_gate: f64,
    /// Received payloads older than this are discarded, seconds.
    pub staleness: f64,
}

impl Default for FusionParams {
    fn default() -> Self {
        FusionParams {
            fuse_gate: 2.0,
            staleness: 0.5,
        }
    }
}

/// Which sources contributed to one fused object.
pub type Provenance = Vec<(String, Option<TrackId>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct FusedFrame {
    pub frame: DetectionFrame,
    /// One entry per output object, same order.
    pub provenance: Vec<Provenance>,
}

struct Member {
    source: String,
    is_local: bool,
    det: Detection,
}

struct Cluster {
    members: Vec<Member>,
}

impl Cluster {
    fn class(&self) -> crate::sim_kernel::ObjectClass {
        self.members[0].det.object.class
    }

    fn weights(&self) -> Vec<f64> {
        let total: f64 = self.members.iter().map(|m| m.det.confidence).sum();
        if total > 0.0 {
            self.members.iter().map(|m| m.det.confidence / total).collect()
        } else {
            vec![1.0 / self.members.len() as f64; self.members.len()]
        }
    }

    fn center(&self) -> Vec2 {
        if self.members.len() == 1 {
            return self.members[0].det.object.planar();
        }
        self.weights()
            .iter()
            .zip(&self.members)
            .fold(Vec2::ZERO, |acc, (w, m)| acc + m.det.object.planar() * *w)
    }

    fn collapse(&self) -> Detection {
        if self.members.len() == 1 {
            return self.members[0].det.clone();
        }
        let w = self.weights();
        let wsum = |f: &dyn Fn(&Detection) -> f64| -> f64 {
            w.iter().zip(&self.members).map(|(w, m)| w * f(&m.det)).sum()
        };
        let first = self
            .members
            .iter()
            .find(|m| m.is_local)
            .unwrap_or(&self.members[0]);
        let mut o = first.det.object.clone();
        o.x = wsum(&|d| d.object.x);
        o.y = wsum(&|d| d.object.y);
        o.z = wsum(&|d| d.object.z);
        o.length = wsum(&|d| d.object.length);
        o.width = wsum(&|d| d.object.width);
        o.height = wsum(&|d| d.object.height);
        o.speed = wsum(&|d| d.object.speed);
        let s = wsum(&|d| d.object.yaw.sin());
        let c = wsum(&|d| d.object.yaw.cos());
        o.yaw = s.atan2(c);
        let miss: f64 = self.members.iter().map(|m| 1.0 - m.det.confidence).product();
        Detection::new(o, 1.0 - miss)
    }
}

/// The no-fusion baseline: the local frame as is.
pub fn no_fusion(local: &DetectionFrame) -> DetectionFrame {
    local.clone()
}

/// Late (object-level) fusion of the local frame with received frames.
///
/// Received payloads are aged to the local timestamp by constant-velocity
/// extrapolation (stale ones dropped; only the newest payload per source is
/// used). Sources are then folded in one at a time, each matched against the
/// running fused set with gated Hungarian assignment on center distance
/// (same class only). A final pass merges same-class objects still closer
/// than the gate. Each cluster collapses to a confidence-weighted mean with
/// circular yaw averaging and confidence `1 − ∏(1 − cᵢ)`.
pub fn late_fuse(local: &DetectionFrame, received: &[DetectionFrame], params: &FusionParams) -> FusedFrame {
    let mut latest: BTreeMap<&str, &DetectionFrame> = BTreeMap::new();
    for f in received {
        let age = local.timestamp - f.timestamp;
        if f.source_id == local.source_id || age > params.staleness || age < -1e-9 {
            continue;
        }
        match latest.get(f.source_id.as_str()) {
            Some(prev) if prev.timestamp >= f.timestamp => {}
            _ => {
                latest.insert(&f.source_id, f);
            }
        }
    }

    let mut clusters: Vec<Cluster> = local
        .objects
        .iter()
        .map(|d| Cluster {
            members: vec![Member {
                source: local.source_id.clone(),
                is_local: true,
                det: d.clone(),
            }],
        })
        .collect();

    if latest.is_empty() {
        return FusedFrame {
            frame: local.clone(),
            provenance: clusters
                .iter()
                .map(|c| vec![(c.members[0].source.clone(), c.members[0].det.object.track_id.clone())])
                .collect(),
        };
    }

    for (source, frame) in &latest {
        let age = (local.timestamp - frame.timestamp).max(0.0);
        let aligned: Vec<Detection> = frame
            .objects
            .iter()
            .map(|d| {
                let mut o = d.object.extrapolated(age);
                o.timestamp = local.timestamp;
                Detection::new(o, d.confidence)
            })
            .collect();
        let centers: Vec<Vec2> = clusters.iter().map(Cluster::center).collect();
        let cost: Vec<Vec<f64>> = clusters
            .iter()
            .zip(&centers)
            .map(|(c, center)| {
                aligned
                    .iter()
                    .map(|d| {
                        if d.object.class == c.class() {
                            center.distance(d.object.planar())
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        let pairs = if clusters.is_empty() {
            Vec::new()
        } else {
            assign_gated(&cost, params.fuse_gate)
        };
        let mut taken = vec![false; aligned.len()];
        for &(ci, di) in &pairs {
            taken[di] = true;
            clusters[ci].members.push(Member {
                source: source.to_string(),
                is_local: false,
                det: aligned[di].clone(),
            });
        }
        for (di, d) in aligned.into_iter().enumerate() {
            if !taken[di] {
                clusters.push(Cluster {
                    members: vec![Member {
                        source: source.to_string(),
                        is_local: false,
                        det: d,
                    }],
                });
            }
        }
    }

    // Merge leftovers closer than the gate, nearest pair first.
    loop {
        let centers: Vec<Vec2> = clusters.iter().map(Cluster::center).collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if clusters[i].class() != clusters[j].class() {
                    continue;
                }
                let d = centers[i].distance(centers[j]);
                if d < params.fuse_gate && best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let absorbed = clusters.remove(j);
        clusters[i].members.extend(absorbed.members);
    }

    let mut used: BTreeSet<TrackId> = BTreeSet::new();
    let mut out = DetectionFrame::new(local.timestamp, local.source_id.clone());
    let mut provenance = Vec::with_capacity(clusters.len());
    for (k, c) in clusters.iter().enumerate() {
        let mut det = c.collapse();
        let lead = c.members.iter().find(|m| m.is_local).unwrap_or(&c.members[0]);
        let mut candidates = Vec::new();
        if let Some(id) = &lead.det.object.track_id {
            candidates.push(id.clone());
            if !lead.is_local {
                candidates.push(TrackId(format!("{}:{}", lead.source, id)));
            }
        }
        candidates.push(TrackId(format!("fused-{k}")));
        let id = candidates
            .into_iter()
            .find(|id| !used.contains(id))
            .unwrap_or_else(|| TrackId(format!("fused-{k}-{}", used.len())));
        used.insert(id.clone());
        det.object.track_id = Some(id);
        provenance.push(
            c.members
                .iter()
                .map(|m| (m.source.clone(), m.det.object.track_id.clone()))
                .collect(),
        );
        out.objects.push(det);
    }
    FusedFrame {
        frame: out,
        provenance,
    }
}
