use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data_pipeline::DetectionFrame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum V2xMode {
    V2V,
    V2I,
    I2V,
    I2I,
}

#[derive(Debug, Clone, PartialEq)]
pub struct V2xMessage {
    pub sender: String,
    pub send_time: f64,
    pub payload: DetectionFrame,
    pub mode: V2xMode,
}

impl V2xMessage {
    pub fn new(sender: impl Into<String>, send_time: f64, payload: DetectionFrame, mode: V2xMode) -> Result<Self> {
        if payload.timestamp > send_time {
            return Err(Error::InvalidArgument(format!(
                "payload timestamp {} is after send time {send_time}",
                payload.timestamp
            )));
        }
        Ok(V2xMessage {
            sender: sender.into(),
            send_time,
            payload,
            mode,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelModel {
    pub base_latency: f64,
    /// Upper bound of the uniform extra delay.
    pub jitter: f64,
    pub drop_rate: f64,
    pub range_limit: Option<f64>,
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel {
            base_latency: 0.1,
            jitter: 0.02,
            drop_rate: 0.0,
            range_limit: None,
        }
    }
}

impl ChannelModel {
    pub const IDEAL: ChannelModel = ChannelModel {
        base_latency: 0.0,
        jitter: 0.0,
        drop_rate: 0.0,
        range_limit: None,
    };

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.base_latency >= 0.0) {
            v.push("channel.base_latency must be >= 0".into());
        }
        if !(self.jitter >= 0.0) {
            v.push("channel.jitter must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.drop_rate) {
            v.push("channel.drop_rate must be in [0, 1]".into());
        }
        v
    }
}

/// Per-mode partial override of the base channel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChannelOverride {
    pub base_latency: Option<f64>,
    pub jitter: Option<f64>,
    pub drop_rate: Option<f64>,
    pub range_limit: Option<f64>,
}

/// The `channel` block of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    #[serde(flatten)]
    pub base: ChannelModel,
    #[serde(default = "default_seed_label")]
    pub seed_label: String,
    #[serde(default)]
    pub overrides: BTreeMap<V2xMode, ChannelOverride>,
}

fn default_seed_label() -> String {
    crate::rng::CHANNEL.to_string()
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            base: ChannelModel::default(),
            seed_label: default_seed_label(),
            overrides: BTreeMap::new(),
        }
    }
}

impl ChannelConfig {
    pub fn model_for(&self, mode: V2xMode) -> ChannelModel {
        let mut m = self.base;
        if let Some(o) = self.overrides.get(&mode) {
            m.base_latency = o.base_latency.unwrap_or(m.base_latency);
            m.jitter = o.jitter.unwrap_or(m.jitter);
            m.drop_rate = o.drop_rate.unwrap_or(m.drop_rate);
            if o.range_limit.is_some() {
                m.range_limit = o.range_limit;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delivery {
    At(f64),
    Dropped,
}

/// Decides the fate of one message. Both random draws are always taken so
/// the stream position does not depend on the outcome.
pub fn transmit(msg: &V2xMessage, ch: &ChannelModel, rng: &mut impl Rng, distance: Option<f64>) -> Delivery {
    let u: f64 = rng.random();
    let j: f64 = rng.random();
    if let (Some(limit), Some(d)) = (ch.range_limit, distance) {
        if d > limit {
            return Delivery::Dropped;
        }
    }
    if u < ch.drop_rate {
        return Delivery::Dropped;
    }
    Delivery::At(msg.send_time + ch.base_latency + ch.jitter * j)
}

struct Pending {
    at: f64,
    seq: u64,
    msg: V2xMessage,
}

impl PartialEq for Pending {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Pending {
    fn cmp(&self, o: &Self) -> Ordering {
        // Min-heap on (delivery time, enqueue order).
        o.at.total_cmp(&self.at).then(o.seq.cmp(&self.seq))
    }
}

/// Receiver-side queue ordered by delivery time.
#[derive(Default)]
pub struct MessageQueue {
    heap: BinaryHeap<Pending>,
    seq: u64,
}

impl MessageQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, msg: V2xMessage, delivery: f64) {
        self.heap.push(Pending {
            at: delivery,
            seq: self.seq,
            msg,
        });
        self.seq += 1;
    }

    /// Messages delivered at or before `t`, in delivery order.
    pub fn pop_ready(&mut self, t: f64) -> Vec<(f64, V2xMessage)> {
        let mut out = Vec::new();
        while self.heap.peek().is_some_and(|p| p.at <= t) {
            let p = self.heap.pop().unwrap();
            out.push((p.at, p.msg));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
