//! Simulated detection, the V2X/I2I channel, and late fusion.

mod channel;
mod fusion;
mod noise;

pub use channel::{
    transmit, ChannelConfig, ChannelModel, ChannelOverride, Delivery, MessageQueue, V2xMessage,
    V2xMode,
};
pub use fusion::{late_fuse, no_fusion, FusedFrame, FusionParams, Provenance};
pub use noise::{simulate_detections, NoiseModel};
