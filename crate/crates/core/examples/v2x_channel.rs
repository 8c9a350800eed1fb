//! Sends a second of I2I messages over a lossy, jittery channel and prints
//! when each one arrives.

use coopsim::coop_perception::{transmit, ChannelModel, Delivery, MessageQueue, V2xMessage, V2xMode};
use coopsim::data_pipeline::DetectionFrame;
use coopsim::rng::{subsystem_rng, CHANNEL};

fn main() -> coopsim::Result<()> {
    let ch = ChannelModel {
        base_latency: 0.08,
        jitter: 0.04,
        drop_rate: 0.2,
        range_limit: Some(300.0),
    };
    let mut rng = subsystem_rng(42, CHANNEL);
    let mut queue = MessageQueue::new();
    for k in 0..10 {
        let t = k as f64 * 0.1;
        let msg = V2xMessage::new("iu-north", t, DetectionFrame::new(t, "iu-north"), V2xMode::I2I)?;
        match transmit(&msg, &ch, &mut rng, Some(70.0)) {
            Delivery::At(at) => queue.push(msg, at),
            Delivery::Dropped => println!("t={t:.1} dropped"),
        }
    }
    for (at, msg) in queue.pop_ready(f64::INFINITY) {
        println!("sent {:.1} arrived {:.3} (age {:.3})", msg.send_time, at, at - msg.payload.timestamp);
    }
    Ok(())
}
