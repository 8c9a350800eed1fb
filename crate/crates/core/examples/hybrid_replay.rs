//! Synthetic actors on top of a replayed frame: a red-light runner aimed at
//! a recorded car shows up as a conflict in the union.

use coopsim::data_pipeline::DetectionFrame;
use coopsim::sim_kernel::{detect_conflicts, synthesize_hybrid_frame, ObjectClass, ObjectState};

fn main() -> coopsim::Result<()> {
    let replay = DetectionFrame::from_states(
        5.0,
        "iu-ne",
        &[ObjectState::new(ObjectClass::Car).with_id("trk000007").at(-1.75, 20.0).heading(-std::f64::consts::FRAC_PI_2).moving(10.0)],
    );
    let mut runner = ObjectState::new(ObjectClass::Car)
        .with_id("inj-00-red_light_runner")
        .at(-21.75, 0.0)
        .moving(10.0);
    runner.timestamp = 5.0;
    let frame = synthesize_hybrid_frame(&replay, &[runner], 0.05)?;
    for o in frame.states() {
        println!("{:<28} ({:6.2}, {:6.2})", o.id_str(), o.x, o.y);
    }
    let states: Vec<ObjectState> = frame.states().cloned().collect();
    for c in detect_conflicts(&states, 3.0, 0.05) {
        println!("{} {} / {} ttc {:?}", c.kind.as_str(), c.pair.0, c.pair.1, c.ttc);
    }
    Ok(())
}
