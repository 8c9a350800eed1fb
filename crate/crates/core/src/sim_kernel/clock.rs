/// Fixed-step simulation clock. Time is always `step_index * dt`, never a
/// running sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    pub dt: f64,
    pub step_index: u64,
}

impl SimClock {
    pub fn new(dt: f64) -> Self {
        SimClock { dt, step_index: 0 }
    }

    pub fn t(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    pub fn advance(&mut self) {
        self.step_index += 1;
    }

    /// Number of steps covering `duration`.
    pub fn steps_for(duration: f64, dt: f64) -> u64 {
        (duration / dt - 1e-9).ceil().max(0.0) as u64
    }
}
