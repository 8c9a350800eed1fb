use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the magnitude of the error integral.
    pub integral_limit: f64,
    /// Output clamp, m/s².
    pub a_max: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        PidGains {
            kp: 2.0,
            ki: 0.1,
            kd: 0.0,
            integral_limit: 5.0,
            a_max: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: Option<f64>,
}

/// One PID step on speed error. Returns the clamped acceleration command.
pub fn pid_speed_control(target: f64, current: f64, state: &mut PidState, gains: &PidGains, dt: f64) -> f64 {
    let e = target - current;
    state.integral = (state.integral + e * dt).clamp(-gains.integral_limit, gains.integral_limit);
    let de = state.prev_error.map_or(0.0, |p| (e - p) / dt);
    state.prev_error = Some(e);
    let u = gains.kp * e + gains.ki * state.integral + gains.kd * de;
    u.clamp(-gains.a_max, gains.a_max)
}
