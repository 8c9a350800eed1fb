use crate::world_model::TrafficSignal;

/// What a phase asks of approaching traffic, read from the first letter of
/// its name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseAction {
    Go,
    Caution,
    Stop,
}

impl PhaseAction {
    pub fn of(name: &str) -> Self {
        match name.chars().next().map(|c| c.to_ascii_lowercase()) {
            Some('r') => PhaseAction::Stop,
            Some('y') | Some('a') => PhaseAction::Caution,
            _ => PhaseAction::Go,
        }
    }
}

/// Phase active at `t`. A boundary instant belongs to the phase it starts.
pub fn traffic_light_phase(signal: &TrafficSignal, t: f64) -> &str {
    let cycle = signal.cycle_length();
    let local = t.rem_euclid(cycle);
    let mut acc = 0.0;
    for (name, d) in &signal.phase_durations {
        acc += d;
        if local < acc {
            return name;
        }
    }
    &signal.phase_durations[0].0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> TrafficSignal {
        TrafficSignal {
            id: "s".into(),
            intersection_id: "i".into(),
            phase_durations: vec![("G".into(), 10.0), ("Y".into(), 3.0), ("R".into(), 10.0)],
            controlled_lane_ids: vec![],
        }
    }

    #[test]
    fn phases() {
        let s = sig();
        assert_eq!(traffic_light_phase(&s, 11.0), "Y");
        assert_eq!(traffic_light_phase(&s, 23.0), "G");
        assert_eq!(traffic_light_phase(&s, 10.0), "Y");
        assert_eq!(traffic_light_phase(&s, 0.0), "G");
        assert_eq!(traffic_light_phase(&s, 22.999), "R");
    }

    #[test]
    fn actions() {
        assert_eq!(PhaseAction::of("green"), PhaseAction::Go);
        assert_eq!(PhaseAction::of("Y"), PhaseAction::Caution);
        assert_eq!(PhaseAction::of("red"), PhaseAction::Stop);
    }
}
