//! Time course of the gain/loss rate shared by the dimer reference and the
//! embedding controller.

use serde::{Deserialize, Serialize};

/// Gain/loss rate schedule. The derivative is supplied analytically; the
/// control equations contain it explicitly and numerical differentiation
/// would inject noise into the solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", deny_unknown_fields)]
pub enum GammaSchedule {
    /// Constant rate for all times.
    #[serde(rename = "constant")]
    Constant { target: f64 },
    /// Cosine ramp from zero to `target` over `ramp_time`:
    /// `target * (1 - cos(pi t / ramp_time)) / 2` for `0 <= t <= ramp_time`,
    /// zero before, `target` after.
    #[serde(rename = "ramp")]
    AdiabaticRamp { target: f64, ramp_time: f64 },
}

impl GammaSchedule {
    /// Rate and its time derivative at time `t`.
    pub fn value(&self, t: f64) -> (f64, f64) {
        match *self {
            GammaSchedule::Constant { target } => (target, 0.0),
            GammaSchedule::AdiabaticRamp { target, ramp_time } => {
                if t < 0.0 {
                    (0.0, 0.0)
                } else if t <= ramp_time {
                    let phase = std::f64::consts::PI * t / ramp_time;
                    let gamma = target * (1.0 - phase.cos()) / 2.0;
                    let gamma_dot = target * std::f64::consts::PI * phase.sin() / (2.0 * ramp_time);
                    (gamma, gamma_dot)
                } else {
                    (target, 0.0)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints_and_midpoint() {
        let sched = GammaSchedule::AdiabaticRamp {
            target: 0.5,
            ramp_time: 20.0,
        };
        assert_eq!(sched.value(0.0), (0.0, 0.0));
        let (g, gd) = sched.value(10.0);
        assert!((g - 0.25).abs() < 1e-15);
        assert!((gd - 0.5 * std::f64::consts::PI / 40.0).abs() < 1e-15);
        assert_eq!(sched.value(20.0).0, 0.5);
        assert_eq!(sched.value(25.0), (0.5, 0.0));
        assert_eq!(sched.value(-1.0), (0.0, 0.0));
    }

    #[test]
    fn constant_has_zero_derivative() {
        let sched = GammaSchedule::Constant { target: 0.6 };
        assert_eq!(sched.value(3.0), (0.6, 0.0));
    }
}
