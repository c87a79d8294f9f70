//! Closed-form time-optimal motion along straight segments and in-place turns.
//!
//! A robot always accelerates or decelerates as hard as it is allowed toward
//! the speed it wants, which gives trapezoidal (or triangular, when the
//! segment is too short to reach cruise speed) speed profiles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("invalid motion input: {0}")]
    InvalidInput(String),
    #[error("cannot slow from {from:.4} to {to:.4} within {distance:.4}: {deficit:.4} short")]
    InfeasibleDeceleration {
        from: f64,
        to: f64,
        distance: f64,
        /// Extra distance that would be needed to brake in time.
        deficit: f64,
    },
    #[error("time {t:.6}s outside profile of duration {duration:.6}s")]
    TimeOutOfRange { t: f64, duration: f64 },
}

/// Acceleration bounds for one load state. All values are magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccelLimits {
    /// Linear acceleration, m/s².
    pub acc: f64,
    /// Linear deceleration, m/s².
    pub dec: f64,
    /// Angular acceleration, rad/s².
    pub theta_acc: f64,
    /// Angular deceleration, rad/s².
    pub theta_dec: f64,
}

impl AccelLimits {
    pub const fn uniform(a: f64) -> Self {
        AccelLimits { acc: a, dec: a, theta_acc: a, theta_dec: a }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinematicLimits {
    /// Maximum linear speed, m/s.
    pub v_max: f64,
    /// Maximum angular speed, rad/s.
    pub v_theta_max: f64,
    pub unloaded: AccelLimits,
    pub loaded: AccelLimits,
}

impl Default for KinematicLimits {
    /// 0.2 m/s and 0.2 rad/s top speeds; 0.5 m/s² (rad/s²) empty and 0.25 loaded.
    fn default() -> Self {
        KinematicLimits {
            v_max: 0.2,
            v_theta_max: 0.2,
            unloaded: AccelLimits::uniform(0.5),
            loaded: AccelLimits::uniform(0.25),
        }
    }
}

impl KinematicLimits {
    pub fn accel(&self, loaded: bool) -> &AccelLimits {
        if loaded {
            &self.loaded
        } else {
            &self.unloaded
        }
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let all = [
            self.v_max,
            self.v_theta_max,
            self.unloaded.acc,
            self.unloaded.dec,
            self.unloaded.theta_acc,
            self.unloaded.theta_dec,
            self.loaded.acc,
            self.loaded.dec,
            self.loaded.theta_acc,
            self.loaded.theta_dec,
        ];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(KinematicsError::InvalidInput("kinematic limits must be positive and finite".into()));
        }
        let (u, l) = (&self.unloaded, &self.loaded);
        if l.acc > u.acc || l.dec > u.dec || l.theta_acc > u.theta_acc || l.theta_dec > u.theta_dec {
            return Err(KinematicsError::InvalidInput("loaded accelerations must not exceed unloaded ones".into()));
        }
        Ok(())
    }
}

/// One constant-acceleration piece of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub start_time: f64,
    pub duration: f64,
    pub start_position: f64,
    pub start_speed: f64,
    /// Signed acceleration during the phase (0 while cruising).
    pub accel: f64,
}

impl Phase {
    fn end_position(&self) -> f64 {
        self.start_position + self.start_speed * self.duration + 0.5 * self.accel * self.duration * self.duration
    }
}

/// Distance (or angle) traveled as a function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionProfile {
    pub distance: f64,
    pub initial_speed: f64,
    pub final_speed: f64,
    pub phases: Vec<Phase>,
    pub duration: f64,
}

impl MotionProfile {
    fn empty(initial_speed: f64) -> Self {
        MotionProfile {
            distance: 0.0,
            initial_speed,
            final_speed: initial_speed,
            phases: Vec::new(),
            duration: 0.0,
        }
    }

    /// Position and speed at `t` seconds after the start.
    pub fn state_at(&self, t: f64) -> Result<(f64, f64), KinematicsError> {
        if !(t >= -1e-9 && t <= self.duration + 1e-9) {
            return Err(KinematicsError::TimeOutOfRange { t, duration: self.duration });
        }
        Ok(self.sample(t))
    }

    /// Like [`state_at`](Self::state_at) but clamps `t` into the profile.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 || self.phases.is_empty() {
            return (0.0, self.initial_speed);
        }
        if t >= self.duration {
            return (self.distance, self.final_speed);
        }
        let phase = self
            .phases
            .iter()
            .rev()
            .find(|p| p.start_time <= t)
            .unwrap_or(&self.phases[0]);
        let dt = (t - phase.start_time).min(phase.duration);
        let pos = phase.start_position + phase.start_speed * dt + 0.5 * phase.accel * dt * dt;
        let speed = (phase.start_speed + phase.accel * dt).max(0.0);
        (pos.clamp(0.0, self.distance), speed)
    }

    /// Peak speed over the profile.
    pub fn peak_speed(&self) -> f64 {
        self.phases
            .iter()
            .map(|p| p.start_speed.max(p.start_speed + p.accel * p.duration))
            .fold(self.initial_speed, f64::max)
    }

    /// A profile that covers `distance` at constant `speed`, switching speed
    /// instantly at both ends.
    pub fn constant_speed(distance: f64, speed: f64) -> Result<Self, KinematicsError> {
        if !(distance >= 0.0 && distance.is_finite()) || !(speed > 0.0 && speed.is_finite()) {
            return Err(KinematicsError::InvalidInput(format!("distance {distance}, speed {speed}")));
        }
        if distance == 0.0 {
            return Ok(Self::empty(0.0));
        }
        let duration = distance / speed;
        Ok(MotionProfile {
            distance,
            initial_speed: 0.0,
            final_speed: 0.0,
            phases: vec![Phase { start_time: 0.0, duration, start_position: 0.0, start_speed: speed, accel: 0.0 }],
            duration,
        })
    }

    /// A constant-speed profile that takes exactly `duration` seconds.
    pub fn fixed_duration(distance: f64, duration: f64) -> Result<Self, KinematicsError> {
        if !(duration >= 0.0 && duration.is_finite()) || (duration == 0.0 && distance > 0.0) {
            return Err(KinematicsError::InvalidInput(format!("duration {duration} for distance {distance}")));
        }
        if distance == 0.0 {
            let mut p = Self::empty(0.0);
            if duration == 0.0 {
                return Ok(p);
            }
            p.duration = duration;
            p.phases.push(Phase { start_time: 0.0, duration, start_position: 0.0, start_speed: 0.0, accel: 0.0 });
            return Ok(p);
        }
        Self::constant_speed(distance, distance / duration)
    }
}

fn check_inputs(d: f64, v_i: f64, v_max: f64, v_f: f64, acc: f64, dec: f64) -> Result<(), KinematicsError> {
    let finite = [d, v_i, v_max, v_f, acc, dec].iter().all(|v| v.is_finite());
    if !finite || d < 0.0 || v_i < 0.0 || v_f < 0.0 || v_max <= 0.0 || acc <= 0.0 || dec <= 0.0 {
        return Err(KinematicsError::InvalidInput(format!(
            "d={d}, v_i={v_i}, v_max={v_max}, v_f={v_f}, acc={acc}, dec={dec}"
        )));
    }
    if v_i > v_max + 1e-12 || v_f > v_max + 1e-12 {
        return Err(KinematicsError::InvalidInput(format!(
            "speeds must not exceed the limit: v_i={v_i}, v_f={v_f}, v_max={v_max}"
        )));
    }
    Ok(())
}

/// Time-optimal bang-coast-bang profile over distance `d`, starting at `v_i`,
/// never exceeding `v_max` and ending at a speed of at most `v_f`.
pub fn trapezoid(d: f64, v_i: f64, v_max: f64, v_f: f64, acc: f64, dec: f64) -> Result<MotionProfile, KinematicsError> {
    check_inputs(d, v_i, v_max, v_f, acc, dec)?;
    let v_i = v_i.min(v_max);
    let v_f = v_f.min(v_max);
    if v_i > v_f {
        let needed = (v_i * v_i - v_f * v_f) / (2.0 * dec);
        if needed > d + 1e-12 {
            return Err(KinematicsError::InfeasibleDeceleration { from: v_i, to: v_f, distance: d, deficit: needed - d });
        }
    }
    if d == 0.0 {
        return Ok(MotionProfile::empty(v_i));
    }

    let mut phases = Vec::with_capacity(3);
    let mut t = 0.0;
    let mut x = 0.0;
    let mut push = |duration: f64, speed: f64, accel: f64, phases: &mut Vec<Phase>| {
        if duration > 0.0 {
            let p = Phase { start_time: t, duration, start_position: x, start_speed: speed, accel };
            x = p.end_position();
            t += duration;
            phases.push(p);
        }
    };

    let free_run = (v_i * v_i + 2.0 * acc * d).sqrt();
    let final_speed;
    if free_run <= v_f {
        // Accelerating the whole way never exceeds the terminal cap.
        if free_run <= v_max {
            push((free_run - v_i) / acc, v_i, acc, &mut phases);
            final_speed = free_run;
        } else {
            let accel_dist = (v_max * v_max - v_i * v_i) / (2.0 * acc);
            push((v_max - v_i) / acc, v_i, acc, &mut phases);
            push((d - accel_dist) / v_max, v_max, 0.0, &mut phases);
            final_speed = v_max;
        }
    } else {
        let unconstrained = ((2.0 * acc * dec * d + dec * v_i * v_i + acc * v_f * v_f) / (acc + dec)).sqrt();
        let peak = unconstrained.min(v_max).max(v_i);
        let accel_dist = (peak * peak - v_i * v_i) / (2.0 * acc);
        let decel_dist = (peak * peak - v_f * v_f) / (2.0 * dec);
        let cruise = (d - accel_dist - decel_dist).max(0.0);
        push((peak - v_i) / acc, v_i, acc, &mut phases);
        if cruise > 0.0 {
            push(cruise / peak, peak, 0.0, &mut phases);
        }
        push((peak - v_f) / dec, peak, -dec, &mut phases);
        final_speed = v_f;
    }

    Ok(MotionProfile { distance: d, initial_speed: v_i, final_speed, phases, duration: t })
}

/// Shortest time to travel a straight segment of length `d` (meters).
///
/// `v_max` is the segment speed limit (capped by the robot's top speed) and
/// `v_f` the largest admissible speed at the end of the segment.
pub fn segment_time(
    d: f64,
    v_i: f64,
    v_max: f64,
    v_f: f64,
    limits: &KinematicLimits,
    loaded: bool,
) -> Result<MotionProfile, KinematicsError> {
    let a = limits.accel(loaded);
    let cap = v_max.min(limits.v_max);
    trapezoid(d, v_i, cap, v_f.min(cap), a.acc, a.dec)
}

/// Shortest time to rotate in place by `d_theta` radians, from and to rest.
pub fn turn_time(d_theta: f64, limits: &KinematicLimits, loaded: bool) -> Result<MotionProfile, KinematicsError> {
    let a = limits.accel(loaded);
    trapezoid(d_theta, 0.0, limits.v_theta_max, 0.0, a.theta_acc, a.theta_dec)
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn limits() -> KinematicLimits {
        KinematicLimits::default()
    }

    #[test]
    fn oracle_reproduces_reference_values() {
        // Sanity check the Euler oracle itself before trusting it below.
        assert!((euler::travel_time(1.0, 0.0, 0.2, 0.0, 0.5, 0.5) - 5.4).abs() < 0.01);
        assert!((euler::travel_time(1.0, 0.0, 0.2, 0.0, 0.25, 0.25) - 5.8).abs() < 0.01);
    }

    #[test]
    fn zero_distance_takes_no_time() {
        let p = segment_time(0.0, 0.0, 0.2, 0.0, &limits(), false).unwrap();
        assert_eq!(p.duration, 0.0);
        assert_eq!(turn_time(0.0, &limits(), true).unwrap().duration, 0.0);
    }

    #[test]
    fn one_meter_segments() {
        let empty = segment_time(1.0, 0.0, 0.2, 0.0, &limits(), false).unwrap();
        assert!((empty.duration - 5.4).abs() < 1e-9, "{}", empty.duration);
        assert_eq!(empty.phases.len(), 3);
        let loaded = segment_time(1.0, 0.0, 0.2, 0.0, &limits(), true).unwrap();
        assert!((loaded.duration - 5.8).abs() < 1e-9, "{}", loaded.duration);
    }

    #[test]
    fn short_segment_is_triangular() {
        let p = segment_time(0.04, 0.0, 0.2, 0.0, &limits(), false).unwrap();
        assert_eq!(p.phases.len(), 2);
        let oracle = euler::travel_time(0.04, 0.0, 0.2, 0.0, 0.5, 0.5);
        assert!((p.duration - 0.5657).abs() < 1e-3);
        assert!((p.duration - oracle).abs() < 0.01);
        assert!(p.peak_speed() < 0.2);
    }

    #[test]
    fn turns() {
        let quarter = turn_time(std::f64::consts::FRAC_PI_2, &limits(), false).unwrap();
        let oracle = euler::travel_time(std::f64::consts::FRAC_PI_2, 0.0, 0.2, 0.0, 0.5, 0.5);
        assert!((quarter.duration - 8.254).abs() < 1e-3, "{}", quarter.duration);
        assert!((quarter.duration - oracle).abs() < 0.01);
        let half_loaded = turn_time(std::f64::consts::PI, &limits(), true).unwrap();
        let oracle = euler::travel_time(std::f64::consts::PI, 0.0, 0.2, 0.0, 0.25, 0.25);
        assert!((half_loaded.duration - oracle).abs() < 0.01);
    }

    #[test]
    fn infeasible_braking_names_deficit() {
        let err = segment_time(0.01, 0.2, 0.2, 0.0, &limits(), false).unwrap_err();
        match err {
            KinematicsError::InfeasibleDeceleration { deficit, .. } => {
                assert!((deficit - (0.04 - 0.01)).abs() < 1e-9)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(segment_time(-1.0, 0.0, 0.2, 0.0, &limits(), false).is_err());
        assert!(segment_time(1.0, 0.3, 0.2, 0.0, &limits(), false).is_err());
        assert!(turn_time(f64::NAN, &limits(), false).is_err());
    }

    #[test]
    fn state_at_endpoints_and_cruise() {
        let p = segment_time(1.0, 0.0, 0.2, 0.0, &limits(), false).unwrap();
        assert_eq!(p.state_at(0.0).unwrap(), (0.0, 0.0));
        let (x, v) = p.state_at(p.duration).unwrap();
        assert_eq!(x, 1.0);
        assert_eq!(v, 0.0);
        // Mid-cruise: 0.04 m of ramp, then 0.2 m/s.
        let (x, v) = p.state_at(2.4).unwrap();
        assert!((x - (0.04 + 0.2 * 2.0)).abs() < 1e-3);
        assert!((v - 0.2).abs() < 1e-12);
        assert!(p.state_at(p.duration + 0.1).is_err());
    }

    #[test]
    fn nonzero_entry_and_exit_speeds() {
        let p = segment_time(2.0, 0.1, 0.2, 0.05, &limits(), false).unwrap();
        let oracle = euler::travel_time(2.0, 0.1, 0.2, 0.05, 0.5, 0.5);
        assert!((p.duration - oracle).abs() < 0.01, "{} vs {}", p.duration, oracle);
        assert!((p.final_speed - 0.05).abs() < 1e-12);
        // Terminal cap above reachable speed: accelerate throughout.
        let p = segment_time(0.01, 0.0, 0.2, 0.2, &limits(), false).unwrap();
        assert_eq!(p.phases.len(), 1);
        assert!(p.final_speed < 0.2);
    }

    #[test]
    fn constant_speed_profiles() {
        let p = MotionProfile::constant_speed(1.0, 0.2).unwrap();
        assert!((p.duration - 5.0).abs() < 1e-12);
        assert!((p.sample(2.5).0 - 0.5).abs() < 1e-12);
        let p = MotionProfile::fixed_duration(3.0, 2.0).unwrap();
        assert!((p.sample(1.0).0 - 1.5).abs() < 1e-12);
        let p = MotionProfile::fixed_duration(0.0, 2.0).unwrap();
        assert_eq!(p.duration, 2.0);
    }

    proptest! {
        #[test]
        fn closed_form_matches_euler(d in 0.0f64..6.0, v_max in 0.05f64..1.0, acc in 0.1f64..1.0, dec in 0.1f64..1.0) {
            let p = trapezoid(d, 0.0, v_max, 0.0, acc, dec).unwrap();
            let oracle = euler::travel_time(d, 0.0, v_max, 0.0, acc, dec);
            prop_assert!((p.duration - oracle).abs() <= 0.01, "closed {} euler {}", p.duration, oracle);
            let (x, v) = p.state_at(p.duration).unwrap();
            prop_assert_eq!(x, d);
            prop_assert!(v.abs() < 1e-9);
        }

        #[test]
        fn monotone_in_parameters(d in 0.0f64..5.0, extra in 0.0f64..2.0, v in 0.05f64..1.0, dv in 0.0f64..0.5, a in 0.1f64..1.0, da in 0.0f64..0.5) {
            let base = trapezoid(d, 0.0, v, 0.0, a, a).unwrap().duration;
            prop_assert!(trapezoid(d + extra, 0.0, v, 0.0, a, a).unwrap().duration >= base - 1e-12);
            prop_assert!(trapezoid(d, 0.0, v + dv, 0.0, a, a).unwrap().duration <= base + 1e-12);
            prop_assert!(trapezoid(d, 0.0, v, 0.0, a + da, a + da).unwrap().duration <= base + 1e-12);
            prop_assert!(base >= d / v - 1e-12);
        }

        #[test]
        fn distance_is_monotone_and_speed_bounded(d in 0.01f64..5.0, frac in 0.0f64..1.0) {
            let p = segment_time(d, 0.0, 0.2, 0.0, &KinematicLimits::default(), true).unwrap();
            let t = frac * p.duration;
            let (x1, v1) = p.state_at(t).unwrap();
            let (x2, _) = p.state_at((t + 0.01).min(p.duration)).unwrap();
            prop_assert!(x2 >= x1 - 1e-12);
            prop_assert!(v1 <= 0.2 + 1e-12 && v1 >= 0.0);
        }
    }
}
