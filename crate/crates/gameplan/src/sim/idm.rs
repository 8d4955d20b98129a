//! Car-following acceleration law with a discrete action set.

/// The discrete acceleration choices available to an agent, m/s^2.
pub const ACCEL_CHOICES: [f64; 5] = [-3.0, -1.5, 0.0, 1.0, 2.0];

/// Parameters of the intelligent-driver car-following law.
#[derive(Debug, Clone, Copy)]
pub struct IdmParams {
    /// Free-road target speed, m/s.
    pub desired_speed: f64,
    /// Time headway, seconds.
    pub headway: f64,
    /// Maximum acceleration, m/s^2.
    pub max_accel: f64,
    /// Comfortable deceleration, m/s^2.
    pub comfort_decel: f64,
    /// Jam (standstill) gap, meters.
    pub jam_distance: f64,
}

impl IdmParams {
    pub fn conservative(desired_speed: f64) -> Self {
        IdmParams {
            desired_speed,
            headway: 1.5,
            max_accel: 2.0,
            comfort_decel: 3.0,
            jam_distance: 2.0,
        }
    }

    pub fn aggressive(desired_speed: f64) -> Self {
        IdmParams {
            desired_speed,
            headway: 0.8,
            max_accel: 2.0,
            comfort_decel: 3.0,
            jam_distance: 2.0,
        }
    }

    /// Raw acceleration for the current speed and, optionally, a leading
    /// obstacle at `gap` meters moving at `leader_speed`.
    pub fn accel(&self, speed: f64, leader: Option<(f64, f64)>) -> f64 {
        let free = self.max_accel * (1.0 - (speed / self.desired_speed).powi(4));
        match leader {
            None => free,
            Some((gap, leader_speed)) => {
                let gap = gap.max(0.1);
                let closing = speed - leader_speed;
                let desired_gap = self.jam_distance
                    + speed * self.headway
                    + speed * closing / (2.0 * (self.max_accel * self.comfort_decel).sqrt());
                free - self.max_accel * (desired_gap.max(0.0) / gap).powi(2)
            }
        }
    }
}

/// Snaps a raw acceleration onto the nearest element of the discrete
/// action set; exact midpoints resolve toward the safer (lower) choice.
pub fn snap_accel(a: f64) -> f64 {
    let mut best = ACCEL_CHOICES[0];
    let mut best_err = (a - best).abs();
    for &choice in &ACCEL_CHOICES[1..] {
        let err = (a - choice).abs();
        if err < best_err {
            best = choice;
            best_err = err;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_road_accelerates_to_desired_speed() {
        let p = IdmParams::conservative(15.0);
        assert!(p.accel(0.0, None) > 1.9);
        assert!(p.accel(14.9, None) < 0.2);
        assert!(p.accel(16.0, None) < 0.0);
    }

    #[test]
    fn close_gap_brakes() {
        let p = IdmParams::conservative(15.0);
        let a = p.accel(12.0, Some((6.0, 0.0)));
        assert!(a < -3.0, "expected hard braking, got {a}");
    }

    #[test]
    fn snap_picks_nearest_choice() {
        assert_eq!(snap_accel(2.7), 2.0);
        assert_eq!(snap_accel(1.3), 1.0);
        assert_eq!(snap_accel(1.6), 2.0);
        assert_eq!(snap_accel(0.4), 0.0);
        assert_eq!(snap_accel(-0.2), 0.0);
        assert_eq!(snap_accel(-1.0), -1.5);
        assert_eq!(snap_accel(-2.4), -3.0);
        assert_eq!(snap_accel(-9.0), -3.0);
        // cruising at the desired speed must not trigger phantom braking
        assert_eq!(snap_accel(-0.04), 0.0);
    }
}
