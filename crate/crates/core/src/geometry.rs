//! Coverage trapezoid of a single elevated LiDAR.
//!
//! A unit at roadway position `x` and height `z` tilts down so its lowest beam
//! meets the near road edge. The scan projects onto the road plane as a
//! trapezoid with near base `l_near`, far base `l_far` and depth `l_width`.
//! Overlap accounting only uses the inscribed rectangle `l_near x l_width`,
//! whose along-road extent is `[x - l_near, x + l_near]` clipped to the road.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Technical specification shared by every unit. Angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarSpec {
    /// Horizontal field of view.
    pub theta: f64,
    /// Vertical field of view.
    pub phi: f64,
    /// Scan rate in Hz.
    pub scan_rate: f64,
    /// Height of the detection zone in meters.
    pub detection_height: f64,
    /// Power drawn by the communication equipment, W.
    pub comm_power: f64,
    /// Laser scan power, W.
    pub scan_power: f64,
    /// Upload rate in bytes per second.
    pub upload_rate: f64,
    /// Octree recursion depth.
    pub octree_depth: u32,
}

impl LidarSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        };
        check(
            self.theta > 0.0 && self.theta < std::f64::consts::PI,
            "horizontal field of view must lie in (0, 180) degrees",
        )?;
        check(
            self.phi > 0.0 && self.phi < FRAC_PI_2,
            "vertical field of view must lie in (0, 90) degrees",
        )?;
        check(self.scan_rate > 0.0, "scan rate must be positive")?;
        check(self.detection_height > 0.0, "detection height must be positive")?;
        check(self.comm_power >= 0.0, "communication power must be non-negative")?;
        check(self.scan_power >= 0.0, "scan power must be non-negative")?;
        check(self.upload_rate > 0.0, "upload rate must be positive")?;
        check(self.octree_depth >= 2, "octree depth must be at least 2")?;
        Ok(())
    }
}

/// Straight roadway segment split into relevance sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGeometry {
    pub length: f64,
    /// Lateral distance from the mounting line to the near road edge.
    pub y_min: f64,
    /// Lateral distance from the mounting line to the far road edge.
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// Ascending sector end positions; the last equals `length`.
    pub sector_ends: Vec<f64>,
    /// Relevance score of each sector, in `[0, 1]`.
    pub sector_scores: Vec<f64>,
}

impl RoadGeometry {
    pub fn width(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Start of sector `a` (zero-based); the first sector starts at the origin.
    pub fn sector_start(&self, a: usize) -> f64 {
        if a == 0 {
            0.0
        } else {
            self.sector_ends[a - 1]
        }
    }

    /// Road with a single sector of the given relevance.
    pub fn uniform(length: f64, y_min: f64, y_max: f64, z_min: f64, z_max: f64, score: f64) -> Self {
        RoadGeometry {
            length,
            y_min,
            y_max,
            z_min,
            z_max,
            sector_ends: vec![length],
            sector_scores: vec![score],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.length > 0.0 && self.length.is_finite()) {
            return fail(format!("road length must be positive, got {}", self.length));
        }
        if !(self.y_min > 0.0 && self.y_min < self.y_max) {
            return fail(format!(
                "lateral bounds must satisfy 0 < y_min < y_max, got y_min={} y_max={}",
                self.y_min, self.y_max
            ));
        }
        if !(self.z_min > 0.0 && self.z_min <= self.z_max) {
            return fail(format!(
                "height bounds must satisfy 0 < z_min <= z_max, got z_min={} z_max={}",
                self.z_min, self.z_max
            ));
        }
        if self.sector_ends.is_empty() {
            return fail("at least one relevance sector is required".into());
        }
        if self.sector_ends.len() != self.sector_scores.len() {
            return fail(format!(
                "sector ends ({}) and sector scores ({}) differ in length",
                self.sector_ends.len(),
                self.sector_scores.len()
            ));
        }
        if self.sector_ends[0] <= 0.0 || self.sector_ends.windows(2).any(|w| w[0] >= w[1]) {
            return fail("sector ends must be strictly ascending and positive".into());
        }
        let last = *self.sector_ends.last().unwrap();
        if last != self.length {
            return fail(format!(
                "last sector end {last} must equal the road length {}",
                self.length
            ));
        }
        if let Some(s) = self.sector_scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return fail(format!("sector score {s} outside [0, 1]"));
        }
        Ok(())
    }
}

/// Decision variables of one candidate unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub x: f64,
    pub z: f64,
    pub placed: bool,
}

impl Placement {
    pub fn new(x: f64, z: f64, placed: bool) -> Self {
        Placement { x, z, placed }
    }

    pub fn check_bounds(&self, index: usize, road: &RoadGeometry) -> Result<()> {
        let err = |reason: String| Err(Error::Placement { index, reason });
        if !(0.0..=road.length).contains(&self.x) {
            return err(format!("x = {} outside [0, {}]", self.x, road.length));
        }
        if !(road.z_min..=road.z_max).contains(&self.z) {
            return err(format!(
                "z = {} outside [{}, {}]",
                self.z, road.z_min, road.z_max
            ));
        }
        Ok(())
    }
}

/// Sign used in the coverage depth formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthRule {
    /// `z * (tan(omega + phi) + tan(omega))`.
    #[default]
    AsWritten,
    /// `z * (tan(omega + phi) - tan(omega))`: depth measured from the near
    /// road edge, where the lowest beam lands.
    NearEdge,
}

impl WidthRule {
    pub fn depth(self, z: f64, omega: f64, phi: f64) -> f64 {
        match self {
            WidthRule::AsWritten => z * ((omega + phi).tan() + omega.tan()),
            WidthRule::NearEdge => z * ((omega + phi).tan() - omega.tan()),
        }
    }
}

/// Derived geometry of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageFootprint {
    pub omega: f64,
    pub l_near: f64,
    pub l_far: f64,
    pub l_width: f64,
    pub a_total: f64,
    pub a_rect: f64,
    pub x_start: f64,
    pub x_end: f64,
}

impl CoverageFootprint {
    /// Depth of the inscribed rectangle that lies on the road.
    pub fn capped_width(&self, road: &RoadGeometry) -> f64 {
        self.l_width.min(road.width())
    }

    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.x_start <= lo && hi <= self.x_end
    }
}

/// Downward tilt that points the lowest beam at the near road edge.
pub fn orientation_angle(z: f64, y_min: f64) -> Result<f64> {
    if !(z > 0.0) || !(y_min > 0.0) {
        return Err(Error::Domain(format!(
            "orientation angle needs z > 0 and y_min > 0, got z={z} y_min={y_min}"
        )));
    }
    Ok((y_min / z).atan())
}

/// Footprint using the depth formula as written.
pub fn footprint(spec: &LidarSpec, road: &RoadGeometry, p: &Placement) -> Result<CoverageFootprint> {
    footprint_with(spec, road, p, WidthRule::AsWritten)
}

pub fn footprint_with(
    spec: &LidarSpec,
    road: &RoadGeometry,
    p: &Placement,
    rule: WidthRule,
) -> Result<CoverageFootprint> {
    let omega = orientation_angle(p.z, road.y_min)?;
    if omega + spec.phi >= FRAC_PI_2 {
        return Err(Error::InfeasibleGeometry {
            omega,
            phi: spec.phi,
        });
    }
    let sec = |a: f64| 1.0 / a.cos();
    let l_near = 2.0 * p.z * sec(omega) * (spec.theta / 2.0).tan();
    let l_far = l_near * sec(omega + spec.phi) / sec(omega);
    let l_width = rule.depth(p.z, omega, spec.phi);
    Ok(CoverageFootprint {
        omega,
        l_near,
        l_far,
        l_width,
        a_total: (l_near + l_far) * l_width / 2.0,
        a_rect: l_near * l_width,
        x_start: (p.x - l_near).max(0.0),
        x_end: (p.x + l_near).min(road.length),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn spec(theta_deg: f64, phi_deg: f64) -> LidarSpec {
        LidarSpec {
            theta: theta_deg.to_radians(),
            phi: phi_deg.to_radians(),
            scan_rate: 30.0,
            detection_height: 2.0,
            comm_power: 5.0,
            scan_power: 10.0,
            upload_rate: 1e9,
            octree_depth: 5,
        }
    }

    fn road(y_min: f64) -> RoadGeometry {
        RoadGeometry::uniform(1000.0, y_min, y_min + 15.0, 1e-3, 100.0, 1.0)
    }

    #[test]
    fn orientation_examples() {
        assert_relative_eq!(orientation_angle(15.0, 5.0).unwrap(), 0.321_750_554_396_642_2, epsilon = 1e-12);
        assert_relative_eq!(orientation_angle(7.0, 7.0).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(orientation_angle(40.0, 5.0).unwrap(), 0.124_354_994_546_761_44, epsilon = 1e-12);
    }

    #[test]
    fn orientation_rejects_non_positive() {
        assert!(matches!(orientation_angle(0.0, 5.0), Err(Error::Domain(_))));
        assert!(matches!(orientation_angle(10.0, -1.0), Err(Error::Domain(_))));
        assert!(orientation_angle(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn flat_scan_has_equal_bases() {
        // phi = 0 and omega -> 0: near and far bases coincide.
        let mut s = spec(90.0, 0.0);
        s.phi = 0.0;
        let fp = footprint(&s, &road(1e-12), &Placement::new(500.0, 10.0, true)).unwrap();
        assert_relative_eq!(fp.l_near, 20.0, epsilon = 1e-9);
        assert_relative_eq!(fp.l_far, 20.0, epsilon = 1e-9);
    }

    #[test]
    fn near_base_at_fifteen_meters() {
        let fp = footprint(&spec(120.0, 35.0), &road(5.0), &Placement::new(500.0, 15.0, true)).unwrap();
        assert_relative_eq!(fp.omega.to_degrees(), 18.434_948_822_922_01, epsilon = 1e-9);
        assert_relative_eq!(fp.l_near, 54.772_255_750_516_61, epsilon = 1e-9);
    }

    #[test]
    fn depth_with_level_tilt() {
        let s = spec(90.0, 45.0);
        let fp = footprint(&s, &road(1e-12), &Placement::new(500.0, 10.0, true)).unwrap();
        assert_relative_eq!(fp.l_width, 10.0, epsilon = 1e-9);
        assert_relative_eq!(WidthRule::NearEdge.depth(10.0, 0.0, s.phi), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn steep_tilt_is_infeasible() {
        // omega = 45 deg at z = y_min; phi = 50 deg pushes past the horizon.
        let err = footprint(&spec(120.0, 50.0), &road(5.0), &Placement::new(10.0, 5.0, true));
        assert!(matches!(err, Err(Error::InfeasibleGeometry { .. })));
    }

    #[test]
    fn clipping_at_road_ends() {
        let fp = footprint(&spec(120.0, 35.0), &road(5.0), &Placement::new(0.0, 15.0, true)).unwrap();
        assert_eq!(fp.x_start, 0.0);
        assert_relative_eq!(fp.x_end, fp.l_near);
        let fp = footprint(&spec(120.0, 35.0), &road(5.0), &Placement::new(1000.0, 15.0, true)).unwrap();
        assert_eq!(fp.x_end, 1000.0);
    }

    #[test]
    fn road_validation() {
        let mut r = road(5.0);
        assert!(r.validate().is_ok());
        r.sector_ends = vec![400.0, 900.0];
        r.sector_scores = vec![1.0, 0.5];
        assert!(r.validate().is_err(), "last sector must end at the road length");
        r.sector_ends = vec![400.0, 1000.0];
        r.sector_scores = vec![1.0];
        assert!(r.validate().is_err(), "length mismatch");
        r.sector_scores = vec![1.0, 1.2];
        assert!(r.validate().is_err(), "score above one");
        r.sector_ends = vec![1000.0, 400.0];
        r.sector_scores = vec![1.0, 0.5];
        assert!(r.validate().is_err(), "descending ends");
    }

    proptest! {
        #[test]
        fn far_base_never_shorter(z in 1.0..80.0f64, y_min in 0.5..30.0f64, phi_deg in 1.0..40.0f64, theta_deg in 10.0..170.0f64) {
            let s = spec(theta_deg, phi_deg);
            let r = RoadGeometry::uniform(1000.0, y_min, y_min + 10.0, 0.1, 100.0, 1.0);
            if let Ok(fp) = footprint(&s, &r, &Placement::new(500.0, z, true)) {
                prop_assert!(fp.l_far >= fp.l_near);
                prop_assert!(fp.l_near > 0.0);
                prop_assert!(fp.a_rect <= fp.a_total);
                prop_assert!(fp.omega >= 0.0 && fp.omega + s.phi < FRAC_PI_2);
                let ratio = (fp.omega.cos()) / (fp.omega + s.phi).cos();
                prop_assert!((fp.l_far / fp.l_near - ratio).abs() <= 1e-12 * ratio);
            }
        }

        #[test]
        fn scale_covariance(z in 5.0..40.0f64, y_min in 1.0..20.0f64, c in 0.2..5.0f64) {
            let s = spec(120.0, 35.0);
            let base = RoadGeometry::uniform(1e6, y_min, y_min + 10.0, 0.1, 1e4, 1.0);
            let scaled = RoadGeometry::uniform(1e6, c * y_min, c * y_min + 10.0, 0.1, 1e4, 1.0);
            let a = footprint(&s, &base, &Placement::new(5e5, z, true));
            prop_assume!(a.is_ok());
            let a = a.unwrap();
            let b = footprint(&s, &scaled, &Placement::new(5e5, c * z, true)).unwrap();
            let rel = |u: f64, v: f64| ((u - v) / v).abs();
            prop_assert!(rel(b.l_near, c * a.l_near) < 1e-9);
            prop_assert!(rel(b.l_far, c * a.l_far) < 1e-9);
            prop_assert!(rel(b.l_width, c * a.l_width) < 1e-9);
            prop_assert!(rel(b.a_total, c * c * a.a_total) < 1e-9);
            prop_assert!(rel(b.a_rect, c * c * a.a_rect) < 1e-9);
        }

        #[test]
        fn extent_at_most_twice_near_base(x in 0.0..1000.0f64, z in 15.0..50.0f64) {
            let fp = footprint(&spec(120.0, 35.0), &road(5.0), &Placement::new(x, z, true)).unwrap();
            let span = fp.x_end - fp.x_start;
            prop_assert!(0.0 <= fp.x_start && fp.x_start <= fp.x_end && fp.x_end <= 1000.0);
            prop_assert!(span <= 2.0 * fp.l_near + 1e-9);
            let unclipped = x - fp.l_near >= 0.0 && x + fp.l_near <= 1000.0;
            if unclipped {
                prop_assert!((span - 2.0 * fp.l_near).abs() < 1e-9);
            } else {
                prop_assert!(span < 2.0 * fp.l_near);
            }
        }

        #[test]
        fn orientation_monotone(z in 0.5..100.0f64, dz in 0.01..10.0f64, y in 0.5..50.0f64, dy in 0.01..10.0f64) {
            let base = orientation_angle(z, y).unwrap();
            prop_assert!(orientation_angle(z + dz, y).unwrap() < base);
            prop_assert!(orientation_angle(z, y + dy).unwrap() > base);
        }
    }
}
