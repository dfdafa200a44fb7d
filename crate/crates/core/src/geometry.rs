//! Pass geometry for a single satellite crossing a small coverage region.
//!
//! The ground track is a straight line in latitude/longitude through the
//! region center: latitude advances at `ω·cos(i)` and longitude at `ω·sin(i)`
//! degrees per second, so the nadir enters at the south-west corner at
//! `t = 0`, crosses the center at `t_mid` and leaves at the north-east corner
//! at `passage_duration`. Earth is a sphere of radius [`EARTH_RADIUS_KM`].
//!
//! Angles are degrees at the API boundary unless a function says otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{deg_to_rad, rad_to_deg};

/// Mean Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A point on the Earth surface, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    /// Builds a point, wrapping longitude into `(-180, 180]`.
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || lat.abs() > 90.0 {
            return Err(Error::Domain(format!("latitude {lat} outside [-90, 90]")));
        }
        if !lon.is_finite() {
            return Err(Error::Domain(format!("longitude {lon} is not finite")));
        }
        Ok(GeoPoint {
            lat,
            lon: wrap_lon(lon),
        })
    }
}

fn wrap_lon(lon: f64) -> f64 {
    let mut l = lon.rem_euclid(360.0);
    if l > 180.0 {
        l -= 360.0;
    }
    l
}

/// Latitude/longitude box centered on the track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRegion {
    pub center_lat: f64,
    pub center_lon: f64,
    pub delta_lat: f64,
    pub delta_lon: f64,
}

impl CoverageRegion {
    /// Region whose diagonal is the ground track: `δ_lon = δ_lat·tan(i)`.
    pub fn along_track(center: GeoPoint, delta_lat: f64, inclination_deg: f64) -> Result<Self> {
        if !(delta_lat > 0.0) {
            return Err(Error::config("track.delta_lat", "must be > 0"));
        }
        let delta_lon = delta_lat * deg_to_rad(inclination_deg).tan();
        if !(delta_lon > 0.0) {
            return Err(Error::config(
                "track.inclination",
                "must give a positive longitude half-width",
            ));
        }
        Ok(CoverageRegion {
            center_lat: center.lat,
            center_lon: center.lon,
            delta_lat,
            delta_lon,
        })
    }

    pub fn center(&self) -> GeoPoint {
        GeoPoint {
            lat: self.center_lat,
            lon: self.center_lon,
        }
    }

    /// Uniform `rows × cols` grid over `[λ0 ± δ_lat] × [φ0 ± δ_lon]`,
    /// endpoints included, row-major with latitude as the row axis.
    /// A single row or column sits on the center line.
    pub fn grid(&self, rows: usize, cols: usize) -> Vec<GeoPoint> {
        let axis = |k: usize, n: usize| -> f64 {
            if n <= 1 {
                0.0
            } else {
                -1.0 + 2.0 * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                out.push(GeoPoint {
                    lat: self.center_lat + axis(r, rows) * self.delta_lat,
                    lon: wrap_lon(self.center_lon + axis(c, cols) * self.delta_lon),
                });
            }
        }
        out
    }

    /// The nine probe locations `(λ0 + i·δ_lat, φ0 + j·δ_lon)`, `i, j ∈ {-1, 0, 1}`.
    pub fn probe_nine(&self) -> Vec<GeoPoint> {
        self.grid(3, 3)
    }
}

/// Linear ground track of one pass over the coverage region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTrack {
    pub center_lat: f64,
    pub center_lon: f64,
    pub inclination: f64,
    pub angular_speed: f64,
    pub altitude: f64,
    pub passage_duration: f64,
    pub earth_radius: f64,
}

impl GroundTrack {
    /// `lat_span` is the full latitude extent crossed by the pass (`2·δ_lat`).
    pub fn new(
        center: GeoPoint,
        inclination: f64,
        angular_speed: f64,
        altitude: f64,
        lat_span: f64,
    ) -> Result<Self> {
        if !(0.0..90.0).contains(&inclination) {
            return Err(Error::config("track.inclination", "must lie in [0, 90)"));
        }
        if !(angular_speed > 0.0) || !angular_speed.is_finite() {
            return Err(Error::config("track.angular_speed", "must be > 0"));
        }
        if !(altitude > 0.0) || !altitude.is_finite() {
            return Err(Error::config("track.altitude", "must be > 0"));
        }
        if !(lat_span > 0.0) {
            return Err(Error::config("track.delta_lat", "must be > 0"));
        }
        let passage_duration = passage_duration(lat_span, inclination, angular_speed);
        Ok(GroundTrack {
            center_lat: center.lat,
            center_lon: center.lon,
            inclination,
            angular_speed,
            altitude,
            passage_duration,
            earth_radius: EARTH_RADIUS_KM,
        })
    }

    pub fn t_mid(&self) -> f64 {
        0.5 * self.passage_duration
    }
}

/// Time for the nadir to cross `lat_span` degrees of latitude:
/// `lat_span / (cos(i)·ω)`.
pub fn passage_duration(lat_span: f64, inclination_deg: f64, angular_speed: f64) -> f64 {
    lat_span / (deg_to_rad(inclination_deg).cos() * angular_speed)
}

/// Sub-satellite point at time `t` seconds after region entry.
pub fn nadir_at(track: &GroundTrack, t: f64) -> Result<GeoPoint> {
    if !(0.0..=track.passage_duration).contains(&t) {
        return Err(Error::OutOfPass {
            t,
            duration: track.passage_duration,
        });
    }
    let dt = t - track.t_mid();
    let incl = deg_to_rad(track.inclination);
    Ok(GeoPoint {
        lat: track.center_lat + dt * track.angular_speed * incl.cos(),
        lon: wrap_lon(track.center_lon + dt * track.angular_speed * incl.sin()),
    })
}

/// Great-circle central angle between two points, radians (haversine form).
pub fn central_angle(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (deg_to_rad(a.lat), deg_to_rad(b.lat));
    let dlat = lat2 - lat1;
    let dlon = deg_to_rad(b.lon - a.lon);
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * h.sqrt().atan2((1.0 - h).max(0.0).sqrt())
}

/// Satellite-to-user distance for central angle `gamma` (radians), km.
pub fn slant_range(gamma: f64, altitude: f64, earth_radius: f64) -> f64 {
    // law of cosines rewritten with 1 - cos γ = 2 sin²(γ/2); exact at nadir
    let orbit = earth_radius + altitude;
    let half = (gamma / 2.0).sin();
    (altitude * altitude + 4.0 * earth_radius * orbit * half * half).sqrt()
}

/// Angle at the satellite between nadir boresight and the user, degrees.
pub fn off_axis_angle(gamma: f64, slant: f64, earth_radius: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    rad_to_deg((earth_radius * gamma.sin() / slant).clamp(-1.0, 1.0).asin())
}

/// Inverse of the off-axis mapping: the central angle (radians) seen at
/// off-axis angle `psi_deg` from altitude `altitude`.
pub fn central_angle_for_off_axis(psi_deg: f64, altitude: f64, earth_radius: f64) -> f64 {
    let psi = deg_to_rad(psi_deg);
    let s = ((earth_radius + altitude) / earth_radius * psi.sin()).clamp(-1.0, 1.0);
    s.asin() - psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const OMEGA: f64 = 360.0 / 5400.0;

    fn track() -> GroundTrack {
        GroundTrack::new(GeoPoint::new(0.0, 0.0).unwrap(), 53.0, OMEGA, 550.0, 0.2).unwrap()
    }

    #[test]
    fn passage_time_matches_scenario() {
        let t = track();
        assert!(
            (t.passage_duration - 4.98).abs() < 0.005,
            "{}",
            t.passage_duration
        );
        assert!((t.t_mid() - 2.49).abs() < 0.005);
        // rounded angular speed gives a slightly shorter pass
        let rounded = passage_duration(0.2, 53.0, 0.067);
        assert!((rounded - 4.960).abs() < 1e-3, "{rounded}");
    }

    #[test]
    fn nadir_center_and_corner() {
        let t = track();
        let mid = nadir_at(&t, t.t_mid()).unwrap();
        assert_relative_eq!(mid.lat, 0.0, epsilon = 1e-15);
        assert_relative_eq!(mid.lon, 0.0, epsilon = 1e-15);
        let start = nadir_at(&t, 0.0).unwrap();
        assert_relative_eq!(start.lat, -0.1, epsilon = 1e-12);
        assert_relative_eq!(start.lon, -0.1 * 53f64.to_radians().tan(), epsilon = 1e-12);
        assert!((start.lon + 0.133).abs() < 5e-4);
        let end = nadir_at(&t, t.passage_duration).unwrap();
        assert_relative_eq!(end.lat - start.lat, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn nadir_out_of_pass() {
        let t = track();
        assert!(matches!(nadir_at(&t, -1e-9), Err(Error::OutOfPass { .. })));
        assert!(matches!(
            nadir_at(&t, t.passage_duration + 1e-6),
            Err(Error::OutOfPass { .. })
        ));
    }

    #[test]
    fn nadir_is_affine() {
        let t = track();
        let d = t.passage_duration;
        for (t1, t2) in [(0.0, d), (0.3, 4.1), (1.0, 1.5), (2.2, 4.9)] {
            let a = nadir_at(&t, t1).unwrap();
            let b = nadir_at(&t, t2).unwrap();
            let m = nadir_at(&t, 0.5 * (t1 + t2)).unwrap();
            assert!((a.lat + b.lat - 2.0 * m.lat).abs() < 1e-12);
            assert!((a.lon + b.lon - 2.0 * m.lon).abs() < 1e-12);
        }
    }

    #[test]
    fn track_rejects_bad_parameters() {
        let c = GeoPoint::new(0.0, 0.0).unwrap();
        assert!(GroundTrack::new(c, 90.0, OMEGA, 550.0, 0.2).is_err());
        assert!(GroundTrack::new(c, 53.0, 0.0, 550.0, 0.2).is_err());
        assert!(GroundTrack::new(c, 53.0, OMEGA, -1.0, 0.2).is_err());
    }

    #[test]
    fn central_angle_examples() {
        let o = GeoPoint::new(0.0, 0.0).unwrap();
        assert_eq!(central_angle(o, o), 0.0);
        let p = GeoPoint::new(0.15, 0.0).unwrap();
        assert_relative_eq!(
            central_angle(o, p),
            0.15f64.to_radians(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            central_angle(p, o),
            central_angle(o, p),
            max_relative = 1e-15
        );
        let q = GeoPoint::new(0.1, 0.1).unwrap();
        // small-angle Pythagoras
        let g = central_angle(o, q).to_degrees();
        assert!((g - 0.1f64.hypot(0.1)).abs() < 1e-6, "{g}");
    }

    #[test]
    fn longitude_wraps() {
        let p = GeoPoint::new(10.0, 370.0).unwrap();
        assert_relative_eq!(p.lon, 10.0, epsilon = 1e-12);
        let q = GeoPoint::new(10.0, -190.0).unwrap();
        assert_relative_eq!(q.lon, 170.0, epsilon = 1e-12);
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        let a = GeoPoint::new(0.0, 179.95).unwrap();
        let b = GeoPoint::new(0.0, -179.95).unwrap();
        assert_relative_eq!(central_angle(a, b).to_degrees(), 0.1, max_relative = 1e-9);
    }

    #[test]
    fn slant_range_examples() {
        assert_eq!(slant_range(0.0, 550.0, EARTH_RADIUS_KM), 550.0);
        let d = slant_range(0.15f64.to_radians(), 550.0, EARTH_RADIUS_KM);
        assert!((d - 550.3).abs() < 0.05, "{d}");
        let mut prev = 550.0;
        for k in 1..200 {
            let d = slant_range((k as f64 * 0.005).to_radians(), 550.0, EARTH_RADIUS_KM);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn off_axis_examples() {
        let re = EARTH_RADIUS_KM;
        assert_eq!(off_axis_angle(0.0, 550.0, re), 0.0);
        let g = 0.15f64.to_radians();
        let psi = off_axis_angle(g, slant_range(g, 550.0, re), re);
        assert!((psi - 1.74).abs() < 0.01, "{psi}");
        let g = 0.075f64.to_radians();
        let psi = off_axis_angle(g, slant_range(g, 550.0, re), re);
        assert!((psi - 0.87).abs() < 0.01, "{psi}");
    }

    #[test]
    fn beam_edge_maps_to_three_tenths_degree() {
        let g = central_angle_for_off_axis(1.75, 550.0, EARTH_RADIUS_KM).to_degrees();
        assert!((0.149..=0.152).contains(&g), "{g}");
        // inverse really inverts
        let gr = g.to_radians();
        let psi = off_axis_angle(gr, slant_range(gr, 550.0, EARTH_RADIUS_KM), EARTH_RADIUS_KM);
        assert_relative_eq!(psi, 1.75, max_relative = 1e-10);
    }

    #[test]
    fn off_axis_is_monotone() {
        let re = EARTH_RADIUS_KM;
        let mut prev = -1.0;
        for k in 0..400 {
            let g = (k as f64 * 0.001).to_radians();
            let psi = off_axis_angle(g, slant_range(g, 550.0, re), re);
            assert!(psi > prev);
            prev = psi;
        }
    }

    #[test]
    fn grid_includes_endpoints() {
        let region =
            CoverageRegion::along_track(GeoPoint::new(0.0, 0.0).unwrap(), 0.1, 53.0).unwrap();
        let g = region.grid(16, 16);
        assert_eq!(g.len(), 256);
        assert_relative_eq!(g[0].lat, -0.1, epsilon = 1e-15);
        assert_relative_eq!(g[255].lon, region.delta_lon, epsilon = 1e-15);
        let nine = region.probe_nine();
        assert_eq!(nine[4], region.center());
    }
}
