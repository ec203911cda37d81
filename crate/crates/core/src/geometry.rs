//! Closed curves on the Bloch sphere and their signed solid angle.
//!
//! Orientation: a loop has positive solid angle when the region it encloses
//! lies to its left as seen from outside the sphere, so an eastward equator
//! encloses `+2π`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{add3, angle3, cross3, dot3, norm3, normalize3, scale3, sub3};

/// Endpoint separation (Bloch distance) below which a path counts as cyclic.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Maximum geodesic spacing after refinement.
pub const MAX_SPACING: f64 = 0.1;
/// Apex-to-vertex distance that triggers re-seeding of the fan apex.
const APEX_CLEARANCE: f64 = 1e-3;

/// Ordered unit vectors sampled along a state's Bloch trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPath {
    points: Vec<[f64; 3]>,
    closed: bool,
    /// Endpoint separation that was bridged when closing the path.
    closure_defect: f64,
}

impl BlochPath {
    /// An open path; points are normalized.
    pub fn new(points: Vec<[f64; 3]>) -> Self {
        let points = points.into_iter().map(|p| normalize3(p).unwrap_or(p)).collect();
        BlochPath { points, closed: false, closure_defect: 0.0 }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn closure_defect(&self) -> f64 {
        self.closure_defect
    }

    /// Endpoint separation in Bloch (chordal) distance.
    pub fn endpoint_gap(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => norm3(sub3(*a, *b)),
            _ => 0.0,
        }
    }

    /// Closes a cyclic path. Fails if the endpoints are further apart than
    /// `tolerance`; otherwise the gap is bridged by a geodesic and reported.
    pub fn close(mut self, tolerance: f64) -> Result<Self> {
        if self.points.is_empty() {
            return Err(Error::ShortPath(1));
        }
        let gap = self.endpoint_gap();
        if !(gap <= tolerance) {
            return Err(Error::OpenPath { defect: gap, tolerance });
        }
        self.closed = true;
        self.closure_defect = gap;
        Ok(self)
    }

    /// Closes the path with a geodesic regardless of the endpoint gap.
    pub fn close_geodesically(mut self) -> Self {
        self.closure_defect = self.endpoint_gap();
        self.closed = true;
        self
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.points.reverse();
        out
    }

    /// Inserts great-circle points so that consecutive points (including the
    /// closing edge of a closed path) are at most `max_spacing` apart.
    pub fn refined(&self, max_spacing: f64) -> Self {
        let mut out = Vec::with_capacity(self.points.len());
        let n = self.points.len();
        let edges = if self.closed { n } else { n.saturating_sub(1) };
        for i in 0..n {
            out.push(self.points[i]);
            if i < edges {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                if i + 1 == n && a == b {
                    continue;
                }
                let theta = angle3(a, b);
                if theta > max_spacing {
                    let pieces = (theta / max_spacing).ceil() as usize;
                    for k in 1..pieces {
                        out.push(slerp(a, b, theta, k as f64 / pieces as f64));
                    }
                }
            }
        }
        BlochPath { points: out, closed: self.closed, closure_defect: self.closure_defect }
    }
}

fn slerp(a: [f64; 3], b: [f64; 3], theta: f64, f: f64) -> [f64; 3] {
    let s = theta.sin();
    if s < 1e-12 {
        return normalize3(add3(scale3(a, 1.0 - f), scale3(b, f))).unwrap_or(a);
    }
    let wa = ((1.0 - f) * theta).sin() / s;
    let wb = (f * theta).sin() / s;
    normalize3(add3(scale3(a, wa), scale3(b, wb))).unwrap_or(a)
}

/// Signed solid angle with its 4π branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolidAngle {
    /// Principal value in (−2π, 2π].
    pub principal: f64,
    /// `full = principal + 4π·branch`.
    pub branch: i32,
    /// Geodesic gap bridged to close the path.
    pub closure_defect: f64,
}

impl SolidAngle {
    pub fn full(&self) -> f64 {
        self.principal + 2.0 * TAU * self.branch as f64
    }
}

/// Principal value of a solid angle in (−2π, 2π].
pub fn wrap_solid_angle(x: f64) -> f64 {
    let mut r = x.rem_euclid(2.0 * TAU);
    if r > TAU {
        r -= 2.0 * TAU;
    }
    r
}

/// Signed solid angle of `(a, b, c)` (Van Oosterom–Strackee).
pub fn triangle_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let num = dot3(a, cross3(b, c));
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

/// Signed solid angle enclosed by a closed path, as a fan of spherical
/// triangles from the path's normalized centroid.
pub fn solid_angle(path: &BlochPath) -> Result<SolidAngle> {
    if !path.is_closed() {
        return Err(Error::OpenPath { defect: path.endpoint_gap(), tolerance: CLOSURE_TOL });
    }
    if path.points().is_empty() {
        return Err(Error::ShortPath(1));
    }
    let refined = path.refined(MAX_SPACING);
    let pts = refined.points();
    let n = pts.len();
    let apex = fan_apex(pts);

    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        total += triangle_solid_angle(apex, a, b);
    }
    let principal = wrap_solid_angle(total);
    let branch = ((total - principal) / (2.0 * TAU)).round() as i32;
    Ok(SolidAngle { principal, branch, closure_defect: path.closure_defect() })
}

fn fan_apex(pts: &[[f64; 3]]) -> [f64; 3] {
    let n = pts.len();
    let sum = pts.iter().fold([0.0; 3], |acc, p| add3(acc, *p));
    let area = (0..n).fold([0.0; 3], |acc, i| add3(acc, cross3(pts[i], pts[(i + 1) % n])));
    let mut candidates = Vec::with_capacity(9);
    if norm3(sum) > 1e-9 * n as f64 {
        candidates.extend(normalize3(sum));
    }
    if let Some(v) = normalize3(area) {
        candidates.push(v);
        candidates.push(scale3(v, -1.0));
    }
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut e = [0.0; 3];
            e[axis] = sign;
            candidates.push(e);
        }
    }
    let clearance = |c: [f64; 3]| (0..n).map(|i| point_arc_distance(c, pts[i], pts[(i + 1) % n])).fold(f64::INFINITY, f64::min);
    let mut best = (candidates[0], clearance(candidates[0]));
    for c in candidates {
        let d = clearance(c);
        if d >= APEX_CLEARANCE {
            return c;
        }
        if d > best.1 {
            best = (c, d);
        }
    }
    best.0
}

/// Geodesic distance from `p` to the minor arc `a → b`.
pub fn point_arc_distance(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let end = angle3(p, a).min(angle3(p, b));
    let Some(n) = normalize3(cross3(a, b)) else {
        return end;
    };
    let q = sub3(p, scale3(n, dot3(p, n)));
    if norm3(q) < 1e-15 {
        return end;
    }
    if dot3(cross3(a, q), n) >= 0.0 && dot3(cross3(q, b), n) >= 0.0 {
        dot3(p, n).clamp(-1.0, 1.0).asin().abs()
    } else {
        end
    }
}

/// Directed Hausdorff distance: the largest distance from a point of `a` to
/// the polyline `b` (geodesic edges).
pub fn directed_hausdorff(a: &BlochPath, b: &BlochPath) -> f64 {
    let bp = b.points();
    a.points()
        .iter()
        .map(|p| {
            if bp.len() == 1 {
                return angle3(*p, bp[0]);
            }
            bp.windows(2).map(|w| point_arc_distance(*p, w[0], w[1])).fold(PI, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two paths as point sets on the sphere.
pub fn hausdorff_distance(a: &BlochPath, b: &BlochPath) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meridian(azimuth: f64, from_north: bool, n: usize) -> Vec<[f64; 3]> {
        (0..=n)
            .map(|k| {
                let mut theta = PI * k as f64 / n as f64;
                if !from_north {
                    theta = PI - theta;
                }
                [theta.sin() * azimuth.cos(), theta.sin() * azimuth.sin(), theta.cos()]
            })
            .collect()
    }

    fn lune(phi: f64) -> BlochPath {
        let mut pts = meridian(0.0, true, 40);
        let back = meridian(phi, false, 40);
        pts.extend_from_slice(&back[1..]);
        BlochPath::new(pts).close(CLOSURE_TOL).unwrap()
    }

    #[test]
    fn equator_is_hemisphere() {
        let pts: Vec<_> = (0..=64)
            .map(|k| {
                let a = TAU * k as f64 / 64.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let path = BlochPath::new(pts).close(CLOSURE_TOL).unwrap();
        let w = solid_angle(&path).unwrap();
        assert!((w.principal - TAU).abs() < 1e-12, "{w:?}");
        let r = solid_angle(&path.reversed()).unwrap();
        assert!((wrap_solid_angle(r.principal + TAU)).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn point_loop_is_zero() {
        let path = BlochPath::new(vec![[0.3, 0.4, 0.5]; 5]).close(CLOSURE_TOL).unwrap();
        assert_eq!(solid_angle(&path).unwrap().principal, 0.0);
    }

    #[test]
    fn lune_area_by_orientation() {
        let phi = PI / 3.0;
        let w = solid_angle(&lune(phi)).unwrap();
        assert!((w.principal - 2.0 * phi).abs() < 1e-12, "{w:?}");
        let r = solid_angle(&lune(phi).reversed()).unwrap();
        assert!((r.principal + 2.0 * phi).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn spherical_cap() {
        let theta: f64 = 0.7;
        let pts: Vec<_> = (0..=2000)
            .map(|k| {
                let a = TAU * k as f64 / 2000.0;
                [theta.sin() * a.cos(), theta.sin() * a.sin(), theta.cos()]
            })
            .collect();
        let w = solid_angle(&BlochPath::new(pts).close(CLOSURE_TOL).unwrap()).unwrap();
        let exact = TAU * (1.0 - theta.cos());
        assert!((w.principal - exact).abs() < 1e-5, "{} vs {}", w.principal, exact);
    }

    #[test]
    fn open_path_rejected() {
        let path = BlochPath::new(vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        assert!(matches!(solid_angle(&path), Err(Error::OpenPath { .. })));
        assert!(matches!(path.close(CLOSURE_TOL), Err(Error::OpenPath { .. })));
    }

    #[test]
    fn near_closed_path_reports_defect() {
        let mut pts = meridian(0.0, true, 20);
        pts.extend_from_slice(&meridian(1.0, false, 20)[1..]);
        let last = pts.last_mut().unwrap();
        last[0] += 5e-7;
        let path = BlochPath::new(pts).close(CLOSURE_TOL).unwrap();
        assert!(path.closure_defect() > 0.0);
        let w = solid_angle(&path).unwrap();
        assert!((w.principal - 2.0).abs() < 1e-5);
        assert_eq!(w.closure_defect, path.closure_defect());
    }

    #[test]
    fn full_value_recovers_branch() {
        let w = SolidAngle { principal: -1.0, branch: 1, closure_defect: 0.0 };
        assert!((w.full() - (4.0 * PI - 1.0)).abs() < 1e-15);
        assert_eq!(wrap_solid_angle(2.0 * TAU), 0.0);
        assert_eq!(wrap_solid_angle(-TAU), TAU);
    }

    #[test]
    fn refinement_bounds_spacing() {
        let path = lune(1.0).refined(MAX_SPACING);
        let pts = path.points();
        for w in pts.windows(2) {
            assert!(angle3(w[0], w[1]) <= MAX_SPACING + 1e-12);
        }
    }

    #[test]
    fn hausdorff_of_resampled_arc_is_zero() {
        let a = BlochPath::new(meridian(0.3, true, 10));
        let b = BlochPath::new(meridian(0.3, true, 37));
        assert!(hausdorff_distance(&a, &b) < 1e-12);
        let c = BlochPath::new(meridian(0.35, true, 10));
        let d = hausdorff_distance(&a, &c);
        assert!((d - 0.05).abs() < 1e-9, "{d}");
    }
}
