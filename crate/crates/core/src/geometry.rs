//! Bounded regular domains (balls and axis-aligned boxes) and the geometric
//! queries the samplers are built on.
//!
//! Every public query validates that its arguments share the domain's
//! dimension. The `*_slice` variants skip that check and are used inside the
//! sampler hot loops, where the dimension is fixed once per path.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Point(vec![0.0; dim])
    }

    /// `t * e_1` in `R^dim`, the on-axis start points used throughout the tests.
    pub fn on_axis(dim: usize, t: f64) -> Self {
        let mut p = Self::origin(dim);
        p.0[0] = t;
        p
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|v| v.is_finite()));
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.0, &other.0)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Comma-separated coordinates without spaces, e.g. `0.5,0`.
impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid("point", format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Ball { center, radius })
    }

    /// The unit ball centred at the origin of `R^dim`.
    pub fn unit(dim: usize) -> Self {
        Ball {
            center: Point::origin(dim),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Point,
    upper: Point,
}

impl BoxDomain {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        upper.check_dim(lower.dim())?;
        for axis in 0..lower.dim() {
            if !(lower[axis] < upper[axis]) {
                return Err(Error::DegenerateBox {
                    axis,
                    lower: lower[axis],
                    upper: upper[axis],
                });
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }
}

/// An open, bounded, regular domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Ball(Ball),
    Box(BoxDomain),
}

impl From<Ball> for Domain {
    fn from(b: Ball) -> Self {
        Domain::Ball(b)
    }
}

impl From<BoxDomain> for Domain {
    fn from(b: BoxDomain) -> Self {
        Domain::Box(b)
    }
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball(b) => b.dim(),
            Domain::Box(b) => b.dim(),
        }
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match self {
            Domain::Ball(b) => Some(b),
            Domain::Box(_) => None,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball(b) => 2.0 * b.radius,
            Domain::Box(b) => distance(b.lower.coords(), b.upper.coords()),
        }
    }

    /// True iff `p` lies strictly inside the open domain.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(self.contains_slice(p.coords()))
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, p: &Point) -> Result<f64> {
        p.check_dim(self.dim())?;
        if !self.contains_slice(p.coords()) {
            return Err(Error::NotInterior);
        }
        Ok(self.distance_to_boundary_slice(p.coords()))
    }

    /// Nearest boundary point to an interior point. Boundary points are
    /// returned unchanged; box ties go to the lowest axis, lower face first.
    pub fn project_to_boundary(&self, p: &Point) -> Result<Point> {
        p.check_dim(self.dim())?;
        if self.contains_slice(p.coords()) {
            return Ok(Point::from_vec_unchecked(
                self.project_interior_slice(p.coords()),
            ));
        }
        if self.boundary_residual_slice(p.coords()) <= BOUNDARY_TOL {
            return Ok(p.clone());
        }
        Err(Error::Outside)
    }

    /// Point where the segment from an interior point to an exterior (or
    /// boundary) point first meets the boundary.
    pub fn intersect_segment_with_boundary(&self, inside: &Point, outside: &Point) -> Result<Point> {
        inside.check_dim(self.dim())?;
        outside.check_dim(self.dim())?;
        let inside_in = self.contains_slice(inside.coords());
        let outside_in = self.contains_slice(outside.coords());
        if !inside_in || outside_in {
            return Err(Error::NoCrossing {
                inside_in,
                outside_in,
            });
        }
        let (q, _) = self.intersect_slice(inside.coords(), outside.coords());
        Ok(Point::from_vec_unchecked(q))
    }

    /// Relative deviation of `p` from the boundary equation: `|‖p−c‖ − r| / r`
    /// for balls, the unsigned box distance over the diameter for boxes.
    pub fn boundary_residual(&self, p: &Point) -> Result<f64> {
        p.check_dim(self.dim())?;
        Ok(self.boundary_residual_slice(p.coords()))
    }

    pub(crate) fn contains_slice(&self, p: &[f64]) -> bool {
        match self {
            Domain::Ball(b) => distance(p, b.center.coords()) < b.radius,
            Domain::Box(b) => p
                .iter()
                .zip(b.lower.coords().iter().zip(b.upper.coords()))
                .all(|(&x, (&lo, &hi))| x > lo && x < hi),
        }
    }

    pub(crate) fn distance_to_boundary_slice(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Ball(b) => b.radius - distance(p, b.center.coords()),
            Domain::Box(b) => nearest_face(b, p).1,
        }
    }

    pub(crate) fn project_interior_slice(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Domain::Ball(b) => {
                let c = b.center.coords();
                let mut dir: Vec<f64> = p.iter().zip(c).map(|(x, c)| x - c).collect();
                if norm(&dir) == 0.0 {
                    dir.iter_mut().for_each(|v| *v = 0.0);
                    dir[0] = 1.0;
                }
                radial_boundary_point(b, &dir)
            }
            Domain::Box(b) => {
                let ((axis, upper), _) = nearest_face(b, p);
                let mut q = p.to_vec();
                q[axis] = if upper { b.upper[axis] } else { b.lower[axis] };
                q
            }
        }
    }

    /// Closest boundary point to an arbitrary point: the interior projection
    /// for interior points, radial projection (ball) or clamping (box) for
    /// exterior ones.
    pub(crate) fn closest_boundary_slice(&self, p: &[f64]) -> Vec<f64> {
        if self.contains_slice(p) {
            return self.project_interior_slice(p);
        }
        match self {
            Domain::Ball(b) => {
                let dir: Vec<f64> = p.iter().zip(b.center.coords()).map(|(x, c)| x - c).collect();
                radial_boundary_point(b, &dir)
            }
            Domain::Box(b) => p
                .iter()
                .zip(b.lower.coords().iter().zip(b.upper.coords()))
                .map(|(&x, (&lo, &hi))| x.clamp(lo, hi))
                .collect(),
        }
    }

    /// Returns the crossing point and its segment parameter `t ∈ (0, 1]`.
    /// Callers guarantee `inside` is interior and `outside` is not.
    pub(crate) fn intersect_slice(&self, inside: &[f64], outside: &[f64]) -> (Vec<f64>, f64) {
        let v: Vec<f64> = outside.iter().zip(inside).map(|(o, i)| o - i).collect();
        match self {
            Domain::Ball(b) => {
                let w: Vec<f64> = inside.iter().zip(b.center.coords()).map(|(i, c)| i - c).collect();
                let a = dot(&v, &v);
                let half_b = dot(&v, &w);
                // negative since `inside` is interior
                let c0 = dot(&w, &w) - b.radius * b.radius;
                let disc = (half_b * half_b - a * c0).max(0.0).sqrt();
                // positive root of a t^2 + 2 half_b t + c0, in the cancellation-free form
                let t = if half_b >= 0.0 {
                    -c0 / (half_b + disc)
                } else {
                    (disc - half_b) / a
                };
                let t = t.clamp(f64::MIN_POSITIVE, 1.0);
                let q = inside.iter().zip(&v).map(|(i, v)| i + t * v).collect();
                (q, t)
            }
            Domain::Box(b) => {
                let mut t_hit = 1.0;
                let mut hit: Option<(usize, f64)> = None;
                for axis in 0..inside.len() {
                    let bound = if v[axis] > 0.0 {
                        b.upper[axis]
                    } else if v[axis] < 0.0 {
                        b.lower[axis]
                    } else {
                        continue;
                    };
                    let t = (bound - inside[axis]) / v[axis];
                    if t <= t_hit {
                        if t < t_hit || hit.is_none() {
                            hit = Some((axis, bound));
                        }
                        t_hit = t;
                    }
                }
                let t = t_hit.clamp(f64::MIN_POSITIVE, 1.0);
                let mut q: Vec<f64> = inside.iter().zip(&v).map(|(i, v)| i + t * v).collect();
                if let Some((axis, bound)) = hit {
                    q[axis] = bound;
                }
                // keep rounding from pushing other coordinates past their faces
                for axis in 0..q.len() {
                    q[axis] = q[axis].clamp(b.lower[axis], b.upper[axis]);
                }
                (q, t)
            }
        }
    }

    pub(crate) fn boundary_residual_slice(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Ball(b) => (distance(p, b.center.coords()) - b.radius).abs() / b.radius,
            Domain::Box(b) => {
                let outside: f64 = p
                    .iter()
                    .zip(b.lower.coords().iter().zip(b.upper.coords()))
                    .map(|(&x, (&lo, &hi))| {
                        let excess = (lo - x).max(x - hi).max(0.0);
                        excess * excess
                    })
                    .sum::<f64>()
                    .sqrt();
                let inside = if outside > 0.0 { 0.0 } else { nearest_face(b, p).1.max(0.0) };
                (outside + inside) / self.diameter()
            }
        }
    }
}

/// Relative tolerance under which a point counts as lying on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `((axis, is_upper_face), distance)` of the nearest box face.
fn nearest_face(b: &BoxDomain, p: &[f64]) -> ((usize, bool), f64) {
    let mut best = ((0, false), f64::INFINITY);
    for (axis, &x) in p.iter().enumerate() {
        let lo = x - b.lower[axis];
        if lo < best.1 {
            best = ((axis, false), lo);
        }
        let hi = b.upper[axis] - x;
        if hi < best.1 {
            best = ((axis, true), hi);
        }
    }
    best
}

/// `c + r·dir/‖dir‖`, nudged outward until it is no longer strictly inside.
fn radial_boundary_point(b: &Ball, dir: &[f64]) -> Vec<f64> {
    let c = b.center.coords();
    let mut scale = b.radius / norm(dir);
    let mut q: Vec<f64> = c.iter().zip(dir).map(|(c, d)| c + scale * d).collect();
    for _ in 0..16 {
        if distance(&q, c) >= b.radius {
            break;
        }
        scale *= 1.0 + f64::EPSILON;
        q.iter_mut()
            .zip(c.iter().zip(dir))
            .for_each(|(q, (c, d))| *q = c + scale * d);
    }
    q
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn unit_disc() -> Domain {
        Ball::unit(2).into()
    }

    fn rect() -> Domain {
        BoxDomain::new(pt(&[0.0, 0.0]), pt(&[2.0, 1.0])).unwrap().into()
    }

    #[test]
    fn contains_examples() {
        assert!(unit_disc().contains(&pt(&[0.0, 0.0])).unwrap());
        assert!(!unit_disc().contains(&pt(&[1.0, 0.0])).unwrap());
        assert!(rect().contains(&pt(&[1.0, 0.5])).unwrap());
        assert!(!rect().contains(&pt(&[0.0, 0.5])).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = unit_disc().contains(&pt(&[0.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
        assert!(rect().distance_to_boundary(&pt(&[0.5])).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
        assert!(Ball::new(Point::origin(2), 0.0).is_err());
        assert!(Ball::new(Point::origin(2), f64::INFINITY).is_err());
        assert!(BoxDomain::new(pt(&[0.0, 1.0]), pt(&[1.0, 1.0])).is_err());
        assert!(BoxDomain::new(pt(&[0.0]), pt(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(unit_disc().distance_to_boundary(&pt(&[0.0, 0.0])).unwrap(), 1.0);
        let d = unit_disc().distance_to_boundary(&pt(&[0.8, 0.0])).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        let d = rect().distance_to_boundary(&pt(&[0.3, 0.4])).unwrap();
        assert!((d - 0.3).abs() < 1e-15);
        assert_eq!(
            unit_disc().distance_to_boundary(&pt(&[1.0, 0.0])),
            Err(Error::NotInterior)
        );
    }

    #[test]
    fn projection_examples() {
        assert_eq!(unit_disc().project_to_boundary(&pt(&[0.5, 0.0])).unwrap(), pt(&[1.0, 0.0]));
        let ball2: Domain = Ball::new(Point::origin(2), 2.0).unwrap().into();
        assert_eq!(ball2.project_to_boundary(&pt(&[0.0, -1.0])).unwrap(), pt(&[0.0, -2.0]));
        assert_eq!(rect().project_to_boundary(&pt(&[0.3, 0.4])).unwrap(), pt(&[0.0, 0.4]));
        // on the boundary: unchanged
        assert_eq!(unit_disc().project_to_boundary(&pt(&[0.0, 1.0])).unwrap(), pt(&[0.0, 1.0]));
        assert_eq!(unit_disc().project_to_boundary(&pt(&[2.0, 0.0])), Err(Error::Outside));
    }

    #[test]
    fn box_projection_ties_prefer_low_axis_then_lower_face() {
        let unit_sq: Domain = BoxDomain::new(pt(&[0.0, 0.0]), pt(&[1.0, 1.0])).unwrap().into();
        // every face at distance 0.5
        assert_eq!(unit_sq.project_to_boundary(&pt(&[0.5, 0.5])).unwrap(), pt(&[0.0, 0.5]));
        // axis-0 upper and axis-1 lower tie
        assert_eq!(unit_sq.project_to_boundary(&pt(&[0.75, 0.25])).unwrap(), pt(&[1.0, 0.25]));
        assert_eq!(unit_sq.project_to_boundary(&pt(&[0.5, 0.75])).unwrap(), pt(&[0.5, 1.0]));
    }

    #[test]
    fn projection_from_center_of_ball_is_deterministic() {
        let q = unit_disc().project_to_boundary(&pt(&[0.0, 0.0])).unwrap();
        assert_eq!(q, pt(&[1.0, 0.0]));
    }

    #[test]
    fn intersection_examples() {
        let q = unit_disc()
            .intersect_segment_with_boundary(&pt(&[0.0, 0.0]), &pt(&[2.0, 0.0]))
            .unwrap();
        assert!(q.distance(&pt(&[1.0, 0.0])) < 1e-15);
        let q = unit_disc()
            .intersect_segment_with_boundary(&pt(&[0.6, 0.0]), &pt(&[0.6, 1.2]))
            .unwrap();
        assert!(q.distance(&pt(&[0.6, 0.8])) < 1e-15, "{q}");
        let sq: Domain = BoxDomain::new(pt(&[0.0, 0.0]), pt(&[1.0, 1.0])).unwrap().into();
        let q = sq
            .intersect_segment_with_boundary(&pt(&[0.5, 0.5]), &pt(&[1.5, 0.5]))
            .unwrap();
        assert_eq!(q, pt(&[1.0, 0.5]));
    }

    #[test]
    fn intersection_requires_straddling_segment() {
        let d = unit_disc();
        assert!(matches!(
            d.intersect_segment_with_boundary(&pt(&[0.0, 0.0]), &pt(&[0.5, 0.0])),
            Err(Error::NoCrossing { .. })
        ));
        assert!(matches!(
            d.intersect_segment_with_boundary(&pt(&[2.0, 0.0]), &pt(&[3.0, 0.0])),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn distance_vanishes_along_rays() {
        for domain in [unit_disc(), rect()] {
            let start = match &domain {
                Domain::Ball(_) => pt(&[0.1, 0.2]),
                Domain::Box(_) => pt(&[1.2, 0.3]),
            };
            let target = domain.project_to_boundary(&start).unwrap();
            let mut last = f64::INFINITY;
            for k in 1..=40 {
                let s = 1.0 - 0.5f64.powi(k);
                let p: Vec<f64> = start
                    .coords()
                    .iter()
                    .zip(target.coords())
                    .map(|(a, b)| a + s * (b - a))
                    .collect();
                let p = Point::new(p).unwrap();
                if !domain.contains(&p).unwrap() {
                    break;
                }
                let d = domain.distance_to_boundary(&p).unwrap();
                assert!(d > 0.0 && d <= last);
                last = d;
            }
            assert!(last < 1e-9);
        }
    }

    #[test]
    fn point_parsing() {
        assert_eq!("0.5,0".parse::<Point>().unwrap(), pt(&[0.5, 0.0]));
        assert!("0.5,,1".parse::<Point>().is_err());
        assert!("nan".parse::<Point>().is_err());
        assert_eq!(pt(&[0.5, -1.0]).to_string(), "0.5,-1");
    }

    fn interior_ball_point(dim: usize) -> impl Strategy<Value = (Ball, Point)> {
        (
            prop::collection::vec(-5.0..5.0f64, dim),
            0.1..10.0f64,
            prop::collection::vec(-1.0..1.0f64, dim),
            0.0..0.999f64,
        )
            .prop_map(|(c, r, dir, frac)| {
                let n = norm(&dir).max(1e-9);
                let p: Vec<f64> = c.iter().zip(&dir).map(|(c, d)| c + r * frac * d / n).collect();
                (Ball::new(Point::new(c).unwrap(), r).unwrap(), Point::new(p).unwrap())
            })
    }

    fn interior_box_point(dim: usize) -> impl Strategy<Value = (BoxDomain, Point)> {
        (
            prop::collection::vec(-5.0..5.0f64, dim),
            prop::collection::vec(0.1..4.0f64, dim),
            prop::collection::vec(0.001..0.999f64, dim),
        )
            .prop_map(|(lo, ext, frac)| {
                let hi: Vec<f64> = lo.iter().zip(&ext).map(|(l, e)| l + e).collect();
                let p: Vec<f64> = lo.iter().zip(&ext).zip(&frac).map(|((l, e), f)| l + e * f).collect();
                (
                    BoxDomain::new(Point::new(lo).unwrap(), Point::new(hi).unwrap()).unwrap(),
                    Point::new(p).unwrap(),
                )
            })
    }

    fn check_projection(domain: &Domain, p: &Point) -> std::result::Result<(), TestCaseError> {
        prop_assume!(domain.contains(p).unwrap());
        let d = domain.distance_to_boundary(p).unwrap();
        prop_assert!(d > 0.0);
        let q = domain.project_to_boundary(p).unwrap();
        prop_assert!(!domain.contains(&q).unwrap());
        prop_assert!(domain.boundary_residual(&q).unwrap() <= 1e-12);
        prop_assert!((q.distance(p) - d).abs() <= 1e-12 * domain.diameter());
        Ok(())
    }

    fn check_intersection(domain: &Domain, inside: &Point, dir: &[f64]) -> std::result::Result<(), TestCaseError> {
        prop_assume!(domain.contains(inside).unwrap());
        let n = norm(dir);
        prop_assume!(n > 1e-6);
        let reach = 2.0 * domain.diameter() / n;
        let outside: Vec<f64> = inside.coords().iter().zip(dir).map(|(p, d)| p + reach * d).collect();
        let outside = Point::new(outside).unwrap();
        let q = domain.intersect_segment_with_boundary(inside, &outside).unwrap();
        prop_assert!(domain.boundary_residual(&q).unwrap() <= 1e-12);
        // reconstruct t from the dominant axis and check q lies on the segment
        let v: Vec<f64> = outside.coords().iter().zip(inside.coords()).map(|(o, i)| o - i).collect();
        let axis = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        let t = (q[axis] - inside[axis]) / v[axis];
        prop_assert!(t > 0.0 && t <= 1.0 + 1e-12);
        for i in 0..v.len() {
            prop_assert!((inside[i] + t * v[i] - q[i]).abs() <= 1e-9 * domain.diameter());
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn ball_projection_lands_on_sphere(
            (ball, p) in prop::sample::select(vec![1usize, 2, 3, 4, 8]).prop_flat_map(interior_ball_point)
        ) {
            check_projection(&ball.into(), &p)?;
        }

        #[test]
        fn box_projection_lands_on_faces(
            (b, p) in prop::sample::select(vec![1usize, 2, 3, 4, 8]).prop_flat_map(interior_box_point)
        ) {
            check_projection(&b.into(), &p)?;
        }

        #[test]
        fn ball_intersection_is_on_segment(
            ((ball, p), dir) in prop::sample::select(vec![1usize, 2, 3, 4, 8]).prop_flat_map(|d| {
                (interior_ball_point(d), prop::collection::vec(-1.0..1.0f64, d))
            })
        ) {
            check_intersection(&ball.into(), &p, &dir)?;
        }

        #[test]
        fn box_intersection_is_on_segment(
            ((b, p), dir) in prop::sample::select(vec![1usize, 2, 3, 4, 8]).prop_flat_map(|d| {
                (interior_box_point(d), prop::collection::vec(-1.0..1.0f64, d))
            })
        ) {
            check_intersection(&b.into(), &p, &dir)?;
        }
    }
}
