//! Geometric primitives: points, unit headings, rays, tolerant on-ray tests,
//! first-event queries and the sector fan used to encode treasure directions.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest absolute coordinate the engine accepts.
pub const MAX_COORDINATE: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point ({x}, {y}) is not finite or exceeds the coordinate guard")]
    InvalidPoint { x: f64, y: f64 },
    #[error("direction vector ({x}, {y}) cannot be normalized")]
    DegenerateDirection { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies outside the {side:?} half-plane")]
    OutOfHalfPlane { x: f64, y: f64, side: Side },
    #[error("the origin has no polar angle")]
    AtOrigin,
    #[error("projection {scalar} onto the half-line is negative")]
    NegativeProjection { scalar: f64 },
    #[error("line index {index} exceeds sector count {count}")]
    LineIndexOutOfRange { index: u128, count: u128 },
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Checks the engine guard: finite and `|coordinate| <= 1e12`.
    pub fn checked(x: f64, y: f64) -> Result<Self, GeometryError> {
        let p = Point { x, y };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(GeometryError::InvalidPoint { x, y })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.x.abs() <= MAX_COORDINATE
            && self.y.abs() <= MAX_COORDINATE
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_origin(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// A unit direction vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Heading {
    ux: f64,
    uy: f64,
}

impl Heading {
    pub const EAST: Heading = Heading { ux: 1.0, uy: 0.0 };
    pub const WEST: Heading = Heading { ux: -1.0, uy: 0.0 };
    pub const NORTH: Heading = Heading { ux: 0.0, uy: 1.0 };
    pub const SOUTH: Heading = Heading { ux: 0.0, uy: -1.0 };

    /// Heading at `radians` counterclockwise from the positive x-axis.
    pub fn from_angle(radians: f64) -> Self {
        let (s, c) = radians.sin_cos();
        Heading { ux: c, uy: s }
    }

    /// Normalizes `(x, y)`.
    pub fn from_vector(x: f64, y: f64) -> Result<Self, GeometryError> {
        let n = x.hypot(y);
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::DegenerateDirection { x, y });
        }
        Ok(Heading {
            ux: x / n,
            uy: y / n,
        })
    }

    pub fn ux(&self) -> f64 {
        self.ux
    }

    pub fn uy(&self) -> f64 {
        self.uy
    }

    pub fn as_point(&self) -> Point {
        Point::new(self.ux, self.uy)
    }

    pub fn angle(&self) -> f64 {
        self.uy.atan2(self.ux)
    }

    pub fn degrees(&self) -> f64 {
        self.angle().to_degrees()
    }

    /// Quarter turn counterclockwise.
    pub fn rotate_ccw(&self) -> Heading {
        Heading {
            ux: -self.uy,
            uy: self.ux,
        }
    }

    /// Quarter turn clockwise.
    pub fn rotate_cw(&self) -> Heading {
        Heading {
            ux: self.uy,
            uy: -self.ux,
        }
    }

    pub fn reversed(&self) -> Heading {
        Heading {
            ux: -self.ux,
            uy: -self.uy,
        }
    }

    pub fn is_unit(&self) -> bool {
        (self.ux * self.ux + self.uy * self.uy - 1.0).abs() <= 1e-12
    }

    /// Unsigned angle between two headings, in `[0, pi]`.
    pub fn angle_to(&self, other: &Heading) -> f64 {
        let c = self.as_point().cross(other.as_point());
        let d = self.as_point().dot(other.as_point());
        c.atan2(d).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point,
    pub dir: Heading,
}

impl Ray {
    pub fn new(origin: Point, dir: Heading) -> Self {
        Ray { origin, dir }
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + self.dir.as_point() * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub eps_rel: f64,
    pub eps_abs: f64,
    pub t_min: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eps_rel: 1e-9,
            eps_abs: 1e-12,
            t_min: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.eps_rel > 0.0 && self.eps_abs > 0.0 && self.t_min > 0.0) {
            return Err(GeometryError::InvalidTolerance(
                "all tolerances must be positive",
            ));
        }
        if self.eps_rel >= 1e-3 {
            return Err(GeometryError::InvalidTolerance(
                "eps_rel must be below 1e-3",
            ));
        }
        Ok(())
    }

    /// Allowed perpendicular offset at forward parameter `t`.
    pub fn offset_at(&self, t: f64) -> f64 {
        self.eps_abs + self.eps_rel * t.max(1.0)
    }
}

/// Forward parameter of `q` along `r`, if `q` lies on the ray within tolerance.
pub fn on_ray(q: Point, r: &Ray, tol: &TolerancePolicy) -> Option<f64> {
    let d = q - r.origin;
    let u = r.dir.as_point();
    let t = d.dot(u);
    if t < tol.t_min {
        return None;
    }
    let offset = d.cross(u).abs();
    (offset <= tol.offset_at(t)).then_some(t)
}

/// What a site means to the agent when reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteKind {
    Pebble,
    OriginP,
    Treasure,
}

impl SiteKind {
    fn precedence(self) -> u8 {
        match self {
            SiteKind::Treasure => 2,
            SiteKind::OriginP => 1,
            SiteKind::Pebble => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub point: Point,
    pub kind: SiteKind,
}

impl Site {
    pub fn new(point: Point, kind: SiteKind) -> Self {
        Site { point, kind }
    }
}

/// Result of a first-event query: index into the site slice and forward parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub index: usize,
    pub t: f64,
}

/// Nearest site on the ray. Sites within the on-ray tolerance of the nearest
/// parameter count as coincident and resolve as Treasure > OriginP > Pebble.
/// `None` means the ray escapes.
pub fn first_event(r: &Ray, sites: &[Site], tol: &TolerancePolicy) -> Option<Hit> {
    let candidates: Vec<Hit> = sites
        .iter()
        .enumerate()
        .filter_map(|(index, s)| on_ray(s.point, r, tol).map(|t| Hit { index, t }))
        .collect();
    let nearest = candidates.iter().map(|h| h.t).fold(f64::INFINITY, f64::min);
    if !nearest.is_finite() {
        return None;
    }
    let window = tol.offset_at(nearest);
    candidates
        .into_iter()
        .filter(|h| h.t - nearest <= window)
        .max_by(|a, b| {
            let pa = sites[a.index].kind.precedence();
            let pb = sites[b.index].kind.precedence();
            // on equal precedence keep the nearer (then lower index) site
            pa.cmp(&pb)
                .then(b.t.total_cmp(&a.t))
                .then(b.index.cmp(&a.index))
        })
}

/// Foot of the perpendicular from `t` onto the half-line from the origin along `line`.
pub fn foot_of_perpendicular(t: Point, line: &Heading) -> Result<Point, GeometryError> {
    let u = line.as_point();
    let scalar = t.dot(u);
    if scalar < 0.0 {
        return Err(GeometryError::NegativeProjection { scalar });
    }
    Ok(u * scalar)
}

/// Which closed half-plane a sector fan covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `x >= 0`; lines sweep clockwise from North to South.
    Right,
    /// `x <= 0`; lines sweep counterclockwise from North to South.
    Left,
}

impl Side {
    pub fn of(p: Point) -> Side {
        if p.x >= 0.0 {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn contains(self, p: Point) -> bool {
        match self {
            Side::Right => p.x >= 0.0,
            Side::Left => p.x <= 0.0,
        }
    }
}

/// Heading of half-line `L_i` of an `n`-sector fan: `pi/2 - pi*i/n` on the
/// right, `pi/2 + pi*i/n` on the left.
pub fn heading_of_line(i: u128, n: u128, side: Side) -> Result<Heading, GeometryError> {
    if n == 0 || i > n {
        return Err(GeometryError::LineIndexOutOfRange { index: i, count: n });
    }
    // angle swept away from North, reduced so that the quarter and half
    // turns come out exact
    let (s, c) = if i == 0 {
        (0.0, 1.0)
    } else if i == n {
        (0.0, -1.0)
    } else if n - i == i {
        (1.0, 0.0)
    } else if i <= n - i {
        (PI * (i as f64 / n as f64)).sin_cos()
    } else {
        let (s, c) = (PI * ((n - i) as f64 / n as f64)).sin_cos();
        (s, -c)
    };
    let ux = match side {
        Side::Right => s,
        Side::Left => -s,
    };
    Ok(Heading { ux, uy: c })
}

/// Angle swept from North toward the fan's side, in `[0, pi]`.
pub fn swept_angle(p: Point, side: Side) -> f64 {
    // adding 0.0 turns -0.0 into +0.0 so the y-axis stays inside the fan
    let x = match side {
        Side::Right => p.x,
        Side::Left => -p.x,
    } + 0.0;
    x.atan2(p.y)
}

/// Sector index `j` with `p` in `[L_j, L_{j+1})`; points on the terminal
/// line `L_n` fall in the last sector.
pub fn sector_of(p: Point, n: u128, side: Side) -> Result<u128, GeometryError> {
    if p.is_origin() {
        return Err(GeometryError::AtOrigin);
    }
    if !side.contains(p) {
        return Err(GeometryError::OutOfHalfPlane {
            x: p.x,
            y: p.y,
            side,
        });
    }
    if n == 0 {
        return Err(GeometryError::LineIndexOutOfRange { index: 0, count: 0 });
    }
    let a = swept_angle(p, side).clamp(0.0, PI);
    let raw = (a / PI * n as f64).floor();
    let j = if raw <= 0.0 { 0 } else { raw as u128 };
    Ok(j.min(n - 1))
}

/// Sector angle `pi / 2^(k-8)` for a budget of `k` pebbles.
pub fn sector_width(k: u32) -> f64 {
    PI / 2f64.powi(k as i32 - 8)
}

/// Unsigned angle of `p` from the line heading, measured at the origin.
pub fn angle_from(p: Point, line: &Heading) -> f64 {
    let u = line.as_point();
    p.cross(u).atan2(p.dot(u)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn on_ray_point_on_axis() {
        let r = Ray::new(Point::ORIGIN, Heading::EAST);
        assert_eq!(on_ray(Point::new(2.0, 0.0), &r, &tol()), Some(2.0));
    }

    #[test]
    fn on_ray_bit_one_slant_hit() {
        let r = Ray::new(
            Point::new(-3.0, 0.0),
            Heading::from_vector(2.0, -1.0).unwrap(),
        );
        let t = on_ray(Point::new(-1.0, -1.0), &r, &tol()).unwrap();
        assert!((t - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn on_ray_rejects_offset_and_backward_points() {
        let r = Ray::new(Point::ORIGIN, Heading::EAST);
        assert_eq!(on_ray(Point::new(0.0, 1.0), &r, &tol()), None);
        assert_eq!(on_ray(Point::new(-1.0, 0.0), &r, &tol()), None);
        assert_eq!(on_ray(Point::ORIGIN, &r, &tol()), None);
    }

    #[test]
    fn first_event_picks_nearest() {
        let r = Ray::new(Point::ORIGIN, Heading::WEST);
        let sites = [
            Site::new(Point::new(-3.0, 0.0), SiteKind::Pebble),
            Site::new(Point::new(-1.0, 0.0), SiteKind::Pebble),
        ];
        let hit = first_event(&r, &sites, &tol()).unwrap();
        assert_eq!(hit.index, 1);
        assert_eq!(hit.t, 1.0);
    }

    #[test]
    fn first_event_collinear_pebble_before_treasure() {
        let r = Ray::new(
            Point::new(-3.0, 0.0),
            Heading::from_vector(2.0, -1.0).unwrap(),
        );
        let sites = [
            Site::new(Point::new(5.0, -4.0), SiteKind::Treasure),
            Site::new(Point::new(-1.0, -1.0), SiteKind::Pebble),
        ];
        let hit = first_event(&r, &sites, &tol()).unwrap();
        assert_eq!(hit.index, 1);
        assert!((hit.t - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn first_event_coincident_treasure_wins() {
        let r = Ray::new(Point::ORIGIN, Heading::NORTH);
        let sites = [
            Site::new(Point::new(0.0, 4.0), SiteKind::Pebble),
            Site::new(Point::new(0.0, 4.0), SiteKind::Treasure),
            Site::new(Point::new(0.0, 4.0), SiteKind::OriginP),
        ];
        assert_eq!(first_event(&r, &sites, &tol()).unwrap().index, 1);
    }

    #[test]
    fn first_event_origin_beats_pebble_at_origin() {
        let r = Ray::new(
            Point::new(-1.0, -1.0),
            Heading::from_vector(1.0, 1.0).unwrap(),
        );
        let sites = [
            Site::new(Point::ORIGIN, SiteKind::Pebble),
            Site::new(Point::ORIGIN, SiteKind::OriginP),
        ];
        assert_eq!(first_event(&r, &sites, &tol()).unwrap().index, 1);
    }

    #[test]
    fn first_event_escape() {
        let r = Ray::new(Point::ORIGIN, Heading::NORTH);
        let sites = [Site::new(Point::new(1.0, 1.0), SiteKind::Pebble)];
        assert!(first_event(&r, &sites, &tol()).is_none());
    }

    #[test]
    fn foot_examples() {
        let f = foot_of_perpendicular(Point::new(2.0, 1.0), &Heading::EAST).unwrap();
        assert_eq!(f, Point::new(2.0, 0.0));
        let f = foot_of_perpendicular(Point::new(0.0, 5.0), &Heading::NORTH).unwrap();
        assert_eq!(f, Point::new(0.0, 5.0));
        let f = foot_of_perpendicular(Point::new(1.0, 1.0), &Heading::NORTH).unwrap();
        assert_eq!(f, Point::new(0.0, 1.0));
        assert!(matches!(
            foot_of_perpendicular(Point::new(-1.0, 1.0), &Heading::EAST),
            Err(GeometryError::NegativeProjection { .. })
        ));
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_of(Point::new(2.0, 1.0), 2, Side::Right).unwrap(), 0);
        assert_eq!(sector_of(Point::new(0.0, 5.0), 8, Side::Right).unwrap(), 0);
        assert_eq!(sector_of(Point::new(1.0, -1.0), 2, Side::Right).unwrap(), 1);
        // terminal line goes to the last sector
        assert_eq!(sector_of(Point::new(0.0, -3.0), 4, Side::Right).unwrap(), 3);
        assert_eq!(sector_of(Point::new(0.0, -3.0), 4, Side::Left).unwrap(), 3);
        // a point on an interior line belongs to the sector it opens
        assert_eq!(sector_of(Point::new(5.0, 0.0), 2, Side::Right).unwrap(), 1);
        assert_eq!(sector_of(Point::new(-5.0, 0.0), 2, Side::Left).unwrap(), 1);
    }

    #[test]
    fn sector_errors() {
        assert!(matches!(
            sector_of(Point::new(-1.0, 0.5), 4, Side::Right),
            Err(GeometryError::OutOfHalfPlane { .. })
        ));
        assert_eq!(
            sector_of(Point::ORIGIN, 4, Side::Right),
            Err(GeometryError::AtOrigin)
        );
    }

    #[test]
    fn line_headings() {
        let h = heading_of_line(0, 8, Side::Right).unwrap();
        assert!((h.ux() - 0.0).abs() < 1e-15 && (h.uy() - 1.0).abs() < 1e-15);
        let h = heading_of_line(8, 8, Side::Right).unwrap();
        assert!(h.ux().abs() < 1e-15 && (h.uy() + 1.0).abs() < 1e-15);
        let h = heading_of_line(1, 2, Side::Right).unwrap();
        assert!((h.ux() - 1.0).abs() < 1e-15 && h.uy().abs() < 1e-15);
        let h = heading_of_line(1, 2, Side::Left).unwrap();
        assert!((h.ux() + 1.0).abs() < 1e-15 && h.uy().abs() < 1e-15);
        assert!(heading_of_line(9, 8, Side::Right).is_err());
    }

    /// Independent classification: scan every line and test the half-open
    /// wedge with cross-product signs only.
    fn brute_sector(p: Point, n: u128, side: Side) -> u128 {
        for j in 0..n {
            let a = heading_of_line(j, n, side).unwrap().as_point();
            let b = heading_of_line(j + 1, n, side).unwrap().as_point();
            // sweeping direction sign: clockwise on the right, ccw on the left
            let s = match side {
                Side::Right => -1.0,
                Side::Left => 1.0,
            };
            let past_start = s * a.cross(p) >= 0.0;
            let before_end = s * b.cross(p) < 0.0 || (s * b.cross(p) == 0.0 && b.dot(p) < 0.0);
            if past_start && before_end {
                return j;
            }
        }
        n - 1
    }

    #[test]
    fn sector_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..100_000 {
            let n: u128 = 1 << rng.gen_range(1..=6);
            let side = if i % 2 == 0 { Side::Right } else { Side::Left };
            let r = 10f64.powf(rng.gen_range(-1.0..4.0));
            let a = rng.gen_range(0.0..PI);
            let p = match side {
                Side::Right => Point::new(r * a.sin(), r * a.cos()),
                Side::Left => Point::new(-r * a.sin(), r * a.cos()),
            };
            assert_eq!(
                sector_of(p, n, side).unwrap(),
                brute_sector(p, n, side),
                "{p} n={n}"
            );
        }
    }

    #[test]
    fn foot_minimizes_distance_on_half_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let h = Heading::from_angle(rng.gen_range(0.0..2.0 * PI));
            let t = Point::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            let Ok(f) = foot_of_perpendicular(t, &h) else {
                continue;
            };
            let best = t.distance(f);
            for s in 0..200 {
                let q = h.as_point() * (s as f64 * 0.5);
                assert!(t.distance(q) >= best - 1e-9);
            }
        }
    }

    #[test]
    fn tolerance_validation() {
        assert!(TolerancePolicy::default().validate().is_ok());
        let bad = TolerancePolicy {
            eps_rel: 1e-2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TolerancePolicy {
            t_min: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
