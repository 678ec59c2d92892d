//! Layout for treasures inside the square `B`.
//!
//! The agent runs the first decode iteration unchanged: along the axis to the
//! second pebble, down the slope `-1/2` line to `p3`, then along the slope
//! `+1` line through the treasure.

use super::{Case, OracleError, Orientation, Pebble, Placement, Role};
use crate::agent::headings;
use crate::geometry::{on_ray, Point, Ray, TolerancePolicy};

/// Intermediate points of the square construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareConstruction {
    /// Anchor of `Q2` on the x-axis, `(+-2, 0)`.
    pub anchor: Point,
    /// `Q1 ∩ Q2`.
    pub s: Point,
    /// `s` moved one unit of `y` along `Q1`, away from the axis.
    pub s_shifted: Point,
    /// x-intercept of the slope `-1/2` line through `s_shifted`.
    pub h: Point,
    /// Whether `p2`/`p3` use the shifted pair `(h, s_shifted)`.
    pub shifted: bool,
}

impl SquareConstruction {
    /// Builds the construction for a treasure on the given side of the y-axis.
    pub fn new(t: Point, right: bool) -> Self {
        let sign = if right { 1.0 } else { -1.0 };
        let anchor = Point::new(2.0 * sign, 0.0);
        // Q1: y = x + c, Q2: y = -(x - anchor.x) / 2
        let c = t.y - t.x;
        let sx = (anchor.x - 2.0 * c) / 3.0;
        let s = Point::new(sx, sx + c);
        let s_shifted = Point::new(s.x + sign, s.y + sign);
        let h = Point::new(s_shifted.x + 2.0 * s_shifted.y, 0.0);
        let shifted = if right { s.y < 1.0 } else { s.y > -1.0 };
        SquareConstruction {
            anchor,
            s,
            s_shifted,
            h,
            shifted,
        }
    }

    pub fn p2(&self) -> Point {
        if self.shifted {
            self.h
        } else {
            self.anchor
        }
    }

    pub fn p3(&self) -> Point {
        if self.shifted {
            self.s_shifted
        } else {
            self.s
        }
    }
}

/// Square-case layout for `T` in `B`. The right half (`x_T >= 0`) uses the
/// positive axis without a pebble at the start; the left half mirrors it and
/// marks the start with `p0`.
pub fn place_square(t: Point, k: u32) -> Result<Placement, OracleError> {
    if k < 4 {
        return Err(OracleError::BudgetTooSmall { k, min: 4 });
    }
    if t.is_origin() {
        return Err(OracleError::TreasureAtOrigin);
    }
    if !super::in_square(t) {
        return Err(OracleError::DegenerateConstruction(format!(
            "{t} lies outside the square"
        )));
    }
    let right = t.x >= 0.0;
    let (orientation, case, sign) = if right {
        (Orientation::E, Case::SquareRight, 1.0)
    } else {
        (Orientation::W, Case::SquareLeft, -1.0)
    };
    let sq = SquareConstruction::new(t, right);
    let p2 = sq.p2();
    let p3 = sq.p3();

    let tol = TolerancePolicy::default();
    let leg3 = Ray::new(p3, headings::leg3(orientation));
    let reach = if p3 == t {
        0.0
    } else {
        on_ray(t, &leg3, &tol).ok_or_else(|| {
            OracleError::DegenerateConstruction(format!("leg from {p3} misses the treasure {t}"))
        })?
    };
    if sq.shifted && reach <= tol.t_min {
        return Err(OracleError::DegenerateConstruction(format!(
            "p3 {p3} coincides with {t}"
        )));
    }

    // When the slope +1 line through T crosses the default p1, the agent would
    // stop there before reaching T; p1 then moves half a unit outward.
    let mut p1 = Point::new(sign, 0.0);
    if on_ray(p1, &leg3, &tol).is_some_and(|d| d < reach - tol.offset_at(reach)) {
        p1 = Point::new(1.5 * sign, 0.0);
    }

    let mut pebbles = Vec::with_capacity(4);
    if orientation == Orientation::W {
        pebbles.push(Pebble::new(0.0, 0.0, Role::P0));
    }
    pebbles.push(Pebble {
        pos: p1,
        role: Role::P1,
    });
    pebbles.push(Pebble {
        pos: p2,
        role: Role::P2,
    });
    pebbles.push(Pebble {
        pos: p3,
        role: Role::P3,
    });

    Ok(Placement {
        k,
        treasure: t,
        orientation,
        case,
        encoding: None,
        pebbles,
        travel_line: None,
    })
}
