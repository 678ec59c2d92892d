use super::{Case, Instance, Orientation, Pebble, Placement, Role};
use crate::geometry::Point;

/// The two-pebble layout: `a` on the diagonal `y = x`, `b` on the vertical
/// through the treasure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPebbleLayout {
    pub z: f64,
    pub a: Point,
    pub b: Point,
    /// Quadrant of the treasure, 1..=4 counterclockwise; axis points go to
    /// the quadrant they open.
    pub quadrant: u8,
}

impl TwoPebbleLayout {
    pub fn new(t: Point) -> Self {
        let z = t.x.abs().max(t.y.abs());
        let quadrant = match (t.x >= 0.0, t.y >= 0.0) {
            (true, true) => 1,
            (false, true) => 2,
            (false, false) => 3,
            (true, false) => 4,
        };
        let (a, b) = if t.x > 0.0 || t.y > 0.0 {
            (Point::new(z + 1.0, z + 1.0), Point::new(t.x, z + 1.0))
        } else {
            (Point::new(1.0, 1.0), Point::new(t.x, 1.0))
        };
        TwoPebbleLayout { z, a, b, quadrant }
    }
}

/// Two pebbles for any budget `k >= 2`.
pub fn place_two(inst: &Instance) -> Placement {
    let t = inst.treasure();
    let layout = TwoPebbleLayout::new(t);
    Placement {
        k: inst.k(),
        treasure: t,
        orientation: Orientation::E,
        case: Case::TwoPebble,
        encoding: None,
        pebbles: vec![
            Pebble {
                pos: layout.a,
                role: Role::TwoA,
            },
            Pebble {
                pos: layout.b,
                role: Role::TwoB,
            },
        ],
        travel_line: None,
    }
}
