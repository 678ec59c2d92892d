//! The event sequence a placement is built to produce, derived from roles and
//! the encoding alone.

use serde::{Deserialize, Serialize};

use super::{Case, Placement, Role};
use crate::agent::{LegKind, LegTag};
use crate::geometry::{on_ray, Heading, Point, Ray, TolerancePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expect {
    Pebble(Role),
    Origin,
    Treasure,
}

/// One expected event and the leg on which it should happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub leg: LegTag,
    pub expect: Expect,
}

struct Script(Vec<ScriptStep>);

impl Script {
    fn push(&mut self, iteration: u32, kind: LegKind, expect: Expect) {
        self.0.push(ScriptStep {
            leg: LegTag::new(iteration, kind),
            expect,
        });
    }

    /// Axis leg of iteration `j`: `p1`, then bit pebbles up to `Bit(last)`,
    /// then optionally a final pebble.
    fn axis(&mut self, j: u32, last: u32, then: Option<Role>) {
        self.push(j, LegKind::Axis, Expect::Pebble(Role::P1));
        for l in 1..=last {
            self.push(j, LegKind::Axis, Expect::Pebble(Role::Bit(l)));
        }
        if let Some(r) = then {
            self.push(j, LegKind::Axis, Expect::Pebble(r));
        }
    }
}

impl Placement {
    /// Events the agent should observe, in order, when nothing interrupts
    /// the run. The treasure may legitimately appear earlier than scripted.
    pub fn expected_event_script(&self) -> Vec<ScriptStep> {
        let mut s = Script(Vec::new());
        match self.case {
            Case::TwoPebble => {
                s.push(0, LegKind::Diagonal, Expect::Pebble(Role::TwoA));
                s.push(0, LegKind::West, Expect::Pebble(Role::TwoB));
                if let Some(b) = self.pebble(Role::TwoB) {
                    let ray = Ray::new(b.pos, Heading::SOUTH);
                    let tol = TolerancePolicy::default();
                    let to_origin = on_ray(Point::ORIGIN, &ray, &tol);
                    let to_treasure = on_ray(self.treasure, &ray, &tol);
                    if let (Some(o), Some(t)) = (to_origin, to_treasure) {
                        if o < t {
                            s.push(0, LegKind::South, Expect::Origin);
                        }
                    }
                }
                s.push(0, LegKind::South, Expect::Treasure);
            }
            Case::SquareLeft | Case::SquareRight => {
                s.axis(1, 0, Some(Role::P2));
                s.push(1, LegKind::Slant, Expect::Pebble(Role::P3));
                s.push(1, LegKind::Return, Expect::Treasure);
            }
            Case::MainOutsideB => {
                let bits = self
                    .encoding
                    .as_ref()
                    .map(|e| e.bits().to_vec())
                    .unwrap_or_default();
                let m = bits.len() as u32;
                for (i, &bit) in bits.iter().enumerate() {
                    let j = i as u32 + 1;
                    s.axis(j, j, None);
                    if bit {
                        s.push(j, LegKind::Slant, Expect::Pebble(Role::P2));
                        s.push(j, LegKind::Return, Expect::Origin);
                    } else {
                        s.push(j, LegKind::Slant, Expect::Pebble(Role::P3));
                        s.push(j, LegKind::Return, Expect::Pebble(Role::P1));
                        s.push(j, LegKind::Home, Expect::Origin);
                    }
                }
                let j = m + 1;
                s.axis(j, m, Some(Role::Term2));
                s.push(j, LegKind::Slant, Expect::Pebble(Role::Term1));
                s.push(j, LegKind::Return, Expect::Pebble(Role::Bit(1)));
                s.push(j, LegKind::Home, Expect::Pebble(Role::P1));
                s.push(j, LegKind::Home, Expect::Origin);
                s.push(0, LegKind::Line, Expect::Pebble(Role::FootPt));
                s.push(0, LegKind::Approach, Expect::Treasure);
            }
        }
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{place_main, place_two, Instance};

    #[test]
    fn main_script_for_two_bits() {
        let pl = place_main(&Instance::new(Point::new(2.0, 1.0), 9).unwrap()).unwrap();
        let script = pl.expected_event_script();
        let expects: Vec<_> = script.iter().map(|s| s.expect).collect();
        use Expect::*;
        use Role::*;
        assert_eq!(
            expects,
            vec![
                Pebble(P1),
                Pebble(Bit(1)),
                Pebble(P2),
                Origin,
                Pebble(P1),
                Pebble(Bit(1)),
                Pebble(Bit(2)),
                Pebble(P3),
                Pebble(P1),
                Origin,
                Pebble(P1),
                Pebble(Bit(1)),
                Pebble(Bit(2)),
                Pebble(Term2),
                Pebble(Term1),
                Pebble(Bit(1)),
                Pebble(P1),
                Origin,
                Pebble(FootPt),
                Treasure,
            ]
        );
    }

    #[test]
    fn two_pebble_script_crosses_origin_when_below() {
        let pl = place_two(&Instance::new(Point::new(0.0, -3.0), 2).unwrap());
        let script = pl.expected_event_script();
        assert_eq!(script.len(), 4);
        assert_eq!(script[2].expect, Expect::Origin);
        let pl = place_two(&Instance::new(Point::new(3.0, 1.0), 2).unwrap());
        assert_eq!(pl.expected_event_script().len(), 3);
    }
}
