//! Static and dry-run checks on a placement.

use serde::{Deserialize, Serialize};

use super::{Case, Expect, Placement, Role};
use crate::agent::LegTag;
use crate::geometry::sector_of;
use crate::sim::{self, EventLabel, RunStatus, MAX_SIM_K};

/// Pebbles must stay at least this far apart.
pub const MIN_SEPARATION: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairIssue {
    pub a: usize,
    pub b: usize,
    pub role_a: Role,
    pub role_b: Role,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptMismatch {
    pub step: usize,
    pub leg: Option<LegTag>,
    pub expected: Option<Expect>,
    pub observed: Option<Expect>,
    pub observed_leg: Option<LegTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScriptCheck {
    Matched,
    /// The treasure was met before the script ran out.
    EarlyTreasure {
        step: usize,
    },
    Mismatch(ScriptMismatch),
    Skipped(String),
}

impl ScriptCheck {
    pub fn ok(&self) -> bool {
        matches!(
            self,
            ScriptCheck::Matched | ScriptCheck::EarlyTreasure { .. } | ScriptCheck::Skipped(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pebble_count: usize,
    pub budget: u32,
    pub min_separation: Option<f64>,
    pub separation_violations: Vec<PairIssue>,
    /// Close pairs that involve the foot pebble.
    pub footpt_warnings: Vec<PairIssue>,
    pub script: ScriptCheck,
    pub run_status: Option<RunStatus>,
    /// For main placements: whether the decoded sector is the treasure's.
    pub decode_ok: Option<bool>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.pebble_count <= self.budget as usize
            && self.separation_violations.is_empty()
            && self.script.ok()
            && self.decode_ok != Some(false)
    }

    pub fn has_warnings(&self) -> bool {
        !self.footpt_warnings.is_empty() || matches!(self.script, ScriptCheck::Skipped(_))
    }
}

fn observed(pl: &Placement, event: EventLabel, pebble: Option<usize>) -> Expect {
    match event {
        EventLabel::AtOrigin => Expect::Origin,
        EventLabel::AtTreasure => Expect::Treasure,
        EventLabel::AtPebble => {
            Expect::Pebble(pebble.map(|i| pl.pebbles[i].role).unwrap_or(Role::P0))
        }
    }
}

/// Checks budget, pairwise separation, the event script under a dry run, and
/// for main placements that the decoded sector contains the treasure.
pub fn validate(pl: &Placement) -> ValidationReport {
    let tol_sep = MIN_SEPARATION - 1e-9;
    let mut min_separation: Option<f64> = None;
    let mut separation_violations = Vec::new();
    let mut footpt_warnings = Vec::new();
    for (a, pa) in pl.pebbles.iter().enumerate() {
        for (b, pb) in pl.pebbles.iter().enumerate().skip(a + 1) {
            let d = pa.pos.distance(pb.pos);
            min_separation = Some(min_separation.map_or(d, |m| m.min(d)));
            if d < tol_sep {
                let issue = PairIssue {
                    a,
                    b,
                    role_a: pa.role,
                    role_b: pb.role,
                    distance: d,
                };
                if pa.role == Role::FootPt || pb.role == Role::FootPt {
                    footpt_warnings.push(issue);
                } else {
                    separation_violations.push(issue);
                }
            }
        }
    }

    let (script, run_status, decode_ok) = if pl.k > MAX_SIM_K {
        (
            ScriptCheck::Skipped(format!("k={} is beyond the simulation range", pl.k)),
            None,
            None,
        )
    } else {
        match sim::run(pl) {
            Err(e) => (ScriptCheck::Skipped(e.to_string()), None, None),
            Ok(r) => {
                let script = compare_script(pl, &r);
                let decode_ok = (pl.case == Case::MainOutsideB).then(|| {
                    let n = 1u128 << (pl.k - 8);
                    let expected = sector_of(pl.treasure, n, pl.fan_side()).ok();
                    r.decoded.as_ref().is_some_and(|d| {
                        Some(d.delta) == expected && Some(d.travel_line) == pl.travel_line
                    })
                });
                (script, Some(r.status), decode_ok)
            }
        }
    };

    ValidationReport {
        pebble_count: pl.pebbles.len(),
        budget: pl.k,
        min_separation,
        separation_violations,
        footpt_warnings,
        script,
        run_status,
        decode_ok,
    }
}

fn compare_script(pl: &Placement, r: &sim::RunResult) -> ScriptCheck {
    let script = pl.expected_event_script();
    for (step, leg) in r.legs.iter().enumerate() {
        let obs = observed(pl, leg.event, leg.pebble);
        let expected = script.get(step);
        if obs == Expect::Treasure && r.status == RunStatus::Found {
            return if step + 1 == script.len() && expected.is_some_and(|s| s.leg == leg.leg) {
                ScriptCheck::Matched
            } else {
                ScriptCheck::EarlyTreasure { step }
            };
        }
        match expected {
            Some(s) if s.expect == obs && s.leg == leg.leg => {}
            _ => {
                return ScriptCheck::Mismatch(ScriptMismatch {
                    step,
                    leg: expected.map(|s| s.leg),
                    expected: expected.map(|s| s.expect),
                    observed: Some(obs),
                    observed_leg: Some(leg.leg),
                })
            }
        }
    }
    let step = r.legs.len();
    let expected = script.get(step);
    ScriptCheck::Mismatch(ScriptMismatch {
        step,
        leg: expected.map(|s| s.leg),
        expected: expected.map(|s| s.expect),
        observed: None,
        observed_leg: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::oracle::{place, Instance, Pebble};

    fn placed(x: f64, y: f64, k: u32) -> Placement {
        place(&Instance::new(Point::new(x, y), k).unwrap()).unwrap()
    }

    #[test]
    fn main_placements_validate() {
        for (x, y, k) in [
            (2.0, 1.0, 9),
            (-37.5, 12.25, 17),
            (0.3, 80.0, 12),
            (55.0, -20.0, 14),
        ] {
            let rep = validate(&placed(x, y, k));
            assert!(rep.passed(), "{x},{y},{k}: {rep:?}");
            assert_eq!(rep.script, ScriptCheck::Matched);
            assert_eq!(rep.decode_ok, Some(true));
            assert!(rep.min_separation.unwrap() >= 1.0);
        }
    }

    #[test]
    fn square_and_two_pebble_validate() {
        for (x, y, k) in [
            (0.5, 0.5, 9),
            (-0.5, 0.5, 9),
            (0.3, -0.7, 10),
            (3.0, 1.0, 2),
            (0.0, -3.0, 5),
        ] {
            let rep = validate(&placed(x, y, k));
            assert!(rep.passed(), "{x},{y},{k}: {rep:?}");
            assert_eq!(rep.decode_ok, None);
        }
    }

    #[test]
    fn early_treasure_is_accepted() {
        let rep = validate(&placed(0.5, 0.0, 9));
        assert_eq!(rep.script, ScriptCheck::EarlyTreasure { step: 0 });
        assert!(rep.passed());
    }

    #[test]
    fn moved_pebble_breaks_script() {
        let mut pl = placed(2.0, 1.0, 9);
        let i = pl
            .pebbles
            .iter()
            .position(|p| p.role == Role::Bit(2))
            .unwrap();
        pl.pebbles[i] = Pebble::new(-5.0, 0.0, Role::Bit(2));
        let rep = validate(&pl);
        assert!(!rep.passed());
        match rep.script {
            ScriptCheck::Mismatch(m) => assert_eq!(m.leg.unwrap().iteration, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn displaced_first_bit_fails_on_the_slant() {
        let mut pl = placed(2.0, 1.0, 9);
        let i = pl
            .pebbles
            .iter()
            .position(|p| p.role == Role::Bit(1))
            .unwrap();
        pl.pebbles[i] = Pebble::new(-3.5, 0.0, Role::Bit(1));
        match validate(&pl).script {
            ScriptCheck::Mismatch(m) => {
                assert_eq!(m.step, 2);
                assert_eq!(m.leg, Some(LegTag::new(1, crate::agent::LegKind::Slant)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foot_close_to_start_is_a_warning() {
        let rep = validate(&placed(20.0, -0.5, 9));
        assert_eq!(rep.footpt_warnings.len(), 1);
        assert!((rep.footpt_warnings[0].distance - 0.5).abs() < 1e-12);
        assert!(rep.has_warnings());
        assert!(rep.passed());
        let rep = validate(&placed(1.2, 1.2, 9));
        assert!(rep.passed());
        assert!((rep.min_separation.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn close_pairs_reported() {
        let mut pl = placed(2.0, 1.0, 9);
        pl.pebbles.push(Pebble::new(-1.5, 0.0, Role::Bit(9)));
        let rep = validate(&pl);
        assert!(!rep.separation_violations.is_empty());
        assert!(!rep.passed());
    }

    #[test]
    fn large_budget_skips_dry_run() {
        let rep = validate(&placed(1e6, 3.0, 60));
        assert!(matches!(rep.script, ScriptCheck::Skipped(_)));
        assert!(rep.passed());
        assert_eq!(rep.pebble_count, 60);
    }
}
