use std::f64::consts::PI;

use proptest::prelude::*;

use pebblehunt::agent::{Command, LegKind, MainStrategy, Observation, Strategy};
use pebblehunt::cost::{analytic_cost, cost_bound};
use pebblehunt::geometry::{sector_of, Point, TolerancePolicy};
use pebblehunt::oracle::{
    place, placement_from_json, placement_to_json, Case, Instance, Placement, Role,
};
use pebblehunt::sim::{run, EventLabel, RunResult, RunStatus};

fn treasure(r: f64, a: f64) -> Point {
    Point::new(r * a.cos(), r * a.sin())
}

fn placed(t: Point, k: u32) -> Option<Placement> {
    place(&Instance::new(t, k).ok()?).ok()
}

fn observation(e: EventLabel) -> Observation {
    match e {
        EventLabel::AtOrigin => Observation::AtOrigin,
        EventLabel::AtPebble => Observation::AtPebble,
        EventLabel::AtTreasure => Observation::AtTreasure,
    }
}

/// Feeds the observations of a finished run to a fresh strategy and returns
/// the headings it asks for, in degrees.
fn replay<S: Strategy>(s: &S, start: Observation, r: &RunResult) -> Vec<f64> {
    let mut state = s.initial_state();
    let mut obs = start;
    let mut out = Vec::new();
    for leg in &r.legs {
        let (next, cmd) = s.step(&state, obs).expect("replay follows the protocol");
        state = next;
        match cmd {
            Command::Move(m) => out.push(m.heading.degrees()),
            Command::Done => break,
        }
        obs = observation(leg.event);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_is_continuous_and_costs_add_up(
        r in 1.0f64..1e5,
        a in 0.0..2.0 * PI,
        k in 2u32..=30,
    ) {
        let t = treasure(r, a);
        let Some(pl) = placed(t, k) else { return Ok(()) };
        let res = run(&pl).unwrap();
        prop_assert_eq!(res.status, RunStatus::Found);
        let tol = TolerancePolicy::default();
        let mut pos = Point::ORIGIN;
        let mut sum = 0.0;
        for leg in &res.legs {
            prop_assert_eq!(leg.start, pos);
            prop_assert!(leg.length >= tol.t_min);
            let predicted = leg.start + leg.heading.as_point() * leg.length;
            prop_assert!(predicted.distance(leg.end) <= tol.offset_at(leg.length) * 10.0);
            pos = leg.end;
            sum += leg.length;
        }
        prop_assert_eq!(pos, t);
        prop_assert!((sum - res.total_cost).abs() <= 1e-9 * sum.max(1.0));
        prop_assert_eq!(res.total_cost, res.decode_cost + res.sector_cost);
        prop_assert!(res.total_cost <= cost_bound(t.norm(), k));
        prop_assert!(res.legs.len() <= 20 * k as usize + 50);
    }

    #[test]
    fn runs_are_bit_for_bit_deterministic(r in 1.0f64..1e5, a in 0.0..2.0 * PI, k in 2u32..=30) {
        let Some(pl) = placed(treasure(r, a), k) else { return Ok(()) };
        let x = run(&pl).unwrap();
        let y = run(&pl.clone()).unwrap();
        prop_assert_eq!(x.total_cost.to_bits(), y.total_cost.to_bits());
        prop_assert_eq!(x, y);
    }

    #[test]
    fn main_runs_read_exactly_the_encoded_bits(r in 20.0f64..1e5, a in 0.0..2.0 * PI, k in 9u32..=30) {
        let t = treasure(r, a);
        let Some(pl) = placed(t, k) else { return Ok(()) };
        prop_assert_eq!(pl.case, Case::MainOutsideB);
        let res = run(&pl).unwrap();
        let d = res.decoded.clone().unwrap();
        prop_assert_eq!(d.mu.len() as u32, k - 7);
        prop_assert_eq!(Some(d.mu.clone()), pl.encoding.as_ref().map(|e| e.to_string()));
        prop_assert_eq!(Some(d.delta), sector_of(t, 1 << (k - 8), pl.fan_side()).ok());
        // heading legs, merging pass-through events on one heading
        prop_assert!(res.heading_leg_count() <= 4 * (k as usize - 6) + 3);
        let c = analytic_cost(t, k).unwrap();
        prop_assert!((c.decode - res.decode_cost).abs() <= 1e-9 * c.decode);
        prop_assert!((c.sector - res.sector_cost).abs() <= 1e-9 * c.sector);
    }

    /// The agent's choices depend on its observation sequence and nothing
    /// else: replaying the observations reproduces every heading, and two
    /// treasures with the same encoding see the same decode phase.
    #[test]
    fn strategy_sees_only_events(
        r1 in 20.0f64..1e4,
        r2 in 20.0f64..1e4,
        a in 0.05f64..0.45,
        k in 9u32..=16,
    ) {
        let n = 1u32 << (k - 8);
        let h = PI / f64::from(n);
        // two treasures in the sector around 45 degrees, off its edges
        let j = f64::from(n / 4);
        let t1 = treasure(r1, PI / 2.0 - h * (j + a));
        let t2 = treasure(r2, PI / 2.0 - h * (j + 1.0 - a));
        let (Some(p1), Some(p2)) = (placed(t1, k), placed(t2, k)) else { return Ok(()) };
        prop_assume!(p1.encoding == p2.encoding);
        let s = MainStrategy::new(k).unwrap();
        let start = Observation::StartSense { pebble_at_origin: p1.pebble(Role::P0).is_some() };
        let r1 = run(&p1).unwrap();
        let r2 = run(&p2).unwrap();
        let h1 = replay(&s, start, &r1);
        let recorded: Vec<f64> = r1.legs.iter().map(|l| l.heading.degrees()).collect();
        prop_assert_eq!(&h1, &recorded);
        let decode1: Vec<_> = r1.legs.iter().filter(|l| l.leg.kind.is_decode()).map(|l| (l.heading, l.leg)).collect();
        let decode2: Vec<_> = r2.legs.iter().filter(|l| l.leg.kind.is_decode()).map(|l| (l.heading, l.leg)).collect();
        prop_assert_eq!(decode1, decode2);
        let line1 = r1.legs.iter().find(|l| l.leg.kind == LegKind::Line).map(|l| l.heading);
        let line2 = r2.legs.iter().find(|l| l.leg.kind == LegKind::Line).map(|l| l.heading);
        prop_assert_eq!(line1, line2);
    }

    #[test]
    fn placement_invariants(r in 1.0f64..1e6, a in 0.0..2.0 * PI, k in 2u32..=30) {
        let t = treasure(r, a);
        let Some(pl) = placed(t, k) else { return Ok(()) };
        prop_assert!(pl.pebbles.len() <= k as usize);
        for (i, p) in pl.pebbles.iter().enumerate() {
            for q in &pl.pebbles[i + 1..] {
                if p.role != Role::FootPt && q.role != Role::FootPt {
                    prop_assert!(p.pos.distance(q.pos) >= 1.0 - 1e-9, "{:?} {:?}", p, q);
                }
            }
        }
        prop_assert_eq!(placement_from_json(&placement_to_json(&pl)).unwrap(), pl);
    }

    #[test]
    fn two_pebble_bound_holds(r in 1e-3f64..1e7, a in 0.0..2.0 * PI, k in 2u32..=8) {
        let t = treasure(r, a);
        let pl = place(&Instance::new(t, k).unwrap()).unwrap();
        let res = run(&pl).unwrap();
        prop_assert_eq!(res.status, RunStatus::Found);
        prop_assert!(res.total_cost <= cost_bound(r, k) + 1e-9 * r);
    }

    #[test]
    fn square_treasures_found_on_the_first_iteration(x in -1.0f64..=1.0, y in -1.0f64..=1.0, k in 9u32..=30) {
        let t = Point::new(x, y);
        prop_assume!(!t.is_origin());
        let pl = place(&Instance::new(t, k).unwrap()).unwrap();
        let res = run(&pl).unwrap();
        prop_assert_eq!(res.status, RunStatus::Found);
        prop_assert!(res.legs.iter().all(|l| l.leg.iteration <= 1));
        prop_assert!(res.heading_leg_count() <= 3);
        prop_assert!(res.total_cost <= cost_bound(t.norm(), k));
    }
}

#[test]
fn treasure_on_an_intermediate_leg_ends_the_run_early() {
    // on its own travel line the treasure shadows the foot pebble
    let t = Point::new(0.0, 40.0);
    let pl = place(&Instance::new(t, 12).unwrap()).unwrap();
    let res = run(&pl).unwrap();
    assert_eq!(res.status, RunStatus::Found);
    assert_eq!(res.legs.last().unwrap().leg.kind, LegKind::Line);
    let full = analytic_cost(t, 12).unwrap();
    assert!(res.total_cost <= full.total + 1e-9);

    // the square treasure on the axis is met before any pebble
    let pl = place(&Instance::new(Point::new(-0.5, 0.0), 9).unwrap()).unwrap();
    let res = run(&pl).unwrap();
    assert_eq!(res.legs.len(), 1);
    assert_eq!(res.total_cost, 0.5);
}
