//! Event-driven execution of a strategy against a placement.

mod export;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{trace_csv, trace_svg, SvgOptions};

use crate::agent::{
    Command, Decoded, LegTag, MainStrategy, Observation, Strategy, TwoPebbleStrategy, MIN_MAIN_K,
};
use crate::geometry::{
    first_event, GeometryError, Heading, Point, Ray, Site, SiteKind, TolerancePolicy,
};
use crate::oracle::Placement;

/// Largest budget the floating-point simulation accepts.
pub const MAX_SIM_K: u32 = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("budget k={k} exceeds the simulation limit {max}")]
    BudgetTooLarge { k: u32, max: u32 },
    #[error("budget k={0} has no strategy")]
    BudgetTooSmall(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventLabel {
    AtOrigin,
    AtPebble,
    AtTreasure,
}

impl EventLabel {
    fn observation(self) -> Observation {
        match self {
            EventLabel::AtOrigin => Observation::AtOrigin,
            EventLabel::AtPebble => Observation::AtPebble,
            EventLabel::AtTreasure => Observation::AtTreasure,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventLabel::AtOrigin => "AtOrigin",
            EventLabel::AtPebble => "AtPebble",
            EventLabel::AtTreasure => "AtTreasure",
        }
    }
}

/// One straight movement between consecutive events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceLeg {
    pub start: Point,
    pub heading: Heading,
    pub end: Point,
    pub event: EventLabel,
    /// Index into the placement's pebbles when the event is a pebble.
    pub pebble: Option<usize>,
    pub length: f64,
    pub leg: LegTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Found,
    Diverged,
    ProtocolViolation,
    LegLimit,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Found => "Found",
            RunStatus::Diverged => "Diverged",
            RunStatus::ProtocolViolation => "ProtocolViolation",
            RunStatus::LegLimit => "LegLimit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    pub max_legs: usize,
    pub max_coordinate: f64,
}

impl RunLimits {
    /// `20k + 50` legs.
    pub fn for_budget(k: u32) -> Self {
        RunLimits {
            max_legs: 20 * k as usize + 50,
            max_coordinate: crate::geometry::MAX_COORDINATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub status: RunStatus,
    pub total_cost: f64,
    pub decode_cost: f64,
    pub sector_cost: f64,
    pub legs: Vec<TraceLeg>,
    pub decoded: Option<Decoded>,
    pub violation: Option<String>,
    /// The ray the agent left on when the run diverged.
    pub escape: Option<Ray>,
}

impl RunResult {
    /// Decode cost per iteration, keyed by iteration number.
    pub fn iteration_costs(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for leg in self.legs.iter().filter(|l| l.leg.kind.is_decode()) {
            *out.entry(leg.leg.iteration).or_insert(0.0) += leg.length;
        }
        out
    }

    /// Number of straight movements, merging consecutive legs that continue
    /// on the same heading and leg kind.
    pub fn heading_leg_count(&self) -> usize {
        self.legs
            .windows(2)
            .filter(|w| w[0].heading != w[1].heading || w[0].leg.kind != w[1].leg.kind)
            .count()
            + usize::from(!self.legs.is_empty())
    }

    pub fn final_position(&self) -> Point {
        self.legs.last().map(|l| l.end).unwrap_or(Point::ORIGIN)
    }
}

/// Whether some pebble lies within `eps_abs` of the start point.
pub fn origin_has_pebble(pl: &Placement, tol: &TolerancePolicy) -> bool {
    pl.pebbles.iter().any(|p| p.pos.norm() <= tol.eps_abs)
}

fn sites(pl: &Placement) -> Vec<Site> {
    pl.pebbles
        .iter()
        .map(|p| Site::new(p.pos, SiteKind::Pebble))
        .chain([
            Site::new(Point::ORIGIN, SiteKind::OriginP),
            Site::new(pl.treasure, SiteKind::Treasure),
        ])
        .collect()
}

/// Runs `strategy` from the start point until the treasure is reached, the
/// agent escapes, the strategy rejects an event, or the leg limit is hit.
pub fn execute<S: Strategy>(
    pl: &Placement,
    strategy: &S,
    limits: &RunLimits,
    tol: &TolerancePolicy,
) -> Result<RunResult, SimError> {
    tol.validate()?;
    if pl.k > MAX_SIM_K {
        return Err(SimError::BudgetTooLarge {
            k: pl.k,
            max: MAX_SIM_K,
        });
    }
    let sites = sites(pl);
    let n_pebbles = pl.pebbles.len();

    let mut state = strategy.initial_state();
    let mut obs = Observation::StartSense {
        pebble_at_origin: origin_has_pebble(pl, tol),
    };
    let mut pos = Point::ORIGIN;
    let mut legs: Vec<TraceLeg> = Vec::new();
    let mut violation = None;
    let mut escape = None;

    let status = loop {
        let (next, cmd) = match strategy.step(&state, obs) {
            Ok(x) => x,
            Err(v) => {
                violation = Some(v.to_string());
                break RunStatus::ProtocolViolation;
            }
        };
        state = next;
        let mv = match cmd {
            Command::Done => {
                if obs == Observation::AtTreasure {
                    break RunStatus::Found;
                }
                violation = Some("strategy stopped away from the treasure".to_string());
                break RunStatus::ProtocolViolation;
            }
            Command::Move(mv) => mv,
        };
        if obs == Observation::AtTreasure {
            // reaching the treasure ends the hunt whatever the strategy says
            break RunStatus::Found;
        }
        if legs.len() >= limits.max_legs {
            break RunStatus::LegLimit;
        }
        let ray = Ray::new(pos, mv.heading);
        let Some(hit) = first_event(&ray, &sites, tol) else {
            escape = Some(ray);
            break RunStatus::Diverged;
        };
        let site = sites[hit.index];
        if site.point.x.abs() > limits.max_coordinate || site.point.y.abs() > limits.max_coordinate
        {
            escape = Some(ray);
            break RunStatus::Diverged;
        }
        let event = match site.kind {
            SiteKind::Pebble => EventLabel::AtPebble,
            SiteKind::OriginP => EventLabel::AtOrigin,
            SiteKind::Treasure => EventLabel::AtTreasure,
        };
        legs.push(TraceLeg {
            start: pos,
            heading: mv.heading,
            end: site.point,
            event,
            pebble: (hit.index < n_pebbles).then_some(hit.index),
            length: pos.distance(site.point),
            leg: mv.leg,
        });
        pos = site.point;
        obs = event.observation();
    };

    // folding from +0.0: an empty f64 sum is -0.0
    let cost = |decode: bool| {
        legs.iter()
            .filter(|l| l.leg.kind.is_decode() == decode)
            .fold(0.0, |acc, l| acc + l.length)
    };
    let (decode_cost, sector_cost) = (cost(true), cost(false));
    Ok(RunResult {
        status,
        total_cost: decode_cost + sector_cost,
        decode_cost,
        sector_cost,
        legs,
        decoded: strategy.decoded(&state),
        violation,
        escape,
    })
}

/// Runs the strategy matching the placement's budget with default limits.
pub fn run(pl: &Placement) -> Result<RunResult, SimError> {
    run_with(
        pl,
        &RunLimits::for_budget(pl.k),
        &TolerancePolicy::default(),
    )
}

pub fn run_with(
    pl: &Placement,
    limits: &RunLimits,
    tol: &TolerancePolicy,
) -> Result<RunResult, SimError> {
    if pl.k < 2 {
        return Err(SimError::BudgetTooSmall(pl.k));
    }
    if pl.k < MIN_MAIN_K {
        execute(pl, &TwoPebbleStrategy, limits, tol)
    } else {
        let strategy = MainStrategy::new(pl.k).map_err(|_| SimError::BudgetTooLarge {
            k: pl.k,
            max: MAX_SIM_K,
        })?;
        execute(pl, &strategy, limits, tol)
    }
}
