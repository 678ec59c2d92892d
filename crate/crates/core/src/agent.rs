//! Agent strategies as observation-driven step functions.
//!
//! A strategy never sees coordinates. It receives one [`Observation`] per
//! event (plus the initial sense at the start point) and answers with a new
//! absolute heading or with [`Command::Done`]. Both strategies are pure: a
//! step consumes a state and returns the next one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{heading_of_line, Heading, Side};

/// Smallest budget served by the sector-encoding strategy.
pub const MIN_MAIN_K: u32 = 9;
/// Largest budget whose sector indices fit the `u128` index type.
pub const MAX_MAIN_K: u32 = 135;

/// Direction of the first leg, signalled by a pebble at the start point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// No pebble at the start: encoding pebbles lie on the positive x-axis.
    E,
    /// Pebble at the start: encoding pebbles lie on the negative x-axis.
    W,
}

impl Orientation {
    /// Half-plane holding the sector fan for this orientation.
    pub fn fan_side(self) -> Side {
        match self {
            Orientation::W => Side::Right,
            Orientation::E => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::E => "E",
            Orientation::W => "W",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observation {
    StartSense { pebble_at_origin: bool },
    AtOrigin,
    AtPebble,
    AtTreasure,
}

/// Role of a movement within a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LegKind {
    /// Along the x-axis away from the start, counting pebbles.
    Axis,
    /// From the counted axis pebble down (or up) to the anchor row.
    Slant,
    /// Diagonal back toward the start.
    Return,
    /// Along the x-axis toward the start.
    Home,
    /// Along the decoded sector line.
    Line,
    /// Perpendicular turn toward the treasure.
    Approach,
    /// Two-pebble strategy: north-east from the start.
    Diagonal,
    /// Two-pebble strategy: due west.
    West,
    /// Two-pebble strategy: due south.
    South,
}

impl LegKind {
    /// Whether the leg belongs to a decode iteration.
    pub fn is_decode(self) -> bool {
        matches!(
            self,
            LegKind::Axis | LegKind::Slant | LegKind::Return | LegKind::Home
        )
    }
}

/// Leg kind plus the decode iteration it belongs to (0 outside decoding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegTag {
    pub iteration: u32,
    pub kind: LegKind,
}

impl LegTag {
    pub fn new(iteration: u32, kind: LegKind) -> Self {
        LegTag { iteration, kind }
    }
}

impl fmt::Display for LegTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.iteration > 0 {
            write!(f, "{:?}#{}", self.kind, self.iteration)
        } else {
            write!(f, "{:?}", self.kind)
        }
    }
}

/// Move along `heading` until the next event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveCommand {
    pub heading: Heading,
    pub leg: LegTag,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    Move(MoveCommand),
    Done,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("protocol violation in {phase}: {reason} (observed {observation:?})")]
pub struct ProtocolViolation {
    pub phase: String,
    pub observation: Observation,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("decoded {got} bits, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("budget {0} outside the sector-encoding range")]
    Budget(u32),
}

/// What the main strategy learned from the pebbles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub mu: String,
    pub delta: u128,
    pub selector: bool,
    pub travel_line: u128,
}

/// An agent algorithm driven one observation at a time.
pub trait Strategy {
    type State: Clone + fmt::Debug;

    fn initial_state(&self) -> Self::State;

    fn step(
        &self,
        state: &Self::State,
        obs: Observation,
    ) -> Result<(Self::State, Command), ProtocolViolation>;

    fn decoded(&self, _state: &Self::State) -> Option<Decoded> {
        None
    }
}

/// Absolute headings of the decode legs and sector travel.
pub mod headings {
    use super::*;

    pub fn leg1(o: Orientation) -> Heading {
        match o {
            Orientation::W => Heading::WEST,
            Orientation::E => Heading::EAST,
        }
    }

    /// Slope `-1/(2j)` toward the anchor row.
    pub fn leg2(j: u32, o: Orientation) -> Heading {
        let run = 2.0 * j as f64;
        let h = Heading::from_vector(run, -1.0).expect("nonzero vector");
        match o {
            Orientation::W => h,
            Orientation::E => h.reversed(),
        }
    }

    pub fn leg3(o: Orientation) -> Heading {
        let h = Heading::from_vector(1.0, 1.0).expect("nonzero vector");
        match o {
            Orientation::W => h,
            Orientation::E => h.reversed(),
        }
    }

    pub fn leg4(o: Orientation) -> Heading {
        leg1(o).reversed()
    }

    pub fn line(val: u128, k: u32, o: Orientation) -> Heading {
        let n = 1u128 << (k - 8);
        heading_of_line(val, n, o.fan_side()).expect("line index within fan")
    }

    /// Quarter turn at the foot pebble: toward the treasure's side of the line.
    pub fn final_turn(line: Heading, selector: bool, o: Orientation) -> Heading {
        match (o, selector) {
            (Orientation::W, true) | (Orientation::E, false) => line.rotate_ccw(),
            (Orientation::W, false) | (Orientation::E, true) => line.rotate_cw(),
        }
    }
}

/// Headings of the slant, return and home legs of iteration `j`.
pub fn find_bit_legs(j: u32, o: Orientation) -> [Heading; 3] {
    [headings::leg2(j, o), headings::leg3(o), headings::leg4(o)]
}

/// Splits a decoded bit string into sector index and selector bit.
pub fn decode(bits: &[bool], k: u32) -> Result<(u128, bool), DecodeError> {
    if !(MIN_MAIN_K..=MAX_MAIN_K).contains(&k) {
        return Err(DecodeError::Budget(k));
    }
    let expected = (k - 7) as usize;
    if bits.len() != expected {
        return Err(DecodeError::LengthMismatch {
            got: bits.len(),
            expected,
        });
    }
    let delta = bits[1..]
        .iter()
        .fold(0u128, |acc, &b| (acc << 1) | b as u128);
    Ok((delta, bits[0]))
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Orient,
    Axis { j: u32, seen: u32 },
    Slant { j: u32 },
    Return { j: u32 },
    Home { j: u32 },
    Terminating { j: u32 },
    SectorTravel,
    FinalApproach,
    Done,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub phase: Phase,
    pub bits: Vec<bool>,
    pub orientation: Option<Orientation>,
    pub decoded: Option<Decoded>,
    line: Option<Heading>,
}

/// Decode-then-travel strategy for budgets `k >= 9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MainStrategy {
    k: u32,
}

impl MainStrategy {
    pub fn new(k: u32) -> Result<Self, DecodeError> {
        if (MIN_MAIN_K..=MAX_MAIN_K).contains(&k) {
            Ok(MainStrategy { k })
        } else {
            Err(DecodeError::Budget(k))
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn mu_len(&self) -> usize {
        (self.k - 7) as usize
    }
}

fn violation(phase: impl fmt::Debug, obs: Observation, reason: &str) -> ProtocolViolation {
    ProtocolViolation {
        phase: format!("{phase:?}"),
        observation: obs,
        reason: reason.to_string(),
    }
}

fn go(heading: Heading, iteration: u32, kind: LegKind) -> Command {
    Command::Move(MoveCommand {
        heading,
        leg: LegTag::new(iteration, kind),
    })
}

impl MainStrategy {
    fn push_bit(
        &self,
        state: &AgentState,
        bit: bool,
        j: u32,
        obs: Observation,
    ) -> Result<(AgentState, Command), ProtocolViolation> {
        let mut next = state.clone();
        next.bits.push(bit);
        if next.bits.len() > self.mu_len() {
            return Err(violation(
                state.phase,
                obs,
                "more bits than the budget can encode",
            ));
        }
        let o = state.orientation.expect("oriented before decoding");
        next.phase = Phase::Axis { j: j + 1, seen: 0 };
        Ok((next, go(headings::leg1(o), j + 1, LegKind::Axis)))
    }
}

impl Strategy for MainStrategy {
    type State = AgentState;

    fn initial_state(&self) -> AgentState {
        AgentState {
            phase: Phase::Orient,
            bits: Vec::new(),
            orientation: None,
            decoded: None,
            line: None,
        }
    }

    fn step(
        &self,
        state: &AgentState,
        obs: Observation,
    ) -> Result<(AgentState, Command), ProtocolViolation> {
        let phase = state.phase;
        if obs == Observation::AtTreasure {
            if phase == Phase::Orient || phase == Phase::Done {
                return Err(violation(
                    phase,
                    obs,
                    "treasure reported outside a movement",
                ));
            }
            let mut next = state.clone();
            next.phase = Phase::Done;
            return Ok((next, Command::Done));
        }
        let mut next = state.clone();
        match (phase, obs) {
            (Phase::Orient, Observation::StartSense { pebble_at_origin }) => {
                let o = if pebble_at_origin {
                    Orientation::W
                } else {
                    Orientation::E
                };
                next.orientation = Some(o);
                next.phase = Phase::Axis { j: 1, seen: 0 };
                Ok((next, go(headings::leg1(o), 1, LegKind::Axis)))
            }
            (_, Observation::StartSense { .. }) => {
                Err(violation(phase, obs, "start sense after the first step"))
            }
            (Phase::Orient, _) => Err(violation(
                phase,
                obs,
                "first observation must be the start sense",
            )),
            (Phase::Axis { j, seen }, Observation::AtPebble) => {
                let o = state.orientation.expect("oriented");
                let seen = seen + 1;
                if seen == j + 1 {
                    next.phase = Phase::Slant { j };
                    Ok((next, go(headings::leg2(j, o), j, LegKind::Slant)))
                } else {
                    next.phase = Phase::Axis { j, seen };
                    Ok((next, go(headings::leg1(o), j, LegKind::Axis)))
                }
            }
            (Phase::Slant { j }, Observation::AtPebble) => {
                let o = state.orientation.expect("oriented");
                next.phase = Phase::Return { j };
                Ok((next, go(headings::leg3(o), j, LegKind::Return)))
            }
            (Phase::Return { j }, Observation::AtOrigin) => self.push_bit(state, true, j, obs),
            (Phase::Return { j }, Observation::AtPebble) => {
                let o = state.orientation.expect("oriented");
                next.phase = Phase::Home { j };
                Ok((next, go(headings::leg4(o), j, LegKind::Home)))
            }
            (Phase::Home { j }, Observation::AtOrigin) => self.push_bit(state, false, j, obs),
            (Phase::Home { j }, Observation::AtPebble) => {
                // a pebble instead of the start: the encoding has ended
                let o = state.orientation.expect("oriented");
                next.phase = Phase::Terminating { j };
                Ok((next, go(headings::leg4(o), j, LegKind::Home)))
            }
            (Phase::Terminating { .. }, Observation::AtOrigin) => {
                let o = state.orientation.expect("oriented");
                let (delta, selector) = decode(&state.bits, self.k)
                    .map_err(|e| violation(phase, obs, &e.to_string()))?;
                let travel_line = if selector { delta + 1 } else { delta };
                let line = headings::line(travel_line, self.k, o);
                next.decoded = Some(Decoded {
                    mu: bits_to_string(&state.bits),
                    delta,
                    selector,
                    travel_line,
                });
                next.line = Some(line);
                next.phase = Phase::SectorTravel;
                Ok((next, go(line, 0, LegKind::Line)))
            }
            (Phase::SectorTravel, Observation::AtPebble) => {
                let o = state.orientation.expect("oriented");
                let line = state.line.expect("line chosen before travel");
                let selector = state.decoded.as_ref().map(|d| d.selector).unwrap_or(true);
                next.phase = Phase::FinalApproach;
                Ok((
                    next,
                    go(
                        headings::final_turn(line, selector, o),
                        0,
                        LegKind::Approach,
                    ),
                ))
            }
            _ => Err(violation(phase, obs, "event impossible in this phase")),
        }
    }

    fn decoded(&self, state: &AgentState) -> Option<Decoded> {
        state.decoded.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPhase {
    Start,
    Diagonal,
    West,
    South,
    Done,
}

/// Three-leg strategy for the two-pebble placement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TwoPebbleStrategy;

impl Strategy for TwoPebbleStrategy {
    type State = TwoPhase;

    fn initial_state(&self) -> TwoPhase {
        TwoPhase::Start
    }

    fn step(
        &self,
        state: &TwoPhase,
        obs: Observation,
    ) -> Result<(TwoPhase, Command), ProtocolViolation> {
        let diagonal = Heading::from_vector(1.0, 1.0).expect("nonzero vector");
        match (*state, obs) {
            (TwoPhase::Start, Observation::StartSense { .. }) => {
                Ok((TwoPhase::Diagonal, go(diagonal, 0, LegKind::Diagonal)))
            }
            (TwoPhase::Start, _) => Err(violation(
                state,
                obs,
                "first observation must be the start sense",
            )),
            (TwoPhase::Done, _) => Err(violation(state, obs, "already done")),
            (_, Observation::AtTreasure) => Ok((TwoPhase::Done, Command::Done)),
            (TwoPhase::Diagonal, Observation::AtPebble) => {
                Ok((TwoPhase::West, go(Heading::WEST, 0, LegKind::West)))
            }
            (TwoPhase::West, Observation::AtPebble) => {
                Ok((TwoPhase::South, go(Heading::SOUTH, 0, LegKind::South)))
            }
            // the southward leg may cross the start point on its way down
            (TwoPhase::South, Observation::AtOrigin) => {
                Ok((TwoPhase::South, go(Heading::SOUTH, 0, LegKind::South)))
            }
            _ => Err(violation(state, obs, "event impossible in this phase")),
        }
    }
}
