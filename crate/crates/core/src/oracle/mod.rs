//! The oracle: given the treasure and a pebble budget, decide where pebbles go.
//!
//! Budgets 2..=8 use the two-pebble layout. From 9 pebbles on, a treasure
//! outside the square `B = [-1, 1]^2` is encoded as a sector index on the
//! x-axis opposite its half-plane; treasures inside `B` get the 3-4 pebble
//! square layout.

mod json;
mod script;
mod square;
mod two;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::agent::Orientation;
use crate::agent::{MAX_MAIN_K, MIN_MAIN_K};
use crate::geometry::{
    foot_of_perpendicular, heading_of_line, on_ray, sector_of, GeometryError, Point, Ray, Side,
    TolerancePolicy,
};

pub use json::{placement_from_json, placement_to_json};
pub use script::{Expect, ScriptStep};
pub use square::{place_square, SquareConstruction};
pub use two::{place_two, TwoPebbleLayout};
pub use validate::{validate, PairIssue, ScriptCheck, ScriptMismatch, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("budget k={k} is below the minimum {min} for this construction")]
    BudgetTooSmall { k: u32, min: u32 },
    #[error("budget k={k} exceeds the supported maximum {max}")]
    BudgetTooLarge { k: u32, max: u32 },
    #[error("sector index {index} does not fit in {width} bits")]
    IndexOutOfRange { index: u128, width: u32 },
    #[error("treasure must differ from the start point")]
    TreasureAtOrigin,
    #[error("foot of the perpendicular is degenerate: {0}")]
    DegenerateSector(String),
    #[error("square construction is degenerate: {0}")]
    DegenerateConstruction(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("malformed placement document: {0}")]
    Format(String),
}

/// Treasure position and pebble budget; the start point is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    treasure: Point,
    k: u32,
}

impl Instance {
    pub fn new(treasure: Point, k: u32) -> Result<Self, OracleError> {
        if !treasure.is_valid() {
            return Err(GeometryError::InvalidPoint {
                x: treasure.x,
                y: treasure.y,
            }
            .into());
        }
        if treasure.is_origin() {
            return Err(OracleError::TreasureAtOrigin);
        }
        if k < 2 {
            return Err(OracleError::BudgetTooSmall { k, min: 2 });
        }
        Ok(Instance { treasure, k })
    }

    pub fn treasure(&self) -> Point {
        self.treasure
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Distance from the start to the treasure.
    pub fn distance(&self) -> f64 {
        self.treasure.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    P0,
    P1,
    P2,
    P3,
    Bit(u32),
    Term1,
    Term2,
    FootPt,
    TwoA,
    TwoB,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::P0 => f.write_str("P0"),
            Role::P1 => f.write_str("P1"),
            Role::P2 => f.write_str("P2"),
            Role::P3 => f.write_str("P3"),
            Role::Bit(l) => write!(f, "Bit{l}"),
            Role::Term1 => f.write_str("Term1"),
            Role::Term2 => f.write_str("Term2"),
            Role::FootPt => f.write_str("FootPT"),
            Role::TwoA => f.write_str("TwoA"),
            Role::TwoB => f.write_str("TwoB"),
        }
    }
}

impl FromStr for Role {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "P0" => Role::P0,
            "P1" => Role::P1,
            "P2" => Role::P2,
            "P3" => Role::P3,
            "Term1" => Role::Term1,
            "Term2" => Role::Term2,
            "FootPT" => Role::FootPt,
            "TwoA" => Role::TwoA,
            "TwoB" => Role::TwoB,
            other => match other.strip_prefix("Bit").map(str::parse::<u32>) {
                Some(Ok(l)) if l >= 1 => Role::Bit(l),
                _ => {
                    return Err(OracleError::Format(format!(
                        "unknown pebble role {other:?}"
                    )))
                }
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pebble {
    pub pos: Point,
    pub role: Role,
}

impl Pebble {
    pub fn new(x: f64, y: f64, role: Role) -> Self {
        Pebble {
            pos: Point::new(x, y),
            role,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    TwoPebble,
    MainOutsideB,
    SquareRight,
    SquareLeft,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::TwoPebble => "TwoPebble",
            Case::MainOutsideB => "MainOutsideB",
            Case::SquareRight => "SquareRight",
            Case::SquareLeft => "SquareLeft",
        }
    }
}

impl FromStr for Case {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TwoPebble" => Ok(Case::TwoPebble),
            "MainOutsideB" => Ok(Case::MainOutsideB),
            "SquareRight" => Ok(Case::SquareRight),
            "SquareLeft" => Ok(Case::SquareLeft),
            other => Err(OracleError::Format(format!("unknown case {other:?}"))),
        }
    }
}

/// Selector bit followed by the big-endian sector index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    mu: Vec<bool>,
}

impl Encoding {
    pub fn from_bits(mu: Vec<bool>) -> Result<Self, OracleError> {
        if mu.len() < 2 || mu.len() > (MAX_MAIN_K - 7) as usize {
            return Err(OracleError::Format(format!(
                "encoding length {} out of range",
                mu.len()
            )));
        }
        Ok(Encoding { mu })
    }

    pub fn parse(s: &str) -> Result<Self, OracleError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(OracleError::Format(format!("bad bit {c:?} in mu"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Encoding::from_bits(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn selector(&self) -> bool {
        self.mu[0]
    }

    /// Number of bits carrying the sector index.
    pub fn width(&self) -> u32 {
        (self.mu.len() - 1) as u32
    }

    pub fn sector_index(&self) -> u128 {
        self.mu[1..]
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | b as u128)
    }

    /// Budget this encoding was built for.
    pub fn budget(&self) -> u32 {
        self.mu.len() as u32 + 7
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::agent::bits_to_string(&self.mu))
    }
}

/// Encodes sector `j` in `k - 8` bits behind the selector bit.
pub fn encode_sector(j: u128, k: u32, selector: bool) -> Result<Encoding, OracleError> {
    if k < MIN_MAIN_K {
        return Err(OracleError::BudgetTooSmall { k, min: MIN_MAIN_K });
    }
    if k > MAX_MAIN_K {
        return Err(OracleError::BudgetTooLarge { k, max: MAX_MAIN_K });
    }
    let width = k - 8;
    if width < 128 && j >> width != 0 {
        return Err(OracleError::IndexOutOfRange { index: j, width });
    }
    let mut mu = Vec::with_capacity(width as usize + 1);
    mu.push(selector);
    mu.extend((0..width).rev().map(|b| (j >> b) & 1 == 1));
    Ok(Encoding { mu })
}

/// A labelled pebble set plus the construction metadata needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub k: u32,
    pub treasure: Point,
    pub orientation: Orientation,
    pub case: Case,
    pub encoding: Option<Encoding>,
    pub pebbles: Vec<Pebble>,
    pub travel_line: Option<u128>,
}

impl Placement {
    pub fn pebble(&self, role: Role) -> Option<&Pebble> {
        self.pebbles.iter().find(|p| p.role == role)
    }

    pub fn distance(&self) -> f64 {
        self.treasure.norm()
    }

    /// Number of sectors in the fan, for main placements.
    pub fn sector_count(&self) -> Option<u128> {
        (self.case == Case::MainOutsideB).then(|| 1u128 << (self.k - 8))
    }

    pub fn fan_side(&self) -> Side {
        self.orientation.fan_side()
    }

    /// Copy with the pebble at `index` removed.
    pub fn without_pebble(&self, index: usize) -> Placement {
        let mut pl = self.clone();
        pl.pebbles.remove(index);
        pl
    }
}

/// Whether `p` lies in the closed square `[-1, 1]^2`.
pub fn in_square(p: Point) -> bool {
    p.x.abs() <= 1.0 && p.y.abs() <= 1.0
}

/// Selector bit: 0 only for treasures in the strip just above `B` on their side.
pub fn selector_bit(t: Point) -> bool {
    let strip = match Side::of(t) {
        Side::Right => t.x <= 1.0,
        Side::Left => t.x >= -1.0,
    };
    !(strip && t.y > 1.0)
}

/// Dispatches on the budget: two pebbles up to 8, the sector encoding from 9.
pub fn place(inst: &Instance) -> Result<Placement, OracleError> {
    if inst.k() < MIN_MAIN_K {
        Ok(place_two(inst))
    } else if in_square(inst.treasure()) {
        place_square(inst.treasure(), inst.k())
    } else {
        place_main(inst)
    }
}

/// Sector-encoding placement for `k >= 9`; treasures inside `B` are handed
/// to [`place_square`].
pub fn place_main(inst: &Instance) -> Result<Placement, OracleError> {
    let k = inst.k();
    if k < MIN_MAIN_K {
        return Err(OracleError::BudgetTooSmall { k, min: MIN_MAIN_K });
    }
    if k > MAX_MAIN_K {
        return Err(OracleError::BudgetTooLarge { k, max: MAX_MAIN_K });
    }
    let t = inst.treasure();
    if in_square(t) {
        return place_square(t, k);
    }
    let side = Side::of(t);
    let orientation = match side {
        Side::Right => Orientation::W,
        Side::Left => Orientation::E,
    };
    let n = 1u128 << (k - 8);
    let delta = sector_of(t, n, side)?;
    let selector = selector_bit(t);
    let encoding = encode_sector(delta, k, selector)?;
    let travel_line = if selector { delta + 1 } else { delta };
    let foot = foot_pebble(t, travel_line, n, side)?;

    // encoding pebbles sit on the axis opposite the treasure
    let s = match orientation {
        Orientation::W => -1.0,
        Orientation::E => 1.0,
    };
    let mut pebbles = Vec::with_capacity(k as usize);
    if orientation == Orientation::W {
        pebbles.push(Pebble::new(0.0, 0.0, Role::P0));
    }
    pebbles.push(Pebble::new(s, 0.0, Role::P1));
    pebbles.push(Pebble::new(s, s, Role::P2));
    pebbles.push(Pebble::new(2.0 * s, s, Role::P3));
    for (i, &bit) in encoding.bits().iter().enumerate() {
        let l = i as f64 + 1.0;
        let x = if bit { 2.0 * l + 1.0 } else { 2.0 * l + 2.0 };
        pebbles.push(Pebble::new(s * x, 0.0, Role::Bit(i as u32 + 1)));
    }
    let m = encoding.len() as f64;
    let (t1, t2) = if selector {
        (4.0, 2.0 * m + 6.0)
    } else {
        (5.0, 2.0 * m + 7.0)
    };
    pebbles.push(Pebble::new(s * t1, s, Role::Term1));
    pebbles.push(Pebble::new(s * t2, 0.0, Role::Term2));
    pebbles.push(Pebble {
        pos: foot,
        role: Role::FootPt,
    });

    Ok(Placement {
        k,
        treasure: t,
        orientation,
        case: Case::MainOutsideB,
        encoding: Some(encoding),
        pebbles,
        travel_line: Some(travel_line),
    })
}

/// Foot of the perpendicular from `t` on line `travel_line`. A treasure lying
/// on the line (within the on-ray tolerance) shares its position with the foot.
fn foot_pebble(t: Point, travel_line: u128, n: u128, side: Side) -> Result<Point, OracleError> {
    let tol = TolerancePolicy::default();
    let u = heading_of_line(travel_line, n, side)?;
    let foot =
        foot_of_perpendicular(t, &u).map_err(|e| OracleError::DegenerateSector(e.to_string()))?;
    if on_ray(t, &Ray::new(Point::ORIGIN, u), &tol).is_some() {
        return Ok(t);
    }
    if foot.norm() <= tol.offset_at(t.norm()).max(tol.t_min) {
        return Err(OracleError::DegenerateSector(format!(
            "foot of {t} on line {travel_line} coincides with the start point"
        )));
    }
    Ok(foot)
}
