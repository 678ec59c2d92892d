//! Closed-form path lengths and bounds.
//!
//! Everything here is computed from coordinates and the bit string alone, so
//! it serves budgets far beyond what the floating-point simulator handles.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{MAX_MAIN_K, MIN_MAIN_K};
use crate::geometry::{heading_of_line, sector_of, GeometryError, Point, Side};
use crate::oracle::{in_square, selector_bit};

#[derive(Debug, Error)]
pub enum CostError {
    #[error("budget k={k} is below the minimum {min}")]
    BudgetTooSmall { k: u32, min: u32 },
    #[error("budget k={k} exceeds the supported maximum {max}")]
    BudgetTooLarge { k: u32, max: u32 },
    #[error("treasure {0} lies inside the square")]
    InsideSquare(Point),
    #[error("distance must be positive and finite, got {0}")]
    BadDistance(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub decode: f64,
    pub sector: f64,
    pub total: f64,
    pub bound_total: f64,
    pub theta_prime: f64,
    /// Decode cost of each iteration, the last one being termination.
    pub iterations: Vec<f64>,
}

/// Sector angle `pi / 2^(k-8)`.
pub fn theta_prime(k: u32) -> f64 {
    PI / 2f64.powi(k as i32 - 8)
}

/// Upper bound on the cost for distance `d` and budget `k`.
pub fn cost_bound(d: f64, k: u32) -> f64 {
    let kk = k as f64;
    match k {
        0..=8 => 4.5 * d + SQRT_2 + 2.0,
        9 => 2.0 * kk * kk + SQRT_2 * d,
        _ => {
            let t = theta_prime(k);
            2.0 * kk * kk + d * (t.sin() + t.cos())
        }
    }
}

/// Per-iteration decode lengths for the bit string `mu` (selector first).
///
/// Iteration `j` walks to the axis pebble at `2j+1` (bit 1) or `2j+2` (bit 0),
/// slants `sqrt(4j^2+1)` to the anchor row and returns diagonally `sqrt 2`;
/// a 0 bit lands one unit short of the start. Termination walks to the
/// terminator at `2m+6` or `2m+7`, then back through `Bit1` and `p1`.
pub fn decode_iterations(mu: &[bool]) -> Vec<f64> {
    let slant = |j: f64| (4.0 * j * j + 1.0).sqrt();
    let mut out: Vec<f64> = mu
        .iter()
        .enumerate()
        .map(|(i, &bit)| {
            let j = i as f64 + 1.0;
            if bit {
                (2.0 * j + 1.0) + slant(j) + SQRT_2
            } else {
                (2.0 * j + 2.0) + slant(j) + SQRT_2 + 1.0
            }
        })
        .collect();
    let m = mu.len() as f64;
    let selector = mu.first().copied().unwrap_or(true);
    let (axis, back) = if selector {
        (2.0 * m + 6.0, 3.0)
    } else {
        (2.0 * m + 7.0, 4.0)
    };
    out.push(axis + slant(m + 1.0) + SQRT_2 + back);
    out
}

pub fn decode_cost_for_bits(mu: &[bool]) -> f64 {
    decode_iterations(mu).iter().sum()
}

fn breakdown(iterations: Vec<f64>, sector: f64, d: f64, k: u32) -> CostBreakdown {
    let decode: f64 = iterations.iter().sum();
    CostBreakdown {
        decode,
        sector,
        total: decode + sector,
        bound_total: cost_bound(d, k),
        theta_prime: theta_prime(k),
        iterations,
    }
}

/// Exact cost of the main strategy on treasure `t` with budget `k`.
pub fn analytic_cost(t: Point, k: u32) -> Result<CostBreakdown, CostError> {
    if k < MIN_MAIN_K {
        return Err(CostError::BudgetTooSmall { k, min: MIN_MAIN_K });
    }
    if k > MAX_MAIN_K {
        return Err(CostError::BudgetTooLarge { k, max: MAX_MAIN_K });
    }
    if in_square(t) {
        return Err(CostError::InsideSquare(t));
    }
    let side = Side::of(t);
    let n = 1u128 << (k - 8);
    let delta = sector_of(t, n, side)?;
    let selector = selector_bit(t);
    let mut mu = Vec::with_capacity(k as usize - 7);
    mu.push(selector);
    mu.extend((0..k - 8).rev().map(|b| (delta >> b) & 1 == 1));

    let line = heading_of_line(delta + selector as u128, n, side)?.as_point();
    let along = t.dot(line);
    let across = t.cross(line).abs();
    Ok(breakdown(
        decode_iterations(&mu),
        along + across,
        t.norm(),
        k,
    ))
}

/// How the budget grows with the distance in the ratio experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KRule {
    /// `floor(D^(1/3))`, at least 9.
    CubeRoot,
    Constant(u32),
}

impl KRule {
    pub fn budget(self, d: f64) -> u32 {
        match self {
            KRule::CubeRoot => (icbrt(d.floor() as u64) as u32).max(MIN_MAIN_K),
            KRule::Constant(k) => k,
        }
    }
}

/// Integer cube root, rounding down.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r.checked_pow(3).is_none_or(|c| c > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(3).is_some_and(|c| c <= n) {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    #[serde(rename = "D")]
    pub d: f64,
    pub k: u32,
    pub theta_prime: f64,
    pub decode: f64,
    pub sector: f64,
    pub total: f64,
    pub ratio: f64,
}

/// Worst-case cost over distance: the treasure sits mid-sector 0 of the right
/// fan at distance `d`, whose encoding is all zeros behind the selector.
pub fn ratio_point(d: f64, k: u32) -> Result<RatioRow, CostError> {
    if k < MIN_MAIN_K {
        return Err(CostError::BudgetTooSmall { k, min: MIN_MAIN_K });
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(CostError::BadDistance(d));
    }
    let th = theta_prime(k);
    let half = th / 2.0;
    let t = Point::new(d * half.sin(), d * half.cos());
    if in_square(t) {
        return Err(CostError::InsideSquare(t));
    }
    let selector = selector_bit(t);
    let mut mu = vec![false; k as usize - 7];
    mu[0] = selector;
    // the travel line is either boundary of the sector, both at half the angle
    let sector = d * (half.cos() + half.sin());
    let b = breakdown(decode_iterations(&mu), sector, d, k);
    Ok(RatioRow {
        d,
        k,
        theta_prime: th,
        decode: b.decode,
        sector: b.sector,
        total: b.total,
        ratio: b.total / d,
    })
}

pub fn ratio_curve(ds: &[f64], rule: KRule) -> Result<Vec<RatioRow>, CostError> {
    ds.iter().map(|&d| ratio_point(d, rule.budget(d))).collect()
}

/// Distances `10^3, 10^4, ..., 10^8`.
pub fn default_ratio_distances() -> Vec<f64> {
    (3..=8).map(|e| 10f64.powi(e)).collect()
}

pub fn write_ratio_csv<W: Write>(rows: &[RatioRow], out: W) -> Result<(), CostError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
