//! Treasure hunting in the plane with pebbles.
//!
//! An agent starts at the origin with a compass but no sense of distance. It
//! can only change direction where it touches something: a pebble, its start
//! point, or the treasure. An oracle that knows the treasure's position places
//! `k` pebbles to steer it there. This crate has the placement oracle, the
//! agent strategies, an event-driven simulator and a closed-form cost model.

pub mod agent;
pub mod cost;
pub mod experiments;
pub mod geometry;
pub mod oracle;
pub mod sim;

pub use agent::{Decoded, MainStrategy, Orientation, Strategy, TwoPebbleStrategy};
pub use cost::{analytic_cost, cost_bound, ratio_curve, CostBreakdown, KRule};
pub use geometry::{Heading, Point, Ray, Side, TolerancePolicy};
pub use oracle::{place, validate, Instance, Placement};
pub use sim::{run, RunLimits, RunResult, RunStatus};
