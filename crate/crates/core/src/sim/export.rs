//! CSV and SVG renderings of a run.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{RunResult, RunStatus};
use crate::geometry::heading_of_line;
use crate::oracle::Placement;

#[derive(Serialize)]
struct LegRow {
    start_x: f64,
    start_y: f64,
    heading_deg: f64,
    end_x: f64,
    end_y: f64,
    event: &'static str,
    length: f64,
}

/// One row per leg: `start_x,start_y,heading_deg,end_x,end_y,event,length`.
pub fn trace_csv<W: Write>(run: &RunResult, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for leg in &run.legs {
        w.serialize(LegRow {
            start_x: leg.start.x,
            start_y: leg.start.y,
            heading_deg: leg.heading.degrees(),
            end_x: leg.end.x,
            end_y: leg.end.y,
            event: leg.event.as_str(),
            length: leg.length,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Draw the sector lines of the fan (only when there are few of them).
    pub sector_lines: bool,
    /// Pixels per unit.
    pub scale: f64,
    /// Length of the drawn escape segment for a diverged run, in units.
    pub escape_length: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            sector_lines: true,
            scale: 20.0,
            escape_length: 10.0,
        }
    }
}

const MAX_DRAWN_LINES: u128 = 64;

struct Bounds {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Bounds {
    fn add(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.max_x = self.max_x.max(x);
        self.min_y = self.min_y.min(y);
        self.max_y = self.max_y.max(y);
    }
}

fn f(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

/// Standalone SVG 1.1 drawing of the placement and the path. The y-axis
/// points up.
pub fn trace_svg(pl: &Placement, run: &RunResult, opts: &SvgOptions) -> String {
    let mut b = Bounds {
        min_x: -1.0,
        max_x: 1.0,
        min_y: -1.0,
        max_y: 1.0,
    };
    b.add(pl.treasure.x, pl.treasure.y);
    for p in &pl.pebbles {
        b.add(p.pos.x, p.pos.y);
    }
    for l in &run.legs {
        b.add(l.end.x, l.end.y);
    }
    let escape_end = run
        .escape
        .filter(|_| run.status == RunStatus::Diverged)
        .map(|r| {
            let reach = opts.escape_length.min(crate::geometry::MAX_COORDINATE);
            (r.origin, r.at(reach))
        });
    if let Some((_, e)) = escape_end {
        b.add(e.x, e.y);
    }
    let pad = 1.0;
    let (x0, y1) = (b.min_x - pad, b.max_y + pad);
    let w = (b.max_x - b.min_x + 2.0 * pad) * opts.scale;
    let h = (b.max_y - b.min_y + 2.0 * pad) * opts.scale;
    let sx = |x: f64| (x - x0) * opts.scale;
    let sy = |y: f64| (y1 - y) * opts.scale;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        f(w),
        f(h),
        f(w),
        f(h)
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    // axes
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ccc\" stroke-width=\"1\"/>",
        f(sx(b.min_x - pad)),
        f(sy(0.0)),
        f(sx(b.max_x + pad)),
        f(sy(0.0))
    );
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ccc\" stroke-width=\"1\"/>",
        f(sx(0.0)),
        f(sy(b.min_y - pad)),
        f(sx(0.0)),
        f(sy(b.max_y + pad))
    );

    if opts.sector_lines {
        if let Some(n) = pl.sector_count().filter(|&n| n <= MAX_DRAWN_LINES) {
            let reach = (b.max_x - b.min_x).max(b.max_y - b.min_y) + pad;
            let _ = writeln!(
                s,
                "<g stroke=\"#9cf\" stroke-width=\"0.5\" stroke-dasharray=\"4 3\">"
            );
            for i in 0..=n {
                let Ok(u) = heading_of_line(i, n, pl.fan_side()) else {
                    continue;
                };
                let _ = writeln!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    f(sx(0.0)),
                    f(sy(0.0)),
                    f(sx(u.ux() * reach)),
                    f(sy(u.uy() * reach))
                );
            }
            s.push_str("</g>\n");
        }
    }

    if !run.legs.is_empty() {
        let mut pts = vec![format!(
            "{},{}",
            f(sx(run.legs[0].start.x)),
            f(sy(run.legs[0].start.y))
        )];
        pts.extend(
            run.legs
                .iter()
                .map(|l| format!("{},{}", f(sx(l.end.x)), f(sy(l.end.y)))),
        );
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
    }
    if let Some((a, e)) = escape_end {
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c33\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>",
            f(sx(a.x)),
            f(sy(a.y)),
            f(sx(e.x)),
            f(sy(e.y))
        );
        let _ = writeln!(
            s,
            "<polygon points=\"{},{} {},{} {},{} {},{}\" fill=\"#c33\"><title>escape</title></polygon>",
            f(sx(e.x) - 5.0),
            f(sy(e.y)),
            f(sx(e.x)),
            f(sy(e.y) - 5.0),
            f(sx(e.x) + 5.0),
            f(sy(e.y)),
            f(sx(e.x)),
            f(sy(e.y) + 5.0)
        );
    }

    let r = 0.15 * opts.scale;
    for p in &pl.pebbles {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#333\"><title>{}</title></circle>",
            f(sx(p.pos.x)),
            f(sy(p.pos.y)),
            f(r),
            p.role
        );
    }
    let (tx, ty) = (sx(pl.treasure.x), sy(pl.treasure.y));
    let arm = 0.3 * opts.scale;
    let _ = writeln!(
        s,
        "<path d=\"M {} {} L {} {} M {} {} L {} {}\" stroke=\"#080\" stroke-width=\"2\"/>",
        f(tx - arm),
        f(ty - arm),
        f(tx + arm),
        f(ty + arm),
        f(tx - arm),
        f(ty + arm),
        f(tx + arm),
        f(ty - arm)
    );
    s.push_str("</svg>\n");
    s
}
