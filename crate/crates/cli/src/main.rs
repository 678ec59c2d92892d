use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pebblehunt::cost::{default_ratio_distances, ratio_curve, write_ratio_csv, KRule};
use pebblehunt::experiments::{sweep, write_sweep_csv, HalfPlane, SweepConfig};
use pebblehunt::geometry::{Point, TolerancePolicy};
use pebblehunt::oracle::{
    place, placement_from_json, placement_to_json, validate, Instance, Placement,
};
use pebblehunt::sim::{run_with, trace_csv, trace_svg, RunLimits, RunStatus, SvgOptions};
use pebblehunt::{analytic_cost, cost_bound};

const EXIT_FAILURE: u8 = 3;
const SEED_VAR: &str = "PEBBLEHUNT_SEED";

#[derive(Parser)]
#[command(
    name = "pebblehunt",
    version,
    about = "Pebble-guided treasure hunt: placement, runs, sweeps and plots"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Place pebbles for a treasure and print the placement as JSON.
    Place {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Write the placement here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the agent on a placement.
    Run {
        #[command(flatten)]
        src: Source,
        /// Write the full run result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check a placement: budget, separation and a dry run.
    Validate {
        #[command(flatten)]
        src: Source,
    },
    /// Seeded sweep over random treasures, one CSV row per run.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Budgets, e.g. `9..=24`, `9..25` or `2,9,12`.
        #[arg(long, default_value = "9..=24", value_parser = parse_k_set)]
        k_set: KSet,
        #[arg(long, default_value_t = 20.0)]
        d_min: f64,
        #[arg(long, default_value_t = 1e5)]
        d_max: f64,
        /// Samples per budget.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = HalfPlaneArg::Both)]
        half_plane: HalfPlaneArg,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cost over distance for growing distances.
    Ratio {
        /// Distances; defaults to 1e3, 1e4, ..., 1e8.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        d_list: Vec<f64>,
        /// `cuberoot` or a fixed budget such as `12`.
        #[arg(long, default_value = "cuberoot", value_parser = parse_k_rule)]
        k_rule: KRule,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a run as SVG and optionally CSV.
    Trace {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Leave out the sector lines.
        #[arg(long)]
        no_sectors: bool,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Treasure position `x,y`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    treasure: Point,
    /// Pebble budget.
    #[arg(long)]
    k: u32,
}

#[derive(Args)]
struct Source {
    /// Placement JSON produced by `place`.
    #[arg(long, conflicts_with_all = ["treasure", "k"])]
    placement: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point, requires = "k")]
    treasure: Option<Point>,
    #[arg(long, requires = "treasure")]
    k: Option<u32>,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    eps_rel: Option<f64>,
    #[arg(long)]
    eps_abs: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
}

impl TolArgs {
    fn policy(&self) -> Result<TolerancePolicy> {
        let d = TolerancePolicy::default();
        let tol = TolerancePolicy {
            eps_rel: self.eps_rel.unwrap_or(d.eps_rel),
            eps_abs: self.eps_abs.unwrap_or(d.eps_abs),
            t_min: self.t_min.unwrap_or(d.t_min),
        };
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HalfPlaneArg {
    Both,
    Right,
    Left,
}

impl From<HalfPlaneArg> for HalfPlane {
    fn from(h: HalfPlaneArg) -> Self {
        match h {
            HalfPlaneArg::Both => HalfPlane::Both,
            HalfPlaneArg::Right => HalfPlane::Right,
            HalfPlaneArg::Left => HalfPlane::Left,
        }
    }
}

#[derive(Clone, Debug)]
struct KSet(Vec<u32>);

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y: {e}"))?;
    Point::checked(x, y).map_err(|e| e.to_string())
}

fn parse_k_set(s: &str) -> Result<KSet, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(KSet(Vec::new()));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| format!("bad budget {t:?}: {e}"))
    };
    if let Some((a, b)) = s.split_once("..=") {
        return Ok(KSet((num(a)?..=num(b)?).collect()));
    }
    if let Some((a, b)) = s.split_once("..") {
        return Ok(KSet((num(a)?..num(b)?).collect()));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(KSet)
}

fn parse_k_rule(s: &str) -> Result<KRule, String> {
    match s.trim() {
        "cuberoot" => Ok(KRule::CubeRoot),
        other => other
            .strip_prefix("const:")
            .unwrap_or(other)
            .parse()
            .map(KRule::Constant)
            .map_err(|_| format!("expected `cuberoot` or a budget, got {other:?}")),
    }
}

fn load(src: &Source) -> Result<Placement> {
    match (&src.placement, src.treasure, src.k) {
        (Some(path), _, _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(
                placement_from_json(&text)
                    .with_context(|| format!("parsing {}", path.display()))?,
            )
        }
        (None, Some(t), Some(k)) => Ok(place(&Instance::new(t, k)?)?),
        _ => bail!("give either --placement or both --treasure and --k"),
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn cmd_place(inst: &InstanceArgs, out: Option<&Path>) -> Result<ExitCode> {
    let pl = place(&Instance::new(inst.treasure, inst.k)?)?;
    let mut doc = placement_to_json(&pl);
    doc.push('\n');
    write_out(out, doc.as_bytes())?;
    Ok(report_validation(&pl))
}

fn report_validation(pl: &Placement) -> ExitCode {
    let rep = validate(pl);
    eprintln!(
        "case {} | pebbles {}/{} | min separation {}",
        pl.case.as_str(),
        rep.pebble_count,
        rep.budget,
        rep.min_separation
            .map_or("-".to_string(), |d| format!("{d:.6}"))
    );
    for w in &rep.footpt_warnings {
        eprintln!(
            "warning: {} and {} are {:.6} apart",
            w.role_a, w.role_b, w.distance
        );
    }
    for v in &rep.separation_violations {
        eprintln!(
            "violation: {} and {} are {:.6} apart",
            v.role_a, v.role_b, v.distance
        );
    }
    eprintln!("script: {:?}", rep.script);
    if let Some(ok) = rep.decode_ok {
        eprintln!("decoded sector matches: {}", if ok { "yes" } else { "no" });
    }
    if rep.passed() {
        eprintln!("validation passed");
        ExitCode::SUCCESS
    } else {
        eprintln!("validation FAILED");
        ExitCode::from(EXIT_FAILURE)
    }
}

fn cmd_run(src: &Source, json: Option<&Path>, tol: &TolArgs) -> Result<ExitCode> {
    let pl = load(src)?;
    let r = run_with(&pl, &RunLimits::for_budget(pl.k), &tol.policy()?)?;
    if let Some(p) = json {
        fs::write(p, serde_json::to_string_pretty(&r)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let mut out = String::new();
    let d = pl.distance();
    let bound = cost_bound(d, pl.k);
    let _ = writeln!(out, "status      {}", r.status.as_str());
    let _ = writeln!(out, "case        {}", pl.case.as_str());
    let _ = writeln!(out, "distance    {d}");
    if let Some(dec) = &r.decoded {
        let _ = writeln!(out, "mu          {}", dec.mu);
        let _ = writeln!(out, "delta       {}", dec.delta);
        let _ = writeln!(out, "travel line L_{}", dec.travel_line);
    }
    if let Some(v) = &r.violation {
        let _ = writeln!(out, "violation   {v}");
    }
    let _ = writeln!(out, "legs        {}", r.legs.len());
    let _ = writeln!(out, "decode cost {}", r.decode_cost);
    let _ = writeln!(out, "sector cost {}", r.sector_cost);
    let _ = writeln!(out, "total cost  {}", r.total_cost);
    if let Ok(c) = analytic_cost(pl.treasure, pl.k) {
        let _ = writeln!(out, "analytic    {}", c.total);
    }
    let _ = writeln!(out, "bound       {bound}");
    let _ = writeln!(
        out,
        "within bound {}",
        if r.total_cost <= bound { "y" } else { "n" }
    );
    write_out(None, out.as_bytes())?;
    Ok(if r.status == RunStatus::Found {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn seed_override(seed: u64) -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_VAR}={v:?} is not a seed")),
        Err(std::env::VarError::NotPresent) => Ok(seed),
        Err(e) => Err(anyhow!("{SEED_VAR}: {e}")),
    }
}

fn cmd_trace(src: &Source, svg: &Path, csv: Option<&Path>, no_sectors: bool) -> Result<ExitCode> {
    let pl = load(src)?;
    let r = run_with(
        &pl,
        &RunLimits::for_budget(pl.k),
        &TolerancePolicy::default(),
    )?;
    let opts = SvgOptions {
        sector_lines: !no_sectors,
        ..SvgOptions::default()
    };
    fs::write(svg, trace_svg(&pl, &r, &opts))
        .with_context(|| format!("writing {}", svg.display()))?;
    if let Some(p) = csv {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        trace_csv(&r, f)?;
    }
    eprintln!("{} with {} legs", r.status.as_str(), r.legs.len());
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Place { inst, out } => cmd_place(&inst, out.as_deref()),
        Cmd::Run { src, json, tol } => cmd_run(&src, json.as_deref(), &tol),
        Cmd::Validate { src } => Ok(report_validation(&load(&src)?)),
        Cmd::Sweep {
            seed,
            k_set,
            d_min,
            d_max,
            samples,
            half_plane,
            tol,
            out,
        } => {
            let cfg = SweepConfig {
                seed: seed_override(seed)?,
                k_set: k_set.0,
                d_min,
                d_max,
                samples,
                half_plane: half_plane.into(),
                tol: tol.policy()?,
            };
            let rows = sweep(&cfg)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            write_out(out.as_deref(), &buf)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ratio {
            d_list,
            k_rule,
            out,
        } => {
            let ds = if d_list.is_empty() {
                default_ratio_distances()
            } else {
                d_list
            };
            let rows = ratio_curve(&ds, k_rule)?;
            let mut buf = Vec::new();
            write_ratio_csv(&rows, &mut buf)?;
            write_out(out.as_deref(), &buf)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Trace {
            src,
            svg,
            csv,
            no_sectors,
        } => cmd_trace(&src, &svg, csv.as_deref(), no_sectors),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("-0.5,2").unwrap(), Point::new(-0.5, 2.0));
        assert_eq!(parse_point(" 3 , -1e3 ").unwrap(), Point::new(3.0, -1000.0));
        assert!(parse_point("3").is_err());
        assert!(parse_point("nan,1").is_err());
    }

    #[test]
    fn budget_sets_parse() {
        assert_eq!(parse_k_set("9..=12").unwrap().0, vec![9, 10, 11, 12]);
        assert_eq!(parse_k_set("9..12").unwrap().0, vec![9, 10, 11]);
        assert_eq!(parse_k_set("2,9").unwrap().0, vec![2, 9]);
        assert!(parse_k_set("").unwrap().0.is_empty());
        assert!(parse_k_set("a").is_err());
    }

    #[test]
    fn budget_rules_parse() {
        assert_eq!(parse_k_rule("cuberoot").unwrap(), KRule::CubeRoot);
        assert_eq!(parse_k_rule("12").unwrap(), KRule::Constant(12));
        assert_eq!(parse_k_rule("const:12").unwrap(), KRule::Constant(12));
        assert!(parse_k_rule("cube").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
