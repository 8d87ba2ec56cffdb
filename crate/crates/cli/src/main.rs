//! `fanstate`: states, squeezing scans, landmark reports, flower profiles,
//! uncertainty areas and label geometry as CSV or JSON.

mod output;

use std::f64::consts::PI;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fanstate_core::analysis::{critical_report, flower_profile, wings, AnalysisOptions, Evaluator};
use fanstate_core::squeezing::{headroom_for, is_supported, squeeze_analytic, squeeze_closed_form, squeeze_numeric};
use fanstate_core::states::{
    build_fan_with, build_kncs, build_ncs, build_sekncs_with, coherent, geometry_points, GeometryMode, KncsSpec,
    Truncation,
};
use fanstate_core::uncertainty::area_report;
use fanstate_core::{number_distribution, Error, FockVector, NonlinearFn, C64};
use serde_json::json;

use output::{emit_object, Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "fanstate", version, about = "Fan-states and higher-order amplitude squeezing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fock amplitudes and number distribution of a state.
    State(StateArgs),
    /// S(φ) on a uniform φ grid.
    Squeeze(SqueezeArgs),
    /// Critical and optimal amplitudes with squeezing directions (JSON).
    Report(ReportArgs),
    /// Polar (φ, S) profile.
    Flower(FlowerArgs),
    /// Uncertainty area, moment formula against quadrature.
    Area(AreaArgs),
    /// NCS circle or SEKNCS fan label points.
    Geometry(GeometryArgs),
}

#[derive(Debug, Args)]
struct Sink {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Angles on output in degrees.
    #[arg(long)]
    degrees: bool,
}

impl Sink {
    fn angle(&self, rad: f64) -> f64 {
        if self.degrees {
            rad.to_degrees()
        } else {
            rad
        }
    }

    fn unit(&self) -> &'static str {
        if self.degrees {
            "deg"
        } else {
            "rad"
        }
    }

    fn path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    Kncs,
    Sekncs,
    Fan,
    Ncs,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvaluatorArg {
    ClosedForm,
    Printed,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Chi,
    Xiq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cutoff {
    Auto,
    Fixed(usize),
}

fn parse_cutoff(s: &str) -> Result<Cutoff, String> {
    if s == "auto" {
        return Ok(Cutoff::Auto);
    }
    s.parse().map(Cutoff::Fixed).map_err(|_| format!("expected 'auto' or a nonnegative integer, got '{s}'"))
}

impl Cutoff {
    fn truncation(self, headroom: usize) -> Truncation {
        match self {
            Cutoff::Auto => Truncation::adaptive(headroom),
            Cutoff::Fixed(c) => Truncation::fixed(c, headroom),
        }
    }

    fn label(self) -> serde_json::Value {
        match self {
            Cutoff::Auto => json!("auto"),
            Cutoff::Fixed(c) => json!(c),
        }
    }
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long, value_enum, default_value_t = StateKind::Fan)]
    kind: StateKind,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// |ξ|
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    /// arg ξ in radians.
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    /// Nonlinearity: unit or inv-sqrt.
    #[arg(long, default_value = "unit")]
    f: String,
    #[arg(long, default_value = "auto", value_parser = parse_cutoff)]
    cutoff: Cutoff,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct SqueezeArgs {
    /// fan or coherent.
    #[arg(long, value_enum, default_value_t = StateKind::Fan)]
    kind: StateKind,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    /// φ points per turn.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value = "unit")]
    f: String,
    #[arg(long, default_value = "auto", value_parser = parse_cutoff)]
    cutoff: Cutoff,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct Search {
    #[arg(long, value_enum, default_value_t = EvaluatorArg::ClosedForm)]
    evaluator: EvaluatorArg,
    /// Shorthand for `--evaluator numeric`.
    #[arg(long)]
    numeric: bool,
    #[arg(long, default_value = "auto", value_parser = parse_cutoff)]
    cutoff: Cutoff,
}

impl Search {
    fn evaluator(&self, n: usize) -> Evaluator {
        match (self.numeric, self.evaluator) {
            (true, _) | (_, EvaluatorArg::Numeric) => Evaluator::Numeric(self.cutoff.truncation(headroom_for(n).headroom)),
            (_, EvaluatorArg::ClosedForm) => Evaluator::ClosedForm,
            (_, EvaluatorArg::Printed) => Evaluator::Printed,
        }
    }
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    bracket_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    bracket_hi: f64,
    #[command(flatten)]
    search: Search,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    degrees: bool,
}

#[derive(Debug, Args)]
struct FlowerArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 0.659657)]
    xi: f64,
    #[arg(long, default_value_t = 360)]
    grid: usize,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct AreaArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    xi: f64,
    /// Quadrature points per period.
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[arg(long, default_value = "auto", value_parser = parse_cutoff)]
    cutoff: Cutoff,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct GeometryArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Xiq)]
    mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numeric(String),
    Empty(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Empty(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numeric(m) | Failure::Empty(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::UnsupportedPair { .. } => Failure::Validation(e.to_string()),
            Error::NoSqueezing { .. } | Error::NotFound { .. } => Failure::Empty(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("output failed: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn check_k(k: usize) -> Outcome {
    if k == 0 {
        return Err(invalid("--k must be at least 1"));
    }
    Ok(())
}

fn check_even_k(k: usize) -> Outcome {
    if k == 0 || k % 2 != 0 {
        return Err(invalid(format!("--k must be even and at least 2, got {k}")));
    }
    Ok(())
}

fn check_order(n: usize) -> Outcome {
    if n < 2 || n % 2 != 0 {
        return Err(invalid(format!("--n must be even and at least 2, got {n}")));
    }
    Ok(())
}

fn check_xi(xi: f64) -> Outcome {
    if !xi.is_finite() || xi < 0.0 {
        return Err(invalid(format!("--xi must be a finite |ξ| ≥ 0, got {xi}")));
    }
    Ok(())
}

fn check_grid(grid: usize, min: usize) -> Outcome {
    if grid < min {
        return Err(invalid(format!("--grid must be at least {min}, got {grid}")));
    }
    Ok(())
}

fn nonlinearity(name: &str) -> Result<NonlinearFn, Failure> {
    NonlinearFn::by_name(name).ok_or_else(|| invalid(format!("unknown --f '{name}', expected unit or inv-sqrt")))
}

fn phi_at(i: usize, grid: usize) -> f64 {
    2.0 * PI * i as f64 / grid as f64
}

fn cmd_state(a: &StateArgs) -> Outcome {
    check_k(a.k)?;
    check_xi(a.xi)?;
    if !a.phase.is_finite() {
        return Err(invalid("--phase must be finite"));
    }
    let f = nonlinearity(&a.f)?;
    let xi = C64::from_polar(a.xi, a.phase);
    let t = a.cutoff.truncation(0);
    let v: FockVector = match a.kind {
        StateKind::Kncs => {
            if a.j >= a.k {
                return Err(invalid(format!("--j must be below --k, got j = {}, K = {}", a.j, a.k)));
            }
            build_kncs(&KncsSpec::new(xi, a.k, a.j, f.clone())?.with_truncation(t))?
        }
        StateKind::Sekncs => {
            check_even_k(a.k)?;
            build_sekncs_with(xi, a.k, &f, t)?
        }
        StateKind::Fan => {
            check_even_k(a.k)?;
            build_fan_with(xi, a.k, &f, t)?
        }
        StateKind::Ncs => build_ncs(xi, &f, t)?,
        StateKind::Coherent => coherent(xi, t)?,
    };
    let params = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "k": a.k, "j": a.j, "xi": a.xi, "phase": a.phase, "f": f.label(), "cutoff": a.cutoff.label(),
    });
    let mut table = Table::new("state", params, vec!["n", "re", "im", "p"]);
    let p = number_distribution(&v);
    let top = v.support_top().unwrap_or(0);
    for (n, (amp, pn)) in v.amps().iter().zip(&p).enumerate().take(top + 1) {
        table.push(vec![n.into(), amp.re.into(), amp.im.into(), (*pn).into()]);
    }
    table.emit(a.sink.format, a.sink.path())?;
    Ok(())
}

fn cmd_squeeze(a: &SqueezeArgs) -> Outcome {
    check_k(a.k)?;
    check_order(a.n)?;
    check_xi(a.xi)?;
    check_grid(a.grid, 8)?;
    let f = nonlinearity(&a.f)?;
    let t = a.cutoff.truncation(headroom_for(a.n).headroom);
    let xi = C64::new(a.xi, 0.0);
    let (v, closed) = match a.kind {
        StateKind::Fan => {
            check_even_k(a.k)?;
            (build_fan_with(xi, a.k, &f, t)?, f.is_unit() && is_supported(a.k, a.n))
        }
        StateKind::Coherent => (coherent(xi, t)?, false),
        other => return Err(invalid(format!("squeeze supports --kind fan or coherent, got {other:?}"))),
    };
    let header =
        if closed { vec!["phi", "s_numeric", "s_analytic", "s_closed_form"] } else { vec!["phi", "s_numeric"] };
    let params = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "k": a.k, "n": a.n, "xi": a.xi, "grid": a.grid, "f": f.label(), "cutoff": a.cutoff.label(),
        "angle_unit": a.sink.unit(),
    });
    let mut table = Table::new("squeeze", params, header);
    for i in 0..a.grid {
        let phi = phi_at(i, a.grid);
        let mut row: Vec<Cell> = vec![a.sink.angle(phi).into(), squeeze_numeric(&v, phi, a.n)?.into()];
        if closed {
            row.push(squeeze_analytic(a.k, a.n, a.xi, phi)?.into());
            row.push(squeeze_closed_form(a.k, a.n, a.xi, phi)?.into());
        }
        table.push(row);
    }
    table.emit(a.sink.format, a.sink.path())?;
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Outcome {
    check_k(a.k)?;
    check_order(a.n)?;
    if a.n < 2 * a.k {
        return Err(Failure::Empty(format!("no squeezing for N < 2K (K = {}, N = {})", a.k, a.n)));
    }
    let opts = AnalysisOptions {
        bracket: (a.bracket_lo, a.bracket_hi),
        evaluator: a.search.evaluator(a.n),
        ..AnalysisOptions::default()
    };
    let mut report = critical_report(a.k, a.n, &opts)?;
    let deg = |v: &mut Vec<f64>| {
        if a.degrees {
            v.iter_mut().for_each(|x| *x = x.to_degrees());
        }
    };
    deg(&mut report.directions_sq);
    deg(&mut report.directions_st);
    let params = json!({
        "k": a.k,
        "n": a.n,
        "bracket": [opts.bracket.0, opts.bracket.1],
        "xtol": opts.xtol,
        "coarse_points": opts.coarse,
        "direction_grid": opts.direction_grid.max(32 * a.k),
        "evaluator": opts.evaluator.label(),
        "cutoff": a.search.cutoff.label(),
        "angle_unit": if a.degrees { "deg" } else { "rad" },
    });
    emit_object("report", &params, &report, a.out.as_deref())?;
    Ok(())
}

fn cmd_flower(a: &FlowerArgs) -> Outcome {
    check_even_k(a.k)?;
    check_order(a.n)?;
    check_xi(a.xi)?;
    check_grid(a.grid, 64)?;
    let ev = a.search.evaluator(a.n);
    let profile = flower_profile(a.k, a.n, a.xi, a.grid, &ev)?;
    let w = wings(&profile);
    let params = json!({
        "k": a.k, "n": a.n, "xi": a.xi, "grid": a.grid, "evaluator": ev.label(),
        "cutoff": a.search.cutoff.label(), "angle_unit": a.sink.unit(),
    });
    let mut table = Table::new("flower", params, vec!["phi", "s"]);
    for (phi, s) in profile {
        table.push(vec![a.sink.angle(phi).into(), s.into()]);
    }
    table.summary = Some(serde_json::to_value(w).map_err(io::Error::other)?);
    table.emit(a.sink.format, a.sink.path())?;
    Ok(())
}

fn cmd_area(a: &AreaArgs) -> Outcome {
    check_even_k(a.k)?;
    check_order(a.n)?;
    check_xi(a.xi)?;
    check_grid(a.grid, 64)?;
    let t = a.cutoff.truncation(headroom_for(a.n).headroom);
    let v = build_fan_with(C64::new(a.xi, 0.0), a.k, &NonlinearFn::unit(), t)?;
    let r = area_report(&v, a.k, a.n, a.xi, a.grid)?;
    let params = json!({ "k": a.k, "n": a.n, "xi": a.xi, "grid": a.grid, "cutoff": a.cutoff.label() });
    match a.sink.format {
        Format::Json => emit_object("area", &params, &r, a.sink.path())?,
        Format::Csv => {
            let mut table =
                Table::new("area", params, vec!["k", "n", "xi_abs", "area_analytic", "area_numeric", "circle_area"]);
            table.push(vec![
                r.k.into(),
                r.n.into(),
                r.xi_abs.into(),
                r.area_analytic.into(),
                r.area_numeric.into(),
                r.circle_area.into(),
            ]);
            table.emit(Format::Csv, a.sink.path())?;
        }
    }
    Ok(())
}

fn cmd_geometry(a: &GeometryArgs) -> Outcome {
    check_k(a.k)?;
    check_xi(a.xi)?;
    let mode = match a.mode {
        ModeArg::Chi => GeometryMode::Chi,
        ModeArg::Xiq => GeometryMode::Xiq,
    };
    let points = geometry_points(C64::from_polar(a.xi, a.phase), a.k, mode)?;
    let params = json!({
        "mode": format!("{:?}", a.mode).to_lowercase(), "k": a.k, "xi": a.xi, "phase": a.phase,
        "angle_unit": a.sink.unit(),
    });
    let mut table = Table::new("geometry", params, vec!["index", "re", "im", "modulus", "angle"]);
    for (i, p) in points.iter().enumerate() {
        let angle = p.arg().rem_euclid(2.0 * PI);
        table.push(vec![i.into(), p.re.into(), p.im.into(), p.norm().into(), a.sink.angle(angle).into()]);
    }
    table.emit(a.sink.format, a.sink.path())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::State(a) => cmd_state(a),
        Command::Squeeze(a) => cmd_squeeze(a),
        Command::Report(a) => cmd_report(a),
        Command::Flower(a) => cmd_flower(a),
        Command::Area(a) => cmd_area(a),
        Command::Geometry(a) => cmd_geometry(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fanstate: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
