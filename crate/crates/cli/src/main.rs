//! `srlimit`: Riemannian approximation limits and Gauss–Bonnet checks in the
//! affine group and E(1,1).
//!
//! Every subcommand prints JSON on stdout unless `--out` names a file.
//! The exit status is nonzero only when the engine fails (bad input, a
//! point outside the group's domain, a degenerate curve). Failed numerical
//! checks are reported in the output and do not change the exit status.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use srlimit_core::exec::{set_workers, Exec};
use srlimit_core::gauss_bonnet::Edge;
use srlimit_core::groups::{builtin_group, BUILTIN_GROUPS};
use srlimit_core::quadrature::QuadratureSpec;
use srlimit_core::report::{run_all, run_scenario, to_json, verify_tables, ScenarioReport, Summary};
use srlimit_core::scenario::{self, Check, CurveFile, GroupSpec, Num, OutputSpec, Scenario, ScenarioFile, SurfaceFile};

#[derive(Parser)]
#[command(name = "srlimit", version, about = "Sub-Riemannian curvature limits and Gauss-Bonnet checks")]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "SRLIMIT_WORKERS")]
    workers: Option<usize>,
    /// Evaluate everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in groups.
    Groups {
        #[command(subcommand)]
        action: GroupsAction,
    },
    /// Compare derived connection and curvature tables with the closed forms.
    VerifyTables {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature of a curve as L grows, its limit, and optionally its
    /// geodesic curvature on a surface through it.
    CurveCurvature(CurveArgs),
    /// Gaussian curvature of a surface at patch points, finite L and limit.
    SurfaceCurvature(SurfaceArgs),
    /// Finite-L Gauss-Bonnet residuals for the surfaces of a scenario.
    GaussBonnet(ScenarioArgs),
    /// Limit identities (and the checks that lead to them) for the surfaces
    /// of a scenario.
    LimitIdentities(ScenarioArgs),
    /// Run scenarios in full and write report.json and report.csv.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum GroupsAction {
    /// Names, frames and domains of the built-in groups.
    List,
}

#[derive(Args)]
struct Common {
    /// Quadrature tolerance, relative and absolute.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated L values, e.g. `1,4,16`.
    #[arg(long, value_delimiter = ',')]
    l_grid: Option<Vec<f64>>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the CSV rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    group: String,
    /// Three coordinate expressions in `t`.
    #[arg(long, num_args = 3, required = true, allow_hyphen_values = true)]
    gamma: Vec<String>,
    /// Parameter interval; DSL constants such as `2*pi` are accepted.
    #[arg(long, num_args = 2, default_values = ["0", "1"], allow_hyphen_values = true)]
    interval: Vec<String>,
    #[arg(long)]
    closed: bool,
    /// Parameter at which to evaluate; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true)]
    t: Vec<String>,
    /// Level-set function of a surface containing the curve.
    #[arg(long, requires = "patch")]
    on: Option<String>,
    /// Parametrization of that surface in `u1, u2`.
    #[arg(long, num_args = 3, requires = "on", allow_hyphen_values = true)]
    patch: Option<Vec<String>>,
    /// `u1_min u1_max u2_min u2_max` of the patch.
    #[arg(long, num_args = 4, default_values = ["-1", "1", "-1", "1"], allow_hyphen_values = true)]
    domain: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    group: String,
    /// Level-set function `u(x1, x2, x3)`.
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Three coordinate expressions in `u1, u2`.
    #[arg(long, num_args = 3, required = true, allow_hyphen_values = true)]
    patch: Vec<String>,
    /// `u1_min u1_max u2_min u2_max`.
    #[arg(long, num_args = 4, required = true, allow_hyphen_values = true)]
    domain: Vec<String>,
    /// Patch points `u1,u2`; repeatable.
    #[arg(long = "at", required = true, value_parser = parse_pair, allow_hyphen_values = true)]
    at: Vec<[String; 2]>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file.
    #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
    scenario: Option<PathBuf>,
    /// Use a bundled scenario by name.
    #[arg(long)]
    bundled: Option<String>,
    /// Restrict to one surface.
    #[arg(long)]
    surface: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReportArgs {
    /// Scenario files.
    scenarios: Vec<PathBuf>,
    /// Add bundled scenarios; with no names, all of them.
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    bundled: Option<Vec<String>>,
    /// Quadrature tolerance, relative and absolute.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated L values for finite-L checks, e.g. `1,4,16`.
    #[arg(long, value_delimiter = ',')]
    l_grid: Option<Vec<f64>>,
    /// Output directory for report.json and report.csv. Without it the JSON
    /// goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<[String; 2], String> {
    match s.split_once(',') {
        Some((a, b)) => Ok([a.trim().to_string(), b.trim().to_string()]),
        None => Err(format!("expected `u1,u2`, got `{s}`")),
    }
}

fn num(s: &str) -> Num {
    match s.parse::<f64>() {
        Ok(x) => Num::Float(x),
        Err(_) => Num::Expr(s.to_string()),
    }
}

fn three(v: &[String]) -> [String; 3] {
    [v[0].clone(), v[1].clone(), v[2].clone()]
}

fn domain_of(v: &[String]) -> [[Num; 2]; 2] {
    [[num(&v[0]), num(&v[1])], [num(&v[2]), num(&v[3])]]
}

fn file(name: &str, group: &str, description: &str) -> ScenarioFile {
    ScenarioFile {
        name: name.to_string(),
        description: description.to_string(),
        group: GroupSpec::Builtin(group.to_string()),
        quadrature: QuadratureSpec::default(),
        l_grid: None,
        slope_grid: None,
        curve_grid: None,
        surfaces: Vec::new(),
        curves: Vec::new(),
        output: OutputSpec::default(),
    }
}

fn surface_file(name: &str, u: &str, patch: &[String], domain: &[String]) -> SurfaceFile {
    SurfaceFile {
        name: name.to_string(),
        u: u.to_string(),
        patch: three(patch),
        domain: domain_of(domain),
        periodic: [false, false],
        boundary: Vec::<Edge>::new(),
        chi: 0,
        checks: None,
        points: Vec::new(),
    }
}

fn apply(mut sc: Scenario, c: &Common) -> Result<Scenario> {
    if let Some(g) = &c.l_grid {
        sc = sc.with_l_grid(g.clone())?;
    }
    if let Some(t) = c.tolerance {
        sc = sc.with_tolerance(t)?;
    }
    Ok(sc)
}

fn emit(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, json).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn emit_scenario(r: &ScenarioReport, c: &Common) -> Result<()> {
    emit(&r.to_json()?, c.out.as_deref())?;
    if let Some(p) = &c.csv {
        let f = fs::File::create(p).with_context(|| format!("writing {}", p.display()))?;
        r.write_csv(f)?;
    }
    print_summary(&r.name, &r.summary, c.out.is_some());
    Ok(())
}

fn print_summary(name: &str, s: &Summary, to_stdout: bool) {
    let line = format!(
        "{name}: {} checked, {} passed, {} failed, {} reported",
        s.checked, s.passed, s.failed, s.reported
    );
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario> {
    let sc = match (&args.scenario, &args.bundled) {
        (Some(p), _) => Scenario::load(p)?,
        (None, Some(n)) => scenario::bundled(n)?,
        (None, None) => bail!("a scenario file or --bundled NAME is required"),
    };
    let mut sc = apply(sc, &args.common)?;
    if let Some(name) = &args.surface {
        sc.surfaces.retain(|s| &s.sb.name == name);
        if sc.surfaces.is_empty() {
            bail!("scenario `{}` has no surface named `{name}`", sc.name);
        }
    }
    // curves refer to surfaces by index, and these commands are about surfaces
    sc.curves.clear();
    Ok(sc)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        set_workers(n);
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Groups { action: GroupsAction::List } => {
            for name in BUILTIN_GROUPS {
                let g = builtin_group(name)?;
                let frame = g.frame_exprs();
                println!("{name}  (domain {})", g.domain().describe());
                for (i, row) in frame.iter().enumerate() {
                    println!("  X{} = ({}) d1 + ({}) d2 + ({}) d3", i + 1, row[0], row[1], row[2]);
                }
            }
        }
        Command::VerifyTables { out } => {
            let t = verify_tables()?;
            emit(&to_json(&t)?, out.as_deref())?;
        }
        Command::CurveCurvature(a) => {
            let mut f = file("curve-curvature", &a.group, "");
            let mut surface = None;
            if let (Some(u), Some(patch)) = (&a.on, &a.patch) {
                f.surfaces.push(surface_file("surface", u, patch, &a.domain));
                surface = Some("surface".to_string());
            }
            f.curves.push(CurveFile {
                name: "curve".into(),
                gamma: three(&a.gamma),
                interval: [num(&a.interval[0]), num(&a.interval[1])],
                closed: a.closed,
                t: a.t.iter().map(|t| num(t)).collect(),
                surface,
                l_grid: a.common.l_grid.clone(),
            });
            let sc = apply(Scenario::from_file(f, "curve-curvature")?, &a.common)?;
            emit_scenario(&run_scenario(&sc, exec)?, &a.common)?;
        }
        Command::SurfaceCurvature(a) => {
            let mut f = file("surface-curvature", &a.group, "");
            let mut s = surface_file("surface", &a.u, &a.patch, &a.domain);
            s.points = a.at.iter().map(|[x, y]| [num(x), num(y)]).collect();
            s.checks = Some(vec![Check::Curvature]);
            f.surfaces.push(s);
            let sc = apply(Scenario::from_file(f, "surface-curvature")?, &a.common)?;
            emit_scenario(&run_scenario(&sc, exec)?, &a.common)?;
        }
        Command::GaussBonnet(a) => {
            let mut sc = load(&a)?;
            for s in &mut sc.surfaces {
                s.checks.retain(|c| *c == Check::FiniteL);
                if s.checks.is_empty() && !s.sb.boundary.is_empty() {
                    s.checks.push(Check::FiniteL);
                }
            }
            emit_scenario(&run_scenario(&sc, exec)?, &a.common)?;
        }
        Command::LimitIdentities(a) => {
            let mut sc = load(&a)?;
            let limits = matches!(sc.geometry.group.name(), "affine" | "e11");
            if !limits {
                bail!("limit identities are available for the affine group and E(1,1) only");
            }
            for s in &mut sc.surfaces {
                s.checks
                    .retain(|c| matches!(c, Check::LimitIdentities | Check::DivergenceSlope | Check::LimitConsistency));
                if s.checks.is_empty() && !s.sb.boundary.is_empty() {
                    s.checks.push(Check::LimitIdentities);
                }
            }
            emit_scenario(&run_scenario(&sc, exec)?, &a.common)?;
        }
        Command::Report(a) => {
            let mut list = Vec::new();
            for p in &a.scenarios {
                list.push(Scenario::load(p)?);
            }
            match &a.bundled {
                Some(names) if names.is_empty() => {
                    for (n, _) in scenario::BUNDLED {
                        list.push(scenario::bundled(n)?);
                    }
                }
                Some(names) => {
                    for n in names {
                        list.push(scenario::bundled(n)?);
                    }
                }
                None => {}
            }
            if list.is_empty() {
                bail!("no scenarios given; pass files or --bundled");
            }
            let common = Common {
                tolerance: a.tolerance,
                l_grid: a.l_grid.clone(),
                out: None,
                csv: None,
            };
            let list = list.into_iter().map(|s| apply(s, &common)).collect::<Result<Vec<_>>>()?;
            let rep = run_all(&list, exec)?;
            match &a.out {
                Some(dir) => {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    let json = dir.join("report.json");
                    fs::write(&json, rep.to_json()?).with_context(|| format!("writing {}", json.display()))?;
                    let csv = dir.join("report.csv");
                    rep.write_csv(fs::File::create(&csv).with_context(|| format!("writing {}", csv.display()))?)?;
                    // per-scenario outputs requested by the scenario files
                    for (sc, r) in list.iter().zip(&rep.scenarios) {
                        if let Some(name) = &sc.output.json {
                            fs::write(dir.join(name), r.to_json()?)?;
                        }
                        if let Some(name) = &sc.output.csv {
                            r.write_csv(fs::File::create(dir.join(name))?)?;
                        }
                    }
                    for r in &rep.scenarios {
                        print_summary(&r.name, &r.summary, true);
                    }
                    print_summary("total", &rep.summary, true);
                    for d in &rep.discrepancies {
                        println!("discrepancy [{}] {}: {}", d.kind, d.location, d.trace);
                    }
                }
                None => {
                    println!("{}", rep.to_json()?);
                    print_summary("total", &rep.summary, false);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
