//! Scenario files: TOML documents naming a group, surfaces with boundaries,
//! curves, `L` grids and quadrature settings. Expressions are DSL strings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connection::Geometry;
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::exprdsl::{Env, Expr};
use crate::fit::geometric_grid;
use crate::gauss_bonnet::{Edge, SurfaceWithBoundary};
use crate::groups::{builtin_group, Domain, GroupModel};
use crate::laurent::Rational;
use crate::quadrature::QuadratureSpec;
use crate::surfaces::{LevelSurface, ParamPatch, CURVE_ON_SURFACE_EPS};

/// Golden scenarios shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("affine-flat-disk", include_str!("../scenarios/affine-flat-disk.toml")),
    ("e11-limit-gb", include_str!("../scenarios/e11-limit-gb.toml")),
    ("affine-curves", include_str!("../scenarios/affine-curves.toml")),
    ("e11-curves", include_str!("../scenarios/e11-curves.toml")),
];

pub fn bundled(name: &str) -> Result<Scenario> {
    let src = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::scenario(name, "no bundled scenario of that name"))?;
    Scenario::parse(src, name)
}

/// A number or a constant DSL expression such as `"2*pi"`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Expr(String),
}

impl Num {
    pub fn value(&self, loc: &str) -> Result<f64> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Int(i) => Ok(*i as f64),
            Num::Expr(s) => {
                let e = Expr::parse(s).map_err(|e| Error::scenario(loc, e.to_string()))?;
                if let Some(v) = e.free_vars().into_iter().next() {
                    return Err(Error::scenario(loc, format!("constant expected, found variable `{}`", v.name())));
                }
                e.eval_f64(&Env::new()).map_err(|e| Error::scenario(loc, e.to_string()))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Builtin(String),
    Inline(InlineGroup),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InlineGroup {
    pub name: String,
    /// Rows `X_i = Σ_j a_i^j ∂_j`.
    pub frame: [[String; 3]; 3],
    pub coframe: Option<[[String; 3]; 3]>,
    /// `[i, j, k, "c"]` with 1-based `i < j`: `[X_i, X_j]` has `c` on `X_k`.
    pub brackets: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    pub domain: DomainSpec,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    #[default]
    Everywhere,
    PositiveX1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Finite-`L` Gauss–Bonnet residuals on the scenario grid.
    FiniteL,
    /// The limit identities of the scenario's group.
    LimitIdentities,
    /// Fit of the interior integral against `L`.
    DivergenceSlope,
    /// Extrapolated finite-`L` terms against the E(1,1) limit terms.
    LimitConsistency,
    /// Gaussian curvature routes at the listed sample points.
    Curvature,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub name: String,
    pub u: String,
    pub patch: [String; 3],
    pub domain: [[Num; 2]; 2],
    #[serde(default)]
    pub periodic: [bool; 2],
    #[serde(default)]
    pub boundary: Vec<Edge>,
    #[serde(default)]
    pub chi: i32,
    pub checks: Option<Vec<Check>>,
    #[serde(default)]
    pub points: Vec<[Num; 2]>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub name: String,
    pub gamma: [String; 3],
    pub interval: [Num; 2],
    #[serde(default)]
    pub closed: bool,
    pub t: Vec<Num>,
    pub surface: Option<String>,
    pub l_grid: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub json: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub group: GroupSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub l_grid: Option<Vec<f64>>,
    pub slope_grid: Option<Vec<f64>>,
    pub curve_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub surfaces: Vec<SurfaceFile>,
    #[serde(default)]
    pub curves: Vec<CurveFile>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug)]
pub struct SurfaceEntry {
    pub sb: SurfaceWithBoundary,
    pub checks: Vec<Check>,
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct CurveEntry {
    pub name: String,
    pub curve: Curve,
    pub ts: Vec<f64>,
    /// Index into [`Scenario::surfaces`].
    pub surface: Option<usize>,
    pub l_grid: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub geometry: Geometry,
    pub quadrature: QuadratureSpec,
    /// `L` values for finite-`L` residuals.
    pub l_grid: Vec<f64>,
    /// `L` values for the divergence-slope fit.
    pub slope_grid: Vec<f64>,
    pub surfaces: Vec<SurfaceEntry>,
    pub curves: Vec<CurveEntry>,
    pub output: OutputSpec,
}

pub const DEFAULT_L_GRID: [f64; 3] = [1.0, 4.0, 16.0];

/// `L = 4^2 … 4^10`, the grid used for curve limits.
pub fn default_curve_grid() -> Vec<f64> {
    geometric_grid(4.0, 2, 10)
}

pub fn default_slope_grid() -> Vec<f64> {
    geometric_grid(4.0, 0, 6)
}

fn check_grid(grid: &[f64], loc: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::scenario(loc, "empty L grid"));
    }
    if let Some(l) = grid.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::scenario(loc, format!("L must be positive and finite, got {l}")));
    }
    Ok(())
}

fn parse_expr(src: &str, loc: &str) -> Result<Expr> {
    Expr::parse(src).map_err(|e| Error::scenario(loc, e.to_string()))
}

fn parse3(src: &[String; 3], loc: impl Fn(usize) -> String) -> Result<[Expr; 3]> {
    Ok([
        parse_expr(&src[0], &loc(0))?,
        parse_expr(&src[1], &loc(1))?,
        parse_expr(&src[2], &loc(2))?,
    ])
}

fn located<T>(r: Result<T>, loc: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Scenario { .. } => e,
        other => Error::scenario(loc, other.to_string()),
    })
}

fn build_group(spec: &GroupSpec) -> Result<GroupModel> {
    match spec {
        GroupSpec::Builtin(name) => located(builtin_group(name), "group"),
        GroupSpec::Inline(g) => {
            let rows = |m: &[[String; 3]; 3], what: &str| -> Result<[[Expr; 3]; 3]> {
                let r0 = parse3(&m[0], |j| format!("group.{what}[0][{j}]"))?;
                let r1 = parse3(&m[1], |j| format!("group.{what}[1][{j}]"))?;
                let r2 = parse3(&m[2], |j| format!("group.{what}[2][{j}]"))?;
                Ok([r0, r1, r2])
            };
            let frame = rows(&g.frame, "frame")?;
            let coframe = g.coframe.as_ref().map(|c| rows(c, "coframe")).transpose()?;
            let mut br = Vec::new();
            for (n, (i, j, k, c)) in g.brackets.iter().enumerate() {
                let loc = format!("group.brackets[{n}]");
                if !(1..=3).contains(i) || !(1..=3).contains(j) || !(1..=3).contains(k) {
                    return Err(Error::scenario(loc, "indices are 1, 2 or 3"));
                }
                let v: Rational = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::scenario(&loc, format!("`{c}` is not a rational number")))?;
                br.push((i - 1, j - 1, k - 1, v));
            }
            let domain = match g.domain {
                DomainSpec::Everywhere => Domain::Everywhere,
                DomainSpec::PositiveX1 => Domain::PositiveX1 { margin: 1e-8 },
            };
            located(GroupModel::user(&g.name, frame, coframe, &br, domain), "group")
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let src = std::fs::read_to_string(path)?;
        Scenario::parse(&src, &path.display().to_string())
    }

    /// Parses and validates; `origin` labels error locations.
    pub fn parse(src: &str, origin: &str) -> Result<Scenario> {
        let file: ScenarioFile = toml::from_str(src).map_err(|e| Error::scenario(origin, e.to_string()))?;
        Scenario::from_file(file, origin)
    }

    /// Validates an already-deserialized scenario.
    pub fn from_file(file: ScenarioFile, origin: &str) -> Result<Scenario> {
        let group = build_group(&file.group).map_err(|e| prefix(origin, e))?;
        let geometry = located(Geometry::derive(group), "group").map_err(|e| prefix(origin, e))?;
        file.quadrature
            .validate()
            .map_err(|e| Error::scenario(format!("{origin}: quadrature"), e.to_string()))?;
        let l_grid = file.l_grid.clone().unwrap_or_else(|| DEFAULT_L_GRID.to_vec());
        let slope_grid = file.slope_grid.clone().unwrap_or_else(default_slope_grid);
        let curve_grid = file.curve_grid.clone().unwrap_or_else(default_curve_grid);
        for (g, loc) in [(&l_grid, "l_grid"), (&slope_grid, "slope_grid"), (&curve_grid, "curve_grid")] {
            check_grid(g, loc).map_err(|e| prefix(origin, e))?;
        }
        let mut surfaces = Vec::new();
        for (i, s) in file.surfaces.iter().enumerate() {
            let loc = format!("surfaces[{i}] ({})", s.name);
            surfaces.push(build_surface(&geometry, s, &loc).map_err(|e| prefix(origin, e))?);
        }
        let mut curves = Vec::new();
        for (i, c) in file.curves.iter().enumerate() {
            let loc = format!("curves[{i}] ({})", c.name);
            curves.push(build_curve(&geometry.group, c, &surfaces, &file.surfaces, &curve_grid, &loc).map_err(|e| prefix(origin, e))?);
        }
        Ok(Scenario {
            name: file.name,
            description: file.description,
            geometry,
            quadrature: file.quadrature,
            l_grid,
            slope_grid,
            surfaces,
            curves,
            output: file.output,
        })
    }

    /// Overrides the finite-`L` grid.
    pub fn with_l_grid(mut self, grid: Vec<f64>) -> Result<Scenario> {
        check_grid(&grid, "--l-grid")?;
        self.l_grid = grid;
        Ok(self)
    }

    /// Sets both quadrature tolerances.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Scenario> {
        let q = QuadratureSpec {
            rel_tol: tol,
            abs_tol: tol,
            ..self.quadrature
        };
        q.validate()?;
        self.quadrature = q;
        Ok(self)
    }
}

fn prefix(origin: &str, e: Error) -> Error {
    match e {
        Error::Scenario { location, message } => Error::Scenario {
            location: format!("{origin}: {location}"),
            message,
        },
        other => Error::scenario(origin, other.to_string()),
    }
}

fn build_surface(geometry: &Geometry, s: &SurfaceFile, loc: &str) -> Result<SurfaceEntry> {
    let g = &geometry.group;
    let u = located(LevelSurface::new(parse_expr(&s.u, &format!("{loc}.u"))?), &format!("{loc}.u"))?;
    let f = parse3(&s.patch, |k| format!("{loc}.patch[{k}]"))?;
    let mut domain = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            domain[a][b] = s.domain[a][b].value(&format!("{loc}.domain[{a}][{b}]"))?;
        }
    }
    let patch = located(ParamPatch::new(f, domain), &format!("{loc}.patch"))?.with_periodic(s.periodic);
    // every chart point must satisfy the group's domain predicate
    const N: usize = 9;
    for i in 0..N {
        for j in 0..N {
            let uu = [
                domain[0][0] + (domain[0][1] - domain[0][0]) * i as f64 / (N - 1) as f64,
                domain[1][0] + (domain[1][1] - domain[1][0]) * j as f64 / (N - 1) as f64,
            ];
            let p = located(patch.point(uu), &format!("{loc}.patch"))?;
            located(g.check_point(&p), &format!("{loc}.patch at u = ({}, {})", uu[0], uu[1]))?;
        }
    }
    let sb = located(
        SurfaceWithBoundary::new(s.name.clone(), geometry.clone(), u, patch, &s.boundary, s.chi),
        loc,
    )?;
    let mut points = Vec::new();
    for (k, p) in s.points.iter().enumerate() {
        let ploc = format!("{loc}.points[{k}]");
        let q = [p[0].value(&ploc)?, p[1].value(&ploc)?];
        if !(domain[0][0] <= q[0] && q[0] <= domain[0][1] && domain[1][0] <= q[1] && q[1] <= domain[1][1]) {
            return Err(Error::scenario(ploc, "sample point outside the patch domain"));
        }
        points.push(q);
    }
    let checks = match &s.checks {
        Some(c) => c.clone(),
        None => {
            let mut c = Vec::new();
            if !s.boundary.is_empty() {
                c.push(Check::FiniteL);
                if matches!(g.name(), "affine" | "e11") {
                    c.push(Check::LimitIdentities);
                }
            }
            if !points.is_empty() {
                c.push(Check::Curvature);
            }
            c
        }
    };
    let needs_boundary = [Check::FiniteL, Check::LimitIdentities, Check::DivergenceSlope, Check::LimitConsistency];
    if s.boundary.is_empty() {
        if let Some(c) = checks.iter().find(|c| needs_boundary.contains(c)) {
            return Err(Error::scenario(loc, format!("check `{c:?}` needs a boundary")));
        }
    }
    if checks.contains(&Check::LimitConsistency) && g.name() != "e11" {
        return Err(Error::scenario(loc, "limit_consistency is defined for e11 surfaces only"));
    }
    Ok(SurfaceEntry { sb, checks, points })
}

fn build_curve(
    g: &GroupModel,
    c: &CurveFile,
    surfaces: &[SurfaceEntry],
    files: &[SurfaceFile],
    default_grid: &[f64],
    loc: &str,
) -> Result<CurveEntry> {
    let e = parse3(&c.gamma, |k| format!("{loc}.gamma[{k}]"))?;
    let interval = [c.interval[0].value(&format!("{loc}.interval"))?, c.interval[1].value(&format!("{loc}.interval"))?];
    if !(interval[0] < interval[1]) {
        return Err(Error::scenario(format!("{loc}.interval"), "empty interval"));
    }
    let curve = located(Curve::from_exprs(e, interval, c.closed), loc)?;
    let mut ts = Vec::new();
    for (k, t) in c.t.iter().enumerate() {
        let tloc = format!("{loc}.t[{k}]");
        let v = t.value(&tloc)?;
        if !(interval[0] <= v && v <= interval[1]) {
            return Err(Error::scenario(tloc, "parameter outside the curve interval"));
        }
        ts.push(v);
    }
    let surface = match &c.surface {
        None => None,
        Some(name) => Some(
            files
                .iter()
                .position(|s| &s.name == name)
                .ok_or_else(|| Error::scenario(format!("{loc}.surface"), format!("no surface named `{name}`")))?,
        ),
    };
    const N: usize = 64;
    for k in 0..=N {
        let t = interval[0] + (interval[1] - interval[0]) * k as f64 / N as f64;
        let p = located(curve.point(t), loc)?;
        located(g.check_point(&p), &format!("{loc} at t = {t}"))?;
        if let Some(i) = surface {
            let residual = located(surfaces[i].sb.surface.value(&p), loc)?.abs();
            if !(residual <= CURVE_ON_SURFACE_EPS) {
                return Err(Error::scenario(
                    format!("{loc} at t = {t}"),
                    format!("curve leaves surface `{}` by {residual:e}", files[i].name),
                ));
            }
        }
    }
    let l_grid = c.l_grid.clone().unwrap_or_else(|| default_grid.to_vec());
    check_grid(&l_grid, &format!("{loc}.l_grid"))?;
    Ok(CurveEntry {
        name: c.name.clone(),
        curve,
        ts,
        surface,
        l_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_validate() {
        for (name, _) in BUNDLED {
            let s = bundled(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn domain_violation_names_the_predicate() {
        let src = r#"
name = "bad"
group = "affine"
[[surfaces]]
name = "crosses-x1-zero"
u = "x3"
patch = ["u1", "u2", "0"]
domain = [[-1, 1], [0, 1]]
"#;
        let e = Scenario::parse(src, "bad.toml").unwrap_err().to_string();
        assert!(e.contains("x1 >= "), "{e}");
        assert!(e.contains("surfaces[0]"), "{e}");
    }

    #[test]
    fn curve_off_surface_is_rejected() {
        let src = r#"
name = "off"
group = "e11"
[[surfaces]]
name = "plane"
u = "x3"
patch = ["u1", "u2", "0"]
domain = [[-1, 1], [-1, 1]]
[[curves]]
name = "lifts"
gamma = ["t", "0", "1e-7*t"]
interval = [0, 1]
t = [0.5]
surface = "plane"
"#;
        let e = Scenario::parse(src, "off.toml").unwrap_err().to_string();
        assert!(e.contains("leaves surface"), "{e}");
    }

    #[test]
    fn parse_errors_carry_locations() {
        let e = Scenario::parse("name = \"x\"\ngroup = \"affine\"\nl_grid = [1, -4]\n", "g.toml")
            .unwrap_err()
            .to_string();
        assert!(e.contains("l_grid"), "{e}");
        let e = Scenario::parse("name = \"x\"\ngroup = \"nope\"\n", "g.toml").unwrap_err().to_string();
        assert!(e.contains("unknown group"), "{e}");
        let e = Scenario::parse("name = \"x\"\ngroup = \"affine\"\nbogus = 1\n", "g.toml").unwrap_err().to_string();
        assert!(e.contains("bogus"), "{e}");
        let src = "name = \"x\"\ngroup = \"e11\"\n[[surfaces]]\nname = \"s\"\nu = \"x3 +\"\npatch = [\"u1\", \"u2\", \"0\"]\ndomain = [[0, 1], [0, 1]]\n";
        let e = Scenario::parse(src, "g.toml").unwrap_err().to_string();
        assert!(e.contains("surfaces[0] (s).u"), "{e}");
    }

    #[test]
    fn inline_group_definition() {
        let src = r#"
name = "inline"
[group]
name = "heis"
frame = [["1", "0", "-x2/2"], ["0", "1", "x1/2"], ["0", "0", "1"]]
brackets = [[1, 2, 3, "1"]]
"#;
        let s = Scenario::parse(src, "inline.toml").unwrap();
        assert_eq!(s.geometry.group.name(), "heis");
        let bad = src.replace("\"1\"]]", "\"2\"]]");
        assert!(Scenario::parse(&bad, "inline.toml").is_err());
    }

    #[test]
    fn checks_needing_a_boundary_are_rejected() {
        let src = r#"
name = "nb"
group = "e11"
[[surfaces]]
name = "plane"
u = "x3"
patch = ["u1", "u2", "0"]
domain = [[-1, 1], [-1, 1]]
checks = ["finite_l"]
"#;
        assert!(Scenario::parse(src, "nb.toml").is_err());
    }
}
