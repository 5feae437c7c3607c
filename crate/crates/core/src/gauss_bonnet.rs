//! Gauss–Bonnet at finite `L` and its `L → ∞` identities.
//!
//! Orientation. Boundary components are edges of the patch domain `D`,
//! traversed with `D` on the left in the `(u1, u2)` plane; `τ = ±1` records
//! whether that matches increasing free coordinate. At finite `L` every
//! boundary node is further weighted by the sign of `(e1* ∧ e2*)(f_u1,
//! f_u2)`, so `k^{L,s}` is integrated along the boundary positively
//! oriented for `(e1, e2)`, which makes a flat disk give `+2π`. The limit
//! identities pull `dσ_Σ` back along `(u1, u2)` and carry `τ` only; they
//! change sign under `u → −u`.

use serde::Serialize;

use crate::connection::{Geometry, GeometryAt};
use crate::curves::{curve_state, Curve};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::exprdsl::{Env, Expr, Var};
use crate::fit::{fit_error_bars, fit_powers, PowerFit};
use crate::measures::{area_density_param, limit_area_forms, oriented_area_density};
use crate::quadrature::{integrate_1d, Integral, QuadratureSpec};
use crate::surfaces::{
    gauss_equation_terms, gaussian_limit_closed, geodesic_curvature, limit_signed_numerator,
    pairing_residual, surface_frames, LevelSurface, ParamPatch, CURVE_ON_SURFACE_EPS,
};

pub const ORIENTATION_CONVENTION: &str = "boundary traversed with the parameter domain on its left in (u1, u2); \
finite-L boundary nodes weighted by sign((e1* ^ e2*)(f_u1, f_u2)); \
limit identities use pullbacks along (u1, u2) and the traversal sign only";

/// Fit basis for the interior integral against `L`.
pub const DIVERGENCE_FIT_EXPONENTS: [f64; 4] = [1.0, 0.0, -1.0, -2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    U1Min,
    U1Max,
    U2Min,
    U2Max,
}

impl Edge {
    /// The coordinate that varies along the edge.
    pub fn free_axis(self) -> usize {
        match self {
            Edge::U1Min | Edge::U1Max => 1,
            Edge::U2Min | Edge::U2Max => 0,
        }
    }

    /// `+1` when increasing the free coordinate keeps the domain on the left.
    pub fn traversal_sign(self) -> f64 {
        match self {
            Edge::U1Max | Edge::U2Min => 1.0,
            Edge::U1Min | Edge::U2Max => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::U1Min => "u1_min",
            Edge::U1Max => "u1_max",
            Edge::U2Min => "u2_min",
            Edge::U2Max => "u2_max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    /// Tables derived from the Koszul formula.
    Reference,
    /// Closed-form curvature tables as stated.
    Stated,
}

/// One closed boundary curve: an edge of the domain, possibly
/// reparametrized.
#[derive(Clone, Debug)]
pub struct BoundaryComponent {
    pub edge: Edge,
    /// Value of the fixed coordinate.
    pub fixed: f64,
    /// Free coordinate as a function of `t`.
    pub param: Expr,
    pub curve: Curve,
    pub sign: f64,
}

impl BoundaryComponent {
    pub fn u_at(&self, t: f64) -> Result<[f64; 2]> {
        let s = self.param.eval_f64(&Env::new().with(Var::T, t))?;
        Ok(if self.edge.free_axis() == 1 {
            [self.fixed, s]
        } else {
            [s, self.fixed]
        })
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceWithBoundary {
    pub name: String,
    pub geometry: Geometry,
    pub surface: LevelSurface,
    pub patch: ParamPatch,
    pub boundary: Vec<BoundaryComponent>,
    pub chi: i32,
}

const VALIDATION_SAMPLES: usize = 64;

impl SurfaceWithBoundary {
    pub fn new(
        name: impl Into<String>,
        geometry: Geometry,
        surface: LevelSurface,
        patch: ParamPatch,
        edges: &[Edge],
        chi: i32,
    ) -> Result<Self> {
        let res = pairing_residual(&surface, &patch, 8)?;
        if !(res <= CURVE_ON_SURFACE_EPS) {
            return Err(Error::OffSurface { residual: res });
        }
        let mut boundary = Vec::with_capacity(edges.len());
        for &edge in edges {
            let free = edge.free_axis();
            let fixed_axis = 1 - free;
            if !patch.periodic[free] {
                return Err(Error::InvalidGroup(format!(
                    "edge {} is not a closed curve: u{} is not periodic",
                    edge.name(),
                    free + 1
                )));
            }
            let fixed = match edge {
                Edge::U1Min | Edge::U2Min => patch.domain[fixed_axis][0],
                Edge::U1Max | Edge::U2Max => patch.domain[fixed_axis][1],
            };
            let vars = [Var::U1, Var::U2];
            let c = Expr::constant(fixed);
            let t = Expr::var(Var::T);
            let exprs = patch
                .exprs()
                .clone()
                .map(|e| e.substitute_all(&[(vars[fixed_axis], &c), (vars[free], &t)]));
            let curve = Curve::from_exprs(exprs, patch.domain[free], true)?;
            boundary.push(BoundaryComponent {
                edge,
                fixed,
                param: t,
                curve,
                sign: edge.traversal_sign(),
            });
        }
        let sb = SurfaceWithBoundary {
            name: name.into(),
            geometry,
            surface,
            patch,
            boundary,
            chi,
        };
        for i in 0..sb.boundary.len() {
            sb.check_boundary(i)?;
        }
        Ok(sb)
    }

    fn check_boundary(&self, i: usize) -> Result<()> {
        let b = &self.boundary[i];
        let [a, c] = b.curve.interval;
        for k in 0..VALIDATION_SAMPLES {
            let t = a + (c - a) * (k as f64 + 0.5) / VALIDATION_SAMPLES as f64;
            let residual = self.surface.value(&b.curve.point(t)?)?.abs();
            if !(residual <= CURVE_ON_SURFACE_EPS) {
                return Err(Error::CurveOffSurface { t, residual });
            }
        }
        Ok(())
    }

    /// Replaces the parameter of boundary `i` by `φ(s)`, `s ∈ interval`.
    /// `φ` must be increasing and cover one period of the edge.
    pub fn reparametrize_boundary(&mut self, i: usize, phi: &Expr, interval: [f64; 2]) -> Result<()> {
        let b = &self.boundary[i];
        let param = b.param.substitute(Var::T, phi);
        let jet0 = param.jet_t(interval[0])?;
        let at = |s: f64| param.eval_f64(&Env::new().with(Var::T, s));
        let period = b.curve.interval[1] - b.curve.interval[0];
        let span = at(interval[1])? - at(interval[0])?;
        if !(jet0.d(0) > 0.0) || ((span - period) / period).abs() > 1e-12 {
            return Err(Error::InvalidGroup("boundary reparametrization must be increasing over one period".into()));
        }
        let curve = b.curve.reparametrize(phi, interval)?;
        let b = &mut self.boundary[i];
        b.param = param;
        b.curve = curve;
        self.check_boundary(i)
    }

    fn geometry_for(&self, mode: TableMode) -> Result<Geometry> {
        match mode {
            TableMode::Reference => Ok(self.geometry.clone()),
            TableMode::Stated => self
                .geometry
                .with_reference_curvature()
                .ok_or_else(|| Error::UnsupportedGroup(self.geometry.group.name().to_string())),
        }
    }

    /// `∫ K^{Σ,L} (1/√L) dσ_{Σ,L}` with the unsigned area density. The
    /// error includes a rounding floor `64ε ∫ (|K^L(e1, e2)| + |det II|)`,
    /// since the two Gauss-equation terms can cancel.
    fn interior(&self, at: &GeometryAt, spec: &QuadratureSpec, exec: Exec) -> Result<Integral> {
        let g = &self.geometry.group;
        let l = at.l;
        let terms = |u: [f64; 2]| -> Result<(f64, f64, f64)> {
            let p = self.patch.point(u)?;
            let (ambient, det) = gauss_equation_terms(g, at, &self.surface, &p)?;
            Ok((ambient, det, area_density_param(g, &self.patch, u, l)?.scaled))
        };
        let value = crate::measures::integrate_patch(
            |u| terms(u).map(|(a, d, w)| (a + d) * w),
            &self.patch,
            spec,
            exec,
        )?;
        let rough = QuadratureSpec {
            max_levels: 1,
            rel_tol: 1.0,
            ..*spec
        };
        let scale = crate::measures::integrate_patch(
            |u| terms(u).map(|(a, d, w)| (a.abs() + d.abs()) * w),
            &self.patch,
            &rough,
            exec,
        )?;
        Ok(Integral {
            error: value.error + 64.0 * f64::EPSILON * scale.value.abs(),
            evaluations: value.evaluations + scale.evaluations,
            ..value
        })
    }

    /// `∫ k^{L,s} (1/√L) ds_L` along boundary `i`, positively oriented.
    fn boundary_term(&self, i: usize, at: &GeometryAt, spec: &QuadratureSpec, exec: Exec) -> Result<Integral> {
        let g = &self.geometry.group;
        let b = &self.boundary[i];
        let l = at.l;
        let f = |t: f64| -> Result<f64> {
            let k = geodesic_curvature(g, at, &self.surface, &b.curve, t)?.signed;
            let ds = curve_state(g, &b.curve, t)?.frame_velocity().norm(l);
            let orient = oriented_area_density(g, &self.surface, &self.patch, b.u_at(t)?, l)?.signum();
            Ok(b.sign * orient * k * ds / l.sqrt())
        };
        crate::measures::integrate_curve(f, &b.curve, spec, exec)
    }

    /// Sign of `(e1* ∧ e2*)(f_u1, f_u2)` at the domain centre.
    pub fn surface_sign(&self) -> Result<f64> {
        let d = self.patch.domain;
        let u = [0.5 * (d[0][0] + d[0][1]), 0.5 * (d[1][0] + d[1][1])];
        Ok(oriented_area_density(&self.geometry.group, &self.surface, &self.patch, u, 1.0)?.signum())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteLResidual {
    pub at_l: f64,
    pub mode: TableMode,
    /// `∫ K^{Σ,L} (1/√L) dσ_{Σ,L}`.
    pub interior: Integral,
    /// `∫ k^{L,s} (1/√L) ds_L` per boundary component.
    pub boundary: Vec<Integral>,
    /// `2πχ/√L`.
    pub rhs: f64,
    /// Left side minus right side.
    pub residual: f64,
    /// `√L · residual`, the classical Gauss–Bonnet defect.
    pub residual_unscaled: f64,
    /// Sum of the quadrature error estimates, on the scale of `residual`.
    pub error: f64,
    pub converged: bool,
}

pub fn gb_residual_finite_l(
    sb: &SurfaceWithBoundary,
    l: f64,
    mode: TableMode,
    spec: &QuadratureSpec,
    exec: Exec,
) -> Result<FiniteLResidual> {
    let geo = sb.geometry_for(mode)?;
    let at = geo.at(l)?;
    let interior = sb.interior(&at, spec, exec)?;
    let boundary = (0..sb.boundary.len())
        .map(|i| sb.boundary_term(i, &at, spec, exec))
        .collect::<Result<Vec<_>>>()?;
    let total = boundary.iter().fold(interior, |acc, b| acc.plus(*b));
    let rhs = 2.0 * std::f64::consts::PI * sb.chi as f64 / l.sqrt();
    let residual = total.value - rhs;
    Ok(FiniteLResidual {
        at_l: l,
        mode,
        interior,
        boundary,
        rhs,
        residual,
        residual_unscaled: residual * l.sqrt(),
        error: total.error,
        converged: total.converged,
    })
}

/// Parameter intervals where `ω(γ̇)` vanishes, found by sign changes on a
/// uniform scan and bisection.
fn horizontal_roots(g: &crate::groups::GroupModel, curve: &Curve) -> Result<Vec<f64>> {
    const SCAN: usize = 1024;
    let [a, b] = curve.interval;
    let w = |t: f64| -> Result<f64> { Ok(curve_state(g, curve, t)?.omega()) };
    let ts: Vec<f64> = (0..=SCAN).map(|k| a + (b - a) * k as f64 / SCAN as f64).collect();
    let ws = ts.iter().map(|&t| w(t)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for k in 0..SCAN {
        let (mut lo, mut hi) = (ts[k], ts[k + 1]);
        let (mut wl, wh) = (ws[k], ws[k + 1]);
        if wl == 0.0 {
            roots.push(lo);
            continue;
        }
        if wl * wh >= 0.0 {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let wm = w(mid)?;
            if wm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if wl * wm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                wl = wm;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// Integral of a boundary density with bands `|t − t0| < δ` around the
/// horizontal points `t0` left out.
#[derive(Clone, Debug, Serialize)]
pub struct BandedIntegral {
    pub value: Integral,
    pub horizontal_points: Vec<f64>,
    pub half_width: f64,
    /// Fraction of the parameter interval left out.
    pub excluded_fraction: f64,
}

fn integrate_excluding<F>(f: F, curve: &Curve, roots: &[f64], rel_band: f64, spec: &QuadratureSpec, exec: Exec) -> Result<BandedIntegral>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let [a, b] = curve.interval;
    let len = b - a;
    if roots.is_empty() {
        return Ok(BandedIntegral {
            value: integrate_1d(&f, curve.interval, curve.closed, spec, exec)?,
            horizontal_points: Vec::new(),
            half_width: 0.0,
            excluded_fraction: 0.0,
        });
    }
    let d = rel_band * len;
    // pieces between consecutive bands, the last one wrapping round
    let mut pieces = Vec::new();
    for (k, r) in roots.iter().enumerate() {
        let next = if k + 1 < roots.len() { roots[k + 1] } else { roots[0] + len };
        if next - d > r + d {
            pieces.push([r + d, next - d]);
        }
    }
    let mut total = Integral::zero();
    for p in pieces {
        let g = |t: f64| f(if t >= b { t - len } else { t });
        total = total.plus(integrate_1d(g, p, false, spec, exec)?);
    }
    Ok(BandedIntegral {
        value: total,
        horizontal_points: roots.to_vec(),
        half_width: d,
        excluded_fraction: (2.0 * d * roots.len() as f64 / len).min(1.0),
    })
}

/// Relative half-width of the bands around horizontal boundary points.
pub const DEFAULT_BAND: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct AffineLimitIdentities {
    /// `∫ q̄² dσ_Σ`; zero if the first identity held.
    pub first: Integral,
    /// `−∫ q̄² dσ̄ + ∫ A dσ_Σ + Σ ∫ k^{∞,s} ds̄`, the boundary sum banded.
    pub second: Integral,
    pub q_bar_sq_sigma_bar: Integral,
    pub a_sigma: Integral,
    pub boundary: Vec<BandedIntegral>,
    /// The boundary sum recomputed with bands ten times narrower. A
    /// large change means the boundary integrand is not integrable.
    pub boundary_narrow_band: Vec<BandedIntegral>,
}

pub fn limit_identities_affine(sb: &SurfaceWithBoundary, spec: &QuadratureSpec, exec: Exec) -> Result<AffineLimitIdentities> {
    let g = &sb.geometry.group;
    if g.name() != "affine" {
        return Err(Error::UnsupportedGroup(g.name().to_string()));
    }
    let s = &sb.surface;
    let patch = &sb.patch;
    let pieces = |u: [f64; 2]| -> Result<[f64; 3]> {
        let p = patch.point(u)?;
        let forms = limit_area_forms(g, s, patch, u)?;
        let qb = surface_frames(g, s, &p, 1.0)?.q_bar;
        let a = gaussian_limit_closed(g, s, &p)?.a.unwrap_or(0.0);
        Ok([qb * qb * forms.sigma, qb * qb * forms.sigma_bar, a * forms.sigma])
    };
    let first = crate::measures::integrate_patch(|u| Ok(pieces(u)?[0]), patch, spec, exec)?;
    let q2sb = crate::measures::integrate_patch(|u| Ok(pieces(u)?[1]), patch, spec, exec)?;
    let a_sigma = crate::measures::integrate_patch(|u| Ok(pieces(u)?[2]), patch, spec, exec)?;
    let mut boundary = Vec::new();
    let mut narrow = Vec::new();
    for b in &sb.boundary {
        let roots = horizontal_roots(g, &b.curve)?;
        // k^{∞,s} ds̄ = numerator · (c1² + c2²) / (2 ω²) dt
        let f = |t: f64| -> Result<f64> {
            let (num, st) = limit_signed_numerator(g, s, &b.curve, t)?;
            let [c1, c2, w] = st.c;
            Ok(b.sign * num * (c1 * c1 + c2 * c2) / (2.0 * w * w))
        };
        boundary.push(integrate_excluding(f, &b.curve, &roots, DEFAULT_BAND, spec, exec)?);
        narrow.push(integrate_excluding(f, &b.curve, &roots, DEFAULT_BAND / 10.0, spec, exec)?);
    }
    let second = boundary
        .iter()
        .fold(a_sigma.plus(q2sb.scale(-1.0)), |acc, b| acc.plus(b.value));
    Ok(AffineLimitIdentities {
        first,
        second,
        q_bar_sq_sigma_bar: q2sb,
        a_sigma,
        boundary,
        boundary_narrow_band: narrow,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct E11LimitIdentity {
    /// `∫ K^{Σ,∞} dσ_Σ + Σ ∫ k^{∞,s} ds`.
    pub value: Integral,
    pub interior: Integral,
    pub boundary: Vec<Integral>,
}

pub fn limit_identity_e11(sb: &SurfaceWithBoundary, spec: &QuadratureSpec, exec: Exec) -> Result<E11LimitIdentity> {
    let g = &sb.geometry.group;
    if g.name() != "e11" {
        return Err(Error::UnsupportedGroup(g.name().to_string()));
    }
    let s = &sb.surface;
    let patch = &sb.patch;
    let interior = crate::measures::integrate_patch(
        |u| {
            let k = gaussian_limit_closed(g, s, &patch.point(u)?)?.limit;
            Ok(k * limit_area_forms(g, s, patch, u)?.sigma)
        },
        patch,
        spec,
        exec,
    )?;
    let boundary = sb
        .boundary
        .iter()
        .map(|b| {
            crate::measures::integrate_curve(
                |t| Ok(b.sign * limit_signed_numerator(g, s, &b.curve, t)?.0),
                &b.curve,
                spec,
                exec,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let value = boundary.iter().fold(interior, |acc, b| acc.plus(*b));
    Ok(E11LimitIdentity {
        value,
        interior,
        boundary,
    })
}

/// Finite-`L` pieces of the Gauss–Bonnet sum, multiplied by the surface
/// sign, next to the limit pieces they should approach.
#[derive(Clone, Debug, Serialize)]
pub struct LimitConsistency {
    pub grid: Vec<f64>,
    pub interior: Vec<f64>,
    pub boundary: Vec<Vec<f64>>,
    pub interior_extrapolated: f64,
    pub boundary_extrapolated: Vec<f64>,
    pub interior_limit: f64,
    pub boundary_limit: Vec<f64>,
    pub max_gap: f64,
}

/// Grid for [`e11_limit_consistency`]. Beyond `L ≈ 4^8` the finite-`L`
/// boundary terms lose digits to cancellation and bias the fit.
pub fn consistency_grid() -> Vec<f64> {
    crate::fit::geometric_grid(4.0, 2, 7)
}

/// Extrapolates the finite-`L` interior and boundary terms in powers of
/// `L^{-1/2}` and compares them with the E(1,1) limit terms.
pub fn e11_limit_consistency(
    sb: &SurfaceWithBoundary,
    grid: &[f64],
    spec: &QuadratureSpec,
    exec: Exec,
) -> Result<LimitConsistency> {
    let lim = limit_identity_e11(sb, spec, exec)?;
    let sign = sb.surface_sign()?;
    let rows = grid
        .iter()
        .map(|&l| gb_residual_finite_l(sb, l, TableMode::Reference, spec, exec))
        .collect::<Result<Vec<_>>>()?;
    let interior: Vec<f64> = rows.iter().map(|r| sign * r.interior.value).collect();
    let boundary: Vec<Vec<f64>> = (0..sb.boundary.len())
        .map(|i| rows.iter().map(|r| sign * r.boundary[i].value).collect())
        .collect();
    let exps = [0.0, -0.5, -1.0, -1.5, -2.0];
    let n = exps.len().min(grid.len());
    let extrapolate = |ys: &[f64]| -> Result<f64> { Ok(fit_powers(grid, ys, &exps[..n])?.coefficients[0]) };
    let interior_extrapolated = extrapolate(&interior)?;
    let boundary_extrapolated = boundary.iter().map(|b| extrapolate(b)).collect::<Result<Vec<_>>>()?;
    let boundary_limit: Vec<f64> = lim.boundary.iter().map(|b| b.value).collect();
    let max_gap = boundary_extrapolated
        .iter()
        .zip(&boundary_limit)
        .map(|(a, b)| (a - b).abs())
        .fold((interior_extrapolated - lim.interior.value).abs(), f64::max);
    Ok(LimitConsistency {
        grid: grid.to_vec(),
        interior,
        boundary,
        interior_extrapolated,
        boundary_extrapolated,
        interior_limit: lim.interior.value,
        boundary_limit,
        max_gap,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub mode: TableMode,
    pub values: Vec<Integral>,
    pub fit: PowerFit,
    /// Propagated quadrature error of each coefficient.
    pub error_bars: Vec<f64>,
    pub c1: f64,
    pub c0: f64,
    /// `|c1| ≤ 3 · error_bars[0]`.
    pub c1_zero_within_bars: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceSlope {
    pub grid: Vec<f64>,
    pub exponents: Vec<f64>,
    pub reference: SlopeFit,
    pub stated: Option<SlopeFit>,
    /// `−σ ∫ q̄² dσ_Σ` (affine), the coefficient of `L` the closed
    /// expansion predicts, `σ` being the surface sign.
    pub predicted_c1: Option<f64>,
}

fn slope_fit(sb: &SurfaceWithBoundary, grid: &[f64], mode: TableMode, spec: &QuadratureSpec, exec: Exec) -> Result<SlopeFit> {
    let geo = sb.geometry_for(mode)?;
    let values = grid
        .iter()
        .map(|&l| sb.interior(&geo.at(l)?, spec, exec))
        .collect::<Result<Vec<_>>>()?;
    let ys: Vec<f64> = values.iter().map(|v| v.value).collect();
    let errs: Vec<f64> = values
        .iter()
        .map(|v| v.error + 64.0 * f64::EPSILON * v.value.abs())
        .collect();
    let fit = fit_powers(grid, &ys, &DIVERGENCE_FIT_EXPONENTS)?;
    let error_bars = fit_error_bars(grid, &DIVERGENCE_FIT_EXPONENTS, &errs)?;
    let c1 = fit.coefficients[0];
    let c0 = fit.coefficients[1];
    Ok(SlopeFit {
        mode,
        values,
        c1,
        c0,
        c1_zero_within_bars: c1.abs() <= 3.0 * error_bars[0],
        fit,
        error_bars,
    })
}

pub fn divergence_slope(sb: &SurfaceWithBoundary, grid: &[f64], spec: &QuadratureSpec, exec: Exec) -> Result<DivergenceSlope> {
    if grid.len() < DIVERGENCE_FIT_EXPONENTS.len() {
        return Err(Error::Fit(format!(
            "divergence fit needs at least {} values of L",
            DIVERGENCE_FIT_EXPONENTS.len()
        )));
    }
    let reference = slope_fit(sb, grid, TableMode::Reference, spec, exec)?;
    let stated = match sb.geometry.with_reference_curvature() {
        Some(_) => Some(slope_fit(sb, grid, TableMode::Stated, spec, exec)?),
        None => None,
    };
    let predicted_c1 = if sb.geometry.group.name() == "affine" {
        let first = limit_identities_first(sb, spec, exec)?;
        Some(-sb.surface_sign()? * first.value)
    } else if sb.geometry.group.name() == "e11" {
        Some(0.0)
    } else {
        None
    };
    Ok(DivergenceSlope {
        grid: grid.to_vec(),
        exponents: DIVERGENCE_FIT_EXPONENTS.to_vec(),
        reference,
        stated,
        predicted_c1,
    })
}

/// `∫ q̄² dσ_Σ` alone.
pub fn limit_identities_first(sb: &SurfaceWithBoundary, spec: &QuadratureSpec, exec: Exec) -> Result<Integral> {
    let g = &sb.geometry.group;
    let (s, patch) = (&sb.surface, &sb.patch);
    crate::measures::integrate_patch(
        |u| {
            let qb = surface_frames(g, s, &patch.point(u)?, 1.0)?.q_bar;
            Ok(qb * qb * limit_area_forms(g, s, patch, u)?.sigma)
        },
        patch,
        spec,
        exec,
    )
}
