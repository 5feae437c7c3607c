//! Curvature of curves in `(G, g_L)` and its limit as `L → ∞`.
//!
//! `k^L` is computed generically from the derived connection: frame
//! components `c = B(γ) γ̇`, their `t`-derivatives from jets, and
//! `∇_γ̇ γ̇ = ċ_k + Σ c_i c_j Γ^k_ij`. The group-specific expansions below are
//! kept as independent checks.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::connection::{Geometry, GeometryAt};
use crate::error::{Error, Result};
use crate::exprdsl::{Expr, Jet, Var};
use crate::fit::{richardson, RichardsonFit};
use crate::groups::{FrameVector, GroupModel, Point};

type Sampler = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
enum Source {
    Exprs(Box<[Expr; 3]>),
    /// Point evaluator differentiated by central differences.
    Sampler { f: Sampler, scale: f64 },
}

#[derive(Clone)]
pub struct Curve {
    source: Source,
    pub interval: [f64; 2],
    pub closed: bool,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Exprs(e) => write!(f, "Curve({}, {}, {})", e[0], e[1], e[2]),
            Source::Sampler { .. } => write!(f, "Curve(<sampler>)"),
        }
    }
}

impl Curve {
    pub fn from_exprs(exprs: [Expr; 3], interval: [f64; 2], closed: bool) -> Result<Curve> {
        for e in &exprs {
            if let Some(v) = e.free_vars().into_iter().find(|v| *v != Var::T) {
                return Err(Error::UnboundVariable(format!(
                    "curve components depend on t only, found `{}`",
                    v.name()
                )));
            }
        }
        Ok(Curve {
            source: Source::Exprs(Box::new(exprs)),
            interval,
            closed,
        })
    }

    pub fn parse(src: [&str; 3], interval: [f64; 2]) -> Result<Curve> {
        let e = [Expr::parse(src[0])?, Expr::parse(src[1])?, Expr::parse(src[2])?];
        Curve::from_exprs(e, interval, false)
    }

    /// A curve known only through point evaluations. `scale` is the
    /// characteristic parameter length used to size difference steps.
    pub fn from_sampler(
        f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        interval: [f64; 2],
        scale: f64,
    ) -> Curve {
        Curve {
            source: Source::Sampler {
                f: Arc::new(f),
                scale,
            },
            interval,
            closed: false,
        }
    }

    pub fn exprs(&self) -> Option<&[Expr; 3]> {
        match &self.source {
            Source::Exprs(e) => Some(e),
            Source::Sampler { .. } => None,
        }
    }

    /// One-variable jets of the components in `t` (slot 0): order 3 for
    /// expressions, order 2 for samplers.
    pub fn jets(&self, t: f64) -> Result<[Jet; 3]> {
        match &self.source {
            Source::Exprs(e) => Ok([e[0].jet_t(t)?, e[1].jet_t(t)?, e[2].jet_t(t)?]),
            Source::Sampler { f, scale } => {
                // step ε^{1/3} for first derivatives, ε^{1/4} for second
                let h1 = f64::EPSILON.cbrt() * scale;
                let h2 = f64::EPSILON.powf(0.25) * scale;
                let x0 = f(t);
                let (p1, m1) = (f(t + h1), f(t - h1));
                let (p2, m2) = (f(t + h2), f(t - h2));
                Ok(std::array::from_fn(|i| {
                    let d1 = (p1[i] - m1[i]) / (2.0 * h1);
                    let d2 = (p2[i] - 2.0 * x0[i] + m2[i]) / (h2 * h2);
                    Jet::from_derivatives_1d(&[x0[i], d1, d2])
                }))
            }
        }
    }

    pub fn point(&self, t: f64) -> Result<Point> {
        match &self.source {
            Source::Exprs(e) => {
                let env = crate::exprdsl::Env::new().with(Var::T, t);
                Ok([e[0].eval_f64(&env)?, e[1].eval_f64(&env)?, e[2].eval_f64(&env)?])
            }
            Source::Sampler { f, .. } => Ok(f(t)),
        }
    }

    /// `γ(φ(s))` for an expression-backed curve.
    pub fn reparametrize(&self, phi: &Expr, interval: [f64; 2]) -> Result<Curve> {
        let e = self
            .exprs()
            .ok_or_else(|| Error::Empty("reparametrization of a sampled curve"))?;
        Curve::from_exprs(e.clone().map(|c| c.substitute(Var::T, phi)), interval, self.closed)
    }
}

/// Position, coordinate derivatives and frame components of `γ̇` at `t`.
#[derive(Clone, Debug, Serialize)]
pub struct CurveState {
    pub t: f64,
    pub point: Point,
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
    /// Frame components of `γ̇`; `c[2] = ω(γ̇)`.
    pub c: [f64; 3],
    /// `d/dt` of the frame components.
    pub cdot: [f64; 3],
}

impl CurveState {
    pub fn omega(&self) -> f64 {
        self.c[2]
    }

    pub fn omega_dot(&self) -> f64 {
        self.cdot[2]
    }

    pub fn speed(&self) -> f64 {
        let v = self.velocity;
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    pub fn frame_velocity(&self) -> FrameVector {
        FrameVector(self.c)
    }
}

pub fn curve_state(g: &GroupModel, curve: &Curve, t: f64) -> Result<CurveState> {
    let x = curve.jets(t)?;
    let point = [x[0].value(), x[1].value(), x[2].value()];
    g.check_point(&point)?;
    let b = g.coframe_matrix(&x)?;
    let v: [Jet; 3] = std::array::from_fn(|i| x[i].partial(0));
    let c: [Jet; 3] = std::array::from_fn(|r| {
        (0..3).fold(Jet::constant(0.0), |s, j| s.add(&b[r][j].mul(&v[j])))
    });
    let velocity = [v[0].value(), v[1].value(), v[2].value()];
    let state = CurveState {
        t,
        point,
        velocity,
        acceleration: [v[0].d(0), v[1].d(0), v[2].d(0)],
        c: [c[0].value(), c[1].value(), c[2].value()],
        cdot: [c[0].d(0), c[1].d(0), c[2].d(0)],
    };
    if !(state.speed() > 0.0) {
        return Err(Error::NonRegular { t });
    }
    Ok(state)
}

/// Frame components of `∇_γ̇ γ̇` through the connection table.
pub fn covariant_acceleration(at: &GeometryAt, s: &CurveState) -> FrameVector {
    let mut a = s.cdot;
    for (k, ak) in a.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *ak += s.c[i] * s.c[j] * at.gamma[i][j][k];
            }
        }
    }
    FrameVector(a)
}

/// `|a × b| / |b|³` in orthonormal components, which equals
/// `sqrt(|a|²/|b|⁴ − ⟨a,b⟩²/|b|⁶)` without the cancellation.
pub fn curvature_from(a: &FrameVector, b: &FrameVector, l: f64) -> f64 {
    let s = l.sqrt();
    let a = [a.0[0], a.0[1], s * a.0[2]];
    let b = [b.0[0], b.0[1], s * b.0[2]];
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt() / nb.powi(3)
}

pub fn curve_curvature_at(at: &GeometryAt, s: &CurveState) -> f64 {
    curvature_from(&covariant_acceleration(at, s), &s.frame_velocity(), at.l)
}

/// `k^L_γ(t)`.
pub fn curve_curvature(geo: &Geometry, curve: &Curve, t: f64, l: f64) -> Result<f64> {
    let at = geo.at(l)?;
    let s = curve_state(&geo.group, curve, t)?;
    Ok(curve_curvature_at(&at, &s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    NonHorizontal,
    HorizontalFlat,
    HorizontalTransition,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::NonHorizontal => "non-horizontal",
            Classification::HorizontalFlat => "horizontal-flat",
            Classification::HorizontalTransition => "horizontal-transition",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveCurvatureLimit {
    pub classification: Classification,
    /// `k^∞` for the first two classes, `lim k^L/√L` for the transition class.
    pub value: f64,
    pub omega: f64,
    pub omega_dot: f64,
    pub threshold: f64,
    /// Set when a classifying quantity lies within a decade of the threshold.
    pub warning: Option<String>,
}

/// Relative horizontality threshold, scaled by the coordinate speed.
pub const HORIZONTAL_EPS: f64 = 1e-9;

pub fn classify(s: &CurveState) -> (Classification, f64, Option<String>) {
    let eps = HORIZONTAL_EPS * s.speed();
    let near = |x: f64| x.abs() > 0.1 * eps && x.abs() < 10.0 * eps;
    let mut warning = None;
    if near(s.omega()) {
        warning = Some(format!("|omega| = {:e} within a decade of threshold {eps:e}", s.omega().abs()));
    }
    let class = if s.omega().abs() > eps {
        Classification::NonHorizontal
    } else {
        if near(s.omega_dot()) {
            warning = Some(format!(
                "|d omega/dt| = {:e} within a decade of threshold {eps:e}",
                s.omega_dot().abs()
            ));
        }
        if s.omega_dot().abs() > eps {
            Classification::HorizontalTransition
        } else {
            Classification::HorizontalFlat
        }
    };
    (class, eps, warning)
}

/// Limit of `k^L` by the closed forms for the affine group and E(1,1).
pub fn curve_curvature_limit(g: &GroupModel, curve: &Curve, t: f64) -> Result<CurveCurvatureLimit> {
    let s = curve_state(g, curve, t)?;
    let (class, threshold, warning) = classify(&s);
    let value = match g.name() {
        "affine" => affine_limit(&s, class)?,
        "e11" => e11_limit(&s, class)?,
        other => return Err(Error::UnsupportedGroup(other.to_string())),
    };
    Ok(CurveCurvatureLimit {
        classification: class,
        value,
        omega: s.omega(),
        omega_dot: s.omega_dot(),
        threshold,
        warning,
    })
}

fn flat_limit(num_sq: f64, dot: f64, d: f64, t: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::DegenerateTransition { t });
    }
    Ok((num_sq / (d * d) - dot * dot / (d * d * d)).max(0.0).sqrt())
}

fn affine_limit(s: &CurveState, class: Classification) -> Result<f64> {
    let [g1, _, _] = s.point;
    let [v1, v2, v3] = s.velocity;
    let [a1, _, a3] = s.acceleration;
    let d = (v1 / g1).powi(2) + v3 * v3;
    match class {
        Classification::NonHorizontal => Ok((v1 * v1 + v2 * v2).sqrt() / (g1.abs() * s.omega().abs())),
        Classification::HorizontalFlat => {
            let m = (a1 * g1 - v1 * v1) / (g1 * g1);
            let dot = (a1 * v1 * g1 - v1.powi(3)) / g1.powi(3) + v3 * a3;
            flat_limit(m * m + a3 * a3, dot, d, s.t)
        }
        Classification::HorizontalTransition => {
            if !(d > 0.0) {
                return Err(Error::DegenerateTransition { t: s.t });
            }
            Ok(s.omega_dot().abs() / d)
        }
    }
}

fn e11_limit(s: &CurveState, class: Classification) -> Result<f64> {
    let [_, _, g3] = s.point;
    let [v1, v2, v3] = s.velocity;
    let [a1, a2, a3] = s.acceleration;
    let (ep, em) = (g3.exp(), (-g3).exp());
    let h = -em * v1 + ep * v2;
    let d = 0.5 * h * h + v3 * v3;
    let m = a2 * ep + v2 * v3 * ep - a1 * em + v1 * v3 * em;
    match class {
        Classification::NonHorizontal => Ok(d.sqrt() / s.omega().abs()),
        Classification::HorizontalFlat => {
            flat_limit(a3 * a3 + 0.5 * m * m, v3 * a3 + 0.5 * h * m, d, s.t)
        }
        Classification::HorizontalTransition => {
            if !(d > 0.0) {
                return Err(Error::DegenerateTransition { t: s.t });
            }
            Ok(s.omega_dot().abs() / d)
        }
    }
}

/// Group-specific expansion of `∇_γ̇ γ̇` for the affine group.
pub fn affine_covariant_acceleration_closed(s: &CurveState, l: f64) -> FrameVector {
    let [g1, _, _] = s.point;
    let [v1, v2, _] = s.velocity;
    let [a1, _, a3] = s.acceleration;
    let w = s.omega();
    FrameVector([
        (a1 * g1 - v1 * v1) / (g1 * g1) + l * w * v2 / g1,
        a3 - l * w * v1 / g1,
        s.omega_dot() - w * v1 / g1,
    ])
}

/// Group-specific expansion of `∇_γ̇ γ̇` for E(1,1).
pub fn e11_covariant_acceleration_closed(s: &CurveState, l: f64) -> FrameVector {
    let [_, _, g3] = s.point;
    let [v1, v2, v3] = s.velocity;
    let [a1, a2, a3] = s.acceleration;
    let (ep, em) = (g3.exp(), (-g3).exp());
    let h = -em * v1 + ep * v2;
    let w = s.omega();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    FrameVector([
        a3 + r * (l + 1.0) * h * w,
        r * (a2 * ep + v2 * v3 * ep - a1 * em + v1 * v3 * em) - l * w * v3,
        s.omega_dot() - r / l * h * v3,
    ])
}

/// Closed-form `k^L` for the affine group in coordinate derivatives.
pub fn affine_curvature_closed(s: &CurveState, l: f64) -> f64 {
    let [g1, _, _] = s.point;
    let [v1, v2, v3] = s.velocity;
    let [a1, _, a3] = s.acceleration;
    let w = s.omega();
    let x = (a1 * g1 - v1 * v1) / (g1 * g1) + l * w * v2 / g1;
    let y = a3 - l * w * v1 / g1;
    let z = s.omega_dot() - w * v1 / g1;
    let n = (v1 / g1).powi(2) + v3 * v3 + l * w * w;
    let dot = v1 / g1 * x + v3 * y + l * w * z;
    ((x * x + y * y + l * z * z) / (n * n) - dot * dot / n.powi(3)).max(0.0).sqrt()
}

/// Closed-form `k^L` for the affine group at a horizontal point.
pub fn affine_curvature_closed_horizontal(s: &CurveState, l: f64) -> f64 {
    let [g1, _, _] = s.point;
    let [v1, _, v3] = s.velocity;
    let [a1, _, a3] = s.acceleration;
    let m = (a1 * g1 - v1 * v1) / (g1 * g1);
    let n = (v1 / g1).powi(2) + v3 * v3;
    let dot = (a1 * v1 * g1 - v1.powi(3)) / g1.powi(3) + v3 * a3;
    ((m * m + a3 * a3 + l * s.omega_dot().powi(2)) / (n * n) - dot * dot / n.powi(3))
        .max(0.0)
        .sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveExtrapolation {
    pub classification: Classification,
    pub grid: Vec<f64>,
    /// `k^L`, or `k^L/√L` in the transition case.
    pub values: Vec<f64>,
    pub fit: RichardsonFit,
    /// Closed-form limit when the group has one.
    pub predicted: Option<f64>,
}

/// Extrapolates `k^L` (or `k^L/√L`) along a geometric grid of `L`.
pub fn extrapolate_curvature(
    geo: &Geometry,
    curve: &Curve,
    t: f64,
    grid: &[f64],
    exec: crate::exec::Exec,
) -> Result<CurveExtrapolation> {
    let s = curve_state(&geo.group, curve, t)?;
    let (class, _, _) = classify(&s);
    let values = exec.try_map(grid, |&l| -> Result<f64> {
        let k = curve_curvature_at(&geo.at(l)?, &s);
        Ok(if class == Classification::HorizontalTransition {
            k / l.sqrt()
        } else {
            k
        })
    })?;
    let fit = richardson(grid, &values)?;
    let predicted = match curve_curvature_limit(&geo.group, curve, t) {
        Ok(lim) => Some(lim.value),
        Err(Error::UnsupportedGroup(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CurveExtrapolation {
        classification: class,
        grid: grid.to_vec(),
        values,
        fit,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::fit::geometric_grid;

    fn affine() -> Geometry {
        Geometry::builtin("affine").unwrap()
    }

    fn e11() -> Geometry {
        Geometry::builtin("e11").unwrap()
    }

    fn curve(s: [&str; 3]) -> Curve {
        Curve::parse(s, [-1.0, 1.0]).unwrap()
    }

    #[test]
    fn affine_vertical_line_has_unit_curvature() {
        let g = affine();
        let c = curve(["1", "t", "0"]);
        for l in [0.3, 1.0, 17.0, 1e4] {
            for t in [-0.5, 0.0, 0.9] {
                let k = curve_curvature(&g, &c, t, l).unwrap();
                assert!((k - 1.0).abs() < 1e-12, "L={l}: {k}");
            }
        }
    }

    #[test]
    fn integral_curves_of_x1_are_geodesics() {
        let k = curve_curvature(&affine(), &curve(["exp(t)", "0", "0"]), 0.2, 5.0).unwrap();
        assert!(k.abs() < 1e-13);
        let k = curve_curvature(&e11(), &curve(["0", "0", "t"]), 0.2, 5.0).unwrap();
        assert!(k.abs() < 1e-13);
    }

    #[test]
    fn limit_examples() {
        let a = affine();
        let lim = curve_curvature_limit(&a.group, &curve(["1", "t", "0"]), 0.0).unwrap();
        assert_eq!(lim.classification, Classification::NonHorizontal);
        assert!((lim.value - 1.0).abs() < 1e-15);
        let e = e11();
        let lim = curve_curvature_limit(&e.group, &curve(["t", "-t", "0"]), 0.0).unwrap();
        assert_eq!(lim.classification, Classification::HorizontalFlat);
        assert!(lim.value.abs() < 1e-15);
        let err = curve_curvature_limit(&a.group, &curve(["1", "t^2/2", "0"]), 0.0).unwrap_err();
        assert!(matches!(err, Error::NonRegular { .. }));
        let h = Geometry::builtin("heisenberg").unwrap();
        assert!(matches!(
            curve_curvature_limit(&h.group, &curve(["t", "0", "0"]), 0.0),
            Err(Error::UnsupportedGroup(_))
        ));
    }

    #[test]
    fn transition_point() {
        // ω = t, so ω(0) = 0 and dω/dt = 1; horizontal speed 1
        let a = affine();
        let c = curve(["1", "t + t^2/2", "t"]);
        let lim = curve_curvature_limit(&a.group, &c, 0.0).unwrap();
        assert_eq!(lim.classification, Classification::HorizontalTransition);
        assert!((lim.value - 1.0).abs() < 1e-14);
        let ex = extrapolate_curvature(&a, &c, 0.0, &geometric_grid(4.0, 1, 10), Exec::Sequential).unwrap();
        assert!((ex.fit.limit - 1.0).abs() < 1e-6, "{:?}", ex.fit);
    }

    #[test]
    fn generic_non_horizontal_extrapolation() {
        let a = affine();
        let c = curve(["1 + t", "t", "t^2"]);
        let ex = extrapolate_curvature(&a, &c, 0.0, &geometric_grid(4.0, 1, 10), Exec::Sequential).unwrap();
        assert_eq!(ex.classification, Classification::NonHorizontal);
        let want = 2f64.sqrt();
        assert!((ex.predicted.unwrap() - want).abs() < 1e-14);
        assert!((ex.fit.limit - want).abs() < 1e-6, "{:?}", ex.fit);
        let p = ex.fit.order.unwrap();
        assert!((p - 1.0).abs() < 0.1, "order {p}");
    }

    #[test]
    fn constant_sequences() {
        let grid = geometric_grid(4.0, 1, 10);
        let ex = extrapolate_curvature(&affine(), &curve(["1", "t", "0"]), 0.0, &grid, Exec::Sequential).unwrap();
        assert!((ex.fit.limit - 1.0).abs() < 1e-12);
        let ex = extrapolate_curvature(&e11(), &curve(["0", "0", "t"]), 0.0, &grid, Exec::Sequential).unwrap();
        assert!(ex.fit.limit.abs() < 1e-12);
    }

    #[test]
    fn sampler_agrees_with_expressions() {
        let a = affine();
        let c = curve(["1 + t", "t", "t^2"]);
        let sampled = Curve::from_sampler(|t| [1.0 + t, t, t * t], [-1.0, 1.0], 1.0);
        for l in [1.0, 10.0] {
            let k1 = curve_curvature(&a, &c, 0.3, l).unwrap();
            let k2 = curve_curvature(&a, &sampled, 0.3, l).unwrap();
            assert!((k1 - k2).abs() < 1e-6 * k1.abs().max(1.0), "{k1} vs {k2}");
        }
    }

    #[test]
    fn classification_warning_band() {
        let a = affine();
        // ω = 5e-9 with unit-ish speed sits inside the warning decade
        let c = curve(["1 + t", "(1 + t)*5e-9", "0"]);
        let lim = curve_curvature_limit(&a.group, &c, 0.0).unwrap();
        assert!(lim.warning.is_some(), "{lim:?}");
    }
}
