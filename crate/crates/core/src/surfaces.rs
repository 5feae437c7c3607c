//! Surfaces `Σ = {u = 0}` in `(G, g_L)`: the adapted frame, the second
//! fundamental form, Gaussian and mean curvature with their limits, and the
//! geodesic curvature of curves lying on `Σ`.
//!
//! Frame vectors carry components on `X1, X2, X3`, so the `X̃3 = L^{-1/2} X3`
//! coefficients of the adapted frame appear divided by `√L`.

use serde::Serialize;

use crate::connection::{Geometry, GeometryAt};
use crate::curves::{classify, covariant_acceleration, curve_state, Classification, Curve, CurveState};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::exprdsl::{Env, Expr, Jet, Var, JET_ORDER};
use crate::fit::{fit_powers, richardson, PowerFit, RichardsonFit};
use crate::groups::{FrameVector, GroupModel, Point};

/// Relative threshold on `|∇_H u|` below which a point is characteristic.
pub const CHARACTERISTIC_EPS: f64 = 1e-8;
/// Relative tolerance on `|u(p)|` for a point to count as on the surface.
pub const ON_SURFACE_EPS: f64 = 1e-9;
/// Absolute tolerance on `|u(γ(t))|` for a curve on the surface.
pub const CURVE_ON_SURFACE_EPS: f64 = 1e-8;
/// Relative tolerance on `⟨γ̇, v_L⟩_L / ‖γ̇‖_L`.
pub const TANGENCY_EPS: f64 = 1e-8;

/// Exponents of the model `c₁ L + c₀ + Σ c₋ₖ L^{-k}` for Gaussian curvature.
/// The corrections observed on smooth surfaces come in whole powers of
/// `1/L`; a `L^{-1/2}` column only dilutes the fit.
pub const GAUSSIAN_FIT_EXPONENTS: [f64; 5] = [1.0, 0.0, -1.0, -2.0, -3.0];

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveL(l))
    }
}

/// `{u = 0}`, oriented by `∇u`.
#[derive(Clone, Debug)]
pub struct LevelSurface {
    u: Expr,
}

impl LevelSurface {
    pub fn new(u: Expr) -> Result<Self> {
        if let Some(v) = u.free_vars().into_iter().find(|v| !Var::XYZ.contains(v)) {
            return Err(Error::UnboundVariable(format!(
                "surface functions depend on x1, x2, x3 only, found `{}`",
                v.name()
            )));
        }
        Ok(LevelSurface { u })
    }

    pub fn parse(src: &str) -> Result<Self> {
        LevelSurface::new(Expr::parse(src)?)
    }

    pub fn expr(&self) -> &Expr {
        &self.u
    }

    /// The same set with the opposite orientation.
    pub fn flipped(&self) -> Self {
        LevelSurface {
            u: Expr::Neg(Box::new(self.u.clone())),
        }
    }

    pub fn value(&self, p: &Point) -> Result<f64> {
        self.u.eval_f64(&Env::xyz(*p))
    }
}

/// `f(u1, u2)` over a rectangle.
#[derive(Clone, Debug)]
pub struct ParamPatch {
    f: Box<[Expr; 3]>,
    pub domain: [[f64; 2]; 2],
    /// Axes along which the patch closes up.
    pub periodic: [bool; 2],
}

impl ParamPatch {
    pub fn new(f: [Expr; 3], domain: [[f64; 2]; 2]) -> Result<Self> {
        for e in &f {
            if let Some(v) = e.free_vars().into_iter().find(|v| !matches!(v, Var::U1 | Var::U2)) {
                return Err(Error::UnboundVariable(format!(
                    "patch components depend on u1, u2 only, found `{}`",
                    v.name()
                )));
            }
        }
        for (i, d) in domain.iter().enumerate() {
            if !(d[0] < d[1]) || !d[0].is_finite() || !d[1].is_finite() {
                return Err(Error::InvalidGroup(format!("patch axis {} has empty range", i + 1)));
            }
        }
        Ok(ParamPatch {
            f: Box::new(f),
            domain,
            periodic: [false, false],
        })
    }

    pub fn parse(src: [&str; 3], domain: [[f64; 2]; 2]) -> Result<Self> {
        ParamPatch::new(
            [Expr::parse(src[0])?, Expr::parse(src[1])?, Expr::parse(src[2])?],
            domain,
        )
    }

    pub fn with_periodic(mut self, periodic: [bool; 2]) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn exprs(&self) -> &[Expr; 3] {
        &self.f
    }

    pub fn point(&self, u: [f64; 2]) -> Result<Point> {
        let env = Env::new().with(Var::U1, u[0]).with(Var::U2, u[1]);
        Ok([
            self.f[0].eval_f64(&env)?,
            self.f[1].eval_f64(&env)?,
            self.f[2].eval_f64(&env)?,
        ])
    }

    /// Jets in `(u1, u2)` (slots 0, 1) of the three components.
    pub fn jets(&self, u: [f64; 2]) -> Result<[Jet; 3]> {
        Ok([
            self.f[0].jet_u(u[0], u[1])?,
            self.f[1].jet_u(u[0], u[1])?,
            self.f[2].jet_u(u[0], u[1])?,
        ])
    }

    /// `f_{u1}`, `f_{u2}` as frame vectors at `f(u)`.
    pub fn frame_tangents(&self, g: &GroupModel, u: [f64; 2]) -> Result<(Point, [FrameVector; 2])> {
        let x = self.jets(u)?;
        let p = [x[0].value(), x[1].value(), x[2].value()];
        g.check_point(&p)?;
        let b = g.coframe_matrix(&p)?;
        let t = [0, 1].map(|k| {
            FrameVector(std::array::from_fn(|i| (0..3).map(|a| b[i][a] * x[a].d(k)).sum()))
        });
        Ok((p, t))
    }
}

/// Largest `|u(f(u1, u2))|` on an `n × n` grid of cell midpoints.
pub fn pairing_residual(s: &LevelSurface, patch: &ParamPatch, n: usize) -> Result<f64> {
    let [d1, d2] = patch.domain;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let u1 = d1[0] + (i as f64 + 0.5) / n as f64 * (d1[1] - d1[0]);
            let u2 = d2[0] + (j as f64 + 0.5) / n as f64 * (d2[1] - d2[0]);
            worst = worst.max(s.value(&patch.point([u1, u2])?)?.abs());
        }
    }
    Ok(worst)
}

/// `X_i u` near a point as jets in `(x1, x2, x3)`, together with the frame
/// matrix at the point for one more frame derivative.
struct Local {
    a: [[f64; 3]; 3],
    xu: [Jet; 3],
    u: f64,
    grad_scale: f64,
}

impl Local {
    fn new(g: &GroupModel, s: &LevelSurface, p: &Point) -> Result<Local> {
        g.check_point(p)?;
        let x: [Jet; 3] = std::array::from_fn(|i| Jet::variable(p[i], i, JET_ORDER));
        let env = Env::new()
            .with(Var::X1, x[0].clone())
            .with(Var::X2, x[1].clone())
            .with(Var::X3, x[2].clone());
        let u = s.u.eval(&env)?;
        let aj = g.frame_matrix(&x)?;
        let du: [Jet; 3] = std::array::from_fn(|a| u.partial(a));
        let xu = std::array::from_fn(|i| {
            (0..3).fold(Jet::constant(0.0), |acc, a| acc.add(&aj[i][a].mul(&du[a])))
        });
        Ok(Local {
            a: std::array::from_fn(|i| std::array::from_fn(|j| aj[i][j].value())),
            xu,
            u: u.value(),
            grad_scale: du.iter().fold(0.0f64, |m, d| m.max(d.value().abs())),
        })
    }

    /// `X_i f` at the point.
    fn x(&self, i: usize, f: &Jet) -> f64 {
        (0..3).map(|a| self.a[i][a] * f.d(a)).sum()
    }

    fn characteristic_threshold(&self) -> f64 {
        CHARACTERISTIC_EPS * self.grad_scale
    }
}

/// The normalized gradient quantities as jets.
struct Adapted {
    x3u: Jet,
    r: Jet,
    l: Jet,
    pb: Jet,
    qb: Jet,
    pbl: Jet,
    qbl: Jet,
    rbl: Jet,
}

fn adapted(loc: &Local, l_metric: f64) -> Result<Adapted> {
    let [p, q, x3u] = loc.xu.clone();
    let norm = p.value().hypot(q.value());
    let threshold = loc.characteristic_threshold();
    if !(norm >= threshold) || norm == 0.0 {
        return Err(Error::Characteristic { norm, threshold });
    }
    let r = x3u.scale(1.0 / l_metric.sqrt());
    let l2 = p.mul(&p).add(&q.mul(&q));
    let l = l2.sqrt()?;
    let ll = l2.add(&r.mul(&r)).sqrt()?;
    Ok(Adapted {
        pb: p.div(&l)?,
        qb: q.div(&l)?,
        pbl: p.div(&ll)?,
        qbl: q.div(&ll)?,
        rbl: r.div(&ll)?,
        x3u,
        r,
        l,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceFrameData {
    pub point: Point,
    /// The metric parameter `L`.
    pub at_l: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub x3u: f64,
    pub l: f64,
    pub l_l: f64,
    pub p_bar: f64,
    pub q_bar: f64,
    pub p_bar_l: f64,
    pub q_bar_l: f64,
    pub r_bar_l: f64,
    pub v_l: FrameVector,
    pub e1: FrameVector,
    pub e2: FrameVector,
}

impl SurfaceFrameData {
    fn from_jets(point: Point, l_metric: f64, loc: &Local, ad: &Adapted) -> Self {
        let sl = l_metric.sqrt();
        let (p, q) = (loc.xu[0].value(), loc.xu[1].value());
        let (l, r) = (ad.l.value(), ad.r.value());
        let l_l = (l * l + r * r).sqrt();
        let (pb, qb) = (ad.pb.value(), ad.qb.value());
        let (pbl, qbl, rbl) = (ad.pbl.value(), ad.qbl.value(), ad.rbl.value());
        SurfaceFrameData {
            point,
            at_l: l_metric,
            p,
            q,
            r,
            x3u: ad.x3u.value(),
            l,
            l_l,
            p_bar: pb,
            q_bar: qb,
            p_bar_l: pbl,
            q_bar_l: qbl,
            r_bar_l: rbl,
            v_l: FrameVector([pbl, qbl, rbl / sl]),
            e1: FrameVector([qb, -pb, 0.0]),
            e2: FrameVector([rbl * pb, rbl * qb, -(l / l_l) / sl]),
        }
    }

    /// Components of `w` on `(e1, e2)`.
    pub fn tangent_components(&self, w: &FrameVector) -> [f64; 2] {
        [w.dot(&self.e1, self.at_l), w.dot(&self.e2, self.at_l)]
    }

    /// `J_L`, with `J_L e1 = e2` and `J_L e2 = −e1`.
    pub fn j(&self, w: &FrameVector) -> FrameVector {
        let [a, b] = self.tangent_components(w);
        self.e2.scale(a).sub(&self.e1.scale(b))
    }

    /// Largest violation of `p̄² + q̄² = 1` and orthonormality of `(e1, e2, v_L)`.
    pub fn orthonormality_defect(&self) -> f64 {
        let l = self.at_l;
        let b = [self.e1, self.e2, self.v_l];
        let mut worst = (self.p_bar * self.p_bar + self.q_bar * self.q_bar - 1.0).abs();
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((b[i].dot(&b[j], l) - delta).abs());
            }
        }
        worst
    }
}

fn frame_at(g: &GroupModel, s: &LevelSurface, p: &Point, l: f64) -> Result<(Local, Adapted, SurfaceFrameData)> {
    check_l(l)?;
    let loc = Local::new(g, s, p)?;
    let ad = adapted(&loc, l)?;
    let data = SurfaceFrameData::from_jets(*p, l, &loc, &ad);
    Ok((loc, ad, data))
}

/// Whether `p` is a characteristic point of `s`.
pub fn is_characteristic(g: &GroupModel, s: &LevelSurface, p: &Point) -> Result<bool> {
    let loc = Local::new(g, s, p)?;
    match adapted(&loc, 1.0) {
        Ok(_) => Ok(false),
        Err(Error::Characteristic { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// The adapted frame at a point of the surface.
pub fn surface_frames(g: &GroupModel, s: &LevelSurface, p: &Point, l: f64) -> Result<SurfaceFrameData> {
    let (loc, _, data) = frame_at(g, s, p, l)?;
    if loc.u.abs() > ON_SURFACE_EPS * loc.grad_scale.max(1.0) {
        return Err(Error::OffSurface { residual: loc.u.abs() });
    }
    Ok(data)
}

/// `h[i][j] = ⟨∇_{e_i} v_L, e_j⟩_L`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct SecondFundamentalForm {
    pub h: [[f64; 2]; 2],
    pub at_l: f64,
}

impl SecondFundamentalForm {
    pub fn det(&self) -> f64 {
        self.h[0][0] * self.h[1][1] - self.h[0][1] * self.h[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.h[0][0] + self.h[1][1]
    }

    pub fn asymmetry(&self) -> f64 {
        (self.h[0][1] - self.h[1][0]).abs()
    }

    pub fn max_diff(&self, o: &SecondFundamentalForm) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.h[i][j] - o.h[i][j]).abs());
            }
        }
        m
    }
}

/// Second fundamental form by covariant differentiation of the normal
/// field `v_L` built from the level function.
pub fn second_fundamental_form_def(
    g: &GroupModel,
    at: &GeometryAt,
    s: &LevelSurface,
    p: &Point,
) -> Result<SecondFundamentalForm> {
    let l = at.l;
    let (loc, ad, fr) = frame_at(g, s, p, l)?;
    let field = [ad.pbl.clone(), ad.qbl.clone(), ad.rbl.scale(1.0 / l.sqrt())];
    let e = [fr.e1, fr.e2];
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        let mut dv = at.nabla(&e[i], &fr.v_l);
        for (m, f) in field.iter().enumerate() {
            dv.0[m] += (0..3).map(|j| e[i].0[j] * loc.x(j, f)).sum::<f64>();
        }
        for k in 0..2 {
            h[i][k] = dv.dot(&e[k], l);
        }
    }
    Ok(SecondFundamentalForm { h, at_l: l })
}

/// Second fundamental form from the closed expressions in `p̄, q̄, r̄_L` and
/// their horizontal derivatives (affine group and E(1,1)).
pub fn second_fundamental_form_closed(
    g: &GroupModel,
    s: &LevelSurface,
    p: &Point,
    l: f64,
) -> Result<SecondFundamentalForm> {
    let (loc, ad, fr) = frame_at(g, s, p, l)?;
    let sl = l.sqrt();
    let (pb, qb) = (fr.p_bar, fr.q_bar);
    let (pbl, qbl, rbl) = (fr.p_bar_l, fr.q_bar_l, fr.r_bar_l);
    let ratio = fr.l / fr.l_l;
    let div = loc.x(0, &ad.pb) + loc.x(1, &ad.qb);
    let along_e1 = |f: &Jet| qb * loc.x(0, f) - pb * loc.x(1, f);
    let along_e2 = |f: &Jet| rbl * (pb * loc.x(0, f) + qb * loc.x(1, f));
    let r_over_l = ad.r.div(&ad.l)?;
    let x3_tilde = |f: &Jet| loc.x(2, f) / sl;
    let (h11, h12, h22) = match g.name() {
        "affine" => (
            ratio * div,
            -along_e1(&ad.rbl) / ratio - sl / 2.0,
            -ratio * ratio * along_e2(&r_over_l) + x3_tilde(&ad.rbl) - pbl,
        ),
        "e11" => (
            ratio * div - pb * qb * rbl / sl,
            -along_e1(&ad.rbl) / ratio - sl / 2.0
                + (qbl * qbl - pbl * pbl) / (2.0 * sl)
                + rbl * rbl * (qb * qb - pb * pb) / (2.0 * sl),
            -ratio * ratio * along_e2(&r_over_l)
                + x3_tilde(&ad.rbl)
                + pbl * qbl * rbl / sl
                + pb * qb * rbl.powi(3) / sl,
        ),
        other => return Err(Error::UnsupportedGroup(other.to_string())),
    };
    Ok(SecondFundamentalForm {
        h: [[h11, h12], [h12, h22]],
        at_l: l,
    })
}

/// `H_L = tr II^L`.
pub fn mean_curvature(g: &GroupModel, at: &GeometryAt, s: &LevelSurface, p: &Point) -> Result<f64> {
    Ok(second_fundamental_form_def(g, at, s, p)?.trace())
}

/// `lim H_L`: `X1(p̄) + X2(q̄) − p̄` (affine), `X1(p̄) + X2(q̄)` (E(1,1)).
pub fn mean_curvature_limit(g: &GroupModel, s: &LevelSurface, p: &Point) -> Result<f64> {
    let (loc, ad, fr) = frame_at(g, s, p, 1.0)?;
    let div = loc.x(0, &ad.pb) + loc.x(1, &ad.qb);
    match g.name() {
        "affine" => Ok(div - fr.p_bar),
        "e11" => Ok(div),
        other => Err(Error::UnsupportedGroup(other.to_string())),
    }
}

/// `K^{Σ,L} = K^L(e1, e2) + det II^L`, with the ambient curvature taken
/// from whichever table `at` was built from.
pub fn gaussian_curvature_extrinsic(g: &GroupModel, at: &GeometryAt, s: &LevelSurface, p: &Point) -> Result<f64> {
    let (ambient, det) = gauss_equation_terms(g, at, s, p)?;
    Ok(ambient + det)
}

/// `(K^L(e1, e2), det II^L)`, the two terms of the Gauss equation.
pub fn gauss_equation_terms(g: &GroupModel, at: &GeometryAt, s: &LevelSurface, p: &Point) -> Result<(f64, f64)> {
    let fr = surface_frames(g, s, p, at.l)?;
    let ambient = at.sectional_curvature(&fr.e1, &fr.e2)?;
    Ok((ambient, second_fundamental_form_def(g, at, s, p)?.det()))
}

/// `E, F, G` of the induced metric as jets in `(u1, u2)`, exact to order 2.
pub fn first_fundamental_form(g: &GroupModel, patch: &ParamPatch, u: [f64; 2], l: f64) -> Result<[Jet; 3]> {
    check_l(l)?;
    let x = patch.jets(u)?;
    g.check_point(&[x[0].value(), x[1].value(), x[2].value()])?;
    let b = g.coframe_matrix(&x)?;
    let c: [[Jet; 3]; 2] = [0, 1].map(|k| {
        std::array::from_fn(|i| (0..3).fold(Jet::constant(0.0), |s, a| s.add(&b[i][a].mul(&x[a].partial(k)))))
    });
    let w = [1.0, 1.0, l];
    let ip = |a: &[Jet; 3], b: &[Jet; 3]| {
        (0..3).fold(Jet::constant(0.0), |s, i| s.add(&a[i].mul(&b[i]).scale(w[i])))
    };
    let (e, f, gg) = (ip(&c[0], &c[0]), ip(&c[0], &c[1]), ip(&c[1], &c[1]));
    let det = e.value() * gg.value() - f.value() * f.value();
    if !(det > 1e-14 * e.value() * gg.value()) {
        return Err(Error::DegenerateImmersion { u1: u[0], u2: u[1] });
    }
    Ok([e, f, gg])
}

/// Gaussian curvature of the induced metric by the Brioschi formula.
pub fn gaussian_curvature_intrinsic(g: &GroupModel, patch: &ParamPatch, u: [f64; 2], l: f64) -> Result<f64> {
    let [e, f, gg] = first_fundamental_form(g, patch, u, l)?;
    let (ev, fv, gv) = (e.value(), f.value(), gg.value());
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 = [
        [
            -0.5 * e.d2(1, 1) + f.d2(0, 1) - 0.5 * gg.d2(0, 0),
            0.5 * e.d(0),
            f.d(0) - 0.5 * e.d(1),
        ],
        [f.d(1) - 0.5 * gg.d(0), ev, fv],
        [0.5 * gg.d(1), fv, gv],
    ];
    let m2 = [
        [0.0, 0.5 * e.d(1), 0.5 * gg.d(0)],
        [0.5 * e.d(1), ev, fv],
        [0.5 * gg.d(0), fv, gv],
    ];
    let w = ev * gv - fv * fv;
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// Limit data for `K^{Σ,L}` as `L → ∞`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitCurvatureBreakdown {
    pub group: String,
    /// `"closed"` for the closed expressions, `"fitted"` for the numeric route.
    pub mode: &'static str,
    /// Coefficient of `L`.
    pub divergence: f64,
    /// Constant term.
    pub limit: f64,
    /// The affine constant `A`.
    pub a: Option<f64>,
    pub mean_curvature_limit: f64,
    pub fit: Option<PowerFit>,
    pub mean_curvature_fit: Option<RichardsonFit>,
}

/// Limit of `K^{Σ,L}` from the closed expressions: `−q̄² L + A` (affine),
/// `−⟨e1, ∇_H(X3u/l)⟩ − (X3u)²/l²` (E(1,1)).
pub fn gaussian_limit_closed(g: &GroupModel, s: &LevelSurface, p: &Point) -> Result<LimitCurvatureBreakdown> {
    let (loc, ad, fr) = frame_at(g, s, p, 1.0)?;
    let (pb, qb) = (fr.p_bar, fr.q_bar);
    let ratio = ad.x3u.div(&ad.l)?;
    let rv = ratio.value();
    let along_e1 = qb * loc.x(0, &ratio) - pb * loc.x(1, &ratio);
    let div = loc.x(0, &ad.pb) + loc.x(1, &ad.qb);
    let (divergence, limit, a) = match g.name() {
        "affine" => {
            let a = -along_e1 - pb * div - pb * pb * rv * rv + 2.0 * qb * rv;
            (-qb * qb, a, Some(a))
        }
        "e11" => (0.0, -along_e1 - rv * rv, None),
        other => return Err(Error::UnsupportedGroup(other.to_string())),
    };
    Ok(LimitCurvatureBreakdown {
        group: g.name().to_string(),
        mode: "closed",
        divergence,
        limit,
        a,
        mean_curvature_limit: mean_curvature_limit(g, s, p)?,
        fit: None,
        mean_curvature_fit: None,
    })
}

/// `K^{Σ,L}` and `H_L` along a geometric `L` grid, fitted against
/// [`GAUSSIAN_FIT_EXPONENTS`] and extrapolated respectively.
pub fn gaussian_limit_numeric(
    geo: &Geometry,
    s: &LevelSurface,
    p: &Point,
    grid: &[f64],
    exec: Exec,
) -> Result<LimitCurvatureBreakdown> {
    let g = &geo.group;
    let rows = exec.try_map(grid, |&l| -> Result<(f64, f64)> {
        let at = geo.at(l)?;
        Ok((gaussian_curvature_extrinsic(g, &at, s, p)?, mean_curvature(g, &at, s, p)?))
    })?;
    let (ks, hs): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let fit = fit_powers(grid, &ks, &GAUSSIAN_FIT_EXPONENTS)?;
    let hfit = richardson(grid, &hs)?;
    Ok(LimitCurvatureBreakdown {
        group: g.name().to_string(),
        mode: "fitted",
        divergence: fit.coefficients[0],
        limit: fit.coefficients[1],
        a: None,
        mean_curvature_limit: hfit.limit,
        fit: Some(fit),
        mean_curvature_fit: Some(hfit),
    })
}

/// Geodesic curvature of a curve on `Σ` at one `t` and `L`.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicCurvature {
    pub t: f64,
    pub at_l: f64,
    pub unsigned: f64,
    pub signed: f64,
    /// `⟨γ̇, v_L⟩_L / ‖γ̇‖_L`.
    pub tangency_residual: f64,
    /// Distance between the projection by inner products against `e1, e2`
    /// and `∇_γ̇ γ̇` minus its normal part.
    pub projection_residual: f64,
}

/// Curve state at `t` with the checks that it lies on and is tangent to `Σ`.
fn state_on_surface(
    g: &GroupModel,
    s: &LevelSurface,
    curve: &Curve,
    t: f64,
    l: f64,
) -> Result<(CurveState, SurfaceFrameData, f64)> {
    let st = curve_state(g, curve, t)?;
    let residual = s.value(&st.point)?.abs();
    if !(residual <= CURVE_ON_SURFACE_EPS) {
        return Err(Error::CurveOffSurface { t, residual });
    }
    let (_, _, fr) = frame_at(g, s, &st.point, l)?;
    let w = st.frame_velocity();
    let tangency = w.dot(&fr.v_l, l) / w.norm(l);
    if !(tangency.abs() <= TANGENCY_EPS) {
        return Err(Error::NotTangent { t, residual: tangency });
    }
    Ok((st, fr, tangency))
}

pub fn geodesic_curvature(
    g: &GroupModel,
    at: &GeometryAt,
    s: &LevelSurface,
    curve: &Curve,
    t: f64,
) -> Result<GeodesicCurvature> {
    let l = at.l;
    let (st, fr, tangency) = state_on_surface(g, s, curve, t, l)?;
    let a = covariant_acceleration(at, &st);
    let [t1, t2] = fr.tangent_components(&st.frame_velocity());
    let [a1, a2] = fr.tangent_components(&a);
    let n = (t1 * t1 + t2 * t2).sqrt();
    let signed = (t1 * a2 - t2 * a1) / n.powi(3);
    let normal_part = a.dot(&fr.v_l, l);
    let projected = fr.e1.scale(a1).add(&fr.e2.scale(a2));
    let projection_residual = a.sub(&fr.v_l.scale(normal_part)).sub(&projected).norm(l);
    Ok(GeodesicCurvature {
        t,
        at_l: l,
        unsigned: signed.abs(),
        signed,
        tangency_residual: tangency,
        projection_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicCurvatureLimit {
    pub classification: Classification,
    /// `k^{∞,s}`, or `lim k^{L,s}/√L` at a transition point.
    pub signed: f64,
    /// `|signed|`; in a 2-plane the unsigned curvature is the absolute value
    /// of the signed one at every `L`.
    pub unsigned: f64,
    /// The unsigned limit as the closed expression prints it. For E(1,1)
    /// non-horizontal points this is `sqrt(½q̄²h² + p̄²γ̇3²)/|ω|`, which
    /// lacks the cross term of `|signed|`.
    pub unsigned_as_stated: f64,
    pub omega: f64,
    pub omega_dot: f64,
    pub threshold: f64,
    pub warning: Option<String>,
}

/// Tangential speed in the limit, the non-horizontal numerator
/// `k^{∞,s}·|ω|` and its printed unsigned counterpart.
fn limit_pieces(g: &GroupModel, st: &CurveState, fr: &SurfaceFrameData) -> Result<(f64, f64, f64)> {
    let (pb, qb) = (fr.p_bar, fr.q_bar);
    let [v1, v2, v3] = st.velocity;
    match g.name() {
        "affine" => {
            let g1 = st.point[0];
            let num = (pb * v1 + qb * v2) / g1;
            Ok((qb * v1 / g1 - pb * v3, num, num.abs()))
        }
        "e11" => {
            let g3 = st.point[2];
            let h = -(-g3).exp() * v1 + g3.exp() * v2;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            Ok((
                qb * v3 - r * pb * h,
                pb * v3 + r * qb * h,
                (0.5 * qb * qb * h * h + pb * pb * v3 * v3).sqrt(),
            ))
        }
        other => Err(Error::UnsupportedGroup(other.to_string())),
    }
}

/// `k^{∞,s}·|ω(γ̇)|`, the limit boundary integrand against `dt`. It stays
/// finite through horizontal points, where `k^{∞,s}` itself is undefined.
pub fn limit_signed_numerator(g: &GroupModel, s: &LevelSurface, curve: &Curve, t: f64) -> Result<(f64, CurveState)> {
    let (st, fr, _) = state_on_surface(g, s, curve, t, 1.0)?;
    let (_, numerator, _) = limit_pieces(g, &st, &fr)?;
    Ok((numerator, st))
}

pub fn geodesic_curvature_limit(
    g: &GroupModel,
    s: &LevelSurface,
    curve: &Curve,
    t: f64,
) -> Result<GeodesicCurvatureLimit> {
    let (st, fr, _) = state_on_surface(g, s, curve, t, 1.0)?;
    let (class, threshold, warning) = classify(&st);
    let w = st.omega();
    let wd = st.omega_dot();
    let (tangential, numerator, stated) = limit_pieces(g, &st, &fr)?;
    let (signed, unsigned_as_stated) = match class {
        Classification::NonHorizontal => (numerator / w.abs(), stated / w.abs()),
        Classification::HorizontalFlat => (0.0, 0.0),
        Classification::HorizontalTransition => {
            if !(tangential.abs() > 0.0) {
                return Err(Error::DegenerateTransition { t });
            }
            let v = -tangential * wd / tangential.abs().powi(3);
            (v, v.abs())
        }
    };
    Ok(GeodesicCurvatureLimit {
        classification: class,
        signed,
        unsigned: signed.abs(),
        unsigned_as_stated,
        omega: w,
        omega_dot: wd,
        threshold,
        warning,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicExtrapolation {
    pub classification: Classification,
    pub grid: Vec<f64>,
    /// `k^{L,s}`, or `k^{L,s}/√L` in the transition case.
    pub values: Vec<f64>,
    pub fit: RichardsonFit,
    pub predicted: Option<f64>,
}

pub fn extrapolate_geodesic_curvature(
    geo: &Geometry,
    s: &LevelSurface,
    curve: &Curve,
    t: f64,
    grid: &[f64],
    exec: Exec,
) -> Result<GeodesicExtrapolation> {
    let g = &geo.group;
    let (st, _, _) = state_on_surface(g, s, curve, t, 1.0)?;
    let (class, _, _) = classify(&st);
    let values = exec.try_map(grid, |&l| -> Result<f64> {
        let k = geodesic_curvature(g, &geo.at(l)?, s, curve, t)?.signed;
        Ok(if class == Classification::HorizontalTransition {
            k / l.sqrt()
        } else {
            k
        })
    })?;
    let fit = richardson(grid, &values)?;
    let predicted = match geodesic_curvature_limit(g, s, curve, t) {
        Ok(lim) => Some(lim.signed),
        Err(Error::UnsupportedGroup(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(GeodesicExtrapolation {
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
    use crate::fit::geometric_grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geo(name: &str) -> Geometry {
        Geometry::builtin(name).unwrap()
    }

    fn surf(src: &str) -> LevelSurface {
        LevelSurface::parse(src).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    /// Affine surface with its graph patch over `(x1, x3)`.
    fn affine_generic() -> (LevelSurface, ParamPatch) {
        (
            surf("x2 + 0.3*x3^2 - 0.2*x1*x3 - 1"),
            ParamPatch::parse(["u1", "1 - 0.3*u2^2 + 0.2*u1*u2", "u2"], [[1.0, 2.0], [-1.0, 1.0]]).unwrap(),
        )
    }

    fn e11_generic() -> (LevelSurface, ParamPatch) {
        (
            surf("x3 - 0.1*x1*x2"),
            ParamPatch::parse(["u1", "u2", "0.1*u1*u2"], [[-1.0, 1.0], [-1.0, 1.0]]).unwrap(),
        )
    }

    fn e11_curved() -> (LevelSurface, ParamPatch) {
        (
            surf("x1 + 0.2*sin(x2) + 0.1*x3^2 - 0.5"),
            ParamPatch::parse(["0.5 - 0.2*sin(u1) - 0.1*u2^2", "u1", "u2"], [[-1.0, 1.0], [-1.0, 1.0]]).unwrap(),
        )
    }

    fn random_points(patch: &ParamPatch, n: usize, seed: u64) -> Vec<(Point, [f64; 2])> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [d1, d2] = patch.domain;
        (0..n)
            .map(|_| {
                let u = [rng.gen_range(d1[0]..d1[1]), rng.gen_range(d2[0]..d2[1])];
                (patch.point(u).unwrap(), u)
            })
            .collect()
    }

    #[test]
    fn affine_frame_example() {
        let g = geo("affine").group;
        let fr = surface_frames(&g, &surf("x2"), &[2.0, 0.0, 5.0], 4.0).unwrap();
        assert_eq!((fr.p, fr.q, fr.l), (0.0, 2.0, 2.0));
        assert!(close(fr.l_l, 5f64.sqrt(), 1e-15));
        assert_eq!(fr.e1, FrameVector::X1);
        let c = 1.0 / 5f64.sqrt();
        assert!((fr.e2.0[1] - c).abs() < 1e-15 && (fr.e2.0[2] + c).abs() < 1e-15);
        assert!(fr.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn e11_frame_example() {
        let g = geo("e11").group;
        for l in [1.0, 7.0] {
            let fr = surface_frames(&g, &surf("x3"), &[0.4, -1.2, 0.0], l).unwrap();
            assert_eq!((fr.p, fr.q, fr.r), (1.0, 0.0, 0.0));
            assert_eq!(fr.v_l, FrameVector::X1);
            assert_eq!(fr.e1, FrameVector([0.0, -1.0, 0.0]));
            assert!((fr.e2.0[2] + 1.0 / l.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn characteristic_points_are_refused() {
        let g = geo("affine").group;
        // X1 u = X2 u = 0 at x3 = 0
        let s = surf("x2 - x3 - x3^2/2 + 0*x1");
        let p = [1.0, 0.0, 0.0];
        assert!(is_characteristic(&g, &s, &p).unwrap());
        assert!(matches!(surface_frames(&g, &s, &p, 1.0), Err(Error::Characteristic { .. })));
        let at = geo("affine").at(1.0).unwrap();
        assert!(second_fundamental_form_def(&g, &at, &s, &p).is_err());
        assert!(!is_characteristic(&g, &surf("x1 - 1"), &[1.0, 3.0, 0.0]).unwrap());
    }

    #[test]
    fn off_surface_points_are_refused() {
        let g = geo("affine").group;
        assert!(matches!(
            surface_frames(&g, &surf("x2"), &[1.0, 0.1, 0.0], 1.0),
            Err(Error::OffSurface { .. })
        ));
    }

    #[test]
    fn affine_plane_second_fundamental_form() {
        let geo = geo("affine");
        for l in [1.0, 4.0, 100.0] {
            let at = geo.at(l).unwrap();
            let want = [[0.0, -l.sqrt() / 2.0], [-l.sqrt() / 2.0, 0.0]];
            for p in [[1.0, 0.0, 0.0], [2.5, 0.0, -1.0]] {
                let d = second_fundamental_form_def(&geo.group, &at, &surf("x2"), &p).unwrap();
                let c = second_fundamental_form_closed(&geo.group, &surf("x2"), &p, l).unwrap();
                let w = SecondFundamentalForm { h: want, at_l: l };
                assert!(d.max_diff(&w) < 1e-12, "{d:?}");
                assert!(c.max_diff(&w) < 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn definition_and_closed_routes_agree() {
        let cases = [("affine", affine_generic()), ("e11", e11_generic()), ("e11", e11_curved())];
        for (k, (name, (s, patch))) in cases.iter().enumerate() {
            let geo = geo(name);
            for l in [1.0, 4.0, 100.0] {
                let at = geo.at(l).unwrap();
                for (p, _) in random_points(patch, 10, 3 + k as u64) {
                    let d = second_fundamental_form_def(&geo.group, &at, s, &p).unwrap();
                    let c = second_fundamental_form_closed(&geo.group, s, &p, l).unwrap();
                    assert!(d.max_diff(&c) < 1e-8, "{name} L={l} at {p:?}: {d:?} vs {c:?}");
                    assert!(d.asymmetry() < 1e-9);
                }
            }
        }
        let e11 = geo("e11");
        let at = e11.at(3.0).unwrap();
        let p = [0.3, 0.7, 0.0];
        let d = second_fundamental_form_def(&e11.group, &at, &surf("x3"), &p).unwrap();
        let c = second_fundamental_form_closed(&e11.group, &surf("x3"), &p, 3.0).unwrap();
        assert!(d.max_diff(&c) < 1e-8);
    }

    #[test]
    fn closed_route_needs_a_known_group() {
        let g = geo("heisenberg").group;
        assert!(matches!(
            second_fundamental_form_closed(&g, &surf("x3 - 0.1*x1"), &[0.0, 0.0, 0.0], 1.0),
            Err(Error::UnsupportedGroup(_))
        ));
    }

    /// The four model surfaces with their patches and exact curvature.
    fn model_surfaces() -> Vec<(&'static str, LevelSurface, ParamPatch, f64)> {
        vec![
            ("affine", surf("x2"), ParamPatch::parse(["u1", "0", "u2"], [[1.0, 3.0], [-1.0, 1.0]]).unwrap(), 0.0),
            ("affine", surf("x3"), ParamPatch::parse(["u1", "u2", "0"], [[1.0, 3.0], [-1.0, 1.0]]).unwrap(), -1.0),
            ("e11", surf("x3"), ParamPatch::parse(["u1", "u2", "0"], [[-1.0, 1.0], [-1.0, 1.0]]).unwrap(), 0.0),
            ("e11", surf("x1 - 0.7"), ParamPatch::parse(["0.7", "u1", "u2"], [[-1.0, 1.0], [-1.0, 1.0]]).unwrap(), -1.0),
        ]
    }

    #[test]
    fn model_surface_curvatures() {
        for (k, (name, s, patch, want)) in model_surfaces().into_iter().enumerate() {
            let geo = geo(name);
            for l in [1.0, 4.0, 100.0] {
                let at = geo.at(l).unwrap();
                for (p, u) in random_points(&patch, 4, k as u64) {
                    let ext = gaussian_curvature_extrinsic(&geo.group, &at, &s, &p).unwrap();
                    let int = gaussian_curvature_intrinsic(&geo.group, &patch, u, l).unwrap();
                    assert!((ext - want).abs() < 1e-9, "{name} {:?} L={l}: extrinsic {ext}", s.expr().to_string());
                    assert!((int - want).abs() < 1e-9, "{name} L={l}: intrinsic {int}");
                }
            }
        }
    }

    #[test]
    fn gauss_equation_on_generic_surfaces() {
        for (name, (s, patch)) in [("affine", affine_generic()), ("e11", e11_generic()), ("e11", e11_curved())] {
            let geo = geo(name);
            for l in [1.0, 4.0, 100.0] {
                let at = geo.at(l).unwrap();
                for (p, u) in random_points(&patch, 5, 11) {
                    let ext = gaussian_curvature_extrinsic(&geo.group, &at, &s, &p).unwrap();
                    let int = gaussian_curvature_intrinsic(&geo.group, &patch, u, l).unwrap();
                    let rel = (ext - int).abs() / int.abs().max(1e-3);
                    assert!(rel < 1e-6, "{name} L={l}: {ext} vs {int}");
                }
            }
        }
    }

    #[test]
    fn mean_curvature_limits() {
        let a = geo("affine").group;
        let e = geo("e11").group;
        assert_eq!(mean_curvature_limit(&a, &surf("x2"), &[1.5, 0.0, 0.3]).unwrap(), 0.0);
        assert_eq!(mean_curvature_limit(&a, &surf("x3"), &[1.5, 0.2, 0.0]).unwrap(), 0.0);
        assert!(mean_curvature_limit(&e, &surf("x1"), &[0.0, 0.2, 0.4]).unwrap().abs() < 1e-15);
        let grid = geometric_grid(4.0, 2, 9);
        for (geo, (s, patch)) in [(geo("affine"), affine_generic()), (geo("e11"), e11_curved())] {
            for (p, _) in random_points(&patch, 3, 5) {
                let closed = mean_curvature_limit(&geo.group, &s, &p).unwrap();
                let num = gaussian_limit_numeric(&geo, &s, &p, &grid, Exec::Sequential).unwrap();
                assert!(
                    (num.mean_curvature_limit - closed).abs() < 1e-5,
                    "{}: {} vs {closed}",
                    geo.group.name(),
                    num.mean_curvature_limit
                );
            }
        }
    }

    #[test]
    fn closed_form_limits() {
        let a = geo("affine").group;
        let e = geo("e11").group;
        let b = gaussian_limit_closed(&a, &surf("x2"), &[1.7, 0.0, 0.4]).unwrap();
        assert!((b.a.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(b.divergence, -1.0);
        let b = gaussian_limit_closed(&e, &surf("x3"), &[0.2, 0.1, 0.0]).unwrap();
        assert_eq!(b.limit, 0.0);
        let b = gaussian_limit_closed(&e, &surf("x1"), &[0.0, 0.5, -0.3]).unwrap();
        assert!((b.limit + 1.0).abs() < 1e-14);
    }

    #[test]
    fn numeric_limits_on_model_surfaces() {
        let grid = geometric_grid(4.0, 2, 9);
        for (name, s, patch, want) in model_surfaces() {
            let geo = geo(name);
            let (p, _) = random_points(&patch, 1, 2)[0];
            let b = gaussian_limit_numeric(&geo, &s, &p, &grid, Exec::default()).unwrap();
            assert!(b.divergence.abs() < 1e-9, "{name}: {b:?}");
            assert!((b.limit - want).abs() < 1e-7, "{name}: {b:?}");
        }
    }

    #[test]
    fn e11_limit_matches_the_fit() {
        let grid = geometric_grid(4.0, 2, 9);
        let geo = geo("e11");
        for (s, patch) in [e11_generic(), e11_curved()] {
            for (p, _) in random_points(&patch, 10, 17) {
                let closed = gaussian_limit_closed(&geo.group, &s, &p).unwrap();
                let num = gaussian_limit_numeric(&geo, &s, &p, &grid, Exec::default()).unwrap();
                assert!(num.divergence.abs() < 1e-4, "{num:?}");
                assert!((num.limit - closed.limit).abs() < 1e-4, "{} vs {}", num.limit, closed.limit);
            }
        }
    }

    #[test]
    fn affine_limit_disagrees_with_the_fit_on_the_plane() {
        // K^{Σ,L} is identically 0 on {x2 = 0}; the closed expression
        // predicts −L + 2.
        let grid = geometric_grid(4.0, 2, 9);
        let geo = geo("affine");
        let p = [1.4, 0.0, 0.2];
        let closed = gaussian_limit_closed(&geo.group, &surf("x2"), &p).unwrap();
        let num = gaussian_limit_numeric(&geo, &surf("x2"), &p, &grid, Exec::default()).unwrap();
        assert_eq!((closed.divergence, closed.limit), (-1.0, 2.0));
        assert!(num.divergence.abs() < 1e-9 && num.limit.abs() < 1e-7);
    }

    #[test]
    fn geodesic_curvature_examples() {
        let geo_a = geo("affine");
        let line = Curve::parse(["1", "t", "0"], [0.0, 1.0]).unwrap();
        let lim = geodesic_curvature_limit(&geo_a.group, &surf("x3"), &line, 0.0).unwrap();
        assert_eq!(lim.classification, Classification::NonHorizontal);
        assert_eq!((lim.signed, lim.unsigned), (1.0, 1.0));
        let grid = geometric_grid(4.0, 1, 10);
        let ex = extrapolate_geodesic_curvature(&geo_a, &surf("x3"), &line, 0.0, &grid, Exec::default()).unwrap();
        assert!((ex.fit.limit - 1.0).abs() < 1e-4, "{ex:?}");

        let circle = Curve::parse(["2 + cos(t)", "0", "sin(t)"], [0.0, 6.3]).unwrap();
        let lim = geodesic_curvature_limit(&geo_a.group, &surf("x2"), &circle, 0.0).unwrap();
        assert_eq!(lim.signed, 0.0);

        let flat = Curve::parse(["exp(t)", "0", "0"], [0.0, 1.0]).unwrap();
        let lim = geodesic_curvature_limit(&geo_a.group, &surf("x2"), &flat, 0.3).unwrap();
        assert_eq!(lim.classification, Classification::HorizontalFlat);
        assert_eq!(lim.signed, 0.0);
    }

    #[test]
    fn geodesic_transition_matches_extrapolation() {
        let geo_a = geo("affine");
        let s = surf("x2 - x3 - x3^2/2 + (x1 - 1)");
        let c = Curve::parse(["1", "t + t^2/2", "t"], [-1.0, 1.0]).unwrap();
        let lim = geodesic_curvature_limit(&geo_a.group, &s, &c, 0.0).unwrap();
        assert_eq!(lim.classification, Classification::HorizontalTransition);
        let grid = geometric_grid(4.0, 4, 12);
        let ex = extrapolate_geodesic_curvature(&geo_a, &s, &c, 0.0, &grid, Exec::default()).unwrap();
        assert!((ex.fit.limit - lim.signed).abs() < 1e-4, "{ex:?} vs {lim:?}");
    }

    #[test]
    fn e11_unsigned_limit_is_the_absolute_signed_limit() {
        // a curve on {x3 = 0.1 x1 x2} with ω(γ̇) ≠ 0
        let geo = geo("e11");
        let (s, _) = e11_generic();
        let c = Curve::parse(["cos(t)", "2*sin(t)", "0.2*cos(t)*sin(t)"], [0.0, 6.3]).unwrap();
        let t = 0.4;
        let lim = geodesic_curvature_limit(&geo.group, &s, &c, t).unwrap();
        assert_eq!(lim.classification, Classification::NonHorizontal);
        let grid = geometric_grid(4.0, 4, 12);
        let ex = extrapolate_geodesic_curvature(&geo, &s, &c, t, &grid, Exec::default()).unwrap();
        assert!((ex.fit.limit - lim.signed).abs() < 1e-4, "{ex:?} vs {lim:?}");
        let k = geodesic_curvature(&geo.group, &geo.at(4f64.powi(12)).unwrap(), &s, &c, t).unwrap();
        assert!((k.unsigned - lim.unsigned).abs() < 1e-3);
        assert!((lim.unsigned - lim.unsigned_as_stated).abs() > 1e-3, "{lim:?}");
    }

    #[test]
    fn curves_off_the_surface_are_refused() {
        let geo = geo("affine");
        let at = geo.at(1.0).unwrap();
        let c = Curve::parse(["1", "t", "0.1"], [0.0, 1.0]).unwrap();
        assert!(matches!(
            geodesic_curvature(&geo.group, &at, &surf("x3"), &c, 0.0),
            Err(Error::CurveOffSurface { .. })
        ));
    }

    #[test]
    fn projection_is_consistent() {
        let geo = geo("affine");
        let (s, _) = affine_generic();
        // x2 = 1 - 0.3 x3² + 0.2 x1 x3 along x1 = 1 + t/4, x3 = t
        let c = Curve::parse(["1 + t/4", "1 - 0.3*t^2 + 0.2*(1 + t/4)*t", "t"], [-1.0, 1.0]).unwrap();
        for l in [1.0, 9.0] {
            let at = geo.at(l).unwrap();
            let k = geodesic_curvature(&geo.group, &at, &s, &c, 0.3).unwrap();
            assert!(k.projection_residual < 1e-10, "{k:?}");
            assert!(k.tangency_residual.abs() < 1e-12);
        }
    }

    #[test]
    fn flipping_orientation_flips_signed_curvature() {
        let geo = geo("affine");
        let at = geo.at(4.0).unwrap();
        let c = Curve::parse(["1 + t/4", "1 - 0.3*t^2 + 0.2*(1 + t/4)*t", "t"], [-1.0, 1.0]).unwrap();
        let (s, _) = affine_generic();
        let k = geodesic_curvature(&geo.group, &at, &s, &c, 0.2).unwrap();
        let kf = geodesic_curvature(&geo.group, &at, &s.flipped(), &c, 0.2).unwrap();
        assert!((k.signed + kf.signed).abs() < 1e-12);
        assert!((k.unsigned - kf.unsigned).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn frame_is_orthonormal(u1 in 1.0f64..2.0, u2 in -1.0f64..1.0, l in 0.1f64..1e4) {
            let (s, patch) = affine_generic();
            let g = geo("affine").group;
            let fr = surface_frames(&g, &s, &patch.point([u1, u2]).unwrap(), l).unwrap();
            prop_assert!(fr.orthonormality_defect() < 1e-10);
        }

        #[test]
        fn j_is_a_rotation(a in -3.0f64..3.0, b in -3.0f64..3.0, u1 in -1.0f64..1.0, u2 in -1.0f64..1.0, l in 0.1f64..1e3) {
            let (s, patch) = e11_curved();
            let g = geo("e11").group;
            let fr = surface_frames(&g, &s, &patch.point([u1, u2]).unwrap(), l).unwrap();
            let w = fr.e1.scale(a).add(&fr.e2.scale(b));
            let jj = fr.j(&fr.j(&w));
            prop_assert!(jj.add(&w).norm(l) < 1e-10 * (1.0 + w.norm(l)));
            prop_assert!((fr.j(&w).norm(l) - w.norm(l)).abs() < 1e-10 * (1.0 + w.norm(l)));
        }
    }
}
