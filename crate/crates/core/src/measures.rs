//! Length and area measures at finite `L`, their `L → ∞` expansions, and
//! integration of densities along curves and over patches.

use serde::Serialize;

use crate::curves::{classify, curve_state, Classification, Curve};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groups::{FrameVector, GroupModel};
use crate::quadrature::{integrate_1d, integrate_2d, Integral, QuadratureSpec};
use crate::surfaces::{surface_frames, LevelSurface, ParamPatch, ON_SURFACE_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasureKind {
    #[serde(rename = "ds_L")]
    DsL,
    #[serde(rename = "ds")]
    Ds,
    #[serde(rename = "ds_bar")]
    DsBar,
    #[serde(rename = "dsigma_L")]
    SigmaL,
    #[serde(rename = "dsigma")]
    Sigma,
    #[serde(rename = "dsigma_bar")]
    SigmaBar,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::DsL => "ds_L",
            MeasureKind::Ds => "ds",
            MeasureKind::DsBar => "ds_bar",
            MeasureKind::SigmaL => "dsigma_L",
            MeasureKind::Sigma => "dsigma",
            MeasureKind::SigmaBar => "dsigma_bar",
        }
    }
}

/// Length densities against `dt` at one parameter value.
#[derive(Clone, Debug, Serialize)]
pub struct LengthDensity {
    pub t: f64,
    pub at_l: f64,
    pub classification: Classification,
    /// `‖γ̇‖_L`.
    pub ds_l: f64,
    /// `|ω(γ̇)|`.
    pub ds: f64,
    /// `(c1² + c2²) / (2|ω(γ̇)|)`, only where `ω(γ̇) ≠ 0`.
    pub ds_bar: Option<f64>,
    /// `√(c1² + c2²)/√L`, the exact value of `ds_L/√L` at horizontal points.
    pub horizontal: Option<f64>,
}

pub fn length_density(g: &GroupModel, curve: &Curve, t: f64, l: f64) -> Result<LengthDensity> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::NonPositiveL(l));
    }
    let st = curve_state(g, curve, t)?;
    let (class, _, _) = classify(&st);
    let [c1, c2, w] = st.c;
    let h = c1 * c1 + c2 * c2;
    let non_horizontal = class == Classification::NonHorizontal;
    Ok(LengthDensity {
        t,
        at_l: l,
        classification: class,
        ds_l: (h + l * w * w).sqrt(),
        ds: if non_horizontal { w.abs() } else { 0.0 },
        ds_bar: non_horizontal.then(|| h / (2.0 * w.abs())),
        horizontal: (!non_horizontal).then(|| h.sqrt() / l.sqrt()),
    })
}

/// Area densities against `du1 du2` at one patch point.
#[derive(Clone, Debug, Serialize)]
pub struct AreaDensity {
    pub u: [f64; 2],
    pub at_l: f64,
    /// `√det(g_L(f_ui, f_uj))`.
    pub density: f64,
    /// `density / √L`.
    pub scaled: f64,
    /// `lim density/√L`: the horizontal part of `f_u1 × f_u2` in frame
    /// components, `√((a2b3 − a3b2)² + (a3b1 − a1b3)²)`.
    pub limit: f64,
    /// Affine only: the limit integrand as printed, whose first bracket
    /// carries an extra `−2 (f3)_u1 (f3)_u2`. Equal to `limit` when
    /// `(f3)_u1 (f3)_u2 = 0`.
    pub limit_as_stated: Option<f64>,
}

pub fn area_density_param(g: &GroupModel, patch: &ParamPatch, u: [f64; 2], l: f64) -> Result<AreaDensity> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::NonPositiveL(l));
    }
    let (_, [a, b]) = patch.frame_tangents(g, u)?;
    let [a1, a2, a3] = a.0;
    let [b1, b2, b3] = b.0;
    // Lagrange identity for the diagonal metric; E·G − F² cancels badly
    // once L is large
    let limit = (a2 * b3 - a3 * b2).hypot(a3 * b1 - a1 * b3);
    let det = (a1 * b2 - a2 * b1).powi(2) + l * limit * limit;
    if !(det > 1e-14 * a.dot(&a, l) * b.dot(&b, l)) {
        return Err(Error::DegenerateImmersion { u1: u[0], u2: u[1] });
    }
    let density = det.sqrt();
    let limit_as_stated = if g.name() == "affine" {
        let x = patch.jets(u)?;
        let d = |i: usize, k: usize| x[i].d(k);
        let f1 = x[0].value();
        let first = (d(2, 0) * d(1, 1) - d(2, 1) * d(1, 0)) / f1 - 2.0 * d(2, 0) * d(2, 1);
        let second = (d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0)) / (f1 * f1)
            + (d(0, 1) * d(2, 0) - d(0, 0) * d(2, 1)) / f1;
        Some(first.hypot(second))
    } else {
        None
    };
    Ok(AreaDensity {
        u,
        at_l: l,
        density,
        scaled: density / l.sqrt(),
        limit,
        limit_as_stated,
    })
}

/// Pullbacks of `dσ_Σ = (p̄ω2 − q̄ω1)∧ω` and of its first-order correction
/// `dσ̄ = (X3u/l) ω1∧ω2 − ((X3u)²/2l²) dσ_Σ` through the patch.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct LimitAreaForms {
    pub sigma: f64,
    pub sigma_bar: f64,
}

fn on_surface(g: &GroupModel, s: &LevelSurface, patch: &ParamPatch, u: [f64; 2]) -> Result<[FrameVector; 2]> {
    let (p, t) = patch.frame_tangents(g, u)?;
    let residual = s.value(&p)?.abs();
    if !(residual <= ON_SURFACE_EPS.max(1e-9 * p.iter().fold(1.0f64, |m, x| m.max(x.abs())))) {
        return Err(Error::OffSurface { residual });
    }
    Ok(t)
}

pub fn limit_area_forms(g: &GroupModel, s: &LevelSurface, patch: &ParamPatch, u: [f64; 2]) -> Result<LimitAreaForms> {
    let [a, b] = on_surface(g, s, patch, u)?;
    let fr = surface_frames(g, s, &patch.point(u)?, 1.0)?;
    let (pb, qb) = (fr.p_bar, fr.q_bar);
    let [a1, a2, a3] = a.0;
    let [b1, b2, b3] = b.0;
    let sigma = (pb * a2 - qb * a1) * b3 - (pb * b2 - qb * b1) * a3;
    let ratio = fr.x3u / fr.l;
    let sigma_bar = ratio * (a1 * b2 - a2 * b1) - 0.5 * ratio * ratio * sigma;
    Ok(LimitAreaForms { sigma, sigma_bar })
}

/// `(e1* ∧ e2*)(f_u1, f_u2)`: the area density signed by the orientation
/// `(e1, e2)` that the level function induces. Its magnitude is
/// [`AreaDensity::density`].
pub fn oriented_area_density(g: &GroupModel, s: &LevelSurface, patch: &ParamPatch, u: [f64; 2], l: f64) -> Result<f64> {
    let [a, b] = on_surface(g, s, patch, u)?;
    let fr = surface_frames(g, s, &patch.point(u)?, l)?;
    let [a1, a2] = fr.tangent_components(&a);
    let [b1, b2] = fr.tangent_components(&b);
    Ok(a1 * b2 - a2 * b1)
}

/// `∫ density(t) dt` over the curve's interval; periodic when the curve
/// is closed.
pub fn integrate_curve<F>(density: F, curve: &Curve, spec: &QuadratureSpec, exec: Exec) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    integrate_1d(density, curve.interval, curve.closed, spec, exec)
}

/// `∫∫ density(u) du1 du2` over the patch domain.
pub fn integrate_patch<F>(density: F, patch: &ParamPatch, spec: &QuadratureSpec, exec: Exec) -> Result<Integral>
where
    F: Fn([f64; 2]) -> Result<f64> + Sync + Send,
{
    integrate_2d(density, patch.domain, patch.periodic, spec, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{fit_powers, geometric_grid, log_log_slope};
    use crate::groups::builtin_group;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn affine() -> GroupModel {
        builtin_group("affine").unwrap()
    }

    fn e11() -> GroupModel {
        builtin_group("e11").unwrap()
    }

    fn patch(src: [&str; 3], d: [[f64; 2]; 2]) -> ParamPatch {
        ParamPatch::parse(src, d).unwrap()
    }

    #[test]
    fn length_examples() {
        let g = affine();
        let c = Curve::parse(["1", "t", "0"], [0.0, 1.0]).unwrap();
        let d = length_density(&g, &c, 0.3, 9.0).unwrap();
        assert!((d.ds_l - 3.0).abs() < 1e-14);
        assert_eq!(d.ds, 1.0);
        assert_eq!(d.ds_bar, Some(0.0));

        let c = Curve::parse(["exp(t)", "0", "0"], [0.0, 1.0]).unwrap();
        let d = length_density(&g, &c, 0.5, 4.0).unwrap();
        assert_eq!(d.ds, 0.0);
        assert!(d.ds_bar.is_none());
        assert!((d.horizontal.unwrap() - 0.5).abs() < 1e-14);

        let c = Curve::parse(["t", "0", "0"], [0.0, 1.0]).unwrap();
        let d = length_density(&e11(), &c, 0.2, 1.0).unwrap();
        assert!((d.ds - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn non_regular_point_is_rejected() {
        let c = Curve::parse(["1 + t^2", "t^2", "0"], [-1.0, 1.0]).unwrap();
        assert!(matches!(length_density(&affine(), &c, 0.0, 1.0), Err(Error::NonRegular { .. })));
    }

    #[test]
    fn length_expansion_is_second_order() {
        let g = affine();
        let c = Curve::parse(["1 + 0.3*t", "2*sin(t)", "t^2"], [0.0, 1.0]).unwrap();
        let ls = geometric_grid(4.0, 2, 8);
        let base = length_density(&g, &c, 0.4, 1.0).unwrap();
        let (ds, dsb) = (base.ds, base.ds_bar.unwrap());
        let rem: Vec<f64> = ls
            .iter()
            .map(|&l| length_density(&g, &c, 0.4, l).unwrap().ds_l / l.sqrt() - ds - dsb / l)
            .collect();
        let inv: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
        let (slope, _) = log_log_slope(&inv, &rem).unwrap();
        assert!(slope >= 1.9, "{slope}");
    }

    #[test]
    fn area_limit_examples() {
        let g = affine();
        let p = patch(["u1", "0", "u2"], [[1.0, 3.0], [-1.0, 1.0]]);
        let d = area_density_param(&g, &p, [2.0, 0.3], 16.0).unwrap();
        assert!((d.limit - 0.5).abs() < 1e-15);
        assert_eq!(d.limit_as_stated, Some(d.limit));

        let p = patch(["u1", "u2", "0"], [[1.0, 3.0], [-1.0, 1.0]]);
        let d = area_density_param(&g, &p, [2.0, 0.3], 16.0).unwrap();
        assert!((d.limit - 0.25).abs() < 1e-15);
    }

    #[test]
    fn printed_area_limit_differs_when_f3_depends_on_both() {
        let p = patch(["u1", "u2 + u1*u2", "u1 + u2"], [[1.0, 2.0], [-1.0, 1.0]]);
        let d = area_density_param(&affine(), &p, [1.5, 0.2], 1.0).unwrap();
        assert!((d.limit - d.limit_as_stated.unwrap()).abs() > 0.1);
        // the finite-L density tracks the derived limit
        let big = area_density_param(&affine(), &p, [1.5, 0.2], 1e10).unwrap();
        assert!((big.scaled - d.limit).abs() < 1e-8);
    }

    #[test]
    fn limit_form_examples() {
        let g = affine();
        let s = LevelSurface::parse("x2").unwrap();
        let p = patch(["u1", "0", "u2"], [[1.0, 3.0], [-1.0, 1.0]]);
        let f = limit_area_forms(&g, &s, &p, [2.0, 0.4]).unwrap();
        assert!((f.sigma - 0.5).abs() < 1e-15);
        assert!((f.sigma_bar - 0.25).abs() < 1e-15);

        let s = LevelSurface::parse("x3").unwrap();
        let p = patch(["u1", "u2", "0"], [[1.0, 3.0], [-1.0, 1.0]]);
        let f = limit_area_forms(&g, &s, &p, [2.0, 0.4]).unwrap();
        assert!((f.sigma.abs() - 0.25).abs() < 1e-15);

        let s = LevelSurface::parse("x3").unwrap();
        let p = patch(["u1", "u2", "0"], [[-1.0, 1.0], [-1.0, 1.0]]);
        let f = limit_area_forms(&e11(), &s, &p, [0.3, -0.2]).unwrap();
        let d = area_density_param(&e11(), &p, [0.3, -0.2], 1.0).unwrap();
        assert!((f.sigma.abs() - d.limit).abs() < 1e-8);
    }

    #[test]
    fn off_surface_and_characteristic_points_are_errors() {
        let g = affine();
        let s = LevelSurface::parse("x2 - 1").unwrap();
        let p = patch(["u1", "0", "u2"], [[1.0, 3.0], [-1.0, 1.0]]);
        assert!(matches!(limit_area_forms(&g, &s, &p, [2.0, 0.0]), Err(Error::OffSurface { .. })));
        // X1u = X2u = 0 at (1, 1, 1)
        let s = LevelSurface::parse("x3 - x2 + (x1 - 1)^2").unwrap();
        let p = patch(["u1", "u2", "u2 - (u1 - 1)^2"], [[0.5, 1.5], [-1.0, 2.0]]);
        assert!(matches!(
            limit_area_forms(&g, &s, &p, [1.0, 1.0]),
            Err(Error::Characteristic { .. })
        ));
    }

    /// Random graph patches over `(x1, x3)` in the affine group and over
    /// `(x1, x2)` in E(1,1), with their level functions.
    fn random_surfaces(rng: &mut ChaCha8Rng) -> Vec<(GroupModel, LevelSurface, ParamPatch)> {
        let mut out = Vec::new();
        for _ in 0..3 {
            let (a, b, c) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            let s = LevelSurface::parse(&format!("x2 - ({a})*x1*x3 - ({b})*x3^2 - ({c})*x1 - 1")).unwrap();
            let p = patch(
                ["u1", &format!("({a})*u1*u2 + ({b})*u2^2 + ({c})*u1 + 1"), "u2"],
                [[1.0, 2.0], [-1.0, 1.0]],
            );
            out.push((affine(), s, p));
            let s = LevelSurface::parse(&format!("x3 - ({a})*x1*x2 - ({b})*x1^2 - ({c})*x2")).unwrap();
            let p = patch(
                ["u1", "u2", &format!("({a})*u1*u2 + ({b})*u1^2 + ({c})*u2")],
                [[-1.0, 1.0], [-1.0, 1.0]],
            );
            out.push((e11(), s, p));
        }
        out
    }

    #[test]
    fn area_routes_agree_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (g, s, p) in random_surfaces(&mut rng) {
            for _ in 0..10 {
                let u = [
                    rng.gen_range(p.domain[0][0]..p.domain[0][1]),
                    rng.gen_range(p.domain[1][0]..p.domain[1][1]),
                ];
                let f = limit_area_forms(&g, &s, &p, u).unwrap();
                let d = area_density_param(&g, &p, u, 1.0).unwrap();
                assert!((f.sigma.abs() - d.limit).abs() < 1e-8, "{} {u:?}", g.name());
            }
        }
    }

    #[test]
    fn area_expansion_first_order_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ls = geometric_grid(4.0, 4, 11);
        for (g, s, p) in random_surfaces(&mut rng) {
            let u = [
                rng.gen_range(p.domain[0][0]..p.domain[0][1]),
                rng.gen_range(p.domain[1][0]..p.domain[1][1]),
            ];
            let f = limit_area_forms(&g, &s, &p, u).unwrap();
            let ys: Vec<f64> = ls
                .iter()
                .map(|&l| oriented_area_density(&g, &s, &p, u, l).unwrap() / l.sqrt())
                .collect();
            let fit = fit_powers(&ls, &ys, &[0.0, -1.0, -2.0, -3.0]).unwrap();
            assert!((fit.coefficients[0] - f.sigma).abs() < 1e-9, "{} {:?} {}", g.name(), fit, f.sigma);
            assert!((fit.coefficients[1] - f.sigma_bar).abs() < 1e-4, "{} {:?} {}", g.name(), fit, f.sigma_bar);
            let rem: Vec<f64> = ls.iter().zip(&ys).map(|(_, y)| y - f.sigma).collect();
            let inv: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
            if rem.iter().all(|r| r.abs() > 1e-13) {
                let (slope, _) = log_log_slope(&inv, &rem).unwrap();
                assert!(slope >= 0.9, "{slope}");
            }
        }
    }

    #[test]
    fn length_converges_at_first_order() {
        let g = e11();
        let c = Curve::from_exprs(
            [
                crate::exprdsl::Expr::parse("cos(t)").unwrap(),
                crate::exprdsl::Expr::parse("2*sin(t)").unwrap(),
                crate::exprdsl::Expr::parse("0.5*t").unwrap(),
            ],
            [0.0, 0.7],
            false,
        )
        .unwrap();
        let spec = QuadratureSpec::default();
        let ds = integrate_curve(|t| Ok(length_density(&g, &c, t, 1.0)?.ds), &c, &spec, Exec::Sequential).unwrap();
        let ls = geometric_grid(4.0, 2, 7);
        let errs: Vec<f64> = ls
            .iter()
            .map(|&l| {
                let v = integrate_curve(|t| Ok(length_density(&g, &c, t, l)?.ds_l), &c, &spec, Exec::Sequential)
                    .unwrap()
                    .value;
                v / l.sqrt() - ds.value
            })
            .collect();
        let inv: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
        let (slope, _) = log_log_slope(&inv, &errs).unwrap();
        assert!(slope >= 0.9, "{slope}");
    }

    #[test]
    fn integral_examples() {
        let spec = QuadratureSpec::default();
        let g = affine();
        let c = Curve::parse(["1", "t", "0"], [0.0, 1.0]).unwrap();
        let r = integrate_curve(|t| Ok(length_density(&g, &c, t, 4.0)?.ds), &c, &spec, Exec::Sequential).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);

        let disk = patch(["2 + u1*cos(u2)", "u1*sin(u2)", "0"], [[0.0, 1.0], [0.0, 2.0 * PI]]).with_periodic([false, true]);
        let s = LevelSurface::parse("x3").unwrap();
        let r = integrate_patch(
            |u| Ok(limit_area_forms(&g, &s, &disk, u)?.sigma.abs()),
            &disk,
            &spec,
            Exec::Parallel,
        )
        .unwrap();
        assert!((r.value - 2.0 * PI * (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-8);
    }
}
