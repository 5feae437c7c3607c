//! Gauss–Legendre panels on open intervals and the trapezoid rule on
//! periodic ones, refined by doubling until successive estimates agree.
//!
//! Every level is evaluated through [`Exec::try_map`] and summed in node
//! order with compensated summation, so results do not depend on the
//! execution policy.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel. Periodic axes start from `2 * order`
    /// equispaced nodes.
    pub order: usize,
    /// Number of doublings after the initial rule.
    pub max_levels: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 12,
            max_levels: 6,
            rel_tol: 1e-11,
            abs_tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tol: f64) -> Self {
        QuadratureSpec {
            rel_tol: tol,
            abs_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_tol = |t: f64| t.is_finite() && t >= 0.0;
        if self.order < 2 || self.order > 64 {
            return Err(Error::QuadratureSetup(format!("quadrature order {} outside 2..=64", self.order)));
        }
        if self.max_levels == 0 || self.max_levels > 12 {
            return Err(Error::QuadratureSetup(format!(
                "refinement limit {} outside 1..=12",
                self.max_levels
            )));
        }
        if !ok_tol(self.rel_tol) || !ok_tol(self.abs_tol) || self.rel_tol + self.abs_tol == 0.0 {
            return Err(Error::QuadratureSetup("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }

    fn accepts(&self, err: f64, value: f64) -> bool {
        err <= self.abs_tol + self.rel_tol * value.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    /// Difference between the last two levels plus a rounding floor.
    pub error: f64,
    pub levels: u32,
    pub evaluations: usize,
    pub converged: bool,
}

impl Integral {
    /// Turns an unconverged result into [`Error::Quadrature`].
    pub fn require(self) -> Result<Integral> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Quadrature {
                value: self.value,
                error: self.error,
            })
        }
    }

    pub fn scale(self, s: f64) -> Integral {
        Integral {
            value: self.value * s,
            error: self.error * s.abs(),
            ..self
        }
    }

    /// Sum of two independent integrals; errors add.
    pub fn plus(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            error: self.error + o.error,
            levels: self.levels.max(o.levels),
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
        }
    }

    pub fn zero() -> Integral {
        Integral {
            value: 0.0,
            error: 0.0,
            levels: 0,
            evaluations: 0,
            converged: true,
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub–Welsch: eigenvalues of the Jacobi matrix, weights from the
    // first component of each eigenvector
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrise so odd integrands cancel exactly
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Compensated sum and the sum of magnitudes.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    let mut a = 0.0f64;
    for x in xs {
        a += x.abs();
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    (s + c, a)
}

/// One axis at refinement level `level`.
fn axis_rule(range: [f64; 2], periodic: bool, gl: &(Vec<f64>, Vec<f64>), level: u32) -> Vec<(f64, f64)> {
    let [a, b] = range;
    if periodic {
        let n = 2 * gl.0.len() << level;
        let h = (b - a) / n as f64;
        (0..n).map(|i| (a + i as f64 * h, h)).collect()
    } else {
        let panels = 1usize << level;
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * gl.0.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in gl.0.iter().zip(&gl.1) {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        out
    }
}

fn refine<P: Sync, F>(spec: &QuadratureSpec, exec: Exec, nodes: impl Fn(u32) -> Vec<(P, f64)>, f: F) -> Result<Integral>
where
    F: Fn(&P) -> Result<f64> + Sync + Send,
{
    spec.validate()?;
    let mut prev: Option<f64> = None;
    let mut evaluations = 0;
    let mut last = Integral::zero();
    for level in 0..=spec.max_levels {
        let pts = nodes(level);
        let vals = exec.try_map(&pts, |(p, w)| f(p).map(|v| v * w))?;
        evaluations += vals.len();
        if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::Quadrature { value: *v, error: f64::INFINITY });
        }
        let (value, mag) = neumaier_sum(vals);
        let floor = 8.0 * f64::EPSILON * mag;
        if let Some(p) = prev {
            let error = (value - p).abs() + floor;
            last = Integral {
                value,
                error,
                levels: level,
                evaluations,
                converged: spec.accepts(error, value),
            };
            if last.converged {
                return Ok(last);
            }
        }
        prev = Some(value);
    }
    Ok(last)
}

/// `∫ f` over `range`. Periodic ranges use the trapezoid rule.
pub fn integrate_1d<F>(f: F, range: [f64; 2], periodic: bool, spec: &QuadratureSpec, exec: Exec) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    check_range(range)?;
    let gl = gauss_legendre(spec.order);
    refine(spec, exec, |k| axis_rule(range, periodic, &gl, k), |t| f(*t))
}

/// `∫∫ f du1 du2` over a rectangle, tensor rule refined on both axes.
pub fn integrate_2d<F>(
    f: F,
    domain: [[f64; 2]; 2],
    periodic: [bool; 2],
    spec: &QuadratureSpec,
    exec: Exec,
) -> Result<Integral>
where
    F: Fn([f64; 2]) -> Result<f64> + Sync + Send,
{
    check_range(domain[0])?;
    check_range(domain[1])?;
    let gl = gauss_legendre(spec.order);
    let nodes = |k| {
        let a = axis_rule(domain[0], periodic[0], &gl, k);
        let b = axis_rule(domain[1], periodic[1], &gl, k);
        let mut out = Vec::with_capacity(a.len() * b.len());
        for (x, wx) in &a {
            for (y, wy) in &b {
                out.push(([*x, *y], wx * wy));
            }
        }
        out
    };
    refine(spec, exec, nodes, |u| f(*u))
}

fn check_range(r: [f64; 2]) -> Result<()> {
    if r[0].is_finite() && r[1].is_finite() && r[0] < r[1] {
        Ok(())
    } else {
        Err(Error::QuadratureSetup(format!("bad integration range [{}, {}]", r[0], r[1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_is_exact_to_degree_2n_minus_1() {
        for n in [2, 5, 12, 20] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got}");
            }
        }
    }

    #[test]
    fn closed_constant_density() {
        let r = integrate_1d(|_| Ok(1.0), [0.0, 2.0 * PI], true, &QuadratureSpec::default(), Exec::Sequential).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn periodic_rule_is_spectral() {
        // ∫ e^{cos t} dt = 2π I0(1)
        let i0 = 1.266_065_877_752_008_4;
        let r = integrate_1d(|t| Ok(t.cos().exp()), [0.0, 2.0 * PI], true, &QuadratureSpec::default(), Exec::Sequential)
            .unwrap();
        assert!((r.value - 2.0 * PI * i0).abs() < 1e-13);
        assert_eq!(r.levels, 1);
    }

    #[test]
    fn disk_in_polar_coordinates() {
        // ∫ x1^{-2} over the unit disk centred at (2, 0)
        let f = |u: [f64; 2]| {
            let x1 = 2.0 + u[0] * u[1].cos();
            Ok(u[0] / (x1 * x1))
        };
        let r = integrate_2d(f, [[0.0, 1.0], [0.0, 2.0 * PI]], [false, true], &QuadratureSpec::default(), Exec::Sequential)
            .unwrap();
        let want = 2.0 * PI * (2.0 / 3f64.sqrt() - 1.0);
        assert!(r.converged);
        assert!((r.value - want).abs() < 1e-10, "{}", r.value);
        assert!(r.error < 1e-9);
    }

    #[test]
    fn policies_agree_bitwise() {
        let f = |u: [f64; 2]| Ok((u[0] * u[1]).sin() * u[0].exp());
        let d = [[0.0, 1.5], [-1.0, 2.0]];
        let s = QuadratureSpec::default();
        let a = integrate_2d(f, d, [false, false], &s, Exec::Sequential).unwrap();
        let b = integrate_2d(f, d, [false, false], &s, Exec::Parallel).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn refinement_limit_reports_best_estimate() {
        let spec = QuadratureSpec {
            order: 2,
            max_levels: 2,
            rel_tol: 1e-15,
            abs_tol: 0.0,
        };
        let r = integrate_1d(|t| Ok(t.abs().sqrt()), [-1.0, 1.0], false, &spec, Exec::Sequential).unwrap();
        assert!(!r.converged);
        assert!((r.value - 4.0 / 3.0).abs() < 0.1);
        assert!(matches!(r.require(), Err(Error::Quadrature { .. })));
    }

    #[test]
    fn doubling_depth_stays_within_tolerance() {
        let f = |t: f64| Ok(1.0 / (1.0 + 25.0 * t * t));
        let s = QuadratureSpec::default();
        let deeper = QuadratureSpec {
            max_levels: 2 * s.max_levels,
            rel_tol: s.rel_tol / 100.0,
            ..s
        };
        let a = integrate_1d(f, [-1.0, 1.0], false, &s, Exec::Sequential).unwrap();
        let b = integrate_1d(f, [-1.0, 1.0], false, &deeper, Exec::Sequential).unwrap();
        assert!((a.value - b.value).abs() <= s.abs_tol + s.rel_tol * a.value.abs());
    }

    #[test]
    fn rejects_bad_spec_and_range() {
        let bad = QuadratureSpec { order: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec { rel_tol: 0.0, abs_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(integrate_1d(|_| Ok(1.0), [1.0, 0.0], false, &QuadratureSpec::default(), Exec::Sequential).is_err());
    }
}
