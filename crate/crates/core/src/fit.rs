//! Asymptotics in `L`: Richardson extrapolation on geometric grids and
//! least-squares fits in powers of `L`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// `L = base^k` for `k` in `k0..=k1`.
pub fn geometric_grid(base: f64, k0: i32, k1: i32) -> Vec<f64> {
    (k0..=k1).map(|k| base.powi(k)).collect()
}

/// Result of extrapolating `y(L) = y∞ + C L^{-p} + …`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RichardsonFit {
    pub limit: f64,
    /// Observed exponent `p`. `None` when the sequence is constant to
    /// rounding, so no rate can be observed.
    pub order: Option<f64>,
    pub converged: bool,
    pub last: f64,
}

/// Checks that `ls` is geometric and returns its ratio.
pub fn grid_ratio(ls: &[f64]) -> Result<f64> {
    if ls.len() < 2 {
        return Err(Error::Fit("grid needs at least two points".into()));
    }
    let rho = ls[1] / ls[0];
    if !(rho > 1.0) || ls.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Fit("grid must be positive and increasing".into()));
    }
    for w in ls.windows(2) {
        if ((w[1] / w[0]) / rho - 1.0).abs() > 1e-9 {
            return Err(Error::Fit("grid is not geometric".into()));
        }
    }
    Ok(rho)
}

pub fn richardson(ls: &[f64], ys: &[f64]) -> Result<RichardsonFit> {
    if ls.len() != ys.len() || ls.len() < 3 {
        return Err(Error::Fit("richardson needs at least three (L, y) pairs".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Fit("non-finite value in sequence".into()));
    }
    let rho = grid_ratio(ls)?;
    let n = ys.len();
    let last = ys[n - 1];
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let noise = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let d: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    if d.iter().all(|x| x.abs() <= noise) {
        return Ok(RichardsonFit {
            limit: last,
            order: None,
            converged: true,
            last,
        });
    }
    // latest pair of successive differences that both rise above rounding
    let Some(i) = (1..d.len())
        .rev()
        .find(|&i| d[i].abs() > noise && d[i - 1].abs() > noise)
    else {
        return Ok(RichardsonFit {
            limit: last,
            order: None,
            converged: false,
            last,
        });
    };
    let ratio = d[i - 1] / d[i];
    if !(ratio > 0.0) {
        return Ok(RichardsonFit {
            limit: last,
            order: None,
            converged: false,
            last,
        });
    }
    let p = ratio.ln() / rho.ln();
    if !(p > 0.0) {
        return Ok(RichardsonFit {
            limit: last,
            order: Some(p),
            converged: false,
            last,
        });
    }
    let limit = ys[i + 1] + d[i] / (rho.powf(p) - 1.0);
    Ok(RichardsonFit {
        limit,
        order: Some(p),
        converged: true,
        last,
    })
}

/// Least-squares fit of `y ≈ Σ_j a_j L^{e_j}`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PowerFit {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub residual_rms: f64,
    /// 2-norm condition number of the column-scaled design matrix.
    pub condition: f64,
}

impl PowerFit {
    pub fn coefficient(&self, exponent: f64) -> Option<f64> {
        self.exponents
            .iter()
            .position(|e| (e - exponent).abs() < 1e-12)
            .map(|i| self.coefficients[i])
    }

    pub fn eval(&self, l: f64) -> f64 {
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| c * l.powf(*e))
            .sum()
    }
}

pub fn fit_powers(ls: &[f64], ys: &[f64], exponents: &[f64]) -> Result<PowerFit> {
    let m = ls.len();
    let n = exponents.len();
    if m != ys.len() || m < n || n == 0 {
        return Err(Error::Fit(format!(
            "need at least {n} points for {n} basis functions, got {m}"
        )));
    }
    let mut a = DMatrix::<f64>::from_fn(m, n, |i, j| ls[i].powf(exponents[j]));
    let mut scales = vec![1.0; n];
    for (j, s) in scales.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        if norm == 0.0 {
            return Err(Error::Fit("zero basis column".into()));
        }
        *s = norm;
        a.column_mut(j).scale_mut(1.0 / norm);
    }
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd
        .solve(&b, 1e-14 * smax)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let r = &a * &x - &b;
    let coefficients: Vec<f64> = x.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(PowerFit {
        exponents: exponents.to_vec(),
        coefficients,
        residual_rms: (r.norm_squared() / m as f64).sqrt(),
        condition,
    })
}

/// Bound on each fitted coefficient when every `ys[i]` may be off by up to
/// `errors[i]`: `Σ_i |∂a_j/∂y_i| errors[i]`, the fit being linear in `y`.
pub fn fit_error_bars(ls: &[f64], exponents: &[f64], errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != ls.len() {
        return Err(Error::Fit("one error per point required".into()));
    }
    let mut bars = vec![0.0; exponents.len()];
    let mut unit = vec![0.0; ls.len()];
    for (i, e) in errors.iter().enumerate() {
        unit[i] = 1.0;
        let f = fit_powers(ls, &unit, exponents)?;
        unit[i] = 0.0;
        for (b, c) in bars.iter_mut().zip(&f.coefficients) {
            *b += c.abs() * e.abs();
        }
    }
    Ok(bars)
}

/// Slope and intercept of the least-squares line through `(ln x, ln |y|)`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit("slope needs at least two points".into()));
    }
    if ys.iter().chain(xs).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::Fit("log-log slope of zero or non-finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
