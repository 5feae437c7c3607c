//! Model groups: frames, coframes, bracket constants and the metric family
//! `g_L = diag(1, 1, L)` on `X1, X2, X3`.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprdsl::{Env, Expr, Jet, Scalar, Var};
use crate::laurent::{rational_to_f64, Rational};

/// Chart coordinates.
pub type Point = [f64; 3];

/// Components on `X1, X2, X3`. The `L` factor lives in the inner product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameVector(pub [f64; 3]);

impl FrameVector {
    pub const X1: FrameVector = FrameVector([1.0, 0.0, 0.0]);
    pub const X2: FrameVector = FrameVector([0.0, 1.0, 0.0]);
    pub const X3: FrameVector = FrameVector([0.0, 0.0, 1.0]);

    /// `X_{i+1}`.
    pub fn basis(i: usize) -> FrameVector {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        FrameVector(v)
    }

    pub fn dot(&self, o: &FrameVector, l: f64) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + l * self.0[2] * o.0[2]
    }

    pub fn norm(&self, l: f64) -> f64 {
        self.dot(self, l).sqrt()
    }

    pub fn scale(&self, s: f64) -> FrameVector {
        FrameVector(self.0.map(|a| a * s))
    }

    pub fn add(&self, o: &FrameVector) -> FrameVector {
        FrameVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn sub(&self, o: &FrameVector) -> FrameVector {
        self.add(&o.scale(-1.0))
    }
}

/// Domain predicate of a chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Domain {
    Everywhere,
    /// `x1 ≥ margin`.
    PositiveX1 { margin: f64 },
}

impl Domain {
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Domain::Everywhere => p.iter().all(|x| x.is_finite()),
            Domain::PositiveX1 { margin } => p.iter().all(|x| x.is_finite()) && p[0] >= *margin,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Domain::Everywhere => "R^3".to_string(),
            Domain::PositiveX1 { margin } => format!("x1 >= {margin:e}"),
        }
    }

    /// Maps the unit cube onto a sampling box inside the domain.
    pub fn sample(&self, unit: [f64; 3]) -> Point {
        let s = |u: f64| 4.0 * u - 2.0;
        match self {
            Domain::Everywhere => unit.map(s),
            Domain::PositiveX1 { .. } => [0.5 + 2.0 * unit[0], s(unit[1]), s(unit[2])],
        }
    }
}

/// Bracket constants `c[i][j][k] = c^k_{ij}`, `[X_i, X_j] = Σ_k c^k_{ij} X_k`.
pub type Brackets = [[[Rational; 3]; 3]; 3];

fn zero_brackets() -> Brackets {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())))
}

#[derive(Clone, Debug)]
pub struct GroupModel {
    name: String,
    /// `frame[i][j] = a_i^j`, `X_i = Σ_j a_i^j ∂_j`.
    frame: [[Expr; 3]; 3],
    /// Rows `ω1, ω2, ω` on coordinate velocities. Absent for user groups
    /// defined by their frame only; the rows are then obtained by inversion.
    coframe: Option<[[Expr; 3]; 3]>,
    brackets: Brackets,
    brackets_f64: [[[f64; 3]; 3]; 3],
    domain: Domain,
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Names of the groups compiled into the registry.
pub const BUILTIN_GROUPS: [&str; 3] = ["affine", "e11", "heisenberg"];

fn exprs(rows: [[&str; 3]; 3]) -> [[Expr; 3]; 3] {
    rows.map(|r| r.map(|s| Expr::parse(s).expect("built-in expression parses")))
}

/// Looks up a built-in group.
pub fn builtin_group(name: &str) -> Result<GroupModel> {
    let mut c = zero_brackets();
    let one = Rational::one();
    let (frame, coframe, domain) = match name {
        "affine" => {
            c[0][1][2] = one.clone();
            c[0][2][2] = one.clone();
            (
                exprs([["x1", "0", "0"], ["0", "x1", "1"], ["0", "x1", "0"]]),
                exprs([["1/x1", "0", "0"], ["0", "0", "1"], ["0", "1/x1", "-1"]]),
                Domain::PositiveX1 { margin: 1e-8 },
            )
        }
        "e11" => {
            c[0][1][2] = one.clone();
            c[0][2][1] = one.clone();
            (
                exprs([
                    ["0", "0", "1"],
                    ["-exp(x3)/sqrt(2)", "exp(-x3)/sqrt(2)", "0"],
                    ["-exp(x3)/sqrt(2)", "-exp(-x3)/sqrt(2)", "0"],
                ]),
                exprs([
                    ["0", "0", "1"],
                    ["-exp(-x3)/sqrt(2)", "exp(x3)/sqrt(2)", "0"],
                    ["-exp(-x3)/sqrt(2)", "-exp(x3)/sqrt(2)", "0"],
                ]),
                Domain::Everywhere,
            )
        }
        "heisenberg" => {
            c[0][1][2] = one.clone();
            (
                exprs([["1", "0", "-x2/2"], ["0", "1", "x1/2"], ["0", "0", "1"]]),
                exprs([["1", "0", "0"], ["0", "1", "0"], ["x2/2", "-x1/2", "1"]]),
                Domain::Everywhere,
            )
        }
        _ => return Err(Error::UnknownGroup(name.to_string())),
    };
    GroupModel::assemble(name, frame, Some(coframe), c, domain)
}

impl GroupModel {
    fn assemble(
        name: &str,
        frame: [[Expr; 3]; 3],
        coframe: Option<[[Expr; 3]; 3]>,
        mut brackets: Brackets,
        domain: Domain,
    ) -> Result<GroupModel> {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i < j {
                        brackets[j][i][k] = -brackets[i][j][k].clone();
                    } else if i == j && !brackets[i][j][k].is_zero() {
                        return Err(Error::InvalidGroup(format!(
                            "bracket [X{0}, X{0}] must vanish",
                            i + 1
                        )));
                    }
                }
            }
        }
        let brackets_f64 = brackets
            .clone()
            .map(|a| a.map(|b| b.map(|c| rational_to_f64(&c))));
        let g = GroupModel {
            name: name.to_string(),
            frame,
            coframe,
            brackets,
            brackets_f64,
            domain,
        };
        if let Some(&(i, j, k)) = g.jacobi_violations().first() {
            return Err(Error::InvalidGroup(format!(
                "Jacobi identity fails for (X{}, X{}, X{})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        Ok(g)
    }

    /// A user group from frame expressions and the upper-triangular bracket
    /// constants `(i, j, k, c^k_{ij})`, `i < j`, 0-based. Antisymmetry is
    /// filled in; the Jacobi identity is checked on the constants and the
    /// brackets are checked against the frame at sample points.
    pub fn user(
        name: &str,
        frame: [[Expr; 3]; 3],
        coframe: Option<[[Expr; 3]; 3]>,
        brackets: &[(usize, usize, usize, Rational)],
        domain: Domain,
    ) -> Result<GroupModel> {
        let mut c = zero_brackets();
        for (i, j, k, v) in brackets {
            if *i >= 3 || *j >= 3 || *k >= 3 {
                return Err(Error::InvalidGroup("bracket index out of range".into()));
            }
            if i >= j {
                return Err(Error::InvalidGroup(format!(
                    "bracket entries are given for i < j, got ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            c[*i][*j][*k] = v.clone();
        }
        let free: Vec<_> = frame
            .iter()
            .chain(coframe.iter().flatten())
            .flatten()
            .flat_map(|e| e.free_vars())
            .filter(|v| !Var::XYZ.contains(v))
            .collect();
        if let Some(v) = free.first() {
            return Err(Error::InvalidGroup(format!(
                "frame expressions may only use x1, x2, x3, found `{}`",
                v.name()
            )));
        }
        let g = GroupModel::assemble(name, frame, coframe, c, domain)?;
        let worst = g.bracket_residual(&halton_points(&g.domain, 12))?;
        if worst > 1e-8 {
            return Err(Error::InvalidGroup(format!(
                "bracket constants disagree with the frame fields (residual {worst:e})"
            )));
        }
        let worst = g.coframe_residual(&halton_points(&g.domain, 12))?;
        if worst > 1e-8 {
            return Err(Error::InvalidGroup(format!(
                "coframe is not dual to the frame (residual {worst:e})"
            )));
        }
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn brackets(&self) -> &Brackets {
        &self.brackets
    }

    /// `c^k_{ij}` as a float.
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.brackets_f64[i][j][k]
    }

    pub fn frame_exprs(&self) -> &[[Expr; 3]; 3] {
        &self.frame
    }

    pub fn coframe_exprs(&self) -> Option<&[[Expr; 3]; 3]> {
        self.coframe.as_ref()
    }

    /// Triples `(i, j, k)` where the cyclic sum of double brackets is nonzero.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let c = &self.brackets;
        let mut out = Vec::new();
        for i in 0..3 {
            for j in (i + 1)..3 {
                for k in (j + 1)..3 {
                    for l in 0..3 {
                        let mut s = Rational::zero();
                        for m in 0..3 {
                            s += &c[i][j][m] * &c[m][k][l];
                            s += &c[j][k][m] * &c[m][i][l];
                            s += &c[k][i][m] * &c[m][j][l];
                        }
                        if !s.is_zero() {
                            out.push((i, j, k));
                        }
                    }
                }
            }
        }
        out.dedup();
        out
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                group: self.name.clone(),
                predicate: self.domain.describe(),
                x1: p[0],
                x2: p[1],
                x3: p[2],
            })
        }
    }

    /// Frame matrix `a_i^j` over any scalar type (e.g. jets along a curve).
    pub fn frame_matrix<S: Scalar>(&self, x: &[S; 3]) -> Result<[[S; 3]; 3]> {
        let env = xyz_env(x);
        eval_matrix(&self.frame, &env)
    }

    /// Coframe matrix: row `i` maps a coordinate velocity to its `X_i` component.
    pub fn coframe_matrix<S: Scalar>(&self, x: &[S; 3]) -> Result<[[S; 3]; 3]> {
        match &self.coframe {
            Some(rows) => eval_matrix(rows, &xyz_env(x)),
            None => {
                // v = A^T c, so the coframe matrix is (A^T)^{-1}
                let a = self.frame_matrix(x)?;
                let at = std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()));
                invert3(&at)
            }
        }
    }

    /// Frame components of a coordinate velocity, by solving `A^T c = v`.
    pub fn coordinate_to_frame(&self, p: &Point, v: &[f64; 3]) -> Result<FrameVector> {
        self.check_point(p)?;
        let a = self.frame_matrix(p)?;
        let at = [
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ];
        Ok(FrameVector(solve3(&at, v)?))
    }

    /// Coordinate components of a frame vector.
    pub fn frame_to_coordinate(&self, p: &Point, f: &FrameVector) -> Result<[f64; 3]> {
        self.check_point(p)?;
        let a = self.frame_matrix(p)?;
        Ok(std::array::from_fn(|j| {
            (0..3).map(|i| f.0[i] * a[i][j]).sum()
        }))
    }

    /// `ω(v)`, from the coframe row directly.
    pub fn omega_of_velocity(&self, p: &Point, v: &[f64; 3]) -> Result<f64> {
        self.check_point(p)?;
        let b = self.coframe_matrix(p)?;
        Ok((0..3).map(|j| b[2][j] * v[j]).sum())
    }

    /// Largest `|[X_i, X_j] − Σ_k c^k_{ij} X_k|` coordinate component over the
    /// given points, with frame-field derivatives from jets.
    pub fn bracket_residual(&self, points: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in points {
            self.check_point(p)?;
            let vars: [Jet; 3] = std::array::from_fn(|s| Jet::variable(p[s], s, 1));
            let a = self.frame_matrix(&vars)?;
            for i in 0..3 {
                for j in 0..3 {
                    for m in 0..3 {
                        let mut lie = 0.0;
                        for l in 0..3 {
                            lie += a[i][l].value() * a[j][m].d(l) - a[j][l].value() * a[i][m].d(l);
                        }
                        let rhs: f64 = (0..3).map(|k| self.c(i, j, k) * a[k][m].value()).sum();
                        worst = worst.max((lie - rhs).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Largest `|B·A^T − I|` entry over the points.
    pub fn coframe_residual(&self, points: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in points {
            let a = self.frame_matrix(p)?;
            let b = self.coframe_matrix(p)?;
            for r in 0..3 {
                for i in 0..3 {
                    let s: f64 = (0..3).map(|j| b[r][j] * a[i][j]).sum();
                    let want = if r == i { 1.0 } else { 0.0 };
                    worst = worst.max((s - want).abs());
                }
            }
        }
        Ok(worst)
    }
}

fn xyz_env<S: Scalar>(x: &[S; 3]) -> Env<S> {
    Env::new()
        .with(Var::X1, x[0].clone())
        .with(Var::X2, x[1].clone())
        .with(Var::X3, x[2].clone())
}

fn eval_matrix<S: Scalar>(m: &[[Expr; 3]; 3], env: &Env<S>) -> Result<[[S; 3]; 3]> {
    let mut rows = Vec::with_capacity(3);
    for row in m {
        let mut out = Vec::with_capacity(3);
        for e in row {
            out.push(e.eval(env)?);
        }
        rows.push(<[S; 3]>::try_from(out).ok().expect("three entries"));
    }
    Ok(<[[S; 3]; 3]>::try_from(rows).ok().expect("three rows"))
}

/// Inverse of a 3×3 matrix by cofactors, over any scalar.
pub fn invert3<S: Scalar>(m: &[[S; 3]; 3]) -> Result<[[S; 3]; 3]> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[r0][c0].mul(&m[r1][c1]).sub(&m[r0][c1].mul(&m[r1][c0]))
    };
    // adj[j][i] = cofactor(i, j)
    let c = [
        [cof(1, 2, 1, 2), cof(1, 2, 2, 0), cof(1, 2, 0, 1)],
        [cof(2, 0, 1, 2), cof(2, 0, 2, 0), cof(2, 0, 0, 1)],
        [cof(0, 1, 1, 2), cof(0, 1, 2, 0), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0]
        .mul(&c[0][0])
        .add(&m[0][1].mul(&c[0][1]))
        .add(&m[0][2].mul(&c[0][2]));
    let mut out: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::constant(0.0)));
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = c[j][i].div(&det)?;
        }
    }
    Ok(out)
}

/// Solves `m x = b` by Cramer's rule.
pub fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Result<[f64; 3]> {
    let det3 = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::FunctionDomain {
            function: "frame inversion",
            value: d,
        });
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut mc = *m;
        for r in 0..3 {
            mc[r][col] = b[r];
        }
        *xc = det3(&mc) / d;
    }
    Ok(x)
}

/// Deterministic low-discrepancy points in the domain's sampling box.
pub fn halton_points(domain: &Domain, n: usize) -> Vec<Point> {
    fn radical(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    (1..=n)
        .map(|i| domain.sample([radical(i, 2), radical(i, 3), radical(i, 5)]))
        .collect()
}
