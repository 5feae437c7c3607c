//! Truncated multivariate Taylor jets in up to three variables, order ≤ 3.
//!
//! Coefficients are stored in Taylor form (`∂^α f / α!`); [`Jet::derivative`]
//! converts back. Each jet carries the order up to which its coefficients are
//! exact; products and compositions propagate the minimum.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const JET_VARS: usize = 3;
pub const JET_ORDER: u8 = 3;
const LEN: usize = 20;

struct Tables {
    exps: [[u8; 3]; LEN],
    deg: [u8; LEN],
    /// `(a, b, out, deg_out)` with `exps[a] + exps[b] = exps[out]`, sorted by `deg_out`.
    mul: Vec<(u8, u8, u8, u8)>,
    /// `raise[v][k]`: index of `exps[k] + e_v`, when still within order 3.
    raise: [[Option<u8>; LEN]; JET_VARS],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps = [[0u8; 3]; LEN];
        let mut deg = [0u8; LEN];
        let mut n = 0;
        for d in 0..=JET_ORDER {
            for a in (0..=d).rev() {
                for b in (0..=(d - a)).rev() {
                    exps[n] = [a, b, d - a - b];
                    deg[n] = d;
                    n += 1;
                }
            }
        }
        assert_eq!(n, LEN);
        let index = |e: [u8; 3]| exps.iter().position(|x| *x == e);
        let mut mul = Vec::new();
        for a in 0..LEN {
            for b in 0..LEN {
                if deg[a] + deg[b] <= JET_ORDER {
                    let e = [
                        exps[a][0] + exps[b][0],
                        exps[a][1] + exps[b][1],
                        exps[a][2] + exps[b][2],
                    ];
                    let out = index(e).expect("monomial present");
                    mul.push((a as u8, b as u8, out as u8, deg[out]));
                }
            }
        }
        mul.sort_by_key(|m| m.3);
        let mut raise = [[None; LEN]; JET_VARS];
        for (v, row) in raise.iter_mut().enumerate() {
            for k in 0..LEN {
                let mut e = exps[k];
                e[v] += 1;
                row[k] = index(e).map(|i| i as u8);
            }
        }
        Tables {
            exps,
            deg,
            mul,
            raise,
        }
    })
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).product::<u32>() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
    order: u8,
}

impl Jet {
    /// A constant: exact to every order.
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        Jet {
            c,
            order: JET_ORDER,
        }
    }

    /// The coordinate function of `slot`, evaluated at `value`.
    pub fn variable(value: f64, slot: usize, order: u8) -> Self {
        assert!(slot < JET_VARS);
        let mut c = [0.0; LEN];
        c[0] = value;
        if order >= 1 {
            c[1 + slot] = 1.0;
        }
        Jet {
            c,
            order: order.min(JET_ORDER),
        }
    }

    /// Builds a one-variable jet (slot 0) from derivatives `f, f', f'', …`.
    pub fn from_derivatives_1d(derivs: &[f64]) -> Self {
        let t = tables();
        let mut c = [0.0; LEN];
        let order = (derivs.len().saturating_sub(1) as u8).min(JET_ORDER);
        for k in 0..LEN {
            let e = t.exps[k];
            if e[1] == 0 && e[2] == 0 && e[0] <= order {
                c[k] = derivs[e[0] as usize] / factorial(e[0]);
            }
        }
        Jet { c, order }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Order up to which the coefficients are exact.
    pub fn order(&self) -> u8 {
        self.order
    }

    /// Partial derivative `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: [u8; 3]) -> f64 {
        let t = tables();
        let d: u8 = alpha.iter().sum();
        assert!(d <= self.order, "derivative of order {d} beyond jet order {}", self.order);
        let k = t.exps.iter().position(|e| *e == alpha).expect("in range");
        self.c[k] * alpha.iter().map(|a| factorial(*a)).product::<f64>()
    }

    /// First derivative with respect to `slot`.
    pub fn d(&self, slot: usize) -> f64 {
        let mut a = [0u8; 3];
        a[slot] = 1;
        self.derivative(a)
    }

    /// Mixed second derivative.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut a = [0u8; 3];
        a[i] += 1;
        a[j] += 1;
        self.derivative(a)
    }

    /// The jet of `∂f/∂x_slot`, exact to one order less.
    pub fn partial(&self, slot: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let t = tables();
        let mut c = [0.0; LEN];
        let order = self.order - 1;
        for k in 0..LEN {
            if t.deg[k] > order {
                continue;
            }
            if let Some(src) = t.raise[slot][k] {
                c[k] = self.c[src as usize] * (t.exps[k][slot] as f64 + 1.0);
            }
        }
        Jet { c, order }
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: u8) -> Jet {
        let t = tables();
        let order = order.min(self.order);
        let mut c = self.c;
        for k in 0..LEN {
            if t.deg[k] > order {
                c[k] = 0.0;
            }
        }
        Jet { c, order }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c.iter()) {
            *x += y;
        }
        Jet {
            c,
            order: self.order.min(o.order),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Jet {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x = -*x;
        }
        Jet {
            c,
            order: self.order,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x *= s;
        }
        Jet {
            c,
            order: self.order,
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let t = tables();
        let order = self.order.min(o.order);
        let mut c = [0.0; LEN];
        for &(a, b, out, d) in &t.mul {
            if d > order {
                break;
            }
            c[out as usize] += self.c[a as usize] * o.c[b as usize];
        }
        Jet { c, order }
    }

    /// `f ∘ self` for a univariate `f` with derivatives `[f, f', f'', f''']`
    /// at `self.value()`.
    pub fn compose(&self, derivs: [f64; 4]) -> Jet {
        let mut h = *self;
        h.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0]);
        out.order = self.order;
        let mut hp = h;
        for (k, dk) in derivs.iter().enumerate().skip(1) {
            if k as u8 > self.order {
                break;
            }
            out = out.add(&hp.scale(dk / factorial(k as u8)));
            hp = hp.mul(&h);
        }
        out.order = self.order;
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 {
            return Err(Error::FunctionDomain {
                function: "division",
                value: a,
            });
        }
        let r = 1.0 / a;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, n: i32) -> Result<Jet> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut out = Jet::constant(1.0);
        out.order = self.order;
        for _ in 0..n {
            out = out.mul(self);
        }
        Ok(out)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::FunctionDomain {
                function: "log",
                value: a,
            });
        }
        let r = 1.0 / a;
        Ok(self.compose([a.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if a < 0.0 || (a == 0.0 && self.order > 0 && self.c[1..].iter().any(|x| *x != 0.0)) {
            return Err(Error::FunctionDomain {
                function: "sqrt",
                value: a,
            });
        }
        let r = a.sqrt();
        if a == 0.0 {
            return Ok(self.compose([r, 0.0, 0.0, 0.0]));
        }
        Ok(self.compose([
            r,
            0.5 / r,
            -0.25 / (a * r),
            0.375 / (a * a * r),
        ]))
    }
}
