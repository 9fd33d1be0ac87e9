//! Forward-mode automatic differentiation by nested dual numbers, used as an
//! oracle for the hand-derived manufactured forcing terms.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn value(self) -> f64 {
        self
    }
}

/// `re + eps * du` with `eps^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Scalar> Dual<T> {
    pub fn var(re: T) -> Self {
        Self {
            re,
            du: T::cst(1.0),
        }
    }
    pub fn fixed(re: T) -> Self {
        Self {
            re,
            du: T::cst(0.0),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            du: self.du + o.du,
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            du: self.du - o.du,
        }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re,
            du: self.re * o.du + self.du * o.re,
        }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            du: -self.du,
        }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn cst(v: f64) -> Self {
        Self::fixed(T::cst(v))
    }
    fn sin(self) -> Self {
        Self {
            re: self.re.sin(),
            du: self.du * self.re.cos(),
        }
    }
    fn cos(self) -> Self {
        Self {
            re: self.re.cos(),
            du: -(self.du * self.re.sin()),
        }
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Self {
            re: e,
            du: self.du * e,
        }
    }
    fn value(self) -> f64 {
        self.re.value()
    }
}

/// A smooth field of `(x, y, t)` evaluable at any scalar type.
pub trait Field {
    fn at<S: Scalar>(&self, x: S, y: S, t: S) -> S;
}

pub struct Pressure;
pub struct Concentration;

impl Field for Pressure {
    fn at<S: Scalar>(&self, x: S, y: S, t: S) -> S {
        t.cos() * (S::cst(PI) * x).sin() * (S::cst(0.5 * PI) * y).sin()
    }
}

impl Field for Concentration {
    fn at<S: Scalar>(&self, _x: S, y: S, t: S) -> S {
        (-t).exp() * (S::cst(PI) * y).cos()
    }
}

type D1 = Dual<f64>;
type D2 = Dual<D1>;
type D3 = Dual<D2>;

fn lift1(v: f64, active: bool) -> D1 {
    if active {
        D1::var(v)
    } else {
        D1::fixed(v)
    }
}

/// Partial derivative along the variable indices in `dirs` (0 = x, 1 = y, 2 = t), up to third order.
pub fn partial<F: Field>(f: &F, p: [f64; 3], dirs: &[usize]) -> f64 {
    match dirs {
        [] => f.at(p[0], p[1], p[2]),
        [a] => {
            let v: Vec<D1> = (0..3).map(|k| lift1(p[k], k == *a)).collect();
            f.at(v[0], v[1], v[2]).du
        }
        [a, b] => {
            let v: Vec<D2> = (0..3)
                .map(|k| D2 {
                    re: lift1(p[k], k == *b),
                    du: D1::cst(if k == *a { 1.0 } else { 0.0 }),
                })
                .collect();
            f.at(v[0], v[1], v[2]).du.du
        }
        [a, b, c] => {
            let v: Vec<D3> = (0..3)
                .map(|k| D3 {
                    re: D2 {
                        re: lift1(p[k], k == *c),
                        du: D1::cst(if k == *b { 1.0 } else { 0.0 }),
                    },
                    du: D2::cst(if k == *a { 1.0 } else { 0.0 }),
                })
                .collect();
            f.at(v[0], v[1], v[2]).du.du.du
        }
        _ => panic!("derivatives beyond third order are not needed"),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Coefficients {
    pub c: f64,
    pub beta: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub d0: f64,
    pub d1: f64,
    pub v: [f64; 2],
}

pub const ACADEMIC: Coefficients = Coefficients {
    c: 1.0,
    beta: 0.1,
    kappa: 0.1,
    alpha: 1.0,
    d0: 1.0,
    d1: 1.0,
    v: [0.0, 1.0],
};

const X: usize = 0;
const Y: usize = 1;
const T: usize = 2;

pub fn oracle_f_p(k: &Coefficients, q: [f64; 3]) -> f64 {
    let p = partial(&Pressure, q, &[]);
    let pt = partial(&Pressure, q, &[T]);
    let ptt = partial(&Pressure, q, &[T, T]);
    let lap = partial(&Pressure, q, &[X, X]) + partial(&Pressure, q, &[Y, Y]);
    let lap_t = partial(&Pressure, q, &[T, X, X]) + partial(&Pressure, q, &[T, Y, Y]);
    (1.0 + k.kappa * p) * ptt + k.kappa * pt * pt - k.c * k.c * lap - k.beta * lap_t
}

pub fn oracle_g_abs(k: &Coefficients, q: [f64; 3], n: [f64; 2]) -> f64 {
    let pt = partial(&Pressure, q, &[T]);
    let gp = [partial(&Pressure, q, &[X]), partial(&Pressure, q, &[Y])];
    let gpt = [
        partial(&Pressure, q, &[T, X]),
        partial(&Pressure, q, &[T, Y]),
    ];
    k.alpha * pt
        + k.c * k.c * (gp[0] * n[0] + gp[1] * n[1])
        + k.beta * (gpt[0] * n[0] + gpt[1] * n[1])
}

/// `u_t + v . grad u - div(D(p) grad u)` with `D = d0 (1 + d1 p)`.
pub fn oracle_f_u(k: &Coefficients, q: [f64; 3]) -> f64 {
    let p = partial(&Pressure, q, &[]);
    let gp = [partial(&Pressure, q, &[X]), partial(&Pressure, q, &[Y])];
    let ut = partial(&Concentration, q, &[T]);
    let gu = [
        partial(&Concentration, q, &[X]),
        partial(&Concentration, q, &[Y]),
    ];
    let lap_u = partial(&Concentration, q, &[X, X]) + partial(&Concentration, q, &[Y, Y]);
    let d = k.d0 * (1.0 + k.d1 * p);
    let grad_d = [k.d0 * k.d1 * gp[0], k.d0 * k.d1 * gp[1]];
    ut + k.v[0] * gu[0] + k.v[1] * gu[1] - (grad_d[0] * gu[0] + grad_d[1] * gu[1]) - d * lap_u
}

/// Robin inflow datum `u - D(p) grad u . n / (v . n)`.
pub fn oracle_g_in(k: &Coefficients, q: [f64; 3], n: [f64; 2]) -> f64 {
    let p = partial(&Pressure, q, &[]);
    let u = partial(&Concentration, q, &[]);
    let gu = [
        partial(&Concentration, q, &[X]),
        partial(&Concentration, q, &[Y]),
    ];
    let vn = k.v[0] * n[0] + k.v[1] * n[1];
    u - k.d0 * (1.0 + k.d1 * p) * (gu[0] * n[0] + gu[1] * n[1]) / vn
}

/// Closed-form values of an independent symbolic computation at the academic coefficients.
#[allow(clippy::excessive_precision)]
pub mod frozen {
    /// `(x, y, t, f_p, f_u)`
    pub const VOLUME: [(f64, f64, f64, f64, f64); 4] = [
        (0.5, 1.0, 0.0, 11.237005501361698274, -18.739208802178717238),
        (0.3, 0.7, 0.2, 7.7847255122003853441, -8.5281502005863551401),
        (0.9, 1.6, 0.45, 1.7546848259752341821, 4.6444958515467624090),
        (0.5, 0.5, 0.0, 7.9664734683620518933, 0.34783944622964652862),
    ];
    /// `(x, y, t, n, g_abs)`
    pub const ABSORBING: [(f64, f64, f64, [f64; 2], f64); 2] = [
        (1.0, 0.7, 0.0, [1.0, 0.0], -2.7991795506907527884),
        (0.3, 0.0, 0.25, [0.0, -1.0], -1.1998546819130171929),
    ];
    /// `(x, y, t, n, g_in)`
    pub const INFLOW: [(f64, f64, f64, [f64; 2], f64); 2] = [
        (0.3, 0.0, 0.25, [0.0, -1.0], 0.77880078307140487848),
        (0.3, 0.2, 0.1, [0.0, -1.0], 2.8185124374294942715),
    ];
}
