//! Gauss rules on the interval and on the reference triangle.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest exactness degree the triangle and segment rules are built for.
pub const MAX_EXACTNESS: usize = 30;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Number of Gauss points on a segment needed to integrate degree `degree` exactly.
pub fn segment_points_for(degree: usize) -> usize {
    degree / 2 + 1
}

/// Gauss rule mapped to `[0, 1]`, exact up to `degree`.
pub fn unit_interval_rule(degree: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if degree == 0 || degree > MAX_EXACTNESS {
        return Err(Error::Config(format!(
            "segment quadrature degree {degree} outside 1..={MAX_EXACTNESS}"
        )));
    }
    let (x, w) = gauss_legendre(segment_points_for(degree));
    Ok((
        x.iter().map(|xi| 0.5 * (xi + 1.0)).collect(),
        w.iter().map(|wi| 0.5 * wi).collect(),
    ))
}

/// Quadrature rule on the reference triangle `{(x, y): x, y >= 0, x + y <= 1}`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadRule {
    /// Rule integrating every polynomial of total degree `<= exactness` exactly.
    ///
    /// Degrees 0 and 1 use the centroid; higher degrees use a collapsed
    /// (Duffy) product of Gauss-Legendre rules, which has positive weights.
    pub fn triangle(exactness: usize) -> Result<Self> {
        if exactness > MAX_EXACTNESS {
            return Err(Error::Config(format!(
                "triangle quadrature of degree {exactness} not available (max {MAX_EXACTNESS})"
            )));
        }
        if exactness <= 1 {
            return Ok(Self {
                points: vec![[1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![0.5],
                exactness,
            });
        }
        // The collapsed coordinate carries the Jacobian (1 - s), one extra degree.
        let n = (exactness + 2).div_ceil(2);
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (xs, ws) in x.iter().zip(&w) {
            let s = 0.5 * (xs + 1.0);
            for (xt, wt) in x.iter().zip(&w) {
                let t = 0.5 * (xt + 1.0);
                points.push([s, t * (1.0 - s)]);
                weights.push(0.25 * ws * wt * (1.0 - s));
            }
        }
        Ok(Self {
            points,
            weights,
            exactness,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
