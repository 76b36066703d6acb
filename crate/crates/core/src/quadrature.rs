//! One-dimensional rules and their tensor products.

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule1D {
    assert!(n >= 1);
    if n == 1 {
        return Rule1D { x: vec![0.0], w: vec![2.0] };
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    Rule1D { x, w }
}

impl Rule1D {
    /// Composite Gauss–Legendre with `n` points on each panel `[b_k, b_{k+1}]`.
    pub fn gl_panels(breaks: &[f64], n: usize) -> Self {
        let base = gauss_legendre(n);
        let mut x = Vec::with_capacity(n * breaks.len());
        let mut w = Vec::with_capacity(n * breaks.len());
        for p in breaks.windows(2) {
            let (a, b) = (p[0], p[1]);
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            for (xi, wi) in base.x.iter().zip(&base.w) {
                x.push(c + h * xi);
                w.push(h * wi);
            }
        }
        Rule1D { x, w }
    }

    /// Trapezoid rule for periodic integrands on `[a, a + period)` with `n`
    /// equispaced nodes; `staggered` shifts the nodes by half a step.
    pub fn periodic(a: f64, period: f64, n: usize, staggered: bool) -> Self {
        let h = period / n as f64;
        let off = if staggered { 0.5 } else { 0.0 };
        Rule1D {
            x: (0..n).map(|k| a + (k as f64 + off) * h).collect(),
            w: vec![h; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Panel breaks on `[-half, half]`, symmetric about 0, with widths growing
/// geometrically from `h0` by `ratio` up to `hmax`, then uniform.
pub fn graded_breaks(h0: f64, ratio: f64, hmax: f64, half: f64) -> Vec<f64> {
    assert!(h0 > 0.0 && ratio >= 1.0 && hmax >= h0 && half > 0.0);
    let mut pos = vec![0.0];
    let mut h = h0;
    let mut s = 0.0;
    while s + h < half && h < hmax {
        s += h;
        pos.push(s);
        h = (h * ratio).min(hmax);
    }
    let rest = half - s;
    let k = (rest / hmax).ceil().max(1.0) as usize;
    for i in 1..=k {
        pos.push(s + rest * i as f64 / k as f64);
    }
    let mut out: Vec<f64> = pos.iter().rev().map(|p| -p).collect();
    out.extend_from_slice(&pos[1..]);
    out
}

/// Tensor-product rule on a rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule2D {
    pub u: Rule1D,
    pub v: Rule1D,
}

impl Rule2D {
    pub fn new(u: Rule1D, v: Rule1D) -> Self {
        Rule2D { u, v }
    }

    /// `n × m` periodic trapezoid grid on `[-π, π)²`.
    pub fn periodic_torus(n: usize, m: usize) -> Self {
        Rule2D {
            u: Rule1D::periodic(-PI, 2.0 * PI, n, false),
            v: Rule1D::periodic(-PI, 2.0 * PI, m, false),
        }
    }

    pub fn len(&self) -> usize {
        self.u.len() * self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered summation of per-row partial sums, so the result does not depend
/// on how rows were scheduled.
pub fn ordered_sum(rows: &[f64]) -> f64 {
    rows.iter().sum()
}
