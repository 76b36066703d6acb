//! Bivariate truncated Taylor jets.
//!
//! A `Jet<D, N>` stores the Taylor coefficients of a function of two chart
//! variables `(u, v)` up to total degree `D`; `N = (D+1)(D+2)/2`. Coefficient
//! `(i, j)` multiplies `du^i dv^j` and sits at index `d(d+1)/2 + j`, `d = i+j`.

use crate::real::Real;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const D: usize, const N: usize> {
    pub c: [f64; N],
}

/// Second-order jets: enough for metrics and curvatures.
pub type J2 = Jet<2, 6>;
/// Fourth-order jets: enough for second derivatives of the mean curvature.
pub type J4 = Jet<4, 15>;

#[inline(always)]
pub const fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const FACT: [f64; 9] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

impl<const D: usize, const N: usize> Jet<D, N> {
    pub const fn constant(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        Self { c }
    }

    /// The coordinate function `u` expanded at `u0`.
    pub fn var_u(u0: f64) -> Self {
        let mut j = Self::constant(u0);
        if D >= 1 {
            j.c[idx(1, 0)] = 1.0;
        }
        j
    }

    /// The coordinate function `v` expanded at `v0`.
    pub fn var_v(v0: f64) -> Self {
        let mut j = Self::constant(v0);
        if D >= 1 {
            j.c[idx(0, 1)] = 1.0;
        }
        j
    }

    /// Partial derivative `∂^{i+j} / ∂u^i ∂v^j` at the expansion point.
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        if i + j > D {
            return 0.0;
        }
        self.c[idx(i, j)] * FACT[i] * FACT[j]
    }

    /// Jet of `∂f/∂u`; valid to one degree less than `self`.
    pub fn du(&self) -> Self {
        let mut out = [0.0; N];
        for d in 0..D {
            for j in 0..=d {
                let i = d - j;
                out[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        Self { c: out }
    }

    /// Jet of `∂f/∂v`; valid to one degree less than `self`.
    pub fn dv(&self) -> Self {
        let mut out = [0.0; N];
        for d in 0..D {
            for j in 0..=d {
                let i = d - j;
                out[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        Self { c: out }
    }

    #[inline]
    fn mul_jets(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for da in 0..=D {
            let base_a = da * (da + 1) / 2;
            for ja in 0..=da {
                let x = a[base_a + ja];
                if x == 0.0 {
                    continue;
                }
                for db in 0..=(D - da) {
                    let base_b = db * (db + 1) / 2;
                    let d = da + db;
                    let base = d * (d + 1) / 2 + ja;
                    for jb in 0..=db {
                        out[base + jb] += x * b[base_b + jb];
                    }
                }
            }
        }
        out
    }

    /// Evaluates `Σ_k coef[k] δ^k` where `δ` is the nilpotent part of `self`.
    fn compose(&self, coef: &[f64]) -> Self {
        let mut delta = self.c;
        delta[0] = 0.0;
        let mut r = [0.0; N];
        r[0] = coef[D];
        for k in (0..D).rev() {
            r = Self::mul_jets(&r, &delta);
            r[0] += coef[k];
        }
        Self { c: r }
    }
}

impl<const D: usize, const N: usize> Add for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl<const D: usize, const N: usize> Sub for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl<const D: usize, const N: usize> Mul for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self { c: Self::mul_jets(&self.c, &o.c) }
    }
}

impl<const D: usize, const N: usize> Div for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const D: usize, const N: usize> Neg for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        for k in 0..N {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl<const D: usize, const N: usize> Add<f64> for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: f64) -> Self {
        self.c[0] += o;
        self
    }
}

impl<const D: usize, const N: usize> Sub<f64> for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: f64) -> Self {
        self.c[0] -= o;
        self
    }
}

impl<const D: usize, const N: usize> Mul<f64> for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn mul(mut self, o: f64) -> Self {
        for k in 0..N {
            self.c[k] *= o;
        }
        self
    }
}

impl<const D: usize, const N: usize> Div<f64> for Jet<D, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<const D: usize, const N: usize> AddAssign for Jet<D, N> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const D: usize, const N: usize> SubAssign for Jet<D, N> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const D: usize, const N: usize> MulAssign for Jet<D, N> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<const D: usize, const N: usize> Real for Jet<D, N> {
    #[inline]
    fn cst(x: f64) -> Self {
        Self::constant(x)
    }
    #[inline]
    fn val(&self) -> f64 {
        self.c[0]
    }

    fn sqrt(self) -> Self {
        let a = self.c[0];
        let mut coef = [0.0; 9];
        // binomial(1/2, k) a^{1/2 - k}
        let mut b = 1.0;
        let mut p = a.sqrt();
        for (k, slot) in coef.iter_mut().enumerate().take(D + 1) {
            *slot = b * p;
            b *= (0.5 - k as f64) / (k as f64 + 1.0);
            p /= a;
        }
        self.compose(&coef[..=D])
    }

    fn sin(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        let cyc = [s, c, -s, -c];
        let mut coef = [0.0; 9];
        for k in 0..=D {
            coef[k] = cyc[k % 4] / FACT[k];
        }
        self.compose(&coef[..=D])
    }

    fn cos(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        let cyc = [c, -s, -c, s];
        let mut coef = [0.0; 9];
        for k in 0..=D {
            coef[k] = cyc[k % 4] / FACT[k];
        }
        self.compose(&coef[..=D])
    }

    fn recip(self) -> Self {
        let a = self.c[0];
        let mut coef = [0.0; 9];
        let mut p = 1.0 / a;
        for slot in coef.iter_mut().take(D + 1) {
            *slot = p;
            p *= -1.0 / a;
        }
        self.compose(&coef[..=D])
    }
}
