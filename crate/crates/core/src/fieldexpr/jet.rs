//! Second-order complex jets in four variables.

use crate::coords::{Metric, C64, I};
use std::ops::{Add, Mul, Neg, Sub};

/// Value, gradient and Hessian of a holomorphic function of x₀..x₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetC2 {
    pub value: C64,
    pub grad: [C64; 4],
    pub hess: [[C64; 4]; 4],
}

const Z: C64 = C64 { re: 0.0, im: 0.0 };

impl JetC2 {
    pub fn constant(v: C64) -> Self {
        JetC2 { value: v, grad: [Z; 4], hess: [[Z; 4]; 4] }
    }

    /// The linear function x ↦ g·x evaluated at `x`.
    pub fn linear(g: [C64; 4], x: &[C64; 4]) -> Self {
        let value = g.iter().zip(x).map(|(a, b)| a * b).sum();
        JetC2 { value, grad: g, hess: [[Z; 4]; 4] }
    }

    /// Composition f∘self given f, f′, f″ at self.value.
    pub fn chain(&self, f0: C64, f1: C64, f2: C64) -> Self {
        let g = self.grad.map(|v| f1 * v);
        let h = symmetric(|i, j| f2 * self.grad[i] * self.grad[j] + f1 * self.hess[i][j]);
        JetC2 { value: f0, grad: g, hess: h }
    }

    pub fn scale(&self, s: C64) -> Self {
        JetC2 { value: self.value * s, grad: self.grad.map(|v| v * s), hess: self.hess.map(|r| r.map(|v| v * s)) }
    }

    /// Derivatives along q₁, q̃₁, q₂, q̃₂ (holomorphic Wirtinger operators).
    pub fn d_null(&self) -> [C64; 4] {
        null_of(&self.grad)
    }

    /// Gradient and Hessian in the real coordinates of a slice of the given
    /// metric: (t,x₁,x₂,x₃) with ∂_t = −i∂₀ for Minkowski, Cartesian otherwise.
    pub fn slice_derivs(&self, kind: Metric) -> ([C64; 4], [[C64; 4]; 4]) {
        let j = match kind {
            Metric::Minkowski4 => [-I, C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            _ => [C64::new(1.0, 0.0); 4],
        };
        let g = std::array::from_fn(|a| j[a] * self.grad[a]);
        let h = std::array::from_fn(|a| std::array::from_fn(|b| j[a] * j[b] * self.hess[a][b]));
        (g, h)
    }

    pub fn laplacian(&self, kind: Metric) -> C64 {
        let (_, h) = self.slice_derivs(kind);
        kind.diag().iter().enumerate().map(|(a, s)| h[a][a] * *s).sum()
    }

    pub fn grad_square(&self, kind: Metric) -> C64 {
        let (g, _) = self.slice_derivs(kind);
        kind.diag().iter().enumerate().map(|(a, s)| g[a] * g[a] * *s).sum()
    }
}

/// Converts a Cartesian gradient to (∂_{q₁}, ∂_{q̃₁}, ∂_{q₂}, ∂_{q̃₂}).
pub fn null_of(g: &[C64; 4]) -> [C64; 4] {
    [0.5 * (g[0] - I * g[1]), 0.5 * (g[0] + I * g[1]), 0.5 * (g[2] - I * g[3]), 0.5 * (g[2] + I * g[3])]
}

/// Builds a matrix from its upper triangle so it is exactly symmetric.
fn symmetric(f: impl Fn(usize, usize) -> C64) -> [[C64; 4]; 4] {
    let mut h = [[Z; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            h[i][j] = f(i, j);
            h[j][i] = h[i][j];
        }
    }
    h
}

impl Add for JetC2 {
    type Output = JetC2;
    fn add(self, o: JetC2) -> JetC2 {
        JetC2 {
            value: self.value + o.value,
            grad: std::array::from_fn(|i| self.grad[i] + o.grad[i]),
            hess: std::array::from_fn(|i| std::array::from_fn(|j| self.hess[i][j] + o.hess[i][j])),
        }
    }
}

impl Sub for JetC2 {
    type Output = JetC2;
    fn sub(self, o: JetC2) -> JetC2 {
        self + (-o)
    }
}

impl Neg for JetC2 {
    type Output = JetC2;
    fn neg(self) -> JetC2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for JetC2 {
    type Output = JetC2;
    fn mul(self, o: JetC2) -> JetC2 {
        let (a, b) = (self, o);
        JetC2 {
            value: a.value * b.value,
            grad: std::array::from_fn(|i| a.grad[i] * b.value + a.value * b.grad[i]),
            hess: symmetric(|i, j| {
                a.hess[i][j] * b.value + (a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i]) + a.value * b.hess[i][j]
            }),
        }
    }
}
