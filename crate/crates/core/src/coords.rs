//! Points of ℂ⁴, null coordinates, real slices, metrics, stereographic maps and
//! the 2×2 matrix picture of a point.

use crate::error::{Error, Result};
use crate::tolerances::tau_alg;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `[re, im]`, the JSON form of every complex number.
pub fn cx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_cx(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

/// A point of ℂ⁴ in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point4C {
    pub x: [C64; 4],
}

impl Point4C {
    pub const ORIGIN: Point4C = Point4C { x: [C64 { re: 0.0, im: 0.0 }; 4] };

    pub fn new(x: [C64; 4]) -> Self {
        Point4C { x }
    }

    pub fn real(x: [f64; 4]) -> Self {
        Point4C { x: x.map(|v| C64::new(v, 0.0)) }
    }

    /// The Minkowski point (t, x₁, x₂, x₃), i.e. x₀ = −i t.
    pub fn minkowski(t: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Point4C { x: [C64::new(0.0, -t), x1.into(), x2.into(), x3.into()] }
    }

    pub fn add(&self, o: &Point4C) -> Point4C {
        Point4C { x: std::array::from_fn(|k| self.x[k] + o.x[k]) }
    }

    pub fn sub(&self, o: &Point4C) -> Point4C {
        Point4C { x: std::array::from_fn(|k| self.x[k] - o.x[k]) }
    }

    pub fn null(&self) -> NullCoords {
        to_null(self)
    }

    /// g^ℂ(x, x).
    pub fn square(&self) -> C64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn dist(&self, o: &Point4C) -> f64 {
        self.x.iter().zip(&o.x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_json(&self) -> [[f64; 2]; 4] {
        self.x.map(cx)
    }
}

/// Standard null coordinates q₁ = x₀ + i x₁, q̃₁ = x₀ − i x₁, q₂ = x₂ + i x₃, q̃₂ = x₂ − i x₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullCoords {
    pub q1: C64,
    pub qt1: C64,
    pub q2: C64,
    pub qt2: C64,
}

pub fn to_null(p: &Point4C) -> NullCoords {
    let [x0, x1, x2, x3] = p.x;
    NullCoords { q1: x0 + I * x1, qt1: x0 - I * x1, q2: x2 + I * x3, qt2: x2 - I * x3 }
}

pub fn from_null(n: &NullCoords) -> Point4C {
    let half = 0.5;
    Point4C {
        x: [(n.q1 + n.qt1) * half, -I * (n.q1 - n.qt1) * half, (n.q2 + n.qt2) * half, -I * (n.q2 - n.qt2) * half],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceKind {
    /// p + (x₀,x₁,x₂,x₃), real offsets.
    R4,
    /// p + (0,x₁,x₂,x₃).
    R3,
    /// (t,x₁,x₂,x₃) ↦ (p₀ − i t, p₁ + x₁, p₂ + x₂, p₃ + x₃).
    M4,
    /// p + (a₀ + i b₀, …), eight real offsets.
    C4,
}

impl SliceKind {
    pub fn arity(self) -> usize {
        match self {
            SliceKind::R4 | SliceKind::M4 => 4,
            SliceKind::R3 => 3,
            SliceKind::C4 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    pub basepoint: Point4C,
    pub kind: SliceKind,
}

impl SliceSpec {
    pub fn new(kind: SliceKind, basepoint: Point4C) -> Self {
        SliceSpec { basepoint, kind }
    }

    pub fn at_origin(kind: SliceKind) -> Self {
        SliceSpec { basepoint: Point4C::ORIGIN, kind }
    }

    pub fn point(&self, u: &[f64]) -> Result<Point4C> {
        slice_point(self, u)
    }

    /// Inverse of [`slice_point`] for points on the slice.
    pub fn coords(&self, p: &Point4C) -> Vec<f64> {
        let d = p.sub(&self.basepoint);
        match self.kind {
            SliceKind::R4 => d.x.iter().map(|v| v.re).collect(),
            SliceKind::R3 => d.x[1..].iter().map(|v| v.re).collect(),
            SliceKind::M4 => vec![-d.x[0].im, d.x[1].re, d.x[2].re, d.x[3].re],
            SliceKind::C4 => d.x.iter().flat_map(|v| [v.re, v.im]).collect(),
        }
    }

    /// Whether `p` satisfies the slice's defining equations within `tol`.
    pub fn contains(&self, p: &Point4C, tol: f64) -> bool {
        let d = p.sub(&self.basepoint);
        match self.kind {
            SliceKind::R4 => d.x.iter().all(|v| v.im.abs() <= tol),
            SliceKind::R3 => d.x[0].norm() <= tol && d.x[1..].iter().all(|v| v.im.abs() <= tol),
            SliceKind::M4 => d.x[0].re.abs() <= tol && d.x[1..].iter().all(|v| v.im.abs() <= tol),
            SliceKind::C4 => true,
        }
    }

    /// For each Cartesian coordinate, (σ, c) with conj(x_k) = σ·x_k + c on the slice.
    pub fn conj_rule(&self) -> Result<[(f64, C64); 4]> {
        let p = self.basepoint.x;
        let real_offset = |k: usize| (1.0, C64::new(0.0, -2.0 * p[k].im));
        match self.kind {
            SliceKind::R4 => Ok(std::array::from_fn(real_offset)),
            SliceKind::R3 => {
                let mut r: [(f64, C64); 4] = std::array::from_fn(real_offset);
                r[0] = (0.0, p[0].conj());
                Ok(r)
            }
            SliceKind::M4 => {
                let mut r: [(f64, C64); 4] = std::array::from_fn(real_offset);
                r[0] = (-1.0, C64::new(2.0 * p[0].re, 0.0));
                Ok(r)
            }
            SliceKind::C4 => Err(Error::Conj("ℂ⁴ has no real structure".into())),
        }
    }
}

pub fn slice_point(s: &SliceSpec, u: &[f64]) -> Result<Point4C> {
    let n = s.kind.arity();
    if u.len() != n {
        return Err(Error::Arity { expected: n, got: u.len() });
    }
    let d = match s.kind {
        SliceKind::R4 => Point4C::real([u[0], u[1], u[2], u[3]]),
        SliceKind::R3 => Point4C::real([0.0, u[0], u[1], u[2]]),
        SliceKind::M4 => Point4C::minkowski(u[0], u[1], u[2], u[3]),
        SliceKind::C4 => Point4C::new(std::array::from_fn(|k| C64::new(u[2 * k], u[2 * k + 1]))),
    };
    Ok(s.basepoint.add(&d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Σ dx₀² + … + dx₃² on ℝ⁴.
    Euclid4,
    /// −dt² + dx₁² + dx₂² + dx₃² in slice coordinates (t, x₁, x₂, x₃).
    Minkowski4,
    /// Holomorphic Σ dxᵢ² on ℂ⁴.
    Complex4,
    /// dx₁² + dx₂² + dx₃²; the 0-th component is ignored.
    Euclid3,
}

impl Metric {
    pub fn diag(self) -> [f64; 4] {
        match self {
            Metric::Euclid4 | Metric::Complex4 => [1.0; 4],
            Metric::Minkowski4 => [-1.0, 1.0, 1.0, 1.0],
            Metric::Euclid3 => [0.0, 1.0, 1.0, 1.0],
        }
    }
}

pub fn metric_pair(kind: Metric, v: &[C64; 4], w: &[C64; 4]) -> C64 {
    kind.diag().iter().zip(v.iter().zip(w)).map(|(g, (a, b))| a * b * *g).sum()
}

/// g^ℂ evaluated through null components (dq₁dq̃₁ + dq₂dq̃₂, symmetrized).
pub fn metric_null(v: &NullCoords, w: &NullCoords) -> C64 {
    0.5 * (v.q1 * w.qt1 + v.qt1 * w.q1 + v.q2 * w.qt2 + v.qt2 * w.q2)
}

/// A point of the Riemann sphere ℂ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtC {
    Finite(C64),
    Infinity,
}

/// Homogeneous coordinates [w₀, w₁] of μ = w₁/w₀ ∈ ℂP¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuPair {
    pub w0: C64,
    pub w1: C64,
}

impl MuPair {
    pub fn new(w0: C64, w1: C64) -> Self {
        MuPair { w0, w1 }
    }

    pub fn finite(mu: C64) -> Self {
        MuPair { w0: C64::new(1.0, 0.0), w1: mu }
    }

    pub const INFINITY: MuPair = MuPair { w0: C64 { re: 0.0, im: 0.0 }, w1: C64 { re: 1.0, im: 0.0 } };

    pub fn from_ext(m: ExtC) -> Self {
        match m {
            ExtC::Finite(mu) => MuPair::finite(mu),
            ExtC::Infinity => MuPair::INFINITY,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w0.norm_sqr() + self.w1.norm_sqr()).sqrt()
    }

    /// Scaled to unit norm with w₀ real and non-negative (or w₁ = 1 at ∞).
    pub fn normalized(&self) -> MuPair {
        let n = self.norm();
        if self.w0.norm() > 0.0 {
            let ph = self.w0.conj() / (self.w0.norm() * n);
            MuPair { w0: self.w0 * ph, w1: self.w1 * ph }
        } else {
            MuPair { w0: C64::new(0.0, 0.0), w1: C64::new(1.0, 0.0) }
        }
    }

    pub fn mu(&self) -> ExtC {
        if self.w0.norm() <= tau_alg() * self.norm() {
            ExtC::Infinity
        } else {
            ExtC::Finite(self.w1 / self.w0)
        }
    }

    /// Projective distance |w₀w₁′ − w₁w₀′| / (‖w‖‖w′‖).
    pub fn chordal(&self, o: &MuPair) -> f64 {
        (self.w0 * o.w1 - self.w1 * o.w0).norm() / (self.norm() * o.norm())
    }
}

/// Inverse stereographic projection from (−1,0,0).
pub fn stereo_inv(u: ExtC) -> [f64; 3] {
    match u {
        ExtC::Infinity => [-1.0, 0.0, 0.0],
        ExtC::Finite(u) => {
            let n = u.norm_sqr();
            let d = 1.0 + n;
            [(1.0 - n) / d, 2.0 * u.re / d, 2.0 * u.im / d]
        }
    }
}

pub fn stereo(v: [f64; 3]) -> ExtC {
    let [a, b, c] = v;
    if a >= 0.0 {
        ExtC::Finite(C64::new(b, c) / (1.0 + a))
    } else {
        let w = C64::new(b, -c);
        if w.norm() <= f64::EPSILON * 16.0 {
            ExtC::Infinity
        } else {
            ExtC::Finite(C64::new(1.0 - a, 0.0) / w)
        }
    }
}

/// U = stereo_inv(iμ) computed homogeneously from [w₀, w₁].
pub fn direction_of(m: &MuPair) -> [f64; 3] {
    let a = m.w0.norm_sqr();
    let b = m.w1.norm_sqr();
    let c = I * m.w1 * m.w0.conj();
    let d = a + b;
    [(a - b) / d, 2.0 * c.re / d, 2.0 * c.im / d]
}

/// μ-pair with stereo_inv(iμ) = U.
pub fn mu_of_direction(u: [f64; 3]) -> MuPair {
    match stereo(u) {
        ExtC::Finite(z) => MuPair::finite(-I * z),
        ExtC::Infinity => MuPair::INFINITY,
    }
}

/// Q = [[q₁, −q̃₂], [q₂, q̃₁]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMatrix {
    pub m: [[C64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QClass {
    Quaternionic,
    SkewHermitian,
    /// Both forms at once; only Q = 0.
    Both,
    Neither,
}

impl QMatrix {
    pub fn from_point(p: &Point4C) -> Self {
        let n = to_null(p);
        QMatrix { m: [[n.q1, -n.qt2], [n.q2, n.qt1]] }
    }

    pub fn to_point(&self) -> Point4C {
        let m = self.m;
        from_null(&NullCoords { q1: m[0][0], qt1: m[1][1], q2: m[1][0], qt2: -m[0][1] })
    }

    pub fn is_quaternionic(&self, tol: f64) -> bool {
        let m = self.m;
        let s = self.scale();
        (m[1][1] - m[0][0].conj()).norm() <= tol * s && (m[0][1] + m[1][0].conj()).norm() <= tol * s
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        let m = self.m;
        let s = self.scale();
        (0..2).all(|i| (0..2).all(|j| (m[i][j] + m[j][i].conj()).norm() <= tol * s))
    }

    fn scale(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max)
    }
}

/// Classifies Q and returns the point it encodes.
pub fn classify_qmatrix(q: &QMatrix) -> (QClass, Point4C) {
    let tol = tau_alg();
    let class = match (q.is_quaternionic(tol), q.is_skew_hermitian(tol)) {
        (true, true) => QClass::Both,
        (true, false) => QClass::Quaternionic,
        (false, true) => QClass::SkewHermitian,
        (false, false) => QClass::Neither,
    };
    (class, q.to_point())
}
