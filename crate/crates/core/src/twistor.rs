//! ℂP³ and the compactified ℂ⁴: the standard chart, the Plücker embedding,
//! the ξ and ξ̃ quadric coordinates, incidence, the twistor projections π_a,
//! the real hypersurface N⁵ and the fundamental map ι.

use crate::coords::{to_null, MuPair, NullCoords, Point4C, C64, I};
use crate::error::{Error, Result};
use serde::Serialize;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Homogeneous point [w₀,w₁,w₂,w₃] of ℂP³, stored with its largest-modulus
/// component equal to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistorPoint {
    pub w: [C64; 4],
}

impl TwistorPoint {
    pub fn new(w: [C64; 4]) -> Result<Self> {
        let (k, m) =
            w.iter().enumerate().map(|(k, z)| (k, z.norm())).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Invalid("twistor point must be finite and nonzero".into()));
        }
        let s = w[k].inv();
        let mut w = w.map(|z| z * s);
        w[k] = ONE;
        Ok(TwistorPoint { w })
    }

    pub fn norm(&self) -> f64 {
        self.w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Angle-like projective distance ‖v∧w‖ / (‖v‖‖w‖).
    pub fn dist(&self, o: &TwistorPoint) -> f64 {
        let z = wedge(&self.w, &o.w);
        z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() / (self.norm() * o.norm())
    }

    /// Whether [w₀,w₁] = [0,0], i.e. the α-plane lies at infinity.
    pub fn at_infinity(&self) -> bool {
        self.w[0].norm() + self.w[1].norm() <= crate::tolerances::tau_alg() * self.norm()
    }

    pub fn direction(&self) -> MuPair {
        MuPair::new(self.w[0], self.w[1])
    }

    pub fn to_json(&self) -> [[f64; 2]; 4] {
        self.w.map(crate::coords::cx)
    }
}

/// Fundamental map ι(p, [w₀,w₁]) = [w₀, w₁, w₀q₁ − w₁q̃₂, w₀q₂ + w₁q̃₁].
pub fn iota(p: &Point4C, dir: &MuPair) -> Result<TwistorPoint> {
    TwistorPoint::new(iota_raw(p, dir))
}

pub fn iota_raw(p: &Point4C, dir: &MuPair) -> [C64; 4] {
    let n = to_null(p);
    let (a, b) = (dir.w0, dir.w1);
    [a, b, a * n.q1 - b * n.qt2, a * n.q2 + b * n.qt1]
}

/// (w₀q₁ − w₁q̃₂ − w₂, w₀q₂ + w₁q̃₁ − w₃).
pub fn incidence(w: &TwistorPoint, p: &Point4C) -> [C64; 2] {
    incidence_raw(&w.w, p)
}

pub fn incidence_raw(w: &[C64; 4], p: &Point4C) -> [C64; 2] {
    let n = to_null(p);
    [w[0] * n.q1 - w[1] * n.qt2 - w[2], w[0] * n.q2 + w[1] * n.qt1 - w[3]]
}

/// The involution q₂ ↔ q̃₂ that turns the α-plane incidence into the β-plane one.
pub fn beta_swap(p: &Point4C) -> Point4C {
    Point4C::new([p.x[0], p.x[1], p.x[2], -p.x[3]])
}

pub fn beta_incidence(w: &TwistorPoint, p: &Point4C) -> [C64; 2] {
    incidence(w, &beta_swap(p))
}

/// Plücker coordinates z₁₂, z₁₃, z₁₄, z₂₃, z₂₄, z₃₄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerPoint {
    pub z: [C64; 6],
}

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Components of v∧w in the order of [`PAIRS`].
pub fn wedge(v: &[C64; 4], w: &[C64; 4]) -> [C64; 6] {
    PAIRS.map(|(i, j)| v[i] * w[j] - v[j] * w[i])
}

impl PluckerPoint {
    /// z₁₂z₃₄ − z₁₃z₂₄ + z₁₄z₂₃, scaled by ‖z‖².
    pub fn relation(&self) -> C64 {
        plucker_form(&self.z, &self.z) / self.z.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn dist(&self, o: &PluckerPoint) -> f64 {
        projective_dist(&self.z, &o.z)
    }
}

/// Symmetric bilinear form whose quadric is the Plücker relation.
pub fn plucker_form(a: &[C64; 6], b: &[C64; 6]) -> C64 {
    0.5 * (a[0] * b[5] + a[5] * b[0] - a[1] * b[4] - a[4] * b[1] + a[2] * b[3] + a[3] * b[2])
}

/// sin of the angle between two complex lines of ℂⁿ, from the 2×2 minors.
pub fn projective_dist(a: &[C64], b: &[C64]) -> f64 {
    let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    (s / (na * nb)).sqrt()
}

/// j(p) = [1, −q̃₂, q̃₁, −q₁, −q₂, q₁q̃₁ + q₂q̃₂].
pub fn embed_j(p: &Point4C) -> PluckerPoint {
    let n = to_null(p);
    PluckerPoint { z: [ONE, -n.qt2, n.qt1, -n.q1, -n.q2, n.q1 * n.qt1 + n.q2 * n.qt2] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XiVariant {
    Xi,
    XiTilde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPoint {
    pub xi: [C64; 6],
    pub variant: XiVariant,
}

pub fn to_xi(z: &PluckerPoint, variant: XiVariant) -> XiPoint {
    let z = z.z;
    let (z12, z13, z14, z23, z24, z34) = (z[0], z[1], z[2], z[3], z[4], z[5]);
    let mut xi = [z12 + z34, z12 - z34, z14 - z23, I * (z14 + z23), -(z13 + z24), -I * (z13 - z24)];
    if variant == XiVariant::XiTilde {
        xi[2] *= I;
    }
    XiPoint { xi, variant }
}

impl XiPoint {
    /// The quadric equation of the variant, scaled by ‖ξ‖².
    pub fn quadric(&self) -> C64 {
        let x = self.xi;
        let s2 = if self.variant == XiVariant::Xi { -1.0 } else { 1.0 };
        let q = x[0] * x[0] - x[1] * x[1] + s2 * x[2] * x[2] - x[3] * x[3] - x[4] * x[4] - x[5] * x[5];
        q / x.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Largest |Im| after scaling the largest component to 1.
    pub fn imag_defect(&self) -> f64 {
        let k = (0..6).max_by(|&a, &b| self.xi[a].norm().total_cmp(&self.xi[b].norm())).unwrap();
        let s = self.xi[k].inv();
        self.xi.iter().map(|c| (c * s).im.abs()).fold(0.0, f64::max)
    }

    /// Scaled so ξ₀ = 1; unchanged when ξ₀ = 0.
    pub fn affine(&self) -> [C64; 6] {
        if self.xi[0].norm() == 0.0 {
            return self.xi;
        }
        let s = self.xi[0].inv();
        self.xi.map(|c| c * s)
    }
}

/// A point of the real slice through `a`, or its single point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlicePoint {
    Finite(Point4C),
    Infinity,
}

/// Intersection of the α-plane of `w` with ℝ⁴_a.
pub fn pi_a(w: &TwistorPoint, a: &Point4C) -> SlicePoint {
    if w.at_infinity() {
        return SlicePoint::Infinity;
    }
    let an = to_null(a);
    let [w0, w1, w2, w3] = w.w;
    let w2p = w2 - w0 * an.q1 + w1 * an.qt2;
    let w3p = w3 - w0 * an.q2 - w1 * an.qt1;
    let d = w0.norm_sqr() + w1.norm_sqr();
    let q1 = (w0.conj() * w2p + w1 * w3p.conj()) / d;
    let q2 = (w0.conj() * w3p - w1 * w2p.conj()) / d;
    let rel = Point4C::real([q1.re, q1.im, q2.re, q2.im]);
    SlicePoint::Finite(a.add(&rel))
}

/// h(v,w) = v₀w̄₂ + v₁w̄₃ + v₂w̄₀ + v₃w̄₁.
pub fn h_form(v: &[C64; 4], w: &[C64; 4]) -> C64 {
    v[0] * w[2].conj() + v[1] * w[3].conj() + v[2] * w[0].conj() + v[3] * w[1].conj()
}

/// h(w′,w′) for the representative translated by `a`; zero exactly when the
/// α-plane meets ℝ³_a.
pub fn in_n5(w: &TwistorPoint, a: &Point4C) -> f64 {
    let an: NullCoords = to_null(a);
    let [w0, w1, w2, w3] = w.w;
    let wp = [w0, w1, w2 - w0 * an.q1 + w1 * an.qt2, w3 - w0 * an.q2 - w1 * an.qt1];
    h_form(&wp, &wp).re
}
