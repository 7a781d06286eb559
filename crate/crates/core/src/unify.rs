//! The pointwise dictionary μ ⇄ α-plane ⇄ J ⇄ U, and the passage between
//! conformal foliations of an ℝ³-slice and shear-free congruences on 𝕄⁴.

use crate::coords::{direction_of, Metric, MuPair, Point4C, SliceKind, SliceSpec, C64, I};
use crate::error::{Error, Result};
use crate::fieldexpr::{BranchSign, FieldExpr};
use nalgebra::{Matrix3, Matrix4, Vector3};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A complex tangent 2-plane spanned by two vectors of ℂ⁴ (Cartesian components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPlane {
    pub span: [[C64; 4]; 2],
}

impl AlphaPlane {
    /// Distance of the unit vector v/|v| from the plane.
    pub fn defect(&self, v: &[C64; 4]) -> f64 {
        let [a, b] = &self.span;
        let dot = |x: &[C64; 4], y: &[C64; 4]| -> C64 { x.iter().zip(y).map(|(p, q)| p.conj() * q).sum() };
        let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
        let (av, bv) = (dot(a, v), dot(b, v));
        let det = aa * bb - ab * ab.conj();
        let ca = (bb * av - ab * bv) / det;
        let cb = (aa * bv - ab.conj() * av) / det;
        let r: f64 = (0..4).map(|k| (v[k] - ca * a[k] - cb * b[k]).norm_sqr()).sum();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (r / n).sqrt()
    }

    /// Largest |g^ℂ(aᵢ, aⱼ)| over the spanning pair, relative to their norms.
    pub fn nullity_defect(&self) -> f64 {
        let n = |x: &[C64; 4]| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let g = |x: &[C64; 4], y: &[C64; 4]| crate::coords::metric_pair(Metric::Complex4, x, y).norm() / (n(x) * n(y));
        let [a, b] = &self.span;
        g(a, a).max(g(a, b)).max(g(b, b))
    }

    /// The α-plane of μ in the null basis {w₀∂q̃₁ − w₁∂q₂, w₀∂q̃₂ + w₁∂q₁}.
    pub fn from_null_basis(m: &MuPair) -> AlphaPlane {
        let h = C64::new(0.5, 0.0);
        let dq1 = [h, -I * h, ZERO, ZERO];
        let dqt1 = [h, I * h, ZERO, ZERO];
        let dq2 = [ZERO, ZERO, h, -I * h];
        let dqt2 = [ZERO, ZERO, h, I * h];
        let a = std::array::from_fn(|k| m.w0 * dqt1[k] - m.w1 * dq2[k]);
        let b = std::array::from_fn(|k| m.w0 * dqt2[k] + m.w1 * dq1[k]);
        AlphaPlane { span: [a, b] }
    }
}

/// An orthogonal complex structure on T_pℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianJ {
    pub m: Matrix4<f64>,
}

impl HermitianJ {
    /// ‖J² + I‖ and ‖JᵀJ − I‖, whichever is larger.
    pub fn defect(&self) -> f64 {
        let id = Matrix4::<f64>::identity();
        (self.m * self.m + id).abs().max().max((self.m.transpose() * self.m - id).abs().max())
    }

    /// Orientation of (v, Jv, w, Jw) for v = ∂x₀ and w ⊥ {v, Jv}.
    pub fn is_positive(&self) -> bool {
        let v = nalgebra::Vector4::new(1.0, 0.0, 0.0, 0.0);
        let jv = self.m * v;
        let w = (1..4)
            .map(|k| {
                let mut e = nalgebra::Vector4::zeros();
                e[k] = 1.0;
                e - jv * jv.dot(&e)
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("three candidates");
        let w = w.normalize();
        let f = Matrix4::from_columns(&[v, jv, w, self.m * w]);
        f.determinant() > 0.0
    }
}

/// The frame {e₀,e₁,e₂,e₃} of a direction μ together with its derived data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e: [[f64; 4]; 4],
    pub u: [f64; 3],
    pub j: HermitianJ,
    pub alpha: AlphaPlane,
}

pub fn mu_to_frame(mu: &MuPair) -> Frame {
    let m = mu.normalized();
    let u = direction_of(&m);
    let (w0, w1) = (m.w0, m.w1);
    let d = w0.norm_sqr() + w1.norm_sqr();
    let z = [-2.0 * I * w1 * w0 / d, (w0 * w0 + w1 * w1) / d, I * (w0 * w0 - w1 * w1) / d];
    let e0 = [1.0, 0.0, 0.0, 0.0];
    let e1 = [0.0, u[0], u[1], u[2]];
    let e2 = [0.0, z[0].re, z[1].re, z[2].re];
    let e3 = [0.0, z[0].im, z[1].im, z[2].im];
    let col = |v: [f64; 4]| nalgebra::Vector4::from(v);
    let outer = |a: [f64; 4], b: [f64; 4]| col(a) * col(b).transpose();
    let j = outer(e1, e0) - outer(e0, e1) + outer(e3, e2) - outer(e2, e3);
    let lift = |a: [f64; 4], b: [f64; 4]| std::array::from_fn(|k| C64::new(a[k], b[k]));
    Frame { e: [e0, e1, e2, e3], u, j: HermitianJ { m: j }, alpha: AlphaPlane { span: [lift(e0, e1), lift(e2, e3)] } }
}

/// A unit direction field and its first derivatives at a point of 𝕄⁴;
/// `du[a][b]` is ∂U_b/∂y_a with y = (t, x₁, x₂, x₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirJet {
    pub u: [f64; 3],
    pub du: [[f64; 3]; 4],
}

/// A unit field on an ℝ³-slice; `du[a][b]` is ∂U_b/∂x_{a+1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialJet {
    pub u: [f64; 3],
    pub du: [[f64; 3]; 3],
}

/// Direction field of a ray congruence on 𝕄⁴.
pub trait DirectionField: Sync {
    fn dir(&self, t: f64, x: [f64; 3]) -> Result<DirJet>;
}

/// Direction field of a foliation of an ℝ³-slice.
pub trait SpatialField: Sync {
    fn eval(&self, x: [f64; 3]) -> Result<SpatialJet>;
}

/// U = stereo_inv(u) and its derivatives given u and du along real directions.
fn unit_from_u<const N: usize>(u: C64, du: [C64; N]) -> ([f64; 3], [[f64; 3]; N]) {
    let n = u.norm_sqr();
    let d = 1.0 + n;
    let val = [(1.0 - n) / d, 2.0 * u.re / d, 2.0 * u.im / d];
    let grads = du.map(|g| {
        let dn = 2.0 * (u.conj() * g).re;
        [-2.0 * dn / (d * d), 2.0 * g.re / d - 2.0 * u.re * dn / (d * d), 2.0 * g.im / d - 2.0 * u.im * dn / (d * d)]
    });
    (val, grads)
}

/// The congruence U = stereo_inv(iμ) of a μ-field on an 𝕄⁴-slice.
#[derive(Debug, Clone)]
pub struct MuField {
    mu: FieldExpr,
    slice: SliceSpec,
}

impl MuField {
    pub fn new(mu: &FieldExpr, basepoint: Point4C) -> Result<MuField> {
        let slice = SliceSpec::new(SliceKind::M4, basepoint);
        Ok(MuField { mu: mu.resolve_conj(&slice)?, slice })
    }
}

impl DirectionField for MuField {
    fn dir(&self, t: f64, x: [f64; 3]) -> Result<DirJet> {
        let p = self.slice.point(&[t, x[0], x[1], x[2]])?;
        let jet = self.mu.eval_jet(&p, BranchSign::Plus)?;
        let (g, _) = jet.slice_derivs(Metric::Minkowski4);
        let (u, du) = unit_from_u(I * jet.value, g.map(|z| I * z));
        Ok(DirJet { u, du })
    }
}

/// A μ-field restricted to an ℝ³-slice.
#[derive(Debug, Clone)]
pub struct ProjectedMu {
    mu: FieldExpr,
    slice: SliceSpec,
}

impl SpatialField for ProjectedMu {
    fn eval(&self, x: [f64; 3]) -> Result<SpatialJet> {
        let p = self.slice.point(&x)?;
        let jet = self.mu.eval_jet(&p, BranchSign::Plus)?;
        let (u, du) = unit_from_u(I * jet.value, [jet.grad[1], jet.grad[2], jet.grad[3]].map(|z| I * z));
        Ok(SpatialJet { u, du })
    }
}

/// U = J(∂/∂x₀) of μ along the ℝ³-slice of `slice`'s basepoint.
pub fn project_to_slice(mu: &FieldExpr, slice: &SliceSpec) -> Result<ProjectedMu> {
    let s = SliceSpec::new(SliceKind::R3, slice.basepoint);
    Ok(ProjectedMu { mu: mu.resolve_conj(&s)?, slice: s })
}

/// A foliation given by three component expressions on an ℝ³-slice.
#[derive(Debug, Clone)]
pub struct ComponentsField {
    comps: [FieldExpr; 3],
    slice: SliceSpec,
}

impl ComponentsField {
    pub fn new(comps: [FieldExpr; 3], basepoint: Point4C) -> Result<ComponentsField> {
        let slice = SliceSpec::new(SliceKind::R3, basepoint);
        let comps = [comps[0].resolve_conj(&slice)?, comps[1].resolve_conj(&slice)?, comps[2].resolve_conj(&slice)?];
        Ok(ComponentsField { comps, slice })
    }
}

impl SpatialField for ComponentsField {
    fn eval(&self, x: [f64; 3]) -> Result<SpatialJet> {
        let p = self.slice.point(&x)?;
        let mut u = [0.0; 3];
        let mut du = [[0.0; 3]; 3];
        for (b, e) in self.comps.iter().enumerate() {
            let j = e.eval_jet(&p, BranchSign::Plus)?;
            u[b] = j.value.re;
            for a in 0..3 {
                du[a][b] = j.grad[a + 1].re;
            }
        }
        Ok(SpatialJet { u, du })
    }
}

fn newton(field: &dyn SpatialField, t: f64, x: Vector3<f64>, seed: Vector3<f64>) -> Result<(Vector3<f64>, SpatialJet)> {
    let resid = |y: &Vector3<f64>| -> Result<(Vector3<f64>, SpatialJet)> {
        let s = field.eval([y[0], y[1], y[2]])?;
        Ok((y + Vector3::from(s.u) * t - x, s))
    };
    let scale = 1.0 + x.norm();
    let mut y = seed;
    let (mut f, mut s) = resid(&y)?;
    for _ in 0..60 {
        if f.norm() <= 1e-13 * scale {
            return Ok((y, s));
        }
        let jac = Matrix3::from_fn(|b, a| if a == b { 1.0 } else { 0.0 } + t * s.du[a][b]);
        let step = jac.lu().solve(&f).ok_or(Error::NoPreimage)?;
        let mut lambda = 1.0;
        loop {
            let cand = y - step * lambda;
            if let Ok((fc, sc)) = resid(&cand) {
                if fc.norm() < f.norm() || lambda < 1e-3 {
                    y = cand;
                    f = fc;
                    s = sc;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-4 {
                return Err(Error::NoPreimage);
            }
        }
    }
    if f.norm() <= 1e-12 * scale {
        Ok((y, s))
    } else {
        Err(Error::NoPreimage)
    }
}

/// U at (t, x) of the congruence swept out by the null rays leaving the slice
/// t = 0 along ∂t + U, found by solving y + t·U(y) = x.
pub fn extend_from_slice(field: &dyn SpatialField, t: f64, x: [f64; 3]) -> Result<DirJet> {
    let xv = Vector3::from(x);
    let s0 = field.eval(x).ok();
    let seed = match &s0 {
        Some(s) => xv - Vector3::from(s.u) * t,
        None => xv,
    };
    let kick = Vector3::new(0.6, -0.48, 0.64) * (0.05 * t.abs().max(0.1));
    let a = newton(field, t, xv, seed);
    let b = if t == 0.0 { Err(Error::NoPreimage) } else { newton(field, t, xv, seed + kick) };
    let (_, s) = match (a, b) {
        (Ok(a), Ok(b)) => {
            if (a.0 - b.0).norm() > 1e-6 {
                return Err(Error::NonUnique);
            }
            a
        }
        (Ok(a), Err(_)) | (Err(_), Ok(a)) => a,
        (Err(e), Err(_)) => return Err(e),
    };
    let du = Matrix3::from_fn(|b, a| s.du[a][b]);
    let m = Matrix3::identity() + du * t;
    let minv = m.try_inverse().ok_or(Error::NonUnique)?;
    let dx = du * minv;
    let dt = -(du * minv * Vector3::from(s.u));
    let mut out = [[0.0; 3]; 4];
    for b in 0..3 {
        out[0][b] = dt[b];
        for a in 0..3 {
            out[a + 1][b] = dx[(b, a)];
        }
    }
    Ok(DirJet { u: s.u, du: out })
}

/// [`extend_from_slice`] as a [`DirectionField`].
pub struct Extended<'a> {
    pub field: &'a dyn SpatialField,
}

impl DirectionField for Extended<'_> {
    fn dir(&self, t: f64, x: [f64; 3]) -> Result<DirJet> {
        extend_from_slice(self.field, t, x)
    }
}

/// Complex vector of a null tangent vector ∂q₁, ∂q̃₁, ∂q₂, ∂q̃₂ by index.
pub fn null_vector(k: usize) -> [C64; 4] {
    let h = C64::new(0.5, 0.0);
    let mut v = [ZERO; 4];
    let base = 2 * (k / 2);
    v[base] = h;
    v[base + 1] = if k.is_multiple_of(2) { -I * h } else { I * h };
    v
}

/// The constant direction field of a fixed μ.
pub fn constant_field(mu: C64) -> FieldExpr {
    FieldExpr::c(mu)
}
