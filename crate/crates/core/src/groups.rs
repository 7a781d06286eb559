//! Conformal group actions: the block Möbius action Q ↦ (C+DQ)(A+BQ)⁻¹ on ℂ⁴,
//! the SL(2,ℍ) and SU(4,h) predicates, the linear action on ℂP³, the
//! wedge-square map SL(4,ℂ) → SO(6,ℂ) and the action of SO(2,4) on the
//! quadric coordinates (η₀, η₁, ξ̂).

use crate::coords::{from_cx, Point4C, QMatrix, C64, I};
use crate::error::{Error, Result};
use crate::fieldexpr::FieldExpr;
use crate::kerr::TwistorSurface;
use crate::tolerances::{tau_alg, TAU_BRANCH};
use crate::twistor::{h_form, TwistorPoint, PAIRS};
use nalgebra::{Matrix2, Matrix4, Matrix6, Vector4, Vector6};
use rand::Rng;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A 4×4 complex matrix P = [A B; C D] with 2×2 blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMatrix4 {
    pub p: Matrix4<C64>,
    pub det: C64,
}

fn block(p: &Matrix4<C64>, r: usize, c: usize) -> Matrix2<C64> {
    p.fixed_view::<2, 2>(r, c).into_owned()
}

impl BlockMatrix4 {
    pub fn new(p: Matrix4<C64>) -> Self {
        BlockMatrix4 { p, det: p.determinant() }
    }

    pub fn identity() -> Self {
        Self::new(Matrix4::identity())
    }

    pub fn from_blocks(a: Matrix2<C64>, b: Matrix2<C64>, c: Matrix2<C64>, d: Matrix2<C64>) -> Self {
        let mut p = Matrix4::zeros();
        p.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        p.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
        p.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
        p.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
        Self::new(p)
    }

    pub fn a(&self) -> Matrix2<C64> {
        block(&self.p, 0, 0)
    }
    pub fn b(&self) -> Matrix2<C64> {
        block(&self.p, 0, 2)
    }
    pub fn c(&self) -> Matrix2<C64> {
        block(&self.p, 2, 0)
    }
    pub fn d(&self) -> Matrix2<C64> {
        block(&self.p, 2, 2)
    }

    pub fn mul(&self, o: &BlockMatrix4) -> BlockMatrix4 {
        Self::new(self.p * o.p)
    }

    pub fn inverse(&self) -> Result<BlockMatrix4> {
        self.p.try_inverse().map(Self::new).ok_or_else(|| Error::Invalid("matrix is singular".into()))
    }

    pub fn scale(&self, s: C64) -> BlockMatrix4 {
        Self::new(self.p * s)
    }

    pub fn to_array(&self) -> [[C64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.p[(i, j)]))
    }

    /// Row-major JSON: either 4 rows of 4 `[re, im]` pairs or 16 pairs.
    pub fn from_json(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Invalid(format!("matrix JSON: {m}"));
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        let flat: Vec<[f64; 2]> = match serde_json::from_value::<Vec<Vec<[f64; 2]>>>(v.clone()) {
            Ok(rows) if rows.len() == 4 && rows.iter().all(|r| r.len() == 4) => rows.into_iter().flatten().collect(),
            _ => serde_json::from_value::<Vec<[f64; 2]>>(v).map_err(|e| bad(e.to_string()))?,
        };
        if flat.len() != 16 {
            return Err(bad(format!("expected 16 entries, got {}", flat.len())));
        }
        Ok(Self::new(Matrix4::from_row_iterator(flat.into_iter().map(from_cx))))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_array().map(|r| r.map(crate::coords::cx)))
    }
}

fn scalar2(z: C64) -> Matrix2<C64> {
    Matrix2::identity() * z
}

fn q_of(p: &Point4C) -> Matrix2<C64> {
    let m = QMatrix::from_point(p).m;
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn point_of_q(q: &Matrix2<C64>) -> Point4C {
    QMatrix { m: [[q[(0, 0)], q[(0, 1)]], [q[(1, 0)], q[(1, 1)]]] }.to_point()
}

fn is_quaternionic_block(m: &Matrix2<C64>, tol: f64) -> bool {
    let s = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    (m[(1, 1)] - m[(0, 0)].conj()).norm() <= tol * s && (m[(0, 1)] + m[(1, 0)].conj()).norm() <= tol * s
}

/// H = [[0, I], [I, 0]], the Gram matrix of h.
pub fn h_matrix() -> Matrix4<C64> {
    BlockMatrix4::from_blocks(Matrix2::zeros(), Matrix2::identity(), Matrix2::identity(), Matrix2::zeros()).p
}

fn scale_of(p: &BlockMatrix4) -> f64 {
    p.p.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// All four blocks quaternionic and det P = 1.
pub fn is_sl2h(p: &BlockMatrix4) -> bool {
    let tol = tau_alg();
    [p.a(), p.b(), p.c(), p.d()].iter().all(|m| is_quaternionic_block(m, tol))
        && (p.det - ONE).norm() <= tol * scale_of(p).powi(4)
}

/// P*HP = H and det P = 1.
pub fn is_su4h(p: &BlockMatrix4) -> bool {
    let tol = tau_alg();
    let s = scale_of(p);
    su4h_defect(p, 1.0) <= tol * s * s && (p.det - ONE).norm() <= tol * s.powi(4)
}

/// max |P*HP − εH| for ε = ±1.
pub fn su4h_defect(p: &BlockMatrix4, eps: f64) -> f64 {
    let h = h_matrix();
    (p.p.adjoint() * h * p.p - h * C64::new(eps, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Q ↦ (C + DQ)(A + BQ)⁻¹.
pub fn mobius(p: &BlockMatrix4, x: &Point4C) -> Result<Point4C> {
    let q = q_of(x);
    let m = p.a() + p.b() * q;
    let det = m.determinant();
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if det.norm() < TAU_BRANCH * scale * scale {
        return Err(Error::AtInfinity);
    }
    let n = p.c() + p.d() * q;
    let inv = Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det;
    Ok(point_of_q(&(n * inv)))
}

/// The Möbius map as four expressions x′ₖ(x).
pub fn mobius_exprs(p: &BlockMatrix4) -> [FieldExpr; 4] {
    let q = [[FieldExpr::q1(), -FieldExpr::qt2()], [FieldExpr::q2(), FieldExpr::qt1()]];
    let lin = |u: Matrix2<C64>, v: Matrix2<C64>| -> [[FieldExpr; 2]; 2] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut e = FieldExpr::c(u[(i, j)]);
                for k in 0..2 {
                    e = e + q[k][j].clone() * v[(i, k)];
                }
                e
            })
        })
    };
    let m = lin(p.a(), p.b());
    let n = lin(p.c(), p.d());
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    let adj = [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]];
    let out: [[FieldExpr; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (n[i][0].clone() * adj[0][j].clone() + n[i][1].clone() * adj[1][j].clone()) / det.clone()
        })
    });
    let (q1, qt1, q2, qt2) = (out[0][0].clone(), out[1][1].clone(), out[1][0].clone(), -out[0][1].clone());
    let half = C64::new(0.5, 0.0);
    let mhalf = -I * 0.5;
    [(q1.clone() + qt1.clone()) * half, (q1 - qt1) * mhalf, (q2.clone() + qt2.clone()) * half, (q2 - qt2) * mhalf]
}

/// w ↦ Pw, renormalized.
pub fn act_cp3(p: &BlockMatrix4, w: &TwistorPoint) -> Result<TwistorPoint> {
    let v = p.p * Vector4::from_column_slice(&w.w);
    TwistorPoint::new([v[0], v[1], v[2], v[3]])
}

/// The image of a twistor surface under w ↦ Pw.
pub fn transform_surface(p: &BlockMatrix4, s: &TwistorSurface) -> Result<TwistorSurface> {
    s.compose_linear(&p.inverse()?.to_array())
}

/// The direction field μ′ of the Möbius image of the α-plane distribution of μ.
/// μ must be holomorphic (no `conj`).
pub fn transform_mu(p: &BlockMatrix4, mu: &FieldExpr) -> Result<FieldExpr> {
    if mu.has_conj() {
        return Err(Error::Conj("transform_mu needs a holomorphic μ".into()));
    }
    let back = mobius_exprs(&p.inverse()?);
    let m = mu.substitute(&back);
    let y = |k: usize| back[k].clone();
    let q1 = y(0) + y(1) * I;
    let qt1 = y(0) - y(1) * I;
    let q2 = y(2) + y(3) * I;
    let qt2 = y(2) - y(3) * I;
    let w = [FieldExpr::re(1.0), m.clone(), q1 - m.clone() * qt2, q2 + m * qt1];
    let row = |r: usize| {
        let mut e = FieldExpr::re(0.0);
        for (k, wk) in w.iter().enumerate() {
            let c = p.p[(r, k)];
            if c != ZERO {
                e = e + wk.clone() * c;
            }
        }
        e
    };
    Ok(row(1) / row(0))
}

/// R(v∧w) = Pv∧Pw in the Plücker basis z₁₂, z₁₃, z₁₄, z₂₃, z₂₄, z₃₄.
pub fn wedge_square(p: &BlockMatrix4) -> SixMatrix {
    let m = &p.p;
    let r = Matrix6::from_fn(|a, b| {
        let (i, j) = PAIRS[a];
        let (k, l) = PAIRS[b];
        m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]
    });
    SixMatrix { r }
}

/// A 6×6 complex matrix acting on Plücker or quadric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixMatrix {
    pub r: Matrix6<C64>,
}

impl SixMatrix {
    pub fn apply(&self, z: &[C64; 6]) -> [C64; 6] {
        let v = self.r * Vector6::from_column_slice(z);
        std::array::from_fn(|k| v[k])
    }

    /// max |RᵀGR − G| for the symmetric Gram matrix G.
    pub fn form_defect(&self, g: &Matrix6<C64>) -> f64 {
        (self.r.transpose() * g * self.r - g).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Blocks E (2×2), F (2×4), G (4×2), H (4×4) in (η₀, η₁, ξ̂) coordinates.
    pub fn from_blocks(e: [[f64; 2]; 2], f: [[C64; 4]; 2], g: [[C64; 2]; 4], h: [[C64; 4]; 4]) -> Self {
        let r = Matrix6::from_fn(|i, j| match (i < 2, j < 2) {
            (true, true) => C64::new(e[i][j], 0.0),
            (true, false) => f[i][j - 2],
            (false, true) => g[i - 2][j],
            (false, false) => h[i - 2][j - 2],
        });
        SixMatrix { r }
    }
}

/// Gram matrix of the Plücker relation z₁₂z₃₄ − z₁₃z₂₄ + z₁₄z₂₃.
pub fn plucker_gram() -> Matrix6<C64> {
    let mut g = Matrix6::zeros();
    for (a, b, s) in [(0, 5, 0.5), (1, 4, -0.5), (2, 3, 0.5)] {
        g[(a, b)] = C64::new(s, 0.0);
        g[(b, a)] = C64::new(s, 0.0);
    }
    g
}

/// Gram matrix of η₀η₁ − ⟨ξ̂, ξ̂⟩₁ with ⟨ξ̂, ξ̂⟩₁ = −ξ̂₀² + ξ̂₁² + ξ̂₂² + ξ̂₃².
pub fn quadric_gram() -> Matrix6<C64> {
    let mut g = Matrix6::zeros();
    g[(0, 1)] = C64::new(0.5, 0.0);
    g[(1, 0)] = C64::new(0.5, 0.0);
    g[(2, 2)] = ONE;
    for k in 3..6 {
        g[(k, k)] = -ONE;
    }
    g
}

/// Minkowski square −t² + x₁² + x₂² + x₃² of (t, x₁, x₂, x₃).
pub fn minkowski_square(x: &[C64; 4]) -> C64 {
    -x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]
}

/// Action on 𝕄⁴ ⊂ quadric: x ↦ (g·₁ + |x|²₁ g·₂ + Hx)/(e₁₁ + e₁₂|x|²₁ + f₁·x),
/// x = (t, x₁, x₂, x₃).
pub fn act_quadric(r: &SixMatrix, x: &[C64; 4]) -> Result<[C64; 4]> {
    let g = minkowski_square(x);
    let v = r.apply(&[ONE, g, x[0], x[1], x[2], x[3]]);
    let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if v[0].norm() < TAU_BRANCH * scale {
        return Err(Error::AtInfinity);
    }
    let d = v[0].inv();
    Ok([v[2] * d, v[3] * d, v[4] * d, v[5] * d])
}

fn diag4(v: [C64; 4]) -> [[C64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { v[i] } else { ZERO }))
}

fn real4(h: [[f64; 4]; 4]) -> [[C64; 4]; 4] {
    h.map(|r| r.map(|v| C64::new(v, 0.0)))
}

pub fn quadric_lorentz(h: [[f64; 4]; 4]) -> SixMatrix {
    SixMatrix::from_blocks([[1.0, 0.0], [0.0, 1.0]], [[ZERO; 4]; 2], [[ZERO; 2]; 4], real4(h))
}

pub fn quadric_dilation(lambda: f64) -> SixMatrix {
    SixMatrix::from_blocks([[1.0 / lambda, 0.0], [0.0, lambda]], [[ZERO; 4]; 2], [[ZERO; 2]; 4], diag4([ONE; 4]))
}

/// Translation x ↦ x + a for real a = (t, x₁, x₂, x₃).
pub fn quadric_translation(a: [f64; 4]) -> SixMatrix {
    let ac = a.map(|v| C64::new(v, 0.0));
    let lowered = [-ac[0], ac[1], ac[2], ac[3]];
    let f = [[ZERO; 4], lowered.map(|v| v * 2.0)];
    let g = std::array::from_fn(|k| [ac[k], ZERO]);
    SixMatrix::from_blocks([[1.0, 0.0], [minkowski_square(&ac).re, 1.0]], f, g, diag4([ONE; 4]))
}

/// x ↦ Hx / |x|²₁.
pub fn quadric_inversion(h: [[f64; 4]; 4]) -> SixMatrix {
    SixMatrix::from_blocks([[0.0, 1.0], [1.0, 0.0]], [[ZERO; 4]; 2], [[ZERO; 2]; 4], real4(h))
}

/// Boost in the (t, x₁) plane: t′ = t cosh λ − x₁ sinh λ, x₁′ = x₁ cosh λ − t sinh λ.
pub fn boost_h(lambda: f64) -> [[f64; 4]; 4] {
    let (c, s) = (lambda.cosh(), lambda.sinh());
    [[c, -s, 0.0, 0.0], [-s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
}

pub fn translation(c: &Point4C) -> BlockMatrix4 {
    BlockMatrix4::from_blocks(Matrix2::identity(), Matrix2::zeros(), q_of(c), Matrix2::identity())
}

pub fn dilation(lambda: f64) -> BlockMatrix4 {
    let s = lambda.sqrt();
    BlockMatrix4::from_blocks(
        scalar2(C64::new(1.0 / s, 0.0)),
        Matrix2::zeros(),
        Matrix2::zeros(),
        scalar2(C64::new(s, 0.0)),
    )
}

pub fn inversion() -> BlockMatrix4 {
    BlockMatrix4::from_blocks(Matrix2::zeros(), Matrix2::identity(), Matrix2::identity(), Matrix2::zeros())
}

/// Q ↦ DQD* with D = diag(e^{λ/2}, e^{−λ/2}) and A = (D*)⁻¹.
pub fn lorentz(d: Matrix2<C64>) -> Result<BlockMatrix4> {
    let a = d.adjoint().try_inverse().ok_or_else(|| Error::Invalid("D is singular".into()))?;
    Ok(BlockMatrix4::from_blocks(a, Matrix2::zeros(), Matrix2::zeros(), d))
}

pub fn lorentz_boost(lambda: f64) -> BlockMatrix4 {
    let d = Matrix2::new(C64::new((lambda / 2.0).exp(), 0.0), ZERO, ZERO, C64::new((-lambda / 2.0).exp(), 0.0));
    lorentz(d).expect("diagonal exponentials are invertible")
}

/// diag(θ, iθ, iθ, θ) with θ⁴ = −1.
pub fn cxsame() -> BlockMatrix4 {
    let th = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
    BlockMatrix4::new(Matrix4::from_diagonal(&Vector4::new(th, I * th, I * th, th)))
}

/// Reflection x ↦ −x: A = −I, D = I, B = C = 0. Sends h to −h.
pub fn reflection() -> BlockMatrix4 {
    BlockMatrix4::from_blocks(-Matrix2::identity(), Matrix2::zeros(), Matrix2::zeros(), Matrix2::identity())
}

/// A = D = 0, B = −I, C = I. Sends h to −h; acts as Q ↦ −Q⁻¹.
pub fn h_reversal() -> BlockMatrix4 {
    BlockMatrix4::from_blocks(Matrix2::zeros(), -Matrix2::identity(), Matrix2::identity(), Matrix2::zeros())
}

fn parse_floats(s: &str, n: usize, key: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::UnknownKey(format!("{key}: expected {n} comma-separated numbers"))),
    }
}

/// Named matrices: `identity`, `inversion`, `dilation:λ`, `translation:t,x1,x2,x3`
/// (Minkowski), `translation-r4:x0,x1,x2,x3`, `lorentz-boost:λ`, `cxsame`,
/// `reflection`, `h-reversal`.
pub fn named_matrix(key: &str) -> Result<BlockMatrix4> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, a),
        None => (key, ""),
    };
    Ok(match head {
        "identity" => BlockMatrix4::identity(),
        "inversion" => inversion(),
        "cxsame" => cxsame(),
        "reflection" => reflection(),
        "h-reversal" => h_reversal(),
        "dilation" => {
            let l = parse_floats(arg, 1, key)?[0];
            if l <= 0.0 {
                return Err(Error::Invalid("dilation factor must be positive".into()));
            }
            dilation(l)
        }
        "lorentz-boost" => lorentz_boost(parse_floats(arg, 1, key)?[0]),
        "translation" => {
            let v = parse_floats(arg, 4, key)?;
            translation(&Point4C::minkowski(v[0], v[1], v[2], v[3]))
        }
        "translation-r4" => {
            let v = parse_floats(arg, 4, key)?;
            translation(&Point4C::real([v[0], v[1], v[2], v[3]]))
        }
        _ => return Err(Error::UnknownKey(key.into())),
    })
}

fn rand_c<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn quaternion_block<R: Rng>(rng: &mut R) -> Matrix2<C64> {
    let (a, b) = (rand_c(rng), rand_c(rng));
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Random element of SL(2,ℍ): quaternionic blocks scaled to det 1.
pub fn random_sl2h<R: Rng>(rng: &mut R) -> BlockMatrix4 {
    loop {
        let p = BlockMatrix4::from_blocks(
            quaternion_block(rng),
            quaternion_block(rng),
            quaternion_block(rng),
            quaternion_block(rng),
        );
        let d = p.det.re;
        if d > 1e-2 {
            return p.scale(C64::new(d.powf(-0.25), 0.0));
        }
    }
}

/// Random element of SU(4,h) built from translations, boosts, rotations,
/// dilations and the inversion.
pub fn random_su4h<R: Rng>(rng: &mut R) -> BlockMatrix4 {
    let rt = |rng: &mut R| {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        translation(&Point4C::minkowski(v[0], v[1], v[2], v[3]))
    };
    let mut d = Matrix2::new(rand_c(rng), rand_c(rng), rand_c(rng), rand_c(rng));
    while d.determinant().norm() < 0.1 {
        d = Matrix2::new(rand_c(rng), rand_c(rng), rand_c(rng), rand_c(rng));
    }
    let d = d / d.determinant().sqrt();
    let l = lorentz(d).expect("det D = 1");
    let dil = dilation(rng.random_range(0.5..2.0));
    let t1 = rt(rng);
    let t2 = rt(rng);
    let mut p = t1.mul(&l).mul(&dil).mul(&t2);
    if rng.random_bool(0.5) {
        p = p.mul(&inversion()).mul(&rt(rng));
    }
    p
}

/// Random element of SL(4,ℂ).
pub fn random_sl4c<R: Rng>(rng: &mut R) -> BlockMatrix4 {
    loop {
        let p = BlockMatrix4::new(Matrix4::from_fn(|_, _| rand_c(rng)));
        if p.det.norm() > 1e-2 {
            return p.scale(p.det.powf(-0.25));
        }
    }
}

/// h(Pv, Pv) for a raw vector.
pub fn h_after(p: &BlockMatrix4, v: &[C64; 4]) -> f64 {
    let w = p.p * Vector4::from_column_slice(v);
    let w = [w[0], w[1], w[2], w[3]];
    h_form(&w, &w).re
}

/// t = i·x₀ and x₁..x₃ of a point on a Minkowski slice.
pub fn to_minkowski(p: &Point4C) -> [C64; 4] {
    [I * p.x[0], p.x[1], p.x[2], p.x[3]]
}

pub fn from_minkowski(x: &[C64; 4]) -> Point4C {
    Point4C::new([-I * x[0], x[1], x[2], x[3]])
}
