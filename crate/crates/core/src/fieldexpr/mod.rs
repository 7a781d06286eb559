//! Expression trees for ℂ-valued fields on ℂ⁴ with exact first and second
//! derivatives.
//!
//! Every node is holomorphic in the four Cartesian coordinates except `Conj`,
//! which must be resolved against a real slice ([`FieldExpr::resolve_conj`])
//! before evaluation. Derivatives of a resolved expression along the real
//! coordinates of that slice are then ordinary holomorphic derivatives.

mod jet;
mod parse;

pub use jet::{null_of, JetC2};
pub use parse::parse;

pub use crate::coords::Metric as MetricKind;
use crate::coords::{Metric, Point4C, SliceSpec, C64, I};
use crate::error::{Error, Result};
use crate::tolerances::TAU_BRANCH;
use std::fmt;
use std::sync::Arc;

/// Which sign multiplies every principal square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub enum BranchSign {
    #[default]
    Plus,
    Minus,
}

impl BranchSign {
    pub fn sign(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> BranchSign {
        match self {
            BranchSign::Plus => BranchSign::Minus,
            BranchSign::Minus => BranchSign::Plus,
        }
    }

    pub fn parse(s: &str) -> Result<BranchSign> {
        match s {
            "+" | "plus" | "p" => Ok(BranchSign::Plus),
            "-" | "minus" | "m" => Ok(BranchSign::Minus),
            _ => Err(Error::Invalid(format!("branch must be + or -, got `{s}`"))),
        }
    }
}

/// Coordinate symbols. Each is a fixed linear form in the slots x₀..x₃;
/// `Zeta`/`Eta` reuse slots 0/1 for expressions on a surface chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(u8),
    /// t with x₀ = −i t.
    T,
    Q1,
    Qt1,
    Q2,
    Qt2,
    Zeta,
    Eta,
}

impl Var {
    pub fn coeffs(self) -> [C64; 4] {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            Var::X(k) => std::array::from_fn(|j| if j == k as usize { o } else { z }),
            Var::T => [I, z, z, z],
            Var::Q1 => [o, I, z, z],
            Var::Qt1 => [o, -I, z, z],
            Var::Q2 => [z, z, o, I],
            Var::Qt2 => [z, z, o, -I],
            Var::Zeta => [o, z, z, z],
            Var::Eta => [z, o, z, z],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X(0) => "x0",
            Var::X(1) => "x1",
            Var::X(2) => "x2",
            Var::X(_) => "x3",
            Var::T => "t",
            Var::Q1 => "q1",
            Var::Qt1 => "qt1",
            Var::Q2 => "q2",
            Var::Qt2 => "qt2",
            Var::Zeta => "zeta",
            Var::Eta => "eta",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Some(match s {
            "x0" => Var::X(0),
            "x1" => Var::X(1),
            "x2" => Var::X(2),
            "x3" => Var::X(3),
            "t" => Var::T,
            "q1" => Var::Q1,
            "qt1" => Var::Qt1,
            "q2" => Var::Q2,
            "qt2" => Var::Qt2,
            "zeta" => Var::Zeta,
            "eta" => Var::Eta,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(C64),
    Coord(Var),
    Add(FieldExpr, FieldExpr),
    Sub(FieldExpr, FieldExpr),
    Mul(FieldExpr, FieldExpr),
    Div(FieldExpr, FieldExpr),
    Neg(FieldExpr),
    Pow(FieldExpr, i32),
    Sqrt(FieldExpr),
    Log(FieldExpr),
    Exp(FieldExpr),
    Conj(FieldExpr),
}

/// Immutable, cheaply clonable expression.
#[derive(Debug, Clone)]
pub struct FieldExpr(Arc<Node>);

fn principal_sqrt(z: C64) -> C64 {
    // A signed zero imaginary part would otherwise pick the side of the cut.
    C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im }).sqrt()
}

fn principal_ln(z: C64) -> C64 {
    C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im }).ln()
}

/// Distance from z to the negative real axis including 0.
fn cut_distance(z: C64) -> f64 {
    if z.re < 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

struct Ctx {
    sign: f64,
    margin: f64,
}

fn singular(msg: &str) -> Error {
    Error::SingularPoint(msg.to_string())
}

fn check_finite(j: JetC2) -> Result<JetC2> {
    let ok = |z: &C64| z.re.is_finite() && z.im.is_finite();
    if ok(&j.value) && j.grad.iter().all(ok) && j.hess.iter().flatten().all(ok) {
        Ok(j)
    } else {
        Err(singular("non-finite derivative"))
    }
}

impl FieldExpr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn mk(n: Node) -> Self {
        FieldExpr(Arc::new(n))
    }

    pub fn c(z: C64) -> Self {
        Self::mk(Node::Const(z))
    }

    pub fn re(v: f64) -> Self {
        Self::c(C64::new(v, 0.0))
    }

    pub fn i() -> Self {
        Self::c(I)
    }

    pub fn var(v: Var) -> Self {
        Self::mk(Node::Coord(v))
    }

    pub fn x(k: u8) -> Self {
        Self::var(Var::X(k))
    }

    pub fn t() -> Self {
        Self::var(Var::T)
    }

    pub fn q1() -> Self {
        Self::var(Var::Q1)
    }

    pub fn qt1() -> Self {
        Self::var(Var::Qt1)
    }

    pub fn q2() -> Self {
        Self::var(Var::Q2)
    }

    pub fn qt2() -> Self {
        Self::var(Var::Qt2)
    }

    pub fn zeta() -> Self {
        Self::var(Var::Zeta)
    }

    pub fn eta() -> Self {
        Self::var(Var::Eta)
    }

    pub fn sqrt(&self) -> Self {
        Self::mk(Node::Sqrt(self.clone()))
    }

    pub fn ln(&self) -> Self {
        Self::mk(Node::Log(self.clone()))
    }

    pub fn exp(&self) -> Self {
        Self::mk(Node::Exp(self.clone()))
    }

    pub fn conj(&self) -> Self {
        Self::mk(Node::Conj(self.clone()))
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            1 => self.clone(),
            _ => Self::mk(Node::Pow(self.clone(), n)),
        }
    }

    pub fn as_const(&self) -> Option<C64> {
        match self.node() {
            Node::Const(z) => Some(*z),
            _ => None,
        }
    }

    fn is_const(&self, v: C64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse(s)
    }

    pub fn has_conj(&self) -> bool {
        match self.node() {
            Node::Conj(_) => true,
            Node::Const(_) | Node::Coord(_) => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.has_conj() || b.has_conj(),
            Node::Neg(a) | Node::Pow(a, _) | Node::Sqrt(a) | Node::Log(a) | Node::Exp(a) => a.has_conj(),
        }
    }

    /// Jet at `p`. Fails on unresolved `Conj` and near singularities.
    pub fn eval_jet(&self, p: &Point4C, branch: BranchSign) -> Result<JetC2> {
        let mut ctx = Ctx { sign: branch.sign(), margin: f64::INFINITY };
        self.jet(&p.x, &mut ctx)
    }

    /// Jet plus the smallest distance of any sqrt/log argument to its cut
    /// (the closed negative real axis) or of any denominator to 0.
    pub fn eval_jet_margin(&self, p: &Point4C, branch: BranchSign) -> Result<(JetC2, f64)> {
        let mut ctx = Ctx { sign: branch.sign(), margin: f64::INFINITY };
        let j = self.jet(&p.x, &mut ctx)?;
        Ok((j, ctx.margin))
    }

    /// Value only.
    pub fn eval(&self, p: &Point4C, branch: BranchSign) -> Result<C64> {
        let mut ctx = Ctx { sign: branch.sign(), margin: f64::INFINITY };
        self.value(&p.x, &mut ctx)
    }

    fn value(&self, x: &[C64; 4], ctx: &mut Ctx) -> Result<C64> {
        let v = match self.node() {
            Node::Const(z) => *z,
            Node::Coord(v) => v.coeffs().iter().zip(x).map(|(a, b)| a * b).sum(),
            Node::Add(a, b) => a.value(x, ctx)? + b.value(x, ctx)?,
            Node::Sub(a, b) => a.value(x, ctx)? - b.value(x, ctx)?,
            Node::Mul(a, b) => a.value(x, ctx)? * b.value(x, ctx)?,
            Node::Div(a, b) => {
                let d = b.value(x, ctx)?;
                if d.norm() < TAU_BRANCH {
                    return Err(singular("division by ~0"));
                }
                ctx.margin = ctx.margin.min(d.norm());
                a.value(x, ctx)? / d
            }
            Node::Neg(a) => -a.value(x, ctx)?,
            Node::Pow(a, n) => {
                let b = a.value(x, ctx)?;
                if *n < 0 && b.norm() < TAU_BRANCH {
                    return Err(singular("negative power of ~0"));
                }
                b.powi(*n)
            }
            Node::Sqrt(a) => {
                let r = a.value(x, ctx)?;
                if r.norm() < TAU_BRANCH {
                    return Err(singular("sqrt at a branch point"));
                }
                ctx.margin = ctx.margin.min(cut_distance(r));
                principal_sqrt(r) * ctx.sign
            }
            Node::Log(a) => {
                let r = a.value(x, ctx)?;
                if r.norm() < TAU_BRANCH {
                    return Err(singular("log at 0"));
                }
                ctx.margin = ctx.margin.min(cut_distance(r));
                principal_ln(r)
            }
            Node::Exp(a) => a.value(x, ctx)?.exp(),
            Node::Conj(_) => return Err(Error::Conj("bind the expression to a real slice first".into())),
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(singular("non-finite value"))
        }
    }

    fn jet(&self, x: &[C64; 4], ctx: &mut Ctx) -> Result<JetC2> {
        let j = match self.node() {
            Node::Const(z) => JetC2::constant(*z),
            Node::Coord(v) => JetC2::linear(v.coeffs(), x),
            Node::Add(a, b) => a.jet(x, ctx)? + b.jet(x, ctx)?,
            Node::Sub(a, b) => a.jet(x, ctx)? - b.jet(x, ctx)?,
            Node::Mul(a, b) => a.jet(x, ctx)? * b.jet(x, ctx)?,
            Node::Div(a, b) => {
                let d = b.jet(x, ctx)?;
                let v = d.value;
                if v.norm() < TAU_BRANCH {
                    return Err(singular("division by ~0"));
                }
                ctx.margin = ctx.margin.min(v.norm());
                let r = v.inv();
                a.jet(x, ctx)? * d.chain(r, -r * r, 2.0 * r * r * r)
            }
            Node::Neg(a) => -a.jet(x, ctx)?,
            Node::Pow(a, n) => {
                let b = a.jet(x, ctx)?;
                let v = b.value;
                let n = *n;
                if n == 0 {
                    JetC2::constant(C64::new(1.0, 0.0))
                } else {
                    if n < 0 && v.norm() < TAU_BRANCH {
                        return Err(singular("negative power of ~0"));
                    }
                    let nf = n as f64;
                    let f1 = if n == 1 { C64::new(1.0, 0.0) } else { nf * v.powi(n - 1) };
                    let f2 = match n {
                        1 => C64::new(0.0, 0.0),
                        2 => C64::new(2.0, 0.0),
                        _ => nf * (nf - 1.0) * v.powi(n - 2),
                    };
                    b.chain(v.powi(n), f1, f2)
                }
            }
            Node::Sqrt(a) => {
                let g = a.jet(x, ctx)?;
                let r = g.value;
                if r.norm() < TAU_BRANCH {
                    return Err(singular("sqrt at a branch point"));
                }
                ctx.margin = ctx.margin.min(cut_distance(r));
                let s = principal_sqrt(r) * ctx.sign;
                g.chain(s, 0.5 / s, -0.25 / (s * r))
            }
            Node::Log(a) => {
                let g = a.jet(x, ctx)?;
                let r = g.value;
                if r.norm() < TAU_BRANCH {
                    return Err(singular("log at 0"));
                }
                ctx.margin = ctx.margin.min(cut_distance(r));
                let inv = r.inv();
                g.chain(principal_ln(r), inv, -inv * inv)
            }
            Node::Exp(a) => {
                let g = a.jet(x, ctx)?;
                let e = g.value.exp();
                g.chain(e, e, e)
            }
            Node::Conj(_) => return Err(Error::Conj("bind the expression to a real slice first".into())),
        };
        check_finite(j)
    }

    /// Replaces every `Conj` by the holomorphic expression that equals it on
    /// the given real slice.
    pub fn resolve_conj(&self, slice: &SliceSpec) -> Result<FieldExpr> {
        if !self.has_conj() {
            return Ok(self.clone());
        }
        let rule = slice.conj_rule()?;
        self.resolve_with(&rule)
    }

    fn resolve_with(&self, rule: &[(f64, C64); 4]) -> Result<FieldExpr> {
        Ok(match self.node() {
            Node::Conj(a) => a.resolve_with(rule)?.conjugated(rule)?,
            Node::Const(_) | Node::Coord(_) => self.clone(),
            Node::Add(a, b) => a.resolve_with(rule)? + b.resolve_with(rule)?,
            Node::Sub(a, b) => a.resolve_with(rule)? - b.resolve_with(rule)?,
            Node::Mul(a, b) => a.resolve_with(rule)? * b.resolve_with(rule)?,
            Node::Div(a, b) => a.resolve_with(rule)? / b.resolve_with(rule)?,
            Node::Neg(a) => -a.resolve_with(rule)?,
            Node::Pow(a, n) => a.resolve_with(rule)?.powi(*n),
            Node::Sqrt(a) => a.resolve_with(rule)?.sqrt(),
            Node::Log(a) => a.resolve_with(rule)?.ln(),
            Node::Exp(a) => a.resolve_with(rule)?.exp(),
        })
    }

    /// The slice conjugate of a conj-free rational expression.
    fn conjugated(&self, rule: &[(f64, C64); 4]) -> Result<FieldExpr> {
        Ok(match self.node() {
            Node::Const(z) => FieldExpr::c(z.conj()),
            Node::Coord(v) => {
                let g = v.coeffs();
                let mut acc: Option<FieldExpr> = None;
                let mut constant = C64::new(0.0, 0.0);
                for k in 0..4 {
                    if g[k] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let (s, c) = rule[k];
                    constant += g[k].conj() * c;
                    let coef = g[k].conj() * s;
                    if coef != C64::new(0.0, 0.0) {
                        let term = FieldExpr::x(k as u8) * coef;
                        acc = Some(match acc {
                            None => term,
                            Some(a) => a + term,
                        });
                    }
                }
                match acc {
                    None => FieldExpr::c(constant),
                    Some(a) if constant == C64::new(0.0, 0.0) => a,
                    Some(a) => a + FieldExpr::c(constant),
                }
            }
            Node::Add(a, b) => a.conjugated(rule)? + b.conjugated(rule)?,
            Node::Sub(a, b) => a.conjugated(rule)? - b.conjugated(rule)?,
            Node::Mul(a, b) => a.conjugated(rule)? * b.conjugated(rule)?,
            Node::Div(a, b) => a.conjugated(rule)? / b.conjugated(rule)?,
            Node::Neg(a) => -a.conjugated(rule)?,
            Node::Pow(a, n) => a.conjugated(rule)?.powi(*n),
            Node::Conj(a) => a.clone(),
            Node::Sqrt(_) | Node::Log(_) | Node::Exp(_) => {
                return Err(Error::Conj("conj() may only wrap rational expressions of coordinates".into()))
            }
        })
    }

    /// Fixes the branch: with `Minus`, every square root is negated so that
    /// evaluating the result with `Plus` reproduces the `Minus` branch.
    pub fn bake(&self, branch: BranchSign) -> FieldExpr {
        if branch == BranchSign::Plus {
            return self.clone();
        }
        self.map_children(&|e| e.bake(branch), &|n| match n {
            Node::Sqrt(_) => Some(-FieldExpr::mk(n)),
            _ => None,
        })
    }

    /// Rebuilds the tree bottom-up. `wrap` may replace a rebuilt node.
    fn map_children(&self, f: &dyn Fn(&FieldExpr) -> FieldExpr, wrap: &dyn Fn(Node) -> Option<FieldExpr>) -> FieldExpr {
        let n = match self.node() {
            Node::Const(_) | Node::Coord(_) => return self.clone(),
            Node::Add(a, b) => Node::Add(f(a), f(b)),
            Node::Sub(a, b) => Node::Sub(f(a), f(b)),
            Node::Mul(a, b) => Node::Mul(f(a), f(b)),
            Node::Div(a, b) => Node::Div(f(a), f(b)),
            Node::Neg(a) => Node::Neg(f(a)),
            Node::Pow(a, k) => Node::Pow(f(a), *k),
            Node::Sqrt(a) => Node::Sqrt(f(a)),
            Node::Log(a) => Node::Log(f(a)),
            Node::Exp(a) => Node::Exp(f(a)),
            Node::Conj(a) => Node::Conj(f(a)),
        };
        let probe = n.clone();
        wrap(probe).unwrap_or_else(|| FieldExpr::mk(n))
    }

    /// Substitutes slot k (the k-th Cartesian coordinate) by `vars[k]`.
    pub fn substitute(&self, vars: &[FieldExpr; 4]) -> FieldExpr {
        match self.node() {
            Node::Coord(v) => {
                let g = v.coeffs();
                let mut acc: Option<FieldExpr> = None;
                for k in 0..4 {
                    if g[k] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let term = if g[k] == C64::new(1.0, 0.0) { vars[k].clone() } else { vars[k].clone() * g[k] };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a + term,
                    });
                }
                acc.unwrap_or_else(|| FieldExpr::re(0.0))
            }
            _ => self.map_children(&|e| e.substitute(vars), &|_| None),
        }
    }

    /// Symbolic derivative along slot k.
    pub fn derivative(&self, k: usize) -> Result<FieldExpr> {
        let zero = || FieldExpr::re(0.0);
        Ok(match self.node() {
            Node::Const(_) => zero(),
            Node::Coord(v) => FieldExpr::c(v.coeffs()[k]),
            Node::Add(a, b) => a.derivative(k)? + b.derivative(k)?,
            Node::Sub(a, b) => a.derivative(k)? - b.derivative(k)?,
            Node::Mul(a, b) => a.derivative(k)? * b.clone() + a.clone() * b.derivative(k)?,
            Node::Div(a, b) => a.derivative(k)? / b.clone() - a.clone() * b.derivative(k)? / b.powi(2),
            Node::Neg(a) => -a.derivative(k)?,
            Node::Pow(a, n) => match n {
                0 => zero(),
                _ => a.powi(n - 1) * a.derivative(k)? * (*n as f64),
            },
            Node::Sqrt(a) => a.derivative(k)? / (self.clone() * 2.0),
            Node::Log(a) => a.derivative(k)? / a.clone(),
            Node::Exp(a) => self.clone() * a.derivative(k)?,
            Node::Conj(_) => return Err(Error::Conj("conj() is not holomorphic".into())),
        })
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Coord(_) => 0,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.size() + b.size(),
            Node::Neg(a) | Node::Pow(a, _) | Node::Sqrt(a) | Node::Log(a) | Node::Exp(a) | Node::Conj(a) => a.size(),
        }
    }
}

/// Laplacian of `e` at `p` for the given metric, in slice coordinates.
pub fn laplacian(e: &FieldExpr, p: &Point4C, kind: Metric) -> Result<C64> {
    Ok(e.eval_jet(p, BranchSign::Plus)?.laplacian(kind))
}

/// ⟨grad e, grad e⟩ at `p` for the given metric.
pub fn grad_square(e: &FieldExpr, p: &Point4C, kind: Metric) -> Result<C64> {
    Ok(e.eval_jet(p, BranchSign::Plus)?.grad_square(kind))
}

impl From<f64> for FieldExpr {
    fn from(v: f64) -> Self {
        FieldExpr::re(v)
    }
}

impl From<C64> for FieldExpr {
    fn from(v: C64) -> Self {
        FieldExpr::c(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $node:ident, $fold:expr) => {
        impl std::ops::$tr<FieldExpr> for FieldExpr {
            type Output = FieldExpr;
            fn $m(self, o: FieldExpr) -> FieldExpr {
                let fold: fn(&FieldExpr, &FieldExpr) -> Option<FieldExpr> = $fold;
                fold(&self, &o).unwrap_or_else(|| FieldExpr::mk(Node::$node(self, o)))
            }
        }
        impl std::ops::$tr<&FieldExpr> for &FieldExpr {
            type Output = FieldExpr;
            fn $m(self, o: &FieldExpr) -> FieldExpr {
                std::ops::$tr::$m(self.clone(), o.clone())
            }
        }
        impl std::ops::$tr<f64> for FieldExpr {
            type Output = FieldExpr;
            fn $m(self, o: f64) -> FieldExpr {
                std::ops::$tr::$m(self, FieldExpr::re(o))
            }
        }
        impl std::ops::$tr<C64> for FieldExpr {
            type Output = FieldExpr;
            fn $m(self, o: C64) -> FieldExpr {
                std::ops::$tr::$m(self, FieldExpr::c(o))
            }
        }
    };
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

binop!(Add, add, Add, |a, b| {
    if a.is_const(ZERO) {
        Some(b.clone())
    } else if b.is_const(ZERO) {
        Some(a.clone())
    } else {
        None
    }
});
binop!(Sub, sub, Sub, |a, b| {
    if b.is_const(ZERO) {
        Some(a.clone())
    } else if a.is_const(ZERO) {
        Some(-b.clone())
    } else {
        None
    }
});
binop!(Mul, mul, Mul, |a, b| {
    if a.is_const(ZERO) || b.is_const(ZERO) {
        Some(FieldExpr::re(0.0))
    } else if a.is_const(ONE) {
        Some(b.clone())
    } else if b.is_const(ONE) {
        Some(a.clone())
    } else {
        None
    }
});
binop!(Div, div, Div, |a, b| {
    if b.is_const(ONE) {
        Some(a.clone())
    } else if a.is_const(ZERO) {
        Some(FieldExpr::re(0.0))
    } else {
        None
    }
});

impl std::ops::Neg for FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        match self.node() {
            Node::Const(z) => FieldExpr::c(-z),
            Node::Neg(a) => a.clone(),
            _ => FieldExpr::mk(Node::Neg(self)),
        }
    }
}

impl std::ops::Neg for &FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        -self.clone()
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v}")
}

fn fmt_const(z: C64) -> (String, u8) {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            (fmt_real(z.re), 5)
        } else {
            (format!("(-{})", fmt_real(-z.re)), 5)
        }
    } else if z.re == 0.0 {
        if z.im > 0.0 {
            (if z.im == 1.0 { "i".into() } else { format!("{}i", fmt_real(z.im)) }, 5)
        } else {
            (format!("(-{}i)", fmt_real(-z.im)), 5)
        }
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        (format!("({}{}{}i)", fmt_real(z.re), sign, fmt_real(z.im.abs())), 5)
    }
}

impl FieldExpr {
    fn render(&self) -> (String, u8) {
        let wrap = |e: &FieldExpr, min: u8| {
            let (s, p) = e.render();
            if p < min {
                format!("({s})")
            } else {
                s
            }
        };
        match self.node() {
            Node::Const(z) => fmt_const(*z),
            Node::Coord(v) => (v.name().to_string(), 5),
            Node::Add(a, b) => (format!("{} + {}", wrap(a, 1), wrap(b, 2)), 1),
            Node::Sub(a, b) => (format!("{} - {}", wrap(a, 1), wrap(b, 2)), 1),
            Node::Mul(a, b) => (format!("{}*{}", wrap(a, 2), wrap(b, 3)), 2),
            Node::Div(a, b) => (format!("{}/{}", wrap(a, 2), wrap(b, 3)), 2),
            Node::Neg(a) => (format!("-{}", wrap(a, 3)), 3),
            Node::Pow(a, n) => {
                let e = if *n < 0 { format!("({n})") } else { n.to_string() };
                (format!("{}^{}", wrap(a, 5), e), 4)
            }
            Node::Sqrt(a) => (format!("sqrt({})", a.render().0), 5),
            Node::Log(a) => (format!("log({})", a.render().0), 5),
            Node::Exp(a) => (format!("exp({})", a.render().0), 5),
            Node::Conj(a) => (format!("conj({})", a.render().0), 5),
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render().0)
    }
}

#[cfg(test)]
mod tests;
