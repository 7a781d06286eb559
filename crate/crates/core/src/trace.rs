//! Leaves of the conformal foliation on an ℝ³-slice: RK4 integral curves of
//! the unit field U = σ⁻¹(iμ), written as CSV or SVG polylines.

use crate::coords::{Point4C, SliceKind, SliceSpec};
use crate::error::{Error, Result};
use crate::exec::{map, Exec};
use crate::fieldexpr::{BranchSign, FieldExpr};
use crate::unify::{project_to_slice, ProjectedMu, SpatialField};
use serde::Serialize;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Arclength step.
    pub step: f64,
    pub steps: usize,
    /// A leaf stops once the guard's cut/denominator margin drops below this.
    pub min_margin: f64,
    pub exec: Exec,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 2e-3, steps: 2000, min_margin: 1e-3, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub leaf: usize,
    pub t: f64,
    /// (arclength, x₁, x₂, x₃).
    pub samples: Vec<[f64; 4]>,
    /// Why the leaf ended early, if it did.
    pub truncated: Option<String>,
}

impl TraceRecord {
    pub fn points(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.samples.iter().map(|s| [s[1], s[2], s[3]])
    }
}

/// The field of a μ-expression on the ℝ³-slice at time t, with its guard.
pub struct SliceField {
    pub t: f64,
    pub slice: SliceSpec,
    field: ProjectedMu,
    guard: FieldExpr,
}

impl SliceField {
    pub fn new(mu: &FieldExpr, t: f64) -> Result<SliceField> {
        let slice = SliceSpec::new(SliceKind::R3, Point4C::minkowski(t, 0.0, 0.0, 0.0));
        let field = project_to_slice(mu, &slice)?;
        let guard = mu.resolve_conj(&slice)?;
        Ok(SliceField { t, slice, field, guard })
    }

    pub fn u(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        Ok(self.field.eval(x)?.u)
    }

    fn margin(&self, x: [f64; 3]) -> f64 {
        self.slice.point(&x).and_then(|p| self.guard.eval_jet_margin(&p, BranchSign::Plus)).map_or(0.0, |(_, m)| m)
    }
}

fn axpy(x: [f64; 3], a: f64, v: [f64; 3]) -> [f64; 3] {
    [x[0] + a * v[0], x[1] + a * v[1], x[2] + a * v[2]]
}

fn rk4(f: &SliceField, x: [f64; 3], h: f64) -> Result<[f64; 3]> {
    let k1 = f.u(x)?;
    let k2 = f.u(axpy(x, 0.5 * h, k1))?;
    let k3 = f.u(axpy(x, 0.5 * h, k2))?;
    let k4 = f.u(axpy(x, h, k3))?;
    Ok(std::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

pub fn trace_leaf(field: &SliceField, leaf: usize, seed: [f64; 3], opts: &TraceOptions) -> TraceRecord {
    let mut rec = TraceRecord { leaf, t: field.t, samples: vec![[0.0, seed[0], seed[1], seed[2]]], truncated: None };
    let mut x = seed;
    for k in 1..=opts.steps {
        if field.margin(x) < opts.min_margin {
            rec.truncated = Some(format!("singular locus near s = {:.6}", (k - 1) as f64 * opts.step));
            break;
        }
        match rk4(field, x, opts.step) {
            Ok(y) if y.iter().all(|v| v.is_finite()) => x = y,
            _ => {
                rec.truncated = Some(format!("field undefined near s = {:.6}", (k - 1) as f64 * opts.step));
                break;
            }
        }
        rec.samples.push([k as f64 * opts.step, x[0], x[1], x[2]]);
    }
    rec
}

/// One leaf per seed, numbered in seed order.
pub fn trace_leaves(field: &SliceField, seeds: &[[f64; 3]], opts: &TraceOptions) -> Vec<TraceRecord> {
    let indexed: Vec<(usize, [f64; 3])> = seeds.iter().copied().enumerate().collect();
    map(opts.exec, &indexed, |&(i, s)| trace_leaf(field, i, s, opts))
}

/// `a:b:n` gives n seeds (x₁, x₂, 0) with x₂ evenly spaced on [a, b];
/// otherwise a `;`-separated list of `x1,x2,x3` points.
pub fn parse_leaves(spec: &str, x1: f64) -> Result<Vec<[f64; 3]>> {
    let bad = || Error::Invalid(format!("leaves spec `{spec}`"));
    if spec.contains(',') {
        return spec
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let v: Vec<f64> = s.split(',').map(|c| c.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
                <[f64; 3]>::try_from(v).map_err(|_| bad())
            })
            .collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok((0..n)
        .map(|k| {
            let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            [x1, a + s * (b - a), 0.0]
        })
        .collect())
}

pub fn to_csv(records: &[TraceRecord]) -> String {
    let mut out = String::from("leaf,s,x1,x2,x3\n");
    for r in records {
        for s in &r.samples {
            let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e},{:.12e}", r.leaf, s[0], s[1], s[2], s[3]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// (x₂, x₃).
    X2X3,
    /// (x₁, x₂): the half-plane arg(x₂ + ix₃) = 0.
    X1X2,
}

impl Projection {
    pub fn parse(s: &str) -> Result<Projection> {
        match s {
            "x2x3" => Ok(Projection::X2X3),
            "x1x2" | "half-plane" => Ok(Projection::X1X2),
            _ => Err(Error::UnknownKey(s.to_string())),
        }
    }

    fn apply(self, p: [f64; 3]) -> [f64; 2] {
        match self {
            Projection::X2X3 => [p[1], p[2]],
            Projection::X1X2 => [p[0], p[1]],
        }
    }

    fn labels(self) -> [&'static str; 2] {
        match self {
            Projection::X2X3 => ["x2", "x3"],
            Projection::X1X2 => ["x1", "x2"],
        }
    }
}

/// Static SVG 1.1: one polyline per leaf plus axes through the origin.
pub fn to_svg(records: &[TraceRecord], proj: Projection) -> String {
    let pts: Vec<Vec<[f64; 2]>> = records.iter().map(|r| r.points().map(|p| proj.apply(p)).collect()).collect();
    let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
    for p in pts.iter().flatten() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let size = 600.0;
    let scale = size / w.max(h);
    let sx = |x: f64| (x - lo[0] + pad) * scale;
    let sy = |y: f64| (hi[1] + pad - y) * scale;
    let (width, height) = (w * scale, h * scale);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let [lx, ly] = proj.labels();
    let _ = writeln!(
        out,
        r##"<g stroke="#999" stroke-width="0.5"><line x1="0" y1="{y0:.2}" x2="{width:.1}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="0" x2="{x0:.2}" y2="{height:.1}"/></g>"##,
        y0 = sy(0.0),
        x0 = sx(0.0)
    );
    let _ = writeln!(
        out,
        r##"<g font-family="sans-serif" font-size="12" fill="#555"><text x="{:.1}" y="{:.2}">{lx}</text><text x="{:.2}" y="12">{ly}</text></g>"##,
        width - 20.0,
        sy(0.0) - 4.0,
        sx(0.0) + 4.0
    );
    let _ = writeln!(out, r##"<g fill="none" stroke="#1f4e9c" stroke-width="1">"##);
    for (r, p) in records.iter().zip(&pts) {
        let coords: Vec<String> = p.iter().map(|q| format!("{:.2},{:.2}", sx(q[0]), sy(q[1]))).collect();
        let _ = writeln!(out, r#"<polyline id="leaf-{}" points="{}"/>"#, r.leaf, coords.join(" "));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// max |f(x) − f(x_seed)| along a leaf, with f evaluated on the leaf's slice.
pub fn invariant_defect(f: &FieldExpr, rec: &TraceRecord) -> Result<f64> {
    let slice = SliceSpec::new(SliceKind::R3, Point4C::minkowski(rec.t, 0.0, 0.0, 0.0));
    let f = f.resolve_conj(&slice)?;
    let vals: Vec<_> =
        rec.points().map(|x| slice.point(&x).and_then(|p| f.eval(&p, BranchSign::Plus))).collect::<Result<_>>()?;
    let v0 = vals.first().copied().ok_or(Error::EmptyDomain)?;
    Ok(vals.iter().map(|v| (v - v0).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::C64;
    use crate::hyperbolic::{restrict_boundary, solve_superminimal, Family, SurfaceChart};
    use std::f64::consts::PI;

    fn circles_mu() -> FieldExpr {
        FieldExpr::parse("(x0 + sqrt(x0^2 + x2^2 + x3^2))/(x2 - i*x3)").unwrap()
    }

    #[test]
    fn circles_close_after_one_period() {
        let f = SliceField::new(&circles_mu(), 0.0).unwrap();
        for r0 in [0.5, 1.0, 1.7] {
            let n = 2000;
            let opts = TraceOptions { step: 2.0 * PI * r0 / n as f64, steps: n, ..TraceOptions::default() };
            let rec = trace_leaf(&f, 0, [0.3, r0, 0.0], &opts);
            assert!(rec.truncated.is_none());
            let last = rec.samples.last().unwrap();
            let err = ((last[1] - 0.3).powi(2) + (last[2] - r0).powi(2) + last[3].powi(2)).sqrt();
            assert!(err < 1e-6, "r0={r0}: {err}");
            for s in &rec.samples {
                assert!(((s[2] * s[2] + s[3] * s[3]).sqrt() - r0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn involutes_keep_the_twistor_boundary_function_constant() {
        let t = 1.0;
        let f = SliceField::new(&circles_mu(), t).unwrap();
        let sol = solve_superminimal(&SurfaceChart::of(Family::Circles).unwrap(), C64::new(0.0, -t)).unwrap();
        let inv = restrict_boundary(&sol).unwrap();
        let seeds = parse_leaves("1.2:2.5:5", 0.0).unwrap();
        let opts = TraceOptions { steps: 600, ..TraceOptions::default() };
        for rec in trace_leaves(&f, &seeds, &opts) {
            assert!(rec.samples.len() > 50);
            assert!(invariant_defect(&inv, &rec).unwrap() < 1e-8, "leaf {}", rec.leaf);
        }
    }

    #[test]
    fn involute_tangents_follow_the_extended_circles_field() {
        let t = 1.0;
        let f = SliceField::new(&circles_mu(), t).unwrap();
        let seeds = parse_leaves("1.2:2.5:4", 0.3).unwrap();
        for rec in trace_leaves(&f, &seeds, &TraceOptions { steps: 400, ..TraceOptions::default() }) {
            for x in rec.points() {
                let u = f.u(x).unwrap();
                let rho2 = x[1] * x[1] + x[2] * x[2];
                let r = (rho2 - t * t).sqrt();
                let want = [0.0, r / rho2 * (-x[2] + t / r * x[1]), r / rho2 * (x[1] + t / r * x[2])];
                assert!((0..3).all(|k| (u[k] - want[k]).abs() < 1e-8), "{x:?}: {u:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn coaxal_leaves_stay_in_the_half_plane_with_constant_phi() {
        let sol = solve_superminimal(&SurfaceChart::of(Family::Coaxal).unwrap(), C64::new(0.0, 0.0)).unwrap();
        let f = SliceField::new(&sol.mu, 0.0).unwrap();
        let phi = restrict_boundary(&sol).unwrap();
        let seeds = parse_leaves("0.3:1.5:5", 0.2).unwrap();
        for rec in trace_leaves(&f, &seeds, &TraceOptions { steps: 800, ..TraceOptions::default() }) {
            assert!(rec.samples.len() > 100, "leaf {} {:?}", rec.leaf, rec.truncated);
            assert!(rec.samples.iter().all(|s| s[3].abs() < 1e-9 && s[2] > 0.0));
            assert!(invariant_defect(&phi, &rec).unwrap() < 1e-8, "leaf {}", rec.leaf);
        }
    }

    #[test]
    fn parallel_and_sequential_traces_agree() {
        let f = SliceField::new(&circles_mu(), 0.5).unwrap();
        let seeds = parse_leaves("0.8:2:6", 0.1).unwrap();
        let a =
            trace_leaves(&f, &seeds, &TraceOptions { steps: 200, exec: Exec::Sequential, ..TraceOptions::default() });
        let b = trace_leaves(&f, &seeds, &TraceOptions { steps: 200, exec: Exec::Parallel, ..TraceOptions::default() });
        assert_eq!(a, b);
        assert_eq!(to_csv(&a), to_csv(&b));
    }

    #[test]
    fn csv_and_svg_shapes() {
        let f = SliceField::new(&circles_mu(), 0.0).unwrap();
        let recs = trace_leaves(&f, &[[0.0, 1.0, 0.0]], &TraceOptions { steps: 10, ..TraceOptions::default() });
        let csv = to_csv(&recs);
        assert!(csv.starts_with("leaf,s,x1,x2,x3\n"));
        assert_eq!(csv.lines().count(), 12);
        let svg = to_svg(&recs, Projection::X2X3);
        assert!(svg.contains(r#"version="1.1""#) && svg.contains("<polyline") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn leaves_entering_the_cone_are_truncated() {
        let f = SliceField::new(&circles_mu(), 1.0).unwrap();
        let rec = trace_leaf(&f, 0, [0.0, 0.5, 0.0], &TraceOptions::default());
        assert!(rec.truncated.is_some());
        assert_eq!(rec.samples.len(), 1);
    }

    #[test]
    fn leaves_spec_forms() {
        assert_eq!(parse_leaves("1:2:3", 0.5).unwrap(), vec![[0.5, 1.0, 0.0], [0.5, 1.5, 0.0], [0.5, 2.0, 0.0]]);
        assert_eq!(parse_leaves("1,2,3;4,5,6", 0.0).unwrap(), vec![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert!(parse_leaves("1:2", 0.0).is_err());
        assert!(parse_leaves("1,2", 0.0).is_err());
    }
}
