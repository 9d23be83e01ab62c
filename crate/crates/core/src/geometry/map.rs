//! Composable expression trees for maps between chart domains.

use serde::{Deserialize, Serialize};

use super::chart::{wrap, Chart};
use super::expr::{self, c, Expr};
use crate::error::{Error, Result};
use crate::numeric::{fd_derivative, BigScalar, FdConfig, Real};
use crate::stretch::StretchProfile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    All,
    /// `x[axis] < bound`
    Below { axis: usize, bound: Expr },
    /// `x[axis] >= bound`
    AtLeast { axis: usize, bound: Expr },
    /// `x[axis] > bound`
    Above { axis: usize, bound: Expr },
    /// `x[axis] <= bound`
    AtMost { axis: usize, bound: Expr },
    /// `lo <= x[axis] < hi`
    Between { axis: usize, lo: Expr, hi: Expr },
}

impl Region {
    pub fn contains(&self, p: &[Real], bits: usize) -> Result<bool> {
        let coord = |axis: usize| {
            p.get(axis).ok_or_else(|| Error::Dimension(format!("region tests x{axis} of a {}-point", p.len())))
        };
        Ok(match self {
            Region::All => true,
            Region::Below { axis, bound } => *coord(*axis)? < bound.eval(p, bits)?,
            Region::AtLeast { axis, bound } => *coord(*axis)? >= bound.eval(p, bits)?,
            Region::Above { axis, bound } => *coord(*axis)? > bound.eval(p, bits)?,
            Region::AtMost { axis, bound } => *coord(*axis)? <= bound.eval(p, bits)?,
            Region::Between { axis, lo, hi } => {
                let x = coord(*axis)?;
                *x >= lo.eval(p, bits)? && *x < hi.eval(p, bits)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub region: Region,
    pub map: MapExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapExpr {
    Identity { dim: usize },
    Linear { matrix: Vec<Vec<Expr>> },
    Translation { vector: Vec<Expr> },
    /// An explicit closed form `x -> (outputs_i(x))`, optionally with its inverse and Jacobian.
    ScalarGraph {
        name: String,
        dim_in: usize,
        outputs: Vec<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inverse: Option<Vec<Expr>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jacobian: Option<Vec<Vec<Expr>>>,
    },
    /// Block-diagonal product acting on consecutive coordinate blocks.
    Product { factors: Vec<MapExpr> },
    /// `outer . inner`; `inner` is applied first.
    Composition { outer: Box<MapExpr>, inner: Box<MapExpr> },
    Inverse { inner: Box<MapExpr> },
    /// `to_euclid . inner . from_euclid`: `inner` written in the chart's ambient coordinates.
    ChartConjugate { chart: Chart, inner: Box<MapExpr> },
    /// `from_euclid . inner . to_euclid`: `inner` written in the chart's local coordinates.
    LocalConjugate { chart: Chart, inner: Box<MapExpr> },
    Stretch {
        profile: StretchProfile,
        axis: usize,
        dim: usize,
        #[serde(default)]
        inverse: bool,
    },
    Piecewise {
        dim: usize,
        branches: Vec<Branch>,
        /// Every branch maps its region into itself, so the inverse is branchwise.
        #[serde(default)]
        preserves_regions: bool,
    },
    /// `(x, y) -> (t(x, y), y * h(x, y))` with the transverse coordinate last.
    CollarGerm { tangential: Vec<Expr>, factor: Expr },
    /// Blown-up `inner` on `(theta, r)` with `theta` a unit vector:
    /// `beta^-1 inner beta` for `r > 0` and `D0 theta / |D0 theta|` at `r = 0`.
    Blowup {
        inner: Box<MapExpr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        derivative: Option<Box<MapExpr>>,
    },
    /// `x -> A x / |A x|` on the unit sphere.
    Projective { matrix: Vec<Vec<Expr>> },
    /// Applies `inner`, then reduces coordinate `i` modulo `periods[i]` when given.
    Quotient { periods: Vec<Option<Expr>>, inner: Box<MapExpr> },
}

fn int_matrix(m: &[Vec<i64>]) -> Vec<Vec<Expr>> {
    m.iter().map(|r| r.iter().map(|&x| c(x as f64)).collect()).collect()
}

impl MapExpr {
    pub fn identity(dim: usize) -> Self {
        MapExpr::Identity { dim }
    }

    pub fn linear_i64(m: &[Vec<i64>]) -> Self {
        MapExpr::Linear { matrix: int_matrix(m) }
    }

    pub fn projective_i64(m: &[Vec<i64>]) -> Self {
        MapExpr::Projective { matrix: int_matrix(m) }
    }

    pub fn translation(v: &[f64]) -> Self {
        MapExpr::Translation { vector: v.iter().map(|&x| c(x)).collect() }
    }

    pub fn then(self, outer: MapExpr) -> MapExpr {
        MapExpr::Composition { outer: Box::new(outer), inner: Box::new(self) }
    }

    pub fn node_name(&self) -> String {
        match self {
            MapExpr::Identity { .. } => "identity".into(),
            MapExpr::Linear { .. } => "linear".into(),
            MapExpr::Translation { .. } => "translation".into(),
            MapExpr::ScalarGraph { name, .. } => format!("scalar_graph({name})"),
            MapExpr::Product { .. } => "product".into(),
            MapExpr::Composition { .. } => "composition".into(),
            MapExpr::Inverse { .. } => "inverse".into(),
            MapExpr::ChartConjugate { chart, .. } => format!("chart_conjugate({})", chart.name()),
            MapExpr::LocalConjugate { chart, .. } => format!("local_conjugate({})", chart.name()),
            MapExpr::Stretch { profile, inverse, .. } => {
                format!("stretch({}{})", profile.name(), if *inverse { "^-1" } else { "" })
            }
            MapExpr::Piecewise { .. } => "piecewise".into(),
            MapExpr::CollarGerm { .. } => "collar_germ".into(),
            MapExpr::Blowup { .. } => "blowup".into(),
            MapExpr::Projective { .. } => "projective".into(),
            MapExpr::Quotient { .. } => "quotient".into(),
        }
    }

    pub fn dim_in(&self) -> Option<usize> {
        match self {
            MapExpr::Identity { dim } | MapExpr::Stretch { dim, .. } | MapExpr::Piecewise { dim, .. } => Some(*dim),
            MapExpr::Linear { matrix } => matrix.first().map(Vec::len),
            MapExpr::Translation { vector } => Some(vector.len()),
            MapExpr::ScalarGraph { dim_in, .. } => Some(*dim_in),
            MapExpr::Product { factors } => factors.iter().map(MapExpr::dim_in).sum(),
            MapExpr::Composition { inner, .. } => inner.dim_in(),
            MapExpr::Inverse { inner } => inner.dim_out(),
            MapExpr::ChartConjugate { chart, .. } => Some(chart.local_dim()),
            MapExpr::LocalConjugate { chart, .. } => Some(chart.ambient_dim()),
            MapExpr::CollarGerm { tangential, .. } => Some(tangential.len() + 1),
            MapExpr::Blowup { inner, .. } => inner.dim_in().map(|n| n + 1),
            MapExpr::Projective { matrix } => Some(matrix.len()),
            MapExpr::Quotient { inner, .. } => inner.dim_in(),
        }
    }

    pub fn dim_out(&self) -> Option<usize> {
        match self {
            MapExpr::Linear { matrix } => Some(matrix.len()),
            MapExpr::ScalarGraph { outputs, .. } => Some(outputs.len()),
            MapExpr::Product { factors } => factors.iter().map(MapExpr::dim_out).sum(),
            MapExpr::Composition { outer, .. } => outer.dim_out(),
            MapExpr::Inverse { inner } => inner.dim_in(),
            MapExpr::Blowup { inner, .. } => inner.dim_out().map(|n| n + 1),
            MapExpr::Quotient { inner, .. } => inner.dim_out(),
            _ => self.dim_in(),
        }
    }
}

/// `f . g`; fails when the known dimensions disagree.
pub fn compose(f: &MapExpr, g: &MapExpr) -> Result<MapExpr> {
    if let (Some(a), Some(b)) = (f.dim_in(), g.dim_out()) {
        if a != b {
            return Err(Error::Dimension(format!(
                "cannot compose {} (input dim {a}) after {} (output dim {b})",
                f.node_name(),
                g.node_name()
            )));
        }
    }
    Ok(MapExpr::Composition { outer: Box::new(f.clone()), inner: Box::new(g.clone()) })
}

fn unsupported<T>(node: &MapExpr, why: &str) -> Result<T> {
    Err(Error::Unsupported(format!("{} has no closed-form inverse{why}", node.node_name())))
}

/// Closed-form inverse, built structurally.
pub fn invert(f: &MapExpr) -> Result<MapExpr> {
    Ok(match f {
        MapExpr::Identity { .. } => f.clone(),
        MapExpr::Linear { matrix } => {
            if matrix.len() != matrix.first().map_or(0, Vec::len) {
                return unsupported(f, " (not square)");
            }
            match expr::inverse(matrix) {
                Some(m) => MapExpr::Linear { matrix: m },
                None => return unsupported(f, " (singular)"),
            }
        }
        MapExpr::Translation { vector } => MapExpr::Translation { vector: vector.iter().map(|e| -e.clone()).collect() },
        MapExpr::ScalarGraph { name, outputs, inverse, .. } => match inverse {
            Some(inv) => MapExpr::ScalarGraph {
                name: format!("{name}^-1"),
                dim_in: outputs.len(),
                outputs: inv.clone(),
                inverse: Some(outputs.clone()),
                jacobian: None,
            },
            None => return unsupported(f, ""),
        },
        MapExpr::Product { factors } => {
            MapExpr::Product { factors: factors.iter().map(invert).collect::<Result<_>>()? }
        }
        MapExpr::Composition { outer, inner } => {
            MapExpr::Composition { outer: Box::new(invert(inner)?), inner: Box::new(invert(outer)?) }
        }
        MapExpr::Inverse { inner } => (**inner).clone(),
        MapExpr::ChartConjugate { chart, inner } => {
            MapExpr::ChartConjugate { chart: chart.clone(), inner: Box::new(invert(inner)?) }
        }
        MapExpr::LocalConjugate { chart, inner } => {
            MapExpr::LocalConjugate { chart: chart.clone(), inner: Box::new(invert(inner)?) }
        }
        MapExpr::Stretch { profile, axis, dim, inverse } => {
            MapExpr::Stretch { profile: profile.clone(), axis: *axis, dim: *dim, inverse: !inverse }
        }
        MapExpr::Piecewise { dim, branches, preserves_regions } => {
            if !preserves_regions {
                return unsupported(f, " (branches do not preserve their regions)");
            }
            MapExpr::Piecewise {
                dim: *dim,
                branches: branches
                    .iter()
                    .map(|b| Ok(Branch { region: b.region.clone(), map: invert(&b.map)? }))
                    .collect::<Result<_>>()?,
                preserves_regions: true,
            }
        }
        MapExpr::CollarGerm { .. } => return unsupported(f, ""),
        MapExpr::Blowup { inner, derivative } => MapExpr::Blowup {
            inner: Box::new(invert(inner)?),
            derivative: derivative.as_ref().map(|d| invert(d).map(Box::new)).transpose()?,
        },
        MapExpr::Projective { matrix } => match expr::inverse(matrix) {
            Some(m) => MapExpr::Projective { matrix: m },
            None => return unsupported(f, " (singular)"),
        },
        MapExpr::Quotient { periods, inner } => {
            MapExpr::Quotient { periods: periods.clone(), inner: Box::new(invert(inner)?) }
        }
    })
}

fn check_len(f: &MapExpr, p: &[Real]) -> Result<()> {
    if let Some(n) = f.dim_in() {
        if n != p.len() {
            return Err(Error::Dimension(format!("{} expects {n} coordinates, got {}", f.node_name(), p.len())));
        }
    }
    Ok(())
}

fn norm(v: &[Real]) -> Result<Real> {
    let mut acc = Real::zero(v.first().map_or(crate::numeric::DEFAULT_BITS, Real::bits));
    for x in v {
        acc = acc.add(&x.mul(x)?)?;
    }
    acc.sqrt()
}

fn mat_vec(m: &[Vec<Expr>], p: &[Real], bits: usize) -> Result<Vec<Real>> {
    m.iter()
        .map(|row| {
            let mut acc = Real::zero(bits);
            for (e, x) in row.iter().zip(p) {
                if e.is_zero() {
                    continue;
                }
                let term = match e.as_const() {
                    Some(1.0) => x.clone(),
                    _ => e.eval(p, bits)?.mul(x)?,
                };
                acc = acc.add(&term)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Evaluates `f` at `p` with `bits` of working precision.
pub fn evaluate(f: &MapExpr, p: &[Real], bits: usize) -> Result<Vec<Real>> {
    eval_node(f, p, bits).map_err(|e| e.context(&f.node_name()))
}

fn eval_node(f: &MapExpr, p: &[Real], bits: usize) -> Result<Vec<Real>> {
    check_len(f, p)?;
    match f {
        MapExpr::Identity { .. } => Ok(p.to_vec()),
        MapExpr::Linear { matrix } => mat_vec(matrix, p, bits),
        MapExpr::Translation { vector } => {
            p.iter().zip(vector).map(|(x, v)| x.add(&v.eval(p, bits)?)).collect()
        }
        MapExpr::ScalarGraph { outputs, .. } => outputs.iter().map(|e| e.eval(p, bits)).collect(),
        MapExpr::Product { factors } => {
            let mut out = Vec::with_capacity(p.len());
            let mut at = 0;
            for fac in factors {
                let n = fac
                    .dim_in()
                    .ok_or_else(|| Error::Dimension(format!("product factor {} has no fixed dimension", fac.node_name())))?;
                out.extend(evaluate(fac, &p[at..at + n], bits)?);
                at += n;
            }
            Ok(out)
        }
        MapExpr::Composition { outer, inner } => evaluate(outer, &evaluate(inner, p, bits)?, bits),
        MapExpr::Inverse { inner } => evaluate(&invert(inner)?, p, bits),
        MapExpr::ChartConjugate { chart, inner } => {
            let x = chart.from_euclid(p, bits)?;
            let y = evaluate(inner, &x, bits)?;
            chart.to_euclid(&y, bits)
        }
        MapExpr::LocalConjugate { chart, inner } => {
            let x = chart.to_euclid(p, bits)?;
            let y = evaluate(inner, &x, bits)?;
            chart.from_euclid(&y, bits)
        }
        MapExpr::Stretch { profile, axis, inverse, .. } => {
            let mut out = p.to_vec();
            out[*axis] = if *inverse { profile.apply_inv(&p[*axis], bits)? } else { profile.apply(&p[*axis], bits)? };
            Ok(out)
        }
        MapExpr::Piecewise { branches, .. } => {
            for b in branches {
                if b.region.contains(p, bits)? {
                    return evaluate(&b.map, p, bits);
                }
            }
            Err(Error::Domain(format!("no branch contains the point ({})", show(p))))
        }
        MapExpr::CollarGerm { tangential, factor } => {
            let y = p.last().expect("collar germ has a transverse coordinate");
            let mut out = tangential.iter().map(|e| e.eval(p, bits)).collect::<Result<Vec<_>>>()?;
            out.push(y.mul(&factor.eval(p, bits)?)?);
            Ok(out)
        }
        MapExpr::Blowup { inner, derivative } => eval_blowup(inner, derivative.as_deref(), p, bits),
        MapExpr::Projective { matrix } => {
            let q = mat_vec(matrix, p, bits)?;
            let n = norm(&q)?;
            if n.is_zero() {
                return Err(Error::Domain("A x vanished".into()));
            }
            q.iter().map(|x| x.div(&n)).collect()
        }
        MapExpr::Quotient { periods, inner } => {
            let mut out = evaluate(inner, p, bits)?;
            for (x, per) in out.iter_mut().zip(periods) {
                if let Some(per) = per {
                    *x = wrap(x, &per.eval(p, bits)?)?;
                }
            }
            Ok(out)
        }
    }
}

fn show(p: &[Real]) -> String {
    p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

/// How far a blow-up direction may sit off the unit sphere before it is rejected.
const UNIT_SLACK: f64 = 1e-12;

fn eval_blowup(inner: &MapExpr, derivative: Option<&MapExpr>, p: &[Real], bits: usize) -> Result<Vec<Real>> {
    let n = p.len() - 1;
    let r = &p[n];
    let len = norm(&p[..n])?;
    let dev = len.sub(&Real::one(bits))?.abs().to_f64();
    if dev > UNIT_SLACK {
        return Err(Error::Domain(format!("direction is not a unit vector (|theta| - 1 = {dev:e})")));
    }
    // inputs rounded from f64 are only unit to about 1e-16; renormalize
    let theta = &p[..n].iter().map(|t| t.div(&len)).collect::<Result<Vec<_>>>()?;
    if r.signum() < 0 {
        return Err(Error::Domain("negative radius".into()));
    }
    // Below this radius the second-order part of the inner map is under
    // working precision, and forming `r * theta` would lose the direction
    // whenever `r` only exists as a logarithm.
    let first_order = -((bits + 64) as f64) * std::f64::consts::LN_2;
    if r.is_zero() || r.ln_abs_f64() < first_order {
        let v = match derivative {
            Some(d) => evaluate(d, theta, bits)?,
            None => {
                let origin = vec![BigScalar::zero(bits); n];
                let cfg = FdConfig { precision_bits: bits, ..FdConfig::default() };
                let jac = jacobian_fd(inner, &origin, &cfg)?;
                jac.iter()
                    .map(|row| {
                        let mut acc = Real::zero(bits);
                        for (a, t) in row.iter().zip(theta) {
                            acc = acc.add(&t.scale(a)?)?;
                        }
                        Ok(acc)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let m = norm(&v)?;
        if m.is_zero() {
            return Err(Error::DegenerateDerivative(format!("D0 theta vanishes at theta = ({})", show(theta))));
        }
        let mut out = v.iter().map(|x| x.div(&m)).collect::<Result<Vec<_>>>()?;
        out.push(if r.is_zero() { Real::zero(bits) } else { r.mul(&m)? });
        return Ok(out);
    }
    let x = theta.iter().map(|t| t.mul(r)).collect::<Result<Vec<_>>>()?;
    let q = evaluate(inner, &x, bits)?;
    let rr = norm(&q)?;
    if rr.is_zero() {
        return Err(Error::Domain("inner map sent a nonzero point to the origin".into()));
    }
    let mut out = q.iter().map(|v| v.div(&rr)).collect::<Result<Vec<_>>>()?;
    out.push(rr);
    Ok(out)
}

/// Matrix of first partials by Richardson-extrapolated central differences.
pub fn jacobian_fd(f: &MapExpr, p: &[BigScalar], cfg: &FdConfig) -> Result<Vec<Vec<BigScalar>>> {
    let bits = cfg.precision_bits;
    let base: Vec<Real> = p.iter().map(|x| Real::from_big(x.with_bits(bits))).collect();
    let m = f.dim_out().unwrap_or(p.len());
    let mut jac = vec![vec![BigScalar::zero(bits); p.len()]; m];
    for j in 0..p.len() {
        for (i, row) in jac.iter_mut().enumerate() {
            let est = fd_derivative(
                |t: &BigScalar| {
                    let mut q = base.clone();
                    q[j] = Real::from_big(t.clone());
                    evaluate(f, &q, bits)?[i].to_big()
                },
                &p[j],
                cfg,
            )?;
            row[j] = est.value;
        }
    }
    Ok(jac)
}

/// Evaluates a closed-form Jacobian given as expressions.
pub fn eval_matrix(m: &[Vec<Expr>], p: &[Real], bits: usize) -> Result<Vec<Vec<Real>>> {
    m.iter().map(|row| row.iter().map(|e| e.eval(p, bits)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::var;

    const B: usize = 256;

    fn pt(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| Real::from_f64(*x, B)).collect()
    }

    fn close(a: &[Real], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x.to_f64() - y).abs() <= tol)
    }

    fn heis_x() -> MapExpr {
        MapExpr::linear_i64(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]])
    }

    #[test]
    fn spec_examples() {
        assert!(close(&evaluate(&MapExpr::identity(2), &pt(&[0.3, 0.7]), B).unwrap(), &[0.3, 0.7], 0.0));
        assert!(close(&evaluate(&heis_x(), &pt(&[0.0, 1.0, 0.0]), B).unwrap(), &[1.0, 1.0, 0.0], 0.0));
        let f = compose(&MapExpr::translation(&[1.0, 0.0]), &MapExpr::translation(&[0.0, 1.0])).unwrap();
        assert!(close(&evaluate(&f, &pt(&[0.0, 0.0]), B).unwrap(), &[1.0, 1.0], 0.0));
    }

    #[test]
    fn inverses() {
        let t = invert(&MapExpr::translation(&[1.5, -2.0])).unwrap();
        assert_eq!(t, MapExpr::translation(&[-1.5, 2.0]));
        match invert(&heis_x()).unwrap() {
            MapExpr::Linear { matrix } => assert_eq!(matrix[0][1].as_const(), Some(-1.0)),
            other => panic!("{other:?}"),
        }
        let f = compose(&heis_x(), &MapExpr::projective_i64(&[vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]])).unwrap();
        let g = compose(&f, &invert(&f).unwrap()).unwrap();
        let p: Vec<Real> = ["0.6", "0", "0.8"].iter().map(|d| Real::from_big(BigScalar::parse(d, B).unwrap())).collect();
        let q = evaluate(&g, &p, B).unwrap();
        for (a, b) in q.iter().zip(&p) {
            assert!(a.sub(b).unwrap().abs().to_f64() < 1e-70);
        }
        let germ = MapExpr::CollarGerm { tangential: vec![var(0)], factor: c(2.0) };
        assert!(matches!(invert(&germ), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fd_jacobians() {
        let cfg = FdConfig::default();
        let m = MapExpr::linear_i64(&[vec![2, 3], vec![-1, 4]]);
        let j = jacobian_fd(&m, &[BigScalar::from_f64(0.2, B), BigScalar::from_f64(-0.7, B)], &cfg).unwrap();
        assert!((j[0][1].to_f64() - 3.0).abs() < 1e-30 && (j[1][0].to_f64() + 1.0).abs() < 1e-30);
        let f = MapExpr::ScalarGraph {
            name: "shear-square".into(),
            dim_in: 2,
            outputs: vec![var(0) + var(1).powi(2), var(1)],
            inverse: None,
            jacobian: None,
        };
        let j = jacobian_fd(&f, &[BigScalar::zero(B), BigScalar::one(B)], &cfg).unwrap();
        let want = [[1.0, 2.0], [0.0, 1.0]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k].to_f64() - want[i][k]).abs() < 1e-30);
            }
        }
    }

    #[test]
    fn blowup_boundary_rule() {
        let diag = MapExpr::linear_i64(&[vec![2, 0], vec![0, 1]]);
        let with_d = MapExpr::Blowup { inner: Box::new(diag.clone()), derivative: Some(Box::new(diag.clone())) };
        let fd_only = MapExpr::Blowup { inner: Box::new(diag), derivative: None };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for f in [&with_d, &fd_only] {
            let out = evaluate(f, &pt(&[s, s, 0.0]), B).unwrap();
            let n5 = 5f64.sqrt();
            assert!(close(&out, &[2.0 / n5, 1.0 / n5, 0.0], 1e-15));
            let out = evaluate(f, &pt(&[0.0, 1.0, 0.0]), B).unwrap();
            assert!(close(&out, &[0.0, 1.0, 0.0], 1e-15));
        }
        assert!(evaluate(&with_d, &pt(&[1.0, 1.0, 0.0]), B).is_err());
        let out = evaluate(&with_d, &pt(&[1.0, 0.0, 0.5]), B).unwrap();
        assert!(close(&out, &[1.0, 0.0, 1.0], 1e-30));
    }

    #[test]
    fn blowup_keeps_the_direction_at_log_radii() {
        let diag = MapExpr::linear_i64(&[vec![2, 0], vec![0, 1]]);
        let f = MapExpr::Blowup { inner: Box::new(diag.clone()), derivative: Some(Box::new(diag)) };
        let r = Real::from_log(crate::numeric::LogScalar::positive(BigScalar::from_f64(-1e40, B)), B).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let out = evaluate(&f, &[Real::from_f64(s, B), Real::from_f64(s, B), r.clone()], B).unwrap();
        let n5 = 5f64.sqrt();
        assert!(close(&out[..2], &[2.0 / n5, 1.0 / n5], 1e-15));
        // |D theta| = sqrt(5/2)
        let lm = |x: &Real| x.to_log().unwrap().logmag().unwrap().clone();
        let gain = (&lm(&out[2]) - &lm(&r)).to_f64();
        assert!((gain - 0.5 * 2.5f64.ln()).abs() < 1e-6, "{gain}");
    }

    #[test]
    fn piecewise_errors_name_the_node() {
        let f = MapExpr::Piecewise {
            dim: 1,
            branches: vec![Branch { region: Region::Below { axis: 0, bound: c(0.0) }, map: MapExpr::identity(1) }],
            preserves_regions: true,
        };
        let e = evaluate(&f, &pt(&[1.0]), B).unwrap_err();
        assert!(format!("{e}").contains("piecewise"));
    }

    #[test]
    fn serde_round_trip() {
        let f = MapExpr::Quotient {
            periods: vec![Some(expr::dec("0.41421356237309504880168872420969807856967187537694")), None],
            inner: Box::new(compose(&MapExpr::translation(&[0.0, 1.0]), &MapExpr::linear_i64(&[vec![1, 1], vec![0, 1]])).unwrap()),
        };
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"kind\":\"quotient\""));
        assert_eq!(serde_json::from_str::<MapExpr>(&s).unwrap(), f);
    }
}
