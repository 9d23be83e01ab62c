//! Blow-up of a surface at a fixed point and the induced maps `f~`.
//!
//! A blown-up point is `(theta, r)` with `theta` a unit vector in the chart
//! plane; `r = 0` is the exceptional circle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::expr::Expr;
use crate::geometry::{compose, evaluate, Chart, ManifoldModel, MapExpr};
use crate::numeric::{Real, TolerancePolicy};

/// A point of a model together with a chart centered there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupSite {
    pub manifold: ManifoldModel,
    pub point: Vec<f64>,
    /// `None` when the model's own coordinates already put the point at the origin.
    pub chart: Option<Chart>,
}

impl BlowupSite {
    pub fn new(manifold: ManifoldModel, point: Vec<f64>, chart: Option<Chart>, bits: usize) -> Result<Self> {
        let site = BlowupSite { manifold, point, chart };
        let local = site.to_local(&site.point_real(bits), bits)?;
        if local.iter().any(|x| !x.is_zero()) {
            return Err(Error::Parameter(format!("the site chart does not center ({:?}) at the origin", site.point)));
        }
        Ok(site)
    }

    /// The pole `(sign, 0, 0)` of the sphere in geodesic normal coordinates.
    pub fn sphere_pole(sign: i8) -> Self {
        BlowupSite { manifold: ManifoldModel::sphere(), point: vec![sign as f64, 0.0, 0.0], chart: Some(Chart::SphereExp { sign }) }
    }

    /// The origin of the plane.
    pub fn plane_origin() -> Self {
        BlowupSite { manifold: ManifoldModel::plane(), point: vec![0.0, 0.0], chart: None }
    }

    pub fn point_real(&self, bits: usize) -> Vec<Real> {
        self.point.iter().map(|x| Real::from_f64(*x, bits)).collect()
    }

    /// Dimension `n` of the chart plane; blown-up points have `n + 1` coordinates.
    pub fn dim(&self) -> usize {
        self.chart.as_ref().map_or(self.point.len(), Chart::local_dim)
    }

    fn to_local(&self, p: &[Real], bits: usize) -> Result<Vec<Real>> {
        match &self.chart {
            Some(c) => c.to_euclid(p, bits),
            None => Ok(p.to_vec()),
        }
    }

    /// `phi f phi^-1`: `f` in the centered chart.
    pub fn localize(&self, f: &MapExpr) -> MapExpr {
        match &self.chart {
            Some(c) => MapExpr::ChartConjugate { chart: c.clone(), inner: Box::new(f.clone()) },
            None => f.clone(),
        }
    }

    /// Distance from `f(x)` to `x`.
    pub fn displacement(&self, f: &MapExpr, bits: usize) -> Result<f64> {
        let x = self.point_real(bits);
        let fx = evaluate(f, &x, bits)?;
        self.manifold.distance(&fx, &x, bits)
    }
}

/// `beta(theta, r) = r theta`.
pub fn blow_down(theta: &[Real], r: &Real, bits: usize) -> Result<Vec<Real>> {
    let n = norm(theta, bits)?;
    let dev = n.sub(&Real::one(bits))?.abs().to_f64();
    if dev > 1e-12 {
        return Err(Error::Domain(format!("direction is not a unit vector (|theta| - 1 = {dev:e})")));
    }
    if r.signum() < 0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    theta.iter().map(|t| t.mul(r)).collect()
}

/// `p -> (p / |p|, |p|)` for `p != 0`.
pub fn blow_up_pt(p: &[Real], bits: usize) -> Result<(Vec<Real>, Real)> {
    let r = norm(p, bits)?;
    if r.is_zero() {
        return Err(Error::Domain("the origin blows up to the whole circle of directions".into()));
    }
    Ok((p.iter().map(|x| x.div(&r)).collect::<Result<_>>()?, r))
}

fn norm(v: &[Real], bits: usize) -> Result<Real> {
    let mut acc = Real::zero(bits);
    for x in v {
        acc = acc.add(&x.mul(x)?)?;
    }
    acc.sqrt()
}

/// `D0` of `phi f phi^-1` in closed form, when `f` is linear in the chart:
/// a linear map at the plane origin, or `Ax/|Ax|` at a sphere pole that `A`
/// fixes with eigenvalue `A[0][0] > 0` (both sphere charts have differential
/// `(x1, x2, x3) -> (x2, x3)` at the pole).
pub fn closed_form_derivative(f: &MapExpr, site: &BlowupSite) -> Option<MapExpr> {
    match (f, &site.chart) {
        (MapExpr::Linear { .. }, None) => Some(f.clone()),
        (MapExpr::Projective { matrix }, Some(Chart::SphereExp { .. } | Chart::SphereOrtho { .. })) => {
            let lambda = matrix[0][0].as_const()?;
            if lambda <= 0.0 || !matrix[1][0].is_zero() || !matrix[2][0].is_zero() {
                return None;
            }
            let block: Vec<Vec<Expr>> =
                (1..3).map(|i| (1..3).map(|j| matrix[i][j].clone() / Expr::from(lambda)).collect()).collect();
            Some(MapExpr::Linear { matrix: block })
        }
        _ => None,
    }
}

/// `f~`: `beta^-1 (phi f phi^-1) beta` for `r > 0`, the normalized derivative at `r = 0`.
pub fn induced_map(f: &MapExpr, site: &BlowupSite, bits: usize) -> Result<MapExpr> {
    let tol = TolerancePolicy::for_bits(bits).identity_abs;
    let moved = site.displacement(f, bits)?;
    if moved > tol {
        return Err(Error::Precondition(format!(
            "{} moves the blow-up point ({:?}) by {moved:e}",
            f.node_name(),
            site.point
        )));
    }
    let derivative = closed_form_derivative(f, site).map(Box::new);
    Ok(MapExpr::Blowup { inner: Box::new(site.localize(f)), derivative })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctorialityReport {
    pub samples: usize,
    pub max_interior_defect: f64,
    pub max_boundary_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Random blown-up points: directions uniform, half of them on the exceptional circle.
pub fn sample_blown_up(n: usize, dim: usize, seed: u64, bits: usize) -> Vec<Vec<Real>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
            v.iter_mut().for_each(|x| *x /= l);
            let mut p: Vec<Real> = v.iter().map(|x| Real::from_f64(*x, bits)).collect();
            let n = norm(&p, bits).expect("finite");
            p = p.iter().map(|x| x.div(&n).expect("nonzero norm")).collect();
            let r = if i % 2 == 0 { 0.0 } else { rng.gen_range(1e-6..0.5) };
            p.push(Real::from_f64(r, bits));
            p
        })
        .collect()
}

/// Compares `(f g)~` with `f~ g~` on sampled blown-up points.
pub fn functoriality_check(
    f: &MapExpr,
    g: &MapExpr,
    site: &BlowupSite,
    samples: usize,
    bits: usize,
) -> Result<FunctorialityReport> {
    let fg = induced_map(&compose(f, g)?, site, bits)?;
    let both = compose(&induced_map(f, site, bits)?, &induced_map(g, site, bits)?)?;
    let tol = TolerancePolicy::for_bits(bits).identity_abs.max(1e-20);
    let (mut interior, mut boundary) = (0.0f64, 0.0f64);
    for p in sample_blown_up(samples, site.dim(), 11, bits) {
        let a = evaluate(&fg, &p, bits)?;
        let b = evaluate(&both, &p, bits)?;
        let mut d = 0.0f64;
        for (x, y) in a.iter().zip(&b) {
            d = d.max(x.sub(y)?.abs().to_f64());
        }
        if p.last().is_some_and(Real::is_zero) {
            boundary = boundary.max(d);
        } else {
            interior = interior.max(d);
        }
    }
    Ok(FunctorialityReport {
        samples,
        max_interior_defect: interior,
        max_boundary_defect: boundary,
        tol,
        pass: interior < tol && boundary < tol,
    })
}

/// Angles of the fixed points of `f~` on the exceptional circle of a
/// 2-dimensional blow-up, by sign changes of the angular displacement on a
/// grid followed by bisection.
pub fn boundary_fixed_points(ftilde: &MapExpr, grid: usize, bits: usize) -> Result<Vec<f64>> {
    use std::f64::consts::PI;
    let disp = |t: f64| -> Result<f64> {
        let p = [Real::from_f64(t.cos(), bits), Real::from_f64(t.sin(), bits), Real::zero(bits)];
        let q = evaluate(ftilde, &p, bits)?;
        let a = q[1].to_f64().atan2(q[0].to_f64());
        Ok((a - t + PI).rem_euclid(2.0 * PI) - PI)
    };
    let mut roots = Vec::new();
    let step = 2.0 * PI / grid as f64;
    let mut prev = disp(-PI)?;
    for k in 1..=grid {
        let t = -PI + step * k as f64;
        let cur = disp(t)?;
        if cur == 0.0 {
            roots.push(t);
        } else if prev != 0.0 && prev.signum() != cur.signum() && (cur - prev).abs() < PI {
            let (mut lo, mut hi, mut dlo) = (t - step, t, prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let dm = disp(mid)?;
                if dm.signum() == dlo.signum() {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    // -pi and pi are the same direction
    if roots.len() > 1 && (roots[roots.len() - 1] - roots[0] - 2.0 * PI).abs() < 1e-9 {
        roots.pop();
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 192;

    fn pt(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| Real::from_f64(*x, B)).collect()
    }

    fn heis(a: i64, b: i64, c: i64) -> MapExpr {
        MapExpr::projective_i64(&[vec![1, a, c], vec![0, 1, b], vec![0, 0, 1]])
    }

    #[test]
    fn blow_down_and_up() {
        let q = blow_down(&pt(&[0.0, 1.0]), &Real::from_f64(2.0, B), B).unwrap();
        assert_eq!(q, pt(&[0.0, 2.0]));
        let (th, r) = blow_up_pt(&pt(&[3.0, 4.0]), B).unwrap();
        assert!((th[0].to_f64() - 0.6).abs() < 1e-15 && (th[1].to_f64() - 0.8).abs() < 1e-15);
        assert_eq!(r.to_f64(), 5.0);
        assert!(blow_up_pt(&pt(&[0.0, 0.0]), B).is_err());
        assert!(blow_down(&pt(&[1.0, 1.0]), &Real::one(B), B).is_err());
    }

    #[test]
    fn diagonal_map_on_the_exceptional_circle() {
        let site = BlowupSite::plane_origin();
        let f = induced_map(&MapExpr::linear_i64(&[vec![2, 0], vec![0, 1]]), &site, B).unwrap();
        let out = evaluate(&f, &pt(&[1.0, 0.0, 0.0]), B).unwrap();
        assert_eq!(out, pt(&[1.0, 0.0, 0.0]));
        let roots = boundary_fixed_points(&f, 64, B).unwrap();
        assert_eq!(roots.len(), 4, "{roots:?}");
    }

    #[test]
    fn moving_the_point_is_rejected() {
        let site = BlowupSite::plane_origin();
        let t = MapExpr::translation(&[0.1, 0.0]);
        assert!(matches!(induced_map(&t, &site, B), Err(Error::Precondition(_))));
    }

    #[test]
    fn y_has_two_fixed_directions_at_each_pole() {
        for sign in [1, -1] {
            let site = BlowupSite::sphere_pole(sign);
            let y = induced_map(&heis(0, 1, 0), &site, B).unwrap();
            let roots = boundary_fixed_points(&y, 90, B).unwrap();
            assert_eq!(roots.len(), 2, "{roots:?}");
            for r in roots {
                assert!(r.sin().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_generators_are_functorial() {
        let site = BlowupSite::sphere_pole(1);
        let rep = functoriality_check(&heis(1, 0, 0), &heis(0, 1, 0), &site, 40, B).unwrap();
        assert!(rep.pass, "{rep:?}");
        let id = MapExpr::identity(3);
        let rep = functoriality_check(&id, &id, &site, 10, B).unwrap();
        assert!(rep.max_interior_defect + rep.max_boundary_defect < 1e-50);
    }

    #[test]
    fn continuity_at_the_exceptional_circle() {
        // X mixes the axial coordinate into the tangent plane, so the image
        // direction only reaches the boundary rule in the limit
        let site = BlowupSite::sphere_pole(-1);
        let f = induced_map(&heis(1, 0, 0), &site, B).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let edge = evaluate(&f, &pt(&[s, s, 0.0]), B).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=6 {
            let q = evaluate(&f, &pt(&[s, s, 10f64.powi(-k)]), B).unwrap();
            let d = q.iter().zip(&edge).map(|(a, b)| (a.to_f64() - b.to_f64()).abs()).fold(0.0, f64::max);
            assert!(d < last, "r = 1e-{k}: {d:e}");
            last = d;
        }
        assert!(last < 1e-5);
    }
}
