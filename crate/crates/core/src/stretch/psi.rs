//! Collar stretches `Psi = eta^-1 (id x chi) eta` and conjugation by them.

use serde::{Deserialize, Serialize};

use super::profile::{ChiProfile, StretchProfile};
use crate::error::{Error, Result};
use crate::geometry::expr::{c, Expr};
use crate::geometry::{compose, evaluate, invert, Branch, Chart, ManifoldModel, MapExpr, Region};
use crate::numeric::Real;

/// Which side of a seam a collar sits on: `plus` collars map to `C x [0, 1)`,
/// `minus` collars to `C x (-1, 0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> i8 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }
}

/// A collar neighborhood `U` of one boundary component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollarSpec {
    pub piece: String,
    pub component: String,
    pub chart: Chart,
    pub side: Side,
    /// `U` is where the collar depth is below this; at most 1.
    #[serde(default = "unit_depth")]
    pub depth: f64,
}

fn unit_depth() -> f64 {
    1.0
}

impl CollarSpec {
    pub fn new(model: &ManifoldModel, component: &str, side: Side) -> Result<Self> {
        Ok(CollarSpec {
            piece: model.name().into(),
            component: component.into(),
            chart: model.collar_chart(component)?,
            side,
            depth: 1.0,
        })
    }

    fn collar(&self) -> Result<(usize, f64, f64)> {
        match self.chart {
            Chart::Collar { axis, origin, scale } => Ok((axis, origin, scale)),
            _ => Err(Error::Parameter(format!("{} is not a collar chart", self.chart.name()))),
        }
    }

    /// Transverse axis of the collar chart.
    pub fn axis(&self) -> Result<usize> {
        Ok(self.collar()?.0)
    }

    /// `U` in piece coordinates.
    pub fn region(&self) -> Result<Region> {
        let (axis, origin, scale) = self.collar()?;
        let s = if (scale.abs() - std::f64::consts::PI).abs() < 1e-15 { Expr::Pi } else { c(scale.abs()) };
        let offset = c(self.depth) / s;
        Ok(if scale > 0.0 {
            Region::Below { axis, bound: c(origin) + offset }
        } else {
            Region::Above { axis, bound: c(origin) - offset }
        })
    }

    /// Checks `eta(x) = (x, 0)` on sampled boundary points.
    pub fn check_boundary(&self, model: &ManifoldModel, samples: usize, bits: usize) -> Result<()> {
        let comp = model.component(&self.component)?;
        let axis = self.axis()?;
        for k in 0..samples {
            let t = Real::from_f64(-3.0 + 6.0 * k as f64 / samples.max(1) as f64, bits);
            let p = model.boundary_point(&self.component, &t, bits)?;
            let q = self.chart.to_euclid(&p, bits)?;
            if !q[axis].is_zero() || q[comp.param_axis] != p[comp.param_axis] {
                return Err(Error::Construction(format!(
                    "collar chart {} does not send boundary point {t} to (x, 0)",
                    self.chart.name()
                )));
            }
        }
        Ok(())
    }
}

/// `Psi = eta^-1 (id x chi) eta` on `U`, the identity elsewhere.
pub fn build_psi(collar: &CollarSpec, profile: &ChiProfile) -> Result<MapExpr> {
    profile.validate()?;
    if !(collar.depth > 0.0 && collar.depth <= 1.0) {
        return Err(Error::Parameter(format!("collar depth must lie in (0, 1], got {}", collar.depth)));
    }
    if profile.y1 >= collar.depth {
        return Err(Error::Construction(format!(
            "chi is not the identity near the edge of the collar: y1 = {} >= depth {}",
            profile.y1, collar.depth
        )));
    }
    let axis = collar.axis()?;
    let dim = collar.chart.ambient_dim();
    let stretch = MapExpr::Stretch { profile: StretchProfile::Chi(profile.clone()), axis, dim, inverse: false };
    Ok(MapExpr::Piecewise {
        dim,
        branches: vec![
            Branch {
                region: collar.region()?,
                map: MapExpr::LocalConjugate { chart: collar.chart.clone(), inner: Box::new(stretch) },
            },
            Branch { region: Region::All, map: MapExpr::identity(dim) },
        ],
        preserves_regions: true,
    })
}

/// Builds one `Psi` per collar and composes them; the collars must be disjoint.
pub fn build_psi_all(collars: &[CollarSpec], profile: &ChiProfile) -> Result<MapExpr> {
    let mut it = collars.iter();
    let first = it.next().ok_or_else(|| Error::Parameter("no collars given".into()))?;
    let mut psi = build_psi(first, profile)?;
    for c in it {
        psi = compose(&build_psi(c, profile)?, &psi)?;
    }
    Ok(psi)
}

/// `psi^-1 . f . psi`.
pub fn conjugate(f: &MapExpr, psi: &MapExpr) -> Result<MapExpr> {
    compose(&invert(psi)?, &compose(f, psi)?)
}

/// The model stretches `X1(x, y) = (x, chi(y))` and `X2 = (id x -id) X1 (id x -id)^-1`
/// on the seam chart, and the collar conjugacies `Psi_1`, `Psi_2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchMaps {
    pub x1: MapExpr,
    pub x2: MapExpr,
    pub psi1: MapExpr,
    pub psi2: MapExpr,
}

/// `(x, y) -> (x, -y)` on a 2-dimensional seam chart.
pub fn seam_flip() -> MapExpr {
    MapExpr::linear_i64(&[vec![1, 0], vec![0, -1]])
}

pub fn stretch_maps(c1: &CollarSpec, c2: &CollarSpec, profile: &ChiProfile) -> Result<StretchMaps> {
    let x1 = MapExpr::Stretch { profile: StretchProfile::Chi(profile.clone()), axis: 1, dim: 2, inverse: false };
    let flip = seam_flip();
    let x2 = compose(&flip, &compose(&x1, &invert(&flip)?)?)?;
    Ok(StretchMaps { x1, x2, psi1: build_psi(c1, profile)?, psi2: build_psi(c2, profile)? })
}

/// `S^-1 . g . S` for a transverse stretch `S` on the last coordinate of a
/// collar chart; `g` is written in collar coordinates.
pub fn stretch_conjugate(g: &MapExpr, profile: StretchProfile, dim: usize) -> Result<MapExpr> {
    let s = MapExpr::Stretch { profile, axis: dim - 1, dim, inverse: false };
    conjugate(g, &s)
}

/// Evaluates `psi^-1 f psi` at `p`.
pub fn eval_conjugate(f: &MapExpr, psi: &MapExpr, p: &[Real], bits: usize) -> Result<Vec<Real>> {
    evaluate(&conjugate(f, psi)?, p, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::var;
    use crate::numeric::{stable_conjugate_linear, BigScalar};

    const B: usize = 256;

    fn pt(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| Real::from_f64(*x, B)).collect()
    }

    fn disk_psi() -> MapExpr {
        let collar = CollarSpec::new(&ManifoldModel::disk(), "minus", Side::Plus).unwrap();
        build_psi(&collar, &ChiProfile::default()).unwrap()
    }

    #[test]
    fn boundary_and_outside_are_fixed() {
        let psi = disk_psi();
        for p in [pt(&[0.3, 0.0]), pt(&[1.0, 0.5]), pt(&[-2.0, 0.9])] {
            assert_eq!(evaluate(&psi, &p, B).unwrap(), p);
        }
        // y = pi s = 0.9 sits on the identity branch of chi
        let p = pt(&[0.4, 0.9 / std::f64::consts::PI]);
        let q = evaluate(&psi, &p, B).unwrap();
        assert!(q[1].sub(&p[1]).unwrap().abs().to_f64() < 1e-70);
    }

    #[test]
    fn collar_points_are_stretched_flat() {
        let psi = disk_psi();
        let s = Real::from_big(&BigScalar::parse("0.1", B).unwrap() / &BigScalar::pi(B));
        let q = evaluate(&psi, &[Real::zero(B), s.clone()], B).unwrap();
        // s = chi(0.1) / pi = exp(-e^10) / pi
        let want = -22026.4657948067165169579006453 - std::f64::consts::PI.ln();
        assert!((q[1].ln_abs_f64() - want).abs() < 1e-9);
        let back = evaluate(&invert(&psi).unwrap(), &q, B).unwrap();
        assert!(back[1].sub(&s).unwrap().abs().to_f64() < 1e-70);
    }

    #[test]
    fn far_end_collar_round_trips() {
        let collar = CollarSpec::new(&ManifoldModel::annulus(), "plus", Side::Minus).unwrap();
        let psi = build_psi(&collar, &ChiProfile::default()).unwrap();
        let p = pt(&[1.0, 1.0 - 0.05 / std::f64::consts::PI]);
        let q = evaluate(&psi, &p, B).unwrap();
        assert!(q[1].is_near_unit(), "{}", q[1]);
        let back = evaluate(&invert(&psi).unwrap(), &q, B).unwrap();
        assert!(back[1].sub(&p[1]).unwrap().abs().to_f64() < 1e-60);
    }

    #[test]
    fn conjugating_a_linear_collar_map() {
        // (theta, s) -> (theta, 2 s) near the boundary is (x, 2y) in the collar
        let f = MapExpr::linear_i64(&[vec![1, 0], vec![0, 2]]);
        let psi = disk_psi();
        let y = BigScalar::parse("0.1", B).unwrap();
        let s = Real::from_big(&y / &BigScalar::pi(B));
        let out = eval_conjugate(&f, &psi, &[Real::zero(B), s], B).unwrap();
        let got = out[1].to_big().unwrap() * BigScalar::pi(B);
        let dev = (&got - &y).to_f64();
        assert!((dev - 3.1469427498783984017317669548e-7).abs() < 1e-20, "{dev:e}");
        let want = stable_conjugate_linear(&BigScalar::from_f64(2.0, B), &y).unwrap();
        assert!((&got - &want).abs().to_f64() < 1e-60);
        let id = eval_conjugate(&MapExpr::identity(2), &psi, &pt(&[0.2, 0.03]), B).unwrap();
        assert!(id[1].sub(&Real::from_f64(0.03, B)).unwrap().abs().to_f64() < 1e-60);
    }

    #[test]
    fn one_phi_conjugation_matches_the_closed_form() {
        // g(x, y) = (x, y h), h = 2 + x + y
        let h = c(2.0) + var(0) + var(1);
        let g = MapExpr::CollarGerm { tangential: vec![var(0)], factor: h };
        let conj = stretch_conjugate(&g, StretchProfile::Phi, 2).unwrap();
        for (x, y) in [(0.1, 0.05), (-0.4, 0.1), (0.7, 0.2)] {
            let out = evaluate(&conj, &pt(&[x, y]), B).unwrap();
            let yb = BigScalar::from_f64(y, B);
            let phi_y = (-&yb.recip()).exp();
            let hv = &(&BigScalar::from_f64(2.0, B) + &BigScalar::from_f64(x, B)) + &phi_y;
            let want = &yb / &(&BigScalar::one(B) - &(&yb * &hv.ln().unwrap()));
            assert!((&out[1].to_big().unwrap() - &want).abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn stretch_maps_and_errors() {
        let d = ManifoldModel::disk();
        let a = ManifoldModel::annulus();
        let c1 = CollarSpec::new(&d, "minus", Side::Plus).unwrap();
        let c2 = CollarSpec::new(&a, "minus", Side::Minus).unwrap();
        c1.check_boundary(&d, 16, B).unwrap();
        c2.check_boundary(&a, 16, B).unwrap();
        let m = stretch_maps(&c1, &c2, &ChiProfile::default()).unwrap();
        let q = evaluate(&m.x2, &pt(&[0.5, -0.9]), B).unwrap();
        assert!((q[1].to_f64() + 0.9).abs() < 1e-30);
        let shallow = CollarSpec { depth: 0.5, ..c1 };
        assert!(matches!(build_psi(&shallow, &ChiProfile::default()), Err(Error::Construction(_))));
    }
}
