//! The concrete surfaces and their boundary components.
//!
//! Disk and annulus points are stored in collar coordinates `(theta, s)`:
//! `s` is the geodesic distance from `(-1, 0, 0)` on the sphere divided by `pi`,
//! so `s = 0` is the blown-up circle over `(-1, 0, 0)` and `s = 1` is either the
//! disk's center or the annulus's blown-up circle over `(1, 0, 0)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::numeric::{BigScalar, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelKind {
    Disk,
    Annulus,
    Sphere,
    Torus { alpha: f64 },
    Plane,
    Cylinder { alpha: f64 },
}

/// The set where coordinate `axis` equals `value`, parameterized by coordinate `param_axis`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub name: String,
    pub axis: usize,
    pub value: f64,
    pub param_axis: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldModel {
    pub kind: ModelKind,
    pub atlas: Vec<Chart>,
    pub boundary: Vec<BoundaryComponent>,
}

fn component(name: &str, value: f64) -> BoundaryComponent {
    BoundaryComponent { name: name.into(), axis: 1, value, param_axis: 0 }
}

impl ManifoldModel {
    pub fn disk() -> Self {
        ManifoldModel {
            kind: ModelKind::Disk,
            atlas: vec![Chart::DiskPicture, Chart::collar_at_zero()],
            boundary: vec![component("minus", 0.0)],
        }
    }

    pub fn annulus() -> Self {
        ManifoldModel {
            kind: ModelKind::Annulus,
            atlas: vec![Chart::AnnulusPicture, Chart::collar_at_zero(), Chart::collar_at_one()],
            boundary: vec![component("minus", 0.0), component("plus", 1.0)],
        }
    }

    pub fn sphere() -> Self {
        ManifoldModel {
            kind: ModelKind::Sphere,
            atlas: vec![
                Chart::SphereOrtho { sign: 1 },
                Chart::SphereOrtho { sign: -1 },
                Chart::SphereBand,
                Chart::SphereExp { sign: 1 },
                Chart::SphereExp { sign: -1 },
            ],
            boundary: vec![],
        }
    }

    pub fn torus(alpha: f64) -> Self {
        ManifoldModel {
            kind: ModelKind::Torus { alpha },
            atlas: vec![Chart::TorusFundamental { alpha }],
            boundary: vec![],
        }
    }

    /// The plane in its global coordinates.
    pub fn plane() -> Self {
        ManifoldModel { kind: ModelKind::Plane, atlas: vec![], boundary: vec![] }
    }

    pub fn cylinder(alpha: f64) -> Self {
        ManifoldModel {
            kind: ModelKind::Cylinder { alpha },
            atlas: vec![Chart::CylinderFundamental { alpha }],
            boundary: vec![],
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Disk => "disk",
            ModelKind::Annulus => "annulus",
            ModelKind::Sphere => "sphere",
            ModelKind::Torus { .. } => "torus",
            ModelKind::Plane => "plane",
            ModelKind::Cylinder { .. } => "cylinder",
        }
    }

    /// Number of coordinates of a stored point.
    pub fn coord_dim(&self) -> usize {
        match self.kind {
            ModelKind::Sphere => 3,
            _ => 2,
        }
    }

    pub fn euler_characteristic(&self) -> i32 {
        match self.kind {
            ModelKind::Disk | ModelKind::Plane => 1,
            ModelKind::Sphere => 2,
            _ => 0,
        }
    }

    pub fn component(&self, name: &str) -> Result<&BoundaryComponent> {
        self.boundary
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Parameter(format!("{} has no boundary component {name:?}", self.name())))
    }

    /// Collar chart `(theta, s) -> (theta, y)` about a boundary component.
    pub fn collar_chart(&self, name: &str) -> Result<Chart> {
        let c = self.component(name)?;
        Ok(if c.value == 0.0 { Chart::collar_at_zero() } else { Chart::collar_at_one() })
    }

    pub fn boundary_point(&self, name: &str, t: &Real, bits: usize) -> Result<Vec<Real>> {
        let c = self.component(name)?;
        let mut p = vec![Real::zero(bits); self.coord_dim()];
        p[c.axis] = Real::from_f64(c.value, bits);
        p[c.param_axis] = t.clone();
        Ok(p)
    }

    pub fn on_component(&self, name: &str, p: &[Real], bits: usize) -> Result<bool> {
        let c = self.component(name)?;
        Ok(p[c.axis] == Real::from_f64(c.value, bits))
    }

    /// Coordinates used to measure distances between stored points.
    fn embed(&self, p: &[Real], bits: usize) -> Result<Vec<BigScalar>> {
        let b: Vec<BigScalar> = p.iter().map(|x| x.to_big().map(|v| v.with_bits(bits))).collect::<Result<_>>()?;
        Ok(match self.kind {
            ModelKind::Disk | ModelKind::Annulus => {
                let one = BigScalar::one(bits);
                let r = if self.kind == ModelKind::Disk {
                    &one - &b[1]
                } else {
                    &one - &(&b[1] * &BigScalar::from_f64(0.5, bits))
                };
                vec![&r * &b[0].cos(), &r * &b[0].sin()]
            }
            _ => b,
        })
    }

    /// Distance between two stored points (Euclidean in the embedding,
    /// shortest representative on quotients).
    pub fn distance(&self, a: &[Real], b: &[Real], bits: usize) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!("comparing a {}-point with a {}-point", a.len(), b.len())));
        }
        let (ea, eb) = (self.embed(a, bits)?, self.embed(b, bits)?);
        let periods: Vec<Option<f64>> = match self.kind {
            ModelKind::Torus { alpha } => vec![Some(alpha), Some(alpha)],
            ModelKind::Cylinder { alpha } => vec![Some(alpha), None],
            _ => vec![None; ea.len()],
        };
        let mut acc = BigScalar::zero(bits);
        for ((x, y), per) in ea.iter().zip(&eb).zip(periods) {
            let mut d = (x - y).abs();
            if let Some(per) = per {
                let pb = BigScalar::from_f64(per, bits);
                let k = (&d / &pb).to_f64().round();
                d = (&d - &(&pb * &BigScalar::from_f64(k, bits))).abs();
            }
            acc = &acc + &(&d * &d);
        }
        Ok(acc.sqrt()?.to_f64())
    }

    /// A random interior point in stored coordinates.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        use std::f64::consts::PI;
        match self.kind {
            ModelKind::Disk | ModelKind::Annulus => vec![rng.gen_range(-PI..PI), rng.gen_range(0.01..0.99)],
            ModelKind::Sphere => {
                let x1: f64 = rng.gen_range(-0.99..0.99);
                let t: f64 = rng.gen_range(-PI..PI);
                let w = (1.0 - x1 * x1).sqrt();
                vec![x1, w * t.cos(), w * t.sin()]
            }
            ModelKind::Torus { alpha } => vec![rng.gen_range(0.0..alpha), rng.gen_range(0.0..alpha)],
            ModelKind::Plane => vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
            ModelKind::Cylinder { alpha } => vec![rng.gen_range(0.0..alpha), rng.gen_range(-3.0..3.0)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 128;

    #[test]
    fn boundary_points_lie_in_collar_domains() {
        for m in [ManifoldModel::disk(), ManifoldModel::annulus()] {
            for c in &m.boundary {
                let chart = m.collar_chart(&c.name).unwrap();
                for k in 0..16 {
                    let t = Real::from_f64(-3.0 + 0.37 * k as f64, B);
                    let p = m.boundary_point(&c.name, &t, B).unwrap();
                    let y = chart.to_euclid(&p, B).unwrap();
                    assert!(y[1].is_zero(), "{} {}", m.name(), c.name);
                    assert!(m.on_component(&c.name, &p, B).unwrap());
                }
            }
        }
        assert!(ManifoldModel::disk().component("plus").is_err());
    }

    #[test]
    fn distances() {
        let d = ManifoldModel::disk();
        let center_a = [Real::from_f64(0.0, B), Real::from_f64(1.0, B)];
        let center_b = [Real::from_f64(2.0, B), Real::from_f64(1.0, B)];
        assert_eq!(d.distance(&center_a, &center_b, B).unwrap(), 0.0);
        let t = ManifoldModel::torus(0.5);
        let a = [Real::from_f64(0.01, B), Real::from_f64(0.2, B)];
        let b = [Real::from_f64(0.49, B), Real::from_f64(0.2, B)];
        assert!((t.distance(&a, &b, B).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(ManifoldModel::sphere().euler_characteristic(), 2);
    }
}
