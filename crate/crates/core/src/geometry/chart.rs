//! Closed-form charts for the concrete surfaces.
//!
//! `to_euclid` sends a point in the chart's ambient coordinates to local
//! coordinates; `from_euclid` goes back.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{BigScalar, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chart {
    /// `(x1, x2, x3) -> (x2, x3)` on the hemisphere `sign * x1 > 0`.
    SphereOrtho { sign: i8 },
    /// `(x1, x2, x3) -> (atan2(x3, x2), x1)` away from the poles `(+-1, 0, 0)`.
    SphereBand,
    /// Geodesic normal coordinates about `(sign, 0, 0)`.
    SphereExp { sign: i8 },
    /// Blown-up polar coordinates `(d1, d2, r)` to `(theta, s)` with
    /// `r = scale * s`, or `r = scale * (1 - s)` when `reversed`.
    AngleToDirection { scale: f64, reversed: bool },
    /// Replaces coordinate `axis` by the collar depth `y = scale * (x - origin)`.
    Collar { axis: usize, origin: f64, scale: f64 },
    /// Unit disk in the plane to `(theta, s)` with `s = 1 - |q|`.
    DiskPicture,
    /// Annulus `1/2 <= |q| <= 1` in the plane to `(theta, s)` with `|q| = 1 - s/2`.
    AnnulusPicture,
    /// Plane to the fundamental square `[0, alpha)^2`.
    TorusFundamental { alpha: f64 },
    /// Plane to the strip `[0, alpha) x R`.
    CylinderFundamental { alpha: f64 },
    /// Sphere minus the poles `(+-1, 0, 0)` to the cylinder `[0, alpha) x R`,
    /// with height `tan(latitude)`.
    CalegariSphere { alpha: f64 },
}

fn big(x: f64, bits: usize) -> Real {
    Real::from_f64(x, bits)
}

fn pi(bits: usize) -> Real {
    Real::from_big(BigScalar::pi(bits))
}

fn need(p: &[Real], n: usize, chart: &Chart) -> Result<()> {
    if p.len() != n {
        return Err(Error::Dimension(format!("{} expects {n} coordinates, got {}", chart.name(), p.len())));
    }
    Ok(())
}

/// Reduces `x` into `[0, period)`.
pub fn wrap(x: &Real, period: &Real) -> Result<Real> {
    let xb = x.to_big()?;
    let pb = period.to_big()?;
    let q = (&xb / &pb).to_f64().floor();
    if q == 0.0 {
        return Ok(x.clone());
    }
    let r = &xb - &(&pb * &BigScalar::from_f64(q, xb.bits()));
    // guard against rounding at the period boundary
    if r.is_negative() {
        return Ok(Real::from_big(&r + &pb));
    }
    if r >= pb {
        return Ok(Real::from_big(&r - &pb));
    }
    Ok(Real::from_big(r))
}

impl Chart {
    pub fn name(&self) -> String {
        match self {
            Chart::SphereOrtho { sign } => format!("sphere-ortho({sign:+})"),
            Chart::SphereBand => "sphere-band".into(),
            Chart::SphereExp { sign } => format!("sphere-exp({sign:+})"),
            Chart::AngleToDirection { scale, reversed } => {
                format!("angle-direction(scale={scale}{})", if *reversed { ",reversed" } else { "" })
            }
            Chart::Collar { axis, origin, scale } => format!("collar(axis={axis},origin={origin},scale={scale})"),
            Chart::DiskPicture => "disk-picture".into(),
            Chart::AnnulusPicture => "annulus-picture".into(),
            Chart::TorusFundamental { alpha } => format!("torus-fundamental(alpha={alpha})"),
            Chart::CylinderFundamental { alpha } => format!("cylinder-fundamental(alpha={alpha})"),
            Chart::CalegariSphere { alpha } => format!("calegari-sphere(alpha={alpha})"),
        }
    }

    /// Collar chart about `s = 0` of a `(theta, s)` piece, depth `pi * s`.
    pub fn collar_at_zero() -> Self {
        Chart::Collar { axis: 1, origin: 0.0, scale: std::f64::consts::PI }
    }

    /// Collar chart about `s = 1` of a `(theta, s)` piece, depth `pi * (1 - s)`.
    pub fn collar_at_one() -> Self {
        Chart::Collar { axis: 1, origin: 1.0, scale: -std::f64::consts::PI }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Chart::SphereOrtho { .. } | Chart::SphereBand | Chart::SphereExp { .. } | Chart::CalegariSphere { .. } => 3,
            Chart::AngleToDirection { .. } => 3,
            Chart::Collar { .. } => 2,
            _ => 2,
        }
    }

    pub fn local_dim(&self) -> usize {
        2
    }

    fn scale_real(scale: f64, bits: usize) -> Real {
        // the collar scales are +-pi; keep them exact at working precision
        if (scale.abs() - std::f64::consts::PI).abs() < 1e-15 {
            let p = pi(bits);
            if scale < 0.0 { p.neg() } else { p }
        } else {
            big(scale, bits)
        }
    }

    /// Ambient point to local coordinates.
    pub fn to_euclid(&self, p: &[Real], bits: usize) -> Result<Vec<Real>> {
        need(p, self.ambient_dim(), self)?;
        let err = |m: &str| Err(Error::Domain(format!("{}: {m}", self.name())));
        match self {
            Chart::SphereOrtho { sign } => {
                if p[0].signum() != *sign {
                    return err("point is not on the chart's hemisphere");
                }
                Ok(vec![p[1].clone(), p[2].clone()])
            }
            Chart::SphereBand => {
                if p[1].is_zero() && p[2].is_zero() {
                    return err("the poles are outside the band chart");
                }
                Ok(vec![Real::atan2(&p[2], &p[1])?, p[0].clone()])
            }
            Chart::SphereExp { sign } => {
                let perp = p[1].mul(&p[1])?.add(&p[2].mul(&p[2])?)?.sqrt()?;
                let axial = if *sign < 0 { p[0].neg() } else { p[0].clone() };
                if perp.is_zero() {
                    if axial.signum() > 0 {
                        return Ok(vec![Real::zero(bits), Real::zero(bits)]);
                    }
                    return err("antipode of the chart center");
                }
                let rho = Real::atan2(&perp, &axial)?;
                let k = rho.div(&perp)?;
                Ok(vec![p[1].mul(&k)?, p[2].mul(&k)?])
            }
            Chart::AngleToDirection { scale, reversed } => {
                if p[2].signum() < 0 {
                    return err("negative radius");
                }
                let theta = Real::atan2(&p[1], &p[0])?;
                let s = p[2].div(&Self::scale_real(*scale, bits))?;
                let s = if *reversed { Real::one(bits).sub(&s)? } else { s };
                Ok(vec![theta, s])
            }
            Chart::Collar { axis, origin, scale } => {
                let y = p[*axis].sub(&big(*origin, bits))?.mul(&Self::scale_real(*scale, bits))?;
                if y.signum() < 0 || y >= Real::one(bits) {
                    return err("point is outside the collar");
                }
                let mut out = p.to_vec();
                out[*axis] = y;
                Ok(out)
            }
            Chart::DiskPicture | Chart::AnnulusPicture => {
                let r = p[0].mul(&p[0])?.add(&p[1].mul(&p[1])?)?.sqrt()?;
                let theta = if r.is_zero() { Real::zero(bits) } else { Real::atan2(&p[1], &p[0])? };
                let s = Real::one(bits).sub(&r)?;
                let s = if matches!(self, Chart::AnnulusPicture) { s.mul(&big(2.0, bits))? } else { s };
                if s.signum() < 0 || s > Real::one(bits) {
                    return err("point is outside the model");
                }
                Ok(vec![theta, s])
            }
            Chart::TorusFundamental { alpha } => {
                let a = big(*alpha, bits);
                Ok(vec![wrap(&p[0], &a)?, wrap(&p[1], &a)?])
            }
            Chart::CylinderFundamental { alpha } => Ok(vec![wrap(&p[0], &big(*alpha, bits))?, p[1].clone()]),
            Chart::CalegariSphere { alpha } => {
                let perp = p[1].mul(&p[1])?.add(&p[2].mul(&p[2])?)?.sqrt()?;
                if perp.is_zero() {
                    return err("the poles have no cylinder coordinates");
                }
                let a = big(*alpha, bits);
                let ang = Real::atan2(&p[2], &p[1])?;
                let two_pi = pi(bits).mul(&big(2.0, bits))?;
                let x = wrap(&ang.mul(&a)?.div(&two_pi)?, &a)?;
                Ok(vec![x, p[0].div(&perp)?])
            }
        }
    }

    /// Local coordinates to an ambient point.
    pub fn from_euclid(&self, q: &[Real], bits: usize) -> Result<Vec<Real>> {
        need(q, self.local_dim(), self)?;
        let err = |m: &str| Err(Error::Domain(format!("{}: {m}", self.name())));
        let one = Real::one(bits);
        match self {
            Chart::SphereOrtho { sign } => {
                let rr = q[0].mul(&q[0])?.add(&q[1].mul(&q[1])?)?;
                if rr >= one {
                    return err("outside the unit disk");
                }
                let x1 = one.sub(&rr)?.sqrt()?;
                Ok(vec![if *sign < 0 { x1.neg() } else { x1 }, q[0].clone(), q[1].clone()])
            }
            Chart::SphereBand => {
                if q[1].abs() >= one {
                    return err("height must lie in (-1, 1)");
                }
                let w = one.sub(&q[1].mul(&q[1])?)?.sqrt()?;
                Ok(vec![q[1].clone(), w.mul(&q[0].cos()?)?, w.mul(&q[0].sin()?)?])
            }
            Chart::SphereExp { sign } => {
                let rho = q[0].mul(&q[0])?.add(&q[1].mul(&q[1])?)?.sqrt()?;
                if rho >= pi(bits) {
                    return err("radius must be below pi");
                }
                let s = *sign as f64;
                if rho.is_zero() {
                    return Ok(vec![big(s, bits), Real::zero(bits), Real::zero(bits)]);
                }
                let k = rho.sin()?.div(&rho)?;
                let c = rho.cos()?;
                Ok(vec![if s < 0.0 { c.neg() } else { c }, q[0].mul(&k)?, q[1].mul(&k)?])
            }
            Chart::AngleToDirection { scale, reversed } => {
                let s = if *reversed { one.sub(&q[1])? } else { q[1].clone() };
                if s.signum() < 0 {
                    return err("negative radius");
                }
                Ok(vec![q[0].cos()?, q[0].sin()?, s.mul(&Self::scale_real(*scale, bits))?])
            }
            Chart::Collar { axis, origin, scale } => {
                if q[*axis].signum() < 0 || q[*axis] >= one {
                    return err("collar depth must lie in [0, 1)");
                }
                let x = big(*origin, bits).add(&q[*axis].div(&Self::scale_real(*scale, bits))?)?;
                let mut out = q.to_vec();
                out[*axis] = x;
                Ok(out)
            }
            Chart::DiskPicture | Chart::AnnulusPicture => {
                if q[1].signum() < 0 || q[1] > one {
                    return err("s must lie in [0, 1]");
                }
                let half = big(0.5, bits);
                let r = if matches!(self, Chart::AnnulusPicture) {
                    one.sub(&q[1].mul(&half)?)?
                } else {
                    one.sub(&q[1])?
                };
                Ok(vec![r.mul(&q[0].cos()?)?, r.mul(&q[0].sin()?)?])
            }
            Chart::TorusFundamental { .. } | Chart::CylinderFundamental { .. } => Ok(q.to_vec()),
            Chart::CalegariSphere { alpha } => {
                let a = big(*alpha, bits);
                let two_pi = pi(bits).mul(&big(2.0, bits))?;
                let ang = q[0].mul(&two_pi)?.div(&a)?;
                let w = one.add(&q[1].mul(&q[1])?)?.sqrt()?;
                let perp = one.div(&w)?;
                Ok(vec![q[1].div(&w)?, perp.mul(&ang.cos()?)?, perp.mul(&ang.sin()?)?])
            }
        }
    }

    /// A random ambient point inside the chart domain (`f64` accuracy is enough for sampling).
    pub fn sample_ambient<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        use std::f64::consts::PI;
        let sphere = |x1: f64, ang: f64| {
            let w = (1.0 - x1 * x1).sqrt();
            vec![x1, w * ang.cos(), w * ang.sin()]
        };
        match self {
            Chart::SphereOrtho { sign } => sphere(*sign as f64 * rng.gen_range(0.05..1.0), rng.gen_range(-PI..PI)),
            Chart::SphereBand | Chart::CalegariSphere { .. } => sphere(rng.gen_range(-0.95..0.95), rng.gen_range(-PI..PI)),
            Chart::SphereExp { sign } => sphere(*sign as f64 * rng.gen_range(-0.95..1.0), rng.gen_range(-PI..PI)),
            Chart::AngleToDirection { scale, .. } => {
                let t: f64 = rng.gen_range(-PI..PI);
                vec![t.cos(), t.sin(), scale.abs() * rng.gen_range(0.0..1.0)]
            }
            Chart::Collar { axis, origin, scale } => {
                let y: f64 = rng.gen_range(0.0..0.999);
                let mut p = vec![rng.gen_range(-PI..PI), 0.0];
                p[*axis] = origin + y / scale;
                p
            }
            Chart::DiskPicture | Chart::AnnulusPicture => {
                let lo = if matches!(self, Chart::AnnulusPicture) { 0.5 } else { 0.0 };
                let r = rng.gen_range(lo..1.0);
                let t: f64 = rng.gen_range(-PI..PI);
                vec![r * t.cos(), r * t.sin()]
            }
            Chart::TorusFundamental { alpha } => vec![rng.gen_range(0.0..*alpha), rng.gen_range(0.0..*alpha)],
            Chart::CylinderFundamental { alpha } => vec![rng.gen_range(0.0..*alpha), rng.gen_range(-5.0..5.0)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const B: usize = 192;

    fn reals(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| Real::from_f64(*x, B)).collect()
    }

    fn all_charts() -> Vec<Chart> {
        vec![
            Chart::SphereOrtho { sign: 1 },
            Chart::SphereOrtho { sign: -1 },
            Chart::SphereBand,
            Chart::SphereExp { sign: 1 },
            Chart::SphereExp { sign: -1 },
            Chart::AngleToDirection { scale: std::f64::consts::PI, reversed: false },
            Chart::AngleToDirection { scale: std::f64::consts::PI, reversed: true },
            Chart::collar_at_zero(),
            Chart::collar_at_one(),
            Chart::DiskPicture,
            Chart::AnnulusPicture,
            Chart::TorusFundamental { alpha: 0.414 },
            Chart::CylinderFundamental { alpha: 0.414 },
            Chart::CalegariSphere { alpha: 0.414 },
        ]
    }

    /// Puts f64 samples exactly on the sphere or the unit circle at working precision.
    fn project(chart: &Chart, mut p: Vec<Real>) -> Vec<Real> {
        let n = match chart {
            Chart::SphereOrtho { .. } | Chart::SphereBand | Chart::SphereExp { .. } | Chart::CalegariSphere { .. } => 3,
            Chart::AngleToDirection { .. } => 2,
            _ => return p,
        };
        let mut norm = Real::zero(B);
        for x in &p[..n] {
            norm = norm.add(&x.mul(x).unwrap()).unwrap();
        }
        let norm = norm.sqrt().unwrap();
        for x in &mut p[..n] {
            *x = x.div(&norm).unwrap();
        }
        p
    }

    #[test]
    fn round_trip_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tol = 2f64.powi(-(B as i32 - 16));
        for chart in all_charts() {
            for _ in 0..1000 {
                let p = project(&chart, reals(&chart.sample_ambient(&mut rng)));
                let q = chart.to_euclid(&p, B).unwrap();
                let back = chart.from_euclid(&q, B).unwrap();
                for (a, b) in p.iter().zip(&back) {
                    let d = a.sub(b).unwrap().abs().to_f64();
                    assert!(d <= tol * (1.0 + a.abs().to_f64()), "{}: {a} vs {b}", chart.name());
                }
            }
        }
    }

    #[test]
    fn exp_chart_center_and_antipode() {
        let c = Chart::SphereExp { sign: -1 };
        let q = c.to_euclid(&reals(&[-1.0, 0.0, 0.0]), B).unwrap();
        assert!(q.iter().all(Real::is_zero));
        let r = c.to_euclid(&reals(&[1.0, 0.0, 0.0]), B);
        assert!(r.is_err(), "{r:?}");
        let eq = c.to_euclid(&reals(&[0.0, 1.0, 0.0]), B).unwrap();
        assert!((eq[0].to_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn far_collar_keeps_tiny_depths() {
        let c = Chart::collar_at_one();
        let tiny = Real::from_log(
            crate::numeric::LogScalar::positive(BigScalar::from_f64(-1e6, B)),
            B,
        )
        .unwrap();
        let p = c.from_euclid(&[Real::zero(B), tiny.clone()], B).unwrap();
        assert!(p[1].is_near_unit());
        let y = c.to_euclid(&p, B).unwrap();
        let rel = y[1].div(&tiny).unwrap().to_f64();
        assert!((rel - 1.0).abs() < 1e-30);
    }

    #[test]
    fn domain_errors_name_the_chart() {
        let e = Chart::SphereOrtho { sign: 1 }.to_euclid(&reals(&[-0.5, 0.5, 0.5]), B).unwrap_err();
        assert!(format!("{e}").contains("sphere-ortho"));
    }
}
