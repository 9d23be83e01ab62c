//! The concrete Heisenberg actions: projective on the sphere, affine on the
//! plane and its quotients, and the blown-up actions on the disk and annulus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{Gen, HeisElem, Word};
use crate::blowup::{closed_form_derivative, induced_map, BlowupSite};
use crate::error::{Error, Result};
use crate::geometry::expr::{c, var};
use crate::geometry::{compose, evaluate, Branch, Chart, ManifoldModel, MapExpr, Region};
use crate::numeric::{Real, TolerancePolicy};

/// Default irrational period for the quotient targets.
pub fn default_alpha() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum ActionTarget {
    Sphere,
    Plane,
    Torus { alpha: f64 },
    Cylinder { alpha: f64 },
    CalegariSphere { alpha: f64 },
    DiskBlowup,
    AnnulusBlowup,
}

impl ActionTarget {
    pub fn name(&self) -> &'static str {
        match self {
            ActionTarget::Sphere => "sphere",
            ActionTarget::Plane => "plane",
            ActionTarget::Torus { .. } => "torus",
            ActionTarget::Cylinder { .. } => "cylinder",
            ActionTarget::CalegariSphere { .. } => "calegari_sphere",
            ActionTarget::DiskBlowup => "disk_blowup",
            ActionTarget::AnnulusBlowup => "annulus_blowup",
        }
    }

    /// Parses a target id; quotient targets take `alpha` (default `sqrt 2 - 1`).
    pub fn from_id(id: &str, alpha: Option<f64>) -> Result<Self> {
        let a = alpha.unwrap_or_else(default_alpha);
        Ok(match id {
            "sphere" => ActionTarget::Sphere,
            "plane" => ActionTarget::Plane,
            "torus" => ActionTarget::Torus { alpha: a },
            "cylinder" => ActionTarget::Cylinder { alpha: a },
            "calegari_sphere" => ActionTarget::CalegariSphere { alpha: a },
            "disk_blowup" | "disk" => ActionTarget::DiskBlowup,
            "annulus_blowup" | "annulus" => ActionTarget::AnnulusBlowup,
            other => return Err(Error::Parameter(format!("unknown action target {other:?}"))),
        })
    }

    pub fn model(&self) -> ManifoldModel {
        match *self {
            ActionTarget::Sphere | ActionTarget::CalegariSphere { .. } => ManifoldModel::sphere(),
            ActionTarget::Plane => ManifoldModel::plane(),
            ActionTarget::Torus { alpha } => ManifoldModel::torus(alpha),
            ActionTarget::Cylinder { alpha } => ManifoldModel::cylinder(alpha),
            ActionTarget::DiskBlowup => ManifoldModel::disk(),
            ActionTarget::AnnulusBlowup => ManifoldModel::annulus(),
        }
    }
}

/// Rejects `alpha` within `1e-12` of a rational with denominator at most `1e6`.
pub fn check_irrational(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Parameter(format!("alpha must be a positive number, got {alpha}")));
    }
    for q in 1..=1_000_000u32 {
        let q = q as f64;
        let p = (alpha * q).round();
        if (alpha - p / q).abs() < 1e-12 {
            return Err(Error::Parameter(format!("alpha = {alpha} is within 1e-12 of the rational {p}/{q}")));
        }
    }
    Ok(())
}

/// The generator images of an action, with explicit inverses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub target: ActionTarget,
    pub x: MapExpr,
    pub y: MapExpr,
    pub x_inv: MapExpr,
    pub y_inv: MapExpr,
}

fn matrix_of(g: &HeisElem) -> Result<Vec<Vec<i64>>> {
    let (a, b, cc) = g.small().ok_or_else(|| Error::Range("element entries exceed 64 bits".into()))?;
    Ok(vec![vec![1, a, cc], vec![0, 1, b], vec![0, 0, 1]])
}

/// `(x, y) -> (x + a y + c, y + b)`.
fn affine(g: &HeisElem) -> Result<MapExpr> {
    let (a, b, cc) = g.small().ok_or_else(|| Error::Range("element entries exceed 64 bits".into()))?;
    let x = var(0) + c(a as f64) * var(1) + c(cc as f64);
    let y = var(1) + c(b as f64);
    let xi = var(0) - c(a as f64) * (var(1) - c(b as f64)) - c(cc as f64);
    let yi = var(1) - c(b as f64);
    Ok(MapExpr::ScalarGraph {
        name: format!("heis({a},{b},{cc})"),
        dim_in: 2,
        outputs: vec![x, y],
        inverse: Some(vec![xi, yi]),
        jacobian: Some(vec![vec![c(1.0), c(a as f64)], vec![c(0.0), c(1.0)]]),
    })
}

fn quotient(periods: [Option<f64>; 2], inner: MapExpr) -> MapExpr {
    MapExpr::Quotient { periods: periods.iter().map(|p| p.map(c)).collect(), inner: Box::new(inner) }
}

/// The projective action of `A` blown up at both poles, in the disk or
/// annulus coordinates `(theta, s)`: the formula about `(-1, 0, 0)` for
/// `s < 1/2` and about `(1, 0, 0)` otherwise.
pub fn blown_up_projective(matrix: &[Vec<i64>], bits: usize) -> Result<MapExpr> {
    let a = MapExpr::projective_i64(matrix);
    let pi = std::f64::consts::PI;
    let side = |sign: i8, reversed: bool| -> Result<MapExpr> {
        let site = BlowupSite::sphere_pole(sign);
        let tilde = induced_map(&a, &site, bits)?;
        debug_assert!(closed_form_derivative(&a, &site).is_some());
        Ok(MapExpr::ChartConjugate { chart: Chart::AngleToDirection { scale: pi, reversed }, inner: Box::new(tilde) })
    };
    Ok(MapExpr::Piecewise {
        dim: 2,
        branches: vec![
            Branch { region: Region::Below { axis: 1, bound: c(0.5) }, map: side(-1, false)? },
            Branch { region: Region::All, map: side(1, true)? },
        ],
        preserves_regions: false,
    })
}

fn calegari(alpha: f64, inner: MapExpr) -> MapExpr {
    let chart = Chart::CalegariSphere { alpha };
    MapExpr::Piecewise {
        dim: 3,
        branches: vec![
            Branch { region: Region::AtLeast { axis: 0, bound: c(1.0) }, map: MapExpr::identity(3) },
            Branch { region: Region::AtMost { axis: 0, bound: c(-1.0) }, map: MapExpr::identity(3) },
            Branch { region: Region::All, map: MapExpr::LocalConjugate { chart, inner: Box::new(inner) } },
        ],
        preserves_regions: true,
    }
}

/// The map by which a group element acts on `target`.
pub fn element_map(target: &ActionTarget, g: &HeisElem, bits: usize) -> Result<MapExpr> {
    Ok(match *target {
        ActionTarget::Sphere => MapExpr::projective_i64(&matrix_of(g)?),
        ActionTarget::Plane => affine(g)?,
        ActionTarget::Torus { alpha } => quotient([Some(alpha), Some(alpha)], affine(g)?),
        ActionTarget::Cylinder { alpha } => quotient([Some(alpha), None], affine(g)?),
        ActionTarget::CalegariSphere { alpha } => calegari(alpha, quotient([Some(alpha), None], affine(g)?)),
        ActionTarget::DiskBlowup | ActionTarget::AnnulusBlowup => blown_up_projective(&matrix_of(g)?, bits)?,
    })
}

/// Builds the generator images on a target, checking `alpha` for quotients
/// and that the relations hold on samples.
pub fn build_action(target: ActionTarget, bits: usize) -> Result<ActionSpec> {
    if let ActionTarget::Torus { alpha } | ActionTarget::Cylinder { alpha } | ActionTarget::CalegariSphere { alpha } =
        target
    {
        check_irrational(alpha)?;
    }
    let spec = ActionSpec {
        x: element_map(&target, &HeisElem::x(), bits)?,
        y: element_map(&target, &HeisElem::y(), bits)?,
        x_inv: element_map(&target, &HeisElem::x().inv(), bits)?,
        y_inv: element_map(&target, &HeisElem::y().inv(), bits)?,
        target,
    };
    let defect = relation_defect(&spec, 16, bits)?;
    let tol = TolerancePolicy::for_bits(bits).identity_abs.max(1e-20);
    if defect > tol {
        return Err(Error::Construction(format!(
            "{} action breaks the Heisenberg relations by {defect:e}",
            spec.target.name()
        )));
    }
    Ok(spec)
}

impl ActionSpec {
    pub fn model(&self) -> ManifoldModel {
        self.target.model()
    }

    pub fn generator(&self, g: Gen) -> &MapExpr {
        match g {
            Gen::X => &self.x,
            Gen::XInv => &self.x_inv,
            Gen::Y => &self.y,
            Gen::YInv => &self.y_inv,
        }
    }

    /// The composed map of a word: the rightmost letter acts first.
    pub fn word_map(&self, w: &Word) -> Result<MapExpr> {
        let dim = self.model().coord_dim();
        let mut m = MapExpr::identity(dim);
        for &g in w.0.iter().rev() {
            m = compose(self.generator(g), &m)?;
        }
        Ok(m)
    }

    /// Random points inside the target, away from the places where the
    /// coordinates degenerate.
    pub fn sample_points(&self, n: usize, seed: u64, bits: usize) -> Vec<Vec<Real>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = self.model();
        (0..n)
            .map(|_| {
                let mut v = model.sample_interior(&mut rng);
                if matches!(self.target, ActionTarget::DiskBlowup | ActionTarget::AnnulusBlowup) {
                    // keep clear of s = 1/2, where the branch switches
                    v[1] = rng.gen_range(0.02..0.45) + if rng.gen_bool(0.5) { 0.5 } else { 0.0 };
                }
                let mut p: Vec<Real> = v.iter().map(|x| Real::from_f64(*x, bits)).collect();
                if model.coord_dim() == 3 {
                    let mut nn = Real::zero(bits);
                    for x in &p {
                        nn = nn.add(&x.mul(x).expect("finite")).expect("finite");
                    }
                    let nn = nn.sqrt().expect("positive");
                    p = p.iter().map(|x| x.div(&nn).expect("nonzero")).collect();
                }
                p
            })
            .collect()
    }
}

/// Applies a word to a point; the rightmost letter acts first.
pub fn evaluate_word_action(spec: &ActionSpec, w: &Word, p: &[Real], bits: usize) -> Result<Vec<Real>> {
    let mut q = p.to_vec();
    for &g in w.0.iter().rev() {
        q = evaluate(spec.generator(g), &q, bits)?;
    }
    Ok(q)
}

/// Largest distance over samples in `[X, Y] = Z`, `XZ = ZX` and `YZ = ZY`,
/// with `Z` acting through its own element map.
pub fn relation_defect(spec: &ActionSpec, samples: usize, bits: usize) -> Result<f64> {
    let model = spec.model();
    let z = element_map(&spec.target, &HeisElem::z(), bits)?;
    let comm: Word = "XYxy".parse()?;
    let mut worst = 0.0f64;
    for p in spec.sample_points(samples, 5, bits) {
        let zp = evaluate(&z, &p, bits)?;
        let cp = evaluate_word_action(spec, &comm, &p, bits)?;
        worst = worst.max(model.distance(&zp, &cp, bits)?);
        for g in [Gen::X, Gen::Y] {
            let gz = evaluate(spec.generator(g), &zp, bits)?;
            let zg = evaluate(&z, &evaluate(spec.generator(g), &p, bits)?, bits)?;
            worst = worst.max(model.distance(&gz, &zg, bits)?);
        }
    }
    Ok(worst)
}

/// The picture-plane position of a disk or annulus point, for plotting.
pub fn picture_point(target: &ActionTarget, p: &[Real], bits: usize) -> Result<Vec<f64>> {
    let chart = match target {
        ActionTarget::DiskBlowup => Chart::DiskPicture,
        ActionTarget::AnnulusBlowup => Chart::AnnulusPicture,
        _ => return Ok(p.iter().map(Real::to_f64).collect()),
    };
    Ok(chart.from_euclid(p, bits)?.iter().map(Real::to_f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 192;

    fn pt(v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| Real::from_f64(*x, B)).collect()
    }

    #[test]
    fn sphere_and_plane_examples() {
        let s = build_action(ActionTarget::Sphere, B).unwrap();
        let q = evaluate(&s.x, &pt(&[0.0, 1.0, 0.0]), B).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q[0].to_f64() - h).abs() < 1e-15 && (q[1].to_f64() - h).abs() < 1e-15);
        for sign in [1.0, -1.0] {
            for g in [&s.x, &s.y] {
                assert_eq!(evaluate(g, &pt(&[sign, 0.0, 0.0]), B).unwrap(), pt(&[sign, 0.0, 0.0]));
            }
        }
        let p = build_action(ActionTarget::Plane, B).unwrap();
        assert_eq!(evaluate(&p.x, &pt(&[2.0, 3.0]), B).unwrap(), pt(&[5.0, 3.0]));
        let z = evaluate_word_action(&p, &"XYxy".parse().unwrap(), &pt(&[2.0, 3.0]), B).unwrap();
        assert_eq!(z, pt(&[3.0, 3.0]));
    }

    #[test]
    fn word_action_matches_the_group_law() {
        let w: Word = "X^2 Y^-1 X Y^3 X^-1".parse().unwrap();
        for target in [ActionTarget::Sphere, ActionTarget::Plane, ActionTarget::Torus { alpha: default_alpha() }] {
            let spec = build_action(target.clone(), B).unwrap();
            let direct = element_map(&target, &w.eval(), B).unwrap();
            for p in spec.sample_points(8, 3, B) {
                let a = evaluate_word_action(&spec, &w, &p, B).unwrap();
                let b = evaluate(&direct, &p, B).unwrap();
                assert!(spec.model().distance(&a, &b, B).unwrap() < 1e-40, "{}", target.name());
            }
        }
    }

    #[test]
    fn commutator_on_the_torus_is_a_horizontal_translation() {
        let alpha = default_alpha();
        let spec = build_action(ActionTarget::Torus { alpha }, B).unwrap();
        let q = evaluate_word_action(&spec, &"XYxy".parse().unwrap(), &pt(&[0.1, 0.2]), B).unwrap();
        let want = (0.1 + 1.0f64).rem_euclid(alpha);
        assert!((q[0].to_f64() - want).abs() < 1e-14 && (q[1].to_f64() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn blown_up_actions_satisfy_the_relations() {
        for target in [ActionTarget::DiskBlowup, ActionTarget::AnnulusBlowup] {
            let spec = build_action(target, B).unwrap();
            assert!(relation_defect(&spec, 24, B).unwrap() < 1e-40);
        }
        let cal = build_action(ActionTarget::CalegariSphere { alpha: default_alpha() }, B).unwrap();
        assert_eq!(evaluate(&cal.y, &pt(&[1.0, 0.0, 0.0]), B).unwrap(), pt(&[1.0, 0.0, 0.0]));
        assert!(relation_defect(&cal, 24, B).unwrap() < 1e-30);
    }

    #[test]
    fn y_pushes_the_upper_half_disk_to_the_right_point() {
        let spec = build_action(ActionTarget::DiskBlowup, B).unwrap();
        let right = [0.5, 0.0];
        let mut p = pt(&[1.2, 0.3]);
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            p = evaluate(&spec.y, &p, B).unwrap();
            let q = picture_point(&ActionTarget::DiskBlowup, &p, B).unwrap();
            let d = (q[0] - right[0]).hypot(q[1] - right[1]);
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn rational_alpha_is_rejected() {
        assert!(check_irrational(0.5).is_err());
        assert!(check_irrational(355.0 / 113.0).is_err());
        assert!(check_irrational(default_alpha()).is_ok());
        assert!(build_action(ActionTarget::Torus { alpha: 0.25 }, B).is_err());
    }
}
