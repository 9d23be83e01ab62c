//! Orbits, omega-limit estimates and density of orbits on fundamental domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{evaluate, Chart, MapExpr, ModelKind};
use crate::glue::{GluedManifold, GluedMap, TaggedPoint};
use crate::heisenberg::{element_map, ActionSpec, ActionTarget, HeisElem};
use crate::numeric::Real;
use crate::par::Execution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEstimate {
    /// Mean of the tail positions.
    pub point: Vec<f64>,
    /// Diameter of the tail.
    pub residual: f64,
    pub tail: usize,
}

impl OmegaEstimate {
    /// The tail is tight enough to claim convergence at tolerance `tol`.
    pub fn converged(&self, tol: f64) -> bool {
        self.residual < 10.0 * tol
    }

    pub fn distance_to(&self, q: &[f64]) -> f64 {
        self.point.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitData {
    pub label: String,
    /// Piece tag of each trajectory point; all zero off glued surfaces.
    pub pieces: Vec<usize>,
    pub base: Vec<f64>,
    pub iterates: usize,
    /// Points in stored coordinates, `iterates + 1` of them unless truncated.
    pub trajectory: Vec<Vec<f64>>,
    /// The same points in plotting coordinates.
    pub positions: Vec<Vec<f64>>,
    /// Evaluation failed before `iterates` steps.
    pub truncated: bool,
}

fn to_f64(p: &[Real]) -> Vec<f64> {
    p.iter().map(Real::to_f64).collect()
}

/// `p, f(p), ..., f^n(p)`; positions are taken in `view` when given.
pub fn orbit(f: &MapExpr, p: &[Real], n: usize, view: Option<&Chart>, label: &str, bits: usize) -> Result<OrbitData> {
    if n == 0 {
        return Err(Error::Parameter("an orbit needs at least one iterate".into()));
    }
    let position = |q: &[Real]| -> Result<Vec<f64>> {
        Ok(match view {
            Some(c) => to_f64(&c.from_euclid(q, bits)?),
            None => to_f64(q),
        })
    };
    let mut q = p.to_vec();
    let mut trajectory = vec![to_f64(&q)];
    let mut positions = vec![position(&q)?];
    let mut truncated = false;
    for _ in 0..n {
        match evaluate(f, &q, bits).and_then(|next| position(&next).map(|pos| (next, pos))) {
            Ok((next, pos)) => {
                q = next;
                trajectory.push(to_f64(&q));
                positions.push(pos);
            }
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }
    Ok(OrbitData {
        label: label.into(),
        pieces: vec![0; trajectory.len()],
        base: to_f64(p),
        iterates: n,
        trajectory,
        positions,
        truncated,
    })
}

/// Plotting position of a point of a glued disk/annulus surface: the disk
/// fills the unit disk and an annulus piece sits outside it as `1 <= |q| <= 3/2`.
pub fn glued_position(host: &GluedManifold, p: &TaggedPoint) -> Vec<f64> {
    let v = p.to_f64();
    let r = match host.pieces[p.piece].kind {
        ModelKind::Disk => 1.0 - v[1],
        ModelKind::Annulus => 1.0 + 0.5 * v[1],
        _ => return v,
    };
    vec![r * v[0].cos(), r * v[0].sin()]
}

/// An orbit of a glued map; positions from [`glued_position`].
pub fn glued_orbit(f: &GluedMap, p: &TaggedPoint, n: usize, label: &str, bits: usize) -> Result<OrbitData> {
    if n == 0 {
        return Err(Error::Parameter("an orbit needs at least one iterate".into()));
    }
    let mut q = f.host.canonical(p.clone(), bits)?;
    let mut pts = vec![q.clone()];
    let mut truncated = false;
    for _ in 0..n {
        match f.evaluate(&q, bits) {
            Ok(next) => {
                q = next;
                pts.push(q.clone());
            }
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }
    Ok(OrbitData {
        label: label.into(),
        pieces: pts.iter().map(|t| t.piece).collect(),
        base: p.to_f64(),
        iterates: n,
        trajectory: pts.iter().map(TaggedPoint::to_f64).collect(),
        positions: pts.iter().map(|t| glued_position(&f.host, t)).collect(),
        truncated,
    })
}

/// Mean and diameter of the last tenth of the positions.
pub fn omega_estimate(orbit: &OrbitData) -> Result<OmegaEstimate> {
    let pts = &orbit.positions;
    if pts.is_empty() {
        return Err(Error::Parameter("empty orbit".into()));
    }
    let tail = (pts.len() / 10).max(1);
    let t = &pts[pts.len() - tail..];
    let dim = t[0].len();
    let point: Vec<f64> = (0..dim).map(|i| t.iter().map(|p| p[i]).sum::<f64>() / tail as f64).collect();
    let mut residual = 0.0f64;
    for (i, a) in t.iter().enumerate() {
        for b in &t[i + 1..] {
            residual = residual.max(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
        }
    }
    Ok(OmegaEstimate { point, residual, tail })
}

/// Orbits of several base points, in input order.
pub fn orbit_batch(
    f: &MapExpr,
    bases: &[Vec<Real>],
    n: usize,
    view: Option<&Chart>,
    bits: usize,
    exec: Execution,
) -> Result<Vec<OrbitData>> {
    exec.try_map(bases, |p| orbit(f, p, n, view, "", bits))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub eps: f64,
    pub cells_per_axis: Vec<usize>,
    pub cells: usize,
    pub hit: usize,
    /// Indices of cells no point fell in.
    pub uncovered: Vec<Vec<usize>>,
    pub dense: bool,
    pub points: usize,
}

/// Splits `[0, periods[i])` into cells of side `eps` (the last one may be
/// shorter) and records which cells the points hit.
pub fn density_check(points: &[Vec<f64>], periods: &[f64], eps: f64) -> Result<DensityReport> {
    if !(eps > 0.0) {
        return Err(Error::Parameter("eps must be positive".into()));
    }
    if periods.is_empty() || periods.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::Parameter("periods must be positive".into()));
    }
    let per_axis: Vec<usize> = periods.iter().map(|p| (p / eps).ceil() as usize).collect();
    let cells: usize = per_axis.iter().product();
    let mut hit = vec![false; cells];
    for p in points {
        if p.len() != periods.len() {
            return Err(Error::Dimension(format!("{}-point in a {}-dimensional domain", p.len(), periods.len())));
        }
        let mut idx = 0;
        for ((x, per), n) in p.iter().zip(periods).zip(&per_axis) {
            let k = ((x.rem_euclid(*per) / eps) as usize).min(n - 1);
            idx = idx * n + k;
        }
        hit[idx] = true;
    }
    let mut uncovered = Vec::new();
    for (i, h) in hit.iter().enumerate() {
        if !h {
            let mut rest = i;
            let mut ix = vec![0; per_axis.len()];
            for (d, n) in per_axis.iter().enumerate().rev() {
                ix[d] = rest % n;
                rest /= n;
            }
            uncovered.push(ix);
        }
    }
    let n_hit = hit.iter().filter(|h| **h).count();
    Ok(DensityReport {
        eps,
        cells_per_axis: per_axis,
        cells,
        hit: n_hit,
        dense: uncovered.is_empty(),
        uncovered,
        points: points.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordDensity {
    pub base: Vec<f64>,
    /// Smallest word length at which the points `X^i Y^j p`, `|i| + |j| <= L`, are `eps`-dense.
    pub achieved_at: Option<usize>,
    pub report: DensityReport,
}

/// Grows the word length until the orbit points `X^i Y^j p` cover every
/// `eps`-cell of the torus fundamental square, or `max_len` is reached.
pub fn density_by_word_length(
    spec: &ActionSpec,
    p: &[Real],
    eps: f64,
    max_len: usize,
    bits: usize,
    exec: Execution,
) -> Result<WordDensity> {
    let alpha = match spec.target {
        ActionTarget::Torus { alpha } => alpha,
        _ => return Err(Error::Unsupported(format!("density on {} is not implemented", spec.target.name()))),
    };
    let periods = [alpha, alpha];
    let mut points = vec![to_f64(p)];
    let mut report = density_check(&points, &periods, eps)?;
    for len in 1..=max_len as i64 {
        let mut shell = Vec::new();
        for i in -len..=len {
            let rest = len - i.abs();
            let js = if rest == 0 { vec![0] } else { vec![rest, -rest] };
            for j in js {
                // X^i Y^j
                shell.push(HeisElem::new(i, 0, 0).mul(&HeisElem::new(0, j, 0)));
            }
        }
        let images = exec.try_map(&shell, |g| evaluate(&element_map(&spec.target, g, bits)?, p, bits))?;
        points.extend(images.iter().map(|q| to_f64(q)));
        report = density_check(&points, &periods, eps)?;
        if report.dense {
            return Ok(WordDensity { base: to_f64(p), achieved_at: Some(len as usize), report });
        }
    }
    Ok(WordDensity { base: to_f64(p), achieved_at: None, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{build_action, default_alpha};

    const B: usize = 128;

    #[test]
    fn fixed_point_orbit_is_constant() {
        let f = MapExpr::identity(2);
        let p = vec![Real::from_f64(0.3, B), Real::from_f64(0.4, B)];
        let o = orbit(&f, &p, 20, None, "id", B).unwrap();
        assert_eq!(o.trajectory.len(), 21);
        let w = omega_estimate(&o).unwrap();
        assert_eq!(w.point, vec![0.3, 0.4]);
        assert_eq!(w.residual, 0.0);
        assert!(orbit(&f, &p, 0, None, "id", B).is_err());
    }

    #[test]
    fn failing_orbits_are_truncated() {
        let f = MapExpr::ScalarGraph {
            name: "log".into(),
            dim_in: 1,
            outputs: vec![crate::geometry::expr::var(0).ln()],
            inverse: None,
            jacobian: None,
        };
        let o = orbit(&f, &[Real::from_f64(0.5, B)], 5, None, "log", B).unwrap();
        assert!(o.truncated && o.trajectory.len() == 2);
    }

    #[test]
    fn cells_are_counted() {
        let pts = vec![vec![0.01, 0.01], vec![0.3, 0.02]];
        let r = density_check(&pts, &[0.4, 0.4], 0.1).unwrap();
        assert_eq!(r.cells, 16);
        assert_eq!(r.hit, 2);
        assert!(!r.dense && r.uncovered.len() == 14);
        let r = density_check(&[vec![-0.05]], &[0.4], 0.1).unwrap();
        assert_eq!(r.uncovered.len(), 3);
        assert!(!r.uncovered.contains(&vec![3]));
    }

    #[test]
    fn torus_orbits_become_dense() {
        let spec = build_action(ActionTarget::Torus { alpha: default_alpha() }, B).unwrap();
        let p = vec![Real::from_f64(0.1, B), Real::from_f64(0.2, B)];
        let d = density_by_word_length(&spec, &p, 0.05, 200, B, Execution::Parallel).unwrap();
        assert!(d.achieved_at.unwrap() <= 200);
    }
}
