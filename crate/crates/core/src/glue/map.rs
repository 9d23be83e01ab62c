//! Glued maps `g(f1, f2)`, their compatibility test, the smoothed gluing
//! and the double.

use serde::{Deserialize, Serialize};

use super::manifold::{BoundaryGluing, GluedManifold, TaggedPoint};
use crate::error::{Error, Result};
use crate::geometry::{compose, evaluate, ManifoldModel, MapExpr};
use crate::numeric::{Real, TolerancePolicy};
use crate::stretch::{build_psi_all, conjugate, ChiProfile, CollarSpec};

/// Tolerance for boundary compatibility at `bits` of precision.
pub fn compatibility_tol(bits: usize) -> f64 {
    TolerancePolicy::for_bits(bits).identity_abs.max(2f64.powi(-(bits as i32) / 2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub samples: usize,
    /// Worst defect per seam.
    pub per_seam: Vec<f64>,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `alpha . f_a = f_b . alpha` on each seam. Images are compared as
/// points of `N`, so a component may be carried to another glued component.
pub fn check_compatibility(
    maps: &[MapExpr],
    host: &GluedManifold,
    n_samples: usize,
    bits: usize,
) -> Result<CompatibilityReport> {
    if maps.len() != host.pieces.len() {
        return Err(Error::Parameter(format!("{} maps for {} pieces", maps.len(), host.pieces.len())));
    }
    let mut per_seam = Vec::with_capacity(host.seams.len());
    for s in &host.seams {
        let mut worst = 0.0f64;
        for j in 0..n_samples {
            let t = Real::from_f64(-3.1 + 6.2 * (j as f64 + 0.5) / n_samples as f64, bits);
            let xa = host.pieces[s.a.piece].boundary_point(&s.a.component, &t, bits)?;
            let ta = evaluate(&s.alpha, &[t], bits)?;
            let xb = host.pieces[s.b.piece].boundary_point(&s.b.component, &ta[0], bits)?;
            let domain = |e: Error| Error::Domain(format!("boundary sample: {e}"));
            let fa = evaluate(&maps[s.a.piece], &xa, bits).map_err(domain)?;
            let fb = evaluate(&maps[s.b.piece], &xb, bits).map_err(domain)?;
            let d = host.distance(&TaggedPoint::new(s.a.piece, fa), &TaggedPoint::new(s.b.piece, fb), bits)?;
            worst = worst.max(d);
        }
        per_seam.push(worst);
    }
    let max_defect = per_seam.iter().copied().fold(0.0, f64::max);
    let tol = compatibility_tol(bits);
    Ok(CompatibilityReport { samples: n_samples, per_seam, max_defect, tol, pass: max_defect < tol })
}

/// A map of `N` given piecewise; seam points are evaluated with the
/// branch of the piece they are tagged with after canonicalization, which
/// is the `b` side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedMap {
    pub host: GluedManifold,
    pub maps: Vec<MapExpr>,
    /// The collar conjugacies used on each piece, when smoothed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<MapExpr>>,
}

impl GluedMap {
    pub fn identity(host: &GluedManifold) -> Self {
        let maps = host.pieces.iter().map(|m| MapExpr::identity(m.coord_dim())).collect();
        GluedMap { host: host.clone(), maps, psi: None }
    }

    pub fn f1(&self) -> &MapExpr {
        &self.maps[0]
    }

    pub fn f2(&self) -> &MapExpr {
        self.maps.get(1).unwrap_or(&self.maps[0])
    }

    pub fn evaluate(&self, p: &TaggedPoint, bits: usize) -> Result<TaggedPoint> {
        let p = self.host.canonical(p.clone(), bits)?;
        let f = self.maps.get(p.piece).ok_or_else(|| Error::Parameter(format!("no piece {}", p.piece)))?;
        let q = evaluate(f, &p.coords, bits)?;
        self.host.canonical(TaggedPoint::new(p.piece, q), bits)
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &GluedMap) -> Result<GluedMap> {
        if self.host != inner.host {
            return Err(Error::Parameter("glued maps live on different hosts".into()));
        }
        let maps = self.maps.iter().zip(&inner.maps).map(|(f, g)| compose(f, g)).collect::<Result<_>>()?;
        Ok(GluedMap { host: self.host.clone(), maps, psi: None })
    }

    /// The map in the coordinates of seam `k`: `eta . F . eta^-1 (u, y)`.
    pub fn eval_seam(&self, k: usize, u: &Real, y: &Real, bits: usize) -> Result<[Real; 2]> {
        let p = self.host.from_seam(k, u, y, bits)?;
        let q = self.evaluate(&p, bits)?;
        self.host.to_seam(k, &q, bits)
    }

    /// Sampled points `p` with `F(p) = p` to within `tol`, with duplicates
    /// (including two representatives of one seam point) merged.
    pub fn fixed_points(&self, candidates: &[TaggedPoint], tol: f64, bits: usize) -> Result<Vec<TaggedPoint>> {
        let mut out: Vec<TaggedPoint> = Vec::new();
        for c in candidates {
            let p = self.host.canonical(c.clone(), bits)?;
            let q = self.evaluate(&p, bits)?;
            if self.host.distance(&p, &q, bits)? >= tol {
                continue;
            }
            let mut seen = false;
            for o in &out {
                if self.host.distance(o, &p, bits)? < tol {
                    seen = true;
                    break;
                }
            }
            if !seen {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// `g(f1, f2, ...)`, after checking boundary compatibility.
pub fn glue_maps(maps: &[MapExpr], host: &GluedManifold, bits: usize) -> Result<GluedMap> {
    let report = check_compatibility(maps, host, 32, bits)?;
    if !report.pass {
        return Err(Error::Incompatible { defect: report.max_defect, tol: report.tol });
    }
    Ok(GluedMap { host: host.clone(), maps: maps.to_vec(), psi: None })
}

/// The collar conjugacy of each piece: one `Psi` per glued component.
pub fn piece_psis(host: &GluedManifold, profile: &ChiProfile) -> Result<Vec<MapExpr>> {
    host.pieces
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut collars: Vec<CollarSpec> = Vec::new();
            for s in &host.seams {
                if s.a.piece == i {
                    collars.push(s.collar_a.clone());
                }
                if s.b.piece == i {
                    collars.push(s.collar_b.clone());
                }
            }
            if collars.is_empty() {
                Ok(MapExpr::identity(m.coord_dim()))
            } else {
                build_psi_all(&collars, profile)
            }
        })
        .collect()
}

/// `g(Psi_1^-1 f_1 Psi_1, Psi_2^-1 f_2 Psi_2)`.
pub fn smooth_glue(maps: &[MapExpr], host: &GluedManifold, profile: &ChiProfile, bits: usize) -> Result<GluedMap> {
    let report = check_compatibility(maps, host, 32, bits)?;
    if !report.pass {
        return Err(Error::Incompatible { defect: report.max_defect, tol: report.tol });
    }
    let psis = piece_psis(host, profile)?;
    smooth_with(maps, host, psis)
}

fn smooth_with(maps: &[MapExpr], host: &GluedManifold, psis: Vec<MapExpr>) -> Result<GluedMap> {
    let conj = maps.iter().zip(&psis).map(|(f, psi)| conjugate(f, psi)).collect::<Result<_>>()?;
    Ok(GluedMap { host: host.clone(), maps: conj, psi: Some(psis) })
}

/// Two copies of `s` glued by the identity along every boundary component.
pub fn double_host(s: &ManifoldModel, bits: usize) -> Result<GluedManifold> {
    let names: Vec<(&str, &str)> = s.boundary.iter().map(|c| (c.name.as_str(), c.name.as_str())).collect();
    if names.is_empty() {
        return Err(Error::Parameter(format!("{} has no boundary to double along", s.name())));
    }
    GluedManifold::glue(s.clone(), s.clone(), &BoundaryGluing::identity(&names), bits)
}

/// `f -> f~` on `D(S)`: the smoothed gluing of `f` with itself, using the
/// same `Psi` on both copies.
pub fn double(s: &ManifoldModel, f: &MapExpr, profile: &ChiProfile, bits: usize) -> Result<GluedMap> {
    let host = double_host(s, bits)?;
    let collars =
        s.boundary.iter().map(|c| CollarSpec::new(s, &c.name, crate::stretch::Side::Plus)).collect::<Result<Vec<_>>>()?;
    let psi = build_psi_all(&collars, profile)?;
    smooth_with(&[f.clone(), f.clone()], &host, vec![psi.clone(), psi])
}

/// Largest distance between `(f . g)(p)` and `f(g(p))` over `points`.
pub fn functoriality_defect(
    fg: &GluedMap,
    f: &GluedMap,
    g: &GluedMap,
    points: &[TaggedPoint],
    bits: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let a = fg.evaluate(p, bits)?;
        let b = f.evaluate(&g.evaluate(p, bits)?, bits)?;
        worst = worst.max(fg.host.distance(&a, &b, bits)?);
    }
    Ok(worst)
}
