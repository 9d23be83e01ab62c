//! Glued surfaces `N = M1 u M2 / ~`: boundary identifications, seam charts
//! and tagged points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{evaluate, invert, ManifoldModel, MapExpr, ModelKind};
use crate::numeric::Real;
use crate::stretch::{CollarSpec, Side};

/// Points closer than this to a seam (in seam-chart depth) are seam points.
pub const SEAM_EPS: f64 = 1e-30;

fn identity_alpha() -> MapExpr {
    MapExpr::identity(1)
}

/// One identified pair of boundary components, `alpha: C1 -> C2` acting on
/// the boundary parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingPair {
    pub component1: String,
    pub component2: String,
    #[serde(default = "identity_alpha")]
    pub alpha: MapExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryGluing {
    pub pairs: Vec<GluingPair>,
}

impl BoundaryGluing {
    /// Identity identifications of the named component pairs.
    pub fn identity(pairs: &[(&str, &str)]) -> Self {
        BoundaryGluing {
            pairs: pairs
                .iter()
                .map(|(a, b)| GluingPair { component1: (*a).into(), component2: (*b).into(), alpha: identity_alpha() })
                .collect(),
        }
    }

    pub fn with_alpha(c1: &str, c2: &str, alpha: MapExpr) -> Self {
        BoundaryGluing { pairs: vec![GluingPair { component1: c1.into(), component2: c2.into(), alpha }] }
    }
}

/// A boundary component of one piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecePort {
    pub piece: usize,
    pub component: String,
}

/// One seam with its chart `eta`: the `a` side maps to `C_b x [0, 1)` by
/// `(alpha x id) . eta_a`, the `b` side to `C_b x (-1, 0]` by `(x, y) -> (x, -y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seam {
    pub a: PiecePort,
    pub b: PiecePort,
    pub alpha: MapExpr,
    pub alpha_inv: MapExpr,
    pub collar_a: CollarSpec,
    pub collar_b: CollarSpec,
}

/// A point of `N`, stored in the coordinates of the piece it is tagged with.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedPoint {
    pub piece: usize,
    pub coords: Vec<Real>,
}

impl TaggedPoint {
    pub fn new(piece: usize, coords: Vec<Real>) -> Self {
        TaggedPoint { piece, coords }
    }

    pub fn from_f64(piece: usize, v: &[f64], bits: usize) -> Self {
        TaggedPoint { piece, coords: v.iter().map(|x| Real::from_f64(*x, bits)).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Real::to_f64).collect()
    }
}

/// Round-trip defect of `alpha^-1 . alpha` on sampled boundary parameters.
fn alpha_round_trip(alpha: &MapExpr, alpha_inv: &MapExpr, samples: usize, bits: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..samples {
        let t = Real::from_f64(-3.0 + 6.0 * (k as f64 + 0.5) / samples as f64, bits);
        let back = evaluate(alpha_inv, &evaluate(alpha, &[t.clone()], bits)?, bits)?;
        worst = worst.max(back[0].sub(&t)?.abs().to_f64());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedManifold {
    pub pieces: Vec<ManifoldModel>,
    pub seams: Vec<Seam>,
    pub seam_eps: f64,
}

impl GluedManifold {
    fn empty(pieces: Vec<ManifoldModel>) -> Self {
        GluedManifold { pieces, seams: Vec::new(), seam_eps: SEAM_EPS }
    }

    /// `M1 u M2 / ~` with `component1` on `m1` and `component2` on `m2`.
    pub fn glue(m1: ManifoldModel, m2: ManifoldModel, gluing: &BoundaryGluing, bits: usize) -> Result<Self> {
        let mut n = Self::empty(vec![m1, m2]);
        for p in &gluing.pairs {
            n.add_seam(
                PiecePort { piece: 0, component: p.component1.clone() },
                PiecePort { piece: 1, component: p.component2.clone() },
                p.alpha.clone(),
                bits,
            )?;
        }
        Ok(n)
    }

    /// Identifies boundary components of a single manifold, e.g. the two
    /// ends of the annulus to make a torus.
    pub fn self_glue(m: ManifoldModel, gluing: &BoundaryGluing, bits: usize) -> Result<Self> {
        let mut n = Self::empty(vec![m]);
        for p in &gluing.pairs {
            if p.component1 == p.component2 {
                return Err(Error::Parameter(format!("cannot glue {:?} to itself", p.component1)));
            }
            n.add_seam(
                PiecePort { piece: 0, component: p.component1.clone() },
                PiecePort { piece: 0, component: p.component2.clone() },
                p.alpha.clone(),
                bits,
            )?;
        }
        Ok(n)
    }

    /// Folds pairwise gluings along a chain: `gluings[i]` joins piece `i`
    /// (`component1`) to piece `i + 1` (`component2`).
    pub fn chain(pieces: Vec<ManifoldModel>, gluings: &[BoundaryGluing], bits: usize) -> Result<Self> {
        if gluings.len() + 1 != pieces.len() {
            return Err(Error::Parameter(format!(
                "a chain of {} pieces needs {} gluings, got {}",
                pieces.len(),
                pieces.len().saturating_sub(1),
                gluings.len()
            )));
        }
        let mut n = Self::empty(pieces);
        for (i, g) in gluings.iter().enumerate() {
            for p in &g.pairs {
                n.add_seam(
                    PiecePort { piece: i, component: p.component1.clone() },
                    PiecePort { piece: i + 1, component: p.component2.clone() },
                    p.alpha.clone(),
                    bits,
                )?;
            }
        }
        Ok(n)
    }

    fn add_seam(&mut self, a: PiecePort, b: PiecePort, alpha: MapExpr, bits: usize) -> Result<()> {
        for port in [&a, &b] {
            let model = self
                .pieces
                .get(port.piece)
                .ok_or_else(|| Error::Parameter(format!("no piece {}", port.piece)))?;
            model.component(&port.component)?;
            if self.seams.iter().any(|s| s.a == *port || s.b == *port) {
                return Err(Error::Parameter(format!(
                    "component {:?} of piece {} is glued twice",
                    port.component, port.piece
                )));
            }
        }
        if alpha.dim_in() != Some(1) || alpha.dim_out() != Some(1) {
            return Err(Error::Dimension("alpha must act on the one boundary parameter".into()));
        }
        let alpha_inv = invert(&alpha)?;
        let defect = alpha_round_trip(&alpha, &alpha_inv, 16, bits)?;
        if defect > 1e-20f64.max(2f64.powi(-(bits as i32) / 2)) {
            return Err(Error::Construction(format!("alpha does not invert on the boundary: round trip {defect:e}")));
        }
        let collar_a = CollarSpec::new(&self.pieces[a.piece], &a.component, Side::Plus)?;
        let collar_b = CollarSpec::new(&self.pieces[b.piece], &b.component, Side::Minus)?;
        collar_a.check_boundary(&self.pieces[a.piece], 8, bits)?;
        collar_b.check_boundary(&self.pieces[b.piece], 8, bits)?;
        if a.piece == b.piece {
            self.check_disjoint_collars(&collar_a, &collar_b, a.piece, bits)?;
        }
        self.seams.push(Seam { a, b, alpha, alpha_inv, collar_a, collar_b });
        Ok(())
    }

    fn check_disjoint_collars(&self, ca: &CollarSpec, cb: &CollarSpec, piece: usize, bits: usize) -> Result<()> {
        let model = &self.pieces[piece];
        let (ra, rb) = (ca.region()?, cb.region()?);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..64 {
            let p: Vec<Real> = model.sample_interior(&mut rng).iter().map(|x| Real::from_f64(*x, bits)).collect();
            if ra.contains(&p, bits)? && rb.contains(&p, bits)? {
                return Err(Error::Construction(format!(
                    "collars of {:?} and {:?} overlap",
                    ca.component, cb.component
                )));
            }
        }
        Ok(())
    }

    pub fn piece1(&self) -> &ManifoldModel {
        &self.pieces[0]
    }

    /// The second piece; for a self-gluing this is the first piece again.
    pub fn piece2(&self) -> &ManifoldModel {
        self.pieces.get(1).unwrap_or(&self.pieces[0])
    }

    pub fn is_self_glued(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Boundary components left unglued.
    pub fn free_boundary(&self) -> Vec<PiecePort> {
        let mut out = Vec::new();
        for (i, m) in self.pieces.iter().enumerate() {
            for c in &m.boundary {
                let port = PiecePort { piece: i, component: c.name.clone() };
                if !self.seams.iter().any(|s| s.a == port || s.b == port) {
                    out.push(port);
                }
            }
        }
        out
    }

    /// Gluing along circles leaves the Euler characteristic additive.
    pub fn euler_characteristic(&self) -> i32 {
        self.pieces.iter().map(ManifoldModel::euler_characteristic).sum()
    }

    /// The closed orientable model surface of the same Euler characteristic,
    /// when `N` is closed.
    pub fn surface_type(&self) -> Option<ModelKind> {
        if !self.free_boundary().is_empty() {
            return None;
        }
        match self.euler_characteristic() {
            2 => Some(ModelKind::Sphere),
            0 => Some(ModelKind::Torus { alpha: 1.0 }),
            _ => None,
        }
    }

    pub fn seam(&self, k: usize) -> Result<&Seam> {
        self.seams.get(k).ok_or_else(|| Error::Parameter(format!("no seam {k}")))
    }

    /// Period of the boundary parameter on seam `k`, if it is an angle.
    pub fn seam_period(&self, k: usize) -> Result<Option<f64>> {
        let s = self.seam(k)?;
        Ok(match self.pieces[s.b.piece].kind {
            ModelKind::Disk | ModelKind::Annulus => Some(std::f64::consts::TAU),
            _ => None,
        })
    }

    fn model(&self, p: &TaggedPoint) -> Result<&ManifoldModel> {
        let m = self.pieces.get(p.piece).ok_or_else(|| Error::Parameter(format!("no piece {}", p.piece)))?;
        if p.coords.len() != m.coord_dim() {
            return Err(Error::Dimension(format!(
                "{} point has {} coordinates, expected {}",
                m.name(),
                p.coords.len(),
                m.coord_dim()
            )));
        }
        Ok(m)
    }

    /// Collar coordinates `(theta, y)` of `p` on the given side of seam `k`,
    /// if `p` lies in that collar.
    fn collar_coords(&self, k: usize, side: Side, p: &TaggedPoint, bits: usize) -> Result<Option<Vec<Real>>> {
        let s = self.seam(k)?;
        let (port, collar) = match side {
            Side::Plus => (&s.a, &s.collar_a),
            Side::Minus => (&s.b, &s.collar_b),
        };
        if port.piece != p.piece || !collar.region()?.contains(&p.coords, bits)? {
            return Ok(None);
        }
        Ok(Some(collar.chart.to_euclid(&p.coords, bits)?))
    }

    /// The seam collar containing `p`, if any.
    pub fn locate(&self, p: &TaggedPoint, bits: usize) -> Result<Option<(usize, Side)>> {
        self.model(p)?;
        for k in 0..self.seams.len() {
            for side in [Side::Minus, Side::Plus] {
                if self.collar_coords(k, side, p, bits)?.is_some() {
                    return Ok(Some((k, side)));
                }
            }
        }
        Ok(None)
    }

    /// Replaces a point on an `a`-side seam component by its representative
    /// on the `b` side.
    pub fn canonical(&self, p: TaggedPoint, bits: usize) -> Result<TaggedPoint> {
        self.model(&p)?;
        for (k, s) in self.seams.iter().enumerate() {
            if let Some(q) = self.collar_coords(k, Side::Plus, &p, bits)? {
                if q[1].abs().to_f64() < self.seam_eps {
                    let t = evaluate(&s.alpha, &q[..1], bits)?;
                    let coords = self.pieces[s.b.piece].boundary_point(&s.b.component, &t[0], bits)?;
                    return Ok(TaggedPoint { piece: s.b.piece, coords });
                }
            }
        }
        Ok(p)
    }

    /// `eta(p) = (u, y)` on seam `k`; fails when `p` is outside both collars.
    pub fn to_seam(&self, k: usize, p: &TaggedPoint, bits: usize) -> Result<[Real; 2]> {
        let s = self.seam(k)?;
        if let Some(q) = self.collar_coords(k, Side::Minus, p, bits)? {
            return Ok([q[0].clone(), q[1].neg()]);
        }
        if let Some(q) = self.collar_coords(k, Side::Plus, p, bits)? {
            let u = evaluate(&s.alpha, &q[..1], bits)?;
            return Ok([u[0].clone(), q[1].clone()]);
        }
        Err(Error::Domain(format!("point of piece {} is outside the collars of seam {k}", p.piece)))
    }

    /// `eta^-1(u, y)`; `|y| < seam_eps` gives the `b`-side boundary point.
    pub fn from_seam(&self, k: usize, u: &Real, y: &Real, bits: usize) -> Result<TaggedPoint> {
        let s = self.seam(k)?;
        if y.abs().to_f64() >= 1.0 {
            return Err(Error::Domain(format!("seam depth {y} leaves (-1, 1)")));
        }
        if y.abs().to_f64() < self.seam_eps {
            let coords = self.pieces[s.b.piece].boundary_point(&s.b.component, u, bits)?;
            return Ok(TaggedPoint { piece: s.b.piece, coords });
        }
        if y.signum() < 0 {
            let coords = s.collar_b.chart.from_euclid(&[u.clone(), y.neg()], bits)?;
            Ok(TaggedPoint { piece: s.b.piece, coords })
        } else {
            let t = evaluate(&s.alpha_inv, std::slice::from_ref(u), bits)?;
            let coords = s.collar_a.chart.from_euclid(&[t[0].clone(), y.clone()], bits)?;
            Ok(TaggedPoint { piece: s.a.piece, coords })
        }
    }

    /// Distance in the piece model when both points share a piece, otherwise
    /// through a common seam chart; infinite when neither applies.
    pub fn distance(&self, p: &TaggedPoint, q: &TaggedPoint, bits: usize) -> Result<f64> {
        let (p, q) = (self.canonical(p.clone(), bits)?, self.canonical(q.clone(), bits)?);
        if p.piece == q.piece {
            return self.model(&p)?.distance(&p.coords, &q.coords, bits);
        }
        for k in 0..self.seams.len() {
            if let (Ok(a), Ok(b)) = (self.to_seam(k, &p, bits), self.to_seam(k, &q, bits)) {
                let mut du = a[0].sub(&b[0])?.to_f64();
                if let Some(per) = self.seam_period(k)? {
                    du -= per * (du / per).round();
                }
                let dy = a[1].sub(&b[1])?.to_f64();
                return Ok(du.hypot(dy));
            }
        }
        Ok(f64::INFINITY)
    }

    /// Seeded interior samples spread over the pieces, a quarter of them in
    /// seam collars.
    pub fn sample_points(&self, n: usize, seed: u64, bits: usize) -> Vec<TaggedPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let near = !self.seams.is_empty() && i % 4 == 3;
                if near {
                    let k = rng.gen_range(0..self.seams.len());
                    let u = Real::from_f64(rng.gen_range(-3.0..3.0), bits);
                    let y = Real::from_f64(rng.gen_range(0.02..0.3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, bits);
                    if let Ok(p) = self.from_seam(k, &u, &y, bits) {
                        return p;
                    }
                }
                let piece = i % self.pieces.len();
                let v = self.pieces[piece].sample_interior(&mut rng);
                TaggedPoint::from_f64(piece, &v, bits)
            })
            .collect()
    }
}
