//! The run configuration: one JSON document, unknown keys rejected.

use std::path::{Path, PathBuf};

use bglue::geometry::{ManifoldModel, MapExpr};
use bglue::glue::BoundaryGluing;
use bglue::heisenberg::default_alpha;
use bglue::stretch::ChiProfile;
use bglue::verify::{DecayConfig, SeamCheckConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    /// `disk`, `annulus`, `sphere`, `torus`, `plane` or `cylinder`.
    pub model: String,
    /// Action target id for this piece, e.g. `disk_blowup` or `torus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub pieces: Vec<PieceConfig>,
    /// With one piece, at most one self-gluing; with `n` pieces, `n - 1`
    /// gluings joining consecutive pieces.
    #[serde(default)]
    pub gluings: Vec<BoundaryGluing>,
    /// Rotation number of the torus, cylinder and sphere quotients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            pieces: vec![
                PieceConfig { model: "disk".into(), action: Some("disk_blowup".into()) },
                PieceConfig { model: "annulus".into(), action: Some("annulus_blowup".into()) },
            ],
            gluings: vec![BoundaryGluing::identity(&[("minus", "minus")])],
            alpha: None,
        }
    }
}

impl SceneConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(default_alpha)
    }

    pub fn model(&self, id: &str) -> Result<ManifoldModel, CliError> {
        Ok(match id {
            "disk" => ManifoldModel::disk(),
            "annulus" => ManifoldModel::annulus(),
            "sphere" => ManifoldModel::sphere(),
            "torus" => ManifoldModel::torus(self.alpha()),
            "plane" => ManifoldModel::plane(),
            "cylinder" => ManifoldModel::cylinder(self.alpha()),
            other => return Err(CliError::Usage(format!("unknown model {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Every order up to this one must pass at every seam point.
    pub orders: usize,
    /// Words to check; ignored for scenes without an action, which check the identity.
    pub generators: Vec<String>,
    /// Seam parameters at which the one-sided derivatives are compared.
    pub seam_points: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { orders: 3, generators: vec!["X".into(), "Y".into()], seam_points: vec![0.0, 1.3] }
    }
}

/// A collar germ whose flat defect is measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayCheck {
    pub germ: MapExpr,
    #[serde(default)]
    pub config: DecayConfig,
    /// The fitted slope of `ln G_y` against `ln y` must reach this.
    #[serde(default = "default_min_slope")]
    pub min_slope: f64,
    /// Also check the sandwich bounds for this `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sandwich_a: Option<f64>,
}

fn default_min_slope() -> f64 {
    8.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedPoint {
    #[serde(default)]
    pub piece: usize,
    pub coords: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityOptions {
    pub eps: f64,
    pub max_len: usize,
    /// Random base points, drawn with the run seed.
    pub bases: usize,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions { eps: 0.05, max_len: 200, bases: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvgStyle {
    pub size: u32,
    pub background: String,
    pub boundary: String,
    pub seam: String,
    pub equator: String,
    pub fixed_points: String,
    /// Orbit colors, cycled.
    pub orbits: Vec<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 640,
            background: "#ffffff".into(),
            boundary: "#1b1b1b".into(),
            seam: "#7a7a7a".into(),
            equator: "#b0b0b0".into(),
            fixed_points: "#c0392b".into(),
            orbits: ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"]
                .map(String::from)
                .to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    /// The word whose orbits are drawn.
    pub word: String,
    /// Explicit seeds; when empty, `random_seeds` points are sampled.
    pub seeds: Vec<SeedPoint>,
    pub random_seeds: usize,
    pub iterates: usize,
    /// Side of the grid searched for fixed points on each piece; 0 disables the search.
    pub fixed_point_grid: usize,
    /// Word-length density check, for torus scenes.
    pub density: Option<DensityOptions>,
    pub svg: SvgStyle,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            word: "Y".into(),
            seeds: Vec::new(),
            random_seeds: 12,
            iterates: 400,
            fixed_point_grid: 24,
            density: None,
            svg: SvgStyle::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistortionConfig {
    pub n_max: u64,
    pub radius: usize,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        DistortionConfig { n_max: 8, radius: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scene: SceneConfig,
    /// Smoothing profile; absent means the plain gluing.
    pub stretch: Option<ChiProfile>,
    pub precision_bits: usize,
    /// Worker threads; `BGLUE_THREADS` takes precedence.
    pub threads: Option<usize>,
    pub seed: u64,
    pub seam: SeamCheckConfig,
    pub verify: VerifyConfig,
    pub decay: Option<DecayCheck>,
    pub orbit: OrbitConfig,
    pub distortion: DistortionConfig,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scene: SceneConfig::default(),
            stretch: Some(ChiProfile::default()),
            precision_bits: 256,
            threads: None,
            seed: 1,
            seam: SeamCheckConfig::default(),
            verify: VerifyConfig::default(),
            decay: None,
            orbit: OrbitConfig::default(),
            distortion: DistortionConfig::default(),
            out_dir: PathBuf::from("bglue-out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(64..=4096).contains(&self.precision_bits) {
            return usage(format!("precision_bits must lie in [64, 4096], got {}", self.precision_bits));
        }
        if self.scene.pieces.is_empty() {
            return usage("the scene has no pieces".into());
        }
        let n = self.scene.pieces.len();
        if n > 1 && self.scene.gluings.len() != n - 1 {
            return usage(format!("{n} pieces need {} gluings, got {}", n - 1, self.scene.gluings.len()));
        }
        if n == 1 && self.scene.gluings.len() > 1 {
            return usage("a single piece takes at most one self-gluing".into());
        }
        let with_action = self.scene.pieces.iter().filter(|p| p.action.is_some()).count();
        if with_action != 0 && with_action != n {
            return usage("either every piece carries an action or none does".into());
        }
        if self.verify.orders == 0 {
            return usage("verify.orders must be at least 1".into());
        }
        if self.threads == Some(0) {
            return usage("threads must be positive".into());
        }
        if self.orbit.iterates == 0 {
            return usage("orbit.iterates must be positive".into());
        }
        if let Some(p) = &self.stretch {
            p.validate().map_err(|e| CliError::Usage(format!("stretch: {e}")))?;
        }
        self.seam.validate().map_err(|e| CliError::Usage(format!("seam: {e}")))?;
        if let Some(d) = &self.decay {
            d.config.validate().map_err(|e| CliError::Usage(format!("decay: {e}")))?;
        }
        Ok(())
    }
}
