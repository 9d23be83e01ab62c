//! Builds the glued surface and its maps from a [`RunConfig`].

use bglue::geometry::MapExpr;
use bglue::glue::{glue_maps, smooth_glue, BoundaryGluing, GluedAction, GluedManifold, GluedMap};
use bglue::heisenberg::{ActionTarget, Word};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Scene {
    pub host: GluedManifold,
    pub action: Option<GluedAction>,
    pub bits: usize,
}

impl Scene {
    pub fn build(cfg: &RunConfig) -> Result<Scene, CliError> {
        let bits = cfg.precision_bits;
        let sc = &cfg.scene;
        let models = sc.pieces.iter().map(|p| sc.model(&p.model)).collect::<Result<Vec<_>, _>>()?;
        let host = if models.len() == 1 {
            let none = BoundaryGluing::default();
            GluedManifold::self_glue(models[0].clone(), sc.gluings.first().unwrap_or(&none), bits)?
        } else {
            GluedManifold::chain(models, &sc.gluings, bits)?
        };
        let action = if sc.pieces.iter().all(|p| p.action.is_some()) {
            let targets = sc
                .pieces
                .iter()
                .map(|p| ActionTarget::from_id(p.action.as_deref().unwrap_or_default(), sc.alpha))
                .collect::<Result<Vec<_>, _>>()?;
            Some(GluedAction::new(host.clone(), targets, cfg.stretch.clone(), bits)?)
        } else {
            None
        };
        Ok(Scene { host, action, bits })
    }

    /// The glued map of `word`, or the (smoothed) identity for scenes
    /// without an action.
    pub fn map(&self, word: &str, cfg: &RunConfig) -> Result<GluedMap, CliError> {
        match &self.action {
            Some(a) => {
                let w: Word = word.parse()?;
                Ok(a.element(&w.eval(), self.bits)?)
            }
            None => {
                let ids: Vec<MapExpr> = self.host.pieces.iter().map(|m| MapExpr::identity(m.coord_dim())).collect();
                Ok(match &cfg.stretch {
                    Some(p) => smooth_glue(&ids, &self.host, p, self.bits)?,
                    None => glue_maps(&ids, &self.host, self.bits)?,
                })
            }
        }
    }

    /// Labels of the maps `verify` checks.
    pub fn verified_words(&self, cfg: &RunConfig) -> Vec<String> {
        if self.action.is_some() {
            cfg.verify.generators.clone()
        } else {
            vec!["id".into()]
        }
    }

    pub fn target(&self, piece: usize) -> Option<ActionTarget> {
        self.action.as_ref().map(|a| a.actions[piece].target.clone())
    }
}
