//! `bglue scene-dump`: the resolved configuration, the glued surface and the
//! expression trees of the verified maps.

use std::collections::BTreeMap;

use bglue::geometry::{MapExpr, ModelKind};
use bglue::glue::GluedManifold;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;
use crate::scene::Scene;

#[derive(Serialize)]
struct SceneDump<'a> {
    config: &'a RunConfig,
    host: &'a GluedManifold,
    euler_characteristic: i32,
    closed_surface: Option<ModelKind>,
    /// Per-piece expression trees of each verified map.
    maps: BTreeMap<String, Vec<MapExpr>>,
}

pub fn run(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let scene = Scene::build(cfg)?;
    let mut maps = BTreeMap::new();
    for w in scene.verified_words(cfg) {
        maps.insert(w.clone(), scene.map(&w, cfg)?.maps);
    }
    let dump = SceneDump {
        config: cfg,
        host: &scene.host,
        euler_characteristic: scene.host.euler_characteristic(),
        closed_surface: scene.host.surface_type(),
        maps,
    };
    out.write_json("scene.json", &dump)?;
    println!(
        "{} pieces, {} seams, euler characteristic {}, closed surface: {}",
        scene.host.pieces.len(),
        scene.host.seams.len(),
        dump.euler_characteristic,
        dump.closed_surface.map_or("none".to_string(), |k| format!("{k:?}"))
    );
    Ok(())
}
