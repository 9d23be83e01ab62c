//! `bglue orbit`: trajectories, an SVG portrait and scene-specific summaries.

use bglue::geometry::ModelKind;
use bglue::glue::{GluedManifold, GluedMap, TaggedPoint};
use bglue::heisenberg::ActionTarget;
use bglue::numeric::{BigScalar, Real};
use bglue::verify::{density_by_word_length, glued_orbit, glued_position, omega_estimate, seam_straddle_defect, OrbitData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Output};
use crate::scene::Scene;
use crate::svg;

fn seeds(cfg: &RunConfig, host: &GluedManifold, bits: usize) -> Result<Vec<TaggedPoint>, CliError> {
    if cfg.orbit.seeds.is_empty() {
        return Ok(host.sample_points(cfg.orbit.random_seeds, cfg.seed, bits));
    }
    cfg.orbit
        .seeds
        .iter()
        .map(|s| {
            let m = host
                .pieces
                .get(s.piece)
                .ok_or_else(|| CliError::Usage(format!("seed on piece {} of a {}-piece scene", s.piece, host.pieces.len())))?;
            if s.coords.len() != m.coord_dim() {
                return Err(CliError::Usage(format!("a {} seed needs {} coordinates", m.name(), m.coord_dim())));
            }
            Ok(TaggedPoint::from_f64(s.piece, &s.coords, bits))
        })
        .collect()
}

/// Grid candidates for the fixed-point search; angles are exact multiples of `pi / (n/2)`.
fn fixed_point_candidates(host: &GluedManifold, n: usize, bits: usize) -> Vec<TaggedPoint> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let pi = BigScalar::pi(bits);
    for (i, m) in host.pieces.iter().enumerate() {
        match m.kind {
            ModelKind::Disk | ModelKind::Annulus => {
                for a in 0..n {
                    let k = a as i64 - (n / 2) as i64;
                    let th = &(&pi * &BigScalar::from_i64(2 * k, bits)) / &BigScalar::from_i64(n as i64, bits);
                    for b in 0..=n {
                        let s = Real::from_f64(b as f64 / n as f64, bits);
                        out.push(TaggedPoint { piece: i, coords: vec![Real::from_big(th.clone()), s] });
                    }
                }
            }
            ModelKind::Torus { alpha } => {
                for a in 0..n {
                    for b in 0..n {
                        let v = [alpha * a as f64 / n as f64, alpha * b as f64 / n as f64];
                        out.push(TaggedPoint::from_f64(i, &v, bits));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

fn write_csv(orbits: &[OrbitData], host: &GluedManifold, bits: usize) -> Result<String, CliError> {
    let dim = orbits.iter().flat_map(|o| o.trajectory.first()).map(Vec::len).max().unwrap_or(2);
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(format!("writing CSV: {e}"));
    let mut header: Vec<String> = ["orbit", "step", "piece", "chart"].map(String::from).to_vec();
    header.extend((0..dim).map(|i| format!("c{i}")));
    header.extend(["px".to_string(), "py".to_string(), "bits".to_string()]);
    w.write_record(&header).map_err(csv_err)?;
    for o in orbits {
        for (step, ((coords, pos), piece)) in o.trajectory.iter().zip(&o.positions).zip(&o.pieces).enumerate() {
            let mut row = vec![o.label.clone(), step.to_string(), piece.to_string(), host.pieces[*piece].name().to_string()];
            row.extend(coords.iter().map(|x| num(*x)));
            row.extend(pos.iter().take(2).map(|x| num(*x)));
            row.push(bits.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("writing CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn run(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let scene = Scene::build(cfg)?;
    let bits = cfg.precision_bits;
    let f: GluedMap = scene.map(&cfg.orbit.word, cfg)?;
    let bases = seeds(cfg, &scene.host, bits)?;
    let labelled: Vec<(usize, TaggedPoint)> = bases.into_iter().enumerate().collect();
    let orbits = cfg
        .seam
        .execution
        .try_map(&labelled, |(i, p)| glued_orbit(&f, p, cfg.orbit.iterates, &format!("orbit{i}"), bits))?;

    for o in &orbits {
        let w = omega_estimate(o)?;
        let pt: Vec<String> = w.point.iter().map(|x| format!("{x:+.6}")).collect();
        println!(
            "{}: {} steps{}, tail mean ({}) diameter {:.3e} [{bits} bits]",
            o.label,
            o.trajectory.len() - 1,
            if o.truncated { " (truncated)" } else { "" },
            pt.join(", "),
            w.residual
        );
    }

    let cands = fixed_point_candidates(&scene.host, cfg.orbit.fixed_point_grid, bits);
    let fixed = f.fixed_points(&cands, 1e-12, bits)?;
    let fixed_pos: Vec<Vec<f64>> = fixed.iter().map(|p| glued_position(&scene.host, p)).collect();
    println!("fixed points on the search grid: {}", fixed.len());

    for k in 0..scene.host.seams.len() {
        let d = seam_straddle_defect(&f, k, 64, 1e-9, bits)?;
        println!("seam {k} straddle defect at depth 1e-9: {d:.6e} [{bits} bits]");
    }

    if let (Some(opts), Some(ActionTarget::Torus { alpha })) = (&cfg.orbit.density, scene.target(0)) {
        let spec = &scene.action.as_ref().expect("a target implies an action").actions[0];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..opts.bases {
            let v = [rng.gen_range(0.0..alpha), rng.gen_range(0.0..alpha)];
            let p = [Real::from_f64(v[0], bits), Real::from_f64(v[1], bits)];
            let d = density_by_word_length(spec, &p, opts.eps, opts.max_len, bits, cfg.seam.execution)?;
            match d.achieved_at {
                Some(l) => println!(
                    "density eps={}: base ({:.6}, {:.6}) dense by word length {l} ({} cells)",
                    opts.eps, v[0], v[1], d.report.cells
                ),
                None => println!(
                    "density eps={}: base ({:.6}, {:.6}) not dense within length {}: {} of {} cells hit",
                    opts.eps, v[0], v[1], opts.max_len, d.report.hit, d.report.cells
                ),
            }
        }
    } else if cfg.orbit.density.is_some() {
        println!("density check skipped: it needs a torus scene with an action");
    }

    out.write_text("orbits.csv", &write_csv(&orbits, &scene.host, bits)?)?;
    out.write_text("orbits.svg", &svg::portrait(&scene.host, &orbits, &fixed_pos, &cfg.orbit.svg))?;
    Ok(())
}
