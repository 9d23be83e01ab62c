//! `bglue verify`: seam smoothness of the scene's maps, and optionally the
//! flat decay of a collar germ.

use bglue::verify::{
    measure_flatness, sandwich_check, verify_cr_at_seam, DecayReport, SandwichReport, SeamCheckConfig,
    SmoothnessReport,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;
use crate::scene::Scene;

#[derive(Serialize)]
struct SeamCheck {
    map: String,
    pass: bool,
    report: SmoothnessReport,
}

#[derive(Serialize)]
struct SmoothnessSummary {
    precision_bits: usize,
    smoothed: bool,
    required_order: usize,
    seams: usize,
    pass: bool,
    checks: Vec<SeamCheck>,
}

#[derive(Serialize)]
struct DecaySummary {
    precision_bits: usize,
    min_slope: f64,
    pass: bool,
    report: DecayReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sandwich: Option<SandwichReport>,
}

/// Runs every check; `Ok(true)` iff all of them pass.
pub fn run(cfg: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let scene = Scene::build(cfg)?;
    let bits = cfg.precision_bits;
    let seam_cfg = SeamCheckConfig { max_order: cfg.verify.orders, ..cfg.seam.clone() };
    let mut checks = Vec::new();
    for word in scene.verified_words(cfg) {
        let f = scene.map(&word, cfg)?;
        for k in 0..scene.host.seams.len() {
            for &u in &cfg.verify.seam_points {
                let report = verify_cr_at_seam(&f, k, u, &seam_cfg, bits)?;
                let pass = report.passes_through(cfg.verify.orders);
                let worst = report.orders.iter().map(|o| o.mismatch).fold(0.0f64, f64::max);
                println!(
                    "seam {k} u={u:+.6} {word}: orders 1..={} {} (max mismatch {worst:.6e}) [{bits} bits]",
                    cfg.verify.orders,
                    if pass { "pass" } else { "FAIL" },
                );
                for o in report.orders.iter().filter(|o| o.verdict != bglue::verify::Verdict::Pass) {
                    println!("    order {}: {:?}, mismatch {:.6e}, tol {:.3e}", o.order, o.verdict, o.mismatch, o.tol);
                }
                checks.push(SeamCheck { map: word.clone(), pass, report });
            }
        }
    }
    if scene.host.seams.is_empty() {
        println!("scene has no seams; nothing to check across");
    }
    let seams_pass = checks.iter().all(|c| c.pass);
    let summary = SmoothnessSummary {
        precision_bits: bits,
        smoothed: cfg.stretch.is_some(),
        required_order: cfg.verify.orders,
        seams: scene.host.seams.len(),
        pass: seams_pass,
        checks,
    };
    out.write_json("smoothness.json", &summary)?;

    let mut decay_pass = true;
    if let Some(d) = &cfg.decay {
        let report = measure_flatness(&d.germ, &d.config, bits)?;
        let slope = report.slope_fit.as_ref().map(|f| f.slope);
        let mut pass = slope.is_some_and(|s| s >= d.min_slope);
        println!(
            "decay: slope {} (need >= {}), constant {} [{bits} bits]",
            slope.map_or("n/a".into(), |s| format!("{s:.6}")),
            d.min_slope,
            report.constant_fit.map_or("n/a".into(), |c| format!("{c:.6}")),
        );
        for w in &report.warnings {
            println!("    warning: {w}");
        }
        let sandwich = match d.sandwich_a {
            Some(a) => {
                let s = sandwich_check(&d.germ, a, &d.config, bits)?;
                println!("sandwich a={a}: {} of {} grid points out of bounds", s.violations.len(), s.points);
                pass &= s.pass;
                Some(s)
            }
            None => None,
        };
        out.write_json("decay.json", &DecaySummary { precision_bits: bits, min_slope: d.min_slope, pass, report, sandwich })?;
        decay_pass = pass;
    }
    let pass = seams_pass && decay_pass;
    println!("verify: {}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}
