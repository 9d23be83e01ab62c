//! `bglue distortion`: word lengths of powers of the central element.

use bglue::heisenberg::{distortion_profile, write_distortion_csv};

use crate::config::DistortionConfig;
use crate::error::CliError;
use crate::output::Output;

pub fn run(d: &DistortionConfig, out: &Output) -> Result<(), CliError> {
    let prof = distortion_profile(d.n_max, d.radius)?;
    let mut buf = Vec::new();
    write_distortion_csv(&prof, &mut buf)?;
    out.write_text("distortion.csv", &String::from_utf8(buf).expect("CSV output is UTF-8"))?;
    if let Some(z) = prof.rows.first() {
        println!("|Z| = {}{}", z.length, if z.exact { "" } else { " (upper bound)" });
    }
    let mut running = f64::INFINITY;
    let mut next_square = 1u64;
    for r in &prof.rows {
        running = running.min(r.ratio);
        if r.m == next_square * next_square {
            println!(
                "m = {:>5} = {next_square}^2: |Z^m| {} {:>4}, min-so-far |Z^m|/m = {running:.6}",
                r.m,
                if r.exact { "=" } else { "<=" },
                r.length
            );
            next_square += 1;
        }
    }
    println!(
        "|Z^(n^2)| <= 4n for n <= {}: {}; min-so-far ratio nonincreasing: {}",
        d.n_max, prof.square_bound_holds, prof.min_ratio_nonincreasing
    );
    Ok(())
}
