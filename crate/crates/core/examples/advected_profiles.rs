//! Transported jump and sigmoid fronts: slow decay, ordered by steepness.
//!
//! cargo run --release --example advected_profiles -- [k ...]

use solidrom::analysis::{compare, DEFAULT_FIT_RANGE};
use solidrom::cases1d::{gen_advected_jump, gen_sigmoid, SIGMOID_STEEP, SIGMOID_STRETCHED};
use solidrom::grid_field::Grid1D;
use solidrom::pod::{decompose, SvdMethod};

fn main() -> solidrom::Result<()> {
    let grid = Grid1D::unit(256)?;
    let mut ks: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("steepness must be a number"))
        .collect();
    if ks.is_empty() {
        ks = vec![SIGMOID_STRETCHED, SIGMOID_STEEP, 400.0];
    }

    let mut spectra = vec![(
        "jump".to_string(),
        decompose(&gen_advected_jump(&grid, 128)?, SvdMethod::Auto)?
            .spectrum()
            .clone(),
    )];
    for k in ks {
        let m = gen_sigmoid(&grid, 128, k)?;
        spectra.push((
            format!("sigmoid_k{k}"),
            decompose(&m, SvdMethod::Auto)?.spectrum().clone(),
        ));
    }

    let thresholds = [0.99, 0.999, 0.9999];
    let report = compare(&spectra, &thresholds, DEFAULT_FIT_RANGE)?;
    println!(
        "{:<16} {:>6} {:>6} {:>6} {:>14}",
        "case", "0.99", "0.999", "0.9999", "loglog slope"
    );
    for c in &report.cases {
        let counts: Vec<String> = thresholds
            .iter()
            .map(|&t| c.modes_at(t).map_or("-".into(), |n| n.to_string()))
            .collect();
        let slope = c.loglog.as_ref().map_or(f64::NAN, |f| f.slope);
        println!(
            "{:<16} {:>6} {:>6} {:>6} {:>14.3}",
            c.name, counts[0], counts[1], counts[2], slope
        );
    }
    Ok(())
}
