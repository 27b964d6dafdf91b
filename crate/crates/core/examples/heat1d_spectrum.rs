//! Heat equation snapshots and their rapidly decaying singular values.
//!
//! cargo run --release --example heat1d_spectrum

use solidrom::analysis::{fit_decay, DecayModel};
use solidrom::cases1d::{solve_heat1d, Heat1DConfig};
use solidrom::pod::{decompose, modes_for_energy, SvdMethod};

fn main() -> solidrom::Result<()> {
    let cfg = Heat1DConfig::default();
    println!("{cfg}\n");
    let m = solve_heat1d(&cfg)?;
    let basis = decompose(&m, SvdMethod::Auto)?;
    let spectrum = basis.spectrum();
    let norm = spectrum.normalized()?;

    println!("{:>5} {:>12}", "n", "sigma/sigma1");
    for n in [1, 2, 3, 5, 10, 15, 20, 30, 40] {
        println!("{n:>5} {:>12.3e}", norm[n - 1]);
    }
    for thr in [0.99, 0.999, 0.9999] {
        println!(
            "modes for {thr}: {}",
            modes_for_energy(spectrum, thr)?.modes_needed
        );
    }
    let fit = fit_decay(spectrum, DecayModel::Semilog, (1, 20))?;
    println!("semilog slope over [1, 20]: {:.3}", fit.slope);

    // the leading mode is smooth and single-signed, like the decayed solution
    let mode = basis.modes().column(0);
    let negative = mode.iter().filter(|&&x| x < -1e-12).count();
    println!("first mode: {negative} negative entries of {}", mode.len());
    Ok(())
}
