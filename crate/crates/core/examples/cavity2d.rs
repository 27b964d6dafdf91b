//! Solidifying cavity: mushy vs pure-metal viscosity, side by side.
//!
//! cargo run --release --example cavity2d -- [nx] [n_steps] [snap_every] [dt]
//!
//! Set CAVITY_TRACE=1 for progress lines on stderr.

use std::time::Instant;

use solidrom::grid_field::StaggeredGrid2D;
use solidrom::pod::{component_split, decompose, modes_for_energy, SvdMethod};
use solidrom::solidify2d::{cfl_number, run_case_with, SimConfig, ViscosityKind};

fn main() -> solidrom::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize| args.get(i).map(|s| s.as_str());
    let mut base = SimConfig::desk_default(ViscosityKind::Mushy);
    if let Some(n) = arg(0) {
        let n = n.parse().expect("nx");
        base.grid = StaggeredGrid2D::unit_square(n)?;
    }
    if let Some(s) = arg(1) {
        base.n_steps = s.parse().expect("n_steps");
    }
    if let Some(s) = arg(2) {
        base.snap_every = s.parse().expect("snap_every");
    }
    if let Some(s) = arg(3) {
        base.dt = s.parse().expect("dt");
    }

    let runs: Vec<_> = std::thread::scope(|s| {
        [ViscosityKind::Mushy, ViscosityKind::SharpJump]
            .map(|kind| {
                let mut cfg = base.clone();
                cfg.viscosity.kind = kind;
                s.spawn(move || {
                    let start = Instant::now();
                    let mut peak_cfl: f64 = 0.0;
                    let mut solid = 0.0;
                    let m = run_case_with(&cfg, |idx, sim| {
                        let st = sim.state();
                        peak_cfl = peak_cfl.max(cfl_number(&cfg.grid, &st.u, &st.v, cfg.dt));
                        let t_freeze = cfg.viscosity.t_freeze;
                        solid = st.temp.iter().filter(|&&t| t < t_freeze).count() as f64
                            / st.temp.len() as f64;
                        if std::env::var_os("CAVITY_TRACE").is_some() && idx % 25 == 0 {
                            eprintln!(
                                "{kind} t {:.2} max speed {:.3} solid {solid:.3}",
                                st.time,
                                st.max_speed()
                            );
                        }
                    })?;
                    Ok::<_, solidrom::Error>((kind, m, start.elapsed(), peak_cfl, solid))
                })
            })
            .map(|h| h.join().expect("run panicked"))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;

    for (kind, m, elapsed, peak_cfl, solid) in &runs {
        println!(
            "{kind}: {} snapshots in {:.1?}, peak CFL {peak_cfl:.3}, solid fraction {solid:.3}",
            m.n_snaps(),
            elapsed
        );
        for thr in [0.99, 0.999, 0.9999] {
            let all = modes_for_energy(decompose(m, SvdMethod::Auto)?.spectrum(), thr)?;
            let mut line = format!("  {thr}: combined {}", all.modes_needed);
            for (name, sub) in component_split(m)? {
                let r = modes_for_energy(decompose(&sub, SvdMethod::Auto)?.spectrum(), thr)?;
                line += &format!(", {name} {}", r.modes_needed);
            }
            println!("{line}");
        }
    }
    Ok(())
}
