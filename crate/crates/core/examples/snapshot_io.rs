//! Multi-field snapshot matrices: assemble, save, reload, split by field.
//!
//! cargo run --example snapshot_io

use solidrom::grid_field::{assemble, decode, encode, FieldLayout};
use solidrom::pod::{component_split, decompose, spectrum_csv, SvdMethod};

fn main() -> solidrom::Result<()> {
    let layout = FieldLayout::from_sizes([("a", 40), ("b", 10)])?;
    let times: Vec<f64> = (0..12).map(|j| j as f64 * 0.1).collect();
    let columns: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| {
            let a = (0..40).map(|i| (i as f64 * 0.2 - t).sin());
            let b = (0..10).map(|i| (-t * i as f64).exp());
            a.chain(b).collect()
        })
        .collect();
    let m = assemble(&columns, layout, &times)?;

    let bytes = encode(&m)?;
    let back = decode(&bytes)?;
    assert_eq!(back.data(), m.data());
    println!(
        "{} x {} matrix, {} bytes on disk",
        m.n_dof(),
        m.n_snaps(),
        bytes.len()
    );

    for (name, part) in component_split(&back)? {
        let s = decompose(&part, SvdMethod::Auto)?;
        println!("field {name}:");
        print!("{}", spectrum_csv(s.spectrum()));
    }

    let mut corrupt = bytes.clone();
    corrupt.truncate(bytes.len() - 5);
    match decode(&corrupt) {
        Err(e) => println!("truncated copy rejected: {e}"),
        Ok(_) => unreachable!("truncated file must not decode"),
    }
    Ok(())
}
