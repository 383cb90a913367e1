//! Orbit data of the built-ins: stabilizer volumes, the Weil disintegration of
//! the Haar measure of H, and the Mackey decomposition of Lebesgue measure on Y.
//!
//!     cargo run --release --example orbits_weil

use mockrep::orbit::{mackey_residual, section_consistency, stabilizer_volume, weil_residual, StabilizerVolume};
use mockrep::systems::{build_example, ExampleId};

fn main() -> mockrep::Result<()> {
    // dilrot2d: rotations with dθ/4π, so vol = 1/2
    let dr = build_example(ExampleId::Dilrot2d)?;
    let probe = |y: &[f64]| (-y[0].ln().powi(2)).exp();
    match stabilizer_volume(dr.as_ref(), 0, &probe)? {
        StabilizerVolume::Finite { volume } => println!("dilrot2d   stabilizer volume {volume:.12}"),
        other => println!("dilrot2d   unexpected {other:?}"),
    }
    let w = weil_residual(dr.as_ref(), 0, &|h: &[f64]| (-h[0].ln().powi(2)).exp() * (1.0 + 0.5 * h[1].cos()))?;
    println!("dilrot2d   Weil  lhs {:.12} rhs {:.12}", w.lhs, w.rhs);

    // transdil2d: stabilizer {(1, b)} is a copy of ℝ; the truncated integral grows with the cut
    let td = build_example(ExampleId::Transdil2d)?;
    match stabilizer_volume(td.as_ref(), 0, &|y: &[f64]| (-y[0].abs().ln().powi(2)).exp())? {
        StabilizerVolume::Infinite { growth } => {
            for (b, v) in growth {
                println!("transdil2d |b| <= {b:>4}: {v:.6}");
            }
        }
        other => println!("transdil2d unexpected {other:?}"),
    }
    let m = mackey_residual(td.as_ref(), &|y: &[f64]| (-y[0] * y[0]).exp())?;
    println!("transdil2d Mackey lhs {:.12} rhs {:.12}", m.lhs, m.rhs);

    // shearlet: trivial stabilizer carrying a point mass
    let id = ExampleId::Shearlet { gamma: 0.5 };
    let sh = build_example(id)?;
    let w = weil_residual(sh.as_ref(), 0, &|h: &[f64]| (-h[0] * h[0] - h[1].ln().powi(2)).exp())?;
    println!("shearlet   Weil  lhs {:.12} rhs {:.12} residual {:.1e}", w.lhs, w.rhs, w.residual);
    let sc = section_consistency(sh.as_ref(), 500, 1)?;
    println!("shearlet   section residual {:.1e}, label mismatches {}", sc.max_section_residual, sc.label_mismatches);
    Ok(())
}
