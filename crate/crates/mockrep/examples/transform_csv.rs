//! Voice-transform coefficients ⟨f, U_(a,h) η⟩ for the 1D wavelet example on its
//! default grid, written as CSV (a_1, h_1, re, im, weight).
//!
//!     cargo run --release --example transform_csv -- coeffs.csv

use mockrep::systems::{default_setup, ExampleId};
use mockrep::transform::analyze;
use std::fs::File;
use std::io::BufWriter;

fn main() -> mockrep::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "wavelet1d_coefficients.csv".into());
    let s = default_setup(ExampleId::Wavelet1d)?;
    let c = analyze(s.sys.as_ref(), &s.f, &s.eta, &s.grid, &s.quad)?;
    c.write_csv(s.sys.as_ref(), BufWriter::new(File::create(&path)?))?;
    let norm = s.quad.norm_sq(&s.f);
    println!("{} coefficients -> {path}", c.values.len());
    println!("grid: a {} | h {}", s.grid.a.desc, s.grid.h.desc);
    println!("energy {:.8}, |f|^2 {:.8}, ratio {:.6}", c.energy(s.sys.as_ref()), norm, c.energy(s.sys.as_ref()) / norm);
    Ok(())
}
