//! The Schrödinger-type example has n = 2 > d = 1, so no vector is admissible.
//! The central variable only multiplies coefficients by a phase, and the energy
//! over t ∈ [0, T] grows linearly in T.
//!
//!     cargo run --release --example heisenberg_divergence

use mockrep::cli::heisenberg_divergence;
use mockrep::systems::{default_setup, heisenberg, ExampleId};
use mockrep::transform::{analyze, GroupGrid};

fn main() -> mockrep::Result<()> {
    let s = default_setup(ExampleId::Heisenberg)?;
    let d = heisenberg_divergence(&s, &[1.0, 2.0, 4.0, 8.0, 16.0])?;
    for (t, e) in d.truncations.iter().zip(&d.energies) {
        println!("T = {t:>4}: energy {e:.8}  (|f|^2 = {:.8})", d.norm_f * d.norm_f);
    }
    println!("slope {:.8}, intercept {:.2e}, R^2 {:.12}", d.slope, d.intercept, d.r_squared);

    let g = GroupGrid::new(heisenberg::agrid(2.0), s.grid.h.clone());
    let c = analyze(s.sys.as_ref(), &s.f, &s.eta, &g, &s.quad)?;
    let nt = g.a.axes[1].len();
    let spread = c.values.chunks(nt).map(|b| b.iter().map(|v| (v.norm() - b[0].norm()).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    println!("largest change of |c| along t: {spread:.2e}");
    Ok(())
}
