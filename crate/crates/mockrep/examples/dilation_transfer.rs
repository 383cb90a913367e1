//! For a homogeneous Φ of degree p and a linear action, x ↦ δ^{(np−d)/2} η(x/δ)
//! is admissible whenever η is. Checked on the shearlet energy ratio.
//!
//!     cargo run --release --example dilation_transfer

use mockrep::admissibility::dilation_transfer;
use mockrep::systems::{default_setup, ExampleId};
use mockrep::transform::energy_direct;

fn main() -> mockrep::Result<()> {
    let s = default_setup(ExampleId::Shearlet { gamma: 0.5 })?;
    let sys = s.sys.as_ref();
    let norm = s.quad.norm_sq(&s.f);
    for delta in [1.0, 0.5, 2.0] {
        let eta = dilation_transfer(sys, &s.eta, delta)?;
        let probe = [0.9 * delta, 0.3 * delta];
        let factor = eta.eval(&probe).re / s.eta.eval(&[0.9, 0.3]).re;
        let e = energy_direct(sys, &s.f, &eta, &s.grid, &s.quad)?;
        println!("delta {delta:>4}: prefactor {factor:.6}, energy ratio {:.6}", e / norm);
    }
    Ok(())
}
