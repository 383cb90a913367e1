//! U_(a,h) f(x) = β(h)^{-1/2} e^{-2πi⟨Φ(x),a⟩} f(h⁻¹.x): homomorphism, the
//! conjugation rule for translations, and unitarity on a quadrature rule.
//!
//!     cargo run --release --example representation

use mockrep::representation::{conjugation_residual, homomorphism_residual, unitarity_residual};
use mockrep::system::sample_group;
use mockrep::systems::{default_setup, ExampleId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mockrep::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for id in ExampleId::all_default() {
        let s = default_setup(id)?;
        let sys = &s.sys;
        let probes: Vec<Vec<f64>> = (0..16).map(|_| mockrep::system::sample_x(sys.as_ref(), &mut rng)).collect();
        let (g1, g2) = (sample_group(sys.as_ref(), &mut rng), sample_group(sys.as_ref(), &mut rng));
        let hom = homomorphism_residual(sys, &g1, &g2, &s.f, &probes)?;
        let conj = conjugation_residual(sys, &g1.a, &g2.h, &s.f, &probes)?;
        let small = mockrep::GroupElement::new(vec![0.3; sys.n()], sys.h_identity());
        let unit = unitarity_residual(sys, &small, &s.f, &s.quad)?;
        println!("{:<20} homomorphism {hom:.1e}  conjugation {conj:.1e}  unitarity {unit:.1e}", sys.id());
    }
    Ok(())
}
