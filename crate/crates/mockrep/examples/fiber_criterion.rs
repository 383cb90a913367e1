//! The fiber form of the admissibility condition: on Φ⁻¹(y),
//! ∫_H |⟨u, η^h⟩|² dh/(αβ) = ‖u‖² for every test vector u, and the same at a
//! transported base point h₀[y].
//!
//!     cargo run --release --example fiber_criterion

use mockrep::admissibility::{fiber_criterion_residual, fiber_criterion_transported};
use mockrep::systems::{build_example, criterion_setup, named_eta, ExampleId};
use mockrep::Field;

fn main() -> mockrep::Result<()> {
    for id in [ExampleId::Wavelet1d, ExampleId::Shearlet { gamma: 0.5 }, ExampleId::Dilrot2d, ExampleId::Transdil2d] {
        let sys = build_example(id)?;
        let cs = criterion_setup(id)?;
        let eta = named_eta(id, "explicit")?;
        let base = fiber_criterion_residual(sys.as_ref(), &eta, &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius)?;
        let moved = fiber_criterion_transported(&sys, &eta, &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius, &cs.transport)?;
        let zero = fiber_criterion_residual(sys.as_ref(), &Field::zero(), &cs.y, &cs.tests, &cs.hgrid, cs.resolution, cs.radius)?;
        println!("{id}: y = {:?}, {} H nodes, {} fiber nodes", cs.y, base.h_nodes, base.fiber_nodes);
        println!("    residuals {:?}", base.residuals.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>());
        println!("    max {:.2e}, at h0[y] {:.2e}, with eta = 0 {:.2}", base.max_residual, moved.max_residual, zero.max_residual);
    }
    Ok(())
}
