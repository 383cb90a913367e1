//! Structural checks on every built-in, then on a copy of dilrot2d whose Φ has been
//! bent by 0.1·x₁. The bent copy must fail the intertwining check.
//!
//!     cargo run --release --example validate_systems

use mockrep::system::{validate_system, SemidirectSystem};
use mockrep::systems::{build_example, perturbed::PerturbedPhi, ExampleId};

fn main() -> mockrep::Result<()> {
    for id in ExampleId::all_default() {
        let sys = build_example(id)?;
        let rep = validate_system(sys.as_ref(), 200)?;
        println!("{:<22} {}", sys.id(), if rep.passed { "PASS" } else { "FAIL" });
        for c in &rep.checks {
            println!("    {:<16} {:>9.2e}  (threshold {:.1e})", c.tag, c.max_residual, c.threshold);
        }
    }
    let bent = PerturbedPhi::new(build_example(ExampleId::Dilrot2d)?, 0.1);
    let rep = validate_system(&bent, 200)?;
    let phi = rep.check("PHI").expect("PHI check is always run");
    println!("{:<22} {}  PHI residual {:.3e}", bent.id(), if rep.passed { "PASS" } else { "FAIL" }, phi.max_residual);
    Ok(())
}
