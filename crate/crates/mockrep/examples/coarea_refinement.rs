//! Coarea identity for dilrot2d with f = e^{-|x|²}: the fiber disintegration
//! ∫_Y ∫ f dν_y dy against π, as the Y rule and the fiber resolution are doubled.
//!
//!     cargo run --release --example coarea_refinement

use mockrep::coarea::{coarea_residual, fiber_quadrature};
use mockrep::quadrature::{Rule1d, TensorRule};
use mockrep::systems::{build_example, ExampleId};
use mockrep::transform::YGrid;
use mockrep::Field;
use std::f64::consts::PI;

fn main() -> mockrep::Result<()> {
    let sys = build_example(ExampleId::Dilrot2d)?;
    let f = Field::real("exp(-|x|^2)", |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    let xrule = TensorRule::new(vec![Rule1d::gauss(256, -7.0, 7.0), Rule1d::gauss(256, -7.0, 7.0)]);

    // the fiber over y is the circle |x|² = y with total mass π
    let fib = fiber_quadrature(sys.as_ref(), &[2.0], 64)?;
    println!("fiber over y=2: {} nodes, mass {:.15} (pi = {PI:.15})", fib.len(), fib.mass());

    println!("{:>8} {:>8} {:>22} {:>22} {:>10}", "y nodes", "angles", "X side", "Y side", "|Y - pi|");
    for k in 0..7 {
        let (ny, na) = (8usize << k, 4usize << k);
        let yg = YGrid::tensor(&TensorRule::new(vec![Rule1d::gauss(ny, 0.0, 49.0)]), na, None, "GL on [0,49]");
        let r = coarea_residual(sys.as_ref(), &f, &xrule, &yg)?;
        println!("{ny:>8} {na:>8} {:>22.16} {:>22.16} {:>10.2e}", r.lhs, r.rhs, (r.rhs - PI).abs());
    }
    Ok(())
}
