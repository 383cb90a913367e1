//! Structural verdicts for the five built-ins. transdil2d has noncompact
//! stabilizers, so its verdict is settled by checking its explicit vector.
//!
//!     cargo run --release --example classify_all

use mockrep::admissibility::{classify_example, finiteness_check};
use mockrep::systems::{build_example, ExampleId};

fn main() -> mockrep::Result<()> {
    for id in ExampleId::all_default() {
        let sys = build_example(id)?;
        let v = classify_example(id, sys.as_ref(), 2000)?;
        println!("{}", serde_json::to_string(&v)?);
        if let Ok(fc) = finiteness_check(sys.as_ref(), 0) {
            println!("    finite fiber {}, compact stabilizer {}, consistent {}", fc.fiber_finite, fc.stabilizer_compact, fc.consistent);
        }
    }
    Ok(())
}
