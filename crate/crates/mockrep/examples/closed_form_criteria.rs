//! The per-example admissibility integrals for each example's own analysing vector,
//! and what happens to them when η is scaled by 1/2 or replaced by zero.
//!
//!     cargo run --release --example closed_form_criteria

use mockrep::admissibility::{example_criterion, explicit_repr, zero_repr, EtaRepr};
use mockrep::systems::ExampleId;
use std::sync::Arc;

fn halve(r: EtaRepr) -> EtaRepr {
    match r {
        EtaRepr::Spatial(f) => EtaRepr::Spatial(f.scaled(0.5)),
        EtaRepr::AngularFourier { coeff, modes } => EtaRepr::AngularFourier { coeff: Arc::new(move |t, n| coeff(t, n) * 0.5), modes },
        EtaRepr::PartialFourier { hat, omegas } => EtaRepr::PartialFourier { hat: Arc::new(move |y, w| hat(y, w) * 0.5), omegas },
    }
}

fn main() -> mockrep::Result<()> {
    for id in [ExampleId::Wavelet1d, ExampleId::Shearlet { gamma: 0.5 }, ExampleId::Dilrot2d, ExampleId::Transdil2d] {
        let rep = example_criterion(id, &explicit_repr(id)?)?;
        println!("{id}  [{}]  satisfied: {}", rep.representation, rep.satisfied);
        for e in &rep.criterion {
            println!("    {:<12} {:.15}  target {:.15}", e.name, e.value, e.target);
        }
        let half = example_criterion(id, &halve(explicit_repr(id)?))?;
        let zero = example_criterion(id, &zero_repr(id)?)?;
        println!("    eta/2 first integral {:.6}, zero eta satisfied: {}", half.criterion[0].value, zero.satisfied);
    }
    Ok(())
}
