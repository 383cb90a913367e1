//! Reproducing-formula check for one built-in: energy ratio, density-route energy and
//! L² reconstruction error on the default grids.
//!
//!     cargo run --release --example reproduce -- dilrot2d

use mockrep::systems::{default_setup, ExampleId};
use mockrep::transform::{energy_via_density, reproduction_report};
use std::time::Instant;

fn main() -> mockrep::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "wavelet1d".into());
    let id = ExampleId::parse(&name, None)?;
    let s = default_setup(id)?;
    let t0 = Instant::now();
    let mut rep = reproduction_report(s.sys.as_ref(), &s.f, &s.eta, &s.grid, &s.quad)?;
    println!("{id}: direct route {:.2?}", t0.elapsed());
    if let Some(yg) = &s.ygrid {
        let t1 = Instant::now();
        rep.energy_density = Some(energy_via_density(s.sys.as_ref(), &s.f, &s.eta, &s.grid.h, yg)?);
        println!("density route {:.2?}", t1.elapsed());
    }
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(())
}
