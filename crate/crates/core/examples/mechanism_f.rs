//! Synthetic records from mechanism F on a line universe.

use reaedp::experiments::data::clustered_records;
use reaedp::mechanism_f::{derived_privacy, FParams, GenerationOutcome, MechanismF, Universe};
use reaedp::mechanisms::rng_from_seed;

fn main() -> reaedp::Result<()> {
    let universe = Universe::line(30)?;
    let records = clustered_records(200, 30, 1);
    let params = FParams::new(20, 2, 2.0, 0.1).with_tau(3.0);
    let dp = derived_privacy(&params)?;
    println!("k={} t={} gamma={} eps0={}: ({:.4}, {:.3e})-DP", params.k, params.t, params.gamma, params.eps0, dp.epsilon, dp.delta);

    let mech = MechanismF::checked(&records, params, &universe)?;
    let mut rng = rng_from_seed(2);
    let mut synthetic = Vec::new();
    for _ in 0..20 {
        match mech.generate(&mut rng) {
            GenerationOutcome::Accepted(y) => synthetic.push(y),
            GenerationOutcome::Exhausted(n) => println!("gave up after {n} attempts"),
        }
    }
    println!("synthetic records: {synthetic:?}");
    println!("single-attempt pass rate: {:.3}", mech.pass_rate(10_000, &mut rng));
    Ok(())
}
