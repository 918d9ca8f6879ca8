//! Linkage game: which of two neighbouring histograms produced a release?

use reaedp::attacks::{linkage_attack, LinkageGuess};
use reaedp::experiments::data::multinomial_histogram;
use reaedp::experiments::sweeps::{linkage_neighbour, linkage_table};
use reaedp::mechanisms::release_laplace;

fn main() -> reaedp::Result<()> {
    let d = multinomial_histogram(1000, 30, 4)?;
    let d_prime = linkage_neighbour(&d)?;

    let r = release_laplace(&d_prime, 1e9, 1)?;
    assert_eq!(linkage_attack(&r.released, &d, &d_prime)?, LinkageGuess::DPrime);

    for row in linkage_table(&d, &[1e-3, 0.1, 1.0, 10.0, 1e9], 1000, 42)? {
        println!("eps {:<8} accuracy {:.3}", row.get_param("epsilon").unwrap_or("?"), row.get_metric("accuracy").unwrap_or(f64::NAN));
    }
    Ok(())
}
