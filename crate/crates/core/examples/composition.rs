//! Sequential versus advanced composition of repeated releases.

use reaedp::privacy::{compose_advanced, compose_sequential};
use reaedp::PrivacyParams;

fn main() -> reaedp::Result<()> {
    let eps0 = 0.01;
    for k in [1u64, 10, 100, 1000] {
        let seq = compose_sequential(&vec![PrivacyParams::new(eps0, 0.0)?; k as usize])?;
        let adv = compose_advanced(k, eps0, 0.0, 1e-5)?;
        println!("k {k:>5}: sequential eps {:.4}   advanced eps {:.4} (delta {:.0e})", seq.epsilon, adv.epsilon, adv.delta);
    }
    Ok(())
}
