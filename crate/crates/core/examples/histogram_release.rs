//! All four histogram release mechanisms on one seeded histogram.

use reaedp::experiments::data::multinomial_histogram;
use reaedp::mechanisms::utility_metrics;
use reaedp::{release, shannon_entropy, shannon_sensitivity_bound, MechanismKind, PrivacyParams};

fn main() -> reaedp::Result<()> {
    let hist = multinomial_histogram(1000, 20, 7)?;
    println!("H = {:.4} bits, bound = {:.5}", shannon_entropy(&hist)?, shannon_sensitivity_bound(hist.total())?);
    for eps in [0.5, 1.0, 4.0] {
        for kind in MechanismKind::ALL {
            let delta = if kind.needs_delta() { 1e-5 } else { 0.0 };
            let r = release(&hist, kind, PrivacyParams::new(eps, delta)?, 11)?;
            let u = utility_metrics(&hist, &r.released)?;
            println!("eps {eps:<4} {kind:<19} entropy error {:.5}  count MAE {:.3}", u.entropy_error, u.count_mae);
        }
    }
    Ok(())
}
