//! Private mean of a path ensemble through a truncated Wiener basis.

use reaedp::mechanisms::rng_from_seed;
use reaedp::rkhs::{default_clip_bound, l2_gap, private_mean, simulate_chi_square_process, RkhsParams, WienerBasis};
use reaedp::PrivacyParams;

fn main() -> reaedp::Result<()> {
    let mut rng = rng_from_seed(5);
    let ensemble = simulate_chi_square_process(50, 80, &mut rng)?;
    let basis = WienerBasis::new(WienerBasis::default_order(80), ensemble.grid())?;
    let clip = default_clip_bound(&ensemble);
    let mean = ensemble.mean_path();
    for rho in [1e-6, 1e-3, 0.1, 1.0] {
        let p = RkhsParams::new(rho, PrivacyParams::new(1.0, 1e-5)?, clip)?;
        let released = private_mean(&ensemble, &p, &basis, &mut rng)?;
        println!("rho {rho:<6} L2 gap to the empirical mean {:.4e}", l2_gap(&released.path, &mean, ensemble.grid())?);
    }
    Ok(())
}
