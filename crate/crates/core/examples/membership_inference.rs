//! Membership inference against Laplace histogram releases.

use reaedp::attacks::{mia_curve, MiaConfig};
use reaedp::experiments::data::uniform_fixture;
use reaedp::{build_histogram, BinSpec};

fn main() -> reaedp::Result<()> {
    let base = build_histogram(&uniform_fixture(200, 9), BinSpec::new(0.0, 1.0, 30)?)?;
    let cfg = MiaConfig { repeats: 3, ..MiaConfig::default() };
    for (rep, _) in mia_curve(&base, 0.5, &[0.01, 0.5, 2.0, 1e9], &cfg, 42)? {
        println!(
            "eps {:<6} accuracy {:.3}  AUC {:.3} [{:.3}, {:.3}]",
            rep.epsilon, rep.accuracy_mean, rep.auc_mean, rep.auc_ci95.0, rep.auc_ci95.1
        );
    }
    Ok(())
}
