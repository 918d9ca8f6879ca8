//! Exact output distribution and (epsilon, delta) audit for a tiny instance.

use reaedp::mechanism_f::{exact_output_distribution, mc_dp_audit, FParams, Universe};

fn main() -> reaedp::Result<()> {
    let universe = Universe::line(5)?;
    let d = [0, 1, 1, 2, 3, 4];
    let p = FParams::new(4, 2, 2.0, 0.5).with_tau(1.0);

    let exact = exact_output_distribution(&d, &p, &universe)?;
    println!("Pr[y] per attempt: {:.4?}  reject {:.4}", exact.accept, exact.reject);

    for extra in 0..universe.len() {
        let rep = mc_dp_audit(&d, extra, &p, &universe)?;
        println!(
            "D' = D + {{{extra}}}: max ratio {:.4} vs e^eps {:.4}, residual {:.2e} vs delta {:.2e}, {}",
            rep.max_ratio,
            rep.epsilon.exp(),
            rep.delta_residual,
            rep.delta,
            if rep.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
