//! Shannon and Rényi sensitivity bounds, checked against a brute-force sweep.

use reaedp::entropy::{renyi_constant, shannon_entropy_counts, shannon_sensitivity_bound};
use reaedp::histogram::compositions;

fn main() -> reaedp::Result<()> {
    println!("{:>8} {:>10}", "n", "bound");
    for n in [50u64, 601, 1460, 10_000, 100_000] {
        println!("{n:>8} {:>10.5}", shannon_sensitivity_bound(n)?);
    }

    println!("\nRenyi constants");
    for a in [0.5, 1.5, 2.0, 3.0, 5.0, 10.0] {
        println!("  alpha {a:>4}: {:.2}", renyi_constant(a)?);
    }

    // largest entropy change over every one-record move, n = 10, m = 3
    let n = 10;
    let mut worst = 0.0f64;
    for z in compositions(n, 3) {
        let h = shannon_entropy_counts(&z)?;
        for from in (0..3).filter(|&i| z[i] > 0) {
            for to in (0..3).filter(|&j| j != from) {
                let mut w = z.clone();
                w[from] -= 1;
                w[to] += 1;
                worst = worst.max((h - shannon_entropy_counts(&w)?).abs());
            }
        }
    }
    println!("\nn = {n}, m = 3: max |dH| = {worst:.4} <= bound {:.4}", shannon_sensitivity_bound(n)?);
    Ok(())
}
