//! Privacy-test pass rate over a (k, gamma) grid.

use reaedp::experiments::data::clustered_records;
use reaedp::experiments::sweeps::pass_rate_table;
use reaedp::mechanism_f::FParams;

fn main() -> reaedp::Result<()> {
    let records = clustered_records(200, 30, 3);
    let base = FParams::new(10, 2, 2.0, 0.1).with_tau(3.0);
    let gammas = [2f64.powf(0.25), 2f64.sqrt(), 2.0, 4.0, 16.0];
    for row in pass_rate_table(&records, 30, &base, &[10, 20, 30, 50], &gammas, 5000, 42)? {
        println!(
            "k={:>3} gamma={:<8.4} pass rate {:.3}",
            row.get_param("k").unwrap_or("?"),
            row.get_param("gamma").and_then(|g| g.parse::<f64>().ok()).unwrap_or(f64::NAN),
            row.get_metric("pass_rate").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
