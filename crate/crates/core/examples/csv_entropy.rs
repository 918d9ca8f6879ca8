//! Entropy of a CSV column before and after a Laplace release.
//!
//! `cargo run --example csv_entropy -- path.csv column`; defaults to the
//! bundled sample.

use reaedp::experiments::sweeps::csv_entropy_rows;
use reaedp::experiments::{load_column, DatasetSource};

fn main() -> reaedp::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/amazon_google_sample.csv").into());
    let column = args.next().unwrap_or_else(|| "y".into());
    let values = load_column(&DatasetSource::new(&path, &column))?;
    for row in csv_entropy_rows("csv-entropy", &column, &values, &[10, 30], &[0.5, 1.0, 2.0], 42)? {
        println!(
            "bins {:>3} eps {:<4} H {:.4} -> {:.4}  (bound {:.5})",
            row.get_param("bins").unwrap_or("?"),
            row.get_param("epsilon").unwrap_or("?"),
            row.get_metric("h_orig").unwrap_or(f64::NAN),
            row.get_metric("h_noisy").unwrap_or(f64::NAN),
            row.get_metric("bound").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
