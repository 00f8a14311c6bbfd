//! Runs part of the acceptance battery and prints its summary.
//!
//! ```text
//! cargo run --release --example suite_subset -- 2 6
//! ```

use broxlab::suite::{run_suite, SuiteOptions};

fn main() -> broxlab::Result<()> {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let opts = SuiteOptions {
        only: Some(if only.is_empty() { vec![2, 5] } else { only }),
        ..SuiteOptions::default()
    };
    let summary = run_suite(&opts)?;
    for c in &summary.criteria {
        println!("{c}");
    }
    for e in &summary.entries {
        println!("  [{}] {:<40} {:<5} {}", e.criterion, e.id, e.verdict, e.detail);
    }
    println!("passed: {}", summary.passed);
    Ok(())
}
