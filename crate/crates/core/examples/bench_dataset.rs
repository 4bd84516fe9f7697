// Explanation statistics over a small dataset.

use std::error::Error;

use xpg::bench::{bench, parse_csv_rows, BenchRow};
use xpg::fixtures;

const ROWS: &str = include_str!("../data/hardware_instances.csv");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dt = fixtures::hardware_tree();
    let rows = parse_csv_rows(&dt, ROWS)?;
    let row = bench(&dt, &rows)?;
    println!("{}", BenchRow::HEADER.join("\t"));
    println!("{}", row.cells().join("\t"));
    println!("({} rows read, {} distinct)", rows.len(), row.instances);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
