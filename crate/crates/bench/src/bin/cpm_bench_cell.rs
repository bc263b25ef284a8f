//! Isolated single-cell benchmark runner: fits one CPM for the given
//! `(N, M, p)` and prints the measured record as one JSON line. Meant to be
//! spawned per cell so the peak-RSS reading belongs to this fit alone.

use cpm_bench::{run_cell, CellSpec};

fn parse_flag(args: &[String], flag: &str) -> Option<u64> {
    args.windows(2)
        .find(|w| w[0] == flag)
        .and_then(|w| w[1].parse().ok())
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (n, m, p) = match (
        parse_flag(&args, "--n"),
        parse_flag(&args, "--m"),
        parse_flag(&args, "--p"),
    ) {
        (Some(n), Some(m), Some(p)) => (n as usize, m as usize, p as usize),
        _ => {
            eprintln!("usage: cpm-bench-cell --n N --m M --p P [--seed S]");
            std::process::exit(2);
        }
    };
    let seed = parse_flag(&args, "--seed").unwrap_or(0);
    let outcome = run_cell(&CellSpec { n, m, p, seed });
    println!(
        "{}",
        serde_json::to_string(&outcome).expect("cell outcome serializes")
    );
}
