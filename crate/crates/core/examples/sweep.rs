//! Median coverage over octree depth and throughput cap.
//!
//! cargo run --release --example sweep

use std::path::PathBuf;

use elid_planner::cli::{run_sweep, SweepOptions};
use elid_planner::config::ScenarioConfig;

fn main() -> elid_planner::Result<()> {
    let mut base = ScenarioConfig::table1();
    base.swarm.max_iterations = 200;
    let opts = SweepOptions {
        scenario: PathBuf::new(),
        depths: vec![5, 7, 9, 11],
        bandwidths_gbps: vec![1.0, 5.0, 10.0],
        seeds: 5,
        master_seed: Some(1),
        out_dir: PathBuf::new(),
        parallel: true,
    };
    let sweep = run_sweep(&base, &opts)?;

    print!("{:>4}", "d");
    for bw in &opts.bandwidths_gbps {
        print!(" {:>10}", format!("{bw} GB/s"));
    }
    println!();
    for &d in &opts.depths {
        print!("{d:>4}");
        for &bw in &opts.bandwidths_gbps {
            print!(" {:>10.4}", sweep.median(d, bw).unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
