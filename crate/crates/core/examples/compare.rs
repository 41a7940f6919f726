//! Small end-to-end comparison run written to a temporary directory:
//! `compare.csv` plus one SVG per observable.

use spinbath::config::RunConfig;
use spinbath::run::run_compare;

fn main() -> spinbath::Result<()> {
    let mut cfg = RunConfig::parse_str("n_s = 6\nn_eig = 6\nt_max = 10\nsvg = true\n")?;
    cfg.out_dir = std::env::temp_dir().join("spinbath-compare");
    let report = run_compare(&cfg, &|msg| eprintln!("{msg}"))?;
    for (k, v) in &report.summary {
        println!("{k:>14} = {v:.5}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
