//! Parsing a run configuration and the errors reported for bad input.

use spinbath::config::RunConfig;

fn main() {
    let text = "# sweep point\nlambda = 4\nn_s = 10   # quick bath\nseed = 17\n";
    match RunConfig::parse_str(text) {
        Ok(cfg) => println!(
            "λ = {}, n_s = {}, frequencies = {:?}, t_max = {}",
            cfg.lambda, cfg.n_s, cfg.frequencies, cfg.t_max
        ),
        Err(e) => println!("unexpected: {e}"),
    }
    for bad in [
        "n_s = 0",
        "lambda = 2\nomega = 1",
        "kt = hot",
        "n_s = 3\nn_eig = 20",
    ] {
        println!(
            "{:<24} -> {}",
            bad.replace('\n', "; "),
            RunConfig::parse_str(bad).unwrap_err()
        );
    }
}
