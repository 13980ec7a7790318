// Configuration files are `key = value` lines with `#` comments; anything
// left out keeps its default. This example parses one, then sweeps the
// lookahead depth and reports how the arbiter's planning effort changes.
//
// $ cargo run --release --example config_sweep

use voi_arbiter::config::RunConfig;
use voi_arbiter::harness::run_experiment;
use voi_arbiter::Taxi;

const CONFIG: &str = "
# short arbiter runs
agent = arbiter
runs = 10
episodes = 200
voi_threshold = 0.1   # starting gate
voi_mult = 1.005
";

fn main() -> voi_arbiter::Result<()> {
    let base = RunConfig::parse(CONFIG)?;
    println!("effective configuration:\n{}", base.to_config_string());

    let env = Taxi::new();
    println!(
        "{:>5}  {:>12}  {:>14}  {:>12}",
        "depth", "MB evals/run", "final reward", "greedy return"
    );
    for depth in 0..=3 {
        let mut cfg = base.clone();
        cfg.set("depth", &depth.to_string())?;
        cfg.validate()?;
        let exp = run_experiment(
            cfg.agent,
            &env,
            &cfg.params,
            cfg.num_runs,
            cfg.num_episodes,
            cfg.base_seed,
        )?;
        let s = &exp.summary;
        let mb: f64 = s.mean_mb_evals.iter().sum();
        println!(
            "{depth:>5}  {mb:>12.0}  {:>14}  {:>12.2}",
            format!("{:.2} ± {:.2}", s.final_mean, s.final_std),
            s.final_greedy_mean.unwrap_or(f64::NAN)
        );
    }

    // bad values are caught before any training starts
    let err = RunConfig::parse("alpha = 1.5")
        .and_then(|c| c.validate())
        .unwrap_err();
    println!("\nrejected: {err}");
    Ok(())
}
