// Train all three agents on the same seed schedule, print their summaries
// and write the learning-curve and arbitration charts as SVG.
//
// $ cargo run --release --example baseline_comparison [out-dir] [runs] [episodes]

use std::path::PathBuf;

use voi_arbiter::config::RunConfig;
use voi_arbiter::harness::compare;
use voi_arbiter::report::{summary_text, write_compare_artifacts};
use voi_arbiter::{AgentKind, Taxi};

fn main() -> voi_arbiter::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = RunConfig {
        out_dir: args
            .next()
            .map_or_else(|| PathBuf::from("out/comparison"), PathBuf::from),
        num_runs: args.next().map_or(20, |a| a.parse().expect("runs")),
        num_episodes: args.next().map_or(500, |a| a.parse().expect("episodes")),
        ..RunConfig::default()
    };

    let env = Taxi::new();
    let cmp = compare(
        &AgentKind::ALL,
        &env,
        &cfg.params,
        cfg.num_runs,
        cfg.num_episodes,
        cfg.base_seed,
    )?;
    for e in &cmp.experiments {
        println!("{}", summary_text(&e.summary));
    }
    for (agent, solved) in cmp.solve_order() {
        let at = solved.map_or_else(|| "never".to_string(), |e| format!("episode {e}"));
        println!(
            "  {:<9} trailing-100 training mean >= 0: {at}",
            agent.name()
        );
    }
    for path in write_compare_artifacts(&cfg, &cmp, &cfg.out_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
