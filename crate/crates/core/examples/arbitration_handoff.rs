// Watch control pass from planning to cached values as the arbiter trains on
// Taxi. Prints model-based (MB) and model-free (MF) evaluation counts per
// 50-episode block, averaged over a few seeds, alongside the training reward
// and the rising VoI threshold.
//
// $ cargo run --release --example arbitration_handoff [runs] [episodes]

use voi_arbiter::harness::run_experiment;
use voi_arbiter::{AgentKind, ArbiterConfig, Taxi};

fn main() -> voi_arbiter::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("a number"));
    let runs = args.next().unwrap_or(20);
    let episodes = args.next().unwrap_or(500);

    let env = Taxi::new();
    let cfg = ArbiterConfig::default();
    let exp = run_experiment(AgentKind::Arbiter, &env, &cfg, runs, episodes, 0)?;
    let s = &exp.summary;

    println!("arbiter, {runs} runs, default parameters\n");
    println!(
        "{:>9}  {:>8}  {:>8}  {:>6}  {:>9}  {:>9}",
        "episodes", "MB/ep", "MF/ep", "MB %", "reward", "threshold"
    );
    let first = &exp.runs[0].records;
    for start in (0..episodes).step_by(50) {
        let end = (start + 50).min(episodes);
        let avg = |v: &[f64]| v[start..end].iter().sum::<f64>() / (end - start) as f64;
        let (mb, mf) = (avg(&s.mean_mb_evals), avg(&s.mean_mf_evals));
        println!(
            "{:>9}  {mb:>8.1}  {mf:>8.1}  {:>5.1}%  {:>9.2}  {:>9.3}",
            format!("{}-{}", start + 1, end),
            100.0 * mb / (mb + mf),
            avg(&s.mean_reward),
            first[end - 1].voi_threshold
        );
    }

    let tail = episodes.saturating_sub(50);
    let silent = exp
        .runs
        .iter()
        .filter(|r| r.records[tail..].iter().all(|x| x.mb_evals == 0))
        .count();
    println!("\n{silent}/{runs} runs made no model-based evaluation in the last 50 episodes");
    Ok(())
}
