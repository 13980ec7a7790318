// Two settings under which the arbiter collapses to plain Q-learning:
// an infinite VoI threshold (never plan) and depth 0 (planning returns the
// cached value). Both are checked against Q-learning on shared seeds.
//
// $ cargo run --release --example reduction_check

use voi_arbiter::harness::train_agent;
use voi_arbiter::{AgentKind, ArbiterConfig, StateId, Taxi};

fn main() -> voi_arbiter::Result<()> {
    let env = Taxi::new();
    let never_plan = ArbiterConfig {
        voi_threshold: f64::INFINITY,
        ..ArbiterConfig::default()
    };
    let depth_zero = ArbiterConfig {
        max_depth: 0,
        ..ArbiterConfig::default()
    };

    println!(
        "{:>4}  {:>18}  {:>16}  {:>10}",
        "seed", "threshold=inf", "depth=0", "MB evals"
    );
    for seed in 0..5 {
        let (ql, _) = train_agent(AgentKind::Qlearning, &env, &never_plan, 200, seed)?;
        let (a, _) = train_agent(AgentKind::Arbiter, &env, &never_plan, 200, seed)?;
        let (b, records) = train_agent(AgentKind::Arbiter, &env, &depth_zero, 200, seed)?;

        let bitwise = a
            .q()
            .values()
            .iter()
            .zip(ql.q().values())
            .all(|(x, y)| x.to_bits() == y.to_bits());
        let same_policy = (0..500).all(|s| b.q().greedy(StateId(s)) == ql.q().greedy(StateId(s)));
        let mb: u64 = records.iter().map(|r| r.mb_evals).sum();
        println!(
            "{seed:>4}  {:>18}  {:>16}  {mb:>10}",
            if bitwise { "bitwise equal" } else { "DIFFERS" },
            if same_policy {
                "same policy"
            } else {
                "DIFFERS"
            }
        );
    }
    println!("\n(depth-0 still counts its gate decisions as model-based evaluations)");
    Ok(())
}
