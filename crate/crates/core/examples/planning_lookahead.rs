// Depth-limited lookahead over a learned count model.
//
// A five-state corridor: action 1 moves right, the last state pays +20. The
// model only knows what it has observed, so deeper search reaches the goal
// only once the path there has been walked. Until then the unobserved left
// moves keep their cached 0, which beats another -1 step. A slippery copy of the corridor
// shows the probability estimates at work.
//
// $ cargo run --example planning_lookahead

use voi_arbiter::{
    ActionId, Environment, PlanConfig, QStore, StateId, TabularMdp, Transition, WorldModel,
};

const RIGHT: ActionId = ActionId(1);

fn main() -> voi_arbiter::Result<()> {
    let env = TabularMdp::chain(5)?;
    let q = QStore::new(5, 2, 10)?;
    let mut model = WorldModel::new(5, 2);

    println!("corridor, value of moving right from state 0 (gamma 0.9, cached Q = 0)");
    println!(
        "{:>10}  depth 0   depth 1   depth 2   depth 3   depth 4",
        "observed"
    );
    for walked in 0..=4 {
        if walked > 0 {
            let s = StateId(walked - 1);
            model.observe(s, RIGHT, &env.step(s, RIGHT)?);
        }
        let row: Vec<String> = (0..5)
            .map(|d| format!("{:>8.3}", model.lookahead(StateId(0), RIGHT, d, &q, 0.9)))
            .collect();
        println!("{:>10}  {}", format!("{walked} steps"), row.join("  "));
    }

    // a slippery first step: 3 of 4 tries move right, 1 stays put
    let mut slippery = WorldModel::new(5, 2);
    for s in 1..4 {
        slippery.observe(StateId(s), RIGHT, &env.step(StateId(s), RIGHT)?);
    }
    let moved = env.step(StateId(0), RIGHT)?;
    let stuck = Transition {
        next_state: StateId(0),
        reward: -1.0,
        terminal: false,
    };
    for t in [moved, moved, stuck, moved] {
        slippery.observe(StateId(0), RIGHT, &t);
    }
    println!("\nslippery start, estimated successors of (0, right):");
    for e in slippery.successors(StateId(0), RIGHT) {
        println!(
            "  -> {}  p = {:.2}  r = {}",
            e.next, e.probability, e.reward
        );
    }

    // plan_backup commits the lookahead into the table (and its history)
    let mut q = QStore::new(5, 2, 10)?;
    let cfg = PlanConfig::new(5, 0.9)?;
    let v = slippery.plan_backup(StateId(0), RIGHT, cfg.max_depth, &mut q, &cfg);
    println!(
        "\ndepth-5 backup committed: q[0][right] = {v:.4}, history {:?}",
        q.history(StateId(0), RIGHT)
    );
    Ok(())
}
