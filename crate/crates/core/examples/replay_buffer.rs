// The experience-replay baseline: a bounded FIFO of real transitions and a
// uniform minibatch replayed after every real Q-update.
//
// $ cargo run --release --example replay_buffer

use voi_arbiter::agents::Experience;
use voi_arbiter::harness::train_agent;
use voi_arbiter::{
    seeded_rng, ActionId, AgentKind, ArbiterConfig, ReplayBuffer, ReplayConfig, StateId, Taxi,
    Transition,
};

fn main() -> voi_arbiter::Result<()> {
    // a toy buffer: capacity 4, minibatches of 3
    let mut buffer = ReplayBuffer::new(ReplayConfig {
        capacity: 4,
        batch_size: 3,
    })?;
    let mut rng = seeded_rng(1);
    for i in 0..6 {
        buffer.push(Experience {
            state: StateId(i),
            action: ActionId(0),
            transition: Transition {
                next_state: StateId(i + 1),
                reward: -1.0,
                terminal: false,
            },
        });
        let held: Vec<usize> = (0..buffer.len())
            .map(|j| buffer.get(j).unwrap().state.0)
            .collect();
        println!(
            "push s={i}: holds {held:?}, sample {:?}",
            buffer.sample_indices(&mut rng)
        );
    }

    // batch size changes how much each real step is reused
    let env = Taxi::new();
    println!("\nTaxi, 300 episodes, seed 0:");
    for batch_size in [0, 8, 32, 128] {
        let cfg = ArbiterConfig {
            replay: ReplayConfig {
                batch_size,
                ..ReplayConfig::default()
            },
            ..ArbiterConfig::default()
        };
        let (_, records) = train_agent(AgentKind::Replay, &env, &cfg, 300, 0)?;
        let last: f64 = records[200..].iter().map(|r| r.total_reward).sum::<f64>() / 100.0;
        let steps: usize = records.iter().map(|r| r.steps).sum();
        println!("  batch {batch_size:>3}: mean reward over episodes 201-300 {last:>8.2}, {steps} real steps");
    }
    Ok(())
}
