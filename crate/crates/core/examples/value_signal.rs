// How the arbitration signal moves as values are committed to the Q-table.
//
// VoI(s, a) = C(s, a) / (sigma(s) + epsilon), where C is the variance of the
// pair's last K committed values and sigma the variance of the state's row.
//
// $ cargo run --example value_signal

use voi_arbiter::agents::voi;
use voi_arbiter::{ActionId, QStore, SoftmaxParams, StateId};

fn show(q: &QStore, label: &str) {
    let s = StateId(0);
    let probs = q.softmax_probs(s, SoftmaxParams::new(0.9).unwrap());
    println!("{label}");
    println!("  row      {:?}", q.row(s));
    println!("  sigma(s) {:.4}", q.state_spread(s));
    for a in 0..q.num_actions() {
        let a = ActionId(a);
        println!(
            "  a={a}  history {:<28} C {:>8.4}  VoI {:>12.4}  softmax {:.3}",
            format!("{:?}", q.history(s, a)),
            q.pair_uncertainty(s, a),
            voi(s, a, q, 1e-6),
            probs[a.0]
        );
    }
    println!();
}

fn main() {
    // one state, three actions, history window of 4
    let mut q = QStore::new(1, 3, 4).unwrap();
    let s = StateId(0);
    show(&q, "fresh table: no history, flat row");

    // action 0 keeps getting revised, action 1 settles
    for v in [-1.0, -3.0, 2.0] {
        q.write_q(s, ActionId(0), v);
    }
    for _ in 0..3 {
        q.write_q(s, ActionId(1), 5.0);
    }
    show(&q, "a=0 noisy, a=1 stable");

    // more writes push the oldest values out of the window
    for v in [2.1, 2.0, 2.05] {
        q.write_q(s, ActionId(0), v);
    }
    show(&q, "a=0 converging: early noise evicted from the window");

    // a wide row shrinks every VoI: planning matters less when one action
    // clearly dominates
    q.write_q(s, ActionId(2), -40.0);
    show(&q, "a=2 clearly bad: larger sigma(s) damps the signal");
}
