// A scripted drive through the Taxi gridworld: one wall bump, one illegal
// pickup, then a delivery.
//
// $ cargo run --example taxi_tour

use voi_arbiter::env::{TaxiAction, TAXI_GRID, TAXI_LANDMARKS};
use voi_arbiter::{Environment, StateId, Taxi, TaxiState};

fn render(state: &TaxiState) -> String {
    let mut out = String::from("+---------+\n");
    for row in 0..TAXI_GRID {
        out.push('|');
        for col in 0..TAXI_GRID {
            let cell = if (row, col) == (state.row, state.col) {
                if state.passenger == 4 {
                    'T'
                } else {
                    't'
                }
            } else if let Some(i) = TAXI_LANDMARKS.iter().position(|&l| l == (row, col)) {
                let name = ['R', 'G', 'Y', 'B'][i];
                if i == state.passenger {
                    name
                } else {
                    name.to_ascii_lowercase()
                }
            } else {
                ' '
            };
            out.push(cell);
            if col + 1 < TAXI_GRID {
                out.push(if Taxi::east_open(row, col) { ':' } else { '|' });
            }
        }
        out.push_str("|\n");
    }
    out.push_str("+---------+");
    out
}

fn main() -> voi_arbiter::Result<()> {
    use TaxiAction::*;
    let env = Taxi::new();
    println!(
        "{} states, {} actions, {} legal starts, cap {} steps\n",
        env.num_states(),
        env.num_actions(),
        env.start_states().len(),
        env.step_cap()
    );

    // taxi at (2,1), passenger waiting at Y, heading for G
    let start = TaxiState {
        row: 2,
        col: 1,
        passenger: 2,
        destination: 1,
    };
    let mut s: StateId = start.encode()?;
    println!("start {start}  (state {s})\n{}\n", render(&start));

    let route = [
        Pickup, // nobody here: -10
        West, South, South, // down to Y
        East,  // the wall east of Y, position unchanged
        Pickup, North, North, East, East, East, North, North, East, Dropoff,
    ];
    let mut total = 0.0;
    for action in route {
        let t = env.step(s, action.id())?;
        total += t.reward;
        let next = TaxiState::decode(t.next_state)?;
        println!("{:<8} reward {:>4}  {next}", action.name(), t.reward);
        s = t.next_state;
        if t.terminal {
            println!("\ndelivered, episode return {total}\n{}", render(&next));
            break;
        }
    }
    Ok(())
}
