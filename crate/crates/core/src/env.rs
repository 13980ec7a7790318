//! Discrete episodic environments.
//!
//! Every environment exposes dense integer state and action indices so agents
//! can keep their statistics in flat tables. `step` is a pure function of
//! `(state, action)`; the only randomness is the start-state draw in `reset`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Dense index of a state, `0 <= index < num_states`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

/// Dense index of an action, `0 <= index < num_actions`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of a single environment step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub next_state: StateId,
    pub reward: f64,
    pub terminal: bool,
}

/// A finite, episodic MDP with deterministic dynamics.
pub trait Environment {
    fn num_states(&self) -> usize;

    fn num_actions(&self) -> usize;

    /// Maximum number of steps before an episode is truncated.
    fn step_cap(&self) -> usize;

    /// States `reset` can return.
    fn start_states(&self) -> &[StateId];

    /// Draws a start state. The draw consumes the caller's generator, so equal
    /// seeds give equal start states.
    fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> StateId;

    fn step(&self, state: StateId, action: ActionId) -> Result<Transition>;

    fn check_state(&self, state: StateId) -> Result<()> {
        if state.0 < self.num_states() {
            Ok(())
        } else {
            Err(Error::StateOutOfRange {
                index: state.0,
                num_states: self.num_states(),
            })
        }
    }

    fn check_action(&self, action: ActionId) -> Result<()> {
        if action.0 < self.num_actions() {
            Ok(())
        } else {
            Err(Error::ActionOutOfRange {
                index: action.0,
                num_actions: self.num_actions(),
            })
        }
    }
}

/// The published 5x5 Taxi map. A `:` between two cells is an open edge, a
/// `|` is a wall.
const TAXI_MAP: [&str; 7] = [
    "+---------+",
    "|R: | : :G|",
    "| : | : : |",
    "| : : : : |",
    "| | : | : |",
    "|Y| : |B: |",
    "+---------+",
];

/// Landmark coordinates `(row, col)` in the order R, G, Y, B.
pub const TAXI_LANDMARKS: [(usize, usize); 4] = [(0, 0), (0, 4), (4, 0), (4, 3)];

pub const TAXI_GRID: usize = 5;
/// `passenger` value meaning the passenger is riding in the taxi.
pub const IN_TAXI: usize = 4;
pub const TAXI_NUM_STATES: usize = 500;
pub const TAXI_NUM_ACTIONS: usize = 6;
pub const TAXI_STEP_CAP: usize = 200;

pub const STEP_REWARD: f64 = -1.0;
pub const ILLEGAL_REWARD: f64 = -10.0;
pub const DELIVERY_REWARD: f64 = 20.0;

/// Taxi actions in index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaxiAction {
    South = 0,
    North = 1,
    East = 2,
    West = 3,
    Pickup = 4,
    Dropoff = 5,
}

impl TaxiAction {
    pub const ALL: [TaxiAction; 6] = [
        TaxiAction::South,
        TaxiAction::North,
        TaxiAction::East,
        TaxiAction::West,
        TaxiAction::Pickup,
        TaxiAction::Dropoff,
    ];

    pub fn id(self) -> ActionId {
        ActionId(self as usize)
    }

    pub fn from_id(action: ActionId) -> Option<Self> {
        Self::ALL.get(action.0).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TaxiAction::South => "south",
            TaxiAction::North => "north",
            TaxiAction::East => "east",
            TaxiAction::West => "west",
            TaxiAction::Pickup => "pickup",
            TaxiAction::Dropoff => "dropoff",
        }
    }
}

/// Decoded Taxi state.
///
/// `passenger` is 0..=3 for a landmark (R, G, Y, B) or [`IN_TAXI`];
/// `destination` is a landmark index 0..=3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TaxiState {
    pub row: usize,
    pub col: usize,
    pub passenger: usize,
    pub destination: usize,
}

impl TaxiState {
    /// Index layout `((row * 5 + col) * 5 + passenger) * 4 + destination`.
    pub fn encode(&self) -> Result<StateId> {
        check_field("row", self.row, TAXI_GRID - 1)?;
        check_field("col", self.col, TAXI_GRID - 1)?;
        check_field("passenger", self.passenger, IN_TAXI)?;
        check_field("destination", self.destination, 3)?;
        Ok(StateId(
            ((self.row * TAXI_GRID + self.col) * 5 + self.passenger) * 4 + self.destination,
        ))
    }

    pub fn decode(state: StateId) -> Result<Self> {
        if state.0 >= TAXI_NUM_STATES {
            return Err(Error::StateOutOfRange {
                index: state.0,
                num_states: TAXI_NUM_STATES,
            });
        }
        let mut i = state.0;
        let destination = i % 4;
        i /= 4;
        let passenger = i % 5;
        i /= 5;
        let col = i % TAXI_GRID;
        let row = i / TAXI_GRID;
        Ok(TaxiState {
            row,
            col,
            passenger,
            destination,
        })
    }

    /// Legal episode start: passenger waiting at a landmark other than the
    /// destination.
    pub fn is_valid_start(&self) -> bool {
        self.passenger != IN_TAXI && self.passenger != self.destination
    }
}

impl fmt::Display for TaxiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 5] = ["R", "G", "Y", "B", "taxi"];
        write!(
            f,
            "taxi=({},{}) passenger={} destination={}",
            self.row, self.col, NAMES[self.passenger], NAMES[self.destination]
        )
    }
}

fn check_field(field: &'static str, value: usize, max: usize) -> Result<()> {
    if value <= max {
        Ok(())
    } else {
        Err(Error::TaxiField { field, value, max })
    }
}

/// Deterministic Taxi gridworld: 500 states, 6 actions, 200-step horizon.
///
/// Every move costs -1 (including moves into walls, which leave the taxi in
/// place), an illegal pickup or drop-off costs -10, and delivering the
/// passenger pays +20 and ends the episode.
#[derive(Clone, Debug)]
pub struct Taxi {
    table: Vec<Transition>,
    starts: Vec<StateId>,
}

impl Default for Taxi {
    fn default() -> Self {
        Self::new()
    }
}

impl Taxi {
    pub fn new() -> Self {
        let mut table = Vec::with_capacity(TAXI_NUM_STATES * TAXI_NUM_ACTIONS);
        let mut starts = Vec::new();
        for index in 0..TAXI_NUM_STATES {
            let state = TaxiState::decode(StateId(index)).expect("index in range");
            if state.is_valid_start() {
                starts.push(StateId(index));
            }
            for action in TaxiAction::ALL {
                table.push(taxi_dynamics(state, action));
            }
        }
        Taxi { table, starts }
    }

    /// Whether an east move out of `(row, col)` is open.
    pub fn east_open(row: usize, col: usize) -> bool {
        col + 1 < TAXI_GRID && TAXI_MAP[row + 1].as_bytes()[2 * col + 2] == b':'
    }
}

fn taxi_dynamics(state: TaxiState, action: TaxiAction) -> Transition {
    let TaxiState {
        mut row,
        mut col,
        mut passenger,
        destination,
    } = state;
    let mut reward = STEP_REWARD;
    let mut terminal = false;
    let here = (row, col);
    match action {
        TaxiAction::South => row = (row + 1).min(TAXI_GRID - 1),
        TaxiAction::North => row = row.saturating_sub(1),
        TaxiAction::East => {
            if Taxi::east_open(row, col) {
                col += 1;
            }
        }
        TaxiAction::West => {
            if col > 0 && Taxi::east_open(row, col - 1) {
                col -= 1;
            }
        }
        TaxiAction::Pickup => {
            if passenger != IN_TAXI && TAXI_LANDMARKS[passenger] == here {
                passenger = IN_TAXI;
            } else {
                reward = ILLEGAL_REWARD;
            }
        }
        TaxiAction::Dropoff => {
            if passenger == IN_TAXI && TAXI_LANDMARKS[destination] == here {
                passenger = destination;
                reward = DELIVERY_REWARD;
                terminal = true;
            } else if let Some(landmark) = (passenger == IN_TAXI)
                .then(|| TAXI_LANDMARKS.iter().position(|&loc| loc == here))
                .flatten()
            {
                // Dropping at another landmark leaves the passenger there.
                passenger = landmark;
            } else {
                reward = ILLEGAL_REWARD;
            }
        }
    }
    let next = TaxiState {
        row,
        col,
        passenger,
        destination,
    };
    Transition {
        next_state: next.encode().expect("dynamics stay in range"),
        reward,
        terminal,
    }
}

impl Environment for Taxi {
    fn num_states(&self) -> usize {
        TAXI_NUM_STATES
    }

    fn num_actions(&self) -> usize {
        TAXI_NUM_ACTIONS
    }

    fn step_cap(&self) -> usize {
        TAXI_STEP_CAP
    }

    /// All legal start states, in index order.
    fn start_states(&self) -> &[StateId] {
        &self.starts
    }

    fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> StateId {
        self.starts[rng.gen_range(0..self.starts.len())]
    }

    fn step(&self, state: StateId, action: ActionId) -> Result<Transition> {
        self.check_state(state)?;
        self.check_action(action)?;
        Ok(self.table[state.0 * TAXI_NUM_ACTIONS + action.0])
    }
}

/// A deterministic MDP given by an explicit transition table.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    table: Vec<Transition>,
    starts: Vec<StateId>,
    step_cap: usize,
}

impl TabularMdp {
    /// `table[s * num_actions + a]` is the transition for `(s, a)`.
    pub fn new(
        num_states: usize,
        num_actions: usize,
        table: Vec<Transition>,
        starts: Vec<StateId>,
        step_cap: usize,
    ) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::Config(
                "an MDP needs at least one state and one action".into(),
            ));
        }
        if table.len() != num_states * num_actions {
            return Err(Error::Dimensions {
                expected_rows: num_states,
                expected_cols: num_actions,
                found: format!("{} transitions", table.len()),
            });
        }
        if starts.is_empty() || step_cap == 0 {
            return Err(Error::Config(
                "an MDP needs a start state and a positive step cap".into(),
            ));
        }
        for &s in starts.iter().chain(table.iter().map(|t| &t.next_state)) {
            if s.0 >= num_states {
                return Err(Error::StateOutOfRange {
                    index: s.0,
                    num_states,
                });
            }
        }
        Ok(TabularMdp {
            num_states,
            num_actions,
            table,
            starts,
            step_cap,
        })
    }

    /// Corridor of `len` states. Action 0 moves left (bounded at 0), action 1
    /// moves right; each step costs -1 and entering the last state pays +20
    /// and terminates. Episodes start at state 0.
    pub fn chain(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::Config("a chain needs at least two states".into()));
        }
        let mut table = Vec::with_capacity(len * 2);
        for s in 0..len {
            table.push(Transition {
                next_state: StateId(s.saturating_sub(1)),
                reward: STEP_REWARD,
                terminal: false,
            });
            let next = (s + 1).min(len - 1);
            let terminal = next == len - 1;
            table.push(Transition {
                next_state: StateId(next),
                reward: if terminal {
                    DELIVERY_REWARD
                } else {
                    STEP_REWARD
                },
                terminal,
            });
        }
        Self::new(len, 2, table, vec![StateId(0)], 100)
    }
}

impl Environment for TabularMdp {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn step_cap(&self) -> usize {
        self.step_cap
    }

    fn start_states(&self) -> &[StateId] {
        &self.starts
    }

    fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> StateId {
        if self.starts.len() == 1 {
            self.starts[0]
        } else {
            self.starts[rng.gen_range(0..self.starts.len())]
        }
    }

    fn step(&self, state: StateId, action: ActionId) -> Result<Transition> {
        self.check_state(state)?;
        self.check_action(action)?;
        Ok(self.table[state.0 * self.num_actions + action.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn taxi(row: usize, col: usize, passenger: usize, destination: usize) -> StateId {
        TaxiState {
            row,
            col,
            passenger,
            destination,
        }
        .encode()
        .unwrap()
    }

    #[test]
    fn encode_layout() {
        assert_eq!(taxi(0, 0, 0, 0), StateId(0));
        assert_eq!(taxi(0, 0, 0, 1), StateId(1));
        assert_eq!(
            TaxiState::decode(StateId(499)).unwrap(),
            TaxiState {
                row: 4,
                col: 4,
                passenger: 4,
                destination: 3
            }
        );
    }

    #[test]
    fn encode_rejects_out_of_range_fields() {
        let bad = TaxiState {
            row: 5,
            col: 0,
            passenger: 0,
            destination: 0,
        };
        assert!(matches!(
            bad.encode(),
            Err(Error::TaxiField { field: "row", .. })
        ));
        let bad = TaxiState {
            destination: 4,
            ..TaxiState::decode(StateId(0)).unwrap()
        };
        assert!(matches!(
            bad.encode(),
            Err(Error::TaxiField {
                field: "destination",
                ..
            })
        ));
        assert!(TaxiState::decode(StateId(500)).is_err());
    }

    #[test]
    fn sizes() {
        let env = Taxi::new();
        assert_eq!(env.num_states(), 500);
        assert_eq!(env.num_actions(), 6);
        assert_eq!(env.start_states().len(), 300);
        assert_eq!(TabularMdp::chain(2).unwrap().num_states(), 2);
    }

    #[test]
    fn reset_is_seeded() {
        let env = Taxi::new();
        let a = env.reset(&mut seeded_rng(17));
        let b = env.reset(&mut seeded_rng(17));
        assert_eq!(a, b);
        let mut rng = seeded_rng(3);
        for _ in 0..1000 {
            let s = TaxiState::decode(env.reset(&mut rng)).unwrap();
            assert_ne!(s.passenger, IN_TAXI);
            assert_ne!(s.passenger, s.destination);
        }
    }

    #[test]
    fn move_costs_one_and_shifts() {
        let env = Taxi::new();
        let t = env.step(taxi(2, 2, 0, 1), TaxiAction::South.id()).unwrap();
        assert_eq!(t.reward, -1.0);
        assert!(!t.terminal);
        assert_eq!(t.next_state, taxi(3, 2, 0, 1));
        let t = env.step(taxi(2, 2, 0, 1), TaxiAction::East.id()).unwrap();
        assert_eq!(t.next_state, taxi(2, 3, 0, 1));
    }

    #[test]
    fn walls_block_but_cost() {
        let env = Taxi::new();
        // wall between columns 1 and 2 in the top two rows
        let t = env.step(taxi(0, 1, 0, 1), TaxiAction::East.id()).unwrap();
        assert_eq!((t.next_state, t.reward), (taxi(0, 1, 0, 1), -1.0));
        let t = env.step(taxi(1, 2, 0, 1), TaxiAction::West.id()).unwrap();
        assert_eq!(t.next_state, taxi(1, 2, 0, 1));
        // walls in the bottom two rows
        let t = env.step(taxi(4, 0, 0, 1), TaxiAction::East.id()).unwrap();
        assert_eq!(t.next_state, taxi(4, 0, 0, 1));
        let t = env.step(taxi(3, 3, 0, 1), TaxiAction::West.id()).unwrap();
        assert_eq!(t.next_state, taxi(3, 3, 0, 1));
        // grid border
        let t = env.step(taxi(0, 4, 0, 1), TaxiAction::North.id()).unwrap();
        assert_eq!(t.next_state, taxi(0, 4, 0, 1));
        // open row
        let t = env.step(taxi(2, 0, 0, 1), TaxiAction::East.id()).unwrap();
        assert_eq!(t.next_state, taxi(2, 1, 0, 1));
    }

    #[test]
    fn pickup_and_dropoff() {
        let env = Taxi::new();
        let bad = env.step(taxi(2, 2, 0, 1), TaxiAction::Pickup.id()).unwrap();
        assert_eq!((bad.next_state, bad.reward), (taxi(2, 2, 0, 1), -10.0));

        let good = env.step(taxi(0, 0, 0, 1), TaxiAction::Pickup.id()).unwrap();
        assert_eq!(
            (good.next_state, good.reward),
            (taxi(0, 0, IN_TAXI, 1), -1.0)
        );

        let again = env
            .step(taxi(0, 0, IN_TAXI, 1), TaxiAction::Pickup.id())
            .unwrap();
        assert_eq!(again.reward, -10.0);

        let done = env
            .step(taxi(0, 4, IN_TAXI, 1), TaxiAction::Dropoff.id())
            .unwrap();
        assert_eq!(done.reward, 20.0);
        assert!(done.terminal);
        assert_eq!(done.next_state, taxi(0, 4, 1, 1));

        let elsewhere = env
            .step(taxi(4, 0, IN_TAXI, 1), TaxiAction::Dropoff.id())
            .unwrap();
        assert_eq!(elsewhere.reward, -1.0);
        assert_eq!(elsewhere.next_state, taxi(4, 0, 2, 1));
        assert!(!elsewhere.terminal);

        let nowhere = env
            .step(taxi(2, 2, IN_TAXI, 1), TaxiAction::Dropoff.id())
            .unwrap();
        assert_eq!(
            (nowhere.next_state, nowhere.reward),
            (taxi(2, 2, IN_TAXI, 1), -10.0)
        );
    }

    #[test]
    fn step_rejects_bad_indices() {
        let env = Taxi::new();
        assert!(matches!(
            env.step(StateId(500), ActionId(0)),
            Err(Error::StateOutOfRange { .. })
        ));
        assert!(matches!(
            env.step(StateId(0), ActionId(6)),
            Err(Error::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn chain_fixture() {
        let env = TabularMdp::chain(3).unwrap();
        let t = env.step(StateId(0), ActionId(0)).unwrap();
        assert_eq!(t.next_state, StateId(0));
        let t = env.step(StateId(1), ActionId(1)).unwrap();
        assert_eq!(
            (t.next_state, t.reward, t.terminal),
            (StateId(2), 20.0, true)
        );
        assert!(TabularMdp::chain(1).is_err());
    }
}
