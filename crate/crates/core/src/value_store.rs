//! Q-table with bounded per-pair value histories.
//!
//! Every committed write to `q[s][a]` is also appended to a ring buffer of the
//! last `window` values for that pair. The population variance of that buffer
//! is the pair's uncertainty; the population variance of the current row
//! `q[s][..]` is the state's spread. Their ratio drives arbitration.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::env::{ActionId, StateId};
use crate::error::{Error, Result};

/// Default history window length.
pub const DEFAULT_HISTORY_WINDOW: usize = 10;

/// Inverse temperature of the softmax policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SoftmaxParams {
    rho: f64,
}

impl SoftmaxParams {
    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho.is_finite() {
            Ok(SoftmaxParams { rho })
        } else {
            Err(Error::Config(format!(
                "inverse temperature must be finite and > 0, got {rho}"
            )))
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QStore {
    num_states: usize,
    num_actions: usize,
    window: usize,
    values: Vec<f64>,
    // pair-major ring buffers, `window` slots each
    history: Vec<f64>,
    history_len: Vec<u32>,
    history_head: Vec<u32>,
}

impl QStore {
    /// All Q-values start at zero with empty histories.
    pub fn new(num_states: usize, num_actions: usize, window: usize) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::Config(
                "Q-table needs at least one state and one action".into(),
            ));
        }
        if window == 0 {
            return Err(Error::Config("history window must be positive".into()));
        }
        let pairs = num_states * num_actions;
        Ok(QStore {
            num_states,
            num_actions,
            window,
            values: vec![0.0; pairs],
            history: vec![0.0; pairs * window],
            history_len: vec![0; pairs],
            history_head: vec![0; pairs],
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn window(&self) -> usize {
        self.window
    }

    #[inline]
    fn pair(&self, s: StateId, a: ActionId) -> usize {
        debug_assert!(s.0 < self.num_states && a.0 < self.num_actions);
        s.0 * self.num_actions + a.0
    }

    #[inline]
    pub fn get(&self, s: StateId, a: ActionId) -> f64 {
        self.values[self.pair(s, a)]
    }

    #[inline]
    pub fn row(&self, s: StateId) -> &[f64] {
        let start = s.0 * self.num_actions;
        &self.values[start..start + self.num_actions]
    }

    /// Flat row-major view of the table.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Commits `value` to `q[s][a]` and appends it to the pair's history,
    /// evicting the oldest entry once the window is full.
    pub fn write_q(&mut self, s: StateId, a: ActionId, value: f64) {
        let pair = self.pair(s, a);
        self.values[pair] = value;
        let base = pair * self.window;
        let len = self.history_len[pair] as usize;
        let head = self.history_head[pair] as usize;
        if len < self.window {
            self.history[base + (head + len) % self.window] = value;
            self.history_len[pair] += 1;
        } else {
            self.history[base + head] = value;
            self.history_head[pair] = ((head + 1) % self.window) as u32;
        }
    }

    /// History of `(s, a)`, oldest first.
    pub fn history(&self, s: StateId, a: ActionId) -> Vec<f64> {
        self.history_iter(self.pair(s, a)).collect()
    }

    pub fn history_len(&self, s: StateId, a: ActionId) -> usize {
        self.history_len[self.pair(s, a)] as usize
    }

    fn history_iter(&self, pair: usize) -> impl Iterator<Item = f64> + '_ {
        let base = pair * self.window;
        let head = self.history_head[pair] as usize;
        let len = self.history_len[pair] as usize;
        (0..len).map(move |i| self.history[base + (head + i) % self.window])
    }

    /// Population variance of the pair's value history; 0 with fewer than two
    /// entries.
    pub fn pair_uncertainty(&self, s: StateId, a: ActionId) -> f64 {
        let pair = self.pair(s, a);
        let len = self.history_len[pair] as usize;
        if len < 2 {
            return 0.0;
        }
        let base = pair * self.window;
        // ring order is irrelevant for the variance
        population_variance(&self.history[base..base + len])
    }

    /// Population variance of the current Q-values of `s`.
    pub fn state_spread(&self, s: StateId) -> f64 {
        population_variance(self.row(s))
    }

    pub fn max_q(&self, s: StateId) -> f64 {
        self.row(s)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action; ties go to the lowest index.
    pub fn greedy(&self, s: StateId) -> ActionId {
        ActionId(argmax(self.row(s)))
    }

    /// Softmax probabilities `exp(rho * q) / sum exp(rho * q)` over the row.
    pub fn softmax_probs(&self, s: StateId, params: SoftmaxParams) -> Vec<f64> {
        let mut probs = self.row(s).to_vec();
        softmax_in_place(&mut probs, params.rho);
        probs
    }

    /// Samples an action from the softmax over `q[s]`, consuming one uniform
    /// draw.
    pub fn softmax_select<R: Rng + ?Sized>(
        &self,
        s: StateId,
        params: SoftmaxParams,
        rng: &mut R,
    ) -> ActionId {
        let probs = self.softmax_probs(s, params);
        ActionId(sample_index(&probs, rng.gen::<f64>()))
    }

    /// Writes the table as CSV: one line per state, one column per action.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.values.chunks(self.num_actions) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Parses a CSV table written by [`QStore::write_csv`]. Histories start
    /// empty. Blank lines are skipped.
    pub fn read_csv<R: BufRead>(
        input: R,
        num_states: usize,
        num_actions: usize,
        window: usize,
    ) -> Result<Self> {
        let mut store = QStore::new(num_states, num_actions, window)?;
        let mut rows = 0usize;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<q-table>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if rows == num_states {
                return Err(Error::Dimensions {
                    expected_rows: num_states,
                    expected_cols: num_actions,
                    found: format!("more than {num_states} rows"),
                });
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != num_actions {
                return Err(Error::Dimensions {
                    expected_rows: num_states,
                    expected_cols: num_actions,
                    found: format!("{} columns on line {}", cells.len(), lineno + 1),
                });
            }
            for (a, cell) in cells.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    path: "<q-table>".into(),
                    message: format!("line {}: `{cell}` is not a number", lineno + 1),
                })?;
                store.values[rows * num_actions + a] = v;
            }
            rows += 1;
        }
        if rows != num_states {
            return Err(Error::Dimensions {
                expected_rows: num_states,
                expected_cols: num_actions,
                found: format!("{rows} rows"),
            });
        }
        Ok(store)
    }
}

/// Two-pass population variance. Empty input has variance 0.
pub fn population_variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Index of the first maximum.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Replaces `xs` by `softmax(rho * xs)`, subtracting the maximum first.
pub fn softmax_in_place(xs: &mut [f64], rho: f64) {
    if xs.is_empty() {
        return;
    }
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in xs.iter_mut() {
        *x = (rho * (*x - max)).exp();
        sum += *x;
    }
    for x in xs.iter_mut() {
        *x /= sum;
    }
}

/// Inverse-CDF sampling with a uniform draw `u` in `[0, 1)`. Rounding slack
/// falls to the last index with non-zero mass.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> QStore {
        QStore::new(4, 6, 3).unwrap()
    }

    const S: StateId = StateId(1);
    const A: ActionId = ActionId(2);

    #[test]
    fn read_after_write() {
        let mut q = store();
        q.write_q(S, A, 1.0);
        assert_eq!(q.get(S, A), 1.0);
        assert_eq!(q.history(S, A), vec![1.0]);
    }

    #[test]
    fn history_keeps_last_window_in_order() {
        let mut q = store();
        for v in [0.0, 1.0, 2.0] {
            q.write_q(S, A, v);
        }
        assert_eq!(q.history(S, A), vec![0.0, 1.0, 2.0]);
        q.write_q(S, A, 3.0);
        assert_eq!(q.history(S, A), vec![1.0, 2.0, 3.0]);
        q.write_q(S, A, 4.0);
        assert_eq!(q.history(S, A), vec![2.0, 3.0, 4.0]);
        assert_eq!(q.history_len(S, A), 3);
        // other pairs untouched
        assert!(q.history(S, ActionId(1)).is_empty());
    }

    #[test]
    fn uncertainty_examples() {
        let mut q = store();
        assert_eq!(q.pair_uncertainty(S, A), 0.0);
        q.write_q(S, A, 5.0);
        assert_eq!(q.pair_uncertainty(S, A), 0.0);
        let mut flat = store();
        for _ in 0..3 {
            flat.write_q(S, A, 1.0);
        }
        assert_eq!(flat.pair_uncertainty(S, A), 0.0);
        for v in [0.0, 1.0, 2.0] {
            q.write_q(S, A, v);
        }
        assert!((q.pair_uncertainty(S, A) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn spread_examples() {
        let mut q = store();
        assert_eq!(q.state_spread(S), 0.0);
        q.write_q(S, ActionId(1), 3.0);
        assert!((q.state_spread(S) - 1.25).abs() < 1e-15);
        for a in 0..6 {
            q.write_q(StateId(2), ActionId(a), -7.5);
        }
        assert_eq!(q.state_spread(StateId(2)), 0.0);
    }

    #[test]
    fn softmax_examples() {
        let mut q = QStore::new(1, 2, 2).unwrap();
        let p = q.softmax_probs(StateId(0), SoftmaxParams::new(3.0).unwrap());
        assert_eq!(p, vec![0.5, 0.5]);

        q.write_q(StateId(0), ActionId(0), 1.0);
        let p = q.softmax_probs(StateId(0), SoftmaxParams::new(1.0).unwrap());
        let e = std::f64::consts::E;
        assert!((p[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((p[1] - 1.0 / (e + 1.0)).abs() < 1e-15);
        assert!((p[0] - 0.7311).abs() < 1e-4);

        q.write_q(StateId(0), ActionId(0), 1000.0);
        let p = q.softmax_probs(StateId(0), SoftmaxParams::new(0.9).unwrap());
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_rejects_bad_rho() {
        assert!(SoftmaxParams::new(0.0).is_err());
        assert!(SoftmaxParams::new(-1.0).is_err());
        assert!(SoftmaxParams::new(f64::NAN).is_err());
    }

    #[test]
    fn greedy_breaks_ties_low() {
        let mut q = store();
        assert_eq!(q.greedy(S), ActionId(0));
        q.write_q(S, ActionId(3), 1.0);
        q.write_q(S, ActionId(5), 1.0);
        assert_eq!(q.greedy(S), ActionId(3));
        assert_eq!(q.max_q(S), 1.0);
    }

    #[test]
    fn sample_index_edges() {
        assert_eq!(sample_index(&[0.5, 0.5], 0.0), 0);
        assert_eq!(sample_index(&[0.5, 0.5], 0.5), 1);
        assert_eq!(sample_index(&[0.3, 0.7, 0.0], 0.999_999_999_999), 1);
    }

    #[test]
    fn csv_dimension_errors() {
        let q = store();
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        let short: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            QStore::read_csv(short.as_bytes(), 4, 6, 3),
            Err(Error::Dimensions { .. })
        ));
        assert!(matches!(
            QStore::read_csv("1,2\n".as_bytes(), 1, 6, 3),
            Err(Error::Dimensions { .. })
        ));
        assert!(matches!(
            QStore::read_csv("1,2,x\n".as_bytes(), 1, 3, 3),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn zero_sized_store_rejected() {
        assert!(QStore::new(0, 6, 10).is_err());
        assert!(QStore::new(5, 6, 0).is_err());
    }
}
