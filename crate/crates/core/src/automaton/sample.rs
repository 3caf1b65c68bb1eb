use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{AutomatonError, Dfa};

/// Default number of symbols allowed beyond the shortest accepted length.
pub const DEFAULT_WINDOW_SLACK: usize = 8;

/// `[shortest, shortest + 8]`, or `None` for an empty language.
pub fn default_window(d: &Dfa) -> Option<(usize, usize)> {
    d.shortest_len().map(|s| (s, s + DEFAULT_WINDOW_SLACK))
}

/// Transitions and states visited by earlier samples of one automaton.
#[derive(Debug, Clone, Default)]
pub struct Coverage {
    transitions: HashSet<(usize, usize)>,
    states: HashSet<usize>,
    /// Weight multiplier for transitions not taken before; 1 disables the bias.
    pub novelty: f64,
}

impl Coverage {
    pub fn new() -> Coverage {
        Coverage::with_novelty(4.0)
    }

    pub fn with_novelty(novelty: f64) -> Coverage {
        Coverage {
            novelty,
            ..Coverage::default()
        }
    }

    pub fn record(&mut self, d: &Dfa, s: &str) {
        let Some(syms) = d.alphabet().encode(s) else {
            return;
        };
        let mut q = 0;
        self.states.insert(q);
        for sym in syms {
            let b = d.block_of(sym as usize);
            self.transitions.insert((q, b));
            q = d.next(q, b);
            self.states.insert(q);
        }
    }

    /// Fraction of live states (those that can still reach acceptance) visited.
    pub fn state_coverage(&self, d: &Dfa) -> f64 {
        let live = live_states(d);
        let total = live.iter().filter(|l| **l).count();
        if total == 0 {
            return 0.0;
        }
        let hit = self
            .states
            .iter()
            .filter(|&&q| q < live.len() && live[q])
            .count();
        hit as f64 / total as f64
    }

    pub fn visited_transitions(&self) -> usize {
        self.transitions.len()
    }
}

fn live_states(d: &Dfa) -> Vec<bool> {
    let n = d.num_states();
    let mut live: Vec<bool> = (0..n).map(|q| d.is_accepting(q)).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if !live[q] && (0..d.num_blocks()).any(|b| live[d.next(q, b)]) {
                live[q] = true;
                changed = true;
            }
        }
    }
    live
}

/// `reach[l][q]`: some string of length exactly `l` leads from `q` to acceptance.
fn exact_reach(d: &Dfa, max_len: usize) -> Vec<Vec<bool>> {
    let n = d.num_states();
    let mut reach = vec![(0..n).map(|q| d.is_accepting(q)).collect::<Vec<_>>()];
    for l in 1..=max_len {
        let prev = &reach[l - 1];
        let row = (0..n)
            .map(|q| (0..d.num_blocks()).any(|b| prev[d.next(q, b)]))
            .collect();
        reach.push(row);
    }
    reach
}

/// Draws an accepted string with length in `[min_len, max_len]`.
///
/// The length is chosen uniformly among feasible lengths; each step then
/// picks uniformly among blocks that keep acceptance reachable, with
/// transitions absent from `coverage` weighted by its novelty factor, and a
/// uniform symbol within the chosen block.
pub fn sample_accepted<R: Rng + ?Sized>(
    d: &Dfa,
    rng: &mut R,
    min_len: usize,
    max_len: usize,
    mut coverage: Option<&mut Coverage>,
) -> Result<String, AutomatonError> {
    if d.is_empty() {
        return Err(AutomatonError::EmptyLanguage);
    }
    let infeasible = AutomatonError::InfeasibleWindow {
        min: min_len,
        max: max_len,
    };
    if min_len > max_len {
        return Err(infeasible);
    }
    let reach = exact_reach(d, max_len);
    let lengths: Vec<usize> = (min_len..=max_len).filter(|&l| reach[l][0]).collect();
    let &len = lengths.choose(rng).ok_or(infeasible)?;
    let blocks = d.block_symbols();
    let mut q = 0;
    let mut out = Vec::with_capacity(len);
    for step in 0..len {
        let rem = len - step - 1;
        let options: Vec<(usize, f64)> = (0..d.num_blocks())
            .filter(|&b| reach[rem][d.next(q, b)])
            .map(|b| {
                let w = match &coverage {
                    Some(c) if !c.transitions.contains(&(q, b)) => c.novelty.max(1.0),
                    _ => 1.0,
                };
                (b, w)
            })
            .collect();
        let total: f64 = options.iter().map(|o| o.1).sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pick = options[options.len() - 1].0;
        for &(b, w) in &options {
            if x < w {
                pick = b;
                break;
            }
            x -= w;
        }
        let sym = *blocks[pick].choose(rng).expect("blocks are non-empty");
        out.push(sym);
        if let Some(c) = coverage.as_deref_mut() {
            c.states.insert(q);
            c.transitions.insert((q, pick));
        }
        q = d.next(q, pick);
    }
    if let Some(c) = coverage {
        c.states.insert(q);
    }
    Ok(d.alphabet().decode(&out))
}

/// Number of accepted strings with length in the window, saturating.
pub fn count_in_window(d: &Dfa, min_len: usize, max_len: usize) -> u128 {
    let n = d.num_states();
    let sizes: Vec<u128> = d.block_symbols().iter().map(|b| b.len() as u128).collect();
    // ways[q]: strings of the current length leading from the start to q
    let mut ways = vec![0u128; n];
    ways[0] = 1;
    let mut total: u128 = 0;
    for l in 0..=max_len {
        if l >= min_len {
            for (q, &w) in ways.iter().enumerate() {
                if d.is_accepting(q) {
                    total = total.saturating_add(w);
                }
            }
        }
        if l == max_len {
            break;
        }
        let mut next = vec![0u128; n];
        for (q, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for (b, &size) in sizes.iter().enumerate() {
                let t = d.next(q, b);
                next[t] = next[t].saturating_add(w.saturating_mul(size));
            }
        }
        ways = next;
    }
    total
}

/// Up to `limit` accepted strings with length in the window, shortest
/// first and in symbol order within a length.
pub fn enumerate_window(d: &Dfa, min_len: usize, max_len: usize, limit: usize) -> Vec<String> {
    let reach = exact_reach(d, max_len);
    let mut out = Vec::new();
    for len in min_len..=max_len {
        if !reach[len][0] {
            continue;
        }
        let mut prefix = Vec::with_capacity(len);
        walk(d, &reach, 0, len, &mut prefix, &mut out, limit);
        if out.len() >= limit {
            break;
        }
    }
    out
}

fn walk(
    d: &Dfa,
    reach: &[Vec<bool>],
    q: usize,
    rem: usize,
    prefix: &mut Vec<u8>,
    out: &mut Vec<String>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if rem == 0 {
        out.push(d.alphabet().decode(prefix));
        return;
    }
    for sym in 0..d.alphabet().len() {
        let t = d.next(q, d.block_of(sym));
        if reach[rem - 1][t] {
            prefix.push(sym as u8);
            walk(d, reach, t, rem - 1, prefix, out, limit);
            prefix.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
}
