//! Helpers shared by the integration targets.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use sigma3::arena::{GameGraph, State, StrategyAutomaton};
use sigma3::verify::PlayLasso;

/// `(memory, position)` pairs reachable from the root under `strategy`.
pub fn reachable_pairs(g: &GameGraph, strategy: &StrategyAutomaton) -> Vec<(usize, State)> {
    let start = (strategy.init(), g.root());
    let mut seen = HashSet::from([start]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some((m, s)) = queue.pop_front() {
        let m2 = strategy.next_memory(m, s);
        let moves: Vec<State> = match strategy.choice(m, s) {
            Some(t) => vec![t],
            None => g.successors(s).to_vec(),
        };
        for t in moves {
            if seen.insert((m2, t)) {
                order.push((m2, t));
                queue.push_back((m2, t));
            }
        }
    }
    order
}

/// Copy of `strategy` with one reachable owned choice replaced, if any such
/// choice has an alternative.
pub fn mutate<R: Rng>(g: &GameGraph, strategy: &StrategyAutomaton, rng: &mut R) -> Option<StrategyAutomaton> {
    let candidates: Vec<(usize, State)> = reachable_pairs(g, strategy)
        .into_iter()
        .filter(|&(_, s)| g.owner(s) == strategy.player() && g.successors(s).len() > 1)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let (m, s) = candidates[rng.gen_range(0..candidates.len())];
    let current = strategy.choice(m, s).unwrap();
    let others: Vec<State> = g.successors(s).iter().copied().filter(|&t| t != current).collect();
    Some(strategy.with_choice(m, s, others[rng.gen_range(0..others.len())]))
}

/// The lasso produced by `strategy` against a random opponent that picks
/// its move as a fixed random function of `(strategy memory, position)`.
pub fn random_opponent_lasso<R: Rng>(g: &GameGraph, strategy: &StrategyAutomaton, rng: &mut R) -> PlayLasso {
    let mut table: HashMap<(usize, State), State> = HashMap::new();
    let mut seen: HashMap<(usize, State), usize> = HashMap::new();
    let mut play = Vec::new();
    let (mut m, mut s) = (strategy.init(), g.root());
    loop {
        if let Some(&i) = seen.get(&(m, s)) {
            return PlayLasso {
                stem: play[..i].to_vec(),
                cycle: play[i..].to_vec(),
            };
        }
        seen.insert((m, s), play.len());
        play.push(s);
        let next = match strategy.choice(m, s) {
            Some(t) => t,
            None => *table.entry((m, s)).or_insert_with(|| {
                let succ = g.successors(s);
                succ[rng.gen_range(0..succ.len())]
            }),
        };
        m = strategy.next_memory(m, s);
        s = next;
    }
}

/// A random walk of `len` steps from the root.
pub fn random_walk<R: Rng>(g: &GameGraph, len: usize, rng: &mut R) -> Vec<State> {
    let mut walk = vec![g.root()];
    for _ in 0..len {
        let succ = g.successors(*walk.last().unwrap());
        walk.push(succ[rng.gen_range(0..succ.len())]);
    }
    walk
}
