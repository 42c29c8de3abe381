//! Exact solver for objectives "payoff or reach R" on game graphs.
//!
//! Reach states are redirected to a fresh absorbing sink that alone satisfies
//! a fresh one-target component, which turns the objective into a pure Muller
//! condition over labels: a state carries label `(k, j)` when its vertex lies
//! in `F[k][j]`, and Player I wins when the labels seen infinitely often
//! contain a whole component.
//!
//! That condition is upward closed, so its Zielonka tree has depth at most
//! two: if the labels present do not contain a component Player II wins
//! everywhere, otherwise the children of the root are the maximal losing label
//! sets, obtained by deleting one label from every complete component. The
//! McNaughton-Zielonka iteration then never needs to recurse. Player II's
//! strategies are positional; Player I cycles through the children, which is
//! the only memory the condition needs.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::arena::{ArenaError, GameGraph, Player, Quasistrategy, State, StateSet, StrategyAutomaton};
use crate::payoff::Sigma3Payoff;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("reach set does not match the game ({0} states expected)")]
    ReachShape(usize),
    #[error("payoff is defined over {payoff} vertices but the game mentions vertex {vertex}")]
    VertexOutOfRange { payoff: usize, vertex: usize },
    #[error("objective has {0} labels, more than the supported 63")]
    TooManyLabels(usize),
    #[error("Player I wins from the root")]
    RootLosing,
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// "Payoff or eventually reach one of `reach`".
#[derive(Clone, Debug)]
pub struct SubGameObjective<'a> {
    pub payoff: &'a Sigma3Payoff,
    pub reach: StateSet,
}

impl<'a> SubGameObjective<'a> {
    pub fn payoff_only(payoff: &'a Sigma3Payoff, game: &GameGraph) -> Self {
        SubGameObjective {
            payoff,
            reach: game.empty_set(),
        }
    }

    pub fn with_reach(payoff: &'a Sigma3Payoff, reach: StateSet) -> Self {
        SubGameObjective { payoff, reach }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub win_i: StateSet,
    pub win_ii: StateSet,
    /// Winning for I from every state of `win_i`, whatever the initial memory.
    pub strat_i: StrategyAutomaton,
    /// Positional, winning for II from every state of `win_ii`.
    pub strat_ii: StrategyAutomaton,
}

impl SolveResult {
    pub fn winner_at(&self, s: State) -> Player {
        if self.win_i.contains(s) {
            Player::I
        } else {
            Player::II
        }
    }
}

/// The objective compiled to a labelled graph.
struct LabelledGame {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    owner: Vec<Player>,
    labels: Vec<u64>,
    components: Vec<u64>,
}

impl LabelledGame {
    fn build(g: &GameGraph, obj: &SubGameObjective) -> Result<Self, SolveError> {
        let n = g.len();
        if obj.reach.len() != n {
            return Err(SolveError::ReachShape(n));
        }
        let payoff = obj.payoff;
        let sink_label = payoff.label_count();
        if sink_label >= 63 {
            return Err(SolveError::TooManyLabels(sink_label + 1));
        }
        let mut components = payoff.component_masks();
        components.push(1 << sink_label);

        let sink = n;
        let mut succ = Vec::with_capacity(n + 1);
        let mut owner = Vec::with_capacity(n + 1);
        let mut labels = Vec::with_capacity(n + 1);
        for s in 0..n {
            let v = g.vertex(s);
            if v >= payoff.vertex_count() {
                return Err(SolveError::VertexOutOfRange {
                    payoff: payoff.vertex_count(),
                    vertex: v,
                });
            }
            labels.push(payoff.vertex_labels(v));
            owner.push(g.owner(s));
            if obj.reach.contains(s) {
                succ.push(vec![sink]);
            } else {
                succ.push(g.successors(s).to_vec());
            }
        }
        succ.push(vec![sink]);
        owner.push(Player::I);
        labels.push(1 << sink_label);

        let mut pred = vec![Vec::new(); n + 1];
        for (s, out) in succ.iter().enumerate() {
            for &t in out {
                pred[t].push(s);
            }
        }
        Ok(LabelledGame {
            succ,
            pred,
            owner,
            labels,
            components,
        })
    }

    fn len(&self) -> usize {
        self.succ.len()
    }

    fn wins_i(&self, mask: u64) -> bool {
        self.components.iter().any(|&c| c & !mask == 0)
    }

    /// Maximal label sets inside `present` on which Player I loses.
    fn losing_children(&self, present: u64) -> Vec<u64> {
        let complete: Vec<u64> = self
            .components
            .iter()
            .copied()
            .filter(|&c| c & present == c)
            .collect();
        let mut removals = vec![0u64];
        for comp in complete {
            let mut next = Vec::new();
            for r in &removals {
                let mut bits = comp;
                while bits != 0 {
                    let low = bits & bits.wrapping_neg();
                    next.push(r | low);
                    bits ^= low;
                }
            }
            removals = next;
        }
        let mut children: Vec<u64> = removals.into_iter().map(|r| present & !r).collect();
        children.sort_unstable();
        children.dedup();
        children
    }

    /// Attractor of `target` for `player` inside `region`, with for each
    /// attracted state its distance to `target`.
    fn attractor(&self, region: &FixedBitSet, target: &FixedBitSet, player: Player) -> Attractor {
        let n = self.len();
        let mut rank = vec![usize::MAX; n];
        let mut set = FixedBitSet::with_capacity(n);
        let mut pending: Vec<usize> = (0..n)
            .map(|s| self.succ[s].iter().filter(|&&t| region.contains(t)).count())
            .collect();
        let mut frontier: Vec<usize> = target.ones().filter(|&s| region.contains(s)).collect();
        for &s in &frontier {
            set.insert(s);
            rank[s] = 0;
        }
        let mut depth = 0;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &t in &frontier {
                for &s in &self.pred[t] {
                    if !region.contains(s) || set.contains(s) {
                        continue;
                    }
                    let take = if self.owner[s] == player {
                        true
                    } else {
                        pending[s] -= 1;
                        pending[s] == 0
                    };
                    if take {
                        set.insert(s);
                        rank[s] = depth;
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        Attractor { set, rank }
    }

    fn first_successor_in(&self, s: usize, region: &FixedBitSet) -> Option<usize> {
        self.succ[s].iter().copied().find(|&t| region.contains(t))
    }
}

struct Attractor {
    set: FixedBitSet,
    rank: Vec<usize>,
}

impl Attractor {
    /// Least successor strictly closer to the target.
    fn descend(&self, game: &LabelledGame, s: usize) -> Option<usize> {
        game.succ[s]
            .iter()
            .copied()
            .find(|&t| self.set.contains(t) && self.rank[t] < self.rank[s])
    }
}

/// Winning regions and strategies for "payoff or reach" on `g`.
pub fn solve(g: &GameGraph, obj: &SubGameObjective) -> Result<SolveResult, SolveError> {
    let game = LabelledGame::build(g, obj)?;
    let n = game.len();
    let mut present = 0u64;
    for &l in &game.labels {
        present |= l;
    }

    let mut remaining = FixedBitSet::with_capacity(n);
    remaining.insert_range(..);
    let mut ii_move: Vec<Option<usize>> = vec![None; n];

    let children = if game.wins_i(present) {
        game.losing_children(present)
    } else {
        Vec::new()
    };

    if children.is_empty() {
        // Player I loses on every label set: II wins everywhere it can stay.
        for s in 0..n {
            ii_move[s] = game.first_successor_in(s, &remaining);
        }
        remaining.clear();
    } else {
        'outer: loop {
            for &d in &children {
                let mut escape = FixedBitSet::with_capacity(n);
                for s in remaining.ones() {
                    if game.labels[s] & !d != 0 {
                        escape.insert(s);
                    }
                }
                let attr = game.attractor(&remaining, &escape, Player::I);
                let mut trap = remaining.clone();
                trap.difference_with(&attr.set);
                if trap.is_clear() {
                    continue;
                }
                // Inside the trap every label lies in d, a losing set for I.
                for s in trap.ones() {
                    if game.owner[s] == Player::II {
                        ii_move[s] = game.first_successor_in(s, &trap);
                    }
                }
                let pull = game.attractor(&remaining, &trap, Player::II);
                for s in pull.set.ones() {
                    if game.owner[s] == Player::II && !trap.contains(s) {
                        ii_move[s] = pull.descend(&game, s);
                    }
                }
                remaining.difference_with(&pull.set);
                continue 'outer;
            }
            break;
        }
    }

    let win_i_aug = remaining;
    let base_len = g.len();
    let mut win_i = g.empty_set();
    let mut win_ii = g.empty_set();
    for s in 0..base_len {
        if win_i_aug.contains(s) {
            win_i.insert(s);
        } else {
            win_ii.insert(s);
        }
    }

    // Player II: positional.
    let strat_ii = StrategyAutomaton::positional(g, Player::II, |s| {
        match ii_move[s] {
            Some(t) if t < base_len && win_ii.contains(s) => t,
            _ => g.successors(s)[0],
        }
    })?;

    // Player I: memory = index of the child currently being escaped.
    let m = children.len().max(1);
    let mut escapes = Vec::with_capacity(children.len());
    let mut attractors = Vec::with_capacity(children.len());
    for &d in &children {
        let mut escape = FixedBitSet::with_capacity(n);
        for s in win_i_aug.ones() {
            if game.labels[s] & !d != 0 {
                escape.insert(s);
            }
        }
        attractors.push(game.attractor(&win_i_aug, &escape, Player::I));
        escapes.push(escape);
    }
    let advance = |mut i: usize, s: usize| {
        if escapes.is_empty() || !win_i_aug.contains(s) {
            return i;
        }
        for _ in 0..m {
            if escapes[i].contains(s) {
                i = (i + 1) % m;
            } else {
                break;
            }
        }
        i
    };
    let mut update = vec![vec![0; base_len]; m];
    let mut choose = vec![vec![None; base_len]; m];
    for i in 0..m {
        for s in 0..base_len {
            let next = advance(i, s);
            update[i][s] = next;
            if g.owner(s) != Player::I {
                continue;
            }
            let fallback = g.successors(s)[0];
            let mv = if !win_i_aug.contains(s) || obj.reach.contains(s) || escapes.is_empty() {
                fallback
            } else if escapes[next].contains(s) {
                game.first_successor_in(s, &win_i_aug).unwrap_or(fallback)
            } else {
                attractors[next].descend(&game, s).unwrap_or(fallback)
            };
            choose[i][s] = Some(mv);
        }
    }
    let strat_i = StrategyAutomaton::new(g, Player::I, 0, update, choose)?;

    Ok(SolveResult {
        win_i,
        win_ii,
        strat_i,
        strat_ii,
    })
}

/// Player II's non-losing quasistrategy from `root`: the II-winning states
/// reachable from `root` when II never leaves its winning region.
pub fn nonlosing_region(
    g: &GameGraph,
    obj: &SubGameObjective,
    root: State,
) -> Result<Quasistrategy, SolveError> {
    let result = solve(g, obj)?;
    if !result.win_ii.contains(root) {
        return Err(SolveError::RootLosing);
    }
    let keep = g.reachable_within(root, &result.win_ii);
    Ok(Quasistrategy::from_subset(g, &keep, root)?)
}
