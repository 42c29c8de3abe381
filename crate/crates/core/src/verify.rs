//! Certification of strategies by emptiness checks on the strategy-restricted
//! graph, and a brute-force winner oracle for tiny arenas.
//!
//! The restricted graph has one node per reachable `(position, memory)` pair,
//! where memory is the strategy's memory before reading the position. At the
//! strategy owner's positions only the chosen move is kept.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::arena::{Arena, ArenaError, GameGraph, Lasso, Player, State, StateSet, StrategyAutomaton, Vertex};
use crate::mullersolve::SubGameObjective;
use crate::payoff::{eval_lasso, PayoffError, Sigma3Payoff};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("strategy belongs to Player {found}, expected Player {expected}")]
    WrongPlayer { expected: Player, found: Player },
    #[error("strategy covers {found} positions but the game has {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("payoff has more than 64 target sets")]
    TooManyLabels,
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// An ultimately periodic play over the states of a game graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayLasso {
    pub stem: Vec<State>,
    pub cycle: Vec<State>,
}

impl PlayLasso {
    pub fn vertices(&self, g: &GameGraph) -> (Vec<Vertex>, Vec<Vertex>) {
        (
            self.stem.iter().map(|&s| g.vertex(s)).collect(),
            self.cycle.iter().map(|&s| g.vertex(s)).collect(),
        )
    }

    /// The play as an arena lasso; `g` must project its root onto the arena
    /// start.
    pub fn to_lasso(&self, g: &GameGraph, arena: &Arena) -> Result<Lasso, ArenaError> {
        let (stem, cycle) = self.vertices(g);
        Lasso::new(arena, stem, cycle)
    }

    /// Does the play satisfy `payoff`, judged on its cycle?
    pub fn satisfies(&self, g: &GameGraph, payoff: &Sigma3Payoff) -> bool {
        let mut inf = FixedBitSet::with_capacity(payoff.vertex_count());
        for &s in &self.cycle {
            inf.insert(g.vertex(s));
        }
        payoff.satisfied_by(&inf)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted(PlayLasso),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }

    pub fn counterexample(&self) -> Option<&PlayLasso> {
        match self {
            Verdict::Certified => None,
            Verdict::Refuted(l) => Some(l),
        }
    }
}

struct Restricted {
    pos: Vec<State>,
    mem: Vec<usize>,
    succ: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    /// Nodes whose position is in the stop set; never expanded.
    stopped: FixedBitSet,
}

impl Restricted {
    fn build(
        g: &GameGraph,
        strategy: Option<&StrategyAutomaton>,
        start: State,
        memory: usize,
        stop: &StateSet,
    ) -> Restricted {
        let memories = strategy.map_or(1, StrategyAutomaton::memory_count);
        let mut index = vec![usize::MAX; g.len() * memories];
        let mut r = Restricted {
            pos: vec![start],
            mem: vec![memory],
            succ: vec![Vec::new()],
            parent: vec![None],
            stopped: FixedBitSet::new(),
        };
        index[start * memories + memory] = 0;
        let mut queue = VecDeque::from([0]);
        let mut stopped = Vec::new();
        while let Some(x) = queue.pop_front() {
            let (s, m) = (r.pos[x], r.mem[x]);
            if stop.contains(s) {
                stopped.push(x);
                continue;
            }
            let (next_mem, moves): (usize, Vec<State>) = match strategy {
                Some(st) => {
                    let m2 = st.next_memory(m, s);
                    match st.choice(m, s) {
                        Some(t) => (m2, vec![t]),
                        None => (m2, g.successors(s).to_vec()),
                    }
                }
                None => (0, g.successors(s).to_vec()),
            };
            for t in moves {
                let key = t * memories + next_mem;
                let y = if index[key] == usize::MAX {
                    let y = r.pos.len();
                    index[key] = y;
                    r.pos.push(t);
                    r.mem.push(next_mem);
                    r.succ.push(Vec::new());
                    r.parent.push(Some(x));
                    queue.push_back(y);
                    y
                } else {
                    index[key]
                };
                r.succ[x].push(y);
            }
        }
        r.stopped = FixedBitSet::with_capacity(r.pos.len());
        for x in stopped {
            r.stopped.insert(x);
        }
        r
    }

    fn len(&self) -> usize {
        self.pos.len()
    }

    fn live(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        set.insert_range(..);
        set.difference_with(&self.stopped);
        set
    }

    fn stem_to(&self, x: usize) -> Vec<State> {
        let mut path = Vec::new();
        let mut cur = self.parent[x];
        while let Some(p) = cur {
            path.push(self.pos[p]);
            cur = self.parent[p];
        }
        path.reverse();
        path
    }

    /// Shortest path of at least one step from `from` to a node satisfying
    /// `goal`, inside `region`; returns the nodes after `from`.
    fn step_path(
        &self,
        region: &FixedBitSet,
        from: usize,
        goal: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &y in &self.succ[from] {
            if region.contains(y) && !prev.contains_key(&y) {
                prev.insert(y, usize::MAX);
                queue.push_back(y);
            }
        }
        while let Some(x) = queue.pop_front() {
            if goal(x) {
                let mut path = vec![x];
                let mut cur = x;
                while prev[&cur] != usize::MAX {
                    cur = prev[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in &self.succ[x] {
                if region.contains(y) && !prev.contains_key(&y) {
                    prev.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// A lasso entering the strongly connected `region` at its earliest
    /// discovered node and cycling through a node of every label in `visit`.
    fn lasso_in(&self, region: &FixedBitSet, labels: &[u64], visit: u64) -> PlayLasso {
        let entry = region.ones().next().expect("region is nonempty");
        let mut cycle = vec![entry];
        let mut seen = labels[entry];
        let mut cur = entry;
        let mut todo = visit & !seen;
        while todo != 0 {
            let bit = todo & todo.wrapping_neg();
            let path = self
                .step_path(region, cur, |x| labels[x] & bit != 0)
                .expect("label inside strongly connected region");
            for &x in &path {
                seen |= labels[x];
            }
            cur = *path.last().unwrap();
            cycle.extend(path);
            todo = visit & !seen;
        }
        let back = self
            .step_path(region, cur, |x| x == entry)
            .expect("region is strongly connected");
        cycle.extend(&back[..back.len() - 1]);
        PlayLasso {
            stem: self.stem_to(entry),
            cycle: cycle.iter().map(|&x| self.pos[x]).collect(),
        }
    }
}

/// Strongly connected components of the subgraph induced by `region`
/// (iterative Tarjan).
fn sccs(succ: &[Vec<usize>], region: &FixedBitSet) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in region.ones() {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if !region.contains(w) {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

fn has_cycle(succ: &[Vec<usize>], comp: &[usize]) -> bool {
    comp.len() > 1 || succ[comp[0]].contains(&comp[0])
}

fn to_set(n: usize, items: &[usize]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(n);
    for &x in items {
        set.insert(x);
    }
    set
}

fn check_strategy(
    g: &GameGraph,
    payoff: &Sigma3Payoff,
    strategy: &StrategyAutomaton,
    expected: Player,
) -> Result<(), VerifyError> {
    if strategy.player() != expected {
        return Err(VerifyError::WrongPlayer {
            expected,
            found: strategy.player(),
        });
    }
    if strategy.position_count() != g.len() {
        return Err(VerifyError::ShapeMismatch {
            expected: g.len(),
            found: strategy.position_count(),
        });
    }
    if payoff.label_count() > 64 {
        return Err(VerifyError::TooManyLabels);
    }
    if let Some(s) = (0..g.len()).find(|&s| g.vertex(s) >= payoff.vertex_count()) {
        return Err(PayoffError::VertexOutOfRange(g.vertex(s)).into());
    }
    Ok(())
}

fn node_labels(g: &GameGraph, payoff: &Sigma3Payoff, r: &Restricted) -> Vec<u64> {
    r.pos.iter().map(|&s| payoff.vertex_labels(g.vertex(s))).collect()
}

/// Is `tau` winning for II (every consistent play avoids the payoff) from the
/// root of `g`?
pub fn verify_ii(
    g: &GameGraph,
    payoff: &Sigma3Payoff,
    tau: &StrategyAutomaton,
) -> Result<Verdict, VerifyError> {
    verify_ii_from(g, &SubGameObjective::payoff_only(payoff, g), tau, g.root(), tau.init())
}

/// Is `sigma` winning for I (every consistent play meets the payoff) from the
/// root of `g`?
pub fn verify_i(
    g: &GameGraph,
    payoff: &Sigma3Payoff,
    sigma: &StrategyAutomaton,
) -> Result<Verdict, VerifyError> {
    verify_i_from(g, &SubGameObjective::payoff_only(payoff, g), sigma, g.root(), sigma.init())
}

/// [`verify_ii`] for "payoff or reach", from an explicit start and memory.
/// Reaching the reach set counts as a violation.
pub fn verify_ii_from(
    g: &GameGraph,
    obj: &SubGameObjective,
    tau: &StrategyAutomaton,
    start: State,
    memory: usize,
) -> Result<Verdict, VerifyError> {
    check_strategy(g, obj.payoff, tau, Player::II)?;
    let r = Restricted::build(g, Some(tau), start, memory, &obj.reach);
    if let Some(x) = r.stopped.ones().next() {
        let mut stem = r.stem_to(x);
        let tail = Restricted::build(g, Some(tau), r.pos[x], r.mem[x], &g.empty_set());
        let mut walk = vec![0usize];
        let mut at = HashMap::from([(0usize, 0usize)]);
        loop {
            let next = tail.succ[*walk.last().unwrap()][0];
            if let Some(&i) = at.get(&next) {
                stem.extend(walk[..i].iter().map(|&y| tail.pos[y]));
                let cycle = walk[i..].iter().map(|&y| tail.pos[y]).collect();
                return Ok(Verdict::Refuted(PlayLasso { stem, cycle }));
            }
            at.insert(next, walk.len());
            walk.push(next);
        }
    }
    let labels = node_labels(g, obj.payoff, &r);
    let comps = obj.payoff.component_masks();
    for comp in sccs(&r.succ, &r.live()) {
        if !has_cycle(&r.succ, &comp) {
            continue;
        }
        let seen = comp.iter().fold(0u64, |m, &x| m | labels[x]);
        if let Some(&mask) = comps.iter().find(|&&c| c & seen == c) {
            let region = to_set(r.len(), &comp);
            return Ok(Verdict::Refuted(r.lasso_in(&region, &labels, mask)));
        }
    }
    Ok(Verdict::Certified)
}

/// [`verify_i`] for "payoff or reach", from an explicit start and memory.
/// Plays that reach the reach set count as won.
pub fn verify_i_from(
    g: &GameGraph,
    obj: &SubGameObjective,
    sigma: &StrategyAutomaton,
    start: State,
    memory: usize,
) -> Result<Verdict, VerifyError> {
    check_strategy(g, obj.payoff, sigma, Player::I)?;
    let r = Restricted::build(g, Some(sigma), start, memory, &obj.reach);
    let labels = node_labels(g, obj.payoff, &r);
    let comps = obj.payoff.component_masks();
    let mut failed = HashSet::new();
    match losing_subset(&r.succ, &labels, &comps, r.live(), &mut failed) {
        Some(region) => Ok(Verdict::Refuted(r.lasso_in(&region, &labels, 0))),
        None => Ok(Verdict::Certified),
    }
}

/// A strongly connected subset of `region` with a cycle that misses some
/// target set of every component.
fn losing_subset(
    succ: &[Vec<usize>],
    labels: &[u64],
    comps: &[u64],
    region: FixedBitSet,
    failed: &mut HashSet<FixedBitSet>,
) -> Option<FixedBitSet> {
    if failed.contains(&region) {
        return None;
    }
    for comp in sccs(succ, &region) {
        if !has_cycle(succ, &comp) {
            continue;
        }
        let seen = comp.iter().fold(0u64, |m, &x| m | labels[x]);
        let set = to_set(succ.len(), &comp);
        let Some(&mask) = comps.iter().find(|&&c| c & seen == c) else {
            return Some(set);
        };
        let mut bits = mask;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            bits ^= bit;
            let mut sub = set.clone();
            for &x in &comp {
                if labels[x] & bit != 0 {
                    sub.set(x, false);
                }
            }
            if let Some(found) = losing_subset(succ, labels, comps, sub, failed) {
                return Some(found);
            }
        }
    }
    failed.insert(region);
    None
}

/// A play of `g` from its root satisfying component `k`, if any; `None`
/// certifies that no play of `g` belongs to that component.
pub fn component_play(g: &GameGraph, payoff: &Sigma3Payoff, k: usize) -> Option<PlayLasso> {
    let r = Restricted::build(g, None, g.root(), 0, &g.empty_set());
    let labels = node_labels(g, payoff, &r);
    let mask = payoff.component_masks()[k];
    for comp in sccs(&r.succ, &r.live()) {
        if !has_cycle(&r.succ, &comp) {
            continue;
        }
        let seen = comp.iter().fold(0u64, |m, &x| m | labels[x]);
        if seen & mask == mask {
            return Some(r.lasso_in(&to_set(r.len(), &comp), &labels, mask));
        }
    }
    None
}

/// Does the play `lasso` follow `strategy` at every position of its owner?
pub fn lasso_consistent(g: &GameGraph, lasso: &PlayLasso, strategy: &StrategyAutomaton) -> bool {
    let seq: Vec<State> = lasso.stem.iter().chain(&lasso.cycle).copied().collect();
    if seq.is_empty() || lasso.cycle.is_empty() || seq[0] != g.root() {
        return false;
    }
    let wrap = lasso.stem.len();
    let next = |i: usize| if i + 1 < seq.len() { i + 1 } else { wrap };
    let mut memory = strategy.init();
    let mut i = 0;
    let mut seen = HashSet::new();
    loop {
        if i >= wrap && !seen.insert((i, memory)) {
            return true;
        }
        let s = seq[i];
        let t = seq[next(i)];
        if !g.has_edge(s, t) {
            return false;
        }
        if g.owner(s) == strategy.player() && strategy.choice(memory, s) != Some(t) {
            return false;
        }
        memory = strategy.next_memory(memory, s);
        i = next(i);
    }
}

/// Limits for [`brute_force_winner`].
#[derive(Clone, Copy, Debug)]
pub struct BruteForceCaps {
    pub max_vertices: usize,
    pub max_strategies: u64,
    /// Largest restricted graph whose subsets are enumerated (at most 24).
    pub max_restricted: usize,
}

impl Default for BruteForceCaps {
    fn default() -> Self {
        BruteForceCaps {
            max_vertices: 8,
            max_strategies: 200_000,
            max_restricted: 16,
        }
    }
}

/// Winner from the start vertex by exhaustive search.
///
/// Every Player II strategy with at most `memory` memory states is tried.
/// Against a fixed strategy, Player I wins exactly when some reachable
/// strongly connected set of restricted nodes, toured by a lasso, satisfies
/// the payoff under [`eval_lasso`]. Player II wins when some strategy admits
/// no such set; otherwise Player I wins by determinacy. Positional strategies
/// suffice for II on these payoffs, so `memory = 1` is exact.
pub fn brute_force_winner(
    arena: &Arena,
    payoff: &Sigma3Payoff,
    memory: usize,
    caps: BruteForceCaps,
) -> Result<Player, VerifyError> {
    assert!(memory >= 1);
    let n = arena.len();
    if n > caps.max_vertices {
        return Err(VerifyError::TooLarge(format!("{n} vertices")));
    }
    let restricted = n * memory;
    if restricted > caps.max_restricted.min(24) {
        return Err(VerifyError::TooLarge(format!("{restricted} restricted nodes")));
    }
    let owned: Vec<Vertex> = (0..n).filter(|&v| arena.owner(v) == Player::II).collect();
    // Mixed radix: one digit per (memory, vertex) update, then one per
    // (memory, owned vertex) choice.
    let mut radix: Vec<u64> = vec![memory as u64; memory * n];
    for _ in 0..memory {
        radix.extend(owned.iter().map(|&v| arena.successors(v).len() as u64));
    }
    let total = radix
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r))
        .filter(|&t| t <= caps.max_strategies)
        .ok_or_else(|| VerifyError::TooLarge("too many Player II strategies".into()))?;

    let mut digits = vec![0u64; radix.len()];
    for _ in 0..total {
        let update = |m: usize, v: Vertex| digits[m * n + v] as usize;
        let choice = |m: usize, i: usize| {
            let v = owned[i];
            arena.successors(v)[digits[memory * n + m * owned.len() + i] as usize]
        };
        if !player_i_beats(arena, payoff, memory, &owned, update, choice)? {
            return Ok(Player::II);
        }
        for (d, &r) in digits.iter_mut().zip(&radix) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    Ok(Player::I)
}

/// Does some play consistent with the given II strategy satisfy the payoff?
fn player_i_beats(
    arena: &Arena,
    payoff: &Sigma3Payoff,
    memory: usize,
    owned: &[Vertex],
    update: impl Fn(usize, Vertex) -> usize,
    choice: impl Fn(usize, usize) -> Vertex,
) -> Result<bool, VerifyError> {
    let n = arena.len();
    let slot: Vec<Option<usize>> = (0..n).map(|v| owned.iter().position(|&w| w == v)).collect();
    // Nodes (vertex, memory), discovered from (start, 0).
    let mut id = vec![usize::MAX; n * memory];
    let mut nodes: Vec<(Vertex, usize)> = vec![(arena.start(), 0)];
    let mut parent: Vec<usize> = vec![usize::MAX];
    id[arena.start() * memory] = 0;
    let mut succ: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (v, m) = nodes[i];
        let m2 = update(m, v);
        let moves: Vec<Vertex> = match slot[v] {
            Some(k) => vec![choice(m, k)],
            None => arena.successors(v).to_vec(),
        };
        let mut out = 0u32;
        for w in moves {
            let key = w * memory + m2;
            if id[key] == usize::MAX {
                id[key] = nodes.len();
                nodes.push((w, m2));
                parent.push(i);
            }
            out |= 1 << id[key];
        }
        succ.push(out);
        i += 1;
    }
    let count = nodes.len();
    let mut pred = vec![0u32; count];
    for (x, &out) in succ.iter().enumerate() {
        for y in 0..count {
            if out >> y & 1 == 1 {
                pred[y] |= 1 << x;
            }
        }
    }
    let closure = |edges: &[u32], x: usize, within: u32| {
        let mut reached = edges[x] & within;
        loop {
            let mut grown = reached;
            for y in 0..count {
                if reached >> y & 1 == 1 {
                    grown |= edges[y] & within;
                }
            }
            if grown == reached {
                return reached;
            }
            reached = grown;
        }
    };
    for subset in 1u32..(1u32 << count) {
        let x = subset.trailing_zeros() as usize;
        if closure(&succ, x, subset) != subset || closure(&pred, x, subset) != subset {
            continue;
        }
        // Tour every node of the subset from x and back.
        let mut tour = vec![x];
        let mut cur = x;
        let mut missing = subset & !(1 << x);
        while missing != 0 {
            let path = bit_path(&succ, cur, subset, |y| missing >> y & 1 == 1);
            for &y in &path {
                missing &= !(1 << y);
            }
            cur = *path.last().unwrap();
            tour.extend(path);
        }
        let back = bit_path(&succ, cur, subset, |y| y == x);
        tour.extend(&back[..back.len() - 1]);
        let mut stem = Vec::new();
        let mut p = parent[x];
        while p != usize::MAX {
            stem.push(nodes[p].0);
            p = parent[p];
        }
        stem.reverse();
        let cycle = tour.iter().map(|&y| nodes[y].0).collect();
        let lasso = Lasso::new(arena, stem, cycle)?;
        if eval_lasso(&lasso, payoff)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn bit_path(succ: &[u32], from: usize, within: u32, goal: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut prev = vec![usize::MAX; succ.len()];
    let mut queue = VecDeque::new();
    let mut seen = 0u32;
    for y in 0..succ.len() {
        if (succ[from] & within) >> y & 1 == 1 {
            seen |= 1 << y;
            queue.push_back(y);
        }
    }
    while let Some(x) = queue.pop_front() {
        if goal(x) {
            let mut path = vec![x];
            let mut cur = x;
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return path;
        }
        for y in 0..succ.len() {
            if (succ[x] & within) >> y & 1 == 1 && seen >> y & 1 == 0 {
                seen |= 1 << y;
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    panic!("subset is strongly connected");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{validate_arena, RawArena};

    fn ex1() -> Arena {
        validate_arena(&RawArena {
            vertices: vec![("a".into(), Player::I), ("b".into(), Player::II)],
            edges: vec![
                ("a".into(), "b".into()),
                ("b".into(), "a".into()),
                ("b".into(), "b".into()),
            ],
            start: "a".into(),
        })
        .unwrap()
    }

    fn ex1p() -> Sigma3Payoff {
        Sigma3Payoff::new(2, vec![vec![vec![0]]]).unwrap()
    }

    fn ex2() -> Sigma3Payoff {
        Sigma3Payoff::new(2, vec![vec![vec![1]]]).unwrap()
    }

    #[test]
    fn ii_staying_on_b_wins_ex1p() {
        let a = ex1();
        let g = a.graph();
        let stay = StrategyAutomaton::positional(&g, Player::II, |_| 1).unwrap();
        assert!(verify_ii(&g, &ex1p(), &stay).unwrap().is_certified());

        let leave = StrategyAutomaton::positional(&g, Player::II, |_| 0).unwrap();
        let v = verify_ii(&g, &ex1p(), &leave).unwrap();
        let cex = v.counterexample().unwrap();
        assert_eq!(cex.stem, Vec::<State>::new());
        assert_eq!(cex.cycle, vec![0, 1]);
        assert!(eval_lasso(&cex.to_lasso(&g, &a).unwrap(), &ex1p()).unwrap());
        assert!(lasso_consistent(&g, cex, &leave));
    }

    #[test]
    fn every_ii_strategy_loses_ex2() {
        let g = ex1().graph();
        for t in [0, 1] {
            let tau = StrategyAutomaton::positional(&g, Player::II, |_| t).unwrap();
            assert!(!verify_ii(&g, &ex2(), &tau).unwrap().is_certified());
        }
    }

    #[test]
    fn player_i_checks() {
        let a = ex1();
        let g = a.graph();
        let sigma = StrategyAutomaton::positional(&g, Player::I, |_| 1).unwrap();
        assert!(verify_i(&g, &ex2(), &sigma).unwrap().is_certified());
        let v = verify_i(&g, &ex1p(), &sigma).unwrap();
        let cex = v.counterexample().unwrap();
        assert_eq!(cex.cycle, vec![1]);
        assert_eq!(cex.stem, vec![0]);
        assert!(!eval_lasso(&cex.to_lasso(&g, &a).unwrap(), &ex1p()).unwrap());
    }

    #[test]
    fn wrong_player_is_rejected() {
        let g = ex1().graph();
        let sigma = StrategyAutomaton::positional(&g, Player::I, |_| 1).unwrap();
        assert!(matches!(
            verify_ii(&g, &ex1p(), &sigma),
            Err(VerifyError::WrongPlayer { .. })
        ));
    }

    #[test]
    fn reach_counts_for_player_i() {
        let g = ex1().graph();
        let mut reach = g.empty_set();
        reach.insert(1);
        let p = ex1p();
        let obj = SubGameObjective::with_reach(&p, reach);
        let sigma = StrategyAutomaton::positional(&g, Player::I, |_| 1).unwrap();
        assert!(verify_i_from(&g, &obj, &sigma, 0, 0).unwrap().is_certified());
        let tau = StrategyAutomaton::positional(&g, Player::II, |_| 1).unwrap();
        let v = verify_ii_from(&g, &obj, &tau, 0, 0).unwrap();
        assert_eq!(v.counterexample().unwrap().stem, vec![0]);
    }

    #[test]
    fn component_plays() {
        let g = ex1().graph();
        assert!(component_play(&g, &ex1p(), 0).is_some());
        let (q, _) = g.induced(&{
            let mut s = g.empty_set();
            s.insert(1);
            s
        }, 1);
        assert!(component_play(&q, &ex1p(), 0).is_none());
    }

    #[test]
    fn brute_force_examples() {
        let a = ex1();
        let caps = BruteForceCaps::default();
        assert_eq!(brute_force_winner(&a, &ex1p(), 1, caps).unwrap(), Player::II);
        assert_eq!(brute_force_winner(&a, &ex2(), 1, caps).unwrap(), Player::I);
        assert_eq!(brute_force_winner(&a, &ex1p(), 2, caps).unwrap(), Player::II);
        assert_eq!(brute_force_winner(&a, &ex2(), 2, caps).unwrap(), Player::I);
        let tight = BruteForceCaps {
            max_vertices: 1,
            ..caps
        };
        assert!(matches!(
            brute_force_winner(&a, &ex1p(), 1, tight),
            Err(VerifyError::TooLarge(_))
        ));
    }

    #[test]
    fn generalized_buchi_needs_both_targets() {
        // I alternates at h between a and b only with memory.
        let a = validate_arena(&RawArena {
            vertices: vec![
                ("h".into(), Player::I),
                ("a".into(), Player::II),
                ("b".into(), Player::II),
            ],
            edges: vec![
                ("h".into(), "a".into()),
                ("h".into(), "b".into()),
                ("a".into(), "h".into()),
                ("b".into(), "h".into()),
            ],
            start: "h".into(),
        })
        .unwrap();
        let g = a.graph();
        let p = Sigma3Payoff::new(3, vec![vec![vec![1], vec![2]]]).unwrap();
        let always_a = StrategyAutomaton::positional(&g, Player::I, |_| 1).unwrap();
        assert!(!verify_i(&g, &p, &always_a).unwrap().is_certified());
        let alternate = StrategyAutomaton::new(
            &g,
            Player::I,
            0,
            vec![vec![1, 0, 0], vec![0, 1, 1]],
            vec![vec![Some(1), None, None], vec![Some(2), None, None]],
        )
        .unwrap();
        assert!(verify_i(&g, &p, &alternate).unwrap().is_certified());
        assert_eq!(brute_force_winner(&a, &p, 1, BruteForceCaps::default()).unwrap(), Player::I);
    }
}
