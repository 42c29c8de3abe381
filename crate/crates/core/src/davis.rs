//! Player II's winning region as the least fixed point of a monotone operator,
//! and strategies for both players extracted from its stages.
//!
//! Positions live in the *space*: states of the game paired with the
//! obligation pointer of the dodged component's monitor. For a set `X` of
//! such positions, `Φ(X)` holds the positions from which, for some budget
//! `n`, Player I cannot force "the payoff holds, or `n` rounds complete and
//! play then stands outside `X`". Rounds are counted from the position
//! itself, which makes membership a function of the space position alone.
//!
//! Budgets are handled on the *counted space*: space positions paired with a
//! flag recording whether a round has completed since the start. `R_0` is
//! I's winning region for "payoff or leave `X`"; `R_n` is I's winning region
//! on the counted space for "payoff or stand, flagged, inside `R_{n-1}`".
//! The regions decrease in `n` and `Φ(X)` is the complement of their limit.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::arena::{ArenaError, GameGraph, Player, Product, Quasistrategy, State, StateSet, StrategyAutomaton, Vertex};
use crate::fixpoint::{iterate, FixpointError, MonotoneOperator, Prewellorder, StageSequence};
use crate::mullersolve::{nonlosing_region, solve as solve_subgame, SolveError, SubGameObjective};
use crate::payoff::Sigma3Payoff;
use crate::verify::{component_play, verify_i, verify_ii, VerifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DavisError {
    #[error("component {0} does not exist")]
    NoSuchComponent(usize),
    #[error("game vertex {0} is outside the payoff's arena")]
    VertexOutOfRange(Vertex),
    #[error("the start position lies in the least fixed point")]
    StartIsGood,
    #[error("position {0} is not in the least fixed point")]
    NotGood(State),
    #[error("Player I wins from the start")]
    PlayerIWins,
    #[error("budget regions did not stabilize within {0} steps")]
    BudgetDivergence(usize),
    #[error("refinement exceeded {0} nodes")]
    RefinementDiverged(usize),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

impl From<FixpointError<DavisError>> for DavisError {
    fn from(e: FixpointError<DavisError>) -> Self {
        match e {
            FixpointError::Operator(inner) => inner,
            other => DavisError::CertificationFailed(other.to_string()),
        }
    }
}

/// The space for one game and one dodged component.
#[derive(Clone, Debug)]
pub struct DavisContext {
    game: GameGraph,
    payoff: Sigma3Payoff,
    dodged: usize,
    /// Game states paired with the obligation pointer; root first.
    space: Product<usize>,
    /// Space positions paired with a "round completed" flag.
    counted: Product<u8>,
}

impl DavisContext {
    pub fn new(game: &GameGraph, payoff: &Sigma3Payoff, dodged: usize) -> Result<Self, DavisError> {
        if dodged >= payoff.component_count() {
            return Err(DavisError::NoSuchComponent(dodged));
        }
        if let Some(s) = (0..game.len()).find(|&s| game.vertex(s) >= payoff.vertex_count()) {
            return Err(DavisError::VertexOutOfRange(game.vertex(s)));
        }
        let monitor = payoff.monitor(dodged);
        let fresh = |s: State| monitor.step(0, game.vertex(s)).0;
        let mut seeds = vec![(game.root(), fresh(game.root()))];
        seeds.extend((0..game.len()).filter(|&s| s != game.root()).map(|s| (s, fresh(s))));
        let space = game.product(&seeds, |_, &j, t| Some(monitor.step(j, game.vertex(t)).0));
        let wraps = |p: State, t: State| monitor.step(space.memory[p], space.graph.vertex(t)).1;
        let counted_seeds: Vec<(State, u8)> = (0..space.graph.len()).map(|p| (p, 0)).collect();
        let counted = space
            .graph
            .product(&counted_seeds, |p, &c, t| Some(if wraps(p, t) { 1 } else { c }));
        Ok(DavisContext {
            game: game.clone(),
            payoff: payoff.clone(),
            dodged,
            space,
            counted,
        })
    }

    pub fn game(&self) -> &GameGraph {
        &self.game
    }

    pub fn payoff(&self) -> &Sigma3Payoff {
        &self.payoff
    }

    pub fn dodged(&self) -> usize {
        self.dodged
    }

    /// The space as a game graph, rooted at the start position.
    pub fn space(&self) -> &GameGraph {
        &self.space.graph
    }

    pub fn space_len(&self) -> usize {
        self.space.graph.len()
    }

    /// The start position (the game root with a fresh pointer).
    pub fn start(&self) -> State {
        self.space.graph.root()
    }

    pub fn game_state(&self, p: State) -> State {
        self.space.base_of[p]
    }

    pub fn obligation(&self, p: State) -> usize {
        self.space.memory[p]
    }

    pub fn lookup(&self, s: State, obligation: usize) -> Option<State> {
        self.space.lookup(s, &obligation)
    }

    /// The position of a play that starts at game state `s`.
    pub fn position(&self, s: State) -> State {
        let j = self.payoff.monitor(self.dodged).step(0, self.game.vertex(s)).0;
        self.lookup(s, j).expect("every game state is seeded")
    }

    /// Does the move `p -> t` in the space complete a round?
    pub fn wraps(&self, p: State, t: State) -> bool {
        self.payoff
            .monitor(self.dodged)
            .step(self.space.memory[p], self.space.graph.vertex(t))
            .1
    }

    /// `R_0, R_1, …` up to the first repeat; the last entry is the limit.
    pub fn budget_regions(&self, x: &StateSet) -> Result<Vec<StateSet>, DavisError> {
        let space = &self.space.graph;
        let counted = &self.counted.graph;
        let mut outside = x.clone();
        outside.toggle_range(..);
        let first = solve_subgame(space, &SubGameObjective::with_reach(&self.payoff, outside))?;
        let mut regions = vec![first.win_i];
        let limit = space.len() + 2;
        loop {
            let prev = regions.last().unwrap();
            let mut reach = counted.empty_set();
            for y in 0..counted.len() {
                if self.counted.memory[y] == 1 && prev.contains(self.counted.base_of[y]) {
                    reach.insert(y);
                }
            }
            let win = solve_subgame(counted, &SubGameObjective::with_reach(&self.payoff, reach))?.win_i;
            let mut next = space.empty_set();
            for p in 0..space.len() {
                if win.contains(self.counted.lookup(p, &0).unwrap()) {
                    next.insert(p);
                }
            }
            if next == *prev {
                return Ok(regions);
            }
            regions.push(next);
            if regions.len() > limit {
                return Err(DavisError::BudgetDivergence(limit));
            }
        }
    }

    pub fn phi_apply(&self, x: &StateSet) -> Result<StateSet, DavisError> {
        let mut out = self.budget_regions(x)?.pop().unwrap();
        out.toggle_range(..);
        Ok(out)
    }

    /// Independent evaluation of `Φ(X)` over budgets `1..=cap`, using an
    /// explicit saturating round counter.
    pub fn phi_apply_capped(&self, x: &StateSet, cap: usize) -> Result<StateSet, DavisError> {
        assert!(cap >= 1);
        let space = &self.space.graph;
        let monitor = self.payoff.monitor(self.dodged);
        let seeds: Vec<(State, usize)> = (0..space.len()).map(|p| (p, 0)).collect();
        let counter = space.product(&seeds, |p, &c, t| {
            let wrapped = monitor.step(self.space.memory[p], space.vertex(t)).1;
            Some((c + wrapped as usize).min(cap))
        });
        let mut out = space.empty_set();
        for n in 1..=cap {
            let mut reach = counter.graph.empty_set();
            for y in 0..counter.graph.len() {
                if counter.memory[y] >= n && !x.contains(counter.base_of[y]) {
                    reach.insert(y);
                }
            }
            let win = solve_subgame(&counter.graph, &SubGameObjective::with_reach(&self.payoff, reach))?.win_i;
            for p in 0..space.len() {
                if !win.contains(counter.lookup(p, &0).unwrap()) {
                    out.insert(p);
                }
            }
        }
        Ok(out)
    }

    /// Stages, ranks and the budget regions below every stage.
    pub fn phi_stages(&self) -> Result<PhiStages, DavisError> {
        let op = PhiOperator {
            ctx: self,
            cache: RefCell::new(HashMap::new()),
        };
        let sequence = iterate(&op)?;
        let order = sequence.prewellorder();
        let mut cache = op.cache.into_inner();
        let regions = (0..=sequence.closure())
            .map(|xi| {
                let below = sequence.below(xi);
                match cache.remove(&below) {
                    Some(r) => Ok(r),
                    None => self.budget_regions(&below),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(PhiStages {
            sequence,
            order,
            regions,
        })
    }

    /// Player I's strategy on the game from outside the fixed point.
    ///
    /// Plays a strategy for "payoff or complete a round and stand outside the
    /// fixed point"; whenever that happens the round flag is cleared and the
    /// same strategy continues from the new position.
    pub fn strategy_for_i(&self, stages: &PhiStages) -> Result<StrategyAutomaton, DavisError> {
        let fixed = stages.fixed_point();
        if fixed.contains(self.start()) {
            return Err(DavisError::StartIsGood);
        }
        let counted = &self.counted.graph;
        let mut reach = counted.empty_set();
        for y in 0..counted.len() {
            if self.counted.memory[y] == 1 && !fixed.contains(self.counted.base_of[y]) {
                reach.insert(y);
            }
        }
        let sigma = solve_subgame(counted, &SubGameObjective::with_reach(&self.payoff, reach))?.strat_i;

        let stitched = self.space.graph.product(&[(self.start(), 0u8)], |p, &c, t| {
            let flag = if self.wraps(p, t) { 1 } else { c };
            Some(if flag == 1 && !fixed.contains(t) { 0 } else { flag })
        });
        let counted_of: Vec<State> = (0..stitched.graph.len())
            .map(|x| {
                self.counted
                    .lookup(stitched.base_of[x], &stitched.memory[x])
                    .expect("stitched states exist in the counted space")
            })
            .collect();
        let mut update = Vec::with_capacity(sigma.memory_count());
        let mut choose = Vec::with_capacity(sigma.memory_count());
        for m in 0..sigma.memory_count() {
            let mut up = Vec::with_capacity(stitched.graph.len());
            let mut ch = Vec::with_capacity(stitched.graph.len());
            for x in 0..stitched.graph.len() {
                let q = counted_of[x];
                up.push(sigma.next_memory(m, q));
                ch.push(sigma.choice(m, q).map(|target| {
                    let p = self.counted.base_of[target];
                    *stitched
                        .graph
                        .successors(x)
                        .iter()
                        .find(|&&y| stitched.base_of[y] == p)
                        .expect("move exists in the stitched product")
                }));
            }
            update.push(up);
            choose.push(ch);
        }
        let on_stitched = StrategyAutomaton::new(&stitched.graph, Player::I, sigma.init(), update, choose)?;
        let base_of: Vec<State> = stitched.base_of.iter().map(|&p| self.space.base_of[p]).collect();
        Ok(on_stitched.lift(&stitched.graph, &base_of, &self.game))
    }

    /// The canonical quasistrategy witnessing that `p` is in the fixed point,
    /// with both of its postconditions certified.
    pub fn goodness_witness(&self, stages: &PhiStages, p: State) -> Result<GoodnessWitness, DavisError> {
        let Some(rank) = stages.rank(p) else {
            return Err(DavisError::NotGood(p));
        };
        let least_budget = |alpha: usize, t: State| stages.least_budget(alpha, t);
        let start = WitnessAnnotation {
            rank,
            budget: least_budget(rank, p)
                .ok_or_else(|| DavisError::CertificationFailed(format!("no budget for {p}")))?,
            rounds: 0,
        };
        let space = &self.space.graph;
        let mut fault: Option<String> = None;
        let product = space.product(&[(p, start)], |s, ann, t| {
            let rounds = ann.rounds + self.wraps(s, t) as usize;
            let regions = &stages.regions[ann.rank];
            let next = if rounds < ann.budget {
                let r = &regions[(ann.budget - rounds).min(regions.len() - 1)];
                (!r.contains(t)).then_some(WitnessAnnotation { rounds, ..*ann })
            } else if regions[0].contains(t) {
                None
            } else {
                let refreshed = stages
                    .rank(t)
                    .filter(|&a| a < ann.rank)
                    .and_then(|a| least_budget(a, t).map(|n| (a, n)));
                match refreshed {
                    Some((rank, budget)) => Some(WitnessAnnotation {
                        rank,
                        budget,
                        rounds: 0,
                    }),
                    None => {
                        fault.get_or_insert(format!("refresh at {t} does not lower the rank"));
                        None
                    }
                }
            };
            if next.is_none() && space.owner(s) == Player::I {
                fault.get_or_insert(format!("Player I move {s} -> {t} dropped"));
            }
            next
        });
        if let Some(msg) = fault {
            return Err(DavisError::CertificationFailed(msg));
        }
        let Product {
            graph,
            base_of,
            memory,
            ..
        } = product;
        let quasi = Quasistrategy::new(space, graph, base_of)?;
        if let Some(play) = component_play(quasi.view(), &self.payoff, self.dodged) {
            return Err(DavisError::CertificationFailed(format!(
                "witness admits a play of component {}: {:?}",
                self.dodged, play
            )));
        }
        let inside = solve_subgame(quasi.view(), &SubGameObjective::payoff_only(&self.payoff, quasi.view()))?;
        if !inside.win_i.is_clear() {
            return Err(DavisError::CertificationFailed(
                "Player I wins somewhere inside the witness".into(),
            ));
        }
        Ok(GoodnessWitness {
            quasi,
            annotation: memory,
        })
    }
}

struct PhiOperator<'a> {
    ctx: &'a DavisContext,
    cache: RefCell<HashMap<StateSet, Vec<StateSet>>>,
}

impl MonotoneOperator for PhiOperator<'_> {
    type Error = DavisError;

    fn universe(&self) -> usize {
        self.ctx.space_len()
    }

    fn apply(&self, x: &StateSet) -> Result<StateSet, DavisError> {
        let regions = self.ctx.budget_regions(x)?;
        let mut out = regions.last().unwrap().clone();
        out.toggle_range(..);
        self.cache.borrow_mut().insert(x.clone(), regions);
        Ok(out)
    }
}

/// `Φ` as a [`MonotoneOperator`], for use with the generic engine.
pub fn phi_operator(ctx: &DavisContext) -> impl MonotoneOperator<Error = DavisError> + '_ {
    PhiOperator {
        ctx,
        cache: RefCell::new(HashMap::new()),
    }
}

#[derive(Clone, Debug)]
pub struct PhiStages {
    pub sequence: StageSequence,
    pub order: Prewellorder,
    /// `regions[α]` are the budget regions for `X = below(α)`.
    regions: Vec<Vec<StateSet>>,
}

impl PhiStages {
    pub fn closure(&self) -> usize {
        self.sequence.closure()
    }

    pub fn fixed_point(&self) -> &StateSet {
        self.sequence.fixed_point()
    }

    pub fn rank(&self, p: State) -> Option<usize> {
        self.order.rank(p)
    }

    pub fn regions(&self, alpha: usize) -> &[StateSet] {
        &self.regions[alpha]
    }

    /// Least `n ≥ 1` with `p` outside `R_n` for `X = below(α)`.
    pub fn least_budget(&self, alpha: usize, p: State) -> Option<usize> {
        let regions = &self.regions[alpha];
        (1..=regions.len()).find(|&n| !regions[n.min(regions.len() - 1)].contains(p))
    }
}

/// Stage rank, budget and rounds completed since the last refresh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WitnessAnnotation {
    pub rank: usize,
    pub budget: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct GoodnessWitness {
    /// Quasistrategy in the space.
    pub quasi: Quasistrategy,
    /// Annotation of each witness state.
    pub annotation: Vec<WitnessAnnotation>,
}

/// Canonical form of a rooted game graph: reachable part, quotiented by
/// bisimulation (same vertex, owner and successor classes), numbered in
/// breadth-first order from the root. Returns the graph and, for each state
/// of the input reachable from its root, its canonical state.
pub fn canonical_form(g: &GameGraph) -> (GameGraph, Vec<Option<State>>) {
    let reach = g.reachable_within(g.root(), &g.all_states());
    let states: Vec<State> = reach.ones().collect();
    let mut block = vec![usize::MAX; g.len()];
    let mut ids: HashMap<(Vertex, Player), usize> = HashMap::new();
    for &s in &states {
        let next = ids.len();
        block[s] = *ids.entry((g.vertex(s), g.owner(s))).or_insert(next);
    }
    let mut count = ids.len();
    loop {
        let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut refined = vec![usize::MAX; g.len()];
        for &s in &states {
            let sig = (block[s], g.successors(s).iter().map(|&t| block[t]).collect());
            let next = sig_ids.len();
            refined[s] = *sig_ids.entry(sig).or_insert(next);
        }
        let stable = sig_ids.len() == count;
        block = refined;
        count = sig_ids.len();
        if stable {
            break;
        }
    }
    let mut rep = vec![usize::MAX; count];
    for &s in &states {
        if rep[block[s]] == usize::MAX {
            rep[block[s]] = s;
        }
    }
    let mut number = vec![usize::MAX; count];
    let mut order = vec![block[g.root()]];
    number[block[g.root()]] = 0;
    let mut i = 0;
    while i < order.len() {
        let s = rep[order[i]];
        for &t in g.successors(s) {
            if number[block[t]] == usize::MAX {
                number[block[t]] = order.len();
                order.push(block[t]);
            }
        }
        i += 1;
    }
    let graph = GameGraph::from_parts(
        order.iter().map(|&b| g.vertex(rep[b])).collect(),
        order.iter().map(|&b| g.owner(rep[b])).collect(),
        order
            .iter()
            .map(|&b| g.successors(rep[b]).iter().map(|&t| number[block[t]]).collect())
            .collect(),
        0,
    );
    let map = (0..g.len())
        .map(|s| reach.contains(s).then(|| number[block[s]]))
        .collect();
    (graph, map)
}

/// One node of the refinement system: a rooted game, the component it
/// dodges, and Player II's non-losing quasistrategy inside its witness.
#[derive(Clone, Debug)]
pub struct RefinementNode {
    pub game: GameGraph,
    pub component: usize,
    pub closure: usize,
    pub witness_size: usize,
    pub hold: Quasistrategy,
    /// Child node entered on each move out of the root of `hold`, by vertex.
    pub children: Vec<(Vertex, usize)>,
}

impl RefinementNode {
    pub fn child(&self, v: Vertex) -> Option<usize> {
        self.children
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.children[i].1)
    }

    /// Player II's move at the root: the least retained successor vertex.
    pub fn choice(&self) -> Option<Vertex> {
        (self.game.owner(self.game.root()) == Player::II).then(|| self.children[0].0)
    }
}

#[derive(Clone, Debug)]
pub struct RefinementSystem {
    pub nodes: Vec<RefinementNode>,
    pub root: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RefineLimits {
    pub max_nodes: usize,
}

impl Default for RefineLimits {
    fn default() -> Self {
        RefineLimits { max_nodes: 10_000 }
    }
}

/// Builds the refinement system from the root of `game`, cycling through
/// the components round-robin, one step per node.
pub fn refine(
    game: &GameGraph,
    payoff: &Sigma3Payoff,
    limits: RefineLimits,
) -> Result<RefinementSystem, DavisError> {
    let top = solve_subgame(game, &SubGameObjective::payoff_only(payoff, game))?;
    if top.win_i.contains(game.root()) {
        return Err(DavisError::PlayerIWins);
    }
    let components = payoff.component_count();
    let mut index: HashMap<(GameGraph, usize), usize> = HashMap::new();
    let mut pending: Vec<(GameGraph, usize)> = Vec::new();
    let mut nodes: Vec<RefinementNode> = Vec::new();
    let (root_game, _) = canonical_form(game);
    index.insert((root_game.clone(), 0), 0);
    pending.push((root_game, 0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (node_game, k) = pending[id].clone();
        let ctx = DavisContext::new(&node_game, payoff, k)?;
        let stages = ctx.phi_stages()?;
        if !stages.fixed_point().contains(ctx.start()) {
            return Err(if id == 0 {
                DavisError::PlayerIWins
            } else {
                DavisError::CertificationFailed(format!("node {id} root is not in the fixed point"))
            });
        }
        let witness = ctx.goodness_witness(&stages, ctx.start())?;
        let view = witness.quasi.view();
        let hold = nonlosing_region(view, &SubGameObjective::payoff_only(payoff, view), view.root())?;
        let h = hold.view();
        let mut children = Vec::new();
        for &t in h.successors(h.root()) {
            let (child_game, _) = canonical_form(&h.rerooted(t));
            let key = (child_game, (k + 1) % components);
            let child = match index.get(&key) {
                Some(&c) => c,
                None => {
                    let c = pending.len();
                    if c >= limits.max_nodes {
                        return Err(DavisError::RefinementDiverged(limits.max_nodes));
                    }
                    index.insert(key.clone(), c);
                    pending.push(key);
                    queue.push_back(c);
                    c
                }
            };
            children.push((h.vertex(t), child));
        }
        let node = RefinementNode {
            game: node_game,
            component: k,
            closure: stages.closure(),
            witness_size: view.len(),
            hold,
            children,
        };
        if nodes.len() <= id {
            nodes.resize_with(id + 1, || node.clone());
        }
        nodes[id] = node;
    }
    Ok(RefinementSystem { nodes, root: 0 })
}

impl RefinementSystem {
    /// Player II's strategy on `game` (the graph the system was built from).
    ///
    /// Memory 0 is "not started", 1 is "left the system", `2 + i` is node
    /// `i`. Reading a position moves to the child for its vertex; at II's
    /// positions the move is the new node's choice.
    pub fn strategy_for_ii(&self, game: &GameGraph) -> Result<StrategyAutomaton, DavisError> {
        const INIT: usize = 0;
        const LOST: usize = 1;
        let memories = self.nodes.len() + 2;
        let mut update = vec![vec![LOST; game.len()]; memories];
        let mut choose = vec![vec![None; game.len()]; memories];
        for m in 0..memories {
            for s in 0..game.len() {
                let next = match m {
                    INIT if s == game.root() => 2 + self.root,
                    INIT | LOST => LOST,
                    _ => self.nodes[m - 2].child(game.vertex(s)).map_or(LOST, |c| 2 + c),
                };
                update[m][s] = next;
                if game.owner(s) != Player::II {
                    continue;
                }
                let mv = (next >= 2)
                    .then(|| self.nodes[next - 2].choice())
                    .flatten()
                    .and_then(|v| game.successor_on(s, v))
                    .unwrap_or(game.successors(s)[0]);
                choose[m][s] = Some(mv);
            }
        }
        Ok(StrategyAutomaton::new(game, Player::II, INIT, update, choose)?)
    }
}

/// `(component, stage closure, witness size, children)` of one refinement node.
pub type NodeSummary = (usize, usize, usize, Vec<(Vertex, usize)>);

/// What backs a [`Solution`].
#[derive(Clone, Debug)]
pub enum Certificate {
    /// Stage ranks of every space position for component 0.
    Stages {
        closure: usize,
        /// `(game state, obligation pointer, rank)` per space position.
        ranks: Vec<(State, usize, Option<usize>)>,
    },
    /// The refinement node table.
    Refinement {
        nodes: Vec<NodeSummary>,
    },
}

impl Certificate {
    fn stages(ctx: &DavisContext, stages: &PhiStages) -> Self {
        Certificate::Stages {
            closure: stages.closure(),
            ranks: (0..ctx.space_len())
                .map(|p| (ctx.game_state(p), ctx.obligation(p), stages.rank(p)))
                .collect(),
        }
    }

    fn refinement(rs: &RefinementSystem) -> Self {
        Certificate::Refinement {
            nodes: rs
                .nodes
                .iter()
                .map(|n| (n.component, n.closure, n.witness_size, n.children.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Stages { closure, ranks } => {
                writeln!(f, "closure {closure}")?;
                for (s, j, r) in ranks {
                    match r {
                        Some(r) => writeln!(f, "rank {s} {j} {r}")?,
                        None => writeln!(f, "rank {s} {j} none")?,
                    }
                }
            }
            Certificate::Refinement { nodes } => {
                writeln!(f, "nodes {}", nodes.len())?;
                for (i, (k, closure, size, children)) in nodes.iter().enumerate() {
                    write!(f, "node {i} component {k} closure {closure} witness {size}")?;
                    for (v, c) in children {
                        write!(f, " {v}->{c}")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Player,
    pub strategy: StrategyAutomaton,
    pub certificate: Certificate,
}

/// Decides the game from its root and returns a verified winning strategy.
pub fn solve(game: &GameGraph, payoff: &Sigma3Payoff) -> Result<Solution, DavisError> {
    solve_with(game, payoff, RefineLimits::default())
}

pub fn solve_with(
    game: &GameGraph,
    payoff: &Sigma3Payoff,
    limits: RefineLimits,
) -> Result<Solution, DavisError> {
    let ctx = DavisContext::new(game, payoff, 0)?;
    let stages = ctx.phi_stages()?;
    if !stages.fixed_point().contains(ctx.start()) {
        let strategy = ctx.strategy_for_i(&stages)?;
        if let Some(play) = verify_i(game, payoff, &strategy)?.counterexample() {
            return Err(DavisError::CertificationFailed(format!(
                "Player I strategy loses along {play:?}"
            )));
        }
        return Ok(Solution {
            winner: Player::I,
            strategy,
            certificate: Certificate::stages(&ctx, &stages),
        });
    }
    let rs = refine(game, payoff, limits)?;
    let strategy = rs.strategy_for_ii(game)?;
    if let Some(play) = verify_ii(game, payoff, &strategy)?.counterexample() {
        return Err(DavisError::CertificationFailed(format!(
            "Player II strategy loses along {play:?}"
        )));
    }
    Ok(Solution {
        winner: Player::II,
        strategy,
        certificate: Certificate::refinement(&rs),
    })
}
