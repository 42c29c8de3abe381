//! Game graphs, plays, lassos, strategies and quasistrategies.
//!
//! An [`Arena`] is the user-facing game: named vertices, ownership, edges and a
//! start vertex. Every solving routine works on a [`GameGraph`], which is an
//! arena or some finite unfolding of it (a product with monitor memory, or the
//! positions retained by a quasistrategy). Each graph state projects onto an
//! arena vertex, and the successors of a state always carry pairwise distinct
//! vertices, so a play of the arena determines a unique path through any graph
//! derived from it.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Index of an arena vertex (declaration order).
pub type Vertex = usize;
/// Index of a state in a [`GameGraph`].
pub type State = usize;
/// Explicit set of graph states.
pub type StateSet = FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::I => write!(f, "I"),
            Player::II => write!(f, "II"),
        }
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(Player::I),
            "II" => Ok(Player::II),
            other => Err(format!("expected `I` or `II`, found `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("vertex `{0}` has no outgoing edge")]
    DeadEnd(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("state {state} restricts Player I: successor {missing} is not retained")]
    RestrictsPlayerI { state: State, missing: State },
    #[error("state {0} has no successor inside the quasistrategy")]
    TerminalState(State),
    #[error("state {0} is not reachable from the root")]
    Unreachable(State),
    #[error("edge {0} -> {1} is not an edge of the ambient game")]
    ForeignEdge(State, State),
    #[error("illegal move {mv} at position {position}")]
    IllegalOpponentMove { position: State, mv: State },
    #[error("opponent script exhausted at position {0}")]
    ScriptExhausted(State),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// An unvalidated arena description, as produced by a parser.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawArena {
    pub vertices: Vec<(String, Player)>,
    pub edges: Vec<(String, String)>,
    pub start: String,
}

/// Finite game graph with named vertices, ownership and a start vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    names: Vec<String>,
    owner: Vec<Player>,
    succ: Vec<Vec<Vertex>>,
    start: Vertex,
    index: HashMap<String, Vertex>,
}

pub fn validate_arena(raw: &RawArena) -> Result<Arena, ArenaError> {
    let mut index = HashMap::new();
    let mut names = Vec::with_capacity(raw.vertices.len());
    let mut owner = Vec::with_capacity(raw.vertices.len());
    for (name, player) in &raw.vertices {
        if index.insert(name.clone(), names.len()).is_some() {
            return Err(ArenaError::DuplicateVertex(name.clone()));
        }
        names.push(name.clone());
        owner.push(*player);
    }
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ArenaError::UnknownVertex(name.to_string()))
    };
    let mut succ = vec![Vec::new(); names.len()];
    for (src, dst) in &raw.edges {
        let (s, d) = (lookup(src)?, lookup(dst)?);
        succ[s].push(d);
    }
    let start = lookup(&raw.start)?;
    for (v, out) in succ.iter_mut().enumerate() {
        out.sort_unstable();
        out.dedup();
        if out.is_empty() {
            return Err(ArenaError::DeadEnd(names[v].clone()));
        }
    }
    Ok(Arena {
        names,
        owner,
        succ,
        start,
        index,
    })
}

impl Arena {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn has_edge(&self, from: Vertex, to: Vertex) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// The arena as a game graph whose states are the vertices themselves.
    pub fn graph(&self) -> GameGraph {
        GameGraph {
            vertex: (0..self.len()).collect(),
            owner: self.owner.clone(),
            succ: self.succ.clone(),
            root: self.start,
        }
    }

    pub fn to_raw(&self) -> RawArena {
        RawArena {
            vertices: self
                .names
                .iter()
                .cloned()
                .zip(self.owner.iter().copied())
                .collect(),
            edges: self
                .succ
                .iter()
                .enumerate()
                .flat_map(|(v, out)| {
                    out.iter()
                        .map(move |&w| (self.names[v].clone(), self.names[w].clone()))
                })
                .collect(),
            start: self.names[self.start].clone(),
        }
    }

    pub fn format_path(&self, path: &[Vertex]) -> String {
        path.iter()
            .map(|&v| self.names[v].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A rooted game graph whose states project onto arena vertices.
///
/// Successor lists are sorted by vertex and never contain two states with the
/// same vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameGraph {
    vertex: Vec<Vertex>,
    owner: Vec<Player>,
    succ: Vec<Vec<State>>,
    root: State,
}

impl GameGraph {
    pub fn from_parts(
        vertex: Vec<Vertex>,
        owner: Vec<Player>,
        mut succ: Vec<Vec<State>>,
        root: State,
    ) -> Self {
        assert_eq!(vertex.len(), owner.len());
        assert_eq!(vertex.len(), succ.len());
        assert!(root < vertex.len());
        for out in succ.iter_mut() {
            out.sort_by_key(|&t| vertex[t]);
            assert!(
                out.windows(2).all(|w| vertex[w[0]] != vertex[w[1]]),
                "successors must carry distinct vertices"
            );
        }
        GameGraph {
            vertex,
            owner,
            succ,
            root,
        }
    }

    pub fn len(&self) -> usize {
        self.vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty()
    }

    pub fn vertex(&self, s: State) -> Vertex {
        self.vertex[s]
    }

    pub fn owner(&self, s: State) -> Player {
        self.owner[s]
    }

    pub fn successors(&self, s: State) -> &[State] {
        &self.succ[s]
    }

    pub fn root(&self) -> State {
        self.root
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, from: State, to: State) -> bool {
        self.succ[from].contains(&to)
    }

    /// The successor of `s` sitting on vertex `v`, if any.
    pub fn successor_on(&self, s: State, v: Vertex) -> Option<State> {
        self.succ[s]
            .binary_search_by_key(&v, |&t| self.vertex[t])
            .ok()
            .map(|i| self.succ[s][i])
    }

    pub fn all_states(&self) -> StateSet {
        let mut set = StateSet::with_capacity(self.len());
        set.insert_range(..);
        set
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::with_capacity(self.len())
    }

    /// Same graph, different root.
    pub fn rerooted(&self, root: State) -> GameGraph {
        assert!(root < self.len());
        GameGraph {
            root,
            ..self.clone()
        }
    }

    /// States reachable from `from` using only states inside `within`.
    pub fn reachable_within(&self, from: State, within: &StateSet) -> StateSet {
        let mut seen = self.empty_set();
        if !within.contains(from) {
            return seen;
        }
        let mut queue = VecDeque::from([from]);
        seen.insert(from);
        while let Some(s) = queue.pop_front() {
            for &t in &self.succ[s] {
                if within.contains(t) && !seen.contains(t) {
                    seen.insert(t);
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Induced subgraph on `keep`, rooted at `root`. Returns the subgraph and
    /// the map from its states back to states of `self`.
    pub fn induced(&self, keep: &StateSet, root: State) -> (GameGraph, Vec<State>) {
        assert!(keep.contains(root));
        let base_of: Vec<State> = keep.ones().collect();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &s) in base_of.iter().enumerate() {
            local[s] = i;
        }
        let succ = base_of
            .iter()
            .map(|&s| {
                self.succ[s]
                    .iter()
                    .filter(|&&t| keep.contains(t))
                    .map(|&t| local[t])
                    .collect()
            })
            .collect();
        let graph = GameGraph {
            vertex: base_of.iter().map(|&s| self.vertex[s]).collect(),
            owner: base_of.iter().map(|&s| self.owner[s]).collect(),
            succ,
            root: local[root],
        };
        (graph, base_of)
    }

    /// Explores the synchronous product of this graph with a deterministic
    /// memory. `step(from, memory, to)` returns the memory after moving from
    /// `from` to `to`, or `None` when the move is not retained.
    pub fn product<M, F>(&self, seeds: &[(State, M)], mut step: F) -> Product<M>
    where
        M: Clone + Eq + Hash,
        F: FnMut(State, &M, State) -> Option<M>,
    {
        assert!(!seeds.is_empty());
        let mut index: HashMap<(State, M), State> = HashMap::new();
        let mut base_of = Vec::new();
        let mut memory = Vec::new();
        let mut queue = VecDeque::new();
        for (s, m) in seeds {
            if let Entry::Vacant(slot) = index.entry((*s, m.clone())) {
                slot.insert(base_of.len());
                base_of.push(*s);
                memory.push(m.clone());
                queue.push_back(base_of.len() - 1);
            }
        }
        let mut succ: Vec<Vec<State>> = Vec::new();
        while let Some(x) = queue.pop_front() {
            let (s, m) = (base_of[x], memory[x].clone());
            let mut out = Vec::new();
            for &t in &self.succ[s] {
                let Some(m2) = step(s, &m, t) else { continue };
                let key = (t, m2);
                let y = match index.get(&key) {
                    Some(&y) => y,
                    None => {
                        let y = base_of.len();
                        base_of.push(t);
                        memory.push(key.1.clone());
                        index.insert(key, y);
                        queue.push_back(y);
                        y
                    }
                };
                out.push(y);
            }
            if succ.len() <= x {
                succ.resize(x + 1, Vec::new());
            }
            succ[x] = out;
        }
        succ.resize(base_of.len(), Vec::new());
        let graph = GameGraph {
            vertex: base_of.iter().map(|&s| self.vertex[s]).collect(),
            owner: base_of.iter().map(|&s| self.owner[s]).collect(),
            succ,
            root: 0,
        };
        Product {
            graph,
            base_of,
            memory,
            index,
        }
    }
}

/// Result of [`GameGraph::product`]: the product graph (rooted at the first
/// seed) plus the projection of each product state.
#[derive(Clone, Debug)]
pub struct Product<M> {
    pub graph: GameGraph,
    pub base_of: Vec<State>,
    pub memory: Vec<M>,
    index: HashMap<(State, M), State>,
}

impl<M: Clone + Eq + Hash> Product<M> {
    pub fn lookup(&self, base: State, memory: &M) -> Option<State> {
        self.index.get(&(base, memory.clone())).copied()
    }

    pub fn with_root(mut self, root: State) -> Self {
        self.graph.root = root;
        self
    }
}

/// A quasistrategy for Player II: a rooted graph of retained positions
/// projecting into an ambient game, with no terminal positions, never
/// restricting Player I.
#[derive(Clone, Debug)]
pub struct Quasistrategy {
    graph: GameGraph,
    base_of: Vec<State>,
}

impl Quasistrategy {
    /// Validates `graph` (with projection `base_of`) as a quasistrategy in
    /// `ambient`.
    pub fn new(
        ambient: &GameGraph,
        graph: GameGraph,
        base_of: Vec<State>,
    ) -> Result<Self, ArenaError> {
        assert_eq!(graph.len(), base_of.len());
        for x in 0..graph.len() {
            let b = base_of[x];
            if graph.succ[x].is_empty() {
                return Err(ArenaError::TerminalState(x));
            }
            for &y in &graph.succ[x] {
                if !ambient.has_edge(b, base_of[y]) {
                    return Err(ArenaError::ForeignEdge(x, y));
                }
            }
            if graph.owner[x] == Player::I {
                for &t in &ambient.succ[b] {
                    if !graph.succ[x].iter().any(|&y| base_of[y] == t) {
                        return Err(ArenaError::RestrictsPlayerI {
                            state: x,
                            missing: t,
                        });
                    }
                }
            }
        }
        let reach = graph.reachable_within(graph.root, &graph.all_states());
        if let Some(x) = (0..graph.len()).find(|&x| !reach.contains(x)) {
            return Err(ArenaError::Unreachable(x));
        }
        Ok(Quasistrategy { graph, base_of })
    }

    /// The quasistrategy given by an explicit set of ambient states.
    pub fn from_subset(
        ambient: &GameGraph,
        states: &StateSet,
        root: State,
    ) -> Result<Self, ArenaError> {
        if !states.contains(root) {
            return Err(ArenaError::Unreachable(root));
        }
        for s in states.ones() {
            if ambient.owner(s) == Player::I {
                if let Some(&t) = ambient.successors(s).iter().find(|&&t| !states.contains(t)) {
                    return Err(ArenaError::RestrictsPlayerI {
                        state: s,
                        missing: t,
                    });
                }
            }
        }
        let (graph, base_of) = ambient.induced(states, root);
        Quasistrategy::new(ambient, graph, base_of).map_err(|e| match e {
            ArenaError::TerminalState(x) => ArenaError::TerminalState(states.ones().nth(x).unwrap()),
            ArenaError::Unreachable(x) => ArenaError::Unreachable(states.ones().nth(x).unwrap()),
            other => other,
        })
    }

    /// The playable game on the retained positions.
    pub fn view(&self) -> &GameGraph {
        &self.graph
    }

    pub fn base_of(&self) -> &[State] {
        &self.base_of
    }

    pub fn root(&self) -> State {
        self.graph.root
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Ambient states touched by the quasistrategy.
    pub fn projected_states(&self, ambient_len: usize) -> StateSet {
        let mut set = StateSet::with_capacity(ambient_len);
        for &b in &self.base_of {
            set.insert(b);
        }
        set
    }
}

/// Restricts `ambient` to the quasistrategy spanned by `states` and `root`.
pub fn restrict_to_quasistrategy(
    ambient: &GameGraph,
    states: &StateSet,
    root: State,
) -> Result<Quasistrategy, ArenaError> {
    Quasistrategy::from_subset(ambient, states, root)
}

/// Finite-memory (Mealy) strategy over the states of one game graph.
///
/// With memory `m` before reading position `s`, the next memory is
/// `update(m, s)` and, at owned positions, the move is `choose(m, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyAutomaton {
    player: Player,
    init: usize,
    update: Vec<Vec<usize>>,
    choose: Vec<Vec<Option<State>>>,
}

impl StrategyAutomaton {
    pub fn new(
        graph: &GameGraph,
        player: Player,
        init: usize,
        update: Vec<Vec<usize>>,
        choose: Vec<Vec<Option<State>>>,
    ) -> Result<Self, ArenaError> {
        let invalid = |msg: String| Err(ArenaError::InvalidStrategy(msg));
        let memories = update.len();
        if memories == 0 || init >= memories || choose.len() != memories {
            return invalid("memory table shape mismatch".into());
        }
        for m in 0..memories {
            if update[m].len() != graph.len() || choose[m].len() != graph.len() {
                return invalid(format!("memory {m}: table does not cover every position"));
            }
            for s in 0..graph.len() {
                if update[m][s] >= memories {
                    return invalid(format!("memory {m}: update at {s} out of range"));
                }
                match (graph.owner(s) == player, choose[m][s]) {
                    (true, None) => return invalid(format!("memory {m}: no move at owned {s}")),
                    (false, Some(_)) => {
                        return invalid(format!("memory {m}: move at unowned position {s}"))
                    }
                    (true, Some(t)) if !graph.has_edge(s, t) => {
                        return invalid(format!("memory {m}: {s} -> {t} is not an edge"))
                    }
                    _ => {}
                }
            }
        }
        Ok(StrategyAutomaton {
            player,
            init,
            update,
            choose,
        })
    }

    /// Memoryless strategy following `choice` at owned positions.
    pub fn positional(
        graph: &GameGraph,
        player: Player,
        choice: impl Fn(State) -> State,
    ) -> Result<Self, ArenaError> {
        let choose = (0..graph.len())
            .map(|s| (graph.owner(s) == player).then(|| choice(s)))
            .collect();
        StrategyAutomaton::new(graph, player, 0, vec![vec![0; graph.len()]], vec![choose])
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn memory_count(&self) -> usize {
        self.update.len()
    }

    pub fn position_count(&self) -> usize {
        self.update[0].len()
    }

    pub fn next_memory(&self, m: usize, s: State) -> usize {
        self.update[m][s]
    }

    pub fn choice(&self, m: usize, s: State) -> Option<State> {
        self.choose[m][s]
    }

    /// Replaces the move at `(m, s)`; used to build mutants in tests.
    pub fn with_choice(&self, m: usize, s: State, t: State) -> StrategyAutomaton {
        let mut out = self.clone();
        out.choose[m][s] = Some(t);
        out
    }

    /// Transfers a strategy on a product graph down to its base graph.
    ///
    /// `base_of` maps product states to base states; the product must be
    /// deterministic over the base (distinct successors project to distinct
    /// base states) and its root must project to the base root. Base plays
    /// that leave the product are answered with the least successor.
    pub fn lift(&self, product: &GameGraph, base_of: &[State], base: &GameGraph) -> Self {
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        enum Mem {
            Init,
            Track(State, usize),
            Lost,
        }
        let mut ids: HashMap<Mem, usize> = HashMap::new();
        let mut order = vec![Mem::Init];
        ids.insert(Mem::Init, 0);
        let mut update = Vec::new();
        let mut choose = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let mem = order[i];
            let mut up = Vec::with_capacity(base.len());
            let mut ch = Vec::with_capacity(base.len());
            for v in 0..base.len() {
                let current = match mem {
                    Mem::Init => (v == base.root() && base_of[product.root()] == v)
                        .then(|| (product.root(), self.init)),
                    Mem::Track(prev, m) => product
                        .successors(prev)
                        .iter()
                        .find(|&&x| base_of[x] == v)
                        .map(|&x| (x, m)),
                    Mem::Lost => None,
                };
                let (next, mv) = match current {
                    Some((x, m)) => {
                        let mv = self.choice(m, x).map(|y| base_of[y]);
                        (Mem::Track(x, self.next_memory(m, x)), mv)
                    }
                    None => (Mem::Lost, Some(base.successors(v)[0])),
                };
                let id = *ids.entry(next).or_insert_with(|| {
                    order.push(next);
                    order.len() - 1
                });
                up.push(id);
                ch.push((base.owner(v) == self.player).then(|| mv.unwrap_or(base.successors(v)[0])));
            }
            update.push(up);
            choose.push(ch);
            i += 1;
        }
        StrategyAutomaton {
            player: self.player,
            init: 0,
            update,
            choose,
        }
    }
}

/// Runs `strategy` from the root of `graph` for `steps` moves. The opponent's
/// moves are read from `script`; once it is exhausted, only forced moves
/// (single successor) are accepted.
pub fn run_strategy(
    graph: &GameGraph,
    strategy: &StrategyAutomaton,
    script: &[State],
    steps: usize,
) -> Result<Vec<State>, ArenaError> {
    let mut play = vec![graph.root()];
    let mut memory = strategy.init();
    let mut script = script.iter();
    for _ in 0..steps {
        let s = *play.last().unwrap();
        let next = if graph.owner(s) == strategy.player() {
            strategy.choice(memory, s).expect("owned position has a move")
        } else {
            match script.next() {
                Some(&t) if graph.has_edge(s, t) => t,
                Some(&t) => return Err(ArenaError::IllegalOpponentMove { position: s, mv: t }),
                None if graph.successors(s).len() == 1 => graph.successors(s)[0],
                None => return Err(ArenaError::ScriptExhausted(s)),
            }
        };
        memory = strategy.next_memory(memory, s);
        play.push(next);
    }
    Ok(play)
}

/// Plays two strategies (one per player) against each other.
pub fn run_pair(
    graph: &GameGraph,
    first: &StrategyAutomaton,
    second: &StrategyAutomaton,
    steps: usize,
) -> Vec<State> {
    assert_ne!(first.player(), second.player());
    let mut play = vec![graph.root()];
    let (mut m1, mut m2) = (first.init(), second.init());
    for _ in 0..steps {
        let s = *play.last().unwrap();
        let next = first
            .choice(m1, s)
            .or_else(|| second.choice(m2, s))
            .expect("every position is owned by someone");
        m1 = first.next_memory(m1, s);
        m2 = second.next_memory(m2, s);
        play.push(next);
    }
    play
}

/// Ultimately periodic play `stem · cycle^ω`, as a vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    pub fn new(arena: &Arena, stem: Vec<Vertex>, cycle: Vec<Vertex>) -> Result<Self, ArenaError> {
        let lasso = Lasso { stem, cycle };
        lasso.validate(arena)?;
        Ok(lasso)
    }

    pub fn validate(&self, arena: &Arena) -> Result<(), ArenaError> {
        let bad = |msg: &str| Err(ArenaError::InvalidLasso(msg.to_string()));
        if self.cycle.is_empty() {
            return bad("empty cycle");
        }
        if self.stem.iter().chain(&self.cycle).any(|&v| v >= arena.len()) {
            return bad("vertex out of range");
        }
        let first = self.stem.first().unwrap_or(&self.cycle[0]);
        if *first != arena.start() {
            return bad("play does not begin at the start vertex");
        }
        let walk: Vec<Vertex> = self
            .stem
            .iter()
            .chain(&self.cycle)
            .chain(std::iter::once(&self.cycle[0]))
            .copied()
            .collect();
        if walk.windows(2).any(|w| !arena.has_edge(w[0], w[1])) {
            return bad("consecutive vertices are not joined by an edge");
        }
        Ok(())
    }

    /// The first `len` vertices of the play.
    pub fn prefix(&self, len: usize) -> Vec<Vertex> {
        self.stem
            .iter()
            .chain(self.cycle.iter().cycle())
            .take(len)
            .copied()
            .collect()
    }

    /// A pair of strategies (I first) whose joint play is this lasso; the
    /// memory is the index into `stem · cycle`.
    pub fn strategies(&self, arena: &Arena) -> (StrategyAutomaton, StrategyAutomaton) {
        let graph = arena.graph();
        let seq: Vec<Vertex> = self.stem.iter().chain(&self.cycle).copied().collect();
        let len = seq.len();
        let wrap = self.stem.len();
        let next_index = |i: usize| if i + 1 < len { i + 1 } else { wrap };
        let build = |player: Player| {
            let mut update = Vec::with_capacity(len);
            let mut choose = Vec::with_capacity(len);
            for (i, _) in seq.iter().enumerate() {
                let n = next_index(i);
                update.push(vec![n; graph.len()]);
                choose.push(
                    (0..graph.len())
                        .map(|v| {
                            (graph.owner(v) == player).then(|| {
                                if v == seq[i] {
                                    seq[n]
                                } else {
                                    graph.successors(v)[0]
                                }
                            })
                        })
                        .collect(),
                );
            }
            StrategyAutomaton::new(&graph, player, 0, update, choose)
                .expect("lasso strategies are well formed")
        };
        (build(Player::I), build(Player::II))
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stem {:?} cycle {:?}", self.stem, self.cycle)
    }
}
