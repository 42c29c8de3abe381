//! Payoffs that are finite unions of generalized-Büchi components, and the
//! round monitors that present each component as a countable intersection of
//! open sets.
//!
//! Component `k` holds target sets `F[k][0..J_k]`. A play satisfies the
//! component when it visits every target set infinitely often; Player I wins
//! when some component is satisfied.
//!
//! The monitor for component `k` keeps an obligation pointer `j`. Consuming a
//! vertex in `F[k][j]` advances the pointer, and a wrap from `J_k - 1` back to
//! `0` completes one round. "At least `n` rounds completed" is closed under
//! extension, needs at least `n` consumed vertices, and holds for every
//! `n` along a play exactly when the play satisfies the component.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::arena::{Arena, Lasso, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayoffError {
    #[error("payoff has no components")]
    NoComponents,
    #[error("component {0} has no target sets")]
    EmptyComponent(usize),
    #[error("target set {0}/{1} is empty")]
    EmptyTarget(usize, usize),
    #[error("target set {k}/{j} mentions vertex {vertex} outside the arena")]
    TargetNotInArena { k: usize, j: usize, vertex: Vertex },
    #[error("vertex {0} is outside the payoff's arena")]
    VertexOutOfRange(Vertex),
    #[error("the sequence is not a path: no edge {0} -> {1}")]
    NotAPath(Vertex, Vertex),
    #[error("component {0} does not exist")]
    NoSuchComponent(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma3Payoff {
    vertex_count: usize,
    components: Vec<Vec<FixedBitSet>>,
}

impl Sigma3Payoff {
    pub fn new(vertex_count: usize, components: Vec<Vec<Vec<Vertex>>>) -> Result<Self, PayoffError> {
        if components.is_empty() {
            return Err(PayoffError::NoComponents);
        }
        let mut out = Vec::with_capacity(components.len());
        for (k, comp) in components.into_iter().enumerate() {
            if comp.is_empty() {
                return Err(PayoffError::EmptyComponent(k));
            }
            let mut sets = Vec::with_capacity(comp.len());
            for (j, target) in comp.into_iter().enumerate() {
                if target.is_empty() {
                    return Err(PayoffError::EmptyTarget(k, j));
                }
                let mut set = FixedBitSet::with_capacity(vertex_count);
                for v in target {
                    if v >= vertex_count {
                        return Err(PayoffError::TargetNotInArena { k, j, vertex: v });
                    }
                    set.insert(v);
                }
                sets.push(set);
            }
            out.push(sets);
        }
        Ok(Sigma3Payoff {
            vertex_count,
            components: out,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn target_count(&self, k: usize) -> usize {
        self.components[k].len()
    }

    pub fn target(&self, k: usize, j: usize) -> &FixedBitSet {
        &self.components[k][j]
    }

    pub fn targets(&self, k: usize) -> &[FixedBitSet] {
        &self.components[k]
    }

    pub fn in_target(&self, k: usize, j: usize, v: Vertex) -> bool {
        self.components[k][j].contains(v)
    }

    /// Does a play whose inf-set is `inf` satisfy component `k`?
    pub fn component_satisfied(&self, k: usize, inf: &FixedBitSet) -> bool {
        self.components[k].iter().all(|f| !f.is_disjoint(inf))
    }

    /// Does a play whose inf-set is `inf` belong to the payoff?
    pub fn satisfied_by(&self, inf: &FixedBitSet) -> bool {
        (0..self.components.len()).any(|k| self.component_satisfied(k, inf))
    }

    /// Total number of target sets over all components.
    pub fn label_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    /// Bit masks over target-set labels, numbered component by component:
    /// one mask per component.
    pub fn component_masks(&self) -> Vec<u64> {
        assert!(self.label_count() <= 64, "at most 64 target sets supported");
        let mut next = 0;
        self.components
            .iter()
            .map(|comp| {
                let mask = comp.iter().fold(0u64, |m, _| {
                    next += 1;
                    m | 1 << (next - 1)
                });
                mask
            })
            .collect()
    }

    /// Labels of the target sets containing `v`, numbered as in
    /// [`Sigma3Payoff::component_masks`].
    pub fn vertex_labels(&self, v: Vertex) -> u64 {
        let mut mask = 0u64;
        let mut id = 0;
        for comp in &self.components {
            for f in comp {
                if f.contains(v) {
                    mask |= 1 << id;
                }
                id += 1;
            }
        }
        mask
    }

    pub fn monitor(&self, k: usize) -> ProgressMonitor<'_> {
        ProgressMonitor { payoff: self, k }
    }

    fn inf_set(&self, lasso: &Lasso) -> Result<FixedBitSet, PayoffError> {
        let mut inf = FixedBitSet::with_capacity(self.vertex_count);
        for &v in lasso.stem.iter().chain(&lasso.cycle) {
            if v >= self.vertex_count {
                return Err(PayoffError::VertexOutOfRange(v));
            }
        }
        for &v in &lasso.cycle {
            inf.insert(v);
        }
        Ok(inf)
    }
}

/// Does the play `stem · cycle^ω` belong to the payoff?
pub fn eval_lasso(lasso: &Lasso, payoff: &Sigma3Payoff) -> Result<bool, PayoffError> {
    Ok(payoff.satisfied_by(&payoff.inf_set(lasso)?))
}

/// Does the play `stem · cycle^ω` belong to component `k`?
pub fn eval_lasso_component(
    lasso: &Lasso,
    payoff: &Sigma3Payoff,
    k: usize,
) -> Result<bool, PayoffError> {
    if k >= payoff.component_count() {
        return Err(PayoffError::NoSuchComponent(k));
    }
    Ok(payoff.component_satisfied(k, &payoff.inf_set(lasso)?))
}

/// Round-robin obligation monitor for one component.
#[derive(Clone, Copy, Debug)]
pub struct ProgressMonitor<'a> {
    payoff: &'a Sigma3Payoff,
    k: usize,
}

/// Monitor state after consuming a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MonitorState {
    pub obligation: usize,
    pub rounds: usize,
}

impl ProgressMonitor<'_> {
    pub fn component(&self) -> usize {
        self.k
    }

    pub fn obligations(&self) -> usize {
        self.payoff.target_count(self.k)
    }

    /// Consumes `v` with pointer `j`; returns the new pointer and whether a
    /// round was completed. At most one obligation is discharged per vertex.
    pub fn step(&self, j: usize, v: Vertex) -> (usize, bool) {
        if self.payoff.in_target(self.k, j, v) {
            let next = (j + 1) % self.obligations();
            (next, next == 0)
        } else {
            (j, false)
        }
    }

    /// Runs the monitor over a path of the arena, consuming every vertex
    /// including the first.
    pub fn run(&self, arena: &Arena, path: &[Vertex]) -> Result<MonitorState, PayoffError> {
        for &v in path {
            if v >= arena.len() || v >= self.payoff.vertex_count() {
                return Err(PayoffError::VertexOutOfRange(v));
            }
        }
        if let Some(w) = path.windows(2).find(|w| !arena.has_edge(w[0], w[1])) {
            return Err(PayoffError::NotAPath(w[0], w[1]));
        }
        let mut state = MonitorState::default();
        for &v in path {
            let (j, wrapped) = self.step(state.obligation, v);
            state.obligation = j;
            state.rounds += wrapped as usize;
        }
        Ok(state)
    }
}

/// A position of the monitored product: arena vertex plus obligation pointer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub vertex: Vertex,
    pub obligation: usize,
}
