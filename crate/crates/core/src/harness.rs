//! Seeded random instances and three-way cross-checks between the fixed-point
//! solver, the direct solver and brute force.

use std::fmt;
use std::ops::{Range, RangeInclusive};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arena::{validate_arena, Arena, Player, RawArena};
use crate::davis::{self, DavisContext};
use crate::mullersolve::{self, SubGameObjective};
use crate::payoff::Sigma3Payoff;
use crate::verify::{brute_force_winner, verify_i, verify_ii, BruteForceCaps};

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub vertices: RangeInclusive<usize>,
    pub edge_density: f64,
    /// Probability that a vertex belongs to Player I.
    pub owner_balance: f64,
    pub components: RangeInclusive<usize>,
    pub targets: RangeInclusive<usize>,
    pub target_density: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            vertices: 2..=6,
            edge_density: 0.35,
            owner_balance: 0.5,
            components: 1..=2,
            targets: 1..=2,
            target_density: 0.3,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn with_seed(&self, seed: u64) -> Self {
        GenParams {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub arena: Arena,
    pub payoff: Sigma3Payoff,
}

/// Deterministic in `params`. Vertices without successors get a self-loop;
/// empty target sets get one random vertex.
pub fn gen_instance(params: &GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(params.vertices.clone()).max(1);
    let name = |v: usize| format!("v{v}");
    let vertices: Vec<(String, Player)> = (0..n)
        .map(|v| {
            let owner = if rng.gen_bool(params.owner_balance) {
                Player::I
            } else {
                Player::II
            };
            (name(v), owner)
        })
        .collect();
    let mut edges = Vec::new();
    for v in 0..n {
        let before = edges.len();
        for w in 0..n {
            if rng.gen_bool(params.edge_density) {
                edges.push((name(v), name(w)));
            }
        }
        if edges.len() == before {
            edges.push((name(v), name(v)));
        }
    }
    let arena = validate_arena(&RawArena {
        vertices,
        edges,
        start: name(0),
    })
    .expect("generated arenas have no dead ends");
    let k = rng.gen_range(params.components.clone()).max(1);
    let components = (0..k)
        .map(|_| {
            let j = rng.gen_range(params.targets.clone()).max(1);
            (0..j)
                .map(|_| {
                    let mut target: Vec<usize> =
                        (0..n).filter(|_| rng.gen_bool(params.target_density)).collect();
                    if target.is_empty() {
                        target.push(rng.gen_range(0..n));
                    }
                    target
                })
                .collect()
        })
        .collect();
    let payoff = Sigma3Payoff::new(n, components).expect("generated payoffs are valid");
    Instance { arena, payoff }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub fixpoint_winner: Option<Player>,
    pub direct_winner: Player,
    /// `None` when the instance exceeds the brute-force caps.
    pub brute_winner: Option<Player>,
    pub fixpoint_certified: bool,
    pub direct_certified: bool,
    /// Complement of the fixed point equals I's region, for every component.
    pub dichotomy: bool,
    pub closure: usize,
    pub nodes: usize,
    pub error: Option<String>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.fixpoint_certified
            && self.direct_certified
            && self.dichotomy
            && self.fixpoint_winner == Some(self.direct_winner)
            && self.brute_winner.is_none_or(|w| w == self.direct_winner)
    }

    pub fn winner(&self) -> Option<Player> {
        self.fixpoint_winner
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let winner = self.fixpoint_winner.map_or("?".to_string(), |w| w.to_string());
        write!(
            f,
            "{winner} {} {} {}",
            if self.passed() { "certified" } else { "FAILED" },
            self.closure,
            self.nodes
        )?;
        if let Some(e) = &self.error {
            write!(f, " ({e})")?;
        }
        Ok(())
    }
}

/// Runs every engine on the instance and compares.
pub fn cross_check(arena: &Arena, payoff: &Sigma3Payoff) -> CrossCheckReport {
    let g = arena.graph();
    let mut report = CrossCheckReport {
        fixpoint_winner: None,
        direct_winner: Player::II,
        brute_winner: None,
        fixpoint_certified: false,
        direct_certified: false,
        dichotomy: true,
        closure: 0,
        nodes: 0,
        error: None,
    };

    let direct = match mullersolve::solve(&g, &SubGameObjective::payoff_only(payoff, &g)) {
        Ok(d) => d,
        Err(e) => {
            report.error = Some(format!("direct solver: {e}"));
            return report;
        }
    };
    report.direct_winner = direct.winner_at(g.root());
    let direct_check = match report.direct_winner {
        Player::I => verify_i(&g, payoff, &direct.strat_i),
        Player::II => verify_ii(&g, payoff, &direct.strat_ii),
    };
    report.direct_certified = matches!(direct_check, Ok(v) if v.is_certified());

    match davis::solve(&g, payoff) {
        Ok(sol) => {
            report.fixpoint_winner = Some(sol.winner);
            report.fixpoint_certified = true;
            match &sol.certificate {
                davis::Certificate::Stages { closure, .. } => report.closure = *closure,
                davis::Certificate::Refinement { nodes } => {
                    report.nodes = nodes.len();
                    report.closure = nodes.first().map_or(0, |n| n.1);
                }
            }
        }
        Err(e) => report.error = Some(format!("fixpoint solver: {e}")),
    }

    for k in 0..payoff.component_count() {
        let outcome = DavisContext::new(&g, payoff, k).and_then(|ctx| {
            let stages = ctx.phi_stages()?;
            Ok((0..ctx.space_len()).all(|p| {
                stages.fixed_point().contains(p) != direct.win_i.contains(ctx.game_state(p))
            }))
        });
        match outcome {
            Ok(ok) => report.dichotomy &= ok,
            Err(e) => {
                report.dichotomy = false;
                report.error.get_or_insert(format!("stages for component {k}: {e}"));
            }
        }
    }

    report.brute_winner = brute_force_winner(arena, payoff, 1, BruteForceCaps::default()).ok();
    report
}

/// Cross-checks every seed in `seeds`, in parallel; results are in seed
/// order.
pub fn campaign(params: &GenParams, seeds: Range<u64>) -> Vec<(u64, CrossCheckReport)> {
    seeds
        .into_par_iter()
        .map(|seed| {
            let inst = gen_instance(&params.with_seed(seed));
            (seed, cross_check(&inst.arena, &inst.payoff))
        })
        .collect()
}
