//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sigma3::arena::Player;
use sigma3::davis::{self, DavisContext};
use sigma3::fixpoint::{check_monotone, iterate, random_pair, FnOperator, MonotoneOperator};
use sigma3::harness::{gen_instance, GenParams, Instance};
use sigma3::mullersolve::{self, SubGameObjective};
use sigma3::payoff::{eval_lasso, eval_lasso_component};
use sigma3::verify::{
    brute_force_winner, component_play, lasso_consistent, verify_i, verify_ii, BruteForceCaps, Verdict,
};

const INSTANCES: u64 = 500;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn instances() -> Vec<Instance> {
    let params = GenParams::default();
    (0..INSTANCES).map(|seed| gen_instance(&params.with_seed(seed))).collect()
}

fn dichotomy(all: &[Instance]) -> Outcome {
    let start = Instant::now();
    let bad: Vec<usize> = all
        .par_iter()
        .enumerate()
        .filter_map(|(i, inst)| {
            let g = inst.arena.graph();
            let win_i = mullersolve::solve(&g, &SubGameObjective::payoff_only(&inst.payoff, &g))
                .unwrap()
                .win_i;
            let ok = (0..inst.payoff.component_count()).all(|k| {
                let ctx = DavisContext::new(&g, &inst.payoff, k).unwrap();
                let stages = ctx.phi_stages().unwrap();
                (0..ctx.space_len())
                    .all(|p| stages.fixed_point().contains(p) != win_i.contains(ctx.game_state(p)))
            });
            (!ok).then_some(i)
        })
        .collect();
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{}/{} instances agree on every component in {:.2?}{}",
            all.len() - bad.len(),
            all.len(),
            elapsed,
            if bad.is_empty() { String::new() } else { format!("; first failure seed {}", bad[0]) }
        ),
    )
}

fn triple_agreement(all: &[Instance]) -> Outcome {
    let results: Vec<Result<Player, String>> = all
        .par_iter()
        .map(|inst| {
            let g = inst.arena.graph();
            let direct = mullersolve::solve(&g, &SubGameObjective::payoff_only(&inst.payoff, &g))
                .map_err(|e| e.to_string())?;
            if direct.win_i.contains(g.root()) == direct.win_ii.contains(g.root()) {
                return Err("direct solver does not name exactly one winner".into());
            }
            let fix = davis::solve(&g, &inst.payoff).map_err(|e| e.to_string())?.winner;
            let brute = brute_force_winner(&inst.arena, &inst.payoff, 1, BruteForceCaps::default())
                .map_err(|e| e.to_string())?;
            let d = direct.winner_at(g.root());
            if fix == d && brute == d {
                Ok(d)
            } else {
                Err(format!("fixpoint {fix}, direct {d}, brute {brute}"))
            }
        })
        .collect();
    let failures: Vec<(usize, &String)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
        .collect();
    let i_wins = results.iter().filter(|r| matches!(r, Ok(Player::I))).count();
    outcome(
        failures.is_empty(),
        format!(
            "{}/{} agree (I wins {}, II wins {}){}",
            results.len() - failures.len(),
            results.len(),
            i_wins,
            results.len() - failures.len() - i_wins,
            failures.first().map_or(String::new(), |(i, e)| format!("; seed {i}: {e}"))
        ),
    )
}

fn certification(all: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut certified = 0;
    let mut mutants = 0;
    let mut refuted = 0;
    let mut bad_counterexamples = 0;
    let mut failures = Vec::new();
    for (i, inst) in all.iter().enumerate() {
        let g = inst.arena.graph();
        let sol = match davis::solve(&g, &inst.payoff) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {i}: {e}"));
                continue;
            }
        };
        let check = |s| match sol.winner {
            Player::I => verify_i(&g, &inst.payoff, s),
            Player::II => verify_ii(&g, &inst.payoff, s),
        };
        if check(&sol.strategy).unwrap().is_certified() {
            certified += 1;
        } else {
            failures.push(format!("seed {i}: emitted strategy refuted"));
        }
        if mutants >= 50 {
            continue;
        }
        let Some(mutant) = common::mutate(&g, &sol.strategy, &mut rng) else {
            continue;
        };
        mutants += 1;
        if let Verdict::Refuted(play) = check(&mutant).unwrap() {
            refuted += 1;
            let lasso = play.to_lasso(&g, &inst.arena).unwrap();
            let in_payoff = eval_lasso(&lasso, &inst.payoff).unwrap();
            let expected = sol.winner == Player::II;
            if in_payoff != expected || !lasso_consistent(&g, &play, &mutant) {
                bad_counterexamples += 1;
            }
        }
    }
    outcome(
        failures.is_empty() && bad_counterexamples == 0 && mutants == 50,
        format!(
            "{certified}/{} strategies certified; {mutants} mutants, {refuted} refuted, {bad_counterexamples} bad counterexamples{}",
            all.len(),
            failures.first().map_or(String::new(), |f| format!("; {f}"))
        ),
    )
}

/// Good positions `(instance, component, position)` sampled across instances.
fn good_positions(all: &[Instance], count: usize) -> Vec<(usize, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    for (i, inst) in all.iter().enumerate() {
        if out.len() >= count {
            break;
        }
        let k = rng.gen_range(0..inst.payoff.component_count());
        let ctx = DavisContext::new(&inst.arena.graph(), &inst.payoff, k).unwrap();
        let stages = ctx.phi_stages().unwrap();
        let good: Vec<usize> = stages.fixed_point().ones().collect();
        if !good.is_empty() {
            out.push((i, k, good[rng.gen_range(0..good.len())]));
        }
    }
    out
}

fn witness_postconditions(all: &[Instance]) -> Outcome {
    let sample = good_positions(all, 100);
    let mut ok = 0;
    let mut failure = None;
    for &(i, k, p) in &sample {
        let inst = &all[i];
        let ctx = DavisContext::new(&inst.arena.graph(), &inst.payoff, k).unwrap();
        let stages = ctx.phi_stages().unwrap();
        let result = ctx.goodness_witness(&stages, p).map(|w| {
            let view = w.quasi.view();
            let avoids = component_play(view, &inst.payoff, k).is_none();
            let inside = mullersolve::solve(view, &SubGameObjective::payoff_only(&inst.payoff, view)).unwrap();
            avoids && inside.win_i.is_clear()
        });
        match result {
            Ok(true) => ok += 1,
            Ok(false) => {
                failure.get_or_insert(format!("seed {i} k {k} p {p}: postcondition fails"));
            }
            Err(e) => {
                failure.get_or_insert(format!("seed {i} k {k} p {p}: {e}"));
            }
        }
    }
    outcome(
        ok == sample.len() && sample.len() == 100,
        format!(
            "{ok}/{} witnesses avoid their component and leave I no winning region{}",
            sample.len(),
            failure.map_or(String::new(), |f| format!("; {f}"))
        ),
    )
}

/// Stage laws for any operator; returns a description of the first
/// violation.
fn stage_laws<O>(op: &O, prefixed_samples: usize, seed: u64) -> Result<(), String>
where
    O: MonotoneOperator,
    O::Error: std::fmt::Debug,
{
    let n = op.universe();
    let s = iterate(op).map_err(|e| format!("{e:?}"))?;
    if s.closure() > n {
        return Err(format!("closure {} exceeds base {n}", s.closure()));
    }
    for xi in 0..=s.closure() {
        let below = s.below(xi);
        let mut expect = op.apply(&below).unwrap();
        expect.union_with(&below);
        if s.stage(xi) != &expect || !below.is_subset(s.stage(xi)) {
            return Err(format!("stage {xi} is not apply(below) ∪ below"));
        }
        if xi < s.closure() && &below == s.stage(xi) {
            return Err(format!("closed before the reported closure at {xi}"));
        }
    }
    let fp = s.fixed_point();
    if !op.apply(fp).unwrap().is_subset(fp) {
        return Err("fixed point is not closed".into());
    }
    if &s.prewellorder().field() != fp {
        return Err("ranked elements differ from the fixed point".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..prefixed_samples {
        let (mut p, _) = random_pair(&mut rng, n);
        loop {
            let mut next = op.apply(&p).unwrap();
            next.union_with(&p);
            if next == p {
                break;
            }
            p = next;
        }
        if !fp.is_subset(&p) {
            return Err("fixed point not below a pre-fixed point".into());
        }
    }
    let report = check_monotone(op, 20, seed).unwrap();
    if !report.is_success() {
        return Err(report.to_string());
    }
    Ok(())
}

fn horn_operator(rng: &mut ChaCha8Rng) -> FnOperator<impl Fn(&FixedBitSet) -> FixedBitSet> {
    let n = rng.gen_range(1..=12);
    let rules: Vec<(usize, Vec<usize>)> = (0..rng.gen_range(0..=24))
        .map(|_| {
            let body = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..n)).collect();
            (rng.gen_range(0..n), body)
        })
        .collect();
    FnOperator::new(n, move |x: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(n);
        for (head, body) in &rules {
            if body.iter().all(|&b| x.contains(b)) {
                out.insert(*head);
            }
        }
        out
    })
}

fn fixpoint_laws(all: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut horn_bad = None;
    for i in 0..200 {
        let op = horn_operator(&mut rng);
        if let Err(e) = stage_laws(&op, 50, i) {
            horn_bad.get_or_insert(format!("operator {i}: {e}"));
        }
    }
    let davis_bad: Vec<String> = all
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, inst)| {
            let g = inst.arena.graph();
            (0..inst.payoff.component_count()).filter_map(move |k| {
                let ctx = DavisContext::new(&g, &inst.payoff, k).unwrap();
                let op = davis::phi_operator(&ctx);
                let laws = stage_laws(&op, 10, i as u64);
                laws.err().map(|e| format!("seed {i} k {k}: {e}"))
            })
        })
        .collect();
    let ladder = FnOperator::new(12, |x: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(12);
        out.insert(0);
        for m in x.ones().filter(|&m| m + 1 < 12) {
            out.insert(m + 1);
        }
        out
    });
    let order = iterate(&ladder).unwrap().prewellorder();
    let ladder_ok = (0..12).all(|n| order.rank(n) == Some(n));
    outcome(
        horn_bad.is_none() && davis_bad.is_empty() && ladder_ok,
        format!(
            "200 Horn operators {}, Φ on {} instances {}, ladder ranks {}{}",
            if horn_bad.is_none() { "ok" } else { "FAIL" },
            all.len(),
            if davis_bad.is_empty() { "ok" } else { "FAIL" },
            if ladder_ok { "exact" } else { "WRONG" },
            horn_bad
                .or(davis_bad.first().cloned())
                .map_or(String::new(), |e| format!("; {e}"))
        ),
    )
}

fn oracle_equivalence(all: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<(usize, usize, FixedBitSet)> = (0..100)
        .map(|_| {
            let i = rng.gen_range(0..all.len());
            let k = rng.gen_range(0..all[i].payoff.component_count());
            let n = DavisContext::new(&all[i].arena.graph(), &all[i].payoff, k)
                .unwrap()
                .space_len();
            (i, k, random_pair(&mut rng, n).1)
        })
        .collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|(i, k, x)| {
            let ctx = DavisContext::new(&all[*i].arena.graph(), &all[*i].payoff, *k).unwrap();
            let cap = ctx.space_len() + 2;
            let exact = ctx.phi_apply(x).unwrap();
            let capped = ctx.phi_apply_capped(x, cap).unwrap();
            let next = ctx.phi_apply_capped(x, cap + 1).unwrap();
            (exact != capped || capped != next).then(|| format!("seed {i} k {k}"))
        })
        .collect();
    outcome(
        bad.is_empty(),
        format!(
            "{}/100 pairs equal at cap |space|+2 and stable at +1{}",
            100 - bad.len(),
            bad.first().map_or(String::new(), |e| format!("; first failure {e}"))
        ),
    )
}

fn annotation_monotonicity(all: &[Instance]) -> Outcome {
    let sample = good_positions(all, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut plays = 0;
    let mut bad = 0;
    for &(i, k, p) in &sample {
        let inst = &all[i];
        let ctx = DavisContext::new(&inst.arena.graph(), &inst.payoff, k).unwrap();
        let stages = ctx.phi_stages().unwrap();
        let w = ctx.goodness_witness(&stages, p).unwrap();
        for _ in 0..100 {
            let walk = common::random_walk(w.quasi.view(), 40, &mut rng);
            plays += 1;
            if walk
                .windows(2)
                .any(|s| w.annotation[s[1]].rank > w.annotation[s[0]].rank)
            {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && !sample.is_empty(),
        format!("{} witnesses, {plays} plays, {bad} with a rank increase", sample.len()),
    )
}

fn round_robin() -> Outcome {
    let params = GenParams {
        components: 2..=2,
        ..GenParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances = 0;
    let mut lassos = 0;
    let mut failure = None;
    for seed in 0.. {
        if instances == 30 {
            break;
        }
        let inst = gen_instance(&params.with_seed(seed));
        let g = inst.arena.graph();
        let sol = davis::solve(&g, &inst.payoff).unwrap();
        if sol.winner != Player::II {
            continue;
        }
        instances += 1;
        for _ in 0..50 {
            let play = common::random_opponent_lasso(&g, &sol.strategy, &mut rng);
            let lasso = play.to_lasso(&g, &inst.arena).unwrap();
            lassos += 1;
            let hits = (0..2)
                .filter(|&k| eval_lasso_component(&lasso, &inst.payoff, k).unwrap())
                .count();
            if hits > 0 || !lasso_consistent(&g, &play, &sol.strategy) {
                failure.get_or_insert(format!("seed {seed}: {lasso}"));
            }
        }
    }
    outcome(
        failure.is_none(),
        format!(
            "{instances} two-component instances won by II, {lassos} lassos consistent with τ miss both components{}",
            failure.map_or(String::new(), |f| format!("; {f}"))
        ),
    )
}

fn main() {
    let all = instances();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("dichotomy", Box::new(|| dichotomy(&all))),
        ("triple agreement", Box::new(|| triple_agreement(&all))),
        ("certification", Box::new(|| certification(&all))),
        ("witness postconditions", Box::new(|| witness_postconditions(&all))),
        ("fixpoint laws", Box::new(|| fixpoint_laws(&all))),
        ("operator oracle equivalence", Box::new(|| oracle_equivalence(&all))),
        ("annotation monotonicity", Box::new(|| annotation_monotonicity(&all))),
        ("round-robin refinement", Box::new(round_robin)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        println!(
            "[{}] {} {name}: {}",
            i + 1,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail
        );
        failed += usize::from(!result.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
