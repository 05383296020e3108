//! Signal propagation over a loaded poc graph, closest-point projection,
//! action prediction and the greedy reactive planner.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::PocGraph;
use crate::literal::{LitSet, Literal};

/// Forward closure of `t` in `g` (including `t`).
pub fn closure(g: &PocGraph, t: &LitSet) -> LitSet {
    let mut ops = 0;
    closure_counted(g, t, &mut ops)
}

/// [`closure`], adding visited literals and scanned edges to `ops`.
pub fn closure_counted(g: &PocGraph, t: &LitSet, ops: &mut u64) -> LitSet {
    let mut seen = t.clone();
    let mut stack: Vec<Literal> = t.iter().collect();
    while let Some(a) = stack.pop() {
        *ops += 1;
        for &b in g.children(a) {
            *ops += 1;
            if !seen.contains(b) {
                seen.insert(b);
                stack.push(b);
            }
        }
    }
    seen
}

/// `(B ∪ U) \ U*` with `U` the closure of `t`.
pub fn propagate(g: &PocGraph, b: &LitSet, t: &LitSet) -> LitSet {
    let mut ops = 0;
    propagate_counted(g, b, t, &mut ops)
}

pub fn propagate_counted(g: &PocGraph, b: &LitSet, t: &LitSet, ops: &mut u64) -> LitSet {
    let u = closure_counted(g, t, ops);
    let mut out = b.resized(u.universe());
    out.union_with(&u);
    out.difference_with(&u.star());
    out
}

/// Description of the closest-point projection of the current vertex set
/// onto the target `V[coh T]`.
pub fn project_to_target(g: &PocGraph, current: &LitSet, t: &LitSet) -> LitSet {
    propagate(g, &closure(g, current), t)
}

/// Contextualized action sensors: `α∧s` for an action sensor `α` and a
/// literal `s`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContextMap {
    entries: Vec<(usize, Literal, Literal)>,
}

impl ContextMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the positive literal `ctx` as `action ∧ s`.
    pub fn insert(&mut self, action: usize, s: Literal, ctx: Literal) {
        self.entries.push((action, s, ctx));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Literal, Literal)] {
        &self.entries
    }

    pub fn get(&self, action: usize, s: Literal) -> Option<Literal> {
        self.entries.iter().find(|e| e.0 == action && e.1 == s).map(|e| e.2)
    }

    /// Context literals `α∧s` that are on for action set `on` given `current`.
    pub fn signal(&self, on: &[usize], current: &LitSet) -> LitSet {
        let mut t = LitSet::new(current.universe());
        for &(a, s, ctx) in &self.entries {
            if on.contains(&a) && current.contains(s) {
                t.insert(ctx);
            }
        }
        t
    }
}

/// A generalized action given by the action sensors it turns on; the
/// remaining action sensors are off. An empty list is the no-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedAction {
    pub on: Vec<usize>,
}

impl GeneralizedAction {
    pub fn none() -> Self {
        GeneralizedAction { on: Vec::new() }
    }

    pub fn pure(sensor: usize) -> Self {
        GeneralizedAction { on: vec![sensor] }
    }

    /// The complete selection on the given action sensors.
    pub fn selection(&self, action_sensors: &[usize], universe: usize) -> LitSet {
        let mut s = LitSet::new(universe);
        for &i in action_sensors {
            s.insert(if self.on.contains(&i) { Literal::pos(i) } else { Literal::neg(i) });
        }
        s
    }
}

/// Hallucinated post-state: propagate the active contexts over `current`.
pub fn predict_action(g: &PocGraph, current: &LitSet, action: &GeneralizedAction, ctx: &ContextMap) -> LitSet {
    let mut ops = 0;
    predict_action_counted(g, current, action, ctx, &mut ops)
}

pub fn predict_action_counted(
    g: &PocGraph,
    current: &LitSet,
    action: &GeneralizedAction,
    ctx: &ContextMap,
    ops: &mut u64,
) -> LitSet {
    let t = ctx.signal(&action.on, current);
    *ops += ctx.len() as u64;
    propagate_counted(g, current, &t, ops)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanDecision {
    /// Index into the action list.
    pub chosen: usize,
    pub achieved_subgoals: usize,
    /// No action achieved a subgoal; the pick is uniform.
    pub fallback: bool,
    pub scores: Vec<usize>,
}

/// Scores each prediction by the number of `subgoals` it contains and picks
/// a best one uniformly; uniform over all when every score is 0.
pub fn grp_choose<R: Rng + ?Sized>(subgoals: &LitSet, predictions: &[LitSet], rng: &mut R) -> PlanDecision {
    assert!(!predictions.is_empty(), "no actions to choose from");
    let scores: Vec<usize> = predictions.iter().map(|p| p.intersection_len(subgoals)).collect();
    let best = scores.iter().copied().max().unwrap_or(0);
    if best == 0 {
        let chosen = rng.random_range(0..predictions.len());
        return PlanDecision { chosen, achieved_subgoals: 0, fallback: true, scores };
    }
    let top: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
    let chosen = top[rng.random_range(0..top.len())];
    PlanDecision { chosen, achieved_subgoals: best, fallback: false, scores }
}

/// Greedy reactive planner: project onto the target, predict every action,
/// and score by the subgoals `R \ current`.
pub fn grp_decide<R: Rng + ?Sized>(
    g: &PocGraph,
    current: &LitSet,
    t: &LitSet,
    actions: &[GeneralizedAction],
    ctx: &ContextMap,
    rng: &mut R,
) -> PlanDecision {
    let load = closure(g, current);
    let r = propagate(g, &load, t);
    let preds: Vec<LitSet> = actions.iter().map(|a| predict_action(g, &load, a, ctx)).collect();
    grp_choose(&r.difference(&load), &preds, rng)
}
