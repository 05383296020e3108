//! Discrete binary agents: sensorium layout, observation, the update and
//! execute cycle, and the random and excitation-driven controllers.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::envs::Environment;
use crate::error::Error;
use crate::literal::{Degree, LitSet, Literal, Sensorium, StarSelection};
use crate::propagation::{
    closure_counted, grp_choose, predict_action_counted, propagate_counted, ContextMap, GeneralizedAction, PlanDecision,
};
use crate::snapshot::{Snapshot, SnapshotKind};

/// Which sensor groups to include besides the place fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SensorPlan {
    pub actions: bool,
    pub contexts: bool,
    /// `better` and `worse`.
    pub gradient: bool,
}

impl SensorPlan {
    pub const POSITION_ONLY: SensorPlan = SensorPlan { actions: false, contexts: false, gradient: false };
    pub const NAVIGATION: SensorPlan = SensorPlan { actions: true, contexts: true, gradient: true };
}

/// Sensor indices of an agent's sensorium. Place field `i` of the
/// environment is sensor `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentLayout {
    pub sensorium: Sensorium,
    pub n_loc: usize,
    /// Sensor of each environment action.
    pub actions: Vec<usize>,
    pub better: Option<usize>,
    pub worse: Option<usize>,
    pub contexts: ContextMap,
}

impl AgentLayout {
    /// Literals of degree-0 sensors.
    pub fn state_literals(&self) -> LitSet {
        let mut s = LitSet::new(self.sensorium.universe());
        for i in 0..self.sensorium.len() {
            if self.sensorium.degree(i) == Degree::State {
                s.insert(Literal::pos(i));
                s.insert(Literal::neg(i));
            }
        }
        s
    }

    pub fn loc_sensors(&self) -> Vec<usize> {
        (0..self.n_loc).collect()
    }
}

/// Place fields (degree 0), then actions, `better`, `worse`, and the
/// contexts `α∧s`, `α∧s*` for every action and field (degree 1).
pub fn build_sensorium(env: &Environment, plan: SensorPlan) -> AgentLayout {
    let mut sens = Sensorium::new();
    for name in env.field_names() {
        sens.add(name.clone(), Degree::State);
    }
    let n_loc = env.n_fields();
    let mut actions = Vec::new();
    if plan.actions || plan.contexts {
        for a in env.action_names() {
            actions.push(sens.add(a.clone(), Degree::Transition));
        }
    }
    let (mut better, mut worse) = (None, None);
    if plan.gradient {
        better = Some(sens.add("better", Degree::Transition));
        worse = Some(sens.add("worse", Degree::Transition));
    }
    let mut contexts = ContextMap::new();
    if plan.contexts {
        for (k, a) in env.action_names().iter().enumerate() {
            for i in 0..n_loc {
                let f = &env.field_names()[i];
                let c = sens.add(format!("{a}&{f}"), Degree::Transition);
                contexts.insert(actions[k], Literal::pos(i), Literal::pos(c));
                let c = sens.add(format!("{a}&~{f}"), Degree::Transition);
                contexts.insert(actions[k], Literal::neg(i), Literal::pos(c));
            }
        }
    }
    AgentLayout { sensorium: sens, n_loc, actions, better, worse, contexts }
}

fn put(o: &mut LitSet, sensor: usize, on: bool) {
    o.insert(if on { Literal::pos(sensor) } else { Literal::neg(sensor) });
}

/// Complete observation at position `x` after `action` (an environment
/// action index) was taken with `prev` as the previous state. Contexts read
/// `prev`; `better`/`worse` compare `dist` with `prev_dist`. With no prior
/// transition every transition sensor is off.
pub fn observe_at(
    layout: &AgentLayout,
    env: &Environment,
    x: usize,
    prev: Option<&LitSet>,
    action: Option<usize>,
    prev_dist: Option<usize>,
) -> StarSelection {
    let mut o = LitSet::new(layout.sensorium.universe());
    for i in 0..layout.n_loc {
        put(&mut o, i, env.field(i, x));
    }
    let act_sensor = action.and_then(|k| layout.actions.get(k).copied());
    for &s in &layout.actions {
        put(&mut o, s, Some(s) == act_sensor);
    }
    let d = env.distance_from(x);
    if let Some(b) = layout.better {
        put(&mut o, b, prev_dist.is_some_and(|p| d < p));
    }
    if let Some(w) = layout.worse {
        put(&mut o, w, prev_dist.is_some_and(|p| d > p));
    }
    for &(a, s, ctx) in layout.contexts.entries() {
        let on = Some(a) == act_sensor && prev.is_some_and(|p| p.contains(s));
        put(&mut o, ctx.sensor(), on);
    }
    StarSelection::new(o).expect("one literal per sensor")
}

/// Observation after taking `action` at `x` when the previous state is the
/// true footprint of `x`.
pub fn transition_observation(layout: &AgentLayout, env: &Environment, x: usize, action: usize) -> StarSelection {
    let before = observe_at(layout, env, x, None, None, None);
    let y = env.transition(x, action);
    observe_at(layout, env, y, Some(before.as_set()), Some(action), Some(env.distance_from(x)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LearnerKind {
    Empirical,
    Discounted { q: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Controller {
    /// Uniform over the environment's actions.
    Random,
    /// Seek `better`, else `worse*`; every `period`-th consecutive failure
    /// take a random action unless every action is predicted to avoid
    /// `better`.
    Excitation { period: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentConfig {
    pub learner: LearnerKind,
    pub tau: f64,
    pub controller: Controller,
    pub equivalences: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleRecord {
    pub t: u64,
    pub observation: LitSet,
    pub state: LitSet,
    /// Environment action taken.
    pub action: usize,
    pub decision: Option<PlanDecision>,
    pub clock: u64,
    pub position: usize,
    /// Distance to target before the action.
    pub distance: usize,
    /// Work done in this cycle.
    pub ops: u64,
}

#[derive(Clone, Debug)]
pub struct Agent {
    layout: AgentLayout,
    config: AgentConfig,
    snapshot: Snapshot,
    learning: bool,
    rng: ChaCha8Rng,
    failures: usize,
    t: u64,
    last_action: Option<usize>,
    last_dist: Option<usize>,
    state_mask: LitSet,
}

impl Agent {
    pub fn new(layout: AgentLayout, config: AgentConfig, rng: ChaCha8Rng) -> Result<Self, Error> {
        if let Controller::Excitation { period } = config.controller {
            if layout.better.is_none() || layout.worse.is_none() || layout.actions.is_empty() {
                return Err(Error::Invalid("excitation control needs actions and better/worse sensors".into()));
            }
            if period == 0 {
                return Err(Error::Invalid("random-action period must be positive".into()));
            }
        }
        let kind = match config.learner {
            LearnerKind::Empirical => SnapshotKind::Empirical,
            LearnerKind::Discounted { q } => {
                if !(0.0..=1.0).contains(&q) {
                    return Err(Error::DecayOutOfRange(q));
                }
                SnapshotKind::Probabilistic
            }
        };
        let mut snapshot = Snapshot::trivial(layout.sensorium.clone(), config.tau, kind)?;
        snapshot.set_equivalences(config.equivalences);
        let state_mask = layout.state_literals();
        Ok(Agent {
            layout,
            config,
            snapshot,
            learning: true,
            rng,
            failures: 0,
            t: 0,
            last_action: None,
            last_dist: None,
            state_mask,
        })
    }

    /// Agent whose empirical snapshot has seen every transition of `env`
    /// once (with `env`'s current target) and that no longer learns.
    pub fn preloaded(
        layout: AgentLayout,
        config: AgentConfig,
        env: &Environment,
        rng: ChaCha8Rng,
    ) -> Result<Self, Error> {
        let config = AgentConfig { learner: LearnerKind::Empirical, ..config };
        let mut agent = Agent::new(layout, config, rng)?;
        for x in 0..env.n_positions() {
            for a in 0..env.n_actions() {
                let o = transition_observation(&agent.layout, env, x, a);
                agent.snapshot.empirical_update(&o)?;
            }
        }
        agent.snapshot.set_state(LitSet::new(agent.layout.sensorium.universe()));
        agent.learning = false;
        Ok(agent)
    }

    pub fn layout(&self) -> &AgentLayout {
        &self.layout
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn is_learning(&self) -> bool {
        self.learning
    }

    pub fn set_learning(&mut self, on: bool) {
        self.learning = on;
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Observation of the environment's current position.
    pub fn observe(&self, env: &Environment) -> StarSelection {
        let prev = if self.t == 0 { None } else { Some(self.snapshot.state()) };
        observe_at(&self.layout, env, env.position(), prev, self.last_action, self.last_dist)
    }

    /// Observe, update the snapshot, decide, and move the environment.
    pub fn step(&mut self, env: &mut Environment) -> Result<CycleRecord, Error> {
        let ops0 = self.snapshot.ops();
        let o = self.observe(env);
        if self.learning {
            match self.config.learner {
                LearnerKind::Empirical => self.snapshot.empirical_update(&o)?,
                LearnerKind::Discounted { q } => self.snapshot.discounted_update(&o, q)?,
            }
        } else {
            self.snapshot.load(o.as_set());
        }
        let mut ops = self.snapshot.ops() - ops0;
        let (action, decision) = match self.config.controller {
            Controller::Random => (self.rng.random_range(0..env.n_actions()), None),
            Controller::Excitation { period } => {
                let d = self.excitation_policy(period, &mut ops);
                (d.chosen, Some(d))
            }
        };
        let rec = CycleRecord {
            t: self.t,
            observation: o.into_set(),
            state: self.snapshot.state().clone(),
            action,
            decision,
            clock: self.snapshot.clock(),
            position: env.position(),
            distance: env.distance(),
            ops,
        };
        self.last_dist = Some(env.distance());
        self.last_action = Some(action);
        env.step(action);
        self.t += 1;
        Ok(rec)
    }

    /// Decision over the pure actions (indexed like the environment's).
    pub fn excitation_policy(&mut self, period: usize, ops: &mut u64) -> PlanDecision {
        let g = self.snapshot.graph();
        let better = self.layout.better.expect("checked at construction");
        let worse = self.layout.worse.expect("checked at construction");
        let universe = self.layout.sensorium.universe();
        // Transition literals implied by the current state describe the last
        // step, not the next one, so they are dropped from the load.
        let load = closure_counted(g, &self.snapshot.state().intersection(&self.state_mask), ops)
            .intersection(&self.state_mask);
        let preds: Vec<LitSet> = self
            .layout
            .actions
            .iter()
            .map(|&s| predict_action_counted(g, &load, &GeneralizedAction::pure(s), &self.layout.contexts, ops))
            .collect();

        // Subgoals are state literals of R plus the target itself; the
        // transition literals implied by the target are not goals.
        let goals = |t: &LitSet, ops: &mut u64| {
            let mut s = propagate_counted(g, &load, t, ops).intersection(&self.state_mask);
            s.union_with(t);
            s.difference(&load)
        };
        let t1 = LitSet::from_literals(universe, [Literal::pos(better)]);
        let d1 = grp_choose(&goals(&t1, ops), &preds, &mut self.rng);
        if !d1.fallback {
            self.failures = 0;
            return d1;
        }
        self.failures += 1;
        let settled = preds.iter().all(|p| p.contains(Literal::neg(better)));
        if self.failures.is_multiple_of(period) && !settled {
            let chosen = self.rng.random_range(0..preds.len());
            return PlanDecision { chosen, achieved_subgoals: 0, fallback: true, scores: d1.scores };
        }
        let t2 = LitSet::from_literals(universe, [Literal::neg(worse)]);
        grp_choose(&goals(&t2, ops), &preds, &mut self.rng)
    }
}
