// Copyright 2026 The vote-elicit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Bayesian voting games played through an elicitation mechanism, exact
//! expected utilities, and Bayes-Nash equilibrium checking.

mod examples;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ballot::{all_ballots, ApprovalBallot, Ballot, Candidate, Protocol};
use crate::elicit::coarse::run_coarse;
use crate::elicit::fine::run_fine;
use crate::elicit::{CoarsePolicy, FineKnowledge, FinePolicy, FineQuery, TieRule};
use crate::error::{Error, Result};
use crate::scoring::winner;
use crate::termination::DEFAULT_STV_BUDGET;

pub use examples::{
    example_game, example_payoff_table, theorem7_game, theorem9_game, ExampleGame, MechanismKind,
    PayoffRow,
};

/// Default cap on deviation strategies evaluated per (agent, type).
pub const DEFAULT_DEVIATION_BUDGET: u128 = 1_000_000;

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// One type of one agent: a utility per candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentType {
    pub name: String,
    pub utilities: Vec<BigRational>,
}

impl AgentType {
    pub fn new(name: impl Into<String>, utilities: Vec<BigRational>) -> Self {
        AgentType {
            name: name.into(),
            utilities,
        }
    }
}

/// How ballots reach the voting rule.
pub enum Mechanism {
    /// Everyone reports a full ballot at once.
    Full,
    /// Whole ballots are elicited one voter at a time; a queried voter
    /// learns how many voters were queried before it.
    CoarsePositionObserving(Box<dyn CoarsePolicy>),
    /// Single-candidate queries; a voter sees the queries put to it so far.
    FineTree(Box<dyn FinePolicy>),
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Full => "full",
            Mechanism::CoarsePositionObserving(_) => "coarse-position",
            Mechanism::FineTree(_) => "fine",
        }
    }
}

impl fmt::Debug for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an agent knows when asked to respond.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observation {
    Full,
    /// Number of voters elicited before this one.
    Position(usize),
    /// Queries addressed to this agent so far, the current one last.
    Queries(Vec<FineQuery>),
}

/// Pure strategy of one agent: a ballot per type, optionally overridden
/// at particular observations. Under fine mechanisms the agent answers
/// each query as the chosen ballot would.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StrategyFunction {
    defaults: Vec<Option<Ballot>>,
    overrides: BTreeMap<(usize, Observation), Ballot>,
}

impl StrategyFunction {
    /// A strategy with nothing assigned for `types` types.
    pub fn new(types: usize) -> Self {
        StrategyFunction {
            defaults: vec![None; types],
            overrides: BTreeMap::new(),
        }
    }

    /// Observation-independent strategy: type `i` always casts `ballots[i]`.
    pub fn constant(ballots: Vec<Ballot>) -> Self {
        StrategyFunction {
            defaults: ballots.into_iter().map(Some).collect(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn set_default(&mut self, ty: usize, ballot: Ballot) {
        if self.defaults.len() <= ty {
            self.defaults.resize(ty + 1, None);
        }
        self.defaults[ty] = Some(ballot);
    }

    pub fn set(&mut self, ty: usize, obs: Observation, ballot: Ballot) {
        self.overrides.insert((ty, obs), ballot);
    }

    /// The ballot for `(ty, obs)`, if the strategy defines one.
    pub fn get(&self, ty: usize, obs: &Observation) -> Option<&Ballot> {
        self.overrides
            .get(&(ty, obs.clone()))
            .or_else(|| self.defaults.get(ty).and_then(Option::as_ref))
    }

    fn lookup(&self, agent: usize, ty: usize, obs: &Observation) -> Result<Ballot> {
        self.get(ty, obs).cloned().ok_or_else(|| Error::MissingStrategy {
            agent,
            ty,
            observation: format!("{obs:?}"),
        })
    }
}

/// A finite Bayesian voting game.
#[derive(Debug)]
pub struct VotingGame {
    pub agents: Vec<String>,
    pub candidates: Vec<String>,
    pub types: Vec<Vec<AgentType>>,
    /// Explicit joint prior: type profile and its probability.
    pub prior: Vec<(Vec<usize>, BigRational)>,
    pub protocol: Protocol,
    pub mechanism: Mechanism,
    /// Work budget passed to decidedness checks while playing.
    pub budget: u128,
}

impl VotingGame {
    pub fn new(
        agents: Vec<String>,
        candidates: Vec<String>,
        types: Vec<Vec<AgentType>>,
        prior: Vec<(Vec<usize>, BigRational)>,
        protocol: Protocol,
        mechanism: Mechanism,
    ) -> Result<Self> {
        let n = agents.len();
        let m = candidates.len();
        if types.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} type spaces for {n} agents",
                types.len()
            )));
        }
        for (a, ts) in types.iter().enumerate() {
            if ts.is_empty() {
                return Err(Error::InvalidInstance(format!("agent {} has no types", agents[a])));
            }
            if let Some(t) = ts.iter().find(|t| t.utilities.len() != m) {
                return Err(Error::InvalidInstance(format!(
                    "type {} of agent {} has {} utilities for {m} candidates",
                    t.name,
                    agents[a],
                    t.utilities.len()
                )));
            }
        }
        let mut total = BigRational::zero();
        for (profile, p) in &prior {
            if profile.len() != n || profile.iter().zip(&types).any(|(&t, ts)| t >= ts.len()) {
                return Err(Error::InvalidInstance(format!("bad type profile {profile:?} in prior")));
            }
            if *p < BigRational::zero() {
                return Err(Error::InvalidInstance("negative prior probability".into()));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!("prior sums to {total}, not 1")));
        }
        Ok(VotingGame {
            agents,
            candidates,
            types,
            prior,
            protocol,
            mechanism,
            budget: DEFAULT_STV_BUDGET,
        })
    }

    /// Product of per-agent marginals, as an explicit table in
    /// lexicographic type-profile order.
    pub fn independent_prior(marginals: &[Vec<BigRational>]) -> Vec<(Vec<usize>, BigRational)> {
        let mut table = vec![(Vec::new(), BigRational::one())];
        for marginal in marginals {
            table = table
                .into_iter()
                .flat_map(|(profile, p)| {
                    marginal.iter().enumerate().map(move |(t, q)| {
                        let mut next = profile.clone();
                        next.push(t);
                        (next, &p * q)
                    })
                })
                .collect();
        }
        table
    }

    pub fn with_mechanism(mut self, mechanism: Mechanism) -> Self {
        self.mechanism = mechanism;
        self
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    /// Runs the mechanism once; `choose` supplies each agent's ballot at
    /// each observation it makes. Returns the winner set, of which the
    /// winner is drawn uniformly.
    pub fn play(
        &self,
        mut choose: impl FnMut(usize, &Observation) -> Result<Ballot>,
    ) -> Result<Vec<Candidate>> {
        let (m, n) = (self.m(), self.n());
        match &self.mechanism {
            Mechanism::Full => {
                let ballots = (0..n)
                    .map(|a| choose(a, &Observation::Full))
                    .collect::<Result<Vec<_>>>()?;
                Ok(winner(self.protocol, &ballots, m)?.winner_set)
            }
            Mechanism::CoarsePositionObserving(policy) => {
                let (_, d) = run_coarse(
                    policy.as_ref(),
                    self.protocol,
                    m,
                    n,
                    TieRule::Random,
                    self.budget,
                    |voter, position| choose(voter, &Observation::Position(position)),
                )?;
                Ok(d.winners())
            }
            Mechanism::FineTree(policy) => {
                let mut shadow = FineKnowledge::new(self.protocol, m, n);
                let (_, d) = run_fine(
                    policy.as_ref(),
                    shadow.clone(),
                    TieRule::Random,
                    self.budget,
                    |q, earlier| {
                        let mut seen = earlier.to_vec();
                        seen.push(*q);
                        let ballot = choose(q.voter(), &Observation::Queries(seen))?;
                        let r = shadow.answer(&ballot, q)?;
                        shadow.apply(q, r)?;
                        Ok(r)
                    },
                )?;
                Ok(d.winners())
            }
        }
    }

    /// Winner set when every agent follows its strategy at the given types.
    pub fn play_profile(&self, types: &[usize], strategies: &[StrategyFunction]) -> Result<Vec<Candidate>> {
        self.check_strategies(strategies)?;
        self.play(|a, obs| strategies[a].lookup(a, types[a], obs))
    }

    fn check_strategies(&self, strategies: &[StrategyFunction]) -> Result<()> {
        if strategies.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "{} strategies for {} agents",
                strategies.len(),
                self.n()
            )));
        }
        Ok(())
    }

    fn mean_utility(&self, agent: usize, ty: usize, winners: &[Candidate]) -> BigRational {
        let u = &self.types[agent][ty].utilities;
        let sum: BigRational = winners.iter().map(|&c| u[c].clone()).sum();
        sum / BigRational::from_integer(BigInt::from(winners.len()))
    }

    /// Expected utility of `agent` at `ty`, conditioned on the types in
    /// `fixed`, with `agent` answering through `own` and everyone else
    /// following `strategies`.
    fn conditional_value(
        &self,
        strategies: &[StrategyFunction],
        agent: usize,
        ty: usize,
        fixed: &[(usize, usize)],
        own: &mut dyn FnMut(&Observation) -> Result<Ballot>,
    ) -> Result<BigRational> {
        if agent >= self.n() || ty >= self.types[agent].len() {
            return Err(Error::InvalidArgument(format!("no type {ty} for agent {agent}")));
        }
        let mut weight = BigRational::zero();
        let mut acc = BigRational::zero();
        for (profile, p) in &self.prior {
            if profile[agent] != ty || fixed.iter().any(|&(a, t)| profile.get(a) != Some(&t)) {
                continue;
            }
            if p.is_zero() {
                continue;
            }
            let winners = self.play(|a, obs| {
                if a == agent {
                    own(obs)
                } else {
                    strategies[a].lookup(a, profile[a], obs)
                }
            })?;
            acc += p * self.mean_utility(agent, ty, &winners);
            weight += p;
        }
        if weight.is_zero() {
            return Err(Error::InvalidArgument(
                "conditioning event has probability zero".into(),
            ));
        }
        Ok(acc / weight)
    }
}

/// Uniform distribution over the winner set, as `(candidate, probability)`.
pub fn outcome_distribution(
    protocol: Protocol,
    ballots: &[Ballot],
    m: usize,
) -> Result<Vec<(Candidate, BigRational)>> {
    let set = winner(protocol, ballots, m)?.winner_set;
    let p = ratio(1, set.len() as i64);
    Ok(set.into_iter().map(|c| (c, p.clone())).collect())
}

/// `E[u_agent(ty, outcome) | type of agent = ty]`.
pub fn expected_utility(
    game: &VotingGame,
    strategies: &[StrategyFunction],
    agent: usize,
    ty: usize,
) -> Result<BigRational> {
    expected_utility_given(game, strategies, agent, ty, &[])
}

/// As [`expected_utility`], additionally conditioning on the listed
/// `(agent, type)` pairs.
pub fn expected_utility_given(
    game: &VotingGame,
    strategies: &[StrategyFunction],
    agent: usize,
    ty: usize,
    fixed: &[(usize, usize)],
) -> Result<BigRational> {
    game.check_strategies(strategies)?;
    let own = &strategies[agent];
    game.conditional_value(strategies, agent, ty, fixed, &mut |obs| own.lookup(agent, ty, obs))
}

/// Approve exactly the candidates worth at least 1/2, at every observation.
pub fn truthful_strategy(game: &VotingGame, agent: usize) -> Result<StrategyFunction> {
    if game.protocol != Protocol::Approval {
        return Err(Error::UnsupportedProtocol(format!(
            "{} (truthful voting is defined for approval ballots)",
            game.protocol
        )));
    }
    let half = ratio(1, 2);
    let m = game.m();
    let ballots = game.types[agent]
        .iter()
        .map(|t| {
            let approved = (0..m).filter(|&c| t.utilities[c] >= half);
            ApprovalBallot::new(approved, m).map(Ballot::Approval)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyFunction::constant(ballots))
}

/// Truthful strategies for every agent.
pub fn truthful_profile(game: &VotingGame) -> Result<Vec<StrategyFunction>> {
    (0..game.n()).map(|a| truthful_strategy(game, a)).collect()
}

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: usize,
    pub ty: usize,
    /// First observation at which the deviation departs from the strategy.
    pub observation: Observation,
    /// Ballot cast (or answered from) at that observation.
    pub ballot: Ballot,
    /// Every departure, in the order the observations were first reached.
    pub changes: Vec<(Observation, Ballot)>,
    pub baseline: BigRational,
    pub deviated: BigRational,
    pub gain: BigRational,
}

impl Deviation {
    /// The deviation as a strategy for its agent, built on `base`.
    pub fn as_strategy(&self, base: &StrategyFunction) -> StrategyFunction {
        let mut s = base.clone();
        for (obs, b) in &self.changes {
            s.set(self.ty, obs.clone(), b.clone());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BneReport {
    pub is_bne: bool,
    pub counterexample: Option<Deviation>,
    /// Deviation strategies evaluated.
    pub deviations_checked: u128,
}

/// Checks the equilibrium condition for every agent and type against all
/// observation-contingent deviations, with the default budget.
pub fn is_bne(game: &VotingGame, strategies: &[StrategyFunction]) -> Result<BneReport> {
    is_bne_with_budget(game, strategies, DEFAULT_DEVIATION_BUDGET)
}

/// Agents and types are scanned in index order; the first one with a
/// profitable deviation is reported. Among its deviations the largest
/// gain wins, then the fewest changed observations, then the smallest
/// ballot distance, then enumeration order.
pub fn is_bne_with_budget(
    game: &VotingGame,
    strategies: &[StrategyFunction],
    budget: u128,
) -> Result<BneReport> {
    game.check_strategies(strategies)?;
    let mut checked = 0u128;
    for agent in 0..game.n() {
        for ty in 0..game.types[agent].len() {
            let baseline = expected_utility(game, strategies, agent, ty)?;
            let mut search = DeviationSearch {
                game,
                strategies,
                agent,
                ty,
                budget,
                evaluated: 0,
                best: None,
            };
            search.explore(&mut Vec::new())?;
            checked += search.evaluated;
            if let Some((value, changes, _)) = search.best {
                if value > baseline {
                    let (observation, ballot) = changes[0].clone();
                    return Ok(BneReport {
                        is_bne: false,
                        counterexample: Some(Deviation {
                            agent,
                            ty,
                            observation,
                            ballot,
                            changes,
                            gain: &value - &baseline,
                            baseline,
                            deviated: value,
                        }),
                        deviations_checked: checked,
                    });
                }
            }
        }
    }
    Ok(BneReport {
        is_bne: true,
        counterexample: None,
        deviations_checked: checked,
    })
}

type Assignment = Vec<(Observation, Ballot)>;

struct DeviationSearch<'a> {
    game: &'a VotingGame,
    strategies: &'a [StrategyFunction],
    agent: usize,
    ty: usize,
    budget: u128,
    evaluated: u128,
    /// Value, changed observations, and (changed count, distance).
    best: Option<(BigRational, Assignment, (usize, usize))>,
}

enum Evaluation {
    Value(BigRational),
    Needs(Observation),
}

impl DeviationSearch<'_> {
    /// Depth-first over assignments; an observation is branched on only
    /// once some run actually reaches it.
    fn explore(&mut self, assign: &mut Assignment) -> Result<()> {
        self.evaluated += 1;
        crate::error::check_budget(self.evaluated, self.budget)?;
        match self.evaluate(assign)? {
            Evaluation::Needs(obs) => {
                for b in self.options(&obs)? {
                    assign.push((obs.clone(), b));
                    self.explore(assign)?;
                    assign.pop();
                }
            }
            Evaluation::Value(v) => self.consider(v, assign),
        }
        Ok(())
    }

    fn evaluate(&self, assign: &Assignment) -> Result<Evaluation> {
        let mut missing: Option<Observation> = None;
        let res = self.game.conditional_value(self.strategies, self.agent, self.ty, &[], &mut |obs| {
            match assign.iter().find(|(o, _)| o == obs) {
                Some((_, b)) => Ok(b.clone()),
                None => {
                    missing = Some(obs.clone());
                    Err(Error::InvalidArgument("unassigned observation".into()))
                }
            }
        });
        match (res, missing) {
            (_, Some(obs)) => Ok(Evaluation::Needs(obs)),
            (Ok(v), None) => Ok(Evaluation::Value(v)),
            (Err(e), None) => Err(e),
        }
    }

    /// Candidate behaviours at `obs`, the strategy's own choice first.
    fn options(&self, obs: &Observation) -> Result<Vec<Ballot>> {
        let own = self.strategies[self.agent].get(self.ty, obs).cloned();
        match obs {
            Observation::Queries(qs) => {
                let q = qs.last().expect("fine observations hold the current query");
                match q {
                    FineQuery::ApproveCandidate { candidate, .. } => {
                        let base = match own {
                            Some(Ballot::Approval(a)) => a,
                            _ => ApprovalBallot::empty(),
                        };
                        let keep = base.approves(*candidate);
                        Ok(vec![
                            Ballot::Approval(base.clone()),
                            Ballot::Approval(base.with(*candidate, !keep)),
                        ])
                    }
                    FineQuery::NextPreferred { .. } => Err(Error::UnsupportedProtocol(format!(
                        "{} (fine deviations are enumerated for approval queries only)",
                        self.game.protocol
                    ))),
                }
            }
            _ => {
                let mut all = all_ballots(self.game.protocol, self.game.m());
                if let Some(pos) = own.as_ref().and_then(|o| all.iter().position(|b| b == o)) {
                    let first = all.remove(pos);
                    all.insert(0, first);
                }
                Ok(all)
            }
        }
    }

    /// Observations where `assign` departs from the strategy, with the
    /// total ballot distance of the departures.
    fn departures(&self, assign: &Assignment) -> (Assignment, usize) {
        let strategy = &self.strategies[self.agent];
        let mut changed = Vec::new();
        let mut distance = 0;
        for (obs, b) in assign {
            let d = match (strategy.get(self.ty, obs), obs) {
                (None, _) => 1,
                (Some(own), Observation::Queries(qs)) => {
                    let c = match qs.last() {
                        Some(FineQuery::ApproveCandidate { candidate, .. }) => *candidate,
                        _ => unreachable!("only approval queries are enumerated"),
                    };
                    usize::from(own.supports(c) != b.supports(c))
                }
                (Some(own), _) => ballot_distance(own, b),
            };
            if d > 0 {
                changed.push((obs.clone(), b.clone()));
                distance += d;
            }
        }
        (changed, distance)
    }

    fn consider(&mut self, value: BigRational, assign: &Assignment) {
        let (changed, distance) = self.departures(assign);
        if changed.is_empty() {
            return;
        }
        let key = (changed.len(), distance);
        let better = match &self.best {
            None => true,
            Some((v, _, k)) => value > *v || (value == *v && key < *k),
        };
        if better {
            self.best = Some((value, changed, key));
        }
    }
}

/// Symmetric difference for approval ballots, differing positions for rankings.
fn ballot_distance(a: &Ballot, b: &Ballot) -> usize {
    match (a, b) {
        (Ballot::Approval(x), Ballot::Approval(y)) => {
            let xs = x.approved();
            let ys = y.approved();
            xs.iter().filter(|c| !ys.contains(c)).count() + ys.iter().filter(|c| !xs.contains(c)).count()
        }
        (Ballot::Ranking(x), Ballot::Ranking(y)) => {
            x.order().iter().zip(y.order()).filter(|(p, q)| p != q).count()
        }
        _ => usize::MAX / 4,
    }
}
