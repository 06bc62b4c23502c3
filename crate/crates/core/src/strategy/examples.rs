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

//! Two small approval games in which elicitation order leaks information.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{
    expected_utility_given, ratio, truthful_profile, AgentType, Mechanism, StrategyFunction,
    VotingGame,
};
use crate::ballot::{Ballot, Protocol};
use crate::elicit::{BranchingCoarsePolicy, BranchingFinePolicy, FineQuery, FineResponse};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExampleGame {
    /// Three voters, whole-ballot elicitation.
    Theorem7,
    /// Two voters, single-candidate approval queries.
    Theorem9,
}

impl ExampleGame {
    pub fn name(self) -> &'static str {
        match self {
            ExampleGame::Theorem7 => "theorem7",
            ExampleGame::Theorem9 => "theorem9",
        }
    }
}

impl fmt::Display for ExampleGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleGame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem7" => Ok(ExampleGame::Theorem7),
            "theorem9" => Ok(ExampleGame::Theorem9),
            _ => Err(Error::InvalidArgument(format!(
                "unknown game `{s}` (expected theorem7 or theorem9)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MechanismKind {
    Full,
    CoarsePosition,
    Fine,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Full => "full",
            MechanismKind::CoarsePosition => "coarse-position",
            MechanismKind::Fine => "fine",
        }
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(MechanismKind::Full),
            "coarse-position" => Ok(MechanismKind::CoarsePosition),
            "fine" => Ok(MechanismKind::Fine),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mechanism `{s}` (expected full, coarse-position or fine)"
            ))),
        }
    }
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn utilities(xs: [(i64, i64); 3]) -> Vec<BigRational> {
    xs.iter().map(|&(n, d)| ratio(n, d)).collect()
}

fn approve(set: &[usize]) -> Ballot {
    Ballot::approval(set.iter().copied(), 3).expect("candidates a, b, c")
}

fn half_half() -> Vec<BigRational> {
    vec![ratio(1, 2), ratio(1, 2)]
}

/// Voters i, j, k over a, b, c. Elicitation asks i; j next if i approved
/// exactly {c}, otherwise k; then whoever is left.
pub fn theorem7_game() -> VotingGame {
    let (zero, one) = ((0, 1), (1, 1));
    let types = vec![
        vec![
            AgentType::new("1", utilities([zero, zero, one])),
            AgentType::new("2", utilities([one, zero, zero])),
        ],
        vec![
            AgentType::new("1", utilities([zero, zero, one])),
            AgentType::new("2", utilities([zero, one, one])),
        ],
        vec![AgentType::new("1", utilities([one, (1, 4), zero]))],
    ];
    let prior = VotingGame::independent_prior(&[half_half(), half_half(), vec![ratio(1, 1)]]);
    let policy = BranchingCoarsePolicy {
        first: 0,
        trigger: approve(&[2]),
        if_match: 1,
        otherwise: 2,
    };
    VotingGame::new(
        names(&["i", "j", "k"]),
        names(&["a", "b", "c"]),
        types,
        prior,
        Protocol::Approval,
        Mechanism::CoarsePositionObserving(Box::new(policy)),
    )
    .expect("well-formed game")
}

/// Voters i, j over a, b, c, asked one approval question at a time.
pub fn theorem9_game() -> VotingGame {
    let (zero, one) = ((0, 1), (1, 1));
    let types = vec![
        vec![
            AgentType::new("1", utilities([zero, one, one])),
            AgentType::new("2", utilities([one, one, zero])),
        ],
        vec![AgentType::new("1", utilities([one, (3, 4), zero]))],
    ];
    let prior = VotingGame::independent_prior(&[half_half(), vec![ratio(1, 1)]]);
    let q = |voter, candidate| FineQuery::ApproveCandidate { voter, candidate };
    let policy = BranchingFinePolicy {
        first: q(0, 0),
        trigger: FineResponse::Approves(false),
        if_match: vec![q(0, 1), q(1, 1), q(1, 2)],
        otherwise: vec![q(1, 0), q(0, 1), q(1, 1), q(0, 2)],
    };
    VotingGame::new(
        names(&["i", "j"]),
        names(&["a", "b", "c"]),
        types,
        prior,
        Protocol::Approval,
        Mechanism::FineTree(Box::new(policy)),
    )
    .expect("well-formed game")
}

/// The example game under the requested mechanism. Only the elicitation
/// each game was built around (or full reporting) is available.
pub fn example_game(game: ExampleGame, mechanism: MechanismKind) -> Result<VotingGame> {
    match (game, mechanism) {
        (ExampleGame::Theorem7, MechanismKind::CoarsePosition) => Ok(theorem7_game()),
        (ExampleGame::Theorem9, MechanismKind::Fine) => Ok(theorem9_game()),
        (ExampleGame::Theorem7, MechanismKind::Full) => Ok(theorem7_game().with_mechanism(Mechanism::Full)),
        (ExampleGame::Theorem9, MechanismKind::Full) => Ok(theorem9_game().with_mechanism(Mechanism::Full)),
        (g, k) => Err(Error::InvalidArgument(format!(
            "game {g} has no {} mechanism",
            k.name()
        ))),
    }
}

/// One conditional expected utility of the pivotal voter under full reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffRow {
    pub agent: String,
    /// Ballot the pivotal voter casts, e.g. `{a, b}`.
    pub ballot: String,
    /// Conditioning event, e.g. `i type 1, j type 2`; empty when unconditional.
    pub given: String,
    pub value: BigRational,
}

/// Expected utilities of the pivotal voter (k, resp. j) for approving or
/// not approving b, under full reporting, at the conditioning events the
/// pivot analysis goes through.
pub fn example_payoff_table(game: ExampleGame) -> Result<Vec<PayoffRow>> {
    let g = example_game(game, MechanismKind::Full)?;
    let (pivot, with_b, without_b, events): (usize, Ballot, Ballot, Vec<Vec<(usize, usize)>>) = match game {
        ExampleGame::Theorem7 => (
            2,
            approve(&[0, 1]),
            approve(&[0]),
            vec![vec![(0, 0), (1, 1)], vec![(0, 1), (1, 1)], vec![(1, 1)]],
        ),
        ExampleGame::Theorem9 => (
            1,
            approve(&[0, 1]),
            approve(&[0]),
            vec![vec![(0, 0)], vec![(0, 1)], vec![]],
        ),
    };
    let truthful = truthful_profile(&g)?;
    let describe = |b: &Ballot| {
        let set: Vec<&str> = b
            .as_approval()
            .map(|a| a.approved().iter().map(|&c| g.candidates[c].as_str()).collect())
            .unwrap_or_default();
        format!("{{{}}}", set.join(","))
    };
    let mut rows = Vec::new();
    for event in &events {
        for ballot in [&with_b, &without_b] {
            let mut profile = truthful.clone();
            profile[pivot] = StrategyFunction::constant(vec![ballot.clone()]);
            let value = expected_utility_given(&g, &profile, pivot, 0, event)?;
            let given = event
                .iter()
                .map(|&(a, t)| format!("{} type {}", g.agents[a], g.types[a][t].name))
                .collect::<Vec<_>>()
                .join(", ");
            rows.push(PayoffRow {
                agent: g.agents[pivot].clone(),
                ballot: describe(ballot),
                given,
                value,
            });
        }
    }
    Ok(rows)
}
