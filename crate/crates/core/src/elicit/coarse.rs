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

//! Coarse elicitation: each query obtains one voter's whole ballot.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ballot::{Ballot, Candidate, Protocol};
use crate::elicit::{Determination, FineQuery, TieRule};
use crate::error::{Error, Result};
use crate::profile::PartialProfile;
use crate::scoring::{winner, ElectionOutcome};
use crate::termination::{decided_winner_set, decided_with_budget, DEFAULT_STV_BUDGET};

/// A question put to a voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Query {
    /// Ask for the whole ballot.
    Ballot { voter: usize },
    Fine(FineQuery),
}

impl Query {
    pub fn voter(&self) -> usize {
        match self {
            Query::Ballot { voter } => *voter,
            Query::Fine(q) => q.voter(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Response {
    Ballot(Ballot),
    Approves(bool),
    Next(Candidate),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub voter: usize,
    pub query: Query,
    pub response: Response,
}

/// Record of one simulated elicitation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElicitationTranscript {
    pub steps: Vec<TranscriptStep>,
    pub queries_used: usize,
    /// Winner of the full true profile.
    pub outcome: ElectionOutcome,
    pub terminated_early: bool,
}

/// Chooses the next voter to query from the ballots elicited so far.
pub trait CoarsePolicy {
    /// `asked` holds `(voter, ballot)` in query order. `None` ends elicitation.
    fn next_voter(&self, asked: &[(usize, Ballot)], n: usize) -> Option<usize>;
}

/// Queries voters in a precomputed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderPolicy {
    pub order: Vec<usize>,
}

impl CoarsePolicy for OrderPolicy {
    fn next_voter(&self, asked: &[(usize, Ballot)], _n: usize) -> Option<usize> {
        self.order
            .iter()
            .copied()
            .find(|v| asked.iter().all(|(u, _)| u != v))
    }
}

/// Non-adaptive policies built from the predicted profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StandardPolicy {
    /// Supporters of the predicted tie-break winner `w`, then round-robin
    /// over the other candidates' supporters, cycling from `w + 1` upward
    /// and wrapping around to the candidates below `w`.
    PredictedWinnerFirst,
    /// Round-robin over all candidates' supporters, starting at candidate 0.
    RoundRobin,
    /// Voters in index order.
    FixedOrder,
    /// A seeded uniform shuffle of the voters.
    Random(u64),
}

impl StandardPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            StandardPolicy::PredictedWinnerFirst => "predicted-winner-first",
            StandardPolicy::RoundRobin => "round-robin",
            StandardPolicy::FixedOrder => "fixed-order",
            StandardPolicy::Random(_) => "random",
        }
    }

    /// Parses a CLI policy name; `seed` is used by `random`.
    pub fn parse(name: &str, seed: u64) -> Result<Self> {
        match name {
            "predicted-winner-first" => Ok(StandardPolicy::PredictedWinnerFirst),
            "round-robin" => Ok(StandardPolicy::RoundRobin),
            "fixed-order" => Ok(StandardPolicy::FixedOrder),
            "random" => Ok(StandardPolicy::Random(seed)),
            other => Err(Error::InvalidArgument(format!("unknown policy `{other}`"))),
        }
    }
}

impl fmt::Display for StandardPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Voters grouped by their favorite candidate. A voter supporting
/// `priority` is put in that candidate's group even on approval ballots
/// that also approve lower indices. Voters without a favorite are returned
/// separately.
fn support_groups(
    predicted: &[Ballot],
    m: usize,
    priority: Option<Candidate>,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut groups = vec![Vec::new(); m];
    let mut rest = Vec::new();
    for (v, b) in predicted.iter().enumerate() {
        match priority.filter(|&w| b.supports(w)).or_else(|| b.favorite()) {
            Some(c) => groups[c].push(v),
            None => rest.push(v),
        }
    }
    (groups, rest)
}

/// One voter per candidate per round, candidates taken in `cycle` order.
fn round_robin(groups: &[Vec<usize>], cycle: impl Iterator<Item = Candidate> + Clone) -> Vec<usize> {
    let mut out = Vec::new();
    let depth = groups.iter().map(Vec::len).max().unwrap_or(0);
    for layer in 0..depth {
        for c in cycle.clone() {
            if let Some(&v) = groups[c].get(layer) {
                out.push(v);
            }
        }
    }
    out
}

/// The voter order a standard policy follows on a predicted profile.
pub fn order_for(
    policy: StandardPolicy,
    protocol: Protocol,
    m: usize,
    predicted: &[Ballot],
) -> Result<Vec<usize>> {
    let n = predicted.len();
    Ok(match policy {
        StandardPolicy::FixedOrder => (0..n).collect(),
        StandardPolicy::Random(seed) => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            order
        }
        StandardPolicy::RoundRobin => {
            let (groups, rest) = support_groups(predicted, m, None);
            let mut order = round_robin(&groups, 0..m);
            order.extend(rest);
            order
        }
        StandardPolicy::PredictedWinnerFirst => {
            let w = winner(protocol, predicted, m)?.tiebreak_winner;
            let (groups, rest) = support_groups(predicted, m, Some(w));
            let mut order = groups[w].clone();
            // Start the cycle just after `w`: those candidates lose ties to it.
            order.extend(round_robin(&groups, (w + 1..m).chain(0..w)));
            order.extend(rest);
            order
        }
    })
}

/// What the known ballots fix, if anything, under `tie_rule`.
pub(crate) fn determination(
    partial: &PartialProfile,
    tie_rule: TieRule,
    budget: u128,
) -> Result<Option<Determination>> {
    Ok(match tie_rule {
        TieRule::Lexicographic => decided_with_budget(partial, budget)?.map(Determination::Winner),
        TieRule::Random => decided_winner_set(partial, budget)?.map(Determination::WinnerSet),
    })
}

/// Drives a coarse policy, obtaining each queried ballot from `respond`
/// (called with the voter and the number of voters queried before it).
/// Returns the elicited `(voter, ballot)` pairs and what they determine.
pub(crate) fn run_coarse(
    policy: &dyn CoarsePolicy,
    protocol: Protocol,
    m: usize,
    n: usize,
    tie_rule: TieRule,
    budget: u128,
    mut respond: impl FnMut(usize, usize) -> Result<Ballot>,
) -> Result<(Vec<(usize, Ballot)>, Determination)> {
    let mut partial = PartialProfile::new(protocol, m, Vec::new(), n)?;
    let mut asked: Vec<(usize, Ballot)> = Vec::new();
    loop {
        if let Some(d) = determination(&partial, tie_rule, budget)? {
            return Ok((asked, d));
        }
        let voter = policy.next_voter(&asked, n).ok_or_else(|| {
            Error::InvalidArgument("policy stopped before the outcome was determined".into())
        })?;
        if voter >= n || asked.iter().any(|(u, _)| *u == voter) {
            return Err(Error::InvalidArgument(format!(
                "policy asked voter {voter} twice or out of range"
            )));
        }
        let ballot = respond(voter, asked.len())?;
        ballot.validate(protocol, m)?;
        partial.known.push(ballot.clone());
        partial.unknown_count -= 1;
        asked.push((voter, ballot));
    }
}

/// Queries whole ballots in policy order until the outcome is determined.
/// Responses come from `true_profile`.
pub fn simulate_coarse(
    policy: &dyn CoarsePolicy,
    protocol: Protocol,
    m: usize,
    true_profile: &[Ballot],
    tie_rule: TieRule,
    budget: u128,
) -> Result<ElicitationTranscript> {
    let n = true_profile.len();
    let outcome = winner(protocol, true_profile, m)?;
    let (asked, _) = run_coarse(policy, protocol, m, n, tie_rule, budget, |v, _| {
        Ok(true_profile[v].clone())
    })?;
    let steps: Vec<TranscriptStep> = asked
        .into_iter()
        .map(|(voter, ballot)| TranscriptStep {
            voter,
            query: Query::Ballot { voter },
            response: Response::Ballot(ballot),
        })
        .collect();
    Ok(ElicitationTranscript {
        queries_used: steps.len(),
        terminated_early: steps.len() < n,
        steps,
        outcome,
    })
}

/// Runs a standard policy whose order is computed from `predicted`.
pub fn simulate_coarse_standard(
    policy: StandardPolicy,
    protocol: Protocol,
    m: usize,
    true_profile: &[Ballot],
    predicted: &[Ballot],
) -> Result<ElicitationTranscript> {
    if predicted.len() != true_profile.len() {
        return Err(Error::InvalidArgument(
            "predicted and true profiles differ in size".into(),
        ));
    }
    let order = order_for(policy, protocol, m, predicted)?;
    simulate_coarse(
        &OrderPolicy { order },
        protocol,
        m,
        true_profile,
        TieRule::Lexicographic,
        DEFAULT_STV_BUDGET,
    )
}
