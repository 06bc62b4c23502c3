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

//! Fine elicitation: approve-candidate and next-preferred queries.
//!
//! What has been learned about each voter is tracked per cell (Approval) or
//! as a revealed ranking prefix. Stopping uses per-candidate score
//! intervals. The intervals are exact for Plurality, Borda and Approval and
//! conservative for Copeland and Maximin; STV falls back to enumerating the
//! consistent completions.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::ballot::{all_ballots, ApprovalBallot, Ballot, Candidate, Protocol, RankingBallot};
use crate::elicit::coarse::{ElicitationTranscript, Query, Response, TranscriptStep};
use crate::elicit::{Determination, TieRule};
use crate::error::{check_budget, Error, Result};
use crate::scoring::{beats, winner};

/// A partial-information question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FineQuery {
    /// Does `voter` approve `candidate`? Approval only.
    ApproveCandidate { voter: usize, candidate: Candidate },
    /// Which candidate does `voter` rank next, after those already reported?
    NextPreferred { voter: usize },
}

impl FineQuery {
    pub fn voter(&self) -> usize {
        match *self {
            FineQuery::ApproveCandidate { voter, .. } | FineQuery::NextPreferred { voter } => voter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FineResponse {
    Approves(bool),
    Next(Candidate),
}

impl From<FineResponse> for Response {
    fn from(r: FineResponse) -> Self {
        match r {
            FineResponse::Approves(b) => Response::Approves(b),
            FineResponse::Next(c) => Response::Next(c),
        }
    }
}

/// Chooses the next fine query from the knowledge gathered so far.
pub trait FinePolicy {
    /// `None` ends elicitation.
    fn next_query(
        &self,
        knowledge: &FineKnowledge,
        history: &[(FineQuery, FineResponse)],
    ) -> Option<FineQuery>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Cells {
    /// `cells[voter][candidate]`: unknown, approved, not approved.
    Approval(Vec<Vec<Option<bool>>>),
    /// Revealed ranking prefix per voter.
    Ranking(Vec<Vec<Candidate>>),
}

/// Everything learned about every voter so far.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FineKnowledge {
    protocol: Protocol,
    m: usize,
    n: usize,
    cells: Cells,
}

impl FineKnowledge {
    pub fn new(protocol: Protocol, m: usize, n: usize) -> Self {
        let cells = if protocol.uses_approval() {
            Cells::Approval(vec![vec![None; m]; n])
        } else {
            Cells::Ranking(vec![Vec::new(); n])
        };
        FineKnowledge {
            protocol,
            m,
            n,
            cells,
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Approval cell, if learned.
    pub fn cell(&self, voter: usize, candidate: Candidate) -> Option<bool> {
        match &self.cells {
            Cells::Approval(c) => c[voter][candidate],
            Cells::Ranking(_) => None,
        }
    }

    /// Revealed ranking prefix of a voter (empty for Approval).
    pub fn prefix(&self, voter: usize) -> &[Candidate] {
        match &self.cells {
            Cells::Ranking(p) => &p[voter],
            Cells::Approval(_) => &[],
        }
    }

    /// Whether everything about `voter` is known.
    pub fn voter_complete(&self, voter: usize) -> bool {
        match &self.cells {
            Cells::Approval(c) => c[voter].iter().all(Option::is_some),
            Cells::Ranking(p) => p[voter].len() + 1 >= self.m,
        }
    }

    /// Whether `q` would reveal something new. Errors on ill-formed queries.
    pub fn check_query(&self, q: &FineQuery) -> Result<bool> {
        let voter = q.voter();
        if voter >= self.n {
            return Err(Error::InvalidArgument(format!("voter {voter} out of range")));
        }
        match (q, &self.cells) {
            (FineQuery::ApproveCandidate { candidate, .. }, Cells::Approval(c)) => {
                if *candidate >= self.m {
                    return Err(Error::InvalidArgument(format!(
                        "candidate {candidate} out of range"
                    )));
                }
                Ok(c[voter][*candidate].is_none())
            }
            (FineQuery::NextPreferred { .. }, Cells::Ranking(_)) => Ok(!self.voter_complete(voter)),
            _ => Err(Error::ProtocolMismatch(format!(
                "{} (query kind {q:?})",
                self.protocol
            ))),
        }
    }

    /// The answer a voter casting `ballot` gives to `q`.
    pub fn answer(&self, ballot: &Ballot, q: &FineQuery) -> Result<FineResponse> {
        match (q, ballot) {
            (FineQuery::ApproveCandidate { candidate, .. }, Ballot::Approval(a)) => {
                Ok(FineResponse::Approves(a.approves(*candidate)))
            }
            (FineQuery::NextPreferred { voter }, Ballot::Ranking(r)) => r
                .order()
                .get(self.prefix(*voter).len())
                .copied()
                .map(FineResponse::Next)
                .ok_or_else(|| Error::InvalidArgument("ranking already fully reported".into())),
            _ => Err(Error::ProtocolMismatch(format!("{} (ballot kind)", self.protocol))),
        }
    }

    /// Records an answer.
    pub fn apply(&mut self, q: &FineQuery, r: FineResponse) -> Result<()> {
        if !self.check_query(q)? {
            return Err(Error::InvalidArgument(format!("query {q:?} was already answered")));
        }
        match (q, r, &mut self.cells) {
            (FineQuery::ApproveCandidate { voter, candidate }, FineResponse::Approves(b), Cells::Approval(c)) => {
                c[*voter][*candidate] = Some(b);
                Ok(())
            }
            (FineQuery::NextPreferred { voter }, FineResponse::Next(next), Cells::Ranking(p)) => {
                if next >= self.m || p[*voter].contains(&next) {
                    return Err(Error::InvalidArgument(format!(
                        "voter {voter} cannot report candidate {next} next"
                    )));
                }
                p[*voter].push(next);
                Ok(())
            }
            _ => Err(Error::InvalidArgument("response kind does not match query".into())),
        }
    }

    /// Every ballot of `voter` consistent with what is known.
    pub fn consistent_ballots(&self, voter: usize) -> Vec<Ballot> {
        all_ballots(self.protocol, self.m)
            .into_iter()
            .filter(|b| self.consistent(voter, b))
            .collect()
    }

    pub fn consistent(&self, voter: usize, b: &Ballot) -> bool {
        match (&self.cells, b) {
            (Cells::Approval(c), Ballot::Approval(a)) => c[voter]
                .iter()
                .enumerate()
                .all(|(cand, cell)| cell.is_none_or(|v| a.approves(cand) == v)),
            (Cells::Ranking(p), Ballot::Ranking(r)) => r.order().starts_with(&p[voter]),
            _ => false,
        }
    }

    /// The ballot of a voter whose ballot is fully known.
    fn known_ballot(&self, voter: usize) -> Ballot {
        match &self.cells {
            Cells::Approval(c) => Ballot::Approval(ApprovalBallot::from_mask(
                c[voter]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v == Some(true))
                    .fold(0u64, |acc, (i, _)| acc | 1 << i),
                self.m,
            )),
            Cells::Ranking(p) => {
                let mut order = p[voter].clone();
                order.extend((0..self.m).filter(|c| !p[voter].contains(c)));
                Ballot::Ranking(RankingBallot::from_order_unchecked(order))
            }
        }
    }

    /// Lower and upper bounds on every candidate's final score. `None` for STV.
    pub fn score_bounds(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let m = self.m;
        let n = self.n as i64;
        let mut lo = vec![0i64; m];
        let mut hi = vec![0i64; m];
        match (&self.cells, self.protocol) {
            (_, Protocol::Stv) => return None,
            (Cells::Approval(c), _) => {
                for row in c {
                    for (cand, cell) in row.iter().enumerate() {
                        match cell {
                            Some(true) => {
                                lo[cand] += 1;
                                hi[cand] += 1;
                            }
                            None => hi[cand] += 1,
                            Some(false) => {}
                        }
                    }
                }
            }
            (Cells::Ranking(p), Protocol::Plurality) => {
                for prefix in p {
                    match prefix.first() {
                        Some(&top) => {
                            lo[top] += 1;
                            hi[top] += 1;
                        }
                        None if m == 1 => {
                            lo[0] += 1;
                            hi[0] += 1;
                        }
                        None => hi.iter_mut().for_each(|h| *h += 1),
                    }
                }
            }
            (Cells::Ranking(_), Protocol::Borda) => {
                for v in 0..self.n {
                    let prefix = self.full_or_prefix(v);
                    let free = (m - prefix.len()) as i64;
                    for c in 0..m {
                        match prefix.iter().position(|&x| x == c) {
                            Some(pos) => {
                                lo[c] += (m - 1 - pos) as i64;
                                hi[c] += (m - 1 - pos) as i64;
                            }
                            None => hi[c] += free - 1,
                        }
                    }
                }
            }
            (Cells::Ranking(_), Protocol::Copeland | Protocol::Maximin) => {
                // ahead[x][y]: voters known to rank x above y
                let mut ahead = vec![vec![0i64; m]; m];
                for v in 0..self.n {
                    let prefix = self.full_or_prefix(v);
                    for (i, &x) in prefix.iter().enumerate() {
                        for y in 0..m {
                            if y != x && !prefix[..i].contains(&y) {
                                ahead[x][y] += 1;
                            }
                        }
                    }
                }
                for x in 0..m {
                    let others = (0..m).filter(|&y| y != x);
                    if self.protocol == Protocol::Copeland {
                        lo[x] = others.clone().map(|y| (2 * ahead[x][y] - n).signum()).sum();
                        hi[x] = others.map(|y| (2 * (n - ahead[y][x]) - n).signum()).sum();
                    } else {
                        lo[x] = others.clone().map(|y| ahead[x][y]).min().unwrap_or(n);
                        hi[x] = others.map(|y| n - ahead[y][x]).min().unwrap_or(n);
                    }
                }
            }
            (Cells::Ranking(_), Protocol::Approval) => unreachable!(),
        }
        Some((lo, hi))
    }

    /// Revealed prefix, or the whole ranking once only one candidate is left.
    fn full_or_prefix(&self, voter: usize) -> Vec<Candidate> {
        let prefix = self.prefix(voter);
        if prefix.len() + 1 >= self.m {
            self.known_ballot(voter).as_ranking().unwrap().order().to_vec()
        } else {
            prefix.to_vec()
        }
    }

    /// Whether what is known already fixes the outcome. STV enumerates the
    /// consistent completions when at most `budget` of them exist.
    pub fn determined(&self, tie_rule: TieRule, budget: u128) -> Option<Determination> {
        match self.score_bounds() {
            Some((lo, hi)) => from_bounds(&lo, &hi, tie_rule),
            None => self.determined_exact(tie_rule, budget).ok().flatten(),
        }
    }

    /// Exhaustive check over every consistent completion.
    pub fn determined_exact(&self, tie_rule: TieRule, budget: u128) -> Result<Option<Determination>> {
        let sets: Vec<Vec<Ballot>> = (0..self.n).map(|v| self.consistent_ballots(v)).collect();
        let count = sets
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
            .unwrap_or(u128::MAX);
        check_budget(count, budget)?;
        let mut fixed: Option<Determination> = None;
        let profiles: Box<dyn Iterator<Item = Vec<Ballot>>> = if self.n == 0 {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(sets.into_iter().multi_cartesian_product())
        };
        for profile in profiles {
            let o = winner(self.protocol, &profile, self.m)?;
            let d = match tie_rule {
                TieRule::Lexicographic => Determination::Winner(o.tiebreak_winner),
                TieRule::Random => Determination::WinnerSet(o.winner_set),
            };
            match &fixed {
                None => fixed = Some(d),
                Some(f) if *f != d => return Ok(None),
                Some(_) => {}
            }
        }
        Ok(fixed)
    }

    /// Every informative query, voters ascending, then candidates ascending.
    pub fn open_queries(&self) -> Vec<FineQuery> {
        match &self.cells {
            Cells::Approval(c) => (0..self.n)
                .flat_map(|voter| {
                    (0..self.m)
                        .filter(move |&cand| c[voter][cand].is_none())
                        .map(move |candidate| FineQuery::ApproveCandidate { voter, candidate })
                })
                .collect(),
            Cells::Ranking(_) => (0..self.n)
                .filter(|&v| !self.voter_complete(v))
                .map(|voter| FineQuery::NextPreferred { voter })
                .collect(),
        }
    }
}

/// Reads a determination off score intervals.
pub(crate) fn from_bounds(lo: &[i64], hi: &[i64], tie_rule: TieRule) -> Option<Determination> {
    let m = lo.len();
    match tie_rule {
        TieRule::Lexicographic => (0..m)
            .find(|&w| (0..m).all(|g| g == w || !beats(g, hi[g], w, lo[w])))
            .map(Determination::Winner),
        TieRule::Random => {
            let floor = *lo.iter().max()?;
            let contenders: Vec<Candidate> = (0..m).filter(|&c| hi[c] >= floor).collect();
            match contenders.as_slice() {
                [w] => Some(Determination::WinnerSet(vec![*w])),
                many if many.iter().all(|&c| lo[c] == floor && hi[c] == floor) => {
                    Some(Determination::WinnerSet(many.to_vec()))
                }
                _ => None,
            }
        }
    }
}

/// Drives a fine policy. `respond` answers each query given the queries
/// previously put to the same voter.
pub(crate) fn run_fine(
    policy: &dyn FinePolicy,
    mut knowledge: FineKnowledge,
    tie_rule: TieRule,
    budget: u128,
    mut respond: impl FnMut(&FineQuery, &[FineQuery]) -> Result<FineResponse>,
) -> Result<(Vec<(FineQuery, FineResponse)>, Determination)> {
    let mut history: Vec<(FineQuery, FineResponse)> = Vec::new();
    loop {
        if let Some(d) = knowledge.determined(tie_rule, budget) {
            return Ok((history, d));
        }
        let q = policy.next_query(&knowledge, &history).ok_or_else(|| {
            Error::InvalidArgument("policy stopped before the outcome was determined".into())
        })?;
        if !knowledge.check_query(&q)? {
            return Err(Error::InvalidArgument(format!("policy repeated query {q:?}")));
        }
        let earlier: Vec<FineQuery> = history
            .iter()
            .map(|(h, _)| *h)
            .filter(|h| h.voter() == q.voter())
            .collect();
        let r = respond(&q, &earlier)?;
        knowledge.apply(&q, r)?;
        history.push((q, r));
    }
}

/// Asks fine queries in policy order, answered from `true_profile`, until
/// the outcome is determined under `tie_rule`.
pub fn simulate_fine(
    policy: &dyn FinePolicy,
    protocol: Protocol,
    m: usize,
    true_profile: &[Ballot],
    tie_rule: TieRule,
    budget: u128,
) -> Result<ElicitationTranscript> {
    let outcome = winner(protocol, true_profile, m)?;
    let knowledge = FineKnowledge::new(protocol, m, true_profile.len());
    let mut shadow = knowledge.clone();
    let (history, _) = run_fine(policy, knowledge, tie_rule, budget, |q, _| {
        let r = shadow.answer(&true_profile[q.voter()], q)?;
        shadow.apply(q, r)?;
        Ok(r)
    })?;
    let total = match protocol {
        Protocol::Approval => true_profile.len() * m,
        _ => true_profile.len() * m.saturating_sub(1),
    };
    let steps: Vec<TranscriptStep> = history
        .into_iter()
        .map(|(q, r)| TranscriptStep {
            voter: q.voter(),
            query: Query::Fine(q),
            response: r.into(),
        })
        .collect();
    Ok(ElicitationTranscript {
        queries_used: steps.len(),
        terminated_early: steps.len() < total,
        steps,
        outcome,
    })
}
