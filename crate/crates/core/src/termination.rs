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

//! Deciding whether the unknown ballots can still keep a candidate from winning.
//!
//! For Plurality, Borda, Copeland, Maximin and Approval the check is a greedy
//! over challengers: give every unknown ballot to the challenger `g` (first
//! place / sole approval) and put `h` last. That completion maximizes `g`'s
//! final score and minimizes `h`'s at the same time, so `h` can be beaten iff
//! some challenger beats it there. STV has no such shortcut and is searched
//! exhaustively over multisets of completions.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::ballot::{
    all_ballots, ballot_space_size, filler_ballot, ApprovalBallot, Ballot, Candidate, Protocol,
    RankingBallot,
};
use crate::error::{check_budget, Error, Result};
use crate::profile::PartialProfile;
use crate::scoring::{beats, copeland_from_pairwise, maximin_from_pairwise, winner};
use crate::stv::stv_survivor;

/// Default cap on simulated STV elections per exhaustive search.
pub const DEFAULT_STV_BUDGET: u128 = 10_000_000;

/// Answer to "can the unknown ballots be cast so that `h` does not win?".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreventionResult {
    pub preventable: bool,
    /// Completion of the unknown ballots under which `h` loses.
    pub witness: Option<Vec<Ballot>>,
    /// Candidate finishing ahead of `h` under the witness.
    pub challenger: Option<Candidate>,
}

impl PreventionResult {
    fn not_preventable() -> Self {
        PreventionResult {
            preventable: false,
            witness: None,
            challenger: None,
        }
    }
}

/// Aggregated contribution of the known ballots, additive in ballots.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    protocol: Protocol,
    m: usize,
    voters: i64,
    points: Vec<i64>,
    pairwise: Vec<Vec<i64>>,
}

impl Tally {
    pub(crate) fn new(protocol: Protocol, m: usize) -> Self {
        debug_assert!(protocol != Protocol::Stv);
        let pairwise = if matches!(protocol, Protocol::Copeland | Protocol::Maximin) {
            vec![vec![0; m]; m]
        } else {
            Vec::new()
        };
        Tally {
            protocol,
            m,
            voters: 0,
            points: vec![0; m],
            pairwise,
        }
    }

    pub(crate) fn from_ballots(protocol: Protocol, m: usize, ballots: &[Ballot]) -> Self {
        let mut t = Tally::new(protocol, m);
        for b in ballots {
            t.add(b, 1);
        }
        t
    }

    /// Adds (`weight > 0`) or removes (`weight < 0`) copies of a ballot.
    pub(crate) fn add(&mut self, ballot: &Ballot, weight: i64) {
        self.voters += weight;
        match (self.protocol, ballot) {
            (Protocol::Plurality, Ballot::Ranking(r)) => {
                if let Some(top) = r.top() {
                    self.points[top] += weight;
                }
            }
            (Protocol::Borda, Ballot::Ranking(r)) => {
                for (pos, &c) in r.order().iter().enumerate() {
                    self.points[c] += weight * (self.m - 1 - pos) as i64;
                }
            }
            (Protocol::Approval, Ballot::Approval(a)) => {
                for &c in a.approved() {
                    self.points[c] += weight;
                }
            }
            (Protocol::Copeland | Protocol::Maximin, Ballot::Ranking(r)) => {
                crate::scoring::add_pairwise(&mut self.pairwise, r.order(), weight);
            }
            _ => unreachable!("ballots are validated before tallying"),
        }
    }

    pub(crate) fn scores(&self) -> Vec<i64> {
        match self.protocol {
            Protocol::Copeland => copeland_from_pairwise(&self.pairwise),
            Protocol::Maximin => maximin_from_pairwise(&self.pairwise, self.voters),
            _ => self.points.clone(),
        }
    }

    /// Final score of `g` when all `t` unknown ballots favor it.
    fn best(&self, g: Candidate, t: i64) -> i64 {
        let n = &self.pairwise;
        match self.protocol {
            Protocol::Plurality | Protocol::Approval => self.points[g] + t,
            Protocol::Borda => self.points[g] + t * (self.m as i64 - 1),
            Protocol::Copeland => (0..self.m)
                .filter(|&y| y != g)
                .map(|y| (n[g][y] + t - n[y][g]).signum())
                .sum(),
            Protocol::Maximin => (0..self.m)
                .filter(|&y| y != g)
                .map(|y| n[g][y] + t)
                .min()
                .unwrap_or(self.voters + t),
            Protocol::Stv => unreachable!(),
        }
    }

    /// Final score of `h` when all `t` unknown ballots rank it last.
    fn worst(&self, h: Candidate, t: i64) -> i64 {
        let n = &self.pairwise;
        match self.protocol {
            Protocol::Plurality | Protocol::Approval | Protocol::Borda => self.points[h],
            Protocol::Copeland => (0..self.m)
                .filter(|&y| y != h)
                .map(|y| (n[h][y] - n[y][h] - t).signum())
                .sum(),
            Protocol::Maximin => (0..self.m)
                .filter(|&y| y != h)
                .map(|y| n[h][y])
                .min()
                .unwrap_or(self.voters + t),
            Protocol::Stv => unreachable!(),
        }
    }

    /// Lowest-index challenger able to finish ahead of `h`.
    pub(crate) fn challenger(&self, h: Candidate, t: usize) -> Option<Candidate> {
        let t = t as i64;
        let floor = self.worst(h, t);
        (0..self.m).find(|&g| g != h && beats(g, self.best(g, t), h, floor))
    }

    /// Winner when every unknown ballot is the filler ballot.
    fn filler_winner(&self, t: usize) -> Candidate {
        let mut filled = self.clone();
        filled.add(&filler_ballot(self.protocol, self.m), t as i64);
        let scores = filled.scores();
        crate::scoring::argmax(&scores)[0]
    }

    /// The fixed winner, if no completion of `t` ballots can change it.
    pub(crate) fn decided(&self, t: usize) -> Option<Candidate> {
        let w = self.filler_winner(t);
        self.challenger(w, t).is_none().then_some(w)
    }
}

fn check_candidate(partial: &PartialProfile, c: Candidate, what: &str) -> Result<()> {
    if c >= partial.m {
        Err(Error::InvalidArgument(format!(
            "{what} {c} out of range for m = {}",
            partial.m
        )))
    } else {
        Ok(())
    }
}

/// `t` copies of the ballot that helps `g` most and `h` least: `g` first,
/// `h` last, the rest ascending (rankings), or approve exactly `{g}`.
pub fn adversarial_completion(
    partial: &PartialProfile,
    g: Candidate,
    h: Candidate,
) -> Result<Vec<Ballot>> {
    check_candidate(partial, g, "challenger")?;
    check_candidate(partial, h, "candidate")?;
    if g == h {
        return Err(Error::InvalidArgument(
            "challenger must differ from the protected candidate".into(),
        ));
    }
    let ballot = match partial.protocol {
        Protocol::Stv => return Err(Error::UnsupportedProtocol("stv".into())),
        Protocol::Approval => Ballot::Approval(ApprovalBallot::new([g], partial.m)?),
        _ => Ballot::Ranking(RankingBallot::extremal(partial.m, g, h)),
    };
    Ok(vec![ballot; partial.unknown_count])
}

/// Whether the unknown ballots can be cast so that `h` is not the winner,
/// with the default STV budget.
pub fn can_prevent_win(partial: &PartialProfile, h: Candidate) -> Result<PreventionResult> {
    can_prevent_win_with_budget(partial, h, DEFAULT_STV_BUDGET)
}

pub fn can_prevent_win_with_budget(
    partial: &PartialProfile,
    h: Candidate,
    stv_budget: u128,
) -> Result<PreventionResult> {
    partial.validate()?;
    check_candidate(partial, h, "candidate")?;
    if partial.protocol == Protocol::Stv {
        return stv_prevent(partial, h, stv_budget);
    }
    let tally = Tally::from_ballots(partial.protocol, partial.m, &partial.known);
    match tally.challenger(h, partial.unknown_count) {
        None => Ok(PreventionResult::not_preventable()),
        Some(g) => Ok(PreventionResult {
            preventable: true,
            witness: Some(adversarial_completion(partial, g, h)?),
            challenger: Some(g),
        }),
    }
}

/// Number of multisets of size `t` over `space` ballots, saturating.
fn multiset_count(space: u128, t: usize) -> u128 {
    // C(space + t - 1, t)
    let mut acc: u128 = 1;
    for i in 0..t as u128 {
        acc = match acc.checked_mul(space + i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn stv_prevent(partial: &PartialProfile, h: Candidate, budget: u128) -> Result<PreventionResult> {
    let m = partial.m;
    let t = partial.unknown_count;
    let required = multiset_count(ballot_space_size(Protocol::Stv, m), t);
    check_budget(required, budget)?;
    let known: Vec<&RankingBallot> = partial.known.iter().filter_map(Ballot::as_ranking).collect();
    let space = all_ballots(Protocol::Stv, m);
    let rankings: Vec<&RankingBallot> = space.iter().filter_map(Ballot::as_ranking).collect();
    let mut all = known.clone();
    for completion in rankings.iter().copied().combinations_with_replacement(t) {
        all.truncate(known.len());
        all.extend(completion.iter().copied());
        let survivor = stv_survivor(&all, m);
        if survivor != h {
            return Ok(PreventionResult {
                preventable: true,
                witness: Some(completion.into_iter().cloned().map(Ballot::Ranking).collect()),
                challenger: Some(survivor),
            });
        }
    }
    Ok(PreventionResult::not_preventable())
}

/// The candidate that wins under every completion of the unknown ballots,
/// or `None` while elicitation must continue.
pub fn decided(partial: &PartialProfile) -> Result<Option<Candidate>> {
    decided_with_budget(partial, DEFAULT_STV_BUDGET)
}

pub fn decided_with_budget(partial: &PartialProfile, stv_budget: u128) -> Result<Option<Candidate>> {
    partial.validate()?;
    if partial.protocol != Protocol::Stv {
        let tally = Tally::from_ballots(partial.protocol, partial.m, &partial.known);
        return Ok(tally.decided(partial.unknown_count));
    }
    let filler = vec![filler_ballot(partial.protocol, partial.m); partial.unknown_count];
    let w = winner(partial.protocol, &partial.completed_with(&filler), partial.m)?.tiebreak_winner;
    if partial.unknown_count == 0 {
        return Ok(Some(w));
    }
    let r = stv_prevent(partial, w, stv_budget)?;
    Ok((!r.preventable).then_some(w))
}

/// Exhaustive oracle over every ordered completion, for any protocol.
pub fn brute_force_prevent(
    partial: &PartialProfile,
    h: Candidate,
    budget: u128,
) -> Result<PreventionResult> {
    partial.validate()?;
    check_candidate(partial, h, "candidate")?;
    let space = all_ballots(partial.protocol, partial.m);
    let required = (space.len() as u128)
        .checked_pow(partial.unknown_count as u32)
        .unwrap_or(u128::MAX);
    check_budget(required, budget)?;
    for completion in (0..partial.unknown_count)
        .map(|_| space.iter().cloned())
        .multi_cartesian_product()
        .chain(std::iter::once(Vec::new()).filter(|_| partial.unknown_count == 0))
    {
        let outcome = winner(partial.protocol, &partial.completed_with(&completion), partial.m)?;
        if outcome.tiebreak_winner != h {
            return Ok(PreventionResult {
                preventable: true,
                witness: Some(completion),
                challenger: Some(outcome.tiebreak_winner),
            });
        }
    }
    Ok(PreventionResult::not_preventable())
}

/// Exhaustive version of [`decided`]: `Some(w)` iff every completion elects `w`.
pub fn brute_force_decided(partial: &PartialProfile, budget: u128) -> Result<Option<Candidate>> {
    let filler = vec![filler_ballot(partial.protocol, partial.m); partial.unknown_count];
    let w = winner(partial.protocol, &partial.completed_with(&filler), partial.m)?.tiebreak_winner;
    let r = brute_force_prevent(partial, w, budget)?;
    Ok((!r.preventable).then_some(w))
}

/// Co-winner set that every completion produces, if there is one. This is
/// the stopping rule when ties are broken at random: the lottery over the
/// winner set must already be fixed. Exhaustive over multisets of completions.
pub fn decided_winner_set(partial: &PartialProfile, budget: u128) -> Result<Option<Vec<Candidate>>> {
    partial.validate()?;
    let space = all_ballots(partial.protocol, partial.m);
    let t = partial.unknown_count;
    check_budget(multiset_count(space.len() as u128, t), budget)?;
    let mut fixed: Option<Vec<Candidate>> = None;
    for completion in space.iter().cloned().combinations_with_replacement(t) {
        let set = winner(partial.protocol, &partial.completed_with(&completion), partial.m)?.winner_set;
        match &fixed {
            None => fixed = Some(set),
            Some(f) if *f != set => return Ok(None),
            Some(_) => {}
        }
    }
    Ok(fixed)
}
