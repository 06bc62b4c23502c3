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

//! Single transferable vote with one elimination per round.
//!
//! Each round, every ballot counts for its highest-ranked remaining
//! candidate. The candidate with the lowest count drops out; among several
//! tied for lowest, the highest index drops out.

use serde::{Deserialize, Serialize};

use crate::ballot::{Ballot, Candidate, Protocol, RankingBallot};
use crate::error::{Error, Result};
use crate::scoring::{validate_all, ElectionOutcome};

/// One elimination round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StvRound {
    /// Score of each candidate still in the race; `None` once eliminated.
    pub scores: Vec<Option<i64>>,
    pub eliminated: Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StvTrace {
    pub rounds: Vec<StvRound>,
}

impl StvTrace {
    /// Candidates in the order they were eliminated.
    pub fn elimination_order(&self) -> Vec<Candidate> {
        self.rounds.iter().map(|r| r.eliminated).collect()
    }
}

/// Runs STV to completion; the survivor of `m - 1` rounds wins.
pub fn stv_run(ballots: &[Ballot], m: usize) -> Result<ElectionOutcome> {
    if m == 0 {
        return Err(Error::InvalidArgument("STV needs at least one candidate".into()));
    }
    validate_all(Protocol::Stv, ballots, m)?;
    let rankings: Vec<&RankingBallot> = ballots.iter().filter_map(Ballot::as_ranking).collect();
    let (survivor, trace) = run_rounds(&rankings, m, true);
    Ok(ElectionOutcome {
        winner_set: vec![survivor],
        tiebreak_winner: survivor,
        scores: None,
        stv_trace: Some(trace),
    })
}

/// Survivor only, skipping validation and the trace. Used by the searches.
pub(crate) fn stv_survivor(rankings: &[&RankingBallot], m: usize) -> Candidate {
    run_rounds(rankings, m, false).0
}

fn run_rounds(rankings: &[&RankingBallot], m: usize, record: bool) -> (Candidate, StvTrace) {
    let mut alive = vec![true; m];
    let mut trace = StvTrace::default();
    // Each ballot's current top; only ballots whose top drops out move.
    let mut tops: Vec<Candidate> = rankings
        .iter()
        .map(|r| r.top().expect("m >= 1"))
        .collect();
    for _ in 1..m {
        let mut counts = vec![0i64; m];
        for &t in &tops {
            counts[t] += 1;
        }
        let loser = (0..m)
            .filter(|&c| alive[c])
            .min_by(|&x, &y| counts[x].cmp(&counts[y]).then(y.cmp(&x)))
            .expect("at least two candidates remain");
        if record {
            trace.rounds.push(StvRound {
                scores: (0..m).map(|c| alive[c].then_some(counts[c])).collect(),
                eliminated: loser,
            });
        }
        alive[loser] = false;
        for (top, r) in tops.iter_mut().zip(rankings) {
            if *top == loser {
                *top = r.top_among(&alive).expect("a candidate remains");
            }
        }
    }
    let survivor = (0..m).find(|&c| alive[c]).expect("one survivor");
    (survivor, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(order: &[usize]) -> Ballot {
        Ballot::ranking(order.to_vec(), order.len()).unwrap()
    }

    /// Recursive oracle: recount from scratch over the remaining set each round.
    fn oracle(ballots: &[Ballot], remaining: Vec<usize>) -> usize {
        if remaining.len() == 1 {
            return remaining[0];
        }
        let score = |c: usize| {
            ballots
                .iter()
                .filter(|b| {
                    let order = b.as_ranking().unwrap().order();
                    order.iter().find(|x| remaining.contains(x)) == Some(&c)
                })
                .count()
        };
        let low = remaining.iter().map(|&c| score(c)).min().unwrap();
        let out = *remaining.iter().filter(|&&c| score(c) == low).max().unwrap();
        oracle(ballots, remaining.into_iter().filter(|&c| c != out).collect())
    }

    #[test]
    fn transfer_example() {
        let mut ballots = vec![r(&[0, 1, 2]); 2];
        ballots.extend(vec![r(&[1, 0, 2]); 2]);
        ballots.push(r(&[2, 1, 0]));
        let o = stv_run(&ballots, 3).unwrap();
        let t = o.stv_trace.unwrap();
        assert_eq!(t.rounds[0].scores, vec![Some(2), Some(2), Some(1)]);
        assert_eq!(t.rounds[0].eliminated, 2);
        assert_eq!(t.rounds[1].scores, vec![Some(2), Some(3), None]);
        assert_eq!(o.tiebreak_winner, 1);
        assert_eq!(oracle(&ballots, vec![0, 1, 2]), 1);
    }

    #[test]
    fn single_candidate_no_rounds() {
        let o = stv_run(&[r(&[0])], 1).unwrap();
        assert_eq!(o.winner_set, vec![0]);
        assert!(o.stv_trace.unwrap().rounds.is_empty());
    }

    #[test]
    fn unanimous_top_survives() {
        let ballots = vec![r(&[2, 0, 1, 3]); 4];
        let o = stv_run(&ballots, 4).unwrap();
        assert_eq!(o.tiebreak_winner, 2);
        assert!(!o.stv_trace.unwrap().elimination_order().contains(&2));
    }

    #[test]
    fn ties_eliminate_highest_index() {
        let o = stv_run(&[], 3).unwrap();
        assert_eq!(o.stv_trace.unwrap().elimination_order(), vec![2, 1]);
        assert_eq!(o.tiebreak_winner, 0);
    }

    #[test]
    fn agrees_with_oracle_on_all_small_profiles() {
        use itertools::Itertools;
        let all = crate::ballot::all_ballots(Protocol::Stv, 3);
        for n in 0..=4 {
            for profile in all.iter().cloned().combinations_with_replacement(n) {
                let got = stv_run(&profile, 3).unwrap().tiebreak_winner;
                assert_eq!(got, oracle(&profile, vec![0, 1, 2]), "{profile:?}");
            }
        }
    }
}
