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

//! Scores, pairwise tallies and winner determination.

use serde::{Deserialize, Serialize};

use crate::ballot::{Ballot, Candidate, Protocol};
use crate::error::{Error, Result};
use crate::stv::{stv_run, StvTrace};

/// Per-candidate exact scores under one protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub protocol: Protocol,
    pub scores: Vec<i64>,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Candidates holding the maximal score, ascending.
    pub fn argmax(&self) -> Vec<Candidate> {
        argmax(&self.scores)
    }
}

pub(crate) fn argmax(scores: &[i64]) -> Vec<Candidate> {
    match scores.iter().max() {
        Some(&best) => (0..scores.len()).filter(|&c| scores[c] == best).collect(),
        None => Vec::new(),
    }
}

/// Result of winner determination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionOutcome {
    /// Co-winners, ascending. A singleton for STV.
    pub winner_set: Vec<Candidate>,
    /// Lowest-index member of `winner_set`.
    pub tiebreak_winner: Candidate,
    /// Absent for STV.
    pub scores: Option<ScoreVector>,
    pub stv_trace: Option<StvTrace>,
}

impl ElectionOutcome {
    pub(crate) fn from_scores(sv: ScoreVector) -> Self {
        let winner_set = sv.argmax();
        ElectionOutcome {
            tiebreak_winner: winner_set[0],
            winner_set,
            scores: Some(sv),
            stv_trace: None,
        }
    }
}

/// `beats(x, sx, y, sy)`: with scores `sx` and `sy`, `x` finishes ahead of
/// `y` under the lowest-index tie-break.
#[inline]
pub(crate) fn beats(x: Candidate, sx: i64, y: Candidate, sy: i64) -> bool {
    sx > sy || (sx == sy && x < y)
}

pub(crate) fn validate_all(protocol: Protocol, ballots: &[Ballot], m: usize) -> Result<()> {
    ballots.iter().try_for_each(|b| b.validate(protocol, m))
}

/// `N[x][y]` = number of ballots ranking `x` above `y`.
pub fn pairwise_tallies(ballots: &[Ballot], m: usize) -> Result<Vec<Vec<i64>>> {
    let mut n = vec![vec![0i64; m]; m];
    for b in ballots {
        let r = match b {
            Ballot::Ranking(r) => r,
            Ballot::Approval(_) => {
                return Err(Error::ProtocolMismatch(
                    "pairwise tallies need ranking ballots".into(),
                ))
            }
        };
        b.validate(Protocol::Borda, m)?;
        add_pairwise(&mut n, r.order(), 1);
    }
    Ok(n)
}

pub(crate) fn add_pairwise(n: &mut [Vec<i64>], order: &[Candidate], weight: i64) {
    for (i, &x) in order.iter().enumerate() {
        for &y in &order[i + 1..] {
            n[x][y] += weight;
        }
    }
}

/// Copeland score from a pairwise matrix: +1 per win, -1 per loss.
pub(crate) fn copeland_from_pairwise(n: &[Vec<i64>]) -> Vec<i64> {
    let m = n.len();
    (0..m)
        .map(|x| {
            (0..m)
                .filter(|&y| y != x)
                .map(|y| (n[x][y] - n[y][x]).signum())
                .sum()
        })
        .collect()
}

/// Maximin score from a pairwise matrix. A lone candidate scores `voters`.
pub(crate) fn maximin_from_pairwise(n: &[Vec<i64>], voters: i64) -> Vec<i64> {
    let m = n.len();
    (0..m)
        .map(|x| {
            (0..m)
                .filter(|&y| y != x)
                .map(|y| n[x][y])
                .min()
                .unwrap_or(voters)
        })
        .collect()
}

/// Exact scores for every protocol except STV.
pub fn score(protocol: Protocol, ballots: &[Ballot], m: usize) -> Result<ScoreVector> {
    if protocol == Protocol::Stv {
        return Err(Error::StvNotScorable);
    }
    validate_all(protocol, ballots, m)?;
    let scores = match protocol {
        Protocol::Plurality => {
            let mut s = vec![0i64; m];
            for b in ballots {
                if let Some(top) = b.favorite() {
                    s[top] += 1;
                }
            }
            s
        }
        Protocol::Borda => {
            let mut s = vec![0i64; m];
            for r in ballots.iter().filter_map(Ballot::as_ranking) {
                for (pos, &c) in r.order().iter().enumerate() {
                    s[c] += (m - 1 - pos) as i64;
                }
            }
            s
        }
        Protocol::Approval => {
            let mut s = vec![0i64; m];
            for a in ballots.iter().filter_map(Ballot::as_approval) {
                for &c in a.approved() {
                    s[c] += 1;
                }
            }
            s
        }
        Protocol::Copeland => copeland_from_pairwise(&pairwise_tallies(ballots, m)?),
        Protocol::Maximin => {
            maximin_from_pairwise(&pairwise_tallies(ballots, m)?, ballots.len() as i64)
        }
        Protocol::Stv => unreachable!(),
    };
    Ok(ScoreVector { protocol, scores })
}

/// Winner determination for all six protocols.
pub fn winner(protocol: Protocol, ballots: &[Ballot], m: usize) -> Result<ElectionOutcome> {
    if m == 0 {
        return Err(Error::InvalidArgument("an election needs at least one candidate".into()));
    }
    if protocol == Protocol::Stv {
        stv_run(ballots, m)
    } else {
        score(protocol, ballots, m).map(ElectionOutcome::from_scores)
    }
}
