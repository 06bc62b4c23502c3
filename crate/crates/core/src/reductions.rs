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

//! Hardness-reduction instance generators and brute-force solvers for
//! their source problems (exact 3-cover and single-vote STV manipulation).

use serde::{Deserialize, Serialize};

use crate::ballot::{all_ballots, ApprovalBallot, Ballot, Candidate, Protocol, RankingBallot};
use crate::elicit::ElicitationInstance;
use crate::error::{check_budget, Error, Result};
use crate::profile::PartialProfile;
use crate::stv::stv_survivor;

/// Universe `{0, .., 3q-1}` and a collection of 3-element subsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeCoverInstance {
    q: usize,
    subsets: Vec<[usize; 3]>,
}

impl ThreeCoverInstance {
    /// Each subset must hold three distinct elements of the universe.
    pub fn new(q: usize, subsets: Vec<[usize; 3]>) -> Result<Self> {
        let size = 3 * q;
        let mut normalized = Vec::with_capacity(subsets.len());
        for (i, mut s) in subsets.into_iter().enumerate() {
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::InvalidInstance(format!(
                    "subset {} has repeated elements; each subset needs exactly 3",
                    i + 1
                )));
            }
            if s[2] >= size {
                return Err(Error::InvalidInstance(format!(
                    "subset {} mentions element {} outside a universe of {size}",
                    i + 1,
                    s[2] + 1
                )));
            }
            normalized.push(s);
        }
        Ok(ThreeCoverInstance {
            q,
            subsets: normalized,
        })
    }

    /// Builds from arbitrary-length subsets, rejecting any that is not of size 3.
    pub fn from_sets(q: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let fixed = sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                <[usize; 3]>::try_from(s.as_slice()).map_err(|_| {
                    Error::InvalidInstance(format!(
                        "subset {} has {} elements; each subset needs exactly 3",
                        i + 1,
                        s.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(q, fixed)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.subsets.len()
    }

    pub fn universe_size(&self) -> usize {
        3 * self.q
    }

    pub fn subsets(&self) -> &[[usize; 3]] {
        &self.subsets
    }
}

/// Known STV ballots, one ballot still to come, and the candidate `c`
/// that ballot should elect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpInstance {
    pub names: Vec<String>,
    pub votes: Vec<RankingBallot>,
    pub target: Candidate,
}

impl EpInstance {
    /// Requires at least one vote ranking `target` first.
    pub fn new(names: Vec<String>, votes: Vec<RankingBallot>, target: Candidate) -> Result<Self> {
        let m = names.len();
        if target >= m {
            return Err(Error::InvalidInstance(format!("target {target} out of range")));
        }
        for v in &votes {
            RankingBallot::new(v.order().to_vec(), m)?;
        }
        if !votes.iter().any(|v| v.top() == Some(target)) {
            return Err(Error::InvalidInstance(
                "no known vote ranks the target first".into(),
            ));
        }
        Ok(EpInstance {
            names,
            votes,
            target,
        })
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }
}

fn universe_names(q: usize) -> Vec<String> {
    (1..=3 * q).map(|i| format!("u{i}")).collect()
}

/// Approval instance: one ballot approving `S_i ∪ {w}` per subset plus
/// `r - 2q + 2` ballots approving only `w`; `k = r - q + 2`.
pub fn gen_approval_elicitation(tc: &ThreeCoverInstance) -> Result<ElicitationInstance> {
    let (q, r) = (tc.q(), tc.r());
    if r + 2 < 2 * q {
        return Err(Error::InvalidInstance(format!(
            "need r >= 2q - 2 (r = {r}, q = {q})"
        )));
    }
    let w = 3 * q;
    let mut names = universe_names(q);
    names.push("w".into());
    let m = names.len();
    let mut votes: Vec<Ballot> = tc
        .subsets()
        .iter()
        .map(|s| ApprovalBallot::new(s.iter().copied().chain([w]), m).map(Ballot::Approval))
        .collect::<Result<_>>()?;
    votes.extend(vec![Ballot::Approval(ApprovalBallot::new([w], m)?); r + 2 - 2 * q]);
    let k = r + 2 - q;
    let mut inst = ElicitationInstance::with_names(Protocol::Approval, names, votes, k)?;
    inst.tagged_candidate = Some(w);
    Ok(inst)
}

/// Derived sizes of the Borda construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BordaReductionParams {
    pub q: usize,
    pub r: usize,
    /// `|B| = 64 r^2`.
    pub padding_size: usize,
    /// `8r - 4q - 4` ballots put `w` first.
    pub g: i64,
    /// Points for a first place: `64 r^2 + 3q`.
    pub l: i64,
    /// `g + q`.
    pub k: i64,
}

impl BordaReductionParams {
    pub fn new(q: usize, r: usize) -> Self {
        let (qi, ri) = (q as i64, r as i64);
        let g = 8 * ri - 4 * qi - 4;
        BordaReductionParams {
            q,
            r,
            padding_size: 64 * r * r,
            g,
            l: 64 * ri * ri + 3 * qi,
            k: g + qi,
        }
    }
}

/// Borda instance over `U ∪ {w} ∪ B`. Candidates are `u1..u3q`, then `w`,
/// then `b1..b|B|`. `B/2` is the lower-index half of the padding, ahead of
/// `U - S_i`; the upper half sits between `U - S_i` and `S_i`.
pub fn gen_borda_elicitation(tc: &ThreeCoverInstance) -> Result<ElicitationInstance> {
    let params = BordaReductionParams::new(tc.q(), tc.r());
    if params.g < 0 {
        return Err(Error::InvalidInstance(format!(
            "8r - 4q - 4 = {} is negative",
            params.g
        )));
    }
    let q = tc.q();
    let r = tc.r();
    let universe: Vec<Candidate> = (0..3 * q).collect();
    let w = 3 * q;
    let b = |j: usize| 3 * q + j; // j in 1..=|B|
    let pad = params.padding_size;
    let half = pad / 2;
    let mut names = universe_names(q);
    names.push("w".into());
    names.extend((1..=pad).map(|j| format!("b{j}")));
    let m = names.len();

    let mut votes = Vec::with_capacity(params.g as usize + r);
    for s in tc.subsets() {
        let mut order: Vec<Candidate> = (1..=half).map(b).collect();
        order.extend(universe.iter().copied().filter(|u| !s.contains(u)));
        order.extend((half + 1..=pad).map(b));
        order.extend(s.iter().copied());
        order.push(w);
        votes.push(Ballot::Ranking(RankingBallot::new(order, m)?));
    }
    let eighth = 8 * r * r;
    let mut forward = vec![w];
    forward.extend((1..=eighth).map(b));
    forward.extend(universe.iter().copied());
    forward.extend((eighth + 1..=pad).map(b));
    let mut backward = vec![w];
    backward.extend((pad - eighth + 1..=pad).rev().map(b));
    backward.extend(universe.iter().rev().copied());
    backward.extend((1..=pad - eighth).rev().map(b));
    let forward = Ballot::Ranking(RankingBallot::new(forward, m)?);
    let backward = Ballot::Ranking(RankingBallot::new(backward, m)?);
    let each = params.g as usize / 2;
    votes.extend(vec![forward; each]);
    votes.extend(vec![backward; each]);

    let k = usize::try_from(params.k)
        .map_err(|_| Error::InvalidInstance("negative budget".into()))?;
    let mut inst = ElicitationInstance::with_names(Protocol::Borda, names, votes, k)?;
    inst.tagged_candidate = Some(w);
    Ok(inst)
}

/// STV termination instance with one unknown ballot. Returns the profile
/// and the protected candidate `h` (the new, highest index).
pub fn gen_stv_not_done(ep: &EpInstance) -> Result<(PartialProfile, Candidate)> {
    let c = ep.target;
    let designated = ep
        .votes
        .iter()
        .position(|v| v.top() == Some(c))
        .ok_or_else(|| Error::InvalidInstance("no known vote ranks the target first".into()))?;
    let h = ep.m();
    let m = h + 1;
    let mut names = ep.names.clone();
    let mut h_name = "h".to_string();
    while names.contains(&h_name) {
        h_name.push('\'');
    }
    names.push(h_name);

    let mut known = Vec::with_capacity(2 * ep.votes.len());
    for (i, v) in ep.votes.iter().enumerate() {
        let mut order = v.order().to_vec();
        if i == designated {
            order.insert(1, h);
        } else {
            order.push(h);
        }
        known.push(Ballot::Ranking(RankingBallot::new(order, m)?));
    }
    let mut h_first = vec![h];
    h_first.extend(0..h);
    let h_first = Ballot::Ranking(RankingBallot::new(h_first, m)?);
    known.extend(vec![h_first; ep.votes.len()]);
    let partial = PartialProfile::with_names(Protocol::Stv, names, known, 1)?;
    Ok((partial, h))
}

/// Number of `q`-subsets of `r` items, saturating.
fn binomial(r: usize, q: usize) -> u128 {
    if q > r {
        return 0;
    }
    let q = q.min(r - q);
    let mut acc: u128 = 1;
    for i in 0..q as u128 {
        acc = match acc.checked_mul(r as u128 - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Whether `q` of the subsets cover the universe. Branches on the lowest
/// uncovered element, so only pairwise-disjoint picks are explored.
pub fn solve_3cover(tc: &ThreeCoverInstance, budget: u128) -> Result<bool> {
    check_budget(binomial(tc.r(), tc.q()), budget)?;
    let mut covered = vec![false; tc.universe_size()];
    Ok(cover_from(tc, &mut covered, tc.q()))
}

fn cover_from(tc: &ThreeCoverInstance, covered: &mut [bool], picks: usize) -> bool {
    let Some(first) = covered.iter().position(|c| !c) else {
        return true;
    };
    let uncovered = covered.iter().filter(|c| !**c).count();
    if picks == 0 || uncovered > 3 * picks {
        return false;
    }
    for s in tc.subsets().iter().filter(|s| s.contains(&first)) {
        if s.iter().any(|&e| covered[e]) {
            continue;
        }
        s.iter().for_each(|&e| covered[e] = true);
        let found = cover_from(tc, covered, picks - 1);
        s.iter().for_each(|&e| covered[e] = false);
        if found {
            return true;
        }
    }
    false
}

/// Whether some final ballot makes `target` the STV winner.
pub fn solve_effective_preference(ep: &EpInstance, budget: u128) -> Result<bool> {
    Ok(effective_preference_witness(ep, budget)?.is_some())
}

/// A final ballot electing the target, if any (first in lexicographic order).
pub fn effective_preference_witness(ep: &EpInstance, budget: u128) -> Result<Option<RankingBallot>> {
    let m = ep.m();
    check_budget(crate::ballot::ballot_space_size(Protocol::Stv, m), budget)?;
    let mut all: Vec<&RankingBallot> = ep.votes.iter().collect();
    let space = all_ballots(Protocol::Stv, m);
    for last in space.iter().filter_map(Ballot::as_ranking) {
        all.push(last);
        let survivor = stv_survivor(&all, m);
        all.pop();
        if survivor == ep.target {
            return Ok(Some(last.clone()));
        }
    }
    Ok(None)
}
