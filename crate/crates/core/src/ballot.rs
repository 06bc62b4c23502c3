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

//! Ballots, candidates and the six supported protocols.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidates are dense indices `0..m`. Lower indices win ties.
pub type Candidate = usize;

/// Winner-determination rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Plurality,
    Borda,
    Copeland,
    Maximin,
    Stv,
    Approval,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::Plurality,
        Protocol::Borda,
        Protocol::Copeland,
        Protocol::Maximin,
        Protocol::Stv,
        Protocol::Approval,
    ];

    /// Approval is the only protocol fed with approval ballots.
    pub fn uses_approval(self) -> bool {
        self == Protocol::Approval
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Plurality => "plurality",
            Protocol::Borda => "borda",
            Protocol::Copeland => "copeland",
            Protocol::Maximin => "maximin",
            Protocol::Stv => "stv",
            Protocol::Approval => "approval",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown protocol `{s}`")))
    }
}

/// A complete ranking, most-preferred candidate first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankingBallot(Vec<Candidate>);

impl RankingBallot {
    /// Checks that `order` is a permutation of `0..m`.
    pub fn new(order: Vec<Candidate>, m: usize) -> Result<Self> {
        if order.len() != m {
            return Err(Error::MalformedBallot(format!(
                "ranking has {} entries, expected {m}",
                order.len()
            )));
        }
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m {
                return Err(Error::MalformedBallot(format!(
                    "candidate index {c} out of range for m = {m}"
                )));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::MalformedBallot(format!(
                    "candidate index {c} ranked twice; a ranking must be a permutation"
                )));
            }
        }
        Ok(RankingBallot(order))
    }

    /// `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        RankingBallot((0..m).collect())
    }

    /// Ranks `top` first, `bottom` last and everything else in ascending index order.
    pub fn extremal(m: usize, top: Candidate, bottom: Candidate) -> Self {
        debug_assert!(top != bottom && top < m && bottom < m);
        let mut order = Vec::with_capacity(m);
        order.push(top);
        order.extend((0..m).filter(|&c| c != top && c != bottom));
        order.push(bottom);
        RankingBallot(order)
    }

    pub fn order(&self) -> &[Candidate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<Candidate> {
        self.0.first().copied()
    }

    /// Position of every candidate (0 = top).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &c) in self.0.iter().enumerate() {
            pos[c] = i;
        }
        pos
    }

    /// Highest-ranked candidate for which `alive` holds.
    pub fn top_among(&self, alive: &[bool]) -> Option<Candidate> {
        self.0.iter().copied().find(|&c| alive[c])
    }

    pub(crate) fn from_order_unchecked(order: Vec<Candidate>) -> Self {
        RankingBallot(order)
    }
}

/// The set of approved candidates, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApprovalBallot(Vec<Candidate>);

impl ApprovalBallot {
    pub fn new(approved: impl IntoIterator<Item = Candidate>, m: usize) -> Result<Self> {
        let mut v: Vec<Candidate> = approved.into_iter().collect();
        v.sort_unstable();
        if let Some(&c) = v.iter().find(|&&c| c >= m) {
            return Err(Error::MalformedBallot(format!(
                "approved candidate {c} out of range for m = {m}"
            )));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedBallot(
                "candidate approved twice on one ballot".into(),
            ));
        }
        Ok(ApprovalBallot(v))
    }

    pub fn empty() -> Self {
        ApprovalBallot(Vec::new())
    }

    /// Ballot whose approved set is given by the low `m` bits of `mask`.
    pub fn from_mask(mask: u64, m: usize) -> Self {
        ApprovalBallot((0..m).filter(|&c| mask >> c & 1 == 1).collect())
    }

    pub fn approved(&self) -> &[Candidate] {
        &self.0
    }

    pub fn approves(&self, c: Candidate) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with candidate `c` added or removed.
    pub fn with(&self, c: Candidate, approve: bool) -> Self {
        let mut v: Vec<Candidate> = self.0.iter().copied().filter(|&x| x != c).collect();
        if approve {
            v.push(c);
            v.sort_unstable();
        }
        ApprovalBallot(v)
    }
}

/// Either kind of ballot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ballot {
    Ranking(RankingBallot),
    Approval(ApprovalBallot),
}

impl Ballot {
    /// Shorthand for a checked ranking ballot.
    pub fn ranking(order: Vec<Candidate>, m: usize) -> Result<Self> {
        RankingBallot::new(order, m).map(Ballot::Ranking)
    }

    /// Shorthand for a checked approval ballot.
    pub fn approval(approved: impl IntoIterator<Item = Candidate>, m: usize) -> Result<Self> {
        ApprovalBallot::new(approved, m).map(Ballot::Approval)
    }

    pub fn as_ranking(&self) -> Option<&RankingBallot> {
        match self {
            Ballot::Ranking(r) => Some(r),
            Ballot::Approval(_) => None,
        }
    }

    pub fn as_approval(&self) -> Option<&ApprovalBallot> {
        match self {
            Ballot::Approval(a) => Some(a),
            Ballot::Ranking(_) => None,
        }
    }

    /// Checks the ballot kind against the protocol and the indices against `m`.
    pub fn validate(&self, protocol: Protocol, m: usize) -> Result<()> {
        match (self, protocol.uses_approval()) {
            (Ballot::Ranking(r), false) => RankingBallot::new(r.0.clone(), m).map(|_| ()),
            (Ballot::Approval(a), true) => ApprovalBallot::new(a.0.clone(), m).map(|_| ()),
            (Ballot::Ranking(_), true) => Err(Error::ProtocolMismatch(format!(
                "{protocol} (got a ranking ballot)"
            ))),
            (Ballot::Approval(_), false) => Err(Error::ProtocolMismatch(format!(
                "{protocol} (got an approval ballot)"
            ))),
        }
    }

    /// The "most supported" candidate of a ballot: the top of a ranking,
    /// the lowest-index approved candidate of an approval ballot.
    pub fn favorite(&self) -> Option<Candidate> {
        match self {
            Ballot::Ranking(r) => r.top(),
            Ballot::Approval(a) => a.approved().first().copied(),
        }
    }

    /// Whether the ballot counts as support for `c` (ranked first / approved).
    pub fn supports(&self, c: Candidate) -> bool {
        match self {
            Ballot::Ranking(r) => r.top() == Some(c),
            Ballot::Approval(a) => a.approves(c),
        }
    }

    /// Applies a candidate relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[Candidate]) -> Ballot {
        match self {
            Ballot::Ranking(r) => Ballot::Ranking(RankingBallot(
                r.order().iter().map(|&c| perm[c]).collect(),
            )),
            Ballot::Approval(a) => {
                let mut v: Vec<Candidate> = a.approved().iter().map(|&c| perm[c]).collect();
                v.sort_unstable();
                Ballot::Approval(ApprovalBallot(v))
            }
        }
    }
}

/// The canonical filler ballot: identity ranking, or the empty approval set.
pub fn filler_ballot(protocol: Protocol, m: usize) -> Ballot {
    if protocol.uses_approval() {
        Ballot::Approval(ApprovalBallot::empty())
    } else {
        Ballot::Ranking(RankingBallot::identity(m))
    }
}

/// Every possible ballot for the protocol: all `m!` rankings in
/// lexicographic order, or all `2^m` approval sets by bitmask.
pub fn all_ballots(protocol: Protocol, m: usize) -> Vec<Ballot> {
    use itertools::Itertools;
    if protocol.uses_approval() {
        (0..1u64 << m)
            .map(|mask| Ballot::Approval(ApprovalBallot::from_mask(mask, m)))
            .collect()
    } else {
        (0..m)
            .permutations(m)
            .map(|p| Ballot::Ranking(RankingBallot(p)))
            .collect()
    }
}

/// Number of distinct ballots, saturating.
pub fn ballot_space_size(protocol: Protocol, m: usize) -> u128 {
    if protocol.uses_approval() {
        if m >= 127 {
            u128::MAX
        } else {
            1u128 << m
        }
    } else {
        (1..=m as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).unwrap_or(u128::MAX)
    }
}
