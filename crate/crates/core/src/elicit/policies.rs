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

//! Concrete policies: scripted branching policies and fixed-order fine policies.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ballot::{Ballot, Protocol};
use crate::elicit::{CoarsePolicy, FineKnowledge, FinePolicy, FineQuery, FineResponse};

/// Ask `first`; if its ballot equals `trigger` ask `if_match` next,
/// otherwise `otherwise`; then everyone left in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingCoarsePolicy {
    pub first: usize,
    pub trigger: Ballot,
    pub if_match: usize,
    pub otherwise: usize,
}

impl CoarsePolicy for BranchingCoarsePolicy {
    fn next_voter(&self, asked: &[(usize, Ballot)], n: usize) -> Option<usize> {
        let Some((_, first_ballot)) = asked.first() else {
            return Some(self.first);
        };
        let second = if *first_ballot == self.trigger {
            self.if_match
        } else {
            self.otherwise
        };
        std::iter::once(second)
            .chain(0..n)
            .find(|v| asked.iter().all(|(u, _)| u != v))
    }
}

/// Ask `first`; if the answer is `trigger` follow `if_match`, otherwise
/// `otherwise`; afterwards every open query in canonical order.
/// Scripted queries that are already answered are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingFinePolicy {
    pub first: FineQuery,
    pub trigger: FineResponse,
    pub if_match: Vec<FineQuery>,
    pub otherwise: Vec<FineQuery>,
}

impl FinePolicy for BranchingFinePolicy {
    fn next_query(
        &self,
        knowledge: &FineKnowledge,
        history: &[(FineQuery, FineResponse)],
    ) -> Option<FineQuery> {
        let Some(&(_, first_answer)) = history.first() else {
            return Some(self.first);
        };
        let script = if first_answer == self.trigger {
            &self.if_match
        } else {
            &self.otherwise
        };
        script
            .iter()
            .copied()
            .find(|q| knowledge.check_query(q).unwrap_or(false))
            .or_else(|| knowledge.open_queries().into_iter().next())
    }
}

/// Works through a fixed query sequence, skipping what is already known.
/// The sequence never depends on answers, so the policy is nondivulging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedOrderFinePolicy {
    pub sequence: Vec<FineQuery>,
}

impl FixedOrderFinePolicy {
    /// Voters take turns; Approval voters are asked about candidates in
    /// ascending index, ranking voters for their next preference.
    pub fn interleaved(protocol: Protocol, n: usize, m: usize) -> Self {
        let sequence = if protocol.uses_approval() {
            (0..m)
                .flat_map(|candidate| {
                    (0..n).map(move |voter| FineQuery::ApproveCandidate { voter, candidate })
                })
                .collect()
        } else {
            (0..m.saturating_sub(1))
                .flat_map(|_| (0..n).map(|voter| FineQuery::NextPreferred { voter }))
                .collect()
        };
        FixedOrderFinePolicy { sequence }
    }

    /// A seeded random interleaving. Approval cells are shuffled freely;
    /// ranking voters are asked `m - 1` times each in a shuffled turn order.
    pub fn random(protocol: Protocol, n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sequence = Self::interleaved(protocol, n, m).sequence;
        sequence.shuffle(&mut rng);
        FixedOrderFinePolicy { sequence }
    }
}

impl FinePolicy for FixedOrderFinePolicy {
    fn next_query(
        &self,
        knowledge: &FineKnowledge,
        _history: &[(FineQuery, FineResponse)],
    ) -> Option<FineQuery> {
        // The j-th next-preferred entry of a voter is live once j answers are in.
        let mut seen = vec![0usize; knowledge.n()];
        self.sequence.iter().copied().find(|q| {
            let v = q.voter();
            if v >= seen.len() {
                return false;
            }
            let occurrence = seen[v];
            seen[v] += 1;
            let live = match q {
                FineQuery::NextPreferred { .. } => occurrence == knowledge.prefix(v).len(),
                FineQuery::ApproveCandidate { .. } => true,
            };
            live && knowledge.check_query(q).unwrap_or(false)
        })
    }
}
