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

//! Elicitation policies and solvers.
//!
//! Suspicions are perfect: the elicitor holds one predicted ballot per voter.
//! Coarse elicitation asks for whole ballots; fine elicitation asks
//! approve-this-candidate or next-preferred questions.

pub(crate) mod coarse;
pub(crate) mod fine;
mod plurality;
mod policies;
mod subset;
mod tree;

pub use coarse::{
    order_for, simulate_coarse, simulate_coarse_standard, CoarsePolicy, ElicitationTranscript,
    OrderPolicy, Query, Response, StandardPolicy, TranscriptStep,
};
pub use fine::{simulate_fine, FineKnowledge, FinePolicy, FineQuery, FineResponse};
pub use plurality::{plurality_elicit_order, PluralityPlan};
pub use policies::{BranchingCoarsePolicy, BranchingFinePolicy, FixedOrderFinePolicy};
pub use subset::{brute_force_min_deciding_subset, min_deciding_subset, min_deciding_subset_with_budget};
pub use tree::{
    is_nondivulging, materialize_coarse_tree, materialize_fine_tree, validate_coarse_tree,
    validate_fine_tree, CoarseTree, FineTree, DEFAULT_NODE_GUARD,
};

use serde::{Deserialize, Serialize};

use crate::ballot::{Ballot, Candidate, Protocol};
use crate::error::{Error, Result};
use crate::profile::{default_names, PartialProfile};
use crate::scoring::winner;

/// How a final tie among co-winners is resolved, which fixes what it means
/// for elicitation to be done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieRule {
    /// Lowest index wins; done once the tie-break winner is fixed.
    Lexicographic,
    /// Uniform lottery over co-winners; done once the co-winner set is fixed.
    Random,
}

/// What an elicitation has pinned down.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Determination {
    /// The tie-break winner is fixed.
    Winner(Candidate),
    /// The co-winner set is fixed.
    WinnerSet(Vec<Candidate>),
}

impl Determination {
    /// Uniform lottery support: the singleton winner or the co-winner set.
    pub fn winners(&self) -> Vec<Candidate> {
        match self {
            Determination::Winner(c) => vec![*c],
            Determination::WinnerSet(s) => s.clone(),
        }
    }
}

/// A fully predicted profile with a query budget `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElicitationInstance {
    pub protocol: Protocol,
    pub m: usize,
    pub names: Vec<String>,
    pub predicted: Vec<Ballot>,
    pub k: usize,
    pub tagged_candidate: Option<Candidate>,
}

impl ElicitationInstance {
    pub fn new(protocol: Protocol, m: usize, predicted: Vec<Ballot>, k: usize) -> Result<Self> {
        Self::with_names(protocol, default_names(m), predicted, k)
    }

    pub fn with_names(
        protocol: Protocol,
        names: Vec<String>,
        predicted: Vec<Ballot>,
        k: usize,
    ) -> Result<Self> {
        if k > predicted.len() {
            return Err(Error::InvalidInstance(format!(
                "budget k = {k} exceeds the {} voters",
                predicted.len()
            )));
        }
        let inst = ElicitationInstance {
            protocol,
            m: names.len(),
            names,
            predicted,
            k,
            tagged_candidate: None,
        };
        inst.profile()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.predicted.len()
    }

    /// The predicted profile as a complete election.
    pub fn profile(&self) -> Result<PartialProfile> {
        PartialProfile::with_names(self.protocol, self.names.clone(), self.predicted.clone(), 0)
    }

    /// Predicted ballots of `voters` as known, everyone else unknown.
    pub fn partial(&self, voters: &[usize]) -> PartialProfile {
        PartialProfile {
            protocol: self.protocol,
            m: self.m,
            names: self.names.clone(),
            known: voters.iter().map(|&v| self.predicted[v].clone()).collect(),
            unknown_count: self.n() - voters.len(),
            voter_ids: None,
        }
    }

    pub fn predicted_winner(&self) -> Result<Candidate> {
        Ok(winner(self.protocol, &self.predicted, self.m)?.tiebreak_winner)
    }
}
