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

//! Vote elicitation for six voting protocols.
//!
//! The crate determines winners under Plurality, Borda, Copeland, Maximin,
//! STV and Approval, decides when a partially elicited profile already fixes
//! the winner, searches for minimal deciding vote subsets, generates
//! hardness-reduction instances, and evaluates elicitation games with exact
//! rational arithmetic.

pub mod ballot;
pub mod elicit;
pub mod error;
pub mod experiment;
pub mod format;
pub mod profile;
pub mod reductions;
pub mod scoring;
pub mod strategy;
pub mod stv;
pub mod termination;

pub use ballot::{all_ballots, ApprovalBallot, Ballot, Candidate, Protocol, RankingBallot};
pub use error::{Error, Result};
pub use format::{parse_election, serialize_election};
pub use profile::PartialProfile;
pub use scoring::{pairwise_tallies, score, winner, ElectionOutcome, ScoreVector};
pub use stv::{stv_run, StvRound, StvTrace};
