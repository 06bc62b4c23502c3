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

//! Partially elicited profiles: known ballots plus a count of unknown ones.

use serde::{Deserialize, Serialize};

use crate::ballot::{Ballot, Candidate, Protocol};
use crate::error::{Error, Result};

/// Default display names: `a`..`z` for small elections, `c1`..`cm` otherwise.
pub fn default_names(m: usize) -> Vec<String> {
    if m <= 26 {
        (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=m).map(|i| format!("c{i}")).collect()
    }
}

/// Known ballots `S` plus `t` ballots still to be elicited.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialProfile {
    pub protocol: Protocol,
    pub m: usize,
    pub names: Vec<String>,
    pub known: Vec<Ballot>,
    pub unknown_count: usize,
    /// Optional per-ballot voter labels, aligned with `known`.
    pub voter_ids: Option<Vec<String>>,
}

impl PartialProfile {
    /// Builds a profile with default candidate names, validating every ballot.
    pub fn new(protocol: Protocol, m: usize, known: Vec<Ballot>, unknown_count: usize) -> Result<Self> {
        Self::with_names(protocol, default_names(m), known, unknown_count)
    }

    pub fn with_names(
        protocol: Protocol,
        names: Vec<String>,
        known: Vec<Ballot>,
        unknown_count: usize,
    ) -> Result<Self> {
        let p = PartialProfile {
            protocol,
            m: names.len(),
            names,
            known,
            unknown_count,
            voter_ids: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// A fully known profile.
    pub fn complete(protocol: Protocol, m: usize, ballots: Vec<Ballot>) -> Result<Self> {
        Self::new(protocol, m, ballots, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.names.len() != self.m {
            return Err(Error::InvalidInstance(format!(
                "{} names for {} candidates",
                self.names.len(),
                self.m
            )));
        }
        if let Some(ids) = &self.voter_ids {
            if ids.len() != self.known.len() {
                return Err(Error::InvalidInstance(
                    "voter labels are not aligned with the known ballots".into(),
                ));
            }
        }
        self.known
            .iter()
            .try_for_each(|b| b.validate(self.protocol, self.m))
    }

    /// Total electorate `|S| + t`.
    pub fn n(&self) -> usize {
        self.known.len() + self.unknown_count
    }

    pub fn name(&self, c: Candidate) -> &str {
        &self.names[c]
    }

    pub fn candidate_index(&self, name: &str) -> Option<Candidate> {
        self.names.iter().position(|n| n == name)
    }

    /// Known ballots followed by `extra`.
    pub fn completed_with(&self, extra: &[Ballot]) -> Vec<Ballot> {
        let mut all = Vec::with_capacity(self.known.len() + extra.len());
        all.extend_from_slice(&self.known);
        all.extend_from_slice(extra);
        all
    }

    /// Renders a candidate set as `{a, b}`.
    pub fn format_set(&self, set: &[Candidate]) -> String {
        let parts: Vec<&str> = set.iter().map(|&c| self.name(c)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Renders a ballot with candidate names.
    pub fn format_ballot(&self, b: &Ballot) -> String {
        match b {
            Ballot::Ranking(r) => r
                .order()
                .iter()
                .map(|&c| self.name(c))
                .collect::<Vec<_>>()
                .join(">"),
            Ballot::Approval(a) => self.format_set(a.approved()),
        }
    }
}
